//! Finite Blaschke products `γ · Π b_{α_i}^{n_i}` with `b_α(z) = (z - α)/(1 - ᾱz)`.
//!
//! These are the inner functions whose model spaces are finite dimensional;
//! `dim Q_θ` equals the number of zeros counted with multiplicity.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::config::CheckConfig;
use crate::error::{fmt_complex, Error, Result};
use crate::moebius::check_disk;
use crate::report::{Criterion, InvarianceReport, MultiplicityCheck, Verdict};
use crate::series::{default_radius, TruncatedSeries};
use crate::symbol::Symbol;

/// Two zeros closer than this are the same zero.
pub const ZERO_MATCH_TOL: f64 = 1e-10;
/// Threshold for "this Taylor coefficient vanishes" in vanishing-order counts.
pub const ORDER_TOL: f64 = 1e-10;
/// Allowed `|1 - ᾱz|` before evaluation reports a pole.
pub const POLE_TOL: f64 = 1e-14;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlaschkeZero {
    #[serde(serialize_with = "ser_complex")]
    pub alpha: Complex64,
    pub multiplicity: u32,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_complex(*z))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    /// `γ = e^{i·gamma_arg}`; the argument is stored so serialization is exact.
    gamma_arg: f64,
    zeros: Vec<BlaschkeZero>,
}

impl BlaschkeProduct {
    /// Builds `e^{i·gamma_arg} Π b_α^n`. Zeros closer than `1e-10` are merged
    /// and the list is sorted by `(re, im)`.
    pub fn new(gamma_arg: f64, zeros: &[(Complex64, u32)]) -> Result<Self> {
        if !gamma_arg.is_finite() {
            return Err(Error::InvalidArgument("unimodular constant argument is not finite".into()));
        }
        let mut merged: Vec<BlaschkeZero> = Vec::new();
        for &(alpha, n) in zeros {
            check_disk(alpha)?;
            if n == 0 {
                continue;
            }
            match merged.iter_mut().find(|z| (z.alpha - alpha).norm() <= ZERO_MATCH_TOL) {
                Some(z) => z.multiplicity += n,
                None => merged.push(BlaschkeZero { alpha, multiplicity: n }),
            }
        }
        merged.sort_by(|x, y| x.alpha.re.total_cmp(&y.alpha.re).then(x.alpha.im.total_cmp(&y.alpha.im)));
        Ok(Self { gamma_arg, zeros: merged })
    }

    pub fn from_zeros(zeros: &[(Complex64, u32)]) -> Result<Self> {
        Self::new(0.0, zeros)
    }

    /// The single factor `b_α`.
    pub fn factor(alpha: Complex64) -> Result<Self> {
        Self::new(0.0, &[(alpha, 1)])
    }

    /// `b_α^n`.
    pub fn factor_power(alpha: Complex64, n: u32) -> Result<Self> {
        Self::new(0.0, &[(alpha, n)])
    }

    /// `z^n`.
    pub fn z_power(n: u32) -> Self {
        Self::new(0.0, &[(Complex64::new(0.0, 0.0), n)]).expect("origin lies in the disk")
    }

    pub fn unimodular(gamma_arg: f64) -> Result<Self> {
        Self::new(gamma_arg, &[])
    }

    pub fn gamma_arg(&self) -> f64 {
        self.gamma_arg
    }

    pub fn gamma(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.gamma_arg)
    }

    pub fn zeros(&self) -> &[BlaschkeZero] {
        &self.zeros
    }

    /// Zeros counted with multiplicity; equals `dim Q_θ`.
    pub fn degree(&self) -> usize {
        self.zeros.iter().map(|z| z.multiplicity as usize).sum()
    }

    pub fn max_zero_modulus(&self) -> f64 {
        self.zeros.iter().map(|z| z.alpha.norm()).fold(0.0, f64::max)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let zeros: Vec<(Complex64, u32)> = self
            .zeros
            .iter()
            .chain(&other.zeros)
            .map(|z| (z.alpha, z.multiplicity))
            .collect();
        Self::new(self.gamma_arg + other.gamma_arg, &zeros).expect("zeros already validated")
    }

    /// `θ/z`, removing one zero at the origin.
    pub fn divide_by_z(&self) -> Result<Self> {
        let at_zero = self.multiplicity_at(Complex64::new(0.0, 0.0))?;
        if at_zero == 0 {
            return Err(Error::NonvanishingAtZero(self.eval(Complex64::new(0.0, 0.0))?.norm()));
        }
        let zeros: Vec<(Complex64, u32)> = self
            .zeros
            .iter()
            .map(|z| {
                if z.alpha.norm() <= ZERO_MATCH_TOL {
                    (z.alpha, z.multiplicity - 1)
                } else {
                    (z.alpha, z.multiplicity)
                }
            })
            .collect();
        Self::new(self.gamma_arg, &zeros)
    }

    /// `γ Π b_{α_i}(z)^{n_i}`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = self.gamma();
        for zero in &self.zeros {
            let den = ONE - zero.alpha.conj() * z;
            if den.norm() <= POLE_TOL {
                return Err(Error::Pole(fmt_complex(z)));
            }
            acc *= ((z - zero.alpha) / den).powu(zero.multiplicity);
        }
        debug_assert!(z.norm() > 1.0 || acc.norm() <= 1.0 + 1e-10);
        Ok(acc)
    }

    /// Taylor coefficients through `degree`, multiplying the factor expansions
    /// `(z - α)·Σ ᾱ^k z^k`.
    pub fn to_series(&self, degree: usize) -> TruncatedSeries {
        let mut acc = TruncatedSeries::constant(self.gamma(), degree);
        for zero in &self.zeros {
            let f = factor_series(zero.alpha, degree);
            for _ in 0..zero.multiplicity {
                acc = acc.mul_trunc(&f, degree);
            }
        }
        acc
    }

    /// H² norm of the coefficients past `degree`. An inner function has unit
    /// norm, so this is `√(1 - Σ_{k≤N} |c_k|²)`.
    pub fn tail_norm(&self, degree: usize) -> f64 {
        (1.0 - self.to_series(degree).h2_norm_sqr()).max(0.0).sqrt()
    }

    /// A priori coefficient bound `C·ρ^k` with `ρ = max|α_i|`, evaluated at
    /// `k = degree + 1`, with `C` covering the polynomial growth from
    /// repeated zeros.
    pub fn coefficient_bound(&self, degree: usize) -> f64 {
        let rho = self.max_zero_modulus();
        let d = self.degree();
        if d == 0 {
            return 0.0;
        }
        let k = degree + 1;
        // |c_k| ≤ C(k, d-1)·ρ^{k-d+1} for a degree-d product with zeros in |z| ≤ ρ
        let mut binom = 1.0f64;
        for j in 0..d.saturating_sub(1) {
            binom *= (k - j) as f64 / (j + 1) as f64;
        }
        binom * rho.powi((k + 1).saturating_sub(d) as i32)
    }

    /// Multiplicity of `w` as a zero (0 when `w` is not a zero).
    pub fn multiplicity_at(&self, w: Complex64) -> Result<u32> {
        check_disk(w)?;
        Ok(self
            .zeros
            .iter()
            .find(|z| (z.alpha - w).norm() <= ZERO_MATCH_TOL)
            .map_or(0, |z| z.multiplicity))
    }

    /// Taylor coefficients of `θ∘φ` through `degree`, given `φ` as a series,
    /// built from `b_α∘φ = (φ - α)·(1 - ᾱφ)^{-1}`.
    pub fn compose_series(&self, phi: &TruncatedSeries, degree: usize) -> Result<TruncatedSeries> {
        let phi = phi.resized(degree);
        let mut acc = TruncatedSeries::constant(self.gamma(), degree);
        for zero in &self.zeros {
            let num = phi.sub(&TruncatedSeries::constant(zero.alpha, 0));
            let den = TruncatedSeries::one(0).sub(&phi.scale(zero.alpha.conj()));
            let f = num.mul_trunc(&den.reciprocal_to(degree)?, degree);
            for _ in 0..zero.multiplicity {
                acc = acc.mul_trunc(&f, degree);
            }
        }
        Ok(acc)
    }

    /// Divides a series by `θ`: multiplies by `Π(1 - ᾱz)^n`, then deflates
    /// `(z - α)` once per zero. Returns the quotient (degree drops by
    /// `deg θ`) and the ℓ² norm of the deflation remainders; a nonzero
    /// remainder means `θ` does not divide `f`.
    pub fn divide_series(&self, f: &TruncatedSeries) -> (TruncatedSeries, f64) {
        let n = f.degree();
        let mut q = f.scale(self.gamma().conj());
        let mut rem_sqr = 0.0;
        for zero in &self.zeros {
            let lin = TruncatedSeries::new(vec![ONE, -zero.alpha.conj()]).expect("finite");
            for _ in 0..zero.multiplicity {
                q = q.mul_trunc(&lin, q.degree());
                let (quot, r) = q.deflate(zero.alpha);
                rem_sqr += r.norm_sqr();
                q = quot;
            }
        }
        debug_assert_eq!(q.degree() + self.degree().min(n), n);
        (q, rem_sqr.sqrt())
    }
}

/// Coefficients of `b_α`: `-α, (1 - |α|²), (1 - |α|²)ᾱ, (1 - |α|²)ᾱ², …`.
fn factor_series(alpha: Complex64, degree: usize) -> TruncatedSeries {
    let mut coeffs = Vec::with_capacity(degree + 1);
    coeffs.push(-alpha);
    let w = 1.0 - alpha.norm_sqr();
    let mut p = Complex64::new(w, 0.0);
    for _ in 1..=degree {
        coeffs.push(p);
        p *= alpha.conj();
    }
    TruncatedSeries::new(coeffs).expect("finite coefficients")
}

/// Vanishing order of `B∘φ` at `w`: `Σ n_i · ord_w(φ - α_i)`.
///
/// For LFT symbols the order is exactly 1 when `φ(w) = α_i` (LFTs are
/// locally injective). Polynomial/series symbols count vanishing Taylor
/// coefficients about `w` with threshold `1e-10`. Blaschke symbols are
/// recentered by a disk automorphism and counted the same way.
pub fn composition_zero_multiplicity(b: &BlaschkeProduct, phi: &Symbol, w: Complex64) -> Result<u32> {
    check_disk(w)?;
    if phi.is_constant() {
        return Err(Error::ConstantSymbol);
    }
    if let Symbol::Lft(m) = phi {
        let v = m.eval(w).ok_or_else(|| Error::Pole(fmt_complex(w)))?;
        return Ok(b
            .zeros
            .iter()
            .filter(|z| (v - z.alpha).norm() <= ORDER_TOL)
            .map(|z| z.multiplicity)
            .sum());
    }
    let local = phi.local_series(w, (4 * b.degree()).max(32))?;
    let mut total = 0;
    for z in &b.zeros {
        if (local.coeff(0) - z.alpha).norm() > ORDER_TOL {
            continue;
        }
        let order = (1..=local.degree())
            .find(|&j| local.coeff(j).norm() > ORDER_TOL)
            .ok_or(Error::ConstantSymbol)?;
        total += z.multiplicity * order as u32;
    }
    Ok(total)
}

/// Whether `θH²` is invariant under `C_φ`, through the multiplicity
/// comparison `mult_w θ ≤ mult_w (θ∘φ)` at every zero `w` of `θ`.
///
/// A positive verdict also records the boundary sup of the quotient
/// `(θ∘φ)/θ`, which should not exceed 1 (up to truncation).
pub fn beurling_invariance(theta: &BlaschkeProduct, phi: &Symbol, cfg: &CheckConfig) -> Result<InvarianceReport> {
    if phi.is_constant() {
        return Err(Error::ConstantSymbol);
    }
    phi.check_self_map(cfg.samples)?;
    let mut checks = Vec::with_capacity(theta.zeros.len());
    let mut invariant = true;
    for z in &theta.zeros {
        let composed = composition_zero_multiplicity(theta, phi, z.alpha)?;
        invariant &= z.multiplicity <= composed;
        checks.push(MultiplicityCheck {
            zero: fmt_complex(z.alpha),
            multiplicity: z.multiplicity,
            composed,
        });
    }
    let mut notes = Vec::new();
    let quotient_sup = if invariant {
        let n = cfg.base_degree(theta.degree());
        let (q, rem) = quotient_series(theta, phi, n)?;
        let sup = q.boundary_sup_estimate(cfg.samples, default_radius(n));
        if sup > 1.0 + 1e-6 {
            notes.push(format!("quotient boundary sup {sup} exceeds 1 (truncation at N = {n})"));
        }
        if rem > 1e-8 {
            notes.push(format!("quotient deflation remainder {rem:e}"));
        }
        Some(sup)
    } else {
        None
    };
    Ok(InvarianceReport {
        theta: theta.to_string(),
        phi: phi.to_string(),
        n_levels: vec![],
        residuals: vec![],
        verdict: Verdict::from_bool(invariant),
        criterion: Criterion::Multiplicity,
        direction_residuals: vec![],
        multiplicities: checks,
        quotient_sup,
        notes,
    })
}

/// `(θ∘φ)/θ` through `degree` (computed at twice the degree, then cut) and
/// the deflation remainder norm.
pub fn quotient_series(theta: &BlaschkeProduct, phi: &Symbol, degree: usize) -> Result<(TruncatedSeries, f64)> {
    let work = 2 * degree + theta.degree();
    let composed = theta.compose_series(&phi.to_series(work)?, work)?;
    let (q, rem) = theta.divide_series(&composed);
    Ok((q.resized(degree), rem))
}

impl fmt::Display for BlaschkeProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .zeros
            .iter()
            .map(|z| format!("({},{},{})", z.alpha.re, z.alpha.im, z.multiplicity))
            .collect();
        write!(f, "zeros:[{}]", parts.join(","))?;
        if self.gamma_arg != 0.0 {
            write!(f, ";arg:{}", self.gamma_arg)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::MoebiusMap;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn factor_examples() {
        let b0 = BlaschkeProduct::factor(r(0.0)).unwrap();
        let z = Complex64::new(0.3, -0.2);
        assert!((b0.eval(z).unwrap() - z).norm() < 1e-16);
        let b = BlaschkeProduct::factor(r(0.5)).unwrap();
        assert_eq!(b.eval(r(0.5)).unwrap(), r(0.0));
        let v = b.eval(r(1.0)).unwrap();
        assert!((v - r(1.0)).norm() < 1e-15);
        assert!(matches!(BlaschkeProduct::factor(r(1.0)), Err(Error::NotInDisk(_))));
    }

    #[test]
    fn evaluate_examples() {
        let zb = BlaschkeProduct::from_zeros(&[(r(0.0), 1), (r(0.5), 1)]).unwrap();
        assert_eq!(zb.eval(r(0.0)).unwrap(), r(0.0));
        let z2 = BlaschkeProduct::z_power(2);
        assert!((z2.eval(r(0.3)).unwrap() - r(0.09)).norm() < 1e-16);
        let b = BlaschkeProduct::factor(r(0.5)).unwrap();
        assert!((b.eval(Complex64::i()).unwrap().norm() - 1.0).abs() < 1e-12);
        assert!(matches!(b.eval(r(2.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn to_series_examples() {
        let z = BlaschkeProduct::z_power(1).to_series(4);
        assert_eq!(z.coeffs(), &[r(0.0), r(1.0), r(0.0), r(0.0), r(0.0)]);

        // convolution oracle: (z - 0.5)·Σ 0.5^k z^k
        let b = BlaschkeProduct::factor(r(0.5)).unwrap().to_series(10);
        let oracle = TruncatedSeries::from_real(&[-0.5, 1.0])
            .unwrap()
            .mul_trunc(&TruncatedSeries::geometric(r(0.5), 10), 10);
        for k in 0..=10 {
            assert!((b.coeff(k) - oracle.coeff(k)).norm() < 1e-16);
        }
        assert!((b.coeff(1) - r(0.75)).norm() < 1e-16 && (b.coeff(3) - r(0.1875)).norm() < 1e-16);

        let zb = BlaschkeProduct::from_zeros(&[(r(0.0), 1), (r(0.5), 1)]).unwrap().to_series(11);
        assert_eq!(zb.coeff(0), r(0.0));
        for k in 0..=10 {
            assert!((zb.coeff(k + 1) - b.coeff(k)).norm() < 1e-16);
        }
    }

    #[test]
    fn merging_and_sorting() {
        let b = BlaschkeProduct::from_zeros(&[(r(0.5), 1), (r(0.0), 1), (r(0.5 + 1e-12), 2)]).unwrap();
        assert_eq!(b.zeros().len(), 2);
        assert_eq!(b.zeros()[0].alpha, r(0.0));
        assert_eq!(b.zeros()[1].multiplicity, 3);
        assert_eq!(b.degree(), 4);
    }

    #[test]
    fn multiplicity_examples() {
        assert_eq!(BlaschkeProduct::z_power(2).multiplicity_at(r(0.0)).unwrap(), 2);
        let zb = BlaschkeProduct::from_zeros(&[(r(0.0), 1), (r(0.5), 1)]).unwrap();
        assert_eq!(zb.multiplicity_at(r(0.5)).unwrap(), 1);
        assert_eq!(BlaschkeProduct::factor(r(0.5)).unwrap().multiplicity_at(r(0.0)).unwrap(), 0);
        assert!(zb.multiplicity_at(r(1.5)).is_err());
    }

    #[test]
    fn composition_multiplicity_examples() {
        let z2 = BlaschkeProduct::z_power(2);
        let sq = Symbol::polynomial(&[r(0.0), r(0.0), r(1.0)]).unwrap();
        assert_eq!(composition_zero_multiplicity(&z2, &sq, r(0.0)).unwrap(), 4);

        let b = BlaschkeProduct::factor(r(0.5)).unwrap();
        let sigma = Symbol::Lft(MoebiusMap::from_real(2.0, 1.0, 0.0, 4.0).unwrap());
        assert_eq!(composition_zero_multiplicity(&b, &sigma, r(0.5)).unwrap(), 1);

        let z = BlaschkeProduct::z_power(1);
        let aff = Symbol::polynomial(&[r(0.3), r(0.5)]).unwrap();
        assert_eq!(composition_zero_multiplicity(&z, &aff, r(0.0)).unwrap(), 0);

        assert_eq!(
            composition_zero_multiplicity(&z, &Symbol::Constant(r(0.2)), r(0.0)),
            Err(Error::ConstantSymbol)
        );
    }

    #[test]
    fn blaschke_symbol_multiplicity() {
        // φ = b_{0.3}^2 vanishes to order 2 at 0.3; B = z picks that up
        let phi = Symbol::Blaschke(BlaschkeProduct::factor_power(r(0.3), 2).unwrap());
        let z = BlaschkeProduct::z_power(1);
        assert_eq!(composition_zero_multiplicity(&z, &phi, r(0.3)).unwrap(), 2);
        assert_eq!(composition_zero_multiplicity(&z, &phi, r(0.0)).unwrap(), 0);
    }

    #[test]
    fn beurling_examples() {
        let cfg = CheckConfig::default();
        let z = BlaschkeProduct::z_power(1);
        let zpsi = Symbol::polynomial(&[r(0.0), r(1.0 / 3.0), r(1.0 / 3.0)]).unwrap();
        let rep = beurling_invariance(&z, &zpsi, &cfg).unwrap();
        assert!(rep.is_invariant());
        assert!((rep.quotient_sup.unwrap() - 2.0 / 3.0).abs() < 1e-2);

        let z2 = BlaschkeProduct::z_power(2);
        let half = Symbol::polynomial(&[r(0.0), r(0.5)]).unwrap();
        let rep = beurling_invariance(&z2, &half, &cfg).unwrap();
        assert!(rep.is_invariant());
        assert!((rep.quotient_sup.unwrap() - 0.25).abs() < 1e-12);

        let b = BlaschkeProduct::factor(r(0.5)).unwrap();
        let rep = beurling_invariance(&b, &half, &cfg).unwrap();
        assert_eq!(rep.verdict, Verdict::NotInvariant);
        assert_eq!(rep.multiplicities[0].composed, 0);
    }

    #[test]
    fn identity_symbol_keeps_every_beurling_space() {
        let cfg = CheckConfig::default();
        let theta = BlaschkeProduct::from_zeros(&[(r(0.0), 2), (Complex64::new(0.3, 0.4), 1), (r(-0.6), 3)]).unwrap();
        let rep = beurling_invariance(&theta, &Symbol::identity(), &cfg).unwrap();
        assert!(rep.is_invariant());
        assert!((rep.quotient_sup.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn automorphism_witness_breaks_invariance() {
        let cfg = CheckConfig::default();
        let alpha = Complex64::new(0.2, -0.3);
        let beta = r(0.6);
        let phi = MoebiusMap::blaschke_involution(beta)
            .unwrap()
            .compose(&MoebiusMap::blaschke_involution(alpha).unwrap())
            .unwrap();
        assert!((phi.eval(alpha).unwrap() - beta).norm() < 1e-14);
        let theta = BlaschkeProduct::from_zeros(&[(alpha, 1), (r(-0.1), 2)]).unwrap();
        let rep = beurling_invariance(&theta, &Symbol::Lft(phi), &cfg).unwrap();
        assert_eq!(rep.verdict, Verdict::NotInvariant);
    }

    #[test]
    fn divide_series_roundtrip() {
        let theta = BlaschkeProduct::from_zeros(&[(r(0.0), 1), (Complex64::new(0.3, 0.2), 2)]).unwrap();
        let f = TruncatedSeries::from_real(&[1.0, -0.5, 0.25]).unwrap();
        let prod = theta.to_series(200).mul_trunc(&f, 200);
        let (q, rem) = theta.divide_series(&prod);
        assert!(rem < 1e-12);
        for k in 0..=100 {
            assert!((q.coeff(k) - f.coeff(k)).norm() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn divide_by_z_removes_origin_zero() {
        let zb = BlaschkeProduct::from_zeros(&[(r(0.0), 1), (r(0.5), 1)]).unwrap();
        assert_eq!(zb.divide_by_z().unwrap(), BlaschkeProduct::factor(r(0.5)).unwrap());
        assert!(matches!(
            BlaschkeProduct::factor(r(0.5)).unwrap().divide_by_z(),
            Err(Error::NonvanishingAtZero(_))
        ));
    }

    #[test]
    fn display_format() {
        let zb = BlaschkeProduct::new(0.25, &[(r(0.0), 1), (Complex64::new(0.5, -0.1), 2)]).unwrap();
        assert_eq!(zb.to_string(), "zeros:[(0,0,1),(0.5,-0.1,2)];arg:0.25");
    }
}
