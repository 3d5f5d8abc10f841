//! Finite sections of composition, multiplication and shift operators in the
//! monomial basis `1, z, …, z^N`, plus the two adjoint formulas for LFT symbols.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::blaschke::BlaschkeProduct;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::moebius::MoebiusMap;
use crate::series::{default_radius, TruncatedSeries, EPS_ZERO};
use crate::symbol::{Symbol, SUP_SLACK};

/// Working degree is this multiple of the compared block in identity checks.
pub const WORKING_FACTOR: usize = 4;
/// Working degree multiple for the `X` diagnostic.
pub const XF_WORKING_FACTOR: usize = 2;
/// Deflation remainder (relative) above which `θ` is taken not to divide.
pub const DIVISIBILITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionRole {
    Composition,
    Multiplication,
    BackwardShift,
    Adjoint,
    Derived,
}

/// `(N+1)×(N+1)` compression to the first `N+1` monomials.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSection {
    pub entries: ComplexMatrix,
    pub role: SectionRole,
}

impl OperatorSection {
    pub fn degree(&self) -> usize {
        self.entries.rows() - 1
    }

    pub fn apply(&self, f: &TruncatedSeries) -> TruncatedSeries {
        let v = f.resized(self.degree()).into_coeffs();
        TruncatedSeries::from_vec_unchecked(self.entries.matvec(&v))
    }

    pub fn norm(&self) -> f64 {
        self.entries.operator_norm()
    }

    /// Rows as `[[re, im], …]` pairs, for JSON export.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.entries.rows())
            .map(|i| self.entries.row(i).iter().map(|z| [z.re, z.im]).collect())
            .collect()
    }
}

/// `C_φ` section: column `j` holds the coefficients of `φ^j` through `N`.
pub fn composition_section(phi: &TruncatedSeries, n: usize) -> Result<OperatorSection> {
    let sup = phi.boundary_sup_estimate(512, default_radius(phi.degree().max(n).max(1)));
    if phi.coeff(0).norm() >= 1.0 || sup > 1.0 + SUP_SLACK {
        return Err(Error::NotSelfMap(format!("series symbol with |φ(0)| = {}, boundary sup {sup}", phi.coeff(0).norm())));
    }
    let phi = phi.resized(n);
    let mut cols = Vec::with_capacity(n + 1);
    let mut p = TruncatedSeries::one(n);
    for _ in 0..=n {
        let next = p.mul_trunc(&phi, n);
        cols.push(p.into_coeffs());
        p = next;
    }
    Ok(OperatorSection { entries: ComplexMatrix::from_columns(&cols), role: SectionRole::Composition })
}

/// `M_h` section: lower-triangular Toeplitz with `(i, j) = h_{i-j}`.
pub fn multiplication_section(h: &TruncatedSeries, n: usize) -> OperatorSection {
    let mut m = ComplexMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        for j in 0..=i {
            m[(i, j)] = h.coeff(i - j);
        }
    }
    OperatorSection { entries: m, role: SectionRole::Multiplication }
}

/// `M_z*` section: ones on the superdiagonal.
pub fn backward_shift_section(n: usize) -> OperatorSection {
    let mut m = ComplexMatrix::zeros(n + 1, n + 1);
    for i in 0..n {
        m[(i, i + 1)] = Complex64::new(1.0, 0.0);
    }
    OperatorSection { entries: m, role: SectionRole::BackwardShift }
}

/// `M_z` section: ones on the subdiagonal.
pub fn down_shift_section(n: usize) -> OperatorSection {
    let mut s = multiplication_section(&TruncatedSeries::monomial(1, n), n);
    s.role = SectionRole::Multiplication;
    s
}

/// Conjugate transpose. Compression commutes with taking adjoints, so this
/// is exactly the section of `T*`.
pub fn adjoint_section(a: &OperatorSection) -> OperatorSection {
    OperatorSection { entries: a.entries.adjoint(), role: SectionRole::Adjoint }
}

/// Both sides of `C_φ* = M_g C_σ M_h*`, as `(lhs, rhs)` sections of size `N`,
/// each cut from sections built at `4N`.
pub fn cowen_sections(phi: &MoebiusMap, n: usize) -> Result<(OperatorSection, OperatorSection)> {
    let phi = phi.normalize()?;
    let test = phi.self_map_test();
    if !test.is_self_map {
        return Err(Error::NotSelfMap(format!("{phi} has slack {:e}", test.slack)));
    }
    let w = WORKING_FACTOR * n;
    let lhs = adjoint_section(&composition_section(&phi.to_series(w)?, w)?);
    let sigma = phi.cowen_sigma()?;
    let (g, h) = phi.cowen_g_h(w)?;
    let mg = multiplication_section(&g, w);
    let cs = composition_section(&sigma.to_series(w)?, w)?;
    let mh_adj = adjoint_section(&multiplication_section(&h, w));
    let rhs = mg.entries.matmul(&cs.entries).matmul(&mh_adj.entries);
    Ok((
        OperatorSection { entries: lhs.entries.block(n + 1, n + 1), role: SectionRole::Adjoint },
        OperatorSection { entries: rhs.block(n + 1, n + 1), role: SectionRole::Derived },
    ))
}

/// Operator-norm distance between the two sides of the Cowen factorization
/// on the first `N+1` monomials.
pub fn cowen_adjoint_check(phi: &MoebiusMap, n: usize) -> Result<f64> {
    let (lhs, rhs) = cowen_sections(phi, n)?;
    Ok(lhs.entries.sub(&rhs.entries).operator_norm())
}

/// `C_φ* f = zσ′·f(σ)/σ` for `f(0) = 0`, evaluated as `zσ′·((f/z)∘σ)` so no
/// reciprocal of `σ` is needed.
pub fn shapiro_adjoint_apply(f: &TruncatedSeries, sigma: &MoebiusMap, n: usize) -> Result<TruncatedSeries> {
    if f.coeff(0).norm() > EPS_ZERO {
        return Err(Error::NonvanishingAtZero(f.coeff(0).norm()));
    }
    let q = f.resized(n.max(f.degree())).divide_by_z()?;
    let s = sigma.to_series(n)?;
    let composed = q.compose_to(&s, n)?;
    let ds = sigma.to_series(n + 1)?.derivative();
    Ok(composed.mul_trunc(&ds, n).shift_up(1).resized(n))
}

/// Shapiro application for the symbol `φ` (σ taken from Cowen's formula).
pub fn shapiro_for_symbol(f: &TruncatedSeries, phi: &MoebiusMap, n: usize) -> Result<TruncatedSeries> {
    let sigma = phi.normalize()?.cowen_sigma()?;
    shapiro_adjoint_apply(f, &sigma, n)
}

/// One degree of the `X = (1/θ) C_φ* M_θ` diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XfSection {
    pub n: usize,
    /// Operator norm of the section, present only when `θ` divided every column.
    pub norm: Option<f64>,
    /// ℓ² size of the division remainders, relative to the dividend size.
    pub principal_part_energy: f64,
}

/// Sections of `X = (1/θ) C_φ* M_θ` at the requested degrees, built column by
/// column as `C_φ*(θ z^j) / θ`. A bounded trend is evidence that `Q_θ` is
/// invariant; growth or a nonzero remainder is evidence against.
pub fn lemma_xf_sections(theta: &BlaschkeProduct, phi: &Symbol, degrees: &[usize]) -> Result<Vec<XfSection>> {
    if theta.degree() == 0 {
        return Err(Error::InvalidArgument("the inner function must be nonconstant".into()));
    }
    if phi.is_constant() {
        return Err(Error::ConstantSymbol);
    }
    phi.check_self_map(512)?;
    degrees.par_iter().map(|&n| xf_section(theta, phi, n)).collect()
}

fn xf_section(theta: &BlaschkeProduct, phi: &Symbol, n: usize) -> Result<XfSection> {
    let w = XF_WORKING_FACTOR * n + theta.degree();
    let adj = adjoint_section(&composition_section(&phi.to_series(w)?, w)?);
    let t = theta.to_series(w);
    let mut cols = Vec::with_capacity(n + 1);
    let mut rem_sqr = 0.0;
    for j in 0..=n {
        let num = adj.apply(&t.shift_up(j).resized(w));
        let scale = num.h2_norm().max(1e-300);
        let (q, rem) = theta.divide_series(&num);
        rem_sqr += (rem / scale).powi(2);
        cols.push(q.resized(n).into_coeffs());
    }
    let energy = rem_sqr.sqrt();
    let norm = (energy <= DIVISIBILITY_TOL).then(|| ComplexMatrix::from_columns(&cols).operator_norm());
    Ok(XfSection { n, norm, principal_part_energy: energy })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn s(v: &[f64]) -> TruncatedSeries {
        TruncatedSeries::from_real(v).unwrap()
    }

    #[test]
    fn composition_section_examples() {
        let id = composition_section(&s(&[0.0, 1.0]), 6).unwrap();
        assert_eq!(id.entries, ComplexMatrix::identity(7));

        let sq = composition_section(&s(&[0.0, 0.0, 1.0]), 4).unwrap();
        for j in 0..=4 {
            let col = sq.entries.column(j);
            for (i, v) in col.iter().enumerate() {
                let expected = if i == 2 * j { 1.0 } else { 0.0 };
                assert_eq!(*v, c(expected), "({i},{j})");
            }
        }

        // (a + bz)^j by binomial theorem
        let (a, b) = (0.3, 0.5);
        let aff = composition_section(&s(&[a, b]), 8).unwrap();
        let mut binom = [[0.0f64; 9]; 9];
        for j in 0..9 {
            binom[j][0] = 1.0;
            for k in 1..=j {
                binom[j][k] = binom[j - 1][k - 1] + if k < j { binom[j - 1][k] } else { 0.0 };
            }
        }
        for j in 0..9 {
            for k in 0..=j {
                let want = binom[j][k] * a.powi((j - k) as i32) * b.powi(k as i32);
                assert!((aff.entries[(k, j)] - c(want)).norm() < 1e-15);
            }
        }

        assert!(matches!(composition_section(&s(&[0.0, 2.0]), 4), Err(Error::NotSelfMap(_))));
    }

    #[test]
    fn composition_section_matches_compose() {
        let phi = MoebiusMap::from_real(1.0, 0.0, -1.0, 2.0).unwrap().to_series(40).unwrap();
        let f = TruncatedSeries::new(vec![c(1.0), Complex64::new(0.5, -0.2), c(-0.3), c(0.1)]).unwrap();
        let sec = composition_section(&phi, 40).unwrap();
        let direct = f.compose_to(&phi, 40).unwrap();
        let via = sec.apply(&f);
        for k in 0..=40 {
            assert!((direct.coeff(k) - via.coeff(k)).norm() < 1e-12);
        }
    }

    #[test]
    fn multiplication_and_shift_examples() {
        assert_eq!(multiplication_section(&TruncatedSeries::one(0), 5).entries, ComplexMatrix::identity(6));
        let d = down_shift_section(4);
        assert_eq!(d.entries, adjoint_section(&backward_shift_section(4)).entries);
        let m = multiplication_section(&s(&[1.0, -0.5]), 3);
        assert_eq!(m.entries[(1, 0)], c(-0.5));
        assert_eq!(m.entries[(2, 2)], c(1.0));
        assert_eq!(m.entries[(2, 0)], c(0.0));
        assert_eq!(m.entries[(0, 1)], c(0.0));
    }

    #[test]
    fn adjoint_examples() {
        let m = multiplication_section(&s(&[1.0, -0.5, 0.25]), 5);
        assert_eq!(adjoint_section(&adjoint_section(&m)).entries, m.entries);
        let half = adjoint_section(&composition_section(&s(&[0.0, 0.5]), 6).unwrap());
        for i in 0..=6 {
            for j in 0..=6 {
                let want = if i == j { 0.5f64.powi(i as i32) } else { 0.0 };
                assert!((half.entries[(i, j)] - c(want)).norm() < 1e-16);
            }
        }
    }

    #[test]
    fn cowen_examples() {
        let half = MoebiusMap::from_real(1.0, 0.0, 0.0, 2.0).unwrap();
        assert!(cowen_adjoint_check(&half, 32).unwrap() <= 1e-12);
        let p = MoebiusMap::from_real(1.0, 0.0, -1.0, 2.0).unwrap();
        assert!(cowen_adjoint_check(&p, 64).unwrap() <= 1e-8);
        assert_eq!(cowen_adjoint_check(&MoebiusMap::identity(), 16).unwrap(), 0.0);
        let big = MoebiusMap::from_real(2.0, 0.0, 0.0, 1.0).unwrap();
        assert!(matches!(cowen_adjoint_check(&big, 8), Err(Error::NotSelfMap(_))));
    }

    #[test]
    fn shapiro_examples() {
        let n = 24;
        let half = MoebiusMap::from_real(1.0, 0.0, 0.0, 2.0).unwrap();
        let out = shapiro_adjoint_apply(&s(&[0.0, 1.0]), &half, n).unwrap();
        assert!((out.coeff(1) - c(0.5)).norm() < 1e-15 && out.h2_norm() - 0.5 < 1e-15);

        let sigma = MoebiusMap::from_real(1.0, 1.0, 0.0, 2.0).unwrap();
        // f = z: result is zσ′ = z/2
        let out = shapiro_adjoint_apply(&s(&[0.0, 1.0]), &sigma, n).unwrap();
        assert!((out.coeff(1) - c(0.5)).norm() < 1e-15 && (out.h2_norm() - 0.5).abs() < 1e-15);
        // f = z²: z·(1/2)·σ = z(z+1)/4
        let out = shapiro_adjoint_apply(&s(&[0.0, 0.0, 1.0]), &sigma, n).unwrap();
        assert!((out.coeff(1) - c(0.25)).norm() < 1e-15 && (out.coeff(2) - c(0.25)).norm() < 1e-15);
        // cross-check against the adjoint section of C_{z/(2-z)}
        let phi = MoebiusMap::from_real(1.0, 0.0, -1.0, 2.0).unwrap();
        let adj = adjoint_section(&composition_section(&phi.to_series(n).unwrap(), n).unwrap());
        let via = adj.apply(&s(&[0.0, 0.0, 1.0]));
        for k in 0..=n {
            assert!((via.coeff(k) - out.coeff(k)).norm() < 1e-12);
        }
        assert!(matches!(shapiro_adjoint_apply(&s(&[1.0, 1.0]), &sigma, n), Err(Error::NonvanishingAtZero(_))));
    }

    #[test]
    fn xf_diagonal_case() {
        // θ = z, φ = z/2: X e_j = C*(z^{j+1})/z = 2^{-(j+1)} z^j
        let theta = BlaschkeProduct::z_power(1);
        let phi = Symbol::polynomial(&[c(0.0), c(0.5)]).unwrap();
        let out = lemma_xf_sections(&theta, &phi, &[8, 16]).unwrap();
        for sec in out {
            assert!(sec.principal_part_energy < 1e-14);
            assert!((sec.norm.unwrap() - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn xf_nondivisible_case() {
        let theta = BlaschkeProduct::z_power(3);
        let phi = Symbol::polynomial(&[c(0.0), c(0.0), c(1.0)]).unwrap();
        let out = lemma_xf_sections(&theta, &phi, &[16]).unwrap();
        assert!(out[0].norm.is_none());
        assert!(out[0].principal_part_energy > 0.1);
    }

    #[test]
    fn xf_example_family_member_bounded() {
        let theta = BlaschkeProduct::from_zeros(&[(c(0.0), 1), (c(0.5), 1)]).unwrap();
        let phi = Symbol::Lft(MoebiusMap::from_real(2.0, 0.0, -1.0, 4.0).unwrap());
        let out = lemma_xf_sections(&theta, &phi, &[16, 32, 64]).unwrap();
        let norms: Vec<f64> = out.iter().map(|s| s.norm.expect("divisible")).collect();
        assert!(norms.iter().all(|&x| x < 2.0), "{norms:?}");
        assert!((norms[2] - norms[1]).abs() < 1e-3);
    }
}
