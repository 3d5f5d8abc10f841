//! Truncated Taylor series with complex coefficients.
//!
//! A [`TruncatedSeries`] of degree `N` stores `c_0..=c_N` and stands in for an
//! element of H² (or of the Schur class) known through degree `N`. All
//! operations are pure and return new values.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Magnitude below which a coefficient is treated as zero.
pub const EPS_ZERO: f64 = 1e-12;

/// Largest degree a product is allowed to grow to.
pub const MAX_DEGREE: usize = 4096;

/// Smallest accepted sample count for boundary estimates.
pub const MIN_BOUNDARY_SAMPLES: usize = 64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<Complex64>,
}

impl TruncatedSeries {
    /// Builds a series from `c_0..=c_N`. Fails on an empty vector or on
    /// non-finite entries.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("series needs at least one coefficient".into()));
        }
        if let Some(k) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument(format!("coefficient {k} is not finite")));
        }
        Ok(Self { coeffs })
    }

    pub(crate) fn from_vec_unchecked(coeffs: Vec<Complex64>) -> Self {
        debug_assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero(degree: usize) -> Self {
        Self { coeffs: vec![ZERO; degree + 1] }
    }

    pub fn constant(c: Complex64, degree: usize) -> Self {
        let mut s = Self::zero(degree);
        s.coeffs[0] = c;
        s
    }

    pub fn one(degree: usize) -> Self {
        Self::constant(ONE, degree)
    }

    /// `z^k` at the given degree (zero if `k > degree`).
    pub fn monomial(k: usize, degree: usize) -> Self {
        let mut s = Self::zero(degree);
        if k <= degree {
            s.coeffs[k] = ONE;
        }
        s
    }

    /// Geometric series `Σ r^k z^k`, i.e. `1/(1 - r z)`.
    pub fn geometric(ratio: Complex64, degree: usize) -> Self {
        let mut coeffs = Vec::with_capacity(degree + 1);
        let mut p = ONE;
        for _ in 0..=degree {
            coeffs.push(p);
            p *= ratio;
        }
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient `k`, zero past the truncation degree.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    /// Pads with zeros or truncates to exactly `degree`.
    pub fn resized(&self, degree: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(degree + 1, ZERO);
        Self { coeffs }
    }

    pub fn h2_norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn h2_norm(&self) -> f64 {
        self.h2_norm_sqr().sqrt()
    }

    /// Largest `k` with `|c_k| > tol`, or `None` when every coefficient is below `tol`.
    pub fn effective_degree(&self, tol: f64) -> Option<usize> {
        self.coeffs.iter().rposition(|c| c.norm() > tol)
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Coefficient-wise sum; the shorter operand is zero-padded.
    pub fn add(&self, other: &Self) -> Self {
        let n = self.degree().max(other.degree());
        Self { coeffs: (0..=n).map(|k| self.coeff(k) + other.coeff(k)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.degree().max(other.degree());
        Self { coeffs: (0..=n).map(|k| self.coeff(k) - other.coeff(k)).collect() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&c| c * s).collect() }
    }

    /// Cauchy product at degree `min(N_f + N_g, MAX_DEGREE)`.
    pub fn mul(&self, other: &Self) -> Self {
        self.mul_trunc(other, (self.degree() + other.degree()).min(MAX_DEGREE))
    }

    /// Cauchy product truncated at `degree`.
    pub fn mul_trunc(&self, other: &Self, degree: usize) -> Self {
        let mut out = vec![ZERO; degree + 1];
        let (a, b) = (&self.coeffs, &other.coeffs);
        for (i, &ai) in a.iter().enumerate().take(degree + 1) {
            if ai == ZERO {
                continue;
            }
            let jmax = (degree - i).min(b.len() - 1);
            for (o, &bj) in out[i..=i + jmax].iter_mut().zip(&b[..=jmax]) {
                *o += ai * bj;
            }
        }
        Self { coeffs: out }
    }

    /// `self^k` truncated at `degree`.
    pub fn pow_trunc(&self, k: usize, degree: usize) -> Self {
        let mut acc = Self::one(degree);
        let mut base = self.resized(degree);
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_trunc(&base, degree);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_trunc(&base, degree);
            }
        }
        acc
    }

    /// `f ∘ g` through degree `max(N_f, N_g)`.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        self.compose_to(g, self.degree().max(g.degree()))
    }

    /// `f ∘ g` through `degree`, by Horner accumulation of truncated
    /// products. Requires `|g(0)| < 1`.
    pub fn compose_to(&self, g: &Self, degree: usize) -> Result<Self> {
        let g0 = g.coeff(0).norm();
        if g0 >= 1.0 {
            return Err(Error::CompositionDomain(g0));
        }
        let g = g.resized(degree);
        let mut acc = Self::constant(*self.coeffs.last().unwrap(), degree);
        for &c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul_trunc(&g, degree);
            acc.coeffs[0] += c;
        }
        Ok(acc)
    }

    /// Multiplicative inverse by power-series long division, at the same degree.
    pub fn reciprocal(&self) -> Result<Self> {
        self.reciprocal_to(self.degree())
    }

    pub fn reciprocal_to(&self, degree: usize) -> Result<Self> {
        let c0 = self.coeffs[0];
        if c0.norm() <= EPS_ZERO {
            return Err(Error::ZeroConstantTerm(c0.norm()));
        }
        let inv0 = c0.inv();
        let mut g = Vec::with_capacity(degree + 1);
        g.push(inv0);
        for k in 1..=degree {
            let jmax = k.min(self.degree());
            let s: Complex64 = (1..=jmax).map(|j| self.coeffs[j] * g[k - j]).sum();
            g.push(-s * inv0);
        }
        Ok(Self { coeffs: g })
    }

    /// `f / z` for `f(0) = 0`; the degree drops by one.
    pub fn divide_by_z(&self) -> Result<Self> {
        let c0 = self.coeffs[0].norm();
        if c0 > EPS_ZERO {
            return Err(Error::NonvanishingAtZero(c0));
        }
        if self.coeffs.len() == 1 {
            return Ok(Self::zero(0));
        }
        Ok(Self { coeffs: self.coeffs[1..].to_vec() })
    }

    /// `z^k · f`; the degree grows by `k`.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero(0);
        }
        Self {
            coeffs: self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect(),
        }
    }

    /// Synthetic division by `(z - a)`: returns `(q, r)` with `f = (z - a) q + r`
    /// through degree `N`, where `r = f(a)` for the truncated polynomial. The
    /// recursion runs from the top coefficient down, which is stable for `|a| < 1`.
    pub fn deflate(&self, a: Complex64) -> (Self, Complex64) {
        let n = self.degree();
        if n == 0 {
            return (Self::zero(0), self.coeffs[0]);
        }
        let mut q = vec![ZERO; n];
        q[n - 1] = self.coeffs[n];
        for k in (1..n).rev() {
            q[k - 1] = self.coeffs[k] + a * q[k];
        }
        let r = self.coeffs[0] + a * q[0];
        (Self { coeffs: q }, r)
    }

    /// Taylor coefficients about `w` (a Taylor shift of the truncated polynomial).
    pub fn taylor_shift(&self, w: Complex64) -> Self {
        let mut p = self.coeffs.clone();
        let n = p.len() - 1;
        for i in 0..n {
            for k in (i..n).rev() {
                let next = p[k + 1];
                p[k] += w * next;
            }
        }
        Self { coeffs: p }
    }

    /// `max_k |f(r e^{2πik/M})|` with `M = max(samples, 64)`.
    ///
    /// A lower bound for the sup norm over the disk; with `r = 1 - 1/N` (see
    /// [`default_radius`]) it is the working estimate of `‖f‖_∞`.
    pub fn boundary_sup_estimate(&self, samples: usize, radius: f64) -> f64 {
        let m = samples.max(MIN_BOUNDARY_SAMPLES);
        (0..m)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / m as f64;
                self.eval(Complex64::from_polar(radius, t)).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Radius `1 - 1/N` used for boundary estimates of degree-`N` series.
pub fn default_radius(degree: usize) -> f64 {
    if degree == 0 {
        1.0
    } else {
        1.0 - 1.0 / degree as f64
    }
}

/// `⟨f, g⟩ = Σ f_k conj(g_k)` over the common coefficients.
pub fn inner(f: &[Complex64], g: &[Complex64]) -> Complex64 {
    f.iter().zip(g).map(|(a, b)| a * b.conj()).sum()
}
