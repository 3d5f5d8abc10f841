//! Linear fractional transformations `z ↦ (az + b)/(cz + d)`.
//!
//! Coefficients are kept exactly as given until [`MoebiusMap::normalize`] is
//! called; normalization divides by a square root of the determinant and
//! then fixes the sign so that the first nonzero of `(a, b, c, d)` has its
//! argument in `(-π/2, π/2]`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use num_complex::Complex64;

use crate::error::{fmt_complex, Error, Result};
use crate::series::TruncatedSeries;

/// Smallest accepted `|ad - bc|`.
pub const DET_TOL: f64 = 1e-14;
/// Allowed `|ad - bc - 1|` for a normalized map.
pub const NORMALIZED_TOL: f64 = 1e-12;
/// Slack band `[-TANGENTIAL_TOL, 0]` reported as tangential (still accepted).
pub const TANGENTIAL_TOL: f64 = 1e-12;
/// `|c|` below which a normalized map counts as affine.
pub const AFFINE_TOL: f64 = 1e-14;
/// Tolerance for coincident fixed points.
const DOUBLE_ROOT_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

/// Outcome of the self-map inequality `|b d̄ - a c̄| + |ad - bc| ≤ |d|² - |c|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfMapTest {
    pub is_self_map: bool,
    /// `(|d|² - |c|²) - (|b d̄ - a c̄| + |ad - bc|)` on normalized coefficients.
    pub slack: f64,
    pub tangential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LftKind {
    /// Determinant numerically zero: the map collapses to a constant.
    ConstantLike,
    /// `c = 0` after normalization (rotations included).
    Affine,
    /// Maps the disk onto itself.
    DiskAutomorphism,
    ProperLft,
}

/// Finite fixed points with multiplicity, plus the multiplicity at infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoints {
    pub finite: Vec<(Complex64, u32)>,
    pub at_infinity: u32,
}

impl MoebiusMap {
    /// Builds a map, rejecting `|ad - bc| < 1e-14`.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let m = Self { a, b, c, d };
        let det = m.det().norm();
        if det < DET_TOL || !det.is_finite() {
            return Err(Error::DegenerateMap(det));
        }
        Ok(m)
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let r = |x: f64| Complex64::new(x, 0.0);
        Self::new(r(a), r(b), r(c), r(d))
    }

    pub fn identity() -> Self {
        Self { a: ONE, b: ZERO, c: ZERO, d: ONE }
    }

    /// `z ↦ slope·z + intercept`.
    pub fn affine(slope: Complex64, intercept: Complex64) -> Result<Self> {
        Self::new(slope, intercept, ZERO, ONE)
    }

    /// The Blaschke factor `(z - α)/(1 - ᾱz)`.
    pub fn blaschke_factor(alpha: Complex64) -> Result<Self> {
        check_disk(alpha)?;
        Self::new(ONE, -alpha, -alpha.conj(), ONE)
    }

    /// The involutive factor `(α - z)/(1 - ᾱz)`: it swaps `0` and `α`.
    pub fn blaschke_involution(alpha: Complex64) -> Result<Self> {
        check_disk(alpha)?;
        Self::new(-ONE, alpha, -alpha.conj(), ONE)
    }

    /// `((2 - α)z + α)/(-αz + (2 + α))`, a named test symbol.
    pub fn phi_alpha(alpha: Complex64) -> Result<Self> {
        let two = Complex64::new(2.0, 0.0);
        Self::new(two - alpha, alpha, -alpha, two + alpha)
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn is_normalized(&self) -> bool {
        (self.det() - ONE).norm() <= NORMALIZED_TOL
    }

    /// Divides by `√(ad - bc)` and applies the canonical sign. A map that is
    /// already normalized only has its sign fixed, so this is idempotent.
    pub fn normalize(&self) -> Result<Self> {
        let det = self.det();
        if det.norm() < DET_TOL {
            return Err(Error::DegenerateMap(det.norm()));
        }
        let scaled = if (det - ONE).norm() <= NORMALIZED_TOL {
            *self
        } else {
            let k = det.sqrt().inv();
            Self { a: self.a * k, b: self.b * k, c: self.c * k, d: self.d * k }
        };
        Ok(scaled.canonical_sign())
    }

    fn canonical_sign(self) -> Self {
        let first = self
            .coefficients()
            .into_iter()
            .find(|z| z.norm() > DET_TOL)
            .unwrap_or(ONE);
        let arg = first.arg();
        if arg > FRAC_PI_2 || arg <= -FRAC_PI_2 {
            Self { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
        } else {
            self
        }
    }

    /// Pointwise value; `None` at the pole.
    pub fn eval(&self, z: Complex64) -> Option<Complex64> {
        let den = self.c * z + self.d;
        if den.norm() <= DET_TOL * (self.c.norm() + self.d.norm()).max(1.0) {
            None
        } else {
            Some((self.a * z + self.b) / den)
        }
    }

    /// Self-map test on normalized coefficients; slack in `[-1e-12, 0]` is
    /// accepted and flagged tangential.
    pub fn self_map_test(&self) -> SelfMapTest {
        let m = self.normalize().unwrap_or(*self);
        let lhs = (m.b * m.d.conj() - m.a * m.c.conj()).norm() + m.det().norm();
        let rhs = m.d.norm_sqr() - m.c.norm_sqr();
        let slack = rhs - lhs;
        SelfMapTest {
            is_self_map: slack >= -TANGENTIAL_TOL,
            slack,
            tangential: slack.abs() <= TANGENTIAL_TOL,
        }
    }

    pub fn is_self_map(&self) -> bool {
        self.self_map_test().is_self_map
    }

    /// `self ∘ other` (matrix product), renormalized.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let (u, v) = (self, other);
        Self::new(
            u.a * v.a + u.b * v.c,
            u.a * v.b + u.b * v.d,
            u.c * v.a + u.d * v.c,
            u.c * v.b + u.d * v.d,
        )?
        .normalize()
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// True when the normalized map is `±identity`.
    pub fn is_identity(&self) -> bool {
        let m = match self.normalize() {
            Ok(m) => m,
            Err(_) => return false,
        };
        m.b.norm() <= AFFINE_TOL && m.c.norm() <= AFFINE_TOL && (m.a - m.d).norm() <= 1e-12
    }

    /// Roots of `cz² + (d - a)z - b = 0`, with the point at infinity counted
    /// when `c = 0`.
    pub fn fixed_points(&self) -> Result<FixedPoints> {
        if self.is_identity() {
            return Err(Error::IdentityMap);
        }
        let m = self.normalize()?;
        let (qa, qb, qc) = (m.c, m.d - m.a, -m.b);
        if qa.norm() <= AFFINE_TOL {
            if qb.norm() <= AFFINE_TOL {
                // translation z + b/d: both fixed points merge at infinity
                return Ok(FixedPoints { finite: vec![], at_infinity: 2 });
            }
            return Ok(FixedPoints { finite: vec![(-qc / qb, 1)], at_infinity: 1 });
        }
        let disc = qb * qb - qa * qc * 4.0;
        let scale = (qb.norm_sqr() + (qa * qc).norm()).max(1e-300);
        if disc.norm() <= DOUBLE_ROOT_TOL * scale {
            return Ok(FixedPoints { finite: vec![(-qb / (qa * 2.0), 2)], at_infinity: 0 });
        }
        let sq = disc.sqrt();
        // pick the sign that avoids cancellation
        let s = if (qb.conj() * sq).re >= 0.0 { -(qb + sq) } else { -(qb - sq) };
        let (r1, r2) = if s.norm() <= DET_TOL {
            ((-qb + sq) / (qa * 2.0), (-qb - sq) / (qa * 2.0))
        } else {
            (s / (qa * 2.0), (qc * 2.0) / s)
        };
        Ok(FixedPoints { finite: vec![(r1, 1), (r2, 1)], at_infinity: 0 })
    }

    /// The companion map `σ(z) = (āz - c̄)/(-b̄z + d̄)` of the normalized map.
    pub fn cowen_sigma(&self) -> Result<Self> {
        let m = self.require_self_map()?;
        let sigma = Self::new(m.a.conj(), -m.c.conj(), -m.b.conj(), m.d.conj())?.normalize()?;
        debug_assert!(sigma.is_self_map(), "companion map of a self-map must be a self-map");
        if !sigma.is_self_map() {
            return Err(Error::NotSelfMap(format!("companion map {sigma} failed the self-map test")));
        }
        Ok(sigma)
    }

    /// `g = 1/(-b̄z + d̄)` at `degree` and `h = cz + d`, from the normalized map.
    pub fn cowen_g_h(&self, degree: usize) -> Result<(TruncatedSeries, TruncatedSeries)> {
        let m = self.require_self_map()?;
        let den = TruncatedSeries::new(vec![m.d.conj(), -m.b.conj()])?;
        let g = den.reciprocal_to(degree)?;
        let h = TruncatedSeries::new(vec![m.d, m.c])?;
        Ok((g, h))
    }

    fn require_self_map(&self) -> Result<Self> {
        let test = self.self_map_test();
        if !test.is_self_map {
            return Err(Error::NotSelfMap(format!("{self} has slack {:e}", test.slack)));
        }
        self.normalize()
    }

    pub fn classify(&self) -> LftKind {
        LftKind::of_coefficients(self.coefficients())
    }

    /// Taylor coefficients through `degree`: `(az + b)·(cz + d)^{-1}`.
    pub fn to_series(&self, degree: usize) -> Result<TruncatedSeries> {
        let den = TruncatedSeries::new(vec![self.d, self.c])?;
        let num = TruncatedSeries::new(vec![self.b, self.a])?;
        Ok(num.mul_trunc(&den.reciprocal_to(degree)?, degree))
    }

    /// `σ'(z)`-style derivative: `(ad - bc)/(cz + d)²`.
    pub fn derivative_at(&self, z: Complex64) -> Option<Complex64> {
        let den = self.c * z + self.d;
        if den.norm() <= DET_TOL {
            None
        } else {
            Some(self.det() / (den * den))
        }
    }
}

impl LftKind {
    pub fn of_coefficients(coeffs: [Complex64; 4]) -> Self {
        let [a, b, c, d] = coeffs;
        let m = match MoebiusMap::new(a, b, c, d).and_then(|m| m.normalize()) {
            Ok(m) => m,
            Err(_) => return LftKind::ConstantLike,
        };
        if m.c.norm() <= AFFINE_TOL {
            return LftKind::Affine;
        }
        let fwd = m.self_map_test();
        let inv = m.inverse().self_map_test();
        if fwd.is_self_map && fwd.tangential && inv.is_self_map {
            LftKind::DiskAutomorphism
        } else {
            LftKind::ProperLft
        }
    }
}

impl fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "lft:{},{},{},{}",
            fmt_complex(self.a),
            fmt_complex(self.b),
            fmt_complex(self.c),
            fmt_complex(self.d)
        )
    }
}

pub(crate) fn check_disk(z: Complex64) -> Result<()> {
    if z.norm() < 1.0 {
        Ok(())
    } else {
        Err(Error::NotInDisk(fmt_complex(z)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn same_map(m1: &MoebiusMap, m2: &MoebiusMap, tol: f64) -> bool {
        let pts = [r(0.1), Complex64::new(-0.3, 0.4), Complex64::new(0.5, -0.2), r(-0.7), Complex64::new(0.0, 0.6)];
        pts.iter().all(|&z| (m1.eval(z).unwrap() - m2.eval(z).unwrap()).norm() <= tol)
    }

    #[test]
    fn normalize_examples() {
        let m = MoebiusMap::from_real(1.0, 0.0, -1.0, 2.0).unwrap().normalize().unwrap();
        let s = 2f64.sqrt();
        assert!((m.a - r(1.0 / s)).norm() < 1e-15);
        assert!(m.b.norm() == 0.0);
        assert!((m.c - r(-1.0 / s)).norm() < 1e-15);
        assert!((m.d - r(s)).norm() < 1e-15);
        assert_eq!(MoebiusMap::identity().normalize().unwrap(), MoebiusMap::identity());
        let m = MoebiusMap::from_real(2.0, 0.0, 0.0, 2.0).unwrap().normalize().unwrap();
        assert_eq!(m, MoebiusMap::identity());
    }

    #[test]
    fn canonical_sign_picks_right_half_plane() {
        let m = MoebiusMap::from_real(-1.0, 0.0, 0.0, -1.0).unwrap().normalize().unwrap();
        assert_eq!(m, MoebiusMap::identity());
        let m = MoebiusMap::new(Complex64::new(0.0, -1.0), r(0.0), r(0.0), Complex64::new(0.0, 1.0))
            .unwrap()
            .normalize()
            .unwrap();
        // -i z/(i) -> a = i after sign flip (arg π/2 is kept)
        assert!((m.a - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn degenerate_rejected() {
        assert!(matches!(MoebiusMap::from_real(1.0, 2.0, 2.0, 4.0), Err(Error::DegenerateMap(_))));
    }

    #[test]
    fn self_map_examples() {
        let t = MoebiusMap::from_real(1.0, 1.0, 0.0, 2.0).unwrap().self_map_test();
        assert!(t.is_self_map && t.tangential);
        let t = MoebiusMap::identity().self_map_test();
        assert!(t.is_self_map && t.tangential && t.slack == 0.0);
        let t = MoebiusMap::from_real(2.0, 0.0, 0.0, 1.0).unwrap().self_map_test();
        assert!(!t.is_self_map);
    }

    #[test]
    fn compose_examples() {
        let m = MoebiusMap::from_real(1.0, 0.0, -1.0, 2.0).unwrap();
        assert!(same_map(&m.compose(&MoebiusMap::identity()).unwrap(), &m, 1e-14));
        let inv = MoebiusMap::blaschke_involution(Complex64::new(0.3, -0.4)).unwrap();
        assert!(inv.compose(&inv).unwrap().is_identity());
        let half = MoebiusMap::from_real(1.0, 0.0, 0.0, 2.0).unwrap();
        let quarter = MoebiusMap::from_real(1.0, 0.0, 0.0, 4.0).unwrap();
        assert!(same_map(&half.compose(&half).unwrap(), &quarter, 1e-15));
    }

    #[test]
    fn fixed_point_examples() {
        let fp = MoebiusMap::from_real(2.0, 1.0, 0.0, 4.0).unwrap().fixed_points().unwrap();
        assert_eq!(fp.at_infinity, 1);
        assert!((fp.finite[0].0 - r(0.5)).norm() < 1e-15);

        let fp = MoebiusMap::from_real(1.0, 0.0, -1.0, 2.0).unwrap().fixed_points().unwrap();
        let mut pts: Vec<f64> = fp.finite.iter().map(|p| p.0.re).collect();
        pts.sort_by(f64::total_cmp);
        assert!(pts[0].abs() < 1e-15 && (pts[1] - 1.0).abs() < 1e-15);

        let fp = MoebiusMap::from_real(-1.0, 0.0, 0.0, 1.0).unwrap().fixed_points().unwrap();
        assert_eq!(fp.finite.len(), 1);
        assert!(fp.finite[0].0.norm() < 1e-15);
        assert_eq!(fp.at_infinity, 1);

        assert_eq!(MoebiusMap::identity().fixed_points(), Err(Error::IdentityMap));
    }

    #[test]
    fn parabolic_double_fixed_point() {
        // (z+1)... use (2z - 1)/(z) ~ fixed point z = 1 double: z^2 - 2z + 1
        let m = MoebiusMap::from_real(2.0, -1.0, 1.0, 0.0).unwrap();
        let fp = m.fixed_points().unwrap();
        assert_eq!(fp.finite, vec![(r(1.0), 2)]);
    }

    #[test]
    fn cowen_sigma_examples() {
        let s = MoebiusMap::from_real(1.0, 0.0, -1.0, 2.0).unwrap().cowen_sigma().unwrap();
        assert!(same_map(&s, &MoebiusMap::from_real(1.0, 1.0, 0.0, 2.0).unwrap(), 1e-15));
        let s = MoebiusMap::from_real(2.0, 0.0, -1.0, 4.0).unwrap().cowen_sigma().unwrap();
        assert!(same_map(&s, &MoebiusMap::from_real(2.0, 1.0, 0.0, 4.0).unwrap(), 1e-15));
        assert_eq!(MoebiusMap::identity().cowen_sigma().unwrap(), MoebiusMap::identity());
        assert!(matches!(
            MoebiusMap::from_real(2.0, 0.0, 0.0, 1.0).unwrap().cowen_sigma(),
            Err(Error::NotSelfMap(_))
        ));
    }

    #[test]
    fn cowen_g_h_examples() {
        let (g, h) = MoebiusMap::from_real(1.0, 0.0, 0.0, 2.0).unwrap().cowen_g_h(8).unwrap();
        let s = 2f64.sqrt();
        assert!((g.coeff(0) - r(1.0 / s)).norm() < 1e-15);
        assert!((1..=8).all(|k| g.coeff(k).norm() == 0.0));
        assert!((h.coeff(0) - r(s)).norm() < 1e-15 && h.coeff(1).norm() == 0.0);

        // slope 1/2, intercept b: normalization scales by √2, so g = (1/√2)/(1 - b̄z)
        let b = Complex64::new(0.2, 0.1);
        let m = MoebiusMap::affine(r(0.5), b).unwrap();
        let (g, _) = m.cowen_g_h(10).unwrap();
        let want = TruncatedSeries::geometric(b.conj(), 10).scale(r(1.0 / s));
        for k in 0..=10 {
            assert!((g.coeff(k) - want.coeff(k)).norm() < 1e-15);
        }

        let (g, h) = MoebiusMap::identity().cowen_g_h(4).unwrap();
        assert_eq!(g, TruncatedSeries::one(4));
        assert_eq!(h, TruncatedSeries::new(vec![r(1.0), r(0.0)]).unwrap());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(MoebiusMap::from_real(1.0, 1.0, 0.0, 2.0).unwrap().classify(), LftKind::Affine);
        assert_eq!(MoebiusMap::blaschke_factor(r(0.5)).unwrap().classify(), LftKind::DiskAutomorphism);
        assert_eq!(MoebiusMap::from_real(1.0, 0.0, -1.0, 2.0).unwrap().classify(), LftKind::ProperLft);
        assert_eq!(LftKind::of_coefficients([r(1.0), r(2.0), r(2.0), r(4.0)]), LftKind::ConstantLike);
    }

    #[test]
    fn to_series_matches_eval() {
        let m = MoebiusMap::from_real(2.0, 0.0, -1.0, 4.0).unwrap();
        let s = m.to_series(80).unwrap();
        let z = Complex64::new(0.3, -0.2);
        assert!((s.eval(z) - m.eval(z).unwrap()).norm() < 1e-14);
    }
}
