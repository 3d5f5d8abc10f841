//! Holomorphic self-maps of the disk in the forms this crate can handle.

use std::fmt;

use num_complex::Complex64;

use crate::blaschke::BlaschkeProduct;
use crate::error::{fmt_complex, Error, Result};
use crate::moebius::MoebiusMap;
use crate::series::TruncatedSeries;

/// Slack allowed above 1 in the boundary sup test of series symbols.
pub const SUP_SLACK: f64 = 1e-6;

/// Coefficients below this (past `c_0`) make a series symbol constant.
pub const CONSTANT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum Symbol {
    Lft(MoebiusMap),
    /// Polynomial or truncated Taylor series.
    Series(TruncatedSeries),
    /// A finite Blaschke product used as a symbol (an inner self-map).
    Blaschke(BlaschkeProduct),
    Constant(Complex64),
}

impl Symbol {
    pub fn identity() -> Self {
        Symbol::Lft(MoebiusMap::identity())
    }

    pub fn polynomial(coeffs: &[Complex64]) -> Result<Self> {
        Ok(Symbol::Series(TruncatedSeries::new(coeffs.to_vec())?))
    }

    pub fn eval(&self, z: Complex64) -> Option<Complex64> {
        match self {
            Symbol::Lft(m) => m.eval(z),
            Symbol::Series(s) => Some(s.eval(z)),
            Symbol::Blaschke(b) => b.eval(z).ok(),
            Symbol::Constant(c) => Some(*c),
        }
    }

    /// Taylor coefficients through `degree`.
    pub fn to_series(&self, degree: usize) -> Result<TruncatedSeries> {
        match self {
            Symbol::Lft(m) => m.to_series(degree),
            Symbol::Series(s) => Ok(s.resized(degree)),
            Symbol::Blaschke(b) => Ok(b.to_series(degree)),
            Symbol::Constant(c) => Ok(TruncatedSeries::constant(*c, degree)),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Symbol::Constant(_) => true,
            Symbol::Series(s) => s.coeffs().iter().skip(1).all(|c| c.norm() <= CONSTANT_TOL),
            Symbol::Blaschke(b) => b.degree() == 0,
            Symbol::Lft(_) => false,
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Symbol::Lft(m) => m.is_identity(),
            Symbol::Series(s) => {
                (s.coeff(1) - Complex64::new(1.0, 0.0)).norm() <= CONSTANT_TOL
                    && s.coeffs().iter().enumerate().all(|(k, c)| k == 1 || c.norm() <= CONSTANT_TOL)
            }
            _ => false,
        }
    }

    /// Fails unless the symbol maps the disk into itself. Series symbols are
    /// exact polynomials, judged by `|φ(0)| < 1` and their sup over samples
    /// of the unit circle.
    pub fn check_self_map(&self, samples: usize) -> Result<()> {
        match self {
            Symbol::Lft(m) => {
                let t = m.self_map_test();
                if t.is_self_map {
                    Ok(())
                } else {
                    Err(Error::NotSelfMap(format!("{m} has slack {:e}", t.slack)))
                }
            }
            Symbol::Series(s) => {
                let sup = s.boundary_sup_estimate(samples, 1.0);
                if s.coeff(0).norm() < 1.0 && sup <= 1.0 + SUP_SLACK {
                    Ok(())
                } else {
                    Err(Error::NotSelfMap(format!("series symbol has boundary sup {sup}")))
                }
            }
            Symbol::Blaschke(_) => Ok(()),
            Symbol::Constant(c) => {
                if c.norm() < 1.0 {
                    Ok(())
                } else {
                    Err(Error::NotSelfMap(format!("constant {} is outside the disk", fmt_complex(*c))))
                }
            }
        }
    }

    /// Taylor coefficients of `φ ∘ τ_w` at 0 through `degree`, where
    /// `τ_w(t) = (t + w)/(1 + w̄t)`. Vanishing orders at `w` are read off
    /// this series. Polynomial symbols use a plain Taylor shift instead.
    pub(crate) fn local_series(&self, w: Complex64, degree: usize) -> Result<TruncatedSeries> {
        let recenter = MoebiusMap::new(Complex64::new(1.0, 0.0), w, w.conj(), Complex64::new(1.0, 0.0))?;
        match self {
            Symbol::Series(s) => Ok(s.taylor_shift(w)),
            Symbol::Lft(m) => m.compose(&recenter)?.to_series(degree),
            Symbol::Blaschke(b) => {
                let mut acc = TruncatedSeries::constant(b.gamma(), degree);
                for z in b.zeros() {
                    let f = MoebiusMap::blaschke_factor(z.alpha)?.compose(&recenter)?.to_series(degree)?;
                    acc = acc.mul_trunc(&f.pow_trunc(z.multiplicity as usize, degree), degree);
                }
                Ok(acc)
            }
            Symbol::Constant(c) => Ok(TruncatedSeries::constant(*c, degree)),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Lft(m) => write!(f, "{m}"),
            Symbol::Series(s) => {
                let parts: Vec<String> = s.coeffs().iter().map(|&c| fmt_complex(c)).collect();
                write!(f, "poly:{}", parts.join(","))
            }
            Symbol::Blaschke(b) => write!(f, "blaschke:{b}"),
            Symbol::Constant(c) => write!(f, "constant:{}", fmt_complex(*c)),
        }
    }
}

impl From<MoebiusMap> for Symbol {
    fn from(m: MoebiusMap) -> Self {
        Symbol::Lft(m)
    }
}

impl From<TruncatedSeries> for Symbol {
    fn from(s: TruncatedSeries) -> Self {
        Symbol::Series(s)
    }
}
