//! Model spaces `Q_θ` for finite Blaschke products: bases, projections,
//! Szegő kernels and invariance residuals.
//!
//! `Q_θ` is spanned by `c_α^{(t)}(z) = z^t/(1 - ᾱz)^{t+1}` for each zero `α`
//! of multiplicity `n` and `0 ≤ t < n`. The `k`-th coefficient of
//! `c_α^{(t)}` is `C(k, t)·ᾱ^{k-t}`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::blaschke::{beurling_invariance, BlaschkeProduct};
use crate::config::CheckConfig;
use crate::error::{Error, Result};
use crate::moebius::check_disk;
use crate::report::{Criterion, InvarianceReport, Verdict};
use crate::series::{inner, TruncatedSeries};
use crate::symbol::Symbol;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Residual levels more than this factor apart are not trusted as a rejection.
pub const LEVEL_AGREEMENT: f64 = 10.0;

/// `k_w(z) = 1/(1 - w̄z)` through degree `N`.
pub fn szego_kernel(w: Complex64, n: usize) -> Result<TruncatedSeries> {
    check_disk(w)?;
    Ok(TruncatedSeries::geometric(w.conj(), n))
}

/// `c_α^{(t)}` through degree `N`.
pub fn cauchy_vector(alpha: Complex64, t: usize, n: usize) -> TruncatedSeries {
    let ab = alpha.conj();
    let mut coeffs = vec![ZERO; n + 1];
    if t <= n {
        // C(k, t)·ᾱ^{k-t}, stepping k → k+1 multiplies by (k+1)/(k+1-t)·ᾱ
        let mut v = ONE;
        coeffs[t] = v;
        for k in t..n {
            v *= ab * ((k + 1) as f64 / (k + 1 - t) as f64);
            if v.norm() < 1e-300 {
                break;
            }
            coeffs[k + 1] = v;
        }
    }
    TruncatedSeries::new(coeffs).expect("finite coefficients")
}

/// Orthonormal basis of the truncated model space.
#[derive(Debug, Clone)]
pub struct ModelSpaceBasis {
    pub theta: BlaschkeProduct,
    pub dim: usize,
    /// The `c_α^{(t)}` vectors, in zero order then `t` order.
    pub raw: Vec<TruncatedSeries>,
    /// `(α, t)` label of each raw vector.
    pub labels: Vec<(Complex64, usize)>,
    pub ortho: Vec<TruncatedSeries>,
    pub trunc_degree: usize,
    /// Upper-triangular `T` with `ortho_j = Σ_i raw_i·T[i][j]`.
    pub transform: Vec<Vec<Complex64>>,
    /// Largest relative H² mass of a raw vector lost past the truncation degree.
    pub tail_bound: f64,
}

/// Builds raw and orthonormal bases of `Q_θ` through degree `N` (modified
/// Gram-Schmidt, run twice).
pub fn build_basis(theta: &BlaschkeProduct, n: usize) -> Result<ModelSpaceBasis> {
    let dim = theta.degree();
    let required = 4 * dim;
    if n < required || n == 0 {
        return Err(Error::DegreeTooSmall { given: n, required: required.max(1) });
    }
    let mut raw = Vec::with_capacity(dim);
    let mut labels = Vec::with_capacity(dim);
    let mut tail_bound = 0.0f64;
    for z in theta.zeros() {
        for t in 0..z.multiplicity as usize {
            let v = cauchy_vector(z.alpha, t, n);
            tail_bound = tail_bound.max(relative_tail(z.alpha, t, n));
            raw.push(v);
            labels.push((z.alpha, t));
        }
    }
    let mut ortho: Vec<Vec<Complex64>> = raw.iter().map(|v| v.coeffs().to_vec()).collect();
    let mut transform: Vec<Vec<Complex64>> = (0..dim)
        .map(|j| (0..dim).map(|i| if i == j { ONE } else { ZERO }).collect())
        .collect();
    for j in 0..dim {
        for _pass in 0..2 {
            for i in 0..j {
                let r = inner(&ortho[j], &ortho[i]);
                let (head, tail) = ortho.split_at_mut(j);
                for (x, y) in tail[0].iter_mut().zip(&head[i]) {
                    *x -= r * y;
                }
                let (th, tt) = transform.split_at_mut(j);
                for (x, y) in tt[0].iter_mut().zip(&th[i]) {
                    *x -= r * y;
                }
            }
        }
        let nrm = ortho[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm < 1e-13 {
            return Err(Error::InvalidArgument(format!(
                "model space basis is numerically dependent at degree {n}; zeros too close together"
            )));
        }
        ortho[j].iter_mut().for_each(|x| *x /= nrm);
        transform[j].iter_mut().for_each(|x| *x /= nrm);
    }
    // transform is stored by column; flip to T[i][j]
    let t_rows: Vec<Vec<Complex64>> = (0..dim).map(|i| (0..dim).map(|j| transform[j][i]).collect()).collect();
    Ok(ModelSpaceBasis {
        theta: theta.clone(),
        dim,
        raw,
        labels,
        ortho: ortho.into_iter().map(TruncatedSeries::from_vec_unchecked).collect(),
        trunc_degree: n,
        transform: t_rows,
        tail_bound,
    })
}

/// `‖tail past N‖ / ‖c_α^{(t)}‖`, summing the tail until terms underflow.
fn relative_tail(alpha: Complex64, t: usize, n: usize) -> f64 {
    let r = alpha.norm();
    if r == 0.0 {
        return 0.0;
    }
    let mut v = 1.0f64;
    let (mut head, mut tail) = (0.0f64, 0.0f64);
    let mut k = t;
    loop {
        if k <= n {
            head += v * v;
        } else {
            tail += v * v;
            if v * v < 1e-40 * tail.max(1e-300) || k > 64 * (n + 1) {
                break;
            }
        }
        v *= r * ((k + 1) as f64 / (k + 1 - t) as f64);
        k += 1;
        if v == 0.0 {
            break;
        }
    }
    (tail / (head + tail)).sqrt()
}

impl ModelSpaceBasis {
    /// `P_{Q_θ} f` (through the truncation degree) and `‖f - P f‖`.
    pub fn project(&self, f: &TruncatedSeries) -> (TruncatedSeries, f64) {
        let f = f.resized(self.trunc_degree);
        let mut inside = vec![ZERO; self.trunc_degree + 1];
        for v in &self.ortho {
            let c = inner(f.coeffs(), v.coeffs());
            for (x, y) in inside.iter_mut().zip(v.coeffs()) {
                *x += c * y;
            }
        }
        let inside = TruncatedSeries::from_vec_unchecked(inside);
        let residual = f.sub(&inside).h2_norm();
        (inside, residual)
    }

    /// Images of the orthonormal vectors under `C_φ`, through the
    /// truncation degree, composed analytically as `φ^t·(1 - ᾱφ)^{-(t+1)}`.
    pub fn composed_ortho(&self, phi: &Symbol) -> Result<Vec<TruncatedSeries>> {
        let n = self.trunc_degree;
        let p = phi.to_series(n)?;
        if p.coeff(0).norm() >= 1.0 {
            return Err(Error::NotSelfMap(format!("|φ(0)| = {} ≥ 1", p.coeff(0).norm())));
        }
        let mut composed_raw = Vec::with_capacity(self.dim);
        for &(alpha, t) in &self.labels {
            let den = TruncatedSeries::one(0).sub(&p.scale(alpha.conj()));
            let inv = den.reciprocal_to(n)?;
            let v = p.pow_trunc(t, n).mul_trunc(&inv.pow_trunc(t + 1, n), n);
            composed_raw.push(v);
        }
        Ok((0..self.dim)
            .map(|j| {
                let mut acc = TruncatedSeries::zero(n);
                for (i, v) in composed_raw.iter().enumerate() {
                    let tij = self.transform[i][j];
                    if tij != ZERO {
                        acc = acc.add(&v.scale(tij));
                    }
                }
                acc
            })
            .collect())
    }

    /// Relative residual of each `C_φ v_j` after projection onto `Q_θ`.
    pub fn direction_residuals(&self, phi: &Symbol) -> Result<Vec<f64>> {
        Ok(self
            .composed_ortho(phi)?
            .par_iter()
            .map(|f| {
                let nrm = f.h2_norm();
                if nrm == 0.0 {
                    0.0
                } else {
                    self.project(&f.scale(Complex64::new(1.0 / nrm, 0.0))).1
                }
            })
            .collect())
    }
}

/// `(inside, residual_norm)` of `f` against the basis.
pub fn project(basis: &ModelSpaceBasis, f: &TruncatedSeries) -> (TruncatedSeries, f64) {
    basis.project(f)
}

/// Verdict from residuals at two truncation levels: invariant when both are
/// below `tol_accept`, not invariant when both exceed `tol_reject` and agree
/// within a factor of 10, indeterminate otherwise.
pub fn classify_levels(r1: f64, r2: f64, cfg: &CheckConfig) -> Verdict {
    if r1 < cfg.tol_accept && r2 < cfg.tol_accept {
        Verdict::Invariant
    } else if r1 > cfg.tol_reject && r2 > cfg.tol_reject && r1.max(r2) <= LEVEL_AGREEMENT * r1.min(r2) {
        Verdict::NotInvariant
    } else {
        Verdict::Indeterminate
    }
}

fn levels(n: usize, cfg: &CheckConfig) -> (usize, usize) {
    (n, (2 * n).min(cfg.max_truncation.max(n)))
}

/// Whether `C_φ Q_θ ⊆ Q_θ`, from the largest relative projection residual
/// of `C_φ v` over orthonormal `v`, at degrees `N` and `2N`.
pub fn invariance_residual(theta: &BlaschkeProduct, phi: &Symbol, n: usize, cfg: &CheckConfig) -> Result<InvarianceReport> {
    phi.check_self_map(cfg.samples)?;
    let (n1, n2) = levels(n, cfg);
    let (a, b) = rayon::join(
        || build_basis(theta, n1).and_then(|bs| bs.direction_residuals(phi)),
        || build_basis(theta, n2).and_then(|bs| bs.direction_residuals(phi)),
    );
    let (a, b) = (a?, b?);
    let r1 = a.iter().copied().fold(0.0, f64::max);
    let r2 = b.iter().copied().fold(0.0, f64::max);
    let mut notes = Vec::new();
    if theta.max_zero_modulus() > 0.9 {
        notes.push(format!("zero modulus {} > 0.9; truncation tails decay slowly", theta.max_zero_modulus()));
    }
    Ok(InvarianceReport {
        theta: theta.to_string(),
        phi: phi.to_string(),
        n_levels: vec![n1, n2],
        residuals: vec![r1, r2],
        verdict: classify_levels(r1, r2, cfg),
        criterion: Criterion::Projection,
        direction_residuals: vec![a, b],
        multiplicities: vec![],
        quotient_sup: None,
        notes,
    })
}

/// [`invariance_residual`] starting at the configured degree and doubling
/// while the verdict is indeterminate, up to the truncation cap.
pub fn invariance_residual_refined(theta: &BlaschkeProduct, phi: &Symbol, cfg: &CheckConfig) -> Result<InvarianceReport> {
    let mut n = cfg.base_degree(theta.degree());
    loop {
        let rep = invariance_residual(theta, phi, n, cfg)?;
        if rep.verdict.is_decided() || 2 * n > cfg.max_truncation / 2 {
            return Ok(rep);
        }
        n *= 2;
    }
}

/// Model-space and Beurling-space reports; `Q_θ` reduces `C_φ` iff both
/// are invariant.
pub fn reducing_residual(theta: &BlaschkeProduct, phi: &Symbol, cfg: &CheckConfig) -> Result<(InvarianceReport, InvarianceReport)> {
    let model = invariance_residual_refined(theta, phi, cfg)?;
    let beurling = beurling_invariance(theta, phi, cfg)?;
    Ok((model, beurling))
}

/// Combined reducing verdict.
pub fn reduces(model: &InvarianceReport, beurling: &InvarianceReport) -> Verdict {
    match (model.verdict, beurling.verdict) {
        (Verdict::Invariant, Verdict::Invariant) => Verdict::Invariant,
        (Verdict::NotInvariant, _) | (_, Verdict::NotInvariant) => Verdict::NotInvariant,
        _ => Verdict::Indeterminate,
    }
}

/// Projection test for `θH²`: the `Q_θ` component of `C_φ(θ z^k)` for
/// `k = 0..=3`, relative to its norm. It vanishes for every `k` iff
/// `C_φ(θH²) ⊆ θH²`.
pub fn beurling_projection_residual(theta: &BlaschkeProduct, phi: &Symbol, cfg: &CheckConfig) -> Result<InvarianceReport> {
    if phi.is_constant() {
        return Err(Error::ConstantSymbol);
    }
    phi.check_self_map(cfg.samples)?;
    let n = cfg.base_degree(theta.degree());
    let (n1, n2) = levels(n, cfg);
    let level = |l: usize| -> Result<Vec<f64>> {
        let basis = build_basis(theta, l)?;
        let p = phi.to_series(l)?;
        let base = theta.compose_series(&p, l)?;
        let mut out = Vec::with_capacity(4);
        let mut f = base;
        for _ in 0..=3 {
            let nrm = f.h2_norm();
            let (inside, _) = basis.project(&f);
            out.push(if nrm == 0.0 { 0.0 } else { inside.h2_norm() / nrm });
            f = f.mul_trunc(&p, l);
        }
        Ok(out)
    };
    let (a, b) = rayon::join(|| level(n1), || level(n2));
    let (a, b) = (a?, b?);
    let r1 = a.iter().copied().fold(0.0, f64::max);
    let r2 = b.iter().copied().fold(0.0, f64::max);
    Ok(InvarianceReport {
        theta: theta.to_string(),
        phi: phi.to_string(),
        n_levels: vec![n1, n2],
        residuals: vec![r1, r2],
        verdict: classify_levels(r1, r2, cfg),
        criterion: Criterion::Projection,
        direction_residuals: vec![a, b],
        multiplicities: vec![],
        quotient_sup: None,
        notes: vec![],
    })
}

/// Truncation error of `‖k_w‖²` at degree `N` and its geometric bound
/// `|w|^{2(N+1)}/(1 - |w|²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelNormCheck {
    pub error: f64,
    pub bound: f64,
}

pub fn kernel_norm_check(w: Complex64, n: usize) -> Result<KernelNormCheck> {
    let k = szego_kernel(w, n)?;
    let exact = 1.0 / (1.0 - w.norm_sqr());
    let error = (exact - k.h2_norm_sqr()).abs();
    let bound = w.norm_sqr().powi(n as i32 + 1) / (1.0 - w.norm_sqr());
    Ok(KernelNormCheck { error, bound })
}
