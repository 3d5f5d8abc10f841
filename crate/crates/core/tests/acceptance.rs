//! Acceptance suite. Each test prints one `PASS`/`FAIL` line.

use std::time::{Duration, Instant};

use hm_core::blaschke::BlaschkeProduct;
use hm_core::modelspace::{invariance_residual, kernel_norm_check, szego_kernel};
use hm_core::moebius::MoebiusMap;
use hm_core::operators::{adjoint_section, composition_section, cowen_adjoint_check, shapiro_for_symbol};
use hm_core::series::{inner, TruncatedSeries};
use hm_core::theorems::{self, affine_sigma, SuitePair};
use hm_core::{CheckConfig, Symbol, Verdict};
use num_complex::Complex64;
use rayon::prelude::*;

const SEED: u64 = 20240611;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn report(id: u32, name: &str, ok: bool, detail: String) {
    println!("{} criterion {id} ({name}): {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
}

#[test]
fn c01_cowen_adjoint_identity() {
    let start = Instant::now();
    let maps = theorems::random_self_map_lfts(SEED, 20, 0.05);
    let worst = maps
        .par_iter()
        .map(|m| cowen_adjoint_check(m, 64).unwrap())
        .reduce(|| 0.0, f64::max);
    let elapsed = start.elapsed();
    report(
        1,
        "Cowen adjoint factorization, N = 64, working degree 256",
        worst <= 1e-8 && elapsed <= Duration::from_secs(30),
        format!("max discrepancy {worst:.3e} (tol 1e-8) over 20 maps in {elapsed:.2?} (limit 30 s)"),
    );
}

#[test]
fn c02_shapiro_adjoint_consistency() {
    let start = Instant::now();
    let maps = theorems::random_self_map_lfts(SEED, 20, 0.05);
    let n = 64;
    let worst = maps
        .par_iter()
        .map(|m| {
            let adj = adjoint_section(&composition_section(&m.to_series(n).unwrap(), n).unwrap());
            (1..=3)
                .map(|k| {
                    let f = TruncatedSeries::monomial(k, n);
                    let a = shapiro_for_symbol(&f, m, n).unwrap();
                    let b = adj.apply(&f);
                    (0..=32).map(|j| (a.coeff(j) - b.coeff(j)).norm()).fold(0.0, f64::max)
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    let elapsed = start.elapsed();
    report(
        2,
        "Shapiro adjoint formula vs adjoint section, through degree 32",
        worst <= 1e-8 && elapsed <= Duration::from_secs(10),
        format!("max coefficient gap {worst:.3e} (tol 1e-8) for f in {{z, z^2, z^3}} in {elapsed:.2?} (limit 10 s)"),
    );
}

#[test]
fn c03_affine_symbols_on_monomial_model_spaces() {
    let cfg = CheckConfig::default();
    let mut g = theorems::rng(SEED);
    let mut jobs = Vec::new();
    for n in 2..=6u32 {
        for _ in 0..20 {
            let (a, b) = theorems::random_affine(&mut g, 0.95, 0.0);
            jobs.push((n, a, b));
        }
    }
    let worst = jobs
        .par_iter()
        .map(|&(n, a, b)| {
            let phi = Symbol::polynomial(&[a, b]).unwrap();
            let rep = invariance_residual(&BlaschkeProduct::z_power(n), &phi, 128, &cfg).unwrap();
            assert_eq!(rep.n_levels, vec![128, 256]);
            rep.residuals.iter().copied().fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);

    let sq = Symbol::polynomial(&[c(0.0), c(0.0), c(1.0)]).unwrap();
    let conv = invariance_residual(&BlaschkeProduct::z_power(3), &sq, 128, &cfg).unwrap();
    let on_z2 = conv.direction_residuals.iter().map(|row| row[2]).fold(f64::INFINITY, f64::min);
    let elsewhere = conv
        .direction_residuals
        .iter()
        .map(|row| row[0].max(row[1]))
        .fold(0.0, f64::max);
    report(
        3,
        "affine symbols keep Q_{z^n}; z^2 breaks Q_{z^3}",
        worst < 1e-8 && on_z2 >= 0.5 && elsewhere < 1e-12,
        format!("max forward residual {worst:.3e} over 100 cases (tol 1e-8); z^2 witness residual {on_z2} on the z^2 direction, {elsewhere:.1e} elsewhere"),
    );
}

#[test]
fn c04_mobius_family_member() {
    let cfg = CheckConfig::default();
    let theta = BlaschkeProduct::from_zeros(&[(c(0.0), 1), (c(0.5), 1)]).unwrap();
    let phi = Symbol::Lft(MoebiusMap::from_real(2.0, 0.0, -1.0, 4.0).unwrap());
    let rep = invariance_residual(&theta, &phi, 128, &cfg).unwrap();
    let member = rep.residuals.iter().copied().fold(0.0, f64::max);
    let sq = Symbol::polynomial(&[c(0.0), c(0.0), c(1.0)]).unwrap();
    let wit = invariance_residual(&theta, &sq, 128, &cfg).unwrap();
    let non_member = wit.residuals.iter().copied().fold(f64::INFINITY, f64::min);
    report(
        4,
        "Q_{z b_0.5} under 2z/(4-z) and z^2",
        member < 1e-8 && rep.n_levels == vec![128, 256] && non_member >= 1e-2,
        format!("member residual {member:.3e} at N = {:?} (tol 1e-8); z^2 residual {non_member:.4} (need >= 1e-2)", rep.n_levels),
    );
}

#[test]
fn c05_model_space_equivalences() {
    let cfg = CheckConfig::default();
    let start = Instant::now();
    let affine = theorems::affine_suite(SEED, 50);
    let lft = theorems::lft_suite(SEED, 50);
    let a: Vec<_> = affine
        .par_iter()
        .map(|p| {
            let [aa, bb, _, dd] = p.phi.coefficients();
            theorems::verify_flt_affine(&p.theta, aa / dd, bb / dd, &cfg).unwrap()
        })
        .collect();
    let b: Vec<_> = lft
        .par_iter()
        .map(|p| theorems::verify_modelinv_lft(&p.theta, &p.phi, &cfg).unwrap())
        .collect();
    let elapsed = start.elapsed();
    let all: Vec<_> = a.iter().chain(&b).flat_map(|r| &r.cases).collect();
    let disagree = all.iter().filter(|c| c.expected != Some(c.computed)).count();
    let indeterminate = all
        .iter()
        .filter(|c| !c.computed.is_decided() || c.expected == Some(Verdict::Indeterminate))
        .count();
    let invariant = all.iter().filter(|c| c.computed == Verdict::Invariant).count();
    for case in all.iter().filter(|c| !c.agrees) {
        println!("  disagreement: {} / {} -> {:?} vs {:?} {:?}", case.theta, case.phi, case.computed, case.expected, case.residuals);
    }
    report(
        5,
        "model space vs Beurling-space routes for affine and LFT symbols",
        disagree == 0 && indeterminate == 0 && all.len() == 100 && elapsed <= Duration::from_secs(120),
        format!(
            "{} pairs ({invariant} invariant), {disagree} disagreements, {indeterminate} indeterminate, {elapsed:.2?} (limit 120 s)",
            all.len()
        ),
    );
}

#[test]
fn c06_multiplicity_vs_projection_for_beurling_spaces() {
    let cfg = CheckConfig::default();
    let mut pairs: Vec<SuitePair> = theorems::affine_suite(SEED, 50);
    pairs.extend(theorems::lft_suite(SEED, 50));
    // also the companion maps, which supply invariant cases
    let companions: Vec<SuitePair> = pairs
        .iter()
        .map(|p| {
            let [a, b, cc, d] = p.phi.coefficients();
            let sigma = if cc.norm() == 0.0 { affine_sigma(a / d, b / d).unwrap() } else { p.phi.cowen_sigma().unwrap() };
            SuitePair { theta: p.theta.clone(), phi: sigma, kind: "companion" }
        })
        .collect();
    pairs.extend(companions);
    let cases: Vec<_> = pairs
        .par_iter()
        .map(|p| theorems::verify_beurling_oracle(&p.theta, &Symbol::Lft(p.phi), &cfg).unwrap())
        .collect();
    let agree = cases.iter().filter(|c| c.agrees).count();
    let invariant = cases.iter().filter(|c| c.computed == Verdict::Invariant).count();
    for case in cases.iter().filter(|c| !c.agrees) {
        println!("  disagreement: {} / {} -> {:?} vs {:?} {:?}", case.theta, case.phi, case.computed, case.expected, case.residuals);
    }
    report(
        6,
        "multiplicity criterion vs projection of C_φ(θ z^k) onto Q_θ",
        agree == cases.len(),
        format!("{agree}/{} agree ({invariant} invariant)", cases.len()),
    );
}

#[test]
fn c07_reducing_families() {
    let cfg = CheckConfig::default();
    let runs = [
        (c(0.0), 1, Symbol::polynomial(&[c(0.0), c(1.0 / 3.0), c(1.0 / 3.0)]).unwrap(), Verdict::Invariant),
        (c(0.0), 2, Symbol::polynomial(&[c(0.0), c(0.5)]).unwrap(), Verdict::Invariant),
        (c(0.5), 1, Symbol::identity(), Verdict::Invariant),
        (c(0.0), 2, Symbol::polynomial(&[c(0.3), c(0.5)]).unwrap(), Verdict::NotInvariant),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (alpha, n, phi, want) in runs {
        let rep = theorems::verify_reducing(alpha, n, &phi, &cfg).unwrap();
        let got = rep.cases[0].computed;
        ok &= rep.pass && got == want;
        parts.push(format!("{phi}: {}", if got == Verdict::Invariant { "reduces" } else { "does not reduce" }));
    }
    report(7, "reducing families", ok, parts.join("; "));
}

#[test]
fn c08_constants_invariant_under_every_symbol() {
    let cfg = CheckConfig::default();
    let symbols = theorems::random_symbols(SEED, 50);
    let rep = theorems::verify_constant_space(&symbols, &cfg).unwrap();
    let worst = rep
        .cases
        .iter()
        .flat_map(|c| c.residuals.iter().copied())
        .fold(0.0, f64::max);
    report(
        8,
        "Q_z under 50 mixed symbols",
        rep.pass && worst < 1e-12 && rep.cases.len() == 50,
        format!("max residual {worst:.3e} (tol 1e-12)"),
    );
}

#[test]
fn c09_rigidity_demonstrations() {
    let cfg = CheckConfig::default();
    let run = || {
        let grid = theorems::default_alpha_grid(SEED, 6);
        let fam = theorems::default_theta_family();
        let half = theorems::verify_rigidity(&Symbol::polynomial(&[c(0.0), c(0.5)]).unwrap(), &grid, &fam, &cfg).unwrap();
        let id = theorems::verify_rigidity(&Symbol::identity(), &grid, &fam, &cfg).unwrap();
        (half, id)
    };
    let (half, id) = run();
    let (half2, id2) = run();
    let located = half
        .cases
        .iter()
        .any(|c| c.label == "b_α H² probe" && c.computed == Verdict::NotInvariant);
    let b05 = BlaschkeProduct::factor(c(0.5)).unwrap();
    let constant = theorems::verify_constant_symbol(&b05, c(0.0), &cfg).unwrap();
    let broken = constant.pass && constant.cases[0].computed == Verdict::NotInvariant;
    let id_probes_pass = id
        .cases
        .iter()
        .filter(|c| c.label.ends_with("probe"))
        .all(|c| c.computed == Verdict::Invariant);
    let deterministic = half == half2 && id == id2;
    report(
        9,
        "rigidity witnesses",
        half.pass && id.pass && located && broken && id_probes_pass && deterministic,
        format!(
            "z/2 breaks some b_α H²: {located}; constant symbol breaks Q_{{b_0.5}}: {broken}; identity passes all probes: {id_probes_pass}; deterministic: {deterministic}"
        ),
    );
}

#[test]
fn c10_kernel_substrate() {
    let n = 128;
    let mut g = theorems::rng(SEED);
    let mut worst_repro = 0.0f64;
    for _ in 0..20 {
        let w = theorems::random_disk_point(&mut g, 0.95);
        let f: Vec<Complex64> = (0..=n).map(|_| theorems::random_disk_point(&mut g, 1.0)).collect();
        let f = TruncatedSeries::new(f).unwrap();
        let k = szego_kernel(w, n).unwrap();
        let scale: f64 = f.coeffs().iter().enumerate().map(|(j, a)| a.norm() * w.norm().powi(j as i32)).sum();
        let gap = (inner(f.coeffs(), k.coeffs()) - f.eval(w)).norm() / scale;
        worst_repro = worst_repro.max(gap);
    }
    // error stays under the tail bound; at N = 128 both sit below double
    // precision, so a rounding allowance of a few ulp of ‖k_w‖² is added
    let mut bound_ok = true;
    let mut worst_ratio = 0.0f64;
    for w in [c(0.5), Complex64::new(0.3, -0.4), Complex64::new(-0.1, 0.2), c(0.0)] {
        let chk = kernel_norm_check(w, n).unwrap();
        let ulp = 8.0 * f64::EPSILON / (1.0 - w.norm_sqr());
        bound_ok &= chk.error <= chk.bound + ulp;
        for small in [2usize, 4, 8] {
            let s = kernel_norm_check(w, small).unwrap();
            bound_ok &= s.error <= s.bound + ulp;
            if s.bound > 1e-6 {
                worst_ratio = worst_ratio.max((s.error - s.bound).abs() / s.bound);
            }
        }
    }
    report(
        10,
        "Szegő kernel reproducing property and norm tail bound",
        worst_repro < 1e-13 && bound_ok && worst_ratio < 1e-8,
        format!("reproducing gap {worst_repro:.2e} (relative); tail bound holds: {bound_ok}; bound tightness at small N {worst_ratio:.1e}"),
    );
}
