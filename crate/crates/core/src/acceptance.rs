//! The acceptance suite: ten numbered criteria, each returning a pass/fail
//! outcome with a one-line summary.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::bernstein::{run_trials, BernsteinConfig};
use crate::blaschke::{blaschke_product, MalmquistBasis, Sigma};
use crate::bounds::{self, half_index};
use crate::error::Result;
use crate::interpolator::{phi, trace_match};
use crate::oracle::{self, OracleConfig};
use crate::sampling::{disc_point, random_poly, random_sigma, random_simple_sigma, random_unit_poly};
use crate::spaces::{binomial_norm, weighted_norm, SpaceSpec};
use crate::{derived_rng, Rng};

pub const CRITERIA: [(u32, &str); 10] = [
    (1, "trace correctness"),
    (2, "hilbert sandwich"),
    (3, "growth exponent"),
    (4, "bernstein suite"),
    (5, "projection bound"),
    (6, "oracle cross-validation"),
    (7, "von neumann"),
    (8, "aronszajn-debranges"),
    (9, "flat certificate vs oracle"),
    (10, "witness positivity"),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub runtime_ms: u128,
    pub limit_ms: Option<u128>,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {:>2} {:<26} {}", self.id, self.name, self.detail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Smaller instance counts and grids.
    pub quick: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { seed: 20_240_601, quick: false }
    }
}

fn rng_for(cfg: &SuiteConfig, id: u32, i: usize) -> Rng {
    derived_rng(cfg.seed, ((id as u64) << 32) | i as u64)
}

fn limit(id: u32) -> Option<Duration> {
    match id {
        1 => Some(Duration::from_secs(20)),
        2 => Some(Duration::from_secs(180)),
        3 => Some(Duration::from_secs(600)),
        4 => Some(Duration::from_secs(60)),
        _ => None,
    }
}

fn oracle_cfg(cfg: &SuiteConfig, id: u32) -> OracleConfig {
    OracleConfig { seed: cfg.seed ^ ((id as u64) << 40), restarts: if cfg.quick { 6 } else { 16 }, ..Default::default() }
}

/// Runs criterion `id` (1 to 10).
pub fn run(id: u32, cfg: &SuiteConfig) -> Outcome {
    let name = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1);
    let start = Instant::now();
    let res = match id {
        1 => trace_correctness(cfg),
        2 => hilbert_sandwich(cfg),
        3 => growth_exponent(cfg),
        4 => bernstein_suite(cfg),
        5 => projection_bound(cfg),
        6 => oracle_crosscheck(cfg),
        7 => von_neumann(cfg),
        8 => aronszajn(cfg),
        9 => flat_certificate(cfg),
        10 => witness_positivity(),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = res.unwrap_or_else(|e| (false, format!("error: {e}")));
    let lim = limit(id);
    if let Some(l) = lim {
        if elapsed > l {
            passed = false;
            detail.push_str(&format!("; runtime {:.1}s over {}s limit", elapsed.as_secs_f64(), l.as_secs()));
        }
    }
    Outcome { id, name, passed, detail, runtime_ms: elapsed.as_millis(), limit_ms: lim.map(|l| l.as_millis()) }
}

/// Runs every criterion in order.
pub fn run_suite(cfg: &SuiteConfig) -> Vec<Outcome> {
    CRITERIA.iter().map(|&(id, _)| run(id, cfg)).collect()
}

type Check = Result<(bool, String)>;

fn trace_correctness(cfg: &SuiteConfig) -> Check {
    let count = if cfg.quick { 30 } else { 100 };
    let defects: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(cfg, 1, i);
            let sigma = random_sigma(&mut rng, 10, 0.9);
            let deg = rng.random_range(0..=50);
            let f = random_unit_poly(&mut rng, deg);
            trace_match(&f, &phi(&f, &sigma), &sigma, 1e-8).max_defect
        })
        .collect();
    let worst = defects.iter().copied().fold(0.0, f64::max);
    Ok((worst <= 1e-8, format!("{count} instances, max defect {worst:.2e} (tol 1e-8)")))
}

fn hilbert_sandwich(cfg: &SuiteConfig) -> Check {
    let ns: &[usize] = if cfg.quick { &[1, 2, 4] } else { &[1, 2, 4, 8] };
    let lambdas = [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0), Complex64::new(0.9, 0.0), Complex64::new(0.0, 0.6)];
    let alphas = [0.0, -0.5, -1.0];
    let mut cases = Vec::new();
    for &n in ns {
        for &l in &lambdas {
            for &a in &alphas {
                cases.push((n, l, a));
            }
        }
    }
    let ocfg = oracle_cfg(cfg, 2);
    let rows: Vec<Result<(f64, f64, f64, f64)>> = cases
        .par_iter()
        .map(|&(n, l, a)| {
            let x = SpaceSpec::hilbert(a)?;
            let sigma = Sigma::one_point(l, n)?;
            let flat = bounds::lower_lp(n, &x)?.0;
            let big_n = x.kernel_power().expect("integer kernel power");
            let one = bounds::lower_onepoint_hilbert(n, l, big_n)?.value;
            let est = oracle::interp_constant_estimate(&sigma, &x, &ocfg)?.value;
            let up = bounds::upper_hilbert(n, l.norm(), a)?;
            Ok((flat, one, est, up))
        })
        .collect();
    let mut bad = Vec::new();
    let mut min_gap = f64::INFINITY;
    for (row, &(n, l, a)) in rows.into_iter().zip(&cases) {
        let (flat, one, est, up) = row?;
        let lower = flat.max(one);
        min_gap = min_gap.min((est - lower).min(up - est));
        if lower > est + 1e-6 || est > up + 1e-6 {
            bad.push(format!("(n={n}, lambda={l}, alpha={a}): {lower:.4} / {est:.4} / {up:.4}"));
        }
    }
    let detail = format!("{} cases, {} violations, min slack {min_gap:.3e}{}", cases.len(), bad.len(), first(&bad));
    Ok((bad.is_empty(), detail))
}

fn first(bad: &[String]) -> String {
    bad.first().map(|b| format!("; first {b}")).unwrap_or_default()
}

/// Least-squares slope of `log(oracle)` on `log(n/(1-r))` over one-point families.
pub fn oracle_slope(ns: &[usize], rs: &[f64], x: &SpaceSpec, ocfg: &OracleConfig) -> Result<f64> {
    let grid: Vec<(usize, f64)> = ns.iter().flat_map(|&n| rs.iter().map(move |&r| (n, r))).collect();
    let vals: Vec<Result<(f64, f64)>> = grid
        .par_iter()
        .map(|&(n, r)| {
            let sigma = Sigma::one_point(Complex64::new(r, 0.0), n)?;
            let est = oracle::interp_constant_estimate(&sigma, x, ocfg)?.value;
            Ok(((n as f64 / (1.0 - r)).ln(), est.ln()))
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = vals.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
    Ok(crate::bernstein::least_squares_slope(&xs, &ys))
}

fn growth_exponent(cfg: &SuiteConfig) -> Check {
    let ns: &[usize] = if cfg.quick { &[2, 4, 8] } else { &[2, 4, 8, 16] };
    let rs = [0.0, 0.5, 0.9];
    let ocfg = oracle_cfg(cfg, 3);
    let mut ok = true;
    let mut parts = Vec::new();
    for a in [0.0, -0.5, -1.0] {
        let x = SpaceSpec::hilbert(a)?;
        let slope = oracle_slope(ns, &rs, &x, &ocfg)?;
        let want = (1.0 - 2.0 * a) / 2.0;
        ok &= (slope - want).abs() <= 0.35;
        parts.push(format!("alpha={a}: {slope:.3} vs {want}"));
    }
    Ok((ok, parts.join(", ")))
}

fn bernstein_suite(cfg: &SuiteConfig) -> Check {
    let bc = BernsteinConfig {
        trials: if cfg.quick { 60 } else { 200 },
        seed: cfg.seed ^ 4,
        ..Default::default()
    };
    let rows = run_trials(&bc)?;
    let violations = rows.iter().filter(|t| !t.pass).count();
    let worst = rows.iter().map(|t| t.ratio / t.bound).fold(0.0, f64::max);
    Ok((violations == 0, format!("{} checks, {violations} violations, max ratio/bound {worst:.3}", rows.len())))
}

fn projection_bound(cfg: &SuiteConfig) -> Check {
    let count = if cfg.quick { 50 } else { 200 };
    let mut violations = 0;
    let mut worst = 0.0f64;
    let mut identity_defect = 0.0f64;
    for i in 0..count {
        let mut rng = rng_for(cfg, 5, i);
        let sigma = random_sigma(&mut rng, 10, 0.95);
        // half the points on the circle, where the kernel norm is largest
        let zeta = if i % 2 == 0 { disc_point(&mut rng, 1.0) } else { Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)) };
        let basis = MalmquistBasis::new(&sigma);
        let s: f64 = basis.eval_all(zeta).iter().map(|e| e.norm_sqr()).sum();
        let bound = 2.0 * sigma.n() as f64 / (1.0 - sigma.r());
        worst = worst.max(s / bound);
        if s > bound {
            violations += 1;
        }
        if zeta.norm() < 0.99 {
            let b = blaschke_product(&sigma, zeta)?;
            let closed = (1.0 - b.norm_sqr()) / (1.0 - zeta.norm_sqr());
            identity_defect = identity_defect.max((s - closed).abs() / closed.max(1.0));
        }
    }
    let ok = violations == 0 && identity_defect < 1e-9;
    Ok((ok, format!("{count} samples, {violations} violations, max ratio {worst:.3}, kernel identity defect {identity_defect:.1e}")))
}

fn oracle_crosscheck(cfg: &SuiteConfig) -> Check {
    let count = if cfg.quick { 20 } else { 50 };
    let mut worst = 0.0f64;
    let mut flagged = 0;
    for i in 0..count {
        let mut rng = rng_for(cfg, 6, i);
        let n = rng.random_range(1..=6);
        let sigma = random_simple_sigma(&mut rng, n, 0.9, 0.02);
        let w: Vec<Complex64> = (0..n).map(|_| crate::sampling::complex_gaussian(&mut rng)).collect();
        let a = oracle::min_norm(&sigma, &w)?;
        let b = oracle::pick_min_norm(&sigma, &w)?;
        flagged += a.ill_conditioned as usize;
        worst = worst.max((a.value - b).abs() / (1.0 + a.value));
    }
    Ok((worst <= 1e-7, format!("{count} instances, max scaled gap {worst:.2e}, {flagged} flagged ill-conditioned")))
}

fn von_neumann(cfg: &SuiteConfig) -> Check {
    let count = if cfg.quick { 4 } else { 10 };
    let trials = if cfg.quick { 30 } else { 100 };
    let mut failures = 0;
    let mut max_gap = 0.0f64;
    let mut min_gap = f64::INFINITY;
    for i in 0..count {
        let mut rng = rng_for(cfg, 7, i);
        let sigma = random_sigma(&mut rng, 6, 0.9);
        let deg = rng.random_range(0..=8);
        let f = random_unit_poly(&mut rng, deg);
        let rep = oracle::von_neumann_check(&sigma, &f, 0.0, trials, cfg.seed ^ i as u64)?;
        failures += !rep.passed as usize;
        max_gap = max_gap.max(rep.contraction_gap);
        min_gap = min_gap.min(rep.contraction_gap);
    }
    Ok((
        failures == 0,
        format!("{count} sigma x {trials} contractions, {failures} failures, contraction gap in [{min_gap:.2e}, {max_gap:.2e}]"),
    ))
}

fn aronszajn(cfg: &SuiteConfig) -> Check {
    let count = if cfg.quick { 30 } else { 100 };
    let mut worst = f64::NEG_INFINITY;
    for i in 0..count {
        let mut rng = rng_for(cfg, 8, i);
        let deg = rng.random_range(0..=20);
        let f = random_poly(&mut rng, deg);
        let h2 = weighted_norm(&f, &SpaceSpec::hardy()).powi(2);
        for big_n in 1..=3u32 {
            let lhs = binomial_norm(&f.pow(big_n), big_n)?.powi(2);
            worst = worst.max(lhs - h2.powi(big_n as i32));
        }
    }
    Ok((worst <= 1e-9, format!("{count} functions x N in 1..=3, max excess {worst:.2e}")))
}

fn flat_certificate(cfg: &SuiteConfig) -> Check {
    let ocfg = oracle_cfg(cfg, 9);
    let mut bad = Vec::new();
    let mut slack = f64::INFINITY;
    for a in [0.0, -0.5, -1.0] {
        let x = SpaceSpec::hilbert(a)?;
        for n in [2usize, 4, 8] {
            let m = half_index(n);
            let cert = 0.5 * (n as f64).powf(-0.5) * (0..=m).map(|k| ((k + 1) as f64).powf(-a)).sum::<f64>();
            let sigma = Sigma::one_point(Complex64::new(0.0, 0.0), n)?;
            let est = oracle::interp_constant_estimate(&sigma, &x, &ocfg)?.value;
            slack = slack.min(est - cert);
            if cert > est + 1e-6 {
                bad.push(format!("(n={n}, alpha={a}): {cert:.4} > {est:.4}"));
            }
        }
    }
    Ok((bad.is_empty(), format!("9 cases, min slack {slack:.3e}{}", first(&bad))))
}

fn witness_positivity() -> Check {
    let mut negative = 0;
    let mut worst = 0.0f64;
    for big_n in 1..=3 {
        for n in 2..=16 {
            for r in [0.0, 0.5, 0.9] {
                let psi = bounds::onepoint_witness(n, r, big_n);
                negative += psi.coeffs().iter().filter(|c| c.re < 0.0 || c.im != 0.0).count();
                let sum: f64 = psi.coeffs().iter().map(|c| c.re).sum();
                let want = bounds::onepoint_witness_at_one(n, r, big_n);
                worst = worst.max((sum - want).abs() / want);
            }
        }
    }
    Ok((negative == 0 && worst <= 1e-10, format!("135 witnesses, {negative} negative coefficients, max relative defect {worst:.1e}")))
}
