//! Bernstein-type inequalities on model spaces: `||g'|| <= 3n/(1-r) ||g||`
//! and `||g^(k)|| <= k! 4^k (n/(1-r))^k ||g||` in `H^2`, checked numerically.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::blaschke::{MalmquistBasis, MalmquistRep, Sigma};
use crate::error::{Error, Result};
use crate::sampling::{random_sigma, random_unit_rep};
use crate::derived_rng;

/// Truncation target for derivative norms.
pub const DERIVATIVE_TAIL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifiedNorm {
    /// Norm of the truncated expansion.
    pub value: f64,
    /// Certified bound on the norm of the discarded tail.
    pub tail: f64,
}

impl CertifiedNorm {
    pub fn upper(&self) -> f64 {
        self.value + self.tail
    }
}

/// `(j)(j-1)...(j-k+1)`.
fn falling(j: usize, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (j as f64 - i as f64))
}

/// `||g^(k)||_{H^2}` with a certified truncation tail below [`DERIVATIVE_TAIL_TOL`].
pub fn h2_derivative_norm(g: &MalmquistRep, k: u32) -> Result<CertifiedNorm> {
    if k == 0 {
        return Ok(CertifiedNorm { value: g.h2_norm(), tail: 0.0 });
    }
    let d = g.basis().certified_degree(g.coords(), k as f64, DERIVATIVE_TAIL_TOL)?;
    let series = g.taylor(d + 1);
    let head: f64 = series
        .coeffs()
        .iter()
        .enumerate()
        .skip(k as usize)
        .map(|(j, c)| c.norm_sqr() * falling(j, k).powi(2))
        .sum();
    Ok(CertifiedNorm { value: head.sqrt(), tail: DERIVATIVE_TAIL_TOL })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioReport {
    /// Certified upper estimate of `||g^(k)|| / ||g||`.
    pub ratio: f64,
    pub bound: f64,
    /// `bound - ratio`.
    pub margin: f64,
    pub pass: bool,
}

impl RatioReport {
    fn new(ratio: f64, bound: f64) -> Self {
        Self { ratio, bound, margin: bound - ratio, pass: ratio <= bound }
    }
}

fn n_over_gap(sigma: &Sigma) -> f64 {
    sigma.n() as f64 / (1.0 - sigma.r())
}

/// `||g'|| / ||g||` against `3n/(1-r)`.
pub fn check_dyakonov(sigma: &Sigma, g: &MalmquistRep) -> Result<RatioReport> {
    let norm = g.h2_norm();
    if norm == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let d = h2_derivative_norm(g, 1)?;
    Ok(RatioReport::new(d.upper() / norm, 3.0 * n_over_gap(sigma)))
}

/// `k! 4^k (n/(1-r))^k`.
pub fn higher_bound(sigma: &Sigma, k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64 * 4.0 * n_over_gap(sigma))
}

/// `||g^(k)|| / ||g||` against `k! 4^k (n/(1-r))^k`.
pub fn check_higher(sigma: &Sigma, g: &MalmquistRep, k: u32) -> Result<RatioReport> {
    let norm = g.h2_norm();
    if norm == 0.0 {
        return Err(Error::ZeroFunction);
    }
    if k == 0 {
        return Ok(RatioReport::new(1.0, 1.0));
    }
    let d = h2_derivative_norm(g, k)?;
    Ok(RatioReport::new(d.upper() / norm, higher_bound(sigma, k)))
}

/// Exact norm of `D^k` restricted to `K_B`: the square root of the largest
/// eigenvalue of the Gram matrix `<e_l^(k), e_i^(k)>`.
pub fn derivative_operator_norm(sigma: &Sigma, k: u32) -> Result<f64> {
    let basis = MalmquistBasis::new(sigma);
    let n = basis.len();
    let mut d = 0;
    for i in 0..n {
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        c[i] = Complex64::new(1.0, 0.0);
        d = d.max(basis.certified_degree(&c, k as f64, 1e-12)?);
    }
    let series = basis.expand_about(Complex64::new(0.0, 0.0), d + 1);
    let w: Vec<f64> = (0..=d).map(|j| falling(j, k).powi(2)).collect();
    let gram = DMatrix::from_fn(n, n, |i, l| {
        (0..=d).map(|j| series[l][j] * series[i][j].conj() * w[j]).sum::<Complex64>()
    });
    let top = gram.symmetric_eigenvalues().max();
    Ok(top.max(0.0).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BernsteinTrial {
    pub trial: usize,
    pub n: usize,
    pub r: f64,
    pub k: u32,
    pub ratio: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinConfig {
    /// Fixed `n`, or random in `1..=max_n` when `None`.
    pub n: Option<usize>,
    pub max_n: usize,
    /// Points are drawn in the disc of this radius.
    pub r: f64,
    pub trials: usize,
    /// Derivative orders; `k = 1` is checked against `3n/(1-r)`.
    pub orders: Vec<u32>,
    pub seed: u64,
}

impl Default for BernsteinConfig {
    fn default() -> Self {
        Self { n: None, max_n: 10, r: 0.95, trials: 200, orders: vec![1, 2, 3], seed: 0 }
    }
}

/// Monte-Carlo run over random `(sigma, g)`; one row per trial and order.
/// Each trial uses its own generator derived from the master seed.
pub fn run_trials(cfg: &BernsteinConfig) -> Result<Vec<BernsteinTrial>> {
    let rows: Result<Vec<Vec<BernsteinTrial>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = derived_rng(cfg.seed, trial as u64);
            let sigma = match cfg.n {
                Some(n) => {
                    let s = random_sigma(&mut rng, n, cfg.r);
                    pad_to(&s, n, &mut rng, cfg.r)
                }
                None => random_sigma(&mut rng, cfg.max_n, cfg.r),
            };
            let g = random_unit_rep(&mut rng, &sigma);
            cfg.orders
                .iter()
                .map(|&k| {
                    let rep = if k == 1 { check_dyakonov(&sigma, &g)? } else { check_higher(&sigma, &g, k)? };
                    Ok(BernsteinTrial {
                        trial,
                        n: sigma.n(),
                        r: sigma.r(),
                        k,
                        ratio: rep.ratio,
                        bound: rep.bound,
                        margin: rep.margin,
                        pass: rep.pass,
                    })
                })
                .collect()
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

fn pad_to(s: &Sigma, n: usize, rng: &mut crate::Rng, r: f64) -> Sigma {
    let mut pts: Vec<(Complex64, usize)> = s.points().iter().map(|p| (p.lambda(), p.mult)).collect();
    let have = s.n();
    if have < n {
        pts.push((crate::sampling::disc_point(rng, r), n - have));
    }
    Sigma::new(pts).expect("padded points lie in the disc")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpeningFit {
    pub k: u32,
    pub exponent: f64,
    /// Soft expectation `exponent >= 0.8 k`; a miss is reported, not fatal.
    pub meets_expectation: bool,
}

/// Least-squares exponent of `||D^k||_{K_B -> H^2}` against `n/(1-r)` over
/// one-point families `sigma_{n,r}`.
pub fn sharpening_exponent(k: u32, ns: &[usize], rs: &[f64]) -> Result<SharpeningFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &n in ns {
        for &r in rs {
            let s = Sigma::one_point(Complex64::new(r, 0.0), n)?;
            xs.push((n as f64 / (1.0 - r)).ln());
            ys.push(derivative_operator_norm(&s, k)?.ln());
        }
    }
    let exponent = least_squares_slope(&xs, &ys);
    Ok(SharpeningFit { k, exponent, meets_expectation: exponent >= 0.8 * k as f64 })
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::MalmquistRep;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn derivative_norm_examples() {
        let s = Sigma::one_point(c(0.0, 0.0), 1).unwrap();
        let one = MalmquistRep::basis_element(&s, 0).unwrap();
        assert_eq!(h2_derivative_norm(&one, 1).unwrap().value, 0.0);

        for r in [0.3, 0.9] {
            let s = Sigma::one_point(c(r, 0.0), 1).unwrap();
            let e1 = MalmquistRep::basis_element(&s, 0).unwrap();
            let d = h2_derivative_norm(&e1, 1).unwrap();
            let exact = r * (1.0 + r * r).sqrt() / (1.0 - r * r);
            assert!((d.value - exact).abs() < 1e-9, "r={r}: {} vs {exact}", d.value);
        }

        let s = Sigma::new([(c(0.5, 0.5), 2), (c(-0.2, 0.0), 1)]).unwrap();
        let e2 = MalmquistRep::basis_element(&s, 1).unwrap();
        assert_eq!(h2_derivative_norm(&e2, 0).unwrap().value, 1.0);
    }

    #[test]
    fn closed_form_oracle_for_first_basis_element() {
        // sum_j (1-r^2) r^(2j) j^2 = r^2 (1+r^2) / (1-r^2)^2, summed by brute force
        for r in [0.2f64, 0.6, 0.9] {
            let brute: f64 = (0..20_000).map(|j| (1.0 - r * r) * r.powi(2 * j) * (j as f64).powi(2)).sum();
            let closed = (r * (1.0 + r * r).sqrt() / (1.0 - r * r)).powi(2);
            assert!((brute - closed).abs() < 1e-10 * closed);
        }
    }

    #[test]
    fn dyakonov_examples() {
        let n = 6;
        let s = Sigma::one_point(c(0.0, 0.0), n).unwrap();
        // z^(n-1) = (-1)^(n-1) e_n
        let g = MalmquistRep::basis_element(&s, n - 1).unwrap();
        let rep = check_dyakonov(&s, &g).unwrap();
        assert!((rep.ratio - (n - 1) as f64).abs() < 1e-9);
        assert!(rep.pass && rep.bound == 18.0);

        let s = Sigma::one_point(c(0.9, 0.0), 1).unwrap();
        let rep = check_dyakonov(&s, &MalmquistRep::basis_element(&s, 0).unwrap()).unwrap();
        assert!((rep.ratio - 6.3728).abs() < 1e-3, "ratio {}", rep.ratio);
        assert!((rep.bound - 30.0).abs() < 1e-12);
        assert!(rep.pass);

        let zero = MalmquistRep::new(&s, vec![c(0.0, 0.0)]).unwrap();
        assert!(matches!(check_dyakonov(&s, &zero), Err(Error::ZeroFunction)));
    }

    #[test]
    fn higher_examples() {
        let n = 5;
        let s = Sigma::one_point(c(0.0, 0.0), n).unwrap();
        let g = MalmquistRep::basis_element(&s, n - 1).unwrap();
        let rep0 = check_higher(&s, &g, 0).unwrap();
        assert_eq!((rep0.ratio, rep0.bound, rep0.pass), (1.0, 1.0, true));
        let rep2 = check_higher(&s, &g, 2).unwrap();
        assert!((rep2.ratio - ((n - 1) * (n - 2)) as f64).abs() < 1e-8);
        assert!((rep2.bound - 2.0 * 16.0 * (n * n) as f64).abs() < 1e-9);
    }

    #[test]
    fn operator_norm_dominates_random_samples() {
        let s = Sigma::new([(c(0.7, 0.1), 2), (c(-0.4, 0.3), 2)]).unwrap();
        let top = derivative_operator_norm(&s, 1).unwrap();
        let mut rng = derived_rng(3, 0);
        for _ in 0..20 {
            let g = random_unit_rep(&mut rng, &s);
            assert!(h2_derivative_norm(&g, 1).unwrap().value <= top + 1e-9);
        }
    }

    #[test]
    fn monte_carlo_is_deterministic_and_passes() {
        let cfg = BernsteinConfig { trials: 12, seed: 11, ..Default::default() };
        let a = run_trials(&cfg).unwrap();
        let b = run_trials(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 36);
        assert!(a.iter().all(|t| t.pass));
        let fixed = BernsteinConfig { n: Some(7), trials: 4, orders: vec![1], ..Default::default() };
        assert!(run_trials(&fixed).unwrap().iter().all(|t| t.n == 7));
    }
}
