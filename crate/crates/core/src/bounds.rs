//! Certified bounds on the interpolation constants `c(sigma, l_a^p(alpha), H^inf)`
//! and `C_{n,r}`: explicit upper chains and witness-based lower certificates.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;

use crate::blaschke::{apply_first_order, Sigma};
use crate::error::{Error, Result};
use crate::interpolator::sup_norm;
use crate::oracle::{self, OracleConfig};
use crate::spaces::{SpaceSpec, TaylorSeries};
use crate::tail;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `K_N = max(N^N, (N+1)^N / N!)`, with `K_0 = 1`.
pub fn k_constant(n: u32) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let nf = n as f64;
    nf.powi(n as i32).max((nf + 1.0).powi(n as i32) / factorial(n))
}

/// Hilbert chain constant `A(N) = sqrt(2) K_N (1 + (N!)^2 4^(2N))^(1/2)`.
pub fn a_hilbert_int(n: u32) -> f64 {
    SQRT_2 * k_constant(n) * (1.0 + factorial(n).powi(2) * 16f64.powi(n as i32)).sqrt()
}

/// `p = 1` chain constant `A_1(N) = 2 sqrt(2) N! 4^N K_N`.
pub fn a_one_int(n: u32) -> f64 {
    2.0 * SQRT_2 * factorial(n) * 4f64.powi(n as i32) * k_constant(n)
}

/// `p = inf` chain value at `x = n/(1-r)`:
/// `K_N pi (3x + 1 + (N+1)! (4x)^(N+1) + N!) sqrt(2x)`.
pub fn infinity_chain_int(n: u32, x: f64) -> f64 {
    k_constant(n)
        * PI
        * (3.0 * x + 1.0 + factorial(n + 1) * (4.0 * x).powi(n as i32 + 1) + factorial(n))
        * (2.0 * x).sqrt()
}

/// Geometric interpolation between integer orders: for `N = ceil(-alpha)`
/// and `theta = 1 - alpha - N` returns `g(N-1)^(1-theta) g(N)^theta`.
fn theta_product(alpha: f64, g: impl Fn(u32) -> f64) -> f64 {
    let n = (-alpha).ceil();
    if n == -alpha {
        return g(n as u32);
    }
    let theta = 1.0 - alpha - n;
    let n = n as u32;
    g(n - 1).powf(1.0 - theta) * g(n).powf(theta)
}

/// `A(alpha)`; exact chain constant for integer `-alpha`.
pub fn a_hilbert(alpha: f64) -> f64 {
    theta_product(alpha, a_hilbert_int)
}

fn check_nr(n: usize, r: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("radius r = {r} must lie in [0, 1)")));
    }
    Ok(n as f64 / (1.0 - r))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_nan() || alpha > 0.0 {
        return Err(Error::Domain(format!("alpha = {alpha} must be <= 0")));
    }
    Ok(())
}

/// `A(alpha) (n/(1-r))^((1-2 alpha)/2)`, an upper bound on `C_{n,r}(l_a^2(alpha), H^inf)`.
pub fn upper_hilbert(n: usize, r: f64, alpha: f64) -> Result<f64> {
    let x = check_nr(n, r)?;
    check_alpha(alpha)?;
    Ok(a_hilbert(alpha) * x.powf((1.0 - 2.0 * alpha) / 2.0))
}

/// Upper bound on `C_{n,r}(l_a^p(alpha), H^inf)` obtained by interpolating
/// the `p = 1`, `p = 2` and `p = inf` chain values.
pub fn upper_p(n: usize, r: f64, x: &SpaceSpec) -> Result<f64> {
    let (p, alpha) = (x.p(), x.alpha());
    if p == 2.0 {
        return upper_hilbert(n, r, alpha);
    }
    let xr = check_nr(n, r)?;
    let two = upper_hilbert(n, r, alpha)?;
    if p < 2.0 {
        let one = theta_product(alpha, a_one_int) * xr.powf((1.0 - 2.0 * alpha) / 2.0);
        let t = 2.0 * (1.0 - 1.0 / p);
        Ok(one.powf(1.0 - t) * two.powf(t))
    } else {
        let inf = theta_product(alpha, |k| infinity_chain_int(k, xr));
        let t = if p.is_infinite() { 1.0 } else { 1.0 - 2.0 / p };
        Ok(two.powf(1.0 - t) * inf.powf(t))
    }
}

/// Growth exponent of the upper chain in `n/(1-r)`.
pub fn upper_exponent(x: &SpaceSpec) -> f64 {
    let a = x.alpha();
    if x.p() <= 2.0 {
        (1.0 - 2.0 * a) / 2.0
    } else {
        1.5 - a - 2.0 / x.p()
    }
}

fn upper_route(x: &SpaceSpec) -> &'static str {
    if x.p() == 2.0 {
        "hilbert chain"
    } else if x.p() < 2.0 {
        "interpolated p=1/p=2 chains"
    } else {
        "interpolated p=2/p=inf chains"
    }
}

/// `m` with `2m = n` for even `n` and `2m - 1 = n` for odd `n`.
pub fn half_index(n: usize) -> usize {
    n.div_ceil(2)
}

/// Coefficient `j >= 0` of `F_n = Phi_m + z^m Phi_m`, set to zero for `j >= n`.
pub fn fejer_coefficient(n: usize, j: usize) -> f64 {
    if j >= n {
        return 0.0;
    }
    let m = half_index(n) as f64;
    let j = j as f64;
    (1.0 - j / (m + 1.0)).max(0.0) + (1.0 - (j - m).abs() / (m + 1.0)).max(0.0)
}

/// Coefficient `j` (any sign) of the truncated kernel.
fn fejer_coefficient_signed(n: usize, j: i64) -> f64 {
    if j >= 0 {
        return fejer_coefficient(n, j as usize);
    }
    let m = half_index(n) as f64;
    let j = j as f64;
    (1.0 - j.abs() / (m + 1.0)).max(0.0) + (1.0 - (j - m).abs() / (m + 1.0)).max(0.0)
}

/// Certified upper bound on the `L^1(T)` mass (normalized measure) of the
/// truncated kernel: grid average plus a Lipschitz correction.
pub fn fejer_l1_upper(n: usize) -> f64 {
    let m = half_index(n) as i64;
    let coeffs: Vec<(i64, f64)> =
        (-(m + 1)..n as i64).map(|j| (j, fejer_coefficient_signed(n, j))).filter(|c| c.1 != 0.0).collect();
    let lipschitz: f64 = coeffs.iter().map(|(j, c)| j.abs() as f64 * c).sum();
    let samples = 1usize << 14;
    let h = 2.0 * PI / samples as f64;
    let avg = (0..samples)
        .map(|i| {
            let t = i as f64 * h;
            coeffs.iter().map(|&(j, c)| Complex64::from_polar(c, j as f64 * t)).sum::<Complex64>().norm()
        })
        .sum::<f64>()
        / samples as f64;
    avg + PI * lipschitz / samples as f64
}

/// `1/2 sup_theta |(g * F_n)(e^{i theta})|`, a lower bound on the quotient
/// norm `||g||_{H^inf / z^n H^inf}`.
pub fn fejer_quotient_lower(g: &TaylorSeries, n: usize) -> f64 {
    let h: Vec<Complex64> =
        g.coeffs().iter().take(n).enumerate().map(|(j, c)| c * fejer_coefficient(n, j)).collect();
    if h.iter().all(|c| *c == ZERO) {
        return 0.0;
    }
    let h = TaylorSeries::new(h).expect("finite coefficients");
    let samples = (64 * n).max(4096);
    0.5 * sup_norm(|z| h.eval(z), samples).refined
}

#[derive(Debug, Clone, Serialize)]
pub struct OnePointLower {
    /// Certified lower bound on `c(sigma_{n,lambda}, l_a^2((1-N)/2), H^inf)`.
    pub value: f64,
    /// Quotient-norm certificate `1/2 sup |psi * F_n|`.
    pub certificate: f64,
    /// `1/2 sum_{j <= min(m, n-1)} psi_j`, dominated by `certificate`.
    pub partial_sum: f64,
    /// Certified upper bound on `||Psi||_X`.
    pub witness_norm: f64,
    /// Polynomial `psi` with nonnegative coefficients.
    pub psi: TaylorSeries,
    /// Taylor expansion of `Psi(z) = psi(conj(u) (z - lambda)/(1 - conj(lambda) z))`, `u = lambda/|lambda|`.
    pub big_psi: TaylorSeries,
}

/// `psi_1 = 1 + (1+r)(z + ... + z^(n-1)) + r z^n`.
pub fn psi_one(n: usize, r: f64) -> TaylorSeries {
    let mut c = vec![1.0 + r; n + 1];
    c[0] = 1.0;
    c[n] = r;
    if n == 0 {
        c[0] = 1.0 + r;
    }
    TaylorSeries::from_real(&c).expect("finite")
}

/// `psi = n^(-N/2) (1-r^2)^(-N/2) psi_1^N`.
pub fn onepoint_witness(n: usize, r: f64, big_n: u32) -> TaylorSeries {
    let scale = ((n as f64) * (1.0 - r * r)).powf(-(big_n as f64) / 2.0);
    psi_one(n, r).pow(big_n).scale(Complex64::new(scale, 0.0))
}

/// Closed form of `psi(1)`: `b ((1+r) n)^N (1-r^2)^(-N/2)` with `b = n^(-N/2)`.
pub fn onepoint_witness_at_one(n: usize, r: f64, big_n: u32) -> f64 {
    let nn = big_n as i32;
    (n as f64).powf(-(big_n as f64) / 2.0) * ((1.0 + r) * n as f64).powi(nn) * (1.0 - r * r).powf(-(big_n as f64) / 2.0)
}

/// Lower bound for the one-point multiset `sigma_{n,lambda}` in
/// `l_a^2((1-N)/2)`, `N >= 1`.
pub fn lower_onepoint_hilbert(n: usize, lambda: Complex64, big_n: u32) -> Result<OnePointLower> {
    if big_n < 1 {
        return Err(Error::InvalidInput("N must be a positive integer".into()));
    }
    let r = lambda.norm();
    check_nr(n, r)?;
    let psi = onepoint_witness(n, r, big_n);
    let certificate = fejer_quotient_lower(&psi, n);
    let top = half_index(n).min(n - 1);
    let partial_sum = 0.5 * psi.coeffs()[..=top].iter().map(|c| c.re).sum::<f64>();

    let alpha = (1.0 - big_n as f64) / 2.0;
    let (big_psi, witness_norm) = compose_with_factor(&psi, r, alpha)?;
    let rot = if r > 0.0 { lambda / r } else { Complex64::new(1.0, 0.0) };
    // Psi_r(conj(u) z) moves the zero of the automorphism from r to lambda
    let mut w = Complex64::new(1.0, 0.0);
    let rotated: Vec<Complex64> = big_psi
        .coeffs()
        .iter()
        .map(|c| {
            let out = c * w;
            w *= rot.conj();
            out
        })
        .collect();
    Ok(OnePointLower {
        value: certificate / witness_norm,
        certificate,
        partial_sum,
        witness_norm,
        psi,
        big_psi: TaylorSeries::new(rotated)?,
    })
}

/// Taylor series of `psi((z - r)/(1 - r z))` and a certified upper bound on
/// its `l_a^2(alpha)` norm; `psi` must have nonnegative coefficients.
fn compose_with_factor(psi: &TaylorSeries, r: f64, alpha: f64) -> Result<(TaylorSeries, f64)> {
    let coeffs: Vec<f64> = psi.coeffs().iter().map(|c| c.re).collect();
    let eval_abs = |t: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
    let exponent = 2.0 * alpha;
    let len = if r == 0.0 {
        coeffs.len()
    } else {
        let floor = eval_abs(r).powi(2) * 1e-28;
        let mut best: Option<usize> = None;
        for i in 1..64 {
            let rho = 1.0 + (1.0 / r - 1.0) * i as f64 / 64.0;
            let beta = (rho + r) / (1.0 - r * rho);
            let ln_amp = 2.0 * eval_abs(beta).ln();
            if let Some(d) = tail::first_start_below(ln_amp, exponent, -2.0 * rho.ln(), floor, 1 << 22) {
                best = Some(best.map_or(d, |b: usize| b.min(d)));
            }
        }
        best.ok_or(Error::NotConverged { tol: floor, max_degree: 1 << 22 })?.max(coeffs.len())
    };
    let rr = Complex64::new(r, 0.0);
    let mut acc = vec![ZERO; len];
    for &c in coeffs.iter().rev() {
        acc = apply_first_order(&acc, -rr, Complex64::new(1.0, 0.0), rr);
        acc[0] += c;
    }
    let head: f64 = acc.iter().enumerate().map(|(k, c)| c.norm_sqr() * ((k + 1) as f64).powf(exponent)).sum();
    let tail = if r == 0.0 { 0.0 } else { eval_abs(r).powi(2) * 1e-28 };
    Ok((TaylorSeries::new(acc)?, (head + tail).sqrt() * (1.0 + 1e-14)))
}

/// `1/2 n^(-1/p) sum_{k <= min(m, n-1)} (k+1)^(-alpha)` and the witness
/// `n^(-1/p) sum_{k<n} (k+1)^(-alpha) z^k`.
pub fn lower_lp(n: usize, x: &SpaceSpec) -> Result<(f64, TaylorSeries)> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let pre = if x.p().is_infinite() { 1.0 } else { (n as f64).powf(-1.0 / x.p()) };
    let coeff = |k: usize| pre * ((k + 1) as f64).powf(-x.alpha());
    let top = half_index(n).min(n - 1);
    let value = 0.5 * (0..=top).map(coeff).sum::<f64>();
    let witness = TaylorSeries::new((0..n).map(|k| Complex64::new(coeff(k), 0.0)).collect())?;
    Ok((value, witness))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub r: f64,
    pub space: SpaceSpec,
    pub lower_certified: f64,
    pub lower_witness: String,
    pub oracle_estimate: Option<f64>,
    pub upper_certified: f64,
    pub upper_route: String,
}

impl BoundReport {
    pub fn exponent_expected(&self) -> f64 {
        upper_exponent(&self.space)
    }

    pub fn is_consistent(&self, tol: f64) -> bool {
        let ordered = self.lower_certified <= self.upper_certified + tol;
        match self.oracle_estimate {
            Some(o) => ordered && self.lower_certified <= o + tol && o <= self.upper_certified + tol,
            None => ordered,
        }
    }
}

/// Lower, optional oracle and upper values for `sigma_{n,r}` (one point `r`
/// of multiplicity `n`).
pub fn bound_report(n: usize, r: f64, x: &SpaceSpec, oracle: Option<&OracleConfig>) -> Result<BoundReport> {
    check_nr(n, r)?;
    let (mut lower, _) = lower_lp(n, x)?;
    let mut witness = "flat polynomial".to_string();
    if x.is_hilbert() {
        if let Some(big_n) = x.kernel_power() {
            let one = lower_onepoint_hilbert(n, Complex64::new(r, 0.0), big_n)?;
            if one.value > lower {
                lower = one.value;
                witness = format!("composed witness N={big_n}");
            }
        }
    }
    let oracle_estimate = match oracle {
        Some(cfg) => {
            let sigma = Sigma::one_point(Complex64::new(r, 0.0), n)?;
            Some(oracle::interp_constant_estimate(&sigma, x, cfg)?.value)
        }
        None => None,
    };
    Ok(BoundReport {
        n,
        r,
        space: *x,
        lower_certified: lower,
        lower_witness: witness,
        oracle_estimate,
        upper_certified: upper_p(n, r, x)?,
        upper_route: upper_route(x).to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: u64, k: u64) -> u128 {
        (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
    }

    #[test]
    fn k_constant_values() {
        assert_eq!(k_constant(0), 1.0);
        assert_eq!(k_constant(1), 2.0);
        assert_eq!(k_constant(2), 4.5);
        assert_eq!(k_constant(3), 27.0);
        assert_eq!(k_constant(4), 256.0);
    }

    #[test]
    fn hilbert_chain_examples() {
        assert!((a_hilbert(0.0) - 2.0).abs() < 1e-15);
        assert!((upper_hilbert(5, 0.2, 0.0).unwrap() - 2.0 * (5.0f64 / 0.8).sqrt()).abs() < 1e-12);
        let a1 = 2.0 * SQRT_2 * 17f64.sqrt();
        assert!((upper_hilbert(1, 0.0, -1.0).unwrap() - a1).abs() < 1e-12);
        // exponent 1 at alpha = -1/2
        let u1 = upper_hilbert(2, 0.5, -0.5).unwrap();
        let u2 = upper_hilbert(4, 0.5, -0.5).unwrap();
        assert!((u2 / u1 - 2.0).abs() < 1e-12);
        assert!((a_hilbert(-0.5) - (2.0 * a1).sqrt()).abs() < 1e-12);
        assert!(upper_hilbert(0, 0.5, 0.0).is_err());
        assert!(upper_hilbert(2, 1.0, 0.0).is_err());
        assert!(upper_hilbert(2, 0.5, 0.5).is_err());
    }

    #[test]
    fn p_chain_examples() {
        for (n, r, a) in [(3, 0.5, 0.0), (7, 0.9, -0.5), (1, 0.0, -1.0)] {
            let two = upper_p(n, r, &SpaceSpec::hilbert(a).unwrap()).unwrap();
            assert_eq!(two, upper_hilbert(n, r, a).unwrap());
        }
        let one = upper_p(1, 0.0, &SpaceSpec::new(1.0, 0.0).unwrap()).unwrap();
        assert!((one - 2.0 * SQRT_2).abs() < 1e-14);
        let inf = SpaceSpec::new(f64::INFINITY, 0.0).unwrap();
        let ratio = upper_p(200, 0.5, &inf).unwrap() / upper_p(100, 0.5, &inf).unwrap();
        assert!((ratio.log2() - 1.5).abs() < 0.05);
        assert_eq!(upper_exponent(&inf), 1.5);
        // continuity at p = 2 from both sides
        let base = upper_hilbert(4, 0.5, -0.3).unwrap();
        for p in [2.0 - 1e-9, 2.0 + 1e-9] {
            let v = upper_p(4, 0.5, &SpaceSpec::new(p, -0.3).unwrap()).unwrap();
            assert!((v / base - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn lower_lp_examples() {
        let (v, f) = lower_lp(2, &SpaceSpec::hardy()).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((crate::spaces::weighted_norm(&f, &SpaceSpec::hardy()) - 1.0).abs() < 1e-14);
        let (v, _) = lower_lp(4, &SpaceSpec::new(1.0, -1.0).unwrap()).unwrap();
        assert!((v - 0.75).abs() < 1e-15);
        let (v, _) = lower_lp(3, &SpaceSpec::new(f64::INFINITY, 0.0).unwrap()).unwrap();
        assert_eq!(v, 1.5);
        // a single point at the origin has constant exactly 1
        for a in [0.0, -0.5, -1.0] {
            assert!(lower_lp(1, &SpaceSpec::hilbert(a).unwrap()).unwrap().0 <= 1.0);
        }
    }

    #[test]
    fn fejer_examples() {
        for n in 1..12 {
            let m = half_index(n) as f64;
            let v = fejer_quotient_lower(&TaylorSeries::constant(Complex64::new(1.0, 0.0)), n);
            assert!((v - 0.5 * (1.0 + 1.0 / (m + 1.0))).abs() < 1e-12);
            let shifted = TaylorSeries::monomial(n, Complex64::new(1.0, 0.0));
            assert_eq!(fejer_quotient_lower(&shifted, n), 0.0);
            for j in 0..=half_index(n).min(n - 1) {
                assert!(fejer_coefficient(n, j) >= 1.0);
            }
        }
        let g = TaylorSeries::from_real(&[0.3, 1.0, 0.2, 0.7, 0.1]).unwrap();
        let sum: f64 = g.coeffs()[..=2].iter().map(|c| c.re).sum();
        assert!(fejer_quotient_lower(&g, 4) >= 0.5 * sum);
    }

    #[test]
    fn fejer_mass_at_most_two() {
        for n in 1..=64 {
            let l1 = fejer_l1_upper(n);
            assert!(l1 <= 2.0, "n={n}: {l1}");
        }
    }

    #[test]
    fn hockey_stick_identity_exact() {
        for big_n in 1..=6u64 {
            for m in 0..=64u64 {
                let sum: u128 = (0..=m).map(|j| binom(big_n - 1 + j, j)).sum();
                assert_eq!(sum, binom(big_n + m, m));
            }
        }
        assert_eq!(binom(5, 3), 10);
    }

    #[test]
    fn witness_positive_with_closed_form_sum() {
        for big_n in 1..=3 {
            for n in 2..=16 {
                for r in [0.0, 0.5, 0.9] {
                    let psi = onepoint_witness(n, r, big_n);
                    assert!(psi.coeffs().iter().all(|c| c.re >= 0.0 && c.im == 0.0));
                    let s: f64 = psi.coeffs().iter().map(|c| c.re).sum();
                    let want = onepoint_witness_at_one(n, r, big_n);
                    assert!((s - want).abs() <= 1e-12 * want);
                }
            }
        }
        let p1 = psi_one(5, 0.3);
        assert!((p1.eval(Complex64::new(1.0, 0.0)).re - 1.3 * 5.0).abs() < 1e-14);
    }

    #[test]
    fn onepoint_origin_example() {
        for n in 1..=9 {
            let low = lower_onepoint_hilbert(n, Complex64::new(0.0, 0.0), 1).unwrap();
            let m = half_index(n).min(n - 1);
            let want = 0.5 * (m + 1) as f64 / (n as f64).sqrt();
            assert!((low.partial_sum - want).abs() < 1e-14);
            assert!((low.witness_norm - 1.0).abs() < 1e-12);
            assert!(low.certificate >= low.partial_sum - 1e-14);
        }
    }

    #[test]
    fn onepoint_composition_matches_direct_evaluation() {
        let lambda = Complex64::new(0.3, 0.5);
        let low = lower_onepoint_hilbert(4, lambda, 2).unwrap();
        let u = lambda / lambda.norm();
        let b = |z: Complex64| u.conj() * (z - lambda) / (Complex64::new(1.0, 0.0) - lambda.conj() * z);
        for z in [Complex64::new(0.1, 0.2), Complex64::new(-0.4, 0.0), Complex64::new(0.0, 0.6)] {
            let direct = low.psi.eval(b(z));
            assert!((low.big_psi.eval(z) - direct).norm() < 1e-9 * direct.norm().max(1.0));
        }
        let x = SpaceSpec::hilbert(-0.5).unwrap();
        let norm = crate::spaces::weighted_norm(&low.big_psi, &x);
        assert!(norm <= low.witness_norm && low.witness_norm <= norm * (1.0 + 1e-10));
    }

    #[test]
    fn onepoint_monotone_in_r() {
        for big_n in 1..=3 {
            let mut prev = 0.0;
            for r in [0.0, 0.3, 0.5, 0.7, 0.9] {
                let v = lower_onepoint_hilbert(6, Complex64::new(r, 0.0), big_n).unwrap().value;
                assert!(v >= prev - 1e-12, "N={big_n} r={r}: {v} < {prev}");
                prev = v;
            }
        }
        assert!(lower_onepoint_hilbert(3, Complex64::new(0.2, 0.0), 0).is_err());
    }

    #[test]
    fn report_without_oracle_is_ordered() {
        for a in [0.0, -0.5, -1.0, -0.25] {
            for n in [1, 2, 4, 8] {
                for r in [0.0, 0.5, 0.9] {
                    let rep = bound_report(n, r, &SpaceSpec::hilbert(a).unwrap(), None).unwrap();
                    assert!(rep.is_consistent(0.0), "{rep:?}");
                }
            }
        }
    }
}
