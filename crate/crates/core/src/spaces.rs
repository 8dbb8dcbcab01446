//! Weighted coefficient spaces `l_a^p(alpha)`, their norms and duals, and the
//! reproducing kernels of the Hilbert members of the scale.
//!
//! Every analytic function in the crate is carried as a [`TaylorSeries`]: a
//! finite vector of complex Taylor coefficients at the origin.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tail;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Truncation target for the tail of the evaluation functional series.
pub const EVAL_TAIL_TOL: f64 = 1e-12;

/// Finite Taylor expansion `sum_k c_k z^k`.
#[derive(Clone, PartialEq, Default)]
pub struct TaylorSeries {
    coeffs: Vec<Complex64>,
}

impl TaylorSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if let Some(k) = coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidInput(format!("coefficient {k} is not finite")));
        }
        Ok(Self { coeffs })
    }

    /// Builds a series from coefficients already known to be finite.
    pub(crate) fn from_vec(coeffs: Vec<Complex64>) -> Self {
        debug_assert!(coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()));
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn monomial(k: usize, c: Complex64) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = c;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Number of stored coefficients (trailing zeros included).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient `k`, zero past the stored range.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    /// Largest index with a nonzero coefficient; `None` for the zero series.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Taylor coefficients of `h -> f(center + h)` up to `h^(len-1)`,
    /// i.e. `f^(j)(center) / j!` for `j < len`.
    pub fn jet(&self, center: Complex64, len: usize) -> Vec<Complex64> {
        // repeated synthetic division by (z - center)
        let mut work: Vec<Complex64> = self.coeffs.clone();
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            if work.is_empty() {
                out.push(ZERO);
                continue;
            }
            let mut carry = ZERO;
            for c in work.iter_mut().rev() {
                carry = carry * center + *c;
                *c = carry;
            }
            // work[0] now holds the remainder, work[1..] the quotient
            out.push(work[0]);
            work.remove(0);
        }
        out
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        Self { coeffs }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&x| x * c).collect() }
    }

    /// Keeps the first `len` coefficients.
    pub fn truncated(&self, len: usize) -> Self {
        Self { coeffs: self.coeffs.iter().take(len).copied().collect() }
    }

    /// Product truncated to `len` coefficients.
    pub fn mul_truncated(&self, other: &Self, len: usize) -> Self {
        let mut out = vec![ZERO; len.min(self.len() + other.len())];
        for (i, &a) in self.coeffs.iter().enumerate().take(len) {
            if a == ZERO {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if i + j >= out.len() {
                    break;
                }
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(ONE);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }
}

impl fmt::Debug for TaylorSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

impl Add for &TaylorSeries {
    type Output = TaylorSeries;
    fn add(self, rhs: &TaylorSeries) -> TaylorSeries {
        let len = self.len().max(rhs.len());
        TaylorSeries { coeffs: (0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect() }
    }
}

impl Sub for &TaylorSeries {
    type Output = TaylorSeries;
    fn sub(self, rhs: &TaylorSeries) -> TaylorSeries {
        let len = self.len().max(rhs.len());
        TaylorSeries { coeffs: (0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect() }
    }
}

impl Neg for &TaylorSeries {
    type Output = TaylorSeries;
    fn neg(self) -> TaylorSeries {
        self.scale(-ONE)
    }
}

impl Mul for &TaylorSeries {
    type Output = TaylorSeries;
    fn mul(self, rhs: &TaylorSeries) -> TaylorSeries {
        if self.is_empty() || rhs.is_empty() {
            return TaylorSeries::zero();
        }
        self.mul_truncated(rhs, self.len() + rhs.len() - 1)
    }
}

// JSON form: array of [re, im] pairs.
impl Serialize for TaylorSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TaylorSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        TaylorSeries::new(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .map_err(serde::de::Error::custom)
    }
}

/// Selects `X = l_a^p(alpha)`: `||f||^p = sum_k |f_k|^p (k+1)^(p alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    p: f64,
    alpha: f64,
}

impl SpaceSpec {
    pub fn new(p: f64, alpha: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidInput(format!("p = {p} must lie in [1, inf]")));
        }
        if !alpha.is_finite() || alpha > 0.0 {
            return Err(Error::InvalidInput(format!("alpha = {alpha} must be finite and <= 0")));
        }
        Ok(Self { p, alpha })
    }

    /// `l_a^2(alpha)`.
    pub fn hilbert(alpha: f64) -> Result<Self> {
        Self::new(2.0, alpha)
    }

    /// `H^2 = l_a^2(0)`.
    pub fn hardy() -> Self {
        Self { p: 2.0, alpha: 0.0 }
    }

    /// The unweighted Bergman space `L_a^2 = l_a^2(-1/2)`.
    pub fn bergman() -> Self {
        Self { p: 2.0, alpha: -0.5 }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn is_hilbert(&self) -> bool {
        self.p == 2.0
    }

    /// Hölder conjugate `p'` with `1/p + 1/p' = 1`.
    pub fn dual_exponent(&self) -> f64 {
        conjugate_exponent(self.p)
    }

    /// Bergman weight exponent `beta = -2 alpha - 1` of the Hilbert case.
    pub fn beta(&self) -> Result<f64> {
        if !self.is_hilbert() {
            return Err(Error::UnsupportedSpace("beta is defined for p = 2 only".into()));
        }
        alpha_to_beta(self.alpha)
    }

    /// `N = 1 - 2 alpha` when it is a positive integer.
    pub fn kernel_power(&self) -> Option<u32> {
        let n = 1.0 - 2.0 * self.alpha;
        (n.fract() == 0.0 && n >= 1.0 && n < u32::MAX as f64).then_some(n as u32)
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_infinite() {
            write!(f, "l_a^inf({})", self.alpha)
        } else {
            write!(f, "l_a^{}({})", self.p, self.alpha)
        }
    }
}

pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// `l^q` norm of the sequence `|c_k| (k+1)^e`.
pub(crate) fn weighted_lq(coeffs: &[Complex64], q: f64, e: f64) -> f64 {
    let terms = coeffs.iter().enumerate().map(|(k, c)| c.norm() * ((k + 1) as f64).powf(e));
    lq_norm(terms, q)
}

fn lq_norm(terms: impl Iterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        return terms.fold(0.0, f64::max);
    }
    let terms: Vec<f64> = terms.collect();
    let scale = terms.iter().copied().fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = terms.iter().map(|t| (t / scale).powf(q)).sum();
    scale * sum.powf(1.0 / q)
}

/// `||f||_X`, exact on finite series.
pub fn weighted_norm(f: &TaylorSeries, x: &SpaceSpec) -> f64 {
    weighted_lq(f.coeffs(), x.p, x.alpha)
}

/// Norm of a coefficient functional `f -> sum_k f_k c_k` on `X`, i.e. the
/// `l^{p'}(-alpha)` norm of `c`.
pub fn dual_norm(c: &[Complex64], x: &SpaceSpec) -> f64 {
    weighted_lq(c, x.dual_exponent(), -x.alpha)
}

/// Unit-norm maximizer of `Re sum_k f_k c_k` over the unit ball of `X`.
///
/// Returns `(value, f)` with `value = dual_norm(c, x)`.
pub fn holder_extremal(c: &[Complex64], x: &SpaceSpec) -> (f64, TaylorSeries) {
    let value = dual_norm(c, x);
    let mut f = vec![ZERO; c.len()];
    if value == 0.0 {
        if !f.is_empty() {
            f[0] = ONE;
        }
        return (0.0, TaylorSeries::from_vec(f));
    }
    let q = x.dual_exponent();
    // g_k = f_k (k+1)^alpha lives in the unit ball of l^p; b_k = c_k (k+1)^(-alpha)
    let b: Vec<Complex64> =
        c.iter().enumerate().map(|(k, &ck)| ck * ((k + 1) as f64).powf(-x.alpha)).collect();
    if q.is_infinite() {
        let (k, bk) = b
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .expect("nonzero functional");
        f[k] = bk.conj() / bk.norm() * ((k + 1) as f64).powf(-x.alpha);
    } else {
        for (k, bk) in b.iter().enumerate() {
            let m = bk.norm();
            if m == 0.0 {
                continue;
            }
            let g = bk.conj() / m * (m / value).powf(q - 1.0);
            f[k] = g * ((k + 1) as f64).powf(-x.alpha);
        }
    }
    (value, TaylorSeries::from_vec(f))
}

/// Norm of the evaluation functional `f -> f(t)` on `X`.
///
/// Sums `||(t^k (k+1)^(-alpha))_k||_{p'}` until a certified tail bound falls
/// below [`EVAL_TAIL_TOL`] relative to the partial sum.
pub fn eval_functional_norm(t: f64, x: &SpaceSpec) -> Result<f64> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::Domain(format!("evaluation point t = {t} must lie in [0, 1)")));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let a = -x.alpha;
    let term = |k: usize| t.powi(k as i32) * ((k + 1) as f64).powf(a);
    let q = x.dual_exponent();
    if q.is_infinite() {
        // the ratio of consecutive terms decreases in k: stop at its first drop below one
        let mut k = 0usize;
        let mut best = term(0);
        loop {
            let next = term(k + 1);
            if next <= term(k) {
                return Ok(best.max(next));
            }
            best = next;
            k += 1;
        }
    }
    // sum_k t^(qk) (k+1)^(aq)
    let ln_decay = q * t.ln();
    let exponent = a * q;
    let mut sum = 0.0;
    let mut k = 0usize;
    loop {
        sum += (exponent * ((k + 1) as f64).ln() + ln_decay * k as f64).exp();
        k += 1;
        if k.is_multiple_of(16) {
            let tail = tail::poly_geometric_tail_ln(0.0, exponent, ln_decay, k);
            if tail <= EVAL_TAIL_TOL * sum {
                return Ok((sum + tail).powf(1.0 / q));
            }
        }
        if k > 50_000_000 {
            return Err(Error::NotConverged { tol: EVAL_TAIL_TOL, max_degree: k });
        }
    }
}

/// Reproducing kernel `k_lambda(z) = sum_k conj(lambda)^k z^k / (k+1)^(2 alpha)`
/// of `l_a^2(alpha)`, truncated at degree `degree`.
pub fn reproducing_kernel(
    lambda: Complex64,
    x: &SpaceSpec,
    degree: usize,
) -> Result<TaylorSeries> {
    if !x.is_hilbert() {
        return Err(Error::UnsupportedSpace(format!("{x} is not a Hilbert space")));
    }
    if lambda.norm() >= 1.0 {
        return Err(Error::Domain(format!("|lambda| = {} >= 1", lambda.norm())));
    }
    let lc = lambda.conj();
    let mut pow = ONE;
    let coeffs = (0..=degree)
        .map(|k| {
            let c = pow * ((k + 1) as f64).powf(-2.0 * x.alpha);
            pow *= lc;
            c
        })
        .collect();
    Ok(TaylorSeries::from_vec(coeffs))
}

/// Cauchy sesquilinear form `<h, g> = sum_k h_k conj(g_k)`.
pub fn cauchy_pairing(h: &TaylorSeries, g: &TaylorSeries) -> Complex64 {
    h.coeffs().iter().zip(g.coeffs()).map(|(a, b)| a * b.conj()).sum()
}

/// Scalar product of `l_a^2(alpha)`: `sum_k f_k conj(g_k) (k+1)^(2 alpha)`.
pub fn weighted_pairing(f: &TaylorSeries, g: &TaylorSeries, alpha: f64) -> Complex64 {
    f.coeffs()
        .iter()
        .zip(g.coeffs())
        .enumerate()
        .map(|(k, (a, b))| a * b.conj() * ((k + 1) as f64).powf(2.0 * alpha))
        .sum()
}

/// `binom(k + n - 1, k)` in floating point.
pub fn binomial_weight(k: usize, n: u32) -> f64 {
    (1..n).fold(1.0, |acc, i| acc * (k as f64 + i as f64) / i as f64)
}

/// Norm of the space with kernel `(1 - conj(lambda) z)^(-n)`:
/// `(sum_k |f_k|^2 / binom(k+n-1, k))^(1/2)`.
pub fn binomial_norm(f: &TaylorSeries, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("kernel power must be >= 1".into()));
    }
    let s: f64 = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm_sqr() / binomial_weight(k, n))
        .sum();
    Ok(s.sqrt())
}

/// Bracket `[c1, c2]` with `c1 <= binomial_norm(f, n) / ||f||_{l_a^2((1-n)/2)} <= c2`
/// for every `f` of degree `<= degree`, from the extremal weight ratios.
pub fn binomial_equivalence_bracket(n: u32, degree: usize) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for k in 0..=degree {
        let ratio = ((k + 1) as f64).powi(n as i32 - 1) / binomial_weight(k, n);
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    (lo.sqrt(), hi.sqrt())
}

pub fn alpha_to_beta(alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha >= 0.0 {
        return Err(Error::Domain(format!("alpha = {alpha} must be < 0 (beta > -1)")));
    }
    Ok(-2.0 * alpha - 1.0)
}

pub fn beta_to_alpha(beta: f64) -> Result<f64> {
    if beta.is_nan() || beta <= -1.0 {
        return Err(Error::Domain(format!("beta = {beta} must be > -1")));
    }
    Ok(-(beta + 1.0) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn weighted_norm_examples() {
        let one = TaylorSeries::constant(ONE);
        for x in [SpaceSpec::hardy(), SpaceSpec::new(1.0, -2.0).unwrap(), SpaceSpec::new(f64::INFINITY, -1.0).unwrap()] {
            assert_eq!(weighted_norm(&one, &x), 1.0);
        }
        let z = TaylorSeries::monomial(1, ONE);
        assert!((weighted_norm(&z, &SpaceSpec::bergman()) - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn lower_bound_witness_has_unit_norm() {
        for &(p, alpha) in &[(1.0, 0.0), (2.0, -0.5), (3.0, -1.0), (f64::INFINITY, -0.7)] {
            let x = SpaceSpec::new(p, alpha).unwrap();
            for n in [1usize, 3, 8] {
                let scale = if p.is_infinite() { 1.0 } else { (n as f64).powf(-1.0 / p) };
                let f = TaylorSeries::new(
                    (0..n).map(|k| c(scale * ((k + 1) as f64).powf(-alpha), 0.0)).collect(),
                )
                .unwrap();
                assert!((weighted_norm(&f, &x) - 1.0).abs() < 1e-13, "p={p} alpha={alpha} n={n}");
            }
        }
    }

    #[test]
    fn eval_norm_closed_forms() {
        assert_eq!(eval_functional_norm(0.0, &SpaceSpec::bergman()).unwrap(), 1.0);
        for t in [0.1, 0.5, 0.9, 0.99] {
            let v = eval_functional_norm(t, &SpaceSpec::hardy()).unwrap();
            let exact = (1.0 - t * t).powf(-0.5);
            assert!((v - exact).abs() < 1e-10 * exact, "t={t}");
        }
        let v = eval_functional_norm(0.5, &SpaceSpec::bergman()).unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-12);
        assert!(matches!(eval_functional_norm(1.0, &SpaceSpec::hardy()), Err(Error::Domain(_))));
    }

    #[test]
    fn eval_norm_endpoints_p1_and_pinf() {
        // p = 1: sup_k t^k (k+1)^(-alpha); p = inf: sum_k t^k (k+1)^(-alpha)
        let x1 = SpaceSpec::new(1.0, -2.0).unwrap();
        let brute = (0..2000).map(|k| 0.9f64.powi(k) * ((k + 1) as f64).powi(2)).fold(0.0, f64::max);
        assert!((eval_functional_norm(0.9, &x1).unwrap() - brute).abs() < 1e-12 * brute);
        let xi = SpaceSpec::new(f64::INFINITY, 0.0).unwrap();
        assert!((eval_functional_norm(0.75, &xi).unwrap() - 4.0).abs() < 1e-10);
    }

    #[test]
    fn kernels_match_closed_forms() {
        let lam = c(0.3, -0.4);
        let szego = reproducing_kernel(lam, &SpaceSpec::hardy(), 30).unwrap();
        let bergman = reproducing_kernel(lam, &SpaceSpec::bergman(), 30).unwrap();
        for k in 0..=30 {
            let g = lam.conj().powu(k as u32);
            assert!((szego.coeff(k) - g).norm() < 1e-15);
            assert!((bergman.coeff(k) - g * (k + 1) as f64).norm() < 1e-13);
        }
        let at_zero = reproducing_kernel(ZERO, &SpaceSpec::hilbert(-1.3).unwrap(), 10).unwrap();
        assert_eq!(at_zero.degree(), Some(0));
        assert_eq!(at_zero.coeff(0), ONE);
        assert!(matches!(
            reproducing_kernel(lam, &SpaceSpec::new(1.0, 0.0).unwrap(), 5),
            Err(Error::UnsupportedSpace(_))
        ));
    }

    #[test]
    fn kernel_reproduces_polynomials() {
        let f = TaylorSeries::new((0..12).map(|k| c(1.0 / (k + 1) as f64, (k as f64).sin())).collect()).unwrap();
        let lam = c(-0.6, 0.25);
        for alpha in [0.0, -0.5, -1.0, -2.5] {
            let k = reproducing_kernel(lam, &SpaceSpec::hilbert(alpha).unwrap(), 11).unwrap();
            let v = weighted_pairing(&f, &k, alpha);
            assert!((v - f.eval(lam)).norm() < 1e-12, "alpha={alpha}");
        }
    }

    #[test]
    fn pairing_examples() {
        let z2 = TaylorSeries::monomial(2, ONE);
        let z3 = TaylorSeries::monomial(3, ONE);
        assert_eq!(cauchy_pairing(&z2, &z2), ONE);
        assert_eq!(cauchy_pairing(&z2, &z3), ZERO);
        let f = TaylorSeries::new(vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0)]).unwrap();
        let zeta = c(0.2, 0.7);
        let k = reproducing_kernel(zeta, &SpaceSpec::hardy(), 5).unwrap();
        assert!((cauchy_pairing(&f, &k) - f.eval(zeta)).norm() < 1e-15);
    }

    #[test]
    fn binomial_norm_examples() {
        let f = TaylorSeries::new(vec![c(1.0, 1.0), c(0.3, -2.0), c(0.0, 0.5)]).unwrap();
        assert!((binomial_norm(&f, 1).unwrap() - weighted_norm(&f, &SpaceSpec::hardy())).abs() < 1e-15);
        let z2 = TaylorSeries::monomial(2, ONE);
        assert!((binomial_norm(&z2, 2).unwrap() - 3f64.powf(-0.5)).abs() < 1e-15);
        assert!(binomial_norm(&z2, 0).is_err());
    }

    #[test]
    fn equivalence_bracket_endpoints() {
        // N = 1: weights coincide
        assert_eq!(binomial_equivalence_bracket(1, 50), (1.0, 1.0));
        // N = 2: (k+1)/(k+1) = 1 as well
        assert_eq!(binomial_equivalence_bracket(2, 50), (1.0, 1.0));
        // N = 3: (k+1)^2 / ((k+1)(k+2)/2) = 2(k+1)/(k+2) in [1, 2)
        let (lo, hi) = binomial_equivalence_bracket(3, 50);
        assert!((lo - 1.0).abs() < 1e-15);
        assert!((hi - (2.0 * 51.0 / 52.0f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn beta_conversion() {
        assert_eq!(alpha_to_beta(-0.5).unwrap(), 0.0);
        assert_eq!(beta_to_alpha(0.0).unwrap(), -0.5);
        assert_eq!(alpha_to_beta(-1.5).unwrap(), 2.0);
        assert!(matches!(alpha_to_beta(0.0), Err(Error::Domain(_))));
        assert!(beta_to_alpha(-1.0).is_err());
        assert!(SpaceSpec::new(2.0, 0.0).unwrap().beta().is_err());
        assert!(SpaceSpec::new(3.0, -1.0).unwrap().beta().is_err());
    }

    #[test]
    fn space_validation() {
        assert!(SpaceSpec::new(0.5, 0.0).is_err());
        assert!(SpaceSpec::new(2.0, 0.1).is_err());
        assert!(SpaceSpec::new(f64::NAN, 0.0).is_err());
        assert!(SpaceSpec::new(f64::INFINITY, -3.0).is_ok());
        assert_eq!(SpaceSpec::hilbert(-1.0).unwrap().kernel_power(), Some(3));
        assert_eq!(SpaceSpec::hilbert(-0.25).unwrap().kernel_power(), None);
    }

    #[test]
    fn series_rejects_non_finite() {
        assert!(TaylorSeries::new(vec![ONE, c(f64::NAN, 0.0)]).is_err());
        assert!(TaylorSeries::new(vec![c(0.0, f64::INFINITY)]).is_err());
    }

    #[test]
    fn degree_and_jet() {
        let f = TaylorSeries::new(vec![ONE, c(2.0, 0.0), c(3.0, 0.0), ZERO, ZERO]).unwrap();
        assert_eq!(f.degree(), Some(2));
        assert_eq!(TaylorSeries::new(vec![ZERO; 3]).unwrap().degree(), None);
        // f(1 + h) = 6 + 8h + 3h^2
        let jet = f.jet(ONE, 4);
        let expect = [6.0, 8.0, 3.0, 0.0];
        for (a, b) in jet.iter().zip(expect) {
            assert!((a - c(b, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn json_is_array_of_pairs() {
        let f = TaylorSeries::new(vec![c(1.0, -2.0), c(0.5, 0.0)]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, "[[1.0,-2.0],[0.5,0.0]]");
        let back: TaylorSeries = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn holder_extremal_attains_dual_norm() {
        let cvec: Vec<Complex64> = (0..9).map(|k| c((k as f64).cos(), 0.3 * k as f64 - 1.0)).collect();
        for &(p, alpha) in &[(1.0, -0.5), (2.0, 0.0), (2.0, -1.0), (3.0, -0.2), (f64::INFINITY, -1.0)] {
            let x = SpaceSpec::new(p, alpha).unwrap();
            let (value, f) = holder_extremal(&cvec, &x);
            assert!((weighted_norm(&f, &x) - 1.0).abs() < 1e-12, "p={p}");
            let attained: Complex64 = f.coeffs().iter().zip(&cvec).map(|(a, b)| a * b).sum();
            assert!((attained.re - value).abs() < 1e-12 * value, "p={p}");
            assert!(attained.im.abs() < 1e-12 * value);
        }
    }
}
