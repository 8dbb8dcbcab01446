//! Minimal-norm `H^inf` interpolation through the compressed shift, a Pick
//! matrix cross-check, estimation of `c(sigma, X, H^inf)` and von Neumann
//! inequality checks on random contractions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::blaschke::{compressed_shift, Sigma};
use crate::bounds;
use crate::error::{Error, Result};
use crate::interpolator::hermite_trace;
use crate::sampling::complex_gaussian;
use crate::spaces::{holder_extremal, weighted_norm, SpaceSpec, TaylorSeries};
use crate::{derived_rng, Rng};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative trace residual above which a Newton form is flagged.
pub const CONDITIONING_THRESHOLD: f64 = 1e-8;

/// Hermite interpolating polynomial in Newton form
/// `sum_k c_k prod_{i<k} (z - x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonForm {
    pub nodes: Vec<Complex64>,
    pub coeffs: Vec<Complex64>,
}

impl NewtonForm {
    /// Confluent divided differences; `trace` lists `f^(j)(lambda)/j!` for
    /// `j < mult` point by point.
    pub fn from_trace(sigma: &Sigma, trace: &[Complex64]) -> Result<Self> {
        let n = sigma.n();
        if trace.len() != n {
            return Err(Error::InvalidInput(format!("trace has length {}, expected {n}", trace.len())));
        }
        let nodes = sigma.expanded();
        // first index of each node's group, to read Taylor data
        let mut group_start = Vec::with_capacity(n);
        let mut offset = 0;
        for p in sigma.points() {
            group_start.extend(std::iter::repeat_n(offset, p.mult));
            offset += p.mult;
        }
        let mut table: Vec<Complex64> = (0..n).map(|i| trace[group_start[i]]).collect();
        let mut coeffs = vec![table[0]];
        for j in 1..n {
            for i in 0..n - j {
                table[i] = if group_start[i] == group_start[i + j] {
                    trace[group_start[i] + j]
                } else {
                    (table[i + 1] - table[i]) / (nodes[i + j] - nodes[i])
                };
            }
            coeffs.push(table[0]);
        }
        Ok(Self { nodes, coeffs })
    }

    pub fn eval_matrix(&self, a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let n = a.nrows();
        let id = DMatrix::<Complex64>::identity(n, n);
        let mut acc = DMatrix::<Complex64>::zeros(n, n);
        for k in (0..self.coeffs.len()).rev() {
            acc = &acc * (a - &id * self.nodes[k]) + &id * self.coeffs[k];
        }
        acc
    }

    pub fn to_taylor(&self) -> TaylorSeries {
        let mut acc = TaylorSeries::zero();
        for k in (0..self.coeffs.len()).rev() {
            let lin = TaylorSeries::new(vec![-self.nodes[k], ONE]).expect("finite");
            acc = &(&acc * &lin) + &TaylorSeries::constant(self.coeffs[k]);
        }
        acc
    }
}

pub fn spectral_norm(a: &DMatrix<Complex64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().singular_values().max()
}

/// Top singular triple `(s, u, v)` with `a u = s v`.
fn top_singular(a: &DMatrix<Complex64>) -> (f64, DVector<Complex64>, DVector<Complex64>) {
    let svd = a.clone().svd(true, true);
    let (k, &s) = svd
        .singular_values
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("nonempty");
    let v = svd.u.expect("requested").column(k).into_owned();
    let u = svd.v_t.expect("requested").row(k).adjoint();
    (s, u, v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinNorm {
    pub value: f64,
    /// Max trace defect of the Newton polynomial relative to `1 + max|trace|`.
    pub residual: f64,
    pub ill_conditioned: bool,
}

/// `inf { ||g||_inf : g has the given Hermite trace on sigma }`, evaluated as
/// `||p(M)||` for the Hermite polynomial `p` and the compressed shift `M`.
pub fn min_norm(sigma: &Sigma, trace: &[Complex64]) -> Result<MinNorm> {
    min_norm_with(sigma, trace, &compressed_shift(sigma))
}

/// [`min_norm`] with a precomputed compressed shift.
pub fn min_norm_with(sigma: &Sigma, trace: &[Complex64], shift: &DMatrix<Complex64>) -> Result<MinNorm> {
    let newton = NewtonForm::from_trace(sigma, trace)?;
    let value = spectral_norm(&newton.eval_matrix(shift));
    let poly = newton.to_taylor();
    let back = hermite_trace(&poly, sigma);
    let scale = 1.0 + trace.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let residual = back.iter().zip(trace).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
    if !value.is_finite() {
        return Err(Error::Numerical("minimal norm is not finite".into()));
    }
    Ok(MinNorm { value, residual, ill_conditioned: residual > CONDITIONING_THRESHOLD })
}

/// Nevanlinna-Pick minimal norm for distinct nodes by bisection on the
/// positivity of `[(c^2 - w_i conj(w_j)) / (1 - lambda_i conj(lambda_j))]`.
pub fn pick_min_norm(sigma: &Sigma, w: &[Complex64]) -> Result<f64> {
    if !sigma.is_simple() {
        return Err(Error::UnsupportedSpace("Pick bisection needs distinct nodes; use min_norm".into()));
    }
    let n = sigma.n();
    if w.len() != n {
        return Err(Error::InvalidInput(format!("{} values for {n} nodes", w.len())));
    }
    let lo0 = w.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if lo0 == 0.0 {
        return Ok(0.0);
    }
    let nodes = sigma.expanded();
    let cauchy = DMatrix::from_fn(n, n, |i, j| ONE / (ONE - nodes[i] * nodes[j].conj()));
    let data = DMatrix::from_fn(n, n, |i, j| w[i] * w[j].conj() * cauchy[(i, j)]);
    let feasible: Box<dyn Fn(f64) -> bool> = match cauchy.clone().cholesky() {
        Some(chol) => {
            let l = chol.l();
            let x = l.solve_lower_triangular(&data).ok_or(Error::Numerical("singular factor".into()))?;
            let k = l.solve_lower_triangular(&x.adjoint()).ok_or(Error::Numerical("singular factor".into()))?;
            let k = (&k + k.adjoint()) * Complex64::new(0.5, 0.0);
            let top = k.symmetric_eigenvalues().max();
            Box::new(move |c: f64| c * c - top >= -1e-12 * (c * c).max(top.abs()))
        }
        None => Box::new(move |c: f64| {
            let p = &cauchy * Complex64::new(c * c, 0.0) - &data;
            let p = (&p + p.adjoint()) * Complex64::new(0.5, 0.0);
            let scale = p.iter().map(|z| z.norm()).fold(0.0, f64::max);
            p.symmetric_eigenvalues().min() >= -1e-12 * scale
        }),
    };
    let mut lo = lo0;
    if feasible(lo) {
        return Ok(lo);
    }
    let mut hi = 2.0 * lo0;
    while !feasible(hi) {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Numerical("Pick bisection found no feasible level".into()));
        }
    }
    for _ in 0..200 {
        if hi - lo <= 1e-12 * (1.0 + hi) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub restarts: usize,
    pub iters: usize,
    /// Stop a restart once the value improves by less than this.
    pub tol: f64,
    pub seed: u64,
    /// Degree cap for `p != 2`; `None` means `max(4n, 64)`.
    pub degree: Option<usize>,
    /// Hard cap on the number of powers of `M` used when `p = 2`.
    pub max_powers: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { restarts: 16, iters: 200, tol: 1e-10, seed: 0, degree: None, max_powers: 1 << 13 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Estimate {
    /// `||f(M)|| / ||f||_X` for the witness; a lower bound on `c(sigma, X, H^inf)`.
    pub value: f64,
    /// Unit-norm polynomial attaining `value`.
    pub witness: TaylorSeries,
    /// Number of Taylor coefficients of the witness.
    pub degree: usize,
    /// Change in value when the degree cap is doubled (`p != 2` only).
    pub sensitivity: Option<f64>,
    /// Which start produced the best value.
    pub start: String,
}

/// Number of powers of `M` for `p = 2`: stop when the weighted Frobenius mass
/// of new powers stays negligible for two consecutive checks.
fn hilbert_power_count(m: &DMatrix<Complex64>, alpha: f64, cap: usize) -> usize {
    let n = m.nrows();
    let mut p = DMatrix::<Complex64>::identity(n, n);
    let mut total = 0.0;
    let mut quiet = 0;
    for j in 0..cap {
        let fro = p.norm_squared();
        if fro == 0.0 {
            return j.max(1);
        }
        let term = fro * ((j + 1) as f64).powf(-2.0 * alpha);
        total += term;
        if j >= n && j % 16 == 0 {
            if term <= 1e-26 * total {
                quiet += 1;
                if quiet >= 2 {
                    return j + 1;
                }
            } else {
                quiet = 0;
            }
        }
        p = m * p;
    }
    cap
}

/// `v^* M^j u` for `j < len`.
fn power_moments(m: &DMatrix<Complex64>, u: &DVector<Complex64>, v: &DVector<Complex64>, len: usize) -> Vec<Complex64> {
    let mut y = u.clone();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(v.dotc(&y));
        y = m * y;
    }
    out
}

/// `sum_j f_j M^j` by Horner.
fn poly_at(m: &DMatrix<Complex64>, f: &[Complex64]) -> DMatrix<Complex64> {
    let n = m.nrows();
    let id = DMatrix::<Complex64>::identity(n, n);
    let mut acc = DMatrix::<Complex64>::zeros(n, n);
    for &c in f.iter().rev() {
        acc = m * acc + &id * c;
    }
    acc
}

enum Start {
    Witness(TaylorSeries),
    Vectors(DVector<Complex64>, DVector<Complex64>),
}

fn fit_len(f: &TaylorSeries, len: usize) -> Vec<Complex64> {
    let mut c = f.coeffs().to_vec();
    c.resize(len, ZERO);
    c
}

/// Alternating maximization of `Re v^* f(M) u` over unit `u, v` and the unit
/// ball of `X`, from one start. Returns `(value, f)`.
fn ascend(m: &DMatrix<Complex64>, x: &SpaceSpec, len: usize, start: Start, cfg: &OracleConfig) -> (f64, Vec<Complex64>) {
    let (mut u, mut v) = match start {
        Start::Vectors(u, v) => (u, v),
        Start::Witness(f) => {
            let c = fit_len(&f, len);
            let norm = weighted_norm(&TaylorSeries::new(c.clone()).expect("finite"), x);
            if norm == 0.0 {
                let e = DVector::from_element(m.nrows(), ONE).normalize();
                (e.clone(), e)
            } else {
                let (_, u, v) = top_singular(&poly_at(m, &c));
                (u, v)
            }
        }
    };
    let mut best = f64::NEG_INFINITY;
    let mut best_f = vec![ZERO; len];
    for _ in 0..cfg.iters.max(1) {
        let a = power_moments(m, &u, &v, len);
        let (_, f) = holder_extremal(&a, x);
        let f = fit_len(&f, len);
        let (s, nu, nv) = top_singular(&poly_at(m, &f));
        let improved = s > best + cfg.tol;
        if s > best {
            best = s;
            best_f = f;
        }
        u = nu;
        v = nv;
        if !improved {
            break;
        }
    }
    (best, best_f)
}

/// Estimate of `c(sigma, X, H^inf) = sup_{||f||_X <= 1} ||f(M)||` by
/// alternating maximization with restarts. Every reported value is attained
/// by an explicit feasible witness.
pub fn interp_constant_estimate(sigma: &Sigma, x: &SpaceSpec, cfg: &OracleConfig) -> Result<Estimate> {
    let m = compressed_shift(sigma);
    let n = sigma.n();
    let len = if x.is_hilbert() {
        hilbert_power_count(&m, x.alpha(), cfg.max_powers)
    } else {
        cfg.degree.unwrap_or((4 * n).max(64))
    };
    let (_, f, label) = run_starts(sigma, &m, x, len, cfg)?;
    let mut witness = TaylorSeries::new(f)?;
    let norm = weighted_norm(&witness, x);
    witness = witness.scale(Complex64::new(1.0 / norm, 0.0));
    let value = spectral_norm(&poly_at(&m, witness.coeffs()));
    let sensitivity = if x.is_hilbert() {
        None
    } else {
        let (v2, _) = ascend(&m, x, 2 * len, Start::Witness(witness.clone()), cfg);
        Some(v2 - value)
    };
    Ok(Estimate { value, degree: witness.len(), witness, sensitivity, start: label })
}

fn run_starts(
    sigma: &Sigma,
    m: &DMatrix<Complex64>,
    x: &SpaceSpec,
    len: usize,
    cfg: &OracleConfig,
) -> Result<(f64, Vec<Complex64>, String)> {
    let n = sigma.n();
    let mut warm: Vec<(String, TaylorSeries)> = vec![("flat polynomial".into(), bounds::lower_lp(n, x)?.1)];
    if let (true, Some(big_n)) = (x.is_hilbert(), x.kernel_power()) {
        let lambda = sigma
            .points()
            .iter()
            .map(|p| p.lambda())
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .expect("nonempty sigma");
        let one = bounds::lower_onepoint_hilbert(n, lambda, big_n)?;
        warm.push((format!("composed witness N={big_n}"), one.big_psi));
    }
    let total = cfg.restarts.max(warm.len());
    let results: Vec<(f64, Vec<Complex64>, String)> = (0..total)
        .into_par_iter()
        .map(|i| {
            let (label, start) = match warm.get(i) {
                Some((label, f)) => (label.clone(), Start::Witness(f.clone())),
                None => {
                    let mut rng: Rng = derived_rng(cfg.seed, i as u64);
                    let u = DVector::from_fn(n, |_, _| complex_gaussian(&mut rng)).normalize();
                    let v = DVector::from_fn(n, |_, _| complex_gaussian(&mut rng)).normalize();
                    (format!("random start {i}"), Start::Vectors(u, v))
                }
            };
            let (value, f) = ascend(m, x, len, start, cfg);
            (value, f, label)
        })
        .collect();
    let best = results
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("at least one start");
    Ok(best)
}

/// Random upper-triangular matrix with diagonal `sigma.expanded()` and a
/// random strictly upper part scaled (30 bisection steps) to the largest
/// factor keeping the operator norm at most one.
pub fn random_contraction(sigma: &Sigma, rng: &mut Rng) -> DMatrix<Complex64> {
    let nodes = sigma.expanded();
    let n = nodes.len();
    let diag = DMatrix::from_fn(n, n, |i, j| if i == j { nodes[i] } else { ZERO });
    let upper = DMatrix::from_fn(n, n, |i, j| if j > i { complex_gaussian(rng) } else { ZERO });
    let at = |s: f64| &diag + &upper * Complex64::new(s, 0.0);
    if n == 1 {
        return diag;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while spectral_norm(&at(hi)) <= 1.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if spectral_norm(&at(mid)) <= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(lo)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VonNeumannReport {
    pub trials: usize,
    pub min_norm: f64,
    /// Largest `||f(A)||` over the sampled contractions.
    pub best_contraction: f64,
    /// `min_norm - best_contraction`; the part of the minimum not reached by samples.
    pub contraction_gap: f64,
    /// `||f(M)||` with `f` applied to the compressed shift by Horner.
    pub model_value: f64,
    /// `max |f(lambda)|`, the value on the diagonal contraction.
    pub diagonal_value: f64,
    /// `upper_hilbert(n, r, alpha) * ||f||_X`.
    pub upper_bound: f64,
    pub violations: usize,
    pub passed: bool,
}

/// Samples contractions `A` with spectrum `sigma` and checks
/// `||f(A)|| <= min_norm(sigma, f|sigma)` and the upper chain.
pub fn von_neumann_check(
    sigma: &Sigma,
    f: &TaylorSeries,
    alpha: f64,
    trials: usize,
    seed: u64,
) -> Result<VonNeumannReport> {
    let trace = hermite_trace(f, sigma);
    let newton = NewtonForm::from_trace(sigma, &trace)?;
    let shift = compressed_shift(sigma);
    let best = min_norm_with(sigma, &trace, &shift)?.value;
    let model_value = spectral_norm(&poly_at(&shift, f.coeffs()));
    let diagonal_value = sigma.points().iter().map(|p| f.eval(p.lambda()).norm()).fold(0.0, f64::max);
    let x = SpaceSpec::hilbert(alpha)?;
    let upper_bound = bounds::upper_hilbert(sigma.n(), sigma.r(), alpha)? * weighted_norm(f, &x);
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = derived_rng(seed, t as u64);
            let a = random_contraction(sigma, &mut rng);
            spectral_norm(&newton.eval_matrix(&a))
        })
        .collect();
    let violations = values
        .iter()
        .chain(std::iter::once(&diagonal_value))
        .filter(|&&v| v > best + 1e-8 || v > upper_bound + 1e-6)
        .count();
    let best_contraction = values.iter().copied().fold(diagonal_value, f64::max);
    Ok(VonNeumannReport {
        trials,
        min_norm: best,
        best_contraction,
        contraction_gap: best - best_contraction,
        model_value,
        diagonal_value,
        upper_bound,
        violations,
        passed: violations == 0 && (model_value - best).abs() <= 1e-8,
    })
}
