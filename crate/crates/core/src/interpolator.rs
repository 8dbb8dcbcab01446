//! The linear interpolant `Phi(f) = sum_k <f, e_k> e_k`, trace verification
//! and sup-norm estimation on the unit circle.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::blaschke::{project_kernel, MalmquistBasis, MalmquistRep, Sigma};
use crate::error::{Error, Result};
use crate::spaces::{weighted_norm, SpaceSpec, TaylorSeries};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Golden-section steps per arc in [`sup_norm`].
pub const REFINE_STEPS: usize = 40;

/// `Phi(f)` as Malmquist coordinates. Exact for polynomial `f`: only the
/// first `deg f + 1` Taylor coefficients of each `e_k` enter the pairing.
pub fn phi(f: &TaylorSeries, sigma: &Sigma) -> MalmquistRep {
    let basis = MalmquistBasis::new(sigma);
    let len = f.degree().map_or(1, |d| d + 1);
    let coords = basis
        .expand_about(ZERO, len)
        .iter()
        .map(|e| f.coeffs().iter().zip(e).map(|(a, b)| a * b.conj()).sum())
        .collect();
    MalmquistRep::new(sigma, coords).expect("one coordinate per basis element")
}

/// Hermite trace `f^(j)(lambda) / j!`, `j < mult(lambda)`, point by point in
/// the order of `sigma.points()`.
pub fn hermite_trace(f: &TaylorSeries, sigma: &Sigma) -> Vec<Complex64> {
    sigma.points().iter().flat_map(|p| f.jet(p.lambda(), p.mult)).collect()
}

/// Hermite trace of an element of a model space.
pub fn hermite_trace_rep(g: &MalmquistRep, sigma: &Sigma) -> Vec<Complex64> {
    sigma.points().iter().flat_map(|p| g.jet(p.lambda(), p.mult)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceReport {
    pub matched: bool,
    /// Largest `|f^(j)(lambda)/j! - g^(j)(lambda)/j!|` over the trace.
    pub max_defect: f64,
}

/// Compares the Hermite traces of `f` and `g` on `sigma`. Derivatives of `g`
/// come from the exact local expansion of its rational Malmquist form.
pub fn trace_match(f: &TaylorSeries, g: &MalmquistRep, sigma: &Sigma, tol: f64) -> TraceReport {
    let a = hermite_trace(f, sigma);
    let b = hermite_trace_rep(g, sigma);
    let max_defect = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    TraceReport { matched: max_defect <= tol, max_defect }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupNorm {
    /// Maximum of `|g|` over the uniform grid; a certified lower bound.
    pub grid_max: f64,
    /// Grid maximum improved by golden-section search around the best node.
    pub refined: f64,
    /// Argument of the circle point attaining `refined`.
    pub theta: f64,
}

/// Grid size used for rational functions with poles at distance `>= 1 - r`
/// from the circle.
pub fn default_grid(sigma: &Sigma) -> usize {
    let r = sigma.r();
    let per = (1.0 / (1.0 - r)).ceil() as usize;
    4096usize.max(64 * sigma.n() * per)
}

/// Estimates `sup_{|z|=1} |g(z)|`.
pub fn sup_norm<G>(g: G, samples: usize) -> SupNorm
where
    G: Fn(Complex64) -> Complex64 + Sync,
{
    let samples = samples.max(3);
    let h = 2.0 * PI / samples as f64;
    let at = |theta: f64| g(Complex64::from_polar(1.0, theta)).norm();
    let (best, grid_max) = (0..samples)
        .into_par_iter()
        .map(|i| (i, at(i as f64 * h)))
        .reduce(|| (0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a });
    let center = best as f64 * h;
    let mut refined = grid_max;
    let mut theta = center;
    for (lo, hi) in [(center - h, center), (center, center + h)] {
        let (t, v) = golden_max(&at, lo, hi, REFINE_STEPS);
        if v > refined {
            refined = v;
            theta = t;
        }
    }
    SupNorm { grid_max, refined, theta: theta.rem_euclid(2.0 * PI) }
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, steps: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..steps {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Sup-norm estimate of an element of a model space on the default grid.
pub fn sup_norm_rep(g: &MalmquistRep) -> SupNorm {
    sup_norm(|z| g.eval(z), default_grid(g.sigma()))
}

/// `||Phi(f)||_inf / ||f||_X` for one sample `f`.
pub fn interpolant_norm_ratio(f: &TaylorSeries, sigma: &Sigma, x: &SpaceSpec) -> Result<f64> {
    let norm = weighted_norm(f, x);
    if norm == 0.0 {
        return Err(Error::ZeroFunction);
    }
    Ok(sup_norm_rep(&phi(f, sigma)).refined / norm)
}

/// `||P_B k_zeta||_{X*}` for Hilbert `X = l_a^2(alpha)`, whose dual under the
/// Cauchy pairing is `l_a^2(-alpha)`; computed from a Taylor expansion with
/// a certified tail of at most `tol`, which is added to the returned value.
pub fn projected_kernel_dual_norm(sigma: &Sigma, zeta: Complex64, x: &SpaceSpec, tol: f64) -> Result<f64> {
    if !x.is_hilbert() {
        return Err(Error::UnsupportedSpace(format!("{x}: only p = 2 is supported")));
    }
    let k = project_kernel(sigma, zeta)?;
    let series = k.certified_taylor(-x.alpha(), tol)?;
    let head: f64 = series
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| c.norm_sqr() * ((j + 1) as f64).powf(-2.0 * x.alpha()))
        .sum();
    Ok(head.sqrt() + tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::cauchy_pairing;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poly(coeffs: &[(f64, f64)]) -> TaylorSeries {
        TaylorSeries::new(coeffs.iter().map(|&(a, b)| c(a, b)).collect()).unwrap()
    }

    #[test]
    fn phi_at_origin_is_constant_term() {
        let s = Sigma::one_point(ZERO, 1).unwrap();
        let f = poly(&[(1.5, -0.5), (2.0, 0.0), (3.0, 1.0)]);
        let g = phi(&f, &s);
        assert_eq!(g.coords(), &[c(1.5, -0.5)]);
        assert!((g.eval(c(0.3, 0.9)) - c(1.5, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn phi_fixes_model_space_elements() {
        let s = Sigma::new([(c(0.6, 0.2), 2), (c(-0.4, 0.0), 1)]).unwrap();
        let e1 = MalmquistRep::basis_element(&s, 0).unwrap();
        let f = e1.taylor(400);
        let g = phi(&f, &s);
        assert!((g.coords()[0] - 1.0).norm() < 1e-12);
        assert!(g.coords()[1..].iter().all(|x| x.norm() < 1e-12));
    }

    #[test]
    fn phi_trace_at_simple_point() {
        let s = Sigma::one_point(c(0.5, 0.0), 1).unwrap();
        let f = TaylorSeries::monomial(1, c(1.0, 0.0));
        let g = phi(&f, &s);
        assert!((g.eval(c(0.5, 0.0)) - c(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn trace_match_examples() {
        let s = Sigma::new([(c(0.3, 0.4), 3), (c(-0.7, 0.1), 2), (c(0.0, -0.5), 1)]).unwrap();
        let f = TaylorSeries::new((0..30).map(|k| c((k as f64 * 0.7).sin(), (k as f64).cos() / (k + 1) as f64)).collect()).unwrap();
        let rep = trace_match(&f, &phi(&f, &s), &s, 1e-8);
        assert!(rep.matched, "defect {}", rep.max_defect);

        // f in B_sigma * polynomials has zero trace and zero projection
        let mut b = TaylorSeries::constant(c(1.0, 0.0));
        for l in s.expanded() {
            b = &b * &poly(&[(l.re, l.im), (-1.0, 0.0)]);
        }
        let f = &b * &poly(&[(0.2, 0.1), (1.0, -1.0)]);
        let g = phi(&f, &s);
        assert!(g.coords().iter().all(|x| x.norm() < 1e-13));
        assert!(trace_match(&f, &g, &s, 1e-12).matched);

        let zero = MalmquistRep::new(&s, vec![ZERO; 6]).unwrap();
        let one = TaylorSeries::constant(c(1.0, 0.0));
        let rep = trace_match(&one, &zero, &s, 1e-8);
        assert!(!rep.matched);
        assert!((rep.max_defect - 1.0).abs() < 1e-15);
    }

    #[test]
    fn phi_is_linear() {
        let s = Sigma::new([(c(0.5, 0.5), 2), (c(-0.2, 0.0), 1)]).unwrap();
        let f = poly(&[(1.0, 0.0), (0.0, 2.0), (-1.0, 1.0)]);
        let g = poly(&[(0.0, 1.0), (3.0, 0.0), (0.0, 0.0), (0.5, 0.5)]);
        let (a, b) = (c(0.7, -1.2), c(-2.0, 0.3));
        let lhs = phi(&(&f.scale(a) + &g.scale(b)), &s);
        let (pf, pg) = (phi(&f, &s), phi(&g, &s));
        for k in 0..3 {
            let rhs = pf.coords()[k] * a + pg.coords()[k] * b;
            assert!((lhs.coords()[k] - rhs).norm() < 1e-14);
        }
    }

    #[test]
    fn phi_is_idempotent() {
        let s = Sigma::new([(c(0.7, 0.0), 2), (c(0.1, -0.6), 1)]).unwrap();
        let f = poly(&[(1.0, 0.0), (0.5, 0.5), (-0.3, 0.2), (0.0, 1.0), (2.0, 0.0)]);
        let g = phi(&f, &s);
        let series = g.certified_taylor(0.0, 1e-11).unwrap();
        let again = phi(&series, &s);
        for (a, b) in again.coords().iter().zip(g.coords()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn residual_is_divisible_by_node_polynomial() {
        let s = Sigma::new([(c(0.5, 0.1), 2), (c(-0.3, 0.4), 1), (c(0.0, -0.2), 1)]).unwrap();
        let f = TaylorSeries::new((0..20).map(|k| c(1.0 / (k + 1) as f64, (k as f64).sin())).collect()).unwrap();
        let g = phi(&f, &s);
        let diff = &f - &g.certified_taylor(0.0, 1e-14).unwrap();
        // synthetic division by (z - lambda_j), one node at a time
        let mut q = diff.coeffs().to_vec();
        let mut remainder_norm = 0.0f64;
        for l in s.expanded() {
            let mut carry = ZERO;
            for x in q.iter_mut().rev() {
                carry = carry * l + *x;
                *x = carry;
            }
            remainder_norm = remainder_norm.max(q[0].norm());
            q.remove(0);
        }
        let fnorm = weighted_norm(&f, &SpaceSpec::hardy());
        assert!(remainder_norm <= 1e-8 * fnorm, "remainder {remainder_norm}");
    }

    #[test]
    fn sup_norm_examples() {
        let z5 = TaylorSeries::monomial(5, c(1.0, 0.0));
        assert!((sup_norm(|z| z5.eval(z), 4096).refined - 1.0).abs() < 1e-14);
        for n in [3usize, 10, 25] {
            let d = TaylorSeries::from_real(&vec![1.0; n]).unwrap();
            let s = sup_norm(|z| d.eval(z), 4096);
            assert!((s.grid_max - n as f64).abs() < 1e-12);
        }
        let r = 0.8;
        let e1 = MalmquistRep::basis_element(&Sigma::one_point(c(r, 0.0), 1).unwrap(), 0).unwrap();
        let s = sup_norm_rep(&e1);
        assert!((s.refined - ((1.0 + r) / (1.0 - r)).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn refinement_beats_grid_off_node() {
        // peak of |1 + z e^{-i t}| at theta = t, placed between grid nodes
        let t = 2.0 * PI * 0.5 / 64.0;
        let w = Complex64::from_polar(1.0, -t);
        let s = sup_norm(|z| c(1.0, 0.0) + z * w, 64);
        assert!(s.grid_max < 2.0 - 1e-4);
        assert!((s.refined - 2.0).abs() < 1e-12);
        assert!(s.grid_max <= s.refined);
    }

    #[test]
    fn ratio_examples() {
        let s = Sigma::one_point(ZERO, 1).unwrap();
        let f = poly(&[(0.6, 0.8), (1.0, 1.0), (-2.0, 0.0)]);
        for x in [SpaceSpec::hardy(), SpaceSpec::new(1.0, -1.0).unwrap(), SpaceSpec::new(f64::INFINITY, 0.0).unwrap()] {
            let ratio = interpolant_norm_ratio(&f, &s, &x).unwrap();
            assert!((ratio - 1.0 / weighted_norm(&f, &x)).abs() < 1e-13);
            assert!(ratio <= 1.0);
        }
        assert!(matches!(interpolant_norm_ratio(&TaylorSeries::zero(), &s, &SpaceSpec::hardy()), Err(Error::ZeroFunction)));
    }

    #[test]
    fn projected_kernel_dual_norm_in_hardy_case() {
        let s = Sigma::new([(c(0.8, 0.0), 3), (c(-0.2, 0.5), 2)]).unwrap();
        let zeta = c(0.3, -0.6);
        let v = projected_kernel_dual_norm(&s, zeta, &SpaceSpec::hardy(), 1e-12).unwrap();
        let exact = project_kernel(&s, zeta).unwrap().h2_norm();
        assert!((v - exact).abs() < 1e-10);
        // pointwise bound |Phi(f)(zeta)| <= ||f||_X ||P_B k_zeta||_{X*}
        let f = poly(&[(1.0, 0.0), (0.0, -1.0), (0.5, 0.5), (0.2, 0.0)]);
        let g = phi(&f, &s);
        for alpha in [0.0, -1.0, -2.0] {
            let x = SpaceSpec::hilbert(alpha).unwrap();
            let bound = weighted_norm(&f, &x) * projected_kernel_dual_norm(&s, zeta, &x, 1e-12).unwrap();
            assert!(g.eval(zeta).norm() <= bound + 1e-12, "alpha {alpha}");
        }
        // identity Phi(f)(zeta) = <f, P_B k_zeta>
        let k = project_kernel(&s, zeta).unwrap().taylor(4);
        assert!((cauchy_pairing(&f, &k) - g.eval(zeta)).norm() < 1e-13);
    }
}
