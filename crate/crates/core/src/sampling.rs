//! Random instances for property tests, Monte-Carlo checks and restarts.

use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::blaschke::{MalmquistRep, Sigma};
use crate::spaces::TaylorSeries;
use crate::Rng;

pub fn complex_gaussian(rng: &mut Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) / std::f64::consts::SQRT_2
}

/// Uniform point of the disc of radius `r`.
pub fn disc_point(rng: &mut Rng, r: f64) -> Complex64 {
    let rho = r * rng.random::<f64>().sqrt();
    Complex64::from_polar(rho, rng.random_range(0.0..std::f64::consts::TAU))
}

/// `n` uniform in `1..=max_n`, points uniform in the disc of radius `max_r`,
/// and roughly one point in four repeating its predecessor.
pub fn random_sigma(rng: &mut Rng, max_n: usize, max_r: f64) -> Sigma {
    let n = rng.random_range(1..=max_n);
    let mut pts: Vec<(Complex64, usize)> = Vec::new();
    for _ in 0..n {
        match pts.last_mut() {
            Some(last) if rng.random::<f64>() < 0.25 => last.1 += 1,
            _ => pts.push((disc_point(rng, max_r), 1)),
        }
    }
    Sigma::new(pts).expect("sampled points lie in the disc")
}

/// `n` distinct points, pairwise at least `min_gap` apart.
pub fn random_simple_sigma(rng: &mut Rng, n: usize, max_r: f64, min_gap: f64) -> Sigma {
    let mut pts: Vec<Complex64> = Vec::with_capacity(n);
    while pts.len() < n {
        let z = disc_point(rng, max_r);
        if pts.iter().all(|p| (p - z).norm() >= min_gap) {
            pts.push(z);
        }
    }
    Sigma::simple(&pts).expect("sampled points lie in the disc")
}

/// Complex-Gaussian Malmquist coordinates normalized to `||g||_{H^2} = 1`.
pub fn random_unit_rep(rng: &mut Rng, sigma: &Sigma) -> MalmquistRep {
    let mut coords: Vec<Complex64> = (0..sigma.n()).map(|_| complex_gaussian(rng)).collect();
    let norm = coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    coords.iter_mut().for_each(|c| *c /= norm);
    MalmquistRep::new(sigma, coords).expect("coordinate count matches")
}

/// Complex-Gaussian coefficients, degree exactly `degree`.
pub fn random_poly(rng: &mut Rng, degree: usize) -> TaylorSeries {
    TaylorSeries::new((0..=degree).map(|_| complex_gaussian(rng)).collect())
        .expect("gaussian samples are finite")
}

/// Random polynomial rescaled to unit `H^2` norm.
pub fn random_unit_poly(rng: &mut Rng, degree: usize) -> TaylorSeries {
    let f = random_poly(rng, degree);
    let norm = f.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    f.scale(Complex64::new(1.0 / norm, 0.0))
}
