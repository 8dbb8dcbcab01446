//! Shared fixtures for the criterion benchmarks.

use malmquist::{Complex64, Sigma};

/// `n` points spread on the circle of radius `r`, each of multiplicity one.
pub fn ring(n: usize, r: f64) -> Sigma {
    let pts: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.1))
        .collect();
    Sigma::simple(&pts).expect("ring points lie in the disc")
}
