//! Grid sweeps of bound reports with growth-exponent fits.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::bernstein::least_squares_slope;
use crate::bounds::{bound_report, upper_exponent, BoundReport};
use crate::error::{Error, Result};
use crate::oracle::OracleConfig;
use crate::spaces::{eval_functional_norm, SpaceSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub ns: Vec<usize>,
    pub rs: Vec<f64>,
    pub ps: Vec<f64>,
    pub alphas: Vec<f64>,
    /// Oracle settings; `None` skips the oracle column.
    pub oracle: Option<OracleConfig>,
    /// Record wall-clock time per row; otherwise `runtime_ms` is 0.
    pub timing: bool,
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub n: usize,
    pub r: f64,
    pub p: f64,
    pub alpha: f64,
    pub lower: f64,
    pub oracle: Option<f64>,
    pub upper: f64,
    pub lower_witness: String,
    pub upper_route: String,
    /// `phi_X(1 - (1-r)/n)`, the evaluation-functional comparator.
    pub comparator: f64,
    pub exponent_expected: f64,
    pub runtime_ms: u128,
}

impl SweepRecord {
    pub fn from_report(rep: &BoundReport, runtime_ms: u128) -> Result<Self> {
        let t = 1.0 - (1.0 - rep.r) / rep.n as f64;
        Ok(Self {
            n: rep.n,
            r: rep.r,
            p: rep.space.p(),
            alpha: rep.space.alpha(),
            lower: rep.lower_certified,
            oracle: rep.oracle_estimate,
            upper: rep.upper_certified,
            lower_witness: rep.lower_witness.clone(),
            upper_route: rep.upper_route.clone(),
            comparator: eval_functional_norm(t, &rep.space)?,
            exponent_expected: rep.exponent_expected(),
            runtime_ms,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    pub p: f64,
    pub alpha: f64,
    /// Slope of `log(oracle)` on `log(n/(1-r))`.
    pub exponent: f64,
    pub expected: f64,
    pub points: usize,
}

pub fn run_sweep(grid: &SweepGrid) -> Result<(Vec<SweepRecord>, Vec<ExponentFit>)> {
    if grid.ns.is_empty() || grid.rs.is_empty() || grid.ps.is_empty() || grid.alphas.is_empty() {
        return Err(Error::InvalidInput("sweep grid is empty".into()));
    }
    let mut points = Vec::new();
    for &p in &grid.ps {
        for &alpha in &grid.alphas {
            let x = SpaceSpec::new(p, alpha)?;
            for &n in &grid.ns {
                for &r in &grid.rs {
                    points.push((n, r, x));
                }
            }
        }
    }
    let rows: Vec<SweepRecord> = points
        .par_iter()
        .map(|&(n, r, x)| {
            let start = Instant::now();
            let rep = bound_report(n, r, &x, grid.oracle.as_ref())?;
            let ms = if grid.timing { start.elapsed().as_millis() } else { 0 };
            SweepRecord::from_report(&rep, ms)
        })
        .collect::<Result<_>>()?;
    let mut fits = Vec::new();
    for &p in &grid.ps {
        for &alpha in &grid.alphas {
            let (xs, ys): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|row| row.p == p && row.alpha == alpha)
                .filter_map(|row| row.oracle.map(|o| ((row.n as f64 / (1.0 - row.r)).ln(), o.ln())))
                .unzip();
            let distinct = xs.iter().any(|x| (x - xs[0]).abs() > 1e-12);
            if xs.len() >= 2 && distinct {
                let x = SpaceSpec::new(p, alpha)?;
                fits.push(ExponentFit { p, alpha, exponent: least_squares_slope(&xs, &ys), expected: upper_exponent(&x), points: xs.len() });
            }
        }
    }
    Ok((rows, fits))
}
