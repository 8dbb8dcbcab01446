//! Finite Blaschke products, the Malmquist orthonormal basis of the model
//! space `K_B = H^2 (-) B H^2`, kernel projections and the compressed shift.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::TaylorSeries;
use crate::tail;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default number of circle nodes for quadrature on the unit circle.
pub const CIRCLE_NODES: usize = 4096;

/// Largest truncation degree the certified expansions will try.
pub const MAX_EXPANSION_DEGREE: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaPoint {
    pub re: f64,
    pub im: f64,
    #[serde(default = "one_mult")]
    pub mult: usize,
}

fn one_mult() -> usize {
    1
}

impl SigmaPoint {
    pub fn lambda(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Finite multiset of points of the open unit disc.
///
/// Points keep their insertion order; repeated entries of the same point are
/// merged into the first occurrence so that the expanded view lists equal
/// points consecutively.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<SigmaPoint>", into = "Vec<SigmaPoint>")]
pub struct Sigma {
    points: Vec<SigmaPoint>,
}

impl Sigma {
    pub fn new(points: impl IntoIterator<Item = (Complex64, usize)>) -> Result<Self> {
        let mut merged: Vec<SigmaPoint> = Vec::new();
        for (lambda, mult) in points {
            if !(lambda.re.is_finite() && lambda.im.is_finite()) {
                return Err(Error::InvalidInput("sigma point is not finite".into()));
            }
            if lambda.norm() >= 1.0 {
                return Err(Error::InvalidInput(format!(
                    "sigma point {lambda} lies outside the open unit disc"
                )));
            }
            if mult == 0 {
                return Err(Error::InvalidInput("multiplicity must be positive".into()));
            }
            match merged.iter_mut().find(|p| p.lambda() == lambda) {
                Some(p) => p.mult += mult,
                None => merged.push(SigmaPoint { re: lambda.re, im: lambda.im, mult }),
            }
        }
        if merged.is_empty() {
            return Err(Error::InvalidInput("sigma must contain at least one point".into()));
        }
        Ok(Self { points: merged })
    }

    /// The one-point set of multiplicity `n` at `lambda`.
    pub fn one_point(lambda: Complex64, n: usize) -> Result<Self> {
        Self::new([(lambda, n)])
    }

    /// Points of multiplicity one.
    pub fn simple(points: &[Complex64]) -> Result<Self> {
        Self::new(points.iter().map(|&l| (l, 1)))
    }

    pub fn points(&self) -> &[SigmaPoint] {
        &self.points
    }

    /// Total count with multiplicity.
    pub fn n(&self) -> usize {
        self.points.iter().map(|p| p.mult).sum()
    }

    /// Largest modulus.
    pub fn r(&self) -> f64 {
        self.points.iter().map(|p| p.lambda().norm()).fold(0.0, f64::max)
    }

    pub fn is_simple(&self) -> bool {
        self.points.iter().all(|p| p.mult == 1)
    }

    /// `lambda_1, ..., lambda_n` with multiplicities expanded consecutively.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.points.iter().flat_map(|p| std::iter::repeat_n(p.lambda(), p.mult)).collect()
    }

    /// Every point multiplied by `e^{i theta}`.
    pub fn rotated(&self, theta: f64) -> Self {
        let w = Complex64::from_polar(1.0, theta);
        Self::new(self.points.iter().map(|p| (p.lambda() * w, p.mult)))
            .expect("rotation preserves validity")
    }

    /// Distinct points reordered by `order` (a permutation of indices).
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.points.len() {
            return Err(Error::InvalidInput("permutation length mismatch".into()));
        }
        Self::new(order.iter().map(|&i| (self.points[i].lambda(), self.points[i].mult)))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))
    }
}

impl TryFrom<Vec<SigmaPoint>> for Sigma {
    type Error = Error;
    fn try_from(points: Vec<SigmaPoint>) -> Result<Self> {
        Self::new(points.into_iter().map(|p| (p.lambda(), p.mult)))
    }
}

impl From<Sigma> for Vec<SigmaPoint> {
    fn from(s: Sigma) -> Self {
        s.points
    }
}

/// Shorthand grammar: `;`-separated tokens `re+imi^mult`, e.g. `0.5^3;-0.2+0.1i^1`.
/// The `^mult` suffix defaults to one.
impl FromStr for Sigma {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.replace('\u{2212}', "-");
        let mut points = Vec::new();
        for token in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
            let (z, mult) = match token.split_once('^') {
                Some((z, m)) => {
                    let mult = m.trim().parse::<usize>().map_err(|_| {
                        Error::InvalidInput(format!("bad multiplicity in `{token}`"))
                    })?;
                    (z.trim(), mult)
                }
                None => (token, 1),
            };
            points.push((parse_complex(z)?, mult));
        }
        Self::new(points)
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            if p.im == 0.0 {
                write!(f, "{}^{}", p.re, p.mult)?;
            } else {
                write!(f, "{}{:+}i^{}", p.re, p.im, p.mult)?;
            }
        }
        Ok(())
    }
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (with `i` alone meaning `1i`).
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s = s.trim().replace('\u{2212}', "-");
    let bad = || Error::InvalidInput(format!("cannot parse complex number `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    let num = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(s.parse::<f64>().map_err(|_| bad())?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => Ok(Complex64::new(
            body[..i].parse::<f64>().map_err(|_| bad())?,
            num(&body[i..])?,
        )),
        None => Ok(Complex64::new(0.0, num(body)?)),
    }
}

/// `b_lambda(z) = (lambda - z) / (1 - conj(lambda) z)`.
pub fn blaschke_factor(lambda: Complex64, z: Complex64) -> Result<Complex64> {
    let den = ONE - lambda.conj() * z;
    if den == ZERO {
        return Err(Error::Pole { re: z.re, im: z.im });
    }
    Ok((lambda - z) / den)
}

/// `B_sigma(z)`, the product of the factors over the expanded points.
pub fn blaschke_product(sigma: &Sigma, z: Complex64) -> Result<Complex64> {
    sigma
        .points()
        .iter()
        .try_fold(ONE, |acc, p| Ok(acc * blaschke_factor(p.lambda(), z)?.powu(p.mult as u32)))
}

/// Applies multiplication by `(a + b h) / (1 - c h)` to a truncated series in `h`.
pub(crate) fn apply_first_order(x: &[Complex64], a: Complex64, b: Complex64, c: Complex64) -> Vec<Complex64> {
    let mut y = Vec::with_capacity(x.len());
    let mut prev_y = ZERO;
    let mut prev_x = ZERO;
    for &xj in x {
        let yj = c * prev_y + a * xj + b * prev_x;
        y.push(yj);
        prev_y = yj;
        prev_x = xj;
    }
    y
}

/// Malmquist orthonormal basis `e_1, ..., e_n` of `K_B`:
/// `e_k = (prod_{j<k} b_{lambda_j}) * sqrt(1 - |lambda_k|^2) / (1 - conj(lambda_k) z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MalmquistBasis {
    nodes: Vec<Complex64>,
    scales: Vec<f64>,
}

impl MalmquistBasis {
    pub fn new(sigma: &Sigma) -> Self {
        let nodes = sigma.expanded();
        let scales = nodes.iter().map(|l| (1.0 - l.norm_sqr()).sqrt()).collect();
        Self { nodes, scales }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    /// `r = max |lambda_j|`.
    pub fn radius(&self) -> f64 {
        self.nodes.iter().map(|l| l.norm()).fold(0.0, f64::max)
    }

    /// `(e_1(z), ..., e_n(z))` for `z` in the closed disc.
    pub fn eval_all(&self, z: Complex64) -> Vec<Complex64> {
        let mut prefix = ONE;
        let mut out = Vec::with_capacity(self.len());
        for (&l, &s) in self.nodes.iter().zip(&self.scales) {
            let den = ONE - l.conj() * z;
            out.push(prefix * s / den);
            prefix *= (l - z) / den;
        }
        out
    }

    pub fn eval(&self, k: usize, z: Complex64) -> Complex64 {
        self.eval_all(z)[k]
    }

    /// Taylor coefficients about `center` of every basis element, `len` terms each.
    pub fn expand_about(&self, center: Complex64, len: usize) -> Vec<Vec<Complex64>> {
        let mut prefix = vec![ZERO; len];
        if len > 0 {
            prefix[0] = ONE;
        }
        let mut out = Vec::with_capacity(self.len());
        for (&l, &s) in self.nodes.iter().zip(&self.scales) {
            let lc = l.conj();
            let den = ONE - lc * center;
            out.push(apply_first_order(&prefix, s / den, ZERO, lc / den));
            prefix = apply_first_order(&prefix, (l - center) / den, -ONE / den, lc / den);
        }
        out
    }

    /// Taylor series at the origin of every basis element, truncated to `len` terms.
    pub fn taylor(&self, len: usize) -> Vec<TaylorSeries> {
        self.expand_about(ZERO, len).into_iter().map(TaylorSeries::from_vec).collect()
    }

    /// `ln max_{|z| = rho} |e_k(z)|` upper bounds, for `1 < rho < 1/r`.
    fn ln_majorants(&self, rho: f64) -> Vec<f64> {
        let mut ln_prefix = 0.0;
        let mut out = Vec::with_capacity(self.len());
        for (&l, &s) in self.nodes.iter().zip(&self.scales) {
            let a = l.norm();
            out.push(ln_prefix + s.ln() - (1.0 - a * rho).ln());
            ln_prefix += (rho + a).ln() - (1.0 - a * rho).ln();
        }
        out
    }

    /// Smallest truncation degree `D` such that, for `g = sum_k c_k e_k`,
    /// `sum_{j > D} |g_j|^2 (j+1)^(2 exponent) <= tol^2` is certified by a
    /// Cauchy-estimate majorant on a circle of radius `rho in (1, 1/r)`.
    pub fn certified_degree(&self, coords: &[Complex64], exponent: f64, tol: f64) -> Result<usize> {
        let r = self.radius();
        if r == 0.0 {
            // every basis element is a monomial of degree < n
            return Ok(self.len().saturating_sub(1));
        }
        let ln_rho_max = (1.0 / r).ln().min(18.0);
        let weights: Vec<f64> = coords.iter().map(|c| c.norm()).collect();
        if weights.iter().all(|&w| w == 0.0) {
            return Ok(0);
        }
        let mut best: Option<usize> = None;
        for i in 1..64 {
            let ln_rho = ln_rho_max * i as f64 / 64.0;
            let ln_m = log_sum_exp(
                self.ln_majorants(ln_rho.exp())
                    .into_iter()
                    .zip(&weights)
                    .filter(|(_, &w)| w > 0.0)
                    .map(|(lm, &w)| lm + w.ln()),
            );
            let cap = best.unwrap_or(MAX_EXPANSION_DEGREE);
            if let Some(start) =
                tail::first_start_below(2.0 * ln_m, 2.0 * exponent, -2.0 * ln_rho, tol * tol, cap)
            {
                let d = start.saturating_sub(1);
                best = Some(best.map_or(d, |b| b.min(d)));
            }
        }
        best.ok_or(Error::NotConverged { tol, max_degree: MAX_EXPANSION_DEGREE })
    }
}

fn log_sum_exp(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Element of `K_B` given by its coordinates in the Malmquist basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MalmquistRep {
    sigma: Sigma,
    basis: MalmquistBasis,
    coords: Vec<Complex64>,
}

impl MalmquistRep {
    pub fn new(sigma: &Sigma, coords: Vec<Complex64>) -> Result<Self> {
        if coords.len() != sigma.n() {
            return Err(Error::InvalidInput(format!(
                "expected {} coordinates, got {}",
                sigma.n(),
                coords.len()
            )));
        }
        Ok(Self { sigma: sigma.clone(), basis: MalmquistBasis::new(sigma), coords })
    }

    /// The basis element `e_{k+1}` (zero-based `k`).
    pub fn basis_element(sigma: &Sigma, k: usize) -> Result<Self> {
        let mut coords = vec![ZERO; sigma.n()];
        *coords
            .get_mut(k)
            .ok_or_else(|| Error::InvalidInput(format!("basis index {k} out of range")))? = ONE;
        Self::new(sigma, coords)
    }

    pub fn sigma(&self) -> &Sigma {
        &self.sigma
    }

    pub fn basis(&self) -> &MalmquistBasis {
        &self.basis
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    /// `||g||_{H^2}`, equal to the Euclidean norm of the coordinates.
    pub fn h2_norm(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.basis.eval_all(z).iter().zip(&self.coords).map(|(e, c)| e * c).sum()
    }

    /// `g^(j)(center) / j!` for `j < len`.
    pub fn jet(&self, center: Complex64, len: usize) -> Vec<Complex64> {
        let mut out = vec![ZERO; len];
        for (e, c) in self.basis.expand_about(center, len).iter().zip(&self.coords) {
            for (o, x) in out.iter_mut().zip(e) {
                *o += c * x;
            }
        }
        out
    }

    /// Taylor series at the origin truncated to `len` terms.
    pub fn taylor(&self, len: usize) -> TaylorSeries {
        TaylorSeries::from_vec(self.jet(ZERO, len))
    }

    /// Taylor series at the origin truncated where the weighted tail
    /// `(sum_{j > D} |g_j|^2 (j+1)^(2 exponent))^(1/2)` is certified `<= tol`.
    pub fn certified_taylor(&self, exponent: f64, tol: f64) -> Result<TaylorSeries> {
        let d = self.basis.certified_degree(&self.coords, exponent, tol)?;
        Ok(self.taylor(d + 1))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            sigma: self.sigma.clone(),
            basis: self.basis.clone(),
            coords: self.coords.iter().map(|x| x * c).collect(),
        }
    }
}

/// `P_B k_zeta = sum_k conj(e_k(zeta)) e_k`, the projection of the Szegő
/// kernel onto `K_B`.
pub fn project_kernel(sigma: &Sigma, zeta: Complex64) -> Result<MalmquistRep> {
    if zeta.norm() >= 1.0 {
        return Err(Error::Domain(format!("|zeta| = {} >= 1", zeta.norm())));
    }
    let basis = MalmquistBasis::new(sigma);
    let coords = basis.eval_all(zeta).into_iter().map(|e| e.conj()).collect();
    MalmquistRep::new(sigma, coords)
}

/// Compressed shift on `K_B` in the Malmquist basis: entry `(i, k)` is
/// `(z e_k, e_i)_{H^2}`, computed with the trapezoid rule on [`CIRCLE_NODES`] nodes.
pub fn compressed_shift(sigma: &Sigma) -> DMatrix<Complex64> {
    compressed_shift_quadrature(sigma, CIRCLE_NODES)
}

pub fn compressed_shift_quadrature(sigma: &Sigma, nodes: usize) -> DMatrix<Complex64> {
    let basis = MalmquistBasis::new(sigma);
    let n = basis.len();
    let mut values = DMatrix::<Complex64>::zeros(nodes, n);
    let mut shifted = DMatrix::<Complex64>::zeros(nodes, n);
    for q in 0..nodes {
        let z = Complex64::from_polar(1.0, 2.0 * PI * q as f64 / nodes as f64);
        for (k, e) in basis.eval_all(z).into_iter().enumerate() {
            values[(q, k)] = e;
            shifted[(q, k)] = z * e;
        }
    }
    values.ad_mul(&shifted) / Complex64::new(nodes as f64, 0.0)
}

/// The same matrix through certified Taylor pairings `<z e_k, e_i>`.
pub fn compressed_shift_taylor(sigma: &Sigma, tol: f64) -> Result<DMatrix<Complex64>> {
    let basis = MalmquistBasis::new(sigma);
    let n = basis.len();
    let mut d = 0;
    for k in 0..n {
        let mut c = vec![ZERO; n];
        c[k] = ONE;
        d = d.max(basis.certified_degree(&c, 0.0, tol)?);
    }
    let series = basis.expand_about(ZERO, d + 2);
    Ok(DMatrix::from_fn(n, n, |i, k| {
        (1..d + 2).map(|j| series[k][j - 1] * series[i][j].conj()).sum()
    }))
}
