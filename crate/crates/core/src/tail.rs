//! Certified majorants for tails of series of the form
//! `sum_{j >= start} amp * (j+1)^exponent * decay^j`.

/// Upper bound on `sum_{j >= start} amp * (j+1)^exponent * decay^j`.
///
/// Returns `f64::INFINITY` when the term ratio has not yet dropped below one
/// at `start` (the bound is only valid once the terms are decreasing).
pub fn poly_geometric_tail(amp: f64, exponent: f64, decay: f64, start: usize) -> f64 {
    if amp == 0.0 || decay == 0.0 {
        return if start == 0 && decay == 0.0 { amp } else { 0.0 };
    }
    debug_assert!((0.0..1.0).contains(&decay));
    let j = start as f64;
    let first = log_term(amp.ln(), exponent, decay.ln(), start).exp();
    if exponent <= 0.0 {
        return first / (1.0 - decay);
    }
    // ratio of consecutive terms is non-increasing in j for exponent >= 0
    let ratio = ((j + 2.0) / (j + 1.0)).powf(exponent) * decay;
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    first / (1.0 - ratio)
}

/// Same bound computed from `ln(amp)` so that huge amplitudes stay finite.
pub fn poly_geometric_tail_ln(ln_amp: f64, exponent: f64, ln_decay: f64, start: usize) -> f64 {
    if ln_amp == f64::NEG_INFINITY {
        return 0.0;
    }
    let decay = ln_decay.exp();
    let j = start as f64;
    let first = log_term(ln_amp, exponent, ln_decay, start);
    let ratio = if exponent <= 0.0 {
        decay
    } else {
        ((j + 2.0) / (j + 1.0)).powf(exponent) * decay
    };
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    (first - (1.0 - ratio).ln()).exp()
}

fn log_term(ln_amp: f64, exponent: f64, ln_decay: f64, j: usize) -> f64 {
    ln_amp + exponent * ((j + 1) as f64).ln() + ln_decay * j as f64
}

/// Smallest `start` (searched by doubling then bisection) at which the tail
/// bound drops to `tol` or below, or `None` if `max_start` is not enough.
pub fn first_start_below(
    ln_amp: f64,
    exponent: f64,
    ln_decay: f64,
    tol: f64,
    max_start: usize,
) -> Option<usize> {
    let ok = |s: usize| poly_geometric_tail_ln(ln_amp, exponent, ln_decay, s) <= tol;
    if ok(0) {
        return Some(0);
    }
    let mut hi = 1usize;
    while !ok(hi) {
        if hi >= max_start {
            return None;
        }
        hi = (hi * 2).min(max_start);
    }
    let mut lo = hi / 2;
    // invariant: !ok(lo) (or lo == 0 already rejected), ok(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}
