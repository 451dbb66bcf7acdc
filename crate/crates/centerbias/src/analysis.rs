//! Statistical layer over sampled series: log-log slope fits, logarithmic
//! measure of exceptional sets, and growth-ratio reports.
//!
//! Everything here is pure arithmetic on an already-computed
//! [`SampledSeries`]; nothing touches primes or coefficients. Fits are
//! unweighted least squares over the sampling grid — the grids are
//! (close to) log-uniform, which is the natural weighting for statements
//! that hold "outside a set of finite logarithmic measure".

use crate::error::{Error, Result};
use crate::num::Real;
use crate::series::SampledSeries;

/// Least-squares fit of a series against log log x.
#[derive(Debug, Clone, Copy)]
pub struct FitReport<R> {
    pub slope: R,
    pub intercept: R,
    pub rms_residual: R,
    pub n_samples: usize,
}

/// Fit `values ≈ slope · log log x + intercept` by unweighted least
/// squares. Exact on affine inputs (residual at rounding level).
///
/// Requires every x ≥ 3 (so log log x is defined and positive) and at
/// least two samples on a non-degenerate grid.
pub fn loglog_fit<R: Real>(series: &SampledSeries<R>) -> Result<FitReport<R>> {
    let n = series.len();
    if n < 2 {
        return Err(Error::Domain(format!(
            "slope fit needs at least 2 samples, got {n}"
        )));
    }
    let mut us = Vec::with_capacity(n);
    for &x in &series.xs {
        if x < 3.0 {
            return Err(Error::Domain(format!(
                "slope fit needs x ≥ 3 everywhere (log log undefined below), got {x}"
            )));
        }
        us.push(R::of(x).ln().ln());
    }
    let nf = R::of(n as f64);
    let u_mean = us.iter().copied().sum::<R>() / nf;
    let v_mean = series.values.iter().copied().sum::<R>() / nf;
    let mut suu = R::zero();
    let mut suv = R::zero();
    for (u, v) in us.iter().zip(&series.values) {
        let du = *u - u_mean;
        suu += du * du;
        suv += du * (*v - v_mean);
    }
    if suu < R::of(1e-24) {
        return Err(Error::Domain(
            "degenerate grid: log log x effectively constant, fit is singular".into(),
        ));
    }
    let slope = suv / suu;
    let intercept = v_mean - slope * u_mean;
    let mut ss = R::zero();
    for (u, v) in us.iter().zip(&series.values) {
        let r = *v - (intercept + slope * *u);
        ss += r * r;
    }
    Ok(FitReport {
        slope,
        intercept,
        rms_residual: (ss / nf).sqrt(),
        n_samples: n,
    })
}

/// Logarithmic measure ∫ dt/t of the set {x ∈ [x_min, x_max] : |D(x)| > ε},
/// estimated from samples of the deviation D.
///
/// |D| is interpolated linearly in u = log t between samples, threshold
/// crossings are located on each segment, and the measure is the total
/// u-length above threshold. The estimate is only as fine as the grid —
/// excursions between samples are invisible.
pub fn exceptional_measure<R: Real>(series: &SampledSeries<R>, eps: R) -> Result<R> {
    if !(eps > R::zero()) {
        return Err(Error::Domain(format!(
            "exceptional-measure threshold must be positive, got {eps}"
        )));
    }
    let n = series.len();
    let mut total = R::zero();
    for i in 1..n {
        let u0 = R::of(series.xs[i - 1]).ln();
        let u1 = R::of(series.xs[i]).ln();
        let len = u1 - u0;
        let f0 = series.values[i - 1].abs() - eps;
        let f1 = series.values[i].abs() - eps;
        if f0 > R::zero() && f1 > R::zero() {
            total += len;
        } else if f0 > R::zero() || f1 > R::zero() {
            // one endpoint above: the above-threshold fraction of the segment
            let frac = if f0 > R::zero() {
                f0 / (f0 - f1)
            } else {
                f1 / (f1 - f0)
            };
            total += len * frac;
        }
    }
    Ok(total)
}

/// The growth laws a ψ-type series is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalizer {
    /// √x (log log x)²
    SqrtLogLogSq,
    /// √x (log x)²
    SqrtLogSq,
    /// √x log x
    SqrtLog,
}

impl Normalizer {
    pub fn eval<R: Real>(self, x: f64) -> R {
        let xr = R::of(x);
        let lx = xr.ln();
        match self {
            Normalizer::SqrtLogLogSq => xr.sqrt() * lx.ln() * lx.ln(),
            Normalizer::SqrtLogSq => xr.sqrt() * lx * lx,
            Normalizer::SqrtLog => xr.sqrt() * lx,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Normalizer::SqrtLogLogSq => "sqrt_loglog_sq",
            Normalizer::SqrtLogSq => "sqrt_log_sq",
            Normalizer::SqrtLog => "sqrt_log",
        }
    }
}

/// max over samples of |value| / normalizer(x). Sign-flip invariant.
///
/// Requires every x ≥ 3 so all three normalizers are positive.
pub fn bounded_ratio_report<R: Real>(
    series: &SampledSeries<R>,
    normalizer: Normalizer,
) -> Result<R> {
    let mut best = R::zero();
    for (&x, &v) in series.xs.iter().zip(&series.values) {
        if x < 3.0 {
            return Err(Error::Domain(format!(
                "growth ratio needs x ≥ 3 everywhere, got {x}"
            )));
        }
        let r = v.abs() / normalizer.eval::<R>(x);
        if r > best {
            best = r;
        }
    }
    Ok(best)
}
