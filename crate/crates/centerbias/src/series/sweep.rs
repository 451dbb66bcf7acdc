//! Grid construction and the shared prefix-sweep drivers.
//!
//! Every sampled series is produced by one ascending pass over primes (or
//! prime powers): terms are accumulated with compensated summation and the
//! running value is snapshotted whenever the stream crosses a grid
//! boundary. A single-point grid therefore reproduces the sampled value
//! bit for bit — the snapshot IS the single-x evaluation.
//!
//! Exact zeros are never fed to the accumulator. This keeps streams that
//! are term-by-term sign flips of each other (prime races vs. bias sums)
//! exactly mirrored: IEEE rounding is sign-symmetric, so negating every
//! input negates every intermediate state.

use crate::error::{Error, Result};
use crate::num::{KahanComplex, KahanSum, Real};
use crate::primes;
use num_complex::Complex;

/// Sampling grid. `Dyadic` is x = 2^k for k = 4.. while 2^k ≤ xmax, plus
/// xmax itself; below 16 it degenerates to the single point xmax.
/// `LogSpaced` places n multiplicatively equidistant points on [16, xmax]
/// (deduplicated after rounding).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridSpec {
    Dyadic { xmax: u64 },
    LogSpaced { xmax: u64, n: usize },
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        match *self {
            GridSpec::Dyadic { xmax } => {
                if xmax < 2 {
                    return Err(Error::Domain(format!("grid xmax {xmax} < 2")));
                }
                let mut xs = Vec::new();
                let mut x = 16u64;
                while x <= xmax {
                    xs.push(x as f64);
                    x <<= 1;
                }
                if xs.last() != Some(&(xmax as f64)) {
                    xs.push(xmax as f64);
                }
                Ok(xs)
            }
            GridSpec::LogSpaced { xmax, n } => {
                if xmax < 16 || n == 0 {
                    return Err(Error::Domain(format!(
                        "log-spaced grid needs xmax ≥ 16 and n ≥ 1, got xmax={xmax} n={n}"
                    )));
                }
                let (lo, hi) = (16f64.ln(), (xmax as f64).ln());
                let mut xs: Vec<f64> = (0..n)
                    .map(|i| {
                        let t = if n == 1 { 1.0 } else { i as f64 / (n - 1) as f64 };
                        (lo + t * (hi - lo)).exp().round()
                    })
                    .collect();
                xs.dedup();
                Ok(xs)
            }
        }
    }
}

/// Integer prefix boundaries for a grid: p ≤ x ⟺ p ≤ ⌊x⌋.
fn bounds(xs: &[f64]) -> Result<Vec<u64>> {
    if xs.is_empty() {
        return Err(Error::Domain("empty sampling grid".into()));
    }
    for w in xs.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::Domain(format!(
                "grid not strictly increasing at {} ≥ {}",
                w[0], w[1]
            )));
        }
    }
    if !xs[0].is_finite() || xs[0] < 0.0 {
        return Err(Error::Domain(format!("bad grid start {}", xs[0])));
    }
    Ok(xs.iter().map(|&x| x.floor() as u64).collect())
}

/// Ascending prefix sums of `term(p)` over primes, snapshotted at each
/// grid point. Terms that are exactly zero are skipped.
pub(crate) fn prefix_sweep_real<R: Real, F>(xs: &[f64], threads: usize, mut term: F) -> Result<Vec<R>>
where
    F: FnMut(u64) -> Result<R>,
{
    let bounds = bounds(xs)?;
    let limit = *bounds.last().expect("nonempty");
    let mut acc = KahanSum::<R>::new();
    let mut out = Vec::with_capacity(bounds.len());
    let mut idx = 0usize;
    let mut failed: Option<Error> = None;
    if limit >= 2 {
        primes::for_each_prime(limit, threads, |p| {
            if failed.is_some() {
                return;
            }
            while idx < bounds.len() && bounds[idx] < p {
                out.push(acc.value());
                idx += 1;
            }
            match term(p) {
                Ok(t) => {
                    if t != R::zero() {
                        acc.add(t);
                    }
                }
                Err(e) => failed = Some(e),
            }
        })?;
    }
    if let Some(e) = failed {
        return Err(e);
    }
    while idx < bounds.len() {
        out.push(acc.value());
        idx += 1;
    }
    Ok(out)
}

/// Complex-valued variant of [`prefix_sweep_real`].
pub(crate) fn prefix_sweep_complex<R: Real, F>(
    xs: &[f64],
    threads: usize,
    mut term: F,
) -> Result<Vec<Complex<R>>>
where
    F: FnMut(u64) -> Result<Complex<R>>,
{
    let bounds = bounds(xs)?;
    let limit = *bounds.last().expect("nonempty");
    let mut acc = KahanComplex::<R>::new();
    let mut out = Vec::with_capacity(bounds.len());
    let mut idx = 0usize;
    let mut failed: Option<Error> = None;
    if limit >= 2 {
        primes::for_each_prime(limit, threads, |p| {
            if failed.is_some() {
                return;
            }
            while idx < bounds.len() && bounds[idx] < p {
                out.push(acc.value());
                idx += 1;
            }
            match term(p) {
                Ok(t) => {
                    if t.re != R::zero() || t.im != R::zero() {
                        acc.add(t);
                    }
                }
                Err(e) => failed = Some(e),
            }
        })?;
    }
    if let Some(e) = failed {
        return Err(e);
    }
    while idx < bounds.len() {
        out.push(acc.value());
        idx += 1;
    }
    Ok(out)
}

/// Literal running product of `factor(p)` over primes (no compensation —
/// products of near-1 factors lose nothing to cancellation).
pub(crate) fn prefix_product_real<R: Real, F>(
    xs: &[f64],
    threads: usize,
    mut factor: F,
) -> Result<Vec<R>>
where
    F: FnMut(u64) -> Result<R>,
{
    let bounds = bounds(xs)?;
    let limit = *bounds.last().expect("nonempty");
    let mut acc = R::one();
    let mut out = Vec::with_capacity(bounds.len());
    let mut idx = 0usize;
    let mut failed: Option<Error> = None;
    if limit >= 2 {
        primes::for_each_prime(limit, threads, |p| {
            if failed.is_some() {
                return;
            }
            while idx < bounds.len() && bounds[idx] < p {
                out.push(acc);
                idx += 1;
            }
            match factor(p) {
                Ok(f) => acc *= f,
                Err(e) => failed = Some(e),
            }
        })?;
    }
    if let Some(e) = failed {
        return Err(e);
    }
    while idx < bounds.len() {
        out.push(acc);
        idx += 1;
    }
    Ok(out)
}

/// Prefix sums of `term(p, k, p^k)` over all prime powers p^k ≤ x in
/// ascending p^k order (the ψ index set).
pub(crate) fn prefix_sweep_prime_powers<R: Real, F>(xs: &[f64], mut term: F) -> Result<Vec<R>>
where
    F: FnMut(u64, u32, u64) -> Result<R>,
{
    let bounds = bounds(xs)?;
    let limit = *bounds.last().expect("nonempty");
    let mut acc = KahanSum::<R>::new();
    let mut out = Vec::with_capacity(bounds.len());
    let mut idx = 0usize;
    if limit >= 2 {
        for pp in primes::prime_powers_up_to(limit)? {
            while idx < bounds.len() && bounds[idx] < pp.pk {
                out.push(acc.value());
                idx += 1;
            }
            let t = term(pp.p, pp.k, pp.pk)?;
            if t != R::zero() {
                acc.add(t);
            }
        }
    }
    while idx < bounds.len() {
        out.push(acc.value());
        idx += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_grid_shapes() {
        // 2^4..2^20 with xmax itself a power of two: 17 points.
        let xs = GridSpec::Dyadic { xmax: 1 << 20 }.points().unwrap();
        assert_eq!(xs.len(), 17);
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        // non-power xmax appended
        let xs = GridSpec::Dyadic { xmax: 10_000_000 }.points().unwrap();
        assert_eq!(xs.len(), 21);
        assert_eq!(*xs.last().unwrap(), 1e7);
        // sub-16 xmax degenerates to a single point
        assert_eq!(GridSpec::Dyadic { xmax: 10 }.points().unwrap(), vec![10.0]);
    }

    #[test]
    fn log_spaced_grid_is_ascending_and_deduped() {
        let xs = GridSpec::LogSpaced { xmax: 100_000, n: 40 }.points().unwrap();
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(xs[0], 16.0);
        assert_eq!(*xs.last().unwrap(), 100_000.0);
    }

    #[test]
    fn sweep_snapshots_match_prefix_sums() {
        // Σ 1 over primes = π(x) at each boundary.
        let counts: Vec<f64> =
            prefix_sweep_real(&[10.0, 100.0, 1000.0], 1, |_| Ok(1.0)).unwrap();
        assert_eq!(counts, vec![4.0, 25.0, 168.0]);
    }

    #[test]
    fn sweep_below_two_is_empty_sum() {
        let v: Vec<f64> = prefix_sweep_real(&[1.5], 1, |_| Ok(1.0)).unwrap();
        assert_eq!(v, vec![0.0]);
        let w: Vec<f64> = prefix_product_real(&[1.5], 1, |_| Ok(2.0)).unwrap();
        assert_eq!(w, vec![1.0]);
    }

    #[test]
    fn sweep_propagates_term_errors() {
        let r: Result<Vec<f64>> = prefix_sweep_real(&[100.0], 1, |p| {
            if p > 50 {
                Err(Error::Domain("past 50".into()))
            } else {
                Ok(1.0)
            }
        });
        assert!(r.is_err());
    }

    #[test]
    fn non_increasing_grid_rejected() {
        assert!(prefix_sweep_real::<f64, _>(&[10.0, 10.0], 1, |_| Ok(1.0)).is_err());
        assert!(prefix_sweep_real::<f64, _>(&[], 1, |_| Ok(1.0)).is_err());
    }

    #[test]
    fn prime_power_sweep_counts() {
        // prime powers ≤ 10: 2,3,4,5,7,8,9 → 7 entries.
        let v: Vec<f64> = prefix_sweep_prime_powers(&[10.0], |_, _, _| Ok(1.0)).unwrap();
        assert_eq!(v, vec![7.0]);
    }
}
