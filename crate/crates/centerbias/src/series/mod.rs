//! Prime sums and products: partial Euler products, bias and second-moment
//! sums, the U window sum, ψ, weighted prime counts, races, and the
//! point-count product.
//!
//! All of these are prefix objects over the ascending prime (or prime
//! power) stream, so a whole sampled series costs one sieve pass. The
//! single-x entry points are one-point grids through the same code path,
//! which is what makes "sampled value == fresh evaluation" exact rather
//! than approximate.
//!
//! Term shape matters for two exact identities downstream:
//! - p^{−1/2} is always produced by `recip_power`, so the bias stream for a
//!   quadratic character and the corresponding prime-race stream see
//!   bit-identical term magnitudes and differ only by IEEE sign flips;
//! - the central-point local factor is evaluated once in real arithmetic
//!   (`local_factor_real`) and shared by the scaled product and the
//!   point-count product, making one exactly the running inverse of the
//!   other.

mod sweep;

pub use sweep::GridSpec;

use crate::coeffs::LFunctionSpec;
use crate::error::{Error, Result};
use crate::num::Real;
use crate::primes;
use num_complex::Complex;

/// One operation sampled along a grid.
#[derive(Debug, Clone)]
pub struct SampledSeries<V> {
    /// Strictly increasing sample points.
    pub xs: Vec<f64>,
    pub values: Vec<V>,
    pub label: String,
}

impl<V> SampledSeries<V> {
    pub(crate) fn new(label: impl Into<String>, xs: Vec<f64>, values: Vec<V>) -> Self {
        debug_assert_eq!(xs.len(), values.len());
        Self {
            xs,
            values,
            label: label.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Final sample (largest x).
    pub fn last(&self) -> Option<(f64, &V)> {
        self.xs.last().map(|&x| (x, self.values.last().expect("same length")))
    }
}

/// Real-valued series ops that [`sample`] can dispatch on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesOp {
    Bias,
    SecondMoment,
    Tail,
    CentralProduct,
    Psi,
}

/// p^{−s} for real s. The s = 1/2, 1, 0 cases bypass `powf` so that
/// streams which must mirror each other term-for-term (bias vs. race) or
/// hit exact rationals (s = 0 counting) share one rounding path.
fn recip_power<R: Real>(p: u64, s: R) -> R {
    if s == R::of(0.5) {
        R::of_u64(p).sqrt().recip()
    } else if s == R::one() {
        R::of_u64(p).recip()
    } else if s == R::zero() {
        R::one()
    } else {
        R::of_u64(p).powf(-s)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// ∏_j (1 − α_{j,p} p^{−1/2}) in real arithmetic.
///
/// Sources list conjugate alphas adjacently, so the complex running
/// product keeps an exactly-zero imaginary part (fl(x·y) − fl(y·x) = 0)
/// and the real part is the exact real product — this is what makes the
/// scaled central product and the point-count product exact inverses.
fn local_factor_real<R: Real>(spec: &LFunctionSpec<R>, p: u64) -> Result<R> {
    let v = recip_power(p, R::of(0.5));
    let lf = spec.source.local_factor(p)?;
    let mut z = Complex::new(R::one(), R::zero());
    for a in &lf.alphas {
        z *= Complex::new(R::one(), R::zero()) - a * v;
    }
    Ok(z.re)
}

fn check_cutoff<R: Real>(spec: &LFunctionSpec<R>, xs: &[f64]) -> Result<()> {
    let limit = xs.last().copied().unwrap_or(0.0).floor() as u64;
    let cutoff = spec.source.cutoff();
    if limit > cutoff {
        return Err(Error::OutOfCutoff { p: limit, cutoff });
    }
    Ok(())
}

/// Chebyshev-bias sum Σ_{p≤x} a_π(p)/√p at each grid point.
pub fn bias_series<R: Real>(
    spec: &LFunctionSpec<R>,
    xs: &[f64],
    threads: usize,
) -> Result<SampledSeries<R>> {
    check_cutoff(spec, xs)?;
    let half = R::of(0.5);
    let values = sweep::prefix_sweep_real(xs, threads, |p| {
        Ok(spec.source.a_pk_real(p, 1)? * recip_power(p, half))
    })?;
    Ok(SampledSeries::new(
        format!("bias[{}]", spec.name),
        xs.to_vec(),
        values,
    ))
}

pub fn bias_sum<R: Real>(spec: &LFunctionSpec<R>, x: f64) -> Result<R> {
    Ok(bias_series(spec, &[x], 1)?.values[0])
}

/// Second-moment sum Σ_{p≤x} a_π(p²)/p, where a_π(p²) is the Satake power
/// sum α₁² + ⋯ + αₙ² (for degree 2: a_π(p)² − 2, not the Hecke a_{p²}).
pub fn second_moment_series<R: Real>(
    spec: &LFunctionSpec<R>,
    xs: &[f64],
    threads: usize,
) -> Result<SampledSeries<R>> {
    check_cutoff(spec, xs)?;
    let values = sweep::prefix_sweep_real(xs, threads, |p| {
        Ok(spec.source.a_pk_real(p, 2)? / R::of_u64(p))
    })?;
    Ok(SampledSeries::new(
        format!("second_moment[{}]", spec.name),
        xs.to_vec(),
        values,
    ))
}

pub fn second_moment_sum<R: Real>(spec: &LFunctionSpec<R>, x: f64) -> Result<R> {
    Ok(second_moment_series(spec, &[x], 1)?.values[0])
}

/// Window sum U_{1/2}(x) = Σ_{√x < p ≤ x} a_π(p²)/(2p); equals
/// (second_moment_sum(x) − second_moment_sum(√x))/2 up to rounding.
pub fn u_half<R: Real>(spec: &LFunctionSpec<R>, x: f64, threads: usize) -> Result<R> {
    if !(x >= 4.0) {
        return Err(Error::Domain(format!("u_half needs x ≥ 4, got {x}")));
    }
    check_cutoff(spec, &[x])?;
    let values = sweep::prefix_sweep_real(&[x], threads, |p| {
        let pf = p as f64;
        // p > √x ⟺ p² > x; p² is exact in f64 for p ≤ 2^26.
        if pf * pf > x {
            Ok(spec.source.a_pk_real(p, 2)? / (R::of(2.0) * R::of_u64(p)))
        } else {
            Ok(R::zero())
        }
    })?;
    Ok(values[0])
}

/// Convergent tail Σ_{p≤x} Σ_{k≥3} a_π(p^k)/(k p^{k/2}), truncated once
/// p^{k/2} > 10^18 (each dropped term is below 10^{−18}·degree).
pub fn tail_series<R: Real>(
    spec: &LFunctionSpec<R>,
    xs: &[f64],
    threads: usize,
) -> Result<SampledSeries<R>> {
    check_cutoff(spec, xs)?;
    let floor = R::of(1e-18);
    let values = sweep::prefix_sweep_real(xs, threads, |p| {
        let v = recip_power(p, R::of(0.5));
        let mut w = v * v * v; // p^{-3/2}
        let mut k = 3u32;
        let mut acc = R::zero();
        while w >= floor {
            acc += spec.source.a_pk_real(p, k)? * w / R::of_u64(k as u64);
            w *= v;
            k += 1;
        }
        Ok(acc)
    })?;
    Ok(SampledSeries::new(
        format!("tail[{}]", spec.name),
        xs.to_vec(),
        values,
    ))
}

pub fn tail_sum<R: Real>(spec: &LFunctionSpec<R>, x: f64) -> Result<R> {
    Ok(tail_series(spec, &[x], 1)?.values[0])
}

/// ψ(x,π) = Σ_{p^k ≤ x} log p · a_π(p^k), for self-dual specs.
pub fn psi_series<R: Real>(spec: &LFunctionSpec<R>, xs: &[f64]) -> Result<SampledSeries<R>> {
    if !spec.self_dual() {
        return Err(Error::UnsupportedFamily(
            "psi is implemented for self-dual specs (real coefficients) only".into(),
        ));
    }
    check_cutoff(spec, xs)?;
    let values = sweep::prefix_sweep_prime_powers(xs, |p, k, _pk| {
        Ok(R::of_u64(p).ln() * spec.source.a_pk_real(p, k)?)
    })?;
    Ok(SampledSeries::new(
        format!("psi[{}]", spec.name),
        xs.to_vec(),
        values,
    ))
}

pub fn psi<R: Real>(spec: &LFunctionSpec<R>, x: f64) -> Result<R> {
    Ok(psi_series(spec, &[x])?.values[0])
}

/// Σ_{p≤x} Σ_j −log(1 − α_{j,p} p^{−s}), principal branch per factor.
///
/// Every factor satisfies |α p^{−s}| < 1 for Re s > 0 at the primes we
/// touch, so no branch crossing occurs and exp of this equals the literal
/// finite product to rounding.
pub fn log_partial_euler_product<R: Real>(
    spec: &LFunctionSpec<R>,
    x: f64,
    s: Complex<R>,
) -> Result<Complex<R>> {
    check_cutoff(spec, &[x])?;
    let values = sweep::prefix_sweep_complex(&[x], 1, |p| {
        let w = (-s * R::of_u64(p).ln()).exp();
        let lf = spec.source.local_factor(p)?;
        let mut t = Complex::new(R::zero(), R::zero());
        for a in &lf.alphas {
            let factor = Complex::new(R::one(), R::zero()) - a * w;
            if factor.norm() <= R::of(1e-300) {
                return Err(Error::SingularFactor { p });
            }
            t -= factor.ln();
        }
        Ok(t)
    })?;
    Ok(values[0])
}

/// The literal finite product ∏_{p≤x} ∏_j (1 − α_{j,p} p^{−s})^{−1}.
pub fn partial_euler_product<R: Real>(
    spec: &LFunctionSpec<R>,
    x: f64,
    s: Complex<R>,
) -> Result<Complex<R>> {
    check_cutoff(spec, &[x])?;
    let limit = x.floor() as u64;
    let mut acc = Complex::new(R::one(), R::zero());
    if limit >= 2 {
        for range in primes::stream_primes(limit, 1 << 22)? {
            for p in range.primes {
                let w = (-s * R::of_u64(p).ln()).exp();
                let lf = spec.source.local_factor(p)?;
                let mut denom = Complex::new(R::one(), R::zero());
                for a in &lf.alphas {
                    denom *= Complex::new(R::one(), R::zero()) - a * w;
                }
                if denom.norm() <= R::of(1e-300) {
                    return Err(Error::SingularFactor { p });
                }
                acc /= denom;
            }
        }
    }
    Ok(acc)
}

/// (log x)^m · ∏_{p≤x} ∏_j (1 − α_{j,p} p^{−1/2})^{−1} along a grid, via
/// the real-arithmetic local factors (exact for self-dual specs).
pub fn central_product_series<R: Real>(
    spec: &LFunctionSpec<R>,
    xs: &[f64],
    threads: usize,
) -> Result<SampledSeries<R>> {
    check_cutoff(spec, xs)?;
    let log_sums = sweep::prefix_sweep_real(xs, threads, |p| {
        let lr = local_factor_real(spec, p)?;
        if !(lr > R::zero()) {
            return Err(Error::SingularFactor { p });
        }
        Ok(-lr.ln())
    })?;
    let m = spec.m as i32;
    let values = xs
        .iter()
        .zip(log_sums)
        .map(|(&x, ls)| R::of(x).ln().powi(m) * ls.exp())
        .collect();
    Ok(SampledSeries::new(
        format!("central_product[{}]", spec.name),
        xs.to_vec(),
        values,
    ))
}

pub fn central_scaled_product<R: Real>(spec: &LFunctionSpec<R>, x: f64) -> Result<R> {
    Ok(central_product_series(spec, &[x], 1)?.values[0])
}

/// Weighted prime count π_s(x; q, a) = Σ_{p≤x, p≡a (q)} p^{−s}.
pub fn weighted_prime_count<R: Real>(q: u64, a: u64, s: R, x: f64, threads: usize) -> Result<R> {
    if q == 0 || gcd(a % q.max(1), q) != 1 {
        return Err(Error::Domain(format!(
            "weighted prime count needs gcd(a, q) = 1, got a={a}, q={q}"
        )));
    }
    let ar = a % q;
    let values = sweep::prefix_sweep_real(&[x], threads, |p| {
        if p % q == ar {
            Ok(recip_power(p, s))
        } else {
            Ok(R::zero())
        }
    })?;
    Ok(values[0])
}

/// Prime race π_s(x;q,a) − π_s(x;q,b) as one signed stream, so the result
/// is the exact termwise mirror of the corresponding character bias sum.
pub fn prime_race_series<R: Real>(
    q: u64,
    a: u64,
    b: u64,
    s: R,
    xs: &[f64],
    threads: usize,
) -> Result<SampledSeries<R>> {
    if q == 0 || gcd(a % q.max(1), q) != 1 || gcd(b % q.max(1), q) != 1 {
        return Err(Error::Domain(format!(
            "race needs gcd(a,q) = gcd(b,q) = 1, got a={a}, b={b}, q={q}"
        )));
    }
    let (ar, br) = (a % q, b % q);
    if ar == br {
        return Err(Error::Domain(format!(
            "race classes coincide: {a} ≡ {b} (mod {q})"
        )));
    }
    let values = sweep::prefix_sweep_real(xs, threads, |p| {
        let r = p % q;
        if r == ar {
            Ok(R::one() * recip_power(p, s))
        } else if r == br {
            Ok(-R::one() * recip_power(p, s))
        } else {
            Ok(R::zero())
        }
    })?;
    Ok(SampledSeries::new(
        format!("race[{q};{a}-{b}]"),
        xs.to_vec(),
        values,
    ))
}

pub fn prime_race<R: Real>(q: u64, a: u64, b: u64, s: R, x: f64) -> Result<R> {
    Ok(prime_race_series(q, a, b, s, &[x], 1)?.values[0])
}

/// Point-count product ∏_{p≤x} ∏_j (1 − α_{j,p} p^{−1/2}); for an elliptic
/// curve the local value is exactly N_p/p (N_p = p+1−a_p at good p, p−a_p
/// at bad p), so this is the Goldfeld product ∏ N_p/p.
pub fn goldfeld_series<R: Real>(
    spec: &LFunctionSpec<R>,
    xs: &[f64],
    threads: usize,
) -> Result<SampledSeries<R>> {
    check_cutoff(spec, xs)?;
    let values =
        sweep::prefix_product_real(xs, threads, |p| local_factor_real(spec, p))?;
    Ok(SampledSeries::new(
        format!("goldfeld[{}]", spec.name),
        xs.to_vec(),
        values,
    ))
}

pub fn goldfeld_product<R: Real>(spec: &LFunctionSpec<R>, x: f64) -> Result<R> {
    Ok(goldfeld_series(spec, &[x], 1)?.values[0])
}

/// Sample one real-valued op along a grid in a single sieve pass.
pub fn sample<R: Real>(
    spec: &LFunctionSpec<R>,
    op: SeriesOp,
    grid: &GridSpec,
    threads: usize,
) -> Result<SampledSeries<R>> {
    let xs = grid.points()?;
    match op {
        SeriesOp::Bias => bias_series(spec, &xs, threads),
        SeriesOp::SecondMoment => second_moment_series(spec, &xs, threads),
        SeriesOp::Tail => tail_series(spec, &xs, threads),
        SeriesOp::CentralProduct => central_product_series(spec, &xs, threads),
        SeriesOp::Psi => psi_series(spec, &xs),
    }
}
