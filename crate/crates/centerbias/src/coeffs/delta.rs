//! Ramanujan τ coefficients and the Δ coefficient source.
//!
//! τ is generated exactly in integer arithmetic from Δ/q = ∏(1−q^n)^24.
//! Writing F = ∏(1−q^n)^24 = Σ a_m q^m and E = ∏(1−q^n) = Σ_k (−1)^k q^{g_k}
//! (pentagonal numbers g_k = k(3k−1)/2, k ∈ ℤ), the identity
//! q·F′·E = 24·q·E′·F gives, comparing coefficients of q^m,
//!
//!   m·a_m = −Σ_{k≠0} (−1)^k (m − 25·g_k) a_{m−g_k},   τ(n) = a_{n−1}.
//!
//! Each step costs O(√m) multiply-adds, so the whole table to 10^6 is about
//! 10^9 integer operations — seconds, versus the O(N²) of dense squaring.
//! The dense route (literally multiplying out (1−q)(1−q²)… and raising to
//! the 24th power) survives as [`tau_by_eta_product`], the independent
//! oracle the recurrence is tested against at small cutoffs.
//!
//! Products |coefficient · a_{m−g}| overflow i128 near the top of the range
//! (|τ(n)| itself approaches 2^125 at n = 2·10^6), so the inner loop keeps
//! the running sum in two i128 accumulators — one for the low 64 bits of
//! each a-value, one for the high part — and reassembles the exact quotient
//! at the end. Bounds, for cutoff ≤ 2·10^6: |a| ≤ d(n)·n^{11/2} < 2^126,
//! so a_hi < 2^62, |coef| < 25·2^21 < 2^26, and with ≤ 2¹² pentagonal terms
//! the accumulators stay under 2^102 (low) and 2^100 (high).

use super::{CoeffSource, LocalFactor};
use crate::error::{Error, Result};
use crate::num::Real;
use num_complex::Complex;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Largest supported table cutoff; beyond this |τ(n)| can exceed i128.
pub const MAX_TAU_CUTOFF: u64 = 2_000_000;

const CACHE_MAGIC: &[u8; 5] = b"TAUv1";

/// Exact τ(n) for 1 ≤ n ≤ cutoff.
pub struct TauTable {
    cutoff: u64,
    /// values[n-1] = τ(n).
    values: Vec<i128>,
}

/// Pentagonal pairs (g_k, k) for k = ±1, ±2, … with g_k ≤ limit, ascending g.
fn pentagonal_numbers(limit: u64) -> Vec<(u64, i64)> {
    let mut out = Vec::new();
    let mut k = 1u64;
    loop {
        let g1 = k * (3 * k - 1) / 2;
        if g1 > limit {
            break;
        }
        out.push((g1, k as i64));
        let g2 = k * (3 * k + 1) / 2;
        if g2 <= limit {
            out.push((g2, -(k as i64)));
        }
        k += 1;
    }
    out.sort_unstable();
    out
}

/// Split an i128 as hi·2^64 + lo with lo ∈ [0, 2^64).
#[inline]
fn split64(a: i128) -> (i128, i128) {
    let lo = a & ((1i128 << 64) - 1);
    ((a - lo) >> 64, lo)
}

impl TauTable {
    /// Generate τ(1..=cutoff) by the pentagonal log-derivative recurrence.
    pub fn build(cutoff: u64) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::Domain("tau cutoff must be at least 2".into()));
        }
        if cutoff > MAX_TAU_CUTOFF {
            return Err(Error::Domain(format!(
                "tau cutoff {cutoff} above the exact-i128 bound {MAX_TAU_CUTOFF}"
            )));
        }
        let n_max = (cutoff - 1) as usize; // a_m needed for m ≤ cutoff−1
        let pent = pentagonal_numbers(cutoff - 1);
        let mut a = vec![0i128; n_max + 1];
        a[0] = 1;
        for m in 1..=n_max {
            let mut acc_hi = 0i128;
            let mut acc_lo = 0i128;
            for &(g, k) in &pent {
                let g = g as usize;
                if g > m {
                    break;
                }
                // term: −(−1)^k (m − 25g) a_{m−g}; −(−1)^k is +1 for odd k
                let sign = if k % 2 != 0 { 1 } else { -1 };
                let c = sign * ((m as i128) - 25 * g as i128);
                let (hi, lo) = split64(a[m - g]);
                acc_hi += c * hi;
                acc_lo += c * lo;
            }
            let mi = m as i128;
            let hi_div = acc_hi.div_euclid(mi);
            let hi_rem = acc_hi.rem_euclid(mi);
            let t = (hi_rem << 64) + acc_lo;
            // The recurrence is exact over ℤ: m must divide the assembled sum.
            assert!(
                t.rem_euclid(mi) == 0,
                "tau recurrence divisibility failed at m={m}"
            );
            a[m] = (hi_div << 64) + t.div_euclid(mi);
        }
        Ok(Self { cutoff, values: a })
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    /// τ(n); errors past the cutoff so callers enlarge the table explicitly.
    pub fn tau(&self, n: u64) -> Result<i128> {
        if n == 0 || n > self.cutoff {
            return Err(Error::OutOfCutoff {
                p: n,
                cutoff: self.cutoff,
            });
        }
        Ok(self.values[(n - 1) as usize])
    }

    /// Serialize as magic ‖ cutoff (u64 LE) ‖ τ(1..=cutoff) (i128 LE each).
    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&self.cutoff.to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_cache(path: &Path) -> Result<Self> {
        let err = |reason: &str| Error::TauCache {
            path: path.display().to_string(),
            reason: reason.into(),
        };
        let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut magic = [0u8; 5];
        r.read_exact(&mut magic).map_err(|_| err("truncated header"))?;
        if &magic != CACHE_MAGIC {
            return Err(err("bad magic bytes"));
        }
        let mut cut = [0u8; 8];
        r.read_exact(&mut cut).map_err(|_| err("truncated cutoff"))?;
        let cutoff = u64::from_le_bytes(cut);
        if cutoff < 2 || cutoff > MAX_TAU_CUTOFF {
            return Err(err("cutoff out of range"));
        }
        let mut values = Vec::with_capacity(cutoff as usize);
        let mut buf = [0u8; 16];
        for _ in 0..cutoff {
            r.read_exact(&mut buf).map_err(|_| err("truncated values"))?;
            values.push(i128::from_le_bytes(buf));
        }
        if r.read(&mut [0u8; 1])? != 0 {
            return Err(err("trailing bytes after table"));
        }
        if values[0] != 1 {
            return Err(err("tau(1) != 1"));
        }
        Ok(Self { cutoff, values })
    }

    /// Cache file name for a cutoff under `dir`.
    pub fn cache_path(dir: &Path, cutoff: u64) -> PathBuf {
        dir.join(format!("tau_{cutoff}.bin"))
    }

    /// Read a cached table of exactly this cutoff, else build and cache it.
    pub fn load_or_build(cutoff: u64, cache_dir: Option<&Path>) -> Result<Self> {
        if let Some(dir) = cache_dir {
            let path = Self::cache_path(dir, cutoff);
            if path.is_file() {
                return Self::read_cache(&path);
            }
            let table = Self::build(cutoff)?;
            std::fs::create_dir_all(dir)?;
            table.write_cache(&path)?;
            return Ok(table);
        }
        Self::build(cutoff)
    }
}

/// Direct power-series oracle: expand ∏_{n≤limit}(1−q^n) literally, then
/// raise to the 24th power by repeated squaring. O(limit²) per multiply —
/// only suitable for small cutoffs, which is its entire purpose: it shares
/// no code (and no pentagonal identity) with [`TauTable::build`].
pub fn tau_by_eta_product(limit: usize) -> Vec<i128> {
    let n = limit + 1;
    let mul = |f: &[i128], g: &[i128]| {
        let mut out = vec![0i128; n];
        for (i, &fi) in f.iter().enumerate() {
            if fi == 0 {
                continue;
            }
            for (j, &gj) in g.iter().enumerate().take(n - i) {
                out[i + j] += fi * gj;
            }
        }
        out
    };
    let mut e = vec![0i128; n];
    e[0] = 1;
    for m in 1..=limit {
        // multiply by (1 − q^m) in place, descending to reuse the buffer
        for i in (m..n).rev() {
            e[i] -= e[i - m];
        }
    }
    let e2 = mul(&e, &e);
    let e4 = mul(&e2, &e2);
    let e8 = mul(&e4, &e4);
    let e16 = mul(&e8, &e8);
    let e24 = mul(&e16, &e8);
    // τ(n) = coefficient of q^{n-1} in E^24.
    e24
}

/// Δ as a degree-2 self-dual source: α_{1,p} = e^{iθ_p}, α_{2,p} = e^{−iθ_p}
/// with cos θ_p = τ(p)/(2 p^{11/2}).
pub struct DeltaSource<R: Real> {
    table: Arc<TauTable>,
    _scalar: std::marker::PhantomData<fn() -> R>,
}

impl<R: Real> DeltaSource<R> {
    pub fn new(table: Arc<TauTable>) -> Self {
        Self {
            table,
            _scalar: std::marker::PhantomData,
        }
    }

    pub fn table(&self) -> &TauTable {
        &self.table
    }

    /// a(p) = τ(p)/p^{11/2} = 2 cos θ_p.
    pub fn ap(&self, p: u64) -> Result<R> {
        let tau = self.table.tau(p)?;
        let pf = R::of_u64(p);
        // τ fits f64's range for every supported cutoff; the conversion
        // rounds to 53 bits, which is the precision of the scalar anyway.
        let t = R::of(tau as f64);
        Ok(t / (pf.powi(5) * pf.sqrt()))
    }
}

impl<R: Real> CoeffSource<R> for DeltaSource<R> {
    fn degree(&self) -> usize {
        2
    }

    fn cutoff(&self) -> u64 {
        self.table.cutoff()
    }

    fn is_self_dual(&self) -> bool {
        true
    }

    fn local_factor(&self, p: u64) -> Result<LocalFactor<R>> {
        let a = self.ap(p)?;
        let half = a / R::of(2.0);
        // Deligne: |cos θ_p| ≤ 1. Tolerate only float round-off beyond it.
        assert!(
            half.abs() <= R::one() + R::of(1e-9),
            "Deligne bound violated at p={p}: table corrupt?"
        );
        let c = half.min(R::one()).max(-R::one());
        let s = (R::one() - c * c).sqrt();
        Ok(LocalFactor {
            p,
            alphas: vec![Complex::new(c, s), Complex::new(c, -s)],
        })
    }

    fn a_pk_real(&self, p: u64, k: u32) -> Result<R> {
        // Power sums of a conjugate unit pair: s_k = a·s_{k−1} − s_{k−2}.
        let a = self.ap(p)?;
        match k {
            0 => Ok(R::of(2.0)),
            1 => Ok(a),
            _ => {
                let mut prev = R::of(2.0);
                let mut cur = a;
                for _ in 2..=k {
                    (prev, cur) = (cur, a * cur - prev);
                }
                Ok(cur)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAU_FIRST_12: [i128; 12] = [
        1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920, 534612, -370944,
    ];

    #[test]
    fn recurrence_matches_known_values() {
        let t = TauTable::build(10_000).unwrap();
        for (i, &v) in TAU_FIRST_12.iter().enumerate() {
            assert_eq!(t.tau(i as u64 + 1).unwrap(), v);
        }
        assert_eq!(t.tau(97).unwrap(), 75_013_568_546);
        assert_eq!(t.tau(100).unwrap(), 37_534_859_200);
        assert_eq!(t.tau(1000).unwrap(), -30_328_412_970_240_000);
        assert_eq!(t.tau(9999).unwrap(), -4_966_286_247_298_016_818_632);
        assert_eq!(t.tau(10000).unwrap(), -482_606_811_957_501_440_000);
    }

    #[test]
    fn recurrence_matches_eta_product_oracle() {
        let t = TauTable::build(300).unwrap();
        let oracle = tau_by_eta_product(300);
        for n in 1..=300u64 {
            assert_eq!(t.tau(n).unwrap(), oracle[(n - 1) as usize], "tau({n})");
        }
    }

    #[test]
    fn multiplicativity_on_coprime_pairs() {
        let t = TauTable::build(10_000).unwrap();
        // tau(6) = tau(2) tau(3)
        assert_eq!(t.tau(6).unwrap(), t.tau(2).unwrap() * t.tau(3).unwrap());
        let pairs = [(4u64, 9u64), (8, 27), (5, 7), (25, 49), (11, 13), (99, 101)];
        for (m, n) in pairs {
            assert_eq!(
                t.tau(m * n).unwrap(),
                t.tau(m).unwrap() * t.tau(n).unwrap(),
                "tau({m}*{n})"
            );
        }
    }

    #[test]
    fn hecke_recursion_at_prime_powers() {
        // tau(p^2) = tau(p)^2 − p^11 (weight-12 Hecke relation): an
        // independent structural identity the recurrence never uses.
        let t = TauTable::build(200).unwrap();
        for p in [2u64, 3, 5, 7, 11, 13] {
            let p11 = (p as i128).pow(11);
            assert_eq!(
                t.tau(p * p).unwrap(),
                t.tau(p).unwrap() * t.tau(p).unwrap() - p11
            );
        }
    }

    #[test]
    fn cutoff_errors_are_reported() {
        let t = TauTable::build(100).unwrap();
        assert!(matches!(
            t.tau(101),
            Err(Error::OutOfCutoff { p: 101, cutoff: 100 })
        ));
        assert!(TauTable::build(MAX_TAU_CUTOFF + 1).is_err());
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let t = TauTable::build(500).unwrap();
        let path = TauTable::cache_path(dir.path(), 500);
        t.write_cache(&path).unwrap();
        let back = TauTable::read_cache(&path).unwrap();
        assert_eq!(back.cutoff(), 500);
        for n in 1..=500 {
            assert_eq!(back.tau(n).unwrap(), t.tau(n).unwrap());
        }
        // Corrupt magic is refused.
        std::fs::write(dir.path().join("bad.bin"), b"NOPEx").unwrap();
        assert!(TauTable::read_cache(&dir.path().join("bad.bin")).is_err());
    }

    #[test]
    fn load_or_build_uses_cache(){
        let dir = tempfile::tempdir().unwrap();
        let a = TauTable::load_or_build(300, Some(dir.path())).unwrap();
        assert!(TauTable::cache_path(dir.path(), 300).is_file());
        let b = TauTable::load_or_build(300, Some(dir.path())).unwrap();
        assert_eq!(a.tau(300).unwrap(), b.tau(300).unwrap());
    }

    #[test]
    fn delta_source_normalized_coefficients() {
        let t = Arc::new(TauTable::build(1000).unwrap());
        let src = DeltaSource::<f64>::new(t);
        // a(2) = τ(2)/2^{11/2} = −24/(32√2) = −3√2/8
        assert!((src.ap(2).unwrap() - (-3.0 * std::f64::consts::SQRT_2 / 8.0)).abs() < 1e-15);
        // Newton identity a(p²) = a(p)² − 2.
        for p in [2u64, 3, 5, 7, 11] {
            let a1 = src.a_pk_real(p, 1).unwrap();
            let a2 = src.a_pk_real(p, 2).unwrap();
            assert!((a2 - (a1 * a1 - 2.0)).abs() < 1e-12);
        }
        let lf = src.local_factor(7).unwrap();
        let prod = lf.alphas[0] * lf.alphas[1];
        assert!((prod.re - 1.0).abs() < 1e-12 && prod.im.abs() < 1e-12);
    }

    #[test]
    fn deligne_bound_with_margin() {
        let t = Arc::new(TauTable::build(10_000).unwrap());
        let src = DeltaSource::<f64>::new(t.clone());
        for p in crate::primes::sieve_primes(10_000).unwrap().primes {
            assert!(src.ap(p).unwrap().abs() <= 2.0 + 1e-9, "p={p}");
        }
    }
}
