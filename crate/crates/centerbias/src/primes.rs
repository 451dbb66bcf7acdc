//! Prime and prime-power generation.
//!
//! Segmented sieve of Eratosthenes with odd-only bit storage. Segments are
//! sized to stay inside L2 cache and may be sieved by several workers at
//! once, but primes are always *delivered* in ascending order (ordered
//! hand-off through a reorder buffer), so every consumer accumulates in a
//! deterministic sequence regardless of the worker count.

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::sync::{Condvar, Mutex};

/// Hard ceiling on sieve limits; above this the flat `Vec<u64>` outputs and
/// `u64` index arithmetic here stop being a sensible design.
pub const CAPACITY_LIMIT: u64 = 1 << 40;

/// Numbers spanned per segment; odd-only bitset of 2^21 bits = 256 KiB.
const SEGMENT_SPAN: u64 = 1 << 22;

/// Ascending primes in a contiguous interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeRange {
    pub lo: u64,
    pub hi: u64,
    pub primes: Vec<u64>,
}

/// One entry of the ψ index set: `pk = p^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimePower {
    pub p: u64,
    pub k: u32,
    pub pk: u64,
}

fn check_capacity(limit: u64) -> Result<()> {
    if limit > CAPACITY_LIMIT {
        return Err(Error::SieveCapacity(limit));
    }
    Ok(())
}

/// Simple odd-only sieve used for base primes (limit ≤ √(2^40) = 2^20 in
/// practice, so the dense bitset is tiny).
fn small_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let mut primes = vec![2];
    if limit < 3 {
        return primes;
    }
    // composite[i] marks the odd number 2i+3.
    let n_odds = ((limit - 3) / 2 + 1) as usize;
    let mut composite = vec![false; n_odds];
    let mut i = 0usize;
    loop {
        let p = 2 * i as u64 + 3;
        if p * p > limit {
            break;
        }
        if !composite[i] {
            let mut m = p * p;
            while m <= limit {
                composite[((m - 3) / 2) as usize] = true;
                m += 2 * p;
            }
        }
        i += 1;
    }
    for (j, &c) in composite.iter().enumerate() {
        if !c {
            primes.push(2 * j as u64 + 3);
        }
    }
    primes
}

/// Integer square root (exact, monotone).
pub(crate) fn isqrt(n: u64) -> u64 {
    n.isqrt()
}

/// Sieve the odd numbers of `[lo, hi]` against `base` primes, pushing primes
/// (including 2 if it lies in range) into `out` in ascending order.
fn sieve_segment(lo: u64, hi: u64, base: &[u64], out: &mut Vec<u64>) {
    debug_assert!(lo <= hi);
    if 2 >= lo && 2 <= hi {
        out.push(2);
    }
    let first_odd = if lo <= 3 { 3 } else { lo | 1 };
    if first_odd > hi {
        return;
    }
    let n_odds = ((hi - first_odd) / 2 + 1) as usize;
    let mut words = vec![0u64; n_odds.div_ceil(64)];
    for &p in base.iter().skip(1) {
        // skip 2: odds need no even marking
        if p * p > hi {
            break;
        }
        let mut start = p * p;
        if start < first_odd {
            start = first_odd.div_ceil(p) * p;
            if start % 2 == 0 {
                start += p;
            }
        }
        let mut m = start;
        while m <= hi {
            let idx = ((m - first_odd) / 2) as usize;
            words[idx / 64] |= 1 << (idx % 64);
            m += 2 * p;
        }
    }
    for idx in 0..n_odds {
        if words[idx / 64] & (1 << (idx % 64)) == 0 {
            out.push(first_odd + 2 * idx as u64);
        }
    }
}

/// All primes in `[2, limit]`, ascending. `limit < 2` yields an empty range.
pub fn sieve_primes(limit: u64) -> Result<PrimeRange> {
    check_capacity(limit)?;
    let mut primes = Vec::new();
    if limit >= 2 {
        let base = small_sieve(isqrt(limit));
        let mut lo = 2;
        while lo <= limit {
            let hi = (lo + SEGMENT_SPAN - 1).min(limit);
            sieve_segment(lo, hi, &base, &mut primes);
            lo = hi + 1;
        }
    }
    Ok(PrimeRange {
        lo: 2,
        hi: limit.max(2),
        primes,
    })
}

/// Primes in `[2, limit]` delivered as chunks covering `(i·chunk, (i+1)·chunk]`.
///
/// Windows that do not intersect `[2, limit]` are skipped; the concatenation
/// of the emitted chunks equals `sieve_primes(limit)`. Memory stays bounded
/// by the chunk span plus the √limit base table.
pub fn stream_primes(limit: u64, chunk: u64) -> Result<impl Iterator<Item = PrimeRange>> {
    check_capacity(limit)?;
    assert!(chunk >= 1, "chunk size must be at least 1");
    let base = small_sieve(isqrt(limit));
    let mut next_lo = 2u64;
    Ok(std::iter::from_fn(move || {
        if next_lo > limit {
            return None;
        }
        let lo = next_lo;
        // Window boundary: smallest multiple of `chunk` at or above `lo`.
        let hi = (lo.div_ceil(chunk) * chunk).max(lo).min(limit);
        next_lo = hi + 1;
        let mut primes = Vec::new();
        sieve_segment(lo, hi, &base, &mut primes);
        Some(PrimeRange { lo, hi, primes })
    }))
}

/// Apply `f` to every prime ≤ `limit` in ascending order.
///
/// With `threads ≤ 1` the segments are sieved inline. Otherwise `threads`
/// workers sieve disjoint segments concurrently and a reorder buffer hands
/// the segments to the single consuming thread in index order, so `f`
/// observes exactly the same sequence either way.
pub fn for_each_prime<F: FnMut(u64)>(limit: u64, threads: usize, mut f: F) -> Result<()> {
    check_capacity(limit)?;
    if limit < 2 {
        return Ok(());
    }
    let n_segments = ((limit - 2) / SEGMENT_SPAN + 1) as usize;
    if threads <= 1 || n_segments == 1 {
        let base = small_sieve(isqrt(limit));
        let mut buf = Vec::new();
        for i in 0..n_segments {
            let lo = 2 + i as u64 * SEGMENT_SPAN;
            let hi = (lo + SEGMENT_SPAN - 1).min(limit);
            buf.clear();
            sieve_segment(lo, hi, &base, &mut buf);
            for &p in &buf {
                f(p);
            }
        }
        return Ok(());
    }

    let base = small_sieve(isqrt(limit));
    // Reorder buffer: workers park finished segments here; the consumer
    // takes them strictly in index order. Capacity-bounded so workers can
    // not run unboundedly ahead of the consumer.
    struct Shared {
        state: Mutex<State>,
        data_ready: Condvar,
        space_free: Condvar,
        max_ahead: usize,
    }
    struct State {
        next_claim: usize,
        next_consume: usize,
        ready: BTreeMap<usize, Vec<u64>>,
    }
    let shared = Shared {
        state: Mutex::new(State {
            next_claim: 0,
            next_consume: 0,
            ready: BTreeMap::new(),
        }),
        data_ready: Condvar::new(),
        space_free: Condvar::new(),
        max_ahead: threads * 2,
    };

    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let idx = {
                    let mut st = shared.state.lock().unwrap();
                    if st.next_claim >= n_segments {
                        break;
                    }
                    let i = st.next_claim;
                    st.next_claim += 1;
                    i
                };
                let lo = 2 + idx as u64 * SEGMENT_SPAN;
                let hi = (lo + SEGMENT_SPAN - 1).min(limit);
                let mut buf = Vec::new();
                sieve_segment(lo, hi, &base, &mut buf);
                let mut st = shared.state.lock().unwrap();
                while idx > st.next_consume + shared.max_ahead {
                    st = shared.space_free.wait(st).unwrap();
                }
                st.ready.insert(idx, buf);
                shared.data_ready.notify_all();
            });
        }
        for i in 0..n_segments {
            let buf = {
                let mut st = shared.state.lock().unwrap();
                loop {
                    if let Some(buf) = st.ready.remove(&i) {
                        st.next_consume = i + 1;
                        shared.space_free.notify_all();
                        break buf;
                    }
                    st = shared.data_ready.wait(st).unwrap();
                }
            };
            for &p in &buf {
                f(p);
            }
        }
    });
    Ok(())
}

/// Prime powers `p^k ≤ x` with `k ≥ 2`, sorted by `p^k`.
///
/// Only primes `p ≤ √x` contribute, so this list is short (O(√x / log x))
/// and is merged with the streaming prime pass wherever ψ-type sums need
/// the full prime-power index set.
pub fn higher_prime_powers_up_to(x: u64) -> Result<Vec<PrimePower>> {
    check_capacity(x)?;
    let mut out = Vec::new();
    if x < 4 {
        return Ok(out);
    }
    for &p in &sieve_primes(isqrt(x))?.primes {
        let mut pk = p * p;
        let mut k = 2u32;
        loop {
            out.push(PrimePower { p, k, pk });
            match pk.checked_mul(p) {
                Some(next) if next <= x => {
                    pk = next;
                    k += 1;
                }
                _ => break,
            }
        }
    }
    out.sort_unstable_by_key(|e| e.pk);
    Ok(out)
}

/// All prime powers `p^k ≤ x` (k ≥ 1), sorted by `p^k`.
pub fn prime_powers_up_to(x: u64) -> Result<Vec<PrimePower>> {
    assert!(x >= 2, "prime power enumeration needs x >= 2");
    let primes = sieve_primes(x)?.primes;
    let higher = higher_prime_powers_up_to(x)?;
    let mut out = Vec::with_capacity(primes.len() + higher.len());
    let mut it = higher.into_iter().peekable();
    for p in primes {
        while it.peek().is_some_and(|e| e.pk < p) {
            out.push(it.next().unwrap());
        }
        out.push(PrimePower { p, k: 1, pk: p });
    }
    out.extend(it);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_prime_trial(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn first_primes() {
        assert_eq!(
            sieve_primes(20).unwrap().primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19]
        );
    }

    #[test]
    fn empty_below_two() {
        assert!(sieve_primes(1).unwrap().primes.is_empty());
        assert!(sieve_primes(0).unwrap().primes.is_empty());
    }

    #[test]
    fn capacity_ceiling_enforced() {
        assert!(matches!(
            sieve_primes(CAPACITY_LIMIT + 1),
            Err(Error::SieveCapacity(_))
        ));
    }

    #[test]
    fn count_at_one_million() {
        assert_eq!(sieve_primes(1_000_000).unwrap().primes.len(), 78_498);
    }

    #[test]
    fn matches_trial_division_to_20000() {
        let sieved = sieve_primes(20_000).unwrap().primes;
        let trial: Vec<u64> = (2..=20_000).filter(|&n| is_prime_trial(n)).collect();
        assert_eq!(sieved, trial);
    }

    #[test]
    fn stream_concatenation_identity() {
        let whole = sieve_primes(20).unwrap().primes;
        let chunks: Vec<PrimeRange> = stream_primes(20, 10).unwrap().collect();
        assert_eq!(chunks[0].primes, vec![2, 3, 5, 7]);
        assert_eq!(chunks[1].primes, vec![11, 13, 17, 19]);
        let cat: Vec<u64> = chunks.into_iter().flat_map(|c| c.primes).collect();
        assert_eq!(cat, whole);
    }

    #[test]
    fn stream_chunk_of_one() {
        let chunks: Vec<Vec<u64>> = stream_primes(3, 1).unwrap().map(|c| c.primes).collect();
        let nonempty: Vec<Vec<u64>> = chunks.into_iter().filter(|c| !c.is_empty()).collect();
        assert_eq!(nonempty, vec![vec![2], vec![3]]);
    }

    #[test]
    fn parallel_delivery_is_ordered_and_complete() {
        let mut seq = Vec::new();
        for_each_prime(9_000_000, 1, |p| seq.push(p)).unwrap();
        let mut par = Vec::new();
        for_each_prime(9_000_000, 4, |p| par.push(p)).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.len(), 602_489); // pi(9*10^6)
    }

    #[test]
    fn prime_powers_small() {
        let pks: Vec<u64> = prime_powers_up_to(10).unwrap().iter().map(|e| e.pk).collect();
        assert_eq!(pks, vec![2, 3, 4, 5, 7, 8, 9]);
        assert_eq!(
            prime_powers_up_to(2).unwrap(),
            vec![PrimePower { p: 2, k: 1, pk: 2 }]
        );
    }

    #[test]
    fn prime_powers_count_at_100() {
        // 25 primes + 4 squares + 2 cubes + 2 fourth + 32 + 64 = 35 entries.
        let all = prime_powers_up_to(100).unwrap();
        assert_eq!(all.len(), 35);
        let brute: Vec<u64> = (2..=100u64)
            .filter(|&n| {
                let mut m = n;
                let mut p = 0;
                for d in 2..=n {
                    if m % d == 0 {
                        p = d;
                        break;
                    }
                }
                while p > 1 && m % p == 0 {
                    m /= p;
                }
                m == 1 && is_prime_trial(p)
            })
            .collect();
        assert_eq!(all.iter().map(|e| e.pk).collect::<Vec<_>>(), brute);
    }

    #[test]
    fn prime_powers_k1_equals_sieve() {
        let x = 5_000;
        let ones: Vec<u64> = prime_powers_up_to(x)
            .unwrap()
            .iter()
            .filter(|e| e.k == 1)
            .map(|e| e.pk)
            .collect();
        assert_eq!(ones, sieve_primes(x).unwrap().primes);
    }

    #[test]
    fn power_exponent_consistency() {
        for e in prime_powers_up_to(100_000).unwrap() {
            assert_eq!(e.p.pow(e.k), e.pk);
        }
    }
}
