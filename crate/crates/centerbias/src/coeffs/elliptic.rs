//! Elliptic curves over ℚ as degree-2 coefficient sources.
//!
//! Traces of Frobenius a_p at good primes come from the quadratic-character
//! sum over x mod p: on the short model y² = x³ − 27c₄x − 54c₆ (isomorphic
//! to the given model away from p | 6),
//!
//!   a_p = −Σ_{x mod p} χ_p(x³ − 27c₄x − 54c₆),
//!
//! with χ_p the Legendre symbol realized as a table of the squares mod p.
//! That is O(p) per prime — fine for the desk-scale caps this crate runs
//! at (Σ_{p≤10^5} p ≈ 4.5·10^8 table lookups), hopeless for 10^8; the cap
//! is a constructor parameter so the trade-off stays visible.
//!
//! Bad primes avoid Tate's algorithm: additive reduction (p | c₄) gives
//! a_p = 0, multiplicative reduction is split (a_p = 1) exactly when −c₆
//! is a square mod p. For p ∈ {2,3} the classification rules above do not
//! apply and the a_p value must be supplied explicitly.

use super::{CoeffSource, LocalFactor};
use crate::error::{Error, Result};
use crate::num::Real;
use num_complex::Complex;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

/// Hard ceiling on point-counting primes: keeps the O(p) inner loop in u64
/// arithmetic (3p < 2^23 per evaluation) and the square table in memory.
pub const MAX_AP_PRIME: u64 = 1 << 21;

/// A Weierstrass model y² + a₁xy + a₃y = x³ + a₂x² + a₄x + a₆ with its
/// standard invariants. The model is assumed minimal (caller's contract);
/// non-minimality at a bad prime surfaces as a conductor mismatch error.
pub struct EllipticCurve {
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
    pub a6: i64,
    pub conductor: u64,
    pub c4: i128,
    pub c6: i128,
    pub disc: i128,
    /// Supplied a_p values for bad primes the rules cannot classify
    /// (p ∈ {2,3}); consulted first for any bad prime.
    bad_ap: BTreeMap<u64, i64>,
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Legendre symbol (a/p) for odd prime p.
fn legendre(a: i128, p: u64) -> i32 {
    let r = a.rem_euclid(p as i128) as u64;
    if r == 0 {
        return 0;
    }
    if mod_pow(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

impl EllipticCurve {
    pub fn new(
        a: [i64; 5],
        conductor: u64,
        bad_ap: BTreeMap<u64, i64>,
    ) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = a;
        if a.iter().any(|v| v.abs() > 10_000) {
            return Err(Error::Config(
                "Weierstrass coefficients above 10^4 are outside the supported range".into(),
            ));
        }
        if conductor < 1 {
            return Err(Error::Config("conductor must be positive".into()));
        }
        for (&p, &v) in &bad_ap {
            if !(-1..=1).contains(&v) {
                return Err(Error::Config(format!(
                    "supplied a_p at bad prime {p} must be -1, 0, or 1"
                )));
            }
        }
        let b2 = (a1 * a1 + 4 * a2) as i128;
        let b4 = (2 * a4 + a1 * a3) as i128;
        let b6 = (a3 * a3 + 4 * a6) as i128;
        let b8 = (a1 * a1) as i128 * a6 as i128 + 4 * a2 as i128 * a6 as i128
            - a1 as i128 * a3 as i128 * a4 as i128
            + a2 as i128 * (a3 * a3) as i128
            - (a4 * a4) as i128;
        debug_assert_eq!(4 * b8, b2 * b6 - b4 * b4);
        let c4 = b2 * b2 - 24 * b4;
        let c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6;
        let disc = -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
        if disc == 0 {
            return Err(Error::Config("singular Weierstrass model".into()));
        }
        Ok(Self {
            a1,
            a2,
            a3,
            a4,
            a6,
            conductor,
            c4,
            c6,
            disc,
            bad_ap,
        })
    }

    /// 11a1: y² + y = x³ − x² − 10x − 20, conductor 11, rank 0.
    pub fn curve_11a1() -> Result<Self> {
        Self::new([0, -1, 1, -10, -20], 11, BTreeMap::new())
    }

    /// 37a1: y² + y = x³ − x, conductor 37, rank 1.
    pub fn curve_37a1() -> Result<Self> {
        Self::new([0, 0, 1, -1, 0], 37, BTreeMap::new())
    }

    /// Bad reduction ⇔ p divides the minimal discriminant.
    pub fn is_bad(&self, p: u64) -> bool {
        self.disc.rem_euclid(p as i128) == 0
    }

    /// Brute-force reference count: a_p = p + 1 − #E(F_p) by enumerating
    /// all (x, y). O(p²) — the oracle the fast path is judged against,
    /// and the production path for the good primes 2 and 3.
    pub fn ap_brute(&self, p: u64) -> i64 {
        let pm = p as i64;
        let red = |v: i64| v.rem_euclid(pm);
        let mut count = 0i64;
        for x in 0..pm {
            let rhs = red(red(red(x * x) * x) + red(self.a2 * red(x * x)) + red(self.a4 * x) + self.a6);
            for y in 0..pm {
                let lhs = red(red(y * y) + red(self.a1 * x * y) + red(self.a3 * y));
                if lhs == rhs {
                    count += 1;
                }
            }
        }
        pm + 1 - (count + 1)
    }

    /// Good p ≥ 5: quadratic-character sum on the short c-invariant model.
    fn ap_good_qr(&self, p: u64) -> i64 {
        debug_assert!(p >= 5 && !self.is_bad(p));
        let a = (-27 * self.c4).rem_euclid(p as i128) as u64;
        let b = (-54 * self.c6).rem_euclid(p as i128) as u64;
        // chi[v] = Legendre symbol (v/p) as a lookup table of the squares.
        let mut chi = vec![-1i8; p as usize];
        chi[0] = 0;
        for x in 1..=(p / 2) {
            chi[((x * x) % p) as usize] = 1;
        }
        let mut s = 0i64;
        for x in 0..p {
            let x2 = (x * x) % p;
            let f = ((x2 * x) % p + (a * x) % p + b) % p;
            s += chi[f as usize] as i64;
        }
        let ap = -s;
        // Hasse: |a_p| ≤ 2√p; a violation means the arithmetic is broken.
        assert!(ap * ap <= 4 * p as i64, "Hasse bound violated at p={p}");
        ap
    }

    fn ap_bad(&self, p: u64) -> Result<i64> {
        if self.conductor % p != 0 {
            return Err(Error::Config(format!(
                "prime {p} divides the discriminant but not the conductor: model not minimal"
            )));
        }
        if let Some(&v) = self.bad_ap.get(&p) {
            return Ok(v);
        }
        if p < 5 {
            return Err(Error::BadPrimeUndecided { p });
        }
        if self.c4.rem_euclid(p as i128) == 0 {
            return Ok(0); // additive
        }
        // Multiplicative: split (a_p = 1) iff −c6 is a square mod p.
        Ok(if legendre(-self.c6, p) == 1 { 1 } else { -1 })
    }

    /// Trace of Frobenius, dispatching on reduction type.
    pub fn ap(&self, p: u64) -> Result<i64> {
        if p > MAX_AP_PRIME {
            return Err(Error::Domain(format!(
                "point counting capped at p ≤ {MAX_AP_PRIME}, got {p}"
            )));
        }
        if self.is_bad(p) {
            self.ap_bad(p)
        } else if p < 5 {
            Ok(self.ap_brute(p))
        } else {
            Ok(self.ap_good_qr(p))
        }
    }

    /// Local point count: N_p = p + 1 − a_p at good p, p − a_p at bad p.
    pub fn np(&self, p: u64) -> Result<u64> {
        let ap = self.ap(p)?;
        let n = if self.is_bad(p) {
            p as i64 - ap
        } else {
            p as i64 + 1 - ap
        };
        Ok(n as u64)
    }

    /// Hecke coefficients a_n for n ≤ n_max via multiplicativity and the
    /// prime-power recursion a_{p^e} = a_p a_{p^{e−1}} − p·a_{p^{e−2}}
    /// (good p; at bad p the factor is linear and a_{p^e} = a_p^e).
    pub fn an_table(&self, n_max: u64) -> Result<Vec<i64>> {
        let n = n_max as usize;
        let mut lpf = vec![0u32; n + 1];
        for i in 2..=n {
            if lpf[i] == 0 {
                for j in (i..=n).step_by(i) {
                    if lpf[j] == 0 {
                        lpf[j] = i as u32;
                    }
                }
            }
        }
        let mut a = vec![0i64; n + 1];
        if n >= 1 {
            a[1] = 1;
        }
        for i in 2..=n {
            let p = lpf[i] as usize;
            let mut pe = p;
            let mut m = i / p;
            while m % p == 0 {
                pe *= p;
                m /= p;
            }
            a[i] = if m > 1 {
                a[pe] * a[m]
            } else if i == p {
                self.ap(p as u64)?
            } else if self.is_bad(p as u64) {
                a[p] * a[i / p]
            } else {
                a[p] * a[i / p] - p as i64 * a[i / (p * p)]
            };
        }
        Ok(a)
    }
}

/// Coefficient-source view: a(p) = a_p/√p, Satake parameters e^{±iθ_p} at
/// good p (cos θ_p = a_p/(2√p)) and [a_p/√p, 0] at bad p.
///
/// Traces are memoized: a sweep asks for a(p), a(p²), and the local factor
/// of the same prime back to back, and each would otherwise repeat the
/// O(p) character sum.
pub struct EllipticSource<R: Real> {
    curve: Arc<EllipticCurve>,
    ap_cap: u64,
    traces: Mutex<HashMap<u64, i64>>,
    _scalar: std::marker::PhantomData<fn() -> R>,
}

impl<R: Real> EllipticSource<R> {
    pub fn new(curve: Arc<EllipticCurve>, ap_cap: u64) -> Self {
        Self {
            curve,
            ap_cap: ap_cap.min(MAX_AP_PRIME),
            traces: Mutex::new(HashMap::new()),
            _scalar: std::marker::PhantomData,
        }
    }

    pub fn curve(&self) -> &EllipticCurve {
        &self.curve
    }

    fn check_cutoff(&self, p: u64) -> Result<()> {
        if p > self.ap_cap {
            return Err(Error::OutOfCutoff {
                p,
                cutoff: self.ap_cap,
            });
        }
        Ok(())
    }

    fn ap_cached(&self, p: u64) -> Result<i64> {
        if let Some(&a) = self.traces.lock().expect("trace cache poisoned").get(&p) {
            return Ok(a);
        }
        let a = self.curve.ap(p)?;
        self.traces.lock().expect("trace cache poisoned").insert(p, a);
        Ok(a)
    }

    /// Normalized coefficient a(p) = a_p/√p.
    pub fn ap_normalized(&self, p: u64) -> Result<R> {
        self.check_cutoff(p)?;
        Ok(R::of(self.ap_cached(p)? as f64) / R::of_u64(p).sqrt())
    }
}

impl<R: Real> CoeffSource<R> for EllipticSource<R> {
    fn degree(&self) -> usize {
        2
    }

    fn cutoff(&self) -> u64 {
        self.ap_cap
    }

    fn is_self_dual(&self) -> bool {
        true
    }

    fn local_factor(&self, p: u64) -> Result<LocalFactor<R>> {
        let a = self.ap_normalized(p)?;
        if self.curve.is_bad(p) {
            return Ok(LocalFactor {
                p,
                alphas: vec![Complex::new(a, R::zero()), Complex::new(R::zero(), R::zero())],
            });
        }
        let c = (a / R::of(2.0)).min(R::one()).max(-R::one());
        let s = (R::one() - c * c).sqrt();
        Ok(LocalFactor {
            p,
            alphas: vec![Complex::new(c, s), Complex::new(c, -s)],
        })
    }

    fn a_pk_real(&self, p: u64, k: u32) -> Result<R> {
        let a = self.ap_normalized(p)?;
        if self.curve.is_bad(p) {
            // single real alpha a(p), second slot zero
            return Ok(a.powi(k as i32));
        }
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

    fn bad_primes(&self) -> Vec<u64> {
        let mut out = Vec::new();
        let mut n = self.curve.conductor;
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                out.push(d);
                while n % d == 0 {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            out.push(n);
        }
        out
    }
}
