//! Dirichlet characters as degree-1 coefficient sources.

use super::{CoeffSource, LocalFactor};
use crate::error::{Error, Result};
use crate::num::Real;
use num_complex::Complex;

/// A Dirichlet character mod q, stored as its value table on residues.
///
/// α_{1,p} = χ(p mod q) and a(p^k) = χ(p)^k. The table is validated to be a
/// completely multiplicative homomorphism into the roots of unity (zero off
/// the units), so every downstream identity may assume χ(ab) = χ(a)χ(b).
pub struct DirichletCharacter<R: Real> {
    modulus: u64,
    /// Indexed by residue 0..q; zero at residues sharing a factor with q.
    values: Vec<Complex<R>>,
    real_valued: bool,
    principal: bool,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl<R: Real> DirichletCharacter<R> {
    /// Build from a value table on the residues coprime to q.
    ///
    /// Residues sharing a factor with q must be absent (they are fixed to
    /// zero); every coprime residue must be present.
    pub fn from_table(modulus: u64, table: &[(u64, Complex<R>)]) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Config("character modulus must be positive".into()));
        }
        // The homomorphism validation below is O(q^2); table-supplied
        // characters are meant for small moduli.
        if modulus > 4096 {
            return Err(Error::Config(format!(
                "character modulus {modulus} above the supported table bound 4096"
            )));
        }
        let q = modulus as usize;
        let tol = R::of(1e-12);
        let mut values = vec![Complex::new(R::zero(), R::zero()); q.max(1)];
        let mut seen = vec![false; q.max(1)];
        for &(r, v) in table {
            let r_red = (r % modulus) as usize;
            if gcd(r % modulus, modulus) != 1 && modulus > 1 {
                return Err(Error::Config(format!(
                    "character table assigns a value at residue {r} not coprime to {modulus}"
                )));
            }
            if (v.norm() - R::one()).abs() > tol {
                return Err(Error::NonUnitaryCharacter { residue: r });
            }
            values[r_red] = v;
            seen[r_red] = true;
        }
        if modulus == 1 {
            // Trivial character: the single residue class maps to 1.
            values[0] = Complex::new(R::one(), R::zero());
            seen[0] = true;
        }
        for r in 0..q {
            if gcd(r as u64, modulus) == 1 && !seen[r] && modulus > 1 {
                return Err(Error::Config(format!(
                    "character table is missing residue {r} (mod {modulus})"
                )));
            }
        }
        // Homomorphism check over all coprime pairs.
        for a in 0..q as u64 {
            if gcd(a, modulus) != 1 && modulus > 1 {
                continue;
            }
            for b in a..q as u64 {
                if gcd(b, modulus) != 1 && modulus > 1 {
                    continue;
                }
                let lhs = values[((a * b) % modulus) as usize];
                let rhs = values[(a % modulus) as usize] * values[(b % modulus) as usize];
                if (lhs - rhs).norm() > tol {
                    return Err(Error::NonMultiplicativeCharacter { a, b });
                }
            }
        }
        let real_valued = values.iter().all(|v| v.im.abs() <= tol);
        let principal = values
            .iter()
            .enumerate()
            .all(|(r, v)| gcd(r as u64, modulus) != 1 || (*v - Complex::new(R::one(), R::zero())).norm() <= tol);
        Ok(Self {
            modulus,
            values,
            real_valued,
            principal,
        })
    }

    /// The non-trivial character mod 4: χ₄(1)=1, χ₄(3)=−1.
    pub fn chi4() -> Self {
        Self::from_table(
            4,
            &[
                (1, Complex::new(R::one(), R::zero())),
                (3, Complex::new(-R::one(), R::zero())),
            ],
        )
        .expect("chi4 table is a character")
    }

    /// The trivial character (q=1): χ(p)=1 at every prime.
    pub fn trivial() -> Self {
        Self::from_table(1, &[]).expect("trivial table is a character")
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_principal(&self) -> bool {
        self.principal
    }

    pub fn is_real(&self) -> bool {
        self.real_valued
    }

    /// χ(n), zero when gcd(n, q) > 1.
    #[inline]
    pub fn value(&self, n: u64) -> Complex<R> {
        self.values[(n % self.modulus) as usize]
    }

    /// Real-character fast path (±1 or 0); callers check `is_real` first.
    #[inline]
    pub fn value_real(&self, n: u64) -> R {
        self.values[(n % self.modulus) as usize].re
    }

    /// Conjugate character χ̄ (value-wise conjugation).
    pub fn conjugate(&self) -> Self {
        Self {
            modulus: self.modulus,
            values: self.values.iter().map(|v| v.conj()).collect(),
            real_valued: self.real_valued,
            principal: self.principal,
        }
    }
}

impl<R: Real> CoeffSource<R> for DirichletCharacter<R> {
    fn degree(&self) -> usize {
        1
    }

    fn cutoff(&self) -> u64 {
        u64::MAX
    }

    fn is_self_dual(&self) -> bool {
        self.real_valued
    }

    fn local_factor(&self, p: u64) -> Result<LocalFactor<R>> {
        Ok(LocalFactor {
            p,
            alphas: vec![self.value(p)],
        })
    }

    fn a_pk(&self, p: u64, k: u32) -> Result<Complex<R>> {
        Ok(self.value(p).powu(k))
    }

    fn a_pk_real(&self, p: u64, k: u32) -> Result<R> {
        // χ(p) ∈ {0, ±1} for real characters, so χ(p)^k is exact.
        let v = self.value_real(p);
        if v.is_zero() {
            return Ok(R::zero());
        }
        Ok(if k % 2 == 0 { v * v } else { v })
    }

    fn as_dirichlet(&self) -> Option<&DirichletCharacter<R>> {
        Some(self)
    }

    fn bad_primes(&self) -> Vec<u64> {
        let mut out = Vec::new();
        let mut q = self.modulus;
        let mut d = 2;
        while d * d <= q {
            if q % d == 0 {
                out.push(d);
                while q % d == 0 {
                    q /= d;
                }
            }
            d += 1;
        }
        if q > 1 {
            out.push(q);
        }
        out
    }
}
