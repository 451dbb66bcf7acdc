//! Satake parameters and Hecke-coefficient power sums.
//!
//! A [`CoeffSource`] hands the series layer the local data of one
//! L-function, normalized so the critical line is Re(s) = 1/2: at each
//! prime a list of Satake parameters α_{j,p} (unit modulus at unramified
//! primes), and the power sums a(p^k) = α_{1,p}^k + … + α_{n,p}^k.
//!
//! Self-dual degree-2 sources (the modular and elliptic families) never
//! touch complex arithmetic for their power sums: with α·ᾱ = 1 the power
//! sums satisfy the Chebyshev-style recurrence
//! s_k = a(p)·s_{k−1} − s_{k−2}, s_0 = 2, s_1 = a(p),
//! which is evaluated in real arithmetic so downstream real series are
//! exactly real rather than real-up-to-rounding.

pub mod delta;
pub mod dirichlet;
pub mod elliptic;

pub use delta::{tau_by_eta_product, DeltaSource, TauTable};
pub use dirichlet::DirichletCharacter;
pub use elliptic::{EllipticCurve, EllipticSource};

use crate::error::{Error, Result};
use crate::num::Real;
use num_complex::Complex;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Satake data at one prime.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFactor<R: Real> {
    pub p: u64,
    /// α_{1,p}, …; unit modulus at unramified p, possibly 0 or inside the
    /// unit disc at ramified p. Slot order is not meaningful (the single
    /// nonzero bad-prime alpha sits first by convention).
    pub alphas: Vec<Complex<R>>,
}

/// Coefficient source for one L-function family.
pub trait CoeffSource<R: Real>: Send + Sync {
    /// Degree n (number of alpha slots at unramified primes).
    fn degree(&self) -> usize;

    /// Largest prime this source can answer for.
    fn cutoff(&self) -> u64;

    /// Whether all power sums are real (alphas closed under conjugation).
    fn is_self_dual(&self) -> bool;

    /// Satake parameters at p.
    fn local_factor(&self, p: u64) -> Result<LocalFactor<R>>;

    /// Power sum a(p^k) = Σ_j α_{j,p}^k.
    ///
    /// For self-dual sources the imaginary part is exactly zero (computed
    /// via [`CoeffSource::a_pk_real`], not by rounding a complex power).
    fn a_pk(&self, p: u64, k: u32) -> Result<Complex<R>> {
        if self.is_self_dual() {
            return Ok(Complex::new(self.a_pk_real(p, k)?, R::zero()));
        }
        let lf = self.local_factor(p)?;
        let mut s = Complex::new(R::zero(), R::zero());
        for a in &lf.alphas {
            s += a.powu(k);
        }
        Ok(s)
    }

    /// Real-arithmetic power sum; only meaningful for self-dual sources.
    fn a_pk_real(&self, p: u64, k: u32) -> Result<R>;

    /// Downcast hook for the explicit-formula path, which is implemented
    /// only for degree-1 Dirichlet sources.
    fn as_dirichlet(&self) -> Option<&DirichletCharacter<R>> {
        None
    }

    /// Primes of bad reduction / ramification known to the source.
    fn bad_primes(&self) -> Vec<u64> {
        Vec::new()
    }
}

/// Full description of one L-function: coefficient source plus the
/// analytic bookkeeping the limit formulas need.
///
/// `m` is the order of vanishing at the central point, `r_order` the order
/// R of the second-moment L-function at s = 1, and `nu` the exponent of √2
/// in the predicted limit constant; the identity ν = −R is validated at
/// construction.
#[derive(Clone)]
pub struct LFunctionSpec<R: Real> {
    pub name: String,
    pub degree: usize,
    pub source: Arc<dyn CoeffSource<R>>,
    pub m: u32,
    pub r_order: i32,
    pub nu: i32,
    /// Archimedean shifts μ_π(j) (trivial zeros sit at −2k − μ_π(j)).
    pub mu: Vec<R>,
    pub conductor: Option<u64>,
}

impl<R: Real> LFunctionSpec<R> {
    pub fn new(
        name: impl Into<String>,
        source: Arc<dyn CoeffSource<R>>,
        m: u32,
        r_order: i32,
        nu: i32,
        mu: Vec<R>,
        conductor: Option<u64>,
    ) -> Result<Self> {
        if nu != -r_order {
            return Err(Error::Config(format!(
                "nu must equal -R: got nu={nu}, R={r_order}"
            )));
        }
        if let Some(n) = conductor {
            for b in source.bad_primes() {
                if n % b != 0 {
                    return Err(Error::Config(format!(
                        "bad prime {b} does not divide the conductor {n}"
                    )));
                }
            }
        }
        Ok(Self {
            name: name.into(),
            degree: source.degree(),
            source,
            m,
            r_order,
            nu,
            mu,
            conductor,
        })
    }

    pub fn self_dual(&self) -> bool {
        self.source.is_self_dual()
    }

    /// Slope R/2 − m predicted for the bias sum Σ a(p)/√p against log log x.
    pub fn predicted_bias_slope(&self) -> R {
        R::of(self.r_order as f64 / 2.0 - self.m as f64)
    }

    /// Slope −R predicted for the second-moment sum Σ a(p²)/p.
    pub fn predicted_second_moment_slope(&self) -> R {
        R::of(-self.r_order as f64)
    }
}

/// User-supplied local data: an explicit table of alphas per prime.
///
/// The table must contain every prime up to its largest key; asking for a
/// missing smaller prime is a hole in the user's data, not a cutoff issue.
pub struct CustomSource<R: Real> {
    degree: usize,
    table: BTreeMap<u64, Vec<Complex<R>>>,
    cutoff: u64,
    self_dual: bool,
}

impl<R: Real> CustomSource<R> {
    pub fn new(degree: usize, table: BTreeMap<u64, Vec<Complex<R>>>) -> Result<Self> {
        let cutoff = table.keys().next_back().copied().unwrap_or(0);
        let tol = R::of(1e-12);
        for (&p, alphas) in &table {
            if alphas.len() > degree {
                return Err(Error::Config(format!(
                    "custom source lists {} alphas at p={p} but degree is {degree}",
                    alphas.len()
                )));
            }
            for a in alphas {
                if (a.norm() - R::one()).abs() > tol && a.norm() > tol {
                    return Err(Error::Config(format!(
                        "custom alpha at p={p} is neither unit modulus nor zero"
                    )));
                }
            }
        }
        // Self-dual iff every alpha list is closed under conjugation.
        let self_dual = table.values().all(|alphas| {
            alphas.iter().all(|a| {
                alphas
                    .iter()
                    .any(|b| (b.re - a.re).abs() <= tol && (b.im + a.im).abs() <= tol)
            })
        });
        Ok(Self {
            degree,
            table,
            cutoff,
            self_dual,
        })
    }
}

impl<R: Real> CoeffSource<R> for CustomSource<R> {
    fn degree(&self) -> usize {
        self.degree
    }

    fn cutoff(&self) -> u64 {
        self.cutoff
    }

    fn is_self_dual(&self) -> bool {
        self.self_dual
    }

    fn local_factor(&self, p: u64) -> Result<LocalFactor<R>> {
        if p > self.cutoff {
            return Err(Error::OutOfCutoff {
                p,
                cutoff: self.cutoff,
            });
        }
        let alphas = self
            .table
            .get(&p)
            .ok_or_else(|| Error::Domain(format!("custom source has no entry at prime {p}")))?
            .clone();
        Ok(LocalFactor { p, alphas })
    }

    fn a_pk_real(&self, p: u64, k: u32) -> Result<R> {
        let lf = self.local_factor(p)?;
        let mut s = Complex::new(R::zero(), R::zero());
        for a in &lf.alphas {
            s += a.powu(k);
        }
        debug_assert!(s.im.abs() < R::of(1e-12));
        Ok(s.re)
    }

    fn bad_primes(&self) -> Vec<u64> {
        self.table
            .iter()
            .filter(|(_, alphas)| {
                alphas.len() < self.degree
                    || alphas.iter().any(|a| a.norm() < R::of(0.5))
            })
            .map(|(&p, _)| p)
            .collect()
    }
}
