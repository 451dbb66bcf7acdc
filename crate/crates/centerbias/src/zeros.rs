//! Zero-data ingestion and the zero-dependent side of the truncated
//! explicit formula.
//!
//! A [`ZeroTable`] holds the positive ordinates γ of nontrivial zeros
//! ρ = 1/2 + iγ; the conjugate zeros are implied and every sum here pairs
//! ρ with ρ̄ analytically, so results are exactly real for real s.
//!
//! Three consumers:
//! - [`zero_sum`]: Σ_{0<γ≤T} [x^{ρ−s}/(ρ−s) + x^{ρ̄−s}/(ρ̄−s)], the
//!   oscillating term of the explicit formula at truncation height T;
//! - [`r_s_term`]: the full remainder R_s(x) — zero sum plus, per zero,
//!   ∫ x^{ρ−z}/(ρ−z)² dz along the horizontal ray from s, by adaptive
//!   Simpson quadrature with a bounded, reported truncation tail;
//! - [`explicit_formula_report`]: both sides of the truncated identity
//!   Σ_{p^k≤x} log p · a(p^k) p^{−ks} = −m x^{1/2−s}/(1/2−s) − L′/L(s)
//!   − Σ_ρ x^{ρ−s}/(ρ−s) + Σ_{j,k} x^{−2k−μ_j−s}/(2k+μ_j+s), itemized.
//!
//! The explicit-formula check is restricted to non-principal Dirichlet
//! characters: they are the one family whose L and L′ this crate can
//! evaluate off the real axis, and the principal character would add a
//! pole term the truncated identity does not model.

use std::path::Path;

use num_complex::Complex;

use crate::coeffs::LFunctionSpec;
use crate::error::{Error, Result};
use crate::lvalues;
use crate::num::{KahanComplex, Real};
use crate::primes;

/// Ordinates of nontrivial zeros on the critical line, ascending.
///
/// Entries are the positive imaginary parts only; a zero of multiplicity
/// r > 1 appears as r equal consecutive entries.
#[derive(Debug, Clone)]
pub struct ZeroTable {
    gammas: Vec<f64>,
    /// Which L-function the ordinates belong to.
    pub lfunction: String,
    /// Where the data came from (file path or "inline").
    pub source: String,
}

impl ZeroTable {
    /// Validate and wrap a list of ordinates (ascending, all positive).
    pub fn from_gammas(lfunction: impl Into<String>, gammas: Vec<f64>) -> Result<Self> {
        for (i, &g) in gammas.iter().enumerate() {
            if !(g > 0.0) || !g.is_finite() {
                return Err(Error::ZeroParse {
                    path: "inline".into(),
                    line: i + 1,
                    reason: format!("ordinate {g} is not a positive finite number"),
                });
            }
            if i > 0 && g < gammas[i - 1] {
                return Err(Error::ZeroParse {
                    path: "inline".into(),
                    line: i + 1,
                    reason: format!("ordinate {g} breaks ascending order"),
                });
            }
        }
        Ok(Self {
            gammas,
            lfunction: lfunction.into(),
            source: "inline".into(),
        })
    }

    /// Load a table from a text file: one ordinate per line, `#` comment
    /// lines and blank lines ignored, ascending order enforced. An empty
    /// file is a valid (empty) table.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let display = path.display().to_string();
        let mut gammas = Vec::new();
        let mut prev = 0.0f64;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let g: f64 = line.parse().map_err(|_| Error::ZeroParse {
                path: display.clone(),
                line: idx + 1,
                reason: format!("not a number: {line:?}"),
            })?;
            if !(g > 0.0) || !g.is_finite() {
                return Err(Error::ZeroParse {
                    path: display.clone(),
                    line: idx + 1,
                    reason: format!("ordinate {g} is not a positive finite number"),
                });
            }
            if g < prev {
                return Err(Error::ZeroParse {
                    path: display.clone(),
                    line: idx + 1,
                    reason: format!("ordinate {g} breaks ascending order"),
                });
            }
            prev = g;
            gammas.push(g);
        }
        let lfunction = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "zeros".into());
        Ok(Self {
            gammas,
            lfunction,
            source: display,
        })
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    /// Largest stored ordinate; 0 for an empty table.
    pub fn t_max(&self) -> f64 {
        self.gammas.last().copied().unwrap_or(0.0)
    }

    /// Number of ordinates ≤ t.
    pub fn count_below(&self, t: f64) -> usize {
        self.gammas.partition_point(|&g| g <= t)
    }
}

/// x^{ρ−s}/(ρ−s), with the conjugate-pair guard against s sitting on a zero.
fn pole_term<R: Real>(rho: Complex<R>, s: Complex<R>, lnx: R) -> Result<Complex<R>> {
    let d = rho - s;
    if d.norm_sqr() < R::of(1e-24) {
        return Err(Error::Domain(format!(
            "s = {s} coincides with the zero at {rho}; pole term undefined"
        )));
    }
    Ok((d * lnx).exp() / d)
}

/// Σ_{0<γ≤T} [x^{ρ−s}/(ρ−s) + x^{ρ̄−s}/(ρ̄−s)].
///
/// Conjugates are paired analytically: for real s each pair contributes
/// exactly 2 Re[x^{ρ−s}/(ρ−s)], so the imaginary part of the result is
/// identically zero, not merely small.
pub fn zero_sum<R: Real>(table: &ZeroTable, x: f64, s: Complex<R>, t: f64) -> Result<Complex<R>> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("zero sum needs x > 0, got {x}")));
    }
    if table.is_empty() {
        return Ok(Complex::new(R::zero(), R::zero()));
    }
    if t > table.t_max() {
        return Err(Error::InsufficientZeroData {
            requested: t,
            t_max: table.t_max(),
        });
    }
    let lnx = R::of(x).ln();
    let half = R::of(0.5);
    let mut acc = KahanComplex::<R>::new();
    for &g in &table.gammas {
        if g > t {
            break;
        }
        let rho = Complex::new(half, R::of(g));
        let up = pole_term(rho, s, lnx)?;
        if s.im == R::zero() {
            acc.add(Complex::new(R::of(2.0) * up.re, R::zero()));
        } else {
            let down = pole_term(rho.conj(), s, lnx)?;
            acc.add(up + down);
        }
    }
    Ok(acc.value())
}

/// Adaptive Simpson on a smooth complex integrand; returns (integral,
/// error estimate). The integrands used here are analytic and pole-free
/// on the interval, so the classical |S₂−S₁|/15 control is reliable.
fn adaptive_simpson<R: Real, F: Fn(R) -> Complex<R>>(
    f: &F,
    a: R,
    fa: Complex<R>,
    b: R,
    fb: Complex<R>,
    fm: Complex<R>,
    whole: Complex<R>,
    tol: R,
    depth: u32,
) -> (Complex<R>, R) {
    let m = (a + b) * R::of(0.5);
    let lm = (a + m) * R::of(0.5);
    let rm = (m + b) * R::of(0.5);
    let flm = f(lm);
    let frm = f(rm);
    let h6 = (b - a) / R::of(12.0);
    let left = (fa + flm * R::of(4.0) + fm) * h6;
    let right = (fm + frm * R::of(4.0) + fb) * h6;
    let delta = left + right - whole;
    if depth == 0 || delta.norm() <= R::of(15.0) * tol {
        return (left + right + delta / R::of(15.0), delta.norm() / R::of(15.0));
    }
    let half_tol = tol * R::of(0.5);
    let (lv, le) = adaptive_simpson(f, a, fa, m, fm, flm, left, half_tol, depth - 1);
    let (rv, re) = adaptive_simpson(f, m, fm, b, fb, frm, right, half_tol, depth - 1);
    (lv + rv, le + re)
}

fn integrate<R: Real, F: Fn(R) -> Complex<R>>(f: F, a: R, b: R, tol: R) -> (Complex<R>, R) {
    let fa = f(a);
    let fb = f(b);
    let m = (a + b) * R::of(0.5);
    let fm = f(m);
    let whole = (fa + fm * R::of(4.0) + fb) * ((b - a) / R::of(6.0));
    adaptive_simpson(&f, a, fa, b, fb, fm, whole, tol, 24)
}

/// The remainder term R_s(x) of the horizontal-line expansion together
/// with its numerical error budget.
#[derive(Debug, Clone)]
pub struct RsTerm<R> {
    pub value: Complex<R>,
    /// Quadrature error plus the bound on the truncated integral tails.
    pub est_error: R,
    pub zeros_used: usize,
}

/// R_s(x) = (1/log x) Σ_{|γ|≤T} [ x^{ρ−s}/(ρ−s) + ∫ x^{ρ−z}/(ρ−z)² dz ],
/// the integral taken along Re z from Re s to Re s + 40/log x (beyond
/// which the integrand is below x^{1/2−Re s}e^{−40} and the discarded
/// tail is added to `est_error`).
pub fn r_s_term<R: Real>(table: &ZeroTable, x: f64, s: Complex<R>, t: f64) -> Result<RsTerm<R>> {
    r_s_term_with_tol(table, x, s, t, R::of(1e-12))
}

pub(crate) fn r_s_term_with_tol<R: Real>(
    table: &ZeroTable,
    x: f64,
    s: Complex<R>,
    t: f64,
    tol: R,
) -> Result<RsTerm<R>> {
    if !(s.re > R::of(0.5)) {
        return Err(Error::Domain(format!(
            "remainder term needs Re s > 1/2, got {}",
            s.re
        )));
    }
    if !(x >= 2.0) {
        return Err(Error::Domain(format!("remainder term needs x ≥ 2, got {x}")));
    }
    if table.is_empty() {
        return Ok(RsTerm {
            value: Complex::new(R::zero(), R::zero()),
            est_error: R::zero(),
            zeros_used: 0,
        });
    }
    if t > table.t_max() {
        return Err(Error::InsufficientZeroData {
            requested: t,
            t_max: table.t_max(),
        });
    }
    let lnx = R::of(x).ln();
    let hi = R::of(40.0) / lnx;
    let zsum = zero_sum(table, x, s, t)?;
    let mut acc = KahanComplex::<R>::new();
    let mut est = R::zero();
    let mut used = 0usize;
    let half = R::of(0.5);
    let tail_scale = ((half - s.re) * lnx).exp() * R::of((-40.0f64).exp()) / lnx;
    for &g in &table.gammas {
        if g > t {
            break;
        }
        used += 1;
        let gr = R::of(g);
        // ∫_0^{hi} x^{ρ−s−t}/(ρ−s−t)² dt for ρ = 1/2 + iγ; Re(ρ−s−t) < 0
        // throughout, so the denominator never vanishes.
        let one_branch = |rho: Complex<R>| {
            let f = move |u: R| {
                let d = rho - s - Complex::new(u, R::zero());
                (d * lnx).exp() / (d * d)
            };
            integrate(f, R::zero(), hi, tol)
        };
        let rho = Complex::new(half, gr);
        let (iv, ie) = one_branch(rho);
        if s.im == R::zero() {
            acc.add(Complex::new(R::of(2.0) * iv.re, R::zero()));
            est += R::of(2.0) * ie;
        } else {
            let (cv, ce) = one_branch(rho.conj());
            acc.add(iv + cv);
            est += ie + ce;
        }
        // |ρ − s − t| ≥ |γ ∓ Im s| on the discarded ray
        let d2_up = (gr - s.im) * (gr - s.im) + (s.re - half) * (s.re - half);
        let d2_dn = (gr + s.im) * (gr + s.im) + (s.re - half) * (s.re - half);
        est += tail_scale * (d2_up.recip() + d2_dn.recip());
    }
    Ok(RsTerm {
        value: (zsum + acc.value()) / lnx,
        est_error: est / lnx,
        zeros_used: used,
    })
}

/// Both sides of the truncated explicit formula at (x, s), itemized.
#[derive(Debug, Clone)]
pub struct ExplicitFormulaReport<R> {
    pub x: f64,
    pub s: Complex<R>,
    pub t_cut: f64,
    pub zeros_used: usize,
    /// Σ_{p^k≤x} log p · a(p^k) p^{−ks} (half-weighted final term at integer x).
    pub lhs: Complex<R>,
    /// −m · x^{1/2−s}/(1/2−s).
    pub central_term: Complex<R>,
    pub l_log_derivative: Complex<R>,
    pub zero_sum: Complex<R>,
    pub trivial_tail: Complex<R>,
    /// central_term − L′/L − zero_sum + trivial_tail.
    pub rhs: Complex<R>,
    /// |lhs − rhs|.
    pub residual: R,
    pub est_error: R,
}

/// Evaluate the truncated explicit formula for a non-principal Dirichlet
/// spec: prime-power side on the left, (central term, L′/L, zeros up to T,
/// trivial-zero tail) on the right.
pub fn explicit_formula_report<R: Real>(
    spec: &LFunctionSpec<R>,
    table: &ZeroTable,
    x: f64,
    s: Complex<R>,
    t: f64,
) -> Result<ExplicitFormulaReport<R>> {
    let chi = spec.source.as_dirichlet().ok_or_else(|| {
        Error::UnsupportedFamily(
            "explicit-formula checks need a Dirichlet-character family (L and L′ \
             are only evaluated off the real axis for those)"
                .into(),
        )
    })?;
    if chi.is_principal() {
        return Err(Error::UnsupportedFamily(
            "principal characters add a pole term the truncated identity does not model".into(),
        ));
    }
    if spec.mu.is_empty() {
        return Err(Error::Domain(
            "explicit formula needs a nonempty archimedean μ list on the L-function".into(),
        ));
    }
    if !(x > 1.0) {
        return Err(Error::Domain(format!(
            "explicit formula needs x > 1 (trivial-zero tail diverges otherwise), got {x}"
        )));
    }

    // Left side over prime powers, ascending, final term half-weighted
    // when x is an exact integer equal to that prime power.
    let limit = x.floor() as u64;
    let x_is_integer = x.fract() == 0.0;
    let mut lhs_acc = KahanComplex::<R>::new();
    let powers = if limit >= 2 {
        primes::prime_powers_up_to(limit)?
    } else {
        Vec::new()
    };
    for pp in powers {
        let logp = R::of_u64(pp.p).ln();
        let power = (-s * (R::of_u64(pp.k as u64) * logp)).exp();
        let mut term = spec.source.a_pk(pp.p, pp.k)? * power * logp;
        if x_is_integer && pp.pk == limit {
            term = term * R::of(0.5);
        }
        lhs_acc.add(term);
    }
    let lhs = lhs_acc.value();

    let half = R::of(0.5);
    let one = Complex::new(R::one(), R::zero());
    let lnx = R::of(x).ln();
    let central_term = if spec.m == 0 {
        Complex::new(R::zero(), R::zero())
    } else {
        let d = Complex::new(half, R::zero()) - s;
        if d.norm_sqr() < R::of(1e-24) {
            return Err(Error::Domain(
                "central term has a pole at s = 1/2 when m > 0".into(),
            ));
        }
        -(d * lnx).exp() / d * R::of(spec.m as f64)
    };

    let (l_log_derivative, l_est) = lvalues::l_prime_over_l(s, chi)?;
    let zsum = zero_sum(table, x, s, t)?;

    // Σ_j Σ_{k≥0} x^{−2k−μ_j−s}/(2k+μ_j+s): ratio x^{−2} per step.
    let mut tail_acc = KahanComplex::<R>::new();
    let mut tail_cut = R::zero();
    for &mu in &spec.mu {
        for k in 0..500u32 {
            let shift = R::of(2.0 * k as f64) + mu;
            let denom = s + Complex::new(shift, R::zero());
            let term = (-(denom) * lnx).exp() / denom;
            tail_acc.add(term);
            if term.norm() < R::of(1e-22) {
                tail_cut += term.norm();
                break;
            }
        }
    }
    let trivial_tail = tail_acc.value();

    let rhs = central_term - l_log_derivative - zsum + trivial_tail;
    let residual = (lhs - rhs).norm();
    let est_error = l_est
        + tail_cut
        + (one.norm() + lhs.norm() + zsum.norm()) * R::of(1e-15);
    Ok(ExplicitFormulaReport {
        x,
        s,
        t_cut: t,
        zeros_used: table.count_below(t),
        lhs,
        central_term,
        l_log_derivative,
        zero_sum: zsum,
        trivial_tail,
        rhs,
        residual,
        est_error,
    })
}

/// |LHS − RHS(T)| of the truncated explicit formula.
pub fn explicit_formula_residual<R: Real>(
    spec: &LFunctionSpec<R>,
    table: &ZeroTable,
    x: f64,
    s: Complex<R>,
    t: f64,
) -> Result<R> {
    Ok(explicit_formula_report(spec, table, x, s, t)?.residual)
}
