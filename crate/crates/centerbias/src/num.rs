//! Generic scalar abstraction and compensated summation.
//!
//! Every series in this crate is accumulated in a fixed (ascending) order
//! with Neumaier-compensated addition, which keeps the result reproducible
//! bit-for-bit across runs and worker counts and holds the rounding error
//! of 10^7-term sums near one ulp.

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, NumAssignOps, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating scalar the numeric layers are generic over.
///
/// Implemented by `f32` and `f64` through the blanket impl; the crate-root
/// aliases pin the concrete double-precision instantiation used by the CLI.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssignOps + Sum + Debug + Display + Send + Sync + 'static
{
    /// Shorthand conversion from an `f64` literal (exact for `f64`).
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal converts into every Real")
    }

    /// Shorthand conversion from an integer index or prime.
    #[inline]
    fn of_u64(v: u64) -> Self {
        // u64 -> f64 rounds above 2^53; that is the inherent precision of
        // the scalar, not an error condition.
        Self::of(v as f64)
    }
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + NumAssignOps
        + Sum
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Euler–Mascheroni constant γ to 40 significant digits.
pub fn euler_gamma<R: Real>() -> R {
    R::of(0.5772156649015328606065120900824024310422)
}

/// π to 40 significant digits (independent of the libm constant).
pub fn pi<R: Real>() -> R {
    R::of(3.141592653589793238462643383279502884197)
}

/// log √2 = (log 2)/2, the constant of the half-window second-moment limit.
pub fn log_sqrt2<R: Real>() -> R {
    R::of(0.3465735902799726547086160607290882840377)
}

/// √2 to 40 significant digits.
pub fn sqrt2<R: Real>() -> R {
    R::of(1.414213562373095048801688724209698078570)
}

/// Neumaier-compensated accumulator.
///
/// Invariant: the represented value is `sum + compensation`, with the
/// compensation capturing the rounding error of every `add` so far.
/// Adding values in a fixed order therefore yields a bitwise-stable result.
#[derive(Debug, Clone, Copy)]
pub struct KahanSum<R: Real> {
    sum: R,
    compensation: R,
}

impl<R: Real> Default for KahanSum<R> {
    fn default() -> Self {
        Self::new()
    }
}

impl<R: Real> KahanSum<R> {
    pub fn new() -> Self {
        Self {
            sum: R::zero(),
            compensation: R::zero(),
        }
    }

    /// Add one term (Neumaier's branch keeps the larger operand's error).
    #[inline]
    pub fn add(&mut self, v: R) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.compensation += (self.sum - t) + v;
        } else {
            self.compensation += (v - t) + self.sum;
        }
        self.sum = t;
    }

    /// Current value of the sum (prefix snapshots use this).
    #[inline]
    pub fn value(&self) -> R {
        self.sum + self.compensation
    }
}

/// Compensated accumulator for complex terms (component-wise Neumaier).
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanComplex<R: Real> {
    re: KahanSum<R>,
    im: KahanSum<R>,
}

impl<R: Real> KahanComplex<R> {
    pub fn new() -> Self {
        Self {
            re: KahanSum::new(),
            im: KahanSum::new(),
        }
    }

    #[inline]
    pub fn add(&mut self, v: Complex<R>) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    #[inline]
    pub fn value(&self) -> Complex<R> {
        Complex::new(self.re.value(), self.im.value())
    }
}
