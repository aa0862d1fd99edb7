//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
///
/// The reconstruction amplifies rounding errors exponentially in `y0²/h`, so
/// only `f64` is useful for the inverse pipelines; `f32` is supported for the
/// forward simulator and the spectral machinery at moderate accuracy.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    /// Converts a count into this scalar type.
    #[inline]
    fn of(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type C<T> = Complex<T>;

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn re<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub fn i_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// `a·b` as an unevaluated sum `hi + lo` (exact, via a fused multiply-add).
#[inline]
pub fn two_prod<T: Real>(a: T, b: T) -> (T, T) {
    let hi = a * b;
    (hi, a.mul_add(b, -hi))
}

/// `e^{i(hi + lo)}` for a small correction `lo`.
#[inline]
fn rotate<T: Real>(hi: T, lo: T) -> Complex<T> {
    let (s, c) = hi.sin_cos();
    Complex::new(c - s * lo, s + c * lo)
}

/// `e^{ikx}` for real `k`, `x`, with the rounding error of the product `kx`
/// carried along so that large phases stay accurate to working precision
/// rather than to `ε |kx|`.
#[inline]
pub fn phase<T: Real>(k: T, x: T) -> Complex<T> {
    let (hi, lo) = two_prod(k, x);
    rotate(hi, lo)
}

/// `e^{ik(start + j step)}` at the exact grid abscissa rather than its
/// rounded value. On fine grids and at large `k` the rounding of the
/// abscissae otherwise acts as a coherent phase jitter of order `ε k |x|`.
pub fn grid_phase<T: Real>(k: T, start: T, step: T, j: usize) -> Complex<T> {
    let jf = T::of(j);
    let (a, a_lo) = two_prod(k, start);
    let (b, b_lo) = two_prod(k, step);
    let (c, c_lo) = two_prod(b, jf);
    let hi = a + c;
    let v = hi - a;
    let sum_lo = (a - (hi - v)) + (c - v);
    rotate(hi, sum_lo + a_lo + c_lo + b_lo * jf)
}
