//! Scalar abstraction shared by every numeric kernel in the crate.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Every value used in the crate is representable.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Converts a count or index.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn from_offset(n: i64) -> Self {
        Self::from_i64(n).expect("offset representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type C<T> = Complex<T>;

#[inline]
pub fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub fn c_re<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

/// `cos(π·p/q)`, exact whenever the value is rational.
///
/// By Niven's theorem the only rational values of the cosine at rational
/// multiples of π are 0, ±½ and ±1; those are returned exactly, everything
/// else goes through the floating point cosine.
pub fn cos_pi<T: Real>(p: i64, q: i64) -> T {
    assert!(q > 0, "denominator must be positive");
    // Angle in units of π/6 when that is an integer.
    if (6 * p) % q == 0 {
        let sixths = (6 * p / q).rem_euclid(12);
        match sixths {
            0 => return T::one(),
            2 | 10 => return T::lit(0.5),
            3 | 9 => return T::zero(),
            4 | 8 => return T::lit(-0.5),
            6 => return -T::one(),
            _ => {}
        }
    }
    let reduced = p.rem_euclid(2 * q);
    (T::PI() * T::from_offset(reduced) / T::from_offset(q)).cos()
}

/// `sin(π·p/q)`, exact whenever the value is rational.
pub fn sin_pi<T: Real>(p: i64, q: i64) -> T {
    // sin(x) = cos(x − π/2) = cos(π(2p − q)/(2q))
    cos_pi(2 * p - q, 2 * q)
}

/// `e^{iπp/q}` built from [`cos_pi`] and [`sin_pi`].
pub fn expi_pi<T: Real>(p: i64, q: i64) -> C<T> {
    c(cos_pi(p, q), sin_pi(p, q))
}
