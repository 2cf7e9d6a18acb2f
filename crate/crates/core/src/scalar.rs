//! Scalar abstractions.
//!
//! [`Real`] is the floating-point type every computation is parameterized
//! over (`f32` or `f64`); it is itself a [`Field`] whose real type is itself. [`Field`] is the matrix element type: either a real
//! scalar or a complex number over one. The eigensolver and factorizations are
//! written once against [`Field`] so that matrices with vanishing imaginary
//! parts can be processed in real arithmetic.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, One, ToPrimitive, Zero};

pub trait Real:
    Field<Real = Self>
    + Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant. Panics only for values the type cannot
    /// represent at all, which never happens for f32/f64.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// A tolerance of `base`, widened to the precision the type can deliver.
    #[inline]
    fn tol(base: f64) -> Self {
        let floor = Self::epsilon().as_f64() * 1.0e3;
        Self::of(base.max(floor))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Matrix element: a real scalar or a complex number over one.
pub trait Field:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + 'static
{
    type Real: Real;

    fn conj(self) -> Self;
    fn re(self) -> Self::Real;
    fn im(self) -> Self::Real;
    fn from_real(r: Self::Real) -> Self;
    fn norm_sqr(self) -> Self::Real;
    fn scale(self, r: Self::Real) -> Self;

    #[inline]
    fn modulus(self) -> Self::Real {
        self.norm_sqr().sqrt()
    }

    #[inline]
    fn finite(self) -> bool {
        self.re().is_finite() && self.im().is_finite()
    }
}

macro_rules! real_field {
    ($t:ty) => {
        impl Field for $t {
            type Real = $t;
            #[inline]
            fn conj(self) -> Self {
                self
            }
            #[inline]
            fn re(self) -> $t {
                self
            }
            #[inline]
            fn im(self) -> $t {
                0.0
            }
            #[inline]
            fn from_real(r: $t) -> Self {
                r
            }
            #[inline]
            fn norm_sqr(self) -> $t {
                self * self
            }
            #[inline]
            fn scale(self, r: $t) -> Self {
                self * r
            }
        }
    };
}

impl<T: Real> Field for Complex<T> {
    type Real = T;
    #[inline]
    fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }
    #[inline]
    fn re(self) -> T {
        self.re
    }
    #[inline]
    fn im(self) -> T {
        self.im
    }
    #[inline]
    fn from_real(r: T) -> Self {
        Complex::new(r, T::zero())
    }
    #[inline]
    fn norm_sqr(self) -> T {
        self.re * self.re + self.im * self.im
    }
    #[inline]
    fn scale(self, r: T) -> Self {
        Complex::new(self.re * r, self.im * r)
    }
}

real_field!(f32);
real_field!(f64);

/// Complex scalars over `T`, the element type of every quantum operator here.
pub type C<T> = Complex<T>;

/// Builds a complex number from two `f64` parts.
#[inline]
pub fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::of(re), T::of(im))
}
