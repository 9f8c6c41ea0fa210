//! Scalar kinds shared by every layer: real and complex entries in the
//! three precision tiers (binary32 storage for preconditioners, binary64
//! working precision, double-double extended accumulation).

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::{Complex, Complex32, Complex64};
use num_traits::{Float, Zero};

use crate::ddouble::{ExtendedComplex, ExtendedScalar};

/// Arithmetic shared by `f32`, `f64`, `Complex32` and `Complex64`.
pub trait Field:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    type Real: Float + Debug + Send + Sync + 'static;

    const IS_COMPLEX: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(r: Self::Real) -> Self;
    fn re(self) -> Self::Real;
    fn im(self) -> Self::Real;
    fn conj(self) -> Self;
    /// Modulus, computed without intermediate overflow.
    fn abs(self) -> Self::Real;
    /// Squared modulus.
    fn abs2(self) -> Self::Real;
    fn scale(self, r: Self::Real) -> Self;
    fn is_finite(self) -> bool;

    /// Components widened to `f64` (the imaginary part is zero for reals).
    fn to_parts(self) -> (f64, f64);
    /// Rounds `f64` components to this type; the imaginary part is dropped
    /// for real types.
    fn from_parts(re: f64, im: f64) -> Self;

    /// `x / |x|`, or one when `x == 0`.
    fn sign(self) -> Self {
        let a = self.abs();
        if a == Self::Real::zero() {
            Self::one()
        } else {
            self.scale(a.recip())
        }
    }
}

/// Converts between field types through `f64` components (round to nearest).
#[inline]
pub fn cast<T: Field, U: Field>(t: T) -> U {
    let (re, im) = t.to_parts();
    U::from_parts(re, im)
}

macro_rules! impl_real_field {
    ($t:ty) => {
        impl Field for $t {
            type Real = $t;
            const IS_COMPLEX: bool = false;
            #[inline]
            fn zero() -> Self {
                0.0
            }
            #[inline]
            fn one() -> Self {
                1.0
            }
            #[inline]
            fn from_real(r: $t) -> Self {
                r
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
            fn conj(self) -> Self {
                self
            }
            #[inline]
            fn abs(self) -> $t {
                <$t>::abs(self)
            }
            #[inline]
            fn abs2(self) -> $t {
                self * self
            }
            #[inline]
            fn scale(self, r: $t) -> Self {
                self * r
            }
            #[inline]
            fn is_finite(self) -> bool {
                <$t>::is_finite(self)
            }
            #[inline]
            fn to_parts(self) -> (f64, f64) {
                (self as f64, 0.0)
            }
            #[inline]
            fn from_parts(re: f64, _im: f64) -> Self {
                re as $t
            }
        }
    };
}

impl_real_field!(f32);
impl_real_field!(f64);

macro_rules! impl_complex_field {
    ($t:ty) => {
        impl Field for Complex<$t> {
            type Real = $t;
            const IS_COMPLEX: bool = true;
            #[inline]
            fn zero() -> Self {
                Complex::new(0.0, 0.0)
            }
            #[inline]
            fn one() -> Self {
                Complex::new(1.0, 0.0)
            }
            #[inline]
            fn from_real(r: $t) -> Self {
                Complex::new(r, 0.0)
            }
            #[inline]
            fn re(self) -> $t {
                self.re
            }
            #[inline]
            fn im(self) -> $t {
                self.im
            }
            #[inline]
            fn conj(self) -> Self {
                Complex::conj(&self)
            }
            #[inline]
            fn abs(self) -> $t {
                self.re.hypot(self.im)
            }
            #[inline]
            fn abs2(self) -> $t {
                self.re * self.re + self.im * self.im
            }
            #[inline]
            fn scale(self, r: $t) -> Self {
                Complex::new(self.re * r, self.im * r)
            }
            #[inline]
            fn is_finite(self) -> bool {
                self.re.is_finite() && self.im.is_finite()
            }
            #[inline]
            fn to_parts(self) -> (f64, f64) {
                (self.re as f64, self.im as f64)
            }
            #[inline]
            fn from_parts(re: f64, im: f64) -> Self {
                Complex::new(re as $t, im as $t)
            }
        }
    };
}

impl_complex_field!(f32);
impl_complex_field!(f64);

/// Extended-precision companion of a working scalar.
pub trait Extended<S>:
    Copy + Debug + PartialEq + Send + Sync + 'static + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self>
where
    S: Scalar,
{
    fn zero() -> Self;
    fn from_working(s: S) -> Self;
    /// Round to working precision.
    fn round(self) -> S;
    /// Exact product of two working scalars, up-converted just in time.
    fn prod(a: S, b: S) -> Self;
    /// `self * s` with `s` up-converted.
    fn mul_working(self, s: S) -> Self;
    fn mul_ext(self, other: Self) -> Self;
    fn div_ext(self, other: Self) -> Self;
    fn is_finite(self) -> bool;
}

impl Extended<f64> for ExtendedScalar {
    #[inline]
    fn zero() -> Self {
        ExtendedScalar::ZERO
    }
    #[inline]
    fn from_working(s: f64) -> Self {
        ExtendedScalar::from_f64(s)
    }
    #[inline]
    fn round(self) -> f64 {
        self.hi
    }
    #[inline]
    fn prod(a: f64, b: f64) -> Self {
        ExtendedScalar::from_prod(a, b)
    }
    #[inline]
    fn mul_working(self, s: f64) -> Self {
        self.mul_f64(s)
    }
    #[inline]
    fn mul_ext(self, other: Self) -> Self {
        self * other
    }
    #[inline]
    fn div_ext(self, other: Self) -> Self {
        self / other
    }
    #[inline]
    fn is_finite(self) -> bool {
        ExtendedScalar::is_finite(self)
    }
}

impl Extended<Complex64> for ExtendedComplex {
    #[inline]
    fn zero() -> Self {
        ExtendedComplex::ZERO
    }
    #[inline]
    fn from_working(s: Complex64) -> Self {
        ExtendedComplex::from_parts(s.re, s.im)
    }
    #[inline]
    fn round(self) -> Complex64 {
        Complex64::new(self.re.hi, self.im.hi)
    }
    #[inline]
    fn prod(a: Complex64, b: Complex64) -> Self {
        ExtendedComplex::from_prod_parts(a.re, a.im, b.re, b.im)
    }
    #[inline]
    fn mul_working(self, s: Complex64) -> Self {
        self.mul_parts(s.re, s.im)
    }
    #[inline]
    fn mul_ext(self, other: Self) -> Self {
        self * other
    }
    #[inline]
    fn div_ext(self, other: Self) -> Self {
        self / other
    }
    #[inline]
    fn is_finite(self) -> bool {
        ExtendedComplex::is_finite(self)
    }
}

/// Working-precision scalar (`f64` or `Complex64`) together with its
/// binary32 storage type and double-double accumulation type.
pub trait Scalar: Field<Real = f64> {
    type Low: Field<Real = f32>;
    type Ext: Extended<Self>;
}

impl Scalar for f64 {
    type Low = f32;
    type Ext = ExtendedScalar;
}

impl Scalar for Complex64 {
    type Low = Complex32;
    type Ext = ExtendedComplex;
}
