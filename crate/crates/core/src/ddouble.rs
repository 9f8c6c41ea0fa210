//! Double-double arithmetic.
//!
//! An [`ExtendedScalar`] is the unevaluated sum `hi + lo` of two `f64`s with
//! `|lo| <= ulp(hi) / 2`, giving roughly 106 bits of significand. Only addition
//! and multiplication are needed by the solver; division and square root exist
//! for the direct-solve oracle and analysis code.
//!
//! `two_prod` uses a fused multiply-add when the target has hardware FMA and
//! Dekker's splitting otherwise. Both are exact decompositions, but the
//! trailing word may differ in the last bit between the two code paths on
//! inputs whose product is near the overflow or underflow thresholds.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Unit roundoff of binary64.
pub const EPS_W: f64 = f64::EPSILON / 2.0;

/// Knuth's branch-free two-sum: `s = fl(a + b)` and `a + b = s + e` exactly.
///
/// If `a + b` overflows, `s` is infinite and `e` is NaN.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Fast two-sum; requires `|a| >= |b|` (or `a == 0`).
#[inline]
pub fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// `p = fl(a * b)` and `a * b = p + e` exactly, barring overflow/underflow.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    #[cfg(target_feature = "fma")]
    {
        two_prod_fma(a, b)
    }
    #[cfg(not(target_feature = "fma"))]
    {
        two_prod_dekker(a, b)
    }
}

/// Two-product via a fused multiply-add.
#[inline]
pub fn two_prod_fma(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
const SPLIT_THRESHOLD: f64 = 6.696_928_794_914_17e299; // 2^996
const SPLIT_SHIFT_DOWN: f64 = 3.725_290_298_461_914e-9; // 2^-28
const SPLIT_SHIFT_UP: f64 = 268_435_456.0; // 2^28

#[inline]
fn split(a: f64) -> (f64, f64) {
    if a.abs() > SPLIT_THRESHOLD {
        let a = a * SPLIT_SHIFT_DOWN;
        let t = SPLITTER * a;
        let hi = t - (t - a);
        let lo = a - hi;
        (hi * SPLIT_SHIFT_UP, lo * SPLIT_SHIFT_UP)
    } else {
        let t = SPLITTER * a;
        let hi = t - (t - a);
        (hi, a - hi)
    }
}

/// Two-product via Dekker's splitting, no FMA required.
#[inline]
pub fn two_prod_dekker(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, e)
}

/// Double-double real number `hi + lo`.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct ExtendedScalar {
    pub hi: f64,
    pub lo: f64,
}

impl fmt::Debug for ExtendedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dd({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for ExtendedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.hi)
    }
}

impl ExtendedScalar {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    /// Builds a normalized value from an arbitrary pair.
    #[inline]
    pub fn new(hi: f64, lo: f64) -> Self {
        let (s, e) = two_sum(hi, lo);
        Self::from_raw(s, e)
    }

    #[inline]
    fn from_raw(hi: f64, lo: f64) -> Self {
        if hi.is_finite() {
            Self { hi, lo }
        } else {
            Self { hi, lo: 0.0 }
        }
    }

    #[inline]
    pub fn from_f64(a: f64) -> Self {
        Self { hi: a, lo: 0.0 }
    }

    /// Rounds to the nearest binary64 value (the leading word).
    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi
    }

    /// Exact product of two binary64 numbers.
    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Self {
        let (p, e) = two_prod(a, b);
        Self::from_raw(p, e)
    }

    /// Exact sum of two binary64 numbers.
    #[inline]
    pub fn from_sum(a: f64, b: f64) -> Self {
        let (s, e) = two_sum(a, b);
        Self::from_raw(s, e)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    /// Accurate double-double addition (both words summed with two-sum).
    #[inline]
    pub fn add_dd(self, other: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, other.hi);
        let (t1, t2) = two_sum(self.lo, other.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Self::from_raw(hi, lo)
    }

    /// Adds a binary64 operand.
    #[inline]
    pub fn add_f64(self, b: f64) -> Self {
        let (s1, s2) = two_sum(self.hi, b);
        let s2 = s2 + self.lo;
        let (hi, lo) = quick_two_sum(s1, s2);
        Self::from_raw(hi, lo)
    }

    /// Double-double multiplication.
    #[inline]
    pub fn mul_dd(self, other: Self) -> Self {
        let (p, e) = two_prod(self.hi, other.hi);
        let t = self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e + t);
        Self::from_raw(hi, lo)
    }

    /// Multiplies by a binary64 operand.
    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Self::from_raw(hi, lo)
    }

    /// Reciprocal-free division: binary64 quotient estimate plus one Newton
    /// correction on the remainder.
    pub fn div_dd(self, other: Self) -> Self {
        let q1 = self.hi / other.hi;
        if !q1.is_finite() {
            return Self::from_f64(q1);
        }
        let r = self - other.mul_f64(q1);
        let q2 = r.hi / other.hi;
        let r = r - other.mul_f64(q2);
        let q3 = r.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self::from_raw(hi, lo).add_f64(q3)
    }

    /// Square root by one Newton step from the binary64 estimate.
    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::from_f64(self.hi.sqrt());
        }
        let x = self.hi.sqrt();
        let sq = Self::from_prod(x, x);
        let corr = (self - sq).hi / (2.0 * x);
        Self::from_sum(x, corr)
    }
}

impl From<f64> for ExtendedScalar {
    fn from(a: f64) -> Self {
        Self::from_f64(a)
    }
}

impl Add for ExtendedScalar {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        self.add_dd(rhs)
    }
}

impl Sub for ExtendedScalar {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self.add_dd(-rhs)
    }
}

impl Mul for ExtendedScalar {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        self.mul_dd(rhs)
    }
}

impl Div for ExtendedScalar {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        self.div_dd(rhs)
    }
}

impl Neg for ExtendedScalar {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl AddAssign for ExtendedScalar {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for ExtendedScalar {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for ExtendedScalar {
    #[inline]
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

/// Free-function forms matching the arithmetic layer's operation names.
#[inline]
pub fn ext_from(a: f64) -> ExtendedScalar {
    ExtendedScalar::from_f64(a)
}

#[inline]
pub fn ext_round(x: ExtendedScalar) -> f64 {
    x.to_f64()
}

#[inline]
pub fn ext_add(x: ExtendedScalar, y: ExtendedScalar) -> ExtendedScalar {
    x.add_dd(y)
}

#[inline]
pub fn ext_mul(x: ExtendedScalar, y: ExtendedScalar) -> ExtendedScalar {
    x.mul_dd(y)
}

#[inline]
pub fn ext_div(x: ExtendedScalar, y: ExtendedScalar) -> ExtendedScalar {
    x.div_dd(y)
}

/// Complex number with double-double parts.
#[derive(Clone, Copy, Default, PartialEq, Debug)]
pub struct ExtendedComplex {
    pub re: ExtendedScalar,
    pub im: ExtendedScalar,
}

impl ExtendedComplex {
    pub const ZERO: Self = Self {
        re: ExtendedScalar::ZERO,
        im: ExtendedScalar::ZERO,
    };

    #[inline]
    pub fn new(re: ExtendedScalar, im: ExtendedScalar) -> Self {
        Self { re, im }
    }

    #[inline]
    pub fn from_parts(re: f64, im: f64) -> Self {
        Self {
            re: ExtendedScalar::from_f64(re),
            im: ExtendedScalar::from_f64(im),
        }
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self { re: self.re, im: -self.im }
    }

    /// Squared modulus in double-double.
    #[inline]
    pub fn norm_sqr(self) -> ExtendedScalar {
        self.re * self.re + self.im * self.im
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Multiplies by a binary64 complex operand.
    #[inline]
    pub fn mul_parts(self, re: f64, im: f64) -> Self {
        Self {
            re: self.re.mul_f64(re) - self.im.mul_f64(im),
            im: self.re.mul_f64(im) + self.im.mul_f64(re),
        }
    }

    /// Exact-component product of two binary64 complex numbers; each of the
    /// four partial products is exact, the two sums are double-double.
    #[inline]
    pub fn from_prod_parts(ar: f64, ai: f64, br: f64, bi: f64) -> Self {
        Self {
            re: ExtendedScalar::from_prod(ar, br) - ExtendedScalar::from_prod(ai, bi),
            im: ExtendedScalar::from_prod(ar, bi) + ExtendedScalar::from_prod(ai, br),
        }
    }
}

impl Add for ExtendedComplex {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl Sub for ExtendedComplex {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Neg for ExtendedComplex {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for ExtendedComplex {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Self {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl Div for ExtendedComplex {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let den = rhs.norm_sqr();
        let num = self * rhs.conj();
        Self {
            re: num.re / den,
            im: num.im / den,
        }
    }
}
