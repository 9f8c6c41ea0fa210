#![allow(dead_code)]

use fbsmr::ddouble::ExtendedScalar;
use num_bigint::BigInt;
use rand::Rng;

/// Exact dyadic rational `m · 2^e`.
#[derive(Clone, Debug)]
pub struct Dyadic {
    pub m: BigInt,
    pub e: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Self { m: BigInt::from(0), e: 0 }
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite());
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
        Self {
            m: BigInt::from(mant) * sign,
            e,
        }
    }

    pub fn from_dd(x: ExtendedScalar) -> Self {
        Self::from_f64(x.hi).add(&Self::from_f64(x.lo))
    }

    fn align(&self, e: i64) -> BigInt {
        &self.m << (self.e - e) as usize
    }

    pub fn add(&self, o: &Self) -> Self {
        let e = self.e.min(o.e);
        Self {
            m: self.align(e) + o.align(e),
            e,
        }
    }

    pub fn neg(&self) -> Self {
        Self { m: -&self.m, e: self.e }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            m: &self.m * &o.m,
            e: self.e + o.e,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.m == BigInt::from(0)
    }

    pub fn abs(&self) -> Self {
        Self {
            m: if self.m < BigInt::from(0) { -&self.m } else { self.m.clone() },
            e: self.e,
        }
    }

    /// `|self| <= 2^k · |other|`, decided exactly.
    pub fn le_scaled(&self, other: &Self, k: i64) -> bool {
        let a = self.abs();
        let b = other.abs();
        let (be, bm) = (b.e + k, b.m);
        let e = a.e.min(be);
        let lhs = &a.m << (a.e - e) as usize;
        let rhs = bm << (be - e) as usize;
        lhs <= rhs
    }

    pub fn eq(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }
}

/// Random binary64 with a uniformly drawn binary exponent in `[lo, hi]` and
/// a random sign.
pub fn random_f64(rng: &mut impl Rng, lo: i32, hi: i32) -> f64 {
    let m: f64 = rng.random_range(1.0..2.0);
    let e = rng.random_range(lo..=hi);
    let s = if rng.random::<bool>() { -1.0 } else { 1.0 };
    s * m * 2f64.powi(e)
}

/// Random normalized double-double with exponent in `[lo, hi]`.
pub fn random_dd(rng: &mut impl Rng, lo: i32, hi: i32) -> ExtendedScalar {
    let h = random_f64(rng, lo, hi);
    let t: f64 = rng.random_range(-1.0..1.0);
    ExtendedScalar::new(h, h * t * f64::EPSILON / 2.0)
}
