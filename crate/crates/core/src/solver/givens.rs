use crate::ddouble::ExtendedScalar;
use crate::scalar::Scalar;

/// Plane rotation `Ω = [c, s; -s̄, c]` with `Ω [a; β] = [r; 0]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation<S> {
    pub c: f64,
    pub s: S,
    pub r: S,
}

/// Generates the rotation annihilating the real, nonnegative subdiagonal `beta`
/// below `a`.
///
/// With `r0 = sqrt(|a|² + β²)` and `sign(x) = x/|x|` (one at zero):
/// `c = |a|/r0`, `s = sign(a) β/r0`, `r = sign(a) r0`. `c` is real in `[0, 1]`.
///
/// `|a|` and `r0` are formed in double-double after an exact power-of-two
/// rescaling, so each output component carries a single final rounding and
/// `c² + |s|²` stays within a few units of `ε_w` of one.
pub fn givens_rotation<S: Scalar>(a: S, beta: f64) -> Rotation<S> {
    debug_assert!(beta >= 0.0 || beta.is_nan());
    let (ar, ai) = a.to_parts();
    let big = ar.abs().max(ai.abs()).max(beta);
    if big == 0.0 {
        return Rotation {
            c: 1.0,
            s: S::zero(),
            r: S::zero(),
        };
    }
    if !big.is_finite() {
        return givens_plain(a, beta);
    }
    let scale = 2f64.powi(-(big.log2().floor() as i32));
    let (xr, xi, b) = (ar * scale, ai * scale, beta * scale);
    let na2 = ExtendedScalar::from_prod(xr, xr).add_dd(ExtendedScalar::from_prod(xi, xi));
    let na = na2.sqrt();
    let r0 = na2.add_dd(ExtendedScalar::from_prod(b, b)).sqrt();
    if na.hi == 0.0 {
        return Rotation {
            c: 0.0,
            s: S::one(),
            r: S::from_real(beta),
        };
    }
    let denom = na.mul_dd(r0);
    let s_part = |x: f64| ExtendedScalar::from_prod(x, b).div_dd(denom).hi;
    let r_part = |x: f64| r0.mul_f64(x).div_dd(na).hi / scale;
    Rotation {
        c: na.div_dd(r0).hi,
        s: S::from_parts(s_part(xr), s_part(xi)),
        r: S::from_parts(r_part(xr), r_part(xi)),
    }
}

fn givens_plain<S: Scalar>(a: S, beta: f64) -> Rotation<S> {
    let abs_a = a.abs();
    let r0 = abs_a.hypot(beta);
    let sign = a.sign();
    Rotation {
        c: abs_a / r0,
        s: sign.scale(beta / r0),
        r: sign.scale(r0),
    }
}

impl<S: Scalar> Rotation<S> {
    /// `[x; y] ← Ω [x; y]`.
    #[inline]
    pub fn apply(&self, x: S, y: S) -> (S, S) {
        (
            x.scale(self.c) + self.s * y,
            -(self.s.conj() * x) + y.scale(self.c),
        )
    }
}
