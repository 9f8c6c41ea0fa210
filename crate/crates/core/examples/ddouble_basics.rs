//! Error-free transformations and double-double arithmetic.

use fbsmr::ddouble::{ext_add, ext_div, ext_mul, two_prod, two_sum, ExtendedScalar, EPS_W};

fn main() {
    let (s, e) = two_sum(1.0, 1e-20);
    println!("two_sum(1, 1e-20)   = {s:e} + {e:e}");

    let a = 1.0 + 2f64.powi(-30);
    let (p, e) = two_prod(a, a);
    println!("two_prod(a, a)      = {p:e} + {e:e}  (a = 1 + 2^-30)");

    // 0.1 + 0.2 - 0.3: binary64 vs double-double from the same inputs.
    let naive = 0.1 + 0.2 - 0.3;
    let dd = ext_add(ext_add(ExtendedScalar::from_f64(0.1), ExtendedScalar::from_f64(0.2)), ExtendedScalar::from_f64(-0.3));
    println!("0.1 + 0.2 - 0.3     : binary64 {naive:e}, double-double {:e}", dd.hi);

    let third = ext_div(ExtendedScalar::ONE, ExtendedScalar::from_f64(3.0));
    let back = ext_mul(third, ExtendedScalar::from_f64(3.0)) - ExtendedScalar::ONE;
    println!("3 * (1/3) - 1       = {:e}  (eps_w^2 = {:e})", back.hi, EPS_W * EPS_W);
}
