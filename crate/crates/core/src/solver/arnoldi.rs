use crate::linalg::kernels::{axpy, dot, norm2};
use crate::scalar::Scalar;

/// Gram-Schmidt variant used to extend the Krylov basis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orthogonalization {
    /// Modified Gram-Schmidt: project against one basis vector at a time.
    #[default]
    Mgs,
    /// Classical Gram-Schmidt: all coefficients from the unmodified vector.
    Cgs,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArnoldiStep<S> {
    /// Projection coefficients `Qᴴ w`.
    pub h: Vec<S>,
    /// Norm of the orthogonalized remainder.
    pub alpha: f64,
    /// Next basis vector, or `None` on (happy) breakdown.
    pub q_new: Option<Vec<S>>,
}

impl<S> ArnoldiStep<S> {
    pub fn is_breakdown(&self) -> bool {
        self.q_new.is_none()
    }
}

/// Orthogonalizes `w` against the columns of `q` (assumed unit norm).
///
/// A remainder with zero or subnormal norm is reported as breakdown.
pub fn arnoldi_step<S: Scalar>(q: &[Vec<S>], mut w: Vec<S>, orth: Orthogonalization) -> ArnoldiStep<S> {
    let mut h = Vec::with_capacity(q.len());
    match orth {
        Orthogonalization::Mgs => {
            for qj in q {
                let hj = dot(qj, &w);
                axpy(-hj, qj, &mut w);
                h.push(hj);
            }
        }
        Orthogonalization::Cgs => {
            for qj in q {
                h.push(dot(qj, &w));
            }
            for (qj, &hj) in q.iter().zip(&h) {
                axpy(-hj, qj, &mut w);
            }
        }
    }
    let alpha = norm2(&w);
    let q_new = if alpha >= f64::MIN_POSITIVE && alpha.is_finite() {
        let inv = alpha.recip();
        Some(w.into_iter().map(|x| x.scale(inv)).collect())
    } else {
        None
    };
    ArnoldiStep { h, alpha, q_new }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_input_is_just_normalized() {
        let q = vec![vec![1.0, 0.0, 0.0]];
        for orth in [Orthogonalization::Mgs, Orthogonalization::Cgs] {
            let s = arnoldi_step(&q, vec![0.0, 3.0, 4.0], orth);
            assert_eq!(s.h, vec![0.0]);
            assert_eq!(s.alpha, 5.0);
            let q = s.q_new.unwrap();
            assert!((q[1] - 0.6).abs() <= 2e-16 && (q[2] - 0.8).abs() <= 2e-16);
        }
    }

    #[test]
    fn vector_in_span_breaks_down() {
        let q = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let s = arnoldi_step(&q, vec![2.0, -1.0], Orthogonalization::Mgs);
        assert_eq!(s.h, vec![2.0, -1.0]);
        assert!(s.is_breakdown());
        assert_eq!(s.alpha, 0.0);
    }
}
