use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::solver::givens::{givens_rotation, Rotation};

/// A generated rotation together with the unimodular factor that makes the
/// new diagonal entry of `R̂` real and nonnegative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StoredRotation<S> {
    pub rotation: Rotation<S>,
    /// `conj(sign(a))`; multiplies the first output row.
    pub phase: S,
}

impl<S: Scalar> StoredRotation<S> {
    #[inline]
    pub fn apply(&self, x: S, y: S) -> (S, S) {
        let (top, bottom) = self.rotation.apply(x, y);
        (self.phase * top, bottom)
    }
}

/// Per-cycle state: test basis `Q`, trial basis `Z = M⁻¹Q`, the triangular
/// factor `R̂` of the Hessenberg matrix (column-wise), the rotated
/// right-hand side `g` and the stored rotations.
#[derive(Clone, Debug)]
pub struct KrylovWorkspace<S: Scalar> {
    pub q: Vec<Vec<S>>,
    pub z: Vec<Vec<S>>,
    pub r_cols: Vec<Vec<S>>,
    pub g: Vec<S>,
    pub rotations: Vec<StoredRotation<S>>,
}

impl<S: Scalar> KrylovWorkspace<S> {
    /// Starts a cycle from residual `r` with `beta = ‖r‖ > 0`.
    pub fn new(r: &[S], beta: f64) -> Self {
        let inv = beta.recip();
        Self {
            q: vec![r.iter().map(|x| x.scale(inv)).collect()],
            z: Vec::new(),
            r_cols: Vec::new(),
            g: vec![S::from_real(beta)],
            rotations: Vec::new(),
        }
    }

    /// Empty workspace for driving [`hessenberg_update`] directly.
    pub fn with_rhs(beta: f64) -> Self {
        Self {
            q: Vec::new(),
            z: Vec::new(),
            r_cols: Vec::new(),
            g: vec![S::from_real(beta)],
            rotations: Vec::new(),
        }
    }

    /// Number of columns processed in this cycle.
    pub fn len(&self) -> usize {
        self.r_cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r_cols.is_empty()
    }

    /// Current quasi-residual `|g_{k+1}|`.
    pub fn quasi_residual(&self) -> f64 {
        self.g.last().map_or(0.0, |v| v.abs())
    }

    /// Solves the projected triangular system for the current cycle.
    pub fn solve_projected(&self) -> Result<Vec<S>> {
        let k = self.len();
        back_substitute(&self.r_cols, &self.g[..k])
    }
}

/// Appends Hessenberg column `[h; alpha]`: applies the stored rotations,
/// generates the next one, rotates `g` and returns `|g_{k+1}|`.
///
/// The diagonal of `R̂` is kept real and nonnegative by folding `conj(sign(r))`
/// into the first row of each rotation.
pub fn hessenberg_update<S: Scalar>(ws: &mut KrylovWorkspace<S>, h: &[S], alpha: f64) -> f64 {
    let k = ws.rotations.len() + 1;
    assert_eq!(h.len(), k, "Hessenberg column length");
    let mut col = h.to_vec();
    for (i, rot) in ws.rotations.iter().enumerate() {
        let (a, b) = rot.apply(col[i], col[i + 1]);
        col[i] = a;
        col[i + 1] = b;
    }
    let mut rotation = givens_rotation(col[k - 1], alpha);
    if rotation.r == S::zero() {
        // Degenerate zero column: swap rows so the residual stays in g_{k+1}.
        rotation = Rotation {
            c: 0.0,
            s: S::one(),
            r: S::zero(),
        };
    }
    let phase = col[k - 1].sign().conj();
    col[k - 1] = S::from_real(rotation.r.abs());
    let stored = StoredRotation { rotation, phase };
    let (gk, gk1) = stored.apply(ws.g[k - 1], S::zero());
    ws.g[k - 1] = gk;
    ws.g.push(gk1);
    ws.rotations.push(stored);
    ws.r_cols.push(col);
    gk1.abs()
}

/// Solves `R y = g` for upper-triangular `R` given by columns
/// (`r_cols[j][i] = R_ij`, `i <= j`).
pub fn back_substitute<S: Scalar>(r_cols: &[Vec<S>], g: &[S]) -> Result<Vec<S>> {
    let k = g.len();
    assert!(r_cols.len() >= k, "triangular factor too small");
    let mut y = vec![S::zero(); k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for j in i + 1..k {
            s -= r_cols[j][i] * y[j];
        }
        let d = r_cols[i][i];
        if d == S::zero() {
            return Err(Error::SingularProjectedSystem { index: i });
        }
        y[i] = s / d;
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_column_reduces_to_single_rotation() {
        let mut ws = KrylovWorkspace::<f64>::with_rhs(2.0);
        let q = hessenberg_update(&mut ws, &[3.0], 4.0);
        assert_eq!(ws.r_cols[0], vec![5.0]);
        assert_eq!(ws.g, vec![2.0 * 0.6, -2.0 * 0.8]);
        assert_eq!(q, 1.6);
    }

    #[test]
    fn negative_pivot_yields_positive_diagonal() {
        let mut ws = KrylovWorkspace::<f64>::with_rhs(1.0);
        hessenberg_update(&mut ws, &[-3.0], 4.0);
        assert_eq!(ws.r_cols[0], vec![5.0]);
        // y solves the same least-squares problem: min |[-3;4] y - [1;0]|
        let y = ws.solve_projected().unwrap();
        assert!((y[0] - (-3.0 / 25.0)).abs() < 1e-16);
    }

    #[test]
    fn zero_column_leaves_quasi_residual() {
        let mut ws = KrylovWorkspace::<f64>::with_rhs(1.0);
        hessenberg_update(&mut ws, &[2.0], 1.0);
        let before = ws.quasi_residual();
        let after = hessenberg_update(&mut ws, &[0.0, 0.0], 0.0);
        assert_eq!(before, after);
        assert_eq!(ws.r_cols[1][1], 0.0);
        assert!(matches!(
            ws.solve_projected(),
            Err(Error::SingularProjectedSystem { index: 1 })
        ));
    }

    #[test]
    fn back_substitution() {
        let eye = vec![vec![1.0], vec![0.0, 1.0]];
        assert_eq!(back_substitute(&eye, &[3.0, 4.0]).unwrap(), vec![3.0, 4.0]);
        // [[2, 1], [0, 4]] y = [5, 8] -> y = [1.5, 2]
        let r = vec![vec![2.0], vec![1.0, 4.0]];
        assert_eq!(back_substitute(&r, &[5.0, 8.0]).unwrap(), vec![1.5, 2.0]);
        let sing = vec![vec![1.0], vec![1.0, 0.0]];
        assert!(matches!(
            back_substitute(&sing, &[1.0, 1.0]),
            Err(Error::SingularProjectedSystem { index: 1 })
        ));
    }
}
