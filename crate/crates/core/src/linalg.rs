//! Thin wrappers over nalgebra for the dense complex systems used by the
//! inverse solvers.

use crate::{Error, Result, C64};
use nalgebra::DMatrix;

pub type CMatrix = DMatrix<C64>;

/// Two-norm condition number from the singular values.
pub fn condition_number(a: &CMatrix) -> f64 {
    let sv = a.clone().singular_values();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for s in sv.iter() {
        lo = lo.min(*s);
        hi = hi.max(*s);
    }
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Solves `a x = b` (several right-hand sides) by partial-pivoting LU.
pub fn lu_solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let lu = a.clone().lu();
    lu.solve(b)
        .filter(|x| x.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
        .ok_or_else(|| Error::Singular(format!("{}x{} LU factorisation is singular", a.nrows(), a.ncols())))
}

/// Largest singular value (spectral norm).
pub fn spectral_norm(a: &CMatrix) -> f64 {
    a.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_and_conditions() {
        let a = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(3.0, 0.0)],
        );
        let b = CMatrix::from_row_slice(2, 1, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let x = lu_solve(&a, &b).unwrap();
        assert!(((&a * &x) - &b).norm() < 1e-15);
        assert!(condition_number(&a) >= 1.0);
        let s = CMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        assert!(lu_solve(&s, &b).is_err());
        assert!(condition_number(&s) > 1e15);
    }
}
