//! Exact Gaussian elimination over a field.

use crate::expr::RationalExpr;
use num_rational::BigRational;
use num_traits::Zero;

pub(crate) trait Field: Clone {
    fn zero_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn add_elem(&self, other: &Self) -> Self;
    fn sub_elem(&self, other: &Self) -> Self;
    fn mul_elem(&self, other: &Self) -> Self;
    fn div_elem(&self, other: &Self) -> Self;
}

impl Field for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_elem(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_elem(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_elem(&self, other: &Self) -> Self {
        self * other
    }
    fn div_elem(&self, other: &Self) -> Self {
        self / other
    }
}

impl Field for RationalExpr {
    fn zero_like(&self) -> Self {
        RationalExpr::zero_nvars(self.nvars())
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_elem(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_elem(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_elem(&self, other: &Self) -> Self {
        self * other
    }
    fn div_elem(&self, other: &Self) -> Self {
        self / other
    }
}

/// Solve `matrix * x = rhs` exactly. Returns a particular solution with all
/// free variables set to zero, or `None` when the system is inconsistent.
/// Pivoting scans columns left to right, so earlier unknowns are preferred.
pub(crate) fn solve<F: Field>(matrix: &[Vec<F>], rhs: &[F], zero: &F) -> Option<Vec<F>> {
    let nrows = matrix.len();
    assert_eq!(nrows, rhs.len());
    let ncols = matrix.first().map(|r| r.len()).unwrap_or(0);
    let mut a: Vec<Vec<F>> = matrix.to_vec();
    let mut b: Vec<F> = rhs.to_vec();

    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut row = 0usize;
    for col in 0..ncols {
        let Some(pr) = (row..nrows).find(|&r| !a[r][col].is_zero_elem()) else {
            continue;
        };
        a.swap(row, pr);
        b.swap(row, pr);
        let inv_pivot = a[row][col].clone();
        for c in col..ncols {
            a[row][c] = a[row][c].div_elem(&inv_pivot);
        }
        b[row] = b[row].div_elem(&inv_pivot);
        for r in 0..nrows {
            if r != row && !a[r][col].is_zero_elem() {
                let factor = a[r][col].clone();
                for c in col..ncols {
                    let delta = factor.mul_elem(&a[row][c]);
                    a[r][c] = a[r][c].sub_elem(&delta);
                }
                let delta = factor.mul_elem(&b[row]);
                b[r] = b[r].sub_elem(&delta);
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
        if row == nrows {
            break;
        }
    }
    // Inconsistency: zero row with nonzero rhs.
    for r in row..nrows {
        if !b[r].is_zero_elem() {
            return None;
        }
    }
    let mut solution = vec![zero.clone(); ncols];
    for col in 0..ncols {
        if let Some(r) = pivot_of_col[col] {
            solution[col] = b[r].clone();
        }
    }
    Some(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn solves_square_system() {
        // x + y = 3, x - y = 1  => x = 2, y = 1
        let m = vec![vec![r(1), r(1)], vec![r(1), r(-1)]];
        let sol = solve(&m, &[r(3), r(1)], &r(0)).unwrap();
        assert_eq!(sol, vec![r(2), r(1)]);
    }

    #[test]
    fn underdetermined_prefers_early_pivots() {
        // -x + y = 1, one equation in two unknowns: pivot on x, free y = 0.
        let m = vec![vec![r(-1), r(1)]];
        let sol = solve(&m, &[r(1)], &r(0)).unwrap();
        assert_eq!(sol, vec![r(-1), r(0)]);
    }

    #[test]
    fn detects_inconsistency() {
        let m = vec![vec![r(1), r(1)], vec![r(2), r(2)]];
        assert!(solve(&m, &[r(1), r(3)], &r(0)).is_none());
    }
}
