//! Exact row reduction over `Q`, used for the `E4^a E6^b` decomposition
//! where the basis has no triangular structure.

use num_traits::Zero;

use crate::exactnum::Rational;

pub(crate) enum Solution {
    Unique(Vec<Rational>),
    Inconsistent { row: usize },
    Underdetermined,
}

/// Solves `sum_j columns[j][i] x_j = rhs[i]` for all rows `i`.
pub(crate) fn solve_columns(columns: &[Vec<Rational>], rhs: &[Rational]) -> Solution {
    let cols = columns.len();
    let rows = rhs.len();
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|i| {
            let mut row: Vec<Rational> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();

    let mut pivot_rows = Vec::with_capacity(cols);
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            return Solution::Underdetermined;
        };
        m.swap(r, pr);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for j in c..=cols {
                    let delta = &factor * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivot_rows.push(r);
        r += 1;
    }
    if let Some(bad) = (r..rows).find(|&i| !m[i][cols].is_zero()) {
        return Solution::Inconsistent { row: bad };
    }
    Solution::Unique(pivot_rows.iter().map(|&i| m[i][cols].clone()).collect())
}
