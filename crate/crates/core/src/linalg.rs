//! Exact Gauss–Jordan elimination over the rationals.

use num_traits::Zero;

use crate::rational::Rational;

/// Reduced row echelon form of a dense matrix, with its pivot columns.
#[derive(Debug, Clone)]
pub struct Rref {
    pub rows: Vec<Vec<Rational>>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

pub fn rref(matrix: &[Vec<Rational>], cols: usize) -> Rref {
    let mut rows: Vec<Vec<Rational>> = matrix.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let factor = rows[i][c].clone();
                let (pivot_row, other) = if i < r {
                    let (a, b) = rows.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = rows.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (x, y) in other.iter_mut().zip(pivot_row) {
                    *x -= &factor * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    Rref { rows, pivots, cols }
}

pub fn rank(matrix: &[Vec<Rational>], cols: usize) -> usize {
    rref(matrix, cols).pivots.len()
}

/// Basis of `{x : A x = 0}`; one vector per free column.
pub fn null_space(matrix: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let reduced = rref(matrix, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !reduced.pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::from_integer(1.into());
            for (row, &p) in reduced.pivots.iter().enumerate() {
                v[p] = -reduced.rows[row][f].clone();
            }
            v
        })
        .collect()
}

/// Outcome of solving `A x = b` exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    /// A particular solution with every free variable set to zero.
    Solved(Vec<Rational>),
    Inconsistent { rank: usize, augmented_rank: usize },
}

pub fn solve(a: &[Vec<Rational>], b: &[Rational], cols: usize) -> Solution {
    debug_assert_eq!(a.len(), b.len());
    let augmented: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let reduced = rref(&augmented, cols + 1);
    if reduced.pivots.last() == Some(&cols) {
        return Solution::Inconsistent {
            rank: reduced.pivots.len() - 1,
            augmented_rank: reduced.pivots.len(),
        };
    }
    let mut x = vec![Rational::zero(); cols];
    for (row, &p) in reduced.pivots.iter().enumerate() {
        x[p] = reduced.rows[row][cols].clone();
    }
    Solution::Solved(x)
}
