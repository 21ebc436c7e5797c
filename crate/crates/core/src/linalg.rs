//! Fraction-free Gaussian elimination over a rational-function field.
//!
//! Bareiss elimination keeps the intermediate entries equal to minors of the
//! input, so the divisions are exact and the entries stay small. Pivots are
//! chosen by the exact zero test.

use crate::coeff_ring::{Rational, Ring, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("ragged matrix: row {row} has {len} entries, expected {expected}")]
    Ragged {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("empty matrix")]
    Empty,
}

fn check_shape(m: &[Vec<Scalar>]) -> Result<(usize, usize), LinalgError> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    for (i, r) in m.iter().enumerate() {
        if r.len() != cols {
            return Err(LinalgError::Ragged {
                row: i,
                len: r.len(),
                expected: cols,
            });
        }
    }
    Ok((rows, cols))
}

/// Runs Bareiss elimination in place. Returns the pivot count and the sign
/// of the row permutation used.
fn bareiss(a: &mut [Vec<Scalar>], ring: &Ring) -> (usize, i32) {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = ring.one();
    let mut sign = 1;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            sign = -sign;
        }
        for i in r + 1..rows {
            for j in c + 1..cols {
                let t = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = &t / &prev;
            }
            a[i][c] = ring.zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    (r, sign)
}

pub fn determinant(m: &[Vec<Scalar>]) -> Result<Scalar, LinalgError> {
    let (rows, cols) = check_shape(m)?;
    if rows == 0 {
        return Err(LinalgError::Empty);
    }
    if rows != cols {
        return Err(LinalgError::NotSquare { rows, cols });
    }
    let ring = m[0][0].ring().clone();
    let mut a = m.to_vec();
    let (rank, sign) = bareiss(&mut a, &ring);
    if rank < rows {
        return Ok(ring.zero());
    }
    let d = a[rows - 1][cols - 1].clone();
    Ok(if sign < 0 { -d } else { d })
}

/// Rank over the rational-function field (generic rank).
pub fn rank(m: &[Vec<Scalar>]) -> Result<usize, LinalgError> {
    check_shape(m)?;
    if m.is_empty() || m[0].is_empty() {
        return Ok(0);
    }
    let ring = m[0][0].ring().clone();
    let mut a = m.to_vec();
    Ok(bareiss(&mut a, &ring).0)
}

/// Rank of a matrix of exact rationals.
pub fn rational_rank(m: &[Vec<Rational>]) -> Result<usize, LinalgError> {
    let ring = Ring::new(Vec::<String>::new(), []).expect("empty ring");
    let lifted: Vec<Vec<Scalar>> = m
        .iter()
        .map(|row| row.iter().map(|x| ring.constant(x.clone())).collect())
        .collect();
    rank(&lifted)
}

/// Submatrix on the given (0-based) rows and columns.
pub fn submatrix(m: &[Vec<Scalar>], rows: &[usize], cols: &[usize]) -> Vec<Vec<Scalar>> {
    rows.iter()
        .map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect())
        .collect()
}
