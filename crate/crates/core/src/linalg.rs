//! Small dense linear solves over any [`Field`].

use crate::error::{Error, Result};
use crate::scalars::Field;

/// Solves `m · x = rhs` by Gaussian elimination with partial pivoting on
/// magnitude. Exact for rationals.
pub fn solve<T: Field>(mut m: Vec<Vec<T>>, mut rhs: Vec<T>) -> Result<Vec<T>> {
    let n = rhs.len();
    if m.len() != n || m.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidConfig("linear system is not square".into()));
    }
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !m[r][col].is_negligible())
            .max_by(|&a, &b| {
                m[a][col].magnitude().partial_cmp(&m[b][col].magnitude()).unwrap_or(std::cmp::Ordering::Equal)
            })
            .ok_or(Error::SingularSystem)?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].try_div(&m[col][col])?;
            for c in col..n {
                let t = factor.clone() * &m[col][c];
                m[r][c] = m[r][c].clone() - &t;
            }
            let t = factor * &rhs[col];
            rhs[r] = rhs[r].clone() - &t;
        }
    }
    let mut x: Vec<T> = vec![rhs[0].zero_like(); n];
    for r in (0..n).rev() {
        let mut acc = rhs[r].clone();
        for c in r + 1..n {
            acc = acc - &(m[r][c].clone() * &x[c]);
        }
        x[r] = acc.try_div(&m[r][r])?;
    }
    Ok(x)
}

/// Rank by Gauss-Jordan elimination (exact for rationals).
pub fn rank<T: Field>(mut m: Vec<Vec<T>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_negligible()) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..rows {
            if r == rank || m[r][col].is_zero() {
                continue;
            }
            let factor = match m[r][col].try_div(&m[rank][col]) {
                Ok(f) => f,
                Err(_) => continue,
            };
            for c in col..cols {
                let t = factor.clone() * &m[rank][c];
                m[r][c] = m[r][c].clone() - &t;
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::ExactScalar;

    fn q(n: i64) -> ExactScalar {
        ExactScalar::from(n)
    }

    #[test]
    fn solves_with_row_swap() {
        let m = vec![vec![q(0), q(1)], vec![q(2), q(1)]];
        let x = solve(m, vec![q(3), q(5)]).unwrap();
        assert_eq!(x, vec![q(1), q(3)]);
    }

    #[test]
    fn singular_is_an_error() {
        let m = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert_eq!(solve(m.clone(), vec![q(1), q(1)]), Err(Error::SingularSystem));
        assert_eq!(rank(m), 1);
    }
}
