//! Dense exact linear algebra over the rationals.

use num::{One, Zero};

use crate::scalar::Q;

pub type Matrix = Vec<Vec<Q>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Q::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Q::one();
    }
    m
}

/// Reduced row echelon form and pivot columns. Pivots are sought among the first `cols`
/// columns; row operations act on whole rows.
pub fn rref(m: &Matrix, cols: usize) -> (Matrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(row, p);
        let inv = Q::one() / &a[row][col];
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..a.len() {
            if r != row && !a[r][col].is_zero() {
                let c = a[r][col].clone();
                for k in 0..a[r].len() {
                    let sub = &c * &a[row][k];
                    a[r][k] -= sub;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == a.len() {
            break;
        }
    }
    (a, pivots)
}

pub fn rank(m: &Matrix, cols: usize) -> usize {
    rref(m, cols).1.len()
}

/// Basis of `{x : m x = 0}`.
pub fn nullspace(m: &Matrix, cols: usize) -> Vec<Vec<Q>> {
    let (r, pivots) = rref(m, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Q::zero(); cols];
            v[fc] = Q::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[row][fc].clone();
            }
            v
        })
        .collect()
}

/// Vectors from `candidates` that extend the span of `base` without redundancy.
pub fn extend_basis(base: &[Vec<Q>], candidates: &[Vec<Q>], dim: usize) -> Vec<Vec<Q>> {
    let mut rows: Matrix = base.to_vec();
    let mut current = rank(&rows, dim);
    let mut out = Vec::new();
    for c in candidates {
        rows.push(c.clone());
        let r = rank(&rows, dim);
        if r > current {
            current = r;
            out.push(c.clone());
        } else {
            rows.pop();
        }
    }
    out
}

/// Inverse of a square matrix, or `None` if singular.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, n);
    if pivots.len() < n {
        return None;
    }
    aug = r;
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn mul(a: &Matrix, b: &Matrix, inner: usize, cols: usize) -> Matrix {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Q::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    #[test]
    fn nullspace_and_inverse() {
        let m = vec![vec![qi(1), qi(2), qi(3)], vec![qi(2), qi(4), qi(6)]];
        assert_eq!(rank(&m, 3), 1);
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &m {
                let dot = row.iter().zip(v).fold(Q::zero(), |a, (x, y)| a + x * y);
                assert!(dot.is_zero());
            }
        }
        let a = vec![vec![qi(2), qi(1)], vec![qi(1), qi(1)]];
        let inv = inverse(&a).unwrap();
        assert_eq!(mul(&a, &inv, 2, 2), identity(2));
        assert_eq!(inv[0][0], qi(1));
        assert!(inverse(&vec![vec![qi(1), qi(2)], vec![q(1, 2), qi(1)]]).is_none());
    }

    #[test]
    fn extension() {
        let base = vec![vec![qi(1), qi(1), qi(0)]];
        let cands = identity(3);
        let ext = extend_basis(&base, &cands, 3);
        assert_eq!(ext.len(), 2);
        assert_eq!(ext[0], cands[0]);
        assert_eq!(ext[1], cands[2]);
    }
}
