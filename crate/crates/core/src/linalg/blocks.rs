//! Exact block structure of sparse Hermitian matrices.
//!
//! Operators assembled from tensor products often have many entries that are
//! exactly zero. Index sets connected through nonzero entries form diagonal
//! blocks after a permutation, and spectral quantities split over them.

use crate::linalg::matrix::Matrix;
use crate::scalar::Field;

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Connected components of the joint nonzero pattern of square matrices of
/// equal size. Components are sorted internally and ordered by first index.
pub(crate) fn block_partition<E: Field>(mats: &[&Matrix<E>]) -> Vec<Vec<usize>> {
    let n = mats.first().map_or(0, |m| m.rows());
    let mut parent: Vec<usize> = (0..n).collect();
    for m in mats {
        for i in 0..n {
            let row = m.row(i);
            for (j, z) in row.iter().enumerate().skip(i + 1) {
                if !z.is_zero() {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri.max(rj)] = ri.min(rj);
                    }
                }
            }
        }
    }
    let mut slot = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[r]].push(i);
    }
    blocks
}

pub(crate) fn principal_submatrix<E: Field>(m: &Matrix<E>, idx: &[usize]) -> Matrix<E> {
    Matrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interleaved_blocks() {
        let mut m = Matrix::<f64>::identity(5);
        m[(0, 3)] = 0.5;
        m[(3, 0)] = 0.5;
        let mut b = Matrix::<f64>::zeros(5, 5);
        b[(1, 4)] = 1.0;
        b[(4, 1)] = 1.0;
        assert_eq!(block_partition(&[&m]), vec![vec![0, 3], vec![1], vec![2], vec![4]]);
        assert_eq!(block_partition(&[&m, &b]), vec![vec![0, 3], vec![1, 4], vec![2]]);
        let sub = principal_submatrix(&m, &[0, 3]);
        assert_eq!(sub.as_slice(), &[1.0, 0.5, 0.5, 1.0]);
    }
}
