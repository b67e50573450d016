use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Symmetric sparse matrix in compressed sparse row form (both triangles
/// stored).
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSym {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSym {
    /// Sums duplicate `(row, col, value)` entries.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(Error::InvalidArgument(format!(
                    "entry ({i}, {j}) outside {n}x{n}"
                )));
            }
            rows[i].push((j, v));
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            for (j, v) in row {
                if col_idx.len() > *row_ptr.last().unwrap() && *col_idx.last().unwrap() == j {
                    *vals.last_mut().unwrap() += v;
                } else {
                    col_idx.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            vals,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()]
            .iter()
            .copied()
            .zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|e| e.0 == j).map_or(0.0, |e| e.1)
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x`.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.col_idx[k]];
            }
            *yi = s;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// Product with a dense block, traversing the matrix once.
    pub fn mul_mat(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let m = x.ncols();
        if m == 1 {
            return DMatrix::from_vec(self.n, 1, self.mul_vec(x.as_slice()));
        }
        // row-major copies keep the inner loop contiguous
        let xt = x.transpose();
        let xs = xt.as_slice();
        let mut yt = DMatrix::zeros(m, self.n);
        let ys = yt.as_mut_slice();
        for i in 0..self.n {
            let yi = &mut ys[i * m..(i + 1) * m];
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let v = self.vals[k];
                let j = self.col_idx[k];
                for (y, &xv) in yi.iter_mut().zip(&xs[j * m..(j + 1) * m]) {
                    *y += v * xv;
                }
            }
        }
        yt.transpose()
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let ay = self.mul_vec(y);
        x.iter().zip(&ay).map(|(a, b)| a * b).sum()
    }

    pub fn total_sum(&self) -> f64 {
        self.vals.iter().sum()
    }

    /// Principal submatrix on the indices where `keep` is true.
    pub fn submatrix(&self, keep: &[bool]) -> SparseSym {
        let mut map = vec![usize::MAX; self.n];
        let mut m = 0;
        for (i, &k) in keep.iter().enumerate() {
            if k {
                map[i] = m;
                m += 1;
            }
        }
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut vals = Vec::new();
        for i in (0..self.n).filter(|&i| keep[i]) {
            for (j, v) in self.row(i) {
                if keep[j] {
                    col_idx.push(map[j]);
                    vals.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseSym {
            n: m,
            row_ptr,
            col_idx,
            vals,
        }
    }

    /// Symmetry test on `samples` random stored entries.
    pub fn is_symmetric(&self, samples: usize, seed: u64, rel_tol: f64) -> bool {
        if self.nnz() == 0 {
            return true;
        }
        let scale = self.vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples.min(self.nnz()).max(1)).all(|_| {
            let k = rng.random_range(0..self.nnz());
            let i = self.row_ptr.partition_point(|&p| p <= k) - 1;
            let j = self.col_idx[k];
            (self.vals[k] - self.get(j, i)).abs() <= rel_tol * scale
        })
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                d[(i, j)] += v;
            }
        }
        d
    }

    /// Dense Cholesky pivots. Intended for small matrices.
    pub fn cholesky_pivots(&self) -> Vec<f64> {
        let mut a = self.to_dense();
        let n = self.n;
        let mut piv = Vec::with_capacity(n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= a[(j, k)] * a[(j, k)];
            }
            piv.push(d);
            let l = d.max(f64::MIN_POSITIVE).sqrt();
            a[(j, j)] = l;
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= a[(i, k)] * a[(j, k)];
                }
                a[(i, j)] = s / l;
            }
        }
        piv
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_and_multiply() {
        let a = SparseSym::from_triplets(
            3,
            &[
                (0, 0, 2.0),
                (0, 1, -1.0),
                (1, 0, -1.0),
                (1, 1, 1.0),
                (1, 1, 1.0),
                (2, 2, 3.0),
            ],
        )
        .unwrap();
        assert_eq!(a.nnz(), 5);
        assert_eq!(a.get(1, 1), 2.0);
        assert_eq!(a.mul_vec(&[1.0, 1.0, 1.0]), vec![1.0, 1.0, 3.0]);
        assert!(a.is_symmetric(10, 0, 0.0));
        assert!(a.cholesky_pivots().iter().all(|&p| p > 0.0));
        let s = a.submatrix(&[true, false, true]);
        assert_eq!(s.dim(), 2);
        assert_eq!(s.diag(), vec![2.0, 3.0]);
    }

    #[test]
    fn asymmetry_detected() {
        let a = SparseSym::from_triplets(2, &[(0, 1, 1.0), (1, 0, 2.0)]).unwrap();
        assert!(!a.is_symmetric(50, 1, 1e-12));
        assert!(SparseSym::from_triplets(2, &[(2, 0, 1.0)]).is_err());
    }
}
