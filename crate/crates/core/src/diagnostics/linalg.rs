//! Small dense symmetric matrices (K × K with K ≲ 20).

use crate::error::{AtmError, Result};
use serde::{Deserialize, Serialize};

/// Matrices whose 1-norm condition number reaches this are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        SquareMatrix { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = SquareMatrix::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(AtmError::Param("matrix rows must all have length equal to the row count".into()));
        }
        Ok(SquareMatrix { dim, data: rows.concat() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim.max(1)).map(<[f64]>::to_vec).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn norm1(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting, together
    /// with the 1-norm condition number. Fails when the matrix is singular
    /// to working precision or its condition number reaches [`MAX_CONDITION`].
    pub fn inverse_checked(&self) -> Result<(SquareMatrix, f64)> {
        let n = self.dim;
        let mut a = self.clone();
        let mut inv = SquareMatrix::identity(n);
        let scale = self.norm1();
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(AtmError::SingularCovariance("zero or non-finite matrix".into()));
        }
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a.get(x, col).abs().total_cmp(&a.get(y, col).abs()))
                .expect("nonempty range");
            let pv = a.get(pivot, col);
            if pv.abs() <= scale * f64::EPSILON {
                return Err(AtmError::SingularCovariance(format!("zero pivot in column {col}")));
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            for j in 0..n {
                a.set(col, j, a.get(col, j) / pv);
                inv.set(col, j, inv.get(col, j) / pv);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col);
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a.set(r, j, a.get(r, j) - f * a.get(col, j));
                    inv.set(r, j, inv.get(r, j) - f * inv.get(col, j));
                }
            }
        }
        let cond = scale * inv.norm1();
        if !cond.is_finite() || cond >= MAX_CONDITION {
            return Err(AtmError::SingularCovariance(format!("condition number {cond:.3e}")));
        }
        Ok((inv, cond))
    }

    /// True when a Cholesky factorization succeeds.
    pub fn is_positive_definite(&self) -> bool {
        let n = self.dim;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if !(s > 0.0) {
                        return false;
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        true
    }
}
