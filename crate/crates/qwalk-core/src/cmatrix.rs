//! Minimal dense complex matrix used for the collapsed step operators and
//! the eigensolver. Row-major, square.

use crate::C64;
use std::ops::{Index, IndexMut};

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    a: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            a: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let v = self.a[r * n + k];
                if v.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..n {
                    out.a[r * n + c] += v * rhs.a[k * n + c];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.n, x.len());
        self.a
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(x).map(|(v, xi)| v * xi).sum())
            .collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        let n = self.n;
        CMatrix::from_fn(n, |r, c| self.a[c * n + r].conj())
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (o, r) in out.a.iter_mut().zip(&rhs.a) {
            *o -= r;
        }
        out
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.a.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Euclidean norms of each column.
    pub fn col_norms(&self) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|c| (0..n).map(|r| self.a[r * n + c].norm_sqr()).sum::<f64>().sqrt())
            .collect()
    }

    /// Max-norm of `self * self^H - I`; zero for unitary matrices.
    pub fn unitarity_defect(&self) -> f64 {
        self.mul(&self.adjoint()).sub(&CMatrix::identity(self.n)).max_abs()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.a[r * self.n + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.a[r * self.n + c]
    }
}
