use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

/// Cubic rank-3 tensor `t[i][j][k]`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Clone> Tensor3<T> {
    pub fn filled(n: usize, value: T) -> Self {
        Self { n, data: vec![value; n * n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    data.push(f(i, j, k));
                }
            }
        }
        Self { n, data }
    }

    /// Builds from nested vectors; `None` unless the shape is `n x n x n`.
    pub fn from_nested(nested: Vec<Vec<Vec<T>>>) -> Option<Self> {
        let n = nested.len();
        let mut data = Vec::with_capacity(n * n * n);
        for plane in nested {
            if plane.len() != n {
                return None;
            }
            for row in plane {
                if row.len() != n {
                    return None;
                }
                data.extend(row);
            }
        }
        Some(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// The slice `t[i][j][..]`.
    pub fn fiber(&self, i: usize, j: usize) -> &[T] {
        let start = (i * self.n + j) * self.n;
        &self.data[start..start + self.n]
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<T>>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.fiber(i, j).to_vec()).collect()).collect()
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Tensor3<U> {
        Tensor3 { n: self.n, data: self.data.iter().map(f).collect() }
    }
}

impl<T: Scalar> Tensor3<T> {
    pub fn to_f64(&self) -> Tensor3<f64> {
        self.map(Scalar::to_f64)
    }
}

impl<T> Index<(usize, usize, usize)> for Tensor3<T> {
    type Output = T;

    fn index(&self, (i, j, k): (usize, usize, usize)) -> &T {
        &self.data[(i * self.n + j) * self.n + k]
    }
}

impl<T> IndexMut<(usize, usize, usize)> for Tensor3<T> {
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut T {
        &mut self.data[(i * self.n + j) * self.n + k]
    }
}
