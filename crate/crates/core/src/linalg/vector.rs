use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Deref, DerefMut};

/// A real column vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn zeros(n: usize) -> Self {
        DenseVector(vec![0.0; n])
    }

    pub fn filled(n: usize, value: f64) -> Self {
        DenseVector(vec![value; n])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        super::dot(&self.0, other)
    }

    pub fn norm(&self) -> f64 {
        super::norm(&self.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// `self += a · x`
    pub fn axpy(&mut self, a: f64, x: &[f64]) {
        for (y, xi) in self.0.iter_mut().zip(x) {
            *y += a * xi;
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        DenseVector(self.0.iter().map(|v| a * v).collect())
    }

    pub fn sub(&self, other: &[f64]) -> Self {
        DenseVector(self.0.iter().zip(other).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &[f64]) -> Self {
        DenseVector(self.0.iter().zip(other).map(|(a, b)| a + b).collect())
    }
}

impl From<Vec<f64>> for DenseVector {
    fn from(v: Vec<f64>) -> Self {
        DenseVector(v)
    }
}

impl From<&[f64]> for DenseVector {
    fn from(v: &[f64]) -> Self {
        DenseVector(v.to_vec())
    }
}

impl Deref for DenseVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for DenseVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl FromIterator<f64> for DenseVector {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        DenseVector(iter.into_iter().collect())
    }
}
