//! Tensor-product structure of composite Hilbert spaces.

use crate::error::{Error, Result};

/// Ordered subsystem dimensions of a composite space. The total dimension is
/// the product; slot 0 is the leftmost (slowest-varying) Kronecker factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceDims {
    dims: Vec<usize>,
}

impl SpaceDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDimension {
                dim: 0,
                reason: "no subsystems",
            });
        }
        for &d in &dims {
            if d < 1 {
                return Err(Error::InvalidDimension {
                    dim: d,
                    reason: "subsystem dim must be >= 1",
                });
            }
        }
        Ok(Self { dims })
    }

    /// Single-subsystem space.
    pub fn single(dim: usize) -> Self {
        Self { dims: vec![dim] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_slots(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Row-major strides: the flat index of a multi-index `(i_0, .., i_k)` is
    /// `sum_j i_j * stride_j`, matching Kronecker-product ordering.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1usize; self.dims.len()];
        for j in (0..self.dims.len().saturating_sub(1)).rev() {
            s[j] = s[j + 1] * self.dims[j + 1];
        }
        s
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        self.strides().iter().zip(multi).map(|(s, i)| s * i).sum()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let strides = self.strides();
        let mut out = Vec::with_capacity(self.dims.len());
        for s in strides {
            out.push(flat / s);
            flat %= s;
        }
        out
    }
}
