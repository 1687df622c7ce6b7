//! Hermitian eigendecomposition with a reproducible ordering and phase
//! convention.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::operator::Operator;

/// Eigenvalues in ascending order; `vectors` columns are the matching
/// orthonormal eigenvectors with the largest-magnitude component of each
/// made real-positive.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: DVector<f64>,
    pub vectors: DMatrix<C64>,
}

impl EigenDecomposition {
    /// `V diag(exp(-i t values)) V^dagger`, the unitary propagator of the
    /// decomposed Hamiltonian.
    pub fn propagator(&self, t: f64) -> DMatrix<C64> {
        let n = self.values.len();
        let mut phases = DMatrix::<C64>::zeros(n, n);
        for k in 0..n {
            phases[(k, k)] = C64::from_polar(1.0, -self.values[k] * t);
        }
        &self.vectors * phases * self.vectors.adjoint()
    }

    /// Apply `f` to the eigenvalues and resynthesize `V f(Λ) V^dagger`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> DMatrix<C64> {
        let n = self.values.len();
        let mut d = DMatrix::<C64>::zeros(n, n);
        for k in 0..n {
            d[(k, k)] = C64::new(f(self.values[k]), 0.0);
        }
        &self.vectors * d * self.vectors.adjoint()
    }
}

/// Diagonalize a Hermitian operator. Fails if the Hermiticity contract is
/// violated.
pub fn eig_hermitian(op: &Operator) -> Result<EigenDecomposition> {
    op.check_hermitian()?;
    Ok(eig_hermitian_unchecked(op.matrix()))
}

/// Diagonalize a matrix assumed Hermitian (symmetrized internally to shed
/// roundoff), skipping the contract check.
pub fn eig_hermitian_unchecked(mat: &DMatrix<C64>) -> EigenDecomposition {
    let sym = (mat + mat.adjoint()).scale(0.5);
    let se = nalgebra::SymmetricEigen::new(sym);

    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));

    let mut values = DVector::zeros(n);
    let mut vectors = DMatrix::<C64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = se.eigenvalues[src];
        let col = se.eigenvectors.column(src);
        // phase convention: largest-magnitude component real-positive
        let mut kmax = 0;
        let mut vmax = 0.0;
        for (k, z) in col.iter().enumerate() {
            if z.norm() > vmax {
                vmax = z.norm();
                kmax = k;
            }
        }
        let phase = if vmax > 0.0 {
            col[kmax] / C64::new(vmax, 0.0)
        } else {
            C64::new(1.0, 0.0)
        };
        let fixed = col.map(|z| z * phase.conj());
        vectors.set_column(dst, &fixed);
    }
    EigenDecomposition { values, vectors }
}
