//! State vectors, density matrices, reduced states and entanglement.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::eigen::eig_hermitian_unchecked;
use crate::error::{Error, Result};
use crate::space::SpaceDims;

pub const NORM_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: SpaceDims,
    amp: DVector<C64>,
}

impl StateVector {
    /// Validates normalization to `NORM_TOL`.
    pub fn new(space: SpaceDims, amp: DVector<C64>) -> Result<Self> {
        if amp.len() != space.total() {
            return Err(Error::DimensionMismatch {
                expected: space.total(),
                got: amp.len(),
            });
        }
        let norm = amp.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {norm} deviates from 1")));
        }
        Ok(Self { space, amp })
    }

    /// Normalize and wrap; errors only on the zero vector.
    pub fn normalized(space: SpaceDims, amp: DVector<C64>) -> Result<Self> {
        let norm = amp.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState(
                "cannot normalize the zero vector".into(),
            ));
        }
        Self::new(space, amp / C64::new(norm, 0.0))
    }

    /// Basis state |k> of a single- or multi-slot space (flat index).
    pub fn basis(space: SpaceDims, k: usize) -> Result<Self> {
        if k >= space.total() {
            return Err(Error::DimensionMismatch {
                expected: space.total(),
                got: k,
            });
        }
        let mut amp = DVector::zeros(space.total());
        amp[k] = C64::new(1.0, 0.0);
        Ok(Self { space, amp })
    }

    pub fn space(&self) -> &SpaceDims {
        &self.space
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amp
    }

    pub fn kron(&self, other: &Self) -> Self {
        let dims: Vec<usize> = self
            .space
            .dims()
            .iter()
            .chain(other.space.dims())
            .copied()
            .collect();
        Self {
            space: SpaceDims::new(dims).expect("kron of valid spaces"),
            amp: self.amp.kronecker(&other.amp),
        }
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amp.dotc(&other.amp)
    }

    /// |<self|other>|^2.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            space: self.space.clone(),
            mat: &self.amp * self.amp.adjoint(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: SpaceDims,
    mat: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace (`TRACE_TOL`) and positivity down to
    /// `-POSITIVITY_TOL` on the smallest eigenvalue.
    pub fn new(space: SpaceDims, mat: DMatrix<C64>) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(space, mat)?;
        rho.validate(POSITIVITY_TOL)?;
        Ok(rho)
    }

    /// Shape-checked only; used by integrators whose states are audited
    /// separately.
    pub fn from_matrix_unchecked(space: SpaceDims, mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() != space.total() {
            return Err(Error::DimensionMismatch {
                expected: space.total(),
                got: mat.nrows(),
            });
        }
        Ok(Self { space, mat })
    }

    pub fn validate(&self, positivity_tol: f64) -> Result<()> {
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} deviates from 1")));
        }
        let herm = self
            .mat
            .iter()
            .zip(self.mat.adjoint().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if herm > TRACE_TOL {
            return Err(Error::InvalidState(format!("Hermiticity residual {herm}")));
        }
        let eig = eig_hermitian_unchecked(&self.mat);
        let min = eig.values.min();
        if min < -positivity_tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
        }
        Ok(())
    }

    pub fn space(&self) -> &SpaceDims {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn trace(&self) -> C64 {
        self.mat.diagonal().iter().sum()
    }

    /// Thermal (Bose-Einstein) state of a single truncated mode,
    /// renormalized over the kept levels.
    pub fn thermal(dim: usize, n_th: f64) -> Result<Self> {
        if n_th < 0.0 {
            return Err(Error::InvalidParameter {
                name: "n_th",
                reason: "thermal occupancy must be >= 0".into(),
            });
        }
        let mut diag = DVector::zeros(dim);
        if n_th == 0.0 {
            diag[0] = C64::new(1.0, 0.0);
        } else {
            let r = n_th / (1.0 + n_th);
            let mut z = 0.0;
            for n in 0..dim {
                let p = r.powi(n as i32);
                diag[n] = C64::new(p, 0.0);
                z += p;
            }
            diag /= C64::new(z, 0.0);
        }
        Ok(Self {
            space: SpaceDims::single(dim),
            mat: DMatrix::from_diagonal(&diag),
        })
    }

    pub fn kron(&self, other: &Self) -> Self {
        let dims: Vec<usize> = self
            .space
            .dims()
            .iter()
            .chain(other.space.dims())
            .copied()
            .collect();
        Self {
            space: SpaceDims::new(dims).expect("kron of valid spaces"),
            mat: self.mat.kronecker(&other.mat),
        }
    }

    /// ⟨A⟩ = Tr(ρA).
    pub fn expectation(&self, op: &crate::operator::Operator) -> C64 {
        debug_assert_eq!(op.dim(), self.mat.nrows());
        let mut acc = C64::new(0.0, 0.0);
        let a = op.matrix();
        let n = self.mat.nrows();
        for i in 0..n {
            for k in 0..n {
                acc += self.mat[(i, k)] * a[(k, i)];
            }
        }
        acc
    }

    /// Trace out every slot not listed in `keep`; kept slots stay in their
    /// original order. Trace is preserved exactly (summation only).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let nslots = self.space.n_slots();
        for &s in keep {
            if s >= nslots {
                return Err(Error::SlotOutOfRange { slot: s, nslots });
            }
        }
        let mut keep_sorted: Vec<usize> = keep.to_vec();
        keep_sorted.sort_unstable();
        keep_sorted.dedup();
        if keep_sorted.len() != keep.len() {
            return Err(Error::InvalidParameter {
                name: "keep",
                reason: "slots must be unique".into(),
            });
        }

        let traced: Vec<usize> = (0..nslots).filter(|s| !keep_sorted.contains(s)).collect();
        let kept_dims: Vec<usize> = keep_sorted.iter().map(|&s| self.space.dims()[s]).collect();
        let out_space = SpaceDims::new(kept_dims)?;
        let strides = self.space.strides();
        let out_strides = out_space.strides();

        let traced_total: usize = traced.iter().map(|&s| self.space.dims()[s]).product();
        let n_out = out_space.total();
        let mut out = DMatrix::<C64>::zeros(n_out, n_out);

        // enumerate kept (row, col) multi-indices and sum over traced indices
        for row_out in 0..n_out {
            let row_multi = out_space.multi_index(row_out);
            for col_out in 0..n_out {
                let col_multi = out_space.multi_index(col_out);
                let mut acc = C64::new(0.0, 0.0);
                for t in 0..traced_total {
                    // distribute t over traced slots
                    let mut rem = t;
                    let mut row_flat = 0usize;
                    let mut col_flat = 0usize;
                    for (kk, &s) in traced.iter().enumerate() {
                        let d: usize = traced[kk + 1..]
                            .iter()
                            .map(|&q| self.space.dims()[q])
                            .product();
                        let idx = rem / d.max(1);
                        rem %= d.max(1);
                        row_flat += strides[s] * idx;
                        col_flat += strides[s] * idx;
                    }
                    for (kk, &s) in keep_sorted.iter().enumerate() {
                        row_flat += strides[s] * row_multi[kk];
                        col_flat += strides[s] * col_multi[kk];
                    }
                    let _ = out_strides; // ordering fixed by out_space
                    acc += self.mat[(row_flat, col_flat)];
                }
                out[(row_out, col_out)] = acc;
            }
        }
        Ok(DensityMatrix {
            space: out_space,
            mat: out,
        })
    }

    /// Partial transpose over the slots at and after `split`, i.e. the "B"
    /// side of the bipartition A = slots [0, split), B = slots [split, n).
    pub fn partial_transpose(&self, split: usize) -> Result<DensityMatrix> {
        let nslots = self.space.n_slots();
        if split == 0 || split >= nslots {
            return Err(Error::InvalidParameter {
                name: "split",
                reason: format!("bipartition split {split} must cut a {nslots}-slot space"),
            });
        }
        let da: usize = self.space.dims()[..split].iter().product();
        let db: usize = self.space.dims()[split..].iter().product();
        let mut out = DMatrix::<C64>::zeros(da * db, da * db);
        for ia in 0..da {
            for ja in 0..da {
                for ib in 0..db {
                    for jb in 0..db {
                        // <ia ib| rho^{T_B} |ja jb> = <ia jb| rho |ja ib>
                        out[(ia * db + ib, ja * db + jb)] = self.mat[(ia * db + jb, ja * db + ib)];
                    }
                }
            }
        }
        Ok(DensityMatrix {
            space: self.space.clone(),
            mat: out,
        })
    }

    /// Logarithmic negativity `E_N = log2(2N + 1)` across the bipartition at
    /// `split`, with `N` the absolute sum of negative eigenvalues of the
    /// partial transpose.
    pub fn log_negativity(&self, split: usize) -> Result<f64> {
        let pt = self.partial_transpose(split)?;
        let eig = eig_hermitian_unchecked(pt.matrix());
        let neg: f64 = eig.values.iter().filter(|&&v| v < 0.0).sum::<f64>().abs();
        Ok((2.0 * neg + 1.0).log2())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{destroy, embed, pauli, Pauli};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn product_state_partial_trace_recovers_factor() {
        let rho_a = DensityMatrix::new(
            SpaceDims::single(2),
            DMatrix::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)]),
        )
        .unwrap();
        let rho_b = DensityMatrix::thermal(3, 0.4).unwrap();
        let joint = rho_a.kron(&rho_b);
        let back = joint.partial_trace(&[0]).unwrap();
        let diff = (back.matrix() - rho_a.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-14);
        // trace preserved
        assert!((back.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_pair_reduces_to_maximally_mixed() {
        let space = SpaceDims::new(vec![2, 2]).unwrap();
        let amp = DVector::from_vec(vec![
            c(1.0 / 2.0f64.sqrt(), 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0 / 2.0f64.sqrt(), 0.0),
        ]);
        let rho = StateVector::new(space, amp).unwrap().to_density();
        for keep in [0usize, 1] {
            let red = rho.partial_trace(&[keep]).unwrap();
            assert!((red.matrix()[(0, 0)].re - 0.5).abs() < 1e-14);
            assert!((red.matrix()[(1, 1)].re - 0.5).abs() < 1e-14);
            assert!(red.matrix()[(0, 1)].norm() < 1e-14);
        }
    }

    #[test]
    fn trace_composes_over_both_orders() {
        // random-ish bipartite rho: Tr_B then Tr_A equals the full trace
        let space = SpaceDims::new(vec![2, 3]).unwrap();
        let mut seed = 7u64;
        let mut rand = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let raw = DMatrix::from_fn(6, 6, |_, _| c(rand(), rand()));
        let psd = &raw * raw.adjoint();
        let tr: C64 = psd.diagonal().iter().sum();
        let rho = DensityMatrix::new(space, psd / tr).unwrap();

        let ta = rho.partial_trace(&[0]).unwrap();
        let tb = rho.partial_trace(&[1]).unwrap();
        assert!((ta.trace() - rho.trace()).norm() < 1e-12);
        assert!((tb.trace() - rho.trace()).norm() < 1e-12);
        // reducing the reduced state to nothing is the full trace
        assert!((ta.matrix().trace() - rho.trace()).norm() < 1e-12);
    }

    #[test]
    fn product_state_negativity_zero() {
        let rho = DensityMatrix::thermal(2, 0.2)
            .unwrap()
            .kron(&DensityMatrix::thermal(3, 0.1).unwrap());
        let en = rho.log_negativity(1).unwrap();
        assert!(en.abs() < 1e-10);
    }

    #[test]
    fn bell_pair_negativity_one() {
        // (|g,1> + |e,0>)/sqrt(2) on qubit x 2-level mode
        let space = SpaceDims::new(vec![2, 2]).unwrap();
        let amp = DVector::from_vec(vec![
            c(0.0, 0.0),
            c(1.0 / 2.0f64.sqrt(), 0.0),
            c(1.0 / 2.0f64.sqrt(), 0.0),
            c(0.0, 0.0),
        ]);
        let rho = StateVector::new(space, amp).unwrap().to_density();
        let en = rho.log_negativity(1).unwrap();
        assert!((en - 1.0).abs() < 1e-12, "E_N = {en}");
    }

    #[test]
    fn embed_partial_trace_consistency() {
        // Tr_B[(A (x) I) rho] = A Tr_B[rho] as matrices on slot A
        let space = SpaceDims::new(vec![2, 3]).unwrap();
        let a = pauli(Pauli::X);
        let ea = embed(&a, 0, &space).unwrap();
        let mut seed = 99u64;
        let mut rand = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let raw = DMatrix::from_fn(6, 6, |_, _| c(rand(), rand()));
        let psd = &raw * raw.adjoint();
        let tr: C64 = psd.diagonal().iter().sum();
        let rho = DensityMatrix::new(space.clone(), psd / tr).unwrap();

        let lhs_full =
            DensityMatrix::from_matrix_unchecked(space, ea.matrix() * rho.matrix()).unwrap();
        let lhs = lhs_full.partial_trace(&[0]).unwrap();
        let rhs = a.matrix() * rho.partial_trace(&[0]).unwrap().matrix();
        let diff = (lhs.matrix() - &rhs)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }

    #[test]
    fn thermal_occupancy_matches() {
        let dim = 40;
        let n_th = 0.7;
        let rho = DensityMatrix::thermal(dim, n_th).unwrap();
        let n_op = destroy(dim)
            .unwrap()
            .dagger()
            .matmul(&destroy(dim).unwrap());
        let got = rho.expectation(&n_op).re;
        assert!((got - n_th).abs() < 1e-9, "<n> = {got}");
    }
}
