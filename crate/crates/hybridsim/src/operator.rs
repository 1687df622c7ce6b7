//! Dense operators on finite-dimensional composite spaces.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::space::SpaceDims;

/// Relative Hermiticity tolerance: residual over the largest matrix element.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// A dense complex square matrix tagged with the tensor-product structure of
/// the space it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: SpaceDims,
    mat: DMatrix<C64>,
}

impl Operator {
    pub fn from_matrix(space: SpaceDims, mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                expected: mat.nrows(),
                got: mat.ncols(),
            });
        }
        if mat.nrows() != space.total() {
            return Err(Error::DimensionMismatch {
                expected: space.total(),
                got: mat.nrows(),
            });
        }
        Ok(Self { space, mat })
    }

    pub fn zeros(space: SpaceDims) -> Self {
        let n = space.total();
        Self {
            space,
            mat: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(space: SpaceDims) -> Self {
        let n = space.total();
        Self {
            space,
            mat: DMatrix::identity(n, n),
        }
    }

    pub fn space(&self) -> &SpaceDims {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn dagger(&self) -> Self {
        Self {
            space: self.space.clone(),
            mat: self.mat.adjoint(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            space: self.space.clone(),
            mat: &self.mat * c,
        }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.space, other.space);
        Self {
            space: self.space.clone(),
            mat: &self.mat + &other.mat,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.space, other.space);
        Self {
            space: self.space.clone(),
            mat: &self.mat - &other.mat,
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.space, other.space);
        Self {
            space: self.space.clone(),
            mat: &self.mat * &other.mat,
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn trace(&self) -> C64 {
        self.mat.diagonal().iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-element residual of `A - A^dagger`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.mat.nrows();
        let mut r = 0.0f64;
        for i in 0..n {
            for j in i..n {
                r = r.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        r
    }

    /// Check Hermiticity against `HERMITICITY_TOL` relative to the largest
    /// element (with an absolute floor of the same value for near-zero
    /// operators).
    pub fn check_hermitian(&self) -> Result<()> {
        let tol = HERMITICITY_TOL * self.max_abs().max(1.0);
        let residual = self.hermiticity_residual();
        if residual > tol {
            return Err(Error::NotHermitian { residual, tol });
        }
        Ok(())
    }

    /// Kronecker product; the result's space is the concatenation of slots.
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

    /// Reinterpret the same matrix on a differently factored space of equal
    /// total dimension (e.g. after projecting a qubit onto 2 levels).
    pub fn with_space(&self, space: SpaceDims) -> Result<Self> {
        if space.total() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: space.total(),
            });
        }
        Ok(Self {
            space,
            mat: self.mat.clone(),
        })
    }

    /// ⟨ψ|A|ψ⟩.
    pub fn expectation(&self, psi: &nalgebra::DVector<C64>) -> C64 {
        (psi.adjoint() * &self.mat * psi)[(0, 0)]
    }
}

/// Truncated annihilation operator: `a[n-1, n] = sqrt(n)`.
pub fn destroy(dim: usize) -> Result<Operator> {
    if dim < 2 {
        return Err(Error::InvalidDimension {
            dim,
            reason: "ladder operator needs dim >= 2",
        });
    }
    let mut m = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(Operator {
        space: SpaceDims::single(dim),
        mat: m,
    })
}

/// Truncated creation operator, the adjoint of [`destroy`].
pub fn create(dim: usize) -> Result<Operator> {
    Ok(destroy(dim)?.dagger())
}

/// Number operator `diag(0..dim-1)`.
pub fn number(dim: usize) -> Result<Operator> {
    if dim < 2 {
        return Err(Error::InvalidDimension {
            dim,
            reason: "ladder operator needs dim >= 2",
        });
    }
    let m = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            C64::new(i as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(Operator {
        space: SpaceDims::single(dim),
        mat: m,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

/// Pauli matrices in the `(|g>, |e>)` ordering with `sigma_z |g> = -|g>`.
///
/// With this sign, a longitudinal interaction `sigma_z (b + b^dag)` displaces
/// the ground-state branch with amplitude `+i G t`, fixing the sign
/// correlation of the conditional-displacement protocols.
///
/// `sigma_plus = |e><g|` raises and `sigma_minus = |g><e|` lowers.
pub fn pauli(which: Pauli) -> Operator {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let mat = match which {
        Pauli::X => DMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        // (g,e) ordering: sigma_y |g> = -i|e>, so [sigma_x, sigma_y] = 2i sigma_z
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[z, i, -i, z]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[-one, z, z, one]),
        Pauli::Plus => DMatrix::from_row_slice(2, 2, &[z, z, one, z]),
        Pauli::Minus => DMatrix::from_row_slice(2, 2, &[z, one, z, z]),
    };
    Operator {
        space: SpaceDims::single(2),
        mat,
    }
}

/// Embed `op` into `slot` of `space`, acting as the identity elsewhere.
pub fn embed(op: &Operator, slot: usize, space: &SpaceDims) -> Result<Operator> {
    if slot >= space.n_slots() {
        return Err(Error::SlotOutOfRange {
            slot,
            nslots: space.n_slots(),
        });
    }
    if op.dim() != space.dims()[slot] {
        return Err(Error::DimensionMismatch {
            expected: space.dims()[slot],
            got: op.dim(),
        });
    }
    let mut acc = DMatrix::<C64>::identity(1, 1);
    for (k, &d) in space.dims().iter().enumerate() {
        let factor = if k == slot {
            op.mat.clone()
        } else {
            DMatrix::identity(d, d)
        };
        acc = acc.kronecker(&factor);
    }
    Ok(Operator {
        space: space.clone(),
        mat: acc,
    })
}
