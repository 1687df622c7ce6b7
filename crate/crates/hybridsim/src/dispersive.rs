//! Schrieffer–Wolff Lamb and dispersive shifts of a readout cavity charge-
//! coupled to a qubit, plus the exact qubit (x) cavity diagonalization used
//! to validate them.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::circuits::{MatrixElementKind, QubitEigensystem};
use crate::eigen::eig_hermitian;
use crate::error::{Error, Result};
use crate::operator::{create, destroy, number, Operator};
use crate::space::SpaceDims;

/// Readout cavity: frequency and charge-coupling strength, both GHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavitySpec {
    pub omega: f64,
    pub g: f64,
}

impl CavitySpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) {
            return Err(Error::InvalidParameter {
                name: "omega",
                reason: format!("{} must be > 0", self.omega),
            });
        }
        if self.g < 0.0 {
            return Err(Error::InvalidParameter {
                name: "g",
                reason: format!("{} must be >= 0", self.g),
            });
        }
        Ok(())
    }
}

/// Second-order shifts. `pairwise[(i, l)]` is
/// `chi_il = g^2 |<i|n|l>|^2 / (E_i - E_l - omega)`; the aggregates are
/// `lamb_i = sum_l chi_il` and `chi_i = sum_l (chi_il - chi_li)`.
#[derive(Debug, Clone)]
pub struct DispersiveShifts {
    pub lamb: Vec<f64>,
    pub chi: Vec<f64>,
    pub pairwise: DMatrix<f64>,
    pub levels_used: usize,
}

impl DispersiveShifts {
    /// State-dependent cavity pull `2chi = chi_e - chi_g` for the qubit
    /// subspace, the quantity measured in dispersive readout.
    pub fn two_chi(&self) -> f64 {
        self.chi[1] - self.chi[0]
    }
}

/// Default level cutoffs: the transmon is nearest-neighbour dominated; the
/// fluxonium picks up significant contributions from higher levels.
pub const TRANSMON_LEVEL_CUTOFF: usize = 8;
pub const FLUXONIUM_LEVEL_CUTOFF: usize = 12;

/// Guard against an exact qubit-transition / cavity resonance, where the
/// shifts diverge.
pub const RESONANCE_GUARD: f64 = 1e-6;

/// Schrieffer–Wolff shift table over the lowest `level_cutoff` qubit levels.
pub fn sw_shifts(
    qubit: &QubitEigensystem,
    cavity: &CavitySpec,
    level_cutoff: usize,
) -> Result<DispersiveShifts> {
    cavity.validate()?;
    if level_cutoff > qubit.dim() {
        return Err(Error::DimensionMismatch {
            expected: qubit.dim(),
            got: level_cutoff,
        });
    }
    let n_elems = qubit.matrix_elements(MatrixElementKind::ChargeN, level_cutoff)?;

    for i in 0..level_cutoff {
        for l in 0..level_cutoff {
            if i == l {
                continue;
            }
            let gap = (qubit.energies[i] - qubit.energies[l] - cavity.omega).abs();
            if gap <= RESONANCE_GUARD {
                return Err(Error::NearResonantPair { i, l, gap });
            }
        }
    }

    let g2 = cavity.g * cavity.g;
    let mut pairwise = DMatrix::<f64>::zeros(level_cutoff, level_cutoff);
    for i in 0..level_cutoff {
        for l in 0..level_cutoff {
            let num = g2 * n_elems[(i, l)].norm_sqr();
            let den = qubit.energies[i] - qubit.energies[l] - cavity.omega;
            pairwise[(i, l)] = num / den;
        }
    }
    let lamb: Vec<f64> = (0..level_cutoff).map(|i| pairwise.row(i).sum()).collect();
    let chi: Vec<f64> = (0..level_cutoff)
        .map(|i| {
            (0..level_cutoff)
                .map(|l| pairwise[(i, l)] - pairwise[(l, i)])
                .sum()
        })
        .collect();
    Ok(DispersiveShifts {
        lamb,
        chi,
        pairwise,
        levels_used: level_cutoff,
    })
}

/// Exact cavity pull per dressed qubit level: diagonalize the full
/// qubit (x) cavity Hamiltonian
/// `H = sum_i E_i |i><i| + g (a + a^dag) n_il |i><l| + omega a^dag a`
/// and report `E(i, n=1) - E(i, n=0) - omega` using maximum-overlap dressed-
/// state identification.
pub fn exact_shift_oracle(
    qubit: &QubitEigensystem,
    cavity: &CavitySpec,
    photon_cutoff: usize,
    qubit_levels: usize,
) -> Result<Vec<f64>> {
    cavity.validate()?;
    if photon_cutoff < 3 {
        return Err(Error::InvalidParameter {
            name: "photon_cutoff",
            reason: format!("{photon_cutoff} must be >= 3"),
        });
    }
    if qubit_levels > qubit.dim() {
        return Err(Error::DimensionMismatch {
            expected: qubit.dim(),
            got: qubit_levels,
        });
    }
    let n_elems = qubit.matrix_elements(MatrixElementKind::ChargeN, qubit_levels)?;

    let space = SpaceDims::new(vec![qubit_levels, photon_cutoff])?;
    let nq = qubit_levels;
    let np = photon_cutoff;

    let mut hq = DMatrix::<C64>::zeros(nq, nq);
    for i in 0..nq {
        hq[(i, i)] = C64::new(qubit.energies[i], 0.0);
    }
    let a = destroy(np)?;
    let x_cav = a.add(&create(np)?);
    let n_cav = number(np)?;

    let h = Operator::from_matrix(
        space.clone(),
        hq.kronecker(&DMatrix::identity(np, np))
            + (&n_elems * C64::new(cavity.g, 0.0)).kronecker(x_cav.matrix())
            + DMatrix::identity(nq, nq).kronecker(&(n_cav.matrix() * C64::new(cavity.omega, 0.0))),
    )?;
    let eig = eig_hermitian(&h)?;

    // dressed-state lookup by maximum overlap with |i, n>
    let bare_index = |i: usize, n: usize| i * np + n;
    let find = |i: usize, n: usize| -> usize {
        let row = bare_index(i, n);
        let mut best = 0;
        let mut best_ov = -1.0;
        for k in 0..eig.values.len() {
            let ov = eig.vectors[(row, k)].norm_sqr();
            if ov > best_ov {
                best_ov = ov;
                best = k;
            }
        }
        best
    };

    let mut pulls = Vec::with_capacity(qubit_levels);
    for i in 0..qubit_levels {
        let e0 = eig.values[find(i, 0)];
        let e1 = eig.values[find(i, 1)];
        pulls.push(e1 - e0 - cavity.omega);
    }
    Ok(pulls)
}
