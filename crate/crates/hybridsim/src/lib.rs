//! Desk-scale simulation of superconducting-qubit hybrid systems: circuit
//! Hamiltonians and spectra, dispersive readout, qubit–mechanical coupling
//! through the charge and flux channels, open-system dynamics, longitudinal
//! coupling protocols, and linearized electro-optomechanics.
//!
//! Units: all energies and rates are plain frequencies in GHz with
//! `hbar = 1`, so a Hamiltonian entry `w` evolves a phase as `exp(-i w t)`
//! with `t` in ns. Caption-style values ("g = 1 MHz") enter as `1e-3`.
//!
//! Everything is dense and immutable; operations are pure functions. Sweeps
//! over grids are embarrassingly parallel and use rayon when the `parallel`
//! feature (default) is enabled.

pub mod circuits;
pub mod dispersive;
pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod operator;
pub mod optomech;
pub mod phase_space;
pub mod protocols;
pub mod qubitmech;
pub mod space;
pub mod state;

pub use error::{Error, Result};
pub use operator::Operator;
pub use space::SpaceDims;
pub use state::{DensityMatrix, StateVector};

// states and operators are built from these types; spare consumers a
// version-matching dependency
pub use nalgebra;
pub use num_complex;

pub(crate) mod par {
    /// Map over a slice in parallel (or sequentially without the feature),
    /// preserving order.
    #[cfg(feature = "parallel")]
    pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }

    #[cfg(not(feature = "parallel"))]
    pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
    where
        F: Fn(&T) -> U,
    {
        items.iter().map(f).collect()
    }
}
