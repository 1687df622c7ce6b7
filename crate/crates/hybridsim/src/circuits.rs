//! Superconducting-circuit Hamiltonians: split Cooper-pair box (charge qubit
//! and transmon regimes) and fluxonium, their spectra versus flux and gate
//! charge, and the qubit matrix elements consumed by the coupling modules.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::eigen::{eig_hermitian, eig_hermitian_unchecked};
use crate::error::{Error, Result};
use crate::operator::{create, destroy, Operator};
use crate::space::SpaceDims;

/// Split-junction transmon / CPB parameters. Energies in GHz; the charge
/// basis keeps states `m` in `[-n_charge, n_charge]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmonParams {
    pub e_j1: f64,
    pub e_j2: f64,
    pub e_c: f64,
    pub n_charge: usize,
}

impl TransmonParams {
    pub fn symmetric(e_j_max: f64, e_c: f64, n_charge: usize) -> Self {
        Self {
            e_j1: e_j_max / 2.0,
            e_j2: e_j_max / 2.0,
            e_c,
            n_charge,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("e_j1", self.e_j1), ("e_j2", self.e_j2), ("e_c", self.e_c)] {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("{v} must be > 0"),
                });
            }
        }
        if self.n_charge < 5 {
            return Err(Error::InvalidParameter {
                name: "n_charge",
                reason: format!("{} must be >= 5", self.n_charge),
            });
        }
        Ok(())
    }

    pub fn ej_max(&self) -> f64 {
        self.e_j1 + self.e_j2
    }

    /// Junction asymmetry `d = (E_J1 - E_J2) / (E_J1 + E_J2)`.
    pub fn asymmetry(&self) -> f64 {
        (self.e_j1 - self.e_j2) / (self.e_j1 + self.e_j2)
    }

    /// Flux-dependent effective Josephson energy of the split junction,
    /// `E_J^max sqrt(cos^2(pi f) + d^2 sin^2(pi f))` with `f = flux / flux
    /// quantum`.
    pub fn ej_eff(&self, flux: f64) -> f64 {
        let phase = std::f64::consts::PI * flux;
        let d = self.asymmetry();
        let (s, c) = phase.sin_cos();
        self.ej_max() * (c * c + d * d * s * s).sqrt()
    }
}

/// Fluxonium parameters. `n_fock` is the oscillator-basis truncation of the
/// harmonic (charging + inductive) section.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxoniumParams {
    pub e_j: f64,
    pub e_c: f64,
    pub e_l: f64,
    pub n_fock: usize,
}

impl FluxoniumParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("e_j", self.e_j), ("e_c", self.e_c), ("e_l", self.e_l)] {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("{v} must be > 0"),
                });
            }
        }
        if self.n_fock < 20 {
            return Err(Error::InvalidParameter {
                name: "n_fock",
                reason: format!("{} must be >= 20", self.n_fock),
            });
        }
        Ok(())
    }

    /// Plasma frequency of the bare harmonic section, `sqrt(8 E_C E_L)`.
    pub fn plasma(&self) -> f64 {
        (8.0 * self.e_c * self.e_l).sqrt()
    }
}

/// External bias: flux in units of the flux quantum, plus the dimensionless
/// gate charge. Both are periodic; no range restriction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasPoint {
    pub flux: f64,
    pub gate_charge: f64,
}

impl BiasPoint {
    pub fn flux(flux: f64) -> Self {
        Self {
            flux,
            gate_charge: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QubitSpec {
    Transmon(TransmonParams),
    Fluxonium(FluxoniumParams),
}

impl QubitSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            QubitSpec::Transmon(p) => p.validate(),
            QubitSpec::Fluxonium(p) => p.validate(),
        }
    }

    pub fn basis_size(&self) -> usize {
        match self {
            QubitSpec::Transmon(p) => 2 * p.n_charge + 1,
            QubitSpec::Fluxonium(p) => p.n_fock,
        }
    }
}

/// Split-CPB Hamiltonian in the charge basis: diagonal `4 E_C (m - n_g)^2`
/// with symmetric off-diagonal `-E_J^eff / 2` between neighbouring charge
/// states.
pub fn cpb_hamiltonian(e_c: f64, ej_eff: f64, gate_charge: f64, n_charge: usize) -> Operator {
    let dim = 2 * n_charge + 1;
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for k in 0..dim {
        let m = k as f64 - n_charge as f64;
        h[(k, k)] = C64::new(4.0 * e_c * (m - gate_charge) * (m - gate_charge), 0.0);
        if k + 1 < dim {
            h[(k, k + 1)] = C64::new(-ej_eff / 2.0, 0.0);
            h[(k + 1, k)] = C64::new(-ej_eff / 2.0, 0.0);
        }
    }
    Operator::from_matrix(SpaceDims::single(dim), h).expect("square")
}

/// Two-level charge-qubit reduction: electrostatic asymmetry
/// `E_el = 4 E_C (1 - 2 n_g)` and qubit splitting
/// `Omega = sqrt(E_J^2 + E_el^2)`.
pub fn charge_qubit_levels(e_c: f64, ej_eff: f64, gate_charge: f64) -> (f64, f64) {
    let e_el = 4.0 * e_c * (1.0 - 2.0 * gate_charge);
    (e_el, (ej_eff * ej_eff + e_el * e_el).sqrt())
}

/// Perturbative transmon level data from the quartic expansion of the
/// Josephson cosine.
#[derive(Debug, Clone, Copy)]
pub struct TransmonPerturbative {
    /// Level energy `Omega_T (n + 1/2) - E_J^eff - (E_C/12)(6n^2 + 6n + 3)`.
    pub energy: f64,
    /// Plasma frequency `sqrt(8 E_C E_J^eff)`.
    pub omega_t: f64,
    /// Absolute anharmonicity `(E_2 - E_1) - (E_1 - E_0) = -E_C`.
    pub alpha: f64,
    /// Relative anharmonicity from its definition `alpha / (E_1 - E_0)`;
    /// deep in the transmon regime this approaches
    /// `-(E_C / (8 E_J^eff))^(1/2)`.
    pub alpha_r: f64,
    /// `E_J^eff / E_C` at this flux.
    pub ratio: f64,
    /// Set when `20 <= ratio < 50`: the expansion is valid but slow to
    /// converge.
    pub soft_warning: bool,
}

pub fn transmon_perturbative(
    params: &TransmonParams,
    flux: f64,
    n: usize,
) -> Result<TransmonPerturbative> {
    params.validate()?;
    let ej = params.ej_eff(flux);
    if ej <= 1e-12 * params.ej_max() {
        return Err(Error::DegenerateJunction(ej));
    }
    let ratio = ej / params.e_c;
    if ratio < 20.0 {
        return Err(Error::InvalidParameter {
            name: "flux",
            reason: format!("E_J^eff/E_C = {ratio:.2} < 20: outside the transmon regime"),
        });
    }
    let omega_t = (8.0 * params.e_c * ej).sqrt();
    let nf = n as f64;
    let energy = omega_t * (nf + 0.5) - ej - params.e_c / 12.0 * (6.0 * nf * nf + 6.0 * nf + 3.0);
    let alpha = -params.e_c;
    let f01 = omega_t - params.e_c;
    Ok(TransmonPerturbative {
        energy,
        omega_t,
        alpha,
        alpha_r: alpha / f01,
        ratio,
        soft_warning: ratio < 50.0,
    })
}

/// Where the external flux enters the fluxonium Hamiltonian. The two
/// placements are related by a phase shift and must agree on spectra at
/// static flux.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxGauge {
    /// `-E_J cos(theta + 2 pi f)` with the bare quadratic `E_L theta^2 / 2`.
    Cosine,
    /// `-E_J cos(theta)` with the shifted quadratic
    /// `E_L (theta - 2 pi f)^2 / 2`.
    Quadratic,
}

struct OscillatorOps {
    theta: DMatrix<C64>,
    charge_n: DMatrix<C64>,
}

/// Ladder-built phase and charge operators for a harmonic section with
/// charging energy `e_c` (coefficient of `n^2` is `4 e_c`) and quadratic
/// stiffness `e_quad` (coefficient of `theta^2 / 2`).
fn oscillator_ops(e_c: f64, e_quad: f64, dim: usize) -> OscillatorOps {
    let a = destroy(dim).expect("dim >= 2");
    let adag = create(dim).expect("dim >= 2");
    let xi = (8.0 * e_c / e_quad).powf(0.25); // phase zero-point scale
    let theta = a.add(&adag).scale(C64::new(xi / 2f64.sqrt(), 0.0));
    let charge_n = adag.sub(&a).scale(C64::new(0.0, 1.0 / (xi * 2f64.sqrt())));
    OscillatorOps {
        theta: theta.into_matrix(),
        charge_n: charge_n.into_matrix(),
    }
}

/// cos/sin of a Hermitian matrix through its spectral decomposition.
fn trig_of_hermitian(theta: &DMatrix<C64>) -> (DMatrix<C64>, DMatrix<C64>) {
    let eig = eig_hermitian_unchecked(theta);
    (eig.map_values(f64::cos), eig.map_values(f64::sin))
}

/// Fluxonium Hamiltonian `4 E_C n^2 + E_L theta^2 / 2 - E_J cos(theta + 2
/// pi f)` (or the quadratic-gauge equivalent), in the oscillator basis of the
/// harmonic section.
pub fn fluxonium_hamiltonian(
    params: &FluxoniumParams,
    flux: f64,
    gauge: FluxGauge,
) -> Result<Operator> {
    params.validate()?;
    Ok(fluxonium_parts(params, flux, gauge, params.n_fock).hamiltonian)
}

struct FluxoniumBuild {
    hamiltonian: Operator,
    theta: DMatrix<C64>,
    charge_n: DMatrix<C64>,
    cos_theta: DMatrix<C64>,
}

fn fluxonium_parts(
    params: &FluxoniumParams,
    flux: f64,
    gauge: FluxGauge,
    dim: usize,
) -> FluxoniumBuild {
    let ops = oscillator_ops(params.e_c, params.e_l, dim);
    let phi = 2.0 * std::f64::consts::PI * flux;
    let (cos_t, sin_t) = trig_of_hermitian(&ops.theta);

    let n2 = &ops.charge_n * &ops.charge_n;
    let t2 = &ops.theta * &ops.theta;
    let h = match gauge {
        FluxGauge::Cosine => {
            // -E_J cos(theta + phi) = -E_J [cos(phi) cos(theta) - sin(phi) sin(theta)]
            n2.scale(4.0 * params.e_c) + t2.scale(0.5 * params.e_l)
                - cos_t.scale(params.e_j * phi.cos())
                + sin_t.scale(params.e_j * phi.sin())
        }
        FluxGauge::Quadratic => {
            let id = DMatrix::<C64>::identity(dim, dim);
            let shifted = &ops.theta - id.scale(phi);
            n2.scale(4.0 * params.e_c) + (&shifted * &shifted).scale(0.5 * params.e_l)
                - cos_t.scale(params.e_j)
        }
    };
    FluxoniumBuild {
        hamiltonian: Operator::from_matrix(SpaceDims::single(dim), h).expect("square"),
        theta: ops.theta,
        charge_n: ops.charge_n,
        cos_theta: cos_t,
    }
}

/// Operator whose qubit-basis matrix elements are requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixElementKind {
    /// Cooper-pair number operator.
    ChargeN,
    /// Superconducting phase (oscillator-basis builds only; the phase is
    /// compact in the charge basis).
    PhaseTheta,
    /// Cosine of the phase (exact nearest-neighbour ladder in the charge
    /// basis; spectral in oscillator bases).
    CosTheta,
}

/// Construction basis of a solved qubit.
#[derive(Debug, Clone, PartialEq)]
enum ConstructionBasis {
    Charge,
    Oscillator,
}

/// Diagonalized qubit with the construction-basis operators needed for
/// coupling matrix elements.
#[derive(Debug, Clone)]
pub struct QubitEigensystem {
    pub energies: Vec<f64>,
    /// Eigenvector columns in the construction basis.
    pub states: DMatrix<C64>,
    pub bias: BiasPoint,
    basis: ConstructionBasis,
    charge_op: DMatrix<C64>,
    theta_op: Option<DMatrix<C64>>,
    cos_theta_op: DMatrix<C64>,
}

impl QubitEigensystem {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Transition frequency `E_j - E_i`.
    pub fn transition(&self, i: usize, j: usize) -> f64 {
        self.energies[j] - self.energies[i]
    }

    pub fn f01(&self) -> f64 {
        self.transition(0, 1)
    }

    /// `M_ij = <i|O|j>` over the lowest `levels` eigenstates.
    pub fn matrix_elements(&self, which: MatrixElementKind, levels: usize) -> Result<DMatrix<C64>> {
        if levels > self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: levels,
            });
        }
        let op = match which {
            MatrixElementKind::ChargeN => &self.charge_op,
            MatrixElementKind::CosTheta => &self.cos_theta_op,
            MatrixElementKind::PhaseTheta => self.theta_op.as_ref().ok_or_else(|| {
                Error::UnsupportedBasis(
                    "phase_theta is undefined for a charge-basis build (compact phase)".into(),
                )
            })?,
        };
        let v = self.states.columns(0, levels);
        let m = v.adjoint() * op * v;
        debug_assert_eq!(
            self.basis == ConstructionBasis::Charge,
            self.theta_op.is_none()
        );
        Ok(m)
    }
}

/// Diagonalize the split CPB in the charge basis.
pub fn solve_transmon_charge_basis(
    params: &TransmonParams,
    bias: &BiasPoint,
) -> Result<QubitEigensystem> {
    params.validate()?;
    let dim = 2 * params.n_charge + 1;
    let h = cpb_hamiltonian(
        params.e_c,
        params.ej_eff(bias.flux),
        bias.gate_charge,
        params.n_charge,
    );
    let eig = eig_hermitian(&h)?;

    let charge_op = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            C64::new(i as f64 - params.n_charge as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mut cos_theta = DMatrix::<C64>::zeros(dim, dim);
    for k in 0..dim - 1 {
        cos_theta[(k, k + 1)] = C64::new(0.5, 0.0);
        cos_theta[(k + 1, k)] = C64::new(0.5, 0.0);
    }
    Ok(QubitEigensystem {
        energies: eig.values.iter().copied().collect(),
        states: eig.vectors,
        bias: *bias,
        basis: ConstructionBasis::Charge,
        charge_op,
        theta_op: None,
        cos_theta_op: cos_theta,
    })
}

/// Diagonalize the transmon in the oscillator basis of its harmonic section
/// (`4 E_C n^2 - E_J^eff cos(theta)` with the exact spectral cosine). This
/// build exposes the phase operator itself.
pub fn solve_transmon_oscillator_basis(
    params: &TransmonParams,
    bias: &BiasPoint,
    n_fock: usize,
) -> Result<QubitEigensystem> {
    params.validate()?;
    if n_fock < 20 {
        return Err(Error::InvalidParameter {
            name: "n_fock",
            reason: format!("{n_fock} must be >= 20"),
        });
    }
    let ej = params.ej_eff(bias.flux);
    if ej <= 1e-12 * params.ej_max() {
        return Err(Error::DegenerateJunction(ej));
    }
    let ops = oscillator_ops(params.e_c, ej, n_fock);
    let (cos_t, _) = trig_of_hermitian(&ops.theta);
    let n2 = &ops.charge_n * &ops.charge_n;
    let h = n2.scale(4.0 * params.e_c) - cos_t.scale(ej);
    let op = Operator::from_matrix(SpaceDims::single(n_fock), h)?;
    let eig = eig_hermitian(&op)?;
    Ok(QubitEigensystem {
        energies: eig.values.iter().copied().collect(),
        states: eig.vectors,
        bias: *bias,
        basis: ConstructionBasis::Oscillator,
        charge_op: ops.charge_n,
        theta_op: Some(ops.theta),
        cos_theta_op: cos_t,
    })
}

/// Diagonalize the fluxonium, guarding the Fock truncation: the lowest four
/// eigenvalues must move by less than 1e-6 GHz when ten more levels are kept.
pub fn solve_fluxonium(
    params: &FluxoniumParams,
    bias: &BiasPoint,
    gauge: FluxGauge,
) -> Result<QubitEigensystem> {
    params.validate()?;
    let build = fluxonium_parts(params, bias.flux, gauge, params.n_fock);
    let eig = eig_hermitian(&build.hamiltonian)?;

    let wide = fluxonium_parts(params, bias.flux, gauge, params.n_fock + 10);
    let eig_wide = eig_hermitian(&wide.hamiltonian)?;
    for k in 0..4.min(eig.values.len()) {
        let shift = (eig.values[k] - eig_wide.values[k]).abs();
        if shift > 1e-6 {
            return Err(Error::Truncation(format!(
                "fluxonium level {k} shifts by {shift:.3e} GHz when n_fock grows from {} to {}",
                params.n_fock,
                params.n_fock + 10
            )));
        }
    }

    Ok(QubitEigensystem {
        energies: eig.values.iter().copied().collect(),
        states: eig.vectors,
        bias: *bias,
        basis: ConstructionBasis::Oscillator,
        charge_op: build.charge_n,
        theta_op: Some(build.theta),
        cos_theta_op: build.cos_theta,
    })
}

/// Solve either qubit flavour in its default basis (charge for the transmon,
/// cosine-gauge oscillator for the fluxonium).
pub fn solve_qubit(spec: &QubitSpec, bias: &BiasPoint) -> Result<QubitEigensystem> {
    match spec {
        QubitSpec::Transmon(p) => solve_transmon_charge_basis(p, bias),
        QubitSpec::Fluxonium(p) => solve_fluxonium(p, bias, FluxGauge::Cosine),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Flux,
    GateCharge,
}

/// Columnar result of a one-dimensional bias sweep: per point, the lowest
/// `k` eigenvalues and the transition frequencies `E_i - E_0`.
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub energies: Vec<Vec<f64>>,
    pub transitions: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn levels(&self) -> usize {
        self.energies.first().map_or(0, Vec::len)
    }

    /// Column of `E_k - E_0` over the sweep.
    pub fn transition_column(&self, k: usize) -> Vec<f64> {
        self.transitions.iter().map(|row| row[k]).collect()
    }
}

/// Sweep one bias parameter, holding the other fixed at `base`.
pub fn spectrum_sweep(
    spec: &QubitSpec,
    parameter: SweepParameter,
    values: &[f64],
    base: BiasPoint,
    k: usize,
) -> Result<SweepTable> {
    spec.validate()?;
    if k > spec.basis_size() / 2 {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: format!(
                "{k} levels exceeds half the basis size {}",
                spec.basis_size()
            ),
        });
    }
    let rows: Vec<Result<Vec<f64>>> = crate::par::map(values, |&v| {
        let bias = match parameter {
            SweepParameter::Flux => BiasPoint { flux: v, ..base },
            SweepParameter::GateCharge => BiasPoint {
                gate_charge: v,
                ..base
            },
        };
        let sys = solve_qubit(spec, &bias)?;
        Ok(sys.energies[..k].to_vec())
    });
    let mut energies = Vec::with_capacity(values.len());
    for row in rows {
        energies.push(row?);
    }
    let transitions = energies
        .iter()
        .map(|row| row.iter().map(|e| e - row[0]).collect::<Vec<f64>>())
        .collect();
    Ok(SweepTable {
        parameter,
        values: values.to_vec(),
        energies,
        transitions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::linspace;

    const FIG_TRANSMON: TransmonParams = TransmonParams {
        e_j1: 5.0,
        e_j2: 5.0,
        e_c: 0.5,
        n_charge: 20,
    };
    const FIG_FLUXONIUM: FluxoniumParams = FluxoniumParams {
        e_j: 10.0,
        e_c: 1.2,
        e_l: 1.0,
        n_fock: 60,
    };

    #[test]
    fn ej_eff_limits() {
        let p = FIG_TRANSMON.clone();
        assert!((p.ej_eff(0.0) - 10.0).abs() < 1e-12);
        assert!(p.ej_eff(0.5).abs() < 1e-9);

        let asym = TransmonParams {
            e_j1: 7.5,
            e_j2: 2.5,
            e_c: 0.5,
            n_charge: 20,
        };
        assert!((asym.asymmetry() - 0.5).abs() < 1e-14);
        assert!((asym.ej_eff(0.5) - 5.0).abs() < 1e-12); // d * E_J^max at the node
    }

    #[test]
    fn cpb_diagonal_case() {
        // E_J = 0: eigenvalues are exactly the charging parabola values
        let n_g = 0.3;
        let h = cpb_hamiltonian(0.5, 0.0, n_g, 6);
        let eig = eig_hermitian(&h).unwrap();
        let mut want: Vec<f64> = (-6..=6)
            .map(|m| 4.0 * 0.5 * (m as f64 - n_g) * (m as f64 - n_g))
            .collect();
        want.sort_by(f64::total_cmp);
        for (a, b) in eig.values.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cpb_avoided_crossing_gap() {
        // at n_g = 1/2 the lowest gap is E_J^eff to first order
        let e_c = 0.5;
        let ej = 0.2; // well inside the charge regime
        let h = cpb_hamiltonian(e_c, ej, 0.5, 10);
        let eig = eig_hermitian(&h).unwrap();
        let gap = eig.values[1] - eig.values[0];
        assert!((gap - ej).abs() / ej < 0.02, "gap {gap}");
    }

    #[test]
    fn cpb_charge_periodicity() {
        let e_c = 0.5;
        let ej = 4.0 * e_c; // E_J^eff / 4E_C = 1
        let a = eig_hermitian(&cpb_hamiltonian(e_c, ej, 0.2, 12)).unwrap();
        let b = eig_hermitian(&cpb_hamiltonian(e_c, ej, 1.2, 12)).unwrap();
        for k in 0..6 {
            assert!((a.values[k] - b.values[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn cpb_gate_reflection_symmetry() {
        let e_c = 0.7;
        let ej = 2.0;
        let a = eig_hermitian(&cpb_hamiltonian(e_c, ej, 0.23, 12)).unwrap();
        let b = eig_hermitian(&cpb_hamiltonian(e_c, ej, 1.0 - 0.23, 12)).unwrap();
        for k in 0..6 {
            assert!((a.values[k] - b.values[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn charge_qubit_closed_forms() {
        let (_, omega) = charge_qubit_levels(0.5, 1.0, 0.5);
        assert!((omega - 1.0).abs() < 1e-14); // sweet spot

        let (e_el, omega) = charge_qubit_levels(0.5, 0.0, 0.25);
        assert!((omega - e_el.abs()).abs() < 1e-14);

        let (_, omega) = charge_qubit_levels(0.5, 1.0, 0.25);
        assert!((omega - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn perturbative_transmon_values() {
        let p = TransmonParams::symmetric(10.0, 0.5, 20);
        let l0 = transmon_perturbative(&p, 0.0, 0).unwrap();
        assert!((l0.omega_t - 40f64.sqrt()).abs() < 1e-12);
        assert!((l0.alpha + 0.5).abs() < 1e-14);

        // anharmonicity from the closed form is exactly -E_C
        let l1 = transmon_perturbative(&p, 0.0, 1).unwrap();
        let l2 = transmon_perturbative(&p, 0.0, 2).unwrap();
        let alpha = (l2.energy - l1.energy) - (l1.energy - l0.energy);
        assert!((alpha + p.e_c).abs() < 1e-12);
    }

    #[test]
    fn perturbative_matches_exact_at_ratio_50() {
        let e_c = 0.5;
        let p = TransmonParams::symmetric(25.0, e_c, 25); // E_J/E_C = 50
        let sys = solve_transmon_charge_basis(&p, &BiasPoint::flux(0.0)).unwrap();
        let exact_f01 = sys.f01();
        let l0 = transmon_perturbative(&p, 0.0, 0).unwrap();
        let l1 = transmon_perturbative(&p, 0.0, 1).unwrap();
        let pert_f01 = l1.energy - l0.energy;
        assert!(
            (pert_f01 - exact_f01).abs() / exact_f01 < 0.02,
            "pert {pert_f01} vs exact {exact_f01}"
        );
    }

    #[test]
    fn exact_anharmonicity_approaches_minus_ec() {
        // ratio here is E_J^eff / 4E_C, the charge-dispersion convention
        for (ratio, tol) in [(50.0, 0.10), (200.0, 0.03)] {
            let e_c = 0.4;
            let p = TransmonParams::symmetric(4.0 * ratio * e_c, e_c, 40);
            let sys = solve_transmon_charge_basis(&p, &BiasPoint::flux(0.0)).unwrap();
            let alpha = (sys.energies[2] - sys.energies[1]) - (sys.energies[1] - sys.energies[0]);
            assert!(
                (alpha + e_c).abs() / e_c < tol,
                "ratio {ratio}: alpha {alpha} vs -E_C {}",
                -e_c
            );
        }
    }

    #[test]
    fn fluxonium_harmonic_limit() {
        // E_J -> 0: evenly spaced with gap sqrt(8 E_C E_L)
        let p = FluxoniumParams {
            e_j: 1e-12,
            e_c: 1.2,
            e_l: 1.0,
            n_fock: 40,
        };
        let sys = solve_fluxonium(&p, &BiasPoint::flux(0.0), FluxGauge::Cosine).unwrap();
        let gap = p.plasma();
        for k in 0..5 {
            let spacing = sys.energies[k + 1] - sys.energies[k];
            assert!((spacing - gap).abs() < 1e-8, "spacing {spacing} vs {gap}");
        }
    }

    #[test]
    fn fluxonium_theta_n_commutator() {
        let ops = oscillator_ops(1.2, 1.0, 50);
        let comm = &ops.theta * &ops.charge_n - &ops.charge_n * &ops.theta;
        for i in 0..40 {
            for j in 0..40 {
                let want = if i == j {
                    C64::new(0.0, 1.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                assert!((comm[(i, j)] - want).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn fluxonium_flux_periodic_and_symmetric() {
        let p = FIG_FLUXONIUM.clone();
        let at = |f: f64| {
            solve_fluxonium(&p, &BiasPoint::flux(f), FluxGauge::Cosine)
                .unwrap()
                .energies[..4]
                .to_vec()
        };
        let a = at(0.2);
        let b = at(1.2);
        let c = at(0.8); // mirror about half flux
        for k in 0..4 {
            assert!((a[k] - b[k]).abs() < 1e-9, "periodicity level {k}");
            assert!((a[k] - c[k]).abs() < 1e-9, "symmetry level {k}");
        }
    }

    #[test]
    fn fluxonium_gauge_agreement() {
        let p = FIG_FLUXONIUM.clone();
        for flux in [0.0, 0.17, 0.3, 0.5] {
            let a = solve_fluxonium(&p, &BiasPoint::flux(flux), FluxGauge::Cosine).unwrap();
            let b = solve_fluxonium(&p, &BiasPoint::flux(flux), FluxGauge::Quadratic).unwrap();
            for k in 0..5 {
                assert!(
                    (a.energies[k] - b.energies[k]).abs() < 1e-7,
                    "flux {flux} level {k}: {} vs {}",
                    a.energies[k],
                    b.energies[k]
                );
            }
        }
    }

    #[test]
    fn fluxonium_variational_monotonicity() {
        // Enlarging the kept basis never raises an eigenvalue. The strict
        // statement is for nested (principal-submatrix) truncations; at the
        // builder level the spectral cosine re-converges per dimension, so
        // the bound holds to the convergence tolerance there.
        let flux = 0.37;
        let p = FluxoniumParams {
            n_fock: 80,
            ..FIG_FLUXONIUM.clone()
        };
        let parts = fluxonium_parts(&p, flux, FluxGauge::Cosine, p.n_fock);
        let full = parts.hamiltonian.matrix();
        let mut prev: Option<Vec<f64>> = None;
        for keep in [40usize, 60, 80] {
            let block = full.view((0, 0), (keep, keep)).into_owned();
            let eig = eig_hermitian_unchecked(&block);
            if let Some(last) = &prev {
                for k in 0..6 {
                    assert!(
                        eig.values[k] <= last[k] + 1e-12,
                        "level {k} rose at keep {keep}"
                    );
                }
            }
            prev = Some(eig.values.iter().copied().collect());
        }

        // builder-level check near the default truncation
        let small = solve_fluxonium(
            &FluxoniumParams {
                n_fock: 60,
                ..FIG_FLUXONIUM.clone()
            },
            &BiasPoint::flux(flux),
            FluxGauge::Cosine,
        )
        .unwrap();
        let large = solve_fluxonium(
            &FluxoniumParams {
                n_fock: 80,
                ..FIG_FLUXONIUM.clone()
            },
            &BiasPoint::flux(flux),
            FluxGauge::Cosine,
        )
        .unwrap();
        for k in 0..6 {
            assert!(
                large.energies[k] <= small.energies[k] + 1e-8,
                "level {k} rose"
            );
        }
    }

    #[test]
    fn fluxonium_selection_rule_at_ej_zero() {
        let p = FluxoniumParams {
            e_j: 1e-12,
            e_c: 1.2,
            e_l: 1.0,
            n_fock: 40,
        };
        let sys = solve_fluxonium(&p, &BiasPoint::flux(0.0), FluxGauge::Cosine).unwrap();
        let th = sys
            .matrix_elements(MatrixElementKind::PhaseTheta, 6)
            .unwrap();
        for i in 0..6usize {
            for j in 0..6usize {
                let v = th[(i, j)].norm();
                if i.abs_diff(j) == 1 {
                    assert!(v > 1e-3, "missing ladder element ({i},{j})");
                } else {
                    assert!(v < 1e-7, "selection rule violated at ({i},{j}): {v}");
                }
            }
        }
    }

    #[test]
    fn transmon_matrix_elements_hermitian_and_harmonic_limit() {
        let e_c = 0.5;
        let p = TransmonParams::symmetric(50.0 * e_c, e_c, 25);
        let sys = solve_transmon_charge_basis(&p, &BiasPoint::flux(0.0)).unwrap();
        let n = sys.matrix_elements(MatrixElementKind::ChargeN, 4).unwrap();
        assert!((n[(0, 1)] - n[(1, 0)].conj()).norm() < 1e-12);

        let want = (p.ej_eff(0.0) / (8.0 * e_c)).powf(0.25) / 2f64.sqrt();
        let got = n[(0, 1)].norm();
        assert!(
            (got - want).abs() / want < 0.05,
            "n_ge {got} vs harmonic {want}"
        );
    }

    #[test]
    fn phase_theta_rejected_in_charge_basis() {
        let sys = solve_transmon_charge_basis(&FIG_TRANSMON, &BiasPoint::flux(0.0)).unwrap();
        assert!(matches!(
            sys.matrix_elements(MatrixElementKind::PhaseTheta, 2),
            Err(Error::UnsupportedBasis(_))
        ));
    }

    #[test]
    fn transmon_bases_agree_on_low_spectrum() {
        let p = TransmonParams::symmetric(30.0, 0.3, 25); // ratio 100
        let bias = BiasPoint::flux(0.0);
        let charge = solve_transmon_charge_basis(&p, &bias).unwrap();
        let osc = solve_transmon_oscillator_basis(&p, &bias, 40).unwrap();
        for k in 0..3 {
            let a = charge.energies[k + 1] - charge.energies[k];
            let b = osc.energies[k + 1] - osc.energies[k];
            assert!((a - b).abs() / a < 1e-3, "level {k}: {a} vs {b}");
        }
    }

    #[test]
    fn sweep_periodicity_in_flux() {
        let spec = QubitSpec::Transmon(FIG_TRANSMON.clone());
        let grid: Vec<f64> = linspace(-0.5, 0.5, 21);
        let shifted: Vec<f64> = grid.iter().map(|f| f + 1.0).collect();
        let a =
            spectrum_sweep(&spec, SweepParameter::Flux, &grid, BiasPoint::flux(0.0), 4).unwrap();
        let b = spectrum_sweep(
            &spec,
            SweepParameter::Flux,
            &shifted,
            BiasPoint::flux(0.0),
            4,
        )
        .unwrap();
        for (ra, rb) in a.energies.iter().zip(&b.energies) {
            for (x, y) in ra.iter().zip(rb) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn charge_dispersion_suppression() {
        // peak-to-peak dispersion of f01 shrinks as E_J^eff / 4E_C grows
        let e_c = 0.25;
        let grid: Vec<f64> = linspace(0.0, 1.0, 21);
        let mut last = f64::INFINITY;
        let mut first = None;
        for ratio in [1.0, 5.0, 10.0, 50.0] {
            let ej = 4.0 * e_c * ratio;
            let p = TransmonParams::symmetric(ej, e_c, 20);
            let spec = QubitSpec::Transmon(p);
            let table = spectrum_sweep(
                &spec,
                SweepParameter::GateCharge,
                &grid,
                BiasPoint {
                    flux: 0.0,
                    gate_charge: 0.0,
                },
                2,
            )
            .unwrap();
            let f01 = table.transition_column(1);
            let hi = f01.iter().cloned().fold(f64::MIN, f64::max);
            let lo = f01.iter().cloned().fold(f64::MAX, f64::min);
            let disp = hi - lo;
            assert!(disp < last, "dispersion must fall monotonically");
            if first.is_none() {
                first = Some(disp);
            }
            last = disp;
        }
        assert!(
            last < 1e-3 * first.unwrap(),
            "ratio-50 dispersion too large: {last}"
        );
    }
}
