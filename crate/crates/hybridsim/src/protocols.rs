//! Longitudinal-coupling protocols: encoding a qubit into mechanical
//! coherent states, cat-state preparation by projective measurement,
//! geometric-phase force sensing, and the qubit-as-cold-bath cooling check.

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use crate::dynamics::{steady_state, LindbladModel, SteadyOptions};
use crate::eigen::eig_hermitian;
use crate::error::{Error, Result};
use crate::operator::{create, destroy, embed, number, pauli, Operator, Pauli};
use crate::phase_space::{displacement, displacement_guard, parity_op};
use crate::space::SpaceDims;
use crate::state::{DensityMatrix, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitInit {
    Ground,
    Excited,
    /// `(|g> + |e>) / sqrt(2)`
    Plus,
}

#[derive(Debug, Clone)]
pub struct EncodeResult {
    /// Conditional coherent amplitude of the ground branch, `+i G0 t`.
    pub beta_ground: C64,
    /// Mechanical state for a definite qubit input, in the mechanical space.
    pub mech_state: Option<StateVector>,
    /// Entangled joint state for the `Plus` input, on `[2, dim]`.
    pub joint_state: Option<StateVector>,
}

/// Evolve `U(t) = exp(-i G0 sigma_z (b + b^dag) t)` on `|qubit> (x) |0>`:
/// with `sigma_z |g> = -|g>` the ground branch is displaced to `+i G0 t` and
/// the excited branch to `-i G0 t`.
pub fn encode(g0: f64, t: f64, init: QubitInit, mech_dim: usize) -> Result<EncodeResult> {
    let beta = C64::new(0.0, g0 * t);
    displacement_guard(beta, mech_dim)?;
    let d_ground = displacement(beta, mech_dim)?;
    let d_excited = displacement(-beta, mech_dim)?;
    let vacuum = StateVector::basis(SpaceDims::single(mech_dim), 0)?;

    let branch = |d: &Operator| -> Result<StateVector> {
        StateVector::new(
            SpaceDims::single(mech_dim),
            d.matrix() * vacuum.amplitudes(),
        )
    };

    match init {
        QubitInit::Ground => Ok(EncodeResult {
            beta_ground: beta,
            mech_state: Some(branch(&d_ground)?),
            joint_state: None,
        }),
        QubitInit::Excited => Ok(EncodeResult {
            beta_ground: beta,
            mech_state: Some(branch(&d_excited)?),
            joint_state: None,
        }),
        QubitInit::Plus => {
            let g = branch(&d_ground)?;
            let e = branch(&d_excited)?;
            let space = SpaceDims::new(vec![2, mech_dim])?;
            let mut amp = DVector::<C64>::zeros(2 * mech_dim);
            let w = C64::new(1.0 / 2.0f64.sqrt(), 0.0);
            for n in 0..mech_dim {
                amp[n] = w * g.amplitudes()[n];
                amp[mech_dim + n] = w * e.amplitudes()[n];
            }
            Ok(EncodeResult {
                beta_ground: beta,
                mech_state: None,
                joint_state: Some(StateVector::new(space, amp)?),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasuredOutcome {
    Ground,
    Excited,
}

#[derive(Debug, Clone)]
pub struct CatPreparation {
    pub outcome: MeasuredOutcome,
    pub probability: f64,
    pub mech_state: StateVector,
    /// Photon-number parity expectation of the projected state, `+1` (even
    /// cat, ground outcome) or `-1` (odd cat, excited outcome).
    pub parity: f64,
}

/// Conditional displacement from `|+>`, a `pi/2` qubit rotation, and a
/// projective qubit measurement: the ground outcome leaves the even cat
/// `|beta> + |-beta>`, the excited outcome the odd cat, with probabilities
/// `(1 +/- exp(-2|beta|^2)) / 2`.
pub fn cat_prepare(
    g0: f64,
    t: f64,
    outcome: MeasuredOutcome,
    mech_dim: usize,
) -> Result<CatPreparation> {
    let joint = encode(g0, t, QubitInit::Plus, mech_dim)?
        .joint_state
        .expect("plus input yields a joint state");

    // R = [[1, 1], [-1, 1]] / sqrt(2) in the (g, e) basis
    let w = 1.0 / 2.0f64.sqrt();
    let mut g_branch = DVector::<C64>::zeros(mech_dim);
    let mut e_branch = DVector::<C64>::zeros(mech_dim);
    for n in 0..mech_dim {
        let cg = joint.amplitudes()[n];
        let ce = joint.amplitudes()[mech_dim + n];
        g_branch[n] = (cg + ce) * w;
        e_branch[n] = (ce - cg) * w;
    }

    let (amp, prob) = match outcome {
        MeasuredOutcome::Ground => {
            let p = g_branch.norm_squared();
            (g_branch, p)
        }
        MeasuredOutcome::Excited => {
            let p = e_branch.norm_squared();
            (e_branch, p)
        }
    };
    if prob <= 0.0 {
        return Err(Error::ProtocolInvalid(
            "measurement outcome has zero probability".into(),
        ));
    }
    let state = StateVector::normalized(SpaceDims::single(mech_dim), amp)?;
    let parity = state.to_density().expectation(&parity_op(mech_dim)).re;
    Ok(CatPreparation {
        outcome,
        probability: prob,
        mech_state: state,
        parity,
    })
}

// ---- geometric-phase force sensing -------------------------------------------

/// One element of a conditional-displacement plan. A segment applies
/// `H = sigma_z (kick b^dag + kick* b) + eta (b + b^dag)` for `duration`;
/// a pi-pulse is an instantaneous `sigma_x` flip.
#[derive(Debug, Clone, Copy)]
pub enum ForceStep {
    Segment { duration: f64, kick: C64 },
    PiPulse,
}

/// The standard four-segment echo loop: two orthogonal conditional kicks, a
/// pi-pulse, and the two kicks again, tracing a closed square of side
/// `g0 * seg_time` per branch.
pub fn square_echo_plan(g0: f64, seg_time: f64) -> Vec<ForceStep> {
    vec![
        ForceStep::Segment {
            duration: seg_time,
            kick: C64::new(g0, 0.0),
        },
        ForceStep::Segment {
            duration: seg_time,
            kick: C64::new(0.0, g0),
        },
        ForceStep::PiPulse,
        ForceStep::Segment {
            duration: seg_time,
            kick: C64::new(g0, 0.0),
        },
        ForceStep::Segment {
            duration: seg_time,
            kick: C64::new(0.0, g0),
        },
    ]
}

/// Traverse the same conditional loop with the opposite orientation: the
/// kicks are negated and applied in reverse order (the force is external
/// and stays as it is).
pub fn reverse_plan(plan: &[ForceStep]) -> Vec<ForceStep> {
    plan.iter()
        .rev()
        .map(|s| match s {
            ForceStep::Segment { duration, kick } => ForceStep::Segment {
                duration: *duration,
                kick: -kick,
            },
            ForceStep::PiPulse => ForceStep::PiPulse,
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ForceSenseRun {
    /// Relative phase between the sigma_z branches; equals twice the signed
    /// area difference of the two branch loops.
    pub phi_t: f64,
    /// `cos(phi_t)` from the analytic piecewise-coherent composition.
    pub sigma_x: f64,
    pub sigma_y: f64,
    /// The same observables from the full joint-unitary simulation.
    pub sigma_x_sim: f64,
    pub sigma_y_sim: f64,
    /// Branch trajectories (vertices of the piecewise displacement paths).
    pub trajectory_ground: Vec<C64>,
    pub trajectory_excited: Vec<C64>,
    pub area_ground: f64,
    pub area_excited: f64,
}

fn shoelace(path: &[C64]) -> f64 {
    let mut acc = 0.0;
    for k in 0..path.len() {
        let a = path[k];
        let b = path[(k + 1) % path.len()];
        acc += a.re * b.im - b.re * a.im;
    }
    0.5 * acc
}

/// Run the piecewise conditional-displacement protocol with a weak force
/// `eta (b + b^dag)` on an initially `|+>` qubit. The plan must close the
/// conditional loop: both branches end at the same phase-space point.
/// The geometric phase is cross-validated against a full unitary simulation
/// of the joint system.
pub fn force_sense(eta: f64, plan: &[ForceStep]) -> Result<ForceSenseRun> {
    if plan.is_empty() {
        return Err(Error::ProtocolInvalid("empty segment plan".into()));
    }

    // branch registers labelled by the current qubit state; sigma_z = -1 on g
    let mut beta_g = C64::new(0.0, 0.0);
    let mut beta_e = C64::new(0.0, 0.0);
    let mut phi_g = 0.0f64;
    let mut phi_e = 0.0f64;
    let mut traj_g = vec![beta_g];
    let mut traj_e = vec![beta_e];

    for step in plan {
        match step {
            ForceStep::Segment { duration, kick } => {
                // branch s: displacement -i (s kick + eta) t, phase Im(d b*)
                let dg = -C64::i() * (-kick + C64::new(eta, 0.0)) * *duration;
                let de = -C64::i() * (kick + C64::new(eta, 0.0)) * *duration;
                phi_g += (dg * beta_g.conj()).im;
                phi_e += (de * beta_e.conj()).im;
                beta_g += dg;
                beta_e += de;
                traj_g.push(beta_g);
                traj_e.push(beta_e);
            }
            ForceStep::PiPulse => {
                std::mem::swap(&mut beta_g, &mut beta_e);
                std::mem::swap(&mut phi_g, &mut phi_e);
                std::mem::swap(&mut traj_g, &mut traj_e);
            }
        }
    }

    if (beta_g - beta_e).norm() > 1e-9 {
        return Err(Error::ProtocolInvalid(format!(
            "conditional loop does not close: branch separation {:.3e}",
            (beta_g - beta_e).norm()
        )));
    }

    let phi_t = phi_e - phi_g;
    let (sim_x, sim_y) = force_sense_joint_simulation(eta, plan)?;

    // state (|g> exp(i phi_g) + |e> exp(i phi_e)) |beta> / sqrt(2):
    // <sigma_x> = cos(phi_t), <sigma_y> = -sin(phi_t) in the (g, e) ordering
    Ok(ForceSenseRun {
        phi_t,
        sigma_x: phi_t.cos(),
        sigma_y: -phi_t.sin(),
        sigma_x_sim: sim_x,
        sigma_y_sim: sim_y,
        trajectory_ground: traj_g.clone(),
        trajectory_excited: traj_e.clone(),
        area_ground: shoelace(&traj_g),
        area_excited: shoelace(&traj_e),
    })
}

/// Full unitary simulation of the plan on a truncated joint space,
/// returning `(<sigma_x>, <sigma_y>)`.
fn force_sense_joint_simulation(eta: f64, plan: &[ForceStep]) -> Result<(f64, f64)> {
    // size the truncation from the largest branch excursion
    let mut reach = 0.0f64;
    let mut beta = C64::new(0.0, 0.0);
    for step in plan {
        if let ForceStep::Segment { duration, kick } = step {
            beta += -C64::i() * (kick + C64::new(eta.abs(), 0.0)) * *duration;
            reach = reach.max(beta.norm());
        }
    }
    let dim = ((reach * reach + 5.0 * reach).ceil() as usize + 6).max(8);
    let space = SpaceDims::new(vec![2, dim])?;

    let sz = embed(&pauli(Pauli::Z), 0, &space)?;
    let sx_full = embed(&pauli(Pauli::X), 0, &space)?;
    let sy_full = embed(&pauli(Pauli::Y), 0, &space)?;
    let b = destroy(dim)?;
    let bdag = create(dim)?;
    let x_op = embed(&b.add(&bdag), 1, &space)?;

    // |+> (x) |0>
    let mut amp = DVector::<C64>::zeros(2 * dim);
    let w = C64::new(1.0 / 2.0f64.sqrt(), 0.0);
    amp[0] = w;
    amp[dim] = w;
    let mut psi = amp;

    for step in plan {
        match step {
            ForceStep::Segment { duration, kick } => {
                let cond = embed(&bdag.scale(*kick).add(&b.scale(kick.conj())), 1, &space)?;
                let h = sz.matmul(&cond).add(&x_op.scale_re(eta));
                let eig = eig_hermitian(&h)?;
                let mut coeffs = eig.vectors.adjoint() * psi;
                for (k, c) in coeffs.iter_mut().enumerate() {
                    *c *= C64::from_polar(1.0, -eig.values[k] * duration);
                }
                psi = &eig.vectors * coeffs;
            }
            ForceStep::PiPulse => {
                psi = sx_full.matrix() * psi;
            }
        }
    }

    let rho = StateVector::new(space, psi)?.to_density();
    Ok((rho.expectation(&sx_full).re, rho.expectation(&sy_full).re))
}

// ---- qubit as a cold bath ------------------------------------------------------

/// Longitudinally coupled qubit-mechanics with a transverse qubit drive in
/// the drive frame. `drive_detuning = omega_q - omega_d`: `+omega_b` is the
/// red-detuned (cooling) side, `-omega_b` the blue side.
#[derive(Debug, Clone, Copy)]
pub struct ColdBathParams {
    pub omega_b: f64,
    pub g: f64,
    pub drive_detuning: f64,
    pub omega_rabi: f64,
    pub gamma: f64,
    pub gamma_m: f64,
    pub n_th: f64,
    pub mech_dim: usize,
    /// Integrator substep override; `None` uses the conservative default.
    pub step: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ColdBathReport {
    pub steady_phonons: f64,
    /// `<b^dag b> - |<b>|^2`: occupancy with the static displacement driven
    /// by the mean longitudinal force removed.
    pub thermal_phonons: f64,
    pub n_th: f64,
    pub converged: bool,
    /// Strict inequality `steady < n_th`.
    pub cooled: bool,
}

/// Steady phonon number of the driven longitudinal model against the
/// undriven thermal value.
pub fn cold_bath_cooling_check(params: &ColdBathParams) -> Result<ColdBathReport> {
    if params.mech_dim < 2 {
        return Err(Error::InvalidDimension {
            dim: params.mech_dim,
            reason: "mech_dim >= 2",
        });
    }
    for (name, v) in [
        ("omega_b", params.omega_b),
        ("gamma", params.gamma),
        ("gamma_m", params.gamma_m),
        ("n_th", params.n_th),
    ] {
        if v < 0.0 {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("{v} must be >= 0"),
            });
        }
    }
    let dim = params.mech_dim;
    let space = SpaceDims::new(vec![2, dim])?;
    let sz = embed(&pauli(Pauli::Z), 0, &space)?;
    let sx = embed(&pauli(Pauli::X), 0, &space)?;
    let nb = embed(&number(dim)?, 1, &space)?;
    let x = embed(&destroy(dim)?.add(&create(dim)?), 1, &space)?;

    let h = sz
        .scale_re(params.drive_detuning / 2.0)
        .add(&nb.scale_re(params.omega_b))
        .add(&sz.matmul(&x).scale_re(params.g))
        .add(&sx.scale_re(params.omega_rabi / 2.0));
    let model = LindbladModel::closed(h).with_qubit_mech_channels(
        0,
        1,
        params.gamma,
        0.0,
        params.gamma_m,
        params.n_th,
    )?;

    let thermal = DensityMatrix::thermal(dim, params.n_th)?;
    let qubit_ground = StateVector::basis(SpaceDims::single(2), 0)?.to_density();
    let rho0 = qubit_ground.kron(&thermal);

    let slow = params.gamma_m.max(1e-9);
    let steady = steady_state(
        &model,
        &rho0,
        &SteadyOptions {
            step: params.step,
            window: 0.5 / slow,
            tol: 1e-7,
            max_time: 60.0 / slow,
            min_time: 5.0 / slow,
        },
    )?;
    let n = steady.rho.expectation(&nb).re;
    let mean_b = steady.rho.expectation(&embed(&destroy(dim)?, 1, &space)?);
    Ok(ColdBathReport {
        steady_phonons: n,
        thermal_phonons: n - mean_b.norm_sqr(),
        n_th: params.n_th,
        converged: steady.converged,
        cooled: n < params.n_th,
    })
}
