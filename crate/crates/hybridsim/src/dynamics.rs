//! Open-system evolution: fixed-step Lindblad integration with trace and
//! Hermiticity audits, steady states by time integration, semiclassical
//! Bloch–Langevin mode-splitting spectra, and dispersive phonon-number
//! splitting.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::circuits::QubitEigensystem;
use crate::error::{Error, Result};
use crate::operator::{create, destroy, embed, number, pauli, Operator, Pauli};
use crate::qubitmech::{charge_coupled_hamiltonian, ChargeCoupling, MechMode};
use crate::space::SpaceDims;
use crate::state::{DensityMatrix, StateVector};

/// Hamiltonian plus `(collapse operator, rate)` channels; thermal mechanical
/// damping enters as the standard pair `(sqrt(gamma (n_th + 1)) b,
/// sqrt(gamma n_th) b^dag)`.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    pub hamiltonian: Operator,
    pub channels: Vec<(Operator, f64)>,
    pub n_th: f64,
}

impl LindbladModel {
    pub fn closed(hamiltonian: Operator) -> Self {
        Self {
            hamiltonian,
            channels: Vec::new(),
            n_th: 0.0,
        }
    }

    pub fn new(hamiltonian: Operator, channels: Vec<(Operator, f64)>) -> Self {
        Self {
            hamiltonian,
            channels,
            n_th: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (op, rate) in &self.channels {
            if *rate < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "rate",
                    reason: format!("{rate} must be >= 0"),
                });
            }
            if op.dim() != self.hamiltonian.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.hamiltonian.dim(),
                    got: op.dim(),
                });
            }
        }
        if self.n_th < 0.0 {
            return Err(Error::InvalidParameter {
                name: "n_th",
                reason: format!("{} must be >= 0", self.n_th),
            });
        }
        Ok(())
    }

    /// Append qubit relaxation/dephasing on `qubit_slot` and thermal
    /// mechanical damping on `mech_slot` of the model's composite space.
    /// The qubit thermal occupation is taken as zero.
    pub fn with_qubit_mech_channels(
        mut self,
        qubit_slot: usize,
        mech_slot: usize,
        gamma: f64,
        gamma_phi: f64,
        gamma_m: f64,
        n_th: f64,
    ) -> Result<Self> {
        let space = self.hamiltonian.space().clone();
        let mech_dim = space.dims()[mech_slot];
        if gamma > 0.0 {
            self.channels
                .push((embed(&pauli(Pauli::Minus), qubit_slot, &space)?, gamma));
        }
        if gamma_phi > 0.0 {
            // projector |e><e| carries pure dephasing
            let pe = pauli(Pauli::Plus).matmul(&pauli(Pauli::Minus));
            self.channels
                .push((embed(&pe, qubit_slot, &space)?, gamma_phi));
        }
        if gamma_m > 0.0 {
            let b = destroy(mech_dim)?;
            self.channels
                .push((embed(&b, mech_slot, &space)?, gamma_m * (n_th + 1.0)));
            if n_th > 0.0 {
                self.channels
                    .push((embed(&b.dagger(), mech_slot, &space)?, gamma_m * n_th));
            }
        }
        self.n_th = n_th;
        Ok(self)
    }

    /// Largest frequency scale: a Gershgorin bound on the Hamiltonian
    /// spectrum, floored by the total damping.
    pub fn frequency_scale(&self) -> f64 {
        let h = self.hamiltonian.matrix();
        let n = h.nrows();
        let mut gersh = 0.0f64;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += h[(i, j)].norm();
            }
            gersh = gersh.max(row);
        }
        let damping: f64 = self.channels.iter().map(|(_, r)| r).sum();
        gersh.max(damping).max(1e-12)
    }
}

/// Uniform output grid with `steps >= 2` points from `t0` to `t1`.
#[derive(Debug, Clone, Copy)]
pub struct TimeGrid {
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, steps: usize) -> Result<Self> {
        if !(t1 > t0) {
            return Err(Error::InvalidParameter {
                name: "t1",
                reason: format!("{t1} must exceed t0 = {t0}"),
            });
        }
        if steps < 2 {
            return Err(Error::InvalidParameter {
                name: "steps",
                reason: format!("{steps} must be >= 2"),
            });
        }
        Ok(Self { t0, t1, steps })
    }

    pub fn times(&self) -> Vec<f64> {
        crate::phase_space::linspace(self.t0, self.t1, self.steps)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrationOptions {
    /// Integrator substep; default `1 / (50 f_max)`.
    pub step: Option<f64>,
    /// Abort threshold on the one-step raw trace drift.
    pub drift_abort: f64,
    /// Positivity floor audited on every stored state.
    pub positivity_floor: f64,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            step: None,
            drift_abort: 1e-4,
            positivity_floor: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LindbladTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub max_trace_drift: f64,
    pub max_herm_residual: f64,
}

impl LindbladTrajectory {
    pub fn expectation_series(&self, op: &Operator) -> Vec<f64> {
        self.states
            .iter()
            .map(|rho| rho.expectation(op).re)
            .collect()
    }
}

// ---- sparse application kernels --------------------------------------------

#[derive(Clone)]
struct Sparse {
    entries: Vec<(usize, usize, C64)>,
}

impl Sparse {
    fn from_dense(m: &DMatrix<C64>) -> Self {
        let cutoff = 1e-14 * m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v.norm() > cutoff {
                    entries.push((i, j, v));
                }
            }
        }
        Self { entries }
    }

    /// out += c * A * x
    fn acc_left(&self, c: C64, x: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        let ncols = x.ncols();
        for &(i, k, v) in &self.entries {
            let cv = c * v;
            for j in 0..ncols {
                out[(i, j)] += cv * x[(k, j)];
            }
        }
    }

    /// out += c * x * A
    fn acc_right(&self, c: C64, x: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        let nrows = x.nrows();
        for &(k, j, v) in &self.entries {
            let cv = c * v;
            for i in 0..nrows {
                out[(i, j)] += cv * x[(i, k)];
            }
        }
    }
}

struct Integrator {
    h: Sparse,
    // per channel: sqrt(rate) L, its adjoint, and rate L^dag L
    channels: Vec<(Sparse, Sparse, Sparse)>,
    n: usize,
}

impl Integrator {
    fn new(model: &LindbladModel) -> Self {
        let n = model.hamiltonian.dim();
        let h = Sparse::from_dense(model.hamiltonian.matrix());
        let channels = model
            .channels
            .iter()
            .map(|(l, rate)| {
                let scaled = l.matrix() * C64::new(rate.sqrt(), 0.0);
                let m = l.dagger().matmul(l).matrix() * C64::new(*rate, 0.0);
                (
                    Sparse::from_dense(&scaled),
                    Sparse::from_dense(&scaled.adjoint()),
                    Sparse::from_dense(&m),
                )
            })
            .collect();
        Self { h, channels, n }
    }

    /// drho = -i [H, rho] + sum_k (L rho L^dag - (M rho + rho M) / 2)
    fn rhs(&self, rho: &DMatrix<C64>, tmp: &mut DMatrix<C64>, out: &mut DMatrix<C64>) {
        out.fill(C64::new(0.0, 0.0));
        let mi = C64::new(0.0, -1.0);
        self.h.acc_left(mi, rho, out);
        self.h.acc_right(-mi, rho, out);
        let half = C64::new(-0.5, 0.0);
        let one = C64::new(1.0, 0.0);
        for (l, ldag, m) in &self.channels {
            tmp.fill(C64::new(0.0, 0.0));
            l.acc_left(one, rho, tmp);
            ldag.acc_right(one, tmp, out);
            m.acc_left(half, rho, out);
            m.acc_right(half, rho, out);
        }
    }
}

struct StepAudit {
    max_trace_drift: f64,
    max_herm_residual: f64,
}

/// One RK4 substep of size `dt`, followed by symmetrization and trace
/// renormalization; raw drifts are recorded.
fn rk4_step(
    integ: &Integrator,
    rho: &mut DMatrix<C64>,
    dt: f64,
    buf: &mut [DMatrix<C64>; 6],
    audit: &mut StepAudit,
    drift_abort: f64,
) -> Result<()> {
    let [k1, k2, k3, k4, stage, tmp] = buf;
    let set_stage = |stage: &mut DMatrix<C64>, k: &DMatrix<C64>, c: f64| {
        for i in 0..stage.len() {
            stage[i] = rho[i] + C64::new(c, 0.0) * k[i];
        }
    };
    integ.rhs(rho, tmp, k1);
    set_stage(stage, k1, dt / 2.0);
    integ.rhs(stage, tmp, k2);
    set_stage(stage, k2, dt / 2.0);
    integ.rhs(stage, tmp, k3);
    set_stage(stage, k3, dt);
    integ.rhs(stage, tmp, k4);

    let w = C64::new(dt / 6.0, 0.0);
    for i in 0..rho.len() {
        rho[i] += w * (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]);
    }

    let n = integ.n;
    let mut herm = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let a = rho[(i, j)];
            let b = rho[(j, i)].conj();
            herm = herm.max((a - b).norm());
            let s = (a + b) * 0.5;
            rho[(i, j)] = s;
            rho[(j, i)] = s.conj();
        }
    }
    let tr: C64 = rho.diagonal().iter().sum();
    let drift = (tr.re - 1.0).abs().max(tr.im.abs());
    if drift > drift_abort {
        return Err(Error::Instability(format!(
            "trace drifted by {drift:.3e} in one step of {dt:.3e}; reduce the step size"
        )));
    }
    *rho /= C64::new(tr.re, 0.0);
    audit.max_trace_drift = audit.max_trace_drift.max(drift);
    audit.max_herm_residual = audit.max_herm_residual.max(herm);
    Ok(())
}

/// Integrate the master equation over the output grid.
pub fn lindblad_evolve(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
) -> Result<LindbladTrajectory> {
    lindblad_evolve_with(model, rho0, grid, &IntegrationOptions::default())
}

pub fn lindblad_evolve_with(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
    opts: &IntegrationOptions,
) -> Result<LindbladTrajectory> {
    model.validate()?;
    if rho0.space() != model.hamiltonian.space() {
        return Err(Error::DimensionMismatch {
            expected: model.hamiltonian.dim(),
            got: rho0.matrix().nrows(),
        });
    }
    let integ = Integrator::new(model);
    let dt_max = opts
        .step
        .unwrap_or_else(|| 1.0 / (50.0 * model.frequency_scale()));
    let times = grid.times();
    let n = integ.n;

    let mut rho = rho0.matrix().clone();
    let mut buf: [DMatrix<C64>; 6] = std::array::from_fn(|_| DMatrix::zeros(n, n));
    let mut audit = StepAudit {
        max_trace_drift: 0.0,
        max_herm_residual: 0.0,
    };

    let mut states = Vec::with_capacity(times.len());
    states.push(snapshot(&rho, rho0.space(), opts.positivity_floor)?);
    for w in times.windows(2) {
        let span = w[1] - w[0];
        let nsub = (span / dt_max).ceil().max(1.0) as usize;
        let dt = span / nsub as f64;
        for _ in 0..nsub {
            rk4_step(&integ, &mut rho, dt, &mut buf, &mut audit, opts.drift_abort)?;
        }
        states.push(snapshot(&rho, rho0.space(), opts.positivity_floor)?);
    }
    Ok(LindbladTrajectory {
        times,
        states,
        max_trace_drift: audit.max_trace_drift,
        max_herm_residual: audit.max_herm_residual,
    })
}

fn snapshot(rho: &DMatrix<C64>, space: &SpaceDims, floor: f64) -> Result<DensityMatrix> {
    let dm = DensityMatrix::from_matrix_unchecked(space.clone(), rho.clone())?;
    dm.validate(floor)
        .map_err(|e| Error::Instability(format!("stored state violates validity: {e}")))?;
    Ok(dm)
}

#[derive(Debug, Clone, Copy)]
pub struct SteadyOptions {
    pub step: Option<f64>,
    /// Time between convergence checks.
    pub window: f64,
    /// Max-element tolerance on the density-matrix change per window.
    pub tol: f64,
    pub max_time: f64,
    /// Do not declare convergence before this time (guards against flat
    /// early transients).
    pub min_time: f64,
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    pub time: f64,
    pub converged: bool,
    pub last_delta: f64,
}

/// March the master equation to its fixed point, comparing states one
/// window apart.
pub fn steady_state(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    opts: &SteadyOptions,
) -> Result<SteadyState> {
    model.validate()?;
    let integ = Integrator::new(model);
    let dt_max = opts
        .step
        .unwrap_or_else(|| 1.0 / (50.0 * model.frequency_scale()));
    let nsub = (opts.window / dt_max).ceil().max(1.0) as usize;
    let dt = opts.window / nsub as f64;
    let n = integ.n;

    let mut rho = rho0.matrix().clone();
    let mut prev = rho.clone();
    let mut buf: [DMatrix<C64>; 6] = std::array::from_fn(|_| DMatrix::zeros(n, n));
    let mut audit = StepAudit {
        max_trace_drift: 0.0,
        max_herm_residual: 0.0,
    };

    let mut t = 0.0;
    let mut delta = f64::INFINITY;
    while t < opts.max_time {
        for _ in 0..nsub {
            rk4_step(&integ, &mut rho, dt, &mut buf, &mut audit, 1e-4)?;
        }
        t += opts.window;
        delta = (0..rho.len())
            .map(|i| (rho[i] - prev[i]).norm())
            .fold(0.0, f64::max);
        if delta < opts.tol && t >= opts.min_time {
            let dm = snapshot(&rho, rho0.space(), 1e-6)?;
            return Ok(SteadyState {
                rho: dm,
                time: t,
                converged: true,
                last_delta: delta,
            });
        }
        prev.copy_from(&rho);
    }
    let dm = snapshot(&rho, rho0.space(), 1e-6)?;
    Ok(SteadyState {
        rho: dm,
        time: t,
        converged: false,
        last_delta: delta,
    })
}

// ---- Rabi oscillation experiment --------------------------------------------

#[derive(Debug, Clone, Copy, Default)]
pub struct RabiRates {
    pub gamma: f64,
    pub gamma_phi: f64,
    pub gamma_m: f64,
    pub n_th: f64,
}

impl RabiRates {
    pub fn lossless(&self) -> bool {
        self.gamma == 0.0 && self.gamma_phi == 0.0 && self.gamma_m == 0.0
    }
}

#[derive(Debug, Clone)]
pub struct RabiTrace {
    pub flux: f64,
    pub f01: f64,
    pub times: Vec<f64>,
    pub p_e: Vec<f64>,
    pub log_negativity: Vec<f64>,
    pub n_b: Vec<f64>,
}

/// Vacuum-Rabi exchange between a flux-biased qubit and the mechanical mode,
/// starting from `|e, 0>`: populations, entanglement and phonon number over
/// time, one trace per flux value. The spectroscopy probe enters as a static
/// transverse term of amplitude `omega_r / 2` (a rotating-frame constant;
/// negligible at caption-scale amplitudes).
///
/// Lossless runs propagate exactly through the eigenbasis; dissipative runs
/// integrate the master equation.
pub fn rabi_experiment(
    qubit_at_flux: impl Fn(f64) -> Result<QubitEigensystem> + Sync + Send,
    flux_values: &[f64],
    mech: &MechMode,
    coupling: &ChargeCoupling,
    rates: &RabiRates,
    omega_r: f64,
    grid: &TimeGrid,
) -> Result<Vec<RabiTrace>> {
    let traces: Vec<Result<RabiTrace>> = crate::par::map(flux_values, |&flux| {
        let qubit = qubit_at_flux(flux)?;
        let h0 = charge_coupled_hamiltonian(&qubit, mech, coupling, 2)?;
        let space = h0.space().clone();
        let h = if omega_r != 0.0 {
            h0.add(&embed(&pauli(Pauli::X), 0, &space)?.scale_re(omega_r / 2.0))
        } else {
            h0
        };
        let n_b_op = embed(&number(mech.dim)?, 1, &space)?;
        let p_e_op = embed(&pauli(Pauli::Plus).matmul(&pauli(Pauli::Minus)), 0, &space)?;
        // |e, 0> sits at flat index mech.dim (qubit slot is the slow index)
        let excited = StateVector::basis(space.clone(), mech.dim)?;

        let times = grid.times();
        let mut p_e = Vec::with_capacity(times.len());
        let mut e_n = Vec::with_capacity(times.len());
        let mut n_b = Vec::with_capacity(times.len());

        if rates.lossless() {
            let eig = crate::eigen::eig_hermitian(&h)?;
            let coeffs = eig.vectors.adjoint() * excited.amplitudes();
            for &t in &times {
                let mut evolved = coeffs.clone();
                for (k, c) in evolved.iter_mut().enumerate() {
                    *c *= C64::from_polar(1.0, -eig.values[k] * t);
                }
                let psi = &eig.vectors * evolved;
                let rho = StateVector::new(space.clone(), psi)?.to_density();
                p_e.push(rho.expectation(&p_e_op).re);
                e_n.push(rho.log_negativity(1)?);
                n_b.push(rho.expectation(&n_b_op).re);
            }
        } else {
            let model = LindbladModel::closed(h).with_qubit_mech_channels(
                0,
                1,
                rates.gamma,
                rates.gamma_phi,
                rates.gamma_m,
                rates.n_th,
            )?;
            let traj = lindblad_evolve(&model, &excited.to_density(), grid)?;
            for rho in &traj.states {
                p_e.push(rho.expectation(&p_e_op).re);
                e_n.push(rho.log_negativity(1)?);
                n_b.push(rho.expectation(&n_b_op).re);
            }
        }
        Ok(RabiTrace {
            flux,
            f01: qubit.f01(),
            times,
            p_e,
            log_negativity: e_n,
            n_b,
        })
    });
    traces.into_iter().collect()
}

// ---- semiclassical mode splitting --------------------------------------------

/// Inputs of the coupled `<b>, <sigma_->, <sigma_z>` equations in the frame
/// of the probe drive.
#[derive(Debug, Clone, Copy)]
pub struct SemiclassicalParams {
    pub omega_b: f64,
    pub omega_q: f64,
    pub g: f64,
    pub gamma_m: f64,
    pub gamma: f64,
    pub gamma_phi: f64,
    /// Probe amplitude; quoted interchangeably as `epsilon` in
    /// spectroscopy-figure captions.
    pub omega_r: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SemiclassicalPoint {
    pub omega_d: f64,
    pub p_e: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct SemiclassicalOptions {
    /// Relative change per mechanical period accepted as converged.
    pub tol: f64,
    pub max_periods: usize,
}

impl Default for SemiclassicalOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_periods: 2_000_000,
        }
    }
}

/// Steady-state excited population versus drive frequency from the
/// semiclassical equations, integrated to a fixed point per drive point.
pub fn semiclassical_spectrum(
    params: &SemiclassicalParams,
    omega_d_values: &[f64],
    opts: &SemiclassicalOptions,
) -> Result<Vec<SemiclassicalPoint>> {
    for (name, v) in [
        ("gamma_m", params.gamma_m),
        ("gamma", params.gamma),
        ("gamma_phi", params.gamma_phi),
    ] {
        if v < 0.0 {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("{v} must be >= 0"),
            });
        }
    }
    if !(params.omega_r > 0.0) || params.omega_r > params.gamma {
        return Err(Error::InvalidParameter {
            name: "omega_r",
            reason: format!(
                "probe amplitude {} must sit in (0, gamma = {}] for linear response",
                params.omega_r, params.gamma
            ),
        });
    }

    let period = 2.0 * std::f64::consts::PI / params.omega_b;
    let min_rate = [params.gamma_m, params.gamma]
        .into_iter()
        .filter(|r| *r > 0.0)
        .fold(f64::INFINITY, f64::min);
    let min_time = if min_rate.is_finite() {
        5.0 / min_rate
    } else {
        0.0
    };

    let points: Vec<SemiclassicalPoint> = crate::par::map(omega_d_values, |&omega_d| {
        let f_max = [
            (params.omega_b - omega_d).abs(),
            (params.omega_q - omega_d).abs(),
            params.g,
            params.gamma,
            params.gamma_m,
            params.gamma_phi,
            params.omega_r,
        ]
        .into_iter()
        .fold(1e-12, f64::max);
        let dt_target = 1.0 / (50.0 * f_max);
        let nsub = (period / dt_target).ceil().max(2.0) as usize;
        let dt = period / nsub as f64;

        let derivs = |v: [C64; 3]| -> [C64; 3] {
            let (b, sm, sz) = (v[0], v[1], v[2]);
            [
                -(C64::new(params.gamma_m / 2.0, params.omega_b - omega_d)) * b
                    - C64::i() * params.g * sm,
                -(C64::new(
                    (params.gamma + params.gamma_phi) / 2.0,
                    params.omega_q - omega_d,
                )) * sm
                    + C64::i() * params.g * b * sz
                    + C64::i() * params.omega_r * sz,
                -params.gamma * (sz + C64::new(1.0, 0.0))
                    - C64::i() * 2.0 * params.g * (b * sm.conj() - b.conj() * sm)
                    + C64::i() * 2.0 * params.omega_r * (sm - sm.conj()),
            ]
        };

        let mut v = [C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)];
        let mut t = 0.0;
        let mut converged = false;
        for _ in 0..opts.max_periods {
            let before = v;
            for _ in 0..nsub {
                let k1 = derivs(v);
                let s2 = std::array::from_fn(|i| v[i] + k1[i] * (dt / 2.0));
                let k2 = derivs(s2);
                let s3 = std::array::from_fn(|i| v[i] + k2[i] * (dt / 2.0));
                let k3 = derivs(s3);
                let s4 = std::array::from_fn(|i| v[i] + k3[i] * dt);
                let k4 = derivs(s4);
                for i in 0..3 {
                    v[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
                }
            }
            t += period;
            let scale = v.iter().map(|z| z.norm()).fold(1e-12, f64::max);
            let change = v
                .iter()
                .zip(&before)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
                / scale;
            if change < opts.tol && t >= min_time {
                converged = true;
                break;
            }
        }
        SemiclassicalPoint {
            omega_d,
            p_e: (v[2].re + 1.0) / 2.0,
            converged,
        }
    });
    Ok(points)
}

// ---- dispersive number splitting ----------------------------------------------

/// Drive-frame dispersive model (all GHz); the qubit-probe detuning is the
/// externally swept knob.
#[derive(Debug, Clone, Copy)]
pub struct NumberSplitParams {
    pub chi: f64,
    pub delta_m: f64,
    pub epsilon: f64,
    pub omega_r: f64,
    pub gamma: f64,
    pub gamma_b: f64,
    pub mech_dim: usize,
}

impl NumberSplitParams {
    pub fn validate(&self) -> Result<()> {
        if self.epsilon > 0.0 && self.mech_dim < 8 {
            return Err(Error::InvalidDimension {
                dim: self.mech_dim,
                reason: "driven mechanics needs mech_dim >= 8",
            });
        }
        if self.mech_dim < 2 {
            return Err(Error::InvalidDimension {
                dim: self.mech_dim,
                reason: "mech_dim >= 2",
            });
        }
        for (name, v) in [("gamma", self.gamma), ("gamma_b", self.gamma_b)] {
            if v < 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("{v} must be >= 0"),
                });
            }
        }
        Ok(())
    }

    /// `(delta_t + 2 chi n_b) sigma_z / 2 + delta_m n_b + eps (b + b^dag) +
    /// omega_r sigma_x / 2` at qubit-probe detuning `delta_t`.
    pub fn hamiltonian(&self, delta_t: f64) -> Result<Operator> {
        let space = SpaceDims::new(vec![2, self.mech_dim])?;
        let sz = embed(&pauli(Pauli::Z), 0, &space)?;
        let sx = embed(&pauli(Pauli::X), 0, &space)?;
        let nb = embed(&number(self.mech_dim)?, 1, &space)?;
        let x = embed(
            &destroy(self.mech_dim)?.add(&create(self.mech_dim)?),
            1,
            &space,
        )?;
        Ok(sz
            .scale_re(delta_t / 2.0)
            .add(&sz.matmul(&nb).scale_re(self.chi))
            .add(&nb.scale_re(self.delta_m))
            .add(&x.scale_re(self.epsilon))
            .add(&sx.scale_re(self.omega_r / 2.0)))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NumberSplitPoint {
    pub delta_t: f64,
    pub p_e: f64,
    pub n_b: f64,
    pub converged: bool,
}

/// Steady-state qubit spectroscopy across the detuning grid; resolved peaks
/// sit at `delta_t = -2 chi n` when `chi` exceeds the linewidths.
pub fn number_splitting(
    params: &NumberSplitParams,
    detunings: &[f64],
    opts: &SteadyOptions,
) -> Result<Vec<NumberSplitPoint>> {
    params.validate()?;
    let space = SpaceDims::new(vec![2, params.mech_dim])?;
    let rho0 = StateVector::basis(space.clone(), 0)?.to_density();
    let p_e_op = embed(&pauli(Pauli::Plus).matmul(&pauli(Pauli::Minus)), 0, &space)?;
    let n_b_op = embed(&number(params.mech_dim)?, 1, &space)?;

    let points: Vec<Result<NumberSplitPoint>> = crate::par::map(detunings, |&delta_t| {
        let h = params.hamiltonian(delta_t)?;
        let mut model = LindbladModel::closed(h);
        if params.gamma > 0.0 {
            model
                .channels
                .push((embed(&pauli(Pauli::Minus), 0, &space)?, params.gamma));
        }
        if params.gamma_b > 0.0 {
            model.channels.push((
                embed(&destroy(params.mech_dim)?, 1, &space)?,
                params.gamma_b,
            ));
        }
        let steady = steady_state(&model, &rho0, opts)?;
        Ok(NumberSplitPoint {
            delta_t,
            p_e: steady.rho.expectation(&p_e_op).re,
            n_b: steady.rho.expectation(&n_b_op).re,
            converged: steady.converged,
        })
    });
    points.into_iter().collect()
}

/// Indices of local maxima above `floor`; spectra peak-location helper.
pub fn local_maxima(values: &[f64], floor: f64) -> Vec<usize> {
    let mut peaks = Vec::new();
    for i in 1..values.len().saturating_sub(1) {
        if values[i] > floor && values[i] >= values[i - 1] && values[i] > values[i + 1] {
            peaks.push(i);
        }
    }
    peaks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::Operator;

    #[test]
    fn free_evolution_is_identity() {
        let space = SpaceDims::new(vec![2]).unwrap();
        let model = LindbladModel::closed(Operator::zeros(space.clone()));
        let rho0 = DensityMatrix::thermal(2, 0.3).unwrap();
        let grid = TimeGrid::new(0.0, 10.0, 5).unwrap();
        let traj = lindblad_evolve(&model, &rho0, &grid).unwrap();
        let diff = (traj.states.last().unwrap().matrix() - rho0.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-14);
        assert!(traj.max_trace_drift < 1e-14);
    }

    #[test]
    fn amplitude_damping_matches_analytic() {
        let space = SpaceDims::new(vec![2]).unwrap();
        let gamma = 0.002;
        let model = LindbladModel::new(
            Operator::zeros(space.clone()),
            vec![(pauli(Pauli::Minus), gamma)],
        );
        let rho0 = StateVector::basis(space, 1).unwrap().to_density();
        let t_max = 5.0 / gamma;
        let grid = TimeGrid::new(0.0, t_max, 11).unwrap();
        let traj = lindblad_evolve(&model, &rho0, &grid).unwrap();
        for (t, rho) in traj.times.iter().zip(&traj.states) {
            let p_e = rho.matrix()[(1, 1)].re;
            let want = (-gamma * t).exp();
            assert!((p_e - want).abs() / want < 1e-6, "t = {t}: {p_e} vs {want}");
        }
    }

    #[test]
    fn thermal_channels_reach_detailed_balance() {
        let dim = 14;
        let n_th = 0.5;
        let gamma_m = 0.01;
        let space = SpaceDims::new(vec![2, dim]).unwrap();
        let model = LindbladModel::closed(Operator::zeros(space.clone()))
            .with_qubit_mech_channels(0, 1, 0.0, 0.0, gamma_m, n_th)
            .unwrap();
        let rho0 = StateVector::basis(space.clone(), 0).unwrap().to_density();
        let steady = steady_state(
            &model,
            &rho0,
            &SteadyOptions {
                step: None,
                window: 40.0 / gamma_m / 100.0,
                tol: 1e-10,
                max_time: 5000.0 / gamma_m,
                min_time: 5.0 / gamma_m,
            },
        )
        .unwrap();
        assert!(steady.converged);
        let n_op = embed(&number(dim).unwrap(), 1, &space).unwrap();
        let got = steady.rho.expectation(&n_op).re;
        assert!((got - n_th).abs() < 1e-4, "<n> = {got}");
    }

    #[test]
    fn evolution_is_linear_in_the_state() {
        let space = SpaceDims::new(vec![2]).unwrap();
        let h = pauli(Pauli::X).scale_re(0.3);
        let model = LindbladModel::new(h, vec![(pauli(Pauli::Minus), 0.05)]);
        let rho_a = StateVector::basis(space.clone(), 1).unwrap().to_density();
        let rho_b = DensityMatrix::thermal(2, 0.4).unwrap();
        let lam = 0.3;
        let mixed = DensityMatrix::from_matrix_unchecked(
            space,
            rho_a.matrix() * C64::new(lam, 0.0) + rho_b.matrix() * C64::new(1.0 - lam, 0.0),
        )
        .unwrap();
        let grid = TimeGrid::new(0.0, 40.0, 9).unwrap();
        let ta = lindblad_evolve(&model, &rho_a, &grid).unwrap();
        let tb = lindblad_evolve(&model, &rho_b, &grid).unwrap();
        let tm = lindblad_evolve(&model, &mixed, &grid).unwrap();
        for k in 0..ta.states.len() {
            let recon = ta.states[k].matrix() * C64::new(lam, 0.0)
                + tb.states[k].matrix() * C64::new(1.0 - lam, 0.0);
            let diff = (tm.states[k].matrix() - recon)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-8, "mixture deviates by {diff} at index {k}");
        }
    }

    #[test]
    fn semiclassical_decoupled_lorentzian() {
        let params = SemiclassicalParams {
            omega_b: 4.5,
            omega_q: 4.5,
            g: 0.0,
            gamma_m: 0.001,
            gamma: 0.001,
            gamma_phi: 0.0,
            omega_r: 0.0001,
        };
        let grid: Vec<f64> = crate::phase_space::linspace(4.5 - 0.01, 4.5 + 0.01, 41);
        let pts = semiclassical_spectrum(&params, &grid, &SemiclassicalOptions::default()).unwrap();
        assert!(pts.iter().all(|p| p.converged));
        let peaks = local_maxima(&pts.iter().map(|p| p.p_e).collect::<Vec<_>>(), 1e-8);
        assert_eq!(peaks.len(), 1, "single Lorentzian expected");
        assert!((grid[peaks[0]] - params.omega_q).abs() < 5e-4);
    }

    #[test]
    fn mode_splitting_separation_survives_narrower_lines() {
        let base = SemiclassicalParams {
            omega_b: 4.5,
            omega_q: 4.5,
            g: 0.0075,
            gamma_m: 0.001,
            gamma: 0.001,
            gamma_phi: 0.0,
            omega_r: 0.0001,
        };
        let grid: Vec<f64> = crate::phase_space::linspace(4.488, 4.512, 81);
        let separation = |params: &SemiclassicalParams| -> f64 {
            let pts =
                semiclassical_spectrum(params, &grid, &SemiclassicalOptions::default()).unwrap();
            let ys: Vec<f64> = pts.iter().map(|p| p.p_e).collect();
            let floor = ys.iter().cloned().fold(f64::MIN, f64::max) * 0.2;
            let peaks = local_maxima(&ys, floor);
            assert_eq!(peaks.len(), 2, "{peaks:?}");
            grid[peaks[1]] - grid[peaks[0]]
        };
        let wide = separation(&base);
        let narrow = separation(&SemiclassicalParams {
            gamma_m: base.gamma_m / 2.0,
            gamma: base.gamma / 2.0,
            omega_r: base.omega_r / 2.0,
            ..base
        });
        assert!(
            ((wide - narrow) / wide).abs() < 0.05,
            "separation moved from {wide} to {narrow}"
        );
    }

    #[test]
    fn number_split_vacuum_single_peak() {
        // eps = 0: a single dispersively shifted line at delta_t = 0
        let params = NumberSplitParams {
            chi: 0.003,
            delta_m: 0.0,
            epsilon: 0.0,
            omega_r: 0.0001,
            gamma: 0.0001,
            gamma_b: 0.0001,
            mech_dim: 2,
        };
        let grid: Vec<f64> = crate::phase_space::linspace(-0.012, 0.006, 37);
        let opts = SteadyOptions {
            step: None,
            window: 2000.0,
            tol: 1e-7,
            max_time: 4e5,
            min_time: 2e4,
        };
        let pts = number_splitting(&params, &grid, &opts).unwrap();
        let p: Vec<f64> = pts.iter().map(|p| p.p_e).collect();
        let peaks = local_maxima(&p, 1e-4);
        assert_eq!(peaks.len(), 1, "{peaks:?}");
        assert!(grid[peaks[0]].abs() < 6e-4, "peak at {}", grid[peaks[0]]);
    }
}
