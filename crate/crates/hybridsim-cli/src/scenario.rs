//! Scenario orchestration: each scenario maps a validated config onto the
//! library calls and emits plot-ready CSV artifacts with their golden
//! tolerance profiles.

use hybridsim::circuits::{
    solve_qubit, spectrum_sweep, BiasPoint, MatrixElementKind, QubitSpec, SweepParameter,
};
use hybridsim::dispersive::{sw_shifts, CavitySpec, FLUXONIUM_LEVEL_CUTOFF, TRANSMON_LEVEL_CUTOFF};
use hybridsim::dynamics::{
    number_splitting, rabi_experiment, semiclassical_spectrum, NumberSplitParams, RabiRates,
    SemiclassicalOptions, SemiclassicalParams, TimeGrid,
};
use hybridsim::eigen::eig_hermitian;
use hybridsim::operator::destroy;
use hybridsim::optomech::{
    cooling_rates, longitudinal_readout_via_optics, transduce, LorentzianBath, TransduceParams,
};
use hybridsim::phase_space::{linspace, wigner, WignerGrid};
use hybridsim::protocols::{
    cat_prepare, cold_bath_cooling_check, encode, force_sense, square_echo_plan, ColdBathParams,
    MeasuredOutcome, QubitInit,
};
use hybridsim::qubitmech::{
    charge_coupled_hamiltonian, two_level_leakage, ChargeCoupling, MechMode,
};
use num_complex::Complex64 as C64;

use crate::config::{Scenario, ScenarioConfig};
use crate::CliError;

/// How `verify` compares a golden file.
#[derive(Debug, Clone, Copy)]
pub enum ArtifactKind {
    /// Elementwise absolute tolerance.
    Table { atol: f64 },
    /// Peak locations of column `y_col` against column `x_col`, within
    /// `rel_spacing` of the golden peak spacing.
    Spectrum {
        x_col: usize,
        y_col: usize,
        rel_spacing: f64,
    },
}

#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: String,
    pub kind: ArtifactKind,
    pub content: String,
}

#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub artifacts: Vec<Artifact>,
    pub warnings: Vec<String>,
}

/// Fixed 17-significant-digit scientific notation keeps CSV output
/// bit-stable across reruns and platforms.
pub fn fmt_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::with_capacity(rows.len() * header.len() * 24 + 64);
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            out.push_str(&fmt_value(*v));
            first = false;
        }
        out.push('\n');
    }
    out
}

const EIGENVALUE_ATOL: f64 = 1e-9;
const TRAJECTORY_ATOL: f64 = 1e-6;
const PEAK_REL_SPACING: f64 = 0.01;

fn guard(e: hybridsim::Error) -> CliError {
    CliError::Guard(e.to_string())
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    cfg.validate()?;
    match cfg.scenario {
        Scenario::Spectrum => run_spectrum(cfg),
        Scenario::Avoided => run_avoided(cfg),
        Scenario::Dispersive => run_dispersive(cfg),
        Scenario::Rabi => run_rabi(cfg),
        Scenario::Modesplit => run_modesplit(cfg),
        Scenario::Numbersplit => run_numbersplit(cfg),
        Scenario::Encode => run_encode(cfg),
        Scenario::Cat => run_cat(cfg),
        Scenario::Force => run_force(cfg),
        Scenario::Transduce => run_transduce(cfg),
        Scenario::Cool => run_cool(cfg),
    }
}

fn sweep_values(cfg: &crate::config::SweepConfig) -> Vec<f64> {
    linspace(cfg.start, cfg.stop, cfg.points)
}

fn sweep_parameter(cfg: &crate::config::SweepConfig) -> SweepParameter {
    match cfg.parameter.as_str() {
        "flux" => SweepParameter::Flux,
        _ => SweepParameter::GateCharge,
    }
}

fn run_spectrum(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let spec = cfg.qubit.as_ref().unwrap().to_spec()?;
    let sw = cfg.sweep.as_ref().unwrap();
    let levels = sw.levels.unwrap_or(4);
    let base = BiasPoint {
        flux: sw.flux,
        gate_charge: sw.gate_charge,
    };
    let table = spectrum_sweep(&spec, sweep_parameter(sw), &sweep_values(sw), base, levels)
        .map_err(guard)?;

    let mut header: Vec<String> = vec!["flux_or_ng".into()];
    for k in 0..levels {
        header.push(format!("e{k}"));
    }
    for k in 1..levels {
        header.push(format!("f0{k}"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<f64>> = table
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut row = vec![*v];
            row.extend(&table.energies[i]);
            row.extend(table.transitions[i].iter().skip(1));
            row
        })
        .collect();
    Ok(RunOutput {
        artifacts: vec![Artifact {
            name: "sweep.csv".into(),
            kind: ArtifactKind::Table {
                atol: EIGENVALUE_ATOL,
            },
            content: csv(&header_refs, &rows),
        }],
        warnings: Vec::new(),
    })
}

fn run_avoided(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let spec = cfg.qubit.as_ref().unwrap().to_spec()?;
    let sw = cfg.sweep.as_ref().unwrap();
    let mech_cfg = cfg.mech.as_ref().unwrap();
    let mech = MechMode::new(mech_cfg.omega_b, mech_cfg.dim);
    let coupling = ChargeCoupling::direct(cfg.coupling.as_ref().unwrap().g);

    let mut rows = Vec::new();
    for &flux in &sweep_values(sw) {
        let bias = BiasPoint {
            flux,
            gate_charge: sw.gate_charge,
        };
        let qubit = solve_qubit(&spec, &bias).map_err(guard)?;
        let h = charge_coupled_hamiltonian(&qubit, &mech, &coupling, 2).map_err(guard)?;
        let eig = eig_hermitian(&h).map_err(guard)?;
        // one-excitation dressed doublet above the ground state
        let f1 = eig.values[1] - eig.values[0];
        let f2 = eig.values[2] - eig.values[0];
        let n_ge = qubit
            .matrix_elements(MatrixElementKind::ChargeN, 2)
            .map_err(guard)?[(0, 1)]
            .norm();
        // two-level projection error, reported next to the projected values
        let (leak1, leak2) = two_level_leakage(&qubit, &mech, &coupling).map_err(guard)?;
        rows.push(vec![flux, f1, f2, f2 - f1, n_ge, qubit.f01(), leak1, leak2]);
    }

    // gap summary at the sweep minimum
    let (min_idx, min_gap) = rows
        .iter()
        .enumerate()
        .map(|(i, r)| (i, r[3]))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty sweep");
    let summary = vec![vec![
        rows[min_idx][0],
        min_gap,
        2.0 * coupling.g * rows[min_idx][4],
    ]];

    Ok(RunOutput {
        artifacts: vec![
            Artifact {
                name: "avoided.csv".into(),
                kind: ArtifactKind::Table {
                    atol: EIGENVALUE_ATOL,
                },
                content: csv(
                    &["flux", "f1", "f2", "gap", "n_ge", "f01", "leak1", "leak2"],
                    &rows,
                ),
            },
            Artifact {
                name: "gap_summary.csv".into(),
                kind: ArtifactKind::Table {
                    atol: EIGENVALUE_ATOL,
                },
                content: csv(&["flux_at_min", "min_gap", "two_g_nge"], &summary),
            },
        ],
        warnings: Vec::new(),
    })
}

fn run_dispersive(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let spec = cfg.qubit.as_ref().unwrap().to_spec()?;
    let sw = cfg.sweep.as_ref().unwrap();
    let cav_cfg = cfg.cavity.as_ref().unwrap();
    let cavity = CavitySpec {
        omega: cav_cfg.omega,
        g: cav_cfg.g,
    };
    let cutoff = cav_cfg.level_cutoff.unwrap_or(match spec {
        QubitSpec::Transmon(_) => TRANSMON_LEVEL_CUTOFF,
        QubitSpec::Fluxonium(_) => FLUXONIUM_LEVEL_CUTOFF,
    });

    let mut rows = Vec::new();
    for &flux in &sweep_values(sw) {
        let bias = BiasPoint {
            flux,
            gate_charge: sw.gate_charge,
        };
        let qubit = solve_qubit(&spec, &bias).map_err(guard)?;
        let shifts = sw_shifts(&qubit, &cavity, cutoff).map_err(guard)?;
        rows.push(vec![
            flux,
            shifts.lamb[0],
            shifts.lamb[1],
            shifts.chi[0],
            shifts.chi[1],
            shifts.two_chi(),
        ]);
    }
    Ok(RunOutput {
        artifacts: vec![Artifact {
            name: "dispersive.csv".into(),
            kind: ArtifactKind::Table {
                atol: EIGENVALUE_ATOL,
            },
            content: csv(
                &["flux", "eta_g", "eta_e", "chi_g", "chi_e", "two_chi"],
                &rows,
            ),
        }],
        warnings: Vec::new(),
    })
}

fn run_rabi(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let spec = cfg.qubit.as_ref().unwrap().to_spec()?;
    let mech_cfg = cfg.mech.as_ref().unwrap();
    let mech = MechMode::new(mech_cfg.omega_b, mech_cfg.dim);
    let coupling = ChargeCoupling::direct(cfg.coupling.as_ref().unwrap().g);
    let r = cfg.rabi.as_ref().unwrap();
    let rates_cfg = cfg.rates.clone().unwrap_or_default();
    let rates = RabiRates {
        gamma: rates_cfg.gamma,
        gamma_phi: rates_cfg.gamma_phi,
        gamma_m: rates_cfg.gamma_m,
        n_th: rates_cfg.n_th,
    };
    let grid = TimeGrid::new(0.0, r.t_max, r.points).map_err(guard)?;
    let traces = rabi_experiment(
        |flux| solve_qubit(&spec, &BiasPoint::flux(flux)),
        &r.flux_values,
        &mech,
        &coupling,
        &rates,
        r.omega_r,
        &grid,
    )
    .map_err(guard)?;

    let mut header: Vec<String> = vec!["t".into()];
    for (k, trace) in traces.iter().enumerate() {
        let _ = trace;
        header.push(format!("pe_{k}"));
        header.push(format!("en_{k}"));
        header.push(format!("nb_{k}"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let times = grid.times();
    let rows: Vec<Vec<f64>> = times
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut row = vec![*t];
            for trace in &traces {
                row.push(trace.p_e[i]);
                row.push(trace.log_negativity[i]);
                row.push(trace.n_b[i]);
            }
            row
        })
        .collect();
    Ok(RunOutput {
        artifacts: vec![Artifact {
            name: "rabi.csv".into(),
            kind: ArtifactKind::Table {
                atol: TRAJECTORY_ATOL,
            },
            content: csv(&header_refs, &rows),
        }],
        warnings: Vec::new(),
    })
}

fn run_modesplit(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let m = cfg.modesplit.as_ref().unwrap();
    let params = SemiclassicalParams {
        omega_b: m.omega_b,
        omega_q: m.omega_q,
        g: m.g,
        gamma_m: m.gamma_m,
        gamma: m.gamma,
        gamma_phi: m.gamma_phi,
        omega_r: m.omega_r,
    };
    let grid = linspace(m.start, m.stop, m.points);
    let pts =
        semiclassical_spectrum(&params, &grid, &SemiclassicalOptions::default()).map_err(guard)?;
    let mut warnings = Vec::new();
    if pts.iter().any(|p| !p.converged) {
        warnings.push("semiclassical steady state did not converge at every point".into());
    }
    let rows: Vec<Vec<f64>> = pts
        .iter()
        .map(|p| vec![p.omega_d, p.p_e, if p.converged { 1.0 } else { 0.0 }])
        .collect();
    Ok(RunOutput {
        artifacts: vec![Artifact {
            name: "modesplit.csv".into(),
            kind: ArtifactKind::Spectrum {
                x_col: 0,
                y_col: 1,
                rel_spacing: PEAK_REL_SPACING,
            },
            content: csv(&["omega_d", "p_e", "converged"], &rows),
        }],
        warnings,
    })
}

fn run_numbersplit(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let n = cfg.numbersplit.as_ref().unwrap();
    let params = NumberSplitParams {
        chi: n.chi,
        delta_m: n.delta_m,
        epsilon: n.epsilon,
        omega_r: n.omega_r,
        gamma: n.gamma,
        gamma_b: n.gamma_b,
        mech_dim: n.mech_dim,
    };
    let grid = linspace(n.start, n.stop, n.points);
    let pts = number_splitting(&params, &grid, &n.steady.to_options()).map_err(guard)?;
    let mut warnings = Vec::new();
    if pts.iter().any(|p| !p.converged) {
        warnings.push("number-splitting steady state did not converge at every point".into());
    }
    let rows: Vec<Vec<f64>> = pts
        .iter()
        .map(|p| vec![p.delta_t, p.p_e, p.n_b, if p.converged { 1.0 } else { 0.0 }])
        .collect();
    Ok(RunOutput {
        artifacts: vec![Artifact {
            name: "numbersplit.csv".into(),
            kind: ArtifactKind::Spectrum {
                x_col: 0,
                y_col: 1,
                rel_spacing: PEAK_REL_SPACING,
            },
            content: csv(&["delta_t", "p_e", "n_b", "converged"], &rows),
        }],
        warnings,
    })
}

fn wigner_artifact(
    name: &str,
    rho: &hybridsim::DensityMatrix,
    wcfg: &crate::config::WignerConfig,
    warnings: &mut Vec<String>,
) -> Result<Artifact, CliError> {
    let grid = WignerGrid::square(wcfg.half_extent, wcfg.points);
    let field = wigner(rho, &grid).map_err(guard)?;
    if field.accuracy_warning {
        warnings.push(format!(
            "{name}: wigner grid does not fully cover the state support"
        ));
    }
    let mut rows = Vec::with_capacity(field.xs.len() * field.ps.len());
    for (ip, p) in field.ps.iter().enumerate() {
        for (ix, x) in field.xs.iter().enumerate() {
            rows.push(vec![*x, *p, field.values[ip][ix]]);
        }
    }
    Ok(Artifact {
        name: name.into(),
        kind: ArtifactKind::Table {
            atol: TRAJECTORY_ATOL,
        },
        content: csv(&["x", "p", "w"], &rows),
    })
}

fn run_encode(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let e = cfg.encode.as_ref().unwrap();
    let b_op = destroy(e.mech_dim).map_err(guard)?;
    let mut rows = Vec::with_capacity(e.samples);
    for &t in linspace(0.0, e.t_max, e.samples).iter() {
        let result = encode(e.g0, t, QubitInit::Ground, e.mech_dim).map_err(guard)?;
        let mech = result.mech_state.expect("ground init");
        let mean_b = mech.to_density().expectation(&b_op);
        let analytic = hybridsim::phase_space::coherent_state(result.beta_ground, e.mech_dim)
            .map_err(guard)?;
        rows.push(vec![t, mean_b.re, mean_b.im, mech.fidelity(&analytic)]);
    }
    let mut warnings = Vec::new();
    let mut artifacts = vec![Artifact {
        name: "encode.csv".into(),
        kind: ArtifactKind::Table {
            atol: TRAJECTORY_ATOL,
        },
        content: csv(&["t", "re_b", "im_b", "fidelity"], &rows),
    }];
    if let Some(wcfg) = &e.wigner {
        let final_state = encode(e.g0, e.t_max, QubitInit::Ground, e.mech_dim)
            .map_err(guard)?
            .mech_state
            .expect("ground init");
        artifacts.push(wigner_artifact(
            "encode_wigner.csv",
            &final_state.to_density(),
            wcfg,
            &mut warnings,
        )?);
    }
    Ok(RunOutput {
        artifacts,
        warnings,
    })
}

fn run_cat(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let c = cfg.cat.as_ref().unwrap();
    let even = cat_prepare(c.g0, c.t, MeasuredOutcome::Ground, c.mech_dim).map_err(guard)?;
    let odd = cat_prepare(c.g0, c.t, MeasuredOutcome::Excited, c.mech_dim).map_err(guard)?;
    let rows = vec![
        vec![0.0, even.probability, even.parity],
        vec![1.0, odd.probability, odd.parity],
    ];
    let mut warnings = Vec::new();
    let artifacts = vec![
        Artifact {
            name: "cat.csv".into(),
            kind: ArtifactKind::Table {
                atol: TRAJECTORY_ATOL,
            },
            content: csv(&["outcome_e", "probability", "parity"], &rows),
        },
        wigner_artifact(
            "wigner_even.csv",
            &even.mech_state.to_density(),
            &c.wigner,
            &mut warnings,
        )?,
        wigner_artifact(
            "wigner_odd.csv",
            &odd.mech_state.to_density(),
            &c.wigner,
            &mut warnings,
        )?,
    ];
    Ok(RunOutput {
        artifacts,
        warnings,
    })
}

fn run_force(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let f = cfg.force.as_ref().unwrap();
    let plan = square_echo_plan(f.g0, f.seg_time);
    let mut rows = Vec::new();
    let mut traj_rows = Vec::new();
    for (k, &eta) in f.eta_values.iter().enumerate() {
        let run = force_sense(eta, &plan).map_err(guard)?;
        rows.push(vec![
            eta,
            run.phi_t,
            run.sigma_x,
            run.sigma_y,
            run.sigma_x_sim,
            run.sigma_y_sim,
        ]);
        if k == 0 {
            for (step, (bg, be)) in run
                .trajectory_ground
                .iter()
                .zip(&run.trajectory_excited)
                .enumerate()
            {
                traj_rows.push(vec![step as f64, bg.re, bg.im, be.re, be.im]);
            }
        }
    }
    Ok(RunOutput {
        artifacts: vec![
            Artifact {
                name: "force.csv".into(),
                kind: ArtifactKind::Table {
                    atol: TRAJECTORY_ATOL,
                },
                content: csv(
                    &[
                        "eta",
                        "phi_t",
                        "sigma_x",
                        "sigma_y",
                        "sigma_x_sim",
                        "sigma_y_sim",
                    ],
                    &rows,
                ),
            },
            Artifact {
                name: "force_trajectory.csv".into(),
                kind: ArtifactKind::Table {
                    atol: TRAJECTORY_ATOL,
                },
                content: csv(&["step", "re_bg", "im_bg", "re_be", "im_be"], &traj_rows),
            },
        ],
        warnings: Vec::new(),
    })
}

fn run_transduce(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let t = cfg.transduce.as_ref().unwrap();
    match t.flavor.as_str() {
        "double_swap" => {
            let params = TransduceParams {
                g_tm: t.g_tm,
                g_alpha: t.g_alpha,
                gamma: t.gamma,
                gamma_m: t.gamma_m,
                kappa: t.kappa,
                mech_dim: t.mech_dim,
                cav_dim: t.cav_dim,
            };
            let report = transduce(&params, None).map_err(guard)?;
            let rows: Vec<Vec<f64>> = report
                .trace
                .iter()
                .map(|(t, pe, nb, na)| vec![*t, *pe, *nb, *na])
                .collect();
            let summary = vec![vec![report.t1, report.t2, report.fidelity]];
            Ok(RunOutput {
                artifacts: vec![
                    Artifact {
                        name: "transfer.csv".into(),
                        kind: ArtifactKind::Table {
                            atol: TRAJECTORY_ATOL,
                        },
                        content: csv(&["t", "p_e", "n_b", "n_a"], &rows),
                    },
                    Artifact {
                        name: "transduce_report.csv".into(),
                        kind: ArtifactKind::Table {
                            atol: TRAJECTORY_ATOL,
                        },
                        content: csv(&["t1", "t2", "fidelity"], &summary),
                    },
                ],
                warnings: Vec::new(),
            })
        }
        _ => {
            // coherent_readout
            let t_max = t.t_max.unwrap_or(1.5 * std::f64::consts::PI / t.g_alpha);
            let samples = t.samples.unwrap_or(121);
            let ground = longitudinal_readout_via_optics(
                t.g_alpha,
                C64::new(0.0, t.amplitude),
                C64::new(t.amplitude, 0.0),
                t.mech_dim,
                t.cav_dim,
                t_max,
                samples,
            )
            .map_err(guard)?;
            let excited = longitudinal_readout_via_optics(
                t.g_alpha,
                C64::new(0.0, -t.amplitude),
                C64::new(t.amplitude, 0.0),
                t.mech_dim,
                t.cav_dim,
                t_max,
                samples,
            )
            .map_err(guard)?;
            let rows: Vec<Vec<f64>> = ground
                .times
                .iter()
                .enumerate()
                .map(|(i, tt)| {
                    vec![
                        *tt,
                        ground.n_a[i],
                        ground.n_b[i],
                        excited.n_a[i],
                        excited.n_b[i],
                    ]
                })
                .collect();
            let dec_rows: Vec<Vec<f64>> = ground
                .decisions
                .iter()
                .zip(&excited.decisions)
                .map(|((ts, ng, dg), (_, ne, de))| {
                    vec![
                        *ts,
                        *ng,
                        if *dg { 1.0 } else { 0.0 },
                        *ne,
                        if *de { 1.0 } else { 0.0 },
                    ]
                })
                .collect();
            Ok(RunOutput {
                artifacts: vec![
                    Artifact {
                        name: "readout.csv".into(),
                        kind: ArtifactKind::Table {
                            atol: TRAJECTORY_ATOL,
                        },
                        content: csv(&["t", "na_g", "nb_g", "na_e", "nb_e"], &rows),
                    },
                    Artifact {
                        name: "readout_decisions.csv".into(),
                        kind: ArtifactKind::Table {
                            atol: TRAJECTORY_ATOL,
                        },
                        content: csv(&["t", "na_g", "decided_g", "na_e", "decided_e"], &dec_rows),
                    },
                ],
                warnings: Vec::new(),
            })
        }
    }
}

fn run_cool(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let c = cfg.cool.as_ref().unwrap();
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    // drive off, red-detuned, blue-detuned
    for (detuning, g) in [(c.omega_b, 0.0), (c.omega_b, c.g), (-c.omega_b, c.g)] {
        let params = ColdBathParams {
            omega_b: c.omega_b,
            g,
            drive_detuning: detuning,
            omega_rabi: if g == 0.0 { 0.0 } else { c.omega_rabi },
            gamma: c.gamma,
            gamma_m: c.gamma_m,
            n_th: c.n_th,
            mech_dim: c.mech_dim,
            step: c.step,
        };
        let report = cold_bath_cooling_check(&params).map_err(guard)?;
        if !report.converged {
            warnings.push(format!(
                "cool case (detuning {detuning}, g {g}) did not converge"
            ));
        }
        rows.push(vec![
            detuning,
            g,
            report.steady_phonons,
            report.thermal_phonons,
            report.n_th,
            if report.cooled { 1.0 } else { 0.0 },
        ]);
    }

    let rate_rows: Vec<Vec<f64>> = linspace(-2.0 * c.omega_b, 2.0 * c.omega_b, c.rate_points)
        .iter()
        .map(|&detuning| {
            let qubit_bath = LorentzianBath {
                linewidth: c.qubit_linewidth,
                detuning,
            };
            let cavity_bath = LorentzianBath {
                linewidth: c.cavity_linewidth,
                detuning,
            };
            let rates = cooling_rates(c.g_l, c.g_o, &qubit_bath, &cavity_bath, c.omega_b);
            vec![
                detuning,
                rates.gamma_minus,
                rates.gamma_plus,
                if rates.net_cooling { 1.0 } else { 0.0 },
            ]
        })
        .collect();

    Ok(RunOutput {
        artifacts: vec![
            Artifact {
                name: "cool.csv".into(),
                kind: ArtifactKind::Table { atol: 1e-4 },
                content: csv(
                    &["detuning", "g", "steady_nb", "thermal_nb", "n_th", "cooled"],
                    &rows,
                ),
            },
            Artifact {
                name: "cool_rates.csv".into(),
                kind: ArtifactKind::Table {
                    atol: TRAJECTORY_ATOL,
                },
                content: csv(
                    &["detuning", "gamma_minus", "gamma_plus", "net_cooling"],
                    &rate_rows,
                ),
            },
        ],
        warnings,
    })
}
