//! wasm-bindgen surface for the browser demo: flux spectra, cat-state
//! Wigner maps, and vacuum Rabi traces. Everything returns flat `Vec<f64>`
//! buffers that the page's JavaScript reshapes for plotting.

use num_complex::Complex64 as C64;
use wasm_bindgen::prelude::wasm_bindgen;

use hybridsim::circuits::{
    spectrum_sweep, BiasPoint, FluxoniumParams, QubitSpec, SweepParameter, TransmonParams,
};
use hybridsim::phase_space::{cat_state, linspace, wigner, CatParity, WignerGrid};
use hybridsim::qubitmech::{jc_evolve, JCModel};
use hybridsim::space::SpaceDims;
use hybridsim::state::StateVector;

fn sweep_payload(spec: &QubitSpec, points: usize, levels: usize) -> Result<Vec<f64>, String> {
    let flux: Vec<f64> = linspace(-1.0, 1.0, points);
    let table = spectrum_sweep(
        spec,
        SweepParameter::Flux,
        &flux,
        BiasPoint::flux(0.0),
        levels,
    )
    .map_err(|e| e.to_string())?;
    // layout: [flux; points] then (levels - 1) transition rows of `points`
    let mut out = Vec::with_capacity(points * levels);
    out.extend_from_slice(&table.values);
    for k in 1..levels {
        out.extend(table.transition_column(k));
    }
    Ok(out)
}

/// Transition frequencies `f0k` of a split-junction transmon over one flux
/// period. Returns `[flux..., f01..., f02..., ...]`.
#[wasm_bindgen]
pub fn transmon_spectrum(
    e_j1: f64,
    e_j2: f64,
    e_c: f64,
    points: usize,
    levels: usize,
) -> Result<Vec<f64>, String> {
    let spec = QubitSpec::Transmon(TransmonParams {
        e_j1,
        e_j2,
        e_c,
        n_charge: 20,
    });
    sweep_payload(&spec, points, levels)
}

/// Fluxonium transition frequencies over one flux period; same layout as
/// [`transmon_spectrum`].
#[wasm_bindgen]
pub fn fluxonium_spectrum(
    e_j: f64,
    e_c: f64,
    e_l: f64,
    points: usize,
    levels: usize,
) -> Result<Vec<f64>, String> {
    let spec = QubitSpec::Fluxonium(FluxoniumParams {
        e_j,
        e_c,
        e_l,
        n_fock: 60,
    });
    sweep_payload(&spec, points, levels)
}

/// Wigner map of the even/odd cat `|beta> +/- |-beta>` on an `n x n` grid
/// spanning `[-half_extent, half_extent]^2`; row-major over the momentum
/// index.
#[wasm_bindgen]
pub fn cat_wigner(beta: f64, odd: bool, half_extent: f64, n: usize) -> Result<Vec<f64>, String> {
    let b = beta.abs().max(1e-6);
    let dim = ((b * b + 5.0 * b).ceil() as usize + 4).max(8);
    let parity = if odd { CatParity::Odd } else { CatParity::Even };
    let state = cat_state(C64::new(beta, 0.0), parity, dim).map_err(|e| e.to_string())?;
    let field = wigner(&state.to_density(), &WignerGrid::square(half_extent, n))
        .map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(n * n);
    for row in &field.values {
        out.extend_from_slice(row);
    }
    Ok(out)
}

/// Vacuum Rabi exchange from `|e, 0>`: returns `[t..., P_e..., E_N...]`
/// over one full swap period, for coupling `g` and detuning `delta` (GHz).
#[wasm_bindgen]
pub fn vacuum_rabi(g: f64, delta: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(g > 0.0) {
        return Err("coupling must be positive".into());
    }
    let model = JCModel {
        omega_q: 1.0 + delta,
        omega_b: 1.0,
        g,
    };
    let omega_n = (g * g + 0.25 * delta * delta).sqrt();
    let t_max = std::f64::consts::PI / omega_n;
    let times = linspace(0.0, t_max, points);
    let space = SpaceDims::new(vec![2, 2]).map_err(|e| e.to_string())?;

    let mut out = Vec::with_capacity(3 * points);
    out.extend_from_slice(&times);
    let mut e_n_col = Vec::with_capacity(points);
    for &t in &times {
        let (alpha, beta) = jc_evolve(&model, 0, C64::new(1.0, 0.0), C64::new(0.0, 0.0), t);
        out.push(alpha.norm_sqr());
        let amp = nalgebra_vec(alpha, beta);
        let rho = StateVector::new(space.clone(), amp)
            .map_err(|e| e.to_string())?
            .to_density();
        e_n_col.push(rho.log_negativity(1).map_err(|e| e.to_string())?);
    }
    out.extend(e_n_col);
    Ok(out)
}

fn nalgebra_vec(alpha: C64, beta: C64) -> nalgebra::DVector<C64> {
    // basis (|g,0>, |g,1>, |e,0>, |e,1>)
    nalgebra::DVector::from_vec(vec![C64::new(0.0, 0.0), beta, alpha, C64::new(0.0, 0.0)])
}

use hybridsim::nalgebra;
