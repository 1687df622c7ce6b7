//! Frame consistency between the closed-form Jaynes–Cummings evolution and
//! the full composite model (counter-rotating terms retained) evolved
//! without losses.

use hybridsim::circuits::{
    solve_transmon_charge_basis, BiasPoint, MatrixElementKind, TransmonParams,
};
use hybridsim::dynamics::{rabi_experiment, RabiRates, TimeGrid};
use hybridsim::qubitmech::{jc_evolve, ChargeCoupling, JCModel, MechMode};
use num_complex::Complex64 as C64;

fn fig_params() -> TransmonParams {
    TransmonParams::symmetric(10.0, 0.5, 20)
}

fn resonant_flux(omega_b: f64) -> f64 {
    let p = fig_params();
    let f = |flux: f64| {
        solve_transmon_charge_basis(&p, &BiasPoint::flux(flux))
            .unwrap()
            .f01()
            - omega_b
    };
    let (mut lo, mut hi) = (0.0f64, 0.45f64);
    assert!(f(lo) > 0.0 && f(hi) < 0.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn lossless_rabi_matches_jc_closed_form() {
    let p = fig_params();
    let omega_b = 4.5;
    let flux = resonant_flux(omega_b);
    let qubit = solve_transmon_charge_basis(&p, &BiasPoint::flux(flux)).unwrap();
    let g_t = 0.001;
    let n_ge = qubit
        .matrix_elements(MatrixElementKind::ChargeN, 2)
        .unwrap()[(0, 1)]
        .norm();
    let model = JCModel {
        omega_q: qubit.f01(),
        omega_b,
        g: g_t * n_ge,
    };

    let t_swap = std::f64::consts::FRAC_PI_2 / model.g;
    let grid = TimeGrid::new(0.0, t_swap, 41).unwrap();
    let mech = MechMode::new(omega_b, 4);
    let traces = rabi_experiment(
        |f| solve_transmon_charge_basis(&p, &BiasPoint::flux(f)),
        &[flux],
        &mech,
        &ChargeCoupling::direct(g_t),
        &RabiRates::default(),
        0.0,
        &grid,
    )
    .unwrap();
    let trace = &traces[0];

    for (t, p_e) in trace.times.iter().zip(&trace.p_e) {
        let (alpha, _) = jc_evolve(&model, 0, C64::new(1.0, 0.0), C64::new(0.0, 0.0), *t);
        let want = alpha.norm_sqr();
        assert!((p_e - want).abs() < 1e-6, "t = {t}: {p_e} vs {want}");
    }

    // full transfer at the swap time, maximal entanglement halfway
    let final_pe = *trace.p_e.last().unwrap();
    assert!(final_pe < 1e-6, "leftover population {final_pe}");
    let mid = trace.times.len() / 2;
    assert!((trace.log_negativity[mid] - 1.0).abs() < 1e-4);
}

#[test]
fn detuned_visibility_follows_dressed_formula() {
    let p = fig_params();
    let omega_b = 4.5;
    let flux_res = resonant_flux(omega_b);
    let g_t = 0.001;
    let mech = MechMode::new(omega_b, 4);

    let mut last_visibility = 1.1;
    for dflux in [0.0, 0.004, 0.008] {
        let flux = flux_res + dflux;
        let qubit = solve_transmon_charge_basis(&p, &BiasPoint::flux(flux)).unwrap();
        let n_ge = qubit
            .matrix_elements(MatrixElementKind::ChargeN, 2)
            .unwrap()[(0, 1)]
            .norm();
        let g = g_t * n_ge;
        let delta = qubit.f01() - omega_b;
        let omega_n = (g * g + 0.25 * delta * delta).sqrt();

        let grid = TimeGrid::new(0.0, std::f64::consts::PI / omega_n, 81).unwrap();
        let traces = rabi_experiment(
            |f| solve_transmon_charge_basis(&p, &BiasPoint::flux(f)),
            &[flux],
            &mech,
            &ChargeCoupling::direct(g_t),
            &RabiRates::default(),
            0.0,
            &grid,
        )
        .unwrap();
        let p_min = traces[0].p_e.iter().cloned().fold(f64::MAX, f64::min);
        let visibility = 1.0 - p_min;
        let want = g * g / (omega_n * omega_n);
        assert!(
            (visibility - want).abs() < 0.02,
            "flux offset {dflux}: visibility {visibility} vs dressed {want}"
        );
        assert!(
            visibility < last_visibility,
            "visibility must fall with detuning"
        );
        last_visibility = visibility;
    }
}
