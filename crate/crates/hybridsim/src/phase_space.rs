//! Bosonic phase-space tools: displacement operators, coherent and cat
//! states, and the displaced-parity Wigner function.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::eigen::eig_hermitian_unchecked;
use crate::error::{Error, Result};
use crate::operator::{create, destroy, Operator};
use crate::space::SpaceDims;
use crate::state::{DensityMatrix, StateVector};

/// Truncation guard for displacement-type operations: the displaced state
/// must sit well inside the kept Fock levels.
pub fn displacement_guard(beta: C64, dim: usize) -> Result<()> {
    let b = beta.norm();
    if b * b + 5.0 * b >= dim as f64 {
        return Err(Error::Truncation(format!(
            "displacement |beta| = {b:.3} needs more than {dim} Fock levels (|b|^2 + 5|b| < dim)"
        )));
    }
    Ok(())
}

/// Displacement operator `D(beta) = exp(beta a^dag - beta* a)` on a truncated
/// mode, built as the exponential of the truncated generator so it is unitary
/// to eigensolver accuracy.
pub fn displacement(beta: C64, dim: usize) -> Result<Operator> {
    displacement_guard(beta, dim)?;
    let a = destroy(dim)?;
    let adag = create(dim)?;
    // i(beta a^dag - beta* a) is Hermitian; exponentiate through its spectrum
    let gen = adag.scale(beta).sub(&a.scale(beta.conj()));
    let herm = gen.scale(C64::new(0.0, 1.0));
    let eig = eig_hermitian_unchecked(herm.matrix());
    let n = dim;
    let mut phases = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        phases[(k, k)] = C64::from_polar(1.0, -eig.values[k]);
    }
    let d = &eig.vectors * phases * eig.vectors.adjoint();
    Operator::from_matrix(SpaceDims::single(dim), d)
}

/// Coherent state |beta> from its Fock-basis series, renormalized over the
/// truncation.
pub fn coherent_state(beta: C64, dim: usize) -> Result<StateVector> {
    displacement_guard(beta, dim)?;
    let mut amp = DVector::<C64>::zeros(dim);
    let mut term = C64::new(1.0, 0.0); // beta^n / sqrt(n!)
    for n in 0..dim {
        amp[n] = term;
        term = term * beta / C64::new(((n + 1) as f64).sqrt(), 0.0);
    }
    StateVector::normalized(SpaceDims::single(dim), amp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatParity {
    Even,
    Odd,
}

/// Normalized cat state |beta> +/- |-beta>.
pub fn cat_state(beta: C64, parity: CatParity, dim: usize) -> Result<StateVector> {
    let plus = coherent_state(beta, dim)?;
    let minus = coherent_state(-beta, dim)?;
    let amp = match parity {
        CatParity::Even => plus.amplitudes() + minus.amplitudes(),
        CatParity::Odd => plus.amplitudes() - minus.amplitudes(),
    };
    StateVector::normalized(SpaceDims::single(dim), amp)
}

/// Photon-number parity `diag((-1)^n)`.
pub fn parity_op(dim: usize) -> Operator {
    let m = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            C64::new(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Operator::from_matrix(SpaceDims::single(dim), m).expect("square")
}

/// Rectangular grid over (Re alpha, Im alpha).
#[derive(Debug, Clone)]
pub struct WignerGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub np: usize,
}

impl WignerGrid {
    pub fn square(half_extent: f64, n: usize) -> Self {
        Self {
            x_min: -half_extent,
            x_max: half_extent,
            nx: n,
            p_min: -half_extent,
            p_max: half_extent,
            np: n,
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.nx)
    }

    pub fn ps(&self) -> Vec<f64> {
        linspace(self.p_min, self.p_max, self.np)
    }
}

/// Uniform grid of `n` points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect()
}

/// W sampled on the grid; `values[ip][ix]` corresponds to
/// `alpha = xs[ix] + i ps[ip]`. `accuracy_warning` is set when the grid does
/// not cover the state's support to 5 standard deviations in either
/// quadrature, or the grid integral deviates from 1 by more than 1e-3.
#[derive(Debug, Clone)]
pub struct WignerField {
    pub xs: Vec<f64>,
    pub ps: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub integral: f64,
    pub accuracy_warning: bool,
}

impl WignerField {
    pub fn value_at(&self, ix: usize, ip: usize) -> f64 {
        self.values[ip][ix]
    }
}

/// Wigner function of a single-mode state from the displaced-parity form
/// `W(alpha) = (2/pi) Tr[rho D(alpha) P D(alpha)^dag]`, normalized so that
/// the integral over d(Re alpha) d(Im alpha) is 1.
///
/// The state is zero-padded internally so displacements out to the grid
/// corners stay inside the truncation; the per-point work uses the phase
/// covariance `D(r e^{i phi}) = U_phi D(r) U_phi^dag` and a spectral
/// decomposition of the state, so only matrix-vector products remain in the
/// grid loop.
pub fn wigner(rho: &DensityMatrix, grid: &WignerGrid) -> Result<WignerField> {
    if rho.space().n_slots() != 1 {
        return Err(Error::InvalidParameter {
            name: "rho",
            reason: "wigner expects a single-mode state; partial-trace first".into(),
        });
    }
    let dim = rho.space().total();
    let xs = grid.xs();
    let ps = grid.ps();

    // Fock support of the state (weight above 1 - 1e-9 kept)
    let mut cum = 0.0;
    let mut support = 0usize;
    for n in 0..dim {
        cum += rho.matrix()[(n, n)].re;
        if cum >= 1.0 - 1e-9 {
            support = n + 1;
            break;
        }
        support = n + 1;
    }
    let corner = xs
        .iter()
        .flat_map(|&x| ps.iter().map(move |&p| (x * x + p * p).sqrt()))
        .fold(0.0, f64::max);
    let reach = corner + (support as f64).sqrt();
    let work = dim.max((reach * reach + 5.0 * reach).ceil() as usize + 2);

    // padded state spectrum: rho = sum_k p_k |psi_k><psi_k|
    let rho_eig = eig_hermitian_unchecked(rho.matrix());
    let mut comps: Vec<(f64, DVector<C64>)> = Vec::new();
    for k in 0..dim {
        let p = rho_eig.values[k];
        if p > 1e-12 {
            let mut padded = DVector::<C64>::zeros(work);
            padded
                .rows_mut(0, dim)
                .copy_from(&rho_eig.vectors.column(k).into_owned());
            comps.push((p, padded));
        }
    }

    // radial generator K = i(a^dag - a): D(r) = W exp(-i r mu) W^dag
    let a = destroy(work)?;
    let k_gen = create(work)?.sub(&a).scale(C64::new(0.0, 1.0));
    let k_eig = eig_hermitian_unchecked(k_gen.matrix());
    let w_mat = &k_eig.vectors;
    let mu = &k_eig.values;
    let parity_tilde = w_mat.adjoint() * parity_op(work).matrix() * w_mat;

    let points: Vec<(usize, usize)> = (0..ps.len())
        .flat_map(|ip| (0..xs.len()).map(move |ix| (ip, ix)))
        .collect();
    let vals: Vec<f64> = crate::par::map(&points, |&(ip, ix)| {
        let alpha = C64::new(xs[ix], ps[ip]);
        let r = alpha.norm();
        let phi = if r == 0.0 {
            0.0
        } else {
            alpha.im.atan2(alpha.re)
        };
        let mut acc = 0.0;
        for (p, psi) in &comps {
            // v = exp(i r mu) W^dag U_phi^dag psi, value += p <v| P~ |v>
            let rotated = DVector::<C64>::from_fn(work, |n, _| {
                psi[n] * C64::from_polar(1.0, -(n as f64) * phi)
            });
            let mut v = w_mat.adjoint() * rotated;
            for n in 0..work {
                v[n] *= C64::from_polar(1.0, r * mu[n]);
            }
            acc += p * (v.adjoint() * &parity_tilde * &v)[(0, 0)].re;
        }
        acc * 2.0 / std::f64::consts::PI
    });

    let mut values = vec![vec![0.0; xs.len()]; ps.len()];
    for (k, &(ip, ix)) in points.iter().enumerate() {
        values[ip][ix] = vals[k];
    }

    // trapezoid integral over the grid
    let mut integral = 0.0;
    if xs.len() > 1 && ps.len() > 1 {
        let dx = xs[1] - xs[0];
        let dp = ps[1] - ps[0];
        for ip in 0..ps.len() - 1 {
            for ix in 0..xs.len() - 1 {
                let cell = values[ip][ix]
                    + values[ip][ix + 1]
                    + values[ip + 1][ix]
                    + values[ip + 1][ix + 1];
                integral += 0.25 * cell * dx * dp;
            }
        }
    }

    let warning = !grid_covers_support(rho, grid) || (integral - 1.0).abs() > 1e-3;
    Ok(WignerField {
        xs,
        ps,
        values,
        integral,
        accuracy_warning: warning,
    })
}

fn grid_covers_support(rho: &DensityMatrix, grid: &WignerGrid) -> bool {
    let dim = rho.space().total();
    let a = destroy(dim).expect("dim >= 2");
    let adag = a.dagger();
    // quadratures x = Re alpha, p = Im alpha <-> (a + a^dag)/2, (a - a^dag)/2i
    let mean_a = rho.expectation(&a);
    let x_mean = mean_a.re;
    let p_mean = mean_a.im;
    let aa = rho.expectation(&a.matmul(&a));
    let n_mean = rho.expectation(&adag.matmul(&a)).re;
    // <x^2> = (Re<aa> ) /2 + (2<n>+1)/4 etc. from a = x + ip
    let x2 = 0.5 * aa.re + 0.5 * n_mean + 0.25;
    let p2 = -0.5 * aa.re + 0.5 * n_mean + 0.25;
    let sx = (x2 - x_mean * x_mean).max(0.0).sqrt();
    let sp = (p2 - p_mean * p_mean).max(0.0).sqrt();
    grid.x_min <= x_mean - 5.0 * sx
        && grid.x_max >= x_mean + 5.0 * sx
        && grid.p_min <= p_mean - 5.0 * sp
        && grid.p_max >= p_mean + 5.0 * sp
}
