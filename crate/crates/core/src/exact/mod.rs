//! Exact dynamics: ground states, quench evolution, reductions and fidelity.

mod eigen;
mod propagate;
mod reduce;

pub use eigen::{full_spectrum, ground_state, ground_state_with, LanczosConfig, SpectrumSlice};
pub use propagate::{evolve, propagate, uniform_times, PropagatorConfig};
pub use reduce::{fidelity, overlap_coefficients, reduce_mixed, reduce_pure, RegisterOperator};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::Result;
use crate::model::{self, HamiltonianKind, ModelParams, Parity, SpecialState};
use crate::state::{DensityMatrix, QuantumState};
use crate::tomography;

/// Observables sampled along a quench from `|FM⟩`.
#[derive(Debug, Clone)]
pub struct QuenchTrace {
    pub times: Vec<f64>,
    pub photon_number: Vec<f64>,
    pub parity_plus: Vec<f64>,
    pub parity_minus: Vec<f64>,
    /// Fidelity of the photon reduction against the ground-state reduction.
    pub fidelity: Vec<f64>,
    pub x_grid: Vec<f64>,
    /// `w(x, t)`: rows index `x_grid`, columns index `times`.
    pub marginal_w: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct QuenchConfig {
    pub t_final: f64,
    pub n_samples: usize,
    pub x_grid: Vec<f64>,
    pub propagator: PropagatorConfig,
}

impl QuenchConfig {
    pub fn new(t_final: f64) -> Self {
        Self {
            t_final,
            n_samples: 200,
            x_grid: tomography::linspace(-6.0, 6.0, 121),
            propagator: PropagatorConfig::default(),
        }
    }
}

/// Result of [`quench`]: the sampled trace plus the endpoints needed by
/// downstream tomography.
#[derive(Debug, Clone)]
pub struct QuenchRun {
    pub trace: QuenchTrace,
    pub final_state: QuantumState,
    pub ground_energy: f64,
    pub ground_state: QuantumState,
}

/// Evolves `|FM⟩` under the Dicke-Ising Hamiltonian and samples photon
/// number, register parities, fidelity against the ground-state photon
/// reduction and the position marginal.
pub fn quench(params: &ModelParams, cfg: &QuenchConfig) -> Result<QuenchRun> {
    let h = model::hamiltonian(HamiltonianKind::DickeIsing, params)?;
    let spectrum = ground_state(&h, 1)?;
    let ground = spectrum.states[0].clone();
    let rho_sr = reduce_pure(&ground, &RegisterOperator::Identity, params)?;

    let fm = model::special_state(SpecialState::Ferromagnetic, params)?;
    let times = uniform_times(cfg.t_final, cfg.n_samples);
    let states = evolve(&h, &fm, &times, &cfg.propagator)?;

    let number = model::photon_op(&model::boson_ops(params.n_max).number, params);
    let plus = model::parity_projector(Parity::Even, params)?;
    let minus = model::parity_projector(Parity::Odd, params)?;

    let rows: Vec<Result<(f64, f64, f64, f64, Vec<f64>)>> = states
        .par_iter()
        .map(|psi| {
            let rho = reduce_pure(psi, &RegisterOperator::Identity, params)?;
            let f = fidelity(&rho, &rho_sr)?;
            let w = tomography::marginal_w(&rho, &cfg.x_grid);
            Ok((psi.expectation(&number), psi.expectation(&plus), psi.expectation(&minus), f, w))
        })
        .collect();

    let nx = cfg.x_grid.len();
    let mut trace = QuenchTrace {
        times: times.clone(),
        photon_number: Vec::with_capacity(times.len()),
        parity_plus: Vec::with_capacity(times.len()),
        parity_minus: Vec::with_capacity(times.len()),
        fidelity: Vec::with_capacity(times.len()),
        x_grid: cfg.x_grid.clone(),
        marginal_w: DMatrix::zeros(nx, times.len()),
    };
    for (col, row) in rows.into_iter().enumerate() {
        let (n, pp, pm, f, w) = row?;
        trace.photon_number.push(n);
        trace.parity_plus.push(pp);
        trace.parity_minus.push(pm);
        trace.fidelity.push(f);
        for (i, wi) in w.into_iter().enumerate() {
            trace.marginal_w[(i, col)] = wi;
        }
    }
    Ok(QuenchRun {
        trace,
        final_state: states.last().cloned().unwrap_or(fm),
        ground_energy: spectrum.energies[0],
        ground_state: ground,
    })
}

/// Photon-number distribution of a (reduced) photon density matrix.
pub fn fock_populations(rho: &DensityMatrix) -> Vec<f64> {
    (0..rho.dim()).map(|n| rho.entries()[(n, n)].re).collect()
}
