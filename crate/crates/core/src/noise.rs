//! Dissipative circuit emulation: each Dicke-Ising step is followed by a
//! Lindblad window of physical duration `τ_Rabi`,
//!
//! ```text
//! dρ/dt = Nκ (aρa† − ½{a†a, ρ})
//!       + (Γ_φ/2) Σ_j (σᶻ_j ρ σᶻ_j − ρ)
//!       + Γ_1 Σ_j (σ⁻_j ρ σ⁺_j − ½{|1⟩⟨1|_j, ρ})
//! ```
//!
//! with no Hamiltonian term. Rates live on the physical clock (rad/s) and the
//! window on seconds, so only the products `rate · τ_Rabi` enter; the
//! dimensionless simulation time of the gates is a separate clock.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::circuit::{apply_gates_rho, Architecture, CircuitSchedule};
use crate::error::{Error, Result};
use crate::linalg::{C64, ZERO};
use crate::model::ModelParams;
use crate::state::DensityMatrix;

/// Dissipation rates in rad/s and the Rabi-gate duration in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub kappa: f64,
    pub gamma_phi: f64,
    pub gamma_1: f64,
    pub tau_rabi: f64,
}

impl NoiseParams {
    /// Rates given as ordinary frequencies (Hz), stored as `2π · rate`.
    pub fn from_hz(kappa_hz: f64, gamma_phi_hz: f64, gamma_1_hz: f64, tau_rabi: f64) -> Result<Self> {
        let p = Self {
            kappa: 2.0 * PI * kappa_hz,
            gamma_phi: 2.0 * PI * gamma_phi_hz,
            gamma_1: 2.0 * PI * gamma_1_hz,
            tau_rabi,
        };
        p.validate()?;
        Ok(p)
    }

    /// κ = 2π·1 kHz, Γ_φ = Γ_1 = 2π·5 kHz, τ_Rabi = 100 ns.
    pub fn reference() -> Self {
        Self::from_hz(1e3, 5e3, 5e3, 100e-9).expect("valid reference noise")
    }

    pub fn noiseless(tau_rabi: f64) -> Self {
        Self {
            kappa: 0.0,
            gamma_phi: 0.0,
            gamma_1: 0.0,
            tau_rabi,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("kappa", self.kappa), ("gamma_phi", self.gamma_phi), ("gamma_1", self.gamma_1)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be a non-negative rate, got {v}")));
            }
        }
        if !(self.tau_rabi > 0.0) {
            return Err(Error::InvalidParameter(format!("tau_rabi must be positive, got {}", self.tau_rabi)));
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.kappa == 0.0 && self.gamma_phi == 0.0 && self.gamma_1 == 0.0
    }

    /// Upper bound on the decay rates of the generator for this model size.
    pub fn max_rate(&self, params: &ModelParams) -> f64 {
        let n = params.n_qubits as f64;
        n * self.kappa * params.n_max as f64 + n * (self.gamma_phi + self.gamma_1)
    }
}

/// Right-hand side of the master equation, evaluated entrywise.
pub fn lindblad_rhs(rho: &DMatrix<C64>, params: &ModelParams, noise: &NoiseParams) -> DMatrix<C64> {
    let dim = rho.nrows();
    let n = params.n_qubits;
    let qd = params.qubit_dim();
    let np = params.photon_dim();
    let nk = n as f64 * noise.kappa;
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    out.as_mut_slice().par_chunks_mut(dim).enumerate().for_each(|(col, column)| {
        let (p2, q2) = (col / qd, col % qd);
        for (row, slot) in column.iter_mut().enumerate() {
            let (p1, q1) = (row / qd, row % qd);
            let r = rho[(row, col)];
            let mut d = ZERO;
            if nk != 0.0 {
                if p1 + 1 < np && p2 + 1 < np {
                    let s = (((p1 + 1) * (p2 + 1)) as f64).sqrt();
                    d += rho[(row + qd, col + qd)] * (nk * s);
                }
                d -= r * (0.5 * nk * (p1 + p2) as f64);
            }
            if noise.gamma_phi != 0.0 || noise.gamma_1 != 0.0 {
                let mut deph = 0.0;
                let mut excited = 0.0;
                for j in 0..n {
                    let m = 1usize << (n - 1 - j);
                    let (b1, b2) = ((q1 & m) != 0, (q2 & m) != 0);
                    if b1 != b2 {
                        deph -= 2.0;
                    }
                    excited += b1 as u8 as f64 + b2 as u8 as f64;
                    if !b1 && !b2 {
                        // σ⁻ρσ⁺ feeds |..0..⟩⟨..0..| from |..1..⟩⟨..1..|
                        d += rho[(row | m, col | m)] * noise.gamma_1;
                    }
                }
                d += r * (0.5 * noise.gamma_phi * deph - 0.5 * noise.gamma_1 * excited);
            }
            *slot = d;
        }
    });
    out
}

/// Integration report of one window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowReport {
    pub substeps: usize,
    pub trace_drift: f64,
    pub min_eigenvalue: f64,
}

/// Trace drift allowed per window.
pub const TRACE_TOL: f64 = 1e-8;
/// Most negative eigenvalue tolerated after a window.
pub const POSITIVITY_TOL: f64 = 1e-7;

fn rk4(rho: &DMatrix<C64>, h: f64, params: &ModelParams, noise: &NoiseParams) -> DMatrix<C64> {
    let k1 = lindblad_rhs(rho, params, noise);
    let k2 = lindblad_rhs(&(rho + &k1 * C64::new(0.5 * h, 0.0)), params, noise);
    let k3 = lindblad_rhs(&(rho + &k2 * C64::new(0.5 * h, 0.0)), params, noise);
    let k4 = lindblad_rhs(&(rho + &k3 * C64::new(h, 0.0)), params, noise);
    rho + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0)
}

fn symmetrize(m: &mut DMatrix<C64>) {
    let adj = m.adjoint();
    *m += adj;
    *m *= C64::new(0.5, 0.0);
}

fn trace(m: &DMatrix<C64>) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)].re).sum()
}

/// Integrates the master equation over `duration` seconds with fixed-step
/// RK4. The initial step honours `max_rate · h ≤ 0.1`; a window whose result
/// drifts in trace or loses positivity is redone with halved steps (up to
/// four times) before failing.
pub fn lindblad_window(
    rho: &DMatrix<C64>,
    duration: f64,
    noise: &NoiseParams,
    params: &ModelParams,
) -> Result<(DMatrix<C64>, WindowReport)> {
    if noise.is_noiseless() || duration == 0.0 {
        let min = DensityMatrix::new(rho.clone())?.min_eigenvalue();
        return Ok((
            rho.clone(),
            WindowReport {
                substeps: 0,
                trace_drift: 0.0,
                min_eigenvalue: min,
            },
        ));
    }
    let t0 = trace(rho);
    let mut substeps = ((duration * noise.max_rate(params) / 0.1).ceil() as usize).max(1);
    let mut last = (0.0, 0.0);
    for _ in 0..5 {
        let h = duration / substeps as f64;
        let mut cur = rho.clone();
        for _ in 0..substeps {
            cur = rk4(&cur, h, params, noise);
            symmetrize(&mut cur);
        }
        let drift = (trace(&cur) - t0).abs();
        let min = DensityMatrix::new(cur.clone())?.min_eigenvalue();
        if drift <= TRACE_TOL && min >= -POSITIVITY_TOL {
            return Ok((
                cur,
                WindowReport {
                    substeps,
                    trace_drift: drift,
                    min_eigenvalue: min,
                },
            ));
        }
        last = (drift, min);
        substeps *= 2;
    }
    Err(Error::PositivityViolation(last.1.min(-last.0)))
}

/// Output of [`noisy_trotter`].
#[derive(Debug, Clone)]
pub struct NoisyOutput {
    /// Final state in the lab frame.
    pub lab: DensityMatrix,
    /// Final state before the frame rotation.
    pub interaction: DensityMatrix,
    pub windows: Vec<WindowReport>,
    /// `|tr ρ_final − tr ρ_0|`.
    pub total_trace_drift: f64,
}

/// Alternates `ρ → S_DI ρ S_DI†` and a Lindblad window of `τ_Rabi` for each
/// of the `L` Trotter steps, then rotates to the lab frame.
pub fn noisy_trotter(
    rho0: &DensityMatrix,
    steps: usize,
    t_final: f64,
    arch: Architecture,
    noise: &NoiseParams,
    params: &ModelParams,
) -> Result<NoisyOutput> {
    noise.validate()?;
    crate::linalg::check_dim(params.dim(), rho0.dim())?;
    let schedule = CircuitSchedule::build(params, steps, t_final, arch)?;
    let mut rho = rho0.entries().clone();
    let t0 = trace(&rho);
    let mut windows = Vec::with_capacity(steps);
    for k in 1..=steps {
        apply_gates_rho(schedule.step_gates(k), &mut rho, params.n_qubits);
        symmetrize(&mut rho);
        let (next, report) = lindblad_window(&rho, noise.tau_rabi, noise, params)?;
        rho = next;
        windows.push(report);
    }
    let lab = schedule.frame.to_lab_rho(params, &rho, t_final);
    Ok(NoisyOutput {
        total_trace_drift: (trace(&rho) - t0).abs(),
        lab: DensityMatrix::new(lab)?,
        interaction: DensityMatrix::new(rho)?,
        windows,
    })
}
