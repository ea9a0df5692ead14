//! Digital-analog Trotter circuits for the Dicke-Ising model.
//!
//! Gates act in the interaction picture of `H₀ = ω₀ a†a − (ω₀/2) Σ σᶻ_j`.
//! One Trotter step `k` (starting at `t_k = (k−1)Δt`) is the Dicke-Ising gate
//! `S_DI = (Π ZZ_η)(Π Z_β) S_D`, and the Dicke gate `S_D` is a product of
//! Rabi gates
//!
//! ```text
//! S_R = S_JC(θ/2) X_π(φ₊) S_JC(θ) X_π(φ₋) S_JC(θ/2),
//! φ₋ = ω₀(t_k + Δt/4),  φ₊ = ω₀(t_k + 3Δt/4),  θ = gΔt/√N
//! ```
//!
//! applied to qubits `0, 1, …, N−1` in that order. On the chain architecture
//! only qubit 0 touches the resonator; each further qubit is bubbled to site 0
//! through nearest-neighbour SWAPs, which reverses the register. Restoring
//! SWAPs (flagged, and left out of the headline counts) undo the reversal
//! before the Ising layer so that `Z`/`ZZ` address physical sites.
//!
//! Gate records are stored in application order (rightmost factor first).

mod gates;

pub use gates::{apply_gates, apply_gates_rho, materialize, GateKind, GateRecord};

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::model::{self, ModelParams};
use crate::state::{DensityMatrix, QuantumState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Architecture {
    /// Only qubit 0 couples to the resonator; SWAPs route the others.
    ChainSwap,
    /// Every qubit couples to the resonator.
    Star,
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Architecture::ChainSwap => "chain_swap",
            Architecture::Star => "star",
        })
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chain_swap" | "chain" => Ok(Architecture::ChainSwap),
            "star" => Ok(Architecture::Star),
            other => Err(Error::InvalidParameter(format!("unknown architecture `{other}`"))),
        }
    }
}

/// Reference Hamiltonian of the interaction picture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    /// Coefficient of `a†a`.
    pub photon: f64,
    /// Coefficient of `−Σ σᶻ_j`.
    pub qubit: f64,
}

impl Frame {
    pub fn for_params(params: &ModelParams) -> Self {
        Self {
            photon: params.omega0,
            qubit: 0.5 * params.omega0,
        }
    }

    /// Diagonal of `H₀` on the composite space.
    pub fn energies(&self, params: &ModelParams) -> Vec<f64> {
        let n = params.n_qubits;
        let qd = params.qubit_dim();
        (0..params.dim())
            .map(|i| {
                let (p, q) = (i / qd, i % qd);
                let sz: f64 = (0..n).map(|j| model::sz_value(q, j, n)).sum();
                self.photon * p as f64 - self.qubit * sz
            })
            .collect()
    }

    /// `e^{−iH₀t}` as a diagonal phase vector.
    pub fn propagator(&self, params: &ModelParams, t: f64) -> Vec<C64> {
        self.energies(params)
            .into_iter()
            .map(|e| C64::from_polar(1.0, -e * t))
            .collect()
    }

    /// Interaction-picture state to lab frame: `e^{−iH₀t}ψ`.
    pub fn to_lab(&self, params: &ModelParams, psi: &QuantumState, t: f64) -> QuantumState {
        let phases = self.propagator(params, t);
        QuantumState::new(psi.amplitudes().iter().zip(&phases).map(|(a, p)| a * p).collect())
    }

    /// `e^{−iH₀t} ρ e^{iH₀t}`.
    pub fn to_lab_rho(&self, params: &ModelParams, rho: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
        let phases = self.propagator(params, t);
        DMatrix::from_fn(rho.nrows(), rho.ncols(), |a, b| phases[a] * rho[(a, b)] * phases[b].conj())
    }
}

/// Rabi gate records on `qubit` for the step starting at `t_k`.
pub fn rabi_gate(t_k: f64, dt: f64, theta: f64, omega0: f64, qubit: usize, step: usize) -> Vec<GateRecord> {
    let phi_minus = omega0 * (t_k + 0.25 * dt);
    let phi_plus = omega0 * (t_k + 0.75 * dt);
    vec![
        GateRecord::jc(0.5 * theta, qubit, step),
        GateRecord::x_pi(phi_minus, qubit, step),
        GateRecord::jc(theta, qubit, step),
        GateRecord::x_pi(phi_plus, qubit, step),
        GateRecord::jc(0.5 * theta, qubit, step),
    ]
}

/// Coupling angle `θ = gΔt/√N` of the Dicke gate.
pub fn dicke_theta(params: &ModelParams, dt: f64) -> f64 {
    params.g * dt / (params.n_qubits as f64).sqrt()
}

/// Dicke gate records. With `restore = false` the chain variant leaves the
/// register reversed.
pub fn dicke_gate(
    params: &ModelParams,
    t_k: f64,
    dt: f64,
    arch: Architecture,
    step: usize,
    restore: bool,
) -> Vec<GateRecord> {
    let n = params.n_qubits;
    let theta = dicke_theta(params, dt);
    let rabi = |q: usize| rabi_gate(t_k, dt, theta, params.omega0, q, step);
    let mut out = Vec::new();
    match arch {
        Architecture::Star => {
            for q in 0..n {
                out.extend(rabi(q));
            }
        }
        Architecture::ChainSwap => {
            out.extend(rabi(0));
            for j in 1..n {
                for l in (0..j).rev() {
                    out.push(GateRecord::swap(l, l + 1, step));
                }
                out.extend(rabi(0));
            }
            if restore {
                // register is reversed; bubble-sort it back
                for pass in 0..n.saturating_sub(1) {
                    for l in 0..n - 1 - pass {
                        let mut s = GateRecord::swap(l, l + 1, step);
                        s.restoring = true;
                        out.push(s);
                    }
                }
            }
        }
    }
    out
}

/// One Dicke-Ising Trotter step: Dicke gate, then `Z` on every site, then
/// `ZZ` on every open-chain bond.
pub fn dicke_ising_gate(params: &ModelParams, t_k: f64, dt: f64, arch: Architecture, step: usize) -> Vec<GateRecord> {
    let n = params.n_qubits;
    let mut out = dicke_gate(params, t_k, dt, arch, step, true);
    for q in 0..n {
        out.push(GateRecord::z(params.omegaz * dt, q, step));
    }
    for q in 0..n.saturating_sub(1) {
        out.push(GateRecord::zz(params.j * dt, q, step));
    }
    out
}

/// CNOT ladder from the far end, `CNOT(N−1 → N−2) … CNOT(1 → 0)`, which
/// leaves the register parity on qubit 0.
pub fn parity_ladder(n_qubits: usize, step: usize) -> Vec<GateRecord> {
    (0..n_qubits.saturating_sub(1))
        .rev()
        .map(|t| GateRecord::cnot(t + 1, t, step))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateCount {
    pub jc: usize,
    /// Two per `ZZ` gate plus the readout ladder.
    pub cnot: usize,
    pub swap: usize,
}

/// Closed-form counts for `L` steps on `N` qubits.
pub fn gate_count(l: usize, n: usize, arch: Architecture) -> GateCount {
    GateCount {
        jc: 3 * l * n,
        cnot: (2 * l + 1) * n.saturating_sub(1),
        swap: match arch {
            Architecture::ChainSwap => l * n * n.saturating_sub(1) / 2,
            Architecture::Star => 0,
        },
    }
}

/// A full circuit: `L` Dicke-Ising steps followed by the parity ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSchedule {
    pub architecture: Architecture,
    pub steps: usize,
    pub dt: f64,
    pub n_qubits: usize,
    pub gates: Vec<GateRecord>,
    pub frame: Frame,
}

impl CircuitSchedule {
    pub fn build(params: &ModelParams, steps: usize, t_final: f64, arch: Architecture) -> Result<Self> {
        params.validate()?;
        params.require_qubits()?;
        if steps == 0 {
            return Err(Error::InvalidParameter("at least one Trotter step is required".into()));
        }
        if params.boundary != model::Boundary::Open {
            return Err(Error::InvalidParameter("circuits are defined for open chains".into()));
        }
        let dt = t_final / steps as f64;
        let mut gates = Vec::new();
        for k in 1..=steps {
            let t_k = (k - 1) as f64 * dt;
            gates.extend(dicke_ising_gate(params, t_k, dt, arch, k));
        }
        gates.extend(parity_ladder(params.n_qubits, steps + 1));
        Ok(Self {
            architecture: arch,
            steps,
            dt,
            n_qubits: params.n_qubits,
            gates,
            frame: Frame::for_params(params),
        })
    }

    pub fn t_final(&self) -> f64 {
        self.dt * self.steps as f64
    }

    /// Gates of the Trotter evolution, without the readout ladder.
    pub fn evolution(&self) -> &[GateRecord] {
        let end = self.gates.iter().position(|g| g.step > self.steps).unwrap_or(self.gates.len());
        &self.gates[..end]
    }

    pub fn readout(&self) -> &[GateRecord] {
        &self.gates[self.evolution().len()..]
    }

    pub fn step_gates(&self, k: usize) -> &[GateRecord] {
        let start = self.gates.iter().position(|g| g.step == k).unwrap_or(self.gates.len());
        let len = self.gates[start..].iter().take_while(|g| g.step == k).count();
        &self.gates[start..start + len]
    }

    /// Counts taken from the materialized records, restoring SWAPs excluded.
    pub fn counts(&self) -> GateCount {
        let mut c = GateCount { jc: 0, cnot: 0, swap: 0 };
        for g in &self.gates {
            match g.kind {
                GateKind::Jc => c.jc += 1,
                GateKind::Zz => c.cnot += 2,
                GateKind::Cnot => c.cnot += 1,
                GateKind::Swap if !g.restoring => c.swap += 1,
                _ => {}
            }
        }
        c
    }

    pub fn restoring_swaps(&self) -> usize {
        self.gates.iter().filter(|g| g.restoring).count()
    }

    /// Line-oriented export, one gate per line.
    pub fn export(&self) -> String {
        let mut s = String::new();
        for g in &self.gates {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }
}

/// Output of [`trotter_evolve`].
#[derive(Debug, Clone)]
pub struct TrotterOutput {
    /// Raw gate-product state.
    pub interaction: QuantumState,
    /// `e^{−iH₀t_f}` applied to the raw state.
    pub lab: QuantumState,
    pub schedule: CircuitSchedule,
}

/// Applies `S_DI(t_k, Δt)` for `k = 1..L` to `psi0`.
pub fn trotter_evolve(
    params: &ModelParams,
    psi0: &QuantumState,
    steps: usize,
    t_final: f64,
    arch: Architecture,
) -> Result<TrotterOutput> {
    crate::linalg::check_dim(params.dim(), psi0.dim())?;
    let schedule = CircuitSchedule::build(params, steps, t_final, arch)?;
    let mut amps = psi0.amplitudes().to_vec();
    apply_gates(schedule.evolution(), &mut amps, params.n_qubits);
    let interaction = QuantumState::new(amps);
    let lab = schedule.frame.to_lab(params, &interaction, t_final);
    Ok(TrotterOutput {
        interaction,
        lab,
        schedule,
    })
}

/// Result of the single-qubit parity readout.
#[derive(Debug, Clone)]
pub struct ParityReadout {
    pub p_plus: f64,
    /// Photon state conditioned on `z₁ = +1`, normalized to unit trace.
    pub post_state: DensityMatrix,
}

const CONDITIONING_MIN: f64 = 1e-12;

/// Runs the CNOT ladder, then conditions on qubit 0 reading `|0⟩`.
pub fn parity_readout(params: &ModelParams, psi: &QuantumState) -> Result<ParityReadout> {
    params.require_qubits()?;
    crate::linalg::check_dim(params.dim(), psi.dim())?;
    let n = params.n_qubits;
    let mut amps = psi.amplitudes().to_vec();
    apply_gates(&parity_ladder(n, 0), &mut amps, n);
    let qd = params.qubit_dim();
    let dp = params.photon_dim();
    let top = 1usize << (n - 1);
    let mut rho = DMatrix::<C64>::zeros(dp, dp);
    for a in 0..dp {
        for b in a..dp {
            let mut s = C64::new(0.0, 0.0);
            for q in (0..qd).filter(|q| (q & top) == 0) {
                s += amps[a * qd + q] * amps[b * qd + q].conj();
            }
            rho[(a, b)] = s;
            rho[(b, a)] = s.conj();
        }
    }
    finish_readout(rho)
}

/// Mixed-state version of [`parity_readout`].
pub fn parity_readout_mixed(params: &ModelParams, rho: &DensityMatrix) -> Result<ParityReadout> {
    params.require_qubits()?;
    crate::linalg::check_dim(params.dim(), rho.dim())?;
    let n = params.n_qubits;
    let mut m = rho.entries().clone();
    apply_gates_rho(&parity_ladder(n, 0), &mut m, n);
    let qd = params.qubit_dim();
    let dp = params.photon_dim();
    let top = 1usize << (n - 1);
    let mut out = DMatrix::<C64>::zeros(dp, dp);
    for a in 0..dp {
        for b in 0..dp {
            out[(a, b)] = (0..qd).filter(|q| (q & top) == 0).map(|q| m[(a * qd + q, b * qd + q)]).sum();
        }
    }
    finish_readout(out)
}

fn finish_readout(rho: DMatrix<C64>) -> Result<ParityReadout> {
    let p_plus: f64 = (0..rho.nrows()).map(|i| rho[(i, i)].re).sum();
    if p_plus < CONDITIONING_MIN {
        return Err(Error::ConditioningUndefined(p_plus));
    }
    Ok(ParityReadout {
        p_plus,
        post_state: DensityMatrix::new(rho / C64::new(p_plus, 0.0))?,
    })
}
