use std::fmt;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::linalg::{C64, ONE, ZERO};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    /// `exp(−iθ(a†σ⁻ + aσ⁺))` on the photon and one qubit.
    Jc,
    /// `exp(−iφσᶻ)σˣ`.
    XPi,
    /// `exp(iβσᶻ)`.
    Z,
    /// `exp(iη σᶻ_j σᶻ_{j+1})`.
    Zz,
    Swap,
    /// Control first, target second.
    Cnot,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::Jc => "jc",
            GateKind::XPi => "x_pi",
            GateKind::Z => "z",
            GateKind::Zz => "zz",
            GateKind::Swap => "swap",
            GateKind::Cnot => "cnot",
        }
    }
}

/// One gate of a schedule. Qubit indices are zero-based; qubit 0 is the
/// photon-coupled end of the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct GateRecord {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub phase: f64,
    /// Trotter step `k` (1-based); readout gates carry `L + 1`.
    pub step: usize,
    /// SWAPs appended to undo the register permutation of the chain Dicke
    /// gate; excluded from the closed-form counts.
    pub restoring: bool,
}

impl GateRecord {
    pub fn new(kind: GateKind, targets: Vec<usize>, phase: f64, step: usize) -> Self {
        Self {
            kind,
            targets,
            phase,
            step,
            restoring: false,
        }
    }

    pub fn jc(theta: f64, qubit: usize, step: usize) -> Self {
        Self::new(GateKind::Jc, vec![qubit], theta, step)
    }

    pub fn x_pi(phi: f64, qubit: usize, step: usize) -> Self {
        Self::new(GateKind::XPi, vec![qubit], phi, step)
    }

    pub fn z(beta: f64, qubit: usize, step: usize) -> Self {
        Self::new(GateKind::Z, vec![qubit], beta, step)
    }

    pub fn zz(eta: f64, qubit: usize, step: usize) -> Self {
        Self::new(GateKind::Zz, vec![qubit, qubit + 1], eta, step)
    }

    pub fn swap(a: usize, b: usize, step: usize) -> Self {
        Self::new(GateKind::Swap, vec![a, b], 0.0, step)
    }

    pub fn cnot(control: usize, target: usize, step: usize) -> Self {
        Self::new(GateKind::Cnot, vec![control, target], 0.0, step)
    }

    /// Applies the gate in place to a composite-space vector of a register
    /// with `n_qubits` qubits.
    pub fn apply(&self, amps: &mut [C64], n_qubits: usize) {
        let qd = 1usize << n_qubits;
        let photons = amps.len() / qd;
        let mask = |j: usize| 1usize << (n_qubits - 1 - j);
        match self.kind {
            GateKind::Jc => {
                let m = mask(self.targets[0]);
                for p in 0..photons.saturating_sub(1) {
                    let c = self.phase * ((p + 1) as f64).sqrt();
                    let (cos, sin) = (c.cos(), c.sin());
                    for q in (0..qd).filter(|q| (q & m) != 0) {
                        // doublet {|p, 1⟩, |p+1, 0⟩}
                        let ia = p * qd + q;
                        let ib = (p + 1) * qd + (q ^ m);
                        let (a, b) = (amps[ia], amps[ib]);
                        amps[ia] = a * cos - C64::new(0.0, sin) * b;
                        amps[ib] = b * cos - C64::new(0.0, sin) * a;
                    }
                }
            }
            GateKind::XPi => {
                let m = mask(self.targets[0]);
                let up = C64::from_polar(1.0, self.phase);
                let down = up.conj();
                for p in 0..photons {
                    for q in (0..qd).filter(|q| (q & m) == 0) {
                        let i0 = p * qd + q;
                        let i1 = i0 | m;
                        let (a0, a1) = (amps[i0], amps[i1]);
                        amps[i1] = up * a0;
                        amps[i0] = down * a1;
                    }
                }
            }
            GateKind::Z => {
                let m = mask(self.targets[0]);
                let plus = C64::from_polar(1.0, self.phase);
                let minus = plus.conj();
                for (i, a) in amps.iter_mut().enumerate() {
                    *a *= if ((i % qd) & m) == 0 { plus } else { minus };
                }
            }
            GateKind::Zz => {
                let (ma, mb) = (mask(self.targets[0]), mask(self.targets[1]));
                let aligned = C64::from_polar(1.0, self.phase);
                let anti = aligned.conj();
                for (i, a) in amps.iter_mut().enumerate() {
                    let q = i % qd;
                    *a *= if ((q & ma) == 0) == ((q & mb) == 0) { aligned } else { anti };
                }
            }
            GateKind::Swap => {
                let (ma, mb) = (mask(self.targets[0]), mask(self.targets[1]));
                for p in 0..photons {
                    for q in (0..qd).filter(|q| (q & ma) != 0 && (q & mb) == 0) {
                        amps.swap(p * qd + q, p * qd + (q ^ ma ^ mb));
                    }
                }
            }
            GateKind::Cnot => {
                let (mc, mt) = (mask(self.targets[0]), mask(self.targets[1]));
                for p in 0..photons {
                    for q in (0..qd).filter(|q| (q & mc) != 0 && (q & mt) == 0) {
                        amps.swap(p * qd + q, p * qd + (q ^ mt));
                    }
                }
            }
        }
    }
}

impl fmt::Display for GateRecord {
    /// `kind targets phase step`, with a trailing `restore` on restoring SWAPs.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let targets: Vec<String> = self.targets.iter().map(|t| t.to_string()).collect();
        write!(f, "{} {} {:?} {}", self.kind.name(), targets.join(","), self.phase, self.step)?;
        if self.restoring {
            write!(f, " restore")?;
        }
        Ok(())
    }
}

/// Applies gates in order to a state vector.
pub fn apply_gates(gates: &[GateRecord], amps: &mut [C64], n_qubits: usize) {
    for g in gates {
        g.apply(amps, n_qubits);
    }
}

/// `ρ → U ρ U†` for the ordered gate product `U`, using
/// `UρU† = (U (Uρ)†)†` so only left actions are needed.
pub fn apply_gates_rho(gates: &[GateRecord], rho: &mut DMatrix<C64>, n_qubits: usize) {
    let dim = rho.nrows();
    let left = |m: &mut DMatrix<C64>| {
        m.as_mut_slice()
            .par_chunks_mut(dim)
            .for_each(|col| apply_gates(gates, col, n_qubits));
    };
    left(rho);
    rho.adjoint_mut();
    left(rho);
    rho.adjoint_mut();
}

/// Dense matrix of an ordered gate product on the composite space.
pub fn materialize(gates: &[GateRecord], params: &ModelParams) -> DMatrix<C64> {
    let dim = params.dim();
    let mut u = DMatrix::<C64>::zeros(dim, dim);
    u.as_mut_slice().par_chunks_mut(dim).enumerate().for_each(|(j, col)| {
        col.iter_mut().for_each(|c| *c = ZERO);
        col[j] = ONE;
        apply_gates(gates, col, params.n_qubits);
    });
    u
}
