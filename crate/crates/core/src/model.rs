//! Composite photon ⊗ qubit-register Hilbert space, its elementary operators,
//! the Dicke-Ising family of Hamiltonians and the special states used as
//! inputs to the engines.
//!
//! Basis ordering is photon-major: the flat index of `|n⟩ ⊗ |b_0 b_1 … b_{N−1}⟩`
//! is `n · 2^N + Σ_j b_j · 2^(N−1−j)`, so qubit 0 is the most significant bit
//! of the register block. Bit value 0 is the `+1` eigenstate of `σ^z`.
//!
//! Ladder operators on a qubit follow `σ^± = (σ^x ∓ iσ^y)/2`:
//!
//! ```text
//! σ^+ = [[0, 0],     σ^- = [[0, 1],
//!        [1, 0]]            [0, 0]]
//! ```
//!
//! so `σ^+ |0⟩ = |1⟩` raises the qubit energy under `−ω_z σ^z`, and the
//! Jaynes-Cummings coupling `a†σ^- + aσ^+` conserves `a†a + Σ_j |1⟩⟨1|_j`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{LinearOperator, C64, ONE, ZERO};
use crate::state::QuantumState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Open,
    Periodic,
}

/// Physical couplings and truncation sizes. All energies are in the same
/// (arbitrary) unit; presets use `ω_0 = 1`.
///
/// `g` is the bare coupling entering `(g/√N)(a + a†) Σ_j σ^x_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub omega0: f64,
    pub omegaz: f64,
    pub j: f64,
    pub g: f64,
    pub n_qubits: usize,
    pub n_max: usize,
    pub spin: f64,
    pub boundary: Boundary,
}

impl ModelParams {
    /// Spin-1/2 open chain with the given couplings and sizes.
    pub fn qubits(omega0: f64, omegaz: f64, j: f64, g: f64, n_qubits: usize, n_max: usize) -> Self {
        Self {
            omega0,
            omegaz,
            j,
            g,
            n_qubits,
            n_max,
            spin: 0.5,
            boundary: Boundary::Open,
        }
    }

    /// Ground-state parameters of the static cat-state run:
    /// N=7, 20-photon cutoff, J=ω0, ωz=0.05ω0, g=0.9√(ω0 J).
    pub fn fig2() -> Self {
        Self::qubits(1.0, 0.05, 1.0, 0.9, 7, 20)
    }

    /// Quench / circuit parameters: N=5, 20-photon cutoff, ωz=0.05ω0,
    /// J=ω0, g=0.9ω0.
    pub fn fig4() -> Self {
        Self::qubits(1.0, 0.05, 1.0, 0.9, 5, 20)
    }

    pub fn with_g(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn with_sizes(mut self, n_qubits: usize, n_max: usize) -> Self {
        self.n_qubits = n_qubits;
        self.n_max = n_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega0 must be positive, got {}",
                self.omega0
            )));
        }
        if self.n_qubits == 0 {
            return Err(Error::InvalidParameter("at least one qubit required".into()));
        }
        let two_s = 2.0 * self.spin;
        if !(self.spin > 0.0) || (two_s - two_s.round()).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "spin must be a positive half-integer, got {}",
                self.spin
            )));
        }
        for (name, v) in [("omegaz", self.omegaz), ("J", self.j), ("g", self.g)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    /// Hilbert-space builders are defined for qubits only.
    pub fn require_qubits(&self) -> Result<()> {
        self.validate()?;
        if (self.spin - 0.5).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "operator builders require spin 1/2, got {}",
                self.spin
            )));
        }
        Ok(())
    }

    pub fn photon_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn qubit_dim(&self) -> usize {
        let local = (2.0 * self.spin).round() as usize + 1;
        local.pow(self.n_qubits as u32)
    }

    /// `(n_max + 1) · (2s + 1)^N`
    pub fn dim(&self) -> usize {
        self.photon_dim() * self.qubit_dim()
    }

    /// Ising bonds `(j, j+1)` including the wrap bond on a periodic ring.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let n = self.n_qubits;
        let mut bonds: Vec<_> = (0..n.saturating_sub(1)).map(|j| (j, j + 1)).collect();
        if self.boundary == Boundary::Periodic && n > 2 {
            bonds.push((n - 1, 0));
        }
        bonds
    }
}

/// Label of a composite basis state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HilbertIndex {
    pub photon: usize,
    pub bits: Vec<u8>,
}

impl HilbertIndex {
    pub fn flat(&self, params: &ModelParams) -> Result<usize> {
        let n = params.n_qubits;
        if self.photon > params.n_max {
            return Err(Error::IndexOutOfRange {
                what: "photon",
                index: self.photon,
                limit: params.n_max,
            });
        }
        check_len(self.bits.len(), n)?;
        let mut q = 0usize;
        for (j, &b) in self.bits.iter().enumerate() {
            if b > 1 {
                return Err(Error::InvalidParameter(format!("bit {j} has value {b}")));
            }
            q |= (b as usize) << (n - 1 - j);
        }
        Ok(self.photon * (1 << n) + q)
    }

    pub fn from_flat(index: usize, params: &ModelParams) -> Result<Self> {
        if index >= params.dim() {
            return Err(Error::IndexOutOfRange {
                what: "flat",
                index,
                limit: params.dim() - 1,
            });
        }
        let n = params.n_qubits;
        let q = index & ((1 << n) - 1);
        Ok(Self {
            photon: index >> n,
            bits: (0..n).map(|j| ((q >> (n - 1 - j)) & 1) as u8).collect(),
        })
    }
}

fn check_len(found: usize, expected: usize) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Bit of qubit `j` in register index `q` of an `n`-qubit register.
#[inline]
pub fn qubit_bit(q: usize, j: usize, n: usize) -> usize {
    (q >> (n - 1 - j)) & 1
}

/// `σ^z` eigenvalue of qubit `j` in register index `q`.
#[inline]
pub fn sz_value(q: usize, j: usize, n: usize) -> f64 {
    1.0 - 2.0 * qubit_bit(q, j, n) as f64
}

/// Truncated photon ladder operators.
#[derive(Debug, Clone)]
pub struct BosonOps {
    pub annihilation: LinearOperator,
    pub creation: LinearOperator,
    pub number: LinearOperator,
}

/// `a`, `a†` and `a†a` on the Fock space `{|0⟩, …, |n_max⟩}`; the creation
/// operator annihilates `|n_max⟩` (hard cutoff).
pub fn boson_ops(n_max: usize) -> BosonOps {
    let d = n_max + 1;
    let trip = (0..n_max)
        .map(|n| (n, n + 1, C64::new(((n + 1) as f64).sqrt(), 0.0)))
        .collect();
    let annihilation = LinearOperator::from_triplets(d, trip);
    let creation = annihilation.adjoint();
    let number = creation.matmul(&annihilation);
    BosonOps {
        annihilation,
        creation,
        number,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

/// Single-qubit Pauli matrix `σ^axis_j` embedded in the composite space.
pub fn pauli_op(j: usize, axis: PauliAxis, params: &ModelParams) -> Result<LinearOperator> {
    params.require_qubits()?;
    let n = params.n_qubits;
    if j >= n {
        return Err(Error::IndexOutOfRange {
            what: "qubit",
            index: j,
            limit: n - 1,
        });
    }
    let qd = 1usize << n;
    let mask = 1usize << (n - 1 - j);
    let mut trip = Vec::with_capacity(params.dim());
    for p in 0..params.photon_dim() {
        for q in 0..qd {
            let row = p * qd + q;
            let bit = qubit_bit(q, j, n);
            match axis {
                PauliAxis::Z => trip.push((row, row, C64::new(sz_value(q, j, n), 0.0))),
                PauliAxis::X => trip.push((p * qd + (q ^ mask), row, ONE)),
                PauliAxis::Y => {
                    // σ^y|0⟩ = i|1⟩, σ^y|1⟩ = −i|0⟩
                    let v = if bit == 0 { C64::new(0.0, 1.0) } else { C64::new(0.0, -1.0) };
                    trip.push((p * qd + (q ^ mask), row, v));
                }
            }
        }
    }
    Ok(LinearOperator::from_triplets(params.dim(), trip))
}

/// Photon operator lifted to the composite space (`op ⊗ 1_qubits`).
pub fn photon_op(op: &LinearOperator, params: &ModelParams) -> LinearOperator {
    op.kron(&LinearOperator::identity(params.qubit_dim()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianKind {
    /// `ω0 a†a − ωz Σσ^z + (g/√N)(a + a†)Σσ^x − J Σ σ^zσ^z`
    DickeIsing,
    /// Dicke-Ising without the Ising term.
    Dicke,
    /// Interaction-picture reference `ω0 a†a − (ω0/2) Σσ^z`.
    Free,
    /// Quantum Rabi model `ω0 a†a + g(a + a†)σ^x` (single qubit).
    Rabi,
}

pub fn hamiltonian(kind: HamiltonianKind, params: &ModelParams) -> Result<LinearOperator> {
    params.require_qubits()?;
    let n = params.n_qubits;
    if kind == HamiltonianKind::Rabi && n != 1 {
        return Err(Error::InvalidParameter(format!(
            "Rabi Hamiltonian requires exactly one qubit, got {n}"
        )));
    }
    let qd = 1usize << n;
    let bonds = params.bonds();
    let (field, ising, coupling) = match kind {
        HamiltonianKind::DickeIsing => (params.omegaz, params.j, params.g / (n as f64).sqrt()),
        HamiltonianKind::Dicke => (params.omegaz, 0.0, params.g / (n as f64).sqrt()),
        HamiltonianKind::Free => (0.5 * params.omega0, 0.0, 0.0),
        HamiltonianKind::Rabi => (0.0, 0.0, params.g),
    };

    let mut trip = Vec::new();
    for p in 0..params.photon_dim() {
        for q in 0..qd {
            let row = p * qd + q;
            let mut diag = params.omega0 * p as f64;
            for j in 0..n {
                diag -= field * sz_value(q, j, n);
            }
            for &(a, b) in &bonds {
                diag -= ising * sz_value(q, a, n) * sz_value(q, b, n);
            }
            if diag != 0.0 {
                trip.push((row, row, C64::new(diag, 0.0)));
            }
            if coupling != 0.0 {
                for j in 0..n {
                    let flipped = q ^ (1 << (n - 1 - j));
                    // (a + a†) σ^x_j acting on |p, q⟩
                    if p > 0 {
                        let amp = coupling * (p as f64).sqrt();
                        trip.push(((p - 1) * qd + flipped, row, C64::new(amp, 0.0)));
                    }
                    if p < params.n_max {
                        let amp = coupling * ((p + 1) as f64).sqrt();
                        trip.push(((p + 1) * qd + flipped, row, C64::new(amp, 0.0)));
                    }
                }
            }
        }
    }
    Ok(LinearOperator::from_triplets(params.dim(), trip))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpecialState {
    /// Photon vacuum with every qubit in `|0⟩`.
    Ferromagnetic,
    /// Photon coherent state `|α⟩` (renormalized on the truncated space)
    /// with the qubits in `|0…0⟩`.
    Coherent(C64),
    /// Photon Fock state `|n⟩` with the qubits in `|0…0⟩`.
    Fock(usize),
}

/// Coherent-state Fock amplitudes on `{0, …, n_max}`, renormalized, together
/// with the probability mass lost to truncation.
pub fn coherent_amplitudes(alpha: C64, n_max: usize) -> (Vec<C64>, f64) {
    let mut amps = Vec::with_capacity(n_max + 1);
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..=n_max {
        amps.push(c);
        c = c * alpha / ((n + 1) as f64).sqrt();
    }
    let kept: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let lost = (1.0 - kept).max(0.0);
    let scale = 1.0 / kept.sqrt();
    amps.iter_mut().for_each(|a| *a *= scale);
    (amps, lost)
}

/// Mass a coherent state loses to truncation above which a caller should
/// enlarge `n_max`.
pub const TRUNCATION_WARN: f64 = 1e-8;

pub fn special_state(kind: SpecialState, params: &ModelParams) -> Result<QuantumState> {
    params.require_qubits()?;
    let qd = params.qubit_dim();
    let mut amps = vec![ZERO; params.dim()];
    match kind {
        SpecialState::Ferromagnetic => amps[0] = ONE,
        SpecialState::Fock(n) => {
            if n > params.n_max {
                return Err(Error::IndexOutOfRange {
                    what: "Fock",
                    index: n,
                    limit: params.n_max,
                });
            }
            amps[n * qd] = ONE;
        }
        SpecialState::Coherent(alpha) => {
            let (photon, _) = coherent_amplitudes(alpha, params.n_max);
            for (n, a) in photon.into_iter().enumerate() {
                amps[n * qd] = a;
            }
        }
    }
    Ok(QuantumState::new(amps))
}

/// Register amplitudes of the product states `|R⟩` (`sign = +1`) and `|L⟩`
/// (`sign = −1`): `Π_j (|0⟩_j ± |1⟩_j)/√2`.
pub fn register_product_state(n_qubits: usize, sign: f64) -> Vec<C64> {
    let qd = 1usize << n_qubits;
    let norm = FRAC_1_SQRT_2.powi(n_qubits as i32);
    (0..qd)
        .map(|q| {
            let ones = q.count_ones() as i32;
            C64::new(norm * sign.powi(ones), 0.0)
        })
        .collect()
}

/// Photon amplitudes ⊗ register amplitudes in the photon-major layout.
pub fn product_state(photon: &[C64], register: &[C64]) -> QuantumState {
    let mut amps = Vec::with_capacity(photon.len() * register.len());
    for &p in photon {
        for &r in register {
            amps.push(p * r);
        }
    }
    QuantumState::new(amps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Diagonal of `P_± = (1 ± Π_j σ^z_j)/2` over the qubit register.
pub fn register_parity_diagonal(sign: Parity, n_qubits: usize) -> Vec<f64> {
    (0..1usize << n_qubits)
        .map(|q| {
            let even = q.count_ones() % 2 == 0;
            let matches = even == (sign == Parity::Even);
            if matches {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// `P_±` tensored with the photon identity.
pub fn parity_projector(sign: Parity, params: &ModelParams) -> Result<LinearOperator> {
    params.require_qubits()?;
    let reg = register_parity_diagonal(sign, params.n_qubits);
    let diag: Vec<C64> = (0..params.photon_dim())
        .flat_map(|_| reg.iter().map(|&v| C64::new(v, 0.0)))
        .collect();
    Ok(LinearOperator::diagonal(&diag))
}
