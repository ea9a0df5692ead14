//! Photon reductions `tr_σ[ρ O]`, overlap coefficients and Uhlmann fidelity.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, LinearOperator, C64, ZERO};
use crate::model::{self, ModelParams, Parity};
use crate::state::{DensityMatrix, QuantumState};

use super::SpectrumSlice;

/// Observable on the qubit register used inside the partial trace.
#[derive(Debug, Clone)]
pub enum RegisterOperator {
    Identity,
    Parity(Parity),
    /// Arbitrary operator on the `2^N`-dimensional register.
    General(LinearOperator),
}

impl RegisterOperator {
    fn entries(&self, n_qubits: usize) -> Result<Vec<(usize, usize, C64)>> {
        let qd = 1usize << n_qubits;
        Ok(match self {
            RegisterOperator::Identity => (0..qd).map(|q| (q, q, C64::new(1.0, 0.0))).collect(),
            RegisterOperator::Parity(sign) => model::register_parity_diagonal(*sign, n_qubits)
                .into_iter()
                .enumerate()
                .filter(|(_, v)| *v != 0.0)
                .map(|(q, v)| (q, q, C64::new(v, 0.0)))
                .collect(),
            RegisterOperator::General(op) => {
                linalg::check_dim(qd, op.dim())?;
                op.iter().collect()
            }
        })
    }
}

/// `tr_σ[|ψ⟩⟨ψ| (1 ⊗ O)]` as an `(n_max+1)²` photon matrix. The trace equals
/// `⟨O⟩` and is not renormalized.
pub fn reduce_pure(
    psi: &QuantumState,
    op: &RegisterOperator,
    params: &ModelParams,
) -> Result<DensityMatrix> {
    linalg::check_dim(params.dim(), psi.dim())?;
    let qd = params.qubit_dim();
    let pd = params.photon_dim();
    let amps = psi.amplitudes();
    let entries = op.entries(params.n_qubits)?;
    let mut out = DMatrix::<C64>::zeros(pd, pd);
    // (tr_σ[ρ O])_{nm} = Σ_{q,q'} ψ(n,q) ψ*(m,q') O_{q'q}
    for n in 0..pd {
        for m in 0..=n {
            let mut acc = ZERO;
            for &(qp, q, o) in &entries {
                acc += amps[n * qd + q] * amps[m * qd + qp].conj() * o;
            }
            out[(n, m)] = acc;
        }
    }
    fill_upper(&mut out, matches!(op, RegisterOperator::General(_)), |n, m| {
        let mut acc = ZERO;
        for &(qp, q, o) in &entries {
            acc += amps[n * qd + q] * amps[m * qd + qp].conj() * o;
        }
        acc
    });
    DensityMatrix::new(out)
}

/// `tr_σ[ρ (1 ⊗ O)]` for a full composite density matrix.
pub fn reduce_mixed(
    rho: &DensityMatrix,
    op: &RegisterOperator,
    params: &ModelParams,
) -> Result<DensityMatrix> {
    linalg::check_dim(params.dim(), rho.dim())?;
    let qd = params.qubit_dim();
    let pd = params.photon_dim();
    let r = rho.entries();
    let entries = op.entries(params.n_qubits)?;
    let element = |n: usize, m: usize| {
        let mut acc = ZERO;
        for &(qp, q, o) in &entries {
            acc += r[(n * qd + q, m * qd + qp)] * o;
        }
        acc
    };
    let mut out = DMatrix::<C64>::zeros(pd, pd);
    for n in 0..pd {
        for m in 0..=n {
            out[(n, m)] = element(n, m);
        }
    }
    fill_upper(&mut out, matches!(op, RegisterOperator::General(_)), element);
    DensityMatrix::new(out)
}

// Hermitian register operators give a Hermitian reduction; general ones are
// evaluated in full.
fn fill_upper(out: &mut DMatrix<C64>, general: bool, element: impl Fn(usize, usize) -> C64) {
    let pd = out.nrows();
    for n in 0..pd {
        for m in n + 1..pd {
            out[(n, m)] = if general { element(n, m) } else { out[(m, n)].conj() };
        }
    }
}

/// `c_m = ⟨Ψ_m|ψ0⟩`
pub fn overlap_coefficients(spectrum: &SpectrumSlice, psi0: &QuantumState) -> Vec<C64> {
    spectrum.states.iter().map(|s| s.inner(psi0)).collect()
}

/// Eigenvalues below this fraction of the largest are treated as zero when
/// forming square roots; eigensolver noise of order `1e-16` would otherwise
/// contribute `1e-8` singular values.
const SQRT_CUTOFF: f64 = 1e-13;

/// Uhlmann fidelity `(tr √(√ρ1 ρ2 √ρ1))²` after renormalizing both traces.
///
/// Evaluated as the squared nuclear norm of `√ρ1 √ρ2`, with the square roots
/// taken by Hermitian eigendecomposition.
pub fn fidelity(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    linalg::check_dim(rho1.dim(), rho2.dim())?;
    let s1 = sqrt_psd(&rho1.renormalized()?)?;
    let s2 = sqrt_psd(&rho2.renormalized()?)?;
    let nuclear: f64 = (s1 * s2).singular_values().iter().sum();
    Ok((nuclear * nuclear).clamp(0.0, 1.0))
}

fn sqrt_psd(rho: &DensityMatrix) -> Result<DMatrix<C64>> {
    let mut h = rho.clone();
    h.symmetrize();
    let eig = h.entries().clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-6 {
        return Err(Error::NotPositive(min));
    }
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, &lam) in eig.eigenvalues.iter().enumerate() {
        let root = if lam > SQRT_CUTOFF * max { lam.sqrt() } else { 0.0 };
        scaled.column_mut(j).iter_mut().for_each(|x| *x *= root);
    }
    Ok(scaled * v.adjoint())
}
