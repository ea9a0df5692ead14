//! Real-time propagation `|ψ(t)⟩ = e^{−iHt}|ψ0⟩` by short-iterative Lanczos.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{self, LinearOperator, C64, ZERO};
use crate::state::QuantumState;

#[derive(Debug, Clone, Copy)]
pub struct PropagatorConfig {
    /// Local error allowed per unit time.
    pub tol: f64,
    pub krylov_dim: usize,
    pub max_substeps: usize,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            krylov_dim: 30,
            max_substeps: 100_000,
        }
    }
}

impl PropagatorConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// A Lanczos basis built from one starting vector, with its tridiagonal
/// projection already diagonalized.
struct KrylovBasis {
    vectors: Vec<Vec<C64>>,
    ritz: Vec<f64>,
    // rows: Krylov index, cols: Ritz index
    modes: DMatrix<f64>,
    beta_last: f64,
    exhausted: bool,
}

impl KrylovBasis {
    fn build(h: &LinearOperator, v0: &[C64], m: usize) -> Self {
        let scale = h.norm_bound().max(1.0);
        let n0 = linalg::norm(v0);
        let mut vectors = vec![v0.iter().map(|x| x / n0).collect::<Vec<_>>()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta = Vec::with_capacity(m);
        let mut beta_last = 0.0;
        let mut exhausted = false;
        for k in 0..m {
            let mut w = h.apply(&vectors[k]);
            let a = linalg::dot(&vectors[k], &w).re;
            alpha.push(a);
            for _ in 0..2 {
                for v in &vectors {
                    let c = linalg::dot(v, &w);
                    linalg::axpy(-c, v, &mut w);
                }
            }
            let b = linalg::norm(&w);
            if b <= 1e-13 * scale {
                exhausted = true;
                break;
            }
            if k + 1 == m {
                beta_last = b;
                break;
            }
            beta.push(b);
            w.iter_mut().for_each(|x| *x /= b);
            vectors.push(w);
        }
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        Self {
            vectors,
            ritz: eig.eigenvalues.iter().cloned().collect(),
            modes: eig.eigenvectors,
            beta_last,
            exhausted,
        }
    }

    /// Coefficients of `e^{−iTτ} e_1` in the Krylov basis.
    fn coefficients(&self, tau: f64) -> Vec<C64> {
        let k = self.ritz.len();
        let mut y = vec![ZERO; k];
        for (r, &theta) in self.ritz.iter().enumerate() {
            let w = C64::from_polar(self.modes[(0, r)], -theta * tau);
            for (i, yi) in y.iter_mut().enumerate() {
                *yi += w * self.modes[(i, r)];
            }
        }
        y
    }

    /// A-posteriori local error estimate for a step of length `tau`.
    fn error_estimate(&self, tau: f64) -> f64 {
        if self.exhausted {
            return 0.0;
        }
        let y = self.coefficients(tau);
        self.beta_last * y.last().map(|c| c.norm()).unwrap_or(0.0)
    }

    fn assemble(&self, y: &[C64], norm: f64) -> Vec<C64> {
        let dim = self.vectors[0].len();
        let mut out = vec![ZERO; dim];
        for (v, &c) in self.vectors.iter().zip(y) {
            linalg::axpy(c * norm, v, &mut out);
        }
        out
    }
}

/// Advances `psi` by `t` under `H`, subdividing adaptively so that each
/// substep's estimated local error stays below `cfg.tol · substep`.
pub fn propagate(
    h: &LinearOperator,
    psi: &QuantumState,
    t: f64,
    cfg: &PropagatorConfig,
) -> Result<QuantumState> {
    linalg::check_dim(h.dim(), psi.dim())?;
    let mut v = psi.amplitudes().to_vec();
    let norm = linalg::norm(&v);
    let mut remaining = t;
    let sign = t.signum();
    let mut tau_guess = t.abs().min(1.0);
    let mut substeps = 0usize;
    while remaining.abs() > 1e-15 * t.abs().max(1.0) {
        let basis = KrylovBasis::build(h, &v, cfg.krylov_dim.min(h.dim()));
        let mut tau = tau_guess.min(remaining.abs());
        loop {
            substeps += 1;
            if substeps > cfg.max_substeps {
                return Err(Error::ToleranceUnreachable {
                    tol: cfg.tol,
                    max_substeps: cfg.max_substeps,
                });
            }
            let err = basis.error_estimate(sign * tau);
            if err <= cfg.tol * tau || basis.exhausted {
                let y = basis.coefficients(sign * tau);
                v = basis.assemble(&y, norm);
                remaining -= sign * tau;
                // grow cautiously when well inside tolerance
                tau_guess = if err < 0.1 * cfg.tol * tau { tau * 1.5 } else { tau };
                break;
            }
            tau *= 0.5;
            if tau < 1e-14 {
                return Err(Error::ToleranceUnreachable {
                    tol: cfg.tol,
                    max_substeps: cfg.max_substeps,
                });
            }
        }
    }
    Ok(QuantumState::new(v))
}

/// States at each of the (non-decreasing) sample times, starting from
/// `psi0` at `t = 0`.
pub fn evolve(
    h: &LinearOperator,
    psi0: &QuantumState,
    times: &[f64],
    cfg: &PropagatorConfig,
) -> Result<Vec<QuantumState>> {
    let mut out = Vec::with_capacity(times.len());
    let mut current = psi0.clone();
    let mut t_prev = 0.0;
    for &t in times {
        if t < t_prev {
            return Err(Error::InvalidParameter("sample times must be non-decreasing".into()));
        }
        if t > t_prev {
            current = propagate(h, &current, t - t_prev, cfg)?;
            t_prev = t;
        }
        out.push(current.clone());
    }
    Ok(out)
}

/// Uniform sample grid of `n` points on `[0, t_final]`.
pub fn uniform_times(t_final: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t_final],
        _ => (0..n).map(|i| t_final * i as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::expm_hermitian;
    use crate::model::{self, HamiltonianKind, ModelParams, SpecialState};

    #[test]
    fn matches_dense_exponential() {
        let p = ModelParams::qubits(1.0, 0.1, 0.8, 1.1, 2, 8);
        let h = model::hamiltonian(HamiltonianKind::DickeIsing, &p).unwrap();
        let psi0 = model::special_state(SpecialState::Coherent(C64::new(0.7, 0.2)), &p).unwrap();
        let t = 2.3;
        let psi = propagate(&h, &psi0, t, &PropagatorConfig::with_tol(1e-11)).unwrap();
        let u = expm_hermitian(&h.to_dense(), t);
        let reference = &u * nalgebra::DVector::from_column_slice(psi0.amplitudes());
        let err: f64 = psi
            .amplitudes()
            .iter()
            .zip(reference.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-9, "error {err}");
    }

    #[test]
    fn eigenstate_only_gains_phase() {
        let p = ModelParams::qubits(1.0, 0.05, 1.0, 0.0, 3, 4);
        let h = model::hamiltonian(HamiltonianKind::DickeIsing, &p).unwrap();
        let fm = model::special_state(SpecialState::Ferromagnetic, &p).unwrap();
        let e = fm.expectation(&h);
        let psi = propagate(&h, &fm, 3.0, &PropagatorConfig::default()).unwrap();
        let expected = C64::from_polar(1.0, -e * 3.0);
        assert!((psi.amplitudes()[0] - expected).norm() < 1e-12);
    }

    #[test]
    fn unreachable_tolerance_reported() {
        let p = ModelParams::qubits(1.0, 0.1, 0.8, 1.1, 2, 8);
        let h = model::hamiltonian(HamiltonianKind::DickeIsing, &p).unwrap();
        let psi0 = model::special_state(SpecialState::Ferromagnetic, &p).unwrap();
        let cfg = PropagatorConfig {
            tol: 1e-12,
            krylov_dim: 4,
            max_substeps: 5,
        };
        assert!(matches!(
            propagate(&h, &psi0, 10.0, &cfg),
            Err(Error::ToleranceUnreachable { .. })
        ));
    }

    #[test]
    fn sample_times_must_be_sorted() {
        let h = LinearOperator::identity(2);
        let psi = QuantumState::new(vec![C64::new(1.0, 0.0), ZERO]);
        assert!(evolve(&h, &psi, &[1.0, 0.5], &PropagatorConfig::default()).is_err());
    }
}
