//! Lowest eigenpairs of sparse Hermitian operators.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{self, LinearOperator, C64, ZERO};
use crate::state::QuantumState;

/// Lowest eigenpairs in ascending order.
#[derive(Debug, Clone)]
pub struct SpectrumSlice {
    pub energies: Vec<f64>,
    pub states: Vec<QuantumState>,
    /// `‖H ψ_m − ε_m ψ_m‖` per returned pair.
    pub residuals: Vec<f64>,
    /// Krylov dimension used (or the matrix dimension for the dense route).
    pub iterations: usize,
}

impl SpectrumSlice {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn ground(&self) -> (&QuantumState, f64) {
        (&self.states[0], self.energies[0])
    }
}

/// Controls for the Lanczos solver.
#[derive(Debug, Clone, Copy)]
pub struct LanczosConfig {
    /// Required true residual per returned pair.
    pub tol: f64,
    /// Krylov dimension cap; the matrix dimension caps it further.
    pub max_iter: usize,
    /// Ritz extraction cadence.
    pub check_every: usize,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 3000,
            check_every: 10,
        }
    }
}

/// Lowest `m_max` eigenpairs of a Hermitian operator.
///
/// Lanczos with full reorthogonalization from the normalized all-ones
/// vector. When the Krylov space becomes invariant the iteration continues
/// from the first unit vector not yet spanned, so degenerate levels are
/// resolved deterministically. Pairs are accepted once every requested true
/// residual is below `tol`.
pub fn ground_state(h: &LinearOperator, m_max: usize) -> Result<SpectrumSlice> {
    ground_state_with(h, m_max, &LanczosConfig::default())
}

pub fn ground_state_with(
    h: &LinearOperator,
    m_max: usize,
    cfg: &LanczosConfig,
) -> Result<SpectrumSlice> {
    let dim = h.dim();
    if m_max == 0 || m_max > dim {
        return Err(Error::InvalidParameter(format!(
            "requested {m_max} eigenpairs of a {dim}-dimensional operator"
        )));
    }
    let scale = h.norm_bound().max(1.0);
    let cap = cfg.max_iter.min(dim);

    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    // beta[k] couples basis k and k+1; zero marks a restart
    let mut beta: Vec<f64> = Vec::new();
    let mut next_unit = 0usize;

    let start = vec![C64::new(1.0 / (dim as f64).sqrt(), 0.0); dim];
    basis.push(start);

    let mut last_residual = f64::INFINITY;
    loop {
        let k = basis.len() - 1;
        let mut w = h.apply(&basis[k]);
        let a = linalg::dot(&basis[k], &w).re;
        alpha.push(a);
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for v in &basis {
                let c = linalg::dot(v, &w);
                linalg::axpy(-c, v, &mut w);
            }
        }
        let b = linalg::norm(&w);
        let krylov = basis.len();

        let full = krylov >= cap;
        if krylov >= m_max && (krylov % cfg.check_every == 0 || full) {
            let (pairs, worst) = ritz_pairs(h, &basis, &alpha, &beta, m_max);
            last_residual = worst;
            if worst <= cfg.tol {
                return Ok(finish(pairs, krylov));
            }
        }
        if full {
            return Err(Error::NoConvergence {
                iterations: krylov,
                residual: last_residual,
            });
        }

        if b > 1e-12 * scale {
            beta.push(b);
            w.iter_mut().for_each(|x| *x /= b);
            basis.push(w);
        } else {
            // invariant subspace: continue from a fresh deterministic direction
            let fresh = loop {
                if next_unit >= dim {
                    break None;
                }
                let mut e = vec![ZERO; dim];
                e[next_unit] = C64::new(1.0, 0.0);
                next_unit += 1;
                for _ in 0..2 {
                    for v in &basis {
                        let c = linalg::dot(v, &e);
                        linalg::axpy(-c, v, &mut e);
                    }
                }
                let n = linalg::norm(&e);
                if n > 1e-8 {
                    e.iter_mut().for_each(|x| *x /= n);
                    break Some(e);
                }
            };
            match fresh {
                Some(e) => {
                    beta.push(0.0);
                    basis.push(e);
                }
                None => {
                    let (pairs, worst) = ritz_pairs(h, &basis, &alpha, &beta, m_max.min(basis.len()));
                    if pairs.len() == m_max && worst <= cfg.tol {
                        return Ok(finish(pairs, basis.len()));
                    }
                    return Err(Error::NoConvergence {
                        iterations: basis.len(),
                        residual: worst,
                    });
                }
            }
        }
    }
}

type RitzPairs = Vec<(f64, Vec<C64>, f64)>;

fn ritz_pairs(
    h: &LinearOperator,
    basis: &[Vec<C64>],
    alpha: &[f64],
    beta: &[f64],
    m: usize,
) -> (RitzPairs, f64) {
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
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());

    let dim = h.dim();
    let mut pairs = Vec::with_capacity(m);
    let mut worst = 0.0f64;
    for &idx in order.iter().take(m) {
        let theta = eig.eigenvalues[idx];
        let mut x = vec![ZERO; dim];
        for (j, v) in basis.iter().enumerate().take(k) {
            let s = eig.eigenvectors[(j, idx)];
            if s != 0.0 {
                linalg::axpy(C64::new(s, 0.0), v, &mut x);
            }
        }
        let n = linalg::norm(&x);
        x.iter_mut().for_each(|v| *v /= n);
        let hx = h.apply(&x);
        let res = hx
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b * theta).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(res);
        pairs.push((theta, x, res));
    }
    (pairs, worst)
}

fn finish(mut pairs: RitzPairs, iterations: usize) -> SpectrumSlice {
    orthonormalize_clusters(&mut pairs);
    SpectrumSlice {
        energies: pairs.iter().map(|p| p.0).collect(),
        residuals: pairs.iter().map(|p| p.2).collect(),
        states: pairs.into_iter().map(|p| QuantumState::new(p.1)).collect(),
        iterations,
    }
}

/// Gram-Schmidt within clusters of (near-)degenerate Ritz values.
fn orthonormalize_clusters(pairs: &mut RitzPairs) {
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && (pairs[end].0 - pairs[start].0).abs() < 1e-8 * pairs[start].0.abs().max(1.0) {
            end += 1;
        }
        for i in start..end {
            for j in start..i {
                let (head, tail) = pairs.split_at_mut(i);
                let c = linalg::dot(&head[j].1, &tail[0].1);
                let prev = head[j].1.clone();
                linalg::axpy(-c, &prev, &mut tail[0].1);
            }
            let n = linalg::norm(&pairs[i].1);
            pairs[i].1.iter_mut().for_each(|v| *v /= n);
        }
        start = end;
    }
}

/// Complete spectrum by dense Hermitian diagonalization; intended for
/// dimensions up to a few thousand.
pub fn full_spectrum(h: &LinearOperator) -> SpectrumSlice {
    let dense = h.to_dense();
    let eig = dense.symmetric_eigen();
    let dim = h.dim();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let mut energies = Vec::with_capacity(dim);
    let mut states = Vec::with_capacity(dim);
    let mut residuals = Vec::with_capacity(dim);
    for idx in order {
        let e = eig.eigenvalues[idx];
        let v: Vec<C64> = eig.eigenvectors.column(idx).iter().cloned().collect();
        let hv = h.apply(&v);
        residuals.push(
            hv.iter()
                .zip(&v)
                .map(|(a, b)| (a - b * e).norm_sqr())
                .sum::<f64>()
                .sqrt(),
        );
        energies.push(e);
        states.push(QuantumState::new(v));
    }
    SpectrumSlice {
        energies,
        states,
        residuals,
        iterations: dim,
    }
}
