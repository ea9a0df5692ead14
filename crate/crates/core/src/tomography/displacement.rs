use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::wigner::{PhaseGrid, WignerField};
use crate::error::{Error, Result};
use crate::linalg::{C64, I, ONE, ZERO};
use crate::state::DensityMatrix;

pub const DEFAULT_PADDING: usize = 20;

/// Inner-block unitarity tolerance for padded displacements.
pub const PADDING_TOL: f64 = 1e-8;

/// Padding large enough that displaced inner states stay well inside the
/// padded space: the displaced Fock distribution of `|n⟩` ends near
/// `(√n + |ξ|)²`, beyond which it decays faster than exponentially.
pub fn auto_padding(n_inner: usize, xi_max: f64) -> usize {
    let edge = (n_inner as f64).sqrt() + xi_max.abs() + 8.0;
    let total = (edge * edge).ceil() as usize;
    total.saturating_sub(n_inner).max(DEFAULT_PADDING)
}

/// Eigendecomposition of `K = i(a† − a)` on a padded Fock space, from which
/// `D(ξ) = R(φ) e^{−i|ξ|K} R(φ)†` with `R(φ) = e^{iφ a†a}` and `φ = arg ξ`.
#[derive(Debug, Clone)]
pub struct DisplacedParity {
    n_inner: usize,
    n_pad: usize,
    vecs: DMatrix<C64>,
    vals: Vec<f64>,
}

impl DisplacedParity {
    pub fn new(n_inner: usize, n_pad: usize) -> Self {
        let dim = n_inner + n_pad;
        let mut k = DMatrix::<C64>::zeros(dim, dim);
        for n in 0..dim.saturating_sub(1) {
            let s = ((n + 1) as f64).sqrt();
            // a†[n+1, n] = √(n+1), a[n, n+1] = √(n+1)
            k[(n + 1, n)] = I * s;
            k[(n, n + 1)] = -I * s;
        }
        let eig = k.symmetric_eigen();
        Self {
            n_inner,
            n_pad,
            vecs: eig.eigenvectors,
            vals: eig.eigenvalues.iter().cloned().collect(),
        }
    }

    pub fn padded_dim(&self) -> usize {
        self.n_inner + self.n_pad
    }

    /// Full padded `D(ξ)`.
    pub fn displacement(&self, xi: C64) -> DMatrix<C64> {
        self.rows(xi, self.padded_dim())
    }

    /// First `count` rows of `D(ξ)`.
    fn rows(&self, xi: C64, count: usize) -> DMatrix<C64> {
        let (r, phi) = (xi.norm(), xi.arg());
        let dim = self.padded_dim();
        let mut left = self.vecs.rows(0, count).into_owned();
        for (a, &lam) in self.vals.iter().enumerate() {
            let e = C64::from_polar(1.0, -r * lam);
            for n in 0..count {
                left[(n, a)] *= e;
            }
        }
        let mut d = left * self.vecs.adjoint();
        for n in 0..count {
            for k in 0..dim {
                d[(n, k)] *= C64::from_polar(1.0, phi * (n as f64 - k as f64));
            }
        }
        d
    }

    /// Worst deviation from identity of `B†B`, where `B` holds the inner
    /// columns of `D` restricted to rows below a guard band of `n_pad/2`
    /// levels. Weight that reaches the guard band signals that the
    /// truncation is being felt.
    pub fn inner_unitarity_residual(&self, xi: C64) -> f64 {
        let d = self.displacement(xi);
        let keep = self.padded_dim() - (self.n_pad / 2).max(1);
        let b = d.view((0, 0), (keep, self.n_inner));
        let g = b.adjoint() * b;
        let mut worst = 0.0f64;
        for i in 0..self.n_inner {
            for j in 0..self.n_inner {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((g[(i, j)] - target).norm());
            }
        }
        worst
    }

    /// Fails with [`Error::InsufficientPadding`] unless displacements up to
    /// `xi_max` pass the inner-block check.
    pub fn check(&self, xi_max: f64) -> Result<f64> {
        let residual = self.inner_unitarity_residual(C64::new(xi_max, 0.0));
        if residual > PADDING_TOL {
            return Err(Error::InsufficientPadding {
                residual,
                tol: PADDING_TOL,
            });
        }
        Ok(residual)
    }

    /// `W_ξ = (2/π) tr(Π D_ξ† ρ D_ξ)` for a photon-space `ρ` of the inner size.
    pub fn w_xi(&self, rho: &DMatrix<C64>, xi: C64) -> f64 {
        let d = self.rows(xi, self.n_inner);
        // (D†ρD)_kk = Σ_mn conj(D_mk) ρ_mn D_nk
        let rd = rho * &d;
        let mut total = ZERO;
        for k in 0..self.padded_dim() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let mut diag = ZERO;
            for m in 0..self.n_inner {
                diag += d[(m, k)].conj() * rd[(m, k)];
            }
            total += diag * sign;
        }
        2.0 / PI * total.re
    }
}

/// Padded `D(ξ) = exp(ξa† − ξ*a)` on `n_inner + n_pad` levels.
pub fn displacement_op(xi: C64, n_inner: usize, n_pad: usize) -> Result<DMatrix<C64>> {
    let dp = DisplacedParity::new(n_inner, n_pad);
    dp.check(xi.norm())?;
    Ok(dp.displacement(xi))
}

/// Wigner function on an `(x, p)` grid by displaced parity, using
/// `ξ = (x + ip)/√2` and `W(x, p) = W_ξ / 2`.
pub fn wigner_displaced_parity(rho: &DensityMatrix, grid: &PhaseGrid, n_pad: Option<usize>) -> Result<WignerField> {
    let n_inner = rho.dim();
    let xi_max = grid
        .x
        .iter()
        .flat_map(|&x| grid.p.iter().map(move |&p| (x * x + p * p).sqrt() * FRAC_1_SQRT_2))
        .fold(0.0, f64::max);
    let pad = n_pad.unwrap_or_else(|| auto_padding(n_inner, xi_max));
    let dp = DisplacedParity::new(n_inner, pad);
    dp.check(xi_max)?;
    let np = grid.p.len();
    let values: Vec<f64> = (0..grid.x.len() * np)
        .into_par_iter()
        .map(|idx| 0.5 * dp.w_xi(rho.entries(), super::xi_from_xp(grid.x[idx / np], grid.p[idx % np])))
        .collect();
    let values = DMatrix::from_fn(grid.x.len(), np, |i, j| values[i * np + j]);
    Ok(WignerField::assemble(grid, values, rho.trace(), 0.0))
}

/// Outcome probabilities of the ancilla readout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamseyOutcome {
    /// Probability of `z₀ = +1`, the even-parity outcome (ancilla ends in `|1⟩`).
    pub p_plus: f64,
    pub p_minus: f64,
    /// `(2/π)(P₊ − P₋)`, an estimate of `W_ξ`.
    pub wigner_estimate: f64,
}

/// Simulates the dispersive-ancilla Ramsey sequence on `D_ξ† ρ D_ξ`:
/// `X_{π/2}`, controlled phase `e^{iΦ a†a}` with `Φ = π`, `X_{π/2}`, then an
/// ancilla measurement. `X_{π/2} = (1 + iσˣ)/√2`, so even photon parity
/// leaves the ancilla in `|1⟩`, which is reported as `z₀ = +1`.
pub fn ancilla_ramsey(rho: &DensityMatrix, xi: C64, n_pad: Option<usize>) -> Result<RamseyOutcome> {
    let n_inner = rho.dim();
    let pad = n_pad.unwrap_or_else(|| auto_padding(n_inner, xi.norm()));
    let dp = DisplacedParity::new(n_inner, pad);
    dp.check(xi.norm())?;
    let p = dp.padded_dim();
    let d = dp.displacement(xi);
    let mut rho_pad = DMatrix::<C64>::zeros(p, p);
    rho_pad.view_mut((0, 0), (n_inner, n_inner)).copy_from(rho.entries());
    let displaced = d.adjoint() * rho_pad * &d;

    // ancilla-major joint space: index = ancilla · p + photon
    let dim = 2 * p;
    let mut joint = DMatrix::<C64>::zeros(dim, dim);
    joint.view_mut((0, 0), (p, p)).copy_from(&displaced);

    let h = FRAC_1_SQRT_2;
    let mut x_half = DMatrix::<C64>::zeros(dim, dim);
    for k in 0..p {
        x_half[(k, k)] = C64::new(h, 0.0);
        x_half[(p + k, p + k)] = C64::new(h, 0.0);
        x_half[(k, p + k)] = C64::new(0.0, h);
        x_half[(p + k, k)] = C64::new(0.0, h);
    }
    let phi = PI;
    let mut cphase = DMatrix::<C64>::identity(dim, dim);
    for k in 0..p {
        cphase[(p + k, p + k)] = C64::from_polar(1.0, phi * k as f64);
    }
    let u = &x_half * cphase * &x_half;
    let out = &u * joint * u.adjoint();
    let p_plus: f64 = (0..p).map(|k| out[(p + k, p + k)].re).sum();
    let p_minus: f64 = (0..p).map(|k| out[(k, k)].re).sum();
    Ok(RamseyOutcome {
        p_plus,
        p_minus,
        wigner_estimate: 2.0 / PI * (p_plus - p_minus),
    })
}
