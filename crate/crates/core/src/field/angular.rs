//! Large-spin angular representation: each spin is a classical vector at
//! polar angle `φ` in the x-z plane, giving the per-site mean field
//! `h(u, φ) = 2s(−ωz cos φ + gu sin φ − 2sJ cos²φ)`, plus the Gaussian
//! fluctuation correction around a uniform angle.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{check_field_params, elliptic_e, safeguarded_root};
use crate::error::{Error, Result};
use crate::model::ModelParams;

pub fn h_angular(u: f64, phi: f64, params: &ModelParams) -> f64 {
    let s = params.spin;
    let c = phi.cos();
    2.0 * s * (-params.omegaz * c + params.g * u * phi.sin() - 2.0 * s * params.j * c * c)
}

/// `∂h/∂φ`.
pub fn h_angular_dphi(u: f64, phi: f64, params: &ModelParams) -> f64 {
    let s = params.spin;
    let (sn, c) = phi.sin_cos();
    2.0 * s * (params.omegaz * sn + params.g * u * c + 4.0 * s * params.j * sn * c)
}

/// `4sJ cos 2φ + ωz cos φ − gu sin φ`; equals `∂²h/∂φ² / 2s`, so positive
/// values mark local minima of `h` in `φ` and stable Gaussian fluctuations.
pub fn stability_margin(u: f64, phi: f64, params: &ModelParams) -> f64 {
    let s = params.spin;
    4.0 * s * params.j * (2.0 * phi).cos() + params.omegaz * phi.cos() - params.g * u * phi.sin()
}

fn h_dphi2(u: f64, phi: f64, params: &ModelParams) -> f64 {
    2.0 * params.spin * stability_margin(u, phi, params)
}

fn wrap(phi: f64) -> f64 {
    let mut p = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if p <= -PI {
        p += 2.0 * PI;
    }
    p
}

const PHI_SCAN: usize = 256;

/// Global minimum `(φ, h)` of `h(u, ·)` on `(−π, π]`.
pub(crate) fn min_h(u: f64, params: &ModelParams) -> (f64, f64) {
    let step = 2.0 * PI / PHI_SCAN as f64;
    let mut best = (0.0, f64::INFINITY);
    for i in 0..PHI_SCAN {
        let phi = -PI + (i + 1) as f64 * step;
        let v = h_angular(u, phi, params);
        if v < best.1 {
            best = (phi, v);
        }
    }
    match local_min_near(u, best.0, step, params) {
        Some(phi) => {
            let v = h_angular(u, phi, params);
            if v <= best.1 {
                (wrap(phi), v)
            } else {
                best
            }
        }
        None => best,
    }
}

/// Root of `∂φh` with positive curvature inside `[φ0 − width, φ0 + width]`.
fn local_min_near(u: f64, phi0: f64, width: f64, params: &ModelParams) -> Option<f64> {
    let f = |p: f64| h_angular_dphi(u, p, params);
    let df = |p: f64| h_dphi2(u, p, params);
    let (lo, hi) = (phi0 - width, phi0 + width);
    if !(f(lo) < 0.0 && f(hi) > 0.0) {
        return None;
    }
    safeguarded_root(f, df, lo, hi, 1e-15)
}

/// Stationary angle `φ̃(u)` continued from `prev`, or the global minimizer
/// when `prev` is `None`. The flag reports a lost branch: no local minimum
/// of `h` within reach of `prev`, in which case the global minimizer is
/// returned.
pub fn stationary_phi(u: f64, prev: Option<f64>, params: &ModelParams) -> (f64, bool) {
    let Some(p0) = prev else {
        return (min_h(u, params).0, false);
    };
    for width in [0.02, 0.05, 0.1, 0.2] {
        if let Some(phi) = local_min_near(u, p0, width, params) {
            return (phi, false);
        }
    }
    (min_h(u, params).0, true)
}

/// Mean-field surface over a `(u, φ)` grid with the stationary-angle
/// branch and fluctuation corrections.
#[derive(Debug, Clone)]
pub struct AngularSurface {
    pub u_grid: Vec<f64>,
    pub phi_grid: Vec<f64>,
    /// `h(u_i, φ_j)`.
    pub h_values: DMatrix<f64>,
    /// `ω0u²/4 + h`.
    pub f_mf_values: DMatrix<f64>,
    /// `φ̃(u_i)` on the branch continued from `φ̃(0) = 0` (not wrapped).
    pub stationary_phi: Vec<f64>,
    /// `F_fl(u_i, φ_j)`; `NaN` where the stability mask fails.
    pub fluct_values: DMatrix<f64>,
    pub stability_mask: DMatrix<bool>,
    /// Indices into `u_grid` where the continued branch was lost.
    pub branch_jumps: Vec<usize>,
}

impl AngularSurface {
    pub fn has_branch_jump(&self) -> bool {
        !self.branch_jumps.is_empty()
    }
}

/// Builds the surface. `φ̃` is continued outward from `u = 0` in both
/// directions, starting at `φ̃(0) = 0`.
pub fn angular_mean_field(params: &ModelParams, u_grid: Vec<f64>, phi_grid: Vec<f64>) -> Result<AngularSurface> {
    check_field_params(params)?;
    let (nu, np) = (u_grid.len(), phi_grid.len());
    let h_values = DMatrix::from_fn(nu, np, |i, j| h_angular(u_grid[i], phi_grid[j], params));
    let f_mf_values =
        DMatrix::from_fn(nu, np, |i, j| 0.25 * params.omega0 * u_grid[i] * u_grid[i] + h_values[(i, j)]);
    let stability_mask = DMatrix::from_fn(nu, np, |i, j| is_stable(u_grid[i], phi_grid[j], params));
    let fluct: Vec<f64> = (0..nu * np)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / np, idx % np);
            fluctuation_free_energy(u_grid[i], phi_grid[j], params).unwrap_or(f64::NAN)
        })
        .collect();
    let fluct_values = DMatrix::from_fn(nu, np, |i, j| fluct[i * np + j]);

    let mut order: Vec<usize> = (0..nu).collect();
    order.sort_by(|&a, &b| u_grid[a].total_cmp(&u_grid[b]));
    let split = order.partition_point(|&i| u_grid[i] < 0.0);
    let mut stationary = vec![0.0; nu];
    let mut jumps = Vec::new();
    let mut walk = |indices: &mut dyn Iterator<Item = &usize>| {
        let mut prev = 0.0;
        for &i in indices {
            let (phi, jumped) = stationary_phi(u_grid[i], Some(prev), params);
            if jumped {
                jumps.push(i);
            }
            stationary[i] = phi;
            prev = phi;
        }
    };
    walk(&mut order[split..].iter());
    walk(&mut order[..split].iter().rev());
    jumps.sort_unstable();

    Ok(AngularSurface {
        u_grid,
        phi_grid,
        h_values,
        f_mf_values,
        stationary_phi: stationary,
        fluct_values,
        stability_mask,
        branch_jumps: jumps,
    })
}

/// `(A, c)` with `A = 4Js²cos²φ − h` and `B_k = A − c cos k`,
/// `c = 8Js² sin²φ`.
pub fn fluctuation_amplitudes(u: f64, phi: f64, params: &ModelParams) -> (f64, f64) {
    let s = params.spin;
    let (sn, cs) = phi.sin_cos();
    let a = 4.0 * params.j * s * s * cs * cs - h_angular(u, phi, params);
    let c = 8.0 * params.j * s * s * sn * sn;
    (a, c)
}

fn is_stable(u: f64, phi: f64, params: &ModelParams) -> bool {
    let (a, _) = fluctuation_amplitudes(u, phi, params);
    stability_margin(u, phi, params) > 0.0 && a > 0.0
}

/// `F_fl = (1/πs) √(A(A + c)) E(2c/(A + c))`, the Gaussian fluctuation free
/// energy per site. Fails outside the stable region.
pub fn fluctuation_free_energy(u: f64, phi: f64, params: &ModelParams) -> Result<f64> {
    if !is_stable(u, phi, params) {
        return Err(Error::UnstableFluctuations { u, phi });
    }
    let (a, c) = fluctuation_amplitudes(u, phi, params);
    let s = params.spin;
    Ok((a * (a + c)).sqrt() * elliptic_e(2.0 * c / (a + c)) / (PI * s))
}

/// Fluctuation corrections along the stationary branch of a surface.
#[derive(Debug, Clone)]
pub struct FluctuationReport {
    /// `F_fl(u_i, φ̃(u_i))`, `None` where unstable.
    pub branch_values: Vec<Option<f64>>,
    /// `F_mf + F_fl` along the branch, `None` where unstable.
    pub corrected: Vec<Option<f64>>,
    /// Fraction of grid points passing the stability mask.
    pub stable_fraction: f64,
    /// `max |F_fl| / max |F_mf|` over the stable grid points.
    pub max_ratio: f64,
}

pub fn fluctuations(surface: &AngularSurface, params: &ModelParams) -> Result<FluctuationReport> {
    check_field_params(params)?;
    let nu = surface.u_grid.len();
    crate::linalg::check_dim(nu, surface.stationary_phi.len())?;
    let mut branch_values = Vec::with_capacity(nu);
    let mut corrected = Vec::with_capacity(nu);
    for (&u, &phi) in surface.u_grid.iter().zip(&surface.stationary_phi) {
        let fl = fluctuation_free_energy(u, phi, params).ok();
        let mf = 0.25 * params.omega0 * u * u + h_angular(u, phi, params);
        branch_values.push(fl);
        corrected.push(fl.map(|v| v + mf));
    }
    let total = surface.stability_mask.len();
    let stable = surface.stability_mask.iter().filter(|&&b| b).count();
    let (mut fl_max, mut mf_max) = (0.0f64, 0.0f64);
    for (idx, &ok) in surface.stability_mask.iter().enumerate() {
        if ok {
            fl_max = fl_max.max(surface.fluct_values[idx].abs());
            mf_max = mf_max.max(surface.f_mf_values[idx].abs());
        }
    }
    Ok(FluctuationReport {
        branch_values,
        corrected,
        stable_fraction: if total == 0 { 0.0 } else { stable as f64 / total as f64 },
        max_ratio: if mf_max > 0.0 { fl_max / mf_max } else { 0.0 },
    })
}
