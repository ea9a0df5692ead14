//! Imaginary-time tunnelling trajectory between the side minima `±u0`.
//!
//! The trajectory obeys the conservation law `u̇² = 4ω0 ΔF(u)` with
//! `ΔF(u) = F(u) − F(u0)`, so `τ(u) = ∫₀^u du′ / √(4ω0 ΔF(u′))` with the
//! midpoint `u(0) = 0`. The integral is computed in `w = −ln(u0 − u)`,
//! where the quadratic-minimum divergence becomes a constant integrand
//! `1/λ`, `λ = √(2ω0 F″(u0))`. Beyond `u0 − u < δ` the logarithmic
//! asymptote is spliced in analytically.

use rayon::prelude::*;

use super::free_energy::{FreeEnergyModel, FreeEnergyProfile};
use super::gl_integrate;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct InstantonSolution {
    /// Uniform imaginary-time grid, symmetric about 0.
    pub tau_grid: Vec<f64>,
    pub u_of_tau: Vec<f64>,
    pub u0: f64,
    /// `∫_{−u0}^{u0} √(ΔF/ω0) du`, per site.
    pub action: f64,
    /// `(τ, u)` where the trajectory crosses `u = ±J/g` (Dicke-Ising only).
    pub crossings: Vec<(f64, f64)>,
    /// Largest `|−u̇²/(4ω0) + ΔF(u)|` along the sampled trajectory, with
    /// `u̇` from fourth-order central differences.
    pub energy_residual: f64,
    /// Exponential approach rate to `±u0`.
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstantonOptions {
    /// Number of samples on the τ grid (made odd so that τ = 0 is sampled).
    pub n_tau: usize,
    /// Relative distance `(u0 − |u|)/u0` at the ends of the τ grid.
    pub edge: f64,
    /// Relative distance `(u0 − u)/u0` below which the log asymptote is used.
    pub splice: f64,
}

impl Default for InstantonOptions {
    fn default() -> Self {
        Self {
            n_tau: 8001,
            edge: 1e-6,
            splice: 1e-4,
        }
    }
}

pub fn instanton(profile: &FreeEnergyProfile) -> Result<InstantonSolution> {
    instanton_with(profile, &InstantonOptions::default())
}

/// Cumulative `τ(w)` table on panels in `w = −ln(u0 − u)`.
struct TauTable<'a> {
    profile: &'a FreeEnergyProfile,
    u0: f64,
    f0: f64,
    edges: Vec<f64>,
    cumulative: Vec<f64>,
    lambda: f64,
}

impl TauTable<'_> {
    fn delta_f(&self, u: f64) -> f64 {
        self.profile.eval(u) - self.f0
    }

    fn integrand(&self, w: f64) -> f64 {
        let eps = (-w).exp();
        let df = self.delta_f(self.u0 - eps);
        eps / (4.0 * self.profile.params.omega0 * df).sqrt()
    }

    fn w_of_u(&self, u: f64) -> f64 {
        -(self.u0 - u).ln()
    }

    fn u_of_w(&self, w: f64) -> f64 {
        self.u0 - (-w).exp()
    }

    /// `τ` at `w ≥ edges[0]`.
    fn tau(&self, w: f64) -> f64 {
        let last = *self.edges.last().expect("panels");
        if w >= last {
            return self.cumulative[self.cumulative.len() - 1] + (w - last) / self.lambda;
        }
        let i = self.edges.partition_point(|&e| e <= w).saturating_sub(1);
        self.cumulative[i] + gl_integrate(self.edges[i], w, |x| self.integrand(x))
    }

    /// Inverse of [`Self::tau`] for `τ ≥ 0`.
    fn w_at(&self, tau: f64) -> f64 {
        let last = *self.edges.last().expect("panels");
        let t_last = self.cumulative[self.cumulative.len() - 1];
        if tau >= t_last {
            return last + (tau - t_last) * self.lambda;
        }
        let i = self.cumulative.partition_point(|&t| t <= tau).saturating_sub(1);
        let (lo, hi) = (self.edges[i], self.edges[i + 1]);
        let (t_lo, t_hi) = (self.cumulative[i], self.cumulative[i + 1]);
        let mut w = lo + (hi - lo) * (tau - t_lo) / (t_hi - t_lo);
        for _ in 0..50 {
            let step = (self.tau(w) - tau) / self.integrand(w);
            let next = (w - step).clamp(lo, hi);
            if (next - w).abs() <= 1e-15 * (1.0 + w.abs()) {
                return next;
            }
            w = next;
        }
        w
    }
}

/// Panel edges in `w`, graded geometrically towards an interior kink.
fn panel_edges(w_start: f64, w_end: f64, kink: Option<f64>) -> Vec<f64> {
    let mut edges = Vec::new();
    let width = 0.25;
    let n = ((w_end - w_start) / width).ceil().max(1.0) as usize;
    for i in 0..=n {
        edges.push(w_start + (w_end - w_start) * i as f64 / n as f64);
    }
    if let Some(k) = kink.filter(|&k| k > w_start && k < w_end) {
        edges.push(k);
        for level in 1..=30 {
            let d = width * 0.5f64.powi(level);
            for e in [k - d, k + d] {
                if e > w_start && e < w_end {
                    edges.push(e);
                }
            }
        }
    }
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    edges
}

pub fn instanton_with(profile: &FreeEnergyProfile, opts: &InstantonOptions) -> Result<InstantonSolution> {
    let params = &profile.params;
    let omega0 = params.omega0;
    let (u0, f0) = profile
        .side_minimum()
        .ok_or_else(|| Error::NotSuperradiant("no side minima".into()))?;
    let f_origin = profile.eval(0.0);
    let barrier = f_origin - f0;
    if barrier <= 1e-12 * (1.0 + f0.abs()) {
        return Err(Error::NotSuperradiant(format!(
            "F(0) − F(u0) = {barrier:.3e}; side minima are not below the origin"
        )));
    }

    let h = 1e-4 * u0;
    let curvature = (profile.eval(u0 + h) - 2.0 * f0 + profile.eval(u0 - h)) / (h * h);
    if !(curvature > 0.0) {
        return Err(Error::NotSuperradiant(format!("F″(u0) = {curvature:.3e} is not positive")));
    }
    let lambda = (2.0 * omega0 * curvature).sqrt();

    let kink = match profile.model {
        FreeEnergyModel::DickeIsing if params.g > 0.0 => Some(params.j / params.g),
        _ => None,
    };
    let w_start = -u0.ln();
    let w_end = -(opts.splice * u0).ln();
    let mut table = TauTable {
        profile,
        u0,
        f0,
        edges: panel_edges(w_start, w_end, kink.filter(|&k| k < u0).map(|k| -(u0 - k).ln())),
        cumulative: Vec::new(),
        lambda,
    };

    let pieces: Vec<Result<f64>> = table
        .edges
        .par_windows(2)
        .map(|win| {
            let mut bad = None;
            let v = gl_integrate(win[0], win[1], |w| {
                let eps = (-w).exp();
                let df = table.delta_f(u0 - eps);
                if !(df > 0.0) {
                    bad = Some(u0 - eps);
                    return 0.0;
                }
                eps / (4.0 * omega0 * df).sqrt()
            });
            match bad {
                Some(u) => Err(Error::NotSuperradiant(format!("F(u) < F(u0) at u = {u}"))),
                None => Ok(v),
            }
        })
        .collect();
    let mut cumulative = vec![0.0];
    for p in pieces {
        let last = *cumulative.last().expect("nonempty");
        cumulative.push(last + p?);
    }
    table.cumulative = cumulative;

    let tau_max = table.tau(table.w_of_u(u0 - opts.edge * u0));
    let n = opts.n_tau.max(9) | 1;
    let half = n / 2;
    let dt = tau_max / half as f64;
    let tau_grid: Vec<f64> = (0..n).map(|i| (i as f64 - half as f64) * dt).collect();
    let positive: Vec<f64> = (0..=half)
        .into_par_iter()
        .map(|i| if i == 0 { 0.0 } else { table.u_of_w(table.w_at(i as f64 * dt)) })
        .collect();
    let u_of_tau: Vec<f64> = (0..n)
        .map(|i| {
            if i >= half {
                positive[i - half]
            } else {
                -positive[half - i]
            }
        })
        .collect();

    let energy_residual = (2..n - 2)
        .into_par_iter()
        .map(|i| {
            let ud = (u_of_tau[i - 2] - 8.0 * u_of_tau[i - 1] + 8.0 * u_of_tau[i + 1] - u_of_tau[i + 2]) / (12.0 * dt);
            (-ud * ud / (4.0 * omega0) + table.delta_f(u_of_tau[i])).abs()
        })
        .reduce(|| 0.0, f64::max);

    let action = 2.0
        * panel_edges(0.0, u0, kink.filter(|&k| k < u0))
            .windows(2)
            .map(|win| gl_integrate(win[0], win[1], |u| (table.delta_f(u).max(0.0) / omega0).sqrt()))
            .sum::<f64>();

    let crossings = match kink.filter(|&k| k < u0) {
        Some(k) => {
            let t = table.tau(table.w_of_u(k));
            vec![(-t, -k), (t, k)]
        }
        None => Vec::new(),
    };

    Ok(InstantonSolution {
        tau_grid,
        u_of_tau,
        u0,
        action,
        crossings,
        energy_residual,
        lambda,
    })
}
