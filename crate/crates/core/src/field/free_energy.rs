use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::angular::min_h;
use super::{check_field_params, elliptic_e, golden_min};
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Per-site free energy of the pure Dicke model,
/// `F_D = ω0u²/4 − ωz(√(1 + g²u²/ωz²) − 1)`.
pub fn free_energy_dicke(u: f64, params: &ModelParams) -> f64 {
    let (w0, wz, g) = (params.omega0, params.omegaz, params.g);
    let gu = g * u;
    // ωz(√(1 + (gu/ωz)²) − 1) written without cancellation
    let spin = gu * gu / ((wz * wz + gu * gu).sqrt() + wz);
    0.25 * w0 * u * u - spin
}

/// Per-site free energy of the Dicke-Ising model at `ωz = 0`,
/// `F_DI = ω0u²/4 − (2/π)(g|u| + J) E(4g|u|J/(g|u| + J)²)`.
pub fn free_energy_dicke_ising(u: f64, params: &ModelParams) -> f64 {
    let x = params.g * u.abs();
    let j = params.j;
    let s = x + j;
    let band = if s == 0.0 {
        0.0
    } else {
        2.0 / PI * s * elliptic_e(4.0 * x * j / (s * s))
    };
    0.25 * params.omega0 * u * u - band
}

/// Magnon bands `ε±(k) = ±2√(g²u² + J² − 2Jgu cos k)` of the Ising chain in
/// the effective transverse field `gu`.
pub fn magnon_spectrum(k: f64, u: f64, params: &ModelParams) -> (f64, f64) {
    let (g, j) = (params.g, params.j);
    let gu = g * u;
    let e = 2.0 * (gu * gu + j * j - 2.0 * j * gu * k.cos()).max(0.0).sqrt();
    (e, -e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FreeEnergyModel {
    Dicke,
    DickeIsing,
    /// `ω0u²/4 + min_φ h(u, φ)` with the spin-`s` angular mean field.
    AngularMeanField,
}

impl FreeEnergyModel {
    pub fn name(self) -> &'static str {
        match self {
            FreeEnergyModel::Dicke => "dicke",
            FreeEnergyModel::DickeIsing => "dicke_ising",
            FreeEnergyModel::AngularMeanField => "angular_mean_field",
        }
    }
}

impl fmt::Display for FreeEnergyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FreeEnergyModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dicke" => Ok(FreeEnergyModel::Dicke),
            "dicke_ising" => Ok(FreeEnergyModel::DickeIsing),
            "angular_mean_field" | "angular" => Ok(FreeEnergyModel::AngularMeanField),
            other => Err(Error::InvalidParameter(format!("unknown free-energy model '{other}'"))),
        }
    }
}

/// Evaluates the chosen model at `u`.
pub fn free_energy(model: FreeEnergyModel, u: f64, params: &ModelParams) -> f64 {
    match model {
        FreeEnergyModel::Dicke => free_energy_dicke(u, params),
        FreeEnergyModel::DickeIsing => free_energy_dicke_ising(u, params),
        FreeEnergyModel::AngularMeanField => 0.25 * params.omega0 * u * u + min_h(u, params).1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    /// Only `u = 0` is a minimum.
    Normal,
    /// `u = 0` and a pair of side minima are all local minima.
    Coexistence,
    /// Side minima only.
    Superradiant,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Normal => "normal",
            Phase::Coexistence => "coexistence",
            Phase::Superradiant => "superradiant",
        }
    }
}

/// A tabulated free-energy curve with its minima.
#[derive(Debug, Clone)]
pub struct FreeEnergyProfile {
    pub model: FreeEnergyModel,
    pub params: ModelParams,
    pub u_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Local minima `(u*, F(u*))` sorted by `u*`; side minima come in `±` pairs.
    pub minima: Vec<(f64, f64)>,
    pub classification: Phase,
}

const SCAN_POINTS: usize = 4000;

impl FreeEnergyProfile {
    pub fn new(model: FreeEnergyModel, params: &ModelParams, u_grid: Vec<f64>) -> Result<Self> {
        check_field_params(params)?;
        if model == FreeEnergyModel::Dicke && !(params.omegaz > 0.0) {
            return Err(Error::InvalidParameter("the Dicke free energy needs omegaz > 0".into()));
        }
        if model == FreeEnergyModel::DickeIsing && !(params.j > 0.0) {
            return Err(Error::InvalidParameter("the Dicke-Ising free energy needs J > 0".into()));
        }
        let values = u_grid.par_iter().map(|&u| free_energy(model, u, params)).collect();
        let (side, zero_is_min) = locate_minima(model, params);
        let mut minima = Vec::new();
        for &(u, f) in &side {
            minima.push((-u, f));
            minima.push((u, f));
        }
        if zero_is_min {
            minima.push((0.0, free_energy(model, 0.0, params)));
        }
        minima.sort_by(|a, b| a.0.total_cmp(&b.0));
        let classification = match (side.is_empty(), zero_is_min) {
            (true, _) => Phase::Normal,
            (false, true) => Phase::Coexistence,
            (false, false) => Phase::Superradiant,
        };
        Ok(Self {
            model,
            params: *params,
            u_grid,
            values,
            minima,
            classification,
        })
    }

    /// Profile on `[-u_max, u_max]` with `points` samples, where `u_max`
    /// covers the side minima.
    pub fn auto(model: FreeEnergyModel, params: &ModelParams, points: usize) -> Result<Self> {
        let u_max = search_range(params);
        Self::new(model, params, crate::tomography::linspace(-u_max, u_max, points))
    }

    pub fn eval(&self, u: f64) -> f64 {
        free_energy(self.model, u, &self.params)
    }

    /// Outermost positive minimum with the lowest free energy.
    pub fn side_minimum(&self) -> Option<(f64, f64)> {
        self.minima
            .iter()
            .filter(|m| m.0 > 0.0)
            .copied()
            .min_by(|a, b| a.1.total_cmp(&b.1).then(b.0.total_cmp(&a.0)))
    }

    /// `max |F(u) − F(−u)|` over the grid.
    pub fn evenness_residual(&self) -> f64 {
        self.u_grid
            .iter()
            .map(|&u| (self.eval(u) - self.eval(-u)).abs())
            .fold(0.0, f64::max)
    }
}

/// Half-width of the `u` window searched for minima. Deep in the
/// superradiant phase the side minima sit near `4sg/ω0`.
fn search_range(params: &ModelParams) -> f64 {
    6.0 * params.spin.max(0.5) * params.g / params.omega0 + 2.0
}

/// Positive side minima (refined) and whether `u = 0` is a local minimum.
fn locate_minima(model: FreeEnergyModel, params: &ModelParams) -> (Vec<(f64, f64)>, bool) {
    let u_max = search_range(params);
    let h = u_max / SCAN_POINTS as f64;
    let f: Vec<f64> = (0..=SCAN_POINTS)
        .into_par_iter()
        .map(|i| free_energy(model, i as f64 * h, params))
        .collect();
    let zero_is_min = f[1] > f[0];
    let mut side = Vec::new();
    for i in 1..SCAN_POINTS {
        if f[i] < f[i - 1] && f[i] <= f[i + 1] {
            let lo = (i - 1) as f64 * h;
            let hi = (i + 1) as f64 * h;
            side.push(golden_min(|u| free_energy(model, u, params), lo, hi, 1e-11 * u_max));
        }
    }
    (side, zero_is_min)
}

/// Critical couplings of the two transitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalCouplings {
    /// `√(ω0 ωz / 2)`, the second-order Dicke point.
    pub g_c_dicke: f64,
    /// Coupling at which the side minima of `F_DI` become degenerate with
    /// `F_DI(0) = −J`.
    pub g_c_dicke_ising: f64,
    /// `g_c_dicke_ising / √(ω0 J)`.
    pub c0: f64,
}

const BISECTION_TOL: f64 = 1e-8;

/// Degeneracy gap `F(u*) − F(0)` of the deepest side minimum; positive when
/// no side minimum exists.
fn degeneracy_gap(params: &ModelParams) -> f64 {
    let (side, _) = locate_minima(FreeEnergyModel::DickeIsing, params);
    match side.iter().map(|m| m.1).min_by(f64::total_cmp) {
        Some(f) => f - free_energy_dicke_ising(0.0, params),
        None => 1.0,
    }
}

/// Analytic Dicke point plus the first-order Dicke-Ising point located by
/// bisection on the Maxwell degeneracy of the minima.
pub fn critical_couplings(params: &ModelParams) -> Result<CriticalCouplings> {
    check_field_params(params)?;
    if !(params.j > 0.0) {
        return Err(Error::InvalidParameter("critical couplings need J > 0".into()));
    }
    let scale = (params.omega0 * params.j).sqrt();
    let at = |g: f64| degeneracy_gap(&ModelParams { g, ..*params });
    let mut hi = scale;
    let mut tries = 0;
    while at(hi) >= 0.0 {
        hi *= 2.0;
        tries += 1;
        if tries > 20 {
            return Err(Error::NoCoexistence("side minima never undercut F(0)".into()));
        }
    }
    let mut lo = 0.5 * hi;
    tries = 0;
    while at(lo) < 0.0 {
        lo *= 0.5;
        tries += 1;
        if tries > 40 {
            return Err(Error::NoCoexistence("no normal-phase coupling found".into()));
        }
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if at(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let g_c = 0.5 * (lo + hi);
    let at_transition = ModelParams { g: g_c, ..*params };
    if locate_minima(FreeEnergyModel::DickeIsing, &at_transition).0.is_empty()
        || !locate_minima(FreeEnergyModel::DickeIsing, &at_transition).1
    {
        return Err(Error::NoCoexistence(format!(
            "no metastable normal minimum at g = {g_c}; the transition is not first order"
        )));
    }
    Ok(CriticalCouplings {
        g_c_dicke: (params.omega0 * params.omegaz / 2.0).sqrt(),
        g_c_dicke_ising: g_c,
        c0: g_c / scale,
    })
}

/// Locates the Dicke critical coupling numerically as the sign change of
/// the finite-difference curvature `F_D″(0)`.
pub fn dicke_curvature_crossing(params: &ModelParams) -> Result<f64> {
    check_field_params(params)?;
    if !(params.omegaz > 0.0) {
        return Err(Error::InvalidParameter("the Dicke free energy needs omegaz > 0".into()));
    }
    let h = 1e-4;
    let curvature = |g: f64| {
        let p = ModelParams { g, ..*params };
        (free_energy_dicke(h, &p) - 2.0 * free_energy_dicke(0.0, &p) + free_energy_dicke(-h, &p)) / (h * h)
    };
    let (mut lo, mut hi) = (0.0, (params.omega0 * params.omegaz).sqrt());
    while curvature(hi) > 0.0 {
        hi *= 2.0;
    }
    while hi - lo > 1e-13 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if curvature(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
