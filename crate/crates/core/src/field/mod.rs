//! Mean-field and Gaussian-fluctuation analysis of the Dicke-Ising model in
//! the thermodynamic limit.
//!
//! The photon quadrature enters through the order parameter `u`, with
//! `x̂ = √(N/2) u`. All free energies are per site.

mod angular;
mod free_energy;
mod instanton;

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};
use crate::model::ModelParams;

pub use angular::{
    angular_mean_field, fluctuation_amplitudes, fluctuation_free_energy, fluctuations, h_angular, h_angular_dphi,
    stability_margin, stationary_phi, AngularSurface, FluctuationReport,
};
pub use free_energy::{
    critical_couplings, dicke_curvature_crossing, free_energy, free_energy_dicke, free_energy_dicke_ising,
    magnon_spectrum, CriticalCouplings, FreeEnergyModel, FreeEnergyProfile, Phase,
};
pub use instanton::{instanton, instanton_with, InstantonOptions, InstantonSolution};

/// Complete elliptic integral of the second kind in the parameter
/// convention, `E(m) = ∫₀^{π/2} √(1 − m sin²θ) dθ`, by the
/// arithmetic-geometric mean.
///
/// # Panics
///
/// If `m` lies outside `[0, 1]` by more than rounding.
pub fn elliptic_e(m: f64) -> f64 {
    assert!(
        (-1e-12..=1.0 + 1e-12).contains(&m),
        "elliptic parameter {m} outside [0, 1]"
    );
    let m = m.clamp(0.0, 1.0);
    if m == 1.0 {
        return 1.0;
    }
    if m == 0.0 {
        return PI / 2.0;
    }
    let (mut a, mut b) = (1.0f64, (1.0 - m).sqrt());
    let mut weight = 0.5;
    let mut sum = 0.5 * m;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
        weight *= 2.0;
        sum += weight * c * c;
        if c.abs() <= 1e-15 * a {
            break;
        }
    }
    PI / (2.0 * a) * (1.0 - sum)
}

/// Truncated product `Π_{n=1}^{terms} (1 + x²/n²)`, accumulated in logs.
pub fn matsubara_product(x: f64, terms: usize) -> f64 {
    let x2 = x * x;
    (1..=terms).map(|n| (x2 / (n * n) as f64).ln_1p()).sum::<f64>().exp()
}

/// Truncated product with the omitted tail `Σ_{n>terms} ln(1 + x²/n²)`
/// restored by its midpoint integral, which converges to `sinh(πx)/(πx)`
/// far faster than the bare product (whose relative error is about
/// `x²/terms`).
pub fn matsubara_product_corrected(x: f64, terms: usize) -> f64 {
    let x = x.abs();
    if x == 0.0 {
        return 1.0;
    }
    let m = terms as f64 + 0.5;
    let tail = PI * x - m * (x * x / (m * m)).ln_1p() - 2.0 * x * (m / x).atan();
    let x2 = x * x;
    let head: f64 = (1..=terms).map(|n| (x2 / (n * n) as f64).ln_1p()).sum();
    (head + tail).exp()
}

/// `sinh(π|x|)/(π|x|)`, the limit of [`matsubara_product`].
pub fn matsubara_limit(x: f64) -> f64 {
    let y = PI * x.abs();
    if y < 1e-8 {
        1.0 + y * y / 6.0
    } else {
        y.sinh() / y
    }
}

fn check_field_params(params: &ModelParams) -> Result<()> {
    if !(params.omega0 > 0.0) || !params.omega0.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "omega0 must be positive, got {}",
            params.omega0
        )));
    }
    for (name, v) in [("omegaz", params.omegaz), ("J", params.j), ("g", params.g)] {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::InvalidParameter(format!("{name} must be non-negative, got {v}")));
        }
    }
    if !(params.spin >= 0.5) {
        return Err(Error::InvalidParameter(format!("spin must be at least 1/2, got {}", params.spin)));
    }
    Ok(())
}

fn gauss_legendre() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(20).expect("nonzero degree")))
}

/// 20-point Gauss-Legendre integral over `[a, b]`.
pub(crate) fn gl_integrate<F: FnMut(f64) -> f64>(a: f64, b: f64, f: F) -> f64 {
    gauss_legendre().integrate(a, b, f)
}

/// Golden-section minimization on `[a, b]`.
pub(crate) fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Newton iteration kept inside a sign-changing bracket, falling back to
/// bisection whenever a step would leave it.
pub(crate) fn safeguarded_root<F, D>(f: F, df: D, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    let rising = flo < 0.0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return Some(x);
        }
        if (fx < 0.0) == rising {
            lo = x;
        } else {
            hi = x;
        }
        let d = df(x);
        let newton = x - fx / d;
        let next = if d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= tol || (hi - lo).abs() <= tol {
            return Some(next);
        }
        x = next;
    }
    Some(x)
}
