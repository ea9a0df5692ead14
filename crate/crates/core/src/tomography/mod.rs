//! Phase-space tomography of the photon mode.
//!
//! Two independent Wigner routes are provided:
//!
//! * [`wigner_direct`] sums closed-form Fock-basis kernels (Laguerre form of
//!   the oscillator overlap integrals) and works in the quadratures
//!   `x = (a + a†)/√2`, `p = i(a† − a)/√2`, normalized so that
//!   `∬ W dx dp = tr ρ`.
//! * [`wigner_displaced_parity`] evaluates `W_ξ = (2/π) tr(Π D_ξ† ρ D_ξ)` with
//!   the displacement obtained by exponentiating the truncated generator on a
//!   padded Fock space.
//!
//! The two are bridged by `ξ = (x + ip)/√2` and `W(x, p) = W_ξ / 2`: matching
//! the vacuum Gaussians `e^{−x²−p²}/π` and `(2/π)e^{−2|ξ|²}` fixes both the
//! scale of `ξ` and the factor of two (the `ξ`-plane measure is `dx dp / 2`).

mod displacement;
mod wigner;

pub use displacement::{
    ancilla_ramsey, auto_padding, displacement_op, wigner_displaced_parity, DisplacedParity, PADDING_TOL,
    RamseyOutcome, DEFAULT_PADDING,
};
pub use wigner::{marginal_w, oscillator_functions, wigner_direct, PhaseGrid, WignerField};

/// `n` evenly spaced points on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Maps phase-space coordinates to the displacement amplitude.
pub fn xi_from_xp(x: f64, p: f64) -> crate::C64 {
    crate::C64::new(x, p) * std::f64::consts::FRAC_1_SQRT_2
}
