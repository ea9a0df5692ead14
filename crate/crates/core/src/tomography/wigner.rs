use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::linalg::{C64, ZERO};
use crate::state::DensityMatrix;

/// Rectangular phase-space grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl Default for PhaseGrid {
    fn default() -> Self {
        Self::square(6.0, 121)
    }
}

impl PhaseGrid {
    /// `[-extent, extent]²` with `n` points per axis.
    pub fn square(extent: f64, n: usize) -> Self {
        let axis = super::linspace(-extent, extent, n);
        Self { x: axis.clone(), p: axis }
    }

    fn cell(axis: &[f64]) -> f64 {
        if axis.len() > 1 {
            (axis[axis.len() - 1] - axis[0]) / (axis.len() - 1) as f64
        } else {
            0.0
        }
    }

    /// Trapezoidal quadrature of `values` (rows `x`, columns `p`).
    pub fn integrate(&self, values: &DMatrix<f64>) -> f64 {
        let (hx, hp) = (Self::cell(&self.x), Self::cell(&self.p));
        let (nx, np) = (self.x.len(), self.p.len());
        let mut total = 0.0;
        for i in 0..nx {
            let wx = if i == 0 || i + 1 == nx { 0.5 } else { 1.0 };
            for j in 0..np {
                let wp = if j == 0 || j + 1 == np { 0.5 } else { 1.0 };
                total += wx * wp * values[(i, j)];
            }
        }
        total * hx * hp
    }

    /// Trapezoidal integral over `p` for each row.
    pub fn integrate_p(&self, values: &DMatrix<f64>) -> Vec<f64> {
        let hp = Self::cell(&self.p);
        let np = self.p.len();
        (0..self.x.len())
            .map(|i| {
                (0..np)
                    .map(|j| if j == 0 || j + 1 == np { 0.5 } else { 1.0 } * values[(i, j)])
                    .sum::<f64>()
                    * hp
            })
            .collect()
    }
}

/// Sampled Wigner function with its normalization and negativity summary.
#[derive(Debug, Clone)]
pub struct WignerField {
    pub x_grid: Vec<f64>,
    pub p_grid: Vec<f64>,
    /// Rows index `x_grid`, columns index `p_grid`.
    pub values: DMatrix<f64>,
    pub trace_in: f64,
    pub min_value: f64,
    pub min_location: (f64, f64),
    pub quadrature_integral: f64,
    /// Largest imaginary part discarded when taking the real part.
    pub imag_residue: f64,
    /// Set when the grid captures less than `1 − 1e−4` of the input trace.
    pub extent_warning: bool,
}

impl WignerField {
    pub(crate) fn assemble(grid: &PhaseGrid, values: DMatrix<f64>, trace_in: f64, imag_residue: f64) -> Self {
        let mut min_value = f64::INFINITY;
        let mut min_location = (f64::NAN, f64::NAN);
        for (i, &x) in grid.x.iter().enumerate() {
            for (j, &p) in grid.p.iter().enumerate() {
                if values[(i, j)] < min_value {
                    min_value = values[(i, j)];
                    min_location = (x, p);
                }
            }
        }
        let quadrature_integral = grid.integrate(&values);
        let extent_warning = (quadrature_integral - trace_in).abs() > 1e-4 * trace_in.abs().max(1e-300);
        Self {
            x_grid: grid.x.clone(),
            p_grid: grid.p.clone(),
            values,
            trace_in,
            min_value,
            min_location,
            quadrature_integral,
            imag_residue,
            extent_warning,
        }
    }

    pub fn grid(&self) -> PhaseGrid {
        PhaseGrid {
            x: self.x_grid.clone(),
            p: self.p_grid.clone(),
        }
    }

    /// Same field divided by the input trace, so projected states can be
    /// compared on a common scale.
    pub fn renormalized(&self) -> Self {
        let mut out = self.clone();
        if self.trace_in != 0.0 {
            let s = 1.0 / self.trace_in;
            out.values *= s;
            out.min_value *= s;
            out.quadrature_integral *= s;
            out.trace_in = 1.0;
        }
        out
    }

    /// `∬ W² dx dp` on the grid.
    pub fn square_integral(&self) -> f64 {
        self.grid().integrate(&self.values.map(|w| w * w))
    }
}

/// Normalized Laguerre table `ℓ̃_n^{(k)}(y) = √(n! k!/(n+k)!) L_n^{(k)}(y)`
/// for `n + k ≤ n_top`, indexed `[k][n]`.
fn scaled_laguerre(n_top: usize, y: f64) -> Vec<Vec<f64>> {
    (0..=n_top)
        .map(|k| {
            let len = n_top - k + 1;
            let kf = k as f64;
            let mut l = vec![0.0; len];
            l[0] = 1.0;
            if len > 1 {
                l[1] = (1.0 + kf - y) / (kf + 1.0).sqrt();
            }
            for n in 1..len.saturating_sub(1) {
                let nf = n as f64;
                l[n + 1] = ((2.0 * nf + 1.0 + kf - y) * l[n] - (nf * (nf + kf)).sqrt() * l[n - 1])
                    / ((nf + 1.0) * (nf + kf + 1.0)).sqrt();
            }
            l
        })
        .collect()
}

fn ln_factorial(k: usize) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

/// Complex Wigner value at one point. Off-diagonal kernels use
/// `W_{|n+k⟩⟨n|} = ((−1)^n/π) ℓ̃_n^{(k)}(2r²) (2r²)^{k/2} e^{−r²} e^{−ikθ}/√(k!)`.
fn wigner_point(rho: &DMatrix<C64>, x: f64, p: f64) -> C64 {
    let dim = rho.nrows();
    let n_top = dim - 1;
    let r2 = x * x + p * p;
    let y = 2.0 * r2;
    let theta = p.atan2(x);
    let lag = scaled_laguerre(n_top, y);
    let mut total = ZERO;
    for (k, row) in lag.iter().enumerate() {
        let amp = if k == 0 {
            (-r2).exp()
        } else if y == 0.0 {
            0.0
        } else {
            (-r2 + 0.5 * k as f64 * y.ln() - 0.5 * ln_factorial(k)).exp()
        };
        if amp == 0.0 {
            continue;
        }
        // kernel for |n+k⟩⟨n| carries e^{−ikθ}
        let phase = C64::from_polar(1.0, -(k as f64) * theta);
        let mut acc = ZERO;
        for (n, &l) in row.iter().enumerate() {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let m = n + k;
            if k == 0 {
                acc += rho[(n, n)] * (sign * l);
            } else {
                // ρ = Σ ρ_ab |a⟩⟨b|: |m⟩⟨n| carries ρ_mn, its conjugate kernel ρ_nm
                let kern = phase * (sign * l);
                acc += rho[(m, n)] * kern + rho[(n, m)] * kern.conj();
            }
        }
        total += acc * amp;
    }
    total / PI
}

/// Wigner function by the closed-form Fock kernels; see the module docs for
/// the quadrature convention.
pub fn wigner_direct(rho: &DensityMatrix, grid: &PhaseGrid) -> WignerField {
    let m = rho.entries();
    let np = grid.p.len();
    let points: Vec<C64> = (0..grid.x.len() * np)
        .into_par_iter()
        .map(|idx| wigner_point(m, grid.x[idx / np], grid.p[idx % np]))
        .collect();
    let imag = points.iter().map(|w| w.im.abs()).fold(0.0, f64::max);
    let values = DMatrix::from_fn(grid.x.len(), np, |i, j| points[i * np + j].re);
    WignerField::assemble(grid, values, rho.trace(), imag)
}

/// Orthonormal oscillator eigenfunctions `ψ_0..ψ_{n_top}` at `x`.
pub fn oscillator_functions(n_top: usize, x: f64) -> Vec<f64> {
    let mut psi = vec![0.0; n_top + 1];
    psi[0] = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if n_top >= 1 {
        psi[1] = std::f64::consts::SQRT_2 * x * psi[0];
    }
    for n in 1..n_top {
        let nf = n as f64;
        psi[n + 1] = (2.0 / (nf + 1.0)).sqrt() * x * psi[n] - (nf / (nf + 1.0)).sqrt() * psi[n - 1];
    }
    psi
}

/// Position marginal `w(x) = Σ ρ_nm ψ_n(x) ψ_m(x)`.
pub fn marginal_w(rho: &DensityMatrix, x_grid: &[f64]) -> Vec<f64> {
    let m = rho.entries();
    let dim = m.nrows();
    x_grid
        .iter()
        .map(|&x| {
            let psi = oscillator_functions(dim - 1, x);
            let mut w = 0.0;
            for a in 0..dim {
                w += m[(a, a)].re * psi[a] * psi[a];
                for b in a + 1..dim {
                    w += 2.0 * m[(a, b)].re * psi[a] * psi[b];
                }
            }
            w
        })
        .collect()
}
