use std::f64::consts::PI;

use dicke_cat::model::coherent_amplitudes;
use dicke_cat::tomography::{
    ancilla_ramsey, auto_padding, displacement_op, linspace, marginal_w, wigner_direct, wigner_displaced_parity, xi_from_xp,
    DisplacedParity, PhaseGrid,
};
use dicke_cat::{DensityMatrix, QuantumState, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fock(n: usize, dim: usize) -> DensityMatrix {
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    m[(n, n)] = C64::new(1.0, 0.0);
    DensityMatrix::new(m).unwrap()
}

fn random_density(dim: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(dim, dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let m = &g * g.adjoint();
    let tr: C64 = (0..dim).map(|i| m[(i, i)]).sum();
    DensityMatrix::new(m / tr).unwrap()
}

#[test]
fn vacuum_is_a_gaussian() {
    let grid = PhaseGrid::square(3.0, 13);
    let w = wigner_direct(&fock(0, 4), &grid);
    for (i, &x) in grid.x.iter().enumerate() {
        for (j, &p) in grid.p.iter().enumerate() {
            let expect = (-x * x - p * p).exp() / PI;
            assert!((w.values[(i, j)] - expect).abs() <= 1e-12);
        }
    }
    assert!(w.imag_residue <= 1e-10);
}

#[test]
fn single_photon_is_negative_at_the_origin() {
    let grid = PhaseGrid { x: vec![0.0], p: vec![0.0] };
    let w = wigner_direct(&fock(1, 3), &grid);
    assert!((w.values[(0, 0)] + 1.0 / PI).abs() < 1e-14);
    let dp = wigner_displaced_parity(&fock(1, 3), &grid, Some(20)).unwrap();
    assert!((dp.values[(0, 0)] + 1.0 / PI).abs() < 1e-12);
}

#[test]
fn default_grid_normalization() {
    let rho = random_density(8, 4);
    let w = wigner_direct(&rho, &PhaseGrid::default());
    assert!((w.quadrature_integral - 1.0).abs() < 1e-3);
    assert!(!w.extent_warning);
}

#[test]
fn parseval_identity_witnesses_purity() {
    for (rho, label) in [(fock(3, 6), "fock"), (random_density(5, 9), "mixed")] {
        let w = wigner_direct(&rho, &PhaseGrid::default());
        let purity = rho.purity();
        let lhs = w.square_integral();
        assert!((lhs - purity / (2.0 * PI)).abs() < 1e-6, "{label}: {lhs} vs {}", purity / (2.0 * PI));
    }
}

#[test]
fn momentum_integral_gives_the_position_marginal() {
    let rho = random_density(7, 21);
    let grid = PhaseGrid::square(7.0, 141);
    let w = wigner_direct(&rho, &grid);
    let from_w = grid.integrate_p(&w.values);
    let direct = marginal_w(&rho, &grid.x);
    let worst = from_w.iter().zip(&direct).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-6, "{worst}");
}

#[test]
fn vacuum_marginal_and_normalization() {
    let x = linspace(-6.0, 6.0, 241);
    let w = marginal_w(&fock(0, 21), &x);
    for (xi, wi) in x.iter().zip(&w) {
        assert!((wi - (-xi * xi).exp() / PI.sqrt()).abs() < 1e-14);
    }
    let rho = random_density(8, 8);
    let w = marginal_w(&rho, &x);
    let h = x[1] - x[0];
    let integral: f64 = w.iter().sum::<f64>() * h - 0.5 * h * (w[0] + w[w.len() - 1]);
    assert!((integral - 1.0).abs() < 1e-6);
}

#[test]
fn displacement_properties() {
    let n = 12;
    let id = displacement_op(C64::new(0.0, 0.0), n, 20).unwrap();
    assert!((id - DMatrix::<C64>::identity(n + 20, n + 20)).camax() < 1e-12);

    let xi = C64::new(1.2, -0.7);
    let pad = auto_padding(n, xi.norm());
    let d = displacement_op(xi, n, pad).unwrap();
    let back = displacement_op(-xi, n, pad).unwrap();
    let prod = &d * &back;
    let inner = prod.view((0, 0), (n, n));
    assert!((inner - DMatrix::<C64>::identity(n, n)).camax() <= 1e-8);

    let (coherent, _) = coherent_amplitudes(xi, n + pad - 1);
    for k in 0..n + pad {
        assert!((d[(k, 0)] - coherent[k]).norm() < 1e-8, "level {k}");
    }
}

#[test]
fn padding_covers_three_units_of_displacement() {
    // twenty extra levels cannot hold |20⟩ displaced by three units; the
    // automatic padding can
    assert!(DisplacedParity::new(21, 20).check(3.0).is_err());
    let dp = DisplacedParity::new(21, auto_padding(21, 3.0));
    assert!(dp.check(3.0).unwrap() <= 1e-8);
}

#[test]
fn ramsey_reads_photon_parity() {
    let origin = C64::new(0.0, 0.0);
    let vac = ancilla_ramsey(&fock(0, 4), origin, Some(20)).unwrap();
    assert!((vac.p_plus - 1.0).abs() < 1e-12);
    let one = ancilla_ramsey(&fock(1, 4), origin, Some(20)).unwrap();
    assert!(one.p_plus.abs() < 1e-12);
    assert!((one.wigner_estimate + 2.0 / PI).abs() < 1e-12);
}

#[test]
fn ramsey_estimate_matches_displaced_parity() {
    let rho = random_density(6, 17);
    let pad = auto_padding(6, 2.5);
    let dp = DisplacedParity::new(6, pad);
    for (x, p) in [(0.3, -0.4), (1.5, 0.2), (-2.0, 1.0)] {
        let xi = xi_from_xp(x, p);
        let ramsey = ancilla_ramsey(&rho, xi, Some(pad)).unwrap();
        assert!((ramsey.wigner_estimate - dp.w_xi(rho.entries(), xi)).abs() <= 1e-8);
        assert!((ramsey.p_plus + ramsey.p_minus - 1.0).abs() < 1e-12);
    }
}

#[test]
fn wigner_is_linear_in_the_state() {
    let a = random_density(6, 1);
    let b = random_density(6, 2);
    let grid = PhaseGrid::square(4.0, 31);
    let sum = wigner_direct(&a.add(&b), &grid);
    let wa = wigner_direct(&a, &grid);
    let wb = wigner_direct(&b, &grid);
    assert!((sum.values - (wa.values + wb.values)).amax() <= 1e-12);
}

#[test]
fn coherent_state_wigner_is_a_shifted_gaussian() {
    let alpha = C64::new(1.0, 0.5);
    let (amps, _) = coherent_amplitudes(alpha, 30);
    let rho = DensityMatrix::from_pure(&QuantumState::new(amps));
    let grid = PhaseGrid::square(4.0, 17);
    let w = wigner_direct(&rho, &grid);
    let (x0, p0) = (2f64.sqrt() * alpha.re, 2f64.sqrt() * alpha.im);
    for (i, &x) in grid.x.iter().enumerate() {
        for (j, &p) in grid.p.iter().enumerate() {
            let expect = (-(x - x0).powi(2) - (p - p0).powi(2)).exp() / PI;
            assert!((w.values[(i, j)] - expect).abs() < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn both_routes_agree_on_random_states(seed in any::<u64>()) {
        let rho = random_density(4, seed);
        let grid = PhaseGrid::square(2.0, 5);
        let direct = wigner_direct(&rho, &grid);
        let parity = wigner_displaced_parity(&rho, &grid, None).unwrap();
        prop_assert!((direct.values - parity.values).amax() <= 1e-8);
    }

    #[test]
    fn hermitian_inputs_give_real_fields(seed in any::<u64>(), dim in 2usize..9) {
        let rho = random_density(dim, seed);
        let w = wigner_direct(&rho, &PhaseGrid::square(3.0, 9));
        prop_assert!(w.imag_residue <= 1e-10);
        prop_assert!(w.values.iter().all(|v| v.abs() <= 1.0 / PI + 1e-12));
    }
}
