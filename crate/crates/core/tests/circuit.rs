use std::f64::consts::PI;

use dicke_cat::circuit::{
    apply_gates, dicke_gate, dicke_ising_gate, gate_count, materialize, parity_readout, rabi_gate, trotter_evolve,
    Architecture, CircuitSchedule, GateKind, GateRecord,
};
use dicke_cat::linalg::{expm_hermitian, operator_norm, unitarity_residual};
use dicke_cat::model::{self, hamiltonian, parity_projector, special_state, SpecialState};
use dicke_cat::{HamiltonianKind, ModelParams, Parity, QuantumState, C64};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn basis(dim: usize, i: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); dim];
    v[i] = c(1.0, 0.0);
    v
}

fn close(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn jc_rotates_the_first_doublet() {
    // N = 1, index = 2·photon + bit
    let theta = 0.37;
    let g = GateRecord::jc(theta, 0, 1);
    let mut v = basis(8, 1);
    g.apply(&mut v, 1);
    let mut expect = vec![C64::new(0.0, 0.0); 8];
    expect[1] = c(theta.cos(), 0.0);
    expect[2] = c(0.0, -theta.sin());
    assert!(close(&v, &expect) < 1e-15);

    let mut dark = basis(8, 0);
    g.apply(&mut dark, 1);
    assert!(close(&dark, &basis(8, 0)) < 1e-15);

    let mut id = basis(8, 5);
    GateRecord::jc(0.0, 0, 1).apply(&mut id, 1);
    assert!(close(&id, &basis(8, 5)) < 1e-15);
}

#[test]
fn jc_angle_grows_with_photon_number() {
    let theta = 0.21;
    let n = 3;
    let mut v = basis(10, 2 * n + 1);
    GateRecord::jc(theta, 0, 1).apply(&mut v, 1);
    let w = theta * ((n + 1) as f64).sqrt();
    assert!((v[2 * n + 1] - c(w.cos(), 0.0)).norm() < 1e-15);
    assert!((v[2 * (n + 1)] - c(0.0, -w.sin())).norm() < 1e-15);
}

fn single_qubit_matrix(gate: &GateRecord) -> DMatrix<C64> {
    DMatrix::from_fn(2, 2, |r, col| {
        let mut v = basis(2, col);
        gate.apply(&mut v, 1);
        v[r]
    })
}

#[test]
fn x_pi_matches_its_definition() {
    let sx = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let zero = single_qubit_matrix(&GateRecord::x_pi(0.0, 0, 1));
    assert!((zero - &sx).camax() < 1e-15);

    let half = single_qubit_matrix(&GateRecord::x_pi(PI / 2.0, 0, 1));
    let expect = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
    assert!((half - expect).camax() < 1e-15);

    for phi in [0.3, 1.1, -2.4] {
        let rot = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.0, -phi).exp(), c(0.0, phi).exp()]));
        let m = single_qubit_matrix(&GateRecord::x_pi(phi, 0, 1));
        assert!((&m - rot * &sx).camax() < 1e-15);
        // X_π(φ)² = exp(−iφσᶻ) exp(+iφσᶻ) = 1
        assert!((&m * &m - DMatrix::identity(2, 2)).camax() < 1e-15);
    }
}

#[test]
fn phase_gates_follow_spin_alignment() {
    let eta = 0.41;
    let zz = GateRecord::zz(eta, 0, 1);
    let mut aligned = basis(4, 0);
    zz.apply(&mut aligned, 2);
    assert!((aligned[0] - c(0.0, eta).exp()).norm() < 1e-15);
    let mut anti = basis(4, 1);
    zz.apply(&mut anti, 2);
    assert!((anti[1] - c(0.0, -eta).exp()).norm() < 1e-15);

    let mut up = basis(2, 1);
    GateRecord::z(PI / 2.0, 0, 1).apply(&mut up, 1);
    assert!((up[1] - c(0.0, -1.0)).norm() < 1e-15);
}

#[test]
fn resonant_jc_evolution_is_a_jc_gate_in_the_interaction_picture() {
    let p = ModelParams::qubits(1.3, 0.0, 0.0, 0.8, 1, 6);
    let d = p.dim();
    let a = model::photon_op(&model::boson_ops(p.n_max).annihilation, &p).to_dense();
    let sm = {
        // σ⁻ = |0⟩⟨1| on the single qubit
        let mut m = DMatrix::<C64>::zeros(d, d);
        for n in 0..=p.n_max {
            m[(2 * n, 2 * n + 1)] = c(1.0, 0.0);
        }
        m
    };
    let coupling = a.adjoint() * &sm + &a * sm.adjoint();
    let h0 = hamiltonian(HamiltonianKind::Free, &p).unwrap().to_dense();
    let h = &h0 + &coupling * c(p.g, 0.0);
    for (t, tp) in [(0.7, 0.2), (2.1, 1.4), (3.3, 0.0)] {
        let lab = expm_hermitian(&h, t - tp);
        let inter = expm_hermitian(&h0, -t) * lab * expm_hermitian(&h0, tp);
        let gate = materialize(&[GateRecord::jc(p.g * (t - tp), 0, 1)], &p);
        assert!((inter - gate).camax() < 1e-10);
    }
}

#[test]
fn rabi_gate_error_is_third_order() {
    let p = ModelParams::qubits(1.0, 0.0, 0.0, 0.7, 1, 10);
    let h0 = hamiltonian(HamiltonianKind::Free, &p).unwrap().to_dense();
    let hr = hamiltonian(HamiltonianKind::Rabi, &p).unwrap().to_dense();
    let t_k = 0.3;
    // columns with at most four photons keep the truncation edge out of reach
    let low = 10;
    let error = |dt: f64| {
        let exact = expm_hermitian(&h0, -(t_k + dt)) * expm_hermitian(&hr, dt) * expm_hermitian(&h0, t_k);
        let gate = materialize(&rabi_gate(t_k, dt, p.g * dt, p.omega0, 0, 1), &p);
        operator_norm(&(exact - gate).columns(0, low).into_owned())
    };
    let ratio = error(0.1) / error(0.05);
    assert!((6.0..10.0).contains(&ratio), "{ratio}");
}

#[test]
fn rabi_gate_with_zero_step_is_identity() {
    let p = ModelParams::qubits(1.0, 0.0, 0.0, 0.7, 1, 5);
    let u = materialize(&rabi_gate(0.8, 0.0, 0.0, 1.0, 0, 1), &p);
    assert!((u - DMatrix::identity(p.dim(), p.dim())).camax() < 1e-14);
}

#[test]
fn single_qubit_architectures_agree() {
    let p = ModelParams::qubits(1.0, 0.05, 1.0, 0.9, 1, 5);
    let chain = materialize(&dicke_gate(&p, 0.4, 0.2, Architecture::ChainSwap, 1, true), &p);
    let star = materialize(&dicke_gate(&p, 0.4, 0.2, Architecture::Star, 1, true), &p);
    assert!((chain - star).camax() < 1e-15);
}

#[test]
fn three_qubit_chain_reverses_the_register_before_restoring() {
    let p = ModelParams::qubits(1.0, 0.05, 1.0, 0.9, 3, 3);
    let star = materialize(&dicke_gate(&p, 0.4, 0.2, Architecture::Star, 1, false), &p);
    let restored = materialize(&dicke_gate(&p, 0.4, 0.2, Architecture::ChainSwap, 1, true), &p);
    assert!((&restored - &star).camax() < 1e-13);

    let raw = materialize(&dicke_gate(&p, 0.4, 0.2, Architecture::ChainSwap, 1, false), &p);
    // bit reversal of the 3-qubit register index
    let reverse = DMatrix::<C64>::from_fn(p.dim(), p.dim(), |r, col| {
        let (pr, qr) = (r / 8, r % 8);
        let (pc, qc) = (col / 8, col % 8);
        let rev = ((qc & 1) << 2) | (qc & 2) | ((qc >> 2) & 1);
        if pr == pc && qr == rev {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    assert!((raw - reverse * star).camax() < 1e-13);
}

#[test]
fn dicke_ising_step_is_unitary_at_fig4_sizes() {
    let p = ModelParams::fig4().with_sizes(3, 6);
    for arch in [Architecture::Star, Architecture::ChainSwap] {
        let u = materialize(&dicke_ising_gate(&p, 0.0, 1.0 / 3.0, arch, 1), &p);
        assert!(unitarity_residual(&u) <= 1e-10);
    }
}

#[test]
fn uncoupled_circuit_leaves_the_ferromagnet_alone() {
    let p = ModelParams::qubits(1.0, 0.05, 1.0, 0.0, 2, 2);
    let fm = special_state(SpecialState::Ferromagnetic, &p).unwrap();
    for (steps, arch) in [(1, Architecture::Star), (4, Architecture::ChainSwap), (7, Architecture::Star)] {
        let out = trotter_evolve(&p, &fm, steps, 2.0, arch).unwrap();
        assert!(out.interaction.distance_up_to_phase(&fm) < 1e-12);
        assert!(out.lab.distance_up_to_phase(&fm) < 1e-12);
    }
}

#[test]
fn step_gate_inventory() {
    let p = ModelParams::fig4();
    for arch in [Architecture::Star, Architecture::ChainSwap] {
        let gates = dicke_ising_gate(&p, 0.0, 0.1, arch, 1);
        let count = |k: GateKind| gates.iter().filter(|g| g.kind == k && !g.restoring).count();
        assert_eq!(count(GateKind::Jc), 15);
        assert_eq!(count(GateKind::Z), 5);
        assert_eq!(count(GateKind::Zz), 4);
        let swaps = if arch == Architecture::ChainSwap { 10 } else { 0 };
        assert_eq!(count(GateKind::Swap), swaps);
    }
}

#[test]
fn paper_gate_counts() {
    let chain = gate_count(15, 5, Architecture::ChainSwap);
    assert_eq!((chain.jc, chain.cnot, chain.swap), (225, 124, 150));
    let single = gate_count(1, 1, Architecture::ChainSwap);
    assert_eq!((single.jc, single.cnot, single.swap), (3, 0, 0));
}

#[test]
fn parity_readout_matches_projector() {
    let p = ModelParams::qubits(1.0, 0.05, 1.0, 0.9, 2, 4);
    let fm = special_state(SpecialState::Ferromagnetic, &p).unwrap();
    let r = parity_readout(&p, &fm).unwrap();
    assert!((r.p_plus - 1.0).abs() < 1e-14);
    assert!((r.post_state.entries()[(0, 0)].re - 1.0).abs() < 1e-14);

    let (photon, _) = model::coherent_amplitudes(c(0.0, 0.0), p.n_max);
    let right = model::product_state(&photon, &model::register_product_state(2, 1.0));
    let left = model::product_state(&photon, &model::register_product_state(2, -1.0));
    let sum: Vec<C64> = right.amplitudes().iter().zip(left.amplitudes()).map(|(a, b)| a + b).collect();
    let cat = QuantumState::new(sum).normalized();
    let plus = parity_projector(Parity::Even, &p).unwrap();
    let r = parity_readout(&p, &cat).unwrap();
    assert!((r.p_plus - cat.expectation(&plus)).abs() <= 1e-12);
}

#[test]
fn odd_state_readout_is_undefined() {
    let p = ModelParams::qubits(1.0, 0.0, 0.0, 0.0, 2, 1);
    // |0⟩ ⊗ |01⟩ has odd parity
    let psi = QuantumState::new(basis(p.dim(), 1));
    assert!(matches!(parity_readout(&p, &psi), Err(dicke_cat::Error::ConditioningUndefined(_))));
}

#[test]
fn schedules_are_deterministic_and_exported_line_by_line() {
    let p = ModelParams::fig4();
    let a = CircuitSchedule::build(&p, 3, 1.0, Architecture::ChainSwap).unwrap();
    let b = CircuitSchedule::build(&p, 3, 1.0, Architecture::ChainSwap).unwrap();
    assert_eq!(a.export(), b.export());
    let text = a.export();
    assert_eq!(text.lines().count(), a.gates.len());
    let first = text.lines().next().unwrap();
    let fields: Vec<&str> = first.split_whitespace().collect();
    assert_eq!(fields[0], "jc");
    assert_eq!(fields[1], "0");
    assert_eq!(fields[3], "1");
    assert!(text.lines().any(|l| l.ends_with(" restore")));
    assert!(text.lines().last().unwrap().starts_with("cnot "));
}

#[test]
fn zero_steps_are_rejected() {
    let p = ModelParams::fig4();
    assert!(CircuitSchedule::build(&p, 0, 1.0, Architecture::Star).is_err());
}

fn lab_error(p: &ModelParams, steps: usize, t_f: f64) -> f64 {
    let fm = special_state(SpecialState::Ferromagnetic, p).unwrap();
    let h = hamiltonian(HamiltonianKind::DickeIsing, p).unwrap().to_dense();
    let exact = expm_hermitian(&h, t_f) * DVector::from_column_slice(fm.amplitudes());
    let out = trotter_evolve(p, &fm, steps, t_f, Architecture::Star).unwrap();
    let overlap: C64 = out.lab.amplitudes().iter().zip(exact.iter()).map(|(a, b)| a.conj() * b).sum();
    1.0 - overlap.norm_sqr()
}

#[test]
fn pure_dicke_trotterization_is_second_order() {
    let p = ModelParams::qubits(1.0, 0.0, 0.0, 0.9, 2, 6);
    let ratio = lab_error(&p, 20, 1.0) / lab_error(&p, 40, 1.0);
    assert!((14.0..18.0).contains(&ratio), "infidelity ratio {ratio}");
}

#[test]
fn ising_layer_splitting_limits_the_global_order() {
    // the Dicke/Ising split is a plain Lie product: the state error is first
    // order, so the infidelity only drops fourfold per halving
    let p = ModelParams::fig4().with_sizes(2, 6);
    let ratio = lab_error(&p, 40, 1.0) / lab_error(&p, 80, 1.0);
    assert!((3.4..4.6).contains(&ratio), "infidelity ratio {ratio}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_rabi_gates_are_unitary(t_k in 0.0..5.0f64, dt in 0.0..0.5f64, g in 0.0..2.0f64) {
        let p = ModelParams::qubits(1.0, 0.0, 0.0, g, 1, 6);
        let u = materialize(&rabi_gate(t_k, dt, g * dt, 1.0, 0, 1), &p);
        prop_assert!(unitarity_residual(&u) <= 1e-10);
    }

    #[test]
    fn closed_form_counts_match_schedules(l in 1usize..6, n in 1usize..6, chain in any::<bool>()) {
        let arch = if chain { Architecture::ChainSwap } else { Architecture::Star };
        let p = ModelParams::qubits(1.0, 0.05, 1.0, 0.9, n, 1);
        let s = CircuitSchedule::build(&p, l, 1.0, arch).unwrap();
        prop_assert_eq!(s.counts(), gate_count(l, n, arch));
        if !chain {
            prop_assert_eq!(s.counts().swap, 0);
        }
    }

    #[test]
    fn gate_application_preserves_norm(seed in any::<u64>(), theta in -2.0..2.0f64) {
        let p = ModelParams::qubits(1.0, 0.0, 0.0, 0.0, 3, 4);
        let v: Vec<C64> = (0..p.dim())
            .map(|i| c(((seed as usize + 7 * i) % 13) as f64 - 6.0, ((seed as usize + 3 * i) % 11) as f64 - 5.0))
            .collect();
        let norm0: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        let mut w = v.clone();
        let gates = [
            GateRecord::jc(theta, 1, 1),
            GateRecord::x_pi(theta, 2, 1),
            GateRecord::zz(theta, 0, 1),
            GateRecord::swap(0, 2, 1),
            GateRecord::cnot(2, 1, 1),
        ];
        apply_gates(&gates, &mut w, 3);
        let norm1: f64 = w.iter().map(|x| x.norm_sqr()).sum();
        prop_assert!((norm1 - norm0).abs() <= 1e-12 * norm0);
    }
}
