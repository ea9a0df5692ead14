//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion.
//! With ACCEPTANCE_STRICT set, exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use dicke_cat::circuit::{gate_count, trotter_evolve, Architecture, CircuitSchedule};
use dicke_cat::exact::{
    self, ground_state, propagate, quench, reduce_mixed, reduce_pure, PropagatorConfig, QuenchConfig,
    RegisterOperator,
};
use dicke_cat::field::{
    critical_couplings, dicke_curvature_crossing, fluctuation_free_energy, free_energy_dicke_ising, h_angular,
    instanton, magnon_spectrum, stability_margin, FreeEnergyModel, FreeEnergyProfile,
};
use dicke_cat::linalg::{expm_hermitian, operator_norm};
use dicke_cat::model::{self, HamiltonianKind, ModelParams, Parity, PauliAxis, SpecialState};
use dicke_cat::noise::{lindblad_window, noisy_trotter, NoiseParams};
use dicke_cat::tomography::{
    ancilla_ramsey, linspace, wigner_direct, wigner_displaced_parity, xi_from_xp, PhaseGrid, WignerField,
};
use dicke_cat::{DensityMatrix, QuantumState, C64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Adaptive Simpson quadrature.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

fn max_diff(a: &WignerField, b: &WignerField) -> f64 {
    a.values.iter().zip(b.values.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    let g = DMatrix::from_fn(dim, dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let rho = &g * g.adjoint();
    let tr: f64 = (0..dim).map(|i| rho[(i, i)].re).sum();
    DensityMatrix::new(rho / C64::new(tr, 0.0)).unwrap()
}

fn state_error(a: &QuantumState, b: &QuantumState) -> f64 {
    a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Shared quench run at the circuit parameters (criteria 2–4).
struct QuenchData {
    photon_final: f64,
    top_population: f64,
    parity_plus_initial: f64,
    parity_final: (f64, f64),
    fidelity_final: f64,
}

fn quench_data() -> QuenchData {
    let p = ModelParams::fig4();
    let run = quench(&p, &QuenchConfig::new(5.0)).unwrap();
    let tr = &run.trace;
    let k = tr.times.len() - 1;
    let rho = reduce_pure(&run.final_state, &RegisterOperator::Identity, &p).unwrap();
    QuenchData {
        photon_final: tr.photon_number[k],
        top_population: exact::fock_populations(&rho)[p.n_max],
        parity_plus_initial: tr.parity_plus[0],
        parity_final: (tr.parity_plus[k], tr.parity_minus[k]),
        fidelity_final: tr.fidelity[k],
    }
}

fn criterion_1() -> Outcome {
    let p = ModelParams::fig4();
    let h = model::hamiltonian(HamiltonianKind::DickeIsing, &p).unwrap();
    let gs = ground_state(&h, 1).unwrap();
    let fm = model::special_state(SpecialState::Ferromagnetic, &p).unwrap();
    let c0 = gs.states[0].inner(&fm).norm_sqr();
    outcome((c0 - 0.20).abs() <= 0.05, format!("|c0|^2 = {c0:.4} (target 0.20 +/- 0.05)"))
}

fn criterion_2(q: &QuenchData) -> Outcome {
    outcome(
        (q.photon_final - 3.0).abs() <= 0.5 && q.top_population <= 1e-3,
        format!(
            "<n>(t_f) = {:.4} (target 3.0 +/- 0.5), population at n_max = {:.2e} (<= 1e-3)",
            q.photon_final, q.top_population
        ),
    )
}

fn criterion_3(q: &QuenchData) -> Outcome {
    let (pp, pm) = q.parity_final;
    let ok = (q.parity_plus_initial - 1.0).abs() <= 1e-14 && (0.35..=0.65).contains(&pp) && (0.35..=0.65).contains(&pm);
    outcome(
        ok,
        format!("P+(0) = {:.15}, P+(t_f) = {pp:.4}, P-(t_f) = {pm:.4} (window [0.35, 0.65])", q.parity_plus_initial),
    )
}

fn criterion_4(q: &QuenchData) -> Outcome {
    outcome(q.fidelity_final > 0.5, format!("F(t_f) = {:.4} (> 0.5)", q.fidelity_final))
}

fn criterion_5() -> Outcome {
    let p = ModelParams::fig2();
    let h = model::hamiltonian(HamiltonianKind::DickeIsing, &p).unwrap();
    let gs = ground_state(&h, 1).unwrap().states[0].clone();
    let grid = PhaseGrid::default();
    let plus = reduce_pure(&gs, &RegisterOperator::Parity(Parity::Even), &p).unwrap();
    let mix = reduce_pure(&gs, &RegisterOperator::Identity, &p).unwrap();
    let (wp, wm) = (wigner_direct(&plus, &grid), wigner_direct(&mix, &grid));
    outcome(
        wp.min_value < 0.0 && wm.min_value > wp.min_value,
        format!("min W+ = {:.4e}, min Wmix = {:.4e}", wp.min_value, wm.min_value),
    )
}

fn criterion_6() -> Outcome {
    let p = ModelParams::fig4();
    let fm = model::special_state(SpecialState::Ferromagnetic, &p).unwrap();
    let out = trotter_evolve(&p, &fm, 15, 5.0, Architecture::ChainSwap).unwrap();
    let grid = PhaseGrid::default();
    let w = |op| wigner_direct(&reduce_pure(&out.lab, &op, &p).unwrap(), &grid);
    let (wp, wm, wmix) = (
        w(RegisterOperator::Parity(Parity::Even)),
        w(RegisterOperator::Parity(Parity::Odd)),
        w(RegisterOperator::Identity),
    );
    let split = wm
        .values
        .iter()
        .zip(wmix.values.iter().zip(wp.values.iter()))
        .map(|(m, (x, p))| (m - (x - p)).abs())
        .fold(0.0, f64::max);
    outcome(
        wp.min_value < 0.0 && split <= 1e-12,
        format!("min W+ = {:.4e}, max |W- - (Wmix - W+)| = {split:.2e}", wp.min_value),
    )
}

fn criteria_7_15() -> (Outcome, Outcome) {
    let p = ModelParams::fig4();
    let fm = model::special_state(SpecialState::Ferromagnetic, &p).unwrap();
    let rho0 = DensityMatrix::from_pure(&fm);
    let noisy = noisy_trotter(&rho0, 15, 5.0, Architecture::ChainSwap, &NoiseParams::reference(), &p).unwrap();
    let plus = reduce_mixed(&noisy.lab, &RegisterOperator::Parity(Parity::Even), &p).unwrap();
    let w = wigner_direct(&plus, &PhaseGrid::default());
    let c7 = outcome(w.min_value < 0.0, format!("noisy min W+ = {:.4e}", w.min_value));

    let clean = noisy_trotter(&rho0, 15, 5.0, Architecture::ChainSwap, &NoiseParams::noiseless(100e-9), &p).unwrap();
    let unitary = trotter_evolve(&p, &fm, 15, 5.0, Architecture::ChainSwap).unwrap().lab;
    let rho = clean.lab.entries();
    let amps = nalgebra::DVector::from_column_slice(unitary.amplitudes());
    let fid = (amps.adjoint() * rho * &amps)[(0, 0)].re;

    let small = ModelParams::qubits(1.0, 0.05, 1.0, 0.9, 2, 8);
    let kappa = NoiseParams {
        kappa: 2.0 * PI * 1e3,
        gamma_phi: 0.0,
        gamma_1: 0.0,
        tau_rabi: 100e-6,
    };
    let fock = DensityMatrix::from_pure(&model::special_state(SpecialState::Fock(3), &small).unwrap());
    let (after, _) = lindblad_window(fock.entries(), kappa.tau_rabi, &kappa, &small).unwrap();
    let number = model::photon_op(&model::boson_ops(small.n_max).number, &small);
    let n_after = DensityMatrix::new(after).unwrap().expectation(&number);
    let law = 3.0 * (-(small.n_qubits as f64) * kappa.kappa * kappa.tau_rabi).exp();
    let damping = (n_after - law).abs() / law;

    let c15 = outcome(
        noisy.total_trace_drift <= 1e-6 && fid >= 1.0 - 1e-8 && damping <= 1e-6,
        format!(
            "trace drift = {:.2e}, zero-noise fidelity = 1 - {:.2e}, kappa damping rel. error = {damping:.2e}",
            noisy.total_trace_drift,
            1.0 - fid
        ),
    );
    (c7, c15)
}

fn criterion_8() -> Outcome {
    let p = ModelParams::fig4();
    let mut lines = Vec::new();
    let mut ok = true;
    for (arch, swaps) in [(Architecture::ChainSwap, 150), (Architecture::Star, 0)] {
        let formula = gate_count(15, 5, arch);
        let counted = CircuitSchedule::build(&p, 15, 5.0, arch).unwrap().counts();
        ok &= formula == counted && formula.jc == 225 && formula.cnot == 124 && formula.swap == swaps;
        lines.push(format!(
            "{arch}: jc {} cnot {} swap {} (schedule {}/{}/{})",
            formula.jc, formula.cnot, formula.swap, counted.jc, counted.cnot, counted.swap
        ));
    }
    outcome(ok, lines.join("; "))
}

fn criterion_9() -> Outcome {
    let p = ModelParams::fig4().with_sizes(2, 6);
    let h = model::hamiltonian(HamiltonianKind::DickeIsing, &p).unwrap();
    let fm = model::special_state(SpecialState::Ferromagnetic, &p).unwrap();
    let t_f = 1.0;
    let exact = propagate(&h, &fm, t_f, &PropagatorConfig::with_tol(1e-13)).unwrap();
    let err = |l| state_error(&trotter_evolve(&p, &fm, l, t_f, Architecture::ChainSwap).unwrap().lab, &exact);
    let state_ratio = err(40) / err(80);

    // diagnostic only: without the Z/ZZ layer the step is not split
    let bare = ModelParams { omegaz: 0.0, j: 0.0, ..p };
    let hb = model::hamiltonian(HamiltonianKind::DickeIsing, &bare).unwrap();
    let exact_bare = propagate(&hb, &fm, t_f, &PropagatorConfig::with_tol(1e-13)).unwrap();
    let err_bare = |l| state_error(&trotter_evolve(&bare, &fm, l, t_f, Architecture::ChainSwap).unwrap().lab, &exact_bare);
    let bare_ratio = err_bare(40) / err_bare(80);

    // single Rabi step on qubit 0 against e^{iH0 dt} e^{-iH_R dt}
    let ops = model::boson_ops(p.n_max);
    let x = model::photon_op(&ops.annihilation.add(&ops.creation), &p);
    let n = model::photon_op(&ops.number, &p);
    let sx = model::pauli_op(0, PauliAxis::X, &p).unwrap();
    let sz = model::pauli_op(0, PauliAxis::Z, &p).unwrap();
    let h_r = n.add(&x.matmul(&sx).scale(C64::new(p.g, 0.0))).to_dense();
    let h_0 = n.sub(&sz.scale(C64::new(0.5 * p.omega0, 0.0))).to_dense();
    let step_err = |dt: f64| {
        let gate = dicke_cat::circuit::materialize(
            &dicke_cat::circuit::rabi_gate(0.0, dt, p.g * dt, p.omega0, 0, 1),
            &p,
        );
        operator_norm(&(gate - expm_hermitian(&h_0, -dt) * expm_hermitian(&h_r, dt)))
    };
    let op_ratio = step_err(0.1) / step_err(0.05);
    outcome(
        (3.4..=4.6).contains(&state_ratio) && (6.0..=10.0).contains(&op_ratio),
        format!(
            "state-error halving factor = {state_ratio:.3} (target [3.4, 4.6]), Rabi-step factor = {op_ratio:.3} \
             (target [6, 10]); diagnostic: factor without Z/ZZ layer = {bare_ratio:.3}"
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut worst = 0.0f64;
    for c in [0.5, 0.9, 1.2] {
        let p = ModelParams::qubits(1.0, 0.0, 1.0, c, 1, 1);
        for u in linspace(0.0, 3.0, 61) {
            let band = |k: f64| magnon_spectrum(k, u, &p).0;
            // −(1/2)∫_{−π}^{π} dk/2π |ε| with the even integrand folded onto [0, π]
            let oracle = 0.25 * u * u - simpson(&band, 0.0, PI, 1e-14) / (2.0 * PI);
            worst = worst.max((free_energy_dicke_ising(u, &p) - oracle).abs());
        }
    }
    outcome(worst <= 1e-10, format!("max |F_DI - quadrature| = {worst:.2e} (<= 1e-10)"))
}

fn criterion_11() -> Outcome {
    let p = ModelParams::qubits(1.0, 1.0, 1.0, 0.5, 1, 1);
    let c = critical_couplings(&p).unwrap();
    let numeric = dicke_curvature_crossing(&p).unwrap();
    let analytic = (p.omega0 * p.omegaz / 2.0).sqrt();
    outcome(
        (numeric - analytic).abs() <= 1e-6 && (c.c0 - 0.90).abs() <= 0.02,
        format!(
            "curvature crossing - sqrt(w0 wz/2) = {:.2e}, c0 = {:.4} (target 0.90 +/- 0.02)",
            numeric - analytic,
            c.c0
        ),
    )
}

fn criterion_12() -> Outcome {
    let base = ModelParams::qubits(1.0, 0.0, 1.0, 1.0, 1, 1);
    let c0 = critical_couplings(&base).unwrap().c0;
    let p = ModelParams { g: 1.1 * c0, ..base };
    let profile = FreeEnergyProfile::auto(FreeEnergyModel::DickeIsing, &p, 401).unwrap();
    let sol = instanton(&profile).unwrap();
    let special = p.j / p.g;
    let crosses = sol.u0 > special && sol.crossings.len() == 2;
    let monotone = sol.u_of_tau.windows(2).all(|w| w[1] > w[0]);
    outcome(
        crosses && monotone && sol.energy_residual <= 1e-6,
        format!(
            "u0 = {:.6} > J/g = {special:.6}, crossings at tau = +/-{:.4}, energy residual = {:.2e} (<= 1e-6)",
            sol.u0,
            sol.crossings.last().map(|c| c.0).unwrap_or(f64::NAN),
            sol.energy_residual
        ),
    )
}

fn criterion_13() -> Outcome {
    let mut worst = 0.0f64;
    let mut evaluated = 0;
    for s in [0.5, 1.0, 2.5] {
        let p = ModelParams {
            spin: s,
            ..ModelParams::qubits(1.0, 0.3, 0.0, 0.9, 1, 1)
        };
        for u in linspace(-3.0, 3.0, 41) {
            for phi in linspace(-PI, PI, 73) {
                if stability_margin(u, phi, &p) <= 0.0 {
                    continue;
                }
                if let Ok(f) = fluctuation_free_energy(u, phi, &p) {
                    worst = worst.max((f + h_angular(u, phi, &p) / (2.0 * s)).abs());
                    evaluated += 1;
                }
            }
        }
    }
    outcome(
        worst <= 1e-12 && evaluated > 0,
        format!("max |F_fl + h/2s| = {worst:.2e} over {evaluated} stable points (<= 1e-12)"),
    )
}

fn criterion_14() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let grid = PhaseGrid::square(4.0, 41);
    let mut route = 0.0f64;
    let mut ramsey = 0.0f64;
    for _ in 0..5 {
        let rho = random_density(&mut rng, 6);
        let direct = wigner_direct(&rho, &grid);
        let parity = wigner_displaced_parity(&rho, &grid, None).unwrap();
        route = route.max(max_diff(&direct, &parity));
        for _ in 0..4 {
            let (x, p) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let probe = PhaseGrid { x: vec![x], p: vec![p] };
            let w = wigner_displaced_parity(&rho, &probe, None).unwrap().values[(0, 0)];
            let r = ancilla_ramsey(&rho, xi_from_xp(x, p), None).unwrap();
            // W(x, p) = W_ξ / 2
            ramsey = ramsey.max((0.5 * r.wigner_estimate - w).abs());
        }
    }
    let vac = DensityMatrix::from_pure(&QuantumState::new(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]));
    let wv = wigner_direct(&vac, &grid);
    let mut vacuum = 0.0f64;
    for (i, &x) in grid.x.iter().enumerate() {
        for (j, &p) in grid.p.iter().enumerate() {
            vacuum = vacuum.max((wv.values[(i, j)] - (-x * x - p * p).exp() / PI).abs());
        }
    }
    outcome(
        route <= 1e-8 && ramsey <= 1e-8 && vacuum <= 1e-12,
        format!("direct vs parity = {route:.2e}, Ramsey vs parity = {ramsey:.2e}, vacuum = {vacuum:.2e}"),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let q = quench_data();
    let (c7, c15) = criteria_7_15();
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "overlap number", criterion_1()),
        (2, "photon growth", criterion_2(&q)),
        (3, "parity equalization", criterion_3(&q)),
        (4, "fidelity", criterion_4(&q)),
        (5, "cat negativity, exact", criterion_5()),
        (6, "cat negativity, Trotterized", criterion_6()),
        (7, "noise robustness", c7),
        (8, "gate counts", criterion_8()),
        (9, "Trotter order", criterion_9()),
        (10, "free-energy oracle", criterion_10()),
        (11, "critical couplings", criterion_11()),
        (12, "instanton", criterion_12()),
        (13, "fluctuation identity", criterion_13()),
        (14, "tomography route equivalence", criterion_14()),
        (15, "master-equation sanity", c15),
    ];
    let mut out = std::io::stdout().lock();
    let mut failed = 0;
    for (id, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!o.pass);
        writeln!(out, "[{tag}] criterion {id:2} ({name}): {}", o.detail).unwrap();
    }
    writeln!(
        out,
        "{} of {} criteria passed in {:.1} s",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    )
    .unwrap();
    // a failing criterion only fails the process under ACCEPTANCE_STRICT, so the
    // remaining workspace suites still run under a plain `cargo test`
    if failed == 0 || std::env::var_os("ACCEPTANCE_STRICT").is_none() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
