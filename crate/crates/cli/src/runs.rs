//! One runner per [`RunKind`]; each writes CSV payloads through an
//! [`Emitter`] and returns the manifest.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use dicke_cat::circuit::{gate_count, parity_readout, trotter_evolve, Architecture};
use dicke_cat::exact::{
    self, fidelity, ground_state_with, propagate, quench, reduce_mixed, reduce_pure, LanczosConfig,
    PropagatorConfig, QuenchConfig, RegisterOperator,
};
use dicke_cat::field::{
    angular_mean_field, critical_couplings, dicke_curvature_crossing, fluctuations, instanton_with, FreeEnergyModel,
    FreeEnergyProfile, InstantonOptions,
};
use dicke_cat::model::{self, SpecialState};
use dicke_cat::noise::noisy_trotter;
use dicke_cat::tomography::{linspace, wigner_direct, PhaseGrid, WignerField};
use dicke_cat::{DensityMatrix, HamiltonianKind, ModelParams, Parity, QuantumState};
use serde_json::{json, Value};

use crate::config::{FrameName, RunConfig, RunKind};
use crate::emit::{Csv, Emitter, ResultBundle, CONFIG_ECHO};
use crate::error::CliError;

const MIB: f64 = 1024.0 * 1024.0;
const COMPLEX_BYTES: f64 = 16.0;

/// Rough peak working set of a run in MiB.
pub fn estimate_memory_mb(cfg: &RunConfig) -> f64 {
    let p = cfg.params();
    let d = (p.n_max as f64 + 1.0) * (2.0 * p.spin + 1.0).powi(p.n_qubits as i32);
    let grid = (cfg.grid.points * cfg.grid.points) as f64 * 8.0 * 4.0;
    let lanczos = d * d.min(LanczosConfig::default().max_iter as f64) * COMPLEX_BYTES;
    let bytes = match cfg.kind {
        RunKind::GroundState | RunKind::Wigner => lanczos + grid,
        RunKind::Quench => lanczos + cfg.dynamics.samples as f64 * d * COMPLEX_BYTES,
        RunKind::Trotter => 64.0 * d * COMPLEX_BYTES + grid,
        RunKind::NoisyTrotter if cfg.noise.is_some() => 8.0 * d * d * COMPLEX_BYTES + grid,
        RunKind::NoisyTrotter => 64.0 * d * COMPLEX_BYTES + grid,
        RunKind::FreeEnergy | RunKind::Instanton => {
            (cfg.field.u_points + cfg.field.tau_points) as f64 * 8.0 * 16.0 * cfg.field.couplings.len().max(1) as f64
        }
        RunKind::Angular => (cfg.field.u_points * cfg.field.phi_points) as f64 * 8.0 * 6.0,
    };
    bytes / MIB
}

struct Run<'a> {
    cfg: &'a RunConfig,
    params: ModelParams,
    out: Emitter,
    timings: BTreeMap<String, f64>,
    diagnostics: BTreeMap<String, Value>,
}

impl Run<'_> {
    fn timed<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let v = f();
        self.timings.insert(stage.to_string(), start.elapsed().as_secs_f64());
        v
    }

    fn diag(&mut self, key: &str, value: impl Into<Value>) {
        self.diagnostics.insert(key.to_string(), value.into());
    }

    fn lanczos(&self) -> LanczosConfig {
        LanczosConfig {
            tol: self.cfg.solver.eigen_tolerance,
            ..LanczosConfig::default()
        }
    }

    fn grid(&self) -> PhaseGrid {
        PhaseGrid::square(self.cfg.grid.extent, self.cfg.grid.points)
    }

    fn ground(&mut self) -> Result<(QuantumState, f64), CliError> {
        let h = model::hamiltonian(HamiltonianKind::DickeIsing, &self.params)?;
        let cfg = self.lanczos();
        let spec = self.timed("ground_state", || ground_state_with(&h, 1, &cfg))?;
        self.diag("ground_energy", spec.energies[0]);
        self.diag("lanczos_residual", spec.residuals[0]);
        self.diag("lanczos_iterations", spec.iterations);
        Ok((spec.states[0].clone(), spec.energies[0]))
    }

    fn wigner(&mut self, name: &str, rho: &DensityMatrix, grid: &PhaseGrid) -> Result<WignerField, CliError> {
        let w = self.timed(&format!("wigner_{name}"), || wigner_direct(rho, grid));
        let mut csv = Csv::new(&["x", "p", "W"]);
        for (i, &x) in grid.x.iter().enumerate() {
            for (j, &p) in grid.p.iter().enumerate() {
                csv.row(&[x, p, w.values[(i, j)]]);
            }
        }
        self.out.csv(&format!("wigner_{name}.csv"), csv)?;
        self.diag(&format!("min_w_{name}"), w.min_value);
        self.diag(&format!("min_w_{name}_at"), json!([w.min_location.0, w.min_location.1]));
        self.diag(&format!("w_{name}_integral"), w.quadrature_integral);
        self.diag(&format!("w_{name}_trace_in"), w.trace_in);
        if w.extent_warning {
            self.diag(&format!("w_{name}_extent_warning"), true);
        }
        Ok(w)
    }

    fn density_csv(&mut self, name: &str, rho: &DensityMatrix) -> Result<(), CliError> {
        let m = rho.entries();
        let mut csv = Csv::new(&["n", "m", "re", "im"]);
        for n in 0..m.nrows() {
            for k in 0..m.ncols() {
                csv.row(&[n as f64, k as f64, m[(n, k)].re, m[(n, k)].im]);
            }
        }
        self.out.csv(name, csv)
    }

    /// Photon reductions of a composite state onto the two parity sectors
    /// and the full register.
    fn sector_wigners(&mut self, sectors: [DensityMatrix; 3]) -> Result<(), CliError> {
        let grid = self.grid();
        let [mix, plus, minus] = sectors;
        let wmix = self.wigner("mix", &mix, &grid)?;
        let wplus = self.wigner("plus", &plus, &grid)?;
        let wminus = self.wigner("minus", &minus, &grid)?;
        let split = wminus
            .values
            .iter()
            .zip(wmix.values.iter().zip(wplus.values.iter()))
            .map(|(m, (x, p))| (m - (x - p)).abs())
            .fold(0.0, f64::max);
        self.diag("sector_split_residual", split);
        self.diag("min_w_plus_renormalized", wplus.renormalized().min_value);
        self.diag("parity_plus", plus.trace());
        Ok(())
    }

    fn circuit_diagnostics(&mut self, arch: Architecture) -> Result<(), CliError> {
        let (l, n) = (self.cfg.dynamics.steps, self.params.n_qubits);
        let schedule = dicke_cat::circuit::CircuitSchedule::build(&self.params, l, self.cfg.dynamics.t_final, arch)?;
        let counts = schedule.counts();
        let formula = gate_count(l, n, arch);
        self.diag("architecture", arch.to_string());
        self.diag("gates_jc", counts.jc);
        self.diag("gates_cnot", counts.cnot);
        self.diag("gates_swap", counts.swap);
        self.diag("gates_restoring_swap", schedule.restoring_swaps());
        self.diag("gate_counts_match_formula", counts == formula);
        self.out.write("schedule.txt", &schedule.export())
    }

    fn ground_state(&mut self) -> Result<(), CliError> {
        let h = model::hamiltonian(HamiltonianKind::DickeIsing, &self.params)?;
        let levels = self.cfg.solver.levels.min(self.params.dim());
        let cfg = self.lanczos();
        let spec = self.timed("lanczos", || ground_state_with(&h, levels, &cfg))?;
        let mut csv = Csv::new(&["level", "energy", "residual"]);
        for (i, (e, r)) in spec.energies.iter().zip(&spec.residuals).enumerate() {
            csv.row(&[i as f64, *e, *r]);
        }
        self.out.csv("spectrum.csv", csv)?;

        let psi = &spec.states[0];
        let p = self.params;
        let mix = reduce_pure(psi, &RegisterOperator::Identity, &p)?;
        let plus = reduce_pure(psi, &RegisterOperator::Parity(Parity::Even), &p)?;
        let minus = reduce_pure(psi, &RegisterOperator::Parity(Parity::Odd), &p)?;
        let pops: Vec<Vec<f64>> = [&mix, &plus, &minus].iter().map(|r| exact::fock_populations(r)).collect();
        let mut csv = Csv::new(&["n", "p_mix", "p_plus", "p_minus"]);
        for n in 0..=p.n_max {
            csv.row(&[n as f64, pops[0][n], pops[1][n], pops[2][n]]);
        }
        self.out.csv("fock_populations.csv", csv)?;

        let fm = model::special_state(SpecialState::Ferromagnetic, &p)?;
        let number = model::photon_op(&model::boson_ops(p.n_max).number, &p);
        self.diag("dimension", p.dim());
        self.diag("ground_energy", spec.energies[0]);
        if spec.len() > 1 {
            self.diag("gap", spec.energies[1] - spec.energies[0]);
        }
        self.diag("max_residual", spec.residuals.iter().cloned().fold(0.0, f64::max));
        self.diag("lanczos_iterations", spec.iterations);
        self.diag("fm_overlap", psi.inner(&fm).norm_sqr());
        self.diag("photon_number", psi.expectation(&number));
        self.diag("parity_plus", plus.trace());
        self.diag("top_fock_population", pops[0][p.n_max]);
        Ok(())
    }

    fn wigner_run(&mut self) -> Result<(), CliError> {
        let (psi, _) = self.ground()?;
        let p = self.params;
        let mix = reduce_pure(&psi, &RegisterOperator::Identity, &p)?;
        let plus = reduce_pure(&psi, &RegisterOperator::Parity(Parity::Even), &p)?;
        self.density_csv("dm_mix.csv", &mix)?;
        self.density_csv("dm_plus.csv", &plus)?;
        let grid = self.grid();
        self.wigner("mix", &mix, &grid)?;
        let wplus = self.wigner("plus", &plus, &grid)?;
        let m = plus.entries();
        let mut odd: f64 = 0.0;
        for n in 0..m.nrows() {
            for k in 0..m.ncols() {
                if (n + k) % 2 == 1 {
                    odd = odd.max(m[(n, k)].norm());
                }
            }
        }
        self.diag("dm_plus_odd_residual", odd);
        self.diag("min_w_plus_renormalized", wplus.renormalized().min_value);
        self.diag("parity_plus", plus.trace());
        Ok(())
    }

    fn quench_run(&mut self) -> Result<(), CliError> {
        let d = &self.cfg.dynamics;
        let qc = QuenchConfig {
            t_final: d.t_final,
            n_samples: d.samples,
            x_grid: linspace(-self.cfg.grid.extent, self.cfg.grid.extent, self.cfg.grid.points),
            propagator: PropagatorConfig::with_tol(self.cfg.solver.tolerance),
        };
        let p = self.params;
        let run = self.timed("quench", || quench(&p, &qc))?;
        let tr = &run.trace;
        let mut csv = Csv::new(&["t", "n_photon", "P_plus", "P_minus", "fidelity"]);
        for i in 0..tr.times.len() {
            csv.row(&[tr.times[i], tr.photon_number[i], tr.parity_plus[i], tr.parity_minus[i], tr.fidelity[i]]);
        }
        self.out.csv("trace.csv", csv)?;
        let mut csv = Csv::new(&["t", "x", "w"]);
        for (k, &t) in tr.times.iter().enumerate() {
            for (i, &x) in tr.x_grid.iter().enumerate() {
                csv.row(&[t, x, tr.marginal_w[(i, k)]]);
            }
        }
        self.out.csv("marginal.csv", csv)?;

        let last = tr.times.len() - 1;
        let rho = reduce_pure(&run.final_state, &RegisterOperator::Identity, &p)?;
        let fm = model::special_state(SpecialState::Ferromagnetic, &p)?;
        self.diag("ground_energy", run.ground_energy);
        self.diag("fm_overlap", run.ground_state.inner(&fm).norm_sqr());
        self.diag("final_photon_number", tr.photon_number[last]);
        self.diag("final_parity_plus", tr.parity_plus[last]);
        self.diag("final_parity_minus", tr.parity_minus[last]);
        self.diag("final_fidelity", tr.fidelity[last]);
        self.diag("top_fock_population", exact::fock_populations(&rho)[p.n_max]);
        self.diag("final_norm", run.final_state.norm());
        Ok(())
    }

    fn trotter_run(&mut self) -> Result<(), CliError> {
        let d = self.cfg.dynamics.clone();
        let arch = Architecture::from(d.architecture);
        let p = self.params;
        let fm = model::special_state(SpecialState::Ferromagnetic, &p)?;
        let out = self.timed("circuit", || trotter_evolve(&p, &fm, d.steps, d.t_final, arch))?;
        let psi = match d.frame {
            FrameName::Lab => &out.lab,
            FrameName::Interaction => &out.interaction,
        };
        let sectors = [
            reduce_pure(psi, &RegisterOperator::Identity, &p)?,
            reduce_pure(psi, &RegisterOperator::Parity(Parity::Even), &p)?,
            reduce_pure(psi, &RegisterOperator::Parity(Parity::Odd), &p)?,
        ];
        self.sector_wigners(sectors)?;
        self.circuit_diagnostics(arch)?;

        let readout = parity_readout(&p, psi)?;
        self.diag("readout_p_plus", readout.p_plus);
        self.diag("norm", psi.norm());
        let h = model::hamiltonian(HamiltonianKind::DickeIsing, &p)?;
        let prop = PropagatorConfig::with_tol(self.cfg.solver.tolerance);
        let exact_state = self.timed("exact_reference", || propagate(&h, &fm, d.t_final, &prop))?;
        self.diag("lab_fidelity_vs_exact", out.lab.inner(&exact_state).norm_sqr());
        Ok(())
    }

    fn noisy_run(&mut self) -> Result<(), CliError> {
        let Some(section) = self.cfg.noise.clone() else {
            self.diag("noise", "disabled");
            return self.trotter_run();
        };
        let noise = section.params()?;
        let d = self.cfg.dynamics.clone();
        let arch = Architecture::from(d.architecture);
        let p = self.params;
        let rho0 = DensityMatrix::from_pure(&model::special_state(SpecialState::Ferromagnetic, &p)?);
        let out = self.timed("noisy_circuit", || noisy_trotter(&rho0, d.steps, d.t_final, arch, &noise, &p))?;
        let rho = match d.frame {
            FrameName::Lab => &out.lab,
            FrameName::Interaction => &out.interaction,
        };
        let sectors = [
            reduce_mixed(rho, &RegisterOperator::Identity, &p)?,
            reduce_mixed(rho, &RegisterOperator::Parity(Parity::Even), &p)?,
            reduce_mixed(rho, &RegisterOperator::Parity(Parity::Odd), &p)?,
        ];
        self.sector_wigners(sectors)?;
        self.circuit_diagnostics(arch)?;

        let mut csv = Csv::new(&["step", "substeps", "trace_drift", "min_eigenvalue"]);
        for (k, w) in out.windows.iter().enumerate() {
            csv.row(&[(k + 1) as f64, w.substeps as f64, w.trace_drift, w.min_eigenvalue]);
        }
        self.out.csv("windows.csv", csv)?;
        self.diag("noise", "enabled");
        self.diag("kappa_rad_s", noise.kappa);
        self.diag("gamma_phi_rad_s", noise.gamma_phi);
        self.diag("gamma_1_rad_s", noise.gamma_1);
        self.diag("total_trace_drift", out.total_trace_drift);
        let worst = out.windows.iter().map(|w| w.min_eigenvalue).fold(f64::INFINITY, f64::min);
        self.diag("min_window_eigenvalue", worst);
        let fm = model::special_state(SpecialState::Ferromagnetic, &p)?;
        let unitary = trotter_evolve(&p, &fm, d.steps, d.t_final, arch)?;
        self.diag("fidelity_vs_unitary", fidelity(&out.lab, &DensityMatrix::from_pure(&unitary.lab))?);
        Ok(())
    }

    /// Absolute couplings for a model, following `relative_to_critical`.
    fn couplings(&self, model: FreeEnergyModel) -> Result<Vec<f64>, CliError> {
        let f = &self.cfg.field;
        if f.couplings.is_empty() {
            return Ok(vec![self.params.g]);
        }
        if !f.relative_to_critical {
            return Ok(f.couplings.clone());
        }
        let scale = match model {
            FreeEnergyModel::Dicke => dicke_curvature_crossing(&self.params)?,
            _ => critical_couplings(&self.params)?.g_c_dicke_ising,
        };
        Ok(f.couplings.iter().map(|r| r * scale).collect())
    }

    fn critical_diagnostics(&mut self) {
        if let Ok(g) = dicke_curvature_crossing(&self.params) {
            self.diag("g_c_dicke", g);
        }
        if self.params.j > 0.0 {
            if let Ok(c) = critical_couplings(&self.params) {
                self.diag("g_c_dicke_ising", c.g_c_dicke_ising);
                self.diag("c0", c.c0);
            }
        }
    }

    fn free_energy_run(&mut self) -> Result<(), CliError> {
        let mut curves = Csv::new(&["model", "g", "u", "F"]);
        let mut minima = Csv::new(&["model", "phase", "g", "u_min", "F_min"]);
        let mut evenness: f64 = 0.0;
        for model in self.cfg.field.parsed_models()? {
            for g in self.couplings(model)? {
                let profile = FreeEnergyProfile::auto(model, &self.params.with_g(g), self.cfg.field.u_points)?;
                evenness = evenness.max(profile.evenness_residual());
                for (u, f) in profile.u_grid.iter().zip(&profile.values) {
                    curves.labelled_row(&[model.name()], &[g, *u, *f]);
                }
                for (u, f) in &profile.minima {
                    minima.labelled_row(&[model.name(), profile.classification.name()], &[g, *u, *f]);
                }
            }
        }
        self.out.csv("free_energy.csv", curves)?;
        self.out.csv("minima.csv", minima)?;
        self.diag("evenness_residual", evenness);
        self.critical_diagnostics();
        Ok(())
    }

    fn instanton_run(&mut self) -> Result<(), CliError> {
        let model = self.cfg.field.parsed_models()?.last().copied().unwrap_or(FreeEnergyModel::DickeIsing);
        let g = self.couplings(model)?[0];
        let p = self.params.with_g(g);
        let profile = FreeEnergyProfile::auto(model, &p, self.cfg.field.u_points)?;
        let opts = InstantonOptions {
            n_tau: self.cfg.field.tau_points,
            ..InstantonOptions::default()
        };
        let sol = self.timed("instanton", || instanton_with(&profile, &opts))?;
        let mut csv = Csv::new(&["tau", "u"]);
        for (t, u) in sol.tau_grid.iter().zip(&sol.u_of_tau) {
            csv.row(&[*t, *u]);
        }
        self.out.csv("instanton.csv", csv)?;
        let mut csv = Csv::new(&["u", "F"]);
        for (u, f) in profile.u_grid.iter().zip(&profile.values) {
            csv.row(&[*u, *f]);
        }
        self.out.csv("profile.csv", csv)?;
        self.diag("model", model.name());
        self.diag("g", g);
        self.diag("phase", profile.classification.name());
        self.diag("u0", sol.u0);
        self.diag("action", sol.action);
        self.diag("lambda", sol.lambda);
        self.diag("energy_residual", sol.energy_residual);
        self.diag("crossings", json!(sol.crossings.iter().map(|c| json!([c.0, c.1])).collect::<Vec<_>>()));
        if p.g > 0.0 {
            self.diag("j_over_g", p.j / p.g);
        }
        self.critical_diagnostics();
        Ok(())
    }

    fn angular_run(&mut self) -> Result<(), CliError> {
        let f = self.cfg.field.clone();
        let p = self.params;
        let u = linspace(-f.u_extent, f.u_extent, f.u_points);
        let phi = linspace(-PI, PI, f.phi_points);
        let surface = self.timed("angular_surface", || angular_mean_field(&p, u, phi))?;
        let report = fluctuations(&surface, &p)?;
        let mut csv = Csv::new(&["u", "phi", "h", "F_mf", "F_fl", "stable"]);
        for (i, &u) in surface.u_grid.iter().enumerate() {
            for (j, &phi) in surface.phi_grid.iter().enumerate() {
                let stable = surface.stability_mask[(i, j)];
                csv.row(&[
                    u,
                    phi,
                    surface.h_values[(i, j)],
                    surface.f_mf_values[(i, j)],
                    surface.fluct_values[(i, j)],
                    if stable { 1.0 } else { 0.0 },
                ]);
            }
        }
        self.out.csv("surface.csv", csv)?;
        let mut csv = Csv::new(&["u", "phi_stationary", "F_mf", "F_fl", "F_corrected"]);
        for (i, &u) in surface.u_grid.iter().enumerate() {
            let phi = surface.stationary_phi[i];
            let mf = 0.25 * p.omega0 * u * u + dicke_cat::field::h_angular(u, phi, &p);
            let fl = report.branch_values[i].unwrap_or(f64::NAN);
            let corrected = report.corrected[i].unwrap_or(f64::NAN);
            csv.row(&[u, phi, mf, fl, corrected]);
        }
        self.out.csv("branch.csv", csv)?;
        self.diag("spin", p.spin);
        self.diag("stable_fraction", report.stable_fraction);
        self.diag("max_fluctuation_ratio", report.max_ratio);
        self.diag("branch_jumps", surface.branch_jumps.len());
        Ok(())
    }
}

/// Executes `cfg`, writing payloads, `config.toml` and `manifest.json` into
/// `out_dir`.
pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<ResultBundle, CliError> {
    cfg.validate()?;
    let estimate = estimate_memory_mb(cfg);
    if estimate > cfg.solver.memory_cap_mb {
        return Err(CliError::Resource {
            estimate_mb: estimate,
            cap_mb: cfg.solver.memory_cap_mb,
        });
    }
    let echo = cfg.to_toml();
    let mut out = Emitter::new(out_dir)?;
    out.write(CONFIG_ECHO, &echo)?;
    let mut run = Run {
        cfg,
        params: cfg.params(),
        out,
        timings: BTreeMap::new(),
        diagnostics: BTreeMap::new(),
    };
    run.diag("estimated_memory_mb", estimate);
    let start = Instant::now();
    match cfg.kind {
        RunKind::GroundState => run.ground_state(),
        RunKind::Wigner => run.wigner_run(),
        RunKind::Quench => run.quench_run(),
        RunKind::Trotter => run.trotter_run(),
        RunKind::NoisyTrotter => run.noisy_run(),
        RunKind::FreeEnergy => run.free_energy_run(),
        RunKind::Instanton => run.instanton_run(),
        RunKind::Angular => run.angular_run(),
    }?;
    run.timings.insert("total".into(), start.elapsed().as_secs_f64());

    let mut versions = BTreeMap::new();
    versions.insert("dicke-cat-cli".to_string(), env!("CARGO_PKG_VERSION").to_string());
    versions.insert("format".to_string(), "1".to_string());
    let bundle = ResultBundle {
        kind: cfg.kind.to_string(),
        preset: cfg.preset.clone(),
        versions,
        files: Vec::new(),
        timings_s: run.timings,
        diagnostics: run.diagnostics,
        config: echo,
    };
    run.out.finish(bundle)
}
