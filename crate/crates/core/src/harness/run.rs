//! Driving a configured run and writing its output directory.
//!
//! A run directory holds
//!
//! * `energies.csv`: one row per diagnostic step, flushed as it is written;
//! * `report.txt`: status, late-time fits, linear prediction, ratio monitors;
//! * `config.txt`: the configuration in canonical form;
//! * `snapshot_<step>.bin` when snapshots are enabled.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::diagnostics::{
    decay_fit, exponential_rate_fit, ratio_monitors, sobolev_norm, EnergyRecord, EnergyTracker, Fit,
    NormSet, Sobolev,
};
use crate::error::{Error, Result};
use crate::hookean::{embedding_params, to_conformation, verify_g_closure, HookeanState, HookeanSystem};
use crate::identities::{all_pass, run_suite, IdentityReport};
use crate::integrator::{cfl_number, Dynamics, Stepper};
use crate::linear::decay_prediction;
use crate::model::{ModelParams, OldroydState, OldroydSystem};
use crate::spectral::{Components, Grid, SpectralSymTensor, SpectralVector};

use super::config::{ModelKind, RunConfig};
use super::presets::make_initial;
use super::snapshot::write_field;

/// Environment variable naming the root for relative output directories.
pub const OUTPUT_ROOT_ENV: &str = "OLDROYD_OUTPUT_ROOT";

/// Largest admissible `‖G(F) − τ‖_{H²}` in a consistency run.
pub const DRIFT_TOLERANCE: f64 = 1e-6;

/// Series fitted over the late-time window.
pub const FIT_SERIES: [&str; 5] = ["u_h2", "grad_u_h1", "ptau_h1", "inv_ptau_h2", "inv_tau_h3"];

/// `dir` itself if absolute, else under `$OLDROYD_OUTPUT_ROOT` when set.
pub fn resolve_output_dir(dir: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) if dir.is_relative() => PathBuf::from(root).join(dir),
        _ => dir.to_path_buf(),
    }
}

/// Header of `energies.csv`.
pub fn energies_header() -> String {
    format!("t,{},e0,e1,e2,tau_mean_frobenius,dt,cfl", NormSet::NAMES.join(","))
}

fn energies_row(r: &EnergyRecord, dt: f64, cfl: f64) -> String {
    let mut s = format!("{:e}", r.t);
    for v in r.norms.values().iter().chain(&r.energies()).chain(&[r.tau_mean, dt, cfl]) {
        s.push_str(&format!(",{v:e}"));
    }
    s
}

/// Fits of one series over the late-time window.
#[derive(Clone, Debug)]
pub struct SeriesFit {
    pub name: &'static str,
    /// `log y` against `log(1 + t)`.
    pub power: std::result::Result<Fit, String>,
    /// `log y` against `t`.
    pub exponential: std::result::Result<Fit, String>,
}

/// What a run produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    /// The error that stopped the run early, if any.
    pub abort: Option<Error>,
    pub steps: usize,
    pub records: Vec<EnergyRecord>,
    pub fits: Vec<SeriesFit>,
    /// Slowest linear decay rate over the initial support.
    pub linear_rate: Option<f64>,
    pub identities: Option<Vec<IdentityReport>>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        match &self.abort {
            Some(e) => super::exit_code(e),
            None if self.identities.as_deref().is_some_and(|r| !all_pass(r)) => super::VERIFICATION_FAILED,
            None => 0,
        }
    }

    pub fn final_energies(&self) -> Option<[f64; 3]> {
        self.records.last().map(EnergyRecord::energies)
    }
}

struct Observer<'a> {
    grid: &'a Grid,
    config: &'a RunConfig,
    dir: &'a Path,
    csv: BufWriter<File>,
    tracker: EnergyTracker,
    records: Vec<EnergyRecord>,
    total: usize,
}

impl Observer<'_> {
    fn observe(&mut self, step: usize, t: f64, dt: f64, u: &SpectralVector, tau: &SpectralSymTensor) -> Result<()> {
        if step % self.config.time.diag_interval == 0 || step == self.total {
            let norms = NormSet::measure(self.grid, u, tau);
            let rec = self.tracker.push(t, norms, tau.mean_frobenius());
            writeln!(self.csv, "{}", energies_row(&rec, dt, cfl_number(self.grid, u, dt)))?;
            self.csv.flush()?;
            self.records.push(rec);
        }
        Ok(())
    }

    fn wants_snapshot(&self, step: usize) -> bool {
        self.config.output.snapshots && step % self.config.output.snapshot_interval == 0
    }

    fn snapshot(&self, step: usize, write: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
        let mut out = BufWriter::new(File::create(self.dir.join(format!("snapshot_{step:06}.bin")))?);
        write(&mut out)?;
        out.flush()?;
        Ok(())
    }
}

fn drive<D: Dynamics>(
    grid: &Grid,
    system: D,
    mut state: D::State,
    obs: &mut Observer<'_>,
    mut emit: impl FnMut(&mut Observer<'_>, usize, f64, f64, &D::State) -> Result<()>,
) -> (usize, Option<Error>) {
    let cfg = obs.config.time;
    let mut stepper = Stepper::from_config(grid, system, &cfg);
    let res = stepper.run(&mut state, cfg.t_end, 1, |s, st| emit(obs, s.steps(), s.time(), s.dt(), st));
    (stepper.steps(), res.err())
}

/// `|k|²` of every mode carrying a coefficient above round-off.
fn support<F: Components>(grid: &Grid, fields: &[&F]) -> Vec<f64> {
    let peak = fields
        .iter()
        .flat_map(|f| f.components())
        .map(|c| c.max_abs())
        .fold(0.0, f64::max);
    let mut shells: Vec<f64> = Vec::new();
    for f in fields {
        for c in f.components() {
            for (idx, v) in c.coefficients().indexed_iter() {
                let k2 = grid.k2(idx);
                if k2 > 0.0 && v.norm() > 1e-12 * peak && !shells.contains(&k2) {
                    shells.push(k2);
                }
            }
        }
    }
    shells.sort_by(f64::total_cmp);
    shells
}

fn series_fits(records: &[EnergyRecord], window: (f64, f64)) -> Vec<SeriesFit> {
    FIT_SERIES
        .iter()
        .map(|&name| {
            let col = NormSet::NAMES.iter().position(|&n| n == name).unwrap();
            let series: Vec<(f64, f64)> = records.iter().map(|r| (r.t, r.norms.values()[col])).collect();
            SeriesFit {
                name,
                power: decay_fit(&series, window).map_err(|e| e.to_string()),
                exponential: exponential_rate_fit(&series, window).map_err(|e| e.to_string()),
            }
        })
        .collect()
}

fn write_report(config: &RunConfig, outcome: &RunOutcome, path: &Path) -> Result<()> {
    let mut s = String::new();
    let status = match &outcome.abort {
        None => "completed".to_string(),
        Some(e) => format!("aborted: {e}"),
    };
    s.push_str(&format!("status: {status}\nexit_code: {}\n", outcome.exit_code()));
    s.push_str(&format!("model: {}\nsteps: {}\n", config.model, outcome.steps));
    if let Some(e) = outcome.final_energies() {
        s.push_str(&format!("final_energies: e0 = {:e}, e1 = {:e}, e2 = {:e}\n", e[0], e[1], e[2]));
    }
    let (lo, hi) = config.fit_window();
    s.push_str(&format!("\nlate-time fits over [{lo}, {hi}]\n"));
    s.push_str("series         power_exponent   r2        exponential_rate  r2\n");
    let cell = |f: &std::result::Result<Fit, String>| match f {
        Ok(f) => format!("{:<16.6e} {:<9.6}", f.slope, f.r_squared),
        Err(e) => format!("n/a ({e})"),
    };
    for f in &outcome.fits {
        s.push_str(&format!("{:<14} {} {}\n", f.name, cell(&f.power), cell(&f.exponential)));
    }
    match outcome.linear_rate {
        Some(r) => s.push_str(&format!("\nlinear_prediction: slowest mode rate Re λ₊ = {r:e}\n")),
        None => s.push_str("\nlinear_prediction: n/a (zero initial data)\n"),
    }
    let ratios = ratio_monitors(&outcome.records);
    let (m0, m2) = ratios.iter().fold((0.0f64, 0.0f64), |(a, b), r| (a.max(r.1), b.max(r.2)));
    s.push_str(&format!("\nratio_monitors: max e0 ratio = {m0:e}, max e2 ratio = {m2:e}\n"));
    if let Some(reports) = &outcome.identities {
        s.push_str(&format!(
            "\nidentity suite ({} trials): {}\n",
            config.report.identity_trials,
            if all_pass(reports) { "all pass" } else { "FAILED" }
        ));
        for r in reports {
            s.push_str(&format!(
                "  {:<36} residual {:e}  tolerance {:e}  {}\n",
                r.name,
                r.residual,
                r.tolerance,
                if r.pass { "pass" } else { "FAIL" }
            ));
        }
    }
    fs::write(path, s)?;
    Ok(())
}

/// Runs `config`, writing into `dir` (or the configured directory). Config
/// errors surface before anything is created; an aborted integration still
/// leaves the rows written so far and a report naming the cause.
pub fn run(config: &RunConfig, dir: Option<&Path>) -> Result<RunOutcome> {
    config.validate()?;
    let grid = Grid::new(config.n)?;
    let initial = make_initial(config.init.preset, config.init.amplitude, config.init.kmax, config.init.seed, &grid)?;
    let dir = resolve_output_dir(dir.unwrap_or(&config.output.dir));
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("config.txt"), config.to_text())?;
    let mut csv = BufWriter::new(File::create(dir.join("energies.csv"))?);
    writeln!(csv, "{}", energies_header())?;
    csv.flush()?;

    let mut obs = Observer {
        grid: &grid,
        config,
        dir: &dir,
        csv,
        tracker: EnergyTracker::new(),
        records: Vec::new(),
        total: config.time.steps(),
    };

    let start = initial.to_oldroyd(&grid);
    let mut shells = support(&grid, &[&start.u]);
    shells.extend(support(&grid, &[&start.tau]));
    let (steps, abort, linear_rate) = match config.model {
        ModelKind::Oldroyd | ModelKind::Linearized => {
            let mut system = match config.model {
                ModelKind::Linearized => OldroydSystem::linearized(config.params),
                _ => OldroydSystem::new(config.params),
            };
            system.tau_mean = config.tau_mean;
            let rate = decay_prediction(&shells, &config.params).ok();
            let (steps, abort) = drive(&grid, system, start, &mut obs, |o, step, t, dt, s: &OldroydState| {
                o.observe(step, t, dt, &s.u, &s.tau)?;
                if o.wants_snapshot(step) {
                    o.snapshot(step, |w| {
                        write_field(w, o.grid, "u", t, &s.u)?;
                        write_field(w, o.grid, "tau", t, &s.tau)
                    })?;
                }
                Ok(())
            });
            (steps, abort, rate)
        }
        ModelKind::Hookean => {
            let state = initial.to_hookean(&grid)?;
            let system = HookeanSystem { viscosity: config.params.mu };
            let params = ModelParams { mu: config.params.mu, ..embedding_params() };
            let rate = decay_prediction(&shells, &params).ok();
            let (steps, abort) = drive(&grid, system, state, &mut obs, |o, step, t, dt, s: &HookeanState| {
                let g = to_conformation(o.grid, &s.f_minus_i);
                o.observe(step, t, dt, &s.u, &g)?;
                if o.wants_snapshot(step) {
                    o.snapshot(step, |w| {
                        write_field(w, o.grid, "u", t, &s.u)?;
                        write_field(w, o.grid, "f_minus_i", t, &s.f_minus_i)?;
                        write_field(w, o.grid, "tau", t, &g)
                    })?;
                }
                Ok(())
            });
            (steps, abort, rate)
        }
    };
    let abort = match abort {
        Some(e @ (Error::CflViolation { .. } | Error::NonFinite { .. })) => Some(e),
        Some(e) => return Err(e),
        None => None,
    };
    let records = obs.records;
    let identities = if config.report.identities && config.report.identity_trials > 0 {
        Some(run_suite(config.init.seed, config.n.max(16), config.report.identity_trials)?)
    } else {
        None
    };
    let outcome = RunOutcome {
        fits: series_fits(&records, config.fit_window()),
        dir: dir.clone(),
        abort,
        steps,
        records,
        linear_rate,
        identities,
    };
    write_report(config, &outcome, &dir.join("report.txt"))?;
    Ok(outcome)
}

/// Result of co-evolving a Hookean state and its Oldroyd-B image.
#[derive(Debug)]
pub struct ConsistencyOutcome {
    pub dir: PathBuf,
    /// `(t, ‖G(F) − τ‖_{H²}, G-closure residual)` per diagnostic step.
    pub rows: Vec<(f64, f64, f64)>,
    pub max_drift: f64,
    pub max_closure: f64,
}

impl ConsistencyOutcome {
    pub fn passes(&self) -> bool {
        self.max_drift <= DRIFT_TOLERANCE
    }
}

/// Evolves `(u, F)` by the Hookean law and `(u, τ)` from `τ₀ = G(F₀)` by the
/// Oldroyd-B law with the embedding parameters (keeping the configured `μ`),
/// recording how far `G(F(t))` and `τ(t)` drift apart in `consistency.csv`.
pub fn hookean_consistency(config: &RunConfig, dir: Option<&Path>) -> Result<ConsistencyOutcome> {
    config.validate()?;
    let grid = Grid::new(config.n)?;
    let initial = make_initial(config.init.preset, config.init.amplitude, config.init.kmax, config.init.seed, &grid)?;
    let mut hook = initial.to_hookean(&grid)?;
    let mut old = hook.to_oldroyd(&grid);
    let dir = resolve_output_dir(dir.unwrap_or(&config.output.dir));
    fs::create_dir_all(&dir)?;
    let mut csv = BufWriter::new(File::create(dir.join("consistency.csv"))?);
    writeln!(csv, "t,drift_h2,closure_residual")?;

    let tc = config.time;
    let params = ModelParams { mu: config.params.mu, ..embedding_params() };
    let mut hs = Stepper::from_config(&grid, HookeanSystem { viscosity: params.mu }, &tc);
    let mut os = Stepper::from_config(&grid, OldroydSystem::new(params), &tc);
    let total = tc.steps();
    let mut rows = Vec::new();
    let mut record = |t: f64, hook: &HookeanState, old: &OldroydState| -> Result<()> {
        let diff = to_conformation(&grid, &hook.f_minus_i).difference(&old.tau);
        let drift = sobolev_norm(&grid, &diff, Sobolev::h(2));
        let closure = verify_g_closure(&grid, hook);
        writeln!(csv, "{t:e},{drift:e},{closure:e}")?;
        csv.flush()?;
        rows.push((t, drift, closure));
        Ok(())
    };
    record(0.0, &hook, &old)?;
    for i in 1..=total {
        hs.step(&mut hook)?;
        os.step(&mut old)?;
        if i % tc.diag_interval == 0 || i == total {
            record(hs.time(), &hook, &old)?;
        }
    }
    let max_drift = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let max_closure = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    Ok(ConsistencyOutcome { dir, rows, max_drift, max_closure })
}
