//! Integrating-factor RK4 time stepping.
//!
//! The viscous term `μΔu` is propagated exactly by the per-mode factor
//! `e^{−μ|k|²h}`; all other terms go through the classical RK4 stages.
//! Writing `E = e^{−μ|k|²Δt/2}` and `N` for the explicit right-hand side,
//!
//! ```text
//! k₁ = N(v)            k₂ = N(E(v + Δt/2 k₁))
//! k₃ = N(Ev + Δt/2 k₂) k₄ = N(E²v + Δt E k₃)
//! v' = E²v + Δt/6 (E²k₁ + 2E(k₂ + k₃) + k₄)
//! ```
//!
//! where `E` acts on the velocity only.

use ndarray::Array3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hookean::{HookeanState, HookeanSystem};
use crate::model::{OldroydState, OldroydSystem};
use crate::spectral::{Components, Grid, SpectralVector};

/// A state advanced by the stepper: a velocity plus passive companions.
pub trait FieldState: Clone {
    fn velocity(&self) -> &SpectralVector;
    fn velocity_mut(&mut self) -> &mut SpectralVector;
    fn axpy(&mut self, a: f64, x: &Self);
    fn all_finite(&self) -> bool;
}

impl FieldState for OldroydState {
    fn velocity(&self) -> &SpectralVector {
        &self.u
    }
    fn velocity_mut(&mut self) -> &mut SpectralVector {
        &mut self.u
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        self.u.axpy(a, &x.u);
        self.tau.axpy(a, &x.tau);
    }
    fn all_finite(&self) -> bool {
        self.u.is_finite() && self.tau.is_finite()
    }
}

impl FieldState for HookeanState {
    fn velocity(&self) -> &SpectralVector {
        &self.u
    }
    fn velocity_mut(&mut self) -> &mut SpectralVector {
        &mut self.u
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        self.u.axpy(a, &x.u);
        self.f_minus_i.axpy(a, &x.f_minus_i);
    }
    fn all_finite(&self) -> bool {
        self.u.is_finite() && self.f_minus_i.is_finite()
    }
}

/// An evolution law `v_t = μΔu + N(v)`.
pub trait Dynamics {
    type State: FieldState;
    fn viscosity(&self) -> f64;
    /// Everything except `μΔu`.
    fn explicit_rhs(&self, grid: &Grid, state: &Self::State) -> Self::State;
}

impl Dynamics for OldroydSystem {
    type State = OldroydState;
    fn viscosity(&self) -> f64 {
        self.params.mu
    }
    fn explicit_rhs(&self, grid: &Grid, state: &OldroydState) -> OldroydState {
        OldroydSystem::explicit_rhs(self, grid, state)
    }
}

impl Dynamics for HookeanSystem {
    type State = HookeanState;
    fn viscosity(&self) -> f64 {
        self.viscosity
    }
    fn explicit_rhs(&self, grid: &Grid, state: &HookeanState) -> HookeanState {
        HookeanSystem::explicit_rhs(self, grid, state)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    IfRk4,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    /// Largest admissible `Δt max|u| / Δx`.
    pub cfl_limit: f64,
    /// Steps between diagnostic records.
    pub diag_interval: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { dt: 0.005, t_end: 50.0, scheme: Scheme::IfRk4, cfl_limit: 0.5, diag_interval: 20 }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, reason: String| Err(Error::OutOfRange { key: key.into(), reason });
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("time.dt", format!("must be positive, got {}", self.dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad("time.t_end", format!("must be non-negative, got {}", self.t_end));
        }
        if !(self.cfl_limit > 0.0) {
            return bad("time.cfl_limit", format!("must be positive, got {}", self.cfl_limit));
        }
        if self.diag_interval == 0 {
            return bad("time.diag_interval", "must be at least 1".into());
        }
        Ok(())
    }

    /// Number of steps reaching `t_end`, the last one possibly landing
    /// a fraction of `dt` past it.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}

/// `Δt max|u| / Δx` with `max|u|` the largest pointwise speed on the grid.
pub fn cfl_number(grid: &Grid, u: &SpectralVector, dt: f64) -> f64 {
    let [a, b, c] = u.inverse(grid);
    let mut vmax: f64 = 0.0;
    ndarray::Zip::from(&a).and(&b).and(&c).for_each(|x, y, z| {
        vmax = vmax.max((x * x + y * y + z * z).sqrt());
    });
    dt * vmax / grid.spacing()
}

/// Fixed-step IF-RK4 driver with precomputed viscous factors.
pub struct Stepper<'g, D: Dynamics> {
    grid: &'g Grid,
    system: D,
    dt: f64,
    cfl_limit: f64,
    half: Array3<f64>,
    full: Array3<f64>,
    t: f64,
    steps: usize,
    last_cfl: f64,
}

impl<'g, D: Dynamics> Stepper<'g, D> {
    pub fn new(grid: &'g Grid, system: D, dt: f64, cfl_limit: f64) -> Self {
        let mu = system.viscosity();
        let factor = |h: f64| Array3::from_shape_fn(grid.shape(), |idx| (-mu * grid.k2(idx) * h).exp());
        Self {
            grid,
            system,
            dt,
            cfl_limit,
            half: factor(0.5 * dt),
            full: factor(dt),
            t: 0.0,
            steps: 0,
            last_cfl: 0.0,
        }
    }

    pub fn from_config(grid: &'g Grid, system: D, config: &IntegratorConfig) -> Self {
        Self::new(grid, system, config.dt, config.cfl_limit)
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// CFL number measured at the start of the latest step.
    pub fn last_cfl(&self) -> f64 {
        self.last_cfl
    }

    pub fn system(&self) -> &D {
        &self.system
    }

    fn damp(&self, factor: &Array3<f64>, state: &mut D::State) {
        for c in state.velocity_mut().components_mut() {
            c.coefficients_mut().zip_mut_with(factor, |v, &e| *v *= e);
        }
    }

    fn damped(&self, factor: &Array3<f64>, state: &D::State) -> D::State {
        let mut out = state.clone();
        self.damp(factor, &mut out);
        out
    }

    /// One step without CFL or finiteness checks.
    pub fn advance(&self, state: &D::State) -> D::State {
        let (g, h) = (self.grid, self.dt);
        let n = |s: &D::State| self.system.explicit_rhs(g, s);

        let k1 = n(state);
        let mut s = state.clone();
        s.axpy(0.5 * h, &k1);
        self.damp(&self.half, &mut s);
        let k2 = n(&s);

        let ev = self.damped(&self.half, state);
        let mut s = ev.clone();
        s.axpy(0.5 * h, &k2);
        let k3 = n(&s);

        let mut s = self.damped(&self.full, state);
        s.axpy(h, &self.damped(&self.half, &k3));
        let k4 = n(&s);

        let mut out = self.damped(&self.full, state);
        out.axpy(h / 6.0, &self.damped(&self.full, &k1));
        let mut mid = k2;
        mid.axpy(1.0, &k3);
        out.axpy(h / 3.0, &self.damped(&self.half, &mid));
        out.axpy(h / 6.0, &k4);
        out
    }

    /// Advances `state` by one step, aborting on CFL breach or overflow.
    /// An infinite CFL limit skips the check.
    pub fn step(&mut self, state: &mut D::State) -> Result<()> {
        if self.cfl_limit.is_finite() {
            let cfl = cfl_number(self.grid, state.velocity(), self.dt);
            self.last_cfl = cfl;
            if cfl > self.cfl_limit {
                return Err(Error::CflViolation { t: self.t, cfl, limit: self.cfl_limit });
            }
        }
        let next = self.advance(state);
        self.steps += 1;
        self.t = self.steps as f64 * self.dt;
        if !next.all_finite() {
            return Err(Error::NonFinite { t: self.t });
        }
        *state = next;
        Ok(())
    }

    /// Steps until `t_end`, calling `observe(t, state)` at the start and
    /// every `every` steps thereafter as well as at the end.
    pub fn run(
        &mut self,
        state: &mut D::State,
        t_end: f64,
        every: usize,
        mut observe: impl FnMut(&Self, &D::State) -> Result<()>,
    ) -> Result<()> {
        let total = (t_end / self.dt - 1e-9).ceil().max(0.0) as usize;
        observe(self, state)?;
        for i in 1..=total {
            self.step(state)?;
            if i % every.max(1) == 0 || i == total {
                observe(self, state)?;
            }
        }
        Ok(())
    }
}

/// Advances `state` to `t_end` with fixed steps and no diagnostics.
pub fn integrate<D: Dynamics>(
    grid: &Grid,
    system: D,
    state: &D::State,
    dt: f64,
    t_end: f64,
    cfl_limit: f64,
) -> Result<D::State> {
    let mut stepper = Stepper::new(grid, system, dt, cfl_limit);
    let mut s = state.clone();
    stepper.run(&mut s, t_end, usize::MAX, |_, _| Ok(()))?;
    Ok(s)
}

/// Outcome of a convergence study.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderEstimate {
    /// Least-squares slope of `log(error)` against `log(dt)`; `NaN` when
    /// every error sits at the round-off floor.
    pub order: f64,
    /// Every error is below the floor, so no order can be read off.
    pub floor_reached: bool,
}

/// Observed order from `(dt, error)` pairs. Errors at or below `floor`
/// are treated as round-off and excluded from the fit.
pub fn convergence_order(samples: &[(f64, f64)], floor: f64) -> OrderEstimate {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(_, e)| *e > floor)
        .map(|&(h, e)| (h.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return OrderEstimate { order: f64::NAN, floor_reached: true };
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    OrderEstimate { order: sxy / sxx, floor_reached: pts.len() < samples.len() }
}

/// Self-convergence order from solutions at `dt, dt/r, dt/r², …` when no
/// reference is available: successive differences shrink like `dt^p`.
pub fn richardson_order<S: Components>(dts: &[f64], solutions: &[S], floor: f64) -> OrderEstimate {
    let diffs: Vec<(f64, f64)> = dts
        .windows(2)
        .zip(solutions.windows(2))
        .map(|(h, s)| (h[0], s[0].difference(&s[1]).l2_norm()))
        .collect();
    convergence_order(&diffs, floor)
}
