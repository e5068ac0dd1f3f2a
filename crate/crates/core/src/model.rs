//! Right-hand side of the incompressible Oldroyd-B system with the pressure
//! eliminated by the Leray projection:
//!
//! ```text
//! u_t = −P(u·∇u) + μΔu + μ₁ P∇·τ
//! τ_t = −u·∇τ − aτ − Q(τ, ∇u) + μ₂ D(u)
//! Q(τ, ∇u) = τΩ − Ωτ + b(Dτ + τD)
//! ```

use ndarray::Array3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::dealias::{from_padded_physical, to_padded_physical};
use crate::spectral::ops::{
    laplacian, leray_project, partial, tensor_divergence, vector_gradient,
};
use crate::spectral::{
    Components, Grid, SpectralScalar, SpectralSymTensor, SpectralTensor, SpectralVector, SYM_PAIRS,
};

/// Coefficients of the Oldroyd-B system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Viscosity `μ`.
    pub mu: f64,
    /// Stress coupling `μ₁` in the momentum equation.
    pub mu1: f64,
    /// Strain coupling `μ₂` in the stress equation.
    pub mu2: f64,
    /// Stress damping `a`; zero is the undamped regime.
    pub a: f64,
    /// Slip parameter `b ∈ [−1, 1]`; `b = 0` is the corotational case.
    pub b: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { mu: 1.0, mu1: 1.0, mu2: 1.0, a: 0.0, b: 0.0 }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        for (key, v) in [
            ("params.mu", self.mu),
            ("params.mu1", self.mu1),
            ("params.mu2", self.mu2),
            ("params.a", self.a),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::OutOfRange {
                    key: key.into(),
                    reason: format!("must be a finite non-negative number, got {v}"),
                });
            }
        }
        if !(-1.0..=1.0).contains(&self.b) {
            return Err(Error::OutOfRange {
                key: "params.b".into(),
                reason: format!("must lie in [-1, 1], got {}", self.b),
            });
        }
        Ok(())
    }
}

/// Velocity and elastic stress. The pressure is never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct OldroydState {
    pub u: SpectralVector,
    pub tau: SpectralSymTensor,
}

impl OldroydState {
    pub fn zeros(grid: &Grid) -> Self {
        Self { u: SpectralVector::zeros(grid), tau: SpectralSymTensor::zeros(grid) }
    }
}

/// How the `k = 0` coefficient of τ is treated during evolution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TauMean {
    /// Evolve the mean faithfully; it is reported separately.
    #[default]
    Evolve,
    /// Hold the mean of τ at zero.
    Remove,
}

/// `D(u) = ½(∇u + ∇uᵀ)`
pub fn sym_grad(grid: &Grid, u: &SpectralVector) -> SpectralSymTensor {
    vector_gradient(grid, u).symmetric_part()
}

/// `Ω(u) = ½(∇u − ∇uᵀ)`
pub fn skew_grad(grid: &Grid, u: &SpectralVector) -> SpectralTensor {
    vector_gradient(grid, u).skew_part()
}

/// `P∇·τ`, the only part of the stress that feels dissipation.
pub fn projected_stress_div(grid: &Grid, tau: &SpectralSymTensor) -> SpectralVector {
    leray_project(grid, &tensor_divergence(grid, tau))
}

/// Pointwise `Q(τ, ∇u)` from symmetric storage of τ and row-major `∇u`,
/// symmetrized on output.
#[inline]
pub fn q_pointwise(tau: &[f64; 6], grad_u: &[f64; 9], b: f64) -> [f64; 6] {
    let t = |i: usize, j: usize| tau[crate::spectral::sym_index(i, j)];
    let g = |i: usize, j: usize| grad_u[3 * i + j];
    let d = |i: usize, j: usize| 0.5 * (g(i, j) + g(j, i));
    let w = |i: usize, j: usize| 0.5 * (g(i, j) - g(j, i));
    let full = |i: usize, j: usize| {
        let mut q = 0.0;
        for l in 0..3 {
            q += t(i, l) * w(l, j) - w(i, l) * t(l, j) + b * (d(i, l) * t(l, j) + t(i, l) * d(l, j));
        }
        q
    };
    std::array::from_fn(|s| {
        let (i, j) = SYM_PAIRS[s];
        if i == j {
            full(i, i)
        } else {
            0.5 * (full(i, j) + full(j, i))
        }
    })
}

/// `Q(τ, ∇u) = τΩ − Ωτ + b(Dτ + τD)`, evaluated alias-free.
pub fn bilinear_q(
    grid: &Grid,
    tau: &SpectralSymTensor,
    grad_u: &SpectralTensor,
    b: f64,
) -> SpectralSymTensor {
    let refs: Vec<&SpectralScalar> = tau.0.iter().chain(grad_u.0.iter()).collect();
    let phys = to_padded_physical(grid, &refs);
    let slices: Vec<&[f64]> = phys.iter().map(|a| a.as_slice().unwrap()).collect();
    let len = slices[0].len();
    let mut out: Vec<Vec<f64>> = vec![vec![0.0; len]; 6];
    for p in 0..len {
        let t: [f64; 6] = std::array::from_fn(|s| slices[s][p]);
        let g: [f64; 9] = std::array::from_fn(|c| slices[6 + c][p]);
        let q = q_pointwise(&t, &g, b);
        for s in 0..6 {
            out[s][p] = q[s];
        }
    }
    let m = grid.padded_n();
    let arrays: Vec<Array3<f64>> = out
        .into_iter()
        .map(|v| Array3::from_shape_vec((m, m, m), v).unwrap())
        .collect();
    SpectralSymTensor::from_components(from_padded_physical(grid, &arrays))
}

/// Quadratic terms `(u·∇u, u·∇τ + Q(τ, ∇u))` from one padded evaluation.
pub(crate) fn oldroyd_quadratic(
    grid: &Grid,
    u: &SpectralVector,
    tau: &SpectralSymTensor,
    b: f64,
) -> (SpectralVector, SpectralSymTensor) {
    let grad_u = vector_gradient(grid, u);
    let mut inputs: Vec<SpectralScalar> = Vec::with_capacity(36);
    inputs.extend(u.0.iter().cloned());
    inputs.extend(grad_u.0);
    inputs.extend(tau.0.iter().cloned());
    for c in &tau.0 {
        for axis in 0..3 {
            inputs.push(partial(grid, c, axis));
        }
    }
    let refs: Vec<&SpectralScalar> = inputs.iter().collect();
    let phys = to_padded_physical(grid, &refs);
    drop(inputs);
    let s: Vec<&[f64]> = phys.iter().map(|a| a.as_slice().unwrap()).collect();
    let (vel, rest) = s.split_at(3);
    let (grad, rest) = rest.split_at(9);
    let (stress, dstress) = rest.split_at(6);
    let len = vel[0].len();
    let mut out: Vec<Vec<f64>> = vec![vec![0.0; len]; 9];
    for p in 0..len {
        let uu = [vel[0][p], vel[1][p], vel[2][p]];
        let g: [f64; 9] = std::array::from_fn(|c| grad[c][p]);
        for i in 0..3 {
            out[i][p] = uu[0] * g[3 * i] + uu[1] * g[3 * i + 1] + uu[2] * g[3 * i + 2];
        }
        let t: [f64; 6] = std::array::from_fn(|c| stress[c][p]);
        let q = q_pointwise(&t, &g, b);
        for c in 0..6 {
            let d = &dstress[3 * c..3 * c + 3];
            out[3 + c][p] = uu[0] * d[0][p] + uu[1] * d[1][p] + uu[2] * d[2][p] + q[c];
        }
    }
    drop(phys);
    let m = grid.padded_n();
    let arrays: Vec<Array3<f64>> = out
        .into_iter()
        .map(|v| Array3::from_shape_vec((m, m, m), v).unwrap())
        .collect();
    let mut spec = from_padded_physical(grid, &arrays);
    let tau_part = SpectralSymTensor::from_components(spec.split_off(3));
    (SpectralVector::from_components(spec), tau_part)
}

/// The Oldroyd-B system as an evolution problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OldroydSystem {
    pub params: ModelParams,
    /// When false only the linear coupling, viscosity and damping remain.
    pub nonlinear: bool,
    pub tau_mean: TauMean,
}

impl OldroydSystem {
    pub fn new(params: ModelParams) -> Self {
        Self { params, nonlinear: true, tau_mean: TauMean::Evolve }
    }

    pub fn linearized(params: ModelParams) -> Self {
        Self { params, nonlinear: false, tau_mean: TauMean::Evolve }
    }

    /// Every term except the viscous `μΔu`.
    pub fn explicit_rhs(&self, grid: &Grid, state: &OldroydState) -> OldroydState {
        let p = &self.params;
        let mut du = projected_stress_div(grid, &state.tau);
        du.scale(p.mu1);
        let mut dtau = sym_grad(grid, &state.u);
        dtau.scale(p.mu2);
        if p.a != 0.0 {
            dtau.axpy(-p.a, &state.tau);
        }
        if self.nonlinear {
            let (adv, stress_terms) = oldroyd_quadratic(grid, &state.u, &state.tau, p.b);
            du.axpy(-1.0, &leray_project(grid, &adv));
            dtau.axpy(-1.0, &stress_terms);
        }
        for c in &mut du.0 {
            c.coefficients_mut()[(0, 0, 0)] = Complex64::default();
        }
        if self.tau_mean == TauMean::Remove {
            dtau.remove_mean();
        }
        OldroydState { u: du, tau: dtau }
    }

    /// Full time derivative `(u_t, τ_t)`.
    pub fn rhs(&self, grid: &Grid, state: &OldroydState) -> OldroydState {
        let mut out = self.explicit_rhs(grid, state);
        out.u.axpy(self.params.mu, &laplacian(grid, &state.u));
        out
    }
}

/// `(u_t, τ_t)` for the nonlinear system with the given parameters.
pub fn oldroyd_rhs(
    grid: &Grid,
    state: &OldroydState,
    params: &ModelParams,
) -> (SpectralVector, SpectralSymTensor) {
    let out = OldroydSystem::new(*params).rhs(grid, state);
    (out.u, out.tau)
}
