//! Incompressible viscoelasticity with Hookean elasticity,
//!
//! ```text
//! u_t + u·∇u − Δu + ∇p = ∇·(FFᵀ)
//! F_t + u·∇F = ∇u F
//! ```
//!
//! and its map onto the Oldroyd-B system through the conformation
//! deviation `G = FFᵀ − I`. With `[∇u]_ij = ∂_j u_i`, `G` obeys
//! `G_t + u·∇G + Q(G, ∇u) = 2D(u)` where `Q` carries slip parameter
//! [`HOOKEAN_SLIP`].

use ndarray::Array3;
use num_complex::Complex64;

use crate::diagnostics::{sobolev_norm, Sobolev};
use crate::model::{bilinear_q, sym_grad, ModelParams, OldroydState};
use crate::spectral::dealias::{advect, from_padded_physical, to_padded_physical};
use crate::spectral::ops::{laplacian, leray_project, partial, tensor_divergence, vector_gradient};
use crate::spectral::{
    Components, Grid, SpectralScalar, SpectralSymTensor, SpectralTensor, SpectralVector, SYM_PAIRS,
};

/// Slip parameter under which `G = FFᵀ − I` follows the Oldroyd-B stress
/// equation: `∇uG + G∇uᵀ = ΩG − GΩ + DG + GD = −Q(G, ∇u)` needs `b = −1`.
pub const HOOKEAN_SLIP: f64 = -1.0;

/// Oldroyd-B parameters reproducing the Hookean dynamics of `(u, G)`.
pub fn embedding_params() -> ModelParams {
    ModelParams { mu: 1.0, mu1: 1.0, mu2: 2.0, a: 0.0, b: HOOKEAN_SLIP }
}

/// Velocity and deformation deviation `U = F − I` (no symmetry assumed).
#[derive(Clone, Debug, PartialEq)]
pub struct HookeanState {
    pub u: SpectralVector,
    pub f_minus_i: SpectralTensor,
}

impl HookeanState {
    pub fn zeros(grid: &Grid) -> Self {
        Self { u: SpectralVector::zeros(grid), f_minus_i: SpectralTensor::zeros(grid) }
    }

    /// Oldroyd-B state carrying the same velocity and `τ = G(F)`.
    pub fn to_oldroyd(&self, grid: &Grid) -> OldroydState {
        OldroydState { u: self.u.clone(), tau: to_conformation(grid, &self.f_minus_i) }
    }
}

/// `G = (I + U)(I + U)ᵀ − I = U + Uᵀ + UUᵀ`.
pub fn to_conformation(grid: &Grid, f_minus_i: &SpectralTensor) -> SpectralSymTensor {
    let refs: Vec<&SpectralScalar> = f_minus_i.0.iter().collect();
    let phys = to_padded_physical(grid, &refs);
    let products: Vec<Array3<f64>> = SYM_PAIRS
        .iter()
        .map(|&(i, j)| {
            let mut acc = &phys[3 * i] * &phys[3 * j];
            for l in 1..3 {
                acc.zip_mut_with(&(&phys[3 * i + l] * &phys[3 * j + l]), |a, b| *a += b);
            }
            acc
        })
        .collect();
    let quad = from_padded_physical(grid, &products);
    SpectralSymTensor::from_components(
        SYM_PAIRS
            .iter()
            .zip(quad)
            .map(|(&(i, j), mut q)| {
                q.axpy(1.0, f_minus_i.get(i, j));
                q.axpy(1.0, f_minus_i.get(j, i));
                q
            })
            .collect(),
    )
}

/// Quadratic parts `(u·∇u, UUᵀ, −u·∇U + ∇u U)` from one padded evaluation.
fn hookean_quadratic(
    grid: &Grid,
    u: &SpectralVector,
    f: &SpectralTensor,
) -> (SpectralVector, SpectralSymTensor, SpectralTensor) {
    let grad_u = vector_gradient(grid, u);
    let mut inputs: Vec<SpectralScalar> = Vec::with_capacity(48);
    inputs.extend(u.0.iter().cloned());
    inputs.extend(grad_u.0);
    inputs.extend(f.0.iter().cloned());
    for c in &f.0 {
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
    let (def, ddef) = rest.split_at(9);
    let len = vel[0].len();
    let mut out: Vec<Vec<f64>> = vec![vec![0.0; len]; 18];
    for p in 0..len {
        let uu = [vel[0][p], vel[1][p], vel[2][p]];
        let g: [f64; 9] = std::array::from_fn(|c| grad[c][p]);
        let m: [f64; 9] = std::array::from_fn(|c| def[c][p]);
        for i in 0..3 {
            out[i][p] = uu[0] * g[3 * i] + uu[1] * g[3 * i + 1] + uu[2] * g[3 * i + 2];
        }
        for (slot, &(i, j)) in SYM_PAIRS.iter().enumerate() {
            out[3 + slot][p] =
                m[3 * i] * m[3 * j] + m[3 * i + 1] * m[3 * j + 1] + m[3 * i + 2] * m[3 * j + 2];
        }
        for c in 0..9 {
            let (i, j) = (c / 3, c % 3);
            let d = &ddef[3 * c..3 * c + 3];
            let transport = uu[0] * d[0][p] + uu[1] * d[1][p] + uu[2] * d[2][p];
            let stretch = g[3 * i] * m[j] + g[3 * i + 1] * m[3 + j] + g[3 * i + 2] * m[6 + j];
            out[9 + c][p] = stretch - transport;
        }
    }
    drop(phys);
    let n = grid.padded_n();
    let arrays: Vec<Array3<f64>> = out
        .into_iter()
        .map(|v| Array3::from_shape_vec((n, n, n), v).unwrap())
        .collect();
    let mut spec = from_padded_physical(grid, &arrays);
    let deformation = SpectralTensor::from_components(spec.split_off(9));
    let quad = SpectralSymTensor::from_components(spec.split_off(3));
    (SpectralVector::from_components(spec), quad, deformation)
}

/// The Hookean system as an evolution problem, unit viscosity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HookeanSystem {
    pub viscosity: f64,
}

impl Default for HookeanSystem {
    fn default() -> Self {
        Self { viscosity: 1.0 }
    }
}

impl HookeanSystem {
    /// Every term except `Δu`.
    pub fn explicit_rhs(&self, grid: &Grid, state: &HookeanState) -> HookeanState {
        let (adv, quad, mut df) = hookean_quadratic(grid, &state.u, &state.f_minus_i);
        let grad_u = vector_gradient(grid, &state.u);
        df.axpy(1.0, &grad_u);
        // ∇·(FFᵀ) = ∇·G, G = U + Uᵀ + UUᵀ
        let mut g = quad;
        for (slot, &(i, j)) in SYM_PAIRS.iter().enumerate() {
            g.0[slot].axpy(1.0, state.f_minus_i.get(i, j));
            g.0[slot].axpy(1.0, state.f_minus_i.get(j, i));
        }
        let mut forcing = tensor_divergence(grid, &g);
        forcing.axpy(-1.0, &adv);
        let mut du = leray_project(grid, &forcing);
        for c in &mut du.0 {
            c.coefficients_mut()[(0, 0, 0)] = Complex64::default();
        }
        HookeanState { u: du, f_minus_i: df }
    }

    pub fn rhs(&self, grid: &Grid, state: &HookeanState) -> HookeanState {
        let mut out = self.explicit_rhs(grid, state);
        out.u.axpy(self.viscosity, &laplacian(grid, &state.u));
        out
    }
}

/// `(u_t, F_t)` of the Hookean system.
pub fn hookean_rhs(grid: &Grid, state: &HookeanState) -> (SpectralVector, SpectralTensor) {
    let out = HookeanSystem::default().rhs(grid, state);
    (out.u, out.f_minus_i)
}

/// Relative mismatch between `d/dt(FFᵀ − I)` obtained by the chain rule from
/// the Hookean evolution and the Oldroyd-B stress law evaluated at `G`:
///
/// `‖U̇ + U̇ᵀ + U̇Uᵀ + UU̇ᵀ − [−u·∇G − Q(G, ∇u) + 2D(u)]‖ / max(1, ‖G‖)`.
///
/// Vanishes to round-off when every product is resolved on the grid, i.e.
/// for states band-limited to `|k| ≤ (n/2 − 1)/3`.
pub fn verify_g_closure(grid: &Grid, state: &HookeanState) -> f64 {
    g_closure_residual(grid, state, HOOKEAN_SLIP)
}

/// [`verify_g_closure`] against the stress law with an arbitrary slip `b`.
pub fn g_closure_residual(grid: &Grid, state: &HookeanState, b: f64) -> f64 {
    g_closure_residuals(grid, state, &[b])[0]
}

/// [`g_closure_residual`] for several slips, sharing everything but `Q`.
pub fn g_closure_residuals(grid: &Grid, state: &HookeanState, slips: &[f64]) -> Vec<f64> {
    let (_, df) = hookean_rhs(grid, state);
    let f = &state.f_minus_i;

    let refs: Vec<&SpectralScalar> = df.0.iter().chain(f.0.iter()).collect();
    let phys = to_padded_physical(grid, &refs);
    let (pd, pf) = phys.split_at(9);
    let cross: Vec<Array3<f64>> = SYM_PAIRS
        .iter()
        .map(|&(i, j)| {
            let mut acc = Array3::<f64>::zeros(pd[0].raw_dim());
            for l in 0..3 {
                acc.zip_mut_with(&(&pd[3 * i + l] * &pf[3 * j + l]), |a, b| *a += b);
                acc.zip_mut_with(&(&pf[3 * i + l] * &pd[3 * j + l]), |a, b| *a += b);
            }
            acc
        })
        .collect();
    let mut chain = SpectralSymTensor::from_components(from_padded_physical(grid, &cross));
    for (slot, &(i, j)) in SYM_PAIRS.iter().enumerate() {
        chain.0[slot].axpy(1.0, df.get(i, j));
        chain.0[slot].axpy(1.0, df.get(j, i));
    }

    let g = to_conformation(grid, f);
    let mut law = sym_grad(grid, &state.u);
    law.scale(2.0);
    law.axpy(-1.0, &advect(grid, &state.u, &g));
    let grad_u = vector_gradient(grid, &state.u);
    let scale = g.l2_norm().max(1.0);
    slips
        .iter()
        .map(|&b| {
            let mut r = chain.difference(&law);
            r.axpy(1.0, &bilinear_q(grid, &g, &grad_u, b));
            r.l2_norm() / scale
        })
        .collect()
}

/// `‖|∇|⁻¹(F₀F₀ᵀ − I)‖_{H³} / (‖|∇|⁻¹(F₀ − I)‖_{H³} + ‖F₀ − I‖²_{H³})`,
/// reported as a monitor of how the conformation data norm tracks the
/// deformation data norm.
pub fn conformation_data_ratio(grid: &Grid, f_minus_i: &SpectralTensor) -> f64 {
    let g = to_conformation(grid, f_minus_i);
    let num = sobolev_norm(grid, &g, Sobolev::inverse(3));
    let den = sobolev_norm(grid, f_minus_i, Sobolev::inverse(3))
        + sobolev_norm(grid, f_minus_i, Sobolev::h(3)).powi(2);
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}
