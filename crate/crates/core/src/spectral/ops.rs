//! Fourier multipliers, differential operators and the Leray projection.
//!
//! Differential operators act through their exact symbols (`∂_a ↔ i k_a`)
//! and zero the unpaired Nyquist planes. `[∇u]_ij = ∂_j u_i` and
//! `[∇·T]_i = Σ_j ∂_j T_ij` throughout.

use ndarray::Zip;
use num_complex::Complex64;

use super::field::{
    Components, SpectralScalar, SpectralSymTensor, SpectralTensor, SpectralVector, SYM_PAIRS,
};
use super::grid::Grid;
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Mean magnitude below which a field counts as mean-zero.
fn mean_tolerance(f: &SpectralScalar) -> f64 {
    1e-13 * (1.0 + f.coefficient_energy().sqrt())
}

fn check_mean_zero<F: Components>(field: &F) -> Result<()> {
    for c in field.components() {
        let mean = c.mean().norm();
        if mean > mean_tolerance(c) {
            return Err(Error::MeanNotZero { mean });
        }
    }
    Ok(())
}

fn with_symbol(
    grid: &Grid,
    f: &SpectralScalar,
    keep_nyquist: bool,
    symbol: impl Fn([f64; 3]) -> Complex64,
) -> SpectralScalar {
    let mut out = f.clone();
    out.map_modes(|idx, c| {
        if !keep_nyquist && grid.is_nyquist(idx) {
            Complex64::default()
        } else {
            c * symbol(grid.kvec(idx))
        }
    });
    out
}

/// `∂_axis f`
pub fn partial(grid: &Grid, f: &SpectralScalar, axis: usize) -> SpectralScalar {
    with_symbol(grid, f, false, |k| I * k[axis])
}

/// Fractional multiplier `|∇|^s`: mode `k` is scaled by `|k|^s`, and the
/// `k = 0` coefficient is sent to 0 for every `s ≠ 0`.
///
/// For `s < 0` the input must be mean-zero.
pub fn multiplier<F: Components>(grid: &Grid, field: &F, s: f64) -> Result<F> {
    if s == 0.0 {
        return Ok(field.clone());
    }
    if s < 0.0 {
        check_mean_zero(field)?;
    }
    Ok(field.map_components(|c| {
        with_symbol(grid, c, true, |k| {
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 == 0.0 {
                Complex64::default()
            } else {
                Complex64::new(k2.powf(0.5 * s), 0.0)
            }
        })
    }))
}

/// `|∇|^s` restricted to the nonzero modes, ignoring whatever mean is present.
pub fn multiplier_mean_free<F: Components>(grid: &Grid, field: &F, s: f64) -> F {
    let mut stripped = field.clone();
    for c in stripped.components_mut() {
        c.coefficients_mut()[(0, 0, 0)] = Complex64::default();
    }
    multiplier(grid, &stripped, s).expect("mean removed")
}

pub fn gradient(grid: &Grid, f: &SpectralScalar) -> SpectralVector {
    SpectralVector(std::array::from_fn(|a| partial(grid, f, a)))
}

pub fn divergence(grid: &Grid, v: &SpectralVector) -> SpectralScalar {
    let mut out = SpectralScalar::zeros(grid);
    let d = out.coefficients_mut();
    for (idx, o) in d.indexed_iter_mut() {
        if grid.is_nyquist(idx) {
            continue;
        }
        let k = grid.kvec(idx);
        *o = I * (k[0] * v.0[0].coefficients()[idx]
            + k[1] * v.0[1].coefficients()[idx]
            + k[2] * v.0[2].coefficients()[idx]);
    }
    out
}

/// Velocity-gradient tensor `[∇u]_ij = ∂_j u_i`.
pub fn vector_gradient(grid: &Grid, u: &SpectralVector) -> SpectralTensor {
    SpectralTensor(std::array::from_fn(|c| partial(grid, &u.0[c / 3], c % 3)))
}

/// `[∇·T]_i = Σ_j ∂_j T_ij` for a general tensor.
pub fn tensor_divergence_full(grid: &Grid, t: &SpectralTensor) -> SpectralVector {
    SpectralVector(std::array::from_fn(|i| {
        let mut out = SpectralScalar::zeros(grid);
        for (idx, o) in out.coefficients_mut().indexed_iter_mut() {
            if grid.is_nyquist(idx) {
                continue;
            }
            let k = grid.kvec(idx);
            *o = I * (0..3)
                .map(|j| t.get(i, j).coefficients()[idx] * k[j])
                .sum::<Complex64>();
        }
        out
    }))
}

/// `[∇·τ]_i = Σ_j ∂_j τ_ij` for a symmetric tensor.
pub fn tensor_divergence(grid: &Grid, tau: &SpectralSymTensor) -> SpectralVector {
    SpectralVector(std::array::from_fn(|i| {
        let mut out = SpectralScalar::zeros(grid);
        for (idx, o) in out.coefficients_mut().indexed_iter_mut() {
            if grid.is_nyquist(idx) {
                continue;
            }
            let k = grid.kvec(idx);
            *o = I * (0..3)
                .map(|j| tau.get(i, j).coefficients()[idx] * k[j])
                .sum::<Complex64>();
        }
        out
    }))
}

/// `∇·∇·τ = Σ_ij ∂_i ∂_j τ_ij`
pub fn double_divergence(grid: &Grid, tau: &SpectralSymTensor) -> SpectralScalar {
    let mut out = SpectralScalar::zeros(grid);
    for (idx, o) in out.coefficients_mut().indexed_iter_mut() {
        if grid.is_nyquist(idx) {
            continue;
        }
        let k = grid.kvec(idx);
        *o = -SYM_PAIRS
            .iter()
            .enumerate()
            .map(|(s, &(i, j))| {
                let w = if i == j { 1.0 } else { 2.0 };
                tau.0[s].coefficients()[idx] * (w * k[i] * k[j])
            })
            .sum::<Complex64>();
    }
    out
}

pub fn laplacian<F: Components>(grid: &Grid, field: &F) -> F {
    field.map_components(|c| {
        with_symbol(grid, c, false, |k| {
            Complex64::new(-(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]), 0.0)
        })
    })
}

/// `Δ⁻¹` on mean-zero input; the `k = 0` coefficient of the result is 0.
pub fn inv_laplacian<F: Components>(grid: &Grid, field: &F) -> Result<F> {
    check_mean_zero(field)?;
    Ok(inv_laplacian_mean_free(grid, field))
}

/// `Δ⁻¹` on the nonzero modes, discarding any mean.
pub fn inv_laplacian_mean_free<F: Components>(grid: &Grid, field: &F) -> F {
    field.map_components(|c| {
        with_symbol(grid, c, false, |k| {
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 == 0.0 {
                Complex64::default()
            } else {
                Complex64::new(-1.0 / k2, 0.0)
            }
        })
    })
}

/// Leray projection `P = I − Δ⁻¹∇div`: each nonzero mode is mapped by
/// `I − kkᵀ/|k|²`, the mean is left unchanged.
pub fn leray_project(grid: &Grid, v: &SpectralVector) -> SpectralVector {
    let mut out = v.clone();
    let [a, b, c] = &mut out.0;
    Zip::indexed(a.coefficients_mut())
        .and(b.coefficients_mut())
        .and(c.coefficients_mut())
        .for_each(|idx, x, y, z| {
            if grid.is_nyquist(idx) {
                *x = Complex64::default();
                *y = Complex64::default();
                *z = Complex64::default();
                return;
            }
            let k = grid.kvec(idx);
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 == 0.0 {
                return;
            }
            let dot = (*x * k[0] + *y * k[1] + *z * k[2]) / k2;
            *x -= dot * k[0];
            *y -= dot * k[1];
            *z -= dot * k[2];
        });
    out
}
