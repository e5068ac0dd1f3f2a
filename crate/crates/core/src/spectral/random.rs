//! Random band-limited fields with exact Hermitian symmetry.

use num_complex::Complex64;
use rand::Rng;

use super::field::{Components, SpectralScalar, SpectralSymTensor, SpectralTensor, SpectralVector};
use super::grid::Grid;
use super::ops::leray_project;

/// Random real scalar supported on `0 < |k| ≤ kmax`, coefficients uniform in
/// the unit square. The mean is zero.
pub fn scalar<R: Rng + ?Sized>(grid: &Grid, rng: &mut R, kmax: f64) -> SpectralScalar {
    let mut f = SpectralScalar::zeros(grid);
    let k2max = kmax * kmax;
    let shape = grid.shape();
    for i0 in 0..shape.0 {
        for i1 in 0..shape.1 {
            for i2 in 0..shape.2 {
                let idx = (i0, i1, i2);
                let conj = grid.conjugate_index(idx);
                // visit each ±k pair once, in a fixed order
                if conj < idx || grid.is_nyquist(idx) {
                    continue;
                }
                let k2 = grid.k2(idx);
                if k2 == 0.0 || k2 > k2max {
                    continue;
                }
                let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                f.coefficients_mut()[idx] = c;
                f.coefficients_mut()[conj] = c.conj();
            }
        }
    }
    f
}

/// Random field of any rank, each component drawn by [`scalar`].
pub fn field<F: Components, R: Rng + ?Sized>(grid: &Grid, rng: &mut R, kmax: f64, count: usize) -> F {
    F::from_components((0..count).map(|_| scalar(grid, rng, kmax)).collect())
}

/// Random divergence-free, mean-zero velocity.
pub fn solenoidal<R: Rng + ?Sized>(grid: &Grid, rng: &mut R, kmax: f64) -> SpectralVector {
    leray_project(grid, &field::<SpectralVector, _>(grid, rng, kmax, 3))
}

pub fn sym_tensor<R: Rng + ?Sized>(grid: &Grid, rng: &mut R, kmax: f64) -> SpectralSymTensor {
    field(grid, rng, kmax, 6)
}

pub fn tensor<R: Rng + ?Sized>(grid: &Grid, rng: &mut R, kmax: f64) -> SpectralTensor {
    field(grid, rng, kmax, 9)
}
