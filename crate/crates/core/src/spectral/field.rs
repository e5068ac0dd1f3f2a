//! Fourier-coefficient fields of rank 0, 1 and 2.

use ndarray::{Array3, Zip};
use num_complex::Complex64;

use super::grid::{Grid, BOX_VOLUME};
use crate::error::{Error, Result};

/// Fourier coefficients of a real scalar field.
///
/// The coefficient stored at wavenumber `k` is the amplitude of `e^{ik·x}`,
/// so a constant field `c` has a single coefficient `c` at `k = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralScalar {
    data: Array3<Complex64>,
}

impl SpectralScalar {
    pub fn zeros(grid: &Grid) -> Self {
        Self { data: Array3::zeros(grid.shape()) }
    }

    pub fn from_coefficients(data: Array3<Complex64>) -> Self {
        Self { data }
    }

    pub fn coefficients(&self) -> &Array3<Complex64> {
        &self.data
    }

    pub fn coefficients_mut(&mut self) -> &mut Array3<Complex64> {
        &mut self.data
    }

    pub fn into_coefficients(self) -> Array3<Complex64> {
        self.data
    }

    pub fn n(&self) -> usize {
        self.data.shape()[0]
    }

    /// Coefficient at a given wavenumber, zero when unrepresentable.
    pub fn mode(&self, grid: &Grid, k: [i64; 3]) -> Complex64 {
        grid.index_of(k).map_or(Complex64::default(), |i| self.data[i])
    }

    /// Sets the coefficient at `k` and the conjugate one at `−k`.
    pub fn set_mode(&mut self, grid: &Grid, k: [i64; 3], value: Complex64) {
        let idx = grid.index_of(k).expect("wavenumber outside grid");
        let conj = grid.conjugate_index(idx);
        if conj == idx {
            self.data[idx] = Complex64::new(value.re, 0.0);
        } else {
            self.data[idx] = value;
            self.data[conj] = value.conj();
        }
    }

    pub fn mean(&self) -> Complex64 {
        self.data[(0, 0, 0)]
    }

    /// Samples on the base grid.
    pub fn forward(grid: &Grid, samples: &Array3<f64>) -> Result<Self> {
        let n = grid.n();
        if samples.shape() != [n, n, n] {
            return Err(Error::SizeMismatch {
                expected: n,
                found: samples.shape().iter().copied().find(|&s| s != n).unwrap_or(0),
            });
        }
        let mut data = samples.mapv(|v| Complex64::new(v, 0.0));
        grid.fft_base(&mut data, true);
        let scale = 1.0 / (n * n * n) as f64;
        data.mapv_inplace(|c| c * scale);
        Ok(Self { data })
    }

    /// Physical samples on the base grid, `x_a = 2π i_a / n`.
    pub fn inverse(&self, grid: &Grid) -> Array3<f64> {
        let mut data = self.data.clone();
        grid.fft_base(&mut data, false);
        data.mapv(|c| c.re)
    }

    /// Largest violation of `ĉ(−k) = conj(ĉ(k))` over all modes.
    pub fn reality_defect(&self, grid: &Grid) -> f64 {
        let mut worst: f64 = 0.0;
        for (idx, c) in self.data.indexed_iter() {
            let partner = self.data[grid.conjugate_index(idx)];
            worst = worst.max((c - partner.conj()).norm());
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn scale(&mut self, a: f64) {
        self.data.mapv_inplace(|c| c * a);
    }

    /// `self += a · x`
    pub fn axpy(&mut self, a: f64, x: &Self) {
        Zip::from(&mut self.data).and(&x.data).for_each(|s, &v| *s += v * a);
    }

    /// `Σ_k |ĉ(k)|²`, without the box volume.
    pub fn coefficient_energy(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Discrete `L²` inner product `∫ f g dx` via Parseval.
    pub fn inner(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        Zip::from(&self.data)
            .and(&other.data)
            .for_each(|a, b| acc += (a * b.conj()).re);
        BOX_VOLUME * acc
    }

    /// Replaces each coefficient by `f(idx, c)`.
    pub fn map_modes(&mut self, mut f: impl FnMut((usize, usize, usize), Complex64) -> Complex64) {
        for (idx, c) in self.data.indexed_iter_mut() {
            *c = f(idx, *c);
        }
    }
}

/// A field made of a fixed number of scalar components.
pub trait Components: Clone {
    fn components(&self) -> &[SpectralScalar];
    fn components_mut(&mut self) -> &mut [SpectralScalar];
    fn from_components(components: Vec<SpectralScalar>) -> Self;

    /// Multiplicity of each stored component in the Frobenius pairing.
    fn pairing_weight(_component: usize) -> f64 {
        1.0
    }

    fn zeros_like(&self) -> Self {
        Self::from_components(
            self.components()
                .iter()
                .map(|c| SpectralScalar { data: Array3::zeros(c.data.raw_dim()) })
                .collect(),
        )
    }

    fn map_components(&self, mut f: impl FnMut(&SpectralScalar) -> SpectralScalar) -> Self {
        Self::from_components(self.components().iter().map(&mut f).collect())
    }

    fn scale(&mut self, a: f64) {
        self.components_mut().iter_mut().for_each(|c| c.scale(a));
    }

    fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.components_mut().iter_mut().zip(x.components()) {
            s.axpy(a, v);
        }
    }

    fn sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    fn difference(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// `∫ f : g dx` with full index contraction.
    fn inner(&self, other: &Self) -> f64 {
        self.components()
            .iter()
            .zip(other.components())
            .enumerate()
            .map(|(i, (a, b))| Self::pairing_weight(i) * a.inner(b))
            .sum()
    }

    fn l2_norm(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    fn is_finite(&self) -> bool {
        self.components().iter().all(SpectralScalar::is_finite)
    }
}

impl Components for SpectralScalar {
    fn components(&self) -> &[SpectralScalar] {
        std::slice::from_ref(self)
    }
    fn components_mut(&mut self) -> &mut [SpectralScalar] {
        std::slice::from_mut(self)
    }
    fn from_components(mut components: Vec<SpectralScalar>) -> Self {
        assert_eq!(components.len(), 1);
        components.pop().unwrap()
    }
}

fn into_array<const N: usize>(components: Vec<SpectralScalar>) -> [SpectralScalar; N] {
    components
        .try_into()
        .unwrap_or_else(|v: Vec<_>| panic!("expected {N} components, got {}", v.len()))
}

/// Three-component vector field.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralVector(pub [SpectralScalar; 3]);

impl SpectralVector {
    pub fn zeros(grid: &Grid) -> Self {
        Self(std::array::from_fn(|_| SpectralScalar::zeros(grid)))
    }

    pub fn forward(grid: &Grid, samples: &[Array3<f64>; 3]) -> Result<Self> {
        Ok(Self([
            SpectralScalar::forward(grid, &samples[0])?,
            SpectralScalar::forward(grid, &samples[1])?,
            SpectralScalar::forward(grid, &samples[2])?,
        ]))
    }

    pub fn inverse(&self, grid: &Grid) -> [Array3<f64>; 3] {
        std::array::from_fn(|i| self.0[i].inverse(grid))
    }
}

impl Components for SpectralVector {
    fn components(&self) -> &[SpectralScalar] {
        &self.0
    }
    fn components_mut(&mut self) -> &mut [SpectralScalar] {
        &mut self.0
    }
    fn from_components(components: Vec<SpectralScalar>) -> Self {
        Self(into_array(components))
    }
}

/// Storage slot of the symmetric pair `(i, j)`: order 11, 22, 33, 12, 13, 23.
#[inline]
pub const fn sym_index(i: usize, j: usize) -> usize {
    match (i, j) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (0, 1) | (1, 0) => 3,
        (0, 2) | (2, 0) => 4,
        (1, 2) | (2, 1) => 5,
        _ => panic!("tensor index out of range"),
    }
}

/// Index pair stored in each symmetric slot.
pub const SYM_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

/// Symmetric 3×3 tensor field holding the six independent entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSymTensor(pub [SpectralScalar; 6]);

impl SpectralSymTensor {
    pub fn zeros(grid: &Grid) -> Self {
        Self(std::array::from_fn(|_| SpectralScalar::zeros(grid)))
    }

    pub fn get(&self, i: usize, j: usize) -> &SpectralScalar {
        &self.0[sym_index(i, j)]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut SpectralScalar {
        &mut self.0[sym_index(i, j)]
    }

    pub fn to_full(&self) -> SpectralTensor {
        SpectralTensor(std::array::from_fn(|c| self.get(c / 3, c % 3).clone()))
    }

    /// Frobenius norm of the `k = 0` coefficient matrix.
    pub fn mean_frobenius(&self) -> f64 {
        (0..6)
            .map(|c| Self::pairing_weight(c) * self.0[c].mean().norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn remove_mean(&mut self) {
        for c in &mut self.0 {
            c.coefficients_mut()[(0, 0, 0)] = Complex64::default();
        }
    }
}

impl Components for SpectralSymTensor {
    fn components(&self) -> &[SpectralScalar] {
        &self.0
    }
    fn components_mut(&mut self) -> &mut [SpectralScalar] {
        &mut self.0
    }
    fn from_components(components: Vec<SpectralScalar>) -> Self {
        Self(into_array(components))
    }
    fn pairing_weight(component: usize) -> f64 {
        if component < 3 {
            1.0
        } else {
            2.0
        }
    }
}

/// General 3×3 tensor field, row-major (`T_ij` at slot `3i + j`).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralTensor(pub [SpectralScalar; 9]);

impl SpectralTensor {
    pub fn zeros(grid: &Grid) -> Self {
        Self(std::array::from_fn(|_| SpectralScalar::zeros(grid)))
    }

    pub fn get(&self, i: usize, j: usize) -> &SpectralScalar {
        &self.0[3 * i + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut SpectralScalar {
        &mut self.0[3 * i + j]
    }

    pub fn transpose(&self) -> Self {
        Self(std::array::from_fn(|c| self.get(c % 3, c / 3).clone()))
    }

    /// `½(T + Tᵀ)`
    pub fn symmetric_part(&self) -> SpectralSymTensor {
        SpectralSymTensor(std::array::from_fn(|s| {
            let (i, j) = SYM_PAIRS[s];
            let mut out = self.get(i, j).clone();
            if i != j {
                out.axpy(1.0, self.get(j, i));
                out.scale(0.5);
            }
            out
        }))
    }

    /// `½(T − Tᵀ)`
    pub fn skew_part(&self) -> SpectralTensor {
        let t = self.transpose();
        let mut out = self.difference(&t);
        out.scale(0.5);
        out
    }
}

impl Components for SpectralTensor {
    fn components(&self) -> &[SpectralScalar] {
        &self.0
    }
    fn components_mut(&mut self) -> &mut [SpectralScalar] {
        &mut self.0
    }
    fn from_components(components: Vec<SpectralScalar>) -> Self {
        Self(into_array(components))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample(grid: &Grid, f: impl Fn(f64, f64, f64) -> f64) -> Array3<f64> {
        let h = grid.spacing();
        Array3::from_shape_fn(grid.shape(), |(a, b, c)| {
            f(a as f64 * h, b as f64 * h, c as f64 * h)
        })
    }

    #[test]
    fn constant_maps_to_mean_only() {
        let g = Grid::new(8).unwrap();
        let f = SpectralScalar::forward(&g, &Array3::from_elem(g.shape(), 2.5)).unwrap();
        for (idx, c) in f.coefficients().indexed_iter() {
            let expect = if idx == (0, 0, 0) { 2.5 } else { 0.0 };
            assert!((c - Complex64::new(expect, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn cosine_has_half_amplitudes() {
        let g = Grid::new(8).unwrap();
        let f = SpectralScalar::forward(&g, &sample(&g, |x, _, _| x.cos())).unwrap();
        assert!((f.mode(&g, [1, 0, 0]) - 0.5).norm() < 1e-15);
        assert!((f.mode(&g, [-1, 0, 0]) - 0.5).norm() < 1e-15);
        let rest: f64 = f.coefficient_energy() - 0.5;
        assert!(rest.abs() < 1e-15);
    }

    #[test]
    fn size_mismatch_rejected() {
        let g = Grid::new(8).unwrap();
        let bad = Array3::zeros((8, 8, 10));
        assert!(matches!(
            SpectralScalar::forward(&g, &bad),
            Err(Error::SizeMismatch { expected: 8, found: 10 })
        ));
    }

    #[test]
    fn parseval_for_cosine() {
        let g = Grid::new(8).unwrap();
        let f = SpectralScalar::forward(&g, &sample(&g, |x, _, _| x.cos())).unwrap();
        let expect = 8.0 * PI * PI * PI / 2.0;
        assert!((f.inner(&f) - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn sym_tensor_frobenius_counts_off_diagonal_twice() {
        let g = Grid::new(8).unwrap();
        let mut t = SpectralSymTensor::zeros(&g);
        t.get_mut(0, 1).set_mode(&g, [0, 0, 0], Complex64::new(1.0, 0.0));
        let full = t.to_full();
        assert!((t.inner(&t) - full.inner(&full)).abs() < 1e-12);
        assert!((t.mean_frobenius() - 2f64.sqrt()).abs() < 1e-15);
    }
}
