//! Grid geometry, wavenumbers and FFT plans for the periodic box.

use std::fmt;
use std::sync::Arc;

use ndarray::Array3;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Side length of the periodic box.
pub const BOX_LENGTH: f64 = 2.0 * std::f64::consts::PI;

/// Volume of the periodic box, `(2π)³`.
pub const BOX_VOLUME: f64 = BOX_LENGTH * BOX_LENGTH * BOX_LENGTH;

#[derive(Clone)]
struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Plans {
    fn new(planner: &mut FftPlanner<f64>, len: usize) -> Self {
        Self {
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }
}

/// Uniform discretization of the 2π-periodic box with `n` points per axis.
///
/// Spectral arrays are indexed `[i1, i2, i3]` with axis `a` carrying the
/// wavenumber `k_a`; index `i` maps to `i` for `i < n/2` and to `i − n`
/// otherwise. Quadratic products are evaluated on a padded grid with
/// `⌈3n/2⌉` points (rounded up to even), which is alias-free for every
/// mode with `|k_a| < n/2`.
#[derive(Clone)]
pub struct Grid {
    n: usize,
    pad: usize,
    base: Plans,
    padded: Plans,
    wavenumbers: Vec<f64>,
    /// Padded indices that carry a base-grid mode.
    band: Vec<bool>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("n", &self.n).field("pad", &self.pad).finish()
    }
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::OutOfRange {
                key: "grid.n".into(),
                reason: format!("must be even and at least 8, got {n}"),
            });
        }
        let pad = {
            let p = (3 * n).div_ceil(2);
            p + p % 2
        };
        let mut planner = FftPlanner::new();
        let base = Plans::new(&mut planner, n);
        let padded = Plans::new(&mut planner, pad);
        let wavenumbers = (0..n).map(|i| wavenumber(i, n) as f64).collect();
        let band = (0..pad).map(|p| p < n / 2 || p > pad - n / 2).collect();
        Ok(Self { n, pad, base, padded, wavenumbers, band })
    }

    /// Points per dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Points per dimension of the dealiasing grid.
    pub fn padded_n(&self) -> usize {
        self.pad
    }

    pub fn spacing(&self) -> f64 {
        BOX_LENGTH / self.n as f64
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.n, self.n, self.n)
    }

    /// Signed wavenumber for an array index along any axis.
    #[inline]
    pub fn k(&self, index: usize) -> f64 {
        self.wavenumbers[index]
    }

    /// Index whose wavenumber is `−n/2`. Coefficients there have no
    /// Hermitian partner and are dropped by derivatives and products.
    #[inline]
    pub fn nyquist(&self) -> usize {
        self.n / 2
    }

    #[inline]
    pub fn is_nyquist(&self, idx: (usize, usize, usize)) -> bool {
        let q = self.n / 2;
        idx.0 == q || idx.1 == q || idx.2 == q
    }

    #[inline]
    pub fn kvec(&self, idx: (usize, usize, usize)) -> [f64; 3] {
        [self.k(idx.0), self.k(idx.1), self.k(idx.2)]
    }

    #[inline]
    pub fn k2(&self, idx: (usize, usize, usize)) -> f64 {
        let [a, b, c] = self.kvec(idx);
        a * a + b * b + c * c
    }

    /// Array index holding the wavenumber `k`, if it is representable.
    pub fn index_of(&self, k: [i64; 3]) -> Option<(usize, usize, usize)> {
        let n = self.n as i64;
        let one = |k: i64| -> Option<usize> {
            if k >= -n / 2 && k < n / 2 {
                Some(k.rem_euclid(n) as usize)
            } else {
                None
            }
        };
        Some((one(k[0])?, one(k[1])?, one(k[2])?))
    }

    /// Index of `−k` (modulo `n`).
    #[inline]
    pub fn conjugate_index(&self, idx: (usize, usize, usize)) -> (usize, usize, usize) {
        let n = self.n;
        ((n - idx.0) % n, (n - idx.1) % n, (n - idx.2) % n)
    }

    pub(crate) fn fft_base(&self, data: &mut Array3<Complex64>, forward: bool) {
        let plan = if forward { &self.base.forward } else { &self.base.inverse };
        fft3(data, plan.as_ref(), None);
    }

    /// Padded-grid transform. The inverse assumes its input is supported
    /// on the base band; the forward only produces valid output there.
    pub(crate) fn fft_padded(&self, data: &mut Array3<Complex64>, forward: bool) {
        let plan = if forward { &self.padded.forward } else { &self.padded.inverse };
        fft3(data, plan.as_ref(), Some((&self.band, forward)));
    }
}

/// Signed wavenumber of index `i` on an `n`-point axis.
#[inline]
pub fn wavenumber(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// `dst[c·rows + r] = src[r·cols + c]`, in cache-sized tiles.
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const TILE: usize = 16;
    for r0 in (0..rows).step_by(TILE) {
        for c0 in (0..cols).step_by(TILE) {
            for r in r0..(r0 + TILE).min(rows) {
                for c in c0..(c0 + TILE).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

/// Unnormalized 3D transform along all three axes of a cubic array.
///
/// With a band mask, lines that are identically zero on input (inverse
/// direction) or discarded on output (forward direction) are skipped.
fn fft3(data: &mut Array3<Complex64>, fft: &dyn Fft<f64>, band: Option<(&[bool], bool)>) {
    let len = fft.len();
    debug_assert_eq!(data.shape(), &[len, len, len]);
    let plane = len * len;
    let keep = |i: usize| band.map_or(true, |(b, _)| b[i]);
    let forward = band.is_some_and(|(_, f)| f);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let mut buf = vec![Complex64::default(); data.len()];
    let data = data.as_slice_mut().expect("standard layout");

    let axis2 = |data: &mut [Complex64], scratch: &mut [Complex64]| {
        for i0 in (0..len).filter(|&i| keep(i)) {
            for i1 in (0..len).filter(|&i| keep(i)) {
                let off = i0 * plane + i1 * len;
                fft.process_with_scratch(&mut data[off..off + len], scratch);
            }
        }
    };
    let axis1 = |data: &mut [Complex64], buf: &mut [Complex64], scratch: &mut [Complex64]| {
        for i0 in (0..len).filter(|&i| keep(i)) {
            let (src, tmp) = (&mut data[i0 * plane..(i0 + 1) * plane], &mut buf[..plane]);
            transpose(src, tmp, len, len);
            fft.process_with_scratch(tmp, scratch);
            transpose(tmp, src, len, len);
        }
    };
    let axis0 = |data: &mut [Complex64], buf: &mut [Complex64], scratch: &mut [Complex64]| {
        transpose(data, buf, len, plane);
        fft.process_with_scratch(buf, scratch);
        transpose(buf, data, plane, len);
    };

    if forward {
        axis0(data, &mut buf, &mut scratch);
        axis1(data, &mut buf, &mut scratch);
        axis2(data, &mut scratch);
    } else {
        axis2(data, &mut scratch);
        axis1(data, &mut buf, &mut scratch);
        axis0(data, &mut buf, &mut scratch);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pad_size_is_even_three_halves() {
        assert_eq!(Grid::new(8).unwrap().padded_n(), 12);
        assert_eq!(Grid::new(10).unwrap().padded_n(), 16);
        assert_eq!(Grid::new(32).unwrap().padded_n(), 48);
    }

    #[test]
    fn rejects_odd_and_small() {
        assert!(Grid::new(7).is_err());
        assert!(Grid::new(6).is_err());
    }

    #[test]
    fn index_roundtrip() {
        let g = Grid::new(8).unwrap();
        let idx = g.index_of([-4, 3, -1]).unwrap();
        assert_eq!(idx, (4, 3, 7));
        assert_eq!(g.kvec(idx), [-4.0, 3.0, -1.0]);
        assert!(g.index_of([4, 0, 0]).is_none());
        assert_eq!(g.conjugate_index((1, 0, 7)), (7, 0, 1));
    }
}
