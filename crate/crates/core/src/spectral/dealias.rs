//! Alias-free quadratic products by 3/2 zero-padding.
//!
//! Fields are lifted onto the padded grid, multiplied pointwise there and
//! truncated back. For inputs supported on `|k_a| < n/2` the retained
//! coefficients of every quadratic product are exact. Two real fields share
//! one complex transform in both directions.

use ndarray::{Array3, Zip};
use num_complex::Complex64;

use super::field::{Components, SpectralScalar, SpectralTensor, SpectralVector};
use super::grid::Grid;
use super::ops::partial;

/// Padded-grid index holding base index `i`.
#[inline]
fn padded_index(i: usize, n: usize, m: usize) -> usize {
    if i < n / 2 {
        i
    } else {
        i + m - n
    }
}

/// Pairs `(base offset, padded offset, run length)` of contiguous runs of
/// retained modes, in row-major order.
fn runs(grid: &Grid) -> Vec<(usize, usize, usize)> {
    let (n, m) = (grid.n(), grid.padded_n());
    let h = n / 2;
    let axis: Vec<usize> = (0..n).filter(|&i| i != h).collect();
    let mut out = Vec::with_capacity(2 * axis.len() * axis.len());
    for &i0 in &axis {
        let p0 = padded_index(i0, n, m);
        for &i1 in &axis {
            let p1 = padded_index(i1, n, m);
            let (b, p) = ((i0 * n + i1) * n, (p0 * m + p1) * m);
            out.push((b, p, h));
            out.push((b + h + 1, p + m - h + 1, h - 1));
        }
    }
    out
}

fn lift(grid: &Grid, a: &SpectralScalar, b: Option<&SpectralScalar>) -> Array3<Complex64> {
    let m = grid.padded_n();
    let mut out = Array3::<Complex64>::zeros((m, m, m));
    let dst = out.as_slice_mut().unwrap();
    let sa = a.coefficients().as_slice().unwrap();
    let sb = b.map(|b| b.coefficients().as_slice().unwrap());
    for (bo, po, len) in runs(grid) {
        let d = &mut dst[po..po + len];
        match sb {
            None => d.copy_from_slice(&sa[bo..bo + len]),
            Some(sb) => {
                for ((o, x), y) in d.iter_mut().zip(&sa[bo..bo + len]).zip(&sb[bo..bo + len]) {
                    // a + i b
                    *o = Complex64::new(x.re - y.im, x.im + y.re);
                }
            }
        }
    }
    out
}

/// Physical samples of the given spectral fields on the padded grid.
pub fn to_padded_physical(grid: &Grid, fields: &[&SpectralScalar]) -> Vec<Array3<f64>> {
    let mut out = Vec::with_capacity(fields.len());
    for pair in fields.chunks(2) {
        let mut spec = lift(grid, pair[0], pair.get(1).copied());
        grid.fft_padded(&mut spec, false);
        out.push(spec.mapv(|c| c.re));
        if pair.len() == 2 {
            out.push(spec.mapv(|c| c.im));
        }
    }
    out
}

/// Truncated spectra of real samples given on the padded grid.
pub fn from_padded_physical(grid: &Grid, samples: &[Array3<f64>]) -> Vec<SpectralScalar> {
    let m = grid.padded_n();
    let scale = 1.0 / (m * m * m) as f64;
    let runs = runs(grid);
    let mut out = Vec::with_capacity(samples.len());
    for pair in samples.chunks(2) {
        let mut spec = Array3::<Complex64>::zeros((m, m, m));
        match pair {
            [a, b] => Zip::from(&mut spec)
                .and(a)
                .and(b)
                .for_each(|s, &x, &y| *s = Complex64::new(x, y)),
            [a] => Zip::from(&mut spec)
                .and(a)
                .for_each(|s, &x| *s = Complex64::new(x, 0.0)),
            _ => unreachable!(),
        }
        grid.fft_padded(&mut spec, true);
        let src = spec.as_slice().unwrap();
        let mut first = SpectralScalar::zeros(grid);
        if pair.len() == 1 {
            let d = first.coefficients_mut().as_slice_mut().unwrap();
            for &(bo, po, len) in &runs {
                for (o, c) in d[bo..bo + len].iter_mut().zip(&src[po..po + len]) {
                    *o = c * scale;
                }
            }
            out.push(first);
            continue;
        }
        let mut second = SpectralScalar::zeros(grid);
        {
            let d1 = first.coefficients_mut().as_slice_mut().unwrap();
            let d2 = second.coefficients_mut().as_slice_mut().unwrap();
            for &(bo, po, len) in &runs {
                // padded offset of −k for the mode at po: reflect each axis
                let (p0, rest) = (po / (m * m), po % (m * m));
                let (p1, p2) = (rest / m, rest % m);
                let c0 = (m - p0) % m;
                let c1 = (m - p1) % m;
                for t in 0..len {
                    let c2 = (m - (p2 + t)) % m;
                    let c = src[po + t] * scale;
                    let cc = src[(c0 * m + c1) * m + c2].conj() * scale;
                    d1[bo + t] = (c + cc) * 0.5;
                    let d = (c - cc) * 0.5;
                    // (c − c̄(−k)) / 2i
                    d2[bo + t] = Complex64::new(d.im, -d.re);
                }
            }
        }
        out.push(first);
        out.push(second);
    }
    out
}

/// Pointwise product `a · b`.
pub fn multiply(grid: &Grid, a: &SpectralScalar, b: &SpectralScalar) -> SpectralScalar {
    let phys = to_padded_physical(grid, &[a, b]);
    let prod = &phys[0] * &phys[1];
    from_padded_physical(grid, &[prod]).pop().unwrap()
}

/// Advection `u·∇f`, applied componentwise to a field of any rank.
pub fn advect<F: Components>(grid: &Grid, u: &SpectralVector, f: &F) -> F {
    let mut inputs: Vec<SpectralScalar> = u.0.to_vec();
    for c in f.components() {
        for axis in 0..3 {
            inputs.push(partial(grid, c, axis));
        }
    }
    let refs: Vec<&SpectralScalar> = inputs.iter().collect();
    let phys = to_padded_physical(grid, &refs);
    let (vel, grads) = phys.split_at(3);
    let products: Vec<Array3<f64>> = grads
        .chunks(3)
        .map(|g| {
            let mut acc = &vel[0] * &g[0];
            Zip::from(&mut acc)
                .and(&vel[1])
                .and(&g[1])
                .and(&vel[2])
                .and(&g[2])
                .for_each(|s, &u1, &d1, &u2, &d2| *s += u1 * d1 + u2 * d2);
            acc
        })
        .collect();
    F::from_components(from_padded_physical(grid, &products))
}

/// Pointwise matrix product `(AB)_ij = Σ_l A_il B_lj`.
pub fn matmul(grid: &Grid, a: &SpectralTensor, b: &SpectralTensor) -> SpectralTensor {
    let refs: Vec<&SpectralScalar> = a.0.iter().chain(b.0.iter()).collect();
    let phys = to_padded_physical(grid, &refs);
    let (pa, pb) = phys.split_at(9);
    let products: Vec<Array3<f64>> = (0..9)
        .map(|c| {
            let (i, j) = (c / 3, c % 3);
            let mut acc = &pa[3 * i] * &pb[j];
            for l in 1..3 {
                Zip::from(&mut acc)
                    .and(&pa[3 * i + l])
                    .and(&pb[3 * l + j])
                    .for_each(|s, &x, &y| *s += x * y);
            }
            acc
        })
        .collect();
    SpectralTensor::from_components(from_padded_physical(grid, &products))
}

/// Pointwise scaling `φ f` of every component of `f`.
pub fn scale_pointwise<F: Components>(grid: &Grid, phi: &SpectralScalar, f: &F) -> F {
    let refs: Vec<&SpectralScalar> = std::iter::once(phi).chain(f.components()).collect();
    let phys = to_padded_physical(grid, &refs);
    let products: Vec<Array3<f64>> = phys[1..].iter().map(|c| c * &phys[0]).collect();
    F::from_components(from_padded_physical(grid, &products))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(grid: &Grid, f: impl Fn(f64, f64, f64) -> f64) -> SpectralScalar {
        let h = grid.spacing();
        let a = Array3::from_shape_fn(grid.shape(), |(i, j, k)| {
            f(i as f64 * h, j as f64 * h, k as f64 * h)
        });
        SpectralScalar::forward(grid, &a).unwrap()
    }

    #[test]
    fn cosine_squared_is_exact() {
        let g = Grid::new(8).unwrap();
        let c = sample(&g, |x, _, _| x.cos());
        let sq = multiply(&g, &c, &c);
        let expect = sample(&g, |x, _, _| 0.5 + 0.5 * (2.0 * x).cos());
        for (a, b) in sq.coefficients().iter().zip(expect.coefficients()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn pairing_matches_single_transforms() {
        let g = Grid::new(8).unwrap();
        let a = sample(&g, |x, y, _| (x + y).sin());
        let b = sample(&g, |_, y, z| (2.0 * y - z).cos());
        let c = sample(&g, |x, _, z| (x * 3.0).sin() * z.cos());
        let together = to_padded_physical(&g, &[&a, &b, &c]);
        let alone = to_padded_physical(&g, &[&c]);
        let d = (&together[2] - &alone[0]).mapv(f64::abs).fold(0.0, |m: f64, &v| m.max(v));
        assert!(d < 1e-14);
        let back = from_padded_physical(&g, &together);
        for (x, y) in back.iter().zip([&a, &b, &c]) {
            assert!(x.difference(y).coefficient_energy().sqrt() < 1e-14);
        }
    }

    #[test]
    fn advection_by_zero_velocity_vanishes() {
        let g = Grid::new(8).unwrap();
        let f = sample(&g, |x, y, z| x.sin() * y.cos() + z.sin());
        let u = SpectralVector::zeros(&g);
        assert!(advect(&g, &u, &f).max_abs() < 1e-15);
    }
}
