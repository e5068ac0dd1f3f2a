//! Spectral kernels against oracles that never touch an FFT.

use ndarray::Array3;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use oldroyd::diagnostics::{sobolev_norm, Sobolev};
use oldroyd::spectral::dealias::{advect, multiply};
use oldroyd::spectral::grid::wavenumber;
use oldroyd::spectral::ops::leray_project;
use oldroyd::spectral::{random, Components, Grid, SpectralScalar, SpectralVector, BOX_VOLUME};

#[test]
fn product_equals_truncated_convolution() {
    let g = Grid::new(8).unwrap();
    let n = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = random::scalar(&g, &mut rng, 3.0);
    let b = random::scalar(&g, &mut rng, 3.0);
    let prod = multiply(&g, &a, &b);

    let half = (n / 2) as i64;
    let modes: Vec<[i64; 3]> = (0..n * n * n)
        .map(|i| [wavenumber(i / 64, n), wavenumber(i / 8 % 8, n), wavenumber(i % 8, n)])
        .collect();
    for k in &modes {
        let resolved = k.iter().all(|&c| c.abs() < half);
        let mut direct = Complex64::default();
        if resolved {
            for p in &modes {
                let q = [k[0] - p[0], k[1] - p[1], k[2] - p[2]];
                if q.iter().all(|&c| c.abs() < half) {
                    direct += a.mode(&g, *p) * b.mode(&g, q);
                }
            }
        }
        let got = prod.mode(&g, *k);
        assert!((got - direct).norm() < 1e-13, "k = {k:?}: {got} vs {direct}");
    }
}

/// `f = sin x cos 2y + ½ cos(x + y + 3z)` and its gradient.
fn sample(x: f64, y: f64, z: f64) -> (f64, [f64; 3]) {
    let p = x + y + 3.0 * z;
    let f = x.sin() * (2.0 * y).cos() + 0.5 * p.cos();
    let s = -0.5 * p.sin();
    let grad = [x.cos() * (2.0 * y).cos() + s, -2.0 * x.sin() * (2.0 * y).sin() + s, 3.0 * s];
    (f, grad)
}

#[test]
fn sobolev_norms_match_physical_quadrature() {
    let g = Grid::new(16).unwrap();
    let h = g.spacing();
    let mut samples = Array3::zeros(g.shape());
    let (mut l2, mut h1) = (0.0, 0.0);
    for ((i, j, k), v) in samples.indexed_iter_mut() {
        let (f, df) = sample(i as f64 * h, j as f64 * h, k as f64 * h);
        *v = f;
        l2 += f * f;
        h1 += df.iter().map(|d| d * d).sum::<f64>();
    }
    let cell = h * h * h;
    let (l2, h1) = (l2 * cell, (l2 + h1) * cell);
    let f = SpectralScalar::forward(&g, &samples).unwrap();
    assert!((sobolev_norm(&g, &f, Sobolev::h(0)).powi(2) - l2).abs() < 1e-12 * l2);
    assert!((sobolev_norm(&g, &f, Sobolev::h(1)).powi(2) - h1).abs() < 1e-12 * h1);
    // exact values of the integrals
    let exact_l2 = BOX_VOLUME * (0.25 + 0.125);
    assert!((l2 - exact_l2).abs() < 1e-12 * exact_l2);
}

/// Taylor-Green velocity, its self-advection and the classical pressure
/// `p = (cos 2x + cos 2y)(cos 2z + 2) / 16` balancing it.
fn taylor_green(x: f64, y: f64, z: f64) -> ([f64; 3], [f64; 3], [f64; 3]) {
    let (sx, cx, sy, cy, sz, cz) = (x.sin(), x.cos(), y.sin(), y.cos(), z.sin(), z.cos());
    let u = [sx * cy * cz, -cx * sy * cz, 0.0];
    let grad = [
        [cx * cy * cz, -sx * sy * cz, -sx * cy * sz],
        [sx * sy * cz, -cx * cy * cz, cx * sy * sz],
        [0.0, 0.0, 0.0],
    ];
    let adv: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| u[j] * grad[i][j]).sum());
    let (c2x, c2y, c2z) = ((2.0 * x).cos(), (2.0 * y).cos(), (2.0 * z).cos());
    let grad_p = [
        -2.0 * (2.0 * x).sin() * (c2z + 2.0) / 16.0,
        -2.0 * (2.0 * y).sin() * (c2z + 2.0) / 16.0,
        -2.0 * (2.0 * z).sin() * (c2x + c2y) / 16.0,
    ];
    (u, adv, grad_p)
}

#[test]
fn projected_advection_equals_advection_plus_pressure_gradient() {
    let g = Grid::new(16).unwrap();
    let h = g.spacing();
    let mut u = [(); 3].map(|_| Array3::zeros(g.shape()));
    let mut expected = [(); 3].map(|_| Array3::zeros(g.shape()));
    for i in 0..16 {
        for j in 0..16 {
            for k in 0..16 {
                let (v, adv, gp) = taylor_green(i as f64 * h, j as f64 * h, k as f64 * h);
                for c in 0..3 {
                    u[c][(i, j, k)] = v[c];
                    expected[c][(i, j, k)] = adv[c] + gp[c];
                }
            }
        }
    }
    let u = SpectralVector::forward(&g, &u).unwrap();
    let got = leray_project(&g, &advect(&g, &u, &u)).inverse(&g);
    for c in 0..3 {
        let err = (&got[c] - &expected[c]).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(err < 1e-13, "component {c}: {err:e}");
    }
    // the projection removed a genuine gradient
    let raw = advect(&g, &u, &u);
    assert!(raw.difference(&leray_project(&g, &raw)).l2_norm() > 0.1);
}
