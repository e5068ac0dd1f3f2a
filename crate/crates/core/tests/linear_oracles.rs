//! Closed-form mode solutions against direct ODE integration and algebra.

use num_complex::Complex64;

use oldroyd::linear::{damped_wave, mode_eigenvalues, mode_matrix, mode_propagator};
use oldroyd::model::ModelParams;

type M2 = [[f64; 2]; 2];

fn mul(a: &M2, b: &M2) -> M2 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
}

fn apply(a: &M2, x: [f64; 2]) -> [f64; 2] {
    [a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]]
}

/// Classical RK4 on `x' = Ax` with a fine fixed step.
fn rk4(a: &M2, x0: [f64; 2], t: f64, dt: f64) -> [f64; 2] {
    let steps = (t / dt).round() as usize;
    let mut x = x0;
    let add = |x: [f64; 2], k: [f64; 2], h: f64| [x[0] + h * k[0], x[1] + h * k[1]];
    for _ in 0..steps {
        let k1 = apply(a, x);
        let k2 = apply(a, add(x, k1, 0.5 * dt));
        let k3 = apply(a, add(x, k2, 0.5 * dt));
        let k4 = apply(a, add(x, k3, dt));
        x = std::array::from_fn(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    }
    x
}

fn parameter_sets() -> Vec<ModelParams> {
    vec![
        ModelParams::default(),
        ModelParams { mu: 0.5, mu1: 2.0, mu2: 0.7, a: 0.0, b: 0.0 },
        ModelParams { mu: 1.0, mu1: 1.0, mu2: 2.0, a: 0.3, b: 0.0 },
    ]
}

#[test]
fn propagator_matches_fine_step_integration() {
    for p in parameter_sets() {
        for k2 in [1.0, 2.0, 3.0, 4.0, 9.0] {
            let a = mode_matrix(k2, &p).unwrap();
            for x0 in [[1.0, 0.0], [0.0, 1.0], [0.3, -0.8]] {
                let t = 1.5;
                let exact = apply(&mode_propagator(k2, &p, t).unwrap(), x0);
                let ode = rk4(&a, x0, t, 1e-5);
                for i in 0..2 {
                    assert!((exact[i] - ode[i]).abs() < 1e-9, "{p:?} k2={k2}: {exact:?} vs {ode:?}");
                }
            }
        }
    }
}

#[test]
fn propagator_is_a_semigroup() {
    for p in parameter_sets() {
        for k2 in [1.0, 2.0, 5.0] {
            let (s, t) = (0.37, 1.9);
            let lhs = mode_propagator(k2, &p, s + t).unwrap();
            let rhs = mul(&mode_propagator(k2, &p, s).unwrap(), &mode_propagator(k2, &p, t).unwrap());
            for i in 0..2 {
                for j in 0..2 {
                    assert!((lhs[i][j] - rhs[i][j]).abs() < 1e-13);
                }
            }
            let id = mode_propagator(k2, &p, 0.0).unwrap();
            assert_eq!(id, [[1.0, 0.0], [0.0, 1.0]]);
        }
    }
}

#[test]
fn eigenvalues_reproduce_trace_and_determinant() {
    for p in parameter_sets() {
        for k2 in [1.0, 2.0, 3.0, 50.0, 1e4] {
            let a = mode_matrix(k2, &p).unwrap();
            let (l1, l2) = mode_eigenvalues(k2, &p).unwrap();
            let (tr, det) = (a[0][0] + a[1][1], a[0][0] * a[1][1] - a[0][1] * a[1][0]);
            assert!(((l1 + l2).re - tr).abs() < 1e-12 * tr.abs());
            assert!((l1 + l2).im.abs() < 1e-12 * tr.abs());
            assert!(((l1 * l2).re - det).abs() < 1e-12 * det.abs());
            assert!(l1.re >= l2.re);
        }
    }
}

#[test]
fn damped_wave_agrees_with_propagator() {
    let p = ModelParams::default();
    for k2 in [1.0, 2.0, 3.0, 6.0] {
        let (u0, v0) = (0.4, -1.1);
        let a = mode_matrix(k2, &p).unwrap();
        let w0_dot = a[0][0] * u0 + a[0][1] * v0;
        for t in [0.0, 0.5, 2.0, 7.0] {
            let [u, _] = apply(&mode_propagator(k2, &p, t).unwrap(), [u0, v0]);
            let (w, _) = damped_wave(k2, &p, Complex64::new(u0, 0.0), Complex64::new(w0_dot, 0.0), t).unwrap();
            assert!((w.re - u).abs() < 1e-12 && w.im.abs() < 1e-12, "k2={k2} t={t}");
        }
    }
}

#[test]
fn confluent_shell_has_the_double_root() {
    let p = ModelParams::default();
    let (l1, l2) = mode_eigenvalues(2.0, &p).unwrap();
    assert_eq!((l1, l2), (Complex64::new(-1.0, 0.0), Complex64::new(-1.0, 0.0)));
    let (l1, l2) = mode_eigenvalues(1.0, &p).unwrap();
    assert!((l1 - Complex64::new(-0.5, 0.5)).norm() < 1e-15);
    assert!((l2 - Complex64::new(-0.5, -0.5)).norm() < 1e-15);
}
