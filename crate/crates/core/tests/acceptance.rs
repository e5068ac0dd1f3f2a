//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary so
//! the lines are always printed; exits nonzero if any criterion fails.

use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use oldroyd::diagnostics::{exponential_rate_fit, interpolation_check};
use oldroyd::harness::{self, Preset, RunConfig};
use oldroyd::hookean::{verify_g_closure, HookeanState};
use oldroyd::identities::{run_suite, Expectation};
use oldroyd::integrator::{convergence_order, integrate, Stepper};
use oldroyd::linear::{mode_eigenvalues, propagate_mode, ModeState};
use oldroyd::model::{projected_stress_div, ModelParams, OldroydState, OldroydSystem};
use oldroyd::spectral::ops::tensor_divergence;
use oldroyd::spectral::{
    random, sym_index, Components, Grid, SpectralSymTensor, SpectralTensor, SpectralVector,
};

type Outcome = (bool, String);

fn out_dir(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("oldroyd-acceptance-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

/// Zeroes every mode except `±k`.
fn keep_mode<F: Components>(grid: &Grid, f: &F, k: [i64; 3]) -> F {
    let plus = grid.index_of(k).unwrap();
    let minus = grid.index_of([-k[0], -k[1], -k[2]]).unwrap();
    f.map_components(|c| {
        let mut c = c.clone();
        c.map_modes(|idx, v| if idx == plus || idx == minus { v } else { Complex64::default() });
        c
    })
}

/// Applies `f(k, τ̂(k))` to every mode of a symmetric tensor.
fn map_tensor_modes(
    grid: &Grid,
    tau: &SpectralSymTensor,
    f: impl Fn([f64; 3], [[Complex64; 3]; 3]) -> [[Complex64; 3]; 3],
) -> SpectralSymTensor {
    let mut out = tau.clone();
    for (idx, _) in tau.0[0].coefficients().indexed_iter() {
        let m: [[Complex64; 3]; 3] =
            std::array::from_fn(|i| std::array::from_fn(|j| tau.0[sym_index(i, j)].coefficients()[idx]));
        let r = f(grid.kvec(idx), m);
        for i in 0..3 {
            for j in i..3 {
                out.0[sym_index(i, j)].coefficients_mut()[idx] = r[i][j];
            }
        }
    }
    out
}

fn unit(k: [f64; 3]) -> Option<[f64; 3]> {
    let n = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    (n > 0.0).then(|| k.map(|c| c / n))
}

/// `P τ̂ P` per mode: a symmetric tensor with `∇·τ = 0`.
fn divergence_free_part(grid: &Grid, tau: &SpectralSymTensor) -> SpectralSymTensor {
    map_tensor_modes(grid, tau, |k, m| {
        let Some(e) = unit(k) else { return [[Complex64::default(); 3]; 3] };
        let p: [[f64; 3]; 3] =
            std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 } - e[i] * e[j]));
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut s = Complex64::default();
                for a in 0..3 {
                    for b in 0..3 {
                        s += p[i][a] * m[a][b] * p[b][j];
                    }
                }
                s
            })
        })
    })
}

/// `τ̂ − (k̂⊗w + w⊗k̂)` with `w = (I − k̂k̂ᵀ)τ̂k̂`: the part of τ orthogonal to
/// every strain `D(w)` of a solenoidal field, hence with `P∇·τ = 0`.
fn strain_free_part(grid: &Grid, tau: &SpectralSymTensor) -> SpectralSymTensor {
    map_tensor_modes(grid, tau, |k, m| {
        let Some(e) = unit(k) else { return m };
        let tk: [Complex64; 3] = std::array::from_fn(|i| (0..3).map(|j| m[i][j] * e[j]).sum());
        let along: Complex64 = (0..3).map(|i| tk[i] * e[i]).sum();
        let w: [Complex64; 3] = std::array::from_fn(|i| tk[i] - along * e[i]);
        std::array::from_fn(|i| std::array::from_fn(|j| m[i][j] - e[i] * w[j] - w[i] * e[j]))
    })
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let reports = match run_suite(42, 32, 100) {
        Ok(r) => r,
        Err(e) => return (false, e.to_string()),
    };
    let secs = start.elapsed().as_secs_f64();
    let worst = reports
        .iter()
        .filter(|r| r.expectation == Expectation::Vanishes)
        .map(|r| format!("{} {:.1e}/{:.0e}", r.name, r.residual, r.tolerance))
        .collect::<Vec<_>>()
        .join(", ");
    let weakest_control = reports
        .iter()
        .filter(|r| r.expectation == Expectation::Fails)
        .map(|r| r.residual)
        .fold(f64::INFINITY, f64::min);
    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
    let ok = failed.is_empty() && secs < 120.0;
    (
        ok,
        format!(
            "100 trials at n=32 in {secs:.0}s; {worst}; smallest control residual {weakest_control:.2e}; failures {failed:?}"
        ),
    )
}

fn linear_mode_state(grid: &Grid, k: [i64; 3], seed: u64) -> OldroydState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = (k.iter().map(|c| c * c).sum::<i64>() as f64).sqrt();
    let u = random::solenoidal(grid, &mut rng, r);
    let tau = random::sym_tensor(grid, &mut rng, r);
    OldroydState { u: keep_mode(grid, &u, k), tau: keep_mode(grid, &tau, k) }
}

fn mode_error(a: &ModeState, b: &ModeState) -> f64 {
    (0..3)
        .map(|i| (a.u_hat[i] - b.u_hat[i]).norm().max((a.v_hat[i] - b.v_hat[i]).norm()))
        .fold(0.0, f64::max)
}

fn criterion_2() -> Outcome {
    let g = Grid::new(16).unwrap();
    let p = ModelParams::default();
    let system = OldroydSystem::linearized(p);
    let mut ok = true;
    let mut notes = Vec::new();
    for k in [[1, 0, 0], [1, 1, 0], [2, 0, 0]] {
        let s0 = linear_mode_state(&g, k, 7);
        let m0 = ModeState::from_fields(&g, &s0, k, p);
        let t = 2.0;
        let exact = propagate_mode(&m0, t).unwrap();
        let samples: Vec<(f64, f64)> = [0.1, 0.05, 0.025, 0.0125]
            .iter()
            .map(|&dt| {
                let s = integrate(&g, system, &s0, dt, t, f64::INFINITY).unwrap();
                (dt, mode_error(&ModeState::from_fields(&g, &s, k, p), &exact))
            })
            .collect();
        let est = convergence_order(&samples, 1e-14);
        ok &= est.order >= 3.8;
        notes.push(format!("|k|²={} order {:.2}", m0.k2(), est.order));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s0 = OldroydState {
        u: random::solenoidal(&g, &mut rng, 5.0),
        tau: random::sym_tensor(&g, &mut rng, 5.0),
    };
    let t = 5.0;
    let s = integrate(&g, system, &s0, 0.001, t, f64::INFINITY).unwrap();
    let mut worst: f64 = 0.0;
    for (idx, _) in s0.u.0[0].coefficients().indexed_iter() {
        if g.k2(idx) == 0.0 || g.k2(idx) > 25.0 {
            continue;
        }
        let k = g.kvec(idx).map(|c| c as i64);
        let exact = propagate_mode(&ModeState::from_fields(&g, &s0, k, p), t).unwrap();
        worst = worst.max(mode_error(&ModeState::from_fields(&g, &s, k, p), &exact));
    }
    ok &= worst <= 1e-8;
    notes.push(format!("full field n=16 t=5 max mode error {worst:.2e}"));
    (ok, notes.join("; "))
}

fn criterion_3() -> Outcome {
    let g = Grid::new(8).unwrap();
    let p = ModelParams::default();
    let target = mode_eigenvalues(1.0, &p).unwrap().0.re;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let s0 = OldroydState {
        u: random::solenoidal(&g, &mut rng, 1.0),
        tau: random::sym_tensor(&g, &mut rng, 1.0),
    };
    let free0 = strain_free_part(&g, &s0.tau);
    let free_norm = free0.l2_norm();
    let free_defect = projected_stress_div(&g, &free0).l2_norm();

    let t_end = 16.0 * std::f64::consts::PI;
    let mut stepper = Stepper::new(&g, OldroydSystem::linearized(p), 0.01, f64::INFINITY);
    let (mut u_series, mut v_series) = (Vec::new(), Vec::new());
    let mut s = s0.clone();
    let run = stepper.run(&mut s, t_end, 10, |st, state| {
        u_series.push((st.time(), state.u.l2_norm()));
        v_series.push((st.time(), projected_stress_div(&g, &state.tau).l2_norm()));
        Ok(())
    });
    if let Err(e) = run {
        return (false, e.to_string());
    }
    let window = (0.5 * t_end, t_end);
    let (ru, rv) = match (exponential_rate_fit(&u_series, window), exponential_rate_fit(&v_series, window)) {
        (Ok(a), Ok(b)) => (a.slope, b.slope),
        (Err(e), _) | (_, Err(e)) => return (false, e.to_string()),
    };
    let within = |r: f64| ((r - target) / target).abs() <= 0.05;
    let retained = s.tau.l2_norm() / free_norm;
    let ok = within(ru) && within(rv) && retained >= 0.9 && free_defect < 1e-12 * free_norm;
    (
        ok,
        format!(
            "rates ‖u‖ {ru:.4}, ‖P∇·τ‖ {rv:.4} vs Re λ₊ = {target}; ‖τ(T)‖ / ‖τ₀ strain-free part‖ = {retained:.4}"
        ),
    )
}

fn criterion_4() -> Outcome {
    let g = Grid::new(16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut tau = divergence_free_part(&g, &random::sym_tensor(&g, &mut rng, 5.0));
    // peak stress 0.05
    let peak = tau.0.iter().map(|c| c.inverse(&g).iter().fold(0.0f64, |m, v| m.max(v.abs()))).fold(0.0, f64::max);
    tau.scale(0.05 / peak);
    let div = tensor_divergence(&g, &tau).l2_norm();
    let s0 = OldroydState { u: SpectralVector::zeros(&g), tau };
    let p = ModelParams { b: 0.5, ..ModelParams::default() };
    let mut stepper = Stepper::new(&g, OldroydSystem::new(p), 0.01, 0.5);
    let mut s = s0.clone();
    for _ in 0..1000 {
        if let Err(e) = stepper.step(&mut s) {
            return (false, e.to_string());
        }
    }
    let scale = s0.tau.l2_norm();
    let du = s.u.l2_norm() / scale;
    let dtau = s.tau.difference(&s0.tau).l2_norm() / scale;
    (
        du <= 1e-12 && dtau <= 1e-12,
        format!("initial ‖∇·τ‖/‖τ‖ {:.1e}; after 1000 steps ‖u‖ {du:.1e}, ‖Δτ‖ {dtau:.1e} (relative)", div / scale),
    )
}

fn small_data_config(b: f64) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.params.b = b;
    cfg.init.preset = Preset::RandomBand;
    cfg.init.amplitude = 1e-2;
    cfg.time.dt = 0.1;
    cfg.time.t_end = 50.0;
    cfg.time.diag_interval = 5;
    cfg
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for b in [0.0, 1.0] {
        let out = match harness::run(&small_data_config(b), Some(&out_dir(&format!("small-b{b}")))) {
            Ok(o) => o,
            Err(e) => return (false, e.to_string()),
        };
        let recs = &out.records;
        let first = recs[0];
        let e0_peak = recs.iter().map(|r| r.e0).fold(0.0, f64::max);
        let bound_e0 = recs.iter().all(|r| r.e0 <= 2.0 * first.e0 + 1e-6);
        let ratio = |i: usize| recs.iter().map(|r| r.weighted[i] / first.weighted[i]).fold(0.0, f64::max);
        let (r1, r2) = (ratio(1), ratio(2));
        let monotone = recs.windows(2).all(|w| (0..3).all(|i| w[1].energies()[i] >= w[0].energies()[i]));
        let pass = out.abort.is_none() && bound_e0 && r1 <= 4.0 && r2 <= 4.0 && monotone;
        ok &= pass;
        notes.push(format!(
            "b={b}: max E₀/E₀(0) {:.3}, E₁ sup ratio {r1:.3}, E₂ sup ratio {r2:.3}, monotone {monotone}",
            e0_peak / first.e0
        ));
        let _ = std::fs::remove_dir_all(&out.dir);
    }
    (ok, notes.join("; "))
}

fn criterion_6() -> Outcome {
    let mut cfg = RunConfig::default();
    cfg.init.preset = Preset::HookeanGeneric;
    cfg.init.amplitude = 1e-2;
    cfg.model = harness::ModelKind::Hookean;
    cfg.time.dt = 0.1;
    cfg.time.t_end = 10.0;
    cfg.time.diag_interval = 10;
    let dir = out_dir("hookean");
    let out = match harness::hookean_consistency(&cfg, Some(&dir)) {
        Ok(o) => o,
        Err(e) => return (false, e.to_string()),
    };
    let _ = std::fs::remove_dir_all(&dir);

    let g = Grid::new(32).unwrap();
    let band = (g.n() as f64 / 2.0 - 1.0) / 3.0;
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let state = HookeanState {
            u: random::solenoidal(&g, &mut rng, band).scaled(0.1),
            f_minus_i: random::tensor(&g, &mut rng, band).scaled(0.1),
        };
        worst = worst.max(verify_g_closure(&g, &state));
    }
    let ok = out.max_drift <= 1e-6 && worst <= 1e-11;
    (
        ok,
        format!(
            "co-evolution to t=10: max ‖G(F) − τ‖_H² {:.2e}; G-closure over 100 random states max {worst:.2e}",
            out.max_drift
        ),
    )
}

fn criterion_7() -> Outcome {
    let g = Grid::new(16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for i in 0..1000 {
        let s = [0.0, 1.0, 2.0][i % 3];
        let kmax = 1.0 + (i % 5) as f64;
        let r = match i % 4 {
            0 => interpolation_check(&g, &random::scalar(&g, &mut rng, kmax), s),
            1 => interpolation_check(&g, &random::solenoidal(&g, &mut rng, kmax), s),
            2 => interpolation_check(&g, &random::sym_tensor(&g, &mut rng, kmax), s),
            _ => interpolation_check::<SpectralTensor>(&g, &random::tensor(&g, &mut rng, kmax), s),
        };
        match r {
            Ok(v) => worst = worst.max(v),
            Err(e) => return (false, e.to_string()),
        }
        count += 1;
    }
    (worst <= 1.0 + 1e-12, format!("{count} fields, max ratio {worst:.15}"))
}

fn criterion_8() -> Outcome {
    let mut cfg = RunConfig::default();
    cfg.n = 16;
    cfg.params.b = 0.5;
    cfg.time.dt = 0.02;
    cfg.time.t_end = 2.0;
    cfg.time.diag_interval = 5;
    let read = |name: &str| -> Result<Vec<u8>, String> {
        let dir = out_dir(name);
        harness::run(&cfg, Some(&dir)).map_err(|e| e.to_string())?;
        let bytes = std::fs::read(dir.join("energies.csv")).map_err(|e| e.to_string())?;
        let _ = std::fs::remove_dir_all(&dir);
        Ok(bytes)
    };
    match (read("det-a"), read("det-b")) {
        (Ok(a), Ok(b)) => (a == b && !a.is_empty(), format!("{} bytes, identical {}", a.len(), a == b)),
        (Err(e), _) | (_, Err(e)) => (false, e),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("identity suite", criterion_1),
        ("linear oracle", criterion_2),
        ("linear decay and undamped stress", criterion_3),
        ("steady-state preservation", criterion_4),
        ("small-data boundedness", criterion_5),
        ("hookean reduction", criterion_6),
        ("interpolation", criterion_7),
        ("determinism", criterion_8),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = run();
        failures += usize::from(!ok);
        println!(
            "{} criterion {id} ({name}) [{:.1}s]: {detail}",
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
