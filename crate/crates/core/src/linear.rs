//! Closed-form mode-by-mode solution of the linearized system
//!
//! ```text
//! u_t − μΔu + ∇p = μ₁P∇·τ,   τ_t = μ₂D(u) − aτ
//! ```
//!
//! With `v = P∇·τ` and `P∇·D(u) = ½Δu` for solenoidal `u`, each Fourier
//! mode obeys `(û, v̂)' = A(û, v̂)` with
//! `A = [[−μ|k|², μ₁], [−μ₂|k|²/2, −a]]`, acting identically on every
//! transverse component. Eliminating `v̂` at `a = 0` gives the damped wave
//! `W'' + μ|k|²W' + (μ₁μ₂/2)|k|²W = 0` for either unknown.
//!
//! On the torus every mode decays like `e^{Re λ₊ t}`; as `|k| → 0` one
//! would have `λ₊ ≈ −μ₁μ₂|k|²/(2μ)`, which is where the polynomial rates on
//! the whole space come from, but the lattice has `|k| ≥ 1`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{projected_stress_div, ModelParams, OldroydState};
use crate::spectral::Grid;

/// Per-mode amplitudes of `u` and `v = P∇·τ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeState {
    pub k: [i64; 3],
    pub u_hat: [Complex64; 3],
    pub v_hat: [Complex64; 3],
    pub params: ModelParams,
}

impl ModeState {
    pub fn k2(&self) -> f64 {
        self.k.iter().map(|&c| (c * c) as f64).sum()
    }

    /// `(|k·û|, |k·v̂|)`
    pub fn transversality_defect(&self) -> (f64, f64) {
        let dot = |w: &[Complex64; 3]| {
            (0..3).map(|a| w[a] * self.k[a] as f64).sum::<Complex64>().norm()
        };
        (dot(&self.u_hat), dot(&self.v_hat))
    }

    /// Reads mode `k` of `u` and of `P∇·τ` from a full field.
    pub fn from_fields(grid: &Grid, state: &OldroydState, k: [i64; 3], params: ModelParams) -> Self {
        let v = projected_stress_div(grid, &state.tau);
        Self {
            k,
            u_hat: std::array::from_fn(|a| state.u.0[a].mode(grid, k)),
            v_hat: std::array::from_fn(|a| v.0[a].mode(grid, k)),
            params,
        }
    }
}

/// Generator `[[−μ|k|², μ₁], [−μ₂|k|²/2, −a]]`; the damping entry is 0 in
/// the undamped regime.
pub fn mode_matrix(k2: f64, params: &ModelParams) -> Result<[[f64; 2]; 2]> {
    if !(k2 > 0.0) {
        return Err(Error::ZeroMode);
    }
    Ok([[-params.mu * k2, params.mu1], [-0.5 * params.mu2 * k2, -params.a]])
}

fn trace_det(a: &[[f64; 2]; 2]) -> (f64, f64) {
    (a[0][0] + a[1][1], a[0][0] * a[1][1] - a[0][1] * a[1][0])
}

/// Roots of `λ² − tr(A)λ + det(A) = 0`, for `a = 0` the damped-wave
/// characteristic `λ² + μ|k|²λ + (μ₁μ₂/2)|k|² = 0`; larger real part first
/// (and positive imaginary part first for a complex pair).
pub fn mode_eigenvalues(k2: f64, params: &ModelParams) -> Result<(Complex64, Complex64)> {
    let (tr, det) = trace_det(&mode_matrix(k2, params)?);
    let m = 0.5 * tr;
    let disc = m * m - det;
    if disc >= 0.0 {
        let r = disc.sqrt();
        // the small root without cancellation
        let big = m - r;
        let small = if big != 0.0 { det / big } else { m + r };
        Ok((Complex64::new(small, 0.0), Complex64::new(big, 0.0)))
    } else {
        let w = (-disc).sqrt();
        Ok((Complex64::new(m, w), Complex64::new(m, -w)))
    }
}

/// `e^{At}` for the mode generator, written as
/// `e^{mt}[C(t) I + S(t)(A − mI)]` with `m = tr A / 2`, `δ² = m² − det A`,
/// `C = cosh δt`, `S = sinh(δt)/δ`. The exact Jordan form
/// `e^{mt}(I + t(A − mI))` is used when `δ² = 0`, a power series when
/// `|δ²|t² < 1`, and the closed forms otherwise.
pub fn mode_propagator(k2: f64, params: &ModelParams, t: f64) -> Result<[[f64; 2]; 2]> {
    let a = mode_matrix(k2, params)?;
    let (tr, det) = trace_det(&a);
    let m = 0.5 * tr;
    let d2 = m * m - det;
    let x = d2 * t * t;

    let (c, s) = if d2 == 0.0 {
        let e = (m * t).exp();
        (e, e * t)
    } else if x.abs() < 1.0 {
        let (mut c, mut s) = (0.0, 0.0);
        let mut term = 1.0;
        for n in 0..30 {
            // term = x^n / (2n)!
            c += term;
            s += term / (2 * n + 1) as f64;
            term *= x / ((2 * n + 1) * (2 * n + 2)) as f64;
        }
        let e = (m * t).exp();
        (e * c, e * s * t)
    } else if d2 > 0.0 {
        let d = d2.sqrt();
        let (ep, em) = (((m + d) * t).exp(), ((m - d) * t).exp());
        (0.5 * (ep + em), 0.5 * (ep - em) / d)
    } else {
        let w = (-d2).sqrt();
        let e = (m * t).exp();
        (e * (w * t).cos(), e * (w * t).sin() / w)
    };

    Ok([
        [c + s * (a[0][0] - m), s * a[0][1]],
        [s * a[1][0], c + s * (a[1][1] - m)],
    ])
}

/// Exact solution of the mode at time `t ≥ 0`.
pub fn propagate_mode(state: &ModeState, t: f64) -> Result<ModeState> {
    let p = mode_propagator(state.k2(), &state.params, t)?;
    let mut out = *state;
    for a in 0..3 {
        out.u_hat[a] = state.u_hat[a] * p[0][0] + state.v_hat[a] * p[0][1];
        out.v_hat[a] = state.u_hat[a] * p[1][0] + state.v_hat[a] * p[1][1];
    }
    Ok(out)
}

/// Solution `(W, W')` of the scalar damped wave from `(W(0), W'(0))`,
/// built from the characteristic roots.
pub fn damped_wave(
    k2: f64,
    params: &ModelParams,
    w0: Complex64,
    w0_dot: Complex64,
    t: f64,
) -> Result<(Complex64, Complex64)> {
    let (l1, l2) = mode_eigenvalues(k2, params)?;
    if (l1 - l2).norm() <= 1e-12 * l1.norm().max(1.0) {
        let l = 0.5 * (l1 + l2);
        let c1 = w0;
        let c2 = w0_dot - l * w0;
        let e = (l * t).exp();
        let w = (c1 + c2 * t) * e;
        return Ok((w, c2 * e + l * w));
    }
    let c2 = (w0_dot - l1 * w0) / (l2 - l1);
    let c1 = w0 - c2;
    let (e1, e2) = ((l1 * t).exp(), (l2 * t).exp());
    Ok((c1 * e1 + c2 * e2, c1 * l1 * e1 + c2 * l2 * e2))
}

/// Slowest decay rate `max Re λ₊(k)` over the given `|k|²` values.
pub fn decay_prediction(support: &[f64], params: &ModelParams) -> Result<f64> {
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    support
        .iter()
        .map(|&k2| mode_eigenvalues(k2, params).map(|(l, _)| l.re))
        .try_fold(f64::NEG_INFINITY, |acc, r| r.map(|r| acc.max(r)))
}

/// Distinct `|k|²` among lattice vectors with `0 < |k| ≤ kmax`.
pub fn lattice_shells(kmax: f64) -> Vec<u64> {
    let r = kmax.floor() as i64;
    let mut out: Vec<u64> = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                let k2 = (a * a + b * b + c * c) as u64;
                if k2 > 0 && (k2 as f64) <= kmax * kmax {
                    out.push(k2);
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// One row of the eigenvalue table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenRow {
    pub k2: u64,
    pub plus: Complex64,
    pub minus: Complex64,
}

pub fn eigenvalue_table(kmax: f64, params: &ModelParams) -> Result<Vec<EigenRow>> {
    lattice_shells(kmax)
        .into_iter()
        .map(|k2| {
            let (plus, minus) = mode_eigenvalues(k2 as f64, params)?;
            Ok(EigenRow { k2, plus, minus })
        })
        .collect()
}

/// CSV with header `k2,re_plus,im_plus,re_minus,im_minus`.
pub fn eigenvalue_csv(rows: &[EigenRow]) -> String {
    let mut s = String::from("k2,re_plus,im_plus,re_minus,im_minus\n");
    for r in rows {
        s.push_str(&format!(
            "{},{:e},{:e},{:e},{:e}\n",
            r.k2, r.plus.re, r.plus.im, r.minus.re, r.minus.im
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> ModelParams {
        ModelParams::default()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn matrix_for_unit_mode() {
        assert_eq!(mode_matrix(1.0, &unit()).unwrap(), [[-1.0, 1.0], [-0.5, 0.0]]);
        assert!(matches!(mode_matrix(0.0, &unit()), Err(Error::ZeroMode)));
    }

    #[test]
    fn eigenvalue_examples() {
        let (p, m) = mode_eigenvalues(1.0, &unit()).unwrap();
        assert!(close(p, Complex64::new(-0.5, 0.5), 1e-15));
        assert!(close(m, Complex64::new(-0.5, -0.5), 1e-15));
        let (p, m) = mode_eigenvalues(2.0, &unit()).unwrap();
        assert_eq!((p.re, m.re), (-1.0, -1.0));
        let (p, m) = mode_eigenvalues(4.0, &unit()).unwrap();
        let r2 = 2.0f64.sqrt();
        assert!(close(p, Complex64::new(-2.0 + r2, 0.0), 1e-15));
        assert!(close(m, Complex64::new(-2.0 - r2, 0.0), 1e-15));
    }

    #[test]
    fn decoupled_heat_mode() {
        let params = ModelParams { mu1: 0.0, ..unit() };
        let p = mode_propagator(1.0, &params, 1.0).unwrap();
        assert!((p[0][0] - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(p[0][1], 0.0);
        assert!((p[1][1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_at_time_zero() {
        for k2 in [1.0, 2.0, 4.0, 9.0] {
            let p = mode_propagator(k2, &unit(), 0.0).unwrap();
            assert_eq!(p, [[1.0, 0.0], [0.0, 1.0]]);
        }
    }

    #[test]
    fn decay_prediction_examples() {
        assert_eq!(decay_prediction(&[1.0], &unit()).unwrap(), -0.5);
        assert!((decay_prediction(&[4.0], &unit()).unwrap() - (-2.0 + 2.0f64.sqrt())).abs() < 1e-15);
        assert_eq!(decay_prediction(&[1.0, 4.0], &unit()).unwrap(), -0.5);
        assert!(matches!(decay_prediction(&[], &unit()), Err(Error::EmptySupport)));
    }

    #[test]
    fn shells_up_to_two() {
        assert_eq!(lattice_shells(2.0), vec![1, 2, 3, 4]);
        let table = eigenvalue_csv(&eigenvalue_table(2.0, &unit()).unwrap());
        assert!(table.contains("\n1,-5e-1,5e-1,-5e-1,-5e-1\n"));
        assert!(table.contains("\n2,-1e0,0e0,-1e0,0e0\n"));
    }
}
