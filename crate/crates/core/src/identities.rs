//! Round-off level checks of the algebraic identities behind the energy
//! estimates, on random band-limited fields.
//!
//! Every check returns a relative residual. Random inputs are band-limited
//! so that each padded product is exact; the cubic Hookean closure needs the
//! tighter band `|k| ≤ (n/2 − 1)/3`. Negative controls break one hypothesis
//! and must produce a residual well above round-off.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hookean::{g_closure_residuals, HookeanState, HOOKEAN_SLIP};
use crate::model::{bilinear_q, oldroyd_rhs, projected_stress_div, sym_grad, ModelParams};
use crate::spectral::dealias::{advect, from_padded_physical, to_padded_physical};
use crate::spectral::ops::{
    double_divergence, gradient, inv_laplacian_mean_free, laplacian, leray_project, partial,
    tensor_divergence, tensor_divergence_full, vector_gradient,
};
use crate::spectral::{
    random, Components, Grid, SpectralScalar, SpectralSymTensor, SpectralTensor, SpectralVector,
    BOX_VOLUME,
};

/// Whether a check is expected to vanish or, as a negative control, to fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Vanishes,
    Fails,
}

/// Outcome of one identity over all trials. For [`Expectation::Vanishes`]
/// `residual` is the worst (largest) trial and `pass ⇔ residual ≤ tolerance`;
/// for a control it is the smallest trial and `pass ⇔ residual > tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub trials: usize,
    pub seed: u64,
    pub expectation: Expectation,
}

/// Threshold a negative control must exceed.
pub const CONTROL_THRESHOLD: f64 = 1e-6;

fn relative(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1.0)
}

/// `Σ_k w(|k|²) Re(f̂ · conj ĝ)` over modes and components, times the volume.
fn weighted_pairing<F: Components>(grid: &Grid, f: &F, g: &F, weight: impl Fn(f64) -> f64) -> f64 {
    let mut acc = 0.0;
    for (c, (a, b)) in f.components().iter().zip(g.components()).enumerate() {
        let mut part = 0.0;
        for (idx, x) in a.coefficients().indexed_iter() {
            let w = weight(grid.k2(idx));
            if w != 0.0 {
                part += w * (x * b.coefficients()[idx].conj()).re;
            }
        }
        acc += F::pairing_weight(c) * part;
    }
    BOX_VOLUME * acc
}

/// `[∇u·∇T]_i = Σ_j ∂_j u·∇T_ij` for a symmetric `T`, as one padded pass.
fn grad_u_dot_grad_tau(grid: &Grid, u: &SpectralVector, tau: &SpectralSymTensor) -> SpectralVector {
    let gu = vector_gradient(grid, u);
    let mut inputs: Vec<SpectralScalar> = gu.0.to_vec();
    for c in &tau.0 {
        for a in 0..3 {
            inputs.push(partial(grid, c, a));
        }
    }
    let refs: Vec<&SpectralScalar> = inputs.iter().collect();
    let phys = to_padded_physical(grid, &refs);
    let (pg, pt) = phys.split_at(9);
    let dtau = |i: usize, j: usize, l: usize| &pt[3 * crate::spectral::sym_index(i, j) + l];
    let out: Vec<_> = (0..3)
        .map(|i| {
            let mut acc = ndarray::Array3::<f64>::zeros(pg[0].raw_dim());
            for j in 0..3 {
                for l in 0..3 {
                    // ∂_j u_l ∂_l τ_ij
                    acc.zip_mut_with(&(&pg[3 * l + j] * dtau(i, j, l)), |s, v| *s += v);
                }
            }
            acc
        })
        .collect();
    SpectralVector::from_components(from_padded_physical(grid, &out))
}

/// `[∇u·∇φ]_i = ∂_i u·∇φ`
fn grad_u_dot_grad_scalar(grid: &Grid, u: &SpectralVector, phi: &SpectralScalar) -> SpectralVector {
    let gu = vector_gradient(grid, u);
    let gp = gradient(grid, phi);
    let refs: Vec<&SpectralScalar> = gu.0.iter().chain(gp.0.iter()).collect();
    let phys = to_padded_physical(grid, &refs);
    let out: Vec<_> = (0..3)
        .map(|i| {
            let mut acc = &phys[i] * &phys[9];
            for l in 1..3 {
                acc.zip_mut_with(&(&phys[3 * l + i] * &phys[9 + l]), |s, v| *s += v);
            }
            acc
        })
        .collect();
    SpectralVector::from_components(from_padded_physical(grid, &out))
}

/// `P∇·(u·∇τ) = P(u·∇P∇·τ) + P(∇u·∇τ) − P(∇u·∇Δ⁻¹∇·∇·τ)`, residual
/// `‖LHS − RHS‖ / max(1, ‖LHS‖)`.
pub fn commutator_residual(grid: &Grid, u: &SpectralVector, tau: &SpectralSymTensor) -> f64 {
    let lhs = leray_project(grid, &tensor_divergence(grid, &advect(grid, u, tau)));

    let ptau = projected_stress_div(grid, tau);
    let mut rhs = advect(grid, u, &ptau);
    rhs.axpy(1.0, &grad_u_dot_grad_tau(grid, u, tau));
    let phi = inv_laplacian_mean_free(grid, &double_divergence(grid, tau));
    rhs.axpy(-1.0, &grad_u_dot_grad_scalar(grid, u, &phi));
    let rhs = leray_project(grid, &rhs);

    relative(lhs.difference(&rhs).l2_norm(), lhs.l2_norm())
}

/// Weight of `Σ_{k≤3} ∇ᵏ|∇|⁻¹` in a pairing.
fn n1_weight(k2: f64) -> f64 {
    if k2 == 0.0 {
        0.0
    } else {
        (1.0 + k2 + k2 * k2 + k2 * k2 * k2) / k2
    }
}

/// `N₁ = Σ_{k≤3} ⟨∇ᵏ|∇|⁻¹P∇·τ, ∇ᵏ|∇|⁻¹u⟩ + ⟨∇ᵏ|∇|⁻¹D(u), ∇ᵏ|∇|⁻¹τ⟩` for a
/// general (possibly non-symmetric) τ, relative to the first group.
///
/// The stress divergence is projected, as it enters the velocity equation
/// once the pressure is eliminated; this is what makes `∇·u = 0` matter.
pub fn n1_residual(grid: &Grid, u: &SpectralVector, tau: &SpectralTensor) -> f64 {
    let pdiv = leray_project(grid, &tensor_divergence_full(grid, tau));
    let first = weighted_pairing(grid, &pdiv, u, n1_weight);
    let d = sym_grad(grid, u).to_full();
    let second = weighted_pairing(grid, &d, tau, n1_weight);
    relative((first + second).abs(), first.abs())
}

/// `M₁ = Σ_{k≤1} ⟨∇^{k+1}∇·τ, ∇^{k+1}u⟩ + ⟨∇ᵏΔu, ∇ᵏP∇·τ⟩` (time weight
/// dropped), relative to the first group.
pub fn m1_residual(grid: &Grid, u: &SpectralVector, tau: &SpectralTensor) -> f64 {
    let w = |k2: f64| k2 * (1.0 + k2);
    let div = tensor_divergence_full(grid, tau);
    let first = weighted_pairing(grid, &div, u, w);
    let pdiv = leray_project(grid, &div);
    // ⟨∇ᵏΔu, ∇ᵏv⟩ = −Σ |k|^{2k}|k|² û·v̂
    let second = -weighted_pairing(grid, u, &pdiv, w);
    relative((first + second).abs(), first.abs())
}

/// `P∇·D(u) = ½Δu`, residual relative to `‖½Δu‖`.
pub fn projection_fact_residual(grid: &Grid, u: &SpectralVector) -> f64 {
    let lhs = projected_stress_div(grid, &sym_grad(grid, u));
    let rhs = laplacian(grid, u).scaled(0.5);
    relative(lhs.difference(&rhs).l2_norm(), rhs.l2_norm())
}

/// `∇·τ_t + ∇·(u·∇τ) + ∇·Q(τ, ∇u) = (μ₂/2)Δu − a∇·τ` with `τ_t` taken from
/// the full right-hand side and the products evaluated separately.
pub fn eqq_residual(
    grid: &Grid,
    u: &SpectralVector,
    tau: &SpectralSymTensor,
    params: &ModelParams,
) -> f64 {
    let state = crate::model::OldroydState { u: u.clone(), tau: tau.clone() };
    let (_, dtau) = oldroyd_rhs(grid, &state, params);
    let mut lhs = tensor_divergence(grid, &dtau);
    lhs.axpy(1.0, &tensor_divergence(grid, &advect(grid, u, tau)));
    let q = bilinear_q(grid, tau, &vector_gradient(grid, u), params.b);
    lhs.axpy(1.0, &tensor_divergence(grid, &q));
    let mut rhs = laplacian(grid, u).scaled(0.5 * params.mu2);
    rhs.axpy(-params.a, &tensor_divergence(grid, tau));
    relative(lhs.difference(&rhs).l2_norm(), lhs.l2_norm())
}

fn gradient_perturbation<R: Rng>(grid: &Grid, rng: &mut R, kmax: f64) -> SpectralVector {
    gradient(grid, &random::scalar(grid, rng, kmax))
}

struct Tally {
    name: &'static str,
    tolerance: f64,
    expectation: Expectation,
    residual: f64,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64, expectation: Expectation) -> Self {
        let residual = match expectation {
            Expectation::Vanishes => 0.0,
            Expectation::Fails => f64::INFINITY,
        };
        Self { name, tolerance, expectation, residual }
    }

    fn record(&mut self, r: f64) {
        // NaN must not pass silently
        let r = if r.is_nan() { f64::INFINITY * self.sign() } else { r };
        self.residual = match self.expectation {
            Expectation::Vanishes => self.residual.max(r),
            Expectation::Fails => self.residual.min(r),
        };
    }

    fn sign(&self) -> f64 {
        match self.expectation {
            Expectation::Vanishes => 1.0,
            Expectation::Fails => -1.0,
        }
    }

    fn finish(self, trials: usize, seed: u64) -> IdentityReport {
        let pass = match self.expectation {
            Expectation::Vanishes => self.residual <= self.tolerance,
            Expectation::Fails => self.residual > self.tolerance,
        };
        IdentityReport {
            name: self.name.into(),
            residual: self.residual,
            tolerance: self.tolerance,
            pass,
            trials,
            seed,
            expectation: self.expectation,
        }
    }
}

/// Runs every identity and control for `trials` random draws from a
/// ChaCha8 stream seeded with `seed`. Quadratic checks use the band
/// `|k| ≤ n/3`; the Hookean closure uses `|k| ≤ (n/2 − 1)/3`.
pub fn run_suite(seed: u64, n: usize, trials: usize) -> Result<Vec<IdentityReport>> {
    if n < 16 {
        return Err(Error::OutOfRange {
            key: "n".into(),
            reason: format!("identity suite needs n >= 16, got {n}"),
        });
    }
    if trials == 0 {
        return Ok(Vec::new());
    }
    let grid = Grid::new(n)?;
    let band = n as f64 / 3.0;
    let cubic_band = ((n / 2 - 1) / 3) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    use Expectation::{Fails, Vanishes};

    let mut tallies = vec![
        Tally::new("commutator", 1e-10, Vanishes),
        Tally::new("n1", 1e-12, Vanishes),
        Tally::new("n1-nonsymmetric-tau", CONTROL_THRESHOLD, Fails),
        Tally::new("n1-gradient-velocity", CONTROL_THRESHOLD, Fails),
        Tally::new("m1", 1e-12, Vanishes),
        Tally::new("m1-nonsymmetric-tau", 1e-12, Vanishes),
        Tally::new("m1-gradient-velocity", CONTROL_THRESHOLD, Fails),
        Tally::new("projection-fact", 1e-12, Vanishes),
        Tally::new("projection-fact-gradient-velocity", CONTROL_THRESHOLD, Fails),
        Tally::new("eqq", 1e-11, Vanishes),
        Tally::new("g-closure", 1e-11, Vanishes),
        Tally::new("g-closure-opposite-slip", CONTROL_THRESHOLD, Fails),
    ];

    for _ in 0..trials {
        let u = random::solenoidal(&grid, &mut rng, band);
        let tau = random::sym_tensor(&grid, &mut rng, band);
        let general = random::tensor(&grid, &mut rng, band);
        let mut bent = u.clone();
        bent.axpy(1.0, &gradient_perturbation(&grid, &mut rng, band));
        let b: f64 = rng.gen_range(-1.0..=1.0);
        let params = ModelParams { b, ..ModelParams::default() };

        let full = tau.to_full();
        let r = [
            commutator_residual(&grid, &u, &tau),
            n1_residual(&grid, &u, &full),
            n1_residual(&grid, &u, &general),
            n1_residual(&grid, &bent, &full),
            m1_residual(&grid, &u, &full),
            m1_residual(&grid, &u, &general),
            m1_residual(&grid, &bent, &full),
            projection_fact_residual(&grid, &u),
            projection_fact_residual(&grid, &bent),
            eqq_residual(&grid, &u, &tau, &params),
        ];

        let mut hu = random::solenoidal(&grid, &mut rng, cubic_band);
        let mut hf = random::tensor(&grid, &mut rng, cubic_band);
        hu.scale(0.1);
        hf.scale(0.1);
        let state = HookeanState { u: hu, f_minus_i: hf };
        let g = g_closure_residuals(&grid, &state, &[HOOKEAN_SLIP, -HOOKEAN_SLIP]);

        for (t, v) in tallies.iter_mut().zip(r.into_iter().chain(g)) {
            t.record(v);
        }
    }
    Ok(tallies.into_iter().map(|t| t.finish(trials, seed)).collect())
}

/// True when every report met its expectation.
pub fn all_pass(reports: &[IdentityReport]) -> bool {
    reports.iter().all(|r| r.pass)
}
