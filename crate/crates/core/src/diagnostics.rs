//! Sobolev norms, the time-weighted energies and decay-exponent fits.
//!
//! Norms are evaluated through Parseval. `‖∇ʲf‖²` sums the squares of the
//! full tensor of j-th derivatives, which in Fourier space is the weight
//! `|k|^{2j}`. With `s ≥ 0`,
//!
//! ```text
//! ‖f‖²_{H^s} = Σ_{j≤s} ‖∇ʲf‖²,   ‖f‖²_{Ḣ^s} = ‖|∇|^s f‖².
//! ```
//!
//! The energies are
//!
//! ```text
//! E₀ = sup (‖|∇|⁻¹u‖²_{H³} + ‖|∇|⁻¹τ‖²_{H³})         + ∫ ‖u‖²_{H³} + ‖|∇|⁻¹P∇·τ‖²_{H²}
//! E₁ = sup (1+t)(‖u‖²_{H²} + 2‖|∇|⁻¹P∇·τ‖²_{H²})     + ∫ (1+t)(‖∇u‖²_{H²} + ‖P∇·τ‖²_{H¹})
//! E₂ = sup (1+t)²(‖∇u‖²_{H¹} + 2‖P∇·τ‖²_{H¹})        + ∫ (1+t)²(‖∇²u‖²_{H¹} + ‖∇P∇·τ‖²_{L²})
//! ```
//!
//! with the supremum realised as a running maximum over diagnostic samples
//! and the integrals by the trapezoid rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::projected_stress_div;
use crate::spectral::{Components, Grid, SpectralSymTensor, SpectralVector, BOX_VOLUME};

/// Which Sobolev quantity to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sobolev {
    /// Regularity index `s ≥ 0`.
    pub order: u32,
    /// Applied operator: `-1` for `|∇|⁻¹`, `m ≥ 0` for `∇^m`.
    pub prefix: i32,
    /// Homogeneous `Ḣ^s` (top derivative only) instead of `H^s`.
    pub homogeneous: bool,
}

impl Sobolev {
    pub const fn h(order: u32) -> Self {
        Self { order, prefix: 0, homogeneous: false }
    }

    /// `‖|∇|⁻¹ f‖_{H^s}`
    pub const fn inverse(order: u32) -> Self {
        Self { order, prefix: -1, homogeneous: false }
    }

    /// `‖∇^m f‖_{H^s}`
    pub const fn derivative(m: i32, order: u32) -> Self {
        Self { order, prefix: m, homogeneous: false }
    }

    pub const fn homogeneous(order: u32) -> Self {
        Self { order, prefix: 0, homogeneous: true }
    }

    /// Fourier weight multiplying `|f̂(k)|²`.
    #[inline]
    pub fn weight(&self, k2: f64) -> f64 {
        let pre = if self.prefix < 0 {
            if k2 == 0.0 {
                return 0.0;
            }
            k2.powi(self.prefix)
        } else {
            k2.powi(self.prefix)
        };
        let body = if self.homogeneous {
            k2.powi(self.order as i32)
        } else {
            (0..=self.order as i32).map(|j| k2.powi(j)).sum()
        };
        pre * body
    }
}

/// Sum over modes of `weight(|k|²) · Σ_c w_c |f̂_c(k)|²`, times the box volume.
pub fn weighted_energy<F: Components>(grid: &Grid, field: &F, weight: impl Fn(f64) -> f64) -> f64 {
    let mut acc = 0.0;
    for (c, comp) in field.components().iter().enumerate() {
        let mut part = 0.0;
        for (idx, v) in comp.coefficients().indexed_iter() {
            let w = weight(grid.k2(idx));
            if w != 0.0 {
                part += w * v.norm_sqr();
            }
        }
        acc += F::pairing_weight(c) * part;
    }
    BOX_VOLUME * acc
}

/// Sobolev norm via Parseval. Negative-order requests act on the
/// mean-zero part of the field.
pub fn sobolev_norm<F: Components>(grid: &Grid, field: &F, spec: Sobolev) -> f64 {
    weighted_energy(grid, field, |k2| spec.weight(k2)).sqrt()
}

/// The instantaneous norms entering the energies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NormSet {
    pub inv_u_h3: f64,
    pub inv_tau_h3: f64,
    pub u_h3: f64,
    pub u_h2: f64,
    pub grad_u_h2: f64,
    pub grad_u_h1: f64,
    pub grad2_u_h1: f64,
    pub inv_ptau_h2: f64,
    pub ptau_h1: f64,
    pub grad_ptau_l2: f64,
}

impl NormSet {
    /// Column names in output order.
    pub const NAMES: [&'static str; 10] = [
        "inv_u_h3",
        "inv_tau_h3",
        "u_h3",
        "u_h2",
        "grad_u_h2",
        "grad_u_h1",
        "grad2_u_h1",
        "inv_ptau_h2",
        "ptau_h1",
        "grad_ptau_l2",
    ];

    pub fn measure(grid: &Grid, u: &SpectralVector, tau: &SpectralSymTensor) -> Self {
        let ptau = projected_stress_div(grid, tau);
        Self {
            inv_u_h3: sobolev_norm(grid, u, Sobolev::inverse(3)),
            inv_tau_h3: sobolev_norm(grid, tau, Sobolev::inverse(3)),
            u_h3: sobolev_norm(grid, u, Sobolev::h(3)),
            u_h2: sobolev_norm(grid, u, Sobolev::h(2)),
            grad_u_h2: sobolev_norm(grid, u, Sobolev::derivative(1, 2)),
            grad_u_h1: sobolev_norm(grid, u, Sobolev::derivative(1, 1)),
            grad2_u_h1: sobolev_norm(grid, u, Sobolev::derivative(2, 1)),
            inv_ptau_h2: sobolev_norm(grid, &ptau, Sobolev::inverse(2)),
            ptau_h1: sobolev_norm(grid, &ptau, Sobolev::h(1)),
            grad_ptau_l2: sobolev_norm(grid, &ptau, Sobolev::derivative(1, 0)),
        }
    }

    pub fn values(&self) -> [f64; 10] {
        [
            self.inv_u_h3,
            self.inv_tau_h3,
            self.u_h3,
            self.u_h2,
            self.grad_u_h2,
            self.grad_u_h1,
            self.grad2_u_h1,
            self.inv_ptau_h2,
            self.ptau_h1,
            self.grad_ptau_l2,
        ]
    }

    /// Supremum arguments of `E₀, E₁, E₂` at time `t`.
    pub fn sup_terms(&self, t: f64) -> [f64; 3] {
        let w = 1.0 + t;
        [
            self.inv_u_h3.powi(2) + self.inv_tau_h3.powi(2),
            w * (self.u_h2.powi(2) + 2.0 * self.inv_ptau_h2.powi(2)),
            w * w * (self.grad_u_h1.powi(2) + 2.0 * self.ptau_h1.powi(2)),
        ]
    }

    /// Time integrands of `E₀, E₁, E₂` at time `t`.
    pub fn integrands(&self, t: f64) -> [f64; 3] {
        let w = 1.0 + t;
        [
            self.u_h3.powi(2) + self.inv_ptau_h2.powi(2),
            w * (self.grad_u_h2.powi(2) + self.ptau_h1.powi(2)),
            w * w * (self.grad2_u_h1.powi(2) + self.grad_ptau_l2.powi(2)),
        ]
    }
}

/// One diagnostic sample with the energies assembled up to its time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub t: f64,
    pub norms: NormSet,
    /// Frobenius norm of the mean of τ, tracked outside the negative-order norms.
    pub tau_mean: f64,
    /// Instantaneous supremum arguments.
    pub weighted: [f64; 3],
    /// Running maxima of `weighted`.
    pub sups: [f64; 3],
    /// Trapezoid time integrals.
    pub integrals: [f64; 3],
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
}

impl EnergyRecord {
    pub fn energies(&self) -> [f64; 3] {
        [self.e0, self.e1, self.e2]
    }
}

/// Incremental assembly of [`EnergyRecord`]s from samples in time order.
#[derive(Clone, Debug, Default)]
pub struct EnergyTracker {
    last: Option<(f64, [f64; 3])>,
    sups: [f64; 3],
    integrals: [f64; 3],
}

impl EnergyTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, norms: NormSet, tau_mean: f64) -> EnergyRecord {
        let weighted = norms.sup_terms(t);
        let integrand = norms.integrands(t);
        match self.last {
            None => self.sups = weighted,
            Some((t0, f0)) => {
                let h = t - t0;
                for i in 0..3 {
                    self.sups[i] = self.sups[i].max(weighted[i]);
                    self.integrals[i] += 0.5 * h * (f0[i] + integrand[i]);
                }
            }
        }
        self.last = Some((t, integrand));
        let e: [f64; 3] = std::array::from_fn(|i| self.sups[i] + self.integrals[i]);
        EnergyRecord {
            t,
            norms,
            tau_mean,
            weighted,
            sups: self.sups,
            integrals: self.integrals,
            e0: e[0],
            e1: e[1],
            e2: e[2],
        }
    }
}

/// Energies for a time-ordered history of `(t, norms)` samples.
pub fn assemble_energies(history: &[(f64, NormSet)]) -> Vec<EnergyRecord> {
    let mut tracker = EnergyTracker::new();
    history.iter().map(|&(t, n)| tracker.push(t, n, 0.0)).collect()
}

/// Ratios `E₀(t) / (E₀(0) + E₀^{3/2} + E₂^{3/2})` and
/// `E₂(t) / (E₀ + E₀^{3/2} + E₂^{3/2})` for each record. Their boundedness
/// is what the a-priori estimates assert, up to unspecified constants.
pub fn ratio_monitors(records: &[EnergyRecord]) -> Vec<(f64, f64, f64)> {
    let Some(first) = records.first() else {
        return Vec::new();
    };
    let e00 = first.e0;
    records
        .iter()
        .map(|r| {
            let tail = r.e0.powf(1.5) + r.e2.powf(1.5);
            let a = e00 + tail;
            let b = r.e0 + tail;
            let ratio = |x: f64, d: f64| if d > 0.0 { x / d } else { 0.0 };
            (r.t, ratio(r.e0, a), ratio(r.e2, b))
        })
        .collect()
}

/// `‖f‖²_{Ḣ^s} / (‖f‖_{Ḣ^{s−1}} ‖f‖_{Ḣ^{s+1}})`, at most one by
/// Cauchy–Schwarz in mode space.
pub fn interpolation_check<F: Components>(grid: &Grid, field: &F, s: f64) -> Result<f64> {
    for c in field.components() {
        let mean = c.mean().norm();
        if s - 1.0 < 0.0 && mean > 1e-13 * (1.0 + c.coefficient_energy().sqrt()) {
            return Err(Error::MeanNotZero { mean });
        }
    }
    let hom = |order: f64| {
        weighted_energy(grid, field, |k2| if k2 == 0.0 { 0.0 } else { k2.powf(order) })
    };
    let mid = hom(s);
    let den = (hom(s - 1.0) * hom(s + 1.0)).sqrt();
    Ok(if den == 0.0 { 0.0 } else { mid / den })
}

/// Least-squares line fit result.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub samples: usize,
}

/// Minimum number of samples inside a fit window.
pub const MIN_FIT_SAMPLES: usize = 10;

fn line_fit(points: &[(f64, f64)]) -> Fit {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    // a flat series is fitted perfectly by a flat line
    let r_squared = if ss_tot <= 1e-300 || ss_res <= 1e-28 * ss_tot.max(1.0) {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Fit { slope, intercept, r_squared, samples: points.len() }
}

fn windowed_log(
    series: &[(f64, f64)],
    window: (f64, f64),
    abscissa: impl Fn(f64) -> f64,
) -> Result<Vec<(f64, f64)>> {
    let mut pts = Vec::new();
    for &(t, v) in series.iter().filter(|(t, _)| *t >= window.0 && *t <= window.1) {
        if !(v > 0.0) {
            return Err(Error::NonPositiveSeries { t, value: v });
        }
        pts.push((abscissa(t), v.ln()));
    }
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples { found: pts.len(), needed: MIN_FIT_SAMPLES });
    }
    Ok(pts)
}

/// Power-law exponent: slope of `log(value)` against `log(1 + t)` over the
/// window. A poor `r²` flags a series that is not power-law (for example
/// the exponential decay seen on the torus).
pub fn decay_fit(series: &[(f64, f64)], window: (f64, f64)) -> Result<Fit> {
    Ok(line_fit(&windowed_log(series, window, |t| (1.0 + t).ln())?))
}

/// Exponential rate: slope of `log(value)` against `t` over the window.
pub fn exponential_rate_fit(series: &[(f64, f64)], window: (f64, f64)) -> Result<Fit> {
    Ok(line_fit(&windowed_log(series, window, |t| t)?))
}
