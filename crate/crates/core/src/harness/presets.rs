//! Initial data.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::{sobolev_norm, Sobolev};
use crate::error::{Error, Result};
use crate::hookean::HookeanState;
use crate::model::OldroydState;
use crate::spectral::{random, Components, Grid, SpectralSymTensor, SpectralTensor, SpectralVector};

use super::config::ModelKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// `u = A(sin x₁ cos x₂ cos x₃, −cos x₁ sin x₂ cos x₃, 0)`, `τ = 0`.
    TaylorGreen,
    /// Random solenoidal `u` and symmetric `τ` on `0 < |k| ≤ kmax`.
    RandomBand,
    /// Random `u` and a deformation `F₀ − I` with no divergence or curl
    /// structure.
    HookeanGeneric,
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "taylor-green" => Ok(Self::TaylorGreen),
            "random-band" => Ok(Self::RandomBand),
            "hookean-generic" => Ok(Self::HookeanGeneric),
            other => Err(Error::BadPreset(other.into())),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::TaylorGreen => "taylor-green",
            Self::RandomBand => "random-band",
            Self::HookeanGeneric => "hookean-generic",
        })
    }
}

impl Preset {
    /// Whether the preset can seed a run of the given kind. Hookean data
    /// seeds Oldroyd-B runs through `τ₀ = G(F₀)`; random stresses have no
    /// deformation to go with them.
    pub fn supports(self, model: ModelKind) -> bool {
        !(self == Self::RandomBand && model == ModelKind::Hookean)
    }
}

/// Initial state of either system.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    Oldroyd(OldroydState),
    Hookean(HookeanState),
}

impl InitialState {
    /// Oldroyd-B view; a Hookean state maps through `τ = G(F)`.
    pub fn to_oldroyd(&self, grid: &Grid) -> OldroydState {
        match self {
            Self::Oldroyd(s) => s.clone(),
            Self::Hookean(h) => h.to_oldroyd(grid),
        }
    }

    /// Hookean view; an Oldroyd-B state must carry `τ = 0` (then `F = I`).
    pub fn to_hookean(&self, grid: &Grid) -> Result<HookeanState> {
        match self {
            Self::Hookean(h) => Ok(h.clone()),
            Self::Oldroyd(s) if s.tau.l2_norm() == 0.0 => {
                Ok(HookeanState { u: s.u.clone(), f_minus_i: SpectralTensor::zeros(grid) })
            }
            Self::Oldroyd(_) => Err(Error::BadPreset("stress data without a deformation".into())),
        }
    }
}

/// `‖|∇|⁻¹u‖_{H³} + ‖|∇|⁻¹X‖_{H³}`, the smallness quantity of the data.
pub fn data_norm<F: Components>(grid: &Grid, u: &SpectralVector, x: &F) -> f64 {
    sobolev_norm(grid, u, Sobolev::inverse(3)) + sobolev_norm(grid, x, Sobolev::inverse(3))
}

fn taylor_green(grid: &Grid, amplitude: f64) -> SpectralVector {
    // sin x cos y cos z = Σ over sign patterns of e^{i(±x±y±z)} / (8i) · sign
    let mut u = SpectralVector::zeros(grid);
    let q = Complex64::new(0.0, -amplitude / 8.0);
    for sx in [-1i64, 1] {
        for sy in [-1i64, 1] {
            for sz in [-1i64, 1] {
                let k = [sx, sy, sz];
                let idx = grid.index_of(k).expect("unit modes fit every grid");
                u.0[0].coefficients_mut()[idx] += q * sx as f64;
                u.0[1].coefficients_mut()[idx] -= q * sy as f64;
            }
        }
    }
    u
}

/// Builds the initial data. `kmax` must not exceed `n/3`.
pub fn make_initial(
    preset: Preset,
    amplitude: f64,
    kmax: f64,
    seed: u64,
    grid: &Grid,
) -> Result<InitialState> {
    if kmax > grid.n() as f64 / 3.0 {
        return Err(Error::OutOfRange {
            key: "init.kmax".into(),
            reason: format!("{kmax} exceeds n/3 for n = {}", grid.n()),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(match preset {
        Preset::TaylorGreen => InitialState::Oldroyd(OldroydState {
            u: taylor_green(grid, amplitude),
            tau: SpectralSymTensor::zeros(grid),
        }),
        Preset::RandomBand => {
            let mut u = random::solenoidal(grid, &mut rng, kmax);
            let mut tau = random::sym_tensor(grid, &mut rng, kmax);
            let c = amplitude / data_norm(grid, &u, &tau);
            u.scale(c);
            tau.scale(c);
            InitialState::Oldroyd(OldroydState { u, tau })
        }
        Preset::HookeanGeneric => {
            let mut u = random::solenoidal(grid, &mut rng, kmax);
            let mut f = random::tensor(grid, &mut rng, kmax);
            let c = amplitude / data_norm(grid, &u, &f);
            u.scale(c);
            f.scale(c);
            InitialState::Hookean(HookeanState { u, f_minus_i: f })
        }
    })
}
