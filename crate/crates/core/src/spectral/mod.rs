//! Periodic-box spectral representation.

pub mod dealias;
pub mod field;
pub mod grid;
pub mod ops;
pub mod random;

pub use field::{
    sym_index, Components, SpectralScalar, SpectralSymTensor, SpectralTensor, SpectralVector,
    SYM_PAIRS,
};
pub use grid::{Grid, BOX_LENGTH, BOX_VOLUME};
