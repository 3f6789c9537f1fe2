//! Modular reductions, NTT butterflies and transforms built on the
//! Montgomery and Plantard multiplications, plus exact oracles to check
//! them against.

pub mod analysis;
pub mod bench;
pub mod butterflies;
pub mod crt;
pub mod error;
pub mod ops;
pub mod oracle;
pub mod params;
pub mod reductions;
pub mod transform;

pub use error::{Error, Result};
pub use params::{build_params, preset, NttParams, TransformKind, PRESET_NAMES};
pub use reductions::{ReductionContext, ShiftSemantics};
pub use transform::{intt_inverse, ntt_forward, Order, Polynomial, Spectrum};
