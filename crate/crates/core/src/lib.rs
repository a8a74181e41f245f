//! Rank-modulation rewriting codes for flash memory.
//!
//! Data is stored as the relative order of cell levels. A rewrite only
//! raises levels, and the codes here bound how far the top level climbs per
//! write. The crate covers modulation, enumerative permutation codes,
//! write-once-memory (WOM) ingredient codes, the rewriting constructions
//! built from them, capacity calculators, and a lifetime simulator.

pub mod cellmod;
pub mod limits;
pub mod permlib;
pub mod polarwom;
pub mod presets;
pub mod rmcodes;
pub mod scalar;
pub mod sim;
pub mod womlib;

mod bigser;

pub use cellmod::{CellState, DemodResult};
pub use permlib::{BinaryWord, MsPermutation, MultisetSpec};
pub use presets::Preset;
pub use rmcodes::{RewriteCode, RmError};
pub use scalar::{Fraction, Level};

/// Cell state with `f64` levels, the default storage type.
pub type CellStateF64 = CellState<f64>;
/// Cell state with `f32` levels.
pub type CellStateF32 = CellState<f32>;
/// Cell state with exact rational levels.
pub type ExactCellState = CellState<num_rational::Ratio<i64>>;
/// Cell state with arbitrary-precision rational levels.
pub type BigExactCellState = CellState<num_rational::BigRational>;
