//! Exact monodromy representation of Lauricella's `F_C` system `E_C(a, b, c)`
//! over cyclotomic fields, with structural checks, group classification,
//! integer models for `n = 2, 3` and numerical evaluation of `F_C`.

pub mod error;
pub mod field;
pub mod matrix;
pub mod monodromy;
pub mod structure;
pub mod classify;
pub mod special;
pub mod numerics;

pub use error::{Error, Result};
pub use field::{CycNum, ParameterSet, UnitRoots};
pub use matrix::{ExactMatrix, IndexWord, Vector};
pub use monodromy::MonodromySystem;
