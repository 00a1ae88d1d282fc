pub mod error;
pub mod ftrl;
pub mod harness;
pub mod matrix;
pub mod problems;
pub mod reduction;
pub mod reg;
pub mod validators;

pub use error::{Error, Result};
pub use matrix::{frobenius_inner, norms, psd_floor, sym_eig, EigPair, Norms, RectMatrix, SymMatrix};
