//! Exact computer algebra for Courant algebroids over polynomial
//! coefficient algebras.

pub mod cli;
pub mod cmap;
pub mod courant;
pub mod deform;
pub mod der;
pub mod document;
pub mod error;
pub mod iso;
pub mod linalg;
pub mod module;
pub mod poly;
pub mod rothstein;
pub mod sample;
pub mod scalar;
pub mod symbol_map;

pub use error::{Error, Result};
pub use poly::{Algebra, BackendKind, Mono, Poly};
pub use scalar::Rational;
