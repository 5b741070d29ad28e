//! Hodge–Pink structures: lattices in L((j))^r, filtrations and extensions.

pub mod jseries;
pub mod ext;
pub mod lattice;
pub mod quotient;
pub mod structure;

pub use jseries::JSeries;
pub use lattice::Lattice;
pub use quotient::QuotientForm;
pub use structure::{HodgePinkStructure, Ring};
