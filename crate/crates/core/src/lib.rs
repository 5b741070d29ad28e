//! Exact, truncated computations for Anderson t-motives over A = F_q[t].
//!
//! Modules follow the pipeline: arithmetic in K∞ and its finite extensions
//! ([`field_tower`]), Tate-algebra series ([`tate`]), motives and their
//! integral models ([`motive`]), Betti realizations ([`betti`]), Hodge-Pink
//! structures ([`hodge_pink`]), extension modules and regulators
//! ([`regulator`]), shtuka-model cohomology ([`shtuka`]) and the command
//! line front end ([`cli`]).

pub mod betti;
pub mod cli;
pub mod error;
pub mod field_tower;
pub mod hodge_pink;
pub mod linalg;
pub mod motive;
pub mod poly;
pub mod regulator;
pub mod shtuka;
pub mod tate;

pub use error::{Error, Result};
