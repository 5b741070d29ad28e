//! Exact arithmetic for F_q, K∞ and finite Galois extensions of K∞.

pub mod fq;
pub mod laurent;
pub mod peel;
pub mod tower;

pub use fq::Fq;
pub use laurent::Laurent;
pub use peel::{peel, peel_artin_schreier, Peeled};
pub use tower::{solve_artin_schreier, solve_artin_schreier_kinf, AsSolution, GaloisElem, LElem, Tower};
