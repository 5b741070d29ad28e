//! Polynomial rings over F_q.

pub mod bipoly;
pub mod pid;
pub mod upoly;

pub use bipoly::Poly2;
pub use pid::RatFunc;
pub use upoly::Poly;
