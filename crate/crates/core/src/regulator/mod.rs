//! Extension modules of motives, the maps r_B and Reg, the Hodge–Pink
//! realization H⁺ and the rank–dimension comparison.

pub mod extension;
pub mod gamma;
pub mod plus;
pub mod rankdim;

pub use gamma::{gamma_expand, hodge_realize, Gamma, HodgeRealization};
pub use extension::{boundary, ext_from_m, ext_normalize, MotExtClass, Normalizer};
pub use plus::{PlusPresentation, Regulator, RegulatorReport};
pub use rankdim::{rank_dim_compare, RankDimOptions, RankDimReport};
