//! Shtuka models, the complex G_M and its Čech description, and the
//! mock regulator.

pub mod cohomology;
pub mod mock;
pub mod model;

pub use cohomology::{cech_cone, compare_routes, g_complex, ConeReport, GComplex, QuasiIsoReport, SliceOptions};
pub use mock::{mock_consistency, mock_regulator, mock_regulator_from_xi, plus_kernel_value, target_class, MockConsistency, MockOptions, MockValue, Relation};
pub use model::{build_c_shtuka, build_cxc_shtuka, ShtukaModel};
