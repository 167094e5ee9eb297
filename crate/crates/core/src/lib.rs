//! Pseudo-orbits, brackets and constructive shadowing on concrete systems.

pub mod bowen;
pub mod bracket;
pub mod error;
pub mod generate;
pub mod io;
pub mod metric;
pub mod orbit;
pub mod report;
pub mod sampling;
pub mod suite;
pub mod system;
pub mod systems;
pub mod verify;

pub use bowen::{
    backward_map, bowen_shadow, check_self_tuning, choose_m, envelope_bound, forward_map, symmetric_shadow,
    AdmissibilityMode, BowenConfig, Envelope, Profile, ShadowResult, StageRecord,
};
pub use bracket::{Bracket, BracketKind, FirstArg, Hyperbolicity, InducedBracket, Swapped};
pub use error::{Admissibility, Error, Result};
pub use generate::{generate, generate_cycle, Schedule};
pub use metric::{discrepancy1, discrepancy2, local_discrepancy, tilde_dist_m, tilde_dist_s, BoundedValue, SeqMetric};
pub use orbit::{block_jumps, connect, image, jumps, orbit_cap, orbit_map, Extension, Jumps, PseudoOrbit};
pub use report::CheckReport;
pub use sampling::{Halton, Sampler};
pub use system::{apply_iter, lipschitz_geom_sum, Coordinates, MetricSystem, Reversed, Sampling};
pub use verify::{BowenMethod, CatOracle, Projection, ShadowingMethod, ShiftCanonical};
