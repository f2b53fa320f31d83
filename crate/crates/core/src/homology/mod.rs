//! Canonical homology basis, normalized periods, Abel map and Riemann constants.

pub mod abel;
pub mod basis;
pub mod lattice;
pub mod periods;

pub use abel::{
    abel_branch_point, abel_map, canonical_route, riemann_constants, riemann_constants_formula,
};
pub use basis::{build_basis, star_loop, CycleBasis, CyclePath, LoopComponent};
pub use lattice::{
    characteristic, half_period, lattice_distance, lattice_reduce, Characteristic, LatticeReduction,
};
pub use periods::{
    compute_periods, cycle_periods, integrate_monomial, period_data, PeriodData, PeriodDiagnostics,
};
