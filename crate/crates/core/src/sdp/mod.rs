//! Level-1 and level-2 moment relaxations and their first-order solver.

mod moment;
mod solution;
mod solver;
mod symmetry;

pub use moment::{build_moment_structure, ClassEntry, Level, MomentClass, MomentStructure, Objective};
pub use solution::{EdgeValues, Residuals, SdpSolution};
pub use solver::{solve_sdp, SolverOptions};
