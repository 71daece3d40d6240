//! Quantum Max Cut approximation.
//!
//! The pipeline solves the level-2 moment relaxation of the antiferromagnetic
//! Heisenberg Hamiltonian `Σ w_ij (I − X_iX_j − Y_iY_j − Z_iZ_j)/4`, rounds the
//! vertex vectors to a product state, builds the singlet state on a maximum
//! weight matching, and keeps whichever has more energy. A dense exact oracle
//! and an audit of the monogamy inequalities on SDP output are included for
//! checking.
//!
//! Numerical code is generic over [`Real`] (`f32`, `f64`); graphs, matchings
//! and the fractional-matching LP are generic over [`Weight`], which also
//! covers exact rationals. The aliases below fix `f64`.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod graph;
pub mod matching;
pub mod oracle;
pub mod pauli;
pub mod rounding;
pub mod scalar;
pub mod sdp;
pub mod special;
pub mod state;

pub use error::Error;
pub use graph::{parse_graph, read_graph, Edge, WeightedGraph};
pub use matching::{max_weight_matching, matching_state_energy, FractionalMatching, Matching};
pub use oracle::{build_hamiltonian, energy_of_description, max_energy, DenseHamiltonian, EnergyReport};
pub use pauli::{Axis, PauliString, Phase};
pub use rounding::{gp_round, product_state_energy, ProductState, RngSeed};
pub use scalar::{Real, Weight};
pub use sdp::{build_moment_structure, solve_sdp, Level, MomentStructure, SdpSolution, SolverOptions};
pub use special::f3;
pub use state::{QuantumStateDescription, StateKind};

pub type Graph = WeightedGraph<f64>;
pub type RationalGraph = WeightedGraph<num_rational::Rational64>;
pub type Solution = SdpSolution<f64>;
pub type Product = ProductState<f64>;
pub type StateDescription = QuantumStateDescription<f64>;
pub type Hamiltonian = DenseHamiltonian<f64>;
pub type SolveReport = analysis::SolveReport<f64>;
pub type AuditReport = analysis::AuditReport<f64>;
