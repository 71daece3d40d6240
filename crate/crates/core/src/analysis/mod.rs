//! Audits, constant certification and the end-to-end pipeline.

pub mod audit;
pub mod certify;
pub mod ellipse;
mod pipeline;

pub use audit::{audit, audit_convexgamy, audit_star, audit_triangle, AuditReport, AuditSection, AuditViolation, Inequality};
pub use certify::{certify_alpha, edge_ratio, inner_minimum, GridSpec, InnerMinimum, RatioCertificate};
pub use ellipse::{ellipse_region_data, BoundaryPoint, Curve};
pub use pipeline::{run_algorithm, AlgorithmOptions, ChainedBound, SolveReport};
