//! Coordinated min-sum motion planning for k translating axis-aligned
//! unit-square robots in a polygonal environment with holes.
//!
//! The pipeline erodes the workspace into per-radius free spaces, collects
//! landmarks from their vertices, samples a grid near the landmarks, and runs
//! an exact-edge shortest-path search over the implicit configuration graph.
//! Around it live a plan verifier, an order-type plan simplifier, free-space
//! structure diagnostics (corridors, revolving areas, parking places), and
//! independent brute-force oracles used for validation.

// `!(x > 0.0)` style checks are deliberate: they reject NaN along with the
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clip;
pub mod diagnostics;
pub mod error;
pub mod freespace;
pub mod geom;
pub mod kinematics;
pub mod oracle;
pub mod plan;
pub mod planner;
pub mod sampling;
pub mod simplify;

pub use error::Error;
