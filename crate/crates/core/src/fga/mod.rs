//! Frozen Gaussian beams: phase-space grid, beam equations and evaluation.

mod beam;
mod eval;
mod grid;
mod overlap;

pub use beam::{propagate_beam, BeamState, BeamTrajectory, Jacobian, CAUSTIC_GUARD};
pub use eval::{eval_beam, Beam, BeamSet};
pub use grid::BeamGrid;
pub use overlap::{integrate, y_overlap, y_overlap_quadrature};
