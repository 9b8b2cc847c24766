//! Inchworm resummation of the coefficient Dyson series, one beam pair at a
//! time.

mod all_pairs;
mod lattice;
mod pair;
mod timegrid;


pub use all_pairs::{pair_count, solve_all_pairs, Coefficients, Progress};
pub use lattice::CorrelationLattice;
pub(crate) use pair::vertex_factors;
pub use pair::{solve_pair, solve_pair_table, PairCenters, PairSolver, PropagatorTable};
pub use timegrid::{Branch, TimeGrid};
