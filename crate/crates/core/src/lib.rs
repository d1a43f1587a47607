//! Cycle covers of complete S-partite blow-ups.
//!
//! A skeleton `S` on `q` nodes (loops allowed) together with part sizes `x`
//! defines the blow-up `K_x`. The largest number of vertices of `K_x` that can
//! be covered by vertex-disjoint cycles equals the optimum of the linear
//! program `max 1ᵀy` over `y = Zc`, `c >= 0`, `y <= x`, where `Z` is the
//! incidence matrix of `S` with halves on non-loop columns. [`solve_lp`]
//! computes an integral optimal `c`, and [`build_cycle_cover`] turns it into
//! explicit cycles. [`exact_solve`] computes the same quantity for arbitrary
//! graphs, and [`simulate`] compares the two on random subgraphs.

pub mod cover;
pub mod error;
pub mod exact;
pub mod flow;
pub mod io;
pub mod lp;
pub mod matching;
pub mod simulate;
pub mod skeleton;
pub mod verify;

pub use cover::{build_cycle_cover, CycleCover};
pub use error::{Error, Result};
pub use exact::{exact_n, exact_solve, ExactConfig, ExactSolution, GeneralGraph};
pub use lp::{solve_lp, LpSolution};
pub use skeleton::{blow_up, BlowupGraph, EdgeCoefficients, NodeAllocation, SkeletonGraph};
