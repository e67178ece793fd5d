//! Random jigsaw and edge-matching puzzles at desk scale: uniform sampling,
//! exact enumeration of solutions up to similarity, contour-graph analysis,
//! exact counting bounds, and seeded Monte Carlo experiments around the
//! uniqueness threshold.
//!
//! The model: an `n`x`n` grid of square pieces, each of the `2n(n+1)` edge
//! sides carved independently and uniformly into one of `q` jig types; a jig
//! of type `j` fits type `iota(j)` for a fixed involution `iota`. Two
//! solutions are similar when they induce the same carving up to a global
//! rotation. See `README.md` for the command-line surface.

pub mod combinatorics;
pub mod error;
pub mod experiments;
pub mod io;
pub mod puzzle;
pub mod sampler;
pub mod solver;
pub mod structure;

pub use error::{Error, Result};
pub use puzzle::{
    carving_of_assembly, similar, Assembly, Carving, Dir, HalfEdge, Jig, JigSystem, Piece,
    PieceBox, Placement, Pos, Symmetry,
};
pub use sampler::{box_of, make_jig_system, sample_carving, IotaKind, RngStream};
pub use solver::{
    classify, enumerate_solution_carvings, is_feasible, naive_enumerate, ClassifyOutcome,
    SearchBudget, SolveResult, StopReason, Verdict,
};
