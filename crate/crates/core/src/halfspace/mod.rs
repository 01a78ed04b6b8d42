//! Weighted finite-volume solver for `div(y^a ∇U) = 0` on a periodic
//! half-strip, and the Dirichlet-to-Neumann map read off its solutions.

mod strip;
mod system;
mod trace;

pub use strip::{default_grading, GridField, HalfStrip};
pub use system::{
    assemble, assemble_with_potential, solve_dirichlet, DirichletSolver, LinearSystem, SolveStats,
    Stencil, MAX_PCG_ITER,
};
pub(crate) use strip::write_atomic;
pub use trace::{
    cosine_mode, fit_fractional_slope, hopf_positivity_check, neumann_trace, neumann_trace_with,
    verify_max_principle, HopfReport, FIT_ROWS,
};

