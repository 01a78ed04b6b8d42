//! The round sphere `Sⁿ` restricted to zonal (axially symmetric) fields.
//!
//! `P_γ` acts on degree-`k` harmonics by `Γ(k+n/2+γ)/Γ(k+n/2−γ)`; every
//! nonlinear operation is done at Gauss nodes in `x = cos θ` with the band
//! limit padded from `K` to `2K`.

mod basis;
mod eigen;
mod field;
mod operator;
mod solver;

pub use basis::ZonalBasis;
pub use eigen::{first_eigenvalue, trichotomy_classify, FirstEigenpair, Trichotomy};
pub use field::{gauss_nodes, zonal_inverse, zonal_inverse_on, zonal_transform, ZonalField};
pub use operator::{
    conformal_pgamma, multipliers, pgamma_apply, qgamma_round, sphere_yamabe_constant,
    yamabe_functional, yamabe_functional_conformal, SphereOperatorSpec,
};
pub use solver::{constant_solution_c_beta, subcritical_solve, SolverOptions, SolverReport};
