//! Relative entropy of entanglement for maximally-correlated bipartite states.
//!
//! For `σ = Σ a_{n₁n₂} |φ_{n₁}ψ_{n₁}⟩⟨φ_{n₂}ψ_{n₂}|` the closest separable state is the
//! diagonal part `ρ* = Σ a_nn |φ_nψ_n⟩⟨φ_nψ_n|` and
//! `Er(σ) = −Σ a_nn ln a_nn − S(σ)`.
//!
//! The crate evaluates that closed form ([`closed_form`]), certifies the optimality of `ρ*`
//! through the sign of the directional derivative toward every product state ([`certifier`]),
//! and checks both against a direct numerical minimization over separable ensembles
//! ([`minimizer`]) that never looks at the closed form.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x <= tol)` also rejects NaN

pub mod certifier;
pub mod cli;
pub mod closed_form;
pub mod error;
pub mod io;
mod lbfgs;
pub mod linalg;
pub mod minimizer;
pub mod state;

pub use closed_form::{er_closed_form, g_kernel, two_qubit_er, ErResult};
pub use error::{Error, Result};
pub use linalg::{
    eigh, frechet_log_trace, log_divided_difference, relative_entropy, von_neumann_entropy,
    ComplexMatrix, ComplexVector, HermitianEigensystem,
};
pub use state::{
    build_sigma, closest_separable, ensemble_to_density, random_coefficient_matrix,
    random_product_state, validate_coefficients, CoefficientMatrix, DensityMatrix,
    ProductPureState, SeparableEnsemble,
};
