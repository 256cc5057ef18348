//! Clifford algebra machinery: gamma matrices, exact algebra elements, and
//! the groups `Spin(n)` and `Spin^c(n)` with their vector representation.

mod element;
mod gamma;
mod group;

pub use element::{
    clifford_mul, monomial_grade, monomial_indices, monomial_product, CliffordElement, Monomial, MAX_CLIFFORD_DIM,
};
pub use gamma::{build_gamma, build_gamma_capped, i_pow, standard_grading, verify_gamma, GammaSet, MAX_GAMMA_DIM};
pub use group::{
    complex_rotation, d_rho, exp_lambda2, exp_lambda2_with_stats, rotation_of, spin_inverse, vector_rep, ExpStats,
    SkewMatrix, EXP_TAIL_BOUND, MEMBERSHIP_TOL,
};
