//! Sharp product of graded operators,
//!
//! ```text
//! D1 # D2 = [ D1 ⊗ 1   -1 ⊗ D2* ]
//!           [ 1 ⊗ D2    D1* ⊗ 1 ]
//! ```
//!
//! mapping `(S1⁺⊗S2⁺) ⊕ (S1⁻⊗S2⁻)` to `(S1⁻⊗S2⁺) ⊕ (S1⁺⊗S2⁻)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{c64, GradedOperator};
use crate::error::{invalid, Result};
use crate::matrix::ComplexMatrix;

/// Cap on either graded dimension of a sharp product.
pub const MAX_SHARP_DIM: usize = 10_000;

pub fn sharp(d1: &GradedOperator, d2: &GradedOperator) -> Result<GradedOperator> {
    let (p1, m1) = (d1.plus_dim(), d1.minus_dim());
    let (p2, m2) = (d2.plus_dim(), d2.minus_dim());
    let plus = p1 * p2 + m1 * m2;
    let minus = m1 * p2 + p1 * m2;
    if plus > MAX_SHARP_DIM || minus > MAX_SHARP_DIM {
        return Err(invalid(
            "dims",
            format!("sharp product of size {minus}x{plus} exceeds the cap {MAX_SHARP_DIM}"),
        ));
    }
    let a = d1.matrix();
    let b = d2.matrix();
    let top_left = a.kron(&ComplexMatrix::identity(p2));
    let top_right = -&ComplexMatrix::identity(m1).kron(&b.adjoint());
    let bottom_left = ComplexMatrix::identity(p1).kron(b);
    let bottom_right = a.adjoint().kron(&ComplexMatrix::identity(m2));
    let mat = ComplexMatrix::from_blocks(&[vec![&top_left, &top_right], vec![&bottom_left, &bottom_right]]);
    GradedOperator::new(plus, minus, mat)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpAdjointResiduals {
    /// `‖(D1#D2)* - (-(D1*#D2))‖_max`, the identity read literally on the
    /// block ordering above.
    pub literal: f64,
    /// `‖(D1#D2)* - L(-(D1*#D2))R‖_max` with `L = diag(1, -1)` on the
    /// target and `R = diag(-1, 1)` on the source summands; equivalently
    /// `(D1#D2)* = D1*#(-D2)`.
    pub graded: f64,
}

/// Residuals of the adjoint identity for the sharp product.
pub fn sharp_adjoint_residuals(d1: &GradedOperator, d2: &GradedOperator) -> Result<SharpAdjointResiduals> {
    let lhs = sharp(d1, d2)?.matrix().adjoint();
    let rhs = sharp(&d1.adjoint(), d2)?.matrix().scale(&c64(-1.0, 0.0));
    let literal = lhs.max_abs_diff(&rhs);
    // the rows of the adjoint split as S1⁺S2⁺ ⊕ S1⁻S2⁻ and the columns as
    // S1⁻S2⁺ ⊕ S1⁺S2⁻
    let (p1, m1) = (d1.plus_dim(), d1.minus_dim());
    let p2 = d2.plus_dim();
    let first_row = p1 * p2;
    let first_col = m1 * p2;
    let signed = ComplexMatrix::from_fn(rhs.rows(), rhs.cols(), |i, j| {
        let l = if i < first_row { 1.0 } else { -1.0 };
        let r = if j < first_col { -1.0 } else { 1.0 };
        rhs[(i, j)] * (l * r)
    });
    Ok(SharpAdjointResiduals {
        literal,
        graded: lhs.max_abs_diff(&signed),
    })
}

/// Random graded operator with dimensions in `1..=max_dim` and a random rank,
/// built as a product of two random factors through a space of that rank.
pub fn random_graded<R: Rng + ?Sized>(rng: &mut R, max_dim: usize) -> GradedOperator {
    let p = rng.random_range(1..=max_dim);
    let m = rng.random_range(1..=max_dim);
    let k = rng.random_range(0..=p.min(m));
    let mut entry = || c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let left = ComplexMatrix::from_fn(m, k, |_, _| entry());
    let right = ComplexMatrix::from_fn(k, p, |_, _| entry());
    GradedOperator::from_matrix(&left * &right)
}
