//! Finite graded operators and their indices: the twisted Dirac operator on
//! `S^2` in a spin-weighted harmonic basis, an overlap lattice Dirac operator
//! on `T^2` with constant U(1) flux, and the sharp product of two operators.

mod sharp;
mod sphere;
mod torus;

pub use sharp::{random_graded, sharp, sharp_adjoint_residuals, SharpAdjointResiduals, MAX_SHARP_DIM};
pub use sphere::{dirac_s2, ladder_coefficient, sphere_spec, SectorBlock, SphereDiracSpec};
pub use torus::{
    dolbeault_torus, dolbeault_torus_batch, dolbeault_torus_with_stats, LatticeFluxField, TorusStats, CHIRAL_TOL,
    MAX_LATTICE, MIN_H_GAP,
};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Singular values below `DEFAULT_REL_TOL * σ_max` count as zero.
pub const DEFAULT_REL_TOL: f64 = 1e-8;
/// Smallest admissible ratio between the smallest nonzero and the largest
/// zero singular value.
pub const MIN_GAP_RATIO: f64 = 1e3;

/// An odd operator on `V⁺ ⊕ V⁻`, stored by its `D⁺: V⁺ → V⁻` block.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedOperator {
    plus_dim: usize,
    minus_dim: usize,
    matrix: ComplexMatrix<f64>,
}

impl GradedOperator {
    pub fn new(plus_dim: usize, minus_dim: usize, matrix: ComplexMatrix<f64>) -> Result<Self> {
        if matrix.shape() != (minus_dim, plus_dim) {
            return Err(Error::DimensionMismatch(format!(
                "D+ must be {minus_dim}x{plus_dim}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self {
            plus_dim,
            minus_dim,
            matrix,
        })
    }

    /// The operator whose `D⁺` is the given `rows x cols` matrix.
    pub fn from_matrix(matrix: ComplexMatrix<f64>) -> Self {
        Self {
            plus_dim: matrix.cols(),
            minus_dim: matrix.rows(),
            matrix,
        }
    }

    pub fn zero(plus_dim: usize, minus_dim: usize) -> Self {
        Self::from_matrix(ComplexMatrix::zeros(minus_dim, plus_dim))
    }

    pub fn plus_dim(&self) -> usize {
        self.plus_dim
    }

    pub fn minus_dim(&self) -> usize {
        self.minus_dim
    }

    pub fn matrix(&self) -> &ComplexMatrix<f64> {
        &self.matrix
    }

    /// The same operator with the grading reversed: `D⁻ = (D⁺)*`.
    pub fn adjoint(&self) -> Self {
        Self::from_matrix(self.matrix.adjoint())
    }

    pub fn negated(&self) -> Self {
        Self::from_matrix(-&self.matrix)
    }

    /// Full odd form `[[0, -(D⁺)*], [D⁺, 0]]` on `V⁺ ⊕ V⁻`.
    pub fn odd_form(&self) -> ComplexMatrix<f64> {
        let (p, m) = (self.plus_dim, self.minus_dim);
        let zp = ComplexMatrix::zeros(p, p);
        let zm = ComplexMatrix::zeros(m, m);
        let minus_adj = -&self.matrix.adjoint();
        ComplexMatrix::from_blocks(&[vec![&zp, &minus_adj], vec![&self.matrix, &zm]])
    }

    /// Block direct sum, graded piecewise.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let p = self.plus_dim + other.plus_dim;
        let m = self.minus_dim + other.minus_dim;
        let mut out = ComplexMatrix::zeros(m, p);
        for i in 0..self.minus_dim {
            for j in 0..self.plus_dim {
                out[(i, j)] = self.matrix[(i, j)];
            }
        }
        for i in 0..other.minus_dim {
            for j in 0..other.plus_dim {
                out[(self.minus_dim + i, self.plus_dim + j)] = other.matrix[(i, j)];
            }
        }
        Self::from_matrix(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexResult {
    pub index: i64,
    pub ker_dim: usize,
    pub coker_dim: usize,
    pub rank: usize,
    pub sigma_max: f64,
    /// Largest singular value counted as zero (`0` if none).
    pub largest_zero: f64,
    /// Smallest singular value counted as nonzero (`None` if none).
    pub smallest_nonzero: Option<f64>,
    /// `smallest_nonzero / largest_zero`; `None` when unbounded, i.e. when
    /// no singular value is counted as zero or the zero ones vanish exactly.
    pub gap_ratio: Option<f64>,
}

/// Index `dim ker D⁺ - dim coker D⁺` by thresholded singular values.
pub fn index_of(op: &GradedOperator, rel_tol: f64) -> Result<IndexResult> {
    index_of_singular_values(op.plus_dim, op.minus_dim, &op.matrix.singular_values(), rel_tol)
}

/// Same as [`index_of`] from precomputed singular values of a
/// `minus_dim x plus_dim` matrix.
pub fn index_of_singular_values(
    plus_dim: usize,
    minus_dim: usize,
    singular_values: &[f64],
    rel_tol: f64,
) -> Result<IndexResult> {
    let sigma_max = singular_values.iter().copied().fold(0.0, f64::max);
    let threshold = rel_tol * sigma_max;
    let (zero, nonzero): (Vec<f64>, Vec<f64>) = singular_values
        .iter()
        .partition(|&&s| sigma_max == 0.0 || s < threshold);
    let largest_zero = zero.iter().copied().fold(0.0, f64::max);
    let smallest_nonzero = nonzero.iter().copied().reduce(f64::min);
    let gap_ratio = match smallest_nonzero {
        Some(nz) if largest_zero > 0.0 => Some(nz / largest_zero),
        _ => None,
    };
    if let Some(ratio) = gap_ratio {
        if ratio <= MIN_GAP_RATIO {
            return Err(Error::NoSpectralGap {
                zero: largest_zero,
                nonzero: smallest_nonzero.unwrap_or(0.0),
                ratio,
                required: MIN_GAP_RATIO,
            });
        }
    }
    let rank = nonzero.len();
    Ok(IndexResult {
        index: plus_dim as i64 - minus_dim as i64,
        ker_dim: plus_dim - rank,
        coker_dim: minus_dim - rank,
        rank,
        sigma_max,
        largest_zero,
        smallest_nonzero,
        gap_ratio,
    })
}

pub(crate) fn c64(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Rank by Gaussian elimination with partial pivoting.
    fn rank_by_elimination(m: &ComplexMatrix<f64>, tol: f64) -> usize {
        let (rows, cols) = m.shape();
        let mut a: Vec<Vec<Complex<f64>>> = (0..rows).map(|i| (0..cols).map(|j| m[(i, j)]).collect()).collect();
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows).max_by(|&x, &y| a[x][c].norm().total_cmp(&a[y][c].norm())) else {
                break;
            };
            if a[p][c].norm() <= tol {
                continue;
            }
            a.swap(rank, p);
            let (head, tail) = a.split_at_mut(rank + 1);
            let pivot = &head[rank];
            for row in tail.iter_mut() {
                let f = row[c] / pivot[c];
                for (x, v) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *x -= f * v;
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn zero_map_two_to_three() {
        let r = index_of(&GradedOperator::zero(2, 3), DEFAULT_REL_TOL).unwrap();
        assert_eq!((r.index, r.ker_dim, r.coker_dim), (-1, 2, 3));
        assert_eq!(r.gap_ratio, None);
    }

    #[test]
    fn identity_three() {
        let r = index_of(
            &GradedOperator::from_matrix(ComplexMatrix::identity(3)),
            DEFAULT_REL_TOL,
        )
        .unwrap();
        assert_eq!((r.index, r.ker_dim, r.coker_dim), (0, 0, 0));
    }

    #[test]
    fn random_full_rank_five_to_four() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = ComplexMatrix::from_fn(4, 5, |_, _| {
            c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        assert_eq!(rank_by_elimination(&m, 1e-10), 4);
        let r = index_of(&GradedOperator::from_matrix(m), DEFAULT_REL_TOL).unwrap();
        assert_eq!((r.index, r.ker_dim, r.coker_dim), (1, 1, 0));
    }

    #[test]
    fn low_rank_matches_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..30 {
            let g = random_graded(&mut rng, 6);
            let r = index_of(&g, DEFAULT_REL_TOL).unwrap();
            assert_eq!(r.rank, rank_by_elimination(g.matrix(), 1e-9));
        }
    }

    #[test]
    fn missing_gap_is_an_error() {
        let m = ComplexMatrix::diagonal(&[c64(1.0, 0.0), c64(1e-9, 0.0), c64(1e-7, 0.0)]);
        let err = index_of(&GradedOperator::from_matrix(m), DEFAULT_REL_TOL).unwrap_err();
        assert!(matches!(err, Error::NoSpectralGap { .. }));
    }

    #[test]
    fn direct_sum_adds_indices_and_odd_form_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_graded(&mut rng, 5);
        let b = random_graded(&mut rng, 5);
        let (ia, ib) = (
            index_of(&a, DEFAULT_REL_TOL).unwrap(),
            index_of(&b, DEFAULT_REL_TOL).unwrap(),
        );
        let s = index_of(&a.direct_sum(&b), DEFAULT_REL_TOL).unwrap();
        assert_eq!(s.index, ia.index + ib.index);
        assert_eq!(s.ker_dim, ia.ker_dim + ib.ker_dim);
        // odd form is skew-adjoint and squares to -diag(D*D, DD*)
        let f = a.odd_form();
        assert!((&f.adjoint() + &f).max_abs() < 1e-15);
        let d = a.matrix();
        let expected = ComplexMatrix::block_diag(&[&(&d.adjoint() * d), &(d * &d.adjoint())]);
        assert!((&(&f * &f) + &expected).max_abs() < 1e-12);
    }

    #[test]
    fn shape_is_validated() {
        assert!(GradedOperator::new(2, 3, ComplexMatrix::zeros(2, 3)).is_err());
        assert!(GradedOperator::new(2, 3, ComplexMatrix::zeros(3, 2)).is_ok());
    }
}
