//! Gamma matrices: `2^r x 2^r` skew-adjoint generators of the complex
//! Clifford algebra, built by the doubling induction starting from
//! `E_1 = [-i]`.
//!
//! Every entry lies in `{0, ±1, ±i}`, so all identities are checked with
//! exact equality.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{invalid, Result};
use crate::matrix::ComplexMatrix;
use crate::report::{Status, ValidationReport};
use crate::scalar::Scalar;

/// Default cap on the dimension accepted by [`build_gamma`]; `2^8 = 256`
/// dense matrices at the cap.
pub const MAX_GAMMA_DIM: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet<T = f64> {
    n: usize,
    generators: Vec<ComplexMatrix<T>>,
    grading: Option<ComplexMatrix<T>>,
}

/// `i^k` as an exact complex scalar.
pub fn i_pow<T: Scalar>(k: usize) -> Complex<T> {
    match k % 4 {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    }
}

impl<T: Scalar> GammaSet<T> {
    /// Assembles a gamma set from raw parts without validation. Use
    /// [`verify_gamma`] to check the identities.
    pub fn from_parts(generators: Vec<ComplexMatrix<T>>, grading: Option<ComplexMatrix<T>>) -> Self {
        Self {
            n: generators.len(),
            generators,
            grading,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Half dimension, `floor(n / 2)`.
    pub fn r(&self) -> usize {
        self.n / 2
    }

    /// Spinor dimension `2^r`.
    pub fn spinor_dim(&self) -> usize {
        1 << self.r()
    }

    pub fn generators(&self) -> &[ComplexMatrix<T>] {
        &self.generators
    }

    /// Generator `E_j`, 1-based.
    pub fn e(&self, j: usize) -> &ComplexMatrix<T> {
        &self.generators[j - 1]
    }

    /// Grading operator `i^r E_1 ... E_n`; present for even `n`.
    pub fn grading(&self) -> Option<&ComplexMatrix<T>> {
        self.grading.as_ref()
    }

    /// Ordered product `E_1 E_2 ... E_n`.
    pub fn full_product(&self) -> ComplexMatrix<T> {
        self.generators
            .iter()
            .fold(ComplexMatrix::identity(self.spinor_dim()), |acc, e| &acc * e)
    }

    /// Clifford multiplication by a vector, `c(x) = Σ x_j E_j`.
    pub fn clifford_vector(&self, x: &[T]) -> ComplexMatrix<T> {
        assert_eq!(x.len(), self.n, "vector length must equal n");
        let dim = self.spinor_dim();
        let mut out = ComplexMatrix::zeros(dim, dim);
        for (xj, e) in x.iter().zip(&self.generators) {
            if xj.is_zero() {
                continue;
            }
            out = &out + &e.scale(&Complex::new(xj.clone(), T::zero()));
        }
        out
    }
}

/// Builds `E_1, ..., E_n` by the doubling induction, with the default
/// dimension cap.
pub fn build_gamma<T: Scalar>(n: usize) -> Result<GammaSet<T>> {
    build_gamma_capped(n, MAX_GAMMA_DIM)
}

pub fn build_gamma_capped<T: Scalar>(n: usize, cap: usize) -> Result<GammaSet<T>> {
    if n == 0 {
        return Err(invalid("n", "dimension must be at least 1"));
    }
    if n > cap {
        return Err(invalid("n", format!("dimension {n} exceeds the cap {cap}")));
    }
    let minus_i = Complex::new(T::zero(), -T::one());
    let mut gens = vec![ComplexMatrix::scalar_identity(1, minus_i)];
    for m in 1..n {
        let dim = gens[0].rows();
        if m % 2 == 1 {
            // odd -> even: double the spinor space
            let zero = ComplexMatrix::zeros(dim, dim);
            let id = ComplexMatrix::identity(dim);
            let mut next: Vec<_> = gens
                .iter()
                .map(|e| ComplexMatrix::from_blocks(&[vec![&zero, e], vec![e, &zero]]))
                .collect();
            let minus_id = -&id;
            next.push(ComplexMatrix::from_blocks(&[vec![&zero, &minus_id], vec![&id, &zero]]));
            gens = next;
        } else {
            // even -> odd: append diag(-iI, iI)
            let half = dim / 2;
            let mut diag = Vec::with_capacity(dim);
            diag.extend((0..half).map(|_| Complex::new(T::zero(), -T::one())));
            diag.extend((0..half).map(|_| Complex::new(T::zero(), T::one())));
            gens.push(ComplexMatrix::diagonal(&diag));
        }
    }
    let mut set = GammaSet::from_parts(gens, None);
    if n.is_multiple_of(2) {
        let omega = set.full_product().scale(&i_pow(set.r()));
        set.grading = Some(omega);
    }
    Ok(set)
}

/// `diag(I, -I)` of size `dim`.
pub fn standard_grading<T: Scalar>(dim: usize) -> ComplexMatrix<T> {
    let half = dim / 2;
    ComplexMatrix::from_fn(dim, dim, |i, j| {
        if i != j {
            Complex::zero()
        } else if i < half {
            Complex::one()
        } else {
            -Complex::<T>::one()
        }
    })
}

fn is_unit_or_zero<T: Scalar>(z: &Complex<T>) -> bool {
    let unit = |x: &T| x.is_zero() || x.is_one() || (-x.clone()).is_one();
    unit(&z.re) && unit(&z.im) && (z.re.is_zero() || z.im.is_zero())
}

/// Checks every algebraic identity of a gamma set with zero tolerance.
pub fn verify_gamma<T: Scalar>(g: &GammaSet<T>) -> ValidationReport {
    let n = g.n();
    let r = g.r();
    let dim = g.spinor_dim();
    let id = ComplexMatrix::<T>::identity(dim);
    let mut rep = ValidationReport::new("gamma");
    let pfx = format!("gamma.n{n}");
    rep.set_config(format!("{pfx}.tolerance"), 0.0);

    let exact = |rep: &mut ValidationReport, key: &str, desc: &str, residual: f64| {
        rep.push(
            format!("{pfx}.{key}"),
            desc,
            Status::from_bool(residual == 0.0),
            Some(residual),
            None,
        );
    };

    let shapes_ok = g.generators().iter().all(|e| e.shape() == (dim, dim));
    rep.check_bool(
        format!("{pfx}.shape"),
        format!("{n} generators of size {dim}x{dim}"),
        shapes_ok && g.generators().len() == n,
    );
    if !shapes_ok {
        return rep;
    }

    let skew = g
        .generators()
        .iter()
        .map(|e| (&e.adjoint() + e).max_abs())
        .fold(0.0, f64::max);
    exact(&mut rep, "skew_adjoint", "E_j* = -E_j", skew);

    let squares = g
        .generators()
        .iter()
        .map(|e| (&(e * e) + &id).max_abs())
        .fold(0.0, f64::max);
    exact(&mut rep, "square", "E_j^2 = -I", squares);

    let mut anti: f64 = 0.0;
    for j in 0..n {
        for k in (j + 1)..n {
            let (a, b) = (&g.generators()[j], &g.generators()[k]);
            anti = anti.max((&(a * b) + &(b * a)).max_abs());
        }
    }
    exact(&mut rep, "anticommute", "E_j E_k + E_k E_j = 0 for j != k", anti);

    let entries_ok = g.generators().iter().all(|e| e.entries().iter().all(is_unit_or_zero));
    rep.check_bool(format!("{pfx}.entries_exact"), "entries in {0, ±1, ±i}", entries_ok);

    let product = g.full_product();
    if n.is_multiple_of(2) {
        let omega = product.scale(&i_pow(r));
        let expected = standard_grading::<T>(dim);
        exact(
            &mut rep,
            "grading_product",
            "i^r E_1...E_n = diag(I, -I)",
            omega.max_abs_diff(&expected),
        );
        let stored = g.grading().map(|w| w.max_abs_diff(&expected)).unwrap_or(f64::INFINITY);
        exact(&mut rep, "grading_stored", "stored grading equals diag(I, -I)", stored);
        let half = dim / 2;
        let diag_blocks = g
            .generators()
            .iter()
            .map(|e| {
                e.submatrix(0, 0, half, half)
                    .max_abs()
                    .max(e.submatrix(half, half, half, half).max_abs())
            })
            .fold(0.0, f64::max);
        exact(
            &mut rep,
            "block_off_diagonal",
            "each E_j is off-diagonal with respect to the grading",
            diag_blocks,
        );
    } else {
        let lhs = product.scale(&i_pow(r + 1));
        exact(&mut rep, "odd_product", "i^(r+1) E_1...E_n = I", lhs.max_abs_diff(&id));
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: i64, im: i64) -> Complex<i64> {
        Complex::new(re, im)
    }

    fn m(rows: usize, entries: &[(i64, i64)]) -> ComplexMatrix<i64> {
        ComplexMatrix::from_row_major(rows, rows, entries.iter().map(|&(a, b)| c(a, b)).collect())
    }

    #[test]
    fn base_case() {
        let g = build_gamma::<i64>(1).unwrap();
        assert_eq!(g.e(1), &m(1, &[(0, -1)]));
    }

    #[test]
    fn n2_and_n3_match_the_displayed_matrices() {
        let g2 = build_gamma::<i64>(2).unwrap();
        assert_eq!(g2.e(1), &m(2, &[(0, 0), (0, -1), (0, -1), (0, 0)]));
        assert_eq!(g2.e(2), &m(2, &[(0, 0), (-1, 0), (1, 0), (0, 0)]));
        let g3 = build_gamma::<i64>(3).unwrap();
        assert_eq!(g3.e(1), g2.e(1));
        assert_eq!(g3.e(2), g2.e(2));
        assert_eq!(g3.e(3), &m(2, &[(0, -1), (0, 0), (0, 0), (0, 1)]));
    }

    #[test]
    fn rejects_zero_and_oversized() {
        assert!(build_gamma::<f64>(0).is_err());
        assert!(build_gamma::<f64>(MAX_GAMMA_DIM + 1).is_err());
        assert!(build_gamma_capped::<f64>(5, 4).is_err());
    }

    #[test]
    fn identities_hold_exactly() {
        for n in 1..=8 {
            let rep = verify_gamma(&build_gamma::<i64>(n).unwrap());
            assert!(rep.passed(), "{}", rep.render_text());
            assert_eq!(rep.max_residual(), Some(0.0));
        }
    }

    #[test]
    fn corrupted_entry_breaks_anticommutation() {
        let g = build_gamma::<f64>(4).unwrap();
        let mut gens = g.generators().to_vec();
        let e2 = &mut gens[1];
        let (i, j) = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .find(|&(i, j)| e2[(i, j)] != Complex::new(0.0, 0.0))
            .unwrap();
        e2[(i, j)] = -e2[(i, j)];
        let bad = GammaSet::from_parts(gens, g.grading().cloned());
        let rep = verify_gamma(&bad);
        assert_eq!(rep.get("gamma.n4.anticommute").unwrap().status, Status::Fail);
        assert!(!rep.passed());
    }

    #[test]
    fn clifford_vector_squares_to_minus_norm() {
        let g = build_gamma::<i64>(4).unwrap();
        let x = [1, -2, 3, 1];
        let cx = g.clifford_vector(&x);
        let norm2: i64 = x.iter().map(|v| v * v).sum();
        assert_eq!(&cx * &cx, ComplexMatrix::scalar_identity(4, c(-norm2, 0)));
    }
}
