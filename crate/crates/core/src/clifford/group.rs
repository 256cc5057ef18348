//! `Λ^2 ≅ so(n)`, the exponential onto `Spin(n)` / `Spin^c(n)`, and the
//! vector representation `ρ(g) v = g v g^{-1}`.

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::One;

use super::element::{clifford_mul, CliffordElement};
use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Target bound on the truncated Taylor tail in [`exp_lambda2`].
pub const EXP_TAIL_BOUND: f64 = 1e-14;

/// Tolerance for numerical group membership in [`vector_rep`].
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// Relative weight outside `Λ^2` (or imaginary weight, for [`d_rho`]) that is
/// still treated as rounding.
pub const BIVECTOR_TOL: f64 = 1e-12;

/// Real antisymmetric `n x n` matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix<T = f64> {
    n: usize,
    entries: Vec<T>,
}

impl<T: Real> SkewMatrix<T> {
    /// Validates exact antisymmetry.
    pub fn new(n: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {n}x{n} matrix",
                entries.len()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                if entries[i * n + j] != -entries[j * n + i] {
                    return Err(invalid("entries", format!("not antisymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            entries: vec![T::zero(); n * n],
        }
    }

    /// Basis element `J_ij` (1-based): `e_i ↦ e_j`, `e_j ↦ -e_i`.
    pub fn basis(n: usize, i: usize, j: usize) -> Self {
        assert!(i != j && (1..=n).contains(&i) && (1..=n).contains(&j));
        let mut m = Self::zero(n);
        m.entries[(j - 1) * n + (i - 1)] = T::one();
        m.entries[(i - 1) * n + (j - 1)] = -T::one();
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry `(row, col)`, 0-based.
    pub fn get(&self, row: usize, col: usize) -> T {
        self.entries[row * self.n + col]
    }

    pub fn to_dmatrix(&self) -> DMatrix<T> {
        DMatrix::from_row_slice(self.n, self.n, &self.entries)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (*a - *b).abs().to_f64_lossy())
            .fold(0.0, f64::max)
    }
}

/// Returns the `Λ^2` part of `alpha`, rejecting it when the weight elsewhere
/// exceeds [`BIVECTOR_TOL`] relative to its norm.
fn require_bivector<T: Real>(alpha: &CliffordElement<T>) -> Result<CliffordElement<T>> {
    let stray = alpha.off_grade_weight(2);
    if stray > BIVECTOR_TOL * alpha.l1_norm().max(f64::MIN_POSITIVE) {
        return Err(Error::NotBivector { residual: stray });
    }
    Ok(alpha.grade_part(2))
}

/// Outcome of [`exp_lambda2_with_stats`].
#[derive(Debug, Clone)]
pub struct ExpStats {
    pub taylor_terms: usize,
    pub squarings: u32,
    pub tail_bound: f64,
}

/// Exponential of a (possibly complexified) element of `Λ^2`.
pub fn exp_lambda2<T: Real>(alpha: &CliffordElement<T>) -> Result<CliffordElement<T>> {
    exp_lambda2_with_stats(alpha).map(|(g, _)| g)
}

/// Exponential with the truncation data. The operator norm of the spin
/// image of `alpha` is bounded by its coefficient `l1` norm, since each
/// `E_i E_j` is unitary. The argument is scaled by `2^-s` until that bound is
/// at most `1/2`, the Taylor series is summed until the remainder bound
/// drops below [`EXP_TAIL_BOUND`], and the result is squared `s` times.
pub fn exp_lambda2_with_stats<T: Real>(alpha: &CliffordElement<T>) -> Result<(CliffordElement<T>, ExpStats)> {
    let alpha = require_bivector(alpha)?;
    let n = alpha.n();
    let norm = alpha.l1_norm();
    let mut squarings = 0u32;
    let mut scaled_norm = norm;
    while scaled_norm > 0.5 {
        scaled_norm /= 2.0;
        squarings += 1;
    }
    let factor = T::from_f64_lossy(0.5f64.powi(squarings as i32));
    let beta = alpha.scale(&Complex::new(factor, T::zero()));

    let mut sum = CliffordElement::one(n);
    let mut term = CliffordElement::one(n);
    let mut k = 0usize;
    // Remainder after the degree-k term: a^{k+1}/(k+1)! * 1/(1 - a/(k+2)).
    let mut coeff = 1.0f64;
    let tail_bound = loop {
        let next = coeff * scaled_norm / (k as f64 + 1.0);
        let bound = next / (1.0 - scaled_norm / (k as f64 + 2.0));
        if bound < EXP_TAIL_BOUND || scaled_norm == 0.0 {
            break if scaled_norm == 0.0 { 0.0 } else { bound };
        }
        k += 1;
        coeff = next;
        let inv_k = T::one() / T::from_f64_lossy(k as f64);
        term = clifford_mul(&term, &beta)?.scale(&Complex::new(inv_k, T::zero()));
        sum = &sum + &term;
    };
    for _ in 0..squarings {
        sum = clifford_mul(&sum, &sum)?;
    }
    Ok((
        sum,
        ExpStats {
            taylor_terms: k + 1,
            squarings,
            tail_bound,
        },
    ))
}

/// Inverse of an element `g` of `Spin^c(n)` as `g^t / (g g^t)`. For
/// `g = λ exp(α)` the product `g g^t = λ^2` is a scalar; a non-scalar product
/// means `g` is not in the group.
pub fn spin_inverse<T: Real>(g: &CliffordElement<T>) -> Result<CliffordElement<T>> {
    let gt = g.reverse();
    let s = clifford_mul(g, &gt)?;
    let s0 = s.scalar_part();
    let s0_abs = s0.norm().to_f64_lossy();
    if s0_abs == 0.0 || !s0_abs.is_finite() {
        return Err(Error::NotInGroup {
            reason: "g g^t has vanishing scalar part",
            residual: f64::INFINITY,
        });
    }
    let stray = s.off_grade_weight(0) / s0_abs;
    if stray > MEMBERSHIP_TOL {
        return Err(Error::NotInGroup {
            reason: "g g^t is not a scalar",
            residual: stray,
        });
    }
    Ok(gt.scale(&(Complex::<T>::one() / s0)))
}

/// `ρ(g) v = g v g^{-1}` for `g` in `Spin^c(n)` and a real vector `v`.
pub fn vector_rep<T: Real>(g: &CliffordElement<T>, v: &[T]) -> Result<Vec<T>> {
    if v.len() != g.n() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for C_{}",
            v.len(),
            g.n()
        )));
    }
    let inv = spin_inverse(g)?;
    let w = clifford_mul(&clifford_mul(g, &CliffordElement::vector(v))?, &inv)?;
    let scale = v.iter().map(|x| x.abs().to_f64_lossy()).fold(1.0, f64::max);
    let stray = w.off_grade_weight(1);
    let imag: f64 = (0..g.n()).map(|j| w.coefficient(1 << j).im.abs().to_f64_lossy()).sum();
    let residual = (stray + imag) / scale;
    if residual > MEMBERSHIP_TOL {
        return Err(Error::NotInGroup {
            reason: "conjugation does not preserve real vectors",
            residual,
        });
    }
    Ok((0..g.n()).map(|j| w.coefficient(1 << j).re).collect())
}

/// Matrix of `ρ(g)` in the standard basis; column `k` is `ρ(g) e_k`.
pub fn rotation_of<T: Real>(g: &CliffordElement<T>) -> Result<DMatrix<T>> {
    let n = g.n();
    let mut m = DMatrix::from_element(n, n, T::zero());
    for k in 0..n {
        let mut e = vec![T::zero(); n];
        e[k] = T::one();
        let col = vector_rep(g, &e)?;
        for (i, x) in col.into_iter().enumerate() {
            m[(i, k)] = x;
        }
    }
    Ok(m)
}

/// `dρ(α) v = α v - v α` for real `α` in `Λ^2`.
pub fn d_rho<T: Real>(alpha: &CliffordElement<T>) -> Result<SkewMatrix<T>> {
    let alpha = require_bivector(alpha)?;
    let imag: f64 = alpha.terms().map(|(_, c)| c.im.abs().to_f64_lossy()).sum();
    if imag > BIVECTOR_TOL * alpha.l1_norm() {
        return Err(Error::NotBivector { residual: imag });
    }
    let n = alpha.n();
    let mut entries = vec![T::zero(); n * n];
    for k in 0..n {
        let ek = CliffordElement::generator(n, k + 1);
        let image = alpha.commutator(&ek)?;
        for i in 0..n {
            entries[i * n + k] = image.coefficient(1 << i).re;
        }
    }
    // Both entries of a pair come from the same coefficient, so this only
    // removes signed zeros and rounding in accumulated coefficients.
    let half = T::from_f64_lossy(0.5);
    let skew = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            (entries[i * n + j] - entries[j * n + i]) * half
        })
        .collect();
    SkewMatrix::new(n, skew)
}

/// `J(T)` for `T = diag(λ_1, ..., λ_r)` under `(z_1, ..., z_r) ↦
/// (x_1, y_1, ..., x_r, y_r)`: each `λ_j = cos θ + i sin θ` acts as the
/// rotation block `[[cos θ, -sin θ], [sin θ, cos θ]]`.
pub fn complex_rotation<T: Real>(lambdas: &[Complex<T>]) -> DMatrix<T> {
    let n = 2 * lambdas.len();
    let mut m = DMatrix::from_element(n, n, T::zero());
    for (j, l) in lambdas.iter().enumerate() {
        let (a, b) = (2 * j, 2 * j + 1);
        m[(a, a)] = l.re;
        m[(a, b)] = -l.im;
        m[(b, a)] = l.im;
        m[(b, b)] = l.re;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type E = CliffordElement<f64>;

    fn re(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    fn rotation_12(n: usize, theta: f64) -> DMatrix<f64> {
        (SkewMatrix::<f64>::basis(n, 1, 2).to_dmatrix() * theta).exp()
    }

    #[test]
    fn exp_of_zero_is_one() {
        let z = E::zero(3);
        assert_eq!(exp_lambda2(&z).unwrap(), E::one(3));
    }

    #[test]
    fn exp_closed_form() {
        for k in 0..=24 {
            let t = -3.0 + 0.25 * k as f64;
            let g = exp_lambda2(&E::bivector(3, &[(1, 2, re(t))])).unwrap();
            let expected = &E::one(3).scale(&re(t.cos())) + &E::monomial(3, &[1, 2], re(t.sin()));
            assert!(g.max_abs_diff(&expected) < 1e-13, "t={t}");
        }
    }

    #[test]
    fn exp_pi_is_minus_one() {
        let g = exp_lambda2(&E::bivector(2, &[(1, 2, re(std::f64::consts::PI))])).unwrap();
        assert!(g.max_abs_diff(&-&E::one(2)) < 1e-14);
    }

    #[test]
    fn exp_rejects_non_bivector() {
        let a = &E::bivector(3, &[(1, 2, re(1.0))]) + &E::generator(3, 3);
        assert!(matches!(exp_lambda2(&a), Err(Error::NotBivector { .. })));
        assert!(matches!(d_rho(&a), Err(Error::NotBivector { .. })));
    }

    #[test]
    fn d_rho_of_half_e1e2_is_j12() {
        let a = E::bivector(4, &[(1, 2, re(0.5))]);
        assert_eq!(d_rho(&a).unwrap(), SkewMatrix::basis(4, 1, 2));
        assert_eq!(d_rho(&E::zero(4)).unwrap(), SkewMatrix::zero(4));
    }

    #[test]
    fn d_rho_basis_all_pairs() {
        let n = 5;
        for i in 1..=n {
            for j in (i + 1)..=n {
                let a = E::bivector(n, &[(i, j, re(0.5))]);
                assert_eq!(d_rho(&a).unwrap(), SkewMatrix::basis(n, i, j));
            }
        }
    }

    #[test]
    fn d_rho_rejects_complex_coefficients() {
        let a = E::bivector(3, &[(1, 2, Complex::new(0.0, 1.0))]);
        assert!(d_rho(&a).is_err());
    }

    #[test]
    fn rho_of_identity_is_identity() {
        let v = [0.3, -1.2, 2.0];
        let w = vector_rep(&E::one(3), &v).unwrap();
        assert_eq!(w, v.to_vec());
    }

    #[test]
    fn half_angle_lift_rotates_by_theta() {
        for k in 0..16 {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / 16.0;
            let g = exp_lambda2(&E::bivector(3, &[(1, 2, re(theta / 2.0))])).unwrap();
            let rot = rotation_of(&g).unwrap();
            assert!((rot - rotation_12(3, theta)).amax() < 1e-10);
        }
    }

    #[test]
    fn double_cover_kernel() {
        let eps = exp_lambda2(&E::bivector(2, &[(1, 2, re(std::f64::consts::PI))])).unwrap();
        let rot = rotation_of(&eps).unwrap();
        assert!((rot - DMatrix::identity(2, 2)).amax() < 1e-12);
        assert!(eps.max_abs_diff(&E::one(2)) > 1.9);
    }

    #[test]
    fn non_group_element_is_rejected() {
        let g = &E::one(3) + &E::generator(3, 1).scale(&re(0.5));
        assert!(matches!(
            vector_rep(&g, &[1.0, 0.0, 0.0]),
            Err(Error::NotInGroup { .. })
        ));
    }

    fn random_bivector(rng: &mut ChaCha8Rng, n: usize, budget: f64) -> E {
        let mut entries = Vec::new();
        for i in 1..=n {
            for j in (i + 1)..=n {
                entries.push((i, j, re(rng.random_range(-1.0..1.0))));
            }
        }
        let a = E::bivector(n, &entries);
        a.scale(&re(budget * rng.random_range(0.1..1.0) / a.l1_norm()))
    }

    #[test]
    fn d_rho_is_a_lie_algebra_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=5 {
            for _ in 0..10 {
                let a = random_bivector(&mut rng, n, 2.0);
                let b = random_bivector(&mut rng, n, 2.0);
                let lhs = d_rho(&a.commutator(&b).unwrap()).unwrap().to_dmatrix();
                let (da, db) = (d_rho(&a).unwrap().to_dmatrix(), d_rho(&b).unwrap().to_dmatrix());
                let rhs = &da * &db - &db * &da;
                assert!((lhs - rhs).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn rho_of_exp_is_exp_of_d_rho() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 2..=5 {
            for _ in 0..10 {
                let a = random_bivector(&mut rng, n, 2.0);
                let lhs = rotation_of(&exp_lambda2(&a).unwrap()).unwrap();
                let rhs = d_rho(&a).unwrap().to_dmatrix().exp();
                assert!((lhs - rhs).amax() < 1e-10);
            }
        }
    }

    #[test]
    fn rho_is_a_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let g = exp_lambda2(&random_bivector(&mut rng, 4, 2.0)).unwrap();
            let h = exp_lambda2(&random_bivector(&mut rng, 4, 2.0)).unwrap();
            let gh = clifford_mul(&g, &h).unwrap();
            let lhs = rotation_of(&gh).unwrap();
            let rhs = rotation_of(&g).unwrap() * rotation_of(&h).unwrap();
            assert!((lhs - &rhs).amax() < 1e-10);
            assert!((rhs.transpose() * &rhs - DMatrix::identity(4, 4)).amax() < 1e-10);
        }
    }

    #[test]
    fn complex_rotation_matches_lift_generators() {
        let l = [Complex::from_polar(1.0, 0.7), Complex::from_polar(1.0, -1.1)];
        let j = complex_rotation(&l);
        let expected = (SkewMatrix::<f64>::basis(4, 1, 2).to_dmatrix() * 0.7).exp()
            * (SkewMatrix::<f64>::basis(4, 3, 4).to_dmatrix() * -1.1).exp();
        assert!((j - expected).amax() < 1e-12);
    }
}
