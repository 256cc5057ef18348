//! The spin representation `c: C_n ⊗ C → M_{2^r}(C)`, `c(e_j) = E_j`, and
//! the canonical lift of the diagonal torus of `U(r)` into `Spin^c(2r)`.

use num_complex::Complex;
use num_traits::One;
use rand::Rng;

use crate::clifford::{
    build_gamma, clifford_mul, complex_rotation, exp_lambda2, i_pow, monomial_indices, rotation_of, standard_grading,
    CliffordElement, GammaSet,
};
use crate::error::{invalid, Error, Result};
use crate::matrix::ComplexMatrix;
use crate::report::ValidationReport;
use crate::scalar::Scalar;

/// Unit-modulus tolerance for [`DiagonalUnitary`].
pub const UNIT_TOL: f64 = 1e-12;

/// Spinor space `Δ = Δ^+ ⊕ Δ^-` of `C_{2r}`, graded by `ω = i^r E_1 ... E_{2r}`.
///
/// `ω` is diagonal for the generators from [`build_gamma`], so `Δ^+` is
/// spanned by the first `2^(r-1)` coordinate vectors and `Δ^-` by the rest.
#[derive(Debug, Clone)]
pub struct SpinorSpace {
    r: usize,
    gammas: GammaSet<f64>,
    grading: ComplexMatrix<f64>,
}

impl SpinorSpace {
    pub fn new(r: usize) -> Result<Self> {
        if r == 0 {
            return Err(invalid("r", "half-dimension must be at least 1"));
        }
        let gammas = build_gamma::<f64>(2 * r)?;
        let grading = gammas.grading().expect("even dimension").clone();
        Ok(Self { r, gammas, grading })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn dim(&self) -> usize {
        1 << self.r
    }

    pub fn plus_dim(&self) -> usize {
        self.dim() / 2
    }

    pub fn minus_dim(&self) -> usize {
        self.dim() / 2
    }

    pub fn gammas(&self) -> &GammaSet<f64> {
        &self.gammas
    }

    pub fn grading(&self) -> &ComplexMatrix<f64> {
        &self.grading
    }

    /// Dimensions of the `±1` eigenspaces of `ω`, read off its diagonal.
    pub fn eigenspace_dims(&self) -> (usize, usize) {
        let d = self.dim();
        let plus = (0..d).filter(|&i| self.grading[(i, i)].re > 0.5).count();
        let minus = (0..d).filter(|&i| self.grading[(i, i)].re < -0.5).count();
        (plus, minus)
    }
}

/// `diag(λ_1, ..., λ_r)` with `|λ_j| = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalUnitary {
    lambdas: Vec<Complex<f64>>,
}

impl DiagonalUnitary {
    pub fn new(lambdas: Vec<Complex<f64>>) -> Result<Self> {
        for (j, l) in lambdas.iter().enumerate() {
            let dev = (l.norm() - 1.0).abs();
            if dev > UNIT_TOL {
                return Err(invalid(
                    "lambdas",
                    format!("entry {j} has modulus deviating from 1 by {dev:e}"),
                ));
            }
        }
        Ok(Self { lambdas })
    }

    pub fn from_angles(thetas: &[f64]) -> Self {
        Self {
            lambdas: thetas.iter().map(|&t| Complex::from_polar(1.0, t)).collect(),
        }
    }

    pub fn identity(r: usize) -> Self {
        Self::from_angles(&vec![0.0; r])
    }

    pub fn minus_identity(r: usize) -> Self {
        Self {
            lambdas: vec![Complex::new(-1.0, 0.0); r],
        }
    }

    pub fn random<R: Rng + ?Sized>(r: usize, rng: &mut R) -> Self {
        let thetas: Vec<f64> = (0..r)
            .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect();
        Self::from_angles(&thetas)
    }

    pub fn r(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[Complex<f64>] {
        &self.lambdas
    }

    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.r(), other.r());
        Self {
            lambdas: self.lambdas.iter().zip(&other.lambdas).map(|(a, b)| a * b).collect(),
        }
    }

    pub fn det(&self) -> Complex<f64> {
        self.lambdas.iter().product()
    }
}

/// Image of a Clifford element under `c(e_j) = E_j`.
pub fn spin_matrix<T: Scalar>(a: &CliffordElement<T>, g: &GammaSet<T>) -> Result<ComplexMatrix<T>> {
    if a.n() != g.n() {
        return Err(Error::DimensionMismatch(format!(
            "element of C_{} with gamma set for n = {}",
            a.n(),
            g.n()
        )));
    }
    let dim = g.spinor_dim();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (m, coef) in a.terms() {
        let mono = monomial_indices(m)
            .into_iter()
            .fold(ComplexMatrix::identity(dim), |acc, j| &acc * g.e(j));
        out = &out + &mono.scale(coef);
    }
    Ok(out)
}

/// `Π_j ( (1 + λ_j)/2 + (1 - λ_j)/2 · i e_{2j-1} e_{2j} )` in `C_{2r} ⊗ C`.
pub fn unitary_lift(t: &DiagonalUnitary) -> CliffordElement<f64> {
    let n = 2 * t.r();
    let half = Complex::new(0.5, 0.0);
    let i = Complex::new(0.0, 1.0);
    t.lambdas()
        .iter()
        .enumerate()
        .fold(CliffordElement::one(n), |acc, (j, l)| {
            let factor = &CliffordElement::scalar(n, half * (Complex::<f64>::one() + l))
                + &CliffordElement::monomial(n, &[2 * j + 1, 2 * j + 2], half * (Complex::<f64>::one() - l) * i);
            clifford_mul(&acc, &factor).expect("same ambient dimension")
        })
}

/// The same lift through the exponential: `Π_j e^{iθ_j/2} exp(θ_j/2 · e_{2j-1} e_{2j})`.
pub fn unitary_lift_via_exp(t: &DiagonalUnitary) -> Result<CliffordElement<f64>> {
    let n = 2 * t.r();
    let mut acc = CliffordElement::one(n);
    for (j, l) in t.lambdas().iter().enumerate() {
        let theta = l.arg();
        let rot = exp_lambda2(&CliffordElement::bivector(
            n,
            &[(2 * j + 1, 2 * j + 2, Complex::new(theta / 2.0, 0.0))],
        ))?;
        let phase = Complex::from_polar(1.0, theta / 2.0);
        acc = clifford_mul(&acc, &rot.scale(&phase))?;
    }
    Ok(acc)
}

/// Trace of the spin image of the lift of `T`.
pub fn character_spinor(t: &DiagonalUnitary) -> Result<Complex<f64>> {
    let space = SpinorSpace::new(t.r())?;
    Ok(spin_matrix(&unitary_lift(t), space.gammas())?.trace())
}

/// Supertrace `tr(ω · c(l̃(T)))` of the lift of `T`.
pub fn supercharacter_spinor(t: &DiagonalUnitary) -> Result<Complex<f64>> {
    let space = SpinorSpace::new(t.r())?;
    let image = spin_matrix(&unitary_lift(t), space.gammas())?;
    Ok((space.grading() * &image).trace())
}

/// Character of `Λ^• C^r` at `diag(λ)`: the sum over subsets `S` of
/// `Π_{j ∈ S} λ_j`, enumerated directly.
pub fn exterior_character(lambdas: &[Complex<f64>]) -> Complex<f64> {
    subset_sum(lambdas, false)
}

/// Super-character of `Λ^even - Λ^odd`: subsets weighted by `(-1)^|S|`.
pub fn exterior_supercharacter(lambdas: &[Complex<f64>]) -> Complex<f64> {
    subset_sum(lambdas, true)
}

fn subset_sum(lambdas: &[Complex<f64>], alternate: bool) -> Complex<f64> {
    let r = lambdas.len();
    (0u32..(1 << r))
        .map(|s| {
            let prod: Complex<f64> = (0..r).filter(|j| s >> j & 1 == 1).map(|j| lambdas[j]).product();
            if alternate && s.count_ones() % 2 == 1 {
                -prod
            } else {
                prod
            }
        })
        .sum()
}

/// `Π_j i e_{2j-1} e_{2j}`, the lift of `-I`.
pub fn volume_lift(r: usize) -> CliffordElement<f64> {
    let indices: Vec<usize> = (1..=2 * r).collect();
    CliffordElement::monomial(2 * r, &indices, i_pow(r))
}

/// Checks that the lift realizes the grading: the image of `Π i e_{2j-1}e_{2j}`
/// is `ω`, lifted torus elements commute with `ω`, and the supertrace is
/// `Π (1 - λ_j)`.
pub fn grading_check<R: Rng + ?Sized>(r: usize, samples: usize, rng: &mut R) -> ValidationReport {
    const TOL: f64 = 1e-10;
    let mut rep = ValidationReport::new("grading");
    let pfx = format!("spinrep.grading.r{r}");
    rep.set_config(format!("{pfx}.tolerance"), TOL);
    rep.set_config(format!("{pfx}.samples"), samples as u64);
    let space = match SpinorSpace::new(r) {
        Ok(s) => s,
        Err(e) => {
            rep.error(format!("{pfx}.space"), "spinor space", &e);
            return rep;
        }
    };
    let omega = space.grading();
    let dim = space.dim();
    rep.check_residual(
        format!("{pfx}.omega_is_standard"),
        "ω = diag(I, -I)",
        omega.max_abs_diff(&standard_grading(dim)),
        0.0,
    );
    rep.check_residual(
        format!("{pfx}.omega_involution"),
        "ω^2 = I and ω* = ω",
        (omega * omega)
            .max_abs_diff(&ComplexMatrix::identity(dim))
            .max(omega.hermiticity_residual()),
        0.0,
    );
    let (p, m) = space.eigenspace_dims();
    rep.check_bool(
        format!("{pfx}.half_spin_dims"),
        "Δ^± each have dimension 2^(r-1)",
        p == space.plus_dim() && m == space.minus_dim() && p == 1 << (r - 1),
    );

    let vol = spin_matrix(&volume_lift(r), space.gammas()).expect("dimensions agree");
    rep.check_residual(
        format!("{pfx}.volume_lift_is_omega"),
        "c(Π i e_{2j-1} e_{2j}) = ω",
        vol.max_abs_diff(omega),
        TOL,
    );
    let lift_minus =
        spin_matrix(&unitary_lift(&DiagonalUnitary::minus_identity(r)), space.gammas()).expect("dimensions agree");
    rep.check_residual(
        format!("{pfx}.lift_of_minus_identity"),
        "c(l̃(-I)) = ω",
        lift_minus.max_abs_diff(omega),
        TOL,
    );

    let (mut commute, mut superchar, mut blocks) = (0.0f64, 0.0f64, 0.0f64);
    let half = dim / 2;
    for _ in 0..samples {
        let t = DiagonalUnitary::random(r, rng);
        let image = spin_matrix(&unitary_lift(&t), space.gammas()).expect("dimensions agree");
        commute = commute.max((&(omega * &image) - &(&image * omega)).max_abs());
        blocks = blocks.max(
            image
                .submatrix(0, half, half, half)
                .max_abs()
                .max(image.submatrix(half, 0, half, half).max_abs()),
        );
        let st = (omega * &image).trace();
        let expected: Complex<f64> = t.lambdas().iter().map(|l| Complex::<f64>::one() - l).product();
        superchar = superchar
            .max((st - expected).norm())
            .max((st - exterior_supercharacter(t.lambdas())).norm());
    }
    rep.check_residual(
        format!("{pfx}.lift_commutes_with_omega"),
        "[ω, c(l̃(T))] = 0 for random T",
        commute,
        TOL,
    );
    rep.check_residual(
        format!("{pfx}.lift_preserves_half_spinors"),
        "c(l̃(T)) preserves Δ^+ and Δ^-",
        blocks,
        TOL,
    );
    rep.check_residual(
        format!("{pfx}.supercharacter"),
        "tr(ω c(l̃(T))) = Π (1 - λ_j) = Λ^even - Λ^odd character",
        superchar,
        TOL,
    );
    rep
}

/// Checks the closed form of the lift against the exponential route, the
/// character identity, multiplicativity, the covering `ρ(l̃(T)) = j(T)`,
/// and `l̃(T) l̃(T)^t = det T`.
pub fn verify_lift<R: Rng + ?Sized>(r: usize, samples: usize, rng: &mut R) -> ValidationReport {
    const TOL: f64 = 1e-10;
    let mut rep = ValidationReport::new("lift");
    let pfx = format!("spinrep.lift.r{r}");
    rep.set_config(format!("{pfx}.tolerance"), TOL);
    rep.set_config(format!("{pfx}.samples"), samples as u64);
    let space = match SpinorSpace::new(r) {
        Ok(s) => s,
        Err(e) => {
            rep.error(format!("{pfx}.space"), "spinor space", &e);
            return rep;
        }
    };
    let id_lift = unitary_lift(&DiagonalUnitary::identity(r));
    rep.check_residual(
        format!("{pfx}.identity"),
        "l̃(I) = 1",
        id_lift.max_abs_diff(&CliffordElement::one(2 * r)),
        0.0,
    );
    let (mut closed, mut chi, mut hom, mut cover, mut det) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut errors = Vec::new();
    for _ in 0..samples {
        let t1 = DiagonalUnitary::random(r, rng);
        let t2 = DiagonalUnitary::random(r, rng);
        let l1 = unitary_lift(&t1);
        match unitary_lift_via_exp(&t1) {
            Ok(e) => closed = closed.max(l1.max_abs_diff(&e)),
            Err(e) => errors.push(e),
        }
        let c1 = spin_matrix(&l1, space.gammas()).expect("dimensions agree");
        let c2 = spin_matrix(&unitary_lift(&t2), space.gammas()).expect("dimensions agree");
        let c12 = spin_matrix(&unitary_lift(&t1.compose(&t2)), space.gammas()).expect("dimensions agree");
        hom = hom.max(c12.max_abs_diff(&(&c1 * &c2)));
        let expected: Complex<f64> = t1.lambdas().iter().map(|l| Complex::<f64>::one() + l).product();
        chi = chi
            .max((c1.trace() - expected).norm())
            .max((c1.trace() - exterior_character(t1.lambdas())).norm());
        match rotation_of(&l1) {
            Ok(rot) => cover = cover.max((rot - complex_rotation(t1.lambdas())).amax()),
            Err(e) => errors.push(e),
        }
        let square = clifford_mul(&l1, &l1.reverse()).expect("same ambient dimension");
        det = det.max(square.max_abs_diff(&CliffordElement::scalar(2 * r, t1.det())));
    }
    rep.check_residual(
        format!("{pfx}.closed_form"),
        "product formula equals Π e^{iθ/2} exp(θ/2 e_{2j-1} e_{2j})",
        closed,
        TOL,
    );
    rep.check_residual(
        format!("{pfx}.character"),
        "tr c(l̃(T)) = Π (1 + λ_j) = character of Λ^• C^r",
        chi,
        TOL,
    );
    rep.check_residual(
        format!("{pfx}.homomorphism"),
        "c(l̃(T1 T2)) = c(l̃(T1)) c(l̃(T2))",
        hom,
        TOL,
    );
    rep.check_residual(
        format!("{pfx}.covering"),
        "ρ(l̃(T)) = j(T) under (z_j) ↦ (x_j, y_j)",
        cover,
        TOL,
    );
    rep.check_residual(
        format!("{pfx}.determinant"),
        "l̃(T) l̃(T)^t = det T (square of the U(1) part)",
        det,
        TOL,
    );
    if let Some(e) = errors.first() {
        rep.error(format!("{pfx}.evaluation"), "group-level evaluation", e);
    }
    rep
}

/// Dimension check used by reports: `Δ^± = 2^(r-1)`.
pub fn half_spin_dim(r: usize) -> usize {
    if r == 0 {
        1
    } else {
        1 << (r - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn spin_matrix_on_generators() {
        let g = build_gamma::<i64>(4).unwrap();
        let e1 = CliffordElement::<i64>::generator(4, 1);
        assert_eq!(&spin_matrix(&e1, &g).unwrap(), g.e(1));
        assert_eq!(
            spin_matrix(&CliffordElement::<i64>::one(4), &g).unwrap(),
            ComplexMatrix::identity(4)
        );
        let e12 = CliffordElement::<i64>::monomial(4, &[1, 2], Complex::one());
        assert_eq!(spin_matrix(&e12, &g).unwrap(), g.e(1) * g.e(2));
    }

    #[test]
    fn spin_matrix_is_multiplicative() {
        let g = build_gamma::<i64>(4).unwrap();
        for a in 0..16u32 {
            for b in 0..16u32 {
                let x = CliffordElement::<i64>::from_terms(4, [(a, Complex::new(1, 2))]);
                let y = CliffordElement::<i64>::from_terms(4, [(b, Complex::new(-3, 1))]);
                let lhs = spin_matrix(&(&x * &y), &g).unwrap();
                let rhs = &spin_matrix(&x, &g).unwrap() * &spin_matrix(&y, &g).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn spin_matrix_rejects_mismatch() {
        let g = build_gamma::<f64>(4).unwrap();
        assert!(spin_matrix(&CliffordElement::<f64>::one(3), &g).is_err());
    }

    #[test]
    fn lift_of_identity_and_minus_identity() {
        assert_eq!(unitary_lift(&DiagonalUnitary::identity(3)), CliffordElement::one(6));
        let l = unitary_lift(&DiagonalUnitary::minus_identity(2));
        assert!(l.max_abs_diff(&volume_lift(2)) < 1e-15);
        let space = SpinorSpace::new(2).unwrap();
        let img = spin_matrix(&l, space.gammas()).unwrap();
        assert!(img.max_abs_diff(space.grading()) < 1e-15);
    }

    #[test]
    fn characters_at_special_points() {
        assert!((character_spinor(&DiagonalUnitary::identity(3)).unwrap() - 8.0).norm() < 1e-14);
        assert!(character_spinor(&DiagonalUnitary::minus_identity(3)).unwrap().norm() < 1e-14);
        assert!(supercharacter_spinor(&DiagonalUnitary::identity(2)).unwrap().norm() < 1e-14);
    }

    #[test]
    fn character_matches_elementary_symmetric_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = DiagonalUnitary::random(3, &mut rng);
        let l = t.lambdas();
        let e1 = l[0] + l[1] + l[2];
        let e2 = l[0] * l[1] + l[0] * l[2] + l[1] * l[2];
        let e3 = l[0] * l[1] * l[2];
        let expected = Complex::<f64>::one() + e1 + e2 + e3;
        assert!((character_spinor(&t).unwrap() - expected).norm() < 1e-10);
    }

    #[test]
    fn supercharacter_two_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = DiagonalUnitary::random(2, &mut rng);
        let l = t.lambdas();
        let expected = (Complex::<f64>::one() - l[0]) * (Complex::<f64>::one() - l[1]);
        assert!((supercharacter_spinor(&t).unwrap() - expected).norm() < 1e-10);
    }

    #[test]
    fn r1_grading_is_image_of_i_e1e2() {
        let space = SpinorSpace::new(1).unwrap();
        let img = spin_matrix(&volume_lift(1), space.gammas()).unwrap();
        assert_eq!(&img, space.grading());
        assert_eq!(space.grading(), &standard_grading(2));
    }

    #[test]
    fn rejects_non_unit_lambda() {
        assert!(DiagonalUnitary::new(vec![Complex::new(1.1, 0.0)]).is_err());
        assert!(DiagonalUnitary::new(vec![Complex::from_polar(1.0, 0.3)]).is_ok());
    }

    #[test]
    fn reports_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for r in 1..=3 {
            let g = grading_check(r, 20, &mut rng);
            assert!(g.passed(), "{}", g.render_text());
            let l = verify_lift(r, 20, &mut rng);
            assert!(l.passed(), "{}", l.render_text());
        }
    }
}
