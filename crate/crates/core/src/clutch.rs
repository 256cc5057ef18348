//! Clutching data on spheres: the Dirac symbol `σ(x) = Σ i x_j E_j`,
//! K-theory triples `(E, F, σ)` sampled on the equator, the first Chern
//! number on `S^2` by the argument principle, and the conjugation identity
//! behind the Thom class.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::clifford::{build_gamma, GammaSet};
use crate::error::{invalid, Error, Result};
use crate::matrix::ComplexMatrix;
use crate::report::ValidationReport;

/// Samples with smallest singular value at or below this are singular.
pub const SINGULAR_TOL: f64 = 1e-8;
/// Default number of equator samples.
pub const DEFAULT_EQUATOR_SAMPLES: usize = 256;
/// Largest accepted phase step between consecutive samples.
pub const MAX_PHASE_STEP: f64 = PI / 2.0;
/// Number of sample doublings attempted before giving up.
pub const MAX_REFINEMENTS: u32 = 8;
/// Tolerance of the Thom clutching identities.
pub const THOM_TOL: f64 = 1e-10;

/// The `Δ⁺ → Δ⁻` block of `Σ i x_j E_j` in the ω-eigenbasis (`n` even).
pub fn dirac_symbol(x: &[f64], g: &GammaSet<f64>) -> Result<ComplexMatrix<f64>> {
    let n = g.n();
    if n % 2 == 1 {
        return Err(invalid("n", "the symbol is graded only in even dimension"));
    }
    if x.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for n = {n}",
            x.len()
        )));
    }
    let half = g.spinor_dim() / 2;
    let full = g.clifford_vector(x).scale(&Complex::i());
    Ok(full.submatrix(half, 0, half, half))
}

type Sampler = Arc<dyn Fn(&[f64]) -> ComplexMatrix<f64> + Send + Sync>;

/// A triple `(E, F, σ)` on `S^n` with trivial `E`, `F` and clutching map
/// `σ: S^{n-1} → Hom(E, F)` given by a sampling closure.
#[derive(Clone)]
pub struct ClutchTriple {
    n: usize,
    plus_rank: usize,
    minus_rank: usize,
    sigma: Sampler,
    samples: usize,
    label: String,
}

impl fmt::Debug for ClutchTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClutchTriple")
            .field("label", &self.label)
            .field("n", &self.n)
            .field("plus_rank", &self.plus_rank)
            .field("minus_rank", &self.minus_rank)
            .field("samples", &self.samples)
            .finish()
    }
}

impl ClutchTriple {
    pub fn new(
        n: usize,
        plus_rank: usize,
        minus_rank: usize,
        label: impl Into<String>,
        sigma: impl Fn(&[f64]) -> ComplexMatrix<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        if n < 2 || n % 2 == 1 {
            return Err(invalid("n", "clutching is set up on even spheres"));
        }
        if plus_rank != minus_rank {
            return Err(invalid("rank", format!("ranks {plus_rank} and {minus_rank} differ")));
        }
        Ok(Self {
            n,
            plus_rank,
            minus_rank,
            sigma: Arc::new(sigma),
            samples: DEFAULT_EQUATOR_SAMPLES,
            label: label.into(),
        })
    }

    /// Clutching by the Dirac symbol; on `S^2` this is the bundle `S⁺`.
    pub fn dirac_symbol(n: usize) -> Result<Self> {
        let g = build_gamma::<f64>(n)?;
        let rank = g.spinor_dim() / 2;
        // validate once so the sampler can unwrap
        dirac_symbol(&vec![0.0; n], &g)?;
        Self::new(n, rank, rank, "dirac_symbol", move |v| {
            dirac_symbol(v, &g).expect("validated dimension")
        })
    }

    /// Identity clutching of the trivial rank-`k` bundle on `S^2`.
    pub fn trivial(rank: usize) -> Self {
        Self::new(2, rank, rank, format!("trivial{rank}"), move |_| {
            ComplexMatrix::identity(rank)
        })
        .expect("even sphere, equal ranks")
    }

    /// Rank-one clutching `(v_1 + i v_2)^k` on `S^2`.
    pub fn scalar_power(k: i32) -> Self {
        Self::new(2, 1, 1, format!("power{k}"), move |v| {
            let z = Complex::new(v[0], v[1]);
            let w = if k >= 0 { z.powi(k) } else { z.conj().powi(-k) };
            ComplexMatrix::scalar_identity(1, w)
        })
        .expect("even sphere, equal ranks")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.plus_rank
    }

    pub fn plus_rank(&self) -> usize {
        self.plus_rank
    }

    pub fn minus_rank(&self) -> usize {
        self.minus_rank
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples.max(3);
        self
    }

    pub fn sample(&self, v: &[f64]) -> ComplexMatrix<f64> {
        (self.sigma)(v)
    }

    /// The dual triple, clutched by the entrywise conjugate.
    pub fn conjugate(&self) -> Self {
        let s = self.sigma.clone();
        Self {
            sigma: Arc::new(move |v| s(v).conj()),
            label: format!("conj({})", self.label),
            ..self.clone()
        }
    }

    /// Block direct sum of two triples on the same sphere.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("S^{} and S^{}", self.n, other.n)));
        }
        let (a, b) = (self.sigma.clone(), other.sigma.clone());
        Ok(Self {
            n: self.n,
            plus_rank: self.plus_rank + other.plus_rank,
            minus_rank: self.minus_rank + other.minus_rank,
            sigma: Arc::new(move |v| ComplexMatrix::block_diag(&[&a(v), &b(v)])),
            samples: self.samples.max(other.samples),
            label: format!("{}+{}", self.label, other.label),
        })
    }

    /// Multiplies the clutching map by the null-homotopic loop
    /// `exp(i ε v_2)`.
    pub fn perturbed(&self, eps: f64) -> Self {
        let s = self.sigma.clone();
        Self {
            sigma: Arc::new(move |v| s(v).scale(&Complex::from_polar(1.0, eps * v[1]))),
            label: format!("{}*exp(i{eps}v2)", self.label),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Winding {
    /// Counterclockwise winding number of `det σ` in the `(v_1, v_2)` plane.
    pub winding: i64,
    /// First Chern number of the clutched bundle, `-winding`.
    pub c1: i64,
    pub samples_used: usize,
    pub refinements: u32,
    pub max_step: f64,
    pub min_singular_value: f64,
}

fn det(m: &ComplexMatrix<f64>) -> Complex<f64> {
    if m.rows() == 0 {
        return Complex::new(1.0, 0.0);
    }
    m.to_nalgebra().determinant()
}

fn wind_once(t: &ClutchTriple, samples: usize) -> Result<(f64, f64, f64)> {
    let mut dets = Vec::with_capacity(samples);
    let mut min_sv = f64::INFINITY;
    for k in 0..samples {
        let phi = 2.0 * PI * k as f64 / samples as f64;
        let m = t.sample(&[phi.cos(), phi.sin()]);
        if m.shape() != (t.minus_rank, t.plus_rank) {
            return Err(Error::DimensionMismatch(format!(
                "sample {k} has shape {:?}, expected {:?}",
                m.shape(),
                (t.minus_rank, t.plus_rank)
            )));
        }
        let smin = m.singular_values().last().copied().unwrap_or(f64::INFINITY);
        if smin <= SINGULAR_TOL {
            return Err(Error::SingularClutching {
                index: k,
                sigma_min: smin,
            });
        }
        min_sv = min_sv.min(smin);
        dets.push(det(&m));
    }
    let mut total = 0.0;
    let mut max_step: f64 = 0.0;
    for k in 0..samples {
        let step = (dets[(k + 1) % samples] / dets[k]).arg();
        max_step = max_step.max(step.abs());
        total += step;
    }
    Ok((total, max_step, min_sv))
}

/// First Chern number of a triple on `S^2`: minus the counterclockwise
/// winding of `det σ`, by phase unwrapping with automatic refinement.
pub fn chern_number_s2(t: &ClutchTriple) -> Result<Winding> {
    if t.n != 2 {
        return Err(invalid("n", "winding classification is implemented on S^2 only"));
    }
    let mut samples = t.samples;
    let mut refinements = 0;
    loop {
        let (total, max_step, min_sv) = wind_once(t, samples)?;
        if max_step < MAX_PHASE_STEP {
            let winding = (total / (2.0 * PI)).round() as i64;
            return Ok(Winding {
                winding,
                c1: -winding,
                samples_used: samples,
                refinements,
                max_step,
                min_singular_value: min_sv,
            });
        }
        if refinements == MAX_REFINEMENTS {
            return Err(Error::Undersampled {
                step: max_step,
                refinements,
            });
        }
        samples *= 2;
        refinements += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableInvariants {
    pub rank: usize,
    pub c1: i64,
}

impl StableInvariants {
    /// Stable equivalence on `S^2`: trivial summands change only the rank.
    pub fn stably_equivalent(&self, other: &Self) -> bool {
        self.c1 == other.c1
    }
}

pub fn stable_invariants(t: &ClutchTriple) -> Result<StableInvariants> {
    Ok(StableInvariants {
        rank: t.rank(),
        c1: chern_number_s2(t)?.c1,
    })
}

/// Points of the equator `S^{n-1}` on a product grid of `m` samples per
/// hyperspherical angle.
fn equator_grid(n: usize, m: usize) -> Vec<Vec<f64>> {
    let polar = n.saturating_sub(2);
    let mut out = Vec::new();
    let mut idx = vec![0usize; polar];
    loop {
        let angles: Vec<f64> = idx.iter().map(|&i| PI * (i as f64 + 0.5) / m as f64).collect();
        for a in 0..m {
            let phi = 2.0 * PI * a as f64 / m as f64;
            let mut v = Vec::with_capacity(n);
            let mut s = 1.0;
            for th in &angles {
                v.push(s * th.cos());
                s *= th.sin();
            }
            v.push(s * phi.cos());
            v.push(s * phi.sin());
            out.push(v);
        }
        let mut k = polar;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < m {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Checks the Thom clutching construction on `S^n`: with `E = E_{n+1}` and
/// `g = cos θ + sin θ E c(v)`, `g` is unitary, `g⁻¹(-iE)g` equals
/// `-cos 2θ iE + sin 2θ i c(v)`, `g = I` at `θ = 0`, and on the equator
/// `θ = π/2` the map `g` is odd and agrees with `i c(v)` on `Δ⁺`.
pub fn verify_thom_clutch(n: usize, theta_samples: usize, equator_samples: usize) -> ValidationReport {
    let mut rep = ValidationReport::new("thom");
    let pfx = format!("clutch.thom.n{n}");
    rep.set_config(format!("{pfx}.tolerance"), THOM_TOL);
    rep.set_config(format!("{pfx}.theta_samples"), theta_samples);
    rep.set_config(format!("{pfx}.equator_samples"), equator_samples);
    if !(n == 2 || n == 4) || theta_samples < 2 || equator_samples == 0 {
        rep.error(
            format!("{pfx}.precondition"),
            "n in {2, 4}, at least two θ samples",
            &invalid(
                "n",
                format!("unsupported configuration n = {n}, θ samples {theta_samples}"),
            ),
        );
        return rep;
    }
    let g = match build_gamma::<f64>(n + 1) {
        Ok(g) => g,
        Err(e) => {
            rep.error(format!("{pfx}.gamma"), "gamma matrices", &e);
            return rep;
        }
    };
    let dim = g.spinor_dim();
    let half = dim / 2;
    let id = ComplexMatrix::<f64>::identity(dim);
    let e_top = g.e(n + 1);
    let i = Complex::i();
    let c = |v: &[f64]| {
        let mut x = v.to_vec();
        x.push(0.0);
        g.clifford_vector(&x)
    };
    let g_at = |theta: f64, cv: &ComplexMatrix<f64>| {
        let ec = e_top * cv;
        &id.scale(&Complex::new(theta.cos(), 0.0)) + &ec.scale(&Complex::new(theta.sin(), 0.0))
    };
    let points = equator_grid(n, equator_samples);
    let (mut unitary, mut conj, mut pole, mut odd, mut symbol) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for v in &points {
        let cv = c(v);
        for k in 0..theta_samples {
            let theta = PI / 2.0 * k as f64 / (theta_samples - 1) as f64;
            let gm = g_at(theta, &cv);
            unitary = unitary.max(gm.unitarity_residual());
            let lhs = &(&gm.adjoint() * &e_top.scale(&-i)) * &gm;
            let rhs = &e_top.scale(&(-i * (2.0 * theta).cos())) + &cv.scale(&(i * (2.0 * theta).sin()));
            conj = conj.max(lhs.max_abs_diff(&rhs));
        }
        pole = pole.max(g_at(0.0, &cv).max_abs_diff(&id));
        let ge = g_at(PI / 2.0, &cv);
        odd = odd.max(
            ge.submatrix(0, 0, half, half)
                .max_abs()
                .max(ge.submatrix(half, half, half, half).max_abs()),
        );
        let icv = cv.scale(&i);
        symbol = symbol.max(
            ge.submatrix(0, 0, dim, half)
                .max_abs_diff(&icv.submatrix(0, 0, dim, half)),
        );
    }
    rep.check_residual(format!("{pfx}.unitary"), "g(x) is unitary", unitary, THOM_TOL);
    rep.check_residual(
        format!("{pfx}.conjugation"),
        "g⁻¹(-iE_{n+1})g = -cos2θ iE_{n+1} + sin2θ ic(v)",
        conj,
        THOM_TOL,
    );
    rep.check_residual(format!("{pfx}.pole"), "g = I at θ = 0", pole, THOM_TOL);
    rep.check_residual(
        format!("{pfx}.equator_odd"),
        "g(v) maps Δ⁺ to Δ⁻ on the equator",
        odd,
        THOM_TOL,
    );
    rep.check_residual(
        format!("{pfx}.equator_symbol"),
        "g(v) = ic(v) on Δ⁺ on the equator",
        symbol,
        THOM_TOL,
    );
    if let Some(last) = rep.checks.last_mut() {
        last.payload = Some(serde_json::json!({ "points": points.len() * theta_samples }));
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn symbol_at_origin_is_zero_and_n2_is_complex_coordinate() {
        let g = build_gamma::<f64>(2).unwrap();
        assert!(dirac_symbol(&[0.0, 0.0], &g).unwrap().is_zero());
        let s = dirac_symbol(&[0.6, 0.8], &g).unwrap();
        assert_eq!(s.shape(), (1, 1));
        assert!((s[(0, 0)] - Complex::new(0.6, 0.8)).norm() < 1e-15);
        assert!(dirac_symbol(&[1.0, 0.0, 0.0], &build_gamma::<f64>(3).unwrap()).is_err());
    }

    #[test]
    fn symbol_is_a_scaled_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in [2, 4, 6] {
            let g = build_gamma::<f64>(n).unwrap();
            for _ in 0..10 {
                let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let norm2: f64 = x.iter().map(|v| v * v).sum();
                let s = dirac_symbol(&x, &g).unwrap();
                let ss = &s.adjoint() * &s;
                assert!(ss.max_abs_diff(&ComplexMatrix::scalar_identity(s.cols(), Complex::new(norm2, 0.0))) < 1e-14);
            }
        }
    }

    #[test]
    fn anchors() {
        assert_eq!(chern_number_s2(&ClutchTriple::trivial(3)).unwrap().c1, 0);
        let s = ClutchTriple::dirac_symbol(2).unwrap();
        assert_eq!(chern_number_s2(&s).unwrap().c1, -1);
        assert_eq!(chern_number_s2(&s.conjugate()).unwrap().c1, 1);
    }

    #[test]
    fn scalar_powers_by_argument_principle() {
        for k in -4..=4 {
            let w = chern_number_s2(&ClutchTriple::scalar_power(k)).unwrap();
            assert_eq!(w.winding, k as i64);
            assert_eq!(w.c1, -(k as i64));
        }
    }

    #[test]
    fn undersampling_refines_or_refuses() {
        let t = ClutchTriple::scalar_power(4).with_samples(6);
        let w = chern_number_s2(&t).unwrap();
        assert!(w.refinements > 0);
        assert_eq!(w.winding, 4);
        let wild = ClutchTriple::new(2, 1, 1, "wild", |v| {
            ComplexMatrix::scalar_identity(1, Complex::from_polar(1.0, 1e6 * v[0]))
        })
        .unwrap()
        .with_samples(8);
        assert!(matches!(chern_number_s2(&wild), Err(Error::Undersampled { .. })));
    }

    #[test]
    fn singular_samples_are_rejected() {
        let t = ClutchTriple::new(2, 1, 1, "vanishing", |v| {
            ComplexMatrix::scalar_identity(1, Complex::new(v[0] - 1.0, 0.0))
        })
        .unwrap();
        assert!(matches!(
            chern_number_s2(&t),
            Err(Error::SingularClutching { index: 0, .. })
        ));
        assert!(ClutchTriple::new(2, 1, 2, "bad", |_| ComplexMatrix::zeros(2, 1)).is_err());
    }

    #[test]
    fn invariants_add_and_perturbations_do_not_change_them() {
        let beta = ClutchTriple::dirac_symbol(2).unwrap().conjugate();
        assert_eq!(stable_invariants(&beta).unwrap(), StableInvariants { rank: 1, c1: 1 });
        let sum = beta.direct_sum(&beta.conjugate()).unwrap();
        let inv = stable_invariants(&sum).unwrap();
        assert_eq!(inv, StableInvariants { rank: 2, c1: 0 });
        assert!(inv.stably_equivalent(&stable_invariants(&ClutchTriple::trivial(2)).unwrap()));
        let p = ClutchTriple::scalar_power(3).perturbed(0.7);
        assert_eq!(chern_number_s2(&p).unwrap().c1, -3);
        let a = ClutchTriple::scalar_power(2);
        let b = ClutchTriple::scalar_power(-5);
        assert_eq!(chern_number_s2(&a.direct_sum(&b).unwrap()).unwrap().c1, -2 + 5);
    }

    #[test]
    fn thom_clutch_identities() {
        let r2 = verify_thom_clutch(2, 32, 32);
        assert!(r2.passed(), "{}", r2.render_text());
        assert!(r2.max_residual().unwrap() < 1e-12);
        let r4 = verify_thom_clutch(4, 16, 8);
        assert!(r4.passed(), "{}", r4.render_text());
        assert!(!verify_thom_clutch(3, 8, 8).passed());
    }

    #[test]
    fn equator_grid_points_are_unit() {
        for n in [2, 4] {
            let pts = equator_grid(n, 6);
            assert_eq!(pts.len(), 6usize.pow((n - 1) as u32));
            assert!(pts
                .iter()
                .all(|p| (p.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14));
        }
    }
}
