//! Chern character of the positive spinor bundle on `S^{2r}` by quadrature.
//!
//! The bundle is the image of the projector field `e(t) = ½(1 + i c(t))`,
//! `c(t) = Σ t_j E_j`, on the unit sphere in `R^{2r+1}`. Its top Chern
//! character form is `i^r / (r! (2π)^r) · tr(e (de)^{2r})`, evaluated on
//! oriented orthonormal tangent frames and integrated with a product
//! Gauss–Legendre rule in hyperspherical coordinates.

use std::f64::consts::PI;

use itertools::Itertools;
use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;

use crate::clifford::{build_gamma, GammaSet};
use crate::error::{invalid, Error, Result};
use crate::matrix::ComplexMatrix;

/// Unit-norm tolerance for sphere points.
pub const UNIT_TOL: f64 = 1e-12;
/// Orthonormality and tangency tolerance for frames.
pub const FRAME_TOL: f64 = 1e-10;
/// Largest supported half-dimension; `r = 3` means `S^6` with `8 x 8`
/// projectors and 720-term antisymmetrization.
pub const MAX_R: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    t: Vec<f64>,
}

impl SpherePoint {
    pub fn new(t: Vec<f64>) -> Result<Self> {
        let norm = t.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(invalid("t", format!("sphere point has norm {norm}, expected 1")));
        }
        Ok(Self { t })
    }

    /// Normalizes a nonzero vector onto the sphere.
    pub fn normalized(v: &[f64]) -> Result<Self> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(invalid("t", "cannot normalize a zero vector"));
        }
        Ok(Self {
            t: v.iter().map(|x| x / norm).collect(),
        })
    }

    /// Hyperspherical coordinates: polar angles `θ_1..θ_{m-1}` in `[0, π]`
    /// and azimuth `φ`, giving a point of `S^m ⊂ R^{m+1}`.
    pub fn from_angles(polar: &[f64], azimuth: f64) -> Self {
        let mut t = Vec::with_capacity(polar.len() + 2);
        let mut s = 1.0;
        for &th in polar {
            t.push(s * th.cos());
            s *= th.sin();
        }
        t.push(s * azimuth.cos());
        t.push(s * azimuth.sin());
        Self { t }
    }

    pub fn coords(&self) -> &[f64] {
        &self.t
    }

    pub fn dim(&self) -> usize {
        self.t.len()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn det(vectors: &[Vec<f64>]) -> f64 {
    let n = vectors.len();
    DMatrix::from_fn(n, n, |i, j| vectors[j][i]).determinant()
}

/// Orthonormal tangent frame at `t`, oriented so that `(t, f_1, ..., f_m)`
/// is a positive basis of `R^{m+1}` (exterior normal first).
pub fn oriented_frame(t: &SpherePoint) -> Vec<Vec<f64>> {
    let m = t.dim();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| t.t[a].abs().total_cmp(&t.t[b].abs()));
    let mut basis: Vec<Vec<f64>> = vec![t.t.clone()];
    for k in order {
        if basis.len() == m {
            break;
        }
        let mut v = vec![0.0; m];
        v[k] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    if det(&basis) < 0.0 {
        basis[1].iter_mut().for_each(|x| *x = -*x);
    }
    basis.remove(0);
    basis
}

/// Sign `±1` of the orientation `(t, frame)` relative to the standard basis.
pub fn frame_orientation(t: &SpherePoint, frame: &[Vec<f64>]) -> f64 {
    let mut all = vec![t.t.clone()];
    all.extend(frame.iter().cloned());
    det(&all).signum()
}

fn check_gamma(r: usize, g: &GammaSet<f64>) -> Result<()> {
    if g.n() != 2 * r + 1 {
        return Err(Error::DimensionMismatch(format!(
            "projector on S^{} needs n = {}, got n = {}",
            2 * r,
            2 * r + 1,
            g.n()
        )));
    }
    Ok(())
}

fn half_dim(t: &SpherePoint, g: &GammaSet<f64>) -> Result<usize> {
    if t.dim().is_multiple_of(2) {
        return Err(invalid(
            "t",
            "projector field lives on an even sphere in odd ambient dimension",
        ));
    }
    let r = t.dim() / 2;
    check_gamma(r, g)?;
    Ok(r)
}

/// `e(t) = ½(1 + i c(t))`.
pub fn projector(t: &SpherePoint, g: &GammaSet<f64>) -> Result<ComplexMatrix<f64>> {
    half_dim(t, g)?;
    let ct = g.clifford_vector(&t.t);
    let dim = g.spinor_dim();
    Ok((&ComplexMatrix::identity(dim) + &ct.scale(&Complex::i())).scale(&Complex::new(0.5, 0.0)))
}

/// Directional derivative `de(f) = (i/2) c(f)` of the affine projector field.
pub fn projector_derivative(f: &[f64], g: &GammaSet<f64>) -> ComplexMatrix<f64> {
    g.clifford_vector(f).scale(&Complex::new(0.0, 0.5))
}

fn permutation_sign(p: &[usize]) -> f64 {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

/// Coefficient of the top Chern character form of the projector bundle on the
/// frame `f_1..f_{2r}` at `t`. With `dual`, the bundle is the conjugate one
/// (entrywise conjugated projector).
pub fn chern_density_with(t: &SpherePoint, frame: &[Vec<f64>], g: &GammaSet<f64>, dual: bool) -> Result<f64> {
    let r = half_dim(t, g)?;
    if frame.len() != 2 * r || frame.iter().any(|f| f.len() != t.dim()) {
        return Err(Error::DimensionMismatch(format!(
            "need {} tangent vectors of length {}",
            2 * r,
            t.dim()
        )));
    }
    for (a, fa) in frame.iter().enumerate() {
        if dot(fa, &t.t).abs() > FRAME_TOL {
            return Err(invalid("frame", format!("vector {a} is not tangent")));
        }
        for (b, fb) in frame.iter().enumerate() {
            let expected = if a == b { 1.0 } else { 0.0 };
            if (dot(fa, fb) - expected).abs() > FRAME_TOL {
                return Err(invalid("frame", "frame is not orthonormal"));
            }
        }
    }
    let fix = |m: ComplexMatrix<f64>| if dual { m.conj() } else { m };
    let e = fix(projector(t, g)?);
    let de: Vec<ComplexMatrix<f64>> = frame.iter().map(|f| fix(projector_derivative(f, g))).collect();
    let mut sum = Complex::new(0.0, 0.0);
    for p in (0..2 * r).permutations(2 * r) {
        let prod = p.iter().fold(e.clone(), |acc, &k| &acc * &de[k]);
        sum += prod.trace() * permutation_sign(&p);
    }
    let prefactor = crate::clifford::i_pow::<f64>(r) / (factorial(r) * (2.0 * PI).powi(r as i32));
    Ok((prefactor * sum).re)
}

pub fn chern_density(t: &SpherePoint, frame: &[Vec<f64>], g: &GammaSet<f64>) -> Result<f64> {
    chern_density_with(t, frame, g, false)
}

/// Abscissae and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n <= 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    r: usize,
    polar_nodes: usize,
    azimuth_nodes: usize,
    nodes: Vec<(SpherePoint, f64)>,
}

impl QuadratureRule {
    /// Product rule on `S^{2r}`: Gauss–Legendre in each of the `2r - 1` polar
    /// angles, uniform in the azimuth.
    pub fn product(r: usize, polar_nodes: usize, azimuth_nodes: usize) -> Result<Self> {
        if r == 0 || r > MAX_R {
            return Err(invalid("r", format!("half-dimension must lie in 1..={MAX_R}")));
        }
        if polar_nodes == 0 || azimuth_nodes == 0 {
            return Err(invalid("nodes", "node counts must be positive"));
        }
        let npolar = 2 * r - 1;
        let total = polar_nodes
            .checked_pow(npolar as u32)
            .and_then(|p| p.checked_mul(azimuth_nodes))
            .filter(|&t| t <= 50_000_000)
            .ok_or_else(|| invalid("nodes", "quadrature grid is too large"))?;
        let gl: Vec<(f64, f64)> = gauss_legendre(polar_nodes)
            .into_iter()
            .map(|(x, w)| (PI * (x + 1.0) / 2.0, w * PI / 2.0))
            .collect();
        let dphi = 2.0 * PI / azimuth_nodes as f64;
        let mut nodes = Vec::with_capacity(total);
        let mut idx = vec![0usize; npolar];
        loop {
            let angles: Vec<f64> = idx.iter().map(|&i| gl[i].0).collect();
            // volume element Π_k sin^{2r-k}(θ_k)
            let jac: f64 = angles
                .iter()
                .enumerate()
                .map(|(k, th)| th.sin().powi((npolar - k) as i32))
                .product();
            let w: f64 = idx.iter().map(|&i| gl[i].1).product::<f64>() * jac * dphi;
            for a in 0..azimuth_nodes {
                let phi = (a as f64 + 0.5) * dphi;
                nodes.push((SpherePoint::from_angles(&angles, phi), w));
            }
            let mut k = npolar;
            loop {
                if k == 0 {
                    return Ok(Self {
                        r,
                        polar_nodes,
                        azimuth_nodes,
                        nodes,
                    });
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < polar_nodes {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn polar_nodes(&self) -> usize {
        self.polar_nodes
    }

    pub fn azimuth_nodes(&self) -> usize {
        self.azimuth_nodes
    }

    pub fn nodes(&self) -> &[(SpherePoint, f64)] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        pairwise_sum(&self.nodes.iter().map(|(_, w)| *w).collect::<Vec<_>>())
    }

    pub fn descriptor(&self) -> String {
        format!(
            "product Gauss-Legendre ({} polar nodes per angle) x uniform azimuth ({} nodes) on S^{}",
            self.polar_nodes,
            self.azimuth_nodes,
            2 * self.r
        )
    }
}

/// Area of the unit sphere `S^m`.
pub fn sphere_area(m: usize) -> f64 {
    // |S^m| = 2 π^{(m+1)/2} / Γ((m+1)/2), by the recurrence |S^m| = 2π/(m-1) |S^{m-2}|
    let mut area = if m.is_multiple_of(2) { 2.0 } else { 2.0 * PI };
    let mut k = if m.is_multiple_of(2) { 0 } else { 1 };
    while k < m {
        k += 2;
        area *= 2.0 * PI / (k as f64 - 1.0);
    }
    area
}

/// Deterministic pairwise summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1..=8 => values.iter().sum(),
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

/// `∫_{S^{2r}} ch_r` of the spinor projector bundle (`dual = false`) or of its
/// conjugate, the Bott bundle (`dual = true`).
pub fn integrate_chern(r: usize, rule: &QuadratureRule, dual: bool) -> Result<f64> {
    if rule.r() != r {
        return Err(invalid("rule", format!("rule is for r = {}, not r = {r}", rule.r())));
    }
    let g = build_gamma::<f64>(2 * r + 1)?;
    let values: Vec<f64> = rule
        .nodes()
        .par_iter()
        .map(|(t, w)| {
            let frame = oriented_frame(t);
            chern_density_with(t, &frame, &g, dual).map(|d| d * w)
        })
        .collect::<Result<_>>()?;
    Ok(pairwise_sum(&values))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConvergenceRow {
    pub polar_nodes: usize,
    pub azimuth_nodes: usize,
    pub node_count: usize,
    pub value: f64,
    pub residual: f64,
}

/// Integrals over a sequence of refinements, with residuals against `target`.
pub fn convergence_table(r: usize, dual: bool, levels: &[(usize, usize)], target: f64) -> Result<Vec<ConvergenceRow>> {
    levels
        .iter()
        .map(|&(p, a)| {
            let rule = QuadratureRule::product(r, p, a)?;
            let value = integrate_chern(r, &rule, dual)?;
            Ok(ConvergenceRow {
                polar_nodes: p,
                azimuth_nodes: a,
                node_count: rule.len(),
                value,
                residual: (value - target).abs(),
            })
        })
        .collect()
}

/// Residuals decrease strictly along the table, except once both neighbours
/// sit at the rounding floor.
pub fn is_monotone_decreasing(rows: &[ConvergenceRow], floor: f64) -> bool {
    rows.windows(2)
        .all(|w| w[1].residual < w[0].residual || (w[0].residual <= floor && w[1].residual <= floor))
}
