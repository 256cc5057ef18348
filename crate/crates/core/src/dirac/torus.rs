//! Lattice Dirac operator on the `N x N` periodic torus with constant U(1)
//! flux.
//!
//! A plain square discretization of `D⁺` always has index zero, so the
//! operator is the overlap construction: with the Wilson–Dirac operator
//! `D_W` and `H = γ5 (D_W - m0)`, the sign function `ε = sign(H)` gives the
//! Ginsparg–Wilson operator `1 + γ5 ε`. Writing `ε` in chiral blocks
//! `[[a, b], [b*, d]]`, the chiral zero modes are the `a = -1` and `d = +1`
//! eigenvectors, and the `a = +1`, `d = -1` eigenvectors are the eigenvalue-2
//! modes. Restricting `b*: V⁺ → V⁻` to the complement of the eigenvalue-2
//! modes yields a graded operator with kernel and cokernel equal to the
//! chiral zero modes.

use std::f64::consts::PI;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{c64, GradedOperator, MIN_GAP_RATIO};
use crate::clifford::build_gamma;
use crate::error::{invalid, Error, Result};
use crate::matrix::ComplexMatrix;

/// Largest accepted lattice side.
pub const MAX_LATTICE: usize = 32;
/// Eigenvalues of the chiral blocks within this distance of `±1` are
/// classified as exact chiral modes.
pub const CHIRAL_TOL: f64 = 1e-9;
/// Smallest admissible `|λ(H)| / ‖H‖`; the sign function is undefined at 0.
pub const MIN_H_GAP: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeFluxField {
    n: usize,
    q: i64,
    /// Link phase `U_x(x, y)` at index `x + n y`.
    links_x: Vec<Complex<f64>>,
    /// Link phase `U_y(x, y)` at index `x + n y`.
    links_y: Vec<Complex<f64>>,
}

impl LatticeFluxField {
    /// Landau-gauge links realizing uniform plaquette phase `exp(2πiq/N²)`.
    pub fn new(n: usize, q: i64) -> Result<Self> {
        if n < 4 {
            return Err(invalid("N", "lattice side must be at least 4"));
        }
        if n > MAX_LATTICE {
            return Err(invalid("N", format!("lattice side {n} exceeds the cap {MAX_LATTICE}")));
        }
        if 4 * q.unsigned_abs() as usize >= n * n {
            return Err(invalid("q", format!("flux |{q}| is too large for a {n}x{n} lattice")));
        }
        let nf = n as f64;
        let qf = q as f64;
        let mut links_x = Vec::with_capacity(n * n);
        let mut links_y = Vec::with_capacity(n * n);
        for y in 0..n {
            for x in 0..n {
                links_x.push(Complex::from_polar(1.0, -2.0 * PI * qf * y as f64 / (nf * nf)));
                links_y.push(if y == n - 1 {
                    Complex::from_polar(1.0, 2.0 * PI * qf * x as f64 / nf)
                } else {
                    c64(1.0, 0.0)
                });
            }
        }
        Ok(Self { n, q, links_x, links_y })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    fn site(&self, x: usize, y: usize) -> usize {
        (x % self.n) + self.n * (y % self.n)
    }

    pub fn link_x(&self, x: usize, y: usize) -> Complex<f64> {
        self.links_x[self.site(x, y)]
    }

    pub fn link_y(&self, x: usize, y: usize) -> Complex<f64> {
        self.links_y[self.site(x, y)]
    }

    /// `U_x(x,y) U_y(x+1,y) U_x(x,y+1)* U_y(x,y)*`.
    pub fn plaquette(&self, x: usize, y: usize) -> Complex<f64> {
        self.link_x(x, y) * self.link_y(x + 1, y) * self.link_x(x, y + 1).conj() * self.link_y(x, y).conj()
    }

    /// Largest deviation of a plaquette from `exp(2πiq/N²)`.
    pub fn plaquette_residual(&self) -> f64 {
        let target = Complex::from_polar(1.0, 2.0 * PI * self.q as f64 / (self.n * self.n) as f64);
        (0..self.n)
            .flat_map(|y| (0..self.n).map(move |x| (x, y)))
            .map(|(x, y)| (self.plaquette(x, y) - target).norm())
            .fold(0.0, f64::max)
    }

    /// Product of all plaquettes, `exp(2πiq) = 1`.
    pub fn total_holonomy(&self) -> Complex<f64> {
        (0..self.n)
            .flat_map(|y| (0..self.n).map(move |x| (x, y)))
            .map(|(x, y)| self.plaquette(x, y))
            .product()
    }

    /// Wilson–Dirac operator on `C² ⊗ C^{N²}`, chirality-major layout:
    /// index `s N² + site`, with `γ_μ = i E_μ` and `γ5 = diag(1, -1)`.
    ///
    /// The hop from `x + μ` to `x` carries `U_μ(x)*`. With `U_μ(x)` itself
    /// the plaquette phase `exp(2πiq/N²)` is the holonomy of a connection
    /// with `c_1 = -q`; the conjugate fixes the orientation so that the
    /// index is `+q`.
    pub fn wilson_dirac(&self) -> Result<ComplexMatrix<f64>> {
        let g = build_gamma::<f64>(2)?;
        let gammas: Vec<ComplexMatrix<f64>> = g.generators().iter().map(|e| e.scale(&Complex::i())).collect();
        let n = self.n;
        let vol = n * n;
        let mut dw = ComplexMatrix::zeros(2 * vol, 2 * vol);
        for y in 0..n {
            for x in 0..n {
                let s = self.site(x, y);
                for s1 in 0..2 {
                    dw[(s1 * vol + s, s1 * vol + s)] += c64(2.0, 0.0);
                }
                for (mu, gamma) in gammas.iter().enumerate() {
                    let (fwd, link) = if mu == 0 {
                        (self.site(x + 1, y), self.link_x(x, y))
                    } else {
                        (self.site(x, y + 1), self.link_y(x, y))
                    };
                    let (bwd, link_back) = if mu == 0 {
                        (self.site(x + n - 1, y), self.link_x(x + n - 1, y).conj())
                    } else {
                        (self.site(x, y + n - 1), self.link_y(x, y + n - 1).conj())
                    };
                    for s1 in 0..2 {
                        for s2 in 0..2 {
                            let gm = gamma[(s1, s2)];
                            let wilson = if s1 == s2 { c64(-0.5, 0.0) } else { c64(0.0, 0.0) };
                            // ½γ(∇⁺ + ∇⁻) - ½Δ, hopping with the conjugate links
                            dw[(s1 * vol + s, s2 * vol + fwd)] += (gm * 0.5 + wilson) * link.conj();
                            dw[(s1 * vol + s, s2 * vol + bwd)] += (-gm * 0.5 + wilson) * link_back.conj();
                        }
                    }
                }
            }
        }
        Ok(dw)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusStats {
    pub n: usize,
    pub q: i64,
    pub wilson_mass: f64,
    /// `min |λ(H)| / max |λ(H)|`.
    pub h_gap: f64,
    pub plus_zero_modes: usize,
    pub minus_zero_modes: usize,
    pub plus_doubler_modes: usize,
    pub minus_doubler_modes: usize,
    /// Residual of `ε² = 1`.
    pub sign_residual: f64,
}

/// Eigenvectors of a Hermitian block whose eigenvalue is not within
/// [`CHIRAL_TOL`] of `drop`, together with the number of dropped
/// eigenvalues and the number of eigenvalues near `-drop`.
fn split_chiral(block: &ComplexMatrix<f64>, drop: f64) -> Result<(ComplexMatrix<f64>, usize, usize)> {
    let eig = block.hermitian_eigen();
    let dim = block.rows();
    let near = |v: f64, target: f64| (v - target).abs() < CHIRAL_TOL;
    let keep: Vec<usize> = (0..dim).filter(|&k| !near(eig.values[k], drop)).collect();
    // the classification must be separated from the rest of the spectrum
    let closest_kept = keep
        .iter()
        .map(|&k| (eig.values[k] - drop).abs())
        .fold(f64::INFINITY, f64::min);
    let worst_dropped = (0..dim)
        .filter(|&k| near(eig.values[k], drop))
        .map(|k| (eig.values[k] - drop).abs())
        .fold(0.0, f64::max);
    if worst_dropped > 0.0 && closest_kept / worst_dropped <= MIN_GAP_RATIO {
        return Err(Error::NoSpectralGap {
            zero: worst_dropped,
            nonzero: closest_kept,
            ratio: closest_kept / worst_dropped,
            required: MIN_GAP_RATIO,
        });
    }
    let opposite = (0..dim).filter(|&k| near(eig.values[k], -drop)).count();
    let q = ComplexMatrix::from_fn(dim, keep.len(), |i, j| eig.vectors[(i, keep[j])]);
    Ok((q, dim - keep.len(), opposite))
}

/// Graded operator on the lattice whose index counts the chiral zero modes
/// of the overlap operator, together with spectral diagnostics.
pub fn dolbeault_torus_with_stats(n: usize, q: i64, wilson_mass: f64) -> Result<(GradedOperator, TorusStats)> {
    if !(wilson_mass > 0.0 && wilson_mass < 2.0) {
        return Err(invalid("wilson_mass", format!("{wilson_mass} is outside (0, 2)")));
    }
    let field = LatticeFluxField::new(n, q)?;
    let vol = n * n;
    let dw = field.wilson_dirac()?;
    let shifted = &dw - &ComplexMatrix::scalar_identity(2 * vol, c64(wilson_mass, 0.0));
    // H = γ5 (D_W - m0): negate the minus-chirality rows
    let h = ComplexMatrix::from_fn(2 * vol, 2 * vol, |i, j| {
        if i < vol {
            shifted[(i, j)]
        } else {
            -shifted[(i, j)]
        }
    });
    let eig = h.hermitian_eigen();
    let h_max = eig.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let h_min = eig.values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    let h_gap = h_min / h_max;
    if h_gap < MIN_H_GAP {
        return Err(invalid(
            "wilson_mass",
            format!("H has a near-zero eigenvalue (relative {h_gap:e})"),
        ));
    }
    // ε = V sign(Λ) V*
    let v = &eig.vectors;
    let vs = ComplexMatrix::from_fn(2 * vol, 2 * vol, |i, j| v[(i, j)] * eig.values[j].signum());
    let eps = &vs * &v.adjoint();
    let sign_residual = (&eps * &eps).max_abs_diff(&ComplexMatrix::identity(2 * vol));
    let a = eps.submatrix(0, 0, vol, vol);
    let b = eps.submatrix(0, vol, vol, vol);
    let d = eps.submatrix(vol, vol, vol, vol);
    let (plus, minus) = rayon::join(|| split_chiral(&a, 1.0), || split_chiral(&d, -1.0));
    let (q_plus, plus_doublers, plus_zero) = plus?;
    let (q_minus, minus_doublers, minus_zero) = minus?;
    let reduced = &(&q_minus.adjoint() * &b.adjoint()) * &q_plus;
    let op = GradedOperator::new(q_plus.cols(), q_minus.cols(), reduced)?;
    Ok((
        op,
        TorusStats {
            n,
            q,
            wilson_mass,
            h_gap,
            plus_zero_modes: plus_zero,
            minus_zero_modes: minus_zero,
            plus_doubler_modes: plus_doublers,
            minus_doubler_modes: minus_doublers,
            sign_residual,
        },
    ))
}

pub fn dolbeault_torus(n: usize, q: i64, wilson_mass: f64) -> Result<GradedOperator> {
    dolbeault_torus_with_stats(n, q, wilson_mass).map(|(op, _)| op)
}

/// Runs several lattice configurations in parallel, preserving order.
pub fn dolbeault_torus_batch(configs: &[(usize, i64, f64)]) -> Vec<Result<(GradedOperator, TorusStats)>> {
    configs
        .par_iter()
        .map(|&(n, q, m)| dolbeault_torus_with_stats(n, q, m))
        .collect()
}
