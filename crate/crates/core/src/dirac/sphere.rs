//! Twisted Dirac operator on the round `S^2` in the spin-weighted harmonic
//! basis.
//!
//! Sections of `S⁺ ⊗ L` for a line bundle of degree `q` are spin-weight
//! `s = (q - 1)/2` functions, sections of `S⁻ ⊗ L` have weight `s + 1`, and
//! `D⁺` is the raising operator `ð`, acting on each `(l, m)` sector by the
//! ladder coefficient `sqrt((l - s)(l + s + 1))`. Half-integral quantities are
//! stored doubled.

use serde::{Deserialize, Serialize};

use super::{c64, GradedOperator};
use crate::error::{invalid, Result};
use crate::matrix::ComplexMatrix;

/// Largest accepted truncation `l_max`.
pub const MAX_L: usize = 64;

/// `sqrt((l - s)(l + s + 1))` for doubled `l` and `s`.
pub fn ladder_coefficient(twice_s: i64, twice_l: i64) -> f64 {
    let prod = (twice_l - twice_s) * (twice_l + twice_s + 2);
    (prod as f64 / 4.0).max(0.0).sqrt()
}

/// One total-angular-momentum sector: `2l + 1` modes on each side that
/// carries the sector, coupled by a multiple of the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorBlock {
    pub twice_l: i64,
    /// Modes of `S⁺ ⊗ L` in this sector (`0` or `2l + 1`).
    pub plus_modes: usize,
    /// Modes of `S⁻ ⊗ L` in this sector (`0` or `2l + 1`).
    pub minus_modes: usize,
    /// Ladder coefficient when both sides are present.
    pub coefficient: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereDiracSpec {
    pub q: i64,
    pub l_max: usize,
    pub twice_s: i64,
    pub blocks: Vec<SectorBlock>,
}

impl SphereDiracSpec {
    pub fn plus_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.plus_modes).sum()
    }

    pub fn minus_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.minus_modes).sum()
    }

    /// Distinct nonzero ladder coefficients, sector by sector.
    pub fn nonzero_coefficients(&self) -> Vec<(f64, usize)> {
        self.blocks
            .iter()
            .filter_map(|b| b.coefficient.filter(|&c| c > 0.0).map(|c| (c, b.plus_modes)))
            .collect()
    }
}

/// Sector data for degree `q` with sectors `l <= l_max`.
pub fn sphere_spec(q: i64, l_max: usize) -> Result<SphereDiracSpec> {
    if l_max > MAX_L {
        return Err(invalid("l_max", format!("truncation {l_max} exceeds the cap {MAX_L}")));
    }
    let twice_l_max = 2 * l_max as i64;
    if twice_l_max < q.abs() + 8 {
        return Err(invalid(
            "l_max",
            format!("truncation {l_max} is below |q|/2 + 4 = {}", q.abs() as f64 / 2.0 + 4.0),
        ));
    }
    let twice_s = q - 1;
    let plus_min = twice_s.abs();
    let minus_min = (twice_s + 2).abs();
    let start = plus_min.min(minus_min);
    let blocks = (start..=twice_l_max)
        .step_by(2)
        .map(|twice_l| {
            let modes = (twice_l + 1) as usize;
            let plus = twice_l >= plus_min;
            let minus = twice_l >= minus_min;
            SectorBlock {
                twice_l,
                plus_modes: if plus { modes } else { 0 },
                minus_modes: if minus { modes } else { 0 },
                coefficient: (plus && minus).then(|| ladder_coefficient(twice_s, twice_l)),
            }
        })
        .collect();
    Ok(SphereDiracSpec {
        q,
        l_max,
        twice_s,
        blocks,
    })
}

/// `D⁺` for degree `q`, block-diagonal over sectors with the modes of each
/// sector ordered by `m`.
pub fn dirac_s2(q: i64, l_max: usize) -> Result<GradedOperator> {
    let spec = sphere_spec(q, l_max)?;
    let (p, m) = (spec.plus_dim(), spec.minus_dim());
    let mut mat = ComplexMatrix::zeros(m, p);
    let (mut row, mut col) = (0, 0);
    for b in &spec.blocks {
        if let Some(c) = b.coefficient {
            for k in 0..b.plus_modes {
                mat[(row + k, col + k)] = c64(c, 0.0);
            }
        }
        row += b.minus_modes;
        col += b.plus_modes;
    }
    GradedOperator::new(p, m, mat)
}
