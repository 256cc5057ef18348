//! The verification suites behind the command-line driver and the acceptance
//! test. Each suite takes a [`SuiteConfig`] (whose defaults are the
//! acceptance settings) and returns a [`ValidationReport`]; an `Err` means
//! the configuration itself was rejected.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::chern::{convergence_table, integrate_chern, is_monotone_decreasing, QuadratureRule};
use crate::clifford::{build_gamma, exp_lambda2, rotation_of, verify_gamma, CliffordElement, MAX_GAMMA_DIM};
use crate::clutch::{self, chern_number_s2, stable_invariants, verify_thom_clutch, ClutchTriple};
use crate::dirac::{
    self, dirac_s2, dolbeault_torus_batch, index_of, random_graded, sharp, sharp_adjoint_residuals, GradedOperator,
    IndexResult, DEFAULT_REL_TOL, MIN_GAP_RATIO,
};
use crate::error::{invalid, Error, Result};
use crate::matrix::ComplexMatrix;
use crate::report::{merge, Status, ValidationReport};
use crate::series::{self, a_hat_series, verify_kappa_identity, verify_t_class_leading, verify_todd_multiplicative};
use crate::spin_rep::{grading_check, verify_lift};

/// Names of the individual suites, in the order `all` runs them.
pub const SUITE_NAMES: [&str; 10] = [
    "gamma",
    "clifford",
    "spinrep",
    "series",
    "chern",
    "index-s2",
    "index-torus",
    "sharp",
    "clutch",
    "index-theorem",
];

/// Tolerance of the symbol-squared identity.
pub const SYMBOL_TOL: f64 = 1e-12;
/// Tolerance of the double-cover checks.
pub const COVER_TOL: f64 = 1e-10;
/// `r = 1` quadrature tolerance.
pub const CHERN_R1_TOL: f64 = 1e-8;
/// `r = 2` quadrature tolerance.
pub const CHERN_R2_TOL: f64 = 1e-6;
/// Residual level below which a convergence table is at rounding.
pub const CONVERGENCE_FLOOR: f64 = 1e-13;
/// Tolerance of the graded sharp-product adjoint identity.
pub const SHARP_ADJOINT_TOL: f64 = 1e-12;
/// Largest random dimension accepted for sharp-product sampling.
pub const MAX_SHARP_SAMPLE_DIM: usize = 12;

/// Every tunable of every suite. The defaults are the acceptance settings,
/// so `all` with defaults is the acceptance suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Dimensions for the gamma identities.
    pub gamma_dims: Vec<usize>,
    /// Dimensions for the symbol-squared identity.
    pub symbol_dims: Vec<usize>,
    pub symbol_samples: usize,
    /// Points of the θ grid for the double cover.
    pub cover_grid: usize,
    pub spin_ranks: Vec<usize>,
    pub spin_samples: usize,
    pub series_order: usize,
    pub kappa_ranks: Vec<usize>,
    pub todd_pairs: Vec<(usize, usize)>,
    /// `(polar, azimuth)` nodes of the `r = 1` integrals.
    pub chern_r1_nodes: (usize, usize),
    /// `(polar, azimuth)` nodes of the `r = 2` integral.
    pub chern_r2_nodes: (usize, usize),
    /// Refinement levels of the convergence tables.
    pub chern_levels: Vec<(usize, usize)>,
    pub charges: Vec<i64>,
    /// Truncations `ceil(|q|/2) + lo ..= ceil(|q|/2) + hi`.
    pub l_max_offsets: (usize, usize),
    /// A single truncation used for every degree instead of the range.
    pub l_max: Option<usize>,
    pub lattice_sizes: Vec<usize>,
    pub wilson_masses: Vec<f64>,
    pub rel_tol: f64,
    pub sharp_pairs: usize,
    pub sharp_max_dim: usize,
    pub clutch_powers: Vec<i32>,
    pub equator_samples: usize,
    /// `(θ samples, equator samples per angle)` of the Thom checks on `S^2`.
    pub thom_n2: (usize, usize),
    /// Same on `S^4`.
    pub thom_n4: (usize, usize),
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            gamma_dims: (1..=12).collect(),
            symbol_dims: vec![2, 4, 6],
            symbol_samples: 100,
            cover_grid: 16,
            spin_ranks: vec![1, 2, 3],
            spin_samples: 100,
            series_order: series::DEFAULT_ORDER,
            kappa_ranks: vec![1, 2, 3],
            todd_pairs: vec![(1, 1), (1, 2), (2, 1), (2, 2)],
            chern_r1_nodes: (64, 128),
            chern_r2_nodes: (12, 24),
            chern_levels: vec![(2, 4), (4, 8), (8, 16)],
            charges: (-3..=3).collect(),
            l_max_offsets: (4, 12),
            l_max: None,
            lattice_sizes: vec![12, 16, 20],
            wilson_masses: vec![0.5, 1.0, 1.5],
            rel_tol: DEFAULT_REL_TOL,
            sharp_pairs: 200,
            sharp_max_dim: 6,
            clutch_powers: (-4..=4).collect(),
            equator_samples: clutch::DEFAULT_EQUATOR_SAMPLES,
            thom_n2: (32, 32),
            thom_n4: (16, 16),
        }
    }
}

/// Independent random stream of one suite, derived from the run seed.
fn suite_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn require(ok: bool, name: &'static str, reason: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(invalid(name, reason))
    }
}

fn nonempty<T>(v: &[T], name: &'static str) -> Result<()> {
    require(!v.is_empty(), name, "list must not be empty")
}

fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-2.0..2.0)).collect()
}

/// The generators printed for `n = 1..4`, one string per row.
const DISPLAYED_GAMMAS: [&[&[&str]]; 4] = [
    &[&["-i"]],
    &[&["0 -i", "-i 0"], &["0 -1", "1 0"]],
    &[&["0 -i", "-i 0"], &["0 -1", "1 0"], &["-i 0", "0 i"]],
    &[
        &["0 0 0 -i", "0 0 -i 0", "0 -i 0 0", "-i 0 0 0"],
        &["0 0 0 -1", "0 0 1 0", "0 -1 0 0", "1 0 0 0"],
        &["0 0 -i 0", "0 0 0 i", "-i 0 0 0", "0 i 0 0"],
        &["0 0 -1 0", "0 0 0 -1", "1 0 0 0", "0 1 0 0"],
    ],
];

fn parse_entry(token: &str) -> Complex<i64> {
    match token {
        "0" => Complex::new(0, 0),
        "1" => Complex::new(1, 0),
        "-1" => Complex::new(-1, 0),
        "i" => Complex::new(0, 1),
        "-i" => Complex::new(0, -1),
        other => panic!("unexpected matrix entry {other}"),
    }
}

fn displayed_matrix(rows: &[&str]) -> ComplexMatrix<i64> {
    let data: Vec<Complex<i64>> = rows
        .iter()
        .flat_map(|r| r.split_whitespace().map(parse_entry))
        .collect();
    ComplexMatrix::from_row_major(rows.len(), rows.len(), data)
}

/// Exact generator identities for each dimension, plus entry-for-entry
/// agreement with the printed matrices in dimensions one to four.
pub fn gamma_suite(cfg: &SuiteConfig) -> Result<ValidationReport> {
    nonempty(&cfg.gamma_dims, "gamma_dims")?;
    for &n in &cfg.gamma_dims {
        require(
            (1..=MAX_GAMMA_DIM).contains(&n),
            "n",
            format!("dimension {n} outside 1..={MAX_GAMMA_DIM}"),
        )?;
    }
    let mut rep = ValidationReport::new("gamma");
    for &n in &cfg.gamma_dims {
        let g = build_gamma::<i64>(n)?;
        rep.absorb(verify_gamma(&g))?;
    }
    for (k, displayed) in DISPLAYED_GAMMAS.iter().enumerate() {
        let n = k + 1;
        let g = build_gamma::<i64>(n)?;
        let mismatches: Vec<usize> = displayed
            .iter()
            .enumerate()
            .filter(|(j, rows)| displayed_matrix(rows) != *g.e(j + 1))
            .map(|(j, _)| j + 1)
            .collect();
        rep.check_bool(
            format!("gamma.n{n}.displayed"),
            format!("E_1..E_{n} equal the printed matrices entry for entry"),
            mismatches.is_empty() && g.generators().len() == displayed.len(),
        );
        if !mismatches.is_empty() {
            rep.with_payload(json!({ "mismatched_generators": mismatches }));
        }
    }
    Ok(rep)
}

/// Symbol squares to the Laplacian, and the double cover `Spin(n) → SO(n)`.
pub fn clifford_suite(cfg: &SuiteConfig) -> Result<ValidationReport> {
    nonempty(&cfg.symbol_dims, "symbol_dims")?;
    for &n in &cfg.symbol_dims {
        require(
            (1..=MAX_GAMMA_DIM).contains(&n),
            "n",
            format!("dimension {n} outside 1..={MAX_GAMMA_DIM}"),
        )?;
    }
    require(cfg.symbol_samples > 0, "samples", "need at least one sample")?;
    require(cfg.cover_grid > 0, "cover_grid", "need at least one grid point")?;
    let mut rep = ValidationReport::new("clifford");
    rep.set_config("clifford.seed", cfg.seed);
    rep.set_config("clifford.symbol.tolerance", SYMBOL_TOL);
    rep.set_config("clifford.symbol.samples", cfg.symbol_samples);
    rep.set_config("clifford.cover.tolerance", COVER_TOL);
    rep.set_config("clifford.cover.grid", cfg.cover_grid);
    let mut rng = suite_rng(cfg.seed, 2);
    for &n in &cfg.symbol_dims {
        let g = build_gamma::<f64>(n)?;
        let id = ComplexMatrix::<f64>::identity(g.spinor_dim());
        let mut worst: f64 = 0.0;
        for _ in 0..cfg.symbol_samples {
            let xi = gaussian_vec(&mut rng, n);
            let norm2: f64 = xi.iter().map(|x| x * x).sum();
            let s = g.clifford_vector(&xi);
            let lhs = &s * &s;
            worst = worst.max(lhs.max_abs_diff(&id.scale(&Complex::new(-norm2, 0.0))));
        }
        rep.check_residual(
            format!("clifford.symbol.n{n}"),
            "(Σ ξ_j E_j)^2 = -|ξ|^2 I for random ξ",
            worst,
            SYMBOL_TOL,
        );
    }

    let re = |x: f64| Complex::new(x, 0.0);
    let n = 3;
    let mut worst: f64 = 0.0;
    for k in 0..cfg.cover_grid {
        let theta = 2.0 * PI * k as f64 / cfg.cover_grid as f64;
        let g = exp_lambda2(&CliffordElement::bivector(n, &[(1, 2, re(theta / 2.0))]))?;
        let rot = rotation_of(&g)?;
        let mut expected = DMatrix::<f64>::identity(n, n);
        expected[(0, 0)] = theta.cos();
        expected[(0, 1)] = -theta.sin();
        expected[(1, 0)] = theta.sin();
        expected[(1, 1)] = theta.cos();
        worst = worst.max((rot - expected).amax());
    }
    rep.check_residual(
        "clifford.cover.half_angle",
        "ρ(exp((θ/2) e_1 e_2)) is the rotation by θ in the (e_1, e_2) plane",
        worst,
        COVER_TOL,
    );
    let minus = exp_lambda2(&CliffordElement::bivector(2, &[(1, 2, re(PI))]))?;
    let minus_one = CliffordElement::scalar(2, re(-1.0));
    rep.check_residual(
        "clifford.cover.exp_pi",
        "exp(π e_1 e_2) = -1",
        minus.max_abs_diff(&minus_one),
        COVER_TOL,
    );
    let rho = rotation_of(&minus_one)?;
    rep.check_residual(
        "clifford.cover.kernel",
        "ρ(-1) = I, so -1 and 1 cover the same rotation",
        (rho - DMatrix::<f64>::identity(2, 2)).amax(),
        COVER_TOL,
    );
    Ok(rep)
}

/// Lift of the diagonal torus, characters and grading for each rank.
pub fn spinrep_suite(cfg: &SuiteConfig) -> Result<ValidationReport> {
    nonempty(&cfg.spin_ranks, "spin_ranks")?;
    for &r in &cfg.spin_ranks {
        require(
            (1..=MAX_GAMMA_DIM / 2).contains(&r),
            "r",
            format!("rank {r} outside 1..={}", MAX_GAMMA_DIM / 2),
        )?;
    }
    require(cfg.spin_samples > 0, "samples", "need at least one sample")?;
    let mut rep = ValidationReport::new("spinrep");
    rep.set_config("spinrep.seed", cfg.seed);
    let mut rng = suite_rng(cfg.seed, 3);
    for &r in &cfg.spin_ranks {
        rep.absorb(verify_lift(r, cfg.spin_samples, &mut rng))?;
        rep.absorb(grading_check(r, cfg.spin_samples, &mut rng))?;
    }
    Ok(rep)
}

/// Exact rational identities among the characteristic series.
pub fn series_suite(cfg: &SuiteConfig) -> Result<ValidationReport> {
    let order = cfg.series_order;
    require(
        order <= series::MAX_ORDER,
        "order",
        format!("order {order} exceeds {}", series::MAX_ORDER),
    )?;
    for &r in &cfg.kappa_ranks {
        require((1..=4).contains(&r), "r", format!("rank {r} outside 1..=4"))?;
        require(
            order >= r + 2,
            "order",
            format!("order {order} is below r + 2 = {}", r + 2),
        )?;
    }
    for &(a, b) in &cfg.todd_pairs {
        require(
            a >= 1 && b >= 1 && a + b <= 4,
            "r",
            format!("pair ({a}, {b}) outside the supported ranks"),
        )?;
    }
    let mut rep = ValidationReport::new("series");
    rep.set_config("series.order", order);
    rep.set_config("series.arithmetic", "rational");
    for &(a, b) in &cfg.todd_pairs {
        rep.absorb(verify_todd_multiplicative::<BigRational>(a, b, order))?;
    }
    for &r in &cfg.kappa_ranks {
        rep.absorb(verify_kappa_identity::<BigRational>(r, order))?;
        rep.absorb(verify_t_class_leading::<BigRational>(r, order))?;
    }
    Ok(rep)
}

fn check_nodes(nodes: (usize, usize)) -> Result<()> {
    require(nodes.0 > 0 && nodes.1 > 0, "nodes", "node counts must be positive")
}

/// Integrals of the top Chern character of the spinor bundles on `S^2` and
/// `S^4`, with a refinement table for each.
pub fn chern_suite(cfg: &SuiteConfig) -> Result<ValidationReport> {
    check_nodes(cfg.chern_r1_nodes)?;
    check_nodes(cfg.chern_r2_nodes)?;
    require(
        cfg.chern_levels.len() >= 2,
        "levels",
        "need at least two refinement levels",
    )?;
    for &l in &cfg.chern_levels {
        check_nodes(l)?;
    }
    let mut rep = ValidationReport::new("chern");
    rep.set_config("chern.r1.tolerance", CHERN_R1_TOL);
    rep.set_config("chern.r2.tolerance", CHERN_R2_TOL);
    rep.set_config("chern.convergence_floor", CONVERGENCE_FLOOR);
    rep.set_config("chern.r1.nodes", json!([cfg.chern_r1_nodes.0, cfg.chern_r1_nodes.1]));
    rep.set_config("chern.r2.nodes", json!([cfg.chern_r2_nodes.0, cfg.chern_r2_nodes.1]));
    rep.set_config("chern.levels", json!(cfg.chern_levels));

    let rule1 = QuadratureRule::product(1, cfg.chern_r1_nodes.0, cfg.chern_r1_nodes.1)?;
    let rule2 = QuadratureRule::product(2, cfg.chern_r2_nodes.0, cfg.chern_r2_nodes.1)?;
    let cases = [
        (
            "chern.r1.spinor",
            "∫ ch(S⁺) over S^2 = -1",
            1,
            &rule1,
            false,
            -1.0,
            CHERN_R1_TOL,
        ),
        (
            "chern.r1.dual",
            "∫ ch of the dual of S⁺ over S^2 = +1",
            1,
            &rule1,
            true,
            1.0,
            CHERN_R1_TOL,
        ),
        (
            "chern.r2.dual",
            "∫ ch of the dual of S⁺ over S^4 = +1",
            2,
            &rule2,
            true,
            1.0,
            CHERN_R2_TOL,
        ),
    ];
    for (id, desc, r, rule, dual, target, tol) in cases {
        match integrate_chern(r, rule, dual) {
            Ok(v) => {
                rep.check_residual(id, desc, (v - target).abs(), tol);
                rep.with_payload(json!({ "value": v, "rule": rule.descriptor(), "nodes": rule.len() }));
            }
            Err(e) => {
                rep.error(id, desc, &e);
            }
        }
    }
    for (id, r, dual, target) in [
        ("chern.r1.convergence", 1, false, -1.0),
        ("chern.r2.convergence", 2, true, 1.0),
    ] {
        let desc = "residuals decrease monotonically under refinement";
        match convergence_table(r, dual, &cfg.chern_levels, target) {
            Ok(rows) => {
                let ok = is_monotone_decreasing(&rows, CONVERGENCE_FLOOR);
                let last = rows.last().map(|row| row.residual);
                rep.push(id, desc, Status::from_bool(ok), last, Some(json!(rows)));
            }
            Err(e) => {
                rep.error(id, desc, &e);
            }
        }
    }
    Ok(rep)
}

/// One analytic index computation, as recorded in report payloads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexRun {
    pub model: String,
    pub q: i64,
    pub size: BTreeMap<String, Value>,
    pub ker_dim: usize,
    pub coker_dim: usize,
    pub index: i64,
    pub gap_ratio: Option<f64>,
    pub sigma_max: f64,
    pub smallest_nonzero: Option<f64>,
}

impl IndexRun {
    fn new(model: &str, q: i64, size: BTreeMap<String, Value>, r: &IndexResult) -> Self {
        Self {
            model: model.into(),
            q,
            size,
            ker_dim: r.ker_dim,
            coker_dim: r.coker_dim,
            index: r.index,
            gap_ratio: r.gap_ratio,
            sigma_max: r.sigma_max,
            smallest_nonzero: r.smallest_nonzero,
        }
    }
}

fn check_charges(cfg: &SuiteConfig) -> Result<()> {
    nonempty(&cfg.charges, "charges")
}

fn s2_truncations(cfg: &SuiteConfig, q: i64) -> std::ops::RangeInclusive<usize> {
    if let Some(l) = cfg.l_max {
        return l..=l;
    }
    let base = (q.unsigned_abs() as usize).div_ceil(2);
    base + cfg.l_max_offsets.0..=base + cfg.l_max_offsets.1
}

/// Index of the twisted Dirac operator on `S^2` for each degree and
/// truncation.
pub fn index_s2_suite(cfg: &SuiteConfig) -> Result<ValidationReport> {
    check_charges(cfg)?;
    require(
        cfg.l_max_offsets.0 <= cfg.l_max_offsets.1,
        "l_max",
        "empty truncation range",
    )?;
    for &q in &cfg.charges {
        for l in [*s2_truncations(cfg, q).start(), *s2_truncations(cfg, q).end()] {
            // surfaces out-of-range truncations as configuration errors
            dirac::sphere_spec(q, l)?;
        }
    }
    let mut rep = ValidationReport::new("index-s2");
    rep.set_config("index.rel_tol", cfg.rel_tol);
    rep.set_config("index.min_gap_ratio", MIN_GAP_RATIO);
    match cfg.l_max {
        Some(l) => rep.set_config("index_s2.l_max", l),
        None => rep.set_config(
            "index_s2.l_max_offsets",
            json!([cfg.l_max_offsets.0, cfg.l_max_offsets.1]),
        ),
    };
    for &q in &cfg.charges {
        for l_max in s2_truncations(cfg, q) {
            let id = format!("index_s2.q{q}.lmax{l_max}");
            let desc = format!("index of D on S^2 twisted by degree {q} equals {q}");
            match dirac_s2(q, l_max).and_then(|op| index_of(&op, cfg.rel_tol)) {
                Ok(r) => {
                    let size = BTreeMap::from([("l_max".to_string(), json!(l_max))]);
                    let run = IndexRun::new("s2", q, size, &r);
                    let mut ok = r.index == q;
                    if q == 1 {
                        ok &= (r.ker_dim, r.coker_dim) == (1, 0);
                    }
                    rep.push(
                        id,
                        desc,
                        Status::from_bool(ok),
                        Some((r.index - q).abs() as f64),
                        Some(json!(run)),
                    );
                }
                Err(e) => {
                    rep.error(id, desc, &e);
                }
            }
        }
    }
    Ok(rep)
}

fn lattice_configs(cfg: &SuiteConfig) -> Vec<(usize, i64, f64)> {
    let mut out = Vec::new();
    for &n in &cfg.lattice_sizes {
        for &q in &cfg.charges {
            for &m in &cfg.wilson_masses {
                out.push((n, q, m));
            }
        }
    }
    out
}

/// Index of the overlap lattice Dirac operator on `T^2` with constant flux.
pub fn index_torus_suite(cfg: &SuiteConfig) -> Result<ValidationReport> {
    check_charges(cfg)?;
    nonempty(&cfg.lattice_sizes, "lattice_sizes")?;
    nonempty(&cfg.wilson_masses, "wilson_masses")?;
    for &m in &cfg.wilson_masses {
        require(m > 0.0 && m < 2.0, "wilson_mass", format!("{m} is outside (0, 2)"))?;
    }
    for &n in &cfg.lattice_sizes {
        for &q in &cfg.charges {
            dirac::LatticeFluxField::new(n, q)?;
        }
    }
    let mut rep = ValidationReport::new("index-torus");
    rep.set_config("index.rel_tol", cfg.rel_tol);
    rep.set_config("index.min_gap_ratio", MIN_GAP_RATIO);
    rep.set_config("index_torus.chiral_tol", dirac::CHIRAL_TOL);
    rep.set_config("index_torus.min_h_gap", dirac::MIN_H_GAP);
    let configs = lattice_configs(cfg);
    let results = dolbeault_torus_batch(&configs);
    for (&(n, q, m), res) in configs.iter().zip(results) {
        let id = format!("index_torus.N{n}.q{q}.m{m}");
        let desc = format!("overlap index on the {n}x{n} torus with flux {q} equals {q}");
        match res.and_then(|(op, stats)| index_of(&op, cfg.rel_tol).map(|r| (r, stats))) {
            Ok((r, stats)) => {
                let size = BTreeMap::from([("N".to_string(), json!(n)), ("wilson_mass".to_string(), json!(m))]);
                let run = IndexRun::new("torus", q, size, &r);
                let gap_ok = r.gap_ratio.is_none_or(|g| g > MIN_GAP_RATIO);
                let ok = r.index == q && gap_ok;
                let mut payload = json!(run);
                payload["stats"] = json!(stats);
                rep.push(
                    id,
                    desc,
                    Status::from_bool(ok),
                    Some((r.index - q).abs() as f64),
                    Some(payload),
                );
            }
            Err(e) => {
                rep.error(id, desc, &e);
            }
        }
    }
    Ok(rep)
}

/// Full-rank operator with one-dimensional kernel and no cokernel.
fn unit_index_operator(rng: &mut ChaCha8Rng, max_dim: usize) -> GradedOperator {
    let m = rng.random_range(0..max_dim);
    let mat = ComplexMatrix::from_fn(m, m + 1, |_, _| {
        Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    GradedOperator::from_matrix(mat)
}

/// Multiplicativity of the index under the sharp product, the kernel
/// identification, and the adjoint identity.
pub fn sharp_suite(cfg: &SuiteConfig) -> Result<ValidationReport> {
    require(cfg.sharp_pairs > 0, "pairs", "need at least one pair")?;
    require(
        (1..=MAX_SHARP_SAMPLE_DIM).contains(&cfg.sharp_max_dim),
        "dims",
        format!(
            "dimension bound {} outside 1..={MAX_SHARP_SAMPLE_DIM}",
            cfg.sharp_max_dim
        ),
    )?;
    let mut rep = ValidationReport::new("sharp");
    rep.set_config("sharp.seed", cfg.seed);
    rep.set_config("sharp.pairs", cfg.sharp_pairs);
    rep.set_config("sharp.max_dim", cfg.sharp_max_dim);
    rep.set_config("sharp.adjoint_tolerance", SHARP_ADJOINT_TOL);
    rep.set_config("index.rel_tol", cfg.rel_tol);
    let mut rng = suite_rng(cfg.seed, 8);
    let pairs: Vec<_> = (0..cfg.sharp_pairs)
        .map(|_| {
            let d1 = random_graded(&mut rng, cfg.sharp_max_dim);
            let d2 = random_graded(&mut rng, cfg.sharp_max_dim);
            let unit = unit_index_operator(&mut rng, cfg.sharp_max_dim);
            (d1, d2, unit)
        })
        .collect();
    let (mut mult_fail, mut ker_fail, mut unit_fail) = (0usize, 0usize, 0usize);
    let (mut literal, mut graded) = (0.0f64, 0.0f64);
    let mut first_error: Option<Error> = None;
    for (d1, d2, unit) in &pairs {
        let run = || -> Result<(bool, bool, bool, f64, f64)> {
            let i1 = index_of(d1, cfg.rel_tol)?;
            let i2 = index_of(d2, cfg.rel_tol)?;
            let is = index_of(&sharp(d1, d2)?, cfg.rel_tol)?;
            let mult = is.index == i1.index * i2.index;
            let ker = is.ker_dim == i1.ker_dim * i2.ker_dim + i1.coker_dim * i2.coker_dim;
            let iu = index_of(unit, cfg.rel_tol)?;
            let su = index_of(&sharp(d1, unit)?, cfg.rel_tol)?;
            let unit_ok = (iu.ker_dim, iu.coker_dim) == (1, 0) && su.ker_dim == i1.ker_dim;
            let adj = sharp_adjoint_residuals(d1, d2)?;
            Ok((mult, ker, unit_ok, adj.literal, adj.graded))
        };
        match run() {
            Ok((mult, ker, unit_ok, lit, gr)) => {
                mult_fail += usize::from(!mult);
                ker_fail += usize::from(!ker);
                unit_fail += usize::from(!unit_ok);
                literal = literal.max(lit);
                graded = graded.max(gr);
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    if let Some(e) = first_error {
        rep.error("sharp.evaluation", "index computations on the sampled pairs", &e);
    }
    rep.push(
        "sharp.multiplicative",
        "index(D1 # D2) = index(D1) index(D2)",
        Status::from_bool(mult_fail == 0),
        Some(mult_fail as f64),
        Some(json!({ "failures": mult_fail })),
    );
    rep.push(
        "sharp.kernel_decomposition",
        "ker(D1 # D2)⁺ = ker D1 ⊗ ker D2 ⊕ coker D1 ⊗ coker D2 in dimension",
        Status::from_bool(ker_fail == 0),
        Some(ker_fail as f64),
        Some(json!({ "failures": ker_fail })),
    );
    rep.push(
        "sharp.kernel_identification",
        "ker D2⁺ = 1, coker D2⁺ = 0 implies dim ker(D1 # D2)⁺ = dim ker D1⁺",
        Status::from_bool(unit_fail == 0),
        Some(unit_fail as f64),
        Some(json!({ "failures": unit_fail })),
    );
    rep.check_residual(
        "sharp.adjoint",
        "(D1 # D2)* = L (-(D1* # D2)) R with the grading signs L = diag(1, -1), R = diag(-1, 1)",
        graded,
        SHARP_ADJOINT_TOL,
    );
    rep.with_payload(json!({
        "literal_residual": literal,
        "note": "without the grading signs the identity fails whenever D1 is nonzero",
    }));
    Ok(rep)
}

fn winding_payload(t: &ClutchTriple, w: &clutch::Winding) -> Value {
    json!({
        "triple": t.label(),
        "rank": t.rank(),
        "c1": w.c1,
        "samples_used": w.samples_used,
        "refinements": w.refinements,
    })
}

/// Chern numbers of clutched bundles on `S^2`, their agreement with the
/// quadrature, stable classification, and the Thom clutching identity.
pub fn clutch_suite(cfg: &SuiteConfig) -> Result<ValidationReport> {
    nonempty(&cfg.clutch_powers, "clutch_powers")?;
    require(
        cfg.equator_samples >= 3,
        "samples",
        "need at least three equator samples",
    )?;
    check_nodes(cfg.chern_r1_nodes)?;
    for (t, e) in [cfg.thom_n2, cfg.thom_n4] {
        require(
            t >= 2 && e >= 1,
            "thom",
            "need at least two θ samples and one equator sample",
        )?;
    }
    let mut rep = ValidationReport::new("clutch");
    rep.set_config("clutch.equator_samples", cfg.equator_samples);
    rep.set_config("clutch.singular_tol", clutch::SINGULAR_TOL);
    rep.set_config("clutch.max_phase_step", clutch::MAX_PHASE_STEP);
    rep.set_config("clutch.max_refinements", clutch::MAX_REFINEMENTS);
    rep.set_config("clutch.orientation", "counterclockwise in (v1, v2)");

    let beta_dual = ClutchTriple::dirac_symbol(2)?.with_samples(cfg.equator_samples);
    let beta = beta_dual.conjugate();
    let rule = QuadratureRule::product(1, cfg.chern_r1_nodes.0, cfg.chern_r1_nodes.1)?;
    for (id, desc, t, expected, dual) in [
        (
            "clutch.dirac_symbol",
            "Dirac-symbol triple on S^2 has c1 = -1",
            &beta_dual,
            -1,
            false,
        ),
        ("clutch.dual", "dual triple on S^2 has c1 = +1", &beta, 1, true),
    ] {
        match chern_number_s2(t) {
            Ok(w) => {
                rep.push(
                    id,
                    desc,
                    Status::from_bool(w.c1 == expected),
                    None,
                    Some(winding_payload(t, &w)),
                );
                let integral = integrate_chern(1, &rule, dual)?;
                rep.push(
                    format!("{id}.matches_quadrature"),
                    "c1 equals the rounded Chern character integral",
                    Status::from_bool(integral.round() as i64 == w.c1),
                    Some((integral - w.c1 as f64).abs()),
                    Some(json!({ "integral": integral })),
                );
            }
            Err(e) => {
                rep.error(id, desc, &e);
            }
        }
    }

    for &k in &cfg.clutch_powers {
        let t = ClutchTriple::scalar_power(k).with_samples(cfg.equator_samples);
        let id = format!("clutch.power{k}");
        let desc = format!("(v1 + i v2)^{k} winds {k} times, c1 = {}", -k);
        match chern_number_s2(&t) {
            Ok(w) => {
                let ok = w.winding == i64::from(k) && w.c1 == -i64::from(k);
                rep.push(id, desc, Status::from_bool(ok), None, Some(winding_payload(&t, &w)));
            }
            Err(e) => {
                rep.error(id, desc, &e);
            }
        }
    }

    let stable = || -> Result<(bool, bool, bool)> {
        let trivial = stable_invariants(&ClutchTriple::trivial(2))?;
        let sum = stable_invariants(&beta.direct_sum(&beta_dual)?)?;
        let padded = stable_invariants(&beta.direct_sum(&ClutchTriple::trivial(1))?)?;
        let b = stable_invariants(&beta)?;
        let perturbed = stable_invariants(&beta.perturbed(0.1))?;
        Ok((
            sum.stably_equivalent(&trivial) && sum.rank == 2,
            padded.stably_equivalent(&b) && padded.rank == 2,
            perturbed == b,
        ))
    };
    match stable() {
        Ok((sum, padded, perturbed)) => {
            rep.check_bool("clutch.stable.sum_with_dual", "β ⊕ β* is stably trivial", sum);
            rep.check_bool(
                "clutch.stable.trivial_summand",
                "β ⊕ 1 is stably equivalent to β",
                padded,
            );
            rep.check_bool(
                "clutch.stable.perturbation",
                "small perturbations keep (rank, c1)",
                perturbed,
            );
        }
        Err(e) => {
            rep.error("clutch.stable", "stable classification", &e);
        }
    }

    rep.absorb(verify_thom_clutch(2, cfg.thom_n2.0, cfg.thom_n2.1))?;
    rep.absorb(verify_thom_clutch(4, cfg.thom_n4.0, cfg.thom_n4.1))?;
    Ok(rep)
}

/// Topological index `(ch(L) Td)[M]` of a degree-`q` line bundle on a
/// surface with Euler number `euler`, with `Td` the class of the spin
/// structure and `c1(L)` read off the clutching function `(v1 - i v2)^q`.
fn topological_index(q: i64, euler: i64, samples: usize) -> Result<i64> {
    let k = i32::try_from(-q).map_err(|_| invalid("q", "degree out of range"))?;
    let c1 = chern_number_s2(&ClutchTriple::scalar_power(k).with_samples(samples))?.c1;
    let td = a_hat_series::<BigRational>(1, 2)?;
    let td0 = td.constant_term();
    let td1 = td.coefficient(&[0, 1]);
    let value = td0 * BigRational::from_integer(c1.into()) + td1 * BigRational::from_integer(euler.into());
    if !value.is_integer() {
        return Err(invalid("td", format!("non-integral topological index {value}")));
    }
    value
        .to_integer()
        .to_i64()
        .ok_or_else(|| invalid("q", "topological index out of range"))
}

fn runs_of(rep: &ValidationReport) -> Vec<IndexRun> {
    rep.checks
        .iter()
        .filter_map(|c| c.payload.clone())
        .filter_map(|p| serde_json::from_value::<IndexRun>(p).ok())
        .collect()
}

/// Analytic indices from the `S^2` and `T^2` reports against the
/// topological side from clutching invariants and the Todd class.
pub fn index_theorem_suite(
    cfg: &SuiteConfig,
    s2: &ValidationReport,
    torus: &ValidationReport,
) -> Result<ValidationReport> {
    check_charges(cfg)?;
    let mut rep = ValidationReport::new("index-theorem");
    rep.set_config("theorem.todd", "Â of the spin structure");
    let s2_runs = runs_of(s2);
    let torus_runs = runs_of(torus);
    for &q in &cfg.charges {
        for (model, euler, runs) in [("s2", 2, &s2_runs), ("torus", 0, &torus_runs)] {
            let id = format!("theorem.{model}.q{q}");
            let desc = format!("analytic index equals (ch(L) Td)[M] for degree {q}");
            match topological_index(q, euler, cfg.equator_samples) {
                Ok(top) => {
                    let analytic: Vec<i64> = runs.iter().filter(|r| r.q == q).map(|r| r.index).collect();
                    let ok = !analytic.is_empty() && analytic.iter().all(|&a| a == top);
                    rep.push(
                        id,
                        desc,
                        Status::from_bool(ok),
                        None,
                        Some(json!({ "topological": top, "analytic": analytic })),
                    );
                }
                Err(e) => {
                    rep.error(id, desc, &e);
                }
            }
        }
    }
    Ok(rep)
}

/// Runs one suite by name. `index-theorem` runs its two input suites first.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<ValidationReport> {
    match name {
        "gamma" => gamma_suite(cfg),
        "clifford" => clifford_suite(cfg),
        "spinrep" => spinrep_suite(cfg),
        "series" => series_suite(cfg),
        "chern" => chern_suite(cfg),
        "index-s2" => index_s2_suite(cfg),
        "index-torus" => index_torus_suite(cfg),
        "sharp" => sharp_suite(cfg),
        "clutch" => clutch_suite(cfg),
        "index-theorem" => {
            let s2 = index_s2_suite(cfg)?;
            let torus = index_torus_suite(cfg)?;
            index_theorem_suite(cfg, &s2, &torus)
        }
        other => Err(invalid("suite", format!("unknown suite `{other}`"))),
    }
}

/// Every suite in [`SUITE_NAMES`] order, independent suites concurrently,
/// followed by the assembled index theorem. The result does not depend on
/// the number of threads.
pub fn run_all(cfg: &SuiteConfig) -> Result<Vec<ValidationReport>> {
    let independent = &SUITE_NAMES[..SUITE_NAMES.len() - 1];
    let mut reports: Vec<ValidationReport> = independent
        .par_iter()
        .map(|name| run_suite(name, cfg))
        .collect::<Result<_>>()?;
    let find = |name: &str| reports.iter().find(|r| r.suite == name).expect("suite ran");
    let theorem = index_theorem_suite(cfg, find("index-s2"), find("index-torus"))?;
    reports.push(theorem);
    Ok(reports)
}

/// The merged report of [`run_all`] with the seed echoed.
pub fn run_all_merged(cfg: &SuiteConfig) -> Result<ValidationReport> {
    let mut merged = merge(&run_all(cfg)?)?;
    merged.set_config("seed", cfg.seed);
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig {
            gamma_dims: vec![1, 2, 3, 4, 5],
            symbol_samples: 10,
            spin_ranks: vec![1, 2],
            spin_samples: 10,
            series_order: 4,
            kappa_ranks: vec![1, 2],
            todd_pairs: vec![(1, 1)],
            chern_r1_nodes: (32, 64),
            chern_r2_nodes: (12, 24),
            lattice_sizes: vec![6],
            wilson_masses: vec![1.0],
            charges: vec![-1, 0, 1],
            sharp_pairs: 20,
            clutch_powers: vec![-2, 2],
            thom_n2: (4, 8),
            thom_n4: (3, 4),
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn displayed_matrices_parse_to_the_built_generators() {
        for (k, displayed) in DISPLAYED_GAMMAS.iter().enumerate() {
            let g = build_gamma::<i64>(k + 1).unwrap();
            for (j, rows) in displayed.iter().enumerate() {
                assert!(displayed_matrix(rows) == *g.e(j + 1), "n={} j={}", k + 1, j + 1);
            }
        }
    }

    #[test]
    fn a_wrong_displayed_entry_is_detected() {
        let wrong = displayed_matrix(&["0 i", "-i 0"]);
        assert!(wrong != *build_gamma::<i64>(2).unwrap().e(1));
    }

    #[test]
    fn small_suites_pass() {
        let cfg = small();
        for name in SUITE_NAMES {
            let rep = run_suite(name, &cfg).unwrap();
            assert!(rep.passed(), "{}", rep.render_text());
        }
    }

    #[test]
    fn configuration_errors_are_errors() {
        let cfg = SuiteConfig {
            gamma_dims: vec![0],
            ..small()
        };
        assert!(gamma_suite(&cfg).is_err());
        let cfg = SuiteConfig {
            wilson_masses: vec![2.5],
            ..small()
        };
        assert!(index_torus_suite(&cfg).is_err());
        assert!(run_suite("nope", &small()).is_err());
    }

    #[test]
    fn theorem_fails_without_analytic_runs() {
        let cfg = small();
        let rep = index_theorem_suite(&cfg, &ValidationReport::new("a"), &ValidationReport::new("b")).unwrap();
        assert!(!rep.passed());
    }

    #[test]
    fn topological_side_is_the_degree() {
        for q in -3..=3 {
            assert_eq!(topological_index(q, 2, 64).unwrap(), q);
            assert_eq!(topological_index(q, 0, 64).unwrap(), q);
        }
    }

    #[test]
    fn merged_run_is_deterministic_and_thread_independent() {
        let cfg = small();
        let a = run_all_merged(&cfg).unwrap().to_json_pretty();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| run_all_merged(&cfg)).unwrap().to_json_pretty();
        assert_eq!(a, b);
    }
}
