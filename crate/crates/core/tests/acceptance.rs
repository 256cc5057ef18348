//! Acceptance suite: one line per criterion, with every tolerance pinned
//! here independently of the library constants.

use dirac_index::suites::{run_all, IndexRun, SuiteConfig};
use dirac_index::{merge, CheckRecord, Status, ValidationReport};

const SYMBOL_TOL: f64 = 1e-12;
const COVER_TOL: f64 = 1e-10;
const LIFT_TOL: f64 = 1e-10;
const CHERN_R1_TOL: f64 = 1e-8;
const CHERN_R2_TOL: f64 = 1e-6;
const THOM_TOL: f64 = 1e-10;
const MIN_GAP_RATIO: f64 = 1e3;

struct Outcome {
    passed: bool,
    detail: String,
}

fn suite<'a>(reports: &'a [ValidationReport], name: &str) -> &'a ValidationReport {
    reports
        .iter()
        .find(|r| r.suite == name)
        .unwrap_or_else(|| panic!("suite {name} missing"))
}

fn with_prefix<'a>(rep: &'a ValidationReport, prefix: &str) -> Vec<&'a CheckRecord> {
    rep.checks.iter().filter(|c| c.id.starts_with(prefix)).collect()
}

fn all_pass(checks: &[&CheckRecord]) -> bool {
    !checks.is_empty() && checks.iter().all(|c| c.status == Status::Pass)
}

/// Every recorded residual is within `tol`, and at least one was recorded.
fn within(checks: &[&CheckRecord], tol: f64) -> bool {
    checks.iter().any(|c| c.residual.is_some()) && checks.iter().all(|c| c.residual.is_none_or(|r| r <= tol))
}

fn max_residual(checks: &[&CheckRecord]) -> f64 {
    checks.iter().filter_map(|c| c.residual).fold(0.0, f64::max)
}

fn runs(rep: &ValidationReport) -> Vec<IndexRun> {
    rep.checks
        .iter()
        .filter_map(|c| c.payload.clone())
        .map(|p| serde_json::from_value(p).expect("index run payload"))
        .collect()
}

fn gamma_identities(reports: &[ValidationReport]) -> Outcome {
    let rep = suite(reports, "gamma");
    let mut ok = true;
    for n in 1..=12 {
        let checks = with_prefix(rep, &format!("gamma.n{n}."));
        let exact = checks
            .iter()
            .filter(|c| c.residual.is_some())
            .all(|c| c.residual == Some(0.0));
        let product = if n % 2 == 0 { "grading_product" } else { "odd_product" };
        let has_product = checks.iter().any(|c| c.id.ends_with(product));
        ok &= all_pass(&checks) && exact && has_product;
    }
    let displayed = (1..=4).all(|n| {
        rep.get(&format!("gamma.n{n}.displayed"))
            .is_some_and(|c| c.status == Status::Pass)
    });
    Outcome {
        passed: ok && displayed && rep.passed(),
        detail: format!(
            "n = 1..12 exact, printed matrices n = 1..4 {}",
            if displayed { "match" } else { "differ" }
        ),
    }
}

fn symbol_laplacian(reports: &[ValidationReport]) -> Outcome {
    let rep = suite(reports, "clifford");
    let checks = with_prefix(rep, "clifford.symbol.");
    let dims = [2, 4, 6]
        .iter()
        .all(|n| rep.get(&format!("clifford.symbol.n{n}")).is_some());
    let samples = rep.config.get("clifford.symbol.samples").and_then(|v| v.as_u64()) == Some(100);
    Outcome {
        passed: dims && samples && all_pass(&checks) && within(&checks, SYMBOL_TOL),
        detail: format!("max residual {:.2e} < {SYMBOL_TOL:e}", max_residual(&checks)),
    }
}

fn double_cover(reports: &[ValidationReport]) -> Outcome {
    let rep = suite(reports, "clifford");
    let checks = with_prefix(rep, "clifford.cover.");
    let grid = rep.config.get("clifford.cover.grid").and_then(|v| v.as_u64()) == Some(16);
    Outcome {
        passed: checks.len() == 3 && grid && all_pass(&checks) && within(&checks, COVER_TOL),
        detail: format!(
            "16-point θ grid, exp(π e1e2) = -1, ρ(-1) = I, max residual {:.2e}",
            max_residual(&checks)
        ),
    }
}

fn lift_and_characters(reports: &[ValidationReport]) -> Outcome {
    let rep = suite(reports, "spinrep");
    let mut ok = rep.passed();
    for r in 1..=3 {
        for key in ["closed_form", "character", "homomorphism", "covering"] {
            ok &= rep
                .get(&format!("spinrep.lift.r{r}.{key}"))
                .is_some_and(|c| c.status == Status::Pass);
        }
        for key in ["supercharacter", "lift_of_minus_identity"] {
            ok &= rep
                .get(&format!("spinrep.grading.r{r}.{key}"))
                .is_some_and(|c| c.status == Status::Pass);
        }
        ok &= rep
            .config
            .get(&format!("spinrep.lift.r{r}.samples"))
            .and_then(|v| v.as_u64())
            == Some(100);
    }
    let checks: Vec<&CheckRecord> = rep.checks.iter().collect();
    ok &= within(&checks, LIFT_TOL);
    Outcome {
        passed: ok,
        detail: format!("r = 1, 2, 3, 100 samples, max residual {:.2e}", max_residual(&checks)),
    }
}

fn chern_quadrature(reports: &[ValidationReport]) -> Outcome {
    let rep = suite(reports, "chern");
    let res = |id: &str| rep.get(id).and_then(|c| c.residual).unwrap_or(f64::INFINITY);
    let (a, b, c) = (res("chern.r1.spinor"), res("chern.r1.dual"), res("chern.r2.dual"));
    let tables = ["chern.r1.convergence", "chern.r2.convergence"].iter().all(|id| {
        rep.get(id).is_some_and(|c| {
            c.status == Status::Pass
                && c.payload
                    .as_ref()
                    .and_then(|p| p.as_array())
                    .is_some_and(|rows| rows.len() >= 3)
        })
    });
    Outcome {
        passed: a <= CHERN_R1_TOL && b <= CHERN_R1_TOL && c <= CHERN_R2_TOL && tables && rep.passed(),
        detail: format!("|I+1| = {a:.2e}, |I*-1| = {b:.2e}, |I*(S^4)-1| = {c:.2e}, monotone tables {tables}"),
    }
}

fn series_identities(reports: &[ValidationReport]) -> Outcome {
    let rep = suite(reports, "series");
    let mut ok = rep.passed() && !with_prefix(rep, "series.todd.").is_empty();
    for r in 1..=3 {
        ok &= all_pass(&with_prefix(rep, &format!("series.kappa.r{r}.order6.")));
        ok &= rep
            .get(&format!("series.tclass.r{r}.leading_term"))
            .is_some_and(|c| c.status == Status::Pass);
    }
    let exact = rep.checks.iter().all(|c| c.residual.is_none_or(|r| r == 0.0));
    Outcome {
        passed: ok && exact,
        detail: "rational arithmetic, order 6, Todd, κ·Td = χ for r = 1..3, t-class".into(),
    }
}

fn index_s2(reports: &[ValidationReport]) -> Outcome {
    let rep = suite(reports, "index-s2");
    let all = runs(rep);
    let mut ok = rep.passed();
    for q in -3i64..=3 {
        let base = (q.unsigned_abs() as usize).div_ceil(2);
        for l in base + 4..=base + 12 {
            ok &= all.iter().any(|r| r.q == q && r.size["l_max"] == l && r.index == q);
        }
    }
    ok &= all.iter().all(|r| r.index == r.q);
    let q1 = all
        .iter()
        .filter(|r| r.q == 1)
        .all(|r| (r.ker_dim, r.coker_dim) == (1, 0));
    Outcome {
        passed: ok && q1,
        detail: format!("{} runs, index = q, q = 1 gives (ker, coker) = (1, 0): {q1}", all.len()),
    }
}

fn index_torus(reports: &[ValidationReport]) -> Outcome {
    let rep = suite(reports, "index-torus");
    let all = runs(rep);
    let mut ok = rep.passed() && all.len() == 63;
    for r in &all {
        ok &= r.index == r.q && r.gap_ratio.is_none_or(|g| g > MIN_GAP_RATIO);
    }
    let worst = all
        .iter()
        .filter_map(|r| r.smallest_nonzero.map(|s| s / r.sigma_max))
        .fold(f64::INFINITY, f64::min);
    Outcome {
        passed: ok,
        detail: format!(
            "{} runs over N, q, m0; smallest relative nonzero singular value {worst:.2e}",
            all.len()
        ),
    }
}

fn sharp_product(reports: &[ValidationReport]) -> Outcome {
    let rep = suite(reports, "sharp");
    let pass = |id: &str| rep.get(id).is_some_and(|c| c.status == Status::Pass);
    let mult = pass("sharp.multiplicative") && pass("sharp.kernel_identification");
    let adjoint = pass("sharp.adjoint");
    let pairs = rep.config.get("sharp.pairs").and_then(|v| v.as_u64()) == Some(200);
    Outcome {
        passed: mult && pairs && rep.passed(),
        detail: format!("200 pairs, multiplicativity and kernel {mult}, graded adjoint identity {adjoint}"),
    }
}

fn clutching(reports: &[ValidationReport]) -> Outcome {
    let rep = suite(reports, "clutch");
    let pass = |id: &str| rep.get(id).is_some_and(|c| c.status == Status::Pass);
    let c1 = |id: &str| {
        rep.get(id)
            .and_then(|c| c.payload.as_ref())
            .and_then(|p| p["c1"].as_i64())
    };
    let anchors = c1("clutch.dirac_symbol") == Some(-1)
        && c1("clutch.dual") == Some(1)
        && pass("clutch.dirac_symbol.matches_quadrature")
        && pass("clutch.dual.matches_quadrature");
    let powers = (-4..=4).all(|k| c1(&format!("clutch.power{k}")) == Some(-k));
    let thom: Vec<&CheckRecord> = with_prefix(rep, "clutch.thom.");
    let thom_ok = [2, 4]
        .iter()
        .all(|n| !with_prefix(rep, &format!("clutch.thom.n{n}.")).is_empty())
        && all_pass(&thom)
        && within(&thom, THOM_TOL);
    Outcome {
        passed: anchors && powers && thom_ok && rep.passed(),
        detail: format!(
            "β* → -1, β → +1, powers k = -4..4, Thom max residual {:.2e}",
            max_residual(&thom)
        ),
    }
}

fn index_theorem(reports: &[ValidationReport]) -> Outcome {
    let rep = suite(reports, "index-theorem");
    let mut ok = rep.passed();
    for q in -3i64..=3 {
        for model in ["s2", "torus"] {
            ok &= rep.get(&format!("theorem.{model}.q{q}")).is_some_and(|c| {
                let p = c.payload.as_ref().expect("payload");
                p["topological"].as_i64() == Some(q)
                    && p["analytic"]
                        .as_array()
                        .is_some_and(|a| !a.is_empty() && a.iter().all(|v| v.as_i64() == Some(q)))
            });
        }
    }
    Outcome {
        passed: ok,
        detail: "analytic index on S^2 and T^2 equals (ch(L) Td)[M] = q for q = -3..3".into(),
    }
}

fn serialized(reports: &[ValidationReport], seed: u64) -> String {
    let mut merged = merge(reports).expect("distinct suites");
    merged.set_config("seed", seed);
    merged.to_json_pretty()
}

#[test]
fn acceptance() {
    let cfg = SuiteConfig::default();
    assert_eq!(cfg.seed, 42);
    let reports = run_all(&cfg).expect("default configuration is valid");
    let first = serialized(&reports, cfg.seed);
    let second = serialized(&run_all(&cfg).expect("valid"), cfg.seed);
    let determinism = Outcome {
        passed: first == second,
        detail: format!("two runs with seed 42, {} bytes each", first.len()),
    };

    let outcomes = [
        ("gamma identities", gamma_identities(&reports)),
        ("symbol squares to the Laplacian", symbol_laplacian(&reports)),
        ("double cover", double_cover(&reports)),
        ("lift and characters", lift_and_characters(&reports)),
        ("Chern quadrature", chern_quadrature(&reports)),
        ("series identities", series_identities(&reports)),
        ("index on S^2", index_s2(&reports)),
        ("index on T^2", index_torus(&reports)),
        ("sharp product", sharp_product(&reports)),
        ("clutching", clutching(&reports)),
        ("index theorem assembled", index_theorem(&reports)),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (k, (name, o)) in outcomes.iter().enumerate() {
        let label = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {:2} [{label}] {name}: {}", k + 1, o.detail);
        if !o.passed {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
