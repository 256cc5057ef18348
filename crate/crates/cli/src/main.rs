use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};

use dirac_index::suites::{self, SuiteConfig};
use dirac_index::{merge, Error, ValidationReport};

/// Directory for reports when `--output` is not given.
const OUT_DIR_ENV: &str = "DIRAC_INDEX_OUT_DIR";

#[derive(Parser)]
#[command(name = "dirac-index")]
#[command(about = "Machine-checked identities of the Dirac index theorem at desk scale")]
#[command(version)]
struct Cli {
    /// Seed for every randomized check
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Report file; defaults to stdout, or to `$DIRAC_INDEX_OUT_DIR/<suite>.<ext>`
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Omit wall-clock fields so that reports are byte-reproducible
    #[arg(long, global = true)]
    no_timestamp: bool,

    /// Number of suites run concurrently
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Text => "txt",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact gamma-matrix identities and the printed low-dimensional matrices
    Gamma {
        /// Dimensions to check
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
    },
    /// Symbol squared equals the Laplacian; the double cover Spin(n) → SO(n)
    Clifford {
        /// Dimensions for the symbol identity
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        /// Random covectors per dimension
        #[arg(long)]
        samples: Option<usize>,
        /// Points of the rotation-angle grid
        #[arg(long)]
        cover_grid: Option<usize>,
    },
    /// Lift of the diagonal torus, spinor characters and the grading
    Spinrep {
        /// Half-dimensions r
        #[arg(long, value_delimiter = ',')]
        r: Option<Vec<usize>>,
        /// Random unitaries per rank
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Todd multiplicativity, the κ identity and the t-class, in rational arithmetic
    Series {
        /// Truncation order
        #[arg(long)]
        order: Option<usize>,
        /// Ranks for the κ identity and the t-class
        #[arg(long, value_delimiter = ',')]
        r: Option<Vec<usize>>,
    },
    /// Chern character integrals of the spinor bundles on S^2 and S^4
    Chern {
        /// Polar nodes of the S^2 rule
        #[arg(long)]
        polar_nodes: Option<usize>,
        /// Azimuth nodes of the S^2 rule
        #[arg(long)]
        azimuth_nodes: Option<usize>,
        /// Polar nodes of the S^4 rule
        #[arg(long)]
        r2_polar_nodes: Option<usize>,
        /// Azimuth nodes of the S^4 rule
        #[arg(long)]
        r2_azimuth_nodes: Option<usize>,
    },
    /// Index of the twisted Dirac operator on S^2
    #[command(name = "index-s2")]
    IndexS2 {
        /// Degrees of the twisting line bundle
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        q: Option<Vec<i64>>,
        /// Single truncation; by default a range above ceil(|q|/2) + 4
        #[arg(long)]
        l_max: Option<usize>,
        /// Relative singular-value threshold
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Index of the overlap lattice Dirac operator on T^2
    #[command(name = "index-torus")]
    IndexTorus {
        /// Lattice sizes N
        #[arg(long = "N", value_delimiter = ',')]
        lattice: Option<Vec<usize>>,
        /// Flux quanta
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        q: Option<Vec<i64>>,
        /// Wilson masses in (0, 2)
        #[arg(long, value_delimiter = ',')]
        wilson_mass: Option<Vec<f64>>,
        /// Relative singular-value threshold
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Index multiplicativity and the adjoint of the sharp product
    Sharp {
        /// Random operator pairs
        #[arg(long)]
        pairs: Option<usize>,
        /// Largest graded dimension
        #[arg(long)]
        max_dim: Option<usize>,
    },
    /// Clutching invariants on S^2 and the Thom clutching identity
    Clutch {
        /// Powers k of the scalar clutching (v1 + i v2)^k
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        k: Option<Vec<i32>>,
        /// Initial equator samples
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Every suite, then the analytic and topological indices compared
    All,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Gamma { .. } => "gamma",
            Command::Clifford { .. } => "clifford",
            Command::Spinrep { .. } => "spinrep",
            Command::Series { .. } => "series",
            Command::Chern { .. } => "chern",
            Command::IndexS2 { .. } => "index-s2",
            Command::IndexTorus { .. } => "index-torus",
            Command::Sharp { .. } => "sharp",
            Command::Clutch { .. } => "clutch",
            Command::All => "all",
        }
    }

    /// The acceptance configuration with this subcommand's flags applied.
    fn config(&self, seed: u64) -> SuiteConfig {
        let mut cfg = SuiteConfig {
            seed,
            ..SuiteConfig::default()
        };
        fn set<T: Clone>(slot: &mut T, value: &Option<T>) {
            if let Some(v) = value {
                *slot = v.clone();
            }
        }
        match self {
            Command::Gamma { n } => set(&mut cfg.gamma_dims, n),
            Command::Clifford { n, samples, cover_grid } => {
                set(&mut cfg.symbol_dims, n);
                set(&mut cfg.symbol_samples, samples);
                set(&mut cfg.cover_grid, cover_grid);
            }
            Command::Spinrep { r, samples } => {
                set(&mut cfg.spin_ranks, r);
                set(&mut cfg.spin_samples, samples);
            }
            Command::Series { order, r } => {
                set(&mut cfg.series_order, order);
                set(&mut cfg.kappa_ranks, r);
            }
            Command::Chern {
                polar_nodes,
                azimuth_nodes,
                r2_polar_nodes,
                r2_azimuth_nodes,
            } => {
                set(&mut cfg.chern_r1_nodes.0, polar_nodes);
                set(&mut cfg.chern_r1_nodes.1, azimuth_nodes);
                set(&mut cfg.chern_r2_nodes.0, r2_polar_nodes);
                set(&mut cfg.chern_r2_nodes.1, r2_azimuth_nodes);
            }
            Command::IndexS2 { q, l_max, tol } => {
                set(&mut cfg.charges, q);
                cfg.l_max = *l_max;
                set(&mut cfg.rel_tol, tol);
            }
            Command::IndexTorus {
                lattice,
                q,
                wilson_mass,
                tol,
            } => {
                set(&mut cfg.lattice_sizes, lattice);
                set(&mut cfg.charges, q);
                set(&mut cfg.wilson_masses, wilson_mass);
                set(&mut cfg.rel_tol, tol);
            }
            Command::Sharp { pairs, max_dim } => {
                set(&mut cfg.sharp_pairs, pairs);
                set(&mut cfg.sharp_max_dim, max_dim);
            }
            Command::Clutch { k, samples } => {
                set(&mut cfg.clutch_powers, k);
                set(&mut cfg.equator_samples, samples);
            }
            Command::All => {}
        }
        cfg
    }
}

fn run(cli: &Cli) -> Result<ValidationReport, Error> {
    let name = cli.command.name();
    let cfg = cli.command.config(cli.seed);
    let mut report = if name == "all" {
        merge(&suites::run_all(&cfg)?)?
    } else {
        suites::run_suite(name, &cfg)?
    };
    report.set_config("seed", cli.seed);
    Ok(report)
}

fn render(report: &ValidationReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json_pretty(),
        Format::Text => report.render_text(),
    }
}

fn destination(cli: &Cli) -> Option<PathBuf> {
    cli.output.clone().or_else(|| {
        std::env::var_os(OUT_DIR_ENV)
            .map(|dir| PathBuf::from(dir).join(format!("{}.{}", cli.command.name(), cli.format.extension())))
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli.jobs.unwrap_or_else(rayon::current_num_threads);
    if jobs == 0 {
        eprintln!("error: --jobs must be at least 1");
        return ExitCode::from(2);
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return ExitCode::from(2);
        }
    };
    let start = Instant::now();
    let mut report = match pool.install(|| run(&cli)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if !cli.no_timestamp {
        report.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        report.set_config("generated_at_unix", now);
    }
    let text = render(&report, cli.format);
    match destination(&cli) {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                if let Err(e) = fs::create_dir_all(dir) {
                    eprintln!("error: cannot create {}: {e}", dir.display());
                    return ExitCode::from(2);
                }
            }
            if let Err(e) = fs::write(&path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
            eprintln!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    let failed = report
        .checks
        .iter()
        .filter(|c| c.status != dirac_index::Status::Pass)
        .count();
    eprintln!(
        "{}: {} ({} checks, {} not passing)",
        report.suite,
        report.status().label(),
        report.checks.len(),
        failed
    );
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
