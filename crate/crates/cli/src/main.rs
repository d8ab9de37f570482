use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod error;

use error::CliError;

/// Zeros of polynomials, Jensen polynomials and polynomial sequences.
#[derive(Debug, Parser)]
#[command(name = "polya-zeros", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Output {
    /// Write the primary JSON output here instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Zeros of a polynomial file.
    Roots {
        input: PathBuf,
        #[arg(long, default_value_t = polya_zeros::rootfind::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = polya_zeros::rootfind::DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[arg(long, default_value_t = polya_zeros::rootfind::DEFAULT_CLUSTER_EPS)]
        cluster_eps: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Reciprocal power sums s_1..s_K of the zeros.
    Sums {
        input: PathBuf,
        #[arg(long, short = 'k', default_value_t = 8)]
        k: usize,
        /// Sum over computed zeros in this region instead of using the
        /// coefficients (H, R, RHP, S:c, S:c^1/p, D:r, ray, C, !X).
        #[arg(long)]
        region: Option<String>,
        /// Also check the sector sum inequalities with this c > 1.
        #[arg(long)]
        sector_c: Option<f64>,
        /// Root order for --sector-c.
        #[arg(long, default_value_t = 1)]
        p: u32,
        /// Write `k,re,im,s_tilde` rows here.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Jensen polynomial J(f,n) of a series file.
    Jensen {
        input: PathBuf,
        #[arg(long, short)]
        n: usize,
        /// Emit J(f,n)(z/n) instead.
        #[arg(long)]
        scale_by_n: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Appell polynomial A(f,n) of a series file.
    Appell {
        input: PathBuf,
        #[arg(long, short)]
        n: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Class membership test up to a finite depth.
    Classify {
        input: PathBuf,
        /// po, lp, lp* or lps0*.
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = 20)]
        nmax: usize,
        #[arg(long, default_value_t = polya_zeros::regions::DEFAULT_REGION_TOL)]
        tol: f64,
        #[arg(long, default_value_t = polya_zeros::classify::DEFAULT_PLATEAU_LEN)]
        plateau: usize,
        /// Write `n,N_n` rows here.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Convergence probes and theorem harnesses for polynomial sequences.
    Converge(ConvergeArgs),
    /// Even powers placing points in the closed right half plane.
    Cover {
        /// Points as `re,im;re,im;...`; runs the single search.
        #[arg(long, allow_hyphen_values = true)]
        points: Option<String>,
        /// Points per random tuple for the covering search.
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 256)]
        q_max: u32,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Estimate the factor constant c_p, optionally checking the growth bound.
    Cp {
        #[arg(long, short, default_value_t = 2)]
        p: u32,
        #[arg(long, default_value_t = 601)]
        radial: usize,
        #[arg(long, default_value_t = 720)]
        angular: usize,
        #[arg(long, default_value_t = 1e-3)]
        r_min: f64,
        #[arg(long, default_value_t = 1e3)]
        r_max: f64,
        /// Also report the estimate on the refined grid.
        #[arg(long)]
        refine: bool,
        /// Polynomial file with p(0) = 1 to check the growth bound on.
        #[arg(long)]
        check: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
struct ConvergeArgs {
    /// Builtin generator: jensen-of-exp, jensen-of-cos, binom, monomial,
    /// h-random, real-with-k-nonreal, sector-random.
    #[arg(long, conflicts_with = "files", required_unless_present = "files")]
    gen: Option<String>,
    /// Glob of polynomial files forming f_1, f_2, ... in natural name order.
    #[arg(long)]
    files: Option<String>,
    /// T1.1, T1.2, T2.3 or T2.4.
    #[arg(long)]
    theorem: Option<String>,
    /// Comma-separated circle radii.
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    radii: Vec<f64>,
    /// Index pairs as `n:m,n:m,...`; dyadic by default.
    #[arg(long, value_delimiter = ',')]
    pairs: Option<Vec<String>>,
    #[arg(long, default_value_t = polya_zeros::convergence::DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Non-real zero count of real-with-k-nonreal.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Sector opening of sector-random.
    #[arg(long, default_value_t = 2.0)]
    c: f64,
    /// Exponent p for sector-random, T2.3 and T2.4.
    #[arg(long, default_value_t = 1)]
    p: u32,
    /// Bound M on s~_p for T2.3.
    #[arg(long)]
    m_bound: Option<f64>,
    /// Bound on the non-real zero count for T1.2.
    #[arg(long)]
    nonreal_bound: Option<usize>,
    #[arg(long, default_value_t = polya_zeros::convergence::DEFAULT_K_MAX)]
    k_max: usize,
    #[arg(long, default_value_t = polya_zeros::convergence::DEFAULT_EPS)]
    eps: f64,
    /// Write a log-log SVG plot of sup error against n here.
    #[arg(long)]
    plot: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("POLYA_ZEROS_THREADS") else {
        return Ok(());
    };
    let threads: usize = value.trim().parse().map_err(|_| {
        CliError::precondition("bad_env", format!("POLYA_ZEROS_THREADS must be a count, got '{value}'"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::internal(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Roots {
            input,
            tol,
            max_iter,
            cluster_eps,
            output,
        } => commands::roots(&input, tol, max_iter, cluster_eps, output.out.as_deref()),
        Command::Sums {
            input,
            k,
            region,
            sector_c,
            p,
            csv,
            output,
        } => commands::sums(
            &input,
            k,
            region.as_deref(),
            sector_c,
            p,
            csv.as_deref(),
            output.out.as_deref(),
        ),
        Command::Jensen {
            input,
            n,
            scale_by_n,
            output,
        } => commands::jensen(&input, n, scale_by_n, output.out.as_deref()),
        Command::Appell { input, n, output } => commands::appell(&input, n, output.out.as_deref()),
        Command::Classify {
            input,
            class,
            nmax,
            tol,
            plateau,
            csv,
            output,
        } => commands::classify(
            &input,
            &class,
            nmax,
            tol,
            plateau,
            csv.as_deref(),
            output.out.as_deref(),
        ),
        Command::Converge(args) => commands::converge(args),
        Command::Cover {
            points,
            n,
            q_max,
            trials,
            seed,
            output,
        } => commands::cover(points.as_deref(), n, q_max, trials, seed, output.out.as_deref()),
        Command::Cp {
            p,
            radial,
            angular,
            r_min,
            r_max,
            refine,
            check,
            samples,
            seed,
            output,
        } => {
            let grid = polya_zeros::powersums::GridSpec {
                radial,
                angular,
                r_min,
                r_max,
            };
            commands::cp(p, grid, refine, check.as_deref(), samples, seed, output.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}
