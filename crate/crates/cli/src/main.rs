//! `cubecover`: exact tools for hyperplane covers of the Boolean cube.
//!
//! JSON reports go to stdout (or `--output`), diagnostics to stderr.
//! Exit codes: 0 success or affirmative verdict, 1 negative verdict,
//! 2 input or premise error, 3 search budget exhausted.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cubecover::rat::{parse_rat, Rat};

#[derive(Parser, Debug)]
#[command(name = "cubecover", version, about = "Exact hyperplane covers of the Boolean cube")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Seed for every random draw; overrides the params file
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for parallel enumeration (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write the JSON report here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Print a one-line summary to stderr
    #[arg(long, short, global = true)]
    verbose: bool,

    /// ParamSet JSON file; missing fields take their defaults
    #[arg(long, global = true)]
    params: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check conditions E1-E3 and the sparsity law on a cover
    Verify {
        #[arg(long)]
        input: PathBuf,
        /// Largest dimension to enumerate
        #[arg(long, default_value_t = cubecover::cube::DEFAULT_GUARD)]
        guard: usize,
    },
    /// Lower and upper bounds on the essential cover size
    Bounds {
        #[arg(long)]
        n: usize,
    },
    /// Exact minimum essential cover size by exhaustive search
    Oracle {
        #[arg(long)]
        n: usize,
        /// Search nodes before giving up
        #[arg(long, default_value_t = cubecover::constructors::DEFAULT_SEARCH_BUDGET)]
        budget: u64,
    },
    /// Four-way decomposition of the normal matrix with its check report
    Decompose {
        #[arg(long)]
        input: PathBuf,
    },
    /// Flip-ascent solution of a Bang instance
    Bang {
        #[arg(long)]
        input: PathBuf,
    },
    /// Search for a vertex on no plane of the cover
    FindUncovered {
        #[arg(long)]
        input: PathBuf,
        /// Enumerate the cube when the phases fail
        #[arg(long)]
        fallback_exhaustive: bool,
    },
    /// Anti-concentration experiments
    Experiment {
        #[command(subcommand)]
        kind: Experiment,
    },
}

#[derive(Subcommand, Debug)]
enum Experiment {
    /// Littlewood-Offord bound: a single vector or a sweep over {-3..3}\{0}
    Lo {
        /// Sweep lengths 1..=n
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Visit one vector per magnitude multiset instead of every vector
        #[arg(long)]
        reduced: bool,
        /// Comma-separated rationals; checks this vector only
        #[arg(long, value_delimiter = ',', value_parser = rational)]
        vector: Option<Vec<Rat>>,
        /// Target value for --vector
        #[arg(long, value_parser = rational, default_value = "0")]
        target: Rat,
    },
    /// Level-set antichain masses under product measures
    Antichain {
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Entries of the random vectors lie in ±1..=±max_entry
        #[arg(long, default_value_t = 5)]
        max_entry: i64,
        /// Common marginal P[z_j = +1] of the measure
        #[arg(long, value_parser = rational, default_value = "1/2")]
        marginal: Rat,
        /// Marginals of the sweep on the all-ones vector
        #[arg(long, value_delimiter = ',', value_parser = rational, default_value = "1/2,3/5,7/10,4/5,9/10")]
        sweep: Vec<Rat>,
    },
    /// Window probabilities of vectors with many scales
    Scales {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        scales: Vec<usize>,
        /// Smallest scale
        #[arg(long, value_parser = rational, default_value = "1")]
        delta: Rat,
        /// Window radius in units of delta
        #[arg(long, value_parser = rational, default_value = "1")]
        b: Rat,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
}

fn rational(s: &str) -> Result<Rat, String> {
    parse_rat(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let code = match commands::run(&cli.global, &cli.command) {
        Ok(out) => {
            if cli.global.verbose {
                eprintln!("{}", out.summary);
            }
            match &cli.global.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &out.json) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{}", out.json),
            }
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            commands::error_code(&e)
        }
    };
    ExitCode::from(code)
}
