//! `cylkit`: build finite algebras, check them, and compare them.
//!
//! Every command prints a canonical JSON report. Exit codes: 0 all checks
//! passed, 1 definitive failure, 2 bounded search exhausted, 3 usage or
//! validation error.

mod commands;
mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use report::Report;

const DEFAULT_SEED: u64 = 0x5eed_c71c;

#[derive(Parser, Debug)]
#[command(
    name = "cylkit",
    version,
    about = "Finite cylindric, polyadic and relation algebras"
)]
struct Cli {
    /// Worker threads for search kernels; 1 runs sequentially.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Record wall-clock timings in the report.
    #[arg(long, global = true)]
    timings: bool,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an algebra and write its atom structure.
    #[command(subcommand)]
    Construct(Construct),
    /// Check axioms or frame conditions.
    #[command(subcommand)]
    Check(Check),
    /// `Nr_I A` for the kept indices.
    NeatReduct {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        keep: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// `Rd^ρ A`: operator `i` of the result is operator `ρ(i)` of the input.
    Reduct {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        rho: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// `Rl_x A` for `x` given as atom indices.
    Relativize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        x: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The relation algebra reduct of a cylindric algebra.
    RaReduct {
        #[arg(long)]
        input: PathBuf,
        /// `u,v,w`: relations on `(u, v)`, spare coordinate `w`.
        #[arg(long, value_delimiter = ',')]
        coords: Option<Vec<usize>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Instantiate or check equation schemas.
    #[command(subcommand)]
    Schema(Schema),
    /// Bounded search for a representation over small bases.
    Represent {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_base: usize,
    },
    /// Isomorphism search between two atom structures.
    Iso {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 64)]
        max_atoms: usize,
    },
    /// Bounded amalgamation search over two-dimensional frames.
    Amalgam {
        #[arg(long)]
        a0: PathBuf,
        #[arg(long)]
        a1: PathBuf,
        #[arg(long)]
        a2: PathBuf,
        /// Largest candidate amalgam, in atoms.
        #[arg(long, default_value_t = 4)]
        bound: usize,
    },
    /// Quasi-projective relation algebras.
    #[command(subcommand)]
    Qra(Qra),
}

#[derive(Subcommand, Debug)]
enum Construct {
    /// Monk's atom structure `G(m, n)`.
    Monk {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The relation algebra `A(n, r, Ψ)`, or `Ca(H)` of its hypernetworks.
    Hh {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long)]
        psi: usize,
        #[command(flatten)]
        networks: NetworkArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The full set algebra on `^dim base`.
    Set {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        base: usize,
        /// Substitutions, e.g. `[0,1][1,2]`.
        #[arg(long, default_value = "")]
        subs: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A directed set algebra over `⟨U; R⟩`.
    Directed {
        #[arg(long)]
        alpha: usize,
        #[arg(long)]
        size: usize,
        /// Pairs `a-b`, comma separated; omitted means `U × U`.
        #[arg(long)]
        rel: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The split algebra over `∏ U_i`.
    Split {
        #[arg(long)]
        alpha: usize,
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Copies of each split atom.
        #[arg(long)]
        atoms: usize,
        #[arg(long, default_value = "")]
        subs: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct NetworkArgs {
    /// Build `Ca(H)` from hypernetworks on this many nodes.
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long, default_value_t = 1)]
    lambda: usize,
}

#[derive(Subcommand, Debug)]
enum Check {
    /// Equational axioms: `ca` by term evaluation, `ra` at atom level.
    Axioms {
        #[arg(long)]
        input: PathBuf,
        /// `ca3`, `ca4`, … or `ra`.
        #[arg(long)]
        variety: String,
        /// Evaluate every assignment instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// Frame correspondents: `caN`, `peaN` or `ra`.
    Correspondents {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        variety: String,
    },
    /// Enumerate hypernetworks of `A(n, r, Ψ)` and check the hyperbasis clauses.
    Hyperbasis {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long)]
        psi: usize,
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        width: usize,
        #[arg(long, default_value_t = 1)]
        lambda: usize,
    },
    /// Quasi-projection axioms; without `--p`/`--q`, search for a pair.
    Quasiprojections {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        q: Option<Vec<usize>>,
        /// Read the second axiom as displayed, `q;q ≤ 1`.
        #[arg(long)]
        literal: bool,
    },
}

#[derive(Subcommand, Debug)]
enum Schema {
    /// `Σ_n` from the templates.
    Instantiate {
        #[arg(long)]
        n: usize,
        /// Template file; the cylindric templates by default.
        #[arg(long)]
        template: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks `Σ_n` in an algebra.
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        template: Option<PathBuf>,
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
}

#[derive(Subcommand, Debug)]
enum Qra {
    /// Prints the terms defining `B_n`.
    Terms {
        #[arg(long)]
        n: usize,
        /// `ξ`, `d_ij` and `dom` exactly as displayed.
        #[arg(long)]
        verbatim: bool,
    },
    /// Checks quasi-projections and builds `B_n`.
    Check {
        /// A relation algebra; the two-element one when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        q: Option<Vec<usize>>,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        literal: bool,
        #[arg(long)]
        verbatim: bool,
    },
}

fn seed() -> Result<u64, String> {
    match std::env::var("CYLKIT_SEED") {
        Ok(s) => {
            let s = s.trim();
            let parsed = match s.strip_prefix("0x") {
                Some(hex) => u64::from_str_radix(hex, 16),
                None => s.parse(),
            };
            parsed.map_err(|e| format!("CYLKIT_SEED={s}: {e}"))
        }
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let seed = match seed() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(3);
        }
    };
    if cli.jobs > 1 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            std::process::exit(3);
        }
    }
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let mut report = Report::new(argv, seed, cli.jobs != 1, cli.timings);
    match commands::run(&cli, &mut report) {
        Ok(outcome) => {
            report.outcome = outcome;
            report.lap("total");
            let json = report.to_json();
            print!("{json}");
            if let Some(path) = &cli.report {
                if let Err(e) = std::fs::write(path, &json) {
                    eprintln!("error: writing {}: {e}", path.display());
                    std::process::exit(3);
                }
            }
            std::process::exit(outcome.code());
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(3);
        }
    }
}
