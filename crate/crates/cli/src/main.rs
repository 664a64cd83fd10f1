//! `hmquintic`: point counts, trace table and modularity certificate for the
//! resolved symmetric Horrocks-Mumford quintic.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hmquintic::counting::ContributionPolicy;

use report::Format;

#[derive(Parser, Debug)]
#[command(name = "hmquintic", version, about = "Point counts and 2-adic modularity check for a Horrocks-Mumford quintic")]
pub struct Cli {
    /// Worker threads for the point sweep (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: Option<u32>,
    /// Node contribution recipe: quadric (alias paper) or prose (alias naive).
    #[arg(long, global = true, default_value = "quadric")]
    pub policy: ContributionPolicy,
    /// Directory holding the append-only count cache.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Directory with replacement data tables.
    #[arg(long, global = true)]
    pub data: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CountVariety {
    Xprime,
    Rank3,
    E2,
    Resolved,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Count points of one variety over F_p.
    Count {
        #[arg(long)]
        prime: u64,
        #[arg(long, value_enum)]
        variety: CountVariety,
    },
    /// Frobenius traces on V against the form coefficients.
    TraceTable {
        #[arg(long, value_delimiter = ',', default_values_t = hmquintic::galois::TRACE_SET)]
        primes: Vec<u64>,
        /// Use this h instead of solving for it; rows become report-only.
        #[arg(long, allow_negative_numbers = true)]
        h_override: Option<i64>,
    },
    /// Run the full elimination and write the certificate.
    Verify {
        #[arg(long, default_value = "certificate.json")]
        out: PathBuf,
        /// Use cached counts only.
        #[arg(long)]
        no_compute: bool,
    },
    /// Rational singular points and their classes.
    Census {
        #[arg(long)]
        prime: u64,
    },
    /// Tangent cones at one representative per node class.
    Cone {
        #[arg(long)]
        prime: u64,
    },
    /// Structure of the 48-element group and the tau criterion.
    GroupCheck,
    /// Local factor of L(H^3, s) at p.
    EulerFactor {
        #[arg(long)]
        prime: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok((report, status)) => {
            print!("{}", report.render(cli.format));
            ExitCode::from(status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(report::exit_code(&e))
        }
    }
}
