mod commands;
mod input;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Output;

#[derive(Debug, Parser)]
#[command(name = "subshift", version, about = "Analyse primitive substitution subshifts")]
struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide finiteness of Cantor factors; several files run concurrently.
    Analyze {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Periodicity probe horizon.
        #[arg(long, default_value_t = subshift::analysis::DEFAULT_PROBE_HORIZON)]
        horizon: usize,
    },
    /// Build the proper substitution ζ with its maps φ and ψ.
    Properize {
        file: PathBuf,
        /// Write ζ to this path in the input format.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Return words to a factor, read off a fixed-point prefix.
    ReturnWords {
        file: PathBuf,
        anchor: String,
        #[arg(long, default_value_t = 10_000)]
        prefix_len: usize,
    },
    /// Return words to the seed letter and the derived substitution τ.
    Derived { file: PathBuf },
    /// Search M^m e ≡ 0 mod p^n for n = 1..=nmax on the proper form.
    Spectrum { file: PathBuf, p: u64, nmax: u32 },
    /// Sturmian word from a continued fraction [0; a_1, a_2, …].
    Sturmian {
        #[arg(long, value_delimiter = ',', required = true)]
        cf: Vec<u64>,
        #[arg(long, default_value_t = 100)]
        len: usize,
        /// Compare factor sets with the rotation coding for n ≤ 12.
        #[arg(long)]
        check: bool,
        /// Also check every s0-window of the directive for positivity.
        #[arg(long)]
        s0: Option<usize>,
    },
    /// Estimate the linear-recurrence constant on a prefix.
    LrEstimate {
        /// Substitution or directive file; omit when using --cf.
        file: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', conflicts_with = "file")]
        cf: Option<Vec<u64>>,
        #[arg(long, default_value_t = 10_000)]
        prefix_len: usize,
        #[arg(long, default_value_t = 20)]
        max_anchor: usize,
        /// Also run the LR diagnostics with this constant.
        #[arg(long)]
        k: Option<usize>,
        /// Window positivity check for directive inputs.
        #[arg(long)]
        s0: Option<usize>,
    },
    /// Chain of return-word recodings for prefixes of length α^n, α = K²(K+1).
    SadicDecompose {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Defaults to the shortest admissible length (K+1)α^depth.
        #[arg(long)]
        prefix_len: Option<usize>,
    },
    /// Upper bound on the number of factors of an LR subshift with constant K.
    Bound { k: u32 },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match commands::run(cli.command) {
        Ok(Output { text, json: value, exit }) => {
            // A closed pipe downstream is not an error worth a panic.
            let mut stdout = std::io::stdout().lock();
            let _ = if json {
                writeln!(stdout, "{}", serde_json::to_string_pretty(&value).expect("serializable report"))
            } else {
                write!(stdout, "{text}")
            };
            ExitCode::from(exit)
        }
        Err(e) => {
            if json {
                let value = serde_json::json!({ "error": e.to_string(), "kind": e.kind() });
                println!("{}", serde_json::to_string_pretty(&value).expect("serializable error"));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
