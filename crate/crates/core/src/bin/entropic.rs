use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use entropic_core::bounds::{Accuracies, TailData};
use entropic_core::harness::{
    all_clean, bounds_summary, entropy_report, find_crossover, run_verify, verdict_counts, write_fig2,
    write_reports, StateSpec, SweepConfig,
};
use entropic_core::specfun::spheroidal_table;
use entropic_core::states::HbarConvention;
use entropic_core::Result;

#[derive(Parser)]
#[command(name = "entropic", version, about = "Entropic uncertainty relations for coarse-grained position and momentum measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discrete and continuous entropy of one state on one bin grid.
    Entropy {
        /// gaussian:sigma,x0,p0 | two_gaussian:sigma,sep | bump:w | quartic:s | grid:path
        #[arg(long)]
        state: StateSpec,
        #[arg(long)]
        delta: f64,
        /// Bin offset; finite windows require -delta/2.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        xi0: f64,
        /// Keep only the 2M+1 central bins.
        #[arg(long)]
        window: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        /// Also write the bin probabilities as CSV.
        #[arg(long)]
        probs: Option<PathBuf>,
    },
    /// Every bound at the given accuracies and tail data.
    Bounds {
        #[arg(long)]
        dx: f64,
        #[arg(long)]
        dp: f64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        #[arg(long, default_value_t = 0.0)]
        x2_tail: f64,
        #[arg(long, default_value_t = 0.0)]
        p2_tail: f64,
        #[arg(long, default_value_t = 0.0)]
        qx: f64,
        #[arg(long, default_value_t = 0.0)]
        qp: f64,
    },
    /// Run a sweep from a JSON config; exits nonzero on any violation or error.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to the config's output_path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Locate the gamma where the spheroidal bound overtakes B.
    Crossover,
    /// Tabulate B and R on a log-spaced gamma grid, with a gnuplot script.
    Fig2 {
        #[arg(long, default_value_t = 0.01)]
        gamma_lo: f64,
        #[arg(long, default_value_t = 20.0)]
        gamma_hi: f64,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// CSV of the spheroidal eigenvalue and R00(c, 1) on a uniform c grid.
    SpheroidalTable {
        #[arg(long, default_value_t = 0.0)]
        c_lo: f64,
        #[arg(long, default_value_t = 20.0)]
        c_hi: f64,
        #[arg(long, default_value_t = 41)]
        n: usize,
    },
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Entropy {
            state,
            delta,
            xi0,
            window,
            hbar,
            probs,
        } => {
            let (report, csv) = entropy_report(&state, HbarConvention::new(hbar)?, delta, xi0, window)?;
            if let Some(path) = probs {
                fs::write(path, csv)?;
            }
            print_json(&report);
        }
        Command::Bounds {
            dx,
            dp,
            hbar,
            x2_tail,
            p2_tail,
            qx,
            qp,
        } => {
            let acc = Accuracies::new(dx, dp, HbarConvention::new(hbar)?)?;
            let tails = TailData::new(x2_tail, p2_tail, qx, qp)?;
            print_json(&bounds_summary(&acc, &tails));
        }
        Command::Verify { config, out } => {
            let cfg = SweepConfig::from_json(&fs::read_to_string(&config)?)?;
            let dir = out.or_else(|| cfg.output_path.clone()).unwrap_or_else(|| PathBuf::from("verify-out"));
            let reports = run_verify(&cfg)?;
            write_reports(&reports, &dir)?;
            print_json(&verdict_counts(&reports));
            return Ok(all_clean(&reports));
        }
        Command::Crossover => print_json(&find_crossover()?),
        Command::Fig2 {
            gamma_lo,
            gamma_hi,
            n,
            out,
        } => {
            let rows = write_fig2(&out, gamma_lo, gamma_hi, n)?;
            eprintln!("wrote {} rows to {}", rows.len(), out.display());
        }
        Command::SpheroidalTable { c_lo, c_hi, n } => {
            let cs: Vec<f64> = if n < 2 {
                vec![c_lo]
            } else {
                (0..n).map(|i| c_lo + (c_hi - c_lo) * i as f64 / (n - 1) as f64).collect()
            };
            print!("{}", spheroidal_table(&cs)?);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification found violations or errors");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
