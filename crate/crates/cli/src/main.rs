mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

/// Norms, extremal pole configurations and constructive approximation by
/// simplest fractions in weighted Bergman spaces.
#[derive(Parser, Debug)]
#[command(name = "chui-lab", version)]
struct Cli {
    #[command(flatten)]
    out: OutputArgs,

    /// Worker threads; falls back to CHUI_LAB_THREADS, then all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Serialize)]
struct OutputArgs {
    /// Write the JSON report to PATH (`-` or no value: standard output).
    #[arg(long, global = true, value_name = "PATH", num_args = 0..=1, default_missing_value = "-")]
    json: Option<String>,

    /// Write the flat sweep table as CSV to PATH (`-` or no value: standard output).
    #[arg(long, global = true, value_name = "PATH", num_args = 0..=1, default_missing_value = "-")]
    csv: Option<String>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Squared norm of a simplest fraction.
    Norm(commands::NormArgs),
    /// Multistart minimization of the norm over N poles.
    Minimize(commands::MinimizeArgs),
    /// Distance from a bounded function to simplest fractions of order N.
    Distance(commands::DistanceArgs),
    /// Distance between fractions of orders n and n+k.
    Setdist(commands::SetdistArgs),
    /// N^(α-1)‖Ψ_N‖² against its limit.
    Asymptotics(commands::AsymptoticsArgs),
    /// Rate regimes of ‖Ψ_N‖ for the weight classes A to D, or the bracket ratio.
    Rates(commands::RatesArgs),
    /// Constructed poles for a bounded function and the bounds they satisfy.
    Thompson(commands::ThompsonArgs),
    /// Power-sum moment bounds on random unimodular families.
    Moments(commands::MomentsArgs),
    /// Energy of a fraction on the band 1/N < 1-|z|² < 2/N.
    Annulus(commands::AnnulusArgs),
    /// Distances to SF_N: lower bounds (alpha:1) or decay for weights o(t).
    Closure(commands::ClosureArgs),
    /// Constructive and optimized distances against π/√3.
    Distlimit(commands::DistlimitArgs),
    /// The numbered acceptance criteria.
    Selftest(commands::SelftestArgs),
}

fn init_threads(flag: Option<usize>) -> Result<(), String> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("CHUI_LAB_THREADS") {
            Ok(v) => Some(
                v.trim()
                    .parse()
                    .map_err(|_| format!("CHUI_LAB_THREADS=`{v}` is not a count"))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err("the thread count must be positive".into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = init_threads(cli.threads) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let name = match serde_json::to_value(&cli.command) {
        Ok(serde_json::Value::Object(m)) => m.keys().next().cloned().unwrap_or_default(),
        _ => String::new(),
    };
    let started = std::time::Instant::now();
    let outcome = match commands::run(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let config = serde_json::json!({
        "command": cli.command,
        "output": cli.out,
        "threads": cli.threads.or_else(|| std::env::var("CHUI_LAB_THREADS").ok().and_then(|v| v.parse().ok())),
    });
    let elapsed = started.elapsed().as_secs_f64();
    if let Err(e) = output::emit(&name, config, &outcome, elapsed, &cli.out) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
