use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};

use thetapencil_cli::{check_report, exit, parse_spec, render, run, RunOptions, Stage};

#[derive(Parser)]
#[command(name = "thetapencil", version, about = "Bracket pencils and Poisson-commutative subalgebras of periodic gradings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline of a spec file and write a JSON report.
    Run {
        spec: PathBuf,
        /// Overrides the seed in the spec.
        #[arg(long)]
        seed: Option<u64>,
        /// Report path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Compute indices exactly where the dimension allows.
        #[arg(long)]
        symbolic: bool,
        /// Stage budget, e.g. `certify=200`; may be repeated.
        #[arg(long = "budget", value_name = "STAGE=N", value_parser = parse_budget)]
        budgets: Vec<(String, u64)>,
    },
    /// Re-verify the certificates of a report from its serialized generators.
    Check { report: PathBuf },
}

fn parse_budget(s: &str) -> Result<(String, u64), String> {
    let (stage, n) = s.split_once('=').ok_or("expected STAGE=N")?;
    let st = Stage::parse(stage).ok_or_else(|| format!("unknown stage `{stage}`"))?;
    if st.budget_meaning().is_none() {
        return Err(format!("stage `{stage}` takes no budget"));
    }
    let n = n.parse::<u64>().map_err(|e| format!("bad budget `{n}`: {e}"))?;
    Ok((stage.to_string(), n))
}

fn run_command(spec: PathBuf, opts: RunOptions, out: Option<PathBuf>) -> anyhow::Result<u8> {
    let text = fs::read_to_string(&spec).with_context(|| format!("reading {}", spec.display()))?;
    let job = match parse_spec(&text) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("{}: {e}", spec.display());
            return Ok(exit::INVALID);
        }
    };
    for stage in opts.budgets.keys() {
        if !job.pipeline.iter().any(|s| s.name() == stage) {
            return Err(anyhow!("budget for stage `{stage}` which is not in the pipeline"));
        }
    }
    let outcome = run(&job, &opts);
    let text = render(&outcome.report);
    match out {
        Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    for st in outcome.report["stages"].as_array().into_iter().flatten() {
        let status = st["status"].as_str().unwrap_or("?");
        let detail = st["error"]["message"].as_str().map(|m| format!(": {m}")).unwrap_or_default();
        eprintln!("{:<10} {status}{detail}", st["stage"].as_str().unwrap_or("?"));
    }
    Ok(if outcome.passed { exit::OK } else { exit::FAILED })
}

fn check_command(path: PathBuf) -> anyhow::Result<u8> {
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let report: serde_json::Value = match serde_json::from_str(&text) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return Ok(exit::INVALID);
        }
    };
    let outcome = match check_report(&report) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return Ok(exit::INVALID);
        }
    };
    for r in &outcome.rechecks {
        let state = match (r.reproduced, r.passed) {
            (true, true) => "ok",
            (true, false) => "reproduced, failing",
            (false, _) => "not reproduced",
        };
        println!("{:<16} {state}", r.what);
    }
    println!("report {}", if outcome.report_passed { "passed" } else { "failed" });
    Ok(if outcome.ok() { exit::OK } else { exit::FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            spec,
            seed,
            out,
            symbolic,
            budgets,
        } => {
            let opts = RunOptions {
                seed,
                symbolic,
                budgets: budgets.into_iter().collect::<BTreeMap<_, _>>(),
            };
            run_command(spec, opts, out)
        }
        Command::Check { report } => check_command(report),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::INVALID)
        }
    }
}
