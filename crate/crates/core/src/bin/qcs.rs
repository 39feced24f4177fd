use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qcs::harness::{run_experiments, run_trial, DeltaRule, ExperimentPlan, Family};
use qcs::report::{emit_csv, emit_svg_loglog};
use qcs::signal::Structure;
use qcs::verify::{run_suite, Suite};
use qcs::Result;

#[derive(Parser)]
#[command(name = "qcs", version, about = "Projected gradient descent for quantized compressed sensing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment plan (JSON object or array of objects).
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Recover one sparse signal and print the per-iteration errors as CSV.
    Recover {
        /// 1bcs, d1bcs or dmbcs
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long = "L", default_value_t = 4)]
        levels: usize,
        /// Bin width for dmbcs; defaults to 5/L.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 1.5)]
        lambda: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        iters: usize,
    },
    /// Run oracle suites; exits non-zero if any check fails.
    Verify {
        #[arg(long, value_enum)]
        suite: Option<Suite>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { config, out, svg, threads } => {
            if let Some(t) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build_global()
                    .map_err(|e| qcs::QcsError::InvalidParameter(e.to_string()))?;
            }
            let text = std::fs::read_to_string(&config)?;
            let plans = ExperimentPlan::from_json(&text)?;
            let result = run_experiments(&plans)?;
            emit_csv(&result.cells, &out)?;
            if let Some(path) = svg {
                emit_svg_loglog(&result.cells, &path)?;
            }
            for (group, fit) in result.slopes() {
                eprintln!("{group}: slope {:.3} (r2 {:.3})", fit.slope, fit.r2);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Recover { family, n, k, m, levels, delta, lambda, seed, iters } => {
            let family = Family::parse(&family)?;
            let mut plan = ExperimentPlan::new(family, Structure::Sparse { k, n }, vec![m]);
            plan.iterations = iters;
            plan.trials = 1;
            match family {
                Family::DitheredOneBit => plan.lambda = lambda,
                Family::DitheredMultiBit => {
                    plan.levels = levels;
                    plan.delta_rule = delta.map(DeltaRule::Fixed);
                }
                Family::OneBitGaussian => {}
            }
            plan.validate()?;
            let cell = plan_cell(&plan)?;
            let (final_error, _, errors) = run_trial(&cell, iters, seed, true)?;
            println!("iteration,error");
            for (t, e) in errors.unwrap_or_default().iter().enumerate() {
                println!("{},{e}", t + 1);
            }
            println!("final,{final_error}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite } => {
            let suites = suite.map_or(Suite::ALL.to_vec(), |s| vec![s]);
            let mut all_passed = true;
            for s in suites {
                for check in run_suite(s)? {
                    all_passed &= check.passed;
                    let tag = if check.passed { "PASS" } else { "FAIL" };
                    println!("[{tag}] {}: {} {}", s.name(), check.name, check.detail);
                }
            }
            Ok(if all_passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

fn plan_cell(plan: &ExperimentPlan) -> Result<qcs::harness::CellParams> {
    Ok(plan.resolved_cells()?.remove(0))
}
