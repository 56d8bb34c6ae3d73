//! `uavlc` — command-line front end for the UAV-VLC planning toolkit.
//!
//! Subcommands: `run` executes an experiment sweep and writes result tables,
//! `gen` draws a scenario file, `check` re-validates stored solutions, and
//! `oracle` solves a small scenario exactly by exhaustive search.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use uavlc_cli::{
    default_spec, generate_scenario, load_config, load_scenario, load_solutions, run_experiment,
    save_results, save_scenario, save_solution, summarize, ExperimentSpec, ScenarioFile,
    SolutionFile, SCENARIO_FORMAT, SOLUTION_FORMAT,
};
use uavlc_core::plan::{check_constraints, exhaustive_solve, objective};
use uavlc_core::{PlannerConfig, UavId};

#[derive(Parser)]
#[command(name = "uavlc", version, about = "Planner and experiment runner for two-UAV VLC networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment sweep from a config and write result tables.
    Run {
        /// Config file path, or "default" for the built-in experiment.
        #[arg(long, default_value = "default")]
        config: String,
        /// Override the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replace the config's seed list with this single seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Generate a scenario file with uniformly placed users.
    Gen {
        /// Config file path, or "default"; supplies parameters and user count.
        #[arg(long, default_value = "default")]
        config: String,
        /// Override the config's user count.
        #[arg(long)]
        n: Option<usize>,
        /// Scenario seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Scenario file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-validate stored solutions (a single JSON object or a .jsonl stream).
    Check {
        /// Solution file to check.
        solution: PathBuf,
    },
    /// Solve a small scenario exactly by exhaustive search.
    Oracle {
        /// Scenario file to solve.
        scenario: PathBuf,
        /// Write the exact solution here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config, out, seed } => cmd_run(&config, out, seed),
        Command::Gen { config, n, seed, out } => cmd_gen(&config, n, seed, &out),
        Command::Check { solution } => cmd_check(&solution),
        Command::Oracle { scenario, out } => cmd_oracle(&scenario, out.as_deref()),
    }
}

fn load_spec(config: &str) -> Result<ExperimentSpec> {
    if config == "default" {
        Ok(default_spec())
    } else {
        load_config(Path::new(config))
    }
}

fn cmd_run(config: &str, out: Option<PathBuf>, seed: Option<u64>) -> Result<()> {
    let mut spec = load_spec(config)?;
    if let Some(dir) = out {
        spec.output_dir = dir;
    }
    if let Some(s) = seed {
        spec.seeds = vec![s];
    }
    let run = run_experiment(&spec).context("running experiment")?;
    save_results(&run, &spec.output_dir)?;

    println!(
        "ran {} solver runs: {} sweep point(s) x {} seed(s) x 2 solvers",
        run.records.len(),
        spec.sweep.points(&spec.params).len(),
        spec.seeds.len()
    );
    for s in summarize(&run.records) {
        println!(
            "  {:<16} {:<8} feasible {}/{}  mean objective {:.6}  mean rate {:.6}  mean D2D {:.2}",
            s.sweep, s.solver, s.feasible_runs, s.runs, s.mean_objective, s.mean_sum_rate,
            s.mean_d2d_count
        );
    }
    println!(
        "wrote results.csv, results.jsonl, solutions.jsonl, summary.csv to {}",
        spec.output_dir.display()
    );

    let failures = run.records.iter().filter(|r| r.error.is_some()).count();
    if failures > 0 {
        bail!("{failures} of {} runs recorded an error (see results.csv)", run.records.len());
    }
    Ok(())
}

fn cmd_gen(config: &str, n: Option<usize>, seed: u64, out: &Path) -> Result<()> {
    let spec = load_spec(config)?;
    let n = n.unwrap_or(spec.user_count);
    let scenario = generate_scenario(spec.params, n, seed)?;
    save_scenario(&ScenarioFile { format: SCENARIO_FORMAT.to_string(), scenario }, out)?;
    println!("wrote scenario: {n} users, seed {seed} -> {}", out.display());
    Ok(())
}

fn cmd_check(path: &Path) -> Result<()> {
    let solutions = load_solutions(path)?;
    let mut bad = 0usize;
    for (i, sol) in solutions.iter().enumerate() {
        let head = format!(
            "solution {}/{} [{} {} seed {}]",
            i + 1,
            solutions.len(),
            sol.solver,
            sol.sweep,
            sol.scenario.seed
        );
        let report =
            check_constraints(&sol.result.placement, &sol.result.association, &sol.scenario);
        let recomputed =
            objective(&sol.result.placement, &sol.result.association, &sol.scenario);

        let mut problems: Vec<String> =
            report.violations.iter().map(ToString::to_string).collect();
        if report.is_feasible() != sol.result.feasible {
            problems.push(format!(
                "stored feasible flag {} disagrees with the checker",
                sol.result.feasible
            ));
        }
        if (recomputed - sol.result.objective).abs() > 1e-9 {
            problems.push(format!(
                "stored objective {} differs from recomputed {recomputed}",
                sol.result.objective
            ));
        }

        if problems.is_empty() {
            println!(
                "{head}: ok (objective {:.6}, {} centroid / {} D2D / {} unserved)",
                sol.result.objective,
                sol.result.association.uav_count(UavId::Uav1)
                    + sol.result.association.uav_count(UavId::Uav2),
                sol.result.association.d2d_count(),
                sol.result.association.unserved_count()
            );
        } else {
            bad += 1;
            println!("{head}: {} problem(s)", problems.len());
            for p in &problems {
                println!("  {p}");
            }
        }
    }
    if bad > 0 {
        bail!("{bad} of {} solution(s) failed validation", solutions.len());
    }
    println!("all {} solution(s) validate", solutions.len());
    Ok(())
}

fn cmd_oracle(path: &Path, out: Option<&Path>) -> Result<()> {
    let file = load_scenario(path)?;
    let seed = file.scenario.seed;
    let result = exhaustive_solve(&file.scenario)
        .with_context(|| format!("exact solve of {}", path.display()))?;
    println!("exact optimum: objective {:.12}", result.objective);
    println!("  uav1 at {}, uav2 at {}", result.placement.uav1, result.placement.uav2);
    println!(
        "  {} centroid / {} D2D / {} unserved",
        result.association.uav_count(UavId::Uav1) + result.association.uav_count(UavId::Uav2),
        result.association.d2d_count(),
        result.association.unserved_count()
    );
    if let Some(out) = out {
        let solution = SolutionFile {
            format: SOLUTION_FORMAT.to_string(),
            sweep: "base".to_string(),
            solver: "oracle".to_string(),
            scenario: file.scenario,
            planner: PlannerConfig { seed, ..PlannerConfig::default() },
            result,
        };
        save_solution(&solution, out)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}
