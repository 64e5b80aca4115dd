use std::path::PathBuf;
use std::process::ExitCode;

use clap::{error::ErrorKind, Parser, Subcommand};
use ldltr::problems::{problem_names, Sizing, SCALABLE_SIZES};
use ldltr_bench::emit::{self, RUNS_FILE};
use ldltr_bench::{performance_profile, run_suite, standard_problems, Metric, SolverId, SuiteConfig};

#[derive(Parser)]
#[command(name = "bench", version, about = "Benchmark the ldltr solvers on the built-in problem catalog")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run solvers over the catalog and write runs.csv plus profiles.
    Run {
        #[arg(long, value_delimiter = ',', default_value = "ldltr,bfgsr")]
        solvers: Vec<SolverId>,
        #[arg(long, default_value_t = 1000)]
        max_n: usize,
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
        #[arg(long, default_value_t = 6000)]
        kmax: usize,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Seed of the random test problem.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Recompute a performance profile from an existing runs.csv.
    Profile {
        #[arg(long, default_value = "time")]
        metric: Metric,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Print the catalog.
    ListProblems,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match cli.command {
        Command::Run { solvers, max_n, eps, kmax, out, jobs, seed } => {
            if max_n < 2 {
                eprintln!("error: --max-n must be at least 2");
                return ExitCode::from(1);
            }
            let problems = standard_problems(max_n, seed);
            let config = SuiteConfig { eps, k_max: kmax, jobs };
            let records = match run_suite(&solvers, &problems, &config, |r| {
                eprintln!("{:<10} {:>5} {:<6} {:<18} {:>6} it {:>9.3}s", r.problem, r.n, r.solver, r.status, r.iterations, r.wall_time_s)
            }) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            let profiles: Vec<_> = [Metric::Time, Metric::Iterations, Metric::Fevals]
                .into_iter()
                .map(|m| performance_profile(&records, m))
                .collect();
            if profiles[0].classical {
                eprintln!("warning: single solver; profile ratios use the classical denominator");
            }
            if let Err(e) = emit::emit(&records, &profiles, &out) {
                eprintln!("error: writing {}: {e}", out.display());
                return ExitCode::from(1);
            }
            let solved = records.iter().filter(|r| r.status.is_success()).count();
            println!("{solved}/{} runs solved; output in {}", records.len(), out.display());
            if solved == records.len() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Command::Profile { metric, input } => {
            let records = match emit::read_runs(&input.join(RUNS_FILE)) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: reading {}: {e}", input.join(RUNS_FILE).display());
                    return ExitCode::from(1);
                }
            };
            let profiles = performance_profile(&records, metric);
            if profiles.classical {
                eprintln!("warning: single solver; profile ratios use the classical denominator");
            }
            match emit::write_profile(&input, &profiles) {
                Ok((csv, svg)) => {
                    for s in &profiles.solvers {
                        println!("{:<6} solved {:.3}  rho(1) = {:.3}", s.solver, s.solved_fraction(), s.rho(1.0));
                    }
                    println!("wrote {} and {}", csv.display(), svg.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::ListProblems => {
            for (name, sizing) in problem_names() {
                match sizing {
                    Sizing::Fixed(n) => println!("{name:<10} n = {n}"),
                    Sizing::Multiple(m) => {
                        let sizes: Vec<String> = SCALABLE_SIZES.iter().map(|s| (s - s % m).to_string()).collect();
                        println!("{name:<10} n ∈ {{{}}}", sizes.join(", "));
                    }
                }
            }
            ExitCode::SUCCESS
        }
    }
}
