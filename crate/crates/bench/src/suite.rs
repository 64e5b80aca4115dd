//! Runs solvers over a problem list and collects one record per pair.

use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use ldltr::{bfgsr_minimize, minimize, BfgsrConfig, Objective, Problem, SolveReport, SolverConfig, Status};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest dimension the always-exact solver is run at.
pub const MS_MAX_N: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolverId {
    Ldltr,
    Bfgsr,
    /// Trust region with the exact subproblem on every constrained step.
    Ms,
}

impl SolverId {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverId::Ldltr => "ldltr",
            SolverId::Bfgsr => "bfgsr",
            SolverId::Ms => "ms",
        }
    }

    /// Whether the solver is run on a problem of dimension `n`.
    pub fn supports(self, n: usize) -> bool {
        self != SolverId::Ms || n <= MS_MAX_N
    }
}

impl fmt::Display for SolverId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "ldltr" => Ok(SolverId::Ldltr),
            "bfgsr" => Ok(SolverId::Bfgsr),
            "ms" => Ok(SolverId::Ms),
            other => Err(format!("unknown solver `{other}` (expected ldltr, bfgsr or ms)")),
        }
    }
}

/// Outcome of one solver on one problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem: String,
    pub n: usize,
    pub solver: String,
    #[serde(with = "status_field")]
    pub status: Status,
    pub iterations: usize,
    pub fevals: usize,
    pub gevals: usize,
    pub final_f: f64,
    pub final_gnorm: f64,
    pub wall_time_s: f64,
}

mod status_field {
    use ldltr::Status;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(st: &Status, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(st.as_str())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Status, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl RunRecord {
    pub fn from_report(problem: &str, n: usize, solver: SolverId, r: &SolveReport<f64>) -> Self {
        Self {
            problem: problem.to_string(),
            n,
            solver: solver.as_str().to_string(),
            status: r.status,
            iterations: r.iterations,
            fevals: r.function_evals,
            gevals: r.gradient_evals,
            final_f: r.final_f,
            final_gnorm: r.final_gnorm,
            wall_time_s: r.wall_time.as_secs_f64(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub eps: f64,
    pub k_max: usize,
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { eps: 1e-4, k_max: 6000, jobs: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SuiteError {
    NoSolvers,
    NoProblems,
    ThreadPool(String),
}

impl fmt::Display for SuiteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuiteError::NoSolvers => f.write_str("at least one solver is required"),
            SuiteError::NoProblems => f.write_str("at least one problem is required"),
            SuiteError::ThreadPool(e) => write!(f, "thread pool: {e}"),
        }
    }
}

impl std::error::Error for SuiteError {}

/// Separable quartic with seeded random weights and centers.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomQuartic {
    pub weights: Vec<f64>,
    pub centers: Vec<f64>,
}

impl RandomQuartic {
    pub const NAME: &'static str = "RANDQRTC";

    /// Weights are log-uniform on `[10⁻², 10²]`, centers uniform on `[−1, 1]`.
    pub fn new(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights = (0..n).map(|_| 10f64.powf(rng.gen_range(-2.0..2.0))).collect();
        let centers = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Self { weights, centers }
    }
}

impl Objective<f64> for RandomQuartic {
    fn dim(&self) -> usize {
        self.weights.len()
    }
    fn value(&mut self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.weights)
            .zip(&self.centers)
            .map(|((&xi, &w), &c)| {
                let d = xi - c;
                w * d * d + 0.1 * d.powi(4)
            })
            .sum()
    }
    fn gradient(&mut self, x: &[f64], grad: &mut [f64]) {
        for i in 0..x.len() {
            let d = x[i] - self.centers[i];
            grad[i] = 2.0 * self.weights[i] * d + 0.4 * d * d * d;
        }
    }
}

/// A problem the suite can run.
#[derive(Debug, Clone, PartialEq)]
pub enum BenchProblem {
    Catalog(Problem<f64>),
    Random(RandomQuartic),
}

impl BenchProblem {
    pub fn name(&self) -> &str {
        match self {
            BenchProblem::Catalog(p) => p.name,
            BenchProblem::Random(_) => RandomQuartic::NAME,
        }
    }

    pub fn n(&self) -> usize {
        self.dim()
    }

    pub fn x0(&self) -> Vec<f64> {
        match self {
            BenchProblem::Catalog(p) => p.x0.clone(),
            BenchProblem::Random(r) => vec![0.0; r.weights.len()],
        }
    }
}

impl Objective<f64> for BenchProblem {
    fn dim(&self) -> usize {
        match self {
            BenchProblem::Catalog(p) => p.n,
            BenchProblem::Random(r) => r.dim(),
        }
    }
    fn value(&mut self, x: &[f64]) -> f64 {
        match self {
            BenchProblem::Catalog(p) => p.value(x),
            BenchProblem::Random(r) => r.value(x),
        }
    }
    fn gradient(&mut self, x: &[f64], grad: &mut [f64]) {
        match self {
            BenchProblem::Catalog(p) => p.gradient(x, grad),
            BenchProblem::Random(r) => r.gradient(x, grad),
        }
    }
}

/// The catalog up to `max_n` plus one seeded random problem of dimension `min(max_n, 100)`.
pub fn standard_problems(max_n: usize, seed: u64) -> Vec<BenchProblem> {
    let mut out: Vec<BenchProblem> = ldltr::catalog(max_n).into_iter().map(BenchProblem::Catalog).collect();
    out.push(BenchProblem::Random(RandomQuartic::new(max_n.min(100), seed)));
    out
}

/// Runs one solver on one problem. Timing covers the solve call only.
pub fn run_one(solver: SolverId, problem: &BenchProblem, config: &SuiteConfig) -> RunRecord {
    let n = problem.n();
    let x0 = problem.x0();
    let instance = problem.clone();
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| solve(solver, instance, &x0, config)));
    match outcome {
        Ok(Some(report)) => RunRecord::from_report(problem.name(), n, solver, &report),
        _ => RunRecord {
            problem: problem.name().to_string(),
            n,
            solver: solver.as_str().to_string(),
            status: Status::EvaluatorFailure,
            iterations: 0,
            fevals: 0,
            gevals: 0,
            final_f: f64::NAN,
            final_gnorm: f64::NAN,
            wall_time_s: start.elapsed().as_secs_f64(),
        },
    }
}

fn solve(solver: SolverId, problem: BenchProblem, x0: &[f64], config: &SuiteConfig) -> Option<SolveReport<f64>> {
    match solver {
        SolverId::Ldltr => {
            let cfg = SolverConfig { eps: config.eps, k_max: config.k_max, ..SolverConfig::default() };
            minimize(problem, x0, &cfg).ok()
        }
        SolverId::Ms => {
            let cfg = SolverConfig { eps: config.eps, k_max: config.k_max, ..SolverConfig::exact_only() };
            minimize(problem, x0, &cfg).ok()
        }
        SolverId::Bfgsr => {
            let cfg = BfgsrConfig { eps: config.eps, k_max: config.k_max, ..BfgsrConfig::default() };
            Some(bfgsr_minimize(problem, x0, &cfg))
        }
    }
}

/// Runs every supported (solver, problem) pair. `on_record` is called once per
/// finished run, serialized. The result is sorted by problem, dimension and solver.
pub fn run_suite(
    solvers: &[SolverId],
    problems: &[BenchProblem],
    config: &SuiteConfig,
    on_record: impl Fn(&RunRecord) + Sync,
) -> Result<Vec<RunRecord>, SuiteError> {
    if solvers.is_empty() {
        return Err(SuiteError::NoSolvers);
    }
    if problems.is_empty() {
        return Err(SuiteError::NoProblems);
    }
    let pairs: Vec<(SolverId, &BenchProblem)> = problems
        .iter()
        .flat_map(|p| solvers.iter().filter(|s| s.supports(p.n())).map(move |&s| (s, p)))
        .collect();
    let sink = Mutex::new(Vec::with_capacity(pairs.len()));
    let work = || {
        pairs.par_iter().for_each(|&(s, p)| {
            let rec = run_one(s, p, config);
            let mut out = sink.lock().unwrap_or_else(|e| e.into_inner());
            on_record(&rec);
            out.push(rec);
        })
    };
    if config.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| SuiteError::ThreadPool(e.to_string()))?
            .install(work);
    } else {
        work();
    }
    let mut records = sink.into_inner().unwrap_or_else(|e| e.into_inner());
    records.sort_by(|a, b| (&a.problem, a.n, &a.solver).cmp(&(&b.problem, b.n, &b.solver)));
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solver_ids_round_trip() {
        for s in [SolverId::Ldltr, SolverId::Bfgsr, SolverId::Ms] {
            assert_eq!(s.as_str().parse::<SolverId>().unwrap(), s);
        }
        assert!("newton".parse::<SolverId>().is_err());
    }

    #[test]
    fn empty_inputs_rejected() {
        let probs = standard_problems(2, 0);
        assert_eq!(run_suite(&[], &probs, &SuiteConfig::default(), |_| {}), Err(SuiteError::NoSolvers));
        assert_eq!(run_suite(&[SolverId::Ldltr], &[], &SuiteConfig::default(), |_| {}), Err(SuiteError::NoProblems));
    }

    #[test]
    fn random_problem_is_seeded() {
        assert_eq!(RandomQuartic::new(5, 3), RandomQuartic::new(5, 3));
        assert_ne!(RandomQuartic::new(5, 3), RandomQuartic::new(5, 4));
    }

    #[test]
    fn random_problem_gradient() {
        let mut r = RandomQuartic::new(6, 11);
        let x: Vec<f64> = (0..6).map(|i| 0.3 * i as f64 - 0.7).collect();
        assert!(ldltr::gradient_check(&mut r, &[x]) < 1e-7);
    }
}
