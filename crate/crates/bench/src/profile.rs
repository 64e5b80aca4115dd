//! Extended performance profiles.
//!
//! For problem `p` and solver `s` the ratio is `π_{p,s} = t_{p,s} / min_{i≠s} t_{p,i}`,
//! so values below one mark problems where `s` beat every other solver.
//! Failed runs get `π = ∞`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::suite::RunRecord;

/// Number of points on the τ grid.
pub const GRID_POINTS: usize = 512;

/// Smallest metric value used in a ratio, so zero counts and clock ticks stay finite.
const TIME_FLOOR: f64 = 1e-9;
const COUNT_FLOOR: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Time,
    Iterations,
    Fevals,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Time => "time",
            Metric::Iterations => "iters",
            Metric::Fevals => "fevals",
        }
    }

    /// Metric value of a successful run, `None` for a failure.
    pub fn value(self, r: &RunRecord) -> Option<f64> {
        if !r.status.is_success() {
            return None;
        }
        Some(match self {
            Metric::Time => r.wall_time_s.max(TIME_FLOOR),
            Metric::Iterations => (r.iterations as f64).max(COUNT_FLOOR),
            Metric::Fevals => (r.fevals as f64).max(COUNT_FLOOR),
        })
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "time" => Ok(Metric::Time),
            "iters" | "iterations" => Ok(Metric::Iterations),
            "fevals" => Ok(Metric::Fevals),
            other => Err(format!("unknown metric `{other}` (expected time, iters or fevals)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub tau: f64,
    pub rho: f64,
}

/// Ratios and the sampled curve of one solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverProfile {
    pub solver: String,
    /// `π_{p,s}` for each problem in [`Profiles::problems`] order.
    pub ratios: Vec<f64>,
    pub points: Vec<ProfilePoint>,
}

impl SolverProfile {
    /// `ρ_s(τ) = |{p : π_{p,s} ≤ τ}| / n_p`
    pub fn rho(&self, tau: f64) -> f64 {
        if self.ratios.is_empty() {
            return 0.0;
        }
        self.ratios.iter().filter(|&&r| r <= tau).count() as f64 / self.ratios.len() as f64
    }

    /// Fraction of problems with a finite ratio.
    pub fn solved_fraction(&self) -> f64 {
        self.rho(f64::MAX)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profiles {
    pub metric: Metric,
    /// `(problem, n)` pairs run by every solver.
    pub problems: Vec<(String, usize)>,
    pub solvers: Vec<SolverProfile>,
    /// Single solver: the ratio is taken against the solver itself.
    pub classical: bool,
}

/// Builds profiles from `records`, restricted to problems every solver ran.
pub fn performance_profile(records: &[RunRecord], metric: Metric) -> Profiles {
    let solvers: BTreeSet<&str> = records.iter().map(|r| r.solver.as_str()).collect();
    let mut table: BTreeMap<(String, usize), BTreeMap<&str, Option<f64>>> = BTreeMap::new();
    for r in records {
        table.entry((r.problem.clone(), r.n)).or_default().insert(r.solver.as_str(), metric.value(r));
    }
    table.retain(|_, row| row.len() == solvers.len());
    let classical = solvers.len() < 2;

    let mut profiles: Vec<SolverProfile> = solvers
        .iter()
        .map(|&s| {
            let ratios = table
                .values()
                .map(|row| {
                    let Some(t) = row[s] else { return f64::INFINITY };
                    let best_other = row
                        .iter()
                        .filter(|(&other, _)| classical || other != s)
                        .filter_map(|(_, v)| *v)
                        .fold(f64::INFINITY, f64::min);
                    if best_other.is_infinite() {
                        0.0
                    } else {
                        t / best_other
                    }
                })
                .collect();
            SolverProfile { solver: s.to_string(), ratios, points: Vec::new() }
        })
        .collect();

    let grid = tau_grid(profiles.iter().flat_map(|p| p.ratios.iter().copied()));
    for p in &mut profiles {
        p.points = grid.iter().map(|&tau| ProfilePoint { tau, rho: p.rho(tau) }).collect();
    }
    Profiles { metric, problems: table.into_keys().collect(), solvers: profiles, classical }
}

/// Log-spaced grid on `[min π / 2, 2·max finite π]` over the positive finite ratios.
pub fn tau_grid(ratios: impl Iterator<Item = f64>) -> Vec<f64> {
    let (lo, hi) = ratios
        .filter(|r| r.is_finite() && *r > 0.0)
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
    let (lo, hi) = if hi > 0.0 { (lo / 2.0, hi * 2.0) } else { (0.5, 2.0) };
    let (a, b) = (lo.ln(), hi.ln());
    (0..GRID_POINTS)
        .map(|i| (a + (b - a) * i as f64 / (GRID_POINTS - 1) as f64).exp())
        .collect()
}
