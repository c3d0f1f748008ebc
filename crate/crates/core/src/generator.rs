//! Seeded random project networks.
//!
//! Tasks are labelled `1..=N` and edges only run from a lower to a higher
//! label, which keeps every instance acyclic. All randomness comes from a
//! ChaCha8 stream seeded from a single `u64`, drawn in a fixed order:
//! durations, then demands, then edges.

use rand::distributions::{Distribution, Uniform};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{ProjectNetwork, Task};
use crate::par::Execution;

/// Identifies the generator stream in reports.
pub const PRNG_NAME: &str = "ChaCha8Rng/seed_from_u64";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeTarget {
    /// Exactly this many distinct forward edges.
    Count(usize),
    /// Each forward pair independently with this probability.
    Probability(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n_tasks: usize,
    pub edges: EdgeTarget,
    pub duration_range: (f64, f64),
    pub demand_range: Option<(f64, f64)>,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(n_tasks: usize, edges: EdgeTarget) -> Self {
        Self {
            n_tasks,
            edges,
            duration_range: (1.0, 10.0),
            demand_range: None,
            seed: 0,
        }
    }

    pub fn with_demands(mut self, lo: f64, hi: f64) -> Self {
        self.demand_range = Some((lo, hi));
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn max_edges(&self) -> usize {
        self.n_tasks * self.n_tasks.saturating_sub(1) / 2
    }

    pub fn validate(&self) -> Result<()> {
        let check_range = |name: &str, (lo, hi): (f64, f64)| {
            if lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi {
                Ok(())
            } else {
                Err(Error::InfeasibleSpec(format!("{name} range [{lo}, {hi}] must satisfy 0 <= min <= max")))
            }
        };
        check_range("duration", self.duration_range)?;
        if let Some(r) = self.demand_range {
            check_range("demand", r)?;
        }
        match self.edges {
            EdgeTarget::Count(k) if k > self.max_edges() => Err(Error::InfeasibleSpec(format!(
                "{k} edges requested but {} tasks allow at most {}",
                self.n_tasks,
                self.max_edges()
            ))),
            EdgeTarget::Probability(p) if !(0.0..=1.0).contains(&p) => {
                Err(Error::InfeasibleSpec(format!("edge probability {p} outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }
}

/// Maps sorted linear indices over the row-major `i < j` pairs to pairs.
fn pairs_from_linear(n: usize, sorted: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(sorted.len());
    let mut row = 0;
    let mut row_start = 0;
    for &k in sorted {
        while k >= row_start + (n - 1 - row) {
            row_start += n - 1 - row;
            row += 1;
        }
        out.push((row, row + 1 + (k - row_start)));
    }
    out
}

pub fn generate(spec: &GenSpec) -> Result<ProjectNetwork> {
    spec.validate()?;
    let n = spec.n_tasks;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let (lo, hi) = spec.duration_range;
    let durations = Uniform::new_inclusive(lo, hi);
    let mut tasks: Vec<Task> = (1..=n)
        .map(|label| Task::new(label.to_string(), durations.sample(&mut rng)))
        .collect();
    if let Some((lo, hi)) = spec.demand_range {
        let demands = Uniform::new_inclusive(lo, hi);
        for t in &mut tasks {
            t.demand = demands.sample(&mut rng);
        }
    }

    let edges = match spec.edges {
        EdgeTarget::Count(k) => {
            let mut picked = index::sample(&mut rng, spec.max_edges(), k).into_vec();
            picked.sort_unstable();
            pairs_from_linear(n, &picked)
        }
        EdgeTarget::Probability(p) => {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen::<f64>() < p {
                        edges.push((i, j));
                    }
                }
            }
            edges
        }
    };
    ProjectNetwork::from_indices(tasks, edges)
}

#[derive(Debug, Clone)]
pub struct SuiteInstance {
    pub row: usize,
    pub run: usize,
    pub seed: u64,
    pub network: ProjectNetwork,
}

/// Seeds run `base_seed + row * runs_per_row + k`; each row's own seed is ignored.
pub fn suite_seeds(rows: usize, runs_per_row: usize, base_seed: u64) -> Vec<(usize, usize, u64)> {
    (0..rows)
        .flat_map(|row| {
            (0..runs_per_row).map(move |k| (row, k, base_seed.wrapping_add((row * runs_per_row + k) as u64)))
        })
        .collect()
}

pub fn generate_suite(
    rows: &[GenSpec],
    runs_per_row: usize,
    base_seed: u64,
    exec: Execution,
) -> Result<Vec<SuiteInstance>> {
    let plan = suite_seeds(rows.len(), runs_per_row, base_seed);
    exec.map_slice(&plan, |&(row, run, seed)| {
        let network = generate(&rows[row].with_seed(seed)).map_err(|e| Error::Instance { seed, source: Box::new(e) })?;
        Ok(SuiteInstance { row, run, seed, network })
    })
    .into_iter()
    .collect()
}
