//! Clamped subgradient dynamics on the schedule energy.
//!
//! Every iteration updates all start times at once from the pre-step state,
//! `S <- max(0, S - alpha * grad E(S))`, and stops once the largest change
//! stays below `tol` for `tol_window` consecutive iterations or the budget
//! runs out. An optional forward repair pass then lifts each start to its
//! predecessors' latest finish.

use serde::{Deserialize, Serialize};

use crate::energy::{gradient_raw, total_energy, EnergyBreakdown, EnergyConfig};
use crate::error::{Error, Result};
use crate::network::{ProjectNetwork, Schedule};
use crate::par::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub alpha: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub tol_window: usize,
    pub repair: bool,
    pub record_trace: bool,
    /// Reserved; the dynamics are deterministic and draw no randomness.
    pub seed: Option<u64>,
    pub execution: Execution,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            alpha: 0.01,
            max_iters: 5000,
            tol: 1e-4,
            tol_window: 10,
            repair: true,
            record_trace: false,
            seed: None,
            execution: Execution::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::Config(format!("alpha must be finite and > 0, got {}", self.alpha)));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::Config(format!("tol must be finite and > 0, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be >= 1".into()));
        }
        if self.tol_window == 0 {
            return Err(Error::Config("tol_window must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    /// Final schedule; repaired when repair is enabled.
    pub schedule: Schedule,
    /// State the dynamics stopped in, before any repair.
    pub raw_schedule: Schedule,
    pub iterations: usize,
    pub converged: bool,
    pub energy_trace: Option<Vec<EnergyBreakdown>>,
    /// Energy of `schedule`.
    pub final_energy: EnergyBreakdown,
    pub violation: f64,
    pub violation_pre_repair: f64,
    pub makespan: f64,
    pub makespan_pre_repair: f64,
    /// True when the repair pass moved at least one start time.
    pub repaired: bool,
}

/// One synchronous clamped update.
pub fn solve_step(net: &ProjectNetwork, s: &Schedule, cfg: &EnergyConfig, alpha: f64) -> Result<Schedule> {
    net.check(s)?;
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Config(format!("alpha must be finite and > 0, got {alpha}")));
    }
    step_raw(net, s.as_slice(), cfg, alpha, Execution::default()).map_err(|task| Error::NonFinite { iteration: 0, task })
}

/// Returns the offending task index on a non-finite update.
fn step_raw(
    net: &ProjectNetwork,
    s: &[f64],
    cfg: &EnergyConfig,
    alpha: f64,
    exec: Execution,
) -> std::result::Result<Schedule, usize> {
    let grad = gradient_raw(net, s, cfg, exec);
    let mut next = Vec::with_capacity(s.len());
    for (i, (&v, g)) in s.iter().zip(grad).enumerate() {
        let raw = v - alpha * g;
        if !raw.is_finite() {
            return Err(i);
        }
        next.push(raw.max(0.0));
    }
    Ok(Schedule::from_clamped(next))
}

pub fn solve(
    net: &ProjectNetwork,
    energy: &EnergyConfig,
    cfg: &SolverConfig,
    initial: Option<&Schedule>,
) -> Result<SolveResult> {
    energy.validate()?;
    cfg.validate()?;
    let mut s = match initial {
        Some(init) => {
            net.check(init)?;
            init.clone()
        }
        None => Schedule::zeros(net.len()),
    };

    let mut trace = cfg.record_trace.then(Vec::new);
    let mut iterations = 0;
    let mut quiet = 0;
    let mut converged = false;
    while iterations < cfg.max_iters {
        let next = step_raw(net, s.as_slice(), energy, cfg.alpha, cfg.execution)
            .map_err(|task| Error::NonFinite { iteration: iterations + 1, task })?;
        let delta = next
            .as_slice()
            .iter()
            .zip(s.as_slice())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        s = next;
        iterations += 1;
        if let Some(trace) = trace.as_mut() {
            trace.push(total_energy(net, &s, energy)?);
        }
        if delta < cfg.tol {
            quiet += 1;
            if quiet >= cfg.tol_window {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }

    let violation_pre_repair = net.violation_mass(&s)?;
    let makespan_pre_repair = net.makespan(&s)?;
    let (schedule, repaired) = if cfg.repair {
        let fixed = repair_schedule(net, &s)?;
        let moved = fixed != s;
        (fixed, moved)
    } else {
        (s.clone(), false)
    };
    Ok(SolveResult {
        final_energy: total_energy(net, &schedule, energy)?,
        violation: net.violation_mass(&schedule)?,
        makespan: net.makespan(&schedule)?,
        schedule,
        raw_schedule: s,
        iterations,
        converged,
        energy_trace: trace,
        violation_pre_repair,
        makespan_pre_repair,
        repaired,
    })
}

/// Forward pass in topological order lifting each start to the latest
/// predecessor finish. Never moves a start earlier.
pub fn repair_schedule(net: &ProjectNetwork, s: &Schedule) -> Result<Schedule> {
    net.check(s)?;
    let mut out = s.as_slice().to_vec();
    for &j in net.topological_order() {
        for &i in net.predecessors(j) {
            let finish = out[i] + net.task(i).duration;
            if finish > out[j] {
                out[j] = finish;
            }
        }
    }
    Ok(Schedule::from_clamped(out))
}
