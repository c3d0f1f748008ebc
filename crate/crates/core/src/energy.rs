//! Penalty energy over start times and its subgradient.
//!
//! ```text
//! E(S) = sum_{i->j} max(0, S_i + D_i - S_j)^2
//!      + beta * sum_i S_i
//!      + lambda_d * sum_i max(0, S_i + D_i - T_max)^2
//!      + lambda_r * sum_t max(0, R(t) - R_max)^2
//! ```
//!
//! The precedence hinge is kept on every edge. The resource usage `R(t)` is
//! sampled on a uniform grid and is piecewise constant in each start time, so
//! its gradient component is a central difference with step `grid_dt`.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{makespan_of, ProjectNetwork, Schedule};
use crate::par::Execution;

pub const DEFAULT_BETA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnergyConfig {
    pub beta: f64,
    pub deadline: Option<f64>,
    pub resource_max: Option<f64>,
    pub lambda_deadline: f64,
    pub lambda_resource: f64,
    pub grid_dt: f64,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        Self {
            beta: DEFAULT_BETA,
            deadline: None,
            resource_max: None,
            lambda_deadline: 1.0,
            lambda_resource: 1.0,
            grid_dt: 1.0,
        }
    }
}

impl EnergyConfig {
    pub fn validate(&self) -> Result<()> {
        let nonneg = |name: &str, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be finite and >= 0, got {v}")))
            }
        };
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be finite and > 0, got {v}")))
            }
        };
        nonneg("beta", self.beta)?;
        nonneg("lambda_deadline", self.lambda_deadline)?;
        nonneg("lambda_resource", self.lambda_resource)?;
        positive("grid_dt", self.grid_dt)?;
        if let Some(t) = self.deadline {
            positive("deadline", t)?;
        }
        if let Some(r) = self.resource_max {
            positive("resource_max", r)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub precedence: f64,
    pub start_sum: f64,
    pub deadline: f64,
    pub resource: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn weighted_total(&self, cfg: &EnergyConfig) -> f64 {
        self.precedence
            + cfg.beta * self.start_sum
            + cfg.lambda_deadline * self.deadline
            + cfg.lambda_resource * self.resource
    }
}

/// Resource usage sampled at `t = k * dt` for `k = 0..samples.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceProfile {
    pub dt: f64,
    pub samples: Vec<f64>,
}

impl ResourceProfile {
    pub fn at(&self, k: usize) -> f64 {
        self.samples.get(k).copied().unwrap_or(0.0)
    }
}

#[inline]
fn hinge(x: f64) -> f64 {
    x.max(0.0)
}

pub fn precedence_energy(net: &ProjectNetwork, s: &Schedule) -> Result<f64> {
    net.check(s)?;
    Ok(precedence_raw(net, s.as_slice()))
}

fn precedence_raw(net: &ProjectNetwork, s: &[f64]) -> f64 {
    net.edges()
        .iter()
        .map(|&(i, j)| {
            let v = hinge(s[i] + net.task(i).duration - s[j]);
            v * v
        })
        .sum()
}

pub fn deadline_energy(net: &ProjectNetwork, s: &Schedule, t_max: f64) -> Result<f64> {
    net.check(s)?;
    Ok(deadline_raw(net, s.as_slice(), t_max))
}

fn deadline_raw(net: &ProjectNetwork, s: &[f64], t_max: f64) -> f64 {
    net.tasks()
        .iter()
        .zip(s)
        .map(|(t, &start)| {
            let v = hinge(start + t.duration - t_max);
            v * v
        })
        .sum()
}

/// Sum of per-task deadline overshoot `max(0, F_i - T_max)`, linear.
pub fn deadline_overshoot(net: &ProjectNetwork, s: &Schedule, t_max: f64) -> Result<f64> {
    net.check(s)?;
    Ok(net
        .tasks()
        .iter()
        .zip(s.as_slice())
        .map(|(t, &start)| hinge(start + t.duration - t_max))
        .sum())
}

/// Sample indices `k` with `start <= k*dt < start + duration`.
pub(crate) fn active_samples(start: f64, duration: f64, dt: f64) -> Range<usize> {
    if !(duration > 0.0) {
        return 0..0;
    }
    let first_at_or_after = |x: f64| -> usize {
        let mut k = (x / dt).ceil().max(0.0) as usize;
        while k > 0 && ((k - 1) as f64) * dt >= x {
            k -= 1;
        }
        while (k as f64) * dt < x {
            k += 1;
        }
        k
    };
    let lo = first_at_or_after(start);
    let hi = first_at_or_after(start + duration);
    lo..hi.max(lo)
}

pub fn resource_profile(net: &ProjectNetwork, s: &Schedule, dt: f64) -> Result<ResourceProfile> {
    net.check(s)?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Config(format!("grid_dt must be finite and > 0, got {dt}")));
    }
    Ok(profile_raw(net, s.as_slice(), dt))
}

fn profile_raw(net: &ProjectNetwork, s: &[f64], dt: f64) -> ResourceProfile {
    let span = makespan_of(net.tasks(), s);
    let mut last = (span / dt).ceil().max(0.0) as usize;
    while (last as f64) * dt < span {
        last += 1;
    }
    let mut samples = vec![0.0; last + 1];
    for (t, &start) in net.tasks().iter().zip(s) {
        if t.demand == 0.0 {
            continue;
        }
        for k in active_samples(start, t.duration, dt) {
            samples[k] += t.demand;
        }
    }
    ResourceProfile { dt, samples }
}

pub fn resource_energy(profile: &ResourceProfile, r_max: f64) -> f64 {
    profile
        .samples
        .iter()
        .map(|&r| {
            let v = hinge(r - r_max);
            v * v
        })
        .sum()
}

pub fn total_energy(net: &ProjectNetwork, s: &Schedule, cfg: &EnergyConfig) -> Result<EnergyBreakdown> {
    net.check(s)?;
    let raw = s.as_slice();
    let mut e = EnergyBreakdown {
        precedence: precedence_raw(net, raw),
        start_sum: raw.iter().sum(),
        deadline: cfg.deadline.map_or(0.0, |t| deadline_raw(net, raw, t)),
        resource: cfg
            .resource_max
            .map_or(0.0, |r| resource_energy(&profile_raw(net, raw, cfg.grid_dt), r)),
        total: 0.0,
    };
    e.total = e.weighted_total(cfg);
    Ok(e)
}

pub fn energy_gradient(net: &ProjectNetwork, s: &Schedule, cfg: &EnergyConfig) -> Result<Vec<f64>> {
    energy_gradient_with(net, s, cfg, Execution::default())
}

pub fn energy_gradient_with(
    net: &ProjectNetwork,
    s: &Schedule,
    cfg: &EnergyConfig,
    exec: Execution,
) -> Result<Vec<f64>> {
    net.check(s)?;
    Ok(gradient_raw(net, s.as_slice(), cfg, exec))
}

/// Below this size per-coordinate work is too small to fan out.
const PAR_THRESHOLD: usize = 256;

pub(crate) fn gradient_raw(net: &ProjectNetwork, s: &[f64], cfg: &EnergyConfig, exec: Execution) -> Vec<f64> {
    let n = net.len();
    let exec = if n < PAR_THRESHOLD { Execution::Sequential } else { exec };
    let resource = cfg
        .resource_max
        .filter(|_| cfg.lambda_resource != 0.0 && net.has_demands())
        .map(|r_max| (r_max, profile_raw(net, s, cfg.grid_dt)));

    exec.map_range(n, |i| {
        let d_i = net.task(i).duration;
        let out: f64 = net.successors(i).iter().map(|&j| hinge(s[i] + d_i - s[j])).sum();
        let inc: f64 = net
            .predecessors(i)
            .iter()
            .map(|&k| hinge(s[k] + net.task(k).duration - s[i]))
            .sum();
        let mut g = 2.0 * out - 2.0 * inc + cfg.beta;
        if let Some(t_max) = cfg.deadline {
            g += cfg.lambda_deadline * 2.0 * hinge(s[i] + d_i - t_max);
        }
        if let Some((r_max, profile)) = &resource {
            g += cfg.lambda_resource * resource_difference(net, s, i, profile, *r_max);
        }
        g
    })
}

/// Central difference of the resource energy in coordinate `i` with step
/// `profile.dt`. Only samples touched by task `i` change, so the base energy
/// cancels and the cost is proportional to the task's duration.
fn resource_difference(net: &ProjectNetwork, s: &[f64], i: usize, profile: &ResourceProfile, r_max: f64) -> f64 {
    let task = net.task(i);
    if task.demand == 0.0 || task.duration <= 0.0 {
        return 0.0;
    }
    let h = profile.dt;
    let base = active_samples(s[i], task.duration, h);
    let shifted = |to: f64| -> f64 {
        let moved = active_samples(to, task.duration, h);
        let lo = base.start.min(moved.start);
        let hi = base.end.max(moved.end);
        let mut delta = 0.0;
        for k in lo..hi {
            let was = base.contains(&k);
            let now = moved.contains(&k);
            if was == now {
                continue;
            }
            let before = profile.at(k);
            let after = if now { before + task.demand } else { before - task.demand };
            let a = hinge(after - r_max);
            let b = hinge(before - r_max);
            delta += a * a - b * b;
        }
        delta
    };
    (shifted(s[i] + h) - shifted(s[i] - h)) / (2.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Task;

    fn net(spec: &[(&str, f64, f64)], edges: &[(&str, &str)]) -> ProjectNetwork {
        let tasks = spec.iter().map(|&(id, d, r)| Task::new(id, d).with_demand(r)).collect();
        ProjectNetwork::build(tasks, edges).unwrap()
    }

    fn sched(v: &[f64]) -> Schedule {
        Schedule::new(v.to_vec()).unwrap()
    }

    fn plain(beta: f64) -> EnergyConfig {
        EnergyConfig {
            beta,
            ..Default::default()
        }
    }

    #[test]
    fn precedence_examples() {
        let ab = net(&[("A", 3.0, 0.0), ("B", 1.0, 0.0)], &[("A", "B")]);
        assert_eq!(precedence_energy(&ab, &sched(&[0.0, 1.0])).unwrap(), 4.0);
        assert_eq!(precedence_energy(&ab, &sched(&[0.0, 5.0])).unwrap(), 0.0);
        let join = net(&[("A", 2.0, 0.0), ("B", 5.0, 0.0), ("C", 1.0, 0.0)], &[("A", "C"), ("B", "C")]);
        assert_eq!(precedence_energy(&join, &sched(&[0.0, 0.0, 4.0])).unwrap(), 1.0);
    }

    #[test]
    fn deadline_examples() {
        // F = (5, 9) from S = 0
        let two = net(&[("A", 5.0, 0.0), ("B", 9.0, 0.0)], &[]);
        let z = Schedule::zeros(2);
        assert_eq!(deadline_energy(&two, &z, 8.0).unwrap(), 1.0);
        assert_eq!(deadline_energy(&two, &z, 9.0).unwrap(), 0.0);
        // F = (10, 12)
        let late = sched(&[5.0, 3.0]);
        assert_eq!(deadline_energy(&two, &late, 8.0).unwrap(), 20.0);
        assert_eq!(deadline_overshoot(&two, &late, 8.0).unwrap(), 6.0);
    }

    #[test]
    fn profile_examples() {
        let ab = net(&[("A", 2.0, 2.0), ("B", 2.0, 2.0)], &[]);
        let p = resource_profile(&ab, &sched(&[0.0, 1.0]), 1.0).unwrap();
        assert_eq!(p.samples, vec![2.0, 4.0, 2.0, 0.0]);

        let free = net(&[("A", 2.0, 0.0), ("B", 3.0, 0.0)], &[]);
        let p = resource_profile(&free, &sched(&[0.0, 1.0]), 1.0).unwrap();
        assert!(p.samples.iter().all(|&r| r == 0.0));

        let one = net(&[("A", 1.0, 5.0)], &[]);
        let p = resource_profile(&one, &sched(&[0.0]), 1.0).unwrap();
        assert_eq!(p.samples, vec![5.0, 0.0]);

        let milestone = net(&[("M", 0.0, 9.0), ("A", 1.0, 1.0)], &[]);
        let p = resource_profile(&milestone, &sched(&[0.0, 0.0]), 1.0).unwrap();
        assert_eq!(p.samples, vec![1.0, 0.0]);
    }

    #[test]
    fn active_samples_half_open() {
        assert_eq!(active_samples(0.0, 2.0, 1.0), 0..2);
        assert_eq!(active_samples(0.5, 1.0, 1.0), 1..2);
        assert_eq!(active_samples(0.5, 0.4, 1.0), 1..1);
        assert_eq!(active_samples(-1.5, 2.0, 1.0), 0..1);
        assert_eq!(active_samples(0.3, 0.3, 0.1), 3..6);
        for (start, dur, dt) in [(0.3, 0.3, 0.1), (1.7, 2.25, 0.25), (0.0, 7.1, 0.7)] {
            let r = active_samples(start, dur, dt);
            for k in 0..200usize {
                let t = k as f64 * dt;
                assert_eq!(r.contains(&k), start <= t && t < start + dur, "{start} {dur} {dt} k={k}");
            }
        }
    }

    #[test]
    fn resource_energy_examples() {
        let p = |v: &[f64]| ResourceProfile { dt: 1.0, samples: v.to_vec() };
        assert_eq!(resource_energy(&p(&[2.0, 4.0, 2.0]), 3.0), 1.0);
        assert_eq!(resource_energy(&p(&[2.0, 4.0, 2.0]), 4.0), 0.0);
        assert_eq!(resource_energy(&p(&[6.0, 6.0]), 3.0), 18.0);
    }

    #[test]
    fn total_examples() {
        let ab = net(&[("A", 3.0, 0.0), ("B", 1.0, 0.0)], &[("A", "B")]);
        let e = total_energy(&ab, &sched(&[0.0, 3.0]), &plain(0.0)).unwrap();
        assert_eq!(e.total, 0.0);

        let s = sched(&[0.0, 1.0]);
        let e = total_energy(&ab, &s, &plain(0.5)).unwrap();
        assert_eq!((e.precedence, e.start_sum, e.total), (4.0, 1.0, 4.5));

        // F = (3, 2) against T_max = 2: only A overshoots, by 1
        let cfg = EnergyConfig { deadline: Some(2.0), ..plain(0.5) };
        let e = total_energy(&ab, &s, &cfg).unwrap();
        assert_eq!(e.deadline, 1.0);
        assert_eq!(e.total, 5.5);
        assert_eq!(e.total, e.weighted_total(&cfg));
    }

    #[test]
    fn gradient_examples() {
        let ab = net(&[("A", 3.0, 0.0), ("B", 1.0, 0.0)], &[("A", "B")]);
        assert_eq!(energy_gradient(&ab, &sched(&[0.0, 1.0]), &plain(0.0)).unwrap(), vec![4.0, -4.0]);

        let one = net(&[("A", 2.0, 0.0)], &[]);
        assert_eq!(energy_gradient(&one, &sched(&[3.0]), &plain(0.0)).unwrap(), vec![0.0]);

        assert_eq!(
            energy_gradient(&ab, &sched(&[0.0, 10.0]), &plain(0.25)).unwrap(),
            vec![0.25, 0.25]
        );
        // exactly at the kink the hinge contributes nothing
        assert_eq!(energy_gradient(&ab, &sched(&[0.0, 3.0]), &plain(0.0)).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn resource_difference_matches_full_recompute() {
        let tasks: Vec<Task> = (0..12)
            .map(|i| Task::new(format!("T{i}"), 1.0 + (i % 4) as f64 * 0.75).with_demand(1.0 + (i % 3) as f64))
            .collect();
        let n = ProjectNetwork::from_indices(tasks, vec![(0, 5), (2, 7)]).unwrap();
        let starts: Vec<f64> = (0..12).map(|i| (i as f64 * 0.37) % 3.0).collect();
        let s = sched(&starts);
        for dt in [1.0, 0.5, 0.3] {
            let cfg = EnergyConfig { beta: 0.0, resource_max: Some(4.0), grid_dt: dt, ..Default::default() };
            let g = energy_gradient(&n, &s, &cfg).unwrap();
            let no_res = energy_gradient(&n, &s, &EnergyConfig { resource_max: None, ..cfg }).unwrap();
            for i in 0..12 {
                // naive: rebuild the whole profile at S +- dt, negative starts allowed
                let eval = |shift: f64| {
                    let mut v = starts.clone();
                    v[i] += shift;
                    resource_energy(&profile_raw(&n, &v, dt), 4.0)
                };
                let fd = (eval(dt) - eval(-dt)) / (2.0 * dt);
                let got = g[i] - no_res[i];
                assert!((got - fd).abs() <= 1e-9 * (1.0 + fd.abs()), "i={i} dt={dt}: {got} vs {fd}");
            }
        }
    }

    #[test]
    fn execution_modes_bitwise_equal() {
        let tasks: Vec<Task> = (0..600)
            .map(|i| Task::new(format!("T{i}"), 1.0 + (i % 7) as f64).with_demand(1.0 + (i % 3) as f64))
            .collect();
        let edges = (0..599).filter(|i| i % 3 != 0).map(|i| (i, i + 1)).collect();
        let n = ProjectNetwork::from_indices(tasks, edges).unwrap();
        let s = sched(&(0..600).map(|i| (i as f64 * 0.61) % 40.0).collect::<Vec<_>>());
        let cfg = EnergyConfig { deadline: Some(30.0), resource_max: Some(15.0), ..Default::default() };
        let a = energy_gradient_with(&n, &s, &cfg, Execution::Sequential).unwrap();
        let b = energy_gradient_with(&n, &s, &cfg, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_validation() {
        assert!(EnergyConfig::default().validate().is_ok());
        assert!(EnergyConfig { beta: -1.0, ..Default::default() }.validate().is_err());
        assert!(EnergyConfig { grid_dt: 0.0, ..Default::default() }.validate().is_err());
        assert!(EnergyConfig { deadline: Some(0.0), ..Default::default() }.validate().is_err());
        assert!(EnergyConfig { lambda_resource: f64::NAN, ..Default::default() }.validate().is_err());
    }
}
