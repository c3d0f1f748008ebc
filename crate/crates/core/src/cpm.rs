//! Critical path method: forward and backward passes, slack, and the critical
//! chain. This is the exact resource-free baseline the dynamics are judged
//! against.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{ProjectNetwork, Schedule};

pub const BRUTE_FORCE_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CpmResult {
    pub earliest_start: Vec<f64>,
    pub latest_start: Vec<f64>,
    pub slack: Vec<f64>,
    pub t_opt: f64,
    /// Task indices along the critical chain, source first.
    pub critical_path: Vec<usize>,
}

impl CpmResult {
    pub fn earliest_schedule(&self) -> Schedule {
        Schedule::from_clamped(self.earliest_start.clone())
    }

    pub fn critical_ids(&self, net: &ProjectNetwork) -> Vec<String> {
        self.critical_path.iter().map(|&i| net.task(i).id.clone()).collect()
    }
}

pub fn analyze(net: &ProjectNetwork) -> CpmResult {
    let (earliest_start, t_opt) = forward(net);
    let (latest_start, slack) = backward(net, &earliest_start, t_opt);
    let mut result = CpmResult {
        earliest_start,
        latest_start,
        slack,
        t_opt,
        critical_path: Vec::new(),
    };
    result.critical_path = critical_path(net, &result);
    result
}

/// Earliest starts and the optimal makespan.
pub fn forward(net: &ProjectNetwork) -> (Vec<f64>, f64) {
    let mut es = vec![0.0; net.len()];
    for &j in net.topological_order() {
        es[j] = net
            .predecessors(j)
            .iter()
            .map(|&i| es[i] + net.task(i).duration)
            .fold(0.0, f64::max);
    }
    let t_opt = es
        .iter()
        .zip(net.tasks())
        .map(|(s, t)| s + t.duration)
        .fold(0.0, f64::max);
    (es, t_opt)
}

/// Snaps round-off slack to zero.
fn zero_tolerance(t_opt: f64) -> f64 {
    1e-9 * t_opt.max(1.0)
}

/// Latest starts and slack, with sinks anchored at `t_opt`.
pub fn backward(net: &ProjectNetwork, earliest: &[f64], t_opt: f64) -> (Vec<f64>, Vec<f64>) {
    let mut ls = vec![0.0; net.len()];
    for &i in net.topological_order().iter().rev() {
        let latest_finish = net
            .successors(i)
            .iter()
            .map(|&j| ls[j])
            .fold(t_opt, f64::min);
        ls[i] = latest_finish - net.task(i).duration;
    }
    let eps = zero_tolerance(t_opt);
    let slack = ls
        .iter()
        .zip(earliest)
        .map(|(l, e)| {
            let s = l - e;
            if s.abs() <= eps {
                0.0
            } else {
                s
            }
        })
        .collect();
    (ls, slack)
}

/// Walks tight zero-slack edges from the lowest-indexed critical source,
/// always taking the lowest-indexed qualifying successor.
pub fn critical_path(net: &ProjectNetwork, cpm: &CpmResult) -> Vec<usize> {
    let eps = zero_tolerance(cpm.t_opt);
    let es = &cpm.earliest_start;
    let Some(mut current) = (0..net.len()).find(|&i| net.predecessors(i).is_empty() && cpm.slack[i] == 0.0)
    else {
        return Vec::new();
    };
    let mut path = vec![current];
    loop {
        let finish = es[current] + net.task(current).duration;
        let next = net
            .successors(current)
            .iter()
            .copied()
            .find(|&j| cpm.slack[j] == 0.0 && (es[j] - finish).abs() <= eps);
        match next {
            Some(j) => {
                path.push(j);
                current = j;
            }
            None => break,
        }
    }
    path
}

/// Longest source-to-sink path by explicit enumeration of every path.
pub fn brute_force_makespan(net: &ProjectNetwork) -> Result<f64> {
    if net.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            n: net.len(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    fn walk(net: &ProjectNetwork, node: usize, acc: f64, best: &mut f64) {
        let acc = acc + net.task(node).duration;
        if net.successors(node).is_empty() {
            *best = best.max(acc);
            return;
        }
        for &next in net.successors(node) {
            walk(net, next, acc, best);
        }
    }
    let mut best = 0.0;
    for source in (0..net.len()).filter(|&i| net.predecessors(i).is_empty()) {
        walk(net, source, 0.0, &mut best);
    }
    Ok(best)
}
