//! Project networks: tasks, the directed precedence DAG between them, and
//! start-time schedules evaluated against it.
//!
//! An edge `(i, j)` means task `j` depends on task `i`, i.e. `j` may not start
//! before `i` finishes. Edges are kept directed; there is no weight matrix,
//! only successor and predecessor adjacency lists.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: String,
    pub duration: f64,
    #[serde(default)]
    pub demand: f64,
}

impl Task {
    pub fn new(id: impl Into<String>, duration: f64) -> Self {
        Self {
            id: id.into(),
            duration,
            demand: 0.0,
        }
    }

    pub fn with_demand(mut self, demand: f64) -> Self {
        self.demand = demand;
        self
    }
}

/// A validated, immutable precedence DAG.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectNetwork {
    tasks: Vec<Task>,
    edges: Vec<(usize, usize)>,
    successors: Vec<Vec<usize>>,
    predecessors: Vec<Vec<usize>>,
    order: Vec<usize>,
    index: HashMap<String, usize>,
}

impl ProjectNetwork {
    /// Builds a network from tasks and id-pair edges.
    pub fn build<S: AsRef<str>>(tasks: Vec<Task>, edges: &[(S, S)]) -> Result<Self> {
        let index = index_tasks(&tasks)?;
        let mut resolved = Vec::with_capacity(edges.len());
        for (from, to) in edges {
            let (from, to) = (from.as_ref(), to.as_ref());
            let lookup = |id: &str| {
                index.get(id).copied().ok_or_else(|| Error::UnknownEndpoint {
                    from: from.to_string(),
                    to: to.to_string(),
                    missing: id.to_string(),
                })
            };
            resolved.push((lookup(from)?, lookup(to)?));
        }
        Self::assemble(tasks, index, resolved)
    }

    /// Builds a network from index-pair edges.
    pub fn from_indices(tasks: Vec<Task>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let index = index_tasks(&tasks)?;
        let n = tasks.len();
        for &(i, j) in &edges {
            if i >= n || j >= n {
                let name = |k: usize| tasks.get(k).map_or_else(|| format!("#{k}"), |t| t.id.clone());
                return Err(Error::UnknownEndpoint {
                    from: name(i),
                    to: name(j),
                    missing: if i >= n { format!("#{i}") } else { format!("#{j}") },
                });
            }
        }
        Self::assemble(tasks, index, edges)
    }

    fn assemble(
        tasks: Vec<Task>,
        index: HashMap<String, usize>,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        for t in &tasks {
            if !(t.duration >= 0.0) || !t.duration.is_finite() {
                return Err(Error::NegativeDuration {
                    id: t.id.clone(),
                    value: t.duration,
                });
            }
            if !(t.demand >= 0.0) || !t.demand.is_finite() {
                return Err(Error::NegativeDemand {
                    id: t.id.clone(),
                    value: t.demand,
                });
            }
        }

        let n = tasks.len();
        let mut seen = HashSet::with_capacity(edges.len());
        let mut successors = vec![Vec::new(); n];
        let mut predecessors = vec![Vec::new(); n];
        for &(i, j) in &edges {
            if i == j {
                return Err(Error::Cycle(vec![tasks[i].id.clone(), tasks[i].id.clone()]));
            }
            if !seen.insert((i, j)) {
                return Err(Error::DuplicateEdge(tasks[i].id.clone(), tasks[j].id.clone()));
            }
            successors[i].push(j);
            predecessors[j].push(i);
        }
        for list in successors.iter_mut().chain(predecessors.iter_mut()) {
            list.sort_unstable();
        }
        let mut edges = edges;
        edges.sort_unstable();

        let order = kahn_order(&successors, &predecessors);
        if order.len() < n {
            let placed: HashSet<usize> = order.iter().copied().collect();
            let cycle = find_cycle(&predecessors, &placed);
            return Err(Error::Cycle(
                cycle.into_iter().map(|k| tasks[k].id.clone()).collect(),
            ));
        }

        Ok(Self {
            tasks,
            edges,
            successors,
            predecessors,
            order,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn task(&self, i: usize) -> &Task {
        &self.tasks[i]
    }

    /// Edges as `(predecessor, successor)` index pairs, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.successors[i]
    }

    pub fn predecessors(&self, i: usize) -> &[usize] {
        &self.predecessors[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn durations(&self) -> Vec<f64> {
        self.tasks.iter().map(|t| t.duration).collect()
    }

    pub fn has_demands(&self) -> bool {
        self.tasks.iter().any(|t| t.demand > 0.0)
    }

    /// Topological order with ties broken by ascending task index.
    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }

    /// Checks that `s` pairs with this network.
    pub fn check(&self, s: &Schedule) -> Result<()> {
        if s.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: s.len(),
            });
        }
        Ok(())
    }

    /// Makespan: latest finish time `max_i (S_i + D_i)`, 0 for an empty network.
    pub fn makespan(&self, s: &Schedule) -> Result<f64> {
        self.check(s)?;
        Ok(makespan_of(&self.tasks, s.as_slice()))
    }

    /// Total precedence overshoot `sum over edges of max(0, S_i + D_i - S_j)`.
    pub fn violation_mass(&self, s: &Schedule) -> Result<f64> {
        self.check(s)?;
        Ok(self.violation_unchecked(s.as_slice()))
    }

    pub(crate) fn violation_unchecked(&self, s: &[f64]) -> f64 {
        self.edges
            .iter()
            .map(|&(i, j)| (s[i] + self.tasks[i].duration - s[j]).max(0.0))
            .sum()
    }
}

pub(crate) fn makespan_of(tasks: &[Task], s: &[f64]) -> f64 {
    tasks
        .iter()
        .zip(s)
        .map(|(t, &start)| start + t.duration)
        .fold(0.0, f64::max)
}

fn index_tasks(tasks: &[Task]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(tasks.len());
    for (i, t) in tasks.iter().enumerate() {
        if index.insert(t.id.clone(), i).is_some() {
            return Err(Error::DuplicateId(t.id.clone()));
        }
    }
    Ok(index)
}

fn kahn_order(successors: &[Vec<usize>], predecessors: &[Vec<usize>]) -> Vec<usize> {
    let mut indegree: Vec<usize> = predecessors.iter().map(Vec::len).collect();
    let mut ready: BinaryHeap<Reverse<usize>> = indegree
        .iter()
        .enumerate()
        .filter(|&(_, &d)| d == 0)
        .map(|(i, _)| Reverse(i))
        .collect();
    let mut order = Vec::with_capacity(successors.len());
    while let Some(Reverse(i)) = ready.pop() {
        order.push(i);
        for &j in &successors[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.push(Reverse(j));
            }
        }
    }
    order
}

/// Every unplaced node after Kahn's algorithm has an unplaced predecessor, so
/// walking predecessors must revisit a node.
fn find_cycle(predecessors: &[Vec<usize>], placed: &HashSet<usize>) -> Vec<usize> {
    let start = (0..predecessors.len())
        .find(|k| !placed.contains(k))
        .expect("cycle search requires an unplaced node");
    let mut path = vec![start];
    let mut position = HashMap::from([(start, 0usize)]);
    let mut current = start;
    loop {
        let next = *predecessors[current]
            .iter()
            .find(|k| !placed.contains(k))
            .expect("unplaced node has an unplaced predecessor");
        if let Some(&at) = position.get(&next) {
            // path holds the cycle in reverse edge direction
            let mut cycle: Vec<usize> = path[at..].to_vec();
            cycle.reverse();
            cycle.push(cycle[0]);
            return cycle;
        }
        position.insert(next, path.len());
        path.push(next);
        current = next;
    }
}

/// Continuous task start times, one per task, all finite and non-negative.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Schedule(Vec<f64>);

impl Schedule {
    pub fn new(starts: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = starts
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidStart { index, value });
        }
        Ok(Self(starts))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    /// Caller guarantees entries are finite and non-negative.
    pub(crate) fn from_clamped(starts: Vec<f64>) -> Self {
        debug_assert!(starts.iter().all(|v| v.is_finite() && *v >= 0.0));
        Self(starts)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn finishes(&self, net: &ProjectNetwork) -> Vec<f64> {
        self.0
            .iter()
            .zip(net.tasks())
            .map(|(s, t)| s + t.duration)
            .collect()
    }
}

impl std::ops::Index<usize> for Schedule {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}
