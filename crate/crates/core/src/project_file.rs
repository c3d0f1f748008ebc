//! JSON project files and schedule output files.
//!
//! ```json
//! { "tasks": [ {"id": "A", "duration": 3.0, "demand": 2.0,
//!               "estimates": {"optimistic": 2, "likely": 3, "pessimistic": 5}} ],
//!   "edges": [ ["A", "B"] ],
//!   "constraints": { "deadline": 150.0, "resource_max": 15.0 } }
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{ProjectNetwork, Schedule, Task};
use crate::pert::{resolve_duration, TaskInput};
use crate::solver::SolveResult;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Constraints {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deadline: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resource_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectFile {
    pub tasks: Vec<TaskInput>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<Constraints>,
}

impl ProjectFile {
    pub fn from_network(net: &ProjectNetwork, constraints: Option<Constraints>) -> Self {
        let tasks = net
            .tasks()
            .iter()
            .map(|t| TaskInput {
                id: t.id.clone(),
                duration: Some(t.duration),
                demand: (t.demand != 0.0).then_some(t.demand),
                estimates: None,
            })
            .collect();
        let edges = net
            .edges()
            .iter()
            .map(|&(i, j)| (net.task(i).id.clone(), net.task(j).id.clone()))
            .collect();
        Self {
            tasks,
            edges,
            constraints,
        }
    }

    /// Resolves durations and validates the graph.
    pub fn into_network(self) -> Result<(ProjectNetwork, Constraints)> {
        let mut tasks = Vec::with_capacity(self.tasks.len());
        for input in &self.tasks {
            let duration = resolve_duration(input).map_err(|e| match e {
                Error::MissingDuration(id) => Error::Schema(format!(
                    "task `{id}`: missing field `duration` (required when `estimates` is absent)"
                )),
                other => other,
            })?;
            tasks.push(Task {
                id: input.id.clone(),
                duration,
                demand: input.demand.unwrap_or(0.0),
            });
        }
        let net = ProjectNetwork::build(tasks, &self.edges).map_err(|e| match e {
            Error::UnknownEndpoint { from, to, missing } => {
                Error::Schema(format!("edge [{from:?}, {to:?}] names unknown task `{missing}`"))
            }
            other => other,
        })?;
        Ok((net, self.constraints.unwrap_or_default()))
    }
}

fn json_error(e: serde_json::Error) -> Error {
    use serde_json::error::Category;
    match e.classify() {
        Category::Data => Error::Schema(e.to_string()),
        Category::Io => Error::Io(e.into()),
        Category::Syntax | Category::Eof => Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        },
    }
}

pub fn parse_project(text: &str) -> Result<(ProjectNetwork, Constraints)> {
    let file: ProjectFile = serde_json::from_str(text).map_err(json_error)?;
    file.into_network()
}

pub fn load_project(path: impl AsRef<Path>) -> Result<(ProjectNetwork, Constraints)> {
    parse_project(&fs::read_to_string(path)?)
}

pub fn project_to_string(net: &ProjectNetwork, constraints: Option<Constraints>) -> String {
    let file = ProjectFile::from_network(net, constraints);
    serde_json::to_string_pretty(&file).expect("project file serializes")
}

pub fn save_project(path: impl AsRef<Path>, net: &ProjectNetwork, constraints: Option<Constraints>) -> Result<()> {
    let mut text = project_to_string(net, constraints);
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub starts: BTreeMap<String, f64>,
    pub makespan: f64,
    pub violation: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub makespan_pre_repair: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation_pre_repair: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

impl ScheduleFile {
    pub fn from_result(net: &ProjectNetwork, result: &SolveResult, config: Option<serde_json::Value>) -> Self {
        Self {
            starts: net
                .tasks()
                .iter()
                .zip(result.schedule.as_slice())
                .map(|(t, &s)| (t.id.clone(), s))
                .collect(),
            makespan: result.makespan,
            violation: result.violation,
            iterations: result.iterations,
            converged: result.converged,
            makespan_pre_repair: Some(result.makespan_pre_repair),
            violation_pre_repair: Some(result.violation_pre_repair),
            config,
        }
    }

    /// Orders the starts by the network's task indices.
    pub fn schedule_for(&self, net: &ProjectNetwork) -> Result<Schedule> {
        if self.starts.len() != net.len() {
            return Err(Error::DimensionMismatch {
                expected: net.len(),
                got: self.starts.len(),
            });
        }
        let starts = net
            .tasks()
            .iter()
            .map(|t| {
                self.starts
                    .get(&t.id)
                    .copied()
                    .ok_or_else(|| Error::Schema(format!("schedule is missing start for `{}`", t.id)))
            })
            .collect::<Result<Vec<_>>>()?;
        Schedule::new(starts)
    }
}

pub fn save_schedule(path: impl AsRef<Path>, file: &ScheduleFile) -> Result<()> {
    let mut text = serde_json::to_string_pretty(file).expect("schedule file serializes");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn load_schedule(path: impl AsRef<Path>) -> Result<ScheduleFile> {
    serde_json::from_str(&fs::read_to_string(path)?).map_err(json_error)
}
