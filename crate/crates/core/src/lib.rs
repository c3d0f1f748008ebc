//! Project scheduling by energy minimization.
//!
//! Precedence, deadline, and resource constraints become penalty terms of a
//! piecewise-quadratic energy over continuous task start times. Clamped
//! synchronous subgradient descent (continuous Hopfield-style dynamics) drives
//! the schedule to a low-energy state, and an exact critical-path baseline
//! measures how close it lands.
//!
//! ```
//! use hopsched::{cpm, solve, EnergyConfig, ProjectNetwork, SolverConfig, Task};
//!
//! let tasks = vec![Task::new("A", 2.0), Task::new("B", 3.0), Task::new("C", 4.0)];
//! let net = ProjectNetwork::build(tasks, &[("A", "B"), ("B", "C")]).unwrap();
//! let result = solve(&net, &EnergyConfig::default(), &SolverConfig::default(), None).unwrap();
//! assert_eq!(result.violation, 0.0);
//! assert_eq!(result.makespan, cpm::analyze(&net).t_opt);
//! ```

pub mod cpm;
pub mod energy;
pub mod error;
pub mod generator;
pub mod harness;
pub mod network;
pub mod par;
pub mod pert;
pub mod project_file;
pub mod solver;

pub use energy::{EnergyBreakdown, EnergyConfig};
pub use error::{Error, Result};
pub use generator::{generate, EdgeTarget, GenSpec};
pub use network::{ProjectNetwork, Schedule, Task};
pub use par::Execution;
pub use pert::ThreePointEstimate;
pub use solver::{repair_schedule, solve, solve_step, SolveResult, SolverConfig};
