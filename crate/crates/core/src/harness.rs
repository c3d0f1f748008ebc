//! Solver-versus-oracle experiments and their reports.
//!
//! Each row generates a seeded family of instances, computes the exact
//! resource-free makespan with CPM, runs the dynamics once per candidate
//! `beta`, and keeps the `beta` with the lowest mean post-repair relative
//! error. Records are sorted by seed before aggregation, so reports do not
//! depend on how instances were scheduled across threads.

use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cpm;
use crate::energy::EnergyConfig;
use crate::error::{Error, Result};
use crate::generator::{generate, EdgeTarget, GenSpec, PRNG_NAME};
use crate::par::Execution;
use crate::solver::{solve, SolverConfig};

pub const DEFAULT_BETA_SWEEP: [f64; 3] = [0.005, 0.01, 0.05];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Deadline {
    Absolute(f64),
    /// Multiple of each instance's own optimal makespan.
    FactorOfOpt(f64),
}

impl Deadline {
    pub fn resolve(self, t_opt: f64) -> f64 {
        match self {
            Deadline::Absolute(t) => t,
            Deadline::FactorOfOpt(f) => f * t_opt,
        }
    }

    fn label(self) -> String {
        match self {
            Deadline::Absolute(t) => t.to_string(),
            Deadline::FactorOfOpt(f) => format!("{f}*t_opt"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub spec: GenSpec,
    pub deadline: Option<Deadline>,
    pub resource_max: Option<f64>,
    pub runs: usize,
    pub beta_sweep: Vec<f64>,
}

impl BenchRow {
    pub fn new(spec: GenSpec, runs: usize) -> Self {
        Self {
            spec,
            deadline: None,
            resource_max: None,
            runs,
            beta_sweep: DEFAULT_BETA_SWEEP.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("bench row needs runs >= 1".into()));
        }
        if self.beta_sweep.is_empty() {
            return Err(Error::Config("bench row needs at least one beta".into()));
        }
        self.spec.validate()
    }
}

/// The five simulation families: sizes, edge counts, and constraints.
pub fn table_rows(runs: usize) -> Vec<BenchRow> {
    let row = |n, e| BenchRow::new(GenSpec::new(n, EdgeTarget::Count(e)), runs);
    let mut rows = vec![row(100, 290), row(250, 720), row(500, 1460), row(1000, 2900), row(1000, 2900)];
    rows[2].deadline = Some(Deadline::Absolute(150.0));
    for r in &mut rows[3..] {
        r.spec = r.spec.with_demands(1.0, 3.0);
        r.resource_max = Some(15.0);
    }
    rows[4].deadline = Some(Deadline::Absolute(290.0));
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub seed: u64,
    pub n_edges: usize,
    pub avg_duration: f64,
    pub t_h: f64,
    pub t_opt: f64,
    pub v_pre_repair: f64,
    pub v_post_repair: f64,
    pub rel_error_pct: f64,
    pub iterations: usize,
    pub converged: bool,
    pub wall_time: f64,
    pub beta_used: f64,
}

pub fn relative_error_pct(t_h: f64, t_opt: f64) -> f64 {
    if t_opt == 0.0 {
        if t_h == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        100.0 * (t_h - t_opt) / t_opt
    }
}

/// One-decimal percentage, as tables print it.
pub fn format_pct(pct: f64) -> String {
    format!("{pct:.1}")
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Stat {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let mut count = 0usize;
        let mut sum = 0.0;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for v in values {
            count += 1;
            sum += v;
            min = min.min(v);
            max = max.max(v);
        }
        if count == 0 {
            return Self::default();
        }
        Self {
            mean: sum / count as f64,
            min,
            max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowSummary {
    pub n_tasks: usize,
    pub n_edges: f64,
    pub avg_duration: f64,
    pub deadline: Option<Deadline>,
    pub resource_max: Option<f64>,
    pub t_h: Stat,
    pub t_opt: Stat,
    pub v_pre: Stat,
    pub v_post: Stat,
    pub rel_err_pct: Stat,
    pub iterations: Stat,
    /// Share of instances whose raw dynamics were exactly precedence-feasible.
    pub feasible_fraction: f64,
    pub feasible_fraction_post: f64,
    pub converged_fraction: f64,
    pub beta_used: f64,
    /// Mean post-repair relative error for every candidate beta, in sweep order.
    pub beta_scores: Vec<(f64, f64)>,
    pub seed_base: u64,
    pub prng: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowReport {
    pub summary: RowSummary,
    pub records: Vec<BenchRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    pub solver: SolverConfig,
    /// Source of `lambda_*` and `grid_dt`; beta and constraints come from the row.
    pub energy: EnergyConfig,
    pub execution: Execution,
}

fn run_instance(
    row: &BenchRow,
    net: &crate::network::ProjectNetwork,
    t_opt: f64,
    seed: u64,
    beta: f64,
    opts: &RunOptions,
    inner: Execution,
) -> Result<BenchRecord> {
    let energy = EnergyConfig {
        beta,
        deadline: row.deadline.map(|d| d.resolve(t_opt)),
        resource_max: row.resource_max,
        ..opts.energy
    };
    let solver = SolverConfig {
        execution: inner,
        ..opts.solver
    };
    let clock = Instant::now();
    let result = solve(net, &energy, &solver, None)?;
    let wall_time = clock.elapsed().as_secs_f64();
    let n = net.len().max(1) as f64;
    Ok(BenchRecord {
        seed,
        n_edges: net.edges().len(),
        avg_duration: net.tasks().iter().map(|t| t.duration).sum::<f64>() / n,
        t_h: result.makespan,
        t_opt,
        v_pre_repair: result.violation_pre_repair,
        v_post_repair: result.violation,
        rel_error_pct: relative_error_pct(result.makespan, t_opt),
        iterations: result.iterations,
        converged: result.converged,
        wall_time,
        beta_used: beta,
    })
}

/// Runs one row with seeds `seed_base..seed_base + runs`.
pub fn run_row(row: &BenchRow, seed_base: u64, opts: &RunOptions) -> Result<RowReport> {
    row.validate()?;
    opts.solver.validate()?;
    let seeds: Vec<u64> = (0..row.runs as u64).map(|k| seed_base.wrapping_add(k)).collect();

    let instances = opts.execution.map_slice(&seeds, |&seed| {
        let net = generate(&row.spec.with_seed(seed)).map_err(|e| Error::Instance { seed, source: Box::new(e) })?;
        let t_opt = cpm::forward(&net).1;
        Ok((seed, net, t_opt))
    });
    let instances: Vec<_> = instances.into_iter().collect::<Result<_>>()?;

    let jobs: Vec<(usize, f64)> = (0..instances.len())
        .flat_map(|i| row.beta_sweep.iter().map(move |&b| (i, b)))
        .collect();
    // fan out over instances; each solve stays on one thread
    let inner = if opts.execution.is_parallel() {
        Execution::Sequential
    } else {
        opts.solver.execution
    };
    let outcomes = opts.execution.map_slice(&jobs, |&(i, beta)| {
        let (seed, net, t_opt) = &instances[i];
        run_instance(row, net, *t_opt, *seed, beta, opts, inner)
            .map_err(|e| Error::Instance { seed: *seed, source: Box::new(e) })
    });
    let outcomes: Vec<BenchRecord> = outcomes.into_iter().collect::<Result<_>>()?;

    let beta_scores: Vec<(f64, f64)> = row
        .beta_sweep
        .iter()
        .map(|&b| {
            let score = Stat::of(outcomes.iter().filter(|r| r.beta_used == b).map(|r| r.rel_error_pct)).mean;
            (b, score)
        })
        .collect();
    let (beta_used, _) = beta_scores
        .iter()
        .copied()
        .fold(None, |best: Option<(f64, f64)>, cand| match best {
            Some(b) if b.1 <= cand.1 => Some(b),
            _ => Some(cand),
        })
        .expect("sweep is non-empty");

    let mut records: Vec<BenchRecord> = outcomes.into_iter().filter(|r| r.beta_used == beta_used).collect();
    records.sort_by_key(|r| r.seed);
    let count = records.len() as f64;
    let fraction = |pred: &dyn Fn(&BenchRecord) -> bool| records.iter().filter(|r| pred(r)).count() as f64 / count;

    let summary = RowSummary {
        n_tasks: row.spec.n_tasks,
        n_edges: Stat::of(records.iter().map(|r| r.n_edges as f64)).mean,
        avg_duration: Stat::of(records.iter().map(|r| r.avg_duration)).mean,
        deadline: row.deadline,
        resource_max: row.resource_max,
        t_h: Stat::of(records.iter().map(|r| r.t_h)),
        t_opt: Stat::of(records.iter().map(|r| r.t_opt)),
        v_pre: Stat::of(records.iter().map(|r| r.v_pre_repair)),
        v_post: Stat::of(records.iter().map(|r| r.v_post_repair)),
        rel_err_pct: Stat::of(records.iter().map(|r| r.rel_error_pct)),
        iterations: Stat::of(records.iter().map(|r| r.iterations as f64)),
        feasible_fraction: fraction(&|r| r.v_pre_repair == 0.0),
        feasible_fraction_post: fraction(&|r| r.v_post_repair == 0.0),
        converged_fraction: fraction(&|r| r.converged),
        beta_used,
        beta_scores,
        seed_base,
        prng: PRNG_NAME.to_string(),
    };
    Ok(RowReport { summary, records })
}

/// Runs every row; row `k` draws seeds from `base_seed + k * runs`.
pub fn run_rows(rows: &[BenchRow], base_seed: u64, opts: &RunOptions) -> Result<Vec<RowReport>> {
    rows.iter()
        .enumerate()
        .map(|(k, row)| run_row(row, base_seed.wrapping_add((k * row.runs) as u64), opts))
        .collect()
}

#[derive(Debug, Serialize)]
struct CsvLine<'a> {
    n_tasks: usize,
    n_edges: f64,
    avg_duration: f64,
    deadline: String,
    resource_max: String,
    t_h_mean: f64,
    t_opt_mean: f64,
    v_pre_mean: f64,
    v_post_mean: f64,
    rel_err_pct_mean: f64,
    iters_mean: f64,
    feasible_fraction: f64,
    beta_used: f64,
    seed_base: u64,
    prng: &'a str,
}

pub const CSV_HEADER: &str = "n_tasks,n_edges,avg_duration,deadline,resource_max,t_h_mean,t_opt_mean,v_pre_mean,v_post_mean,rel_err_pct_mean,iters_mean,feasible_fraction,beta_used,seed_base,prng";

pub fn csv_report(reports: &[RowReport]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for r in reports {
        let s = &r.summary;
        w.serialize(CsvLine {
            n_tasks: s.n_tasks,
            n_edges: s.n_edges,
            avg_duration: s.avg_duration,
            deadline: s.deadline.map(Deadline::label).unwrap_or_default(),
            resource_max: s.resource_max.map(|v| v.to_string()).unwrap_or_default(),
            t_h_mean: s.t_h.mean,
            t_opt_mean: s.t_opt.mean,
            v_pre_mean: s.v_pre.mean,
            v_post_mean: s.v_post.mean,
            rel_err_pct_mean: s.rel_err_pct.mean,
            iters_mean: s.iterations.mean,
            feasible_fraction: s.feasible_fraction,
            beta_used: s.beta_used,
            seed_base: s.seed_base,
            prng: &s.prng,
        })
        .expect("in-memory csv write");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8");
    format!("{CSV_HEADER}\n{body}")
}

/// JSON report. Wall times are dropped unless `timing` is set, keeping the
/// output reproducible.
pub fn json_report(reports: &[RowReport], config: &serde_json::Value, timing: bool) -> String {
    let mut rows = serde_json::to_value(reports).expect("reports serialize");
    if !timing {
        for row in rows.as_array_mut().into_iter().flatten() {
            for rec in row["records"].as_array_mut().into_iter().flatten() {
                rec.as_object_mut().map(|o| o.remove("wall_time"));
            }
        }
    }
    let doc = serde_json::json!({ "prng": PRNG_NAME, "config": config, "rows": rows });
    let mut text = serde_json::to_string_pretty(&doc).expect("json report");
    text.push('\n');
    text
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Both,
}

/// Runs all rows and writes the report(s). With `Both`, JSON lands next to
/// the CSV with a `.json` extension. Returns the reports for printing.
pub fn run_table(
    rows: &[BenchRow],
    base_seed: u64,
    opts: &RunOptions,
    out_path: &Path,
    format: ReportFormat,
    config: &serde_json::Value,
) -> Result<Vec<RowReport>> {
    let reports = run_rows(rows, base_seed, opts)?;
    match format {
        ReportFormat::Csv => fs::write(out_path, csv_report(&reports))?,
        ReportFormat::Json => fs::write(out_path, json_report(&reports, config, false))?,
        ReportFormat::Both => {
            fs::write(out_path, csv_report(&reports))?;
            fs::write(out_path.with_extension("json"), json_report(&reports, config, false))?;
        }
    }
    Ok(reports)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub n_tasks: usize,
    pub n_edges: usize,
    pub wall_time: f64,
    pub iterations: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingSpec {
    pub edges_per_task: f64,
    pub duration_range: (f64, f64),
    pub seeds: usize,
    pub base_seed: u64,
    pub beta: f64,
}

impl Default for ScalingSpec {
    fn default() -> Self {
        Self {
            edges_per_task: 2.9,
            duration_range: (1.0, 10.0),
            seeds: 3,
            base_seed: 0,
            beta: crate::energy::DEFAULT_BETA,
        }
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// Median solve time and iteration count per size. Solves run one at a time
/// so timings are not distorted by sibling work.
pub fn scaling_probe(sizes: &[usize], spec: &ScalingSpec, solver: &SolverConfig) -> Result<Vec<ScalingPoint>> {
    if sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Config("scaling sizes must be ascending".into()));
    }
    if spec.seeds == 0 {
        return Err(Error::Config("scaling probe needs at least one seed".into()));
    }
    let energy = EnergyConfig {
        beta: spec.beta,
        ..EnergyConfig::default()
    };
    sizes
        .iter()
        .map(|&n| {
            let max_edges = n * n.saturating_sub(1) / 2;
            let edges = ((spec.edges_per_task * n as f64).round() as usize).min(max_edges);
            let mut times = Vec::with_capacity(spec.seeds);
            let mut iters = Vec::with_capacity(spec.seeds);
            for k in 0..spec.seeds as u64 {
                let gen = GenSpec {
                    duration_range: spec.duration_range,
                    ..GenSpec::new(n, EdgeTarget::Count(edges)).with_seed(spec.base_seed.wrapping_add(k))
                };
                let net = generate(&gen)?;
                let clock = Instant::now();
                let r = solve(&net, &energy, solver, None)?;
                times.push(clock.elapsed().as_secs_f64());
                iters.push(r.iterations as f64);
            }
            Ok(ScalingPoint {
                n_tasks: n,
                n_edges: edges,
                wall_time: median(times),
                iterations: median(iters),
            })
        })
        .collect()
}

pub fn scaling_csv(points: &[ScalingPoint]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if points.is_empty() {
        return "n_tasks,n_edges,wall_time,iterations\n".to_string();
    }
    for p in points {
        w.serialize(p).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
}
