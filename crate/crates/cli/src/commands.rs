use std::fs;
use std::path::Path;

use hopsched::harness::{self, BenchRow, ReportFormat, RunOptions, ScalingSpec};
use hopsched::project_file::{self, Constraints, ScheduleFile};
use hopsched::{cpm, generate, solve, EdgeTarget, EnergyConfig, GenSpec, Result};
use serde_json::{json, Value};

use crate::args::{BenchArgs, Format, GenerateArgs, ScalingArgs, SolveArgs};

fn write_text(path: &Path, mut text: String) -> Result<()> {
    if !text.ends_with('\n') {
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

fn pretty(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("json value serializes")
}

pub fn validate(project: &Path) -> Result<()> {
    let (net, constraints) = project_file::load_project(project)?;
    let t_opt = cpm::forward(&net).1;
    println!("ok: {} tasks, {} edges, T_opt = {t_opt}", net.len(), net.edges().len());
    if let Some(d) = constraints.deadline {
        println!("deadline = {d}");
    }
    if let Some(r) = constraints.resource_max {
        println!("resource_max = {r}");
    }
    Ok(())
}

pub fn solve_cmd(args: &SolveArgs) -> Result<()> {
    let (net, constraints) = project_file::load_project(&args.project)?;
    let energy = args.energy.energy(constraints.deadline, constraints.resource_max);
    let solver = args.solver.solver();
    energy.validate()?;
    solver.validate()?;
    let config = json!({ "energy": energy, "solver": solver });
    if args.print_config {
        println!("{}", pretty(&config));
        return Ok(());
    }
    let init = match &args.init {
        Some(path) => Some(project_file::load_schedule(path)?.schedule_for(&net)?),
        None => None,
    };
    let result = solve(&net, &energy, &solver, init.as_ref())?;
    let t_opt = cpm::forward(&net).1;
    project_file::save_schedule(&args.out, &ScheduleFile::from_result(&net, &result, Some(config)))?;
    println!("T_H = {}", result.makespan);
    println!("T_opt = {t_opt}");
    println!("V_pre = {}", result.violation_pre_repair);
    println!("V_post = {}", result.violation);
    println!("iterations = {}", result.iterations);
    println!("converged = {}", result.converged);
    println!("schedule written to {}", args.out.display());
    Ok(())
}

pub fn cpm_cmd(project: &Path, out: Option<&Path>) -> Result<()> {
    let (net, _) = project_file::load_project(project)?;
    let r = cpm::analyze(&net);
    let per_task = |v: &[f64]| -> serde_json::Map<String, Value> {
        net.tasks().iter().zip(v).map(|(t, &x)| (t.id.clone(), json!(x))).collect()
    };
    let doc = json!({
        "earliest_start": per_task(&r.earliest_start),
        "latest_start": per_task(&r.latest_start),
        "slack": per_task(&r.slack),
        "t_opt": r.t_opt,
        "critical_path": r.critical_ids(&net),
    });
    match out {
        Some(path) => write_text(path, pretty(&doc)),
        None => {
            println!("{}", pretty(&doc));
            Ok(())
        }
    }
}

pub fn generate_cmd(args: &GenerateArgs) -> Result<()> {
    let edges = match (args.edges, args.edge_prob) {
        (Some(m), _) => EdgeTarget::Count(m),
        (None, Some(p)) => EdgeTarget::Probability(p),
        (None, None) => unreachable!("clap requires one of --edges/--edge-prob"),
    };
    let mut spec = GenSpec::new(args.tasks, edges).with_seed(args.seed);
    spec.duration_range = (args.dur_min, args.dur_max);
    if let (Some(lo), Some(hi)) = (args.demand_min, args.demand_max) {
        spec = spec.with_demands(lo, hi);
    }
    let net = generate(&spec)?;
    let constraints = (args.deadline.is_some() || args.resource_max.is_some()).then_some(Constraints {
        deadline: args.deadline,
        resource_max: args.resource_max,
    });
    let text = project_file::project_to_string(&net, constraints);
    match &args.out {
        Some(path) => {
            write_text(path, text)?;
            eprintln!("{} tasks, {} edges written to {}", net.len(), net.edges().len(), path.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}

pub fn bench_cmd(args: &BenchArgs) -> Result<()> {
    let all = harness::table_rows(args.runs);
    let mut rows: Vec<BenchRow> = if args.rows.is_empty() {
        all
    } else {
        args.rows
            .iter()
            .map(|&k| {
                all.get(k.wrapping_sub(1))
                    .cloned()
                    .ok_or_else(|| hopsched::Error::Config(format!("row {k} is not in 1..={}", all.len())))
            })
            .collect::<Result<_>>()?
    };
    if !args.beta_sweep.is_empty() {
        for row in &mut rows {
            row.beta_sweep.clone_from(&args.beta_sweep);
        }
    }
    let opts = RunOptions {
        solver: args.solver.solver(),
        energy: EnergyConfig {
            lambda_deadline: args.lambda_deadline,
            lambda_resource: args.lambda_resource,
            grid_dt: args.grid_dt,
            ..EnergyConfig::default()
        },
        execution: args.solver.execution(),
    };
    let config = json!({
        "solver": opts.solver,
        "energy": opts.energy,
        "rows": rows,
        "base_seed": args.seed,
        "prng": hopsched::generator::PRNG_NAME,
    });
    if args.print_config {
        println!("{}", pretty(&config));
        return Ok(());
    }
    let format = match args.format {
        Format::Csv => ReportFormat::Csv,
        Format::Json => ReportFormat::Json,
        Format::Both => ReportFormat::Both,
    };
    let reports = harness::run_table(&rows, args.seed, &opts, &args.out, format, &config)?;
    println!("N      M        T_H mean   T_opt mean  rel err %  V_pre mean  feasible  beta");
    for r in &reports {
        let s = &r.summary;
        println!(
            "{:<6} {:<8.1} {:<10.2} {:<11.2} {:<10} {:<11.3} {:<9.2} {}",
            s.n_tasks,
            s.n_edges,
            s.t_h.mean,
            s.t_opt.mean,
            harness::format_pct(s.rel_err_pct.mean),
            s.v_pre.mean,
            s.feasible_fraction,
            s.beta_used
        );
    }
    println!("report written to {}", args.out.display());
    Ok(())
}

pub fn scaling_cmd(args: &ScalingArgs) -> Result<()> {
    let spec = ScalingSpec {
        edges_per_task: args.edges_per_task,
        seeds: args.seeds,
        base_seed: args.seed,
        beta: args.beta,
        ..ScalingSpec::default()
    };
    let points = harness::scaling_probe(&args.sizes, &spec, &args.solver.solver())?;
    for p in &points {
        println!("N = {:<6} M = {:<6} median {:.4}s, {} iterations", p.n_tasks, p.n_edges, p.wall_time, p.iterations);
    }
    write_text(&args.out, harness::scaling_csv(&points))?;
    println!("scaling written to {}", args.out.display());
    Ok(())
}
