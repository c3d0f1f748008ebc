mod args;
mod commands;

use std::process::ExitCode;

use clap::{ColorChoice, CommandFactory, FromArgMatches};

use args::{Cli, Command};

fn run(cli: Cli) -> hopsched::Result<()> {
    match cli.command {
        Command::Validate { project } => commands::validate(&project),
        Command::Solve(a) => commands::solve_cmd(&a),
        Command::Cpm { project, out } => commands::cpm_cmd(&project, out.as_deref()),
        Command::Generate(a) => commands::generate_cmd(&a),
        Command::Bench(a) => commands::bench_cmd(&a),
        Command::Scaling(a) => commands::scaling_cmd(&a),
    }
}

fn jobs(cli: &Cli) -> Option<usize> {
    match &cli.command {
        Command::Solve(a) => a.solver.jobs,
        Command::Bench(a) => a.solver.jobs,
        Command::Scaling(a) => a.solver.jobs,
        _ => None,
    }
}

fn main() -> ExitCode {
    let mut cmd = Cli::command();
    if std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty()) {
        cmd = cmd.color(ColorChoice::Never);
    }
    let cli = match cmd.try_get_matches().and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    if let Some(n) = jobs(&cli).filter(|&n| n > 1) {
        // read once by the thread pool on first use
        std::env::set_var("RAYON_NUM_THREADS", n.to_string());
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {message}", e.kind());
            ExitCode::from(1)
        }
    }
}
