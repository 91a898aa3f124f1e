//! `nstr`: command-line harness for the nonsmooth trust-region solver.

mod commands;
mod config;
mod output;
mod pool;
mod setup;

const USAGE: &str = "\
usage: nstr <command> [config-file] [key=value ...]

commands:
  solve <config>    single run; writes iterates.csv, summary.json and .dat files
  counterexample    local vs bundle model on the piecewise linear example
  experiment1       scalar problem from a grid of starting points
  table1            2D sweep over mesh, alpha and nu

NSTR_WORKERS overrides the worker count of the sweeps.";

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some((cmd, rest)) = args.split_first() else {
        eprintln!("{USAGE}");
        std::process::exit(1);
    };
    let result = match cmd.as_str() {
        "solve" => commands::load(rest, true).and_then(commands::cmd_solve),
        "counterexample" => commands::load(rest, false).and_then(commands::cmd_counterexample),
        "experiment1" => commands::load(rest, false).and_then(commands::cmd_experiment1),
        "table1" => commands::load(rest, false).and_then(commands::cmd_table1),
        "-h" | "--help" | "help" => {
            println!("{USAGE}");
            Ok(0)
        }
        other => Err(anyhow::anyhow!("unknown command {other:?}\n{USAGE}")),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
