use std::io::Read;
use std::process::ExitCode;

use cadadj_cli::report::{emit, run, AdjacencyMode, ComponentScope, Format, RunConfig};
use clap::Parser;

/// Cylindrical algebraic decomposition of a semialgebraic set, with cell
/// adjacency, closures and connected components.
#[derive(Parser, Debug)]
#[command(name = "cadadj", version)]
struct Args {
    /// System of constraints, e.g. "x^2 + y^2 <= 1 || x*y = 1". Read from
    /// standard input when omitted or "-".
    system: Option<String>,
    /// Read the system from a file.
    #[arg(short, long, conflicts_with = "system")]
    file: Option<std::path::PathBuf>,
    /// Comma-separated variable order, first projected last.
    #[arg(long, value_delimiter = ',')]
    vars: Vec<String>,
    /// Initial working precision in bits.
    #[arg(long, default_value_t = 53)]
    precision: u64,
    #[arg(long, value_enum, default_value_t = AdjacencyMode::Codim1)]
    adjacency: AdjacencyMode,
    /// Skip adjacencies among cells outside the closure of the solution set.
    #[arg(long)]
    restrict: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Linear change of variables, one image per variable, e.g. "x,y+z,z".
    #[arg(long)]
    subst: Option<String>,
    #[arg(long, value_enum, default_value_t = ComponentScope::Set)]
    components: ComponentScope,
    /// Include wall-clock timings in the report.
    #[arg(long)]
    timings: bool,
    /// Run on a single thread.
    #[arg(long)]
    sequential: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match (&args.file, args.system.as_deref()) {
        (Some(p), _) => std::fs::read_to_string(p),
        (None, Some(s)) if s != "-" => Ok(s.to_string()),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map(|_| s)
        }
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cadadj: cannot read input: {e}");
            return ExitCode::from(2);
        }
    };
    let cfg = RunConfig {
        vars: args.vars,
        precision: args.precision,
        adjacency: args.adjacency,
        restrict: args.restrict,
        format: args.format,
        subst: args.subst,
        components: args.components,
        timings: args.timings,
        parallel: !args.sequential,
    };
    match run(&cfg, &text) {
        Ok(r) => {
            print!("{}", emit(&r.report, cfg.format));
            ExitCode::SUCCESS
        }
        Err(e) => {
            if cfg.format == Format::Json {
                println!("{}", serde_json::to_string_pretty(&e.to_json()).unwrap());
            }
            eprintln!("cadadj: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
