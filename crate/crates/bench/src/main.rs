use std::path::PathBuf;
use std::process::ExitCode;

use cbf_bench::report::{summary_text, verify_text};
use cbf_bench::{evaluate, lookup, registry, run, BenchError, ConfigFile, Overrides, Scenario};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "cbf-bench",
    version,
    about = "Run the bundled barrier-function safety scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List bundled scenarios.
    List,
    /// Run a scenario, write CSVs and a summary report.
    Run {
        id: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run scenarios and check their expectations (`all` for every one).
    Verify {
        id: String,
        #[command(flatten)]
        opts: RunOpts,
    },
}

#[derive(Args)]
struct RunOpts {
    /// Initial position(s), replacing the bundled ones.
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    x0: Option<Vec<f64>>,
    /// Initial velocity for double-integrator scenarios.
    #[arg(long, allow_negative_numbers = true)]
    v0: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    rtol: Option<f64>,
    #[arg(long)]
    atol: Option<f64>,
    /// Simulation horizon (s).
    #[arg(long)]
    horizon: Option<f64>,
    /// TOML file with per-scenario overrides.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl RunOpts {
    fn overrides(&self, id: &str) -> Result<Overrides, BenchError> {
        let file = match &self.config {
            Some(path) => ConfigFile::load(path)?.overrides_for(id),
            None => Overrides::default(),
        };
        Ok(file.merged(&Overrides {
            x0: self.x0.clone(),
            v0: self.v0,
            rtol: self.rtol,
            atol: self.atol,
            horizon: self.horizon,
        }))
    }
}

fn scenario(id: &str) -> Result<Scenario, BenchError> {
    lookup(id).ok_or_else(|| BenchError::UnknownScenario(id.to_owned()))
}

fn cmd_run(id: &str, opts: &RunOpts) -> Result<bool, BenchError> {
    let s = scenario(id)?;
    let out = opts
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(id));
    let summary = run(&s, &opts.overrides(id)?, Some(&out))?;
    let mut text = summary_text(&summary);
    let report = evaluate(&summary);
    text.push('\n');
    text.push_str(&verify_text(&report));
    let path = out.join(format!("{id}_summary.txt"));
    std::fs::write(&path, &text).map_err(|e| BenchError::Io {
        path: path.clone(),
        source: e,
    })?;
    print!("{text}");
    for p in &summary.csv_paths {
        println!("wrote {}", p.display());
    }
    println!("wrote {}", path.display());
    Ok(report.passed())
}

fn cmd_verify(id: &str, opts: &RunOpts) -> Result<bool, BenchError> {
    let scenarios = if id == "all" {
        registry()
    } else {
        vec![scenario(id)?]
    };
    let mut all_passed = true;
    for s in &scenarios {
        let summary = run(s, &opts.overrides(s.id)?, opts.out.as_deref())?;
        let report = evaluate(&summary);
        print!("{}", verify_text(&report));
        all_passed &= report.passed();
    }
    Ok(all_passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::List => {
            for s in registry() {
                let x0: Vec<f64> = s.initial_conditions.iter().map(|ic| ic[0]).collect();
                println!("{:<22} {} (x0 = {x0:?})", s.id, s.description);
            }
            Ok(true)
        }
        Command::Run { id, opts } => cmd_run(id, opts),
        Command::Verify { id, opts } => cmd_verify(id, opts),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
