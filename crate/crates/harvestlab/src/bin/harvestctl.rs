use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use harvestlab::harvestctl::accept::{run_suite, AcceptOptions, Fault};
use harvestlab::harvestctl::sweep::with_jobs;
use harvestlab::harvestctl::{preset, run_scenario, sweep, to_csv, FigId, RunOptions, SweepSpec};
use harvestlab::matrix_elements::{global_cache, ElementOptions};
use harvestlab::protocol::{Regime, ScenarioConfig};
use harvestlab::{Error, Result};

#[derive(Parser)]
#[command(name = "harvestctl", version, about = "Entanglement harvesting with a measured third detector")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Quadrature relative tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    rel_tol: f64,
    /// Override the coupling.
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a figure's scenario and sweep spec as JSON.
    Preset { fig: String },
    /// Evaluate one scenario file.
    Run {
        scenario: PathBuf,
        /// Comma-separated regimes; defaults to baseline plus the scenario's own.
        #[arg(long, value_delimiter = ',')]
        regimes: Vec<String>,
    },
    /// Run a sweep from a spec file or a figure id and emit CSV.
    Sweep { spec: String },
    /// Run the acceptance criteria.
    Accept {
        suite: Option<String>,
        /// Print every check under its verdict line.
        #[arg(long, short)]
        verbose: bool,
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(p: &Path, text: &str) -> Result<()> {
    std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn load_spec(arg: &str) -> Result<SweepSpec> {
    if let Ok(f) = FigId::parse(arg) {
        if !Path::new(arg).exists() {
            return Ok(preset(f).1);
        }
    }
    let text = std::fs::read_to_string(arg).map_err(|e| Error::Io(format!("{arg}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Error::Invalid(vec![format!("sweep spec: {e}")]))
}

fn run(cli: Cli) -> Result<bool> {
    let opts = RunOptions { elements: ElementOptions { rel_tol: cli.rel_tol, cache: Some(global_cache()) } };
    match &cli.cmd {
        Cmd::Preset { fig } => {
            let (mut cfg, mut spec) = preset(FigId::parse(fig)?);
            if let Some(l) = cli.lambda {
                cfg.coupling = l;
                spec.lambda = Some(l);
            }
            let doc = serde_json::json!({ "scenario": cfg, "sweep": spec });
            emit(&cli.out, &format!("{}\n", serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?))?;
            Ok(true)
        }
        Cmd::Run { scenario, regimes } => {
            let mut cfg = ScenarioConfig::load(scenario)?;
            if let Some(l) = cli.lambda {
                cfg.coupling = l;
            }
            let regimes = if regimes.is_empty() {
                let own = cfg.regime()?;
                if own == Regime::Baseline { vec![own] } else { vec![Regime::Baseline, own] }
            } else {
                regimes
                    .iter()
                    .map(|r| Regime::parse(r).ok_or_else(|| Error::Domain(format!("unknown regime '{r}'"))))
                    .collect::<Result<Vec<_>>>()?
            };
            let rec = with_jobs(cli.jobs, || run_scenario(&cfg, &regimes, 0.0, &opts))??;
            emit(&cli.out, &format!("{}\n", serde_json::to_string_pretty(&rec).map_err(|e| Error::Io(e.to_string()))?))?;
            Ok(true)
        }
        Cmd::Sweep { spec } => {
            let mut spec = load_spec(spec)?;
            if cli.lambda.is_some() {
                spec.lambda = cli.lambda;
            }
            let table = with_jobs(cli.jobs, || sweep(&spec, &opts))??;
            let csv = to_csv(&table);
            match cli.out.as_ref().or(spec.output_path.as_ref()) {
                Some(p) => write_file(p, &csv)?,
                None => print!("{csv}"),
            }
            let failed = table.failures();
            if failed > 0 {
                eprintln!("{failed} of {} rows failed", table.rows.len());
            }
            Ok(failed == 0)
        }
        Cmd::Accept { suite, verbose, inject_fault } => {
            let opts = AcceptOptions { fault: inject_fault.as_deref().map(Fault::parse).transpose()? };
            let reports = with_jobs(cli.jobs, || run_suite(suite.as_deref(), &opts))??;
            let mut text = String::new();
            for r in &reports {
                text.push_str(&if *verbose { r.detail() } else { r.line() });
                text.push('\n');
            }
            let passed = reports.iter().filter(|r| r.passed()).count();
            text.push_str(&format!("{passed}/{} criteria passed\n", reports.len()));
            emit(&cli.out, &text)?;
            Ok(passed == reports.len())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli);
    if let Err(e) = global_cache().persist() {
        eprintln!("harvestctl: cache not saved: {e}");
    }
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("harvestctl: {e}");
            ExitCode::from(2)
        }
    }
}
