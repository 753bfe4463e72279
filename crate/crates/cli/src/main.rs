use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use symbidisk::harness::commands::{bb_sweep, bell_check, ibp_check, opnorm_sweep, sobolev_check, tent_area_table};
use symbidisk::harness::verify::run_verify;
use symbidisk::harness::{CommandOutput, ExperimentConfig};
use symbidisk::Error;

#[derive(Parser)]
#[command(name = "symbidisk", version, about = "Bergman projection checks on the disk and the symmetrized bidisk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Overrides,
}

#[derive(Subcommand)]
enum Command {
    /// Run every invariant suite and print a JSON report.
    Verify {
        /// Restrict to the named suites.
        #[arg(long = "suite", value_name = "NAME")]
        suites: Vec<String>,
    },
    /// Békollé-Bonami constants over tents.
    BbSweep,
    /// Projection on G against the pulled-back bidisk projection and Monte Carlo.
    BellCheck,
    /// Integration by parts against partial kernels.
    IbpCheck,
    /// Weighted Sobolev ratios under quadrature refinement.
    SobolevCheck,
    /// Operator-norm lower bounds over the test family.
    OpnormSweep,
    /// Tent areas over the radius ladder.
    TentArea,
}

#[derive(Args)]
struct Overrides {
    /// JSON config file; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated exponents.
    #[arg(long, global = true, value_name = "LIST", value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Weight family, e.g. `pair_power:2:0.5:0`.
    #[arg(long, global = true, value_name = "SPEC")]
    weight: Option<String>,
    /// Comma-separated `re:im` points.
    #[arg(long, global = true, value_name = "LIST", value_delimiter = ',', value_parser = parse_point)]
    w2: Option<Vec<[f64; 2]>>,
    #[arg(long, global = true, value_name = "X")]
    rmin: Option<f64>,
    /// Quadrature size `NRxNT`.
    #[arg(long, global = true, value_name = "NRxNT", value_parser = parse_quad)]
    quad: Option<[usize; 2]>,
    #[arg(long, global = true, value_name = "N")]
    mc: Option<usize>,
}

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let (re, im) = s.split_once(':').ok_or_else(|| format!("expected re:im, got {s}"))?;
    Ok([re.trim().parse().map_err(|e| format!("{s}: {e}"))?, im.trim().parse().map_err(|e| format!("{s}: {e}"))?])
}

fn parse_quad(s: &str) -> Result<[usize; 2], String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NRxNT, got {s}"))?;
    Ok([a.parse().map_err(|e| format!("{s}: {e}"))?, b.parse().map_err(|e| format!("{s}: {e}"))?])
}

enum Failure {
    Usage(String),
    Checks(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn load(opts: &Overrides) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &opts.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let mut cfg = ExperimentConfig::from_json(&text)?;
            if cfg.out.is_some() && opts.out.is_none() {
                // relative output paths resolve against the config file
                let base = path.parent().map(PathBuf::from).unwrap_or_default();
                cfg.out = cfg.out.map(|o| base.join(o).to_string_lossy().into_owned());
            }
            cfg
        }
        None => ExperimentConfig::default(),
    };
    if let Some(s) = opts.seed {
        cfg.seed = Some(s);
    }
    if let Some(p) = &opts.p {
        cfg.p = p.clone();
    }
    if let Some(w) = &opts.weight {
        cfg.weight = Some(w.clone());
    }
    if let Some(w2) = &opts.w2 {
        cfg.w2 = w2.clone();
    }
    if let Some(r) = opts.rmin {
        cfg.r_min = r;
    }
    if let Some(q) = opts.quad {
        cfg.quad = q;
    }
    if let Some(n) = opts.mc {
        cfg.mc = n;
    }
    if let Some(o) = &opts.out {
        cfg.out = Some(o.to_string_lossy().into_owned());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(cfg: &ExperimentConfig, text: &str) -> Result<(), Failure> {
    match &cfg.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("{path}: {e}"))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Usage(e.to_string())),
    }
}

fn finish(cfg: &ExperimentConfig, out: CommandOutput) -> Result<(), Failure> {
    emit(cfg, &out.table.render())?;
    if out.failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Checks(out.failures))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = load(&cli.opts)?;
    match cli.command {
        Command::Verify { suites } => {
            let names: Vec<&str> = suites.iter().map(String::as_str).collect();
            let report = run_verify(&cfg, (!names.is_empty()).then_some(names.as_slice()))?;
            emit(&cfg, &(report.to_json() + "\n"))?;
            match report.first_failure() {
                None => Ok(()),
                Some(e) => Err(Failure::Checks(vec![format!("first failing invariant: {}/{}", e.suite, e.case)])),
            }
        }
        Command::BbSweep => finish(&cfg, bb_sweep(&cfg)?),
        Command::BellCheck => finish(&cfg, bell_check(&cfg)?),
        Command::IbpCheck => finish(&cfg, ibp_check(&cfg)?),
        Command::SobolevCheck => finish(&cfg, sobolev_check(&cfg)?),
        Command::OpnormSweep => finish(&cfg, opnorm_sweep(&cfg)?),
        Command::TentArea => finish(&cfg, tent_area_table(&cfg)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Checks(names)) => {
            for n in names {
                eprintln!("failed: {n}");
            }
            ExitCode::from(1)
        }
    }
}
