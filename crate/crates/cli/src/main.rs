use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use mitbag_verify::{run_suite, Format, Suite, SuiteConfig, VerifyError};

/// Run a verification suite and write a CSV or JSON report.
#[derive(Debug, Parser)]
#[command(name = "verify", version)]
struct Args {
    /// JSON configuration file.
    config: PathBuf,
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    /// Comma-separated masses, ascending.
    #[arg(long, value_delimiter = ',')]
    m_grid: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Sets both the absolute and the relative solver tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

fn load(args: &Args) -> Result<SuiteConfig, VerifyError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| VerifyError::Config(format!("{}: {e}", args.config.display())))?;
    let mut cfg: SuiteConfig =
        serde_json::from_str(&text).map_err(|e| VerifyError::Config(e.to_string()))?;
    if let Some(s) = args.suite {
        cfg.suite = s;
    }
    if let Some(g) = &args.m_grid {
        cfg.m_grid = Some(g.clone());
    }
    if let Some(o) = &args.out {
        cfg.output_path = o.clone();
    }
    if let Some(f) = args.format {
        cfg.format = f;
    }
    if let Some(t) = args.tol {
        cfg.tolerances.abs_tol = t;
        cfg.tolerances.rel_tol = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn init_threads() -> Result<(), VerifyError> {
    let Ok(raw) = std::env::var("VERIFY_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        VerifyError::Config(format!(
            "VERIFY_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| VerifyError::Config(e.to_string()))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = init_threads()
        .and_then(|()| load(&args))
        .and_then(|cfg| run_suite(&cfg).map(|r| (cfg, r)));
    match result {
        Ok((cfg, report)) => {
            let s = &report.summary;
            println!(
                "{} checks, {} passed, {} asserted failures, {} reported only; report at {}",
                s.total,
                s.passed,
                s.asserted_failures,
                s.reported_only,
                cfg.output_path.display()
            );
            for r in report.records.iter().filter(|r| r.asserted && !r.pass) {
                println!(
                    "FAIL {} m={:?} kappa={:?} K={:?} sector={:?}: observed {} expected {}",
                    r.check_id, r.m, r.kappa, r.gauss, r.sector, r.observed, r.expected
                );
            }
            ExitCode::from(if report.passed() { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
