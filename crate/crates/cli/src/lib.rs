//! Verification suites over `mitbag-core` with CSV/JSON reports.

pub mod config;
pub mod error;
pub mod report;
pub mod suites;

use std::fs;
use std::path::Path;

pub use config::{Format, Suite, SuiteConfig};
pub use error::VerifyError;
pub use report::{emit_table, CheckRecord, Comparison, Provenance, Report, Summary};

/// Runs every check of the configured suite without touching the disk.
pub fn evaluate(cfg: &SuiteConfig) -> Result<Report, VerifyError> {
    cfg.validate()?;
    let mut records = Vec::new();
    for suite in cfg.suite.members() {
        records.extend(suites::run(suite, cfg)?);
    }
    Ok(Report::new(cfg.clone(), records))
}

/// Runs the suite and writes the report to `cfg.output_path` atomically.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report, VerifyError> {
    cfg.validate()?;
    check_writable(&cfg.output_path)?;
    let report = evaluate(cfg)?;
    write_atomic(&cfg.output_path, &emit_table(&report, cfg.format))?;
    Ok(report)
}

fn parent_dir(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

fn check_writable(path: &Path) -> Result<(), VerifyError> {
    let dir = parent_dir(path);
    let io_err = |source| VerifyError::Io {
        path: path.to_path_buf(),
        source,
    };
    let meta = fs::metadata(dir).map_err(io_err)?;
    if !meta.is_dir() || meta.permissions().readonly() {
        return Err(io_err(std::io::Error::new(
            std::io::ErrorKind::PermissionDenied,
            format!("{} is not a writable directory", dir.display()),
        )));
    }
    if path.is_dir() {
        return Err(io_err(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            "output path is a directory",
        )));
    }
    Ok(())
}

/// Writes to a sibling temporary file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), VerifyError> {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = parent_dir(path).join(format!(".{name}.{}.tmp", std::process::id()));
    let io_err = |source| VerifyError::Io {
        path: path.to_path_buf(),
        source,
    };
    fs::write(&tmp, bytes).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_err(e)
    })
}
