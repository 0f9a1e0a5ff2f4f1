use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::config::{Format, SuiteConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    Expansion,
    Fit,
}

/// How `observed` is judged against `expected` and `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    /// `|observed - expected| <= tolerance`.
    Absolute,
    /// `|observed - expected| <= tolerance |expected|`.
    Relative,
    /// `observed <= expected + tolerance`.
    Upper,
    /// `observed >= expected - tolerance`.
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check_id: String,
    pub m: Option<f64>,
    pub kappa: Option<f64>,
    pub gauss: Option<f64>,
    pub sector: Option<i32>,
    pub expected: f64,
    pub observed: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    /// Reported-only checks never affect the exit status.
    pub asserted: bool,
    pub provenance: Provenance,
    pub runtime_s: Option<f64>,
}

impl CheckRecord {
    pub fn new(
        check_id: &str,
        comparison: Comparison,
        expected: f64,
        observed: f64,
        tolerance: f64,
        provenance: Provenance,
    ) -> Self {
        let abs_error = (observed - expected).abs();
        let rel_error = if expected != 0.0 {
            abs_error / expected.abs()
        } else {
            abs_error
        };
        let pass = match comparison {
            Comparison::Absolute => abs_error <= tolerance,
            Comparison::Relative => rel_error <= tolerance,
            Comparison::Upper => observed <= expected + tolerance,
            Comparison::Lower => observed >= expected - tolerance,
        };
        Self {
            check_id: check_id.to_string(),
            m: None,
            kappa: None,
            gauss: None,
            sector: None,
            expected,
            observed,
            abs_error,
            rel_error,
            tolerance,
            comparison,
            pass,
            asserted: true,
            provenance,
            runtime_s: None,
        }
    }

    pub fn at_m(mut self, m: f64) -> Self {
        self.m = Some(m);
        self
    }

    pub fn at_curvature(mut self, kappa: f64, gauss: f64) -> Self {
        self.kappa = Some(kappa);
        self.gauss = Some(gauss);
        self
    }

    pub fn in_sector(mut self, kappa_j: i32) -> Self {
        self.sector = Some(kappa_j);
        self
    }

    pub fn reported_only(mut self) -> Self {
        self.asserted = false;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub asserted_failures: usize,
    pub reported_only: usize,
    /// Fitted slopes and constants, in record order.
    pub fitted: Vec<NamedValue>,
    pub all_asserted_pass: bool,
}

impl Summary {
    pub fn of(records: &[CheckRecord]) -> Self {
        let fitted = records
            .iter()
            .filter(|r| r.provenance == Provenance::Fit)
            .map(|r| {
                let mut name = r.check_id.clone();
                if let (Some(k), Some(g)) = (r.kappa, r.gauss) {
                    name.push_str(&format!("[{k},{g}]"));
                }
                if let Some(m) = r.m {
                    name.push_str(&format!("@{m}"));
                }
                NamedValue {
                    name,
                    value: r.observed,
                }
            })
            .collect();
        let asserted_failures = records.iter().filter(|r| r.asserted && !r.pass).count();
        Self {
            total: records.len(),
            passed: records.iter().filter(|r| r.pass).count(),
            asserted_failures,
            reported_only: records.iter().filter(|r| !r.asserted).count(),
            fitted,
            all_asserted_pass: asserted_failures == 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: SuiteConfig,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(config: SuiteConfig, records: Vec<CheckRecord>) -> Self {
        let summary = Summary::of(&records);
        Self {
            config,
            records,
            summary,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.all_asserted_pass
    }
}

pub const CSV_HEADER: &str =
    "check_id,m,kappa,gauss,sector,expected,observed,abs_error,rel_error,tolerance,pass";

fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes floats with 17 significant digits; everything else is compact JSON.
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            writer.write_all(sig17(value).as_bytes())
        } else {
            writer.write_all(b"null")
        }
    }
}

pub fn emit_table(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = Vec::new();
            let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17);
            report.serialize(&mut ser).expect("report serializes");
            out.push(b'\n');
            out
        }
        Format::Csv => {
            let opt = |x: Option<f64>| x.map(sig17).unwrap_or_default();
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for r in &report.records {
                let row = [
                    r.check_id.clone(),
                    opt(r.m),
                    opt(r.kappa),
                    opt(r.gauss),
                    r.sector.map(|s| s.to_string()).unwrap_or_default(),
                    sig17(r.expected),
                    sig17(r.observed),
                    sig17(r.abs_error),
                    sig17(r.rel_error),
                    sig17(r.tolerance),
                    r.pass.to_string(),
                ];
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out.into_bytes()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparisons() {
        let r = CheckRecord::new(
            "a",
            Comparison::Absolute,
            1.0,
            1.1,
            0.2,
            Provenance::ClosedForm,
        );
        assert!(r.pass && (r.abs_error - 0.1).abs() < 1e-15);
        assert!(!CheckRecord::new("a", Comparison::Relative, 2.0, 2.2, 0.05, Provenance::Fit).pass);
        assert!(CheckRecord::new("a", Comparison::Upper, 1.0, 0.5, 0.0, Provenance::Fit).pass);
        assert!(!CheckRecord::new("a", Comparison::Lower, 1.0, 0.5, 0.1, Provenance::Fit).pass);
        let zero = CheckRecord::new("a", Comparison::Absolute, 0.0, 3.0, 1.0, Provenance::Fit);
        assert_eq!(zero.rel_error, zero.abs_error);
    }

    #[test]
    fn sig17_round_trips() {
        for x in [
            0.1,
            2.042786942738403,
            -4.172978493422521e-7,
            1e300,
            f64::MIN_POSITIVE,
        ] {
            let s = sig17(x);
            assert_eq!(
                s.split('e')
                    .next()
                    .unwrap()
                    .trim_start_matches('-')
                    .replace('.', "")
                    .len(),
                17
            );
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn summary_counts() {
        let recs = vec![
            CheckRecord::new("a", Comparison::Upper, 1.0, 2.0, 0.0, Provenance::Fit)
                .reported_only(),
            CheckRecord::new(
                "b",
                Comparison::Upper,
                1.0,
                0.0,
                0.0,
                Provenance::ClosedForm,
            ),
        ];
        let s = Summary::of(&recs);
        assert_eq!(
            (s.total, s.passed, s.asserted_failures, s.reported_only),
            (2, 1, 0, 1)
        );
        assert!(s.all_asserted_pass);
        assert_eq!(s.fitted.len(), 1);
    }
}
