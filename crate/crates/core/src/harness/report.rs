use std::fmt::Write as _;
use std::path::Path;

use super::{ConvergenceReport, ReplicationRecord};
use crate::{Error, Result};

pub const CSV_COLUMNS: [&str; 15] = [
    "n",
    "rep",
    "theta_true",
    "theta_hat",
    "b2",
    "r_n",
    "a_n",
    "beta_n",
    "beta_n_prime",
    "D_rw_oracle",
    "sqrtn_D",
    "D_thm1_oracle",
    "D_thm2_raw",
    "skipped",
    "reason",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(Error::Usage(format!("unknown report format `{s}`"))),
        }
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub(crate) fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

pub(crate) fn records_to_csv(records: &[ReplicationRecord]) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for r in records {
        let fields = [
            r.n.to_string(),
            r.rep.to_string(),
            fmt_real(r.theta_true),
            fmt_opt(r.theta_hat),
            fmt_opt(r.b2),
            fmt_opt(r.r_n),
            fmt_opt(r.a_n),
            fmt_opt(r.beta_n),
            fmt_opt(r.beta_n_prime),
            fmt_opt(r.d_rw_oracle),
            fmt_opt(r.sqrtn_d),
            fmt_opt(r.d_thm1_oracle),
            fmt_opt(r.d_thm2_raw),
            r.skipped.to_string(),
            r.reason.replace([',', '\n'], ";"),
        ];
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

pub fn emit_report(report: &ConvergenceReport, format: ReportFormat, path: &Path) -> Result<()> {
    let text = match format {
        ReportFormat::Csv => records_to_csv(&report.records),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            s
        }
    };
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads back the per-rep table written by [`emit_report`] in CSV form.
pub fn parse_csv_report(text: &str) -> Result<Vec<ReplicationRecord>> {
    let bad = |line: usize, reason: String| Error::Parse {
        id: format!("report line {line}"),
        reason,
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad(1, "missing header".into()))?;
    if header != CSV_COLUMNS.join(",") {
        return Err(bad(1, format!("unexpected header `{header}`")));
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != CSV_COLUMNS.len() {
            return Err(bad(lineno, format!("expected 15 fields, got {}", f.len())));
        }
        let real = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|e| bad(lineno, format!("`{s}`: {e}")))
        };
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                real(s).map(Some)
            }
        };
        let int = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|e| bad(lineno, format!("`{s}`: {e}")))
        };
        records.push(ReplicationRecord {
            n: int(f[0])?,
            rep: int(f[1])?,
            theta_true: real(f[2])?,
            theta_hat: opt(f[3])?,
            b2: opt(f[4])?,
            r_n: opt(f[5])?,
            a_n: opt(f[6])?,
            beta_n: opt(f[7])?,
            beta_n_prime: opt(f[8])?,
            d_rw_oracle: opt(f[9])?,
            sqrtn_d: opt(f[10])?,
            d_thm1_oracle: opt(f[11])?,
            d_thm2_raw: opt(f[12])?,
            skipped: f[13]
                .parse::<bool>()
                .map_err(|e| bad(lineno, format!("`{}`: {e}", f[13])))?,
            reason: f[14].to_string(),
        });
    }
    Ok(records)
}
