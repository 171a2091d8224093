use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::xva::{AdjustmentKind, AdjustmentResult, FairSpreadResult};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMetadata {
    pub seed: u64,
    pub n_paths: usize,
    pub n_dates: usize,
    pub horizon: f64,
    pub copula_rho: f64,
    /// Wall-clock time; only recorded on request so reports stay byte-reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_seconds: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FairSpreads {
    /// Spread on A's margin loan, both parties defaultable.
    pub a: FairSpreadResult,
    /// Spread on B's margin loan, both parties defaultable.
    pub b: FairSpreadResult,
    /// Spread on A's margin loan with B riskless.
    pub a_unilateral: FairSpreadResult,
}

/// Funded (asset swap) versus unfunded (CDS) comparison on common random numbers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisBlock {
    pub bva_cds: f64,
    pub fbva_asw: f64,
    pub fbva_minus_bva: f64,
    pub fbva_minus_bva_std_error: f64,
    pub fbcva_minus_bcva: f64,
    pub fbcva_minus_bcva_std_error: f64,
    pub fbdva_minus_bdva: f64,
    pub fbdva_minus_bdva_std_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CheckStatus {
    Passed,
    Failed,
}

impl std::fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CheckStatus::Passed => "PASSED",
            CheckStatus::Failed => "FAILED",
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentitySummary {
    pub status: CheckStatus,
    pub n_paths_checked: usize,
    pub n_ledgers_checked: usize,
    pub max_residual: f64,
    /// Largest residual as a multiple of its path tolerance.
    pub max_residual_ratio: f64,
    pub relative_tolerance: f64,
    pub failures: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_failure_path: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleEntry {
    pub kind: AdjustmentKind,
    pub oracle: f64,
    pub estimate: f64,
    pub std_error: f64,
    /// `(estimate − oracle) / std_error`; zero when both agree exactly.
    pub deviation_in_se: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct XvaReport {
    pub metadata: RunMetadata,
    pub warnings: Vec<String>,
    /// `V⁰_B(t_0)`.
    pub risk_free_value: f64,
    /// `V⁰_B(t_0) − BVA`, B's value of the uncollateralized trade.
    pub risky_value: f64,
    pub bcva: AdjustmentResult,
    pub bdva: AdjustmentResult,
    pub bva: AdjustmentResult,
    pub fcva: AdjustmentResult,
    pub fbcva: AdjustmentResult,
    pub fbdva: AdjustmentResult,
    pub fbva: AdjustmentResult,
    pub fair_spreads: FairSpreads,
    pub basis: BasisBlock,
    pub identity: IdentitySummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Vec<OracleEntry>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "text" => Ok(ReportFormat::Text),
            other => Err(Error::config("format", format!("unknown format `{other}`"))),
        }
    }
}

impl XvaReport {
    pub fn adjustments(&self) -> [&AdjustmentResult; 7] {
        [&self.bcva, &self.bdva, &self.bva, &self.fcva, &self.fbcva, &self.fbdva, &self.fbva]
    }

    pub fn identity_failed(&self) -> bool {
        self.identity.status == CheckStatus::Failed
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Json => {
                let mut s = serde_json::to_string_pretty(self)?;
                s.push('\n');
                Ok(s)
            }
            ReportFormat::Csv => Ok(self.render_csv()),
            ReportFormat::Text => Ok(self.render_text()),
        }
    }

    fn rows(&self) -> Vec<(&'static str, String, f64, Option<f64>)> {
        let mut rows = Vec::new();
        rows.push(("value", "risk_free_value".to_string(), self.risk_free_value, None));
        rows.push(("value", "risky_value".to_string(), self.risky_value, None));
        for a in self.adjustments() {
            rows.push(("adjustment", a.kind.label().to_string(), a.value, Some(a.std_error)));
        }
        let spreads = &self.fair_spreads;
        for (name, s) in [("F_A", &spreads.a), ("F_B", &spreads.b), ("F_A_unilateral", &spreads.a_unilateral)] {
            rows.push(("spread", name.to_string(), s.spread, Some(s.std_error)));
            rows.push(("annuity", name.to_string(), s.annuity, None));
        }
        let b = &self.basis;
        rows.push(("basis", "BVA_cds".into(), b.bva_cds, None));
        rows.push(("basis", "FBVA_asw".into(), b.fbva_asw, None));
        rows.push(("basis", "FBVA_minus_BVA".into(), b.fbva_minus_bva, Some(b.fbva_minus_bva_std_error)));
        rows.push(("basis", "FBCVA_minus_BCVA".into(), b.fbcva_minus_bcva, Some(b.fbcva_minus_bcva_std_error)));
        rows.push(("basis", "FBDVA_minus_BDVA".into(), b.fbdva_minus_bdva, Some(b.fbdva_minus_bdva_std_error)));
        rows.push(("identity", "max_residual".into(), self.identity.max_residual, None));
        rows.push(("identity", "max_residual_ratio".into(), self.identity.max_residual_ratio, None));
        if let Some(entries) = &self.oracle {
            for e in entries {
                rows.push(("oracle", e.kind.label().to_string(), e.oracle, None));
            }
        }
        rows
    }

    fn render_csv(&self) -> String {
        let mut out = String::from("section,metric,value,std_error\n");
        let m = &self.metadata;
        let _ = writeln!(out, "metadata,seed,{},", m.seed);
        let _ = writeln!(out, "metadata,n_paths,{},", m.n_paths);
        let _ = writeln!(out, "metadata,copula_rho,{},", m.copula_rho);
        if let Some(t) = m.elapsed_seconds {
            let _ = writeln!(out, "metadata,elapsed_seconds,{t},");
        }
        for (section, metric, value, se) in self.rows() {
            let se = se.map(|s| s.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{section},{metric},{value},{se}");
        }
        let _ = writeln!(out, "identity,status,{},", self.identity.status);
        out
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        let m = &self.metadata;
        let _ = writeln!(
            out,
            "paths {}  seed {}  dates {}  horizon {}  rho {}",
            m.n_paths, m.seed, m.n_dates, m.horizon, m.copula_rho
        );
        if let Some(t) = m.elapsed_seconds {
            let _ = writeln!(out, "elapsed {t:.3}s");
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<12} {:<18} {:>16} {:>14}", "section", "metric", "value", "std_error");
        for (section, metric, value, se) in self.rows() {
            let se = se.map(|s| format!("{s:>14.8}")).unwrap_or_else(|| format!("{:>14}", "-"));
            let value = if section == "identity" {
                format!("{value:>16.3e}")
            } else {
                format!("{value:>16.8}")
            };
            let _ = writeln!(out, "{section:<12} {metric:<18} {value} {se}");
        }
        let _ = writeln!(
            out,
            "\nledger identity: {} ({} ledgers on {} paths, max residual {:e})",
            self.identity.status, self.identity.n_ledgers_checked, self.identity.n_paths_checked, self.identity.max_residual
        );
        out
    }
}

/// Write the report to `out`, or to stdout when `out` is `None`.
pub fn emit_report(report: &XvaReport, format: ReportFormat, out: Option<&Path>) -> Result<()> {
    let text = report.render(format)?;
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()?;
        }
    }
    Ok(())
}
