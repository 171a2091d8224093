//! Scenario files, end-to-end runs and report output.

mod config;
mod report;
mod run;

pub use config::{load_scenario, CurveSpec, GridSpec, PartySpec, Scenario, ScenarioFile};
pub use report::{
    emit_report, BasisBlock, CheckStatus, FairSpreads, IdentitySummary, OracleEntry, ReportFormat,
    RunMetadata, XvaReport,
};
pub use run::{path_ledgers, report_from_paths, run, RunOptions, SimulatedPaths};
