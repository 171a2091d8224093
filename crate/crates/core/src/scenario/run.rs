use std::time::Instant;

use rayon::prelude::*;

use super::config::Scenario;
use super::report::{
    BasisBlock, CheckStatus, FairSpreads, IdentitySummary, OracleEntry, RunMetadata, XvaReport,
};
use crate::error::Result;
use crate::exposure::{simulate_exposure, ExposureMatrix, Side};
use crate::ledger::{
    build_bilateral_ledger, build_unilateral_ledger, ledger_pv, verify_pathwise_identity,
    CashflowLedger, IdentityCheck, IDENTITY_TOLERANCE,
};
use crate::market::{simulate_default_times, DefaultScenario, HazardSource};
use crate::oracle::deterministic_adjustment;
use crate::xva::{
    bcva, bdva, bva, fair_spread, fbcva, fbdva, fbva, fcva, funding_annuity, paired_difference,
    AdjustmentKind, AdjustmentResult, LoanMode,
};

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Compare estimates with quadrature values (path-independent products only).
    pub oracle_check: bool,
    /// Record wall-clock time in the report metadata.
    pub record_timing: bool,
}

/// Exposure and both default simulations of a scenario. The CDS and asset-swap default
/// paths come from the same copula draws.
#[derive(Debug, Clone)]
pub struct SimulatedPaths {
    pub exposure: ExposureMatrix,
    pub defaults_cds: Vec<DefaultScenario>,
    pub defaults_asw: Vec<DefaultScenario>,
}

impl SimulatedPaths {
    pub fn generate(scenario: &Scenario) -> Result<Self> {
        let s = scenario;
        let exposure = simulate_exposure(&s.product, &s.curve, &s.grid, s.n_paths, s.seed)?;
        let defaults_cds =
            simulate_default_times(&s.party_a, &s.party_b, HazardSource::Cds, s.rho, s.n_paths, s.seed)?;
        let defaults_asw =
            simulate_default_times(&s.party_a, &s.party_b, HazardSource::Asw, s.rho, s.n_paths, s.seed)?;
        Ok(Self {
            exposure,
            defaults_cds,
            defaults_asw,
        })
    }
}

/// The two bilateral margin loans on one asset-swap path: A's (funding collateral against
/// `V⁺_B`) and B's (against `V⁺_A`, built with roles swapped).
pub fn path_ledgers(scenario: &Scenario, paths: &SimulatedPaths, path: usize) -> [CashflowLedger; 2] {
    let row = paths.exposure.row(path);
    let s = &paths.defaults_asw[path];
    let neg: Vec<f64> = row.iter().map(|v| -v).collect();
    [
        build_bilateral_ledger(row, s, &scenario.grid, &scenario.curve, scenario.party_a.recovery()),
        build_bilateral_ledger(&neg, &s.swapped(), &scenario.grid, &scenario.curve, scenario.party_b.recovery()),
    ]
}

fn identity_sweep(scenario: &Scenario, paths: &SimulatedPaths) -> IdentitySummary {
    let grid = &scenario.grid;
    let curve = &scenario.curve;
    let (lgd_a, lgd_b) = (scenario.party_a.lgd(), scenario.party_b.lgd());
    let checks: Vec<[IdentityCheck; 3]> = (0..paths.exposure.n_paths())
        .into_par_iter()
        .map(|i| {
            let row = paths.exposure.row(i);
            let s = &paths.defaults_asw[i];
            let uni = build_unilateral_ledger(row, s, grid, curve, scenario.party_a.recovery());
            let [loan_a, loan_b] = path_ledgers(scenario, paths, i);
            let neg: Vec<f64> = row.iter().map(|v| -v).collect();
            [
                verify_pathwise_identity(ledger_pv(&uni, curve), s, row, grid, curve, lgd_a, LoanMode::Unilateral),
                verify_pathwise_identity(ledger_pv(&loan_a, curve), s, row, grid, curve, lgd_a, LoanMode::Bilateral),
                verify_pathwise_identity(ledger_pv(&loan_b, curve), &s.swapped(), &neg, grid, curve, lgd_b, LoanMode::Bilateral),
            ]
        })
        .collect();
    let mut summary = IdentitySummary {
        status: CheckStatus::Passed,
        n_paths_checked: checks.len(),
        n_ledgers_checked: 3 * checks.len(),
        max_residual: 0.0,
        max_residual_ratio: 0.0,
        relative_tolerance: IDENTITY_TOLERANCE,
        failures: 0,
        first_failure_path: None,
    };
    for c in checks.iter().flatten() {
        summary.max_residual = summary.max_residual.max(c.residual);
        summary.max_residual_ratio = summary.max_residual_ratio.max(c.residual / c.tolerance);
        if !c.holds {
            summary.failures += 1;
            summary.first_failure_path.get_or_insert(c.path_id);
            summary.status = CheckStatus::Failed;
        }
    }
    summary
}

fn oracle_entries(scenario: &Scenario, paths: &SimulatedPaths, results: [&AdjustmentResult; 5]) -> Result<Option<Vec<OracleEntry>>> {
    if !scenario.product.is_deterministic() {
        return Ok(None);
    }
    let profile = paths.exposure.row(0);
    let mut entries = Vec::new();
    for r in results {
        let source = match r.kind {
            AdjustmentKind::Bcva | AdjustmentKind::Bdva => HazardSource::Cds,
            _ => HazardSource::Asw,
        };
        let oracle = deterministic_adjustment(
            r.kind,
            profile,
            &scenario.grid,
            &scenario.curve,
            &scenario.party_a,
            &scenario.party_b,
            source,
            scenario.rho,
        )?;
        let gap = r.value - oracle;
        let deviation_in_se = if r.std_error > 0.0 {
            gap / r.std_error
        } else if gap == 0.0 {
            0.0
        } else {
            gap.signum() * f64::INFINITY
        };
        entries.push(OracleEntry {
            kind: r.kind,
            oracle,
            estimate: r.value,
            std_error: r.std_error,
            deviation_in_se,
        });
    }
    Ok(Some(entries))
}

/// Price every adjustment, solve the fair spreads, and replay the margin ledgers on every path.
pub fn run(scenario: &Scenario, options: RunOptions) -> Result<XvaReport> {
    let started = Instant::now();
    let paths = SimulatedPaths::generate(scenario)?;
    report_from_paths(scenario, &paths, options, started)
}

pub fn report_from_paths(
    scenario: &Scenario,
    paths: &SimulatedPaths,
    options: RunOptions,
    started: Instant,
) -> Result<XvaReport> {
    let s = scenario;
    let e = &paths.exposure;
    let (cds, asw) = (&paths.defaults_cds, &paths.defaults_asw);
    let (lgd_a, lgd_b) = (s.party_a.lgd(), s.party_b.lgd());

    let bcva_r = bcva(e, cds, &s.curve, lgd_a)?;
    let bdva_r = bdva(e, cds, &s.curve, lgd_b)?;
    let bva_r = bva(&bcva_r, &bdva_r)?;
    let fcva_r = fcva(e, asw, &s.curve, lgd_a)?;
    let fbcva_r = fbcva(e, asw, &s.curve, lgd_a)?;
    let fbdva_r = fbdva(e, asw, &s.curve, lgd_b)?;
    let fbva_r = fbva(&fbcva_r, &fbdva_r)?;

    let ann_a = funding_annuity(e, asw, &s.curve, Side::A, LoanMode::Bilateral)?;
    let ann_b = funding_annuity(e, asw, &s.curve, Side::B, LoanMode::Bilateral)?;
    let ann_a_uni = funding_annuity(e, asw, &s.curve, Side::A, LoanMode::Unilateral)?;
    let fair_spreads = FairSpreads {
        a: fair_spread(&fbcva_r, &ann_a)?,
        b: fair_spread(&fbdva_r, &ann_b)?,
        a_unilateral: fair_spread(&fcva_r, &ann_a_uni)?,
    };

    let (_, fbva_gap_se) = paired_difference(&fbva_r, &bva_r)?;
    let (_, fbcva_gap_se) = paired_difference(&fbcva_r, &bcva_r)?;
    let (_, fbdva_gap_se) = paired_difference(&fbdva_r, &bdva_r)?;
    let basis = BasisBlock {
        bva_cds: bva_r.value,
        fbva_asw: fbva_r.value,
        fbva_minus_bva: fbva_r.value - bva_r.value,
        fbva_minus_bva_std_error: fbva_gap_se,
        fbcva_minus_bcva: fbcva_r.value - bcva_r.value,
        fbcva_minus_bcva_std_error: fbcva_gap_se,
        fbdva_minus_bdva: fbdva_r.value - bdva_r.value,
        fbdva_minus_bdva_std_error: fbdva_gap_se,
    };

    let identity = identity_sweep(s, paths);
    let oracle = if options.oracle_check {
        oracle_entries(s, paths, [&bcva_r, &bdva_r, &fcva_r, &fbcva_r, &fbdva_r])?
    } else {
        None
    };

    let risk_free_value = crate::stats::mean(&e.rows().map(|r| r[0]).collect::<Vec<_>>());
    let risky_value = risk_free_value - bva_r.value;

    let mut warnings = s.warnings.clone();
    if options.oracle_check && oracle.is_none() {
        warnings.push("oracle check skipped: exposure is path-dependent".into());
    }

    Ok(XvaReport {
        metadata: RunMetadata {
            seed: s.seed,
            n_paths: s.n_paths,
            n_dates: s.grid.len(),
            horizon: s.grid.horizon(),
            copula_rho: s.rho,
            elapsed_seconds: options.record_timing.then(|| started.elapsed().as_secs_f64()),
        },
        warnings,
        risk_free_value,
        risky_value,
        bcva: bcva_r,
        bdva: bdva_r,
        bva: bva_r,
        fcva: fcva_r,
        fbcva: fbcva_r,
        fbdva: fbdva_r,
        fbva: fbva_r,
        fair_spreads,
        basis,
        identity,
        oracle,
    })
}
