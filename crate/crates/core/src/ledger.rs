//! Path-level replay of the margin loan's cashflows.
//!
//! The loan funds the collateral A posts against B's positive value `V⁺_B`. Seen from B,
//! each path books:
//!
//! * `initial_draw`: `−V⁺_B(t_0)` at `t_0`;
//! * `margin_step`: `−[V⁺_B(t_k) − V⁺_B(t_{k−1})]` at `t_k` while the loan is alive at `t_k`;
//! * `interest`: `V⁺_B(t_{k−1})·θ_k·ε_{k−1}` at `t_k` while alive at `t_k`;
//! * `final_repay`: `V⁺_B(t_M)` at `t_M` if the loan survives the horizon;
//! * `recovery_A`: `R_A·V⁺_B(t_{k−1})·(1 + θ_k·ε_{k−1})` at `t_k` when A defaults (first) in period `k`;
//! * `early_termination_B`: `V⁺_B(t_{k−1})·(1 + θ_k·ε_{k−1})` at `t_k` when B defaults first in period `k`.
//!
//! Amounts are stored undiscounted; [`ledger_pv`] discounts them. With `ε` taken from the
//! discount curve the present value collapses to minus the realized funded loss on every path,
//! which [`verify_pathwise_identity`] checks. The loan funding B's collateral is the same
//! ledger built on the negated row with the parties swapped.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exposure::Side;
use crate::market::{DefaultScenario, DiscountCurve, TimeGrid};
use crate::stats::compensated_sum;
use crate::xva::{path_loss, LoanMode};

/// Relative tolerance of the path-wise identity, scaled by the path's largest exposure.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CashflowTag {
    #[serde(rename = "initial_draw")]
    InitialDraw,
    #[serde(rename = "final_repay")]
    FinalRepay,
    #[serde(rename = "margin_step")]
    MarginStep,
    #[serde(rename = "interest")]
    Interest,
    #[serde(rename = "recovery_A")]
    RecoveryA,
    #[serde(rename = "early_termination_B")]
    EarlyTerminationB,
}

impl CashflowTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CashflowTag::InitialDraw => "initial_draw",
            CashflowTag::FinalRepay => "final_repay",
            CashflowTag::MarginStep => "margin_step",
            CashflowTag::Interest => "interest",
            CashflowTag::RecoveryA => "recovery_A",
            CashflowTag::EarlyTerminationB => "early_termination_B",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub time: f64,
    pub amount: f64,
    pub tag: CashflowTag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CashflowLedger {
    pub path_id: u64,
    pub mode: LoanMode,
    pub entries: Vec<LedgerEntry>,
}

impl CashflowLedger {
    /// Drop margin steps of exactly zero (constant exposure).
    pub fn without_zero_margin_steps(mut self) -> Self {
        self.entries
            .retain(|e| !(e.tag == CashflowTag::MarginStep && e.amount == 0.0));
        self
    }

    pub fn has_default_entry(&self) -> bool {
        self.entries
            .iter()
            .any(|e| matches!(e.tag, CashflowTag::RecoveryA | CashflowTag::EarlyTerminationB))
    }
}

fn build_ledger(
    row: &[f64],
    scenario: &DefaultScenario,
    grid: &TimeGrid,
    curve: &DiscountCurve,
    recovery_a: f64,
    mode: LoanMode,
) -> CashflowLedger {
    debug_assert_eq!(row.len(), grid.len());
    let pos = |i: usize| row[i].max(0.0);
    let mut entries = Vec::with_capacity(2 * grid.len() + 1);
    entries.push(LedgerEntry {
        time: grid.date(0),
        amount: -pos(0),
        tag: CashflowTag::InitialDraw,
    });
    let b_counts = mode == LoanMode::Bilateral;
    let mut survived = true;
    for k in 1..=grid.periods() {
        let t = grid.date(k);
        let prev = grid.date(k - 1);
        let gross = 1.0 + grid.accrual(k) * curve.accrual_rate_unchecked(grid, k);
        let a_in = scenario.tau_a > prev && scenario.tau_a <= t;
        let b_in = b_counts && scenario.tau_b > prev && scenario.tau_b <= t;
        let a_first = a_in && (!b_counts || scenario.a_defaults_first());
        let b_first = b_in && !scenario.a_defaults_first();
        if a_first {
            entries.push(LedgerEntry {
                time: t,
                amount: recovery_a * pos(k - 1) * gross,
                tag: CashflowTag::RecoveryA,
            });
            survived = false;
            break;
        }
        if b_first {
            entries.push(LedgerEntry {
                time: t,
                amount: pos(k - 1) * gross,
                tag: CashflowTag::EarlyTerminationB,
            });
            survived = false;
            break;
        }
        entries.push(LedgerEntry {
            time: t,
            amount: -(pos(k) - pos(k - 1)),
            tag: CashflowTag::MarginStep,
        });
        entries.push(LedgerEntry {
            time: t,
            amount: pos(k - 1) * grid.accrual(k) * curve.accrual_rate_unchecked(grid, k),
            tag: CashflowTag::Interest,
        });
    }
    if survived {
        entries.push(LedgerEntry {
            time: grid.horizon(),
            amount: pos(grid.periods()),
            tag: CashflowTag::FinalRepay,
        });
    }
    CashflowLedger {
        path_id: scenario.path_id,
        mode,
        entries,
    }
}

/// Ledger of the loan when only A can default. `row` is `V⁰_B` on the grid.
pub fn build_unilateral_ledger(
    row: &[f64],
    scenario: &DefaultScenario,
    grid: &TimeGrid,
    curve: &DiscountCurve,
    recovery_a: f64,
) -> CashflowLedger {
    build_ledger(row, scenario, grid, curve, recovery_a, LoanMode::Unilateral)
}

/// Ledger of the loan when the first default of either party terminates it. A's default
/// pays `R_A` on the balance; B's default repays the balance at par.
pub fn build_bilateral_ledger(
    row: &[f64],
    scenario: &DefaultScenario,
    grid: &TimeGrid,
    curve: &DiscountCurve,
    recovery_a: f64,
) -> CashflowLedger {
    build_ledger(row, scenario, grid, curve, recovery_a, LoanMode::Bilateral)
}

/// `Σ amount·D(t_0, time)`.
pub fn ledger_pv(ledger: &CashflowLedger, curve: &DiscountCurve) -> f64 {
    let terms: Vec<f64> = ledger
        .entries
        .iter()
        .map(|e| e.amount * curve.df(e.time))
        .collect();
    compensated_sum(&terms)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub path_id: u64,
    pub ledger_pv: f64,
    /// Minus the realized loss `L_A·D(t_0,t_{k−1})·V⁺_B(t_{k−1})` on the path.
    pub expected: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub holds: bool,
}

impl IdentityCheck {
    pub fn into_result(self) -> Result<Self> {
        if self.holds {
            Ok(self)
        } else {
            Err(Error::IdentityViolation {
                path_id: self.path_id,
                residual: self.residual,
                tolerance: self.tolerance,
            })
        }
    }
}

/// Compare a ledger's present value with minus the path's realized funded loss.
pub fn verify_pathwise_identity(
    ledger_pv: f64,
    scenario: &DefaultScenario,
    row: &[f64],
    grid: &TimeGrid,
    curve: &DiscountCurve,
    lgd: f64,
    mode: LoanMode,
) -> IdentityCheck {
    let discounts = curve.grid_discounts(grid);
    let expected = -path_loss(grid, &discounts, row, scenario, Side::A, mode, lgd);
    let scale = row.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tolerance = IDENTITY_TOLERANCE * scale;
    let residual = (ledger_pv - expected).abs();
    IdentityCheck {
        path_id: scenario.path_id,
        ledger_pv,
        expected,
        residual,
        tolerance,
        holds: residual < tolerance,
    }
}

/// Delimited dump with header `time,amount,tag,path_id`.
pub fn write_ledgers<'a, W: Write>(
    mut out: W,
    ledgers: impl IntoIterator<Item = &'a CashflowLedger>,
) -> Result<()> {
    writeln!(out, "time,amount,tag,path_id")?;
    for ledger in ledgers {
        for e in &ledger.entries {
            writeln!(out, "{},{},{},{}", e.time, e.amount, e.tag.as_str(), ledger.path_id)?;
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::NO_DEFAULT;

    fn one_period() -> TimeGrid {
        TimeGrid::new(vec![0.0, 1.0]).unwrap()
    }

    fn sc(tau_a: f64, tau_b: f64) -> DefaultScenario {
        DefaultScenario { tau_a, tau_b, path_id: 0 }
    }

    fn amounts(l: &CashflowLedger) -> Vec<(f64, f64, CashflowTag)> {
        l.entries.iter().map(|e| (e.time, e.amount, e.tag)).collect()
    }

    #[test]
    fn survival_is_a_fair_loan() {
        let g = TimeGrid::new(vec![0.0, 1.0, 2.0]).unwrap();
        let c = DiscountCurve::flat(0.0);
        let l = build_unilateral_ledger(&[100.0; 3], &sc(NO_DEFAULT, NO_DEFAULT), &g, &c, 0.4);
        assert_eq!(l.entries.first().unwrap().amount, -100.0);
        assert_eq!(l.entries.last().unwrap().tag, CashflowTag::FinalRepay);
        assert_eq!(l.entries.last().unwrap().amount, 100.0);
        assert!(l.entries.iter().filter(|e| e.tag == CashflowTag::MarginStep).all(|e| e.amount == 0.0));
        assert_eq!(ledger_pv(&l, &c), 0.0);
        let elided = l.clone().without_zero_margin_steps();
        assert_eq!(elided.entries.len(), l.entries.len() - 2);
    }

    #[test]
    fn a_default_recovers_forty_percent() {
        let c = DiscountCurve::flat(0.0);
        let l = build_unilateral_ledger(&[100.0, 100.0], &sc(0.5, NO_DEFAULT), &one_period(), &c, 0.4);
        assert_eq!(
            amounts(&l),
            vec![(0.0, -100.0, CashflowTag::InitialDraw), (1.0, 40.0, CashflowTag::RecoveryA)]
        );
        let pv = ledger_pv(&l, &c);
        assert!((pv + 60.0).abs() < 1e-12);
        let check = verify_pathwise_identity(pv, &sc(0.5, NO_DEFAULT), &[100.0, 100.0], &one_period(), &c, 0.6, LoanMode::Unilateral);
        assert!(check.holds);
        assert!((check.expected + 60.0).abs() < 1e-12);
    }

    #[test]
    fn b_default_terminates_at_par() {
        let c = DiscountCurve::flat(0.0);
        let s = sc(NO_DEFAULT, 0.3);
        let l = build_bilateral_ledger(&[100.0, 100.0], &s, &one_period(), &c, 0.4);
        assert_eq!(
            amounts(&l),
            vec![(0.0, -100.0, CashflowTag::InitialDraw), (1.0, 100.0, CashflowTag::EarlyTerminationB)]
        );
        assert_eq!(ledger_pv(&l, &c), 0.0);
        // the unilateral loan ignores B
        let u = build_unilateral_ledger(&[100.0, 100.0], &s, &one_period(), &c, 0.4);
        assert!(!u.has_default_entry());
    }

    #[test]
    fn bilateral_a_first_matches_unilateral() {
        let c = DiscountCurve::flat(0.0);
        let s = sc(0.3, 0.6);
        let b = build_bilateral_ledger(&[100.0, 100.0], &s, &one_period(), &c, 0.4);
        let u = build_unilateral_ledger(&[100.0, 100.0], &s, &one_period(), &c, 0.4);
        assert_eq!(b.entries, u.entries);
        assert!((ledger_pv(&b, &c) + 60.0).abs() < 1e-12);
    }

    #[test]
    fn single_entry_pv() {
        let l = CashflowLedger {
            path_id: 0,
            mode: LoanMode::Unilateral,
            entries: vec![LedgerEntry { time: 1.0, amount: 100.0, tag: CashflowTag::FinalRepay }],
        };
        let pv = ledger_pv(&l, &DiscountCurve::flat(0.02));
        assert!((pv - 98.019_87).abs() < 5e-6);
        let empty = CashflowLedger { path_id: 0, mode: LoanMode::Unilateral, entries: vec![] };
        assert_eq!(ledger_pv(&empty, &DiscountCurve::flat(0.02)), 0.0);
    }

    #[test]
    fn identity_failure_reports_the_path() {
        let s = DefaultScenario { tau_a: 0.5, tau_b: NO_DEFAULT, path_id: 42 };
        let check = verify_pathwise_identity(-59.0, &s, &[100.0, 100.0], &one_period(), &DiscountCurve::flat(0.0), 0.6, LoanMode::Unilateral);
        assert!(!check.holds);
        match check.into_result() {
            Err(Error::IdentityViolation { path_id, .. }) => assert_eq!(path_id, 42),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dump_format() {
        let c = DiscountCurve::flat(0.0);
        let l = build_unilateral_ledger(&[100.0, 100.0], &sc(0.5, NO_DEFAULT), &one_period(), &c, 0.4);
        let mut buf = Vec::new();
        write_ledgers(&mut buf, [&l]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "time,amount,tag,path_id\n0,-100,initial_draw,0\n1,40,recovery_A,0\n"
        );
    }
}
