//! Monte Carlo estimators for the unfunded and funded valuation adjustments and the
//! fair funding spreads of the two margin loans.
//!
//! Defaults are observed on the grid: a default at `τ ∈ (t_{k−1}, t_k]` is attributed to
//! period `k` and loses the exposure at the left date `t_{k−1}`. First-to-default ties go to A.
//! Every estimator stores its per-path samples so paired statistics (BVA, spread errors)
//! can be formed on the same paths.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exposure::{ExposureMatrix, Side};
use crate::market::{DefaultScenario, DiscountCurve, TimeGrid};
use crate::stats::mean_and_std_error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum AdjustmentKind {
    Bcva,
    Bdva,
    Bva,
    Fcva,
    Fbcva,
    Fbdva,
    Fbva,
}

impl AdjustmentKind {
    /// The party whose default (and whose funding spread) the adjustment prices.
    pub fn borrower(self) -> Option<Side> {
        match self {
            AdjustmentKind::Bcva | AdjustmentKind::Fcva | AdjustmentKind::Fbcva => Some(Side::A),
            AdjustmentKind::Bdva | AdjustmentKind::Fbdva => Some(Side::B),
            AdjustmentKind::Bva | AdjustmentKind::Fbva => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AdjustmentKind::Bcva => "BCVA",
            AdjustmentKind::Bdva => "BDVA",
            AdjustmentKind::Bva => "BVA",
            AdjustmentKind::Fcva => "FCVA",
            AdjustmentKind::Fbcva => "FBCVA",
            AdjustmentKind::Fbdva => "FBDVA",
            AdjustmentKind::Fbva => "FBVA",
        }
    }
}

/// Whether the other party's default terminates the loan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoanMode {
    /// Only the borrower can default.
    Unilateral,
    /// Both parties can default; the first one ends the loan.
    Bilateral,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdjustmentResult {
    pub kind: AdjustmentKind,
    pub value: f64,
    pub std_error: f64,
    pub n_paths: usize,
    #[serde(skip)]
    samples: Vec<f64>,
}

impl AdjustmentResult {
    fn from_samples(kind: AdjustmentKind, samples: Vec<f64>) -> Self {
        let (value, std_error) = mean_and_std_error(&samples);
        Self {
            kind,
            value,
            std_error,
            n_paths: samples.len(),
            samples,
        }
    }

    /// Per-path contributions; empty for results read back from a report.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
}

/// Present value of a unit funding spread paid in advance on the collateral balance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnnuityResult {
    pub borrower: Side,
    pub mode: LoanMode,
    pub value: f64,
    pub std_error: f64,
    #[serde(skip)]
    samples: Vec<f64>,
}

impl AnnuityResult {
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FairSpreadResult {
    pub party: Side,
    /// Per-annum spread over the risk-free rate.
    pub spread: f64,
    /// Delta-method standard error of the ratio estimator.
    pub std_error: f64,
    pub annuity: f64,
}

fn check_paths(exposure: &ExposureMatrix, defaults: &[DefaultScenario]) -> Result<()> {
    if exposure.n_paths() != defaults.len() {
        return Err(Error::Contract(format!(
            "exposure has {} paths but {} default scenarios were given",
            exposure.n_paths(),
            defaults.len()
        )));
    }
    Ok(())
}

/// Realized discounted loss on one path when `defaulter` defaults in the horizon, first
/// (bilateral) or regardless of the other party (unilateral).
#[inline]
pub(crate) fn path_loss(
    grid: &TimeGrid,
    discounts: &[f64],
    row: &[f64],
    scenario: &DefaultScenario,
    defaulter: Side,
    mode: LoanMode,
    lgd: f64,
) -> f64 {
    let (tau, first) = match defaulter {
        Side::A => (scenario.tau_a, scenario.a_defaults_first()),
        Side::B => (scenario.tau_b, !scenario.a_defaults_first()),
    };
    if mode == LoanMode::Bilateral && !first {
        return 0.0;
    }
    match grid.period_of(tau) {
        Some(k) => {
            let v = row[k - 1];
            // A defaulting loses B's positive value, and vice versa
            let exposure = match defaulter {
                Side::A => v.max(0.0),
                Side::B => (-v).max(0.0),
            };
            lgd * discounts[k - 1] * exposure
        }
        None => 0.0,
    }
}

fn loss_adjustment(
    kind: AdjustmentKind,
    exposure: &ExposureMatrix,
    defaults: &[DefaultScenario],
    curve: &DiscountCurve,
    lgd: f64,
    mode: LoanMode,
) -> Result<AdjustmentResult> {
    check_paths(exposure, defaults)?;
    if !(0.0..=1.0).contains(&lgd) {
        return Err(Error::Domain(format!("loss given default must lie in [0, 1], got {lgd}")));
    }
    let defaulter = kind.borrower().expect("loss adjustments have a defaulting party");
    let grid = exposure.grid();
    let discounts = curve.grid_discounts(grid);
    let samples: Vec<f64> = defaults
        .par_iter()
        .enumerate()
        .map(|(i, s)| path_loss(grid, &discounts, exposure.row(i), s, defaulter, mode, lgd))
        .collect();
    Ok(AdjustmentResult::from_samples(kind, samples))
}

/// Bilateral CVA: `Σ_k L_A·1{t_{k−1} < τ_A ≤ min(t_k, τ_B)}·D(t_0,t_{k−1})·V⁺_B(t_{k−1})`.
pub fn bcva(
    exposure: &ExposureMatrix,
    defaults: &[DefaultScenario],
    curve: &DiscountCurve,
    lgd_a: f64,
) -> Result<AdjustmentResult> {
    loss_adjustment(AdjustmentKind::Bcva, exposure, defaults, curve, lgd_a, LoanMode::Bilateral)
}

/// Bilateral DVA: B defaults first and A loses `V⁺_A = [−V⁰_B]⁺`.
pub fn bdva(
    exposure: &ExposureMatrix,
    defaults: &[DefaultScenario],
    curve: &DiscountCurve,
    lgd_b: f64,
) -> Result<AdjustmentResult> {
    loss_adjustment(AdjustmentKind::Bdva, exposure, defaults, curve, lgd_b, LoanMode::Bilateral)
}

/// Funded CVA of the margin loan when B is treated as riskless (`τ_B` ignored).
pub fn fcva(
    exposure: &ExposureMatrix,
    defaults: &[DefaultScenario],
    curve: &DiscountCurve,
    lgd_a: f64,
) -> Result<AdjustmentResult> {
    loss_adjustment(AdjustmentKind::Fcva, exposure, defaults, curve, lgd_a, LoanMode::Unilateral)
}

/// Funded bilateral CVA. Same estimator as [`bcva`]; callers pass asset-swap default paths.
pub fn fbcva(
    exposure: &ExposureMatrix,
    defaults: &[DefaultScenario],
    curve: &DiscountCurve,
    lgd_a: f64,
) -> Result<AdjustmentResult> {
    loss_adjustment(AdjustmentKind::Fbcva, exposure, defaults, curve, lgd_a, LoanMode::Bilateral)
}

/// Funded bilateral DVA: the expected loss on the loan B takes to fund the collateral it posts to A.
pub fn fbdva(
    exposure: &ExposureMatrix,
    defaults: &[DefaultScenario],
    curve: &DiscountCurve,
    lgd_b: f64,
) -> Result<AdjustmentResult> {
    loss_adjustment(AdjustmentKind::Fbdva, exposure, defaults, curve, lgd_b, LoanMode::Bilateral)
}

/// `credit − debit` on the same paths. The value is the difference of the two point
/// estimates; the standard error comes from per-path paired differences.
pub fn bva(credit: &AdjustmentResult, debit: &AdjustmentResult) -> Result<AdjustmentResult> {
    let kind = match (credit.kind, debit.kind) {
        (AdjustmentKind::Bcva, AdjustmentKind::Bdva) => AdjustmentKind::Bva,
        (AdjustmentKind::Fbcva, AdjustmentKind::Fbdva) => AdjustmentKind::Fbva,
        (c, d) => {
            return Err(Error::Contract(format!(
                "cannot net {} against {}",
                c.label(),
                d.label()
            )))
        }
    };
    let diff = paired_difference(credit, debit)?;
    Ok(AdjustmentResult {
        kind,
        value: credit.value - debit.value,
        std_error: diff.1,
        n_paths: credit.n_paths,
        samples: diff.0,
    })
}

/// Funded BVA, `FBCVA − FBDVA`.
pub fn fbva(credit: &AdjustmentResult, debit: &AdjustmentResult) -> Result<AdjustmentResult> {
    bva(credit, debit)
}

/// Per-path differences `x − y` and their standard error.
pub fn paired_difference(x: &AdjustmentResult, y: &AdjustmentResult) -> Result<(Vec<f64>, f64)> {
    if x.samples.len() != y.samples.len() || x.samples.is_empty() {
        return Err(Error::Contract(format!(
            "{} and {} are not on the same path set ({} vs {} samples)",
            x.kind.label(),
            y.kind.label(),
            x.samples.len(),
            y.samples.len()
        )));
    }
    let diff: Vec<f64> = x.samples.iter().zip(&y.samples).map(|(a, b)| a - b).collect();
    let (_, se) = mean_and_std_error(&diff);
    Ok((diff, se))
}

/// `Σ_k θ_k·1{survival at t_{k−1}}·D(t_0,t_{k−1})·V⁺(t_{k−1})`, with the borrower's lender
/// exposure `V⁺` (`V⁺_B` when A borrows) and spread payments made in advance.
pub fn funding_annuity(
    exposure: &ExposureMatrix,
    defaults: &[DefaultScenario],
    curve: &DiscountCurve,
    borrower: Side,
    mode: LoanMode,
) -> Result<AnnuityResult> {
    check_paths(exposure, defaults)?;
    let grid = exposure.grid();
    let discounts = curve.grid_discounts(grid);
    let samples: Vec<f64> = defaults
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let row = exposure.row(i);
            let (own, other) = match borrower {
                Side::A => (s.tau_a, s.tau_b),
                Side::B => (s.tau_b, s.tau_a),
            };
            let mut acc = 0.0;
            for k in 1..=grid.periods() {
                let start = grid.date(k - 1);
                let alive = own > start && (mode == LoanMode::Unilateral || other > start);
                if !alive {
                    break;
                }
                let v = match borrower {
                    Side::A => row[k - 1].max(0.0),
                    Side::B => (-row[k - 1]).max(0.0),
                };
                acc += grid.accrual(k) * discounts[k - 1] * v;
            }
            acc
        })
        .collect();
    let (value, std_error) = mean_and_std_error(&samples);
    Ok(AnnuityResult {
        borrower,
        mode,
        value,
        std_error,
        samples,
    })
}

/// Spread that makes the funding leg worth the funded adjustment.
pub fn fair_spread(adjustment: &AdjustmentResult, annuity: &AnnuityResult) -> Result<FairSpreadResult> {
    let party = adjustment.kind.borrower().ok_or_else(|| {
        Error::Contract(format!("{} has no single borrower", adjustment.kind.label()))
    })?;
    if party != annuity.borrower {
        return Err(Error::Contract(format!(
            "{} is priced for party {party:?} but the annuity is for {:?}",
            adjustment.kind.label(),
            annuity.borrower
        )));
    }
    if annuity.value == 0.0 {
        if adjustment.value == 0.0 {
            return Ok(FairSpreadResult {
                party,
                spread: 0.0,
                std_error: 0.0,
                annuity: 0.0,
            });
        }
        return Err(Error::InfeasibleSpread {
            adjustment: adjustment.value,
        });
    }
    let spread = adjustment.value / annuity.value;
    let std_error = if adjustment.samples.len() == annuity.samples.len() && !annuity.samples.is_empty() {
        let residuals: Vec<f64> = adjustment
            .samples
            .iter()
            .zip(&annuity.samples)
            .map(|(a, b)| a - spread * b)
            .collect();
        mean_and_std_error(&residuals).1 / annuity.value.abs()
    } else {
        adjustment.std_error / annuity.value.abs()
    };
    Ok(FairSpreadResult {
        party,
        spread,
        std_error,
        annuity: annuity.value,
    })
}
