//! Deterministic reference values for adjustments on path-independent exposure, built from
//! the quadrature first-to-default probabilities rather than from simulated paths.

use crate::error::{Error, Result};
use crate::market::{
    default_partition_probability, CreditParty, DefaultOrder, DiscountCurve, HazardSource, TimeGrid,
};
use crate::xva::AdjustmentKind;

#[allow(clippy::too_many_arguments)]
/// Expected value of `kind` for a deterministic profile `v0_b` (B's risk-free value on the grid).
pub fn deterministic_adjustment(
    kind: AdjustmentKind,
    v0_b: &[f64],
    grid: &TimeGrid,
    curve: &DiscountCurve,
    party_a: &CreditParty,
    party_b: &CreditParty,
    source: HazardSource,
    rho: f64,
) -> Result<f64> {
    if v0_b.len() != grid.len() {
        return Err(Error::Contract(format!(
            "profile has {} values, grid has {} dates",
            v0_b.len(),
            grid.len()
        )));
    }
    let mut total = 0.0;
    for k in 1..=grid.periods() {
        let df = curve.df(grid.date(k - 1));
        let v = v0_b[k - 1];
        let term = match kind {
            AdjustmentKind::Bcva | AdjustmentKind::Fbcva => {
                let p = default_partition_probability(party_a, party_b, source, rho, grid, k, DefaultOrder::AFirst)?;
                party_a.lgd() * p * v.max(0.0)
            }
            AdjustmentKind::Bdva | AdjustmentKind::Fbdva => {
                let p = default_partition_probability(party_a, party_b, source, rho, grid, k, DefaultOrder::BFirst)?;
                party_b.lgd() * p * (-v).max(0.0)
            }
            AdjustmentKind::Fcva => {
                let h = party_a.hazard(source);
                let p = h.survival(grid.date(k - 1)) - h.survival(grid.date(k));
                party_a.lgd() * p * v.max(0.0)
            }
            AdjustmentKind::Bva | AdjustmentKind::Fbva => {
                let (credit, debit) = if kind == AdjustmentKind::Bva {
                    (AdjustmentKind::Bcva, AdjustmentKind::Bdva)
                } else {
                    (AdjustmentKind::Fbcva, AdjustmentKind::Fbdva)
                };
                return Ok(
                    deterministic_adjustment(credit, v0_b, grid, curve, party_a, party_b, source, rho)?
                        - deterministic_adjustment(debit, v0_b, grid, curve, party_a, party_b, source, rho)?,
                );
            }
        };
        total += df * term;
    }
    Ok(total)
}
