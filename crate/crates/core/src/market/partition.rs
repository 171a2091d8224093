//! Semi-analytic first-to-default probabilities under the Gaussian copula.
//!
//! Conditioning on `τ_A = t` leaves `z_B | z_A ~ N(ρ z_A, 1 − ρ²)`, so
//!
//! ```text
//! P(t_{k−1} < τ_A ≤ min(t_k, τ_B)) = ∫_{t_{k−1}}^{t_k} λ_A(t) S_A(t) Φ((Φ⁻¹(S_B(t)) − ρ Φ⁻¹(S_A(t))) / √(1 − ρ²)) dt
//! ```
//!
//! which is integrated numerically, split at every hazard breakpoint. Joint survival
//! `P(τ_A > t, τ_B > t)` is a bivariate normal orthant integrated on the latent scale instead,
//! which gives an independent route for the partition checks.

use serde::{Deserialize, Serialize};

use super::defaults::validate_rho;
use super::grid::TimeGrid;
use super::hazard::HazardCurve;
use super::normal;
use super::party::{CreditParty, HazardSource};
use super::quadrature::integrate;
use crate::error::{Error, Result};

pub const QUADRATURE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DefaultOrder {
    AFirst,
    BFirst,
}

/// Probability that `first` defaults in period `k` of `grid`, before the other party.
pub fn default_partition_probability(
    party_a: &CreditParty,
    party_b: &CreditParty,
    source: HazardSource,
    rho: f64,
    grid: &TimeGrid,
    k: usize,
    first: DefaultOrder,
) -> Result<f64> {
    validate_rho(rho)?;
    if k == 0 || k > grid.periods() {
        return Err(Error::Domain(format!(
            "period index {k} outside 1..={}",
            grid.periods()
        )));
    }
    let (ha, hb) = (party_a.hazard(source), party_b.hazard(source));
    let (lo, hi) = (grid.date(k - 1), grid.date(k));
    match first {
        DefaultOrder::AFirst => first_in_window(ha, hb, rho, lo, hi),
        DefaultOrder::BFirst => first_in_window(hb, ha, rho, lo, hi),
    }
}

/// `P(lo < τ_1 ≤ min(hi, τ_2))` for hazards `h1`, `h2`.
pub fn first_in_window(h1: &HazardCurve, h2: &HazardCurve, rho: f64, lo: f64, hi: f64) -> Result<f64> {
    if h1.is_zero() || hi <= lo {
        return Ok(0.0);
    }
    let sd = (1.0 - rho * rho).sqrt();
    let density = |t: f64| {
        let lambda = h1.intensity(t);
        if lambda == 0.0 {
            return 0.0;
        }
        let h1t = h1.cumulative_hazard(t);
        let zb = normal::inv_cdf_of_survival(h2.cumulative_hazard(t));
        let conditional = if zb == f64::INFINITY {
            1.0
        } else {
            let za = normal::inv_cdf_of_survival(h1t);
            normal::cdf((zb - rho * za) / sd)
        };
        lambda * (-h1t).exp() * conditional
    };

    let mut cuts: Vec<f64> = h1
        .breakpoints()
        .iter()
        .chain(h2.breakpoints())
        .copied()
        .filter(|&t| t > lo && t < hi)
        .collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let tol = QUADRATURE_TOLERANCE / (cuts.len() - 1) as f64;
    cuts.windows(2)
        .map(|w| integrate(density, w[0], w[1], tol))
        .sum()
}

/// `P(τ_A > t, τ_B > t)`.
pub fn joint_survival_probability(
    party_a: &CreditParty,
    party_b: &CreditParty,
    source: HazardSource,
    rho: f64,
    t: f64,
) -> Result<f64> {
    validate_rho(rho)?;
    let a = normal::inv_cdf_of_survival(party_a.hazard(source).cumulative_hazard(t));
    let b = normal::inv_cdf_of_survival(party_b.hazard(source).cumulative_hazard(t));
    bivariate_normal_cdf(a, b, rho)
}

/// `P(X ≤ a, Y ≤ b)` for standard normals with correlation `rho`, by quadrature of
/// `∫_{−∞}^{a} φ(x) Φ((b − ρx)/√(1−ρ²)) dx`.
pub fn bivariate_normal_cdf(a: f64, b: f64, rho: f64) -> Result<f64> {
    if a == f64::INFINITY {
        return Ok(normal::cdf(b));
    }
    if b == f64::INFINITY {
        return Ok(normal::cdf(a));
    }
    if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    // integrate over the smaller upper limit for a shorter effective range
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    const LOWER: f64 = -38.5;
    if a <= LOWER {
        return Ok(0.0);
    }
    let sd = (1.0 - rho * rho).sqrt();
    integrate(
        |x| normal::pdf(x) * normal::cdf((b - rho * x) / sd),
        LOWER,
        a,
        QUADRATURE_TOLERANCE * 1e-2,
    )
}
