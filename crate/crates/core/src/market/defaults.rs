use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::normal;
use super::party::{CreditParty, HazardSource};
use crate::error::{Error, Result};
use crate::rng::{path_rng, StreamDomain};

/// Joint default times of the two parties on one path. [`NO_DEFAULT`] marks survival forever.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefaultScenario {
    pub tau_a: f64,
    pub tau_b: f64,
    pub path_id: u64,
}


impl DefaultScenario {
    /// `τ = min(τ_A, τ_B)`.
    pub fn first_default_time(&self) -> f64 {
        self.tau_a.min(self.tau_b)
    }

    /// Ties are attributed to A.
    pub fn a_defaults_first(&self) -> bool {
        self.tau_a <= self.tau_b
    }

    /// The same path seen with the parties' roles exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            tau_a: self.tau_b,
            tau_b: self.tau_a,
            path_id: self.path_id,
        }
    }
}

/// Latent Gaussian-copula pair for one path. Shared across hazard sources for the same
/// `(seed, path_id)`, which makes CDS and asset-swap simulations common-random-number runs.
fn copula_normals(seed: u64, path_id: u64, rho: f64) -> (f64, f64) {
    let mut rng = path_rng(seed, StreamDomain::Defaults, path_id);
    let z1: f64 = StandardNormal.sample(&mut rng);
    let z2: f64 = StandardNormal.sample(&mut rng);
    (z1, rho * z1 + (1.0 - rho * rho).sqrt() * z2)
}

/// Draw `(τ_A, τ_B)` per path from a Gaussian copula over the two marginal hazard curves.
///
/// The copula uniform is read as the survival probability at default,
/// `u_X = Φ(z_X) = S_X(τ_X)`, so `τ_X = H_X⁻¹(−ln Φ(z_X))`.
pub fn simulate_default_times(
    party_a: &CreditParty,
    party_b: &CreditParty,
    source: HazardSource,
    rho: f64,
    n_paths: usize,
    seed: u64,
) -> Result<Vec<DefaultScenario>> {
    validate_rho(rho)?;
    if n_paths == 0 {
        return Err(Error::Domain("n_paths must be at least 1".into()));
    }
    let ha = party_a.hazard(source);
    let hb = party_b.hazard(source);
    Ok((0..n_paths as u64)
        .into_par_iter()
        .map(|path_id| {
            let (za, zb) = copula_normals(seed, path_id, rho);
            DefaultScenario {
                tau_a: ha.invert_cumulative(normal::neg_log_cdf(za)),
                tau_b: hb.invert_cumulative(normal::neg_log_cdf(zb)),
                path_id,
            }
        })
        .collect())
}

pub(crate) fn validate_rho(rho: f64) -> Result<()> {
    if !(rho > -1.0 && rho < 1.0) {
        return Err(Error::Domain(format!("copula correlation must lie in (-1, 1), got {rho}")));
    }
    Ok(())
}
