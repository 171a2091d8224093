use serde::{Deserialize, Serialize};

use super::hazard::HazardCurve;
use crate::error::{Error, Result};

/// Which quoted spread a hazard curve was calibrated to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HazardSource {
    /// Credit default swap spreads; drives the unfunded adjustments.
    Cds,
    /// Asset swap spreads; drives the funded adjustments.
    Asw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreditParty {
    pub name: String,
    recovery: f64,
    hazard_cds: HazardCurve,
    hazard_asw: HazardCurve,
}

impl CreditParty {
    pub fn new(
        name: impl Into<String>,
        recovery: f64,
        hazard_cds: HazardCurve,
        hazard_asw: HazardCurve,
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&recovery) {
            return Err(Error::Domain(format!("recovery must lie in [0, 1), got {recovery}")));
        }
        Ok(Self {
            name: name.into(),
            recovery,
            hazard_cds,
            hazard_asw,
        })
    }

    /// Party calibrated from flat CDS and asset-swap spreads via the credit triangle.
    pub fn from_spreads(
        name: impl Into<String>,
        recovery: f64,
        cds_spread: f64,
        asw_spread: f64,
    ) -> Result<Self> {
        let cds = HazardCurve::from_spread(cds_spread, recovery)?;
        let asw = HazardCurve::from_spread(asw_spread, recovery)?;
        Self::new(name, recovery, cds, asw)
    }

    /// Same flat intensity for both spread sources.
    pub fn flat(name: impl Into<String>, recovery: f64, intensity: f64) -> Result<Self> {
        let h = HazardCurve::flat(intensity)?;
        Self::new(name, recovery, h.clone(), h)
    }

    pub fn recovery(&self) -> f64 {
        self.recovery
    }

    pub fn lgd(&self) -> f64 {
        1.0 - self.recovery
    }

    pub fn hazard(&self, source: HazardSource) -> &HazardCurve {
        match source {
            HazardSource::Cds => &self.hazard_cds,
            HazardSource::Asw => &self.hazard_asw,
        }
    }
}
