use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exposure::Product;
use crate::market::{CreditParty, DiscountCurve, TimeGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dates: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flat_rate: Option<f64>,
    /// `[time, continuously compounded zero rate]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pillars: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartySpec {
    pub name: String,
    pub recovery: f64,
    /// Flat CDS spread, per annum.
    pub cds_spread: f64,
    /// Flat asset swap spread, per annum.
    pub asw_spread: f64,
}

/// On-disk scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub grid: GridSpec,
    pub discount_curve: CurveSpec,
    pub party_a: PartySpec,
    pub party_b: PartySpec,
    #[serde(default)]
    pub copula_rho: f64,
    pub product: Product,
    pub n_paths: usize,
    pub seed: u64,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub grid: TimeGrid,
    pub curve: DiscountCurve,
    pub party_a: CreditParty,
    pub party_b: CreditParty,
    pub rho: f64,
    pub product: Product,
    pub n_paths: usize,
    pub seed: u64,
    pub spreads: [PartySpec; 2],
    pub warnings: Vec<String>,
}

impl GridSpec {
    fn build(&self) -> Result<TimeGrid> {
        if let Some(start) = self.start {
            if start != 0.0 {
                return Err(Error::config("grid", format!("start must be 0 (valuation date), got {start}")));
            }
        }
        match (&self.dates, self.end, self.step) {
            (Some(dates), None, None) => TimeGrid::new(dates.clone()),
            (None, Some(end), Some(step)) => {
                if !(end > self.start.unwrap_or(0.0)) {
                    return Err(Error::config("grid", format!("end (t_M = {end}) must exceed start (t_0 = 0)")));
                }
                TimeGrid::uniform(end, step)
            }
            _ => Err(Error::config(
                "grid",
                "give either `dates` or both `end` and `step`",
            )),
        }
    }
}

impl CurveSpec {
    fn build(&self) -> Result<DiscountCurve> {
        match (self.flat_rate, &self.pillars) {
            (Some(r), None) if r.is_finite() => Ok(DiscountCurve::flat(r)),
            (None, Some(p)) => DiscountCurve::new(p.clone()),
            _ => Err(Error::config(
                "discount_curve",
                "give exactly one of a finite `flat_rate` or `pillars`",
            )),
        }
    }
}

impl PartySpec {
    fn build(&self, field: &str, warnings: &mut Vec<String>) -> Result<CreditParty> {
        if !(0.0..1.0).contains(&self.recovery) {
            return Err(Error::config(
                format!("{field}.recovery"),
                format!("must lie in [0, 1), got {}", self.recovery),
            ));
        }
        for (name, value) in [("cds_spread", self.cds_spread), ("asw_spread", self.asw_spread)] {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::config(
                    format!("{field}.{name}"),
                    format!("spread must be finite and nonnegative, got {value}"),
                ));
            }
        }
        if self.cds_spread < self.asw_spread {
            warnings.push(format!(
                "negative basis for {} ({}): CDS spread {} below asset swap spread {}",
                self.name, field, self.cds_spread, self.asw_spread
            ));
        }
        CreditParty::from_spreads(self.name.clone(), self.recovery, self.cds_spread, self.asw_spread)
    }
}

impl ScenarioFile {
    pub fn validate(self) -> Result<Scenario> {
        let grid = self.grid.build()?;
        let curve = self.discount_curve.build()?;
        let mut warnings = Vec::new();
        let party_a = self.party_a.build("party_a", &mut warnings)?;
        let party_b = self.party_b.build("party_b", &mut warnings)?;
        if !(self.copula_rho > -1.0 && self.copula_rho < 1.0) {
            return Err(Error::config(
                "copula_rho",
                format!("must lie in (-1, 1), got {}", self.copula_rho),
            ));
        }
        self.product.validate(&grid)?;
        if self.n_paths == 0 {
            return Err(Error::config("n_paths", "must be at least 1"));
        }
        Ok(Scenario {
            grid,
            curve,
            party_a,
            party_b,
            rho: self.copula_rho,
            product: self.product,
            n_paths: self.n_paths,
            seed: self.seed,
            spreads: [self.party_a, self.party_b],
            warnings,
        })
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path.is_empty() || path == "." { "scenario".to_string() } else { path };
            Error::config(field, e.into_inner().to_string())
        })?;
        file.validate()
    }
}

/// Read and validate a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::config("scenario", format!("cannot read {}: {e}", path.display()))
    })?;
    text.parse()
}
