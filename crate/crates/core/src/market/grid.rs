use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Margining and default-observation dates `t_0 = 0 < t_1 < ... < t_M`, in year fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TimeGrid {
    dates: Vec<f64>,
    accruals: Vec<f64>,
}

impl TimeGrid {
    pub fn new(dates: Vec<f64>) -> Result<Self> {
        if dates.len() < 2 {
            return Err(Error::config("grid", "at least two dates (t_0 and t_M) are required"));
        }
        if dates.iter().any(|t| !t.is_finite()) {
            return Err(Error::config("grid", "dates must be finite"));
        }
        if dates[0] != 0.0 {
            return Err(Error::config(
                "grid",
                format!("valuation date t_0 must be 0, got {}", dates[0]),
            ));
        }
        if let Some(w) = dates.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::config(
                "grid",
                format!("dates must be strictly increasing ({} followed by {})", w[0], w[1]),
            ));
        }
        let accruals = dates.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Self { dates, accruals })
    }

    /// Equally spaced grid from 0 to `end`. A final short stub is added when `step` does not divide `end`.
    pub fn uniform(end: f64, step: f64) -> Result<Self> {
        if !(end > 0.0) {
            return Err(Error::config("grid", format!("t_M must exceed t_0 = 0, got {end}")));
        }
        if !(step > 0.0) {
            return Err(Error::config("grid", format!("step must be positive, got {step}")));
        }
        let n = (end / step - 1e-9).ceil().max(1.0) as usize;
        let mut dates: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
        dates.push(end);
        Self::new(dates)
    }

    pub fn dates(&self) -> &[f64] {
        &self.dates
    }

    /// Accrual fractions `θ_k`, indexed `0..M` for periods `1..=M`.
    pub fn accruals(&self) -> &[f64] {
        &self.accruals
    }

    /// Number of periods `M`.
    pub fn periods(&self) -> usize {
        self.accruals.len()
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn date(&self, i: usize) -> f64 {
        self.dates[i]
    }

    /// `θ_k = t_k − t_{k−1}` for `1 ≤ k ≤ M`.
    pub fn accrual(&self, k: usize) -> f64 {
        self.accruals[k - 1]
    }

    pub fn horizon(&self) -> f64 {
        *self.dates.last().expect("grid has at least two dates")
    }

    /// Period `k` with `t_{k−1} < t ≤ t_k`, or `None` when `t` is outside `(t_0, t_M]`.
    pub fn period_of(&self, t: f64) -> Option<usize> {
        if !(t > self.dates[0]) || t > self.horizon() {
            return None;
        }
        Some(self.dates.partition_point(|&d| d < t))
    }
}

impl TryFrom<Vec<f64>> for TimeGrid {
    type Error = Error;

    fn try_from(dates: Vec<f64>) -> Result<Self> {
        Self::new(dates)
    }
}

impl From<TimeGrid> for Vec<f64> {
    fn from(grid: TimeGrid) -> Self {
        grid.dates
    }
}
