use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default time used for "no default within any horizon". Finite so that it survives
/// serialization, and larger than every grid date.
pub const NO_DEFAULT: f64 = f64::MAX;

/// Piecewise-constant default intensity. Segment `i` starts at `starts[i]` and runs to the next
/// start; the last segment extends indefinitely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct HazardCurve {
    starts: Vec<f64>,
    intensities: Vec<f64>,
    /// Cumulative hazard at each segment start.
    cumulative: Vec<f64>,
}

impl HazardCurve {
    /// `pillars` are `(segment start, intensity)`; the first start must be 0.
    pub fn new(pillars: Vec<(f64, f64)>) -> Result<Self> {
        if pillars.is_empty() || pillars[0].0 != 0.0 {
            return Err(Error::Domain(
                "hazard curve needs a first segment starting at 0".into(),
            ));
        }
        if pillars.iter().any(|&(t, l)| !t.is_finite() || !l.is_finite() || l < 0.0) {
            return Err(Error::Domain(
                "hazard intensities must be finite and nonnegative".into(),
            ));
        }
        if pillars.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Domain(
                "hazard segment starts must be strictly increasing".into(),
            ));
        }
        let (starts, intensities): (Vec<f64>, Vec<f64>) = pillars.into_iter().unzip();
        let mut cumulative = Vec::with_capacity(starts.len());
        let mut acc = 0.0;
        for i in 0..starts.len() {
            cumulative.push(acc);
            if i + 1 < starts.len() {
                acc += intensities[i] * (starts[i + 1] - starts[i]);
            }
        }
        Ok(Self {
            starts,
            intensities,
            cumulative,
        })
    }

    pub fn flat(intensity: f64) -> Result<Self> {
        Self::new(vec![(0.0, intensity)])
    }

    /// Flat intensity implied by a running credit spread under the credit-triangle
    /// approximation `λ = s / (1 − R)`.
    pub fn from_spread(spread: f64, recovery: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&recovery) {
            return Err(Error::Domain(format!("recovery must lie in [0, 1), got {recovery}")));
        }
        if !(spread >= 0.0) || !spread.is_finite() {
            return Err(Error::Domain(format!("spread must be nonnegative, got {spread}")));
        }
        Self::flat(spread / (1.0 - recovery))
    }

    pub fn pillars(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.starts.iter().copied().zip(self.intensities.iter().copied())
    }

    /// Segment start times, for splitting integrals at intensity jumps.
    pub fn breakpoints(&self) -> &[f64] {
        &self.starts
    }

    fn segment(&self, t: f64) -> usize {
        self.starts.partition_point(|&s| s <= t).saturating_sub(1)
    }

    pub fn intensity(&self, t: f64) -> f64 {
        self.intensities[self.segment(t)]
    }

    pub fn is_zero(&self) -> bool {
        self.intensities.iter().all(|&l| l == 0.0)
    }

    /// `∫_0^t λ(s) ds`.
    pub fn cumulative_hazard(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let i = self.segment(t);
        let h = self.cumulative[i] + self.intensities[i] * (t - self.starts[i]);
        if h.is_nan() {
            // 0 · ∞ past the last pillar with zero intensity
            self.cumulative[i]
        } else {
            h
        }
    }

    pub fn survival(&self, t: f64) -> f64 {
        (-self.cumulative_hazard(t)).exp()
    }

    /// `1 − S(t)`, accurate for small hazards.
    pub fn default_probability(&self, t: f64) -> f64 {
        -(-self.cumulative_hazard(t)).exp_m1()
    }

    /// Smallest `t` with `H(t) = level`, or [`NO_DEFAULT`] when the cumulative hazard never gets there.
    pub fn invert_cumulative(&self, level: f64) -> f64 {
        if !level.is_finite() {
            return NO_DEFAULT;
        }
        let n = self.starts.len();
        // first segment whose end cumulative hazard reaches `level`
        for i in 0..n {
            let lambda = self.intensities[i];
            let reached = if i + 1 < n {
                self.cumulative[i + 1] >= level
            } else {
                lambda > 0.0
            };
            if reached && lambda > 0.0 {
                let t = self.starts[i] + (level - self.cumulative[i]) / lambda;
                return t.max(f64::MIN_POSITIVE);
            }
        }
        NO_DEFAULT
    }
}

impl TryFrom<Vec<(f64, f64)>> for HazardCurve {
    type Error = Error;

    fn try_from(p: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(p)
    }
}

impl From<HazardCurve> for Vec<(f64, f64)> {
    fn from(c: HazardCurve) -> Self {
        c.starts.into_iter().zip(c.intensities).collect()
    }
}
