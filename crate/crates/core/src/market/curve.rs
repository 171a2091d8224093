use serde::{Deserialize, Serialize};

use super::grid::TimeGrid;
use crate::error::{Error, Result};

/// Deterministic risk-free curve of continuously compounded zero rates.
///
/// Zero rates are interpolated linearly between pillars and held flat outside them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct DiscountCurve {
    times: Vec<f64>,
    rates: Vec<f64>,
}

impl DiscountCurve {
    pub fn new(pillars: Vec<(f64, f64)>) -> Result<Self> {
        if pillars.is_empty() {
            return Err(Error::config("discount_curve", "at least one pillar is required"));
        }
        if pillars.iter().any(|(t, r)| !t.is_finite() || !r.is_finite() || *t < 0.0) {
            return Err(Error::config(
                "discount_curve",
                "pillar times must be finite and nonnegative, rates finite",
            ));
        }
        if pillars.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::config(
                "discount_curve",
                "pillar times must be strictly increasing",
            ));
        }
        let (times, rates) = pillars.into_iter().unzip();
        Ok(Self { times, rates })
    }

    pub fn flat(rate: f64) -> Self {
        Self {
            times: vec![0.0],
            rates: vec![rate],
        }
    }

    pub fn pillars(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.rates.iter().copied())
    }

    pub fn zero_rate(&self, t: f64) -> f64 {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.rates[0];
        }
        if t >= self.times[n - 1] {
            return self.rates[n - 1];
        }
        let i = self.times.partition_point(|&x| x <= t);
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let w = (t - t0) / (t1 - t0);
        self.rates[i - 1] + w * (self.rates[i] - self.rates[i - 1])
    }

    /// `D(0, t)`.
    pub fn df(&self, t: f64) -> f64 {
        (-self.zero_rate(t) * t).exp()
    }

    /// `D(t1, t2) = D(0, t2) / D(0, t1)`.
    pub fn discount_factor(&self, t1: f64, t2: f64) -> Result<f64> {
        if !(t1 >= 0.0) || !(t2 >= t1) {
            return Err(Error::Domain(format!(
                "discount factor needs 0 <= t1 <= t2, got t1 = {t1}, t2 = {t2}"
            )));
        }
        if t1 == t2 {
            return Ok(1.0);
        }
        Ok(self.df(t2) / self.df(t1))
    }

    /// Discrete forward rate `ε_{k−1}` over `(t_{k−1}, t_k]`, defined so that
    /// `D(t_0,t_k)·(1 + θ_k·ε_{k−1}) = D(t_0,t_{k−1})`.
    pub fn forward_accrual_rate(&self, grid: &TimeGrid, k: usize) -> Result<f64> {
        if k == 0 || k > grid.periods() {
            return Err(Error::Domain(format!(
                "period index {k} outside 1..={}",
                grid.periods()
            )));
        }
        Ok(self.accrual_rate_unchecked(grid, k))
    }

    pub(crate) fn accrual_rate_unchecked(&self, grid: &TimeGrid, k: usize) -> f64 {
        let prev = self.df(grid.date(k - 1));
        let next = self.df(grid.date(k));
        (prev / next - 1.0) / grid.accrual(k)
    }

    /// `D(0, t_i)` for every grid date.
    pub fn grid_discounts(&self, grid: &TimeGrid) -> Vec<f64> {
        grid.dates().iter().map(|&t| self.df(t)).collect()
    }
}

impl TryFrom<Vec<(f64, f64)>> for DiscountCurve {
    type Error = Error;

    fn try_from(pillars: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(pillars)
    }
}

impl From<DiscountCurve> for Vec<(f64, f64)> {
    fn from(c: DiscountCurve) -> Self {
        c.times.into_iter().zip(c.rates).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn flat_curve_examples() {
        assert_eq!(DiscountCurve::flat(0.0).discount_factor(0.0, 1.0).unwrap(), 1.0);
        let c = DiscountCurve::flat(0.02);
        let d01 = c.discount_factor(0.0, 1.0).unwrap();
        assert!(close(d01, 0.980_198_7, 5e-8));
        assert!(close(d01, (-0.02f64).exp(), 1e-16));
        let d12 = c.discount_factor(1.0, 2.0).unwrap();
        let d02 = c.discount_factor(0.0, 2.0).unwrap();
        assert!(close(d02, 0.960_789_4, 5e-8));
        assert!(close(d02, d01 * d12, 1e-15));
    }

    #[test]
    fn reversed_dates_are_a_domain_error() {
        let c = DiscountCurve::flat(0.02);
        assert!(matches!(c.discount_factor(1.0, 0.5), Err(Error::Domain(_))));
        assert!(matches!(c.discount_factor(-1.0, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn linear_zero_interpolation() {
        let c = DiscountCurve::new(vec![(1.0, 0.01), (3.0, 0.03)]).unwrap();
        assert_eq!(c.zero_rate(0.5), 0.01);
        assert!(close(c.zero_rate(2.0), 0.02, 1e-16));
        assert_eq!(c.zero_rate(5.0), 0.03);
    }

    #[test]
    fn forward_accrual_examples() {
        let g = TimeGrid::new(vec![0.0, 1.0, 2.0]).unwrap();
        let zero = DiscountCurve::flat(0.0);
        assert_eq!(zero.forward_accrual_rate(&g, 1).unwrap(), 0.0);
        assert_eq!(zero.forward_accrual_rate(&g, 2).unwrap(), 0.0);
        let c = DiscountCurve::flat(0.02);
        let eps = c.forward_accrual_rate(&g, 1).unwrap();
        assert!(close(eps, 0.020_201_3, 5e-8));
        assert!(close(eps, 0.02f64.exp_m1(), 1e-15));
        assert!(c.forward_accrual_rate(&g, 0).is_err());
        assert!(c.forward_accrual_rate(&g, 3).is_err());
    }

    proptest! {
        #[test]
        fn multiplicative_and_bounded(
            r0 in 0.0f64..0.05, dr in 0.0f64..0.03,
            a in 0.0f64..5.0, b in 0.0f64..5.0, c in 0.0f64..5.0,
        ) {
            // nondecreasing zero rates keep every forward rate nonnegative
            let curve = DiscountCurve::new(vec![(0.5, r0), (4.0, r0 + dr)]).unwrap();
            let mut t = [a, b, c];
            t.sort_by(f64::total_cmp);
            let d02 = curve.discount_factor(t[0], t[2]).unwrap();
            let d01 = curve.discount_factor(t[0], t[1]).unwrap();
            let d12 = curve.discount_factor(t[1], t[2]).unwrap();
            prop_assert!(d02 > 0.0 && d02 <= 1.0);
            prop_assert!((d02 - d01 * d12).abs() <= 1e-14);
            prop_assert_eq!(curve.discount_factor(t[1], t[1]).unwrap(), 1.0);
        }

        #[test]
        fn telescoping_identity(rates in proptest::collection::vec(0.0f64..0.05, 1..6), step in 0.05f64..1.0) {
            let pillars: Vec<_> = rates.iter().enumerate().map(|(i, &r)| (i as f64 * 0.7, r)).collect();
            let curve = DiscountCurve::new(pillars).unwrap();
            let grid = TimeGrid::uniform(5.0, step).unwrap();
            for k in 1..=grid.periods() {
                let eps = curve.forward_accrual_rate(&grid, k).unwrap();
                let lhs = curve.df(grid.date(k)) * (1.0 + grid.accrual(k) * eps);
                prop_assert!((lhs - curve.df(grid.date(k - 1))).abs() <= 4.0 * f64::EPSILON);
            }
        }
    }
}
