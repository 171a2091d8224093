//! Risk-free values `V⁰_B(t_k)` of the traded product on every path and grid date.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{DiscountCurve, TimeGrid};
use crate::rng::{path_rng, StreamDomain};

/// One of the two counterparties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

/// Product valued from B's side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Product {
    /// Values given directly on each grid date, identical on all paths.
    DeterministicProfile { values: Vec<f64> },
    /// A single payment of `notional` to B at `maturity`.
    BulletLoan { notional: f64, maturity: f64 },
    /// B is long a forward on a lognormal asset struck at `strike`, settling at `maturity`.
    GbmForward {
        spot: f64,
        strike: f64,
        volatility: f64,
        maturity: f64,
    },
}

impl Product {
    /// True when every path carries the same exposure row.
    pub fn is_deterministic(&self) -> bool {
        match self {
            Product::DeterministicProfile { .. } | Product::BulletLoan { .. } => true,
            Product::GbmForward { volatility, .. } => *volatility == 0.0,
        }
    }

    pub fn validate(&self, grid: &TimeGrid) -> Result<()> {
        match self {
            Product::DeterministicProfile { values } => {
                if values.len() != grid.len() {
                    return Err(Error::config(
                        "product.values",
                        format!(
                            "profile has {} values but the grid has {} dates",
                            values.len(),
                            grid.len()
                        ),
                    ));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::config("product.values", "values must be finite"));
                }
            }
            Product::BulletLoan { notional, maturity } => {
                if !notional.is_finite() {
                    return Err(Error::config("product.notional", "must be finite"));
                }
                if !(*maturity > 0.0) || !maturity.is_finite() {
                    return Err(Error::config("product.maturity", "must be positive"));
                }
            }
            Product::GbmForward {
                spot,
                strike,
                volatility,
                maturity,
            } => {
                if !(*spot > 0.0) || !spot.is_finite() {
                    return Err(Error::config("product.spot", "must be positive"));
                }
                if !strike.is_finite() {
                    return Err(Error::config("product.strike", "must be finite"));
                }
                if !(*volatility >= 0.0) || !volatility.is_finite() {
                    return Err(Error::config("product.volatility", "must be nonnegative"));
                }
                if *maturity != grid.horizon() {
                    return Err(Error::config(
                        "product.maturity",
                        format!(
                            "forward maturity {maturity} must equal the last grid date {}",
                            grid.horizon()
                        ),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// `V⁰_B(t_k)` per path (rows) and grid date (columns). A's value is the negation.
#[derive(Debug, Clone, PartialEq)]
pub struct ExposureMatrix {
    grid: TimeGrid,
    n_paths: usize,
    values: Vec<f64>,
}

impl ExposureMatrix {
    /// Build from explicit rows, one per path.
    pub fn from_rows(grid: TimeGrid, rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = grid.len();
        if rows.is_empty() {
            return Err(Error::Contract("exposure needs at least one path".into()));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != width) {
            return Err(Error::Contract(format!(
                "row {i} has {} values, grid has {width} dates",
                rows[i].len()
            )));
        }
        let n_paths = rows.len();
        Ok(Self {
            grid,
            n_paths,
            values: rows.into_iter().flatten().collect(),
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    /// `V⁰_B` on every grid date of path `path`.
    pub fn row(&self, path: usize) -> &[f64] {
        let w = self.grid.len();
        &self.values[path * w..(path + 1) * w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.grid.len())
    }

    /// The same paths seen from A: `V⁰_A = −V⁰_B`.
    pub fn negated(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            n_paths: self.n_paths,
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

/// `[V⁰_side]⁺` on every path and grid date.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveExposure {
    side: Side,
    width: usize,
    values: Vec<f64>,
}

impl PositiveExposure {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn n_paths(&self) -> usize {
        self.values.len() / self.width
    }

    pub fn row(&self, path: usize) -> &[f64] {
        &self.values[path * self.width..(path + 1) * self.width]
    }
}

/// Elementwise positive part of B's value (`side = B`) or of A's value `−V⁰_B` (`side = A`).
pub fn positive_part_view(matrix: &ExposureMatrix, side: Side) -> PositiveExposure {
    let values = match side {
        Side::B => matrix.values.iter().map(|&v| v.max(0.0)).collect(),
        Side::A => matrix.values.iter().map(|&v| (-v).max(0.0)).collect(),
    };
    PositiveExposure {
        side,
        width: matrix.grid.len(),
        values,
    }
}

/// Generate `V⁰_B(t_k)` on every path.
///
/// The forward's underlying grows at the curve's forward rate, so discounted values are
/// martingales. Paths are seeded independently of the default-time stream.
pub fn simulate_exposure(
    product: &Product,
    curve: &DiscountCurve,
    grid: &TimeGrid,
    n_paths: usize,
    seed: u64,
) -> Result<ExposureMatrix> {
    product.validate(grid)?;
    if n_paths == 0 {
        return Err(Error::Domain("n_paths must be at least 1".into()));
    }
    let width = grid.len();
    let dfs = curve.grid_discounts(grid);
    let values = match product {
        Product::DeterministicProfile { values } => values.repeat(n_paths),
        Product::BulletLoan { notional, maturity } => {
            let df_t = curve.df(*maturity);
            let row: Vec<f64> = grid
                .dates()
                .iter()
                .zip(&dfs)
                .map(|(&t, &d)| if t <= *maturity { notional * (df_t / d) } else { 0.0 })
                .collect();
            row.repeat(n_paths)
        }
        Product::GbmForward {
            spot,
            strike,
            volatility,
            maturity,
        } => {
            let df_t = curve.df(*maturity);
            let sigma = *volatility;
            let rows: Vec<Vec<f64>> = (0..n_paths as u64)
                .into_par_iter()
                .map(|path_id| {
                    let mut rng = path_rng(seed, StreamDomain::Exposure, path_id);
                    let mut w = 0.0;
                    let mut row = Vec::with_capacity(width);
                    for (i, &df) in dfs.iter().enumerate() {
                        let t = grid.date(i);
                        if i > 0 {
                            let z: f64 = StandardNormal.sample(&mut rng);
                            w += grid.accrual(i).sqrt() * z;
                        }
                        let growth = if sigma == 0.0 {
                            1.0
                        } else {
                            (sigma * w - 0.5 * sigma * sigma * t).exp()
                        };
                        let s = spot / df * growth;
                        row.push(s - strike * (df_t / df));
                    }
                    row
                })
                .collect();
            rows.into_iter().flatten().collect()
        }
    };
    Ok(ExposureMatrix {
        grid: grid.clone(),
        n_paths,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> TimeGrid {
        TimeGrid::new(vec![0.0, 0.5, 1.0]).unwrap()
    }

    #[test]
    fn bullet_loan_values() {
        let bullet = Product::BulletLoan {
            notional: 100.0,
            maturity: 1.0,
        };
        let m = simulate_exposure(&bullet, &DiscountCurve::flat(0.0), &grid(), 3, 1).unwrap();
        assert!(m.rows().all(|r| r == [100.0, 100.0, 100.0]));
        let m = simulate_exposure(&bullet, &DiscountCurve::flat(0.02), &grid(), 3, 1).unwrap();
        assert!((m.row(2)[1] - 99.0050).abs() < 5e-5);
        assert!((m.row(2)[1] - 100.0 * (-0.01f64).exp()).abs() < 1e-12);
        assert_eq!(m.row(0), m.row(2));
    }

    #[test]
    fn zero_vol_forward_is_deterministic() {
        let c = DiscountCurve::new(vec![(0.0, 0.01), (1.0, 0.03)]).unwrap();
        let fwd = Product::GbmForward {
            spot: 100.0,
            strike: 95.0,
            volatility: 0.0,
            maturity: 1.0,
        };
        let m = simulate_exposure(&fwd, &c, &grid(), 4, 9).unwrap();
        for row in m.rows() {
            for (i, &v) in row.iter().enumerate() {
                let t = grid().date(i);
                let expected = 100.0 / c.df(t) - 95.0 * c.discount_factor(t, 1.0).unwrap();
                assert!((v - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn profile_length_is_checked() {
        let p = Product::DeterministicProfile {
            values: vec![1.0, 2.0],
        };
        match simulate_exposure(&p, &DiscountCurve::flat(0.0), &grid(), 1, 0) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "product.values"),
            other => panic!("{other:?}"),
        }
        let fwd = Product::GbmForward {
            spot: 1.0,
            strike: 1.0,
            volatility: 0.2,
            maturity: 2.0,
        };
        assert!(simulate_exposure(&fwd, &DiscountCurve::flat(0.0), &grid(), 1, 0).is_err());
    }

    #[test]
    fn positive_part_examples() {
        let g = TimeGrid::new(vec![0.0, 1.0]).unwrap();
        let m = ExposureMatrix::from_rows(g.clone(), vec![vec![-5.0, 3.0]]).unwrap();
        assert_eq!(positive_part_view(&m, Side::B).row(0), &[0.0, 3.0]);
        assert_eq!(positive_part_view(&m, Side::A).row(0), &[5.0, 0.0]);
        let pos = ExposureMatrix::from_rows(g, vec![vec![1.0, 2.0]]).unwrap();
        assert_eq!(positive_part_view(&pos, Side::B).row(0), &[1.0, 2.0]);
        assert_eq!(positive_part_view(&pos, Side::A).row(0), &[0.0, 0.0]);
    }

    #[test]
    fn forward_martingale() {
        let g = TimeGrid::uniform(2.0, 0.25).unwrap();
        let c = DiscountCurve::flat(0.03);
        let fwd = Product::GbmForward {
            spot: 100.0,
            strike: 100.0,
            volatility: 0.25,
            maturity: 2.0,
        };
        let n = 20_000;
        let m = simulate_exposure(&fwd, &c, &g, n, 5).unwrap();
        let v0 = m.row(0)[0];
        for k in 1..g.len() {
            let d = c.df(g.date(k));
            let xs: Vec<f64> = m.rows().map(|r| d * r[k]).collect();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let se = (var / n as f64).sqrt();
            assert!((mean - v0).abs() < 3.0 * se, "k={k}: {mean} vs {v0} (se {se})");
        }
    }

    proptest! {
        #[test]
        fn positive_negative_decomposition(rows in proptest::collection::vec(proptest::collection::vec(-100.0f64..100.0, 3), 1..8)) {
            let m = ExposureMatrix::from_rows(grid(), rows).unwrap();
            let b = positive_part_view(&m, Side::B);
            let a = positive_part_view(&m, Side::A);
            for p in 0..m.n_paths() {
                for i in 0..3 {
                    prop_assert!(b.row(p)[i] >= 0.0 && a.row(p)[i] >= 0.0);
                    prop_assert_eq!(b.row(p)[i] - a.row(p)[i], m.row(p)[i]);
                }
            }
        }
    }
}
