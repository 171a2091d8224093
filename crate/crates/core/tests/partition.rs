use fbva_core::market::{
    default_partition_probability, joint_survival_probability, CreditParty, DefaultOrder,
    HazardCurve, HazardSource, TimeGrid,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const SRC: HazardSource = HazardSource::Cds;

fn flat(l: f64) -> CreditParty {
    CreditParty::flat("X", 0.4, l).unwrap()
}

fn stepped(l0: f64, l1: f64) -> CreditParty {
    let h = HazardCurve::new(vec![(0.0, l0), (1.5, l1)]).unwrap();
    CreditParty::new("S", 0.4, h.clone(), h).unwrap()
}

/// Abramowitz–Stegun 7.1.26 (|error| < 1.5e-7), far below Monte Carlo noise here.
fn phi_approx(x: f64) -> f64 {
    let z = x.abs() / std::f64::consts::SQRT_2;
    let t = 1.0 / (1.0 + 0.327_591_1 * z);
    let poly = t * (0.254_829_592 + t * (-0.284_496_736 + t * (1.421_413_741 + t * (-1.453_152_027 + t * 1.061_405_429))));
    let erfc = poly * (-z * z).exp();
    if x >= 0.0 {
        1.0 - 0.5 * erfc
    } else {
        0.5 * erfc
    }
}

/// Brute-force 2-D Monte Carlo over the copula for flat hazards.
fn mc_a_first(la: f64, lb: f64, rho: f64, lo: f64, hi: f64, n: usize, seed: u64) -> (f64, f64) {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..n {
        // Box–Muller
        let u1: f64 = 1.0 - rng.random::<f64>();
        let u2: f64 = rng.random();
        let r = (-2.0 * u1.ln()).sqrt();
        let (z1, z2) = (r * (std::f64::consts::TAU * u2).cos(), r * (std::f64::consts::TAU * u2).sin());
        let za = z1;
        let zb = rho * z1 + (1.0 - rho * rho).sqrt() * z2;
        let ta = -phi_approx(za).ln() / la;
        let tb = if lb > 0.0 { -phi_approx(zb).ln() / lb } else { f64::INFINITY };
        if ta > lo && ta <= hi && ta <= tb {
            hits += 1;
        }
    }
    let p = hits as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

#[test]
fn a_first_matches_brute_force_monte_carlo() {
    let grid = TimeGrid::new(vec![0.0, 1.0, 3.0]).unwrap();
    for (rho, k, seed) in [(-0.5, 1, 1u64), (0.5, 1, 2), (0.5, 2, 3), (0.0, 2, 4)] {
        let quad = default_partition_probability(&flat(0.05), &flat(0.08), SRC, rho, &grid, k, DefaultOrder::AFirst).unwrap();
        let (p, se) = mc_a_first(0.05, 0.08, rho, grid.date(k - 1), grid.date(k), 2_000_000, seed);
        assert!((quad - p).abs() < 3.0 * se, "rho={rho} k={k}: quadrature {quad} vs mc {p} ± {se}");
    }
}

#[test]
fn partitions_are_complete() {
    let grid = TimeGrid::new(vec![0.0, 0.5, 1.0, 2.0, 3.5, 5.0]).unwrap();
    let pairs = [
        (flat(0.05), flat(0.05)),
        (flat(0.01), flat(0.10)),
        (stepped(0.02, 0.09), flat(0.04)),
        (flat(0.0), stepped(0.03, 0.0)),
    ];
    for (a, b) in &pairs {
        for rho in [-0.5, 0.0, 0.5, 0.9] {
            let mut total = 0.0;
            for k in 1..=grid.periods() {
                let pa = default_partition_probability(a, b, SRC, rho, &grid, k, DefaultOrder::AFirst).unwrap();
                let pb = default_partition_probability(a, b, SRC, rho, &grid, k, DefaultOrder::BFirst).unwrap();
                let before = joint_survival_probability(a, b, SRC, rho, grid.date(k - 1)).unwrap();
                let after = joint_survival_probability(a, b, SRC, rho, grid.date(k)).unwrap();
                assert!((pa + pb - (before - after)).abs() < 1e-9, "rho={rho} k={k}");
                total += pa + pb;
            }
            let survive = joint_survival_probability(a, b, SRC, rho, grid.horizon()).unwrap();
            assert!((total + survive - 1.0).abs() < 1e-9, "rho={rho}: {}", total + survive);
        }
    }
}

#[test]
fn swapping_parties_swaps_orders_exactly() {
    let grid = TimeGrid::new(vec![0.0, 1.0, 2.0]).unwrap();
    let (a, b) = (stepped(0.02, 0.07), flat(0.05));
    for rho in [-0.3, 0.0, 0.6] {
        for k in 1..=2 {
            let ab = default_partition_probability(&a, &b, SRC, rho, &grid, k, DefaultOrder::AFirst).unwrap();
            let ba = default_partition_probability(&b, &a, SRC, rho, &grid, k, DefaultOrder::BFirst).unwrap();
            assert_eq!(ab, ba);
        }
    }
}

#[test]
fn a_first_is_monotone_in_own_hazard() {
    let grid = TimeGrid::new(vec![0.0, 1.0, 2.0, 5.0]).unwrap();
    for rho in [-0.5, 0.0, 0.5] {
        for k in 1..=grid.periods() {
            let probs: Vec<f64> = [0.01, 0.03, 0.05, 0.08, 0.10]
                .iter()
                .map(|&l| default_partition_probability(&flat(l), &flat(0.05), SRC, rho, &grid, k, DefaultOrder::AFirst).unwrap())
                .collect();
            assert!(probs.windows(2).all(|w| w[1] >= w[0]), "rho={rho} k={k}: {probs:?}");
        }
    }
}
