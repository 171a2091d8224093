//! Standard normal helpers with tail-accurate complements.

use libm::erfc;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

pub fn cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

pub fn pdf(x: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// `Φ⁻¹(p)`; returns ±∞ at the endpoints.
///
/// Acklam's rational approximation (relative error about 1e-9) followed by one Halley step
/// against `erfc`, which brings it to working precision.
pub fn inv_cdf(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let tail = |q: f64| {
        let r = (-2.0 * q.ln()).sqrt();
        (((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5])
            / ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0)
    };
    let x = if p < P_LOW {
        tail(p)
    } else if p > 1.0 - P_LOW {
        -tail(1.0 - p)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    // refine on whichever tail keeps the residual well conditioned
    let e = if x <= 0.0 { cdf(x) - p } else { (1.0 - p) - cdf(-x) };

    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// `−ln Φ(x)` without cancellation when `Φ(x)` is close to one.
pub fn neg_log_cdf(x: f64) -> f64 {
    if x > 0.0 {
        -(-cdf(-x)).ln_1p()
    } else {
        -cdf(x).ln()
    }
}

/// `Φ⁻¹(S)` where `S = exp(−h)` is a survival probability, computed from `1 − S` when `S` is near one.
pub fn inv_cdf_of_survival(h: f64) -> f64 {
    if h <= 0.0 {
        return f64::INFINITY;
    }
    let q = -(-h).exp_m1();
    if q < 0.5 {
        -inv_cdf(q)
    } else {
        inv_cdf((-h).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert!((cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((cdf(1.959_963_984_540_054) - 0.975).abs() < 1e-15);
        assert!((inv_cdf(0.975) - 1.959_963_984_540_054).abs() < 1e-14);
        assert!((inv_cdf(1e-10) + 6.361_340_902_404_056).abs() < 1e-12);
        assert!((inv_cdf(0.5)).abs() < 1e-16);
        assert!((cdf(-3.0) - 1.349_898_031_630_094e-3).abs() < 1e-18);
    }

    #[test]
    fn inverse_round_trip() {
        for i in 1..2000 {
            let p = i as f64 / 2000.0;
            let x = inv_cdf(p);
            assert!((cdf(x) - p).abs() <= 1e-14 * p.min(1.0 - p).max(1e-3), "p={p}");
        }
        for p in [1e-300, 1e-100, 1e-20, 1e-5] {
            let x = inv_cdf(p);
            assert!((cdf(x) / p - 1.0).abs() < 1e-13, "p={p}");
        }
    }

    #[test]
    fn log_cdf_tail() {
        let x = 9.0;
        // Φ(−9) ≈ 1.1286e-19, so −ln Φ(9) ≈ Φ(−9)
        assert!((neg_log_cdf(x) / cdf(-x) - 1.0).abs() < 1e-12);
        assert!((neg_log_cdf(-1.0) + cdf(-1.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn survival_quantile_matches_direct() {
        for h in [1e-12f64, 1e-6, 0.01, 0.5, 3.0] {
            let direct = inv_cdf((-h).exp());
            let stable = inv_cdf_of_survival(h);
            let tol = if h < 1e-6 { 1e-2 } else { 1e-9 };
            assert!((direct - stable).abs() < tol, "h={h}: {direct} vs {stable}");
        }
        assert_eq!(inv_cdf_of_survival(0.0), f64::INFINITY);
    }
}
