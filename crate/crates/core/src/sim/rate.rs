use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One `(δ, risk)` measurement of a rate study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub delta: f64,
    pub risk: f64,
}

impl RatePoint {
    pub fn new(delta: f64, risk: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) || !(risk > 0.0 && risk.is_finite()) {
            return Err(Error::Domain(format!("rate point needs positive values, got ({delta}, {risk})")));
        }
        Ok(Self { delta, risk })
    }
}

/// Least-squares slope of `ln risk` against `ln δ`.
pub fn rate_slope(points: &[RatePoint]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Domain("a slope needs at least two points".into()));
    }
    for p in points {
        RatePoint::new(p.delta, p.risk)?;
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.delta.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.risk.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("all δ values coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// `count` logarithmically spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(c: f64, p: f64, deltas: &[f64]) -> Vec<RatePoint> {
        deltas.iter().map(|&d| RatePoint::new(d, c * d.powf(p)).unwrap()).collect()
    }

    #[test]
    fn exact_power_laws() {
        let grid = log_grid(1e-4, 1e-2, 6);
        assert!((rate_slope(&line(3.0, 2.0, &grid)).unwrap() - 2.0).abs() < 1e-12);
        assert!((rate_slope(&line(0.2, 1.125, &grid)).unwrap() - 1.125).abs() < 1e-12);
    }

    #[test]
    fn grid_endpoints() {
        let g = log_grid(1e-4, 1e-2, 5);
        assert!((g[0] - 1e-4).abs() < 1e-18 && (g[4] - 1e-2).abs() < 1e-16);
        assert!((g[2] - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_points() {
        assert!(RatePoint::new(0.0, 1.0).is_err());
        assert!(RatePoint::new(1.0, -1.0).is_err());
        assert!(rate_slope(&[RatePoint { delta: 0.1, risk: 1.0 }]).is_err());
        let same = [RatePoint { delta: 0.1, risk: 1.0 }, RatePoint { delta: 0.1, risk: 2.0 }];
        assert!(rate_slope(&same).is_err());
        assert!(rate_slope(&[RatePoint { delta: 0.1, risk: 1.0 }, RatePoint { delta: 0.2, risk: 0.0 }]).is_err());
    }

    proptest! {
        #[test]
        fn slope_ignores_risk_scale(
            risks in prop::collection::vec(1e-6..1.0f64, 6),
            c in 1e-3..1e3f64,
        ) {
            let grid = log_grid(1e-4, 1e-2, 6);
            let a: Vec<_> = grid.iter().zip(&risks).map(|(&d, &r)| RatePoint::new(d, r).unwrap()).collect();
            let b: Vec<_> = grid.iter().zip(&risks).map(|(&d, &r)| RatePoint::new(d, c * r).unwrap()).collect();
            prop_assert!((rate_slope(&a).unwrap() - rate_slope(&b).unwrap()).abs() < 1e-12);
        }
    }
}
