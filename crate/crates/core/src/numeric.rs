//! Floating-point check of the consecutive-maxima identity for any
//! [`DensityModel`], comparing the two sides as distribution functions.
//!
//! With `T1 = max(X_1..X_{n-1}) + X_n / n` and `T2 = max(X_1..X_n)`:
//! `P(T1 <= x) = ∫_0^x n f(ny) F(x-y)^{n-1} dy` and `P(T2 <= x) = F(x)^n`.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::density::DensityModel;
use crate::error::{Error, Result};
use crate::fmt::{serialize_f64, serialize_f64_slice, sig17};
use crate::quadrature::integrate;

pub const DEFAULT_GRID_POINTS: usize = 64;
/// Discrepancies above this multiple of the quadrature tolerance are
/// reported as a failure of the identity rather than quadrature noise.
pub const FALSIFICATION_FACTOR: f64 = 100.0;

fn check_n(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!("group size n must be at least 2, got {n}")));
    }
    Ok(())
}

/// `P(max(X_1..X_{n-1}) + X_n/n <= x)`.
pub fn lhs_cdf(model: &DensityModel, n: u32, x: f64, tol: f64) -> Result<f64> {
    check_n(n)?;
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain(format!("cdf evaluated at invalid point {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let nf = f64::from(n);
    let integrand = |y: f64| nf * model.pdf(nf * y) * model.cdf(x - y).powi(n as i32 - 1);

    // split where either factor has a kink
    let mut cuts = vec![0.0, x];
    for b in model.breakpoints() {
        cuts.push(b / nf);
        cuts.push(x - b);
    }
    cuts.retain(|c| (0.0..=x).contains(c));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let pieces = cuts.len() - 1;
    let piece_tol = tol / pieces as f64;

    let mut value = 0.0;
    let mut error_estimate = 0.0;
    let mut failed = None;
    for w in cuts.windows(2) {
        match integrate(integrand, w[0], w[1], piece_tol) {
            Ok(r) => {
                value += r.value;
                error_estimate += r.error_estimate;
            }
            Err(Error::Numeric { message, estimate, error_estimate: e }) => {
                value += estimate;
                error_estimate += e;
                failed = Some(message);
            }
            Err(other) => return Err(other),
        }
    }
    match failed {
        None => Ok(value),
        Some(message) => Err(Error::Numeric { message, estimate: value, error_estimate }),
    }
}

/// `P(max(X_1..X_n) <= x) = F(x)^n`.
pub fn rhs_cdf(model: &DensityModel, n: u32, x: f64) -> f64 {
    model.cdf(x).powi(n as i32)
}

/// Right end of the default grid: the 0.999 quantile of `max(X_1..X_n)`.
pub fn default_x_max(model: &DensityModel, n: u32) -> Result<f64> {
    check_n(n)?;
    model.quantile(0.999f64.powf(1.0 / f64::from(n)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFailure {
    pub index: usize,
    pub message: String,
}

/// Both cdfs of the identity on a uniform grid.
#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyCurve {
    pub model: DensityModel,
    pub n: u32,
    #[serde(serialize_with = "serialize_f64")]
    pub quadrature_tolerance: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub max_abs_discrepancy: f64,
    pub identity_fails: bool,
    #[serde(serialize_with = "serialize_f64_slice")]
    pub grid: Vec<f64>,
    #[serde(serialize_with = "serialize_f64_slice")]
    pub lhs_cdf: Vec<f64>,
    #[serde(serialize_with = "serialize_f64_slice")]
    pub rhs_cdf: Vec<f64>,
    pub quadrature_failures: Vec<GridFailure>,
}

impl DiscrepancyCurve {
    pub fn discrepancies(&self) -> impl Iterator<Item = f64> + '_ {
        self.lhs_cdf.iter().zip(&self.rhs_cdf).map(|(l, r)| (l - r).abs())
    }

    /// CSV with header `x,lhs_cdf,rhs_cdf,discrepancy`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,lhs_cdf,rhs_cdf,discrepancy")?;
        for (i, d) in self.discrepancies().enumerate() {
            writeln!(
                out,
                "{},{},{},{}",
                sig17(self.grid[i]),
                sig17(self.lhs_cdf[i]),
                sig17(self.rhs_cdf[i]),
                sig17(d)
            )?;
        }
        Ok(())
    }
}

/// Evaluates both sides of the identity on `grid_points` equally spaced
/// points of `[0, x_max]`. Quadrature failures keep the best estimate and
/// are listed in the curve.
pub fn discrepancy_curve(
    model: &DensityModel,
    n: u32,
    x_max: f64,
    grid_points: usize,
    tol: f64,
) -> Result<DiscrepancyCurve> {
    check_n(n)?;
    if grid_points < 2 {
        return Err(Error::domain(format!("grid needs at least 2 points, got {grid_points}")));
    }
    if !x_max.is_finite() || x_max <= 0.0 {
        return Err(Error::domain(format!("x_max must be positive, got {x_max}")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    let step = x_max / (grid_points - 1) as f64;
    let grid: Vec<f64> = (0..grid_points).map(|i| i as f64 * step).collect();
    let evaluated: Vec<(f64, Option<String>)> = grid
        .par_iter()
        .map(|&x| match lhs_cdf(model, n, x, tol) {
            Ok(v) => Ok((v, None)),
            Err(Error::Numeric { message, estimate, .. }) => Ok((estimate, Some(message))),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;

    let mut lhs = Vec::with_capacity(grid_points);
    let mut quadrature_failures = Vec::new();
    for (index, (v, failure)) in evaluated.into_iter().enumerate() {
        lhs.push(v);
        if let Some(message) = failure {
            quadrature_failures.push(GridFailure { index, message });
        }
    }
    let rhs: Vec<f64> = grid.iter().map(|&x| rhs_cdf(model, n, x)).collect();
    let max_abs_discrepancy =
        lhs.iter().zip(&rhs).map(|(l, r)| (l - r).abs()).fold(0.0, f64::max);
    Ok(DiscrepancyCurve {
        model: *model,
        n,
        quadrature_tolerance: tol,
        max_abs_discrepancy,
        identity_fails: max_abs_discrepancy > FALSIFICATION_FACTOR * tol,
        grid,
        lhs_cdf: lhs,
        rhs_cdf: rhs,
        quadrature_failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Closed form of `P(T1 <= x)` for Uniform(0, theta), integrating the
    /// piecewise-polynomial integrand by hand.
    fn uniform_lhs_oracle(theta: f64, n: u32, x: f64) -> f64 {
        let nf = f64::from(n);
        let a = x.min(theta / nf);
        let c = (x - theta).clamp(0.0, a);
        nf / theta * c + ((x - c).powi(n as i32) - (x - a).powi(n as i32)) / theta.powi(n as i32)
    }

    #[test]
    fn zero_point() {
        for m in ["exp", "weibull", "uniform", "gamma", "halfnormal"] {
            let m: DensityModel = m.parse().unwrap();
            assert_eq!(lhs_cdf(&m, 3, 0.0, 1e-10).unwrap(), 0.0);
        }
    }

    #[test]
    fn exponential_n2_closed_form() {
        let m = DensityModel::exponential(1.0).unwrap();
        for i in 1..40 {
            let x = i as f64 * 0.25;
            let exact = (1.0 - (-x).exp()).powi(2);
            assert!((lhs_cdf(&m, 2, x, 1e-11).unwrap() - exact).abs() < 1e-10);
        }
    }

    #[test]
    fn uniform_oracle_and_gap() {
        let m = DensityModel::uniform(1.0).unwrap();
        for i in 0..=60 {
            let x = i as f64 * 0.025;
            for n in [2, 3, 5] {
                let got = lhs_cdf(&m, n, x, 1e-12).unwrap();
                assert!((got - uniform_lhs_oracle(1.0, n, x)).abs() < 1e-11, "n={n} x={x}");
            }
        }
        let v = lhs_cdf(&m, 3, 0.9, 1e-10).unwrap();
        assert!((v - 0.9f64.powi(3)).abs() > 0.01);
        assert!((uniform_lhs_oracle(1.0, 3, 0.9) - 0.9f64.powi(3)).abs() > 0.01);
    }

    #[test]
    fn curve_examples() {
        let e = DensityModel::exponential(1.0).unwrap();
        let c = discrepancy_curve(&e, 4, 10.0, 64, 1e-10).unwrap();
        assert!(c.max_abs_discrepancy <= 1e-8, "{}", c.max_abs_discrepancy);
        assert!(!c.identity_fails);
        assert_eq!(c.grid.len(), 64);
        assert!(matches!(discrepancy_curve(&e, 4, 10.0, 1, 1e-10), Err(Error::Domain(_))));
        assert!(discrepancy_curve(&e, 1, 10.0, 8, 1e-10).is_err());

        let w = DensityModel::weibull(2.0, 1.0).unwrap();
        let c = discrepancy_curve(&w, 3, 5.0, 64, 1e-10).unwrap();
        assert!(c.max_abs_discrepancy > 1e-3);
        assert!(c.identity_fails);
    }

    #[test]
    fn curve_invariants() {
        let tol = 1e-9;
        for spec in ["exp", "weibull", "gamma", "uniform", "halfnormal"] {
            let m: DensityModel = spec.parse().unwrap();
            for n in [2, 3, 5] {
                let x_max = default_x_max(&m, n).unwrap();
                let c = discrepancy_curve(&m, n, x_max, 32, tol).unwrap();
                assert!(c.quadrature_failures.is_empty());
                let eps = 10.0 * tol;
                for w in c.lhs_cdf.windows(2) {
                    assert!(w[1] >= w[0] - 2.0 * tol, "{spec} n={n}");
                }
                for v in c.lhs_cdf.iter().chain(&c.rhs_cdf) {
                    assert!(*v >= -eps && *v <= 1.0 + eps);
                }
                let max = c.discrepancies().fold(0.0, f64::max);
                assert_eq!(max, c.max_abs_discrepancy);
            }
        }
    }

    #[test]
    fn exponential_scale_equivariance() {
        let tol = 1e-10;
        let base = DensityModel::exponential(1.0).unwrap();
        let d0 = discrepancy_curve(&base, 3, 8.0, 32, tol).unwrap().max_abs_discrepancy;
        for c in [2.0, 5.0] {
            let scaled = DensityModel::exponential(c).unwrap();
            let d = discrepancy_curve(&scaled, 3, 8.0 / c, 32, tol).unwrap().max_abs_discrepancy;
            assert!((d - d0).abs() <= 10.0 * tol);
        }
    }

    #[test]
    fn exponential_discrepancy_shrinks_with_tolerance() {
        let m = DensityModel::exponential(1.0).unwrap();
        let ds: Vec<(f64, f64)> = [1e-6, 1e-8, 1e-10]
            .iter()
            .map(|&t| (t, discrepancy_curve(&m, 4, 10.0, 32, t).unwrap().max_abs_discrepancy))
            .collect();
        for w in ds.windows(2) {
            assert!(w[1].1 <= w[0].1 + 2.0 * w[0].0);
        }
        for (t, d) in ds {
            assert!(d <= t);
        }
    }

    #[test]
    fn csv_export() {
        let m = DensityModel::exponential(1.0).unwrap();
        let c = discrepancy_curve(&m, 2, 1.0, 3, 1e-10).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,lhs_cdf,rhs_cdf,discrepancy");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0.0000000000000000e0,"));
    }
}
