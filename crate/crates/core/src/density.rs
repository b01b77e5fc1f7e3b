//! Parametric nonnegative continuous distributions.

use std::f64::consts::{FRAC_2_SQRT_PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use statrs::function::erf::{erf, erf_inv};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::error::{Error, Result};
use crate::rng::Stream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityModel {
    Exponential { rate: f64 },
    Weibull { shape: f64, scale: f64 },
    Gamma { shape: f64, rate: f64 },
    Uniform { theta: f64 },
    HalfNormal { sigma: f64 },
}

fn check_positive(spec: &str, name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Model {
            spec: spec.to_string(),
            message: format!("parameter {name} must be a positive finite number, got {v}"),
        })
    }
}

impl DensityModel {
    pub fn exponential(rate: f64) -> Result<Self> {
        let rate = check_positive("exp", "rate", rate)?;
        Ok(Self::Exponential { rate })
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        Ok(Self::Weibull {
            shape: check_positive("weibull", "shape", shape)?,
            scale: check_positive("weibull", "scale", scale)?,
        })
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        Ok(Self::Gamma {
            shape: check_positive("gamma", "shape", shape)?,
            rate: check_positive("gamma", "rate", rate)?,
        })
    }

    pub fn uniform(theta: f64) -> Result<Self> {
        Ok(Self::Uniform { theta: check_positive("uniform", "theta", theta)? })
    }

    pub fn half_normal(sigma: f64) -> Result<Self> {
        Ok(Self::HalfNormal { sigma: check_positive("halfnormal", "sigma", sigma)? })
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::Exponential { .. } => "exp",
            Self::Weibull { .. } => "weibull",
            Self::Gamma { .. } => "gamma",
            Self::Uniform { .. } => "uniform",
            Self::HalfNormal { .. } => "halfnormal",
        }
    }

    pub fn is_exponential(&self) -> bool {
        matches!(self, Self::Exponential { .. })
    }

    /// `(pdf, cdf)` at `x >= 0`.
    pub fn evaluate(&self, x: f64) -> Result<(f64, f64)> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::domain(format!("density evaluated at negative or NaN point {x}")));
        }
        Ok((self.pdf(x), self.cdf(x)))
    }

    /// Density; zero for negative arguments.
    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match *self {
            Self::Exponential { rate } => rate * (-rate * x).exp(),
            Self::Weibull { shape, scale } => {
                let z = x / scale;
                shape / scale * z.powf(shape - 1.0) * (-z.powf(shape)).exp()
            }
            Self::Gamma { shape, rate } => {
                if x == 0.0 {
                    return match shape {
                        s if s < 1.0 => f64::INFINITY,
                        1.0 => rate,
                        _ => 0.0,
                    };
                }
                (shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - ln_gamma(shape)).exp()
            }
            Self::Uniform { theta } => {
                if x <= theta {
                    1.0 / theta
                } else {
                    0.0
                }
            }
            Self::HalfNormal { sigma } => {
                let z = x / sigma;
                FRAC_2_SQRT_PI / SQRT_2 / sigma * (-0.5 * z * z).exp()
            }
        }
    }

    /// Distribution function; zero for negative arguments.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            Self::Exponential { rate } => -(-rate * x).exp_m1(),
            Self::Weibull { shape, scale } => -(-(x / scale).powf(shape)).exp_m1(),
            Self::Gamma { shape, rate } => gamma_lr(shape, rate * x),
            Self::Uniform { theta } => (x / theta).min(1.0),
            Self::HalfNormal { sigma } => erf(x / (sigma * SQRT_2)),
        }
    }

    /// Quantile for `u` in `[0, 1)`. Closed form except for gamma, which
    /// bisects the cdf to full double precision.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::domain(format!("quantile level must lie in [0, 1), got {u}")));
        }
        Ok(match *self {
            Self::Exponential { rate } => -(-u).ln_1p() / rate,
            Self::Weibull { shape, scale } => scale * (-(-u).ln_1p()).powf(1.0 / shape),
            Self::Uniform { theta } => theta * u,
            Self::HalfNormal { sigma } => sigma * SQRT_2 * erf_inv(u),
            Self::Gamma { .. } => self.bisect_quantile(u),
        })
    }

    fn bisect_quantile(&self, u: f64) -> f64 {
        if u == 0.0 {
            return 0.0;
        }
        let mut hi = 1.0;
        while self.cdf(hi) < u {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    /// Points where the density is not smooth, used to split quadrature.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Self::Uniform { theta } => vec![theta],
            _ => Vec::new(),
        }
    }

    /// `count` seeded draws from stream 0 of `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<f64>> {
        self.sample_stream(count, seed, 0)
    }

    /// `count` draws from the `(seed, stream)` random stream.
    pub fn sample_stream(&self, count: usize, seed: u64, stream: u64) -> Result<Vec<f64>> {
        if count == 0 {
            return Err(Error::domain("sample count must be at least 1"));
        }
        let mut rng = Stream::new(seed, stream);
        Ok((0..count).map(|_| self.draw(&mut rng)).collect())
    }

    fn draw(&self, rng: &mut Stream) -> f64 {
        match *self {
            Self::Exponential { rate } => -rng.uniform_open0().ln() / rate,
            Self::Weibull { shape, scale } => scale * (-rng.uniform_open0().ln()).powf(1.0 / shape),
            Self::Uniform { theta } => theta * rng.uniform(),
            Self::HalfNormal { sigma } => sigma * rng.standard_normal().abs(),
            Self::Gamma { shape, rate } => standard_gamma(rng, shape) / rate,
        }
    }
}

/// Marsaglia-Tsang squeeze method; shapes below one use the `U^{1/a}` boost.
fn standard_gamma(rng: &mut Stream, shape: f64) -> f64 {
    if shape < 1.0 {
        let boost = rng.uniform_open0().powf(1.0 / shape);
        return standard_gamma(rng, shape + 1.0) * boost;
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let z = rng.standard_normal();
        let v = 1.0 + c * z;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u = rng.uniform_open0();
        if u < 1.0 - 0.0331 * z.powi(4) || u.ln() < 0.5 * z * z + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

impl fmt::Display for DensityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Exponential { rate } => write!(f, "exp:rate={rate}"),
            Self::Weibull { shape, scale } => write!(f, "weibull:shape={shape},scale={scale}"),
            Self::Gamma { shape, rate } => write!(f, "gamma:shape={shape},rate={rate}"),
            Self::Uniform { theta } => write!(f, "uniform:theta={theta}"),
            Self::HalfNormal { sigma } => write!(f, "halfnormal:sigma={sigma}"),
        }
    }
}

impl Serialize for DensityModel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for DensityModel {
    type Err = Error;

    /// Parses `family[:key=value,...]`; omitted parameters take the family
    /// defaults (rate 1, shape 2, scale 1, theta 1, sigma 1).
    fn from_str(spec: &str) -> Result<Self> {
        let bad = |message: String| Error::Model { spec: spec.to_string(), message };
        let (family, params) = match spec.trim().split_once(':') {
            Some((fam, rest)) => (fam.trim(), rest.trim()),
            None => (spec.trim(), ""),
        };
        let allowed: &[&str] = match family {
            "exp" => &["rate"],
            "weibull" => &["shape", "scale"],
            "gamma" => &["shape", "rate"],
            "uniform" => &["theta"],
            "halfnormal" => &["sigma"],
            other => return Err(bad(format!("unknown family {other:?}"))),
        };
        let mut values: Vec<Option<f64>> = vec![None; allowed.len()];
        for pair in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got {pair:?}")))?;
            let slot = allowed
                .iter()
                .position(|k| *k == key.trim())
                .ok_or_else(|| bad(format!("unknown parameter {:?} for {family}", key.trim())))?;
            if values[slot].is_some() {
                return Err(bad(format!("parameter {:?} given twice", key.trim())));
            }
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| bad(format!("parameter {key} is not a number: {value:?}")))?;
            values[slot] = Some(v);
        }
        let get = |i: usize, default: f64| values[i].unwrap_or(default);
        let model = match family {
            "exp" => Self::exponential(get(0, 1.0)),
            "weibull" => Self::weibull(get(0, 2.0), get(1, 1.0)),
            "gamma" => Self::gamma(get(0, 2.0), get(1, 1.0)),
            "uniform" => Self::uniform(get(0, 1.0)),
            _ => Self::half_normal(get(0, 1.0)),
        };
        model.map_err(|e| match e {
            Error::Model { message, .. } => bad(message),
            other => other,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> Vec<DensityModel> {
        ["exp", "weibull", "gamma", "uniform", "halfnormal"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect()
    }

    #[test]
    fn evaluate_examples() {
        let e1 = DensityModel::exponential(1.0).unwrap();
        assert_eq!(e1.evaluate(0.0).unwrap(), (1.0, 0.0));
        let e2 = DensityModel::exponential(2.0).unwrap();
        let (p, c) = e2.evaluate(std::f64::consts::LN_2 / 2.0).unwrap();
        assert!((p - 1.0).abs() < 1e-15 && (c - 0.5).abs() < 1e-15);
        let u = DensityModel::uniform(1.0).unwrap();
        assert_eq!(u.evaluate(0.5).unwrap(), (1.0, 0.5));
        assert!(matches!(e1.evaluate(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn gamma_cdf_matches_closed_form() {
        // shape 2, rate 1.5: F(x) = 1 - e^{-bx}(1 + bx)
        let g = DensityModel::gamma(2.0, 1.5).unwrap();
        for i in 1..200 {
            let x = i as f64 * 0.05;
            let bx = 1.5 * x;
            let exact = -(-bx).exp_m1() - bx * (-bx).exp();
            let got = g.cdf(x);
            assert!(((got - exact) / exact).abs() <= 1e-12, "x={x} got={got} exact={exact}");
            let pdf = 1.5 * 1.5 * x * (-bx).exp();
            assert!(((g.pdf(x) - pdf) / pdf).abs() < 1e-13);
        }
    }

    #[test]
    fn quantile_round_trip() {
        for m in defaults() {
            for k in 1..100 {
                let u = k as f64 / 100.0;
                let q = m.quantile(u).unwrap();
                assert!((m.cdf(q) - u).abs() < 1e-10, "{m} u={u}");
            }
        }
        assert!(defaults()[0].quantile(1.0).is_err());
    }

    #[test]
    fn cdf_shape() {
        for m in defaults() {
            assert_eq!(m.cdf(0.0), 0.0);
            let mut prev = 0.0;
            for i in 0..400 {
                let c = m.cdf(i as f64 * 0.05);
                assert!(c >= prev && c <= 1.0);
                prev = c;
            }
            assert!(m.cdf(60.0) > 1.0 - 1e-12);
        }
    }

    #[test]
    fn pdf_integrates_to_one() {
        // composite Simpson on a grid fine enough for these smooth bodies
        for m in defaults() {
            let upper = m.quantile(1.0 - 1e-13).unwrap();
            let mut pieces = vec![0.0];
            pieces.extend(m.breakpoints());
            pieces.push(upper.max(*pieces.last().unwrap()));
            let mut total = 0.0;
            for w in pieces.windows(2) {
                let (a, b) = (w[0], w[1]);
                let n = 20_000;
                let h = (b - a) / n as f64;
                let mut s = m.pdf(a) + m.pdf(b);
                for i in 1..n {
                    let x = a + i as f64 * h;
                    s += m.pdf(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
                }
                total += s * h / 3.0;
            }
            assert!((total - 1.0).abs() < 1e-8, "{m}: {total}");
        }
    }

    #[test]
    fn parse_and_display() {
        let m: DensityModel = "weibull:shape=2,scale=1".parse().unwrap();
        assert_eq!(m, DensityModel::weibull(2.0, 1.0).unwrap());
        assert_eq!(m.to_string(), "weibull:shape=2,scale=1");
        let m: DensityModel = "exp:rate=1.0".parse().unwrap();
        assert_eq!(m.to_string(), "exp:rate=1");
        assert_eq!("gamma:shape=2,rate=1".parse::<DensityModel>().unwrap(), DensityModel::gamma(2.0, 1.0).unwrap());
        assert_eq!("uniform:theta=1".parse::<DensityModel>().unwrap(), DensityModel::uniform(1.0).unwrap());
        assert_eq!("halfnormal:sigma=1".parse::<DensityModel>().unwrap(), DensityModel::half_normal(1.0).unwrap());
        for bad in ["normal:mu=0", "exp:rate=-1", "exp:lambda=2", "exp:rate=x", "weibull:shape", "exp:rate=1,rate=2", "uniform:theta=0"] {
            assert!(matches!(bad.parse::<DensityModel>(), Err(Error::Model { .. })), "{bad}");
        }
        for m in defaults() {
            assert_eq!(m.to_string().parse::<DensityModel>().unwrap(), m);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        for m in defaults() {
            assert_eq!(m.sample(100, 5).unwrap(), m.sample(100, 5).unwrap());
            assert_ne!(m.sample(100, 5).unwrap(), m.sample(100, 6).unwrap());
        }
        assert!(defaults()[0].sample(0, 1).is_err());
    }

    #[test]
    fn exponential_sample_mean() {
        let xs = DensityModel::exponential(1.0).unwrap().sample(100_000, 2024).unwrap();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 1.0).abs() < 0.02, "{mean}");
    }

    #[test]
    fn uniform_samples_in_support() {
        let xs = DensityModel::uniform(1.0).unwrap().sample(10_000, 9).unwrap();
        assert!(xs.iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn samples_match_cdf() {
        let n = 100_000;
        let bound = 1.63 / (n as f64).sqrt() * 1.5;
        for m in defaults() {
            let mut xs = m.sample(n, 31).unwrap();
            xs.sort_by(f64::total_cmp);
            let d = xs
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let c = m.cdf(x);
                    (c - i as f64 / n as f64).max((i + 1) as f64 / n as f64 - c)
                })
                .fold(0.0, f64::max);
            assert!(d < bound, "{m}: D = {d}");
        }
    }
}
