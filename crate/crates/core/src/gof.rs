//! Goodness-of-fit test for exponentiality built on the consecutive-maxima
//! identity.
//!
//! The batch is shuffled and split into two halves. Groups of `n` from the
//! first half give `T1 = max(first n-1) + last/n`, groups from the second
//! half give `T2 = max(all n)`. Under exponentiality the two samples are
//! independent and identically distributed, so a permutation-calibrated
//! two-sample statistic tests the identity.
//!
//! A non-rejection only says the data are consistent with equidistribution.
//! The characterization behind the test also needs a density that is
//! analytic near zero, which no finite sample can confirm.

use std::io::BufRead;

use rayon::prelude::*;
use serde::Serialize;

use crate::density::DensityModel;
use crate::error::{Error, Result};
use crate::fmt::{serialize_f64, serialize_f64_slice};
use crate::rng::{derive_seed, Stream};

pub const ENGINE_VERSION: &str = concat!("equimax/", env!("CARGO_PKG_VERSION"), "+", "chacha20-stream/v1");

const GROUPING_STREAM: u64 = 0;
const PERMUTATION_STREAM: u64 = 1;
const DATA_STREAM: u64 = 2;

/// Positive observations with their provenance and grouping seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    values: Vec<f64>,
    source: String,
    seed: u64,
}

impl SampleBatch {
    pub fn new(values: Vec<f64>, source: impl Into<String>, seed: u64) -> Result<Self> {
        let source = source.into();
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Ingestion {
                source_name: source,
                line: i + 1,
                message: format!("value {v} is not a positive finite number"),
            });
        }
        Ok(Self { values, source, seed })
    }

    /// Reads one value per line with an optional leading `value` header.
    /// The first non-numeric or non-positive entry aborts with its line number.
    pub fn from_reader<R: BufRead>(reader: R, source: impl Into<String>, seed: u64) -> Result<Self> {
        let source = source.into();
        let mut values = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let field = line.trim();
            if line_no == 1 && field == "value" {
                continue;
            }
            let fail = |message: String| Error::Ingestion {
                source_name: source.clone(),
                line: line_no,
                message,
            };
            let v: f64 = field
                .parse()
                .map_err(|_| fail(format!("not a number: {field:?}")))?;
            if !(v.is_finite() && v > 0.0) {
                return Err(fail(format!("value {field} is not positive")));
            }
            values.push(v);
        }
        Ok(Self { values, source, seed })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same grouping seed and provenance, every value multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * c).collect(), self.source.clone(), self.seed)
    }
}

fn check_group_size(len: usize, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!("group size n must be at least 2, got {n}")));
    }
    if len < 2 * n {
        return Err(Error::domain(format!(
            "need at least {} values for group size n = {n}, got {len}",
            2 * n
        )));
    }
    Ok(())
}

/// `T1` and `T2` from values taken in the given order (no shuffle).
pub fn statistics_in_order(values: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    check_group_size(values.len(), n)?;
    let half = values.len() / 2;
    let (first, rest) = values.split_at(half);
    let second = &rest[..half];
    let inv_n = 1.0 / n as f64;
    let t1 = first
        .chunks_exact(n)
        .map(|g| g[..n - 1].iter().copied().fold(f64::NEG_INFINITY, f64::max) + g[n - 1] * inv_n)
        .collect();
    let t2 = second
        .chunks_exact(n)
        .map(|g| g.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    Ok((t1, t2))
}

/// Shuffles the batch with its own seed, then forms `T1` and `T2`.
pub fn build_statistics(batch: &SampleBatch, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    check_group_size(batch.len(), n)?;
    let mut values = batch.values.clone();
    Stream::new(batch.seed, GROUPING_STREAM).shuffle(&mut values);
    statistics_in_order(&values, n)
}

/// A two-sample statistic computed from pooled values in ascending order
/// and a flag marking which positions belong to the first sample.
/// Larger values mean stronger evidence against equal distributions.
pub trait TwoSampleStatistic: Sync {
    fn name(&self) -> &'static str;
    fn evaluate(&self, sorted_pooled: &[f64], in_first: &[bool]) -> f64;
}

/// Two-sample Kolmogorov-Smirnov sup distance.
#[derive(Debug, Clone, Copy, Default)]
pub struct KolmogorovSmirnov;

impl TwoSampleStatistic for KolmogorovSmirnov {
    fn name(&self) -> &'static str {
        "kolmogorov-smirnov"
    }

    fn evaluate(&self, sorted_pooled: &[f64], in_first: &[bool]) -> f64 {
        let m = in_first.iter().filter(|&&b| b).count() as u64;
        let k = in_first.len() as u64 - m;
        // |i/m - j/k| = |i k - j m| / (m k); integers keep ties exact
        let (mut i, mut j, mut best) = (0u64, 0u64, 0u64);
        for idx in 0..sorted_pooled.len() {
            if in_first[idx] {
                i += 1;
            } else {
                j += 1;
            }
            let at_group_end = idx + 1 == sorted_pooled.len() || sorted_pooled[idx + 1] != sorted_pooled[idx];
            if at_group_end {
                best = best.max((i * k).abs_diff(j * m));
            }
        }
        best as f64 / (m * k) as f64
    }
}

fn pool(u: &[f64], v: &[f64]) -> (Vec<f64>, Vec<bool>) {
    let mut tagged: Vec<(f64, bool)> =
        u.iter().map(|&x| (x, true)).chain(v.iter().map(|&x| (x, false))).collect();
    tagged.sort_by(|a, b| a.0.total_cmp(&b.0));
    tagged.into_iter().unzip()
}

fn check_samples(u: &[f64], v: &[f64]) -> Result<()> {
    if u.is_empty() || v.is_empty() {
        return Err(Error::domain("two-sample statistic needs two nonempty samples"));
    }
    if u.iter().chain(v).any(|x| x.is_nan()) {
        return Err(Error::domain("samples contain NaN"));
    }
    Ok(())
}

/// Sup distance between the empirical cdfs of `u` and `v`.
pub fn ks_statistic(u: &[f64], v: &[f64]) -> Result<f64> {
    check_samples(u, v)?;
    let (pooled, labels) = pool(u, v);
    Ok(KolmogorovSmirnov.evaluate(&pooled, &labels))
}

/// Add-one permutation p-value `(1 + #{D_b >= D_obs}) / (B + 1)` using the
/// given statistic. Relabelings come from stream 1 of `seed`.
pub fn permutation_pvalue_with<S: TwoSampleStatistic>(
    statistic: &S,
    u: &[f64],
    v: &[f64],
    permutations: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    check_samples(u, v)?;
    if permutations == 0 {
        return Err(Error::domain("permutation count B must be at least 1"));
    }
    let (pooled, mut labels) = pool(u, v);
    let observed = statistic.evaluate(&pooled, &labels);
    let mut rng = Stream::new(seed, PERMUTATION_STREAM);
    let mut at_least = 0usize;
    for _ in 0..permutations {
        rng.shuffle(&mut labels);
        if statistic.evaluate(&pooled, &labels) >= observed {
            at_least += 1;
        }
    }
    Ok((observed, (1 + at_least) as f64 / (permutations + 1) as f64))
}

pub fn permutation_pvalue(u: &[f64], v: &[f64], permutations: usize, seed: u64) -> Result<f64> {
    permutation_pvalue_with(&KolmogorovSmirnov, u, v, permutations, seed).map(|(_, p)| p)
}

/// Outcome of one test run; field order is the serialized key order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub n: usize,
    pub m1: usize,
    pub m2: usize,
    #[serde(serialize_with = "serialize_f64")]
    pub ks_statistic: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub p_value: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub alpha: f64,
    pub reject: bool,
    #[serde(rename = "B")]
    pub permutations: usize,
    pub seed: u64,
    pub engine_version: String,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

pub fn run_test(batch: &SampleBatch, n: usize, permutations: usize, alpha: f64, seed: u64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let (t1, t2) = build_statistics(batch, n)?;
    let (ks, p_value) = permutation_pvalue_with(&KolmogorovSmirnov, &t1, &t2, permutations, seed)?;
    Ok(TestReport {
        n,
        m1: t1.len(),
        m2: t2.len(),
        ks_statistic: ks,
        p_value,
        alpha,
        reject: p_value <= alpha,
        permutations,
        seed,
        engine_version: ENGINE_VERSION.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub model: DensityModel,
    #[serde(rename = "N")]
    pub sample_size: usize,
    pub n: usize,
    pub reps: usize,
    #[serde(rename = "B")]
    pub permutations: usize,
    #[serde(serialize_with = "serialize_f64")]
    pub alpha: f64,
    pub seed: u64,
    #[serde(serialize_with = "serialize_f64")]
    pub rejection_rate: f64,
    pub rejections: usize,
    #[serde(serialize_with = "serialize_f64_slice")]
    pub p_values: Vec<f64>,
    pub engine_version: String,
}

/// Runs the test on `reps` independent datasets of size `sample_size`.
/// Replicate `r` draws everything from the seed `derive_seed(seed, r)`, so
/// the result does not depend on thread scheduling.
#[allow(clippy::too_many_arguments)]
pub fn simulate_size_power(
    model: &DensityModel,
    sample_size: usize,
    n: usize,
    reps: usize,
    permutations: usize,
    alpha: f64,
    seed: u64,
) -> Result<SimulationReport> {
    check_group_size(sample_size, n)?;
    check_alpha(alpha)?;
    if reps == 0 {
        return Err(Error::domain("reps must be at least 1"));
    }
    let p_values = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let rep_seed = derive_seed(seed, r);
            let values = model.sample_stream(sample_size, rep_seed, DATA_STREAM)?;
            let batch = SampleBatch::new(values, format!("{model} replicate {r}"), rep_seed)?;
            run_test(&batch, n, permutations, alpha, rep_seed).map(|t| t.p_value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let rejections = p_values.iter().filter(|&&p| p <= alpha).count();
    Ok(SimulationReport {
        model: *model,
        sample_size,
        n,
        reps,
        permutations,
        alpha,
        seed,
        rejection_rate: rejections as f64 / reps as f64,
        rejections,
        p_values,
        engine_version: ENGINE_VERSION.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn engine_version_names_rng() {
        assert!(ENGINE_VERSION.ends_with(crate::rng::ENGINE_ID));
    }

    #[test]
    fn statistics_by_hand() {
        let (t1, t2) = statistics_in_order(&[1.0, 2.0, 3.0, 4.0], 2).unwrap();
        assert_eq!(t1, vec![2.0]);
        assert_eq!(t2, vec![4.0]);
    }

    #[test]
    fn statistics_need_two_groups() {
        let batch = SampleBatch::new(vec![1.0; 5], "t", 0).unwrap();
        let err = build_statistics(&batch, 3).unwrap_err();
        assert!(err.to_string().contains("need at least 6 values"), "{err}");
        assert!(build_statistics(&batch, 1).is_err());
        assert!(build_statistics(&batch, 2).is_ok());
    }

    #[test]
    fn remainder_bound() {
        for len in 4..60usize {
            for n in 2..=len / 2 {
                let values: Vec<f64> = (1..=len).map(|i| i as f64).collect();
                let (t1, t2) = statistics_in_order(&values, n).unwrap();
                let used = (t1.len() + t2.len()) * n;
                let split = 2 * (len / 2);
                assert!(split - used <= 2 * (n - 1));
                assert_eq!(t1.len(), t2.len());
            }
        }
    }

    #[test]
    fn exponential_statistics_have_equal_means() {
        let values = DensityModel::exponential(1.0).unwrap().sample(10_000, 77).unwrap();
        let batch = SampleBatch::new(values, "sim", 5).unwrap();
        let (t1, t2) = build_statistics(&batch, 3).unwrap();
        let stats = |x: &[f64]| {
            let m = x.iter().sum::<f64>() / x.len() as f64;
            let v = x.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64;
            (m, v / x.len() as f64)
        };
        let (m1, s1) = stats(&t1);
        let (m2, s2) = stats(&t2);
        assert!((m1 - m2).abs() < 3.0 * (s1 + s2).sqrt(), "{m1} vs {m2}");
    }

    #[test]
    fn ks_examples() {
        assert_eq!(ks_statistic(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert_eq!(ks_statistic(&[0.0, 1.0], &[2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(ks_statistic(&[1.0, 3.0], &[2.0, 4.0]).unwrap(), 0.5);
        assert!(ks_statistic(&[], &[1.0]).is_err());
    }

    /// Brute-force ECDF sup over the pooled points.
    fn ks_brute(u: &[f64], v: &[f64]) -> f64 {
        let ecdf = |s: &[f64], x: f64| s.iter().filter(|&&a| a <= x).count() as f64 / s.len() as f64;
        u.iter()
            .chain(v)
            .map(|&x| (ecdf(u, x) - ecdf(v, x)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn ks_matches_brute_force_with_ties() {
        let mut rng = Stream::new(3, 9);
        for _ in 0..200 {
            let m = 1 + rng.below(15) as usize;
            let k = 1 + rng.below(15) as usize;
            let u: Vec<f64> = (0..m).map(|_| rng.below(6) as f64).collect();
            let v: Vec<f64> = (0..k).map(|_| rng.below(6) as f64).collect();
            let got = ks_statistic(&u, &v).unwrap();
            assert!((got - ks_brute(&u, &v)).abs() < 1e-12);
        }
    }

    #[test]
    fn pvalue_examples() {
        let u = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(permutation_pvalue(&u, &u, 50, 1).unwrap(), 1.0);

        let a: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let b: Vec<f64> = (100..150).map(|i| i as f64).collect();
        assert_eq!(permutation_pvalue(&a, &b, 200, 1).unwrap(), 1.0 / 201.0);

        let p1 = permutation_pvalue(&a[..20], &a[15..40], 99, 8).unwrap();
        let p2 = permutation_pvalue(&a[..20], &a[15..40], 99, 8).unwrap();
        assert_eq!(p1, p2);
        assert!(permutation_pvalue(&a, &b, 0, 1).is_err());
    }

    #[test]
    fn pvalue_bounds() {
        let model = DensityModel::exponential(1.0).unwrap();
        for s in 0..30 {
            let u = model.sample_stream(20, s, 0).unwrap();
            let v = model.sample_stream(25, s, 1).unwrap();
            let b = 10 + s as usize;
            let p = permutation_pvalue(&u, &v, b, s).unwrap();
            assert!(p >= 1.0 / (b + 1) as f64 && p <= 1.0);
        }
    }

    #[test]
    fn run_test_is_deterministic() {
        let values = DensityModel::exponential(1.0).unwrap().sample(600, 4).unwrap();
        let batch = SampleBatch::new(values, "sim", 4).unwrap();
        let a = run_test(&batch, 3, 100, 0.05, 42).unwrap();
        let b = run_test(&batch, 3, 100, 0.05, 42).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.reject, a.p_value <= a.alpha);
        assert_eq!((a.m1, a.m2), (100, 100));

        let small = SampleBatch::new(vec![1.0, 2.0, 3.0, 4.0, 5.0], "tiny", 0).unwrap();
        assert!(matches!(run_test(&small, 3, 10, 0.05, 0), Err(Error::Domain(_))));
        assert!(run_test(&batch, 3, 10, 1.5, 0).is_err());
    }

    #[test]
    fn report_key_order() {
        let values = DensityModel::exponential(1.0).unwrap().sample(60, 4).unwrap();
        let batch = SampleBatch::new(values, "sim", 4).unwrap();
        let json = serde_json::to_string(&run_test(&batch, 3, 20, 0.05, 1).unwrap()).unwrap();
        let keys = ["\"n\"", "\"m1\"", "\"m2\"", "\"ks_statistic\"", "\"p_value\"", "\"alpha\"", "\"reject\"", "\"B\"", "\"seed\"", "\"engine_version\""];
        let positions: Vec<usize> = keys.iter().map(|k| json.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "{json}");
    }

    #[test]
    fn scale_invariance() {
        let values = DensityModel::weibull(1.5, 2.0).unwrap().sample(300, 12).unwrap();
        let batch = SampleBatch::new(values, "sim", 12).unwrap();
        let base = run_test(&batch, 3, 200, 0.05, 99).unwrap();
        for c in [0.5, 3.0, 1e3] {
            let scaled = run_test(&batch.scaled(c).unwrap(), 3, 200, 0.05, 99).unwrap();
            assert_eq!(scaled.ks_statistic, base.ks_statistic);
            assert_eq!(scaled.p_value, base.p_value);
        }
    }

    #[test]
    fn ingestion() {
        let ok = SampleBatch::from_reader("value\n1.5\n2\n3e-1\n".as_bytes(), "mem", 0).unwrap();
        assert_eq!(ok.values(), &[1.5, 2.0, 0.3]);
        let no_header = SampleBatch::from_reader("1\n2\n".as_bytes(), "mem", 0).unwrap();
        assert_eq!(no_header.len(), 2);
        match SampleBatch::from_reader("value\n1\nabc\n".as_bytes(), "mem", 0) {
            Err(Error::Ingestion { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match SampleBatch::from_reader("1\n0\n".as_bytes(), "mem", 0) {
            Err(Error::Ingestion { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(SampleBatch::from_reader("1\n-2\n".as_bytes(), "mem", 0).is_err());
        assert!(SampleBatch::from_reader("value\nvalue\n".as_bytes(), "mem", 0).is_err());
        assert!(SampleBatch::new(vec![1.0, f64::NAN], "x", 0).is_err());
    }
}
