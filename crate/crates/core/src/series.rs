//! Truncated Maclaurin series with exact rational coefficients.
//!
//! Coefficient `k` holds `g^{(k)}(0) / k!`. A series of order `d` knows
//! coefficients `0..=d` and nothing beyond; every operation reports the order
//! it can actually vouch for instead of padding with zeros.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{factorial, rat_pow, ExactRational};
use crate::ruiz::{hni, param, pow_nonneg, IdentityReport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerSeries {
    order: usize,
    coefficients: Vec<ExactRational>,
}

impl PowerSeries {
    /// Series whose order is `coefficients.len() - 1`.
    pub fn new(coefficients: Vec<ExactRational>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::domain("a power series needs at least one coefficient"));
        }
        Ok(Self { order: coefficients.len() - 1, coefficients })
    }

    pub fn from_integers(coefficients: &[i64]) -> Result<Self> {
        Self::new(coefficients.iter().map(|&c| ExactRational::from(c)).collect())
    }

    /// The constant series `c` known to the given order.
    pub fn constant(c: ExactRational, order: usize) -> Self {
        let mut coefficients = vec![ExactRational::zero(); order + 1];
        coefficients[0] = c;
        Self { order, coefficients }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coefficients(&self) -> &[ExactRational] {
        &self.coefficients
    }

    pub fn coefficient(&self, k: usize) -> Option<&ExactRational> {
        self.coefficients.get(k)
    }

    /// `k`-th derivative at zero, `k! * a_k`.
    pub fn derivative_at_zero(&self, k: usize) -> Option<ExactRational> {
        self.coefficient(k)
            .map(|a| a * &ExactRational::from(factorial(k as u64)))
    }

    /// The same series cut down to a lower order.
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order {
            return Err(Error::domain(format!(
                "cannot raise truncation order from {} to {order}",
                self.order
            )));
        }
        Ok(Self { order, coefficients: self.coefficients[..=order].to_vec() })
    }

    /// Replaces coefficient `k`; used to build perturbed counterexamples.
    pub fn with_coefficient(mut self, k: usize, value: ExactRational) -> Result<Self> {
        let slot = self.coefficients.get_mut(k).ok_or_else(|| {
            Error::domain(format!("coefficient {k} is beyond order {}", self.order))
        })?;
        *slot = value;
        Ok(self)
    }

    /// Cauchy product, truncated to the lower of the two orders.
    pub fn multiply(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let coefficients = (0..=order)
            .map(|m| {
                (0..=m)
                    .map(|j| &self.coefficients[j] * &other.coefficients[m - j])
                    .sum()
            })
            .collect();
        Self { order, coefficients }
    }

    /// Series of `x ↦ ∫_0^x a(t) dt`; gains one order.
    pub fn antiderivative(&self) -> Self {
        let mut coefficients = Vec::with_capacity(self.order + 2);
        coefficients.push(ExactRational::zero());
        for (k, a) in self.coefficients.iter().enumerate() {
            coefficients.push(a / &ExactRational::from(k as i64 + 1));
        }
        Self { order: self.order + 1, coefficients }
    }

    /// Termwise derivative; loses one order.
    pub fn derivative(&self) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::domain("derivative of an order-0 series has no known coefficients"));
        }
        let coefficients = self.coefficients[1..]
            .iter()
            .enumerate()
            .map(|(k, a)| a * &ExactRational::from(k as i64 + 1))
            .collect();
        Ok(Self { order: self.order - 1, coefficients })
    }

    /// Series of `y ↦ a(n y)`.
    pub fn scale_argument(&self, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("argument scale must be positive"));
        }
        let n = ExactRational::from(n as i64);
        let mut power = ExactRational::one();
        let mut coefficients = Vec::with_capacity(self.order + 1);
        for a in &self.coefficients {
            coefficients.push(a * &power);
            power *= &n;
        }
        Ok(Self { order: self.order, coefficients })
    }

    /// Series of `x ↦ ∫_0^x a(y) b(x - y) dy`.
    ///
    /// Integrating `y^j (x-y)^k` over `[0, x]` gives `j! k! / (j+k+1)! x^{j+k+1}`,
    /// so coefficient `m + 1` is `Σ_{j+k=m} a_j b_k j! k! / (m+1)!`.
    pub fn convolution_integral(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let facts: Vec<ExactRational> =
            (0..=order as u64 + 1).map(|k| ExactRational::from(factorial(k))).collect();
        let mut coefficients = Vec::with_capacity(order + 2);
        coefficients.push(ExactRational::zero());
        for m in 0..=order {
            let s: ExactRational = (0..=m)
                .map(|j| {
                    &(&self.coefficients[j] * &other.coefficients[m - j])
                        * &(&facts[j] * &facts[m - j])
                })
                .sum();
            coefficients.push(s / facts[m + 1].clone());
        }
        Self { order: order + 1, coefficients }
    }
}

/// Maclaurin series of the `Exp(lambda)` density, `λ (-λ)^k / k!`.
pub fn exp_density_series(lambda: &ExactRational, order: usize) -> Result<PowerSeries> {
    if !lambda.is_positive() {
        return Err(Error::domain(format!("exponential rate must be positive, got {lambda}")));
    }
    let mut coefficients = Vec::with_capacity(order + 1);
    let mut term = lambda.clone();
    let neg = -lambda;
    for k in 0..=order {
        coefficients.push(term.clone());
        term = &(&term * &neg) / &ExactRational::from(k as i64 + 1);
    }
    PowerSeries::new(coefficients)
}

/// Series of `G_m = F^m f` with `F` the antiderivative of `f` vanishing at 0.
pub fn g_m_series(f: &PowerSeries, m: usize) -> PowerSeries {
    let cdf = f.antiderivative();
    (0..m).fold(f.clone(), |g, _| cdf.multiply(&g))
}

/// `f(0) (f'(0)/f(0))^k / k!`: the only series whose derivatives at zero
/// follow the geometric chain `f^{(k)}(0) = (f'(0)/f(0))^{k-1} f'(0)`.
pub fn maclaurin_reconstruct(
    f0: &ExactRational,
    f1: &ExactRational,
    order: usize,
) -> Result<PowerSeries> {
    if f0.is_zero() {
        return Err(Error::domain("reconstruction needs f(0) != 0"));
    }
    let ratio = f1.checked_div(f0)?;
    let mut coefficients = Vec::with_capacity(order + 1);
    let mut term = f0.clone();
    for k in 0..=order {
        coefficients.push(term.clone());
        term = &(&term * &ratio) / &ExactRational::from(k as i64 + 1);
    }
    PowerSeries::new(coefficients)
}

fn derivative_ratio(f: &PowerSeries) -> Result<(ExactRational, ExactRational, ExactRational)> {
    let f0 = f.coefficients[0].clone();
    if f0.is_zero() {
        return Err(Error::domain("f(0) = 0: the ratio f'(0)/f(0) is undefined"));
    }
    let f1 = f
        .derivative_at_zero(1)
        .ok_or_else(|| Error::domain("series order must be at least 1"))?;
    let ratio = f1.checked_div(&f0)?;
    Ok((f0, f1, ratio))
}

/// Checks `f^{(k)}(0) = (f'(0)/f(0))^{k-1} f'(0)` for `1 <= k <= k_max`.
pub fn check_lemma3_hypothesis(f: &PowerSeries, k_max: usize) -> Result<IdentityReport> {
    if f.order < k_max.max(1) {
        return Err(Error::domain(format!(
            "series of order {} cannot be checked up to k = {k_max}",
            f.order
        )));
    }
    let (_, f1, ratio) = derivative_ratio(f)?;
    let mut report = IdentityReport::new("derivative_chain", vec![param("k_max", k_max)]);
    chain_checks(f, &f1, &ratio, 1..=k_max, &mut report);
    Ok(report)
}

fn chain_checks(
    f: &PowerSeries,
    f1: &ExactRational,
    ratio: &ExactRational,
    ks: impl Iterator<Item = usize>,
    report: &mut IdentityReport,
) {
    for k in ks {
        let lhs = f.derivative_at_zero(k).expect("within order");
        let rhs = pow_nonneg(ratio, k as u64 - 1) * f1;
        report.record(vec![param("k", k)], lhs, rhs);
    }
}

/// Checks `G_m^{(i)}(0) = (f'(0)/f(0))^{i-m} f(0)^{m+1} H_{m,i}(m+1)` for
/// `0 <= i <= 2m`, after first recording the derivative-chain hypothesis
/// for `1 <= r <= m`. Both kinds of failure land in the same report.
///
/// The chain is needed through `r = m`: coefficient `2m` of `G_m` involves
/// `f^{(m)}(0)`, and a series that follows the chain only up to `m - 1`
/// breaks the formula at `i = 2m`.
pub fn verify_lemma1(f: &PowerSeries, m: usize) -> Result<IdentityReport> {
    if f.order < 2 * m || f.order < 1 {
        return Err(Error::domain(format!(
            "series of order {} is too short for m = {m} (needs {})",
            f.order,
            (2 * m).max(1)
        )));
    }
    let (f0, f1, ratio) = derivative_ratio(f)?;
    let mut report = IdentityReport::new("gm_derivatives", vec![param("m", m)]);

    let mut hypothesis = IdentityReport::new("", vec![]);
    chain_checks(f, &f1, &ratio, 1..=m, &mut hypothesis);
    for d in hypothesis.discrepancies() {
        let mut params = vec![param("hypothesis", "derivative_chain")];
        params.extend(d.parameters.iter().cloned());
        report.record(params, d.lhs.clone(), d.rhs.clone());
    }

    let g = g_m_series(f, m);
    let f0_pow = pow_nonneg(&f0, m as u64 + 1);
    let at = ExactRational::from(m as i64 + 1);
    for i in 0..=2 * m {
        let lhs = g.derivative_at_zero(i).expect("g has order >= 2m");
        let h = hni(m as u64, i as u64, &at);
        let rhs = if h.is_zero() {
            h
        } else {
            rat_pow(&ratio, i as i64 - m as i64)? * &f0_pow * h
        };
        report.record(vec![param("i", i)], lhs, rhs);
    }
    Ok(report)
}

/// First coefficient index where the two sides of a series identity differ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientMismatch {
    pub index: usize,
    pub lhs: ExactRational,
    pub rhs: ExactRational,
}

/// Both sides of `∫_0^x f(ny) G_{n-2}(x-y) dy = f(x) ∫_0^x G_{n-2}(y) dy`
/// as series, truncated to `order`.
pub fn convolution_identity_sides(f: &PowerSeries, n: u64, order: usize) -> Result<(PowerSeries, PowerSeries)> {
    if n < 2 {
        return Err(Error::domain(format!("maxima identity needs n >= 2, got {n}")));
    }
    if order < 1 || f.order < order {
        return Err(Error::domain(format!(
            "comparison order {order} must be in 1..={}",
            f.order
        )));
    }
    let g = g_m_series(f, n as usize - 2);
    let lhs = f.scale_argument(n)?.convolution_integral(&g);
    let rhs = f.multiply(&g.antiderivative());
    Ok((lhs.truncate(order)?, rhs.truncate(order)?))
}

/// `None` when the series identity holds through `order`, otherwise the
/// smallest differing coefficient.
pub fn verify_eq8(f: &PowerSeries, n: u64, order: usize) -> Result<Option<CoefficientMismatch>> {
    let (lhs, rhs) = convolution_identity_sides(f, n, order)?;
    Ok(lhs
        .coefficients
        .into_iter()
        .zip(rhs.coefficients)
        .enumerate()
        .find(|(_, (l, r))| l != r)
        .map(|(index, (lhs, rhs))| CoefficientMismatch { index, lhs, rhs }))
}
