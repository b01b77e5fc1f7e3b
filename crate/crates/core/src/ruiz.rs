//! Alternating binomial sums `H_{n,i}(x)` and the combinatorial identities
//! built on them.
//!
//! `H_{n,i}(x)` is always evaluated from its defining sum. The closed form
//! (`n!` when `i = n`, zero when `i < n`) is only ever a check target here.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{binomial, factorial, rat_pow, ExactRational};

/// `Σ_{j=0}^{n} (-1)^j C(n,j) (x - j)^i`.
pub fn hni(n: u64, i: u64, x: &ExactRational) -> ExactRational {
    let mut acc = ExactRational::zero();
    for j in 0..=n {
        let base = x - &ExactRational::from(j as i64);
        let term = pow_nonneg(&base, i) * ExactRational::from(binomial(n, j));
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= &term;
        }
    }
    acc
}

pub(crate) fn pow_nonneg(base: &ExactRational, e: u64) -> ExactRational {
    rat_pow(base, e as i64).expect("nonnegative exponent")
}

/// One failed instance of an identity, with both sides kept for diagnosis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub parameters: Vec<(String, String)>,
    pub lhs: ExactRational,
    pub rhs: ExactRational,
}

/// Outcome of checking an identity over a parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    identity_name: String,
    parameter_set: Vec<(String, String)>,
    checks: u64,
    discrepancies: Vec<Discrepancy>,
    passed: bool,
}

impl IdentityReport {
    pub fn new(identity_name: impl Into<String>, parameter_set: Vec<(String, String)>) -> Self {
        Self {
            identity_name: identity_name.into(),
            parameter_set,
            checks: 0,
            discrepancies: Vec::new(),
            passed: true,
        }
    }

    /// Records one comparison; only unequal sides are kept.
    pub fn record(&mut self, parameters: Vec<(String, String)>, lhs: ExactRational, rhs: ExactRational) {
        self.checks += 1;
        if lhs != rhs {
            self.discrepancies.push(Discrepancy { parameters, lhs, rhs });
            self.passed = false;
        }
    }

    pub fn merge(&mut self, other: IdentityReport) {
        self.checks += other.checks;
        self.passed &= other.passed;
        self.discrepancies.extend(other.discrepancies);
    }

    pub fn identity_name(&self) -> &str {
        &self.identity_name
    }

    pub fn parameter_set(&self) -> &[(String, String)] {
        &self.parameter_set
    }

    pub fn checks(&self) -> u64 {
        self.checks
    }

    pub fn discrepancies(&self) -> &[Discrepancy] {
        &self.discrepancies
    }

    pub fn passed(&self) -> bool {
        self.passed
    }
}

pub(crate) fn param(name: &str, value: impl ToString) -> (String, String) {
    (name.to_string(), value.to_string())
}

/// Checks `H_{n,i}(x) = n!` for `i = n` and `0` for `i < n`, for every
/// `n <= n_max`, `i <= n` and `x` in `x_values`.
pub fn verify_ruiz(n_max: u64, x_values: &[ExactRational]) -> Result<IdentityReport> {
    if x_values.is_empty() {
        return Err(Error::domain("verify_ruiz needs at least one x value"));
    }
    let xs = x_values.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
    let mut report = IdentityReport::new(
        "ruiz",
        vec![param("n_max", n_max), param("x_values", format!("[{xs}]"))],
    );
    for n in 0..=n_max {
        let n_fact = ExactRational::from(factorial(n));
        for i in 0..=n {
            let expected = if i == n { n_fact.clone() } else { ExactRational::zero() };
            for x in x_values {
                report.record(
                    vec![param("n", n), param("i", i), param("x", x)],
                    hni(n, i, x),
                    expected.clone(),
                );
            }
        }
    }
    Ok(report)
}

/// Both sides of `Σ_{j=0}^m (k+2)^{m-j} H_{k,j}(k+1) = Σ_{j=0}^m C(m+1,j+1) H_{k,j}(k+1)`.
pub fn power_sum_sides(m: u64, k: u64) -> (ExactRational, ExactRational) {
    let at = ExactRational::from(k as i64 + 1);
    let base = ExactRational::from(k as i64 + 2);
    let mut lhs = ExactRational::zero();
    let mut rhs = ExactRational::zero();
    for j in 0..=m {
        let h = hni(k, j, &at);
        lhs += pow_nonneg(&base, m - j) * &h;
        rhs += ExactRational::from(binomial(m + 1, j + 1)) * h;
    }
    (lhs, rhs)
}

/// Signed discrepancy `lhs - rhs` of the `(m, k)` instance; zero when it holds.
pub fn verify_lemma2(m: u64, k: u64) -> ExactRational {
    let (lhs, rhs) = power_sum_sides(m, k);
    lhs - rhs
}

pub fn sweep_power_sum(m_max: u64, k_max: u64) -> IdentityReport {
    let mut report = IdentityReport::new(
        "power_sum",
        vec![param("m_max", m_max), param("k_max", k_max)],
    );
    for m in 0..=m_max {
        for k in 0..=k_max {
            let (lhs, rhs) = power_sum_sides(m, k);
            report.record(vec![param("m", m), param("k", k)], lhs, rhs);
        }
    }
    report
}

/// Both sides of
/// `Σ_{i=n-2}^{2n-4} n^{2n-3-i} H_{n-2,i}(n-1) = Σ_{i=n-2}^{2n-4} C(2n-2,i+1) H_{n-2,i}(n-1)`.
pub fn key_identity_sides(n: u64) -> Result<(ExactRational, ExactRational)> {
    if n < 3 {
        return Err(Error::domain(format!(
            "key identity needs n >= 3 (got {n}); the summation range is empty"
        )));
    }
    let at = ExactRational::from(n as i64 - 1);
    let n_rat = ExactRational::from(n as i64);
    let mut lhs = ExactRational::zero();
    let mut rhs = ExactRational::zero();
    for i in (n - 2)..=(2 * n - 4) {
        let h = hni(n - 2, i, &at);
        lhs += pow_nonneg(&n_rat, 2 * n - 3 - i) * &h;
        rhs += ExactRational::from(binomial(2 * n - 2, i + 1)) * h;
    }
    Ok((lhs, rhs))
}

pub fn verify_theorem_identity(n: u64) -> Result<ExactRational> {
    let (lhs, rhs) = key_identity_sides(n)?;
    Ok(lhs - rhs)
}

pub fn sweep_key_identity(n_max: u64) -> IdentityReport {
    let mut report = IdentityReport::new("key_identity", vec![param("n_max", n_max)]);
    for n in 3..=n_max {
        let (lhs, rhs) = key_identity_sides(n).expect("n >= 3");
        report.record(vec![param("n", n)], lhs, rhs);
    }
    report
}

/// Both sides of `Σ_{j=1}^i C(i,j) H_{k,i-j}(k+1) = H_{k+1,i}(k+2)`, the
/// end-to-end step of the induction behind the `G_m` derivative formula.
pub fn induction_step_sides(k: u64, i: u64) -> (ExactRational, ExactRational) {
    let at = ExactRational::from(k as i64 + 1);
    let lhs = (1..=i)
        .map(|j| ExactRational::from(binomial(i, j)) * hni(k, i - j, &at))
        .sum();
    let rhs = hni(k + 1, i, &ExactRational::from(k as i64 + 2));
    (lhs, rhs)
}

pub fn sweep_induction_step(k_max: u64, i_max: u64) -> IdentityReport {
    let mut report = IdentityReport::new(
        "induction_step",
        vec![param("k_max", k_max), param("i_max", i_max)],
    );
    for k in 0..=k_max {
        for i in 0..=i_max {
            let (lhs, rhs) = induction_step_sides(k, i);
            report.record(vec![param("k", k), param("i", i)], lhs, rhs);
        }
    }
    report
}
