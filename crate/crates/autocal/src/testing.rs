//! The seven auto-calibration tests: statistics, critical values, p-values,
//! and outcome records.
//!
//! Scaling lives here: statistics multiply the unscaled quantities from
//! [`crate::stats`] by sqrt(n) (max-type tests) or n (quadratic tests), so
//! they can be compared directly against the limit-law quantiles from
//! [`crate::asymptotics`]. A test rejects iff statistic > critical value,
//! strictly.
//!
//! Reproducibility: one root seed covers a whole report. Each test gets its
//! own derived seed ([`per_test_seed`]), used for both its critical value
//! and its p-value, so the two are consistent draw for draw.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{McMetadata, NullDistributionSpec, QuantileMethod, QuantileResult};
use crate::data::{IncrementVector, NullModel, Sample};
use crate::error::Error;
use crate::rng::derive_seed;
use crate::stats::{
    chi2_statistic, increments, normalized_increments, prefix_sums, suffix_sums, v2_unweighted,
    v2_weighted,
};
use crate::Result;

/// Identifiers of the seven tests, in canonical report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TestId {
    /// sqrt(n) max_k |S_k| against the joint scaled-normal max.
    #[serde(rename = "1a")]
    T1a,
    /// sqrt(n) max_k |S_k| / sqrt(w_k) against the max of K iid |Z|.
    #[serde(rename = "1b")]
    T1b,
    /// sqrt(n) max_k |T_k| (prefix walk) against the random-walk max.
    #[serde(rename = "2a")]
    T2a,
    /// sqrt(n) max_k |T~_k| (suffix walk) against the mirrored walk max.
    #[serde(rename = "2b")]
    T2b,
    /// n sum_k (1 - A_{k-1}) S_k^2 against a weighted chi-square sum.
    #[serde(rename = "3a")]
    T3a,
    /// n sum_k S_k^2 against a weighted chi-square sum.
    #[serde(rename = "3b")]
    T3b,
    /// n sum_k S_k^2 / w_k against chi-square with K degrees of freedom.
    #[serde(rename = "3c")]
    T3c,
}

impl TestId {
    pub const ALL: [TestId; 7] = [
        TestId::T1a,
        TestId::T1b,
        TestId::T2a,
        TestId::T2b,
        TestId::T3a,
        TestId::T3b,
        TestId::T3c,
    ];

    /// Position in [`TestId::ALL`]; also the seed-derivation tag.
    pub fn index(self) -> usize {
        match self {
            TestId::T1a => 0,
            TestId::T1b => 1,
            TestId::T2a => 2,
            TestId::T2b => 3,
            TestId::T3a => 4,
            TestId::T3b => 5,
            TestId::T3c => 6,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            TestId::T1a => "1a",
            TestId::T1b => "1b",
            TestId::T2a => "2a",
            TestId::T2b => "2b",
            TestId::T3a => "3a",
            TestId::T3b => "3b",
            TestId::T3c => "3c",
        }
    }
}

impl std::fmt::Display for TestId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

impl std::str::FromStr for TestId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let t = t.strip_prefix('t').unwrap_or(&t);
        TestId::ALL
            .into_iter()
            .find(|id| id.code() == t)
            .ok_or_else(|| Error::InvalidInput(format!("unknown test id {s:?}")))
    }
}

/// Monte Carlo budget for one report: `seed` is the root from which each
/// test derives its own stream seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct McConfig {
    pub draws: u64,
    pub seed: u64,
}

/// Seed used for one test's null-distribution draws under a root seed.
pub fn per_test_seed(root: u64, test: TestId) -> u64 {
    derive_seed(root, test.index() as u64)
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
}

/// The scaled test statistic for one test.
pub fn statistic(test: TestId, inc: &IncrementVector, model: &NullModel) -> Result<f64> {
    if inc.k() != model.k() {
        return Err(Error::DimensionMismatch { expected: model.k(), actual: inc.k() });
    }
    let n = inc.n() as f64;
    let rn = n.sqrt();
    Ok(match test {
        TestId::T1a => rn * max_abs(inc.values()),
        TestId::T1b => rn * max_abs(&normalized_increments(inc, model)?),
        TestId::T2a => rn * max_abs(&prefix_sums(inc.values())),
        TestId::T2b => rn * max_abs(&suffix_sums(inc.values())),
        TestId::T3a => n * v2_weighted(inc, model)?,
        TestId::T3b => n * v2_unweighted(inc),
        TestId::T3c => chi2_statistic(inc, model)?,
    })
}

/// All seven statistics in [`TestId::ALL`] order. Fails on the first test
/// whose statistic is undefined for this model.
pub fn statistics_all(inc: &IncrementVector, model: &NullModel) -> Result<[f64; 7]> {
    let mut out = [0.0; 7];
    for (i, t) in TestId::ALL.into_iter().enumerate() {
        out[i] = statistic(t, inc, model)?;
    }
    Ok(out)
}

/// Critical value of a test at a significance level. `mc.seed` is used as
/// given; derive per-test seeds first when sharing one root across tests.
pub fn critical_value(
    test: TestId,
    model: &NullModel,
    level: f64,
    mc: &McConfig,
) -> Result<QuantileResult> {
    NullDistributionSpec::new(test, model, mc.draws, mc.seed)?.quantile(level)
}

/// Outcome of one test on one sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestOutcome {
    pub test: TestId,
    pub statistic: f64,
    pub critical_value: f64,
    pub p_value: f64,
    pub reject: bool,
    pub level: f64,
    pub method: QuantileMethod,
    pub mc: Option<McMetadata>,
    /// Digest of the null model the outcome was computed under.
    pub model_digest: String,
}

/// Run one test on a sample at the given level.
pub fn run_test(
    test: TestId,
    sample: &Sample,
    model: &NullModel,
    level: f64,
    mc: &McConfig,
) -> Result<TestOutcome> {
    let inc = increments(sample, model.partition())?;
    run_test_on_increments(test, &inc, model, level, mc)
}

fn run_test_on_increments(
    test: TestId,
    inc: &IncrementVector,
    model: &NullModel,
    level: f64,
    mc: &McConfig,
) -> Result<TestOutcome> {
    let seed = per_test_seed(mc.seed, test);
    let spec = NullDistributionSpec::new(test, model, mc.draws, seed)?;
    let stat = statistic(test, inc, model)?;
    let q = spec.quantile(level)?;
    let p = spec.p_value(stat)?;
    Ok(TestOutcome {
        test,
        statistic: stat,
        critical_value: q.critical_value,
        p_value: p,
        reject: stat > q.critical_value,
        level,
        method: q.method,
        mc: q.mc,
        model_digest: model.digest(),
    })
}

/// Run all seven tests on one sample. The sample-model pairing is validated
/// once; after that each test succeeds or fails on its own, so a model that
/// is degenerate for the normalized tests still yields the others.
pub fn run_all(
    sample: &Sample,
    model: &NullModel,
    level: f64,
    mc: &McConfig,
) -> Result<Vec<(TestId, Result<TestOutcome>)>> {
    let inc = increments(sample, model.partition())?;
    Ok(TestId::ALL
        .into_iter()
        .map(|t| (t, run_test_on_increments(t, &inc, model, level, mc)))
        .collect())
}
