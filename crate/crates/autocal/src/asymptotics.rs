//! Null distributions of the test statistics: closed-form quantiles where
//! the limit law allows it, reproducible Monte Carlo otherwise.
//!
//! Limit laws under auto-calibration, with w_k = p_k tau_k^2 the variance
//! of one walk step:
//!
//! - `T1a`: max_k |sqrt(w_k) Z_k|, quantile by root search on the product
//!   of normal cdfs;
//! - `T1b`: max of K iid |Z|, closed form via the normal quantile;
//! - `T2a`/`T2b`: running maximum of the |Gaussian random walk| with step
//!   variances w_k (suffix order when mirrored), Monte Carlo;
//! - `T3a`/`T3b`: weighted sums of independent chi-square(1), Monte Carlo;
//! - `T3c`: chi-square with K degrees of freedom.
//!
//! Monte Carlo draws come from [`crate::rng::RngStream`] in fixed batches of
//! 16384, one substream per batch, flattened in batch order; the result is
//! bit-identical for a given seed regardless of thread count. Critical
//! values use the nearest-rank quantile of the sorted draws, p-values the
//! add-one tail fraction (1 + #{draws >= stat}) / (draws + 1), so a p-value
//! is never exactly zero.

use rayon::prelude::*;
use serde::Serialize;

use crate::data::NullModel;
use crate::error::Error;
use crate::rng::RngStream;
use crate::stats::prefix_sums;
use crate::testing::TestId;
use crate::Result;

pub use crate::special::{chi2_cdf, chi2_quantile, chi2_sf, normal_cdf, normal_quantile};

/// Minimum Monte Carlo sample size accepted for quantiles and p-values.
pub const MIN_MC_DRAWS: u64 = 10_000;

const MC_BATCH: u64 = 16_384;

/// How a critical value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantileMethod {
    ClosedForm,
    RootSearch,
    MonteCarlo,
}

/// Provenance of a Monte Carlo quantile.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McMetadata {
    pub draws: u64,
    pub seed: u64,
    /// Half-width of the order-statistic bracket around the quantile rank,
    /// an estimate of the Monte Carlo standard error of the critical value.
    pub standard_error: f64,
    pub algorithm: String,
}

/// A critical value at a significance level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuantileResult {
    pub critical_value: f64,
    pub level: f64,
    pub method: QuantileMethod,
    pub mc: Option<McMetadata>,
}

impl QuantileResult {
    pub fn mc_standard_error(&self) -> Option<f64> {
        self.mc.as_ref().map(|m| m.standard_error)
    }
}

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!(
            "significance level must lie in (0,1), got {level}"
        )));
    }
    Ok(())
}

fn check_draws(mc_draws: u64) -> Result<()> {
    if mc_draws < MIN_MC_DRAWS {
        return Err(Error::InvalidInput(format!(
            "mc_draws must be at least {MIN_MC_DRAWS}, got {mc_draws}"
        )));
    }
    Ok(())
}

/// Step standard deviations sqrt(p_k tau_k^2); error if any level is
/// degenerate.
fn strict_step_sds(model: &NullModel) -> Result<Vec<f64>> {
    (0..model.k())
        .map(|k| {
            let w = model.weight(k);
            if w <= 0.0 {
                Err(Error::DegenerateLevel { index: k })
            } else {
                Ok(w.sqrt())
            }
        })
        .collect()
}

/// Step standard deviations allowing zero-variance levels, but not all zero.
fn lenient_step_sds(model: &NullModel) -> Result<Vec<f64>> {
    let sds: Vec<f64> = (0..model.k()).map(|k| model.weight(k).sqrt()).collect();
    if sds.iter().all(|&s| s == 0.0) {
        return Err(Error::DegenerateModel);
    }
    Ok(sds)
}

/// Critical value for the joint max of |sqrt(w_k) Z_k|: the root s of
/// prod_k (2 Phi(s / sqrt(w_k)) - 1) = 1 - level.
pub fn quantile_test1a(model: &NullModel, level: f64) -> Result<QuantileResult> {
    check_level(level)?;
    let sds = strict_step_sds(model)?;
    let target = 1.0 - level;
    let f = |s: f64| {
        sds.iter()
            .map(|&sd| 2.0 * normal_cdf(s / sd) - 1.0)
            .product::<f64>()
    };
    let mut hi = 1.0f64;
    let mut grow = 0;
    while f(hi) < target {
        hi *= 2.0;
        grow += 1;
        if grow > 2000 {
            return Err(Error::Numerical("max-statistic quantile bracket failed".into()));
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(QuantileResult {
        critical_value: 0.5 * (lo + hi),
        level,
        method: QuantileMethod::RootSearch,
        mc: None,
    })
}

/// Critical value for the max of k iid |Z|: the normal quantile at
/// (1 + (1 - level)^(1/k)) / 2.
pub fn quantile_test1b(k: usize, level: f64) -> Result<QuantileResult> {
    check_level(level)?;
    if k == 0 {
        return Err(Error::InvalidInput("need at least one level".into()));
    }
    let q = (1.0 + (1.0 - level).powf(1.0 / k as f64)) / 2.0;
    Ok(QuantileResult {
        critical_value: normal_quantile(q)?,
        level,
        method: QuantileMethod::ClosedForm,
        mc: None,
    })
}

/// Monte Carlo critical value for the running maximum of the absolute
/// Gaussian random walk with step variances w_k (reversed when `mirrored`).
pub fn rw_max_quantile(
    model: &NullModel,
    level: f64,
    mirrored: bool,
    mc_draws: u64,
    seed: u64,
) -> Result<QuantileResult> {
    check_level(level)?;
    check_draws(mc_draws)?;
    let mut sds = lenient_step_sds(model)?;
    if mirrored {
        sds.reverse();
    }
    let (critical_value, standard_error) =
        mc_quantile(mc_draws, seed, level, |rng| walk_max(&sds, rng));
    Ok(mc_result(critical_value, level, mc_draws, seed, standard_error))
}

/// Monte Carlo critical value for sum_k weights_k * ChiSquare_1.
pub fn weighted_chisq_quantile(
    weights: &[f64],
    level: f64,
    mc_draws: u64,
    seed: u64,
) -> Result<QuantileResult> {
    check_level(level)?;
    check_draws(mc_draws)?;
    validate_weights(weights)?;
    let weights = weights.to_vec();
    let (critical_value, standard_error) =
        mc_quantile(mc_draws, seed, level, |rng| chisq_sum(&weights, rng));
    Ok(mc_result(critical_value, level, mc_draws, seed, standard_error))
}

fn validate_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidInput("need at least one weight".into()));
    }
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidInput(format!(
                "weight {i} must be finite and nonnegative, got {w}"
            )));
        }
    }
    if weights.iter().all(|&w| w == 0.0) {
        return Err(Error::DegenerateModel);
    }
    Ok(())
}

fn mc_result(critical_value: f64, level: f64, draws: u64, seed: u64, se: f64) -> QuantileResult {
    QuantileResult {
        critical_value,
        level,
        method: QuantileMethod::MonteCarlo,
        mc: Some(McMetadata {
            draws,
            seed,
            standard_error: se,
            algorithm: crate::RNG_SPEC.to_string(),
        }),
    }
}

fn walk_max(sds: &[f64], rng: &mut RngStream) -> f64 {
    let mut acc = 0.0;
    let mut m = 0.0f64;
    for &sd in sds {
        acc += sd * rng.normal();
        m = m.max(acc.abs());
    }
    m
}

fn chisq_sum(weights: &[f64], rng: &mut RngStream) -> f64 {
    let mut acc = 0.0;
    for &w in weights {
        let z = rng.normal();
        acc += w * z * z;
    }
    acc
}

/// Draws in batch order: batch b is substream b of `seed`, so the vector is
/// identical whatever the thread count.
fn mc_values<F>(draws: u64, seed: u64, f: F) -> Vec<f64>
where
    F: Fn(&mut RngStream) -> f64 + Sync,
{
    let batches = draws.div_ceil(MC_BATCH);
    let chunks: Vec<Vec<f64>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = RngStream::new(seed, b);
            let lo = b * MC_BATCH;
            let hi = (lo + MC_BATCH).min(draws);
            (lo..hi).map(|_| f(&mut rng)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(draws as usize);
    for c in chunks {
        out.extend(c);
    }
    out
}

/// Nearest-rank upper quantile of the sampled law and its standard error
/// from an order-statistic bracket of half-width sqrt(draws level (1-level)).
fn mc_quantile<F>(draws: u64, seed: u64, level: f64, f: F) -> (f64, f64)
where
    F: Fn(&mut RngStream) -> f64 + Sync,
{
    let mut v = mc_values(draws, seed, f);
    v.sort_unstable_by(f64::total_cmp);
    let n = v.len();
    let rank = (((1.0 - level) * n as f64).ceil() as usize).clamp(1, n);
    let idx = rank - 1;
    let d = ((n as f64 * level * (1.0 - level)).sqrt().ceil()) as usize;
    let lo = idx.saturating_sub(d);
    let hi = (idx + d).min(n - 1);
    let se = 0.5 * (v[hi] - v[lo]);
    (v[idx], se)
}

fn mc_tail_count<F>(draws: u64, seed: u64, stat: f64, f: F) -> u64
where
    F: Fn(&mut RngStream) -> f64 + Sync,
{
    let batches = draws.div_ceil(MC_BATCH);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = RngStream::new(seed, b);
            let lo = b * MC_BATCH;
            let hi = (lo + MC_BATCH).min(draws);
            (lo..hi).filter(|_| f(&mut rng) >= stat).count() as u64
        })
        .sum()
}

/// The limit law a test statistic is compared against.
#[derive(Clone, Debug, PartialEq)]
pub enum NullLaw {
    /// max_k |sqrt(w_k) Z_k| (test T1a).
    ScaledMaxAbsNormal { step_sds: Vec<f64> },
    /// max of k iid |Z| (test T1b).
    MaxAbsNormalPower { k: usize },
    /// Running max of the absolute Gaussian walk (tests T2a, T2b).
    RandomWalkMax { step_sds: Vec<f64>, mirrored: bool },
    /// sum_k weights_k ChiSquare_1 (tests T3a, T3b).
    WeightedChiSquare { weights: Vec<f64> },
    /// ChiSquare with `dof` degrees of freedom (test T3c).
    ChiSquare { dof: usize },
}

/// A test's null distribution together with the Monte Carlo budget used to
/// interrogate it. The seed is used as given; callers wanting per-test seeds
/// derive them first (see [`crate::testing::per_test_seed`]).
#[derive(Clone, Debug, PartialEq)]
pub struct NullDistributionSpec {
    pub test: TestId,
    pub law: NullLaw,
    pub mc_draws: u64,
    pub seed: u64,
}

impl NullDistributionSpec {
    pub fn new(test: TestId, model: &NullModel, mc_draws: u64, seed: u64) -> Result<Self> {
        let law = match test {
            TestId::T1a => NullLaw::ScaledMaxAbsNormal { step_sds: strict_step_sds(model)? },
            TestId::T1b => {
                strict_step_sds(model)?;
                NullLaw::MaxAbsNormalPower { k: model.k() }
            }
            TestId::T2a => NullLaw::RandomWalkMax {
                step_sds: lenient_step_sds(model)?,
                mirrored: false,
            },
            TestId::T2b => NullLaw::RandomWalkMax {
                step_sds: lenient_step_sds(model)?,
                mirrored: true,
            },
            TestId::T3a => {
                let cum = model.cum_probs();
                let weights: Vec<f64> =
                    (0..model.k()).map(|k| (1.0 - cum[k]) * model.weight(k)).collect();
                validate_weights(&weights)?;
                NullLaw::WeightedChiSquare { weights }
            }
            TestId::T3b => {
                let weights = model.weights();
                validate_weights(&weights)?;
                NullLaw::WeightedChiSquare { weights }
            }
            TestId::T3c => {
                strict_step_sds(model)?;
                NullLaw::ChiSquare { dof: model.k() }
            }
        };
        if matches!(law, NullLaw::RandomWalkMax { .. } | NullLaw::WeightedChiSquare { .. }) {
            check_draws(mc_draws)?;
        }
        Ok(NullDistributionSpec { test, law, mc_draws, seed })
    }

    /// Upper-tail critical value at `level`.
    pub fn quantile(&self, level: f64) -> Result<QuantileResult> {
        check_level(level)?;
        match &self.law {
            NullLaw::ScaledMaxAbsNormal { step_sds } => {
                let target = 1.0 - level;
                let f = |s: f64| {
                    step_sds
                        .iter()
                        .map(|&sd| 2.0 * normal_cdf(s / sd) - 1.0)
                        .product::<f64>()
                };
                let mut hi = 1.0f64;
                let mut grow = 0;
                while f(hi) < target {
                    hi *= 2.0;
                    grow += 1;
                    if grow > 2000 {
                        return Err(Error::Numerical(
                            "max-statistic quantile bracket failed".into(),
                        ));
                    }
                }
                let mut lo = 0.0f64;
                for _ in 0..2000 {
                    let mid = 0.5 * (lo + hi);
                    if f(mid) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 1e-13 * hi {
                        break;
                    }
                }
                Ok(QuantileResult {
                    critical_value: 0.5 * (lo + hi),
                    level,
                    method: QuantileMethod::RootSearch,
                    mc: None,
                })
            }
            NullLaw::MaxAbsNormalPower { k } => quantile_test1b(*k, level),
            NullLaw::RandomWalkMax { step_sds, .. } => {
                let sds = step_sds.clone();
                let (cv, se) = mc_quantile(self.mc_draws, self.seed, level, |rng| {
                    walk_max(&sds, rng)
                });
                Ok(mc_result(cv, level, self.mc_draws, self.seed, se))
            }
            NullLaw::WeightedChiSquare { weights } => {
                let w = weights.clone();
                let (cv, se) =
                    mc_quantile(self.mc_draws, self.seed, level, |rng| chisq_sum(&w, rng));
                Ok(mc_result(cv, level, self.mc_draws, self.seed, se))
            }
            NullLaw::ChiSquare { dof } => Ok(QuantileResult {
                critical_value: chi2_quantile(*dof, 1.0 - level)?,
                level,
                method: QuantileMethod::ClosedForm,
                mc: None,
            }),
        }
    }

    /// Upper-tail probability of `statistic` under the null; always in (0, 1].
    pub fn p_value(&self, statistic: f64) -> Result<f64> {
        let p = match &self.law {
            NullLaw::ScaledMaxAbsNormal { step_sds } => {
                if statistic <= 0.0 {
                    1.0
                } else {
                    let prod: f64 = step_sds
                        .iter()
                        .map(|&sd| 2.0 * normal_cdf(statistic / sd) - 1.0)
                        .product();
                    1.0 - prod.clamp(0.0, 1.0)
                }
            }
            NullLaw::MaxAbsNormalPower { k } => {
                if statistic <= 0.0 {
                    1.0
                } else {
                    let base = (2.0 * normal_cdf(statistic) - 1.0).clamp(0.0, 1.0);
                    1.0 - base.powi(*k as i32)
                }
            }
            NullLaw::RandomWalkMax { step_sds, .. } => {
                let sds = step_sds.clone();
                let cnt = mc_tail_count(self.mc_draws, self.seed, statistic, |rng| {
                    walk_max(&sds, rng)
                });
                return Ok((1 + cnt) as f64 / (self.mc_draws + 1) as f64);
            }
            NullLaw::WeightedChiSquare { weights } => {
                let w = weights.clone();
                let cnt = mc_tail_count(self.mc_draws, self.seed, statistic, |rng| {
                    chisq_sum(&w, rng)
                });
                return Ok((1 + cnt) as f64 / (self.mc_draws + 1) as f64);
            }
            NullLaw::ChiSquare { dof } => chi2_sf(*dof, statistic)?,
        };
        Ok(p.max(f64::MIN_POSITIVE))
    }
}

/// Upper-tail p-value of a (scaled) statistic under its test's null law.
pub fn p_value(
    test: TestId,
    statistic: f64,
    model: &NullModel,
    mc_draws: u64,
    seed: u64,
) -> Result<f64> {
    NullDistributionSpec::new(test, model, mc_draws, seed)?.p_value(statistic)
}

/// Which limiting covariance to report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CovKind {
    /// Cov of sqrt(n) S: diagonal with entries w_k.
    Increments,
    /// Cov of sqrt(n) T: entry (i, j) is the walk variance at min(i, j).
    RandomWalk,
}

/// Limiting covariance matrix of the scaled increments or their walk.
pub fn asymptotic_cov(model: &NullModel, kind: CovKind) -> Vec<Vec<f64>> {
    let k = model.k();
    let w = model.weights();
    match kind {
        CovKind::Increments => (0..k)
            .map(|i| (0..k).map(|j| if i == j { w[i] } else { 0.0 }).collect())
            .collect(),
        CovKind::RandomWalk => {
            let c = prefix_sums(&w);
            (0..k)
                .map(|i| (0..k).map(|j| c[i.min(j)]).collect())
                .collect()
        }
    }
}
