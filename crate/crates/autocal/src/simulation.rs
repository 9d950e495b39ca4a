//! Simulation harness: a gamma-response generative model, replication runs
//! for mean/covariance verification, and contamination power studies.
//!
//! The generative model draws a level from the level distribution and a
//! response from a gamma law with shape 3 * level and rate 3, so the
//! response mean equals the level (the model is auto-calibrated) and the
//! within-level variance is level / 3. Contamination shifts responses
//! additively, everywhere (global) or in one level cohort (local), which
//! breaks calibration by exactly the shift.
//!
//! Replication r of a run with root seed s draws from substream r of s;
//! critical values use seeds derived from s per test. Results are therefore
//! bit-identical across thread counts. Power studies reuse one base sample
//! per replication for every contamination size (a shift only moves cohort
//! response sums), which removes Monte Carlo jitter between grid points.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::accum::Accum;
use crate::asymptotics::{QuantileMethod, QuantileResult};
use crate::data::{IncrementVector, NullModel, Observation, Sample};
use crate::error::Error;
use crate::rng::{derive_seed, RngStream};
use crate::stats::prefix_sums;
use crate::testing::{critical_value, per_test_seed, statistics_all, McConfig, TestId};
use crate::Result;

/// Rate of every within-level gamma law; shapes are 3 * level.
pub const GAMMA_RATE: f64 = 3.0;

/// Serialized form of the gamma model: levels and their probabilities.
#[derive(Serialize, Deserialize)]
pub(crate) struct GammaJson {
    levels: Vec<f64>,
    probs: Vec<f64>,
}

/// Auto-calibrated generative model with gamma responses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GammaJson", into = "GammaJson")]
pub struct GammaLevelModel {
    null: NullModel,
    shapes: Vec<f64>,
}

impl GammaLevelModel {
    /// Levels must be strictly increasing and positive; probabilities
    /// strictly positive, summing to 1.
    pub fn new(levels: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        let variances: Vec<f64> = levels.iter().map(|&l| l / GAMMA_RATE).collect();
        let null = NullModel::from_parts(levels, probs, variances)?;
        if null.levels()[0] <= 0.0 {
            return Err(Error::InvalidModel(
                "gamma levels must be strictly positive".into(),
            ));
        }
        let shapes = null.levels().iter().map(|&l| GAMMA_RATE * l).collect();
        Ok(GammaLevelModel { null, shapes })
    }

    /// The six-level example model: levels 10..15 with probabilities
    /// (0.10, 0.15, 0.25, 0.25, 0.15, 0.10).
    pub fn table_example() -> Self {
        GammaLevelModel::new(
            vec![10.0, 11.0, 12.0, 13.0, 14.0, 15.0],
            vec![0.10, 0.15, 0.25, 0.25, 0.15, 0.10],
        )
        .expect("built-in model is valid")
    }

    /// The null model this generator satisfies: its own levels and
    /// probabilities with variances level / 3.
    pub fn null_model(&self) -> &NullModel {
        &self.null
    }

    pub fn levels(&self) -> &[f64] {
        self.null.levels()
    }

    pub fn probs(&self) -> &[f64] {
        self.null.probs()
    }

    pub fn k(&self) -> usize {
        self.null.k()
    }

    fn cum_tail(&self) -> &[f64] {
        &self.null.cum_probs()[1..]
    }
}

impl TryFrom<GammaJson> for GammaLevelModel {
    type Error = Error;
    fn try_from(j: GammaJson) -> Result<Self> {
        GammaLevelModel::new(j.levels, j.probs)
    }
}

impl From<GammaLevelModel> for GammaJson {
    fn from(m: GammaLevelModel) -> GammaJson {
        GammaJson {
            levels: m.null.levels().to_vec(),
            probs: m.null.probs().to_vec(),
        }
    }
}

/// Gamma variate with explicit domain checks, for callers driving their own
/// streams.
pub fn sample_gamma(shape: f64, rate: f64, rng: &mut RngStream) -> Result<f64> {
    if !(shape > 0.0 && shape.is_finite()) || !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::Domain(format!(
            "gamma needs positive finite shape and rate, got shape = {shape}, rate = {rate}"
        )));
    }
    Ok(rng.gamma(shape, rate))
}

/// Additive response contamination.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Contamination {
    None,
    /// Every response shifted by delta.
    Global { delta: f64 },
    /// Only the cohort of the given level index (0-based) shifted.
    Local { level: usize, delta: f64 },
}

fn check_contamination(k: usize, c: Contamination) -> Result<()> {
    match c {
        Contamination::None => Ok(()),
        Contamination::Global { delta } => {
            if delta.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidInput("contamination shift must be finite".into()))
            }
        }
        Contamination::Local { level, delta } => {
            if !delta.is_finite() {
                return Err(Error::InvalidInput("contamination shift must be finite".into()));
            }
            if level >= k {
                return Err(Error::InvalidInput(format!(
                    "contaminated level index {level} out of range (model has {k} levels)"
                )));
            }
            Ok(())
        }
    }
}

/// One sample of size n from the model under the given contamination, drawn
/// from substream 0 of `seed`.
pub fn simulate_sample(
    model: &GammaLevelModel,
    n: usize,
    contamination: Contamination,
    seed: u64,
) -> Result<Sample> {
    if n == 0 {
        return Err(Error::InvalidInput("sample size must be at least 1".into()));
    }
    check_contamination(model.k(), contamination)?;
    let mut rng = RngStream::new(seed, 0);
    let mut obs = Vec::with_capacity(n);
    for _ in 0..n {
        let k = rng.category(model.cum_tail());
        let mut y = rng.gamma(model.shapes[k], GAMMA_RATE);
        match contamination {
            Contamination::None => {}
            Contamination::Global { delta } => y += delta,
            Contamination::Local { level, delta } if level == k => y += delta,
            Contamination::Local { .. } => {}
        }
        obs.push(Observation { response: y, prediction: model.levels()[k] });
    }
    Sample::new(obs)
}

/// Cohort counts and response sums of one uncontaminated sample, consuming
/// the stream exactly as [`simulate_sample`] does.
fn draw_aggregates(model: &GammaLevelModel, n: usize, rng: &mut RngStream) -> (Vec<usize>, Vec<f64>) {
    let k = model.k();
    let mut counts = vec![0usize; k];
    let mut sums = vec![Accum::default(); k];
    for _ in 0..n {
        let idx = rng.category(model.cum_tail());
        let y = rng.gamma(model.shapes[idx], GAMMA_RATE);
        counts[idx] += 1;
        sums[idx].add(y);
    }
    (counts, sums.into_iter().map(Accum::value).collect())
}

/// Increment values after adding `delta` to the contaminated cohorts of a
/// base sample summarized by (counts, response sums).
fn shifted_values(
    counts: &[usize],
    sums: &[f64],
    levels: &[f64],
    n: usize,
    kind: ContaminationKind,
    delta: f64,
) -> Vec<f64> {
    let nf = n as f64;
    (0..counts.len())
        .map(|k| {
            let c = counts[k] as f64;
            let shift = match kind {
                ContaminationKind::None => 0.0,
                ContaminationKind::Global => delta * c,
                ContaminationKind::Local { level } if level == k => delta * c,
                ContaminationKind::Local { .. } => 0.0,
            };
            (sums[k] + shift - c * levels[k]) / nf
        })
        .collect()
}

/// A critical value as recorded in simulation artifacts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalValueEntry {
    pub test: TestId,
    pub critical_value: f64,
    pub method: QuantileMethod,
    pub mc_standard_error: Option<f64>,
}

impl CriticalValueEntry {
    fn new(test: TestId, q: &QuantileResult) -> Self {
        CriticalValueEntry {
            test,
            critical_value: q.critical_value,
            method: q.method,
            mc_standard_error: q.mc_standard_error(),
        }
    }
}

/// Null rejection bookkeeping for one test across replications.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RejectionEntry {
    pub test: TestId,
    pub rejections: u64,
    pub rate: f64,
}

/// Fixed-width histogram of one statistic across replications.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LabeledHistogram {
    pub label: String,
    pub lo: f64,
    pub hi: f64,
    pub bin_width: f64,
    pub counts: Vec<u64>,
}

fn histogram(label: String, values: &[f64], bins: usize) -> LabeledHistogram {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == lo {
        return LabeledHistogram {
            label,
            lo,
            hi,
            bin_width: 0.0,
            counts: vec![values.len() as u64],
        };
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &v in values {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    LabeledHistogram { label, lo, hi, bin_width: width, counts }
}

/// Summary of `reps` null replications of sample size n: moments of the
/// scaled increments and their walk, per-test rejection rates at the given
/// level, and optional histograms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplicationSummary {
    pub n: usize,
    pub reps: u64,
    pub level: f64,
    pub mc_draws: u64,
    pub seed: u64,
    pub rng_algorithm: String,
    pub critical_values: Vec<CriticalValueEntry>,
    /// Mean over replications of sqrt(n) S.
    pub mean_scaled_increments: Vec<f64>,
    /// Mean over replications of sqrt(n) T.
    pub mean_scaled_walk: Vec<f64>,
    /// Sample covariance (denominator reps - 1) of sqrt(n) S.
    pub cov_scaled_increments: Vec<Vec<f64>>,
    /// Sample covariance of sqrt(n) T.
    pub cov_scaled_walk: Vec<Vec<f64>>,
    pub rejections: Vec<RejectionEntry>,
    /// Histograms of the per-level normalized increments and of the scaled
    /// weighted quadratic statistic; empty when not requested.
    pub histograms: Vec<LabeledHistogram>,
}

fn mean_and_cov(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let reps = rows.len();
    let k = rows[0].len();
    let mut means = vec![0.0; k];
    for (j, m) in means.iter_mut().enumerate() {
        let mut a = Accum::default();
        for r in rows {
            a.add(r[j]);
        }
        *m = a.value() / reps as f64;
    }
    let mut cov = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let mut a = Accum::default();
            for r in rows {
                a.add((r[i] - means[i]) * (r[j] - means[j]));
            }
            let v = a.value() / (reps - 1) as f64;
            cov[i][j] = v;
            cov[j][i] = v;
        }
    }
    (means, cov)
}

/// Run `reps` independent null samples of size n and summarize them.
/// Critical values are computed once from the model; each replication
/// counts its rejections against them.
pub fn replicate_stats(
    model: &GammaLevelModel,
    n: usize,
    reps: u64,
    level: f64,
    mc_draws: u64,
    hist_bins: Option<usize>,
    seed: u64,
) -> Result<ReplicationSummary> {
    if n == 0 {
        return Err(Error::InvalidInput("sample size must be at least 1".into()));
    }
    if reps < 2 {
        return Err(Error::InvalidInput(
            "need at least 2 replications for a covariance".into(),
        ));
    }
    if hist_bins == Some(0) {
        return Err(Error::InvalidInput("histogram needs at least 1 bin".into()));
    }
    let null = model.null_model();
    let mut crit_entries = Vec::with_capacity(7);
    let mut crit_vals = [0.0f64; 7];
    for t in TestId::ALL {
        let q = critical_value(
            t,
            null,
            level,
            &McConfig { draws: mc_draws, seed: per_test_seed(seed, t) },
        )?;
        crit_vals[t.index()] = q.critical_value;
        crit_entries.push(CriticalValueEntry::new(t, &q));
    }

    let rn = (n as f64).sqrt();
    let per_rep: Vec<(Vec<f64>, Vec<f64>, u8, f64)> = (0..reps)
        .into_par_iter()
        .map(|r| -> Result<(Vec<f64>, Vec<f64>, u8, f64)> {
            let mut rng = RngStream::new(seed, r);
            let (counts, sums) = draw_aggregates(model, n, &mut rng);
            let values =
                shifted_values(&counts, &sums, model.levels(), n, ContaminationKind::None, 0.0);
            let inc = IncrementVector::new(values, counts, n)?;
            let stats = statistics_all(&inc, null)?;
            let mut mask = 0u8;
            for (i, &s) in stats.iter().enumerate() {
                if s > crit_vals[i] {
                    mask |= 1 << i;
                }
            }
            let s_row: Vec<f64> = inc.values().iter().map(|&v| rn * v).collect();
            let t_row = prefix_sums(&s_row);
            Ok((s_row, t_row, mask, stats[TestId::T3a.index()]))
        })
        .collect::<Result<Vec<_>>>()?;

    let s_rows: Vec<Vec<f64>> = per_rep.iter().map(|r| r.0.clone()).collect();
    let t_rows: Vec<Vec<f64>> = per_rep.iter().map(|r| r.1.clone()).collect();
    let (mean_s, cov_s) = mean_and_cov(&s_rows);
    let (mean_t, cov_t) = mean_and_cov(&t_rows);

    let rejections = TestId::ALL
        .into_iter()
        .map(|t| {
            let c = per_rep.iter().filter(|r| r.2 & (1 << t.index()) != 0).count() as u64;
            RejectionEntry { test: t, rejections: c, rate: c as f64 / reps as f64 }
        })
        .collect();

    let histograms = match hist_bins {
        None => Vec::new(),
        Some(bins) => {
            let mut hs = Vec::with_capacity(null.k() + 1);
            for k in 0..null.k() {
                let sd = null.weight(k).sqrt();
                let vals: Vec<f64> = s_rows.iter().map(|r| r[k] / sd).collect();
                hs.push(histogram(format!("normalized_increment_{}", k + 1), &vals, bins));
            }
            let v2: Vec<f64> = per_rep.iter().map(|r| r.3).collect();
            hs.push(histogram("v2_weighted_scaled".into(), &v2, bins));
            hs
        }
    };

    Ok(ReplicationSummary {
        n,
        reps,
        level,
        mc_draws,
        seed,
        rng_algorithm: crate::RNG_SPEC.to_string(),
        critical_values: crit_entries,
        mean_scaled_increments: mean_s,
        mean_scaled_walk: mean_t,
        cov_scaled_increments: cov_s,
        cov_scaled_walk: cov_t,
        rejections,
        histograms,
    })
}

/// Contamination family for a power study; the grid supplies the shifts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContaminationKind {
    None,
    Global,
    /// 0-based contaminated level index.
    Local { level: usize },
}

impl ContaminationKind {
    pub fn with_delta(self, delta: f64) -> Contamination {
        match self {
            ContaminationKind::None => Contamination::None,
            ContaminationKind::Global => Contamination::Global { delta },
            ContaminationKind::Local { level } => Contamination::Local { level, delta },
        }
    }
}

/// Where critical values come from in a power study.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum CriticalSource {
    /// Once, from the true generative model (the default).
    TrueModel,
    /// Re-estimated in every replication from a fresh reference sample of
    /// the given size.
    EstimatedPerReplication { reference_n: usize },
}

/// Parameters of a power study.
#[derive(Clone, Debug)]
pub struct PowerConfig {
    pub n: usize,
    pub reps: u64,
    /// Contamination sizes, strictly ascending.
    pub grid: Vec<f64>,
    pub contamination: ContaminationKind,
    pub level: f64,
    pub mc_draws: u64,
    pub seed: u64,
    pub source: CriticalSource,
}

/// Empirical rejection rate of one test at one contamination size.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerPoint {
    pub delta: f64,
    pub rejections: u64,
    pub reps: u64,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerCurve {
    pub test: TestId,
    pub points: Vec<PowerPoint>,
}

/// Result of a power study: one rejection-rate curve per test over the
/// contamination grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerStudy {
    pub n: usize,
    pub reps: u64,
    pub level: f64,
    pub mc_draws: u64,
    pub seed: u64,
    pub contamination: ContaminationKind,
    pub critical_source: CriticalSource,
    pub grid: Vec<f64>,
    pub rng_algorithm: String,
    /// Study-wide critical values; absent when they are re-estimated per
    /// replication.
    pub critical_values: Option<Vec<CriticalValueEntry>>,
    pub curves: Vec<PowerCurve>,
}

/// Rejection-rate curves over a contamination grid. Every replication draws
/// one base sample; each grid shift is applied analytically to its cohort
/// sums, so curves differ across the grid only through the shift itself.
pub fn power_study(model: &GammaLevelModel, cfg: &PowerConfig) -> Result<PowerStudy> {
    if cfg.n == 0 {
        return Err(Error::InvalidInput("sample size must be at least 1".into()));
    }
    if cfg.reps < 100 {
        return Err(Error::InvalidInput(
            "power study needs at least 100 replications".into(),
        ));
    }
    if cfg.grid.is_empty() {
        return Err(Error::InvalidInput("contamination grid is empty".into()));
    }
    for (i, &d) in cfg.grid.iter().enumerate() {
        if !d.is_finite() {
            return Err(Error::InvalidInput(format!("grid value {i} is not finite")));
        }
        if i > 0 && cfg.grid[i - 1] >= d {
            return Err(Error::InvalidInput(format!(
                "grid must be strictly ascending at index {i}"
            )));
        }
    }
    check_contamination(model.k(), cfg.contamination.with_delta(0.0))?;
    if let CriticalSource::EstimatedPerReplication { reference_n } = cfg.source {
        if reference_n < 2 * model.k() {
            return Err(Error::InvalidInput(format!(
                "reference sample size {reference_n} too small to estimate {} level variances",
                model.k()
            )));
        }
    }

    let null = model.null_model();
    let g = cfg.grid.len();

    let (crit_entries, masks): (Option<Vec<CriticalValueEntry>>, Vec<Vec<u8>>) = match cfg.source {
        CriticalSource::TrueModel => {
            let mut entries = Vec::with_capacity(7);
            let mut crit_vals = [0.0f64; 7];
            for t in TestId::ALL {
                let q = critical_value(
                    t,
                    null,
                    cfg.level,
                    &McConfig { draws: cfg.mc_draws, seed: per_test_seed(cfg.seed, t) },
                )?;
                crit_vals[t.index()] = q.critical_value;
                entries.push(CriticalValueEntry::new(t, &q));
            }
            let masks = (0..cfg.reps)
                .into_par_iter()
                .map(|r| -> Result<Vec<u8>> {
                    let mut rng = RngStream::new(cfg.seed, r);
                    let (counts, sums) = draw_aggregates(model, cfg.n, &mut rng);
                    rep_masks(model, null, &counts, &sums, cfg, &crit_vals)
                })
                .collect::<Result<Vec<_>>>()?;
            (Some(entries), masks)
        }
        CriticalSource::EstimatedPerReplication { reference_n } => {
            let masks = (0..cfg.reps)
                .into_par_iter()
                .map(|r| -> Result<Vec<u8>> {
                    let mut rng = RngStream::new(cfg.seed, r);
                    let (counts, sums) = draw_aggregates(model, cfg.n, &mut rng);
                    let mut ref_rng = RngStream::new(cfg.seed, cfg.reps + r);
                    let est = estimate_from_stream(model, reference_n, &mut ref_rng)?;
                    let mut crit_vals = [0.0f64; 7];
                    for t in TestId::ALL {
                        let tag = 7 + r * 7 + t.index() as u64;
                        let q = critical_value(
                            t,
                            &est,
                            cfg.level,
                            &McConfig {
                                draws: cfg.mc_draws,
                                seed: derive_seed(cfg.seed, tag),
                            },
                        )?;
                        crit_vals[t.index()] = q.critical_value;
                    }
                    rep_masks(model, &est, &counts, &sums, cfg, &crit_vals)
                })
                .collect::<Result<Vec<_>>>()?;
            (None, masks)
        }
    };

    let mut counts = vec![[0u64; 7]; g];
    for rep in &masks {
        for (gi, &mask) in rep.iter().enumerate() {
            for (t, c) in counts[gi].iter_mut().enumerate() {
                if mask & (1 << t) != 0 {
                    *c += 1;
                }
            }
        }
    }
    let curves = TestId::ALL
        .into_iter()
        .map(|t| PowerCurve {
            test: t,
            points: cfg
                .grid
                .iter()
                .enumerate()
                .map(|(gi, &delta)| {
                    let c = counts[gi][t.index()];
                    PowerPoint {
                        delta,
                        rejections: c,
                        reps: cfg.reps,
                        rate: c as f64 / cfg.reps as f64,
                    }
                })
                .collect(),
        })
        .collect();

    Ok(PowerStudy {
        n: cfg.n,
        reps: cfg.reps,
        level: cfg.level,
        mc_draws: cfg.mc_draws,
        seed: cfg.seed,
        contamination: cfg.contamination,
        critical_source: cfg.source,
        grid: cfg.grid.clone(),
        rng_algorithm: crate::RNG_SPEC.to_string(),
        critical_values: crit_entries,
        curves,
    })
}

/// Rejection masks of one replication across the grid.
fn rep_masks(
    model: &GammaLevelModel,
    null: &NullModel,
    counts: &[usize],
    sums: &[f64],
    cfg: &PowerConfig,
    crit_vals: &[f64; 7],
) -> Result<Vec<u8>> {
    cfg.grid
        .iter()
        .map(|&delta| {
            let values =
                shifted_values(counts, sums, model.levels(), cfg.n, cfg.contamination, delta);
            let inc = IncrementVector::new(values, counts.to_vec(), cfg.n)?;
            let stats = statistics_all(&inc, null)?;
            let mut mask = 0u8;
            for (i, &s) in stats.iter().enumerate() {
                if s > crit_vals[i] {
                    mask |= 1 << i;
                }
            }
            Ok(mask)
        })
        .collect()
}

/// Null model estimated from a fresh uncontaminated reference sample drawn
/// off the given stream (one-pass moment estimates, denominator n_k - 1).
fn estimate_from_stream(
    model: &GammaLevelModel,
    reference_n: usize,
    rng: &mut RngStream,
) -> Result<NullModel> {
    let k = model.k();
    let mut counts = vec![0usize; k];
    let mut sums = vec![Accum::default(); k];
    let mut sqs = vec![Accum::default(); k];
    for _ in 0..reference_n {
        let idx = rng.category(model.cum_tail());
        let y = rng.gamma(model.shapes[idx], GAMMA_RATE);
        counts[idx] += 1;
        sums[idx].add(y);
        sqs[idx].add(y * y);
    }
    for (idx, &c) in counts.iter().enumerate() {
        if c < 2 {
            return Err(Error::LevelUnderpopulated {
                level: model.levels()[idx],
                count: c,
            });
        }
    }
    let nf = reference_n as f64;
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / nf).collect();
    let variances: Vec<f64> = (0..k)
        .map(|i| {
            let c = counts[i] as f64;
            let mean = sums[i].value() / c;
            ((sqs[i].value() - c * mean * mean) / (c - 1.0)).max(0.0)
        })
        .collect();
    NullModel::new(model.null_model().partition().clone(), probs, variances)
}
