//! Sample statistics for calibration testing.
//!
//! The central object is the increment vector S: for each level cohort k,
//! S_k is the sample mean of (response - prediction) restricted to that
//! cohort. Under auto-calibration every cohort pays for itself, so S is
//! centered at zero. Everything here is unscaled by design; the testing
//! module applies sqrt(n) or n when it builds statistics. The one exception
//! is `chi2_statistic`, which is the classical quadratic form and includes
//! its factor n.

use crate::accum::{self, Accum};
use crate::data::{IncrementVector, LevelPartition, NullModel, Observation, Sample};
use crate::error::Error;
use crate::Result;

/// Distinct prediction values of a sample, in increasing order, with the
/// number of observations at each.
pub fn build_partition(sample: &Sample) -> Result<(LevelPartition, Vec<usize>)> {
    let mut preds: Vec<f64> = sample.observations().iter().map(|o| o.prediction).collect();
    preds.sort_unstable_by(f64::total_cmp);
    let mut levels = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for p in preds {
        match levels.last() {
            Some(&last) if last == p => *counts.last_mut().unwrap() += 1,
            _ => {
                levels.push(p);
                counts.push(1);
            }
        }
    }
    Ok((LevelPartition::new(levels)?, counts))
}

/// Null model estimated from an independent reference sample: empirical
/// level probabilities and within-cohort response variances (denominator
/// n_k - 1). Every level needs at least two observations.
pub fn estimate_null_model(reference: &Sample, partition: &LevelPartition) -> Result<NullModel> {
    let k = partition.k();
    let mut counts = vec![0usize; k];
    let mut sums = vec![Accum::default(); k];
    for (i, o) in reference.observations().iter().enumerate() {
        let idx = partition
            .find(o.prediction)
            .ok_or(Error::UnknownLevel { index: i, prediction: o.prediction })?;
        counts[idx] += 1;
        sums[idx].add(o.response);
    }
    for (idx, &c) in counts.iter().enumerate() {
        if c < 2 {
            return Err(Error::LevelUnderpopulated {
                level: partition.levels()[idx],
                count: c,
            });
        }
    }
    let means: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s.value() / c as f64)
        .collect();
    let mut ssq = vec![Accum::default(); k];
    for o in reference.observations() {
        let idx = partition.find(o.prediction).unwrap();
        let d = o.response - means[idx];
        ssq[idx].add(d * d);
    }
    let n = reference.n() as f64;
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    let variances: Vec<f64> = ssq
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s.value() / (c - 1) as f64)
        .collect();
    NullModel::new(partition.clone(), probs, variances)
}

/// The increment vector of a sample under a partition. Levels absent from
/// the sample get value 0 with count 0; predictions matching no level are
/// an error.
pub fn increments(sample: &Sample, partition: &LevelPartition) -> Result<IncrementVector> {
    let k = partition.k();
    let mut sums = vec![Accum::default(); k];
    let mut counts = vec![0usize; k];
    for (i, o) in sample.observations().iter().enumerate() {
        let idx = partition
            .find(o.prediction)
            .ok_or(Error::UnknownLevel { index: i, prediction: o.prediction })?;
        sums[idx].add(o.response - o.prediction);
        counts[idx] += 1;
    }
    let n = sample.n();
    let nf = n as f64;
    let values: Vec<f64> = sums.iter().map(|s| s.value() / nf).collect();
    IncrementVector::new(values, counts, n)
}

/// Increments divided by the null standard deviation of one walk step,
/// sqrt(p_k * tau_k^2). Unscaled by sample size.
pub fn normalized_increments(inc: &IncrementVector, model: &NullModel) -> Result<Vec<f64>> {
    check_dims(inc, model)?;
    (0..inc.k())
        .map(|k| {
            let w = model.weight(k);
            if w <= 0.0 {
                return Err(Error::DegenerateLevel { index: k });
            }
            Ok(inc.values()[k] / w.sqrt())
        })
        .collect()
}

/// Running (compensated) prefix sums: out[k] = v[0] + ... + v[k].
pub fn prefix_sums(values: &[f64]) -> Vec<f64> {
    let mut acc = Accum::default();
    values
        .iter()
        .map(|&v| {
            acc.add(v);
            acc.value()
        })
        .collect()
}

/// Running suffix sums: out[k] = v[k] + ... + v[K-1].
pub fn suffix_sums(values: &[f64]) -> Vec<f64> {
    let mut acc = Accum::default();
    let mut out = vec![0.0; values.len()];
    for (k, &v) in values.iter().enumerate().rev() {
        acc.add(v);
        out[k] = acc.value();
    }
    out
}

/// Cumulative comparison curves for a sample under a null model.
///
/// `t` is the random walk of increments (prefix sums), `t_mirrored` the walk
/// started from the top level (suffix sums). `u` compares the response
/// concentration curve with the prediction concentration curve at each
/// level, and `abc` is the (unscaled) signed area between the calibration
/// curve and its null counterpart. `u` and `abc` need strictly positive
/// mean response and nonzero mean prediction; when that fails they are
/// `None` while the walks are still returned.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveStats {
    pub t: Vec<f64>,
    pub t_mirrored: Vec<f64>,
    pub u: Option<Vec<f64>>,
    pub abc: Option<f64>,
}

pub fn curve_stats(inc: &IncrementVector, sample: &Sample, model: &NullModel) -> Result<CurveStats> {
    check_dims(inc, model)?;
    let k = model.k();
    let part = model.partition();
    let mut y_sums = vec![Accum::default(); k];
    let mut counts = vec![0usize; k];
    for (i, o) in sample.observations().iter().enumerate() {
        let idx = part
            .find(o.prediction)
            .ok_or(Error::UnknownLevel { index: i, prediction: o.prediction })?;
        y_sums[idx].add(o.response);
        counts[idx] += 1;
    }
    if counts != inc.counts() {
        return Err(Error::InvalidInput(
            "increment vector does not match the sample it was paired with".into(),
        ));
    }

    let t = prefix_sums(inc.values());
    let t_mirrored = suffix_sums(inc.values());

    // Prefix totals of responses and of predictions, in level order.
    let mut y_pref = Vec::with_capacity(k);
    let mut p_pref = Vec::with_capacity(k);
    let mut y_acc = Accum::default();
    let mut p_acc = Accum::default();
    for idx in 0..k {
        y_acc.add(y_sums[idx].value());
        p_acc.add(part.levels()[idx] * counts[idx] as f64);
        y_pref.push(y_acc.value());
        p_pref.push(p_acc.value());
    }
    let y_total = y_pref[k - 1];
    let p_total = p_pref[k - 1];

    let (u, abc) = if y_total > 0.0 && p_total != 0.0 {
        let u: Vec<f64> = (0..k)
            .map(|idx| y_pref[idx] / y_total - p_pref[idx] / p_total)
            .collect();
        let cum = model.cum_probs();
        let mut a = Accum::default();
        for idx in 0..k.saturating_sub(1) {
            a.add((1.0 - cum[idx + 1]) * inc.values()[idx]);
        }
        (Some(u), Some(a.value()))
    } else {
        (None, None)
    };

    Ok(CurveStats { t, t_mirrored, u, abc })
}

/// Weighted quadratic form sum_k (1 - A_{k-1}) S_k^2 where A is the
/// cumulative level probability below k. Unscaled by sample size.
pub fn v2_weighted(inc: &IncrementVector, model: &NullModel) -> Result<f64> {
    check_dims(inc, model)?;
    let cum = model.cum_probs();
    let mut a = Accum::default();
    for (k, &s) in inc.values().iter().enumerate() {
        a.add((1.0 - cum[k]) * s * s);
    }
    Ok(a.value())
}

/// Unweighted quadratic form sum_k S_k^2. Unscaled by sample size.
pub fn v2_unweighted(inc: &IncrementVector) -> f64 {
    let mut a = Accum::default();
    for &s in inc.values() {
        a.add(s * s);
    }
    a.value()
}

/// Classical chi-square statistic n * sum_k S_k^2 / (p_k tau_k^2),
/// including the factor n.
pub fn chi2_statistic(inc: &IncrementVector, model: &NullModel) -> Result<f64> {
    check_dims(inc, model)?;
    let mut a = Accum::default();
    for (k, &s) in inc.values().iter().enumerate() {
        let w = model.weight(k);
        if w <= 0.0 {
            return Err(Error::DegenerateLevel { index: k });
        }
        a.add(s * s / w);
    }
    Ok(inc.n() as f64 * a.value())
}

/// Quantile-bin a sample with a continuous prediction range into at most
/// `k` cohorts. Boundaries are nearest-rank k-quantiles of the predictions
/// (duplicates merged), each observation's prediction is replaced by its
/// bin's mean prediction, and those means become the new levels. The
/// overall mean prediction is preserved up to rounding.
pub fn bin_by_quantiles(sample: &Sample, k: usize) -> Result<(Sample, LevelPartition)> {
    let n = sample.n();
    if k == 0 {
        return Err(Error::InvalidInput("bin count must be at least 1".into()));
    }
    if k > n {
        return Err(Error::InvalidInput(format!(
            "bin count {k} exceeds sample size {n}"
        )));
    }
    let mut sorted: Vec<f64> = sample.observations().iter().map(|o| o.prediction).collect();
    sorted.sort_unstable_by(f64::total_cmp);

    let mut bounds: Vec<f64> = Vec::with_capacity(k);
    for j in 1..=k {
        let rank = (j * n).div_ceil(k);
        let v = sorted[rank - 1];
        if bounds.last() != Some(&v) {
            bounds.push(v);
        }
    }
    let kk = bounds.len();

    let assign: Vec<usize> = sample
        .observations()
        .iter()
        .map(|o| bounds.partition_point(|&b| b < o.prediction))
        .collect();
    let mut sums = vec![Accum::default(); kk];
    let mut counts = vec![0usize; kk];
    for (o, &b) in sample.observations().iter().zip(&assign) {
        sums[b].add(o.prediction);
        counts[b] += 1;
    }
    let levels: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s.value() / c as f64)
        .collect();
    let partition = LevelPartition::new(levels)?;

    let obs: Vec<Observation> = sample
        .observations()
        .iter()
        .zip(&assign)
        .map(|(o, &b)| Observation { response: o.response, prediction: partition.levels()[b] })
        .collect();
    Ok((Sample::new(obs)?, partition))
}

/// One point of the empirical lift curve: a level and the mean response of
/// its cohort.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct LiftPoint {
    pub level: f64,
    pub response_mean: f64,
    pub count: usize,
}

/// Mean response per level cohort. Errors if any level has no
/// observations; the increment identity S_k = (n_k/n)(mean_k - level_k)
/// ties these to the test statistics.
pub fn lift_points(sample: &Sample, partition: &LevelPartition) -> Result<Vec<LiftPoint>> {
    let k = partition.k();
    let mut sums = vec![Accum::default(); k];
    let mut counts = vec![0usize; k];
    for (i, o) in sample.observations().iter().enumerate() {
        let idx = partition
            .find(o.prediction)
            .ok_or(Error::UnknownLevel { index: i, prediction: o.prediction })?;
        sums[idx].add(o.response);
        counts[idx] += 1;
    }
    (0..k)
        .map(|idx| {
            if counts[idx] == 0 {
                return Err(Error::EmptyLevel { level: partition.levels()[idx] });
            }
            Ok(LiftPoint {
                level: partition.levels()[idx],
                response_mean: sums[idx].value() / counts[idx] as f64,
                count: counts[idx],
            })
        })
        .collect()
}

/// Mean response and mean prediction of a sample.
pub fn sample_means(sample: &Sample) -> (f64, f64) {
    let n = sample.n() as f64;
    let y = accum::sum(
        &sample.observations().iter().map(|o| o.response).collect::<Vec<_>>(),
    );
    let p = accum::sum(
        &sample.observations().iter().map(|o| o.prediction).collect::<Vec<_>>(),
    );
    (y / n, p / n)
}

fn check_dims(inc: &IncrementVector, model: &NullModel) -> Result<()> {
    if inc.k() != model.k() {
        return Err(Error::DimensionMismatch { expected: model.k(), actual: inc.k() });
    }
    Ok(())
}
