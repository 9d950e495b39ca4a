//! Core data types: samples, level partitions, null models, and the
//! per-level increment vector every statistic is built from.
//!
//! A prediction function with a finite range induces a partition of the
//! sample into level cohorts. Everything downstream identifies cohorts by
//! exact (bit-level) equality of the predicted value, so the partition
//! stores the level values themselves, not tolerances.

use serde::{Deserialize, Serialize};

use crate::accum::Accum;
use crate::error::Error;
use crate::Result;

/// One observation: a response paired with the model's prediction for it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub response: f64,
    pub prediction: f64,
}

/// A sample of observations; validated non-empty with finite fields.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    obs: Vec<Observation>,
}

impl Sample {
    pub fn new(obs: Vec<Observation>) -> Result<Self> {
        if obs.is_empty() {
            return Err(Error::EmptySample);
        }
        for (i, o) in obs.iter().enumerate() {
            if !o.response.is_finite() {
                return Err(Error::InvalidObservation {
                    index: i,
                    reason: format!("response {} is not finite", o.response),
                });
            }
            if !o.prediction.is_finite() {
                return Err(Error::InvalidObservation {
                    index: i,
                    reason: format!("prediction {} is not finite", o.prediction),
                });
            }
        }
        Ok(Sample { obs })
    }

    pub fn from_columns(responses: &[f64], predictions: &[f64]) -> Result<Self> {
        if responses.len() != predictions.len() {
            return Err(Error::DimensionMismatch {
                expected: responses.len(),
                actual: predictions.len(),
            });
        }
        Sample::new(
            responses
                .iter()
                .zip(predictions)
                .map(|(&response, &prediction)| Observation { response, prediction })
                .collect(),
        )
    }

    pub fn observations(&self) -> &[Observation] {
        &self.obs
    }

    pub fn n(&self) -> usize {
        self.obs.len()
    }
}

/// The ordered distinct values a prediction can take.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LevelPartition {
    levels: Vec<f64>,
}

impl LevelPartition {
    /// Levels must be finite and strictly increasing.
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidPartition("no levels".into()));
        }
        for (i, &l) in levels.iter().enumerate() {
            if !l.is_finite() {
                return Err(Error::InvalidPartition(format!(
                    "level {i} is not finite"
                )));
            }
            if i > 0 && levels[i - 1] >= l {
                return Err(Error::InvalidPartition(format!(
                    "levels not strictly increasing at index {i}: {} then {l}",
                    levels[i - 1]
                )));
            }
        }
        Ok(LevelPartition { levels })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn k(&self) -> usize {
        self.levels.len()
    }

    /// Index of the level exactly equal to `prediction`, if any.
    pub fn find(&self, prediction: f64) -> Option<usize> {
        let i = self.levels.partition_point(|&l| l < prediction);
        if i < self.levels.len() && self.levels[i] == prediction {
            Some(i)
        } else {
            None
        }
    }
}

impl TryFrom<Vec<f64>> for LevelPartition {
    type Error = Error;
    fn try_from(levels: Vec<f64>) -> Result<Self> {
        LevelPartition::new(levels)
    }
}

impl From<LevelPartition> for Vec<f64> {
    fn from(p: LevelPartition) -> Vec<f64> {
        p.levels
    }
}

/// Serialized form of a null model: three parallel arrays.
#[derive(Serialize, Deserialize)]
pub(crate) struct ModelJson {
    pub levels: Vec<f64>,
    pub probs: Vec<f64>,
    pub variances: Vec<f64>,
}

/// Null hypothesis for the calibration tests: level values, their
/// probabilities, and the response variance within each level cohort.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelJson", into = "ModelJson")]
pub struct NullModel {
    partition: LevelPartition,
    probs: Vec<f64>,
    variances: Vec<f64>,
    cum: Vec<f64>,
}

impl NullModel {
    /// Probabilities must be strictly positive and sum to 1 within 1e-12;
    /// variances must be finite and nonnegative.
    pub fn new(partition: LevelPartition, probs: Vec<f64>, variances: Vec<f64>) -> Result<Self> {
        let k = partition.k();
        if probs.len() != k {
            return Err(Error::DimensionMismatch { expected: k, actual: probs.len() });
        }
        if variances.len() != k {
            return Err(Error::DimensionMismatch { expected: k, actual: variances.len() });
        }
        let mut acc = Accum::default();
        let mut cum = Vec::with_capacity(k + 1);
        cum.push(0.0);
        for (i, &p) in probs.iter().enumerate() {
            if p <= 0.0 || !p.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "probability {i} must be strictly positive, got {p}"
                )));
            }
            acc.add(p);
            cum.push(acc.value());
        }
        if (acc.value() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidModel(format!(
                "probabilities sum to {}, expected 1 within 1e-12",
                acc.value()
            )));
        }
        for (i, &v) in variances.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidModel(format!(
                    "variance {i} must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(NullModel { partition, probs, variances, cum })
    }

    pub fn from_parts(levels: Vec<f64>, probs: Vec<f64>, variances: Vec<f64>) -> Result<Self> {
        NullModel::new(LevelPartition::new(levels)?, probs, variances)
    }

    pub fn partition(&self) -> &LevelPartition {
        &self.partition
    }

    pub fn levels(&self) -> &[f64] {
        self.partition.levels()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn k(&self) -> usize {
        self.partition.k()
    }

    /// Cumulative probabilities: length k+1, starts at 0, ends at ~1.
    pub fn cum_probs(&self) -> &[f64] {
        &self.cum
    }

    /// Probability-weighted variance of level `k`, the variance of one step
    /// of the null random walk.
    pub fn weight(&self, k: usize) -> f64 {
        self.probs[k] * self.variances[k]
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.k()).map(|k| self.weight(k)).collect()
    }

    /// Stable 16-hex-digit digest of the exact model bits, recorded in test
    /// outcomes so reports can be matched to the model that produced them.
    pub fn digest(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |x: f64| {
            for b in x.to_bits().to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        for &l in self.levels() {
            eat(l);
        }
        for &p in &self.probs {
            eat(p);
        }
        for &v in &self.variances {
            eat(v);
        }
        format!("{h:016x}")
    }
}

impl TryFrom<ModelJson> for NullModel {
    type Error = Error;
    fn try_from(m: ModelJson) -> Result<Self> {
        NullModel::from_parts(m.levels, m.probs, m.variances)
    }
}

impl From<NullModel> for ModelJson {
    fn from(m: NullModel) -> ModelJson {
        ModelJson {
            levels: m.partition.levels.clone(),
            probs: m.probs,
            variances: m.variances,
        }
    }
}

/// Per-level averaged increments: values[k] is the mean of
/// (response - prediction) over the whole sample, restricted to cohort k.
/// Unscaled; test statistics apply their own powers of n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IncrementJson", into = "IncrementJson")]
pub struct IncrementVector {
    values: Vec<f64>,
    counts: Vec<usize>,
    n: usize,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct IncrementJson {
    values: Vec<f64>,
    counts: Vec<usize>,
    n: usize,
}

impl IncrementVector {
    pub fn new(values: Vec<f64>, counts: Vec<usize>, n: usize) -> Result<Self> {
        if values.len() != counts.len() {
            return Err(Error::DimensionMismatch {
                expected: values.len(),
                actual: counts.len(),
            });
        }
        if n == 0 {
            return Err(Error::EmptySample);
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "increment {i} is not finite"
                )));
            }
        }
        let total: usize = counts.iter().sum();
        if total != n {
            return Err(Error::InvalidInput(format!(
                "cohort counts sum to {total}, expected n = {n}"
            )));
        }
        Ok(IncrementVector { values, counts, n })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }
}

impl TryFrom<IncrementJson> for IncrementVector {
    type Error = Error;
    fn try_from(j: IncrementJson) -> Result<Self> {
        IncrementVector::new(j.values, j.counts, j.n)
    }
}

impl From<IncrementVector> for IncrementJson {
    fn from(v: IncrementVector) -> IncrementJson {
        IncrementJson { values: v.values, counts: v.counts, n: v.n }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_rejects_bad_values() {
        assert!(matches!(Sample::new(vec![]), Err(Error::EmptySample)));
        let bad = vec![Observation { response: f64::NAN, prediction: 1.0 }];
        assert!(matches!(
            Sample::new(bad),
            Err(Error::InvalidObservation { index: 0, .. })
        ));
        let bad = vec![
            Observation { response: 1.0, prediction: 1.0 },
            Observation { response: 1.0, prediction: f64::INFINITY },
        ];
        assert!(matches!(
            Sample::new(bad),
            Err(Error::InvalidObservation { index: 1, .. })
        ));
    }

    #[test]
    fn partition_find_is_exact() {
        let p = LevelPartition::new(vec![1.0, 2.5, 4.0]).unwrap();
        assert_eq!(p.find(1.0), Some(0));
        assert_eq!(p.find(2.5), Some(1));
        assert_eq!(p.find(4.0), Some(2));
        assert_eq!(p.find(2.5 + 1e-12), None);
        assert_eq!(p.find(0.0), None);
        assert_eq!(p.find(5.0), None);
        assert_eq!(p.find(f64::NAN), None);
    }

    #[test]
    fn partition_rejects_disorder() {
        assert!(LevelPartition::new(vec![]).is_err());
        assert!(LevelPartition::new(vec![1.0, 1.0]).is_err());
        assert!(LevelPartition::new(vec![2.0, 1.0]).is_err());
        assert!(LevelPartition::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn model_validates_probs_and_dims() {
        let part = LevelPartition::new(vec![1.0, 2.0]).unwrap();
        assert!(NullModel::new(part.clone(), vec![0.5, 0.5], vec![1.0, 2.0]).is_ok());
        assert!(NullModel::new(part.clone(), vec![0.5], vec![1.0, 2.0]).is_err());
        assert!(NullModel::new(part.clone(), vec![0.6, 0.5], vec![1.0, 2.0]).is_err());
        assert!(NullModel::new(part.clone(), vec![1.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(NullModel::new(part.clone(), vec![0.5, 0.5], vec![1.0, -1.0]).is_err());
        let m = NullModel::new(part, vec![0.25, 0.75], vec![1.0, 2.0]).unwrap();
        assert_eq!(m.cum_probs(), &[0.0, 0.25, 1.0]);
        assert_eq!(m.weight(1), 1.5);
        assert_eq!(m.weights(), vec![0.25, 1.5]);
    }

    #[test]
    fn model_json_round_trip() {
        let m = NullModel::from_parts(
            vec![10.0, 11.0],
            vec![0.4, 0.6],
            vec![10.0 / 3.0, 11.0 / 3.0],
        )
        .unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: NullModel = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
        assert_eq!(m.digest(), back.digest());
        let err: std::result::Result<NullModel, _> =
            serde_json::from_str(r#"{"levels":[1.0],"probs":[0.5],"variances":[1.0]}"#);
        assert!(err.is_err(), "probabilities not summing to 1 must fail");
    }

    #[test]
    fn digest_tracks_exact_bits() {
        let a = NullModel::from_parts(vec![1.0, 2.0], vec![0.5, 0.5], vec![1.0, 1.0]).unwrap();
        let b = NullModel::from_parts(vec![1.0, 2.0], vec![0.5, 0.5], vec![1.0, 1.0]).unwrap();
        let c =
            NullModel::from_parts(vec![1.0, 2.0], vec![0.5, 0.5], vec![1.0, 1.0 + 1e-12]).unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), c.digest());
        assert_eq!(a.digest().len(), 16);
    }

    #[test]
    fn increment_vector_checks_counts() {
        assert!(IncrementVector::new(vec![0.1, 0.2], vec![2, 3], 5).is_ok());
        assert!(IncrementVector::new(vec![0.1], vec![2, 3], 5).is_err());
        assert!(IncrementVector::new(vec![0.1, 0.2], vec![2, 2], 5).is_err());
        assert!(IncrementVector::new(vec![f64::NAN, 0.2], vec![2, 3], 5).is_err());
        assert!(IncrementVector::new(vec![], vec![], 0).is_err());
        // A level may be absent from the sample: count 0, value 0.
        let v = IncrementVector::new(vec![0.0, 0.5], vec![0, 4], 4).unwrap();
        assert_eq!(v.counts(), &[0, 4]);
        assert_eq!(v.k(), 2);
    }
}
