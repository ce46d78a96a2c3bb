//! End-to-end latency accounting: per-stage closed ranges summed per
//! trial, with exact analytic bounds.

use crate::SessionError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRange {
    pub name: String,
    pub min_ms: f64,
    pub max_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyModel {
    pub stages: Vec<StageRange>,
}

impl Default for LatencyModel {
    fn default() -> Self {
        let stage = |name: &str, min_ms: f64, max_ms: f64| StageRange {
            name: name.to_string(),
            min_ms,
            max_ms,
        };
        LatencyModel {
            stages: vec![
                stage("cutout", 38.0, 54.0),
                stage("codec", 24.0, 38.0),
                stage("network", 28.0, 43.0),
                stage("render", 12.0, 30.0),
            ],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatencySummary {
    pub trials: usize,
    pub min_ms: f64,
    pub max_ms: f64,
    pub mean_ms: f64,
    /// (sum of stage minima, sum of stage maxima)
    pub bounds_ms: (f64, f64),
}

impl LatencyModel {
    pub fn validate(&self) -> Result<(), SessionError> {
        for s in &self.stages {
            if s.min_ms > s.max_ms || s.min_ms < 0.0 {
                return Err(SessionError::BadStage(s.name.clone()));
            }
        }
        Ok(())
    }

    /// Exact analytic end-to-end bounds.
    pub fn bounds_ms(&self) -> (f64, f64) {
        (
            self.stages.iter().map(|s| s.min_ms).sum(),
            self.stages.iter().map(|s| s.max_ms).sum(),
        )
    }

    pub fn sample_one(&self, rng: &mut ChaCha8Rng) -> f64 {
        self.stages
            .iter()
            .map(|s| {
                if s.min_ms == s.max_ms {
                    s.min_ms
                } else {
                    rng.random_range(s.min_ms..s.max_ms)
                }
            })
            .sum()
    }

    /// Samples `trials` end-to-end latencies; returns them with a summary.
    pub fn simulate(
        &self,
        trials: usize,
        seed: u64,
    ) -> Result<(Vec<f64>, LatencySummary), SessionError> {
        self.validate()?;
        if trials == 0 {
            return Err(SessionError::NoTrials);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<f64> = (0..trials).map(|_| self.sample_one(&mut rng)).collect();
        let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mean = samples.iter().sum::<f64>() / trials as f64;
        Ok((
            samples,
            LatencySummary {
                trials,
                min_ms: min,
                max_ms: max,
                mean_ms: mean,
                bounds_ms: self.bounds_ms(),
            },
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_stage_ranges_sum_to_documented_bounds() {
        let (lo, hi) = LatencyModel::default().bounds_ms();
        assert_eq!(lo, 102.0);
        assert_eq!(hi, 165.0);
    }

    #[test]
    fn degenerate_ranges_are_constant() {
        let m = LatencyModel {
            stages: vec![
                StageRange {
                    name: "a".into(),
                    min_ms: 5.0,
                    max_ms: 5.0,
                },
                StageRange {
                    name: "b".into(),
                    min_ms: 7.0,
                    max_ms: 7.0,
                },
            ],
        };
        let (samples, summary) = m.simulate(100, 3).unwrap();
        assert!(samples.iter().all(|&s| s == 12.0));
        assert_eq!(summary.mean_ms, 12.0);
    }

    #[test]
    fn all_samples_within_bounds() {
        let m = LatencyModel::default();
        let (samples, summary) = m.simulate(100_000, 17).unwrap();
        let (lo, hi) = summary.bounds_ms;
        assert!(samples.iter().all(|&s| s >= lo && s <= hi));
        assert!(summary.min_ms >= lo && summary.max_ms <= hi);
    }

    #[test]
    fn deterministic_in_seed() {
        let m = LatencyModel::default();
        let (a, _) = m.simulate(1000, 5).unwrap();
        let (b, _) = m.simulate(1000, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_model_rejected() {
        let m = LatencyModel {
            stages: vec![StageRange {
                name: "broken".into(),
                min_ms: 9.0,
                max_ms: 3.0,
            }],
        };
        assert!(m.simulate(10, 0).is_err());
        assert!(LatencyModel::default().simulate(0, 0).is_err());
    }
}
