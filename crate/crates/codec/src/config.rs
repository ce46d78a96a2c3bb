use crate::CodecError;
use serde::{Deserialize, Serialize};

/// Coefficients of the early-skip gate `base * e^(rate * qp)` on the skip
/// motion cost.
pub const SKIP_THRESHOLD_COEFFS: (f64, f64) = (14.0, 0.1384);

/// Early-skip gate on the skip-mode motion cost, exponential in qp.
pub fn skip_threshold(qp: u8) -> Result<f64, CodecError> {
    if qp > 51 {
        return Err(CodecError::QpOutOfRange(qp));
    }
    let (base, rate) = SKIP_THRESHOLD_COEFFS;
    Ok(base * (rate * qp as f64).exp())
}

/// Per-qp scale applied to the 8x8 motion cost when deciding whether sub-8x8
/// partitions are worth searching. Values in (0, 1], non-decreasing in qp.
///
/// The default table was trained with `train_beta` on the bundled synthetic
/// corpus (target: sub-partition modes win at most 15% of gated blocks).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaTable {
    values: Vec<f64>,
}

impl Default for BetaTable {
    fn default() -> Self {
        // Trained with `train_beta` on the bundled synthetic corpus at
        // qp {8..40}: sub-8x8 partitions win so rarely there that the
        // largest admissible scale is 1.0 throughout. Content with finer
        // motion structure should retrain (`item train-beta`).
        BetaTable::from_trained(&[(0, 1.0)]).expect("static table is well-formed")
    }
}

impl BetaTable {
    /// Builds a full 0..=51 table from (qp, beta) anchors: step
    /// interpolation (previous anchor wins), then a running maximum to force
    /// monotonicity.
    pub fn from_trained(anchors: &[(u8, f64)]) -> Result<Self, CodecError> {
        if anchors.is_empty() {
            return Err(CodecError::EmptyCorpus);
        }
        let mut sorted = anchors.to_vec();
        sorted.sort_by_key(|&(qp, _)| qp);
        let mut values = vec![0.0f64; 52];
        let mut cur = sorted[0].1;
        let mut it = sorted.iter().peekable();
        for (qp, slot) in values.iter_mut().enumerate() {
            while let Some(&&(aqp, b)) = it.peek() {
                if aqp as usize <= qp {
                    cur = b;
                    it.next();
                } else {
                    break;
                }
            }
            *slot = cur.clamp(0.01, 1.0);
        }
        let mut run = 0.0f64;
        for v in values.iter_mut() {
            run = run.max(*v);
            *v = run;
        }
        Ok(BetaTable { values })
    }

    pub fn get(&self, qp: u8) -> f64 {
        self.values[qp.min(51) as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodecConfig {
    pub qp: u8,
    /// Integer motion search reach in pixels around the co-located block.
    pub search_range: u8,
    /// I-frame interval; frame k is intra-coded when k % gop == 0.
    pub gop: u32,
    pub beta_table: BetaTable,
    /// Key color used for the blue-macroblock bypass.
    pub key: item_chroma::KeyColor,
}

impl Default for CodecConfig {
    fn default() -> Self {
        CodecConfig {
            qp: 28,
            search_range: 16,
            gop: 10,
            beta_table: BetaTable::default(),
            key: item_chroma::KeyColor::default(),
        }
    }
}

impl CodecConfig {
    pub fn validate(&self) -> Result<(), CodecError> {
        if self.qp > 51 {
            return Err(CodecError::QpOutOfRange(self.qp));
        }
        Ok(())
    }

    /// Lagrange multiplier for rate-distortion mode decision.
    pub fn lambda_mode(&self) -> f64 {
        0.85 * 2f64.powf((self.qp as f64 - 12.0) / 3.0)
    }

    /// Lagrange multiplier for motion cost (SATD domain).
    pub fn lambda_mv(&self) -> f64 {
        self.lambda_mode().sqrt()
    }

    pub fn skip_threshold(&self) -> f64 {
        skip_threshold(self.qp).expect("validated qp")
    }
}
