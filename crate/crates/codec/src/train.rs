//! Training of the sub-partition gate scale: per qp, find the largest
//! scale such that among macroblocks passing the gate
//! `j16 < scale * j8x8`, at most 15% would actually have chosen sub-8x8
//! partitioning under full RDO.

use crate::config::{BetaTable, CodecConfig};
use crate::encoder::{encode_sequence_collecting, DecisionPath, GateSample};
use crate::mode_decision::MbMode;
use crate::CodecError;
use item_media::VideoSequence;

/// Fraction of gated macroblocks allowed to be P8x8-best.
const TARGET_MISS_RATE: f64 = 0.15;

fn largest_safe_scale(samples: &[GateSample]) -> f64 {
    let mut beta = 1.00f64;
    while beta >= 0.011 {
        let mut gated = 0u64;
        let mut missed = 0u64;
        for s in samples {
            if s.j16_half < beta * s.j8x8_half {
                gated += 1;
                if s.best_mode == MbMode::P8x8 {
                    missed += 1;
                }
            }
        }
        if gated == 0 || (missed as f64) <= TARGET_MISS_RATE * gated as f64 {
            return beta;
        }
        beta -= 0.01;
    }
    0.01
}

/// Runs the full-RDO encoder over the corpus at each qp and derives the
/// gate table. Deterministic: same corpus, same result.
pub fn train_beta(
    corpus: &[VideoSequence],
    qps: &[u8],
    base: &CodecConfig,
) -> Result<BetaTable, CodecError> {
    if corpus.is_empty() || qps.is_empty() {
        return Err(CodecError::EmptyCorpus);
    }
    let mut anchors = Vec::with_capacity(qps.len());
    for &qp in qps {
        let cfg = CodecConfig {
            qp,
            ..base.clone()
        };
        let mut samples = Vec::new();
        for seq in corpus {
            let out = encode_sequence_collecting(seq, &cfg, DecisionPath::Full)?;
            samples.extend(out.gate_samples);
        }
        anchors.push((qp, largest_safe_scale(&samples)));
    }
    BetaTable::from_trained(&anchors)
}
