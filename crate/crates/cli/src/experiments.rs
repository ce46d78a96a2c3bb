//! The three evaluation drivers: rate-distortion comparison of the fast
//! and exhaustive mode decisions over keyed and original content, the DOA
//! accuracy sweep, and the multiparty session demo.

use crate::configs::{AudioEvalConfig, RdConfig, SessionDemoConfig};
use item_audio::capture::speech_like;
use item_audio::{
    doa_estimate, synth_array_capture, ArrayFrame, Direction, SteeringField, FRAME_LEN,
};
use item_chroma::{apply_key, KeyColor};
use item_codec::{encode_sequence, CodecConfig, DecisionPath, EncodeOutput};
use item_media::{synth_chat_sequence, VideoSequence};
use item_session::run_scenario;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::error::Error;

pub type AnyError = Box<dyn Error + Send + Sync>;

/// Keys every frame of a masked sequence.
pub fn key_sequence(seq: &VideoSequence, key: KeyColor) -> Result<VideoSequence, AnyError> {
    let masks = seq.masks().ok_or("sequence carries no masks")?;
    let frames = seq
        .frames()
        .iter()
        .zip(masks)
        .map(|(f, m)| apply_key(f, m, key))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(seq.with_frames(frames)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Object,
    Original,
}

pub struct RdCell {
    pub seq: usize,
    pub qp: u8,
    pub path: DecisionPath,
    pub variant: Variant,
    pub out: EncodeOutput,
    pub fps: (u32, u32),
}

pub struct RdOutput {
    pub cells: Vec<RdCell>,
    pub csv: String,
    pub summary_json: String,
}

#[derive(Serialize)]
struct RdQpSummary {
    qp: u8,
    object_bits_fast: usize,
    object_bits_full: usize,
    object_psnr_fast: f64,
    object_psnr_full: f64,
    psnr_gap_db: f64,
    bitrate_mismatch: f64,
    satd_fast: u64,
    satd_full: u64,
    satd_ratio: f64,
    original_bits_fast: usize,
    object_over_original_bitrate: f64,
}

pub fn run_rd_experiment(cfg: &RdConfig) -> Result<RdOutput, AnyError> {
    let key = KeyColor::default();
    let mut sources = Vec::new();
    for spec in &cfg.sequences {
        let seq = synth_chat_sequence(spec)?;
        let keyed = key_sequence(&seq, key)?;
        sources.push((seq, keyed));
    }

    let mut jobs = Vec::new();
    for (si, _) in sources.iter().enumerate() {
        for &qp in &cfg.qps {
            for path in [DecisionPath::Fast, DecisionPath::Full] {
                for variant in [Variant::Object, Variant::Original] {
                    jobs.push((si, qp, path, variant));
                }
            }
        }
    }
    let cells: Vec<RdCell> = jobs
        .into_par_iter()
        .map(|(si, qp, path, variant)| -> Result<RdCell, String> {
            let codec_cfg = CodecConfig {
                qp,
                gop: cfg.gop,
                search_range: cfg.search_range,
                ..CodecConfig::default()
            };
            let seq = match variant {
                Variant::Object => &sources[si].1,
                Variant::Original => &sources[si].0,
            };
            let out = encode_sequence(seq, &codec_cfg, path).map_err(|e| e.to_string())?;
            Ok(RdCell {
                seq: si,
                qp,
                path,
                variant,
                out,
                fps: seq.fps(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut csv = String::from("seq,qp,path,variant,bits,kbps,psnr,md_time,satd\n");
    for c in &cells {
        let path = match c.path {
            DecisionPath::Fast => "fast",
            DecisionPath::Full => "full",
        };
        let variant = match c.variant {
            Variant::Object => "object",
            Variant::Original => "original",
        };
        let md_time = if cfg.timing {
            c.out.stats.total_md_time_us()
        } else {
            0
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{:.3},{:.4},{},{}\n",
            c.seq,
            c.qp,
            path,
            variant,
            c.out.stats.total_bits(),
            c.out.stats.bitrate_kbps(c.fps),
            c.out.stats.mean_psnr_y(),
            md_time,
            c.out.stats.total_satd(),
        ));
    }

    let mut summaries = Vec::new();
    for &qp in &cfg.qps {
        let pick = |path: DecisionPath, variant: Variant| {
            cells
                .iter()
                .filter(|c| c.qp == qp && c.path == path && c.variant == variant)
                .collect::<Vec<_>>()
        };
        let bits = |cs: &[&RdCell]| cs.iter().map(|c| c.out.stats.total_bits()).sum::<usize>();
        let satd = |cs: &[&RdCell]| cs.iter().map(|c| c.out.stats.total_satd()).sum::<u64>();
        let psnr = |cs: &[&RdCell]| {
            cs.iter().map(|c| c.out.stats.mean_psnr_y()).sum::<f64>() / cs.len() as f64
        };
        let fo = pick(DecisionPath::Fast, Variant::Object);
        let go = pick(DecisionPath::Full, Variant::Object);
        let fr = pick(DecisionPath::Fast, Variant::Original);
        let (bf, bg) = (bits(&fo), bits(&go));
        summaries.push(RdQpSummary {
            qp,
            object_bits_fast: bf,
            object_bits_full: bg,
            object_psnr_fast: psnr(&fo),
            object_psnr_full: psnr(&go),
            psnr_gap_db: psnr(&go) - psnr(&fo),
            bitrate_mismatch: (bf as f64 - bg as f64).abs() / bg as f64,
            satd_fast: satd(&fo),
            satd_full: satd(&go),
            satd_ratio: satd(&fo) as f64 / satd(&go) as f64,
            original_bits_fast: bits(&fr),
            object_over_original_bitrate: bf as f64 / bits(&fr) as f64,
        });
    }
    let summary_json = serde_json::to_string_pretty(&summaries)? + "\n";
    Ok(RdOutput {
        cells,
        csv,
        summary_json,
    })
}

fn wrap_deg(mut d: f64) -> f64 {
    while d > 180.0 {
        d -= 360.0;
    }
    while d < -180.0 {
        d += 360.0;
    }
    d
}

pub struct AudioEvalRow {
    pub snr_db: f64,
    pub rt60_ms: f64,
    pub mean_theta_err: f64,
    pub mean_phi_err: f64,
    pub std_theta: f64,
    pub std_phi: f64,
}

pub struct AudioEvalOutput {
    pub rows: Vec<AudioEvalRow>,
    pub csv: String,
}

pub fn run_audio_eval(cfg: &AudioEvalConfig) -> Result<AudioEvalOutput, AnyError> {
    let field = SteeringField::analytic(cfg.resolution_deg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let res = cfg.resolution_deg;
    let dirs: Vec<Direction> = (0..cfg.directions)
        .map(|_| {
            let t = rng.random_range(cfg.theta_range.0 / res..=cfg.theta_range.1 / res) * res;
            let p = rng.random_range(0..360 / res) * res;
            Direction::new(t as f64, p as f64).expect("grid direction")
        })
        .collect();

    // realizations parallelized per condition; seeds derive from indices,
    // so results are independent of scheduling
    let mut rows = Vec::new();
    for (ci, &snr) in cfg.snrs_db.iter().enumerate() {
        for (ri, &rt60) in cfg.rt60s_ms.iter().enumerate() {
            let jobs: Vec<(usize, usize)> = (0..dirs.len())
                .flat_map(|di| (0..cfg.realizations).map(move |r| (di, r)))
                .collect();
            let cells: Vec<(f64, f64)> = jobs
                .par_iter()
                .map(|&(di, r)| {
                    let d = dirs[di];
                    let tag = ((ci as u64) << 48)
                        | ((ri as u64) << 40)
                        | ((di as u64) << 20)
                        | r as u64;
                    let sig =
                        speech_like(FRAME_LEN, cfg.sample_rate, cfg.seed ^ tag.rotate_left(7));
                    let capture =
                        synth_array_capture(&[(d, sig)], snr, rt60, cfg.sample_rate, cfg.seed ^ tag)
                            .expect("capture synthesis");
                    let frame =
                        ArrayFrame::new(capture, cfg.sample_rate).expect("frame length");
                    let est = doa_estimate(&frame, &field, None).expect("band is valid");
                    (
                        est.direction.theta_deg - d.theta_deg,
                        wrap_deg(est.direction.phi_deg - d.phi_deg),
                    )
                })
                .collect();

            // per-direction std, then averaged (mean standard deviations)
            let per_dir = cells.chunks(cfg.realizations).collect::<Vec<_>>();
            let std_of = |v: &[f64]| {
                let m = v.iter().sum::<f64>() / v.len() as f64;
                (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64).sqrt()
            };
            let mut std_t = 0.0;
            let mut std_p = 0.0;
            for chunk in &per_dir {
                let ts: Vec<f64> = chunk.iter().map(|c| c.0).collect();
                let ps: Vec<f64> = chunk.iter().map(|c| c.1).collect();
                std_t += std_of(&ts);
                std_p += std_of(&ps);
            }
            std_t /= per_dir.len() as f64;
            std_p /= per_dir.len() as f64;
            let mean_t = cells.iter().map(|c| c.0.abs()).sum::<f64>() / cells.len() as f64;
            let mean_p = cells.iter().map(|c| c.1.abs()).sum::<f64>() / cells.len() as f64;
            rows.push(AudioEvalRow {
                snr_db: snr,
                rt60_ms: rt60,
                mean_theta_err: mean_t,
                mean_phi_err: mean_p,
                std_theta: std_t,
                std_phi: std_p,
            });
        }
    }

    let mut csv =
        String::from("snr_db,rt60_ms,mean_theta_err,mean_phi_err,std_theta,std_phi\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{:.4},{:.4},{:.4},{:.4}\n",
            r.snr_db, r.rt60_ms, r.mean_theta_err, r.mean_phi_err, r.std_theta, r.std_phi
        ));
    }
    Ok(AudioEvalOutput { rows, csv })
}

#[derive(Serialize)]
pub struct SessionDemoReport {
    pub latency_bounds_ms: (f64, f64),
    pub latency_min_ms: f64,
    pub latency_max_ms: f64,
    pub latency_mean_ms: f64,
    pub latency_trials: usize,
    /// node id -> uplink kbps at the final tick
    pub final_uplink_kbps: BTreeMap<u64, f64>,
    pub ticks: usize,
}

pub struct SessionDemoOutput {
    pub report_json: String,
    pub metrics_csv: String,
    pub log_jsonl: String,
}

pub fn run_session_demo(cfg: &SessionDemoConfig) -> Result<SessionDemoOutput, AnyError> {
    let out = run_scenario(&cfg.script)?;
    let model = cfg.script.latency.clone().unwrap_or_default();
    let (_, summary) = model.simulate(cfg.latency_trials, cfg.seed)?;
    let last_t = out.metrics.iter().map(|r| r.t).max();
    let mut final_uplink = BTreeMap::new();
    if let Some(t) = last_t {
        for r in out.metrics.iter().filter(|r| r.t == t) {
            final_uplink.insert(r.node, r.up_kbps);
        }
    }
    let ticks = out
        .metrics
        .iter()
        .map(|r| r.t)
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    let report = SessionDemoReport {
        latency_bounds_ms: summary.bounds_ms,
        latency_min_ms: summary.min_ms,
        latency_max_ms: summary.max_ms,
        latency_mean_ms: summary.mean_ms,
        latency_trials: summary.trials,
        final_uplink_kbps: final_uplink,
        ticks,
    };
    Ok(SessionDemoOutput {
        report_json: serde_json::to_string_pretty(&report)? + "\n",
        metrics_csv: out.metrics_csv(),
        log_jsonl: out.log_jsonl(),
    })
}
