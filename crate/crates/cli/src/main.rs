//! `item`: the workbench CLI. Every subcommand is reproducible from its
//! config and seed; outputs land in --out-dir.

use clap::{Parser, Subcommand};
use item_audio::capture::speech_like;
use item_audio::{
    design_binaural_filters, doa_estimate, render_binaural, synth_array_capture, ArrayFrame,
    Direction, RenderParams, SphericalHeadHrtf, SteeringField, FRAME_LEN,
};
use item_chroma::{clean_mask, recover_mask, KeyColor, RecoveryParams};
use item_cli::configs::{AudioEvalConfig, RdConfig, SessionDemoConfig};
use item_cli::experiments::{
    key_sequence, run_audio_eval, run_rd_experiment, run_session_demo,
};
use item_cli::write_output;
use item_codec::{
    decode_sequence, encode_sequence, train_beta, CodecConfig, DecisionPath,
};
use item_media::{load_y4m, synth_chat_sequence, write_y4m, SynthSpec};
use std::error::Error;
use std::path::PathBuf;

type AnyError = Box<dyn Error + Send + Sync>;

#[derive(Parser)]
#[command(name = "item", about = "Tele-immersion workbench: object video \
coding, chroma-key recovery, array audio localization, binaural rendering \
and multiparty session simulation.")]
struct Cli {
    /// Output directory for generated files.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Seed overriding the config default, where applicable.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON config file; when present it takes precedence over flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic chat sequence (y4m + mask sidecar).
    GenSequence {
        #[arg(long, default_value_t = 128)]
        width: usize,
        #[arg(long, default_value_t = 96)]
        height: usize,
        #[arg(long, default_value_t = 60)]
        frames: usize,
        #[arg(long, default_value_t = 1)]
        actors: usize,
        #[arg(long, default_value_t = 1.0)]
        motion: f64,
        #[arg(long, default_value_t = 0)]
        flicker: u8,
        #[arg(long, default_value_t = 0.5)]
        gestures: f64,
        /// Also write the key-composited variant.
        #[arg(long)]
        keyed: bool,
        #[arg(long, default_value = "seq")]
        name: String,
    },
    /// Encode a y4m file into an ITEMOBJ1 bitstream.
    Encode {
        input: PathBuf,
        #[arg(long, default_value_t = 28)]
        qp: u8,
        #[arg(long, default_value_t = 8)]
        gop: u32,
        #[arg(long, default_value_t = 16)]
        search_range: u8,
        #[arg(long, value_parser = ["fast", "full"], default_value = "fast")]
        mode: String,
        /// Report wall-clock mode decision time in the stats CSV.
        #[arg(long)]
        timing: bool,
        #[arg(long, default_value = "stream.iobj")]
        output: String,
    },
    /// Decode an ITEMOBJ1 bitstream back to y4m.
    Decode {
        input: PathBuf,
        #[arg(long, default_value = "decoded.y4m")]
        output: String,
    },
    /// Apply a key color (y4m + masks -> y4m) or recover masks from a
    /// decoded file.
    Chromakey {
        #[arg(long, value_parser = ["apply", "recover"])]
        op: String,
        input: PathBuf,
        /// Mask sidecar: input for apply, output for recover.
        masks: PathBuf,
        #[arg(long, default_value_t = 32.0)]
        tolerance: f64,
        #[arg(long, default_value_t = 5)]
        neighbor_threshold: u8,
        /// Skip the cleaning pass during recovery.
        #[arg(long)]
        raw: bool,
        #[arg(long, default_value = "keyed.y4m")]
        output: String,
    },
    /// Train the sub-partition gate table on a synthetic corpus.
    TrainBeta {
        #[arg(long, value_delimiter = ',', default_values_t = vec![20u8, 24, 28, 32, 36, 40])]
        qps: Vec<u8>,
        #[arg(long, default_value_t = 30)]
        frames: usize,
    },
    /// Localize synthetic sources and write the DOA track.
    Doa {
        /// Source direction as theta,phi degrees.
        #[arg(long, value_delimiter = ',', default_values_t = vec![90.0, 45.0])]
        direction: Vec<f64>,
        #[arg(long, default_value_t = 30.0)]
        snr_db: f64,
        #[arg(long, default_value_t = 0.0)]
        rt60_ms: f64,
        #[arg(long, default_value_t = 5)]
        resolution: u32,
        #[arg(long, default_value_t = 1)]
        frames: usize,
    },
    /// Design binaural filters and render a capture to stereo.
    Binaural {
        /// 4-channel PCM16 wav to render; synthesized when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![90.0, 90.0])]
        direction: Vec<f64>,
        #[arg(long, default_value_t = 15)]
        resolution: u32,
        #[arg(long, default_value_t = 2.0)]
        seconds: f64,
        /// Use the long-segment (1535-point) overlap-add variant.
        #[arg(long)]
        long_segments: bool,
        #[arg(long, default_value = "binaural.wav")]
        output: String,
    },
    /// Replay a fusion scenario file into an event log.
    SpeakerFusion {
        scenario: PathBuf,
        #[arg(long, default_value_t = 3)]
        window: u32,
        #[arg(long, default_value_t = 15.0)]
        gate_deg: f64,
    },
    /// Run a session script and report bandwidth and latency.
    SimulateSession {
        /// Script JSON; the default 6-party ad-hoc script when omitted.
        script: Option<PathBuf>,
        #[arg(long, default_value_t = 100000)]
        latency_trials: usize,
    },
    /// Rate-distortion experiment over the synthetic corpus.
    RdExperiment {
        #[arg(long)]
        timing: bool,
        /// Shrink the corpus (frames per sequence) for quick runs.
        #[arg(long)]
        frames: Option<usize>,
    },
    /// DOA accuracy sweep over SNR x RT60 conditions.
    AudioEval {
        #[arg(long)]
        realizations: Option<usize>,
    },
}

fn load_config<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, AnyError> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn save_effective_config<T: serde::Serialize>(
    out_dir: &PathBuf,
    cfg: &T,
) -> Result<(), AnyError> {
    write_output(
        out_dir,
        "config.json",
        &(serde_json::to_string_pretty(cfg)? + "\n"),
    )?;
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<(), AnyError> {
    let out_dir = cli.out_dir.clone();
    match cli.cmd {
        Cmd::GenSequence {
            width,
            height,
            frames,
            actors,
            motion,
            flicker,
            gestures,
            keyed,
            name,
        } => {
            let spec = match &cli.config {
                Some(p) => load_config::<SynthSpec>(p)?,
                None => SynthSpec {
                    width,
                    height,
                    frame_count: frames,
                    seed: cli.seed.unwrap_or(1),
                    actor_count: actors,
                    motion_amplitude: motion,
                    lighting_flicker: flicker,
                    gesture_rate: gestures,
                    fps: (30, 1),
                },
            };
            let seq = synth_chat_sequence(&spec)?;
            std::fs::create_dir_all(&out_dir)?;
            write_y4m(out_dir.join(format!("{name}.y4m")), &seq)?;
            item_media::mask::write_masks(
                out_dir.join(format!("{name}.masks")),
                seq.masks().expect("generator emits masks"),
            )?;
            if keyed {
                let keyed_seq = key_sequence(&seq, KeyColor::default())?;
                write_y4m(out_dir.join(format!("{name}_keyed.y4m")), &keyed_seq)?;
            }
            save_effective_config(&out_dir, &spec)?;
            println!("wrote {name}.y4m ({} frames)", seq.len());
        }
        Cmd::Encode {
            input,
            qp,
            gop,
            search_range,
            mode,
            timing,
            output,
        } => {
            let seq = load_y4m(&input)?;
            let cfg = CodecConfig {
                qp,
                gop,
                search_range,
                ..CodecConfig::default()
            };
            let path = if mode == "full" {
                DecisionPath::Full
            } else {
                DecisionPath::Fast
            };
            let out = encode_sequence(&seq, &cfg, path)?;
            std::fs::create_dir_all(&out_dir)?;
            std::fs::write(out_dir.join(&output), &out.bytes)?;
            write_output(&out_dir, "encode_stats.csv", &out.stats.to_csv(timing))?;
            println!(
                "encoded {} frames, {} bits, mean psnr {:.2} dB",
                seq.len(),
                out.stats.total_bits(),
                out.stats.mean_psnr_y()
            );
        }
        Cmd::Decode { input, output } => {
            let bytes = std::fs::read(&input)?;
            let out = decode_sequence(&bytes)?;
            std::fs::create_dir_all(&out_dir)?;
            write_y4m(out_dir.join(&output), &out.seq)?;
            println!("decoded {} frames", out.seq.len());
        }
        Cmd::Chromakey {
            op,
            input,
            masks,
            tolerance,
            neighbor_threshold,
            raw,
            output,
        } => {
            let seq = load_y4m(&input)?;
            let key = KeyColor::default();
            std::fs::create_dir_all(&out_dir)?;
            if op == "apply" {
                let mask_list = item_media::mask::read_masks(&masks)?;
                let seq = item_media::VideoSequence::new(
                    seq.frames().to_vec(),
                    Some(mask_list),
                    seq.fps(),
                )?;
                let keyed = key_sequence(&seq, key)?;
                write_y4m(out_dir.join(&output), &keyed)?;
                println!("keyed {} frames", keyed.len());
            } else {
                let params = RecoveryParams {
                    color_tolerance: tolerance,
                    neighbor_threshold,
                };
                let recovered: Vec<_> = seq
                    .frames()
                    .iter()
                    .map(|f| {
                        let m = recover_mask(f, key, params.color_tolerance);
                        if raw {
                            m
                        } else {
                            clean_mask(&m, params.neighbor_threshold)
                        }
                    })
                    .collect();
                item_media::mask::write_masks(out_dir.join(&masks), &recovered)?;
                println!("recovered {} masks", recovered.len());
            }
        }
        Cmd::TrainBeta { qps, frames } => {
            let specs = item_cli::configs::default_corpus(frames);
            let corpus: Vec<_> = specs
                .iter()
                .map(|s| -> Result<_, AnyError> {
                    key_sequence(&synth_chat_sequence(s)?, KeyColor::default())
                })
                .collect::<Result<_, _>>()?;
            let base = CodecConfig {
                gop: 8,
                search_range: 4,
                ..CodecConfig::default()
            };
            let table = train_beta(&corpus, &qps, &base)?;
            write_output(
                &out_dir,
                "beta.json",
                &(serde_json::to_string_pretty(&table)? + "\n"),
            )?;
            println!("trained table: {:?}", qps.iter().map(|&q| table.get(q)).collect::<Vec<_>>());
        }
        Cmd::Doa {
            direction,
            snr_db,
            rt60_ms,
            resolution,
            frames,
        } => {
            if direction.len() != 2 {
                return Err("direction must be theta,phi".into());
            }
            let d = Direction::new(direction[0], direction[1])
                .map_err(|e| -> AnyError { e.to_string().into() })?;
            let field = SteeringField::analytic(resolution);
            let seed = cli.seed.unwrap_or(7);
            let mut csv = String::from("frame,true_theta,true_phi,est_theta,est_phi,peak\n");
            for fi in 0..frames {
                let sig = speech_like(FRAME_LEN, 16000.0, seed ^ (fi as u64) << 8);
                let capture = synth_array_capture(
                    &[(d, sig)],
                    snr_db,
                    rt60_ms,
                    16000.0,
                    seed.wrapping_add(fi as u64),
                )?;
                let frame = ArrayFrame::new(capture, 16000.0)?;
                let est = doa_estimate(&frame, &field, None)?;
                csv.push_str(&format!(
                    "{},{},{},{},{},{:.6e}\n",
                    fi,
                    d.theta_deg,
                    d.phi_deg,
                    est.direction.theta_deg,
                    est.direction.phi_deg,
                    est.peak
                ));
            }
            write_output(&out_dir, "doa.csv", &csv)?;
            println!("wrote doa.csv ({frames} frames)");
        }
        Cmd::Binaural {
            input,
            direction,
            resolution,
            seconds,
            long_segments,
            output,
        } => {
            let field = SteeringField::analytic(resolution);
            let (capture, rate) = match input {
                Some(path) => {
                    let (channels, rate) = item_audio::wav::read_wav(&path)?;
                    let [o, x, y, z]: [Vec<f64>; 4] = channels
                        .try_into()
                        .map_err(|_| -> AnyError { "input wav must have 4 channels".into() })?;
                    ([o, x, y, z], rate as f64)
                }
                None => {
                    if direction.len() != 2 {
                        return Err("direction must be theta,phi".into());
                    }
                    let d = Direction::new(direction[0], direction[1])
                        .map_err(|e| -> AnyError { e.to_string().into() })?;
                    let n = (seconds * 16000.0) as usize;
                    let sig = speech_like(n, 16000.0, cli.seed.unwrap_or(3));
                    let peak = sig.iter().fold(0.0f64, |a, &v| a.max(v.abs())).max(1e-9);
                    let sig: Vec<f64> = sig.iter().map(|v| v / peak * 0.5).collect();
                    (
                        synth_array_capture(&[(d, sig)], f64::INFINITY, 0.0, 16000.0, 1)?,
                        16000.0,
                    )
                }
            };
            let design = design_binaural_filters(&SphericalHeadHrtf::default(), &field, rate)?;
            let params = if long_segments {
                RenderParams::long_segments()
            } else {
                RenderParams::default()
            };
            let (l, r) = render_binaural(&capture, &design.bank, params)?;
            std::fs::create_dir_all(&out_dir)?;
            item_audio::wav::write_wav(out_dir.join(&output), &[l, r], rate as u32)?;
            println!("wrote {output}");
        }
        Cmd::SpeakerFusion {
            scenario,
            window,
            gate_deg,
        } => {
            let steps: Vec<item_fusion::ScenarioStep> =
                serde_json::from_str(&std::fs::read_to_string(&scenario)?)?;
            let cfg = item_fusion::FusionConfig {
                window,
                gate_deg,
                ..item_fusion::FusionConfig::default()
            };
            let log = item_fusion::run_scenario(&steps, cfg)?;
            write_output(&out_dir, "fusion_events.jsonl", &item_fusion::scenario::log_to_jsonl(&log))?;
            println!("processed {} steps", steps.len());
        }
        Cmd::SimulateSession {
            script,
            latency_trials,
        } => {
            let cfg = match (&cli.config, &script) {
                (Some(p), _) => load_config::<SessionDemoConfig>(p)?,
                (None, Some(p)) => SessionDemoConfig {
                    script: serde_json::from_str(&std::fs::read_to_string(p)?)?,
                    latency_trials,
                    seed: cli.seed.unwrap_or(5),
                },
                (None, None) => SessionDemoConfig {
                    latency_trials,
                    seed: cli.seed.unwrap_or(5),
                    ..SessionDemoConfig::default()
                },
            };
            let out = run_session_demo(&cfg)?;
            write_output(&out_dir, "session_report.json", &out.report_json)?;
            write_output(&out_dir, "session_metrics.csv", &out.metrics_csv)?;
            write_output(&out_dir, "session_events.jsonl", &out.log_jsonl)?;
            save_effective_config(&out_dir, &cfg)?;
            println!("wrote session_report.json");
        }
        Cmd::RdExperiment { timing, frames } => {
            let mut cfg = match &cli.config {
                Some(p) => load_config::<RdConfig>(p)?,
                None => RdConfig::default(),
            };
            cfg.timing = cfg.timing || timing;
            if let Some(n) = frames {
                for s in cfg.sequences.iter_mut() {
                    s.frame_count = n;
                }
            }
            let out = run_rd_experiment(&cfg)?;
            write_output(&out_dir, "rd.csv", &out.csv)?;
            write_output(&out_dir, "rd_summary.json", &out.summary_json)?;
            save_effective_config(&out_dir, &cfg)?;
            println!("wrote rd.csv and rd_summary.json");
        }
        Cmd::AudioEval { realizations } => {
            let mut cfg = match &cli.config {
                Some(p) => load_config::<AudioEvalConfig>(p)?,
                None => AudioEvalConfig::default(),
            };
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            if let Some(r) = realizations {
                cfg.realizations = r;
            }
            let out = run_audio_eval(&cfg)?;
            write_output(&out_dir, "audio_eval.csv", &out.csv)?;
            save_effective_config(&out_dir, &cfg)?;
            println!("wrote audio_eval.csv ({} rows)", out.rows.len());
        }
    }
    Ok(())
}
