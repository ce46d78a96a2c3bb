//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (visible with `--nocapture`). Criteria 1-4 and 9 share
//! one corpus fixture so the expensive encodes run once.

use item_audio::capture::speech_like;
use item_audio::{
    design_binaural_filters, doa_estimate, render_binaural, synth_array_capture, ArrayFrame,
    Direction, RenderParams, SphericalHeadHrtf, SteeringField, FRAME_LEN,
};
use item_chroma::{clean_mask, recover_mask, KeyColor};
use item_cli::configs::{default_corpus, AudioEvalConfig, RdConfig, SessionDemoConfig};
use item_cli::experiments::{key_sequence, run_audio_eval, run_rd_experiment, run_session_demo};
use item_codec::{decode_sequence, encode_sequence, CodecConfig, DecisionPath, EncodeOutput};
use item_media::{synth_chat_sequence, ForegroundMask, VideoSequence};
use once_cell::sync::Lazy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

const QPS: [u8; 4] = [24, 28, 32, 36];

struct Fixture {
    /// (original, keyed) per sequence.
    corpus: Vec<(VideoSequence, VideoSequence)>,
    /// (qp, fast?, object?) -> encode result.
    cells: BTreeMap<(u8, bool, bool), Vec<EncodeOutput>>,
    encode_elapsed: Duration,
}

static FIXTURE: Lazy<Fixture> = Lazy::new(|| {
    let corpus: Vec<(VideoSequence, VideoSequence)> = default_corpus(100)
        .iter()
        .map(|spec| {
            let seq = synth_chat_sequence(spec).expect("corpus spec is valid");
            let keyed = key_sequence(&seq, KeyColor::default()).expect("corpus has masks");
            (seq, keyed)
        })
        .collect();

    // criteria need fast+full on keyed objects and fast on originals
    let mut jobs: Vec<(u8, bool, bool, usize)> = Vec::new();
    for &qp in &QPS {
        for si in 0..corpus.len() {
            jobs.push((qp, true, true, si));
            jobs.push((qp, false, true, si));
            jobs.push((qp, true, false, si));
        }
    }
    let start = Instant::now();
    let encoded: Vec<((u8, bool, bool), (usize, EncodeOutput))> = jobs
        .par_iter()
        .map(|&(qp, fast, object, si)| {
            let cfg = CodecConfig {
                qp,
                gop: 8,
                search_range: 4,
                ..CodecConfig::default()
            };
            let path = if fast {
                DecisionPath::Fast
            } else {
                DecisionPath::Full
            };
            let seq = if object {
                &corpus[si].1
            } else {
                &corpus[si].0
            };
            let out = encode_sequence(seq, &cfg, path).expect("encode");
            ((qp, fast, object), (si, out))
        })
        .collect();
    let encode_elapsed = start.elapsed();

    let mut cells: BTreeMap<(u8, bool, bool), Vec<(usize, EncodeOutput)>> = BTreeMap::new();
    for (key, value) in encoded {
        cells.entry(key).or_default().push(value);
    }
    let cells = cells
        .into_iter()
        .map(|(k, mut v)| {
            v.sort_by_key(|(si, _)| *si);
            (k, v.into_iter().map(|(_, out)| out).collect())
        })
        .collect();
    Fixture {
        corpus,
        cells,
        encode_elapsed,
    }
});

fn report(criterion: u32, name: &str, checks: &[(String, bool)]) {
    let ok = checks.iter().all(|(_, b)| *b);
    println!(
        "acceptance criterion {criterion} ({name}): {}",
        if ok { "PASS" } else { "FAIL" }
    );
    for (label, good) in checks {
        if !good {
            println!("  failed: {label}");
        }
    }
    assert!(ok, "criterion {criterion} ({name}) failed");
}

fn total_bits(outs: &[EncodeOutput]) -> usize {
    outs.iter().map(|o| o.stats.total_bits()).sum()
}

fn total_satd(outs: &[EncodeOutput]) -> u64 {
    outs.iter().map(|o| o.stats.total_satd()).sum()
}

fn mean_psnr(outs: &[EncodeOutput]) -> f64 {
    outs.iter().map(|o| o.stats.mean_psnr_y()).sum::<f64>() / outs.len() as f64
}

#[test]
fn criterion_1_fast_mode_decision_quality() {
    let f = &*FIXTURE;
    let mut checks = Vec::new();
    for &qp in &QPS {
        let fast = &f.cells[&(qp, true, true)];
        let full = &f.cells[&(qp, false, true)];
        let bf = total_bits(fast) as f64;
        let bg = total_bits(full) as f64;
        let mismatch = (bf - bg).abs() / bg;
        let gap = mean_psnr(full) - mean_psnr(fast);
        checks.push((
            format!("qp {qp}: bitrate mismatch {mismatch:.4} <= 0.05"),
            mismatch <= 0.05,
        ));
        checks.push((
            format!("qp {qp}: psnr loss {gap:.4} dB <= 0.4"),
            gap <= 0.4,
        ));
    }
    let secs = f.encode_elapsed.as_secs_f64();
    checks.push((
        format!("corpus encodes took {secs:.0} s <= 600 s"),
        secs <= 600.0,
    ));
    report(1, "fast mode decision quality", &checks);
}

#[test]
fn criterion_2_fast_mode_decision_speed() {
    let f = &*FIXTURE;
    let mut checks = Vec::new();
    for &qp in &QPS {
        let fast = total_satd(&f.cells[&(qp, true, true)]);
        let full = total_satd(&f.cells[&(qp, false, true)]);
        let ratio = fast as f64 / full as f64;
        checks.push((
            format!("qp {qp}: SATD count ratio {ratio:.3} <= 0.5"),
            ratio <= 0.5,
        ));
    }
    report(2, "fast mode decision speed", &checks);
}

#[test]
fn criterion_3_object_coding_bandwidth() {
    let f = &*FIXTURE;
    let mut checks = Vec::new();
    // the premise: corpus foreground stays under 40%
    let max_fg = f
        .corpus
        .iter()
        .flat_map(|(seq, _)| seq.masks().unwrap())
        .map(|m| m.foreground_fraction())
        .fold(0.0f64, f64::max);
    checks.push((
        format!("max foreground fraction {max_fg:.3} <= 0.4"),
        max_fg <= 0.4,
    ));
    for &qp in &QPS {
        let object = total_bits(&f.cells[&(qp, true, true)]) as f64;
        let original = total_bits(&f.cells[&(qp, true, false)]) as f64;
        let ratio = object / original;
        checks.push((
            format!("qp {qp}: keyed/original bitrate {ratio:.3} <= 0.5"),
            ratio <= 0.5,
        ));
    }
    report(3, "object coding bandwidth", &checks);
}

#[test]
fn criterion_4_shape_recovery() {
    let f = &*FIXTURE;
    let key = KeyColor::default();
    let mut checks = Vec::new();
    for &qp in &[24u8, 28, 32] {
        let outs = &f.cells[&(qp, true, true)];
        let mut tp = 0u64;
        let mut fp = 0u64;
        let mut fne = 0u64;
        let mut grew = false;
        for (si, out) in outs.iter().enumerate() {
            let decoded = decode_sequence(&out.bytes).expect("own stream decodes");
            let truth = f.corpus[si].0.masks().unwrap();
            for (frame, gt) in decoded.seq.frames().iter().zip(truth) {
                let raw = recover_mask(frame, key, 32.0);
                let cleaned = clean_mask(&raw, 5);
                for ((c, r), t) in cleaned
                    .bits()
                    .iter()
                    .zip(raw.bits())
                    .zip(gt.bits())
                {
                    if *c && !*r {
                        grew = true;
                    }
                    match (c, t) {
                        (true, true) => tp += 1,
                        (true, false) => fp += 1,
                        (false, true) => fne += 1,
                        _ => {}
                    }
                }
            }
        }
        let f1 = 2.0 * tp as f64 / (2.0 * tp as f64 + fp as f64 + fne as f64);
        checks.push((format!("qp {qp}: corpus F1 {f1:.4} >= 0.98"), f1 >= 0.98));
        checks.push((format!("qp {qp}: cleaning never grew foreground"), !grew));
    }
    // isolated single-pixel outliers are always removed
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut all_removed = true;
    for _ in 0..50 {
        let mut m = ForegroundMask::new_background(64, 64);
        let x = rng.random_range(0..64);
        let y = rng.random_range(0..64);
        m.set(x, y, true);
        if clean_mask(&m, 5).popcount() != 0 {
            all_removed = false;
        }
    }
    checks.push(("isolated outliers 100% removed".to_string(), all_removed));
    report(4, "shape recovery", &checks);
}

#[test]
fn criterion_5_doa_accuracy() {
    let start = Instant::now();
    let field = SteeringField::analytic(5);
    let mut checks = Vec::new();

    fn wrap(mut d: f64) -> f64 {
        while d > 180.0 {
            d -= 360.0;
        }
        while d < -180.0 {
            d += 360.0;
        }
        d
    }
    fn grid_dir(rng: &mut ChaCha8Rng, lo: u32, hi: u32) -> Direction {
        let t = rng.random_range(lo / 5..=hi / 5) * 5;
        let p = rng.random_range(0..72) * 5;
        Direction::new(t as f64, p as f64).unwrap()
    }

    // noiseless on-grid: exact hit on all 50 trials
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let trials: Vec<(u64, Direction)> =
        (0..50u64).map(|i| (i, grid_dir(&mut rng, 5, 175))).collect();
    let exact = trials
        .par_iter()
        .filter(|(i, d)| {
            let sig = speech_like(FRAME_LEN, 16000.0, 900 + i);
            let ch = synth_array_capture(&[(*d, sig)], f64::INFINITY, 0.0, 16000.0, 300 + i)
                .unwrap();
            let est = doa_estimate(&ArrayFrame::new(ch, 16000.0).unwrap(), &field, None).unwrap();
            est.direction == *d
        })
        .count();
    checks.push((format!("noiseless exact grid hits {exact}/50"), exact == 50));

    // snr 30 dB, no reverb: within one grid step in both angles for >= 95%
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let trials: Vec<(u64, Direction)> =
        (0..20u64).map(|i| (i, grid_dir(&mut rng, 5, 175))).collect();
    let hits = trials
        .par_iter()
        .filter(|(i, d)| {
            let sig = speech_like(FRAME_LEN, 16000.0, 1900 + i);
            let ch = synth_array_capture(&[(*d, sig)], 30.0, 0.0, 16000.0, 1300 + i).unwrap();
            let est = doa_estimate(&ArrayFrame::new(ch, 16000.0).unwrap(), &field, None).unwrap();
            (est.direction.theta_deg - d.theta_deg).abs() <= 5.0
                && wrap(est.direction.phi_deg - d.phi_deg).abs() <= 5.0
        })
        .count();
    checks.push((
        format!("snr 30 dB hits within 5 degrees: {hits}/20 >= 19"),
        hits >= 19,
    ));

    // snr 10 dB, rt60 300 ms: per-angle standard deviation <= 6 degrees
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    let dirs: Vec<Direction> = (0..6).map(|_| grid_dir(&mut rng, 30, 150)).collect();
    let worst = dirs
        .par_iter()
        .enumerate()
        .map(|(di, d)| {
            let errs: Vec<(f64, f64)> = (0..20u64)
                .map(|r| {
                    let tag = (di as u64) * 100 + r;
                    let sig = speech_like(FRAME_LEN, 16000.0, 7000 + tag);
                    let ch =
                        synth_array_capture(&[(*d, sig)], 10.0, 300.0, 16000.0, 8000 + tag)
                            .unwrap();
                    let est =
                        doa_estimate(&ArrayFrame::new(ch, 16000.0).unwrap(), &field, None)
                            .unwrap();
                    (
                        est.direction.theta_deg - d.theta_deg,
                        wrap(est.direction.phi_deg - d.phi_deg),
                    )
                })
                .collect();
            let std = |sel: &dyn Fn(&(f64, f64)) -> f64| {
                let v: Vec<f64> = errs.iter().map(sel).collect();
                let m = v.iter().sum::<f64>() / v.len() as f64;
                (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64).sqrt()
            };
            std(&|e| e.0).max(std(&|e| e.1))
        })
        .reduce(|| 0.0, f64::max);
    checks.push((
        format!("snr 10 dB / rt60 300 ms worst per-angle std {worst:.2} <= 6"),
        worst <= 6.0,
    ));

    let secs = start.elapsed().as_secs_f64();
    checks.push((format!("runtime {secs:.0} s <= 300 s"), secs <= 300.0));
    report(5, "doa accuracy", &checks);
}

#[test]
fn criterion_6_binaural_design() {
    use num_complex::Complex64;
    struct OmniTarget;
    impl item_audio::HrtfProvider for OmniTarget {
        fn gains(&self, _d: &Direction, _hz: f64) -> (Complex64, Complex64) {
            (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
        }
    }
    let mut checks = Vec::new();
    let field = SteeringField::analytic(15);

    let head = design_binaural_filters(&SphericalHeadHrtf::default(), &field, 16000.0).unwrap();
    let max_res = head.residual_rel.iter().cloned().fold(0.0, f64::max);
    checks.push((
        format!("normal-equations residual {max_res:.2e} <= 1e-9 at all bins"),
        max_res <= 1e-9,
    ));

    let omni = design_binaural_filters(&OmniTarget, &field, 16000.0).unwrap();
    let mut selector_err = 0.0f64;
    for ear in [&omni.bank.left, &omni.bank.right] {
        selector_err = selector_err.max((ear[0][0] - 1.0).abs());
        selector_err = selector_err.max(
            ear[0][1..]
                .iter()
                .chain(ear[1].iter())
                .chain(ear[2].iter())
                .chain(ear[3].iter())
                .fold(0.0f64, |a, &v| a.max(v.abs())),
        );
    }
    checks.push((
        format!("omni target recovers unit selector to {selector_err:.2e} <= 1e-9"),
        selector_err <= 1e-9,
    ));

    // overlap-add equals direct convolution
    let n = 8000;
    let capture = [
        speech_like(n, 16000.0, 61),
        speech_like(n, 16000.0, 62),
        speech_like(n, 16000.0, 63),
        speech_like(n, 16000.0, 64),
    ];
    let (l, r) = render_binaural(&capture, &head.bank, RenderParams::default()).unwrap();
    let mut dl = vec![0.0; n + 511];
    let mut dr = vec![0.0; n + 511];
    for ch in 0..4 {
        for (i, v) in item_audio::fft::direct_convolve(&capture[ch], &head.bank.left[ch])
            .into_iter()
            .enumerate()
        {
            dl[i] += v;
        }
        for (i, v) in item_audio::fft::direct_convolve(&capture[ch], &head.bank.right[ch])
            .into_iter()
            .enumerate()
        {
            dr[i] += v;
        }
    }
    let rms = |x: &[f64]| (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt();
    let err = rms(&l
        .iter()
        .zip(&dl)
        .map(|(a, b)| a - b)
        .collect::<Vec<_>>())
    .max(rms(&r
        .iter()
        .zip(&dr)
        .map(|(a, b)| a - b)
        .collect::<Vec<_>>()));
    let rel = err / rms(&dl).max(1e-300);
    checks.push((
        format!("overlap-add vs direct convolution rms {rel:.2e} <= 1e-9"),
        rel <= 1e-9,
    ));

    // a source on the left lands louder in the left ear
    let d = Direction::new(90.0, 90.0).unwrap();
    let sig = speech_like(16000, 16000.0, 65);
    let cap = synth_array_capture(&[(d, sig)], f64::INFINITY, 0.0, 16000.0, 66).unwrap();
    let (l, r) = render_binaural(&cap, &head.bank, RenderParams::default()).unwrap();
    let e = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    checks.push((
        format!("left-ear energy {:.3e} >= right-ear {:.3e}", e(&l), e(&r)),
        e(&l) >= e(&r),
    ));
    report(6, "binaural design", &checks);
}

#[test]
fn criterion_7_speaker_fusion() {
    use item_fusion::{update, FusionState};
    let mut checks = Vec::new();

    // brute-force reference re-derives the active speaker by rescanning
    fn reference(observations: &[Option<u32>], window: u32) -> Option<u32> {
        let mut active = None;
        for t in 0..observations.len() {
            if t + 1 < window as usize {
                continue;
            }
            let tail = &observations[t + 1 - window as usize..=t];
            if tail[0].is_some() && tail.iter().all(|o| *o == tail[0]) && active != tail[0] {
                active = tail[0];
            }
        }
        active
    }

    let alphabet = [None, Some(1u32), Some(2), Some(3)];
    let mut mismatches = 0u64;
    let mut strings = 0u64;
    for len in 0..=8usize {
        let total = alphabet.len().pow(len as u32);
        for mut code in 0..total {
            let mut obs = Vec::with_capacity(len);
            for _ in 0..len {
                obs.push(alphabet[code % alphabet.len()]);
                code /= alphabet.len();
            }
            let mut state = FusionState::default();
            for &o in &obs {
                state = update(state, o, 3).0;
            }
            strings += 1;
            if state.active != reference(&obs, 3) {
                mismatches += 1;
            }
        }
    }
    checks.push((
        format!("automaton equals reference on {strings} strings ({mismatches} mismatches)"),
        mismatches == 0,
    ));

    // scripted noise burst: no spurious switch events
    let tracks = |phi: f64| {
        let u = Direction::new(90.0, phi).unwrap().unit_vector();
        item_fusion::PersonTrack {
            id: if phi < 90.0 { 1 } else { 2 },
            position: [2.0 * u[0], 2.0 * u[1], 2.0 * u[2]],
            visible: true,
        }
    };
    let both = vec![tracks(30.0), tracks(120.0)];
    let mut steps = Vec::new();
    for t in 0..30u64 {
        let doa = match t {
            0..=4 => Some((90.0, 30.0, 1.0)),
            10 => Some((90.0, 120.0, 1.0)), // burst
            11 => None,
            12 => Some((90.0, 120.0, 1.0)), // burst again, reset in between
            13 => None,
            _ => Some((90.0, 30.0, 1.0)),
        };
        steps.push(item_fusion::ScenarioStep {
            t,
            doa,
            tracks: both.clone(),
            speaking: Some(1),
        });
    }
    let log = item_fusion::run_scenario(&steps, item_fusion::FusionConfig::default()).unwrap();
    let switches: Vec<u32> = log
        .iter()
        .filter_map(|e| match e.event {
            item_fusion::FusionEvent::Switch(id) => Some(id),
            _ => None,
        })
        .collect();
    checks.push((
        format!("noise bursts produced no spurious switches (switches: {switches:?})"),
        switches == vec![1],
    ));
    report(7, "speaker fusion", &checks);
}

#[test]
fn criterion_8_session_math() {
    use item_session::{
        build_topology, ClientId, LatencyModel, MediaCaps, Role, SessionId, SessionState,
        TopologyKind,
    };
    let mut checks = Vec::new();

    let make = |n: u64, topology: TopologyKind| SessionState {
        id: SessionId(1),
        participants: (1..=n).map(|c| (ClientId(c), Role::Active)).collect(),
        caps: (1..=n).map(|c| (ClientId(c), MediaCaps::default())).collect(),
        topology,
        translator: Some(ClientId(1)),
        creator: ClientId(1),
    };
    let mut adhoc_ok = true;
    let mut totals_ok = true;
    for n in 2..=10u64 {
        let r = build_topology(&make(n, TopologyKind::TranslatorAdHoc), 500.0).unwrap();
        for c in 2..=n {
            adhoc_ok &= r.nodes[&ClientId(c)].uplink_streams == 1;
        }
        totals_ok &= r.total_uplink_streams() as u64 == n * (n - 1);
        totals_ok &= r.total_downlink_streams() as u64 == n * (n - 1);
        let m = build_topology(&make(n, TopologyKind::FullMesh), 500.0).unwrap();
        totals_ok &= m.total_uplink_streams() as u64 == n * (n - 1);
        totals_ok &= m.total_downlink_streams() as u64 == n * (n - 1);
    }
    checks.push((
        "ad-hoc non-translator uplink stays 1 stream for N in [2,10]".to_string(),
        adhoc_ok,
    ));
    checks.push((
        "ad-hoc and full-mesh totals both equal N(N-1)".to_string(),
        totals_ok,
    ));

    let model = LatencyModel::default();
    let bounds = model.bounds_ms();
    checks.push((
        format!("analytic latency bounds {bounds:?} == (102, 165)"),
        bounds == (102.0, 165.0),
    ));
    let (samples, summary) = model.simulate(100_000, 9).unwrap();
    let within = samples.iter().all(|&s| (102.0..=165.0).contains(&s));
    checks.push((
        format!(
            "100000 sampled trials within bounds (min {:.2}, max {:.2})",
            summary.min_ms, summary.max_ms
        ),
        within,
    ));
    report(8, "session math", &checks);
}

#[test]
fn criterion_9_codec_integrity() {
    let f = &*FIXTURE;
    let mut checks = Vec::new();

    // decoded output equals encoder-side reconstruction over full GOPs
    let mut exact = true;
    for &qp in &QPS {
        let outs = &f.cells[&(qp, true, true)];
        for out in outs {
            let dec = decode_sequence(&out.bytes).expect("own stream decodes");
            exact &= dec
                .seq
                .frames()
                .iter()
                .zip(out.recon.frames())
                .all(|(a, b)| a == b);
        }
    }
    checks.push((
        "decoder reproduces encoder reconstruction bit-exactly".to_string(),
        exact,
    ));

    // Exp-Golomb roundtrip over the full code-number range
    let mut w = item_codec::bitstream::BitWriter::new();
    for v in 0..=(1u32 << 20) {
        w.put_ue(v);
    }
    let bytes = w.into_bytes();
    let mut r = item_codec::bitstream::BitReader::new(&bytes);
    let mut golomb_ok = true;
    for v in 0..=(1u32 << 20) {
        if r.get_ue().map(|u| u != v).unwrap_or(true) {
            golomb_ok = false;
            break;
        }
    }
    checks.push((
        "exp-golomb roundtrip for all code numbers in [0, 2^20]".to_string(),
        golomb_ok,
    ));

    // fuzzed bitstreams never panic the decoder
    let seed_bytes = &f.cells[&(24, true, true)][0].bytes;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut survived = true;
    for _ in 0..300 {
        let mut bytes = seed_bytes.clone();
        let flips = rng.random_range(1..32);
        for _ in 0..flips {
            let i = rng.random_range(0..bytes.len());
            bytes[i] ^= 1 << rng.random_range(0..8);
        }
        let result = std::panic::catch_unwind(|| {
            let _ = decode_sequence(&bytes);
        });
        survived &= result.is_ok();
    }
    for len in [0usize, 7, 64, 997] {
        let mut bytes = vec![0u8; len];
        rng.fill(&mut bytes[..]);
        survived &= std::panic::catch_unwind(|| {
            let _ = decode_sequence(&bytes);
        })
        .is_ok();
    }
    checks.push(("fuzzed bitstreams never crash the decoder".to_string(), survived));
    report(9, "codec integrity", &checks);
}

#[test]
fn criterion_10_determinism() {
    let mut checks = Vec::new();

    let mut rd_cfg = RdConfig {
        sequences: default_corpus(8),
        qps: vec![28],
        ..RdConfig::default()
    };
    rd_cfg.sequences.truncate(1);
    let a = run_rd_experiment(&rd_cfg).unwrap();
    let b = run_rd_experiment(&rd_cfg).unwrap();
    checks.push((
        "rd experiment reproduces byte-identical csv + summary".to_string(),
        a.csv == b.csv && a.summary_json == b.summary_json,
    ));

    let audio_cfg = AudioEvalConfig {
        realizations: 2,
        directions: 2,
        resolution_deg: 15,
        ..AudioEvalConfig::default()
    };
    let a = run_audio_eval(&audio_cfg).unwrap();
    let b = run_audio_eval(&audio_cfg).unwrap();
    checks.push((
        "audio eval reproduces byte-identical csv".to_string(),
        a.csv == b.csv,
    ));

    let s_cfg = SessionDemoConfig::default();
    let a = run_session_demo(&s_cfg).unwrap();
    let b = run_session_demo(&s_cfg).unwrap();
    checks.push((
        "session demo reproduces byte-identical outputs".to_string(),
        a.report_json == b.report_json
            && a.metrics_csv == b.metrics_csv
            && a.log_jsonl == b.log_jsonl,
    ));
    report(10, "determinism", &checks);
}
