//! Encoder/decoder integrity: bit-exact reconstruction, corruption
//! handling, and decoder robustness against arbitrary inputs.

use item_codec::{decode_sequence, encode_sequence, CodecConfig, DecisionPath};
use item_media::{synth_chat_sequence, SynthSpec, VideoSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn corpus_seq(seed: u64, frames: usize) -> VideoSequence {
    synth_chat_sequence(&SynthSpec {
        seed,
        frame_count: frames,
        motion_amplitude: 1.5,
        lighting_flicker: 4,
        gesture_rate: 1.0,
        ..SynthSpec::default()
    })
    .unwrap()
}

fn keyed(seq: &VideoSequence) -> VideoSequence {
    let key = item_chroma::KeyColor::default();
    let frames = seq
        .frames()
        .iter()
        .zip(seq.masks().unwrap())
        .map(|(f, m)| item_chroma::apply_key(f, m, key).unwrap())
        .collect();
    seq.with_frames(frames).unwrap()
}

#[test]
fn decode_matches_encoder_reconstruction_across_gop() {
    let seq = corpus_seq(11, 14);
    for path in [DecisionPath::Fast, DecisionPath::Full] {
        let cfg = CodecConfig {
            qp: 30,
            gop: 5,
            search_range: 4,
            ..CodecConfig::default()
        };
        let out = encode_sequence(&seq, &cfg, path).unwrap();
        let dec = decode_sequence(&out.bytes).unwrap();
        assert_eq!(dec.seq.len(), seq.len());
        for (d, r) in dec.seq.frames().iter().zip(out.recon.frames()) {
            assert_eq!(d, r, "decoded frame differs from encoder reconstruction");
        }
    }
}

#[test]
fn single_intra_frame_roundtrip() {
    let seq = corpus_seq(3, 1);
    let cfg = CodecConfig {
        qp: 20,
        ..CodecConfig::default()
    };
    let out = encode_sequence(&seq, &cfg, DecisionPath::Fast).unwrap();
    let dec = decode_sequence(&out.bytes).unwrap();
    assert_eq!(dec.seq.frames()[0], out.recon.frames()[0]);
}

#[test]
fn keyed_sequence_roundtrip() {
    let seq = keyed(&corpus_seq(17, 8));
    let cfg = CodecConfig {
        qp: 32,
        gop: 4,
        search_range: 4,
        ..CodecConfig::default()
    };
    let out = encode_sequence(&seq, &cfg, DecisionPath::Fast).unwrap();
    let dec = decode_sequence(&out.bytes).unwrap();
    for (d, r) in dec.seq.frames().iter().zip(out.recon.frames()) {
        assert_eq!(d, r);
    }
}

#[test]
fn truncated_streams_error_not_crash() {
    let seq = corpus_seq(5, 4);
    let cfg = CodecConfig {
        qp: 28,
        gop: 4,
        search_range: 4,
        ..CodecConfig::default()
    };
    let out = encode_sequence(&seq, &cfg, DecisionPath::Fast).unwrap();
    for cut in [0, 5, 20, 37, out.bytes.len() / 2, out.bytes.len() - 1] {
        let truncated = &out.bytes[..cut];
        assert!(decode_sequence(truncated).is_err(), "cut at {cut} accepted");
    }
}

#[test]
fn bad_magic_rejected() {
    let seq = corpus_seq(5, 1);
    let out = encode_sequence(&seq, &CodecConfig::default(), DecisionPath::Fast).unwrap();
    let mut bytes = out.bytes.clone();
    bytes[0] ^= 0xFF;
    assert!(decode_sequence(&bytes).is_err());
}

#[test]
fn payload_bit_flips_never_accepted_silently() {
    let seq = corpus_seq(23, 5);
    let cfg = CodecConfig {
        qp: 26,
        gop: 5,
        search_range: 4,
        ..CodecConfig::default()
    };
    let out = encode_sequence(&seq, &cfg, DecisionPath::Fast).unwrap();
    let header_len = item_codec::encoder::HEADER_LEN;
    let payload_bits = (out.bytes.len() - header_len) * 8;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..120 {
        let bit = rng.random_range(0..payload_bits);
        let mut bytes = out.bytes.clone();
        bytes[header_len + bit / 8] ^= 0x80 >> (bit % 8);
        match decode_sequence(&bytes) {
            Err(_) => {}
            Ok(dec) => {
                let differs = dec
                    .seq
                    .frames()
                    .iter()
                    .zip(out.recon.frames())
                    .any(|(a, b)| a != b);
                assert!(differs, "flipped payload bit {bit} decoded identically");
            }
        }
    }
}

#[test]
fn random_garbage_never_panics() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for len in [0usize, 3, 8, 37, 64, 256, 4096] {
        for _ in 0..40 {
            let mut bytes = vec![0u8; len];
            rng.fill(&mut bytes[..]);
            let _ = decode_sequence(&bytes);
        }
    }
    // garbage behind a valid header shape
    let seq = corpus_seq(1, 1);
    let valid = encode_sequence(&seq, &CodecConfig::default(), DecisionPath::Fast)
        .unwrap()
        .bytes;
    for _ in 0..60 {
        let mut bytes = valid.clone();
        let n = rng.random_range(1..bytes.len());
        for _ in 0..n {
            let i = rng.random_range(0..bytes.len());
            bytes[i] = rng.random();
        }
        let _ = decode_sequence(&bytes);
    }
}
