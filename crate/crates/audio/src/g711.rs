//! ITU-T G.711 mu-law companding, bit-compatible with the classic Sun
//! reference implementation.

const BIAS: i32 = 0x84;
const CLIP: i32 = 32635;

/// Encodes one 16-bit PCM sample to a mu-law byte.
pub fn mulaw_encode_sample(pcm: i16) -> u8 {
    let mut v = pcm as i32;
    let sign = if v < 0 {
        v = -v;
        0x80u8
    } else {
        0
    };
    if v > CLIP {
        v = CLIP;
    }
    v += BIAS;
    // segment = position of the highest set bit above bit 7
    let mut seg = 0u8;
    let mut tmp = v >> 7;
    while tmp > 1 && seg < 7 {
        tmp >>= 1;
        seg += 1;
    }
    let mantissa = ((v >> (seg + 3)) & 0x0F) as u8;
    !(sign | (seg << 4) | mantissa)
}

/// Decodes one mu-law byte to 16-bit PCM.
pub fn mulaw_decode_sample(byte: u8) -> i16 {
    let b = !byte;
    let sign = b & 0x80;
    let seg = (b >> 4) & 0x07;
    let mantissa = (b & 0x0F) as i32;
    let magnitude = (((mantissa << 3) + BIAS) << seg) - BIAS;
    if sign != 0 {
        (-magnitude) as i16
    } else {
        magnitude as i16
    }
}

pub fn g711_encode(pcm: &[i16]) -> Vec<u8> {
    pcm.iter().map(|&s| mulaw_encode_sample(s)).collect()
}

pub fn g711_decode(bytes: &[u8]) -> Vec<i16> {
    bytes.iter().map(|&b| mulaw_decode_sample(b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_mapping_values() {
        // values cross-checked against the published Sun tables
        assert_eq!(mulaw_encode_sample(0), 0xFF);
        assert_eq!(mulaw_encode_sample(-1), 0x7F);
        assert_eq!(mulaw_encode_sample(32635), 0x80);
        assert_eq!(mulaw_encode_sample(-32635), 0x00);
        assert_eq!(mulaw_encode_sample(8191), 0x9F);
        assert_eq!(mulaw_decode_sample(0xFF), 0);
        assert_eq!(mulaw_decode_sample(0x80), 32124);
        assert_eq!(mulaw_decode_sample(0x00), -32124);
        assert_eq!(mulaw_decode_sample(0xF0), 120);
    }

    #[test]
    fn decode_encode_is_identity_on_codewords() {
        for b in 0u8..=255 {
            let pcm = mulaw_decode_sample(b);
            let back = mulaw_encode_sample(pcm);
            // 0x7F and 0xFF both decode to 0; encode canonicalizes to 0xFF
            if b == 0x7F {
                assert_eq!(back, 0xFF);
            } else {
                assert_eq!(back, b, "codeword {b:#x} -> {pcm} -> {back:#x}");
            }
        }
    }

    #[test]
    fn companding_snr_on_full_scale_sine() {
        let n = 8000;
        let pcm: Vec<i16> = (0..n)
            .map(|i| {
                let t = i as f64 / 8000.0;
                (30000.0 * (std::f64::consts::TAU * 1000.0 * t).sin()).round() as i16
            })
            .collect();
        let decoded = g711_decode(&g711_encode(&pcm));
        let sig: f64 = pcm.iter().map(|&s| (s as f64) * (s as f64)).sum();
        let err: f64 = pcm
            .iter()
            .zip(decoded.iter())
            .map(|(&a, &b)| {
                let d = a as f64 - b as f64;
                d * d
            })
            .sum();
        let snr = 10.0 * (sig / err).log10();
        assert!(snr >= 30.0, "snr {snr:.2} dB");
    }

    #[test]
    fn encoded_byte_monotone_nonincreasing_for_nonnegative_pcm() {
        let mut prev = 0xFFu8;
        for v in 0..=32767i32 {
            let b = mulaw_encode_sample(v as i16);
            assert!(b <= prev, "non-monotone at {v}: {b:#x} > {prev:#x}");
            prev = b;
        }
    }
}
