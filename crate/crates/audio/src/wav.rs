//! Minimal RIFF/WAVE PCM16 reader and writer (mono, stereo, or the
//! 4-channel array layout). Samples map to f64 in [-1, 1].

use crate::AudioError;
use std::io::{Read, Write};
use std::path::Path;

pub fn write_wav<P: AsRef<Path>>(
    path: P,
    channels: &[Vec<f64>],
    sample_rate: u32,
) -> Result<(), AudioError> {
    if channels.is_empty() {
        return Err(AudioError::MalformedWav("no channels".into()));
    }
    let n = channels[0].len();
    if channels.iter().any(|c| c.len() != n) {
        return Err(AudioError::SourceLengthMismatch);
    }
    let nch = channels.len() as u32;
    let data_len = (n as u32) * nch * 2;
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(b"RIFF")?;
    f.write_all(&(36 + data_len).to_le_bytes())?;
    f.write_all(b"WAVE")?;
    f.write_all(b"fmt ")?;
    f.write_all(&16u32.to_le_bytes())?;
    f.write_all(&1u16.to_le_bytes())?; // PCM
    f.write_all(&(nch as u16).to_le_bytes())?;
    f.write_all(&sample_rate.to_le_bytes())?;
    f.write_all(&(sample_rate * nch * 2).to_le_bytes())?;
    f.write_all(&((nch * 2) as u16).to_le_bytes())?;
    f.write_all(&16u16.to_le_bytes())?;
    f.write_all(b"data")?;
    f.write_all(&data_len.to_le_bytes())?;
    for i in 0..n {
        for ch in channels {
            let v = (ch[i].clamp(-1.0, 1.0) * 32767.0).round() as i16;
            f.write_all(&v.to_le_bytes())?;
        }
    }
    f.flush()?;
    Ok(())
}

pub fn read_wav<P: AsRef<Path>>(path: P) -> Result<(Vec<Vec<f64>>, u32), AudioError> {
    let mut data = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut data)?;
    if data.len() < 12 || &data[0..4] != b"RIFF" || &data[8..12] != b"WAVE" {
        return Err(AudioError::MalformedWav("missing RIFF/WAVE header".into()));
    }
    let mut pos = 12usize;
    let mut fmt: Option<(u16, u32)> = None;
    let mut payload: Option<&[u8]> = None;
    while pos + 8 <= data.len() {
        let id = &data[pos..pos + 4];
        let size = u32::from_le_bytes(data[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body_end = pos + 8 + size;
        if body_end > data.len() {
            return Err(AudioError::MalformedWav("chunk overruns file".into()));
        }
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(AudioError::MalformedWav("fmt chunk too short".into()));
                }
                let format = u16::from_le_bytes(data[pos + 8..pos + 10].try_into().unwrap());
                let nch = u16::from_le_bytes(data[pos + 10..pos + 12].try_into().unwrap());
                let rate = u32::from_le_bytes(data[pos + 12..pos + 16].try_into().unwrap());
                let bits = u16::from_le_bytes(data[pos + 22..pos + 24].try_into().unwrap());
                if format != 1 || bits != 16 {
                    return Err(AudioError::MalformedWav(format!(
                        "only PCM16 supported (format {format}, {bits} bits)"
                    )));
                }
                if nch == 0 {
                    return Err(AudioError::MalformedWav("zero channels".into()));
                }
                fmt = Some((nch, rate));
            }
            b"data" => payload = Some(&data[pos + 8..body_end]),
            _ => {}
        }
        pos = body_end + size % 2;
    }
    let (nch, rate) = fmt.ok_or_else(|| AudioError::MalformedWav("missing fmt chunk".into()))?;
    let payload = payload.ok_or_else(|| AudioError::MalformedWav("missing data chunk".into()))?;
    let frame = nch as usize * 2;
    let n = payload.len() / frame;
    let mut channels = vec![Vec::with_capacity(n); nch as usize];
    for i in 0..n {
        for (c, ch) in channels.iter_mut().enumerate() {
            let off = i * frame + c * 2;
            let v = i16::from_le_bytes(payload[off..off + 2].try_into().unwrap());
            ch.push(v as f64 / 32767.0);
        }
    }
    Ok((channels, rate))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stereo_roundtrip() {
        let l: Vec<f64> = (0..500)
            .map(|i| (std::f64::consts::TAU * i as f64 / 50.0).sin() * 0.8)
            .collect();
        let r: Vec<f64> = l.iter().map(|v| -v).collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.wav");
        write_wav(&path, &[l.clone(), r], 16000).unwrap();
        let (ch, rate) = read_wav(&path).unwrap();
        assert_eq!(rate, 16000);
        assert_eq!(ch.len(), 2);
        for (a, b) in ch[0].iter().zip(l.iter()) {
            assert!((a - b).abs() < 1.0 / 32000.0);
        }
        assert!((ch[0][10] + ch[1][10]).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_pcm() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.wav");
        std::fs::write(&path, b"RIFF\x00\x00\x00\x00WAVEjunk").unwrap();
        assert!(read_wav(&path).is_err());
    }
}
