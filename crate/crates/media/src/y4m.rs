//! YUV4MPEG2 reader/writer restricted to planar 4:2:0.
//!
//! The writer emits the canonical header `YUV4MPEG2 W<w> H<h> F<n>:<d> Ip
//! A1:1 C420` and plain `FRAME` separators; loading such a file and writing
//! it back is byte-identical. The reader additionally accepts the C420
//! sub-variants (`C420jpeg`, `C420mpeg2`, `C420paldv`) and ignores unknown
//! parameters.

use crate::{Frame, MediaError, VideoSequence};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

const SIGNATURE: &str = "YUV4MPEG2";

pub fn load_y4m<P: AsRef<Path>>(path: P) -> Result<VideoSequence, MediaError> {
    from_reader(&mut BufReader::new(std::fs::File::open(path)?))
}

pub fn write_y4m<P: AsRef<Path>>(path: P, seq: &VideoSequence) -> Result<(), MediaError> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    to_writer(&mut w, seq)?;
    w.flush()?;
    Ok(())
}

fn read_line<R: BufRead>(r: &mut R) -> Result<Option<String>, MediaError> {
    let mut buf = Vec::new();
    let n = r.read_until(b'\n', &mut buf)?;
    if n == 0 {
        return Ok(None);
    }
    if buf.last() != Some(&b'\n') {
        return Err(MediaError::Truncated);
    }
    buf.pop();
    String::from_utf8(buf)
        .map(Some)
        .map_err(|_| MediaError::MalformedHeader("non-UTF8 header".into()))
}

pub fn from_reader<R: BufRead>(r: &mut R) -> Result<VideoSequence, MediaError> {
    let header = read_line(r)?.ok_or_else(|| MediaError::MalformedHeader("empty file".into()))?;
    let mut tokens = header.split(' ');
    if tokens.next() != Some(SIGNATURE) {
        return Err(MediaError::MalformedHeader("missing signature".into()));
    }
    let mut width = None;
    let mut height = None;
    let mut fps = None;
    for tok in tokens {
        if tok.is_empty() {
            continue;
        }
        let (tag, val) = tok.split_at(1);
        match tag {
            "W" => {
                width = Some(val.parse::<usize>().map_err(|_| {
                    MediaError::MalformedHeader(format!("bad width {val:?}"))
                })?)
            }
            "H" => {
                height = Some(val.parse::<usize>().map_err(|_| {
                    MediaError::MalformedHeader(format!("bad height {val:?}"))
                })?)
            }
            "F" => {
                let (n, d) = val
                    .split_once(':')
                    .ok_or_else(|| MediaError::MalformedHeader(format!("bad rate {val:?}")))?;
                let n = n
                    .parse::<u32>()
                    .map_err(|_| MediaError::MalformedHeader(format!("bad rate {val:?}")))?;
                let d = d
                    .parse::<u32>()
                    .map_err(|_| MediaError::MalformedHeader(format!("bad rate {val:?}")))?;
                if n == 0 || d == 0 {
                    return Err(MediaError::MalformedHeader("zero frame rate".into()));
                }
                fps = Some((n, d));
            }
            "C" => match val {
                "420" | "420jpeg" | "420mpeg2" | "420paldv" => {}
                other => return Err(MediaError::UnsupportedSampling(other.to_string())),
            },
            // Interlace, aspect and extension parameters do not affect
            // plane layout for C420; ignore them.
            "I" | "A" | "X" => {}
            _ => {
                return Err(MediaError::MalformedHeader(format!(
                    "unknown parameter {tok:?}"
                )))
            }
        }
    }
    let width = width.ok_or_else(|| MediaError::MalformedHeader("missing W".into()))?;
    let height = height.ok_or_else(|| MediaError::MalformedHeader("missing H".into()))?;
    let fps = fps.ok_or_else(|| MediaError::MalformedHeader("missing F".into()))?;
    if width % 16 != 0 || height % 16 != 0 || width == 0 || height == 0 {
        return Err(MediaError::InvalidDimensions { width, height });
    }

    let ysize = width * height;
    let csize = (width / 2) * (height / 2);
    let mut frames = Vec::new();
    loop {
        let line = match read_line(r)? {
            None => break,
            Some(l) => l,
        };
        if line != "FRAME" && !line.starts_with("FRAME ") {
            return Err(MediaError::MalformedHeader(format!(
                "expected FRAME, got {line:?}"
            )));
        }
        let mut y = vec![0u8; ysize];
        let mut cb = vec![0u8; csize];
        let mut cr = vec![0u8; csize];
        r.read_exact(&mut y).map_err(|_| MediaError::Truncated)?;
        r.read_exact(&mut cb).map_err(|_| MediaError::Truncated)?;
        r.read_exact(&mut cr).map_err(|_| MediaError::Truncated)?;
        frames.push(Frame::from_planes(width, height, y, cb, cr)?);
    }
    if frames.is_empty() {
        return Err(MediaError::MalformedHeader("no frames".into()));
    }
    VideoSequence::new(frames, None, fps)
}

pub fn to_writer<W: Write>(w: &mut W, seq: &VideoSequence) -> Result<(), MediaError> {
    let (n, d) = seq.fps();
    writeln!(
        w,
        "{SIGNATURE} W{} H{} F{}:{} Ip A1:1 C420",
        seq.width(),
        seq.height(),
        n,
        d
    )?;
    for f in seq.frames() {
        writeln!(w, "FRAME")?;
        w.write_all(f.y())?;
        w.write_all(f.cb())?;
        w.write_all(f.cr())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_seq() -> VideoSequence {
        let f0 = Frame::constant(64, 48, (10, 100, 200)).unwrap();
        let f1 = Frame::constant(64, 48, (20, 110, 210)).unwrap();
        VideoSequence::new(vec![f0, f1], None, (30, 1)).unwrap()
    }

    #[test]
    fn roundtrip_two_frame_c420() {
        let seq = tiny_seq();
        let mut buf = Vec::new();
        to_writer(&mut buf, &seq).unwrap();
        let back = from_reader(&mut std::io::Cursor::new(&buf)).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back.width(), 64);
        assert_eq!(back.frames()[0], seq.frames()[0]);
        assert_eq!(back.frames()[1], seq.frames()[1]);
        // byte-identical rewrite
        let mut buf2 = Vec::new();
        to_writer(&mut buf2, &back).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn rejects_c444() {
        let data = b"YUV4MPEG2 W64 H48 F30:1 Ip A1:1 C444\nFRAME\n".to_vec();
        match from_reader(&mut std::io::Cursor::new(&data)) {
            Err(MediaError::UnsupportedSampling(s)) => assert_eq!(s, "444"),
            other => panic!("expected UnsupportedSampling, got {other:?}"),
        }
    }

    #[test]
    fn rejects_non_multiple_of_16() {
        let data = b"YUV4MPEG2 W60 H48 F30:1 C420\n".to_vec();
        assert!(matches!(
            from_reader(&mut std::io::Cursor::new(&data)),
            Err(MediaError::InvalidDimensions { .. })
        ));
    }

    #[test]
    fn truncated_frame_payload() {
        let seq = tiny_seq();
        let mut buf = Vec::new();
        to_writer(&mut buf, &seq).unwrap();
        buf.truncate(buf.len() - 10);
        assert!(matches!(
            from_reader(&mut std::io::Cursor::new(&buf)),
            Err(MediaError::Truncated)
        ));
    }

    #[test]
    fn default_sampling_is_c420() {
        // C parameter omitted: y4m defaults to 4:2:0
        let mut buf = b"YUV4MPEG2 W32 H32 F25:1\nFRAME\n".to_vec();
        buf.extend(std::iter::repeat_n(7u8, 32 * 32 + 2 * 16 * 16));
        let seq = from_reader(&mut std::io::Cursor::new(&buf)).unwrap();
        assert_eq!(seq.len(), 1);
        assert_eq!(seq.fps(), (25, 1));
    }
}
