//! Steering fields: the array response over the search grid. The analytic
//! model is frequency-flat and real; calibrated fields loaded from file may
//! carry one complex 4-vector per direction per frequency bin.
//!
//! File format: one ASCII header line `AVSFIELD r=<deg> bins=<n>
//! dirs=<count>` followed by little-endian f64 (re, im) pairs, direction-
//! major, then bin, then channel.

use crate::direction::{grid, steering_vector, Direction};
use crate::AudioError;
use num_complex::Complex64;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

#[derive(Debug, Clone)]
pub enum FieldVectors {
    /// One real 4-vector per direction, shared by all bins.
    Flat(Vec<[f64; 4]>),
    /// Direction-major complex vectors: v[dir * bins + bin][ch].
    PerBin { bins: usize, v: Vec<[Complex64; 4]> },
}

#[derive(Debug, Clone)]
pub struct SteeringField {
    pub resolution_deg: u32,
    pub directions: Vec<Direction>,
    pub vectors: FieldVectors,
}

impl SteeringField {
    /// Analytic collocated-XYZO field over the full grid.
    pub fn analytic(resolution_deg: u32) -> SteeringField {
        let directions = grid(resolution_deg);
        let vectors = directions.iter().map(steering_vector).collect();
        SteeringField {
            resolution_deg,
            directions,
            vectors: FieldVectors::Flat(vectors),
        }
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Complex steering vector for direction index `d` at frequency bin
    /// `bin`.
    pub fn vector(&self, d: usize, bin: usize) -> [Complex64; 4] {
        match &self.vectors {
            FieldVectors::Flat(v) => {
                let a = v[d];
                [
                    Complex64::new(a[0], 0.0),
                    Complex64::new(a[1], 0.0),
                    Complex64::new(a[2], 0.0),
                    Complex64::new(a[3], 0.0),
                ]
            }
            FieldVectors::PerBin { bins, v } => v[d * bins + bin.min(bins - 1)],
        }
    }

    /// Real fast path; `None` when the field is calibrated (complex).
    pub fn vector_real(&self, d: usize) -> Option<[f64; 4]> {
        match &self.vectors {
            FieldVectors::Flat(v) => Some(v[d]),
            FieldVectors::PerBin { .. } => None,
        }
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<(), AudioError> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        let (bins, count) = match &self.vectors {
            FieldVectors::Flat(v) => (1usize, v.len()),
            FieldVectors::PerBin { bins, v } => (*bins, v.len() / *bins),
        };
        writeln!(
            w,
            "AVSFIELD r={} bins={} dirs={}",
            self.resolution_deg, bins, count
        )?;
        match &self.vectors {
            FieldVectors::Flat(v) => {
                for a in v {
                    for ch in a {
                        w.write_all(&ch.to_le_bytes())?;
                        w.write_all(&0f64.to_le_bytes())?;
                    }
                }
            }
            FieldVectors::PerBin { v, .. } => {
                for a in v {
                    for ch in a {
                        w.write_all(&ch.re.to_le_bytes())?;
                        w.write_all(&ch.im.to_le_bytes())?;
                    }
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<SteeringField, AudioError> {
        let mut r = BufReader::new(std::fs::File::open(path)?);
        let mut header = String::new();
        r.read_line(&mut header)?;
        let header = header.trim_end();
        let mut resolution = None;
        let mut bins = None;
        let mut dirs = None;
        let mut parts = header.split(' ');
        if parts.next() != Some("AVSFIELD") {
            return Err(AudioError::MalformedField("missing AVSFIELD tag".into()));
        }
        for tok in parts {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| AudioError::MalformedField(format!("bad token {tok:?}")))?;
            let v: usize = v
                .parse()
                .map_err(|_| AudioError::MalformedField(format!("bad value in {tok:?}")))?;
            match k {
                "r" => resolution = Some(v as u32),
                "bins" => bins = Some(v),
                "dirs" => dirs = Some(v),
                _ => return Err(AudioError::MalformedField(format!("unknown key {k:?}"))),
            }
        }
        let resolution = resolution.ok_or_else(|| AudioError::MalformedField("missing r".into()))?;
        let bins = bins.ok_or_else(|| AudioError::MalformedField("missing bins".into()))?;
        let dirs = dirs.ok_or_else(|| AudioError::MalformedField("missing dirs".into()))?;
        if resolution == 0 || 180 % resolution != 0 {
            return Err(AudioError::MalformedField(format!(
                "resolution {resolution} does not divide 180"
            )));
        }
        let directions = grid(resolution);
        if directions.len() != dirs {
            return Err(AudioError::MalformedField(format!(
                "field has {dirs} directions, grid needs {}",
                directions.len()
            )));
        }
        let mut data = Vec::new();
        r.read_to_end(&mut data)?;
        let expected = dirs * bins * 4 * 16;
        if data.len() != expected {
            return Err(AudioError::MalformedField(format!(
                "expected {expected} payload bytes, got {}",
                data.len()
            )));
        }
        let mut v = Vec::with_capacity(dirs * bins);
        let mut off = 0;
        for _ in 0..dirs * bins {
            let mut a = [Complex64::new(0.0, 0.0); 4];
            for ch in a.iter_mut() {
                let re = f64::from_le_bytes(data[off..off + 8].try_into().unwrap());
                let im = f64::from_le_bytes(data[off + 8..off + 16].try_into().unwrap());
                *ch = Complex64::new(re, im);
                off += 16;
            }
            v.push(a);
        }
        let vectors = if bins == 1 && v.iter().all(|a| a.iter().all(|c| c.im == 0.0)) {
            FieldVectors::Flat(v.iter().map(|a| [a[0].re, a[1].re, a[2].re, a[3].re]).collect())
        } else {
            FieldVectors::PerBin { bins, v }
        };
        Ok(SteeringField {
            resolution_deg: resolution,
            directions,
            vectors,
        })
    }
}
