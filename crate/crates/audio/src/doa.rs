//! Direction-of-arrival estimation: a minimum-variance (Capon) spatial
//! spectrum per frequency bin, summed over the analysis band, maximized
//! over the search grid.

use crate::covariance::{estimate_covariance, CovarianceStack};
use crate::field::SteeringField;
use crate::frame::ArrayFrame;
use crate::{AudioError, Direction};

#[derive(Debug, Clone)]
pub struct DoaEstimate {
    pub direction: Direction,
    pub peak: f64,
}

/// Combined spectrum over the band for every grid direction.
pub fn spatial_spectrum(
    stack: &CovarianceStack,
    field: &SteeringField,
    band: std::ops::Range<usize>,
) -> Result<Vec<f64>, AudioError> {
    if band.is_empty() || band.end > stack.bins.len() {
        return Err(AudioError::EmptyBand);
    }
    let mut spectrum = vec![0.0f64; field.len()];
    for k in band {
        let inv = stack.bins[k]
            .inverse()
            .expect("loaded covariance is invertible");
        for (d, s) in spectrum.iter_mut().enumerate() {
            let denom = match field.vector_real(d) {
                Some(a) => inv.quad_form_real(&a),
                None => inv.quad_form(&field.vector(d, k)),
            };
            *s += 1.0 / denom;
        }
    }
    Ok(spectrum)
}

/// Argmax of the combined spectrum; ties break toward smaller inclination,
/// then smaller azimuth (grid order).
pub fn doa_from_stack(
    stack: &CovarianceStack,
    field: &SteeringField,
    band: std::ops::Range<usize>,
) -> Result<DoaEstimate, AudioError> {
    let spectrum = spatial_spectrum(stack, field, band)?;
    let mut best = 0usize;
    for (i, &v) in spectrum.iter().enumerate() {
        if v > spectrum[best] {
            best = i;
        }
    }
    Ok(DoaEstimate {
        direction: field.directions[best],
        peak: spectrum[best],
    })
}

/// Full workflow on one frame with the default 300 Hz..Nyquist band.
pub fn doa_estimate(
    frame: &ArrayFrame,
    field: &SteeringField,
    band: Option<std::ops::Range<usize>>,
) -> Result<DoaEstimate, AudioError> {
    let stack = estimate_covariance(frame);
    let band = band.unwrap_or_else(|| stack.band_from_hz(300.0));
    doa_from_stack(&stack, field, band)
}
