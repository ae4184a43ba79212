//! Distance-robust preprocessing: each scan point becomes a fixed-size,
//! depth-normalized window of the surrounding range profile.
//!
//! The angular opening of the window shrinks with distance so that the
//! window covers a constant width in Euclidean space, which keeps the
//! appearance of objects stable across depth and across sensors with
//! different angular resolutions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::Tensor;
use crate::scalar::Real;
use crate::scan::{LidarConfig, Scan};

/// Cutout window geometry.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CutoutParams {
    /// Window width in meters.
    pub width_bar: f64,
    /// Clip half-depth in meters; centered values outside `[-depth, depth]`
    /// are replaced by the bound before normalization.
    pub depth: f64,
    /// Number of resampled points per window.
    pub num_samples: usize,
}

impl Default for CutoutParams {
    fn default() -> Self {
        // 1.0 m x 1.0 m window with 56 samples.
        CutoutParams {
            width_bar: 1.0,
            depth: 0.5,
            num_samples: 56,
        }
    }
}

impl CutoutParams {
    /// Larger window used by the original multi-class detector; kept
    /// selectable for baseline comparisons.
    pub fn legacy() -> Self {
        CutoutParams {
            width_bar: 1.66,
            depth: 1.0,
            num_samples: 48,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width_bar > 0.0) {
            return Err(Error::Validation("width_bar must be > 0".into()));
        }
        if !(self.depth > 0.0) {
            return Err(Error::Validation("depth must be > 0".into()));
        }
        if self.num_samples < 2 {
            return Err(Error::Validation("num_samples must be >= 2".into()));
        }
        Ok(())
    }
}

/// One normalized window per beam, values in `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct CutoutBatch<T: Real> {
    /// `[num_points, num_samples]`, row n belongs to beam n.
    pub values: Tensor<T>,
    /// Range each cutout was centered on, in meters.
    pub center_ranges: Vec<f64>,
    /// Beam angle of each cutout, in radians.
    pub center_angles: Vec<f64>,
}

/// Angular opening of a window of width `width_bar` centered at range `s`.
///
/// Strictly decreasing in `s`: nearer points need a wider angle to cover the
/// same Euclidean width.
pub fn angular_opening(s: f64, width_bar: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "center range must be > 0, got {s}"
        )));
    }
    Ok(2.0 * (0.5 * width_bar / s).atan())
}

/// Builds one cutout per beam of a sanitized scan.
pub fn build_cutouts<T: Real>(
    scan: &Scan,
    config: &LidarConfig,
    params: &CutoutParams,
) -> Result<CutoutBatch<T>> {
    build_cutouts_at(&scan.ranges, &scan.ranges, config, params)
}

/// Builds cutouts sampling `profile` around windows centered on `centers`.
///
/// The standard path passes the same slice twice. The backward-looking
/// fusion baseline re-samples *past* profiles at the *current* scan's
/// centers, so both inputs are exposed crate-internally.
pub(crate) fn build_cutouts_at<T: Real>(
    profile: &[f64],
    centers: &[f64],
    config: &LidarConfig,
    params: &CutoutParams,
) -> Result<CutoutBatch<T>> {
    params.validate()?;
    config.validate()?;
    let n_beams = config.num_points;
    if profile.len() != n_beams || centers.len() != n_beams {
        return Err(Error::Shape(format!(
            "profile {} / centers {} vs config {}",
            profile.len(),
            centers.len(),
            n_beams
        )));
    }
    let m = params.num_samples;
    let increment = config.angle_increment();
    let inv_depth = 1.0 / params.depth;

    let mut values = vec![T::zero(); n_beams * m];
    let mut center_angles = Vec::with_capacity(n_beams);
    for n in 0..n_beams {
        let s = centers[n];
        let theta = config.beam_angle(n);
        center_angles.push(theta);
        let opening = angular_opening(s, params.width_bar)?;
        let start = theta - opening / 2.0;
        let step = opening / (m - 1) as f64;
        let row = &mut values[n * m..(n + 1) * m];
        for (i, out) in row.iter_mut().enumerate() {
            let target = start + i as f64 * step;
            // Continuous beam index, clamped to the fov edges.
            let u = ((target + config.fov / 2.0) / increment)
                .clamp(0.0, (n_beams - 1) as f64);
            let i0 = u.floor() as usize;
            let i1 = (i0 + 1).min(n_beams - 1);
            let frac = u - i0 as f64;
            let sampled = profile[i0] * (1.0 - frac) + profile[i1] * frac;
            let centered = (sampled - s).clamp(-params.depth, params.depth);
            *out = T::from_f64(centered * inv_depth);
        }
    }
    Ok(CutoutBatch {
        values: Tensor::from_vec(vec![n_beams, m], values),
        center_ranges: centers.to_vec(),
        center_angles,
    })
}
