//! Reconstruction ground truth: per-pixel 3D point targets unprojected from
//! depth maps, the depth-threshold validity mask, and a reference masked
//! smooth-L1 evaluator for the location loss.

use crate::camera::CameraSample;
use crate::error::{Error, Result};
use crate::math::Vec3;

/// World-frame 3D point per pixel, with validity flags.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMap {
    pub width: u32,
    pub height: u32,
    pub points: Vec<Vec3>,
    pub valid: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityMask {
    pub width: u32,
    pub height: u32,
    pub mask: Vec<bool>,
    pub threshold: f64,
}

/// Unproject a z-depth raster through its camera into world-frame points.
/// Pixels without a hit stay invalid with a zero point.
pub fn depth_to_points(depth: &[f64], hit_mask: &[bool], cam: &CameraSample) -> Result<PointMap> {
    let n = (cam.width * cam.height) as usize;
    if depth.len() != n || hit_mask.len() != n {
        return Err(Error::ResolutionMismatch {
            expected_w: cam.width,
            expected_h: cam.height,
            got_w: depth.len() as u32,
            got_h: hit_mask.len() as u32,
        });
    }
    let mut points = vec![Vec3::ZERO; n];
    let mut valid = vec![false; n];
    for py in 0..cam.height {
        for px in 0..cam.width {
            let i = (py * cam.width + px) as usize;
            let d = depth[i];
            if !hit_mask[i] || !d.is_finite() {
                continue;
            }
            points[i] = cam.camera_to_world(cam.unproject_camera(px, py, d));
            valid[i] = true;
        }
    }
    Ok(PointMap {
        width: cam.width,
        height: cam.height,
        points,
        valid,
    })
}

/// The loss mask: valid where the pixel hit geometry and its depth does not
/// exceed the threshold.
pub fn validity_mask(depth: &[f64], hit_mask: &[bool], threshold: f64, width: u32, height: u32) -> ValidityMask {
    let mask = depth
        .iter()
        .zip(hit_mask)
        .map(|(&d, &hit)| hit && d.is_finite() && d <= threshold)
        .collect();
    ValidityMask {
        width,
        height,
        mask,
        threshold,
    }
}

/// The scalar smooth-L1 kernel.
pub fn smooth_l1(e: f64, beta: f64) -> f64 {
    let a = e.abs();
    if a < beta {
        0.5 * e * e / beta
    } else {
        a - 0.5 * beta
    }
}

/// Masked mean over pixels and coordinates of the smooth-L1 error between
/// predicted and ground-truth point maps. With zero masked pixels the loss
/// is defined as 0 and flagged.
pub struct MaskedLoss {
    pub value: f64,
    pub masked_pixels: usize,
    pub empty_mask: bool,
}

pub fn masked_smooth_l1(pred: &[Vec3], gt: &PointMap, mask: &[bool], beta: f64) -> Result<MaskedLoss> {
    if pred.len() != gt.points.len() || mask.len() != gt.points.len() {
        return Err(Error::ResolutionMismatch {
            expected_w: gt.width,
            expected_h: gt.height,
            got_w: pred.len() as u32,
            got_h: mask.len() as u32,
        });
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for ((p, g), &m) in pred.iter().zip(&gt.points).zip(mask) {
        if !m {
            continue;
        }
        let e = *p - *g;
        sum += smooth_l1(e.x, beta) + smooth_l1(e.y, beta) + smooth_l1(e.z, beta);
        count += 1;
    }
    if count == 0 {
        return Ok(MaskedLoss {
            value: 0.0,
            masked_pixels: 0,
            empty_mask: true,
        });
    }
    Ok(MaskedLoss {
        value: sum / (3 * count) as f64,
        masked_pixels: count,
        empty_mask: false,
    })
}
