//! Camera sampling: clearance-constrained poses with randomized FoV, an
//! inner/outer split (outer cameras always look at the scene center, inner
//! cameras orient freely within pitch bounds), radial distance bins for the
//! outer shell, and the final random global pose scale.

use crate::bvh::{Bvh, SceneTriangle};
use crate::config::GenConfig;
use crate::error::{Error, Result};
use crate::floorplan::SceneBox;
use crate::math::{Mat3, Vec3};
use crate::rng::RandomStream;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CameraRegion {
    Inner,
    Outer,
}

/// One view's pose and intrinsics. Camera axes: +x right, +y down,
/// +z forward; `rotation` is world-from-camera with those axes as columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraSample {
    pub position: Vec3,
    pub rotation: Mat3,
    pub fov_y_deg: f64,
    pub width: u32,
    pub height: u32,
    pub region: CameraRegion,
}

impl CameraSample {
    pub fn forward(&self) -> Vec3 {
        self.rotation.col(2)
    }

    pub fn focal_px(&self) -> f64 {
        (self.height as f64 * 0.5) / (self.fov_y_deg.to_radians() * 0.5).tan()
    }

    pub fn principal_point(&self) -> (f64, f64) {
        (self.width as f64 * 0.5, self.height as f64 * 0.5)
    }

    /// World ray through the center of pixel (px, py).
    pub fn primary_ray(&self, px: u32, py: u32) -> (Vec3, Vec3) {
        let f = self.focal_px();
        let (cx, cy) = self.principal_point();
        let dir_cam = Vec3::new(
            (px as f64 + 0.5 - cx) / f,
            (py as f64 + 0.5 - cy) / f,
            1.0,
        );
        (self.position, self.rotation.mul_vec(dir_cam).normalized())
    }

    /// Project a world point to continuous pixel coordinates and camera
    /// z-depth. None when the point is at or behind the camera plane.
    pub fn project(&self, world: Vec3) -> Option<(f64, f64, f64)> {
        let p = self.rotation.mul_vec_transposed(world - self.position);
        if p.z <= 1e-12 {
            return None;
        }
        let f = self.focal_px();
        let (cx, cy) = self.principal_point();
        Some((cx + f * p.x / p.z, cy + f * p.y / p.z, p.z))
    }

    /// Camera-frame point for pixel (px, py) at z-depth `depth`.
    pub fn unproject_camera(&self, px: u32, py: u32, depth: f64) -> Vec3 {
        let f = self.focal_px();
        let (cx, cy) = self.principal_point();
        Vec3::new(
            (px as f64 + 0.5 - cx) / f * depth,
            (py as f64 + 0.5 - cy) / f * depth,
            depth,
        )
    }

    pub fn camera_to_world(&self, p: Vec3) -> Vec3 {
        self.rotation.mul_vec(p) + self.position
    }
}

/// World-from-camera rotation looking from `position` toward `target`.
/// Falls back to an alternate up axis when the view direction is parallel
/// to `up`.
pub fn look_at(position: Vec3, target: Vec3, up: Vec3) -> Mat3 {
    let forward = (target - position).normalized();
    let mut right = forward.cross(up);
    if right.length_sq() < 1e-16 {
        let alt = if forward.x.abs() < 0.9 { Vec3::X } else { Vec3::Y };
        right = forward.cross(alt);
    }
    let right = right.normalized();
    let down = forward.cross(right);
    Mat3::from_cols(right, down, forward)
}

/// True when the nearest surface is at least `d_min` away.
pub fn clearance(position: Vec3, bvh: &Bvh, tris: &[SceneTriangle], d_min: f64) -> bool {
    bvh.distance(tris, position) >= d_min
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraSet {
    pub cameras: Vec<CameraSample>,
    /// Global scale applied to positions (about the scene center) for
    /// export. 1.0 until `normalize_poses` runs.
    pub normalization_scale: f64,
    /// The clearance actually enforced; equals the configured minimum
    /// unless the one-shot relaxation fired.
    pub effective_min_clearance: f64,
}

struct Sampler<'a> {
    scene: &'a SceneBox,
    tris: &'a [SceneTriangle],
    bvh: &'a Bvh,
    cfg: &'a GenConfig,
}

impl Sampler<'_> {
    fn z_range(&self) -> (f64, f64) {
        let lo = self.cfg.cameras.min_clearance;
        let hi = self.scene.height * self.cfg.cameras.max_height_frac;
        (lo.min(hi), hi)
    }

    fn split_radius(&self) -> f64 {
        self.cfg.cameras.inner_split_frac
            * self.scene.half_extent_x.max(self.scene.half_extent_y)
    }

    fn outer_max_radius(&self, margin: f64) -> f64 {
        let mx = (self.scene.half_extent_x - margin).max(0.0);
        let my = (self.scene.half_extent_y - margin).max(0.0);
        (mx * mx + my * my).sqrt()
    }

    fn inside_margins(&self, p: Vec3, margin: f64) -> bool {
        p.x.abs() <= self.scene.half_extent_x - margin
            && p.y.abs() <= self.scene.half_extent_y - margin
    }

    /// One outer camera: draw a radial distance bin, then a position within
    /// it, looking at the scene center.
    fn outer(&self, stream: &mut RandomStream, d_min: f64) -> Option<CameraSample> {
        let c = &self.cfg.cameras;
        let r_lo = self.split_radius();
        let r_hi = self.outer_max_radius(d_min).max(r_lo + 1e-6);
        let bins = c.outer_distance_bins as f64;
        let (z_lo, z_hi) = self.z_range();
        for _ in 0..c.retry_budget {
            let bin = stream.uniform_index(c.outer_distance_bins as usize) as f64;
            let r = r_lo + (r_hi - r_lo) * (bin + stream.next_f64()) / bins;
            let theta = stream.uniform_in(0.0, TAU);
            let p = Vec3::new(r * theta.cos(), r * theta.sin(), stream.uniform_in(z_lo, z_hi));
            if !self.inside_margins(p, d_min) {
                continue;
            }
            if !clearance(p, self.bvh, self.tris, d_min) {
                continue;
            }
            return Some(CameraSample {
                position: p,
                rotation: look_at(p, self.scene.center(), Vec3::Z),
                fov_y_deg: stream.uniform(c.fov_deg),
                width: c.width,
                height: c.height,
                region: CameraRegion::Outer,
            });
        }
        None
    }

    /// One inner camera: free position within the split radius, random yaw,
    /// bounded pitch, zero roll.
    fn inner(&self, stream: &mut RandomStream, d_min: f64) -> Option<CameraSample> {
        let c = &self.cfg.cameras;
        let r_split = self.split_radius();
        let (z_lo, z_hi) = self.z_range();
        for _ in 0..c.retry_budget {
            let r = r_split * stream.next_f64().sqrt();
            let theta = stream.uniform_in(0.0, TAU);
            let p = Vec3::new(r * theta.cos(), r * theta.sin(), stream.uniform_in(z_lo, z_hi));
            if !self.inside_margins(p, d_min) {
                continue;
            }
            if !clearance(p, self.bvh, self.tris, d_min) {
                continue;
            }
            let yaw = stream.uniform_in(0.0, TAU);
            let pitch = stream.uniform(c.inner_pitch_deg).to_radians();
            // +pitch looks up; forward z-component is sin(pitch).
            let forward = Vec3::new(
                pitch.cos() * yaw.cos(),
                pitch.cos() * yaw.sin(),
                pitch.sin(),
            );
            return Some(CameraSample {
                position: p,
                rotation: look_at(p, p + forward, Vec3::Z),
                fov_y_deg: stream.uniform(c.fov_deg),
                width: c.width,
                height: c.height,
                region: CameraRegion::Inner,
            });
        }
        None
    }
}

/// Sample the scene's camera set in generation-frame coordinates. Clearance
/// failures relax the minimum distance once (x0.8); a second exhaustion
/// fails the scene.
pub fn sample_cameras(
    stream: &mut RandomStream,
    scene: &SceneBox,
    tris: &[SceneTriangle],
    bvh: &Bvh,
    cfg: &GenConfig,
    scene_index: u64,
) -> Result<CameraSet> {
    let sampler = Sampler {
        scene,
        tris,
        bvh,
        cfg,
    };
    let mut d_min = cfg.cameras.min_clearance;
    let mut relaxed = false;
    let mut cameras = Vec::with_capacity((cfg.cameras.outer_count + cfg.cameras.inner_count) as usize);
    let mut want_outer = cfg.cameras.outer_count;
    let mut want_inner = cfg.cameras.inner_count;
    while want_outer > 0 || want_inner > 0 {
        let sample = if want_outer > 0 {
            sampler.outer(stream, d_min)
        } else {
            sampler.inner(stream, d_min)
        };
        match sample {
            Some(cam) => {
                if want_outer > 0 {
                    want_outer -= 1;
                } else {
                    want_inner -= 1;
                }
                cameras.push(cam);
            }
            None if !relaxed => {
                relaxed = true;
                d_min *= 0.8;
            }
            None => return Err(Error::CameraSampling { scene_index }),
        }
    }
    Ok(CameraSet {
        cameras,
        normalization_scale: 1.0,
        effective_min_clearance: d_min,
    })
}

/// Scale all positions about the scene center by a random global factor,
/// recording it in the set. Rotations are untouched.
pub fn normalize_poses(
    stream: &mut RandomStream,
    set: &mut CameraSet,
    scene_center: Vec3,
    cfg: &GenConfig,
) {
    let s = stream.uniform(cfg.cameras.scale_range);
    for cam in &mut set.cameras {
        cam.position = scene_center + (cam.position - scene_center) * s;
    }
    set.normalization_scale = s;
}

/// Undo the export scaling for one camera, returning the generation-frame
/// pose used for rendering and clearance checks.
pub fn denormalized(cam: &CameraSample, scene_center: Vec3, scale: f64) -> CameraSample {
    let mut c = cam.clone();
    c.position = scene_center + (cam.position - scene_center) / scale;
    c
}
