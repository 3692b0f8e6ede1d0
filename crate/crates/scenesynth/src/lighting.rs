//! Lighting rig: ever-present ambient light, probabilistic sunlight with
//! windows carved into the sun-facing walls (optionally barred or glazed),
//! luminous sticks and free-floating light bulbs.

use crate::bvh::{Bvh, SceneTriangle};
use crate::compose::ObjectSpec;
use crate::config::GenConfig;
use crate::floorplan::{SceneBox, WallId, WALLS};
use crate::material::{make_glass, sample_base_material, Material};
use crate::math::{hsv_to_rgb, Vec2, Vec3};
use crate::rng::RandomStream;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbientLight {
    pub color: Vec3,
    pub strength: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SunLight {
    /// Unit travel direction of the light; always tilted downward.
    pub direction: Vec3,
    pub color: Vec3,
    pub strength: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bulb {
    pub position: Vec3,
    pub color: Vec3,
    pub strength: f64,
    pub radius: f64,
    /// Slot of the emissive sphere mesh that makes the bulb visible.
    pub material_slot: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LightingRig {
    pub ambient: AmbientLight,
    pub sun: Option<SunLight>,
    pub bulbs: Vec<Bulb>,
    /// Material slots turned emissive by the luminous-objects pass.
    pub emissive_slots: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarSpec {
    pub divisions_along: u32,
    pub divisions_vertical: u32,
    pub thickness: f64,
    pub material_slot: u32,
}

/// A rectangular hole in one wall, in wall-local coordinates:
/// x = position along the wall's horizontal axis, y = height above the
/// floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowCutout {
    pub wall: WallId,
    pub min: Vec2,
    pub max: Vec2,
    pub glass_slot: Option<u32>,
    pub bars: Option<BarSpec>,
}

impl WindowCutout {
    pub fn center(&self) -> Vec2 {
        Vec2::new(
            (self.min.x + self.max.x) * 0.5,
            (self.min.y + self.max.y) * 0.5,
        )
    }

    /// Wall-local (along, height) to world, at the given coordinate along
    /// the wall normal.
    pub fn to_world(&self, local: Vec2, normal_coord: f64) -> Vec3 {
        match self.wall.normal_axis() {
            0 => Vec3::new(normal_coord, local.x, local.y),
            _ => Vec3::new(local.x, normal_coord, local.y),
        }
    }

    pub fn overlaps(&self, other: &WindowCutout) -> bool {
        self.wall == other.wall
            && self.min.x < other.max.x
            && other.min.x < self.max.x
            && self.min.y < other.max.y
            && other.min.y < self.max.y
    }
}

/// Hue-free light tint: saturation bounded by config, value 1.
pub fn sample_light_color(stream: &mut RandomStream, cfg: &GenConfig) -> Vec3 {
    let h = stream.next_f64();
    let s = stream.uniform(cfg.lighting.light_saturation);
    hsv_to_rgb(h, s, 1.0)
}

pub fn sample_ambient(stream: &mut RandomStream, cfg: &GenConfig) -> AmbientLight {
    AmbientLight {
        color: sample_light_color(stream, cfg),
        strength: cfg.lighting.ambient_strength,
    }
}

/// Sun present with the configured probability; azimuth free, elevation in
/// the configured band so the travel direction always tilts downward.
pub fn sample_sun(stream: &mut RandomStream, cfg: &GenConfig) -> Option<SunLight> {
    if !stream.bernoulli(cfg.lighting.sun.prob) {
        return None;
    }
    let azimuth = stream.uniform_in(0.0, TAU);
    let elevation = stream.uniform(cfg.lighting.sun.elevation_deg).to_radians();
    let toward_sun = Vec3::new(
        elevation.cos() * azimuth.cos(),
        elevation.cos() * azimuth.sin(),
        elevation.sin(),
    );
    Some(SunLight {
        direction: -toward_sun,
        color: sample_light_color(stream, cfg),
        strength: stream.uniform(cfg.lighting.sun.strength),
    })
}

/// Walls whose outward normal faces the sun.
pub fn sunlit_walls(sun_direction: Vec3) -> Vec<WallId> {
    WALLS
        .iter()
        .copied()
        .filter(|w| w.outward_normal().dot(-sun_direction) > 1e-9)
        .collect()
}

/// Carve 1..n window cutouts into the sun-facing walls. Glass panes and
/// window bars allocate material slots in `materials`.
pub fn carve_windows(
    stream: &mut RandomStream,
    scene: &SceneBox,
    sun_direction: Vec3,
    materials: &mut Vec<Material>,
    cfg: &GenConfig,
) -> Vec<WindowCutout> {
    let sun_cfg = &cfg.lighting.sun;
    let mut candidates = sunlit_walls(sun_direction);
    if candidates.is_empty() {
        // Near-vertical sun: fall back to a random wall.
        candidates.push(WALLS[stream.uniform_index(4)]);
    }
    let count = stream.uniform_count(sun_cfg.window_count);
    let mut windows: Vec<WindowCutout> = Vec::new();
    for _ in 0..count {
        let wall = candidates[stream.uniform_index(candidates.len())];
        let wall_len = 2.0 * scene.half_extent(wall.along_axis());
        let margin_a = 0.02 * wall_len;
        let margin_z = 0.02 * scene.height;
        let mut placed = None;
        for _ in 0..20 {
            let w = stream.uniform(sun_cfg.window_size_frac) * wall_len;
            let h = stream.uniform(sun_cfg.window_size_frac) * scene.height;
            let half = scene.half_extent(wall.along_axis());
            let a0 = stream.uniform_in(-half + margin_a, half - margin_a - w);
            let z0 = stream.uniform_in(margin_z, scene.height - margin_z - h);
            let cand = WindowCutout {
                wall,
                min: Vec2::new(a0, z0),
                max: Vec2::new(a0 + w, z0 + h),
                glass_slot: None,
                bars: None,
            };
            if !windows.iter().any(|x| x.overlaps(&cand)) {
                placed = Some(cand);
                break;
            }
        }
        let Some(mut window) = placed else { continue };
        if stream.bernoulli(sun_cfg.window_glass_prob) {
            window.glass_slot = Some(materials.len() as u32);
            materials.push(make_glass(stream, cfg));
        }
        if stream.bernoulli(sun_cfg.window_bar_prob) {
            let slot = materials.len() as u32;
            materials.push(sample_base_material(stream, cfg));
            window.bars = Some(BarSpec {
                divisions_along: stream.uniform_count(sun_cfg.bar_divisions),
                divisions_vertical: stream.uniform_count(sun_cfg.bar_divisions),
                thickness: sun_cfg.bar_thickness,
                material_slot: slot,
            });
        }
        windows.push(window);
    }
    windows
}

/// Strength draw shared by luminous sticks and bulbs: mostly the primary
/// band, occasionally boosted to simulate lights in dark rooms.
fn draw_strength(
    stream: &mut RandomStream,
    primary: crate::config::Range,
    primary_prob: f64,
    boosted: crate::config::Range,
) -> f64 {
    if stream.bernoulli(primary_prob) {
        stream.uniform(primary)
    } else {
        stream.uniform(boosted)
    }
}

/// Turn eligible stick/axis-aligned slots emissive. Transmissive slots are
/// skipped (glass can never be emissive). Returns the slots changed.
pub fn assign_luminous_slots(
    stream: &mut RandomStream,
    objects: &[ObjectSpec],
    materials: &mut [Material],
    cfg: &GenConfig,
) -> Vec<u32> {
    let lum = &cfg.lighting.luminous;
    if !stream.bernoulli(lum.prob) {
        return Vec::new();
    }
    let mut slots = Vec::new();
    for obj in objects {
        if !obj.category.is_luminous_candidate() {
            continue;
        }
        for member in &obj.members {
            let slot = member.material_slot as usize;
            if materials[slot].transmissive {
                continue;
            }
            if !stream.bernoulli(lum.slot_prob) {
                continue;
            }
            materials[slot].emissive_strength =
                draw_strength(stream, lum.strength_primary, lum.strength_primary_prob, lum.strength_boosted);
            materials[slot].emissive_color = sample_light_color(stream, cfg);
            slots.push(slot as u32);
        }
    }
    slots
}

/// Place bulbs in free space: point lights plus small emissive spheres so
/// they are visible in renders. Placement failures shrink the bulb count.
pub fn place_bulbs(
    stream: &mut RandomStream,
    scene: &SceneBox,
    tris: &[SceneTriangle],
    bvh: &Bvh,
    materials: &mut Vec<Material>,
    cfg: &GenConfig,
) -> Vec<Bulb> {
    let bc = &cfg.lighting.bulbs;
    let count = stream.uniform_count(bc.count);
    let mut bulbs = Vec::new();
    let margin = bc.radius + 0.05;
    for _ in 0..count {
        let mut placed = None;
        for _ in 0..40 {
            let p = Vec3::new(
                stream.uniform_in(-scene.half_extent_x + margin, scene.half_extent_x - margin),
                stream.uniform_in(-scene.half_extent_y + margin, scene.half_extent_y - margin),
                stream.uniform_in(margin, scene.height - margin),
            );
            if bvh.distance(tris, p) > bc.radius {
                placed = Some(p);
                break;
            }
        }
        let Some(position) = placed else { continue };
        let color = sample_light_color(stream, cfg);
        let strength =
            draw_strength(stream, bc.strength_primary, bc.strength_primary_prob, bc.strength_boosted);
        let slot = materials.len() as u32;
        let mut glow = sample_base_material(stream, cfg);
        glow.texture = crate::material::TextureKind::Solid { color };
        glow.emissive_strength = strength.max(1.0);
        glow.emissive_color = color;
        glow.transmissive = false;
        materials.push(glow);
        bulbs.push(Bulb {
            position,
            color,
            strength,
            radius: bc.radius,
            material_slot: slot,
        });
    }
    bulbs
}
