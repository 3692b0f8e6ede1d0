//! Generator configuration.
//!
//! Every tunable of the pipeline lives here, one field per parameter-table
//! entry, so a run is fully described by `(GenConfig, Seed)`. The default
//! value of each field is the published table value; configs are loadable
//! from TOML and the default config round-trips unchanged.

use crate::error::{Error, Result};
use crate::primitives::PrimitiveKind;
use serde::{Deserialize, Serialize};

/// Closed real interval. Sampling draws uniformly from `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub fn new(lo: f64, hi: f64) -> Result<Range> {
        let r = Range { lo, hi };
        r.validate("range")?;
        Ok(r)
    }

    pub fn validate(&self, what: &str) -> Result<()> {
        if !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::config(format!("{what}: bounds must be finite")));
        }
        if self.lo > self.hi {
            return Err(Error::config(format!(
                "{what}: lo {} exceeds hi {}",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Shrink the upper bound to `max_hi`, never below `lo`.
    pub fn clamped_hi(&self, max_hi: f64) -> Range {
        Range {
            lo: self.lo,
            hi: self.hi.min(max_hi).max(self.lo),
        }
    }
}

impl From<[f64; 2]> for Range {
    fn from(a: [f64; 2]) -> Self {
        Range { lo: a[0], hi: a[1] }
    }
}

impl From<Range> for [f64; 2] {
    fn from(r: Range) -> Self {
        [r.lo, r.hi]
    }
}

/// Inclusive integer count range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[u32; 2]", into = "[u32; 2]")]
pub struct CountRange {
    pub lo: u32,
    pub hi: u32,
}

impl CountRange {
    pub fn new(lo: u32, hi: u32) -> CountRange {
        CountRange { lo, hi }
    }

    pub fn validate(&self, what: &str) -> Result<()> {
        if self.lo > self.hi {
            return Err(Error::config(format!(
                "{what}: lo {} exceeds hi {}",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    pub fn contains(&self, v: u32) -> bool {
        v >= self.lo && v <= self.hi
    }
}

impl From<[u32; 2]> for CountRange {
    fn from(a: [u32; 2]) -> Self {
        CountRange { lo: a[0], hi: a[1] }
    }
}

impl From<CountRange> for [u32; 2] {
    fn from(r: CountRange) -> Self {
        [r.lo, r.hi]
    }
}

/// Discrete distribution over `items`. Probabilities must be nonnegative and
/// sum to 1 within 1e-6 (table rounding is tolerated and renormalized away);
/// anything further off is rejected as a configuration error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Categorical<T> {
    pub items: Vec<T>,
    pub probs: Vec<f64>,
}

impl<T> Categorical<T> {
    pub fn new(items: Vec<T>, probs: Vec<f64>) -> Result<Categorical<T>> {
        let c = Categorical { items, probs };
        c.validate("categorical")?;
        Ok(c)
    }

    pub fn validate(&self, what: &str) -> Result<()> {
        if self.items.len() != self.probs.len() {
            return Err(Error::config(format!(
                "{what}: {} items but {} probabilities",
                self.items.len(),
                self.probs.len()
            )));
        }
        if self.items.is_empty() {
            return Err(Error::config(format!("{what}: empty")));
        }
        if self.probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::config(format!(
                "{what}: probabilities must be finite and nonnegative"
            )));
        }
        let sum: f64 = self.probs.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::config(format!(
                "{what}: probabilities sum to {sum}, expected 1 within 1e-6"
            )));
        }
        Ok(())
    }

    /// Map a uniform draw in [0,1) to an item, renormalizing on the fly.
    pub fn pick(&self, u: f64) -> &T {
        let total: f64 = self.probs.iter().sum();
        let mut acc = 0.0;
        for (item, p) in self.items.iter().zip(&self.probs) {
            acc += p / total;
            if u < acc {
                return item;
            }
        }
        self.items.last().expect("validated non-empty")
    }
}

fn uniform_probs(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

// ---------------------------------------------------------------------------
// Scene box and floor plan
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneCfg {
    /// Full XY side length, sampled independently per axis.
    pub size_range: Range,
    pub height_range: Range,
    pub wall_thickness: f64,
}

impl Default for SceneCfg {
    fn default() -> Self {
        SceneCfg {
            size_range: Range { lo: 17.0, hi: 30.0 },
            height_range: Range { lo: 10.0, hi: 15.0 },
            wall_thickness: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LargeBoxCfg {
    pub size_range: Range,
    pub count: CountRange,
}

impl Default for LargeBoxCfg {
    fn default() -> Self {
        LargeBoxCfg {
            size_range: Range { lo: 4.0, hi: 8.0 },
            count: CountRange::new(2, 5),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmallBoxCfg {
    pub size_range: Range,
    pub count: CountRange,
    pub on_ground_prob: f64,
    pub on_ground_height: Range,
    pub atop_height: Range,
}

impl Default for SmallBoxCfg {
    fn default() -> Self {
        SmallBoxCfg {
            size_range: Range { lo: 2.0, hi: 4.0 },
            count: CountRange::new(4, 8),
            on_ground_prob: 0.5,
            on_ground_height: Range { lo: 2.0, hi: 6.0 },
            atop_height: Range { lo: 2.0, hi: 4.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OnRoofBoxCfg {
    pub size_range: Range,
    pub count: CountRange,
    pub thin_prob: f64,
    pub thin_height: Range,
    pub thick_height: Range,
}

impl Default for OnRoofBoxCfg {
    fn default() -> Self {
        OnRoofBoxCfg {
            size_range: Range { lo: 2.0, hi: 5.0 },
            count: CountRange::new(2, 4),
            thin_prob: 0.5,
            thin_height: Range { lo: 0.5, hi: 1.5 },
            thick_height: Range { lo: 2.0, hi: 4.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OnWallBoxCfg {
    pub size_range: Range,
    pub count: CountRange,
    pub thin_prob: f64,
    /// Extent away from the wall plane for the thin subtype.
    pub thin_depth: Range,
    pub thick_depth: Range,
}

impl Default for OnWallBoxCfg {
    fn default() -> Self {
        OnWallBoxCfg {
            size_range: Range { lo: 2.0, hi: 5.0 },
            count: CountRange::new(3, 6),
            thin_prob: 0.5,
            thin_depth: Range { lo: 0.5, hi: 1.5 },
            thick_depth: Range { lo: 2.0, hi: 4.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WireframeBoxCfg {
    pub presence_prob: f64,
    pub size_range: Range,
    pub height_range: Range,
    pub count: CountRange,
}

impl Default for WireframeBoxCfg {
    fn default() -> Self {
        WireframeBoxCfg {
            presence_prob: 0.8,
            size_range: Range { lo: 3.0, hi: 6.0 },
            height_range: Range { lo: 3.0, hi: 6.0 },
            count: CountRange::new(1, 3),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StickBoxCfg {
    /// Drawn length, clamped to the span actually available in the scene.
    pub length_range: Range,
    pub on_wall_size: Range,
    pub on_wall_count: CountRange,
    pub in_space_prob: f64,
    pub in_space_size: Range,
    pub in_space_count: CountRange,
}

impl Default for StickBoxCfg {
    fn default() -> Self {
        StickBoxCfg {
            length_range: Range { lo: 3.4, hi: 18.0 },
            on_wall_size: Range { lo: 0.1, hi: 0.6 },
            on_wall_count: CountRange::new(5, 16),
            in_space_prob: 0.5,
            in_space_size: Range { lo: 0.8, hi: 1.8 },
            in_space_count: CountRange::new(2, 6),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AxisAlignedBoxCfg {
    pub presence_prob: f64,
    pub size_range: Range,
    pub count: CountRange,
    pub height_range: Range,
}

impl Default for AxisAlignedBoxCfg {
    fn default() -> Self {
        AxisAlignedBoxCfg {
            presence_prob: 0.7,
            size_range: Range { lo: 2.0, hi: 5.0 },
            count: CountRange::new(1, 2),
            height_range: Range { lo: 0.2, hi: 1.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct BoxesCfg {
    pub large: LargeBoxCfg,
    pub small: SmallBoxCfg,
    pub on_roof: OnRoofBoxCfg,
    pub on_wall: OnWallBoxCfg,
    pub wireframe: WireframeBoxCfg,
    pub sticks: StickBoxCfg,
    pub axis_aligned: AxisAlignedBoxCfg,
}

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeightFieldCfg {
    /// Displacement cap as a fraction of the primitive's mean scale.
    pub amplitude_frac: Range,
    pub frequency: Range,
    pub octaves: u32,
}

impl Default for HeightFieldCfg {
    fn default() -> Self {
        HeightFieldCfg {
            amplitude_frac: Range { lo: 0.03, hi: 0.15 },
            frequency: Range { lo: 1.5, hi: 4.0 },
            octaves: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeometryCfg {
    pub large_primitive_count: Categorical<u32>,
    pub small_primitive_count: Categorical<u32>,
    pub wireframe_primitive_count: Categorical<u32>,
    pub solid_kinds: Categorical<PrimitiveKind>,
    pub wireframe_kinds: Categorical<PrimitiveKind>,
    pub stick_kinds: Categorical<PrimitiveKind>,
    /// Tube thickness as a fraction of the wireframe's mean scale.
    pub wire_thickness_frac: Range,
    pub sphere_wire_segments: u32,
    pub sphere_wire_rings: u32,
    pub cube_wire_subdivision: Categorical<u32>,
    pub torus_wire_major_segments: u32,
    pub torus_wire_minor_segments: u32,
    pub torus_wire_minor_radius_frac: f64,
    pub intersecting_solid_prob: f64,
    pub height_field: HeightFieldCfg,
    /// Canonical per-axis size of a member primitive before fitting.
    pub member_size_range: Range,
    /// Inflation of the placed-members AABB when sampling the next center.
    pub member_center_inflate: f64,
    pub sphere_segments: u32,
    pub sphere_rings: u32,
    pub cylinder_segments: u32,
    pub cone_segments: u32,
    pub cube_grid: u32,
}

impl Default for GeometryCfg {
    fn default() -> Self {
        GeometryCfg {
            // The published table lists six counts against five
            // probabilities; the five probabilities sum to exactly 1, so the
            // orphan count 9 is dropped.
            large_primitive_count: Categorical {
                items: vec![4, 5, 6, 7, 8],
                probs: vec![0.147, 0.206, 0.294, 0.206, 0.147],
            },
            small_primitive_count: Categorical {
                items: vec![2, 3, 4, 5],
                probs: vec![0.25, 0.375, 0.25, 0.125],
            },
            wireframe_primitive_count: Categorical {
                items: vec![1, 2, 3],
                probs: vec![0.5, 0.25, 0.25],
            },
            solid_kinds: Categorical {
                items: vec![
                    PrimitiveKind::Cube,
                    PrimitiveKind::Sphere,
                    PrimitiveKind::Cylinder,
                    PrimitiveKind::Cone,
                ],
                probs: uniform_probs(4),
            },
            wireframe_kinds: Categorical {
                items: vec![
                    PrimitiveKind::Torus,
                    PrimitiveKind::Cube,
                    PrimitiveKind::Sphere,
                ],
                probs: uniform_probs(3),
            },
            stick_kinds: Categorical {
                items: vec![PrimitiveKind::Cube, PrimitiveKind::Cylinder],
                probs: uniform_probs(2),
            },
            wire_thickness_frac: Range {
                lo: 1.0 / 30.0,
                hi: 1.0 / 20.0,
            },
            sphere_wire_segments: 8,
            sphere_wire_rings: 8,
            cube_wire_subdivision: Categorical {
                items: vec![1, 2, 3],
                probs: uniform_probs(3),
            },
            torus_wire_major_segments: 8,
            torus_wire_minor_segments: 8,
            torus_wire_minor_radius_frac: 0.3,
            intersecting_solid_prob: 0.5,
            height_field: HeightFieldCfg::default(),
            member_size_range: Range { lo: 0.5, hi: 1.0 },
            member_center_inflate: 0.25,
            sphere_segments: 32,
            sphere_rings: 16,
            cylinder_segments: 32,
            cone_segments: 32,
            cube_grid: 8,
        }
    }
}

// ---------------------------------------------------------------------------
// Materials
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MaterialsCfg {
    pub modify_scene_prob: f64,
    pub modify_slot_prob: f64,
    pub specular_scene_prob: f64,
    pub roughness: Range,
    pub metallic: Range,
    pub specular_roughness: Range,
    pub specular_metallic: Range,
    pub glass_ior: Range,
    pub glass_roughness: Range,
    pub axis_aligned_glass_prob: f64,
    pub bump_amplitude: Range,
    pub bump_frequency: Range,
    pub texture_scale: Range,
}

impl Default for MaterialsCfg {
    fn default() -> Self {
        MaterialsCfg {
            modify_scene_prob: 0.5,
            modify_slot_prob: 0.4,
            specular_scene_prob: 0.2,
            roughness: Range {
                lo: 0.001,
                hi: 0.2,
            },
            metallic: Range {
                lo: 0.001,
                hi: 1.0,
            },
            specular_roughness: Range { lo: 0.0, hi: 0.05 },
            specular_metallic: Range { lo: 0.6, hi: 1.0 },
            glass_ior: Range { lo: 1.4, hi: 1.6 },
            glass_roughness: Range {
                lo: 0.001,
                hi: 0.1,
            },
            axis_aligned_glass_prob: 0.8,
            bump_amplitude: Range { lo: 0.0, hi: 0.2 },
            bump_frequency: Range { lo: 2.0, hi: 8.0 },
            texture_scale: Range { lo: 1.0, hi: 8.0 },
        }
    }
}

// ---------------------------------------------------------------------------
// Lighting
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SunCfg {
    pub prob: f64,
    pub strength: Range,
    pub elevation_deg: Range,
    pub window_count: CountRange,
    /// Window width/height as a fraction of the wall face dimensions.
    pub window_size_frac: Range,
    pub window_glass_prob: f64,
    pub window_bar_prob: f64,
    pub bar_divisions: CountRange,
    pub bar_thickness: f64,
    pub glass_pane_thickness: f64,
}

impl Default for SunCfg {
    fn default() -> Self {
        SunCfg {
            prob: 0.6,
            strength: Range { lo: 0.2, hi: 2.0 },
            elevation_deg: Range { lo: 20.0, hi: 70.0 },
            window_count: CountRange::new(1, 3),
            window_size_frac: Range { lo: 0.15, hi: 0.45 },
            window_glass_prob: 0.5,
            window_bar_prob: 0.5,
            bar_divisions: CountRange::new(2, 4),
            bar_thickness: 0.05,
            glass_pane_thickness: 0.04,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LuminousCfg {
    pub prob: f64,
    pub slot_prob: f64,
    pub strength_primary: Range,
    pub strength_primary_prob: f64,
    pub strength_boosted: Range,
}

impl Default for LuminousCfg {
    fn default() -> Self {
        LuminousCfg {
            prob: 0.7,
            slot_prob: 0.2,
            strength_primary: Range { lo: 0.2, hi: 2.0 },
            strength_primary_prob: 0.9,
            strength_boosted: Range { lo: 5.0, hi: 8.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BulbCfg {
    pub count: CountRange,
    pub strength_primary: Range,
    pub strength_primary_prob: f64,
    pub strength_boosted: Range,
    pub radius: f64,
}

impl Default for BulbCfg {
    fn default() -> Self {
        BulbCfg {
            count: CountRange::new(2, 5),
            strength_primary: Range { lo: 0.2, hi: 2.0 },
            strength_primary_prob: 0.9,
            strength_boosted: Range { lo: 5.0, hi: 8.0 },
            radius: 0.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LightingCfg {
    pub ambient_strength: f64,
    /// Saturation range for all sampled light tints; hue is free, value 1.
    pub light_saturation: Range,
    pub sun: SunCfg,
    pub luminous: LuminousCfg,
    pub bulbs: BulbCfg,
}

impl Default for LightingCfg {
    fn default() -> Self {
        LightingCfg {
            ambient_strength: 1.0,
            light_saturation: Range { lo: 0.0, hi: 0.4 },
            sun: SunCfg::default(),
            luminous: LuminousCfg::default(),
            bulbs: BulbCfg::default(),
        }
    }
}

// ---------------------------------------------------------------------------
// Cameras, renderer, ground truth
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CamerasCfg {
    pub outer_count: u32,
    pub inner_count: u32,
    pub fov_deg: Range,
    pub width: u32,
    pub height: u32,
    /// Minimum distance from any surface.
    pub min_clearance: f64,
    /// Inner/outer split radius as a fraction of the max horizontal
    /// half-extent.
    pub inner_split_frac: f64,
    pub inner_pitch_deg: Range,
    pub outer_distance_bins: u32,
    /// Camera height ceiling as a fraction of the scene height.
    pub max_height_frac: f64,
    pub scale_range: Range,
    pub retry_budget: u32,
}

impl Default for CamerasCfg {
    fn default() -> Self {
        CamerasCfg {
            outer_count: 36,
            inner_count: 12,
            fov_deg: Range { lo: 45.0, hi: 70.0 },
            width: 128,
            height: 128,
            min_clearance: 0.8,
            inner_split_frac: 0.45,
            inner_pitch_deg: Range {
                lo: -35.0,
                hi: 35.0,
            },
            outer_distance_bins: 4,
            max_height_frac: 0.9,
            scale_range: Range { lo: 1.1, hi: 1.6 },
            retry_budget: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderCfg {
    pub max_depth: u32,
    pub gamma: f64,
    /// Attenuation applied per transmissive occluder on shadow rays.
    pub shadow_transmittance: f64,
    pub specular_roughness_max: f64,
    pub specular_metallic_min: f64,
}

impl Default for RenderCfg {
    fn default() -> Self {
        RenderCfg {
            max_depth: 4,
            gamma: 2.2,
            shadow_transmittance: 0.8,
            specular_roughness_max: 0.05,
            specular_metallic_min: 0.6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GtCfg {
    /// Depth validity threshold in the scale-normalized export frame.
    pub depth_mask_threshold: f64,
    pub smooth_l1_beta: f64,
}

impl Default for GtCfg {
    fn default() -> Self {
        GtCfg {
            depth_mask_threshold: 100.0,
            smooth_l1_beta: 1.0,
        }
    }
}

// ---------------------------------------------------------------------------
// Top level
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub scene: SceneCfg,
    pub boxes: BoxesCfg,
    pub geometry: GeometryCfg,
    pub materials: MaterialsCfg,
    pub lighting: LightingCfg,
    pub cameras: CamerasCfg,
    pub render: RenderCfg,
    pub gt: GtCfg,
}

impl GenConfig {
    pub fn from_toml_str(s: &str) -> Result<GenConfig> {
        let cfg: GenConfig = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<GenConfig> {
        let text = std::fs::read_to_string(path)?;
        GenConfig::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// FNV-1a hash of the canonical JSON encoding; identifies the exact
    /// configuration a dataset was generated with.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let mut h: u64 = 0xCBF2_9CE4_8422_2325;
        for b in json.as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01B3);
        }
        format!("{h:016x}")
    }

    /// Default config with reduced mesh resolutions. Sampling distributions
    /// are untouched; useful for fast iteration and statistical sweeps.
    pub fn draft() -> GenConfig {
        let mut cfg = GenConfig::default();
        cfg.geometry.sphere_segments = 12;
        cfg.geometry.sphere_rings = 6;
        cfg.geometry.cylinder_segments = 12;
        cfg.geometry.cone_segments = 12;
        cfg.geometry.cube_grid = 3;
        cfg.cameras.width = 64;
        cfg.cameras.height = 64;
        cfg
    }

    fn prob(p: f64, what: &str) -> Result<()> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::config(format!("{what}: probability {p} outside [0,1]")));
        }
        Ok(())
    }

    fn positive(v: f64, what: &str) -> Result<()> {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::config(format!("{what}: {v} must be positive")));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.scene.size_range.validate("scene.size_range")?;
        self.scene.height_range.validate("scene.height_range")?;
        Self::positive(self.scene.wall_thickness, "scene.wall_thickness")?;
        if self.scene.size_range.lo <= 0.0 || self.scene.height_range.lo <= 0.0 {
            return Err(Error::config("scene dimensions must be positive"));
        }

        let b = &self.boxes;
        b.large.size_range.validate("boxes.large.size_range")?;
        b.large.count.validate("boxes.large.count")?;
        b.small.size_range.validate("boxes.small.size_range")?;
        b.small.count.validate("boxes.small.count")?;
        Self::prob(b.small.on_ground_prob, "boxes.small.on_ground_prob")?;
        b.small
            .on_ground_height
            .validate("boxes.small.on_ground_height")?;
        b.small.atop_height.validate("boxes.small.atop_height")?;
        b.on_roof.size_range.validate("boxes.on_roof.size_range")?;
        b.on_roof.count.validate("boxes.on_roof.count")?;
        Self::prob(b.on_roof.thin_prob, "boxes.on_roof.thin_prob")?;
        b.on_roof.thin_height.validate("boxes.on_roof.thin_height")?;
        b.on_roof
            .thick_height
            .validate("boxes.on_roof.thick_height")?;
        b.on_wall.size_range.validate("boxes.on_wall.size_range")?;
        b.on_wall.count.validate("boxes.on_wall.count")?;
        Self::prob(b.on_wall.thin_prob, "boxes.on_wall.thin_prob")?;
        b.on_wall.thin_depth.validate("boxes.on_wall.thin_depth")?;
        b.on_wall.thick_depth.validate("boxes.on_wall.thick_depth")?;
        Self::prob(b.wireframe.presence_prob, "boxes.wireframe.presence_prob")?;
        b.wireframe
            .size_range
            .validate("boxes.wireframe.size_range")?;
        b.wireframe
            .height_range
            .validate("boxes.wireframe.height_range")?;
        b.wireframe.count.validate("boxes.wireframe.count")?;
        b.sticks.length_range.validate("boxes.sticks.length_range")?;
        b.sticks.on_wall_size.validate("boxes.sticks.on_wall_size")?;
        b.sticks.on_wall_count.validate("boxes.sticks.on_wall_count")?;
        Self::prob(b.sticks.in_space_prob, "boxes.sticks.in_space_prob")?;
        b.sticks
            .in_space_size
            .validate("boxes.sticks.in_space_size")?;
        b.sticks
            .in_space_count
            .validate("boxes.sticks.in_space_count")?;
        Self::prob(
            b.axis_aligned.presence_prob,
            "boxes.axis_aligned.presence_prob",
        )?;
        b.axis_aligned
            .size_range
            .validate("boxes.axis_aligned.size_range")?;
        b.axis_aligned.count.validate("boxes.axis_aligned.count")?;
        b.axis_aligned
            .height_range
            .validate("boxes.axis_aligned.height_range")?;

        let g = &self.geometry;
        g.large_primitive_count
            .validate("geometry.large_primitive_count")?;
        g.small_primitive_count
            .validate("geometry.small_primitive_count")?;
        g.wireframe_primitive_count
            .validate("geometry.wireframe_primitive_count")?;
        g.solid_kinds.validate("geometry.solid_kinds")?;
        g.wireframe_kinds.validate("geometry.wireframe_kinds")?;
        g.stick_kinds.validate("geometry.stick_kinds")?;
        g.wire_thickness_frac
            .validate("geometry.wire_thickness_frac")?;
        g.cube_wire_subdivision
            .validate("geometry.cube_wire_subdivision")?;
        Self::prob(
            g.intersecting_solid_prob,
            "geometry.intersecting_solid_prob",
        )?;
        g.height_field
            .amplitude_frac
            .validate("geometry.height_field.amplitude_frac")?;
        g.height_field
            .frequency
            .validate("geometry.height_field.frequency")?;
        g.member_size_range.validate("geometry.member_size_range")?;
        if g.member_size_range.lo <= 0.0 {
            return Err(Error::config("geometry.member_size_range must be positive"));
        }
        for (v, what) in [
            (g.sphere_segments, "geometry.sphere_segments"),
            (g.sphere_rings, "geometry.sphere_rings"),
            (g.cylinder_segments, "geometry.cylinder_segments"),
            (g.cone_segments, "geometry.cone_segments"),
            (g.cube_grid, "geometry.cube_grid"),
            (g.sphere_wire_segments, "geometry.sphere_wire_segments"),
            (g.sphere_wire_rings, "geometry.sphere_wire_rings"),
            (
                g.torus_wire_major_segments,
                "geometry.torus_wire_major_segments",
            ),
            (
                g.torus_wire_minor_segments,
                "geometry.torus_wire_minor_segments",
            ),
        ] {
            if v < 3 && what.contains("segments") {
                return Err(Error::config(format!("{what}: need at least 3, got {v}")));
            }
            if v == 0 {
                return Err(Error::config(format!("{what}: must be nonzero")));
            }
        }

        let m = &self.materials;
        Self::prob(m.modify_scene_prob, "materials.modify_scene_prob")?;
        Self::prob(m.modify_slot_prob, "materials.modify_slot_prob")?;
        Self::prob(m.specular_scene_prob, "materials.specular_scene_prob")?;
        Self::prob(
            m.axis_aligned_glass_prob,
            "materials.axis_aligned_glass_prob",
        )?;
        m.roughness.validate("materials.roughness")?;
        m.metallic.validate("materials.metallic")?;
        m.specular_roughness.validate("materials.specular_roughness")?;
        m.specular_metallic.validate("materials.specular_metallic")?;
        m.glass_ior.validate("materials.glass_ior")?;
        m.glass_roughness.validate("materials.glass_roughness")?;
        m.bump_amplitude.validate("materials.bump_amplitude")?;
        m.bump_frequency.validate("materials.bump_frequency")?;
        m.texture_scale.validate("materials.texture_scale")?;

        let l = &self.lighting;
        if l.ambient_strength < 0.0 {
            return Err(Error::config("lighting.ambient_strength must be >= 0"));
        }
        l.light_saturation.validate("lighting.light_saturation")?;
        Self::prob(l.sun.prob, "lighting.sun.prob")?;
        l.sun.strength.validate("lighting.sun.strength")?;
        l.sun.elevation_deg.validate("lighting.sun.elevation_deg")?;
        l.sun.window_count.validate("lighting.sun.window_count")?;
        l.sun
            .window_size_frac
            .validate("lighting.sun.window_size_frac")?;
        Self::prob(l.sun.window_glass_prob, "lighting.sun.window_glass_prob")?;
        Self::prob(l.sun.window_bar_prob, "lighting.sun.window_bar_prob")?;
        l.sun.bar_divisions.validate("lighting.sun.bar_divisions")?;
        Self::positive(l.sun.bar_thickness, "lighting.sun.bar_thickness")?;
        Self::positive(
            l.sun.glass_pane_thickness,
            "lighting.sun.glass_pane_thickness",
        )?;
        Self::prob(l.luminous.prob, "lighting.luminous.prob")?;
        Self::prob(l.luminous.slot_prob, "lighting.luminous.slot_prob")?;
        l.luminous
            .strength_primary
            .validate("lighting.luminous.strength_primary")?;
        Self::prob(
            l.luminous.strength_primary_prob,
            "lighting.luminous.strength_primary_prob",
        )?;
        l.luminous
            .strength_boosted
            .validate("lighting.luminous.strength_boosted")?;
        l.bulbs.count.validate("lighting.bulbs.count")?;
        l.bulbs
            .strength_primary
            .validate("lighting.bulbs.strength_primary")?;
        Self::prob(
            l.bulbs.strength_primary_prob,
            "lighting.bulbs.strength_primary_prob",
        )?;
        l.bulbs
            .strength_boosted
            .validate("lighting.bulbs.strength_boosted")?;
        Self::positive(l.bulbs.radius, "lighting.bulbs.radius")?;

        let c = &self.cameras;
        c.fov_deg.validate("cameras.fov_deg")?;
        if c.fov_deg.lo <= 0.0 || c.fov_deg.hi >= 180.0 {
            return Err(Error::config("cameras.fov_deg must lie inside (0, 180)"));
        }
        if c.width == 0 || c.height == 0 {
            return Err(Error::config("cameras resolution must be nonzero"));
        }
        Self::positive(c.min_clearance, "cameras.min_clearance")?;
        if !(0.0 < c.inner_split_frac && c.inner_split_frac < 1.0) {
            return Err(Error::config("cameras.inner_split_frac must be in (0,1)"));
        }
        c.inner_pitch_deg.validate("cameras.inner_pitch_deg")?;
        if c.outer_distance_bins == 0 {
            return Err(Error::config("cameras.outer_distance_bins must be nonzero"));
        }
        if !(0.0 < c.max_height_frac && c.max_height_frac <= 1.0) {
            return Err(Error::config("cameras.max_height_frac must be in (0,1]"));
        }
        c.scale_range.validate("cameras.scale_range")?;
        if c.retry_budget == 0 {
            return Err(Error::config("cameras.retry_budget must be nonzero"));
        }

        let r = &self.render;
        if r.gamma <= 0.0 {
            return Err(Error::config("render.gamma must be positive"));
        }
        Self::prob(r.shadow_transmittance, "render.shadow_transmittance")?;

        Self::positive(self.gt.depth_mask_threshold, "gt.depth_mask_threshold")?;
        Self::positive(self.gt.smooth_l1_beta, "gt.smooth_l1_beta")?;
        Ok(())
    }
}
