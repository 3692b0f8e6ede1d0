//! Dataset orchestration: per-scene packages on disk, the JSONL manifest,
//! parallel generation keyed by scene index, package validation and
//! dataset-level statistics.
//!
//! Layout under the output directory:
//!
//! ```text
//! out/
//!   config.toml            exact GenConfig used
//!   manifest.jsonl         header line, then one entry per scene
//!   scenes/<00000000>/
//!     scene.json           ScenePackage (spec + view records)
//!     mesh.bin             indexed-triangle binary (see mesh module)
//!     views/<00>.png       8-bit RGB
//!     views/<00>.depth     f32 z-depth raster
//!     views/<00>.pts       3x f32 world-point raster
//!     views/<00>.mask      u8 validity mask
//! ```
//!
//! Scenes are written into a staging directory and renamed on completion,
//! so interrupted runs leave either whole packages or none.

use crate::camera::{denormalized, CameraRegion};
use crate::config::GenConfig;
use crate::error::{Error, Result};
use crate::floorplan::BoxCategory;
use crate::math::Vec3;
use crate::mesh;
use crate::raster_io;
use crate::rng::Seed;
use crate::scene::{generate_built_scene, render_view_export, BuiltScene, SceneSpec, StageTimings};
use crate::GENERATOR_VERSION;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewRecord {
    pub camera_index: u32,
    pub rgb: String,
    pub depth: String,
    pub points: String,
    pub mask: String,
}

/// The `scene.json` payload: everything needed to re-render the scene and
/// find its rasters. Stage timings deliberately live in the manifest, not
/// here, so packages are byte-identical across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenePackage {
    pub generator_version: String,
    pub seed: Seed,
    pub mesh: String,
    pub views: Vec<ViewRecord>,
    pub scene_spec: SceneSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SceneStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SceneTimings {
    pub plan_ms: f64,
    pub geometry_ms: f64,
    pub materials_ms: f64,
    pub lighting_ms: f64,
    pub cameras_ms: f64,
    pub render_ms: f64,
    pub write_ms: f64,
    pub total_ms: f64,
}

impl SceneTimings {
    fn from_stages(stages: StageTimings) -> SceneTimings {
        SceneTimings {
            plan_ms: stages.plan_ms,
            geometry_ms: stages.geometry_ms,
            materials_ms: stages.materials_ms,
            lighting_ms: stages.lighting_ms,
            cameras_ms: stages.cameras_ms,
            ..SceneTimings::default()
        }
    }

    /// Scene specification cost: everything except rendering and I/O.
    pub fn spec_ms(&self) -> f64 {
        self.plan_ms + self.geometry_ms + self.materials_ms + self.lighting_ms + self.cameras_ms
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub scene_id: String,
    pub scene_index: u64,
    pub seed: Seed,
    pub dir: String,
    pub status: SceneStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub view_count: u32,
    pub triangle_count: u64,
    pub timings_ms: SceneTimings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestHeader {
    pub record: String,
    pub generator_version: String,
    pub global_seed: u64,
    pub requested_count: u64,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub header: ManifestHeader,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn ok_count(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.status == SceneStatus::Ok)
            .count()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(fs::File::create(path)?);
        serde_json::to_writer(&mut f, &self.header)?;
        f.write_all(b"\n")?;
        for e in &self.entries {
            serde_json::to_writer(&mut f, e)?;
            f.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Manifest> {
        let f = std::io::BufReader::new(fs::File::open(path)?);
        let mut lines = f.lines();
        let header_line = lines.next().ok_or_else(|| Error::RasterFormat {
            path: path.display().to_string(),
            reason: "empty manifest".into(),
        })??;
        let header: ManifestHeader = serde_json::from_str(&header_line)?;
        let mut entries = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            entries.push(serde_json::from_str(&line)?);
        }
        Ok(Manifest { header, entries })
    }
}

pub fn scene_id(scene_index: u64) -> String {
    format!("{scene_index:08}")
}

fn view_basename(index: usize) -> String {
    format!("{index:02}")
}

/// Generate, render and write one scene package. Failures clean up the
/// staging directory and report through the manifest entry, never a panic.
pub fn generate_scene(seed: Seed, cfg: &GenConfig, scenes_root: &Path) -> ManifestEntry {
    let id = scene_id(seed.scene_index);
    let total_start = Instant::now();
    let mut entry = ManifestEntry {
        scene_id: id.clone(),
        scene_index: seed.scene_index,
        seed,
        dir: format!("scenes/{id}"),
        status: SceneStatus::Failed,
        error: None,
        view_count: 0,
        triangle_count: 0,
        timings_ms: SceneTimings::default(),
    };
    let staging = scenes_root.join(format!(".tmp-{id}"));
    let finished = scenes_root.join(&id);
    match build_and_write(seed, cfg, &staging, &finished) {
        Ok((timings, views, tris)) => {
            entry.status = SceneStatus::Ok;
            entry.view_count = views;
            entry.triangle_count = tris;
            entry.timings_ms = timings;
            entry.timings_ms.total_ms = total_start.elapsed().as_secs_f64() * 1e3;
        }
        Err(e) => {
            let _ = fs::remove_dir_all(&staging);
            entry.error = Some(e.to_string());
            entry.timings_ms.total_ms = total_start.elapsed().as_secs_f64() * 1e3;
        }
    }
    entry
}

fn build_and_write(
    seed: Seed,
    cfg: &GenConfig,
    staging: &Path,
    finished: &Path,
) -> Result<(SceneTimings, u32, u64)> {
    let built = generate_built_scene(seed, cfg)?;
    let mut timings = SceneTimings::from_stages(built.timings);

    let _ = fs::remove_dir_all(staging);
    fs::create_dir_all(staging.join("views"))?;

    let render_start = Instant::now();
    let mut views = Vec::with_capacity(built.spec.cameras.cameras.len());
    let mut write_ms = 0.0;
    for i in 0..built.spec.cameras.cameras.len() {
        let view = render_view_export(&built, i, cfg)?;
        let w = Instant::now();
        let base = view_basename(i);
        let rgb = format!("views/{base}.png");
        let depth = format!("views/{base}.depth");
        let points = format!("views/{base}.pts");
        let mask = format!("views/{base}.mask");
        raster_io::write_png_rgb(&staging.join(&rgb), view.width, view.height, &view.rgb)?;
        raster_io::write_depth(&staging.join(&depth), view.width, view.height, &view.depth)?;
        raster_io::write_points(
            &staging.join(&points),
            view.width,
            view.height,
            &view.points.points,
            &view.points.valid,
        )?;
        raster_io::write_mask(&staging.join(&mask), view.width, view.height, &view.mask.mask)?;
        write_ms += w.elapsed().as_secs_f64() * 1e3;
        views.push(ViewRecord {
            camera_index: i as u32,
            rgb,
            depth,
            points,
            mask,
        });
    }
    timings.render_ms = render_start.elapsed().as_secs_f64() * 1e3 - write_ms;

    let w = Instant::now();
    let bare: Vec<crate::mesh::TriMesh> = built.meshes.iter().map(|m| m.mesh.clone()).collect();
    let mesh_file = fs::File::create(staging.join("mesh.bin"))?;
    mesh::write_meshes(std::io::BufWriter::new(mesh_file), &bare)?;

    let package = ScenePackage {
        generator_version: GENERATOR_VERSION.to_string(),
        seed,
        mesh: "mesh.bin".to_string(),
        views,
        scene_spec: built.spec,
    };
    let json = serde_json::to_vec_pretty(&package)?;
    fs::write(staging.join("scene.json"), json)?;
    write_ms += w.elapsed().as_secs_f64() * 1e3;
    timings.write_ms = write_ms;

    let _ = fs::remove_dir_all(finished);
    fs::rename(staging, finished)?;
    Ok((
        timings,
        package_view_count(finished)?,
        flatten_count(&bare) as u64,
    ))
}

fn package_view_count(dir: &Path) -> Result<u32> {
    let pkg = read_package(dir)?;
    Ok(pkg.views.len() as u32)
}

fn flatten_count(meshes: &[crate::mesh::TriMesh]) -> usize {
    meshes.iter().map(|m| m.triangles.len()).sum()
}

pub fn read_package(dir: &Path) -> Result<ScenePackage> {
    let raw = fs::read(dir.join("scene.json"))?;
    Ok(serde_json::from_slice(&raw)?)
}

/// Generate `count` scenes as independent jobs on a bounded worker pool.
/// Output is identical for any worker count; entries land in scene-index
/// order.
pub fn generate_dataset(
    global_seed: u64,
    count: u64,
    workers: usize,
    out_dir: &Path,
    cfg: &GenConfig,
) -> Result<Manifest> {
    cfg.validate()?;
    let scenes_root = out_dir.join("scenes");
    fs::create_dir_all(&scenes_root)?;
    fs::write(out_dir.join("config.toml"), cfg.to_toml()?)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let mut entries: Vec<ManifestEntry> = pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|i| generate_scene(Seed::new(global_seed, i), cfg, &scenes_root))
            .collect()
    });
    entries.sort_by_key(|e| e.scene_index);

    let manifest = Manifest {
        header: ManifestHeader {
            record: "header".to_string(),
            generator_version: GENERATOR_VERSION.to_string(),
            global_seed,
            requested_count: count,
            config_hash: cfg.hash(),
        },
        entries,
    };
    manifest.write(&out_dir.join("manifest.jsonl"))?;
    Ok(manifest)
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneReport {
    pub scene_id: String,
    pub checks: Vec<Check>,
}

impl SceneReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &str, passed: bool, detail: Option<String>) -> Check {
    Check {
        name: name.to_string(),
        passed,
        detail,
    }
}

/// Validate one scene package on disk: file integrity, geometric
/// invariants, the camera contract and the depth/point/mask consistency
/// rules.
pub fn validate_scene(dir: &Path, cfg: &GenConfig) -> SceneReport {
    let scene_id = dir
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut checks = Vec::new();

    let pkg = match read_package(dir) {
        Ok(p) => p,
        Err(e) => {
            checks.push(check("package_readable", false, Some(e.to_string())));
            return SceneReport { scene_id, checks };
        }
    };
    checks.push(check("package_readable", true, None));
    let spec = &pkg.scene_spec;

    // File integrity first; everything else reads these files.
    let mut file_fail: Option<String> = None;
    let mesh_path = dir.join(&pkg.mesh);
    match fs::File::open(&mesh_path)
        .map_err(Error::from)
        .and_then(|f| mesh::read_meshes(std::io::BufReader::new(f), &mesh_path.display().to_string()))
    {
        Ok(meshes) => {
            if meshes.is_empty() {
                file_fail = Some(format!("{}: empty mesh container", mesh_path.display()));
            }
        }
        Err(e) => file_fail = Some(e.to_string()),
    }
    for v in &pkg.views {
        for rel in [&v.rgb, &v.depth, &v.points, &v.mask] {
            let p = dir.join(rel);
            let result: Result<()> = match p.extension().and_then(|e| e.to_str()) {
                Some("png") => raster_io::read_png_rgb(&p).map(|_| ()),
                Some("depth") => raster_io::read_depth(&p).map(|_| ()),
                Some("pts") => raster_io::read_points(&p).map(|_| ()),
                Some("mask") => raster_io::read_mask(&p).map(|_| ()),
                _ => Ok(()),
            };
            if let Err(e) = result {
                file_fail.get_or_insert(e.to_string());
            }
        }
    }
    checks.push(check("file_integrity", file_fail.is_none(), file_fail));

    // Geometric invariants of the floor plan.
    let interior = spec.scene_box.interior();
    let contained = spec
        .object_boxes
        .iter()
        .all(|b| interior.contains_box(&b.aabb(), 1e-9));
    checks.push(check("containment", contained, None));

    let mut contact_ok = true;
    for b in &spec.object_boxes {
        let ok = match b.category {
            BoxCategory::LargeObject | BoxCategory::SmallOnGround => b.min_corner.z.abs() < 1e-9,
            BoxCategory::SmallAtopLarge => match b.parent {
                Some(p) => {
                    let parent = &spec.object_boxes[p as usize];
                    (b.min_corner.z - parent.max_corner.z).abs() < 1e-9
                }
                None => false,
            },
            BoxCategory::OnRoofThin | BoxCategory::OnRoofThick => {
                (b.max_corner.z - spec.scene_box.height).abs() < 1e-9
            }
            BoxCategory::OnWallThin | BoxCategory::OnWallThick | BoxCategory::ThinStickOnWall => {
                match b.wall {
                    Some(w) => {
                        let plane = spec.scene_box.wall_plane(w);
                        let coord = match w {
                            crate::floorplan::WallId::NegX => b.min_corner.x,
                            crate::floorplan::WallId::PosX => b.max_corner.x,
                            crate::floorplan::WallId::NegY => b.min_corner.y,
                            crate::floorplan::WallId::PosY => b.max_corner.y,
                        };
                        (coord - plane).abs() < 1e-9
                    }
                    None => false,
                }
            }
            _ => true,
        };
        if !ok {
            contact_ok = false;
        }
    }
    checks.push(check("category_contact", contact_ok, None));

    let larges: Vec<_> = spec
        .object_boxes
        .iter()
        .filter(|b| b.category == BoxCategory::LargeObject)
        .collect();
    let mut overlap_ok = true;
    for i in 0..larges.len() {
        for j in i + 1..larges.len() {
            if larges[i].aabb().overlaps_xy(&larges[j].aabb()) {
                overlap_ok = false;
            }
        }
    }
    checks.push(check("large_box_separation", overlap_ok, None));

    // Camera contract against the re-lowered geometry.
    match BuiltScene::from_spec(spec.clone(), cfg) {
        Err(e) => checks.push(check("geometry_lowering", false, Some(e.to_string()))),
        Ok(built) => {
            checks.push(check("geometry_lowering", true, None));
            let spec = &built.spec;
            let s = spec.cameras.normalization_scale;
            let center = spec.scene_box.center();
            let d_min = spec.cameras.effective_min_clearance.min(cfg.cameras.min_clearance);
            let mut clearance_ok = true;
            let mut fov_ok = true;
            let mut lookat_ok = true;
            let mut split = (0u32, 0u32);
            for cam in &spec.cameras.cameras {
                let gen = denormalized(cam, center, s);
                if built.bvh.distance(&built.tris, gen.position) < d_min - 1e-9 {
                    clearance_ok = false;
                }
                if !cfg.cameras.fov_deg.contains(cam.fov_y_deg) {
                    fov_ok = false;
                }
                match cam.region {
                    CameraRegion::Outer => {
                        split.0 += 1;
                        let to_center = (center - gen.position).normalized();
                        let angle = gen.forward().dot(to_center).clamp(-1.0, 1.0).acos();
                        if angle > 1e-6 {
                            lookat_ok = false;
                        }
                    }
                    CameraRegion::Inner => split.1 += 1,
                }
            }
            checks.push(check("camera_clearance", clearance_ok, None));
            checks.push(check("camera_fov", fov_ok, None));
            checks.push(check("outer_look_at", lookat_ok, None));
            checks.push(check(
                "camera_split",
                split == (cfg.cameras.outer_count, cfg.cameras.inner_count),
                Some(format!("outer/inner = {}/{}", split.0, split.1)),
            ));
            checks.push(check(
                "normalization_scale",
                cfg.cameras.scale_range.contains(s),
                Some(format!("{s}")),
            ));
        }
    }

    // Depth -> point -> reprojection consistency plus the mask rule, from
    // the files themselves.
    let mut roundtrip_ok = true;
    let mut mask_ok = true;
    let mut points_ok = true;
    let mut detail = None;
    'views: for v in &pkg.views {
        let cam = &spec.cameras.cameras[v.camera_index as usize];
        let Ok((w, h, depth32)) = raster_io::read_depth(&dir.join(&v.depth)) else {
            roundtrip_ok = false;
            break;
        };
        if (w, h) != (cam.width, cam.height) {
            roundtrip_ok = false;
            detail = Some("depth resolution mismatch".into());
            break;
        }
        let Ok((_, _, mask)) = raster_io::read_mask(&dir.join(&v.mask)) else {
            mask_ok = false;
            break;
        };
        let Ok((_, _, pts)) = raster_io::read_points(&dir.join(&v.points)) else {
            points_ok = false;
            break;
        };
        for py in 0..h {
            for px in 0..w {
                let i = (py * w + px) as usize;
                let d = depth32[i] as f64;
                let hit = d.is_finite();
                let expect_mask = hit && d <= cfg.gt.depth_mask_threshold;
                if mask[i] != expect_mask {
                    mask_ok = false;
                    detail = Some(format!("mask rule at pixel {i}"));
                    break 'views;
                }
                if !hit {
                    continue;
                }
                let world = cam.camera_to_world(cam.unproject_camera(px, py, d));
                match cam.project(world) {
                    None => {
                        roundtrip_ok = false;
                        break 'views;
                    }
                    Some((u, vpx, _)) => {
                        if (u - (px as f64 + 0.5)).abs() > 1e-4
                            || (vpx - (py as f64 + 0.5)).abs() > 1e-4
                        {
                            roundtrip_ok = false;
                            detail = Some(format!("reprojection error at pixel {i}"));
                            break 'views;
                        }
                    }
                }
                let stored = Vec3::new(pts[i][0] as f64, pts[i][1] as f64, pts[i][2] as f64);
                if (stored - world).length() > 1e-3 {
                    points_ok = false;
                    detail = Some(format!("point raster mismatch at pixel {i}"));
                    break 'views;
                }
            }
        }
    }
    checks.push(check("depth_roundtrip", roundtrip_ok, detail.clone()));
    checks.push(check("validity_mask_rule", mask_ok, detail.clone()));
    checks.push(check("point_raster", points_ok, detail));

    SceneReport { scene_id, checks }
}

/// Validate every OK scene in a dataset directory.
pub fn validate_dataset(out_dir: &Path, cfg: &GenConfig) -> Result<Vec<SceneReport>> {
    let manifest = Manifest::read(&out_dir.join("manifest.jsonl"))?;
    let reports = manifest
        .entries
        .par_iter()
        .filter(|e| e.status == SceneStatus::Ok)
        .map(|e| validate_scene(&out_dir.join(&e.dir), cfg))
        .collect();
    Ok(reports)
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PresenceStats {
    pub sunlight: f64,
    pub wireframe: f64,
    pub axis_aligned: f64,
    pub in_space_sticks: f64,
    pub material_modify: f64,
    pub specular_scene: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ThroughputStats {
    pub spec_ms_mean: f64,
    pub render_ms_mean: f64,
    pub total_ms_mean: f64,
    pub scenes_per_second_aggregate: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub scenes_total: usize,
    pub scenes_ok: usize,
    pub scenes_failed: usize,
    /// Sampled scalars found outside their configured table ranges.
    pub range_violations: u64,
    pub violation_examples: Vec<String>,
    pub presence: PresenceStats,
    pub glass_on_axis_aligned_fraction: f64,
    pub boosted_strength_fraction: f64,
    pub fov_observed: [f64; 2],
    pub scene_size_observed: [f64; 2],
    pub normalization_scale_observed: [f64; 2],
    pub outer_distance_bins_hit: u32,
    pub throughput: ThroughputStats,
}

/// Per-spec observation used by both `compute_stats` and in-memory sweeps.
#[derive(Debug, Clone, Default)]
pub struct SpecObservation {
    pub violations: Vec<String>,
    pub has_sun: bool,
    pub has_wireframe: bool,
    pub has_axis_aligned: bool,
    pub has_in_space_sticks: bool,
    pub modify_pass: bool,
    pub specular_scene: bool,
    pub axis_aligned_slots: u32,
    pub axis_aligned_glass: u32,
    pub strengths: Vec<f64>,
    pub fovs: Vec<f64>,
    pub sizes: Vec<f64>,
    pub normalization_scale: f64,
    pub outer_bins: Vec<u32>,
}

fn note(violations: &mut Vec<String>, what: &str, v: f64) {
    violations.push(format!("{what} = {v}"));
}

/// Extract the statistics observation from one scene spec, checking every
/// sampled scalar against its table range.
pub fn observe_spec(spec: &SceneSpec, cfg: &GenConfig) -> SpecObservation {
    let mut o = SpecObservation {
        modify_pass: spec.material_flags.modify_pass,
        specular_scene: spec.material_flags.specular_scene,
        normalization_scale: spec.cameras.normalization_scale,
        ..SpecObservation::default()
    };
    let v = &mut o.violations;
    let b = &cfg.boxes;

    let sx = spec.scene_box.size_x();
    let sy = spec.scene_box.size_y();
    let h = spec.scene_box.height;
    o.sizes.extend([sx, sy]);
    if !cfg.scene.size_range.contains(sx) {
        note(v, "scene.size_x", sx);
    }
    if !cfg.scene.size_range.contains(sy) {
        note(v, "scene.size_y", sy);
    }
    if !cfg.scene.height_range.contains(h) {
        note(v, "scene.height", h);
    }

    let mut counts: std::collections::HashMap<BoxCategory, u32> = Default::default();
    for obox in &spec.object_boxes {
        *counts.entry(obox.category).or_insert(0) += 1;
        let s = obox.size();
        let mut in_range = |r: crate::config::Range, val: f64, what: &str| {
            if !r.contains(val) {
                note(v, what, val);
            }
        };
        match obox.category {
            BoxCategory::LargeObject => {
                for c in [s.x, s.y, s.z] {
                    in_range(b.large.size_range, c, "large.size");
                }
            }
            BoxCategory::SmallOnGround => {
                in_range(b.small.size_range, s.x, "small.size_x");
                in_range(b.small.size_range, s.y, "small.size_y");
                in_range(b.small.on_ground_height, s.z, "small.ground_height");
            }
            BoxCategory::SmallAtopLarge => {
                in_range(b.small.size_range, s.x, "small.size_x");
                in_range(b.small.size_range, s.y, "small.size_y");
                in_range(b.small.atop_height, s.z, "small.atop_height");
            }
            BoxCategory::OnRoofThin => in_range(b.on_roof.thin_height, s.z, "on_roof.thin_height"),
            BoxCategory::OnRoofThick => {
                in_range(b.on_roof.thick_height, s.z, "on_roof.thick_height")
            }
            BoxCategory::OnWallThin | BoxCategory::OnWallThick => {
                in_range(b.on_wall.size_range, s.z, "on_wall.vertical");
            }
            BoxCategory::Wireframe => {
                o.has_wireframe = true;
                in_range(b.wireframe.size_range, s.x, "wireframe.size_x");
                in_range(b.wireframe.size_range, s.y, "wireframe.size_y");
                in_range(b.wireframe.height_range, s.z, "wireframe.height");
            }
            BoxCategory::ThinStickOnWall => {
                let len = s.x.max(s.y).max(s.z);
                in_range(b.sticks.length_range, len, "stick.length");
            }
            BoxCategory::ThinStickInSpace => {
                o.has_in_space_sticks = true;
                let len = s.x.max(s.y).max(s.z);
                in_range(b.sticks.length_range, len, "stick.length");
            }
            BoxCategory::AxisAligned => {
                o.has_axis_aligned = true;
                in_range(b.axis_aligned.size_range, s.x, "axis_aligned.size_x");
                in_range(b.axis_aligned.size_range, s.y, "axis_aligned.size_y");
                in_range(b.axis_aligned.height_range, s.z, "axis_aligned.height");
            }
        }
    }
    let group = |cats: &[BoxCategory]| -> u32 {
        cats.iter().map(|c| counts.get(c).copied().unwrap_or(0)).sum()
    };
    let check_count = |v: &mut Vec<String>, n: u32, r: crate::config::CountRange, what: &str| {
        if !r.contains(n) {
            v.push(format!("{what} = {n}"));
        }
    };
    check_count(v, group(&[BoxCategory::LargeObject]), b.large.count, "large.count");
    check_count(
        v,
        group(&[BoxCategory::SmallOnGround, BoxCategory::SmallAtopLarge]),
        b.small.count,
        "small.count",
    );
    check_count(
        v,
        group(&[BoxCategory::OnRoofThin, BoxCategory::OnRoofThick]),
        b.on_roof.count,
        "on_roof.count",
    );
    check_count(
        v,
        group(&[BoxCategory::OnWallThin, BoxCategory::OnWallThick]),
        b.on_wall.count,
        "on_wall.count",
    );
    check_count(
        v,
        group(&[BoxCategory::ThinStickOnWall]),
        b.sticks.on_wall_count,
        "sticks.on_wall_count",
    );

    // Materials: scalars must fall in the union of the ranges that can
    // produce them given the scene's flags.
    let m = &cfg.materials;
    for (i, mat) in spec.materials.iter().enumerate() {
        if mat.transmissive {
            if !m.glass_ior.contains(mat.ior) {
                note(v, &format!("material[{i}].ior"), mat.ior);
            }
            if !m.glass_roughness.contains(mat.roughness) {
                note(v, &format!("material[{i}].glass_roughness"), mat.roughness);
            }
            if mat.metallic != 0.0 {
                note(v, &format!("material[{i}].glass_metallic"), mat.metallic);
            }
            if mat.emissive_strength != 0.0 {
                note(v, &format!("material[{i}].glass_emissive"), mat.emissive_strength);
            }
        } else {
            let rough_ok = m.roughness.contains(mat.roughness)
                || (spec.material_flags.specular_scene && m.specular_roughness.contains(mat.roughness));
            if !rough_ok {
                note(v, &format!("material[{i}].roughness"), mat.roughness);
            }
            let metal_ok = m.metallic.contains(mat.metallic)
                || (spec.material_flags.specular_scene && m.specular_metallic.contains(mat.metallic));
            if !metal_ok {
                note(v, &format!("material[{i}].metallic"), mat.metallic);
            }
            if !m.bump_amplitude.contains(mat.bump_amplitude) {
                note(v, &format!("material[{i}].bump_amplitude"), mat.bump_amplitude);
            }
        }
    }
    for obj in &spec.objects {
        if obj.category == BoxCategory::AxisAligned {
            for member in &obj.members {
                o.axis_aligned_slots += 1;
                if spec.materials[member.material_slot as usize].transmissive {
                    o.axis_aligned_glass += 1;
                }
            }
        }
    }

    // Lighting.
    let l = &cfg.lighting;
    o.has_sun = spec.lighting.sun.is_some();
    if let Some(sun) = &spec.lighting.sun {
        if !l.sun.strength.contains(sun.strength) {
            note(v, "sun.strength", sun.strength);
        }
        if sun.direction.z >= 0.0 {
            note(v, "sun.direction.z", sun.direction.z);
        }
    }
    let strength_union = |s: f64| {
        l.luminous.strength_primary.contains(s) || l.luminous.strength_boosted.contains(s)
    };
    for &slot in &spec.lighting.emissive_slots {
        let s = spec.materials[slot as usize].emissive_strength;
        o.strengths.push(s);
        if !strength_union(s) {
            note(v, "luminous.strength", s);
        }
    }
    for bulb in &spec.lighting.bulbs {
        o.strengths.push(bulb.strength);
        if !(l.bulbs.strength_primary.contains(bulb.strength)
            || l.bulbs.strength_boosted.contains(bulb.strength))
        {
            note(v, "bulb.strength", bulb.strength);
        }
    }
    if spec.lighting.ambient.strength != cfg.lighting.ambient_strength {
        note(v, "ambient.strength", spec.lighting.ambient.strength);
    }

    // Cameras.
    let cams = &spec.cameras;
    if !cfg.cameras.scale_range.contains(cams.normalization_scale) {
        note(v, "normalization_scale", cams.normalization_scale);
    }
    let center = spec.scene_box.center();
    let r_split = cfg.cameras.inner_split_frac
        * spec.scene_box.half_extent_x.max(spec.scene_box.half_extent_y);
    let r_max = {
        let mx = spec.scene_box.half_extent_x;
        let my = spec.scene_box.half_extent_y;
        (mx * mx + my * my).sqrt()
    };
    for cam in &cams.cameras {
        o.fovs.push(cam.fov_y_deg);
        if !cfg.cameras.fov_deg.contains(cam.fov_y_deg) {
            note(v, "camera.fov", cam.fov_y_deg);
        }
        if cam.region == CameraRegion::Outer {
            let gen = denormalized(cam, center, cams.normalization_scale);
            let r = (gen.position.x * gen.position.x + gen.position.y * gen.position.y).sqrt();
            let frac = ((r - r_split) / (r_max - r_split)).clamp(0.0, 0.999_999);
            o.outer_bins
                .push((frac * cfg.cameras.outer_distance_bins as f64) as u32);
        }
    }
    o
}

/// Aggregate observations into dataset statistics.
pub fn aggregate_stats<'a, I>(observations: I) -> DatasetStats
where
    I: IntoIterator<Item = &'a SpecObservation>,
{
    let mut stats = DatasetStats {
        fov_observed: [f64::INFINITY, f64::NEG_INFINITY],
        scene_size_observed: [f64::INFINITY, f64::NEG_INFINITY],
        normalization_scale_observed: [f64::INFINITY, f64::NEG_INFINITY],
        ..DatasetStats::default()
    };
    let mut n = 0usize;
    let mut sun = 0usize;
    let mut wf = 0usize;
    let mut aa = 0usize;
    let mut sticks = 0usize;
    let mut modify = 0usize;
    let mut specular = 0usize;
    let mut glass = 0u64;
    let mut glass_total = 0u64;
    let mut boosted = 0u64;
    let mut strengths = 0u64;
    let mut bins: std::collections::HashSet<u32> = Default::default();
    for o in observations {
        n += 1;
        stats.range_violations += o.violations.len() as u64;
        for vio in o.violations.iter().take(3) {
            if stats.violation_examples.len() < 10 {
                stats.violation_examples.push(vio.clone());
            }
        }
        sun += o.has_sun as usize;
        wf += o.has_wireframe as usize;
        aa += o.has_axis_aligned as usize;
        sticks += o.has_in_space_sticks as usize;
        modify += o.modify_pass as usize;
        specular += o.specular_scene as usize;
        glass += o.axis_aligned_glass as u64;
        glass_total += o.axis_aligned_slots as u64;
        for &s in &o.strengths {
            strengths += 1;
            if s >= 5.0 {
                boosted += 1;
            }
        }
        for &f in &o.fovs {
            stats.fov_observed[0] = stats.fov_observed[0].min(f);
            stats.fov_observed[1] = stats.fov_observed[1].max(f);
        }
        for &s in &o.sizes {
            stats.scene_size_observed[0] = stats.scene_size_observed[0].min(s);
            stats.scene_size_observed[1] = stats.scene_size_observed[1].max(s);
        }
        stats.normalization_scale_observed[0] =
            stats.normalization_scale_observed[0].min(o.normalization_scale);
        stats.normalization_scale_observed[1] =
            stats.normalization_scale_observed[1].max(o.normalization_scale);
        bins.extend(o.outer_bins.iter().copied());
    }
    stats.scenes_total = n;
    stats.scenes_ok = n;
    if n > 0 {
        let nf = n as f64;
        stats.presence = PresenceStats {
            sunlight: sun as f64 / nf,
            wireframe: wf as f64 / nf,
            axis_aligned: aa as f64 / nf,
            in_space_sticks: sticks as f64 / nf,
            material_modify: modify as f64 / nf,
            specular_scene: specular as f64 / nf,
        };
    }
    stats.glass_on_axis_aligned_fraction = if glass_total > 0 {
        glass as f64 / glass_total as f64
    } else {
        0.0
    };
    stats.boosted_strength_fraction = if strengths > 0 {
        boosted as f64 / strengths as f64
    } else {
        0.0
    };
    stats.outer_distance_bins_hit = bins.len() as u32;
    stats
}

/// Read a generated dataset and compute its statistics report.
pub fn compute_stats(out_dir: &Path, cfg: &GenConfig) -> Result<DatasetStats> {
    let manifest = Manifest::read(&out_dir.join("manifest.jsonl"))?;
    let observations: Vec<SpecObservation> = manifest
        .entries
        .par_iter()
        .filter(|e| e.status == SceneStatus::Ok)
        .map(|e| -> Result<SpecObservation> {
            let pkg = read_package(&out_dir.join(&e.dir))?;
            Ok(observe_spec(&pkg.scene_spec, cfg))
        })
        .collect::<Result<_>>()?;
    let mut stats = aggregate_stats(observations.iter());
    stats.scenes_total = manifest.entries.len();
    stats.scenes_ok = manifest.ok_count();
    stats.scenes_failed = stats.scenes_total - stats.scenes_ok;

    let ok_entries: Vec<&ManifestEntry> = manifest
        .entries
        .iter()
        .filter(|e| e.status == SceneStatus::Ok)
        .collect();
    if !ok_entries.is_empty() {
        let nf = ok_entries.len() as f64;
        let spec_ms: f64 = ok_entries.iter().map(|e| e.timings_ms.spec_ms()).sum();
        let render_ms: f64 = ok_entries.iter().map(|e| e.timings_ms.render_ms).sum();
        let total_ms: f64 = ok_entries.iter().map(|e| e.timings_ms.total_ms).sum();
        stats.throughput = ThroughputStats {
            spec_ms_mean: spec_ms / nf,
            render_ms_mean: render_ms / nf,
            total_ms_mean: total_ms / nf,
            scenes_per_second_aggregate: if total_ms > 0.0 { nf / (total_ms / 1e3) } else { 0.0 },
        };
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fast_cfg() -> GenConfig {
        let mut cfg = GenConfig::draft();
        cfg.cameras.outer_count = 4;
        cfg.cameras.inner_count = 2;
        cfg.cameras.width = 8;
        cfg.cameras.height = 8;
        cfg
    }

    fn temp_out(nonce: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("scenesynth_ds_{nonce}_{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        dir
    }

    #[test]
    fn dataset_roundtrip_and_validation() {
        let cfg = fast_cfg();
        let out = temp_out("roundtrip");
        let manifest = generate_dataset(11, 3, 2, &out, &cfg).unwrap();
        assert_eq!(manifest.entries.len(), 3);
        assert_eq!(manifest.ok_count(), 3);
        assert!(out.join("scenes/00000000/scene.json").exists());
        assert!(out.join("config.toml").exists());

        let back = Manifest::read(&out.join("manifest.jsonl")).unwrap();
        assert_eq!(back.entries.len(), 3);
        assert_eq!(back.header.config_hash, cfg.hash());

        let reports = validate_dataset(&out, &cfg).unwrap();
        for r in &reports {
            assert!(r.passed(), "scene {} failed: {:?}", r.scene_id, r.checks);
        }

        let stats = compute_stats(&out, &cfg).unwrap();
        assert_eq!(stats.scenes_ok, 3);
        assert_eq!(stats.range_violations, 0, "{:?}", stats.violation_examples);
        let _ = fs::remove_dir_all(&out);
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let cfg = fast_cfg();
        let out1 = temp_out("w1");
        let out2 = temp_out("w2");
        generate_dataset(13, 3, 1, &out1, &cfg).unwrap();
        generate_dataset(13, 3, 4, &out2, &cfg).unwrap();
        for i in 0..3u64 {
            let id = scene_id(i);
            let a = fs::read(out1.join("scenes").join(&id).join("scene.json")).unwrap();
            let b = fs::read(out2.join("scenes").join(&id).join("scene.json")).unwrap();
            assert_eq!(a, b, "scene.json differs for {id}");
            let da = fs::read(out1.join("scenes").join(&id).join("views/00.depth")).unwrap();
            let db = fs::read(out2.join("scenes").join(&id).join("views/00.depth")).unwrap();
            assert_eq!(da, db, "depth differs for {id}");
        }
        // Manifests identical modulo timing fields.
        let ma = Manifest::read(&out1.join("manifest.jsonl")).unwrap();
        let mb = Manifest::read(&out2.join("manifest.jsonl")).unwrap();
        for (a, b) in ma.entries.iter().zip(&mb.entries) {
            let mut a = a.clone();
            let mut b = b.clone();
            a.timings_ms = SceneTimings::default();
            b.timings_ms = SceneTimings::default();
            assert_eq!(a, b);
        }
        let _ = fs::remove_dir_all(&out1);
        let _ = fs::remove_dir_all(&out2);
    }

    #[test]
    fn empty_dataset_is_fine() {
        let cfg = fast_cfg();
        let out = temp_out("empty");
        let manifest = generate_dataset(1, 0, 1, &out, &cfg).unwrap();
        assert!(manifest.entries.is_empty());
        let stats = compute_stats(&out, &cfg).unwrap();
        assert_eq!(stats.scenes_total, 0);
        assert_eq!(stats.throughput.scenes_per_second_aggregate, 0.0);
        let _ = fs::remove_dir_all(&out);
    }

    #[test]
    fn injected_camera_fault_fails_only_clearance() {
        let cfg = fast_cfg();
        let out = temp_out("fault");
        generate_dataset(17, 1, 1, &out, &cfg).unwrap();
        let dir = out.join("scenes/00000000");
        let mut pkg = read_package(&dir).unwrap();
        // Teleport one camera into the floor.
        pkg.scene_spec.cameras.cameras[0].position = Vec3::new(0.0, 0.0, 0.01);
        fs::write(dir.join("scene.json"), serde_json::to_vec_pretty(&pkg).unwrap()).unwrap();
        let report = validate_scene(&dir, &cfg);
        let by_name = |name: &str| {
            report
                .checks
                .iter()
                .find(|c| c.name == name)
                .unwrap_or_else(|| panic!("missing check {name}"))
                .passed
        };
        assert!(!by_name("camera_clearance"));
        assert!(by_name("containment"));
        assert!(by_name("file_integrity"));
        assert!(by_name("validity_mask_rule"));
        let _ = fs::remove_dir_all(&out);
    }

    #[test]
    fn truncated_depth_fails_file_integrity() {
        let cfg = fast_cfg();
        let out = temp_out("trunc");
        generate_dataset(19, 1, 1, &out, &cfg).unwrap();
        let dir = out.join("scenes/00000000");
        let depth_path = dir.join("views/00.depth");
        let bytes = fs::read(&depth_path).unwrap();
        fs::write(&depth_path, &bytes[..bytes.len() - 5]).unwrap();
        let report = validate_scene(&dir, &cfg);
        let integrity = report.checks.iter().find(|c| c.name == "file_integrity").unwrap();
        assert!(!integrity.passed);
        assert!(
            integrity.detail.as_deref().unwrap_or("").contains("00.depth"),
            "detail should name the offending file: {:?}",
            integrity.detail
        );
        let _ = fs::remove_dir_all(&out);
    }

    #[test]
    fn failed_scene_leaves_no_partial_files() {
        let mut cfg = fast_cfg();
        // Impossible clearance forces camera sampling to fail.
        cfg.cameras.min_clearance = 500.0;
        let out = temp_out("failure");
        let manifest = generate_dataset(23, 1, 1, &out, &cfg).unwrap();
        assert_eq!(manifest.ok_count(), 0);
        assert_eq!(manifest.entries[0].status, SceneStatus::Failed);
        assert!(manifest.entries[0].error.is_some());
        assert!(!out.join("scenes/00000000").exists());
        // No staging leftovers either.
        let leftovers: Vec<_> = fs::read_dir(out.join("scenes"))
            .unwrap()
            .filter_map(|e| e.ok())
            .collect();
        assert!(leftovers.is_empty(), "staging dirs left behind");
        let _ = fs::remove_dir_all(&out);
    }
}
