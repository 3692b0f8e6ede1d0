//! Scene assembly: the full plan -> geometry -> materials -> lighting ->
//! cameras pipeline, the declarative [`SceneSpec`] it produces, and the
//! deterministic lowering from a spec back to renderable triangles.
//!
//! A `SceneSpec` is sufficient to re-render the scene exactly: every
//! sampled quantity (member poses, noise seeds, window rects, bulbs,
//! cameras) is stored, and lowering is a pure function of the spec and the
//! config's mesh resolutions.

use crate::bvh::{flatten_meshes, Bvh, SceneTriangle};
use crate::camera::{self, CameraSet};
use crate::compose::{compose_object, lower_object, ObjectSpec};
use crate::config::GenConfig;
use crate::error::Result;
use crate::floorplan::{sample_floor_plan, ObjectBox, SceneBox, WallId, WALLS};
use crate::gt::{self, PointMap, ValidityMask};
use crate::lighting::{
    assign_luminous_slots, carve_windows, place_bulbs, sample_ambient, sample_sun, Bulb,
    LightingRig, WindowCutout,
};
use crate::material::{make_glass, randomize_scene_materials, sample_base_material, Material, MaterialFlags};
use crate::math::{Aabb, Vec3};
use crate::mesh::TriMesh;
use crate::primitives;
use crate::render::{render_view, RenderScene};
use crate::rng::{derive_stream, derive_stream_indexed, Seed};
use crate::wireframe::{tube_edges, WireGraph};
use serde::{Deserialize, Serialize};
use std::time::Instant;

pub const SLOT_FLOOR: u32 = 0;
pub const SLOT_CEILING: u32 = 1;
pub const SHELL_SLOTS: u32 = 6;

pub fn wall_slot(wall: WallId) -> u32 {
    2 + WALLS.iter().position(|&w| w == wall).unwrap() as u32
}

/// The complete declarative description of one scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub seed: Seed,
    pub scene_box: SceneBox,
    pub object_boxes: Vec<ObjectBox>,
    pub objects: Vec<ObjectSpec>,
    pub materials: Vec<Material>,
    pub material_flags: MaterialFlags,
    pub windows: Vec<WindowCutout>,
    pub lighting: LightingRig,
    /// Cameras with export-frame (scale-normalized) positions.
    pub cameras: CameraSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShellPart {
    Floor,
    Ceiling,
    Wall(WallId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshSource {
    Shell(ShellPart),
    Object { object: u32, member: u32 },
    GlassPane { window: u32 },
    WindowBars { window: u32 },
    Bulb { index: u32 },
}

#[derive(Debug, Clone)]
pub struct SceneMesh {
    pub source: MeshSource,
    pub mesh: TriMesh,
}

/// Wall-clock milliseconds per pipeline stage; diagnostics only, never part
/// of the scene spec.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub plan_ms: f64,
    pub geometry_ms: f64,
    pub materials_ms: f64,
    pub lighting_ms: f64,
    pub cameras_ms: f64,
}

/// A spec plus its lowered geometry and acceleration structure.
pub struct BuiltScene {
    pub spec: SceneSpec,
    pub meshes: Vec<SceneMesh>,
    pub tris: Vec<SceneTriangle>,
    pub bvh: Bvh,
    pub timings: StageTimings,
}

// ---------------------------------------------------------------------------
// Shell lowering
// ---------------------------------------------------------------------------

/// Subtract the z-intervals of covering cutouts from [0, height].
fn remaining_intervals(mut intervals: Vec<(f64, f64)>, cut: (f64, f64)) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(intervals.len() + 1);
    for (lo, hi) in intervals.drain(..) {
        if cut.1 <= lo || cut.0 >= hi {
            out.push((lo, hi));
            continue;
        }
        if cut.0 > lo {
            out.push((lo, cut.0));
        }
        if cut.1 < hi {
            out.push((cut.1, hi));
        }
    }
    out
}

/// One wall slab re-triangulated around its window cutouts: the face is
/// split into vertical strips at cutout edges, and each strip keeps the
/// z-intervals the cutouts leave behind.
fn lower_wall(scene: &SceneBox, wall: WallId, windows: &[WindowCutout]) -> TriMesh {
    let t = scene.wall_thickness;
    let slot = wall_slot(wall);
    let along_axis = wall.along_axis();
    let normal_axis = wall.normal_axis();
    let a_half = scene.half_extent(along_axis) + t;
    let plane = scene.wall_plane(wall);
    let (n_lo, n_hi) = match wall {
        WallId::NegX | WallId::NegY => (plane - t, plane),
        WallId::PosX | WallId::PosY => (plane, plane + t),
    };
    let cuts: Vec<&WindowCutout> = windows.iter().filter(|w| w.wall == wall).collect();

    let mut xs = vec![-a_half, a_half];
    for c in &cuts {
        xs.push(c.min.x.clamp(-a_half, a_half));
        xs.push(c.max.x.clamp(-a_half, a_half));
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let mut mesh = TriMesh::new();
    for pair in xs.windows(2) {
        let (x0, x1) = (pair[0], pair[1]);
        if x1 - x0 < 1e-12 {
            continue;
        }
        let mut intervals = vec![(0.0, scene.height)];
        for c in &cuts {
            if c.min.x <= x0 + 1e-12 && c.max.x >= x1 - 1e-12 {
                intervals = remaining_intervals(intervals, (c.min.y, c.max.y));
            }
        }
        for (z0, z1) in intervals {
            if z1 - z0 < 1e-9 {
                continue;
            }
            let aabb = if normal_axis == 0 {
                Aabb::new(Vec3::new(n_lo, x0, z0), Vec3::new(n_hi, x1, z1))
            } else {
                Aabb::new(Vec3::new(x0, n_lo, z0), Vec3::new(x1, n_hi, z1))
            };
            mesh.append(&primitives::box_mesh(&aabb, slot));
        }
    }
    mesh
}

/// Floor, ceiling and four walls (with window holes) as thin slabs.
pub fn lower_shell(scene: &SceneBox, windows: &[WindowCutout]) -> Vec<SceneMesh> {
    let t = scene.wall_thickness;
    let (hx, hy, h) = (scene.half_extent_x, scene.half_extent_y, scene.height);
    let mut out = Vec::with_capacity(6);
    out.push(SceneMesh {
        source: MeshSource::Shell(ShellPart::Floor),
        mesh: primitives::box_mesh(
            &Aabb::new(Vec3::new(-hx - t, -hy - t, -t), Vec3::new(hx + t, hy + t, 0.0)),
            SLOT_FLOOR,
        ),
    });
    out.push(SceneMesh {
        source: MeshSource::Shell(ShellPart::Ceiling),
        mesh: primitives::box_mesh(
            &Aabb::new(Vec3::new(-hx - t, -hy - t, h), Vec3::new(hx + t, hy + t, h + t)),
            SLOT_CEILING,
        ),
    });
    for wall in WALLS {
        out.push(SceneMesh {
            source: MeshSource::Shell(ShellPart::Wall(wall)),
            mesh: lower_wall(scene, wall, windows),
        });
    }
    out
}

/// Glass panes and bar grids for the carved windows.
pub fn lower_window_furniture(scene: &SceneBox, windows: &[WindowCutout]) -> Vec<SceneMesh> {
    let t = scene.wall_thickness;
    let mut out = Vec::new();
    for (wi, w) in windows.iter().enumerate() {
        let plane = scene.wall_plane(w.wall);
        let center = match w.wall {
            WallId::NegX | WallId::NegY => plane - t * 0.5,
            WallId::PosX | WallId::PosY => plane + t * 0.5,
        };
        if let Some(slot) = w.glass_slot {
            // Pane thickness from the material config is carried by the
            // window geometry itself; keep it inside the wall slab.
            let g = (t * 0.8).min(0.08);
            let (lo, hi) = (center - g * 0.5, center + g * 0.5);
            let aabb = if w.wall.normal_axis() == 0 {
                Aabb::new(Vec3::new(lo, w.min.x, w.min.y), Vec3::new(hi, w.max.x, w.max.y))
            } else {
                Aabb::new(Vec3::new(w.min.x, lo, w.min.y), Vec3::new(w.max.x, hi, w.max.y))
            };
            out.push(SceneMesh {
                source: MeshSource::GlassPane { window: wi as u32 },
                mesh: primitives::box_mesh(&aabb, slot),
            });
        }
        if let Some(bars) = w.bars {
            let mut graph = WireGraph {
                vertices: Vec::new(),
                edges: Vec::new(),
            };
            let add_line = |graph: &mut WireGraph, a: Vec3, b: Vec3| {
                let i = graph.vertices.len() as u32;
                graph.vertices.push(a);
                graph.vertices.push(b);
                graph.edges.push([i, i + 1]);
            };
            for k in 1..bars.divisions_along {
                let fx = w.min.x + (w.max.x - w.min.x) * k as f64 / bars.divisions_along as f64;
                let a = w.to_world(crate::math::Vec2::new(fx, w.min.y), center);
                let b = w.to_world(crate::math::Vec2::new(fx, w.max.y), center);
                add_line(&mut graph, a, b);
            }
            for k in 1..bars.divisions_vertical {
                let fz = w.min.y + (w.max.y - w.min.y) * k as f64 / bars.divisions_vertical as f64;
                let a = w.to_world(crate::math::Vec2::new(w.min.x, fz), center);
                let b = w.to_world(crate::math::Vec2::new(w.max.x, fz), center);
                add_line(&mut graph, a, b);
            }
            if !graph.edges.is_empty() {
                out.push(SceneMesh {
                    source: MeshSource::WindowBars { window: wi as u32 },
                    mesh: tube_edges(&graph, Vec3::ONE, bars.thickness, bars.material_slot),
                });
            }
        }
    }
    out
}

/// Small emissive spheres making bulbs visible in renders.
pub fn lower_bulbs(bulbs: &[Bulb]) -> Vec<SceneMesh> {
    bulbs
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let mut sphere = primitives::unit_sphere(12, 6, b.material_slot);
            sphere.scale_elem(Vec3::splat(2.0 * b.radius));
            sphere.apply_rotation_translation(&crate::math::Mat3::IDENTITY, b.position);
            SceneMesh {
                source: MeshSource::Bulb { index: i as u32 },
                mesh: sphere,
            }
        })
        .collect()
}

/// All scene meshes from a spec, in the canonical order: shell, objects,
/// window furniture, bulbs.
pub fn lower_scene(spec: &SceneSpec, cfg: &GenConfig) -> Vec<SceneMesh> {
    let mut meshes = lower_shell(&spec.scene_box, &spec.windows);
    for (oi, obj) in spec.objects.iter().enumerate() {
        for (mi, mesh) in lower_object(obj, cfg).into_iter().enumerate() {
            meshes.push(SceneMesh {
                source: MeshSource::Object {
                    object: oi as u32,
                    member: mi as u32,
                },
                mesh,
            });
        }
    }
    meshes.extend(lower_window_furniture(&spec.scene_box, &spec.windows));
    meshes.extend(lower_bulbs(&spec.lighting.bulbs));
    meshes
}

fn bare_meshes(meshes: &[SceneMesh]) -> Vec<TriMesh> {
    meshes.iter().map(|m| m.mesh.clone()).collect()
}

impl BuiltScene {
    /// Rebuild geometry and the BVH from a stored spec.
    pub fn from_spec(spec: SceneSpec, cfg: &GenConfig) -> Result<BuiltScene> {
        let meshes = lower_scene(&spec, cfg);
        let tris = flatten_meshes(&bare_meshes(&meshes));
        let bvh = Bvh::build(&tris)?;
        Ok(BuiltScene {
            spec,
            meshes,
            tris,
            bvh,
            timings: StageTimings::default(),
        })
    }

    pub fn triangle_count(&self) -> usize {
        self.tris.len()
    }

    pub fn render_scene<'a>(&'a self, cfg: &'a GenConfig) -> RenderScene<'a> {
        RenderScene {
            tris: &self.tris,
            bvh: &self.bvh,
            materials: &self.spec.materials,
            rig: &self.spec.lighting,
            cfg: &cfg.render,
        }
    }
}

/// Generate one scene end to end (no rendering): floor plan, composed
/// geometry, materials with the randomization pass, lighting with carved
/// windows and bulbs, and the clearance-constrained camera set with
/// normalized export poses.
pub fn generate_built_scene(seed: Seed, cfg: &GenConfig) -> Result<BuiltScene> {
    let mut timings = StageTimings::default();

    let t = Instant::now();
    let mut plan_stream = derive_stream(seed, "floorplan");
    let plan = sample_floor_plan(&mut plan_stream, cfg);
    timings.plan_ms = t.elapsed().as_secs_f64() * 1e3;

    // Geometry: one decorrelated stream per object, so objects never shift
    // each other's draws.
    let t = Instant::now();
    let mut objects: Vec<ObjectSpec> = Vec::with_capacity(plan.boxes.len());
    let mut object_meshes: Vec<SceneMesh> = Vec::new();
    let mut next_slot = SHELL_SLOTS;
    for (i, obox) in plan.boxes.iter().enumerate() {
        let mut stream = derive_stream_indexed(seed, "geometry", i as u64);
        let obj = compose_object(&mut stream, obox, i as u32, cfg, next_slot);
        next_slot += obj.spec.members.len() as u32;
        for (mi, mesh) in obj.meshes.into_iter().enumerate() {
            object_meshes.push(SceneMesh {
                source: MeshSource::Object {
                    object: i as u32,
                    member: mi as u32,
                },
                mesh,
            });
        }
        objects.push(obj.spec);
    }
    timings.geometry_ms = t.elapsed().as_secs_f64() * 1e3;

    // Materials: shell slots first, then member slots in slot order.
    let t = Instant::now();
    let mut mat_stream = derive_stream(seed, "materials");
    let mut materials: Vec<Material> = Vec::with_capacity(next_slot as usize);
    for _ in 0..SHELL_SLOTS {
        materials.push(sample_base_material(&mut mat_stream, cfg));
    }
    for obj in &objects {
        for member in &obj.members {
            debug_assert_eq!(member.material_slot as usize, materials.len());
            materials.push(sample_base_material(&mut mat_stream, cfg));
        }
    }
    let material_flags = randomize_scene_materials(&mut mat_stream, &mut materials, cfg);
    // Glass override for axis-aligned slabs, after the randomization pass
    // so re-rolls cannot undo it.
    for obj in &objects {
        if obj.category == crate::floorplan::BoxCategory::AxisAligned {
            for member in &obj.members {
                if mat_stream.bernoulli(cfg.materials.axis_aligned_glass_prob) {
                    materials[member.material_slot as usize] = make_glass(&mut mat_stream, cfg);
                }
            }
        }
    }
    timings.materials_ms = t.elapsed().as_secs_f64() * 1e3;

    // Lighting: ambient, sun + windows, luminous slots, bulbs.
    let t = Instant::now();
    let mut light_stream = derive_stream(seed, "lighting");
    let ambient = sample_ambient(&mut light_stream, cfg);
    let sun = sample_sun(&mut light_stream, cfg);
    let windows = match &sun {
        Some(sun) => carve_windows(
            &mut light_stream,
            &plan.scene_box,
            sun.direction,
            &mut materials,
            cfg,
        ),
        None => Vec::new(),
    };
    let emissive_slots = assign_luminous_slots(&mut light_stream, &objects, &mut materials, cfg);

    // Pre-bulb geometry for bulb clearance queries.
    let mut meshes = lower_shell(&plan.scene_box, &windows);
    meshes.extend(object_meshes);
    meshes.extend(lower_window_furniture(&plan.scene_box, &windows));
    let pre_tris = flatten_meshes(&bare_meshes(&meshes));
    let pre_bvh = Bvh::build(&pre_tris)?;
    let bulbs = place_bulbs(
        &mut light_stream,
        &plan.scene_box,
        &pre_tris,
        &pre_bvh,
        &mut materials,
        cfg,
    );
    let rig = LightingRig {
        ambient,
        sun,
        bulbs,
        emissive_slots,
    };
    timings.lighting_ms = t.elapsed().as_secs_f64() * 1e3;

    // Final geometry including the bulbs' glow spheres.
    meshes.extend(lower_bulbs(&rig.bulbs));
    let tris = flatten_meshes(&bare_meshes(&meshes));
    let bvh = Bvh::build(&tris)?;

    let t = Instant::now();
    let mut cam_stream = derive_stream(seed, "cameras");
    let mut cameras = camera::sample_cameras(
        &mut cam_stream,
        &plan.scene_box,
        &tris,
        &bvh,
        cfg,
        seed.scene_index,
    )?;
    camera::normalize_poses(&mut cam_stream, &mut cameras, plan.scene_box.center(), cfg);
    timings.cameras_ms = t.elapsed().as_secs_f64() * 1e3;

    let spec = SceneSpec {
        seed,
        scene_box: plan.scene_box,
        object_boxes: plan.boxes,
        objects,
        materials,
        material_flags,
        windows,
        lighting: rig,
        cameras,
    };
    Ok(BuiltScene {
        spec,
        meshes,
        tris,
        bvh,
        timings,
    })
}

// ---------------------------------------------------------------------------
// Export-frame rendering
// ---------------------------------------------------------------------------

/// One view's exported rasters: gamma RGB, scale-normalized z-depth, the
/// world-frame point map and the depth-threshold validity mask, all
/// expressed in the export (scale-normalized) frame.
pub struct ViewExport {
    pub width: u32,
    pub height: u32,
    pub rgb: Vec<f64>,
    pub depth: Vec<f64>,
    pub hit_mask: Vec<bool>,
    pub points: PointMap,
    pub mask: ValidityMask,
}

pub fn render_view_export(built: &BuiltScene, cam_index: usize, cfg: &GenConfig) -> Result<ViewExport> {
    let spec = &built.spec;
    let cam_norm = &spec.cameras.cameras[cam_index];
    let s = spec.cameras.normalization_scale;
    let cam_gen = camera::denormalized(cam_norm, spec.scene_box.center(), s);
    let scene = built.render_scene(cfg);
    let out = render_view(&scene, &cam_gen);
    // A global similarity maps generation-frame depth to the export frame.
    let depth: Vec<f64> = out.depth.iter().map(|d| d * s).collect();
    let points = gt::depth_to_points(&depth, &out.hit_mask, cam_norm)?;
    let mask = gt::validity_mask(
        &depth,
        &out.hit_mask,
        cfg.gt.depth_mask_threshold,
        cam_norm.width,
        cam_norm.height,
    );
    Ok(ViewExport {
        width: cam_norm.width,
        height: cam_norm.height,
        rgb: out.rgb,
        depth,
        hit_mask: out.hit_mask,
        points,
        mask,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::BoxCategory;

    fn fast_cfg() -> GenConfig {
        let mut cfg = GenConfig::draft();
        cfg.cameras.outer_count = 6;
        cfg.cameras.inner_count = 2;
        cfg.cameras.width = 16;
        cfg.cameras.height = 16;
        cfg
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = fast_cfg();
        let a = generate_built_scene(Seed::new(1, 0), &cfg).unwrap();
        let b = generate_built_scene(Seed::new(1, 0), &cfg).unwrap();
        let ja = serde_json::to_string(&a.spec).unwrap();
        let jb = serde_json::to_string(&b.spec).unwrap();
        assert_eq!(ja, jb);
        assert_eq!(a.tris.len(), b.tris.len());
    }

    #[test]
    fn lowering_from_spec_matches_generated_meshes() {
        let cfg = fast_cfg();
        let built = generate_built_scene(Seed::new(2, 0), &cfg).unwrap();
        let relowered = BuiltScene::from_spec(built.spec.clone(), &cfg).unwrap();
        assert_eq!(built.meshes.len(), relowered.meshes.len());
        for (a, b) in built.meshes.iter().zip(&relowered.meshes) {
            assert_eq!(a.source, b.source);
            assert_eq!(a.mesh.vertices, b.mesh.vertices);
            assert_eq!(a.mesh.triangles, b.mesh.triangles);
            assert_eq!(a.mesh.material_slots, b.mesh.material_slots);
        }
    }

    #[test]
    fn camera_config_does_not_change_geometry() {
        let cfg = fast_cfg();
        let mut cfg2 = fast_cfg();
        cfg2.cameras.inner_count = 4;
        cfg2.cameras.fov_deg = crate::config::Range { lo: 50.0, hi: 60.0 };
        let a = generate_built_scene(Seed::new(3, 7), &cfg).unwrap();
        let b = generate_built_scene(Seed::new(3, 7), &cfg2).unwrap();
        assert_eq!(
            serde_json::to_string(&a.spec.object_boxes).unwrap(),
            serde_json::to_string(&b.spec.object_boxes).unwrap()
        );
        assert_eq!(
            serde_json::to_string(&a.spec.objects).unwrap(),
            serde_json::to_string(&b.spec.objects).unwrap()
        );
        assert_eq!(
            serde_json::to_string(&a.spec.materials).unwrap(),
            serde_json::to_string(&b.spec.materials).unwrap()
        );
        assert_ne!(a.spec.cameras.cameras.len(), b.spec.cameras.cameras.len());
    }

    #[test]
    fn material_slots_cover_all_members_and_extras() {
        let cfg = fast_cfg();
        let built = generate_built_scene(Seed::new(4, 0), &cfg).unwrap();
        let spec = &built.spec;
        for obj in &spec.objects {
            for m in &obj.members {
                assert!((m.material_slot as usize) < spec.materials.len());
            }
        }
        for w in &spec.windows {
            if let Some(s) = w.glass_slot {
                assert!(spec.materials[s as usize].transmissive);
            }
            if let Some(b) = w.bars {
                assert!((b.material_slot as usize) < spec.materials.len());
            }
        }
        for b in &spec.lighting.bulbs {
            assert!(spec.materials[b.material_slot as usize].is_emissive());
        }
        // Every triangle's slot resolves.
        for t in &built.tris {
            assert!((t.material_slot as usize) < spec.materials.len());
        }
    }

    #[test]
    fn emissive_slots_reference_sticks_or_slabs_only() {
        let cfg = fast_cfg();
        for idx in 0..30 {
            let built = generate_built_scene(Seed::new(5, idx), &cfg).unwrap();
            let spec = &built.spec;
            for &slot in &spec.lighting.emissive_slots {
                let owner = spec.objects.iter().find(|o| {
                    o.members.iter().any(|m| m.material_slot == slot)
                });
                let owner = owner.expect("emissive slot must belong to an object");
                assert!(
                    owner.category.is_luminous_candidate(),
                    "emissive slot on {:?}",
                    owner.category
                );
                assert!(!spec.materials[slot as usize].transmissive);
                assert!(spec.materials[slot as usize].is_emissive());
            }
        }
    }

    #[test]
    fn bulbs_keep_clearance_from_geometry() {
        let cfg = fast_cfg();
        for idx in 0..20 {
            let built = generate_built_scene(Seed::new(6, idx), &cfg).unwrap();
            // Distance from bulb centers to all non-bulb geometry.
            let solid: Vec<TriMesh> = built
                .meshes
                .iter()
                .filter(|m| !matches!(m.source, MeshSource::Bulb { .. }))
                .map(|m| m.mesh.clone())
                .collect();
            let tris = flatten_meshes(&solid);
            let bvh = Bvh::build(&tris).unwrap();
            for b in &built.spec.lighting.bulbs {
                assert!(bvh.distance(&tris, b.position) > b.radius);
            }
        }
    }

    #[test]
    fn sun_scene_has_reachable_window() {
        let cfg = fast_cfg();
        let mut checked = 0;
        for idx in 0..40 {
            let built = generate_built_scene(Seed::new(7, idx), &cfg).unwrap();
            let spec = &built.spec;
            if spec.lighting.sun.is_none() {
                assert!(spec.windows.is_empty());
                continue;
            }
            assert!(!spec.windows.is_empty(), "sunlit scene must carve windows");
            checked += 1;
            // A ray from the scene center through some window center must
            // escape the shell.
            let shell: Vec<TriMesh> = built
                .meshes
                .iter()
                .filter(|m| matches!(m.source, MeshSource::Shell(_)))
                .map(|m| m.mesh.clone())
                .collect();
            let tris = flatten_meshes(&shell);
            let bvh = Bvh::build(&tris).unwrap();
            let center = spec.scene_box.center();
            let escaped = spec.windows.iter().any(|w| {
                let plane = spec.scene_box.wall_plane(w.wall);
                let target = w.to_world(w.center(), plane);
                let dir = (target - center).normalized();
                bvh.intersect(&tris, center, dir, 1e-6, f64::INFINITY).is_none()
            });
            assert!(escaped, "seed (7,{idx}): no window lets light through");
        }
        assert!(checked > 10, "too few sunlit scenes in the sweep");
    }

    #[test]
    fn axis_aligned_glass_rate_matches_table() {
        let cfg = fast_cfg();
        let mut glass = 0usize;
        let mut total = 0usize;
        for idx in 0..400 {
            let built = generate_built_scene(Seed::new(8, idx), &cfg).unwrap();
            for obj in &built.spec.objects {
                if obj.category == BoxCategory::AxisAligned {
                    for m in &obj.members {
                        total += 1;
                        if built.spec.materials[m.material_slot as usize].transmissive {
                            glass += 1;
                        }
                    }
                }
            }
        }
        let f = glass as f64 / total as f64;
        assert!((f - 0.8).abs() < 0.05, "axis-aligned glass rate {f} over {total}");
    }

    #[test]
    fn view_export_roundtrips_through_projection() {
        let cfg = fast_cfg();
        let built = generate_built_scene(Seed::new(9, 0), &cfg).unwrap();
        let view = render_view_export(&built, 0, &cfg).unwrap();
        let cam = &built.spec.cameras.cameras[0];
        let mut checked = 0;
        for py in 0..view.height {
            for px in 0..view.width {
                let i = (py * view.width + px) as usize;
                if !view.points.valid[i] {
                    continue;
                }
                let (u, v, _) = cam.project(view.points.points[i]).unwrap();
                assert!((u - (px as f64 + 0.5)).abs() < 1e-4);
                assert!((v - (py as f64 + 0.5)).abs() < 1e-4);
                checked += 1;
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn tiny_resolution_smoke() {
        let mut cfg = fast_cfg();
        cfg.cameras.width = 2;
        cfg.cameras.height = 2;
        let built = generate_built_scene(Seed::new(10, 0), &cfg).unwrap();
        let view = render_view_export(&built, 0, &cfg).unwrap();
        assert_eq!(view.rgb.len(), 2 * 2 * 3);
        assert_eq!(view.depth.len(), 4);
    }
}
