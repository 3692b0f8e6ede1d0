//! Object composition: turn a category-tagged box into a connected composite
//! of shape primitives, instantiated in canonical space and fitted to the
//! box with an anisotropic scale plus translation.

use crate::config::GenConfig;
use crate::floorplan::{BoxCategory, ObjectBox};
use crate::heightfield::{apply_height_field, HeightFieldParams};
use crate::math::{Aabb, Mat3, ScaleTranslate, Vec3};
use crate::mesh::TriMesh;
use crate::primitives::{instantiate_primitive, MeshDetail, PrimitiveKind};
use crate::rng::RandomStream;
use crate::wireframe;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemberRole {
    Solid,
    Wire,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WireParams {
    pub thickness: f64,
    pub cube_subdivision: u32,
}

/// One primitive within a composite, with everything needed to rebuild its
/// mesh deterministically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveInstance {
    pub kind: PrimitiveKind,
    pub role: MemberRole,
    pub size: Vec3,
    pub rotation: Mat3,
    pub center: Vec3,
    pub material_slot: u32,
    pub height_field: Option<HeightFieldParams>,
    pub wire: Option<WireParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub box_index: u32,
    pub category: BoxCategory,
    pub members: Vec<PrimitiveInstance>,
    pub canonical_to_world: ScaleTranslate,
}

#[derive(Debug, Clone)]
pub struct ObjectGeometry {
    pub spec: ObjectSpec,
    /// One world-space mesh per member, same order as `spec.members`.
    pub meshes: Vec<TriMesh>,
}

/// Canonical-space mesh for one member.
pub fn lower_member(inst: &PrimitiveInstance, cfg: &GenConfig) -> TriMesh {
    let mut mesh = match inst.role {
        MemberRole::Solid => {
            let detail = MeshDetail::from_config(&cfg.geometry);
            let mut m = instantiate_primitive(
                inst.kind,
                &detail,
                inst.height_field.is_some(),
                inst.material_slot,
            );
            m.scale_elem(inst.size);
            if let Some(hf) = &inst.height_field {
                m = apply_height_field(&m, hf);
            }
            m
        }
        MemberRole::Wire => {
            let wire = inst.wire.expect("wire member carries wire params");
            let graph = wireframe::wire_graph(inst.kind, wire.cube_subdivision, &cfg.geometry);
            wireframe::tube_edges(&graph, inst.size, wire.thickness, inst.material_slot)
        }
    };
    mesh.apply_rotation_translation(&inst.rotation, inst.center);
    mesh
}

/// World-space meshes for a stored object spec.
pub fn lower_object(spec: &ObjectSpec, cfg: &GenConfig) -> Vec<TriMesh> {
    spec.members
        .iter()
        .map(|inst| {
            let mut m = lower_member(inst, cfg);
            m.apply_scale_translate(&spec.canonical_to_world);
            m
        })
        .collect()
}

fn random_yaw(stream: &mut RandomStream) -> Mat3 {
    Mat3::rotation_z(stream.uniform_in(0.0, TAU))
}

/// Uniform random rotation (Shoemake's quaternion method).
fn random_rotation(stream: &mut RandomStream) -> Mat3 {
    let u1 = stream.next_f64();
    let u2 = stream.next_f64();
    let u3 = stream.next_f64();
    let a = (1.0 - u1).sqrt();
    let b = u1.sqrt();
    Mat3::from_quat(
        a * (TAU * u2).sin(),
        a * (TAU * u2).cos(),
        b * (TAU * u3).sin(),
        b * (TAU * u3).cos(),
    )
}

fn member_rotation(stream: &mut RandomStream, kind: PrimitiveKind) -> Mat3 {
    match kind {
        // Spheres take a full random orientation (shape-invariant, varies
        // the texture); everything else stays upright to keep the
        // Manhattan-leaning structure.
        PrimitiveKind::Sphere => random_rotation(stream),
        _ => random_yaw(stream),
    }
}

fn member_size(stream: &mut RandomStream, cfg: &GenConfig) -> Vec3 {
    Vec3::new(
        stream.uniform(cfg.geometry.member_size_range),
        stream.uniform(cfg.geometry.member_size_range),
        stream.uniform(cfg.geometry.member_size_range),
    )
}

fn sample_height_field(stream: &mut RandomStream, cfg: &GenConfig) -> HeightFieldParams {
    HeightFieldParams {
        amplitude: stream.uniform(cfg.geometry.height_field.amplitude_frac),
        frequency: stream.uniform(cfg.geometry.height_field.frequency),
        octaves: cfg.geometry.height_field.octaves,
        noise_seed: stream.next_u64(),
    }
}

/// Sample the center of the next member inside the inflated AABB of what is
/// already placed, keeping the composite visually connected.
fn next_center(stream: &mut RandomStream, placed: &Aabb, inflate: f64) -> Vec3 {
    let grow = placed.extent() * (inflate * 0.5);
    let b = placed.inflated(grow);
    Vec3::new(
        stream.uniform_in(b.min.x, b.max.x),
        stream.uniform_in(b.min.y, b.max.y),
        stream.uniform_in(b.min.z, b.max.z),
    )
}

/// Rotation mapping the canonical z axis onto the box's longest axis, so
/// cylinders stretch along sticks instead of across them.
fn long_axis_rotation(size: Vec3) -> Mat3 {
    if size.x >= size.y && size.x >= size.z {
        Mat3::rotation_y(std::f64::consts::FRAC_PI_2)
    } else if size.y >= size.z {
        Mat3::rotation_x(-std::f64::consts::FRAC_PI_2)
    } else {
        Mat3::IDENTITY
    }
}

/// Compose the geometry for one object box. Member material slots are
/// assigned sequentially from `slot_base`.
pub fn compose_object(
    stream: &mut RandomStream,
    obox: &ObjectBox,
    box_index: u32,
    cfg: &GenConfig,
    slot_base: u32,
) -> ObjectGeometry {
    let g = &cfg.geometry;
    let mut members: Vec<PrimitiveInstance> = Vec::new();
    let mut meshes: Vec<TriMesh> = Vec::new();
    let mut placed = Aabb::EMPTY;

    let add_member = |inst: PrimitiveInstance,
                          members: &mut Vec<PrimitiveInstance>,
                          meshes: &mut Vec<TriMesh>,
                          placed: &mut Aabb| {
        let mesh = lower_member(&inst, cfg);
        *placed = placed.union(&mesh.aabb());
        members.push(inst);
        meshes.push(mesh);
    };

    match obox.category {
        BoxCategory::ThinStickOnWall | BoxCategory::ThinStickInSpace => {
            let kind = *stream.categorical(&g.stick_kinds);
            let rotation = if kind == PrimitiveKind::Cylinder {
                long_axis_rotation(obox.size())
            } else {
                Mat3::IDENTITY
            };
            add_member(
                PrimitiveInstance {
                    kind,
                    role: MemberRole::Solid,
                    size: Vec3::ONE,
                    rotation,
                    center: Vec3::ZERO,
                    material_slot: slot_base + members.len() as u32,
                    height_field: None,
                    wire: None,
                },
                &mut members,
                &mut meshes,
                &mut placed,
            );
        }
        BoxCategory::AxisAligned => {
            add_member(
                PrimitiveInstance {
                    kind: PrimitiveKind::Cube,
                    role: MemberRole::Solid,
                    size: Vec3::ONE,
                    rotation: Mat3::IDENTITY,
                    center: Vec3::ZERO,
                    material_slot: slot_base + members.len() as u32,
                    height_field: None,
                    wire: None,
                },
                &mut members,
                &mut meshes,
                &mut placed,
            );
        }
        BoxCategory::Wireframe => {
            let count = *stream.categorical(&g.wireframe_primitive_count);
            for i in 0..count {
                let kind = *stream.categorical(&g.wireframe_kinds);
                let size = member_size(stream, cfg);
                let center = if i == 0 {
                    Vec3::ZERO
                } else {
                    next_center(stream, &placed, g.member_center_inflate)
                };
                let rotation = member_rotation(stream, kind);
                let mean_scale = size.mean();
                let thickness = mean_scale * stream.uniform(g.wire_thickness_frac);
                let cube_subdivision = *stream.categorical(&g.cube_wire_subdivision);
                add_member(
                    PrimitiveInstance {
                        kind,
                        role: MemberRole::Wire,
                        size,
                        rotation,
                        center,
                        material_slot: slot_base + members.len() as u32,
                        height_field: None,
                        wire: Some(WireParams {
                            thickness,
                            cube_subdivision,
                        }),
                    },
                    &mut members,
                    &mut meshes,
                    &mut placed,
                );
            }
            if stream.bernoulli(g.intersecting_solid_prob) {
                let kind = *stream.categorical(&g.solid_kinds);
                let size = member_size(stream, cfg);
                let center = next_center(stream, &placed, g.member_center_inflate);
                let rotation = member_rotation(stream, kind);
                let hf = sample_height_field(stream, cfg);
                add_member(
                    PrimitiveInstance {
                        kind,
                        role: MemberRole::Solid,
                        size,
                        rotation,
                        center,
                        material_slot: slot_base + members.len() as u32,
                        height_field: Some(hf),
                        wire: None,
                    },
                    &mut members,
                    &mut meshes,
                    &mut placed,
                );
            }
        }
        category => {
            let counts = if category == BoxCategory::LargeObject {
                &g.large_primitive_count
            } else {
                &g.small_primitive_count
            };
            let count = *stream.categorical(counts);
            for i in 0..count {
                let kind = *stream.categorical(&g.solid_kinds);
                let size = member_size(stream, cfg);
                let center = if i == 0 {
                    Vec3::ZERO
                } else {
                    next_center(stream, &placed, g.member_center_inflate)
                };
                let rotation = member_rotation(stream, kind);
                let hf = sample_height_field(stream, cfg);
                add_member(
                    PrimitiveInstance {
                        kind,
                        role: MemberRole::Solid,
                        size,
                        rotation,
                        center,
                        material_slot: slot_base + members.len() as u32,
                        height_field: Some(hf),
                        wire: None,
                    },
                    &mut members,
                    &mut meshes,
                    &mut placed,
                );
            }
        }
    }

    let fit = ScaleTranslate::fitting(&placed, &obox.aabb());
    for m in &mut meshes {
        m.apply_scale_translate(&fit);
    }
    ObjectGeometry {
        spec: ObjectSpec {
            box_index,
            category: obox.category,
            members,
            canonical_to_world: fit,
        },
        meshes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_stream, Seed};

    fn test_box(category: BoxCategory, size: Vec3) -> ObjectBox {
        ObjectBox {
            category,
            min_corner: Vec3::new(1.0, 2.0, 0.0),
            max_corner: Vec3::new(1.0, 2.0, 0.0) + size,
            parent: None,
            wall: None,
        }
    }

    #[test]
    fn composite_fits_box_exactly() {
        let cfg = GenConfig::draft();
        let mut stream = derive_stream(Seed::new(21, 0), "compose");
        for (i, cat) in [
            BoxCategory::LargeObject,
            BoxCategory::SmallOnGround,
            BoxCategory::Wireframe,
            BoxCategory::OnRoofThick,
            BoxCategory::ThinStickInSpace,
            BoxCategory::AxisAligned,
        ]
        .iter()
        .enumerate()
        {
            for trial in 0..20 {
                let size = match cat {
                    BoxCategory::ThinStickInSpace => Vec3::new(9.0, 1.1, 1.4),
                    BoxCategory::AxisAligned => Vec3::new(3.0, 4.0, 0.5),
                    _ => Vec3::new(4.0, 5.0, 6.0),
                };
                let obox = test_box(*cat, size);
                let obj = compose_object(&mut stream, &obox, (i * 100 + trial) as u32, &cfg, 0);
                let mut union = Aabb::EMPTY;
                for m in &obj.meshes {
                    union = union.union(&m.aabb());
                }
                let lo = (union.min - obox.min_corner).abs().max_component();
                let hi = (union.max - obox.max_corner).abs().max_component();
                assert!(lo < 1e-6 && hi < 1e-6, "{cat:?} fit error {lo} {hi}");
            }
        }
    }

    #[test]
    fn member_counts_follow_category_distributions() {
        let cfg = GenConfig::draft();
        let mut stream = derive_stream(Seed::new(22, 0), "compose");
        let n = 600;
        let mut hist = std::collections::HashMap::new();
        for i in 0..n {
            let obox = test_box(BoxCategory::SmallOnGround, Vec3::new(3.0, 3.0, 3.0));
            let obj = compose_object(&mut stream, &obox, i, &cfg, 0);
            *hist.entry(obj.spec.members.len()).or_insert(0usize) += 1;
        }
        for count in hist.keys() {
            assert!((2..=5).contains(count), "count {count} out of table range");
        }
        let f3 = hist.get(&3).copied().unwrap_or(0) as f64 / n as f64;
        assert!((f3 - 0.375).abs() < 0.06, "count-3 frequency {f3}");
    }

    #[test]
    fn large_counts_span_table_items() {
        let cfg = GenConfig::draft();
        let mut stream = derive_stream(Seed::new(23, 0), "compose");
        let mut seen = std::collections::HashSet::new();
        for i in 0..200 {
            let obox = test_box(BoxCategory::LargeObject, Vec3::new(6.0, 6.0, 6.0));
            let obj = compose_object(&mut stream, &obox, i, &cfg, 0);
            assert!((4..=8).contains(&obj.spec.members.len()));
            seen.insert(obj.spec.members.len());
        }
        assert!(seen.len() >= 4, "counts seen: {seen:?}");
    }

    #[test]
    fn axis_aligned_is_exactly_one_cube_slab() {
        let cfg = GenConfig::draft();
        let mut stream = derive_stream(Seed::new(24, 0), "compose");
        let obox = test_box(BoxCategory::AxisAligned, Vec3::new(3.0, 4.0, 0.4));
        let obj = compose_object(&mut stream, &obox, 0, &cfg, 7);
        assert_eq!(obj.spec.members.len(), 1);
        assert_eq!(obj.spec.members[0].kind, PrimitiveKind::Cube);
        assert_eq!(obj.spec.members[0].material_slot, 7);
        assert!(obj.spec.members[0].height_field.is_none());
    }

    #[test]
    fn stick_members_have_no_height_field() {
        let cfg = GenConfig::draft();
        let mut stream = derive_stream(Seed::new(25, 0), "compose");
        for i in 0..50 {
            let obox = test_box(BoxCategory::ThinStickOnWall, Vec3::new(7.0, 0.3, 0.3));
            let obj = compose_object(&mut stream, &obox, i, &cfg, 0);
            assert_eq!(obj.spec.members.len(), 1);
            assert!(obj.spec.members[0].height_field.is_none());
            assert!(matches!(
                obj.spec.members[0].kind,
                PrimitiveKind::Cube | PrimitiveKind::Cylinder
            ));
        }
    }

    #[test]
    fn lowering_reproduces_composed_meshes() {
        let cfg = GenConfig::draft();
        let mut stream = derive_stream(Seed::new(26, 0), "compose");
        let obox = test_box(BoxCategory::LargeObject, Vec3::new(5.0, 4.0, 6.0));
        let obj = compose_object(&mut stream, &obox, 0, &cfg, 3);
        let relowered = lower_object(&obj.spec, &cfg);
        assert_eq!(obj.meshes.len(), relowered.len());
        for (a, b) in obj.meshes.iter().zip(&relowered) {
            assert_eq!(a.vertices, b.vertices);
            assert_eq!(a.triangles, b.triangles);
            assert_eq!(a.material_slots, b.material_slots);
        }
    }

    #[test]
    fn wireframe_objects_sometimes_carry_intersecting_solid() {
        let cfg = GenConfig::draft();
        let mut stream = derive_stream(Seed::new(27, 0), "compose");
        let mut with_solid = 0;
        let n = 400;
        for i in 0..n {
            let obox = test_box(BoxCategory::Wireframe, Vec3::new(4.0, 4.0, 4.0));
            let obj = compose_object(&mut stream, &obox, i, &cfg, 0);
            let wires = obj
                .spec
                .members
                .iter()
                .filter(|m| m.role == MemberRole::Wire)
                .count();
            assert!((1..=3).contains(&wires));
            for m in &obj.spec.members {
                if m.role == MemberRole::Wire {
                    assert!(matches!(
                        m.kind,
                        PrimitiveKind::Torus | PrimitiveKind::Cube | PrimitiveKind::Sphere
                    ));
                }
            }
            if obj.spec.members.iter().any(|m| m.role == MemberRole::Solid) {
                with_solid += 1;
            }
        }
        let f = with_solid as f64 / n as f64;
        assert!((f - 0.5).abs() < 0.07, "intersecting-solid rate {f}");
    }
}
