//! Canonical shape primitives: unit-scale meshes centered at the origin.
//!
//! Solids are closed manifolds with UVs everywhere. The grid cube welds its
//! face seams so height-field displacement cannot tear it open.

use crate::math::{Aabb, Vec2, Vec3};
use crate::mesh::TriMesh;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimitiveKind {
    Cube,
    Sphere,
    Cylinder,
    Cone,
    Torus,
}

fn cylindrical_uv(p: Vec3) -> Vec2 {
    Vec2::new(p.y.atan2(p.x) / TAU + 0.5, p.z + 0.5)
}

/// The plain 8-vertex, 12-triangle cube over [-0.5, 0.5]^3.
pub fn unit_cube(slot: u32) -> TriMesh {
    let mut m = TriMesh::new();
    for &z in &[-0.5, 0.5] {
        m.vertices.push(Vec3::new(-0.5, -0.5, z));
        m.vertices.push(Vec3::new(0.5, -0.5, z));
        m.vertices.push(Vec3::new(0.5, 0.5, z));
        m.vertices.push(Vec3::new(-0.5, 0.5, z));
    }
    m.triangles = vec![
        [0, 2, 1],
        [0, 3, 2], // bottom
        [4, 5, 6],
        [4, 6, 7], // top
        [0, 1, 5],
        [0, 5, 4], // -y
        [2, 3, 7],
        [2, 7, 6], // +y
        [0, 4, 7],
        [0, 7, 3], // -x
        [1, 2, 6],
        [1, 6, 5], // +x
    ];
    m.uvs = m.vertices.iter().map(|&v| cylindrical_uv(v)).collect();
    m.material_slots = vec![slot; m.triangles.len()];
    m.recompute_normals();
    m
}

/// Cube with each face split into an n x n grid, seams welded.
pub fn unit_cube_grid(n: u32, slot: u32) -> TriMesh {
    let n = n.max(1);
    let mut m = TriMesh::new();
    let mut index: HashMap<(u32, u32, u32), u32> = HashMap::new();
    let step = 1.0 / n as f64;
    let mut vertex = |m: &mut TriMesh, key: (u32, u32, u32)| -> u32 {
        if let Some(&i) = index.get(&key) {
            return i;
        }
        let p = Vec3::new(
            -0.5 + key.0 as f64 * step,
            -0.5 + key.1 as f64 * step,
            -0.5 + key.2 as f64 * step,
        );
        let i = m.vertices.len() as u32;
        m.vertices.push(p);
        m.uvs.push(cylindrical_uv(p));
        index.insert(key, i);
        i
    };

    // Each face: base lattice corner plus two step directions whose cross
    // product points outward.
    type L = (u32, u32, u32);
    let faces: [(L, L, L); 6] = [
        ((0, 0, n), (1, 0, 0), (0, 1, 0)), // +z
        ((0, 0, 0), (0, 1, 0), (1, 0, 0)), // -z
        ((n, 0, 0), (0, 1, 0), (0, 0, 1)), // +x
        ((0, 0, 0), (0, 0, 1), (0, 1, 0)), // -x
        ((0, n, 0), (0, 0, 1), (1, 0, 0)), // +y
        ((0, 0, 0), (1, 0, 0), (0, 0, 1)), // -y
    ];
    for (base, du, dv) in faces {
        let at = |a: u32, b: u32| -> (u32, u32, u32) {
            (
                base.0 + du.0 * a + dv.0 * b,
                base.1 + du.1 * a + dv.1 * b,
                base.2 + du.2 * a + dv.2 * b,
            )
        };
        for a in 0..n {
            for b in 0..n {
                let p00 = vertex(&mut m, at(a, b));
                let p10 = vertex(&mut m, at(a + 1, b));
                let p11 = vertex(&mut m, at(a + 1, b + 1));
                let p01 = vertex(&mut m, at(a, b + 1));
                m.triangles.push([p00, p10, p11]);
                m.triangles.push([p00, p11, p01]);
            }
        }
    }
    m.material_slots = vec![slot; m.triangles.len()];
    m.recompute_normals();
    m
}

/// UV sphere of radius 0.5, poles on the z axis.
pub fn unit_sphere(segments: u32, rings: u32, slot: u32) -> TriMesh {
    let s = segments.max(3) as usize;
    let r = rings.max(2) as usize;
    let mut m = TriMesh::new();
    m.vertices.push(Vec3::new(0.0, 0.0, 0.5)); // north
    m.uvs.push(Vec2::new(0.5, 1.0));
    for i in 1..r {
        let phi = std::f64::consts::PI * i as f64 / r as f64;
        let (sp, cp) = phi.sin_cos();
        for j in 0..s {
            let az = TAU * j as f64 / s as f64;
            m.vertices
                .push(Vec3::new(0.5 * sp * az.cos(), 0.5 * sp * az.sin(), 0.5 * cp));
            m.uvs
                .push(Vec2::new(j as f64 / s as f64, 1.0 - i as f64 / r as f64));
        }
    }
    m.vertices.push(Vec3::new(0.0, 0.0, -0.5)); // south
    m.uvs.push(Vec2::new(0.5, 0.0));
    let south = (m.vertices.len() - 1) as u32;
    let ring = |i: usize, j: usize| -> u32 { (1 + (i - 1) * s + (j % s)) as u32 };

    for j in 0..s {
        m.triangles.push([0, ring(1, j), ring(1, j + 1)]);
    }
    for i in 1..r - 1 {
        for j in 0..s {
            let (a, b, c, d) = (ring(i, j), ring(i + 1, j), ring(i + 1, j + 1), ring(i, j + 1));
            m.triangles.push([a, b, c]);
            m.triangles.push([a, c, d]);
        }
    }
    for j in 0..s {
        m.triangles.push([south, ring(r - 1, j + 1), ring(r - 1, j)]);
    }
    m.material_slots = vec![slot; m.triangles.len()];
    m.normals = m.vertices.iter().map(|v| v.normalized()).collect();
    m
}

/// Cylinder of radius 0.5 and height 1 along z, with welded caps.
pub fn unit_cylinder(segments: u32, slot: u32) -> TriMesh {
    let s = segments.max(3) as usize;
    let stacks = 4usize;
    let mut m = TriMesh::new();
    for i in 0..=stacks {
        let z = -0.5 + i as f64 / stacks as f64;
        for j in 0..s {
            let az = TAU * j as f64 / s as f64;
            let p = Vec3::new(0.5 * az.cos(), 0.5 * az.sin(), z);
            m.vertices.push(p);
            m.uvs.push(Vec2::new(j as f64 / s as f64, z + 0.5));
        }
    }
    let cb = m.vertices.len() as u32;
    m.vertices.push(Vec3::new(0.0, 0.0, -0.5));
    m.uvs.push(Vec2::new(0.5, 0.0));
    let ct = m.vertices.len() as u32;
    m.vertices.push(Vec3::new(0.0, 0.0, 0.5));
    m.uvs.push(Vec2::new(0.5, 1.0));

    let ring = |i: usize, j: usize| -> u32 { (i * s + (j % s)) as u32 };
    for i in 0..stacks {
        for j in 0..s {
            let (a, b, c, d) = (ring(i, j), ring(i, j + 1), ring(i + 1, j + 1), ring(i + 1, j));
            m.triangles.push([a, b, c]);
            m.triangles.push([a, c, d]);
        }
    }
    for j in 0..s {
        m.triangles.push([cb, ring(0, j + 1), ring(0, j)]);
        m.triangles.push([ct, ring(stacks, j), ring(stacks, j + 1)]);
    }
    m.material_slots = vec![slot; m.triangles.len()];
    m.recompute_normals();
    m
}

/// Cone with its base disk at z = -0.5 and apex at the +z pole.
pub fn unit_cone(segments: u32, slot: u32) -> TriMesh {
    let s = segments.max(3) as usize;
    let stacks = 4usize;
    let mut m = TriMesh::new();
    for i in 0..stacks {
        let t = i as f64 / stacks as f64;
        let radius = 0.5 * (1.0 - t);
        let z = -0.5 + t;
        for j in 0..s {
            let az = TAU * j as f64 / s as f64;
            m.vertices
                .push(Vec3::new(radius * az.cos(), radius * az.sin(), z));
            m.uvs.push(Vec2::new(j as f64 / s as f64, t));
        }
    }
    let apex = m.vertices.len() as u32;
    m.vertices.push(Vec3::new(0.0, 0.0, 0.5));
    m.uvs.push(Vec2::new(0.5, 1.0));
    let base_center = m.vertices.len() as u32;
    m.vertices.push(Vec3::new(0.0, 0.0, -0.5));
    m.uvs.push(Vec2::new(0.5, 0.0));

    let ring = |i: usize, j: usize| -> u32 { (i * s + (j % s)) as u32 };
    for i in 0..stacks - 1 {
        for j in 0..s {
            let (a, b, c, d) = (ring(i, j), ring(i, j + 1), ring(i + 1, j + 1), ring(i + 1, j));
            m.triangles.push([a, b, c]);
            m.triangles.push([a, c, d]);
        }
    }
    for j in 0..s {
        m.triangles.push([ring(stacks - 1, j), ring(stacks - 1, j + 1), apex]);
        m.triangles.push([base_center, ring(0, j + 1), ring(0, j)]);
    }
    m.material_slots = vec![slot; m.triangles.len()];
    m.recompute_normals();
    m
}

/// Solid torus in the xy-plane; `minor_radius` is the tube radius and the
/// outer extent is held at 0.5.
pub fn unit_torus(major_segments: u32, minor_segments: u32, minor_radius: f64, slot: u32) -> TriMesh {
    let maj = major_segments.max(3) as usize;
    let min = minor_segments.max(3) as usize;
    let r = minor_radius.min(0.45);
    let big_r = 0.5 - r;
    let mut m = TriMesh::new();
    for i in 0..maj {
        let u = TAU * i as f64 / maj as f64;
        for j in 0..min {
            let v = TAU * j as f64 / min as f64;
            let radial = big_r + r * v.cos();
            m.vertices
                .push(Vec3::new(radial * u.cos(), radial * u.sin(), r * v.sin()));
            m.uvs
                .push(Vec2::new(i as f64 / maj as f64, j as f64 / min as f64));
        }
    }
    let at = |i: usize, j: usize| -> u32 { ((i % maj) * min + (j % min)) as u32 };
    for i in 0..maj {
        for j in 0..min {
            let (a, b, c, d) = (at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1));
            m.triangles.push([a, b, c]);
            m.triangles.push([a, c, d]);
        }
    }
    m.material_slots = vec![slot; m.triangles.len()];
    m.recompute_normals();
    m
}

/// Axis-aligned box mesh spanning `aabb`.
pub fn box_mesh(aabb: &Aabb, slot: u32) -> TriMesh {
    let mut m = unit_cube(slot);
    let e = aabb.extent();
    let c = aabb.center();
    for v in &mut m.vertices {
        *v = Vec3::new(v.x * e.x + c.x, v.y * e.y + c.y, v.z * e.z + c.z);
    }
    m.recompute_normals();
    m
}

/// Resolution knobs for [`instantiate_primitive`].
#[derive(Debug, Clone, Copy)]
pub struct MeshDetail {
    pub sphere_segments: u32,
    pub sphere_rings: u32,
    pub cylinder_segments: u32,
    pub cone_segments: u32,
    pub cube_grid: u32,
}

impl MeshDetail {
    pub fn from_config(g: &crate::config::GeometryCfg) -> MeshDetail {
        MeshDetail {
            sphere_segments: g.sphere_segments,
            sphere_rings: g.sphere_rings,
            cylinder_segments: g.cylinder_segments,
            cone_segments: g.cone_segments,
            cube_grid: g.cube_grid,
        }
    }
}

/// Canonical unit-scale mesh for `kind`. `subdivided` selects the grid cube
/// so later displacement has vertices to push around.
pub fn instantiate_primitive(kind: PrimitiveKind, detail: &MeshDetail, subdivided: bool, slot: u32) -> TriMesh {
    match kind {
        PrimitiveKind::Cube => {
            if subdivided {
                unit_cube_grid(detail.cube_grid, slot)
            } else {
                unit_cube(slot)
            }
        }
        PrimitiveKind::Sphere => unit_sphere(detail.sphere_segments, detail.sphere_rings, slot),
        PrimitiveKind::Cylinder => unit_cylinder(detail.cylinder_segments, slot),
        PrimitiveKind::Cone => unit_cone(detail.cone_segments, slot),
        PrimitiveKind::Torus => unit_torus(detail.cylinder_segments, detail.sphere_rings, 0.15, slot),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DETAIL: MeshDetail = MeshDetail {
        sphere_segments: 32,
        sphere_rings: 16,
        cylinder_segments: 32,
        cone_segments: 32,
        cube_grid: 8,
    };

    #[test]
    fn cube_euler_characteristic() {
        let m = unit_cube(0);
        assert_eq!(m.vertices.len(), 8);
        assert_eq!(m.triangles.len(), 12);
        // V - E + F = 8 - 18 + 12 = 2 for a closed genus-0 polyhedron.
        let mut edges = std::collections::HashSet::new();
        for t in &m.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        assert_eq!(
            m.vertices.len() as i64 - edges.len() as i64 + m.triangles.len() as i64,
            2
        );
        assert!(m.is_closed_manifold());
        assert!(m.signed_volume() > 0.0);
    }

    #[test]
    fn sphere_volume_close_to_analytic() {
        let m = unit_sphere(64, 64, 0);
        let analytic = 4.0 / 3.0 * std::f64::consts::PI * 0.5f64.powi(3);
        let v = m.signed_volume();
        assert!(
            (v - analytic).abs() / analytic < 0.01,
            "volume {v} vs {analytic}"
        );
    }

    #[test]
    fn cone_is_manifold_with_apex_at_top() {
        let m = unit_cone(32, 0);
        assert!(m.is_closed_manifold());
        let apex = m
            .vertices
            .iter()
            .cloned()
            .max_by(|a, b| a.z.partial_cmp(&b.z).unwrap())
            .unwrap();
        assert!((apex - Vec3::new(0.0, 0.0, 0.5)).length() < 1e-12);
        let base_min = m.vertices.iter().map(|v| v.z).fold(f64::INFINITY, f64::min);
        assert!((base_min + 0.5).abs() < 1e-12);
    }

    #[test]
    fn all_solids_are_closed_manifolds() {
        for kind in [
            PrimitiveKind::Cube,
            PrimitiveKind::Sphere,
            PrimitiveKind::Cylinder,
            PrimitiveKind::Cone,
            PrimitiveKind::Torus,
        ] {
            for subdivided in [false, true] {
                let m = instantiate_primitive(kind, &DETAIL, subdivided, 0);
                assert!(m.is_closed_manifold(), "{kind:?} subdivided={subdivided}");
                m.check_structure(1e-12).unwrap();
                assert!(m.signed_volume() > 0.0, "{kind:?} winding");
                let aabb = m.aabb();
                assert!(aabb.extent().max_component() <= 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn grid_cube_welds_seams() {
        let m = unit_cube_grid(8, 0);
        // Surface points of a 9^3 lattice: total minus interior.
        assert_eq!(m.vertices.len(), 9 * 9 * 9 - 7 * 7 * 7);
        assert!(m.is_closed_manifold());
    }
}
