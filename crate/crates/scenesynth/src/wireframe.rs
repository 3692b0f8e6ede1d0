//! Wireframe objects: the edge graph of a primitive thickened into square
//! tubes. Exercises thin-structure reconstruction.

use crate::config::GeometryCfg;
use crate::math::{Vec2, Vec3};
use crate::mesh::TriMesh;
use crate::primitives::PrimitiveKind;
use crate::rng::RandomStream;
use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

/// A primitive's wire skeleton before tubing.
#[derive(Debug, Clone)]
pub struct WireGraph {
    pub vertices: Vec<Vec3>,
    pub edges: Vec<[u32; 2]>,
}

impl WireGraph {
    fn new() -> WireGraph {
        WireGraph {
            vertices: Vec::new(),
            edges: Vec::new(),
        }
    }

    fn edge(&mut self, a: u32, b: u32) {
        self.edges.push([a, b]);
    }
}

/// Grid lines on the cube surface; subdivision 1 is the 12 bare edges.
pub fn cube_wire_graph(subdivision: u32) -> WireGraph {
    let n = subdivision.max(1) as i64;
    let mut g = WireGraph::new();
    let mut index: HashMap<(i64, i64, i64), u32> = HashMap::new();
    let mut dedup: HashMap<(u32, u32), ()> = HashMap::new();
    let step = 1.0 / n as f64;
    let mut vertex = |g: &mut WireGraph, k: (i64, i64, i64)| -> u32 {
        *index.entry(k).or_insert_with(|| {
            let i = g.vertices.len() as u32;
            g.vertices.push(Vec3::new(
                -0.5 + k.0 as f64 * step,
                -0.5 + k.1 as f64 * step,
                -0.5 + k.2 as f64 * step,
            ));
            i
        })
    };
    // Walk lattice segments on the surface; shared face borders dedup away.
    let on_surface = |k: (i64, i64, i64)| k.0 == 0 || k.0 == n || k.1 == 0 || k.1 == n || k.2 == 0 || k.2 == n;
    // A segment lies on the surface grid when the two fixed coordinates put
    // it on a face and the segment follows a grid line of that face.
    for axis in 0..3usize {
        for u in 0..=n {
            for v in 0..=n {
                for w in 0..n {
                    let (a, b) = match axis {
                        0 => ((w, u, v), (w + 1, u, v)),
                        1 => ((u, w, v), (u, w + 1, v)),
                        _ => ((u, v, w), (u, v, w + 1)),
                    };
                    // Both endpoints on the boundary, and the whole segment
                    // on a common face (a fixed boundary coordinate shared by
                    // both endpoints, other than the moving axis).
                    if !on_surface(a) || !on_surface(b) {
                        continue;
                    }
                    let fixed_on_face = match axis {
                        0 => a.1 == 0 || a.1 == n || a.2 == 0 || a.2 == n,
                        1 => a.0 == 0 || a.0 == n || a.2 == 0 || a.2 == n,
                        _ => a.0 == 0 || a.0 == n || a.1 == 0 || a.1 == n,
                    };
                    if !fixed_on_face {
                        continue;
                    }
                    let ia = vertex(&mut g, a);
                    let ib = vertex(&mut g, b);
                    let key = (ia.min(ib), ia.max(ib));
                    if dedup.insert(key, ()).is_none() {
                        g.edge(ia, ib);
                    }
                }
            }
        }
    }
    g
}

/// Meridians and parallels of a radius-0.5 sphere.
pub fn sphere_wire_graph(segments: u32, rings: u32) -> WireGraph {
    let s = segments.max(3) as usize;
    let r = rings.max(1) as usize;
    let mut g = WireGraph::new();
    let north = 0u32;
    g.vertices.push(Vec3::new(0.0, 0.0, 0.5));
    for i in 1..=r {
        let phi = PI * i as f64 / (r + 1) as f64;
        let (sp, cp) = phi.sin_cos();
        for j in 0..s {
            let az = TAU * j as f64 / s as f64;
            g.vertices
                .push(Vec3::new(0.5 * sp * az.cos(), 0.5 * sp * az.sin(), 0.5 * cp));
        }
    }
    let south = g.vertices.len() as u32;
    g.vertices.push(Vec3::new(0.0, 0.0, -0.5));
    let at = |i: usize, j: usize| -> u32 { (1 + (i - 1) * s + (j % s)) as u32 };

    for j in 0..s {
        // Meridian segments pole to pole.
        g.edge(north, at(1, j));
        for i in 1..r {
            g.edge(at(i, j), at(i + 1, j));
        }
        g.edge(at(r, j), south);
    }
    for i in 1..=r {
        // Parallel rings.
        for j in 0..s {
            g.edge(at(i, j), at(i, j + 1));
        }
    }
    g
}

/// Grid edges of a torus surface. `minor_radius` is relative to the unit
/// footprint (outer extent 0.5).
pub fn torus_wire_graph(major_segments: u32, minor_segments: u32, minor_radius: f64) -> WireGraph {
    let maj = major_segments.max(3) as usize;
    let min = minor_segments.max(3) as usize;
    let r = minor_radius.min(0.45);
    let big_r = (0.5 - r).max(0.05);
    let mut g = WireGraph::new();
    for i in 0..maj {
        let u = TAU * i as f64 / maj as f64;
        for j in 0..min {
            let v = TAU * j as f64 / min as f64;
            let radial = big_r + r * v.cos();
            g.vertices
                .push(Vec3::new(radial * u.cos(), radial * u.sin(), r * v.sin()));
        }
    }
    let at = |i: usize, j: usize| -> u32 { ((i % maj) * min + (j % min)) as u32 };
    for i in 0..maj {
        for j in 0..min {
            g.edge(at(i, j), at(i + 1, j));
            g.edge(at(i, j), at(i, j + 1));
        }
    }
    g
}

/// The wire graph for one wireframe primitive in unit scale.
pub fn wire_graph(kind: PrimitiveKind, cube_subdivision: u32, cfg: &GeometryCfg) -> WireGraph {
    match kind {
        PrimitiveKind::Cube => cube_wire_graph(cube_subdivision),
        PrimitiveKind::Sphere => sphere_wire_graph(cfg.sphere_wire_segments, cfg.sphere_wire_rings),
        PrimitiveKind::Torus => torus_wire_graph(
            cfg.torus_wire_major_segments,
            cfg.torus_wire_minor_segments,
            cfg.torus_wire_minor_radius_frac,
        ),
        // Cylinder/cone never appear in the wireframe role.
        _ => cube_wire_graph(1),
    }
}

/// One square tube per edge, extended half a thickness past each endpoint so
/// joints close up.
pub fn tube_edges(graph: &WireGraph, scale: Vec3, thickness: f64, slot: u32) -> TriMesh {
    let mut mesh = TriMesh::new();
    for e in &graph.edges {
        let a = graph.vertices[e[0] as usize].mul_elem(scale);
        let b = graph.vertices[e[1] as usize].mul_elem(scale);
        let axis = b - a;
        let len = axis.length();
        if len < 1e-12 {
            continue;
        }
        let d = axis / len;
        let u = d.any_orthonormal() * (thickness * 0.5);
        let v = d.cross(u.normalized()) * (thickness * 0.5);
        let a = a - d * (thickness * 0.5);
        let b = b + d * (thickness * 0.5);
        let base = mesh.vertices.len() as u32;
        for p in [
            a - u - v,
            a + u - v,
            a + u + v,
            a - u + v,
            b - u - v,
            b + u - v,
            b + u + v,
            b - u + v,
        ] {
            mesh.vertices.push(p);
            mesh.uvs.push(Vec2::new(0.0, 0.0));
        }
        let quads: [[u32; 4]; 6] = [
            [0, 3, 2, 1], // end a
            [4, 5, 6, 7], // end b
            [0, 1, 5, 4],
            [1, 2, 6, 5],
            [2, 3, 7, 6],
            [3, 0, 4, 7],
        ];
        for q in quads {
            mesh.triangles
                .push([base + q[0], base + q[1], base + q[2]]);
            mesh.triangles
                .push([base + q[0], base + q[2], base + q[3]]);
        }
    }
    mesh.material_slots = vec![slot; mesh.triangles.len()];
    mesh.recompute_normals();
    mesh
}

/// Build a thickened wireframe filling `bbox_size`. Tube thickness is drawn
/// from the configured fraction of the mean scale.
pub fn build_wireframe(
    stream: &mut RandomStream,
    kind: PrimitiveKind,
    bbox_size: Vec3,
    cfg: &GeometryCfg,
    slot: u32,
) -> TriMesh {
    let cube_subdivision = *stream.categorical(&cfg.cube_wire_subdivision);
    let graph = wire_graph(kind, cube_subdivision, cfg);
    let mean_scale = bbox_size.mean();
    let thickness = mean_scale * stream.uniform(cfg.wire_thickness_frac);
    tube_edges(&graph, bbox_size, thickness, slot)
}
