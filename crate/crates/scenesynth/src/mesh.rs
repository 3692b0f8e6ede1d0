//! Indexed triangle meshes: the carrier every primitive, wireframe and wall
//! lowers into.

use crate::error::{Error, Result};
use crate::math::{Aabb, Mat3, ScaleTranslate, Vec2, Vec3};
use std::collections::HashMap;
use std::io::{Read, Write};

#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
    pub uvs: Vec<Vec2>,
    pub normals: Vec<Vec3>,
    /// One material slot per triangle.
    pub material_slots: Vec<u32>,
}

impl TriMesh {
    pub fn new() -> TriMesh {
        TriMesh {
            vertices: Vec::new(),
            triangles: Vec::new(),
            uvs: Vec::new(),
            normals: Vec::new(),
            material_slots: Vec::new(),
        }
    }

    pub fn aabb(&self) -> Aabb {
        Aabb::from_points(self.vertices.iter().copied())
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// Area-weighted per-vertex normals recomputed from the geometry.
    pub fn recompute_normals(&mut self) {
        let mut acc = vec![Vec3::ZERO; self.vertices.len()];
        for t in &self.triangles {
            let a = self.vertices[t[0] as usize];
            let b = self.vertices[t[1] as usize];
            let c = self.vertices[t[2] as usize];
            let n = (b - a).cross(c - a); // length = 2x area
            for &i in t {
                acc[i as usize] += n;
            }
        }
        self.normals = acc.into_iter().map(|n| n.normalized()).collect();
    }

    pub fn apply_scale_translate(&mut self, st: &ScaleTranslate) {
        for v in &mut self.vertices {
            *v = st.apply(*v);
        }
        // Mirroring scales would flip winding; fits always use positive
        // scales so winding is preserved.
        self.recompute_normals();
    }

    pub fn apply_rotation_translation(&mut self, rot: &Mat3, translation: Vec3) {
        for v in &mut self.vertices {
            *v = rot.mul_vec(*v) + translation;
        }
        for n in &mut self.normals {
            *n = rot.mul_vec(*n);
        }
    }

    pub fn scale_elem(&mut self, scale: Vec3) {
        for v in &mut self.vertices {
            *v = v.mul_elem(scale);
        }
        self.recompute_normals();
    }

    pub fn append(&mut self, other: &TriMesh) {
        let base = self.vertices.len() as u32;
        self.vertices.extend_from_slice(&other.vertices);
        self.uvs.extend_from_slice(&other.uvs);
        self.normals.extend_from_slice(&other.normals);
        self.triangles
            .extend(other.triangles.iter().map(|t| [t[0] + base, t[1] + base, t[2] + base]));
        self.material_slots.extend_from_slice(&other.material_slots);
    }

    pub fn set_material_slot(&mut self, slot: u32) {
        for s in &mut self.material_slots {
            *s = slot;
        }
    }

    pub fn triangle_area(&self, i: usize) -> f64 {
        let t = self.triangles[i];
        let a = self.vertices[t[0] as usize];
        let b = self.vertices[t[1] as usize];
        let c = self.vertices[t[2] as usize];
        0.5 * (b - a).cross(c - a).length()
    }

    /// Structural soundness: index bounds, matching attribute lengths and no
    /// triangle with area at or below `min_area`.
    pub fn check_structure(&self, min_area: f64) -> Result<()> {
        let nv = self.vertices.len();
        if self.uvs.len() != nv || self.normals.len() != nv {
            return Err(Error::config(format!(
                "mesh attribute mismatch: {} vertices, {} uvs, {} normals",
                nv,
                self.uvs.len(),
                self.normals.len()
            )));
        }
        if self.material_slots.len() != self.triangles.len() {
            return Err(Error::config("mesh slot count != triangle count"));
        }
        for (i, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&v| v as usize >= nv) {
                return Err(Error::config(format!("triangle {i} index out of range")));
            }
            if self.triangle_area(i) <= min_area {
                return Err(Error::config(format!(
                    "triangle {i} is degenerate (area {:.3e})",
                    self.triangle_area(i)
                )));
            }
        }
        Ok(())
    }

    /// Closed 2-manifold test: every undirected edge shared by exactly two
    /// triangles.
    pub fn is_closed_manifold(&self) -> bool {
        let mut edges: HashMap<(u32, u32), u32> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let a = t[k];
                let b = t[(k + 1) % 3];
                let key = (a.min(b), a.max(b));
                *edges.entry(key).or_insert(0) += 1;
            }
        }
        edges.values().all(|&c| c == 2)
    }

    /// Signed volume via the divergence theorem; positive for outward
    /// winding.
    pub fn signed_volume(&self) -> f64 {
        let mut v6 = 0.0;
        for t in &self.triangles {
            let a = self.vertices[t[0] as usize];
            let b = self.vertices[t[1] as usize];
            let c = self.vertices[t[2] as usize];
            v6 += a.dot(b.cross(c));
        }
        v6 / 6.0
    }
}

impl Default for TriMesh {
    fn default() -> Self {
        TriMesh::new()
    }
}

// ---------------------------------------------------------------------------
// Binary mesh container
// ---------------------------------------------------------------------------
//
// Layout (little-endian throughout):
//   magic            8 bytes  "SSYNMSH\0"
//   mesh_count       u32
//   reserved         u32      (zero)
//   per mesh:
//     vertex_count   u32
//     triangle_count u32
//     positions      vertex_count   * 3 * f32
//     normals        vertex_count   * 3 * f32
//     uvs            vertex_count   * 2 * f32
//     indices        triangle_count * 3 * u32
//     slots          triangle_count * u32

pub const MESH_MAGIC: [u8; 8] = *b"SSYNMSH\0";

pub fn write_meshes<W: Write>(mut w: W, meshes: &[TriMesh]) -> Result<()> {
    w.write_all(&MESH_MAGIC)?;
    w.write_all(&(meshes.len() as u32).to_le_bytes())?;
    w.write_all(&0u32.to_le_bytes())?;
    for m in meshes {
        w.write_all(&(m.vertices.len() as u32).to_le_bytes())?;
        w.write_all(&(m.triangles.len() as u32).to_le_bytes())?;
        let mut buf: Vec<u8> = Vec::with_capacity(m.vertices.len() * 12);
        for v in &m.vertices {
            for c in [v.x, v.y, v.z] {
                buf.extend_from_slice(&(c as f32).to_le_bytes());
            }
        }
        for n in &m.normals {
            for c in [n.x, n.y, n.z] {
                buf.extend_from_slice(&(c as f32).to_le_bytes());
            }
        }
        for uv in &m.uvs {
            for c in [uv.x, uv.y] {
                buf.extend_from_slice(&(c as f32).to_le_bytes());
            }
        }
        for t in &m.triangles {
            for &i in t {
                buf.extend_from_slice(&i.to_le_bytes());
            }
        }
        for &s in &m.material_slots {
            buf.extend_from_slice(&s.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

pub fn read_meshes<R: Read>(mut r: R, path: &str) -> Result<Vec<TriMesh>> {
    let bad = |reason: &str| Error::RasterFormat {
        path: path.to_string(),
        reason: reason.to_string(),
    };
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|_| bad("short header"))?;
    if magic != MESH_MAGIC {
        return Err(bad("bad magic"));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf).map_err(|_| bad("short header"))?;
    let count = u32::from_le_bytes(u32buf) as usize;
    r.read_exact(&mut u32buf).map_err(|_| bad("short header"))?;

    let read_u32 = |r: &mut R| -> Result<u32> {
        let mut b = [0u8; 4];
        r.read_exact(&mut b).map_err(|_| Error::RasterFormat {
            path: path.to_string(),
            reason: "truncated".to_string(),
        })?;
        Ok(u32::from_le_bytes(b))
    };
    let read_f32 = |r: &mut R| -> Result<f32> {
        let mut b = [0u8; 4];
        r.read_exact(&mut b).map_err(|_| Error::RasterFormat {
            path: path.to_string(),
            reason: "truncated".to_string(),
        })?;
        Ok(f32::from_le_bytes(b))
    };

    let mut meshes = Vec::with_capacity(count);
    for _ in 0..count {
        let nv = read_u32(&mut r)? as usize;
        let nt = read_u32(&mut r)? as usize;
        let mut m = TriMesh::new();
        for _ in 0..nv {
            let x = read_f32(&mut r)? as f64;
            let y = read_f32(&mut r)? as f64;
            let z = read_f32(&mut r)? as f64;
            m.vertices.push(Vec3::new(x, y, z));
        }
        for _ in 0..nv {
            let x = read_f32(&mut r)? as f64;
            let y = read_f32(&mut r)? as f64;
            let z = read_f32(&mut r)? as f64;
            m.normals.push(Vec3::new(x, y, z));
        }
        for _ in 0..nv {
            let x = read_f32(&mut r)? as f64;
            let y = read_f32(&mut r)? as f64;
            m.uvs.push(Vec2::new(x, y));
        }
        for _ in 0..nt {
            let a = read_u32(&mut r)?;
            let b = read_u32(&mut r)?;
            let c = read_u32(&mut r)?;
            m.triangles.push([a, b, c]);
        }
        for _ in 0..nt {
            m.material_slots.push(read_u32(&mut r)?);
        }
        m.check_structure(0.0).map_err(|_| Error::RasterFormat {
            path: path.to_string(),
            reason: "inconsistent mesh record".to_string(),
        })?;
        meshes.push(m);
    }
    Ok(meshes)
}

/// Wavefront OBJ export for external viewers. One object per mesh.
pub fn write_obj<W: Write>(mut w: W, meshes: &[TriMesh]) -> Result<()> {
    let mut base = 1usize;
    for (i, m) in meshes.iter().enumerate() {
        writeln!(w, "o mesh_{i}")?;
        for v in &m.vertices {
            writeln!(w, "v {} {} {}", v.x, v.y, v.z)?;
        }
        for n in &m.normals {
            writeln!(w, "vn {} {} {}", n.x, n.y, n.z)?;
        }
        for uv in &m.uvs {
            writeln!(w, "vt {} {}", uv.x, uv.y)?;
        }
        for t in &m.triangles {
            let (a, b, c) = (
                base + t[0] as usize,
                base + t[1] as usize,
                base + t[2] as usize,
            );
            writeln!(w, "f {a}/{a}/{a} {b}/{b}/{b} {c}/{c}/{c}")?;
        }
        base += m.vertices.len();
    }
    Ok(())
}
