//! Bounding volume hierarchy over the flattened scene triangle soup:
//! nearest-hit traversal, shadow transmittance and closest-surface distance
//! queries.

use crate::error::{Error, Result};
use crate::math::{safe_inv_dir, Aabb, Vec2, Vec3};
use crate::mesh::TriMesh;

/// One triangle of the flattened scene with shading attributes.
#[derive(Debug, Clone)]
pub struct SceneTriangle {
    pub v0: Vec3,
    pub v1: Vec3,
    pub v2: Vec3,
    pub n0: Vec3,
    pub n1: Vec3,
    pub n2: Vec3,
    pub uv0: Vec2,
    pub uv1: Vec2,
    pub uv2: Vec2,
    pub material_slot: u32,
}

impl SceneTriangle {
    pub fn aabb(&self) -> Aabb {
        Aabb::from_points([self.v0, self.v1, self.v2])
    }

    pub fn centroid(&self) -> Vec3 {
        (self.v0 + self.v1 + self.v2) / 3.0
    }

    pub fn geometric_normal(&self) -> Vec3 {
        (self.v1 - self.v0).cross(self.v2 - self.v0).normalized()
    }

    /// Moller-Trumbore, two-sided. Returns (t, u, v) with barycentrics for
    /// v1 and v2.
    pub fn intersect(&self, origin: Vec3, dir: Vec3, t_min: f64, t_max: f64) -> Option<(f64, f64, f64)> {
        let e1 = self.v1 - self.v0;
        let e2 = self.v2 - self.v0;
        let pvec = dir.cross(e2);
        let det = e1.dot(pvec);
        if det.abs() < 1e-14 {
            return None;
        }
        let inv_det = 1.0 / det;
        let tvec = origin - self.v0;
        let u = tvec.dot(pvec) * inv_det;
        if !(-1e-12..=1.0 + 1e-12).contains(&u) {
            return None;
        }
        let qvec = tvec.cross(e1);
        let v = dir.dot(qvec) * inv_det;
        if v < -1e-12 || u + v > 1.0 + 1e-12 {
            return None;
        }
        let t = e2.dot(qvec) * inv_det;
        if t <= t_min || t >= t_max {
            return None;
        }
        Some((t, u.clamp(0.0, 1.0), v.clamp(0.0, 1.0)))
    }

    /// Exact point-to-triangle distance (Ericson, Real-Time Collision
    /// Detection).
    pub fn distance(&self, p: Vec3) -> f64 {
        let (a, b, c) = (self.v0, self.v1, self.v2);
        let ab = b - a;
        let ac = c - a;
        let ap = p - a;
        let d1 = ab.dot(ap);
        let d2 = ac.dot(ap);
        if d1 <= 0.0 && d2 <= 0.0 {
            return (p - a).length();
        }
        let bp = p - b;
        let d3 = ab.dot(bp);
        let d4 = ac.dot(bp);
        if d3 >= 0.0 && d4 <= d3 {
            return (p - b).length();
        }
        let vc = d1 * d4 - d3 * d2;
        if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
            let v = d1 / (d1 - d3);
            return (p - (a + ab * v)).length();
        }
        let cp = p - c;
        let d5 = ab.dot(cp);
        let d6 = ac.dot(cp);
        if d6 >= 0.0 && d5 <= d6 {
            return (p - c).length();
        }
        let vb = d5 * d2 - d1 * d6;
        if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
            let w = d2 / (d2 - d6);
            return (p - (a + ac * w)).length();
        }
        let va = d3 * d6 - d5 * d4;
        if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
            let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
            return (p - (b + (c - b) * w)).length();
        }
        let denom = 1.0 / (va + vb + vc);
        let v = vb * denom;
        let w = vc * denom;
        (p - (a + ab * v + ac * w)).length()
    }
}

/// Flatten meshes into the global triangle soup the BVH indexes.
pub fn flatten_meshes(meshes: &[TriMesh]) -> Vec<SceneTriangle> {
    let mut tris = Vec::new();
    for m in meshes {
        for (ti, t) in m.triangles.iter().enumerate() {
            tris.push(SceneTriangle {
                v0: m.vertices[t[0] as usize],
                v1: m.vertices[t[1] as usize],
                v2: m.vertices[t[2] as usize],
                n0: m.normals[t[0] as usize],
                n1: m.normals[t[1] as usize],
                n2: m.normals[t[2] as usize],
                uv0: m.uvs[t[0] as usize],
                uv1: m.uvs[t[1] as usize],
                uv2: m.uvs[t[2] as usize],
                material_slot: m.material_slots[ti],
            });
        }
    }
    tris
}

/// Nearest ray hit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub t: f64,
    pub triangle: u32,
    /// Barycentric weights of v1 and v2.
    pub bary: (f64, f64),
}

#[derive(Debug, Clone)]
struct Node {
    aabb: Aabb,
    /// Leaf: index into the reordered triangle list. Internal: left child
    /// (right child is `extra`).
    first: u32,
    /// Leaf: triangle count. Internal: 0.
    count: u32,
    /// Internal: right child index.
    extra: u32,
}

pub struct Bvh {
    nodes: Vec<Node>,
    /// Triangle indices into the soup, reordered so leaves are contiguous.
    order: Vec<u32>,
}

const LEAF_SIZE: usize = 4;
const SAH_BINS: usize = 12;

impl Bvh {
    pub fn build(tris: &[SceneTriangle]) -> Result<Bvh> {
        if tris.is_empty() {
            return Err(Error::EmptyScene);
        }
        let centroids: Vec<Vec3> = tris.iter().map(|t| t.centroid()).collect();
        let boxes: Vec<Aabb> = tris.iter().map(|t| t.aabb()).collect();
        let mut order: Vec<u32> = (0..tris.len() as u32).collect();
        let mut nodes = Vec::with_capacity(tris.len() / 2);
        nodes.push(Node {
            aabb: Aabb::EMPTY,
            first: 0,
            count: 0,
            extra: 0,
        });
        let mut stack = vec![(0usize, 0usize, tris.len())];
        while let Some((node_idx, start, end)) = stack.pop() {
            let mut aabb = Aabb::EMPTY;
            let mut cbox = Aabb::EMPTY;
            for &i in &order[start..end] {
                aabb = aabb.union(&boxes[i as usize]);
                cbox.grow(centroids[i as usize]);
            }
            nodes[node_idx].aabb = aabb;
            let len = end - start;
            let split = if len <= LEAF_SIZE {
                None
            } else {
                best_split(&order[start..end], &centroids, &boxes, &cbox)
            };
            match split {
                None => {
                    nodes[node_idx].first = start as u32;
                    nodes[node_idx].count = len as u32;
                }
                Some((axis, pivot)) => {
                    let mid = partition(&mut order[start..end], &centroids, axis, pivot) + start;
                    // Degenerate partitions fall back to a median split.
                    let mid = if mid == start || mid == end {
                        let slice = &mut order[start..end];
                        slice.sort_by(|&a, &b| {
                            centroids[a as usize]
                                .get(axis)
                                .partial_cmp(&centroids[b as usize].get(axis))
                                .unwrap_or(std::cmp::Ordering::Equal)
                        });
                        start + len / 2
                    } else {
                        mid
                    };
                    let left = nodes.len();
                    nodes.push(Node {
                        aabb: Aabb::EMPTY,
                        first: 0,
                        count: 0,
                        extra: 0,
                    });
                    let right = nodes.len();
                    nodes.push(Node {
                        aabb: Aabb::EMPTY,
                        first: 0,
                        count: 0,
                        extra: 0,
                    });
                    nodes[node_idx].first = left as u32;
                    nodes[node_idx].count = 0;
                    nodes[node_idx].extra = right as u32;
                    stack.push((left, start, mid));
                    stack.push((right, mid, end));
                }
            }
        }
        Ok(Bvh { nodes, order })
    }

    /// Nearest hit with t strictly inside `(t_min, t_max)`.
    pub fn intersect(
        &self,
        tris: &[SceneTriangle],
        origin: Vec3,
        dir: Vec3,
        t_min: f64,
        t_max: f64,
    ) -> Option<Hit> {
        let inv = safe_inv_dir(dir);
        let mut best: Option<Hit> = None;
        let mut best_t = t_max;
        let mut stack: Vec<u32> = Vec::with_capacity(64);
        stack.push(0);
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni as usize];
            if node.aabb.ray_hit(origin, inv, t_min, best_t).is_none() {
                continue;
            }
            if node.count > 0 {
                for &ti in &self.order[node.first as usize..(node.first + node.count) as usize] {
                    if let Some((t, u, v)) = tris[ti as usize].intersect(origin, dir, t_min, best_t)
                    {
                        best_t = t;
                        best = Some(Hit {
                            t,
                            triangle: ti,
                            bary: (u, v),
                        });
                    }
                }
            } else {
                // Near child last so it pops first.
                let l = node.first;
                let r = node.extra;
                let dl = self.nodes[l as usize].aabb.distance_sq(origin);
                let dr = self.nodes[r as usize].aabb.distance_sq(origin);
                if dl <= dr {
                    stack.push(r);
                    stack.push(l);
                } else {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        best
    }

    /// Walk every surface between `t_min` and `t_max`, calling `visit` with
    /// each triangle index in hit order. `visit` returns false to stop.
    pub fn walk_hits<F: FnMut(u32, f64) -> bool>(
        &self,
        tris: &[SceneTriangle],
        origin: Vec3,
        dir: Vec3,
        t_min: f64,
        t_max: f64,
        mut visit: F,
    ) {
        let mut t_cursor = t_min;
        for _ in 0..64 {
            match self.intersect(tris, origin, dir, t_cursor, t_max) {
                None => return,
                Some(hit) => {
                    if !visit(hit.triangle, hit.t) {
                        return;
                    }
                    t_cursor = hit.t + 1e-9 * hit.t.abs().max(1.0);
                }
            }
        }
    }

    /// Distance from `p` to the nearest surface, branch-and-bound over node
    /// boxes with exact point-triangle distances at the leaves.
    pub fn distance(&self, tris: &[SceneTriangle], p: Vec3) -> f64 {
        let mut best = f64::INFINITY;
        let mut stack: Vec<u32> = Vec::with_capacity(64);
        stack.push(0);
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni as usize];
            if node.aabb.distance_sq(p) >= best * best {
                continue;
            }
            if node.count > 0 {
                for &ti in &self.order[node.first as usize..(node.first + node.count) as usize] {
                    best = best.min(tris[ti as usize].distance(p));
                }
            } else {
                let l = node.first;
                let r = node.extra;
                let dl = self.nodes[l as usize].aabb.distance_sq(p);
                let dr = self.nodes[r as usize].aabb.distance_sq(p);
                if dl <= dr {
                    stack.push(r);
                    stack.push(l);
                } else {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        best
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

fn best_split(
    order: &[u32],
    centroids: &[Vec3],
    boxes: &[Aabb],
    cbox: &Aabb,
) -> Option<(usize, f64)> {
    let extent = cbox.extent();
    let mut best: Option<(usize, f64)> = None;
    let mut best_cost = f64::INFINITY;
    let parent_area = {
        let mut a = Aabb::EMPTY;
        for &i in order {
            a = a.union(&boxes[i as usize]);
        }
        a.surface_area()
    };
    if parent_area <= 0.0 {
        return None;
    }
    for axis in 0..3 {
        let span = extent.get(axis);
        if span < 1e-12 {
            continue;
        }
        let lo = cbox.min.get(axis);
        let mut bins: Vec<(Aabb, usize)> = vec![(Aabb::EMPTY, 0); SAH_BINS];
        for &i in order {
            let rel = ((centroids[i as usize].get(axis) - lo) / span * SAH_BINS as f64) as usize;
            let b = rel.min(SAH_BINS - 1);
            bins[b].0 = bins[b].0.union(&boxes[i as usize]);
            bins[b].1 += 1;
        }
        for cut in 1..SAH_BINS {
            let (mut la, mut ln) = (Aabb::EMPTY, 0usize);
            for bin in &bins[..cut] {
                la = la.union(&bin.0);
                ln += bin.1;
            }
            let (mut ra, mut rn) = (Aabb::EMPTY, 0usize);
            for bin in &bins[cut..] {
                ra = ra.union(&bin.0);
                rn += bin.1;
            }
            if ln == 0 || rn == 0 {
                continue;
            }
            let cost = la.surface_area() * ln as f64 + ra.surface_area() * rn as f64;
            if cost < best_cost {
                best_cost = cost;
                best = Some((axis, lo + span * cut as f64 / SAH_BINS as f64));
            }
        }
    }
    // Accept the split only if it beats the flat leaf cost.
    let leaf_cost = parent_area * order.len() as f64;
    if best_cost < leaf_cost {
        best
    } else if order.len() > 4 * LEAF_SIZE {
        // Large nodes must split even when SAH is indifferent.
        best
    } else {
        None
    }
}

fn partition(order: &mut [u32], centroids: &[Vec3], axis: usize, pivot: f64) -> usize {
    let mut i = 0usize;
    for j in 0..order.len() {
        if centroids[order[j] as usize].get(axis) < pivot {
            order.swap(i, j);
            i += 1;
        }
    }
    i
}

/// O(N) reference intersector used by tests and validation oracles.
pub fn brute_force_intersect(
    tris: &[SceneTriangle],
    origin: Vec3,
    dir: Vec3,
    t_min: f64,
    t_max: f64,
) -> Option<Hit> {
    let mut best: Option<Hit> = None;
    let mut best_t = t_max;
    for (i, tri) in tris.iter().enumerate() {
        if let Some((t, u, v)) = tri.intersect(origin, dir, t_min, best_t) {
            best_t = t;
            best = Some(Hit {
                t,
                triangle: i as u32,
                bary: (u, v),
            });
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::TriMesh;
    use crate::primitives;
    use crate::rng::{derive_stream, Seed};

    fn soup(meshes: &[TriMesh]) -> Vec<SceneTriangle> {
        flatten_meshes(meshes)
    }

    #[test]
    fn single_triangle_leaf() {
        let mut m = TriMesh::new();
        m.vertices = vec![
            Vec3::new(-1.0, -1.0, 0.0),
            Vec3::new(1.0, -1.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ];
        m.triangles = vec![[0, 1, 2]];
        m.uvs = vec![Vec2::ZERO; 3];
        m.normals = vec![Vec3::Z; 3];
        m.material_slots = vec![0];
        let tris = soup(&[m]);
        let bvh = Bvh::build(&tris).unwrap();
        let hit = bvh
            .intersect(&tris, Vec3::new(0.0, 0.0, 5.0), Vec3::new(0.0, 0.0, -1.0), 0.0, f64::INFINITY)
            .unwrap();
        assert_eq!(hit.triangle, 0);
        assert!((hit.t - 5.0).abs() < 1e-12);
        assert!(bvh
            .intersect(&tris, Vec3::new(10.0, 10.0, 5.0), Vec3::new(0.0, 0.0, -1.0), 0.0, f64::INFINITY)
            .is_none());
    }

    #[test]
    fn empty_scene_is_an_error() {
        assert!(matches!(Bvh::build(&[]), Err(Error::EmptyScene)));
    }

    #[test]
    fn cube_face_hit_from_outside_and_inside() {
        let tris = soup(&[primitives::unit_cube(0)]);
        let bvh = Bvh::build(&tris).unwrap();
        let hit = bvh
            .intersect(&tris, Vec3::new(0.0, 0.0, 5.0), Vec3::new(0.0, 0.0, -1.0), 0.0, f64::INFINITY)
            .unwrap();
        assert!((hit.t - 4.5).abs() < 1e-12, "expected face at z=0.5");
        // From inside the cube, the nearest exit face.
        let hit = bvh
            .intersect(&tris, Vec3::new(0.1, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), 0.0, f64::INFINITY)
            .unwrap();
        assert!((hit.t - 0.4).abs() < 1e-12);
        // t_max below the first hit.
        assert!(bvh
            .intersect(&tris, Vec3::new(0.0, 0.0, 5.0), Vec3::new(0.0, 0.0, -1.0), 0.0, 4.0)
            .is_none());
    }

    #[test]
    fn bvh_matches_brute_force_on_random_rays() {
        let meshes = vec![
            primitives::unit_sphere(24, 12, 0),
            {
                let mut c = primitives::unit_cube_grid(4, 1);
                c.apply_rotation_translation(&crate::math::Mat3::rotation_z(0.4), Vec3::new(1.2, 0.3, 0.0));
                c
            },
            {
                let mut c = primitives::unit_cone(16, 2);
                c.apply_rotation_translation(&crate::math::Mat3::IDENTITY, Vec3::new(-1.0, -0.7, 0.4));
                c
            },
        ];
        let tris = soup(&meshes);
        assert!(tris.len() <= 10_000);
        let bvh = Bvh::build(&tris).unwrap();
        let mut stream = derive_stream(Seed::new(40, 0), "rays");
        for _ in 0..1000 {
            let origin = Vec3::new(
                stream.uniform_in(-3.0, 3.0),
                stream.uniform_in(-3.0, 3.0),
                stream.uniform_in(-3.0, 3.0),
            );
            let dir = Vec3::new(
                stream.uniform_in(-1.0, 1.0),
                stream.uniform_in(-1.0, 1.0),
                stream.uniform_in(-1.0, 1.0),
            )
            .normalized();
            if dir.length_sq() < 0.5 {
                continue;
            }
            let a = bvh.intersect(&tris, origin, dir, 1e-6, f64::INFINITY);
            let b = brute_force_intersect(&tris, origin, dir, 1e-6, f64::INFINITY);
            match (a, b) {
                (None, None) => {}
                (Some(x), Some(y)) => {
                    assert_eq!(x.triangle, y.triangle);
                    assert!((x.t - y.t).abs() < 1e-9);
                }
                other => panic!("bvh/brute mismatch: {other:?}"),
            }
        }
    }

    #[test]
    fn distance_matches_brute_force() {
        let meshes = vec![primitives::unit_sphere(16, 8, 0), {
            let mut c = primitives::unit_cube(1);
            c.apply_rotation_translation(&crate::math::Mat3::IDENTITY, Vec3::new(2.0, 0.0, 0.0));
            c
        }];
        let tris = soup(&meshes);
        let bvh = Bvh::build(&tris).unwrap();
        let mut stream = derive_stream(Seed::new(41, 0), "dist");
        for _ in 0..1000 {
            let p = Vec3::new(
                stream.uniform_in(-3.0, 4.0),
                stream.uniform_in(-3.0, 3.0),
                stream.uniform_in(-3.0, 3.0),
            );
            let fast = bvh.distance(&tris, p);
            let brute = tris
                .iter()
                .map(|t| t.distance(p))
                .fold(f64::INFINITY, f64::min);
            assert!((fast - brute).abs() < 1e-9, "{fast} vs {brute}");
        }
    }

    #[test]
    fn walk_hits_sees_both_cube_faces() {
        let tris = soup(&[primitives::unit_cube(0)]);
        let bvh = Bvh::build(&tris).unwrap();
        let mut ts = Vec::new();
        bvh.walk_hits(
            &tris,
            Vec3::new(0.0, 0.0, 5.0),
            Vec3::new(0.0, 0.0, -1.0),
            0.0,
            f64::INFINITY,
            |_, t| {
                ts.push(t);
                true
            },
        );
        assert_eq!(ts.len(), 2);
        assert!((ts[0] - 4.5).abs() < 1e-9 && (ts[1] - 5.5).abs() < 1e-9);
    }
}
