//! Height-field augmentation: smooth value-noise displacement along vertex
//! normals, giving primitives concave and convex surface detail.

use crate::math::{lerp, smoothstep, Vec3};
use crate::mesh::TriMesh;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeightFieldParams {
    /// Displacement cap as a fraction of the mesh mean scale.
    pub amplitude: f64,
    /// Noise cycles across one mean-scale unit.
    pub frequency: f64,
    pub octaves: u32,
    pub noise_seed: u64,
}

fn hash3(ix: i64, iy: i64, iz: i64, seed: u64) -> u64 {
    let mut h = seed ^ 0x9E37_79B9_7F4A_7C15;
    for v in [ix as u64, iy as u64, iz as u64] {
        h ^= v.wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
        h = h.rotate_left(27).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    }
    h ^= h >> 29;
    h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    h ^ (h >> 32)
}

/// Lattice value in [-1, 1].
fn lattice(ix: i64, iy: i64, iz: i64, seed: u64) -> f64 {
    let h = hash3(ix, iy, iz, seed);
    (h >> 11) as f64 * (2.0 / (1u64 << 53) as f64) - 1.0
}

/// Single-octave trilinear value noise in [-1, 1].
pub fn value_noise3(p: Vec3, seed: u64) -> f64 {
    let fx = p.x.floor();
    let fy = p.y.floor();
    let fz = p.z.floor();
    let (ix, iy, iz) = (fx as i64, fy as i64, fz as i64);
    let tx = smoothstep(p.x - fx);
    let ty = smoothstep(p.y - fy);
    let tz = smoothstep(p.z - fz);
    let mut corners = [0.0; 8];
    for (c, corner) in corners.iter_mut().enumerate() {
        let dx = (c & 1) as i64;
        let dy = ((c >> 1) & 1) as i64;
        let dz = ((c >> 2) & 1) as i64;
        *corner = lattice(ix + dx, iy + dy, iz + dz, seed);
    }
    let x00 = lerp(corners[0], corners[1], tx);
    let x10 = lerp(corners[2], corners[3], tx);
    let x01 = lerp(corners[4], corners[5], tx);
    let x11 = lerp(corners[6], corners[7], tx);
    let y0 = lerp(x00, x10, ty);
    let y1 = lerp(x01, x11, ty);
    lerp(y0, y1, tz)
}

/// Multi-octave value noise normalized back into [-1, 1].
pub fn fbm3(p: Vec3, seed: u64, octaves: u32) -> f64 {
    let octaves = octaves.max(1);
    let mut sum = 0.0;
    let mut amp = 1.0;
    let mut norm = 0.0;
    for o in 0..octaves {
        sum += amp * value_noise3(p * 2f64.powi(o as i32), seed.wrapping_add(o as u64));
        norm += amp;
        amp *= 0.5;
    }
    sum / norm
}

/// Displace every vertex along its normal by a smooth noise value bounded by
/// `amplitude * mean_scale`. Connectivity is untouched; normals are
/// recomputed from the displaced geometry.
pub fn apply_height_field(mesh: &TriMesh, params: &HeightFieldParams) -> TriMesh {
    let mut out = mesh.clone();
    if params.amplitude == 0.0 {
        return out;
    }
    let mean_scale = mesh.aabb().extent().mean().max(1e-12);
    let cap = params.amplitude * mean_scale;
    let inv = params.frequency / mean_scale;
    for (v, n) in out.vertices.iter_mut().zip(&mesh.normals) {
        let noise = fbm3(*v * inv, params.noise_seed, params.octaves);
        *v += *n * (noise * cap);
    }
    out.recompute_normals();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::unit_cube_grid;

    fn params(amplitude: f64) -> HeightFieldParams {
        HeightFieldParams {
            amplitude,
            frequency: 2.5,
            octaves: 2,
            noise_seed: 99,
        }
    }

    #[test]
    fn zero_amplitude_is_identity() {
        let m = unit_cube_grid(4, 0);
        let out = apply_height_field(&m, &params(0.0));
        assert_eq!(out.vertices, m.vertices);
        assert_eq!(out.triangles, m.triangles);
    }

    #[test]
    fn displacement_is_bounded_and_two_sided() {
        let m = unit_cube_grid(8, 0);
        let p = params(0.1);
        let out = apply_height_field(&m, &p);
        let mean_scale = m.aabb().extent().mean();
        let cap = p.amplitude * mean_scale;
        let mut signed = Vec::new();
        for ((a, b), n) in m.vertices.iter().zip(&out.vertices).zip(&m.normals) {
            let d = *b - *a;
            assert!(d.length() <= cap + 1e-9, "displacement {}", d.length());
            signed.push(d.dot(*n));
        }
        assert!(signed.iter().any(|&s| s > 1e-6), "no convex displacement");
        assert!(signed.iter().any(|&s| s < -1e-6), "no concave displacement");
        assert_eq!(out.triangles, m.triangles);
    }

    #[test]
    fn same_inputs_bit_identical() {
        let m = unit_cube_grid(6, 0);
        let p = params(0.08);
        let a = apply_height_field(&m, &p);
        let b = apply_height_field(&m, &p);
        assert_eq!(a.vertices, b.vertices);
    }

    #[test]
    fn noise_is_smoothly_bounded() {
        for i in 0..500 {
            let p = Vec3::new(i as f64 * 0.37, (i as f64 * 0.11).sin() * 5.0, i as f64 * -0.23);
            let v = fbm3(p, 7, 2);
            assert!((-1.0..=1.0).contains(&v), "noise {v} out of range");
        }
    }
}
