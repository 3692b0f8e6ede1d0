//! Whitted-style CPU ray tracer: direct lighting with hard shadows, one
//! mirror and one refraction branch per bounce, emissive surfaces, exact
//! per-pixel z-depth. Deterministic for identical inputs regardless of
//! thread count.

use crate::bvh::{Bvh, Hit, SceneTriangle};
use crate::camera::CameraSample;
use crate::config::RenderCfg;
use crate::heightfield::value_noise3;
use crate::lighting::LightingRig;
use crate::material::{evaluate_texture, Material};
use crate::math::{Vec2, Vec3};
use rayon::prelude::*;

const RAY_EPS: f64 = 1e-5;

/// Per-view rasters. `rgb` is gamma-encoded in [0,1]; `depth` is the
/// camera-forward component of the hit point with +inf for misses.
#[derive(Debug, Clone)]
pub struct RenderOutput {
    pub width: u32,
    pub height: u32,
    pub rgb: Vec<f64>,
    pub depth: Vec<f64>,
    pub hit_mask: Vec<bool>,
}

/// Immutable scene view shared by all pixels.
pub struct RenderScene<'a> {
    pub tris: &'a [SceneTriangle],
    pub bvh: &'a Bvh,
    pub materials: &'a [Material],
    pub rig: &'a LightingRig,
    pub cfg: &'a RenderCfg,
}

struct Shading {
    point: Vec3,
    normal: Vec3,
    uv: Vec2,
    material_slot: u32,
}

fn interpolate(tri: &SceneTriangle, hit: &Hit, origin: Vec3, dir: Vec3) -> Shading {
    let (u, v) = hit.bary;
    let w = 1.0 - u - v;
    let normal = (tri.n0 * w + tri.n1 * u + tri.n2 * v).normalized();
    let uv = Vec2::new(
        tri.uv0.x * w + tri.uv1.x * u + tri.uv2.x * v,
        tri.uv0.y * w + tri.uv1.y * u + tri.uv2.y * v,
    );
    // Two-sided shading: the normal always faces the incoming ray.
    let mut n = if normal.dot(dir) > 0.0 { -normal } else { normal };
    if n.length_sq() < 1e-24 {
        n = -dir;
    }
    Shading {
        point: origin + dir * hit.t,
        normal: n,
        uv,
        material_slot: tri.material_slot,
    }
}

/// Shading-time bump perturbation from the material's noise parameters.
fn bump_normal(n: Vec3, uv: Vec2, mat: &Material) -> Vec3 {
    if mat.bump_amplitude <= 0.0 {
        return n;
    }
    let f = mat.bump_frequency;
    let eps = 0.05;
    let sample = |u: f64, v: f64| value_noise3(Vec3::new(u * f, v * f, 17.0), 0x9E37);
    let du = (sample(uv.x + eps, uv.y) - sample(uv.x - eps, uv.y)) / (2.0 * eps);
    let dv = (sample(uv.x, uv.y + eps) - sample(uv.x, uv.y - eps)) / (2.0 * eps);
    let t = n.any_orthonormal();
    let b = n.cross(t);
    (n + (t * du + b * dv) * mat.bump_amplitude).normalized()
}

/// Fraction of light surviving along a shadow ray: opaque occluders kill
/// it, transmissive occluders attenuate by a fixed factor.
fn shadow_transmittance(scene: &RenderScene, from: Vec3, dir: Vec3, max_dist: f64) -> f64 {
    let mut t = 1.0;
    scene
        .bvh
        .walk_hits(scene.tris, from, dir, RAY_EPS, max_dist, |tri_idx, _| {
            let slot = scene.tris[tri_idx as usize].material_slot as usize;
            if scene.materials[slot].transmissive {
                t *= scene.cfg.shadow_transmittance;
                true
            } else {
                t = 0.0;
                false
            }
        });
    t
}

fn reflect(dir: Vec3, n: Vec3) -> Vec3 {
    dir - n * (2.0 * dir.dot(n))
}

/// Snell refraction; None on total internal reflection.
fn refract(dir: Vec3, n: Vec3, eta: f64) -> Option<Vec3> {
    let cos_i = (-dir.dot(n)).clamp(-1.0, 1.0);
    let sin2_t = eta * eta * (1.0 - cos_i * cos_i);
    if sin2_t > 1.0 {
        return None;
    }
    let cos_t = (1.0 - sin2_t).sqrt();
    Some((dir * eta + n * (eta * cos_i - cos_t)).normalized())
}

fn fresnel_schlick(cos_i: f64, eta_ratio: f64) -> f64 {
    let r0 = ((1.0 - eta_ratio) / (1.0 + eta_ratio)).powi(2);
    r0 + (1.0 - r0) * (1.0 - cos_i).powi(5)
}

/// Blinn lobe exponent from roughness.
fn blinn_exponent(roughness: f64) -> f64 {
    let r = roughness.max(0.02);
    (2.0 / (r * r) - 2.0).max(1.0)
}

fn direct_light(
    shading: &Shading,
    mat: &Material,
    albedo: Vec3,
    view_dir: Vec3,
    light_dir: Vec3,
    irradiance: Vec3,
    visibility: f64,
) -> Vec3 {
    if visibility <= 0.0 {
        return Vec3::ZERO;
    }
    let n = shading.normal;
    let ndotl = n.dot(light_dir);
    if ndotl <= 0.0 {
        return Vec3::ZERO;
    }
    let diffuse = albedo * ((1.0 - mat.metallic) * ndotl);
    let h = (light_dir - view_dir).normalized();
    let e = blinn_exponent(mat.roughness);
    let spec = mat.metallic * (e + 2.0) / 8.0 * n.dot(h).max(0.0).powf(e) * ndotl;
    let specular = albedo * spec;
    (diffuse + specular).mul_elem(irradiance) * visibility
}

/// Radiance arriving from `dir` at `origin`'s nearest hit, Whitted style.
pub fn radiance(scene: &RenderScene, origin: Vec3, dir: Vec3, depth: u32) -> Vec3 {
    match scene.bvh.intersect(scene.tris, origin, dir, RAY_EPS, f64::INFINITY) {
        None => Vec3::ZERO,
        Some(hit) => shade(scene, &hit, origin, dir, depth),
    }
}

/// Shade one intersection: emission + ambient + shadowed direct terms, plus
/// mirror and refraction branches within the recursion budget.
pub fn shade(scene: &RenderScene, hit: &Hit, origin: Vec3, dir: Vec3, depth: u32) -> Vec3 {
    let tri = &scene.tris[hit.triangle as usize];
    let mut shading = interpolate(tri, hit, origin, dir);
    let mat = &scene.materials[shading.material_slot as usize];
    let albedo = evaluate_texture(&mat.texture, shading.uv);
    shading.normal = bump_normal(shading.normal, shading.uv, mat);

    let mut out = mat.emissive_color * mat.emissive_strength;

    if mat.transmissive {
        if depth < scene.cfg.max_depth {
            // Entering when the geometric face agrees with the shading
            // normal orientation (already flipped toward the ray).
            let entering = tri.geometric_normal().dot(dir) < 0.0;
            let eta = if entering { 1.0 / mat.ior } else { mat.ior };
            let cos_i = (-dir.dot(shading.normal)).clamp(0.0, 1.0);
            let kr = match refract(dir, shading.normal, eta) {
                None => 1.0,
                Some(refracted) => {
                    let kr = fresnel_schlick(cos_i, eta);
                    let through = radiance(
                        scene,
                        shading.point - shading.normal * RAY_EPS,
                        refracted,
                        depth + 1,
                    );
                    out += through.mul_elem(albedo) * (1.0 - kr);
                    kr
                }
            };
            let reflected = reflect(dir, shading.normal);
            out += radiance(
                scene,
                shading.point + shading.normal * RAY_EPS,
                reflected,
                depth + 1,
            ) * kr;
        }
        return clamp_finite(out);
    }

    // Ambient: uniformly distributed, unshadowed.
    out += albedo.mul_elem(scene.rig.ambient.color) * scene.rig.ambient.strength;

    let view_dir = dir;
    let shadow_origin = shading.point + shading.normal * RAY_EPS;
    if let Some(sun) = &scene.rig.sun {
        let l = -sun.direction;
        let vis = shadow_transmittance(scene, shadow_origin, l, f64::INFINITY);
        out += direct_light(&shading, mat, albedo, view_dir, l, sun.color * sun.strength, vis);
    }
    for bulb in &scene.rig.bulbs {
        let to_light = bulb.position - shading.point;
        let dist = to_light.length();
        if dist < 1e-9 {
            continue;
        }
        let l = to_light / dist;
        // Keep the shadow ray short of the bulb's own glow sphere.
        let vis = shadow_transmittance(scene, shadow_origin, l, dist - bulb.radius - RAY_EPS);
        let irradiance = bulb.color * (bulb.strength / (dist * dist).max(1e-6));
        out += direct_light(&shading, mat, albedo, view_dir, l, irradiance, vis);
    }

    // Mirror branch for sufficiently smooth metals.
    if depth < scene.cfg.max_depth
        && mat.roughness < scene.cfg.specular_roughness_max
        && mat.metallic >= scene.cfg.specular_metallic_min
    {
        let reflected = reflect(dir, shading.normal);
        let bounce = radiance(
            scene,
            shading.point + shading.normal * RAY_EPS,
            reflected,
            depth + 1,
        );
        out += bounce.mul_elem(albedo) * mat.metallic;
    }

    clamp_finite(out)
}

fn clamp_finite(v: Vec3) -> Vec3 {
    let fix = |x: f64| if x.is_finite() { x.clamp(0.0, 1e6) } else { 1e6 };
    Vec3::new(fix(v.x), fix(v.y), fix(v.z))
}

/// Render one view: primary rays through pixel centers, z-depth along the
/// camera forward axis, gamma-encoded RGB. Rows render in parallel; the
/// output is bit-identical for any thread count.
pub fn render_view(scene: &RenderScene, cam: &CameraSample) -> RenderOutput {
    let w = cam.width as usize;
    let h = cam.height as usize;
    let mut rgb = vec![0.0f64; w * h * 3];
    let mut depth = vec![f64::INFINITY; w * h];
    let mut hit_mask = vec![false; w * h];
    let forward = cam.forward();
    let inv_gamma = 1.0 / scene.cfg.gamma;

    let rows: Vec<(usize, (&mut [f64], (&mut [f64], &mut [bool])))> = rgb
        .chunks_mut(w * 3)
        .zip(depth.chunks_mut(w).zip(hit_mask.chunks_mut(w)))
        .enumerate()
        .collect();
    rows.into_par_iter().for_each(|(py, (rgb_row, (depth_row, mask_row)))| {
        for px in 0..w {
            let (origin, dir) = cam.primary_ray(px as u32, py as u32);
            let Some(hit) = scene.bvh.intersect(scene.tris, origin, dir, RAY_EPS, f64::INFINITY)
            else {
                continue;
            };
            let point = origin + dir * hit.t;
            depth_row[px] = (point - origin).dot(forward);
            mask_row[px] = true;
            let color = shade(scene, &hit, origin, dir, 0).clamp01();
            rgb_row[px * 3] = color.x.powf(inv_gamma);
            rgb_row[px * 3 + 1] = color.y.powf(inv_gamma);
            rgb_row[px * 3 + 2] = color.z.powf(inv_gamma);
        }
    });

    RenderOutput {
        width: cam.width,
        height: cam.height,
        rgb,
        depth,
        hit_mask,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvh::flatten_meshes;
    use crate::camera::{look_at, CameraRegion};
    use crate::config::GenConfig;
    use crate::lighting::{AmbientLight, SunLight};
    use crate::material::TextureKind;
    use crate::math::Aabb;
    use crate::primitives;

    fn plain_material(color: Vec3) -> Material {
        Material {
            texture: TextureKind::Solid { color },
            roughness: 0.5,
            metallic: 0.0,
            ior: 1.5,
            transmissive: false,
            bump_amplitude: 0.0,
            bump_frequency: 1.0,
            emissive_strength: 0.0,
            emissive_color: Vec3::ZERO,
        }
    }

    fn dark_rig() -> LightingRig {
        LightingRig {
            ambient: AmbientLight {
                color: Vec3::ONE,
                strength: 0.0,
            },
            sun: None,
            bulbs: Vec::new(),
            emissive_slots: Vec::new(),
        }
    }

    fn camera_at(pos: Vec3, target: Vec3, fov: f64, res: u32) -> CameraSample {
        CameraSample {
            position: pos,
            rotation: look_at(pos, target, Vec3::Z),
            fov_y_deg: fov,
            width: res,
            height: res,
            region: CameraRegion::Outer,
        }
    }

    fn wall_scene() -> (Vec<SceneTriangle>, Vec<Material>) {
        // Wall spanning x = 5, large enough to cover a 90 degree frustum.
        let wall = primitives::box_mesh(
            &Aabb::new(Vec3::new(5.0, -20.0, -20.0), Vec3::new(5.2, 20.0, 20.0)),
            0,
        );
        (flatten_meshes(&[wall]), vec![plain_material(Vec3::ONE)])
    }

    #[test]
    fn emissive_radiance_is_strength_times_color() {
        let m = primitives::unit_sphere(16, 8, 0);
        let tris = flatten_meshes(&[m]);
        let bvh = Bvh::build(&tris).unwrap();
        let mut mat = plain_material(Vec3::ONE);
        mat.emissive_strength = 0.7;
        mat.emissive_color = Vec3::new(1.0, 0.5, 0.25);
        let mats = vec![mat];
        let rig = dark_rig();
        let cfg = GenConfig::default();
        let scene = RenderScene {
            tris: &tris,
            bvh: &bvh,
            materials: &mats,
            rig: &rig,
            cfg: &cfg.render,
        };
        let out = radiance(&scene, Vec3::new(0.0, 0.0, 3.0), Vec3::new(0.0, 0.0, -1.0), 0);
        assert!((out - Vec3::new(0.7, 0.35, 0.175)).length() < 1e-12);
    }

    #[test]
    fn unit_ambient_returns_albedo() {
        let (tris, mut mats) = wall_scene();
        mats[0] = plain_material(Vec3::new(0.3, 0.6, 0.9));
        let bvh = Bvh::build(&tris).unwrap();
        let mut rig = dark_rig();
        rig.ambient.strength = 1.0;
        let cfg = GenConfig::default();
        let scene = RenderScene {
            tris: &tris,
            bvh: &bvh,
            materials: &mats,
            rig: &rig,
            cfg: &cfg.render,
        };
        let out = radiance(&scene, Vec3::ZERO, Vec3::X, 0);
        assert!((out - Vec3::new(0.3, 0.6, 0.9)).length() < 1e-12);
    }

    #[test]
    fn occluded_sun_leaves_only_ambient() {
        // A floor with a cube floating above; sun straight down.
        let floor = primitives::box_mesh(
            &Aabb::new(Vec3::new(-10.0, -10.0, -0.2), Vec3::new(10.0, 10.0, 0.0)),
            0,
        );
        let blocker = primitives::box_mesh(
            &Aabb::new(Vec3::new(-1.0, -1.0, 3.0), Vec3::new(1.0, 1.0, 4.0)),
            1,
        );
        let tris = flatten_meshes(&[floor, blocker]);
        let bvh = Bvh::build(&tris).unwrap();
        let mats = vec![plain_material(Vec3::ONE), plain_material(Vec3::ONE)];
        let mut rig = dark_rig();
        rig.ambient = AmbientLight {
            color: Vec3::ONE,
            strength: 0.25,
        };
        rig.sun = Some(SunLight {
            direction: Vec3::new(0.0, 0.0, -1.0),
            color: Vec3::ONE,
            strength: 1.0,
        });
        let cfg = GenConfig::default();
        let scene = RenderScene {
            tris: &tris,
            bvh: &bvh,
            materials: &mats,
            rig: &rig,
            cfg: &cfg.render,
        };
        // Shaded point under the blocker: only ambient remains.
        let shaded = radiance(&scene, Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 0.0, -1.0), 0);
        assert!((shaded - Vec3::splat(0.25)).length() < 1e-12);
        // Point outside the shadow: ambient plus the full sun term. The
        // interpolated vertex normals of the box tilt ndotl a hair off 1.
        let lit = radiance(&scene, Vec3::new(5.0, 5.0, 1.0), Vec3::new(0.0, 0.0, -1.0), 0);
        assert!((lit - Vec3::splat(1.25)).length() < 2e-3, "lit {lit:?}");
    }

    #[test]
    fn perpendicular_wall_depth_is_constant() {
        let (tris, mats) = wall_scene();
        let bvh = Bvh::build(&tris).unwrap();
        let rig = dark_rig();
        let cfg = GenConfig::default();
        let scene = RenderScene {
            tris: &tris,
            bvh: &bvh,
            materials: &mats,
            rig: &rig,
            cfg: &cfg.render,
        };
        let cam = camera_at(Vec3::ZERO, Vec3::X, 90.0, 64);
        let out = render_view(&scene, &cam);
        for py in 0..64u32 {
            for px in 0..64u32 {
                let d = out.depth[(py * 64 + px) as usize];
                assert!(out.hit_mask[(py * 64 + px) as usize]);
                assert!((d - 5.0).abs() < 1e-6, "pixel ({px},{py}) depth {d}");
            }
        }
        // Oblique pixel: ray length exceeds z-depth, distinguishing the
        // convention.
        let (origin, dir) = cam.primary_ray(63, 32);
        let hit = bvh.intersect(&tris, origin, dir, 1e-9, f64::INFINITY).unwrap();
        let ray_len = hit.t;
        let expected = 5.0 / dir.dot(cam.forward());
        assert!((ray_len - expected).abs() < 1e-9);
        assert!(ray_len > 5.0 + 0.5, "oblique ray length {ray_len}");
    }

    #[test]
    fn zero_light_scene_renders_black() {
        let (tris, mats) = wall_scene();
        let bvh = Bvh::build(&tris).unwrap();
        let rig = dark_rig();
        let cfg = GenConfig::default();
        let scene = RenderScene {
            tris: &tris,
            bvh: &bvh,
            materials: &mats,
            rig: &rig,
            cfg: &cfg.render,
        };
        let cam = camera_at(Vec3::ZERO, Vec3::X, 60.0, 16);
        let out = render_view(&scene, &cam);
        assert!(out.rgb.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ambient_only_energy_never_exceeds_albedo_bound() {
        let (tris, mut mats) = wall_scene();
        mats[0] = plain_material(Vec3::new(0.9, 0.8, 1.0));
        mats[0].metallic = 0.9; // metals must not break the ambient bound
        let bvh = Bvh::build(&tris).unwrap();
        let mut rig = dark_rig();
        rig.ambient.strength = 1.0;
        let cfg = GenConfig::default();
        let scene = RenderScene {
            tris: &tris,
            bvh: &bvh,
            materials: &mats,
            rig: &rig,
            cfg: &cfg.render,
        };
        let cam = camera_at(Vec3::ZERO, Vec3::X, 70.0, 32);
        let out = render_view(&scene, &cam);
        let inv_gamma = 1.0 / cfg.render.gamma;
        for px in 0..32 * 32 {
            for c in 0..3 {
                let bound = [0.9f64, 0.8, 1.0][c].powf(inv_gamma);
                assert!(out.rgb[px * 3 + c] <= bound + 1e-12);
            }
        }
    }

    #[test]
    fn glass_refracts_and_mirror_reflects() {
        // Emissive backlight behind a glass pane; camera sees it through
        // refraction.
        let pane = primitives::box_mesh(
            &Aabb::new(Vec3::new(2.0, -5.0, -5.0), Vec3::new(2.2, 5.0, 5.0)),
            0,
        );
        let glow = primitives::box_mesh(
            &Aabb::new(Vec3::new(6.0, -5.0, -5.0), Vec3::new(6.2, 5.0, 5.0)),
            1,
        );
        let tris = flatten_meshes(&[pane, glow]);
        let bvh = Bvh::build(&tris).unwrap();
        let mut glass = plain_material(Vec3::ONE);
        glass.transmissive = true;
        glass.ior = 1.5;
        let mut emissive = plain_material(Vec3::ONE);
        emissive.emissive_strength = 1.0;
        emissive.emissive_color = Vec3::new(0.0, 1.0, 0.0);
        let mats = vec![glass, emissive];
        let rig = dark_rig();
        let cfg = GenConfig::default();
        let scene = RenderScene {
            tris: &tris,
            bvh: &bvh,
            materials: &mats,
            rig: &rig,
            cfg: &cfg.render,
        };
        let through = radiance(&scene, Vec3::ZERO, Vec3::X, 0);
        assert!(through.y > 0.5, "transmitted green {through:?}");

        // A mirror floor reflects the emissive wall into view.
        let mirror_floor = primitives::box_mesh(
            &Aabb::new(Vec3::new(-5.0, -5.0, -0.2), Vec3::new(8.0, 5.0, 0.0)),
            0,
        );
        let glow2 = primitives::box_mesh(
            &Aabb::new(Vec3::new(6.0, -5.0, 0.0), Vec3::new(6.2, 5.0, 6.0)),
            1,
        );
        let tris2 = flatten_meshes(&[mirror_floor, glow2]);
        let bvh2 = Bvh::build(&tris2).unwrap();
        let mut mirror = plain_material(Vec3::ONE);
        mirror.roughness = 0.01;
        mirror.metallic = 1.0;
        let mats2 = vec![mirror, mats[1].clone()];
        let scene2 = RenderScene {
            tris: &tris2,
            bvh: &bvh2,
            materials: &mats2,
            rig: &rig,
            cfg: &cfg.render,
        };
        // Looking down at the floor at 45 degrees away from the glow wall:
        // the mirror image of the wall appears.
        let origin = Vec3::new(0.0, 0.0, 3.0);
        let dir = Vec3::new(1.0, 0.0, -1.0).normalized();
        let seen = radiance(&scene2, origin, dir, 0);
        assert!(seen.y > 0.5, "reflected green {seen:?}");
    }

    #[test]
    fn render_is_deterministic_across_thread_counts() {
        let (tris, mats) = wall_scene();
        let bvh = Bvh::build(&tris).unwrap();
        let mut rig = dark_rig();
        rig.ambient.strength = 0.8;
        let cfg = GenConfig::default();
        let scene = RenderScene {
            tris: &tris,
            bvh: &bvh,
            materials: &mats,
            rig: &rig,
            cfg: &cfg.render,
        };
        let cam = camera_at(Vec3::ZERO, Vec3::X, 60.0, 48);
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool8 = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
        let a = pool1.install(|| render_view(&scene, &cam));
        let b = pool8.install(|| render_view(&scene, &cam));
        assert_eq!(a.rgb, b.rgb);
        assert_eq!(a.depth, b.depth);
        assert_eq!(a.hit_mask, b.hit_mask);
    }
}
