//! Procedural materials: a texture, scalar PBR-ish parameters, optional
//! glass transmission and optional emission. The scene-level randomization
//! pass re-rolls a subset of slots and occasionally pushes a whole scene
//! toward specular.

use crate::config::GenConfig;
use crate::heightfield::value_noise3;
use crate::math::{Vec2, Vec3};
use crate::rng::RandomStream;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TextureKind {
    Solid {
        color: Vec3,
    },
    Checker {
        color_a: Vec3,
        color_b: Vec3,
        scale: f64,
    },
    Stripes {
        color_a: Vec3,
        color_b: Vec3,
        scale: f64,
    },
    ValueNoise {
        color_a: Vec3,
        color_b: Vec3,
        scale: f64,
        seed: u64,
    },
}

/// Deterministic color in [0,1]^3 for a UV coordinate.
pub fn evaluate_texture(t: &TextureKind, uv: Vec2) -> Vec3 {
    match t {
        TextureKind::Solid { color } => *color,
        TextureKind::Checker {
            color_a,
            color_b,
            scale,
        } => {
            let parity =
                ((uv.x * scale).floor() as i64 + (uv.y * scale).floor() as i64).rem_euclid(2);
            if parity == 0 {
                *color_a
            } else {
                *color_b
            }
        }
        TextureKind::Stripes {
            color_a,
            color_b,
            scale,
        } => {
            if ((uv.x * scale).floor() as i64).rem_euclid(2) == 0 {
                *color_a
            } else {
                *color_b
            }
        }
        TextureKind::ValueNoise {
            color_a,
            color_b,
            scale,
            seed,
        } => {
            let n = value_noise3(Vec3::new(uv.x * scale, uv.y * scale, 0.0), *seed);
            let t = (n * 0.5 + 0.5).clamp(0.0, 1.0);
            *color_a * (1.0 - t) + *color_b * t
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub texture: TextureKind,
    pub roughness: f64,
    pub metallic: f64,
    pub ior: f64,
    pub transmissive: bool,
    pub bump_amplitude: f64,
    pub bump_frequency: f64,
    pub emissive_strength: f64,
    pub emissive_color: Vec3,
}

impl Material {
    pub fn is_emissive(&self) -> bool {
        self.emissive_strength > 0.0
    }
}

fn random_color(stream: &mut RandomStream) -> Vec3 {
    Vec3::new(stream.next_f64(), stream.next_f64(), stream.next_f64())
}

fn random_texture(stream: &mut RandomStream, cfg: &GenConfig) -> TextureKind {
    let scale = stream.uniform(cfg.materials.texture_scale);
    match stream.uniform_index(4) {
        0 => TextureKind::Solid {
            color: random_color(stream),
        },
        1 => TextureKind::Checker {
            color_a: random_color(stream),
            color_b: random_color(stream),
            scale,
        },
        2 => TextureKind::Stripes {
            color_a: random_color(stream),
            color_b: random_color(stream),
            scale,
        },
        _ => TextureKind::ValueNoise {
            color_a: random_color(stream),
            color_b: random_color(stream),
            scale,
            seed: stream.next_u64(),
        },
    }
}

/// A fresh non-emissive, non-transmissive material with table-range scalars.
pub fn sample_base_material(stream: &mut RandomStream, cfg: &GenConfig) -> Material {
    Material {
        texture: random_texture(stream, cfg),
        roughness: stream.uniform(cfg.materials.roughness),
        metallic: stream.uniform(cfg.materials.metallic),
        ior: 1.5,
        transmissive: false,
        bump_amplitude: stream.uniform(cfg.materials.bump_amplitude),
        bump_frequency: stream.uniform(cfg.materials.bump_frequency),
        emissive_strength: 0.0,
        emissive_color: Vec3::ZERO,
    }
}

/// A specular re-roll used inside specular scenes.
fn sample_specular_material(stream: &mut RandomStream, cfg: &GenConfig) -> Material {
    let mut m = sample_base_material(stream, cfg);
    m.roughness = stream.uniform(cfg.materials.specular_roughness);
    m.metallic = stream.uniform(cfg.materials.specular_metallic);
    m
}

/// Glass: transmissive with a tabled IOR, never metallic, faint solid tint.
pub fn make_glass(stream: &mut RandomStream, cfg: &GenConfig) -> Material {
    let tint = Vec3::new(
        stream.uniform_in(0.8, 1.0),
        stream.uniform_in(0.8, 1.0),
        stream.uniform_in(0.8, 1.0),
    );
    Material {
        texture: TextureKind::Solid { color: tint },
        roughness: stream.uniform(cfg.materials.glass_roughness),
        metallic: 0.0,
        ior: stream.uniform(cfg.materials.glass_ior),
        transmissive: true,
        bump_amplitude: 0.0,
        bump_frequency: 1.0,
        emissive_strength: 0.0,
        emissive_color: Vec3::ZERO,
    }
}

/// Scene-level outcome flags of the randomization pass; these are recorded
/// in the scene spec and drive the dataset statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaterialFlags {
    pub modify_pass: bool,
    pub specular_scene: bool,
}

/// The scene-level material randomization pass. With the configured
/// probability the scene enters a modification pass that re-rolls each slot
/// independently; specular scenes draw their re-rolls from the specular
/// ranges. Only material fields change.
pub fn randomize_scene_materials(
    stream: &mut RandomStream,
    materials: &mut [Material],
    cfg: &GenConfig,
) -> MaterialFlags {
    let flags = MaterialFlags {
        modify_pass: stream.bernoulli(cfg.materials.modify_scene_prob),
        specular_scene: stream.bernoulli(cfg.materials.specular_scene_prob),
    };
    if !flags.modify_pass {
        return flags;
    }
    for slot in materials.iter_mut() {
        if !stream.bernoulli(cfg.materials.modify_slot_prob) {
            continue;
        }
        *slot = if flags.specular_scene {
            sample_specular_material(stream, cfg)
        } else {
            sample_base_material(stream, cfg)
        };
    }
    flags
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_stream, Seed};

    #[test]
    fn base_material_scalars_in_table_ranges() {
        let cfg = GenConfig::default();
        let mut stream = derive_stream(Seed::new(31, 0), "materials");
        let mut min_metal = f64::INFINITY;
        let mut max_metal = f64::NEG_INFINITY;
        for _ in 0..10_000 {
            let m = sample_base_material(&mut stream, &cfg);
            assert!((0.001..=0.2).contains(&m.roughness));
            assert!((0.001..=1.0).contains(&m.metallic));
            assert!(!m.transmissive && m.emissive_strength == 0.0);
            min_metal = min_metal.min(m.metallic);
            max_metal = max_metal.max(m.metallic);
        }
        // Metallic sweeps essentially the whole table range.
        assert!(max_metal - min_metal > 0.9 * (1.0 - 0.001));
    }

    #[test]
    fn solid_texture_is_constant() {
        let t = TextureKind::Solid {
            color: Vec3::new(1.0, 0.0, 0.0),
        };
        for uv in [Vec2::new(0.0, 0.0), Vec2::new(0.3, 0.9), Vec2::new(-2.0, 5.0)] {
            assert_eq!(evaluate_texture(&t, uv), Vec3::new(1.0, 0.0, 0.0));
        }
    }

    #[test]
    fn checker_alternates_by_cell_parity() {
        let black = Vec3::ZERO;
        let white = Vec3::ONE;
        let t = TextureKind::Checker {
            color_a: black,
            color_b: white,
            scale: 4.0,
        };
        let a = evaluate_texture(&t, Vec2::new(0.1, 0.1));
        let b = evaluate_texture(&t, Vec2::new(0.35, 0.1));
        assert_eq!(a, black);
        assert_eq!(b, white);
    }

    #[test]
    fn value_noise_texture_is_deterministic() {
        let t = TextureKind::ValueNoise {
            color_a: Vec3::ZERO,
            color_b: Vec3::ONE,
            scale: 3.0,
            seed: 17,
        };
        let uv = Vec2::new(0.42, 0.77);
        assert_eq!(evaluate_texture(&t, uv), evaluate_texture(&t, uv));
    }

    #[test]
    fn glass_ior_in_range_and_non_metallic() {
        let cfg = GenConfig::default();
        let mut stream = derive_stream(Seed::new(32, 0), "materials");
        for _ in 0..10_000 {
            let g = make_glass(&mut stream, &cfg);
            assert!((1.4..=1.6).contains(&g.ior));
            assert!((0.001..=0.1).contains(&g.roughness));
            assert!(g.transmissive);
            assert_eq!(g.metallic, 0.0);
            assert_eq!(g.emissive_strength, 0.0);
        }
    }

    #[test]
    fn randomization_pass_rates_match_tables() {
        let cfg = GenConfig::default();
        let mut stream = derive_stream(Seed::new(33, 0), "materials");
        let scenes = 1000;
        let mut modified = 0;
        let mut specular = 0;
        for _ in 0..scenes {
            let mut mats: Vec<Material> =
                (0..20).map(|_| sample_base_material(&mut stream, &cfg)).collect();
            let before = mats.clone();
            let flags = randomize_scene_materials(&mut stream, &mut mats, &cfg);
            if flags.modify_pass {
                modified += 1;
                if flags.specular_scene {
                    specular += 1;
                    for (a, b) in before.iter().zip(&mats) {
                        if a != b {
                            assert!((0.0..=0.05).contains(&b.roughness));
                            assert!((0.6..=1.0).contains(&b.metallic));
                        }
                    }
                }
            } else {
                assert_eq!(before, mats);
                if flags.specular_scene {
                    specular += 1;
                }
            }
        }
        let fm = modified as f64 / scenes as f64;
        let fs = specular as f64 / scenes as f64;
        assert!((fm - 0.5).abs() < 0.05, "modify rate {fm}");
        assert!((fs - 0.2).abs() < 0.04, "specular rate {fs}");
    }

    #[test]
    fn empty_slot_list_unchanged() {
        let cfg = GenConfig::default();
        let mut stream = derive_stream(Seed::new(34, 0), "materials");
        let mut mats: Vec<Material> = Vec::new();
        let _ = randomize_scene_materials(&mut stream, &mut mats, &cfg);
        assert!(mats.is_empty());
    }
}
