//! Deterministic procedural synthesizer for non-semantic 3D scenes.
//!
//! The generator builds room-like scenes out of shape primitives — a floor
//! plan of category-tagged boxes, composed cube/sphere/cylinder/cone
//! geometry with height-field detail, wireframes and thin sticks, randomized
//! procedural materials, a lighting rig with carved windows, and a
//! constrained camera set — then renders per-view RGB, z-depth, world-space
//! point maps and validity masks with a CPU ray tracer.
//!
//! Everything is a pure function of `(GenConfig, Seed)`: the same inputs
//! reproduce every scene bit-for-bit, regardless of worker count.
//!
//! See the `examples/` directory for one runnable program per capability,
//! and the `scenesynth` binary for dataset-scale generation.

#![forbid(unsafe_code)]

pub mod bvh;
pub mod camera;
pub mod cli;
pub mod compose;
pub mod dataset;
pub mod config;
pub mod error;
pub mod floorplan;
pub mod gt;
pub mod heightfield;
pub mod lighting;
pub mod material;
pub mod math;
pub mod mesh;
pub mod primitives;
pub mod raster_io;
pub mod render;
pub mod rng;
pub mod scene;
pub mod wireframe;

pub use config::{Categorical, CountRange, GenConfig, Range};
pub use error::Error;
pub use rng::{derive_stream, RandomStream, Seed};
pub use scene::{generate_built_scene, BuiltScene, SceneSpec};

/// Version string stamped into every scene package.
pub const GENERATOR_VERSION: &str = env!("CARGO_PKG_VERSION");
