//! Command-line front end. The binary is a thin shell over the library:
//! `gen` drives `dataset::generate_dataset`, `validate` and `stats` read a
//! generated directory back, `dump-default-config` prints the built-in
//! table defaults and `preview` renders a single scene's views.
//!
//! Exit codes: 0 success, 1 configuration error, 2 validation failure over
//! budget.

use crate::config::GenConfig;
use crate::dataset;
use crate::error::Result;
use crate::mesh;
use crate::rng::Seed;
use crate::scene::{generate_built_scene, render_view_export};
use clap::{Parser, Subcommand};
use std::path::PathBuf;

/// Fraction of scenes that must validate for a batch to succeed.
const VALIDATION_BUDGET: f64 = 0.98;

pub const WORKERS_ENV: &str = "SCENESYNTH_WORKERS";

#[derive(Parser)]
#[command(name = "scenesynth", version, about = "Procedural non-semantic 3D scene dataset generator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset of scenes with rendered views.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long)]
        out: PathBuf,
        /// TOML config; defaults to the built-in table values.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Worker threads; the SCENESYNTH_WORKERS env var overrides this.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Square render resolution override.
        #[arg(long)]
        resolution: Option<u32>,
    },
    /// Re-check every scene package in a generated dataset.
    Validate {
        #[arg(long)]
        dir: PathBuf,
        /// Config override; defaults to the dataset's config.toml.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Aggregate dataset statistics (presence rates, ranges, throughput).
    Stats {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also write the machine-readable report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print the default configuration as TOML.
    DumpDefaultConfig {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate one scene and render its views for inspection.
    Preview {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        scene_index: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        resolution: Option<u32>,
        /// Render only the first N views.
        #[arg(long)]
        views: Option<usize>,
        /// Also export the scene geometry as a Wavefront OBJ.
        #[arg(long, default_value_t = false)]
        obj: bool,
    },
}

fn load_config(explicit: Option<&PathBuf>, dataset_dir: Option<&PathBuf>) -> Result<GenConfig> {
    if let Some(path) = explicit {
        return GenConfig::load(path);
    }
    if let Some(dir) = dataset_dir {
        let candidate = dir.join("config.toml");
        if candidate.exists() {
            return GenConfig::load(&candidate);
        }
    }
    Ok(GenConfig::default())
}

fn effective_workers(flag: usize) -> usize {
    if let Ok(value) = std::env::var(WORKERS_ENV) {
        if let Ok(n) = value.parse::<usize>() {
            if n > 0 {
                return n;
            }
        }
    }
    if flag > 0 {
        flag
    } else {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    }
}

fn run_gen(
    seed: u64,
    count: u64,
    out: &PathBuf,
    config: Option<&PathBuf>,
    workers: usize,
    resolution: Option<u32>,
) -> Result<i32> {
    let mut cfg = load_config(config, None)?;
    if let Some(res) = resolution {
        cfg.cameras.width = res;
        cfg.cameras.height = res;
    }
    cfg.validate()?;
    let workers = effective_workers(workers);
    let start = std::time::Instant::now();
    let manifest = dataset::generate_dataset(seed, count, workers, out, &cfg)?;
    let ok = manifest.ok_count();
    let elapsed = start.elapsed().as_secs_f64();
    println!(
        "generated {ok}/{count} scenes in {elapsed:.1}s ({workers} workers) -> {}",
        out.display()
    );
    for e in manifest.entries.iter().filter(|e| e.status == dataset::SceneStatus::Failed) {
        eprintln!("scene {} failed: {}", e.scene_id, e.error.as_deref().unwrap_or("unknown"));
    }
    if count > 0 && (ok as f64) < VALIDATION_BUDGET * count as f64 {
        eprintln!("failure budget exceeded: {ok}/{count} validated");
        return Ok(2);
    }
    Ok(0)
}

fn run_validate(dir: &PathBuf, config: Option<&PathBuf>) -> Result<i32> {
    let cfg = load_config(config, Some(dir))?;
    let reports = dataset::validate_dataset(dir, &cfg)?;
    let mut passed = 0usize;
    for r in &reports {
        if r.passed() {
            passed += 1;
        } else {
            for c in r.checks.iter().filter(|c| !c.passed) {
                eprintln!(
                    "scene {}: {} FAILED{}",
                    r.scene_id,
                    c.name,
                    c.detail.as_deref().map(|d| format!(" ({d})")).unwrap_or_default()
                );
            }
        }
    }
    println!("validated {passed}/{} scenes", reports.len());
    if !reports.is_empty() && (passed as f64) < VALIDATION_BUDGET * reports.len() as f64 {
        return Ok(2);
    }
    Ok(0)
}

fn run_stats(dir: &PathBuf, config: Option<&PathBuf>, json: Option<&PathBuf>) -> Result<i32> {
    let cfg = load_config(config, Some(dir))?;
    let stats = dataset::compute_stats(dir, &cfg)?;
    let text = serde_json::to_string_pretty(&stats)?;
    println!("{text}");
    if let Some(path) = json {
        std::fs::write(path, text)?;
    }
    Ok(0)
}

fn run_preview(
    seed: u64,
    scene_index: u64,
    out: &PathBuf,
    config: Option<&PathBuf>,
    resolution: Option<u32>,
    views: Option<usize>,
    obj: bool,
) -> Result<i32> {
    let mut cfg = load_config(config, None)?;
    if let Some(res) = resolution {
        cfg.cameras.width = res;
        cfg.cameras.height = res;
    }
    cfg.validate()?;
    let built = generate_built_scene(Seed::new(seed, scene_index), &cfg)?;
    std::fs::create_dir_all(out)?;
    let n = views
        .unwrap_or(built.spec.cameras.cameras.len())
        .min(built.spec.cameras.cameras.len());
    for i in 0..n {
        let view = render_view_export(&built, i, &cfg)?;
        let base = out.join(format!("{i:02}"));
        crate::raster_io::write_png_rgb(&base.with_extension("png"), view.width, view.height, &view.rgb)?;
        crate::raster_io::write_depth(&base.with_extension("depth"), view.width, view.height, &view.depth)?;
        crate::raster_io::write_points(
            &base.with_extension("pts"),
            view.width,
            view.height,
            &view.points.points,
            &view.points.valid,
        )?;
        crate::raster_io::write_mask(&base.with_extension("mask"), view.width, view.height, &view.mask.mask)?;
    }
    if obj {
        let bare: Vec<mesh::TriMesh> = built.meshes.iter().map(|m| m.mesh.clone()).collect();
        let file = std::fs::File::create(out.join("scene.obj"))?;
        mesh::write_obj(std::io::BufWriter::new(file), &bare)?;
    }
    println!(
        "previewed scene ({seed},{scene_index}): {n} views, {} triangles -> {}",
        built.triangle_count(),
        out.display()
    );
    Ok(0)
}

/// Entry point for the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen {
            seed,
            count,
            out,
            config,
            workers,
            resolution,
        } => run_gen(*seed, *count, out, config.as_ref(), *workers, *resolution),
        Command::Validate { dir, config } => run_validate(dir, config.as_ref()),
        Command::Stats { dir, config, json } => run_stats(dir, config.as_ref(), json.as_ref()),
        Command::DumpDefaultConfig { out } => (|| {
            let text = GenConfig::default().to_toml()?;
            match out {
                Some(path) => std::fs::write(path, &text)?,
                None => print!("{text}"),
            }
            Ok(0)
        })(),
        Command::Preview {
            seed,
            scene_index,
            out,
            config,
            resolution,
            views,
            obj,
        } => run_preview(
            *seed,
            *scene_index,
            out,
            config.as_ref(),
            *resolution,
            *views,
            *obj,
        ),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                crate::Error::Config(_) | crate::Error::TomlParse(_) => 1,
                _ => 1,
            }
        }
    }
}
