//! On-disk raster formats.
//!
//! Depth, point-map and mask files share one fixed 16-byte header:
//!
//! ```text
//! offset  size  field
//! 0       8     magic (b"SSYNDEP\0" / b"SSYNPTS\0" / b"SSYNMSK\0")
//! 8       4     width,  u32 little-endian
//! 12      4     height, u32 little-endian
//! ```
//!
//! followed by row-major payload:
//! - depth:  width*height  f32 LE (z-depth; +inf encodes a miss)
//! - points: width*height  3x f32 LE (world-frame x, y, z)
//! - mask:   width*height  u8 (0 or 1)
//!
//! RGB renders are ordinary 8-bit PNG files.

use crate::error::{Error, Result};
use crate::math::Vec3;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

pub const DEPTH_MAGIC: [u8; 8] = *b"SSYNDEP\0";
pub const POINTS_MAGIC: [u8; 8] = *b"SSYNPTS\0";
pub const MASK_MAGIC: [u8; 8] = *b"SSYNMSK\0";

fn format_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::RasterFormat {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

fn write_header<W: Write>(w: &mut W, magic: &[u8; 8], width: u32, height: u32) -> Result<()> {
    w.write_all(magic)?;
    w.write_all(&width.to_le_bytes())?;
    w.write_all(&height.to_le_bytes())?;
    Ok(())
}

fn read_header(r: &mut impl Read, magic: &[u8; 8], path: &Path) -> Result<(u32, u32)> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header)
        .map_err(|_| format_err(path, "short header"))?;
    if header[..8] != magic[..] {
        return Err(format_err(path, "bad magic"));
    }
    let width = u32::from_le_bytes(header[8..12].try_into().unwrap());
    let height = u32::from_le_bytes(header[12..16].try_into().unwrap());
    Ok((width, height))
}

pub fn write_depth(path: &Path, width: u32, height: u32, depth: &[f64]) -> Result<()> {
    debug_assert_eq!(depth.len(), (width * height) as usize);
    let mut w = BufWriter::new(File::create(path)?);
    write_header(&mut w, &DEPTH_MAGIC, width, height)?;
    let mut buf = Vec::with_capacity(depth.len() * 4);
    for &d in depth {
        buf.extend_from_slice(&(d as f32).to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_depth(path: &Path) -> Result<(u32, u32, Vec<f32>)> {
    let mut r = BufReader::new(File::open(path)?);
    let (width, height) = read_header(&mut r, &DEPTH_MAGIC, path)?;
    let n = (width as usize) * (height as usize);
    let mut buf = vec![0u8; n * 4];
    r.read_exact(&mut buf)
        .map_err(|_| format_err(path, "truncated payload"))?;
    let mut out = Vec::with_capacity(n);
    for c in buf.chunks_exact(4) {
        out.push(f32::from_le_bytes(c.try_into().unwrap()));
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(format_err(path, "trailing bytes"));
    }
    Ok((width, height, out))
}

pub fn write_points(path: &Path, width: u32, height: u32, points: &[Vec3], valid: &[bool]) -> Result<()> {
    debug_assert_eq!(points.len(), (width * height) as usize);
    let mut w = BufWriter::new(File::create(path)?);
    write_header(&mut w, &POINTS_MAGIC, width, height)?;
    let mut buf = Vec::with_capacity(points.len() * 12);
    for (p, &ok) in points.iter().zip(valid) {
        let p = if ok { *p } else { Vec3::ZERO };
        for c in [p.x, p.y, p.z] {
            buf.extend_from_slice(&(c as f32).to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_points(path: &Path) -> Result<(u32, u32, Vec<[f32; 3]>)> {
    let mut r = BufReader::new(File::open(path)?);
    let (width, height) = read_header(&mut r, &POINTS_MAGIC, path)?;
    let n = (width as usize) * (height as usize);
    let mut buf = vec![0u8; n * 12];
    r.read_exact(&mut buf)
        .map_err(|_| format_err(path, "truncated payload"))?;
    let mut out = Vec::with_capacity(n);
    for c in buf.chunks_exact(12) {
        out.push([
            f32::from_le_bytes(c[0..4].try_into().unwrap()),
            f32::from_le_bytes(c[4..8].try_into().unwrap()),
            f32::from_le_bytes(c[8..12].try_into().unwrap()),
        ]);
    }
    Ok((width, height, out))
}

pub fn write_mask(path: &Path, width: u32, height: u32, mask: &[bool]) -> Result<()> {
    debug_assert_eq!(mask.len(), (width * height) as usize);
    let mut w = BufWriter::new(File::create(path)?);
    write_header(&mut w, &MASK_MAGIC, width, height)?;
    let buf: Vec<u8> = mask.iter().map(|&b| b as u8).collect();
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_mask(path: &Path) -> Result<(u32, u32, Vec<bool>)> {
    let mut r = BufReader::new(File::open(path)?);
    let (width, height) = read_header(&mut r, &MASK_MAGIC, path)?;
    let n = (width as usize) * (height as usize);
    let mut buf = vec![0u8; n];
    r.read_exact(&mut buf)
        .map_err(|_| format_err(path, "truncated payload"))?;
    if buf.iter().any(|&b| b > 1) {
        return Err(format_err(path, "mask bytes must be 0 or 1"));
    }
    Ok((width, height, buf.into_iter().map(|b| b == 1).collect()))
}

/// Write a gamma-encoded [0,1] RGB raster as an 8-bit PNG.
pub fn write_png_rgb(path: &Path, width: u32, height: u32, rgb: &[f64]) -> Result<()> {
    debug_assert_eq!(rgb.len(), (width * height * 3) as usize);
    let file = File::create(path)?;
    let w = BufWriter::new(file);
    let mut encoder = png::Encoder::new(w, width, height);
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder
        .write_header()
        .map_err(|e| Error::Png(e.to_string()))?;
    let data: Vec<u8> = rgb
        .iter()
        .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect();
    writer
        .write_image_data(&data)
        .map_err(|e| Error::Png(e.to_string()))?;
    Ok(())
}

/// Decode a PNG written by [`write_png_rgb`]; returns (width, height, rgb8).
pub fn read_png_rgb(path: &Path) -> Result<(u32, u32, Vec<u8>)> {
    let decoder = png::Decoder::new(BufReader::new(File::open(path)?));
    let mut reader = decoder
        .read_info()
        .map_err(|e| format_err(path, format!("png: {e}")))?;
    let mut buf = vec![0u8; reader.output_buffer_size().unwrap_or(0)];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| format_err(path, format!("png: {e}")))?;
    if info.color_type != png::ColorType::Rgb || info.bit_depth != png::BitDepth::Eight {
        return Err(format_err(path, "expected 8-bit RGB png"));
    }
    buf.truncate(info.buffer_size());
    Ok((info.width, info.height, buf))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("scenesynth_raster_tests");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn depth_roundtrip_preserves_values_and_misses() {
        let p = tmp("d.depth");
        let depth = vec![1.5, 2.25, f64::INFINITY, 100.0, 0.125, 7.0];
        write_depth(&p, 3, 2, &depth).unwrap();
        let (w, h, back) = read_depth(&p).unwrap();
        assert_eq!((w, h), (3, 2));
        assert_eq!(back[0], 1.5);
        assert!(back[2].is_infinite());
        assert_eq!(back[4], 0.125);
    }

    #[test]
    fn truncated_depth_is_detected() {
        let p = tmp("trunc.depth");
        write_depth(&p, 4, 4, &vec![1.0; 16]).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        std::fs::write(&p, &bytes[..bytes.len() - 3]).unwrap();
        assert!(read_depth(&p).is_err());
    }

    #[test]
    fn wrong_magic_is_detected() {
        let p = tmp("magic.depth");
        write_mask(&p, 2, 2, &[true, false, true, true]).unwrap();
        assert!(read_depth(&p).is_err());
    }

    #[test]
    fn mask_and_points_roundtrip() {
        let pm = tmp("m.mask");
        write_mask(&pm, 2, 2, &[true, false, false, true]).unwrap();
        let (_, _, mask) = read_mask(&pm).unwrap();
        assert_eq!(mask, vec![true, false, false, true]);

        let pp = tmp("p.pts");
        let pts = vec![
            Vec3::new(1.0, 2.0, 3.0),
            Vec3::new(-4.0, 0.5, 9.0),
        ];
        write_points(&pp, 2, 1, &pts, &[true, false]).unwrap();
        let (_, _, back) = read_points(&pp).unwrap();
        assert_eq!(back[0], [1.0, 2.0, 3.0]);
        assert_eq!(back[1], [0.0, 0.0, 0.0]); // invalid pixels zeroed
    }

    #[test]
    fn png_roundtrip() {
        let p = tmp("t.png");
        let rgb = vec![0.0, 0.5, 1.0, 1.0, 0.25, 0.0];
        write_png_rgb(&p, 2, 1, &rgb).unwrap();
        let (w, h, data) = read_png_rgb(&p).unwrap();
        assert_eq!((w, h), (2, 1));
        assert_eq!(data[2], 255);
        assert_eq!(data[3], 255);
    }
}
