//! On-disk formats: FMAP feature containers, binary PGM label maps and
//! decoding of 8-bit raster images.
//!
//! FMAP layout (all little-endian): the magic `FMAP`, then `u32` version (1),
//! height, width and dim, then `height·width·dim` `f32` values, row-major and
//! channel-last.

use std::io::{Cursor, Read, Write};

use image::{DynamicImage, ImageReader};

use crate::features::FeatureMap;
use crate::{Error, Result};

pub const FMAP_MAGIC: &[u8; 4] = b"FMAP";
pub const FMAP_VERSION: u32 = 1;

pub fn write_fmap<W: Write>(fm: &FeatureMap, mut out: W) -> Result<()> {
    let mut buf = Vec::with_capacity(20 + 4 * fm.data.len());
    buf.extend_from_slice(FMAP_MAGIC);
    for v in [FMAP_VERSION, fm.height as u32, fm.width as u32, fm.dim as u32] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for &v in &fm.data {
        buf.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_fmap<R: Read>(mut input: R) -> Result<FeatureMap> {
    let mut header = [0u8; 20];
    input.read_exact(&mut header).map_err(|_| Error::format("FMAP: truncated header"))?;
    if &header[..4] != FMAP_MAGIC {
        return Err(Error::format("FMAP: bad magic bytes"));
    }
    let field = |i: usize| u32::from_le_bytes(header[4 + 4 * i..8 + 4 * i].try_into().unwrap());
    let version = field(0);
    if version != FMAP_VERSION {
        return Err(Error::format(format!("FMAP: unsupported version {version}")));
    }
    let (h, w, d) = (field(1) as usize, field(2) as usize, field(3) as usize);
    let count = h
        .checked_mul(w)
        .and_then(|x| x.checked_mul(d))
        .ok_or_else(|| Error::format("FMAP: dimensions overflow"))?;
    let mut body = Vec::new();
    input.read_to_end(&mut body)?;
    if body.len() != 4 * count {
        return Err(Error::format(format!(
            "FMAP: expected {} payload bytes for {h}x{w}x{d}, found {}",
            4 * count,
            body.len()
        )));
    }
    let data = body.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64).collect();
    FeatureMap::new(h, w, d, data).map_err(|e| Error::format(format!("FMAP: {e}")))
}

/// Decodes an 8-bit grayscale or RGB(A) raster (PNG or PNM) into a
/// three-channel feature map with values in [0, 255]. Gray is replicated to
/// all channels and alpha is dropped.
pub fn rgb_to_featuremap(bytes: &[u8]) -> Result<FeatureMap> {
    let img = ImageReader::new(Cursor::new(bytes))
        .with_guessed_format()?
        .decode()
        .map_err(|e| Error::format(format!("cannot decode image: {e}")))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data: Vec<f64> = match &img {
        DynamicImage::ImageLuma8(buf) => buf.pixels().flat_map(|p| [p[0] as f64; 3]).collect(),
        DynamicImage::ImageLumaA8(buf) => buf.pixels().flat_map(|p| [p[0] as f64; 3]).collect(),
        DynamicImage::ImageRgb8(buf) => buf.pixels().flat_map(|p| p.0.map(|v| v as f64)).collect(),
        DynamicImage::ImageRgba8(buf) => {
            buf.pixels().flat_map(|p| [p[0] as f64, p[1] as f64, p[2] as f64]).collect()
        }
        other => {
            return Err(Error::format(format!(
                "unsupported pixel format {:?}; expected 8-bit grayscale or RGB",
                other.color()
            )))
        }
    };
    FeatureMap::new(h, w, 3, data)
}

/// Writes an 8-bit binary PGM (P5, maxval 255).
pub fn write_pgm8<W: Write>(mut out: W, width: usize, height: usize, pixels: &[u8]) -> Result<()> {
    if pixels.len() != width * height {
        return Err(Error::Dimension { expected: width * height, got: pixels.len() });
    }
    write!(out, "P5\n{width} {height}\n255\n")?;
    out.write_all(pixels)?;
    Ok(())
}

/// Writes a 16-bit binary PGM (P5, maxval 65535, big-endian samples).
pub fn write_pgm16<W: Write>(mut out: W, width: usize, height: usize, pixels: &[u16]) -> Result<()> {
    if pixels.len() != width * height {
        return Err(Error::Dimension { expected: width * height, got: pixels.len() });
    }
    write!(out, "P5\n{width} {height}\n65535\n")?;
    let bytes: Vec<u8> = pixels.iter().flat_map(|v| v.to_be_bytes()).collect();
    out.write_all(&bytes)?;
    Ok(())
}

/// A grayscale label map read from PGM.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u32>,
}

/// Reads an 8- or 16-bit grayscale PGM as integer labels.
pub fn read_pgm_labels(bytes: &[u8]) -> Result<LabelMap> {
    let img = ImageReader::with_format(Cursor::new(bytes), image::ImageFormat::Pnm)
        .decode()
        .map_err(|e| Error::format(format!("cannot decode PGM: {e}")))?;
    let (width, height) = (img.width() as usize, img.height() as usize);
    let labels = match img {
        DynamicImage::ImageLuma8(buf) => buf.into_raw().into_iter().map(u32::from).collect(),
        DynamicImage::ImageLuma16(buf) => buf.into_raw().into_iter().map(u32::from).collect(),
        other => {
            return Err(Error::format(format!("label map must be grayscale PGM, got {:?}", other.color())))
        }
    };
    Ok(LabelMap { width, height, labels })
}
