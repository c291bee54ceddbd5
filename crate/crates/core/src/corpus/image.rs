//! Grey-level line images and their portable greymap serialization.
//!
//! Values are ink intensities in [0, 1]: 0 is blank background, 1 is full
//! ink. On disk they are ASCII PGM (P2) files with maxval 255, inspectable
//! without tooling; in memory they are kept snapped to the same 8-bit grid.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LineImage {
    pub height: usize,
    pub width: usize,
    /// Row-major, `height * width` entries in [0, 1].
    pub pixels: Vec<f32>,
}

impl LineImage {
    pub fn blank(height: usize, width: usize) -> Self {
        LineImage {
            height,
            width,
            pixels: vec![0.0; height * width],
        }
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> f32 {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, y: usize, x: usize, v: f32) {
        self.pixels[y * self.width + x] = v;
    }

    /// Snap every pixel to the 8-bit grid (and clamp into [0, 1]).
    pub fn quantize(&mut self) {
        for v in &mut self.pixels {
            let q = (v.clamp(0.0, 1.0) * 255.0).round();
            *v = q / 255.0;
        }
    }

    /// Flattened cell `index` (a `cell_width`-wide column block) as an f64
    /// feature frame, row-major.
    pub fn frame(&self, index: usize, cell_width: usize) -> Vec<f64> {
        let x0 = index * cell_width;
        let mut out = Vec::with_capacity(self.height * cell_width);
        for y in 0..self.height {
            for x in x0..x0 + cell_width {
                out.push(self.get(y, x) as f64);
            }
        }
        out
    }

    pub fn write_pgm(&self, path: &Path) -> Result<()> {
        let mut out = String::with_capacity(self.pixels.len() * 4 + 32);
        out.push_str("P2\n");
        out.push_str(&format!("{} {}\n255\n", self.width, self.height));
        for y in 0..self.height {
            let row: Vec<String> = (0..self.width)
                .map(|x| ((self.get(y, x) * 255.0).round() as u32).to_string())
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn read_pgm(path: &Path) -> Result<LineImage> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut tokens = content.split_ascii_whitespace();
        let magic = tokens.next().unwrap_or("");
        if magic != "P2" {
            return Err(Error::malformed(path, 1, format!("not an ASCII PGM: {magic:?}")));
        }
        let mut dims = [0usize; 3];
        for d in &mut dims {
            *d = tokens
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::malformed(path, 1, "bad PGM header"))?;
        }
        let (width, height, maxval) = (dims[0], dims[1], dims[2]);
        if maxval != 255 {
            return Err(Error::malformed(path, 2, format!("unsupported maxval {maxval}")));
        }
        let mut pixels = Vec::with_capacity(width * height);
        for token in tokens {
            let v: u32 = token
                .parse()
                .map_err(|_| Error::malformed(path, 0, format!("bad pixel {token:?}")))?;
            if v > 255 {
                return Err(Error::malformed(path, 0, format!("pixel {v} above maxval")));
            }
            pixels.push(v as f32 / 255.0);
        }
        if pixels.len() != width * height {
            return Err(Error::malformed(
                path,
                0,
                format!("expected {} pixels, found {}", width * height, pixels.len()),
            ));
        }
        Ok(LineImage {
            height,
            width,
            pixels,
        })
    }
}
