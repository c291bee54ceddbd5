//! Image degradation operators: fading ink, pixel noise, and per-cell
//! vertical deformation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

use super::image::LineImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegradationKind {
    /// Multiply ink intensity by (1 - strength).
    Fade,
    /// Flip each pixel toward its opposite with probability strength.
    Noise,
    /// Shift each glyph cell vertically by a random offset up to
    /// round(strength * cell_height / 2).
    Deform,
}

impl DegradationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DegradationKind::Fade => "fade",
            DegradationKind::Noise => "noise",
            DegradationKind::Deform => "deform",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fade" => Ok(DegradationKind::Fade),
            "noise" => Ok(DegradationKind::Noise),
            "deform" => Ok(DegradationKind::Deform),
            other => Err(Error::invalid(format!("unknown degradation kind {other:?}"))),
        }
    }
}

/// One seeded degradation instance. Strength outside [0, 1] is rejected at
/// construction, so an instance is always applicable.
#[derive(Debug, Clone, PartialEq)]
pub struct Degradation {
    kind: DegradationKind,
    strength: f64,
    seed: u64,
}

impl Degradation {
    pub fn new(kind: DegradationKind, strength: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&strength) || strength.is_nan() {
            return Err(Error::invalid(format!(
                "degradation strength {strength} outside [0, 1]"
            )));
        }
        Ok(Degradation {
            kind,
            strength,
            seed,
        })
    }

    pub fn kind(&self) -> DegradationKind {
        self.kind
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn apply(&self, image: &mut LineImage, cell_width: usize, cell_height: usize) {
        match self.kind {
            DegradationKind::Fade => {
                let factor = (1.0 - self.strength) as f32;
                for v in &mut image.pixels {
                    *v *= factor;
                }
            }
            DegradationKind::Noise => {
                let mut rng = seed::rng(self.seed);
                for v in &mut image.pixels {
                    if rng.random::<f64>() < self.strength {
                        *v = 1.0 - *v;
                    }
                }
            }
            DegradationKind::Deform => {
                let mut rng = seed::rng(self.seed);
                let radius = (self.strength * cell_height as f64 / 2.0).round() as i64;
                let cells = image.width / cell_width;
                for cell in 0..cells {
                    let dy = if radius == 0 {
                        0
                    } else {
                        rng.random_range(-radius..=radius)
                    };
                    if dy != 0 {
                        shift_cell(image, cell, cell_width, dy);
                    }
                }
            }
        }
    }

    /// Compact text form, `kind:strength:seed`, used in manifests.
    pub fn descriptor(&self) -> String {
        format!("{}:{:.6}:{}", self.kind.as_str(), self.strength, self.seed)
    }

    pub fn from_descriptor(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::invalid(format!("bad degradation descriptor {s:?}")));
        }
        let kind = DegradationKind::parse(parts[0])?;
        let strength: f64 = parts[1]
            .parse()
            .map_err(|_| Error::invalid(format!("bad strength in {s:?}")))?;
        let seed: u64 = parts[2]
            .parse()
            .map_err(|_| Error::invalid(format!("bad seed in {s:?}")))?;
        Degradation::new(kind, strength, seed)
    }
}

fn shift_cell(image: &mut LineImage, cell: usize, cell_width: usize, dy: i64) {
    let x0 = cell * cell_width;
    let h = image.height as i64;
    for x in x0..x0 + cell_width {
        let column: Vec<f32> = (0..image.height).map(|y| image.get(y, x)).collect();
        for y in 0..h {
            let src = y - dy;
            let v = if (0..h).contains(&src) {
                column[src as usize]
            } else {
                0.0
            };
            image.set(y as usize, x, v);
        }
    }
}

/// Unseeded degradation recipe applied to a fraction of a split's lines.
/// Per-line seeds are derived when the corpus is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegradationProfile {
    pub ops: Vec<(DegradationKind, f64)>,
    /// Fraction of lines that receive the ops; the rest stay clean.
    pub fraction: f64,
}

impl DegradationProfile {
    pub fn clean() -> Self {
        DegradationProfile {
            ops: Vec::new(),
            fraction: 0.0,
        }
    }

    pub fn uniform(kind: DegradationKind, strength: f64) -> Self {
        DegradationProfile {
            ops: vec![(kind, strength)],
            fraction: 1.0,
        }
    }

    pub fn partial(kind: DegradationKind, strength: f64, fraction: f64) -> Self {
        DegradationProfile {
            ops: vec![(kind, strength)],
            fraction,
        }
    }

    pub fn is_clean(&self) -> bool {
        self.ops.is_empty() || self.fraction == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.fraction) {
            return Err(Error::invalid(format!(
                "degraded fraction {} outside [0, 1]",
                self.fraction
            )));
        }
        for &(kind, strength) in &self.ops {
            Degradation::new(kind, strength, 0)?;
        }
        Ok(())
    }

    /// Parse e.g. `noise:0.3`, `fade:0.5@0.5`, or `noise:0.2+fade:0.3@0.75`.
    /// An empty string or `none` is the clean profile.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "none" {
            return Ok(DegradationProfile::clean());
        }
        let (ops_part, fraction) = match s.split_once('@') {
            Some((ops, f)) => (
                ops,
                f.parse::<f64>()
                    .map_err(|_| Error::invalid(format!("bad fraction in {s:?}")))?,
            ),
            None => (s, 1.0),
        };
        let mut ops = Vec::new();
        for op in ops_part.split('+') {
            let (kind, strength) = op
                .split_once(':')
                .ok_or_else(|| Error::invalid(format!("bad degradation op {op:?}")))?;
            ops.push((
                DegradationKind::parse(kind)?,
                strength
                    .parse::<f64>()
                    .map_err(|_| Error::invalid(format!("bad strength in {op:?}")))?,
            ));
        }
        let profile = DegradationProfile { ops, fraction };
        profile.validate()?;
        Ok(profile)
    }

    pub fn render(&self) -> String {
        if self.is_clean() {
            return "none".into();
        }
        let ops: Vec<String> = self
            .ops
            .iter()
            .map(|(k, s)| format!("{}:{}", k.as_str(), s))
            .collect();
        format!("{}@{}", ops.join("+"), self.fraction)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strength_outside_unit_interval_is_rejected() {
        assert!(Degradation::new(DegradationKind::Fade, 1.2, 0).is_err());
        assert!(Degradation::new(DegradationKind::Noise, -0.1, 0).is_err());
        assert!(Degradation::new(DegradationKind::Noise, f64::NAN, 0).is_err());
        assert!(Degradation::new(DegradationKind::Deform, 1.0, 0).is_ok());
    }

    #[test]
    fn fade_scales_ink() {
        let mut img = LineImage::blank(4, 4);
        img.set(1, 1, 1.0);
        Degradation::new(DegradationKind::Fade, 0.25, 0)
            .unwrap()
            .apply(&mut img, 4, 4);
        assert!((img.get(1, 1) - 0.75).abs() < 1e-6);
        assert_eq!(img.get(0, 0), 0.0);
    }

    #[test]
    fn noise_flips_toward_opposite() {
        let mut img = LineImage::blank(4, 8);
        Degradation::new(DegradationKind::Noise, 1.0, 5)
            .unwrap()
            .apply(&mut img, 4, 4);
        // Strength 1 flips every pixel of a blank image to full ink.
        assert!(img.pixels.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn deform_shifts_whole_cells() {
        let mut img = LineImage::blank(6, 8);
        for x in 0..8 {
            img.set(2, x, 1.0);
        }
        let deg = Degradation::new(DegradationKind::Deform, 1.0, 3).unwrap();
        let mut a = img.clone();
        deg.apply(&mut a, 4, 6);
        let mut b = img.clone();
        deg.apply(&mut b, 4, 6);
        assert_eq!(a, b);
        // Each cell still holds at most one full row of ink.
        for cell in 0..2 {
            let rows_with_ink: Vec<usize> = (0..6)
                .filter(|&y| (0..4).any(|x| a.get(y, cell * 4 + x) > 0.0))
                .collect();
            assert!(rows_with_ink.len() <= 1);
        }
    }

    #[test]
    fn descriptor_round_trip() {
        let d = Degradation::new(DegradationKind::Noise, 0.3, 99).unwrap();
        assert_eq!(Degradation::from_descriptor(&d.descriptor()).unwrap(), d);
    }

    #[test]
    fn profile_parsing() {
        let p = DegradationProfile::parse("noise:0.3@0.5").unwrap();
        assert_eq!(p.ops, vec![(DegradationKind::Noise, 0.3)]);
        assert_eq!(p.fraction, 0.5);
        let p = DegradationProfile::parse("noise:0.2+fade:0.4").unwrap();
        assert_eq!(p.ops.len(), 2);
        assert_eq!(p.fraction, 1.0);
        assert!(DegradationProfile::parse("none").unwrap().is_clean());
        assert!(DegradationProfile::parse("blur:0.3").is_err());
        assert!(DegradationProfile::parse("noise:1.5").is_err());
    }
}
