//! Synthetic line-image corpora: bitmap glyph fonts, controlled
//! degradations, GT pools with train/eval/selection splits, and ingestion of
//! external OCR outputs.

mod degrade;
mod font;
mod image;
mod ingest;
mod store;
mod textgen;

pub use degrade::{Degradation, DegradationKind, DegradationProfile};
pub use font::{make_font, make_related_font, GlyphFont};
pub use image::LineImage;
pub use ingest::{ingest_external, IngestedVoters};
pub use store::{
    build_corpus, load_corpus, save_corpus, Corpus, PoolManifest, Split, SplitSpec, TextStream,
};
pub use textgen::TextSource;

use crate::error::{Error, Result};

/// Identifier of one text line in a corpus.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LineId(String);

impl LineId {
    pub fn new(id: impl Into<String>) -> Self {
        LineId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for LineId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Where a sample came from: the font plus the degradations baked into it.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub font: String,
    pub degradations: Vec<Degradation>,
}

/// One rendered text line with its ground truth.
///
/// The image is frame-synchronous: its width is `text length * cell_width`,
/// so cutting it into cell-wide columns yields exactly one cell per
/// character. The recognizer relies on this.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSample {
    pub line_id: LineId,
    pub text: String,
    pub image: LineImage,
    pub provenance: Provenance,
}

impl LineSample {
    pub fn render(
        line_id: LineId,
        text: &str,
        font: &GlyphFont,
        degradations: &[Degradation],
    ) -> Result<Self> {
        let image = render_line(text, font, degradations)?;
        Ok(LineSample {
            line_id,
            text: text.to_string(),
            image,
            provenance: Provenance {
                font: font.name.clone(),
                degradations: degradations.to_vec(),
            },
        })
    }

    pub fn char_count(&self) -> usize {
        self.text.chars().count()
    }
}

/// Render `text` by concatenating the font's glyph cells, then apply the
/// degradations in list order. Deterministic: all randomness comes from the
/// seeds carried by the degradations themselves. Pixel values are snapped to
/// the 8-bit grid at the end so a disk round trip is the identity.
pub fn render_line(text: &str, font: &GlyphFont, degradations: &[Degradation]) -> Result<LineImage> {
    let chars: Vec<char> = text.chars().collect();
    if chars.is_empty() {
        return Err(Error::invalid("cannot render an empty line"));
    }
    let (cw, ch) = (font.cell_width, font.cell_height);
    let mut image = LineImage::blank(ch, cw * chars.len());
    for (cell, &c) in chars.iter().enumerate() {
        let glyph = font
            .glyph(c)
            .ok_or_else(|| Error::invalid(format!("character {c:?} missing from font {}", font.name)))?;
        for y in 0..ch {
            for x in 0..cw {
                if glyph[y * cw + x] != 0 {
                    image.set(y, cell * cw + x, 1.0);
                }
            }
        }
    }
    for deg in degradations {
        deg.apply(&mut image, cw, ch);
    }
    image.quantize();
    Ok(image)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_font() -> GlyphFont {
        make_font("f", "ab", 5, 6, 11).unwrap()
    }

    #[test]
    fn clean_render_concatenates_glyphs() {
        let font = test_font();
        let img = render_line("ab", &font, &[]).unwrap();
        assert_eq!(img.width, 2 * font.cell_width);
        assert_eq!(img.height, font.cell_height);
        let a = font.glyph('a').unwrap();
        let b = font.glyph('b').unwrap();
        for y in 0..font.cell_height {
            for x in 0..font.cell_width {
                assert_eq!(img.get(y, x), f32::from(a[y * font.cell_width + x]));
                let bx = font.cell_width + x;
                assert_eq!(img.get(y, bx), f32::from(b[y * font.cell_width + x]));
            }
        }
    }

    #[test]
    fn full_fade_blanks_the_image() {
        let font = test_font();
        let deg = Degradation::new(DegradationKind::Fade, 1.0, 0).unwrap();
        let img = render_line("ab", &font, &[deg]).unwrap();
        assert!(img.pixels.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn seeded_noise_is_reproducible() {
        let font = make_font("f", "abc", 5, 6, 11).unwrap();
        let deg = Degradation::new(DegradationKind::Noise, 0.1, 7).unwrap();
        let a = render_line("abc", &font, &[deg.clone()]).unwrap();
        let b = render_line("abc", &font, &[deg]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn missing_character_names_the_culprit() {
        let font = test_font();
        let err = render_line("ax", &font, &[]).unwrap_err().to_string();
        assert!(err.contains("'x'"), "{err}");
    }

    #[test]
    fn zero_strength_degradations_are_identity() {
        let font = test_font();
        let clean = render_line("ab", &font, &[]).unwrap();
        for kind in [
            DegradationKind::Fade,
            DegradationKind::Noise,
            DegradationKind::Deform,
        ] {
            let deg = Degradation::new(kind, 0.0, 3).unwrap();
            let img = render_line("ab", &font, &[deg]).unwrap();
            assert_eq!(img, clean, "{kind:?}");
        }
    }

    #[test]
    fn frame_synchronism_holds() {
        let font = test_font();
        let sample = LineSample::render(LineId::new("t-0"), "abba", &font, &[]).unwrap();
        assert_eq!(sample.image.width % font.cell_width, 0);
        assert_eq!(sample.image.width / font.cell_width, sample.char_count());
    }
}
