//! Bitmap glyph fonts.
//!
//! Glyphs are binary bitmaps built from a small pool of shared stem shapes
//! plus a per-glyph pixel delta, so sibling glyphs are genuinely confusable
//! under degradation (the way narrow historical typefaces are) instead of
//! being maximally distinct random patterns. The space character always
//! renders blank.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::seed;

pub const SPACE: char = ' ';

/// Glyphs per stem family; controls how confusable the font is.
const GLYPHS_PER_STEM: usize = 3;
/// Fraction of cell pixels carrying ink in a stem.
const INK_DENSITY: f64 = 0.45;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlyphFont {
    pub name: String,
    pub cell_width: usize,
    pub cell_height: usize,
    /// Binary bitmaps of `cell_width * cell_height` entries each.
    pub glyphs: BTreeMap<char, Vec<u8>>,
    /// Generation seed, recorded for provenance.
    pub seed: u64,
}

impl GlyphFont {
    pub fn glyph(&self, c: char) -> Option<&[u8]> {
        self.glyphs.get(&c).map(|g| g.as_slice())
    }

    pub fn contains(&self, c: char) -> bool {
        self.glyphs.contains_key(&c)
    }

    pub fn charset(&self) -> impl Iterator<Item = char> + '_ {
        self.glyphs.keys().copied()
    }

    pub fn cells(&self) -> usize {
        self.cell_width * self.cell_height
    }

    /// Number of characters whose bitmaps differ between two same-shape fonts.
    pub fn differing_glyphs(&self, other: &GlyphFont) -> usize {
        self.glyphs
            .iter()
            .filter(|(c, bitmap)| other.glyphs.get(c).map(|b| b != *bitmap).unwrap_or(true))
            .count()
    }
}

fn validate_charset(charset: &str) -> Result<Vec<char>> {
    let chars: Vec<char> = charset.chars().collect();
    if chars.is_empty() {
        return Err(Error::invalid("font charset is empty"));
    }
    let mut seen = std::collections::HashSet::new();
    for &c in &chars {
        if c == '\n' || c == '\r' || c == '\t' {
            return Err(Error::invalid("font charset may not contain control characters"));
        }
        if !seen.insert(c) {
            return Err(Error::invalid(format!("duplicate character {c:?} in charset")));
        }
    }
    Ok(chars)
}

fn random_stem(cells: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
    (0..cells)
        .map(|_| u8::from(rng.random::<f64>() < INK_DENSITY))
        .collect()
}

/// Perturb a stem by flipping `flips` distinct pixels.
fn perturb(stem: &[u8], flips: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let mut positions: Vec<usize> = (0..stem.len()).collect();
    positions.shuffle(rng);
    let mut glyph = stem.to_vec();
    for &p in positions.iter().take(flips) {
        glyph[p] ^= 1;
    }
    glyph
}

fn build_glyphs(
    chars: &[char],
    cw: usize,
    ch: usize,
    rng: &mut ChaCha8Rng,
    keep: &BTreeMap<char, Vec<u8>>,
) -> BTreeMap<char, Vec<u8>> {
    let cells = cw * ch;
    let flips = (cells / 8).max(2);
    let non_space: Vec<char> = chars.iter().copied().filter(|&c| c != SPACE).collect();
    let n_stems = non_space.len().div_ceil(GLYPHS_PER_STEM).max(1);
    let stems: Vec<Vec<u8>> = (0..n_stems).map(|_| random_stem(cells, rng)).collect();

    let mut glyphs: BTreeMap<char, Vec<u8>> = keep.clone();
    glyphs.insert(SPACE, vec![0u8; cells]);
    for (i, &c) in non_space.iter().enumerate() {
        if glyphs.contains_key(&c) {
            continue;
        }
        let stem = &stems[i % n_stems];
        // Re-draw until the bitmap is non-blank and unique within the font.
        let bitmap = loop {
            let candidate = perturb(stem, flips, rng);
            let blank = candidate.iter().all(|&b| b == 0);
            let clash = glyphs.values().any(|g| *g == candidate);
            if !blank && !clash {
                break candidate;
            }
        };
        glyphs.insert(c, bitmap);
    }
    glyphs
}

/// Generate a font deterministically from a seed. Distinct characters get
/// distinct bitmaps; the space character (added if absent) renders blank.
pub fn make_font(
    name: &str,
    charset: &str,
    cell_width: usize,
    cell_height: usize,
    font_seed: u64,
) -> Result<GlyphFont> {
    if cell_width < 4 || cell_height < 4 {
        return Err(Error::invalid(format!(
            "cell {cell_width}x{cell_height} below the 4x4 minimum"
        )));
    }
    let chars = validate_charset(charset)?;
    let mut rng = seed::rng(seed::derive_labeled(font_seed, "font", 0));
    let glyphs = build_glyphs(&chars, cell_width, cell_height, &mut rng, &BTreeMap::new());
    Ok(GlyphFont {
        name: name.to_string(),
        cell_width,
        cell_height,
        glyphs,
        seed: font_seed,
    })
}

/// Derive a font that shares a controlled fraction of the base font's glyph
/// bitmaps and regenerates the rest. `overlap` 1.0 copies every glyph,
/// 0.0 shares none.
pub fn make_related_font(
    base: &GlyphFont,
    name: &str,
    overlap: f64,
    font_seed: u64,
) -> Result<GlyphFont> {
    if !(0.0..=1.0).contains(&overlap) {
        return Err(Error::invalid(format!("overlap {overlap} outside [0, 1]")));
    }
    let mut rng = seed::rng(seed::derive_labeled(font_seed, "font-related", 0));
    let mut non_space: Vec<char> = base.charset().filter(|&c| c != SPACE).collect();
    non_space.shuffle(&mut rng);
    let n_shared = (overlap * non_space.len() as f64).round() as usize;
    let keep: BTreeMap<char, Vec<u8>> = non_space
        .iter()
        .take(n_shared)
        .map(|&c| (c, base.glyphs[&c].clone()))
        .collect();
    let chars: Vec<char> = base.charset().collect();
    let glyphs = build_glyphs(&chars, base.cell_width, base.cell_height, &mut rng, &keep);
    Ok(GlyphFont {
        name: name.to_string(),
        cell_width: base.cell_width,
        cell_height: base.cell_height,
        glyphs,
        seed: font_seed,
    })
}

pub fn save_font(font: &GlyphFont, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str("glyphfont v1\n");
    out.push_str(&format!("name {}\n", font.name));
    out.push_str(&format!("cell {} {}\n", font.cell_width, font.cell_height));
    out.push_str(&format!("seed {}\n", font.seed));
    out.push_str(&format!("glyphs {}\n", font.glyphs.len()));
    for (c, bitmap) in &font.glyphs {
        out.push_str(&format!("glyph {c}\n"));
        for y in 0..font.cell_height {
            for x in 0..font.cell_width {
                out.push(if bitmap[y * font.cell_width + x] != 0 { '#' } else { '.' });
            }
            out.push('\n');
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn load_font(path: &Path) -> Result<GlyphFont> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = content.lines().enumerate();
    let mut next = |expect: &str| -> Result<(usize, String)> {
        let (i, line) = lines
            .next()
            .ok_or_else(|| Error::malformed(path, 0, "unexpected end of font file"))?;
        line.strip_prefix(expect)
            .map(|r| (i + 1, r.trim_start().to_string()))
            .ok_or_else(|| Error::malformed(path, i + 1, format!("expected `{expect}`")))
    };
    let (_, version) = next("glyphfont")?;
    if version != "v1" {
        return Err(Error::malformed(path, 1, format!("unsupported version {version:?}")));
    }
    let (_, name) = next("name")?;
    let (ln, cell) = next("cell")?;
    let dims: Vec<usize> = cell.split(' ').filter_map(|t| t.parse().ok()).collect();
    if dims.len() != 2 {
        return Err(Error::malformed(path, ln, "bad cell dimensions"));
    }
    let (cw, ch) = (dims[0], dims[1]);
    let (ln, seed_field) = next("seed")?;
    let font_seed: u64 = seed_field
        .parse()
        .map_err(|_| Error::malformed(path, ln, "bad seed"))?;
    let (ln, count_field) = next("glyphs")?;
    let count: usize = count_field
        .parse()
        .map_err(|_| Error::malformed(path, ln, "bad glyph count"))?;

    let mut glyphs = BTreeMap::new();
    for _ in 0..count {
        let (i, line) = lines
            .next()
            .ok_or_else(|| Error::malformed(path, 0, "missing glyph header"))?;
        let rest = line
            .strip_prefix("glyph ")
            .ok_or_else(|| Error::malformed(path, i + 1, "expected `glyph <char>`"))?;
        let mut it = rest.chars();
        let c = match (it.next(), it.next()) {
            (Some(c), None) => c,
            // `glyph ` followed by nothing is the space character.
            (None, _) if rest.is_empty() => SPACE,
            _ => return Err(Error::malformed(path, i + 1, "glyph header is not a single character")),
        };
        let mut bitmap = Vec::with_capacity(cw * ch);
        for _ in 0..ch {
            let (j, row) = lines
                .next()
                .ok_or_else(|| Error::malformed(path, 0, "truncated glyph bitmap"))?;
            if row.chars().count() != cw {
                return Err(Error::malformed(path, j + 1, "bitmap row width mismatch"));
            }
            for p in row.chars() {
                match p {
                    '#' => bitmap.push(1),
                    '.' => bitmap.push(0),
                    _ => return Err(Error::malformed(path, j + 1, format!("bad bitmap pixel {p:?}"))),
                }
            }
        }
        glyphs.insert(c, bitmap);
    }
    Ok(GlyphFont {
        name,
        cell_width: cw,
        cell_height: ch,
        glyphs,
        seed: font_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn same_inputs_give_bit_identical_fonts() {
        let a = make_font("f", "abc", 5, 6, 42).unwrap();
        let b = make_font("f", "abc", 5, 6, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ_on_most_glyphs() {
        let charset: String = ('a'..='z').collect();
        let a = make_font("f", &charset, 6, 8, 1).unwrap();
        let b = make_font("f", &charset, 6, 8, 2).unwrap();
        assert!(a.differing_glyphs(&b) >= 13, "{}", a.differing_glyphs(&b));
    }

    #[test]
    fn duplicate_charset_is_rejected() {
        assert!(make_font("f", "aa", 5, 6, 1).is_err());
        assert!(make_font("f", "", 5, 6, 1).is_err());
        assert!(make_font("f", "ab", 3, 6, 1).is_err());
    }

    #[test]
    fn space_renders_blank_and_is_always_present() {
        let font = make_font("f", "ab", 5, 6, 1).unwrap();
        assert!(font.contains(SPACE));
        assert!(font.glyph(SPACE).unwrap().iter().all(|&b| b == 0));
    }

    #[test]
    fn glyphs_are_pairwise_distinct() {
        let charset: String = ('a'..='z').collect();
        let font = make_font("f", &charset, 5, 6, 3).unwrap();
        let bitmaps: Vec<&Vec<u8>> = font.glyphs.values().collect();
        for i in 0..bitmaps.len() {
            for j in i + 1..bitmaps.len() {
                assert_ne!(bitmaps[i], bitmaps[j]);
            }
        }
    }

    #[test]
    fn related_font_shares_the_requested_fraction() {
        let charset: String = ('a'..='z').collect();
        let base = make_font("base", &charset, 6, 8, 5).unwrap();
        let related = make_related_font(&base, "rel", 0.75, 6).unwrap();
        // 26 non-space glyphs; round(0.75 * 26) = 20 shared, 6 regenerated.
        assert_eq!(related.differing_glyphs(&base), 6);
        let unrelated = make_related_font(&base, "far", 0.0, 7).unwrap();
        assert!(unrelated.differing_glyphs(&base) >= 25);
    }

    #[test]
    fn font_file_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("font.txt");
        let font = make_font("f", "ab c", 5, 6, 9).unwrap();
        save_font(&font, &path).unwrap();
        assert_eq!(load_font(&path).unwrap(), font);
    }
}
