//! Corpus building and on-disk layout.
//!
//! A corpus directory holds `manifest.txt`, `font.txt`, one PGM per line
//! under `images/`, and per-split GT text files under `gt/`. The manifest is
//! authoritative; the GT files mirror it one line per text line.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::seed;

use super::degrade::{Degradation, DegradationProfile};
use super::font::{load_font, save_font, GlyphFont};
use super::image::LineImage;
use super::textgen::TextSource;
use super::{LineId, LineSample, Provenance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Split {
    Training,
    Evaluation,
    ActiveLearning,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Training, Split::Evaluation, Split::ActiveLearning];

    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Training => "training",
            Split::Evaluation => "evaluation",
            Split::ActiveLearning => "active_learning",
        }
    }

    /// Short prefix used in line ids.
    fn id_prefix(&self) -> &'static str {
        match self {
            Split::Training => "train",
            Split::Evaluation => "eval",
            Split::ActiveLearning => "pool",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "training" => Ok(Split::Training),
            "evaluation" => Ok(Split::Evaluation),
            "active_learning" => Ok(Split::ActiveLearning),
            other => Err(Error::invalid(format!("unknown split {other:?}"))),
        }
    }
}

/// How many lines a split gets and how they are degraded.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpec {
    pub count: usize,
    pub profile: DegradationProfile,
}

impl SplitSpec {
    pub fn clean(count: usize) -> Self {
        SplitSpec {
            count,
            profile: DegradationProfile::clean(),
        }
    }

    pub fn degraded(count: usize, profile: DegradationProfile) -> Self {
        SplitSpec { count, profile }
    }
}

/// Line ids per split. The splits are pairwise disjoint and together cover
/// every line of the corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolManifest {
    pub corpus_id: String,
    pub splits: BTreeMap<Split, Vec<LineId>>,
}

impl PoolManifest {
    pub fn split_ids(&self, split: Split) -> &[LineId] {
        self.splits.get(&split).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn all_ids(&self) -> impl Iterator<Item = &LineId> {
        Split::ALL
            .iter()
            .flat_map(|s| self.split_ids(*s).iter())
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for split in Split::ALL {
            for id in self.split_ids(split) {
                if !seen.insert(id.clone()) {
                    return Err(Error::invalid(format!(
                        "line {id} appears in more than one split"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Where line texts come from: a seeded generator or a fixed list, which can
/// run out.
pub enum TextStream<'a> {
    Random(&'a TextSource),
    Fixed(&'a [String]),
}

impl TextStream<'_> {
    fn line(&self, global_index: usize, line_seed: u64) -> Option<String> {
        match self {
            TextStream::Random(src) => Some(src.line(&mut seed::rng(line_seed))),
            TextStream::Fixed(lines) => lines.get(global_index).cloned(),
        }
    }
}

/// A fully materialized corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub manifest: PoolManifest,
    pub font: GlyphFont,
    pub lines: BTreeMap<LineId, LineSample>,
}

impl Corpus {
    pub fn line(&self, id: &LineId) -> Option<&LineSample> {
        self.lines.get(id)
    }

    /// Samples of one split, in manifest order.
    pub fn split_samples(&self, split: Split) -> Vec<&LineSample> {
        self.manifest
            .split_ids(split)
            .iter()
            .map(|id| &self.lines[id])
            .collect()
    }

    /// Clone the samples behind a set of ids, in the given order.
    pub fn samples_for(&self, ids: &[LineId]) -> Result<Vec<LineSample>> {
        ids.iter()
            .map(|id| {
                self.lines
                    .get(id)
                    .cloned()
                    .ok_or_else(|| Error::invalid(format!("unknown line id {id}")))
            })
            .collect()
    }
}

/// Which lines of a split get the degradation ops: an exact seeded choice of
/// round(fraction * count) indices.
fn degraded_indices(count: usize, fraction: f64, select_seed: u64) -> BTreeSet<usize> {
    let n = (fraction * count as f64).round() as usize;
    let mut indices: Vec<usize> = (0..count).collect();
    use rand::seq::SliceRandom;
    indices.shuffle(&mut seed::rng(select_seed));
    indices.into_iter().take(n.min(count)).collect()
}

/// Generate a corpus: disjoint splits of the requested sizes, each line
/// rendered with its own derived seed so parallel and serial generation
/// agree.
pub fn build_corpus(
    corpus_id: &str,
    font: &GlyphFont,
    stream: &TextStream,
    training: &SplitSpec,
    evaluation: &SplitSpec,
    active_learning: &SplitSpec,
    corpus_seed: u64,
) -> Result<Corpus> {
    let mut splits = BTreeMap::new();
    let mut lines = BTreeMap::new();
    let mut global = 0usize;
    for (split, spec) in [
        (Split::Training, training),
        (Split::Evaluation, evaluation),
        (Split::ActiveLearning, active_learning),
    ] {
        spec.profile.validate()?;
        let degraded = degraded_indices(
            spec.count,
            spec.profile.fraction,
            seed::derive_labeled(corpus_seed, split.as_str(), 0),
        );
        let mut ids = Vec::with_capacity(spec.count);
        for i in 0..spec.count {
            let line_seed = seed::derive_labeled(corpus_seed, "line", global as u64);
            let text = stream.line(global, line_seed).ok_or_else(|| {
                Error::invalid(format!(
                    "text source exhausted after {global} lines while building {split:?}"
                ))
            })?;
            let degradations: Vec<Degradation> = if degraded.contains(&i) {
                spec.profile
                    .ops
                    .iter()
                    .enumerate()
                    .map(|(k, &(kind, strength))| {
                        Degradation::new(kind, strength, seed::derive_labeled(line_seed, "deg", k as u64))
                    })
                    .collect::<Result<_>>()?
            } else {
                Vec::new()
            };
            let id = LineId::new(format!("{}-{:05}", split.id_prefix(), i));
            let sample = LineSample::render(id.clone(), &text, font, &degradations)?;
            ids.push(id.clone());
            lines.insert(id, sample);
            global += 1;
        }
        splits.insert(split, ids);
    }
    let manifest = PoolManifest {
        corpus_id: corpus_id.to_string(),
        splits,
    };
    manifest.validate()?;
    Ok(Corpus {
        manifest,
        font: font.clone(),
        lines,
    })
}

pub fn save_corpus(corpus: &Corpus, dir: &Path) -> Result<()> {
    corpus.manifest.validate()?;
    fs::create_dir_all(dir.join("images")).map_err(|e| Error::io(dir, e))?;
    fs::create_dir_all(dir.join("gt")).map_err(|e| Error::io(dir, e))?;
    save_font(&corpus.font, &dir.join("font.txt"))?;

    let mut manifest = String::new();
    manifest.push_str("corpus v1\n");
    manifest.push_str(&format!("id {}\n", corpus.manifest.corpus_id));
    manifest.push_str(&format!(
        "font {} cell {} {} file font.txt\n",
        corpus.font.name, corpus.font.cell_width, corpus.font.cell_height
    ));
    for split in Split::ALL {
        manifest.push_str(&format!(
            "split {} {}\n",
            split.as_str(),
            corpus.manifest.split_ids(split).len()
        ));
    }
    for split in Split::ALL {
        let ids = corpus.manifest.split_ids(split);
        if ids.is_empty() {
            continue;
        }
        let mut gt = String::new();
        for id in ids {
            let sample = &corpus.lines[id];
            if sample.text.contains('\t') || sample.text.contains('\n') {
                return Err(Error::invalid(format!("line {id}: GT contains control characters")));
            }
            let image_path = format!("images/{id}.pgm");
            sample.image.write_pgm(&dir.join(&image_path))?;
            let deg = if sample.provenance.degradations.is_empty() {
                "-".to_string()
            } else {
                sample
                    .provenance
                    .degradations
                    .iter()
                    .map(|d| d.descriptor())
                    .collect::<Vec<_>>()
                    .join(";")
            };
            manifest.push_str(&format!(
                "line\t{id}\t{}\t{image_path}\t{deg}\t{}\n",
                split.as_str(),
                sample.text
            ));
            gt.push_str(&sample.text);
            gt.push('\n');
        }
        let gt_path = dir.join("gt").join(format!("{}.txt", split.as_str()));
        fs::write(&gt_path, gt).map_err(|e| Error::io(&gt_path, e))?;
    }
    let manifest_path = dir.join("manifest.txt");
    fs::write(&manifest_path, manifest).map_err(|e| Error::io(&manifest_path, e))
}

pub fn load_corpus(dir: &Path) -> Result<Corpus> {
    let manifest_path = dir.join("manifest.txt");
    if !manifest_path.exists() {
        return Err(Error::invalid(format!(
            "no manifest at {}; generate the corpus first",
            manifest_path.display()
        )));
    }
    let content = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let mut lines = content.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::malformed(&manifest_path, 1, "empty manifest"))?;
    if header != "corpus v1" {
        return Err(Error::malformed(&manifest_path, 1, format!("unsupported header {header:?}")));
    }
    let mut corpus_id = None;
    let mut font: Option<GlyphFont> = None;
    let mut declared: BTreeMap<Split, usize> = BTreeMap::new();
    let mut splits: BTreeMap<Split, Vec<LineId>> = BTreeMap::new();
    let mut samples: BTreeMap<LineId, LineSample> = BTreeMap::new();

    for (i, line) in lines {
        let line_no = i + 1;
        if let Some(rest) = line.strip_prefix("id ") {
            corpus_id = Some(rest.to_string());
        } else if let Some(rest) = line.strip_prefix("font ") {
            let file = rest
                .split(" file ")
                .nth(1)
                .ok_or_else(|| Error::malformed(&manifest_path, line_no, "font line missing file"))?;
            font = Some(load_font(&dir.join(file))?);
        } else if let Some(rest) = line.strip_prefix("split ") {
            let mut parts = rest.split(' ');
            let split = Split::parse(parts.next().unwrap_or(""))
                .map_err(|e| Error::malformed(&manifest_path, line_no, e.to_string()))?;
            let count: usize = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::malformed(&manifest_path, line_no, "bad split count"))?;
            declared.insert(split, count);
        } else if let Some(rest) = line.strip_prefix("line\t") {
            let fields: Vec<&str> = rest.splitn(5, '\t').collect();
            if fields.len() != 5 {
                return Err(Error::malformed(&manifest_path, line_no, "line row needs 5 fields"));
            }
            let id = LineId::new(fields[0]);
            let split = Split::parse(fields[1])
                .map_err(|e| Error::malformed(&manifest_path, line_no, e.to_string()))?;
            let image = LineImage::read_pgm(&dir.join(fields[2]))?;
            let degradations: Vec<Degradation> = if fields[3] == "-" {
                Vec::new()
            } else {
                fields[3]
                    .split(';')
                    .map(Degradation::from_descriptor)
                    .collect::<Result<_>>()
                    .map_err(|e| Error::malformed(&manifest_path, line_no, e.to_string()))?
            };
            let text = fields[4].to_string();
            let font_ref = font.as_ref().ok_or_else(|| {
                Error::malformed(&manifest_path, line_no, "line row before font declaration")
            })?;
            let chars = text.chars().count();
            if image.height != font_ref.cell_height || image.width != chars * font_ref.cell_width {
                return Err(Error::malformed(
                    &manifest_path,
                    line_no,
                    format!("line {id}: image {}x{} does not match {chars} cells", image.width, image.height),
                ));
            }
            splits.entry(split).or_default().push(id.clone());
            samples.insert(
                id.clone(),
                LineSample {
                    line_id: id,
                    text,
                    image,
                    provenance: Provenance {
                        font: font_ref.name.clone(),
                        degradations,
                    },
                },
            );
        } else if !line.is_empty() {
            return Err(Error::malformed(&manifest_path, line_no, format!("unrecognized row {line:?}")));
        }
    }

    let manifest = PoolManifest {
        corpus_id: corpus_id
            .ok_or_else(|| Error::malformed(&manifest_path, 0, "manifest missing id"))?,
        splits,
    };
    manifest.validate()?;
    for (split, count) in declared {
        if manifest.split_ids(split).len() != count {
            return Err(Error::invalid(format!(
                "split {} declares {count} lines but lists {}",
                split.as_str(),
                manifest.split_ids(split).len()
            )));
        }
    }
    Ok(Corpus {
        manifest,
        font: font.ok_or_else(|| Error::malformed(&manifest_path, 0, "manifest missing font"))?,
        lines: samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::font::make_font;
    use crate::corpus::DegradationKind;
    use tempfile::tempdir;

    fn small_corpus(seed: u64) -> Corpus {
        let font = make_font("f", "abcdef ", 5, 6, 1).unwrap();
        let source = TextSource::with_line_length("abcdef", 1.0, 8, 12).unwrap();
        build_corpus(
            "unit",
            &font,
            &TextStream::Random(&source),
            &SplitSpec::clean(6),
            &SplitSpec::clean(20),
            &SplitSpec::degraded(30, DegradationProfile::partial(DegradationKind::Noise, 0.3, 0.5)),
            seed,
        )
        .unwrap()
    }

    #[test]
    fn splits_have_requested_sizes_and_are_disjoint() {
        let corpus = small_corpus(3);
        assert_eq!(corpus.manifest.split_ids(Split::Training).len(), 6);
        assert_eq!(corpus.manifest.split_ids(Split::Evaluation).len(), 20);
        assert_eq!(corpus.manifest.split_ids(Split::ActiveLearning).len(), 30);
        corpus.manifest.validate().unwrap();
        assert_eq!(corpus.lines.len(), 56);
    }

    #[test]
    fn same_seed_reproduces_the_corpus() {
        assert_eq!(small_corpus(3), small_corpus(3));
        assert_ne!(small_corpus(3), small_corpus(4));
    }

    #[test]
    fn degraded_fraction_is_exact() {
        let corpus = small_corpus(3);
        let degraded = corpus
            .split_samples(Split::ActiveLearning)
            .iter()
            .filter(|s| !s.provenance.degradations.is_empty())
            .count();
        assert_eq!(degraded, 15);
    }

    #[test]
    fn fixed_stream_exhaustion_is_reported() {
        let font = make_font("f", "ab ", 5, 6, 1).unwrap();
        let texts = vec!["ab".to_string(), "ba".to_string()];
        let err = build_corpus(
            "unit",
            &font,
            &TextStream::Fixed(&texts),
            &SplitSpec::clean(3),
            &SplitSpec::clean(0),
            &SplitSpec::clean(0),
            0,
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("exhausted"), "{err}");
    }

    #[test]
    fn corpus_round_trip() {
        let dir = tempdir().unwrap();
        let corpus = small_corpus(8);
        save_corpus(&corpus, dir.path()).unwrap();
        let back = load_corpus(dir.path()).unwrap();
        assert_eq!(back, corpus);
        let gt = std::fs::read_to_string(dir.path().join("gt/training.txt")).unwrap();
        assert_eq!(gt.lines().count(), 6);
    }

    #[test]
    fn manifest_rejects_duplicate_ids() {
        let corpus = small_corpus(1);
        let mut bad = corpus.manifest.clone();
        let id = bad.split_ids(Split::Training)[0].clone();
        bad.splits.get_mut(&Split::Evaluation).unwrap().push(id);
        assert!(bad.validate().is_err());
    }
}
