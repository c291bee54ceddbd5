//! Versioned model files: a magic line, the codec as a UTF-8 list, weights
//! and bias as decimal text with 9 significant digits (exact for f32), a
//! meta block, and a trailing SHA-256 checksum over everything before it.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pretrain::SurgeryReport;

use super::codec::Codec;
use super::model::{ModelMeta, RecognizerModel};

const MAGIC: &str = "linemodel";
const VERSION: u32 = 1;

fn fmt_f32(v: f32) -> String {
    format!("{v:.8e}")
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(64);
    for b in Sha256::digest(bytes) {
        let _ = write!(out, "{b:02x}");
    }
    out
}

fn chars_to_field(chars: &[char]) -> String {
    chars.iter().collect()
}

pub fn save_model(model: &RecognizerModel, path: &Path) -> Result<()> {
    model.validate()?;
    if model.codec.chars().iter().any(|c| *c == '\n' || *c == '\r') {
        return Err(Error::invalid("codec characters may not be line breaks"));
    }
    let mut body = String::new();
    let _ = writeln!(body, "{MAGIC} v{VERSION}");
    let _ = writeln!(body, "id {}", model.meta.model_id);
    let _ = writeln!(body, "parent {}", model.meta.parent);
    let _ = writeln!(body, "iterations {}", model.meta.iterations);
    let _ = writeln!(body, "seed {}", model.meta.seed);
    let _ = writeln!(body, "cell {} {}", model.cell_width, model.cell_height);
    if let Some(s) = &model.meta.surgery {
        let _ = writeln!(body, "surgery_parent {}", s.parent_model_id);
        let _ = writeln!(body, "surgery_added {}", chars_to_field(&s.added));
        let _ = writeln!(body, "surgery_deleted {}", chars_to_field(&s.deleted));
        let _ = writeln!(body, "surgery_retained {}", chars_to_field(&s.retained));
    }
    let _ = writeln!(body, "codec {}", model.codec.len());
    for &c in model.codec.chars() {
        let _ = writeln!(body, "{c}");
    }
    for row in &model.weights {
        let cells: Vec<String> = row.iter().map(|&v| fmt_f32(v)).collect();
        let _ = writeln!(body, "row {}", cells.join(" "));
    }
    let cells: Vec<String> = model.bias.iter().map(|&v| fmt_f32(v)).collect();
    let _ = writeln!(body, "bias {}", cells.join(" "));
    let checksum = hex_digest(body.as_bytes());
    let _ = writeln!(body, "checksum {checksum}");
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

struct Reader<'a> {
    path: &'a Path,
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn next(&mut self) -> Result<&'a str> {
        let line = self
            .lines
            .get(self.pos)
            .ok_or_else(|| Error::ModelFormat {
                path: self.path.to_path_buf(),
                msg: "unexpected end of file".into(),
            })?;
        self.pos += 1;
        Ok(line)
    }

    /// Expect "key rest" and return rest.
    fn field(&mut self, key: &str) -> Result<&'a str> {
        let line = self.next()?;
        line.strip_prefix(key)
            .and_then(|r| r.strip_prefix(' ').or(if r.is_empty() { Some("") } else { None }))
            .ok_or_else(|| Error::ModelFormat {
                path: self.path.to_path_buf(),
                msg: format!("expected `{key}`, found {line:?}"),
            })
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::ModelFormat {
            path: self.path.to_path_buf(),
            msg: msg.into(),
        }
    }
}

fn parse_f32_list(r: &Reader, field: &str, expected: usize) -> Result<Vec<f32>> {
    let values: Vec<f32> = field
        .split(' ')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f32>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| r.err(format!("bad numeric value: {e}")))?;
    if values.len() != expected {
        return Err(r.err(format!("expected {expected} values, found {}", values.len())));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(r.err("non-finite value"));
    }
    Ok(values)
}

pub fn load_model(path: &Path) -> Result<RecognizerModel> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    // Checksum covers every byte before its own line.
    let tail = content.trim_end_matches('\n');
    let (body_end, checksum_line) = match tail.rfind('\n') {
        Some(i) => (i + 1, &tail[i + 1..]),
        None => (0, tail),
    };
    let stated = checksum_line.strip_prefix("checksum ").ok_or_else(|| {
        Error::ModelFormat {
            path: path.to_path_buf(),
            msg: "missing checksum line".into(),
        }
    })?;
    let actual = hex_digest(content[..body_end].as_bytes());
    if stated != actual {
        return Err(Error::ModelFormat {
            path: path.to_path_buf(),
            msg: "checksum mismatch (file corrupted or truncated)".into(),
        });
    }

    let mut r = Reader {
        path,
        lines: content[..body_end].lines().collect(),
        pos: 0,
    };
    let header = r.next()?;
    if header != format!("{MAGIC} v{VERSION}") {
        return Err(r.err(format!("unsupported header {header:?}")));
    }
    let model_id = r.field("id")?.to_string();
    let parent = r.field("parent")?.to_string();
    let iterations: u64 = r
        .field("iterations")?
        .parse()
        .map_err(|_| r.err("bad iterations"))?;
    let seed: u64 = r.field("seed")?.parse().map_err(|_| r.err("bad seed"))?;
    let cell = r.field("cell")?;
    let mut dims = cell.split(' ');
    let cell_width: usize = dims
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| r.err("bad cell width"))?;
    let cell_height: usize = dims
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| r.err("bad cell height"))?;

    let mut surgery = None;
    let mut line = r.next()?;
    if let Some(surgery_parent) = line.strip_prefix("surgery_parent ") {
        let added = r.field("surgery_added")?.chars().collect();
        let deleted = r.field("surgery_deleted")?.chars().collect();
        let retained = r.field("surgery_retained")?.chars().collect();
        surgery = Some(SurgeryReport {
            added,
            deleted,
            retained,
            parent_model_id: surgery_parent.to_string(),
        });
        line = r.next()?;
    }

    let codec_len: usize = line
        .strip_prefix("codec ")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| r.err(format!("expected `codec <n>`, found {line:?}")))?;
    let mut chars = Vec::with_capacity(codec_len);
    for _ in 0..codec_len {
        let l = r.next()?;
        let mut it = l.chars();
        match (it.next(), it.next()) {
            (Some(c), None) => chars.push(c),
            _ => return Err(r.err(format!("codec line {l:?} is not a single character"))),
        }
    }
    let codec = Codec::new(chars).map_err(|e| r.err(e.to_string()))?;

    let frame = cell_width * cell_height;
    let mut weights = Vec::with_capacity(codec_len);
    for _ in 0..codec_len {
        let row = r.field("row")?;
        weights.push(parse_f32_list(&r, row, frame)?);
    }
    let bias = parse_f32_list(&r, r.field("bias")?, codec_len)?;
    if r.pos != r.lines.len() {
        return Err(r.err("trailing content after bias"));
    }

    let model = RecognizerModel {
        codec,
        cell_width,
        cell_height,
        weights,
        bias,
        meta: ModelMeta {
            model_id,
            parent,
            iterations,
            seed,
            surgery,
        },
    };
    model.validate()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn sample_model() -> RecognizerModel {
        let codec = Codec::new(vec!['a', ' ', 'ß']).unwrap();
        let mut m = RecognizerModel::random(codec, 4, 5, 77, "unit-model");
        m.meta.iterations = 1234;
        m.meta.surgery = Some(SurgeryReport {
            added: vec!['ß'],
            deleted: vec!['q'],
            retained: vec!['a', ' '],
            parent_model_id: "base-x".into(),
        });
        m.meta.parent = "base-x".into();
        m
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("m.model");
        let model = sample_model();
        save_model(&model, &path).unwrap();
        let back = load_model(&path).unwrap();
        assert_eq!(back, model);

        // Saving the loaded model reproduces the identical file.
        let path2 = dir.path().join("m2.model");
        save_model(&back, &path2).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }

    #[test]
    fn truncation_fails_the_checksum() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("m.model");
        save_model(&sample_model(), &path).unwrap();
        let content = std::fs::read_to_string(&path).unwrap();
        // Drop one weights row but keep the checksum line.
        let lines: Vec<&str> = content.lines().collect();
        let row_at = lines.iter().position(|l| l.starts_with("row ")).unwrap();
        let mut cut: Vec<&str> = lines.clone();
        cut.remove(row_at);
        std::fs::write(&path, cut.join("\n") + "\n").unwrap();
        let err = load_model(&path).unwrap_err().to_string();
        assert!(err.contains("checksum"), "{err}");
    }

    #[test]
    fn version_mismatch_is_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("m.model");
        save_model(&sample_model(), &path).unwrap();
        let content = std::fs::read_to_string(&path)
            .unwrap()
            .replace("linemodel v1", "linemodel v9");
        // Re-checksum so only the version check can fail.
        let body_end = content.rfind("checksum ").unwrap();
        let body = &content[..body_end];
        let fixed = format!("{body}checksum {}\n", hex_digest(body.as_bytes()));
        std::fs::write(&path, fixed).unwrap();
        let err = load_model(&path).unwrap_err().to_string();
        assert!(err.contains("unsupported header"), "{err}");
    }

    #[test]
    fn nan_is_rejected_on_save() {
        let dir = tempdir().unwrap();
        let mut m = sample_model();
        m.bias[0] = f32::INFINITY;
        assert!(save_model(&m, &dir.path().join("m.model")).is_err());
    }
}
