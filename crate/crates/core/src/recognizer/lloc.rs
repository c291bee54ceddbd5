//! Extended lloc files: per output position, the ranked character
//! alternatives with their confidences.
//!
//! Format: UTF-8 TSV, one row per output position holding the position index
//! followed by alternating character / confidence pairs (six fractional
//! digits) in descending confidence. A file may hold one record per line
//! image, records separated by a blank line.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Ranked alternatives for every output position of one recognized line.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedLloc {
    /// `positions[p]` is non-empty, descending by confidence, and its first
    /// entry is the emitted character at position `p`.
    pub positions: Vec<Vec<(char, f64)>>,
}

impl ExtendedLloc {
    pub fn empty() -> Self {
        ExtendedLloc {
            positions: Vec::new(),
        }
    }

    /// Degenerate lloc asserting full confidence in each emitted character.
    pub fn one_hot(text: &str) -> Self {
        ExtendedLloc {
            positions: text.chars().map(|c| vec![(c, 1.0)]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// The emitted text: first entry of every position.
    pub fn text(&self) -> String {
        self.positions.iter().map(|alts| alts[0].0).collect()
    }

    /// Check confidence invariants: values in [0, 1], descending order, and
    /// a per-position sum of at most 1 + 1e-6.
    pub fn validate(&self) -> Result<()> {
        for (p, alts) in self.positions.iter().enumerate() {
            if alts.is_empty() {
                return Err(Error::invalid(format!("lloc position {p} has no entries")));
            }
            let mut sum = 0.0;
            let mut prev = f64::INFINITY;
            for &(ch, conf) in alts {
                if !(0.0..=1.0).contains(&conf) {
                    return Err(Error::invalid(format!(
                        "lloc position {p}: confidence {conf} for {ch:?} outside [0, 1]"
                    )));
                }
                if conf > prev {
                    return Err(Error::invalid(format!(
                        "lloc position {p}: confidences not descending at {ch:?}"
                    )));
                }
                prev = conf;
                sum += conf;
            }
            if sum > 1.0 + 1e-6 {
                return Err(Error::invalid(format!(
                    "lloc position {p}: confidences sum to {sum}"
                )));
            }
        }
        Ok(())
    }

    /// Check that the record describes exactly `text`.
    pub fn validate_against(&self, text: &str) -> Result<()> {
        self.validate()?;
        let chars: Vec<char> = text.chars().collect();
        if chars.len() != self.positions.len() {
            return Err(Error::invalid(format!(
                "lloc has {} positions for a {}-character text",
                self.positions.len(),
                chars.len()
            )));
        }
        for (p, (alts, &ch)) in self.positions.iter().zip(&chars).enumerate() {
            if alts[0].0 != ch {
                return Err(Error::invalid(format!(
                    "lloc position {p} leads with {:?} but the text has {ch:?}",
                    alts[0].0
                )));
            }
        }
        Ok(())
    }

    fn render_rows(&self, out: &mut String) {
        for (p, alts) in self.positions.iter().enumerate() {
            out.push_str(&p.to_string());
            for &(ch, conf) in alts {
                out.push('\t');
                out.push(ch);
                out.push('\t');
                out.push_str(&format!("{conf:.6}"));
            }
            out.push('\n');
        }
    }
}

fn parse_record(path: &Path, rows: &[(usize, &str)]) -> Result<ExtendedLloc> {
    let mut positions = Vec::with_capacity(rows.len());
    for (row_index, (line_no, row)) in rows.iter().enumerate() {
        let mut fields = row.split('\t');
        let pos_field = fields.next().unwrap_or("");
        let pos: usize = pos_field
            .parse()
            .map_err(|_| Error::malformed(path, *line_no, format!("bad position {pos_field:?}")))?;
        if pos != row_index {
            return Err(Error::malformed(
                path,
                *line_no,
                format!("position {pos} out of order, expected {row_index}"),
            ));
        }
        let mut alts = Vec::new();
        loop {
            let Some(ch_field) = fields.next() else { break };
            let mut chars = ch_field.chars();
            let (Some(ch), None) = (chars.next(), chars.next()) else {
                return Err(Error::malformed(
                    path,
                    *line_no,
                    format!("character field {ch_field:?} is not a single character"),
                ));
            };
            let conf_field = fields.next().ok_or_else(|| {
                Error::malformed(path, *line_no, format!("missing confidence after {ch:?}"))
            })?;
            let conf: f64 = conf_field.parse().map_err(|_| {
                Error::malformed(path, *line_no, format!("bad confidence {conf_field:?}"))
            })?;
            alts.push((ch, conf));
        }
        if alts.is_empty() {
            return Err(Error::malformed(path, *line_no, "row has no alternatives"));
        }
        positions.push(alts);
    }
    let lloc = ExtendedLloc { positions };
    lloc.validate()
        .map_err(|e| Error::malformed(path, rows.first().map(|r| r.0).unwrap_or(0), e.to_string()))?;
    Ok(lloc)
}

/// Write a single record.
pub fn write_lloc(lloc: &ExtendedLloc, path: &Path) -> Result<()> {
    let mut out = String::new();
    lloc.render_rows(&mut out);
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Read a file holding exactly one record.
pub fn read_lloc(path: &Path) -> Result<ExtendedLloc> {
    let set = read_lloc_set(path)?;
    if set.len() != 1 {
        return Err(Error::malformed(
            path,
            0,
            format!("expected a single record, found {}", set.len()),
        ));
    }
    Ok(set.into_iter().next().unwrap())
}

/// Write one blank-separated record per line image.
pub fn write_lloc_set(llocs: &[ExtendedLloc], path: &Path) -> Result<()> {
    if llocs.is_empty() {
        return Err(Error::invalid("refusing to write an empty lloc set"));
    }
    let mut out = String::new();
    for (i, lloc) in llocs.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        lloc.render_rows(&mut out);
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Read blank-separated records. An empty file is one empty record.
pub fn read_lloc_set(path: &Path) -> Result<Vec<ExtendedLloc>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    let mut current: Vec<(usize, &str)> = Vec::new();
    for (i, line) in content.lines().enumerate() {
        if line.is_empty() {
            records.push(parse_record(path, &current)?);
            current.clear();
        } else {
            current.push((i + 1, line));
        }
    }
    records.push(parse_record(path, &current)?);
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn single_record_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("a.lloc");
        let lloc = ExtendedLloc {
            positions: vec![vec![('a', 0.9), ('o', 0.1)]],
        };
        write_lloc(&lloc, &path).unwrap();
        let raw = std::fs::read_to_string(&path).unwrap();
        assert_eq!(raw, "0\ta\t0.900000\to\t0.100000\n");
        assert_eq!(read_lloc(&path).unwrap(), lloc);
    }

    #[test]
    fn empty_record_is_valid() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("empty.lloc");
        write_lloc(&ExtendedLloc::empty(), &path).unwrap();
        let back = read_lloc(&path).unwrap();
        assert!(back.is_empty());
    }

    #[test]
    fn probability_out_of_range_is_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.lloc");
        std::fs::write(&path, "0\ta\t1.300000\n").unwrap();
        let err = read_lloc(&path).unwrap_err();
        assert!(err.to_string().contains("outside [0, 1]"), "{err}");
    }

    #[test]
    fn malformed_rows_name_file_and_line() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.lloc");
        std::fs::write(&path, "0\ta\t0.500000\nx\tb\t0.100000\n").unwrap();
        let err = read_lloc_set(&path).unwrap_err().to_string();
        assert!(err.contains("bad.lloc:2"), "{err}");

        std::fs::write(&path, "1\ta\t0.500000\n").unwrap();
        assert!(read_lloc(&path).is_err());

        std::fs::write(&path, "0\tab\t0.500000\n").unwrap();
        assert!(read_lloc(&path).is_err());
    }

    #[test]
    fn set_round_trip_with_empty_middle_record() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("set.lloc");
        let set = vec![
            ExtendedLloc::one_hot("ab"),
            ExtendedLloc::empty(),
            ExtendedLloc {
                positions: vec![vec![('x', 0.6), ('y', 0.4)]],
            },
        ];
        write_lloc_set(&set, &path).unwrap();
        assert_eq!(read_lloc_set(&path).unwrap(), set);
    }

    #[test]
    fn descending_order_is_enforced() {
        let lloc = ExtendedLloc {
            positions: vec![vec![('a', 0.2), ('b', 0.5)]],
        };
        assert!(lloc.validate().is_err());
    }

    #[test]
    fn validate_against_checks_first_entries() {
        let lloc = ExtendedLloc::one_hot("abc");
        lloc.validate_against("abc").unwrap();
        assert!(lloc.validate_against("abd").is_err());
        assert!(lloc.validate_against("ab").is_err());
    }
}
