//! Alignment of N OCR outputs of the same line into a column matrix with
//! gap symbols. Voting operates on the disagreeing columns.

use std::collections::BTreeSet;

/// Gap rendering used by [`AlignmentMatrix::dump`] and the report output.
pub const GAP_CHAR: char = 'ε';

/// One cell of the alignment matrix: a character with its source position in
/// the voter's output, or a gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Gap,
    Char { ch: char, src: usize },
}

impl Cell {
    pub fn ch(&self) -> Option<char> {
        match self {
            Cell::Gap => None,
            Cell::Char { ch, .. } => Some(*ch),
        }
    }

    pub fn src(&self) -> Option<usize> {
        match self {
            Cell::Gap => None,
            Cell::Char { src, .. } => Some(*src),
        }
    }

    pub fn is_gap(&self) -> bool {
        matches!(self, Cell::Gap)
    }
}

/// N voter outputs aligned into columns. Removing the gaps from row `i`
/// reproduces voter `i`'s output exactly, and no column is all-gap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentMatrix {
    pub n_voters: usize,
    /// Each column holds exactly `n_voters` cells.
    pub columns: Vec<Vec<Cell>>,
}

impl AlignmentMatrix {
    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    /// Voter `i`'s output reconstructed from its row (gaps skipped).
    pub fn row_text(&self, voter: usize) -> String {
        self.columns
            .iter()
            .filter_map(|col| col[voter].ch())
            .collect()
    }

    /// All cells of a column carry the same value.
    pub fn column_unanimous(&self, col: usize) -> bool {
        let first = self.columns[col][0].ch();
        self.columns[col].iter().all(|c| c.ch() == first)
    }

    /// Debug dump: one text row per voter, gaps rendered as 'ε'.
    pub fn dump(&self) -> String {
        (0..self.n_voters)
            .map(|v| {
                self.columns
                    .iter()
                    .map(|col| col[v].ch().unwrap_or(GAP_CHAR))
                    .collect::<String>()
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// A maximal run of disagreeing columns, with each voter's substring over it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffRegion {
    pub start: usize,
    /// Exclusive.
    pub end: usize,
    /// Per-voter text over the region (gaps skipped; may be empty).
    pub variants: Vec<String>,
}

impl DiffRegion {
    pub fn distinct(&self) -> BTreeSet<&str> {
        self.variants.iter().map(|s| s.as_str()).collect()
    }
}

// Traceback moves, in tie-break preference order:
// match > substitution > gap in b's row > gap in a's row.
const DIAG: u8 = 0;
const UP: u8 = 1;
const LEFT: u8 = 2;

/// Unit-cost alignment DP. `sub(i, j)` is 0 or 1 for aligning a[i] to b[j].
/// Returns the traceback path as (move, i, j) consumed front to back.
fn edit_traceback(m: usize, n: usize, sub: impl Fn(usize, usize) -> usize) -> Vec<u8> {
    let mut dp = vec![vec![0usize; n + 1]; m + 1];
    for i in 1..=m {
        dp[i][0] = i;
    }
    for j in 1..=n {
        dp[0][j] = j;
    }
    for i in 1..=m {
        for j in 1..=n {
            let s = dp[i - 1][j - 1] + sub(i - 1, j - 1);
            dp[i][j] = s.min(dp[i - 1][j] + 1).min(dp[i][j - 1] + 1);
        }
    }
    let mut path = Vec::with_capacity(m + n);
    let (mut i, mut j) = (m, n);
    while i > 0 || j > 0 {
        if i > 0 && j > 0 && dp[i][j] == dp[i - 1][j - 1] + sub(i - 1, j - 1) {
            // The diagonal is a match or a substitution depending on sub();
            // taking it before the gap moves realizes the documented order.
            path.push(DIAG);
            i -= 1;
            j -= 1;
        } else if i > 0 && dp[i][j] == dp[i - 1][j] + 1 {
            path.push(UP);
            i -= 1;
        } else {
            path.push(LEFT);
            j -= 1;
        }
    }
    path.reverse();
    path
}

/// Align two strings with minimal edit cost. Row 0 holds `a`, row 1 holds
/// `b`. Tie-break order in the traceback is fixed (match, then substitution,
/// then a gap in `b`'s row, then a gap in `a`'s row) so the alignment is
/// deterministic.
pub fn align_pair(a: &str, b: &str) -> AlignmentMatrix {
    let ac: Vec<char> = a.chars().collect();
    let bc: Vec<char> = b.chars().collect();
    let path = edit_traceback(ac.len(), bc.len(), |i, j| usize::from(ac[i] != bc[j]));
    let mut columns = Vec::with_capacity(path.len());
    let (mut i, mut j) = (0usize, 0usize);
    for step in path {
        let col = match step {
            DIAG => {
                let c = vec![
                    Cell::Char { ch: ac[i], src: i },
                    Cell::Char { ch: bc[j], src: j },
                ];
                i += 1;
                j += 1;
                c
            }
            UP => {
                let c = vec![Cell::Char { ch: ac[i], src: i }, Cell::Gap];
                i += 1;
                c
            }
            _ => {
                let c = vec![Cell::Gap, Cell::Char { ch: bc[j], src: j }];
                j += 1;
                c
            }
        };
        columns.push(col);
    }
    AlignmentMatrix {
        n_voters: 2,
        columns,
    }
}

/// Per-column consensus: the most frequent non-gap character, ties going to
/// the value held by the lowest voter index.
fn column_consensus(col: &[Cell]) -> char {
    let mut best: Option<(char, usize)> = None;
    for cell in col {
        if let Some(ch) = cell.ch() {
            let count = col.iter().filter(|c| c.ch() == Some(ch)).count();
            match best {
                Some((_, n)) if n >= count => {}
                _ => best = Some((ch, count)),
            }
        }
    }
    best.expect("alignment column is all-gap").0
}

/// Progressive alignment of N outputs with voter 0 as the pivot: each
/// further output is pair-aligned against the consensus sequence of the
/// columns built so far, and any gaps it introduces propagate into all
/// earlier rows.
pub fn align_multi(outputs: &[String]) -> AlignmentMatrix {
    if outputs.is_empty() {
        return AlignmentMatrix {
            n_voters: 0,
            columns: Vec::new(),
        };
    }
    let mut matrix = AlignmentMatrix {
        n_voters: 1,
        columns: outputs[0]
            .chars()
            .enumerate()
            .map(|(src, ch)| vec![Cell::Char { ch, src }])
            .collect(),
    };
    for text in &outputs[1..] {
        let chars: Vec<char> = text.chars().collect();
        let consensus: Vec<char> = matrix.columns.iter().map(|c| column_consensus(c)).collect();
        let path = edit_traceback(consensus.len(), chars.len(), |i, j| {
            usize::from(consensus[i] != chars[j])
        });
        let old_rows = matrix.n_voters;
        let mut columns = Vec::with_capacity(path.len());
        let (mut i, mut j) = (0usize, 0usize);
        for step in path {
            let mut col = match step {
                DIAG | UP => std::mem::take(&mut matrix.columns[i]),
                _ => vec![Cell::Gap; old_rows],
            };
            match step {
                DIAG => {
                    col.push(Cell::Char { ch: chars[j], src: j });
                    i += 1;
                    j += 1;
                }
                UP => {
                    col.push(Cell::Gap);
                    i += 1;
                }
                _ => {
                    col.push(Cell::Char { ch: chars[j], src: j });
                    j += 1;
                }
            }
            columns.push(col);
        }
        matrix = AlignmentMatrix {
            n_voters: old_rows + 1,
            columns,
        };
    }
    matrix
}

/// Maximal runs of disagreeing columns, left to right.
pub fn diff_regions(matrix: &AlignmentMatrix) -> Vec<DiffRegion> {
    let mut regions = Vec::new();
    let mut start: Option<usize> = None;
    for col in 0..=matrix.n_columns() {
        let disagrees = col < matrix.n_columns() && !matrix.column_unanimous(col);
        match (start, disagrees) {
            (None, true) => start = Some(col),
            (Some(s), false) => {
                let variants = (0..matrix.n_voters)
                    .map(|v| {
                        matrix.columns[s..col]
                            .iter()
                            .filter_map(|c| c[v].ch())
                            .collect::<String>()
                    })
                    .collect();
                regions.push(DiffRegion {
                    start: s,
                    end: col,
                    variants,
                });
                start = None;
            }
            _ => {}
        }
    }
    regions
}
