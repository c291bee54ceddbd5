//! Edit-distance primitives, character error/accuracy evaluation, and the
//! per-line committee disagreement measure.
//!
//! All comparisons operate on Unicode scalar values; no normalization is
//! applied before comparing.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::align::{align_pair, Cell};
use crate::error::{Error, Result};

/// Minimal number of single-character insertions, deletions, and
/// substitutions transforming `a` into `b`.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            curr[j + 1] = sub.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// A confusion key: ground-truth side and hypothesis side of one error cell.
/// `None` marks a gap (a missed character on the OCR side, or a spurious one
/// on the GT side).
pub type Confusion = (Option<char>, Option<char>);

/// Character-level evaluation of one hypothesis (or an aggregate over many).
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub edit_distance: usize,
    pub gt_length: usize,
    pub cer: f64,
    pub car: f64,
    /// (gt, ocr) -> count, extracted from one minimal alignment.
    pub confusions: BTreeMap<Confusion, usize>,
}

impl EvalReport {
    fn from_parts(
        edit_distance: usize,
        gt_length: usize,
        confusions: BTreeMap<Confusion, usize>,
    ) -> Self {
        // Denominator clamped to 1 so empty GT stays defined.
        let cer = edit_distance as f64 / gt_length.max(1) as f64;
        EvalReport {
            edit_distance,
            gt_length,
            cer,
            car: 1.0 - cer,
            confusions,
        }
    }

    /// Fold another report into this one; rates are recomputed from the
    /// summed counts (corpus-level CER, not a mean of per-line CERs).
    pub fn merge(&mut self, other: &EvalReport) {
        self.edit_distance += other.edit_distance;
        self.gt_length += other.gt_length;
        for (k, v) in &other.confusions {
            *self.confusions.entry(*k).or_insert(0) += v;
        }
        let cer = self.edit_distance as f64 / self.gt_length.max(1) as f64;
        self.cer = cer;
        self.car = 1.0 - cer;
    }

    /// Plain-text accuracy report: totals, rates, and the top-20 confusions.
    /// The exact layout is pinned by a golden file in the test suite.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:>10} Characters", self.gt_length);
        let _ = writeln!(out, "{:>10} Errors", self.edit_distance);
        let _ = writeln!(out, "{:>9.2}% Character Error Rate", self.cer * 100.0);
        let _ = writeln!(out, "{:>9.2}% Character Accuracy", self.car * 100.0);
        let mut ranked: Vec<(&Confusion, &usize)> = self.confusions.iter().collect();
        ranked.sort_by(|x, y| y.1.cmp(x.1).then(x.0.cmp(y.0)));
        if !ranked.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(out, " Count  GT -> OCR");
            for ((gt, ocr), count) in ranked.into_iter().take(20) {
                let show = |c: &Option<char>| c.map(String::from).unwrap_or_else(|| "ε".into());
                let _ = writeln!(out, "{:>6}  {:>2} -> {}", count, show(gt), show(ocr));
            }
        }
        out
    }
}

/// Evaluate one OCR hypothesis against its ground truth.
///
/// CER uses the GT length as denominator (clamped to 1 for empty GT);
/// confusions come from the minimal alignment with the fixed tie-break of
/// [`align_pair`], so reports are deterministic.
pub fn evaluate(hyp: &str, gt: &str) -> EvalReport {
    let distance = levenshtein(hyp, gt);
    let matrix = align_pair(gt, hyp);
    let mut confusions: BTreeMap<Confusion, usize> = BTreeMap::new();
    for column in &matrix.columns {
        let g = column[0].ch();
        let h = column[1].ch();
        if g != h {
            *confusions.entry((g, h)).or_insert(0) += 1;
        }
    }
    EvalReport::from_parts(distance, gt.chars().count(), confusions)
}

/// Corpus-level evaluation: sums distances and lengths over all pairs.
pub fn evaluate_set<'a, I>(pairs: I) -> EvalReport
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    let mut total = EvalReport::from_parts(0, 0, BTreeMap::new());
    for (hyp, gt) in pairs {
        total.merge(&evaluate(hyp, gt));
    }
    total
}

/// One voter's normalized disagreement against its peers on a single line.
#[derive(Debug, Clone, PartialEq)]
pub struct LdrScore {
    pub voter: usize,
    /// Sum of the per-peer normalized distances.
    pub ldr_sum: f64,
    /// (peer index, edit distance to that peer / this voter's output length).
    pub per_peer: Vec<(usize, f64)>,
}

/// Normalized Levenshtein distance ratio of voter `i` against every peer:
/// each pairwise edit distance is divided by the length of voter `i`'s own
/// output (clamped to 1) and summed.
pub fn ldr(outputs: &[String], i: usize) -> Result<LdrScore> {
    if outputs.len() < 2 {
        return Err(Error::invalid(format!(
            "ldr needs at least 2 voter outputs, got {}",
            outputs.len()
        )));
    }
    if i >= outputs.len() {
        return Err(Error::invalid(format!(
            "voter index {i} out of range for {} outputs",
            outputs.len()
        )));
    }
    let own_len = outputs[i].chars().count().max(1) as f64;
    let per_peer: Vec<(usize, f64)> = outputs
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(j, peer)| (j, levenshtein(&outputs[i], peer) as f64 / own_len))
        .collect();
    let ldr_sum = per_peer.iter().map(|&(_, d)| d).sum();
    Ok(LdrScore {
        voter: i,
        ldr_sum,
        per_peer,
    })
}

/// Total committee disagreement on one line: the LDR sums of all voters
/// added up. Zero exactly when all outputs are identical.
pub fn line_disagreement(outputs: &[String]) -> Result<f64> {
    if outputs.len() < 2 {
        return Err(Error::invalid(format!(
            "line disagreement needs at least 2 voter outputs, got {}",
            outputs.len()
        )));
    }
    let mut total = 0.0;
    for i in 0..outputs.len() {
        total += ldr(outputs, i)?.ldr_sum;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levenshtein_identity_and_inserts() {
        assert_eq!(levenshtein("abc", "abc"), 0);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("abc", ""), 3);
        assert_eq!(levenshtein("", ""), 0);
    }

    #[test]
    fn levenshtein_kitten_sitting() {
        // Frozen from the recursive-definition oracle (see the acceptance
        // suite for the exhaustive comparison).
        assert_eq!(levenshtein("kitten", "sitting"), 3);
    }

    #[test]
    fn evaluate_exact_match() {
        let r = evaluate("ab", "ab");
        assert_eq!(r.edit_distance, 0);
        assert_eq!(r.cer, 0.0);
        assert_eq!(r.car, 1.0);
        assert!(r.confusions.is_empty());
    }

    #[test]
    fn evaluate_half_error() {
        // Distance 2 by DP, GT length 4.
        let r = evaluate("ab", "abcd");
        assert_eq!(r.edit_distance, 2);
        assert_eq!(r.cer, 0.5);
        assert_eq!(r.car, 0.5);
    }

    #[test]
    fn evaluate_empty_gt_clamps_denominator() {
        let r = evaluate("x", "");
        assert_eq!(r.cer, 1.0);
        assert_eq!(r.car, 0.0);
    }

    #[test]
    fn evaluate_cer_above_one_gives_negative_car() {
        let r = evaluate("xyz", "a");
        assert_eq!(r.edit_distance, 3);
        assert_eq!(r.cer, 3.0);
        assert_eq!(r.car, -2.0);
        assert_eq!(r.car + r.cer, 1.0);
    }

    #[test]
    fn evaluate_confusion_kinds() {
        // gt "abc" vs hyp "axcd": one substitution b->x, one insertion d.
        let r = evaluate("axcd", "abc");
        assert_eq!(r.confusions.get(&(Some('b'), Some('x'))), Some(&1));
        assert_eq!(r.confusions.get(&(None, Some('d'))), Some(&1));
        // gt "abc" vs hyp "ac": deletion of b.
        let r = evaluate("ac", "abc");
        assert_eq!(r.confusions.get(&(Some('b'), None)), Some(&1));
    }

    #[test]
    fn merge_recomputes_corpus_rates() {
        let mut a = evaluate("ab", "ab");
        a.merge(&evaluate("x", "ab"));
        assert_eq!(a.gt_length, 4);
        assert_eq!(a.edit_distance, 2);
        assert_eq!(a.cer, 0.5);
    }

    #[test]
    fn ldr_unanimous_is_zero() {
        let outs = vec!["abc".to_string(); 3];
        assert_eq!(ldr(&outs, 0).unwrap().ldr_sum, 0.0);
    }

    #[test]
    fn ldr_hand_checked_values() {
        let outs: Vec<String> = ["abc", "abc", "abd"].iter().map(|s| s.to_string()).collect();
        let score = ldr(&outs, 2).unwrap();
        assert!((score.ldr_sum - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(score.per_peer.len(), 2);
        let sum: f64 = score.per_peer.iter().map(|&(_, d)| d).sum();
        assert_eq!(sum, score.ldr_sum);

        let outs: Vec<String> = ["ab", "abab"].iter().map(|s| s.to_string()).collect();
        assert!((ldr(&outs, 0).unwrap().ldr_sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ldr_rejects_small_committees() {
        assert!(ldr(&["a".to_string()], 0).is_err());
        assert!(ldr(&["a".to_string(), "b".to_string()], 2).is_err());
        assert!(line_disagreement(&["a".to_string()]).is_err());
    }

    #[test]
    fn line_disagreement_hand_checked() {
        let outs: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        assert!((line_disagreement(&outs).unwrap() - 2.0).abs() < 1e-12);

        let outs: Vec<String> = ["abc", "abc", "abd"].iter().map(|s| s.to_string()).collect();
        assert!((line_disagreement(&outs).unwrap() - 4.0 / 3.0).abs() < 1e-12);

        let outs = vec!["xyz".to_string(); 5];
        assert_eq!(line_disagreement(&outs).unwrap(), 0.0);
    }

    #[test]
    fn line_disagreement_permutation_invariant() {
        let outs: Vec<String> = ["abc", "abd", "xbc", "abc"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let base = line_disagreement(&outs).unwrap();
        let mut perm = outs.clone();
        perm.rotate_left(2);
        assert!((line_disagreement(&perm).unwrap() - base).abs() < 1e-12);
        perm.reverse();
        assert!((line_disagreement(&perm).unwrap() - base).abs() < 1e-12);
    }
}
