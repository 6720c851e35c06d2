//! Orthographic similarity: edit distance, q-gram distance, weighted
//! lexical similarity (WLS) and pairwise score normalization.
//!
//! All lengths are counted in Unicode scalar values, not bytes.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Weight of the edit-distance term in [`wls`].
pub const NED_WEIGHT: f64 = 0.75;
/// Weight of the q-gram term in [`wls`].
pub const QGRAM_WEIGHT: f64 = 0.25;
pub const DEFAULT_Q: usize = 2;
/// Per-side cap on distinct context tokens entering [`context_wls`].
pub const DEFAULT_CONTEXT_CAP: usize = 50;

/// A similarity value together with a flag marking inputs where the value
/// is a convention rather than a measurement (e.g. two empty strings).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub value: f64,
    pub degenerate: bool,
}

impl Score {
    pub(crate) fn new(value: f64) -> Self {
        Score {
            value,
            degenerate: false,
        }
    }

    pub(crate) fn degenerate(value: f64) -> Self {
        Score {
            value,
            degenerate: true,
        }
    }
}

/// Word-pair score and contextual score, raw and normalized to sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityScorePair {
    pub score1: f64,
    pub score2: f64,
    pub s1: f64,
    pub s2: f64,
}

/// Unit-cost Levenshtein distance.
pub fn levenshtein(p: &str, q: &str) -> usize {
    let p: Vec<char> = p.chars().collect();
    let q: Vec<char> = q.chars().collect();
    levenshtein_chars(&p, &q)
}

pub(crate) fn levenshtein_chars(p: &[char], q: &[char]) -> usize {
    if p.is_empty() {
        return q.len();
    }
    if q.is_empty() {
        return p.len();
    }
    let mut row: Vec<usize> = (0..=q.len()).collect();
    for (i, &pc) in p.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, &qc) in q.iter().enumerate() {
            let above = row[j + 1];
            let substitute = diag + usize::from(pc != qc);
            row[j + 1] = substitute.min(above + 1).min(row[j] + 1);
            diag = above;
        }
    }
    row[q.len()]
}

/// `1 - levenshtein / max(|p|, |q|)`. Two empty strings are identical (1.0, degenerate).
pub fn ned_similarity(p: &str, q: &str) -> Score {
    let p: Vec<char> = p.chars().collect();
    let q: Vec<char> = q.chars().collect();
    ned_similarity_chars(&p, &q)
}

fn ned_similarity_chars(p: &[char], q: &[char]) -> Score {
    let longest = p.len().max(q.len());
    if longest == 0 {
        return Score::degenerate(1.0);
    }
    Score::new(1.0 - levenshtein_chars(p, q) as f64 / longest as f64)
}

fn qgram_counts(s: &[char], q_len: usize) -> HashMap<&[char], i64> {
    let mut counts = HashMap::new();
    if s.len() >= q_len {
        for gram in s.windows(q_len) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

fn qgram_distance_chars(p: &[char], q: &[char], q_len: usize) -> usize {
    let mut counts = qgram_counts(p, q_len);
    if q.len() >= q_len {
        for gram in q.windows(q_len) {
            *counts.entry(gram).or_insert(0) -= 1;
        }
    }
    counts.values().map(|c| c.unsigned_abs() as usize).sum()
}

/// L1 distance between the q-gram count profiles of `p` and `q`.
///
/// # Panics
/// If `q_len` is zero.
pub fn qgram_distance(p: &str, q: &str, q_len: usize) -> usize {
    assert!(q_len >= 1, "q-gram length must be positive");
    let p: Vec<char> = p.chars().collect();
    let q: Vec<char> = q.chars().collect();
    qgram_distance_chars(&p, &q, q_len)
}

fn gram_count(len: usize, q_len: usize) -> usize {
    (len + 1).saturating_sub(q_len)
}

fn qgram_similarity_chars(p: &[char], q: &[char], q_len: usize) -> Score {
    let total = gram_count(p.len(), q_len) + gram_count(q.len(), q_len);
    if total == 0 {
        return Score::degenerate(1.0);
    }
    Score::new(1.0 - qgram_distance_chars(p, q, q_len) as f64 / total as f64)
}

/// `1 - qgram_distance / (Np + Nq)` where `Nx` is the number of q-grams in `x`.
///
/// Strings that both have no q-grams score 1.0 (degenerate).
///
/// # Panics
/// If `q_len` is zero.
pub fn qgram_similarity(p: &str, q: &str, q_len: usize) -> Score {
    assert!(q_len >= 1, "q-gram length must be positive");
    let p: Vec<char> = p.chars().collect();
    let q: Vec<char> = q.chars().collect();
    qgram_similarity_chars(&p, &q, q_len)
}

pub(crate) fn wls_chars(p: &[char], q: &[char], q_len: usize) -> Score {
    let ned = ned_similarity_chars(p, q);
    let qgram = qgram_similarity_chars(p, q, q_len);
    Score {
        value: NED_WEIGHT * ned.value + QGRAM_WEIGHT * qgram.value,
        degenerate: ned.degenerate || qgram.degenerate,
    }
}

/// Weighted lexical similarity: `0.75 * NED similarity + 0.25 * q-gram similarity`.
///
/// # Panics
/// If `q_len` is zero.
pub fn wls(p: &str, q: &str, q_len: usize) -> Score {
    assert!(q_len >= 1, "q-gram length must be positive");
    let p: Vec<char> = p.chars().collect();
    let q: Vec<char> = q.chars().collect();
    wls_chars(&p, &q, q_len)
}

/// Normalize a word-pair score and a contextual score so they sum to one.
///
/// Both zero gives the neutral split (0.5, 0.5).
pub fn normalize_pair(score1: f64, score2: f64) -> Result<SimilarityScorePair> {
    for (name, v) in [("score1", score1), ("score2", score2)] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Domain(format!("{name} must be finite and non-negative, got {v}")));
        }
    }
    let total = score1 + score2;
    let (s1, s2) = if total == 0.0 {
        (0.5, 0.5)
    } else {
        (score1 / total, score2 / total)
    };
    Ok(SimilarityScorePair { score1, score2, s1, s2 })
}

/// Distinct tokens ordered by descending frequency (first occurrence breaks ties),
/// truncated to `cap`, with their counts.
pub(crate) fn top_tokens<S: AsRef<str>>(tokens: &[S], cap: usize) -> Vec<(&str, usize)> {
    let mut order: Vec<(&str, usize, usize)> = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (pos, token) in tokens.iter().enumerate() {
        let token = token.as_ref();
        match index.get(token) {
            Some(&i) => order[i].1 += 1,
            None => {
                index.insert(token, order.len());
                order.push((token, 1, pos));
            }
        }
    }
    order.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
    order.truncate(cap);
    order.into_iter().map(|(t, n, _)| (t, n)).collect()
}

/// Mean [`wls`] over the Cartesian product of two context token lists.
///
/// Each side is reduced to its `cap` most frequent distinct tokens and every
/// pair is weighted by the product of the two token counts, so the result is
/// the multiset mean over the retained tokens. An empty side yields 0.0,
/// flagged degenerate.
pub fn context_wls<S: AsRef<str>>(source: &[S], target: &[S], q_len: usize, cap: usize) -> Score {
    assert!(q_len >= 1, "q-gram length must be positive");
    let source = top_tokens(source, cap);
    let target = top_tokens(target, cap);
    if source.is_empty() || target.is_empty() {
        return Score::degenerate(0.0);
    }
    let target: Vec<(Vec<char>, usize)> = target.into_iter().map(|(t, n)| (t.chars().collect(), n)).collect();
    let mut weighted = 0.0;
    let mut weight = 0usize;
    for (s, ns) in source {
        let s: Vec<char> = s.chars().collect();
        for (t, nt) in &target {
            let w = ns * nt;
            weighted += w as f64 * wls_chars(&s, t, q_len).value;
            weight += w;
        }
    }
    Score::new(weighted / weight as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn levenshtein_examples() {
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("abc", ""), 3);
        assert_eq!(levenshtein("abc", "abc"), 0);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("कमल", "कमला"), 1);
    }

    #[test]
    fn ned_examples() {
        assert_eq!(ned_similarity("abc", "abc").value, 1.0);
        assert_eq!(ned_similarity("abcd", "").value, 0.0);
        assert!(close(ned_similarity("abcd", "abcf").value, 0.75));
        let both_empty = ned_similarity("", "");
        assert_eq!(both_empty.value, 1.0);
        assert!(both_empty.degenerate);
    }

    #[test]
    fn qgram_examples() {
        assert_eq!(qgram_distance("abab", "abab", 2), 0);
        assert_eq!(qgram_distance("abcd", "abce", 2), 2);
        assert_eq!(qgram_distance("a", "b", 2), 0);
        assert!(close(qgram_similarity("abcd", "abcd", 2).value, 1.0));
        assert!(close(qgram_similarity("abcd", "abce", 2).value, 1.0 - 2.0 / 6.0));
        let none = qgram_similarity("a", "b", 2);
        assert_eq!(none.value, 1.0);
        assert!(none.degenerate);
    }

    #[test]
    #[should_panic]
    fn zero_q_panics() {
        qgram_distance("a", "b", 0);
    }

    #[test]
    fn wls_examples() {
        assert!(close(wls("abc", "abc", 2).value, 1.0));
        assert!(close(wls("abcd", "abce", 2).value, 0.75 * 0.75 + 0.25 * (1.0 - 2.0 / 6.0)));
        assert!(close(wls("ab", "xy", 2).value, 0.0));
    }

    #[test]
    fn normalize_examples() {
        let p = normalize_pair(0.6, 0.2).unwrap();
        assert!(close(p.s1, 0.75) && close(p.s2, 0.25));
        let p = normalize_pair(0.0, 0.0).unwrap();
        assert_eq!((p.s1, p.s2), (0.5, 0.5));
        let p = normalize_pair(1.0, 1.0).unwrap();
        assert_eq!((p.s1, p.s2), (0.5, 0.5));
        assert!(matches!(normalize_pair(-0.1, 0.2), Err(Error::Domain(_))));
        assert!(matches!(normalize_pair(f64::NAN, 0.2), Err(Error::Domain(_))));
        assert!(matches!(normalize_pair(0.1, f64::INFINITY), Err(Error::Domain(_))));
    }

    #[test]
    fn top_tokens_orders_by_frequency_then_position() {
        let tokens = ["b", "a", "c", "a", "c", "d"];
        assert_eq!(top_tokens(&tokens, 2), vec![("a", 2), ("c", 2)]);
        assert_eq!(top_tokens(&tokens, 10).len(), 4);
    }

    #[test]
    fn context_wls_weights_duplicates() {
        let s = ["ab", "ab", "xy"];
        let t = ["ab"];
        // (2 * 1.0 + 1 * 0.0) / 3
        assert!(close(context_wls(&s, &t, 2, 50).value, 2.0 / 3.0));
        let empty: [&str; 0] = [];
        let r = context_wls(&s, &empty, 2, 50);
        assert_eq!(r.value, 0.0);
        assert!(r.degenerate);
    }
}
