//! Phonetic feature vectors (PVS feature family).
//!
//! Every Devanagari character in the table carries a binary vector of
//! articulatory features. Words are represented by the mean of their
//! characters' vectors, and contexts by the mean of their words' vectors.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::strsim::normalize_pair;
use crate::vector::{cosine, MeanAccumulator};
use crate::{Error, Result};

const DEFAULT_TABLE_CSV: &str = include_str!("../data/devanagari_phonetic.csv");

/// Binary phonetic feature vectors keyed by character.
#[derive(Debug, Clone, PartialEq)]
pub struct PhoneticFeatureTable {
    entries: HashMap<char, Vec<f64>>,
    feature_names: Vec<String>,
}

impl PhoneticFeatureTable {
    /// The bundled Devanagari table (38 features).
    pub fn devanagari() -> Self {
        Self::from_reader(DEFAULT_TABLE_CSV.as_bytes(), "<bundled devanagari table>")
            .expect("bundled phonetic table is well-formed")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file, &path.display().to_string())
    }

    /// Parse `codepoint_hex,f1,...,fF` CSV with a header row and 0/1 cells.
    pub fn from_reader<R: Read>(reader: R, source_name: &str) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = csv
            .headers()
            .map_err(|e| Error::parse(source_name, 1, e.to_string()))?
            .clone();
        if headers.get(0).map(str::trim) != Some("codepoint_hex") {
            return Err(Error::parse(source_name, 1, "first column must be codepoint_hex"));
        }
        let feature_names: Vec<String> = headers.iter().skip(1).map(|h| h.trim().to_owned()).collect();
        if feature_names.is_empty() {
            return Err(Error::parse(source_name, 1, "no feature columns"));
        }

        let mut entries = HashMap::new();
        for (i, record) in csv.records().enumerate() {
            let line = i + 2;
            let record = record.map_err(|e| Error::parse(source_name, line, e.to_string()))?;
            let hex = record.get(0).unwrap_or_default().trim();
            let c = u32::from_str_radix(hex.trim_start_matches("U+"), 16)
                .ok()
                .and_then(char::from_u32)
                .ok_or_else(|| Error::parse(source_name, line, format!("bad codepoint {hex:?}")))?;
            let values = record
                .iter()
                .skip(1)
                .map(|cell| match cell.trim() {
                    "0" => Ok(0.0),
                    "1" => Ok(1.0),
                    other => Err(Error::parse(source_name, line, format!("feature value must be 0 or 1, got {other:?}"))),
                })
                .collect::<Result<Vec<f64>>>()?;
            if values.len() != feature_names.len() {
                return Err(Error::parse(
                    source_name,
                    line,
                    format!("expected {} features, found {}", feature_names.len(), values.len()),
                ));
            }
            if entries.insert(c, values).is_some() {
                return Err(Error::parse(source_name, line, format!("duplicate codepoint {hex}")));
            }
        }
        Ok(PhoneticFeatureTable { entries, feature_names })
    }

    pub fn dimension(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn get(&self, c: char) -> Option<&[f64]> {
        self.entries.get(&c).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Covered characters in codepoint order.
    pub fn characters(&self) -> Vec<char> {
        let mut chars: Vec<char> = self.entries.keys().copied().collect();
        chars.sort_unstable();
        chars
    }
}

/// Mean character vector of a word.
#[derive(Debug, Clone, PartialEq)]
pub struct WordPhoneticVector {
    pub vector: Vec<f64>,
    /// No character of the word was in the table.
    pub oov: bool,
}

/// Average the feature vectors of the word's characters that are in the table.
pub fn word_phonetic_vector(word: &str, table: &PhoneticFeatureTable) -> WordPhoneticVector {
    let mut acc = MeanAccumulator::new(table.dimension());
    for c in word.chars() {
        if let Some(v) = table.get(c) {
            acc.add(v);
        }
    }
    let oov = acc.count() == 0;
    WordPhoneticVector { vector: acc.mean(), oov }
}

fn context_phonetic_vector<S: AsRef<str>>(context: &[S], table: &PhoneticFeatureTable) -> Vec<f64> {
    let mut acc = MeanAccumulator::new(table.dimension());
    for token in context {
        acc.add(&word_phonetic_vector(token.as_ref(), table).vector);
    }
    acc.mean()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhoneticFeatureSet {
    pub pv_s: Vec<f64>,
    pub pv_t: Vec<f64>,
    pub pcv_s: Vec<f64>,
    pub pcv_t: Vec<f64>,
    /// Raw cosine of the word vectors, clamped to [0, 1].
    pub score1: f64,
    /// Raw cosine of the context vectors, clamped to [0, 1].
    pub score2: f64,
    pub p_s1: f64,
    pub p_s2: f64,
    pub word_oov: [bool; 2],
    pub empty_context: [bool; 2],
}

impl PhoneticFeatureSet {
    /// `[PV_S | PV_T | PCV_S | PCV_T | P_S1 | P_S2]`
    pub fn to_values(&self) -> Vec<f64> {
        let mut values = Vec::with_capacity(4 * self.pv_s.len() + 2);
        values.extend_from_slice(&self.pv_s);
        values.extend_from_slice(&self.pv_t);
        values.extend_from_slice(&self.pcv_s);
        values.extend_from_slice(&self.pcv_t);
        values.push(self.p_s1);
        values.push(self.p_s2);
        values
    }
}

/// Phonetic word-pair and contextual features for one candidate pair.
///
/// Both words and all context tokens must already be in Devanagari.
pub fn phonetic_features<S: AsRef<str>>(
    word_s: &str,
    word_t: &str,
    context_s: &[S],
    context_t: &[S],
    table: &PhoneticFeatureTable,
) -> PhoneticFeatureSet {
    let pv_s = word_phonetic_vector(word_s, table);
    let pv_t = word_phonetic_vector(word_t, table);
    let pcv_s = context_phonetic_vector(context_s, table);
    let pcv_t = context_phonetic_vector(context_t, table);

    let clamp = |c: Option<f64>| c.unwrap_or(0.0).clamp(0.0, 1.0);
    let score1 = clamp(cosine(&pv_s.vector, &pv_t.vector));
    let empty_context = [context_s.is_empty(), context_t.is_empty()];
    let score2 = if empty_context[0] || empty_context[1] {
        0.0
    } else {
        clamp(cosine(&pcv_s, &pcv_t))
    };
    let normalized = normalize_pair(score1, score2).expect("clamped scores lie in [0, 1]");

    PhoneticFeatureSet {
        pv_s: pv_s.vector,
        pv_t: pv_t.vector,
        pcv_s,
        pcv_t,
        score1,
        score2,
        p_s1: normalized.s1,
        p_s2: normalized.s2,
        word_oov: [pv_s.oov, pv_t.oov],
        empty_context,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_table() -> PhoneticFeatureTable {
        let csv = "codepoint_hex,a,b,c,d\n\
                   0061,1,0,0,0\n\
                   0062,0,1,0,0\n\
                   0063,1,1,0,0\n\
                   0064,0,0,1,1\n";
        PhoneticFeatureTable::from_reader(csv.as_bytes(), "toy").unwrap()
    }

    #[test]
    fn bundled_table_has_38_binary_features() {
        let table = PhoneticFeatureTable::devanagari();
        assert_eq!(table.dimension(), 38);
        assert!(table.len() >= 90);
        for c in table.characters() {
            let v = table.get(c).unwrap();
            assert!(v.iter().all(|&x| x == 0.0 || x == 1.0));
            assert!(v.contains(&1.0), "{c:?} has an all-zero vector");
        }
        for c in ['क', 'ख', 'ा', 'ि', '्', 'ं', 'अ', '०'] {
            assert!(table.get(c).is_some(), "{c:?} missing");
        }
    }

    #[test]
    fn distinct_consonants_have_distinct_vectors() {
        let table = PhoneticFeatureTable::devanagari();
        for c in '\u{0915}'..='\u{0939}' {
            for d in '\u{0915}'..='\u{0939}' {
                if c < d {
                    if let (Some(u), Some(v)) = (table.get(c), table.get(d)) {
                        assert_ne!(u, v, "{c} and {d} collide");
                    }
                }
            }
        }
    }

    #[test]
    fn single_character_word_is_its_table_vector() {
        let t = toy_table();
        let w = word_phonetic_vector("a", &t);
        assert_eq!(w.vector, vec![1.0, 0.0, 0.0, 0.0]);
        assert!(!w.oov);
    }

    #[test]
    fn two_character_word_is_the_mean() {
        let t = toy_table();
        assert_eq!(word_phonetic_vector("ab", &t).vector, vec![0.5, 0.5, 0.0, 0.0]);
        // uncovered characters are skipped, not zero-imputed
        assert_eq!(word_phonetic_vector("a-b!", &t).vector, vec![0.5, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn uncovered_word_is_zero_and_oov() {
        let t = toy_table();
        let w = word_phonetic_vector("xyz", &t);
        assert_eq!(w.vector, vec![0.0; 4]);
        assert!(w.oov);
    }

    #[test]
    fn identical_words_and_contexts() {
        let t = toy_table();
        let ctx = ["ab", "d"];
        let f = phonetic_features("abc", "abc", &ctx, &ctx, &t);
        assert!((f.score1 - 1.0).abs() < 1e-12);
        assert!((f.score2 - 1.0).abs() < 1e-12);
        assert!((f.p_s1 - 0.5).abs() < 1e-12 && (f.p_s2 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_words_identical_contexts() {
        let t = toy_table();
        let ctx = ["c"];
        let f = phonetic_features("a", "d", &ctx, &ctx, &t);
        assert_eq!(f.score1, 0.0);
        assert!((f.score2 - 1.0).abs() < 1e-12);
        assert_eq!(f.p_s1, 0.0);
        assert!((f.p_s2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_cosine_on_both_sides() {
        let csv = "codepoint_hex,f1,f2,f3\n0078,1,1,0\n0079,0,1,1\n";
        let t = PhoneticFeatureTable::from_reader(csv.as_bytes(), "half").unwrap();
        // [1,1,0]·[0,1,1] = 1, norms sqrt2*sqrt2 = 2 -> cos 0.5
        let f = phonetic_features("x", "y", &["x"], &["y"], &t);
        assert!((f.score1 - 0.5).abs() < 1e-12);
        assert!((f.score2 - 0.5).abs() < 1e-12);
        assert!((f.p_s1 - 0.5).abs() < 1e-12);
        assert!((f.p_s2 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_context_zeroes_score2() {
        let t = toy_table();
        let empty: [&str; 0] = [];
        let f = phonetic_features("a", "a", &["a"], &empty, &t);
        assert_eq!(f.score2, 0.0);
        assert_eq!(f.pcv_t, vec![0.0; 4]);
        assert_eq!(f.empty_context, [false, true]);
        assert_eq!((f.p_s1, f.p_s2), (1.0, 0.0));
    }

    #[test]
    fn feature_layout_has_4f_plus_2_values() {
        let t = PhoneticFeatureTable::devanagari();
        let f = phonetic_features("कमल", "कमला", &["जल"], &["पानी"], &t);
        assert_eq!(f.to_values().len(), 4 * 38 + 2);
    }

    #[test]
    fn rejects_non_binary_cells() {
        let csv = "codepoint_hex,f1\n0061,2\n";
        let err = PhoneticFeatureTable::from_reader(csv.as_bytes(), "bad").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn rejects_missing_codepoint_header() {
        let csv = "char,f1\n0061,1\n";
        assert!(PhoneticFeatureTable::from_reader(csv.as_bytes(), "bad").is_err());
    }
}
