//! Labeled candidate pairs and the dataset TSV format.

use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::script::standardize;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    NonCognate,
    Cognate,
}

impl Label {
    pub fn from_bit(bit: u8) -> Option<Label> {
        match bit {
            0 => Some(Label::NonCognate),
            1 => Some(Label::Cognate),
            _ => None,
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Label::NonCognate => 0,
            Label::Cognate => 1,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.bit())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}

/// A labeled candidate: a source (Hindi) word and a target-language word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordPair {
    /// Language pair code such as `hi-gu`.
    pub language_pair: String,
    pub word_s: String,
    pub word_t: String,
    pub label: Label,
}

impl WordPair {
    /// Build a pair, transliterating both words to Devanagari.
    pub fn new(language_pair: &str, word_s: &str, word_t: &str, label: Label) -> Result<Self> {
        let word_s = standardize(word_s.trim());
        let word_t = standardize(word_t.trim());
        if word_s.is_empty() || word_t.is_empty() {
            return Err(Error::InvalidInput("word pair with an empty word".into()));
        }
        Ok(WordPair {
            language_pair: language_pair.to_owned(),
            word_s,
            word_t,
            label,
        })
    }
}

/// Read `lang_pair TAB word_s TAB word_t TAB label` rows; blank lines and `#` comments are skipped.
pub fn read_pairs<R: Read>(reader: R, source_name: &str) -> Result<Vec<WordPair>> {
    read_rows(reader, source_name, true).map(|rows| rows.into_iter().map(|(pair, _)| pair).collect())
}

/// Like [`read_pairs`] but the label column is optional. Unlabeled rows
/// come back as `(pair, None)` with a placeholder non-cognate label.
pub fn read_candidates<R: Read>(reader: R, source_name: &str) -> Result<Vec<(WordPair, Option<Label>)>> {
    read_rows(reader, source_name, false)
}

fn read_rows<R: Read>(reader: R, source_name: &str, require_label: bool) -> Result<Vec<(WordPair, Option<Label>)>> {
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::parse(source_name, lineno, e.to_string()))?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let (lang, s, t, label) = match fields.as_slice() {
            [lang, s, t, label] => (lang, s, t, Some(label)),
            [lang, s, t] if !require_label => (lang, s, t, None),
            _ => {
                let expected = if require_label { "4" } else { "3 or 4" };
                return Err(Error::parse(
                    source_name,
                    lineno,
                    format!("expected {expected} tab-separated fields, found {}", fields.len()),
                ));
            }
        };
        let label = label
            .map(|l| {
                l.trim()
                    .parse::<u8>()
                    .ok()
                    .and_then(Label::from_bit)
                    .ok_or_else(|| Error::parse(source_name, lineno, format!("label must be 1 or 0, got {l:?}")))
            })
            .transpose()?;
        let pair = WordPair::new(lang.trim(), s, t, label.unwrap_or(Label::NonCognate))
            .map_err(|e| Error::parse(source_name, lineno, e.to_string()))?;
        rows.push((pair, label));
    }
    Ok(rows)
}

pub fn load_pairs(path: impl AsRef<Path>) -> Result<Vec<WordPair>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_pairs(file, &path.display().to_string())
}

pub fn write_pairs<W: Write>(mut out: W, pairs: &[WordPair]) -> std::io::Result<()> {
    for p in pairs {
        writeln!(out, "{}\t{}\t{}\t{}", p.language_pair, p.word_s, p.word_t, p.label)?;
    }
    Ok(())
}

/// Class counts `(cognates, non-cognates)`.
pub fn label_counts(pairs: &[WordPair]) -> (usize, usize) {
    let pos = pairs.iter().filter(|p| p.label == Label::Cognate).count();
    (pos, pairs.len() - pos)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn candidates_may_omit_the_label() {
        let rows = read_candidates("hi-mr\tक\tख\nhi-mr\tग\tघ\t1\n".as_bytes(), "t").unwrap();
        assert_eq!(rows[0].1, None);
        assert_eq!(rows[1].1, Some(Label::Cognate));
        assert!(read_pairs("hi-mr\tक\tख\n".as_bytes(), "t").is_err());
        assert!(read_candidates("hi-mr\tक\n".as_bytes(), "t").is_err());
    }

    #[test]
    fn parses_rows_and_skips_comments() {
        let text = "# header\nhi-gu\tकमल\t\u{0A95}\u{0AAE}\u{0AB3}\t1\n\nhi-gu\tघर\tવન\t0\n";
        let pairs = read_pairs(text.as_bytes(), "d.tsv").unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].word_t, "कमळ");
        assert_eq!(pairs[0].label, Label::Cognate);
        assert_eq!(label_counts(&pairs), (1, 1));
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(matches!(
            read_pairs("hi-gu\ta\tb\n".as_bytes(), "d"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(read_pairs("hi-gu\ta\tb\t2\n".as_bytes(), "d").is_err());
        assert!(read_pairs("hi-gu\t \tb\t1\n".as_bytes(), "d").is_err());
    }

    #[test]
    fn write_then_read() {
        let pairs = vec![WordPair::new("hi-te", "जल", "जलम", Label::Cognate).unwrap()];
        let mut out = Vec::new();
        write_pairs(&mut out, &pairs).unwrap();
        assert_eq!(read_pairs(out.as_slice(), "x").unwrap(), pairs);
    }
}
