//! Pre-aligned cross-lingual word vectors and angular similarity.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::strsim::{normalize_pair, Score};
use crate::vector::{is_zero, norm, MeanAccumulator};
use crate::{Error, Result};

/// Word vectors for one language, all of the same dimension.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    language: String,
    dimension: usize,
    index: HashMap<String, usize>,
    data: Vec<f32>,
    /// Free-form provenance label, e.g. the alignment method.
    pub source_tag: String,
    duplicates: usize,
}

/// Result of [`EmbeddingTable::lookup`].
#[derive(Debug, Clone, PartialEq)]
pub struct Lookup {
    pub vector: Vec<f64>,
    pub oov: bool,
}

impl EmbeddingTable {
    pub fn new(language: impl Into<String>, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidInput("embedding dimension must be positive".into()));
        }
        Ok(EmbeddingTable {
            language: language.into(),
            dimension,
            index: HashMap::new(),
            data: Vec::new(),
            source_tag: String::new(),
            duplicates: 0,
        })
    }

    /// Insert a vector. Returns `false` (and keeps the old vector) if the word is already present.
    pub fn insert(&mut self, word: &str, vector: &[f32]) -> Result<bool> {
        if word.is_empty() || word.chars().any(char::is_whitespace) {
            return Err(Error::InvalidInput(format!("invalid vocabulary key {word:?}")));
        }
        if vector.len() != self.dimension {
            return Err(Error::Dimension {
                expected: self.dimension,
                found: vector.len(),
            });
        }
        if self.index.contains_key(word) {
            self.duplicates += 1;
            return Ok(false);
        }
        self.index.insert(word.to_owned(), self.index.len());
        self.data.extend_from_slice(vector);
        Ok(true)
    }

    /// Load a word2vec text file: a `<count> <dimension>` header, then `word v1 ... vd` rows.
    pub fn load(path: impl AsRef<Path>, language: &str) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut table = Self::from_reader(file, language, &path.display().to_string())?;
        table.source_tag = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        Ok(table)
    }

    pub fn from_reader<R: Read>(reader: R, language: &str, source_name: &str) -> Result<Self> {
        let mut lines = BufReader::new(reader).lines();
        let header = match lines.next() {
            Some(line) => line.map_err(|e| Error::parse(source_name, 1, e.to_string()))?,
            None => return Err(Error::parse(source_name, 1, "empty file, missing header")),
        };
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (declared, dimension) = match fields.as_slice() {
            [count, dim] => match (count.parse::<usize>(), dim.parse::<usize>()) {
                (Ok(c), Ok(d)) if d > 0 => (c, d),
                _ => return Err(Error::parse(source_name, 1, format!("malformed header {header:?}"))),
            },
            _ => return Err(Error::parse(source_name, 1, format!("malformed header {header:?}"))),
        };

        let mut table = EmbeddingTable::new(language, dimension)?;
        let mut buf = Vec::with_capacity(dimension);
        let mut rows = 0;
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            let line = line.map_err(|e| Error::parse(source_name, lineno, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let word = parts.next().expect("non-blank line has a first field");
            buf.clear();
            for part in parts {
                let x: f32 = part
                    .parse()
                    .map_err(|_| Error::parse(source_name, lineno, format!("non-numeric component {part:?}")))?;
                buf.push(x);
            }
            if buf.len() != dimension {
                return Err(Error::parse(
                    source_name,
                    lineno,
                    format!("expected {dimension} components, found {}", buf.len()),
                ));
            }
            rows += 1;
            if !table.insert(word, &buf)? {
                log::warn!("{source_name}:{lineno}: duplicate word {word:?}, keeping first occurrence");
            }
        }
        if rows != declared {
            log::warn!("{source_name}: header declares {declared} rows, found {rows}");
        }
        Ok(table)
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Rows skipped at load time because their word was already present.
    pub fn duplicate_count(&self) -> usize {
        self.duplicates
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        let i = *self.index.get(word)?;
        Some(&self.data[i * self.dimension..(i + 1) * self.dimension])
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    /// The stored vector, or the zero vector flagged as out-of-vocabulary.
    pub fn lookup(&self, word: &str) -> Lookup {
        match self.get(word) {
            Some(v) => Lookup {
                vector: v.iter().map(|&x| f64::from(x)).collect(),
                oov: false,
            },
            None => Lookup {
                vector: vec![0.0; self.dimension],
                oov: true,
            },
        }
    }

    /// Write the table in word2vec text format, in insertion order.
    pub fn write_text<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut words: Vec<(&String, &usize)> = self.index.iter().collect();
        words.sort_by_key(|(_, &i)| i);
        writeln!(out, "{} {}", words.len(), self.dimension)?;
        for (word, &i) in words {
            write!(out, "{word}")?;
            for x in &self.data[i * self.dimension..(i + 1) * self.dimension] {
                write!(out, " {x}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// `1 - arccos(cos(u, v)) / pi`, in [0, 1].
///
/// The angle is evaluated as `2 atan2(|u' - v'|, |u' + v'|)` on the unit
/// vectors `u'`, `v'`, which equals the arccos form but stays accurate for
/// nearly parallel and nearly antiparallel vectors. A zero vector on either
/// side gives 0.0 flagged degenerate.
///
/// # Panics
/// If `u` and `v` differ in length.
pub fn angular_similarity(u: &[f64], v: &[f64]) -> Score {
    assert_eq!(u.len(), v.len(), "angular similarity of vectors with different dimensions");
    if is_zero(u) || is_zero(v) {
        return Score::degenerate(0.0);
    }
    let (nu, nv) = (norm(u), norm(v));
    let (mut diff, mut sum) = (0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        let (a, b) = (a / nu, b / nv);
        diff += (a - b) * (a - b);
        sum += (a + b) * (a + b);
    }
    let angle = 2.0 * diff.sqrt().atan2(sum.sqrt());
    Score::new((1.0 - angle / std::f64::consts::PI).clamp(0.0, 1.0))
}

/// How out-of-vocabulary context tokens enter the context mean.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContextOovMode {
    /// OOV tokens count as zero vectors.
    #[default]
    IncludeAsZero,
    /// OOV tokens are left out of the mean.
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossLingualFeatureSet {
    pub wv_s: Vec<f64>,
    pub wv_t: Vec<f64>,
    pub cv_s: Vec<f64>,
    pub cv_t: Vec<f64>,
    pub score1: f64,
    pub score2: f64,
    pub s1: f64,
    pub s2: f64,
    /// `[word_s, word_t, context_s, context_t]`; a context is flagged when its mean is the zero vector.
    pub oov_flags: [bool; 4],
    /// Number of OOV context tokens on each side.
    pub context_oov_tokens: [usize; 2],
}

impl CrossLingualFeatureSet {
    /// `[WV_S | WV_T | CV_S | CV_T | s1 | s2]`
    pub fn to_values(&self) -> Vec<f64> {
        let mut values = Vec::with_capacity(4 * self.wv_s.len() + 2);
        values.extend_from_slice(&self.wv_s);
        values.extend_from_slice(&self.wv_t);
        values.extend_from_slice(&self.cv_s);
        values.extend_from_slice(&self.cv_t);
        values.push(self.s1);
        values.push(self.s2);
        values
    }
}

fn context_vector<S: AsRef<str>>(tokens: &[S], table: &EmbeddingTable, mode: ContextOovMode) -> (Vec<f64>, usize) {
    let mut acc = MeanAccumulator::new(table.dimension());
    let mut oov = 0;
    for token in tokens {
        match table.get(token.as_ref()) {
            Some(v) => acc.add(v),
            None => {
                oov += 1;
                if mode == ContextOovMode::IncludeAsZero {
                    acc.add_zero();
                }
            }
        }
    }
    (acc.mean(), oov)
}

/// Cross-lingual word-pair and contextual features for one candidate pair.
pub fn crosslingual_features<S: AsRef<str>>(
    word_s: &str,
    word_t: &str,
    context_s: &[S],
    context_t: &[S],
    source: &EmbeddingTable,
    target: &EmbeddingTable,
    mode: ContextOovMode,
) -> Result<CrossLingualFeatureSet> {
    if source.dimension() != target.dimension() {
        return Err(Error::Dimension {
            expected: source.dimension(),
            found: target.dimension(),
        });
    }
    let wv_s = source.lookup(word_s);
    let wv_t = target.lookup(word_t);
    let (cv_s, oov_s) = context_vector(context_s, source, mode);
    let (cv_t, oov_t) = context_vector(context_t, target, mode);

    let score1 = angular_similarity(&wv_s.vector, &wv_t.vector).value;
    let score2 = angular_similarity(&cv_s, &cv_t).value;
    let normalized = normalize_pair(score1, score2)?;
    let oov_flags = [
        wv_s.oov,
        wv_t.oov,
        cv_s.iter().all(|&x| x == 0.0),
        cv_t.iter().all(|&x| x == 0.0),
    ];

    Ok(CrossLingualFeatureSet {
        wv_s: wv_s.vector,
        wv_t: wv_t.vector,
        cv_s,
        cv_t,
        score1,
        score2,
        s1: normalized.s1,
        s2: normalized.s2,
        oov_flags,
        context_oov_tokens: [oov_s, oov_t],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(text: &str) -> EmbeddingTable {
        EmbeddingTable::from_reader(text.as_bytes(), "xx", "test").unwrap()
    }

    #[test]
    fn loads_well_formed_file() {
        let t = table("2 3\nकमल 1 0 0\nजल 0 1 0.5\n");
        assert_eq!(t.len(), 2);
        assert_eq!(t.dimension(), 3);
        assert_eq!(t.get("जल").unwrap(), &[0.0, 1.0, 0.5]);
    }

    #[test]
    fn short_row_names_its_line() {
        let err = EmbeddingTable::from_reader("2 3\na 1 0 0\nb 1 0\n".as_bytes(), "xx", "f.vec").unwrap_err();
        match err {
            Error::Parse { line, source_name, .. } => {
                assert_eq!(line, 3);
                assert_eq!(source_name, "f.vec");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_header_and_components() {
        assert!(EmbeddingTable::from_reader("3\na 1 2 3\n".as_bytes(), "xx", "t").is_err());
        assert!(EmbeddingTable::from_reader("x y\n".as_bytes(), "xx", "t").is_err());
        assert!(EmbeddingTable::from_reader("1 0\n".as_bytes(), "xx", "t").is_err());
        assert!(EmbeddingTable::from_reader("".as_bytes(), "xx", "t").is_err());
        let err = EmbeddingTable::from_reader("1 2\na 1 zz\n".as_bytes(), "xx", "t").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn duplicates_keep_first() {
        let t = table("3 2\na 1 0\nb 0 1\na 5 5\n");
        assert_eq!(t.len(), 2);
        assert_eq!(t.duplicate_count(), 1);
        assert_eq!(t.get("a").unwrap(), &[1.0, 0.0]);
    }

    #[test]
    fn lookup_present_absent_and_empty() {
        let t = table("1 2\na 1 2\n");
        assert_eq!(
            t.lookup("a"),
            Lookup {
                vector: vec![1.0, 2.0],
                oov: false
            }
        );
        assert_eq!(t.lookup("b"), Lookup { vector: vec![0.0; 2], oov: true });
        assert!(t.lookup("").oov);
    }

    #[test]
    fn write_text_round_trips() {
        let t = table("2 2\nb 0.25 -1\na 1 2\n");
        let mut out = Vec::new();
        t.write_text(&mut out).unwrap();
        let back = EmbeddingTable::from_reader(out.as_slice(), "xx", "t").unwrap();
        assert_eq!(back.get("b"), t.get("b"));
        assert_eq!(String::from_utf8(out).unwrap().lines().nth(1), Some("b 0.25 -1"));
    }

    #[test]
    fn angular_anchors() {
        let u = [0.3, -1.2, 2.0];
        assert!((angular_similarity(&u, &u).value - 1.0).abs() < 1e-9);
        assert!((angular_similarity(&[1.0, 0.0], &[0.0, 4.0]).value - 0.5).abs() < 1e-12);
        let neg: Vec<f64> = u.iter().map(|x| -x).collect();
        assert!(angular_similarity(&u, &neg).value.abs() < 1e-9);
        let zero = angular_similarity(&u, &[0.0; 3]);
        assert_eq!(zero.value, 0.0);
        assert!(zero.degenerate);
    }

    #[test]
    fn both_words_oov() {
        let src = table("1 2\nx 1 0\n");
        let tgt = table("1 2\ny 1 0\n");
        let f = crosslingual_features("a", "b", &["x"], &["y"], &src, &tgt, ContextOovMode::default()).unwrap();
        assert_eq!(f.wv_s, vec![0.0; 2]);
        assert_eq!(f.score1, 0.0);
        assert_eq!(f.s1, 0.0);
        assert_eq!(f.oov_flags, [true, true, false, false]);
    }

    #[test]
    fn identical_words_and_contexts() {
        let src = table("2 2\nw 1 2\nc 3 1\n");
        let f = crosslingual_features("w", "w", &["c"], &["c"], &src, &src, ContextOovMode::default()).unwrap();
        assert!((f.score1 - 1.0).abs() < 1e-9 && (f.score2 - 1.0).abs() < 1e-9);
        assert!((f.s1 - 0.5).abs() < 1e-9);
    }

    #[test]
    fn sixty_and_ninety_degrees() {
        let h = 3f64.sqrt() / 2.0;
        let src = table("2 3\nw 1 0 0\nc 0 0 1\n");
        let tgt = table(&format!("2 3\nw 0.5 {h} 0\nc 0 1 0\n"));
        let f = crosslingual_features("w", "w", &["c"], &["c"], &src, &tgt, ContextOovMode::default()).unwrap();
        assert!((f.score1 - 2.0 / 3.0).abs() < 1e-6);
        assert!((f.score2 - 0.5).abs() < 1e-9);
        assert!((f.s1 - (2.0 / 3.0) / (2.0 / 3.0 + 0.5)).abs() < 1e-6);
    }

    #[test]
    fn context_oov_modes() {
        let src = table("1 2\nc 2 4\n");
        let f = crosslingual_features("w", "w", &["c", "zz"], &["c"], &src, &src, ContextOovMode::IncludeAsZero).unwrap();
        assert_eq!(f.cv_s, vec![1.0, 2.0]);
        assert_eq!(f.context_oov_tokens, [1, 0]);
        let f = crosslingual_features("w", "w", &["c", "zz"], &["c"], &src, &src, ContextOovMode::Skip).unwrap();
        assert_eq!(f.cv_s, vec![2.0, 4.0]);
    }

    #[test]
    fn mismatched_dimensions_error() {
        let a = table("1 2\nx 1 0\n");
        let b = table("1 3\nx 1 0 0\n");
        let empty: [&str; 0] = [];
        assert!(crosslingual_features("x", "x", &empty, &empty, &a, &b, ContextOovMode::default()).is_err());
    }
}
