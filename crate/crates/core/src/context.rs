//! Per-word context dictionaries built from wordnet glosses and examples.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::script::standardize;
use crate::{Error, Result};

/// Map from a word to the tokens of its glosses and example sentences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextDictionary {
    pub language: String,
    entries: BTreeMap<String, Vec<String>>,
    pub stopwords_applied: bool,
    /// Records skipped because they had fewer than two tab-separated fields.
    pub malformed_records: usize,
}

/// Tokens stored for a word; `miss` distinguishes an absent word from an empty entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContextLookup<'a> {
    pub tokens: &'a [String],
    pub miss: bool,
}

/// A stopword list, standardized to Devanagari.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stopwords {
    words: HashSet<String>,
}

impl Stopwords {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file).map_err(|e| Error::io(path, e))
    }

    pub fn from_reader<R: Read>(reader: R) -> std::io::Result<Self> {
        let mut words = HashSet::new();
        for line in BufReader::new(reader).lines() {
            let line = line?;
            let word = line.trim();
            if !word.is_empty() {
                words.insert(standardize(word));
            }
        }
        Ok(Stopwords { words })
    }

    pub fn from_words<I: IntoIterator<Item = S>, S: AsRef<str>>(words: I) -> Self {
        Stopwords {
            words: words.into_iter().map(|w| standardize(w.as_ref())).collect(),
        }
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

fn is_edge_punctuation(c: char) -> bool {
    c.is_ascii_punctuation() || c == '\u{0964}' || c == '\u{0965}'
}

/// Whitespace split, strip dandas and ASCII punctuation at token edges, transliterate to Devanagari.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|raw| raw.trim_matches(is_edge_punctuation))
        .filter(|t| !t.is_empty())
        .map(standardize)
        .collect()
}

impl ContextDictionary {
    pub fn new(language: impl Into<String>) -> Self {
        ContextDictionary {
            language: language.into(),
            entries: BTreeMap::new(),
            stopwords_applied: false,
            malformed_records: 0,
        }
    }

    /// Build from a wordnet export file and an optional stopword file.
    pub fn build(wordnet_export: impl AsRef<Path>, stopwords: Option<&Path>, language: &str) -> Result<Self> {
        let path = wordnet_export.as_ref();
        let stopwords = stopwords.map(Stopwords::load).transpose()?;
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file, stopwords.as_ref(), language).map_err(|e| Error::io(path, e))
    }

    /// Parse `word TAB gloss TAB example1 | example2 | ...` records.
    ///
    /// Records for the same word are merged in file order. Stopwords are
    /// removed after transliteration.
    pub fn from_reader<R: Read>(reader: R, stopwords: Option<&Stopwords>, language: &str) -> std::io::Result<Self> {
        let mut dict = ContextDictionary::new(language);
        dict.stopwords_applied = stopwords.is_some();
        for line in BufReader::new(reader).lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let word = fields.next().map(str::trim).unwrap_or_default();
            let gloss = match fields.next() {
                Some(g) if !word.is_empty() => g,
                _ => {
                    dict.malformed_records += 1;
                    continue;
                }
            };
            let mut tokens = tokenize(gloss);
            for examples in fields {
                for example in examples.split('|') {
                    tokens.extend(tokenize(example));
                }
            }
            if let Some(stop) = stopwords {
                tokens.retain(|t| !stop.contains(t));
            }
            dict.entries.entry(standardize(word)).or_default().extend(tokens);
        }
        if dict.malformed_records > 0 {
            log::warn!("{language}: skipped {} malformed context records", dict.malformed_records);
        }
        Ok(dict)
    }

    pub fn insert(&mut self, word: &str, tokens: Vec<String>) {
        self.entries.entry(word.to_owned()).or_default().extend(tokens);
    }

    pub fn context_of(&self, word: &str) -> ContextLookup<'_> {
        match self.entries.get(word) {
            Some(tokens) => ContextLookup { tokens, miss: false },
            None => ContextLookup { tokens: &[], miss: true },
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.entries.iter().map(|(w, t)| (w.as_str(), t.as_slice()))
    }

    /// Fraction of `words` that have a non-empty context.
    pub fn coverage<'a, I: IntoIterator<Item = &'a str>>(&self, words: I) -> f64 {
        let (mut total, mut covered) = (0usize, 0usize);
        for word in words {
            total += 1;
            if !self.context_of(word).tokens.is_empty() {
                covered += 1;
            }
        }
        if total == 0 {
            0.0
        } else {
            covered as f64 / total as f64
        }
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_reader(BufReader::new(file))?)
    }

    /// Load either a saved JSON dictionary (`.json`) or a raw wordnet export.
    pub fn load_any(path: impl AsRef<Path>, stopwords: Option<&Path>, language: &str) -> Result<Self> {
        let path = path.as_ref();
        if path.extension().is_some_and(|e| e == "json") {
            Self::load_json(path)
        } else {
            Self::build(path, stopwords, language)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(text: &str, stop: &[&str]) -> ContextDictionary {
        let stop = Stopwords::from_words(stop.iter().copied());
        ContextDictionary::from_reader(text.as_bytes(), Some(&stop), "hi").unwrap()
    }

    #[test]
    fn tokenizes_and_filters() {
        let d = build("जल\tपानी एक तरल\tजल जीवन है", &["एक", "है"]);
        assert_eq!(d.context_of("जल").tokens, ["पानी", "तरल", "जल", "जीवन"]);
        assert!(d.stopwords_applied);
    }

    #[test]
    fn merges_records_for_the_same_word() {
        let d = build("जल\tपानी\nघर\tमकान\nजल\tनीर", &[]);
        assert_eq!(d.len(), 2);
        assert_eq!(d.context_of("जल").tokens, ["पानी", "नीर"]);
    }

    #[test]
    fn empty_stopwords_remove_nothing() {
        let d = build("जल\tपानी एक तरल", &[]);
        assert_eq!(d.context_of("जल").tokens.len(), 3);
    }

    #[test]
    fn examples_split_on_bars_and_strip_punctuation() {
        let d = build("जल\tतरल।\tजल है, | \"पानी\" ॥", &["है"]);
        assert_eq!(d.context_of("जल").tokens, ["तरल", "जल", "पानी"]);
    }

    #[test]
    fn transliterates_tokens_and_keys() {
        // Bengali key and gloss
        let d = build("\u{099C}\u{09B2}\t\u{09AA}\u{09BE}\u{09A8}\u{09BF}", &[]);
        assert_eq!(d.context_of("जल").tokens, ["पानि"]);
    }

    #[test]
    fn malformed_records_are_counted() {
        let d = build("जल\nघर\tमकान\n\tकुछ", &[]);
        assert_eq!(d.malformed_records, 2);
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn missing_versus_empty_entry() {
        let d = build("जल\tएक है", &["एक", "है"]);
        let present = d.context_of("जल");
        assert!(present.tokens.is_empty());
        assert!(!present.miss);
        let absent = d.context_of("घर");
        assert!(absent.tokens.is_empty());
        assert!(absent.miss);
    }

    #[test]
    fn coverage_counts_nonempty_contexts() {
        let d = build("जल\tपानी\nघर\tएक", &["एक"]);
        assert_eq!(d.coverage(["जल", "घर", "वन", "जल"]), 0.5);
        assert_eq!(d.coverage(std::iter::empty()), 0.0);
    }

    #[test]
    fn missing_file_is_an_error() {
        assert!(matches!(
            ContextDictionary::build("/nonexistent/ctx.tsv", None, "hi"),
            Err(Error::Io { .. })
        ));
    }
}
