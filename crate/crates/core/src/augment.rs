//! Parallel-corpus preparation: cognate injection and byte-pair encoding.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::dataset::WordPair;
use crate::{Error, Result};

pub const DEFAULT_MERGES: usize = 2500;
/// Marks the last symbol of a word during learning.
pub const END_OF_WORD: &str = "</w>";
/// Appended to every non-final subword when segmenting.
pub const CONTINUATION: &str = "@@";
const MERGES_HEADER: &str = "#version: 0.2";

/// Two line-aligned sides of a parallel corpus.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParallelCorpus {
    src: Vec<String>,
    tgt: Vec<String>,
}

impl ParallelCorpus {
    pub fn new(src: Vec<String>, tgt: Vec<String>) -> Result<Self> {
        if src.len() != tgt.len() {
            return Err(Error::InvalidInput(format!(
                "corpus sides differ in length: {} vs {} lines",
                src.len(),
                tgt.len()
            )));
        }
        Ok(ParallelCorpus { src, tgt })
    }

    pub fn load(src: impl AsRef<Path>, tgt: impl AsRef<Path>) -> Result<Self> {
        Self::new(read_lines_file(src.as_ref())?, read_lines_file(tgt.as_ref())?)
    }

    pub fn src_lines(&self) -> &[String] {
        &self.src
    }

    pub fn tgt_lines(&self) -> &[String] {
        &self.tgt
    }

    pub fn len(&self) -> usize {
        self.src.len()
    }

    pub fn is_empty(&self) -> bool {
        self.src.is_empty()
    }

    pub fn write(&self, src: impl AsRef<Path>, tgt: impl AsRef<Path>) -> Result<()> {
        write_lines_file(src.as_ref(), &self.src)?;
        write_lines_file(tgt.as_ref(), &self.tgt)
    }
}

pub fn read_lines<R: Read>(reader: R) -> std::io::Result<Vec<String>> {
    BufReader::new(reader).lines().collect()
}

fn read_lines_file(path: &Path) -> Result<Vec<String>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_lines(file).map_err(|e| Error::io(path, e))
}

fn write_lines_file(path: &Path, lines: &[String]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    for line in lines {
        writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Outcome of [`inject_cognates`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Injection {
    pub corpus: ParallelCorpus,
    pub injected: usize,
    /// Pairs dropped because a side was empty or spanned several tokens.
    pub skipped: usize,
}

/// Append each cognate pair to the end of the corpus as a one-word sentence pair.
pub fn inject_cognates(corpus: &ParallelCorpus, cognates: &[WordPair]) -> Injection {
    let mut out = corpus.clone();
    let mut skipped = 0;
    for pair in cognates {
        let (s, t) = (pair.word_s.trim(), pair.word_t.trim());
        let single = |w: &str| !w.is_empty() && !w.contains(char::is_whitespace);
        if single(s) && single(t) {
            out.src.push(s.to_owned());
            out.tgt.push(t.to_owned());
        } else {
            skipped += 1;
        }
    }
    if skipped > 0 {
        log::warn!("skipped {skipped} cognate pairs with an empty or multi-token side");
    }
    Injection {
        injected: cognates.len() - skipped,
        corpus: out,
        skipped,
    }
}

/// Learned merge operations in priority order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BpeModel {
    merges: Vec<(String, String)>,
    ranks: HashMap<(String, String), usize>,
}

impl BpeModel {
    pub fn from_merges(merges: Vec<(String, String)>) -> Result<Self> {
        let mut ranks = HashMap::with_capacity(merges.len());
        for (rank, pair) in merges.iter().enumerate() {
            if ranks.insert(pair.clone(), rank).is_some() {
                return Err(Error::InvalidInput(format!("duplicate merge {} {}", pair.0, pair.1)));
            }
        }
        Ok(BpeModel { merges, ranks })
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn len(&self) -> usize {
        self.merges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.merges.is_empty()
    }

    /// The model restricted to its first `n` merges.
    pub fn truncated(&self, n: usize) -> Self {
        Self::from_merges(self.merges.iter().take(n).cloned().collect()).expect("prefix of a valid model")
    }

    /// Header line, then one `left right` merge per line.
    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{MERGES_HEADER}")?;
        for (l, r) in &self.merges {
            writeln!(out, "{l} {r}")?;
        }
        Ok(())
    }

    pub fn read<R: Read>(reader: R, source_name: &str) -> Result<Self> {
        let mut merges = Vec::new();
        for (i, line) in BufReader::new(reader).lines().enumerate() {
            let line = line.map_err(|e| Error::parse(source_name, i + 1, e.to_string()))?;
            if i == 0 && line.starts_with("#version") {
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(' ').collect();
            match parts.as_slice() {
                [l, r] if !l.is_empty() && !r.is_empty() => merges.push(((*l).to_owned(), (*r).to_owned())),
                _ => return Err(Error::parse(source_name, i + 1, format!("expected `left right`, got {line:?}"))),
            }
        }
        Self::from_merges(merges).map_err(|e| Error::parse(source_name, 0, e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        self.write(&mut out).and_then(|_| out.flush()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(file, &path.display().to_string())
    }

    /// Subword units of one token, with the end-of-word marker removed.
    pub fn segment_word(&self, token: &str) -> Vec<String> {
        let mut symbols = initial_symbols(token);
        loop {
            let best = symbols
                .windows(2)
                .enumerate()
                .filter_map(|(i, w)| {
                    self.ranks
                        .get(&(w[0].clone(), w[1].clone()))
                        .map(|&rank| (rank, i))
                })
                .min();
            let Some((rank, _)) = best else { break };
            let (left, right) = &self.merges[rank];
            symbols = merge_symbols(&symbols, left, right);
        }
        if symbols.last().is_some_and(|s| s == END_OF_WORD) {
            symbols.pop();
        } else if let Some(last) = symbols.last_mut() {
            last.truncate(last.len() - END_OF_WORD.len());
        }
        symbols
    }

    /// Segment every whitespace token of `line`, marking non-final subwords with `@@`.
    pub fn apply(&self, line: &str) -> String {
        let mut out: Vec<String> = Vec::new();
        for token in line.split_whitespace() {
            let pieces = self.segment_word(token);
            let last = pieces.len().saturating_sub(1);
            for (i, piece) in pieces.into_iter().enumerate() {
                if i < last {
                    out.push(format!("{piece}{CONTINUATION}"));
                } else {
                    out.push(piece);
                }
            }
        }
        out.join(" ")
    }
}

/// Characters of `word`, the last one carrying the end-of-word marker as a separate symbol.
fn initial_symbols(word: &str) -> Vec<String> {
    let mut symbols: Vec<String> = word.chars().map(String::from).collect();
    symbols.push(END_OF_WORD.to_owned());
    symbols
}

/// Replace every left-to-right, non-overlapping occurrence of `left right` with their concatenation.
fn merge_symbols(symbols: &[String], left: &str, right: &str) -> Vec<String> {
    let mut out = Vec::with_capacity(symbols.len());
    let mut i = 0;
    while i < symbols.len() {
        if i + 1 < symbols.len() && symbols[i] == left && symbols[i + 1] == right {
            out.push(format!("{left}{right}"));
            i += 2;
        } else {
            out.push(symbols[i].clone());
            i += 1;
        }
    }
    out
}

/// Inverse of [`BpeModel::apply`] on a segmented line.
pub fn remove_markers(line: &str) -> String {
    line.replace(&format!("{CONTINUATION} "), "")
}

type Pair = (String, String);

fn pair_counts(words: &[(Vec<String>, usize)]) -> (HashMap<Pair, usize>, HashMap<Pair, HashSet<usize>>) {
    let mut counts: HashMap<Pair, usize> = HashMap::new();
    let mut index: HashMap<Pair, HashSet<usize>> = HashMap::new();
    for (wi, (symbols, freq)) in words.iter().enumerate() {
        for w in symbols.windows(2) {
            let pair = (w[0].clone(), w[1].clone());
            *counts.entry(pair.clone()).or_insert(0) += freq;
            index.entry(pair).or_default().insert(wi);
        }
    }
    (counts, index)
}

/// Learn up to `merge_count` merges from whitespace-tokenized lines.
///
/// Each step merges the most frequent adjacent symbol pair, ties going to
/// the lexicographically smallest pair. Learning stops early once no pair
/// occurs at least twice.
pub fn bpe_learn<S: AsRef<str>>(lines: &[S], merge_count: usize) -> BpeModel {
    let mut vocab: HashMap<&str, usize> = HashMap::new();
    for line in lines {
        for token in line.as_ref().split_whitespace() {
            *vocab.entry(token).or_insert(0) += 1;
        }
    }
    let mut sorted: Vec<(&str, usize)> = vocab.into_iter().collect();
    sorted.sort_unstable();
    let mut words: Vec<(Vec<String>, usize)> = sorted.into_iter().map(|(w, f)| (initial_symbols(w), f)).collect();

    let (mut counts, mut index) = pair_counts(&words);
    let mut merges = Vec::new();
    while merges.len() < merge_count {
        let best = counts
            .iter()
            .filter(|(_, &c)| c >= 2)
            .max_by(|(pa, ca), (pb, cb)| ca.cmp(cb).then_with(|| pb.cmp(pa)))
            .map(|(p, _)| p.clone());
        let Some(best) = best else { break };

        let affected: Vec<usize> = index.get(&best).map(|s| s.iter().copied().collect()).unwrap_or_default();
        for wi in affected {
            let (symbols, freq) = &words[wi];
            let freq = *freq;
            for w in symbols.windows(2) {
                let pair = (w[0].clone(), w[1].clone());
                if let Some(c) = counts.get_mut(&pair) {
                    *c -= freq;
                    if *c == 0 {
                        counts.remove(&pair);
                    }
                }
                if let Some(set) = index.get_mut(&pair) {
                    set.remove(&wi);
                }
            }
            let merged = merge_symbols(symbols, &best.0, &best.1);
            for w in merged.windows(2) {
                let pair = (w[0].clone(), w[1].clone());
                *counts.entry(pair.clone()).or_insert(0) += freq;
                index.entry(pair).or_default().insert(wi);
            }
            words[wi].0 = merged;
        }
        counts.remove(&best);
        index.remove(&best);
        merges.push(best);
    }
    BpeModel::from_merges(merges).expect("a merged pair never reappears")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Label;

    fn corpus(n: usize) -> ParallelCorpus {
        let src = (0..n).map(|i| format!("स्रोत वाक्य {i}")).collect();
        let tgt = (0..n).map(|i| format!("लक्ष्य वाक्य {i}")).collect();
        ParallelCorpus::new(src, tgt).unwrap()
    }

    fn cognate(s: &str, t: &str) -> WordPair {
        WordPair::new("hi-te", s, t, Label::Cognate).unwrap()
    }

    #[test]
    fn injection_appends_single_word_lines() {
        let base = corpus(3);
        let out = inject_cognates(&base, &[cognate("जल", "जलम"), cognate("कमल", "कमलम")]);
        assert_eq!(out.corpus.len(), 5);
        assert_eq!(out.corpus.src_lines()[..3], base.src_lines()[..]);
        assert_eq!(out.corpus.tgt_lines()[..3], base.tgt_lines()[..]);
        assert_eq!(out.corpus.src_lines()[4], "कमल");
        assert_eq!(out.corpus.tgt_lines()[3], "जलम");
        assert_eq!(out.injected, 2);
    }

    #[test]
    fn injecting_nothing_is_identity() {
        let base = corpus(4);
        assert_eq!(inject_cognates(&base, &[]).corpus, base);
    }

    #[test]
    fn pairs_with_empty_or_multiword_sides_are_skipped() {
        let mut bad = cognate("जल", "जलम");
        bad.word_t = " ".into();
        let mut spaced = cognate("जल", "जलम");
        spaced.word_s = "दो शब्द".into();
        let out = inject_cognates(&corpus(1), &[bad, spaced, cognate("घर", "घरु")]);
        assert_eq!(out.corpus.len(), 2);
        assert_eq!(out.skipped, 2);
    }

    #[test]
    fn mismatched_sides_are_rejected() {
        assert!(ParallelCorpus::new(vec!["a".into()], vec![]).is_err());
    }

    #[test]
    fn first_merge_on_aaab_corpus() {
        let model = bpe_learn(&["aaab aaab"], 1);
        assert_eq!(model.merges(), [("a".to_owned(), "a".to_owned())]);
    }

    #[test]
    fn zero_merges() {
        assert!(bpe_learn(&["aaab aaab"], 0).is_empty());
    }

    #[test]
    fn stops_when_no_pair_repeats() {
        let model = bpe_learn(&["a b c d"], 10);
        assert!(model.is_empty());
        let model = bpe_learn(&["ab ab"], 10);
        // (a,b) then (ab,</w>), then nothing repeats
        assert_eq!(model.len(), 2);
    }

    #[test]
    fn ties_break_lexicographically() {
        // (x,y) and (a,b) both occur twice
        let model = bpe_learn(&["xy ab xy ab"], 1);
        assert_eq!(model.merges()[0], ("a".to_owned(), "b".to_owned()));
    }

    #[test]
    fn applies_merges() {
        let model = bpe_learn(&["aaab aaab"], 1);
        assert_eq!(model.apply("aaab"), "aa@@ a@@ b");
        assert_eq!(model.apply("xyz"), "x@@ y@@ z");
        let full = bpe_learn(&["aaab aaab"], 10);
        assert_eq!(full.apply("aaab"), "aaab");
        assert_eq!(full.apply("aaab  xyz"), "aaab x@@ y@@ z");
    }

    #[test]
    fn learning_matches_naive_recount() {
        let lines = ["low lower lowest", "newer newest wider", "low low new"];
        let model = bpe_learn(&lines, 50);
        // naive reference: recount all pairs every step
        let mut words: Vec<(Vec<String>, usize)> = {
            let mut vocab: std::collections::BTreeMap<&str, usize> = Default::default();
            for l in lines {
                for t in l.split_whitespace() {
                    *vocab.entry(t).or_default() += 1;
                }
            }
            vocab.into_iter().map(|(w, f)| (initial_symbols(w), f)).collect()
        };
        let mut expected = Vec::new();
        loop {
            let (counts, _) = pair_counts(&words);
            let best = counts
                .iter()
                .filter(|(_, &c)| c >= 2)
                .max_by(|(pa, ca), (pb, cb)| ca.cmp(cb).then_with(|| pb.cmp(pa)))
                .map(|(p, _)| p.clone());
            let Some(best) = best else { break };
            for w in &mut words {
                w.0 = merge_symbols(&w.0, &best.0, &best.1);
            }
            expected.push(best);
        }
        assert_eq!(model.merges(), expected.as_slice());
    }

    #[test]
    fn merge_file_round_trip() {
        let model = bpe_learn(&["lower lowest lowly low"], 20);
        let mut out = Vec::new();
        model.write(&mut out).unwrap();
        let text = String::from_utf8(out.clone()).unwrap();
        assert!(text.starts_with("#version: 0.2\n"));
        assert_eq!(BpeModel::read(out.as_slice(), "m").unwrap(), model);
        assert!(BpeModel::read("#version: 0.2\na b c\n".as_bytes(), "m").is_err());
        assert!(BpeModel::read("a b\na b\n".as_bytes(), "m").is_err());
    }

    #[test]
    fn markers_come_off() {
        let model = bpe_learn(&["कमल कमला कमल"], 3);
        let line = "कमलों का जल";
        assert_eq!(remove_markers(&model.apply(line)), line);
    }
}
