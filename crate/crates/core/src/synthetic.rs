//! Seeded synthetic Hindi–Gujarati dataset with every resource the
//! pipeline needs, for tests, benchmarks and demos.
//!
//! Cognates are a source word and a one-edit variant of it whose target
//! embedding is a small perturbation of the source embedding. Non-cognates
//! are unrelated random words with independent embeddings. Context glosses
//! are drawn from a per-language pool regardless of class, and sprinkled
//! with stopwords.

use std::collections::HashSet;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::context::{ContextDictionary, Stopwords};
use crate::dataset::{write_pairs, Label, WordPair};
use crate::embeddings::EmbeddingTable;
use crate::features::{FeatureVector, Resources};
use crate::phonology::PhoneticFeatureTable;
use crate::script::{from_devanagari, Script};
use crate::{Error, Result};

const CONSONANTS: &str = "कखगघचछजझटठडढणतथदधनपफबभमयरलवशषसह";
const VOWEL_SIGNS: [&str; 7] = ["", "ा", "ि", "ी", "ु", "े", "ो"];
const SOURCE_STOPWORDS: [&str; 4] = ["है", "का", "की", "एक"];
const TARGET_STOPWORDS: [&str; 3] = ["छे", "नो", "एक"];

#[derive(Debug, Clone)]
pub struct SyntheticConfig {
    pub pairs_per_class: usize,
    pub dimension: usize,
    /// Standard deviation of the per-component noise between cognate vectors.
    pub noise: f64,
    pub pool_size: usize,
    pub context_len: (usize, usize),
    pub target_script: Script,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            pairs_per_class: 200,
            dimension: 8,
            noise: 0.3,
            pool_size: 60,
            context_len: (3, 5),
            target_script: Script::Gujarati,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    /// Pairs with both words in Devanagari.
    pub pairs: Vec<WordPair>,
    pub source_embeddings: EmbeddingTable,
    pub target_embeddings: EmbeddingTable,
    /// Wordnet-export lines, source side (Devanagari).
    pub source_context: Vec<String>,
    /// Wordnet-export lines, target side (target script).
    pub target_context: Vec<String>,
    pub target_script: Script,
}

struct WordGen<'a> {
    rng: &'a mut ChaCha8Rng,
    consonants: Vec<char>,
    used: HashSet<String>,
}

impl WordGen<'_> {
    fn syllable(&mut self) -> String {
        let c = *self.consonants.choose(self.rng).expect("non-empty");
        let v = *VOWEL_SIGNS.choose(self.rng).expect("non-empty");
        format!("{c}{v}")
    }

    fn raw_word(&mut self) -> String {
        let n = self.rng.random_range(2..=3);
        (0..n).map(|_| self.syllable()).collect()
    }

    fn fresh(&mut self) -> String {
        loop {
            let w = self.raw_word();
            if self.used.insert(w.clone()) {
                return w;
            }
        }
    }

    /// A previously unused single-edit variant of `word`.
    fn variant(&mut self, word: &str) -> String {
        loop {
            let mut chars: Vec<char> = word.chars().collect();
            let consonant = *self.consonants.choose(self.rng).expect("non-empty");
            match self.rng.random_range(0..3) {
                0 => {
                    let positions: Vec<usize> = (0..chars.len())
                        .filter(|&i| CONSONANTS.contains(chars[i]))
                        .collect();
                    let &i = positions.choose(self.rng).expect("words start with a consonant");
                    chars[i] = consonant;
                }
                1 if CONSONANTS.contains(chars[chars.len() - 1]) => chars.push('ा'),
                1 => {
                    chars.pop();
                }
                _ => chars.insert(self.rng.random_range(0..=chars.len()), consonant),
            }
            let w: String = chars.into_iter().collect();
            if w != word && self.used.insert(w.clone()) {
                return w;
            }
        }
    }
}

fn random_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<f32> {
    let normal = Normal::new(0.0, 1.0).expect("valid normal");
    (0..d).map(|_| normal.sample(rng) as f32).collect()
}

fn gloss_line(rng: &mut ChaCha8Rng, word: &str, pool: &[String], stopwords: &[&str], len: (usize, usize)) -> String {
    let mut tokens: Vec<String> = (0..rng.random_range(len.0..=len.1))
        .map(|_| pool.choose(rng).expect("non-empty pool").clone())
        .collect();
    let stop = *stopwords.choose(rng).expect("non-empty");
    let at = rng.random_range(0..=tokens.len());
    tokens.insert(at, stop.to_owned());
    let example = pool.choose(rng).expect("non-empty pool");
    format!("{word}\t{}।\t{example} {stop}", tokens.join(" "))
}

/// Generate a dataset and its resources.
pub fn generate(config: &SyntheticConfig) -> Result<SyntheticData> {
    if config.pairs_per_class == 0 || config.dimension == 0 || config.pool_size == 0 {
        return Err(Error::InvalidInput("synthetic sizes must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let noise = Normal::new(0.0, config.noise).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let d = config.dimension;
    let mut src_emb = EmbeddingTable::new("hi", d)?;
    let mut tgt_emb = EmbeddingTable::new("gu", d)?;
    src_emb.source_tag = "synthetic".into();
    tgt_emb.source_tag = "synthetic".into();

    let mut gen = WordGen {
        rng: &mut rng,
        consonants: CONSONANTS.chars().collect(),
        used: HashSet::new(),
    };
    let src_pool: Vec<String> = (0..config.pool_size).map(|_| gen.fresh()).collect();
    let tgt_pool: Vec<String> = (0..config.pool_size).map(|_| gen.fresh()).collect();

    let mut pairs = Vec::with_capacity(2 * config.pairs_per_class);
    for i in 0..2 * config.pairs_per_class {
        let label = if i % 2 == 0 { Label::Cognate } else { Label::NonCognate };
        let word_s = gen.fresh();
        let word_t = match label {
            Label::Cognate => gen.variant(&word_s),
            Label::NonCognate => gen.fresh(),
        };
        pairs.push(WordPair::new("hi-gu", &word_s, &word_t, label)?);
    }
    drop(gen);

    for word in &src_pool {
        src_emb.insert(word, &random_vector(&mut rng, d))?;
    }
    for word in &tgt_pool {
        tgt_emb.insert(word, &random_vector(&mut rng, d))?;
    }
    for pair in &pairs {
        let v = random_vector(&mut rng, d);
        let t = match pair.label {
            Label::Cognate => v.iter().map(|&x| x + noise.sample(&mut rng) as f32).collect(),
            Label::NonCognate => random_vector(&mut rng, d),
        };
        src_emb.insert(&pair.word_s, &v)?;
        tgt_emb.insert(&pair.word_t, &t)?;
    }

    let mut source_context = Vec::new();
    let mut target_context = Vec::new();
    for pair in &pairs {
        source_context.push(gloss_line(&mut rng, &pair.word_s, &src_pool, &SOURCE_STOPWORDS, config.context_len));
        let line = gloss_line(&mut rng, &pair.word_t, &tgt_pool, &TARGET_STOPWORDS, config.context_len);
        target_context.push(from_devanagari(&line, config.target_script));
    }

    Ok(SyntheticData {
        pairs,
        source_embeddings: src_emb,
        target_embeddings: tgt_emb,
        source_context,
        target_context,
        target_script: config.target_script,
    })
}

/// Two Gaussian blobs in the plane, centred at (1.5, 1.5) for cognates and
/// (-1.5, -1.5) for non-cognates with standard deviation 0.4, alternating
/// labels. Separated by the line x + y = 0 with overwhelming probability.
pub fn gaussian_blobs(n: usize, seed: u64) -> Vec<FeatureVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 0.4).expect("valid normal");
    (0..n)
        .map(|i| {
            let (c, label) = if i % 2 == 0 { (1.5, Label::Cognate) } else { (-1.5, Label::NonCognate) };
            FeatureVector {
                feature_set: "blobs".into(),
                values: vec![c + normal.sample(&mut rng), c + normal.sample(&mut rng)],
                label,
                pair_id: i,
            }
        })
        .collect()
}

impl SyntheticData {
    /// In-memory resources equivalent to loading the written files,
    /// embeddings registered under `tag`.
    pub fn resources(&self, tag: &str) -> Resources {
        let src_stop = Stopwords::from_words(SOURCE_STOPWORDS);
        let tgt_stop = Stopwords::from_words(TARGET_STOPWORDS);
        let src = ContextDictionary::from_reader(self.source_context.join("\n").as_bytes(), Some(&src_stop), "hi")
            .expect("in-memory read");
        let tgt = ContextDictionary::from_reader(self.target_context.join("\n").as_bytes(), Some(&tgt_stop), "gu")
            .expect("in-memory read");
        let mut res = Resources::new(src, tgt);
        res.phonetic = Some(PhoneticFeatureTable::devanagari());
        res.add_embeddings(tag, self.source_embeddings.clone(), self.target_embeddings.clone());
        res
    }

    /// Write `dataset.tsv` (target words in the target script), `src.vec`,
    /// `tgt.vec`, `context_src.tsv`, `context_tgt.tsv`, `stopwords_src.txt`
    /// and `stopwords_tgt.txt` into `dir`.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let io = |name: &str, bytes: Vec<u8>| {
            let path = dir.join(name);
            std::fs::write(&path, bytes).map_err(|e| Error::io(path, e))
        };

        let shown: Vec<WordPair> = self
            .pairs
            .iter()
            .map(|p| WordPair {
                word_t: from_devanagari(&p.word_t, self.target_script),
                ..p.clone()
            })
            .collect();
        let mut buf = Vec::new();
        write_pairs(&mut buf, &shown).expect("write to memory");
        io("dataset.tsv", buf)?;

        for (name, table) in [("src.vec", &self.source_embeddings), ("tgt.vec", &self.target_embeddings)] {
            let mut buf = Vec::new();
            table.write_text(&mut buf).expect("write to memory");
            io(name, buf)?;
        }
        let lines = |l: &[String]| format!("{}\n", l.join("\n")).into_bytes();
        io("context_src.tsv", lines(&self.source_context))?;
        io("context_tgt.tsv", lines(&self.target_context))?;
        let stop_src: Vec<String> = SOURCE_STOPWORDS.iter().map(|s| s.to_string()).collect();
        let stop_tgt: Vec<String> = TARGET_STOPWORDS
            .iter()
            .map(|s| from_devanagari(s, self.target_script))
            .collect();
        io("stopwords_src.txt", lines(&stop_src))?;
        io("stopwords_tgt.txt", lines(&stop_tgt))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let cfg = SyntheticConfig {
            pairs_per_class: 20,
            ..SyntheticConfig::default()
        };
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a.pairs, b.pairs);
        assert_eq!(a.target_context, b.target_context);
        assert_eq!(a.pairs.len(), 40);
    }

    #[test]
    fn every_word_has_an_embedding_and_a_context() {
        let data = generate(&SyntheticConfig {
            pairs_per_class: 30,
            ..SyntheticConfig::default()
        })
        .unwrap();
        let res = data.resources("XL");
        for p in &data.pairs {
            assert!(data.source_embeddings.contains(&p.word_s));
            assert!(data.target_embeddings.contains(&p.word_t));
            let ctx = res.target_context.context_of(&p.word_t);
            assert!(!ctx.miss && !ctx.tokens.is_empty());
            assert!(ctx.tokens.iter().all(|t| t != "एक" && t != "छे"));
        }
    }

    #[test]
    fn cognates_are_one_edit_apart() {
        let data = generate(&SyntheticConfig::default()).unwrap();
        for p in data.pairs.iter().filter(|p| p.label == Label::Cognate) {
            assert_eq!(crate::strsim::levenshtein(&p.word_s, &p.word_t), 1, "{p:?}");
        }
    }
}
