//! Fixed-order feature vectors for candidate pairs.
//!
//! Layouts, in concatenation order:
//!
//! | component | values |
//! |-----------|--------|
//! | `XL(tag)` | `WV_S[d] WV_T[d] CV_S[d] CV_T[d] s1 s2` |
//! | `PVS`     | `PV_S[F] PV_T[F] PCV_S[F] PCV_T[F] P_S1 P_S2` |
//! | `WLS`     | `S1 S2` |
//!
//! A combined set such as `MUSE+WLS` concatenates the components in the
//! order of the table (embedding block first, lexical block last),
//! regardless of how the name was written.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::ContextDictionary;
use crate::dataset::{Label, WordPair};
use crate::embeddings::{crosslingual_features, ContextOovMode, EmbeddingTable};
use crate::phonology::{phonetic_features, PhoneticFeatureTable};
use crate::strsim::{self, context_wls, normalize_pair, wls};
use crate::{Error, Result};

/// A named combination of feature components.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureSet {
    /// Tag of the cross-lingual embedding pair to use, if any.
    pub embedding: Option<String>,
    pub phonetic: bool,
    pub lexical: bool,
}

impl FeatureSet {
    pub fn wls() -> Self {
        FeatureSet {
            embedding: None,
            phonetic: false,
            lexical: true,
        }
    }

    pub fn pvs() -> Self {
        FeatureSet {
            embedding: None,
            phonetic: true,
            lexical: false,
        }
    }

    pub fn crosslingual(tag: impl Into<String>) -> Self {
        FeatureSet {
            embedding: Some(tag.into()),
            phonetic: false,
            lexical: false,
        }
    }

    pub fn with_wls(mut self) -> Self {
        self.lexical = true;
        self
    }

    pub fn with_pvs(mut self) -> Self {
        self.phonetic = true;
        self
    }

    /// Number of values for the given phonetic and embedding dimensions.
    pub fn dimension(&self, phonetic_dim: usize, embedding_dim: usize) -> usize {
        let mut n = 0;
        if self.embedding.is_some() {
            n += 4 * embedding_dim + 2;
        }
        if self.phonetic {
            n += 4 * phonetic_dim + 2;
        }
        if self.lexical {
            n += 2;
        }
        n
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<&str> = Vec::new();
        if let Some(tag) = &self.embedding {
            parts.push(tag);
        }
        if self.phonetic {
            parts.push("PVS");
        }
        if self.lexical {
            parts.push("WLS");
        }
        f.write_str(&parts.join("+"))
    }
}

impl FromStr for FeatureSet {
    type Err = Error;

    /// Components joined by `+`: `WLS`, `PVS`, and one embedding tag written
    /// either bare (`MUSE`) or as `XL(MUSE)`.
    fn from_str(s: &str) -> Result<Self> {
        let mut set = FeatureSet {
            embedding: None,
            phonetic: false,
            lexical: false,
        };
        for part in s.split('+').map(str::trim) {
            let tag = match part {
                "" => return Err(Error::Config(format!("empty component in feature set {s:?}"))),
                p if p.eq_ignore_ascii_case("WLS") => {
                    set.lexical = true;
                    continue;
                }
                p if p.eq_ignore_ascii_case("PVS") => {
                    set.phonetic = true;
                    continue;
                }
                p => p
                    .strip_prefix("XL(")
                    .and_then(|rest| rest.strip_suffix(')'))
                    .unwrap_or(p),
            };
            if tag.is_empty() || !tag.chars().all(|c| c.is_alphanumeric() || c == '-' || c == '_') {
                return Err(Error::Config(format!("invalid embedding tag {tag:?} in {s:?}")));
            }
            if set.embedding.replace(tag.to_owned()).is_some() {
                return Err(Error::Config(format!("feature set {s:?} names more than one embedding")));
            }
        }
        Ok(set)
    }
}

/// Source- and target-language tables from one alignment method.
#[derive(Debug, Clone)]
pub struct EmbeddingPair {
    pub source: EmbeddingTable,
    pub target: EmbeddingTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureOptions {
    pub q_len: usize,
    pub context_cap: usize,
    pub context_oov: ContextOovMode,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        FeatureOptions {
            q_len: strsim::DEFAULT_Q,
            context_cap: strsim::DEFAULT_CONTEXT_CAP,
            context_oov: ContextOovMode::IncludeAsZero,
        }
    }
}

/// Everything feature extraction reads.
#[derive(Debug, Clone)]
pub struct Resources {
    pub source_context: ContextDictionary,
    pub target_context: ContextDictionary,
    pub phonetic: Option<PhoneticFeatureTable>,
    pub embeddings: BTreeMap<String, EmbeddingPair>,
    pub options: FeatureOptions,
}

impl Resources {
    pub fn new(source_context: ContextDictionary, target_context: ContextDictionary) -> Self {
        Resources {
            source_context,
            target_context,
            phonetic: None,
            embeddings: BTreeMap::new(),
            options: FeatureOptions::default(),
        }
    }

    pub fn add_embeddings(&mut self, tag: impl Into<String>, source: EmbeddingTable, target: EmbeddingTable) {
        self.embeddings.insert(tag.into(), EmbeddingPair { source, target });
    }

    fn embedding(&self, tag: &str) -> Option<&EmbeddingPair> {
        self.embeddings
            .iter()
            .find(|(t, _)| t.eq_ignore_ascii_case(tag))
            .map(|(_, p)| p)
    }

    /// Check that every resource `set` needs is present and consistent.
    pub fn validate(&self, set: &FeatureSet) -> Result<()> {
        if !set.lexical && !set.phonetic && set.embedding.is_none() {
            return Err(Error::Config("feature set has no components".into()));
        }
        if self.options.q_len == 0 {
            return Err(Error::Config("q-gram length must be positive".into()));
        }
        if set.phonetic && self.phonetic.is_none() {
            return Err(Error::Config(format!("feature set {set} needs a phonetic table")));
        }
        if let Some(tag) = &set.embedding {
            let pair = self
                .embedding(tag)
                .ok_or_else(|| Error::Config(format!("feature set {set} needs embeddings tagged {tag:?}")))?;
            if pair.source.dimension() != pair.target.dimension() {
                return Err(Error::Config(format!(
                    "embeddings {tag:?} disagree on dimension: {} vs {}",
                    pair.source.dimension(),
                    pair.target.dimension()
                )));
            }
        }
        Ok(())
    }

    pub fn dimension(&self, set: &FeatureSet) -> Result<usize> {
        self.validate(set)?;
        let phonetic = self.phonetic.as_ref().map_or(0, PhoneticFeatureTable::dimension);
        let embedding = set
            .embedding
            .as_deref()
            .and_then(|t| self.embedding(t))
            .map_or(0, |p| p.source.dimension());
        Ok(set.dimension(phonetic, embedding))
    }

    /// Column names in layout order.
    pub fn feature_names(&self, set: &FeatureSet) -> Result<Vec<String>> {
        self.validate(set)?;
        let mut names = Vec::new();
        if let Some(tag) = &set.embedding {
            let d = self.embedding(tag).expect("validated").source.dimension();
            let tag = tag.to_lowercase();
            for block in ["wv_s", "wv_t", "cv_s", "cv_t"] {
                names.extend((0..d).map(|i| format!("{tag}_{block}_{i}")));
            }
            names.push(format!("{tag}_s1"));
            names.push(format!("{tag}_s2"));
        }
        if set.phonetic {
            let table = self.phonetic.as_ref().expect("validated");
            for block in ["pv_s", "pv_t", "pcv_s", "pcv_t"] {
                names.extend(table.feature_names().iter().map(|f| format!("pvs_{block}_{f}")));
            }
            names.push("pvs_p_s1".into());
            names.push("pvs_p_s2".into());
        }
        if set.lexical {
            names.push("wls_s1".into());
            names.push("wls_s2".into());
        }
        Ok(names)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub feature_set: String,
    pub values: Vec<f64>,
    pub label: Label,
    pub pair_id: usize,
}

/// Per-pair resource coverage observed while assembling.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PairFlags {
    pub context_miss: [bool; 2],
    pub empty_context: [bool; 2],
    pub word_oov: [bool; 2],
    pub context_tokens: [usize; 2],
    pub context_oov_tokens: [usize; 2],
    pub phonetic_oov: [bool; 2],
}

/// Aggregate counts over an assembled dataset. Rates are in [0, 1];
/// embedding and phonetic rates are zero when the set does not use them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub pairs: usize,
    pub cognates: usize,
    pub non_cognates: usize,
    pub context_miss_rate: [f64; 2],
    pub empty_context_rate: [f64; 2],
    pub word_oov_rate: [f64; 2],
    pub context_token_oov_rate: [f64; 2],
    pub phonetic_oov_rate: [f64; 2],
}

impl DatasetStats {
    fn from_flags(labels: impl Iterator<Item = Label>, flags: &[PairFlags]) -> Self {
        let cognates = labels.filter(|&l| l == Label::Cognate).count();
        let n = flags.len();
        let rate = |count: usize, total: usize| if total == 0 { 0.0 } else { count as f64 / total as f64 };
        let side = |f: &dyn Fn(&PairFlags, usize) -> bool| {
            [0, 1].map(|s| rate(flags.iter().filter(|p| f(p, s)).count(), n))
        };
        let token_rate = [0, 1].map(|s| {
            rate(
                flags.iter().map(|p| p.context_oov_tokens[s]).sum(),
                flags.iter().map(|p| p.context_tokens[s]).sum(),
            )
        });
        DatasetStats {
            pairs: n,
            cognates,
            non_cognates: n - cognates,
            context_miss_rate: side(&|p, s| p.context_miss[s]),
            empty_context_rate: side(&|p, s| p.empty_context[s]),
            word_oov_rate: side(&|p, s| p.word_oov[s]),
            context_token_oov_rate: token_rate,
            phonetic_oov_rate: side(&|p, s| p.phonetic_oov[s]),
        }
    }
}

/// Feature vector for one pair under `set`.
///
/// Call [`Resources::validate`] first; a missing resource is reported as a
/// configuration error here too.
pub fn assemble(pair: &WordPair, pair_id: usize, resources: &Resources, set: &FeatureSet) -> Result<(FeatureVector, PairFlags)> {
    let ctx_s = resources.source_context.context_of(&pair.word_s);
    let ctx_t = resources.target_context.context_of(&pair.word_t);
    let mut flags = PairFlags {
        context_miss: [ctx_s.miss, ctx_t.miss],
        empty_context: [ctx_s.tokens.is_empty(), ctx_t.tokens.is_empty()],
        context_tokens: [ctx_s.tokens.len(), ctx_t.tokens.len()],
        ..PairFlags::default()
    };
    let mut values = Vec::new();

    if let Some(tag) = &set.embedding {
        let tables = resources
            .embedding(tag)
            .ok_or_else(|| Error::Config(format!("no embeddings tagged {tag:?}")))?;
        let xl = crosslingual_features(
            &pair.word_s,
            &pair.word_t,
            ctx_s.tokens,
            ctx_t.tokens,
            &tables.source,
            &tables.target,
            resources.options.context_oov,
        )?;
        flags.word_oov = [xl.oov_flags[0], xl.oov_flags[1]];
        flags.context_oov_tokens = xl.context_oov_tokens;
        values.extend(xl.to_values());
    }

    if set.phonetic {
        let table = resources
            .phonetic
            .as_ref()
            .ok_or_else(|| Error::Config("no phonetic table loaded".into()))?;
        let pvs = phonetic_features(&pair.word_s, &pair.word_t, ctx_s.tokens, ctx_t.tokens, table);
        flags.phonetic_oov = pvs.word_oov;
        values.extend(pvs.to_values());
    }

    if set.lexical {
        let q = resources.options.q_len;
        let score1 = wls(&pair.word_s, &pair.word_t, q).value;
        let score2 = context_wls(ctx_s.tokens, ctx_t.tokens, q, resources.options.context_cap).value;
        let normalized = normalize_pair(score1, score2)?;
        values.push(normalized.s1);
        values.push(normalized.s2);
    }

    if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "non-finite feature at index {bad} for pair {pair_id} ({} / {})",
            pair.word_s, pair.word_t
        )));
    }

    Ok((
        FeatureVector {
            feature_set: set.to_string(),
            values,
            label: pair.label,
            pair_id,
        },
        flags,
    ))
}

/// One feature vector per pair, in input order, with coverage statistics.
/// `pair_id` is the index into `pairs`.
pub fn assemble_dataset(pairs: &[WordPair], resources: &Resources, set: &FeatureSet) -> Result<(Vec<FeatureVector>, DatasetStats)> {
    resources.validate(set)?;
    let assembled: Vec<(FeatureVector, PairFlags)> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, pair)| assemble(pair, i, resources, set))
        .collect::<Result<_>>()?;
    let (vectors, flags): (Vec<_>, Vec<_>) = assembled.into_iter().unzip();
    let stats = DatasetStats::from_flags(pairs.iter().map(|p| p.label), &flags);
    Ok((vectors, stats))
}

/// Write a feature matrix as CSV: `pair_id,label,<feature names>`.
pub fn write_csv<W: Write>(out: W, names: &[String], vectors: &[FeatureVector]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(out);
    let to_err = |e: csv::Error| Error::InvalidInput(format!("writing feature CSV: {e}"));
    let mut header = vec!["pair_id".to_owned(), "label".to_owned()];
    header.extend_from_slice(names);
    csv.write_record(&header).map_err(to_err)?;
    for v in vectors {
        if v.values.len() != names.len() {
            return Err(Error::Dimension {
                expected: names.len(),
                found: v.values.len(),
            });
        }
        let mut row = vec![v.pair_id.to_string(), v.label.to_string()];
        row.extend(v.values.iter().map(|x| x.to_string()));
        csv.write_record(&row).map_err(to_err)?;
    }
    csv.flush().map_err(|e| Error::InvalidInput(format!("writing feature CSV: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resources(dim: usize) -> Resources {
        let mut src = ContextDictionary::new("hi");
        src.insert("कमल", vec!["फूल".into(), "जल".into()]);
        let mut tgt = ContextDictionary::new("gu");
        tgt.insert("कमल", vec!["फूल".into(), "जल".into()]);
        let mut res = Resources::new(src, tgt);
        res.phonetic = Some(PhoneticFeatureTable::devanagari());
        let mut table = EmbeddingTable::new("hi", dim).unwrap();
        for (i, w) in ["कमल", "फूल", "जल"].iter().enumerate() {
            let v: Vec<f32> = (0..dim).map(|j| ((i + 1) * (j + 2)) as f32 % 7.0 - 3.0).collect();
            table.insert(w, &v).unwrap();
        }
        res.add_embeddings("MUSE", table.clone(), table);
        res
    }

    fn pair(s: &str, t: &str) -> WordPair {
        WordPair::new("hi-gu", s, t, Label::Cognate).unwrap()
    }

    #[test]
    fn parses_and_displays_feature_sets() {
        assert_eq!("WLS".parse::<FeatureSet>().unwrap(), FeatureSet::wls());
        assert_eq!("PVS".parse::<FeatureSet>().unwrap(), FeatureSet::pvs());
        let combo: FeatureSet = "WLS+XL(MUSE)".parse().unwrap();
        assert_eq!(combo, FeatureSet::crosslingual("MUSE").with_wls());
        assert_eq!(combo.to_string(), "MUSE+WLS");
        assert_eq!("VecMap+PVS+WLS".parse::<FeatureSet>().unwrap().to_string(), "VecMap+PVS+WLS");
        assert!("MUSE+VecMap".parse::<FeatureSet>().is_err());
        assert!("WLS+".parse::<FeatureSet>().is_err());
        assert!("a b".parse::<FeatureSet>().is_err());
    }

    #[test]
    fn identical_words_and_contexts_give_neutral_wls() {
        let mut res = resources(4);
        res.source_context.insert("जल", vec!["पानी".into()]);
        res.target_context.insert("जल", vec!["पानी".into()]);
        let (fv, _) = assemble(&pair("जल", "जल"), 0, &res, &FeatureSet::wls()).unwrap();
        assert_eq!(fv.values, vec![0.5, 0.5]);
        // Multi-token contexts average over all token pairs, so only the
        // word-pair score reaches 1.
        let (fv, _) = assemble(&pair("कमल", "कमल"), 0, &res, &FeatureSet::wls()).unwrap();
        assert!(fv.values[0] > 0.5);
        assert!((fv.values[0] + fv.values[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn layout_dimensions() {
        let res = resources(100);
        let p = pair("कमल", "कमला");
        let xl = FeatureSet::crosslingual("MUSE");
        let (fv, _) = assemble(&p, 0, &res, &xl).unwrap();
        assert_eq!(fv.values.len(), 402);
        let (fv, _) = assemble(&p, 0, &res, &xl.clone().with_wls()).unwrap();
        assert_eq!(fv.values.len(), 404);
        let (fv, _) = assemble(&p, 0, &res, &FeatureSet::pvs()).unwrap();
        assert_eq!(fv.values.len(), 4 * 38 + 2);
        for set in [xl.clone(), xl.with_wls().with_pvs(), FeatureSet::pvs(), FeatureSet::wls()] {
            assert_eq!(res.feature_names(&set).unwrap().len(), res.dimension(&set).unwrap());
        }
    }

    #[test]
    fn combined_layout_concatenates_components() {
        let res = resources(3);
        let p = pair("कमल", "कमला");
        let xl = assemble(&p, 0, &res, &FeatureSet::crosslingual("MUSE")).unwrap().0.values;
        let lex = assemble(&p, 0, &res, &FeatureSet::wls()).unwrap().0.values;
        let both = assemble(&p, 0, &res, &"MUSE+WLS".parse().unwrap()).unwrap().0.values;
        assert_eq!(both, [xl, lex].concat());
    }

    #[test]
    fn missing_resources_are_config_errors() {
        let mut res = resources(3);
        assert!(matches!(res.validate(&FeatureSet::crosslingual("VecMap")), Err(Error::Config(_))));
        res.phonetic = None;
        assert!(matches!(res.validate(&FeatureSet::pvs()), Err(Error::Config(_))));
        let pairs = vec![pair("कमल", "कमल")];
        assert!(matches!(
            assemble_dataset(&pairs, &res, &FeatureSet::pvs()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn empty_dataset_gives_zeroed_stats() {
        let res = resources(3);
        let (vectors, stats) = assemble_dataset(&[], &res, &FeatureSet::wls()).unwrap();
        assert!(vectors.is_empty());
        assert_eq!(stats, DatasetStats::default());
    }

    #[test]
    fn stats_count_labels_and_coverage() {
        let res = resources(3);
        let pairs = vec![
            pair("कमल", "कमल"),
            WordPair::new("hi-gu", "घर", "वन", Label::NonCognate).unwrap(),
        ];
        let (vectors, stats) = assemble_dataset(&pairs, &res, &"MUSE+WLS".parse().unwrap()).unwrap();
        assert_eq!(vectors.len(), 2);
        assert_eq!(vectors[1].pair_id, 1);
        assert_eq!((stats.cognates, stats.non_cognates), (1, 1));
        assert_eq!(stats.context_miss_rate, [0.5, 0.5]);
        assert_eq!(stats.word_oov_rate, [0.5, 0.5]);
    }

    #[test]
    fn csv_export_has_header_and_rows() {
        let res = resources(2);
        let set = FeatureSet::wls();
        let (vectors, _) = assemble_dataset(&[pair("घर", "घर")], &res, &set).unwrap();
        let mut out = Vec::new();
        write_csv(&mut out, &res.feature_names(&set).unwrap(), &vectors).unwrap();
        // no context on either side: word score 1, context score 0
        assert_eq!(String::from_utf8(out).unwrap(), "pair_id,label,wls_s1,wls_s2\n0,1,1,0\n");
    }
}
