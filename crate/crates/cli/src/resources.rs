use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use cognate_core::embeddings::ContextOovMode;
use cognate_core::evaluation::ResourceDigest;
use cognate_core::features::FeatureOptions;
use cognate_core::{ContextDictionary, EmbeddingTable, FeatureSet, PhoneticFeatureTable, Resources};

use crate::args::ResourceArgs;
use crate::config::{required, usage_error};

pub struct Loaded {
    pub resources: Resources,
    pub digests: Vec<ResourceDigest>,
}

pub fn feature_options(args: &ResourceArgs) -> FeatureOptions {
    let defaults = FeatureOptions::default();
    FeatureOptions {
        q_len: args.q_len.unwrap_or(defaults.q_len),
        context_cap: args.context_cap.unwrap_or(defaults.context_cap),
        context_oov: if args.skip_oov_context {
            ContextOovMode::Skip
        } else {
            ContextOovMode::IncludeAsZero
        },
    }
}

fn parse_embedding_spec(spec: &str) -> (String, PathBuf, PathBuf) {
    let parsed = spec.split_once('=').and_then(|(tag, files)| {
        let (src, tgt) = files.split_once(',')?;
        (!tag.is_empty() && !src.is_empty() && !tgt.is_empty()).then(|| (tag.to_owned(), src.into(), tgt.into()))
    });
    parsed.unwrap_or_else(|| usage_error(&format!("--embedding expects TAG=SRC,TGT, got {spec:?}")))
}

struct Digests(Vec<ResourceDigest>);

impl Digests {
    fn add(&mut self, role: &str, path: &Path) -> Result<()> {
        self.0.push(ResourceDigest::of_file(role, path)?);
        Ok(())
    }
}

pub fn load_context(path: &Path, stopwords: Option<&Path>, lang: &str) -> Result<ContextDictionary> {
    let dict = ContextDictionary::load_any(path, stopwords, lang)?;
    if dict.malformed_records > 0 {
        log::warn!("{}: skipped {} malformed records", path.display(), dict.malformed_records);
    }
    Ok(dict)
}

/// Load what `sets` need. Contexts are always required.
pub fn load(args: &ResourceArgs, sets: &[FeatureSet]) -> Result<Loaded> {
    let mut digests = Digests(Vec::new());
    let ctx_src = required(&args.context_src, "--context-src");
    let ctx_tgt = required(&args.context_tgt, "--context-tgt");
    let source = load_context(ctx_src, args.stopwords_src.as_deref(), "src")?;
    let target = load_context(ctx_tgt, args.stopwords_tgt.as_deref(), "tgt")?;
    digests.add("context_src", ctx_src)?;
    digests.add("context_tgt", ctx_tgt)?;
    for (role, path) in [("stopwords_src", &args.stopwords_src), ("stopwords_tgt", &args.stopwords_tgt)] {
        if let Some(p) = path {
            digests.add(role, p)?;
        }
    }

    let mut resources = Resources::new(source, target);
    resources.options = feature_options(args);

    if sets.iter().any(|s| s.phonetic) {
        resources.phonetic = Some(match &args.phonetic_table {
            Some(path) => {
                digests.add("phonetic_table", path)?;
                PhoneticFeatureTable::load(path)?
            }
            None => PhoneticFeatureTable::devanagari(),
        });
    }

    let explicit: BTreeMap<String, (PathBuf, PathBuf)> = args
        .embedding
        .iter()
        .map(|s| {
            let (tag, src, tgt) = parse_embedding_spec(s);
            (tag.to_lowercase(), (src, tgt))
        })
        .collect();
    let mut tags: Vec<String> = sets.iter().filter_map(|s| s.embedding.clone()).collect();
    tags.sort_by_key(|t| t.to_lowercase());
    tags.dedup_by_key(|t| t.to_lowercase());
    let mut cache: BTreeMap<PathBuf, EmbeddingTable> = BTreeMap::new();
    let mut table = |path: &Path, lang: &str| -> Result<EmbeddingTable> {
        if let Some(t) = cache.get(path) {
            return Ok(t.clone());
        }
        let t = EmbeddingTable::load(path, lang)?;
        if t.duplicate_count() > 0 {
            log::warn!("{}: ignored {} duplicate words", path.display(), t.duplicate_count());
        }
        cache.insert(path.to_owned(), t.clone());
        Ok(t)
    };
    for tag in tags {
        let (src, tgt) = match explicit.get(&tag.to_lowercase()) {
            Some((s, t)) => (s.clone(), t.clone()),
            None => (
                required(&args.emb_src, "--emb-src").clone(),
                required(&args.emb_tgt, "--emb-tgt").clone(),
            ),
        };
        let (s, t) = (table(&src, "src")?, table(&tgt, "tgt")?);
        log::info!("embeddings {tag}: {} source and {} target words, dimension {}", s.len(), t.len(), s.dimension());
        digests.add(&format!("emb_src:{tag}"), &src)?;
        digests.add(&format!("emb_tgt:{tag}"), &tgt)?;
        resources.add_embeddings(tag, s, t);
    }
    for set in sets {
        resources.validate(set).with_context(|| format!("feature set {set}"))?;
    }
    Ok(Loaded {
        resources,
        digests: digests.0,
    })
}
