use anyhow::Result;
use cognate_core::dataset::load_pairs;
use serde_json::json;

use crate::args::{ContextBuildArgs, ContextStatsArgs, Format, GlobalArgs, Side};
use crate::config::{required, usage_error};
use crate::output::{emit, format_or, json};
use crate::resources::load_context;

pub fn build(g: &GlobalArgs, a: &ContextBuildArgs) -> Result<()> {
    let wordnet = required(&a.wordnet, "--wordnet");
    let lang = a.lang.as_deref().unwrap_or("und");
    let dict = load_context(wordnet, a.stopwords.as_deref(), lang)?;
    log::info!("{} entries from {}", dict.len(), wordnet.display());
    match &g.out {
        Some(path) => dict.save_json(path)?,
        None => emit(g, &json(&dict)?)?,
    }
    Ok(())
}

pub fn stats(g: &GlobalArgs, a: &ContextStatsArgs) -> Result<()> {
    let path = required(&a.context, "--context");
    let dict = load_context(path, a.stopwords.as_deref(), "und")?;
    let lengths: Vec<usize> = dict.iter().map(|(_, t)| t.len()).collect();
    let tokens: usize = lengths.iter().sum();
    let mut report = json!({
        "language": dict.language,
        "entries": dict.len(),
        "tokens": tokens,
        "mean_tokens_per_entry": if lengths.is_empty() { 0.0 } else { tokens as f64 / lengths.len() as f64 },
        "empty_entries": lengths.iter().filter(|&&n| n == 0).count(),
        "malformed_records": dict.malformed_records,
        "stopwords_applied": dict.stopwords_applied,
    });
    match (&a.dataset, a.side) {
        (Some(ds), side) => {
            let pairs = load_pairs(ds)?;
            let side = side.unwrap_or(Side::Src);
            let words = pairs.iter().map(|p| match side {
                Side::Src => p.word_s.as_str(),
                Side::Tgt => p.word_t.as_str(),
            });
            report["coverage"] = json!(dict.coverage(words));
        }
        (None, Some(_)) => usage_error("--side needs --dataset"),
        (None, None) => {}
    }
    let out = match format_or(g, Format::Text) {
        Format::Json => json(&report)?,
        _ => report
            .as_object()
            .expect("object")
            .iter()
            .map(|(k, v)| format!("{k}\t{v}\n"))
            .collect(),
    };
    emit(g, &out)
}
