use anyhow::{Context, Result};
use cognate_core::augment::{bpe_learn as learn, inject_cognates, BpeModel, ParallelCorpus};
use cognate_core::dataset::read_candidates;
use cognate_core::Label;
use serde_json::json;

use crate::args::{BpeApplyArgs, BpeLearnArgs, Format, GlobalArgs, InjectArgs};
use crate::config::required;
use crate::output::{emit, format_or, json, read_input};

pub fn inject(g: &GlobalArgs, a: &InjectArgs) -> Result<()> {
    let corpus = ParallelCorpus::load(required(&a.src, "--src"), required(&a.tgt, "--tgt"))?;
    let path = required(&a.cognates, "--cognates");
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let rows = read_candidates(file, &path.display().to_string())?;
    let total = rows.len();
    let cognates: Vec<_> = rows
        .into_iter()
        .filter(|(_, label)| *label != Some(Label::NonCognate))
        .map(|(pair, _)| pair)
        .collect();
    let injection = inject_cognates(&corpus, &cognates);
    injection
        .corpus
        .write(required(&a.out_src, "--out-src"), required(&a.out_tgt, "--out-tgt"))?;
    let summary = json!({
        "original_lines": corpus.len(),
        "rows": total,
        "injected": injection.injected,
        "skipped": injection.skipped,
        "lines": injection.corpus.len(),
    });
    let out = match format_or(g, Format::Text) {
        Format::Json => json(&summary)?,
        _ => format!(
            "injected {} of {} rows ({} skipped): {} -> {} lines\n",
            injection.injected,
            total,
            injection.skipped,
            corpus.len(),
            injection.corpus.len()
        ),
    };
    emit(g, &out)
}

pub fn bpe_learn(g: &GlobalArgs, a: &BpeLearnArgs) -> Result<()> {
    let lines = read_input(a.input.as_deref())?;
    let merges = a.merges.unwrap_or(cognate_core::augment::DEFAULT_MERGES);
    let model = learn(&lines, merges);
    if model.len() < merges {
        log::warn!("stopped after {} merges: no pair occurs twice", model.len());
    }
    let mut buf = Vec::new();
    model.write(&mut buf)?;
    emit(g, &String::from_utf8(buf)?)
}

pub fn bpe_apply(g: &GlobalArgs, a: &BpeApplyArgs) -> Result<()> {
    let model = BpeModel::load(required(&a.model, "--model"))?;
    let mut out = String::new();
    for line in read_input(a.input.as_deref())? {
        out.push_str(&model.apply(&line));
        out.push('\n');
    }
    emit(g, &out)
}
