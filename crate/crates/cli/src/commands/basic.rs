use std::fmt::Write as _;

use anyhow::Result;
use cognate_core::phonology::word_phonetic_vector;
use cognate_core::script::{from_devanagari, standardize, to_devanagari};
use cognate_core::strsim::{context_wls, ned_similarity, qgram_distance, qgram_similarity};
use cognate_core::{angular_similarity, normalize_pair, wls, EmbeddingTable, PhoneticFeatureTable, Script};
use serde_json::json;

use crate::args::{EmbSimArgs, Format, GlobalArgs, PhonvecArgs, ScoreArgs, TranslitArgs};
use crate::config::{required, usage_error};
use crate::output::{csv_field, emit, format_or, json, read_input};
use crate::resources::load_context;

pub fn translit(g: &GlobalArgs, a: &TranslitArgs) -> Result<()> {
    let target: Option<Script> = a.to.as_deref().map(str::parse).transpose()?;
    let lines = if a.text.is_empty() { read_input(None)? } else { a.text.clone() };
    match format_or(g, Format::Text) {
        Format::Json => {
            let rows: Vec<_> = lines
                .iter()
                .map(|line| match target {
                    Some(script) => json!({ "input": line, "text": from_devanagari(line, script), "target_script": script }),
                    None => {
                        let t = to_devanagari(line);
                        json!({
                            "input": line,
                            "text": t.text,
                            "source_script": t.source_script,
                            "passthrough_count": t.passthrough_count,
                        })
                    }
                })
                .collect();
            emit(g, &json(&rows)?)
        }
        _ => {
            let mut out = String::new();
            for line in &lines {
                let converted = match target {
                    Some(script) => from_devanagari(line, script),
                    None => standardize(line),
                };
                out.push_str(&converted);
                out.push('\n');
            }
            emit(g, &out)
        }
    }
}

fn table(rows: &[(&str, String)], format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = rows
                .iter()
                .map(|(k, v)| {
                    let value = v.parse::<f64>().map(|x| json!(x)).unwrap_or_else(|_| json!(v));
                    (k.to_string(), value)
                })
                .collect();
            json(&map)?
        }
        Format::Csv => {
            let header: Vec<&str> = rows.iter().map(|r| r.0).collect();
            let values: Vec<String> = rows.iter().map(|r| csv_field(&r.1)).collect();
            format!("{}\n{}\n", header.join(","), values.join(","))
        }
        Format::Markdown => {
            let mut out = String::from("| measure | value |\n|---|---|\n");
            for (k, v) in rows {
                let _ = writeln!(out, "| {k} | {v} |");
            }
            out
        }
        Format::Text => rows.iter().map(|(k, v)| format!("{k}\t{v}\n")).collect(),
    })
}

pub fn score(g: &GlobalArgs, a: &ScoreArgs) -> Result<()> {
    let s = standardize(required(&a.word_s, "<WORD_S>"));
    let t = standardize(required(&a.word_t, "<WORD_T>"));
    let q = a.q_len.unwrap_or(cognate_core::strsim::DEFAULT_Q);
    if q == 0 {
        usage_error("--q-len must be at least 1");
    }
    let word = wls(&s, &t, q);
    let mut rows = vec![
        ("word_s", s.clone()),
        ("word_t", t.clone()),
        ("levenshtein", cognate_core::levenshtein(&s, &t).to_string()),
        ("ned_similarity", ned_similarity(&s, &t).value.to_string()),
        ("qgram_distance", qgram_distance(&s, &t, q).to_string()),
        ("qgram_similarity", qgram_similarity(&s, &t, q).value.to_string()),
        ("wls", word.value.to_string()),
    ];
    match (&a.context_src, &a.context_tgt) {
        (Some(cs), Some(ct)) => {
            let src = load_context(cs, a.stopwords_src.as_deref(), "src")?;
            let tgt = load_context(ct, a.stopwords_tgt.as_deref(), "tgt")?;
            let (ls, lt) = (src.context_of(&s), tgt.context_of(&t));
            let cap = a.context_cap.unwrap_or(cognate_core::strsim::DEFAULT_CONTEXT_CAP);
            let ctx = context_wls(ls.tokens, lt.tokens, q, cap);
            let pair = normalize_pair(word.value, ctx.value)?;
            rows.extend([
                ("context_wls", ctx.value.to_string()),
                ("s1", pair.s1.to_string()),
                ("s2", pair.s2.to_string()),
                ("context_miss_src", ls.miss.to_string()),
                ("context_miss_tgt", lt.miss.to_string()),
            ]);
        }
        (None, None) => {}
        _ => usage_error("--context-src and --context-tgt go together"),
    }
    emit(g, &table(&rows, format_or(g, Format::Text))?)
}

pub fn phonvec(g: &GlobalArgs, a: &PhonvecArgs) -> Result<()> {
    let table = match &a.table {
        Some(p) => PhoneticFeatureTable::load(p)?,
        None => PhoneticFeatureTable::devanagari(),
    };
    let words = if a.words.is_empty() { read_input(None)? } else { a.words.clone() };
    let vectors: Vec<(String, _)> = words
        .iter()
        .map(|w| {
            let w = standardize(w.trim());
            let v = word_phonetic_vector(&w, &table);
            (w, v)
        })
        .collect();
    let out = match format_or(g, Format::Text) {
        Format::Json => {
            let rows: Vec<_> = vectors
                .iter()
                .map(|(w, v)| json!({ "word": w, "vector": v.vector, "oov": v.oov }))
                .collect();
            json(&json!({ "features": table.feature_names(), "words": rows }))?
        }
        Format::Csv | Format::Markdown => {
            let mut out = format!("word,oov,{}\n", table.feature_names().join(","));
            for (w, v) in &vectors {
                let values: Vec<String> = v.vector.iter().map(f64::to_string).collect();
                let _ = writeln!(out, "{},{},{}", csv_field(w), v.oov, values.join(","));
            }
            out
        }
        Format::Text => vectors
            .iter()
            .map(|(w, v)| {
                let values: Vec<String> = v.vector.iter().map(|x| format!("{x:.4}")).collect();
                format!("{w}\t{}{}\n", values.join(" "), if v.oov { "\toov" } else { "" })
            })
            .collect(),
    };
    emit(g, &out)
}

pub fn emb_sim(g: &GlobalArgs, a: &EmbSimArgs) -> Result<()> {
    let s = standardize(required(&a.word_s, "<WORD_S>"));
    let t = standardize(required(&a.word_t, "<WORD_T>"));
    let src = EmbeddingTable::load(required(&a.emb_src, "--emb-src"), "src")?;
    let tgt = EmbeddingTable::load(required(&a.emb_tgt, "--emb-tgt"), "tgt")?;
    if src.dimension() != tgt.dimension() {
        return Err(cognate_core::Error::Dimension {
            expected: src.dimension(),
            found: tgt.dimension(),
        }
        .into());
    }
    let (ls, lt) = (src.lookup(&s), tgt.lookup(&t));
    let sim = angular_similarity(&ls.vector, &lt.vector);
    let rows = [
        ("word_s", s),
        ("word_t", t),
        ("angular_similarity", sim.value.to_string()),
        ("degenerate", sim.degenerate.to_string()),
        ("oov_s", ls.oov.to_string()),
        ("oov_t", lt.oov.to_string()),
    ];
    emit(g, &table(&rows, format_or(g, Format::Text))?)
}
