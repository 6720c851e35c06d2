use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use cognate_core::classifier::{grid_search, FfnnModel};
use cognate_core::dataset::{load_pairs, read_candidates};
use cognate_core::evaluation::{table_csv, table_markdown, weighted_prf, ExperimentReport, ResourceDigest};
use cognate_core::features::{assemble_dataset, FeatureOptions};
use cognate_core::{run_ablation, run_experiment, Activation, ExperimentOptions, FeatureSet, FfnnConfig, Label};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::{Cli, EvaluateArgs, Format, GlobalArgs, PredictArgs, TrainArgs, TrainingArgs};
use crate::config::{required, usage_error, RunConfig};
use crate::output::{csv_field, emit, format_or, json};
use crate::resources;

const PREDICTOR_FORMAT: &str = "cognate-predictor";
const PREDICTOR_VERSION: u32 = 1;

/// A trained model with everything needed to featurize new pairs the same way.
#[derive(Debug, Serialize, Deserialize)]
struct Predictor {
    format: String,
    version: u32,
    feature_set: String,
    feature_names: Vec<String>,
    feature_options: FeatureOptions,
    validation_accuracy: f64,
    training_pairs: usize,
    /// `(hidden_dim, activation, validation accuracy)` for every grid point.
    grid: Vec<(usize, Activation, f64)>,
    model: FfnnModel,
    resources: Vec<ResourceDigest>,
    run_config: Value,
}

fn training_configs(t: &TrainingArgs) -> Result<(FfnnConfig, Vec<FfnnConfig>)> {
    let defaults = FfnnConfig::default();
    let base = FfnnConfig {
        initial_lr: t.lr.unwrap_or(defaults.initial_lr),
        lr_floor: t.lr_floor.unwrap_or(defaults.lr_floor),
        batch_size: t.batch_size.unwrap_or(defaults.batch_size),
        max_epochs: t.max_epochs.unwrap_or(defaults.max_epochs),
        validation_fraction: t.validation_fraction.unwrap_or(defaults.validation_fraction),
        seed: t.seed.unwrap_or(42),
        ..defaults
    };
    base.validate()?;
    let activations: Vec<Activation> = t.activations.iter().map(|a| a.parse()).collect::<Result<_, _>>()?;
    let grid = activations
        .iter()
        .flat_map(|&activation| {
            let base = &base;
            t.hidden_dims.iter().map(move |&hidden_dim| FfnnConfig {
                hidden_dim,
                activation,
                ..base.clone()
            })
        })
        .collect();
    Ok((base, grid))
}

fn parse_sets(specs: &[String]) -> Result<Vec<FeatureSet>> {
    if specs.is_empty() {
        usage_error("the following required argument was not provided: --features");
    }
    specs
        .iter()
        .map(|s| s.parse::<FeatureSet>().with_context(|| format!("--features {s}")))
        .collect()
}

pub fn evaluate(cli: &Cli, a: &EvaluateArgs, ablation: bool) -> Result<()> {
    let g = &cli.global;
    let dataset = required(&a.dataset, "--dataset");
    let sets = parse_sets(&a.features)?;
    let pairs = load_pairs(dataset)?;
    let loaded = resources::load(&a.resources, &sets)?;
    let (base, grid) = training_configs(&a.training)?;
    let options = ExperimentOptions {
        k: a.k.unwrap_or(5),
        seed: base.seed,
        base,
        grid,
    };
    log::info!(
        "{} pairs, {} feature sets, {} folds, {} grid points",
        pairs.len(),
        sets.len(),
        options.k,
        options.grid.len()
    );
    let mut reports: Vec<ExperimentReport> = if ablation {
        run_ablation(&pairs, &loaded.resources, &sets, &options)?
    } else {
        sets.iter()
            .map(|set| run_experiment(&pairs, &loaded.resources, set, &options))
            .collect::<Result<_, _>>()?
    };

    let mut digests = vec![ResourceDigest::of_file("dataset", dataset)?];
    digests.extend(loaded.digests);
    let run_config = RunConfig::of(cli).to_value();
    for report in &mut reports {
        report.provenance.resources = digests.clone();
        report.provenance.run_config = Some(run_config.clone());
        log::info!(
            "{} {}: mean P {:.4} R {:.4} F {:.4}",
            report.language_pair,
            report.feature_set,
            report.mean.precision,
            report.mean.recall,
            report.mean.f1
        );
    }
    let out = match format_or(g, Format::Json) {
        Format::Json if reports.len() == 1 => json(&reports[0])?,
        Format::Json => json(&reports)?,
        Format::Csv => table_csv(&reports),
        Format::Markdown | Format::Text => table_markdown(&reports),
    };
    emit(g, &out)
}

pub fn train(cli: &Cli, a: &TrainArgs) -> Result<()> {
    let dataset = required(&a.dataset, "--dataset");
    let set: FeatureSet = required(&a.features, "--features").parse()?;
    let pairs = load_pairs(dataset)?;
    if pairs.is_empty() {
        bail!(cognate_core::Error::InvalidInput("dataset has no pairs".into()));
    }
    let loaded = resources::load(&a.resources, std::slice::from_ref(&set))?;
    let (_, grid) = training_configs(&a.training)?;
    if grid.is_empty() {
        usage_error("empty hyper-parameter grid");
    }
    let (vectors, stats) = assemble_dataset(&pairs, &loaded.resources, &set)?;
    log::info!(
        "{} pairs, context miss rate {:.3?}, word OOV rate {:.3?}",
        stats.pairs,
        stats.context_miss_rate,
        stats.word_oov_rate
    );
    let search = grid_search(&vectors, &grid)?;
    log::info!(
        "selected hidden_dim {} activation {} (validation accuracy {:.4})",
        search.best.hidden_dim,
        search.best.activation.name(),
        search.trace.best_val_accuracy()
    );
    let mut digests = vec![ResourceDigest::of_file("dataset", dataset)?];
    digests.extend(loaded.digests);
    let predictor = Predictor {
        format: PREDICTOR_FORMAT.into(),
        version: PREDICTOR_VERSION,
        feature_set: set.to_string(),
        feature_names: loaded.resources.feature_names(&set)?,
        feature_options: loaded.resources.options,
        validation_accuracy: search.trace.best_val_accuracy(),
        training_pairs: pairs.len(),
        grid: search
            .accuracies
            .iter()
            .map(|(c, acc)| (c.hidden_dim, c.activation, *acc))
            .collect(),
        model: search.model,
        resources: digests,
        run_config: RunConfig::of(cli).to_value(),
    };
    emit(&cli.global, &json(&predictor)?)
}

pub fn predict(g: &GlobalArgs, a: &PredictArgs) -> Result<()> {
    let model_path = required(&a.model, "--model");
    let text = std::fs::read_to_string(model_path).with_context(|| format!("reading {}", model_path.display()))?;
    let predictor: Predictor = serde_json::from_str(&text).with_context(|| format!("parsing {}", model_path.display()))?;
    if predictor.format != PREDICTOR_FORMAT || predictor.version != PREDICTOR_VERSION {
        bail!(cognate_core::Error::Config(format!(
            "{} is not a {PREDICTOR_FORMAT} v{PREDICTOR_VERSION} file",
            model_path.display()
        )));
    }
    let set: FeatureSet = predictor.feature_set.parse()?;
    let mut loaded = resources::load(&a.resources, std::slice::from_ref(&set))?;
    let cli_options = resources::feature_options(&a.resources);
    if (a.resources.q_len.is_some() || a.resources.context_cap.is_some() || a.resources.skip_oov_context)
        && cli_options != predictor.feature_options
    {
        log::warn!("feature options from the command line are ignored; the model's own are used");
    }
    loaded.resources.options = predictor.feature_options;
    let names = loaded.resources.feature_names(&set)?;
    if names != predictor.feature_names {
        bail!(cognate_core::Error::Config(format!(
            "resources give {} features in a different layout from the model's {}",
            names.len(),
            predictor.feature_names.len()
        )));
    }

    let pairs_path = required(&a.pairs, "--pairs");
    let file = std::fs::File::open(pairs_path).with_context(|| format!("opening {}", pairs_path.display()))?;
    let rows = read_candidates(file, &pairs_path.display().to_string())?;
    let pairs: Vec<_> = rows.iter().map(|(p, _)| p.clone()).collect();
    let (vectors, _) = assemble_dataset(&pairs, &loaded.resources, &set)?;
    let predictions = vectors
        .iter()
        .map(|v| predictor.model.predict(&v.values))
        .collect::<Result<Vec<_>, _>>()?;

    let gold: Vec<Label> = rows.iter().filter_map(|(_, l)| *l).collect();
    if gold.len() == rows.len() && !rows.is_empty() {
        let predicted: Vec<Label> = predictions.iter().map(|p| p.label).collect();
        let m = weighted_prf(&gold, &predicted)?;
        log::info!("against the given labels: P {:.4} R {:.4} F {:.4}", m.precision, m.recall, m.f1);
    }

    let out = match format_or(g, Format::Text) {
        Format::Json => {
            let items: Vec<_> = rows
                .iter()
                .zip(&predictions)
                .enumerate()
                .map(|(i, ((pair, label), p))| {
                    json!({
                        "pair_id": i,
                        "language_pair": pair.language_pair,
                        "word_s": pair.word_s,
                        "word_t": pair.word_t,
                        "predicted": p.label.bit(),
                        "probability": p.probability,
                        "gold": label.map(Label::bit),
                    })
                })
                .collect();
            json(&items)?
        }
        Format::Csv => {
            let mut out = String::from("pair_id,language_pair,word_s,word_t,predicted,probability,gold\n");
            for (i, ((pair, label), p)) in rows.iter().zip(&predictions).enumerate() {
                let _ = writeln!(
                    out,
                    "{i},{},{},{},{},{},{}",
                    csv_field(&pair.language_pair),
                    csv_field(&pair.word_s),
                    csv_field(&pair.word_t),
                    p.label,
                    p.probability,
                    label.map_or(String::new(), |l| l.to_string())
                );
            }
            out
        }
        Format::Markdown | Format::Text => rows
            .iter()
            .zip(&predictions)
            .map(|((pair, _), p)| format!("{}\t{}\t{}\t{}\n", pair.language_pair, pair.word_s, pair.word_t, p.label))
            .collect(),
    };
    emit(g, &out)
}
