//! Stratified k-fold cross-validation and weighted precision/recall/F1.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classifier::{grid_search, Activation, FfnnConfig};
use crate::dataset::{Label, WordPair};
use crate::features::{assemble_dataset, DatasetStats, FeatureOptions, FeatureSet, FeatureVector, Resources};
use crate::{Error, Result};

/// Derive an independent seed for sub-stream `stream` of `root` (splitmix64).
pub fn derive_seed(root: u64, stream: u64) -> u64 {
    let mut z = root.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fold index of every example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub fold_count: usize,
    pub seed: u64,
    pub assignment: Vec<usize>,
}

impl FoldAssignment {
    /// `(train, test)` indices for one fold.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        (0..self.assignment.len()).partition(|&i| self.assignment[i] != fold)
    }

    /// Hex SHA-256 of the fold count and assignment.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.fold_count as u64).to_le_bytes());
        for &f in &self.assignment {
            hasher.update((f as u64).to_le_bytes());
        }
        hex::encode(hasher.finalize())
    }
}

/// Shuffle each class with a seeded RNG, then deal its members round-robin
/// over the folds. The deal continues where the previous class stopped so
/// fold sizes also stay within one of each other.
pub fn stratified_kfold(labels: &[Label], k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 folds, got {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![usize::MAX; labels.len()];
    let mut next = 0;
    for class in [Label::Cognate, Label::NonCognate] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < k {
            return Err(Error::InvalidInput(format!(
                "class {class} has {} members, fewer than {k} folds",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        for i in members {
            assignment[i] = next;
            next = (next + 1) % k;
        }
    }
    Ok(FoldAssignment {
        fold_count: k,
        seed,
        assignment,
    })
}

/// Binary confusion counts with class 1 (cognate) as positive.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn from_labels(y_true: &[Label], y_pred: &[Label]) -> Result<Self> {
        if y_true.len() != y_pred.len() {
            return Err(Error::InvalidInput(format!(
                "label sequences differ in length: {} vs {}",
                y_true.len(),
                y_pred.len()
            )));
        }
        if y_true.is_empty() {
            return Err(Error::InvalidInput("empty label sequences".into()));
        }
        let mut c = Confusion::default();
        for (&t, &p) in y_true.iter().zip(y_pred) {
            match (t, p) {
                (Label::Cognate, Label::Cognate) => c.tp += 1,
                (Label::NonCognate, Label::Cognate) => c.fp += 1,
                (Label::NonCognate, Label::NonCognate) => c.tn += 1,
                (Label::Cognate, Label::NonCognate) => c.fn_ += 1,
            }
        }
        Ok(c)
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn add(&mut self, other: &Confusion) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.tn += other.tn;
        self.fn_ += other.fn_;
    }

    /// Support-weighted precision, recall and F1 over both classes.
    pub fn weighted_prf(&self) -> Prf {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let f1 = |p: f64, r: f64| if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
        // (precision, recall, support) for class 1 then class 0
        let classes = [
            (ratio(self.tp, self.tp + self.fp), ratio(self.tp, self.tp + self.fn_), self.tp + self.fn_),
            (ratio(self.tn, self.tn + self.fn_), ratio(self.tn, self.tn + self.fp), self.tn + self.fp),
        ];
        let n = self.total() as f64;
        let mut out = Prf::default();
        for (p, r, support) in classes {
            let w = support as f64 / n;
            out.precision += w * p;
            out.recall += w * r;
            out.f1 += w * f1(p, r);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    fn mean(items: &[Prf]) -> Prf {
        let n = items.len() as f64;
        Prf {
            precision: items.iter().map(|m| m.precision).sum::<f64>() / n,
            recall: items.iter().map(|m| m.recall).sum::<f64>() / n,
            f1: items.iter().map(|m| m.f1).sum::<f64>() / n,
        }
    }
}

/// Support-weighted precision, recall and F1. Undefined ratios (0/0) count as 0.
pub fn weighted_prf(y_true: &[Label], y_pred: &[Label]) -> Result<Prf> {
    Ok(Confusion::from_labels(y_true, y_pred)?.weighted_prf())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairPrediction {
    pub pair_id: usize,
    pub predicted: Label,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub hidden_dim: usize,
    pub activation: Activation,
    pub validation_accuracy: f64,
    pub confusion: Confusion,
    pub metrics: Prf,
    pub predictions: Vec<PairPrediction>,
}

/// A resource file and its SHA-256.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

impl ResourceDigest {
    pub fn of_file(role: &str, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Ok(ResourceDigest {
            role: role.to_owned(),
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub fold_count: usize,
    pub fold_digest: String,
    /// Grid search runs inside each training fold.
    pub nested_grid_search: bool,
    pub base_config: FfnnConfig,
    pub grid: Vec<(usize, Activation)>,
    pub feature_options: FeatureOptions,
    pub resources: Vec<ResourceDigest>,
    /// The invocation that produced the report, when run from the CLI.
    pub run_config: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub language_pair: String,
    pub feature_set: String,
    pub folds: Vec<FoldReport>,
    /// Unweighted mean of the per-fold weighted metrics.
    pub mean: Prf,
    /// Weighted metrics of the confusion counts pooled over all folds.
    pub pooled: Prf,
    pub stats: DatasetStats,
    pub provenance: Provenance,
}

#[derive(Debug, Clone)]
pub struct ExperimentOptions {
    pub k: usize,
    pub seed: u64,
    /// Training settings shared by every grid point; its seed is replaced per fold.
    pub base: FfnnConfig,
    pub grid: Vec<FfnnConfig>,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        let base = FfnnConfig::default();
        ExperimentOptions {
            k: 5,
            seed: 42,
            grid: base.grid(),
            base,
        }
    }
}

fn language_pair_of(pairs: &[WordPair]) -> String {
    let codes: BTreeSet<&str> = pairs.iter().map(|p| p.language_pair.as_str()).collect();
    codes.into_iter().collect::<Vec<_>>().join(",")
}

fn evaluate_fold(
    fold: usize,
    vectors: &[FeatureVector],
    folds: &FoldAssignment,
    options: &ExperimentOptions,
) -> Result<FoldReport> {
    let (train_idx, test_idx) = folds.split(fold);
    let train: Vec<FeatureVector> = train_idx.iter().map(|&i| vectors[i].clone()).collect();
    let fold_seed = derive_seed(options.seed, fold as u64);
    let grid: Vec<FfnnConfig> = options
        .grid
        .iter()
        .map(|c| FfnnConfig {
            seed: fold_seed,
            ..c.clone()
        })
        .collect();
    let search = grid_search(&train, &grid).map_err(|e| Error::Training(format!("fold {fold}: {e}")))?;

    let mut predictions = Vec::with_capacity(test_idx.len());
    for &i in &test_idx {
        let p = search.model.predict(&vectors[i].values)?;
        predictions.push(PairPrediction {
            pair_id: vectors[i].pair_id,
            predicted: p.label,
            probability: p.probability,
        });
    }
    let y_true: Vec<Label> = test_idx.iter().map(|&i| vectors[i].label).collect();
    let y_pred: Vec<Label> = predictions.iter().map(|p| p.predicted).collect();
    let confusion = Confusion::from_labels(&y_true, &y_pred)?;
    Ok(FoldReport {
        fold,
        train_size: train_idx.len(),
        test_size: test_idx.len(),
        hidden_dim: search.best.hidden_dim,
        activation: search.best.activation,
        validation_accuracy: search.trace.best_val_accuracy(),
        metrics: confusion.weighted_prf(),
        confusion,
        predictions,
    })
}

/// Cross-validate one feature set: per fold, grid-search on the training
/// part only and score the selected model on the held-out part.
pub fn run_experiment(
    pairs: &[WordPair],
    resources: &Resources,
    set: &FeatureSet,
    options: &ExperimentOptions,
) -> Result<ExperimentReport> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput("dataset has no pairs".into()));
    }
    if options.grid.is_empty() {
        return Err(Error::Config("empty hyper-parameter grid".into()));
    }
    resources.validate(set)?;
    let labels: Vec<Label> = pairs.iter().map(|p| p.label).collect();
    let folds = stratified_kfold(&labels, options.k, options.seed)?;
    let (vectors, stats) = assemble_dataset(pairs, resources, set)?;
    run_on_vectors(language_pair_of(pairs), set, &vectors, stats, &folds, resources.options, options)
}

fn run_on_vectors(
    language_pair: String,
    set: &FeatureSet,
    vectors: &[FeatureVector],
    stats: DatasetStats,
    folds: &FoldAssignment,
    feature_options: FeatureOptions,
    options: &ExperimentOptions,
) -> Result<ExperimentReport> {
    let fold_reports: Vec<FoldReport> = (0..folds.fold_count)
        .into_par_iter()
        .map(|fold| evaluate_fold(fold, vectors, folds, options))
        .collect::<Result<_>>()?;
    let per_fold: Vec<Prf> = fold_reports.iter().map(|f| f.metrics).collect();
    let mut pooled = Confusion::default();
    fold_reports.iter().for_each(|f| pooled.add(&f.confusion));

    Ok(ExperimentReport {
        language_pair,
        feature_set: set.to_string(),
        mean: Prf::mean(&per_fold),
        pooled: pooled.weighted_prf(),
        folds: fold_reports,
        stats,
        provenance: Provenance {
            seed: options.seed,
            fold_count: folds.fold_count,
            fold_digest: folds.digest(),
            nested_grid_search: true,
            base_config: options.base.clone(),
            grid: options.grid.iter().map(|c| (c.hidden_dim, c.activation)).collect(),
            feature_options,
            resources: Vec::new(),
            run_config: None,
        },
    })
}

/// Run several feature sets over the same folds and seed.
pub fn run_ablation(
    pairs: &[WordPair],
    resources: &Resources,
    sets: &[FeatureSet],
    options: &ExperimentOptions,
) -> Result<Vec<ExperimentReport>> {
    if sets.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "an ablation needs at least 2 feature sets, got {}",
            sets.len()
        )));
    }
    for set in sets {
        resources.validate(set)?;
    }
    sets.iter()
        .map(|set| run_experiment(pairs, resources, set, options))
        .collect()
}

/// Rows per language pair, a P/R/F column group per feature set, two decimals.
pub fn table_markdown(reports: &[ExperimentReport]) -> String {
    let (pairs, sets, cell) = table_layout(reports);
    let mut out = String::from("| Language Pair |");
    for set in &sets {
        let _ = write!(out, " {set} P | {set} R | {set} F |");
    }
    out.push_str("\n|---|");
    out.push_str(&"---|---|---|".repeat(sets.len()));
    out.push('\n');
    for pair in &pairs {
        let _ = write!(out, "| {pair} |");
        for set in &sets {
            match cell(pair, set) {
                Some(m) => {
                    let _ = write!(out, " {:.2} | {:.2} | {:.2} |", m.precision, m.recall, m.f1);
                }
                None => out.push_str(" - | - | - |"),
            }
        }
        out.push('\n');
    }
    out
}

/// Same layout as [`table_markdown`], comma separated, full precision.
pub fn table_csv(reports: &[ExperimentReport]) -> String {
    let (pairs, sets, cell) = table_layout(reports);
    let mut out = String::from("language_pair");
    for set in &sets {
        let _ = write!(out, ",{set}_P,{set}_R,{set}_F");
    }
    out.push('\n');
    for pair in &pairs {
        out.push_str(pair);
        for set in &sets {
            match cell(pair, set) {
                Some(m) => {
                    let _ = write!(out, ",{},{},{}", m.precision, m.recall, m.f1);
                }
                None => out.push_str(",,,"),
            }
        }
        out.push('\n');
    }
    out
}

type Cell<'a> = Box<dyn Fn(&str, &str) -> Option<Prf> + 'a>;

fn table_layout(reports: &[ExperimentReport]) -> (Vec<String>, Vec<String>, Cell<'_>) {
    let mut pairs: Vec<String> = Vec::new();
    let mut sets: Vec<String> = Vec::new();
    for r in reports {
        if !pairs.contains(&r.language_pair) {
            pairs.push(r.language_pair.clone());
        }
        if !sets.contains(&r.feature_set) {
            sets.push(r.feature_set.clone());
        }
    }
    let cell = Box::new(move |pair: &str, set: &str| {
        reports
            .iter()
            .find(|r| r.language_pair == pair && r.feature_set == set)
            .map(|r| r.mean)
    });
    (pairs, sets, cell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Cognate as P, NonCognate as N};

    fn labels(pos: usize, neg: usize) -> Vec<Label> {
        let mut v = vec![P; pos];
        v.extend(vec![N; neg]);
        v
    }

    fn class_counts(labels: &[Label], folds: &FoldAssignment, fold: usize) -> (usize, usize) {
        let (_, test) = folds.split(fold);
        let pos = test.iter().filter(|&&i| labels[i] == P).count();
        (pos, test.len() - pos)
    }

    #[test]
    fn divisible_classes_split_evenly() {
        let l = labels(10, 10);
        let folds = stratified_kfold(&l, 5, 1).unwrap();
        for f in 0..5 {
            assert_eq!(class_counts(&l, &folds, f), (2, 2));
        }
    }

    #[test]
    fn uneven_classes_differ_by_at_most_one() {
        let l = labels(11, 10);
        let folds = stratified_kfold(&l, 5, 1).unwrap();
        let pos: Vec<usize> = (0..5).map(|f| class_counts(&l, &folds, f).0).collect();
        assert!(pos.iter().all(|&p| p == 2 || p == 3));
        assert_eq!(pos.iter().sum::<usize>(), 11);
    }

    #[test]
    fn too_few_members_is_an_error() {
        assert!(stratified_kfold(&labels(4, 10), 5, 0).is_err());
        assert!(stratified_kfold(&labels(4, 10), 1, 0).is_err());
    }

    #[test]
    fn same_seed_same_folds() {
        let l = labels(30, 20);
        let a = stratified_kfold(&l, 5, 9).unwrap();
        let b = stratified_kfold(&l, 5, 9).unwrap();
        assert_eq!(a.digest(), b.digest());
        let c = stratified_kfold(&l, 5, 10).unwrap();
        assert_ne!(a.digest(), c.digest());
    }

    #[test]
    fn perfect_predictions() {
        let y = [P, N, P, N, N];
        assert_eq!(
            weighted_prf(&y, &y).unwrap(),
            Prf {
                precision: 1.0,
                recall: 1.0,
                f1: 1.0
            }
        );
    }

    #[test]
    fn all_positive_predictions_on_balanced_data() {
        let m = weighted_prf(&[P, P, N, N], &[P, P, P, P]).unwrap();
        assert_eq!(m.recall, 0.5);
        // class 1: P=0.5 R=1; class 0: P=0 (0/0) R=0
        assert_eq!(m.precision, 0.25);
    }

    #[test]
    fn hand_computed_confusion() {
        let m = weighted_prf(&[P, P, N, N], &[P, N, N, N]).unwrap();
        let expected_f = 0.5 * (2.0 / 3.0) + 0.5 * 0.8;
        assert!((m.f1 - expected_f).abs() < 1e-12);
        assert!((m.f1 - 0.7333).abs() < 1e-4);
        assert!((m.precision - (0.5 * 1.0 + 0.5 * (2.0 / 3.0))).abs() < 1e-12);
        assert!((m.recall - 0.75).abs() < 1e-12);
    }

    #[test]
    fn metric_input_errors() {
        assert!(weighted_prf(&[P], &[P, N]).is_err());
        assert!(weighted_prf(&[], &[]).is_err());
    }

    #[test]
    fn derived_seeds_differ() {
        let seeds: BTreeSet<u64> = (0..100).map(|i| derive_seed(42, i)).collect();
        assert_eq!(seeds.len(), 100);
        assert_eq!(derive_seed(42, 3), derive_seed(42, 3));
    }

    #[test]
    fn tables_have_one_row_per_language_pair() {
        let report = |pair: &str, set: &str, f1: f64| ExperimentReport {
            language_pair: pair.into(),
            feature_set: set.into(),
            folds: vec![],
            mean: Prf {
                precision: 0.831,
                recall: 0.849,
                f1,
            },
            pooled: Prf::default(),
            stats: DatasetStats::default(),
            provenance: Provenance {
                seed: 0,
                fold_count: 5,
                fold_digest: String::new(),
                nested_grid_search: true,
                base_config: FfnnConfig::default(),
                grid: vec![],
                feature_options: FeatureOptions::default(),
                resources: vec![],
                run_config: None,
            },
        };
        let reports = [report("hi-gu", "WLS", 0.5), report("hi-gu", "MUSE+WLS", 0.8449), report("hi-te", "WLS", 0.7)];
        let md = table_markdown(&reports);
        let lines: Vec<&str> = md.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].contains("MUSE+WLS F"));
        assert!(lines[2].contains("| 0.83 | 0.85 | 0.84 |"));
        assert!(lines[3].ends_with("| - | - | - |"));
        let csv = table_csv(&reports);
        assert!(csv.starts_with("language_pair,WLS_P,WLS_R,WLS_F,MUSE+WLS_P"));
    }
}
