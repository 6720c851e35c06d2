use std::hint::black_box;

use cognate_core::classifier::train;
use cognate_core::features::assemble_dataset;
use cognate_core::synthetic::{gaussian_blobs, generate, SyntheticConfig};
use cognate_core::{bpe_learn, levenshtein, wls, Activation, FeatureSet, FfnnConfig, FfnnModel};
use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

fn string_metrics(c: &mut Criterion) {
    let (s, t) = ("प्रधानमंत्री", "પ્રધાનમંત્રી");
    let t = cognate_core::to_devanagari(t).text;
    c.bench_function("levenshtein", |b| b.iter(|| levenshtein(black_box(s), black_box(&t))));
    c.bench_function("wls_q2", |b| b.iter(|| wls(black_box(s), black_box(&t), 2)));
}

fn features(c: &mut Criterion) {
    let data = generate(&SyntheticConfig::default()).expect("synthetic data");
    let resources = data.resources("XL");
    let set: FeatureSet = "XL+WLS".parse().expect("feature set");
    c.bench_function("assemble_xl_wls_400_pairs", |b| {
        b.iter(|| assemble_dataset(black_box(&data.pairs), &resources, &set).expect("assembly"))
    });
}

fn classifier(c: &mut Criterion) {
    let blobs = gaussian_blobs(200, 6);
    let config = FfnnConfig {
        hidden_dim: 50,
        activation: Activation::Tanh,
        max_epochs: 20,
        ..FfnnConfig::default()
    };
    let model = FfnnModel::zeros(2, config.clone());
    c.bench_function("forward_h50", |b| b.iter(|| model.forward(black_box(&[0.3, -0.2])).expect("forward")));
    c.bench_function("train_h50_20_epochs", |b| {
        b.iter_batched(|| config.clone(), |cfg| train(&blobs, &cfg).expect("train"), BatchSize::SmallInput)
    });
}

fn bpe(c: &mut Criterion) {
    let data = generate(&SyntheticConfig::default()).expect("synthetic data");
    let lines: Vec<String> = data.source_context.iter().map(|l| l.replace('\t', " ")).collect();
    c.bench_function("bpe_learn_200_merges", |b| b.iter(|| bpe_learn(black_box(&lines), 200)));
}

criterion_group!(benches, string_metrics, features, classifier, bpe);
criterion_main!(benches);
