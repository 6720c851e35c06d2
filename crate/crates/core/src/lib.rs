//! Cognate detection between Hindi and other Indian languages.
//!
//! Candidate word pairs are standardized to Devanagari ([`script`]), then
//! described by orthographic ([`strsim`]), phonetic ([`phonology`]) and
//! cross-lingual embedding ([`embeddings`]) similarity features, each
//! computed for the words themselves and for their wordnet contexts
//! ([`context`]). [`features`] assembles fixed-layout vectors that a small
//! feed-forward network ([`classifier`]) learns to label, evaluated with
//! stratified k-fold cross-validation ([`evaluation`]). Detected cognates can
//! be injected into a parallel corpus and segmented with BPE ([`augment`]).

pub mod augment;
pub mod classifier;
pub mod context;
pub mod dataset;
pub mod embeddings;
mod error;
pub mod evaluation;
pub mod features;
pub mod phonology;
pub mod script;
pub mod strsim;
pub mod synthetic;
mod vector;

pub use augment::{bpe_learn, inject_cognates, BpeModel, ParallelCorpus};
pub use classifier::{Activation, FfnnConfig, FfnnModel};
pub use context::{ContextDictionary, Stopwords};
pub use dataset::{Label, WordPair};
pub use embeddings::{angular_similarity, EmbeddingTable};
pub use error::{Error, Result};
pub use evaluation::{run_ablation, run_experiment, ExperimentOptions, ExperimentReport};
pub use features::{FeatureSet, FeatureVector, Resources};
pub use phonology::PhoneticFeatureTable;
pub use script::{to_devanagari, Script};
pub use strsim::{levenshtein, normalize_pair, wls};
