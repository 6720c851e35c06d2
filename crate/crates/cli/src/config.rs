//! Run configuration: precedence (flags > config file > defaults), required
//! argument checks and the serialized form embedded in outputs.

use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::CommandFactory;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::{Cli, Command, GlobalArgs, ResourceArgs, TrainingArgs};
use cognate_core::strsim::{DEFAULT_CONTEXT_CAP, DEFAULT_Q};

pub const RUN_CONFIG_VERSION: u32 = 1;

/// Everything needed to replay an invocation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub version: u32,
    #[serde(default)]
    pub tool_version: String,
    #[serde(default)]
    pub global: GlobalArgs,
    pub command: Command,
}

impl RunConfig {
    pub fn of(cli: &Cli) -> Self {
        RunConfig {
            version: RUN_CONFIG_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            global: cli.global.clone(),
            command: cli.command.clone(),
        }
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("run config serializes")
    }
}

/// Exit with a usage error (status 2).
pub fn usage_error(message: &str) -> ! {
    Cli::command().error(ErrorKind::MissingRequiredArgument, message).exit()
}

pub fn required<'a, T>(value: &'a Option<T>, flag: &str) -> &'a T {
    value
        .as_ref()
        .unwrap_or_else(|| usage_error(&format!("the following required argument was not provided: {flag}")))
}

/// `top` wins wherever it says something: nulls, `false` and empty lists
/// defer to `base`. Single-key objects with different keys are different
/// enum variants, and then `top` replaces `base` outright.
fn overlay(base: Value, top: Value) -> Value {
    match (base, top) {
        (Value::Null, top) => top,
        (base, Value::Null | Value::Bool(false)) => base,
        (base, Value::Array(items)) if items.is_empty() => base,
        (Value::Object(mut b), Value::Object(t)) => {
            let different_variant = b.len() == 1 && t.len() == 1 && b.keys().next() != t.keys().next();
            if different_variant {
                return Value::Object(t);
            }
            for (key, value) in t {
                let merged = overlay(b.remove(&key).unwrap_or(Value::Null), value);
                b.insert(key, merged);
            }
            Value::Object(b)
        }
        (_, top) => top,
    }
}

/// Pull a run configuration out of a file: a bare run configuration, a
/// report embedding one, a list of such reports, or a trained model.
fn extract_run_config(value: Value) -> Result<Value> {
    let value = match value {
        Value::Array(mut items) if !items.is_empty() => items.swap_remove(0),
        other => other,
    };
    if let Some(rc) = value.pointer("/provenance/run_config") {
        return Ok(rc.clone());
    }
    if let Some(rc) = value.get("run_config") {
        return Ok(rc.clone());
    }
    if value.get("command").is_some() {
        return Ok(value);
    }
    bail!("no run configuration found")
}

fn load_file(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
    extract_run_config(value).with_context(|| format!("config {}", path.display()))
}

/// Merge the config file (if any) under the parsed flags, then fill defaults.
pub fn resolve(cli: Cli) -> Result<Cli> {
    let mut cli = match &cli.global.config {
        None => cli,
        Some(path) => {
            let base = load_file(path)?;
            let merged = overlay(base, RunConfig::of(&cli).to_value());
            let rc: RunConfig = serde_json::from_value(merged).with_context(|| format!("config {}", path.display()))?;
            Cli {
                global: GlobalArgs {
                    config: cli.global.config.clone(),
                    verbose: cli.global.verbose,
                    ..rc.global
                },
                command: rc.command,
            }
        }
    };
    apply_defaults(&mut cli.command);
    Ok(cli)
}

fn resource_defaults(r: &mut ResourceArgs) {
    r.q_len.get_or_insert(DEFAULT_Q);
    r.context_cap.get_or_insert(DEFAULT_CONTEXT_CAP);
}

fn training_defaults(t: &mut TrainingArgs) {
    let base = cognate_core::FfnnConfig::default();
    t.seed.get_or_insert(42);
    t.lr.get_or_insert(base.initial_lr);
    t.lr_floor.get_or_insert(base.lr_floor);
    t.batch_size.get_or_insert(base.batch_size);
    t.max_epochs.get_or_insert(base.max_epochs);
    t.validation_fraction.get_or_insert(base.validation_fraction);
    if t.hidden_dims.is_empty() {
        t.hidden_dims = cognate_core::classifier::HIDDEN_DIMS.to_vec();
    }
    if t.activations.is_empty() {
        t.activations = cognate_core::Activation::ALL.iter().map(|a| a.name().to_owned()).collect();
    }
}

fn apply_defaults(command: &mut Command) {
    match command {
        Command::Score(a) => {
            a.q_len.get_or_insert(DEFAULT_Q);
            a.context_cap.get_or_insert(DEFAULT_CONTEXT_CAP);
        }
        Command::Evaluate(a) | Command::Ablate(a) => {
            a.k.get_or_insert(5);
            resource_defaults(&mut a.resources);
            training_defaults(&mut a.training);
        }
        Command::Train(a) => {
            resource_defaults(&mut a.resources);
            training_defaults(&mut a.training);
        }
        Command::Bpe(crate::args::BpeCommand::Learn(a)) => {
            a.merges.get_or_insert(cognate_core::augment::DEFAULT_MERGES);
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flags_override_file_values() {
        let base = json!({"a": 1, "b": {"c": 2, "d": [1, 2]}, "e": true});
        let top = json!({"a": null, "b": {"c": 5, "d": []}, "e": false});
        assert_eq!(overlay(base, top), json!({"a": 1, "b": {"c": 5, "d": [1, 2]}, "e": true}));
        let sparse = overlay(json!({"a": 1}), json!({"d": [], "e": false}));
        assert_eq!(sparse, json!({"a": 1, "d": [], "e": false}));
    }

    #[test]
    fn a_different_subcommand_replaces_the_file_one() {
        let base = json!({"command": {"evaluate": {"k": 3}}});
        let top = json!({"command": {"ablate": {"k": null}}});
        assert_eq!(overlay(base, top), json!({"command": {"ablate": {"k": null}}}));
    }

    #[test]
    fn finds_embedded_run_configs() {
        let rc = json!({"command": {"translit": {"text": [], "to": null}}});
        let report = json!([{"provenance": {"run_config": rc.clone()}}]);
        assert_eq!(extract_run_config(report).unwrap(), rc);
        assert_eq!(extract_run_config(rc.clone()).unwrap(), rc);
        assert!(extract_run_config(json!({"x": 1})).is_err());
    }
}
