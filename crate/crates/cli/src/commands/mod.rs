mod basic;
mod context;
mod corpus;
mod experiment;

use anyhow::Result;

use crate::args::{AugmentCommand, BpeCommand, Cli, Command, ContextCommand};

pub fn dispatch(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Translit(a) => basic::translit(g, a),
        Command::Score(a) => basic::score(g, a),
        Command::Phonvec(a) => basic::phonvec(g, a),
        Command::EmbSim(a) => basic::emb_sim(g, a),
        Command::Context(ContextCommand::Build(a)) => context::build(g, a),
        Command::Context(ContextCommand::Stats(a)) => context::stats(g, a),
        Command::Evaluate(a) => experiment::evaluate(cli, a, false),
        Command::Ablate(a) => experiment::evaluate(cli, a, true),
        Command::Train(a) => experiment::train(cli, a),
        Command::Predict(a) => experiment::predict(g, a),
        Command::Augment(AugmentCommand::Inject(a)) => corpus::inject(g, a),
        Command::Bpe(BpeCommand::Learn(a)) => corpus::bpe_learn(g, a),
        Command::Bpe(BpeCommand::Apply(a)) => corpus::bpe_apply(g, a),
    }
}
