pub mod corpus;
pub mod detect;
pub mod ingest;
pub mod plot;
pub mod track;
pub mod train;

use crate::args::Command;
use crate::context::Context;
use crate::error::Result;

pub fn dispatch(ctx: &Context, command: Command) -> Result<()> {
    match command {
        Command::Ingest(a) => ingest::run(ctx, a),
        Command::Stats(a) => corpus::stats(ctx, a),
        Command::Preprocess(a) => corpus::preprocess(ctx, a),
        Command::Train(a) => train::train_cmd(ctx, a),
        Command::Align(a) => train::align_cmd(ctx, a),
        Command::Detect(a) => detect::detect_cmd(ctx, a),
        Command::Stability(a) => detect::stability_cmd(ctx, a),
        Command::Track(a) => track::track_cmd(ctx, a),
        Command::PartyDrift(a) => track::party_drift_cmd(ctx, a),
        Command::Plot(a) => plot::plot_cmd(ctx, a),
    }
}
