//! Command-line front end for the `xncut` segmentation engine.
//!
//! Every subcommand is a plain function taking its parsed arguments, so the
//! binary in `main.rs` is a thin dispatcher and the commands can be driven
//! from tests without spawning processes.
//!
//! | command   | does                                                        |
//! |-----------|-------------------------------------------------------------|
//! | `segment` | image or FMAP file → label map, Fiedler image, JSON report  |
//! | `synth`   | synthetic benchmark image, feature file and ground truth    |
//! | `eval`    | predicted label map vs one or more ground truths → JSON     |
//! | `bench`   | synthetic scaling sweep → CSV of size, wall time and mIoU   |

pub mod args;
pub mod bench;
pub mod eval;
pub mod output;
pub mod segment;
pub mod synth;

pub use args::{Cli, Command};

/// Runs a parsed command line. `Ok(false)` means the command finished and
/// wrote its outputs but the result is flagged as failed (degenerate root
/// cut), which the binary maps to a nonzero exit code.
pub fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Segment(a) => segment::run(&a).map(|o| o.root_ok),
        Command::Synth(a) => synth::run(&a).map(|_| true),
        Command::Eval(a) => eval::run(&a).map(|_| true),
        Command::Bench(a) => bench::run(&a).map(|_| true),
    }
}
