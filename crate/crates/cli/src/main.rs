mod args;
mod check;
mod failure;
mod io;
mod simulate;
mod sweep;

use std::process::ExitCode;

use clap::Parser;
use pulsecell::scenario::PRESET_NAMES;
use pulsecell::ScenarioConfig;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => simulate::cmd_simulate(a),
        Command::Sweep(a) => sweep::cmd_sweep(a),
        Command::Check(a) => check::cmd_check(a),
        Command::Presets => {
            for name in PRESET_NAMES {
                let cfg = ScenarioConfig::preset(name).expect("embedded presets parse");
                println!("{name:<6} {:?} {:?}", cfg.system, cfg.pulses.mode);
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("pulsecell: {f}");
            f.exit_code()
        }
    }
}
