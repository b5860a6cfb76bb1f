use std::path::PathBuf;

use pulsecell::scenario::Summary;
use pulsecell::{ScenarioConfig, SystemKind};

use crate::args::SimulateArgs;
use crate::failure::Outcome;
use crate::io::{default_output_dir, write_records};

pub fn cmd_simulate(args: &SimulateArgs) -> Outcome {
    let mut cfg = args.source.load()?;
    args.overrides.apply(&mut cfg);
    let path = output_path(&cfg, args.output.clone());
    let scenario = cfg.build()?;
    let out = scenario.run()?;
    write_records(&path, cfg.system, &out.records)?;

    println!(
        "{} ({} records) -> {}",
        display_name(&cfg),
        out.records.len(),
        path.display()
    );
    print_summary(cfg.system, &out.summary);
    Ok(())
}

fn display_name(cfg: &ScenarioConfig) -> &str {
    if cfg.name.is_empty() {
        "run"
    } else {
        &cfg.name
    }
}

/// `--output`, then the config's `output`, then `<name>.csv` in the default directory.
pub fn output_path(cfg: &ScenarioConfig, flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| cfg.output.clone())
        .unwrap_or_else(|| default_output_dir().join(format!("{}.csv", display_name(cfg))))
}

fn print_summary(system: SystemKind, s: &Summary) {
    let opt = |x: Option<f64>| x.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "n/a".into());
    println!("  final W              {:.6e}", s.final_work);
    println!("  final Q              {:.6e}", s.final_heat);
    println!("  final S              {:.6e}", s.final_entropy);
    println!("  min sigma            {}", opt(s.min_entropy_production));
    println!("  max |dE/dt - J - P|  {:.3e}", s.max_first_law_residual);
    if system == SystemKind::Photocell {
        println!(
            "  final eta            {}",
            s.final_efficiency
                .map(|e| format!("{e:.6}"))
                .unwrap_or_else(|| "n/a".into())
        );
    }
    println!("  min eigenvalue       {:.3e}", s.min_eigenvalue);
}
