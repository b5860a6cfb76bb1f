use std::path::Path;

use pulsecell::output::{format_number, format_optional};
use pulsecell::ScenarioConfig;
use rayon::prelude::*;

use crate::args::{SweepArgs, SweepSpec};
use crate::failure::{Failure, Outcome};
use crate::io::{default_output_dir, ensure_parent, write_records};

pub const AGGREGATE_COLUMNS: [&str; 8] = [
    "parameter",
    "value",
    "status",
    "final_eta",
    "final_work",
    "min_sigma",
    "csv",
    "error",
];

#[derive(Debug)]
pub struct SweepRow {
    pub value: f64,
    pub file: String,
    pub result: Result<RunSummary, Failure>,
}

#[derive(Debug)]
pub struct RunSummary {
    pub final_eta: Option<f64>,
    pub final_work: f64,
    pub min_sigma: Option<f64>,
}

pub fn cmd_sweep(args: &SweepArgs) -> Outcome {
    let mut base = args.source.load()?;
    args.overrides.apply(&mut base);
    // An unknown parameter is a configuration error; a bad value only fails its own run.
    base.value_at(&args.sweep.param)?;
    let dir = args
        .output
        .clone()
        .unwrap_or_else(|| default_output_dir().join(format!("{}-sweep", base.name)));

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Config(format!("cannot start {} workers: {e}", args.jobs.unwrap_or(0))))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        args.sweep
            .values
            .par_iter()
            .map(|&v| run_one(&base, &args.sweep, v, &dir))
            .collect()
    });

    let aggregate = dir.join("aggregate.csv");
    write_aggregate(&aggregate, &args.sweep.param, &rows)?;

    let failed = rows.iter().filter(|r| r.result.is_err()).count();
    for r in &rows {
        match &r.result {
            Ok(s) => println!(
                "{} = {:<12} ok      W {:.6e}  eta {}",
                args.sweep.param,
                r.value,
                s.final_work,
                s.final_eta.map(|e| format!("{e:.6}")).unwrap_or_else(|| "n/a".into())
            ),
            Err(e) => println!("{} = {:<12} FAILED  {e}", args.sweep.param, r.value),
        }
    }
    println!("{} runs, {failed} failed -> {}", rows.len(), aggregate.display());
    Ok(())
}

fn run_one(base: &ScenarioConfig, spec: &SweepSpec, value: f64, dir: &Path) -> SweepRow {
    let file = format!("{}_{}_{}.csv", base.name, spec.key(), value);
    let path = dir.join(&file);
    let result = (|| {
        let mut cfg = base.with_override(&spec.param, value)?;
        cfg.name = file.trim_end_matches(".csv").to_string();
        let out = cfg.build()?.run()?;
        write_records(&path, cfg.system, &out.records)?;
        Ok(RunSummary {
            final_eta: out.summary.final_efficiency,
            final_work: out.summary.final_work,
            min_sigma: out.summary.min_entropy_production,
        })
    })();
    SweepRow { value, file, result }
}

pub fn write_aggregate(path: &Path, param: &str, rows: &[SweepRow]) -> Outcome {
    ensure_parent(path)?;
    let err = |e: csv::Error| Failure::io(path.display(), e);
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    w.write_record(AGGREGATE_COLUMNS).map_err(err)?;
    for r in rows {
        let record = match &r.result {
            Ok(s) => [
                param.to_string(),
                format_number(r.value),
                "ok".into(),
                format_optional(s.final_eta),
                format_number(s.final_work),
                format_optional(s.min_sigma),
                r.file.clone(),
                String::new(),
            ],
            Err(e) => [
                param.to_string(),
                format_number(r.value),
                "FAILED".into(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                e.to_string(),
            ],
        };
        w.write_record(&record).map_err(err)?;
    }
    w.flush().map_err(|e| Failure::io(path.display(), e))
}
