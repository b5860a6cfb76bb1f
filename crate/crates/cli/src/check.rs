use pulsecell::checks::{CheckOptions, Checker, CRITERIA};

use crate::args::CheckArgs;
use crate::failure::{Failure, Outcome};

pub fn cmd_check(args: &CheckArgs) -> Outcome {
    let ids: Vec<u8> = if args.criteria.is_empty() {
        CRITERIA.iter().map(|(id, _)| *id).collect()
    } else {
        args.criteria.clone()
    };
    if let Some(bad) = ids.iter().find(|id| !CRITERIA.iter().any(|(c, _)| c == *id)) {
        return Err(Failure::Config(format!(
            "unknown criterion {bad} (valid: 1-{})",
            CRITERIA.len()
        )));
    }

    let mut checker = Checker::new(CheckOptions {
        dt: args.dt,
        seeds: args.seeds,
    });
    let mut failed = 0;
    for &id in &ids {
        let outcome = checker.check(id);
        if !outcome.passed {
            failed += 1;
        }
        println!("{outcome}");
    }
    println!("{} of {} criteria passed", ids.len() - failed, ids.len());
    if failed > 0 {
        return Err(Failure::ChecksFailed {
            failed,
            total: ids.len(),
        });
    }
    Ok(())
}
