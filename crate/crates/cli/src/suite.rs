//! Seeded property battery run by the `suite` subcommand.
//!
//! Every trial draws from its own stream `(seed, trial)`, so results do not
//! depend on how trials are spread across workers.

use std::thread;

use fkglab::percolation::{self, worker_rng};
use fkglab::realization::{self, RealizationCheck};
use fkglab::strong;
use fkglab::{gen, Result};
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::report::{Outcome, RunVerdict};

pub const FAMILIES: [&str; 5] = ["product", "fui", "round-trip", "percolation", "induction"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub trial: u64,
    pub family: &'static str,
    pub detail: String,
    pub holds: bool,
}

fn run_trial(seed: u64, trial: u64) -> Result<Vec<TrialResult>> {
    let mut rng = worker_rng(seed, trial as usize);
    let mut out = Vec::with_capacity(FAMILIES.len());
    let mut push = |family, detail: String, holds| {
        out.push(TrialResult {
            trial,
            family,
            detail,
            holds,
        })
    };

    let n = rng.random_range(1..=5);
    let k = rng.random_range(2..=5);
    let mu = gen::random_product_measure(&mut rng, n, 9)?;
    let p = gen::random_partition(&mut rng, n, k)?;
    let r = strong::check_strong_inequality(&mu, &p)?;
    push(
        "product",
        format!("n={n} k={k} margin={}", r.margin),
        r.holds(),
    );

    let m = rng.random_range(1..=4);
    let n = rng.random_range(1..=3);
    let k = rng.random_range(2..=4);
    let real = gen::random_monotone_realization(&mut rng, m, n, 9)?;
    let mu = realization::pushforward(&real)?;
    let p = gen::random_partition(&mut rng, n, k)?;
    let r = strong::check_strong_inequality(&mu, &p)?;
    push(
        "fui",
        format!("m={m} n={n} k={k} margin={}", r.margin),
        r.holds(),
    );

    let n = rng.random_range(1..=3);
    let mu = gen::random_ising_measure(&mut rng, n)?;
    let real = realization::realize(&mu)?;
    let check = realization::verify_realization(&real, &mu)?;
    push(
        "round-trip",
        format!("n={n} sources={}", real.sources().len()),
        check == RealizationCheck::Holds,
    );

    let vertices = rng.random_range(3..=6);
    let g = gen::random_graph(&mut rng, vertices, 8, 9)?;
    let probs = percolation::exact_triple_probs(&g, (0, 1, 2))?;
    let direct = percolation::check_percolation_inequality(&probs);
    let (pm, pp) = percolation::percolation_to_partition(&g, (0, 1, 2))?;
    let via = strong::check_strong_inequality(&pm, &pp)?;
    let agree = direct.lhs == via.lhs && direct.rhs == via.rhs;
    push(
        "percolation",
        format!(
            "vertices={vertices} edges={} margin={}",
            g.edges().len(),
            direct.margin
        ),
        direct.holds() && agree,
    );

    let n = rng.random_range(1..=4);
    let k = rng.random_range(2..=4);
    let mu = gen::random_product_measure(&mut rng, n, 9)?;
    let p = gen::random_partition(&mut rng, n, k)?;
    let t = strong::induction_trace(&mu, &p)?;
    let step = strong::verify_induction_step(&t);
    push("induction", format!("n={n} k={k}"), step.holds());

    Ok(out)
}

/// Runs `trials` trials of every family, split across `workers` threads.
pub fn run_trials(seed: u64, trials: u64, workers: usize) -> Result<Vec<TrialResult>> {
    let workers = workers.clamp(1, trials.max(1) as usize);
    let chunk = trials.div_ceil(workers as u64);
    let parts: Vec<Result<Vec<TrialResult>>> = thread::scope(|s| {
        let handles: Vec<_> = (0..workers as u64)
            .map(|w| {
                s.spawn(move || {
                    let mut acc = Vec::new();
                    for trial in (w * chunk)..((w + 1) * chunk).min(trials) {
                        acc.extend(run_trial(seed, trial)?);
                    }
                    Ok(acc)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite worker panicked"))
            .collect()
    });
    let mut all = Vec::new();
    for part in parts {
        all.extend(part?);
    }
    Ok(all)
}

pub fn suite(seed: u64, trials: u64, workers: usize, verbose: bool) -> Result<Outcome> {
    let results = run_trials(seed, trials, workers)?;
    let mut lines = vec![format!("seed {seed}  trials {trials}")];
    if verbose {
        for r in &results {
            let verdict = if r.holds { "holds" } else { "violated" };
            lines.push(format!(
                "trial {} {} {} {verdict}",
                r.trial, r.family, r.detail
            ));
        }
    }
    let mut summary = Vec::new();
    for family in FAMILIES {
        let failures = results
            .iter()
            .filter(|r| r.family == family && !r.holds)
            .count();
        lines.push(format!(
            "{family:<12} {trials:>6} trials  {failures} failures"
        ));
        summary.push(json!({ "family": family, "trials": trials, "failures": failures }));
    }
    let failed: Vec<&TrialResult> = results.iter().filter(|r| !r.holds).collect();
    let w = json!({ "seed": seed, "summary": summary, "failures": failed });
    Ok(Outcome::new(
        "suite",
        RunVerdict::from_holds(failed.is_empty()),
        w,
        lines,
    ))
}
