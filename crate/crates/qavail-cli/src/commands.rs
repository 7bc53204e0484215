use std::fs::File;
use std::io::BufReader;

use serde::Serialize;
use serde_json::json;

use qavail::amplify::{amplified_state, availability_by_speed, schedule_for};
use qavail::cognition::{
    correlation_summary, load_lexicon, run_names_scenario, CorrelationSummary, GroupDistribution,
    GroupSpec, LetterExperiment, LetterScenario, Lexicon, NamesScenario, ScenarioResult,
};
use qavail::count::{cost_comparison, median, merge_register_outcomes, mode};
use qavail::estimate::{
    accuracy_bound, choose_m, est_amp_distribution, modal_outcome, register_estimate,
    sample_outcome, EstimationConfig, DEFAULT_MIN_REGISTER,
};
use qavail::statevec::{good_probability, measure, MAX_DIM};
use qavail::{Error, GuessPrep, Oracle};

use crate::args::{AmplifyArgs, Common, EstimateArgs, LetterArgs, NamesArgs, SearchSpace};
use crate::report::{to_value, Report, Table};
use crate::{usage, Failure};

#[derive(Serialize)]
struct SpaceConfig {
    n: usize,
    good: Vec<usize>,
    /// `null` means the uniform guess state.
    weights: Option<Vec<f64>>,
}

struct Space {
    config: SpaceConfig,
    prep: GuessPrep,
    oracle: Oracle,
}

fn resolve_space(s: &SearchSpace) -> Result<Space, Failure> {
    if s.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    if s.n > MAX_DIM {
        return Err(Error::CapExceeded {
            requested: s.n,
            cap: MAX_DIM,
        }
        .into());
    }
    if let Some(&bad) = s.good.iter().find(|&&g| g >= s.n) {
        return Err(usage(format!(
            "good index {bad} is out of range for --n {}",
            s.n
        )));
    }
    let prep = match &s.weights {
        None => GuessPrep::UniformFourier,
        Some(w) if w.len() != s.n => {
            return Err(usage(format!(
                "--weights has {} entries, expected {}",
                w.len(),
                s.n
            )))
        }
        Some(w) => GuessPrep::weighted(w.clone()).map_err(|e| usage(format!("--weights: {e}")))?,
    };
    let mut good = s.good.clone();
    good.sort_unstable();
    good.dedup();
    let oracle = Oracle::new(s.n, good.iter().copied())?;
    Ok(Space {
        config: SpaceConfig {
            n: s.n,
            good,
            weights: s.weights.clone(),
        },
        prep,
        oracle,
    })
}

fn check_trials(trials: usize, min: usize) -> Result<(), Failure> {
    if trials < min {
        return Err(usage(format!("--trials must be at least {min}")));
    }
    Ok(())
}

fn check_register(m: usize) -> Result<(), Failure> {
    if m == 0 {
        return Err(usage("--m must be at least 1"));
    }
    Ok(())
}

fn check_cap(m: usize, n: usize, cap: usize) -> Result<(), Failure> {
    let requested = m.saturating_mul(n);
    if requested > cap {
        return Err(Error::CapExceeded { requested, cap }.into());
    }
    Ok(())
}

fn trial_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_add(i as u64)
}

fn report(
    common: &Common,
    config: serde_json::Value,
    result: serde_json::Value,
    metrics: serde_json::Value,
    table: Table,
) -> Report {
    Report {
        format: common.format,
        timing: common.timing,
        config,
        result,
        metrics,
        table,
    }
}

#[derive(Serialize)]
struct Retrieval {
    trial: usize,
    seed: u64,
    item: usize,
    is_good: bool,
    oracle_calls: usize,
}

pub fn amplify(args: &AmplifyArgs) -> Result<Report, Failure> {
    let space = resolve_space(&args.space)?;
    check_trials(args.trials, 1)?;
    let sched = schedule_for(&space.prep, &space.oracle)?;
    let m = args.m.unwrap_or(sched.iterations);
    let state = amplified_state(&space.prep, &space.oracle, m)?;
    let probability = good_probability(&state, &space.oracle)?;

    let runs: Vec<Retrieval> = (0..args.trials)
        .map(|i| {
            let seed = trial_seed(args.common.seed, i);
            let item = measure(&state, seed, 1)?[0];
            Ok(Retrieval {
                trial: i,
                seed,
                item,
                is_good: space.oracle.is_good(item),
                oracle_calls: m,
            })
        })
        .collect::<qavail::Result<_>>()?;

    let mut table = Table::new(&["trial", "seed", "item", "is_good", "oracle_calls"]);
    for r in &runs {
        table.push(vec![
            r.trial.to_string(),
            r.seed.to_string(),
            r.item.to_string(),
            r.is_good.to_string(),
            r.oracle_calls.to_string(),
        ]);
    }
    let good_runs = runs.iter().filter(|r| r.is_good).count();
    let config = json!({
        "command": "amplify",
        "space": to_value(&space.config),
        "m": m,
        "trials": args.trials,
        "seed": args.common.seed,
        "format": args.common.format,
    });
    let result = json!({
        "a": sched.a,
        "theta": sched.theta,
        "m": m,
        "scheduled_m": sched.iterations,
        "success_probability": probability,
        "closed_form_probability": sched.probability_after(m),
        "availability_by_speed": availability_by_speed(sched.a)?,
        "good_runs": good_runs,
        "is_good": runs[0].is_good,
        "runs": runs,
    });
    let metrics = json!({
        "oracle_calls_per_run": m,
        "oracle_calls_total": m * args.trials,
    });
    Ok(report(&args.common, config, result, metrics, table))
}

#[derive(Serialize)]
struct Sample {
    trial: usize,
    seed: u64,
    y: usize,
    a_hat: f64,
    t_hat: f64,
}

#[derive(Serialize)]
struct DistributionRow {
    y: usize,
    probability: f64,
    a_hat: f64,
    t_hat: f64,
}

struct Estimation {
    space: Space,
    a: f64,
    cfg: EstimationConfig,
    distribution: Vec<f64>,
    samples: Vec<Sample>,
}

fn run_estimation(args: &EstimateArgs, cap: usize) -> Result<Estimation, Failure> {
    let space = resolve_space(&args.space)?;
    check_trials(args.trials, 1)?;
    let a = space.prep.good_mass(&space.oracle)?;
    let m = match args.m {
        Some(m) => {
            check_register(m)?;
            m
        }
        None if a > 0.0 => choose_m(a)?,
        None => DEFAULT_MIN_REGISTER,
    };
    let cfg = EstimationConfig::with_joint_cap(m, space.prep.clone(), space.oracle.clone(), cap)?;
    let distribution = est_amp_distribution(&cfg)?;
    let n = space.oracle.dim() as f64;
    let samples = (0..args.trials)
        .map(|i| {
            let seed = trial_seed(args.common.seed, i);
            let outcome = sample_outcome(&cfg, distribution.clone(), seed)?;
            Ok(Sample {
                trial: i,
                seed,
                y: outcome.y,
                a_hat: outcome.a_hat,
                t_hat: n * outcome.a_hat,
            })
        })
        .collect::<qavail::Result<_>>()?;
    Ok(Estimation {
        space,
        a,
        cfg,
        distribution,
        samples,
    })
}

fn distribution_rows(est: &Estimation) -> Vec<DistributionRow> {
    let m = est.cfg.register_dim();
    let n = est.space.oracle.dim() as f64;
    est.distribution
        .iter()
        .enumerate()
        .map(|(y, &p)| {
            let a_hat = register_estimate(y, m);
            DistributionRow {
                y,
                probability: p,
                a_hat,
                t_hat: n * a_hat,
            }
        })
        .collect()
}

fn estimation_table(est: &Estimation, distribution: bool) -> Table {
    if distribution {
        let mut table = Table::new(&["y", "probability", "a_hat", "t_hat"]);
        for r in distribution_rows(est) {
            table.push(vec![
                r.y.to_string(),
                r.probability.to_string(),
                r.a_hat.to_string(),
                r.t_hat.to_string(),
            ]);
        }
        return table;
    }
    let mut table = Table::new(&["trial", "seed", "y", "a_hat", "t_hat"]);
    for s in &est.samples {
        table.push(vec![
            s.trial.to_string(),
            s.seed.to_string(),
            s.y.to_string(),
            s.a_hat.to_string(),
            s.t_hat.to_string(),
        ]);
    }
    table
}

fn estimation_config(
    command: &str,
    est: &Estimation,
    args: &EstimateArgs,
    cap: usize,
) -> serde_json::Value {
    json!({
        "command": command,
        "space": to_value(&est.space.config),
        "m": est.cfg.register_dim(),
        "trials": args.trials,
        "seed": args.common.seed,
        "format": args.common.format,
        "distribution": args.distribution,
        "joint_cap": cap,
    })
}

fn estimation_metrics(est: &Estimation, trials: usize) -> serde_json::Value {
    let per_run = est.cfg.q_applications();
    json!({
        "q_applications_per_run": per_run,
        "q_applications_total": per_run * trials as u64,
    })
}

pub fn estimate(args: &EstimateArgs, cap: usize) -> Result<Report, Failure> {
    let est = run_estimation(args, cap)?;
    let m = est.cfg.register_dim();
    let modal_y = modal_outcome(&est.distribution);
    let mut result = json!({
        "a": est.a,
        "register_dim": m,
        "accuracy_bound": accuracy_bound(est.a, m),
        "modal_y": modal_y,
        "modal_a_hat": register_estimate(modal_y, m),
        "samples": est.samples,
    });
    if args.distribution {
        result["distribution"] = to_value(&distribution_rows(&est));
    }
    Ok(report(
        &args.common,
        estimation_config("estimate", &est, args, cap),
        result,
        estimation_metrics(&est, args.trials),
        estimation_table(&est, args.distribution),
    ))
}

pub fn count(args: &EstimateArgs, cap: usize) -> Result<Report, Failure> {
    let est = run_estimation(args, cap)?;
    let n = est.space.oracle.dim();
    let m = est.cfg.register_dim();
    let bins = merge_register_outcomes(&est.distribution, n);
    let first = &est.samples[0];
    let mut result = json!({
        "a": est.a,
        "t_true": est.space.oracle.good_count(),
        "biased": !est.space.prep.is_uniform(),
        "register_dim": m,
        "t_hat": first.t_hat,
        "median_t_hat": median(&bins),
        "mode_t_hat": mode(&bins),
        "cost": to_value(&cost_comparison(n, m)),
        "samples": est.samples,
    });
    if args.distribution {
        result["distribution"] = to_value(&distribution_rows(&est));
    }
    Ok(report(
        &args.common,
        estimation_config("count", &est, args, cap),
        result,
        estimation_metrics(&est, args.trials),
        estimation_table(&est, args.distribution),
    ))
}

/// A group distribution with the support points kept only on request.
#[derive(Serialize)]
struct GroupView<'a> {
    label: &'a str,
    t_true: usize,
    a: f64,
    modal_t_hat: f64,
    median_t_hat: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    bins: Option<&'a [qavail::count::CountBin]>,
}

fn group_views(dists: &[GroupDistribution], with_bins: bool) -> Vec<GroupView<'_>> {
    dists
        .iter()
        .map(|d| GroupView {
            label: &d.label,
            t_true: d.t_true,
            a: d.a,
            modal_t_hat: d.modal_t_hat,
            median_t_hat: d.median_t_hat,
            bins: with_bins.then_some(&d.bins[..]),
        })
        .collect()
}

fn scenario_table(
    runs: &[ScenarioResult],
    dists: &[GroupDistribution],
    distribution: bool,
) -> Table {
    if distribution {
        let mut table = Table::new(&["group", "t_hat", "probability"]);
        for d in dists {
            for b in &d.bins {
                table.push(vec![
                    d.label.clone(),
                    b.t_hat.to_string(),
                    b.probability.to_string(),
                ]);
            }
        }
        return table;
    }
    let mut header = vec!["trial".to_string(), "seed".into(), "agreement".into()];
    for k in 1..=2 {
        for field in ["label", "recalled", "y", "a_hat", "t_hat"] {
            header.push(format!("group{k}_{field}"));
        }
    }
    let mut table = Table {
        header,
        rows: Vec::new(),
    };
    for (i, r) in runs.iter().enumerate() {
        let mut row = vec![
            i.to_string(),
            r.seed.to_string(),
            to_value(&r.agreement)
                .as_str()
                .unwrap_or_default()
                .to_string(),
        ];
        for g in &r.groups {
            row.extend([
                g.label.clone(),
                g.recalled.to_string(),
                g.y.to_string(),
                g.a_hat.to_string(),
                g.t_hat.to_string(),
            ]);
        }
        table.push(row);
    }
    table
}

/// Retrieval and estimation oracle calls summed over every run and group.
fn scenario_metrics(runs: &[ScenarioResult], register_dim: usize) -> serde_json::Value {
    let per_estimate = (register_dim as u64 * register_dim.saturating_sub(1) as u64) / 2;
    let retrieval: u64 = runs
        .iter()
        .flat_map(|r| &r.groups)
        .map(|g| g.capacity * g.speed.saturating_sub(1))
        .sum();
    let estimates: u64 = runs.iter().map(|r| r.groups.len() as u64).sum();
    json!({
        "retrieval_oracle_calls": retrieval,
        "estimation_q_applications": per_estimate * estimates,
    })
}

fn summary_or_none(runs: &[ScenarioResult]) -> qavail::Result<Option<CorrelationSummary>> {
    if runs.len() < 2 {
        return Ok(None);
    }
    correlation_summary(runs).map(Some)
}

pub fn letter(args: &LetterArgs, cap: usize) -> Result<Report, Failure> {
    check_register(args.m)?;
    check_trials(args.trials, 1)?;
    if !args.boost.is_finite() || args.boost <= 0.0 {
        return Err(usage("--boost must be a positive number"));
    }
    let lex = match &args.lexicon {
        None => Lexicon::sample(),
        Some(path) => {
            let file =
                File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            load_lexicon(BufReader::new(file))?
        }
    };
    check_cap(args.m, lex.len(), cap)?;
    let params = LetterScenario {
        letter: args.letter,
        boost: args.boost,
        register_dim: args.m,
        budget: args.budget,
    };
    let exp = LetterExperiment::new(&lex, &params)?;
    let runs = (0..args.trials)
        .map(|i| exp.run(trial_seed(args.common.seed, i)))
        .collect::<qavail::Result<Vec<_>>>()?;
    let dists = exp.distributions();

    // Runs where the estimates order the partitions against their true sizes.
    let contradicting = runs
        .iter()
        .filter(|r| {
            let (p, q) = (&r.groups[0], &r.groups[1]);
            let truth = p.t_true.cmp(&q.t_true);
            let est = p.a_hat.partial_cmp(&q.a_hat);
            truth.is_ne() && est == Some(truth.reverse())
        })
        .count();

    let config = json!({
        "command": "scenario-letter",
        "lexicon": args.lexicon.as_ref().map_or("bundled".to_string(), |p| p.display().to_string()),
        "words": lex.len(),
        "letter": args.letter.to_string(),
        "boost": args.boost,
        "m": args.m,
        "budget": args.budget,
        "trials": args.trials,
        "seed": args.common.seed,
        "format": args.common.format,
        "distribution": args.distribution,
        "joint_cap": cap,
    });
    let result = json!({
        "partitions": group_views(&dists, args.distribution),
        "runs": runs,
        "contradicting_true_counts": contradicting,
        "summary": summary_or_none(&runs)?,
    });
    Ok(report(
        &args.common,
        config,
        result,
        scenario_metrics(&runs, args.m),
        scenario_table(&runs, &dists, args.distribution),
    ))
}

pub fn names(args: &NamesArgs, cap: usize) -> Result<Report, Failure> {
    let [s1, s2] = args.sizes[..] else {
        return Err(usage("--sizes takes exactly two values"));
    };
    let [f1, f2] = args.factors[..] else {
        return Err(usage("--factors takes exactly two values"));
    };
    if s1 == 0 || s2 == 0 {
        return Err(usage("--sizes must be at least 1"));
    }
    if ![f1, f2].iter().all(|f| f.is_finite() && *f > 0.0) {
        return Err(usage("--factors must be positive numbers"));
    }
    check_register(args.m)?;
    check_trials(args.trials, 2)?;
    check_cap(args.m, s1 + s2, cap)?;

    let params = NamesScenario {
        groups: [
            GroupSpec::new("group-1", s1, f1),
            GroupSpec::new("group-2", s2, f2),
        ],
        register_dim: args.m,
        budget: args.budget,
        trials: args.trials,
    };
    let report_data = run_names_scenario(&params, args.common.seed)?;
    let config = json!({
        "command": "scenario-names",
        "sizes": [s1, s2],
        "factors": [f1, f2],
        "m": args.m,
        "budget": args.budget,
        "trials": args.trials,
        "seed": args.common.seed,
        "format": args.common.format,
        "distribution": args.distribution,
        "joint_cap": cap,
    });
    let result = json!({
        "groups": group_views(&report_data.distributions, args.distribution),
        "trials": report_data.trials,
        "summary": report_data.summary,
    });
    Ok(report(
        &args.common,
        config,
        result,
        scenario_metrics(&report_data.trials, args.m),
        scenario_table(
            &report_data.trials,
            &report_data.distributions,
            args.distribution,
        ),
    ))
}
