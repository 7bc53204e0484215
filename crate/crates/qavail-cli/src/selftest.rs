use serde::Serialize;
use serde_json::json;

use qavail::amplify::{schedule, success_probability};
use qavail::count::{count_distribution, median, mode};
use qavail::estimate::{
    est_amp_distribution, kernel_distribution, register_estimate, total_variation, EstimationConfig,
};
use qavail::statevec::{apply_q, good_probability, measure, prepare, qft};
use qavail::{Direction, GuessPrep, Oracle, Result, StateVector};

use crate::args::SelftestArgs;
use crate::report::{Report, Table};
use crate::Failure;

const TOL: f64 = 1e-9;

#[derive(Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

/// Deterministic non-uniform weights without an RNG.
fn ramp(n: usize) -> GuessPrep {
    GuessPrep::weighted((0..n).map(|x| 1.0 + ((x * 7) % 5) as f64).collect())
        .expect("positive weights")
}

fn instances() -> Vec<(GuessPrep, Oracle)> {
    let mut out = Vec::new();
    for n in [4usize, 16, 64] {
        out.push((
            GuessPrep::UniformFourier,
            Oracle::new(n, [0]).expect("oracle"),
        ));
        out.push((ramp(n), Oracle::new(n, (0..n).step_by(3)).expect("oracle")));
    }
    out
}

fn rotation() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for (prep, oracle) in instances() {
        let mut state = prepare(&prep, oracle.dim())?;
        let theta = good_probability(&state, &oracle)?.sqrt().asin();
        for m in 0..=32 {
            let closed = ((2 * m + 1) as f64 * theta).sin().powi(2);
            worst = worst.max((good_probability(&state, &oracle)? - closed).abs());
            state = apply_q(&state, &prep, &oracle)?;
        }
    }
    Ok(Check {
        name: "closed-form-rotation",
        passed: worst <= TOL,
        detail: format!("max deviation {worst:.3e}"),
    })
}

fn guarantee() -> Result<Check> {
    let mut worst = f64::INFINITY;
    for k in 1..=99 {
        let a = k as f64 / 100.0;
        let n = 16;
        let mut w = vec![(1.0 - a) / (n - 1) as f64; n];
        w[0] = a;
        let prep = GuessPrep::weighted(w)?;
        let oracle = Oracle::new(n, [0])?;
        let p = success_probability(&prep, &oracle, schedule(a)?.iterations)?;
        worst = worst.min(p - a.max(1.0 - a));
    }
    Ok(Check {
        name: "amplification-guarantee",
        passed: worst >= -TOL,
        detail: format!("min margin {worst:.3e}"),
    })
}

fn qft_roundtrip() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for n in [1usize, 2, 5, 16, 37, 64] {
        let amps: Vec<f64> = (0..n).map(|x| 1.0 + x as f64).collect();
        let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
        let psi = StateVector::from_real(&amps.iter().map(|a| a / norm).collect::<Vec<_>>())?;
        let fwd = qft(&psi, Direction::Forward);
        let back = qft(&fwd, Direction::Inverse);
        let err = back
            .amplitudes()
            .iter()
            .zip(psi.amplitudes())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(err).max((fwd.norm_sqr() - 1.0).abs());
    }
    Ok(Check {
        name: "qft-unitary-roundtrip",
        passed: worst <= TOL,
        detail: format!("max error {worst:.3e}"),
    })
}

fn oracle_equivalence(perturb: bool) -> Result<Check> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for (prep, oracle) in instances() {
        for m in [4usize, 8, 16, 32] {
            let a = prep.good_mass(&oracle)?;
            let sim =
                est_amp_distribution(&EstimationConfig::new(m, prep.clone(), oracle.clone())?)?;
            let kernel_a = if perturb { (a + 0.01).min(1.0) } else { a };
            worst = worst.max(total_variation(&sim, &kernel_distribution(kernel_a, m)?)?);
            cases += 1;
        }
    }
    Ok(Check {
        name: "estimation-oracle-equivalence",
        passed: worst <= 1e-8,
        detail: format!("{cases} cases, max TV {worst:.3e}"),
    })
}

fn distribution_shape() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for (prep, oracle) in instances() {
        for m in [5usize, 8, 32] {
            let dist =
                est_amp_distribution(&EstimationConfig::new(m, prep.clone(), oracle.clone())?)?;
            worst = worst.max((dist.iter().sum::<f64>() - 1.0).abs());
            for y in 1..m {
                worst = worst.max((dist[y] - dist[m - y]).abs());
            }
        }
    }
    Ok(Check {
        name: "distribution-normalized-symmetric",
        passed: worst <= TOL,
        detail: format!("max deviation {worst:.3e}"),
    })
}

fn exact_phase() -> Result<Check> {
    let cfg = EstimationConfig::new(6, GuessPrep::UniformFourier, Oracle::new(4, [0])?)?;
    let mass: f64 = est_amp_distribution(&cfg)?
        .iter()
        .enumerate()
        .filter(|&(y, _)| (register_estimate(y, 6) - 0.25).abs() < 1e-12)
        .map(|(_, p)| p)
        .sum();
    Ok(Check {
        name: "exact-phase",
        passed: mass >= 1.0 - TOL,
        detail: format!("P(a_hat = 0.25) = {mass:.12}"),
    })
}

fn counting_bias() -> Result<Check> {
    let oracle = Oracle::new(4, [0])?;
    let bins = count_distribution(
        &GuessPrep::weighted(vec![0.64, 0.12, 0.12, 0.12])?,
        &oracle,
        16,
    )?;
    let under = count_distribution(
        &GuessPrep::weighted(vec![0.12, 0.64, 0.12, 0.12])?,
        &oracle,
        16,
    )?;
    let (med, modal, under_med) = (median(&bins), mode(&bins), median(&under));
    Ok(Check {
        name: "counting-bias",
        passed: med > 1.0 && (modal - 2.765).abs() <= 0.01 && under_med < 1.0,
        detail: format!("median {med:.4}, mode {modal:.4}, under-weighted median {under_med:.4}"),
    })
}

fn seeded_sampling() -> Result<Check> {
    let state = prepare(&ramp(37), 37)?;
    let same = measure(&state, 42, 200)? == measure(&state, 42, 200)?;
    let differs = measure(&state, 42, 200)? != measure(&state, 43, 200)?;
    Ok(Check {
        name: "seeded-sampling",
        passed: same && differs,
        detail: format!("repeatable {same}, seed-sensitive {differs}"),
    })
}

pub fn run(args: &SelftestArgs) -> std::result::Result<Report, Failure> {
    let checks = [
        rotation(),
        guarantee(),
        qft_roundtrip(),
        oracle_equivalence(args.inject_kernel_perturbation),
        distribution_shape(),
        exact_phase(),
        counting_bias(),
        seeded_sampling(),
    ]
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let failed = checks.iter().filter(|c| !c.passed).count();

    let mut table = Table::new(&["check", "passed", "detail"]);
    for c in &checks {
        table.push(vec![
            c.name.to_string(),
            c.passed.to_string(),
            c.detail.clone(),
        ]);
    }
    let report = Report {
        format: args.format,
        timing: false,
        config: json!({
            "command": "selftest",
            "format": args.format,
            "kernel_perturbation": args.inject_kernel_perturbation,
        }),
        result: json!({ "passed": failed == 0, "checks": checks }),
        metrics: json!({ "checks": checks.len(), "failed": failed }),
        table,
    };
    if failed > 0 {
        return Err(Failure::SelftestFailed(Box::new(report)));
    }
    Ok(report)
}
