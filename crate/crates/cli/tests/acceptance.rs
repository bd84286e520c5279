//! Release gate: one PASS/FAIL line per acceptance criterion.
//!
//! Run with `cargo test -p qbounds-cli --test acceptance`. Exits non-zero if any
//! criterion fails. Where a closed form exists the expected value is computed
//! here from scratch rather than through the library.

use std::time::{Duration, Instant};

use qbounds_cli::{figure1, figure2, Figure1Config, Figure2Config};
use qbounds_core::models::{GaussianPrior, PhaseModel, Prior};
use qbounds_core::phase_bounds::{heisenberg_limit, mmse_gaussian, qcrb_bayes, qwwb_phase, qzzb_with_fidelity};
use qbounds_core::validation::{
    classical_gap, cross_path_errors, minimality_margin, monte_carlo_cases, qcrb_limit, tightening_margin,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn closed_form_qubit() -> Outcome {
    let sigma: f64 = 0.1;
    let prior = GaussianPrior::centered(sigma).map_err(err)?;
    let (mut worst_mmse, mut worst_qcrb): (f64, f64) = (0.0, 0.0);
    for e in [1.0, 5.0, 10.0, 20.0, 50.0] {
        let model = PhaseModel::qubit(e, 1).map_err(err)?;
        let s2 = sigma * sigma;
        let expected = s2 - s2 * s2 * e * e * (-e * e * s2).exp();
        worst_mmse = worst_mmse.max(rel(mmse_gaussian(&model, &prior).map_err(err)?, expected));
        worst_qcrb = worst_qcrb.max(rel(qcrb_bayes(&model, &prior), 1.0 / (1.0 / s2 + e * e)));
    }
    Ok((
        worst_mmse <= 1e-10 && worst_qcrb <= 1e-10,
        format!("max rel err mmse {worst_mmse:.2e}, qcrb {worst_qcrb:.2e}"),
    ))
}

fn qwwb_formula() -> Outcome {
    let sigma: f64 = 0.1;
    let prior = Prior::Gaussian(GaussianPrior::centered(sigma).map_err(err)?);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let h = rng.gen_range(0.05..10.0) * sigma;
        let e = rng.gen_range(0.1..1000.0);
        let model = PhaseModel::qubit(e, 1).map_err(err)?;
        let v = qwwb_phase(&model, &prior, 0.5, h).map_err(err)?;
        let s2 = sigma * sigma;
        let num = h * h * (-h * h / (4.0 * s2)).exp() * (h * e / 2.0).cos().powi(2);
        let den = 2.0 - 2.0 * (-h * h / (2.0 * s2)).exp() * (h * e).cos();
        worst = worst.max(rel(v, num / den));
    }
    Ok((worst <= 1e-12, format!("100 pairs, max rel err {worst:.2e}")))
}

fn figure1_ordering() -> Outcome {
    let raw = figure1(&Figure1Config::default()).map_err(err)?;
    let col = |t: &qbounds_cli::CsvTable, c: &str| t.column(c).ok_or(format!("missing column {c}"));
    let (mmse, qwwb, qzzb, qcrb) = (
        col(&raw, "mmse")?,
        col(&raw, "qwwb")?,
        col(&raw, "qzzb")?,
        col(&raw, "qcrb")?,
    );
    let mut violations = 0;
    for i in 0..mmse.len() {
        let ok = mmse[i] >= qwwb[i] - 1e-9
            && mmse[i] >= qzzb[i] - 1e-9
            && mmse[i] >= qcrb[i] - 1e-9
            && qwwb[i] >= qcrb[i] - 1e-6;
        if !ok {
            violations += 1;
        }
    }
    let norm = figure1(&Figure1Config {
        normalized: true,
        ..Figure1Config::default()
    })
    .map_err(err)?;
    let top_mmse = *col(&norm, "mmse")?.last().ok_or("empty table")?;
    let top_qcrb = *col(&norm, "qcrb")?.last().ok_or("empty table")?;
    Ok((
        violations == 0 && (top_mmse - 1.0).abs() < 1e-3 && top_qcrb < 0.05,
        format!(
            "{} rows, {violations} ordering violations; top of grid: mmse/sigma^2 {top_mmse:.6}, qcrb/sigma^2 {top_qcrb:.2e}",
            mmse.len()
        ),
    ))
}

fn figure2_threshold() -> Outcome {
    let t = figure2(&Figure2Config::default()).map_err(err)?;
    let col = |c: &str| t.column(c).ok_or(format!("missing column {c}"));
    let (nu, qwwb, qzzb, qcrb) = (col("nu")?, col("qwwb")?, col("qzzb")?, col("qcrb")?);
    let non_increasing = |v: &[f64]| v.windows(2).all(|w| w[1] <= w[0]);
    let monotone = non_increasing(&qwwb) && non_increasing(&qzzb) && non_increasing(&qcrb);
    let dominates = qwwb.iter().zip(&qcrb).all(|(w, c)| w >= c);
    let ratio: Vec<f64> = qwwb.iter().zip(&qcrb).map(|(w, c)| w / c).collect();
    let (first, last) = (ratio[0], *ratio.last().ok_or("empty table")?);
    let crossover = nu.iter().zip(&ratio).find(|(_, r)| **r < 1.2).map(|(n, _)| *n);
    Ok((
        monotone && dominates && first > 2.0 && last < 1.2 && nu[0] == 1.0 && *nu.last().unwrap() == 100.0,
        format!(
            "monotone {monotone}, qwwb >= qcrb {dominates}, ratio {first:.3} at nu=1, {last:.4} at nu=100, first nu with ratio < 1.2: {}",
            crossover.map_or("none".to_string(), |n| format!("{n}"))
        ),
    ))
}

fn cross_path_agreement() -> Outcome {
    let errs = cross_path_errors().map_err(err)?;
    let ok = errs.iter().all(|&(_, fine, coarse)| fine < 1e-4 && fine <= coarse);
    let detail = errs
        .iter()
        .map(|(k, f, c)| format!("h={k}sigma fine {f:.1e} coarse {c:.1e}"))
        .collect::<Vec<_>>()
        .join(", ");
    Ok((ok, detail))
}

/// Root of `phi sin(phi) = 1 - cos(phi)` on (2, 3) by plain bisection.
fn tangency_slope() -> f64 {
    let f = |p: f64| p * p.sin() - 1.0 + p.cos();
    let (mut lo, mut hi) = (2.0_f64, 3.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(lo) > 0.0) == (f(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).sin()
}

fn heisenberg_constants() -> Outcome {
    let lambda = tangency_slope();
    let model = PhaseModel::qubit(1e5, 1).map_err(err)?;
    let prior = Prior::Gaussian(GaussianPrior::centered(0.1).map_err(err)?);
    let hl = heisenberg_limit(&model, &prior).map_err(err)?;
    let hp2 = hl.h_plus * hl.h_plus;
    let target = 1.0 / (64.0 * lambda * lambda * hp2);
    let weaker = 1.0 / (80.0 * lambda * lambda * hp2);
    let rounded = (hl.lambda * 1e4).round() / 1e4;
    let gap = rel(hl.bound, target);
    Ok((
        (rounded - 0.7246).abs() < 1e-12 && (hl.lambda - lambda).abs() < 1e-12 && gap <= 1e-6 && hl.bound > weaker,
        format!(
            "lambda {:.6}, bound vs 1/(64 lambda^2 H+^2) rel {gap:.2e}, ratio to 1/(80 ...) {:.4}",
            hl.lambda,
            hl.bound / weaker
        ),
    ))
}

fn minimality() -> Outcome {
    let margin = minimality_margin(42, 200).map_err(err)?;
    Ok((margin >= -1e-10, format!("200 triples, smallest excess {margin:.3e}")))
}

fn qcrb_small_h() -> Outcome {
    let r = qcrb_limit();
    Ok((r.passed, r.detail))
}

fn monte_carlo() -> Outcome {
    let cases = monte_carlo_cases(42, 100_000).map_err(err)?;
    let ok = cases.iter().all(|c| c.mse > c.largest_bound - 3.0 * c.std_error);
    let detail = cases
        .iter()
        .map(|c| format!("{} mse {:.4e} (se {:.1e})", c.povm, c.mse, c.std_error))
        .collect::<Vec<_>>()
        .join(", ");
    Ok((ok, format!("{detail}; largest bound {:.4e}", cases[0].largest_bound)))
}

fn classical() -> Outcome {
    let gap = classical_gap().map_err(err)?;
    Ok((gap <= 1e-8, format!("max rel gap {gap:.2e}")))
}

fn tightening() -> Outcome {
    let (margin, attempts) = tightening_margin(42, 50).map_err(err)?;
    let sigma: f64 = 0.1;
    let flat = qzzb_with_fidelity(|_| 1.0, sigma, 1).value;
    let flat_err = rel(flat, sigma * sigma);
    Ok((
        margin >= 0.0 && flat_err <= 1e-6,
        format!("50 pairs ({attempts} drawn), smallest relative excess {margin:.2e}; unit-fidelity QZZB rel err {flat_err:.1e}"),
    ))
}

const CRITERIA: [Criterion; 11] = [
    Criterion {
        id: 1,
        name: "closed-form qubit MMSE and QCRB",
        budget: Some(Duration::from_secs(1)),
        run: closed_form_qubit,
    },
    Criterion {
        id: 2,
        name: "analytic qubit QWWB objective",
        budget: Some(Duration::from_secs(1)),
        run: qwwb_formula,
    },
    Criterion {
        id: 3,
        name: "qubit sweep ordering",
        budget: Some(Duration::from_secs(30)),
        run: figure1_ordering,
    },
    Criterion {
        id: 4,
        name: "bosonic sweep threshold",
        budget: Some(Duration::from_secs(300)),
        run: figure2_threshold,
    },
    Criterion {
        id: 5,
        name: "grid path vs analytic path",
        budget: Some(Duration::from_secs(60)),
        run: cross_path_agreement,
    },
    Criterion {
        id: 6,
        name: "Heisenberg-limit constants",
        budget: Some(Duration::from_secs(1)),
        run: heisenberg_constants,
    },
    Criterion {
        id: 7,
        name: "Hermitian score minimality",
        budget: Some(Duration::from_secs(10)),
        run: minimality,
    },
    Criterion {
        id: 8,
        name: "small-h QCRB limit",
        budget: Some(Duration::from_secs(1)),
        run: qcrb_small_h,
    },
    Criterion {
        id: 9,
        name: "Monte Carlo bound validity",
        budget: Some(Duration::from_secs(120)),
        run: monte_carlo,
    },
    Criterion {
        id: 10,
        name: "classical degeneration",
        budget: Some(Duration::from_secs(10)),
        run: classical,
    },
    Criterion {
        id: 11,
        name: "two-test-point tightening",
        budget: None,
        run: tightening,
    },
];

fn main() {
    let mut failures = 0;
    for c in &CRITERIA {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let over = c.budget.is_some_and(|b| elapsed > b);
        let (passed, detail) = match outcome {
            Ok((ok, d)) => (ok && !over, d),
            Err(e) => (false, format!("error: {e}")),
        };
        let budget = c.budget.map_or(String::new(), |b| format!(" / {:.0?}", b));
        let over_note = if over { " [over time budget]" } else { "" };
        println!(
            "{} {:>2} {}: {} ({:.3?}{budget}){over_note}",
            if passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            detail,
            elapsed
        );
        if !passed {
            failures += 1;
        }
    }
    println!("{}/{} criteria passed", CRITERIA.len() - failures, CRITERIA.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
