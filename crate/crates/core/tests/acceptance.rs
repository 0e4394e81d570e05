//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

#[path = "common/mod.rs"]
mod common;

use std::f64::consts::{E, PI};
use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;

use common::{log_spaced, spheroidal_ode};
use entropic_core::binning::{tail_moments, BinGrid, Convention, TRUNCATION_EPS};
use entropic_core::bounds::{
    bound_b, bound_bbm, bound_l, bound_r, jensen_diagnostic, reversed_log_sobolev_check, tail_case, Accuracies,
    BoundReport, TailCase, TailData, Verdict,
};
use entropic_core::density::Domain;
use entropic_core::entropy::{continuous_entropy, large_delta_limit_probe};
use entropic_core::fourier::to_momentum;
use entropic_core::harness::{assess, find_crossover, PreparedState, StateSpec};
use entropic_core::specfun::{radial_s1_at_one, spheroidal_eigensystem, spheroidal_eigensystem_with_terms};
use entropic_core::states::{make_gaussian, HbarConvention};

type Outcome = Result<String, String>;

const GAMMAS: [f64; 6] = [0.1, 0.425, 1.0, 7.167, 8.54, 20.0];
const WINDOW_GAMMAS: [f64; 4] = [0.1, 0.425, 1.0, 7.0];
const WINDOWS: [usize; 5] = [0, 1, 2, 5, 20];

fn hbar() -> HbarConvention {
    HbarConvention::default()
}

fn battery_specs() -> Vec<StateSpec> {
    let mut specs = Vec::new();
    for sigma in [0.25, 1.0, 4.0] {
        for x0 in [0.0, 0.3] {
            for p0 in [0.0, 0.5] {
                specs.push(StateSpec::Gaussian { sigma, x0, p0 });
            }
        }
    }
    specs.push(StateSpec::TwoGaussian { sigma: 0.5, separation: 2.0 });
    specs.push(StateSpec::Bump { half_width: 2.0 });
    specs
}

fn is_centred(spec: &StateSpec) -> bool {
    !matches!(spec, StateSpec::Gaussian { x0, p0, .. } if *x0 != 0.0 || *p0 != 0.0)
}

fn prepare(specs: &[StateSpec]) -> Result<Vec<PreparedState>, String> {
    specs
        .par_iter()
        .map(|s| PreparedState::from_spec(s, hbar(), false).map_err(|e| format!("{}: {e}", s.label())))
        .collect()
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Fails unless `name` was evaluated and its margin is at least `-tol`.
fn margin_at_least(r: &BoundReport, name: &str, tol: f64) -> Result<f64, String> {
    if let Some(e) = &r.error {
        return Err(format!("{} gamma {}: error {e}", r.state, r.gamma));
    }
    let m = *r
        .margins
        .get(name)
        .ok_or_else(|| format!("{} gamma {}: {name} not evaluated ({:?})", r.state, r.gamma, r.verdicts.get(name)))?;
    check(m >= -tol, || format!("{} gamma {} {}: {name} margin {m:e}", r.state, r.gamma, r.convention))?;
    Ok(m)
}

fn bbm_saturation() -> Outcome {
    let full = Domain::full_line();
    let mut worst_err = 0.0f64;
    let mut worst_time = 0.0f64;
    for sigma in [0.5, 1.0, 2.0] {
        let t = Instant::now();
        let s = make_gaussian(sigma, 0.0, 0.0, 1.0).map_err(|e| e.to_string())?;
        let sx = continuous_entropy(&s, &full).map_err(|e| e.to_string())?;
        let m = to_momentum(&s).map_err(|e| e.to_string())?;
        let sp = continuous_entropy(&m, &full).map_err(|e| e.to_string())?;
        let secs = t.elapsed().as_secs_f64();
        let err = (sx + sp - bound_bbm(1.0)).abs();
        check(err < 1e-8, || format!("sigma {sigma}: |S_x + S_p - (1 + ln pi)| = {err:e}"))?;
        check(secs < 1.0, || format!("sigma {sigma}: {secs:.3} s"))?;
        worst_err = worst_err.max(err);
        worst_time = worst_time.max(secs);
    }
    Ok(format!("max error {worst_err:.1e}, slowest state {worst_time:.3} s"))
}

fn strengthened_heisenberg(states: &[PreparedState]) -> Outcome {
    let quartic = prepare(&[StateSpec::Quartic { scale: 1.0 }])?;
    let mut min_slack = f64::INFINITY;
    for s in states.iter().chain(&quartic) {
        let r = assess(s, &Accuracies::from_gamma(1.0, hbar()).map_err(|e| e.to_string())?, None, Convention::Midpoint);
        min_slack = min_slack.min(margin_at_least(&r, "heisenberg", 1e-9)?);
        margin_at_least(&r, "heisenberg_floor", 1e-9)?;
    }
    Ok(format!("{} states, smallest slack {min_slack:.3e}", states.len() + quartic.len()))
}

fn full_line_reports(states: &[PreparedState]) -> Result<Vec<BoundReport>, String> {
    let mut points = Vec::new();
    for s in states {
        for g in GAMMAS {
            for c in [Convention::Border, Convention::Midpoint] {
                points.push((s, g, c));
            }
        }
    }
    points
        .par_iter()
        .map(|(s, g, c)| Ok(assess(s, &Accuracies::from_gamma(*g, hbar()).map_err(|e| e.to_string())?, None, *c)))
        .collect()
}

fn bound_b_battery(reports: &[BoundReport]) -> Outcome {
    let mut min_margin = f64::INFINITY;
    for r in reports {
        min_margin = min_margin.min(margin_at_least(r, "B", 1e-9)?);
    }
    let s = PreparedState::from_spec(&StateSpec::Gaussian { sigma: 1.0, x0: 0.0, p0: 0.0 }, hbar(), false)
        .map_err(|e| e.to_string())?;
    let acc = Accuracies::from_gamma(1e-4, hbar()).map_err(|e| e.to_string())?;
    let mut gaps = Vec::new();
    for c in [Convention::Border, Convention::Midpoint] {
        let gap = margin_at_least(&assess(&s, &acc, None, c), "B", 1e-9)?;
        check(gap < 0.01, || format!("gap {gap} at gamma 1e-4"))?;
        gaps.push(gap);
    }
    Ok(format!(
        "{} reports, smallest margin {min_margin:.3e}; gap at gamma 1e-4: {:.2e} (border), {:.2e} (midpoint)",
        reports.len(),
        gaps[0],
        gaps[1]
    ))
}

fn bound_r_sweep(reports: &[BoundReport]) -> Outcome {
    let t = Instant::now();
    let mut min_r = f64::INFINITY;
    for g in log_spaced(0.01, 50.0, 200) {
        let r = bound_r(&Accuracies::from_gamma(g, hbar()).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        check(r > 0.0, || format!("R({g}) = {r}"))?;
        min_r = min_r.min(r);
    }
    let cross = find_crossover().map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    check((7.16..=7.18).contains(&cross.gamma_star), || format!("gamma* = {}", cross.gamma_star))?;
    check(secs < 10.0, || format!("sweep took {secs:.2} s"))?;
    for r in reports {
        margin_at_least(r, "max_BR", 1e-9)?;
    }
    Ok(format!(
        "min R {min_r:.3e}, gamma* = {:.6}, sweep {secs:.2} s, max(B,R) held on {} reports",
        cross.gamma_star,
        reports.len()
    ))
}

fn spheroidal() -> Outcome {
    let mut worst_conv = 0.0f64;
    for i in 0..=80 {
        let c = 20.0 * i as f64 / 80.0;
        let s = spheroidal_eigensystem(c).map_err(|e| e.to_string())?;
        let d = spheroidal_eigensystem_with_terms(c, 2 * s.truncation).map_err(|e| e.to_string())?;
        let diff = (s.radial_at_one() - d.radial_at_one()).abs();
        check(diff < 1e-12, || format!("c = {c}: doubling changed R00 by {diff:e}"))?;
        worst_conv = worst_conv.max(diff);
    }
    let cs = log_spaced(0.01, 20.0, 25);
    let diffs: Vec<Result<f64, String>> = cs
        .par_iter()
        .map(|&c| {
            let v = radial_s1_at_one(c).map_err(|e| e.to_string())?;
            let o = spheroidal_ode::solve(c);
            Ok((v - o.radial_from_origin).abs())
        })
        .collect();
    let mut worst_ode = 0.0f64;
    for (c, d) in cs.iter().zip(diffs) {
        let d = d?;
        check(d < 1e-9, || format!("c = {c}: ODE disagreement {d:e}"))?;
        worst_ode = worst_ode.max(d);
    }
    let dev = |c: f64| radial_s1_at_one(c).map(|v| (v - c.sin() / c).abs()).map_err(|e| e.to_string());
    let (d1, d2) = (dev(1e-1)?, dev(1e-2)?);
    let slope = (d1.ln() - d2.ln()) / (1e-1f64.ln() - 1e-2f64.ln());
    check(slope >= 2.0 - 1e-3, || format!("small-c slope {slope}"))?;
    Ok(format!("doubling {worst_conv:.1e}, ODE {worst_ode:.1e} over 25 points, small-c slope {slope:.3}"))
}

fn coarse_graining_limits() -> Outcome {
    let run = |x0: f64, c: Convention| -> Result<f64, String> {
        let s = make_gaussian(1.0, x0, 0.0, 1.0).map_err(|e| e.to_string())?;
        large_delta_limit_probe(&s, c, 100.0).map(|h| h.value).map_err(|e| e.to_string())
    };
    let border = run(0.0, Convention::Border)?;
    let mid = run(0.0, Convention::Midpoint)?;
    let positive = run(50.0, Convention::Border)?;
    check((border - 2f64.ln()).abs() < 1e-6, || format!("border {border}"))?;
    check(mid.abs() < 1e-6, || format!("midpoint {mid}"))?;
    check(positive.abs() < 1e-6, || format!("localized {positive}"))?;
    Ok(format!(
        "border - ln 2 = {:.1e}, midpoint {mid:.1e}, localized {positive:.1e}",
        border - 2f64.ln()
    ))
}

fn window_tails(s: &PreparedState, acc: &Accuracies, m: usize, n: usize) -> Result<TailData, String> {
    let side = |d: &dyn entropic_core::density::Density, delta: f64, w: usize| -> Result<(f64, f64), String> {
        let t = tail_moments(d, &BinGrid::finite(delta, w).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        Ok(if t.mass <= TRUNCATION_EPS { (0.0, 0.0) } else { (t.second, t.mass) })
    };
    let (x2, qx) = side(&s.position, acc.dx, m)?;
    let (p2, qp) = side(&s.momentum, acc.dp, n)?;
    TailData::new(x2, p2, qx, qp).map_err(|e| e.to_string())
}

struct WindowPoint {
    report: BoundReport,
    tails: TailData,
    acc: Accuracies,
}

fn window_points(centred: &[PreparedState]) -> Result<Vec<WindowPoint>, String> {
    let mut points = Vec::new();
    for s in centred {
        for g in WINDOW_GAMMAS {
            for m in WINDOWS {
                for n in WINDOWS {
                    points.push((s, g, m, n));
                }
            }
        }
    }
    points
        .par_iter()
        .map(|&(s, g, m, n)| {
            let acc = Accuracies::from_gamma(g, hbar()).map_err(|e| e.to_string())?;
            Ok(WindowPoint {
                report: assess(s, &acc, Some((m, n)), Convention::Midpoint),
                tails: window_tails(s, &acc, m, n)?,
                acc,
            })
        })
        .collect()
}

fn finite_detector(points: &[WindowPoint]) -> Outcome {
    let mut min_margin = f64::INFINITY;
    let mut case_one = 0;
    let mut min_case_one = f64::INFINITY;
    for p in points {
        let r = &p.report;
        check(r.verdicts.get("L") == Some(&Verdict::Satisfied), || {
            format!("{} gamma {} window {:?}: L verdict {:?}", r.state, r.gamma, r.window, r.verdicts.get("L"))
        })?;
        min_margin = min_margin.min(margin_at_least(r, "L", 1e-9)?);
        let l = bound_l(&p.acc, &p.tails);
        let b = bound_b(&p.acc);
        if tail_case(&p.acc, &p.tails) == TailCase::BothSmall {
            case_one += 1;
            let excess = l - (b - 3.0);
            check(excess > 1e-6, || format!("{} gamma {} window {:?}: L - (B - 3) = {excess:e}", r.state, r.gamma, r.window))?;
            min_case_one = min_case_one.min(excess);
        }
        let zero = bound_l(&p.acc, &TailData::zero());
        check((zero - b).abs() < 1e-12, || format!("zero tails give {zero} vs B {b}"))?;
    }
    Ok(format!(
        "{} points, smallest L margin {min_margin:.3e}; {case_one} small-tail points, min L - (B - 3) = {min_case_one:.3e}",
        points.len()
    ))
}

fn log_sobolev(points: &[WindowPoint]) -> Outcome {
    let full = Domain::full_line();
    let mut worst_gauss = 0.0f64;
    for sigma in [0.25, 1.0, 4.0] {
        let s = make_gaussian(sigma, 0.0, 0.0, 1.0).map_err(|e| e.to_string())?;
        let v = reversed_log_sobolev_check(&s, &full).map_err(|e| e.to_string())?;
        check(v.abs() < 1e-9, || format!("sigma {sigma}: full-line gap {v:e}"))?;
        worst_gauss = worst_gauss.max(v.abs());
    }
    let mut restricted = 0;
    let mut variance = 0;
    for p in points {
        for name in ["log_sobolev_x", "log_sobolev_p", "tail_variance_x", "tail_variance_p"] {
            if p.report.margins.contains_key(name) {
                margin_at_least(&p.report, name, 1e-9)?;
                if name.starts_with("log") {
                    restricted += 1;
                } else {
                    variance += 1;
                }
            }
        }
    }
    check(restricted > 0 && variance > 0, || "no tail densities were checked".into())?;
    Ok(format!(
        "full-line gap {worst_gauss:.1e}; {restricted} restricted densities and {variance} tail variances checked"
    ))
}

fn jensen(states: &[PreparedState], points: &[WindowPoint]) -> Outcome {
    let mut checked = 0;
    let mut min_gap = f64::INFINITY;
    for s in states {
        for delta in [0.1, 0.5, 1.0] {
            for m in [0, 2, 10] {
                for (axis, d) in [("x", &s.position as &dyn entropic_core::density::Density), ("p", &s.momentum)] {
                    let g = jensen_diagnostic(d, delta, m).map_err(|e| format!("{} {axis}: {e}", s.label))?;
                    check(g >= -1e-9, || format!("{} {axis} delta {delta} M {m}: {g:e}", s.label))?;
                    min_gap = min_gap.min(g);
                    checked += 1;
                }
            }
        }
    }
    for p in points {
        margin_at_least(&p.report, "jensen_x", 1e-9)?;
        margin_at_least(&p.report, "jensen_p", 1e-9)?;
    }
    let s = make_gaussian(1.0, 0.0, 0.0, 1.0).map_err(|e| e.to_string())?;
    let fine = jensen_diagnostic(&s, 0.01, 1000).map_err(|e| e.to_string())?;
    check((0.0..1e-3).contains(&fine), || format!("gap at delta 0.01: {fine:e}"))?;
    Ok(format!("{checked} direct evaluations (min {min_gap:.2e}); gap at delta 0.01 is {fine:.2e}"))
}

fn nontriviality() -> Outcome {
    let excess = |g: f64| Accuracies::from_gamma(g, hbar()).map(|a| bound_b(&a) - 3.0).map_err(|e| e.to_string());
    let (lo, hi) = (excess(0.42)?, excess(0.43)?);
    check(lo > 0.0 && hi < 0.0, || format!("B - 3 = {lo} at 0.42, {hi} at 0.43"))?;
    Ok(format!("B - 3 = {lo:.4} at 0.42, {hi:.4} at 0.43 (root pi/e^2 = {:.4})", PI / (E * E)))
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

/// Runs `f` on shared data, or reports why the data could not be built.
fn after<T>(data: &Result<T, String>, f: impl FnOnce(&T) -> Outcome) -> Outcome {
    data.as_ref().map_err(Clone::clone).and_then(f)
}

fn main() -> ExitCode {
    let specs = battery_specs();
    let centred_specs: Vec<StateSpec> = specs.iter().filter(|s| is_centred(s)).cloned().collect();
    let (states, centred) = match (prepare(&specs), prepare(&centred_specs)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            println!("FAIL battery preparation: {e}");
            return ExitCode::FAILURE;
        }
    };
    let reports = full_line_reports(&states);
    let points = window_points(&centred);

    let criteria: Vec<Criterion> = vec![
        ("1 BBM saturation", Box::new(bbm_saturation)),
        ("2 strengthened Heisenberg", Box::new(|| strengthened_heisenberg(&states))),
        ("3 bound B", Box::new(|| after(&reports, |r| bound_b_battery(r)))),
        ("4 bound R", Box::new(|| after(&reports, |r| bound_r_sweep(r)))),
        ("5 spheroidal R00", Box::new(spheroidal)),
        ("6 coarse-graining limits", Box::new(coarse_graining_limits)),
        ("7 finite-detector bound L", Box::new(|| after(&points, |p| finite_detector(p)))),
        ("8 reversed log-Sobolev", Box::new(|| after(&points, |p| log_sobolev(p)))),
        ("9 Jensen diagnostic", Box::new(|| after(&points, |p| jensen(&states, p)))),
        ("10 nontriviality threshold", Box::new(nontriviality)),
    ];

    let mut failed = 0;
    for (name, run) in &criteria {
        let t = Instant::now();
        match run() {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{:.2} s]", t.elapsed().as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
