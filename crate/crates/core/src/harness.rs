//! Verification sweeps, the B/R crossover, and bound-comparison data.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binning::{bin_probabilities, tail_moments, BinGrid, Convention, TRUNCATION_EPS};
use crate::bounds::{
    bound_b, bound_bbm, bound_l, bound_r, jensen_diagnostic, reversed_log_sobolev_check,
    strengthened_heisenberg_rhs, tail_variance_slack, Accuracies, BoundReport, TailData, Verdict,
    MAX_GAMMA_R,
};
use crate::density::{mean_and_variance, Density, Domain, Restricted};
use crate::entropy::{continuous_entropy, discrete_entropy, EntropyKind, EntropyValue};
use crate::error::{Error, Result};
use crate::fourier::{plancherel_check, to_momentum, MomentumState};
use crate::states::{
    even_two_gaussian, make_gaussian, quartic, smooth_bump, GaussianState, GridState, HbarConvention,
    QuantumState, Representation,
};

/// Grid states whose transform loses more norm than this are not assessed.
pub const PLANCHEREL_LIMIT: f64 = 1e-8;

/// Centroids larger than this fraction of the window half-width void the finite-detector
/// verdict.
pub const CENTROID_FRACTION: f64 = 0.1;

/// Names of the inequalities checked for every report, in report order.
pub const CHECKS: [&str; 6] = ["bbm", "heisenberg", "heisenberg_floor", "B", "R", "max_BR"];

/// A state family and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    Gaussian {
        sigma: f64,
        #[serde(default)]
        x0: f64,
        #[serde(default)]
        p0: f64,
    },
    TwoGaussian {
        sigma: f64,
        separation: f64,
    },
    Bump {
        half_width: f64,
    },
    Quartic {
        scale: f64,
    },
    /// Two or three column text file `x re [im]`.
    GridFile {
        path: PathBuf,
    },
}

impl StateSpec {
    pub fn build(&self, hbar: HbarConvention) -> Result<QuantumState> {
        let h = hbar.value();
        match self {
            StateSpec::Gaussian { sigma, x0, p0 } => make_gaussian(*sigma, *x0, *p0, h),
            StateSpec::TwoGaussian { sigma, separation } => even_two_gaussian(*sigma, *separation, h),
            StateSpec::Bump { half_width } => smooth_bump(*half_width, h),
            StateSpec::Quartic { scale } => quartic(*scale, h),
            StateSpec::GridFile { path } => {
                let text = fs::read_to_string(path)?;
                Ok(QuantumState::grid(GridState::parse(&text)?, hbar))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            StateSpec::Gaussian { sigma, x0, p0 } => format!("gaussian:{sigma},{x0},{p0}"),
            StateSpec::TwoGaussian { sigma, separation } => format!("two_gaussian:{sigma},{separation}"),
            StateSpec::Bump { half_width } => format!("bump:{half_width}"),
            StateSpec::Quartic { scale } => format!("quartic:{scale}"),
            StateSpec::GridFile { path } => format!("grid:{}", path.display()),
        }
    }
}

/// Parses `gaussian:sigma[,x0[,p0]]`, `two_gaussian:sigma,separation`, `bump:w`,
/// `quartic:scale` and `grid:path`.
impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("state '{s}' lacks a 'kind:' prefix")))?;
        if kind == "grid" {
            return Ok(StateSpec::GridFile { path: args.into() });
        }
        let nums = args
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("'{t}' in '{s}': {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let arity = |lo: usize, hi: usize| -> Result<()> {
            if nums.len() < lo || nums.len() > hi {
                return Err(Error::Parse(format!("'{kind}' takes {lo} to {hi} parameters, got {}", nums.len())));
            }
            Ok(())
        };
        match kind {
            "gaussian" => {
                arity(1, 3)?;
                Ok(StateSpec::Gaussian {
                    sigma: nums[0],
                    x0: nums.get(1).copied().unwrap_or(0.0),
                    p0: nums.get(2).copied().unwrap_or(0.0),
                })
            }
            "two_gaussian" => {
                arity(2, 2)?;
                Ok(StateSpec::TwoGaussian {
                    sigma: nums[0],
                    separation: nums[1],
                })
            }
            "bump" => {
                arity(1, 1)?;
                Ok(StateSpec::Bump { half_width: nums[0] })
            }
            "quartic" => {
                arity(1, 1)?;
                Ok(StateSpec::Quartic { scale: nums[0] })
            }
            other => Err(Error::Parse(format!("unknown state kind '{other}'"))),
        }
    }
}

fn default_conventions() -> Vec<Convention> {
    vec![Convention::Midpoint]
}

/// Sweep description, read from JSON.
///
/// Accuracies come either from `gamma_grid` (symmetric `dx = dp = sqrt(gamma hbar)`) or
/// from the product of `dx_grid` and `dp_grid`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub state_specs: Vec<StateSpec>,
    #[serde(default)]
    pub gamma_grid: Vec<f64>,
    #[serde(default)]
    pub dx_grid: Vec<f64>,
    #[serde(default)]
    pub dp_grid: Vec<f64>,
    /// Detector windows `(M, N)`; empty means full-line entropies only.
    #[serde(default)]
    pub windows: Vec<(usize, usize)>,
    #[serde(default = "default_conventions")]
    pub conventions: Vec<Convention>,
    #[serde(default)]
    pub hbar: HbarConvention,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    /// Shift every state to zero position and momentum centroid before assessing it.
    #[serde(default)]
    pub recenter: bool,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.state_specs.is_empty() {
            return Err(Error::Domain("state_specs is empty".into()));
        }
        if self.conventions.is_empty() {
            return Err(Error::Domain("conventions is empty".into()));
        }
        let by_gamma = !self.gamma_grid.is_empty();
        let by_pair = !self.dx_grid.is_empty() || !self.dp_grid.is_empty();
        if by_gamma == by_pair {
            return Err(Error::Domain("give exactly one of gamma_grid or dx_grid/dp_grid".into()));
        }
        if by_pair && (self.dx_grid.is_empty() || self.dp_grid.is_empty()) {
            return Err(Error::Domain("dx_grid and dp_grid must both be nonempty".into()));
        }
        for v in self.gamma_grid.iter().chain(&self.dx_grid).chain(&self.dp_grid) {
            if !(*v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("grid value {v} is not positive")));
            }
        }
        Ok(())
    }

    pub fn accuracies(&self) -> Result<Vec<Accuracies>> {
        if !self.gamma_grid.is_empty() {
            return self.gamma_grid.iter().map(|g| Accuracies::from_gamma(*g, self.hbar)).collect();
        }
        let mut out = Vec::new();
        for dx in &self.dx_grid {
            for dp in &self.dp_grid {
                out.push(Accuracies::new(*dx, *dp, self.hbar)?);
            }
        }
        Ok(out)
    }
}

/// Copy of the state moved to zero position and momentum centroid.
pub fn recentered(state: &QuantumState) -> Result<QuantumState> {
    let hbar = state.hbar();
    match state.representation() {
        Representation::Gaussian(g) => Ok(QuantumState::gaussian(GaussianState::new(g.sigma(), 0.0, 0.0)?, hbar)),
        Representation::Grid(g) => {
            let (mean_x, _) = mean_and_variance(state)?;
            let (mean_p, _) = mean_and_variance(&to_momentum(state)?)?;
            let h = hbar.value();
            let samples: Vec<Complex64> = (0..g.len())
                .map(|j| g.samples()[j] * Complex64::from_polar(1.0, -mean_p * g.node(j) / h))
                .collect();
            Ok(QuantumState::grid(GridState::new(samples, g.x_min() - mean_x, g.dx())?, hbar))
        }
    }
}

/// Per-state quantities shared by every sweep point.
#[derive(Debug, Clone)]
pub struct PreparedState {
    pub label: String,
    pub position: QuantumState,
    pub momentum: MomentumState,
    pub sx: f64,
    pub sp: f64,
    pub mean_x: f64,
    pub var_x: f64,
    pub mean_p: f64,
    pub var_p: f64,
}

impl PreparedState {
    pub fn new(label: impl Into<String>, state: QuantumState) -> Result<Self> {
        if let Representation::Grid(g) = state.representation() {
            let defect = plancherel_check(&state);
            if defect > PLANCHEREL_LIMIT {
                return Err(Error::Resolution {
                    reason: format!("Plancherel defect {defect:e} exceeds {PLANCHEREL_LIMIT:e}"),
                    max_faithful_p: PI * state.hbar().value() / g.dx(),
                });
            }
        }
        let momentum = to_momentum(&state)?;
        let full = Domain::full_line();
        let (mean_x, var_x) = mean_and_variance(&state)?;
        let (mean_p, var_p) = mean_and_variance(&momentum)?;
        Ok(Self {
            label: label.into(),
            sx: continuous_entropy(&state, &full)?,
            sp: continuous_entropy(&momentum, &full)?,
            position: state,
            momentum,
            mean_x,
            var_x,
            mean_p,
            var_p,
        })
    }

    pub fn from_spec(spec: &StateSpec, hbar: HbarConvention, recenter: bool) -> Result<Self> {
        let mut state = spec.build(hbar)?;
        if recenter {
            state = recentered(&state)?;
        }
        Self::new(spec.label(), state)
    }
}

fn convention_name(c: Convention) -> &'static str {
    match c {
        Convention::Border => "border",
        Convention::Midpoint => "midpoint",
    }
}

fn continuous_value(v: f64) -> EntropyValue {
    EntropyValue {
        value: v,
        kind: EntropyKind::Continuous,
        truncation_bound: 0.0,
    }
}

fn empty_report(label: &str, acc: &Accuracies, window: Option<(usize, usize)>, convention: Convention) -> BoundReport {
    BoundReport {
        state: label.to_string(),
        dx: acc.dx,
        dp: acc.dp,
        hbar: acc.hbar.value(),
        gamma: acc.gamma(),
        convention: convention_name(convention).to_string(),
        window,
        ..BoundReport::default()
    }
}

/// Tail data and window entropies for one variable.
fn window_side<D: Density + ?Sized>(density: &D, delta: f64, m: usize) -> Result<(EntropyValue, f64, f64)> {
    let grid = BinGrid::finite(delta, m)?;
    let h = discrete_entropy(&bin_probabilities(density, &grid)?);
    let t = tail_moments(density, &grid)?;
    let mass = if t.mass <= TRUNCATION_EPS { 0.0 } else { t.mass };
    let second = if mass == 0.0 { 0.0 } else { t.second };
    Ok((h, second, mass))
}

fn tail_diagnostics<D: Density + ?Sized>(r: &mut BoundReport, axis: &str, density: &D, delta: f64, m: usize, mass: f64) -> Result<()> {
    r.record(&format!("jensen_{axis}"), jensen_diagnostic(density, delta, m)?, 0.0);
    if mass > TRUNCATION_EPS {
        let edge = (m as f64 + 0.5) * delta;
        let tail = Domain::outside(edge)?;
        let f = Restricted::new(density, tail.clone())?;
        r.record(&format!("log_sobolev_{axis}"), reversed_log_sobolev_check(&f, &tail)?, 0.0);
        r.record(&format!("tail_variance_{axis}"), tail_variance_slack(density, delta, m)?, 0.0);
    }
    Ok(())
}

fn fill(r: &mut BoundReport, s: &PreparedState, acc: &Accuracies, window: Option<(usize, usize)>, convention: Convention) -> Result<()> {
    let hbar = acc.hbar.value();
    r.entropies.insert("S_x".into(), continuous_value(s.sx));
    r.entropies.insert("S_p".into(), continuous_value(s.sp));

    let bbm = bound_bbm(hbar);
    r.bound_bbm = Some(bbm);
    r.record("bbm", s.sx + s.sp, bbm);
    let rhs = strengthened_heisenberg_rhs(s.sx, s.sp, hbar);
    r.record("heisenberg", (s.var_x * s.var_p).sqrt(), rhs);
    r.record("heisenberg_floor", rhs, 0.5 * hbar);

    let hx = discrete_entropy(&bin_probabilities(&s.position, &BinGrid::full_line(acc.dx, convention)?)?);
    let hp = discrete_entropy(&bin_probabilities(&s.momentum, &BinGrid::full_line(acc.dp, convention)?)?);
    r.entropies.insert("H_x".into(), hx);
    r.entropies.insert("H_p".into(), hp);
    let b = bound_b(acc);
    r.bound_b = Some(b);
    r.record("B", hx.value + hp.value, b);
    if b < 0.0 {
        r.diagnostics.push(format!("B: rhs {b} is negative, so the relation holds trivially"));
    }
    if acc.gamma() <= MAX_GAMMA_R * (1.0 + 1e-12) {
        let rv = bound_r(acc)?;
        r.bound_r = Some(rv);
        r.record("R", hx.value + hp.value, rv);
        r.record("max_BR", hx.value + hp.value, b.max(rv));
    } else {
        r.not_applicable("R", format!("gamma {} exceeds {MAX_GAMMA_R}", acc.gamma()));
        r.not_applicable("max_BR", "R unavailable");
    }

    if let Some((m, n)) = window {
        let (hm, x2, qx) = window_side(&s.position, acc.dx, m)?;
        let (hn, p2, qp) = window_side(&s.momentum, acc.dp, n)?;
        r.entropies.insert("H_M_x".into(), hm);
        r.entropies.insert("H_N_p".into(), hn);
        let x_reach = (m as f64 + 0.5) * acc.dx * CENTROID_FRACTION;
        let p_reach = (n as f64 + 0.5) * acc.dp * CENTROID_FRACTION;
        if s.mean_x.abs() > x_reach || s.mean_p.abs() > p_reach {
            r.not_applicable(
                "L",
                format!(
                    "centroid ({}, {}) exceeds a tenth of the window half-widths ({}, {}); recenter the state",
                    s.mean_x,
                    s.mean_p,
                    x_reach / CENTROID_FRACTION,
                    p_reach / CENTROID_FRACTION
                ),
            );
        } else {
            let tails = TailData::new(x2, p2, qx, qp)?;
            let l = bound_l(acc, &tails);
            r.bound_l = Some(l);
            r.record("L", hm.value + hn.value, l);
        }
        tail_diagnostics(r, "x", &s.position, acc.dx, m, qx)?;
        tail_diagnostics(r, "p", &s.momentum, acc.dp, n, qp)?;
    }
    Ok(())
}

/// Evaluate every entropy, bound and diagnostic for one sweep point.
pub fn assess(state: &PreparedState, acc: &Accuracies, window: Option<(usize, usize)>, convention: Convention) -> BoundReport {
    let mut r = empty_report(&state.label, acc, window, convention);
    if let Err(e) = fill(&mut r, state, acc, window, convention) {
        attach_error(&mut r, &e);
    }
    r
}

fn attach_error(r: &mut BoundReport, e: &Error) {
    r.error = Some(e.to_string());
    r.diagnostics.push(format!("error: {e}"));
    let mut names: Vec<&str> = CHECKS.to_vec();
    if r.window.is_some() {
        names.push("L");
    }
    for name in names {
        r.verdicts.entry(name.to_string()).or_insert(Verdict::NotApplicable);
    }
}

/// One report per (state, accuracies, convention, window), in config order.
pub fn run_verify(config: &SweepConfig) -> Result<Vec<BoundReport>> {
    config.validate()?;
    let accs = config.accuracies()?;
    let prepared: Vec<(String, Result<PreparedState>)> = config
        .state_specs
        .par_iter()
        .map(|spec| (spec.label(), PreparedState::from_spec(spec, config.hbar, config.recenter)))
        .collect();
    let windows: Vec<Option<(usize, usize)>> = if config.windows.is_empty() {
        vec![None]
    } else {
        config.windows.iter().copied().map(Some).collect()
    };
    let mut points = Vec::new();
    for (si, _) in prepared.iter().enumerate() {
        for acc in &accs {
            for conv in &config.conventions {
                for w in &windows {
                    points.push((si, *acc, *conv, *w));
                }
            }
        }
    }
    Ok(points
        .par_iter()
        .map(|(si, acc, conv, w)| match &prepared[*si].1 {
            Ok(s) => assess(s, acc, *w, *conv),
            Err(e) => {
                let mut r = empty_report(&prepared[*si].0, acc, *w, *conv);
                attach_error(&mut r, e);
                r
            }
        })
        .collect())
}

/// True when every report is clean; the CLI maps this to its exit status.
pub fn all_clean(reports: &[BoundReport]) -> bool {
    reports.iter().all(BoundReport::is_clean)
}

/// `reports.json` (full reports) and `summary.csv` (one row per check) under `dir`.
pub fn write_reports(reports: &[BoundReport], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(reports).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(dir.join("reports.json"), json + "\n")?;
    fs::write(dir.join("summary.csv"), summary_csv(reports))?;
    Ok(())
}

pub fn summary_csv(reports: &[BoundReport]) -> String {
    let mut out = String::from("state,dx,dp,gamma,convention,m,n,check,margin,verdict\n");
    for r in reports {
        let (m, n) = r.window.map(|(m, n)| (m.to_string(), n.to_string())).unwrap_or_default();
        for (name, verdict) in &r.verdicts {
            let margin = r.margins.get(name).map(|v| format!("{v:.16e}")).unwrap_or_default();
            let verdict = serde_json::to_value(verdict).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{},{m},{n},{name},{margin},{verdict}",
                r.state, r.dx, r.dp, r.gamma, r.convention
            );
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossoverResult {
    pub gamma_star: f64,
    pub bracket: (f64, f64),
    /// `bound_b - bound_r` at `gamma_star`.
    pub residual: f64,
}

/// Lower end of the crossover search bracket.
pub const CROSSOVER_LO: f64 = 1.0;
/// Upper end of the crossover search bracket.
pub const CROSSOVER_HI: f64 = 20.0;

/// Root of `bound_b(gamma) - r(gamma)` on `[1, 20]` by bisection to `1e-10`.
pub fn crossover_with<F: Fn(f64) -> Result<f64>>(r: F) -> Result<CrossoverResult> {
    let hbar = HbarConvention::default();
    let f = |g: f64| -> Result<f64> { Ok(bound_b(&Accuracies::from_gamma(g, hbar)?) - r(g)?) };
    let (mut lo, mut hi) = (CROSSOVER_LO, CROSSOVER_HI);
    let (mut f_lo, f_hi) = (f(lo)?, f(hi)?);
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Numeric {
            what: format!("B - R does not change sign on [{lo}, {hi}]"),
            residual: f_lo.abs().min(f_hi.abs()),
        });
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    let gamma_star = 0.5 * (lo + hi);
    Ok(CrossoverResult {
        gamma_star,
        bracket: (CROSSOVER_LO, CROSSOVER_HI),
        residual: f(gamma_star)?,
    })
}

/// Where the spheroidal bound overtakes `bound_b`.
pub fn find_crossover() -> Result<CrossoverResult> {
    crossover_with(|g| bound_r(&Accuracies::from_gamma(g, HbarConvention::default())?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fig2Row {
    pub gamma: f64,
    pub bound_b: f64,
    pub bound_r: f64,
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Rows `(gamma, B, R)` on a log-spaced grid. On failure returns the rows computed so far
/// together with the error.
pub fn emit_fig2_data(gamma_lo: f64, gamma_hi: f64, n: usize) -> std::result::Result<Vec<Fig2Row>, (Vec<Fig2Row>, Error)> {
    if !(gamma_lo > 0.0 && gamma_lo < gamma_hi && gamma_hi.is_finite()) || n < 2 {
        return Err((Vec::new(), Error::Domain(format!("need 0 < gamma_lo < gamma_hi and n >= 2, got {gamma_lo}, {gamma_hi}, {n}"))));
    }
    let hbar = HbarConvention::default();
    let mut rows = Vec::with_capacity(n);
    for gamma in log_grid(gamma_lo, gamma_hi, n) {
        let row = Accuracies::from_gamma(gamma, hbar).and_then(|acc| {
            Ok(Fig2Row {
                gamma,
                bound_b: bound_b(&acc),
                bound_r: bound_r(&acc)?,
            })
        });
        match row {
            Ok(r) => rows.push(r),
            Err(e) => return Err((rows, e)),
        }
    }
    Ok(rows)
}

/// Marker line appended to a CSV whose generation stopped early.
pub const PARTIAL_MARKER: &str = "# PARTIAL";

pub fn fig2_csv(rows: &[Fig2Row]) -> String {
    let mut out = String::from("gamma,bound_B,bound_R\n");
    for r in rows {
        let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", r.gamma, r.bound_b, r.bound_r);
    }
    out
}

/// gnuplot script that plots the CSV at `csv_name` (a path relative to the script).
pub fn fig2_script(csv_name: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set logscale x\n\
         set xlabel 'gamma = dx dp / hbar'\n\
         set ylabel 'nats'\n\
         set yrange [-1:*]\n\
         plot '{csv_name}' using 1:2 with lines dashtype 2 lc rgb 'red' title 'B', \\\n     \
         '' using 1:3 with lines lc rgb 'dark-green' title 'R'\n"
    )
}

/// Write the CSV and a companion `.gp` script next to it. On a specfun failure the
/// partial rows are written, followed by a [`PARTIAL_MARKER`] line, and the error returned.
pub fn write_fig2(path: &Path, gamma_lo: f64, gamma_hi: f64, n: usize) -> Result<Vec<Fig2Row>> {
    let script = path.with_extension("gp");
    let csv_name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    match emit_fig2_data(gamma_lo, gamma_hi, n) {
        Ok(rows) => {
            fs::write(path, fig2_csv(&rows))?;
            fs::write(script, fig2_script(&csv_name))?;
            Ok(rows)
        }
        Err((rows, e)) => {
            let mut text = fig2_csv(&rows);
            let _ = writeln!(text, "{PARTIAL_MARKER}: {e}");
            fs::write(path, text)?;
            Err(e)
        }
    }
}

/// Discrete and continuous entropies of one state on one bin grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub state: String,
    pub delta: f64,
    pub xi0: f64,
    pub window: Option<usize>,
    pub discrete: EntropyValue,
    pub continuous: f64,
    pub covered_mass: f64,
    pub tail_mass: f64,
}

pub fn entropy_report(spec: &StateSpec, hbar: HbarConvention, delta: f64, xi0: f64, window: Option<usize>) -> Result<(EntropyReport, String)> {
    let state = spec.build(hbar)?;
    let grid = match window {
        Some(m) => BinGrid::new(delta, xi0, crate::binning::Window::Finite(m))?,
        None => BinGrid::new(delta, xi0, crate::binning::Window::FullLine)?,
    };
    let dist = bin_probabilities(&state, &grid)?;
    let report = EntropyReport {
        state: spec.label(),
        delta,
        xi0,
        window,
        discrete: discrete_entropy(&dist),
        continuous: continuous_entropy(&state, &Domain::full_line())?,
        covered_mass: dist.covered_mass(),
        tail_mass: dist.tail_mass(),
    };
    Ok((report, dist.to_csv()))
}

/// Bounds and margins at given accuracies and tail data, without a state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsSummary {
    pub dx: f64,
    pub dp: f64,
    pub hbar: f64,
    pub gamma: f64,
    #[serde(rename = "bound_BBM")]
    pub bound_bbm: f64,
    #[serde(rename = "bound_B")]
    pub bound_b: f64,
    #[serde(rename = "bound_R")]
    pub bound_r: Option<f64>,
    #[serde(rename = "bound_max_BR")]
    pub bound_max_br: Option<f64>,
    #[serde(rename = "bound_L")]
    pub bound_l: f64,
    pub tail_case: crate::bounds::TailCase,
    pub diagnostics: Vec<String>,
}

pub fn bounds_summary(acc: &Accuracies, tails: &TailData) -> BoundsSummary {
    let b = bound_b(acc);
    let mut diagnostics = Vec::new();
    let r = match bound_r(acc) {
        Ok(v) => Some(v),
        Err(e) => {
            diagnostics.push(format!("R: {e}"));
            None
        }
    };
    BoundsSummary {
        dx: acc.dx,
        dp: acc.dp,
        hbar: acc.hbar.value(),
        gamma: acc.gamma(),
        bound_bbm: bound_bbm(acc.hbar.value()),
        bound_b: b,
        bound_r: r,
        bound_max_br: r.map(|r| r.max(b)),
        bound_l: bound_l(acc, tails),
        tail_case: crate::bounds::tail_case(acc, tails),
        diagnostics,
    }
}

/// Ordered map of verdict counts, for compact summaries.
pub fn verdict_counts(reports: &[BoundReport]) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for r in reports {
        for v in r.verdicts.values() {
            let key = serde_json::to_value(v).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            *out.entry(key).or_insert(0) += 1;
        }
        if r.error.is_some() {
            *out.entry("error".to_string()).or_insert(0) += 1;
        }
    }
    out
}
