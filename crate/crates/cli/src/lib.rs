//! Sweeps and reports behind the `qbounds` binary.
//!
//! Every command produces a [`CsvTable`]: a `# key=value` block recording the
//! configuration, a header row and numeric rows written with 17 significant
//! digits, so identical configurations give byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use qbounds_core::models::{GaussianPrior, GridHybridModel, ModelFile, ModelKind, PhaseModel, Prior};
use qbounds_core::phase_bounds::{
    heisenberg_limit, mmse_gaussian, qcrb_bayes, qwwb_optimize, qwwb_phase, qzzb_gaussian, BoundReport, QwwbOptions,
};
use qbounds_core::validation::{run_all, SuiteResult};
use qbounds_core::ww::{assemble, covariance_bound, snap_to_grid};
use qbounds_core::BoundsError;
use rayon::prelude::*;

/// Failure classes of the command line, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    /// A validation suite failed.
    Validation(Vec<SuiteResult>),
    /// The model does not support the requested method.
    Capability(String),
    /// Unreadable input, unwritable output or a malformed configuration.
    Config(String),
    /// A numerical failure inside the library.
    Numerical(BoundsError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Capability(_) => 3,
            CliError::Config(_) => 4,
            CliError::Numerical(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(failed) => {
                let names: Vec<&str> = failed.iter().map(|r| r.name.as_str()).collect();
                write!(f, "validation failed: {}", names.join(", "))
            }
            CliError::Capability(m) => write!(f, "unsupported: {m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(e) => write!(f, "numerical error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::Unsupported(m) => CliError::Capability(m),
            BoundsError::ModelFile(m) => CliError::Config(m),
            other => CliError::Numerical(other),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Comma-separated table with a configuration preamble.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub config: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            config: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.config.push((key.to_string(), value.to_string()));
        self
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.config {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_value(*v)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn write_to(&self, path: &Path) -> CliResult<()> {
        std::fs::write(path, self.render()).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Scientific notation with 17 significant digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| format_value(*v)).collect::<Vec<_>>().join(" ")
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut out: Vec<f64> = (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect();
    // pin the endpoints so user-supplied bounds survive the round trip exactly
    out[0] = lo;
    out[n - 1] = hi;
    out
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Probe energies of the first benchmark, `logspace(0.1/sigma, 100/sigma, 60)`.
pub fn default_energy_grid(sigma: f64) -> Vec<f64> {
    logspace(0.1 / sigma, 100.0 / sigma, 60)
}

/// Probe counts of the second benchmark.
pub fn default_nu_grid() -> Vec<u32> {
    let mut grid: Vec<u32> = (1..=10).collect();
    grid.extend([12, 15, 20, 30, 50, 70, 100]);
    grid
}

/// Probe counts shown in the fidelity inset.
pub const FIDELITY_NUS: [u32; 5] = [1, 2, 5, 10, 100];
const FIDELITY_POINTS: usize = 401;

fn check_grid(values: &[f64], what: &str) -> CliResult<()> {
    if values.is_empty() {
        return Err(CliError::Config(format!("{what} grid is empty")));
    }
    if values.iter().any(|v| !v.is_finite()) || values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Config(format!(
            "{what} grid must be finite and strictly ascending"
        )));
    }
    Ok(())
}

fn gaussian(sigma: f64) -> CliResult<GaussianPrior<f64>> {
    GaussianPrior::centered(sigma).map_err(|e| CliError::Config(e.to_string()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Figure1Config {
    pub sigma: f64,
    pub energies: Option<Vec<f64>>,
    pub normalized: bool,
    pub optimize_s: bool,
}

impl Default for Figure1Config {
    fn default() -> Self {
        Self {
            sigma: 0.1,
            energies: None,
            normalized: false,
            optimize_s: false,
        }
    }
}

/// Qubit probe `(|0> + |1>)/sqrt 2` with energy gap `E`: MMSE, QWWB, QZZB and QCRB against `E`.
pub fn figure1(cfg: &Figure1Config) -> CliResult<CsvTable> {
    let prior = gaussian(cfg.sigma)?;
    let energies = cfg.energies.clone().unwrap_or_else(|| default_energy_grid(cfg.sigma));
    check_grid(&energies, "E")?;
    let options = QwwbOptions {
        optimize_s: cfg.optimize_s,
        ..QwwbOptions::default()
    };
    let report = BoundReport::sweep("qubit", "E", &energies, &prior, &options, |e| PhaseModel::qubit(e, 1))?;
    let scale = if cfg.normalized { 1.0 / prior.variance() } else { 1.0 };
    let mut table = CsvTable::new(&["E", "mmse", "qwwb", "qzzb", "qcrb"])
        .with("command", "figure1")
        .with("model", "qubit")
        .with("sigma", format_value(cfg.sigma))
        .with("normalized", cfg.normalized)
        .with("s", if cfg.optimize_s { "optimized" } else { "0.5" })
        .with("h_range", "(0,10sigma]")
        .with("points", energies.len());
    for p in &report.points {
        let mmse = p
            .mmse
            .ok_or_else(|| CliError::Capability("qubit MMSE unavailable".into()))?;
        table.rows.push(vec![
            p.sweep_value,
            mmse * scale,
            p.qwwb.value * scale,
            p.qzzb * scale,
            p.qcrb * scale,
        ]);
    }
    Ok(table)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Figure2Config {
    pub sigma: f64,
    pub epsilon: f64,
    pub levels: u32,
    pub nus: Option<Vec<u32>>,
    pub optimize_s: bool,
}

impl Default for Figure2Config {
    fn default() -> Self {
        Self {
            sigma: 0.5,
            epsilon: 0.1,
            levels: 10,
            nus: None,
            optimize_s: false,
        }
    }
}

/// Bosonic probes `sqrt(1-eps)|0> + sqrt(eps/M) sum_j |j>`: QWWB, QZZB and QCRB against the probe count.
pub fn figure2(cfg: &Figure2Config) -> CliResult<CsvTable> {
    let prior = gaussian(cfg.sigma)?;
    let nus = cfg.nus.clone().unwrap_or_else(default_nu_grid);
    let as_f64: Vec<f64> = nus.iter().map(|&n| n as f64).collect();
    check_grid(&as_f64, "nu")?;
    if nus[0] == 0 {
        return Err(CliError::Config("probe counts start at 1".into()));
    }
    let probe = PhaseModel::bosonic(cfg.epsilon, cfg.levels, 1).map_err(|e| CliError::Config(e.to_string()))?;
    let options = QwwbOptions {
        optimize_s: cfg.optimize_s,
        ..QwwbOptions::default()
    };
    let report = BoundReport::sweep("bosonic", "nu", &as_f64, &prior, &options, |nu| {
        probe.with_copies(nu as u32)
    })?;
    let mut table = CsvTable::new(&["nu", "qwwb", "qzzb", "qcrb"])
        .with("command", "figure2")
        .with("model", "bosonic")
        .with("sigma", format_value(cfg.sigma))
        .with("epsilon", format_value(cfg.epsilon))
        .with("M", cfg.levels)
        .with("s", if cfg.optimize_s { "optimized" } else { "0.5" })
        .with("h_range", "(0,10sigma]")
        .with("points", nus.len());
    for p in &report.points {
        table.rows.push(vec![p.sweep_value, p.qwwb.value, p.qzzb, p.qcrb]);
    }
    Ok(table)
}

/// `|z(h)|^(2 nu)` on `h in [0, 10 sigma]` for the inset probe counts.
pub fn figure2_fidelity(cfg: &Figure2Config) -> CliResult<CsvTable> {
    let probe = PhaseModel::bosonic(cfg.epsilon, cfg.levels, 1).map_err(|e| CliError::Config(e.to_string()))?;
    let models = FIDELITY_NUS
        .iter()
        .map(|&nu| probe.with_copies(nu))
        .collect::<Result<Vec<_>, _>>()?;
    let mut columns = vec!["h".to_string()];
    columns.extend(FIDELITY_NUS.iter().map(|nu| format!("nu{nu}")));
    let mut table = CsvTable {
        config: Vec::new(),
        columns,
        rows: Vec::new(),
    }
    .with("command", "figure2-fidelity")
    .with("sigma", format_value(cfg.sigma))
    .with("epsilon", format_value(cfg.epsilon))
    .with("M", cfg.levels);
    for h in linspace(0.0, 10.0 * cfg.sigma, FIDELITY_POINTS) {
        let mut row = vec![h];
        row.extend(models.iter().map(|m| m.fidelity(h)));
        table.rows.push(row);
    }
    Ok(table)
}

/// Bound evaluated by the `bound` command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Qwwb,
    Qzzb,
    Qcrb,
    Mmse,
    GenericWw,
}

impl std::str::FromStr for Method {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "qwwb" => Ok(Method::Qwwb),
            "qzzb" => Ok(Method::Qzzb),
            "qcrb" => Ok(Method::Qcrb),
            "mmse" => Ok(Method::Mmse),
            "generic-ww" => Ok(Method::GenericWw),
            other => Err(CliError::Config(format!(
                "unknown method {other:?}; expected qwwb, qzzb, qcrb, mmse or generic-ww"
            ))),
        }
    }
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Qwwb => "qwwb",
            Method::Qzzb => "qzzb",
            Method::Qcrb => "qcrb",
            Method::Mmse => "mmse",
            Method::GenericWw => "generic-ww",
        }
    }
}

/// Quantity varied by `--sweep`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepVar {
    /// Test-point displacement.
    H,
    /// Test-point exponent.
    S,
    /// Qubit energy gap, or the bosonic `epsilon`.
    E,
    /// Probe count.
    Nu,
    /// Prior standard deviation.
    Sigma,
}

/// Parsed `--sweep` argument: `VAR=a:b:n`, `VAR=a:b:n:log` or `VAR=v1,v2,...`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub var: SweepVar,
    pub values: Vec<f64>,
}

impl std::str::FromStr for Sweep {
    type Err = CliError;

    fn from_str(spec: &str) -> CliResult<Self> {
        let bad = || {
            CliError::Config(format!(
                "malformed sweep {spec:?}; use VAR=a:b:n[:log] or VAR=v1,v2,..."
            ))
        };
        let (name, rest) = spec.split_once('=').ok_or_else(bad)?;
        let var = match name.trim() {
            "h" => SweepVar::H,
            "s" => SweepVar::S,
            "E" => SweepVar::E,
            "nu" => SweepVar::Nu,
            "sigma" => SweepVar::Sigma,
            other => {
                return Err(CliError::Config(format!(
                    "cannot sweep {other:?}; use h, s, E, nu or sigma"
                )))
            }
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let values = if rest.contains(':') {
            let parts: Vec<&str> = rest.split(':').collect();
            if !(3..=4).contains(&parts.len()) {
                return Err(bad());
            }
            let (lo, hi) = (num(parts[0])?, num(parts[1])?);
            let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
            if n == 0 {
                return Err(bad());
            }
            match parts.get(3).map(|s| s.trim()) {
                None => linspace(lo, hi, n),
                Some("log") if lo > 0.0 && hi > 0.0 => logspace(lo, hi, n),
                _ => return Err(bad()),
            }
        } else {
            rest.split(',').map(num).collect::<CliResult<Vec<_>>>()?
        };
        check_grid(&values, name)?;
        if var == SweepVar::Nu && values.iter().any(|v| v.fract() != 0.0 || *v < 1.0) {
            return Err(CliError::Config("nu sweeps take positive integers".into()));
        }
        Ok(Sweep { var, values })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundConfig {
    pub method: Method,
    /// Test-point displacements; several are combined by `generic-ww`.
    pub h: Vec<f64>,
    pub s: f64,
    pub sweep: Option<Sweep>,
    pub optimize_s: bool,
    /// Grid size used by `generic-ww` for Gaussian priors.
    pub grid_points: usize,
    /// Half-width of that grid, in prior standard deviations.
    pub half_width: f64,
}

impl BoundConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            h: Vec::new(),
            s: 0.5,
            sweep: None,
            optimize_s: false,
            grid_points: qbounds_core::models::prior::DEFAULT_GRID_POINTS,
            half_width: qbounds_core::models::prior::DEFAULT_HALF_WIDTH_SIGMAS,
        }
    }
}

/// One evaluation context: a model, a prior and test-point settings.
#[derive(Clone, Debug)]
struct Case {
    model: PhaseModel<f64>,
    prior: Prior<f64>,
    h: Vec<f64>,
    s: f64,
}

fn require_gaussian(prior: &Prior<f64>, method: Method) -> CliResult<GaussianPrior<f64>> {
    prior
        .as_gaussian()
        .copied()
        .ok_or_else(|| CliError::Capability(format!("{} needs a Gaussian prior", method.name())))
}

fn apply_sweep(base: &Case, var: SweepVar, v: f64) -> CliResult<Case> {
    let mut case = base.clone();
    match var {
        SweepVar::H => case.h = vec![v],
        SweepVar::S => case.s = v,
        SweepVar::Nu => case.model = base.model.with_copies(v as u32)?,
        SweepVar::Sigma => {
            let mean = base
                .prior
                .as_gaussian()
                .map(|g| g.mean)
                .ok_or_else(|| CliError::Capability("sigma sweeps need a Gaussian prior".into()))?;
            case.prior = Prior::Gaussian(GaussianPrior::new(mean, v)?);
        }
        SweepVar::E => {
            let m = &base.model;
            case.model = match m.kind() {
                ModelKind::Qubit => PhaseModel::qubit(v, m.copies())?,
                ModelKind::Bosonic => PhaseModel::bosonic(v, (m.dim() - 1) as u32, m.copies())?,
                ModelKind::Generic => {
                    return Err(CliError::Capability("E sweeps need a qubit or bosonic model".into()));
                }
            };
        }
    }
    Ok(case)
}

/// Output row of one case: the value plus where the QWWB optimum sits.
fn evaluate(case: &Cfg, c: &Case) -> CliResult<Vec<f64>> {
    match case.method {
        Method::Qwwb => {
            if let Some(&h) = c.h.first() {
                Ok(vec![qwwb_phase(&c.model, &c.prior, c.s, h)?, c.s, h])
            } else {
                let options = QwwbOptions {
                    optimize_s: case.optimize_s,
                    ..QwwbOptions::default()
                };
                let best = qwwb_optimize(&c.model, &c.prior, &options)?;
                Ok(vec![best.value, best.s, best.h])
            }
        }
        Method::Qzzb => Ok(vec![qzzb_gaussian(&c.model, &require_gaussian(&c.prior, case.method)?)]),
        Method::Qcrb => Ok(vec![qcrb_bayes(&c.model, &require_gaussian(&c.prior, case.method)?)]),
        Method::Mmse => Ok(vec![mmse_gaussian(
            &c.model,
            &require_gaussian(&c.prior, case.method)?,
        )?]),
        Method::GenericWw => {
            if c.h.is_empty() {
                return Err(CliError::Config("generic-ww needs at least one --h".into()));
            }
            let tab = match &c.prior {
                Prior::Gaussian(g) => g.tabulate(case.half_width, case.grid_points)?,
                Prior::Tabulated(t) => t.clone(),
            };
            let grid = GridHybridModel::from_phase_model(&c.model, tab)?;
            let snapped =
                c.h.iter()
                    .map(|&h| snap_to_grid(h, c.s, grid.dx()))
                    .collect::<Result<Vec<_>, _>>()?;
            let tps: Vec<_> = snapped.iter().map(|t| t.test_point.clone()).collect();
            let bound = covariance_bound(&assemble(&grid, &tps)?)?.scalar();
            let worst_snap = snapped.iter().map(|t| t.snap_error.abs()).fold(0.0, f64::max);
            Ok(vec![bound, c.s, worst_snap])
        }
    }
}

/// Subset of [`BoundConfig`] shared across sweep points.
struct Cfg {
    method: Method,
    optimize_s: bool,
    grid_points: usize,
    half_width: f64,
}

fn value_columns(method: Method) -> Vec<&'static str> {
    match method {
        Method::Qwwb => vec!["qwwb", "s", "h"],
        Method::GenericWw => vec!["generic_ww", "s", "max_snap_error"],
        Method::Qzzb => vec!["qzzb"],
        Method::Qcrb => vec!["qcrb"],
        Method::Mmse => vec!["mmse"],
    }
}

/// Single bound, or a sweep of it, for a model file.
pub fn bound(model_file: &ModelFile, source: &str, cfg: &BoundConfig) -> CliResult<CsvTable> {
    let (model, prior) = model_parts(model_file)?;
    if !(cfg.s > 0.0 && cfg.s < 1.0) {
        return Err(CliError::Config(format!("--s must lie in (0, 1), got {}", cfg.s)));
    }
    let base = Case {
        model,
        prior,
        h: cfg.h.clone(),
        s: cfg.s,
    };
    let shared = Cfg {
        method: cfg.method,
        optimize_s: cfg.optimize_s,
        grid_points: cfg.grid_points,
        half_width: cfg.half_width,
    };
    let mut table = CsvTable::new(&[])
        .with("command", "bound")
        .with("model", source)
        .with("method", cfg.method.name())
        .with("s", format_value(cfg.s))
        .with("h", join(&cfg.h));
    if cfg.method == Method::GenericWw {
        table = table
            .with("grid_points", cfg.grid_points)
            .with("half_width_sigmas", format_value(cfg.half_width));
    }
    let mut columns: Vec<&str> = Vec::new();
    let rows = match &cfg.sweep {
        None => vec![evaluate(&shared, &base)?],
        Some(sweep) => {
            let name = match sweep.var {
                SweepVar::H => "h",
                SweepVar::S => "s",
                SweepVar::E => "E",
                SweepVar::Nu => "nu",
                SweepVar::Sigma => "sigma",
            };
            columns.push(name);
            table = table.with("sweep", format!("{name}={}", join(&sweep.values)));
            sweep
                .values
                .par_iter()
                .map(|&v| {
                    let case = apply_sweep(&base, sweep.var, v)?;
                    let mut row = vec![v];
                    row.extend(evaluate(&shared, &case)?);
                    Ok(row)
                })
                .collect::<CliResult<Vec<_>>>()?
        }
    };
    columns.extend(value_columns(cfg.method));
    table.columns = columns.iter().map(|c| c.to_string()).collect();
    table.rows = rows;
    Ok(table)
}

/// Heisenberg-limit constants of a model file.
pub fn heisenberg(model_file: &ModelFile, source: &str) -> CliResult<CsvTable> {
    let (model, prior) = model_parts(model_file)?;
    let hl = heisenberg_limit(&model, &prior).map_err(|e| match e {
        BoundsError::NoDynamics => CliError::Capability("probe has no energy above its ground level".into()),
        other => other.into(),
    })?;
    let mut table = CsvTable::new(&["lambda", "h_plus", "h_star", "kappa", "bound_prime", "bound"])
        .with("command", "heisenberg")
        .with("model", source);
    table.rows.push(vec![
        hl.lambda,
        hl.h_plus,
        hl.h_star,
        hl.kappa,
        hl.bound_prime,
        hl.bound,
    ]);
    Ok(table)
}

/// Runs every validation suite; failures are returned as [`CliError::Validation`].
pub fn validate(seed: u64) -> CliResult<Vec<SuiteResult>> {
    let results = run_all(seed);
    let failed: Vec<SuiteResult> = results.iter().filter(|r| !r.passed).cloned().collect();
    if failed.is_empty() {
        Ok(results)
    } else {
        Err(CliError::Validation(results))
    }
}

/// Model and prior of a parsed file; a bad parameter is a configuration error.
fn model_parts(file: &ModelFile) -> CliResult<(PhaseModel<f64>, Prior<f64>)> {
    let config = |e: BoundsError| CliError::Config(format!("model file: {e}"));
    Ok((file.phase_model().map_err(config)?, file.prior().map_err(config)?))
}

pub fn load_model(path: &Path) -> CliResult<ModelFile> {
    ModelFile::load(path).map_err(|e| CliError::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_formatting_has_17_digits() {
        assert_eq!(format_value(0.1), "1.0000000000000001e-1");
        assert_eq!(format_value(-2.5), "-2.5000000000000000e0");
        let parsed: f64 = format_value(std::f64::consts::PI).parse().unwrap();
        assert_eq!(parsed, std::f64::consts::PI);
    }

    #[test]
    fn grids() {
        let e = default_energy_grid(0.1);
        assert_eq!(e.len(), 60);
        assert!((e[0] - 1.0).abs() < 1e-12 && (e[59] - 1000.0).abs() < 1e-9);
        assert_eq!(default_nu_grid().len(), 17);
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn sweep_parsing() {
        let s: Sweep = "h=0.1:0.5:5".parse().unwrap();
        assert_eq!(s.var, SweepVar::H);
        assert_eq!(s.values.len(), 5);
        let s: Sweep = "E=1:100:3:log".parse().unwrap();
        assert!((s.values[1] - 10.0).abs() < 1e-12);
        let s: Sweep = "nu=1,2,5".parse().unwrap();
        assert_eq!(s.values, vec![1.0, 2.0, 5.0]);
        assert!("nu=1.5,2".parse::<Sweep>().is_err());
        assert!("x=1,2".parse::<Sweep>().is_err());
        assert!("h=3,2".parse::<Sweep>().is_err());
        assert!("h=1:2".parse::<Sweep>().is_err());
    }

    #[test]
    fn render_layout() {
        let mut t = CsvTable::new(&["a", "b"]).with("k", "v");
        t.rows.push(vec![1.0, 2.0]);
        assert_eq!(t.render(), "# k=v\na,b\n1.0000000000000000e0,2.0000000000000000e0\n");
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::from(BoundsError::Unsupported("x".into())).exit_code(), 3);
        assert_eq!(CliError::from(BoundsError::ModelFile("x".into())).exit_code(), 4);
        assert_eq!(CliError::Validation(vec![]).exit_code(), 2);
    }
}
