//! Experiment configuration and the four canned experiments behind the
//! command-line front end: Riemann data, wave profiles, composite-wave
//! stability with shifts, and the relaxation limit `τ → 0`.
//!
//! Configuration is a flat `key = value` file (`#` starts a comment) with
//! optional `key=value` overrides. Every experiment writes into an output
//! directory holding `config.echo`, `report.txt` and its CSV files. Floats
//! are written with 17 significant digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::composite::CompositeWave;
use crate::constitutive::GasModel;
use crate::error::{Error, Result};
use crate::profile::{DecayReport, ProfileOptions, WaveProfile};
use crate::riemann::{check_tau_admissible, solve_midstate, EndState, DEFAULT_TAU_SAMPLES};
use crate::shiftdiag::{write_diagnostics_csv, DiagnosticsRow, ShiftTracker};
use crate::solver::{
    init_from_composite, FieldState, Grid1D, PerturbTarget, Perturbation, Solver, SolverConfig,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lambdas {
    Auto,
    Fixed(f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub gamma: f64,
    pub mu: f64,
    pub tau: f64,
    pub v_minus: f64,
    pub u_minus: f64,
    pub v_plus: f64,
    pub u_plus: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub perturbation: Perturbation,
    pub t_end: f64,
    pub cfl: f64,
    pub diag_interval: f64,
    pub lambdas: Lambdas,
    /// Relaxation times of the `relaxation-limit` sweep.
    pub taus: Vec<f64>,
    /// Write a snapshot every this many diagnostics samples; 0 disables them.
    pub snapshot_every: usize,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    /// The reference stability experiment.
    fn default() -> Self {
        Self {
            gamma: 1.4,
            mu: 1.0,
            tau: 0.01,
            v_minus: 1.1,
            u_minus: 0.2,
            v_plus: 1.1,
            u_plus: -0.2,
            x_min: -400.0,
            x_max: 400.0,
            n: 8000,
            perturbation: Perturbation::Gaussian {
                amplitude: 0.01,
                center: 0.0,
                width: 5.0,
                target: PerturbTarget::V,
            },
            t_end: 200.0,
            cfl: 0.45,
            diag_interval: 0.5,
            lambdas: Lambdas::Auto,
            taus: vec![1e-2, 1e-3, 1e-4],
            snapshot_every: 40,
            out: None,
        }
    }
}

const KEYS: &[&str] = &[
    "gamma",
    "mu",
    "tau",
    "v_minus",
    "u_minus",
    "v_plus",
    "u_plus",
    "x_min",
    "x_max",
    "n",
    "perturbation",
    "amplitude",
    "center",
    "width",
    "perturb_target",
    "t_end",
    "cfl",
    "diag_interval",
    "lambda1",
    "lambda2",
    "taus",
    "snapshot_every",
    "out",
];

fn parse_f64(key: &str, s: &str) -> Result<f64> {
    let x: f64 = s
        .parse()
        .map_err(|_| Error::Config(format!("{key}: expected a number, got {s:?}")))?;
    if !x.is_finite() {
        return Err(Error::Config(format!(
            "{key}: value must be finite, got {s:?}"
        )));
    }
    Ok(x)
}

/// Splits `key=value`, trimming whitespace around both halves.
pub fn split_assignment(s: &str) -> Result<(String, String)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("expected key=value, got {s:?}")))?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() {
        return Err(Error::Config(format!("missing key in {s:?}")));
    }
    Ok((k.to_string(), v.to_string()))
}

impl ExperimentConfig {
    /// Parses the flat text format; unknown and repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = split_assignment(line)
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
            if !seen.insert(k.clone()) {
                return Err(Error::Config(format!(
                    "line {}: key {k} given twice",
                    lineno + 1
                )));
            }
            pairs.push((k, v));
        }
        Self::default().with_pairs(&pairs)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Applies `key=value` overrides in order, then validates.
    pub fn with_overrides<S: AsRef<str>>(self, sets: &[S]) -> Result<Self> {
        let pairs = sets
            .iter()
            .map(|s| split_assignment(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        self.with_pairs(&pairs)
    }

    fn with_pairs(mut self, pairs: &[(String, String)]) -> Result<Self> {
        let mut map: BTreeMap<&str, &str> = BTreeMap::new();
        for (k, v) in pairs {
            if !KEYS.contains(&k.as_str()) {
                return Err(Error::Config(format!("unknown key {k:?}")));
            }
            map.insert(k, v);
        }
        for (k, v) in &map {
            let v = *v;
            match *k {
                "gamma" => self.gamma = parse_f64(k, v)?,
                "mu" => self.mu = parse_f64(k, v)?,
                "tau" => self.tau = parse_f64(k, v)?,
                "v_minus" => self.v_minus = parse_f64(k, v)?,
                "u_minus" => self.u_minus = parse_f64(k, v)?,
                "v_plus" => self.v_plus = parse_f64(k, v)?,
                "u_plus" => self.u_plus = parse_f64(k, v)?,
                "x_min" => self.x_min = parse_f64(k, v)?,
                "x_max" => self.x_max = parse_f64(k, v)?,
                "n" => {
                    self.n = v.parse().map_err(|_| {
                        Error::Config(format!("n: expected a cell count, got {v:?}"))
                    })?
                }
                "t_end" => self.t_end = parse_f64(k, v)?,
                "cfl" => self.cfl = parse_f64(k, v)?,
                "diag_interval" => self.diag_interval = parse_f64(k, v)?,
                "snapshot_every" => {
                    self.snapshot_every = v.parse().map_err(|_| {
                        Error::Config(format!("snapshot_every: expected a count, got {v:?}"))
                    })?
                }
                "out" => self.out = Some(PathBuf::from(v)),
                "taus" => {
                    self.taus = v
                        .split(',')
                        .map(|s| parse_f64(k, s.trim()))
                        .collect::<Result<Vec<_>>>()?;
                }
                _ => {}
            }
        }
        self.apply_perturbation(&map)?;
        self.apply_lambdas(&map)?;
        self.validate()?;
        Ok(self)
    }

    fn apply_perturbation(&mut self, map: &BTreeMap<&str, &str>) -> Result<()> {
        let (mut amplitude, mut center, mut width, mut target) = match self.perturbation {
            Perturbation::Gaussian {
                amplitude,
                center,
                width,
                target,
            } => (amplitude, center, width, target),
            Perturbation::None => (0.01, 0.0, 5.0, PerturbTarget::V),
        };
        let mut gauss = matches!(self.perturbation, Perturbation::Gaussian { .. });
        if let Some(kind) = map.get("perturbation") {
            gauss = match *kind {
                "none" => false,
                "gauss" => true,
                other => {
                    return Err(Error::Config(format!(
                        "perturbation: expected none or gauss, got {other:?}"
                    )))
                }
            };
        }
        if let Some(v) = map.get("amplitude") {
            amplitude = parse_f64("amplitude", v)?;
        }
        if let Some(v) = map.get("center") {
            center = parse_f64("center", v)?;
        }
        if let Some(v) = map.get("width") {
            width = parse_f64("width", v)?;
        }
        if let Some(v) = map.get("perturb_target") {
            target = match *v {
                "v" => PerturbTarget::V,
                "u" => PerturbTarget::U,
                "both" => PerturbTarget::Both,
                other => {
                    return Err(Error::Config(format!(
                        "perturb_target: expected v, u or both, got {other:?}"
                    )))
                }
            };
        }
        self.perturbation = if gauss {
            Perturbation::Gaussian {
                amplitude,
                center,
                width,
                target,
            }
        } else {
            Perturbation::None
        };
        Ok(())
    }

    fn apply_lambdas(&mut self, map: &BTreeMap<&str, &str>) -> Result<()> {
        let get = |k: &str| map.get(k).copied();
        let current = match self.lambdas {
            Lambdas::Fixed(a, b) => (Some(a), Some(b)),
            Lambdas::Auto => (None, None),
        };
        let pick = |k: &str, cur: Option<f64>| -> Result<Option<f64>> {
            match get(k) {
                None => Ok(cur),
                Some("auto") => Ok(None),
                Some(v) => parse_f64(k, v).map(Some),
            }
        };
        self.lambdas = match (pick("lambda1", current.0)?, pick("lambda2", current.1)?) {
            (None, None) => Lambdas::Auto,
            (Some(a), Some(b)) => Lambdas::Fixed(a, b),
            _ => {
                return Err(Error::Config(
                    "lambda1 and lambda2 must both be numbers or both be auto".into(),
                ))
            }
        };
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.gamma > 1.0) {
            return bad(format!("gamma must exceed 1, got {}", self.gamma));
        }
        if !(self.mu > 0.0) {
            return bad(format!("mu must be positive, got {}", self.mu));
        }
        if !(self.tau >= 0.0) {
            return bad(format!("tau must be nonnegative, got {}", self.tau));
        }
        if !(self.v_minus > 0.0 && self.v_plus > 0.0) {
            return bad("end-state volumes must be positive".into());
        }
        if !(self.x_max > self.x_min) || self.n < 16 {
            return bad(format!(
                "grid [{}, {}] with {} cells is invalid",
                self.x_min, self.x_max, self.n
            ));
        }
        if !(self.t_end > 0.0) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad(format!("cfl must lie in (0, 1], got {}", self.cfl));
        }
        if !(self.diag_interval > 0.0) {
            return bad(format!(
                "diag_interval must be positive, got {}",
                self.diag_interval
            ));
        }
        if self.taus.is_empty() || self.taus.iter().any(|t| !(*t > 0.0)) {
            return bad("taus must be a nonempty list of positive numbers".into());
        }
        if let Perturbation::Gaussian { width, .. } = self.perturbation {
            if !(width > 0.0) {
                return bad(format!("width must be positive, got {width}"));
            }
        }
        Ok(())
    }

    pub fn gas(&self) -> Result<GasModel> {
        GasModel::new(self.gamma, self.mu, self.tau)
    }

    pub fn left(&self) -> Result<EndState> {
        EndState::new(self.v_minus, self.u_minus)
    }

    pub fn right(&self) -> Result<EndState> {
        EndState::new(self.v_plus, self.u_plus)
    }

    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::new(self.x_min, self.x_max, self.n)
    }

    fn lambda_option(&self) -> Option<(f64, f64)> {
        match self.lambdas {
            Lambdas::Auto => None,
            Lambdas::Fixed(a, b) => Some((a, b)),
        }
    }

    pub fn composite(&self, g: &GasModel) -> Result<CompositeWave> {
        CompositeWave::build(
            g,
            self.left()?,
            self.right()?,
            ProfileOptions::default(),
            self.lambda_option(),
        )
    }

    /// Normalized `key = value` listing that parses back to `self`.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("gamma", fmt(self.gamma));
        kv("mu", fmt(self.mu));
        kv("tau", fmt(self.tau));
        kv("v_minus", fmt(self.v_minus));
        kv("u_minus", fmt(self.u_minus));
        kv("v_plus", fmt(self.v_plus));
        kv("u_plus", fmt(self.u_plus));
        kv("x_min", fmt(self.x_min));
        kv("x_max", fmt(self.x_max));
        kv("n", self.n.to_string());
        match self.perturbation {
            Perturbation::None => kv("perturbation", "none".into()),
            Perturbation::Gaussian {
                amplitude,
                center,
                width,
                target,
            } => {
                kv("perturbation", "gauss".into());
                kv("amplitude", fmt(amplitude));
                kv("center", fmt(center));
                kv("width", fmt(width));
                let t = match target {
                    PerturbTarget::V => "v",
                    PerturbTarget::U => "u",
                    PerturbTarget::Both => "both",
                };
                kv("perturb_target", t.into());
            }
        }
        kv("t_end", fmt(self.t_end));
        kv("cfl", fmt(self.cfl));
        kv("diag_interval", fmt(self.diag_interval));
        match self.lambdas {
            Lambdas::Auto => {
                kv("lambda1", "auto".into());
                kv("lambda2", "auto".into());
            }
            Lambdas::Fixed(a, b) => {
                kv("lambda1", fmt(a));
                kv("lambda2", fmt(b));
            }
        }
        kv(
            "taus",
            self.taus
                .iter()
                .map(|t| fmt(*t))
                .collect::<Vec<_>>()
                .join(","),
        );
        kv("snapshot_every", self.snapshot_every.to_string());
        if let Some(out) = &self.out {
            kv("out", out.display().to_string());
        }
        s
    }
}

/// 17 significant digits.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv(values: &[f64]) -> String {
    values.iter().map(|v| fmt(*v)).collect::<Vec<_>>().join(",")
}

fn prepare_out(out: &Path, cfg: &ExperimentConfig) -> Result<()> {
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("config.echo"), cfg.echo())?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannRow {
    pub v_m: f64,
    pub u_m: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub tau_max: f64,
}

impl RiemannRow {
    pub const HEADER: &'static str = "v_m,u_m,sigma1,sigma2,delta1,delta2,tau_max";

    pub fn csv_line(&self) -> String {
        csv(&[
            self.v_m,
            self.u_m,
            self.sigma1,
            self.sigma2,
            self.delta1,
            self.delta2,
            self.tau_max,
        ])
    }

    pub fn parse_csv_line(line: &str) -> Result<Self> {
        let vals = line
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad number {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != 7 {
            return Err(Error::Config(format!(
                "expected 7 columns, got {}",
                vals.len()
            )));
        }
        Ok(Self {
            v_m: vals[0],
            u_m: vals[1],
            sigma1: vals[2],
            sigma2: vals[3],
            delta1: vals[4],
            delta2: vals[5],
            tau_max: vals[6],
        })
    }
}

/// Middle state, shock speeds and strengths, and the largest admissible `τ`.
/// Writes `riemann.csv` when `out` is given.
pub fn cmd_riemann(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<RiemannRow> {
    let g = cfg.gas()?;
    let m = solve_midstate(&g, cfg.left()?, cfg.right()?)?;
    let check = check_tau_admissible(&g, &m.shock1, &m.shock2, DEFAULT_TAU_SAMPLES);
    let row = RiemannRow {
        v_m: m.v_m,
        u_m: m.u_m,
        sigma1: m.shock1.sigma,
        sigma2: m.shock2.sigma,
        delta1: m.shock1.delta,
        delta2: m.shock2.delta,
        tau_max: check.tau_max,
    };
    if let Some(out) = out {
        prepare_out(out, cfg)?;
        std::fs::write(
            out.join("riemann.csv"),
            format!("{}\n{}\n", RiemannRow::HEADER, row.csv_line()),
        )?;
        let report = format!(
            "middle state v_m = {} u_m = {}\nshock speeds {} {}\nstrengths {} {}\ntau_max = {} (tau = {} {})\n",
            fmt(row.v_m),
            fmt(row.u_m),
            fmt(row.sigma1),
            fmt(row.sigma2),
            fmt(row.delta1),
            fmt(row.delta2),
            fmt(row.tau_max),
            fmt(cfg.tau),
            if check.admissible || g.is_classical() { "admissible" } else { "NOT admissible" },
        );
        std::fs::write(out.join("report.txt"), report)?;
    }
    Ok(row)
}

#[derive(Debug, Clone)]
pub struct ProfileOutcome {
    pub profiles: [WaveProfile; 2],
    pub decay: [DecayReport; 2],
}

pub const PROFILE_HEADER: &str = "xi,v,u,Pi,dv_dxi";

pub fn write_profile_csv(path: &Path, p: &WaveProfile) -> Result<()> {
    let mut s = String::with_capacity(p.len() * 120);
    s.push_str(PROFILE_HEADER);
    s.push('\n');
    let xi = p.xi();
    for (k, &x) in xi.iter().enumerate() {
        s.push_str(&csv(&[x, p.v()[k], p.u()[k], p.pi()[k], p.dv()[k]]));
        s.push('\n');
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// Both traveling-wave profiles with their tail decay rates. Writes
/// `profile_1.csv` and `profile_2.csv` when `out` is given.
pub fn cmd_profile(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<ProfileOutcome> {
    let g = cfg.gas()?;
    let m = solve_midstate(&g, cfg.left()?, cfg.right()?)?;
    let p1 = WaveProfile::solve(&g, &m.shock1)?;
    let p2 = WaveProfile::solve(&g, &m.shock2)?;
    let decay = [p1.check_decay(), p2.check_decay()];
    if let Some(out) = out {
        prepare_out(out, cfg)?;
        write_profile_csv(&out.join("profile_1.csv"), &p1)?;
        write_profile_csv(&out.join("profile_2.csv"), &p2)?;
        let mut r = String::new();
        for (i, (p, d)) in [&p1, &p2].iter().zip(&decay).enumerate() {
            let _ = writeln!(
                r,
                "shock {}: sigma {} delta {} samples {} dxi {}\n  decay rates v: left {} right {}\n  decay rates Pi: left {} right {}\n  positive {} inconclusive {}",
                i + 1,
                fmt(p.link().sigma),
                fmt(p.link().delta),
                p.len(),
                fmt(p.dxi()),
                fmt(d.rate_left),
                fmt(d.rate_right),
                fmt(d.pi_rate_left),
                fmt(d.pi_rate_right),
                d.rates_positive(),
                d.inconclusive,
            );
        }
        std::fs::write(out.join("report.txt"), r)?;
    }
    Ok(ProfileOutcome {
        profiles: [p1, p2],
        decay,
    })
}

#[derive(Debug, Clone)]
pub struct StabilityOutcome {
    pub rows: Vec<DiagnosticsRow>,
    pub state: FieldState,
    pub steps: u64,
    pub wave: CompositeWave,
}

impl StabilityOutcome {
    /// Row whose time is closest to `t`.
    pub fn row_at(&self, t: f64) -> &DiagnosticsRow {
        self.rows
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
            .expect("diagnostics always hold the initial row")
    }

    pub fn max_shift_bound_ratio(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.shift_bound_ratio())
            .fold(0.0, f64::max)
    }

    pub fn always_separated(&self) -> bool {
        self.rows.iter().all(|r| r.separated)
    }

    /// Trapezoid rule for `∫ (G + Gˢ) dt` over the diagnostics samples.
    pub fn dissipation_integral(&self) -> f64 {
        self.trapezoid(|r| r.g + r.gs)
    }

    /// Trapezoid rule for the time integral of the source work.
    pub fn source_integral(&self) -> f64 {
        self.trapezoid(|r| r.source_work)
    }

    fn trapezoid(&self, f: impl Fn(&DiagnosticsRow) -> f64) -> f64 {
        self.rows
            .windows(2)
            .map(|w| 0.5 * (w[1].t - w[0].t) * (f(&w[0]) + f(&w[1])))
            .sum()
    }
}

/// Tolerance on boundary-cell volumes relative to the larger shock strength.
pub const BOUNDARY_TOLERANCE: f64 = 1e-6;

/// Composite wave plus perturbation, evolved with shifts and diagnostics.
/// Writes `diagnostics.csv`, `snapshots/` and `report.txt` when `out` is given.
pub fn cmd_stability(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<StabilityOutcome> {
    let g = cfg.gas()?;
    let grid = cfg.grid()?;
    let wave = cfg.composite(&g)?;
    if !g.is_classical() {
        let check = check_tau_admissible(
            &g,
            wave.profile1().link(),
            wave.profile2().link(),
            DEFAULT_TAU_SAMPLES,
        );
        if !check.admissible {
            return Err(Error::Admissibility(format!(
                "tau = {} exceeds tau_max = {}",
                cfg.tau, check.tau_max
            )));
        }
    }
    let mut state = init_from_composite(&wave, &grid, cfg.perturbation)?;
    let (l, r) = (wave.far_left(), wave.far_right());
    let (d1, d2) = wave.deltas();
    let mut scfg = SolverConfig::new(l, r);
    scfg.cfl = cfg.cfl;
    scfg.boundary_tolerance = Some(BOUNDARY_TOLERANCE * d1.max(d2));
    let mut solver = Solver::new(g, grid, scfg)?;
    let mut tracker = ShiftTracker::new(wave.clone(), grid, cfg.diag_interval)?;
    if let (Some(out), true) = (out, cfg.snapshot_every > 0) {
        let dir = out.join("snapshots");
        std::fs::create_dir_all(&dir)?;
        tracker = tracker.with_snapshots(dir, cfg.snapshot_every);
    }
    if let Some(out) = out {
        prepare_out(out, cfg)?;
    }
    solver.run(&mut state, cfg.t_end, &mut [&mut tracker])?;
    let outcome = StabilityOutcome {
        rows: tracker.rows().to_vec(),
        state,
        steps: solver.steps(),
        wave,
    };
    if let Some(out) = out {
        write_diagnostics_csv(&out.join("diagnostics.csv"), &outcome.rows)?;
        std::fs::write(out.join("report.txt"), stability_report(&outcome, &solver))?;
    }
    Ok(outcome)
}

fn stability_report(o: &StabilityOutcome, solver: &Solver) -> String {
    let first = &o.rows[0];
    let last = o.rows.last().unwrap_or(first);
    let b = solver.boundary_flux();
    let dx = solver.grid().dx();
    let mut s = String::new();
    let _ = writeln!(s, "steps {} final time {}", o.steps, fmt(last.t));
    let _ = writeln!(s, "shifts X1 {} X2 {}", fmt(last.x1), fmt(last.x2));
    let _ = writeln!(
        s,
        "shift rates X1dot {} X2dot {}",
        fmt(last.x1dot),
        fmt(last.x2dot)
    );
    let _ = writeln!(
        s,
        "E_weighted initial {} final {}",
        fmt(first.e_weighted),
        fmt(last.e_weighted)
    );
    let _ = writeln!(
        s,
        "err_sup initial {} final {}",
        fmt(first.err_sup()),
        fmt(last.err_sup())
    );
    let _ = writeln!(
        s,
        "err_L2 initial {} final {}",
        fmt(first.err_l2),
        fmt(last.err_l2)
    );
    let _ = writeln!(s, "int (G + Gs) dt {}", fmt(o.dissipation_integral()));
    let _ = writeln!(s, "int source work dt {}", fmt(o.source_integral()));
    let _ = writeln!(
        s,
        "max shift bound ratio {}",
        fmt(o.max_shift_bound_ratio())
    );
    let _ = writeln!(s, "separated at every sample {}", o.always_separated());
    let _ = writeln!(
        s,
        "mass drift after boundary flux {}",
        fmt(o.state.total_v(dx) - first.total_v - b.v)
    );
    let _ = writeln!(
        s,
        "momentum drift after boundary flux {}",
        fmt(o.state.total_u(dx) - first.total_u - b.u)
    );
    s
}

/// `‖Π - μ u_x / v‖_{L²}` with centered differences and far-field ghosts.
pub fn stress_residual_l2(
    g: &GasModel,
    grid: &Grid1D,
    state: &FieldState,
    left: EndState,
    right: EndState,
) -> f64 {
    let n = state.len();
    let dx = grid.dx();
    let u_at = |j: isize| {
        if j < 0 {
            left.u
        } else if j as usize >= n {
            right.u
        } else {
            state.u[j as usize]
        }
    };
    let mut sum = 0.0;
    for j in 0..n {
        let ji = j as isize;
        let ux = (u_at(ji + 1) - u_at(ji - 1)) / (2.0 * dx);
        sum += (state.pi[j] - g.mu() * ux / state.v[j]).powi(2);
    }
    (sum * dx).sqrt()
}

/// `‖(v, u) - (v⁰, u⁰)‖_{L²}`.
pub fn distance_l2(grid: &Grid1D, a: &FieldState, b: &FieldState) -> f64 {
    let sum: f64 = (0..a.len())
        .map(|j| (a.v[j] - b.v[j]).powi(2) + (a.u[j] - b.u[j]).powi(2))
        .sum();
    (sum * grid.dx()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationRow {
    pub tau: f64,
    /// `L²` distance of `(v, u)` to the classical solution at `t_end`.
    pub distance: f64,
    /// `‖Π - μ u_x / v‖_{L²}` at `t_end`.
    pub stress_residual: f64,
    pub steps: u64,
}

impl RelaxationRow {
    pub const HEADER: &'static str = "tau,dist_L2_vu,stress_residual_L2,steps";
}

/// Evolves the same perturbed composite data from `t = 0` to `t_end`.
/// Each relaxed run starts from its own composite wave; the classical run
/// starts from the `τ = 0` composite.
fn evolve(cfg: &ExperimentConfig, g: GasModel) -> Result<(FieldState, u64)> {
    let grid = cfg.grid()?;
    let wave = cfg.composite(&g)?;
    let mut state = init_from_composite(&wave, &grid, cfg.perturbation)?;
    let mut scfg = SolverConfig::new(wave.far_left(), wave.far_right());
    scfg.cfl = cfg.cfl;
    let (d1, d2) = wave.deltas();
    scfg.boundary_tolerance = Some(BOUNDARY_TOLERANCE * d1.max(d2));
    let mut solver = Solver::new(g, grid, scfg)?;
    solver.run(&mut state, cfg.t_end, &mut [])?;
    Ok((state, solver.steps()))
}

/// Classical run plus one relaxed run per `τ` in `cfg.taus`, on parallel
/// threads. Rows come back in the order of `cfg.taus`.
pub fn cmd_relaxation_limit(
    cfg: &ExperimentConfig,
    out: Option<&Path>,
) -> Result<Vec<RelaxationRow>> {
    let g0 = cfg.gas()?.with_tau(0.0)?;
    let grid = cfg.grid()?;
    let (left, right) = (cfg.left()?, cfg.right()?);
    let (classical, relaxed) = std::thread::scope(|scope| {
        let handles: Vec<_> = cfg
            .taus
            .iter()
            .map(|&tau| scope.spawn(move || evolve(cfg, g0.with_tau(tau)?)))
            .collect();
        let classical = evolve(cfg, g0);
        let relaxed: Vec<Result<(FieldState, u64)>> = handles
            .into_iter()
            .map(|h| h.join().expect("relaxation worker panicked"))
            .collect();
        (classical, relaxed)
    });
    let (classical, _) = classical?;
    let mut rows = Vec::with_capacity(cfg.taus.len());
    for (&tau, run) in cfg.taus.iter().zip(relaxed) {
        let (state, steps) = run?;
        let g = g0.with_tau(tau)?;
        rows.push(RelaxationRow {
            tau,
            distance: distance_l2(&grid, &state, &classical),
            stress_residual: stress_residual_l2(&g, &grid, &state, left, right),
            steps,
        });
    }
    if let Some(out) = out {
        prepare_out(out, cfg)?;
        let mut s = String::from(RelaxationRow::HEADER);
        s.push('\n');
        for r in &rows {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                fmt(r.tau),
                fmt(r.distance),
                fmt(r.stress_residual),
                r.steps
            );
        }
        std::fs::write(out.join("relaxation_limit.csv"), s)?;
        std::fs::write(out.join("report.txt"), relaxation_report(&rows))?;
    }
    Ok(rows)
}

/// True when both columns strictly decrease as `τ` decreases.
pub fn relaxation_ordered(rows: &[RelaxationRow]) -> bool {
    let mut sorted = rows.to_vec();
    sorted.sort_by(|a, b| b.tau.total_cmp(&a.tau));
    sorted
        .windows(2)
        .all(|w| w[1].distance < w[0].distance && w[1].stress_residual < w[0].stress_residual)
}

fn relaxation_report(rows: &[RelaxationRow]) -> String {
    let mut s = String::new();
    for r in rows {
        let _ = writeln!(
            s,
            "tau {} distance {} stress residual {}",
            fmt(r.tau),
            fmt(r.distance),
            fmt(r.stress_residual)
        );
    }
    let _ = writeln!(
        s,
        "strictly decreasing in tau: {}",
        relaxation_ordered(rows)
    );
    s
}
