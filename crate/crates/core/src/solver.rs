//! Finite-volume integration of the relaxed system and of its classical
//! `τ = 0` limit on a uniform grid with far-field Dirichlet ghost cells.
//!
//! The relaxed stepper is a Strang splitting. Each half relaxation step
//! solves `τ Π_t = μ u_x - v Π` exactly with `v` and the centered difference
//! of `u` frozen, so `Π` relaxes to `μ u_x / v` without a stiffness
//! restriction. The transport step advances `v_t - u_x = 0`,
//! `u_t + (p(v) - Π)_x = 0` by SSP-RK2 with a local Lax-Friedrichs flux and
//! minmod-limited MUSCL reconstruction of `(v, u)`, holding `Π` fixed.
//!
//! The classical stepper advances `v_t - u_x = 0`,
//! `u_t + p(v)_x = (μ u_x / v)_x` by SSP-RK2 with the same convective flux
//! and a compact viscous flux `μ (u_{j+1} - u_j) / (dx v_{j+1/2})`.

use crate::composite::{CompositeField, CompositeWave};
use crate::constitutive::GasModel;
use crate::error::{Error, Result};
use crate::riemann::EndState;

const GHOSTS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if n < 16 {
            return Err(Error::Domain(format!(
                "grid needs at least 16 cells, got {n}"
            )));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::Domain(format!("invalid domain [{x_min}, {x_max}]")));
        }
        Ok(Self { x_min, x_max, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n as f64
    }

    /// Center of cell `j`.
    pub fn x(&self, j: usize) -> f64 {
        self.x_min + (j as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }
}

/// Cell-centered solution at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub pi: Vec<f64>,
}

impl FieldState {
    pub fn constant(grid: &Grid1D, v: f64, u: f64) -> Self {
        let n = grid.n();
        Self {
            t: 0.0,
            v: vec![v; n],
            u: vec![u; n],
            pi: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// `Σ v_j dx`.
    pub fn total_v(&self, dx: f64) -> f64 {
        self.v.iter().sum::<f64>() * dx
    }

    /// `Σ u_j dx`.
    pub fn total_u(&self, dx: f64) -> f64 {
        self.u.iter().sum::<f64>() * dx
    }

    fn validate(&self, step: u64) -> Result<()> {
        for (j, ((&v, &u), &pi)) in self.v.iter().zip(&self.u).zip(&self.pi).enumerate() {
            if !(v.is_finite() && u.is_finite() && pi.is_finite()) {
                return Err(Error::SolverBlowup {
                    step,
                    reason: format!("non-finite value in cell {j}"),
                });
            }
            if v <= 0.0 {
                return Err(Error::SolverBlowup {
                    step,
                    reason: format!("vacuum (v = {v}) in cell {j}"),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reconstruction {
    FirstOrder,
    Minmod,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub cfl: f64,
    pub reconstruction: Reconstruction,
    pub far_left: EndState,
    pub far_right: EndState,
    /// Parabolic safety factor of the classical stepper.
    pub diffusion_cfl: f64,
    /// Abort when a boundary cell drifts this far from its far-field volume.
    pub boundary_tolerance: Option<f64>,
}

impl SolverConfig {
    pub fn new(far_left: EndState, far_right: EndState) -> Self {
        Self {
            cfl: 0.45,
            reconstruction: Reconstruction::Minmod,
            far_left,
            far_right,
            diffusion_cfl: 0.4,
            boundary_tolerance: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Domain(format!(
                "cfl must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        if !(self.diffusion_cfl > 0.0 && self.diffusion_cfl <= 1.0) {
            return Err(Error::Domain(format!(
                "diffusion_cfl must lie in (0, 1], got {}",
                self.diffusion_cfl
            )));
        }
        Ok(())
    }
}

/// Largest characteristic speed `sqrt(μ/τ - p'(v))` of the relaxed system.
pub fn max_signal_speed(g: &GasModel, state: &FieldState) -> Result<f64> {
    if g.is_classical() {
        return Err(Error::Domain(
            "the relaxed signal speed needs tau > 0".into(),
        ));
    }
    let stiff = g.mu() / g.tau();
    let mut vmin = f64::INFINITY;
    for &v in &state.v {
        if !(v > 0.0) {
            return Err(Error::Vacuum(format!("v = {v}")));
        }
        vmin = vmin.min(v);
    }
    // -p' decreases with v, so the fastest cell is the most compressed one.
    Ok((stiff - g.dp(vmin)).sqrt())
}

/// Net inflow of `∫v` and `∫u` through the two boundary faces since the
/// solver was created.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BoundaryFlux {
    pub v: f64,
    pub u: f64,
}

/// Hooks called by [`Solver::run`].
pub trait Observer {
    /// Sampling period; `None` disables [`Observer::sample`].
    fn interval(&self) -> Option<f64> {
        None
    }

    /// Called with the state at the start of every step of size `dt`.
    fn before_step(&mut self, _state: &FieldState, _dt: f64) -> Result<()> {
        Ok(())
    }

    /// Called at `t0 + k * interval` for `k = 0, 1, ...`, with the step sizes
    /// adjusted to land on those times.
    fn sample(&mut self, _state: &FieldState) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Default, Clone)]
struct Scratch {
    ve: Vec<f64>,
    ue: Vec<f64>,
    pie: Vec<f64>,
    flux_v: Vec<f64>,
    flux_u: Vec<f64>,
    v0: Vec<f64>,
    u0: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Solver {
    gas: GasModel,
    grid: Grid1D,
    config: SolverConfig,
    steps: u64,
    boundary: BoundaryFlux,
    scratch: Scratch,
}

#[inline]
fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

impl Solver {
    pub fn new(gas: GasModel, grid: Grid1D, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let m = grid.n() + 2 * GHOSTS;
        let scratch = Scratch {
            ve: vec![0.0; m],
            ue: vec![0.0; m],
            pie: vec![0.0; m],
            flux_v: vec![0.0; grid.n() + 1],
            flux_u: vec![0.0; grid.n() + 1],
            v0: vec![0.0; grid.n()],
            u0: vec![0.0; grid.n()],
        };
        Ok(Self {
            gas,
            grid,
            config,
            steps: 0,
            boundary: BoundaryFlux::default(),
            scratch,
        })
    }

    pub fn gas(&self) -> &GasModel {
        &self.gas
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn boundary_flux(&self) -> BoundaryFlux {
        self.boundary
    }

    /// Exact far-field inflow rates `(u+ - u-, p(v+) - p(v-))`: what the
    /// boundary faces carry once the tails have reached the far-field states.
    pub fn far_field_inflow_rate(&self) -> BoundaryFlux {
        let (l, r) = (self.config.far_left, self.config.far_right);
        BoundaryFlux {
            v: r.u - l.u,
            u: self.gas.p(l.v) - self.gas.p(r.v),
        }
    }

    /// CFL-limited step for the current model.
    pub fn stable_dt(&self, state: &FieldState) -> Result<f64> {
        let dx = self.grid.dx();
        if self.gas.is_classical() {
            let mut vmin = f64::INFINITY;
            for &v in &state.v {
                if !(v > 0.0) {
                    return Err(Error::Vacuum(format!("v = {v}")));
                }
                vmin = vmin.min(v);
            }
            let c = (-self.gas.dp(vmin)).sqrt();
            let convective = self.config.cfl * dx / c;
            let diffusive = self.config.diffusion_cfl * dx * dx * vmin / (2.0 * self.gas.mu());
            Ok(convective.min(diffusive))
        } else {
            Ok(self.config.cfl * dx / max_signal_speed(&self.gas, state)?)
        }
    }

    /// Advances by `dt` with the stepper matching `τ`.
    pub fn step(&mut self, state: &mut FieldState, dt: f64) -> Result<()> {
        if self.gas.is_classical() {
            self.step_classical(state, dt)
        } else {
            self.step_relaxed(state, dt)
        }
    }

    /// One Strang-split step of the relaxed system.
    pub fn step_relaxed(&mut self, state: &mut FieldState, dt: f64) -> Result<()> {
        if self.gas.is_classical() {
            return Err(Error::Domain("step_relaxed needs tau > 0".into()));
        }
        self.check_len(state)?;
        self.relax(state, 0.5 * dt);
        self.transport_rk2(state, dt, false);
        self.relax(state, 0.5 * dt);
        self.finish_step(state, dt)
    }

    /// One SSP-RK2 step of the classical system. `state.pi` is refreshed to
    /// the Newtonian stress `μ u_x / v` afterwards.
    pub fn step_classical(&mut self, state: &mut FieldState, dt: f64) -> Result<()> {
        self.check_len(state)?;
        self.transport_rk2(state, dt, true);
        let (mu, dx) = (self.gas.mu(), self.grid.dx());
        self.fill_ghosts(state);
        let s = &self.scratch;
        for j in 0..state.len() {
            let e = j + GHOSTS;
            state.pi[j] = mu * (s.ue[e + 1] - s.ue[e - 1]) / (2.0 * dx * state.v[j]);
        }
        self.finish_step(state, dt)
    }

    fn check_len(&self, state: &FieldState) -> Result<()> {
        let n = self.grid.n();
        if state.v.len() != n || state.u.len() != n || state.pi.len() != n {
            return Err(Error::Domain(format!(
                "state length does not match the {n}-cell grid"
            )));
        }
        Ok(())
    }

    fn finish_step(&mut self, state: &mut FieldState, dt: f64) -> Result<()> {
        self.steps += 1;
        state.t += dt;
        state.validate(self.steps)
    }

    fn fill_ghosts(&mut self, state: &FieldState) {
        let n = state.len();
        let (l, r) = (self.config.far_left, self.config.far_right);
        let s = &mut self.scratch;
        s.ve[GHOSTS..GHOSTS + n].copy_from_slice(&state.v);
        s.ue[GHOSTS..GHOSTS + n].copy_from_slice(&state.u);
        s.pie[GHOSTS..GHOSTS + n].copy_from_slice(&state.pi);
        for k in 0..GHOSTS {
            s.ve[k] = l.v;
            s.ue[k] = l.u;
            s.pie[k] = 0.0;
            s.ve[GHOSTS + n + k] = r.v;
            s.ue[GHOSTS + n + k] = r.u;
            s.pie[GHOSTS + n + k] = 0.0;
        }
    }

    /// Exact solution of `τ Π_t = μ D0 u - v Π` over `h` with `v`, `D0 u` frozen.
    fn relax(&mut self, state: &mut FieldState, h: f64) {
        self.fill_ghosts(state);
        let (mu, tau, dx) = (self.gas.mu(), self.gas.tau(), self.grid.dx());
        let ue = &self.scratch.ue;
        for j in 0..state.len() {
            let e = j + GHOSTS;
            let v = state.v[j];
            let target = mu * (ue[e + 1] - ue[e - 1]) / (2.0 * dx * v);
            state.pi[j] = target + (state.pi[j] - target) * (-v * h / tau).exp();
        }
    }

    /// Face fluxes of `(v, u)` for the current ghost-filled arrays.
    fn face_fluxes(&mut self, viscous: bool) {
        let g = self.gas;
        let dx = self.grid.dx();
        let minmod_on = self.config.reconstruction == Reconstruction::Minmod;
        let s = &mut self.scratch;
        let nf = s.flux_v.len();
        let slope = |q: &[f64], e: usize| {
            if minmod_on {
                minmod(q[e] - q[e - 1], q[e + 1] - q[e])
            } else {
                0.0
            }
        };
        for f in 0..nf {
            // Face f separates extended cells eL = f + 1 and eR = f + 2.
            let (el, er) = (f + GHOSTS - 1, f + GHOSTS);
            let vl = s.ve[el] + 0.5 * slope(&s.ve, el);
            let vr = s.ve[er] - 0.5 * slope(&s.ve, er);
            let ul = s.ue[el] + 0.5 * slope(&s.ue, el);
            let ur = s.ue[er] - 0.5 * slope(&s.ue, er);
            let (pl, pr) = (g.p(vl), g.p(vr));
            let alpha = (g.gamma() * pl / vl).max(g.gamma() * pr / vr).sqrt();
            let mut fu = 0.5 * (pl + pr) - 0.5 * alpha * (ur - ul);
            if viscous {
                let v_face = 0.5 * (s.ve[el] + s.ve[er]);
                fu -= g.mu() * (s.ue[er] - s.ue[el]) / (dx * v_face);
            } else {
                // Π carries no flux of its own, so its face value needs no limiter.
                fu -= 0.5 * (s.pie[el] + s.pie[er]);
            }
            s.flux_v[f] = -0.5 * (ul + ur) - 0.5 * alpha * (vr - vl);
            s.flux_u[f] = fu;
        }
    }

    /// Forward-Euler stage `q <- q - dt/dx (F_{j+1/2} - F_{j-1/2})`; returns
    /// the boundary inflow rate of the stage.
    fn euler_stage(&mut self, state: &mut FieldState, dt: f64, viscous: bool) -> BoundaryFlux {
        self.fill_ghosts(state);
        self.face_fluxes(viscous);
        let r = dt / self.grid.dx();
        let s = &self.scratch;
        for j in 0..state.len() {
            state.v[j] -= r * (s.flux_v[j + 1] - s.flux_v[j]);
            state.u[j] -= r * (s.flux_u[j + 1] - s.flux_u[j]);
        }
        let last = s.flux_v.len() - 1;
        BoundaryFlux {
            v: s.flux_v[0] - s.flux_v[last],
            u: s.flux_u[0] - s.flux_u[last],
        }
    }

    fn transport_rk2(&mut self, state: &mut FieldState, dt: f64, viscous: bool) {
        self.scratch.v0.copy_from_slice(&state.v);
        self.scratch.u0.copy_from_slice(&state.u);
        let b1 = self.euler_stage(state, dt, viscous);
        let b2 = self.euler_stage(state, dt, viscous);
        let s = &self.scratch;
        for j in 0..state.len() {
            state.v[j] = 0.5 * s.v0[j] + 0.5 * state.v[j];
            state.u[j] = 0.5 * s.u0[j] + 0.5 * state.u[j];
        }
        self.boundary.v += 0.5 * dt * (b1.v + b2.v);
        self.boundary.u += 0.5 * dt * (b1.u + b2.u);
    }

    fn check_boundary(&self, state: &FieldState) -> Result<()> {
        let Some(tol) = self.config.boundary_tolerance else {
            return Ok(());
        };
        let n = state.len();
        let dl = (state.v[0] - self.config.far_left.v).abs();
        let dr = (state.v[n - 1] - self.config.far_right.v).abs();
        if dl > tol || dr > tol {
            return Err(Error::DomainTooSmall(format!(
                "boundary volumes deviate from the far field by {dl:e} (left) and {dr:e} (right) at t = {}, tolerance {tol:e}",
                state.t
            )));
        }
        Ok(())
    }

    /// Advances to `t_end`, calling the observers' hooks. Step sizes are
    /// shortened uniformly so that every sampling time and `t_end` are hit
    /// exactly.
    pub fn run(
        &mut self,
        state: &mut FieldState,
        t_end: f64,
        observers: &mut [&mut dyn Observer],
    ) -> Result<()> {
        if !(t_end > state.t) {
            return Ok(());
        }
        let t0 = state.t;
        let intervals: Vec<Option<f64>> = observers
            .iter()
            .map(|o| o.interval().filter(|i| *i > 0.0))
            .collect();
        let mut next_k = vec![1_u64; observers.len()];
        for (obs, iv) in observers.iter_mut().zip(&intervals) {
            if iv.is_some() {
                obs.sample(state)?;
            }
        }
        let due = |k: u64, iv: f64| t0 + k as f64 * iv;
        while state.t < t_end {
            let mut event = t_end;
            for (k, iv) in next_k.iter().zip(&intervals) {
                if let Some(iv) = iv {
                    event = event.min(due(*k, *iv));
                }
            }
            let dt_max = self.stable_dt(state)?;
            let remaining = event - state.t;
            let pieces = (remaining / dt_max).ceil().max(1.0);
            let dt = remaining / pieces;
            for obs in observers.iter_mut() {
                obs.before_step(state, dt)?;
            }
            self.step(state, dt)?;
            if pieces == 1.0 {
                state.t = event;
            }
            self.check_boundary(state)?;
            for ((obs, iv), k) in observers.iter_mut().zip(&intervals).zip(next_k.iter_mut()) {
                if let Some(iv) = iv {
                    if due(*k, *iv) <= state.t {
                        obs.sample(state)?;
                        while due(*k, *iv) <= state.t {
                            *k += 1;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbTarget {
    V,
    U,
    Both,
}

/// Initial perturbation added to the composite wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Perturbation {
    None,
    /// `amplitude * exp(-(x - center)² / width²)`.
    Gaussian {
        amplitude: f64,
        center: f64,
        width: f64,
        target: PerturbTarget,
    },
}

impl Perturbation {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Perturbation::None => 0.0,
            Perturbation::Gaussian {
                amplitude,
                center,
                width,
                ..
            } => amplitude * (-((x - center) / width).powi(2)).exp(),
        }
    }

    /// Exact `L²(ℝ)` norm.
    pub fn l2_norm(&self) -> f64 {
        match *self {
            Perturbation::None => 0.0,
            Perturbation::Gaussian {
                amplitude, width, ..
            } => amplitude.abs() * (std::f64::consts::PI / 2.0).powf(0.25) * width.sqrt(),
        }
    }

    fn targets(&self) -> (bool, bool) {
        match *self {
            Perturbation::None => (false, false),
            Perturbation::Gaussian { target, .. } => match target {
                PerturbTarget::V => (true, false),
                PerturbTarget::U => (false, true),
                PerturbTarget::Both => (true, true),
            },
        }
    }
}

/// Far-field tolerance the composite tails must meet at the domain ends.
pub const INIT_TAIL_TOLERANCE: f64 = 1e-8;

/// Composite wave at `t = 0` with zero shifts, plus the perturbation on `v`
/// and/or `u`. The stress starts at the composite `Π̃`.
pub fn init_from_composite(
    w: &CompositeWave,
    grid: &Grid1D,
    perturbation: Perturbation,
) -> Result<FieldState> {
    let xs = grid.centers();
    let mut field = CompositeField::default();
    w.eval_grid(0.0, &xs, 0.0, 0.0, &mut field);
    let n = xs.len();
    let (l, r) = (w.far_left(), w.far_right());
    let tail = (field.v[0] - l.v).abs().max((field.v[n - 1] - r.v).abs());
    if tail > INIT_TAIL_TOLERANCE {
        return Err(Error::DomainTooSmall(format!(
            "composite tails deviate by {tail:e} from the far field at the domain ends"
        )));
    }
    let (on_v, on_u) = perturbation.targets();
    let mut state = FieldState {
        t: 0.0,
        v: field.v,
        u: field.u,
        pi: field.pi,
    };
    for (j, &x) in xs.iter().enumerate() {
        let d = perturbation.value(x);
        if on_v {
            state.v[j] += d;
        }
        if on_u {
            state.u[j] += d;
        }
        if !(state.v[j] > 0.0) {
            return Err(Error::Vacuum(format!(
                "perturbed volume {} at x = {x}",
                state.v[j]
            )));
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::ProfileOptions;

    fn far(v: f64, u: f64) -> EndState {
        EndState::new(v, u).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(0.0, 1.0, 8).is_err());
        assert!(Grid1D::new(1.0, 0.0, 32).is_err());
        let g = Grid1D::new(-1.0, 1.0, 20).unwrap();
        assert!((g.dx() - 0.1).abs() < 1e-15);
        assert!((g.x(0) + 0.95).abs() < 1e-15);
    }

    #[test]
    fn signal_speed() {
        let g = GasModel::new(1.4, 1.0, 1.0).unwrap();
        let grid = Grid1D::new(0.0, 1.0, 16).unwrap();
        let s = FieldState::constant(&grid, 1.0, 0.0);
        assert!((max_signal_speed(&g, &s).unwrap() - 1.549_193_338_482_966_8).abs() < 1e-15);
        let slow = GasModel::new(1.4, 1.0, 1e12).unwrap();
        assert!((max_signal_speed(&slow, &s).unwrap() - 1.4_f64.sqrt()).abs() < 1e-6);
        let mut prev = 0.0;
        for tau in [1.0, 0.1, 0.01, 0.001] {
            let c = max_signal_speed(&g.with_tau(tau).unwrap(), &s).unwrap();
            assert!(c > prev);
            prev = c;
        }
        let mut bad = s.clone();
        bad.v[3] = 0.0;
        assert!(matches!(max_signal_speed(&g, &bad), Err(Error::Vacuum(_))));
        assert!(max_signal_speed(&g.with_tau(0.0).unwrap(), &s).is_err());
    }

    #[test]
    fn constant_state_is_a_fixed_point() {
        for tau in [0.0, 0.01] {
            let g = GasModel::new(1.4, 1.0, tau).unwrap();
            let grid = Grid1D::new(-5.0, 5.0, 64).unwrap();
            let cfg = SolverConfig::new(far(0.9, 0.3), far(0.9, 0.3));
            let mut solver = Solver::new(g, grid, cfg).unwrap();
            let mut s = FieldState::constant(&grid, 0.9, 0.3);
            let init = s.clone();
            for _ in 0..50 {
                let dt = solver.stable_dt(&s).unwrap();
                solver.step(&mut s, dt).unwrap();
            }
            assert_eq!(s.v, init.v);
            assert_eq!(s.u, init.u);
            assert_eq!(s.pi, init.pi);
        }
    }

    #[test]
    fn blowup_reports_step() {
        let g = GasModel::new(1.4, 1.0, 0.01).unwrap();
        let grid = Grid1D::new(0.0, 1.0, 16).unwrap();
        let mut solver =
            Solver::new(g, grid, SolverConfig::new(far(1.0, 0.0), far(1.0, 0.0))).unwrap();
        let mut s = FieldState::constant(&grid, 1.0, 0.0);
        s.u[5] = f64::NAN;
        let err = solver.step_relaxed(&mut s, 1e-3).unwrap_err();
        assert!(matches!(err, Error::SolverBlowup { step: 1, .. }));
    }

    #[test]
    fn boundary_ledger_tracks_mass_exactly() {
        // Smooth non-constant data whose tails sit on the far field.
        let g = GasModel::new(1.4, 1.0, 0.05).unwrap();
        let grid = Grid1D::new(-20.0, 20.0, 400).unwrap();
        let (l, r) = (far(1.0, 0.1), far(1.0, 0.1));
        let mut solver = Solver::new(g, grid, SolverConfig::new(l, r)).unwrap();
        let mut s = FieldState::constant(&grid, 1.0, 0.1);
        for (j, x) in grid.centers().into_iter().enumerate() {
            s.v[j] += 0.05 * (-x * x).exp();
        }
        let (m0, p0) = (s.total_v(grid.dx()), s.total_u(grid.dx()));
        for _ in 0..200 {
            let dt = solver.stable_dt(&s).unwrap();
            solver.step(&mut s, dt).unwrap();
        }
        let b = solver.boundary_flux();
        assert!((s.total_v(grid.dx()) - m0 - b.v).abs() < 1e-12 * m0);
        assert!((s.total_u(grid.dx()) - p0 - b.u).abs() < 1e-12 * m0);
    }

    struct Recorder {
        interval: f64,
        times: Vec<f64>,
        steps: usize,
    }

    impl Observer for Recorder {
        fn interval(&self) -> Option<f64> {
            Some(self.interval)
        }
        fn before_step(&mut self, _: &FieldState, _: f64) -> Result<()> {
            self.steps += 1;
            Ok(())
        }
        fn sample(&mut self, s: &FieldState) -> Result<()> {
            self.times.push(s.t);
            Ok(())
        }
    }

    #[test]
    fn observer_schedule() {
        let g = GasModel::new(1.4, 1.0, 0.01).unwrap();
        let grid = Grid1D::new(0.0, 4.0, 32).unwrap();
        let mut solver =
            Solver::new(g, grid, SolverConfig::new(far(1.0, 0.0), far(1.0, 0.0))).unwrap();
        let mut s = FieldState::constant(&grid, 1.0, 0.0);
        let mut a = Recorder {
            interval: 0.1,
            times: vec![],
            steps: 0,
        };
        let mut b = Recorder {
            interval: 0.2,
            times: vec![],
            steps: 0,
        };
        solver.run(&mut s, 1.0, &mut [&mut a, &mut b]).unwrap();
        assert_eq!(s.t, 1.0);
        assert_eq!(a.times.len(), 11);
        assert_eq!(b.times.len(), 6);
        for (k, tb) in b.times.iter().enumerate() {
            assert_eq!(*tb, a.times[2 * k]);
        }
        assert!(a.times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(a.steps as u64, solver.steps());

        let before = s.clone();
        solver.run(&mut s, 1.0, &mut [&mut a]).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn domain_too_small_aborts() {
        let g = GasModel::new(1.4, 1.0, 0.01).unwrap();
        let grid = Grid1D::new(-2.0, 2.0, 40).unwrap();
        let mut cfg = SolverConfig::new(far(1.0, 0.0), far(1.0, 0.0));
        cfg.boundary_tolerance = Some(1e-8);
        let mut solver = Solver::new(g, grid, cfg).unwrap();
        let mut s = FieldState::constant(&grid, 1.0, 0.0);
        for (j, x) in grid.centers().into_iter().enumerate() {
            s.v[j] += 0.1 * (-x * x).exp();
        }
        let err = solver.run(&mut s, 5.0, &mut []).unwrap_err();
        assert!(matches!(err, Error::DomainTooSmall(_)));
    }

    #[test]
    fn composite_initialization() {
        let g = GasModel::new(1.4, 1.0, 0.01).unwrap();
        let w = CompositeWave::build(
            &g,
            far(1.1, 0.2),
            far(1.1, -0.2),
            ProfileOptions::default(),
            None,
        )
        .unwrap();
        let grid = Grid1D::new(-300.0, 300.0, 3000).unwrap();
        let plain = init_from_composite(&w, &grid, Perturbation::None).unwrap();
        for (j, x) in grid.centers().into_iter().enumerate() {
            assert_eq!(plain.v[j], w.eval(0.0, x, 0.0, 0.0).0);
        }
        let zero = Perturbation::Gaussian {
            amplitude: 0.0,
            center: 0.0,
            width: 5.0,
            target: PerturbTarget::V,
        };
        assert_eq!(init_from_composite(&w, &grid, zero).unwrap(), plain);

        let gauss = Perturbation::Gaussian {
            amplitude: 0.01,
            center: 3.0,
            width: 5.0,
            target: PerturbTarget::V,
        };
        let s = init_from_composite(&w, &grid, gauss).unwrap();
        let l2 =
            s.v.iter()
                .zip(&plain.v)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                * grid.dx();
        assert!((l2.sqrt() - gauss.l2_norm()).abs() < 1e-6);
        assert_eq!(s.u, plain.u);

        let narrow = Grid1D::new(-20.0, 20.0, 400).unwrap();
        assert!(matches!(
            init_from_composite(&w, &narrow, Perturbation::None),
            Err(Error::DomainTooSmall(_))
        ));
        let crush = Perturbation::Gaussian {
            amplitude: -5.0,
            center: 0.0,
            width: 1.0,
            target: PerturbTarget::V,
        };
        assert!(matches!(
            init_from_composite(&w, &grid, crush),
            Err(Error::Vacuum(_))
        ));
    }
}
