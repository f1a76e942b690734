//! Viscous shock profiles of the relaxed system.
//!
//! A traveling wave `(ṽ, ũ, Π̃)(x - σt)` of a single Lax shock reduces, after
//! integrating the mass and momentum equations once, to the scalar
//! autonomous ODE
//!
//! ```text
//! ṽ' = ṽ h(ṽ) / (σ (μ + τ h'(ṽ))),   h(ṽ) = σ²(v_up - ṽ) + p(v_up) - p(ṽ)
//! ```
//!
//! where `v_up` is the left (upstream in ξ) volume. `h` vanishes at both end
//! volumes by the Rankine-Hugoniot relations, so both are fixed points.
//! Velocity and stress are recovered algebraically from `ṽ`.

use crate::constitutive::GasModel;
use crate::error::{Error, Result};
use crate::riemann::{Family, ShockLink};

/// Integration controls. Defaults resolve the `O(1/δ)` layer with about fifty
/// points per decay length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileOptions {
    /// Step in ξ as a multiple of `1/δ`.
    pub dxi_scale: f64,
    /// Tail closure tolerance relative to `δ`.
    pub tail_tol: f64,
    /// Maximum integration length per direction as a multiple of `1/δ`.
    pub budget_scale: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            dxi_scale: 0.02,
            tail_tol: 1e-10,
            budget_scale: 1e3,
        }
    }
}

/// Profile values at one ξ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub v: f64,
    pub u: f64,
    pub pi: f64,
    /// `dṽ/dξ` from the ODE right-hand side.
    pub dv: f64,
}

/// A solved viscous shock profile on a uniform ξ-grid with clamped tails.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveProfile {
    gas: GasModel,
    link: ShockLink,
    xi_start: f64,
    dxi: f64,
    v: Vec<f64>,
    u: Vec<f64>,
    pi: Vec<f64>,
    // Nodal ξ-derivatives for Hermite interpolation.
    dv: Vec<f64>,
    du: Vec<f64>,
    dpi: Vec<f64>,
    tail_gaps: (f64, f64),
}

#[inline]
fn h_and_slope(g: &GasModel, link: &ShockLink, v: f64) -> (f64, f64, f64) {
    let up = link.upstream().v;
    let s2 = link.sigma * link.sigma;
    let pv = g.p(v);
    let dpv = -g.gamma() * pv / v;
    let h = s2 * (up - v) + (g.p(up) - pv);
    (h, -s2 - dpv, dpv)
}

#[inline]
fn rhs_unchecked(g: &GasModel, link: &ShockLink, v: f64) -> f64 {
    let (h, dh, _) = h_and_slope(g, link, v);
    v * h / (link.sigma * (g.mu() + g.tau() * dh))
}

/// `dṽ/dξ` of the traveling-wave ODE.
pub fn profile_rhs(g: &GasModel, link: &ShockLink, v: f64) -> Result<f64> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Domain(format!(
            "specific volume must be positive, got {v}"
        )));
    }
    let (_, dh, _) = h_and_slope(g, link, v);
    let denom = g.mu() + g.tau() * dh;
    if denom <= 0.0 {
        return Err(Error::Admissibility(format!(
            "mu + tau h'(v) = {denom:e} <= 0 at v = {v}; tau exceeds the profile bound"
        )));
    }
    Ok(rhs_unchecked(g, link, v))
}

/// Stress of the traveling wave from `ṽ` and `dṽ/dξ`:
/// `Π̃ = (σ³τ + στp'(ṽ) - μσ) ṽ' / ṽ`.
pub fn reconstruct_pi(g: &GasModel, link: &ShockLink, v: f64, dv_dxi: f64) -> Result<f64> {
    let dp = g.dpressure(v)?;
    Ok(pi_unchecked(g, link, v, dp, dv_dxi))
}

#[inline]
fn pi_unchecked(g: &GasModel, link: &ShockLink, v: f64, dp: f64, dv: f64) -> f64 {
    let s = link.sigma;
    (s * s * s * g.tau() + s * g.tau() * dp - g.mu() * s) / v * dv
}

impl WaveProfile {
    pub fn solve(g: &GasModel, link: &ShockLink) -> Result<Self> {
        Self::solve_with(g, link, ProfileOptions::default())
    }

    pub fn solve_with(g: &GasModel, link: &ShockLink, opts: ProfileOptions) -> Result<Self> {
        let (v_left, v_right) = link.volume_limits();
        let delta = link.delta;
        let dxi = opts.dxi_scale / delta;
        if !(dxi > 0.0 && dxi.is_finite()) {
            return Err(Error::Domain(format!("invalid profile step {dxi}")));
        }
        // The denominator must stay positive across the whole connection.
        let (lo, hi) = (v_left.min(v_right), v_left.max(v_right));
        for k in 0..=1000 {
            profile_rhs(g, link, lo + (hi - lo) * k as f64 / 1000.0)?;
        }

        let anchor = 0.5 * (v_left + v_right);
        let max_steps = (opts.budget_scale / delta / dxi).ceil() as usize;
        let tol = opts.tail_tol * delta;
        let forward = integrate(g, link, anchor, dxi, v_right, tol, max_steps)?;
        let backward = integrate(g, link, anchor, -dxi, v_left, tol, max_steps)?;

        let mut v: Vec<f64> = backward.iter().rev().copied().collect();
        v.extend_from_slice(&forward[1..]);
        let n = v.len();
        let tail_gaps = ((v[0] - v_left).abs(), (v[n - 1] - v_right).abs());
        v[0] = v_left;
        v[n - 1] = v_right;
        let xi_start = -((backward.len() - 1) as f64) * dxi;

        let up = link.upstream();
        let u = v
            .iter()
            .map(|&vk| up.u + link.sigma * (up.v - vk))
            .collect();
        let mut pi: Vec<f64> = v
            .iter()
            .map(|&vk| {
                let dv = rhs_unchecked(g, link, vk);
                pi_unchecked(g, link, vk, g.dp(vk), dv)
            })
            .collect();
        // h is zero at the clamped ends only up to rounding.
        pi[0] = 0.0;
        pi[n - 1] = 0.0;

        let s2 = link.sigma * link.sigma;
        let dv: Vec<f64> = v.iter().map(|&vk| rhs_unchecked(g, link, vk)).collect();
        let du = dv.iter().map(|&d| -link.sigma * d).collect();
        // Π̃ = -h(ṽ), so Π̃' = (σ² + p'(ṽ)) ṽ'.
        let dpi = v
            .iter()
            .zip(&dv)
            .map(|(&vk, &d)| (s2 + g.dp(vk)) * d)
            .collect();
        let profile = Self {
            gas: *g,
            link: *link,
            xi_start,
            dxi,
            v,
            u,
            pi,
            dv,
            du,
            dpi,
            tail_gaps,
        };
        profile.check_invariants()?;
        Ok(profile)
    }

    fn check_invariants(&self) -> Result<()> {
        let increasing = self.link.family == Family::Two;
        for w in self.v.windows(2) {
            let ok = if increasing { w[1] > w[0] } else { w[1] < w[0] };
            if !ok {
                return Err(Error::ProfileDivergence(format!(
                    "profile lost monotonicity between {} and {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(())
    }

    pub fn link(&self) -> &ShockLink {
        &self.link
    }

    pub fn gas(&self) -> &GasModel {
        &self.gas
    }

    pub fn dxi(&self) -> f64 {
        self.dxi
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Sample coordinates, strictly increasing.
    pub fn xi(&self) -> Vec<f64> {
        (0..self.v.len()).map(|k| self.node(k)).collect()
    }

    /// Distances of the last integrated volumes from the end states, before
    /// the end samples were clamped onto them.
    pub fn tail_gaps(&self) -> (f64, f64) {
        self.tail_gaps
    }

    pub fn xi_range(&self) -> (f64, f64) {
        (self.xi_start, self.node(self.v.len() - 1))
    }

    #[inline]
    fn node(&self, k: usize) -> f64 {
        self.xi_start + k as f64 * self.dxi
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    /// ODE right-hand side at every stored sample.
    pub fn dv(&self) -> &[f64] {
        &self.dv
    }

    /// Cubic Hermite interpolation on cell `k` at fraction `th`.
    #[inline]
    fn hermite(&self, f: &[f64], df: &[f64], k: usize, th: f64) -> f64 {
        let (t2, t3) = (th * th, th * th * th);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + th;
        let h01 = 3.0 * t2 - 2.0 * t3;
        let h11 = t3 - t2;
        h00 * f[k] + h01 * f[k + 1] + self.dxi * (h10 * df[k] + h11 * df[k + 1])
    }

    /// Locates `xi` as (cell index, fraction); `None` in the clamped tails.
    #[inline]
    fn locate(&self, xi: f64) -> Option<(usize, f64)> {
        let s = (xi - self.xi_start) / self.dxi;
        let last = (self.v.len() - 1) as f64;
        if s.is_nan() || s <= 0.0 || s >= last {
            return None;
        }
        let k = s.floor() as usize;
        Some((k, s - k as f64))
    }

    #[inline]
    fn tail(&self, xi: f64) -> ProfilePoint {
        let end = if xi <= self.xi_start {
            self.link.left
        } else {
            self.link.right
        };
        ProfilePoint {
            v: end.v,
            u: end.u,
            pi: 0.0,
            dv: 0.0,
        }
    }

    /// Interpolated `(ṽ, ũ, Π̃)`; clamped to the end states outside the window.
    pub fn eval(&self, xi: f64) -> (f64, f64, f64) {
        match self.locate(xi) {
            None => {
                let p = self.tail(xi);
                (p.v, p.u, p.pi)
            }
            Some((k, th)) => (
                self.hermite(&self.v, &self.dv, k, th),
                self.hermite(&self.u, &self.du, k, th),
                self.hermite(&self.pi, &self.dpi, k, th),
            ),
        }
    }

    /// `dṽ/dξ` as the ODE right-hand side at the interpolated volume.
    pub fn eval_dv(&self, xi: f64) -> f64 {
        match self.locate(xi) {
            None => 0.0,
            Some((k, th)) => rhs_unchecked(
                &self.gas,
                &self.link,
                self.hermite(&self.v, &self.dv, k, th),
            ),
        }
    }

    /// All profile quantities at `xi` in one lookup.
    #[inline]
    pub fn sample(&self, xi: f64) -> ProfilePoint {
        match self.locate(xi) {
            None => self.tail(xi),
            Some((k, th)) => {
                let v = self.hermite(&self.v, &self.dv, k, th);
                ProfilePoint {
                    v,
                    u: self.hermite(&self.u, &self.du, k, th),
                    pi: self.hermite(&self.pi, &self.dpi, k, th),
                    dv: rhs_unchecked(&self.gas, &self.link, v),
                }
            }
        }
    }

    /// Sup norms of the three traveling-wave equations
    /// `(-σṽ' - ũ', -σũ' + p(ṽ)' - Π̃', -στΠ̃' + ṽΠ̃ - μũ')`
    /// with derivatives from fourth-order centered differences of the samples.
    pub fn system_residuals(&self) -> [f64; 3] {
        let g = &self.gas;
        let s = self.link.sigma;
        let p: Vec<f64> = self.v.iter().map(|&v| g.p(v)).collect();
        let d = |f: &[f64], k: usize| {
            (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]) / (12.0 * self.dxi)
        };
        let mut res = [0.0_f64; 3];
        for k in 2..self.v.len().saturating_sub(2) {
            let (dv, du, dp, dpi) = (d(&self.v, k), d(&self.u, k), d(&p, k), d(&self.pi, k));
            let r = [
                -s * dv - du,
                -s * du + dp - dpi,
                -s * g.tau() * dpi + self.v[k] * self.pi[k] - g.mu() * du,
            ];
            for (acc, r) in res.iter_mut().zip(r) {
                *acc = acc.max(r.abs());
            }
        }
        res
    }

    /// Sup over interior nodes of `|D0 ṽ - rhs(ṽ)|` with the second-order centered difference.
    pub fn ode_residual(&self) -> f64 {
        (1..self.v.len() - 1)
            .map(|k| {
                let fd = (self.v[k + 1] - self.v[k - 1]) / (2.0 * self.dxi);
                (fd - rhs_unchecked(&self.gas, &self.link, self.v[k])).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Exponential tail rates fitted by least squares.
    pub fn check_decay(&self) -> DecayReport {
        let (v_left, v_right) = self.link.volume_limits();
        let delta = self.link.delta;
        let window = (1e-8 * delta, 1e-2 * delta);
        let pi_max = self.pi.iter().fold(0.0_f64, |m, p| m.max(p.abs()));
        let pi_window = (1e-8 * pi_max, 1e-2 * pi_max);

        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut pi_left = Vec::new();
        let mut pi_right = Vec::new();
        for k in 0..self.v.len() {
            let xi = self.node(k);
            let (dev, pts, pi_pts) = if xi < 0.0 {
                ((self.v[k] - v_left).abs(), &mut left, &mut pi_left)
            } else {
                ((self.v[k] - v_right).abs(), &mut right, &mut pi_right)
            };
            if dev >= window.0 && dev <= window.1 {
                pts.push((xi.abs(), dev.ln()));
            }
            let pa = self.pi[k].abs();
            if pa >= pi_window.0 && pa <= pi_window.1 {
                pi_pts.push((xi.abs(), pa.ln()));
            }
        }
        let rate_left = fit_rate(&left);
        let rate_right = fit_rate(&right);
        let pi_rate_left = fit_rate(&pi_left);
        let pi_rate_right = fit_rate(&pi_right);
        let inconclusive = [rate_left, rate_right, pi_rate_left, pi_rate_right]
            .iter()
            .any(Option::is_none);
        DecayReport {
            rate_left: rate_left.unwrap_or(f64::NAN),
            rate_right: rate_right.unwrap_or(f64::NAN),
            pi_rate_left: pi_rate_left.unwrap_or(f64::NAN),
            pi_rate_right: pi_rate_right.unwrap_or(f64::NAN),
            inconclusive,
        }
    }
}

/// Fitted decay rates of `|ṽ - v_end|` and `|Π̃|` on each tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayReport {
    pub rate_left: f64,
    pub rate_right: f64,
    pub pi_rate_left: f64,
    pub pi_rate_right: f64,
    /// Set when a tail had too few samples inside the fit window.
    pub inconclusive: bool,
}

impl DecayReport {
    pub fn rates_positive(&self) -> bool {
        !self.inconclusive && self.rate_left > 0.0 && self.rate_right > 0.0
    }
}

const MIN_FIT_SAMPLES: usize = 10;

fn fit_rate(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < MIN_FIT_SAMPLES {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(-sxy / sxx)
}

#[inline]
fn integrate(
    g: &GasModel,
    link: &ShockLink,
    start: f64,
    step: f64,
    target: f64,
    tol: f64,
    max_steps: usize,
) -> Result<Vec<f64>> {
    let f = |v: f64| rhs_unchecked(g, link, v);
    let mut out = vec![start];
    let mut v = start;
    for _ in 0..max_steps {
        let k1 = f(v);
        let k2 = f(v + 0.5 * step * k1);
        let k3 = f(v + 0.5 * step * k2);
        let k4 = f(v + step * k3);
        v += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::ProfileDivergence(format!(
                "volume left the physical range: {v}"
            )));
        }
        out.push(v);
        if (v - target).abs() < tol {
            return Ok(out);
        }
    }
    Err(Error::ProfileDivergence(format!(
        "tail did not reach {target} within {max_steps} steps (last value {v})"
    )))
}
