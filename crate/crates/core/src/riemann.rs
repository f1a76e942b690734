//! Double-shock Riemann problem of the p-system.
//!
//! Given far-field states `(v-, u-)` and `(v+, u+)`, find the compressed
//! middle state `(v_m, u_m)` joined to the left by a 1-shock and to the right
//! by a 2-shock, together with the Rankine-Hugoniot speeds and strengths.

use crate::constitutive::GasModel;
use crate::error::{Error, Result};

/// A far-field state. The stress component vanishes at infinity and is not stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndState {
    pub v: f64,
    pub u: f64,
}

impl EndState {
    pub fn new(v: f64, u: f64) -> Result<Self> {
        if !(v > 0.0 && v.is_finite() && u.is_finite()) {
            return Err(Error::Domain(format!("invalid end state (v={v}, u={u})")));
        }
        Ok(Self { v, u })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    One,
    Two,
}

impl Family {
    pub fn index(self) -> usize {
        match self {
            Family::One => 1,
            Family::Two => 2,
        }
    }
}

/// One Lax shock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockLink {
    pub family: Family,
    pub left: EndState,
    pub right: EndState,
    /// Signed Rankine-Hugoniot speed.
    pub sigma: f64,
    /// Pressure jump `|p(left.v) - p(right.v)|`.
    pub delta: f64,
}

/// Minimum volume jump and minimum pressure jump accepted as a shock.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

impl ShockLink {
    /// Builds the shock of the given family leaving `left` with right volume
    /// `right_v`; the right velocity follows from the Hugoniot drop.
    pub fn from_left(g: &GasModel, family: Family, left: EndState, right_v: f64) -> Result<Self> {
        let sigma = shock_speed(g, family, left.v, right_v)?;
        let drop = hugoniot_velocity_drop(g, family, left.v, right_v)?;
        let right = EndState::new(right_v, left.u - drop)?;
        Self::assemble(g, family, left, right, sigma)
    }

    fn assemble(
        g: &GasModel,
        family: Family,
        left: EndState,
        right: EndState,
        sigma: f64,
    ) -> Result<Self> {
        let delta = (g.pressure(left.v)? - g.pressure(right.v)?).abs();
        if delta < DEGENERACY_THRESHOLD {
            return Err(Error::DegenerateShock(format!("pressure jump {delta:e}")));
        }
        Ok(Self {
            family,
            left,
            right,
            sigma,
            delta,
        })
    }

    /// Upstream state used by the integrated traveling-wave relations; for
    /// both families this is the left state.
    pub fn upstream(&self) -> EndState {
        self.left
    }

    /// Volume at `ξ → -∞` and `ξ → +∞`.
    pub fn volume_limits(&self) -> (f64, f64) {
        (self.left.v, self.right.v)
    }

    /// Middle state shared with the other family.
    pub fn middle(&self) -> EndState {
        match self.family {
            Family::One => self.right,
            Family::Two => self.left,
        }
    }

    /// `(−σ[v] − [u], −σ[u] + [p])`: both vanish for an exact shock.
    pub fn rh_residuals(&self, g: &GasModel) -> (f64, f64) {
        let dv = self.right.v - self.left.v;
        let du = self.right.u - self.left.u;
        let dp = g.p(self.right.v) - g.p(self.left.v);
        (-self.sigma * dv - du, -self.sigma * du + dp)
    }
}

fn check_pair(family: Family, vl: f64, vr: f64) -> Result<()> {
    if !(vl > 0.0 && vr > 0.0 && vl.is_finite() && vr.is_finite()) {
        return Err(Error::Domain(format!(
            "volumes must be positive, got {vl}, {vr}"
        )));
    }
    if (vl - vr).abs() < DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateShock(format!(
            "vl={vl} and vr={vr} coincide"
        )));
    }
    let compressive = match family {
        Family::One => vr < vl,
        Family::Two => vr > vl,
    };
    if !compressive {
        return Err(Error::Admissibility(format!(
            "{family:?}-shock from v={vl} to v={vr} violates the Lax condition"
        )));
    }
    Ok(())
}

/// Signed Rankine-Hugoniot speed: negative for the 1-family, positive for the 2-family.
pub fn shock_speed(g: &GasModel, family: Family, vl: f64, vr: f64) -> Result<f64> {
    check_pair(family, vl, vr)?;
    let s = ((g.p(vl) - g.p(vr)) / (vr - vl)).sqrt();
    Ok(match family {
        Family::One => -s,
        Family::Two => s,
    })
}

/// Velocity decrease across a Lax shock, `u_right = u_left - drop`.
pub fn hugoniot_velocity_drop(g: &GasModel, family: Family, vl: f64, vr: f64) -> Result<f64> {
    check_pair(family, vl, vr)?;
    Ok(drop_unchecked(g, vl.min(vr), vl.max(vr)))
}

#[inline]
fn drop_unchecked(g: &GasModel, small: f64, large: f64) -> f64 {
    ((g.p(small) - g.p(large)) * (large - small))
        .max(0.0)
        .sqrt()
}

/// Derivative of the drop with respect to the smaller volume.
fn drop_derivative(g: &GasModel, small: f64, large: f64) -> f64 {
    let d = drop_unchecked(g, small, large);
    if d == 0.0 {
        return f64::NEG_INFINITY;
    }
    (g.dp(small) * (large - small) - (g.p(small) - g.p(large))) / (2.0 * d)
}

/// Solution of the double-shock Riemann problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Midstate {
    pub v_m: f64,
    pub u_m: f64,
    pub shock1: ShockLink,
    pub shock2: ShockLink,
}

impl Midstate {
    pub fn mid(&self) -> EndState {
        EndState {
            v: self.v_m,
            u: self.u_m,
        }
    }

    /// `u- - drop1(v_m) - drop2(v_m) - u+`.
    pub fn residual(&self, g: &GasModel) -> f64 {
        let left = self.shock1.left;
        let right = self.shock2.right;
        residual(g, left, right, self.v_m)
    }
}

fn residual(g: &GasModel, left: EndState, right: EndState, v: f64) -> f64 {
    left.u - drop_unchecked(g, v, left.v) - drop_unchecked(g, v, right.v) - right.u
}

/// Bisection to this bracket width before Newton polishing.
const BISECTION_WIDTH: f64 = 1e-14;
const NEWTON_POLISH_STEPS: usize = 3;
/// Lower end of the search bracket relative to `min(v-, v+)`.
const VACUUM_FLOOR: f64 = 1e-6;

pub fn solve_midstate(g: &GasModel, left: EndState, right: EndState) -> Result<Midstate> {
    EndState::new(left.v, left.u)?;
    EndState::new(right.v, right.u)?;
    let v_top = left.v.min(right.v);
    let v_floor = VACUUM_FLOOR * v_top;

    // Φ increases with v on (0, min v±); a root below v_top needs Φ(v_top) > 0.
    let phi_top = residual(g, left, right, v_top);
    if phi_top <= 0.0 {
        return Err(Error::NotDoubleShock(format!(
            "residual at min(v-, v+) is {phi_top:e}; the data need u- - u+ > drop between v- and v+"
        )));
    }
    if residual(g, left, right, v_floor) >= 0.0 {
        return Err(Error::Vacuum(format!(
            "middle state would lie below v = {v_floor:e}"
        )));
    }

    let (mut lo, mut hi) = (v_floor, v_top);
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(g, left, right, mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut v = 0.5 * (lo + hi);
    for _ in 0..NEWTON_POLISH_STEPS {
        let f = residual(g, left, right, v);
        if f == 0.0 {
            break;
        }
        let df = -drop_derivative(g, v, left.v) - drop_derivative(g, v, right.v);
        let next = v - f / df;
        // Keep the polish inside the bracket; Φ is monotone so the bracket is safe.
        if next.is_finite()
            && next > lo - BISECTION_WIDTH
            && next < hi + BISECTION_WIDTH
            && next < v_top
        {
            v = next;
        }
    }

    let d1 = drop_unchecked(g, v, left.v);
    let d2 = drop_unchecked(g, v, right.v);
    // Symmetric average of the two routes; exact zero for mirror-symmetric data.
    let u_m = 0.5 * ((left.u - d1) + (right.u + d2));
    let mid = EndState { v, u: u_m };

    let shock1 = ShockLink::assemble(
        g,
        Family::One,
        left,
        mid,
        shock_speed(g, Family::One, left.v, v)?,
    )?;
    let shock2 = ShockLink::assemble(
        g,
        Family::Two,
        mid,
        right,
        shock_speed(g, Family::Two, v, right.v)?,
    )?;
    Ok(Midstate {
        v_m: v,
        u_m,
        shock1,
        shock2,
    })
}

/// Largest relaxation time compatible with the traveling-wave construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauCheck {
    pub tau_max: f64,
    pub admissible: bool,
}

pub const DEFAULT_TAU_SAMPLES: usize = 10_000;

/// `τ_max = min(1, min_i inf_{ṽ in [v_m, v_end,i]} μ / |σ_i² + p'(ṽ)|)`, with
/// the infimum taken over `samples` equispaced points per shock.
pub fn check_tau_admissible(
    g: &GasModel,
    link1: &ShockLink,
    link2: &ShockLink,
    samples: usize,
) -> TauCheck {
    let samples = samples.max(2);
    let mut tau_max: f64 = 1.0;
    for link in [link1, link2] {
        let (a, b) = link.volume_limits();
        let s2 = link.sigma * link.sigma;
        for k in 0..samples {
            let v = a + (b - a) * k as f64 / (samples - 1) as f64;
            let denom = (s2 + g.dp(v)).abs();
            if denom > 0.0 {
                tau_max = tau_max.min(g.mu() / denom);
            }
        }
    }
    TauCheck {
        tau_max,
        admissible: g.tau() <= tau_max,
    }
}
