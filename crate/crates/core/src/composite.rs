//! Superposition of a 1-shock and a 2-shock profile, the shifted weight
//! function, and the interaction sources left over by the superposition.
//!
//! With `ξ_i = x - σ_i t - X_i`, the shifted composite wave is
//! `ṽ = ṽ_1(ξ_1) + ṽ_2(ξ_2) - v_m` (likewise for `ũ`) and `Π̃ = Π̃_1 + Π̃_2`.
//! All x-derivatives of profile quantities come from the profile ODE, never
//! from differences of interpolated samples.

use crate::constitutive::GasModel;
use crate::error::{Error, Result};
use crate::profile::{ProfileOptions, ProfilePoint, WaveProfile};
use crate::riemann::{solve_midstate, EndState, Family};

#[derive(Debug, Clone, PartialEq)]
pub struct CompositeWave {
    gas: GasModel,
    profile1: WaveProfile,
    profile2: WaveProfile,
    mid: EndState,
    lambda1: f64,
    lambda2: f64,
    p_mid: f64,
}

/// Everything the solver and the diagnostics need at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositePoint {
    pub v: f64,
    pub u: f64,
    pub pi: f64,
    /// Weight `a = a_1 + a_2 - 1`.
    pub a: f64,
    pub p1: ProfilePoint,
    pub p2: ProfilePoint,
}

impl CompositePoint {
    /// `(ṽ)_x = (ṽ_1)_x + (ṽ_2)_x`.
    pub fn dv(&self) -> f64 {
        self.p1.dv + self.p2.dv
    }
}

/// Composite fields sampled on a grid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CompositeField {
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub pi: Vec<f64>,
    pub a: Vec<f64>,
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub dv1: Vec<f64>,
    pub dv2: Vec<f64>,
    pub pi1: Vec<f64>,
    pub pi2: Vec<f64>,
}

impl CompositeField {
    fn resize(&mut self, n: usize) {
        for buf in [
            &mut self.v,
            &mut self.u,
            &mut self.pi,
            &mut self.a,
            &mut self.v1,
            &mut self.v2,
            &mut self.dv1,
            &mut self.dv2,
            &mut self.pi1,
            &mut self.pi2,
        ] {
            buf.resize(n, 0.0);
        }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }
}

impl CompositeWave {
    /// Joins two solved profiles. `lambdas = None` selects `λ_i = √δ_i`.
    pub fn new(
        profile1: WaveProfile,
        profile2: WaveProfile,
        lambdas: Option<(f64, f64)>,
    ) -> Result<Self> {
        let (l1, l2) = (*profile1.link(), *profile2.link());
        if l1.family != Family::One || l2.family != Family::Two {
            return Err(Error::Domain(
                "composite needs a 1-shock followed by a 2-shock".into(),
            ));
        }
        if l1.right != l2.left {
            return Err(Error::Domain(format!(
                "profiles do not share a middle state: {:?} vs {:?}",
                l1.right, l2.left
            )));
        }
        if profile1.gas() != profile2.gas() {
            return Err(Error::Domain(
                "profiles were solved for different gases".into(),
            ));
        }
        let (lambda1, lambda2) = lambdas.unwrap_or((l1.delta.sqrt(), l2.delta.sqrt()));
        for (lambda, delta) in [(lambda1, l1.delta), (lambda2, l2.delta)] {
            if !(lambda > 0.0 && lambda < 1.0 && lambda >= delta) {
                return Err(Error::Domain(format!(
                    "weight amplitude {lambda} must satisfy max(δ, 0) < λ < 1 with δ = {delta}"
                )));
            }
        }
        let gas = *profile1.gas();
        let mid = l1.right;
        Ok(Self {
            gas,
            p_mid: gas.p(mid.v),
            profile1,
            profile2,
            mid,
            lambda1,
            lambda2,
        })
    }

    /// Solves the Riemann problem and both profiles.
    pub fn build(
        g: &GasModel,
        left: EndState,
        right: EndState,
        opts: ProfileOptions,
        lambdas: Option<(f64, f64)>,
    ) -> Result<Self> {
        let m = solve_midstate(g, left, right)?;
        let p1 = WaveProfile::solve_with(g, &m.shock1, opts)?;
        let p2 = WaveProfile::solve_with(g, &m.shock2, opts)?;
        Self::new(p1, p2, lambdas)
    }

    pub fn gas(&self) -> &GasModel {
        &self.gas
    }

    pub fn profile1(&self) -> &WaveProfile {
        &self.profile1
    }

    pub fn profile2(&self) -> &WaveProfile {
        &self.profile2
    }

    pub fn mid(&self) -> EndState {
        self.mid
    }

    pub fn far_left(&self) -> EndState {
        self.profile1.link().left
    }

    pub fn far_right(&self) -> EndState {
        self.profile2.link().right
    }

    pub fn sigmas(&self) -> (f64, f64) {
        (self.profile1.link().sigma, self.profile2.link().sigma)
    }

    pub fn deltas(&self) -> (f64, f64) {
        (self.profile1.link().delta, self.profile2.link().delta)
    }

    pub fn lambdas(&self) -> (f64, f64) {
        (self.lambda1, self.lambda2)
    }

    #[inline]
    fn xis(&self, t: f64, x: f64, x1: f64, x2: f64) -> (f64, f64) {
        let (s1, s2) = self.sigmas();
        (x - s1 * t - x1, x - s2 * t - x2)
    }

    #[inline]
    pub fn point(&self, t: f64, x: f64, x1: f64, x2: f64) -> CompositePoint {
        let (xi1, xi2) = self.xis(t, x, x1, x2);
        let p1 = self.profile1.sample(xi1);
        let p2 = self.profile2.sample(xi2);
        let (a1, a2) = self.weight_parts_from(p1.v, p2.v);
        CompositePoint {
            v: p1.v + p2.v - self.mid.v,
            u: p1.u + p2.u - self.mid.u,
            pi: p1.pi + p2.pi,
            a: a1 + a2 - 1.0,
            p1,
            p2,
        }
    }

    /// `(ṽ, ũ, Π̃)` of the shifted composite wave.
    pub fn eval(&self, t: f64, x: f64, x1: f64, x2: f64) -> (f64, f64, f64) {
        let p = self.point(t, x, x1, x2);
        (p.v, p.u, p.pi)
    }

    #[inline]
    fn weight_parts_from(&self, v1: f64, v2: f64) -> (f64, f64) {
        let (d1, d2) = self.deltas();
        (
            1.0 + self.lambda1 * (self.p_mid - self.gas.p(v1)) / d1,
            1.0 + self.lambda2 * (self.p_mid - self.gas.p(v2)) / d2,
        )
    }

    /// `(a_1, a_2)` at the shifted profile positions.
    pub fn weight_parts(&self, t: f64, x: f64, x1: f64, x2: f64) -> (f64, f64) {
        let (xi1, xi2) = self.xis(t, x, x1, x2);
        self.weight_parts_from(self.profile1.eval(xi1).0, self.profile2.eval(xi2).0)
    }

    /// `a(t, x) = a_1(x - σ_1 t - X_1) + a_2(x - σ_2 t - X_2) - 1`.
    pub fn weight_a(&self, t: f64, x: f64, x1: f64, x2: f64) -> f64 {
        let (a1, a2) = self.weight_parts(t, x, x1, x2);
        a1 + a2 - 1.0
    }

    /// `F_1 = p(ṽ)_x - p(ṽ_1)_x - p(ṽ_2)_x`.
    pub fn source_f1(&self, t: f64, x: f64, x1: f64, x2: f64) -> f64 {
        self.f1_at(&self.point(t, x, x1, x2))
    }

    /// `F_2 = (ṽ_2 - v_m) Π̃_1 + (ṽ_1 - v_m) Π̃_2`.
    pub fn source_f2(&self, t: f64, x: f64, x1: f64, x2: f64) -> f64 {
        self.f2_at(&self.point(t, x, x1, x2))
    }

    pub fn f1_at(&self, p: &CompositePoint) -> f64 {
        let g = &self.gas;
        g.dp(p.v) * (p.p1.dv + p.p2.dv) - g.dp(p.p1.v) * p.p1.dv - g.dp(p.p2.v) * p.p2.dv
    }

    pub fn f2_at(&self, p: &CompositePoint) -> f64 {
        (p.p2.v - self.mid.v) * p.p1.pi + (p.p1.v - self.mid.v) * p.p2.pi
    }

    /// Samples the composite wave at every `x` in one pass.
    pub fn eval_grid(&self, t: f64, xs: &[f64], x1: f64, x2: f64, out: &mut CompositeField) {
        out.resize(xs.len());
        for (j, &x) in xs.iter().enumerate() {
            let p = self.point(t, x, x1, x2);
            out.v[j] = p.v;
            out.u[j] = p.u;
            out.pi[j] = p.pi;
            out.a[j] = p.a;
            out.v1[j] = p.p1.v;
            out.v2[j] = p.p2.v;
            out.dv1[j] = p.p1.dv;
            out.dv2[j] = p.p2.dv;
            out.pi1[j] = p.p1.pi;
            out.pi2[j] = p.p2.pi;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wave() -> CompositeWave {
        let g = GasModel::new(1.4, 1.0, 0.01).unwrap();
        CompositeWave::build(
            &g,
            EndState::new(1.1, 0.2).unwrap(),
            EndState::new(1.1, -0.2).unwrap(),
            ProfileOptions::default(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn far_field_limits() {
        let w = wave();
        let (v, u, pi) = w.eval(3.0, -1e6, 0.1, -0.2);
        assert_eq!((v, u, pi), (1.1, 0.2, 0.0));
        let (v, u, pi) = w.eval(3.0, 1e6, 0.1, -0.2);
        assert_eq!((v, u, pi), (1.1, -0.2, 0.0));
        let (l1, l2) = w.lambdas();
        assert!((w.weight_a(0.0, -1e6, 0.0, 0.0) - (1.0 + l1)).abs() < 1e-15);
        assert!((w.weight_a(0.0, 1e6, 0.0, 0.0) - (1.0 + l2)).abs() < 1e-15);
    }

    #[test]
    fn superposition_identity() {
        // Pushing profile 2 far to the right leaves exactly profile 1.
        let w = wave();
        for x in [-30.0, -3.0, 0.0, 4.5, 20.0] {
            let (v, u, pi) = w.eval(0.0, x, 0.0, 1e7);
            let (v1, u1, pi1) = w.profile1().eval(x);
            assert!((v - v1).abs() < 1e-15 && (u - u1).abs() < 1e-15);
            assert_eq!(pi, pi1);
            assert!(w.source_f1(0.0, x, 0.0, 1e7).abs() < 1e-14);
            assert_eq!(w.source_f2(0.0, x, 0.0, 1e7), 0.0);
        }
    }

    #[test]
    fn sources_vanish_in_tails() {
        let w = wave();
        for x in [-1e5, 1e5] {
            assert_eq!(w.source_f1(1.0, x, 0.0, 0.0), 0.0);
            assert_eq!(w.source_f2(1.0, x, 0.0, 0.0), 0.0);
        }
    }

    #[test]
    fn weight_bounds_and_monotonicity() {
        let w = wave();
        let (l1, l2) = w.lambdas();
        let (s1, s2) = w.sigmas();
        let mut prev = None::<(f64, f64)>;
        let h = 0.05;
        for k in -4000..4000 {
            let x = k as f64 * h;
            let a = w.weight_a(10.0, x, 0.0, 0.0);
            assert!((1.0..=1.0 + l1 + l2).contains(&a), "a={a} at x={x}");
            let parts = w.weight_parts(10.0, x, 0.0, 0.0);
            if let Some((a1, a2)) = prev {
                assert!(s1 * (parts.0 - a1) >= 0.0);
                assert!(s2 * (parts.1 - a2) >= 0.0);
            }
            prev = Some(parts);
        }
    }

    #[test]
    fn composite_stays_above_middle_volume() {
        let w = wave();
        let vm = w.mid().v;
        for t in [0.0, 5.0, 50.0] {
            for k in -3000..3000 {
                let (v, _, _) = w.eval(t, k as f64 * 0.1, 0.0, 0.0);
                assert!(v >= vm);
            }
        }
    }

    #[test]
    fn rejects_bad_weights() {
        let w = wave();
        let (p1, p2) = (w.profile1().clone(), w.profile2().clone());
        assert!(CompositeWave::new(p1.clone(), p2.clone(), Some((1.2, 0.5))).is_err());
        assert!(CompositeWave::new(p1.clone(), p2.clone(), Some((0.5, 0.01))).is_err());
        assert!(CompositeWave::new(p2.clone(), p1.clone(), None).is_err());
        assert!(CompositeWave::new(p1, p2, Some((0.5, 0.5))).is_ok());
    }

    #[test]
    fn grid_evaluation_matches_points() {
        let w = wave();
        let xs: Vec<f64> = (0..200).map(|k| -50.0 + 0.5 * k as f64).collect();
        let mut field = CompositeField::default();
        w.eval_grid(2.0, &xs, 0.3, -0.1, &mut field);
        for (j, &x) in xs.iter().enumerate() {
            let p = w.point(2.0, x, 0.3, -0.1);
            assert_eq!(field.v[j], p.v);
            assert_eq!(field.a[j], p.a);
            assert_eq!(field.dv2[j], p.p2.dv);
        }
    }
}
