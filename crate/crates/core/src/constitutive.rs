//! γ-law constitutive relations in Lagrangian form.
//!
//! The pressure amplitude is normalized to one, so `p(v) = v^(-γ)` and the
//! potential energy is `H(v) = v^(1-γ)/(γ-1)` with `H' = -p`.

use crate::error::{Error, Result};

/// Gas and Maxwell-relaxation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasModel {
    gamma: f64,
    mu: f64,
    tau: f64,
}

impl GasModel {
    /// `tau = 0` selects the classical Navier-Stokes system.
    pub fn new(gamma: f64, mu: f64, tau: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 1.0) {
            return Err(Error::Domain(format!("gamma must exceed 1, got {gamma}")));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::Domain(format!("mu must be positive, got {mu}")));
        }
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::Domain(format!("tau must be nonnegative, got {tau}")));
        }
        Ok(Self { gamma, mu, tau })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Same gas with a different relaxation time.
    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(self.gamma, self.mu, tau)
    }

    pub fn is_classical(&self) -> bool {
        self.tau == 0.0
    }

    pub fn pressure(&self, v: f64) -> Result<f64> {
        check_volume(v)?;
        Ok(self.p(v))
    }

    pub fn dpressure(&self, v: f64) -> Result<f64> {
        check_volume(v)?;
        Ok(self.dp(v))
    }

    pub fn d2pressure(&self, v: f64) -> Result<f64> {
        check_volume(v)?;
        Ok(self.gamma * (self.gamma + 1.0) * v.powf(-self.gamma - 2.0))
    }

    pub fn potential_h(&self, v: f64) -> Result<f64> {
        check_volume(v)?;
        Ok(v.powf(1.0 - self.gamma) / (self.gamma - 1.0))
    }

    /// `H(v|w) = H(v) - H(w) - H'(w)(v - w)`.
    pub fn relative_h(&self, v: f64, w: f64) -> Result<f64> {
        check_volume(v)?;
        check_volume(w)?;
        Ok(self.rel_h(v, w))
    }

    /// `p(v|w) = p(v) - p(w) - p'(w)(v - w)`.
    pub fn relative_p(&self, v: f64, w: f64) -> Result<f64> {
        check_volume(v)?;
        check_volume(w)?;
        Ok(w.powf(-self.gamma) * power_remainder(-self.gamma, v / w - 1.0))
    }

    /// Cubic lower bound for `H(v|w)` in terms of the pressure jump,
    /// `p(w)^(-1/γ-1)/(2γ) Δp² - (1+γ)/(3γ²) p(w)^(-1/γ-2) Δp³` with
    /// `Δp = p(v) - p(w)`. Valid for small jumps about a fixed state.
    pub fn relative_h_lower_bound(&self, v: f64, w: f64) -> Result<f64> {
        let dp = self.pressure(v)? - self.pressure(w)?;
        let pw = self.p(w);
        let g = self.gamma;
        let e = -1.0 / g;
        Ok(pw.powf(e - 1.0) / (2.0 * g) * dp * dp
            - (1.0 + g) / (3.0 * g * g) * pw.powf(e - 2.0) * dp * dp * dp)
    }

    /// Acoustic speed of the p-system, `sqrt(-p'(v))`.
    pub fn sound_speed(&self, v: f64) -> Result<f64> {
        Ok((-self.dpressure(v)?).sqrt())
    }

    // Unchecked kernels for hot loops; callers guarantee v > 0.

    #[inline]
    pub(crate) fn p(&self, v: f64) -> f64 {
        v.powf(-self.gamma)
    }

    #[inline]
    pub(crate) fn dp(&self, v: f64) -> f64 {
        -self.gamma * v.powf(-self.gamma - 1.0)
    }

    #[inline]
    pub(crate) fn rel_h(&self, v: f64, w: f64) -> f64 {
        w.powf(1.0 - self.gamma) / (self.gamma - 1.0)
            * power_remainder(1.0 - self.gamma, v / w - 1.0)
    }
}

fn check_volume(v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "specific volume must be positive and finite, got {v}"
        )))
    }
}

/// `(1 + x)^a - 1 - a x`, evaluated without the first-order cancellation.
/// Nonnegative whenever `a < 0` or `a > 1` (convexity of `(1 + x)^a`).
pub(crate) fn power_remainder(a: f64, x: f64) -> f64 {
    let r = if x.abs() < 1e-3 {
        // Binomial series from the quadratic term on; |x| < 1e-3 makes
        // eight terms exact to rounding.
        let mut coeff = a * (a - 1.0) / 2.0;
        let mut xk = x * x;
        let mut sum = 0.0;
        for k in 2..10 {
            sum += coeff * xk;
            coeff *= (a - k as f64) / (k as f64 + 1.0);
            xk *= x;
        }
        sum
    } else {
        (a * x.ln_1p()).exp_m1() - a * x
    };
    r.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gas() -> GasModel {
        GasModel::new(1.4, 1.0, 0.01).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(GasModel::new(1.0, 1.0, 0.0).is_err());
        assert!(GasModel::new(1.4, 0.0, 0.0).is_err());
        assert!(GasModel::new(1.4, 1.0, -1e-3).is_err());
        assert!(GasModel::new(1.4, 1.0, 0.0).unwrap().is_classical());
    }

    #[test]
    fn pressure_values() {
        let g = gas();
        assert_eq!(g.pressure(1.0).unwrap(), 1.0);
        assert!((g.pressure(2.0).unwrap() - 0.378_929_141_627_599_5).abs() < 1e-15);
        assert!((g.pressure(1.2).unwrap() - 0.774_722_653_979_046_9).abs() < 1e-15);
        assert!((g.dpressure(1.0).unwrap() + 1.4).abs() < 1e-15);
        assert!((g.d2pressure(1.0).unwrap() - 3.36).abs() < 1e-14);
    }

    #[test]
    fn nonpositive_volume_is_a_domain_error() {
        let g = gas();
        for v in [0.0, -1.0, f64::NAN] {
            assert!(matches!(g.pressure(v), Err(Error::Domain(_))));
            assert!(matches!(g.dpressure(v), Err(Error::Domain(_))));
            assert!(matches!(g.d2pressure(v), Err(Error::Domain(_))));
            assert!(matches!(g.potential_h(v), Err(Error::Domain(_))));
            assert!(matches!(g.relative_h(v, 1.0), Err(Error::Domain(_))));
            assert!(matches!(g.relative_p(1.0, v), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn potential_values() {
        let g = gas();
        assert!((g.potential_h(1.0).unwrap() - 2.5).abs() < 1e-15);
        assert!((g.potential_h(2.0).unwrap() - 1.894_645_708_137_997_6).abs() < 1e-14);
        let mut prev = f64::INFINITY;
        for k in 1..200 {
            let h = g.potential_h(0.5 * k as f64).unwrap();
            assert!(h < prev);
            prev = h;
        }
        assert!(g.potential_h(1e12).unwrap() < 1e-4);
    }

    #[test]
    fn relative_quantities() {
        let g = gas();
        assert_eq!(g.relative_h(0.9, 0.9).unwrap(), 0.0);
        assert_eq!(g.relative_p(0.9, 0.9).unwrap(), 0.0);
        // 40-digit evaluations of the defining three-term expressions.
        assert!((g.relative_h(1.1, 1.0).unwrap() - 0.006_483_756_640_419_409).abs() < 1e-16);
        assert!((g.relative_p(1.1, 1.0).unwrap() - 0.015_085_002_414_697_967).abs() < 1e-16);

        // H'' = -p' gives H(v|w) ~ -p'(w)(v-w)^2/2. Averaging v = w ± d
        // removes the cubic Taylor term.
        let w = 1.3;
        let d = 1e-4;
        let ratio =
            (g.relative_h(w + d, w).unwrap() + g.relative_h(w - d, w).unwrap()) / (2.0 * d * d);
        assert!((ratio + g.dpressure(w).unwrap() / 2.0).abs() < 1e-6);
    }

    #[test]
    fn remainder_branches_agree() {
        for a in [-2.4, -1.4, -0.4, 2.0] {
            for x in [9.0e-4_f64, -9.0e-4, 1.1e-3, -1.1e-3] {
                // The direct formula loses about ten digits to cancellation here.
                let direct = (1.0 + x).powf(a) - 1.0 - a * x;
                let r = power_remainder(a, x);
                assert!((r - direct).abs() < 1e-8 * direct.abs(), "a={a} x={x}");
            }
        }
    }

    #[test]
    fn relative_quantities_positive_off_diagonal() {
        let g = gas();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let v: f64 = rng.gen_range(0.3..3.0);
            let w: f64 = rng.gen_range(0.3..3.0);
            if v == w {
                continue;
            }
            assert!(g.relative_h(v, w).unwrap() > 0.0);
            assert!(g.relative_p(v, w).unwrap() > 0.0);
        }
    }

    #[test]
    fn derivative_consistency_order() {
        let g = gas();
        let v = 1.3;
        let err = |h: f64| {
            let fd = (g.pressure(v + h).unwrap() - g.pressure(v - h).unwrap()) / (2.0 * h);
            let fd2 = (g.dpressure(v + h).unwrap() - g.dpressure(v - h).unwrap()) / (2.0 * h);
            (
                (g.dpressure(v).unwrap() - fd).abs(),
                (g.d2pressure(v).unwrap() - fd2).abs(),
            )
        };
        let (a1, b1) = err(1e-2);
        let (a2, b2) = err(1e-3);
        assert!((a1 / a2).log10() >= 1.9);
        assert!((b1 / b2).log10() >= 1.9);
    }

    #[test]
    fn quadratic_ratio_bounded_on_box() {
        let g = gas();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut worst: f64 = 0.0;
        for _ in 0..10_000 {
            let v: f64 = rng.gen_range(1e-3..3.0);
            let w: f64 = rng.gen_range(1e-3..2.0);
            if v == w {
                continue;
            }
            worst = worst.max((v - w).powi(2) / g.relative_h(v, w).unwrap());
        }
        assert!(worst.is_finite() && worst < 1e3, "{worst}");
    }

    #[test]
    fn cubic_lower_bound_near_reference_state() {
        let g = gas();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut checked = 0;
        while checked < 10_000 {
            let pw: f64 = rng.gen_range(0.951..1.049);
            let pv: f64 = pw + rng.gen_range(-0.0499..0.0499);
            let (v, w) = (pv.powf(-1.0 / 1.4), pw.powf(-1.0 / 1.4));
            let h = g.relative_h(v, w).unwrap();
            let bound = g.relative_h_lower_bound(v, w).unwrap();
            // For tiny jumps the bound is tight to O(Δp²) relative, below the
            // rounding of Δp itself, hence the relative slack.
            assert!(h >= bound * (1.0 - 1e-9), "v={v} w={w} h={h} bound={bound}");
            checked += 1;
        }
    }
}
