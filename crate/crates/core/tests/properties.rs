use maxwell_shocks::riemann::{check_tau_admissible, solve_midstate, DEFAULT_TAU_SAMPLES};
use maxwell_shocks::{CompositeWave, EndState, ExperimentConfig, GasModel, ProfileOptions};
use proptest::prelude::*;

fn double_shock() -> impl Strategy<Value = (f64, EndState, EndState)> {
    (
        prop_oneof![Just(1.4), Just(5.0 / 3.0)],
        0.8..1.5f64,
        0.8..1.5f64,
        -0.5..0.5f64,
        0.05..0.5f64,
    )
        .prop_filter_map("not a double shock", |(gamma, vl, vr, ul, drop)| {
            let g = GasModel::new(gamma, 1.0, 0.0).ok()?;
            let (l, r) = (
                EndState::new(vl, ul).ok()?,
                EndState::new(vr, ul - drop).ok()?,
            );
            solve_midstate(&g, l, r).ok().map(|_| (gamma, l, r))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn midstate_structure((gamma, l, r) in double_shock()) {
        let g = GasModel::new(gamma, 1.0, 0.0).unwrap();
        let m = solve_midstate(&g, l, r).unwrap();
        prop_assert!(m.v_m < l.v.min(r.v));
        prop_assert!(m.shock1.sigma < 0.0 && m.shock2.sigma > 0.0);
        prop_assert!(m.u_m < l.u && m.u_m > r.u);
        for link in [m.shock1, m.shock2] {
            let (a, b) = link.rh_residuals(&g);
            prop_assert!(a.abs() < 1e-12 && b.abs() < 1e-12);
        }
    }

    #[test]
    fn composite_stays_between_states((gamma, l, r) in double_shock(), t in 0.0..50.0f64, x in -200.0..200.0f64) {
        let g = GasModel::new(gamma, 1.0, 0.0).unwrap();
        let m = solve_midstate(&g, l, r).unwrap();
        let tau = 0.5 * check_tau_admissible(&g, &m.shock1, &m.shock2, 1000).tau_max;
        let g = g.with_tau(tau).unwrap();
        let w = CompositeWave::build(&g, l, r, ProfileOptions::default(), None).unwrap();
        let p = w.point(t, x, 0.0, 0.0);
        // Overlapping profiles add their excesses over v_m.
        prop_assert!(p.v >= m.v_m - 1e-14 && p.v <= l.v + r.v - m.v_m + 1e-14);
        let (l1, l2) = w.lambdas();
        prop_assert!(p.a >= 1.0 - 1e-14 && p.a <= 1.0 + l1 + l2 + 1e-14);
    }

    #[test]
    fn config_echo_roundtrip(tau in 0.0..1.0f64, n in 16usize..100_000, width in 0.1..50.0f64, amp in -0.1..0.1f64) {
        let sets = [
            format!("tau={tau}"),
            format!("n={n}"),
            format!("width={width}"),
            format!("amplitude={amp}"),
        ];
        let cfg = ExperimentConfig::default().with_overrides(&sets).unwrap();
        prop_assert_eq!(ExperimentConfig::parse(&cfg.echo()).unwrap(), cfg);
    }
}

#[test]
fn interaction_sources_decay_as_shocks_separate() {
    let g = GasModel::new(1.4, 1.0, 0.01).unwrap();
    let w = CompositeWave::build(
        &g,
        EndState::new(1.1, 0.2).unwrap(),
        EndState::new(1.1, -0.2).unwrap(),
        ProfileOptions::default(),
        None,
    )
    .unwrap();
    let peak = |t: f64| {
        let (mut f1, mut f2) = (0.0_f64, 0.0_f64);
        for k in -6000..=6000 {
            let x = k as f64 * 0.05;
            f1 = f1.max(w.source_f1(t, x, 0.0, 0.0).abs());
            f2 = f2.max(w.source_f2(t, x, 0.0, 0.0).abs());
        }
        (f1, f2)
    };
    let series: Vec<(f64, f64)> = [0.0, 20.0, 40.0, 60.0].iter().map(|&t| peak(t)).collect();
    for pair in series.windows(2) {
        assert!(pair[1].0 < pair[0].0, "{series:?}");
        assert!(pair[1].1 < pair[0].1, "{series:?}");
    }
    // Exponential decay in the separation σ2 t - σ1 t.
    assert!(series[3].0 < 1e-3 * series[0].0, "{series:?}");
}

#[test]
fn admissible_tau_bound_is_capped_and_positive() {
    let g = GasModel::new(1.4, 1.0, 0.0).unwrap();
    let m = solve_midstate(
        &g,
        EndState::new(1.1, 0.2).unwrap(),
        EndState::new(1.1, -0.2).unwrap(),
    )
    .unwrap();
    let c = check_tau_admissible(
        &g.with_tau(0.5).unwrap(),
        &m.shock1,
        &m.shock2,
        DEFAULT_TAU_SAMPLES,
    );
    assert!(c.tau_max > 0.0 && c.tau_max <= 1.0);
    assert!(c.admissible);
}
