//! Middle state and shock data for symmetric and asymmetric double shocks.
//!
//! cargo run --example riemann

use maxwell_shocks::riemann::{check_tau_admissible, solve_midstate, DEFAULT_TAU_SAMPLES};
use maxwell_shocks::{EndState, GasModel};

fn main() -> maxwell_shocks::Result<()> {
    let g = GasModel::new(1.4, 1.0, 0.01)?;
    let cases = [
        (
            "symmetric",
            EndState::new(1.1, 0.2)?,
            EndState::new(1.1, -0.2)?,
        ),
        (
            "asymmetric",
            EndState::new(1.2, 0.1)?,
            EndState::new(1.0, -0.3)?,
        ),
    ];
    for (name, left, right) in cases {
        let m = solve_midstate(&g, left, right)?;
        let tau = check_tau_admissible(&g, &m.shock1, &m.shock2, DEFAULT_TAU_SAMPLES);
        println!("{name}: v_m = {:.12} u_m = {:+.12}", m.v_m, m.u_m);
        for link in [m.shock1, m.shock2] {
            let (mass, momentum) = link.rh_residuals(&g);
            println!(
                "  shock {}: sigma = {:+.10} delta = {:.10} RH residuals {mass:.1e} {momentum:.1e}",
                link.family.index(),
                link.sigma,
                link.delta
            );
        }
        println!(
            "  tau_max = {:.6} (tau = {} admissible: {})",
            tau.tau_max,
            g.tau(),
            tau.admissible
        );
    }

    // Data joined by rarefactions are rejected.
    let err = solve_midstate(&g, EndState::new(1.1, -0.2)?, EndState::new(1.1, 0.2)?).unwrap_err();
    println!("rarefaction data: {err}");
    Ok(())
}
