//! Relaxed runs with decreasing tau against the classical run from the same
//! perturbed composite data.
//!
//! cargo run --release --example relaxation_limit

use maxwell_shocks::harness::{cmd_relaxation_limit, relaxation_ordered};
use maxwell_shocks::ExperimentConfig;

fn main() -> maxwell_shocks::Result<()> {
    let cfg = ExperimentConfig::default().with_overrides(&[
        "x_min=-200",
        "x_max=200",
        "n=2000",
        "t_end=2",
        "taus=1e-1,1e-2,1e-3",
    ])?;
    let rows = cmd_relaxation_limit(&cfg, None)?;
    println!(
        "{:>8} {:>14} {:>18} {:>8}",
        "tau", "|(v,u)-(v0,u0)|", "|Pi - mu u_x / v|", "steps"
    );
    for r in &rows {
        println!(
            "{:>8.0e} {:>14.4e} {:>18.4e} {:>8}",
            r.tau, r.distance, r.stress_residual, r.steps
        );
    }
    println!("strictly decreasing: {}", relaxation_ordered(&rows));
    Ok(())
}
