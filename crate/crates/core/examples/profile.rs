//! Traveling-wave profiles of both shocks, their stress and tail decay.
//!
//! cargo run --example profile [tau]

use maxwell_shocks::riemann::solve_midstate;
use maxwell_shocks::{EndState, GasModel, WaveProfile};

fn main() -> maxwell_shocks::Result<()> {
    let tau: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0.01);
    let g = GasModel::new(1.4, 1.0, tau)?;
    let m = solve_midstate(&g, EndState::new(1.1, 0.2)?, EndState::new(1.1, -0.2)?)?;

    for link in [m.shock1, m.shock2] {
        let p = WaveProfile::solve(&g, &link)?;
        let (lo, hi) = p.xi_range();
        let decay = p.check_decay();
        let res = p.system_residuals();
        println!(
            "shock {} (sigma {:+.6}, delta {:.6}): {} samples on [{lo:.1}, {hi:.1}]",
            link.family.index(),
            link.sigma,
            link.delta,
            p.len()
        );
        println!(
            "  residuals of the traveling-wave system: {:.2e} {:.2e} {:.2e}",
            res[0], res[1], res[2]
        );
        println!(
            "  tail rates v: {:.4} {:.4}  Pi: {:.4} {:.4}",
            decay.rate_left, decay.rate_right, decay.pi_rate_left, decay.pi_rate_right
        );
        println!("  {:>8} {:>12} {:>12} {:>12}", "xi", "v", "u", "Pi");
        for xi in [-20.0, -10.0, -5.0, 0.0, 5.0, 10.0, 20.0] {
            let (v, u, pi) = p.eval(xi);
            println!("  {xi:>8.1} {v:>12.8} {u:>+12.8} {pi:>+12.8}");
        }
    }
    Ok(())
}
