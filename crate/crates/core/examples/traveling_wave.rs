//! A single 2-shock profile carried by the relaxed solver: compares the
//! numerical solution with the exactly translated profile on two grids.
//!
//! cargo run --release --example traveling_wave

use maxwell_shocks::riemann::solve_midstate;
use maxwell_shocks::{EndState, FieldState, GasModel, Grid1D, Solver, SolverConfig, WaveProfile};

fn main() -> maxwell_shocks::Result<()> {
    let g = GasModel::new(1.4, 1.0, 0.01)?;
    let m = solve_midstate(&g, EndState::new(1.1, 0.2)?, EndState::new(1.1, -0.2)?)?;
    let profile = WaveProfile::solve(&g, &m.shock2)?;
    let link = *profile.link();
    let t_end = 10.0;

    let mut previous: Option<f64> = None;
    for n in [1000, 2000] {
        let grid = Grid1D::new(-100.0, 100.0, n)?;
        let xs = grid.centers();
        let mut state = FieldState {
            t: 0.0,
            v: vec![],
            u: vec![],
            pi: vec![],
        };
        for &x in &xs {
            let (v, u, pi) = profile.eval(x);
            state.v.push(v);
            state.u.push(u);
            state.pi.push(pi);
        }
        let mut solver = Solver::new(g, grid, SolverConfig::new(link.left, link.right))?;
        solver.run(&mut state, t_end, &mut [])?;

        let err = xs
            .iter()
            .enumerate()
            .map(|(j, &x)| (state.v[j] - profile.eval(x - link.sigma * t_end).0).abs())
            .fold(0.0, f64::max);
        print!(
            "n = {n:>5}: {} steps, sup |v - v_exact| = {err:.3e}",
            solver.steps()
        );
        if let Some(e) = previous {
            print!(", order {:.2}", (e / err).log2());
        }
        println!();
        previous = Some(err);
    }
    Ok(())
}
