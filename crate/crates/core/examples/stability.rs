//! Perturbed composite wave evolved with the shift ODEs; prints the shifts,
//! relative entropy and error norms as the perturbation is absorbed.
//!
//! cargo run --release --example stability

use maxwell_shocks::solver::init_from_composite;
use maxwell_shocks::{
    CompositeWave, EndState, GasModel, Grid1D, PerturbTarget, Perturbation, ProfileOptions,
    ShiftTracker, Solver, SolverConfig,
};

fn main() -> maxwell_shocks::Result<()> {
    let g = GasModel::new(1.4, 1.0, 0.01)?;
    let w = CompositeWave::build(
        &g,
        EndState::new(1.1, 0.2)?,
        EndState::new(1.1, -0.2)?,
        ProfileOptions::default(),
        None,
    )?;
    let grid = Grid1D::new(-200.0, 200.0, 2000)?;
    let bump = Perturbation::Gaussian {
        amplitude: 0.01,
        center: 0.0,
        width: 5.0,
        target: PerturbTarget::V,
    };
    let mut state = init_from_composite(&w, &grid, bump)?;

    let mut config = SolverConfig::new(w.far_left(), w.far_right());
    config.boundary_tolerance = Some(1e-6 * w.deltas().0);
    let mut solver = Solver::new(g, grid, config)?;
    let mut tracker = ShiftTracker::new(w, grid, 5.0)?;
    solver.run(&mut state, 60.0, &mut [&mut tracker])?;

    println!(
        "{:>5} {:>11} {:>11} {:>11} {:>11} {:>11} {:>6}",
        "t", "X1", "X2dot", "E_weighted", "err_sup", "err_L2", "sep"
    );
    for r in tracker.rows() {
        println!(
            "{:>5.1} {:>+11.4e} {:>+11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>6}",
            r.t,
            r.x1,
            r.x2dot,
            r.e_weighted,
            r.err_sup(),
            r.err_l2,
            r.separated
        );
    }
    println!("{} steps", solver.steps());
    Ok(())
}
