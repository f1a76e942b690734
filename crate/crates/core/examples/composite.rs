//! Composite double-shock wave: weight function and interaction sources as
//! the two shocks separate.
//!
//! cargo run --example composite

use maxwell_shocks::{CompositeWave, EndState, GasModel, ProfileOptions};

fn main() -> maxwell_shocks::Result<()> {
    let g = GasModel::new(1.4, 1.0, 0.01)?;
    let w = CompositeWave::build(
        &g,
        EndState::new(1.1, 0.2)?,
        EndState::new(1.1, -0.2)?,
        ProfileOptions::default(),
        None,
    )?;
    let (l1, l2) = w.lambdas();
    let (s1, s2) = w.sigmas();
    println!(
        "sigmas {s1:+.6} {s2:+.6}, weight amplitudes {l1:.6} {l2:.6}, a in [1, {:.6}]",
        1.0 + l1 + l2
    );

    println!(
        "{:>6} {:>12} {:>12} {:>10} {:>10}",
        "t", "max|F1|", "max|F2|", "a(0)", "v(0)"
    );
    for t in [0.0, 10.0, 20.0, 40.0, 80.0] {
        let (mut f1, mut f2) = (0.0_f64, 0.0_f64);
        for k in -4000..=4000 {
            let x = 0.05 * k as f64;
            f1 = f1.max(w.source_f1(t, x, 0.0, 0.0).abs());
            f2 = f2.max(w.source_f2(t, x, 0.0, 0.0).abs());
        }
        let (v0, _, _) = w.eval(t, 0.0, 0.0, 0.0);
        println!(
            "{t:>6.1} {f1:>12.4e} {f2:>12.4e} {:>10.6} {v0:>10.6}",
            w.weight_a(t, 0.0, 0.0, 0.0)
        );
    }

    // Shifting the waves moves the weight with them.
    let a_plain = w.weight_a(5.0, -6.0, 0.0, 0.0);
    let a_shifted = w.weight_a(5.0, -6.0, -1.0, 0.0);
    println!("a(5, -6) with X1 = 0: {a_plain:.6}, with X1 = -1: {a_shifted:.6}");
    Ok(())
}
