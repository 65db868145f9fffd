//! A continuous generator vanishing at the band edge: the lower frame bound
//! of its translates shrinks with every refinement, while the indicator
//! control stays put.

use framelab::domain::Domain;
use framelab::multiplication::MultOptions;
use framelab::translates::{corollary_obstruction_demo, fourier_lattice};
use num_complex::Complex64;

fn main() -> framelab::Result<()> {
    let e = Domain::interval(-0.5, 0.5)?;
    let o = MultOptions::default();
    let levels = [64, 128, 256];
    let tri = corollary_obstruction_demo(
        &e,
        &levels,
        fourier_lattice,
        |g| Ok(g.sample(|w| Complex64::new(1.0 - 2.0 * w.abs(), 0.0))),
        0.6,
        &o,
    )?;
    let ctl = corollary_obstruction_demo(&e, &levels, fourier_lattice, |g| Ok(g.sample(|_| Complex64::new(1.0, 0.0))), 0.6, &o)?;
    for (a, b) in tri.sweep.levels.iter().zip(&ctl.sweep.levels) {
        println!("n = {:>3}: triangle A = {:.3e}, indicator A = {:.6}", a.n_per_unit, a.lambda_min, b.lambda_min);
    }
    println!("obstructed {}, max ratio {:.3}", tri.obstructed, tri.max_ratio);
    Ok(())
}
