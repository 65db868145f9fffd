//! Several generators, each with its own support, translated by one set of
//! frequencies. Overlap raises the upper bound; a shared zero drives the
//! lower bound to zero under refinement.

use framelab::domain::Domain;
use framelab::pointset::PointSet;
use framelab::translates::{union_check, union_refinement_sweep, UnionSpec};
use num_complex::Complex64;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn main() -> framelab::Result<()> {
    let parts = [Domain::interval(0.0, 1.0)?, Domain::interval(0.5, 1.5)?];
    let n = 64;
    let ints = PointSet::lattice_1d(-32.0, 1.0, n)?;
    let spec = UnionSpec::sample(&parts, &[&|_| c(1.0), &|_| c(1.0)], ints, n)?;
    let rep = union_check(&spec, 1e-8)?;
    println!(
        "indicators: bounds [{:.6}, {:.6}] within [{:.6}, {:.6}], consistent {}",
        rep.report.lower, rep.report.upper, rep.envelope.interval[0], rep.envelope.interval[1], rep.consistent
    );

    let sweep = union_refinement_sweep(&[64, 128, 256], 1e-8, |n| {
        let ps = PointSet::lattice_1d(-((n / 2) as f64), 1.0, n)?;
        UnionSpec::sample(&parts, &[&|w: f64| c(1.0 - w), &|w: f64| c(w - 1.0)], ps, n)
    })?;
    for l in &sweep.levels {
        println!("common zero at 1, n = {:>3}: lower {:.3e}, min sum |h|^2 {:.3e}", l.n_per_unit, l.lambda_min, l.p_hat);
    }
    println!("trend {:?}", sweep.measured_trend);
    Ok(())
}
