//! Multiplying an orthonormal basis by `φ`: bounded `φ` away from zero
//! gives a frame, unimodular `φ` keeps it tight, and `φ(t) = t` loses the
//! lower bound as the grid is refined.

use std::f64::consts::PI;
use std::sync::Arc;

use framelab::domain::Domain;
use framelab::framecore::fourier_basis;
use framelab::multiplication::{
    check_frame_multiplication, check_tight_multiplication, fourier_refinement_sweep, MultOptions, SweepQuantity,
};
use num_complex::Complex64;

fn main() -> framelab::Result<()> {
    let e = Domain::interval(-0.5, 0.5)?;
    let g = Arc::new(e.grid(256)?);
    let base = fourier_basis(&g)?;
    let o = MultOptions::default();

    let phi = g.sample(|t| Complex64::new(2.0 + (2.0 * PI * t).sin(), 0.0));
    let rep = check_frame_multiplication(&base, &phi, &o)?;
    println!(
        "2 + sin: bounds [{:.6}, {:.6}], envelope {:?}, consistent {}",
        rep.mult_report.lower, rep.mult_report.upper, rep.envelope, rep.consistent
    );

    let uni = g.sample(|t| Complex64::from_polar(1.0, 2.0 * PI * t * t));
    let rep = check_tight_multiplication(&base, &uni, &o)?;
    println!("unimodular: tight {}, bounds [{:.12}, {:.12}]", rep.measured.tight, rep.mult_report.lower, rep.mult_report.upper);

    let sweep = fourier_refinement_sweep(&e, &[64, 128, 256], SweepQuantity::GramMin, |t| Complex64::new(t, 0.0), &o)?;
    for l in &sweep.levels {
        println!("t: n = {:>3}, smallest Gram eigenvalue {:.3e}", l.n_per_unit, l.gram_min);
    }
    println!("trend {:?} (predicted {:?})", sweep.measured_trend, sweep.predicted_trend);
    Ok(())
}
