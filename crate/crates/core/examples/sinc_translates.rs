//! Integer translates of sinc (transform `χ_[-1/2,1/2]`) and of a generator
//! vanishing on half the band, classified by their frequency-side systems.

use std::sync::Arc;

use framelab::domain::Domain;
use framelab::multiplication::MultOptions;
use framelab::pointset::PointSet;
use framelab::translates::{classify_translates, Generator};
use num_complex::Complex64;

fn main() -> framelab::Result<()> {
    let g = Arc::new(Domain::interval(-0.5, 0.5)?.grid(128)?);
    let ints = PointSet::lattice_1d(-64.0, 1.0, 128)?;
    let o = MultOptions::default();

    for gen in [
        Generator::indicator(&g),
        Generator::from_fn(&g, "half band", |w| Complex64::new(if w < 0.0 { 1.0 } else { 0.0 }, 0.0)),
    ] {
        let c = classify_translates(&gen, &ints, &g, &o)?;
        println!(
            "{:<10} verdict {:?}, rank {} of {}, bounds on the span [{:.4}, {:.4}], consistent {}",
            c.generator,
            c.verdict,
            c.frame.mult_report.rank,
            c.frame.mult_report.dim_space,
            c.frame.mult_report.lower,
            c.frame.mult_report.upper,
            c.consistent
        );
    }
    Ok(())
}
