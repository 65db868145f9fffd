//! Translates of `f ∗ g` from those of `f` and `g`, in every mode.

use std::sync::Arc;

use framelab::domain::Domain;
use framelab::multiplication::MultOptions;
use framelab::pointset::PointSet;
use framelab::translates::{convolution_closure_check, ConvolutionMode, Generator};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> framelab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = Arc::new(Domain::interval(-0.4, 0.4)?.grid(40)?);
    let ps = PointSet::jittered_1d(-19.5, 40, 0.2, &mut rng)?;
    let f = Generator::from_fn(&g, "f", |w| Complex64::new(1.5 + (7.0 * w).cos(), 0.0));
    let h = Generator::from_fn(&g, "g", |w| Complex64::from_polar(2.0 + (11.0 * w).sin(), 3.0 * w));
    for mode in [
        ConvolutionMode::Bessel,
        ConvolutionMode::Frame,
        ConvolutionMode::FrameSequence,
        ConvolutionMode::Quotient,
        ConvolutionMode::BesselQuotient,
    ] {
        let rep = convolution_closure_check(&f, &h, &ps, &g, mode, &MultOptions::default())?;
        println!(
            "{mode:?}: product bounds [{:.4}, {:.4}], consistent {}",
            rep.product_report.lower, rep.product_report.upper, rep.consistent
        );
    }
    Ok(())
}
