//! Expands band-limited signals in translates of a smooth bump over a
//! densified jittered lattice and reports residuals and coefficient decay.

use framelab::domain::Domain;
use framelab::framecore::ReconstructOptions;
use framelab::pointset::PointSet;
use framelab::translates::{random_band_limited, BumpSpec, ExpansionContext};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> framelab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let spec = BumpSpec::new(Domain::interval(-0.4, 0.4)?, 0.05)?;
    let base = PointSet::jittered_1d(-159.5, 320, 0.2, &mut rng)?;
    let ctx = ExpansionContext::prepare(&spec, spec.min_n_per_unit(), &base, 0.2, 0.1, 1e-8)?;
    println!(
        "{} frequencies, gap {:.3}, frame bounds [{:.4}, {:.4}]",
        ctx.frequencies.len(),
        ctx.frequencies.gap()?.rho,
        ctx.bounds.lower,
        ctx.bounds.upper
    );
    println!("decay constant {:.4}", spec.decay_constant(2000)?);

    let opts = ReconstructOptions::default();
    for k in 0..5 {
        let f = random_band_limited(&ctx.grid, &ctx.domain, 6, &mut rng);
        let rep = ctx.expand(&f, &opts)?;
        let perm = ctx.max_permutation_change(&rep, 3, &mut rng)?;
        println!(
            "signal {k}: residual {:.1e}, band residual {:.1e}, |alpha|^2 {:.4} <= {:.4}, reorder change {:.1e}",
            rep.residual, rep.band_residual, rep.coeff_norm_sqr, rep.coeff_bound, perm
        );
        if k == 0 {
            let tail = ctx.tail_profile(&rep, &[-10.0, 10.0], &[5.0, 10.0, 20.0, 40.0])?;
            println!("  coefficient tails beyond radii {:?}: {:?}", tail.radii, tail.tails);
        }
    }
    Ok(())
}
