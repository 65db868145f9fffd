//! Translates of a bump over `E_δ`, restricted back to `E`, have the same
//! bounds as the exponentials on `E`.

use framelab::domain::Domain;
use framelab::pointset::PointSet;
use framelab::translates::{outer_frame_check, BumpSpec, ExpansionContext};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> framelab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let spec = BumpSpec::new(Domain::interval(-0.4, 0.4)?, 0.05)?;
    let base = PointSet::jittered_1d(-159.5, 320, 0.2, &mut rng)?;
    let ctx = ExpansionContext::prepare(&spec, spec.min_n_per_unit(), &base, 0.2, 0.1, 1e-8)?;
    let rep = outer_frame_check(&ctx.generator, &ctx.frequencies, &ctx.domain, 1e-8)?;
    println!("restricted to E:      [{:.8}, {:.8}]", rep.projected.lower, rep.projected.upper);
    println!("exponentials on E:    [{:.8}, {:.8}]", rep.exponential_on_e.lower, rep.exponential_on_e.upper);
    println!("unrestricted on E_d:  [{:.8}, {:.8}]", rep.unprojected.lower, rep.unprojected.upper);
    println!("consistent {}", rep.consistent);
    Ok(())
}
