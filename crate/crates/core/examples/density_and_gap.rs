//! Beurling densities and gap of a jittered lattice, with both frame
//! predicates and the measured lower bound on a short interval.

use std::sync::Arc;

use framelab::domain::Domain;
use framelab::framecore::{exponential_system, measure_bounds};
use framelab::pointset::PointSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> framelab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let ps = PointSet::jittered_1d(-31.5, 64, 0.2, &mut rng)?;

    let dens = ps.beurling_density(&[2.0, 4.0, 8.0, 16.0])?;
    for (k, r) in dens.r_values.iter().enumerate() {
        println!("r = {r:>4}: D- ~ {:.4}, D+ ~ {:.4}", dens.d_minus[k], dens.d_plus[k]);
    }
    println!("separation {:.4}, gap {:.4}", ps.separation()?, ps.gap()?.rho);

    let interval = ps.beurling_1d_frame_predicate(0.8, 16.0)?;
    println!("exponentials predicted to be a frame on [0, 0.8]: {}", interval.predicted_frame);
    let ball = ps.beurling_ball_frame_predicate(0.4)?;
    println!("ball predicate for radius 0.4: {}", ball.predicted_frame);

    let g = Arc::new(Domain::interval(-0.4, 0.4)?.grid(64)?);
    let rep = measure_bounds(&exponential_system(&g, &ps)?)?;
    println!("measured on [-0.4, 0.4]: A = {:.4}, B = {:.4}", rep.lower, rep.upper);
    Ok(())
}
