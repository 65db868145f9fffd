//! Frame bounds of exponential systems: an orthonormal basis, an
//! oversampled lattice and an undersampled one.

use std::sync::Arc;

use framelab::domain::Domain;
use framelab::framecore::{exponential_system, fourier_basis, measure_bounds, FrameReport};
use framelab::pointset::PointSet;

fn show(name: &str, rep: &FrameReport) {
    println!(
        "{name:<14} A = {:<10.6} B = {:<10.6} rank {}/{} frame {} tight {} riesz {}",
        rep.lower,
        rep.upper,
        rep.rank,
        rep.dim_space,
        rep.flags.frame_for_whole_space,
        rep.flags.tight,
        rep.flags.riesz_sequence
    );
}

fn main() -> framelab::Result<()> {
    let g = Arc::new(Domain::interval(-0.5, 0.5)?.grid(128)?);
    show("fourier basis", &measure_bounds(&fourier_basis(&g)?)?);

    let half = PointSet::lattice_1d(-64.0, 0.5, 256)?;
    show("step 1/2", &measure_bounds(&exponential_system(&g, &half)?)?);

    let sparse = PointSet::lattice_1d(-32.0, 2.0, 32)?;
    show("step 2", &measure_bounds(&exponential_system(&g, &sparse)?)?);
    Ok(())
}
