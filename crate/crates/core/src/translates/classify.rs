use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::Generator;
use crate::domain::Grid;
use crate::error::{Error, Result};
use crate::framecore::{exponential_system, exponential_system_from, SampledFunction, SynthesisSystem};
use crate::multiplication::{
    check_bessel_multiplication, check_frame_multiplication, check_frame_sequence_multiplication,
    refinement_sweep, MultCheckReport, MultOptions, RefinementReport, SweepQuantity, Trend,
};
use crate::pointset::PointSet;

/// `{e_{λ_k} ĥ}`: the frequency image of `{T_{λ_k} h}` acting on `P_E`.
pub fn translate_system(gen: &Generator, ps: &PointSet, grid: &Arc<Grid>) -> Result<SynthesisSystem> {
    if !gen.grid().same_as(grid) {
        return Err(Error::GridMismatch);
    }
    exponential_system(grid, ps)?.multiplied(gen.hat())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TranslateVerdict {
    /// Frame for `P_E`.
    Frame,
    /// Frame for the closed span only.
    FrameSequence,
    /// Bessel, with no lower bound on its span.
    BesselOnly,
}

/// Classification of `{T_{λ_k} h}` through the multiplier `φ = ĥ` applied to
/// the exponential frame `{e_{λ_k}}` of `L²(E)`. Norms on `P_E` are the
/// `L²(E)` norms of the transforms.
#[derive(Debug, Clone, Serialize)]
pub struct TranslateClassification {
    pub generator: String,
    pub bessel: MultCheckReport,
    pub frame: MultCheckReport,
    /// `None` when `ĥ` vanishes on every node.
    pub frame_sequence: Option<MultCheckReport>,
    pub verdict: TranslateVerdict,
    pub consistent: bool,
}

pub fn classify_translates(
    gen: &Generator,
    ps: &PointSet,
    grid: &Arc<Grid>,
    opts: &MultOptions,
) -> Result<TranslateClassification> {
    if !gen.grid().same_as(grid) {
        return Err(Error::GridMismatch);
    }
    let exps = exponential_system(grid, ps)?;
    let phi = gen.hat();
    let frame = check_frame_multiplication(&exps, phi, opts)?;
    let bessel = check_bessel_multiplication(&exps, phi, opts)?;
    let frame_sequence = match check_frame_sequence_multiplication(&exps, phi, opts) {
        Ok(r) => Some(r),
        Err(Error::ZeroMultiplier) => None,
        Err(e) => return Err(e),
    };
    let verdict = if frame.measured.frame {
        TranslateVerdict::Frame
    } else if frame_sequence.as_ref().is_some_and(|r| r.measured.frame_sequence) {
        TranslateVerdict::FrameSequence
    } else {
        TranslateVerdict::BesselOnly
    };
    let consistent = frame.consistent
        && bessel.consistent
        && frame_sequence.as_ref().is_none_or(|r| r.consistent);
    Ok(TranslateClassification {
        generator: gen.label().to_string(),
        bessel,
        frame,
        frame_sequence,
        verdict,
        consistent,
    })
}

/// Lower frame bound of a translate system across refinements.
#[derive(Debug, Clone, Serialize)]
pub struct ObstructionReport {
    pub sweep: RefinementReport,
    /// Largest ratio of consecutive lower bounds.
    pub max_ratio: f64,
    /// Strictly decreasing with every ratio at most `ratio_cap`.
    pub obstructed: bool,
    pub ratio_cap: f64,
}

/// Measures the lower bound of `{e_λ ĥ}` at every level in `levels`.
/// `lattice(grid)` gives the frequencies and `hat(grid)` the samples of `ĥ`
/// for that resolution.
pub fn corollary_obstruction_demo<L, H>(
    domain: &crate::domain::Domain,
    levels: &[usize],
    lattice: L,
    hat: H,
    ratio_cap: f64,
    opts: &MultOptions,
) -> Result<ObstructionReport>
where
    L: Fn(&Arc<Grid>) -> Result<Vec<f64>> + Sync,
    H: Fn(&Arc<Grid>) -> Result<SampledFunction> + Sync,
{
    let sweep = refinement_sweep(levels, SweepQuantity::Lower, opts, |n| {
        let g = Arc::new(domain.grid(n)?);
        let lambdas = lattice(&g)?;
        let sys = exponential_system_from(&g, &lambdas)?;
        Ok((sys, hat(&g)?))
    })?;
    let max_ratio = sweep.ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let obstructed = sweep.measured_trend == Trend::Vanishing
        && sweep.ratios.iter().all(|&r| r.is_finite() && r <= ratio_cap);
    Ok(ObstructionReport {
        sweep,
        max_ratio,
        obstructed,
        ratio_cap,
    })
}

/// Integer frequencies `−N/2 .. N/2 − 1` scaled to an interval of length `L`:
/// the discrete Fourier basis of a single-interval grid.
pub fn fourier_lattice(grid: &Arc<Grid>) -> Result<Vec<f64>> {
    let ivs = grid.domain().intervals();
    if ivs.len() != 1 {
        return Err(Error::InvalidDomain("Fourier lattice needs a single interval".into()));
    }
    let n = grid.len();
    Ok((0..n).map(|k| (k as f64 - (n / 2) as f64) / ivs[0].len()).collect())
}

/// Frame sums of `{T_λ h}` against `f` computed on both sides of the
/// transform.
#[derive(Debug, Clone, Serialize)]
pub struct UnitarityReport {
    /// `Σ_k |⟨f, T_{λ_k} h⟩|²` by quadrature in time.
    pub time_sum: f64,
    /// `Σ_k |⟨f̂, e_{λ_k} ĥ⟩|²` on the frequency grid.
    pub freq_sum: f64,
    pub rel_diff: f64,
    /// Period `1/Δ` of the time-side trigonometric polynomials.
    pub period: f64,
    pub time_samples: usize,
}

/// The grid's nodes lie on a lattice of spacing `Δ`, so every time function
/// `Σ_i w_i f̂_i e^{2πiω_i x}` has frequencies differing by multiples of `Δ`
/// and inner products over one period `1/Δ` equal the frequency-side ones.
/// The time integral uses `2N` equispaced points, which is exact for those
/// polynomials.
pub fn dictionary_unitarity(f_hat: &SampledFunction, gen: &Generator, lambdas: &[f64]) -> Result<UnitarityReport> {
    let g = gen.grid();
    if !f_hat.grid().same_as(g) {
        return Err(Error::GridMismatch);
    }
    let step = g.alias_period().map(|p| 1.0 / p).ok_or_else(|| {
        Error::InvalidArgument("time-side check needs a uniform step".into())
    })?;
    let w0 = g.nodes()[0];
    let on_lattice = g.nodes().iter().all(|&w| {
        let k = (w - w0) / step;
        (k - k.round()).abs() <= 1e-9
    });
    if !on_lattice {
        return Err(Error::InvalidArgument(
            "time-side check needs all nodes on one lattice".into(),
        ));
    }
    let period = 1.0 / step;
    let m = 2 * g.len();
    let xs: Vec<f64> = (0..m).map(|j| j as f64 * period / m as f64).collect();
    let f_time: Vec<Complex64> = xs.par_iter().map(|&x| super::inverse_transform(f_hat, x)).collect();
    let dx = period / m as f64;

    let time_sum: f64 = lambdas
        .par_iter()
        .map(|&lam| {
            let ip: Complex64 = xs
                .iter()
                .zip(&f_time)
                .map(|(&x, fv)| fv * gen.time_eval(x - lam).conj())
                .sum::<Complex64>()
                * dx;
            ip.norm_sqr()
        })
        .sum();

    let freq_sum: f64 = exponential_system_from(g, lambdas)?
        .multiplied(gen.hat())?
        .analysis(f_hat)?
        .iter()
        .map(|c| c.norm_sqr())
        .sum();

    let scale = time_sum.abs().max(freq_sum.abs()).max(f64::MIN_POSITIVE);
    Ok(UnitarityReport {
        time_sum,
        freq_sum,
        rel_diff: (time_sum - freq_sum).abs() / scale,
        period,
        time_samples: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::framecore::measure_bounds;
    use crate::translates::random_band_limited;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn half_grid(n: usize) -> Arc<Grid> {
        Arc::new(Domain::interval(-0.5, 0.5).unwrap().grid(n).unwrap())
    }

    fn integers(n: usize) -> PointSet {
        PointSet::lattice_1d(-((n / 2) as f64), 1.0, n).unwrap()
    }

    #[test]
    fn indicator_translates_equal_exponentials() {
        let g = half_grid(32);
        let ps = integers(32);
        let a = translate_system(&Generator::indicator(&g), &ps, &g).unwrap();
        let b = exponential_system(&g, &ps).unwrap();
        assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn zero_generator_gives_zero_system() {
        let g = half_grid(16);
        let sys = translate_system(&Generator::from_fn(&g, "zero", |_| c(0.0)), &integers(16), &g).unwrap();
        assert!(sys.matrix().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn sinc_translates_are_orthonormal() {
        let g = half_grid(256);
        let sys = translate_system(&Generator::indicator(&g), &integers(256), &g).unwrap();
        let rep = measure_bounds(&sys).unwrap();
        assert_abs_diff_eq!(rep.lower, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(rep.upper, 1.0, epsilon = 1e-10);
        assert!(rep.flags.tight && rep.flags.frame_for_whole_space);
    }

    #[test]
    fn bounded_generator_is_frame_inside_envelope() {
        let g = half_grid(64);
        let gen = Generator::from_fn(&g, "wavy", |w| c(1.25 + 0.75 * (9.0 * w).cos()));
        let rep = classify_translates(&gen, &integers(64), &g, &MultOptions::default()).unwrap();
        assert_eq!(rep.verdict, TranslateVerdict::Frame);
        assert!(rep.consistent);
        let (m, big_m) = (rep.frame.base_report.lower, rep.frame.base_report.upper);
        assert!(rep.frame.mult_report.lower >= 0.25 * m - 1e-12);
        assert!(rep.frame.mult_report.upper <= 4.0 * big_m + 1e-12);
    }

    #[test]
    fn half_indicator_is_frame_sequence_only() {
        let g = half_grid(64);
        let gen = Generator::from_fn(&g, "half", |w| c(if w < 0.0 { 1.0 } else { 0.0 }));
        let rep = classify_translates(&gen, &integers(64), &g, &MultOptions::default()).unwrap();
        assert_eq!(rep.verdict, TranslateVerdict::FrameSequence);
        assert_eq!(rep.frame.mult_report.rank, 32);
        assert!(rep.consistent);
    }

    #[test]
    fn triangular_generator_lower_bound_quarters() {
        let e = Domain::interval(-0.5, 0.5).unwrap();
        let tri = |w: f64| c(1.0 - 2.0 * w.abs());
        let rep = corollary_obstruction_demo(&e, &[64, 128, 256], fourier_lattice, |g: &Arc<Grid>| Ok(g.sample(tri)), 0.6, &MultOptions::default()).unwrap();
        assert!(rep.obstructed);
        for l in &rep.sweep.levels {
            let d = 1.0 / l.n_per_unit as f64;
            assert_abs_diff_eq!(l.lambda_min, d * d, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(rep.max_ratio, 0.25, epsilon = 1e-9);

        let control = corollary_obstruction_demo(&e, &[64, 128, 256], fourier_lattice, |g: &Arc<Grid>| Ok(g.sample(|_| c(1.0))), 0.6, &MultOptions::default()).unwrap();
        assert!(!control.obstructed);
        assert_eq!(control.sweep.measured_trend, Trend::Stable);
    }

    #[test]
    fn time_and_frequency_frame_sums_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let g = half_grid(48);
        let e = g.domain().clone();
        for _ in 0..5 {
            let f = random_band_limited(&g, &e, 3, &mut rng);
            let h = Generator::new(random_band_limited(&g, &e, 2, &mut rng), "h");
            let lambdas: Vec<f64> = (0..12).map(|_| rng.random_range(-10.0..10.0)).collect();
            let rep = dictionary_unitarity(&f, &h, &lambdas).unwrap();
            assert!(rep.rel_diff <= 1e-10, "{rep:?}");
        }
    }

    #[test]
    fn plancherel_over_one_period() {
        let g = half_grid(40);
        let h = Generator::from_fn(&g, "h", |w| Complex64::new(w.cos(), w));
        let rep = dictionary_unitarity(h.hat(), &h, &[0.0]).unwrap();
        // ⟨h, h⟩ computed in time is |⟨ĥ, ĥ⟩|, i.e. ‖ĥ‖⁴
        assert_abs_diff_eq!(rep.time_sum.sqrt(), h.norm_sqr(), epsilon = 1e-12);
    }
}
