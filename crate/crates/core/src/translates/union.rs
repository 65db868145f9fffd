use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::Generator;
use crate::domain::{Domain, Grid};
use crate::error::{Error, Result};
use crate::framecore::{exponential_system, measure_bounds_with, BoundsOptions, FrameReport, SynthesisSystem};
use crate::multiplication::{classify_trend, EnvelopeCheck, Trend};
use crate::pointset::PointSet;

/// One generator `h_j ∈ P_{E_j}`, sampled on the common grid over `⋃ E_j`.
#[derive(Debug, Clone)]
pub struct UnionPart {
    pub domain: Domain,
    pub generator: Generator,
}

#[derive(Debug, Clone)]
pub struct UnionSpec {
    pub parts: Vec<UnionPart>,
    pub frequencies: PointSet,
}

impl UnionSpec {
    /// Samples `hats[j]` on a grid over the union of `domains` at
    /// `n_per_unit`; each generator is cut off outside its own domain.
    pub fn sample(
        domains: &[Domain],
        hats: &[&dyn Fn(f64) -> Complex64],
        frequencies: PointSet,
        n_per_unit: usize,
    ) -> Result<Self> {
        if domains.is_empty() || domains.len() != hats.len() {
            return Err(Error::InvalidArgument("one generator per domain is required".into()));
        }
        let union = Domain::union(domains.iter().flat_map(|d| d.intervals().iter().copied()))?;
        let grid = Arc::new(union.grid(n_per_unit)?);
        let parts = domains
            .iter()
            .zip(hats)
            .enumerate()
            .map(|(j, (d, h))| UnionPart {
                domain: d.clone(),
                generator: Generator::from_fn(&grid, &format!("h{}", j + 1), |w| {
                    if d.contains(w) {
                        h(w)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }),
            })
            .collect();
        Ok(UnionSpec { parts, frequencies })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct UnionReport {
    pub report: FrameReport,
    /// Per-part bounds of `{e_λ χ_{E_j}}` on `L²(E_j)`.
    pub part_bounds: Vec<[f64; 2]>,
    pub m: f64,
    pub big_m: f64,
    /// Grid minimum and maximum of `Σ_j |ĥ_j|²` over `⋃ E_j`.
    pub p_hat: f64,
    pub big_p_hat: f64,
    pub predicted_frame: bool,
    pub measured_frame: bool,
    pub envelope: EnvelopeCheck,
    pub consistent: bool,
}

/// Measures `{T_λ h_j}_{λ, j}` through the stacked frequency system
/// `{e_λ χ_{E_j} ĥ_j}` and checks it against `[m·p, M·P]`.
pub fn union_check(spec: &UnionSpec, rank_tol: f64) -> Result<UnionReport> {
    let Some(first) = spec.parts.first() else {
        return Err(Error::InvalidArgument("union needs at least one part".into()));
    };
    let grid: Arc<Grid> = Arc::clone(first.generator.grid());
    if spec.parts.iter().any(|p| !p.generator.grid().same_as(&grid)) {
        return Err(Error::GridMismatch);
    }
    for p in &spec.parts {
        if !p.domain.is_subset_of(grid.domain()) {
            return Err(Error::InvalidDomain(format!("{} is outside the common grid", p.domain)));
        }
    }
    let opts = BoundsOptions {
        rank_tol,
        bessel_bound: None,
    };
    let exps = exponential_system(&grid, &spec.frequencies)?;

    let parts: Vec<(FrameReport, usize, SynthesisSystem)> = spec
        .parts
        .par_iter()
        .map(|p| {
            let ind = grid.sample_real(|w| if p.domain.contains(w) { 1.0 } else { 0.0 });
            let nodes = grid.mask(&p.domain).iter().filter(|&&m| m).count();
            let masked = exps.multiplied(&ind)?;
            let rep = measure_bounds_with(&masked, &opts)?;
            let members = masked.multiplied(p.generator.hat())?;
            Ok((rep, nodes, members))
        })
        .collect::<Result<_>>()?;

    let mut part_bounds = Vec::with_capacity(parts.len());
    for (j, (rep, nodes, _)) in parts.iter().enumerate() {
        if rep.rank != *nodes {
            return Err(Error::HypothesisViolated(format!(
                "exponentials are not a frame of L2 on part {} (rank {} of {nodes})",
                j + 1,
                rep.rank
            )));
        }
        part_bounds.push([rep.lower, rep.upper]);
    }
    let m = part_bounds.iter().map(|b| b[0]).fold(f64::INFINITY, f64::min);
    let big_m = part_bounds.iter().map(|b| b[1]).fold(0.0, f64::max);

    let mut stacked = parts[0].2.clone();
    for (_, _, sys) in &parts[1..] {
        stacked = stacked.stacked(sys)?;
    }
    let report = measure_bounds_with(&stacked, &opts)?;

    let sums: Vec<f64> = (0..grid.len())
        .map(|i| {
            let w = grid.nodes()[i];
            spec.parts
                .iter()
                .filter(|p| p.domain.contains(w))
                .map(|p| p.generator.hat().values()[i].norm_sqr())
                .sum()
        })
        .collect();
    let p_hat = sums.iter().copied().fold(f64::INFINITY, f64::min);
    let big_p_hat = sums.iter().copied().fold(0.0, f64::max);

    let predicted_frame = big_p_hat > 0.0 && m * p_hat > rank_tol * big_m * big_p_hat;
    let measured_frame = report.flags.frame_for_whole_space;
    let envelope = if predicted_frame {
        EnvelopeCheck::new("union bounds", [m * p_hat, big_m * big_p_hat], [report.lower, report.upper])
    } else {
        EnvelopeCheck::new("union upper", [0.0, big_m * big_p_hat], [0.0, report.upper])
    };
    Ok(UnionReport {
        consistent: predicted_frame == measured_frame && envelope.contained,
        report,
        part_bounds,
        m,
        big_m,
        p_hat,
        big_p_hat,
        predicted_frame,
        measured_frame,
        envelope,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct UnionSweepLevel {
    pub n_per_unit: usize,
    pub p_hat: f64,
    pub big_p_hat: f64,
    pub lambda_min: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnionSweepReport {
    pub levels: Vec<UnionSweepLevel>,
    pub predicted_trend: Trend,
    pub measured_trend: Trend,
    pub consistent: bool,
}

/// [`union_check`] at each resolution; compares the trend of `p̂` with the
/// trend of the smallest eigenvalue of the stacked frame operator.
pub fn union_refinement_sweep<B>(levels: &[usize], rank_tol: f64, build: B) -> Result<UnionSweepReport>
where
    B: Fn(usize) -> Result<UnionSpec> + Sync,
{
    if levels.len() < 2 {
        return Err(Error::InvalidArgument("a refinement sweep needs at least two levels".into()));
    }
    let levels: Vec<UnionSweepLevel> = levels
        .par_iter()
        .map(|&n| {
            let rep = union_check(&build(n)?, rank_tol)?;
            Ok(UnionSweepLevel {
                n_per_unit: n,
                p_hat: rep.p_hat,
                big_p_hat: rep.big_p_hat,
                lambda_min: rep.report.spectrum.first().copied().unwrap_or(0.0).max(0.0),
                upper: rep.report.upper,
            })
        })
        .collect::<Result<_>>()?;
    let p: Vec<f64> = levels.iter().map(|l| l.p_hat).collect();
    let lam: Vec<f64> = levels.iter().map(|l| l.lambda_min).collect();
    let scale = levels.iter().map(|l| l.upper).fold(0.0, f64::max);
    let predicted_trend = classify_trend(&p, 0.0);
    let measured_trend = classify_trend(&lam, 1e-12 * scale);
    Ok(UnionSweepReport {
        consistent: predicted_trend == measured_trend && predicted_trend != Trend::Indeterminate,
        levels,
        predicted_trend,
        measured_trend,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn integers(n: usize) -> PointSet {
        PointSet::lattice_1d(-((n / 2) as f64), 1.0, n).unwrap()
    }

    fn overlapping() -> Vec<Domain> {
        vec![Domain::interval(0.0, 1.0).unwrap(), Domain::interval(0.5, 1.5).unwrap()]
    }

    #[test]
    fn single_indicator_reduces_to_exponentials() {
        let d = vec![Domain::interval(-0.5, 0.5).unwrap()];
        let spec = UnionSpec::sample(&d, &[&|_| c(1.0)], integers(32), 32).unwrap();
        let rep = union_check(&spec, 1e-8).unwrap();
        assert_eq!((rep.p_hat, rep.big_p_hat), (1.0, 1.0));
        assert_abs_diff_eq!(rep.report.lower, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(rep.report.upper, 1.0, epsilon = 1e-10);
        assert!(rep.consistent);
    }

    #[test]
    fn two_overlapping_indicators() {
        let n = 32;
        let spec = UnionSpec::sample(&overlapping(), &[&|_| c(1.0), &|_| c(1.0)], integers(n), n).unwrap();
        let rep = union_check(&spec, 1e-8).unwrap();
        assert_eq!((rep.p_hat, rep.big_p_hat), (1.0, 2.0));
        for b in &rep.part_bounds {
            assert_abs_diff_eq!(b[0], 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(b[1], 1.0, epsilon = 1e-10);
        }
        assert!(rep.consistent && rep.measured_frame);
        // nodes covered once and twice are both present
        assert_abs_diff_eq!(rep.report.lower, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(rep.report.upper, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn common_zero_drives_lower_bound_to_zero() {
        let rep = union_refinement_sweep(&[32, 64, 128], 1e-8, |n| {
            UnionSpec::sample(&overlapping(), &[&|w: f64| c(1.0 - w), &|w: f64| c(w - 1.0)], integers(n), n)
        })
        .unwrap();
        assert_eq!(rep.predicted_trend, Trend::Vanishing);
        assert!(rep.consistent);
        for l in &rep.levels {
            // both vanish at ω = 1; the node at 1 + Δ/2 is covered by h2 alone
            let d = 0.5 / l.n_per_unit as f64;
            assert_abs_diff_eq!(l.p_hat, d * d, epsilon = 1e-14);
            assert_abs_diff_eq!(l.lambda_min, l.p_hat, epsilon = 1e-10);
        }
    }

    #[test]
    fn incompatible_parts_are_rejected() {
        let g1 = Arc::new(Domain::interval(0.0, 1.0).unwrap().grid(16).unwrap());
        let g2 = Arc::new(Domain::interval(0.0, 1.0).unwrap().grid(32).unwrap());
        let spec = UnionSpec {
            parts: vec![
                UnionPart { domain: g1.domain().clone(), generator: Generator::indicator(&g1) },
                UnionPart { domain: g2.domain().clone(), generator: Generator::indicator(&g2) },
            ],
            frequencies: integers(16),
        };
        assert!(matches!(union_check(&spec, 1e-8), Err(Error::GridMismatch)));
        let empty = UnionSpec { parts: vec![], frequencies: integers(4) };
        assert!(union_check(&empty, 1e-8).is_err());
    }
}
