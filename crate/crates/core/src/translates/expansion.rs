use std::sync::Arc;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{build_bump_generator, BumpSpec, Generator};
use crate::domain::{Domain, Grid};
use crate::error::{Error, Result};
use crate::framecore::{
    exponential_system, measure_bounds_with, reconstruct, BoundsOptions, FrameReport,
    ReconstructOptions, SampledFunction, SynthesisSystem,
};
use crate::pointset::PointSet;

/// Everything needed to expand elements of `P_E` in translates of the bump:
/// the grid over `E_δ`, the bump `g`, the enlarged frequency set `Λ′` and the
/// measured frame bounds of `{e_λ}` on `L²(E_δ)`.
#[derive(Debug, Clone)]
pub struct ExpansionContext {
    pub domain: Domain,
    pub grid: Arc<Grid>,
    pub generator: Generator,
    pub frequencies: PointSet,
    pub bounds: FrameReport,
    system: SynthesisSystem,
}

impl ExpansionContext {
    /// Checks that `{e_λ : λ ∈ Λ′}` is a frame of the grid space over `E_δ`.
    pub fn new(domain: &Domain, gen: Generator, frequencies: PointSet, rank_tol: f64) -> Result<Self> {
        let grid = Arc::clone(gen.grid());
        if !domain.is_subset_of(grid.domain()) {
            return Err(Error::InvalidDomain(format!(
                "{domain} is not inside the generator domain {}",
                grid.domain()
            )));
        }
        let system = exponential_system(&grid, &frequencies)?;
        let bounds = measure_bounds_with(
            &system,
            &BoundsOptions {
                rank_tol,
                bessel_bound: None,
            },
        )?;
        if !bounds.flags.frame_for_whole_space {
            return Err(Error::HypothesisViolated(format!(
                "exponentials over the enlarged set are not a frame of L2({}) (rank {} of {})",
                grid.domain(),
                bounds.rank,
                bounds.dim_space
            )));
        }
        Ok(ExpansionContext {
            domain: domain.clone(),
            grid,
            generator: gen,
            frequencies,
            bounds,
            system,
        })
    }

    /// Bump generator over `E_δ` at `n_per_unit` and the densified set
    /// `Λ′ ⊇ Λ` with gaps at most `target_gap`.
    pub fn prepare(
        spec: &BumpSpec,
        n_per_unit: usize,
        base: &PointSet,
        target_gap: f64,
        sep_min: f64,
        rank_tol: f64,
    ) -> Result<Self> {
        let grid = Arc::new(spec.dilated()?.grid(n_per_unit)?);
        let gen = build_bump_generator(spec, &grid)?;
        let dense = base.densify(target_gap, sep_min)?;
        Self::new(&spec.base_domain, gen, dense, rank_tol)
    }

    pub fn system(&self) -> &SynthesisSystem {
        &self.system
    }

    /// Expands `f̂` (supported in `E`) as `Σ α_k e_{λ′_k} ĝ`.
    pub fn expand(&self, f_hat: &SampledFunction, opts: &ReconstructOptions) -> Result<ExpansionReport> {
        if !f_hat.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        let outside: Vec<bool> = self.grid.nodes().iter().map(|&w| !self.domain.contains(w)).collect();
        let f_max = f_hat.abs_values().into_iter().fold(0.0, f64::max);
        if let Some((i, _)) = outside
            .iter()
            .zip(f_hat.values())
            .enumerate()
            .find(|(_, (&o, v))| o && v.norm() > 1e-14 * f_max)
        {
            return Err(Error::HypothesisViolated(format!(
                "f_hat is not supported in {}: nonzero at omega = {}",
                self.domain,
                self.grid.nodes()[i]
            )));
        }
        let f_norm = f_hat.norm();
        let rec = reconstruct(&self.system, f_hat, opts)?;
        let exp_sum = rec.synthesize(&self.system)?;

        let band_norm = masked_norm(&exp_sum, &outside);
        let approx = exp_sum.mul(self.generator.hat())?;
        let diff = f_hat.sub(&approx)?.norm();
        let rel = |x: f64| if f_norm > 0.0 { x / f_norm } else { x };

        let coeff_norm_sqr = rec.coeff_norm_sqr();
        let coeff_bound = if self.bounds.lower > 0.0 {
            f_hat.norm_sqr() / self.bounds.lower
        } else {
            f64::INFINITY
        };
        let mut warnings = Vec::new();
        if coeff_norm_sqr > coeff_bound * (1.0 + 1e-9) {
            warnings.push(format!(
                "coefficient energy {coeff_norm_sqr:.6e} exceeds frame bound {coeff_bound:.6e}"
            ));
        }
        Ok(ExpansionReport {
            lambdas: self.frequencies.coords_1d()?.to_vec(),
            coeffs: rec.coeffs,
            cg_residual: rec.residual,
            iterations: rec.iterations,
            band_residual: rel(band_norm),
            residual: rel(diff),
            coeff_norm_sqr,
            coeff_bound,
            lower_bound: self.bounds.lower,
            upper_bound: self.bounds.upper,
            warnings,
        })
    }

    /// `f̂ − Σ α_k e_{λ′_k} ĝ` summed in the order `perm`, relative to the
    /// same sum in the natural order.
    pub fn permutation_change(&self, report: &ExpansionReport, perm: &[usize]) -> Result<f64> {
        let natural = self.synthesize_with_generator(&report.coeffs)?;
        let permuted_sys = self.system.permuted(perm)?;
        let permuted_coeffs: Vec<Complex64> = perm.iter().map(|&k| report.coeffs[k]).collect();
        let permuted = permuted_sys.synthesize(&permuted_coeffs)?.mul(self.generator.hat())?;
        let scale = natural.norm().max(f64::MIN_POSITIVE);
        Ok(natural.sub(&permuted)?.norm() / scale)
    }

    /// Random reorderings of the summation; returns the largest relative change.
    pub fn max_permutation_change<R: Rng + ?Sized>(&self, report: &ExpansionReport, trials: usize, rng: &mut R) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let mut perm: Vec<usize> = (0..self.system.len()).collect();
            perm.shuffle(rng);
            worst = worst.max(self.permutation_change(report, &perm)?);
        }
        Ok(worst)
    }

    fn synthesize_with_generator(&self, coeffs: &[Complex64]) -> Result<SampledFunction> {
        self.system.synthesize(coeffs)?.mul(self.generator.hat())
    }

    /// Truncation error of `x ↦ Σ α_k g(x − λ′_k)` in max-norm over `window`
    /// when only `|λ′_k| ≤ R` is kept, for each `R` in `radii`, with the
    /// Cauchy–Schwarz bound `‖α‖₂ (Σ_{|λ′_k| > R} |g(x − λ′_k)|²)^{1/2}`.
    pub fn tail_profile(&self, report: &ExpansionReport, window: &[f64], radii: &[f64]) -> Result<TailReport> {
        let lambdas = &report.lambdas;
        let alpha_norm = report.coeff_norm_sqr.sqrt();
        // g(x − λ) for every window point and frequency
        let table: Vec<Vec<Complex64>> = window
            .par_iter()
            .map(|&x| lambdas.iter().map(|&l| self.generator.time_eval(x - l)).collect())
            .collect();
        let mut tails = Vec::with_capacity(radii.len());
        let mut bounds = Vec::with_capacity(radii.len());
        for &r in radii {
            let mut tail: f64 = 0.0;
            let mut bound: f64 = 0.0;
            for row in &table {
                let mut s = Complex64::new(0.0, 0.0);
                let mut e = 0.0;
                for ((&l, gv), a) in lambdas.iter().zip(row).zip(&report.coeffs) {
                    if l.abs() > r {
                        s += a * gv;
                        e += gv.norm_sqr();
                    }
                }
                tail = tail.max(s.norm());
                bound = bound.max(alpha_norm * e.sqrt());
            }
            tails.push(tail);
            bounds.push(bound);
        }
        let within_bound = tails.iter().zip(&bounds).all(|(t, b)| *t <= b * (1.0 + 1e-9) + 1e-15);
        let decreasing = tails.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-15);
        Ok(TailReport {
            radii: radii.to_vec(),
            tails,
            bounds,
            within_bound,
            decreasing,
        })
    }
}

fn masked_norm(f: &SampledFunction, mask: &[bool]) -> f64 {
    f.values()
        .iter()
        .zip(f.grid().weights())
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|((v, w), _)| v.norm_sqr() * w)
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpansionReport {
    pub lambdas: Vec<f64>,
    pub coeffs: Vec<Complex64>,
    /// Relative residual of `Σ α_k e_{λ′_k}` against `f̂` on `E_δ`.
    pub cg_residual: f64,
    pub iterations: usize,
    /// `‖Σ α_k e_{λ′_k}‖` on `E_δ ∖ E`, relative to `‖f̂‖`.
    pub band_residual: f64,
    /// `‖f̂ − Σ α_k e_{λ′_k} ĝ‖ / ‖f̂‖`.
    pub residual: f64,
    pub coeff_norm_sqr: f64,
    /// `‖f̂‖² / lower`.
    pub coeff_bound: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub warnings: Vec<String>,
}

impl ExpansionReport {
    /// CSV `lambda,re,im` of the coefficients.
    pub fn write_coeffs_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["lambda", "re", "im"])?;
        for (l, a) in self.lambdas.iter().zip(&self.coeffs) {
            w.write_record([l.to_string(), a.re.to_string(), a.im.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TailReport {
    pub radii: Vec<f64>,
    pub tails: Vec<f64>,
    pub bounds: Vec<f64>,
    pub within_bound: bool,
    pub decreasing: bool,
}

/// One-shot form of [`ExpansionContext::expand`].
pub fn oversampled_expansion(
    f_hat: &SampledFunction,
    domain: &Domain,
    gen: &Generator,
    ps_prime: &PointSet,
    opts: &ReconstructOptions,
    rank_tol: f64,
) -> Result<ExpansionReport> {
    ExpansionContext::new(domain, gen.clone(), ps_prime.clone(), rank_tol)?.expand(f_hat, opts)
}

/// Bounds of `{P(T_{λ′_k} g)}` on `P_E` next to those of `{e_{λ′_k}}` on
/// `L²(E)` and of the unprojected system.
#[derive(Debug, Clone, Serialize)]
pub struct OuterFrameReport {
    /// Members restricted to the nodes in `E`, measured on that subspace.
    pub projected: FrameReport,
    /// `{e_{λ′_k}}` on a grid of `E` itself.
    pub exponential_on_e: FrameReport,
    /// `{e_{λ′_k} ĝ}` on all of `E_δ`.
    pub unprojected: FrameReport,
    /// Grid of `E` coincides with the nodes of the `E_δ` grid inside `E`.
    pub aligned: bool,
    pub nodes_in_e: usize,
    pub lower_diff: f64,
    pub upper_diff: f64,
    pub consistent: bool,
}

/// Projects `{e_{λ′_k} ĝ}` onto `L²(E)` by restriction and measures it.
pub fn projected_bounds(gen: &Generator, ps_prime: &PointSet, domain: &Domain, rank_tol: f64) -> Result<OuterFrameReport> {
    let grid = gen.grid();
    let mask = grid.mask(domain);
    let nodes_in_e = mask.iter().filter(|&&m| m).count();
    if nodes_in_e == 0 {
        return Err(Error::InvalidDomain(format!("no grid nodes in {domain}")));
    }
    let indicator = grid.sample_real(|w| if domain.contains(w) { 1.0 } else { 0.0 });
    let exps = exponential_system(grid, ps_prime)?;
    let full = exps.multiplied(gen.hat())?;
    let projected = full.multiplied(&indicator)?;
    let opts = BoundsOptions {
        rank_tol,
        bessel_bound: None,
    };

    // a grid of E built directly, when its nodes are those of the E_δ grid
    let own = Arc::new(domain.grid(grid.n_per_unit())?);
    let inside: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(&mask)
        .filter(|(_, &m)| m)
        .map(|(&w, _)| w)
        .collect();
    let aligned = own.len() == inside.len()
        && own.nodes().iter().zip(&inside).all(|(a, b)| (a - b).abs() <= 1e-12);
    let reference = if aligned {
        exponential_system(&own, ps_prime)?
    } else {
        exps.multiplied(&indicator)?
    };

    let (p, (r, u)) = rayon::join(
        || measure_bounds_with(&projected, &opts),
        || {
            rayon::join(
                || measure_bounds_with(&reference, &opts),
                || measure_bounds_with(&full, &opts),
            )
        },
    );
    let (projected, exponential_on_e, unprojected) = (p?, r?, u?);
    let lower_diff = (projected.lower - exponential_on_e.lower).abs();
    let upper_diff = (projected.upper - exponential_on_e.upper).abs();
    let consistent = projected.rank == nodes_in_e && exponential_on_e.rank == nodes_in_e;
    Ok(OuterFrameReport {
        projected,
        exponential_on_e,
        unprojected,
        aligned,
        nodes_in_e,
        lower_diff,
        upper_diff,
        consistent,
    })
}

/// [`projected_bounds`] for a generator with `ĝ = 1` on `E`: the projected
/// system must reproduce the exponential bounds on `E` to `1e-10`.
pub fn outer_frame_check(gen: &Generator, ps_prime: &PointSet, domain: &Domain, rank_tol: f64) -> Result<OuterFrameReport> {
    let grid = gen.grid();
    for (w, v) in grid.nodes().iter().zip(gen.hat().values()) {
        if domain.contains(*w) && (v - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::NotBumpGenerator {
                omega: *w,
                value: v.norm(),
            });
        }
    }
    let mut rep = projected_bounds(gen, ps_prime, domain, rank_tol)?;
    let tol = 1e-10 * rep.exponential_on_e.upper.max(1.0);
    rep.consistent = rep.consistent && rep.lower_diff <= tol && rep.upper_diff <= tol;
    Ok(rep)
}
