use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::Generator;
use crate::domain::Grid;
use crate::error::{Error, Result};
use crate::framecore::{exponential_system, measure_bounds_with, BoundsOptions, FrameReport, SampledFunction};
use crate::multiplication::{profile_multiplier, EnvelopeCheck, MultOptions};
use crate::pointset::PointSet;

/// Which statement about `f ∗ g` (transform `f̂ ĝ`) is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvolutionMode {
    /// Bessel factors give a Bessel product.
    Bessel,
    /// Frames for `P_E` give a frame for `P_E`.
    Frame,
    /// Frame sequences give a frame sequence.
    FrameSequence,
    /// Frames (or frame sequences) for `f` and `f ∗ g` give one for `g`.
    Quotient,
    /// A Bessel product and `|f̂| ≥ C` give a Bessel `g`.
    BesselQuotient,
}

/// Grid range of `|ĥ|`, over all nodes and over the support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub inf: f64,
    pub sup: f64,
    pub support_inf: f64,
    pub support_nodes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvolutionReport {
    pub mode: ConvolutionMode,
    /// Exponential frame bounds `[m, M]` on `L²(E)`.
    pub exponential: [f64; 2],
    pub f_range: Range,
    pub g_range: Range,
    pub product_range: Range,
    pub f_report: FrameReport,
    pub g_report: FrameReport,
    pub product_report: FrameReport,
    pub envelopes: Vec<EnvelopeCheck>,
    pub violations: Vec<String>,
    pub consistent: bool,
}

fn range(phi: &SampledFunction, opts: &MultOptions) -> Result<Range> {
    let p = profile_multiplier(phi.grid(), phi, opts.zero_tol)?;
    Ok(Range {
        inf: p.ess_inf,
        sup: p.ess_sup,
        support_inf: p.support_inf,
        support_nodes: p.support_nodes,
    })
}

/// Checks one part of the convolution statement on the grid. Bounds on the
/// transforms are read off the measured spectra: for a node `ω_i` and
/// exponential bounds `[m, M]`, a translate system with bounds `[α, β]`
/// satisfies `α/M ≤ |ĥ(ω_i)|² ≤ β/m`.
pub fn convolution_closure_check(
    gen_f: &Generator,
    gen_g: &Generator,
    ps: &PointSet,
    grid: &Arc<Grid>,
    mode: ConvolutionMode,
    opts: &MultOptions,
) -> Result<ConvolutionReport> {
    if !gen_f.grid().same_as(grid) || !gen_g.grid().same_as(grid) {
        return Err(Error::GridMismatch);
    }
    let bopts = BoundsOptions {
        rank_tol: opts.rank_tol,
        bessel_bound: None,
    };
    let exps = exponential_system(grid, ps)?;
    let product = gen_f.hat().mul(gen_g.hat())?;
    let sys_f = exps.multiplied(gen_f.hat())?;
    let sys_g = exps.multiplied(gen_g.hat())?;
    let sys_p = exps.multiplied(&product)?;
    let (e, (f, (g, p))) = rayon::join(
        || measure_bounds_with(&exps, &bopts),
        || {
            rayon::join(
                || measure_bounds_with(&sys_f, &bopts),
                || {
                    rayon::join(
                        || measure_bounds_with(&sys_g, &bopts),
                        || measure_bounds_with(&sys_p, &bopts),
                    )
                },
            )
        },
    );
    let (e, f_report, g_report, product_report) = (e?, f?, g?, p?);
    if !e.flags.frame_for_whole_space {
        return Err(Error::HypothesisViolated(
            "exponentials are not a frame of the grid space".into(),
        ));
    }
    let (m, big_m) = (e.lower, e.upper);
    let f_range = range(gen_f.hat(), opts)?;
    let g_range = range(gen_g.hat(), opts)?;
    let product_range = range(&product, opts)?;

    let mut envelopes = Vec::new();
    let mut violations = Vec::new();
    // |ĥ| range implied by a measured translate frame with bounds [α, β]
    let implied = |r: &FrameReport| ((r.lower / big_m).sqrt(), (r.upper / m).sqrt());

    match mode {
        ConvolutionMode::Bessel => {
            let b = f_range.sup * g_range.sup;
            envelopes.push(EnvelopeCheck::new("product upper", [0.0, big_m * b * b], [0.0, product_report.upper]));
            envelopes.push(EnvelopeCheck::new("product transform", [0.0, b], [0.0, product_range.sup]));
        }
        ConvolutionMode::Frame => {
            for (name, r) in [("f", &f_report), ("g", &g_report)] {
                if !r.flags.frame_for_whole_space {
                    return Err(Error::HypothesisViolated(format!("translates of {name} are not a frame")));
                }
            }
            let (a1, b1) = (f_range.inf, f_range.sup);
            let (a2, b2) = (g_range.inf, g_range.sup);
            envelopes.push(EnvelopeCheck::new(
                "product bounds",
                [m * (a1 * a2).powi(2), big_m * (b1 * b2).powi(2)],
                [product_report.lower, product_report.upper],
            ));
            if !product_report.flags.frame_for_whole_space {
                violations.push("product translates are not a frame".into());
            }
        }
        ConvolutionMode::FrameSequence => {
            for (name, r, rg) in [("f", &f_report, &f_range), ("g", &g_report, &g_range)] {
                if rg.support_nodes == 0 || r.rank != rg.support_nodes {
                    return Err(Error::HypothesisViolated(format!(
                        "translates of {name} are not a frame sequence"
                    )));
                }
            }
            if product_range.support_nodes == 0 {
                return Err(Error::ZeroMultiplier);
            }
            let lo = f_range.support_inf * g_range.support_inf;
            let hi = f_range.sup * g_range.sup;
            envelopes.push(EnvelopeCheck::new(
                "product frame-sequence bounds",
                [m * lo * lo, big_m * hi * hi],
                [product_report.lower, product_report.upper],
            ));
            if product_report.rank != product_range.support_nodes {
                violations.push(format!(
                    "product span has rank {} but support has {} nodes",
                    product_report.rank, product_range.support_nodes
                ));
            }
        }
        ConvolutionMode::Quotient => {
            let whole = f_report.flags.frame_for_whole_space && product_report.flags.frame_for_whole_space;
            if !whole {
                let seq = |r: &FrameReport, rg: &Range| rg.support_nodes > 0 && r.rank == rg.support_nodes;
                if !(seq(&f_report, &f_range) && seq(&product_report, &product_range)) {
                    return Err(Error::HypothesisViolated(
                        "translates of f and f*g must both be frames or both frame sequences".into(),
                    ));
                }
                // the quotient only determines ĝ where f̂ ĝ ≠ 0
                if g_range.support_nodes != product_range.support_nodes {
                    return Err(Error::HypothesisViolated(
                        "supp g_hat extends beyond supp (f_hat g_hat); g is unconstrained there".into(),
                    ));
                }
            }
            let (a1, b1) = implied(&f_report);
            let (a2, b2) = implied(&product_report);
            if a1 <= 0.0 {
                return Err(Error::NearZeroMultiplier(a1));
            }
            let measured_lo = if whole { g_range.inf } else { g_range.support_inf };
            envelopes.push(EnvelopeCheck::new("g transform", [a2 / b1, b2 / a1], [measured_lo, g_range.sup]));
            let g_ok = if whole {
                g_report.flags.frame_for_whole_space
            } else {
                g_range.support_nodes > 0 && g_report.rank == g_range.support_nodes
            };
            if !g_ok {
                violations.push("translates of g fail the recovered frame property".into());
            }
            let lo = a2 / b1;
            let hi = b2 / a1;
            envelopes.push(EnvelopeCheck::new(
                "g bounds",
                [m * lo * lo, big_m * hi * hi],
                [g_report.lower, g_report.upper],
            ));
        }
        ConvolutionMode::BesselQuotient => {
            let c = f_range.inf;
            if !opts.bounded_below(c, f_range.sup) {
                return Err(Error::NearZeroMultiplier(c));
            }
            let (_, b2) = implied(&product_report);
            envelopes.push(EnvelopeCheck::new("g transform", [0.0, b2 / c], [0.0, g_range.sup]));
            envelopes.push(EnvelopeCheck::new(
                "g upper",
                [0.0, big_m * (b2 / c).powi(2)],
                [0.0, g_report.upper],
            ));
        }
    }
    for env in &envelopes {
        if !env.contained {
            violations.push(format!(
                "{} [{:.6e}, {:.6e}] outside [{:.6e}, {:.6e}]",
                env.quantity, env.measured[0], env.measured[1], env.interval[0], env.interval[1]
            ));
        }
    }
    Ok(ConvolutionReport {
        mode,
        exponential: [m, big_m],
        f_range,
        g_range,
        product_range,
        f_report,
        g_report,
        product_report,
        consistent: violations.is_empty(),
        envelopes,
        violations,
    })
}
