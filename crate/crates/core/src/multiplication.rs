//! Multiplying a frame of `L²(E)` by a function `φ`.
//!
//! Every check predicts the status of `{φ ψ_k}` from the range of `|φ|` on
//! the grid, measures it spectrally and compares the two. When the base
//! frame operator is `S`, the multiplied one is `f ↦ φ S(φ̄ f)`, so bounds
//! `m ≤ S ≤ M` give `m·inf|φ|² ≤ S_φ ≤ M·sup|φ|²` on the grid.
//!
//! Whether `φ` is bounded below almost everywhere cannot be read off one
//! grid. [`refinement_sweep`] repeats a measurement over successively finer
//! grids and classifies the trend of the grid infimum against the trend of
//! the measured bound.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{Domain, Grid};
use crate::error::{Error, Result};
use crate::framecore::{
    fourier_basis, measure_bounds_with, BoundsOptions, FrameReport, SampledFunction,
    SynthesisSystem, DEFAULT_RANK_TOL, TIGHT_TOL,
};

pub const DEFAULT_ZERO_TOL: f64 = 1e-12;
/// Relative spread under which a refinement sequence counts as stable.
pub const STABLE_SPREAD: f64 = 0.05;
pub const DEFAULT_LEVELS: [usize; 3] = [64, 128, 256];
/// Relative slack used when comparing measured bounds against envelopes.
const ENVELOPE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultOptions {
    pub rank_tol: f64,
    /// Support threshold relative to `max |φ|`.
    pub zero_tol: f64,
}

impl Default for MultOptions {
    fn default() -> Self {
        MultOptions {
            rank_tol: DEFAULT_RANK_TOL,
            zero_tol: DEFAULT_ZERO_TOL,
        }
    }
}

impl MultOptions {
    fn bounds(&self) -> BoundsOptions {
        BoundsOptions {
            rank_tol: self.rank_tol,
            bessel_bound: None,
        }
    }

    /// Grid-level "bounded below": `inf² > rank_tol · sup²`, the cut the
    /// spectral rank applies to a tight base.
    pub fn bounded_below(&self, inf: f64, sup: f64) -> bool {
        sup > 0.0 && inf * inf > self.rank_tol * sup * sup
    }
}

/// Range of `|φ|` over the grid nodes.
#[derive(Debug, Clone, Serialize)]
pub struct MultiplierProfile {
    #[serde(skip)]
    pub phi: SampledFunction,
    pub ess_inf: f64,
    pub ess_sup: f64,
    /// Infimum of `|φ|` over the support nodes (0 if there are none).
    pub support_inf: f64,
    /// Share of the quadrature weight on nodes where `|φ| ≤ zero_tol · ess_sup`.
    pub zero_measure_fraction: f64,
    /// Union of the grid cells where `|φ|` exceeds the threshold.
    pub support_domain: Option<Domain>,
    pub support_nodes: usize,
    pub zero_tol: f64,
}

impl MultiplierProfile {
    /// Node mask of the support.
    pub fn support_mask(&self) -> Vec<bool> {
        let cut = self.zero_tol * self.ess_sup;
        self.phi
            .values()
            .iter()
            .map(|v| self.ess_sup > 0.0 && v.norm() > cut)
            .collect()
    }
}

pub fn profile_multiplier(g: &Grid, phi: &SampledFunction, zero_tol: f64) -> Result<MultiplierProfile> {
    if !phi.grid().same_as(g) {
        return Err(Error::GridMismatch);
    }
    let abs = phi.abs_values();
    let ess_inf = abs.iter().copied().fold(f64::INFINITY, f64::min);
    let ess_sup = abs.iter().copied().fold(0.0, f64::max);
    let cut = zero_tol * ess_sup;
    let mask: Vec<bool> = abs.iter().map(|&a| ess_sup > 0.0 && a > cut).collect();
    let zero_weight: f64 = mask
        .iter()
        .zip(g.weights())
        .filter(|(&m, _)| !m)
        .map(|(_, w)| w)
        .sum();
    let total: f64 = g.weights().iter().sum();
    let support_inf = abs
        .iter()
        .zip(&mask)
        .filter(|(_, &m)| m)
        .map(|(&a, _)| a)
        .fold(f64::INFINITY, f64::min);
    let support_nodes = mask.iter().filter(|&&m| m).count();
    Ok(MultiplierProfile {
        phi: phi.clone(),
        ess_inf,
        ess_sup,
        support_inf: if support_nodes == 0 { 0.0 } else { support_inf },
        zero_measure_fraction: (zero_weight / total).clamp(0.0, 1.0),
        support_domain: g.cells_domain(&mask),
        support_nodes,
        zero_tol,
    })
}

/// `{φ ψ_k}` with labels preserved.
pub fn multiply_system(sys: &SynthesisSystem, phi: &SampledFunction) -> Result<SynthesisSystem> {
    sys.multiplied(phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Frame,
    Tight,
    Riesz,
    Bessel,
    Converse,
    FrameSequence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MultFlags {
    pub frame: bool,
    pub tight: bool,
    pub riesz: bool,
    pub bessel: bool,
    pub frame_sequence: bool,
    pub complete: bool,
}

impl MultFlags {
    fn get(&self, name: &str) -> bool {
        match name {
            "frame" => self.frame,
            "tight" => self.tight,
            "riesz" => self.riesz,
            "bessel" => self.bessel,
            "frame_sequence" => self.frame_sequence,
            "complete" => self.complete,
            _ => unreachable!("unknown flag {name}"),
        }
    }
}

/// Measured pair of numbers tested against a predicted interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeCheck {
    pub quantity: String,
    pub interval: [f64; 2],
    pub measured: [f64; 2],
    pub contained: bool,
}

impl EnvelopeCheck {
    pub fn new(quantity: &str, interval: [f64; 2], measured: [f64; 2]) -> Self {
        let slack = ENVELOPE_SLACK * interval[1].abs().max(measured[1].abs());
        let contained = measured[0] >= interval[0] - slack && measured[1] <= interval[1] + slack;
        EnvelopeCheck {
            quantity: quantity.into(),
            interval,
            measured,
            contained,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MultCheckReport {
    pub check: CheckKind,
    pub profile: MultiplierProfile,
    /// For the converse check this is the recovered system `{ψ_k}`.
    pub base_report: FrameReport,
    pub mult_report: FrameReport,
    pub predicted: MultFlags,
    pub measured: MultFlags,
    /// Flags that enter the verdict for this check.
    pub compared: Vec<String>,
    /// `[m · ess_inf², M · ess_sup²]` from the base bounds.
    pub envelope: [f64; 2],
    pub envelope_check: Option<EnvelopeCheck>,
    pub mismatches: Vec<String>,
    pub consistent: bool,
}

fn predict(base: &FrameReport, p: &MultiplierProfile, opts: &MultOptions) -> MultFlags {
    let whole = base.flags.frame_for_whole_space;
    // the multiplied spectrum sits in [m·inf², M·sup²]; a lower end clear of
    // the rank cut guarantees full rank
    let clear = |lo: f64, hi: f64| hi > 0.0 && lo > opts.rank_tol * hi;
    let (inf2, sup2, supp2) = (p.ess_inf.powi(2), p.ess_sup.powi(2), p.support_inf.powi(2));
    MultFlags {
        frame: whole && clear(base.lower * inf2, base.upper * sup2),
        tight: whole
            && base.flags.tight
            && p.ess_inf > 0.0
            && p.ess_sup - p.ess_inf <= TIGHT_TOL * p.ess_sup,
        riesz: base.flags.riesz_sequence && clear(base.gram_min * inf2, base.gram_max * sup2),
        bessel: true,
        frame_sequence: whole && p.support_nodes > 0 && clear(base.lower * supp2, base.upper * sup2),
        complete: whole && p.zero_measure_fraction == 0.0,
    }
}

fn measure(base: &FrameReport, mult: &FrameReport, p: &MultiplierProfile) -> MultFlags {
    let bessel_cap = base.upper * p.ess_sup * p.ess_sup;
    MultFlags {
        frame: mult.flags.frame_for_whole_space,
        tight: mult.flags.frame_for_whole_space && mult.flags.tight,
        riesz: mult.flags.riesz_sequence,
        bessel: mult.upper <= bessel_cap * (1.0 + ENVELOPE_SLACK),
        // span of {φψ_k} is exactly the grid functions supported on F
        frame_sequence: p.support_nodes > 0 && mult.rank == p.support_nodes,
        complete: mult.rank == mult.dim_space,
    }
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    check: CheckKind,
    profile: MultiplierProfile,
    base_report: FrameReport,
    mult_report: FrameReport,
    predicted: MultFlags,
    measured: MultFlags,
    compared: &[&str],
    envelope_check: Option<EnvelopeCheck>,
) -> MultCheckReport {
    let envelope = [
        base_report.lower * profile.ess_inf * profile.ess_inf,
        base_report.upper * profile.ess_sup * profile.ess_sup,
    ];
    let mut mismatches: Vec<String> = compared
        .iter()
        .filter(|f| predicted.get(f) != measured.get(f))
        .map(|f| format!("{f}: predicted {} measured {}", predicted.get(f), measured.get(f)))
        .collect();
    if let Some(e) = &envelope_check {
        if !e.contained {
            mismatches.push(format!(
                "{} [{:.6e}, {:.6e}] outside [{:.6e}, {:.6e}]",
                e.quantity, e.measured[0], e.measured[1], e.interval[0], e.interval[1]
            ));
        }
    }
    MultCheckReport {
        check,
        profile,
        base_report,
        mult_report,
        predicted,
        measured,
        compared: compared.iter().map(|s| s.to_string()).collect(),
        envelope,
        consistent: mismatches.is_empty(),
        envelope_check,
        mismatches,
    }
}

struct Measured {
    profile: MultiplierProfile,
    base: FrameReport,
    mult: FrameReport,
}

fn measure_pair(sys: &SynthesisSystem, phi: &SampledFunction, opts: &MultOptions) -> Result<Measured> {
    let profile = profile_multiplier(sys.grid(), phi, opts.zero_tol)?;
    let mult_sys = multiply_system(sys, phi)?;
    let (base, mult) = rayon::join(
        || measure_bounds_with(sys, &opts.bounds()),
        || measure_bounds_with(&mult_sys, &opts.bounds()),
    );
    Ok(Measured {
        profile,
        base: base?,
        mult: mult?,
    })
}

fn bounds_envelope(name: &str, m: &Measured) -> EnvelopeCheck {
    let p = &m.profile;
    EnvelopeCheck::new(
        name,
        [m.base.lower * p.ess_inf * p.ess_inf, m.base.upper * p.ess_sup * p.ess_sup],
        [m.mult.lower, m.mult.upper],
    )
}

/// Frame of `L²(E)` under multiplication: `{φψ_k}` is a frame exactly when
/// `|φ|` is bounded above and below; the multiplied bounds then lie in
/// `[m·inf|φ|², M·sup|φ|²]`.
pub fn check_frame_multiplication(
    sys: &SynthesisSystem,
    phi: &SampledFunction,
    opts: &MultOptions,
) -> Result<MultCheckReport> {
    let m = measure_pair(sys, phi, opts)?;
    if !m.base.flags.frame_for_whole_space {
        return Err(Error::HypothesisViolated(format!(
            "base system is not a frame of the grid space (rank {} of {})",
            m.base.rank, m.base.dim_space
        )));
    }
    let predicted = predict(&m.base, &m.profile, opts);
    let measured = measure(&m.base, &m.mult, &m.profile);
    let env = predicted.frame.then(|| bounds_envelope("frame bounds", &m));
    Ok(assemble(
        CheckKind::Frame,
        m.profile,
        m.base,
        m.mult,
        predicted,
        measured,
        &["frame", "complete"],
        env,
    ))
}

/// A tight frame stays tight exactly when `|φ|` is constant.
pub fn check_tight_multiplication(
    sys: &SynthesisSystem,
    phi: &SampledFunction,
    opts: &MultOptions,
) -> Result<MultCheckReport> {
    let m = measure_pair(sys, phi, opts)?;
    if !(m.base.flags.tight && m.base.flags.frame_for_whole_space) {
        return Err(Error::HypothesisViolated("base system is not a tight frame".into()));
    }
    let predicted = predict(&m.base, &m.profile, opts);
    let measured = measure(&m.base, &m.mult, &m.profile);
    let env = predicted.frame.then(|| bounds_envelope("frame bounds", &m));
    Ok(assemble(
        CheckKind::Tight,
        m.profile,
        m.base,
        m.mult,
        predicted,
        measured,
        &["tight"],
        env,
    ))
}

/// Riesz bases map to Riesz bases under a bounded invertible multiplier. The
/// Gram extremes of `{φψ_k}` lie in `[g_min·inf|φ|², g_max·sup|φ|²]`.
pub fn check_riesz_multiplication(
    sys: &SynthesisSystem,
    phi: &SampledFunction,
    opts: &MultOptions,
) -> Result<MultCheckReport> {
    let m = measure_pair(sys, phi, opts)?;
    if !(m.base.flags.riesz_sequence && m.base.rank == m.base.dim_space) {
        return Err(Error::HypothesisViolated("base system is not a Riesz basis".into()));
    }
    let predicted = predict(&m.base, &m.profile, opts);
    let measured = measure(&m.base, &m.mult, &m.profile);
    let p = &m.profile;
    let env = predicted.riesz.then(|| {
        EnvelopeCheck::new(
            "gram extremes",
            [m.base.gram_min * p.ess_inf * p.ess_inf, m.base.gram_max * p.ess_sup * p.ess_sup],
            [m.mult.gram_min, m.mult.gram_max],
        )
    });
    Ok(assemble(
        CheckKind::Riesz,
        m.profile,
        m.base,
        m.mult,
        predicted,
        measured,
        &["riesz"],
        env,
    ))
}

/// Upper bound `M · sup|φ|²` for `{φψ_k}`. No hypothesis on the base beyond
/// its own upper bound `M`.
pub fn check_bessel_multiplication(
    sys: &SynthesisSystem,
    phi: &SampledFunction,
    opts: &MultOptions,
) -> Result<MultCheckReport> {
    let m = measure_pair(sys, phi, opts)?;
    let predicted = predict(&m.base, &m.profile, opts);
    let measured = measure(&m.base, &m.mult, &m.profile);
    let p = &m.profile;
    let env = EnvelopeCheck::new(
        "upper bound",
        [0.0, m.base.upper * p.ess_sup * p.ess_sup],
        [0.0, m.mult.upper],
    );
    Ok(assemble(
        CheckKind::Bessel,
        m.profile,
        m.base,
        m.mult,
        predicted,
        measured,
        &["bessel"],
        Some(env),
    ))
}

/// Recovers `{ψ_k}` from a multiplied frame `{φψ_k}` by dividing by `φ` on its
/// support, and checks the recovered bounds against `[α/sup|φ|², β/inf|φ|²]`.
pub fn check_converse(
    sys_mult: &SynthesisSystem,
    phi: &SampledFunction,
    opts: &MultOptions,
) -> Result<MultCheckReport> {
    let profile = profile_multiplier(sys_mult.grid(), phi, opts.zero_tol)?;
    if !opts.bounded_below(profile.ess_inf, profile.ess_sup) {
        return Err(Error::NearZeroMultiplier(profile.ess_inf));
    }
    let cut = profile.zero_tol * profile.ess_sup;
    let members = sys_mult
        .members()
        .iter()
        .map(|m| m.zip_with(phi, |a, b| if b.norm() > cut { a / b } else { Complex64::new(0.0, 0.0) }))
        .collect::<Result<Vec<_>>>()?;
    let recovered = SynthesisSystem::new(
        Arc::clone(sys_mult.grid_arc()),
        members,
        sys_mult.labels().to_vec(),
    )?;
    let (mult, base) = rayon::join(
        || measure_bounds_with(sys_mult, &opts.bounds()),
        || measure_bounds_with(&recovered, &opts.bounds()),
    );
    let (mult, base) = (mult?, base?);
    if !mult.flags.frame_for_whole_space {
        return Err(Error::HypothesisViolated(
            "multiplied system is not a frame of the grid space".into(),
        ));
    }
    let predicted = MultFlags {
        frame: true,
        bessel: true,
        complete: true,
        ..MultFlags::default()
    };
    let measured = MultFlags {
        frame: base.flags.frame_for_whole_space,
        tight: base.flags.tight,
        riesz: base.flags.riesz_sequence,
        bessel: true,
        frame_sequence: base.flags.frame_sequence,
        complete: base.rank == base.dim_space,
    };
    let env = EnvelopeCheck::new(
        "recovered bounds",
        [
            mult.lower / (profile.ess_sup * profile.ess_sup),
            mult.upper / (profile.ess_inf * profile.ess_inf),
        ],
        [base.lower, base.upper],
    );
    Ok(assemble(
        CheckKind::Converse,
        profile,
        base,
        mult,
        predicted,
        measured,
        &["frame", "complete"],
        Some(env),
    ))
}

/// `{φψ_k}` spans exactly the functions supported on `F = supp φ`, and is a
/// frame for that span when `|φ|` is bounded below on `F`.
pub fn check_frame_sequence_multiplication(
    sys: &SynthesisSystem,
    phi: &SampledFunction,
    opts: &MultOptions,
) -> Result<MultCheckReport> {
    let m = measure_pair(sys, phi, opts)?;
    if !m.base.flags.frame_for_whole_space {
        return Err(Error::HypothesisViolated(
            "base system is not a frame of the grid space".into(),
        ));
    }
    if m.profile.support_nodes == 0 {
        return Err(Error::ZeroMultiplier);
    }
    let predicted = predict(&m.base, &m.profile, opts);
    let measured = measure(&m.base, &m.mult, &m.profile);
    let p = &m.profile;
    let env = predicted.frame_sequence.then(|| {
        EnvelopeCheck::new(
            "frame sequence bounds",
            [m.base.lower * p.support_inf * p.support_inf, m.base.upper * p.ess_sup * p.ess_sup],
            [m.mult.lower, m.mult.upper],
        )
    });
    Ok(assemble(
        CheckKind::FrameSequence,
        m.profile,
        m.base,
        m.mult,
        predicted,
        measured,
        &["frame_sequence"],
        env,
    ))
}

pub fn run_check(
    kind: CheckKind,
    sys: &SynthesisSystem,
    phi: &SampledFunction,
    opts: &MultOptions,
) -> Result<MultCheckReport> {
    match kind {
        CheckKind::Frame => check_frame_multiplication(sys, phi, opts),
        CheckKind::Tight => check_tight_multiplication(sys, phi, opts),
        CheckKind::Riesz => check_riesz_multiplication(sys, phi, opts),
        CheckKind::Bessel => check_bessel_multiplication(sys, phi, opts),
        CheckKind::Converse => check_converse(&multiply_system(sys, phi)?, phi, opts),
        CheckKind::FrameSequence => check_frame_sequence_multiplication(sys, phi, opts),
    }
}

/// The frame-sequence verdict for a compactly supported `φ` computed on `E`
/// and again on a larger interval containing `E`.
#[derive(Debug, Clone, Serialize)]
pub struct DomainInvarianceReport {
    pub domain: Domain,
    pub enlarged: Domain,
    pub on_domain: MultCheckReport,
    pub on_enlarged: MultCheckReport,
    pub verdict_invariant: bool,
    pub consistent: bool,
}

/// Runs [`check_frame_sequence_multiplication`] with the Fourier basis of
/// `domain` and of `enlarged`. `φ` must vanish on `enlarged ∖ domain`.
pub fn check_frame_sequence_domain_invariance<F>(
    domain: &Domain,
    enlarged: &Domain,
    n_per_unit: usize,
    phi: F,
    opts: &MultOptions,
) -> Result<DomainInvarianceReport>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    if !domain.is_subset_of(enlarged) {
        return Err(Error::InvalidDomain(format!("{domain} is not contained in {enlarged}")));
    }
    let g_in = Arc::new(domain.grid(n_per_unit)?);
    let g_out = Arc::new(enlarged.grid(n_per_unit)?);
    let phi_out = g_out.sample(&phi);
    let sup = phi_out.abs_values().into_iter().fold(0.0, f64::max);
    let leak = g_out
        .nodes()
        .iter()
        .zip(phi_out.values())
        .filter(|(&t, _)| !domain.contains(t))
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max);
    if leak > opts.zero_tol * sup {
        return Err(Error::HypothesisViolated(format!(
            "multiplier does not vanish outside {domain} (|phi| up to {leak:.3e})"
        )));
    }
    let (a, b) = rayon::join(
        || {
            let base = fourier_basis(&g_in)?;
            check_frame_sequence_multiplication(&base, &g_in.sample(&phi), opts)
        },
        || {
            let base = fourier_basis(&g_out)?;
            check_frame_sequence_multiplication(&base, &phi_out, opts)
        },
    );
    let (on_domain, on_enlarged) = (a?, b?);
    let verdict_invariant = on_domain.predicted.frame_sequence == on_enlarged.predicted.frame_sequence
        && on_domain.measured.frame_sequence == on_enlarged.measured.frame_sequence;
    Ok(DomainInvarianceReport {
        domain: domain.clone(),
        enlarged: enlarged.clone(),
        consistent: verdict_invariant && on_domain.consistent && on_enlarged.consistent,
        verdict_invariant,
        on_domain,
        on_enlarged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Stable,
    Vanishing,
    Growing,
    Indeterminate,
}

/// Classifies a sequence measured on successively finer grids.
///
/// Values at or below `floor` are treated as zero; an all-zero sequence is
/// `Vanishing`.
pub fn classify_trend(values: &[f64], floor: f64) -> Trend {
    if values.len() < 2 {
        return Trend::Indeterminate;
    }
    let v: Vec<f64> = values.iter().map(|&x| if x <= floor { 0.0 } else { x }).collect();
    let max = v.iter().copied().fold(0.0, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        return Trend::Vanishing;
    }
    if max - min <= STABLE_SPREAD * max {
        return Trend::Stable;
    }
    if v.windows(2).all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0)) {
        return Trend::Vanishing;
    }
    if v.windows(2).all(|w| w[1] > w[0]) {
        return Trend::Growing;
    }
    Trend::Indeterminate
}

/// Which spectral number a sweep follows, and which profile number predicts
/// it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepQuantity {
    /// Smallest eigenvalue of the frame operator, against `inf |φ|`.
    Lower,
    /// Smallest retained eigenvalue, against `inf |φ|` over the support.
    SupportLower,
    /// Smallest Gram eigenvalue, against `inf |φ|`.
    GramMin,
    /// Largest eigenvalue, against `sup |φ|`.
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementLevel {
    pub n_per_unit: usize,
    pub nodes: usize,
    pub ess_inf: f64,
    pub ess_sup: f64,
    pub support_inf: f64,
    pub lambda_min: f64,
    pub lower: f64,
    pub upper: f64,
    pub gram_min: f64,
    pub gram_max: f64,
    pub rank: usize,
}

impl RefinementLevel {
    fn predictor(&self, q: SweepQuantity) -> f64 {
        match q {
            SweepQuantity::Lower | SweepQuantity::GramMin => self.ess_inf,
            SweepQuantity::SupportLower => self.support_inf,
            SweepQuantity::Upper => self.ess_sup,
        }
    }

    fn measured(&self, q: SweepQuantity) -> f64 {
        match q {
            SweepQuantity::Lower => self.lambda_min,
            SweepQuantity::SupportLower => self.lower,
            SweepQuantity::GramMin => self.gram_min,
            SweepQuantity::Upper => self.upper,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub quantity: SweepQuantity,
    pub levels: Vec<RefinementLevel>,
    pub predicted_trend: Trend,
    pub measured_trend: Trend,
    /// Ratio of consecutive measured values.
    pub ratios: Vec<f64>,
    /// `Some(true)` for a stable infimum, `Some(false)` for a vanishing one.
    pub bounded_below: Option<bool>,
    pub consistent: bool,
}

/// Measures `{φψ_k}` at every level. `build(n_per_unit)` returns the base
/// system and the sampled multiplier for that resolution. Levels run
/// concurrently; the report lists them in the given order.
pub fn refinement_sweep<B>(
    levels: &[usize],
    quantity: SweepQuantity,
    opts: &MultOptions,
    build: B,
) -> Result<RefinementReport>
where
    B: Fn(usize) -> Result<(SynthesisSystem, SampledFunction)> + Sync,
{
    if levels.len() < 2 {
        return Err(Error::InvalidArgument("a refinement sweep needs at least two levels".into()));
    }
    let measured: Vec<RefinementLevel> = levels
        .par_iter()
        .map(|&n| {
            let (sys, phi) = build(n)?;
            let m = measure_pair(&sys, &phi, opts)?;
            Ok(RefinementLevel {
                n_per_unit: n,
                nodes: sys.grid().len(),
                ess_inf: m.profile.ess_inf,
                ess_sup: m.profile.ess_sup,
                support_inf: m.profile.support_inf,
                lambda_min: m.mult.spectrum.first().copied().unwrap_or(0.0).max(0.0),
                lower: m.mult.lower,
                upper: m.mult.upper,
                gram_min: m.mult.gram_min,
                gram_max: m.mult.gram_max,
                rank: m.mult.rank,
            })
        })
        .collect::<Result<_>>()?;

    let pred: Vec<f64> = measured.iter().map(|l| l.predictor(quantity)).collect();
    let meas: Vec<f64> = measured.iter().map(|l| l.measured(quantity)).collect();
    let scale = measured.iter().map(|l| l.upper).fold(0.0, f64::max);
    let predicted_trend = classify_trend(&pred, 0.0);
    let measured_trend = classify_trend(&meas, 1e-12 * scale);
    let ratios = meas
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { f64::NAN })
        .collect();
    let bounded_below = match (quantity, predicted_trend) {
        (SweepQuantity::Upper, _) => None,
        (_, Trend::Stable) => Some(true),
        (_, Trend::Vanishing) => Some(false),
        _ => None,
    };
    Ok(RefinementReport {
        quantity,
        levels: measured,
        consistent: predicted_trend == measured_trend && predicted_trend != Trend::Indeterminate,
        predicted_trend,
        measured_trend,
        ratios,
        bounded_below,
    })
}

/// [`refinement_sweep`] with the Fourier basis of a single-interval domain and
/// `φ` sampled at each level.
pub fn fourier_refinement_sweep<F>(
    domain: &Domain,
    levels: &[usize],
    quantity: SweepQuantity,
    phi: F,
    opts: &MultOptions,
) -> Result<RefinementReport>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    refinement_sweep(levels, quantity, opts, |n| {
        let g = Arc::new(domain.grid(n)?);
        let base = fourier_basis(&g)?;
        let sampled = g.sample(&phi);
        Ok((base, sampled))
    })
}
