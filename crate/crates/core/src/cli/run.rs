use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::*;
use super::expr::parse_multiplier;
use crate::domain::{Domain, Grid};
use crate::error::{Error, Result};
use crate::framecore::{
    exponential_system, fourier_basis, measure_bounds_with, BoundsOptions, FrameReport, ReconstructOptions,
    SynthesisSystem,
};
use crate::multiplication::{refinement_sweep, run_check, CheckKind, MultOptions, RefinementReport, SweepQuantity};
use crate::pointset::PointSet;
use crate::translates::{
    build_bump_generator, classify_translates, convolution_closure_check, corollary_obstruction_demo,
    fourier_lattice, outer_frame_check, random_band_limited, union_check, union_refinement_sweep, BumpSpec,
    ConvolutionMode, ExpansionContext, Generator, UnionPart, UnionSpec,
};

pub const EXIT_CONSISTENT: i32 = 0;
pub const EXIT_INCONSISTENT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Exit code for a failed run: solver failures are numerical, everything
/// else is a problem with the inputs.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::EigenNonConvergence { .. } | Error::NonConvergence { .. } | Error::NotInSpan { .. } => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub version: &'static str,
    /// Effective config, defaults filled in.
    pub config: RunConfig,
    pub result: Value,
    pub consistent: bool,
    pub exit_code: i32,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: Report,
    /// Plot data for `--format csv`.
    pub csv: Vec<u8>,
}

impl RunOutput {
    pub fn exit_code(&self) -> i32 {
        self.report.exit_code
    }

    pub fn render(&self, format: OutputFormat) -> Result<Vec<u8>> {
        Ok(match format {
            OutputFormat::Json => {
                let mut v = serde_json::to_vec_pretty(&self.report)?;
                v.push(b'\n');
                v
            }
            OutputFormat::Csv => self.csv.clone(),
        })
    }

    /// Writes the configured output: to the output path by temp file and
    /// rename, or to stdout when no path is set.
    pub fn write(&self, cfg: &RunConfig) -> Result<()> {
        let bytes = self.render(cfg.output.format)?;
        match &cfg.output.path {
            Some(path) => write_atomic(path, &bytes),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(&bytes)?;
                out.flush()?;
                Ok(())
            }
        }
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

struct Outcome {
    result: Value,
    consistent: bool,
    csv: Vec<u8>,
}

pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let out = match &cfg.command {
        Command::Density(p) => density(cfg, p, &mut rng)?,
        Command::Gap(p) => gap(cfg, p, &mut rng)?,
        Command::FrameBounds(p) => frame_bounds(cfg, p, &mut rng)?,
        Command::MultCheck(p) => mult_check(cfg, p, &mut rng)?,
        Command::TranslateCheck(p) => translate_check(cfg, p, &mut rng)?,
        Command::BuildGenerator(p) => build_generator(cfg, p)?,
        Command::Reconstruct(p) => reconstruct_cmd(cfg, p, &mut rng)?,
        Command::UnionCheck(p) => union_cmd(cfg, p, &mut rng)?,
        Command::CorollaryDemo(p) => corollary(cfg, p)?,
    };
    Ok(RunOutput {
        report: Report {
            command: cfg.command.kind().name(),
            version: env!("CARGO_PKG_VERSION"),
            config: cfg.clone(),
            result: out.result,
            consistent: out.consistent,
            exit_code: if out.consistent { EXIT_CONSISTENT } else { EXIT_INCONSISTENT },
        },
        csv: out.csv,
    })
}

fn opts(cfg: &RunConfig) -> MultOptions {
    MultOptions {
        rank_tol: cfg.tolerances.rank_tol,
        zero_tol: cfg.tolerances.zero_tol,
    }
}

fn domain(spec: &crate::domain::DomainSpec) -> Result<Domain> {
    Domain::try_from(spec.clone())
}

fn grid(d: &Domain, n: usize) -> Result<Arc<Grid>> {
    Ok(Arc::new(d.grid(n)?))
}

/// Loads a point set; `grid` is needed only for [`PointSource::Fourier`].
fn points(cfg: &RunConfig, src: &PointSource, grid: Option<&Arc<Grid>>, rng: &mut ChaCha8Rng) -> Result<PointSet> {
    match src {
        PointSource::Csv(path) => PointSet::read_csv(std::fs::File::open(cfg.resolve(path))?, None),
        PointSource::Json(path) => {
            let text = std::fs::read_to_string(cfg.resolve(path))?;
            Ok(serde_json::from_str(&text)?)
        }
        PointSource::Inline(spec) => PointSet::try_from(spec.clone()),
        PointSource::Lattice { start, step, count } => PointSet::lattice_1d(*start, *step, *count),
        PointSource::Jittered { start, count, jitter } => PointSet::jittered_1d(*start, *count, *jitter, rng),
        PointSource::Integers(count) => PointSet::lattice_1d(-((count / 2) as f64), 1.0, *count),
        PointSource::Fourier => {
            let g = grid.ok_or_else(|| Error::InvalidArgument("fourier frequencies need a frequency grid".into()))?;
            let lambdas = fourier_lattice(g)?;
            let half = 0.5 / g.domain().measure();
            let (lo, hi) = (lambdas[0] - half, lambdas[lambdas.len() - 1] + half);
            PointSet::from_1d(lambdas, lo, hi)
        }
    }
}

fn spectrum_csv(rep: &FrameReport) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    rep.write_spectrum_csv(&mut buf)?;
    Ok(buf)
}

fn levels_csv(sweeps: &[(&str, &RefinementReport)]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "series", "n_per_unit", "nodes", "ess_inf", "ess_sup", "support_inf", "lambda_min", "lower", "upper",
        "gram_min", "gram_max", "rank",
    ])?;
    for (name, s) in sweeps {
        for l in &s.levels {
            w.write_record([
                name.to_string(),
                l.n_per_unit.to_string(),
                l.nodes.to_string(),
                l.ess_inf.to_string(),
                l.ess_sup.to_string(),
                l.support_inf.to_string(),
                l.lambda_min.to_string(),
                l.lower.to_string(),
                l.upper.to_string(),
                l.gram_min.to_string(),
                l.gram_max.to_string(),
                l.rank.to_string(),
            ])?;
        }
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn density(cfg: &RunConfig, p: &DensityParams, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let ps = points(cfg, &p.points, None, rng)?;
    let report = ps.beurling_density(&p.radii)?;
    let predicate = p
        .frame_predicate
        .map(|[a, r]| ps.beurling_1d_frame_predicate(a, r))
        .transpose()?;
    let ball = p.ball_radius.map(|r| ps.beurling_ball_frame_predicate(r)).transpose()?;
    let ordered = report.d_minus.iter().zip(&report.d_plus).all(|(a, b)| a <= b);
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    Ok(Outcome {
        result: json!({
            "points": ps.len(),
            "dim": ps.dim(),
            "density": report,
            "frame_predicate": predicate,
            "ball_predicate": ball,
            "densities_ordered": ordered,
        }),
        consistent: ordered,
        csv,
    })
}

fn gap(cfg: &RunConfig, p: &GapParams, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let ps = points(cfg, &p.points, None, rng)?;
    let separation = ps.separation()?;
    let gap = ps.gap()?;
    let ball = p.ball_radius.map(|r| ps.beurling_ball_frame_predicate(r)).transpose()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["points", "separation", "gap"])?;
    w.write_record([ps.len().to_string(), separation.to_string(), gap.rho.to_string()])?;
    Ok(Outcome {
        result: json!({
            "points": ps.len(),
            "dim": ps.dim(),
            "separation": separation,
            "gap": gap,
            "ball_predicate": ball,
        }),
        consistent: true,
        csv: w.into_inner().map_err(|e| Error::Io(e.into_error()))?,
    })
}

fn frame_bounds(cfg: &RunConfig, p: &FrameBoundsParams, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let g = grid(&domain(&p.domain)?, cfg.grid.n_per_unit)?;
    let ps = points(cfg, &p.frequencies, Some(&g), rng)?;
    let mut sys = exponential_system(&g, &ps)?;
    if let Some(src) = &p.generator {
        sys = sys.multiplied(&src.sample(cfg, &g, "generator")?)?;
    }
    let rep = measure_bounds_with(
        &sys,
        &BoundsOptions {
            rank_tol: cfg.tolerances.rank_tol,
            bessel_bound: p.bessel_bound,
        },
    )?;
    // the two spectra must agree whenever both were computed
    let spectra_agree = rep.cross_check.is_none_or(|d| d <= 1e-8);
    let consistent = spectra_agree && rep.flags.bessel;
    Ok(Outcome {
        csv: spectrum_csv(&rep)?,
        result: json!({ "report": rep, "spectra_agree": spectra_agree }),
        consistent,
    })
}

fn base_system(cfg: &RunConfig, base: &PointSource, g: &Arc<Grid>, rng: &mut ChaCha8Rng) -> Result<SynthesisSystem> {
    match base {
        PointSource::Fourier => fourier_basis(g),
        other => exponential_system(g, &points(cfg, other, Some(g), rng)?),
    }
}

fn default_quantity(kind: CheckKind) -> SweepQuantity {
    match kind {
        CheckKind::Riesz => SweepQuantity::GramMin,
        CheckKind::Bessel => SweepQuantity::Upper,
        CheckKind::FrameSequence => SweepQuantity::SupportLower,
        CheckKind::Frame | CheckKind::Tight | CheckKind::Converse => SweepQuantity::Lower,
    }
}

fn mult_check(cfg: &RunConfig, p: &MultCheckParams, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let dom = domain(&p.domain)?;
    let o = opts(cfg);
    let g = grid(&dom, cfg.grid.n_per_unit)?;
    let base = base_system(cfg, &p.base, &g, rng)?;
    let phi = p.multiplier.sample(cfg, &g, "multiplier")?;
    let single = run_check(p.check, &base, &phi, &o)?;

    // the sweep resamples the multiplier, so it needs an expression
    let sweep = match &p.multiplier {
        FunctionSource::Expr(src) => {
            let m = parse_multiplier(src)?;
            let fixed = match &p.base {
                PointSource::Fourier => None,
                other => Some(points(cfg, other, None, rng)?),
            };
            let quantity = p.sweep.unwrap_or(default_quantity(p.check));
            Some(refinement_sweep(&cfg.grid.refine, quantity, &o, |n| {
                let g = grid(&dom, n)?;
                let sys = match &fixed {
                    None => fourier_basis(&g)?,
                    Some(ps) => exponential_system(&g, ps)?,
                };
                Ok((sys, m.sample(&g)?))
            })?)
        }
        FunctionSource::Csv(_) => None,
    };
    let trend = sweep.as_ref().map(|s| s.predicted_trend);
    let bounded_below = sweep.as_ref().and_then(|s| s.bounded_below);
    let verdict = json!({
        "grid_frame": single.measured.frame,
        "bounded_below": bounded_below,
        "trend": trend,
        "frame": single.measured.frame && bounded_below != Some(false),
    });
    let consistent = single.consistent && sweep.as_ref().is_none_or(|s| s.consistent);
    let csv = match &sweep {
        Some(s) => levels_csv(&[("multiplied", s)])?,
        None => spectrum_csv(&single.mult_report)?,
    };
    Ok(Outcome {
        result: json!({ "check": single, "sweep": sweep, "verdict": verdict }),
        consistent,
        csv,
    })
}

fn translate_check(cfg: &RunConfig, p: &TranslateCheckParams, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let g = grid(&domain(&p.domain)?, cfg.grid.n_per_unit)?;
    let ps = points(cfg, &p.frequencies, Some(&g), rng)?;
    let o = opts(cfg);
    let gen = Generator::new(p.generator.sample(cfg, &g, "h")?, "h");
    let class = classify_translates(&gen, &ps, &g, &o)?;
    let conv = match &p.convolve_with {
        Some(src) => {
            let other = Generator::new(src.sample(cfg, &g, "g")?, "g");
            let mode = p.convolution_mode.unwrap_or(ConvolutionMode::Frame);
            Some(convolution_closure_check(&gen, &other, &ps, &g, mode, &o)?)
        }
        None => None,
    };
    let rep = &class.frame.mult_report;
    let consistent = class.consistent && conv.as_ref().is_none_or(|c| c.consistent);
    Ok(Outcome {
        csv: spectrum_csv(rep)?,
        result: json!({
            "bounds": [rep.lower, rep.upper],
            "flags": rep.flags,
            "verdict": class.verdict,
            "classification": class,
            "convolution": conv,
        }),
        consistent,
    })
}

fn build_generator(cfg: &RunConfig, p: &BuildGeneratorParams) -> Result<Outcome> {
    let spec = BumpSpec::try_from(p.bump.clone())?;
    let g = grid(&spec.dilated()?, cfg.grid.n_per_unit)?;
    let gen = build_bump_generator(&spec, &g)?;
    let c = spec.decay_constant(100 * cfg.grid.n_per_unit)?;
    let decay: Vec<Value> = p
        .decay_points
        .iter()
        .map(|&x| {
            let v = gen.time_eval(x).norm() * (1.0 + x * x);
            json!({ "x": x, "weighted_abs": v, "within_bound": v <= c * (1.0 + 1e-6) })
        })
        .collect();
    let consistent = decay.iter().all(|d| d["within_bound"] == Value::Bool(true));
    let hat = gen.hat();
    let mut csv = Vec::new();
    gen.write_csv(&mut csv)?;
    Ok(Outcome {
        result: json!({
            "spec": p.bump,
            "grid": g.info(),
            "norm_sqr": gen.norm_sqr(),
            "decay_constant": c,
            "decay": decay,
            "omega": g.nodes(),
            "re": hat.values().iter().map(|v| v.re).collect::<Vec<_>>(),
            "im": hat.values().iter().map(|v| v.im).collect::<Vec<_>>(),
        }),
        consistent,
        csv,
    })
}

fn reconstruct_cmd(cfg: &RunConfig, p: &ReconstructParams, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let spec = BumpSpec::try_from(p.bump.clone())?;
    let base = points(cfg, &p.base, None, rng)?;
    let t = &cfg.tolerances;
    let ctx = ExpansionContext::prepare(&spec, cfg.grid.n_per_unit, &base, p.target_gap, p.sep_min, t.rank_tol)?;
    let signals = match &p.signal {
        SignalSource::Random { count, terms } => (0..*count)
            .map(|_| random_band_limited(&ctx.grid, &spec.base_domain, *terms, rng))
            .collect(),
        SignalSource::Function(src) => vec![src.sample(cfg, &ctx.grid, "f")?],
    };
    let ropts = ReconstructOptions {
        tol: t.recon_tol,
        max_iter: t.max_iter,
    };
    let mut rows = Vec::with_capacity(signals.len());
    let mut first = None;
    let mut all_pass = true;
    for f in &signals {
        let rep = ctx.expand(f, &ropts)?;
        let perm = ctx.max_permutation_change(&rep, p.permutation_trials, rng)?;
        let pass = rep.residual <= p.pass_tol
            && rep.band_residual <= p.pass_tol
            && rep.coeff_norm_sqr <= rep.coeff_bound * (1.0 + 1e-9)
            && perm <= p.permutation_tol;
        all_pass &= pass;
        rows.push(json!({
            "residual": rep.residual,
            "band_residual": rep.band_residual,
            "cg_residual": rep.cg_residual,
            "iterations": rep.iterations,
            "coeff_norm_sqr": rep.coeff_norm_sqr,
            "coeff_bound": rep.coeff_bound,
            "permutation_change": perm,
            "warnings": rep.warnings,
            "pass": pass,
        }));
        first.get_or_insert(rep);
    }
    let outer = if p.outer_frame {
        Some(outer_frame_check(&ctx.generator, &ctx.frequencies, &ctx.domain, t.rank_tol)?)
    } else {
        None
    };
    let consistent = all_pass && outer.as_ref().is_none_or(|o| o.consistent);
    let mut csv = Vec::new();
    let coefficients = match &first {
        Some(rep) => {
            rep.write_coeffs_csv(&mut csv)?;
            json!({
                "lambda_k": rep.lambdas,
                "re": rep.coeffs.iter().map(|a| a.re).collect::<Vec<_>>(),
                "im": rep.coeffs.iter().map(|a| a.im).collect::<Vec<_>>(),
            })
        }
        None => Value::Null,
    };
    let b = &ctx.bounds;
    Ok(Outcome {
        result: json!({
            "grid": ctx.grid.info(),
            "frequencies": ctx.frequencies.len(),
            "exponential_bounds": { "lower": b.lower, "upper": b.upper, "rank": b.rank, "dim": b.dim_space },
            "signals": rows,
            "coefficients": coefficients,
            "outer_frame": outer,
        }),
        consistent,
        csv,
    })
}

fn union_spec(cfg: &RunConfig, p: &UnionCheckParams, fixed: Option<&PointSet>, n: usize) -> Result<UnionSpec> {
    if p.parts.is_empty() {
        return Err(Error::InvalidArgument("union-check needs at least one part".into()));
    }
    let domains = p.parts.iter().map(|q| domain(&q.domain)).collect::<Result<Vec<_>>>()?;
    let union = Domain::union(domains.iter().flat_map(|d| d.intervals().iter().copied()))?;
    let g = grid(&union, n)?;
    let mut parts = Vec::with_capacity(domains.len());
    for (j, (q, d)) in p.parts.iter().zip(domains).enumerate() {
        let m = parse_multiplier(&q.generator)?;
        let values = g
            .nodes()
            .iter()
            .map(|&w| if d.contains(w) { m.eval(w) } else { Ok(Complex64::new(0.0, 0.0)) })
            .collect::<Result<Vec<_>>>()?;
        let hat = crate::framecore::SampledFunction::new(Arc::clone(&g), values)?;
        parts.push(UnionPart {
            domain: d,
            generator: Generator::new(hat, format!("h{}", j + 1)),
        });
    }
    let frequencies = match fixed {
        Some(ps) => ps.clone(),
        None => points(cfg, &PointSource::Fourier, Some(&g), &mut ChaCha8Rng::seed_from_u64(cfg.seed))?,
    };
    Ok(UnionSpec { parts, frequencies })
}

fn union_cmd(cfg: &RunConfig, p: &UnionCheckParams, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let fixed = match &p.frequencies {
        PointSource::Fourier => None,
        other => Some(points(cfg, other, None, rng)?),
    };
    let t = &cfg.tolerances;
    let rep = union_check(&union_spec(cfg, p, fixed.as_ref(), cfg.grid.n_per_unit)?, t.rank_tol)?;
    let sweep = if p.sweep {
        Some(union_refinement_sweep(&cfg.grid.refine, t.rank_tol, |n| {
            union_spec(cfg, p, fixed.as_ref(), n)
        })?)
    } else {
        None
    };
    let consistent = rep.consistent && sweep.as_ref().is_none_or(|s| s.consistent);
    let csv = match &sweep {
        Some(s) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["n_per_unit", "p_hat", "big_p_hat", "lambda_min", "upper"])?;
            for l in &s.levels {
                w.serialize((l.n_per_unit, l.p_hat, l.big_p_hat, l.lambda_min, l.upper))?;
            }
            w.into_inner().map_err(|e| Error::Io(e.into_error()))?
        }
        None => spectrum_csv(&rep.report)?,
    };
    Ok(Outcome {
        result: json!({ "union": rep, "sweep": sweep }),
        consistent,
        csv,
    })
}

fn corollary(cfg: &RunConfig, p: &CorollaryParams) -> Result<Outcome> {
    let dom = domain(&p.domain)?;
    let o = opts(cfg);
    let h = parse_multiplier(&p.generator)?;
    let control = parse_multiplier(&p.control)?;
    let levels = &cfg.grid.refine;
    let gen_rep = corollary_obstruction_demo(&dom, levels, fourier_lattice, |g| h.sample(g), p.ratio_cap, &o)?;
    let ctl_rep = corollary_obstruction_demo(&dom, levels, fourier_lattice, |g| control.sample(g), p.ratio_cap, &o)?;
    let consistent = gen_rep.sweep.consistent && ctl_rep.sweep.consistent;
    Ok(Outcome {
        csv: levels_csv(&[("generator", &gen_rep.sweep), ("control", &ctl_rep.sweep)])?,
        result: json!({
            "levels": levels,
            "generator": gen_rep,
            "control": ctl_rep,
        }),
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_json(text: &str) -> Result<RunOutput> {
        let cfg = RunConfig::from_json(text, Path::new(".")).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        run(&cfg)
    }

    #[test]
    fn sinc_translates_are_an_orthonormal_basis() {
        let out = run_json(
            r#"{"command": "translate-check", "params": {"domain": {"intervals": [[-0.5, 0.5]]},
                "frequencies": {"integers": 64}, "generator": {"expr": "1"}}, "grid": {"n_per_unit": 64}}"#,
        )
        .unwrap();
        assert_eq!(out.exit_code(), EXIT_CONSISTENT);
        let b = &out.report.result["bounds"];
        assert!((b[0].as_f64().unwrap() - 1.0).abs() < 1e-10);
        assert!((b[1].as_f64().unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(out.report.result["flags"]["tight"], true);
        assert_eq!(out.report.result["verdict"], "frame");
    }

    #[test]
    fn linear_multiplier_trends_to_zero() {
        let out = run_json(
            r#"{"command": "mult-check", "params": {"domain": {"intervals": [[0, 1]]}, "multiplier": {"expr": "t"}},
                "grid": {"n_per_unit": 64, "refine": [32, 64, 128]}}"#,
        )
        .unwrap();
        assert_eq!(out.exit_code(), EXIT_CONSISTENT);
        let v = &out.report.result["verdict"];
        assert_eq!(v["frame"], false);
        assert_eq!(v["trend"], "vanishing");
        assert_eq!(out.report.config.grid.refine, vec![32, 64, 128]);
    }

    #[test]
    fn errors_map_to_exit_codes() {
        assert_eq!(exit_code_for(&Error::GridMismatch), EXIT_USAGE);
        assert_eq!(
            exit_code_for(&Error::NonConvergence {
                iterations: 1,
                best_residual: 1.0
            }),
            EXIT_NUMERICAL
        );
        let e = run_json(
            r#"{"command": "mult-check", "params": {"domain": {"intervals": [[0, 1]]}, "multiplier": {"expr": "1/(t-t)"}}}"#,
        )
        .unwrap_err();
        assert_eq!(exit_code_for(&e), EXIT_USAGE);
    }

    #[test]
    fn csv_outputs_have_headers() {
        let out = run_json(r#"{"command": "gap", "params": {"points": {"integers": 8}}, "output": {"format": "csv"}}"#)
            .unwrap();
        let text = String::from_utf8(out.render(OutputFormat::Csv).unwrap()).unwrap();
        assert!(text.starts_with("points,separation,gap\n8,1,0.5"), "{text}");
    }
}
