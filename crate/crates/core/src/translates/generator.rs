use std::f64::consts::PI;
use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{Domain, Grid};
use crate::error::{Error, Result};
use crate::framecore::SampledFunction;

/// Minimum number of grid cells across a transition band of the bump.
pub const MIN_BAND_NODES: f64 = 16.0;

/// An element `h ∈ P_E`, stored as samples of `ĥ` on a frequency grid over
/// `E`. The time side is evaluated on demand.
#[derive(Debug, Clone)]
pub struct Generator {
    hat: SampledFunction,
    label: String,
}

impl Generator {
    pub fn new(hat: SampledFunction, label: impl Into<String>) -> Self {
        Generator {
            hat,
            label: label.into(),
        }
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: &Arc<Grid>, label: &str, hat: F) -> Self {
        Self::new(grid.sample(hat), label)
    }

    /// `ĥ = χ_E`; on `[-1/2, 1/2]` this is the sinc generator.
    pub fn indicator(grid: &Arc<Grid>) -> Self {
        Self::new(grid.sample_real(|_| 1.0), "indicator")
    }

    pub fn hat(&self) -> &SampledFunction {
        &self.hat
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.hat.grid_arc()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `h(x) = ∫_E ĥ(ω) e^{2πiωx} dω` by the grid quadrature.
    pub fn time_eval(&self, x: f64) -> Complex64 {
        inverse_transform(&self.hat, x)
    }

    /// `‖ĥ‖²`, which equals `‖h‖²_{L²(ℝ)}`.
    pub fn norm_sqr(&self) -> f64 {
        self.hat.norm_sqr()
    }

    /// Samples `(ω, Re ĥ, Im ĥ)` with a header row.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["omega", "re", "im"])?;
        for (t, v) in self.grid().nodes().iter().zip(self.hat.values()) {
            w.write_record([t.to_string(), v.re.to_string(), v.im.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `(ω, Re ĥ, Im ĥ)` rows that must match the nodes of `grid`. A
    /// header row is optional.
    pub fn read_csv<R: Read>(reader: R, grid: &Arc<Grid>, label: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut values = Vec::with_capacity(grid.len());
        for (row, rec) in r.records().enumerate() {
            let rec = rec?;
            if rec.len() != 3 {
                return Err(Error::InvalidArgument(format!(
                    "generator row {}: expected 3 fields, got {}",
                    row + 1,
                    rec.len()
                )));
            }
            let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            let fields = match parsed {
                Ok(v) => v,
                Err(_) if row == 0 => continue,
                Err(e) => {
                    return Err(Error::InvalidArgument(format!("generator row {}: {e}", row + 1)))
                }
            };
            let i = values.len();
            let Some(&node) = grid.nodes().get(i) else {
                return Err(Error::DimensionMismatch {
                    expected: grid.len(),
                    got: i + 1,
                });
            };
            if (fields[0] - node).abs() > 1e-9 * (1.0 + node.abs()) {
                return Err(Error::InvalidArgument(format!(
                    "generator row {}: omega {} does not match grid node {node}",
                    row + 1,
                    fields[0]
                )));
            }
            values.push(Complex64::new(fields[1], fields[2]));
        }
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self::new(SampledFunction::new(Arc::clone(grid), values)?, label))
    }
}

/// `Σ_i w_i f̂(ω_i) e^{2πiω_i x}`.
pub fn inverse_transform(hat: &SampledFunction, x: f64) -> Complex64 {
    let g = hat.grid();
    g.nodes()
        .iter()
        .zip(g.weights())
        .zip(hat.values())
        .map(|((&w_node, &w), v)| v * Complex64::from_polar(w, 2.0 * PI * w_node * x))
        .sum()
}

/// Random element of `P_F` on `grid`: `χ_F(ω) Σ_j c_j e^{2πiμ_j ω}` with
/// `terms` random shifts `μ_j ∈ [−8, 8]` and complex coefficients in the
/// unit square.
pub fn random_band_limited<R: Rng + ?Sized>(
    grid: &Arc<Grid>,
    support: &Domain,
    terms: usize,
    rng: &mut R,
) -> SampledFunction {
    let parts: Vec<(f64, Complex64)> = (0..terms.max(1))
        .map(|_| {
            (
                rng.random_range(-8.0..8.0),
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            )
        })
        .collect();
    grid.sample(|w| {
        if !support.contains(w) {
            return Complex64::new(0.0, 0.0);
        }
        parts
            .iter()
            .map(|(mu, c)| c * Complex64::from_polar(1.0, 2.0 * PI * mu * w))
            .sum()
    })
}

/// `β(t)/(β(t) + β(1 − t))` with `β(t) = exp(−1/t)` for `t > 0`, else 0.
/// Smooth, 0 for `t ≤ 0`, 1 for `t ≥ 1`.
pub fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Parameters of the oversampling bump: `ĝ = 1` on `E`, `0` off `E_δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BumpSpecWire", into = "BumpSpecWire")]
pub struct BumpSpec {
    pub base_domain: Domain,
    pub delta: f64,
}

/// Wire form `{"intervals": [[a, b], ...], "delta": δ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpecWire {
    pub intervals: Vec<[f64; 2]>,
    pub delta: f64,
}

impl TryFrom<BumpSpecWire> for BumpSpec {
    type Error = Error;

    fn try_from(w: BumpSpecWire) -> Result<Self> {
        let base_domain = Domain::new(w.intervals.into_iter().map(Into::into).collect())?;
        BumpSpec::new(base_domain, w.delta)
    }
}

impl From<BumpSpec> for BumpSpecWire {
    fn from(b: BumpSpec) -> Self {
        BumpSpecWire {
            intervals: b.base_domain.intervals().iter().map(|&iv| iv.into()).collect(),
            delta: b.delta,
        }
    }
}

impl BumpSpec {
    /// Rejects `δ ≤ 0` and intervals whose transition bands would meet.
    pub fn new(base_domain: Domain, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
        }
        for w in base_domain.intervals().windows(2) {
            let gap = w[1].lo - w[0].hi;
            if gap <= 2.0 * delta {
                return Err(Error::BandsOverlap {
                    gap,
                    two_delta: 2.0 * delta,
                });
            }
        }
        Ok(BumpSpec { base_domain, delta })
    }

    /// `E_δ`.
    pub fn dilated(&self) -> Result<Domain> {
        self.base_domain.dilate(self.delta)
    }

    /// `‖ĝ‖₁ + ‖ĝ''‖₁ / (4π²)`, which bounds `|g(x)|(1 + x²)`. Integrals use
    /// the closed form with central differences at `samples_per_unit`.
    pub fn decay_constant(&self, samples_per_unit: usize) -> Result<f64> {
        if samples_per_unit == 0 {
            return Err(Error::InvalidArgument("samples_per_unit must be positive".into()));
        }
        let mut l1 = 0.0;
        let mut l1_dd = 0.0;
        for iv in self.dilated()?.intervals() {
            let cells = (iv.len() * samples_per_unit as f64).ceil() as usize;
            let h = iv.len() / cells as f64;
            for k in 0..cells {
                let w = iv.lo + (k as f64 + 0.5) * h;
                l1 += self.value(w) * h;
                let dd = (self.value(w + h) - 2.0 * self.value(w) + self.value(w - h)) / (h * h);
                l1_dd += dd.abs() * h;
            }
        }
        Ok(l1 + l1_dd / (4.0 * std::f64::consts::PI.powi(2)))
    }

    /// Smallest `n_per_unit` that puts [`MIN_BAND_NODES`] cells across a band.
    pub fn min_n_per_unit(&self) -> usize {
        (MIN_BAND_NODES / self.delta - 1e-9).ceil() as usize
    }

    /// `ĝ(ω)` without any grid.
    pub fn value(&self, w: f64) -> f64 {
        let d = self.delta;
        self.base_domain
            .intervals()
            .iter()
            .map(|iv| smoothstep((w - (iv.lo - d)) / d) * smoothstep(((iv.hi + d) - w) / d))
            .fold(0.0, f64::max)
    }
}

/// Samples the bump on a grid over `E_δ`; values are exactly 1 on nodes in
/// `E` and exactly 0 on nodes off `E_δ`.
pub fn build_bump_generator(spec: &BumpSpec, grid: &Arc<Grid>) -> Result<Generator> {
    let dilated = spec.dilated()?;
    let same = grid.domain().intervals().len() == dilated.intervals().len()
        && grid
            .domain()
            .intervals()
            .iter()
            .zip(dilated.intervals())
            .all(|(a, b)| (a.lo - b.lo).abs() <= 1e-12 && (a.hi - b.hi).abs() <= 1e-12);
    if !same {
        return Err(Error::InvalidDomain(format!(
            "bump grid must cover E_delta = {dilated}, got {}",
            grid.domain()
        )));
    }
    let per_band = spec.delta / grid.max_step();
    if per_band < MIN_BAND_NODES - 1e-9 {
        return Err(Error::UnresolvedTransition {
            nodes_per_band: per_band,
            required: MIN_BAND_NODES,
        });
    }
    let hat = grid.sample_real(|w| {
        if spec.base_domain.contains(w) {
            1.0
        } else if !dilated.contains(w) {
            0.0
        } else {
            spec.value(w)
        }
    });
    Ok(Generator::new(hat, "bump"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bump_grid(n: usize) -> (BumpSpec, Arc<Grid>) {
        let spec = BumpSpec::new(Domain::interval(-0.4, 0.4).unwrap(), 0.05).unwrap();
        let g = Arc::new(spec.dilated().unwrap().grid(n).unwrap());
        (spec, g)
    }

    #[test]
    fn smoothstep_shape() {
        assert_eq!(smoothstep(-1.0), 0.0);
        assert_eq!(smoothstep(0.0), 0.0);
        assert_eq!(smoothstep(1.0), 1.0);
        assert_abs_diff_eq!(smoothstep(0.5), 0.5, epsilon = 1e-15);
        for k in 1..100 {
            let t = k as f64 / 100.0;
            assert_abs_diff_eq!(smoothstep(t) + smoothstep(1.0 - t), 1.0, epsilon = 1e-14);
            assert!(smoothstep(t) >= smoothstep(t - 0.01));
            if (0.1..=0.9).contains(&t) {
                assert!(smoothstep(t) > smoothstep(t - 0.01));
            }
        }
    }

    #[test]
    fn bump_is_one_on_e_and_zero_off_e_delta() {
        let (spec, g) = bump_grid(320);
        assert_eq!(g.len(), 288);
        let gen = build_bump_generator(&spec, &g).unwrap();
        for (w, v) in g.nodes().iter().zip(gen.hat().values()) {
            assert_eq!(v.im, 0.0);
            if w.abs() <= 0.4 {
                assert_eq!(v.re, 1.0);
            } else {
                assert!(v.re > 0.0 && v.re < 1.0, "{w} {v}");
            }
        }
        let n_band = g.nodes().iter().filter(|w| w.abs() > 0.4).count();
        assert_eq!(n_band, 32);
    }

    #[test]
    fn bump_is_even_for_symmetric_domain() {
        let (spec, g) = bump_grid(320);
        let gen = build_bump_generator(&spec, &g).unwrap();
        let v = gen.hat().values();
        for i in 0..v.len() {
            assert_abs_diff_eq!(v[i].re, v[v.len() - 1 - i].re, epsilon = 1e-13);
        }
    }

    #[test]
    fn bump_time_decay_respects_derivative_bound() {
        let (spec, g) = bump_grid(320);
        let gen = build_bump_generator(&spec, &g).unwrap();
        // |g(x)|(1 + x²) ≤ ‖ĝ‖₁ + ‖ĝ''‖₁/(4π²); ĝ'' by central differences of
        // the closed form on a fine independent grid
        let fine = 200_000;
        let (a, b) = (-0.45, 0.45);
        let h = (b - a) / fine as f64;
        let mut l1 = 0.0;
        let mut l1_dd = 0.0;
        for k in 0..fine {
            let w = a + (k as f64 + 0.5) * h;
            l1 += spec.value(w) * h;
            let dd = (spec.value(w + h) - 2.0 * spec.value(w) + spec.value(w - h)) / (h * h);
            l1_dd += dd.abs() * h;
        }
        let c = l1 + l1_dd / (4.0 * PI * PI);
        assert_abs_diff_eq!(spec.decay_constant((200_000.0 / 0.9) as usize).unwrap(), c, epsilon = 1e-6 * c);
        for x in [5.0, 10.0, 20.0] {
            // direct quadrature of ∫ ĝ(ω) e^{2πiωx} dω on the fine grid
            let direct: Complex64 = (0..fine)
                .map(|k| {
                    let w = a + (k as f64 + 0.5) * h;
                    Complex64::from_polar(spec.value(w) * h, 2.0 * PI * w * x)
                })
                .sum();
            let grid_val = gen.time_eval(x);
            assert!((grid_val - direct).norm() <= 1e-6, "x={x}: {grid_val} vs {direct}");
            assert!(direct.norm() * (1.0 + x * x) <= c, "x={x}");
        }
    }

    #[test]
    fn bump_rejects_bad_inputs() {
        let two = Domain::new(vec![[0.0, 1.0].into(), [1.05, 2.0].into()]).unwrap();
        assert!(matches!(BumpSpec::new(two, 0.05), Err(Error::BandsOverlap { .. })));
        assert!(BumpSpec::new(Domain::interval(0.0, 1.0).unwrap(), 0.0).is_err());
        let (spec, _) = bump_grid(320);
        let coarse = Arc::new(spec.dilated().unwrap().grid(64).unwrap());
        assert!(matches!(
            build_bump_generator(&spec, &coarse),
            Err(Error::UnresolvedTransition { .. })
        ));
        let wrong = Arc::new(Domain::interval(-0.5, 0.5).unwrap().grid(320).unwrap());
        assert!(build_bump_generator(&spec, &wrong).is_err());
        assert_eq!(spec.min_n_per_unit(), 320);
    }

    #[test]
    fn bump_spec_json_round_trip() {
        let spec: BumpSpec = serde_json::from_str(r#"{"intervals": [[-0.4, 0.4]], "delta": 0.05}"#).unwrap();
        assert_eq!(spec.delta, 0.05);
        let back: BumpSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        assert!(serde_json::from_str::<BumpSpec>(r#"{"intervals": [[0, 1]], "delta": 0.1, "x": 1}"#).is_err());
    }

    #[test]
    fn indicator_on_half_interval_is_sinc() {
        let g = Arc::new(Domain::interval(-0.5, 0.5).unwrap().grid(512).unwrap());
        let gen = Generator::indicator(&g);
        for x in [0.0f64, 0.3, 1.0, 2.5] {
            let sinc = if x == 0.0 { 1.0 } else { (PI * x).sin() / (PI * x) };
            assert_abs_diff_eq!(gen.time_eval(x).re, sinc, epsilon = 1e-4);
            assert_abs_diff_eq!(gen.time_eval(x).im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn csv_round_trip_and_alignment() {
        let g = Arc::new(Domain::interval(0.0, 1.0).unwrap().grid(8).unwrap());
        let gen = Generator::from_fn(&g, "x", |w| Complex64::new(w, -w * w));
        let mut buf = Vec::new();
        gen.write_csv(&mut buf).unwrap();
        let back = Generator::read_csv(&buf[..], &g, "x").unwrap();
        for (a, b) in back.hat().values().iter().zip(gen.hat().values()) {
            assert!((a - b).norm() < 1e-15);
        }
        let other = Arc::new(Domain::interval(0.0, 1.0).unwrap().grid(16).unwrap());
        assert!(Generator::read_csv(&buf[..], &other, "x").is_err());
    }

    #[test]
    fn random_element_is_supported_in_domain() {
        let g = Arc::new(Domain::interval(-0.5, 0.5).unwrap().grid(64).unwrap());
        let e = Domain::interval(-0.25, 0.25).unwrap();
        let f = random_band_limited(&g, &e, 4, &mut ChaCha8Rng::seed_from_u64(1));
        for (w, v) in g.nodes().iter().zip(f.values()) {
            if !e.contains(*w) {
                assert_eq!(v.norm(), 0.0);
            }
        }
        assert!(f.norm() > 0.0);
    }
}
