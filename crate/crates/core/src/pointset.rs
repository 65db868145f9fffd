//! Irregular node sets `Λ ⊂ ℝ^d`: separation, gap, Beurling window densities,
//! the two sufficient frame predicates built on them, and gap-reducing
//! densification.
//!
//! An infinite `Λ` is represented by a finite truncation together with an
//! axis-aligned analysis box standing in for `ℝ^d`. Densities are therefore
//! always reported at a finite window half-width `r`; the limit is never
//! claimed. In one dimension gap and window extrema are exact; for `d ≥ 2`
//! they are lattice scans whose spacing is reported alongside the value.

use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite separated point set with its analysis box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointSetSpec", into = "PointSetSpec")]
pub struct PointSet {
    dim: usize,
    /// Row-major coordinates, `dim` per point.
    coords: Vec<f64>,
    bounds: Vec<[f64; 2]>,
}

/// Wire form: `{"dim": d, "box": [[l, u], ...], "points": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSetSpec {
    pub dim: usize,
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    pub points: Vec<Vec<f64>>,
}

impl TryFrom<PointSetSpec> for PointSet {
    type Error = Error;

    fn try_from(s: PointSetSpec) -> Result<Self> {
        PointSet::new(s.dim, s.points, s.bounds)
    }
}

impl From<PointSet> for PointSetSpec {
    fn from(ps: PointSet) -> Self {
        PointSetSpec {
            dim: ps.dim,
            points: ps.iter().map(<[f64]>::to_vec).collect(),
            bounds: ps.bounds,
        }
    }
}

impl PointSet {
    /// Validates and stores a point set. One-dimensional sets are sorted.
    pub fn new(dim: usize, points: Vec<Vec<f64>>, bounds: Vec<[f64; 2]>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidPointSet("dimension must be positive".into()));
        }
        if bounds.len() != dim {
            return Err(Error::InvalidPointSet(format!(
                "box has {} sides for dimension {dim}",
                bounds.len()
            )));
        }
        for (axis, b) in bounds.iter().enumerate() {
            if !(b[0].is_finite() && b[1].is_finite() && b[0] <= b[1]) {
                return Err(Error::InvalidPointSet(format!(
                    "box side {axis} is not a finite interval: {b:?}"
                )));
            }
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidPointSet(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            for (axis, (&x, b)) in p.iter().zip(&bounds).enumerate() {
                if !x.is_finite() || x < b[0] || x > b[1] {
                    return Err(Error::InvalidPointSet(format!(
                        "point {i} coordinate {axis} = {x} lies outside box [{}, {}]",
                        b[0], b[1]
                    )));
                }
            }
            coords.extend_from_slice(p);
        }
        if dim == 1 {
            coords.sort_by(f64::total_cmp);
        }
        let ps = PointSet {
            dim,
            coords,
            bounds,
        };
        if ps.len() >= 2 && ps.separation()? <= 0.0 {
            return Err(Error::InvalidPointSet("points are not pairwise distinct".into()));
        }
        Ok(ps)
    }

    /// One-dimensional set in the box `[lo, hi]`.
    pub fn from_1d(points: Vec<f64>, lo: f64, hi: f64) -> Result<Self> {
        Self::new(1, points.into_iter().map(|x| vec![x]).collect(), vec![[lo, hi]])
    }

    /// `{start + k·step : k = 0..count}` with the box equal to its hull widened
    /// by `step / 2` on both sides.
    pub fn lattice_1d(start: f64, step: f64, count: usize) -> Result<Self> {
        if !(step > 0.0) || count == 0 {
            return Err(Error::InvalidArgument(
                "lattice needs positive step and count".into(),
            ));
        }
        let pts = (0..count).map(|k| start + k as f64 * step).collect();
        let half = 0.5 * step;
        Self::from_1d(pts, start - half, start + (count - 1) as f64 * step + half)
    }

    /// `{start + k + η_k}` with `η_k` uniform in `[-jitter, jitter]`, box
    /// `[start - 1/2, start + count - 1/2]`. Requires `jitter < 1/2`.
    pub fn jittered_1d<R: Rng + ?Sized>(
        start: f64,
        count: usize,
        jitter: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if !(0.0..0.5).contains(&jitter) || count == 0 {
            return Err(Error::InvalidArgument(format!(
                "jitter must lie in [0, 1/2) and count be positive, got {jitter}, {count}"
            )));
        }
        let pts = (0..count)
            .map(|k| {
                let eta = if jitter > 0.0 {
                    rng.random_range(-jitter..=jitter)
                } else {
                    0.0
                };
                start + k as f64 + eta
            })
            .collect();
        Self::from_1d(pts, start - 0.5, start + count as f64 - 0.5)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Analysis box, one `[lower, upper]` per axis.
    pub fn bounds(&self) -> &[[f64; 2]] {
        &self.bounds
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Coordinates of a one-dimensional set (sorted ascending).
    pub fn coords_1d(&self) -> Result<&[f64]> {
        if self.dim != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: self.dim,
            });
        }
        Ok(&self.coords)
    }

    fn shortest_side(&self) -> f64 {
        self.bounds
            .iter()
            .map(|b| b[1] - b[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Same points and box shifted by `offset` along every axis.
    pub fn translated(&self, offset: &[f64]) -> Result<Self> {
        if offset.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: offset.len(),
            });
        }
        let points = self
            .iter()
            .map(|p| p.iter().zip(offset).map(|(x, o)| x + o).collect())
            .collect();
        let bounds = self
            .bounds
            .iter()
            .zip(offset)
            .map(|(b, o)| [b[0] + o, b[1] + o])
            .collect();
        Self::new(self.dim, points, bounds)
    }

    /// Minimal pairwise Euclidean distance.
    pub fn separation(&self) -> Result<f64> {
        let n = self.len();
        if n < 2 {
            return Err(Error::SeparationUndefined(n));
        }
        if self.dim == 1 {
            return Ok(self
                .coords
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::INFINITY, f64::min));
        }
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                best = best.min(dist(self.point(i), self.point(j)));
            }
        }
        Ok(best)
    }

    /// `sup_{x ∈ box} min_λ |x − λ|`.
    pub fn gap(&self) -> Result<Gap> {
        if self.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        if self.dim == 1 {
            let p = &self.coords;
            let [lo, hi] = self.bounds[0];
            let mut rho = (p[0] - lo).max(hi - p[p.len() - 1]);
            for w in p.windows(2) {
                rho = rho.max(0.5 * (w[1] - w[0]));
            }
            return Ok(Gap {
                rho,
                scan_spacing: None,
            });
        }
        let spacing = self.scan_spacing();
        let mut rho: f64 = 0.0;
        for_each_lattice_point(&self.box_ranges(0.0), spacing, |x| {
            let d = self
                .iter()
                .map(|p| dist(p, x))
                .fold(f64::INFINITY, f64::min);
            rho = rho.max(d);
        });
        Ok(Gap {
            rho,
            scan_spacing: Some(spacing),
        })
    }

    fn scan_spacing(&self) -> f64 {
        match self.separation() {
            Ok(s) => s / 4.0,
            Err(_) => self.shortest_side().max(1e-12) / 64.0,
        }
    }

    fn box_ranges(&self, inset: f64) -> Vec<[f64; 2]> {
        self.bounds
            .iter()
            .map(|b| [b[0] + inset, b[1] - inset])
            .collect()
    }

    /// Minimal and maximal window counts `ν∓(r)` with windows
    /// `y + [-r, r]^d` kept inside the analysis box.
    pub fn window_counts(&self, r: f64) -> Result<WindowCounts> {
        if !(r > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "window half-width must be positive, got {r}"
            )));
        }
        let side = self.shortest_side();
        if 2.0 * r > side * (1.0 + 1e-12) {
            return Err(Error::WindowExceedsBox {
                two_r: 2.0 * r,
                side,
            });
        }
        if self.dim == 1 {
            let (min, max) = window_extrema_1d(&self.coords, self.bounds[0], r);
            return Ok(WindowCounts {
                min,
                max,
                scan_spacing: None,
            });
        }
        let spacing = self.scan_spacing();
        let mut min = usize::MAX;
        let mut max = 0;
        for_each_lattice_point(&self.box_ranges(r), spacing, |y| {
            let c = self
                .iter()
                .filter(|p| p.iter().zip(y).all(|(a, b)| (a - b).abs() <= r))
                .count();
            min = min.min(c);
            max = max.max(c);
        });
        Ok(WindowCounts {
            min,
            max,
            scan_spacing: Some(spacing),
        })
    }

    /// Finite-window Beurling densities for every requested half-width.
    pub fn beurling_density(&self, r_values: &[f64]) -> Result<DensityReport> {
        if self.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        let mut report = DensityReport {
            dim: self.dim,
            r_values: Vec::with_capacity(r_values.len()),
            nu_minus: Vec::new(),
            nu_plus: Vec::new(),
            d_minus: Vec::new(),
            d_plus: Vec::new(),
            scan_spacing: None,
            extrapolated: None,
        };
        for &r in r_values {
            let wc = self.window_counts(r)?;
            let vol = (2.0 * r).powi(self.dim as i32);
            report.r_values.push(r);
            report.nu_minus.push(wc.min);
            report.nu_plus.push(wc.max);
            report.d_minus.push(wc.min as f64 / vol);
            report.d_plus.push(wc.max as f64 / vol);
            report.scan_spacing = wc.scan_spacing;
        }
        let r_max = 0.5 * self.shortest_side();
        if r_max > 0.0 {
            let wc = self.window_counts(r_max)?;
            let vol = (2.0 * r_max).powi(self.dim as i32);
            report.extrapolated = Some(DensityLimit {
                r: r_max,
                d_minus: wc.min as f64 / vol,
                d_plus: wc.max as f64 / vol,
            });
        }
        Ok(report)
    }

    /// One-dimensional Beurling criterion: `a < D⁻` predicts that the
    /// exponentials are a frame for `L²[-a/2, a/2]`. Only a sufficient
    /// condition, evaluated with the finite-window density at `r`.
    pub fn beurling_1d_frame_predicate(&self, a: f64, r: f64) -> Result<FramePrediction> {
        self.coords_1d()?;
        let wc = self.window_counts(r)?;
        let d_minus = wc.min as f64 / (2.0 * r);
        Ok(FramePrediction {
            predicted_frame: a < d_minus,
            margin: d_minus - a,
        })
    }

    /// Ball criterion: `r_ball · ρ < 1/4` predicts a frame for `L²(B_r)`.
    pub fn beurling_ball_frame_predicate(&self, r_ball: f64) -> Result<BallPrediction> {
        let g = self.gap()?;
        Ok(ball_prediction(r_ball, g.rho))
    }

    /// Superset `Λ′ ⊇ Λ` with `gap(Λ′) ≤ target_gap` over the same box.
    ///
    /// Lattice points of spacing `target_gap` are added when they are at
    /// least `sep_min` away from every original point; any stretch still
    /// longer than allowed afterwards is split evenly into pieces of length
    /// `≥ target_gap`. The result has separation `≥ min(sep(Λ), sep_min)`.
    pub fn densify(&self, target_gap: f64, sep_min: f64) -> Result<PointSet> {
        let pts = self.coords_1d()?;
        if !(sep_min > 0.0 && target_gap > 0.0) {
            return Err(Error::InvalidArgument(
                "target_gap and sep_min must be positive".into(),
            ));
        }
        if sep_min > target_gap {
            return Err(Error::DensifyInfeasible {
                sep_min,
                target_gap,
            });
        }
        let [lo, hi] = self.bounds[0];
        if !pts.is_empty() && self.gap()?.rho <= target_gap {
            return Ok(self.clone());
        }

        let mut out: Vec<f64> = pts.to_vec();
        let steps = ((hi - lo) / target_gap).floor() as usize;
        for j in 0..=steps {
            let x = lo + j as f64 * target_gap;
            if nearest_distance(pts, x) >= sep_min {
                out.push(x);
            }
        }
        out.sort_by(f64::total_cmp);

        // repair: every consecutive distance ≤ 2·target and both ends within target
        if out.is_empty() || out[0] - lo > target_gap {
            out.insert(0, lo);
        }
        if hi - out[out.len() - 1] > target_gap {
            out.push(hi);
        }
        let mut filled = Vec::with_capacity(out.len());
        for w in out.windows(2) {
            filled.push(w[0]);
            let len = w[1] - w[0];
            if len > 2.0 * target_gap {
                let pieces = (len / (2.0 * target_gap)).ceil() as usize;
                let step = len / pieces as f64;
                filled.extend((1..pieces).map(|k| w[0] + k as f64 * step));
            }
        }
        filled.push(out[out.len() - 1]);
        PointSet::from_1d(filled, lo, hi)
    }

    /// Reads one point per line, `dim` comma-separated coordinates. The box
    /// defaults to the bounding box of the points.
    pub fn read_csv<R: Read>(reader: R, bounds: Option<Vec<[f64; 2]>>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let mut points = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let p = rec
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| Error::InvalidPointSet(format!("bad coordinate {s:?}: {e}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            points.push(p);
        }
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or(Error::EmptyPointSet)?;
        let bounds = match bounds {
            Some(b) => b,
            None => (0..dim)
                .map(|a| {
                    let (mn, mx) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, p| {
                        let x = p.get(a).copied().unwrap_or(f64::NAN);
                        (acc.0.min(x), acc.1.max(x))
                    });
                    [mn, mx]
                })
                .collect(),
        };
        Self::new(dim, points, bounds)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
        for p in self.iter() {
            w.write_record(p.iter().map(|x| format!("{x}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn nearest_distance(sorted: &[f64], x: f64) -> f64 {
    let i = sorted.partition_point(|&p| p < x);
    let right = sorted.get(i).map_or(f64::INFINITY, |&p| p - x);
    let left = if i > 0 { x - sorted[i - 1] } else { f64::INFINITY };
    left.min(right)
}

/// Visits a lattice of spacing `≤ spacing` covering each `[lo, hi]` range,
/// endpoints included.
fn for_each_lattice_point<F: FnMut(&[f64])>(ranges: &[[f64; 2]], spacing: f64, mut f: F) {
    let counts: Vec<usize> = ranges
        .iter()
        .map(|r| (((r[1] - r[0]) / spacing).ceil() as usize).max(1))
        .collect();
    let mut idx = vec![0usize; ranges.len()];
    let mut x = vec![0.0; ranges.len()];
    loop {
        for a in 0..ranges.len() {
            let [lo, hi] = ranges[a];
            x[a] = lo + (hi - lo) * idx[a] as f64 / counts[a] as f64;
        }
        f(&x);
        let mut a = 0;
        loop {
            if a == ranges.len() {
                return;
            }
            idx[a] += 1;
            if idx[a] <= counts[a] {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
    }
}

/// Exact extrema of `c(x) = #{p : x ≤ p ≤ x + 2r}` over `x ∈ [lo, hi − 2r]`.
///
/// `c` is piecewise constant with breakpoints where a window edge meets a
/// point, and upper semicontinuous: maxima sit on breakpoints, minima on the
/// open pieces between them (or at the ends of the admissible range).
fn window_extrema_1d(p: &[f64], [lo, hi]: [f64; 2], r: f64) -> (usize, usize) {
    let w = 2.0 * r;
    let x_lo = lo;
    let x_hi = (hi - w).max(lo);
    let count = |x: f64| p.partition_point(|&v| v <= x + w) - p.partition_point(|&v| v < x);

    let mut breaks = vec![x_lo, x_hi];
    let mut max = count(x_lo).max(count(x_hi));
    for (i, &v) in p.iter().enumerate() {
        // left edge on p_i: every p_j ∈ [p_i, p_i + w]
        if (x_lo..=x_hi).contains(&v) {
            let c = p[i..].partition_point(|&q| q - v <= w);
            max = max.max(c);
            breaks.push(v);
        }
        // right edge on p_i: every p_j ∈ [p_i − w, p_i]
        let x = v - w;
        if (x_lo..=x_hi).contains(&x) {
            let c = i + 1 - p[..=i].partition_point(|&q| v - q > w);
            max = max.max(c);
            breaks.push(x);
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut min = count(x_lo).min(count(x_hi));
    for b in breaks.windows(2) {
        if b[1] > b[0] {
            min = min.min(count(0.5 * (b[0] + b[1])));
        }
    }
    (min, max)
}

/// Gap value; `scan_spacing` is `None` when exact (one dimension) and the
/// lattice resolution otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub rho: f64,
    pub scan_spacing: Option<f64>,
}

/// `ν⁻(r)` and `ν⁺(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowCounts {
    pub min: usize,
    pub max: usize,
    pub scan_spacing: Option<f64>,
}

/// Finite-window densities at the largest admissible half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityLimit {
    pub r: f64,
    pub d_minus: f64,
    pub d_plus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub dim: usize,
    pub r_values: Vec<f64>,
    pub nu_minus: Vec<usize>,
    pub nu_plus: Vec<usize>,
    pub d_minus: Vec<f64>,
    pub d_plus: Vec<f64>,
    pub scan_spacing: Option<f64>,
    pub extrapolated: Option<DensityLimit>,
}

impl DensityReport {
    /// CSV with header `r,nu_minus,nu_plus,d_minus,d_plus`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["r", "nu_minus", "nu_plus", "d_minus", "d_plus"])?;
        for i in 0..self.r_values.len() {
            w.write_record([
                self.r_values[i].to_string(),
                self.nu_minus[i].to_string(),
                self.nu_plus[i].to_string(),
                self.d_minus[i].to_string(),
                self.d_plus[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FramePrediction {
    pub predicted_frame: bool,
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallPrediction {
    pub predicted_frame: bool,
    pub product: f64,
}

/// `r · ρ < 1/4` for a known gap.
pub fn ball_prediction(r_ball: f64, gap: f64) -> BallPrediction {
    let product = r_ball * gap;
    BallPrediction {
        predicted_frame: product < 0.25,
        product,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_lattice(n: usize) -> PointSet {
        PointSet::from_1d((0..=n).map(|k| k as f64).collect(), 0.0, n as f64).unwrap()
    }

    /// Brute-force gap: max over a fine scan of the distance to the set.
    fn brute_gap_1d(p: &[f64], lo: f64, hi: f64, h: f64) -> f64 {
        let n = ((hi - lo) / h).ceil() as usize;
        (0..=n)
            .map(|i| {
                let x = (lo + i as f64 * h).min(hi);
                p.iter().map(|q| (q - x).abs()).fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    /// Brute-force window count extrema: scan of window positions at spacing h.
    fn brute_counts_1d(p: &[f64], lo: f64, hi: f64, r: f64, h: f64) -> (usize, usize) {
        let n = ((hi - 2.0 * r - lo) / h).ceil() as usize;
        let mut mn = usize::MAX;
        let mut mx = 0;
        for i in 0..=n {
            let x = (lo + i as f64 * h).min(hi - 2.0 * r);
            let c = p.iter().filter(|&&q| x <= q && q <= x + 2.0 * r).count();
            mn = mn.min(c);
            mx = mx.max(c);
        }
        (mn, mx)
    }

    #[test]
    fn separation_examples() {
        assert_eq!(unit_lattice(10).separation().unwrap(), 1.0);
        let ps = PointSet::from_1d(vec![1.1, 0.0, 0.3], 0.0, 1.1).unwrap();
        assert!((ps.separation().unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(ps.coords_1d().unwrap(), &[0.0, 0.3, 1.1]);
        let sq = PointSet::new(
            2,
            vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]],
            vec![[0.0, 1.0], [0.0, 1.0]],
        )
        .unwrap();
        assert_eq!(sq.separation().unwrap(), 1.0);
    }

    #[test]
    fn separation_needs_two_points() {
        let ps = PointSet::from_1d(vec![0.5], 0.0, 1.0).unwrap();
        assert!(matches!(ps.separation(), Err(Error::SeparationUndefined(1))));
    }

    #[test]
    fn rejects_duplicates_and_outside_points() {
        assert!(PointSet::from_1d(vec![0.0, 0.0], 0.0, 1.0).is_err());
        assert!(PointSet::from_1d(vec![0.0, 2.0], 0.0, 1.0).is_err());
        assert!(PointSet::new(2, vec![vec![0.0]], vec![[0.0, 1.0], [0.0, 1.0]]).is_err());
    }

    #[test]
    fn gap_examples() {
        assert_eq!(unit_lattice(10).gap().unwrap().rho, 0.5);
        let ps = PointSet::from_1d(vec![0.0, 1.0, 3.0], 0.0, 3.0).unwrap();
        assert_eq!(ps.gap().unwrap().rho, 1.0);
        assert!(PointSet::from_1d(vec![], 0.0, 1.0).unwrap().gap().is_err());
    }

    #[test]
    fn gap_of_jittered_lattice_matches_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<f64> = (0..=20)
            .map(|k| (k as f64 + rng.random_range(-0.2..=0.2)).clamp(0.0, 20.0))
            .collect();
        let ps = PointSet::from_1d(pts.clone(), 0.0, 20.0).unwrap();
        let g = ps.gap().unwrap().rho;
        assert!((0.3..=0.7).contains(&g), "gap {g}");
        let h = ps.separation().unwrap() / 100.0;
        assert!((g - brute_gap_1d(&pts, 0.0, 20.0, h)).abs() <= h);
    }

    #[test]
    fn gap_2d_scan_reports_resolution() {
        let pts: Vec<Vec<f64>> = (0..5)
            .flat_map(|i| (0..5).map(move |j| vec![i as f64, j as f64]))
            .collect();
        let ps = PointSet::new(2, pts, vec![[0.0, 4.0], [0.0, 4.0]]).unwrap();
        let g = ps.gap().unwrap();
        let exact = 0.5f64.sqrt();
        let h = g.scan_spacing.unwrap();
        assert!(h <= 0.25);
        assert!(g.rho <= exact + 1e-12 && g.rho >= exact - h);
    }

    #[test]
    fn density_half_lattice() {
        let ps = PointSet::from_1d((0..=40).map(|j| j as f64 / 2.0).collect(), 0.0, 20.0).unwrap();
        let rep = ps.beurling_density(&[5.0]).unwrap();
        // closed windows of length 10 hold 20 points, or 21 when both ends hit points
        assert_eq!((rep.nu_minus[0], rep.nu_plus[0]), (20, 21));
        assert_eq!(rep.d_minus[0], 2.0);
        assert_eq!(rep.d_plus[0], 2.1);
        let lim = rep.extrapolated.unwrap();
        assert_eq!(lim.r, 10.0);
    }

    #[test]
    fn density_unit_lattice() {
        let rep = unit_lattice(20).beurling_density(&[5.0]).unwrap();
        assert_eq!(rep.d_minus[0], 1.0);
        assert_eq!(rep.d_plus[0], 1.1);
    }

    #[test]
    fn density_window_too_large() {
        let err = unit_lattice(20).beurling_density(&[10.5]).unwrap_err();
        assert!(matches!(err, Error::WindowExceedsBox { .. }));
    }

    #[test]
    fn density_sweep_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ps = PointSet::jittered_1d(0.0, 80, 0.3, &mut rng).unwrap();
        let p = ps.coords_1d().unwrap();
        let [lo, hi] = ps.bounds()[0];
        let h = ps.separation().unwrap() / 50.0;
        for r in [2.0, 5.0, 8.0, 20.0] {
            let wc = ps.window_counts(r).unwrap();
            let (bmin, bmax) = brute_counts_1d(p, lo, hi, r, h);
            // the scan can only miss extrema, never invent them
            assert!(wc.min <= bmin && wc.max >= bmax);
            assert!(bmin - wc.min <= 1 && wc.max - bmax <= 1);
        }
    }

    #[test]
    fn jittered_density_tends_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ps = PointSet::jittered_1d(0.0, 400, 0.3, &mut rng).unwrap();
        let rep = ps.beurling_density(&[5.0, 20.0, 80.0]).unwrap();
        for i in 0..3 {
            let r = rep.r_values[i];
            assert!((rep.d_minus[i] - 1.0).abs() <= 1.0 / r + 1e-12);
            assert!((rep.d_plus[i] - 1.0).abs() <= 1.0 / r + 1e-12);
        }
    }

    #[test]
    fn density_lower_bound_from_gap() {
        for seed in 0..10 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ps = PointSet::jittered_1d(0.0, 200, 0.45, &mut rng).unwrap();
            let rho = ps.gap().unwrap().rho;
            let rs = [4.0, 10.0, 25.0, 60.0];
            let rep = ps.beurling_density(&rs).unwrap();
            for (i, r) in rs.iter().enumerate() {
                assert!(rep.d_minus[i] >= 1.0 / (2.0 * rho) - 2.0 / r);
            }
        }
    }

    #[test]
    fn density_2d_lattice_scan() {
        let pts: Vec<Vec<f64>> = (0..10)
            .flat_map(|i| (0..10).map(move |j| vec![i as f64, j as f64]))
            .collect();
        let ps = PointSet::new(2, pts, vec![[-0.5, 9.5], [-0.5, 9.5]]).unwrap();
        let rep = ps.beurling_density(&[2.0]).unwrap();
        assert!(rep.scan_spacing.is_some());
        assert_eq!(rep.nu_minus[0], 16);
        assert_eq!(rep.nu_plus[0], 25);
    }

    #[test]
    fn beurling_1d_predicate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ps = PointSet::jittered_1d(0.0, 64, 0.2, &mut rng).unwrap();
        let p = ps.beurling_1d_frame_predicate(0.8, 8.0).unwrap();
        assert!(p.predicted_frame && p.margin > 0.1);

        let even = PointSet::from_1d((0..40).map(|k| 2.0 * k as f64).collect(), 0.0, 78.0).unwrap();
        assert!(!even.beurling_1d_frame_predicate(0.8, 8.0).unwrap().predicted_frame);

        let d = unit_lattice(20).beurling_density(&[5.0]).unwrap().d_minus[0];
        let edge = unit_lattice(20).beurling_1d_frame_predicate(d, 5.0).unwrap();
        assert!(!edge.predicted_frame);
        assert_eq!(edge.margin, 0.0);
    }

    #[test]
    fn ball_predicate_boundary() {
        assert!(ball_prediction(1.0, 0.2).predicted_frame);
        assert!(!ball_prediction(1.0, 0.5).predicted_frame);
        assert!(ball_prediction(1.0, 0.24999).predicted_frame);
        assert!(!ball_prediction(1.0, 0.25).predicted_frame);
        let ps = PointSet::lattice_1d(-10.0, 0.4, 51).unwrap();
        let b = ps.beurling_ball_frame_predicate(1.0).unwrap();
        assert!((b.product - 0.2).abs() < 1e-12 && b.predicted_frame);
    }

    #[test]
    fn densify_examples() {
        let ps = PointSet::from_1d(vec![0.0, 3.0], 0.0, 3.0).unwrap();
        let d = ps.densify(0.5, 0.25).unwrap();
        assert!(d.gap().unwrap().rho <= 0.5);
        for x in ps.coords_1d().unwrap() {
            assert!(d.coords_1d().unwrap().contains(x));
        }

        let already = unit_lattice(10);
        assert_eq!(already.densify(0.5, 0.25).unwrap(), already);

        let single = PointSet::from_1d(vec![0.0], 0.0, 2.0).unwrap();
        let d = single.densify(0.5, 0.5).unwrap();
        assert!(d.len() >= 5);
        assert!(d.gap().unwrap().rho <= 0.5);

        assert!(matches!(
            ps.densify(0.2, 0.3),
            Err(Error::DensifyInfeasible { .. })
        ));
    }

    #[test]
    fn translation_invariance_of_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ps = PointSet::jittered_1d(0.0, 60, 0.35, &mut rng).unwrap();
        let shifted = ps.translated(&[123.456]).unwrap();
        let a = ps.beurling_density(&[3.0, 7.5]).unwrap();
        let b = shifted.beurling_density(&[3.0, 7.5]).unwrap();
        assert_eq!(a.nu_minus, b.nu_minus);
        assert_eq!(a.nu_plus, b.nu_plus);
    }

    #[test]
    fn csv_and_json_io() {
        let src = "# comment\n0.5\n1.5\n 3.0\n";
        let ps = PointSet::read_csv(src.as_bytes(), None).unwrap();
        assert_eq!(ps.coords_1d().unwrap(), &[0.5, 1.5, 3.0]);
        assert_eq!(ps.bounds(), &[[0.5, 3.0]]);
        let src2 = "0,0\n1,0\n0,1\n";
        let ps2 = PointSet::read_csv(src2.as_bytes(), Some(vec![[0.0, 1.0], [0.0, 1.0]])).unwrap();
        assert_eq!(ps2.dim(), 2);

        let json = r#"{"dim": 1, "box": [[0, 4]], "points": [[3], [1]]}"#;
        let ps3: PointSet = serde_json::from_str(json).unwrap();
        assert_eq!(ps3.coords_1d().unwrap(), &[1.0, 3.0]);
        let back: PointSet = serde_json::from_str(&serde_json::to_string(&ps3).unwrap()).unwrap();
        assert_eq!(back, ps3);

        let rep = ps3.beurling_density(&[1.0]).unwrap();
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("r,nu_minus,nu_plus,d_minus,d_plus\n"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn densify_contains_input_and_reduces_gap(
            raw in proptest::collection::vec(0.0f64..50.0, 1..30),
            target in 0.1f64..2.0,
            frac in 0.05f64..1.0,
        ) {
            let mut pts = raw;
            pts.sort_by(f64::total_cmp);
            pts.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
            let ps = PointSet::from_1d(pts.clone(), 0.0, 50.0).unwrap();
            let sep_min = frac * target;
            let d = ps.densify(target, sep_min).unwrap();
            prop_assert!(d.gap().unwrap().rho <= target * (1.0 + 1e-12));
            for x in &pts {
                prop_assert!(d.coords_1d().unwrap().contains(x));
            }
            if pts.len() >= 2 {
                let want = ps.separation().unwrap().min(sep_min);
                prop_assert!(d.separation().unwrap() >= want * (1.0 - 1e-12));
            }
        }

        #[test]
        fn gap_sweep_matches_scan(
            raw in proptest::collection::vec(0.0f64..10.0, 2..15),
        ) {
            let mut pts = raw;
            pts.sort_by(f64::total_cmp);
            pts.dedup_by(|a, b| (*a - *b).abs() < 1e-2);
            prop_assume!(pts.len() >= 2);
            let ps = PointSet::from_1d(pts.clone(), 0.0, 10.0).unwrap();
            let h = ps.separation().unwrap() / 100.0;
            let exact = ps.gap().unwrap().rho;
            prop_assert!((exact - brute_gap_1d(&pts, 0.0, 10.0, h)).abs() <= h);
        }
    }
}
