//! Bounded subsets of the real line as finite unions of closed intervals, and
//! the midpoint quadrature grids that define the discretized `L²(E)`.
//!
//! Every function space computation in the crate happens on a [`Grid`]: the
//! inner product is `⟨f, h⟩ = Σ_i w_i f(t_i) conj(h(t_i))` with midpoint nodes
//! `t_i` and cell widths `w_i`. On `[-1/2, 1/2]` with `N` cells, the integer
//! frequencies `-N/2..N/2` are exactly orthogonal in this inner product.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framecore::SampledFunction;

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl From<[f64; 2]> for Interval {
    fn from([lo, hi]: [f64; 2]) -> Self {
        Interval { lo, hi }
    }
}

impl From<Interval> for [f64; 2] {
    fn from(iv: Interval) -> Self {
        [iv.lo, iv.hi]
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A bounded set `E ⊂ ℝ` stored as sorted, pairwise disjoint closed intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainSpec", into = "DomainSpec")]
pub struct Domain {
    intervals: Vec<Interval>,
    measure: f64,
}

/// Wire form of a [`Domain`]: `{"intervals": [[a, b], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub intervals: Vec<[f64; 2]>,
}

impl TryFrom<DomainSpec> for Domain {
    type Error = Error;

    fn try_from(spec: DomainSpec) -> Result<Self> {
        Domain::new(spec.intervals.into_iter().map(Interval::from).collect())
    }
}

impl From<Domain> for DomainSpec {
    fn from(d: Domain) -> Self {
        DomainSpec {
            intervals: d.intervals.into_iter().map(Into::into).collect(),
        }
    }
}

impl Domain {
    /// Builds a domain from intervals that must be non-degenerate and must not
    /// overlap (touching endpoints are allowed). Input order does not matter.
    pub fn new(mut intervals: Vec<Interval>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidDomain("no intervals".into()));
        }
        for iv in &intervals {
            if !(iv.lo.is_finite() && iv.hi.is_finite()) {
                return Err(Error::InvalidDomain(format!("non-finite interval {iv}")));
            }
            if iv.lo >= iv.hi {
                return Err(Error::InvalidDomain(format!("degenerate interval {iv}")));
            }
        }
        intervals.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for w in intervals.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(Error::InvalidDomain(format!(
                    "overlapping intervals {} and {}",
                    w[0], w[1]
                )));
            }
        }
        let measure = intervals.iter().map(Interval::len).sum();
        Ok(Domain { intervals, measure })
    }

    /// Single interval `[lo, hi]`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![Interval::new(lo, hi)])
    }

    /// Union of arbitrary (possibly overlapping) intervals; overlapping or
    /// touching pieces are merged.
    pub fn union(intervals: impl IntoIterator<Item = Interval>) -> Result<Self> {
        let mut ivs: Vec<Interval> = intervals.into_iter().collect();
        if ivs.is_empty() {
            return Err(Error::InvalidDomain("no intervals".into()));
        }
        ivs.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        Self::new(merge_sorted(ivs))
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    /// Lebesgue measure `|E|`.
    pub fn measure(&self) -> f64 {
        self.measure
    }

    pub fn min(&self) -> f64 {
        self.intervals[0].lo
    }

    pub fn max(&self) -> f64 {
        self.intervals[self.intervals.len() - 1].hi
    }

    /// Midpoint of the convex hull.
    pub fn center(&self) -> f64 {
        0.5 * (self.min() + self.max())
    }

    /// Smallest `r` with `E ⊆ [c - r, c + r]`, `c = center()`.
    pub fn radius(&self) -> f64 {
        0.5 * (self.max() - self.min())
    }

    /// Closed-interval membership.
    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }

    /// `true` when every interval of `self` lies inside some interval of `other`.
    pub fn is_subset_of(&self, other: &Domain) -> bool {
        self.intervals.iter().all(|iv| {
            other
                .intervals
                .iter()
                .any(|o| o.lo <= iv.lo && iv.hi <= o.hi)
        })
    }

    /// `E_δ`: every interval widened by `delta` on both sides, with pieces
    /// that touch or overlap afterwards merged.
    pub fn dilate(&self, delta: f64) -> Result<Domain> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "dilation delta must be positive, got {delta}"
            )));
        }
        let widened = self
            .intervals
            .iter()
            .map(|iv| Interval::new(iv.lo - delta, iv.hi + delta))
            .collect();
        Domain::new(merge_sorted(widened))
    }

    /// Midpoint grid with `⌈len · n_per_unit⌉` equal cells per interval.
    pub fn grid(&self, n_per_unit: usize) -> Result<Grid> {
        make_grid(self, n_per_unit)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

fn merge_sorted(ivs: Vec<Interval>) -> Vec<Interval> {
    let mut out: Vec<Interval> = Vec::with_capacity(ivs.len());
    for iv in ivs {
        match out.last_mut() {
            Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
            _ => out.push(iv),
        }
    }
    out
}

/// `E_δ` for a domain; see [`Domain::dilate`].
pub fn dilate(dom: &Domain, delta: f64) -> Result<Domain> {
    dom.dilate(delta)
}

/// Midpoint quadrature grid over a [`Domain`].
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    domain: Domain,
    n_per_unit: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// Cell width per interval of the domain.
    steps: Vec<f64>,
    /// `offsets[j]..offsets[j + 1]` indexes the nodes of interval `j`.
    offsets: Vec<usize>,
}

/// Summary of a grid's resolution, embedded in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub intervals: Vec<[f64; 2]>,
    pub n_per_unit: usize,
    pub nodes: usize,
    pub max_step: f64,
    pub measure: f64,
}

/// Builds the midpoint grid of `dom` with `⌈(b − a)·n_per_unit⌉` cells on each
/// interval `[a, b]`.
pub fn make_grid(dom: &Domain, n_per_unit: usize) -> Result<Grid> {
    if n_per_unit == 0 {
        return Err(Error::InvalidArgument("n_per_unit must be positive".into()));
    }
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut steps = Vec::with_capacity(dom.intervals.len());
    let mut offsets = vec![0];
    for iv in &dom.intervals {
        let exact = iv.len() * n_per_unit as f64;
        // absorb representation error so that e.g. 0.8 * 320 gives 256 cells
        let cells = ((exact - 1e-9 * exact.max(1.0)).ceil() as usize).max(1);
        let step = iv.len() / cells as f64;
        for j in 0..cells {
            nodes.push(iv.lo + (j as f64 + 0.5) * step);
            weights.push(step);
        }
        steps.push(step);
        offsets.push(nodes.len());
    }
    Ok(Grid {
        domain: dom.clone(),
        n_per_unit,
        nodes,
        weights,
        steps,
        offsets,
    })
}

impl Grid {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn n_per_unit(&self) -> usize {
        self.n_per_unit
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn max_step(&self) -> f64 {
        self.steps.iter().copied().fold(0.0, f64::max)
    }

    /// Node index range belonging to interval `j` of the domain.
    pub fn interval_nodes(&self, j: usize) -> std::ops::Range<usize> {
        self.offsets[j]..self.offsets[j + 1]
    }

    /// Period `1/Δ` of the sampled exponentials `λ ↦ e_λ(t_i)` (up to a
    /// unimodular phase per interval) when all intervals share one step.
    pub fn alias_period(&self) -> Option<f64> {
        let s0 = self.steps[0];
        self.steps
            .iter()
            .all(|s| (s - s0).abs() <= 1e-12 * s0)
            .then(|| 1.0 / s0)
    }

    /// Quadrature cell `[t_i − w_i/2, t_i + w_i/2]` of node `i`.
    pub fn cell(&self, i: usize) -> Interval {
        let h = 0.5 * self.weights[i];
        Interval::new(self.nodes[i] - h, self.nodes[i] + h)
    }

    /// Union of the cells of the selected nodes, or `None` if none is selected.
    pub fn cells_domain(&self, selected: &[bool]) -> Option<Domain> {
        let cells: Vec<Interval> = selected
            .iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(i, _)| self.cell(i))
            .collect();
        if cells.is_empty() {
            return None;
        }
        // adjacent cells share endpoints up to rounding; snap before merging
        let mut merged: Vec<Interval> = Vec::new();
        for c in cells {
            match merged.last_mut() {
                Some(last) if c.lo <= last.hi + 1e-12 * (1.0 + last.hi.abs()) => {
                    last.hi = last.hi.max(c.hi)
                }
                _ => merged.push(c),
            }
        }
        Domain::new(merged).ok()
    }

    /// Indicator mask of the nodes lying in `sub` (closed membership).
    pub fn mask(&self, sub: &Domain) -> Vec<bool> {
        self.nodes.iter().map(|&t| sub.contains(t)).collect()
    }

    pub fn info(&self) -> GridInfo {
        GridInfo {
            intervals: self.domain.intervals.iter().map(|&iv| iv.into()).collect(),
            n_per_unit: self.n_per_unit,
            nodes: self.len(),
            max_step: self.max_step(),
            measure: self.domain.measure,
        }
    }

    /// Quadrature `Σ_i w_i u(t_i)` of a pointwise function.
    pub fn integrate<F: Fn(f64) -> f64>(&self, u: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * u(t))
            .sum()
    }

    /// Samples a complex function at the nodes.
    pub fn sample<F: Fn(f64) -> Complex64>(self: &Arc<Self>, u: F) -> SampledFunction {
        let values = self.nodes.iter().map(|&t| u(t)).collect();
        SampledFunction::new(Arc::clone(self), values).expect("length matches by construction")
    }

    /// Samples a real function at the nodes.
    pub fn sample_real<F: Fn(f64) -> f64>(self: &Arc<Self>, u: F) -> SampledFunction {
        self.sample(|t| Complex64::new(u(t), 0.0))
    }

    /// Discrete inner product `Σ_i w_i f_i conj(h_i)`.
    pub fn inner(&self, f: &SampledFunction, h: &SampledFunction) -> Result<Complex64> {
        if !f.grid().same_as(self) || !h.grid().same_as(self) {
            return Err(Error::GridMismatch);
        }
        Ok(weighted_dot(&self.weights, f.values(), h.values()))
    }

    /// Pointer-or-value equality.
    pub fn same_as(&self, other: &Grid) -> bool {
        std::ptr::eq(self, other) || self == other
    }
}

pub(crate) fn weighted_dot(w: &[f64], f: &[Complex64], h: &[Complex64]) -> Complex64 {
    w.iter()
        .zip(f.iter().zip(h))
        .map(|(&w, (a, b))| a * b.conj() * w)
        .sum()
}

/// `⟨f, h⟩` in the discretized `L²(E)` of `g`.
pub fn inner(g: &Grid, f: &SampledFunction, h: &SampledFunction) -> Result<Complex64> {
    g.inner(f, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn exp_fn(lambda: f64) -> impl Fn(f64) -> Complex64 {
        move |t| Complex64::from_polar(1.0, -2.0 * PI * lambda * t)
    }

    #[test]
    fn dilate_single_interval() {
        let e = Domain::interval(-0.4, 0.4).unwrap();
        let d = e.dilate(0.05).unwrap();
        assert_eq!(d.intervals().len(), 1);
        assert_abs_diff_eq!(d.min(), -0.45, epsilon = 1e-15);
        assert_abs_diff_eq!(d.max(), 0.45, epsilon = 1e-15);
    }

    #[test]
    fn dilate_merges_touching_pieces() {
        let e = Domain::new(vec![Interval::new(0.0, 1.0), Interval::new(1.05, 2.0)]).unwrap();
        let d = e.dilate(0.05).unwrap();
        assert_eq!(d.intervals().len(), 1);
        assert_abs_diff_eq!(d.min(), -0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(d.max(), 2.05, epsilon = 1e-15);
    }

    #[test]
    fn dilate_keeps_separate_pieces() {
        let e = Domain::new(vec![Interval::new(0.0, 1.0), Interval::new(3.0, 4.0)]).unwrap();
        let d = e.dilate(0.1).unwrap();
        assert_eq!(d.intervals().len(), 2);
        assert_abs_diff_eq!(d.intervals()[0].lo, -0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(d.intervals()[0].hi, 1.1, epsilon = 1e-15);
        assert_abs_diff_eq!(d.intervals()[1].lo, 2.9, epsilon = 1e-15);
        assert_abs_diff_eq!(d.intervals()[1].hi, 4.1, epsilon = 1e-15);
        assert_abs_diff_eq!(d.measure(), 2.4, epsilon = 1e-12);
        assert!(e.is_subset_of(&d));
    }

    #[test]
    fn dilate_rejects_nonpositive_delta() {
        let e = Domain::interval(0.0, 1.0).unwrap();
        assert!(e.dilate(0.0).is_err());
        assert!(e.dilate(-1.0).is_err());
    }

    #[test]
    fn domain_rejects_overlap_and_degenerate() {
        assert!(Domain::new(vec![Interval::new(0.0, 1.0), Interval::new(0.5, 2.0)]).is_err());
        assert!(Domain::interval(1.0, 1.0).is_err());
        assert!(Domain::new(vec![]).is_err());
        let u = Domain::union([Interval::new(0.0, 1.0), Interval::new(0.5, 1.5)]).unwrap();
        assert_eq!(u.intervals(), &[Interval::new(0.0, 1.5)]);
    }

    #[test]
    fn radius_and_center() {
        let e = Domain::new(vec![Interval::new(3.0, 4.0), Interval::new(0.0, 1.0)]).unwrap();
        assert_eq!(e.intervals()[0], Interval::new(0.0, 1.0));
        assert_abs_diff_eq!(e.radius(), 2.0);
        assert_abs_diff_eq!(e.center(), 2.0);
    }

    #[test]
    fn small_grid_nodes() {
        let g = Domain::interval(-0.5, 0.5).unwrap().grid(4).unwrap();
        assert_eq!(g.nodes(), &[-0.375, -0.125, 0.125, 0.375]);
        assert!(g.weights().iter().all(|&w| w == 0.25));
    }

    #[test]
    fn grid_weights_sum_to_measure() {
        let e = Domain::new(vec![
            Interval::new(-1.3, -0.2),
            Interval::new(0.1, 0.77),
            Interval::new(2.0, 2.01),
        ])
        .unwrap();
        for n in [8, 13, 64, 100] {
            let g = e.grid(n).unwrap();
            let s: f64 = g.weights().iter().sum();
            assert!((s - e.measure()).abs() <= 1e-12 * e.measure());
            for (j, iv) in e.intervals().iter().enumerate() {
                for i in g.interval_nodes(j) {
                    assert!(iv.contains(g.nodes()[i]));
                }
            }
            assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn grid_cell_count_absorbs_rounding() {
        let g = Domain::interval(-0.4, 0.4).unwrap().grid(320).unwrap();
        assert_eq!(g.len(), 256);
        assert!(Domain::interval(0.0, 1.0).unwrap().grid(0).is_err());
    }

    #[test]
    fn midpoint_integrals() {
        let g = Domain::interval(0.0, 1.0).unwrap().grid(128).unwrap();
        assert_eq!(g.integrate(|_| 1.0), 1.0);
        // midpoint error is (h²/24)·∫f'' exactly for quadratics, so h²/12 for t²
        let err = (g.integrate(|t| t * t) - 1.0 / 3.0).abs();
        assert!(err < 1e-5);
        assert_abs_diff_eq!(err, (1.0 / 128.0f64).powi(2) / 12.0, epsilon = 1e-15);
    }

    #[test]
    fn midpoint_error_halves_under_refinement() {
        let e = Domain::interval(0.0, 1.0).unwrap();
        let exact = (1.0f64).sin();
        let errs: Vec<f64> = [16, 32, 64, 128]
            .iter()
            .map(|&n| (e.grid(n).unwrap().integrate(f64::cos) - exact).abs())
            .collect();
        for w in errs.windows(2) {
            assert!(w[1] <= 0.5 * w[0]);
        }
    }

    #[test]
    fn inner_indicator_and_orthogonality() {
        let g = Arc::new(Domain::interval(0.0, 1.0).unwrap().grid(64).unwrap());
        let one = g.sample_real(|_| 1.0);
        assert_abs_diff_eq!(g.inner(&one, &one).unwrap().re, 1.0, epsilon = 1e-15);

        let g = Arc::new(Domain::interval(-0.5, 0.5).unwrap().grid(64).unwrap());
        let e1 = g.sample(exp_fn(1.0));
        let e2 = g.sample(exp_fn(2.0));
        assert!(g.inner(&e1, &e2).unwrap().norm() < 1e-12);
        let e = g.sample(exp_fn(0.37));
        assert_abs_diff_eq!(g.inner(&e, &e).unwrap().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn inner_rejects_foreign_grid() {
        let g1 = Arc::new(Domain::interval(0.0, 1.0).unwrap().grid(16).unwrap());
        let g2 = Arc::new(Domain::interval(0.0, 1.0).unwrap().grid(32).unwrap());
        let f = g1.sample_real(|t| t);
        let h = g2.sample_real(|t| t);
        assert!(matches!(g1.inner(&f, &h), Err(Error::GridMismatch)));
    }

    #[test]
    fn discrete_parseval() {
        let n = 64;
        let g = Arc::new(Domain::interval(-0.5, 0.5).unwrap().grid(n).unwrap());
        let f = g.sample(|t| Complex64::new((3.0 * t).sin() + t * t, (7.0 * t).cos()));
        let energy = g.inner(&f, &f).unwrap().re;
        let sum: f64 = (-(n as i64) / 2..n as i64 / 2)
            .map(|k| g.inner(&f, &g.sample(exp_fn(k as f64))).unwrap().norm_sqr())
            .sum();
        assert!((sum - energy).abs() <= 1e-10 * energy);
    }

    #[test]
    fn domain_json_roundtrip() {
        let d: Domain = serde_json::from_str(r#"{"intervals": [[3, 4], [0, 1]]}"#).unwrap();
        assert_eq!(d.intervals().len(), 2);
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"intervals":[[0.0,1.0],[3.0,4.0]]}"#);
        assert!(serde_json::from_str::<Domain>(r#"{"intervals": [[1, 0]]}"#).is_err());
        assert!(serde_json::from_str::<Domain>(r#"{"intervals": [[0, 1]], "x": 1}"#).is_err());
    }
}
