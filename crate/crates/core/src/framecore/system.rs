use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::domain::{weighted_dot, Grid};
use crate::error::{Error, Result};
use crate::pointset::PointSet;

/// Complex values at the nodes of a grid.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(SampledFunction { grid, values })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        SampledFunction {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `‖f‖² = ⟨f, f⟩`.
    pub fn norm_sqr(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v.norm_sqr())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self, other⟩`.
    pub fn inner(&self, other: &SampledFunction) -> Result<Complex64> {
        self.check_grid(other)?;
        Ok(weighted_dot(self.grid.weights(), &self.values, &other.values))
    }

    pub fn check_grid(&self, other: &SampledFunction) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> SampledFunction {
        SampledFunction {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> SampledFunction {
        self.map(|v| v * s)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &SampledFunction) -> Result<SampledFunction> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<SampledFunction> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn zip_with<F: Fn(Complex64, Complex64) -> Complex64>(
        &self,
        other: &SampledFunction,
        f: F,
    ) -> Result<SampledFunction> {
        self.check_grid(other)?;
        Ok(SampledFunction {
            grid: Arc::clone(&self.grid),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Pointwise modulus.
    pub fn abs_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// Values times `√w_i`, the coordinates in which the discrete `L²` norm is
    /// Euclidean.
    pub fn weighted_values(&self) -> Vec<Complex64> {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| v * w.sqrt())
            .collect()
    }

    /// Inverse of [`weighted_values`](Self::weighted_values).
    pub fn from_weighted(grid: Arc<Grid>, weighted: &[Complex64]) -> Result<Self> {
        let values = grid
            .weights()
            .iter()
            .zip(weighted)
            .map(|(w, v)| v / w.sqrt())
            .collect();
        SampledFunction::new(grid, values)
    }
}

/// `e_λ(t) = exp(−2πiλt)`.
pub fn exponential(lambda: f64, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, -2.0 * PI * lambda * t)
}

/// Finite family `{ψ_k}` on a shared grid, labelled (usually by frequency or
/// translation parameter).
#[derive(Debug, Clone)]
pub struct SynthesisSystem {
    grid: Arc<Grid>,
    members: Vec<SampledFunction>,
    labels: Vec<f64>,
    matrix: OnceLock<DMatrix<Complex64>>,
}

impl SynthesisSystem {
    pub fn new(grid: Arc<Grid>, members: Vec<SampledFunction>, labels: Vec<f64>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidArgument("system needs at least one member".into()));
        }
        if labels.len() != members.len() {
            return Err(Error::DimensionMismatch {
                expected: members.len(),
                got: labels.len(),
            });
        }
        if members.iter().any(|m| !m.grid().same_as(&grid)) {
            return Err(Error::GridMismatch);
        }
        Ok(SynthesisSystem {
            grid,
            members,
            labels,
            matrix: OnceLock::new(),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn members(&self) -> &[SampledFunction] {
        &self.members
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Weighted synthesis matrix `T[i, k] = √w_i ψ_k(t_i)` (`N × K`).
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        self.matrix.get_or_init(|| {
            let n = self.grid.len();
            let cols: Vec<Vec<Complex64>> = self
                .members
                .par_iter()
                .map(SampledFunction::weighted_values)
                .collect();
            DMatrix::from_fn(n, cols.len(), |i, k| cols[k][i])
        })
    }

    /// Members reordered by `perm` (labels follow).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let members = perm.iter().map(|&k| self.members[k].clone()).collect();
        let labels = perm.iter().map(|&k| self.labels[k]).collect();
        Self::new(Arc::clone(&self.grid), members, labels)
    }

    /// Every member multiplied pointwise by `phi`.
    pub fn multiplied(&self, phi: &SampledFunction) -> Result<Self> {
        if !phi.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        let members = self
            .members
            .iter()
            .map(|m| m.mul(phi))
            .collect::<Result<_>>()?;
        Self::new(Arc::clone(&self.grid), members, self.labels.clone())
    }

    /// Concatenation of two systems on the same grid.
    pub fn stacked(&self, other: &SynthesisSystem) -> Result<Self> {
        if !other.grid.same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        let mut members = self.members.clone();
        members.extend(other.members.iter().cloned());
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        Self::new(Arc::clone(&self.grid), members, labels)
    }

    /// Analysis coefficients `⟨f, ψ_k⟩`.
    pub fn analysis(&self, f: &SampledFunction) -> Result<Vec<Complex64>> {
        if !f.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .members
            .iter()
            .map(|m| weighted_dot(self.grid.weights(), f.values(), m.values()))
            .collect())
    }

    /// `Σ_k c_k ψ_k`.
    pub fn synthesize(&self, coeffs: &[Complex64]) -> Result<SampledFunction> {
        if coeffs.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: coeffs.len(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for (c, m) in coeffs.iter().zip(&self.members) {
            for (o, v) in out.iter_mut().zip(m.values()) {
                *o += c * v;
            }
        }
        SampledFunction::new(Arc::clone(&self.grid), out)
    }

    /// Frame operator `S f = Σ_k ⟨f, ψ_k⟩ ψ_k`.
    pub fn frame_operator_apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        let c = self.analysis(f)?;
        self.synthesize(&c)
    }

    /// Gram matrix `G[j, k] = ⟨ψ_k, ψ_j⟩`.
    pub fn gram(&self) -> DMatrix<Complex64> {
        let t = self.matrix();
        t.adjoint() * t
    }

    /// Weighted frame operator matrix `T T*` (`N × N`).
    pub fn frame_matrix(&self) -> DMatrix<Complex64> {
        let t = self.matrix();
        t * t.adjoint()
    }
}

/// `{e_{λ_k} χ_E}` sampled on `g`, labelled by `λ_k`.
pub fn exponential_system(g: &Arc<Grid>, ps: &PointSet) -> Result<SynthesisSystem> {
    let lambdas = ps.coords_1d()?.to_vec();
    exponential_system_from(g, &lambdas)
}

/// `{e_λ χ_E}` for explicit frequencies.
pub fn exponential_system_from(g: &Arc<Grid>, lambdas: &[f64]) -> Result<SynthesisSystem> {
    if lambdas.iter().any(|l| !l.is_finite()) {
        return Err(Error::InvalidArgument("non-finite frequency".into()));
    }
    let members = lambdas
        .par_iter()
        .map(|&l| g.sample(|t| exponential(l, t)))
        .collect();
    SynthesisSystem::new(Arc::clone(g), members, lambdas.to_vec())
}

/// Discrete Fourier basis of a single-interval grid with `N` nodes on an
/// interval of length `L`: frequencies `(k − ⌊N/2⌋)/L` for `k = 0..N`.
///
/// The members are orthogonal with `‖e_λ‖² = L`, so the system is tight with
/// bound `L` (an orthonormal basis when `L = 1`).
pub fn fourier_basis(g: &Arc<Grid>) -> Result<SynthesisSystem> {
    let ivs = g.domain().intervals();
    if ivs.len() != 1 {
        return Err(Error::InvalidDomain(
            "Fourier basis needs a single interval".into(),
        ));
    }
    let n = g.len();
    let len = ivs[0].len();
    let lambdas: Vec<f64> = (0..n)
        .map(|k| (k as f64 - (n / 2) as f64) / len)
        .collect();
    exponential_system_from(g, &lambdas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use approx::assert_abs_diff_eq;

    fn dft_system(n: usize) -> SynthesisSystem {
        let g = Arc::new(Domain::interval(-0.5, 0.5).unwrap().grid(n).unwrap());
        let lambdas: Vec<f64> = (0..n).map(|k| k as f64 - (n / 2) as f64).collect();
        exponential_system_from(&g, &lambdas).unwrap()
    }

    #[test]
    fn zero_frequency_is_constant() {
        let g = Arc::new(Domain::interval(0.0, 2.5).unwrap().grid(16).unwrap());
        let ps = PointSet::from_1d(vec![0.0], -1.0, 1.0).unwrap();
        let sys = exponential_system(&g, &ps).unwrap();
        let m = &sys.members()[0];
        assert!(m.values().iter().all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        assert_abs_diff_eq!(m.norm_sqr(), 2.5, epsilon = 1e-12);
    }

    #[test]
    fn conjugate_exponential_is_negative_frequency() {
        for &t in &[-0.3, 0.1, 0.77] {
            let a = exponential(1.7, t).conj();
            let b = exponential(-1.7, t);
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn dft_gram_is_identity() {
        let sys = dft_system(32);
        let g = sys.gram();
        for j in 0..32 {
            for k in 0..32 {
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((g[(j, k)] - Complex64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn duplicated_member_gram() {
        let g = Arc::new(Domain::interval(0.0, 1.0).unwrap().grid(16).unwrap());
        let psi = g.sample_real(|_| 1.0);
        let sys = SynthesisSystem::new(Arc::clone(&g), vec![psi.clone(), psi], vec![0.0, 0.0]).unwrap();
        let gm = sys.gram();
        for v in gm.iter() {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn frame_operator_on_orthonormal_basis_is_identity() {
        let sys = dft_system(16);
        let f = sys.grid_arc().sample(|t| Complex64::new(t.sin(), t * t));
        let sf = sys.frame_operator_apply(&f).unwrap();
        assert!(sf.sub(&f).unwrap().norm() < 1e-12);
    }

    #[test]
    fn frame_operator_single_member() {
        let g = Arc::new(Domain::interval(0.0, 2.0).unwrap().grid(16).unwrap());
        let psi = g.sample(|t| Complex64::new(1.0 + t, -t));
        let sys = SynthesisSystem::new(Arc::clone(&g), vec![psi.clone()], vec![0.0]).unwrap();
        let sf = sys.frame_operator_apply(&psi).unwrap();
        let want = psi.scale(Complex64::new(psi.norm_sqr(), 0.0));
        assert!(sf.sub(&want).unwrap().norm() < 1e-12 * want.norm());
    }

    #[test]
    fn frame_operator_quadratic_form_matches_analysis() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let g = Arc::new(Domain::interval(-0.4, 0.4).unwrap().grid(40).unwrap());
        let members: Vec<SampledFunction> = (0..20)
            .map(|_| {
                let vals = (0..g.len())
                    .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect();
                SampledFunction::new(Arc::clone(&g), vals).unwrap()
            })
            .collect();
        let sys = SynthesisSystem::new(Arc::clone(&g), members, (0..20).map(f64::from).collect()).unwrap();
        let vals = (0..g.len())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let f = SampledFunction::new(Arc::clone(&g), vals).unwrap();
        let q = sys.frame_operator_apply(&f).unwrap().inner(&f).unwrap();
        let direct: f64 = sys.analysis(&f).unwrap().iter().map(|c| c.norm_sqr()).sum();
        assert!(q.im.abs() < 1e-12 * direct);
        assert!((q.re - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn mismatched_grids_rejected() {
        let g1 = Arc::new(Domain::interval(0.0, 1.0).unwrap().grid(8).unwrap());
        let g2 = Arc::new(Domain::interval(0.0, 1.0).unwrap().grid(16).unwrap());
        let sys = SynthesisSystem::new(Arc::clone(&g1), vec![g1.sample_real(|t| t)], vec![0.0]).unwrap();
        assert!(sys.analysis(&g2.sample_real(|t| t)).is_err());
        assert!(SynthesisSystem::new(g1, vec![g2.sample_real(|t| t)], vec![0.0]).is_err());
    }
}
