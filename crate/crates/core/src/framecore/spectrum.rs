use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SynthesisSystem;
use crate::domain::GridInfo;
use crate::error::{Error, Result};

/// Relative tolerance separating retained from discarded eigenvalues.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;
/// Relative spread below which a frame counts as tight.
pub const TIGHT_TOL: f64 = 1e-8;
/// Largest dimension for which both `T T*` and `T* T` are diagonalized.
const CROSS_CHECK_MAX_DIM: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsOptions {
    pub rank_tol: f64,
    /// Upper bound the caller expects; when given, `bessel` records
    /// `upper ≤ bessel_bound`.
    pub bessel_bound: Option<f64>,
}

impl Default for BoundsOptions {
    fn default() -> Self {
        BoundsOptions {
            rank_tol: DEFAULT_RANK_TOL,
            bessel_bound: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameFlags {
    pub bessel: bool,
    pub frame_for_whole_space: bool,
    pub frame_sequence: bool,
    pub riesz_sequence: bool,
    pub tight: bool,
}

/// Measured frame bounds and classification of a finite system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    /// Smallest retained eigenvalue of the frame operator.
    pub lower: f64,
    /// Largest eigenvalue of the frame operator.
    pub upper: f64,
    pub rank: usize,
    pub dim_space: usize,
    pub members: usize,
    pub rank_tol: f64,
    pub flags: FrameFlags,
    /// Extreme eigenvalues of the Gram matrix (Riesz constants).
    pub gram_min: f64,
    pub gram_max: f64,
    /// Largest discrepancy between the nonzero spectra of `T T*` and `T* T`,
    /// relative to `upper`; `None` when only one side was diagonalized.
    pub cross_check: Option<f64>,
    pub resolution: GridInfo,
    /// Full frame-operator spectrum, ascending.
    pub spectrum: Vec<f64>,
}

impl FrameReport {
    /// Ratio `upper / lower` (infinite when nothing is retained).
    pub fn condition(&self) -> f64 {
        if self.lower > 0.0 {
            self.upper / self.lower
        } else {
            f64::INFINITY
        }
    }

    /// CSV `index,eigenvalue` dump of the spectrum.
    pub fn write_spectrum_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["index", "eigenvalue"])?;
        for (i, v) in self.spectrum.iter().enumerate() {
            w.write_record([i.to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: DMatrix<Complex64>) -> Result<Vec<f64>> {
    let dim = m.nrows();
    if dim == 0 {
        return Ok(Vec::new());
    }
    let max_iter = 1000 * dim;
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, max_iter)
        .ok_or(Error::EigenNonConvergence { dim, max_iter })?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

pub fn measure_bounds(sys: &SynthesisSystem) -> Result<FrameReport> {
    measure_bounds_with(sys, &BoundsOptions::default())
}

/// Frame bounds from the spectrum of the weighted frame operator.
///
/// The smaller of `T T*` (`N × N`) and `T* T` (`K × K`) is diagonalized; both
/// are when each side fits under a few hundred rows, and their nonzero spectra
/// are compared.
pub fn measure_bounds_with(sys: &SynthesisSystem, opts: &BoundsOptions) -> Result<FrameReport> {
    if !(opts.rank_tol > 0.0) {
        return Err(Error::InvalidArgument("rank_tol must be positive".into()));
    }
    let n = sys.grid().len();
    let k = sys.len();
    let both = n.max(k) <= CROSS_CHECK_MAX_DIM;

    let (s_spec, g_spec) = if n <= k {
        let s = hermitian_eigenvalues(sys.frame_matrix())?;
        let g = if both {
            Some(hermitian_eigenvalues(sys.gram())?)
        } else {
            None
        };
        (s, g)
    } else {
        let g = hermitian_eigenvalues(sys.gram())?;
        let s = if both {
            hermitian_eigenvalues(sys.frame_matrix())?
        } else {
            let mut s = vec![0.0; n - k];
            s.extend_from_slice(&g);
            s
        };
        (s, Some(g))
    };

    let upper = s_spec.last().copied().unwrap_or(0.0).max(0.0);
    let cut = opts.rank_tol * upper;
    let retained: Vec<f64> = s_spec.iter().copied().filter(|&v| upper > 0.0 && v > cut).collect();
    let rank = retained.len();
    let lower = retained.first().copied().unwrap_or(0.0);

    let (gram_min, gram_max) = match &g_spec {
        Some(g) => (g[0].max(0.0), g[g.len() - 1].max(0.0)),
        // K > N here, so the Gram matrix is singular
        None => (0.0, upper),
    };

    let cross_check = g_spec.as_ref().filter(|_| both).map(|g| {
        let m = n.min(k);
        let top_s = &s_spec[s_spec.len() - m..];
        let top_g = &g[g.len() - m..];
        let scale = upper.max(f64::MIN_POSITIVE);
        top_s
            .iter()
            .zip(top_g)
            .map(|(a, b)| (a - b).abs() / scale)
            .fold(0.0, f64::max)
    });

    let flags = FrameFlags {
        bessel: opts.bessel_bound.is_none_or(|b| upper <= b),
        frame_for_whole_space: rank == n && upper > 0.0,
        frame_sequence: rank > 0,
        riesz_sequence: gram_max > 0.0 && gram_min > opts.rank_tol * gram_max,
        tight: rank > 0 && (upper - lower) <= TIGHT_TOL * upper,
    };

    Ok(FrameReport {
        lower,
        upper,
        rank,
        dim_space: n,
        members: k,
        rank_tol: opts.rank_tol,
        flags,
        gram_min,
        gram_max,
        cross_check,
        resolution: sys.grid().info(),
        spectrum: s_spec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::framecore::{exponential_system, SampledFunction};
    use crate::pointset::PointSet;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn dft(n: usize, count: usize) -> SynthesisSystem {
        let g = Arc::new(Domain::interval(-0.5, 0.5).unwrap().grid(n).unwrap());
        let ps = PointSet::lattice_1d(-((n / 2) as f64), 1.0, count).unwrap();
        exponential_system(&g, &ps).unwrap()
    }

    fn jittered_system(seed: u64) -> SynthesisSystem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ps = PointSet::jittered_1d(-16.0, 32, 0.2, &mut rng).unwrap();
        let g = Arc::new(Domain::interval(-0.4, 0.4).unwrap().grid(32).unwrap());
        exponential_system(&g, &ps).unwrap()
    }

    #[test]
    fn dft_system_is_tight_parseval() {
        let rep = measure_bounds(&dft(64, 64)).unwrap();
        assert_abs_diff_eq!(rep.lower, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(rep.upper, 1.0, epsilon = 1e-10);
        assert!(rep.flags.tight && rep.flags.frame_for_whole_space && rep.flags.riesz_sequence);
        assert_eq!(rep.rank, 64);
        assert!(rep.cross_check.unwrap() < 1e-9);
    }

    #[test]
    fn duplicated_basis_has_bound_two() {
        let base = dft(32, 32);
        let doubled = base.stacked(&base).unwrap();
        let rep = measure_bounds(&doubled).unwrap();
        assert_abs_diff_eq!(rep.lower, 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(rep.upper, 2.0, epsilon = 1e-10);
        assert!(rep.flags.tight && rep.flags.frame_for_whole_space);
        assert!(!rep.flags.riesz_sequence);
    }

    #[test]
    fn half_basis_is_frame_sequence_only() {
        let rep = measure_bounds(&dft(64, 32)).unwrap();
        assert_eq!(rep.rank, 32);
        assert!(rep.flags.frame_sequence && !rep.flags.frame_for_whole_space);
        assert!(rep.flags.riesz_sequence && rep.flags.tight);
        assert_abs_diff_eq!(rep.lower, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(rep.upper, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn zero_system_is_degenerate() {
        let g = Arc::new(Domain::interval(0.0, 1.0).unwrap().grid(8).unwrap());
        let sys = SynthesisSystem::new(Arc::clone(&g), vec![SampledFunction::zeros(g)], vec![0.0]).unwrap();
        let rep = measure_bounds(&sys).unwrap();
        assert_eq!((rep.lower, rep.upper, rep.rank), (0.0, 0.0, 0));
        assert!(rep.flags.bessel && !rep.flags.frame_sequence && !rep.flags.tight);
    }

    #[test]
    fn bessel_flag_honours_caller_bound() {
        let sys = dft(16, 16);
        let rep = measure_bounds_with(&sys, &BoundsOptions { rank_tol: 1e-8, bessel_bound: Some(0.5) }).unwrap();
        assert!(!rep.flags.bessel);
        let rep = measure_bounds_with(&sys, &BoundsOptions { rank_tol: 1e-8, bessel_bound: Some(1.5) }).unwrap();
        assert!(rep.flags.bessel);
    }

    #[test]
    fn spectra_of_s_and_g_agree() {
        for seed in 0..4 {
            let rep = measure_bounds(&jittered_system(seed)).unwrap();
            assert!(rep.cross_check.unwrap() < 1e-9);
            assert!(rep.flags.frame_for_whole_space);
        }
    }

    #[test]
    fn frame_inequality_holds_on_random_elements() {
        let sys = jittered_system(9);
        let rep = measure_bounds(&sys).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let coeffs: Vec<Complex64> = (0..sys.len())
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let f = sys.synthesize(&coeffs).unwrap();
            let nf = f.norm_sqr();
            let sum: f64 = sys.analysis(&f).unwrap().iter().map(|c| c.norm_sqr()).sum();
            assert!(rep.lower * nf <= sum * (1.0 + 1e-9));
            assert!(sum <= rep.upper * nf * (1.0 + 1e-9));
        }
    }

    #[test]
    fn spectrum_csv_has_header() {
        let rep = measure_bounds(&dft(8, 8)).unwrap();
        let mut buf = Vec::new();
        rep.write_spectrum_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("index,eigenvalue\n0,"));
        assert_eq!(text.lines().count(), 9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn report_invariant_under_permutation_and_scaling(seed in 0u64..1000, s in 0.1f64..5.0) {
            let sys = jittered_system(seed);
            let base = measure_bounds(&sys).unwrap();

            let mut perm: Vec<usize> = (0..sys.len()).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in (1..perm.len()).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            let p = measure_bounds(&sys.permuted(&perm).unwrap()).unwrap();
            prop_assert!((p.lower - base.lower).abs() <= 1e-10 * base.upper);
            prop_assert!((p.upper - base.upper).abs() <= 1e-10 * base.upper);
            prop_assert_eq!(p.rank, base.rank);
            prop_assert_eq!(p.flags, base.flags);

            let phi = sys.grid_arc().sample_real(|_| s);
            let scaled = measure_bounds(&sys.multiplied(&phi).unwrap()).unwrap();
            prop_assert!((scaled.lower - s * s * base.lower).abs() <= 1e-9 * s * s * base.upper);
            prop_assert!((scaled.upper - s * s * base.upper).abs() <= 1e-9 * s * s * base.upper);
        }
    }
}
