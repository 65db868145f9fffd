use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{SampledFunction, SynthesisSystem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructOptions {
    /// Target relative `L²` residual.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions {
            tol: 1e-10,
            max_iter: 2000,
        }
    }
}

/// Canonical frame coefficients of `f` and the relative residual of
/// `Σ c_k ψ_k` against `f`.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub coeffs: Vec<Complex64>,
    pub residual: f64,
    pub iterations: usize,
    /// Relative residual after every iteration; nonincreasing.
    pub history: Vec<f64>,
}

/// Minimum-norm coefficients `c` with `Σ c_k ψ_k = f`.
///
/// Conjugate gradients on the normal equations of the weighted synthesis
/// matrix (CGLS). Starting from zero, the iterates stay in the range of `T*`,
/// so the limit is `c = T* S⁺ f`, the analysis of the solution of `S g = f`.
/// The residual `‖f − Σ c_k ψ_k‖` is nonincreasing and the rate is governed by
/// `√(upper / lower)`.
pub fn reconstruct(
    sys: &SynthesisSystem,
    f: &SampledFunction,
    opts: &ReconstructOptions,
) -> Result<Reconstruction> {
    if !f.grid().same_as(sys.grid()) {
        return Err(Error::GridMismatch);
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    let t = sys.matrix();
    let k = sys.len();
    let rhs = DVector::from_vec(f.weighted_values());
    let rhs_norm = rhs.norm();
    let mut x = DVector::<Complex64>::zeros(k);
    if rhs_norm == 0.0 {
        return Ok(Reconstruction {
            coeffs: x.as_slice().to_vec(),
            residual: 0.0,
            iterations: 0,
            history: Vec::new(),
        });
    }
    let t_norm = t.norm();

    let mut r = rhs.clone();
    let mut s = t.ad_mul(&r);
    let mut p = s.clone();
    let mut gamma = s.norm_squared();
    let mut history = Vec::new();
    let mut best = (1.0, x.clone());

    for it in 1..=opts.max_iter {
        let q = t * &p;
        let qq = q.norm_squared();
        if qq == 0.0 {
            break;
        }
        let alpha = Complex64::new(gamma / qq, 0.0);
        x.axpy(alpha, &p, Complex64::new(1.0, 0.0));
        r.axpy(-alpha, &q, Complex64::new(1.0, 0.0));
        let res = r.norm() / rhs_norm;
        history.push(res);
        if res < best.0 {
            best = (res, x.clone());
        }
        if res <= opts.tol {
            // confirm against the explicit residual before accepting
            let exact = (&rhs - t * &x).norm() / rhs_norm;
            if exact <= opts.tol {
                return Ok(Reconstruction {
                    coeffs: x.as_slice().to_vec(),
                    residual: exact,
                    iterations: it,
                    history,
                });
            }
            r = &rhs - t * &x;
        }
        s = t.ad_mul(&r);
        let gamma_new = s.norm_squared();
        // residual numerically orthogonal to the span: nothing left to gain
        if gamma_new.sqrt() <= 1e-13 * t_norm * r.norm() {
            return Err(Error::NotInSpan {
                residual: (&rhs - t * &x).norm() / rhs_norm,
                tol: opts.tol,
            });
        }
        let beta = Complex64::new(gamma_new / gamma, 0.0);
        p = &s + &p * beta;
        gamma = gamma_new;
    }

    let best_residual = (&rhs - t * &best.1).norm() / rhs_norm;
    let r_best = &rhs - t * &best.1;
    let normal = t.ad_mul(&r_best).norm();
    if normal <= 1e-8 * t_norm * r_best.norm() {
        return Err(Error::NotInSpan {
            residual: best_residual,
            tol: opts.tol,
        });
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        best_residual,
    })
}

impl Reconstruction {
    /// `Σ c_k ψ_k`.
    pub fn synthesize(&self, sys: &SynthesisSystem) -> Result<SampledFunction> {
        sys.synthesize(&self.coeffs)
    }

    pub fn coeff_norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}
