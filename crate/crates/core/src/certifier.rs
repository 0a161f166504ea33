//! Optimality certificate for `ρ*`.
//!
//! With `f(x) = S(σ‖(1−x)ρ* + xρ)`, `ρ*` is the minimizer over separable states iff
//! `f'(0) ≥ 0` toward every product state `ρ`. The derivative is evaluated two ways that
//! share no code: the closed kernel sum over `g(n, n')`, and the spectral Fréchet
//! functional of `ln` at `ρ*`.

use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::g_matrix;
use crate::error::{Error, Result};
use crate::linalg::{relative_entropy, ComplexMatrix, ComplexVector, LogFrechet};
use crate::state::{
    closest_separable_in, random_product_state_from, sigma_in, stream_rng, CoefficientMatrix,
    CorrelatedBasis, DensityMatrix, ProductPureState, SeparableEnsemble,
};

/// Samples with a derivative below `-VIOLATION_TOL` count as violations.
pub const VIOLATION_TOL: f64 = 1e-9;
/// Required agreement between the kernel and spectral forms.
pub const AGREEMENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateReport {
    pub samples: usize,
    pub min_derivative: f64,
    pub mean_derivative: f64,
    pub violations: usize,
    /// Largest `|kernel − spectral|` over samples.
    pub method_agreement: f64,
    /// Largest `|f'(0) − 1|`; never above one for a valid certificate.
    pub max_deviation_from_one: f64,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.method_agreement <= AGREEMENT_TOL
    }
}

/// Kernel-sum evaluation `1 − Σ g(n₁,n₂)·u_{n₂}v_{n₂}·conj(u_{n₁}v_{n₁})`.
#[derive(Debug, Clone)]
pub struct KernelForm {
    g: ComplexMatrix,
    phi: ComplexMatrix,
    psi: ComplexMatrix,
}

impl KernelForm {
    pub fn new(a: &CoefficientMatrix, basis: &CorrelatedBasis) -> Self {
        let pick = |m: &ComplexMatrix| {
            let cols: Vec<ComplexVector> = a
                .indices()
                .iter()
                .map(|&k| m.column(k).into_owned())
                .collect();
            ComplexMatrix::from_columns(&cols)
        };
        Self {
            g: g_matrix(a),
            phi: pick(basis.phi()),
            psi: pick(basis.psi()),
        }
    }

    pub fn evaluate(&self, p: &ProductPureState) -> Result<f64> {
        for (expected, found) in [(self.phi.nrows(), p.d_a()), (self.psi.nrows(), p.d_b())] {
            if expected != found {
                return Err(Error::DimensionMismatch { expected, found });
            }
        }
        // projection onto the correlated sets; weight outside them drops out
        let u = self.phi.adjoint() * &p.alpha;
        let v = self.psi.adjoint() * &p.beta;
        let w = u.component_mul(&v);
        let q = (w.adjoint() * &self.g * &w)[(0, 0)];
        debug_assert!(q.im.abs() <= 1e-12, "imaginary residue {}", q.im);
        Ok(1.0 - q.re)
    }
}

/// Spectral evaluation `1 − ∫₀^∞ tr[(ρ*+t)⁻¹ σ (ρ*+t)⁻¹ ρ] dt`.
#[derive(Debug, Clone)]
pub struct SpectralForm {
    frechet: LogFrechet,
    dim: usize,
}

impl SpectralForm {
    pub fn new(sigma: &DensityMatrix, rho_star: &DensityMatrix) -> Result<Self> {
        if sigma.dim() != rho_star.dim() {
            return Err(Error::DimensionMismatch {
                expected: sigma.dim(),
                found: rho_star.dim(),
            });
        }
        Ok(Self {
            frechet: LogFrechet::new(rho_star.eigensystem(), sigma.matrix())?,
            dim: sigma.dim(),
        })
    }

    pub fn evaluate(&self, rho: &ComplexMatrix) -> Result<f64> {
        if rho.nrows() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.nrows(),
            });
        }
        Ok(1.0 - self.frechet.apply(rho))
    }

    pub fn evaluate_pure(&self, psi: &ComplexVector) -> f64 {
        1.0 - self.frechet.apply_pure(psi)
    }
}

fn default_basis(a: &CoefficientMatrix, p: &ProductPureState) -> Result<CorrelatedBasis> {
    CorrelatedBasis::new(a.original_n(), p.d_a(), p.d_b(), None, None)
}

/// `f'(0)` toward `|αβ⟩⟨αβ|` from the kernel sum, with the computational basis as the correlated basis.
pub fn derivative_kernel_form(a: &CoefficientMatrix, p: &ProductPureState) -> Result<f64> {
    KernelForm::new(a, &default_basis(a, p)?).evaluate(p)
}

/// `f'(0)` toward `ρ` from the Fréchet derivative of `ln` at `ρ*`.
pub fn derivative_spectral_form(
    sigma: &DensityMatrix,
    rho_star: &DensityMatrix,
    rho: &DensityMatrix,
) -> Result<f64> {
    SpectralForm::new(sigma, rho_star)?.evaluate(rho.matrix())
}

/// `Σᵢ rᵢ·f'(0)` toward each ensemble member.
pub fn derivative_ensemble(a: &CoefficientMatrix, e: &SeparableEnsemble) -> Result<f64> {
    let basis = CorrelatedBasis::new(a.original_n(), e.d_a(), e.d_b(), None, None)?;
    derivative_ensemble_in(a, &basis, e)
}

pub fn derivative_ensemble_in(
    a: &CoefficientMatrix,
    basis: &CorrelatedBasis,
    e: &SeparableEnsemble,
) -> Result<f64> {
    let kernel = KernelForm::new(a, basis);
    e.weights()
        .iter()
        .zip(e.states())
        .map(|(r, s)| Ok(r * kernel.evaluate(s)?))
        .sum()
}

/// Forward difference `(f(h) − f(0))/h` of `f(x) = S(σ‖(1−x)ρ* + xρ)`.
pub fn finite_difference(
    sigma: &DensityMatrix,
    rho_star: &DensityMatrix,
    rho: &DensityMatrix,
    h: f64,
) -> Result<f64> {
    let f0 = relative_entropy(sigma, rho_star)?;
    let fh = relative_entropy(sigma, &rho_star.mix(rho, h)?)?;
    Ok((fh - f0) / h)
}

/// Samples product states over the computational correlated basis with `d_A = d_B = n`.
pub fn certify(
    a: &CoefficientMatrix,
    samples: usize,
    seed: u64,
    tolerance: f64,
) -> Result<CertificateReport> {
    let n = a.original_n();
    let basis = CorrelatedBasis::new(n, n, n, None, None)?;
    certify_in(a, &basis, samples, seed, tolerance)
}

/// Sample `i` uses stream `i` of the seeded generator, so the report does not depend on scheduling.
pub fn certify_in(
    a: &CoefficientMatrix,
    basis: &CorrelatedBasis,
    samples: usize,
    seed: u64,
    tolerance: f64,
) -> Result<CertificateReport> {
    if samples == 0 {
        return Err(Error::InvalidParameters(
            "samples must be at least 1".into(),
        ));
    }
    let sigma = sigma_in(a, basis);
    let rho_star = closest_separable_in(a, basis);
    let kernel = KernelForm::new(a, basis);
    let spectral = SpectralForm::new(&sigma, &rho_star)?;
    let (da, db) = (basis.d_a(), basis.d_b());

    let values: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let p = random_product_state_from(da, db, &mut stream_rng(seed, i as u64));
            let k = kernel.evaluate(&p)?;
            let s = spectral.evaluate_pure(&p.vector());
            Ok((k, s))
        })
        .collect::<Result<_>>()?;

    let mut report = CertificateReport {
        samples,
        min_derivative: f64::INFINITY,
        mean_derivative: 0.0,
        violations: 0,
        method_agreement: 0.0,
        max_deviation_from_one: 0.0,
    };
    for &(k, s) in &values {
        report.min_derivative = report.min_derivative.min(k).min(s);
        report.mean_derivative += k;
        if k < -tolerance || s < -tolerance {
            report.violations += 1;
        }
        report.method_agreement = report.method_agreement.max((k - s).abs());
        report.max_deviation_from_one = report.max_deviation_from_one.max((k - 1.0).abs());
    }
    report.mean_derivative /= samples as f64;
    Ok(report)
}

/// Values of `f(x) = S(σ‖(1−x)ρ* + xρ)` on a grid, with chord and descent diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityProbe {
    pub points: Vec<(f64, f64)>,
    pub f0: f64,
    pub f1: f64,
    /// Largest `f(x) − [(1−x)f(0) + x f(1)]`.
    pub max_chord_excess: f64,
    /// Largest `f(0) − f(x)`.
    pub max_descent: f64,
}

pub fn convexity_probe(
    sigma: &DensityMatrix,
    rho_star: &DensityMatrix,
    rho: &DensityMatrix,
    grid: &[f64],
) -> Result<ConvexityProbe> {
    let f = |x: f64| -> Result<f64> {
        let v = relative_entropy(sigma, &rho_star.mix(rho, x)?)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::SupportViolation { overlap: f64::NAN })
        }
    };
    let f0 = f(0.0)?;
    let f1 = f(1.0)?;
    let mut probe = ConvexityProbe {
        points: Vec::with_capacity(grid.len()),
        f0,
        f1,
        max_chord_excess: f64::NEG_INFINITY,
        max_descent: f64::NEG_INFINITY,
    };
    for &x in grid {
        let fx = f(x)?;
        probe.max_chord_excess = probe.max_chord_excess.max(fx - ((1.0 - x) * f0 + x * f1));
        probe.max_descent = probe.max_descent.max(f0 - fx);
        probe.points.push((x, fx));
    }
    Ok(probe)
}
