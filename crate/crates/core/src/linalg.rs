//! Dense complex Hermitian linear algebra.
//!
//! Everything here works in nats. Eigenvalues at or below [`EIGEN_FLOOR`] are
//! treated as exact zeros, both for entropies and for support tests.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::DensityMatrix;

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Maximum tolerated `|M_ij - conj(M_ji)|` for a matrix treated as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues at or below this are zero.
pub const EIGEN_FLOOR: f64 = 1e-14;
/// Weight on a null eigenvector above this breaks the support condition.
pub const SUPPORT_TOL: f64 = 1e-10;

/// Largest `|M_ij - conj(M_ji)|`.
pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Checks Hermiticity within [`HERMITIAN_TOL`] and returns `(M + M†)/2`.
pub fn symmetrize(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let deviation = hermitian_deviation(m);
    if !(deviation <= HERMITIAN_TOL) {
        return Err(Error::NonHermitian { deviation });
    }
    Ok((m + m.adjoint()).unscale(2.0))
}

/// Eigenvalues in ascending order with the matching unitary of column eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigensystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigensystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V·diag(λ)·V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(l);
        }
        scaled * v.adjoint()
    }

    /// `V†·M·V`, i.e. `M` expressed in the eigenbasis.
    pub fn rotate_into(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.eigenvectors.adjoint() * m * &self.eigenvectors
    }

    /// `V·f(λ)·V†` for a real function of the eigenvalues.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(f(l));
        }
        scaled * v.adjoint()
    }
}

/// Eigendecomposition of a Hermitian matrix.
pub fn eigh(m: &ComplexMatrix) -> Result<HermitianEigensystem> {
    let h = symmetrize(m)?;
    Ok(eigh_unchecked(h))
}

pub(crate) fn eigh_unchecked(h: ComplexMatrix) -> HermitianEigensystem {
    let n = h.nrows();
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    HermitianEigensystem {
        eigenvalues,
        eigenvectors,
    }
}

/// `-Σ p ln p` with `0·ln 0 = 0` and the eigenvalue floor applied.
pub fn entropy_of_spectrum(spectrum: &[f64]) -> f64 {
    let sum: f64 = spectrum
        .iter()
        .filter(|&&p| p > EIGEN_FLOOR)
        .map(|&p| p * p.ln())
        .sum();
    // avoids a negative zero for pure spectra
    0.0 - sum
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigensystem().eigenvalues)
}

/// `tr{σ(ln σ − ln ρ)}`, or `+∞` when the support of `σ` is not inside that of `ρ`.
pub fn relative_entropy(sigma: &DensityMatrix, rho: &DensityMatrix) -> Result<f64> {
    if sigma.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            found: rho.dim(),
        });
    }
    let sigma_log_sigma = -von_neumann_entropy(sigma);
    Ok(relative_entropy_with(
        sigma_log_sigma,
        sigma.matrix(),
        rho.eigensystem(),
    ))
}

/// Relative entropy given `tr σ ln σ` and a prepared eigensystem of `ρ`.
pub(crate) fn relative_entropy_with(
    sigma_log_sigma: f64,
    sigma: &ComplexMatrix,
    rho: &HermitianEigensystem,
) -> f64 {
    let mut cross = 0.0;
    for (i, &l) in rho.eigenvalues.iter().enumerate() {
        let v = rho.eigenvectors.column(i);
        let overlap = (v.adjoint() * sigma * v)[(0, 0)].re;
        if l <= EIGEN_FLOOR {
            if overlap > SUPPORT_TOL {
                return f64::INFINITY;
            }
        } else {
            cross += overlap * l.ln();
        }
    }
    (sigma_log_sigma - cross).max(0.0)
}

/// `(ln λ1 − ln λ2)/(λ1 − λ2)`, equal to `∫₀^∞ (λ1+t)⁻¹(λ2+t)⁻¹ dt`.
pub fn log_divided_difference(l1: f64, l2: f64) -> Result<f64> {
    if !(l1 > 0.0) {
        return Err(Error::NonPositiveEigenvalue(l1));
    }
    if !(l2 > 0.0) {
        return Err(Error::NonPositiveEigenvalue(l2));
    }
    Ok(log_dd(l1, l2))
}

#[inline]
pub(crate) fn log_dd(l1: f64, l2: f64) -> f64 {
    // argument order fixed so the result is exactly symmetric
    let (l1, l2) = if l1 >= l2 { (l1, l2) } else { (l2, l1) };
    let s = l1 + l2;
    let r = (l1 - l2) / s;
    let ar = r.abs();
    if ar < 1e-4 {
        let r2 = r * r;
        (2.0 / s) * (1.0 + r2 / 3.0 + r2 * r2 / 5.0)
    } else if ar <= 0.5 {
        (2.0 / s) * r.atanh() / r
    } else {
        // well separated: 1 − |r| would lose digits inside atanh
        (l1.ln() - l2.ln()) / (l1 - l2)
    }
}

/// The linear functional `D ↦ ∫₀^∞ tr[(B+t)⁻¹ W (B+t)⁻¹ D] dt` for fixed base `B`
/// and weight `W`, held as the Hermitian operator `M` with value `tr(M·D)`.
#[derive(Debug, Clone)]
pub struct LogFrechet {
    operator: ComplexMatrix,
}

impl LogFrechet {
    pub fn new(base: &HermitianEigensystem, weight: &ComplexMatrix) -> Result<Self> {
        let d = base.dim();
        if weight.nrows() != d || weight.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: weight.nrows(),
            });
        }
        let w = base.rotate_into(weight);
        let support: Vec<bool> = base.eigenvalues.iter().map(|&l| l > EIGEN_FLOOR).collect();
        let mut kw = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            if !support[i] {
                let overlap = w.row(i).iter().map(|z| z.norm()).fold(0.0, f64::max);
                if overlap > SUPPORT_TOL {
                    return Err(Error::SupportViolation { overlap });
                }
                continue;
            }
            for j in 0..d {
                if support[j] {
                    kw[(i, j)] = w[(i, j)] * log_dd(base.eigenvalues[i], base.eigenvalues[j]);
                }
            }
        }
        let v = &base.eigenvectors;
        Ok(Self {
            operator: v * kw * v.adjoint(),
        })
    }

    pub fn operator(&self) -> &ComplexMatrix {
        &self.operator
    }

    /// `tr(M·D)`, real part.
    pub fn apply(&self, direction: &ComplexMatrix) -> f64 {
        self.operator
            .iter()
            .zip(direction.transpose().iter())
            .map(|(m, d)| (m * d).re)
            .sum()
    }

    /// `⟨ψ|M|ψ⟩` for the rank-one direction `|ψ⟩⟨ψ|`.
    pub fn apply_pure(&self, psi: &ComplexVector) -> f64 {
        (psi.adjoint() * &self.operator * psi)[(0, 0)].re
    }
}

/// `∫₀^∞ tr[(base+t)⁻¹·weight·(base+t)⁻¹·direction] dt`.
pub fn frechet_log_trace(
    base: &DensityMatrix,
    weight: &ComplexMatrix,
    direction: &ComplexMatrix,
) -> Result<f64> {
    let d = base.dim();
    for m in [weight, direction] {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: m.nrows(),
            });
        }
        let deviation = hermitian_deviation(m);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NonHermitian { deviation });
        }
    }
    Ok(LogFrechet::new(base.eigensystem(), weight)?.apply(direction))
}

/// Kronecker product `a ⊗ b` of two vectors, index `i·dim(b) + j`.
pub fn kron_vec(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    let db = b.len();
    ComplexVector::from_fn(a.len() * db, |k, _| a[k / db] * b[k % db])
}

pub fn outer(psi: &ComplexVector) -> ComplexMatrix {
    psi * psi.adjoint()
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
