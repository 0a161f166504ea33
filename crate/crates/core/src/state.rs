//! Bipartite states: the maximally-correlated class, product pure states and
//! separable ensembles.
//!
//! Composite index convention: `(A-index)·d_B + (B-index)`.

use std::sync::OnceLock;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, PairViolation, Result};
use crate::linalg::{
    self, eigh_unchecked, hermitian_deviation, kron_vec, outer, symmetrize, ComplexMatrix,
    ComplexVector, HermitianEigensystem, HERMITIAN_TOL,
};

/// Trace and PSD tolerance shared by density and coefficient matrices.
pub const STATE_TOL: f64 = 1e-10;
/// Diagonal entries below this are pruned from a coefficient matrix.
pub const PRUNE_FLOOR: f64 = 1e-14;
const NORM_TOL: f64 = 1e-12;
const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Deterministic per-index generator: stream `index` of the ChaCha generator seeded by `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub(crate) fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// A Hermitian, PSD, unit-trace matrix `a_{n₁n₂}` with zero-diagonal indices pruned.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    a: ComplexMatrix,
    /// Original index of each retained row/column.
    indices: Vec<usize>,
    original_n: usize,
}

impl CoefficientMatrix {
    /// The pruned matrix.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.a
    }

    /// Number of retained terms.
    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// Size of the matrix before pruning.
    pub fn original_n(&self) -> usize {
        self.original_n
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n()).map(|k| self.a[(k, k)].re).collect()
    }

    /// The matrix on the original index set, with zeros restored at pruned positions.
    pub fn unpruned(&self) -> ComplexMatrix {
        let mut full = ComplexMatrix::zeros(self.original_n, self.original_n);
        for (k, &i) in self.indices.iter().enumerate() {
            for (l, &j) in self.indices.iter().enumerate() {
                full[(i, j)] = self.a[(k, l)];
            }
        }
        full
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| i == j || self.a[(i, j)] == Complex64::new(0.0, 0.0)))
    }
}

/// Independent outcome of each coefficient test.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientDiagnostics {
    pub hermitian_deviation: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
    /// Worst violation of `|a_{nn'}|² ≤ a_{nn}·a_{n'n'}` beyond tolerance, if any.
    pub pairwise: Option<PairViolation>,
    pub pruned: Vec<usize>,
}

impl CoefficientDiagnostics {
    pub fn is_valid(&self) -> bool {
        self.hermitian_deviation <= HERMITIAN_TOL
            && (self.trace - 1.0).abs() <= STATE_TOL
            && self.min_eigenvalue >= -STATE_TOL
            && self.pairwise.is_none()
    }
}

fn worst_pair(a: &ComplexMatrix) -> Option<PairViolation> {
    let n = a.nrows();
    let mut worst: Option<PairViolation> = None;
    for i in 0..n {
        for j in (i + 1)..n {
            let excess = a[(i, j)].norm_sqr() - a[(i, i)].re * a[(j, j)].re;
            if excess > STATE_TOL && worst.is_none_or(|w| excess > w.excess) {
                worst = Some(PairViolation {
                    row: i,
                    col: j,
                    excess,
                });
            }
        }
    }
    worst
}

/// Runs the Hermiticity, trace, PSD and pairwise tests without failing fast.
pub fn diagnose_coefficients(raw: &ComplexMatrix) -> Result<CoefficientDiagnostics> {
    if !raw.is_square() || raw.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: raw.nrows(),
            cols: raw.ncols(),
        });
    }
    let dev = hermitian_deviation(raw);
    let h = (raw + raw.adjoint()).unscale(2.0);
    let trace = h.trace().re;
    let min_eigenvalue = eigh_unchecked(h.clone()).eigenvalues[0];
    let pruned = (0..h.nrows())
        .filter(|&k| h[(k, k)].re < PRUNE_FLOOR)
        .collect();
    Ok(CoefficientDiagnostics {
        hermitian_deviation: dev,
        trace,
        min_eigenvalue,
        pairwise: worst_pair(&h),
        pruned,
    })
}

/// Validates a raw coefficient matrix and prunes indices with vanishing diagonal.
pub fn validate_coefficients(raw: &ComplexMatrix) -> Result<CoefficientMatrix> {
    let diag = diagnose_coefficients(raw)?;
    if diag.hermitian_deviation > HERMITIAN_TOL {
        return Err(Error::NonHermitian {
            deviation: diag.hermitian_deviation,
        });
    }
    if !((diag.trace - 1.0).abs() <= STATE_TOL) {
        return Err(Error::TraceNotOne { trace: diag.trace });
    }
    if diag.min_eigenvalue < -STATE_TOL || diag.pairwise.is_some() {
        return Err(Error::NotPsd {
            min_eigenvalue: diag.min_eigenvalue,
            pairwise: diag.pairwise,
        });
    }
    let h = symmetrize(raw)?;
    let n = h.nrows();
    let indices: Vec<usize> = (0..n).filter(|k| !diag.pruned.contains(k)).collect();
    let a = ComplexMatrix::from_fn(indices.len(), indices.len(), |k, l| {
        h[(indices[k], indices[l])]
    });
    Ok(CoefficientMatrix {
        a,
        indices,
        original_n: n,
    })
}

/// `G·G†/tr(G·G†)` for a matrix `G` of independent standard complex Gaussians.
pub fn random_coefficient_matrix(n: usize, seed: u64) -> CoefficientMatrix {
    assert!(n >= 1, "coefficient matrix needs at least one term");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ComplexMatrix::from_fn(n, n, |_, _| gaussian_complex(&mut rng));
    let gg = &g * g.adjoint();
    let tr = gg.trace().re;
    let a = (gg.unscale(tr) + (gg.unscale(tr)).adjoint()).unscale(2.0);
    validate_coefficients(&a).expect("Gram matrix is a valid coefficient matrix")
}

/// A Haar-like random orthonormal basis of `C^d` as matrix columns (QR of a Ginibre matrix).
pub fn random_orthonormal_basis(d: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ComplexMatrix::from_fn(d, d, |_, _| gaussian_complex(&mut rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..d {
        let rjj = r[(j, j)];
        if rjj.norm() > 0.0 {
            let phase = rjj / rjj.norm();
            for i in 0..d {
                u[(i, j)] *= phase;
            }
        }
    }
    u
}

/// Validated pair of local orthonormal sets `{|φ_n⟩}`, `{|ψ_n⟩}` as matrix columns.
#[derive(Debug, Clone)]
pub struct CorrelatedBasis {
    phi: ComplexMatrix,
    psi: ComplexMatrix,
}

fn check_basis(b: &ComplexMatrix, d: usize, n: usize) -> Result<()> {
    if b.nrows() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: b.nrows(),
        });
    }
    if b.ncols() < n {
        return Err(Error::DimensionTooSmall { dim: b.ncols(), n });
    }
    let gram = b.adjoint() * b;
    let deviation = linalg::max_abs_diff(&gram, &ComplexMatrix::identity(b.ncols(), b.ncols()));
    if deviation > HERMITIAN_TOL {
        return Err(Error::NonOrthonormalBasis { deviation });
    }
    Ok(())
}

impl CorrelatedBasis {
    pub fn new(
        n: usize,
        d_a: usize,
        d_b: usize,
        basis_a: Option<&ComplexMatrix>,
        basis_b: Option<&ComplexMatrix>,
    ) -> Result<Self> {
        for d in [d_a, d_b] {
            if d < n {
                return Err(Error::DimensionTooSmall { dim: d, n });
            }
        }
        let phi = match basis_a {
            Some(b) => {
                check_basis(b, d_a, n)?;
                b.columns(0, n).into_owned()
            }
            None => ComplexMatrix::identity(d_a, n),
        };
        let psi = match basis_b {
            Some(b) => {
                check_basis(b, d_b, n)?;
                b.columns(0, n).into_owned()
            }
            None => ComplexMatrix::identity(d_b, n),
        };
        Ok(Self { phi, psi })
    }

    pub fn d_a(&self) -> usize {
        self.phi.nrows()
    }

    pub fn d_b(&self) -> usize {
        self.psi.nrows()
    }

    pub fn n(&self) -> usize {
        self.phi.ncols()
    }

    pub fn phi(&self) -> &ComplexMatrix {
        &self.phi
    }

    pub fn psi(&self) -> &ComplexMatrix {
        &self.psi
    }

    /// `|φ_k ψ_k⟩`.
    pub fn product_vector(&self, k: usize) -> ComplexVector {
        kron_vec(
            &self.phi.column(k).into_owned(),
            &self.psi.column(k).into_owned(),
        )
    }

    /// Columns `|φ_k ψ_k⟩` for the retained indices of `a`.
    fn embedding(&self, a: &CoefficientMatrix) -> ComplexMatrix {
        let cols: Vec<ComplexVector> = a
            .indices()
            .iter()
            .map(|&k| self.product_vector(k))
            .collect();
        ComplexMatrix::from_columns(&cols)
    }
}

/// A validated density operator on `C^{d_A} ⊗ C^{d_B}`.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    d_a: usize,
    d_b: usize,
    matrix: ComplexMatrix,
    eig: OnceLock<HermitianEigensystem>,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a == 0 || d_b == 0 || matrix.nrows() != d_a * d_b {
            return Err(Error::DimensionMismatch {
                expected: d_a * d_b,
                found: matrix.nrows(),
            });
        }
        let h = symmetrize(&matrix)?;
        let trace = h.trace().re;
        if !((trace - 1.0).abs() <= STATE_TOL) {
            return Err(Error::InvalidState(format!("trace {trace} is not 1")));
        }
        let eig = eigh_unchecked(h.clone());
        if eig.eigenvalues[0] < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite: min eigenvalue {:e}",
                eig.eigenvalues[0]
            )));
        }
        Ok(Self {
            d_a,
            d_b,
            matrix: h,
            eig: OnceLock::from(eig),
        })
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_parts(matrix: ComplexMatrix, d_a: usize, d_b: usize) -> Self {
        Self {
            d_a,
            d_b,
            matrix,
            eig: OnceLock::new(),
        }
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigensystem(&self) -> &HermitianEigensystem {
        self.eig.get_or_init(|| eigh_unchecked(self.matrix.clone()))
    }

    /// Transpose on subsystem B.
    pub fn partial_transpose(&self) -> ComplexMatrix {
        let (da, db) = (self.d_a, self.d_b);
        ComplexMatrix::from_fn(da * db, da * db, |r, c| {
            let (i, j) = (r / db, r % db);
            let (k, l) = (c / db, c % db);
            self.matrix[(i * db + l, k * db + j)]
        })
    }

    /// Smallest eigenvalue of the partial transpose.
    pub fn min_partial_transpose_eigenvalue(&self) -> f64 {
        eigh_unchecked(self.partial_transpose()).eigenvalues[0]
    }

    pub fn is_ppt(&self) -> bool {
        self.min_partial_transpose_eigenvalue() >= -STATE_TOL
    }

    /// `(1−x)·self + x·other`.
    pub fn mix(&self, other: &DensityMatrix, x: f64) -> Result<DensityMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::InvalidParameters(format!(
                "mixing parameter {x} outside [0, 1]"
            )));
        }
        Ok(Self::from_parts(
            self.matrix.scale(1.0 - x) + other.matrix.scale(x),
            self.d_a,
            self.d_b,
        ))
    }
}

/// `|α⟩⊗|β⟩` with unit-norm local vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductPureState {
    pub alpha: ComplexVector,
    pub beta: ComplexVector,
}

impl ProductPureState {
    pub fn new(alpha: ComplexVector, beta: ComplexVector) -> Result<Self> {
        for (name, v) in [("alpha", &alpha), ("beta", &beta)] {
            if v.is_empty() || (v.norm() - 1.0).abs() > NORM_TOL {
                return Err(Error::InvalidState(format!(
                    "{name} has norm {} (must be 1)",
                    v.norm()
                )));
            }
        }
        Ok(Self { alpha, beta })
    }

    /// Normalizes both vectors first.
    pub fn normalized(alpha: ComplexVector, beta: ComplexVector) -> Result<Self> {
        let (na, nb) = (alpha.norm(), beta.norm());
        if na == 0.0 || nb == 0.0 {
            return Err(Error::InvalidState("zero local vector".into()));
        }
        Ok(Self {
            alpha: alpha.unscale(na),
            beta: beta.unscale(nb),
        })
    }

    /// Computational basis product `|i⟩⊗|j⟩`.
    pub fn basis(d_a: usize, d_b: usize, i: usize, j: usize) -> Self {
        let mut alpha = ComplexVector::zeros(d_a);
        let mut beta = ComplexVector::zeros(d_b);
        alpha[i] = Complex64::new(1.0, 0.0);
        beta[j] = Complex64::new(1.0, 0.0);
        Self { alpha, beta }
    }

    pub fn d_a(&self) -> usize {
        self.alpha.len()
    }

    pub fn d_b(&self) -> usize {
        self.beta.len()
    }

    pub fn vector(&self) -> ComplexVector {
        kron_vec(&self.alpha, &self.beta)
    }

    pub fn projector(&self) -> ComplexMatrix {
        outer(&self.vector())
    }
}

fn fix_phase(v: &mut ComplexVector) {
    if let Some(z) = v.iter().find(|z| z.norm() > 0.0).copied() {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

pub(crate) fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexVector {
    let mut v = DVector::from_fn(d, |_, _| gaussian_complex(rng));
    let norm = v.norm();
    v.unscale_mut(norm);
    fix_phase(&mut v);
    v
}

pub(crate) fn random_product_state_from<R: Rng + ?Sized>(
    d_a: usize,
    d_b: usize,
    rng: &mut R,
) -> ProductPureState {
    let alpha = random_unit_vector(d_a, rng);
    let beta = random_unit_vector(d_b, rng);
    ProductPureState { alpha, beta }
}

/// Unitarily invariant random product state; the first nonzero component of each factor is real positive.
pub fn random_product_state(d_a: usize, d_b: usize, seed: u64) -> ProductPureState {
    random_product_state_from(d_a, d_b, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Convex mixture `Σᵢ rᵢ |αⁱβⁱ⟩⟨αⁱβⁱ|`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableEnsemble {
    weights: Vec<f64>,
    states: Vec<ProductPureState>,
}

impl SeparableEnsemble {
    pub fn new(weights: Vec<f64>, states: Vec<ProductPureState>) -> Result<Self> {
        if states.is_empty() || weights.len() != states.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} weights for {} states",
                weights.len(),
                states.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
            return Err(Error::InvalidEnsemble(format!("negative weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}")));
        }
        let (da, db) = (states[0].d_a(), states[0].d_b());
        if states.iter().any(|s| s.d_a() != da || s.d_b() != db) {
            return Err(Error::InvalidEnsemble(
                "states have differing local dimensions".into(),
            ));
        }
        Ok(Self { weights, states })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[ProductPureState] {
        &self.states
    }

    pub fn d_a(&self) -> usize {
        self.states[0].d_a()
    }

    pub fn d_b(&self) -> usize {
        self.states[0].d_b()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

pub fn ensemble_to_density(e: &SeparableEnsemble) -> Result<DensityMatrix> {
    let d = e.d_a() * e.d_b();
    let mut m = ComplexMatrix::zeros(d, d);
    for (w, s) in e.weights.iter().zip(&e.states) {
        let v = s.vector();
        m.gerc(Complex64::new(*w, 0.0), &v, &v, Complex64::new(1.0, 0.0));
    }
    DensityMatrix::new(m, e.d_a(), e.d_b())
}

/// `σ = Σ a_{n₁n₂} |φ_{n₁}ψ_{n₁}⟩⟨φ_{n₂}ψ_{n₂}|`.
pub fn build_sigma(
    a: &CoefficientMatrix,
    d_a: usize,
    d_b: usize,
    basis_a: Option<&ComplexMatrix>,
    basis_b: Option<&ComplexMatrix>,
) -> Result<DensityMatrix> {
    let basis = CorrelatedBasis::new(a.original_n(), d_a, d_b, basis_a, basis_b)?;
    Ok(sigma_in(a, &basis))
}

pub fn sigma_in(a: &CoefficientMatrix, basis: &CorrelatedBasis) -> DensityMatrix {
    let x = basis.embedding(a);
    let m = &x * a.matrix() * x.adjoint();
    DensityMatrix::from_parts((&m + m.adjoint()).unscale(2.0), basis.d_a(), basis.d_b())
}

/// `ρ* = Σ_n a_{nn} |φ_nψ_n⟩⟨φ_nψ_n|`.
pub fn closest_separable(
    a: &CoefficientMatrix,
    d_a: usize,
    d_b: usize,
    basis_a: Option<&ComplexMatrix>,
    basis_b: Option<&ComplexMatrix>,
) -> Result<DensityMatrix> {
    let basis = CorrelatedBasis::new(a.original_n(), d_a, d_b, basis_a, basis_b)?;
    Ok(closest_separable_in(a, &basis))
}

pub fn closest_separable_in(a: &CoefficientMatrix, basis: &CorrelatedBasis) -> DensityMatrix {
    let x = basis.embedding(a);
    let diag = ComplexMatrix::from_diagonal(&DVector::from_iterator(
        a.n(),
        a.diagonal().into_iter().map(|p| Complex64::new(p, 0.0)),
    ));
    let m = &x * diag * x.adjoint();
    DensityMatrix::from_parts((&m + m.adjoint()).unscale(2.0), basis.d_a(), basis.d_b())
}

/// The ensemble `{a_{nn}, |φ_n⟩⊗|ψ_n⟩}` whose density matrix is `ρ*`.
pub fn closest_separable_ensemble(
    a: &CoefficientMatrix,
    basis: &CorrelatedBasis,
) -> SeparableEnsemble {
    let states = a
        .indices()
        .iter()
        .map(|&k| ProductPureState {
            alpha: basis.phi().column(k).into_owned(),
            beta: basis.psi().column(k).into_owned(),
        })
        .collect();
    let diag = a.diagonal();
    let total: f64 = diag.iter().sum();
    let weights = diag.into_iter().map(|p| p / total).collect();
    SeparableEnsemble { weights, states }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(n: usize, v: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_row_slice(n, n, &v.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>())
    }

    fn bell() -> CoefficientMatrix {
        validate_coefficients(&real(2, &[0.5, 0.5, 0.5, 0.5])).unwrap()
    }

    #[test]
    fn single_term_is_product_projector() {
        let a = validate_coefficients(&real(1, &[1.0])).unwrap();
        let s = build_sigma(&a, 2, 3, None, None).unwrap();
        let expected = ProductPureState::basis(2, 3, 0, 0).projector();
        assert_eq!(s.matrix(), &expected);
    }

    #[test]
    fn bell_sigma_and_closest() {
        let a = bell();
        let s = build_sigma(&a, 2, 2, None, None).unwrap();
        let mut expected = ComplexMatrix::zeros(4, 4);
        for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            expected[(i, j)] = c(0.5, 0.0);
        }
        assert!(linalg::max_abs_diff(s.matrix(), &expected) <= 1e-15);

        let r = closest_separable(&a, 2, 2, None, None).unwrap();
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected[(0, 0)] = c(0.5, 0.0);
        expected[(3, 3)] = c(0.5, 0.0);
        assert_eq!(r.matrix(), &expected);

        let e = SeparableEnsemble::new(
            vec![0.5, 0.5],
            vec![
                ProductPureState::basis(2, 2, 0, 0),
                ProductPureState::basis(2, 2, 1, 1),
            ],
        )
        .unwrap();
        assert_eq!(ensemble_to_density(&e).unwrap().matrix(), &expected);
    }

    #[test]
    fn two_qubit_family_layout() {
        let (x, alpha) = (0.3, c(0.2, -0.3));
        let raw =
            ComplexMatrix::from_row_slice(2, 2, &[c(x, 0.0), alpha, alpha.conj(), c(1.0 - x, 0.0)]);
        let a = validate_coefficients(&raw).unwrap();
        let s = build_sigma(&a, 2, 2, None, None).unwrap();
        assert_abs_diff_eq!(s.matrix()[(0, 0)].re, x, epsilon = 1e-15);
        assert_abs_diff_eq!(s.matrix()[(3, 3)].re, 1.0 - x, epsilon = 1e-15);
        assert!((s.matrix()[(0, 3)] - alpha).norm() < 1e-15);
        assert!((s.matrix()[(3, 0)] - alpha.conj()).norm() < 1e-15);
        let r = closest_separable(&a, 2, 2, None, None).unwrap();
        assert_abs_diff_eq!(r.matrix()[(0, 0)].re, x, epsilon = 1e-15);
        assert_abs_diff_eq!(r.matrix()[(3, 3)].re, 1.0 - x, epsilon = 1e-15);
        assert_eq!(r.matrix()[(0, 3)], c(0.0, 0.0));
    }

    #[test]
    fn diagonal_coefficients_are_already_separable() {
        let a = validate_coefficients(&real(3, &[0.2, 0., 0., 0., 0.5, 0., 0., 0., 0.3])).unwrap();
        let s = build_sigma(&a, 3, 3, None, None).unwrap();
        let r = closest_separable(&a, 3, 3, None, None).unwrap();
        assert!(linalg::max_abs_diff(s.matrix(), r.matrix()) <= 1e-15);
    }

    #[test]
    fn validation_errors() {
        assert!(validate_coefficients(&real(2, &[0.5, 0.5, 0.5, 0.5])).is_ok());
        match validate_coefficients(&real(2, &[0.5, 0.6, 0.6, 0.5])) {
            Err(Error::NotPsd {
                min_eigenvalue,
                pairwise,
            }) => {
                assert_abs_diff_eq!(min_eigenvalue, -0.1, epsilon = 1e-12);
                let p = pairwise.expect("pairwise bound violated");
                assert_abs_diff_eq!(p.excess, 0.36 - 0.25, epsilon = 1e-12);
            }
            other => panic!("expected NotPsd, got {other:?}"),
        }
        assert!(matches!(
            validate_coefficients(&real(2, &[0.5, 0.0, 0.0, 0.5000002])),
            Err(Error::TraceNotOne { .. })
        ));
        let skew = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.5, 0.), c(0.1, 0.1), c(0.1, 0.1), c(0.5, 0.)],
        );
        assert!(matches!(
            validate_coefficients(&skew),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn zero_diagonal_is_pruned() {
        let raw = real(3, &[0.4, 0.0, 0.2, 0.0, 0.0, 0.0, 0.2, 0.0, 0.6]);
        let a = validate_coefficients(&raw).unwrap();
        assert_eq!(a.n(), 2);
        assert_eq!(a.indices(), &[0, 2]);
        assert_eq!(a.unpruned(), raw);
        // operator equals the direct unpruned sum
        let s = build_sigma(&a, 3, 3, None, None).unwrap();
        let mut direct = ComplexMatrix::zeros(9, 9);
        for i in 0..3 {
            for j in 0..3 {
                direct[(i * 3 + i, j * 3 + j)] = raw[(i, j)];
            }
        }
        assert!(linalg::max_abs_diff(s.matrix(), &direct) <= 1e-15);
    }

    #[test]
    fn build_sigma_errors() {
        let a = random_coefficient_matrix(3, 1);
        assert!(matches!(
            build_sigma(&a, 2, 3, None, None),
            Err(Error::DimensionTooSmall { .. })
        ));
        let mut bad = ComplexMatrix::identity(3, 3);
        bad[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(
            build_sigma(&a, 3, 3, Some(&bad), None),
            Err(Error::NonOrthonormalBasis { .. })
        ));
    }

    #[test]
    fn random_coefficients() {
        assert_eq!(random_coefficient_matrix(1, 99).matrix(), &real(1, &[1.0]));
        let a = random_coefficient_matrix(3, 42);
        assert!(diagnose_coefficients(a.matrix()).unwrap().is_valid());
        assert!(validate_coefficients(a.matrix()).is_ok());
        assert_eq!(a, random_coefficient_matrix(3, 42));
    }

    #[test]
    fn random_product_states() {
        let p = random_product_state(1, 1, 17);
        assert_eq!(p.alpha[0], c(1.0, 0.0));
        assert_eq!(p.beta[0], c(1.0, 0.0));
        let q = random_product_state(2, 2, 7);
        assert_abs_diff_eq!(q.alpha.norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q.beta.norm(), 1.0, epsilon = 1e-12);
        assert_eq!(q, random_product_state(2, 2, 7));
        assert_eq!(q.alpha[0].im, 0.0);
        assert!(q.alpha[0].re > 0.0);
    }

    #[test]
    fn ensemble_validation() {
        let s = ProductPureState::basis(2, 2, 0, 0);
        assert!(SeparableEnsemble::new(vec![0.5, 0.4], vec![s.clone(), s.clone()]).is_err());
        assert!(SeparableEnsemble::new(vec![1.5, -0.5], vec![s.clone(), s.clone()]).is_err());
        assert!(SeparableEnsemble::new(vec![1.0], vec![]).is_err());
        let other = ProductPureState::basis(3, 2, 0, 0);
        assert!(SeparableEnsemble::new(vec![0.5, 0.5], vec![s.clone(), other]).is_err());
        let single = SeparableEnsemble::new(vec![1.0], vec![s.clone()]).unwrap();
        assert_eq!(
            ensemble_to_density(&single).unwrap().matrix(),
            &s.projector()
        );
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::identity(4, 4), 2, 2).is_err());
        assert!(DensityMatrix::new(real(2, &[1.5, 0.0, 0.0, -0.5]), 2, 1).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::identity(4, 4).unscale(4.0), 3, 1).is_err());
    }

    #[test]
    fn bell_is_not_ppt() {
        let s = build_sigma(&bell(), 2, 2, None, None).unwrap();
        assert_abs_diff_eq!(s.min_partial_transpose_eigenvalue(), -0.5, epsilon = 1e-12);
        assert!(!s.is_ppt());
    }

    #[test]
    fn random_basis_is_unitary() {
        let u = random_orthonormal_basis(4, 3);
        let g = u.adjoint() * &u;
        assert!(linalg::max_abs_diff(&g, &ComplexMatrix::identity(4, 4)) <= 1e-12);
    }
}
