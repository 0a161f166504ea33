//! Closed-form relative entropy of entanglement for maximally-correlated states.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eigh_unchecked, entropy_of_spectrum, log_dd};
use crate::state::CoefficientMatrix;

/// Both terms of `Er = −Σ a_nn ln a_nn − S(σ)`, kept apart so a mismatch can be traced to one of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErResult {
    pub er: f64,
    pub diagonal_entropy: f64,
    pub sigma_entropy: f64,
    /// Largest eigenvalue of a two-term coefficient matrix.
    pub lambda: Option<f64>,
}

/// Spectrum of `σ` on its support, which is the spectrum of `A`.
pub fn coefficient_spectrum(a: &CoefficientMatrix) -> Vec<f64> {
    if a.is_diagonal() {
        let mut d = a.diagonal();
        d.sort_by(f64::total_cmp);
        d
    } else {
        eigh_unchecked(a.matrix().clone()).eigenvalues
    }
}

pub fn er_closed_form(a: &CoefficientMatrix) -> ErResult {
    let mut diagonal = a.diagonal();
    diagonal.sort_by(f64::total_cmp);
    let spectrum = coefficient_spectrum(a);
    let diagonal_entropy = entropy_of_spectrum(&diagonal);
    let sigma_entropy = entropy_of_spectrum(&spectrum);
    ErResult {
        er: diagonal_entropy - sigma_entropy,
        diagonal_entropy,
        sigma_entropy,
        lambda: (a.n() == 2).then(|| spectrum[1]),
    }
}

/// `g(n, n') = a_{nn'}·(ln a_nn − ln a_n'n')/(a_nn − a_n'n')`, with `g(n, n) = 1`.
///
/// Indices refer to the retained (pruned) terms.
pub fn g_kernel(a: &CoefficientMatrix, n: usize, m: usize) -> Result<Complex64> {
    let size = a.n();
    if n >= size || m >= size {
        return Err(Error::IndexOutOfRange {
            row: n,
            col: m,
            n: size,
        });
    }
    Ok(g_entry(a, n, m))
}

#[inline]
pub(crate) fn g_entry(a: &CoefficientMatrix, n: usize, m: usize) -> Complex64 {
    if n == m {
        return Complex64::new(1.0, 0.0);
    }
    let am = a.matrix();
    am[(n, m)] * log_dd(am[(n, n)].re, am[(m, m)].re)
}

/// The full `g` matrix over retained terms.
pub fn g_matrix(a: &CoefficientMatrix) -> crate::linalg::ComplexMatrix {
    crate::linalg::ComplexMatrix::from_fn(a.n(), a.n(), |i, j| g_entry(a, i, j))
}

/// Er of `x|00⟩⟨00| + (1−x)|11⟩⟨11| + α|00⟩⟨11| + α*|11⟩⟨00|`.
pub fn two_qubit_er(x: f64, alpha: Complex64) -> Result<ErResult> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameters(format!("x = {x} outside [0, 1]")));
    }
    let a2 = alpha.norm_sqr();
    if !(a2 <= x * (1.0 - x) + 1e-12) {
        return Err(Error::InvalidParameters(format!(
            "|alpha|^2 = {a2} exceeds x(1-x) = {}",
            x * (1.0 - x)
        )));
    }
    let diagonal_entropy = entropy_of_spectrum(&sorted_pair(x, 1.0 - x));
    if alpha == Complex64::new(0.0, 0.0) {
        return Ok(ErResult {
            er: 0.0,
            diagonal_entropy,
            sigma_entropy: diagonal_entropy,
            lambda: Some(x.max(1.0 - x)),
        });
    }
    // 1 − 4[x(1−x) − |α|²] = (2x−1)² + 4|α|²
    let lambda = (0.5 * (1.0 + (2.0 * x - 1.0).hypot(2.0 * alpha.norm()))).min(1.0);
    let sigma_entropy = entropy_of_spectrum(&sorted_pair(lambda, 1.0 - lambda));
    Ok(ErResult {
        er: diagonal_entropy - sigma_entropy,
        diagonal_entropy,
        sigma_entropy,
        lambda: Some(lambda),
    })
}

fn sorted_pair(p: f64, q: f64) -> [f64; 2] {
    if p <= q {
        [p, q]
    } else {
        [q, p]
    }
}
