//! Direct numerical minimization of `S(σ‖ρ)` over separable ensembles.
//!
//! This module is an independent oracle and must not use the closed form.
//! An ensemble of `K` product states is encoded as a flat real vector:
//! for each state the real parts then imaginary parts of the A factor, then the same for the
//! B factor, followed by `K` weight parameters `θ` with `rᵢ = θᵢ²/Σθ²`. Factors are normalized on
//! decode, so every parameter vector is feasible.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lbfgs::{self, LbfgsOptions};
use crate::linalg::{
    eigh_unchecked, relative_entropy, relative_entropy_with, von_neumann_entropy, ComplexMatrix,
    ComplexVector, LogFrechet,
};
use crate::state::{
    ensemble_to_density, gaussian_complex, stream_rng, DensityMatrix, ProductPureState,
    SeparableEnsemble,
};

/// Objective value reported when the decoded state misses part of the support of `σ`.
pub const SENTINEL: f64 = 1e6;
/// Largest `d_A·d_B` accepted without `force`.
pub const DESK_SCALE_LIMIT: usize = 16;
/// Allowed gap between the numerical minimum and the claimed value in the sandwich check.
pub const SANDWICH_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeConfig {
    /// Ensemble size; `None` means `d_A²·d_B²`.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
    /// Lift the desk-scale dimension limit.
    pub force: bool,
}

impl Default for MinimizeConfig {
    fn default() -> Self {
        Self {
            ensemble_size: None,
            restarts: 20,
            max_iterations: 5000,
            tolerance: 1e-8,
            seed: 0,
            force: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartOutcome {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub value: f64,
    pub ensemble: SeparableEnsemble,
    pub restarts_converged: usize,
    pub best_restart_index: usize,
    pub restarts: Vec<RestartOutcome>,
}

impl MinimizeResult {
    pub fn converged(&self) -> bool {
        self.restarts_converged > 0
    }
}

/// Layout of the flat parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Parameterization {
    pub d_a: usize,
    pub d_b: usize,
    pub ensemble_size: usize,
}

impl Parameterization {
    pub fn new(d_a: usize, d_b: usize, ensemble_size: usize) -> Self {
        Self {
            d_a,
            d_b,
            ensemble_size,
        }
    }

    fn block(&self) -> usize {
        2 * (self.d_a + self.d_b)
    }

    pub fn len(&self) -> usize {
        self.ensemble_size * (self.block() + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn factors(&self, params: &[f64], i: usize) -> (ComplexVector, ComplexVector) {
        let (da, db) = (self.d_a, self.d_b);
        let o = i * self.block();
        let a =
            ComplexVector::from_fn(da, |p, _| Complex64::new(params[o + p], params[o + da + p]));
        let ob = o + 2 * da;
        let b = ComplexVector::from_fn(db, |q, _| {
            Complex64::new(params[ob + q], params[ob + db + q])
        });
        (a, b)
    }

    fn thetas<'a>(&self, params: &'a [f64]) -> &'a [f64] {
        &params[self.ensemble_size * self.block()..]
    }

    pub fn decode(&self, params: &[f64]) -> SeparableEnsemble {
        assert_eq!(params.len(), self.len(), "parameter vector length");
        let thetas = self.thetas(params);
        let total: f64 = thetas.iter().map(|t| t * t).sum();
        let weights: Vec<f64> = if total > 0.0 {
            thetas.iter().map(|t| t * t / total).collect()
        } else {
            vec![1.0 / self.ensemble_size as f64; self.ensemble_size]
        };
        let states = (0..self.ensemble_size)
            .map(|i| {
                let (a, b) = self.factors(params, i);
                ProductPureState {
                    alpha: unit_or_first(a),
                    beta: unit_or_first(b),
                }
            })
            .collect();
        SeparableEnsemble::new(weights, states).expect("decoded ensemble is feasible")
    }

    /// Inverse of [`decode`](Self::decode) up to normalization.
    pub fn encode(&self, e: &SeparableEnsemble) -> Vec<f64> {
        assert_eq!(e.len(), self.ensemble_size);
        let mut out = Vec::with_capacity(self.len());
        for s in e.states() {
            out.extend(s.alpha.iter().map(|z| z.re));
            out.extend(s.alpha.iter().map(|z| z.im));
            out.extend(s.beta.iter().map(|z| z.re));
            out.extend(s.beta.iter().map(|z| z.im));
        }
        out.extend(e.weights().iter().map(|w| w.sqrt()));
        out
    }

    fn random_start(&self, seed: u64, restart: usize) -> Vec<f64> {
        let mut rng = stream_rng(seed, restart as u64);
        let mut x = Vec::with_capacity(self.len());
        for _ in 0..self.ensemble_size * self.block() / 2 {
            let z = gaussian_complex(&mut rng);
            x.push(z.re);
            x.push(z.im);
        }
        for _ in 0..self.ensemble_size {
            x.push(1.0 + 0.1 * gaussian_complex(&mut rng).re);
        }
        x
    }
}

fn unit_or_first(v: ComplexVector) -> ComplexVector {
    let n = v.norm();
    if n > 0.0 {
        v.unscale(n)
    } else {
        let mut e = ComplexVector::zeros(v.len());
        e[0] = Complex64::new(1.0, 0.0);
        e
    }
}

/// Objective and analytic gradient for a fixed `σ`.
struct Problem<'a> {
    sigma: &'a ComplexMatrix,
    sigma_log_sigma: f64,
    layout: Parameterization,
}

impl Problem<'_> {
    fn value(&self, params: &[f64]) -> f64 {
        let e = self.layout.decode(params);
        let rho = mixture(&e, self.sigma.nrows());
        let v = relative_entropy_with(self.sigma_log_sigma, self.sigma, &eigh_unchecked(rho));
        if v.is_finite() {
            v
        } else {
            SENTINEL
        }
    }

    fn value_and_gradient(&self, params: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let layout = self.layout;
        let (da, db, k) = (layout.d_a, layout.d_b, layout.ensemble_size);
        let block = layout.block();
        let thetas = layout.thetas(params);
        let total: f64 = thetas.iter().map(|t| t * t).sum();
        if !(total > 0.0) {
            return SENTINEL;
        }

        let mut factors = Vec::with_capacity(k);
        let mut rho = ComplexMatrix::zeros(da * db, da * db);
        for (i, theta) in thetas.iter().enumerate() {
            let (a, b) = layout.factors(params, i);
            let (na, nb) = (a.norm(), b.norm());
            if na == 0.0 || nb == 0.0 {
                return SENTINEL;
            }
            let (a, b) = (a.unscale(na), b.unscale(nb));
            let psi = crate::linalg::kron_vec(&a, &b);
            let w = theta * theta / total;
            rho.gerc(Complex64::new(w, 0.0), &psi, &psi, Complex64::new(1.0, 0.0));
            factors.push((a, b, na, nb, psi, w));
        }
        let eig = eigh_unchecked(rho);
        let value = relative_entropy_with(self.sigma_log_sigma, self.sigma, &eig);
        if !value.is_finite() {
            return SENTINEL;
        }
        let frechet = match LogFrechet::new(&eig, self.sigma) {
            Ok(f) => f,
            Err(_) => return SENTINEL,
        };
        let m = frechet.operator();

        // F = const − tr σ ln ρ, so dF = −tr(M dρ)
        let mut q = vec![0.0; k];
        for (i, (a, b, na, nb, psi, w)) in factors.iter().enumerate() {
            let t = m * psi;
            q[i] = psi.dotc(&t).re;
            let mut qa = ComplexVector::zeros(da);
            let mut qb = ComplexVector::zeros(db);
            for p in 0..da {
                for r in 0..db {
                    let tv = t[p * db + r];
                    qa[p] += b[r].conj() * tv;
                    qb[r] += a[p].conj() * tv;
                }
            }
            let o = i * block;
            let scale_a = -2.0 * w / na;
            for p in 0..da {
                let gz = (qa[p] - a[p] * q[i]) * scale_a;
                grad[o + p] = gz.re;
                grad[o + da + p] = gz.im;
            }
            let ob = o + 2 * da;
            let scale_b = -2.0 * w / nb;
            for r in 0..db {
                let gz = (qb[r] - b[r] * q[i]) * scale_b;
                grad[ob + r] = gz.re;
                grad[ob + db + r] = gz.im;
            }
        }
        let mean_q: f64 = factors.iter().zip(&q).map(|(f, qi)| f.5 * qi).sum();
        let ot = k * block;
        for i in 0..k {
            grad[ot + i] = -(2.0 * thetas[i] / total) * (q[i] - mean_q);
        }
        value
    }
}

fn mixture(e: &SeparableEnsemble, d: usize) -> ComplexMatrix {
    let mut rho = ComplexMatrix::zeros(d, d);
    for (w, s) in e.weights().iter().zip(e.states()) {
        let psi = s.vector();
        rho.gerc(
            Complex64::new(*w, 0.0),
            &psi,
            &psi,
            Complex64::new(1.0, 0.0),
        );
    }
    rho
}

/// `S(σ‖ρ)` for the ensemble decoded from `params`; [`SENTINEL`] when the support condition fails.
///
/// The ensemble size is inferred from the parameter count.
pub fn objective(sigma: &DensityMatrix, params: &[f64]) -> f64 {
    let block = 2 * (sigma.d_a() + sigma.d_b()) + 1;
    assert!(
        !params.is_empty() && params.len().is_multiple_of(block),
        "parameter count {} is not a multiple of {block}",
        params.len()
    );
    let layout = Parameterization::new(sigma.d_a(), sigma.d_b(), params.len() / block);
    Problem {
        sigma: sigma.matrix(),
        sigma_log_sigma: -von_neumann_entropy(sigma),
        layout,
    }
    .value(params)
}

/// Gradient of [`objective`], exposed for checking against finite differences.
pub fn objective_gradient(sigma: &DensityMatrix, params: &[f64]) -> (f64, Vec<f64>) {
    let block = 2 * (sigma.d_a() + sigma.d_b()) + 1;
    let layout = Parameterization::new(sigma.d_a(), sigma.d_b(), params.len() / block);
    let problem = Problem {
        sigma: sigma.matrix(),
        sigma_log_sigma: -von_neumann_entropy(sigma),
        layout,
    };
    let mut g = vec![0.0; params.len()];
    let v = problem.value_and_gradient(params, &mut g);
    (v, g)
}

/// Best value over independently seeded local L-BFGS runs.
pub fn minimize(sigma: &DensityMatrix, cfg: &MinimizeConfig) -> Result<MinimizeResult> {
    let (da, db) = (sigma.d_a(), sigma.d_b());
    let dim = da * db;
    if dim > DESK_SCALE_LIMIT && !cfg.force {
        return Err(Error::DimensionTooLarge {
            dim,
            limit: DESK_SCALE_LIMIT,
        });
    }
    let k = cfg.ensemble_size.unwrap_or(dim * dim);
    if k == 0 || cfg.restarts == 0 {
        return Err(Error::InvalidParameters(
            "ensemble size and restarts must be at least 1".into(),
        ));
    }
    let layout = Parameterization::new(da, db, k);
    let problem = Problem {
        sigma: sigma.matrix(),
        sigma_log_sigma: -von_neumann_entropy(sigma),
        layout,
    };
    let opts = LbfgsOptions {
        max_iterations: cfg.max_iterations,
        tolerance: cfg.tolerance,
        memory: 12,
        patience: 5,
    };

    let runs: Vec<(RestartOutcome, Vec<f64>)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let x0 = layout.random_start(cfg.seed, r);
            let out = lbfgs::minimize(|x, g| problem.value_and_gradient(x, g), x0, &opts);
            (
                RestartOutcome {
                    value: out.value,
                    iterations: out.iterations,
                    converged: out.converged,
                },
                out.x,
            )
        })
        .collect();

    // lowest value wins, ties go to the lower restart index
    let best = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.0.value.total_cmp(&b.0.value).then(i.cmp(j)))
        .map(|(i, _)| i)
        .expect("at least one restart");
    let ensemble = layout.decode(&runs[best].1);
    let value = relative_entropy(sigma, &ensemble_to_density(&ensemble)?)?;
    let value = if value.is_finite() { value } else { SENTINEL };
    Ok(MinimizeResult {
        value,
        ensemble,
        restarts_converged: runs.iter().filter(|r| r.0.converged).count(),
        best_restart_index: best,
        restarts: runs.into_iter().map(|r| r.0).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichReport {
    pub claim: f64,
    pub value: f64,
    /// `value − claim`.
    pub gap: f64,
}

/// Checks `claim ≤ value + tol` and `value ≤ claim + tol` with `tol = 1e-3`.
pub fn lower_bound_check(
    sigma: &DensityMatrix,
    result: &MinimizeResult,
    er_claim: f64,
) -> Result<SandwichReport> {
    let d = result.ensemble.d_a() * result.ensemble.d_b();
    if d != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            found: d,
        });
    }
    let gap = result.value - er_claim;
    if gap.abs() > SANDWICH_TOL || !gap.is_finite() {
        return Err(Error::SandwichViolation {
            claim: er_claim,
            value: result.value,
            gap,
        });
    }
    Ok(SandwichReport {
        claim: er_claim,
        value: result.value,
        gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{random_product_state, ProductPureState};
    use approx::assert_abs_diff_eq;

    fn product_sigma(p: &ProductPureState) -> DensityMatrix {
        ensemble_to_density(&SeparableEnsemble::new(vec![1.0], vec![p.clone()]).unwrap()).unwrap()
    }

    fn random_ensemble(da: usize, db: usize, k: usize, seed: u64) -> SeparableEnsemble {
        let states: Vec<_> = (0..k)
            .map(|i| random_product_state(da, db, seed * 1000 + i as u64))
            .collect();
        let raw: Vec<f64> = (0..k).map(|i| 1.0 + (i as f64) * 0.37 % 1.0).collect();
        let t: f64 = raw.iter().sum();
        SeparableEnsemble::new(raw.into_iter().map(|w| w / t).collect(), states).unwrap()
    }

    #[test]
    fn encode_decode_gives_same_state() {
        let e = random_ensemble(2, 3, 5, 1);
        let layout = Parameterization::new(2, 3, 5);
        let d = layout.decode(&layout.encode(&e));
        let a = ensemble_to_density(&e).unwrap();
        let b = ensemble_to_density(&d).unwrap();
        assert!(crate::linalg::max_abs_diff(a.matrix(), b.matrix()) < 1e-14);
    }

    #[test]
    fn objective_is_zero_at_sigma() {
        let e = random_ensemble(2, 2, 3, 2);
        let sigma = ensemble_to_density(&e).unwrap();
        let params = Parameterization::new(2, 2, 3).encode(&e);
        assert_abs_diff_eq!(objective(&sigma, &params), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn objective_sentinel_on_missing_support() {
        let sigma = ensemble_to_density(&random_ensemble(2, 2, 4, 3)).unwrap();
        let single =
            SeparableEnsemble::new(vec![1.0], vec![ProductPureState::basis(2, 2, 0, 0)]).unwrap();
        let params = Parameterization::new(2, 2, 1).encode(&single);
        assert_eq!(objective(&sigma, &params), SENTINEL);
    }

    #[test]
    fn objective_matches_direct_recomputation() {
        let sigma = ensemble_to_density(&random_ensemble(2, 2, 3, 4)).unwrap();
        let layout = Parameterization::new(2, 2, 7);
        for r in 0..5 {
            let params = layout.random_start(11, r);
            let direct = relative_entropy(
                &sigma,
                &ensemble_to_density(&layout.decode(&params)).unwrap(),
            )
            .unwrap();
            assert_abs_diff_eq!(objective(&sigma, &params), direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let a = crate::state::random_coefficient_matrix(2, 6);
        let sigma = crate::state::build_sigma(&a, 2, 2, None, None).unwrap();
        let layout = Parameterization::new(2, 2, 5);
        let params = layout.random_start(3, 0);
        let (v, g) = objective_gradient(&sigma, &params);
        assert_abs_diff_eq!(v, objective(&sigma, &params), epsilon = 1e-13);
        let h = 1e-6;
        for i in 0..params.len() {
            let mut p = params.clone();
            p[i] += h;
            let up = objective(&sigma, &p);
            p[i] -= 2.0 * h;
            let down = objective(&sigma, &p);
            assert_abs_diff_eq!(g[i], (up - down) / (2.0 * h), epsilon = 1e-6);
        }
    }

    #[test]
    fn pure_product_sigma_reaches_zero() {
        let sigma = product_sigma(&random_product_state(2, 2, 4));
        let cfg = MinimizeConfig {
            restarts: 4,
            ..Default::default()
        };
        let r = minimize(&sigma, &cfg).unwrap();
        assert!(r.value <= 1e-6, "value {}", r.value);
        assert!(r.converged());
    }

    #[test]
    fn deterministic_and_monotone_in_restarts() {
        let a = crate::state::random_coefficient_matrix(2, 9);
        let sigma = crate::state::build_sigma(&a, 2, 2, None, None).unwrap();
        let cfg = MinimizeConfig {
            restarts: 2,
            max_iterations: 300,
            seed: 5,
            ..Default::default()
        };
        let r1 = minimize(&sigma, &cfg).unwrap();
        let r2 = minimize(&sigma, &cfg).unwrap();
        assert_eq!(r1.value, r2.value);
        assert_eq!(r1.ensemble, r2.ensemble);
        let more = minimize(&sigma, &MinimizeConfig { restarts: 4, ..cfg }).unwrap();
        assert!(more.value <= r1.value);
        assert_eq!(&more.restarts[..2], &r1.restarts[..]);
    }

    #[test]
    fn oversized_rejected_unless_forced() {
        let sigma = product_sigma(&random_product_state(3, 6, 1));
        assert!(matches!(
            minimize(&sigma, &MinimizeConfig::default()),
            Err(Error::DimensionTooLarge { dim: 18, .. })
        ));
        let cfg = MinimizeConfig {
            force: true,
            restarts: 1,
            ensemble_size: Some(3),
            max_iterations: 50,
            ..Default::default()
        };
        assert!(minimize(&sigma, &cfg).is_ok());
    }

    #[test]
    fn result_value_matches_its_ensemble() {
        let a = crate::state::random_coefficient_matrix(2, 13);
        let sigma = crate::state::build_sigma(&a, 2, 2, None, None).unwrap();
        let r = minimize(
            &sigma,
            &MinimizeConfig {
                restarts: 2,
                ..Default::default()
            },
        )
        .unwrap();
        let recomputed =
            relative_entropy(&sigma, &ensemble_to_density(&r.ensemble).unwrap()).unwrap();
        assert_abs_diff_eq!(r.value, recomputed, epsilon = 1e-8);
        assert!(r.value >= -1e-12);
    }
}
