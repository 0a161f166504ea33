#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use er_maxcorr::linalg::ComplexMatrix;
use er_maxcorr::state::{
    ensemble_to_density, random_product_state, DensityMatrix, SeparableEnsemble,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_str(self.stdout.trim())
            .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", self.stdout))
    }
}

pub fn run_cli(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_er-maxcorr"))
        .args(args)
        .current_dir(golden_dir())
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

/// Drops fields that legitimately vary between runs.
pub fn stable(mut v: Value) -> Value {
    if let Some(o) = v.as_object_mut() {
        o.remove("timing_ms");
        if let Some(input) = o.get_mut("input").and_then(Value::as_object_mut) {
            input.remove("out");
        }
    }
    v
}

/// Structural equality with an absolute tolerance on numbers.
pub fn approx_equal(a: &Value, b: &Value, tol: f64, path: &str) -> Result<(), String> {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            if (x - y).abs() <= tol {
                Ok(())
            } else {
                Err(format!("{path}: {x} vs {y}"))
            }
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => x
            .iter()
            .zip(y)
            .enumerate()
            .try_for_each(|(i, (p, q))| approx_equal(p, q, tol, &format!("{path}[{i}]"))),
        (Value::Object(x), Value::Object(y)) => {
            let mut keys: Vec<_> = x.keys().chain(y.keys()).collect();
            keys.sort();
            keys.dedup();
            keys.into_iter()
                .try_for_each(|k| match (x.get(k), y.get(k)) {
                    (Some(p), Some(q)) => approx_equal(p, q, tol, &format!("{path}.{k}")),
                    _ => Err(format!("{path}.{k}: present on one side only")),
                })
        }
        _ if a == b => Ok(()),
        _ => Err(format!("{path}: {a} vs {b}")),
    }
}

/// Compares against `tests/golden/<name>`; set `UPDATE_GOLDEN=1` to rewrite it.
pub fn check_golden(name: &str, actual: &Value) -> Result<(), String> {
    let path = golden_dir().join(name);
    let actual = stable(actual.clone());
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, serde_json::to_string_pretty(&actual).unwrap() + "\n").unwrap();
        return Ok(());
    }
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let expected: Value = serde_json::from_str(&text).unwrap();
    approx_equal(&expected, &actual, 1e-9, name)
}

/// Random separable state with `k` product terms and Dirichlet-like weights.
pub fn random_separable(d_a: usize, d_b: usize, k: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = raw.iter().sum();
    let states = (0..k)
        .map(|_| random_product_state(d_a, d_b, rng.random()))
        .collect();
    ensemble_to_density(
        &SeparableEnsemble::new(raw.iter().map(|w| w / total).collect(), states).unwrap(),
    )
    .unwrap()
}

pub fn max_abs(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
