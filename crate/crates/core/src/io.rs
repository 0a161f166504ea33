//! JSON state files.
//!
//! ```json
//! {"kind":"coefficients","n":2,"matrix":[[[0.5,0.0],[0.5,0.0]],[[0.5,0.0],[0.5,0.0]]]}
//! {"kind":"density","dA":2,"dB":2,"matrix":[[[re,im],...],...]}
//! ```
//!
//! Floats are written in shortest round-trip form, so write-then-read is bit-exact.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Row-major rows of `[re, im]` pairs.
pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateFile {
    Coefficients {
        n: usize,
        matrix: JsonMatrix,
    },
    Density {
        #[serde(rename = "dA")]
        d_a: usize,
        #[serde(rename = "dB")]
        d_b: usize,
        matrix: JsonMatrix,
    },
}

pub fn matrix_to_json(m: &ComplexMatrix) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

pub fn matrix_from_json(rows: &JsonMatrix, dim: usize) -> Result<ComplexMatrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Format(format!(
            "matrix must be {dim}x{dim}, got {} rows with lengths {:?}",
            rows.len(),
            rows.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    Ok(ComplexMatrix::from_fn(dim, dim, |i, j| {
        let [re, im] = rows[i][j];
        Complex64::new(re, im)
    }))
}

impl StateFile {
    pub fn coefficients(m: &ComplexMatrix) -> Self {
        StateFile::Coefficients {
            n: m.nrows(),
            matrix: matrix_to_json(m),
        }
    }

    pub fn density(m: &ComplexMatrix, d_a: usize, d_b: usize) -> Self {
        StateFile::Density {
            d_a,
            d_b,
            matrix: matrix_to_json(m),
        }
    }

    /// The raw matrix after a shape check; no physical validation.
    pub fn matrix(&self) -> Result<ComplexMatrix> {
        match self {
            StateFile::Coefficients { n, matrix } => matrix_from_json(matrix, *n),
            StateFile::Density { d_a, d_b, matrix } => matrix_from_json(matrix, d_a * d_b),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text)?;
        file.matrix()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state files always serialize")
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json();
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_both_kinds() {
        let c = StateFile::parse(r#"{"kind":"coefficients","n":1,"matrix":[[[1,0]]]}"#).unwrap();
        assert_eq!(c.matrix().unwrap()[(0, 0)], Complex64::new(1.0, 0.0));
        let d = StateFile::parse(
            r#"{"kind":"density","dA":1,"dB":2,"matrix":[[[0.5,0],[0,0.1]],[[0,-0.1],[0.5,0]]]}"#,
        )
        .unwrap();
        assert_eq!(d.matrix().unwrap()[(1, 0)], Complex64::new(0.0, -0.1));
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            r#"{"kind":"coefficients","n":2,"matrix":[[[1,0]]]}"#,
            r#"{"kind":"coefficients","n":1,"matrix":[[[1,0,0]]]}"#,
            r#"{"kind":"mystery","n":1,"matrix":[[[1,0]]]}"#,
            r#"{"kind":"density","dA":2,"matrix":[[[1,0]]]}"#,
            r#"not json"#,
        ] {
            assert!(StateFile::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn writes_kind_first() {
        let s = StateFile::coefficients(&ComplexMatrix::identity(1, 1)).to_json();
        assert_eq!(s, r#"{"kind":"coefficients","n":1,"matrix":[[[1.0,0.0]]]}"#);
        let s = StateFile::density(&ComplexMatrix::identity(2, 2).unscale(2.0), 2, 1).to_json();
        assert!(s.starts_with(r#"{"kind":"density","dA":2,"dB":1,"#), "{s}");
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(values in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 18)) {
            let m = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(values[2 * (3 * i + j) % 18], values[(2 * (3 * i + j) + 1) % 18]));
            for file in [StateFile::coefficients(&m), StateFile::density(&m, 3, 1)] {
                let back = StateFile::parse(&file.to_json()).unwrap();
                let mm = back.matrix().unwrap();
                for (x, y) in m.iter().zip(mm.iter()) {
                    prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
                    prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
                }
            }
        }
    }
}
