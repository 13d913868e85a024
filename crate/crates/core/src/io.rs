//! JSON problem files.
//!
//! ```json
//! {"m": 3, "n": 2, "lambda": 1.0,
//!  "A": [[2.0, 0.0], [0.0, 1.0], [0.0, 0.0]],
//!  "b": [0.0, 0.0, 0.5]}
//! ```
//!
//! `A` is stored row by row. Generated problems also carry a `provenance`
//! object with the generator spec and the exact spectrum of `[A λb]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{GeneratedProblem, GeneratorSpec, RNG_NAME};
use crate::numerics::{DenseMatrix, Vector};
use crate::stls::StlsProblem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub spec: GeneratorSpec,
    pub known_singular_values: Vec<f64>,
    pub rng: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub m: usize,
    pub n: usize,
    pub lambda: f64,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl ProblemFile {
    pub fn from_problem(p: &StlsProblem) -> Self {
        let a = p.a();
        Self {
            m: p.m(),
            n: p.n(),
            lambda: p.lambda(),
            a: a.row_iter().map(|row| row.iter().copied().collect()).collect(),
            b: p.b().iter().copied().collect(),
            provenance: None,
        }
    }

    pub fn from_generated(g: &GeneratedProblem) -> Self {
        Self {
            provenance: Some(Provenance {
                spec: g.spec,
                known_singular_values: g.known_singular_values.clone(),
                rng: RNG_NAME.to_string(),
            }),
            ..Self::from_problem(&g.problem)
        }
    }

    /// Validate dimensions and build the problem.
    pub fn to_problem(&self) -> Result<StlsProblem> {
        if self.a.len() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "A has {} rows, m = {}",
                self.a.len(),
                self.m
            )));
        }
        if let Some((i, row)) = self.a.iter().enumerate().find(|(_, r)| r.len() != self.n) {
            return Err(Error::DimensionMismatch(format!(
                "row {i} of A has {} entries, n = {}",
                row.len(),
                self.n
            )));
        }
        if self.b.len() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "b has {} entries, m = {}",
                self.b.len(),
                self.m
            )));
        }
        let flat: Vec<f64> = self.a.iter().flatten().copied().collect();
        let a = DenseMatrix::from_row_slice(self.m, self.n, &flat);
        StlsProblem::new(a, Vector::from_vec(self.b.clone()), self.lambda)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidProblem(format!("bad problem JSON: {e}")))
    }
}

pub fn read_problem(text: &str) -> Result<StlsProblem> {
    ProblemFile::from_json(text)?.to_problem()
}
