//! Synthetic test problems with a prescribed spectrum.
//!
//! `[A λb] = Y [D; 0] Zᵀ` with Householder reflectors `Y = I − 2yyᵀ`,
//! `Z = I − 2zzᵀ` and `D = diag(n, n−1, …, 1, 1−e_p)`. The random unit
//! vectors `y` (drawn first) and `z` come from a `ChaCha8Rng` seeded with
//! [`GeneratorSpec::seed`], Gaussian draws normalized to unit length, so a
//! spec reproduces the same problem on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{unit_sphere_sample, DenseMatrix, Vector};
use crate::stls::StlsProblem;

/// Name of the random number generator behind every seeded stream.
pub const RNG_NAME: &str = "ChaCha8Rng";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub m: usize,
    pub n: usize,
    pub lambda: f64,
    pub e_p: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m <= self.n {
            return Err(Error::InvalidConfig(format!(
                "need m > n >= 1, got m = {}, n = {}",
                self.m, self.n
            )));
        }
        if !(self.e_p > 0.0 && self.e_p < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "e_p must lie in (0, 1), got {}",
                self.e_p
            )));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    /// Diagonal of `D`: `(n, n−1, …, 1, 1−e_p)`.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut d: Vec<f64> = (1..=self.n).rev().map(|k| k as f64).collect();
        d.push(1.0 - self.e_p);
        d
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedProblem {
    pub spec: GeneratorSpec,
    pub problem: StlsProblem,
    /// Exact singular values of `[A λb]`.
    pub known_singular_values: Vec<f64>,
    /// Unit vector defining the left reflector `Y`.
    pub y: Vector,
    /// Unit vector defining the right reflector `Z`.
    pub z: Vector,
}

pub fn generate(spec: &GeneratorSpec) -> Result<GeneratedProblem> {
    spec.validate()?;
    let (m, n) = (spec.m, spec.n);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let y = unit_sphere_sample(m, &mut rng);
    let z = unit_sphere_sample(n + 1, &mut rng);

    let d = spec.spectrum();
    let mut c = DenseMatrix::zeros(m, n + 1);
    for (j, &dj) in d.iter().enumerate() {
        c[(j, j)] = dj;
    }
    // Y C = C − 2 y (yᵀ C)
    let yt_c = y.transpose() * &c;
    c -= 2.0 * &y * yt_c;
    // C Zᵀ = C − 2 (C z) zᵀ
    let cz = &c * &z;
    c -= 2.0 * cz * z.transpose();

    let a = c.columns(0, n).into_owned();
    let b = c.column(n) / spec.lambda;
    let problem = StlsProblem::new(a, b, spec.lambda)?;
    Ok(GeneratedProblem {
        spec: *spec,
        problem,
        known_singular_values: d,
        y,
        z,
    })
}

/// Mix a base seed with stream indices (splitmix64 finalizer) so that
/// every benchmark trial owns an independent, reproducible stream.
pub fn derive_seed(base: u64, streams: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    streams
        .iter()
        .fold(mix(base), |acc, &s| mix(acc ^ mix(s.wrapping_add(1))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{householder, singular_values, spectral_norm_dense};
    use crate::stls::check_genericity;

    fn spec(m: usize, n: usize, lambda: f64, e_p: f64, seed: u64) -> GeneratorSpec {
        GeneratorSpec {
            m,
            n,
            lambda,
            e_p,
            seed,
        }
    }

    #[test]
    fn spectrum_small_case() {
        let g = generate(&spec(5, 3, 1.0, 0.1, 42)).unwrap();
        assert_eq!(g.known_singular_values, vec![3.0, 2.0, 1.0, 0.9]);
        let s = singular_values(&g.problem.augmented()).unwrap();
        for (got, want) in s.iter().zip(&g.known_singular_values) {
            assert!((got - want).abs() <= 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn spectral_gap_reads_off_d() {
        let g = generate(&spec(4, 2, 1.0, 0.5, 1)).unwrap();
        let d = &g.known_singular_values;
        assert_eq!(d[1] - d[2], 0.5);
    }

    #[test]
    fn interlacing_bounds_gap() {
        for (m, n, lambda, e_p, seed) in [(5, 3, 1.0, 0.1, 3), (30, 20, 0.05, 0.001, 11)] {
            let g = generate(&spec(m, n, lambda, e_p, seed)).unwrap();
            let gen = check_genericity(&g.problem).unwrap();
            assert!(gen.gap > 0.0 && gen.gap <= e_p + 1e-12, "gap {}", gen.gap);
        }
    }

    #[test]
    fn reflectors_are_orthogonal() {
        let g = generate(&spec(12, 7, 5.0, 0.1, 77)).unwrap();
        let y = householder(&g.y);
        let z = householder(&g.z);
        let ey = DenseMatrix::identity(12, 12);
        let ez = DenseMatrix::identity(8, 8);
        assert!(spectral_norm_dense(&(y.transpose() * &y - ey)).unwrap() <= 1e-13);
        assert!(spectral_norm_dense(&(z.transpose() * &z - ez)).unwrap() <= 1e-13);

        // explicit product agrees with the rank-one updates
        let mut dz = DenseMatrix::zeros(12, 8);
        for (j, dj) in g.known_singular_values.iter().enumerate() {
            dz[(j, j)] = *dj;
        }
        let explicit = &y * dz * z.transpose();
        assert!((explicit - g.problem.augmented()).norm() <= 1e-12);
    }

    #[test]
    fn generation_is_deterministic() {
        let s = spec(9, 4, 0.05, 0.001, 123);
        let a = generate(&s).unwrap();
        let b = generate(&s).unwrap();
        assert_eq!(a.problem, b.problem);
        let c = generate(&GeneratorSpec { seed: 124, ..s }).unwrap();
        assert_ne!(a.problem, c.problem);
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(generate(&spec(3, 3, 1.0, 0.1, 0)).is_err());
        assert!(generate(&spec(5, 3, 1.0, 1.0, 0)).is_err());
        assert!(generate(&spec(5, 3, 1.0, 0.0, 0)).is_err());
        assert!(generate(&spec(5, 3, -1.0, 0.1, 0)).is_err());
        assert!(generate(&spec(5, 0, 1.0, 0.1, 0)).is_err());
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(7, &[0, 0]);
        assert_eq!(a, derive_seed(7, &[0, 0]));
        assert_ne!(a, derive_seed(7, &[0, 1]));
        assert_ne!(a, derive_seed(7, &[1, 0]));
        assert_ne!(a, derive_seed(8, &[0, 0]));
    }
}
