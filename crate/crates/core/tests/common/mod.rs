#![allow(dead_code)]

use andloc::linalg::{Matrix, SymmetricMatrix};
use andloc::model::{DisorderSpec, ModelParams, DEFAULT_RHO};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> SymmetricMatrix<f64> {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = rng.gen_range(-scale..scale);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    SymmetricMatrix::new(m).unwrap()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix<f64> {
    Matrix::from_fn(r, c, |_, _| rng.gen_range(-1.0..1.0))
}

/// Nonzero couplings of either sign, magnitudes in `[0.2, 2]`.
pub fn random_c(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let m = rng.gen_range(0.2..2.0);
            if rng.gen_bool(0.5) { m } else { -m }
        })
        .collect()
}

pub fn random_params(rng: &mut ChaCha8Rng, n: usize, ell: f64) -> ModelParams<f64> {
    let v = random_symmetric(rng, n, 2.0);
    let c = random_c(rng, n);
    ModelParams::new(v, c, ell, DEFAULT_RHO, DisorderSpec::bernoulli(0.5).unwrap()).unwrap()
}

pub fn to_na(m: &Matrix<f64>) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}
