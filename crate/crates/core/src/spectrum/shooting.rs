use crate::error::{Error, Result};
use crate::linalg::{singular_values, Matrix};
use crate::model::{CellConfig, ModelParams};
use crate::scalar::Real;

/// Entry magnitude at which the unnormalized product is abandoned.
pub const SHOOTING_OVERFLOW: f64 = 1e300;

/// `T_{ω_{2L-1}}(E) ... T_{ω_0}(E)` across the whole path.
pub fn transfer_product<T: Real>(params: &ModelParams<T>, path: &[CellConfig<T>], e: T) -> Result<Matrix<T>> {
    let mut p = Matrix::identity(2 * params.n());
    for omega in path {
        let t = params.transfer(omega, e)?;
        p = t.as_matrix() * &p;
        if !(p.max_abs() <= T::lit(SHOOTING_OVERFLOW)) {
            return Err(Error::Overflow(format!(
                "transfer product exceeds {SHOOTING_OVERFLOW:e} at E = {e}; use fewer cells or an energy nearer the spectrum"
            )));
        }
    }
    Ok(p)
}

/// Top-right `N x N` block: maps `u'(-ℓL)` to `u(ℓL)` when `u(-ℓL) = 0`.
fn dirichlet_block<T: Real>(params: &ModelParams<T>, path: &[CellConfig<T>], e: T) -> Result<Matrix<T>> {
    let n = params.n();
    Ok(transfer_product(params, path, e)?.block(0, n, n, n))
}

/// Smallest singular value of the Dirichlet block; zero exactly at Dirichlet
/// eigenvalues of the continuum restriction.
pub fn shooting_singularity<T: Real>(params: &ModelParams<T>, path: &[CellConfig<T>], e: T) -> Result<T> {
    Ok(singular_values(&dirichlet_block(params, path, e)?)[0])
}

/// Determinant of the Dirichlet block; changes sign at simple eigenvalues.
pub fn shooting_determinant<T: Real>(params: &ModelParams<T>, path: &[CellConfig<T>], e: T) -> Result<T> {
    dirichlet_block(params, path, e)?.determinant()
}

/// Sign changes of the shooting determinant on `points` equispaced energies in `[a, b]`.
pub fn shooting_zero_count<T: Real>(params: &ModelParams<T>, path: &[CellConfig<T>], a: T, b: T, points: usize) -> Result<usize> {
    if points < 2 || !(a < b) {
        return Err(Error::InvalidParameter("need a < b and at least two points".into()));
    }
    let step = (b - a) / T::from_count(points - 1);
    let mut count = 0;
    let mut prev = shooting_determinant(params, path, a)?;
    for k in 1..points {
        let d = shooting_determinant(params, path, a + step * T::from_count(k))?;
        if d == T::zero() {
            continue;
        }
        if prev != T::zero() && (d < T::zero()) != (prev < T::zero()) {
            count += 1;
        }
        prev = d;
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DisorderSpec;
    use std::f64::consts::PI;

    #[test]
    fn free_interval_zeros_at_squares() {
        // [0, π]: L = 1, ℓ = π/2, B(E) = sin(√E π)/√E
        let p = ModelParams::scalar(0.0, 1.0, PI / 2.0, DisorderSpec::degenerate(0.0)).unwrap();
        let path = vec![CellConfig::new(vec![0.0]); 2];
        for k in 1..5 {
            let e = (k * k) as f64;
            assert!(shooting_singularity(&p, &path, e).unwrap() < 1e-12, "k={k}");
            let want = (e.sqrt() * PI).sin() / e.sqrt();
            let off = e + 0.3;
            let got = shooting_determinant(&p, &path, off).unwrap();
            assert!((got - (off.sqrt() * PI).sin() / off.sqrt()).abs() < 1e-12);
            assert!(want.abs() < 1e-12);
        }
        assert_eq!(shooting_zero_count(&p, &path, 0.5, 17.5, 2000).unwrap(), 4);
    }

    #[test]
    fn no_zero_below_spectrum() {
        let p = ModelParams::scalar(0.0, 1.0, 0.5, DisorderSpec::degenerate(0.0)).unwrap();
        let path = vec![CellConfig::new(vec![0.0]); 8];
        assert_eq!(shooting_zero_count(&p, &path, -5.0, 0.0, 200).unwrap(), 0);
    }

    #[test]
    fn overflow_is_reported() {
        let p = ModelParams::scalar(0.0, 1.0, 1.0, DisorderSpec::degenerate(0.0)).unwrap();
        let path = vec![CellConfig::new(vec![0.0]); 400];
        assert!(matches!(shooting_determinant(&p, &path, -9.0), Err(Error::Overflow(_))));
    }
}
