//! Matrix exponential by scaling and squaring with a degree-13 Padé kernel.

use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the [13/13] approximant is accurate to unit roundoff.
const THETA13: f64 = 5.371920351148152;

/// `exp(scale * x)`.
pub fn exp_matrix<T: Real>(x: &Matrix<T>, scale: T) -> Result<Matrix<T>> {
    if !x.is_square() {
        return Err(Error::Dimension(format!("exp of a {}x{} matrix", x.rows(), x.cols())));
    }
    if !scale.is_finite() {
        return Err(Error::InvalidParameter("exp scale must be finite".into()));
    }
    let n = x.rows();
    let a = x.scale(scale);
    let norm = a.norm_1();
    if norm == T::zero() {
        return Ok(Matrix::identity(n));
    }
    let ratio = norm.to_f64_lossy() / THETA13;
    let squarings = if ratio > 1.0 { ratio.log2().ceil() as i32 } else { 0 };
    let a = a.scale(T::lit(2f64.powi(-squarings)));

    let b = |k: usize| T::lit(PADE13[k]);
    let id = Matrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let inner_u = a6.scale(b(13)).add_scaled(&a4, b(11)).add_scaled(&a2, b(9));
    let u_poly = (&a6 * &inner_u)
        .add_scaled(&a6, b(7))
        .add_scaled(&a4, b(5))
        .add_scaled(&a2, b(3))
        .add_scaled(&id, b(1));
    let u = &a * &u_poly;

    let inner_v = a6.scale(b(12)).add_scaled(&a4, b(10)).add_scaled(&a2, b(8));
    let v = (&a6 * &inner_v)
        .add_scaled(&a6, b(6))
        .add_scaled(&a4, b(4))
        .add_scaled(&a2, b(2))
        .add_scaled(&id, b(0));

    let mut r = (&v - &u).solve(&(&v + &u))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if !r.is_finite() {
        return Err(Error::Overflow("matrix exponential overflowed".into()));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Matrix<f64>, b: &Matrix<f64>, tol: f64) -> bool {
        (a - b).max_abs() <= tol * b.max_abs().max(1.0)
    }

    #[test]
    fn zero_gives_identity() {
        for n in 1..5 {
            assert_eq!(exp_matrix(&Matrix::<f64>::zeros(n, n), 1.0).unwrap(), Matrix::identity(n));
        }
    }

    #[test]
    fn nilpotent_series_terminates() {
        let x = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let want = Matrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!(close(&exp_matrix(&x, 1.0).unwrap(), &want, 1e-15));
    }

    #[test]
    fn hyperbolic_and_elliptic_closed_forms() {
        let x = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let c = 1f64.cosh();
        let s = 1f64.sinh();
        let want = Matrix::from_rows(&[vec![c, s], vec![s, c]]).unwrap();
        assert!(close(&exp_matrix(&x, 1.0).unwrap(), &want, 1e-14));

        // [[0,1],[-k^2,0]] scaled by t: rotation-like with frequency k
        for &(k, t) in &[(1.0f64, 0.3f64), (2.0, 1.7), (3.0, 3.3)] {
            let x = Matrix::from_rows(&[vec![0.0, 1.0], vec![-k * k, 0.0]]).unwrap();
            let want = Matrix::from_rows(&[
                vec![(k * t).cos(), (k * t).sin() / k],
                vec![-k * (k * t).sin(), (k * t).cos()],
            ])
            .unwrap();
            assert!(close(&exp_matrix(&x, t).unwrap(), &want, 1e-12), "k={k} t={t}");
        }
    }

    #[test]
    fn large_norm_uses_squaring() {
        // exp(10 * [[0,1],[1,0]]) has entries cosh 10, sinh 10
        let x = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = exp_matrix(&x, 10.0).unwrap();
        assert!((e[(0, 0)] / 10f64.cosh() - 1.0).abs() < 1e-12);
        assert!((e[(0, 1)] / 10f64.sinh() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_square_rejected() {
        assert!(matches!(exp_matrix(&Matrix::<f64>::zeros(2, 3), 1.0), Err(Error::Dimension(_))));
    }

    #[test]
    fn single_precision_path() {
        let x = Matrix::from_rows(&[vec![0.0f32, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = exp_matrix(&x, 1.0f32).unwrap();
        assert!((e[(0, 0)] - 1f32.cosh()).abs() < 1e-5);
    }
}
