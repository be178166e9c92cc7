use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Householder QR normalized so that `R` has a strictly positive diagonal.
///
/// With that normalization the factorization of a nonsingular matrix is unique.
pub fn qr_pos<T: Real>(m: &Matrix<T>) -> Result<(Matrix<T>, Matrix<T>)> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("QR of a {}x{} matrix", m.rows(), m.cols())));
    }
    let n = m.rows();
    let mut r = m.clone();
    let mut q = Matrix::<T>::identity(n);
    let mut v = vec![T::zero(); n];
    let two = T::lit(2.0);
    for k in 0..n.saturating_sub(1) {
        let alpha = (k..n).map(|i| r[(i, k)] * r[(i, k)]).sum::<T>().sqrt();
        if alpha == T::zero() {
            continue;
        }
        let x0 = r[(k, k)];
        let beta = if x0 >= T::zero() { -alpha } else { alpha };
        for i in k..n {
            v[i] = r[(i, k)];
        }
        v[k] = x0 - beta;
        let vnorm2: T = (k..n).map(|i| v[i] * v[i]).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        // R <- (I - 2vv'/v'v) R
        for j in k..n {
            let dot: T = (k..n).map(|i| v[i] * r[(i, j)]).sum();
            let f = two * dot / vnorm2;
            for i in k..n {
                r[(i, j)] -= f * v[i];
            }
        }
        // Q <- Q (I - 2vv'/v'v)
        for i in 0..n {
            let dot: T = (k..n).map(|j| q[(i, j)] * v[j]).sum();
            let f = two * dot / vnorm2;
            for j in k..n {
                q[(i, j)] -= f * v[j];
            }
        }
        for i in k + 1..n {
            r[(i, k)] = T::zero();
        }
    }
    let threshold = T::epsilon() * T::from_count(n) * m.frobenius_norm();
    for k in 0..n {
        let d = r[(k, k)];
        if !d.is_finite() || d.abs() <= threshold {
            return Err(Error::Singular(format!("R[{k},{k}] = {d:e} at QR")));
        }
        if d < T::zero() {
            for j in k..n {
                r[(k, j)] = -r[(k, j)];
            }
            for i in 0..n {
                q[(i, k)] = -q[(i, k)];
            }
        }
    }
    Ok((q, r))
}
