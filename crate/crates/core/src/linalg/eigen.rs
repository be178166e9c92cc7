use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative asymmetry accepted (and then averaged away) at construction.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Real symmetric matrix; `entry(i,j) == entry(j,i)` holds exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix<T> {
    inner: Matrix<T>,
}

impl<T: Real> SymmetricMatrix<T> {
    /// Symmetrizes `m` as `(m + m')/2`, rejecting it when
    /// `|m - m'|_F > 1e-10 |m|_F`.
    pub fn new(m: Matrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!("symmetric matrix must be square, got {}x{}", m.rows(), m.cols())));
        }
        let mt = m.transpose();
        let asym = (&m - &mt).frobenius_norm();
        let norm = m.frobenius_norm();
        if asym > T::lit(SYMMETRY_TOL) * norm {
            let n = m.rows();
            let (mut wi, mut wj, mut worst) = (0, 0, T::zero());
            for i in 0..n {
                for j in i + 1..n {
                    let d = (m[(i, j)] - m[(j, i)]).abs();
                    if d > worst {
                        (wi, wj, worst) = (i, j, d);
                    }
                }
            }
            return Err(Error::InvalidParameter(format!(
                "matrix is not symmetric: entry ({wi},{wj}) = {} but ({wj},{wi}) = {}; relative asymmetry {:e} exceeds {:e}",
                m[(wi, wj)],
                m[(wj, wi)],
                (asym / norm).to_f64_lossy(),
                SYMMETRY_TOL
            )));
        }
        let half = T::lit(0.5);
        Ok(SymmetricMatrix { inner: (&m + &mt).scale(half) })
    }

    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix { inner: Matrix::zeros(n, n) }
    }

    pub fn from_diag(d: &[T]) -> Self {
        SymmetricMatrix { inner: Matrix::from_diag(d) }
    }

    pub fn order(&self) -> usize {
        self.inner.rows()
    }

    pub fn as_matrix(&self) -> &Matrix<T> {
        &self.inner
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.inner[(i, j)]
    }

    /// `self + diag(d) + shift * I`; symmetric by construction.
    pub fn shifted_diag(&self, d: &[T], shift: T) -> Self {
        let mut m = self.inner.clone();
        for (i, &di) in d.iter().enumerate() {
            m[(i, i)] += di + shift;
        }
        SymmetricMatrix { inner: m }
    }

    /// Similarity `P' S P` by the permutation sending index `i` to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.order();
        SymmetricMatrix { inner: Matrix::from_fn(n, n, |i, j| self.inner[(perm[i], perm[j])]) }
    }
}

/// Eigenvalues in ascending order.
pub fn sym_eigenvalues<T: Real>(s: &SymmetricMatrix<T>) -> Vec<T> {
    jacobi(s.as_matrix(), false).0
}

/// Ascending eigenvalues and the matching orthonormal eigenvectors (as columns).
pub fn sym_eigen<T: Real>(s: &SymmetricMatrix<T>) -> (Vec<T>, Matrix<T>) {
    let (vals, vecs) = jacobi(s.as_matrix(), true);
    (vals, vecs.expect("vectors requested"))
}

/// Cyclic Jacobi on a matrix assumed symmetric.
pub(crate) fn jacobi<T: Real>(m: &Matrix<T>, want_vectors: bool) -> (Vec<T>, Option<Matrix<T>>) {
    let n = m.rows();
    let mut a = m.clone();
    let mut v = if want_vectors { Some(Matrix::identity(n)) } else { None };
    let norm = a.frobenius_norm();
    let tiny = T::epsilon() * T::epsilon() * T::lit(0.25);
    if norm > T::zero() {
        for _sweep in 0..100 {
            let off: T = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)] * a[(i, j)])
                .sum();
            if off <= tiny * norm * norm {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq == T::zero() {
                        continue;
                    }
                    let app = a[(p, p)];
                    let aqq = a[(q, q)];
                    let theta = (aqq - app) / (T::lit(2.0) * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let t = if theta == T::zero() { T::one() } else { t };
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                    a[(p, q)] = T::zero();
                    a[(q, p)] = T::zero();
                    if let Some(v) = v.as_mut() {
                        for k in 0..n {
                            let vkp = v[(k, p)];
                            let vkq = v[(k, q)];
                            v[(k, p)] = c * vkp - s * vkq;
                            v[(k, q)] = s * vkp + c * vkq;
                        }
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    let vals = order.iter().map(|&i| a[(i, i)]).collect();
    let vecs = v.map(|v| Matrix::from_fn(n, n, |i, j| v[(i, order[j])]));
    (vals, vecs)
}

/// Largest singular value, as the square root of the top eigenvalue of `M'M`.
pub fn spectral_norm<T: Real>(m: &Matrix<T>) -> T {
    let mtm = &m.transpose() * m;
    let (vals, _) = jacobi(&mtm, false);
    vals.last().copied().unwrap_or(T::zero()).max(T::zero()).sqrt()
}

/// Singular values (ascending) from the symmetric embedding `[[0, M], [M', 0]]`,
/// which keeps small singular values accurate to `eps * |M|`.
pub fn singular_values<T: Real>(m: &Matrix<T>) -> Vec<T> {
    let (r, c) = (m.rows(), m.cols());
    let mut big = Matrix::zeros(r + c, r + c);
    big.set_block(0, r, m);
    big.set_block(r, 0, &m.transpose());
    let (vals, _) = jacobi(&big, false);
    let mut sv: Vec<T> = vals.into_iter().rev().take(r.min(c)).collect();
    sv.reverse();
    sv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(rows: &[Vec<f64>]) -> SymmetricMatrix<f64> {
        SymmetricMatrix::new(Matrix::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn diagonal_sorted() {
        assert_eq!(sym_eigenvalues(&SymmetricMatrix::from_diag(&[3.0, -1.0])), vec![-1.0, 3.0]);
    }

    #[test]
    fn exchange_matrix() {
        let ev = sym_eigenvalues(&sym(&[vec![0.0, 1.0], vec![1.0, 0.0]]));
        assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tridiagonal_witness_order_three() {
        // characteristic polynomial -l^3 + 2l
        let ev = sym_eigenvalues(&sym(&[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]]));
        let s2 = 2f64.sqrt();
        for (got, want) in ev.iter().zip([-s2, 0.0, s2]) {
            assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        }
    }

    #[test]
    fn eigenvectors_diagonalize() {
        let s = sym(&[vec![2.0, -1.0, 0.5], vec![-1.0, 3.0, 0.25], vec![0.5, 0.25, -1.0]]);
        let (vals, vecs) = sym_eigen(&s);
        let d = &(&vecs.transpose() * s.as_matrix()) * &vecs;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { vals[i] } else { 0.0 };
                assert!((d[(i, j)] - want).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn symmetrization_and_rejection() {
        let m = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0 + 1e-14, 0.0]]).unwrap();
        let s = SymmetricMatrix::new(m).unwrap();
        assert_eq!(s.get(0, 1), s.get(1, 0));
        let bad = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.1, 0.0]]).unwrap();
        let err = SymmetricMatrix::new(bad).unwrap_err();
        assert!(err.to_string().contains("(0,1)"), "{err}");
        assert!(SymmetricMatrix::new(Matrix::<f64>::zeros(2, 3)).is_err());
    }

    #[test]
    fn singular_values_of_diag() {
        let m: Matrix<f64> = Matrix::from_rows(&[vec![3.0, 0.0], vec![0.0, -1e-9]]).unwrap();
        let sv = singular_values(&m);
        assert!((sv[0] - 1e-9).abs() < 1e-20);
        assert!((sv[1] - 3.0).abs() < 1e-15);
        assert!((spectral_norm(&m) - 3.0).abs() < 1e-15);
    }
}
