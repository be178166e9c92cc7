//! The symplectic group `Sp_N(R)` and its Lie algebra `sp_N(R)`.
//!
//! Conventions: `J = [[0, -I], [I, 0]]`; `M` is symplectic iff `M'JM = J`;
//! `X` is Hamiltonian iff `JX + X'J = 0`, i.e. `X = [[A, B], [C, -A']]` with
//! `B`, `C` symmetric.

use super::{exp_matrix, Matrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Construction-time tolerance for [`SymplecticMatrix`], relative to `|M|_F^2`.
pub const SYMPLECTIC_TOL: f64 = 1e-12;

/// The standard symplectic form of order `2n`.
pub fn symplectic_form<T: Real>(n: usize) -> Matrix<T> {
    let mut j = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = -T::one();
        j[(n + i, i)] = T::one();
    }
    j
}

fn half_order<T: Real>(m: &Matrix<T>) -> Result<usize> {
    if !m.is_square() || m.rows() % 2 != 0 {
        return Err(Error::Dimension(format!("expected even square order, got {}x{}", m.rows(), m.cols())));
    }
    Ok(m.rows() / 2)
}

/// `|M'JM - J|_F`.
pub fn symplectic_defect<T: Real>(m: &Matrix<T>) -> Result<T> {
    let n = half_order(m)?;
    let j = symplectic_form::<T>(n);
    let mtjm = &(&m.transpose() * &j) * m;
    Ok((&mtjm - &j).frobenius_norm())
}

/// True iff `|M'JM - J|_F <= tol`.
pub fn is_symplectic<T: Real>(m: &Matrix<T>, tol: T) -> Result<bool> {
    Ok(symplectic_defect(m)? <= tol)
}

/// True iff `|JX + X'J|_F <= tol`.
pub fn is_hamiltonian<T: Real>(x: &Matrix<T>, tol: T) -> Result<bool> {
    let n = half_order(x)?;
    let j = symplectic_form::<T>(n);
    let defect = &(&j * x) + &(&x.transpose() * &j);
    Ok(defect.frobenius_norm() <= tol)
}

/// Matrix of order `2N` that passed the symplecticity check.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticMatrix<T> {
    inner: Matrix<T>,
}

impl<T: Real> SymplecticMatrix<T> {
    /// Accepts `m` when `|M'JM - J|_F <= 1e-12 |M|_F^2`.
    pub fn new(m: Matrix<T>) -> Result<Self> {
        let defect = symplectic_defect(&m)?;
        let norm = m.frobenius_norm();
        if !(defect <= T::lit(SYMPLECTIC_TOL) * norm * norm) {
            return Err(Error::InvalidParameter(format!(
                "matrix is not symplectic: defect {:e} vs |M|_F^2 = {:e}",
                defect.to_f64_lossy(),
                (norm * norm).to_f64_lossy()
            )));
        }
        Ok(SymplecticMatrix { inner: m })
    }

    pub fn identity(n: usize) -> Self {
        SymplecticMatrix { inner: Matrix::identity(2 * n) }
    }

    pub fn half_order(&self) -> usize {
        self.inner.rows() / 2
    }

    pub fn as_matrix(&self) -> &Matrix<T> {
        &self.inner
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.inner
    }

    /// `M^{-1} = -J M' J`.
    pub fn inverse(&self) -> Self {
        let j = symplectic_form::<T>(self.half_order());
        SymplecticMatrix { inner: (&(&j * &self.inner.transpose()) * &j).scale(-T::one()) }
    }
}

/// Element `[[A, B], [C, -A']]` of `sp_N(R)`, `B` and `C` symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct SpElement<T> {
    a: Matrix<T>,
    b: Matrix<T>,
    c: Matrix<T>,
}

/// `dim sp_N = 2N^2 + N`.
pub fn sp_dim(n: usize) -> usize {
    2 * n * n + n
}

fn symmetrized<T: Real>(m: &Matrix<T>) -> Matrix<T> {
    (m + &m.transpose()).scale(T::lit(0.5))
}

impl<T: Real> SpElement<T> {
    pub fn zero(n: usize) -> Self {
        SpElement { a: Matrix::zeros(n, n), b: Matrix::zeros(n, n), c: Matrix::zeros(n, n) }
    }

    /// Assembles from blocks; `b` and `c` are replaced by their symmetric parts.
    pub fn from_blocks(a: Matrix<T>, b: Matrix<T>, c: Matrix<T>) -> Result<Self> {
        let n = a.rows();
        for (name, m) in [("A", &a), ("B", &b), ("C", &c)] {
            if m.rows() != n || m.cols() != n {
                return Err(Error::Dimension(format!("block {name} is {}x{}, expected {n}x{n}", m.rows(), m.cols())));
            }
        }
        Ok(SpElement { b: symmetrized(&b), c: symmetrized(&c), a })
    }

    /// Reads the blocks of a Hamiltonian matrix, rejecting `|JX + X'J|_F > tol`.
    pub fn from_matrix(x: &Matrix<T>, tol: T) -> Result<Self> {
        if !is_hamiltonian(x, tol)? {
            return Err(Error::InvalidParameter("matrix is not Hamiltonian".into()));
        }
        let n = x.rows() / 2;
        Self::from_blocks(x.block(0, 0, n, n), x.block(0, n, n, n), x.block(n, 0, n, n))
    }

    pub fn order(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn b(&self) -> &Matrix<T> {
        &self.b
    }

    pub fn c(&self) -> &Matrix<T> {
        &self.c
    }

    pub fn to_matrix(&self) -> Matrix<T> {
        let d = -&self.a.transpose();
        Matrix::from_blocks(&self.a, &self.b, &self.c, &d)
    }

    pub fn scale(&self, s: T) -> Self {
        SpElement { a: self.a.scale(s), b: self.b.scale(s), c: self.c.scale(s) }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &SpElement<T>, s: T) -> Self {
        SpElement {
            a: self.a.add_scaled(&other.a, s),
            b: self.b.add_scaled(&other.b, s),
            c: self.c.add_scaled(&other.c, s),
        }
    }

    /// Commutator `XY - YX`, computed block-wise so that the result is
    /// Hamiltonian exactly.
    pub fn bracket(&self, other: &SpElement<T>) -> Result<Self> {
        if self.order() != other.order() {
            return Err(Error::Dimension(format!("bracket of orders {} and {}", self.order(), other.order())));
        }
        let (a1, b1, c1) = (&self.a, &self.b, &self.c);
        let (a2, b2, c2) = (&other.a, &other.b, &other.c);
        let a = &(&(a1 * a2) + &(b1 * c2)) - &(&(a2 * a1) + &(b2 * c1));
        // B = S + S' with S = A1 B2 - A2 B1; C = W + W' with W = C1 A2 - C2 A1
        let s = &(a1 * b2) - &(a2 * b1);
        let w = &(c1 * a2) - &(c2 * a1);
        Ok(SpElement { a, b: &s + &s.transpose(), c: &w + &w.transpose() })
    }

    /// Coordinates in the canonical basis: the `N^2` entries of `A` (row-major),
    /// then the upper triangles (`i <= j`, row-major) of `B` and of `C`.
    pub fn vectorize(&self) -> Vec<T> {
        let n = self.order();
        let mut v = Vec::with_capacity(sp_dim(n));
        v.extend_from_slice(self.a.as_slice());
        for m in [&self.b, &self.c] {
            for i in 0..n {
                for j in i..n {
                    v.push(m[(i, j)]);
                }
            }
        }
        v
    }

    /// Inverse of [`SpElement::vectorize`].
    pub fn from_coords(n: usize, coords: &[T]) -> Result<Self> {
        if coords.len() != sp_dim(n) {
            return Err(Error::Dimension(format!("{} coordinates for sp_{n} (dim {})", coords.len(), sp_dim(n))));
        }
        let a = Matrix::from_fn(n, n, |i, j| coords[i * n + j]);
        let mut b = Matrix::zeros(n, n);
        let mut c = Matrix::zeros(n, n);
        let mut k = n * n;
        for m in [&mut b, &mut c] {
            for i in 0..n {
                for j in i..n {
                    m[(i, j)] = coords[k];
                    m[(j, i)] = coords[k];
                    k += 1;
                }
            }
        }
        Ok(SpElement { a, b, c })
    }

    /// `k`-th canonical basis element.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        let mut e = vec![T::zero(); sp_dim(n)];
        if k >= e.len() {
            return Err(Error::Dimension(format!("basis index {k} out of range for sp_{n}")));
        }
        e[k] = T::one();
        Self::from_coords(n, &e)
    }

    /// `exp(scale * X)` as a checked symplectic matrix.
    pub fn exp(&self, scale: T) -> Result<SymplecticMatrix<T>> {
        let m = exp_matrix(&self.to_matrix(), scale)?;
        SymplecticMatrix::new(m)
    }
}
