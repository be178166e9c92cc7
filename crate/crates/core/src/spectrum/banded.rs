use crate::error::{Error, Result};
use crate::linalg::{jacobi, Matrix};
use crate::scalar::Real;

/// Symmetric matrix with half-bandwidth `bw`, stored as its lower band:
/// `data[i * (bw + 1) + k]` holds entry `(i, i - k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedSymmetric<T> {
    n: usize,
    bw: usize,
    data: Vec<T>,
}

impl<T: Real> BandedSymmetric<T> {
    pub fn zeros(n: usize, bw: usize) -> Self {
        BandedSymmetric { n, bw, data: vec![T::zero(); n * (bw + 1)] }
    }

    /// Band of a dense symmetric matrix; entries outside the band must vanish.
    pub fn from_dense(m: &Matrix<T>, bw: usize) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension("banded matrix must be square".into()));
        }
        let n = m.rows();
        let mut b = Self::zeros(n, bw);
        for i in 0..n {
            for j in 0..n {
                let v = m[(i, j)];
                if i.abs_diff(j) > bw {
                    if v != T::zero() {
                        return Err(Error::Dimension(format!("entry ({i},{j}) lies outside half-bandwidth {bw}")));
                    }
                } else if j <= i {
                    if v != m[(j, i)] {
                        return Err(Error::InvalidParameter(format!("entries ({i},{j}) and ({j},{i}) differ")));
                    }
                    b.set(i, j, v);
                }
            }
        }
        Ok(b)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bw {
            T::zero()
        } else {
            self.data[i * (self.bw + 1) + (i - j)]
        }
    }

    /// Sets `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        assert!(i - j <= self.bw, "entry ({i},{j}) outside band {}", self.bw);
        self.data[i * (self.bw + 1) + (i - j)] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: T) {
        let cur = self.get(i, j);
        self.set(i, j, cur + v);
    }

    pub fn to_dense(&self) -> Matrix<T> {
        Matrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n];
        for i in 0..self.n {
            for j in i.saturating_sub(self.bw)..(i + self.bw + 1).min(self.n) {
                y[i] += self.get(i, j) * x[j];
            }
        }
        y
    }

    /// `(min_i (a_ii - r_i), max_i (a_ii + r_i))` over Gershgorin discs.
    pub fn gershgorin(&self) -> (T, T) {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..self.n {
            let r: T = (i.saturating_sub(self.bw)..(i + self.bw + 1).min(self.n))
                .filter(|&j| j != i)
                .map(|j| self.get(i, j).abs())
                .sum();
            lo = lo.min(self.get(i, i) - r);
            hi = hi.max(self.get(i, i) + r);
        }
        (lo, hi)
    }

    fn scale(&self) -> T {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs()).max(T::one())
    }

    /// Dense block `rows r0..r1, cols c0..c1`.
    fn dense_block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix<T> {
        Matrix::from_fn(r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j))
    }
}

/// Negative-pivot count of `A - E I`, or `None` on pivot breakdown.
fn inertia_scalar<T: Real>(a: &BandedSymmetric<T>, e: T, pivmin: T) -> Option<usize> {
    let mut count = 0;
    let mut d = T::one();
    for i in 0..a.n {
        let off = if i > 0 && a.bw > 0 { a.get(i, i - 1) } else { T::zero() };
        d = a.get(i, i) - e - if i > 0 { off * off / d } else { T::zero() };
        if d.abs() <= pivmin || !d.is_finite() {
            return None;
        }
        if d < T::zero() {
            count += 1;
        }
    }
    Some(count)
}

/// Block Sturm elimination with blocks of the bandwidth size: the matrix is
/// block tridiagonal and each Schur complement is diagonalized exactly.
fn inertia_block<T: Real>(a: &BandedSymmetric<T>, e: T, pivmin: T) -> Option<usize> {
    let b = a.bw;
    let nblocks = a.n.div_ceil(b);
    let mut count = 0;
    // S_{k-1}^{-1} as V diag(1/λ) V'
    let mut prev_inv: Option<Matrix<T>> = None;
    for k in 0..nblocks {
        let (r0, r1) = (k * b, ((k + 1) * b).min(a.n));
        let mut s = a.dense_block(r0, r1, r0, r1);
        for i in 0..r1 - r0 {
            s[(i, i)] -= e;
        }
        if let Some(inv) = &prev_inv {
            let c = a.dense_block(r0, r1, r0 - b, r0);
            let corr = &(&c * inv) * &c.transpose();
            s = &s - &corr;
        }
        let (vals, vecs) = jacobi(&s, true);
        let vecs = vecs.expect("vectors requested");
        if vals.iter().any(|v| v.abs() <= pivmin || !v.is_finite()) {
            return None;
        }
        count += vals.iter().filter(|&&v| v < T::zero()).count();
        let m = r1 - r0;
        prev_inv = Some(Matrix::from_fn(m, m, |i, j| {
            (0..m).map(|l| vecs[(i, l)] * vecs[(j, l)] / vals[l]).sum()
        }));
    }
    Some(count)
}

/// Number of eigenvalues `≤ e`, by Sylvester inertia of `A - e I`.
///
/// A pivot breakdown retries with `e + k 1e-12 scale`, `k = 1, 2, 3`.
pub fn count_below<T: Real>(a: &BandedSymmetric<T>, e: T) -> Result<usize> {
    if a.n == 0 {
        return Ok(0);
    }
    if !e.is_finite() {
        return Err(Error::InvalidParameter("energy must be finite".into()));
    }
    let scale = a.scale().max(e.abs());
    let pivmin = T::min_positive_value().sqrt() * scale;
    for k in 0..4 {
        let shifted = e + T::from_count(k) * T::lit(1e-12) * scale;
        let r = if a.bw <= 1 { inertia_scalar(a, shifted, pivmin) } else { inertia_block(a, shifted, pivmin) };
        if let Some(c) = r {
            return Ok(c);
        }
    }
    Err(Error::Factorization(format!(
        "zero pivot persists near E = {e} after perturbation; shift the energy slightly"
    )))
}

/// LU with partial pivoting of `A - shift I` in band storage
/// (lower bandwidth `bw`, upper `2 bw` after pivoting).
pub(crate) struct BandLu<T> {
    n: usize,
    bw: usize,
    width: usize,
    data: Vec<T>,
    piv: Vec<usize>,
}

impl<T: Real> BandLu<T> {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.bw - i)
    }

    /// Near-zero pivots are replaced by `eps * scale`, as inverse iteration needs.
    pub(crate) fn new(a: &BandedSymmetric<T>, shift: T) -> Self {
        let (n, bw) = (a.n, a.bw);
        let width = 3 * bw + 1;
        let mut lu = BandLu { n, bw, width, data: vec![T::zero(); n * width], piv: vec![0; n] };
        for i in 0..n {
            for j in i.saturating_sub(bw)..(i + bw + 1).min(n) {
                let v = a.get(i, j) - if i == j { shift } else { T::zero() };
                let k = lu.idx(i, j);
                lu.data[k] = v;
            }
        }
        let tiny = T::epsilon() * a.scale().max(shift.abs());
        for k in 0..n {
            let last = (k + bw).min(n - 1);
            let mut p = k;
            for i in k + 1..=last {
                if lu.data[lu.idx(i, k)].abs() > lu.data[lu.idx(p, k)].abs() {
                    p = i;
                }
            }
            lu.piv[k] = p;
            let jmax = (k + 2 * bw).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    let (a1, a2) = (lu.idx(k, j), lu.idx(p, j));
                    lu.data.swap(a1, a2);
                }
            }
            let kk = lu.idx(k, k);
            if lu.data[kk].abs() < tiny {
                lu.data[kk] = if lu.data[kk] < T::zero() { -tiny } else { tiny };
            }
            let pivot = lu.data[kk];
            for i in k + 1..=last {
                let ik = lu.idx(i, k);
                let f = lu.data[ik] / pivot;
                lu.data[ik] = f;
                if f != T::zero() {
                    for j in k + 1..=jmax {
                        let (ij, kj) = (lu.idx(i, j), lu.idx(k, j));
                        let u = lu.data[kj];
                        lu.data[ij] -= f * u;
                    }
                }
            }
        }
        lu
    }

    pub(crate) fn solve_in_place(&self, x: &mut [T]) {
        let (n, bw) = (self.n, self.bw);
        for k in 0..n {
            x.swap(k, self.piv[k]);
            for i in k + 1..(k + bw + 1).min(n) {
                x[i] = x[i] - self.data[self.idx(i, k)] * x[k];
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..(k + 2 * bw + 1).min(n) {
                s -= self.data[self.idx(k, j)] * x[j];
            }
            x[k] = s / self.data[self.idx(k, k)];
        }
    }
}
