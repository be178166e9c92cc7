//! The operator family `-d²/dx² ⊗ I_N + V + Σ_n diag(c_i ω_i^(n)) 1_[0,ℓ](x - ℓn)`
//! and its per-cell objects.
//!
//! On a cell with disorder `ω`, the eigenvalue equation at energy `E` has constant
//! coefficients. Its generator is `X_ω(E) = [[0, I], [M_ω(E), 0]]` with
//! `M_ω(E) = V + diag(c_i ω_i) - E I`, and the transfer matrix over one cell is
//! `T_ω(E) = exp(ℓ X_ω(E))`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{sym_eigenvalues, Matrix, SpElement, SymmetricMatrix, SymplecticMatrix};
use crate::scalar::Real;

/// Default density radius, `log 2`.
pub const DEFAULT_RHO: f64 = std::f64::consts::LN_2;

/// Largest `N` accepted by [`binary_cells`].
pub const MAX_BINARY_N: usize = 20;

const PROB_TOL: f64 = 1e-12;

/// Finite discrete single-site law: `(value, probability)` atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct DisorderSpec<T> {
    atoms: Vec<(T, f64)>,
    cumulative: Vec<f64>,
}

impl<T: Real> DisorderSpec<T> {
    /// Validates positivity, normalization (to 1e-12) and finiteness of the atoms.
    ///
    /// The support need not contain `{0, 1}`; see [`DisorderSpec::covers_binary`]
    /// for the hypothesis the density argument relies on.
    pub fn new(atoms: Vec<(T, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidParameter("disorder law needs at least one atom".into()));
        }
        if let Some((v, p)) = atoms.iter().find(|(v, p)| !v.is_finite() || !p.is_finite() || *p <= 0.0) {
            return Err(Error::InvalidParameter(format!("atom ({v}, {p}) must have a finite value and positive probability")));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidParameter(format!("atom probabilities sum to {total}, not 1")));
        }
        let mut acc = 0.0;
        let cumulative = atoms
            .iter()
            .map(|a| {
                acc += a.1;
                acc
            })
            .collect();
        Ok(DisorderSpec { atoms, cumulative })
    }

    /// `P(ω = 1) = p`, `P(ω = 0) = 1 - p`, `0 < p < 1`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!("Bernoulli parameter {p} outside (0, 1)")));
        }
        Self::new(vec![(T::zero(), 1.0 - p), (T::one(), p)])
    }

    /// Single atom at `value`; deterministic cells.
    pub fn degenerate(value: T) -> Self {
        Self::new(vec![(value, 1.0)]).expect("single atom is a valid law")
    }

    pub fn atoms(&self) -> &[(T, f64)] {
        &self.atoms
    }

    /// True when both 0 and 1 are atoms.
    pub fn covers_binary(&self) -> bool {
        let has = |x: T| self.atoms.iter().any(|a| a.0 == x);
        has(T::zero()) && has(T::one())
    }

    pub(crate) fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        self.cumulative.iter().position(|&c| u < c).unwrap_or(self.atoms.len() - 1)
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|(v, p)| v.to_f64_lossy() * p).sum()
    }
}

/// Disorder values of one cell, one per channel.
#[derive(Clone, Debug, PartialEq)]
pub struct CellConfig<T> {
    pub omega: Vec<T>,
}

impl<T: Real> CellConfig<T> {
    pub fn new(omega: Vec<T>) -> Self {
        CellConfig { omega }
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }
}

/// All `2^n` cells over `{0,1}`, lexicographic with the first channel most significant.
pub fn binary_cells<T: Real>(n: usize) -> Result<Vec<CellConfig<T>>> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    if n > MAX_BINARY_N {
        return Err(Error::SizeGuard(format!("2^{n} binary configurations (N > {MAX_BINARY_N})")));
    }
    Ok((0..1usize << n)
        .map(|bits| {
            CellConfig::new((0..n).map(|i| if bits >> (n - 1 - i) & 1 == 1 { T::one() } else { T::zero() }).collect())
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralBounds<T> {
    pub lambda_min: T,
    pub lambda_max: T,
    pub delta: T,
    pub ell_c: T,
}

/// Closed interval `[lo, hi]` or empty.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyInterval<T> {
    bounds: Option<(T, T)>,
}

impl<T: Real> EnergyInterval<T> {
    /// `[lo, hi]`; empty when `lo > hi`.
    pub fn new(lo: T, hi: T) -> Self {
        EnergyInterval { bounds: if lo <= hi { Some((lo, hi)) } else { None } }
    }

    pub fn empty() -> Self {
        EnergyInterval { bounds: None }
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_none()
    }

    pub fn bounds(&self) -> Option<(T, T)> {
        self.bounds
    }

    pub fn lo(&self) -> Option<T> {
        self.bounds.map(|b| b.0)
    }

    pub fn hi(&self) -> Option<T> {
        self.bounds.map(|b| b.1)
    }

    pub fn length(&self) -> T {
        self.bounds.map_or(T::zero(), |(lo, hi)| hi - lo)
    }

    pub fn contains(&self, e: T) -> bool {
        self.bounds.is_some_and(|(lo, hi)| lo <= e && e <= hi)
    }

    /// `points` equally spaced energies including both ends (the midpoint when
    /// `points == 1`).
    pub fn grid(&self, points: usize) -> Vec<T> {
        let Some((lo, hi)) = self.bounds else { return Vec::new() };
        match points {
            0 => Vec::new(),
            1 => vec![(lo + hi) * T::lit(0.5)],
            _ => {
                let step = (hi - lo) / T::from_count(points - 1);
                (0..points).map(|k| if k + 1 == points { hi } else { lo + step * T::from_count(k) }).collect()
            }
        }
    }

    /// Same grid, shrunk by `margin` (a fraction of the length) on each side.
    pub fn interior_grid(&self, points: usize, margin: T) -> Vec<T> {
        let Some((lo, hi)) = self.bounds else { return Vec::new() };
        let pad = (hi - lo) * margin;
        EnergyInterval::new(lo + pad, hi - pad).grid(points)
    }
}

/// Parameters of the operator family.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams<T> {
    v: SymmetricMatrix<T>,
    c: Vec<T>,
    ell: T,
    rho: T,
    disorder: DisorderSpec<T>,
}

impl<T: Real> ModelParams<T> {
    pub fn new(v: SymmetricMatrix<T>, c: Vec<T>, ell: T, rho: T, disorder: DisorderSpec<T>) -> Result<Self> {
        let n = v.order();
        if c.len() != n {
            return Err(Error::Dimension(format!("c has length {}, expected N = {n}", c.len())));
        }
        if let Some(i) = c.iter().position(|&ci| ci == T::zero() || !ci.is_finite()) {
            return Err(Error::InvalidParameter(format!("coupling c[{i}] = {} must be a non-zero real number", c[i])));
        }
        if !(ell > T::zero() && ell.is_finite()) {
            return Err(Error::InvalidParameter(format!("cell length ell = {ell} must be positive and finite")));
        }
        if !(rho > T::zero() && rho <= T::one()) {
            return Err(Error::InvalidParameter(format!("density radius rho = {rho} must lie in (0, 1]")));
        }
        Ok(ModelParams { v, c, ell, rho, disorder })
    }

    /// `N = 1`, `V = (v)`, `c = (c1)`, default `rho`.
    pub fn scalar(v: T, c1: T, ell: T, disorder: DisorderSpec<T>) -> Result<Self> {
        Self::new(SymmetricMatrix::from_diag(&[v]), vec![c1], ell, T::lit(DEFAULT_RHO), disorder)
    }

    pub fn n(&self) -> usize {
        self.v.order()
    }

    pub fn v(&self) -> &SymmetricMatrix<T> {
        &self.v
    }

    pub fn c(&self) -> &[T] {
        &self.c
    }

    pub fn ell(&self) -> T {
        self.ell
    }

    pub fn rho(&self) -> T {
        self.rho
    }

    pub fn disorder(&self) -> &DisorderSpec<T> {
        &self.disorder
    }

    pub fn with_ell(&self, ell: T) -> Result<Self> {
        Self::new(self.v.clone(), self.c.clone(), ell, self.rho, self.disorder.clone())
    }

    pub fn with_rho(&self, rho: T) -> Result<Self> {
        Self::new(self.v.clone(), self.c.clone(), self.ell, rho, self.disorder.clone())
    }

    pub fn with_disorder(&self, disorder: DisorderSpec<T>) -> Self {
        ModelParams { disorder, ..self.clone() }
    }

    fn couplings(&self, omega: &CellConfig<T>) -> Vec<T> {
        assert_eq!(omega.len(), self.n(), "cell configuration length must equal N");
        self.c.iter().zip(&omega.omega).map(|(&c, &w)| c * w).collect()
    }

    /// `M_ω(E) = V + diag(c_i ω_i) - E I`.
    ///
    /// Panics if `omega` does not have `N` entries.
    pub fn cell_matrix(&self, omega: &CellConfig<T>, e: T) -> SymmetricMatrix<T> {
        self.v.shifted_diag(&self.couplings(omega), -e)
    }

    /// `X_ω(E) = [[0, I], [M_ω(E), 0]]`.
    pub fn generator(&self, omega: &CellConfig<T>, e: T) -> SpElement<T> {
        let n = self.n();
        SpElement::from_blocks(Matrix::zeros(n, n), Matrix::identity(n), self.cell_matrix(omega, e).into_matrix())
            .expect("generator blocks have order N")
    }

    /// `T_ω(E) = exp(ℓ X_ω(E))`.
    pub fn transfer(&self, omega: &CellConfig<T>, e: T) -> Result<SymplecticMatrix<T>> {
        self.generator(omega, e).exp(self.ell)
    }

    /// Induced 2-norm of `X_ω(E)` through `max(1, max_i |λ_i - E|)`, where `λ_i`
    /// are the eigenvalues of `M_ω(0)`.
    pub fn generator_norm(&self, omega: &CellConfig<T>, e: T) -> T {
        let eig = sym_eigenvalues(&self.cell_matrix(omega, T::zero()));
        eig.into_iter().fold(T::one(), |m, l| m.max((l - e).abs()))
    }

    /// Extreme eigenvalues of `M_ω(0)` over `ω ∈ {0,1}^N`, half-spread `δ` and
    /// critical cell length `ℓ_C = min(1, ρ/δ)` (1 when `δ = 0`).
    pub fn spectral_bounds(&self) -> Result<SpectralBounds<T>> {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for omega in binary_cells::<T>(self.n())? {
            for l in sym_eigenvalues(&self.cell_matrix(&omega, T::zero())) {
                lo = lo.min(l);
                hi = hi.max(l);
            }
        }
        let delta = (hi - lo) * T::lit(0.5);
        let ell_c = if delta == T::zero() { T::one() } else { T::one().min(self.rho / delta) };
        Ok(SpectralBounds { lambda_min: lo, lambda_max: hi, delta, ell_c })
    }

    /// `[λ_max - ρ/ℓ, λ_min + ρ/ℓ]` when `ℓ < ℓ_C`, otherwise empty.
    pub fn energy_interval(&self) -> Result<EnergyInterval<T>> {
        let b = self.spectral_bounds()?;
        Ok(self.energy_interval_from(&b))
    }

    pub fn energy_interval_from(&self, b: &SpectralBounds<T>) -> EnergyInterval<T> {
        if self.ell < b.ell_c {
            let r = self.rho / self.ell;
            EnergyInterval::new(b.lambda_max - r, b.lambda_min + r)
        } else {
            EnergyInterval::empty()
        }
    }

    /// `N` independent draws from the disorder law.
    pub fn sample_cell<R: Rng + ?Sized>(&self, rng: &mut R) -> CellConfig<T> {
        let atoms = self.disorder.atoms();
        CellConfig::new((0..self.n()).map(|_| atoms[self.disorder.sample_index(rng)].0).collect())
    }

    /// Atom indices for one cell, packed in base `#atoms` (first channel most
    /// significant).
    pub(crate) fn sample_cell_code<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let k = self.disorder.atoms().len();
        (0..self.n()).fold(0, |code, _| code * k + self.disorder.sample_index(rng))
    }

    pub(crate) fn cell_from_code(&self, mut code: usize) -> CellConfig<T> {
        let atoms = self.disorder.atoms();
        let k = atoms.len();
        let mut omega = vec![T::zero(); self.n()];
        for slot in omega.iter_mut().rev() {
            *slot = atoms[code % k].0;
            code /= k;
        }
        CellConfig::new(omega)
    }

    /// Number of distinct cell codes, `#atoms^N`, if it fits in `usize`.
    pub(crate) fn cell_code_count(&self) -> Option<usize> {
        self.disorder.atoms().len().checked_pow(self.n() as u32)
    }
}
