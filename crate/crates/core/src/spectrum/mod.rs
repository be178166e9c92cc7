//! Finite-volume restrictions of the operator to `[-ℓL, ℓL]`, eigenvalue
//! counting, the integrated density of states and eigenfunction decay.
//!
//! Cells of the restriction are indexed `0..2L`; cell `n` covers
//! `[ℓ(n - L), ℓ(n - L + 1))`.

mod banded;
mod decay;
mod ids;
mod shooting;

use rand::Rng;

pub use banded::{count_below, BandedSymmetric};
pub use decay::{eigen_decay, eigenvalues_in, DecayReport, DECAY_MASS_FLOOR};
pub use ids::{estimate_ids, ids_modulus, IdsCurve};
pub use shooting::{shooting_determinant, shooting_singularity, shooting_zero_count, transfer_product, SHOOTING_OVERFLOW};

use crate::error::{Error, Result};
use crate::model::{CellConfig, ModelParams};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Dirichlet,
    Neumann,
}

impl Boundary {
    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::Dirichlet => "dirichlet",
            Boundary::Neumann => "neumann",
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dirichlet" => Ok(Boundary::Dirichlet),
            "neumann" => Ok(Boundary::Neumann),
            _ => Err(Error::InvalidParameter(format!("unknown boundary condition '{s}'"))),
        }
    }
}

/// Restriction to `2L` cells with a fixed disorder path.
#[derive(Clone, Debug)]
pub struct FiniteRestriction<T> {
    pub l: usize,
    pub boundary: Boundary,
    pub h: T,
    pub omega_path: Vec<CellConfig<T>>,
}

impl<T: Real> FiniteRestriction<T> {
    pub fn new(l: usize, boundary: Boundary, h: T, omega_path: Vec<CellConfig<T>>) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidParameter("L must be at least 1".into()));
        }
        if !(h > T::zero()) || !h.is_finite() {
            return Err(Error::Grid(format!("grid step {h} must be positive")));
        }
        if omega_path.len() != 2 * l {
            return Err(Error::InvalidParameter(format!("path has {} cells, expected 2L = {}", omega_path.len(), 2 * l)));
        }
        Ok(FiniteRestriction { l, boundary, h, omega_path })
    }

    /// Path of `2L` i.i.d. cells drawn from `rng`.
    pub fn sample<R: Rng + ?Sized>(params: &ModelParams<T>, l: usize, boundary: Boundary, h: T, rng: &mut R) -> Result<Self> {
        let path = (0..2 * l).map(|_| params.sample_cell(rng)).collect();
        Self::new(l, boundary, h, path)
    }

    /// Path with the same configuration in every cell.
    pub fn uniform(l: usize, boundary: Boundary, h: T, omega: CellConfig<T>) -> Result<Self> {
        Self::new(l, boundary, h, vec![omega; 2 * l])
    }

    /// Grid points per cell, `ℓ/h`, which must be a positive integer.
    pub fn points_per_cell(&self, ell: T) -> Result<usize> {
        let ratio = ell / self.h;
        let m = ratio.round();
        if m < T::one() || (ratio - m).abs() > T::lit(1e-9) * ratio {
            return Err(Error::Grid(format!("h = {} does not divide ell = {ell} (ratio {ratio})", self.h)));
        }
        m.to_usize().ok_or_else(|| Error::Grid("points per cell out of range".into()))
    }

    /// Number of grid points: `2Lℓ/h - 1` (Dirichlet) or `2Lℓ/h` (Neumann).
    pub fn grid_points(&self, ell: T) -> Result<usize> {
        let total = 2 * self.l * self.points_per_cell(ell)?;
        Ok(match self.boundary {
            Boundary::Dirichlet => total - 1,
            Boundary::Neumann => total,
        })
    }

    /// Cell index of each grid point.
    fn point_cells(&self, m: usize) -> Vec<usize> {
        let total = 2 * self.l * m;
        match self.boundary {
            // x_j = -ℓL + j h, j = 1..total-1
            Boundary::Dirichlet => (1..total).map(|j| j / m).collect(),
            // cell-centred x_j = -ℓL + (j + 1/2) h
            Boundary::Neumann => (0..total).map(|j| j / m).collect(),
        }
    }

    /// Position of the centre of cell `n`.
    pub fn cell_center(&self, ell: T, n: usize) -> T {
        ell * (T::from_count(n) + T::lit(0.5) - T::from_count(self.l))
    }
}

/// Central finite differences for `-d²/dx² ⊗ I_N` plus the cellwise potential,
/// point-major (the `N` channels of a grid point are contiguous), half-bandwidth `N`.
pub fn discretize<T: Real>(params: &ModelParams<T>, r: &FiniteRestriction<T>) -> Result<BandedSymmetric<T>> {
    let n = params.n();
    if let Some(w) = r.omega_path.iter().find(|w| w.len() != n) {
        return Err(Error::Dimension(format!("cell configuration of length {} for N = {n}", w.len())));
    }
    let m = r.points_per_cell(params.ell())?;
    let cells = r.point_cells(m);
    let p = cells.len();
    let inv_h2 = T::one() / (r.h * r.h);
    let mut a = BandedSymmetric::zeros(p * n, n);
    for (j, &cell) in cells.iter().enumerate() {
        let omega = &r.omega_path[cell].omega;
        let lap = match r.boundary {
            Boundary::Neumann if j == 0 || j + 1 == p => inv_h2,
            _ => inv_h2 + inv_h2,
        };
        for ch in 0..n {
            for ch2 in 0..=ch {
                let v = params.v().get(ch, ch2);
                if v != T::zero() {
                    a.set(j * n + ch, j * n + ch2, v);
                }
            }
            a.add(j * n + ch, j * n + ch, lap + params.c()[ch] * omega[ch]);
            if j + 1 < p {
                a.set((j + 1) * n + ch, j * n + ch, -inv_h2);
            }
        }
    }
    Ok(a)
}
