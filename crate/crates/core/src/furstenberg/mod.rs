//! Density of the group generated by the binary-cell transfer matrices.
//!
//! When `ℓ |X_ω(E)| ≤ ρ` for every `ω ∈ {0,1}^N` and the generators
//! `X_ω(E)` span all of `sp_N` under brackets, the transfer matrices
//! `exp(ℓ X_ω(E))` lie in a neighbourhood of the identity where the logarithm
//! recovers `ℓ X_ω(E)`, and a small-generator density criterion for semisimple
//! groups makes the generated subgroup dense in `Sp_N(R)`. The radius `ρ` of
//! that neighbourhood is not computable; certificates are conditional on the
//! configured value.

mod closure;

use rayon::prelude::*;

pub use closure::{default_max_depth, lie_closure, ClosureReport, DEFAULT_CLOSURE_TOL};

use crate::error::{Error, Result};
use crate::linalg::{sp_dim, Matrix, SpElement, SymmetricMatrix};
use crate::model::{binary_cells, EnergyInterval, ModelParams};
use crate::scalar::Real;

/// Tridiagonal matrix with zero diagonal and unit off-diagonals.
pub fn witness_v0<T: Real>(n: usize) -> SymmetricMatrix<T> {
    let m = Matrix::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { T::one() } else { T::zero() });
    SymmetricMatrix::new(m).expect("tridiagonal witness is symmetric")
}

/// `X_ω(E)` for the `2^N` binary cells, lexicographic order.
pub fn binary_generators<T: Real>(params: &ModelParams<T>, e: T) -> Result<Vec<SpElement<T>>> {
    Ok(binary_cells::<T>(params.n())?.iter().map(|w| params.generator(w, e)).collect())
}

/// Closure of the binary-cell generators at energy `e`.
pub fn closure_at<T: Real>(params: &ModelParams<T>, e: T, tol: T) -> Result<ClosureReport<T>> {
    lie_closure(&binary_generators(params, e)?, tol, default_max_depth(params.n()))
}

#[derive(Clone, Debug)]
pub struct DensityCertificate<T> {
    pub energy: T,
    /// `ℓ |X_ω(E)| ≤ ρ` for all binary `ω`.
    pub norm_condition: bool,
    pub closure_full: bool,
    pub certified: bool,
    /// `|X_ω(E)|` for binary `ω` in lexicographic order.
    pub per_config_norms: Vec<T>,
    pub closure_dim: usize,
    pub target_dim: usize,
    /// The radius the certificate is conditional on.
    pub rho: T,
    pub ell: T,
}

/// Checks both density conditions at `e`.
///
/// A `false` certificate is indeterminate, never a refutation of density.
pub fn density_certificate<T: Real>(params: &ModelParams<T>, e: T, tol: T) -> Result<DensityCertificate<T>> {
    let cells = binary_cells::<T>(params.n())?;
    let norms: Vec<T> = cells.iter().map(|w| params.generator_norm(w, e)).collect();
    let norm_condition = norms.iter().all(|&x| params.ell() * x <= params.rho());
    let report = closure_at(params, e, tol)?;
    let closure_full = report.is_full();
    Ok(DensityCertificate {
        energy: e,
        norm_condition,
        closure_full,
        certified: norm_condition && closure_full,
        per_config_norms: norms,
        closure_dim: report.dim_reached,
        target_dim: report.target_dim,
        rho: params.rho(),
        ell: params.ell(),
    })
}

/// Bracket `[lo, hi]` around a run of deficient energies.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalBracket<T> {
    pub lo: T,
    pub hi: T,
    pub mid: T,
    /// Closure dimension at `mid`.
    pub dim_reached: usize,
}

#[derive(Clone, Debug)]
pub struct CriticalEnergySet<T> {
    pub brackets: Vec<CriticalBracket<T>>,
    pub scan_range: EnergyInterval<T>,
    pub grid_step: T,
    pub tolerance: T,
    pub target_dim: usize,
    /// Deficient at every grid point.
    pub non_generic_flag: bool,
    pub grid_points: usize,
}

impl<T: Real> CriticalEnergySet<T> {
    /// Bracket midpoints, ascending.
    pub fn energies(&self) -> Vec<T> {
        self.brackets.iter().map(|b| b.mid).collect()
    }

    /// Whether `e` lies within `margin` of a detected critical bracket.
    pub fn near_critical(&self, e: T, margin: T) -> bool {
        self.brackets.iter().any(|b| e >= b.lo - margin && e <= b.hi + margin)
    }
}

/// Bisects between `good` (indicator false) and `bad` (indicator true) and
/// returns the final `(good, bad)` pair.
pub fn refine_edge<T: Real>(mut good: T, mut bad: T, iters: usize, deficient: impl Fn(T) -> bool) -> (T, T) {
    for _ in 0..iters {
        let mid = (good + bad) * T::lit(0.5);
        if mid == good || mid == bad {
            break;
        }
        if deficient(mid) {
            bad = mid;
        } else {
            good = mid;
        }
    }
    (good, bad)
}

/// Grid `lo, lo + step, ...` up to and including `hi`.
pub fn step_grid<T: Real>(lo: T, hi: T, step: T) -> Vec<T> {
    let count = ((hi - lo) / step).floor().to_usize().unwrap_or(0);
    let mut g: Vec<T> = (0..=count).map(|k| lo + step * T::from_count(k)).filter(|&e| e <= hi).collect();
    if g.last().is_none_or(|&last| hi - last > step * T::lit(1e-9)) {
        g.push(hi);
    }
    g
}

/// Scans the closure deficiency over `energy_interval(params)`.
pub fn scan_critical_energies<T: Real>(
    params: &ModelParams<T>,
    grid_step: T,
    tol: T,
    refine_iters: usize,
) -> Result<CriticalEnergySet<T>> {
    let range = params.energy_interval()?;
    scan_critical_energies_in(params, range, grid_step, tol, refine_iters)
}

/// Same as [`scan_critical_energies`] over an explicit range.
///
/// Contiguous runs of deficient grid points are merged; each run's two edges are
/// refined by bisection on the deficiency indicator.
pub fn scan_critical_energies_in<T: Real>(
    params: &ModelParams<T>,
    range: EnergyInterval<T>,
    grid_step: T,
    tol: T,
    refine_iters: usize,
) -> Result<CriticalEnergySet<T>> {
    let (lo, hi) = range
        .bounds()
        .ok_or_else(|| Error::EmptyScanRange("energy interval is empty (ell >= ell_C)".into()))?;
    if !(grid_step > T::zero()) {
        return Err(Error::InvalidParameter(format!("grid step {grid_step} must be positive")));
    }
    let target = sp_dim(params.n());
    let grid = step_grid(lo, hi, grid_step);
    let dims: Vec<usize> = grid
        .par_iter()
        .map(|&e| closure_at(params, e, tol).map(|r| r.dim_reached))
        .collect::<Result<_>>()?;
    let deficient_at = |e: T| closure_at(params, e, tol).map_or(true, |r| r.dim_reached < target);

    let all_deficient = dims.iter().all(|&d| d < target);
    let mut brackets = Vec::new();
    if !all_deficient {
        let mut k = 0;
        while k < grid.len() {
            if dims[k] == target {
                k += 1;
                continue;
            }
            let start = k;
            while k < grid.len() && dims[k] < target {
                k += 1;
            }
            let end = k - 1;
            let left = if start == 0 { grid[0] } else { refine_edge(grid[start - 1], grid[start], refine_iters, deficient_at).0 };
            let right =
                if end + 1 == grid.len() { grid[end] } else { refine_edge(grid[end + 1], grid[end], refine_iters, deficient_at).0 };
            let mid = (left + right) * T::lit(0.5);
            let dim_mid = closure_at(params, mid, tol)?.dim_reached;
            brackets.push(CriticalBracket { lo: left, hi: right, mid, dim_reached: dim_mid });
        }
    }
    Ok(CriticalEnergySet {
        brackets,
        scan_range: range,
        grid_step,
        tolerance: tol,
        target_dim: target,
        non_generic_flag: all_deficient,
        grid_points: grid.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DisorderSpec, DEFAULT_RHO};

    fn bern() -> DisorderSpec<f64> {
        DisorderSpec::bernoulli(0.5).unwrap()
    }

    fn params(v: SymmetricMatrix<f64>, ell: f64) -> ModelParams<f64> {
        let n = v.order();
        ModelParams::new(v, vec![1.0; n], ell, DEFAULT_RHO, bern()).unwrap()
    }

    #[test]
    fn witness_shapes() {
        assert_eq!(witness_v0::<f64>(1).get(0, 0), 0.0);
        assert_eq!(witness_v0::<f64>(2).as_matrix(), &Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap());
        let w = witness_v0::<f64>(3);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(w.get(i, j), if i.abs_diff(j) == 1 { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn certificate_scalar_case() {
        let p = ModelParams::new(SymmetricMatrix::zeros(1), vec![1.0], 0.1, 0.69, bern()).unwrap();
        let c = density_certificate(&p, 0.0, 1e-8).unwrap();
        assert_eq!(c.per_config_norms, vec![1.0, 1.0]);
        assert!(c.norm_condition && c.closure_full && c.certified);
        assert_eq!(c.closure_dim, 3);
        // far outside the interval the norm condition fails
        let c = density_certificate(&p, 40.0, 1e-8).unwrap();
        assert!(!c.norm_condition && !c.certified && c.closure_full);
    }

    #[test]
    fn decoupled_channels_stay_in_subalgebra() {
        let p = params(SymmetricMatrix::zeros(2), 0.1);
        for e in [-3.0, -0.2, 0.0, 0.7, 4.1] {
            let c = density_certificate(&p, e, 1e-8).unwrap();
            assert_eq!(c.closure_dim, 6, "E = {e}");
            assert!(!c.closure_full && !c.certified);
        }
    }

    #[test]
    fn witness_generates_full_algebra() {
        for n in [2, 3] {
            let p = params(witness_v0(n), 0.1);
            let (lo, hi) = p.energy_interval().unwrap().bounds().unwrap();
            for e in [lo, 0.5 * (lo + hi), hi, 0.0, 1.0] {
                assert_eq!(closure_at(&p, e, 1e-8).unwrap().dim_reached, sp_dim(n), "N={n} E={e}");
            }
        }
    }

    #[test]
    fn scan_scalar_is_empty() {
        let p = ModelParams::new(SymmetricMatrix::from_diag(&[0.4]), vec![-2.0], 0.1, DEFAULT_RHO, bern()).unwrap();
        let s = scan_critical_energies(&p, 0.25, 1e-8, 20).unwrap();
        assert!(s.brackets.is_empty() && !s.non_generic_flag);
    }

    #[test]
    fn scan_decoupled_is_non_generic() {
        let p = params(SymmetricMatrix::zeros(2), 0.1);
        let s = scan_critical_energies(&p, 0.5, 1e-8, 20).unwrap();
        assert!(s.non_generic_flag);
        assert!(s.energies().is_empty());
    }

    #[test]
    fn scan_empty_range_is_error() {
        let p = params(witness_v0(2), 0.9);
        assert!(matches!(scan_critical_energies(&p, 0.1, 1e-8, 5), Err(Error::EmptyScanRange(_))));
    }

    #[test]
    fn bisection_brackets_isolated_root() {
        let root = 1.234_567_891_f64;
        let (good, bad) = refine_edge(1.0, 1.2345, 60, |e: f64| (e - root).abs() < 1e-3);
        assert!((bad - (root - 1e-3)).abs() < 1e-12);
        assert!(good <= bad);
    }

    #[test]
    fn step_grid_covers_range() {
        let g = step_grid(0.0, 1.0, 0.3);
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(step_grid(0.0, 0.9, 0.3).len(), 4);
    }
}
