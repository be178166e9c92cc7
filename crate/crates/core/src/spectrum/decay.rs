use super::banded::BandLu;
use super::{count_below, discretize, BandedSymmetric, FiniteRestriction};
use crate::error::Result;
use crate::model::{EnergyInterval, ModelParams};
use crate::scalar::Real;

/// Cells with mass below this are left out of the fit.
pub const DECAY_MASS_FLOOR: f64 = 1e-24;

const INVERSE_ITERATIONS: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport<T> {
    pub eigenvalue: T,
    /// Amplitude decay rate per unit length, `-slope / 2` of the log-mass fit.
    pub fitted_rate: T,
    /// Root-mean-square residual of the fit.
    pub fit_residual: T,
    /// Centre of the cell carrying the largest mass.
    pub localization_center: T,
}

/// Eigenvalues in `[lo, hi]`, ascending, by bisection on the counting function.
pub fn eigenvalues_in<T: Real>(a: &BandedSymmetric<T>, lo: T, hi: T) -> Result<Vec<T>> {
    let c_lo = count_below(a, lo)?;
    let c_hi = count_below(a, hi)?;
    let (g_lo, g_hi) = a.gershgorin();
    let tol = T::epsilon() * T::lit(4.0) * g_lo.abs().max(g_hi.abs()).max(T::one());
    let mut out = Vec::with_capacity(c_hi.saturating_sub(c_lo));
    for k in c_lo + 1..=c_hi {
        // smallest E with count(E) >= k
        let (mut a_lo, mut a_hi) = (out.last().copied().unwrap_or(lo).max(lo), hi);
        while a_hi - a_lo > tol {
            let mid = (a_lo + a_hi) * T::lit(0.5);
            if mid <= a_lo || mid >= a_hi {
                break;
            }
            if count_below(a, mid)? >= k {
                a_hi = mid;
            } else {
                a_lo = mid;
            }
        }
        out.push(a_hi);
    }
    Ok(out)
}

fn normalize<T: Real>(x: &mut [T]) {
    let n = x.iter().map(|&v| v * v).sum::<T>().sqrt();
    if n > T::zero() {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

/// Inverse iteration at each eigenvalue, orthogonalized against earlier
/// vectors whose eigenvalues lie within `cluster`.
fn eigenvectors<T: Real>(a: &BandedSymmetric<T>, values: &[T], cluster: T) -> Vec<Vec<T>> {
    let n = a.order();
    let mut vecs: Vec<Vec<T>> = Vec::with_capacity(values.len());
    for (k, &lambda) in values.iter().enumerate() {
        let lu = BandLu::new(a, lambda);
        let mut x: Vec<T> = (0..n).map(|i| T::one() + T::lit(0.5) * T::lit(((i * 7919 + k * 104729) % 1000) as f64 / 1000.0)).collect();
        normalize(&mut x);
        for _ in 0..INVERSE_ITERATIONS {
            lu.solve_in_place(&mut x);
            for (j, prev) in vecs.iter().enumerate() {
                if (values[j] - lambda).abs() <= cluster {
                    let d: T = x.iter().zip(prev).map(|(&p, &q)| p * q).sum();
                    x.iter_mut().zip(prev).for_each(|(p, &q)| *p -= d * q);
                }
            }
            normalize(&mut x);
        }
        vecs.push(x);
    }
    vecs
}

/// Least-squares line `y = a + b x`; returns `(b, rms residual)`.
fn fit_line<T: Real>(xs: &[T], ys: &[T]) -> (T, T) {
    let n = T::from_count(xs.len());
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    let sxy: T = xs.iter().zip(ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    if sxx == T::zero() {
        return (T::zero(), T::zero());
    }
    let b = sxy / sxx;
    let rss: T = xs.iter().zip(ys).map(|(&x, &y)| {
        let r = y - my - b * (x - mx);
        r * r
    }).sum();
    (b, (rss / n).sqrt())
}

/// Decay fits for every eigenvector of the restriction with eigenvalue in `window`.
///
/// Masses are summed over the grid points of each cell; the fit is of
/// `log p_n` against the distance `ℓ |n - n_c|` from the heaviest cell.
pub fn eigen_decay<T: Real>(
    params: &ModelParams<T>,
    r: &FiniteRestriction<T>,
    window: &EnergyInterval<T>,
) -> Result<Vec<DecayReport<T>>> {
    let Some((lo, hi)) = window.bounds() else { return Ok(Vec::new()) };
    let a = discretize(params, r)?;
    let values = eigenvalues_in(&a, lo, hi)?;
    let (g_lo, g_hi) = a.gershgorin();
    let cluster = T::lit(1e-7) * g_lo.abs().max(g_hi.abs()).max(T::one());
    let vecs = eigenvectors(&a, &values, cluster);

    let n = params.n();
    let m = r.points_per_cell(params.ell())?;
    let cells = 2 * r.l;
    let offset = match r.boundary {
        super::Boundary::Dirichlet => 1,
        super::Boundary::Neumann => 0,
    };
    let floor = T::lit(DECAY_MASS_FLOOR);
    let mut reports = Vec::with_capacity(values.len());
    for (lambda, psi) in values.iter().zip(&vecs) {
        let mut mass = vec![T::zero(); cells];
        for (idx, &v) in psi.iter().enumerate() {
            mass[(idx / n + offset) / m] += v * v;
        }
        let total: T = mass.iter().copied().sum();
        mass.iter_mut().for_each(|p| *p /= total);
        let center = (0..cells).fold(0, |best, c| if mass[c] > mass[best] { c } else { best });
        let (xs, ys): (Vec<T>, Vec<T>) = (0..cells)
            .filter(|&c| mass[c] > floor)
            .map(|c| (params.ell() * T::from_count(c.abs_diff(center)), mass[c].ln()))
            .unzip();
        let (slope, residual) = fit_line(&xs, &ys);
        reports.push(DecayReport {
            eigenvalue: *lambda,
            fitted_rate: -slope * T::lit(0.5),
            fit_residual: residual,
            localization_center: r.cell_center(params.ell(), center),
        });
    }
    Ok(reports)
}
