use rayon::prelude::*;

use super::{count_below, discretize, Boundary, FiniteRestriction};
use crate::error::{Error, Result};
use crate::model::{EnergyInterval, ModelParams};
use crate::scalar::Real;
use crate::seed::{stream, task_rng};

/// Sample-averaged normalized counting function `#{λ ≤ E} / (2ℓL)`.
#[derive(Clone, Debug)]
pub struct IdsCurve<T> {
    pub energies: Vec<T>,
    pub values: Vec<T>,
    /// Standard error of the sample mean at each energy.
    pub stderrs: Vec<T>,
    pub l: usize,
    pub h: T,
    pub n_samples: usize,
    pub boundary: Boundary,
}

impl<T: Real> IdsCurve<T> {
    /// Linear interpolation; `None` outside the grid.
    pub fn value_at(&self, e: T) -> Option<T> {
        let (first, last) = (*self.energies.first()?, *self.energies.last()?);
        if e < first || e > last {
            return None;
        }
        let k = self.energies.partition_point(|&x| x <= e);
        if k == self.energies.len() {
            return self.values.last().copied();
        }
        let (e0, e1) = (self.energies[k - 1], self.energies[k]);
        let (v0, v1) = (self.values[k - 1], self.values[k]);
        Some(if e1 == e0 { v1 } else { v0 + (v1 - v0) * (e - e0) / (e1 - e0) })
    }
}

/// Estimates the IDS on a sorted grid from `n_samples` disorder paths.
///
/// Sample `s` draws its path from the stream `(master_seed, IDS, s)`, and each
/// path is counted at every grid energy.
pub fn estimate_ids<T: Real>(
    params: &ModelParams<T>,
    grid: &[T],
    l: usize,
    h: T,
    n_samples: usize,
    master_seed: u64,
    boundary: Boundary,
) -> Result<IdsCurve<T>> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
    }
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidParameter("energy grid must be sorted".into()));
    }
    let volume = T::lit(2.0) * params.ell() * T::from_count(l);
    let per_sample: Vec<Vec<T>> = (0..n_samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = task_rng(master_seed, stream::IDS, s as u64);
            let r = FiniteRestriction::sample(params, l, boundary, h, &mut rng)?;
            let a = discretize(params, &r)?;
            grid.iter().map(|&e| Ok(T::from_count(count_below(&a, e)?) / volume)).collect()
        })
        .collect::<Result<_>>()?;
    let ns = T::from_count(n_samples);
    let mut values = Vec::with_capacity(grid.len());
    let mut stderrs = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let mean = per_sample.iter().map(|v| v[k]).sum::<T>() / ns;
        let se = if n_samples > 1 {
            let var = per_sample.iter().map(|v| (v[k] - mean) * (v[k] - mean)).sum::<T>() / T::from_count(n_samples - 1);
            (var / ns).sqrt()
        } else {
            T::zero()
        };
        values.push(mean);
        stderrs.push(se);
    }
    Ok(IdsCurve { energies: grid.to_vec(), values, stderrs, l, h, n_samples, boundary })
}

/// Empirical modulus of continuity on `interval`: for spacings
/// `s = |I|, |I|/2, |I|/4, ...` down to the grid resolution, the largest
/// increment `N(E + s) - N(E)` with both ends in the interval.
pub fn ids_modulus<T: Real>(curve: &IdsCurve<T>, interval: &EnergyInterval<T>) -> Result<Vec<(T, T)>> {
    let (lo, hi) = interval.bounds().ok_or_else(|| Error::Range("empty interval".into()))?;
    let (first, last) = match (curve.energies.first(), curve.energies.last()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => return Err(Error::Range("empty curve".into())),
    };
    if lo < first || hi > last {
        return Err(Error::Range(format!("curve covers [{first}, {last}] but the interval is [{lo}, {hi}]")));
    }
    let inside: Vec<T> = curve.energies.iter().copied().filter(|&e| e >= lo && e <= hi).collect();
    let resolution = inside
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&d| d > T::zero())
        .fold(T::infinity(), T::min);
    if !resolution.is_finite() {
        return Err(Error::Range("fewer than two distinct grid energies inside the interval".into()));
    }
    let mut table = Vec::new();
    let mut s = hi - lo;
    while s >= resolution * T::lit(0.999) && s > T::zero() {
        let mut best = T::zero();
        for &e in inside.iter().filter(|&&e| e + s <= hi) {
            let (a, b) = (curve.value_at(e).unwrap(), curve.value_at(e + s).unwrap());
            best = best.max(b - a);
        }
        table.push((s, best));
        s = s * T::lit(0.5);
    }
    Ok(table)
}
