//! Lyapunov exponents of products of i.i.d. transfer matrices.
//!
//! The estimator is the discrete QR flow: `Q_0 = I`, `T_k Q_k = Q_{k+1} R_{k+1}`,
//! and `γ_i ≈ (1/n) Σ_k log R_k[i,i]`. Partial sums `Σ_{i≤p} log R[i,i]` are the
//! log-volume growth of a `p`-frame, i.e. the growth of `∧^p` applied to the
//! initial flag, which [`exterior_log_flag_volume`] recomputes from minors.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{jacobi, qr_pos, Matrix, SymplecticMatrix};
use crate::model::ModelParams;
use crate::scalar::Real;
use crate::seed::{stream, task_rng};

/// Guard for the minor-based oracles: `p Σ_k log |M_k|_F` must stay below this.
pub const ORACLE_LOG_LIMIT: f64 = 300.0;

/// Cell codes beyond this count are not cached.
const MAX_CACHED_CELLS: usize = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EstimatorConfig {
    pub n_steps: usize,
    pub n_replicas: usize,
    pub burn_in: usize,
    pub master_seed: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig { n_steps: 20_000, n_replicas: 8, burn_in: 100, master_seed: 0 }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 || self.n_replicas == 0 {
            return Err(Error::InvalidParameter("n_steps and n_replicas must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct LyapunovSpectrum<T> {
    /// `2N` exponents per cell, nonincreasing.
    pub gammas: Vec<T>,
    /// Standard errors across replicas, aligned with `gammas`.
    pub stderrs: Vec<T>,
    pub energy: T,
    pub config: EstimatorConfig,
}

impl<T: Real> LyapunovSpectrum<T> {
    pub fn n(&self) -> usize {
        self.gammas.len() / 2
    }

    /// `|γ_i + γ_{2N-i+1}|` and its allowance `3 (σ_i + σ_{2N-i+1})` for `i ≤ N`.
    pub fn symmetry_defects(&self) -> Vec<(T, T)> {
        let m = self.gammas.len();
        (0..self.n())
            .map(|i| {
                let j = m - 1 - i;
                ((self.gammas[i] + self.gammas[j]).abs(), T::lit(3.0) * (self.stderrs[i] + self.stderrs[j]))
            })
            .collect()
    }

    /// `γ_1 > ... > γ_N > 0`, each inequality at three standard errors.
    pub fn is_separated(&self) -> bool {
        let n = self.n();
        let three = T::lit(3.0);
        let (g, s) = (&self.gammas, &self.stderrs);
        (0..n - 1).all(|i| g[i] - g[i + 1] > three * (s[i] + s[i + 1])) && g[n - 1] > three * s[n - 1]
    }

    /// Smallest of the gaps `γ_i - γ_{i+1}` (`i < N`) and `γ_N`.
    pub fn min_gap(&self) -> T {
        let n = self.n();
        (0..n - 1).map(|i| self.gammas[i] - self.gammas[i + 1]).fold(self.gammas[n - 1], T::min)
    }
}

/// Running QR flow with accumulated log-diagonals.
pub struct QrFlow<T> {
    q: Matrix<T>,
    acc: Vec<T>,
}

impl<T: Real> QrFlow<T> {
    pub fn new(order: usize) -> Self {
        QrFlow { q: Matrix::identity(order), acc: vec![T::zero(); order] }
    }

    /// Applies `t`; adds the log-diagonal of `R` when `record` is set.
    pub fn step(&mut self, t: &Matrix<T>, record: bool) -> Result<()> {
        let (q, r) = qr_pos(&(t * &self.q)).map_err(|e| {
            Error::Instability(format!("{e}; the product lost rank, use fewer steps per renormalization"))
        })?;
        if record {
            for (i, a) in self.acc.iter_mut().enumerate() {
                let l = r[(i, i)].ln();
                if !l.is_finite() {
                    return Err(Error::Instability(format!(
                        "log R[{i},{i}] is not finite; renormalize more often (smaller n_steps per block)"
                    )));
                }
                *a += l;
            }
        }
        self.q = q;
        Ok(())
    }

    pub fn log_diagonals(&self) -> &[T] {
        &self.acc
    }
}

/// Accumulated `log R[i,i]` for the product `M_{n-1} ... M_0`, starting from `Q = I`.
pub fn qr_log_diagonals<T: Real>(matrices: &[SymplecticMatrix<T>]) -> Result<Vec<T>> {
    let first = matrices.first().ok_or_else(|| Error::InvalidParameter("empty product".into()))?;
    let mut flow = QrFlow::new(first.as_matrix().rows());
    for m in matrices {
        flow.step(m.as_matrix(), true)?;
    }
    Ok(flow.acc)
}

/// Product `M_{n-1} ... M_0` (the first matrix acts first).
fn product<T: Real>(matrices: &[SymplecticMatrix<T>], p: usize) -> Result<Matrix<T>> {
    let first = matrices.first().ok_or_else(|| Error::InvalidParameter("empty product".into()))?;
    let order = first.as_matrix().rows();
    if p == 0 || p > order {
        return Err(Error::InvalidParameter(format!("exterior degree {p} outside 1..={order}")));
    }
    let bound: T = matrices.iter().map(|m| m.as_matrix().frobenius_norm().ln()).sum::<T>() * T::from_count(p);
    if bound > T::lit(ORACLE_LOG_LIMIT) {
        return Err(Error::OracleRange(format!(
            "p * sum log|M_k| = {:.1} exceeds {ORACLE_LOG_LIMIT}; use a shorter product",
            bound.to_f64_lossy()
        )));
    }
    let mut prod = Matrix::identity(order);
    for m in matrices {
        if m.as_matrix().rows() != order {
            return Err(Error::Dimension("matrices of different orders in product".into()));
        }
        prod = m.as_matrix() * &prod;
    }
    Ok(prod)
}

/// `p`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, p, &mut Vec::with_capacity(p), &mut out);
    out
}

fn minor<T: Real>(m: &Matrix<T>, rows: &[usize], cols: &[usize]) -> Result<T> {
    Matrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])]).determinant()
}

/// `p`-th compound matrix: all `p x p` minors, subsets in lexicographic order.
pub fn compound_matrix<T: Real>(m: &Matrix<T>, p: usize) -> Result<Matrix<T>> {
    let idx = subsets(m.rows(), p);
    let mut c = Matrix::zeros(idx.len(), idx.len());
    for (a, rows) in idx.iter().enumerate() {
        for (b, cols) in idx.iter().enumerate() {
            c[(a, b)] = minor(m, rows, cols)?;
        }
    }
    Ok(c)
}

/// `log |∧^p (M_{n-1} ... M_0)|` in the induced 2-norm, from the compound
/// matrix of the explicit product.
pub fn exterior_log_norm<T: Real>(matrices: &[SymplecticMatrix<T>], p: usize) -> Result<T> {
    let prod = product(matrices, p)?;
    let c = compound_matrix(&prod, p)?;
    let (vals, _) = jacobi(&(&c.transpose() * &c), false);
    let top = vals.last().copied().unwrap_or(T::zero());
    Ok(top.ln() * T::lit(0.5))
}

/// `log |∧^p P (e_1 ∧ ... ∧ e_p)|`: the log `p`-volume of the image of the
/// first `p` coordinate vectors, from the minors of those columns.
pub fn exterior_log_flag_volume<T: Real>(matrices: &[SymplecticMatrix<T>], p: usize) -> Result<T> {
    let prod = product(matrices, p)?;
    let cols: Vec<usize> = (0..p).collect();
    let mut sq = T::zero();
    for rows in subsets(prod.rows(), p) {
        let d = minor(&prod, &rows, &cols)?;
        sq += d * d;
    }
    Ok(sq.ln() * T::lit(0.5))
}

/// Transfer matrices indexed by cell code, computed once per energy.
struct TransferTable<'a, T> {
    params: &'a ModelParams<T>,
    energy: T,
    cached: Option<Vec<Matrix<T>>>,
}

impl<'a, T: Real> TransferTable<'a, T> {
    fn new(params: &'a ModelParams<T>, energy: T) -> Result<Self> {
        let cached = match params.cell_code_count() {
            Some(k) if k <= MAX_CACHED_CELLS => Some(
                (0..k)
                    .map(|code| params.transfer(&params.cell_from_code(code), energy).map(SymplecticMatrix::into_matrix))
                    .collect::<Result<Vec<_>>>()?,
            ),
            _ => None,
        };
        Ok(TransferTable { params, energy, cached })
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> Result<std::borrow::Cow<'_, Matrix<T>>> {
        match &self.cached {
            Some(table) => Ok(std::borrow::Cow::Borrowed(&table[self.params.sample_cell_code(rng)])),
            None => {
                let cell = self.params.sample_cell(rng);
                Ok(std::borrow::Cow::Owned(self.params.transfer(&cell, self.energy)?.into_matrix()))
            }
        }
    }
}

/// Per-replica exponents in QR order (not sorted).
fn replica_exponents<T: Real>(table: &TransferTable<'_, T>, cfg: &EstimatorConfig, replica: usize) -> Result<Vec<T>> {
    let mut rng = task_rng(cfg.master_seed, stream::LYAPUNOV, replica as u64);
    let mut flow = QrFlow::new(2 * table.params.n());
    for step in 0..cfg.burn_in + cfg.n_steps {
        let t = table.draw(&mut rng)?;
        flow.step(&t, step >= cfg.burn_in)?;
    }
    let n = T::from_count(cfg.n_steps);
    Ok(flow.acc.iter().map(|&a| a / n).collect())
}

/// Estimates the `2N` exponents (per cell of length `ℓ`) at energy `e`.
///
/// Replica `r` draws from the stream `(master_seed, LYAPUNOV, r)`, so the same
/// disorder realizations are reused at every energy.
pub fn lyapunov_spectrum<T: Real>(params: &ModelParams<T>, e: T, cfg: &EstimatorConfig) -> Result<LyapunovSpectrum<T>> {
    cfg.validate()?;
    if !e.is_finite() {
        return Err(Error::InvalidParameter("energy must be finite".into()));
    }
    let table = TransferTable::new(params, e)?;
    let per_replica: Vec<Vec<T>> =
        (0..cfg.n_replicas).into_par_iter().map(|r| replica_exponents(&table, cfg, r)).collect::<Result<_>>()?;
    let m = 2 * params.n();
    let reps = T::from_count(cfg.n_replicas);
    let mut stats: Vec<(T, T)> = (0..m)
        .map(|i| {
            let mean = per_replica.iter().map(|g| g[i]).sum::<T>() / reps;
            let se = if cfg.n_replicas > 1 {
                let var = per_replica.iter().map(|g| (g[i] - mean) * (g[i] - mean)).sum::<T>()
                    / T::from_count(cfg.n_replicas - 1);
                (var / reps).sqrt()
            } else {
                T::zero()
            };
            (mean, se)
        })
        .collect();
    stats.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    Ok(LyapunovSpectrum {
        gammas: stats.iter().map(|s| s.0).collect(),
        stderrs: stats.iter().map(|s| s.1).collect(),
        energy: e,
        config: *cfg,
    })
}

#[derive(Clone, Debug)]
pub struct SeparabilityVerdict<T> {
    pub spectrum: LyapunovSpectrum<T>,
    pub separated: bool,
}

/// Spectrum and 3σ separation verdict at each energy of `grid`.
pub fn separability_scan<T: Real>(
    params: &ModelParams<T>,
    grid: &[T],
    cfg: &EstimatorConfig,
) -> Result<Vec<SeparabilityVerdict<T>>> {
    grid.iter()
        .map(|&e| {
            let spectrum = lyapunov_spectrum(params, e, cfg)?;
            let separated = spectrum.is_separated();
            Ok(SeparabilityVerdict { spectrum, separated })
        })
        .collect()
}

/// Hölder exponents tabulated by the diagnostics.
pub const MODULUS_ALPHAS: [f64; 3] = [0.25, 0.5, 1.0];

/// `max |f(E) - f(E')| / |E - E'|^α` over all grid pairs, for each `α`.
///
/// Purely empirical; no exponent is inferred.
pub fn holder_table<T: Real>(energies: &[T], values: &[T], alphas: &[f64]) -> Vec<(f64, T)> {
    alphas
        .iter()
        .map(|&alpha| {
            let a = T::lit(alpha);
            let mut best = T::zero();
            for i in 0..energies.len() {
                for j in i + 1..energies.len() {
                    let de = (energies[j] - energies[i]).abs();
                    if de > T::zero() {
                        best = best.max((values[j] - values[i]).abs() / de.powf(a));
                    }
                }
            }
            (alpha, best)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymmetricMatrix;
    use crate::model::{CellConfig, DisorderSpec, DEFAULT_RHO};

    fn scalar(v: f64, ell: f64, d: DisorderSpec<f64>) -> ModelParams<f64> {
        ModelParams::scalar(v, 1.0, ell, d).unwrap()
    }

    #[test]
    fn deterministic_hyperbolic() {
        let p = scalar(1.0, 1.0, DisorderSpec::degenerate(0.0));
        let cfg = EstimatorConfig { n_steps: 2000, n_replicas: 3, burn_in: 100, master_seed: 1 };
        let s = lyapunov_spectrum(&p, 0.0, &cfg).unwrap();
        assert!((s.gammas[0] - 1.0).abs() < 1e-6, "{:?}", s.gammas);
        assert!((s.gammas[1] + 1.0).abs() < 1e-6);
        assert!(s.stderrs.iter().all(|&x| x < 1e-12));
    }

    #[test]
    fn determinism_bitwise() {
        let p = scalar(0.0, 0.1, DisorderSpec::bernoulli(0.5).unwrap());
        let cfg = EstimatorConfig { n_steps: 3000, n_replicas: 4, burn_in: 10, master_seed: 99 };
        let a = lyapunov_spectrum(&p, 0.7, &cfg).unwrap();
        let b = lyapunov_spectrum(&p, 0.7, &cfg).unwrap();
        assert_eq!(a.gammas, b.gammas);
        assert_eq!(a.stderrs, b.stderrs);
    }

    #[test]
    fn exterior_norm_examples() {
        let p = scalar(1.0, 1.0, DisorderSpec::degenerate(0.0));
        let t = p.transfer(&CellConfig::new(vec![0.0]), 0.0).unwrap();
        assert!((exterior_log_norm(&[t.clone()], 1).unwrap() - 1.0).abs() < 1e-13);
        assert!(exterior_log_norm(&[t.clone(), t.clone()], 2).unwrap().abs() < 1e-12);
        assert!(matches!(exterior_log_norm(&[t.clone()], 3), Err(Error::InvalidParameter(_))));
        let long = vec![t; 200];
        assert!(matches!(exterior_log_norm(&long, 2), Err(Error::OracleRange(_))));
    }

    #[test]
    fn compound_of_identity_is_identity() {
        let c = compound_matrix(&Matrix::<f64>::identity(4), 2).unwrap();
        assert_eq!(c, Matrix::identity(6));
        assert_eq!(subsets(4, 2).len(), 6);
    }

    #[test]
    fn verdict_logic() {
        let mk = |g: Vec<f64>, s: Vec<f64>| LyapunovSpectrum { gammas: g, stderrs: s, energy: 0.0, config: EstimatorConfig::default() };
        assert!(mk(vec![2.0, 1.0, -1.0, -2.0], vec![0.1; 4]).is_separated());
        assert!(!mk(vec![2.0, 1.5, -1.5, -2.0], vec![0.1; 4]).is_separated());
        assert!(!mk(vec![2.0, 0.2, -0.2, -2.0], vec![0.1; 4]).is_separated());
        let s = mk(vec![1.0, -0.9], vec![0.01, 0.01]);
        let d = s.symmetry_defects();
        assert!((d[0].0 - 0.1).abs() < 1e-12 && (d[0].1 - 0.06).abs() < 1e-12);
    }

    #[test]
    fn holder_table_linear_function() {
        let e: Vec<f64> = (0..11).map(|k| k as f64 * 0.1).collect();
        let f: Vec<f64> = e.iter().map(|x| 2.0 * x).collect();
        let t = holder_table(&e, &f, &MODULUS_ALPHAS);
        assert!((t[2].1 - 2.0).abs() < 1e-12);
        assert!(t[0].1 >= t[1].1 && t[1].1 >= t[2].1 - 1e-12);
    }

    #[test]
    fn uncached_path_matches_cached_statistics() {
        // three atoms in N = 2 is cached; force the uncached path with many atoms
        let atoms: Vec<(f64, f64)> = (0..70).map(|k| (k as f64 / 69.0, 1.0 / 70.0)).collect();
        let p = ModelParams::new(
            SymmetricMatrix::zeros(2),
            vec![1.0, 1.0],
            0.1,
            DEFAULT_RHO,
            DisorderSpec::new(atoms).unwrap(),
        )
        .unwrap();
        assert!(p.cell_code_count().unwrap() > MAX_CACHED_CELLS);
        let cfg = EstimatorConfig { n_steps: 200, n_replicas: 2, burn_in: 5, master_seed: 3 };
        let s = lyapunov_spectrum(&p, -1.0, &cfg).unwrap();
        assert_eq!(s.gammas.len(), 4);
        assert!(s.gammas.windows(2).all(|w| w[0] >= w[1]));
    }
}
