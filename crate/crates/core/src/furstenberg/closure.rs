use crate::error::{Error, Result};
use crate::linalg::{sp_dim, SpElement};
use crate::scalar::Real;

/// Default relative residual threshold for accepting a new direction.
pub const DEFAULT_CLOSURE_TOL: f64 = 1e-8;

/// `2 (2N² + N)`.
pub fn default_max_depth(n: usize) -> usize {
    2 * sp_dim(n)
}

/// Outcome of a bracket-closure run.
#[derive(Clone, Debug)]
pub struct ClosureReport<T> {
    pub dim_reached: usize,
    pub target_dim: usize,
    /// Orthonormal coordinate vectors spanning the closure.
    pub basis: Vec<Vec<T>>,
    pub depth_used: usize,
    /// Smallest relative residual among accepted candidates.
    pub smallest_retained_norm: T,
    /// Largest relative residual among rejected nonzero candidates (0 if none);
    /// together with the smallest retained one this exposes the rank gap.
    pub largest_rejected_norm: T,
    /// `max_depth` was reached while the span was still growing.
    pub depth_exceeded: bool,
}

impl<T: Real> ClosureReport<T> {
    pub fn is_full(&self) -> bool {
        self.dim_reached == self.target_dim
    }
}

/// Incremental orthonormal basis with a relative residual acceptance test.
pub(crate) struct SpanBuilder<T> {
    basis: Vec<Vec<T>>,
    tol: T,
}

impl<T: Real> SpanBuilder<T> {
    pub(crate) fn new(tol: T) -> Self {
        SpanBuilder { basis: Vec::new(), tol }
    }

    pub(crate) fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Orthogonalizes `v` (modified Gram-Schmidt, two passes). Returns the unit
    /// residual when `|residual| > tol |v|`, and in every case the ratio.
    pub(crate) fn try_insert(&mut self, v: &[T]) -> (Option<Vec<T>>, T) {
        let norm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
        if norm == T::zero() || !norm.is_finite() {
            return (None, T::zero());
        }
        let mut r: Vec<T> = v.iter().map(|&x| x / norm).collect();
        for _pass in 0..2 {
            for q in &self.basis {
                let dot: T = r.iter().zip(q).map(|(&a, &b)| a * b).sum();
                for (ri, &qi) in r.iter_mut().zip(q) {
                    *ri -= dot * qi;
                }
            }
        }
        let res = r.iter().map(|&x| x * x).sum::<T>().sqrt();
        if res > self.tol {
            for x in r.iter_mut() {
                *x /= res;
            }
            self.basis.push(r.clone());
            (Some(r), res)
        } else {
            (None, res)
        }
    }

    pub(crate) fn into_basis(self) -> Vec<Vec<T>> {
        self.basis
    }
}

/// Dimension of the Lie algebra generated by `generators`, by breadth-first
/// bracketing.
///
/// The span is seeded with the generators. Each sweep brackets every current
/// basis element against the elements added in the previous sweep; a candidate
/// is kept when its residual after orthogonalization exceeds `tol` times its
/// norm. The run stops at full dimension `2N² + N`, after a sweep that adds
/// nothing, or after `max_depth` sweeps (then `depth_exceeded` is set if the
/// last sweep was still productive).
pub fn lie_closure<T: Real>(generators: &[SpElement<T>], tol: T, max_depth: usize) -> Result<ClosureReport<T>> {
    let first = generators.first().ok_or_else(|| Error::InvalidParameter("empty generator list".into()))?;
    let n = first.order();
    if let Some(g) = generators.iter().find(|g| g.order() != n) {
        return Err(Error::Dimension(format!("generators of orders {n} and {}", g.order())));
    }
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter(format!("closure tolerance {tol} must be positive")));
    }
    let target = sp_dim(n);
    let mut span = SpanBuilder::new(tol);
    let mut elements: Vec<SpElement<T>> = Vec::new();
    let mut smallest = T::infinity();
    let mut largest_rejected = T::zero();

    let mut accept = |v: &[T], span: &mut SpanBuilder<T>, elements: &mut Vec<SpElement<T>>| -> Result<bool> {
        let (kept, ratio) = span.try_insert(v);
        match kept {
            Some(unit) => {
                smallest = smallest.min(ratio);
                elements.push(SpElement::from_coords(n, &unit)?);
                Ok(true)
            }
            None => {
                largest_rejected = largest_rejected.max(ratio);
                Ok(false)
            }
        }
    };

    for g in generators {
        if span.dim() == target {
            break;
        }
        accept(&g.vectorize(), &mut span, &mut elements)?;
    }

    let mut frontier = 0..elements.len();
    let mut depth = 0;
    let mut exceeded = false;
    while span.dim() < target && !frontier.is_empty() {
        if depth == max_depth {
            exceeded = true;
            break;
        }
        depth += 1;
        let snapshot = elements.len();
        'sweep: for f in frontier.clone() {
            for b in 0..snapshot {
                let cand = elements[b].bracket(&elements[f])?;
                accept(&cand.vectorize(), &mut span, &mut elements)?;
                if span.dim() == target {
                    break 'sweep;
                }
            }
        }
        frontier = snapshot..elements.len();
    }

    let dim = span.dim();
    Ok(ClosureReport {
        dim_reached: dim,
        target_dim: target,
        basis: span.into_basis(),
        depth_used: depth,
        smallest_retained_norm: if dim == 0 { T::zero() } else { smallest },
        largest_rejected_norm: largest_rejected,
        depth_exceeded: exceeded,
    })
}
