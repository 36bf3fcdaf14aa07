//! Numeric estimate of the bounded-orbit subspace, snapped to an exact
//! rational subspace and then checked exactly.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::action::SemigroupAction;
use crate::numeric::symmetric_eigen;
use crate::orbits::certificate::{find_certificate, BoundednessCertificate, CLOSURE_CAP};
use crate::orbits::engine::escape_chain;
use crate::orbits::ChainStep;
use crate::rational::{rationalize, QVector};
use crate::subspace::Subspace;

/// Denominator cap for snapping numeric directions to rationals.
pub const SNAP_DENOMINATOR: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceEstimate {
    /// Exactly invariant snapped candidate; `None` when snapping failed.
    pub candidate: Option<Subspace>,
    pub bounded_cert: Option<BoundednessCertificate>,
    /// Escape chain for the quotient by the candidate; `None` when unknown.
    pub complement_escape: Option<Vec<ChainStep>>,
    /// Per-direction growth rates `(σ/√N)^{1/depth}` over all `N` words of
    /// length `depth`, ascending.
    pub growth: Vec<f64>,
}

/// Growth allowance for a direction to count as bounded at this depth.
fn allowance(depth: usize, threshold: f64) -> f64 {
    1.0 + threshold.max(((depth + 1) as f64).ln() / depth as f64)
}

/// Estimates the bounded subspace from the Gram matrix of all words of
/// length `depth`: directions whose root-mean-square growth rate stays
/// within the allowance span the candidate.
pub fn bounded_subspace_estimate(
    action: &SemigroupAction,
    depth: usize,
    threshold: f64,
) -> SubspaceEstimate {
    let depth = depth.max(1);
    let n = action.dim();
    let letters: Vec<DMatrix<f64>> = action.letter_matrices().iter().map(|m| m.to_f64()).collect();
    let k = letters.len() as f64;
    // Q_d = Σ_{|w|=d} M_wᵀ M_w, rescaled each step; log_scale tracks the factor.
    let mut q = DMatrix::<f64>::identity(n, n);
    let mut log_scale = 0.0;
    for _ in 0..depth {
        let mut next = DMatrix::<f64>::zeros(n, n);
        for g in &letters {
            next += g.transpose() * &q * g;
        }
        let s = next.amax();
        if s > 0.0 {
            next /= s;
            log_scale += s.ln();
        }
        q = next;
    }
    let (vals, vecs) = symmetric_eigen(&q);
    let growth: Vec<f64> = vals
        .iter()
        .map(|&l| {
            if l <= 0.0 {
                0.0
            } else {
                ((l.ln() + log_scale - depth as f64 * k.ln()) / (2.0 * depth as f64)).exp()
            }
        })
        .collect();
    let limit = allowance(depth, threshold);
    let dirs: Vec<Vec<f64>> = growth
        .iter()
        .enumerate()
        .filter(|(_, g)| **g <= limit)
        .map(|(i, _)| vecs.column(i).iter().cloned().collect())
        .collect();

    let candidate = snap(n, &dirs).filter(|u| {
        u.dim() == dirs.len()
            && action
                .generators()
                .iter()
                .all(|g| u.is_invariant(&g.matrix).unwrap_or(false))
    });
    let bounded_cert = candidate
        .as_ref()
        .and_then(|u| find_certificate(action, u, CLOSURE_CAP));
    let complement_escape = candidate.as_ref().and_then(|u| quotient_escape(action, u, depth));
    SubspaceEstimate {
        candidate,
        bounded_cert,
        complement_escape,
        growth,
    }
}

/// Escape chain on the quotient action by an invariant subspace.
fn quotient_escape(action: &SemigroupAction, u: &Subspace, depth: usize) -> Option<Vec<ChainStep>> {
    if u.is_full() {
        return Some(Vec::new());
    }
    let q = action
        .map_generators(|m| u.split_action(m).expect("invariant").1)
        .ok()?;
    let (l, steps, _) = escape_chain(&q, &Subspace::full(q.dim()), depth, 4096, |_| false).ok()?;
    l.is_zero().then_some(steps)
}

/// Row-reduces numeric directions with partial pivoting and snaps the
/// reduced rows to rationals with bounded denominators.
fn snap(n: usize, dirs: &[Vec<f64>]) -> Option<Subspace> {
    if dirs.is_empty() {
        return Some(Subspace::zero(n));
    }
    let mut m = DMatrix::from_fn(dirs.len(), n, |i, j| dirs[i][j]);
    let rows = m.nrows();
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..n {
        if r == rows {
            break;
        }
        let (p, best) = (r..rows)
            .map(|i| (i, m[(i, c)].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best < 1e-8 {
            continue;
        }
        m.swap_rows(r, p);
        let piv = m[(r, c)];
        for j in 0..n {
            m[(r, j)] /= piv;
        }
        for i in 0..rows {
            if i != r {
                let f = m[(i, c)];
                for j in 0..n {
                    m[(i, j)] -= f * m[(r, j)];
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if pivots.len() != rows {
        return None;
    }
    let vecs: Vec<QVector> = (0..rows)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let x = m[(i, j)];
                    if x.abs() < 1e-9 {
                        rationalize(0.0, 1)
                    } else {
                        rationalize(x, SNAP_DENOMINATOR)
                    }
                })
                .collect()
        })
        .collect();
    Some(Subspace::span(n, &vecs))
}
