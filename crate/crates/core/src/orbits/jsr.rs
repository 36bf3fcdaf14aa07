//! Floating-point joint spectral radius bounds.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::SemigroupAction;
use crate::numeric::{norm2, spectral_radius};
use crate::poly::char_poly;
use crate::spectral::unit_disk_profile;

/// Words enumerated for the lower bound, over all lengths.
pub const LOWER_WORD_CAP: usize = 1 << 16;
/// Live products kept by the branch and bound before it stops deepening.
pub const NODE_CAP: usize = 1 << 17;
const BORDERLINE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsrBounds {
    pub lower: f64,
    pub upper: f64,
    /// Word attaining the lower bound, in application order.
    pub lower_word: Vec<String>,
    /// Longest word length used by the lower bound.
    pub lower_depth: usize,
    /// Level at which the branch and bound stopped.
    pub upper_depth: usize,
}

/// Spectral radius of a word matrix; values within 1e-9 of one are settled
/// by the exact root profile of the characteristic polynomial.
fn word_radius(action: &SemigroupAction, word: &[usize], m: &DMatrix<f64>) -> f64 {
    let r = spectral_radius(m);
    if (r - 1.0).abs() > BORDERLINE {
        return r;
    }
    let exact = action.word_matrix(word);
    let Ok(chi) = char_poly(&exact) else {
        return r;
    };
    match unit_disk_profile(&chi) {
        Ok(p) if p.outside > 0 => r.max(1.0 + f64::EPSILON),
        Ok(p) if p.on_circle > 0 => 1.0,
        Ok(_) => r.min(1.0 - f64::EPSILON),
        Err(_) => r,
    }
}

/// Lower bound from spectral radii of all words up to `depth` (capped so
/// that at most [`LOWER_WORD_CAP`] words are examined, which keeps the bound
/// monotone in `depth`); upper bound by Gripenberg's branch and bound.
pub fn jsr_bounds(action: &SemigroupAction, depth: usize, tol: f64) -> JsrBounds {
    let depth = depth.max(1);
    let letters: Vec<DMatrix<f64>> = action
        .letter_matrices()
        .iter()
        .map(|m| m.to_f64())
        .collect();
    let k = letters.len();
    let n = action.dim();

    // Lower bound.
    let mut lower_depth = 0;
    let mut total = 0usize;
    while lower_depth < depth {
        let level = k.saturating_pow(lower_depth as u32 + 1);
        if total.saturating_add(level) > LOWER_WORD_CAP && lower_depth > 0 {
            break;
        }
        total = total.saturating_add(level);
        lower_depth += 1;
    }
    let mut lower = 0.0f64;
    let mut lower_word: Vec<usize> = Vec::new();
    let mut level: Vec<(Vec<usize>, DMatrix<f64>)> = vec![(Vec::new(), DMatrix::identity(n, n))];
    for len in 1..=lower_depth {
        level = level
            .iter()
            .flat_map(|(w, m)| {
                letters.iter().enumerate().map(move |(i, g)| {
                    let mut w2 = w.clone();
                    w2.push(i);
                    (w2, g * m)
                })
            })
            .collect();
        let radii: Vec<f64> = level
            .par_iter()
            .map(|(w, m)| word_radius(action, w, m).powf(1.0 / len as f64))
            .collect();
        for (r, (w, _)) in radii.iter().zip(&level) {
            if *r > lower {
                lower = *r;
                lower_word = w.clone();
            }
        }
    }

    // Upper bound: each live product carries min_j ‖prefix_j‖^{1/j}.
    let alpha = lower + tol;
    let mut pruned_max = 0.0f64;
    let mut live: Vec<(DMatrix<f64>, f64)> = letters
        .iter()
        .map(|g| (g.clone(), norm2(g)))
        .collect();
    let mut upper_depth = 1;
    loop {
        let (keep, drop): (Vec<_>, Vec<_>) = live.into_iter().partition(|(_, b)| *b > alpha);
        pruned_max = drop.iter().map(|(_, b)| *b).fold(pruned_max, f64::max);
        live = keep;
        if live.is_empty() || upper_depth >= depth || live.len() * k > NODE_CAP {
            break;
        }
        let len = (upper_depth + 1) as f64;
        live = live
            .par_iter()
            .flat_map_iter(|(m, b)| {
                letters.iter().map(move |g| {
                    let p = g * m;
                    let nb = norm2(&p).powf(1.0 / len);
                    (p, b.min(nb))
                })
            })
            .collect();
        upper_depth += 1;
    }
    let live_max = live.iter().map(|(_, b)| *b).fold(0.0, f64::max);
    let upper = pruned_max.max(live_max).max(lower);
    JsrBounds {
        lower,
        upper,
        lower_word: action.word_names(&lower_word),
        lower_depth,
        upper_depth,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::Mode;
    use crate::matrix::QMatrix;

    #[test]
    fn scalar_two() {
        let a = SemigroupAction::single(QMatrix::from_i64(&[&[2]]), Mode::Semigroup).unwrap();
        let b = jsr_bounds(&a, 5, 1e-6);
        assert!((b.lower - 2.0).abs() < 1e-12);
        assert!((b.upper - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unipotent_upper_decreases() {
        let a = SemigroupAction::single(QMatrix::from_i64(&[&[1, 1], &[0, 1]]), Mode::Semigroup)
            .unwrap();
        let b2 = jsr_bounds(&a, 2, 1e-9);
        let b8 = jsr_bounds(&a, 8, 1e-9);
        assert_eq!(b2.lower, 1.0);
        assert_eq!(b8.lower, 1.0);
        assert!(b8.upper < b2.upper);
        assert!(b8.upper >= 1.0);
    }

    #[test]
    fn diagonal_pair() {
        let a = SemigroupAction::new(
            vec![
                ("a".into(), QMatrix::from_i64(&[&[2, 0], &[0, 0]])),
                ("b".into(), QMatrix::from_i64(&[&[0, 0], &[0, 2]])),
            ],
            Mode::Semigroup,
        )
        .unwrap();
        let b = jsr_bounds(&a, 6, 1e-6);
        assert!((b.lower - 2.0).abs() < 1e-12);
        assert!((b.upper - 2.0).abs() < 1e-12);
    }
}
