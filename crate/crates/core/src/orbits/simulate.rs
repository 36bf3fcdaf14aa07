//! Breadth-first orbit probing in exact arithmetic.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::action::SemigroupAction;
use crate::error::{Error, Result};
use crate::orbits::ChainStep;
use crate::rational::{is_zero_vec, max_abs, norm_sq, to_f64, QVector, Rational};

/// Cap on distinct states kept by one probe.
pub const STATE_CAP: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitProbe {
    pub escaped: bool,
    /// Letter names in application order; empty when nothing escaped.
    pub word: Vec<String>,
    /// Largest Euclidean norm seen.
    pub max_norm: f64,
    pub states: usize,
    /// True when the state cap stopped the search early.
    pub truncated: bool,
}

/// Explores `ρ(w)v` over words of length at most `max_depth`, escaping
/// once some Euclidean norm exceeds `escape_radius`.
///
/// States are deduplicated on a grid of mesh 2⁻²⁰ relative to `‖v‖∞`, with
/// truncation toward zero, so probing `c·v` with radius `|c|·R` visits the
/// same words as probing `v` with radius `R`.
pub fn orbit_simulate(
    action: &SemigroupAction,
    v: &[Rational],
    max_depth: usize,
    escape_radius: &Rational,
) -> Result<OrbitProbe> {
    if v.len() != action.dim() {
        return Err(Error::DimensionMismatch {
            expected: action.dim(),
            found: v.len(),
        });
    }
    if is_zero_vec(v) {
        return Err(Error::ZeroVector);
    }
    let r2 = escape_radius * escape_radius;
    let scale = Rational::from_integer(BigInt::one() << 20) / max_abs(v);
    let key = |s: &[Rational]| -> Vec<BigInt> { s.iter().map(|x| (x * &scale).trunc().to_integer()).collect() };
    let letters = action.letter_matrices();

    let mut max_sq = norm_sq(v);
    let mut seen: HashSet<Vec<BigInt>> = HashSet::new();
    seen.insert(key(v));
    let mut frontier: Vec<(QVector, Vec<usize>)> = vec![(v.to_vec(), Vec::new())];
    let mut truncated = false;
    let probe = |escaped, word: Vec<usize>, max_sq: &Rational, states, truncated| OrbitProbe {
        escaped,
        word: action.word_names(&word),
        max_norm: to_f64(max_sq).sqrt(),
        states,
        truncated,
    };
    if max_sq > r2 {
        return Ok(probe(true, Vec::new(), &max_sq, 1, false));
    }
    for _ in 0..max_depth {
        let mut next = Vec::new();
        for (s, w) in &frontier {
            for (i, g) in letters.iter().enumerate() {
                let t = g.mul_vec(s);
                let n2 = norm_sq(&t);
                let mut word = w.clone();
                word.push(i);
                if n2 > max_sq {
                    max_sq = n2.clone();
                }
                if n2 > r2 {
                    return Ok(probe(true, word, &max_sq, seen.len(), false));
                }
                if n2.is_zero() {
                    continue;
                }
                if seen.len() >= STATE_CAP {
                    truncated = true;
                    continue;
                }
                if seen.insert(key(&t)) {
                    next.push((t, word));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(probe(false, Vec::new(), &max_sq, seen.len(), truncated))
}

/// Follows escape-chain evidence to push the orbit of `v` past `bound`.
///
/// At the first step whose superset misses the current vector, powers of
/// the step's word grow it without bound. When the vector lies in a
/// superset but not in the invariant core below it, a word of at most
/// `search_depth` letters first moves it out of that superset. Returns the
/// letters applied, in application order, and the final Euclidean norm.
pub fn drive_along_chain(
    action: &SemigroupAction,
    steps: &[ChainStep],
    v: &[Rational],
    bound: f64,
    search_depth: usize,
    max_powers: usize,
) -> Result<Option<(Vec<String>, f64)>> {
    if is_zero_vec(v) {
        return Err(Error::ZeroVector);
    }
    let letters = action.letter_matrices();
    let norm = |x: &[Rational]| to_f64(&norm_sq(x)).sqrt();
    let mut x = v.to_vec();
    let mut word: Vec<usize> = Vec::new();
    for step in steps {
        if step.after.contains(&x) {
            continue;
        }
        if step.superset.contains(&x) {
            // Some word leaves the superset, since its invariant core misses x.
            let mut frontier = vec![(x.clone(), Vec::new())];
            let mut found = None;
            'search: for _ in 0..search_depth {
                let mut next = Vec::new();
                for (y, w) in &frontier {
                    for (i, g) in letters.iter().enumerate() {
                        let z = g.mul_vec(y);
                        let mut w2: Vec<usize> = w.clone();
                        w2.push(i);
                        if !step.superset.contains(&z) {
                            found = Some((z, w2));
                            break 'search;
                        }
                        next.push((z, w2));
                    }
                }
                frontier = next;
            }
            let Some((z, w)) = found else {
                return Ok(None);
            };
            x = z;
            word.extend(w);
        }
        let w = action.parse_word(&step.word)?;
        let m = action.word_matrix(&w);
        for _ in 0..max_powers {
            if norm(&x) > bound {
                break;
            }
            x = m.mul_vec(&x);
            word.extend(&w);
        }
        let n = norm(&x);
        return Ok((n > bound).then(|| (action.word_names(&word), n)));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::Mode;
    use crate::matrix::QMatrix;
    use crate::rational::{int_vec, rat};

    #[test]
    fn doubling_escapes_at_seven() {
        let a = SemigroupAction::single(QMatrix::from_i64(&[&[2]]), Mode::Semigroup).unwrap();
        let p = orbit_simulate(&a, &int_vec(&[1]), 10, &rat(100)).unwrap();
        assert!(p.escaped);
        assert_eq!(p.word.len(), 7);
    }

    #[test]
    fn rotation_stays_on_the_circle() {
        let r = QMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        let a = SemigroupAction::single(r, Mode::Semigroup).unwrap();
        let p = orbit_simulate(&a, &int_vec(&[1, 0]), 50, &rat(2)).unwrap();
        assert!(!p.escaped);
        assert_eq!(p.max_norm, 1.0);
        assert_eq!(p.states, 4);
    }

    #[test]
    fn fibonacci_direction_shrinks_then_grows() {
        let cat = QMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let a = SemigroupAction::single(cat, Mode::Semigroup).unwrap();
        let p = orbit_simulate(&a, &int_vec(&[34, -55]), 30, &rat(100)).unwrap();
        assert!(p.escaped);
        // (13,-21), (5,-8), (2,-3), (1,-1), (1,0), (2,1), ... , first norm above 100
        assert_eq!(p.word.len(), 10);
    }

    #[test]
    fn zero_vector_rejected() {
        let a = SemigroupAction::single(QMatrix::identity(1), Mode::Semigroup).unwrap();
        assert_eq!(
            orbit_simulate(&a, &int_vec(&[0]), 3, &rat(2)),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn chain_drives_affine_orbits() {
        let gens = vec![
            ("s".to_string(), QMatrix::from_i64(&[&[0, -1, 0], &[1, 0, 0], &[0, 0, 1]])),
            ("t".to_string(), QMatrix::from_i64(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]])),
            ("a".to_string(), QMatrix::from_i64(&[&[1, 0, 1], &[0, 1, 0], &[0, 0, 1]])),
            ("b".to_string(), QMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]])),
        ];
        let a = SemigroupAction::new(gens, Mode::Group).unwrap();
        let v = crate::orbits::expansiveness_check(&a, 8).unwrap();
        assert_eq!(v.status, crate::orbits::Status::Expansive);
        let steps = v.evidence.unwrap().steps;
        for x in [int_vec(&[1, 0, 0]), int_vec(&[0, 1, 0]), int_vec(&[0, 0, 1]), int_vec(&[3, -2, 1])] {
            let (_, n) = drive_along_chain(&a, &steps, &x, 1e3, 4, 5000).unwrap().unwrap();
            assert!(n > 1e3);
        }
    }
}
