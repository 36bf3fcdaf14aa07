//! Integer matrix actions on the n-torus: the irreducible-and-infinite
//! shortcut, the linear-orbit route, and a brute-force oracle over finite
//! rational grids.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::action::{Mode, SemigroupAction};
use crate::error::{Error, Result};
use crate::matrix::{algebra_basis, QMatrix};
use crate::orbits::{expansiveness_check, ExpansivenessVerdict, Status};
use crate::poly::char_poly;
use crate::rational::{serde_qvector, QVector, Rational};
use crate::spectral::unit_disk_profile;
use crate::subspace::{kernel, Subspace};
use crate::weights::coprime_split;

/// A point of `R^n / Z^n` with rational coordinates in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusPoint {
    #[serde(with = "serde_qvector")]
    pub coords: QVector,
}

impl TorusPoint {
    pub fn new(coords: &[Rational]) -> Self {
        TorusPoint {
            coords: coords.iter().map(|x| x - x.floor()).collect(),
        }
    }

    pub fn zero(n: usize) -> Self {
        TorusPoint {
            coords: vec![Rational::zero(); n],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn apply(&self, m: &QMatrix) -> Self {
        TorusPoint::new(&m.mul_vec(&self.coords))
    }

    /// Max over coordinates of the distance to the nearest integer.
    pub fn distance_to_zero(&self) -> Rational {
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        self.coords
            .iter()
            .map(|t| {
                let u = Rational::one() - t;
                if *t <= half { t.clone() } else { u }
            })
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Irreducibility {
    Irreducible,
    Reducible,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrreducibilityReport {
    pub algebra_dim: usize,
    pub absolutely_irreducible: bool,
    /// Proper nonzero subspace invariant under every generator, when found.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rational_invariant_subspace: Option<Subspace>,
    pub conclusion: Irreducibility,
}

fn require_integer(action: &SemigroupAction) -> Result<()> {
    for g in action.generators() {
        if !g.matrix.is_integer() {
            return Err(Error::NonIntegerEntries(g.name.clone()));
        }
    }
    Ok(())
}

/// Distinct products of up to `len` letters, shortest first, identity excluded.
fn short_words(action: &SemigroupAction, len: usize) -> Vec<(Vec<usize>, QMatrix)> {
    let letters = action.letter_matrices();
    let mut seen: HashSet<QMatrix> = HashSet::new();
    seen.insert(QMatrix::identity(action.dim()));
    let mut out = Vec::new();
    let mut frontier = vec![(Vec::new(), QMatrix::identity(action.dim()))];
    for _ in 0..len {
        let mut next = Vec::new();
        for (w, m) in &frontier {
            for (i, g) in letters.iter().enumerate() {
                let p = g * m;
                if seen.insert(p.clone()) {
                    let mut w2 = w.clone();
                    w2.push(i);
                    out.push((w2.clone(), p.clone()));
                    next.push((w2, p));
                }
            }
        }
        frontier = next;
    }
    out
}

/// Searches the kernels of rational factors of short words, for the
/// action and for its transpose, for a proper invariant subspace.
fn find_invariant_subspace(gens: &[QMatrix], words: &[QMatrix], n: usize) -> Option<Subspace> {
    let proper = |s: &Subspace| !s.is_zero() && !s.is_full();
    let transposed: Vec<QMatrix> = gens.iter().map(QMatrix::transpose).collect();
    for (dual, acting) in [(false, gens), (true, transposed.as_slice())] {
        for w in words {
            let w = if dual { w.transpose() } else { w.clone() };
            let Ok(chi) = char_poly(&w) else { continue };
            for piece in coprime_split(&chi) {
                let eigen = kernel(&piece.eval_matrix(&w));
                let general = kernel(&piece.pow(n).eval_matrix(&w));
                let mut candidates = vec![general.invariant_core(acting), eigen.invariant_core(acting)];
                for v in &eigen.basis {
                    candidates.push(Subspace::span(n, std::slice::from_ref(v)).invariant_closure(acting));
                }
                if let Some(u) = candidates.into_iter().find(|u| proper(u)) {
                    return Some(if dual { Subspace::span(n, &u.annihilator()) } else { u });
                }
            }
        }
    }
    None
}

pub fn irreducibility_check(action: &SemigroupAction) -> Result<IrreducibilityReport> {
    require_integer(action)?;
    let n = action.dim();
    let gens = action.generator_matrices();
    let algebra_dim = algebra_basis(&gens, n).len();
    if algebra_dim == n * n {
        return Ok(IrreducibilityReport {
            algebra_dim,
            absolutely_irreducible: true,
            rational_invariant_subspace: None,
            conclusion: Irreducibility::Irreducible,
        });
    }
    let mut words: Vec<QMatrix> = gens.clone();
    words.extend(short_words(action, 2).into_iter().map(|(_, m)| m));
    let found = find_invariant_subspace(&gens, &words, n);
    let conclusion = if found.is_some() {
        Irreducibility::Reducible
    } else {
        Irreducibility::Unknown
    };
    Ok(IrreducibilityReport {
        algebra_dim,
        absolutely_irreducible: false,
        rational_invariant_subspace: found,
        conclusion,
    })
}

/// Why a word of an integer action has infinite order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfiniteOrder {
    /// An eigenvalue of modulus greater than one.
    Expanding,
    /// Eigenvalues on the circle are roots of unity but not semisimple.
    Unipotent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfinitenessCertificate {
    pub word: Vec<String>,
    pub reason: InfiniteOrder,
}

/// Exact test that an integer matrix has infinite order. Nonzero
/// eigenvalues of modulus at most one are roots of unity (Kronecker), so
/// the order is finite exactly when there is no eigenvalue outside the
/// circle and the invertible part is semisimple.
pub fn infinite_order(m: &QMatrix) -> Result<Option<InfiniteOrder>> {
    let chi = char_poly(m)?;
    let (s, unit_part) = chi.strip_zero_roots();
    if unit_part.is_constant() {
        return Ok(None);
    }
    if unit_disk_profile(&unit_part)?.outside > 0 {
        return Ok(Some(InfiniteOrder::Expanding));
    }
    let nil = m.pow(s as u64);
    let radical = unit_part.squarefree_part().eval_matrix(m);
    if !(&radical * &nil).is_zero() {
        return Ok(Some(InfiniteOrder::Unipotent));
    }
    Ok(None)
}

pub fn certify_infinite(action: &SemigroupAction, len: usize) -> Result<Option<InfinitenessCertificate>> {
    for (w, m) in short_words(action, len) {
        if let Some(reason) = infinite_order(&m)? {
            return Ok(Some(InfinitenessCertificate {
                word: action.word_names(&w),
                reason,
            }));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorusRoute {
    /// Infinite semigroup acting irreducibly on `R^n`.
    IrreducibleInfinite,
    /// Every nonzero vector of `R^n` has an unbounded orbit.
    LinearOrbits,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusVerdict {
    pub route: TorusRoute,
    pub irreducibility: IrreducibilityReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub infinite: Option<InfinitenessCertificate>,
    pub verdict: ExpansivenessVerdict,
}

/// Word length scanned for an infinite-order element.
const INFINITE_SCAN: usize = 3;

pub fn torus_expansive(action: &SemigroupAction, depth: usize) -> Result<TorusVerdict> {
    require_integer(action)?;
    if action.mode() == Mode::Group {
        for g in action.generators() {
            if g.matrix.det()?.abs() != Rational::one() {
                return Err(Error::NotUnimodular(g.name.clone()));
            }
        }
    }
    let irreducibility = irreducibility_check(action)?;
    let infinite = certify_infinite(action, INFINITE_SCAN)?;
    if irreducibility.conclusion == Irreducibility::Irreducible && infinite.is_some() {
        return Ok(TorusVerdict {
            route: TorusRoute::IrreducibleInfinite,
            irreducibility,
            infinite,
            verdict: ExpansivenessVerdict {
                status: Status::Expansive,
                witness: None,
                evidence: None,
                bounded: None,
                obstruction: None,
                search_depth: INFINITE_SCAN,
                words_examined: 0,
            },
        });
    }
    Ok(TorusVerdict {
        route: TorusRoute::LinearOrbits,
        irreducibility,
        infinite,
        verdict: expansiveness_check(action, depth)?,
    })
}

pub const GRID_CAP: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub q: u64,
    pub epsilon: crate::rational::Exact,
    /// Grid points, zero included.
    pub states: u64,
    pub separated: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failing_point: Option<TorusPoint>,
}

pub fn rational_orbit_oracle(action: &SemigroupAction, q: u64, epsilon: &Rational) -> Result<OracleResult> {
    rational_orbit_oracle_capped(action, q, epsilon, GRID_CAP)
}

/// For every nonzero point of `(1/q)Z^n / Z^n`, checks that its forward
/// orbit reaches distance at least `epsilon` from zero. Points are visited
/// in lexicographic order, so the failing point is the first one.
pub fn rational_orbit_oracle_capped(
    action: &SemigroupAction,
    q: u64,
    epsilon: &Rational,
    cap: u128,
) -> Result<OracleResult> {
    require_integer(action)?;
    if q < 2 {
        return Err(Error::InvalidArgument("grid modulus must be at least 2".into()));
    }
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    if !epsilon.is_positive() || *epsilon > half {
        return Err(Error::InvalidArgument("epsilon must lie in (0, 1/2]".into()));
    }
    let n = action.dim();
    let states = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if states > cap {
        return Err(Error::GridTooLarge { states, cap });
    }
    let qb = BigInt::from(q);
    let letters: Vec<Vec<u64>> = action
        .letter_matrices()
        .iter()
        .map(|m| {
            m.entries()
                .iter()
                .map(|x| x.to_integer().mod_floor(&qb).to_u64().expect("reduced mod q"))
                .collect()
        })
        .collect();
    // min(k, q − k) ≥ ε q  ⇔  the coordinate is ε-far from zero.
    let far = |k: u64| Rational::from_integer(BigInt::from(k.min(q - k))) >= epsilon * Rational::from_integer(qb.clone());
    let far_table: Vec<bool> = (0..q).map(far).collect();
    let decode = |mut idx: u64| -> Vec<u64> {
        let mut v = vec![0; n];
        for c in v.iter_mut().rev() {
            *c = idx % q;
            idx /= q;
        }
        v
    };
    let encode = |v: &[u64]| v.iter().fold(0u64, |acc, c| acc * q + c);
    let apply = |m: &[u64], v: &[u64]| -> Vec<u64> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (m[i * n + j] as u128 * v[j] as u128 % q as u128) as u64)
                    .fold(0u64, |a, b| ((a as u128 + b as u128) % q as u128) as u64)
            })
            .collect()
    };
    // 0 unknown, 1 reaches far, 2 orbit stays near zero.
    let total = states as u64;
    let mut memo = vec![0u8; total as usize];
    for start in 1..total {
        if memo[start as usize] != 0 {
            continue;
        }
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start);
        queue.push_back(start);
        let mut good = false;
        while let Some(idx) = queue.pop_front() {
            let v = decode(idx);
            if memo[idx as usize] == 1 || v.iter().any(|&c| far_table[c as usize]) {
                good = true;
                break;
            }
            for m in &letters {
                let j = encode(&apply(m, &v));
                if seen.insert(j) {
                    queue.push_back(j);
                }
            }
        }
        if good {
            memo[start as usize] = 1;
            continue;
        }
        for idx in seen {
            memo[idx as usize] = 2;
        }
        let point = TorusPoint::new(
            &decode(start)
                .iter()
                .map(|&c| Rational::new(BigInt::from(c), qb.clone()))
                .collect::<Vec<_>>(),
        );
        return Ok(OracleResult {
            q,
            epsilon: crate::rational::Exact(epsilon.clone()),
            states: total,
            separated: false,
            failing_point: Some(point),
        });
    }
    Ok(OracleResult {
        q,
        epsilon: crate::rational::Exact(epsilon.clone()),
        states: total,
        separated: true,
        failing_point: None,
    })
}

/// Largest distance from zero over the (finite) forward orbit of a rational
/// point; `CapExceeded` past `cap` points.
pub fn orbit_sup_distance(action: &SemigroupAction, x: &TorusPoint, cap: usize) -> Result<Rational> {
    let letters = action.letter_matrices();
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(x.clone());
    queue.push_back(x.clone());
    let mut best = Rational::zero();
    while let Some(p) = queue.pop_front() {
        best = best.max(p.distance_to_zero());
        for m in &letters {
            let y = p.apply(m);
            if !seen.contains(&y) {
                if seen.len() >= cap {
                    return Err(Error::CapExceeded("torus orbit too large".into()));
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int_vec, ratio};

    fn act(ms: &[&[&[i64]]], mode: Mode) -> SemigroupAction {
        SemigroupAction::new(
            ms.iter()
                .enumerate()
                .map(|(i, m)| (format!("g{}", i + 1), QMatrix::from_i64(m)))
                .collect(),
            mode,
        )
        .unwrap()
    }

    const S: &[&[i64]] = &[&[0, -1], &[1, 0]];
    const T: &[&[i64]] = &[&[1, 1], &[0, 1]];

    #[test]
    fn sl2_generators_are_irreducible() {
        let r = irreducibility_check(&act(&[S, T], Mode::Semigroup)).unwrap();
        assert_eq!(r.algebra_dim, 4);
        assert_eq!(r.conclusion, Irreducibility::Irreducible);
        let v = torus_expansive(&act(&[S, T], Mode::Semigroup), 10).unwrap();
        assert_eq!(v.route, TorusRoute::IrreducibleInfinite);
        assert_eq!(v.verdict.status, Status::Expansive);
    }

    #[test]
    fn diagonal_is_reducible() {
        let r = irreducibility_check(&act(&[&[&[2, 0], &[0, 3]]], Mode::Semigroup)).unwrap();
        assert_eq!(r.conclusion, Irreducibility::Reducible);
        assert_eq!(r.rational_invariant_subspace, Some(Subspace::span(2, &[int_vec(&[1, 0])])));
    }

    #[test]
    fn rotation_alone_is_unknown() {
        let r = irreducibility_check(&act(&[S], Mode::Group)).unwrap();
        assert_eq!(r.algebra_dim, 2);
        assert_eq!(r.conclusion, Irreducibility::Unknown);
        let v = torus_expansive(&act(&[S], Mode::Group), 10).unwrap();
        assert_eq!(v.route, TorusRoute::LinearOrbits);
        assert_eq!(v.verdict.status, Status::NotExpansive);
    }

    #[test]
    fn dual_search_finds_invariant_line() {
        // e1 + e2 spans the only invariant line; its annihilator is found
        // through the transpose as well.
        let r = irreducibility_check(&act(&[&[&[1, 1], &[0, 2]]], Mode::Semigroup)).unwrap();
        let u = r.rational_invariant_subspace.unwrap();
        assert!(u.is_invariant(&QMatrix::from_i64(&[&[1, 1], &[0, 2]])).unwrap());
    }

    #[test]
    fn doubling_and_errors() {
        let v = torus_expansive(&act(&[&[&[2]]], Mode::Semigroup), 10).unwrap();
        assert_eq!(v.verdict.status, Status::Expansive);
        assert_eq!(
            torus_expansive(&act(&[&[&[2]]], Mode::Group), 10).unwrap_err(),
            Error::NotUnimodular("g1".into())
        );
        let half = SemigroupAction::single(QMatrix::diag(&[ratio(1, 2)]), Mode::Semigroup).unwrap();
        assert!(matches!(torus_expansive(&half, 5), Err(Error::NonIntegerEntries(_))));
    }

    #[test]
    fn infinite_order_cases() {
        assert_eq!(infinite_order(&QMatrix::from_i64(T)).unwrap(), Some(InfiniteOrder::Unipotent));
        assert_eq!(infinite_order(&QMatrix::from_i64(S)).unwrap(), None);
        assert_eq!(
            infinite_order(&QMatrix::from_i64(&[&[2, 1], &[1, 1]])).unwrap(),
            Some(InfiniteOrder::Expanding)
        );
        assert_eq!(infinite_order(&QMatrix::from_i64(&[&[0, 1], &[0, 0]])).unwrap(), None);
    }

    #[test]
    fn oracle_examples() {
        let q = ratio(1, 4);
        let d = rational_orbit_oracle(&act(&[&[&[2]]], Mode::Semigroup), 8, &q).unwrap();
        assert!(d.separated);
        let id = rational_orbit_oracle(&act(&[&[&[1]]], Mode::Semigroup), 8, &q).unwrap();
        assert!(!id.separated);
        assert_eq!(id.failing_point, Some(TorusPoint::new(&[ratio(1, 8)])));
        let cat = rational_orbit_oracle(&act(&[&[&[2, 1], &[1, 1]]], Mode::Group), 5, &q).unwrap();
        assert!(cat.separated);
        assert_eq!(cat.states, 25);
        assert!(matches!(
            rational_orbit_oracle_capped(&act(&[&[&[1]]], Mode::Semigroup), 8, &q, 7),
            Err(Error::GridTooLarge { states: 8, cap: 7 })
        ));
    }

    #[test]
    fn doubling_orbit_of_an_eighth() {
        let a = act(&[&[&[2]]], Mode::Semigroup);
        let d = orbit_sup_distance(&a, &TorusPoint::new(&[ratio(1, 8)]), 100).unwrap();
        assert_eq!(d, ratio(1, 2));
        assert_eq!(TorusPoint::new(&[ratio(3, 4)]).distance_to_zero(), ratio(1, 4));
    }
}
