//! Dual presentations of solenoids and k-regular chains of characters.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::action::{Mode, SemigroupAction};
use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::rational::{
    format_rational, lcm_of_denominators, serde_qvector, serde_qvectors, value_to_qvector,
    QVector, Rational,
};
use crate::subspace::{solve_in_span, Subspace};

/// A finitely generated `Z[Γ]`-submodule `H = Z[Γ]·F` of `Q^n`, with `Γ`
/// acting through `generators`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualModuleAction {
    pub n: usize,
    pub f: Vec<QVector>,
    pub action: SemigroupAction,
}

pub fn format_character(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

impl DualModuleAction {
    pub fn new(f: Vec<QVector>, generators: Vec<(String, QMatrix)>, mode: Mode) -> Result<Self> {
        let action = SemigroupAction::new(generators, mode)?;
        let n = action.dim();
        if f.is_empty() {
            return Err(Error::InvalidArgument("module needs at least one generator".into()));
        }
        for v in &f {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        Ok(DualModuleAction { n, f, action })
    }

    pub fn mode(&self) -> Mode {
        self.action.mode()
    }

    /// Parses `{"n", "F", "generators", "mode"}`; `mode` may be overridden.
    pub fn from_json(v: &Value, mode_override: Option<Mode>) -> Result<Self> {
        let n = v
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::parse("n", "expected a positive integer"))? as usize;
        let f = v
            .get("F")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse("F", "expected an array of characters"))?
            .iter()
            .enumerate()
            .map(|(i, c)| value_to_qvector(c).map_err(|e| Error::parse(format!("F[{i}]"), e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let mode = match mode_override {
            Some(m) => m,
            None => match v.get("mode").and_then(Value::as_str) {
                Some(s) => s.parse()?,
                None => Mode::Group,
            },
        };
        let gens = v
            .get("generators")
            .ok_or_else(|| Error::parse("generators", "missing"))?;
        let action = SemigroupAction::from_json(gens, mode)?;
        if action.dim() != n {
            return Err(Error::parse("n", format!("generators act on Q^{}", action.dim())));
        }
        DualModuleAction::new(f, action.generators().iter().map(|g| (g.name.clone(), g.matrix.clone())).collect(), mode)
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "n": self.n,
            "F": self.f.iter().map(|v| crate::rational::qvector_to_value(v)).collect::<Vec<_>>(),
            "generators": self.action.to_json(),
            "mode": self.mode().to_string(),
        })
    }
}

/// `A_m = {ρ̂(w) f : f ∈ F, |w| ≤ m}` for `m = 1..=depth`, each level in
/// discovery order and containing the previous one.
pub fn enumerate_basis(dm: &DualModuleAction, depth: usize) -> Vec<Vec<QVector>> {
    let letters = dm.action.letter_matrices();
    let mut seen: HashSet<QVector> = HashSet::new();
    let mut current: Vec<QVector> = Vec::new();
    for v in &dm.f {
        if seen.insert(v.clone()) {
            current.push(v.clone());
        }
    }
    let mut frontier = current.clone();
    let mut levels = Vec::with_capacity(depth);
    for _ in 0..depth {
        let mut next = Vec::new();
        for v in &frontier {
            for m in &letters {
                let w = m.mul_vec(v);
                if seen.insert(w.clone()) {
                    current.push(w.clone());
                    next.push(w);
                }
            }
        }
        levels.push(current.clone());
        frontier = next;
    }
    levels
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationTerm {
    #[serde(with = "crate::rational::serde_bigint")]
    pub coef: BigInt,
    #[serde(with = "serde_qvector")]
    pub character: QVector,
}

/// `n0 · target = Σ coef · character`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    #[serde(with = "serde_qvector")]
    pub target: QVector,
    #[serde(with = "crate::rational::serde_bigint")]
    pub n0: BigInt,
    pub terms: Vec<RelationTerm>,
}

impl Relation {
    pub fn cost(&self) -> BigInt {
        self.terms.iter().fold(self.n0.abs(), |acc, t| acc + t.coef.abs())
    }

    pub fn holds(&self) -> bool {
        let n = self.target.len();
        let mut lhs: QVector = self
            .target
            .iter()
            .map(|x| x * Rational::from_integer(self.n0.clone()))
            .collect();
        for t in &self.terms {
            if t.character.len() != n {
                return false;
            }
            for (l, c) in lhs.iter_mut().zip(&t.character) {
                *l -= c * Rational::from_integer(t.coef.clone());
            }
        }
        !self.n0.is_zero() && lhs.iter().all(Zero::is_zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhoBasisChain {
    #[serde(with = "levels_serde")]
    pub levels: Vec<Vec<QVector>>,
    pub k: u64,
    /// `relations[m]` relates the new characters of level `m + 1` to level `m`
    /// (zero-based).
    pub relations: Vec<Vec<Relation>>,
}

mod levels_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Level(#[serde(with = "serde_qvectors")] Vec<QVector>);

    pub fn serialize<S: Serializer>(v: &[Vec<QVector>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let levels: Vec<Level> = v.iter().map(|l| Level(l.clone())).collect();
        levels.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<QVector>>, D::Error> {
        Ok(Vec::<Level>::deserialize(d)?.into_iter().map(|l| l.0).collect())
    }
}

impl RhoBasisChain {
    pub fn characters(&self) -> &[QVector] {
        self.levels.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Re-checks nesting, every relation, its support and the bound `k`.
    pub fn verify(&self) -> bool {
        for m in 0..self.levels.len().saturating_sub(1) {
            let prev: HashSet<&QVector> = self.levels[m].iter().collect();
            let next: HashSet<&QVector> = self.levels[m + 1].iter().collect();
            if !prev.is_subset(&next) {
                return false;
            }
            let Some(rels) = self.relations.get(m) else {
                return false;
            };
            let targets: HashSet<&QVector> = rels.iter().map(|r| &r.target).collect();
            let fresh: HashSet<&QVector> = next.difference(&prev).copied().collect();
            if targets != fresh || rels.len() != fresh.len() {
                return false;
            }
            for r in rels {
                if !r.holds()
                    || r.cost() > BigInt::from(self.k)
                    || !r.terms.iter().all(|t| prev.contains(&t.character))
                {
                    return false;
                }
            }
        }
        self.relations.len() + 1 == self.levels.len().max(1)
    }
}

/// Integer relation `n0 · a0 = Σ n_j b_j` from rational coefficients.
fn clear(a0: &[Rational], support: &[&QVector], x: &[Rational]) -> Relation {
    let n0 = lcm_of_denominators(x);
    let terms = support
        .iter()
        .zip(x)
        .filter(|(_, c)| !c.is_zero())
        .map(|(b, c)| RelationTerm {
            coef: (c * Rational::from_integer(n0.clone())).to_integer(),
            character: (*b).clone(),
        })
        .collect();
    Relation {
        target: a0.to_vec(),
        n0,
        terms,
    }
}

/// Indices of a maximal independent subset, greedily in order.
fn column_basis(vs: &[QVector]) -> Vec<usize> {
    let mut chosen: Vec<QVector> = Vec::new();
    let mut idx = Vec::new();
    for (i, v) in vs.iter().enumerate() {
        if v.iter().all(Zero::is_zero) {
            continue;
        }
        if solve_in_span(&chosen, v).is_none() {
            chosen.push(v.clone());
            idx.push(i);
        }
    }
    idx
}

/// Subsets of size `r` visited by the local search.
const SUPPORT_CAP: usize = 4096;

/// Lowest-cost relation found for `a0` over `prev`.
fn best_relation(a0: &QVector, prev: &[QVector], basis: &[usize]) -> Result<Relation> {
    let cols: Vec<QVector> = basis.iter().map(|&i| prev[i].clone()).collect();
    let x = solve_in_span(&cols, a0).ok_or_else(|| Error::NotInSpan(format_character(a0)))?;
    let support: Vec<&QVector> = cols.iter().collect();
    let mut best = clear(a0, &support, &x);
    let mut consider = |rel: Relation| {
        if rel.cost() < best.cost() {
            best = rel;
        }
    };
    for (i, a) in prev.iter().enumerate() {
        if let Some(x) = solve_in_span(std::slice::from_ref(a), a0) {
            consider(clear(a0, &[a], &x));
        }
        for b in &prev[i + 1..] {
            if let Some(x) = solve_in_span(&[a.clone(), b.clone()], a0) {
                consider(clear(a0, &[a, b], &x));
            }
        }
    }
    // Other independent supports of full size.
    let r = basis.len();
    if r >= 3 {
        let mut visited = 0;
        let mut stack: Vec<usize> = Vec::new();
        fn next_subset(stack: &mut Vec<usize>, n: usize, r: usize) -> bool {
            if stack.is_empty() {
                if r > n {
                    return false;
                }
                stack.extend(0..r);
                return true;
            }
            let mut i = r;
            while i > 0 {
                i -= 1;
                if stack[i] < n - r + i {
                    stack[i] += 1;
                    for j in i + 1..r {
                        stack[j] = stack[j - 1] + 1;
                    }
                    return true;
                }
            }
            false
        }
        while visited < SUPPORT_CAP && next_subset(&mut stack, prev.len(), r) {
            visited += 1;
            let cols: Vec<QVector> = stack.iter().map(|&i| prev[i].clone()).collect();
            if column_basis(&cols).len() != r {
                continue;
            }
            if let Some(x) = solve_in_span(&cols, a0) {
                let support: Vec<&QVector> = cols.iter().collect();
                consider(clear(a0, &support, &x));
            }
        }
    }
    Ok(best)
}

/// Finds a low-cost integer relation for every new character of each level
/// over the level below; `k` is the largest cost used.
pub fn regular_chain(levels: &[Vec<QVector>], k_max: u64) -> Result<RhoBasisChain> {
    let mut relations = Vec::new();
    let mut k: u64 = 0;
    for m in 0..levels.len().saturating_sub(1) {
        let prev = &levels[m];
        let known: HashSet<&QVector> = prev.iter().collect();
        let basis = column_basis(prev);
        let mut rels = Vec::new();
        for a0 in &levels[m + 1] {
            if known.contains(a0) {
                continue;
            }
            let rel = best_relation(a0, prev, &basis)?;
            debug_assert!(rel.holds());
            let cost = rel.cost();
            if cost > BigInt::from(k_max) {
                return Err(Error::KExceeded(k_max));
            }
            k = k.max(u64::try_from(cost).expect("bounded by k_max"));
            rels.push(rel);
        }
        relations.push(rels);
    }
    Ok(RhoBasisChain {
        levels: levels.to_vec(),
        k,
        relations,
    })
}

/// Rational coordinates of the characters in `chars` over the first
/// maximal independent subset, and that subset's indices.
pub fn base_coordinates(chars: &[QVector]) -> (Vec<usize>, Vec<QVector>) {
    let basis = column_basis(chars);
    let cols: Vec<QVector> = basis.iter().map(|&i| chars[i].clone()).collect();
    let coords = chars
        .iter()
        .map(|c| solve_in_span(&cols, c).expect("basis spans its own set"))
        .collect();
    (basis, coords)
}

/// Q-span of `H`: the smallest invariant subspace containing `F`.
pub fn module_span(dm: &DualModuleAction) -> Subspace {
    Subspace::span(dm.n, &dm.f).invariant_closure(&dm.action.letter_matrices())
}

/// Integer gcd-free form of a relation; unused coefficients dropped.
pub fn normalize(rel: &Relation) -> Relation {
    let g = rel
        .terms
        .iter()
        .fold(rel.n0.clone(), |acc, t| acc.gcd(&t.coef));
    if g.is_one() || g.is_zero() {
        return rel.clone();
    }
    Relation {
        target: rel.target.clone(),
        n0: &rel.n0 / &g,
        terms: rel
            .terms
            .iter()
            .map(|t| RelationTerm {
                coef: &t.coef / &g,
                character: t.character.clone(),
            })
            .collect(),
    }
}
