//! Exact semi-decision of "every nonzero vector has an unbounded orbit".
//!
//! The bounded vectors form an invariant subspace `V`. Starting from the
//! whole space, each word `w` shrinks an invariant superset `L ⊇ V` to the
//! largest invariant subspace of `ker P(w|L)`, where `P` collects the
//! factors of the characteristic polynomial of `w|L` that can carry
//! bounded `⟨w⟩`-orbits. `L = 0` proves expansiveness. A nonzero invariant
//! subspace with a boundedness certificate proves the opposite.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::action::{Mode, SemigroupAction};
use crate::error::Result;
use crate::matrix::QMatrix;
use crate::orbits::certificate::{find_certificate, orbit_norm_bound, verify_certificate, CLOSURE_CAP};
use crate::orbits::estimate::bounded_subspace_estimate;
use crate::orbits::jsr::jsr_bounds;
use crate::orbits::{
    BoundedWitness, ChainStep, EscapeEvidence, ExpansivenessVerdict, Status, WeightEvidence,
    WeightObstruction,
};
use crate::poly::{char_poly, QPoly};
use crate::rational::{primitive_direction, QVector, Rational};
use crate::spectral::{circle_root_count, unit_disk_profile};
use crate::subspace::{kernel, Subspace};
use crate::weights::{
    expansive_by_weights, find_expansive_element, weight_decomposition, ModulusClass,
    WeightDecomposition,
};

/// Longest word the weight-based search for an expansive element may build.
const WEIGHT_WORD_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub depth: usize,
    /// Distinct word products examined by the escape chain.
    pub word_cap: usize,
    pub closure_cap: usize,
    /// Singular-value growth threshold for the numeric subspace estimate.
    pub threshold: f64,
    /// Attach joint spectral radius bounds at this depth to escape evidence.
    pub jsr_depth: Option<usize>,
    /// Fall back to the weight decomposition for commuting actions.
    pub use_weights: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            depth: 10,
            word_cap: 4096,
            closure_cap: CLOSURE_CAP,
            threshold: 1e-6,
            jsr_depth: None,
            use_weights: true,
        }
    }
}

impl CheckOptions {
    pub fn with_depth(depth: usize) -> Self {
        CheckOptions {
            depth,
            ..Self::default()
        }
    }
}

/// Product of the factors of `chi` whose roots may carry bounded orbits of
/// the cyclic action: roots on the circle (radical only), and in semigroup
/// mode roots inside the closed disk (full multiplicity). Factors that mix
/// kinds are kept whole, so the kernel is always a superset.
pub fn bounded_part_poly(chi: &QPoly, mode: Mode) -> Result<QPoly> {
    let mut out = QPoly::one();
    for (f, mult) in chi.squarefree_decomposition() {
        let (s, f) = f.strip_zero_roots();
        if s > 0 && mode == Mode::Semigroup {
            out = &out * &QPoly::monomial(Rational::from_integer(1.into()), mult);
        }
        if f.is_constant() {
            continue;
        }
        let cyc = cyclotomic_part(&f);
        out = &out * &cyc;
        let rest = f.exact_div(&cyc).expect("cyclotomic part divides");
        if rest.is_constant() {
            continue;
        }
        match mode {
            Mode::Group => {
                if circle_root_count(&rest)? > 0 {
                    out = &out * &rest;
                }
            }
            Mode::Semigroup => {
                let p = unit_disk_profile(&rest)?;
                if p.inside > 0 {
                    out = &out * &rest.pow(mult);
                } else if p.on_circle > 0 {
                    out = &out * &rest;
                }
            }
        }
    }
    Ok(out)
}

/// Largest divisor of the squarefree `f` whose roots are roots of unity.
fn cyclotomic_part(f: &QPoly) -> QPoly {
    let d = f.degree();
    let mut acc = QPoly::one();
    let z = QPoly::from_i64(&[0, 1]);
    let mut r = QPoly::one();
    // φ(N) ≤ d forces N ≤ 2d².
    for _ in 1..=(2 * d * d).max(2) {
        r = (&r * &z).div_rem(f).1;
        let c = f.gcd(&(&r - &QPoly::one()));
        if !c.is_constant() {
            let g = acc.gcd(&c);
            acc = (&acc * &c).exact_div(&g).expect("gcd divides");
        }
    }
    acc
}

/// Applies one word to the current superset; `None` when nothing shrinks.
fn shrink(
    letters: &[QMatrix],
    mode: Mode,
    l: &Subspace,
    word_matrix: &QMatrix,
) -> Result<Option<(Subspace, Subspace)>> {
    let t = word_matrix
        .restrict_to(&l.basis)
        .expect("superset is invariant under every word");
    let chi = char_poly(&t)?;
    let p = bounded_part_poly(&chi, mode)?;
    let pt = p.eval_matrix(&t);
    if pt.is_zero() {
        return Ok(None);
    }
    let coords = kernel(&pt);
    let vecs: Vec<QVector> = coords
        .basis
        .iter()
        .map(|c| {
            let mut v = vec![Rational::from_integer(0.into()); l.ambient_dim];
            for (ci, b) in c.iter().zip(&l.basis) {
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi += ci * bi;
                }
            }
            v
        })
        .collect();
    let superset = Subspace::span(l.ambient_dim, &vecs);
    let after = superset.invariant_core(letters);
    Ok(Some((superset, after)))
}

/// Runs the escape chain from `start` (which must be invariant) over words
/// up to `depth`, breadth first, examining at most `word_cap` distinct
/// products. `on_stall` is called with the current superset after each
/// level that did not shrink it; returning `true` stops the search.
pub fn escape_chain(
    action: &SemigroupAction,
    start: &Subspace,
    depth: usize,
    word_cap: usize,
    mut on_stall: impl FnMut(&Subspace) -> bool,
) -> Result<(Subspace, Vec<ChainStep>, usize)> {
    let letters = action.letter_matrices();
    let n = action.dim();
    let mode = action.mode();
    let mut l = start.clone();
    let mut steps = Vec::new();
    let mut seen: HashSet<QMatrix> = HashSet::new();
    seen.insert(QMatrix::identity(n));
    let mut words: Vec<(Vec<usize>, QMatrix)> = Vec::new();
    let mut frontier: Vec<(Vec<usize>, QMatrix)> = vec![(Vec::new(), QMatrix::identity(n))];
    let try_word = |l: &mut Subspace, w: &[usize], m: &QMatrix, steps: &mut Vec<ChainStep>| -> Result<bool> {
        if let Some((superset, after)) = shrink(&letters, mode, l, m)? {
            steps.push(ChainStep {
                word: action.word_names(w),
                before: l.clone(),
                superset,
                after: after.clone(),
            });
            *l = after;
            return Ok(true);
        }
        Ok(false)
    };
    'levels: for _ in 0..depth {
        let mut next = Vec::new();
        let mut changed = false;
        for (w, m) in &frontier {
            for (i, g) in letters.iter().enumerate() {
                if words.len() >= word_cap {
                    break 'levels;
                }
                let p = g * m;
                if !seen.insert(p.clone()) {
                    continue;
                }
                let mut w2 = w.clone();
                w2.push(i);
                if !l.is_zero() && try_word(&mut l, &w2, &p, &mut steps)? {
                    changed = true;
                }
                words.push((w2.clone(), p.clone()));
                next.push((w2, p));
            }
        }
        if l.is_zero() || next.is_empty() {
            break;
        }
        if !changed && on_stall(&l) {
            return Ok((l, steps, words.len()));
        }
        frontier = next;
    }
    // Words tried against a larger superset may cut deeper now.
    for _ in 0..3 {
        if l.is_zero() || steps.is_empty() {
            break;
        }
        let mut changed = false;
        for (w, m) in &words {
            if l.is_zero() {
                break;
            }
            if try_word(&mut l, w, m, &mut steps)? {
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok((l, steps, words.len()))
}

/// Recomputes every step of an escape chain from `start`; returns the
/// final superset when each step is reproduced exactly.
pub fn chain_end(action: &SemigroupAction, start: &Subspace, steps: &[ChainStep]) -> Option<Subspace> {
    let letters = action.letter_matrices();
    let mut l = start.clone();
    for s in steps {
        if s.before != l {
            return None;
        }
        let m = action.named_word_matrix(&s.word).ok()?;
        match shrink(&letters, action.mode(), &l, &m) {
            Ok(Some((superset, after))) if superset == s.superset && after == s.after => {
                l = after;
            }
            _ => return None,
        }
    }
    Some(l)
}

/// True iff the chain is reproduced exactly and ends at zero.
pub fn verify_chain(action: &SemigroupAction, start: &Subspace, steps: &[ChainStep]) -> bool {
    chain_end(action, start, steps).is_some_and(|l| l.is_zero())
}

/// Re-checks the exact content of a verdict without searching: chains are
/// replayed, certificates and witnesses re-verified, weight decompositions
/// recomputed on the reported subspace. Unknown verdicts must carry none.
pub fn verify_verdict(action: &SemigroupAction, v: &ExpansivenessVerdict) -> bool {
    let full = Subspace::full(action.dim());
    match v.status {
        Status::Unknown => v.evidence.is_none() && v.bounded.is_none() && v.obstruction.is_none() && v.witness.is_none(),
        Status::Expansive => {
            let Some(ev) = &v.evidence else { return false };
            if v.bounded.is_some() || v.obstruction.is_some() || v.witness.is_some() {
                return false;
            }
            let Some(end) = chain_end(action, &full, &ev.steps) else {
                return false;
            };
            if end.is_zero() {
                return true;
            }
            // The chain stops at the subspace whose weights decide the rest.
            let Some(w) = &ev.weights else { return false };
            if w.subspace != end {
                return false;
            }
            match recompute_weights(action, &w.subspace) {
                Some(d) => d == w.decomposition && expansive_by_weights(&d, action.mode()).expansive,
                None => false,
            }
        }
        Status::NotExpansive => {
            if v.evidence.is_some() {
                return false;
            }
            if let Some(b) = &v.bounded {
                let witness_ok = v.witness.as_ref().is_some_and(|w| !crate::rational::is_zero_vec(w) && b.subspace.contains(w));
                return witness_ok && verify_certificate(action, &b.subspace, &b.certificate);
            }
            let Some(ob) = &v.obstruction else { return false };
            let letters = action.letter_matrices();
            if !letters.iter().all(|m| ob.weights.subspace.is_invariant(m).unwrap_or(false)) {
                return false;
            }
            let Some(d) = recompute_weights(action, &ob.weights.subspace) else {
                return false;
            };
            let verdict = expansive_by_weights(&d, action.mode());
            d == ob.weights.decomposition
                && !verdict.expansive
                && d.blocks.get(ob.block).is_some_and(|b| b.weights.contains(&ob.weight))
                && match action.mode() {
                    Mode::Semigroup => ob.weight.values.iter().all(|x| x.class != ModulusClass::Outside),
                    Mode::Group => ob.weight.values.iter().all(|x| x.class == ModulusClass::OnCircle),
                }
        }
    }
}

fn restricted_action(action: &SemigroupAction, l: &Subspace) -> Option<SemigroupAction> {
    let restricted: Vec<(String, QMatrix)> = action
        .generators()
        .iter()
        .map(|g| Some((g.name.clone(), g.matrix.restrict_to(&l.basis)?)))
        .collect::<Option<_>>()?;
    SemigroupAction::new(restricted, action.mode()).ok()
}

fn recompute_weights(action: &SemigroupAction, l: &Subspace) -> Option<WeightDecomposition> {
    if l.is_zero() {
        return None;
    }
    weight_decomposition(&restricted_action(action, l)?).ok()
}

pub fn expansiveness_check(action: &SemigroupAction, depth: usize) -> Result<ExpansivenessVerdict> {
    expansiveness_check_with(action, &CheckOptions::with_depth(depth))
}

fn bounded_verdict(
    u: Subspace,
    cert: crate::orbits::BoundednessCertificate,
    depth: usize,
    words: usize,
) -> ExpansivenessVerdict {
    let witness = primitive_direction(&u.basis[0]);
    let norm_bound = orbit_norm_bound(&u, &cert, &witness);
    ExpansivenessVerdict {
        status: Status::NotExpansive,
        witness: Some(witness),
        evidence: None,
        bounded: Some(BoundedWitness {
            subspace: u,
            certificate: cert,
            norm_bound,
        }),
        obstruction: None,
        search_depth: depth,
        words_examined: words,
    }
}

pub fn expansiveness_check_with(
    action: &SemigroupAction,
    opts: &CheckOptions,
) -> Result<ExpansivenessVerdict> {
    let n = action.dim();
    let full = Subspace::full(n);
    let mut found: Option<(Subspace, crate::orbits::BoundednessCertificate)> = None;
    let (l, steps, words) = escape_chain(action, &full, opts.depth, opts.word_cap, |l| {
        if let Some(c) = find_certificate(action, l, opts.closure_cap) {
            found = Some((l.clone(), c));
            true
        } else {
            false
        }
    })?;
    if let Some((u, c)) = found {
        return Ok(bounded_verdict(u, c, opts.depth, words));
    }
    if l.is_zero() {
        let jsr = opts.jsr_depth.map(|d| jsr_bounds(action, d, 1e-6));
        return Ok(ExpansivenessVerdict {
            status: Status::Expansive,
            witness: None,
            evidence: Some(EscapeEvidence {
                steps,
                jsr,
                weights: None,
            }),
            bounded: None,
            obstruction: None,
            search_depth: opts.depth,
            words_examined: words,
        });
    }
    if let Some(c) = find_certificate(action, &l, opts.closure_cap) {
        return Ok(bounded_verdict(l, c, opts.depth, words));
    }
    let est = bounded_subspace_estimate(action, opts.depth, opts.threshold);
    if let Some(cand) = est.candidate {
        let u = cand.intersection(&l).invariant_core(&action.letter_matrices());
        if !u.is_zero() {
            if let Some(c) = find_certificate(action, &u, opts.closure_cap) {
                return Ok(bounded_verdict(u, c, opts.depth, words));
            }
        }
    }
    if opts.use_weights {
        if let Some(v) = weights_verdict(action, &l, steps, opts, words) {
            return Ok(v);
        }
    }
    Ok(ExpansivenessVerdict {
        status: Status::Unknown,
        witness: None,
        evidence: None,
        bounded: None,
        obstruction: None,
        search_depth: opts.depth,
        words_examined: words,
    })
}

/// Decides a commuting action on the invariant superset `l` by its joint
/// weights. In group mode a single expansive element is searched for and
/// appended to the chain, which then ends at zero.
fn weights_verdict(
    action: &SemigroupAction,
    l: &Subspace,
    mut steps: Vec<ChainStep>,
    opts: &CheckOptions,
    words: usize,
) -> Option<ExpansivenessVerdict> {
    let mode = action.mode();
    let sub = restricted_action(action, l)?;
    if sub.noncommuting_pair().is_some() {
        return None;
    }
    let decomposition = weight_decomposition(&sub).ok()?;
    let verdict = expansive_by_weights(&decomposition, mode);
    let evidence = WeightEvidence {
        subspace: l.clone(),
        decomposition,
    };
    let mut out = ExpansivenessVerdict {
        status: Status::Expansive,
        witness: None,
        evidence: None,
        bounded: None,
        obstruction: None,
        search_depth: opts.depth,
        words_examined: words,
    };
    if let Some((block, wi)) = verdict.failing {
        let weight = evidence.decomposition.blocks[block].weights[wi].clone();
        out.status = Status::NotExpansive;
        out.obstruction = Some(WeightObstruction {
            weights: evidence,
            block,
            weight,
        });
        return Some(out);
    }
    if mode == Mode::Group {
        if let Ok(Some(e)) = find_expansive_element(&sub, WEIGHT_WORD_CAP) {
            let letters = action.letter_matrices();
            let m = action.word_matrix(&action.parse_word(&e.word).ok()?);
            if let Ok(Some((superset, after))) = shrink(&letters, mode, l, &m) {
                steps.push(ChainStep {
                    word: e.word,
                    before: l.clone(),
                    superset,
                    after,
                });
            }
        }
    }
    out.evidence = Some(EscapeEvidence {
        steps,
        jsr: None,
        weights: Some(evidence),
    });
    Some(out)
}
