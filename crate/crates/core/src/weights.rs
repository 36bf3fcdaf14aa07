//! Generalized weights of commuting families and the search for a single
//! expansive element.
//!
//! Each block of the decomposition is a joint primary component. Inside a
//! block the restricted matrices generate a commutative algebra `A`; its
//! joint weights are the roots `μ` of the squarefree characteristic
//! polynomial `r` of a separating element `N`, and every generator agrees
//! with a polynomial `P_i(N)` modulo the radical of `A`, so the weight of
//! generator `i` at `μ` is `P_i(μ)`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::action::{Mode, SemigroupAction};
use crate::error::{Error, Result};
use crate::matrix::{algebra_basis, QMatrix};
use crate::poly::{char_poly, QPoly};
use crate::rational::{Exact, QVector, Rational};
use crate::roots::{eval_c, isolate_roots, refine_roots, sqrt_lower, sqrt_upper, taylor_radius, RootDisk};
use crate::spectral::{circle_root_count, single_expansive, SingleVerdict};
use crate::subspace::{kernel, solve_in_span, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModulusClass {
    Inside,
    OnCircle,
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModulusIsOne {
    Yes,
    No,
    /// Some weights of the block have modulus one and some do not.
    Mixed,
}

/// Modulus of one generator at one joint weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightValue {
    pub generator: String,
    pub class: ModulusClass,
    pub modulus_lo: Exact,
    pub modulus_hi: Exact,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointWeight {
    pub values: Vec<WeightValue>,
}

/// Per-generator summary over a block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockGenerator {
    pub name: String,
    /// Squarefree part of the characteristic polynomial of the restriction.
    pub min_poly: QPoly,
    pub modulus_lo: Exact,
    pub modulus_hi: Exact,
    pub modulus_is_one: ModulusIsOne,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct BlockModel {
    /// Squarefree characteristic polynomial of the separating element.
    r: QPoly,
    /// `P_i` with generator `i` ≡ `P_i(N)` modulo the radical.
    polys: Vec<QPoly>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightBlock {
    pub space: Subspace,
    pub generators: Vec<BlockGenerator>,
    pub weights: Vec<JointWeight>,
    #[serde(skip)]
    model: Option<BlockModel>,
}

/// Equality ignores the internal model, which is not serialized.
impl PartialEq for WeightBlock {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.generators == other.generators && self.weights == other.weights
    }
}

impl Eq for WeightBlock {}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightDecomposition {
    pub generators: Vec<String>,
    pub blocks: Vec<WeightBlock>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightsVerdict {
    pub mode: Mode,
    pub expansive: bool,
    /// First `(block, weight)` whose image is bounded, if any.
    pub failing: Option<(usize, usize)>,
}

/// Pairwise coprime pieces of `chi` that a primary decomposition may
/// separate without factoring over Q.
pub(crate) fn coprime_split(chi: &QPoly) -> Vec<QPoly> {
    let mut out = Vec::new();
    for (f, _) in chi.squarefree_decomposition() {
        let (s, f) = f.strip_zero_roots();
        if s > 0 {
            out.push(QPoly::from_i64(&[0, 1]));
        }
        if f.is_constant() {
            continue;
        }
        let (roots, f) = split_rational_roots(&f);
        out.extend(roots.iter().map(QPoly::linear_root));
        if f.is_constant() {
            continue;
        }
        let g = f.gcd(&f.reverse());
        let rest = f.exact_div(&g).expect("gcd divides");
        for piece in [g, rest] {
            if !piece.is_constant() {
                out.push(piece);
            }
        }
    }
    out
}

/// Positive divisors of `n`, or `None` when `n` is too large to factor by
/// trial division.
fn divisors(n: &BigInt) -> Option<Vec<u64>> {
    let n: u64 = n.abs().try_into().ok().filter(|v| *v <= 1_000_000_000_000)?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Some(small)
}

/// Rational roots of a squarefree `f` with `f(0) ≠ 0`, and the cofactor.
fn split_rational_roots(f: &QPoly) -> (Vec<Rational>, QPoly) {
    let ints = f.primitive_int();
    let (Some(ps), Some(qs)) = (divisors(&ints[0]), divisors(ints.last().unwrap())) else {
        return (Vec::new(), f.clone());
    };
    let mut roots = Vec::new();
    let mut rest = f.clone();
    for p in &ps {
        for q in &qs {
            for sign in [1i64, -1] {
                let x = Rational::new(BigInt::from(*p) * sign, BigInt::from(*q));
                if *x.denom() != BigInt::from(*q) || roots.contains(&x) {
                    continue;
                }
                if rest.degree() > 0 && rest.eval(&x).is_zero() {
                    rest = rest.exact_div(&QPoly::linear_root(&x)).expect("root divides");
                    roots.push(x);
                }
            }
        }
    }
    roots.sort();
    (roots, rest)
}

fn to_ambient(space: &Subspace, coords: &[QVector]) -> Vec<QVector> {
    coords
        .iter()
        .map(|c| {
            let mut v = vec![Rational::zero(); space.ambient_dim];
            for (ci, b) in c.iter().zip(&space.basis) {
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi += ci * bi;
                }
            }
            v
        })
        .collect()
}

/// Multiplication-by-`z` matrix on `Q[z]/(r)` for monic `r`.
fn companion(r: &QPoly) -> QMatrix {
    let s = r.degree();
    let mut c = QMatrix::zeros(s, s);
    for i in 0..s {
        if i + 1 < s {
            c.set(i + 1, i, Rational::one());
        }
        c.set(i, s - 1, -r.coeff(i));
    }
    c
}

fn mult_matrix(r: &QPoly, q: &QPoly) -> QMatrix {
    q.eval_matrix(&companion(r))
}

pub fn weight_decomposition(action: &SemigroupAction) -> Result<WeightDecomposition> {
    if let Some((a, b)) = action.noncommuting_pair() {
        return Err(Error::NotCommuting(a, b));
    }
    let n = action.dim();
    let gens = action.generator_matrices();
    let mut blocks = vec![Subspace::full(n)];
    for g in &gens {
        let mut next = Vec::new();
        for b in blocks {
            let t = g.restrict_to(&b.basis).expect("blocks are invariant");
            let chi = char_poly(&t)?;
            for piece in coprime_split(&chi) {
                let k = kernel(&piece.pow(t.rows()).eval_matrix(&t));
                next.push(Subspace::span(n, &to_ambient(&b, &k.basis)));
            }
        }
        blocks = next;
    }
    debug_assert_eq!(blocks.iter().map(Subspace::dim).sum::<usize>(), n);
    let names: Vec<String> = action.generators().iter().map(|g| g.name.clone()).collect();
    let mut out = Vec::new();
    for space in blocks {
        let restricted: Vec<QMatrix> = gens
            .iter()
            .map(|g| g.restrict_to(&space.basis).expect("invariant"))
            .collect();
        let model = block_model(&restricted)?;
        let mut per_gen: Vec<Vec<(ModulusClass, Rational, Rational)>> = Vec::new();
        for p in &model.polys {
            per_gen.push(classify(&model.r, p)?);
        }
        let s = model.r.degree();
        let weights = (0..s)
            .map(|j| JointWeight {
                values: names
                    .iter()
                    .zip(&per_gen)
                    .map(|(name, cls)| WeightValue {
                        generator: name.clone(),
                        class: cls[j].0,
                        modulus_lo: Exact(cls[j].1.clone()),
                        modulus_hi: Exact(cls[j].2.clone()),
                    })
                    .collect(),
            })
            .collect();
        let generators = names
            .iter()
            .zip(&restricted)
            .zip(&per_gen)
            .map(|((name, t), cls)| {
                let on = cls.iter().filter(|c| c.0 == ModulusClass::OnCircle).count();
                Ok(BlockGenerator {
                    name: name.clone(),
                    min_poly: char_poly(t)?.squarefree_part(),
                    modulus_lo: Exact(cls.iter().map(|c| c.1.clone()).min().unwrap()),
                    modulus_hi: Exact(cls.iter().map(|c| c.2.clone()).max().unwrap()),
                    modulus_is_one: if on == cls.len() {
                        ModulusIsOne::Yes
                    } else if on == 0 {
                        ModulusIsOne::No
                    } else {
                        ModulusIsOne::Mixed
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(WeightBlock {
            space,
            generators,
            weights,
            model: Some(model),
        });
    }
    Ok(WeightDecomposition {
        generators: names,
        blocks: out,
    })
}

/// Separating element, its squarefree characteristic polynomial and the
/// polynomials expressing each generator modulo the radical.
fn block_model(restricted: &[QMatrix]) -> Result<BlockModel> {
    let k = restricted[0].rows();
    let basis = algebra_basis(restricted, k);
    let d = basis.len();
    let mut gram = QMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            gram.set(i, j, (&basis[i] * &basis[j]).trace());
        }
    }
    let s = gram.rank();
    let radical: Vec<QVector> = kernel(&gram)
        .basis
        .iter()
        .map(|c| {
            let mut m = QMatrix::zeros(k, k);
            for (ci, b) in c.iter().zip(&basis) {
                m = &m + &b.scale(ci);
            }
            m.entries().to_vec()
        })
        .collect();
    let mut seed: u64 = 0x9e37_79b9;
    for attempt in 0..200 {
        let coeffs: Vec<i64> = if attempt < restricted.len() {
            (0..restricted.len()).map(|i| (i == attempt) as i64).collect()
        } else {
            (0..restricted.len())
                .map(|_| {
                    seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((seed >> 33) % 7) as i64 - 3
                })
                .collect()
        };
        let mut nmat = QMatrix::zeros(k, k);
        for (c, g) in coeffs.iter().zip(restricted) {
            nmat = &nmat + &g.scale(&Rational::from_integer(BigInt::from(*c)));
        }
        let r = char_poly(&nmat)?.squarefree_part();
        if r.degree() != s {
            continue;
        }
        let mut cols: Vec<QVector> = Vec::new();
        let mut p = QMatrix::identity(k);
        for _ in 0..s {
            cols.push(p.entries().to_vec());
            p = &p * &nmat;
        }
        cols.extend(radical.iter().cloned());
        let mut polys = Vec::new();
        for g in restricted {
            let x = solve_in_span(&cols, g.entries())
                .ok_or_else(|| Error::InvalidArgument("generator outside its weight algebra".into()))?;
            polys.push(QPoly::new(x[..s].to_vec()));
        }
        return Ok(BlockModel { r, polys });
    }
    Err(Error::CapExceeded("no separating element found".into()))
}

/// Root disks of `r` at a refinement level, indexed like the base isolation.
fn aligned_disks(r: &QPoly, base: &[RootDisk], bits: u32) -> Result<Vec<RootDisk>> {
    if bits == 0 {
        return Ok(base.to_vec());
    }
    let fine = refine_roots(r, bits)?;
    let mut out = Vec::with_capacity(base.len());
    for b in base {
        let hit = fine.iter().find(|f| {
            let gap = crate::roots::abs_upper(&(&f.center - &b.center));
            gap + &f.radius <= b.radius
        });
        match hit {
            Some(f) => out.push(f.clone()),
            None => return Err(Error::CapExceeded("refined root disks do not nest".into())),
        }
    }
    Ok(out)
}

/// Classifies `|q(μ)|` against one for every root `μ` of the squarefree
/// `r`, with rational modulus bounds. Disks that still touch the circle are
/// settled by matching their number against the exact count of roots of
/// modulus one of `Π_μ (z − q(μ))`.
fn classify(r: &QPoly, q: &QPoly) -> Result<Vec<(ModulusClass, Rational, Rational)>> {
    let s = r.degree();
    let r = r.monic();
    let q = q.div_rem(&r).1;
    if s == 1 {
        let m = q.eval(&-r.coeff(0)).abs();
        let class = match m.cmp(&Rational::one()) {
            std::cmp::Ordering::Less => ModulusClass::Inside,
            std::cmp::Ordering::Equal => ModulusClass::OnCircle,
            std::cmp::Ordering::Greater => ModulusClass::Outside,
        };
        return Ok(vec![(class, m.clone(), m)]);
    }
    let base = isolate_roots(&r)?;
    let resolvent = char_poly(&mult_matrix(&r, &q))?;
    let (_, nz) = resolvent.strip_zero_roots();
    let on = if nz.is_constant() { 0 } else { circle_root_count(&nz)? };
    let one = Rational::one();
    for bits in [0u32, 64, 256, 1024, 4096] {
        let disks = aligned_disks(&r, &base, bits)?;
        let mut out = Vec::with_capacity(s);
        let mut ambiguous = 0;
        for d in &disks {
            let v = eval_c(&q, &d.center);
            let rho = taylor_radius(&q, &d.center, &d.radius);
            let m2 = v.norm_sqr();
            let up = &one + &rho;
            let lo_val = {
                let l = sqrt_lower(&m2) - &rho;
                if l.is_negative() { Rational::zero() } else { l }
            };
            let hi_val = sqrt_upper(&m2) + &rho;
            let class = if m2 > &up * &up {
                Some(ModulusClass::Outside)
            } else if rho < one && m2 < (&one - &rho) * (&one - &rho) {
                Some(ModulusClass::Inside)
            } else {
                ambiguous += 1;
                None
            };
            out.push((class, lo_val, hi_val));
        }
        if ambiguous == on {
            return Ok(out
                .into_iter()
                .map(|(c, lo, hi)| match c {
                    Some(c) => (c, lo, hi),
                    None => (ModulusClass::OnCircle, one.clone(), one.clone()),
                })
                .collect());
        }
    }
    Err(Error::CapExceeded("modulus classification did not settle".into()))
}

pub fn expansive_by_weights(decomp: &WeightDecomposition, mode: Mode) -> WeightsVerdict {
    for (bi, b) in decomp.blocks.iter().enumerate() {
        for (wi, w) in b.weights.iter().enumerate() {
            let unbounded = match mode {
                Mode::Semigroup => w.values.iter().any(|v| v.class == ModulusClass::Outside),
                Mode::Group => w.values.iter().any(|v| v.class != ModulusClass::OnCircle),
            };
            if !unbounded {
                return WeightsVerdict {
                    mode,
                    expansive: false,
                    failing: Some((bi, wi)),
                };
            }
        }
    }
    WeightsVerdict {
        mode,
        expansive: true,
        failing: None,
    }
}

/// Classes of every joint weight (flattened over blocks) for the element
/// `Π g_i^{e_i}`.
fn word_classes(decomp: &WeightDecomposition, exps: &[i64]) -> Result<Vec<ModulusClass>> {
    let mut out = Vec::new();
    for b in &decomp.blocks {
        let model = b.model.as_ref().expect("decomposition carries its model");
        let r = model.r.monic();
        let s = r.degree();
        let mut m = QMatrix::identity(s);
        for (p, &e) in model.polys.iter().zip(exps) {
            if e == 0 {
                continue;
            }
            let mut f = mult_matrix(&r, &p.div_rem(&r).1);
            if e < 0 {
                f = f.inverse()?;
            }
            m = &m * &f.pow(e.unsigned_abs());
        }
        let q = QPoly::new(m.column(0));
        out.extend(classify(&r, &q)?.into_iter().map(|c| c.0));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Repair {
    /// Generator letter appended to `γ₀^m`.
    pub letter: String,
    pub m: u64,
    pub nonunit_before: usize,
    pub nonunit_after: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansiveElement {
    /// Letters of the word; the generators commute, so order is immaterial.
    pub word: Vec<String>,
    pub exponents: Vec<i64>,
    pub matrix: QMatrix,
    pub repairs: Vec<Repair>,
    pub verdict: SingleVerdict,
}

/// Builds an element with no eigenvalue of modulus one by greedy repair:
/// start from the generator that is non-unit on the most weights, and while
/// some weight has modulus one, replace `γ₀` by `γ₀^m γ₁` for a generator
/// `γ₁` that is non-unit there, doubling `m` until no earlier weight
/// returns to the circle. `None` when no such element exists or the word
/// would exceed `word_cap` letters.
pub fn find_expansive_element(
    action: &SemigroupAction,
    word_cap: usize,
) -> Result<Option<ExpansiveElement>> {
    if action.mode() != Mode::Group {
        return Err(Error::NotGroupMode);
    }
    let decomp = weight_decomposition(action)?;
    if !expansive_by_weights(&decomp, Mode::Group).expansive {
        return Ok(None);
    }
    let g = decomp.generators.len();
    let unit = |i: usize| -> Vec<i64> { (0..g).map(|j| (j == i) as i64).collect() };
    let nonunit = |c: &[ModulusClass]| c.iter().filter(|x| **x != ModulusClass::OnCircle).count();

    let mut best: Option<(Vec<i64>, Vec<ModulusClass>)> = None;
    for i in 0..g {
        let e = unit(i);
        let c = word_classes(&decomp, &e)?;
        if best.as_ref().is_none_or(|(_, bc)| nonunit(&c) > nonunit(bc)) {
            best = Some((e, c));
        }
    }
    let (mut e0, mut c0) = best.expect("at least one generator");
    let mut repairs = Vec::new();
    while let Some(missing) = c0.iter().position(|c| *c == ModulusClass::OnCircle) {
        let mut gamma1 = None;
        for i in 0..g {
            if word_classes(&decomp, &unit(i))?[missing] != ModulusClass::OnCircle {
                gamma1 = Some(i);
                break;
            }
        }
        let Some(i) = gamma1 else {
            return Ok(None);
        };
        let mut m: u64 = 1;
        loop {
            let cand: Vec<i64> = e0
                .iter()
                .zip(unit(i))
                .map(|(a, b)| a * m as i64 + b)
                .collect();
            if cand.iter().map(|x| x.unsigned_abs()).sum::<u64>() as usize > word_cap {
                return Ok(None);
            }
            let c = word_classes(&decomp, &cand)?;
            let keeps = c0
                .iter()
                .zip(&c)
                .all(|(before, after)| *before == ModulusClass::OnCircle || *after != ModulusClass::OnCircle);
            if keeps && c[missing] != ModulusClass::OnCircle {
                let before = nonunit(&c0);
                let after = nonunit(&c);
                assert!(after > before, "each repair gains a non-unit weight");
                repairs.push(Repair {
                    letter: decomp.generators[i].clone(),
                    m,
                    nonunit_before: before,
                    nonunit_after: after,
                });
                e0 = cand;
                c0 = c;
                break;
            }
            m *= 2;
            if m > 1 << 40 {
                return Ok(None);
            }
        }
    }
    let mut word = Vec::new();
    let mut matrix = QMatrix::identity(action.dim());
    for (gen, &e) in action.generators().iter().zip(&e0) {
        let name = if e < 0 { format!("{}^-1", gen.name) } else { gen.name.clone() };
        word.extend(std::iter::repeat_n(name, e.unsigned_abs() as usize));
        let base = if e < 0 { gen.matrix.inverse()? } else { gen.matrix.clone() };
        matrix = &matrix * &base.pow(e.unsigned_abs());
    }
    let verdict = single_expansive(&matrix, Mode::Group)?;
    if !verdict.expansive {
        return Ok(None);
    }
    Ok(Some(ExpansiveElement {
        word,
        exponents: e0,
        matrix,
        repairs,
        verdict,
    }))
}
