//! Lifting a window near the identity to `L(G)` along a k-regular chain.
//!
//! On the first level the angles are unwrapped into `(−1/2, 1/2]` on a
//! rational basis and extended linearly. Each later character `a0` with
//! relation `n0·a0 = Σ n_j a_j` has `n0·α − Σ n_j p(a_j)` an integer of
//! modulus below `k·C < 1`, hence zero, which forces `p(a0) = α`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{serde_qvector, Exact, QVector, Rational};
use crate::solenoid::chain::{base_coordinates, format_character, RhoBasisChain};
use crate::solenoid::dyadic::Approx;
use crate::solenoid::window::SolenoidWindow;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftValue {
    #[serde(with = "serde_qvector")]
    pub character: QVector,
    pub value: Approx,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftResult {
    pub values: Vec<LiftValue>,
    /// Radius the first-level angles had to respect.
    pub epsilon: Exact,
    pub bound: Exact,
    /// `n0·α − Σ n_j p(a_j)` for every relation, each enclosing only zero.
    pub residuals: Vec<Approx>,
}

impl LiftResult {
    pub fn value(&self, chi: &[Rational]) -> Option<&Approx> {
        self.values.iter().find(|v| v.character == chi).map(|v| &v.value)
    }
}

/// `ε = min(C, 1/(2κ))` with `κ ≥ 1` the largest coefficient 1-norm of a
/// first-level character over the chosen rational basis.
pub fn base_radius(chain: &RhoBasisChain, c: &Rational) -> Rational {
    let first = chain.levels.first().map(Vec::as_slice).unwrap_or(&[]);
    let (_, coords) = base_coordinates(first);
    let kappa = coords
        .iter()
        .map(|x| x.iter().fold(Rational::zero(), |acc, c| acc + c.abs()))
        .fold(Rational::one(), |a, b| a.max(b));
    let eps = Rational::one() / (Rational::from_integer(BigInt::from(2)) * kappa);
    eps.min(c.clone())
}

/// Certifies `|x| < bound`, distinguishing a definite violation from an
/// interval too wide to decide.
fn check_below(x: &Approx, bound: &Rational, what: &[Rational]) -> Result<()> {
    let a = x.abs();
    if a.hi() < *bound {
        return Ok(());
    }
    let msg = format!("|p{}| ≈ {} against bound {}", format_character(what), x.to_f64(), crate::rational::to_f64(bound));
    if a.lo() >= *bound {
        Err(Error::LiftOutOfRange(msg))
    } else {
        Err(Error::PrecisionExhausted(msg))
    }
}

/// Lifts `g` to values `p(χ)` with `|p(χ)| < C` on every chain character.
/// `precision` bounds the rounding of first-level rational combinations.
pub fn lift(g: &SolenoidWindow, chain: &RhoBasisChain, c: &Rational, precision: u32) -> Result<LiftResult> {
    check_bound(chain, c)?;
    let eps = base_radius(chain, c);
    let first = chain.levels.first().ok_or_else(|| Error::InvalidArgument("empty chain".into()))?;
    let (basis, _) = base_coordinates(first);
    let mut base = Vec::with_capacity(basis.len());
    for &i in &basis {
        let a = g.get(&first[i])?.unwrap_centered();
        check_below(&a, &eps, &first[i])?;
        base.push(a);
    }
    lift_from_base(g, chain, c, &base, precision)
}

fn check_bound(chain: &RhoBasisChain, c: &Rational) -> Result<()> {
    if !c.is_positive() || c * Rational::from_integer(BigInt::from(chain.k.max(1))) >= Rational::one() {
        return Err(Error::InvalidArgument(format!(
            "bound must satisfy 0 < C < 1/k with k = {}",
            chain.k
        )));
    }
    Ok(())
}

/// The induction of [`lift`] from prescribed values on the first-level
/// basis (in the order chosen by `base_coordinates`).
pub fn lift_from_base(
    g: &SolenoidWindow,
    chain: &RhoBasisChain,
    c: &Rational,
    base: &[Approx],
    precision: u32,
) -> Result<LiftResult> {
    check_bound(chain, c)?;
    let eps = base_radius(chain, c);
    let first = chain.levels.first().ok_or_else(|| Error::InvalidArgument("empty chain".into()))?;
    let (basis, coords) = base_coordinates(first);
    if base.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            found: base.len(),
        });
    }
    let mut values: HashMap<QVector, Approx> = HashMap::new();
    let mut order: Vec<QVector> = Vec::new();
    for (a, x) in first.iter().zip(&coords) {
        let p = x
            .iter()
            .zip(base)
            .fold(Approx::zero(), |acc, (xi, b)| acc.add(&b.mul_rational(xi, precision)));
        // The window must agree with p modulo 1 on every first-level character.
        let gap = g.get(a)?.sub(&p);
        match gap.integers().len() {
            1 => {}
            0 => {
                return Err(Error::LiftOutOfRange(format!(
                    "window is not E of a small vector at {}",
                    format_character(a)
                )))
            }
            _ => return Err(Error::PrecisionExhausted(format!("ambiguous angle at {}", format_character(a)))),
        }
        check_below(&p, c, a)?;
        values.insert(a.clone(), p);
        order.push(a.clone());
    }
    let mut residuals = Vec::new();
    for rels in &chain.relations {
        for r in rels {
            let alpha = g.get(&r.target)?.unwrap_centered();
            let mut s = Approx::zero();
            for t in &r.terms {
                let v = values
                    .get(&t.character)
                    .ok_or_else(|| Error::MissingCharacter(format_character(&t.character)))?;
                s = s.add(&v.mul_int(&t.coef));
            }
            let x = alpha.mul_int(&r.n0).sub(&s);
            let ints = x.integers();
            match ints.as_slice() {
                [k] if k.is_zero() => {}
                [k] => {
                    return Err(Error::LiftOutOfRange(format!(
                        "relation for {} forces the integer {k}",
                        format_character(&r.target)
                    )))
                }
                _ => {
                    return Err(Error::PrecisionExhausted(format!(
                        "rounding for {} is ambiguous",
                        format_character(&r.target)
                    )))
                }
            }
            check_below(&alpha, c, &r.target)?;
            residuals.push(x);
            values.insert(r.target.clone(), alpha);
            order.push(r.target.clone());
        }
    }
    Ok(LiftResult {
        values: order
            .into_iter()
            .map(|ch| {
                let value = values.remove(&ch).expect("each character valued once");
                LiftValue { character: ch, value }
            })
            .collect(),
        epsilon: Exact(eps),
        bound: Exact(c.clone()),
        residuals,
    })
}

/// Re-checks a lift against its window and chain: every residual relation
/// encloses zero, values stay below the bound, and angles match mod 1.
pub fn verify_lift(g: &SolenoidWindow, chain: &RhoBasisChain, lift: &LiftResult) -> bool {
    let values: HashMap<&QVector, &Approx> = lift.values.iter().map(|v| (&v.character, &v.value)).collect();
    for v in &lift.values {
        if v.value.abs().hi() >= lift.bound.0 {
            return false;
        }
        let Ok(angle) = g.get(&v.character) else {
            return false;
        };
        if angle.sub(&v.value).integers().is_empty() {
            return false;
        }
    }
    for r in chain.relations.iter().flatten() {
        let Some(p0) = values.get(&r.target) else {
            return false;
        };
        let mut x = p0.mul_int(&r.n0);
        for t in &r.terms {
            let Some(v) = values.get(&t.character) else {
                return false;
            };
            x = x.sub(&v.mul_int(&t.coef));
        }
        if !x.contains(&Rational::zero()) {
            return false;
        }
    }
    lift.values.len() == chain.characters().len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::Mode;
    use crate::matrix::QMatrix;
    use crate::rational::{rat, ratio};
    use crate::solenoid::chain::{enumerate_basis, regular_chain, DualModuleAction};
    use crate::solenoid::dyadic::DEFAULT_PRECISION;
    use crate::solenoid::window::{e_window, HomVector};

    fn dyadic_chain(depth: usize) -> RhoBasisChain {
        let dm = DualModuleAction::new(vec![vec![rat(1)]], vec![("x2".into(), QMatrix::diag(&[rat(2)]))], Mode::Group)
            .unwrap();
        regular_chain(&enumerate_basis(&dm, depth), 10).unwrap()
    }

    #[test]
    fn roundtrip_small_vector() {
        let chain = dyadic_chain(5);
        let t = ratio(1, 1000);
        let p = HomVector::from_rationals(&[t.clone()], DEFAULT_PRECISION);
        let g = e_window(&p, chain.characters());
        let l = lift(&g, &chain, &ratio(3, 10), DEFAULT_PRECISION).unwrap();
        for v in &l.values {
            assert!(v.value.contains(&(&t * &v.character[0])));
            assert!(v.value.rad <= ratio(1, 1 << 40));
        }
        assert!(verify_lift(&g, &chain, &l));
    }

    #[test]
    fn identity_lifts_to_zero() {
        let chain = dyadic_chain(4);
        let g = e_window(&HomVector::zero(1, DEFAULT_PRECISION), chain.characters());
        let l = lift(&g, &chain, &ratio(1, 4), DEFAULT_PRECISION).unwrap();
        assert!(l.values.iter().all(|v| v.value == Approx::zero()));
    }

    #[test]
    fn large_vector_is_out_of_range() {
        let chain = dyadic_chain(5);
        let p = HomVector::from_rationals(&[ratio(2, 100)], DEFAULT_PRECISION);
        let g = e_window(&p, chain.characters());
        assert!(matches!(lift(&g, &chain, &ratio(3, 10), DEFAULT_PRECISION), Err(Error::LiftOutOfRange(_))));
    }

    #[test]
    fn bound_must_be_below_one_over_k() {
        let chain = dyadic_chain(3);
        let g = e_window(&HomVector::zero(1, DEFAULT_PRECISION), chain.characters());
        assert!(matches!(lift(&g, &chain, &ratio(1, 3), DEFAULT_PRECISION), Err(Error::InvalidArgument(_))));
    }
}
