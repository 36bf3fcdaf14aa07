//! Finite observations of solenoid points and of `L(G)`: the map `E` on a
//! character set and the metrics `d_A`, `d*_A`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::rational::{serde_qvector, QVector, Rational};
use crate::solenoid::chain::format_character;
use crate::solenoid::dyadic::Approx;

/// A functional `p` on `Q^n`, `p(χ) = coords · χ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomVector {
    pub coords: Vec<Approx>,
    pub precision: u32,
}

impl HomVector {
    pub fn from_rationals(coords: &[Rational], precision: u32) -> Self {
        HomVector {
            coords: coords.iter().map(|x| Approx::from_rational(x, precision)).collect(),
            precision,
        }
    }

    pub fn zero(n: usize, precision: u32) -> Self {
        HomVector {
            coords: vec![Approx::zero(); n],
            precision,
        }
    }

    pub fn eval(&self, chi: &[Rational]) -> Approx {
        self.coords
            .iter()
            .zip(chi)
            .fold(Approx::zero(), |acc, (c, x)| acc.add(&c.mul_rational(x, self.precision)))
    }

    pub fn add(&self, other: &HomVector) -> HomVector {
        HomVector {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.add(b)).collect(),
            precision: self.precision.min(other.precision),
        }
    }

    /// `p ∘ ρ̂(γ)`, the induced action on `L(G)`, for `ρ̂(γ) = m`.
    pub fn pull(&self, m: &QMatrix) -> HomVector {
        let n = self.coords.len();
        let coords = (0..n)
            .map(|j| {
                (0..n).fold(Approx::zero(), |acc, i| {
                    acc.add(&self.coords[i].mul_rational(m.get(i, j), self.precision))
                })
            })
            .collect();
        HomVector {
            coords,
            precision: self.precision,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowEntry {
    #[serde(with = "serde_qvector")]
    pub character: QVector,
    /// Angle in `[0, 1)`, in turns.
    pub angle: Approx,
}

/// Values `χ(g)` of one solenoid point on finitely many characters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolenoidWindow {
    pub entries: Vec<WindowEntry>,
    #[serde(skip)]
    index: HashMap<QVector, usize>,
}

impl PartialEq for SolenoidWindow {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl Eq for SolenoidWindow {}

impl SolenoidWindow {
    pub fn new(entries: Vec<WindowEntry>) -> Self {
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.character.clone(), i))
            .collect();
        SolenoidWindow { entries, index }
    }

    /// Rebuilds the lookup table after deserialization.
    pub fn reindexed(self) -> Self {
        SolenoidWindow::new(self.entries)
    }

    pub fn get(&self, chi: &[Rational]) -> Result<&Approx> {
        if self.index.len() != self.entries.len() {
            return self
                .entries
                .iter()
                .find(|e| e.character == chi)
                .map(|e| &e.angle)
                .ok_or_else(|| Error::MissingCharacter(format_character(chi)));
        }
        self.index
            .get(chi)
            .map(|&i| &self.entries[i].angle)
            .ok_or_else(|| Error::MissingCharacter(format_character(chi)))
    }

    /// Pointwise sum of angles mod 1 on the characters of `self`.
    pub fn combine(&self, other: &SolenoidWindow) -> Result<SolenoidWindow> {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                Ok(WindowEntry {
                    character: e.character.clone(),
                    angle: e.angle.add(other.get(&e.character)?).frac(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SolenoidWindow::new(entries))
    }

    /// The window of `ρ(γ) g`, read on `chars`, where `ρ̂(γ) = m`:
    /// `χ(ρ(γ) g) = (m χ)(g)`.
    pub fn pullback(&self, m: &QMatrix, chars: &[QVector]) -> Result<SolenoidWindow> {
        let entries = chars
            .iter()
            .map(|c| {
                Ok(WindowEntry {
                    character: c.clone(),
                    angle: self.get(&m.mul_vec(c))?.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SolenoidWindow::new(entries))
    }
}

/// `E(p)` observed on `chars`: each angle is `p(χ) mod 1`.
pub fn e_window(p: &HomVector, chars: &[QVector]) -> SolenoidWindow {
    SolenoidWindow::new(
        chars
            .iter()
            .map(|c| WindowEntry {
                character: c.clone(),
                angle: p.eval(c).frac(),
            })
            .collect(),
    )
}

/// `d_A(x, y) = sup_{χ ∈ A} δ(χ(y) − χ(x))`.
pub fn window_distance(x: &SolenoidWindow, y: &SolenoidWindow, chars: &[QVector]) -> Result<Approx> {
    let mut out = Approx::zero();
    for c in chars {
        let d = y.get(c)?.sub(x.get(c)?).circle_abs();
        out = out.max(&d);
    }
    Ok(out)
}

/// `d*_A(p, q) = sup_{χ ∈ A} |p(χ) − q(χ)|`.
pub fn hom_distance(p: &HomVector, q: &HomVector, chars: &[QVector]) -> Approx {
    chars
        .iter()
        .fold(Approx::zero(), |acc, c| acc.max(&p.eval(c).sub(&q.eval(c)).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};
    use crate::solenoid::dyadic::DEFAULT_PRECISION;

    fn chars(js: &[i64]) -> Vec<QVector> {
        js.iter().map(|&j| vec![rat(j)]).collect()
    }

    #[test]
    fn window_values() {
        let p = HomVector::from_rationals(&[ratio(1, 10)], DEFAULT_PRECISION);
        let w = e_window(&p, &chars(&[1, 2, 4]));
        for (e, want) in w.entries.iter().zip([ratio(1, 10), ratio(1, 5), ratio(2, 5)]) {
            assert!(e.angle.contains(&want));
        }
        let z = e_window(&HomVector::zero(1, DEFAULT_PRECISION), &chars(&[1, 3]));
        assert!(z.entries.iter().all(|e| e.angle == Approx::zero()));
        let p = HomVector::from_rationals(&[ratio(1, 1000)], DEFAULT_PRECISION);
        assert!(e_window(&p, &chars(&[32])).entries[0].angle.contains(&ratio(32, 1000)));
    }

    #[test]
    fn metrics() {
        let a = chars(&[1, 2, 4, 8]);
        let t = ratio(1, 100);
        let p = HomVector::from_rationals(&[t.clone()], DEFAULT_PRECISION);
        let zero = HomVector::zero(1, DEFAULT_PRECISION);
        assert!(hom_distance(&zero, &p, &a).contains(&(t * rat(8))));
        let g = e_window(&p, &a);
        let d = window_distance(&g, &g, &a).unwrap();
        assert!(d.contains(&rat(0)) && d.hi() < ratio(1, 1 << 50));
        let missing = window_distance(&g, &g, &chars(&[16]));
        assert!(matches!(missing, Err(Error::MissingCharacter(_))));
    }

    #[test]
    fn delta_of_angles() {
        assert_eq!(Approx::exact(ratio(2, 5)).circle_abs().mid, ratio(2, 5));
        assert_eq!(Approx::exact(ratio(3, 4)).circle_abs().mid, ratio(1, 4));
    }
}
