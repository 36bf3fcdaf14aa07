//! Finitely generated linear actions and words in their generators.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::QMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Forward words only.
    Semigroup,
    /// Generators are invertible and inverses may appear in words.
    Group,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Semigroup => "semigroup",
            Mode::Group => "group",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "semigroup" => Ok(Mode::Semigroup),
            "group" => Ok(Mode::Group),
            other => Err(Error::parse("mode", format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub matrix: QMatrix,
}

/// A finite generating set acting on `Q^dim`. In group mode the exact
/// inverses are adjoined as extra generators named `name^-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemigroupAction {
    dim: usize,
    mode: Mode,
    generators: Vec<Generator>,
    letters: Vec<Generator>,
}

impl SemigroupAction {
    pub fn new(generators: Vec<(String, QMatrix)>, mode: Mode) -> Result<Self> {
        let Some((_, first)) = generators.first() else {
            return Err(Error::InvalidArgument("at least one generator is required".into()));
        };
        let dim = first.dim()?;
        let mut gens = Vec::with_capacity(generators.len());
        for (name, m) in generators {
            let d = m.dim()?;
            if d != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: d,
                });
            }
            if gens.iter().any(|g: &Generator| g.name == name) {
                return Err(Error::InvalidArgument(format!("duplicate generator name {name}")));
            }
            gens.push(Generator { name, matrix: m });
        }
        let mut letters = gens.clone();
        if mode == Mode::Group {
            for g in &gens {
                letters.push(Generator {
                    name: format!("{}^-1", g.name),
                    matrix: g.matrix.inverse()?,
                });
            }
        }
        Ok(SemigroupAction {
            dim,
            mode,
            generators: gens,
            letters,
        })
    }

    /// Single-generator action named `g`.
    pub fn single(m: QMatrix, mode: Mode) -> Result<Self> {
        Self::new(vec![("g".to_string(), m)], mode)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator_matrices(&self) -> Vec<QMatrix> {
        self.generators.iter().map(|g| g.matrix.clone()).collect()
    }

    /// Generators plus, in group mode, their inverses.
    pub fn letters(&self) -> &[Generator] {
        &self.letters
    }

    pub fn letter_matrices(&self) -> Vec<QMatrix> {
        self.letters.iter().map(|g| g.matrix.clone()).collect()
    }

    pub fn with_mode(&self, mode: Mode) -> Result<Self> {
        Self::new(
            self.generators
                .iter()
                .map(|g| (g.name.clone(), g.matrix.clone()))
                .collect(),
            mode,
        )
    }

    /// The same generators conjugated or restricted by `f`.
    pub fn map_generators(&self, f: impl Fn(&QMatrix) -> QMatrix) -> Result<Self> {
        Self::new(
            self.generators
                .iter()
                .map(|g| (g.name.clone(), f(&g.matrix)))
                .collect(),
            self.mode,
        )
    }

    pub fn letter_index(&self, name: &str) -> Option<usize> {
        self.letters.iter().position(|g| g.name == name)
    }

    /// Matrix of a word given as letter indices in application order:
    /// `word[0]` acts first.
    pub fn word_matrix(&self, word: &[usize]) -> QMatrix {
        let mut m = QMatrix::identity(self.dim);
        for &i in word {
            m = &self.letters[i].matrix * &m;
        }
        m
    }

    pub fn word_names(&self, word: &[usize]) -> Vec<String> {
        word.iter().map(|&i| self.letters[i].name.clone()).collect()
    }

    pub fn parse_word(&self, names: &[String]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| {
                self.letter_index(n)
                    .ok_or_else(|| Error::parse("word", format!("unknown generator {n:?}")))
            })
            .collect()
    }

    /// Matrix of a word given by letter names.
    pub fn named_word_matrix(&self, names: &[String]) -> Result<QMatrix> {
        Ok(self.word_matrix(&self.parse_word(names)?))
    }

    pub fn is_integer(&self) -> bool {
        self.generators.iter().all(|g| g.matrix.is_integer())
    }

    /// First pair of generators that fail to commute.
    pub fn noncommuting_pair(&self) -> Option<(String, String)> {
        for (i, a) in self.generators.iter().enumerate() {
            for b in &self.generators[i + 1..] {
                if &a.matrix * &b.matrix != &b.matrix * &a.matrix {
                    return Some((a.name.clone(), b.name.clone()));
                }
            }
        }
        None
    }

    /// Parses `{name: [[rationals]]}`, keeping the key order.
    pub fn from_json(v: &serde_json::Value, mode: Mode) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::parse("generators", "expected an object of named matrices"))?;
        let mut gens = Vec::new();
        for (name, m) in obj {
            let m = QMatrix::from_json(m).map_err(|e| match e {
                Error::Parse { message, .. } => Error::parse(format!("generators.{name}"), message),
                other => other,
            })?;
            gens.push((name.clone(), m));
        }
        Self::new(gens, mode)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for g in &self.generators {
            map.insert(g.name.clone(), serde_json::to_value(&g.matrix).unwrap());
        }
        serde_json::Value::Object(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_mode_adjoins_inverses() {
        let cat = QMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let a = SemigroupAction::single(cat.clone(), Mode::Group).unwrap();
        assert_eq!(a.letters().len(), 2);
        assert_eq!(a.letters()[1].name, "g^-1");
        assert_eq!(a.word_matrix(&[0, 1]), QMatrix::identity(2));
        let sing = QMatrix::from_i64(&[&[1, 0], &[0, 0]]);
        assert_eq!(
            SemigroupAction::single(sing, Mode::Group),
            Err(Error::NotInvertible)
        );
    }

    #[test]
    fn word_order_is_application_order() {
        let a = QMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let b = QMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        let act = SemigroupAction::new(
            vec![("a".into(), a.clone()), ("b".into(), b.clone())],
            Mode::Semigroup,
        )
        .unwrap();
        assert_eq!(act.word_matrix(&[0, 1]), &b * &a);
        assert_eq!(act.noncommuting_pair(), Some(("a".into(), "b".into())));
    }
}
