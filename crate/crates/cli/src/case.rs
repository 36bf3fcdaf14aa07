//! Case files: `{ "id", "kind", "payload", "options" }`.

use anyhow::{anyhow, bail, Context, Result};
use serde_json::Value;
use sha2::{Digest, Sha256};

use expansive_core::rational::{parse_rational, value_to_qvector, value_to_rational};
use expansive_core::solenoid::DualModuleAction;
use expansive_core::{Mode, QMatrix, Rational, SemigroupAction};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Matrix,
    Semigroup,
    Torus,
    Solenoid,
}

impl Kind {
    fn parse(s: &str) -> Result<Kind> {
        Ok(match s {
            "matrix" => Kind::Matrix,
            "semigroup" => Kind::Semigroup,
            "torus" => Kind::Torus,
            "solenoid" => Kind::Solenoid,
            other => bail!("kind: unknown case kind {other:?}"),
        })
    }
}

/// Options a case file may carry; command-line flags take precedence.
#[derive(Clone, Debug, Default)]
pub struct CaseOptions {
    pub mode: Option<Mode>,
    pub depth: Option<usize>,
    pub radius: Option<Rational>,
    pub epsilon: Option<Rational>,
    pub k_max: Option<u64>,
    pub precision: Option<u32>,
}

#[derive(Clone, Debug)]
pub struct CaseFile {
    pub id: String,
    pub kind: Kind,
    pub payload: Value,
    pub options: CaseOptions,
    /// Hex SHA-256 of the compact serialization of the whole file.
    pub hash: String,
}

pub fn hash_value(v: &Value) -> String {
    let bytes = serde_json::to_vec(v).expect("JSON values serialize");
    hex::encode(Sha256::digest(&bytes))
}

fn opt_u64(opts: &Value, key: &str) -> Result<Option<u64>> {
    match opts.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v
            .as_u64()
            .map(Some)
            .ok_or_else(|| anyhow!("options.{key}: expected a nonnegative integer")),
    }
}

fn opt_rational(opts: &Value, key: &str) -> Result<Option<Rational>> {
    match opts.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => value_to_rational(v)
            .map(Some)
            .map_err(|e| anyhow!("options.{key}: {e}")),
    }
}

impl CaseFile {
    pub fn parse(text: &str) -> Result<CaseFile> {
        let raw: Value = serde_json::from_str(text).map_err(|e| anyhow!("line {}, column {}: {e}", e.line(), e.column()))?;
        let kind = raw
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| anyhow!("kind: missing or not a string"))?;
        let kind = Kind::parse(kind)?;
        let payload = raw.get("payload").cloned().ok_or_else(|| anyhow!("payload: missing"))?;
        let id = raw.get("id").and_then(Value::as_str).unwrap_or("").to_string();
        let opts = raw.get("options").cloned().unwrap_or(Value::Null);
        let mode = match opts.get("mode").and_then(Value::as_str) {
            Some(m) => Some(m.parse::<Mode>().map_err(|e| anyhow!("options.mode: {e}"))?),
            None => None,
        };
        let options = CaseOptions {
            mode,
            depth: opt_u64(&opts, "depth")?.map(|d| d as usize),
            radius: opt_rational(&opts, "radius")?,
            epsilon: opt_rational(&opts, "epsilon")?,
            k_max: opt_u64(&opts, "k_max")?,
            precision: opt_u64(&opts, "precision")?.map(|p| p as u32),
        };
        Ok(CaseFile {
            id,
            kind,
            payload,
            options,
            hash: hash_value(&raw),
        })
    }

    pub fn read(path: &std::path::Path) -> Result<CaseFile> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        CaseFile::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Mode written in the payload, if any.
    pub fn payload_mode(&self) -> Result<Option<Mode>> {
        match self.payload.get("mode").and_then(Value::as_str) {
            Some(m) => Ok(Some(m.parse().map_err(|e| anyhow!("payload.mode: {e}"))?)),
            None => Ok(None),
        }
    }

    /// A matrix case as a one-generator action `g`, or a semigroup/torus
    /// case as its named generators.
    pub fn action(&self, mode: Mode) -> Result<SemigroupAction> {
        match self.kind {
            Kind::Matrix => {
                let m = self
                    .payload
                    .get("matrix")
                    .ok_or_else(|| anyhow!("payload.matrix: missing"))?;
                let m = QMatrix::from_json(m).map_err(|e| anyhow!("payload.matrix: {e}"))?;
                Ok(SemigroupAction::single(m, mode)?)
            }
            Kind::Semigroup | Kind::Torus => {
                let g = self
                    .payload
                    .get("generators")
                    .ok_or_else(|| anyhow!("payload.generators: missing"))?;
                Ok(SemigroupAction::from_json(g, mode)?)
            }
            Kind::Solenoid => bail!("kind: a solenoid case has no linear action on its own; use the solenoid commands"),
        }
    }

    pub fn matrix(&self) -> Result<QMatrix> {
        match self.kind {
            Kind::Matrix => {
                let m = self
                    .payload
                    .get("matrix")
                    .ok_or_else(|| anyhow!("payload.matrix: missing"))?;
                QMatrix::from_json(m).map_err(|e| anyhow!("payload.matrix: {e}"))
            }
            _ => {
                let a = self.action(Mode::Semigroup)?;
                match a.generators() {
                    [g] => Ok(g.matrix.clone()),
                    _ => bail!("payload.generators: expected exactly one matrix"),
                }
            }
        }
    }

    pub fn module(&self, mode: Option<Mode>) -> Result<DualModuleAction> {
        if self.kind != Kind::Solenoid {
            bail!("kind: expected a solenoid case");
        }
        Ok(DualModuleAction::from_json(&self.payload, mode)?)
    }

    /// The functional `p` to push through `E` for a lift, from the payload.
    pub fn lift_point(&self) -> Result<Option<Vec<Rational>>> {
        match self.payload.get("p") {
            None => Ok(None),
            Some(v) => Ok(Some(value_to_qvector(v).map_err(|e| anyhow!("payload.p: {e}"))?)),
        }
    }
}

/// Comma-separated rationals, as given on the command line.
pub fn parse_point(s: &str) -> Result<Vec<Rational>> {
    s.split(',')
        .map(|t| parse_rational(t).map_err(|e| anyhow!("--point: {e}")))
        .collect()
}
