//! Orbit growth: probing, joint spectral radius bounds, and the three-valued
//! expansiveness engine for linear actions.

pub mod certificate;
pub mod engine;
pub mod estimate;
pub mod jsr;
pub mod simulate;

use serde::{Deserialize, Serialize};

use crate::rational::QVector;
use crate::subspace::Subspace;
use crate::weights::{JointWeight, WeightDecomposition};

pub use certificate::{find_certificate, verify_certificate, BoundednessCertificate};
pub use engine::{
    bounded_part_poly, chain_end, escape_chain, expansiveness_check, expansiveness_check_with,
    verify_chain, verify_verdict, CheckOptions,
};
pub use estimate::{bounded_subspace_estimate, SubspaceEstimate};
pub use jsr::{jsr_bounds, JsrBounds};
pub use simulate::{drive_along_chain, orbit_simulate, OrbitProbe};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Expansive,
    NotExpansive,
    Unknown,
}

impl Status {
    pub fn is_decisive(self) -> bool {
        self != Status::Unknown
    }
}

/// One shrinking step of the escape chain. `before` is an invariant
/// subspace containing every bounded orbit; the word's own bounded part
/// within it is contained in `superset`, and `after` is the largest
/// invariant subspace of `superset`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub word: Vec<String>,
    pub before: Subspace,
    pub superset: Subspace,
    pub after: Subspace,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeEvidence {
    pub steps: Vec<ChainStep>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub jsr: Option<JsrBounds>,
    /// Weight decomposition of the commuting action on the last superset,
    /// when the chain alone did not reach zero.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weights: Option<WeightEvidence>,
}

/// Weights of the action restricted to `subspace`; block spaces are in
/// coordinates relative to the basis of `subspace`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightEvidence {
    pub subspace: Subspace,
    pub decomposition: WeightDecomposition,
}

/// A joint weight of a commuting action at which every generator is
/// bounded, so the real span of its joint eigenvectors has bounded orbits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightObstruction {
    pub weights: WeightEvidence,
    pub block: usize,
    pub weight: JointWeight,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundedWitness {
    pub subspace: Subspace,
    pub certificate: BoundednessCertificate,
    /// Floating-point bound on the orbit norm of the witness vector.
    pub norm_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansivenessVerdict {
    pub status: Status,
    #[serde(
        with = "crate::rational::serde_opt_qvector",
        skip_serializing_if = "Option::is_none",
        default
    )]
    pub witness: Option<QVector>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub evidence: Option<EscapeEvidence>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bounded: Option<BoundedWitness>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub obstruction: Option<WeightObstruction>,
    pub search_depth: usize,
    pub words_examined: usize,
}
