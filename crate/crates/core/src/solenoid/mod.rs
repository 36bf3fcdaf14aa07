//! Solenoids presented through their duals: finitely generated
//! `Z[Γ]`-submodules `H` of `Q^n` with `Γ` acting by rational matrices.

pub mod chain;
pub mod dyadic;
pub mod lift;
pub mod window;

use serde::{Deserialize, Serialize};

use crate::action::SemigroupAction;
use crate::error::Result;
use crate::orbits::{expansiveness_check, ExpansivenessVerdict};
use crate::subspace::Subspace;

pub use chain::{enumerate_basis, module_span, regular_chain, DualModuleAction, Relation, RhoBasisChain};
pub use dyadic::{Approx, DEFAULT_PRECISION};
pub use lift::{lift, lift_from_base, verify_lift, LiftResult};
pub use window::{e_window, hom_distance, window_distance, HomVector, SolenoidWindow};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolenoidVerdict {
    /// `H` is given by module generators, so it is finitely generated.
    pub finitely_generated: bool,
    /// Rational span of `H`; `L(G)` is its real dual.
    pub span: Subspace,
    /// Transposes of the restrictions to `span`, acting on `L(G)` in the
    /// coordinates dual to `span.basis`.
    pub adjoint: serde_json::Value,
    pub verdict: ExpansivenessVerdict,
}

/// The adjoint action on `L(G)`: restrictions of the generators to the
/// span of `H`, transposed.
pub fn adjoint_action(dm: &DualModuleAction) -> Result<(Subspace, SemigroupAction)> {
    let span = module_span(dm);
    let gens = dm
        .action
        .generators()
        .iter()
        .map(|g| {
            let r = g
                .matrix
                .restrict_to(&span.basis)
                .expect("the span of an invariant module is invariant");
            (g.name.clone(), r.transpose())
        })
        .collect();
    Ok((span, SemigroupAction::new(gens, dm.mode())?))
}

/// Expansive iff every nonzero vector of `L(G)` has an unbounded orbit under
/// the adjoint action (`H` being finitely generated by presentation).
pub fn solenoid_expansive(dm: &DualModuleAction, depth: usize) -> Result<SolenoidVerdict> {
    let (span, adjoint) = adjoint_action(dm)?;
    let verdict = expansiveness_check(&adjoint, depth)?;
    Ok(SolenoidVerdict {
        finitely_generated: true,
        span,
        adjoint: adjoint.to_json(),
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::Mode;
    use crate::matrix::QMatrix;
    use crate::orbits::Status;
    use crate::rational::{int_vec, rat};

    #[test]
    fn verdicts_on_fixtures() {
        let dy = DualModuleAction::new(vec![vec![rat(1)]], vec![("x2".into(), QMatrix::diag(&[rat(2)]))], Mode::Group)
            .unwrap();
        assert_eq!(solenoid_expansive(&dy, 10).unwrap().verdict.status, Status::Expansive);
        let id = DualModuleAction::new(vec![vec![rat(1)]], vec![("id".into(), QMatrix::identity(1))], Mode::Group)
            .unwrap();
        let v = solenoid_expansive(&id, 10).unwrap().verdict;
        assert_eq!(v.status, Status::NotExpansive);
        assert_eq!(v.witness, Some(vec![rat(1)]));
        let cat = DualModuleAction::new(
            vec![int_vec(&[1, 0]), int_vec(&[0, 1])],
            vec![("cat".into(), QMatrix::from_i64(&[&[2, 1], &[1, 1]]))],
            Mode::Group,
        )
        .unwrap();
        assert_eq!(solenoid_expansive(&cat, 10).unwrap().verdict.status, Status::Expansive);
    }
}
