//! `verify REPORT CASE`: re-checks exact certificates without searching.

use std::path::Path;

use anyhow::{anyhow, bail, Result};
use serde_json::Value;

use expansive_core::matrix::algebra_basis;
use expansive_core::orbits::{verify_verdict, JsrBounds};
use expansive_core::numeric::spectral_radius;
use expansive_core::solenoid::{
    adjoint_action, e_window, enumerate_basis, verify_lift, HomVector, LiftResult, RhoBasisChain, SolenoidVerdict,
    SolenoidWindow,
};
use expansive_core::torus::{infinite_order, Irreducibility, TorusRoute, TorusVerdict};
use expansive_core::weights::{expansive_by_weights, weight_decomposition, ExpansiveElement, WeightsVerdict};
use expansive_core::{single_expansive, DiskProfile, ExpansivenessVerdict, Mode, QMatrix, SemigroupAction};

use crate::case::CaseFile;
use crate::commands::{lift_bound, settings_of, Settings};
use crate::report::{Report, TOOL, VERSION};

pub const EXIT_VALID: u8 = 0;
pub const EXIT_INVALID: u8 = 3;

fn field<T: serde::de::DeserializeOwned>(v: &Value, key: &str) -> Result<T> {
    let x = v.get(key).cloned().ok_or_else(|| anyhow!("result.{key}: missing"))?;
    serde_json::from_value(x).map_err(|e| anyhow!("result.{key}: {e}"))
}

fn all_invariant(action: &SemigroupAction, u: &expansive_core::Subspace) -> bool {
    action
        .generator_matrices()
        .iter()
        .all(|m| u.is_invariant(m).unwrap_or(false))
}

fn check_torus(action: &SemigroupAction, tv: &TorusVerdict) -> Result<bool> {
    let n = action.dim();
    let irr = &tv.irreducibility;
    if irr.algebra_dim != algebra_basis(&action.generator_matrices(), n).len() {
        return Ok(false);
    }
    if irr.absolutely_irreducible != (irr.algebra_dim == n * n) {
        return Ok(false);
    }
    match (&irr.conclusion, &irr.rational_invariant_subspace) {
        (Irreducibility::Irreducible, None) if irr.absolutely_irreducible => {}
        (Irreducibility::Reducible, Some(u)) => {
            if u.is_zero() || u.is_full() || !all_invariant(action, u) {
                return Ok(false);
            }
        }
        (Irreducibility::Unknown, None) if !irr.absolutely_irreducible => {}
        _ => return Ok(false),
    }
    if let Some(cert) = &tv.infinite {
        let m = action.named_word_matrix(&cert.word)?;
        if infinite_order(&m)? != Some(cert.reason) {
            return Ok(false);
        }
    }
    Ok(match tv.route {
        TorusRoute::IrreducibleInfinite => {
            irr.conclusion == Irreducibility::Irreducible && tv.infinite.is_some()
        }
        TorusRoute::LinearOrbits => verify_verdict(action, &tv.verdict),
    })
}

fn check(report: &Report, case: &CaseFile, s: &Settings) -> Result<bool> {
    let r = &report.result;
    Ok(match report.command.as_str() {
        "analyze-matrix" => {
            let v = single_expansive(&case.matrix()?, s.mode)?;
            v.expansive == field::<bool>(r, "expansive")? && v.profile == field::<DiskProfile>(r, "profile")?
        }
        "analyze-semigroup" => {
            let action = case.action(s.mode)?;
            let v: ExpansivenessVerdict = serde_json::from_value(r.clone())?;
            verify_verdict(&action, &v)
        }
        "find-expansive" => {
            let action = case.action(s.mode)?;
            let wv: WeightsVerdict = field(r, "expansive_by_weights")?;
            let element: Option<ExpansiveElement> = field(r, "element")?;
            match element {
                Some(e) => {
                    let m = action.named_word_matrix(&e.word)?;
                    let v = single_expansive(&m, Mode::Group)?;
                    m == e.matrix && v.expansive && v == e.verdict && e.word.len() <= crate::commands::WORD_CAP
                }
                None => {
                    let d = weight_decomposition(&action)?;
                    expansive_by_weights(&d, Mode::Group) == wv && report.status != "Found"
                }
            }
        }
        "torus-check" => {
            let action = case.action(s.mode)?;
            let tv: TorusVerdict = serde_json::from_value(r.clone())?;
            check_torus(&action, &tv)?
        }
        "jsr" => {
            let action = case.action(s.mode)?;
            let b: JsrBounds = serde_json::from_value(r.clone())?;
            if b.lower_word.is_empty() {
                b.lower == 0.0 && b.upper >= b.lower
            } else {
                let m: QMatrix = action.named_word_matrix(&b.lower_word)?;
                let rho = spectral_radius(&m.to_f64()).powf(1.0 / b.lower_word.len() as f64);
                (rho - b.lower).abs() <= 1e-9 * rho.max(1.0) && b.upper >= b.lower
            }
        }
        "solenoid-chain" => {
            let chain: RhoBasisChain = serde_json::from_value(r.clone())?;
            let dm = case.module(Some(s.mode))?;
            chain.verify() && chain.levels == enumerate_basis(&dm, chain.levels.len())
        }
        "solenoid-lift" => {
            let chain: RhoBasisChain = field(r, "chain")?;
            let dm = case.module(Some(s.mode))?;
            if !chain.verify() || chain.levels != enumerate_basis(&dm, chain.levels.len()) {
                return Ok(false);
            }
            let p = s.point.clone().ok_or_else(|| anyhow!("options.point: missing"))?;
            let window = e_window(&HomVector::from_rationals(&p, s.precision), chain.characters());
            let reported: SolenoidWindow = field::<SolenoidWindow>(r, "window")?.reindexed();
            if reported != window {
                return Ok(false);
            }
            match r.get("lift") {
                Some(_) => {
                    let l: LiftResult = field(r, "lift")?;
                    l.bound.0 == lift_bound(&chain, s) && verify_lift(&window, &chain, &l)
                }
                None => report.status == "OutOfRange",
            }
        }
        "solenoid-check" => {
            let dm = case.module(Some(s.mode))?;
            let v: SolenoidVerdict = serde_json::from_value(r.clone())?;
            let (span, adjoint) = adjoint_action(&dm)?;
            span == v.span && adjoint.to_json() == v.adjoint && verify_verdict(&adjoint, &v.verdict)
        }
        other => bail!("unknown command {other}"),
    })
}

pub fn verify(report: &Report, case: &CaseFile) -> Result<bool> {
    if report.tool != TOOL || report.version != VERSION {
        bail!(
            "version mismatch: report from {} {}, verifier is {TOOL} {VERSION}",
            report.tool,
            report.version
        );
    }
    if report.case_hash != case.hash {
        return Ok(false);
    }
    let s = settings_of(report)?;
    check(report, case, &s)
}

pub fn run(report_path: &Path, case_path: &Path) -> u8 {
    let outcome = (|| -> Result<bool> {
        let text = std::fs::read_to_string(report_path).map_err(|e| anyhow!("reading {}: {e}", report_path.display()))?;
        let report: Report = serde_json::from_str(&text).map_err(|e| anyhow!("report: {e}"))?;
        let case = CaseFile::read(case_path)?;
        verify(&report, &case)
    })();
    match outcome {
        Ok(true) => {
            eprintln!("valid");
            EXIT_VALID
        }
        Ok(false) => {
            eprintln!("invalid");
            EXIT_INVALID
        }
        Err(e) => {
            eprintln!("invalid: {e:#}");
            EXIT_INVALID
        }
    }
}
