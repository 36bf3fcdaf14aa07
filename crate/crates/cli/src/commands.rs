//! Analysis subcommands.

use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, bail, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use expansive_core::orbits::{expansiveness_check_with, jsr_bounds, orbit_simulate, CheckOptions, Status};
use expansive_core::rational::{format_rational, parse_rational, serde_opt_qvector, serde_rational};
use expansive_core::solenoid::{
    e_window, enumerate_basis, lift, regular_chain, solenoid_expansive, HomVector, RhoBasisChain, DEFAULT_PRECISION,
};
use expansive_core::torus::{rational_orbit_oracle, torus_expansive};
use expansive_core::weights::{expansive_by_weights, find_expansive_element, weight_decomposition};
use expansive_core::{char_poly, single_expansive, Error, Mode, QVector, Rational};

use crate::case::{parse_point, CaseFile, Kind};
use crate::report::{Report, TOOL, VERSION};
use crate::Flags;

pub const EXIT_DECISIVE: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_UNKNOWN: u8 = 2;

/// Longest word `find-expansive` may build.
pub const WORD_CAP: usize = 64;

/// Resolved settings, recorded in the report so that `verify` can rebuild
/// the same inputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Settings {
    pub mode: Mode,
    pub depth: usize,
    #[serde(with = "serde_rational")]
    pub radius: Rational,
    #[serde(with = "serde_rational")]
    pub epsilon: Rational,
    pub k_max: u64,
    pub precision: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid: Option<u64>,
    #[serde(with = "serde_opt_rational", skip_serializing_if = "Option::is_none", default)]
    pub bound: Option<Rational>,
    #[serde(with = "serde_opt_qvector", skip_serializing_if = "Option::is_none", default)]
    pub point: Option<QVector>,
}

mod serde_opt_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        v.as_ref().map(format_rational).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        match Option::<String>::deserialize(d)? {
            None => Ok(None),
            Some(s) => parse_rational(&s).map(Some).map_err(serde::de::Error::custom),
        }
    }
}

fn flag_rational(s: &Option<String>, name: &str) -> Result<Option<Rational>> {
    s.as_deref()
        .map(|t| parse_rational(t).map_err(|e| anyhow!("--{name}: {e}")))
        .transpose()
}

pub fn settings(case: &CaseFile, flags: &Flags) -> Result<Settings> {
    let default_mode = if case.kind == Kind::Solenoid { Mode::Group } else { Mode::Semigroup };
    let mode = flags
        .mode
        .or(case.options.mode)
        .or(case.payload_mode()?)
        .unwrap_or(default_mode);
    let point = match &flags.point {
        Some(p) => Some(parse_point(p)?),
        None => case.lift_point()?,
    };
    Ok(Settings {
        mode,
        depth: flags.depth.or(case.options.depth).unwrap_or(10),
        radius: flag_rational(&flags.radius, "radius")?
            .or_else(|| case.options.radius.clone())
            .unwrap_or_else(|| Rational::from_integer(1000.into())),
        epsilon: flag_rational(&flags.epsilon, "epsilon")?
            .or_else(|| case.options.epsilon.clone())
            .unwrap_or_else(|| Rational::new(1.into(), 4.into())),
        k_max: flags.kmax.or(case.options.k_max).unwrap_or(16),
        precision: flags.precision.or(case.options.precision).unwrap_or(DEFAULT_PRECISION),
        grid: flags.grid,
        bound: flag_rational(&flags.bound, "bound")?,
        point,
    })
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Expansive => "Expansive",
        Status::NotExpansive => "NotExpansive",
        Status::Unknown => "Unknown",
    }
}

fn status_exit(s: Status) -> u8 {
    if s.is_decisive() {
        EXIT_DECISIVE
    } else {
        EXIT_UNKNOWN
    }
}

/// Exit code for errors raised by the analyses themselves.
fn error_exit(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::CapExceeded(_)) | Some(Error::PrecisionExhausted(_)) => EXIT_UNKNOWN,
        _ => EXIT_INPUT,
    }
}

pub fn chain_for(case: &CaseFile, s: &Settings) -> Result<RhoBasisChain> {
    let dm = case.module(Some(s.mode))?;
    Ok(regular_chain(&enumerate_basis(&dm, s.depth.max(1)), s.k_max)?)
}

/// Default lift bound `1/(k+1)`.
pub fn lift_bound(chain: &RhoBasisChain, s: &Settings) -> Rational {
    s.bound
        .clone()
        .unwrap_or_else(|| Rational::new(1.into(), (chain.k + 1).into()))
}

/// Runs one analysis; returns `(status, result, exit code)`.
fn analyze(command: &str, case: &CaseFile, s: &Settings) -> Result<(String, Value, u8)> {
    Ok(match command {
        "analyze-matrix" => {
            let m = case.matrix()?;
            let v = single_expansive(&m, s.mode)?;
            let status = if v.expansive { "Expansive" } else { "NotExpansive" };
            let result = json!({
                "mode": v.mode,
                "expansive": v.expansive,
                "profile": v.profile,
                "char_poly": char_poly(&m)?,
            });
            (status.into(), result, EXIT_DECISIVE)
        }
        "analyze-semigroup" => {
            let action = case.action(s.mode)?;
            let v = expansiveness_check_with(&action, &CheckOptions::with_depth(s.depth))?;
            let mut result = serde_json::to_value(&v)?;
            if let Some(w) = &v.witness {
                let probe = orbit_simulate(&action, w, s.depth, &s.radius)?;
                result["witness_probe"] = serde_json::to_value(probe)?;
            }
            (status_name(v.status).into(), result, status_exit(v.status))
        }
        "find-expansive" => {
            let action = case.action(s.mode)?;
            if action.mode() != Mode::Group {
                return Err(Error::NotGroupMode.into());
            }
            let d = weight_decomposition(&action)?;
            let wv = expansive_by_weights(&d, Mode::Group);
            let element = if wv.expansive { find_expansive_element(&action, WORD_CAP)? } else { None };
            let (status, code) = match (&element, wv.expansive) {
                (Some(_), _) => ("Found", EXIT_DECISIVE),
                (None, false) => ("NoneExists", EXIT_DECISIVE),
                (None, true) => ("Unknown", EXIT_UNKNOWN),
            };
            let result = json!({
                "weights": d,
                "expansive_by_weights": wv,
                "element": element,
            });
            (status.into(), result, code)
        }
        "torus-check" => {
            let action = case.action(s.mode)?;
            let tv = torus_expansive(&action, s.depth)?;
            let mut result = serde_json::to_value(&tv)?;
            if let Some(q) = s.grid {
                result["oracle"] = serde_json::to_value(rational_orbit_oracle(&action, q, &s.epsilon)?)?;
            }
            (status_name(tv.verdict.status).into(), result, status_exit(tv.verdict.status))
        }
        "jsr" => {
            let action = case.action(s.mode)?;
            let b = jsr_bounds(&action, s.depth, 1e-6);
            ("Bounds".into(), serde_json::to_value(b)?, EXIT_DECISIVE)
        }
        "solenoid-chain" => {
            let chain = chain_for(case, s)?;
            ("Chain".into(), serde_json::to_value(chain)?, EXIT_DECISIVE)
        }
        "solenoid-lift" => {
            let chain = chain_for(case, s)?;
            let p = s
                .point
                .clone()
                .ok_or_else(|| anyhow!("payload.p: a functional to lift is required (or --point)"))?;
            if p.len() != case.module(Some(s.mode))?.n {
                bail!("payload.p: expected {} coordinates", case.module(Some(s.mode))?.n);
            }
            let hv = HomVector::from_rationals(&p, s.precision);
            let window = e_window(&hv, chain.characters());
            let c = lift_bound(&chain, s);
            let mut result = json!({ "chain": chain, "bound": format_rational(&c), "window": window });
            match lift(&window, &chain, &c, s.precision) {
                Ok(l) => {
                    result["lift"] = serde_json::to_value(l)?;
                    ("Lifted".into(), result, EXIT_DECISIVE)
                }
                Err(e @ Error::LiftOutOfRange(_)) => {
                    result["error"] = json!(e.to_string());
                    ("OutOfRange".into(), result, EXIT_DECISIVE)
                }
                Err(e) => return Err(e.into()),
            }
        }
        "solenoid-check" => {
            let dm = case.module(Some(s.mode))?;
            let v = solenoid_expansive(&dm, s.depth)?;
            let status = v.verdict.status;
            (status_name(status).into(), serde_json::to_value(v)?, status_exit(status))
        }
        other => bail!("unknown command {other}"),
    })
}

fn summary(command: &str, case: &CaseFile, status: &str) -> String {
    let id = if case.id.is_empty() { "case" } else { case.id.as_str() };
    format!("{command} {id}: {status}")
}

pub fn run(command: &str, path: &Path, flags: &Flags) -> u8 {
    let start = Instant::now();
    let outcome = CaseFile::read(path).and_then(|case| {
        let s = settings(&case, flags)?;
        let (status, result, code) = analyze(command, &case, &s)?;
        Ok((case, s, status, result, code))
    });
    let (case, s, status, result, code) = match outcome {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e:#}");
            return error_exit(&e);
        }
    };
    let report = Report {
        tool: TOOL.into(),
        version: VERSION.into(),
        command: command.into(),
        case_id: case.id.clone(),
        case_hash: case.hash.clone(),
        options: serde_json::to_value(&s).expect("settings serialize"),
        status: status.clone(),
        result,
        timings: crate::report::Timings {
            total_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    };
    let text = report.to_pretty();
    match &flags.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                eprintln!("error: writing {}: {e}", p.display());
                return EXIT_INPUT;
            }
        }
        None => print!("{text}"),
    }
    eprintln!("{}", summary(command, &case, &status));
    code
}

/// Settings stored in a report.
pub fn settings_of(report: &Report) -> Result<Settings> {
    Ok(serde_json::from_value(report.options.clone())?)
}
