use std::sync::Arc;

use serde_json::Value;

use thetapencil::liealg::{direct_sum, eigenspace_grading};
use thetapencil::pencil::{build_pencil, twisted_truncation, BracketPencil, Modulus};
use thetapencil::poisson::MultiPoly;
use thetapencil::zalgebra::{certify, TwistedPolarizations, ZGeneratorSet, ZKind};

use crate::run::{certificate_passes, gaudin_cross_brackets};
use crate::spec::{validate_spec, Job, JobSpec};

#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error("malformed report: {0}")]
    Malformed(String),
    #[error("unsupported schema version {0}")]
    Schema(u64),
    #[error("job in report is invalid: {0}")]
    Job(String),
}

/// One re-verified certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recheck {
    pub what: String,
    /// The recomputed certificate equals the recorded one.
    pub reproduced: bool,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub rechecks: Vec<Recheck>,
    pub report_passed: bool,
}

impl CheckOutcome {
    pub fn ok(&self) -> bool {
        self.report_passed && self.rechecks.iter().all(|r| r.reproduced && r.passed)
    }
}

fn malformed(what: &str) -> CheckError {
    CheckError::Malformed(what.to_string())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, CheckError> {
    v.get(key).ok_or_else(|| malformed(&format!("missing `{key}`")))
}

fn parse_polys(list: &Value, nvars: usize) -> Result<Vec<MultiPoly>, CheckError> {
    let items = list.as_array().ok_or_else(|| malformed("generator list is not an array"))?;
    items
        .iter()
        .map(|g| {
            let text = field(g, "poly")?.as_str().ok_or_else(|| malformed("poly is not a string"))?;
            let cond = field(g, "conductor")?.as_u64().ok_or_else(|| malformed("bad conductor"))? as u32;
            MultiPoly::parse(text, nvars, cond).map_err(|e| CheckError::Malformed(e.to_string()))
        })
        .collect()
}

fn parse_set(v: &Value, nvars: usize) -> Result<ZGeneratorSet, CheckError> {
    let kind: ZKind = serde_json::from_value(field(v, "kind")?.clone()).map_err(|e| CheckError::Malformed(e.to_string()))?;
    let expected = field(v, "expected_count")?.as_u64().ok_or_else(|| malformed("bad expected_count"))? as usize;
    let free = field(v, "free")?.as_bool().ok_or_else(|| malformed("bad free flag"))?;
    let polys = parse_polys(field(v, "generators")?, nvars)?;
    Ok(ZGeneratorSet::from_polys(kind, polys, expected, free))
}

fn seed_of(stage: &Value) -> Result<u64, CheckError> {
    field(stage, "seed")?.as_u64().ok_or_else(|| malformed("bad stage seed"))
}

fn pencil_of(job: &Job) -> Result<BracketPencil, CheckError> {
    let gr = eigenspace_grading(&job.theta).map_err(|e| CheckError::Job(e.to_string()))?;
    build_pencil(Arc::new(gr)).map_err(|e| CheckError::Job(e.to_string()))
}

/// Rebuilds every certificate in a report from its serialized generators
/// and compares with what was recorded.
pub fn check_report(report: &Value) -> Result<CheckOutcome, CheckError> {
    let version = field(report, "schema_version")?.as_u64().ok_or_else(|| malformed("bad schema_version"))?;
    if version != crate::run::SCHEMA_VERSION as u64 {
        return Err(CheckError::Schema(version));
    }
    let spec: JobSpec = serde_json::from_value(field(report, "job")?.clone()).map_err(|e| CheckError::Job(e.to_string()))?;
    let job = validate_spec(spec).map_err(|e| CheckError::Job(e.to_string()))?;
    let stages = field(report, "stages")?.as_array().ok_or_else(|| malformed("stages is not an array"))?;
    let mut rechecks = Vec::new();
    let mut pencil: Option<BracketPencil> = None;
    for st in stages {
        let name = field(st, "stage")?.as_str().unwrap_or_default();
        if field(st, "status")?.as_str() == Some("error") || st.get("result").is_none() {
            continue;
        }
        let result = field(st, "result")?;
        match name {
            "certify" => {
                if pencil.is_none() {
                    pencil = Some(pencil_of(&job)?);
                }
                let p = pencil.as_ref().unwrap();
                let seed = seed_of(st)?;
                let budget = field(result, "gcd_budget")?.as_u64().map(|b| b as usize);
                for entry in field(result, "certificates")?.as_array().ok_or_else(|| malformed("certificates"))? {
                    let set = parse_set(field(entry, "generators")?, p.dim())?;
                    let cert = certify(&set, p, seed, budget).map_err(|e| CheckError::Malformed(e.to_string()))?;
                    let recorded = field(entry, "certificate")?;
                    let check_rank = field(entry, "set")?.as_str() == Some("zfull") && set.free;
                    rechecks.push(Recheck {
                        what: format!("certify/{}", field(entry, "set")?.as_str().unwrap_or("?")),
                        reproduced: &serde_json::to_value(&cert).unwrap() == recorded,
                        passed: certificate_passes(&cert, check_rank),
                    });
                }
            }
            "gaudin" => {
                let g = direct_sum(&job.h, job.spec.copies).map_err(|e| CheckError::Job(e.to_string()))?;
                let hs = parse_polys(field(result, "hamiltonians")?, g.dim())?;
                let bad = gaudin_cross_brackets(&hs, g.tensor()).map_err(|e| CheckError::Malformed(e.to_string()))?;
                let recorded = field(result, "pairwise_zero")?.as_bool();
                rechecks.push(Recheck {
                    what: "gaudin/pairwise".into(),
                    reproduced: recorded == Some(bad.is_empty()),
                    passed: bad.is_empty(),
                });
            }
            "twist" => {
                let level = field(result, "level")?.as_u64().ok_or_else(|| malformed("bad level"))? as usize;
                let truncation = twisted_truncation(&job.theta, level, Modulus::Nilpotent)
                    .map_err(|e| CheckError::Job(e.to_string()))?;
                let generators = parse_set(field(result, "generators")?, truncation.algebra().dim())?;
                let tp = TwistedPolarizations { truncation, generators };
                let cert = tp.certify(seed_of(st)?).map_err(|e| CheckError::Malformed(e.to_string()))?;
                rechecks.push(Recheck {
                    what: "twist".into(),
                    reproduced: &serde_json::to_value(&cert).unwrap() == field(result, "certificate")?,
                    passed: certificate_passes(&cert, true),
                });
            }
            _ => {}
        }
    }
    let report_passed = field(report, "passed")?.as_bool().unwrap_or(false);
    Ok(CheckOutcome { rechecks, report_passed })
}
