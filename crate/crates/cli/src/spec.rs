use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use thetapencil::liealg::{
    build_classical, cartan_involution, cyclic_permutation, direct_sum, twisted_cycle, Automorphism, Family,
    LieAlgebra, LieError,
};
use thetapencil::linalg::Matrix;
use thetapencil::poisson::StructureTensor;
use thetapencil::CycloNum;

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Validation { line: Option<usize>, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Grade,
    Pencil,
    Index,
    Invariants,
    Ggs,
    Zcross,
    Zfull,
    Ztilde,
    Certify,
    Gaudin,
    Twist,
}

impl Stage {
    pub const ALL: [Stage; 11] = [
        Stage::Grade,
        Stage::Pencil,
        Stage::Index,
        Stage::Invariants,
        Stage::Ggs,
        Stage::Zcross,
        Stage::Zfull,
        Stage::Ztilde,
        Stage::Certify,
        Stage::Gaudin,
        Stage::Twist,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Grade => "grade",
            Stage::Pencil => "pencil",
            Stage::Index => "index",
            Stage::Invariants => "invariants",
            Stage::Ggs => "ggs",
            Stage::Zcross => "zcross",
            Stage::Zfull => "zfull",
            Stage::Ztilde => "ztilde",
            Stage::Certify => "certify",
            Stage::Gaudin => "gaudin",
            Stage::Twist => "twist",
        }
    }

    pub fn parse(s: &str) -> Option<Stage> {
        Stage::ALL.into_iter().find(|st| st.name() == s)
    }

    /// Stages whose output this stage consumes.
    pub fn requires(self) -> &'static [Stage] {
        match self {
            Stage::Grade | Stage::Invariants | Stage::Gaudin | Stage::Twist => &[],
            Stage::Pencil => &[Stage::Grade],
            Stage::Index => &[Stage::Pencil],
            Stage::Ggs => &[Stage::Grade, Stage::Invariants],
            Stage::Zcross => &[Stage::Ggs],
            Stage::Zfull => &[Stage::Zcross, Stage::Pencil],
            Stage::Ztilde => &[Stage::Zfull],
            Stage::Certify => &[Stage::Zfull],
        }
    }

    /// What the stage's budget controls, if it takes one.
    pub fn budget_meaning(self) -> Option<&'static str> {
        match self {
            Stage::Index => Some("Monte-Carlo trials"),
            Stage::Certify => Some("minors examined by the minor-gcd test"),
            Stage::Ztilde => Some("maximal degree of g_0 invariants"),
            Stage::Twist => Some("truncation level n"),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBracket {
    pub i: usize,
    pub j: usize,
    /// `[k, coefficient]` pairs of `{x_i, x_j} = Σ c_k x_k`, 1-based.
    pub value: Vec<(usize, String)>,
}

/// A job as written in the spec file. Indices in the file are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub pipeline: Option<Vec<Stage>>,
    #[serde(rename = "type")]
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default = "one")]
    pub copies: usize,
    #[serde(default = "identity")]
    pub automorphism: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<String>,
    #[serde(default = "one_u32")]
    pub conductor: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brackets: Option<Vec<RawBracket>>,
    /// Rows of the automorphism matrix; column `j` is the image of `x_j`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gaudin_z: Option<Vec<String>>,
    /// Negative control: perturbs this Z generator (1-based) before certification.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrupt_generator: Option<usize>,
    #[serde(default)]
    pub budgets: BTreeMap<String, u64>,
}

fn one() -> usize {
    1
}

fn one_u32() -> u32 {
    1
}

fn identity() -> String {
    "identity".into()
}

/// A validated job: the spec plus the algebra `h`, `g = h^copies` and `θ`.
#[derive(Clone, Debug)]
pub struct Job {
    pub spec: JobSpec,
    pub pipeline: Vec<Stage>,
    pub h: LieAlgebra,
    pub theta: Automorphism,
    pub gaudin_z: Option<Vec<CycloNum>>,
}

impl Job {
    pub fn budget(&self, stage: Stage) -> Option<u64> {
        self.spec.budgets.get(stage.name()).copied()
    }
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of the first `key = …` assignment, for diagnostics.
fn line_of_key(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let l = l.trim_start();
        l.strip_prefix(key)
            .is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

struct Validator<'a> {
    text: &'a str,
}

impl Validator<'_> {
    fn fail<T>(&self, key: &str, message: impl Into<String>) -> Result<T, SpecError> {
        Err(SpecError::Validation {
            line: line_of_key(self.text, key),
            message: message.into(),
        })
    }

    fn lie<T>(&self, key: &str, r: Result<T, LieError>) -> Result<T, SpecError> {
        r.or_else(|e| self.fail(key, e.to_string()))
    }
}

/// Parses and validates a spec document.
pub fn parse_spec(text: &str) -> Result<Job, SpecError> {
    let spec: JobSpec = toml::from_str(text).map_err(|e| SpecError::Parse {
        line: e.span().map(|s| line_of_offset(text, s.start)).unwrap_or(1),
        message: e.message().to_string(),
    })?;
    validate(spec, text)
}

/// Validates a spec echoed back from a report.
pub fn validate_spec(spec: JobSpec) -> Result<Job, SpecError> {
    validate(spec, "")
}

fn validate(spec: JobSpec, text: &str) -> Result<Job, SpecError> {
    let v = Validator { text };
    let pipeline = match &spec.pipeline {
        Some(p) if !p.is_empty() => p.clone(),
        _ => return v.fail("pipeline", "missing pipeline: list at least one stage"),
    };
    for (pos, st) in pipeline.iter().enumerate() {
        if pipeline[..pos].contains(st) {
            return v.fail("pipeline", format!("stage `{}` listed twice", st.name()));
        }
        for dep in st.requires() {
            if !pipeline[..pos].contains(dep) {
                return v.fail(
                    "pipeline",
                    format!("stage `{}` needs `{}` earlier in the pipeline", st.name(), dep.name()),
                );
            }
        }
    }
    for key in spec.budgets.keys() {
        match Stage::parse(key) {
            None => return v.fail(key, format!("budget for unknown stage `{key}`")),
            Some(st) if st.budget_meaning().is_none() => {
                return v.fail(key, format!("stage `{key}` takes no budget"))
            }
            Some(st) if !pipeline.contains(&st) => {
                return v.fail(key, format!("budget for stage `{key}` which is not in the pipeline"))
            }
            _ => {}
        }
    }
    if spec.copies == 0 {
        return v.fail("copies", "copies must be at least 1");
    }
    let h = build_base(&spec, &v)?;
    let theta = build_theta(&spec, &h, &v)?;
    let gaudin_z = match &spec.gaudin_z {
        None => None,
        Some(zs) => {
            let parsed: Vec<CycloNum> = zs
                .iter()
                .map(|z| CycloNum::parse(z, spec.conductor).or_else(|e| v.fail("gaudin_z", e.to_string())))
                .collect::<Result<_, _>>()?;
            for i in 0..parsed.len() {
                if parsed[..i].contains(&parsed[i]) {
                    return v.fail("gaudin_z", format!("repeated Gaudin parameter `{}`", zs[i]));
                }
            }
            if parsed.len() != spec.copies {
                return v.fail("gaudin_z", format!("{} Gaudin parameters for {} copies", parsed.len(), spec.copies));
            }
            Some(parsed)
        }
    };
    if pipeline.contains(&Stage::Gaudin) && (spec.copies < 2 || h.form().is_none()) {
        return v.fail("pipeline", "gaudin needs a classical algebra with copies >= 2");
    }
    if let Some(k) = spec.corrupt_generator {
        if k == 0 || !pipeline.contains(&Stage::Certify) {
            return v.fail("corrupt_generator", "corrupt_generator is 1-based and needs the certify stage");
        }
    }
    Ok(Job {
        spec,
        pipeline,
        h,
        theta,
        gaudin_z,
    })
}

fn build_base(spec: &JobSpec, v: &Validator) -> Result<LieAlgebra, SpecError> {
    if spec.family == "raw" {
        return build_raw(spec, v);
    }
    let family: Family = v.lie("type", spec.family.parse())?;
    let Some(n) = spec.n else {
        return v.fail("type", format!("{} needs the matrix size n", spec.family));
    };
    if family == Family::Sp && n % 2 == 1 {
        return v.fail("n", format!("sp needs an even n, got {n}"));
    }
    v.lie("n", build_classical(family, n))
}

fn parse_scalar(text: &str, conductor: u32, key: &str, v: &Validator) -> Result<CycloNum, SpecError> {
    CycloNum::parse(text, conductor).or_else(|e| v.fail(key, format!("bad scalar `{text}`: {e}")))
}

fn build_raw(spec: &JobSpec, v: &Validator) -> Result<LieAlgebra, SpecError> {
    let Some(dim) = spec.dim else {
        return v.fail("type", "raw algebras need dim");
    };
    let labels = match &spec.labels {
        Some(l) if l.len() != dim => return v.fail("labels", format!("{} labels for dimension {dim}", l.len())),
        Some(l) => l.clone(),
        None => (1..=dim).map(|i| format!("x{i}")).collect(),
    };
    let mut t = StructureTensor::new(dim);
    for b in spec.brackets.iter().flatten() {
        let in_range = |k: usize| (1..=dim).contains(&k);
        if !in_range(b.i) || !in_range(b.j) || b.i == b.j {
            return v.fail("brackets", format!("bad bracket pair ({}, {})", b.i, b.j));
        }
        let mut form = Vec::new();
        for (k, c) in &b.value {
            if !in_range(*k) {
                return v.fail("brackets", format!("basis index {k} out of range"));
            }
            form.push((k - 1, parse_scalar(c, spec.conductor, "brackets", v)?));
        }
        t.set(b.i - 1, b.j - 1, form);
    }
    match LieAlgebra::new(labels, t, None) {
        Err(LieError::JacobiViolation(i, j, k)) => v.fail(
            "brackets",
            format!("Jacobi identity fails on the basis triple ({}, {}, {})", i + 1, j + 1, k + 1),
        ),
        r => v.lie("brackets", r),
    }
}

fn build_theta(spec: &JobSpec, h: &LieAlgebra, v: &Validator) -> Result<Automorphism, SpecError> {
    let copies = spec.copies;
    let key = "automorphism";
    let whole = || -> Result<Arc<LieAlgebra>, SpecError> {
        Ok(Arc::new(if copies == 1 { h.clone() } else { v.lie("copies", direct_sum(h, copies))? }))
    };
    match spec.automorphism.as_str() {
        "identity" => Ok(Automorphism::identity(whole()?)),
        "cycle" if copies >= 2 => v.lie(key, cyclic_permutation(h, copies)),
        "cycle" => v.fail("copies", "cycle needs copies >= 2"),
        "swap" if copies == 2 => v.lie(key, cyclic_permutation(h, 2)),
        "swap" => v.fail("copies", "swap needs copies = 2"),
        "cartan" if copies == 1 => v.lie(key, cartan_involution(Arc::new(h.clone()))),
        "cartan" => v.fail("copies", "cartan acts on a single copy; use twisted_cycle"),
        "twisted_cycle" => {
            let inner = match spec.inner.as_deref() {
                Some("cartan") | None => v.lie(key, cartan_involution(Arc::new(h.clone())))?,
                Some("identity") => Automorphism::identity(Arc::new(h.clone())),
                Some(other) => return v.fail("inner", format!("unknown inner automorphism `{other}`")),
            };
            v.lie(key, twisted_cycle(h, &inner, copies))
        }
        "matrix" => {
            let g = whole()?;
            let Some(rows) = &spec.matrix else {
                return v.fail(key, "automorphism = \"matrix\" needs matrix");
            };
            let d = g.dim();
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return v.fail("matrix", format!("matrix must be {d} x {d}"));
            }
            let mut m = Matrix::zeros(d, d);
            for (i, row) in rows.iter().enumerate() {
                for (j, c) in row.iter().enumerate() {
                    m[(i, j)] = parse_scalar(c, spec.conductor, "matrix", v)?;
                }
            }
            v.lie("matrix", Automorphism::new(g, m))
        }
        other => v.fail(
            key,
            format!("unknown automorphism `{other}` (expected identity, cycle, swap, cartan, twisted_cycle or matrix)"),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flagship_spec() {
        let job = parse_spec("type = \"sl\"\nn = 2\ncopies = 2\nautomorphism = \"cycle\"\npipeline = [\"grade\", \"pencil\", \"index\"]\n")
            .unwrap();
        assert_eq!(job.pipeline, [Stage::Grade, Stage::Pencil, Stage::Index]);
        assert_eq!(job.theta.order(), 2);
    }

    #[test]
    fn diagnostics_carry_lines() {
        let e = parse_spec("type = \"sl\"\nn = 2\ncolour = 3\npipeline = [\"grade\"]\n").unwrap_err();
        assert!(matches!(e, SpecError::Parse { line: 3, .. }), "{e}");
        let e = parse_spec("type = \"sl\"\nn = 2\n").unwrap_err();
        assert!(matches!(e, SpecError::Validation { .. }) && e.to_string().contains("pipeline"));
        let e = parse_spec("type = \"sp\"\nn = 3\npipeline = [\"grade\"]\n").unwrap_err();
        assert!(matches!(e, SpecError::Validation { line: Some(2), .. }), "{e}");
        let e = parse_spec("type = \"sl\"\nn = 2\npipeline = [\"zcross\"]\n").unwrap_err();
        assert!(e.to_string().contains("needs `ggs`"), "{e}");
    }

    #[test]
    fn broken_raw_tensor_names_the_triple() {
        let text = "type = \"raw\"\ndim = 3\npipeline = [\"grade\"]\nbrackets = [\n  { i = 1, j = 2, value = [[3, \"1\"]] },\n  { i = 1, j = 3, value = [[1, \"1\"]] },\n  { i = 2, j = 3, value = [[2, \"1\"]] },\n]\n";
        let e = parse_spec(text).unwrap_err();
        assert!(e.to_string().contains("triple (1, 2, 3)"), "{e}");
        assert!(matches!(e, SpecError::Validation { line: Some(4), .. }));
    }

    #[test]
    fn repeated_gaudin_points() {
        let e = parse_spec("type = \"sl\"\nn = 2\ncopies = 2\ngaudin_z = [\"1\", \"1\"]\npipeline = [\"gaudin\"]\n")
            .unwrap_err();
        assert!(e.to_string().contains("repeated"), "{e}");
    }
}
