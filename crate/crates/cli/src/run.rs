use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Value};

use thetapencil::invariants::{casimir_family, eigenvector_correction, to_adapted, EigenCorrection, InvariantError};
use thetapencil::liealg::{direct_sum, eigenspace_grading, fixed_subalgebra, LieError, PeriodicGrading};
use thetapencil::pencil::{
    build_pencil, generic_point, grading_numbers, index_of_tensor, lower_central_length, restricted_rank_check,
    BracketPencil, IndexMethod, IndexReport, PencilError, SYMBOLIC_DIM_CAP,
};
use thetapencil::poisson::{poisson_bracket, MultiPoly, PoissonError, StructureTensor};
use thetapencil::zalgebra::{
    certify, g0_invariants, gaudin_hamiltonians, gaudin_points, twisted_polarizations, z_cross_generators,
    z_full_generators, z_tilde_generators, CommutativityCertificate, ZError, ZGeneratorSet,
};
use thetapencil::CycloNum;

use crate::spec::{Job, Stage};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_INDEX_TRIALS: u64 = 5;
pub const DEFAULT_TWIST_LEVEL: u64 = 2;

/// A stage failure with a machine-readable code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageError {
    pub code: &'static str,
    pub message: String,
}

impl StageError {
    fn new(code: &'static str, message: impl Into<String>) -> StageError {
        StageError {
            code,
            message: message.into(),
        }
    }
}

fn poisson_code(e: &PoissonError) -> &'static str {
    match e {
        PoissonError::BudgetExhausted { .. } => "budget_exhausted",
        PoissonError::TooLarge { .. } => "too_large",
        PoissonError::Parse(_) => "parse",
        PoissonError::DimensionMismatch { .. } => "dimension_mismatch",
    }
}

fn pencil_code(e: &PencilError) -> &'static str {
    match e {
        PencilError::SymbolicTooLarge { .. } => "symbolic_too_large",
        PencilError::InfinityStructure(_) => "infinity_structure",
        PencilError::SplitMismatch(..) => "split_mismatch",
        PencilError::NoTrials => "no_trials",
        PencilError::Lie(_) => "lie_error",
    }
}

fn invariant_code(e: &InvariantError) -> &'static str {
    match e {
        InvariantError::UnsupportedAlgebra(_) => "unsupported_algebra",
        InvariantError::Poisson(p) => poisson_code(p),
        _ => "invariant_error",
    }
}

impl From<ZError> for StageError {
    fn from(e: ZError) -> StageError {
        let code = match &e {
            ZError::UnhandledCase(_) => "unhandled_case",
            ZError::RepeatedParameters => "repeated_parameters",
            ZError::NonHomogeneous => "non_homogeneous",
            ZError::UnsupportedTheta(_) => "unsupported_theta",
            ZError::Invariant(i) => invariant_code(i),
            ZError::Pencil(p) => pencil_code(p),
            ZError::Poisson(p) => poisson_code(p),
            ZError::Lie(_) => "lie_error",
        };
        StageError::new(code, e.to_string())
    }
}

impl From<PencilError> for StageError {
    fn from(e: PencilError) -> StageError {
        StageError::new(pencil_code(&e), e.to_string())
    }
}

impl From<InvariantError> for StageError {
    fn from(e: InvariantError) -> StageError {
        StageError::new(invariant_code(&e), e.to_string())
    }
}

impl From<LieError> for StageError {
    fn from(e: LieError) -> StageError {
        StageError::new("lie_error", e.to_string())
    }
}

impl From<PoissonError> for StageError {
    fn from(e: PoissonError) -> StageError {
        StageError::new(poisson_code(&e), e.to_string())
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides the spec's seed.
    pub seed: Option<u64>,
    pub symbolic: bool,
    /// Overrides of the spec's budgets.
    pub budgets: BTreeMap<String, u64>,
}

pub struct RunOutcome {
    pub report: Value,
    pub passed: bool,
}

/// Seed handed to a stage, derived from the job seed and the stage.
pub fn stage_seed(seed: u64, stage: Stage) -> u64 {
    seed.wrapping_mul(1_000_003).wrapping_add(Stage::ALL.iter().position(|s| *s == stage).unwrap() as u64 + 1)
}

/// Text of a polynomial together with the conductor needed to read it back.
pub fn poly_json(p: &MultiPoly) -> Result<Value, StageError> {
    let text = p.to_string();
    let conductor = p.conductor();
    let back = MultiPoly::parse(&text, p.nvars(), conductor)?;
    if &back != p {
        return Err(StageError::new("serialization", format!("polynomial does not round-trip: {text}")));
    }
    Ok(json!({ "poly": text, "conductor": conductor }))
}

fn set_json(set: &ZGeneratorSet) -> Result<Value, StageError> {
    let mut gens = Vec::new();
    for g in &set.generators {
        let mut v = poly_json(&g.poly)?;
        v["provenance"] = serde_json::to_value(&g.provenance).expect("serializable");
        gens.push(v);
    }
    Ok(json!({
        "kind": set.kind,
        "count": set.len(),
        "expected_count": set.expected_count,
        "free": set.free,
        "nvars": set.generators.first().map(|g| g.poly.nvars()),
        "generators": gens,
    }))
}

/// A certificate passes when all brackets vanish, the generators are
/// `g_0`-invariant and, for a free set, the Jacobian rank is as expected.
pub fn certificate_passes(c: &CommutativityCertificate, check_rank: bool) -> bool {
    c.all_zero && c.invariance.holds && (!check_rank || c.jacobian_rank_at_seed == c.expected_count)
}

fn index_json(r: &IndexReport, confirm: Option<&IndexReport>) -> Value {
    let mut v = serde_json::to_value(r).expect("serializable");
    let confirmed = match confirm {
        None => r.exact,
        Some(c) => c.index_estimate == r.index_estimate,
    };
    v["confirmed"] = json!(confirmed);
    if let Some(c) = confirm {
        v["confirm_seed"] = json!(c.seed);
    }
    v
}

#[derive(Default)]
struct State {
    grading: Option<Arc<PeriodicGrading>>,
    pencil: Option<BracketPencil>,
    family: Option<thetapencil::InvariantFamily>,
    eigen: Option<EigenCorrection>,
    zcross: Option<ZGeneratorSet>,
    zfull: Option<ZGeneratorSet>,
    ztilde: Option<ZGeneratorSet>,
}

struct Runner<'a> {
    job: &'a Job,
    opts: &'a RunOptions,
    seed: u64,
    state: State,
}

type StageResult = Result<(Value, bool), StageError>;

impl Runner<'_> {
    fn budget(&self, stage: Stage) -> Option<u64> {
        self.opts.budgets.get(stage.name()).copied().or(self.job.budget(stage))
    }

    fn grading(&self) -> Arc<PeriodicGrading> {
        self.state.grading.clone().expect("grade ran earlier")
    }

    fn pencil(&self) -> &BracketPencil {
        self.state.pencil.as_ref().expect("pencil ran earlier")
    }

    fn run_stage(&mut self, stage: Stage, seed: u64) -> StageResult {
        match stage {
            Stage::Grade => self.grade(seed),
            Stage::Pencil => self.pencil_stage(),
            Stage::Index => self.index(seed),
            Stage::Invariants => self.invariants(),
            Stage::Ggs => self.ggs(seed),
            Stage::Zcross => self.zcross(seed),
            Stage::Zfull => self.zfull(seed),
            Stage::Ztilde => self.ztilde(),
            Stage::Certify => self.certify(seed),
            Stage::Gaudin => self.gaudin(),
            Stage::Twist => self.twist(seed),
        }
    }

    fn grade(&mut self, seed: u64) -> StageResult {
        let gr = Arc::new(eigenspace_grading(&self.job.theta)?);
        let numbers = grading_numbers(&gr, seed, DEFAULT_INDEX_TRIALS as usize)?;
        let v = json!({
            "m": gr.m(),
            "conductor": gr.conductor(),
            "dim": gr.dim(),
            "component_dims": gr.component_dims(),
            "grades": gr.grades(),
            "numbers": numbers,
        });
        let ok = numbers.d_theta_identity || gr.algebra().form().is_none();
        self.state.grading = Some(gr);
        Ok((v, ok))
    }

    fn pencil_stage(&mut self) -> StageResult {
        let p = build_pencil(self.grading())?;
        let g0 = p.g0_indices();
        let g0_central = g0.iter().all(|&a| (0..p.dim()).all(|b| p.pi_inf().get(a, b).is_empty()));
        let lcl = lower_central_length(p.pi_inf());
        let m = p.grading().m() as usize;
        let jac0 = p.pi0().jacobi_violation();
        let jac_inf = p.pi_inf().jacobi_violation();
        let ok = jac0.is_none() && jac_inf.is_none() && g0_central && lcl.is_some_and(|l| l <= m);
        let v = json!({
            "dim": p.dim(),
            "dim_g0": g0.len(),
            "nonzero_brackets": { "pi_0": p.pi0().nnz(), "pi_inf": p.pi_inf().nnz() },
            "jacobi_violation": { "pi_0": jac0, "pi_inf": jac_inf },
            "g0_central_at_infinity": g0_central,
            "lower_central_length_at_infinity": lcl,
        });
        self.state.pencil = Some(p);
        Ok((v, ok))
    }

    fn index_pair(&self, t: &StructureTensor, seed: u64) -> Result<Value, StageError> {
        let trials = self.budget(Stage::Index).unwrap_or(DEFAULT_INDEX_TRIALS) as usize;
        if self.opts.symbolic && t.nvars() <= SYMBOLIC_DIM_CAP {
            let r = index_of_tensor(t, 0, seed, IndexMethod::Symbolic)?;
            return Ok(index_json(&r, None));
        }
        let r = index_of_tensor(t, trials, seed, IndexMethod::MonteCarlo)?;
        let c = index_of_tensor(t, trials, seed.wrapping_add(1), IndexMethod::MonteCarlo)?;
        let mut v = index_json(&r, Some(&c));
        if self.opts.symbolic {
            v["symbolic_skipped"] = json!(format!("dimension {} exceeds the cap {SYMBOLIC_DIM_CAP}", t.nvars()));
        }
        Ok(v)
    }

    fn index(&mut self, seed: u64) -> StageResult {
        let p = self.pencil();
        let gr = p.grading();
        let g0 = fixed_subalgebra(gr)?;
        let g = self.index_pair(p.pi(), seed)?;
        let g0_idx = self.index_pair(g0.tensor(), seed)?;
        let pi0 = self.index_pair(p.pi0(), seed)?;
        let inf = self.index_pair(p.pi_inf(), seed)?;
        let est = |v: &Value| v["index_estimate"].as_u64().unwrap() as usize;
        let reductive = gr.algebra().form().is_some();
        let closed = g0.dim() + est(&g) - est(&g0_idx);
        let closed_ok = est(&inf) == closed;
        let rank_g = est(&g);
        let rr = restricted_rank_check(p, &generic_point(p.dim(), seed), rank_g);
        let confirmed = [&g, &g0_idx, &pi0, &inf].iter().all(|v| v["confirmed"] == json!(true));
        let v = json!({
            "g": g,
            "g_0": g0_idx,
            "contraction_0": pi0,
            "contraction_inf": inf,
            "closed_form": (reductive).then(|| json!({
                "dim_g0_plus_rk_g_minus_rk_g0": closed,
                "matches": closed_ok,
            })),
            "restricted_rank": rr,
            "semicontinuity": est(&pi0) >= rank_g && est(&inf) >= rank_g,
        });
        Ok((v, confirmed && (!reductive || (closed_ok && rr.matches))))
    }

    fn invariants(&mut self) -> StageResult {
        let g = self.job.theta.algebra();
        let fam = casimir_family(g)?;
        let gens: Vec<Value> = fam.generators.iter().map(poly_json).collect::<Result<_, _>>()?;
        let v = json!({ "degrees": fam.degrees, "generators": gens });
        self.state.family = Some(fam);
        Ok((v, true))
    }

    fn ggs(&mut self, seed: u64) -> StageResult {
        let fam = self.state.family.as_ref().expect("invariants ran earlier");
        let eig = eigenvector_correction(fam, &self.grading(), seed)?;
        let gens: Vec<Value> = eig.family.generators.iter().map(poly_json).collect::<Result<_, _>>()?;
        let v = json!({
            "input_was_ggs": eig.input_was_ggs,
            "fallbacks": eig.fallbacks,
            "eigen_exponents": eig.family.eigen_exponents,
            "degrees": eig.family.degrees,
            "generators": gens,
            "report": eig.output,
        });
        self.state.eigen = Some(eig);
        Ok((v, true))
    }

    fn zcross(&mut self, seed: u64) -> StageResult {
        let eig = self.state.eigen.as_ref().expect("ggs ran earlier");
        let z = z_cross_generators(&eig.family, &self.grading(), seed)?;
        let v = set_json(&z)?;
        self.state.zcross = Some(z);
        Ok((v, true))
    }

    fn zfull(&mut self, seed: u64) -> StageResult {
        let z = z_full_generators(self.state.zcross.as_ref().unwrap(), self.pencil(), seed)?;
        let v = set_json(&z)?;
        self.state.zfull = Some(z);
        Ok((v, true))
    }

    fn ztilde(&mut self) -> StageResult {
        let max_deg = match self.budget(Stage::Ztilde) {
            Some(d) => d as u32,
            None => self.state.family.as_ref().and_then(|f| f.degrees.iter().max().copied()).unwrap_or(2),
        };
        let g0 = g0_invariants(&self.grading(), max_deg)?;
        let z = z_tilde_generators(self.state.zfull.as_ref().unwrap(), &g0);
        let mut v = set_json(&z)?;
        v["g0_invariant_degree_cap"] = json!(max_deg);
        v["g0_invariants_found"] = json!(g0.len());
        self.state.ztilde = Some(z);
        Ok((v, true))
    }

    fn certify(&mut self, seed: u64) -> StageResult {
        let budget = self.budget(Stage::Certify).map(|b| b as usize);
        let mut sets = vec![("zfull", self.state.zfull.clone().unwrap(), true)];
        if let Some(zt) = &self.state.ztilde {
            sets.push(("ztilde", zt.clone(), false));
        }
        let mut out = Vec::new();
        let mut passed = true;
        for (name, mut set, check_rank) in sets {
            let mut corrupted = None;
            if let (Some(k), "zfull") = (self.job.spec.corrupt_generator, name) {
                let g = set.generators.get_mut(k - 1).ok_or_else(|| {
                    StageError::new("bad_spec", format!("corrupt_generator {k} exceeds the generator count"))
                })?;
                let n = g.poly.nvars();
                g.poly = &g.poly + &MultiPoly::var(n, n - 1);
                corrupted = Some(k);
            }
            let cert = certify(&set, self.pencil(), seed, budget)?;
            let ok = certificate_passes(&cert, check_rank && set.free);
            passed &= ok;
            out.push(json!({
                "set": name,
                "corrupted_generator": corrupted,
                "generators": set_json(&set)?,
                "certificate": cert,
                "passed": ok,
            }));
        }
        Ok((json!({ "seed": seed, "gcd_budget": budget, "certificates": out }), passed))
    }

    fn gaudin(&mut self) -> StageResult {
        let h = &self.job.h;
        let n = self.job.spec.copies;
        let explicit = self.job.gaudin_z.is_some();
        let z = self.job.gaudin_z.clone().unwrap_or_else(|| gaudin_points(n));
        let hs = gaudin_hamiltonians(h, &z)?;
        let g = direct_sum(h, n)?;
        let cross = gaudin_cross_brackets(&hs, g.tensor())?;
        let mut compat = None;
        let cyclic = matches!(self.job.spec.automorphism.as_str(), "cycle" | "swap");
        if let (Some(zf), Some(p), true, false) = (&self.state.zfull, &self.state.pencil, cyclic, explicit) {
            let mut failures = Vec::new();
            for (k, hk) in hs.iter().enumerate() {
                let hk = to_adapted(hk, p.grading());
                for (j, f) in zf.generators.iter().enumerate() {
                    if !poisson_bracket(&hk, &f.poly, p.pi())?.is_zero() {
                        failures.push((k, j));
                    }
                }
            }
            compat = Some(failures);
        }
        let passed = cross.is_empty() && compat.as_ref().is_none_or(|f| f.is_empty());
        let v = json!({
            "points": z.iter().map(CycloNum::to_string).collect::<Vec<_>>(),
            "points_conductor": z.iter().map(CycloNum::conductor).max(),
            "hamiltonians": hs.iter().map(poly_json).collect::<Result<Vec<_>, _>>()?,
            "pairwise_zero": cross.is_empty(),
            "witnesses": cross,
            "commute_with_z": compat.as_ref().map(|f| json!({ "holds": f.is_empty(), "failures": f })),
        });
        Ok((v, passed))
    }

    fn twist(&mut self, seed: u64) -> StageResult {
        let level = self.budget(Stage::Twist).unwrap_or(DEFAULT_TWIST_LEVEL) as usize;
        let tp = twisted_polarizations(&self.job.theta, level)?;
        let t = tp.truncation.algebra().tensor();
        let method = if t.nvars() <= SYMBOLIC_DIM_CAP { IndexMethod::Symbolic } else { IndexMethod::MonteCarlo };
        let ind = index_of_tensor(t, DEFAULT_INDEX_TRIALS as usize, seed, method)?;
        let expected = self.job.theta.algebra().rank().map(|r| r * level);
        let cert = tp.certify(seed)?;
        let ok = certificate_passes(&cert, true);
        let v = json!({
            "level": level,
            "truncation_dim": t.nvars(),
            "truncation_index": ind,
            "expected_index": expected,
            "generators": set_json(&tp.generators)?,
            "certificate": cert,
        });
        Ok((v, ok && expected.is_none_or(|e| e == ind.index_estimate)))
    }
}

/// Pairs `(k, j)`, `k < j`, with `{H_k, H_j} ≠ 0`.
pub fn gaudin_cross_brackets(hs: &[MultiPoly], t: &StructureTensor) -> Result<Vec<(usize, usize)>, PoissonError> {
    let mut bad = Vec::new();
    for a in 0..hs.len() {
        for b in a + 1..hs.len() {
            if !poisson_bracket(&hs[a], &hs[b], t)?.is_zero() {
                bad.push((a, b));
            }
        }
    }
    Ok(bad)
}

/// Runs the pipeline. Stages after a failed dependency are skipped; the
/// report is complete either way.
pub fn run(job: &Job, opts: &RunOptions) -> RunOutcome {
    let seed = opts.seed.unwrap_or(job.spec.seed);
    let mut spec = job.spec.clone();
    spec.seed = seed;
    for (k, b) in &opts.budgets {
        spec.budgets.insert(k.clone(), *b);
    }
    let mut runner = Runner {
        job,
        opts,
        seed,
        state: State::default(),
    };
    let mut done: Vec<Stage> = Vec::new();
    let mut stages = Vec::new();
    let mut passed = true;
    for &stage in &job.pipeline {
        let s = stage_seed(runner.seed, stage);
        let missing: Vec<&str> = stage.requires().iter().filter(|d| !done.contains(d)).map(|d| d.name()).collect();
        let entry = if !missing.is_empty() {
            passed = false;
            json!({ "stage": stage.name(), "status": "skipped", "missing": missing })
        } else {
            match runner.run_stage(stage, s) {
                Ok((result, ok)) => {
                    passed &= ok;
                    done.push(stage);
                    json!({
                        "stage": stage.name(),
                        "seed": s,
                        "status": if ok { "passed" } else { "failed" },
                        "result": result,
                    })
                }
                Err(e) => {
                    passed = false;
                    json!({
                        "stage": stage.name(),
                        "seed": s,
                        "status": "error",
                        "error": { "code": e.code, "message": e.message },
                    })
                }
            }
        };
        stages.push(entry);
    }
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "tool": { "name": "thetapencil", "version": env!("CARGO_PKG_VERSION") },
        "job": spec,
        "symbolic": opts.symbolic,
        "stages": stages,
        "passed": passed,
    });
    RunOutcome { report, passed }
}

/// Canonical text of a report: sorted keys, two-space indentation, final newline.
pub fn render(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("serializable");
    s.push('\n');
    s
}
