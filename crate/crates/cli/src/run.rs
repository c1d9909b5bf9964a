use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use skewfep::fep::{self, EmbeddingProblem, FepError, SolutionKind};
use skewfep::galois::{
    self, build_galois_extension, build_twisted_extension, check_product_conditions, converse_check, tensor_check,
    twisted_corpus, GaloisError, GaloisExtension, TwistedExtension,
};
use skewfep::group::from_catalog;
use skewfep::numfield::{
    adjoin_sqrt, embeddings_into, field_level, Field, FieldElement, FieldMorphism, LevelVerdict, NumberField,
};
use skewfep::ore::{self, series_expand, OreError, SkewFraction, SkewPoly, SkewRing};
use skewfep::qalg::{scalar_extension, Algebra, AlgebraAutomorphism, AnisotropyVerdict, QuatElement, QuaternionAlgebra};

use crate::scenario::{Check, Decl, ParseError, Scenario};

#[derive(Debug, Clone)]
pub struct Flags {
    pub parallel: usize,
    pub height_bound: u64,
    pub degree_bound: usize,
    pub precision: usize,
}

impl Default for Flags {
    fn default() -> Self {
        Flags {
            parallel: 1,
            height_bound: 20,
            degree_bound: 4,
            precision: 30,
        }
    }
}

#[derive(Debug)]
pub enum RunError {
    Parse(ParseError),
    Unresolved { line: usize, name: String },
    Invalid { line: usize, message: String },
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Parse(e) => write!(f, "{e}"),
            RunError::Unresolved { line, name } => write!(f, "unresolved reference `{name}` at line {line}"),
            RunError::Invalid { line, message } => write!(f, "invalid scenario at line {line}: {message}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ParseError> for RunError {
    fn from(e: ParseError) -> Self {
        RunError::Parse(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    HypothesisFailed,
    Unknown,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::HypothesisFailed => "hypothesis-failed",
            Status::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub index: usize,
    pub line: usize,
    pub text: String,
    pub anchor: &'static str,
    pub status: Status,
    pub values: Vec<(String, String)>,
    pub mismatches: Vec<String>,
    pub millis: u128,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub scenario: String,
    pub flags: Flags,
    /// A declaration that parsed but could not be built.
    pub setup_error: Option<String>,
    pub results: Vec<CheckResult>,
}

impl Report {
    pub fn count(&self, s: Status) -> usize {
        self.results.iter().filter(|r| r.status == s).count()
    }

    pub fn success(&self) -> bool {
        self.setup_error.is_none() && self.count(Status::Fail) == 0
    }

    pub fn render(&self, timing: bool) -> String {
        let mut out = String::new();
        let f = &self.flags;
        let _ = writeln!(out, "scenario: {}", self.scenario);
        let _ = writeln!(
            out,
            "flags: parallel={} height_bound={} degree_bound={} precision={}",
            f.parallel, f.height_bound, f.degree_bound, f.precision
        );
        if let Some(e) = &self.setup_error {
            let _ = writeln!(out, "setup_error: {e}");
        }
        for r in &self.results {
            let _ = writeln!(out, "check {} (line {}): {}", r.index, r.line, r.text);
            let _ = writeln!(out, "  anchor: {}", r.anchor);
            let _ = writeln!(out, "  status: {}", r.status.as_str());
            for (k, v) in &r.values {
                let _ = writeln!(out, "  {k}: {v}");
            }
            for m in &r.mismatches {
                let _ = writeln!(out, "  mismatch: {m}");
            }
            if timing {
                let _ = writeln!(out, "  time_ms: {}", r.millis);
            }
        }
        let _ = writeln!(
            out,
            "summary: pass={} fail={} hypothesis-failed={} unknown={}",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::HypothesisFailed),
            self.count(Status::Unknown)
        );
        out
    }
}

#[derive(Clone)]
enum Obj {
    Field(Field),
    Algebra(Algebra),
    Ext(Arc<GaloisExtension>),
    Twist(Box<TwistedExtension>),
    Problem(Box<EmbeddingProblem>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Field,
    Algebra,
    Ext,
    Twist,
    Problem,
}

struct OpSpec {
    name: &'static str,
    args: &'static [Kind],
    optional: usize,
    params: &'static [&'static str],
    anchor: &'static str,
}

const OPS: &[OpSpec] = &[
    OpSpec { name: "anisotropy", args: &[Kind::Algebra, Kind::Field], optional: 0, params: &[], anchor: "anisotropy of the norm form after scalar extension" },
    OpSpec { name: "extension", args: &[Kind::Algebra, Kind::Field], optional: 0, params: &[], anchor: "Galois extensions H ⊗ ℓ / H" },
    OpSpec { name: "level", args: &[Kind::Field], optional: 0, params: &[], anchor: "level of a number field" },
    OpSpec { name: "galois_group", args: &[Kind::Field], optional: 0, params: &[], anchor: "automorphism groups of number fields" },
    OpSpec { name: "is_split", args: &[Kind::Problem], optional: 0, params: &[], anchor: "split embedding problems" },
    OpSpec { name: "solutions", args: &[Kind::Problem, Kind::Ext], optional: 0, params: &["kind"], anchor: "weak and full solutions" },
    OpSpec { name: "fiber_reduction", args: &[Kind::Problem, Kind::Ext], optional: 0, params: &[], anchor: "fiber-product reduction from weak to split" },
    OpSpec { name: "round_trip", args: &[Kind::Problem, Kind::Ext], optional: 1, params: &["algebra"], anchor: "transport between H and its center" },
    OpSpec { name: "product_conditions", args: &[Kind::Twist], optional: 0, params: &[], anchor: "product conditions for twisted extensions" },
    OpSpec { name: "converse", args: &[Kind::Twist], optional: 0, params: &["d"], anchor: "product condition from Galois twisted extensions" },
    OpSpec { name: "tensor", args: &[Kind::Twist], optional: 0, params: &["d"], anchor: "tensor decomposition of L[t,τ]" },
    OpSpec { name: "twisted_group", args: &[Kind::Twist], optional: 0, params: &["d"], anchor: "Galois group of L(t,τ)/H(t,σ)" },
    OpSpec { name: "geometric", args: &[Kind::Problem, Kind::Twist], optional: 0, params: &["d"], anchor: "geometric problems and their restriction to the fixed fields" },
    OpSpec { name: "center", args: &[Kind::Twist], optional: 0, params: &["d", "ring"], anchor: "center of H[t,σ]" },
    OpSpec { name: "recurrence", args: &[Kind::Twist], optional: 0, params: &["y", "max_order", "ring"], anchor: "twisted recurrences of (1 − y·t)⁻¹" },
    OpSpec { name: "criterion", args: &[Kind::Problem, Kind::Twist], optional: 1, params: &["ample"], anchor: "split-problem criterion hypotheses" },
    OpSpec { name: "q8_scenario", args: &[], optional: 0, params: &[], anchor: "quaternion group over Q(√2)" },
];

fn op_spec(name: &str) -> Option<&'static OpSpec> {
    OPS.iter().find(|o| o.name == name)
}

struct Env {
    objs: HashMap<String, Obj>,
    flags: Flags,
}

fn invalid(line: usize, message: impl Into<String>) -> RunError {
    RunError::Invalid {
        line,
        message: message.into(),
    }
}

/// Declared names and their kinds, checked before anything is built.
fn declared_kinds(sc: &Scenario) -> Result<HashMap<String, Kind>, RunError> {
    let mut kinds: HashMap<String, Kind> = HashMap::new();
    let need = |d: &Decl, pos: &[(usize, Kind)], kinds: &HashMap<String, Kind>| -> Result<(), RunError> {
        for &(i, k) in pos {
            let name = d.args.get(i).ok_or_else(|| invalid(d.line, format!("`{}` needs more arguments", d.kind)))?;
            if k == Kind::Field && name == "Q" {
                continue;
            }
            match kinds.get(name) {
                None => {
                    return Err(RunError::Unresolved {
                        line: d.line,
                        name: name.clone(),
                    })
                }
                Some(&found) if found != k => {
                    return Err(invalid(d.line, format!("`{name}` is a {found:?}, expected a {k:?}")))
                }
                _ => {}
            }
        }
        Ok(())
    };
    for d in &sc.fields {
        match d.kind.as_str() {
            "quadratic" | "poly" | "rationals" => {}
            "adjoin_sqrt" => need(d, &[(0, Kind::Field)], &kinds)?,
            k => return Err(invalid(d.line, format!("unknown field kind `{k}`"))),
        }
        kinds.insert(d.name.clone(), Kind::Field);
    }
    for d in &sc.algebras {
        if d.kind != "quaternion" {
            return Err(invalid(d.line, format!("unknown algebra kind `{}`", d.kind)));
        }
        need(d, &[(0, Kind::Field)], &kinds)?;
        kinds.insert(d.name.clone(), Kind::Algebra);
    }
    for d in &sc.extensions {
        match d.kind.as_str() {
            "galois" => need(d, &[(0, Kind::Algebra), (1, Kind::Field)], &kinds)?,
            "commutative" => need(d, &[(0, Kind::Field)], &kinds)?,
            k => return Err(invalid(d.line, format!("unknown extension kind `{k}`"))),
        }
        kinds.insert(d.name.clone(), Kind::Ext);
    }
    for d in &sc.twists {
        match d.kind.as_str() {
            "untwisted" | "center" => need(d, &[(0, Kind::Ext)], &kinds)?,
            "corpus" | "inner_counterexample" => {}
            k => return Err(invalid(d.line, format!("unknown twist kind `{k}`"))),
        }
        kinds.insert(d.name.clone(), Kind::Twist);
    }
    for d in &sc.problems {
        if d.kind != "problem" {
            return Err(invalid(d.line, format!("unknown problem kind `{}`", d.kind)));
        }
        need(d, &[(0, Kind::Ext)], &kinds)?;
        kinds.insert(d.name.clone(), Kind::Problem);
    }
    for c in &sc.checks {
        let spec = op_spec(&c.op).ok_or_else(|| invalid(c.line, format!("unknown operation `{}`", c.op)))?;
        let n = c.args.len();
        if n > spec.args.len() || n + spec.optional < spec.args.len() {
            return Err(invalid(c.line, format!("`{}` takes {} arguments", c.op, spec.args.len())));
        }
        for (a, &k) in c.args.iter().zip(spec.args) {
            if k == Kind::Field && a == "Q" {
                continue;
            }
            match kinds.get(a) {
                None => {
                    return Err(RunError::Unresolved {
                        line: c.line,
                        name: a.clone(),
                    })
                }
                Some(&found) if found != k => {
                    return Err(invalid(c.line, format!("`{a}` is a {found:?}, expected a {k:?}")))
                }
                _ => {}
            }
        }
        for p in c.params.keys() {
            if !spec.params.contains(&p.as_str()) {
                return Err(invalid(c.line, format!("`{}` has no parameter `{p}`", c.op)));
            }
        }
        if let Some(a) = c.params.get("algebra") {
            if kinds.get(a) != Some(&Kind::Algebra) {
                return Err(RunError::Unresolved {
                    line: c.line,
                    name: a.clone(),
                });
            }
        }
    }
    Ok(kinds)
}

impl Env {
    fn field(&self, name: &str) -> Field {
        if name == "Q" {
            return NumberField::rationals();
        }
        match &self.objs[name] {
            Obj::Field(f) => f.clone(),
            _ => unreachable!("kinds checked"),
        }
    }

    fn algebra(&self, name: &str) -> Algebra {
        match &self.objs[name] {
            Obj::Algebra(a) => a.clone(),
            _ => unreachable!("kinds checked"),
        }
    }

    fn ext(&self, name: &str) -> Arc<GaloisExtension> {
        match &self.objs[name] {
            Obj::Ext(e) => e.clone(),
            _ => unreachable!("kinds checked"),
        }
    }

    fn twist(&self, name: &str) -> &TwistedExtension {
        match &self.objs[name] {
            Obj::Twist(x) => x,
            _ => unreachable!("kinds checked"),
        }
    }

    fn problem(&self, name: &str) -> &EmbeddingProblem {
        match &self.objs[name] {
            Obj::Problem(p) => p,
            _ => unreachable!("kinds checked"),
        }
    }

    fn embedding(&self, line: usize, src: &Field, dst: &Field, index: Option<&String>) -> Result<FieldMorphism, String> {
        if src.degree() == 1 {
            return Ok(FieldMorphism::from_rationals(dst));
        }
        let k = match index {
            Some(s) => s.parse::<usize>().map_err(|_| format!("line {line}: bad embedding index `{s}`"))?,
            None => 0,
        };
        embeddings_into(src, dst)
            .into_iter()
            .nth(k)
            .ok_or_else(|| format!("line {line}: no embedding number {k}"))
    }

    fn build(&mut self, sc: &Scenario) -> Result<(), String> {
        let hb = self.flags.height_bound;
        for d in &sc.fields {
            let f = match d.kind.as_str() {
                "rationals" => Ok(NumberField::rationals()),
                "quadratic" => {
                    let n = d.args.first().and_then(|s| s.parse().ok()).ok_or(format!("line {}: quadratic needs an integer", d.line))?;
                    NumberField::quadratic(n).map_err(|e| e.to_string())
                }
                "poly" => {
                    let c: Result<Vec<i64>, _> = d.args.iter().map(|s| s.parse()).collect();
                    let c = c.map_err(|_| format!("line {}: coefficients must be integers", d.line))?;
                    NumberField::from_ints(&c, &d.name).map_err(|e| e.to_string())
                }
                "adjoin_sqrt" => {
                    let base = self.field(&d.args[0]);
                    let c: Result<Vec<i64>, _> = d.args[1..].iter().map(|s| s.parse()).collect();
                    let c = c.map_err(|_| format!("line {}: coordinates must be integers", d.line))?;
                    adjoin_sqrt(&base, &FieldElement::from_ints(&base, &c), &d.name)
                        .map(|(f, _, _)| f)
                        .map_err(|e| e.to_string())
                }
                _ => unreachable!("kinds checked"),
            }
            .map_err(|e| format!("line {}: {e}", d.line))?;
            self.objs.insert(d.name.clone(), Obj::Field(f));
        }
        for d in &sc.algebras {
            let base = self.field(&d.args[0]);
            let (a, b) = match (d.args.get(1), d.args.get(2)) {
                (Some(a), Some(b)) => (a.parse().ok(), b.parse().ok()),
                _ => (None, None),
            };
            let (Some(a), Some(b)) = (a, b) else {
                return Err(format!("line {}: quaternion needs integer a and b", d.line));
            };
            let alg = QuaternionAlgebra::from_ints(&base, a, b).map_err(|e| format!("line {}: {e}", d.line))?;
            self.objs.insert(d.name.clone(), Obj::Algebra(alg));
        }
        for d in &sc.extensions {
            let e = match d.kind.as_str() {
                "galois" => {
                    let alg = self.algebra(&d.args[0]);
                    let l = self.field(&d.args[1]);
                    let emb = self.embedding(d.line, alg.base(), &l, d.args.get(2))?;
                    build_galois_extension(&alg, &l, &emb, hb)
                }
                _ => {
                    let l = self.field(&d.args[0]);
                    let (base, idx) = match d.args.get(1).map(String::as_str) {
                        Some("over") => (
                            self.field(d.args.get(2).ok_or(format!("line {}: `over` needs a field", d.line))?),
                            d.args.get(3),
                        ),
                        _ => (NumberField::rationals(), None),
                    };
                    let emb = self.embedding(d.line, &base, &l, idx)?;
                    GaloisExtension::commutative(&l, &emb)
                }
            }
            .map_err(|e| format!("line {}: {e}", d.line))?;
            self.objs.insert(d.name.clone(), Obj::Ext(Arc::new(e)));
        }
        for d in &sc.twists {
            let x = match d.kind.as_str() {
                "untwisted" => TwistedExtension::untwisted(self.ext(&d.args[0])),
                "center" => {
                    let e = self.ext(&d.args[0]);
                    let g: usize = d.args.get(1).and_then(|s| s.parse().ok()).ok_or(format!("line {}: center needs a group index", d.line))?;
                    let (Some(h), Some(rho)) = (e.h_algebra(), e.automorphism(g.min(e.order().saturating_sub(1)))) else {
                        return Err(format!("line {}: center twists need a quaternion extension", d.line));
                    };
                    if g >= e.order() {
                        return Err(format!("line {}: group index {g} out of range", d.line));
                    }
                    TwistedExtension::new(e.clone(), AlgebraAutomorphism::identity(h), rho.clone())
                }
                "inner_counterexample" => galois::inner_twist_counterexample(),
                _ => {
                    let want = d.args.first().cloned().unwrap_or_default();
                    let corpus = twisted_corpus(hb).map_err(|e| format!("line {}: {e}", d.line))?;
                    corpus
                        .into_iter()
                        .find(|(n, _)| slug(n) == want)
                        .map(|(_, x)| x)
                        .ok_or(GaloisError::Precondition(format!("no corpus entry `{want}`")))
                }
            }
            .map_err(|e| format!("line {}: {e}", d.line))?;
            self.objs.insert(d.name.clone(), Obj::Twist(Box::new(x)));
        }
        for d in &sc.problems {
            let e = self.ext(&d.args[0]);
            let spec = d.args.get(1).ok_or(format!("line {}: problem needs a group", d.line))?.replace('*', " x ");
            let g = from_catalog(&spec).map_err(|e| format!("line {}: {e}", d.line))?;
            let rest = &d.args[2..];
            let gi = rest.iter().position(|s| s == "gens");
            let ii = rest.iter().position(|s| s == "images");
            let (Some(gi), Some(ii)) = (gi, ii) else {
                return Err(format!("line {}: expected `gens ... images ...`", d.line));
            };
            let gens: Result<Vec<usize>, String> = rest[gi + 1..ii]
                .iter()
                .map(|s| g.index_of(s).or_else(|| s.parse().ok().filter(|&k: &usize| k < g.order())).ok_or(format!("line {}: unknown element `{s}`", d.line)))
                .collect();
            let imgs: Result<Vec<usize>, String> = rest[ii + 1..]
                .iter()
                .map(|s| s.parse().ok().filter(|&k: &usize| k < e.order()).ok_or(format!("line {}: bad image `{s}`", d.line)))
                .collect();
            let p = EmbeddingProblem::from_generators(&g, &e, &gens?, &imgs?).map_err(|err| format!("line {}: {err}", d.line))?;
            self.objs.insert(d.name.clone(), Obj::Problem(Box::new(p)));
        }
        Ok(())
    }
}

pub fn slug(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect::<String>()
        .split('_')
        .filter(|p| !p.is_empty())
        .collect::<Vec<_>>()
        .join("_")
}

/// What an operation observed.
struct Observed {
    values: Vec<(String, String)>,
    /// The post-condition of the operation held.
    verified: bool,
    unknown: bool,
}

impl Observed {
    fn new() -> Self {
        Observed {
            values: Vec::new(),
            verified: true,
            unknown: false,
        }
    }

    fn put(&mut self, k: &str, v: impl ToString) -> &mut Self {
        self.values.push((k.to_string(), v.to_string()));
        self
    }
}

enum OpFailure {
    Hypothesis(String),
    Error(String),
}

impl From<GaloisError> for OpFailure {
    fn from(e: GaloisError) -> Self {
        match e {
            GaloisError::HypothesisFailed(_)
            | GaloisError::ProductConditionFailed(_)
            | GaloisError::Ore(OreError::HypothesisFailed(_)) => OpFailure::Hypothesis(e.to_string()),
            other => OpFailure::Error(other.to_string()),
        }
    }
}

impl From<FepError> for OpFailure {
    fn from(e: FepError) -> Self {
        match e {
            FepError::ProductConditionFailed(_) => OpFailure::Hypothesis(e.to_string()),
            FepError::Galois(g) => g.into(),
            other => OpFailure::Error(other.to_string()),
        }
    }
}

impl From<OreError> for OpFailure {
    fn from(e: OreError) -> Self {
        match e {
            OreError::HypothesisFailed(_) => OpFailure::Hypothesis(e.to_string()),
            other => OpFailure::Error(other.to_string()),
        }
    }
}

fn verdict_kind(v: &AnisotropyVerdict) -> &'static str {
    v.kind()
}

fn level_text(v: &LevelVerdict) -> String {
    match v {
        LevelVerdict::Finite { s, minimal, .. } => {
            if *minimal {
                s.to_string()
            } else {
                format!("at most {s}")
            }
        }
        LevelVerdict::InfiniteCertified { .. } => "infinite".into(),
        LevelVerdict::Unknown { bound } => format!("unknown (height bound {bound})"),
    }
}

fn degree_param(c: &Check, flags: &Flags) -> Result<usize, OpFailure> {
    match c.params.get("d") {
        Some(s) => s.parse().map_err(|_| OpFailure::Error(format!("bad degree bound `{s}`"))),
        None => Ok(flags.degree_bound),
    }
}

fn twist_of(x: &TwistedExtension, c: &Check) -> Result<AlgebraAutomorphism, OpFailure> {
    match c.params.get("ring").map(String::as_str) {
        None | Some("sigma") => Ok(x.sigma().clone()),
        Some("tau") => Ok(x.tau().clone()),
        Some(r) => Err(OpFailure::Error(format!("ring must be sigma or tau, found `{r}`"))),
    }
}

fn execute(env: &Env, c: &Check) -> Result<Observed, OpFailure> {
    let hb = env.flags.height_bound;
    let mut o = Observed::new();
    match c.op.as_str() {
        "anisotropy" => {
            let alg = env.algebra(&c.args[0]);
            let l = env.field(&c.args[1]);
            let emb = env.embedding(c.line, alg.base(), &l, None).map_err(OpFailure::Error)?;
            let v = scalar_extension(&alg, &l, &emb, hb).verdict;
            o.unknown = !v.is_certified() && !v.is_isotropic();
            o.put("verdict", verdict_kind(&v)).put("division", v.is_certified());
        }
        "extension" => {
            let alg = env.algebra(&c.args[0]);
            let l = env.field(&c.args[1]);
            let emb = env.embedding(c.line, alg.base(), &l, None).map_err(OpFailure::Error)?;
            match build_galois_extension(&alg, &l, &emb, hb) {
                Ok(e) => {
                    let (artin, outer) = (e.artin_check(), e.is_outer());
                    o.verified = artin && outer;
                    o.put("built", true)
                        .put("order", e.order())
                        .put("cyclic", e.table().is_cyclic())
                        .put("abelian", e.table().is_abelian())
                        .put("artin", artin)
                        .put("outer", outer);
                }
                Err(GaloisError::NotAnisotropic(v)) => {
                    o.unknown = !v.is_isotropic();
                    o.put("built", false).put("verdict", verdict_kind(&v));
                }
                Err(e) => {
                    o.put("built", false).put("error", e);
                }
            }
        }
        "level" => {
            let f = env.field(&c.args[0]);
            let v = field_level(&f, hb);
            o.unknown = matches!(v, LevelVerdict::Unknown { .. });
            o.put("level", level_text(&v));
        }
        "galois_group" => {
            let f = env.field(&c.args[0]);
            let (_, g) = galois::galois_group(&f, &FieldMorphism::from_rationals(&f))?;
            o.put("order", g.order())
                .put("galois", g.order() == f.degree())
                .put("cyclic", g.is_cyclic())
                .put("abelian", g.is_abelian());
        }
        "is_split" => {
            let p = env.problem(&c.args[0]);
            let s = fep::is_split(p);
            if let Some(sec) = &s.section {
                o.verified = (0..p.ext.order()).all(|x| p.alpha.apply(sec.apply(x)) == x);
            }
            o.put("split", s.split).put("kernel_order", p.kernel().count_ones());
        }
        "solutions" => {
            let p = env.problem(&c.args[0]);
            let big = env.ext(&c.args[1]);
            let kind = match c.params.get("kind").map(String::as_str) {
                None | Some("weak") => SolutionKind::Weak,
                Some("full") => SolutionKind::Full,
                Some(k) => return Err(OpFailure::Error(format!("unknown solution kind `{k}`"))),
            };
            let l_to_f = env.embedding(c.line, p.ext.l(), big.l(), None).map_err(OpFailure::Error)?;
            let sols = fep::find_solutions(p, &big, &l_to_f, kind)?;
            o.verified = sols.iter().all(|s| fep::verify_solution(p, s).pass());
            o.put("count", sols.len());
        }
        "fiber_reduction" => {
            let p = env.problem(&c.args[0]);
            let big = env.ext(&c.args[1]);
            let l_to_f = env.embedding(c.line, p.ext.l(), big.l(), None).map_err(OpFailure::Error)?;
            let Some(gamma) = fep::find_solutions(p, &big, &l_to_f, SolutionKind::Weak)?.into_iter().next() else {
                o.put("weak_solution", false);
                return Ok(o);
            };
            let fr = fep::fiber_reduction(p, &gamma)?;
            o.verified = fr.section_ok && fr.kernel_iso.is_bijective();
            o.put("weak_solution", true)
                .put("order", fr.problem.g.order())
                .put("split", fr.split)
                .put("kernel_order", fr.kernel_iso.source().order())
                .put("kernel_iso", fr.kernel_iso.is_bijective())
                .put("kernel_cyclic", fr.kernel_iso.source().is_cyclic());
        }
        "round_trip" => {
            let p = env.problem(&c.args[0]);
            let sol = match c.args.get(1) {
                Some(n) => {
                    let big = env.ext(n);
                    let l_to_f = env.embedding(c.line, p.ext.l(), big.l(), None).map_err(OpFailure::Error)?;
                    fep::find_solutions(p, &big, &l_to_f, SolutionKind::Full)?.into_iter().next()
                }
                None => None,
            };
            let rt = if p.ext.is_commutative() {
                let name = c
                    .params
                    .get("algebra")
                    .ok_or_else(|| OpFailure::Error("commutative problems need algebra=NAME".into()))?;
                fep::round_trip_up_down(p, sol.as_ref(), &env.algebra(name), hb)?
            } else {
                fep::round_trip_down_up(p, sol.as_ref(), hb)?
            };
            o.verified = rt.pass();
            o.put("problem", rt.problem);
            if c.args.len() > 1 {
                o.put("solution_found", sol.is_some());
            }
            if let Some(s) = rt.solution {
                o.put("solution", s);
            }
            if let Some(r) = &rt.transported {
                o.put("transported_solution", r.pass());
            }
        }
        "product_conditions" => {
            let x = env.twist(&c.args[0]);
            let r = check_product_conditions(x)?;
            o.verified = r.consistent();
            o.put("ord_sigma", r.ord_sigma)
                .put("ord_tau", r.ord_tau)
                .put("ord_sigma_tilde", r.ord_sigma_tilde)
                .put("ord_tau_tilde", r.ord_tau_tilde)
                .put("sigma_tilde_identity", x.sigma_tilde().is_identity())
                .put("tau_tilde_identity", x.tau_tilde().is_identity())
                .put("inner_order_sigma", r.inner_order_sigma)
                .put("inner_order_tau", r.inner_order_tau)
                .put("semidirect", r.semidirect)
                .put("trivial_intersection", r.trivial_intersection)
                .put("equal_orders", r.equal_orders)
                .put("star", r.star)
                .put("direct_product", r.direct_product)
                .put("fixed_fields_galois", r.fixed_fields_galois)
                .put("eq_produit", r.eq_produit);
            if let Some(d) = r.degree_identity {
                o.put("degree_identity", d);
            }
        }
        "converse" => {
            let x = env.twist(&c.args[0]);
            let r = converse_check(x, degree_param(c, &env.flags)?)?;
            o.verified = r.consistent();
            o.put("galois_verified", r.galois_verified()).put("eq_produit", r.eq_produit);
        }
        "tensor" => {
            let x = env.twist(&c.args[0]);
            let r = tensor_check(x, degree_param(c, &env.flags)?)?;
            o.verified = r.passed();
            o.put("injective", r.injective)
                .put("surjective", r.surjective)
                .put("multiplicative", r.multiplicative)
                .put("rank", r.rank);
        }
        "twisted_group" => {
            let x = env.twist(&c.args[0]);
            let tg = build_twisted_extension(x, degree_param(c, &env.flags)?)?;
            o.verified = tg.restriction.is_bijective();
            o.put("order", tg.table.order()).put("restriction_bijective", tg.restriction.is_bijective());
        }
        "geometric" => {
            let p = env.problem(&c.args[0]);
            let x = env.twist(&c.args[1]);
            let gp = fep::geometric_problem(p, x, degree_param(c, &env.flags)?)?;
            o.verified = gp.link_holds;
            o.put("link", gp.link_holds).put("order", gp.twisted.table.order());
        }
        "center" => {
            let ring = SkewRing::new(twist_of(env.twist(&c.args[0]), c)?)?;
            let r = ore::center_bounded(&ring, degree_param(c, &env.flags)?);
            o.verified = r.basis.iter().all(ore::is_central) && r.matches_closed_form != Some(false);
            o.put("dimension", r.basis.len())
                .put("twist_order", r.twist_order)
                .put("inner_order", r.inner_order)
                .put("hypothesis", r.hypothesis);
            if let Some(m) = r.matches_closed_form {
                o.put("closed_form", m);
            }
        }
        "recurrence" => {
            let ring = SkewRing::new(twist_of(env.twist(&c.args[0]), c)?)?;
            let alg = ring.algebra().clone();
            let y: Vec<i64> = match c.params.get("y") {
                Some(s) => s
                    .split(',')
                    .map(|t| t.parse().map_err(|_| OpFailure::Error(format!("bad coordinate `{t}`"))))
                    .collect::<Result<_, _>>()?,
                None => vec![1, 0, 0, 0],
            };
            if y.len() != 4 {
                return Err(OpFailure::Error("y needs four coordinates".into()));
            }
            let max_order = match c.params.get("max_order") {
                Some(s) => s.parse().map_err(|_| OpFailure::Error(format!("bad max_order `{s}`")))?,
                None => 3,
            };
            let yq = QuatElement::from_ints(&alg, [y[0], y[1], y[2], y[3]]);
            let den = SkewPoly::new(&ring, vec![QuatElement::one(&alg), -&yq]);
            let f = SkewFraction::new(SkewPoly::one(&ring), den)?;
            let s = series_expand(&f, env.flags.precision);
            match ore::detect_recurrence(&s, max_order)? {
                Some(cert) => {
                    o.verified = cert.verify(&s);
                    o.put("found", true).put("order", cert.order);
                }
                None => {
                    o.put("found", false);
                }
            }
        }
        "criterion" => {
            let p = env.problem(&c.args[0]);
            let x = c.args.get(1).map(|n| env.twist(n));
            let ample = c.params.get("ample").is_some_and(|v| v == "true");
            let r = fep::criterion_hypotheses(p, x, ample)?;
            o.put("split", r.split);
            if let Some(e) = r.eq_produit {
                o.put("eq_produit", e);
            }
            o.put("ample_asserted", r.ample_asserted)
                .put("applicable", r.applicable)
                .put("weak_route_suggested", r.weak_route_suggested)
                .put("conclusion_verified", r.conclusion_verified)
                .put("note", r.note);
        }
        "q8_scenario" => {
            let r = fep::q8_scenario(hb)?;
            o.verified = r.weak_solution.pass() && r.fiber_kernel_iso;
            o.put("split", r.split)
                .put("kernel_order", r.kernel_order)
                .put("kernel_cyclic", r.kernel_cyclic)
                .put("quartic_group_order", r.quartic_group_order)
                .put("quartic_cyclic", r.quartic_cyclic)
                .put("quartic_moves_sqrt2", r.quartic_moves_sqrt2)
                .put("level", level_text(&r.level))
                .put("weak_solution", r.weak_solution.pass())
                .put("fiber_order", r.fiber_order)
                .put("fiber_split", r.fiber_split)
                .put("fiber_kernel_order", r.fiber_kernel_order)
                .put("fiber_kernel_cyclic", r.fiber_kernel_cyclic)
                .put("round_trip", r.round_trip)
                .put("note", r.note);
        }
        _ => unreachable!("operations checked"),
    }
    Ok(o)
}

fn run_check(env: &Env, index: usize, c: &Check) -> CheckResult {
    let start = Instant::now();
    let spec = op_spec(&c.op).expect("operations checked");
    let (mut status, values) = match execute(env, c) {
        Ok(o) => {
            let status = if !o.verified {
                Status::Fail
            } else if o.unknown {
                Status::Unknown
            } else {
                Status::Pass
            };
            (status, o.values)
        }
        Err(OpFailure::Hypothesis(m)) => (Status::HypothesisFailed, vec![("error".to_string(), m)]),
        Err(OpFailure::Error(m)) => (Status::Fail, vec![("error".to_string(), m)]),
    };
    let mut mismatches = Vec::new();
    let lookup: BTreeMap<&str, &str> = values.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
    for (k, want) in &c.expect {
        let got = if k == "status" { Some(status.as_str()) } else { lookup.get(k.as_str()).copied() };
        match got {
            Some(g) if g == want => {}
            Some(g) => mismatches.push(format!("{k} expected {want}, observed {g}")),
            None => mismatches.push(format!("{k} expected {want}, not reported")),
        }
    }
    if !mismatches.is_empty() {
        status = Status::Fail;
    }
    CheckResult {
        index,
        line: c.line,
        text: c.text(),
        anchor: spec.anchor,
        status,
        values,
        mismatches,
        millis: start.elapsed().as_millis(),
    }
}

/// Validates references, builds the declarations, then runs every check.
pub fn run(name: &str, text: &str, flags: &Flags) -> Result<Report, RunError> {
    let sc = crate::scenario::parse(text)?;
    declared_kinds(&sc)?;
    let mut env = Env {
        objs: HashMap::new(),
        flags: flags.clone(),
    };
    let mut report = Report {
        scenario: name.to_string(),
        flags: flags.clone(),
        setup_error: None,
        results: Vec::new(),
    };
    if let Err(e) = env.build(&sc) {
        report.setup_error = Some(e);
        return Ok(report);
    }
    let n = sc.checks.len();
    let workers = flags.parallel.clamp(1, n.max(1));
    if workers == 1 {
        report.results = sc.checks.iter().enumerate().map(|(i, c)| run_check(&env, i + 1, c)).collect();
    } else {
        let next = AtomicUsize::new(0);
        let slots: Mutex<Vec<Option<CheckResult>>> = Mutex::new(vec![None; n]);
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    if i >= n {
                        break;
                    }
                    let r = run_check(&env, i + 1, &sc.checks[i]);
                    slots.lock().expect("no poisoned workers")[i] = Some(r);
                });
            }
        });
        report.results = slots.into_inner().expect("workers joined").into_iter().map(|r| r.expect("every check ran")).collect();
    }
    Ok(report)
}
