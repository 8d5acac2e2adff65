//! Parameterized plumbing families and the claim-checking harness.
//!
//! Graph shapes live in JSON templates (see `fixtures/`). A template names
//! its nodes and lists chains hanging off them or joining two of them; chain
//! segments repeat one weight `count` times, where weights and counts are
//! integer expressions in the family parameters. Templates with several
//! `cases` pick the first whose `when` guards all hold. Each template carries
//! the SHA-256 of its own canonical JSON (sorted keys, no whitespace, the
//! `checksum` field removed).

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::calculus::{same_boundary, Verdict};
use crate::canonical::isomorphic;
use crate::form::{self, FormSummary};
use crate::graph::{PlumbingGraph, VertexId};
use crate::par::{self, Mode};
use crate::seifert::{self, brieskorn_plumbing};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    MaruyamaX,
    MaruyamaXPrime,
    XPrimeTwoParam,
    RamanujamW,
    CassonHarerA,
    CassonHarerB,
    Fig8Sigma2_3_13,
    Fig8Sigma2_3_25,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::MaruyamaX,
        Family::MaruyamaXPrime,
        Family::XPrimeTwoParam,
        Family::RamanujamW,
        Family::CassonHarerA,
        Family::CassonHarerB,
        Family::Fig8Sigma2_3_13,
        Family::Fig8Sigma2_3_25,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::MaruyamaX => "MaruyamaX",
            Family::MaruyamaXPrime => "MaruyamaXPrime",
            Family::XPrimeTwoParam => "XPrimeTwoParam",
            Family::RamanujamW => "RamanujamW",
            Family::CassonHarerA => "CassonHarerA",
            Family::CassonHarerB => "CassonHarerB",
            Family::Fig8Sigma2_3_13 => "Fig8Sigma2_3_13",
            Family::Fig8Sigma2_3_25 => "Fig8Sigma2_3_25",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::MaruyamaX | Family::MaruyamaXPrime | Family::RamanujamW => &["n"],
            Family::XPrimeTwoParam => &["a", "b"],
            Family::CassonHarerA | Family::CassonHarerB => &["p", "s"],
            Family::Fig8Sigma2_3_13 | Family::Fig8Sigma2_3_25 => &[],
        }
    }

    fn file_name(self) -> &'static str {
        match self {
            Family::MaruyamaX => "maruyama_x.json",
            Family::MaruyamaXPrime => "maruyama_x_prime.json",
            Family::XPrimeTwoParam => "x_prime_two_param.json",
            Family::RamanujamW => "ramanujam_w.json",
            Family::CassonHarerA => "casson_harer_a.json",
            Family::CassonHarerB => "casson_harer_b.json",
            Family::Fig8Sigma2_3_13 => "fig8_sigma_2_3_13.json",
            Family::Fig8Sigma2_3_25 => "fig8_sigma_2_3_25.json",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        Family::ALL
            .into_iter()
            .find(|f| {
                let name: String = f.name().chars().filter(|c| *c != '_').collect();
                name.eq_ignore_ascii_case(&key)
            })
            .ok_or_else(|| FamilyError::Domain(format!("unknown family `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("transcription error in {family} template: {reason}")]
    Transcription { family: Family, reason: String },
    #[error("fixture error: {0}")]
    Fixture(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    pub params: Vec<i64>,
}

impl FamilySpec {
    pub fn new(family: Family, params: &[i64]) -> Self {
        FamilySpec {
            family,
            params: params.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        let names = self.family.param_names();
        if self.params.len() != names.len() {
            return Err(FamilyError::Domain(format!(
                "{} takes {} parameter(s), got {}",
                self.family,
                names.len(),
                self.params.len()
            )));
        }
        let bad = |msg: &str| Err(FamilyError::Domain(format!("{self}: {msg}")));
        match self.family {
            Family::MaruyamaX | Family::MaruyamaXPrime | Family::RamanujamW => {
                if self.params[0] < 1 {
                    return bad("need n >= 1");
                }
            }
            Family::XPrimeTwoParam => {
                if self.params.iter().any(|&x| x < 1) {
                    return bad("need a, b >= 1");
                }
            }
            Family::CassonHarerA | Family::CassonHarerB => {
                let (p, s) = (self.params[0], self.params[1]);
                if p < 3 || p % 2 == 0 {
                    return bad("need odd p >= 3");
                }
                if s < 1 {
                    return bad("need s >= 1");
                }
                if self.family == Family::CassonHarerB && p >= 5 && s < 2 {
                    return bad("need s >= 2 when p >= 5");
                }
            }
            Family::Fig8Sigma2_3_13 | Family::Fig8Sigma2_3_25 => {}
        }
        Ok(())
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self.params.iter().map(i64::to_string).collect();
        write!(f, "{}({})", self.family, ps.join(","))
    }
}

// ---------------------------------------------------------------------------
// Templates

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Template {
    pub family: Family,
    pub figure: u32,
    pub params: Vec<String>,
    /// Derived quantities, evaluated in order.
    #[serde(default, rename = "let", skip_serializing_if = "Vec::is_empty")]
    pub bindings: Vec<Binding>,
    pub cases: Vec<Case>,
    pub checksum: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Binding {
    pub name: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Case {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub when: Vec<String>,
    pub nodes: Vec<NodeTemplate>,
    pub chains: Vec<ChainTemplate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeTemplate {
    pub name: String,
    pub weight: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainTemplate {
    pub from: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<String>,
    #[serde(default)]
    pub segments: Vec<Segment>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub weight: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<String>,
}

impl Template {
    pub fn parse(src: &str) -> Result<Self, FamilyError> {
        let t: Template =
            serde_json::from_str(src).map_err(|e| FamilyError::Fixture(e.to_string()))?;
        let expected = t.compute_checksum();
        if t.checksum != expected {
            return Err(FamilyError::Fixture(format!(
                "{} template checksum mismatch: recorded {}, computed {expected}",
                t.family, t.checksum
            )));
        }
        Ok(t)
    }

    pub fn compute_checksum(&self) -> String {
        let mut value = serde_json::to_value(self).expect("plain data serializes");
        value.as_object_mut().unwrap().remove("checksum");
        hex::encode(Sha256::digest(value.to_string().as_bytes()))
    }

    /// Instantiates the template. Only checks what the template itself can
    /// get wrong (guards, counts, shape); see [`generate`] for domains.
    pub fn instantiate(&self, params: &[i64]) -> Result<PlumbingGraph, FamilyError> {
        let fail = |reason: String| FamilyError::Transcription {
            family: self.family,
            reason,
        };
        if params.len() != self.params.len() {
            return Err(fail(format!(
                "template has {} parameter(s), got {}",
                self.params.len(),
                params.len()
            )));
        }
        let mut env: BTreeMap<String, i64> = self
            .params
            .iter()
            .cloned()
            .zip(params.iter().copied())
            .collect();
        for b in &self.bindings {
            let v = eval(&b.value, &env).map_err(&fail)?;
            env.insert(b.name.clone(), v);
        }
        let case = self
            .cases
            .iter()
            .find_map(|c| {
                match c
                    .when
                    .iter()
                    .try_fold(true, |ok, g| Ok(ok && guard(g, &env)?))
                {
                    Ok(true) => Some(Ok(c)),
                    Ok(false) => None,
                    Err(e) => Some(Err(e)),
                }
            })
            .ok_or_else(|| fail(format!("no case matches {params:?}")))?
            .map_err(&fail)?;

        let mut weights = Vec::new();
        let mut labels = Vec::new();
        let mut edges = Vec::new();
        let mut node_index = BTreeMap::new();
        let tag = format!("fig{}", self.figure);
        for node in &case.nodes {
            let w = eval(&node.weight, &env).map_err(&fail)?;
            if node_index
                .insert(node.name.as_str(), weights.len())
                .is_some()
            {
                return Err(fail(format!("duplicate node `{}`", node.name)));
            }
            weights.push(w);
            labels.push(format!("{tag}:{}", node.name));
        }
        let lookup = |name: &str| {
            node_index
                .get(name)
                .copied()
                .ok_or_else(|| fail(format!("unknown node `{name}`")))
        };
        for (ci, chain) in case.chains.iter().enumerate() {
            let mut prev = lookup(&chain.from)?;
            let mut pos = 0;
            for seg in &chain.segments {
                let w = eval(&seg.weight, &env).map_err(&fail)?;
                let count = match &seg.count {
                    Some(c) => eval(c, &env).map_err(&fail)?,
                    None => 1,
                };
                if count < 0 {
                    return Err(fail(format!(
                        "negative count `{}` = {count}",
                        seg.count.as_deref().unwrap_or("1")
                    )));
                }
                for _ in 0..count {
                    edges.push((prev, weights.len()));
                    prev = weights.len();
                    weights.push(w);
                    labels.push(format!("{tag}:{}.{}.{pos}", chain.from, ci));
                    pos += 1;
                }
            }
            if let Some(to) = &chain.to {
                edges.push((prev, lookup(to)?));
            }
        }
        let mut g = PlumbingGraph::build(&weights, &edges).map_err(|e| fail(e.to_string()))?;
        for (i, label) in labels.into_iter().enumerate() {
            g.set_label(VertexId(i as u32), label);
        }
        Ok(g)
    }
}

// Integer expressions: + - * / (exact), parentheses, literals, names.
fn eval(src: &str, env: &BTreeMap<String, i64>) -> Result<i64, String> {
    let tokens = tokenize(src)?;
    let mut p = ExprParser {
        tokens: &tokens,
        pos: 0,
        env,
        src,
    };
    let v = p.expr()?;
    if p.pos != tokens.len() {
        return Err(format!("trailing input in `{src}`"));
    }
    Ok(v)
}

fn guard(src: &str, env: &BTreeMap<String, i64>) -> Result<bool, String> {
    for op in ["==", "!=", ">=", "<=", ">", "<"] {
        if let Some((l, r)) = src.split_once(op) {
            let (l, r) = (eval(l, env)?, eval(r, env)?);
            return Ok(match op {
                "==" => l == r,
                "!=" => l != r,
                ">=" => l >= r,
                "<=" => l <= r,
                ">" => l > r,
                _ => l < r,
            });
        }
    }
    Err(format!("guard `{src}` has no comparison"))
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(i64),
    Name(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut n: i64 = 0;
            while let Some(d) = chars.peek().and_then(|c| c.to_digit(10)) {
                n = n
                    .checked_mul(10)
                    .and_then(|n| n.checked_add(d as i64))
                    .ok_or_else(|| format!("literal overflow in `{src}`"))?;
                chars.next();
            }
            out.push(Tok::Num(n));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars
                .peek()
                .filter(|c| c.is_ascii_alphanumeric() || **c == '_')
            {
                s.push(c);
                chars.next();
            }
            out.push(Tok::Name(s));
        } else if "+-*/()".contains(c) {
            out.push(Tok::Op(c));
            chars.next();
        } else {
            return Err(format!("unexpected `{c}` in `{src}`"));
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    tokens: &'a [Tok],
    pos: usize,
    env: &'a BTreeMap<String, i64>,
    src: &'a str,
}

impl ExprParser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn overflow(&self) -> String {
        format!("overflow evaluating `{}`", self.src)
    }

    fn expr(&mut self) -> Result<i64, String> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' {
                acc.checked_add(rhs)
            } else {
                acc.checked_sub(rhs)
            }
            .ok_or_else(|| self.overflow())?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<i64, String> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == '*' {
                acc.checked_mul(rhs).ok_or_else(|| self.overflow())?
            } else {
                if rhs == 0 || acc % rhs != 0 {
                    return Err(format!("inexact division in `{}`", self.src));
                }
                acc / rhs
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<i64, String> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return self.unary()?.checked_neg().ok_or_else(|| self.overflow());
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<i64, String> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        match tok {
            Some(Tok::Num(n)) => Ok(n),
            Some(Tok::Name(name)) => self
                .env
                .get(&name)
                .copied()
                .ok_or_else(|| format!("unbound name `{name}` in `{}`", self.src)),
            Some(Tok::Op('(')) => {
                let v = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(format!("unbalanced parentheses in `{}`", self.src));
                }
                self.pos += 1;
                Ok(v)
            }
            _ => Err(format!("malformed expression `{}`", self.src)),
        }
    }
}

// ---------------------------------------------------------------------------
// Fixture sets

#[derive(Clone, Debug, Default)]
pub struct FixtureSet {
    templates: BTreeMap<Family, Template>,
}

const BUILTIN: [(Family, &str); 8] = [
    (
        Family::MaruyamaX,
        include_str!("../fixtures/maruyama_x.json"),
    ),
    (
        Family::MaruyamaXPrime,
        include_str!("../fixtures/maruyama_x_prime.json"),
    ),
    (
        Family::XPrimeTwoParam,
        include_str!("../fixtures/x_prime_two_param.json"),
    ),
    (
        Family::RamanujamW,
        include_str!("../fixtures/ramanujam_w.json"),
    ),
    (
        Family::CassonHarerA,
        include_str!("../fixtures/casson_harer_a.json"),
    ),
    (
        Family::CassonHarerB,
        include_str!("../fixtures/casson_harer_b.json"),
    ),
    (
        Family::Fig8Sigma2_3_13,
        include_str!("../fixtures/fig8_sigma_2_3_13.json"),
    ),
    (
        Family::Fig8Sigma2_3_25,
        include_str!("../fixtures/fig8_sigma_2_3_25.json"),
    ),
];

impl FixtureSet {
    /// The templates compiled into the crate.
    pub fn builtin() -> Self {
        let mut set = FixtureSet::default();
        for (family, src) in BUILTIN {
            let t = Template::parse(src).expect("builtin templates are valid");
            assert_eq!(
                t.family, family,
                "builtin template filed under wrong family"
            );
            set.templates.insert(family, t);
        }
        set
    }

    /// Loads every family's template file present in `dir`. Missing files are
    /// only an error once that family is generated.
    pub fn from_dir(dir: &Path) -> Result<Self, FamilyError> {
        let mut set = FixtureSet::default();
        for family in Family::ALL {
            let path = dir.join(family.file_name());
            if !path.exists() {
                continue;
            }
            let src = std::fs::read_to_string(&path)
                .map_err(|e| FamilyError::Fixture(format!("{}: {e}", path.display())))?;
            let t = Template::parse(&src)
                .map_err(|e| FamilyError::Fixture(format!("{}: {e}", path.display())))?;
            if t.family != family {
                return Err(FamilyError::Fixture(format!(
                    "{} holds a {} template",
                    path.display(),
                    t.family
                )));
            }
            set.templates.insert(family, t);
        }
        Ok(set)
    }

    pub fn template(&self, family: Family) -> Option<&Template> {
        self.templates.get(&family)
    }

    /// Mutable access, bypassing the checksum. Used for mutation tests.
    pub fn template_mut(&mut self, family: Family) -> Option<&mut Template> {
        self.templates.get_mut(&family)
    }

    pub fn insert(&mut self, template: Template) {
        self.templates.insert(template.family, template);
    }

    /// Generates a family member and checks its structural postconditions.
    pub fn generate(&self, spec: &FamilySpec) -> Result<PlumbingGraph, FamilyError> {
        spec.validate()?;
        let template = self
            .template(spec.family)
            .ok_or_else(|| FamilyError::Fixture(format!("no template for {}", spec.family)))?;
        let g = template.instantiate(&spec.params)?;
        self.postcheck(spec, &g)?;
        Ok(g)
    }

    fn postcheck(&self, spec: &FamilySpec, g: &PlumbingGraph) -> Result<(), FamilyError> {
        let fail = |reason: String| {
            Err(FamilyError::Transcription {
                family: spec.family,
                reason: format!("{spec}: {reason}"),
            })
        };
        let class = match g.classify() {
            Ok(c) => c,
            Err(e) => return fail(e.to_string()),
        };
        let shape = (class.node_ids.len(), class.branch_count);
        let first = spec.params.first().copied().unwrap_or(0);
        match spec.family {
            Family::MaruyamaX | Family::MaruyamaXPrime | Family::XPrimeTwoParam => {
                let want = if first >= 2 { (2, 5) } else { (1, 3) };
                if shape != want {
                    return fail(format!("expected {want:?} nodes/branches, got {shape:?}"));
                }
                if spec.family == Family::XPrimeTwoParam && spec.params[0] == spec.params[1] {
                    let single =
                        self.generate(&FamilySpec::new(Family::MaruyamaXPrime, &[first]))?;
                    if !isomorphic(g, &single) {
                        return fail(
                            "diagonal member differs from the one-parameter family".into(),
                        );
                    }
                }
            }
            Family::RamanujamW => {
                if shape != (3, 7) {
                    return fail(format!("expected 3 nodes and 7 branches, got {shape:?}"));
                }
            }
            Family::CassonHarerA
            | Family::CassonHarerB
            | Family::Fig8Sigma2_3_13
            | Family::Fig8Sigma2_3_25 => {
                if !(class.is_star || class.is_linear) {
                    return fail("not star-shaped".into());
                }
                if !form::is_negative_definite(g) {
                    return fail("not negative definite".into());
                }
            }
        }
        Ok(())
    }
}

/// Generates from the builtin templates.
pub fn generate(spec: &FamilySpec) -> Result<PlumbingGraph, FamilyError> {
    FixtureSet::builtin().generate(spec)
}

// ---------------------------------------------------------------------------
// Claims

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimReport {
    pub claim_id: String,
    pub range: String,
    pub pass: bool,
    /// First failing parameters.
    pub witness: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ClaimReport {
    fn new(id: &str, range: String, witness: Option<Vec<i64>>, note: Option<String>) -> Self {
        ClaimReport {
            claim_id: id.to_string(),
            range,
            pass: witness.is_none(),
            witness,
            note,
        }
    }
}

pub const CLAIM_IDS: [&str; 7] = ["C1", "C2", "C3", "C4", "C5", "C6", "C7"];

/// Runs every claim against the builtin templates.
pub fn verify_claims(bound: u32) -> Vec<ClaimReport> {
    verify_claims_with(&FixtureSet::builtin(), bound, Mode::default())
}

pub fn verify_claims_with(fixtures: &FixtureSet, bound: u32, mode: Mode) -> Vec<ClaimReport> {
    let bound = bound.max(1) as i64;
    let mut reports = par::map(mode, CLAIM_IDS.to_vec(), |id| {
        verify_claim(fixtures, id, bound).expect("known claim id")
    });
    reports.sort_by(|a, b| a.claim_id.cmp(&b.claim_id));
    reports
}

/// Runs one claim; `None` for an unknown id.
pub fn verify_claim(fixtures: &FixtureSet, id: &str, bound: i64) -> Option<ClaimReport> {
    let gen = |family: Family, params: &[i64]| fixtures.generate(&FamilySpec::new(family, params));
    let det_of =
        |family: Family, params: &[i64]| gen(family, params).map(|g| form::determinant(&g));
    let first_failure =
        |params: Vec<Vec<i64>>, ok: &dyn Fn(&[i64]) -> bool| params.into_iter().find(|p| !ok(p));
    let report = match id {
        "C1" => {
            let pairs: Vec<Vec<i64>> = (1..=bound)
                .flat_map(|a| (1..=bound).map(move |b| vec![a, b]))
                .collect();
            let witness = first_failure(pairs, &|p| {
                let (a, b) = (p[0], p[1]);
                let Ok(g) = gen(Family::XPrimeTwoParam, p) else {
                    return false;
                };
                let d = form::determinant(&g);
                let formula_ok = a <= b || {
                    let k = a - b - 1;
                    let sign = if k % 2 == 0 { 1 } else { -1 };
                    d == BigInt::from(sign * k * k)
                };
                formula_ok && form::is_homology_sphere(&g) == (a == b || a == b + 2)
            });
            ClaimReport::new("C1", format!("1 <= a, b <= {bound}"), witness, None)
        }
        "C2" => {
            let ns = (1..=bound).map(|n| vec![n]).collect();
            let witness = first_failure(ns, &|p| {
                det_of(Family::MaruyamaXPrime, p).is_ok_and(|d| d == BigInt::from(-1))
            });
            ClaimReport::new("C2", format!("1 <= n <= {bound}"), witness, None)
        }
        "C3" => {
            let dets: Vec<_> = (1..=bound)
                .map(|n| det_of(Family::RamanujamW, &[n]).ok())
                .collect();
            let mut witness = None;
            for (i, d) in dets.iter().enumerate() {
                let ok = match d {
                    Some(d) if d.abs().is_one() => {
                        i == 0 || dets[i - 1].as_ref().is_some_and(|prev| prev == &-d)
                    }
                    _ => false,
                };
                if !ok {
                    witness = Some(vec![i as i64 + 1]);
                    break;
                }
            }
            let note = match (witness.is_none(), dets.first()) {
                (true, Some(Some(d1))) => {
                    let odd = if d1.is_positive() { "+1" } else { "-1" };
                    let even = if d1.is_positive() { "-1" } else { "+1" };
                    Some(format!("det W(n) = {odd} for odd n, {even} for even n"))
                }
                _ => None,
            };
            ClaimReport::new("C3", format!("1 <= n <= {bound}"), witness, note)
        }
        "C4" => {
            let ns = (1..=bound).map(|n| vec![n]).collect();
            let witness = first_failure(ns, &|p| {
                det_of(Family::MaruyamaX, p).is_ok_and(|d| d.abs().is_one())
            });
            ClaimReport::new("C4", format!("1 <= n <= {bound}"), witness, None)
        }
        "C5" => {
            let x = gen(Family::MaruyamaX, &[1]);
            let xp = gen(Family::XPrimeTwoParam, &[1, 1]);
            let same = |g: Result<PlumbingGraph, FamilyError>, t: (u64, u64, u64)| {
                let target = brieskorn_plumbing(t.0, t.1, t.2).expect("coprime triple");
                g.is_ok_and(|g| same_boundary(&g, &target) == Verdict::Same)
            };
            let witness = if !same(x, (2, 5, 7)) {
                Some(vec![1])
            } else if !same(xp, (3, 4, 5)) {
                Some(vec![1, 1])
            } else {
                None
            };
            ClaimReport::new(
                "C5",
                "X(1) vs Σ(2,5,7), X'(1,1) vs Σ(3,4,5)".into(),
                witness,
                None,
            )
        }
        "C6" => {
            let p_max = 2 * bound + 1;
            let mut witness = None;
            let mut note = None;
            'outer: for family in [Family::CassonHarerA, Family::CassonHarerB] {
                for p in (3..=p_max).step_by(2) {
                    for s in 1..=bound {
                        let spec = FamilySpec::new(family, &[p, s]);
                        if spec.validate().is_err() {
                            continue;
                        }
                        if !fixtures
                            .generate(&spec)
                            .is_ok_and(|g| form::is_homology_sphere(&g))
                        {
                            witness = Some(vec![p, s]);
                            note = Some(format!("fails at {spec}"));
                            break 'outer;
                        }
                    }
                }
            }
            ClaimReport::new(
                "C6",
                format!("odd 3 <= p <= {p_max}, 1 <= s <= {bound}"),
                witness,
                note,
            )
        }
        "C7" => {
            let check = |family: Family, want: [u64; 3]| {
                gen(family, &[]).is_ok_and(|g| {
                    let summary = FormSummary::of(&g);
                    summary.unimodular
                        && summary.negative_definite
                        && seifert::seifert_data_from_star(&g)
                            .ok()
                            .and_then(|d| d.brieskorn_exponents())
                            .is_some_and(|a| a == want)
                })
            };
            let witness = if !check(Family::Fig8Sigma2_3_13, [2, 3, 13]) {
                Some(vec![13])
            } else if !check(Family::Fig8Sigma2_3_25, [2, 3, 25]) {
                Some(vec![25])
            } else {
                None
            };
            ClaimReport::new("C7", "Σ(2,3,13), Σ(2,3,25)".into(), witness, None)
        }
        _ => return None,
    };
    Some(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XPrimeRow {
    pub a: i64,
    pub b: i64,
    #[serde(serialize_with = "form::serialize_bigint")]
    pub det: BigInt,
    pub is_hs: bool,
}

/// Determinants of X'(a, b) over a rectangle, sorted by `(a, b)`.
pub fn xprime_scan(
    fixtures: &FixtureSet,
    a_range: std::ops::RangeInclusive<i64>,
    b_range: std::ops::RangeInclusive<i64>,
    mode: Mode,
) -> Result<Vec<XPrimeRow>, FamilyError> {
    let pairs: Vec<(i64, i64)> = a_range
        .flat_map(|a| b_range.clone().map(move |b| (a, b)))
        .collect();
    par::map(mode, pairs, |(a, b)| {
        let g = fixtures.generate(&FamilySpec::new(Family::XPrimeTwoParam, &[a, b]))?;
        let det = form::determinant(&g);
        Ok(XPrimeRow {
            a,
            b,
            is_hs: det.abs().is_one(),
            det,
        })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(pairs: &[(&str, i64)]) -> BTreeMap<String, i64> {
        pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
    }

    #[test]
    fn expressions() {
        let e = env(&[("n", 4), ("p", 7)]);
        assert_eq!(eval("-2*n-3", &e), Ok(-11));
        assert_eq!(eval("-(n+2)", &e), Ok(-6));
        assert_eq!(eval("(p-1)/2", &e), Ok(3));
        assert_eq!(eval(" 12 ", &e), Ok(12));
        assert!(eval("p/2", &e).is_err());
        assert!(eval("q", &e).is_err());
        assert!(eval("(n", &e).is_err());
        assert!(eval("n n", &e).is_err());
        assert!(eval("n $ 1", &e).is_err());
    }

    #[test]
    fn guards() {
        let e = env(&[("p", 3), ("s", 2)]);
        assert_eq!(guard("p == 3", &e), Ok(true));
        assert_eq!(guard("s >= 3", &e), Ok(false));
        assert_eq!(guard("s<p", &e), Ok(true));
        assert!(guard("s", &e).is_err());
    }

    #[test]
    fn builtin_checksums_hold() {
        let set = FixtureSet::builtin();
        for family in Family::ALL {
            let t = set.template(family).unwrap();
            assert_eq!(t.checksum, t.compute_checksum());
        }
    }

    #[test]
    fn tampered_template_rejected() {
        let src = include_str!("../fixtures/ramanujam_w.json").replace("\"-7\"", "\"-8\"");
        assert!(matches!(
            Template::parse(&src),
            Err(FamilyError::Fixture(_))
        ));
    }

    #[test]
    fn family_names_parse() {
        assert_eq!("RamanujamW".parse::<Family>(), Ok(Family::RamanujamW));
        assert_eq!("casson-harer-b".parse::<Family>(), Ok(Family::CassonHarerB));
        assert_eq!(
            "fig8sigma2313".parse::<Family>(),
            Ok(Family::Fig8Sigma2_3_13)
        );
        assert!("nope".parse::<Family>().is_err());
    }

    #[test]
    fn domains() {
        let bad = [
            FamilySpec::new(Family::MaruyamaX, &[0]),
            FamilySpec::new(Family::XPrimeTwoParam, &[1]),
            FamilySpec::new(Family::CassonHarerA, &[4, 1]),
            FamilySpec::new(Family::CassonHarerA, &[1, 1]),
            FamilySpec::new(Family::CassonHarerB, &[5, 1]),
            FamilySpec::new(Family::Fig8Sigma2_3_13, &[1]),
        ];
        for spec in bad {
            assert!(
                matches!(generate(&spec), Err(FamilyError::Domain(_))),
                "{spec}"
            );
        }
        assert!(generate(&FamilySpec::new(Family::CassonHarerB, &[3, 1])).is_ok());
    }

    #[test]
    fn ramanujam_shape() {
        let g = generate(&FamilySpec::new(Family::RamanujamW, &[1])).unwrap();
        let c = g.classify().unwrap();
        assert_eq!((c.node_ids.len(), c.branch_count), (3, 7));
        assert_eq!(g.label(c.node_ids[0]), Some("fig2:a"));
    }

    #[test]
    fn labels_follow_template() {
        let g = generate(&FamilySpec::new(Family::MaruyamaX, &[2])).unwrap();
        assert_eq!(g.label(VertexId(0)), Some("fig1:a"));
        assert!(g.label(VertexId(2)).unwrap().starts_with("fig1:a."));
    }

    #[test]
    fn diagonal_matches_one_parameter_family() {
        for n in 1..6 {
            let two = generate(&FamilySpec::new(Family::XPrimeTwoParam, &[n, n])).unwrap();
            let one = generate(&FamilySpec::new(Family::MaruyamaXPrime, &[n])).unwrap();
            assert!(isomorphic(&two, &one));
        }
    }

    #[test]
    fn bad_shape_is_transcription_error() {
        let mut set = FixtureSet::builtin();
        let t = set.template_mut(Family::RamanujamW).unwrap();
        t.cases[0].chains.pop();
        let err = set
            .generate(&FamilySpec::new(Family::RamanujamW, &[1]))
            .unwrap_err();
        assert!(matches!(
            err,
            FamilyError::Transcription {
                family: Family::RamanujamW,
                ..
            }
        ));
    }

    #[test]
    fn corrupted_w_fails_c3_at_one() {
        let mut set = FixtureSet::builtin();
        let t = set.template_mut(Family::RamanujamW).unwrap();
        let node = t.cases[0]
            .nodes
            .iter_mut()
            .find(|n| n.weight == "-7")
            .unwrap();
        node.weight = "-8".into();
        let report = verify_claim(&set, "C3", 8).unwrap();
        assert!(!report.pass);
        assert_eq!(report.witness, Some(vec![1]));
    }

    #[test]
    fn all_claims_pass() {
        let reports = verify_claims(6);
        assert_eq!(reports.len(), 7);
        for r in &reports {
            assert!(r.pass, "{r:?}");
        }
        assert!(reports[2].note.as_deref().unwrap().contains("odd n"));
    }

    #[test]
    fn scan_sorted_and_consistent() {
        let set = FixtureSet::builtin();
        let rows = xprime_scan(&set, 1..=4, 1..=4, Mode::Parallel).unwrap();
        assert_eq!(rows.len(), 16);
        assert!(rows.windows(2).all(|w| (w[0].a, w[0].b) < (w[1].a, w[1].b)));
        let seq = xprime_scan(&set, 1..=4, 1..=4, Mode::Sequential).unwrap();
        assert_eq!(rows, seq);
        let r = rows.iter().find(|r| (r.a, r.b) == (3, 2)).unwrap();
        assert_eq!(r.det, BigInt::from(0));
        assert!(!r.is_hs);
    }
}
