use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Range;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use toml::{Spanned, Value};

use super::element::parse_element;
use super::expr::{Expr, ExprError};
use crate::catalog::{check_distinct_primes, Params};
use crate::chains::{GroupChain, Provenance};
use crate::error::{ChainError, Result};
use crate::groups::{FiniteGroupTable, GroupContext, GroupElement, IntMatrix, Lattice, SubgroupData};

// ---------------------------------------------------------------------------
// On-disk shape

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc {
    group: Spanned<RawGroup>,
    chain: Spanned<RawChain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    analysis: Option<RawAnalysis>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    family: Spanned<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    finite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    permutations: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    action: Option<Spanned<Value>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChain {
    kind: Spanned<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    levels: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    params: BTreeMap<String, i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    distinct_primes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    template: Option<Spanned<RawLevel>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    level: Vec<Spanned<RawLevel>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLevel {
    lattice: Vec<Vec<Spanned<Value>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    finite: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    translations: BTreeMap<String, Vec<Spanned<Value>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    center: Option<Spanned<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    twist: Option<Vec<Spanned<Value>>>,
}

#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnalysis {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    probe_depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    regularity_depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coset_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    perm_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    kernel: Vec<Spanned<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    reports: Vec<Spanned<String>>,
}

// ---------------------------------------------------------------------------
// Parsed document

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiniteSpec {
    /// `Z<n>`, `S<n>` or `A<n>`.
    Builtin(String),
    /// Generated by permutations of `0..degree` in cycle notation.
    Permutations { degree: usize, generators: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ActionSpec {
    Trivial,
    /// Permutation of coordinates; the finite part must be a permutation group of degree `rank`.
    Permutation,
    /// One integer matrix per generator of the finite part, extended multiplicatively.
    Matrices(Vec<Vec<Vec<i64>>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Lattice {
        rank: usize,
        finite: FiniteSpec,
        action: ActionSpec,
    },
    Heisenberg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainKind {
    Explicit,
    Parametric,
}

/// One level (explicit) or the level template (parametric); `i` is the level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSpec {
    /// Rows of a matrix whose columns span the lattice.
    pub lattice: Vec<Vec<Expr>>,
    /// Finite part by element name (lattice family).
    pub finite: Vec<String>,
    pub translations: BTreeMap<String, Vec<Expr>>,
    /// Center modulus (Heisenberg family).
    pub center: Option<Expr>,
    pub twist: Option<[Expr; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainSpec {
    pub kind: ChainKind,
    pub params: Params,
    /// Declared level range `1..=levels`.
    pub levels: usize,
    pub distinct_primes: Vec<String>,
    /// A single template (parametric) or one entry per level (explicit).
    pub level_specs: Vec<LevelSpec>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnalysisSpec {
    pub depth: Option<usize>,
    pub probe_depth: Option<usize>,
    pub regularity_depth: Option<usize>,
    pub window: Option<usize>,
    pub coset_cap: Option<usize>,
    pub perm_cap: Option<usize>,
    /// Elements in word or coordinate notation.
    pub kernel: Vec<String>,
    pub reports: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainSpecDocument {
    pub group: GroupSpec,
    pub chain: ChainSpec,
    pub analysis: AnalysisSpec,
}

pub const REPORT_KINDS: &[&str] = &["kernel", "stability"];

// ---------------------------------------------------------------------------
// Errors

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecErrorKind {
    Syntax,
    Semantic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecError {
    pub kind: SpecErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
    pub level: Option<usize>,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            SpecErrorKind::Syntax => "syntax error",
            SpecErrorKind::Semantic => "semantic error",
        };
        write!(f, "line {}, column {}: {kind}", self.line, self.column)?;
        if let Some(l) = self.level {
            write!(f, " at level {l}")?;
        }
        write!(f, ": {}", self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for SpecError {}

impl From<SpecError> for ChainError {
    fn from(e: SpecError) -> Self {
        ChainError::Validation(e.to_string())
    }
}

/// Maps byte offsets of the source to 1-based line and column.
struct Source<'a> {
    text: &'a str,
}

impl Source<'_> {
    fn position(&self, offset: usize) -> (usize, usize) {
        let offset = offset.min(self.text.len());
        let before = &self.text[..offset];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().unwrap_or("").chars().count() + 1;
        (line, col)
    }

    fn error(&self, kind: SpecErrorKind, span: &Range<usize>, message: impl Into<String>) -> SpecError {
        let (line, column) = self.position(span.start);
        SpecError {
            kind,
            line,
            column,
            message: message.into(),
            expected: vec![],
            level: None,
        }
    }

    /// Error inside a string value: `offset` counts characters after the opening quote.
    fn inner_error(&self, kind: SpecErrorKind, span: &Range<usize>, e: &ExprError) -> SpecError {
        let (line, column) = self.position(span.start);
        SpecError {
            kind,
            line,
            column: column + 1 + e.offset,
            message: e.message.clone(),
            expected: e.expected.iter().map(|s| s.to_string()).collect(),
            level: None,
        }
    }
}

fn syntax(src: &Source, span: &Range<usize>, msg: impl Into<String>) -> SpecError {
    src.error(SpecErrorKind::Syntax, span, msg)
}

fn semantic(src: &Source, span: &Range<usize>, msg: impl Into<String>) -> SpecError {
    src.error(SpecErrorKind::Semantic, span, msg)
}

// ---------------------------------------------------------------------------
// Parsing

/// Where an expression sits inside a level spec.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum ExprPath {
    Lattice(usize, usize),
    Translation(String, usize),
    Center,
    Twist(usize),
}

struct LevelSpans {
    whole: Range<usize>,
    exprs: HashMap<ExprPath, Range<usize>>,
}

fn expr_of(src: &Source, v: &Spanned<Value>) -> std::result::Result<Expr, SpecError> {
    match v.get_ref() {
        Value::Integer(n) => Ok(Expr::int(*n)),
        Value::String(s) => Expr::parse(s).map_err(|e| src.inner_error(SpecErrorKind::Syntax, &v.span(), &e)),
        other => Err(SpecError {
            expected: vec!["integer".into(), "expression string".into()],
            ..syntax(src, &v.span(), format!("found {}", other.type_str()))
        }),
    }
}

fn convert_level(src: &Source, raw: &Spanned<RawLevel>) -> std::result::Result<(LevelSpec, LevelSpans), SpecError> {
    let r = raw.get_ref();
    let mut exprs = HashMap::new();
    let mut lattice = Vec::new();
    for (a, row) in r.lattice.iter().enumerate() {
        let mut out = Vec::new();
        for (b, v) in row.iter().enumerate() {
            out.push(expr_of(src, v)?);
            exprs.insert(ExprPath::Lattice(a, b), v.span());
        }
        lattice.push(out);
    }
    let mut translations = BTreeMap::new();
    for (k, vs) in &r.translations {
        let mut out = Vec::new();
        for (j, v) in vs.iter().enumerate() {
            out.push(expr_of(src, v)?);
            exprs.insert(ExprPath::Translation(k.clone(), j), v.span());
        }
        translations.insert(k.clone(), out);
    }
    let center = match &r.center {
        Some(v) => {
            exprs.insert(ExprPath::Center, v.span());
            Some(expr_of(src, v)?)
        }
        None => None,
    };
    let twist = match &r.twist {
        Some(vs) if vs.len() == 2 => {
            exprs.insert(ExprPath::Twist(0), vs[0].span());
            exprs.insert(ExprPath::Twist(1), vs[1].span());
            Some([expr_of(src, &vs[0])?, expr_of(src, &vs[1])?])
        }
        Some(_) => return Err(syntax(src, &raw.span(), "`twist` needs exactly two entries")),
        None => None,
    };
    let spec = LevelSpec {
        lattice,
        finite: r.finite.clone().unwrap_or_else(|| vec!["e".into()]),
        translations,
        center,
        twist,
    };
    Ok((spec, LevelSpans { whole: raw.span(), exprs }))
}

fn convert_group(src: &Source, raw: &Spanned<RawGroup>) -> std::result::Result<GroupSpec, SpecError> {
    let g = raw.get_ref();
    match g.family.get_ref().as_str() {
        "heisenberg" => {
            if g.rank.is_some() || g.finite.is_some() || g.permutations.is_some() || g.action.is_some() {
                return Err(syntax(src, &raw.span(), "the Heisenberg family takes no rank, finite part or action"));
            }
            Ok(GroupSpec::Heisenberg)
        }
        "lattice" => {
            let rank = g
                .rank
                .ok_or_else(|| syntax(src, &raw.span(), "missing field `rank`"))?;
            let finite = match (&g.finite, &g.permutations, g.degree) {
                (Some(name), None, None) => FiniteSpec::Builtin(name.clone()),
                (None, Some(gens), Some(degree)) => FiniteSpec::Permutations {
                    degree,
                    generators: gens.clone(),
                },
                (None, None, None) => FiniteSpec::Builtin("Z1".into()),
                _ => {
                    return Err(syntax(
                        src,
                        &raw.span(),
                        "give either `finite` or both `degree` and `permutations`",
                    ))
                }
            };
            let action = match &g.action {
                None => ActionSpec::Trivial,
                Some(v) => match v.get_ref() {
                    Value::String(s) if s == "trivial" => ActionSpec::Trivial,
                    Value::String(s) if s == "permutation" => ActionSpec::Permutation,
                    Value::Array(ms) => {
                        let bad = || SpecError {
                            expected: vec!["array of integer matrices".into()],
                            ..syntax(src, &v.span(), "malformed action matrices")
                        };
                        let mut out = Vec::new();
                        for m in ms {
                            let rows = m.as_array().ok_or_else(bad)?;
                            let mut mm = Vec::new();
                            for row in rows {
                                let row = row.as_array().ok_or_else(bad)?;
                                mm.push(row.iter().map(|x| x.as_integer().ok_or_else(bad)).collect::<std::result::Result<Vec<_>, _>>()?);
                            }
                            out.push(mm);
                        }
                        ActionSpec::Matrices(out)
                    }
                    _ => {
                        return Err(SpecError {
                            expected: vec!["\"trivial\"".into(), "\"permutation\"".into(), "matrix array".into()],
                            ..syntax(src, &v.span(), "unrecognized action")
                        })
                    }
                },
            };
            Ok(GroupSpec::Lattice { rank, finite, action })
        }
        other => Err(SpecError {
            expected: vec!["\"lattice\"".into(), "\"heisenberg\"".into()],
            ..syntax(src, &g.family.span(), format!("unknown family `{other}`"))
        }),
    }
}

/// Parse a chain specification; every level in the declared range is built
/// and checked.
pub fn parse_spec(text: &str) -> std::result::Result<ChainSpecDocument, SpecError> {
    let src = Source { text };
    let raw: RawDoc = toml::from_str(text).map_err(|e| {
        let span = e.span().unwrap_or(0..0);
        let (line, column) = src.position(span.start);
        SpecError {
            kind: SpecErrorKind::Syntax,
            line,
            column,
            message: e.message().trim().to_string(),
            expected: vec![],
            level: None,
        }
    })?;
    let group = convert_group(&src, &raw.group)?;
    let c = raw.chain.get_ref();
    let kind = match c.kind.get_ref().as_str() {
        "explicit" => ChainKind::Explicit,
        "parametric" => ChainKind::Parametric,
        other => {
            return Err(SpecError {
                expected: vec!["\"explicit\"".into(), "\"parametric\"".into()],
                ..syntax(&src, &c.kind.span(), format!("unknown chain kind `{other}`"))
            })
        }
    };
    let raw_levels: Vec<&Spanned<RawLevel>> = match kind {
        ChainKind::Parametric => {
            if !c.level.is_empty() {
                return Err(syntax(&src, &raw.chain.span(), "a parametric chain uses `[chain.template]`, not `[[chain.level]]`"));
            }
            vec![c
                .template
                .as_ref()
                .ok_or_else(|| syntax(&src, &raw.chain.span(), "missing table `[chain.template]`"))?]
        }
        ChainKind::Explicit => {
            if c.template.is_some() {
                return Err(syntax(&src, &raw.chain.span(), "an explicit chain lists `[[chain.level]]` tables"));
            }
            if c.level.is_empty() {
                return Err(syntax(&src, &raw.chain.span(), "an explicit chain needs at least one `[[chain.level]]`"));
            }
            c.level.iter().collect()
        }
    };
    let levels = match (kind, c.levels) {
        (ChainKind::Parametric, Some(n)) if n >= 1 => n,
        (ChainKind::Parametric, _) => return Err(syntax(&src, &raw.chain.span(), "a parametric chain needs `levels >= 1`")),
        (ChainKind::Explicit, Some(n)) if n != c.level.len() => {
            return Err(semantic(&src, &raw.chain.span(), format!("`levels = {n}` but {} levels are listed", c.level.len())))
        }
        (ChainKind::Explicit, _) => c.level.len(),
    };
    let mut level_specs = Vec::new();
    let mut spans = Vec::new();
    for r in raw_levels {
        let (s, sp) = convert_level(&src, r)?;
        level_specs.push(s);
        spans.push(sp);
    }
    let a = raw.analysis.unwrap_or_default();
    let analysis = AnalysisSpec {
        depth: a.depth,
        probe_depth: a.probe_depth,
        regularity_depth: a.regularity_depth,
        window: a.window,
        coset_cap: a.coset_cap,
        perm_cap: a.perm_cap,
        kernel: a.kernel.iter().map(|k| k.get_ref().clone()).collect(),
        reports: a.reports.iter().map(|r| r.get_ref().clone()).collect(),
    };
    for r in &a.reports {
        if !REPORT_KINDS.contains(&r.get_ref().as_str()) {
            return Err(SpecError {
                expected: REPORT_KINDS.iter().map(|k| format!("\"{k}\"")).collect(),
                ..syntax(&src, &r.span(), format!("unknown report `{}`", r.get_ref()))
            });
        }
    }
    let doc = ChainSpecDocument {
        group,
        chain: ChainSpec {
            kind,
            params: c.params.clone(),
            levels,
            distinct_primes: c.distinct_primes.clone(),
            level_specs,
        },
        analysis,
    };

    // semantic validation over the declared range
    let ctx = doc.context().map_err(|e| semantic(&src, &raw.group.span(), e.to_string()))?;
    doc.check_primes().map_err(|e| semantic(&src, &raw.chain.span(), e.to_string()))?;
    doc.build_levels_with(&ctx, levels).map_err(|f| {
        let spans = &spans[f.spec_index];
        let mut err = match &f.cause {
            Failure::Expr(path, e) => match spans.exprs.get(path) {
                Some(span) => src.inner_error(SpecErrorKind::Semantic, span, e),
                None => semantic(&src, &spans.whole, e.message.clone()),
            },
            Failure::Chain(e) => semantic(&src, &spans.whole, e.to_string()),
        };
        err.level = Some(f.level);
        err
    })?;
    for k in &a.kernel {
        parse_element(&ctx, k.get_ref()).map_err(|e| src.inner_error(SpecErrorKind::Semantic, &k.span(), &e))?;
    }
    Ok(doc)
}

// ---------------------------------------------------------------------------
// Evaluation

fn unspanned<T>(v: T) -> Spanned<T> {
    Spanned::new(0..0, v)
}

enum Failure {
    Expr(ExprPath, ExprError),
    Chain(ChainError),
}

struct LevelFailure {
    level: usize,
    spec_index: usize,
    cause: Failure,
}

impl ChainSpecDocument {
    /// The group described by the `[group]` table.
    pub fn context(&self) -> Result<GroupContext> {
        match &self.group {
            GroupSpec::Heisenberg => Ok(GroupContext::heisenberg()),
            GroupSpec::Lattice { rank, finite, action } => {
                let table = match finite {
                    FiniteSpec::Builtin(name) => FiniteGroupTable::builtin(name)?,
                    FiniteSpec::Permutations { degree, generators } => {
                        let base = FiniteGroupTable::symmetric(*degree)?;
                        let perms = generators
                            .iter()
                            .map(|g| {
                                base.element(g)
                                    .and_then(|k| base.permutation(k).map(<[usize]>::to_vec))
                                    .ok_or_else(|| ChainError::validation(format!("`{g}` is not a permutation of 0..{degree}")))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        FiniteGroupTable::from_permutations(*degree, &perms)?
                    }
                };
                match action {
                    ActionSpec::Trivial => GroupContext::direct_product(*rank, table),
                    ActionSpec::Permutation => {
                        if table.degree() != Some(*rank) {
                            return Err(ChainError::validation(
                                "a permutation action needs a permutation group of degree `rank`",
                            ));
                        }
                        GroupContext::permutation_semidirect(table)
                    }
                    ActionSpec::Matrices(ms) => {
                        let gens = table.generators().to_vec();
                        if ms.len() != gens.len() {
                            return Err(ChainError::validation(format!(
                                "{} action matrices given for {} generators of the finite part",
                                ms.len(),
                                gens.len()
                            )));
                        }
                        let mats = ms.iter().map(|m| IntMatrix::from_rows(m)).collect::<Result<Vec<_>>>()?;
                        let mut action: Vec<Option<IntMatrix>> = vec![None; table.order()];
                        action[table.identity()] = Some(IntMatrix::identity(*rank));
                        let mut queue = std::collections::VecDeque::from([table.identity()]);
                        while let Some(k) = queue.pop_front() {
                            for (g, m) in gens.iter().zip(&mats) {
                                let nk = table.mul(*g, k);
                                if action[nk].is_none() {
                                    if m.rows() != *rank || m.cols() != *rank {
                                        return Err(ChainError::validation(format!("action matrices must be {rank}x{rank}")));
                                    }
                                    action[nk] = Some(m.mul(action[k].as_ref().unwrap()));
                                    queue.push_back(nk);
                                }
                            }
                        }
                        let action = action.into_iter().map(|a| a.expect("generators generate")).collect();
                        GroupContext::lattice_semidirect(*rank, table, action)
                    }
                }
            }
        }
    }

    fn check_primes(&self) -> Result<()> {
        let primes = self
            .chain
            .distinct_primes
            .iter()
            .map(|k| {
                self.chain
                    .params
                    .get(k)
                    .map(|v| (k.clone(), *v))
                    .ok_or_else(|| ChainError::validation(format!("`distinct_primes` names unknown parameter `{k}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        check_distinct_primes(&primes)
    }

    /// The same document with some parameters replaced; unknown names are rejected.
    pub fn with_params(&self, overrides: &Params) -> Result<Self> {
        let mut doc = self.clone();
        for (k, v) in overrides {
            if !doc.chain.params.contains_key(k) {
                return Err(ChainError::validation(format!(
                    "spec has no parameter `{k}` (parameters: {})",
                    doc.chain.params.keys().cloned().collect::<Vec<_>>().join(", ")
                )));
            }
            doc.chain.params.insert(k.clone(), *v);
        }
        doc.check_primes()?;
        Ok(doc)
    }

    /// Levels that can be built: unbounded for parametric chains.
    pub fn max_depth(&self) -> Option<usize> {
        match self.chain.kind {
            ChainKind::Explicit => Some(self.chain.levels),
            ChainKind::Parametric => None,
        }
    }

    fn eval_level(&self, ctx: &GroupContext, spec: &LevelSpec, i: usize) -> std::result::Result<SubgroupData, Failure> {
        let mut env: BTreeMap<String, BigInt> = self.chain.params.iter().map(|(k, v)| (k.clone(), BigInt::from(*v))).collect();
        env.insert("i".into(), BigInt::from(i));
        let ev = |path: ExprPath, e: &Expr| e.eval(&env).map_err(|err| Failure::Expr(path, err));
        let chain_err = |m: &str| Failure::Chain(ChainError::validation(m));
        let mut rows = Vec::new();
        for (a, row) in spec.lattice.iter().enumerate() {
            let mut out = Vec::new();
            for (b, e) in row.iter().enumerate() {
                out.push(ev(ExprPath::Lattice(a, b), e)?);
            }
            rows.push(out);
        }
        if rows.len() != ctx.rank() || rows.iter().any(|r| r.len() != rows[0].len()) || rows[0].is_empty() {
            return Err(chain_err(&format!("`lattice` must have {} rows of equal nonzero length", ctx.rank())));
        }
        let matrix = IntMatrix::from_rows(&rows).map_err(Failure::Chain)?;
        let lattice = Lattice::from_matrix(&matrix).map_err(Failure::Chain)?;
        if lattice.index().is_zero() {
            return Err(chain_err("lattice does not have full rank"));
        }
        match ctx.finite() {
            Some(table) => {
                if spec.center.is_some() || spec.twist.is_some() {
                    return Err(chain_err("`center` and `twist` apply to the Heisenberg family only"));
                }
                let mut finite = Vec::new();
                let mut translations = Vec::new();
                for name in &spec.finite {
                    let k = table
                        .element(name)
                        .ok_or_else(|| chain_err(&format!("unknown finite element `{name}`")))?;
                    let t = match spec.translations.get(name) {
                        Some(es) => es
                            .iter()
                            .enumerate()
                            .map(|(j, e)| ev(ExprPath::Translation(name.clone(), j), e))
                            .collect::<std::result::Result<Vec<_>, _>>()?,
                        None => vec![BigInt::zero(); ctx.rank()],
                    };
                    finite.push(k);
                    translations.push(t);
                }
                if let Some(name) = spec.translations.keys().find(|n| !spec.finite.contains(n)) {
                    return Err(chain_err(&format!("translation given for `{name}`, which is not in `finite`")));
                }
                SubgroupData::lattice(ctx, lattice, finite, translations).map_err(Failure::Chain)
            }
            None => {
                if spec.finite != ["e"] || !spec.translations.is_empty() {
                    return Err(chain_err("the Heisenberg family has no finite part"));
                }
                let m = spec
                    .center
                    .as_ref()
                    .ok_or_else(|| chain_err("missing `center`"))
                    .and_then(|e| ev(ExprPath::Center, e))?;
                match &spec.twist {
                    None => SubgroupData::heisenberg(ctx, &matrix, m).map_err(Failure::Chain),
                    Some([t1, t2]) => {
                        let t = [ev(ExprPath::Twist(0), t1)?, ev(ExprPath::Twist(1), t2)?];
                        SubgroupData::heisenberg_twisted(lattice, m, t).map_err(Failure::Chain)
                    }
                }
            }
        }
    }

    fn build_levels_with(&self, ctx: &GroupContext, depth: usize) -> std::result::Result<Vec<SubgroupData>, LevelFailure> {
        let mut out: Vec<SubgroupData> = Vec::new();
        let mut prev_index = BigInt::from(1);
        for i in 1..=depth {
            let spec_index = match self.chain.kind {
                ChainKind::Parametric => 0,
                ChainKind::Explicit => i - 1,
            };
            let fail = |cause| LevelFailure { level: i, spec_index, cause };
            let h = self.eval_level(ctx, &self.chain.level_specs[spec_index], i).map_err(fail)?;
            if let Some(prev) = out.last() {
                if !h.is_subgroup_of(ctx, prev) {
                    return Err(fail(Failure::Chain(ChainError::validation(format!(
                        "chain is not nested: level {i} is not contained in level {}",
                        i - 1
                    )))));
                }
            }
            let idx = h.index(ctx);
            if idx <= prev_index {
                return Err(fail(Failure::Chain(ChainError::validation(format!(
                    "chain does not descend properly: index {idx} after {prev_index}"
                )))));
            }
            prev_index = idx;
            out.push(h);
        }
        Ok(out)
    }

    /// Build `depth` levels of the chain.
    pub fn build_chain(&self, depth: usize) -> Result<GroupChain> {
        if let Some(max) = self.max_depth() {
            if depth > max {
                return Err(ChainError::validation(format!("explicit chain has only {max} levels, {depth} requested")));
            }
        }
        self.check_primes()?;
        let ctx = self.context()?;
        let levels = self.build_levels_with(&ctx, depth).map_err(|f| {
            let msg = match f.cause {
                Failure::Expr(_, e) => e.to_string(),
                Failure::Chain(e) => e.to_string(),
            };
            ChainError::validation(format!("level {}: {msg}", f.level))
        })?;
        let provenance = match self.chain.kind {
            ChainKind::Explicit => Provenance::Explicit,
            ChainKind::Parametric => Provenance::Parametric {
                params: self.chain.params.iter().map(|(k, v)| (k.clone(), *v)).collect(),
            },
        };
        GroupChain::new(&ctx, levels, provenance)
    }

    pub fn kernel_generators(&self, ctx: &GroupContext) -> Result<Vec<GroupElement>> {
        self.analysis
            .kernel
            .iter()
            .map(|k| parse_element(ctx, k).map_err(|e| ChainError::validation(format!("kernel element `{k}`: {e}"))))
            .collect()
    }

    /// Analysis depth: the `[analysis]` value, else the declared level count.
    pub fn depth(&self) -> usize {
        self.analysis.depth.unwrap_or(self.chain.levels)
    }

    pub fn wants_report(&self, kind: &str) -> bool {
        self.analysis.reports.iter().any(|r| r == kind)
    }

    /// Canonical TOML: fixed key order, expressions in canonical form,
    /// literals as integers.
    pub fn to_toml(&self) -> String {
        let value = |e: &Expr| match e.as_literal().and_then(|n| n.to_i64()) {
            Some(n) => unspanned(Value::Integer(n)),
            None => unspanned(Value::String(e.to_string())),
        };
        let group = match &self.group {
            GroupSpec::Heisenberg => RawGroup {
                family: unspanned("heisenberg".into()),
                rank: None,
                finite: None,
                degree: None,
                permutations: None,
                action: None,
            },
            GroupSpec::Lattice { rank, finite, action } => {
                let (finite, degree, permutations) = match finite {
                    FiniteSpec::Builtin(n) => (Some(n.clone()), None, None),
                    FiniteSpec::Permutations { degree, generators } => (None, Some(*degree), Some(generators.clone())),
                };
                let action = match action {
                    ActionSpec::Trivial => unspanned(Value::String("trivial".into())),
                    ActionSpec::Permutation => unspanned(Value::String("permutation".into())),
                    ActionSpec::Matrices(ms) => unspanned(Value::Array(
                        ms.iter()
                            .map(|m| {
                                Value::Array(
                                    m.iter()
                                        .map(|r| Value::Array(r.iter().map(|&x| Value::Integer(x)).collect()))
                                        .collect(),
                                )
                            })
                            .collect(),
                    )),
                };
                RawGroup {
                    family: unspanned("lattice".into()),
                    rank: Some(*rank),
                    finite,
                    degree,
                    permutations,
                    action: Some(action),
                }
            }
        };
        let level = |l: &LevelSpec| {
            unspanned(RawLevel {
                lattice: l.lattice.iter().map(|r| r.iter().map(value).collect()).collect(),
                finite: match self.group {
                    GroupSpec::Heisenberg => None,
                    GroupSpec::Lattice { .. } => Some(l.finite.clone()),
                },
                translations: l
                    .translations
                    .iter()
                    .map(|(k, es)| (k.clone(), es.iter().map(value).collect()))
                    .collect(),
                center: l.center.as_ref().map(value),
                twist: l.twist.as_ref().map(|t| t.iter().map(value).collect()),
            })
        };
        let (template, levels) = match self.chain.kind {
            ChainKind::Parametric => (Some(level(&self.chain.level_specs[0])), Vec::new()),
            ChainKind::Explicit => (None, self.chain.level_specs.iter().map(level).collect()),
        };
        let a = &self.analysis;
        let analysis = RawAnalysis {
            depth: a.depth,
            probe_depth: a.probe_depth,
            regularity_depth: a.regularity_depth,
            window: a.window,
            coset_cap: a.coset_cap,
            perm_cap: a.perm_cap,
            kernel: a.kernel.iter().cloned().map(unspanned).collect(),
            reports: a.reports.iter().cloned().map(unspanned).collect(),
        };
        let raw = RawDoc {
            group: unspanned(group),
            chain: unspanned(RawChain {
                kind: unspanned(match self.chain.kind {
                    ChainKind::Explicit => "explicit".into(),
                    ChainKind::Parametric => "parametric".into(),
                }),
                levels: Some(self.chain.levels),
                params: self.chain.params.clone(),
                distinct_primes: self.chain.distinct_primes.clone(),
                template,
                level: levels,
            }),
            analysis: Some(analysis),
        };
        toml::to_string(&raw).expect("spec serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIHEDRAL: &str = r#"
[group]
family = "lattice"
rank = 1
finite = "Z2"
action = [[[-1]]]

[chain]
kind = "parametric"
levels = 4

[chain.template]
lattice = [["2^i"]]
finite = ["e", "t"]
"#;

    #[test]
    fn dihedral_template() {
        let doc = parse_spec(DIHEDRAL).unwrap();
        let chain = doc.build_chain(4).unwrap();
        let ctx = chain.context();
        let idx: Vec<String> = chain.levels().iter().map(|h| h.index(ctx).to_string()).collect();
        assert_eq!(idx, ["2", "4", "8", "16"]);
        assert_eq!(parse_spec(&doc.to_toml()).unwrap(), doc);
    }

    #[test]
    fn syntax_errors_have_positions() {
        let e = parse_spec("[group]\nfamily = \"lattice\"\nrank = 1\n[chain]\n").unwrap_err();
        assert_eq!(e.kind, SpecErrorKind::Syntax);
        assert!(e.message.contains("kind"), "{e}");

        let bad = DIHEDRAL.replace("\"2^i\"", "\"2^*i\"");
        let e = parse_spec(&bad).unwrap_err();
        assert_eq!(e.kind, SpecErrorKind::Syntax);
        assert_eq!((e.line, e.column), (13, 16));
        assert!(e.expected.contains(&"integer".to_string()));

        let e = parse_spec(&DIHEDRAL.replace("lattice\"", "lattic\"")).unwrap_err();
        assert_eq!((e.kind, e.line, e.column), (SpecErrorKind::Syntax, 3, 10));
    }

    #[test]
    fn semantic_errors_name_the_level() {
        let e = parse_spec(&DIHEDRAL.replace("\"2^i\"", "\"2^(3-i)\"")).unwrap_err();
        assert_eq!(e.kind, SpecErrorKind::Semantic);
        assert_eq!(e.level, Some(2));
        let e = parse_spec(&DIHEDRAL.replace("\"2^i\"", "\"2^(i-4)\"")).unwrap_err();
        assert_eq!(e.level, Some(1));
        assert!(e.message.contains("negative exponent"));
        assert_eq!(e.line, 13);
        let e = parse_spec(&DIHEDRAL.replace("\"2^i\"", "\"r^i\"")).unwrap_err();
        assert!(e.message.contains("`r`"));
        let e = parse_spec(&DIHEDRAL.replace("[\"2^i\"]", "[\"3^i\"]").replace("[[[-1]]]", "[[[1]]]").replace("\"t\"]", "\"t\"]\ntranslations = { t = [1] }")).unwrap_err();
        assert_eq!(e.level, Some(1));
    }

    #[test]
    fn equal_primes_are_rejected() {
        let text = r#"
[group]
family = "heisenberg"

[chain]
kind = "parametric"
levels = 2
params = { p = 2, q = 2 }
distinct_primes = ["p", "q"]

[chain.template]
lattice = [["p^i", 0], [0, "q^i"]]
center = "p^i"
"#;
        let e = parse_spec(text).unwrap_err();
        assert_eq!(e.kind, SpecErrorKind::Semantic);
        assert!(e.message.contains("primes must be distinct"));
        let ok = parse_spec(&text.replace("q = 2", "q = 3")).unwrap();
        let mut set = Params::new();
        set.insert("q".into(), 2);
        let e = ok.with_params(&set).unwrap_err();
        assert!(e.to_string().contains("primes must be distinct"));
        set.insert("r".into(), 5);
        assert!(ok.with_params(&set).is_err());
    }

    #[test]
    fn explicit_levels() {
        let text = DIHEDRAL
            .replace("kind = \"parametric\"\nlevels = 4", "kind = \"explicit\"")
            .replace("[chain.template]\nlattice = [[\"2^i\"]]", "[[chain.level]]\nlattice = [[2]]")
            + "\n[[chain.level]]\nlattice = [[3]]\nfinite = [\"e\", \"t\"]\n";
        let e = parse_spec(&text).unwrap_err();
        assert_eq!(e.level, Some(2));
        assert!(e.message.contains("not nested"), "{e}");
        let fixed = text.replace("[[3]]", "[[4]]");
        let doc = parse_spec(&fixed).unwrap();
        assert_eq!(doc.chain.levels, 2);
        assert!(doc.build_chain(3).is_err());
        assert_eq!(parse_spec(&doc.to_toml()).unwrap(), doc);
    }
}
