//! The problem file: a TOML document with named algebras, twists, resolutions and products,
//! and an ordered task list. See the README for the full grammar.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;
use std::sync::Arc;

use serde::Deserialize;
use toml::Spanned;

use crate::algebra::{parse_element, parse_tensor, Algebra, Element, Monomial};
use crate::kernel::Field;
use crate::resolutions::LiftSide;
use crate::twist::{Tensor, TwistMap};
use crate::Error;

pub const DEFAULT_CUTOFF: u32 = 4;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    field: Option<Spanned<i64>>,
    seed: Option<Spanned<i64>>,
    cutoff: Option<Spanned<i64>>,
    #[serde(default)]
    algebras: BTreeMap<String, Spanned<RawAlgebra>>,
    #[serde(default)]
    twists: BTreeMap<String, Spanned<RawTwist>>,
    #[serde(default)]
    resolutions: BTreeMap<String, Spanned<RawResolution>>,
    #[serde(default)]
    products: BTreeMap<String, Spanned<RawProduct>>,
    #[serde(default)]
    tasks: Vec<Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebra {
    kind: Spanned<String>,
    #[serde(default)]
    generators: Vec<Spanned<String>>,
    order: Option<Spanned<i64>>,
    #[serde(default)]
    delta: Vec<RawDelta>,
}

/// `δ_var(of) = value`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDelta {
    var: Spanned<String>,
    of: Spanned<String>,
    value: Spanned<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTwist {
    kind: Spanned<String>,
    left: Spanned<String>,
    right: Spanned<String>,
    #[serde(default)]
    delta: Vec<Spanned<String>>,
    #[serde(default)]
    action: Vec<Spanned<String>>,
    #[serde(default)]
    table: Vec<RawTableEntry>,
}

/// `τ(b⊗a) = value`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTableEntry {
    b: Spanned<String>,
    a: Spanned<String>,
    value: Spanned<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawResolution {
    algebra: Spanned<String>,
    family: Spanned<String>,
    n_max: Option<Spanned<i64>>,
    label_cutoff: Option<Spanned<i64>>,
    lift: Option<RawLift>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLift {
    twist: Spanned<String>,
    side: Spanned<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProduct {
    kind: Spanned<String>,
    left: Option<Spanned<String>>,
    right: Option<Spanned<String>>,
    twist: Option<Spanned<String>>,
    flatten: Option<Spanned<String>>,
    base: Option<Spanned<String>>,
    #[serde(default)]
    delta: Vec<Spanned<String>>,
    var: Option<Spanned<String>>,
}

#[derive(Clone, Debug)]
pub struct AlgebraDef {
    pub algebra: Arc<Algebra>,
    /// `polynomial`, `ore` or `cyclic`.
    pub kind: String,
}

#[derive(Clone, Debug)]
pub struct TwistDef {
    pub twist: Arc<TwistMap>,
    pub kind: String,
    pub left: String,
    pub right: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolutionFamily {
    Bar,
    ReducedBar,
    Koszul,
    OneSidedKoszul,
    OreKoszul,
    Periodic,
}

const FAMILIES: [(ResolutionFamily, &str); 6] = [
    (ResolutionFamily::Bar, "bar"),
    (ResolutionFamily::ReducedBar, "reduced-bar"),
    (ResolutionFamily::Koszul, "koszul"),
    (ResolutionFamily::OneSidedKoszul, "one-sided-koszul"),
    (ResolutionFamily::OreKoszul, "ore-koszul"),
    (ResolutionFamily::Periodic, "periodic"),
];

impl ResolutionFamily {
    fn parse(s: &str) -> Option<Self> {
        FAMILIES.iter().find(|(_, n)| *n == s).map(|(f, _)| *f)
    }

    pub fn name(self) -> &'static str {
        FAMILIES.iter().find(|(f, _)| *f == self).map(|(_, n)| *n).unwrap()
    }
}

#[derive(Clone, Debug)]
pub struct ResolutionDef {
    pub algebra: String,
    pub family: ResolutionFamily,
    /// Bar and periodic families: last homological degree built.
    pub n_max: usize,
    /// Bar families: largest middle-label degree enumerated.
    pub label_cutoff: u32,
    pub lift: Option<(String, LiftSide)>,
}

#[derive(Clone, Debug)]
pub enum ProductDef {
    /// Total complex of two resolutions under a twist (both bimodule, or both one-sided).
    Twisted { bimodule: bool, left: String, right: String, twist: String, flatten: Option<String> },
    /// Resolution of `k` over `R[var; δ]` from a one-sided resolution of `k` over `R`.
    OreModule { base: String, delta: Vec<Element>, var: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preset {
    Weyl,
    WeylN(usize),
    Skew(u64),
    UeSolvable2dim,
    Heisenberg,
    Cyclic(u64),
    Flip,
    LieSl2Excluded,
}

pub const PRESET_NAMES: &[&str] =
    &["weyl", "weyl-n", "skew-p2", "skew-p3", "ue-solvable-2dim", "heisenberg", "cyclic-p", "flip", "lie-sl2-excluded"];

impl Preset {
    pub fn parse(s: &str) -> Option<Preset> {
        Some(match s {
            "weyl" | "weyl-1" => Preset::Weyl,
            "weyl-n" | "weyl-2" => Preset::WeylN(2),
            "skew-p2" => Preset::Skew(2),
            "skew-p3" => Preset::Skew(3),
            "ue-solvable-2dim" => Preset::UeSolvable2dim,
            "heisenberg" => Preset::Heisenberg,
            "cyclic-p" => Preset::Cyclic(3),
            "flip" => Preset::Flip,
            "lie-sl2-excluded" => Preset::LieSl2Excluded,
            _ => {
                let p: u64 = s.strip_prefix("cyclic-")?.parse().ok()?;
                Preset::Cyclic(p)
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Task {
    CheckTwist(String),
    VerifyResolution(String),
    TwistedProduct(String),
    Hochschild(String),
    TorExt(String),
    Preset(Preset),
}

impl Task {
    /// `kind:name`, e.g. `hochschild:PW` or `preset:weyl`.
    pub fn parse(s: &str) -> Result<Task, Error> {
        let (kind, name) = s.split_once(':').ok_or_else(|| Error::Validation(format!("task '{s}' must have the form kind:name")))?;
        let name = name.trim().to_string();
        if name.is_empty() {
            return Err(Error::Validation(format!("task '{s}' names no target")));
        }
        Ok(match kind.trim() {
            "check-twist" => Task::CheckTwist(name),
            "verify-resolution" => Task::VerifyResolution(name),
            "twisted-product" => Task::TwistedProduct(name),
            "hochschild" => Task::Hochschild(name),
            "tor-ext" => Task::TorExt(name),
            "preset" => Task::Preset(
                Preset::parse(&name)
                    .ok_or_else(|| Error::Validation(format!("unknown preset '{name}' (known: {})", PRESET_NAMES.join(", "))))?,
            ),
            k => return Err(Error::Validation(format!("unknown task kind '{k}'"))),
        })
    }

    pub fn target(&self) -> Option<&str> {
        match self {
            Task::CheckTwist(n) | Task::VerifyResolution(n) | Task::TwistedProduct(n) | Task::Hochschild(n) | Task::TorExt(n) => Some(n),
            Task::Preset(_) => None,
        }
    }
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Task::CheckTwist(n) => write!(f, "check-twist:{n}"),
            Task::VerifyResolution(n) => write!(f, "verify-resolution:{n}"),
            Task::TwistedProduct(n) => write!(f, "twisted-product:{n}"),
            Task::Hochschild(n) => write!(f, "hochschild:{n}"),
            Task::TorExt(n) => write!(f, "tor-ext:{n}"),
            Task::Preset(p) => {
                let name = match p {
                    Preset::Weyl => "weyl".to_string(),
                    Preset::WeylN(n) => format!("weyl-{n}"),
                    Preset::Skew(p) => format!("skew-p{p}"),
                    Preset::UeSolvable2dim => "ue-solvable-2dim".into(),
                    Preset::Heisenberg => "heisenberg".into(),
                    Preset::Cyclic(p) => format!("cyclic-{p}"),
                    Preset::Flip => "flip".into(),
                    Preset::LieSl2Excluded => "lie-sl2-excluded".into(),
                };
                write!(f, "preset:{name}")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProblemConfig {
    pub field: Field,
    pub seed: u64,
    /// Truncation degree `N` for exactness windows and cohomology.
    pub cutoff: u32,
    pub algebras: BTreeMap<String, AlgebraDef>,
    pub twists: BTreeMap<String, TwistDef>,
    pub resolutions: BTreeMap<String, ResolutionDef>,
    pub products: BTreeMap<String, ProductDef>,
    pub tasks: Vec<Task>,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        ProblemConfig {
            field: Field::RATIONALS,
            seed: DEFAULT_SEED,
            cutoff: DEFAULT_CUTOFF,
            algebras: BTreeMap::new(),
            twists: BTreeMap::new(),
            resolutions: BTreeMap::new(),
            products: BTreeMap::new(),
            tasks: Vec::new(),
        }
    }
}

/// 1-based line and column (in characters) of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let start = before.rfind('\n').map_or(0, |i| i + 1);
    (line, before[start..].chars().count() + 1)
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn at(&self, span: Range<usize>, e: Error) -> Error {
        let (l, c) = line_col(self.text, span.start);
        e.located(l, c)
    }

    fn invalid<T>(&self, span: Range<usize>, msg: impl Into<String>) -> Result<T, Error> {
        Err(self.at(span, Error::Validation(msg.into())))
    }

    /// Errors inside a quoted string are positioned relative to its first character.
    fn inner<T>(&self, s: &Spanned<String>, r: Result<T, Error>) -> Result<T, Error> {
        let span = s.span();
        let quote = usize::from(self.text[span.clone()].starts_with(['"', '\'']));
        r.map_err(|e| self.at(span.start + quote..span.end, e))
    }

    fn element(&self, alg: &Algebra, s: &Spanned<String>) -> Result<Element, Error> {
        self.inner(s, parse_element(alg, s.get_ref()))
    }

    fn monomial(&self, alg: &Algebra, s: &Spanned<String>) -> Result<Monomial, Error> {
        let e = self.element(alg, s)?;
        let mono = match e.iter().next() {
            Some((m, c)) if e.len() == 1 && c.is_one() => Some(m.clone()),
            _ => None,
        };
        mono.map_or_else(|| self.invalid(s.span(), format!("'{}' is not a single basis monomial", s.get_ref())), Ok)
    }

    fn positive(&self, v: &Spanned<i64>, what: &str) -> Result<u32, Error> {
        match u32::try_from(*v.get_ref()) {
            Ok(n) if n >= 1 => Ok(n),
            _ => self.invalid(v.span(), format!("{what} must be a positive integer (got {})", v.get_ref())),
        }
    }
}

/// Parses and validates a problem file.
pub fn parse_config(text: &str) -> Result<ProblemConfig, Error> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        Error::Parse { line, column, message: e.message().trim().to_string() }
    })?;
    let cx = Ctx { text };
    let mut cfg = ProblemConfig::default();

    if let Some(f) = &raw.field {
        let p = u64::try_from(*f.get_ref()).map_err(|_| cx.at(f.span(), Error::Validation("negative characteristic".into())))?;
        cfg.field = Field::new(p).map_err(|e| cx.at(f.span(), e))?;
    }
    if let Some(s) = &raw.seed {
        cfg.seed = u64::try_from(*s.get_ref()).map_err(|_| cx.at(s.span(), Error::Validation("seed must be non-negative".into())))?;
    }
    if let Some(c) = &raw.cutoff {
        cfg.cutoff = cx.positive(c, "cutoff")?;
    }
    let field = cfg.field;

    for (name, a) in &raw.algebras {
        let def = algebra_def(&cx, field, a)?;
        cfg.algebras.insert(name.clone(), def);
    }
    let algebra = |s: &Spanned<String>| -> Result<&AlgebraDef, Error> {
        cfg.algebras.get(s.get_ref()).ok_or_else(|| cx.at(s.span(), Error::Validation(format!("unknown algebra '{}'", s.get_ref()))))
    };

    let mut twists = BTreeMap::new();
    for (name, st) in &raw.twists {
        let t = st.get_ref();
        let (l, r) = (algebra(&t.left)?, algebra(&t.right)?);
        let twist = twist_def(&cx, st, l, r)?;
        twists.insert(
            name.clone(),
            TwistDef { twist, kind: t.kind.get_ref().clone(), left: t.left.get_ref().clone(), right: t.right.get_ref().clone() },
        );
    }

    let mut resolutions = BTreeMap::new();
    for (name, r) in &raw.resolutions {
        let r = r.get_ref();
        let alg = algebra(&r.algebra)?;
        let family = ResolutionFamily::parse(r.family.get_ref())
            .map_or_else(|| cx.invalid(r.family.span(), format!("unknown resolution family '{}'", r.family.get_ref())), Ok)?;
        if family == ResolutionFamily::Periodic && alg.kind != "cyclic" {
            return cx.invalid(r.family.span(), "the periodic family needs a cyclic group algebra");
        }
        let n_max = match &r.n_max {
            Some(n) => cx.positive(n, "n_max")? as usize,
            None => 3,
        };
        let label_cutoff = match &r.label_cutoff {
            Some(n) => cx.positive(n, "label_cutoff")?,
            None => cfg.cutoff,
        };
        let lift = match &r.lift {
            None => None,
            Some(l) => {
                let Some(td) = twists.get(l.twist.get_ref()) else {
                    return cx.invalid(l.twist.span(), format!("unknown twist '{}'", l.twist.get_ref()));
                };
                let side = match l.side.get_ref().as_str() {
                    "left" => LiftSide::Left,
                    "right" => LiftSide::Right,
                    s => return cx.invalid(l.side.span(), format!("lift side must be left or right (got '{s}')")),
                };
                let own = if side == LiftSide::Left { &td.left } else { &td.right };
                if own != r.algebra.get_ref() {
                    return cx.invalid(
                        l.twist.span(),
                        format!("a {} lift of '{}' needs a resolution over '{own}'", l.side.get_ref(), l.twist.get_ref()),
                    );
                }
                Some((l.twist.get_ref().clone(), side))
            }
        };
        resolutions.insert(name.clone(), ResolutionDef { algebra: r.algebra.get_ref().clone(), family, n_max, label_cutoff, lift });
    }

    // products may build on resolutions or on earlier-declared ore-module products
    let mut products: BTreeMap<String, ProductDef> = BTreeMap::new();
    let mut names_of: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (name, r) in &resolutions {
        names_of.insert(name.clone(), cfg.algebras[&r.algebra].algebra.generator_names());
    }
    let mut pending: Vec<(&String, &Spanned<RawProduct>)> = raw.products.iter().collect();
    while !pending.is_empty() {
        let before = pending.len();
        let mut rest = Vec::new();
        for (name, sp) in pending {
            if resolutions.contains_key(name) {
                return cx.invalid(sp.span(), format!("'{name}' is declared both as a resolution and as a product"));
            }
            match product_def(&cx, field, sp, &resolutions, &twists, &cfg.algebras, &names_of)? {
                Some((def, names)) => {
                    if let Some(n) = names {
                        names_of.insert(name.clone(), n);
                    }
                    products.insert(name.clone(), def);
                }
                None => rest.push((name, sp)),
            }
        }
        if rest.len() == before {
            let (name, sp) = rest[0];
            let p = sp.get_ref();
            let what = p.base.as_ref().or(p.left.as_ref()).map_or(name.as_str(), |s| s.get_ref().as_str());
            return cx.invalid(sp.span(), format!("product '{name}' refers to an unknown or cyclic input '{what}'"));
        }
        pending = rest;
    }

    let mut tasks = Vec::new();
    for t in &raw.tasks {
        let task = Task::parse(t.get_ref()).map_err(|e| cx.at(t.span(), e))?;
        check_target(&task, &twists, &resolutions, &products).map_err(|e| cx.at(t.span(), e))?;
        tasks.push(task);
    }

    cfg.twists = twists;
    cfg.resolutions = resolutions;
    cfg.products = products;
    cfg.tasks = tasks;
    Ok(cfg)
}

/// Checks that a task's target exists and has the right kind.
pub fn check_target(
    task: &Task,
    twists: &BTreeMap<String, TwistDef>,
    resolutions: &BTreeMap<String, ResolutionDef>,
    products: &BTreeMap<String, ProductDef>,
) -> Result<(), Error> {
    let complex = |n: &str| resolutions.contains_key(n) || products.contains_key(n);
    let ok = match task {
        Task::CheckTwist(n) => twists.contains_key(n),
        Task::TwistedProduct(n) => products.contains_key(n),
        Task::VerifyResolution(n) | Task::Hochschild(n) | Task::TorExt(n) => complex(n),
        Task::Preset(_) => true,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Validation(format!("task '{task}' refers to an unknown target")))
    }
}

fn algebra_def(cx: &Ctx, field: Field, sa: &Spanned<RawAlgebra>) -> Result<AlgebraDef, Error> {
    let a = sa.get_ref();
    let kind = a.kind.get_ref().as_str();
    let names: Vec<&str> = a.generators.iter().map(|g| g.get_ref().as_str()).collect();
    let mut seen = BTreeSet::new();
    for g in &a.generators {
        let s = g.get_ref();
        let ok = s.chars().next().is_some_and(|c| c.is_alphabetic()) && s.chars().all(|c| c.is_alphanumeric() || c == '_');
        if !ok {
            return cx.invalid(g.span(), format!("generator name '{s}' must be alphanumeric and start with a letter"));
        }
        if !seen.insert(s) {
            return cx.invalid(g.span(), format!("generator '{s}' declared twice"));
        }
    }
    let need_generators = || if names.is_empty() { cx.invalid(sa.span(), format!("a {kind} algebra needs generators")) } else { Ok(()) };
    let algebra = match kind {
        "polynomial" => {
            need_generators()?;
            if !a.delta.is_empty() {
                return cx.invalid(a.kind.span(), "a polynomial algebra takes no delta table (use kind = \"ore\")");
            }
            Algebra::polynomial(field, &names)
        }
        "ore" => {
            need_generators()?;
            let poly = Algebra::polynomial(field, &names);
            let index = |s: &Spanned<String>| {
                names
                    .iter()
                    .position(|n| n == s.get_ref())
                    .ok_or_else(|| cx.at(s.span(), Error::UnknownGenerator(format!("'{}' is not a declared generator", s.get_ref()))))
            };
            let mut table = Vec::new();
            let mut entries = BTreeSet::new();
            for d in &a.delta {
                let (j, i) = (index(&d.var)?, index(&d.of)?);
                if !entries.insert((j, i)) {
                    return cx.invalid(d.of.span(), format!("delta_{}({}) given twice", d.var.get_ref(), d.of.get_ref()));
                }
                let value = cx.element(&poly, &d.value)?;
                if i >= j {
                    return cx.invalid(
                        d.of.span(),
                        format!("delta_{}({}): derivations act only on earlier generators", d.var.get_ref(), d.of.get_ref()),
                    );
                }
                // run the filtered-condition check entry by entry to locate the offender
                Algebra::iterated_ore(field, &names, vec![(j, i, value.clone())]).map_err(|e| cx.at(d.value.span(), e))?;
                table.push((j, i, value));
            }
            Algebra::iterated_ore(field, &names, table).map_err(|e| cx.at(sa.span(), e))?
        }
        "cyclic" => {
            let Some(order) = &a.order else {
                return cx.invalid(sa.span(), "a cyclic algebra needs an order");
            };
            if !a.generators.is_empty() || !a.delta.is_empty() {
                return cx.invalid(a.kind.span(), "a cyclic algebra takes only an order (its generator is g)");
            }
            let n = cx.positive(order, "order")?;
            Algebra::cyclic_group(field, n).map_err(|e| cx.at(order.span(), e))?
        }
        k => return cx.invalid(a.kind.span(), format!("unknown algebra kind '{k}' (polynomial, ore, cyclic)")),
    };
    Ok(AlgebraDef { algebra, kind: kind.to_string() })
}

fn twist_def(cx: &Ctx, st: &Spanned<RawTwist>, l: &AlgebraDef, r: &AlgebraDef) -> Result<Arc<TwistMap>, Error> {
    let t = st.get_ref();
    let (a, b) = (l.algebra.clone(), r.algebra.clone());
    let unused =
        |v: bool, what: &str| if v { cx.invalid(t.kind.span(), format!("a {} twist takes no {what}", t.kind.get_ref())) } else { Ok(()) };
    match t.kind.get_ref().as_str() {
        "flip" => {
            unused(!t.delta.is_empty(), "delta")?;
            unused(!t.action.is_empty(), "action")?;
            unused(!t.table.is_empty(), "table")?;
            TwistMap::flip(a, b).map_err(|e| cx.at(st.span(), e))
        }
        "ore" => {
            unused(!t.action.is_empty(), "action")?;
            unused(!t.table.is_empty(), "table")?;
            let delta = t.delta.iter().map(|s| cx.element(&a, s)).collect::<Result<Vec<_>, _>>()?;
            TwistMap::ore(a, b, delta).map_err(|e| cx.at(st.span(), e))
        }
        "skew-group" => {
            unused(!t.delta.is_empty(), "delta")?;
            unused(!t.table.is_empty(), "table")?;
            let action = t.action.iter().map(|s| cx.element(&b, s)).collect::<Result<Vec<_>, _>>()?;
            TwistMap::skew_group(a, b, action).map_err(|e| cx.at(st.span(), e))
        }
        "table" => {
            unused(!t.delta.is_empty(), "delta")?;
            unused(!t.action.is_empty(), "action")?;
            let mut table: BTreeMap<(Monomial, Monomial), Tensor> = BTreeMap::new();
            for e in &t.table {
                let key = (cx.monomial(&b, &e.b)?, cx.monomial(&a, &e.a)?);
                let value = cx.inner(&e.value, parse_tensor(&a, &b, e.value.get_ref()))?;
                if table.insert(key, value).is_some() {
                    return cx.invalid(e.b.span(), "table entry given twice");
                }
            }
            TwistMap::custom(a, b, table).map_err(|e| cx.at(st.span(), e))
        }
        k => cx.invalid(t.kind.span(), format!("unknown twist kind '{k}' (flip, ore, skew-group, table)")),
    }
}

type ProductOut = Option<(ProductDef, Option<Vec<String>>)>;

/// `Ok(None)` when an input product has not been processed yet.
fn product_def(
    cx: &Ctx,
    field: Field,
    sp: &Spanned<RawProduct>,
    resolutions: &BTreeMap<String, ResolutionDef>,
    twists: &BTreeMap<String, TwistDef>,
    algebras: &BTreeMap<String, AlgebraDef>,
    names_of: &BTreeMap<String, Vec<String>>,
) -> Result<ProductOut, Error> {
    let p = sp.get_ref();
    let need = |f: &Option<Spanned<String>>, what: &str| -> Result<Spanned<String>, Error> {
        f.clone().ok_or_else(|| cx.at(sp.span(), Error::Validation(format!("a {} product needs '{what}'", p.kind.get_ref()))))
    };
    match p.kind.get_ref().as_str() {
        kind @ ("bimodule" | "one-sided") => {
            let (l, r, t) = (need(&p.left, "left")?, need(&p.right, "right")?, need(&p.twist, "twist")?);
            let Some(td) = twists.get(t.get_ref()) else {
                return cx.invalid(t.span(), format!("unknown twist '{}'", t.get_ref()));
            };
            for (side, own) in [(&l, &td.left), (&r, &td.right)] {
                let Some(res) = resolutions.get(side.get_ref()) else {
                    return cx.invalid(side.span(), format!("unknown resolution '{}'", side.get_ref()));
                };
                if &res.algebra != own {
                    return cx.invalid(side.span(), format!("'{}' must resolve '{own}' for twist '{}'", side.get_ref(), t.get_ref()));
                }
            }
            if let Some(f) = &p.flatten {
                if !algebras.contains_key(f.get_ref()) {
                    return cx.invalid(f.span(), format!("unknown algebra '{}'", f.get_ref()));
                }
            }
            Ok(Some((
                ProductDef::Twisted {
                    bimodule: kind == "bimodule",
                    left: l.get_ref().clone(),
                    right: r.get_ref().clone(),
                    twist: t.get_ref().clone(),
                    flatten: p.flatten.as_ref().map(|f| f.get_ref().clone()),
                },
                None,
            )))
        }
        "ore-module" => {
            let (base, var) = (need(&p.base, "base")?, need(&p.var, "var")?);
            let Some(names) = names_of.get(base.get_ref()) else {
                return Ok(None);
            };
            if names.contains(var.get_ref()) {
                return cx.invalid(var.span(), format!("variable '{}' is already a generator of the base", var.get_ref()));
            }
            let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            let r = Algebra::polynomial(field, &refs);
            let delta = p.delta.iter().map(|s| cx.element(&r, s)).collect::<Result<Vec<_>, _>>()?;
            if delta.len() != names.len() {
                return cx.invalid(
                    sp.span(),
                    format!("one delta value per base generator is required ({} given, {} needed)", delta.len(), names.len()),
                );
            }
            for (s, d) in p.delta.iter().zip(&delta) {
                for m in d.keys() {
                    if m.exps().iter().sum::<u32>() > 1 {
                        return cx.invalid(
                            s.span(),
                            format!("delta value '{}' for {} violates the filtered condition", s.get_ref(), var.get_ref()),
                        );
                    }
                }
            }
            let mut all = names.clone();
            all.push(var.get_ref().clone());
            Ok(Some((ProductDef::OreModule { base: base.get_ref().clone(), delta, var: var.get_ref().clone() }, Some(all))))
        }
        k => cx.invalid(p.kind.span(), format!("unknown product kind '{k}' (bimodule, one-sided, ore-module)")),
    }
}
