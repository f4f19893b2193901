//! Spec files: a TOML tree of named contexts, models, groups, families,
//! representations and pseudorepresentations, plus default audit
//! parameters. Cross-references are resolved and every block is validated
//! at load time; failures carry a line and column.

use std::collections::BTreeMap;
use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::{Error, Result};
use crate::family::{RepFamily, trace_of_word};
use crate::group::GroupPresentation;
use crate::linalg::Matrix;
use crate::padic::{PadicContext, PadicElement, PadicNumber};
use crate::pseudorep::{from_family_trace, from_rep_trace, PseudoRep2};
use crate::series::{parse_number, parse_series, AdicSeries, AlgebraModel};
use crate::lattice::IntegralRep;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextBlock {
    pub p: u64,
    pub precision: u32,
    /// Degree of the unramified part.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<usize>,
    /// Eisenstein polynomial over Z, low to high, monic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eisenstein: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    /// "disc", "annulus" or "cover".
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<Spanned<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bounded: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub open: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_cap: Option<u32>,
    /// Annulus ζ1·ζ2 = π^m.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    /// Cover Y^d = g over a disc model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Spanned<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variable: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupBlock {
    /// "free", "cyclic", "symmetric", "dihedral" or "permutations".
    pub kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub permutations: Vec<Vec<usize>>,
}

pub type Images = BTreeMap<String, Vec<Vec<String>>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyBlock {
    pub group: Spanned<String>,
    pub model: Spanned<String>,
    pub images: Spanned<Images>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepBlock {
    pub group: Spanned<String>,
    pub context: Spanned<String>,
    pub images: Spanned<Images>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PseudorepBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Spanned<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rep: Option<Spanned<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Spanned<String>>,
    /// Coefficient context of an explicit table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<Spanned<String>>,
    /// Coefficient model of an explicit table of series.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<Spanned<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Spanned<BTreeMap<String, String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word_cap: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<String>>,
    /// "wide_open" or "affinoid".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    /// (e, f) pairs of relative degrees.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extensions: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
}

/// The file as written.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub context: BTreeMap<String, ContextBlock>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub model: BTreeMap<String, ModelBlock>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub group: BTreeMap<String, GroupBlock>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub family: BTreeMap<String, FamilyBlock>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub rep: BTreeMap<String, RepBlock>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub pseudorep: BTreeMap<String, PseudorepBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditBlock>,
}

/// A representation with possibly non-integral generator images.
#[derive(Debug, Clone)]
pub struct RepData {
    pub group: Arc<GroupPresentation>,
    pub ctx: Arc<PadicContext>,
    pub gens: Vec<Matrix<PadicNumber>>,
}

impl RepData {
    /// The representation over O_E, if every entry is integral.
    pub fn integral(&self) -> Result<IntegralRep> {
        let gens = self
            .gens
            .iter()
            .map(|m| m.try_map(|x| x.to_integral()))
            .collect::<Result<Vec<_>>>()?;
        IntegralRep::new(self.group.clone(), &self.ctx, gens)
    }
}

#[derive(Debug, Clone)]
pub enum PseudoData {
    Padic(PseudoRep2<PadicElement>),
    Series(PseudoRep2<AdicSeries>),
}

/// A loaded spec with every block resolved.
#[derive(Debug, Clone)]
pub struct Spec {
    pub file: SpecFile,
    pub contexts: BTreeMap<String, Arc<PadicContext>>,
    pub models: BTreeMap<String, Arc<AlgebraModel>>,
    pub groups: BTreeMap<String, Arc<GroupPresentation>>,
    pub families: BTreeMap<String, RepFamily>,
    pub reps: BTreeMap<String, RepData>,
    pub pseudoreps: BTreeMap<String, PseudoData>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(offset, |i| offset - i - 1) + 1;
    (line, col)
}

struct Locator<'a> {
    text: &'a str,
}

impl Locator<'_> {
    fn at(&self, span: Range<usize>, message: impl Into<String>) -> Error {
        let (line, column) = line_col(self.text, span.start);
        Error::Spec {
            line,
            column,
            message: message.into(),
        }
    }

    /// Re-raises a library error at a location.
    fn wrap<T>(&self, span: Range<usize>, what: &str, r: Result<T>) -> Result<T> {
        r.map_err(|e| self.at(span, format!("{what}: {e}")))
    }

    fn header(&self, section: &str, name: &str) -> Range<usize> {
        for pat in [format!("[{section}.{name}]"), format!("[{section}.\"{name}\"]"), format!("{section}.{name}")] {
            if let Some(i) = self.text.find(&pat) {
                return i..i + pat.len();
            }
        }
        0..0
    }

    fn lookup<'m, T>(&self, map: &'m BTreeMap<String, T>, r: &Spanned<String>, what: &str) -> Result<&'m T> {
        map.get(r.get_ref())
            .ok_or_else(|| self.at(r.span(), format!("unresolved reference: no {what} named {:?}", r.get_ref())))
    }
}

/// Parses only the TOML layer.
pub fn parse_spec_file(text: &str) -> Result<SpecFile> {
    toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        Error::Spec {
            line,
            column,
            message: e.message().to_string(),
        }
    })
}

/// Prints a spec file back to TOML.
pub fn print_spec(file: &SpecFile) -> Result<String> {
    toml::to_string(file).map_err(|e| Error::arg(format!("cannot print spec: {e}")))
}

fn build_context(b: &ContextBlock, precision: Option<u32>) -> Result<Arc<PadicContext>> {
    let prec = precision.unwrap_or(b.precision);
    match (b.f.unwrap_or(1), &b.eisenstein) {
        (1, None) => PadicContext::qp(b.p, prec),
        (f, None) => PadicContext::unramified(b.p, f, prec),
        (1, Some(eis)) => PadicContext::eisenstein(b.p, eis, prec),
        _ => Err(Error::Unsupported("contexts with both f > 1 and an Eisenstein polynomial".into())),
    }
}

fn build_group(b: &GroupBlock) -> Result<GroupPresentation> {
    let names: Vec<&str> = b.generators.iter().map(String::as_str).collect();
    let order = || b.order.ok_or_else(|| Error::arg(format!("{} groups need an order", b.kind)));
    match b.kind.as_str() {
        "free" => GroupPresentation::free(&names),
        "cyclic" => GroupPresentation::cyclic(order()?),
        "symmetric" => GroupPresentation::symmetric(order()?),
        "dihedral" => GroupPresentation::dihedral(order()?),
        "permutations" => GroupPresentation::from_permutations(&names, &b.permutations),
        k => Err(Error::arg(format!("unknown group kind {k:?}"))),
    }
}

fn ordered_images<'a>(group: &GroupPresentation, images: &'a Images) -> Result<Vec<&'a Vec<Vec<String>>>> {
    for k in images.keys() {
        if !group.generators().contains(k) {
            return Err(Error::arg(format!("{k:?} is not a generator")));
        }
    }
    group
        .generators()
        .iter()
        .map(|g| images.get(g).ok_or_else(|| Error::arg(format!("no image for generator {g:?}"))))
        .collect()
}

/// Parses and validates a spec. `precision` overrides every context's
/// precision.
pub fn load_spec(text: &str, precision: Option<u32>) -> Result<Spec> {
    let file = parse_spec_file(text)?;
    let loc = Locator { text };
    let mut spec = Spec {
        file: file.clone(),
        contexts: BTreeMap::new(),
        models: BTreeMap::new(),
        groups: BTreeMap::new(),
        families: BTreeMap::new(),
        reps: BTreeMap::new(),
        pseudoreps: BTreeMap::new(),
    };
    for (name, b) in &file.context {
        let ctx = loc.wrap(loc.header("context", name), "context", build_context(b, precision))?;
        spec.contexts.insert(name.clone(), ctx);
    }
    // covers refer to other models; build in dependency order
    let mut pending: Vec<&String> = file.model.keys().collect();
    while !pending.is_empty() {
        let before = pending.len();
        let mut rest = Vec::new();
        for name in pending {
            let b = &file.model[name];
            let here = loc.header("model", name);
            if b.kind == "cover" {
                let base = b.base.as_ref().ok_or_else(|| loc.at(here.clone(), "cover models need a base"))?;
                if !file.model.contains_key(base.get_ref()) {
                    return Err(loc.at(base.span(), format!("unresolved reference: no model named {:?}", base.get_ref())));
                }
                let Some(disc) = spec.models.get(base.get_ref()) else {
                    rest.push(name);
                    continue;
                };
                let y = b.variable.as_deref().unwrap_or("Y");
                let d = b.d.ok_or_else(|| loc.at(here.clone(), "cover models need d"))?;
                let g = b.g.as_deref().ok_or_else(|| loc.at(here.clone(), "cover models need g"))?;
                let g = loc.wrap(here.clone(), "cover equation", parse_series(disc, g))?;
                let m = loc.wrap(here, "model", AlgebraModel::cover(disc, y, d, &g))?;
                spec.models.insert(name.clone(), m);
                continue;
            }
            let cref = b.context.as_ref().ok_or_else(|| loc.at(here.clone(), "models need a context"))?;
            let ctx = loc.lookup(&spec.contexts, cref, "context")?;
            let m = match b.kind.as_str() {
                "disc" => {
                    let bounded: Vec<&str> = b.bounded.iter().map(String::as_str).collect();
                    let open: Vec<&str> = b.open.iter().map(String::as_str).collect();
                    let cap = b.degree_cap.unwrap_or(ctx.precision());
                    AlgebraModel::disc(ctx, &bounded, &open, cap)
                }
                "annulus" => {
                    let names = if b.bounded.len() == 2 {
                        (b.bounded[0].as_str(), b.bounded[1].as_str())
                    } else {
                        ("z1", "z2")
                    };
                    let m = b.m.ok_or_else(|| loc.at(here.clone(), "annulus models need m"))?;
                    AlgebraModel::annulus(ctx, names.0, names.1, m)
                }
                k => Err(Error::arg(format!("unknown model kind {k:?}"))),
            };
            spec.models.insert(name.clone(), loc.wrap(here, "model", m)?);
        }
        if rest.len() == before {
            return Err(loc.at(loc.header("model", rest[0]), "cyclic cover references"));
        }
        pending = rest;
    }
    for (name, b) in &file.group {
        let g = loc.wrap(loc.header("group", name), "group", build_group(b))?;
        spec.groups.insert(name.clone(), Arc::new(g));
    }
    for (name, b) in &file.family {
        let group = loc.lookup(&spec.groups, &b.group, "group")?.clone();
        let model = loc.lookup(&spec.models, &b.model, "model")?.clone();
        let fam = ordered_images(&group, b.images.get_ref()).and_then(|imgs| {
            let owned: Vec<Vec<Vec<String>>> = imgs.into_iter().cloned().collect();
            RepFamily::from_strings(group.clone(), &model, &owned)
        });
        let fam = loc.wrap(b.images.span(), &format!("family {name}"), fam)?;
        spec.families.insert(name.clone(), fam);
    }
    for (name, b) in &file.rep {
        let group = loc.lookup(&spec.groups, &b.group, "group")?.clone();
        let ctx = loc.lookup(&spec.contexts, &b.context, "context")?.clone();
        let gens = ordered_images(&group, b.images.get_ref()).and_then(|imgs| {
            imgs.into_iter()
                .map(|rows| {
                    let d = rows.len();
                    if d == 0 || rows.iter().any(|r| r.len() != d) {
                        return Err(Error::arg("generator image is not a square matrix"));
                    }
                    let rows = rows
                        .iter()
                        .map(|r| r.iter().map(|s| parse_number(&ctx, s)).collect::<Result<Vec<_>>>())
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Matrix::from_rows(rows))
                })
                .collect::<Result<Vec<_>>>()
        });
        let gens = loc.wrap(b.images.span(), &format!("rep {name}"), gens)?;
        let data = RepData { group, ctx, gens };
        // integral data must satisfy the group's relations
        if data.gens.iter().all(|m| m.entries().iter().all(|x| x.is_integral())) {
            loc.wrap(b.images.span(), &format!("rep {name}"), data.integral())?;
        }
        spec.reps.insert(name.clone(), data);
    }
    for (name, b) in &file.pseudorep {
        let here = loc.header("pseudorep", name);
        let cap = b.word_cap.unwrap_or(3);
        let data = if let Some(f) = &b.family {
            let fam = loc.lookup(&spec.families, f, "family")?;
            PseudoData::Series(loc.wrap(f.span(), "pseudorep", from_family_trace(fam, cap))?)
        } else if let Some(r) = &b.rep {
            let rep = loc.lookup(&spec.reps, r, "rep")?;
            let t = rep.integral().and_then(|i| from_rep_trace(&i, cap));
            PseudoData::Padic(loc.wrap(r.span(), "pseudorep", t)?)
        } else {
            let (Some(g), Some(values)) = (&b.group, &b.values) else {
                return Err(loc.at(here, "pseudoreps need a family, a rep, or a group with values"));
            };
            let group = loc.lookup(&spec.groups, g, "group")?.clone();
            if let Some(m) = &b.model {
                let model = loc.lookup(&spec.models, m, "model")?.clone();
                let t = values
                    .get_ref()
                    .iter()
                    .map(|(w, v)| Ok((group.parse_word(w)?, parse_series(&model, v)?)))
                    .collect::<Result<Vec<_>>>()
                    .and_then(|e| PseudoRep2::from_table(group.clone(), e));
                PseudoData::Series(loc.wrap(values.span(), "pseudorep values", t)?)
            } else {
                let c = b.context.as_ref().ok_or_else(|| loc.at(here.clone(), "value tables need a context or a model"))?;
                let ctx = loc.lookup(&spec.contexts, c, "context")?.clone();
                let t = values
                    .get_ref()
                    .iter()
                    .map(|(w, v)| Ok((group.parse_word(w)?, crate::series::parse_element(&ctx, v)?)))
                    .collect::<Result<Vec<_>>>()
                    .and_then(|e| PseudoRep2::from_table(group.clone(), e));
                PseudoData::Padic(loc.wrap(values.span(), "pseudorep values", t)?)
            }
        };
        spec.pseudoreps.insert(name.clone(), data);
    }
    Ok(spec)
}

impl Spec {
    pub fn audit(&self) -> AuditBlock {
        self.file.audit.clone().unwrap_or_default()
    }

    fn pick<'a, T>(map: &'a BTreeMap<String, T>, name: Option<&str>, what: &str) -> Result<(&'a String, &'a T)> {
        match name {
            Some(n) => map
                .get_key_value(n)
                .ok_or_else(|| Error::arg(format!("the spec has no {what} named {n:?}"))),
            None if map.len() == 1 => Ok(map.iter().next().expect("one entry")),
            None if map.is_empty() => Err(Error::arg(format!("the spec has no {what} blocks"))),
            None => Err(Error::arg(format!("the spec has several {what} blocks; name one"))),
        }
    }

    pub fn family(&self, name: Option<&str>) -> Result<&RepFamily> {
        Self::pick(&self.families, name, "family").map(|(_, f)| f)
    }
    pub fn rep(&self, name: Option<&str>) -> Result<&RepData> {
        Self::pick(&self.reps, name, "rep").map(|(_, r)| r)
    }
    pub fn model(&self, name: Option<&str>) -> Result<&Arc<AlgebraModel>> {
        Self::pick(&self.models, name, "model").map(|(_, m)| m)
    }
    pub fn context(&self, name: Option<&str>) -> Result<&Arc<PadicContext>> {
        Self::pick(&self.contexts, name, "context").map(|(_, c)| c)
    }
    pub fn pseudorep(&self, name: Option<&str>) -> Result<&PseudoData> {
        Self::pick(&self.pseudoreps, name, "pseudorep").map(|(_, p)| p)
    }
}

/// Traces of a family on the words up to `cap`, as (word, series) strings.
pub fn family_traces(fam: &RepFamily, cap: usize) -> Result<Vec<(String, String)>> {
    let g = fam.group();
    let words = if g.is_finite() { g.element_words()?.to_vec() } else { g.words_up_to(cap) };
    Ok(words.iter().map(|w| (g.word_to_string(w), trace_of_word(fam, w).to_string())).collect())
}
