//! Command-line front end. `run_args` parses arguments, dispatches and
//! returns the report together with the process exit code.

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Value};

use crate::domain::{
    cover_compare, describe, sample, AuditOptions, CoverCompareOptions, ResidueDomain,
};
use crate::error::{Error, Result};
use crate::family::{
    compare_points, family_constancy_audit, strict_constancy_check, trace_algebra_full, trace_of_word,
    AlgebraVerdict, FamilyAuditOptions, PairVerdict, RepFamily, StrictOptions,
};
use crate::galois::{
    alpha, crystalline_congruence_disc, crystalline_module, semistable_congruence_bound, semistable_context,
    semistable_module, semistable_parameters, triangulation_parameters, weak_admissibility, LInvariant, PhiModule2,
};
use crate::lattice::{
    carayol_audit, iso_mod, matrix_strings, reduce_rep_mod, semisimplify_mod_p, stable_lattice, CarayolOptions,
    CarayolVerdict, IsoOptions, IsoVerdict, MeataxeOptions,
};
use crate::padic::{gamma_exponent, Extension, PadicContext, PadicElement};
use crate::pseudorep::{
    axiom_check, kernel, pseudorep_constancy_audit, residually_multiplicity_free, MfVerdict,
};
use crate::report::Rational;
use crate::series::{parse_element, parse_number, AlgebraModel, ModelPoint, NeighborhoodKind};
use crate::spec::{load_spec, PseudoData, Spec};

#[derive(Debug, Parser)]
#[command(name = "congruence", version, about = "Exact p-adic congruence computations")]
pub struct Cli {
    /// Spec file (TOML).
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    #[arg(long, global = true)]
    pub single_thread: bool,
    /// Overrides every context precision.
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    #[command(subcommand)]
    Bounds(BoundsCmd),
    #[command(subcommand)]
    Domain(DomainCmd),
    #[command(subcommand)]
    Family(FamilyCmd),
    #[command(subcommand)]
    Lattice(LatticeCmd),
    #[command(subcommand)]
    Pseudorep(PseudorepCmd),
    #[command(subcommand)]
    Phimod(PhimodCmd),
}

#[derive(Debug, Subcommand)]
pub enum BoundsCmd {
    Alpha {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        p: u64,
    },
    CrysDisc {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        p: u64,
        /// v_p(a_p0), e.g. 1 or 3/2.
        #[arg(long)]
        v: Ratio<i64>,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        e: u32,
    },
    SstBound {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u32,
    },
    Gamma {
        #[arg(long)]
        e: u32,
        #[arg(long)]
        n: u32,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    WideOpen,
    Affinoid,
}

impl From<KindArg> for NeighborhoodKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::WideOpen => NeighborhoodKind::WideOpen,
            KindArg::Affinoid => NeighborhoodKind::Affinoid,
        }
    }
}

#[derive(Debug, Args)]
pub struct Neighborhood {
    #[arg(long)]
    pub model: Option<String>,
    /// Comma-separated coordinates over the base field.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub center: Option<Vec<String>>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
}

#[derive(Debug, Subcommand)]
pub enum DomainCmd {
    Describe {
        #[command(flatten)]
        at: Neighborhood,
    },
    Member {
        #[command(flatten)]
        at: Neighborhood,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        point: Vec<String>,
        /// Extension e:f the point lives over.
        #[arg(long)]
        ext: Option<String>,
    },
    Sample {
        #[command(flatten)]
        at: Neighborhood,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long)]
        ext: Option<String>,
    },
    CoverCompare {
        #[arg(long)]
        model: Option<String>,
        /// Cover point, all coordinates.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        point: Vec<String>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long = "ext")]
        exts: Vec<String>,
        #[arg(long, default_value_t = 4)]
        budget: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum FamilyCmd {
    CheckStrict {
        #[arg(long)]
        family: Option<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        center: Option<Vec<String>>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long)]
        conjugacy_degree: Option<u32>,
    },
    Audit {
        #[arg(long)]
        family: Option<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        center: Option<Vec<String>>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long = "ext")]
        exts: Vec<String>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        word_cap: Option<usize>,
        /// Compare the fiber here with the fiber at the center instead of
        /// sampling.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Option<Vec<String>>,
        /// Extension e:f of --point.
        #[arg(long)]
        point_ext: Option<String>,
    },
    Trace {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        word: Option<String>,
        #[arg(long)]
        word_cap: Option<usize>,
    },
    TraceAlgebra {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value_t = 4)]
        degree: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum LatticeCmd {
    Stabilize {
        #[arg(long)]
        rep: Option<String>,
        #[arg(long)]
        budget: Option<usize>,
    },
    Reduce {
        #[arg(long)]
        rep: Option<String>,
        #[arg(long)]
        m: u32,
    },
    Iso {
        #[arg(long)]
        rep: String,
        #[arg(long)]
        other: String,
        #[arg(long)]
        m: u32,
    },
    Semisimplify {
        #[arg(long)]
        rep: Option<String>,
    },
    Carayol {
        #[arg(long)]
        rep: String,
        #[arg(long)]
        other: String,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        word_cap: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum PseudorepCmd {
    Check {
        #[arg(long)]
        pseudorep: Option<String>,
        #[arg(long, default_value_t = 200)]
        pairs: usize,
    },
    Kernel {
        #[arg(long)]
        pseudorep: Option<String>,
        #[arg(long)]
        m: u32,
    },
    Mf {
        #[arg(long)]
        pseudorep: Option<String>,
    },
    Audit {
        #[arg(long)]
        pseudorep: Option<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        center: Option<Vec<String>>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long = "ext")]
        exts: Vec<String>,
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct PhiArgs {
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub p: u64,
    /// Crystalline: the trace a_p of φ.
    #[arg(long, allow_hyphen_values = true)]
    pub ap: Option<String>,
    /// Semistable: the L-invariant, or "inf".
    #[arg(long, allow_hyphen_values = true)]
    pub l_inv: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum PhimodCmd {
    BuildCrys {
        #[arg(long)]
        k: u32,
        #[arg(long, allow_hyphen_values = true)]
        ap: String,
        #[arg(long)]
        p: u64,
    },
    BuildSst {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        l_inv: String,
    },
    Wadm {
        #[command(flatten)]
        args: PhiArgs,
    },
    Params {
        #[command(flatten)]
        args: PhiArgs,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Exit code of a library error: 2 for budget or precision exhaustion,
/// 3 for everything a user can fix.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::Budget(_) | Error::Precision { .. } | Error::Undecidable(_) | Error::NeedsExtension(_) => 2,
        _ => 3,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidContext(_) => "invalid_context",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::Precision { .. } => "precision",
        Error::NonIntegral => "non_integral",
        Error::NotUnit => "not_unit",
        Error::Domain(_) => "domain",
        Error::Relation(_) => "relation",
        Error::Unsupported(_) => "unsupported",
        Error::Undecidable(_) => "undecidable",
        Error::Budget(_) => "budget",
        Error::NeedsExtension(_) => "needs_extension",
        Error::Mismatch(_) => "mismatch",
        Error::Spec { .. } => "spec",
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome { code: 0, stdout: text, stderr: String::new() },
                _ => Outcome { code: 3, stdout: String::new(), stderr: text },
            };
        }
    };
    run(&cli)
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Outcome {
    let (code, report) = match dispatch(cli) {
        Ok(r) => r,
        Err(e) => {
            let body = json!({"error": {"kind": error_kind(&e), "message": e.to_string()}});
            return Outcome {
                code: error_code(&e),
                stdout: String::new(),
                stderr: render(&body),
            };
        }
    };
    let text = render(&report);
    if let Some(path) = &cli.json {
        if let Err(e) = std::fs::write(path, &text) {
            return Outcome {
                code: 3,
                stdout: text,
                stderr: format!("cannot write {}: {e}\n", path.display()),
            };
        }
    }
    Outcome { code, stdout: text, stderr: String::new() }
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

struct Env<'a> {
    cli: &'a Cli,
    spec: Option<Spec>,
}

impl Env<'_> {
    fn spec(&self) -> Result<&Spec> {
        self.spec.as_ref().ok_or_else(|| Error::arg("this command needs --spec"))
    }
    fn seed(&self) -> u64 {
        self.cli
            .seed
            .or_else(|| self.spec.as_ref().and_then(|s| s.audit().seed))
            .unwrap_or(0)
    }
    fn n(&self, n: Option<u32>) -> Result<u32> {
        n.or_else(|| self.spec.as_ref().and_then(|s| s.audit().n))
            .ok_or_else(|| Error::arg("no level: pass --n or set audit.n"))
    }
    fn kind(&self, k: Option<KindArg>) -> Result<NeighborhoodKind> {
        if let Some(k) = k {
            return Ok(k.into());
        }
        match self.spec.as_ref().and_then(|s| s.audit().kind).as_deref() {
            None | Some("wide_open") => Ok(NeighborhoodKind::WideOpen),
            Some("affinoid") => Ok(NeighborhoodKind::Affinoid),
            Some(k) => Err(Error::arg(format!("unknown neighborhood kind {k:?}"))),
        }
    }
    fn samples(&self, s: Option<usize>, default: usize) -> usize {
        s.or_else(|| self.spec.as_ref().and_then(|sp| sp.audit().samples)).unwrap_or(default)
    }
    fn word_cap(&self, w: Option<usize>) -> usize {
        w.or_else(|| self.spec.as_ref().and_then(|s| s.audit().word_cap)).unwrap_or(3)
    }
    fn center(&self, model: &Arc<AlgebraModel>, c: &Option<Vec<String>>) -> Result<Vec<PadicElement>> {
        let ctx = model.base();
        let strings = c.clone().or_else(|| self.spec.as_ref().and_then(|s| s.audit().center));
        match strings {
            Some(v) => v.iter().map(|s| parse_element(ctx, s.trim())).collect(),
            None => Ok(vec![PadicElement::zero(ctx); model.nvars()]),
        }
    }
    fn extensions(&self, ctx: &Arc<PadicContext>, exts: &[String]) -> Result<Vec<Extension>> {
        let pairs: Vec<(usize, usize)> = if exts.is_empty() {
            match self.spec.as_ref().and_then(|s| s.audit().extensions) {
                Some(v) => v.iter().map(|[e, f]| (*e, *f)).collect(),
                None => vec![(1, 1)],
            }
        } else {
            exts.iter().map(|s| parse_ext(s)).collect::<Result<_>>()?
        };
        pairs.into_iter().map(|(e, f)| Extension::build(ctx, e, f)).collect()
    }
    fn iso(&self) -> IsoOptions {
        IsoOptions {
            seed: self.seed(),
            single_thread: self.cli.single_thread,
            ..Default::default()
        }
    }
    fn meataxe(&self) -> MeataxeOptions {
        MeataxeOptions {
            seed: self.seed(),
            ..Default::default()
        }
    }
}

fn parse_ext(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::arg(format!("extension {s:?} is not of the form e:f"));
    let (e, f) = s.split_once(':').ok_or_else(bad)?;
    Ok((e.trim().parse().map_err(|_| bad())?, f.trim().parse().map_err(|_| bad())?))
}

fn point_over(model: &Arc<AlgebraModel>, ext: &Extension, coords: &[String]) -> Result<ModelPoint> {
    let c = coords
        .iter()
        .map(|s| parse_element(ext.ext(), s.trim()))
        .collect::<Result<Vec<_>>>()?;
    ModelPoint::new(model, ext, c)
}

fn embed_point(model: &Arc<AlgebraModel>, ext: &Extension, coords: &[PadicElement]) -> Result<ModelPoint> {
    let c = coords.iter().map(|x| ext.embed(x)).collect::<Result<Vec<_>>>()?;
    ModelPoint::new(model, ext, c)
}

fn point_strings(x: &ModelPoint) -> Vec<String> {
    x.coords().iter().map(|c| c.to_string()).collect()
}

fn dispatch(cli: &Cli) -> Result<(i32, Value)> {
    let spec = match &cli.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::arg(format!("cannot read {}: {e}", path.display())))?;
            Some(load_spec(&text, cli.precision)?)
        }
        None => None,
    };
    let env = Env { cli, spec };
    match &cli.command {
        Command::Bounds(c) => bounds(c),
        Command::Domain(c) => domain(&env, c),
        Command::Family(c) => family(&env, c),
        Command::Lattice(c) => lattice(&env, c),
        Command::Pseudorep(c) => pseudorep(&env, c),
        Command::Phimod(c) => phimod(&env, c),
    }
}

fn bounds(c: &BoundsCmd) -> Result<(i32, Value)> {
    let v = match c {
        BoundsCmd::Alpha { k, p } => {
            if *k < 1 {
                return Err(Error::arg("weight must be at least 1"));
            }
            json!({"k": k, "p": p, "alpha": alpha((*k - 1) as u64, *p)?})
        }
        BoundsCmd::CrysDisc { k, p, v, n, e } => {
            let r = crystalline_congruence_disc(*k, *p, *v, *n, *e)?;
            json!({"k": k, "p": p, "v": Rational::from(*v), "n": n, "e": e, "disc": to_value(&r)})
        }
        BoundsCmd::SstBound { k, p, n } => {
            json!({"k": k, "p": p, "n": n, "bound": Rational::from(semistable_congruence_bound(*k, *p, *n)?)})
        }
        BoundsCmd::Gamma { e, n } => json!({"gamma": gamma_exponent(*e, *n)?}),
    };
    Ok((0, v))
}

fn neighborhood(env: &Env, at: &Neighborhood) -> Result<(Arc<AlgebraModel>, ResidueDomain)> {
    let model = env.spec()?.model(at.model.as_deref())?.clone();
    let center = env.center(&model, &at.center)?;
    let x = ModelPoint::rational(&model, center)?;
    let dom = describe(&model, &x, env.n(at.n)?, env.kind(at.kind)?)?;
    Ok((model, dom))
}

fn one_ext(env: &Env, ctx: &Arc<PadicContext>, ext: &Option<String>) -> Result<Extension> {
    match ext {
        Some(s) => {
            let (e, f) = parse_ext(s)?;
            Extension::build(ctx, e, f)
        }
        None => Ok(env.extensions(ctx, &[])?.into_iter().next().unwrap_or_else(|| Extension::trivial(ctx))),
    }
}

fn domain(env: &Env, c: &DomainCmd) -> Result<(i32, Value)> {
    match c {
        DomainCmd::Describe { at } => {
            let (_, dom) = neighborhood(env, at)?;
            Ok((0, dom.to_json()))
        }
        DomainCmd::Member { at, point, ext } => {
            let (model, dom) = neighborhood(env, at)?;
            let ext = match ext {
                Some(_) => one_ext(env, model.base(), ext)?,
                None => Extension::trivial(model.base()),
            };
            let y = point_over(&model, &ext, point)?;
            let member = dom.member(&y)?;
            let closed = dom.member_closed_form(&y)?;
            Ok((0, json!({"point": point_strings(&y), "member": member, "closed_form": closed})))
        }
        DomainCmd::Sample { at, count, ext } => {
            let (model, dom) = neighborhood(env, at)?;
            let ext = one_ext(env, model.base(), ext)?;
            let out = sample(&dom, &ext, *count, env.seed())?;
            let points: Vec<Vec<String>> = out.points.iter().map(point_strings).collect();
            let code = if out.points.len() < *count { 2 } else { 0 };
            Ok((
                code,
                json!({"e_rel": ext.e_rel(), "f_rel": ext.f_rel(), "points": points, "attempts": out.attempts, "diagnostics": out.diagnostics}),
            ))
        }
        DomainCmd::CoverCompare { model, point, n, samples, exts, budget } => {
            let model = env.spec()?.model(model.as_deref())?.clone();
            let ctx = model.base().clone();
            let y = point_over(&model, &Extension::trivial(&ctx), point)?;
            let opts = CoverCompareOptions {
                samples: env.samples(*samples, 100),
                extensions: env.extensions(&ctx, exts)?,
                search_budget: *budget,
                seed: env.seed(),
            };
            let r = cover_compare(&model, &y, env.n(*n)?, &opts)?;
            Ok((r.containment.exit_code(), to_value(&r)))
        }
    }
}

fn trace_words(fam: &RepFamily, word: &Option<String>, cap: usize) -> Result<Vec<(String, String)>> {
    let g = fam.group();
    match word {
        Some(w) => {
            let w = g.parse_word(w)?;
            Ok(vec![(g.word_to_string(&w), trace_of_word(fam, &w).to_string())])
        }
        None => crate::spec::family_traces(fam, cap),
    }
}

fn family(env: &Env, c: &FamilyCmd) -> Result<(i32, Value)> {
    match c {
        FamilyCmd::CheckStrict { family, center, n, kind, conjugacy_degree } => {
            let fam = env.spec()?.family(family.as_deref())?;
            let center = env.center(fam.model(), center)?;
            let opts = StrictOptions { conjugacy_degree: *conjugacy_degree };
            let r = strict_constancy_check(fam, &center, env.n(*n)?, env.kind(*kind)?, &opts)?;
            Ok((if r.constant { 0 } else { 1 }, to_value(&r)))
        }
        FamilyCmd::Audit { family, center, n, kind, exts, samples, word_cap, point, point_ext } => {
            let fam = env.spec()?.family(family.as_deref())?;
            let model = fam.model().clone();
            let center = env.center(&model, center)?;
            let n = env.n(*n)?;
            let word_cap = env.word_cap(*word_cap);
            if let Some(point) = point {
                let ext = match point_ext {
                    Some(_) => one_ext(env, model.base(), point_ext)?,
                    None => Extension::trivial(model.base()),
                };
                let x = embed_point(&model, &ext, &center)?;
                let y = point_over(&model, &ext, point)?;
                let r = compare_points(fam, &x, &y, n, word_cap, &env.iso())?;
                let code = match r.verdict {
                    PairVerdict::Congruent => 0,
                    PairVerdict::NotCongruent => 1,
                    PairVerdict::Undecided => 2,
                };
                let center: Vec<String> = point_strings(&x);
                return Ok((code, json!({"n": n, "center": center, "comparison": to_value(&r)})));
            }
            let x = ModelPoint::rational(&model, center)?;
            let dom = describe(&model, &x, n, env.kind(*kind)?)?;
            let exts = env.extensions(model.base(), exts)?;
            let opts = FamilyAuditOptions {
                samples_per_ext: env.samples(*samples, 30),
                word_cap,
                seed: env.seed(),
                single_thread: env.cli.single_thread,
                iso: env.iso(),
            };
            let r = family_constancy_audit(fam, &dom, n, &exts, &opts)?;
            Ok((r.verdict.exit_code(), to_value(&r)))
        }
        FamilyCmd::Trace { family, word, word_cap } => {
            let fam = env.spec()?.family(family.as_deref())?;
            let traces = trace_words(fam, word, env.word_cap(*word_cap))?;
            let traces: Vec<Value> = traces.into_iter().map(|(w, t)| json!({"word": w, "trace": t})).collect();
            Ok((0, json!({"traces": traces})))
        }
        FamilyCmd::TraceAlgebra { family, n, degree } => {
            let fam = env.spec()?.family(family.as_deref())?;
            let r = trace_algebra_full(fam, env.n(*n)?, *degree)?;
            let code = match r.verdict {
                AlgebraVerdict::Full => 0,
                AlgebraVerdict::Proper => 1,
                AlgebraVerdict::Inconclusive => 2,
            };
            Ok((code, to_value(&r)))
        }
    }
}

fn lattice(env: &Env, c: &LatticeCmd) -> Result<(i32, Value)> {
    let spec = env.spec()?;
    let budget = |b: Option<usize>| b.or(spec.audit().budget).unwrap_or(64);
    match c {
        LatticeCmd::Stabilize { rep, budget: b } => {
            let r = spec.rep(rep.as_deref())?;
            let s = stable_lattice(r.group.clone(), &r.ctx, &r.gens, budget(*b))?;
            Ok((0, s.to_json()))
        }
        LatticeCmd::Reduce { rep, m } => {
            let r = reduce_rep_mod(&spec.rep(rep.as_deref())?.integral()?, *m)?;
            let images: Vec<_> = r.gen_images().iter().map(matrix_strings).collect();
            Ok((0, json!({"modulus": m, "dim": r.dim(), "gen_images": images})))
        }
        LatticeCmd::Iso { rep, other, m } => {
            let a = reduce_rep_mod(&spec.rep(Some(rep))?.integral()?, *m)?;
            let b = reduce_rep_mod(&spec.rep(Some(other))?.integral()?, *m)?;
            let r = iso_mod(&a, &b, &env.iso())?;
            let code = match r.verdict {
                IsoVerdict::Isomorphic => 0,
                IsoVerdict::NotIsomorphic => 1,
                IsoVerdict::Inconclusive => 2,
            };
            Ok((code, to_value(&r)))
        }
        LatticeCmd::Semisimplify { rep } => {
            let r = reduce_rep_mod(&spec.rep(rep.as_deref())?.integral()?, 1)?;
            Ok((0, to_value(&semisimplify_mod_p(&r, &env.meataxe())?)))
        }
        LatticeCmd::Carayol { rep, other, n, word_cap } => {
            let a = spec.rep(Some(rep))?.integral()?;
            let b = spec.rep(Some(other))?.integral()?;
            let opts = CarayolOptions { iso: env.iso(), meataxe: env.meataxe() };
            let r = carayol_audit(&a, &b, *n, env.word_cap(*word_cap), &opts)?;
            let code = match r.verdict {
                CarayolVerdict::Pass => 0,
                CarayolVerdict::TheoremViolation => 1,
                CarayolVerdict::PreconditionFailed | CarayolVerdict::Inconclusive => 2,
            };
            Ok((code, to_value(&r)))
        }
    }
}

fn padic_pseudorep<'a>(spec: &'a Spec, name: &Option<String>) -> Result<&'a crate::pseudorep::PseudoRep2<PadicElement>> {
    match spec.pseudorep(name.as_deref())? {
        PseudoData::Padic(t) => Ok(t),
        PseudoData::Series(_) => Err(Error::arg("this command needs a pseudorep with p-adic values")),
    }
}

fn pseudorep(env: &Env, c: &PseudorepCmd) -> Result<(i32, Value)> {
    let spec = env.spec()?;
    match c {
        PseudorepCmd::Check { pseudorep, pairs } => {
            let r = match spec.pseudorep(pseudorep.as_deref())? {
                PseudoData::Padic(t) => axiom_check(t, *pairs, env.seed())?,
                PseudoData::Series(t) => axiom_check(t, *pairs, env.seed())?,
            };
            Ok((if r.pass { 0 } else { 1 }, to_value(&r)))
        }
        PseudorepCmd::Kernel { pseudorep, m } => {
            let r = kernel(padic_pseudorep(spec, pseudorep)?, *m)?;
            Ok((0, to_value(&r)))
        }
        PseudorepCmd::Mf { pseudorep } => {
            let r = residually_multiplicity_free(padic_pseudorep(spec, pseudorep)?, &env.meataxe())?;
            let code = match r.verdict {
                MfVerdict::MultiplicityFree => 0,
                MfVerdict::NotMultiplicityFree => 1,
                MfVerdict::Inconclusive => 2,
            };
            Ok((code, to_value(&r)))
        }
        PseudorepCmd::Audit { pseudorep, center, n, kind, exts, samples } => {
            let PseudoData::Series(t) = spec.pseudorep(pseudorep.as_deref())? else {
                return Err(Error::arg("audits need a pseudorep with series values"));
            };
            let model = t.sample_value().model().clone();
            let n = env.n(*n)?;
            let x = ModelPoint::rational(&model, env.center(&model, center)?)?;
            let dom = describe(&model, &x, n, env.kind(*kind)?)?;
            let exts = env.extensions(model.base(), exts)?;
            let opts = AuditOptions {
                samples_per_ext: env.samples(*samples, 50),
                seed: env.seed(),
                single_thread: env.cli.single_thread,
            };
            let r = pseudorep_constancy_audit(t, &dom, n, &exts, &opts)?;
            Ok((r.verdict.exit_code(), to_value(&r)))
        }
    }
}

fn phimod_context(env: &Env, p: u64) -> Result<Arc<PadicContext>> {
    PadicContext::qp(p, env.cli.precision.unwrap_or(20))
}

fn parse_l(ctx: &Arc<PadicContext>, s: &str) -> Result<LInvariant> {
    if matches!(s.trim(), "inf" | "infinity" | "∞") {
        Ok(LInvariant::Infinity)
    } else {
        Ok(LInvariant::Finite(parse_number(ctx, s)?))
    }
}

fn phi_from(env: &Env, a: &PhiArgs) -> Result<PhiModule2> {
    match (&a.ap, &a.l_inv) {
        (Some(ap), None) => crystalline_module(a.k, &parse_number(&phimod_context(env, a.p)?, ap)?),
        (None, Some(l)) => {
            let ctx = semistable_context(a.p, env.cli.precision.unwrap_or(20))?;
            semistable_module(a.k, &parse_l(&ctx, l)?, &ctx)
        }
        _ => Err(Error::arg("pass exactly one of --ap and --l-inv")),
    }
}

fn phimod(env: &Env, c: &PhimodCmd) -> Result<(i32, Value)> {
    match c {
        PhimodCmd::BuildCrys { k, ap, p } => {
            let m = crystalline_module(*k, &parse_number(&phimod_context(env, *p)?, ap)?)?;
            Ok((0, json!({"module": m.to_json(), "admissibility": to_value(&weak_admissibility(&m)?)})))
        }
        PhimodCmd::BuildSst { k, p, l_inv } => {
            let ctx = semistable_context(*p, env.cli.precision.unwrap_or(20))?;
            let m = semistable_module(*k, &parse_l(&ctx, l_inv)?, &ctx)?;
            Ok((0, json!({"module": m.to_json(), "admissibility": to_value(&weak_admissibility(&m)?)})))
        }
        PhimodCmd::Wadm { args } => {
            let r = weak_admissibility(&phi_from(env, args)?)?;
            Ok((if r.admissible { 0 } else { 1 }, to_value(&r)))
        }
        PhimodCmd::Params { args } => match (&args.ap, &args.l_inv) {
            (Some(ap), None) => {
                let r = triangulation_parameters(args.k, &parse_number(&phimod_context(env, args.p)?, ap)?)?;
                Ok((0, to_value(&r)))
            }
            (None, Some(_)) => {
                let ctx = semistable_context(args.p, env.cli.precision.unwrap_or(20))?;
                let (d1, d2) = semistable_parameters(args.k, &ctx)?;
                Ok((0, json!({"delta1": to_value(&d1), "delta2": to_value(&d2)})))
            }
            _ => Err(Error::arg("pass exactly one of --ap and --l-inv")),
        },
    }
}
