//! Finite covers Y^d = g(T) over a disc: pushforward containments and the
//! search for the level n_0 beyond which neighborhoods are preimages.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::sample::sample;
use super::{describe, ResidueDomain};
use crate::error::{Error, Result};
use crate::padic::{Extension, PadicContext, PadicElement, ResidueField, Valuation};
use crate::report::{sub_seed, Verdict};
use crate::series::{AdicSeries, AlgebraModel, ModelPoint, Mono, NeighborhoodKind, Relation, VarKind};

/// A base variable j with g = u·T_j + (terms free of T_j), u a unit.
pub(super) fn linear_solve_index(model: &AlgebraModel, g: &BTreeMap<Mono, PadicElement>) -> Option<(usize, PadicElement)> {
    let k = model.nvars() - 1;
    (0..k).find_map(|j| {
        let mut hits = g.iter().filter(|(m, _)| m[j] > 0);
        let (m, c) = hits.next()?;
        if hits.next().is_some() || !c.is_unit() {
            return None;
        }
        let linear = m.iter().enumerate().all(|(i, &e)| if i == j { e == 1 } else { e == 0 });
        linear.then(|| (j, c.clone()))
    })
}

fn cover_parts(model: &Arc<AlgebraModel>) -> Result<(u32, Arc<AlgebraModel>, AdicSeries)> {
    let Relation::Cover { d, g } = model.relation() else {
        return Err(Error::arg("not a cover model"));
    };
    let base = model.cover_base().expect("cover");
    let k = model.nvars() - 1;
    let terms = g.iter().map(|(m, c)| (m[..k].to_vec(), c.clone())).collect();
    let gs = AdicSeries::from_terms(&base, terms, model.base().precision());
    Ok((*d, base, gs))
}

/// The d-th roots of c in E (p ∤ d, or c = 0).
fn dth_roots(c: &PadicElement, d: u32) -> Result<Vec<PadicElement>> {
    let ctx = c.ctx();
    let v = match c.valuation() {
        Valuation::AtLeast(_) => return Ok(vec![PadicElement::zero(ctx).truncate(c.precision().div_ceil(d))]),
        Valuation::Exact(v) => v,
    };
    if v % d != 0 {
        return Ok(Vec::new());
    }
    if ctx.p() % d as u64 == 0 {
        return Err(Error::Unsupported(format!("{d}-th roots in residue characteristic {}", ctx.p())));
    }
    let u = c.div_pi_pow(v)?;
    let field = ResidueField::of(ctx);
    let ub = field.from_element(&u);
    let dd = PadicElement::from_int(ctx, d as i64);
    let mut out = Vec::new();
    for a in field.elements() {
        if a == 0 || field.pow(a, d as u64) != ub {
            continue;
        }
        let mut r = field.lift(ctx, a);
        for _ in 0..64 {
            let fr = &r.pow(d as u64) - &u;
            if fr.is_zero() {
                break;
            }
            let der = &dd * &r.pow(d as u64 - 1);
            r = (&r - &fr.div(&der)?).lift();
        }
        out.push(r.truncate(u.precision()).mul_pi_pow(v / d));
    }
    Ok(out)
}

/// All Y over E with Y^d = g(base point).
pub fn cover_lift(model: &Arc<AlgebraModel>, base_coords: &[PadicElement], ext: &Extension) -> Result<Vec<PadicElement>> {
    let (d, base, g) = cover_parts(model)?;
    let pt = ModelPoint::new(&base, ext, base_coords.to_vec())?;
    let c = g.evaluate(&pt)?;
    dth_roots(&c, d)
}

#[derive(Debug, Clone)]
pub struct CoverCompareOptions {
    pub samples: usize,
    pub extensions: Vec<Extension>,
    /// Largest level tried in the n_0 search.
    pub search_budget: u32,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelCheck {
    pub n: u32,
    pub kind: NeighborhoodKind,
    /// Upstairs samples pushed down.
    pub pushed: usize,
    pub containment_failures: Vec<String>,
    /// Cover points over sampled downstairs points.
    pub lifted: usize,
    pub undecided: usize,
    /// A downstairs point of the neighborhood with a lift outside the
    /// upstairs neighborhood.
    pub equality_witness: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverReport {
    pub n: u32,
    pub single_fiber: bool,
    pub levels: Vec<LevelCheck>,
    pub search_budget: u32,
    /// Smallest level from which equality held at every tried level.
    pub n0: Option<u32>,
    pub containment: Verdict,
    pub diagnostics: Vec<String>,
}

impl CoverReport {
    /// Whether preimage equality was observed from level `n0` on.
    pub fn equality_from(&self, n0: u32) -> bool {
        self.n0.is_some_and(|m| m <= n0)
    }
}

fn show(pt: &ModelPoint) -> String {
    let names = pt.model().names();
    let parts: Vec<String> = names.iter().zip(pt.coords()).map(|(n, c)| format!("{n}={c}")).collect();
    format!("({}) over e={}, f={}", parts.join(", "), pt.extension().e_rel(), pt.extension().f_rel())
}

/// Downstairs probes x + u·π_E^v for every admissible v and u = ±1 in each
/// base coordinate.
fn boundary_probes(down: &ResidueDomain, ext: &Extension) -> Result<Vec<ModelPoint>> {
    let ctx = ext.ext();
    let (t, strict) = down.threshold(ext.e_rel() as u32);
    let lo = if strict { t + 1 } else { t };
    let center = down
        .center()
        .coords()
        .iter()
        .map(|x| ext.embed(x))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for i in 0..center.len() {
        for v in lo..ctx.precision() {
            for u in [1i64, -1] {
                let mut c = center.clone();
                c[i] = &c[i] + &PadicElement::from_int(ctx, u).mul_pi_pow(v);
                if let Ok(p) = ModelPoint::new(down.model(), ext, c) {
                    out.push(p);
                }
            }
        }
    }
    Ok(out)
}

/// Pushforward containment and preimage equality for a cover at the
/// L-point y upstairs.
pub fn cover_compare(model: &Arc<AlgebraModel>, y: &ModelPoint, n: u32, opts: &CoverCompareOptions) -> Result<CoverReport> {
    let (d, base, g) = cover_parts(model)?;
    let k = model.nvars() - 1;
    let x = ModelPoint::rational(&base, y.coords()[..k].to_vec())?;
    let single_fiber = d == 1 || g.evaluate(&x)?.is_zero();
    let mut extensions = opts.extensions.clone();
    if extensions.is_empty() {
        extensions.push(Extension::trivial(model.base()));
    }
    let top = n.max(opts.search_budget);
    let mut levels = Vec::new();
    let mut diagnostics = Vec::new();
    for level in 1..=top {
        for kind in [NeighborhoodKind::WideOpen, NeighborhoodKind::Affinoid] {
            let up = describe(model, y, level, kind)?;
            let down = describe(&base, &x, level, kind)?;
            let mut chk = LevelCheck {
                n: level,
                kind,
                pushed: 0,
                containment_failures: Vec::new(),
                lifted: 0,
                undecided: 0,
                equality_witness: None,
            };
            for (ei, ext) in extensions.iter().enumerate() {
                let s = sub_seed(opts.seed, level as u64 * 2 + (kind == NeighborhoodKind::Affinoid) as u64, ei as u64);
                if level <= n {
                    let ups = sample(&up, ext, opts.samples, s)?;
                    diagnostics.extend(ups.diagnostics.iter().map(|m| format!("n={level} {kind:?} upstairs: {m}")));
                    for p in &ups.points {
                        let q = ModelPoint::new(&base, ext, p.coords()[..k].to_vec())?;
                        chk.pushed += 1;
                        match down.member(&q) {
                            Ok(true) => {}
                            Ok(false) => chk.containment_failures.push(show(p)),
                            Err(Error::Undecidable(_)) | Err(Error::Precision { .. }) => chk.undecided += 1,
                            Err(e) => return Err(e),
                        }
                    }
                }
                if !single_fiber || chk.equality_witness.is_some() {
                    continue;
                }
                let mut downs = boundary_probes(&down, ext)?;
                downs.extend(sample(&down, ext, opts.samples, s ^ 1)?.points);
                'pts: for q in &downs {
                    let roots = match cover_lift(model, q.coords(), ext) {
                        Ok(r) => r,
                        Err(Error::Precision { .. }) => {
                            chk.undecided += 1;
                            continue;
                        }
                        Err(e) => return Err(e),
                    };
                    for r in roots {
                        let mut c = q.coords().to_vec();
                        c.push(r);
                        let Ok(p) = ModelPoint::new(model, ext, c) else { continue };
                        chk.lifted += 1;
                        match up.member(&p) {
                            Ok(true) => {}
                            Ok(false) => {
                                chk.equality_witness = Some(show(&p));
                                break 'pts;
                            }
                            Err(Error::Undecidable(_)) | Err(Error::Precision { .. }) => chk.undecided += 1,
                            Err(e) => return Err(e),
                        }
                    }
                }
            }
            levels.push(chk);
        }
    }
    let n0 = if single_fiber {
        let holds = |l: u32| {
            levels
                .iter()
                .filter(|c| c.n == l)
                .all(|c| c.equality_witness.is_none() && c.lifted > 0)
        };
        let mut n0 = None;
        for l in (1..=top).rev() {
            if holds(l) {
                n0 = Some(l);
            } else {
                break;
            }
        }
        n0
    } else {
        diagnostics.push("fiber over the base point is not a single point; n0 search skipped".into());
        None
    };
    let containment = if levels.iter().any(|c| !c.containment_failures.is_empty()) {
        Verdict::Fail
    } else if levels.iter().filter(|c| c.n <= n).any(|c| c.pushed == 0) {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    Ok(CoverReport {
        n,
        single_fiber,
        levels,
        search_budget: top,
        n0,
        containment,
        diagnostics,
    })
}

/// The weight-space coordinate T = (1+p)^{κ−1} − 1, with T = 0 at κ = 1.
pub fn hida_weight_coordinate(ctx: &Arc<PadicContext>, kappa: i64) -> Result<PadicElement> {
    let u = PadicElement::from_int(ctx, 1 + ctx.p() as i64);
    let k = kappa - 1;
    let pw = if k >= 0 { u.pow(k as u64) } else { u.pow((-k) as u64).inverse()? };
    Ok(&pw - &PadicElement::one(ctx))
}

#[derive(Debug, Clone, Serialize)]
pub struct HidaRow {
    pub weight: i64,
    pub in_disc: bool,
    pub congruent_to_one: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HidaReport {
    pub n: u32,
    pub rows: Vec<HidaRow>,
    pub pass: bool,
}

/// Integral weights κ whose coordinate lies in U^(n) at T = 0 are exactly
/// those with κ ≡ 1 mod p^{n−1}.
pub fn hida_weight_check(ctx: &Arc<PadicContext>, n: u32, weights: impl IntoIterator<Item = i64>) -> Result<HidaReport> {
    let disc = AlgebraModel::disc(ctx, &[], &["T"], ctx.precision())?;
    let x = ModelPoint::rational(&disc, vec![PadicElement::zero(ctx)])?;
    let dom = describe(&disc, &x, n, NeighborhoodKind::WideOpen)?;
    debug_assert_eq!(disc.kinds()[0], VarKind::Open);
    let modulus = (ctx.p() as i64).pow(n - 1);
    let mut rows = Vec::new();
    for w in weights {
        let t = hida_weight_coordinate(ctx, w)?;
        let pt = ModelPoint::rational(&disc, vec![t])?;
        rows.push(HidaRow {
            weight: w,
            in_disc: dom.member(&pt)?,
            congruent_to_one: (w - 1).rem_euclid(modulus) == 0,
        });
    }
    let pass = rows.iter().all(|r| r.in_disc == r.congruent_to_one);
    Ok(HidaReport { n, rows, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Ring;

    fn hida_cover(prec: u32) -> (Arc<PadicContext>, Arc<AlgebraModel>) {
        let ctx = PadicContext::qp(3, prec).unwrap();
        let disc = AlgebraModel::disc(&ctx, &[], &["T"], 8).unwrap();
        let t = AdicSeries::var(&disc, "T").unwrap();
        (ctx.clone(), AlgebraModel::cover(&disc, "Y", 2, &t.negate()).unwrap())
    }

    #[test]
    fn lift_reports_missing_roots() {
        let (ctx, cov) = hida_cover(12);
        let ext = Extension::trivial(&ctx);
        // −T = 3·(unit): odd valuation
        let none = cover_lift(&cov, &[PadicElement::from_int(&ctx, -3)], &ext).unwrap();
        assert!(none.is_empty());
        // −T = 2 is not a square mod 3
        let none = cover_lift(&cov, &[PadicElement::from_int(&ctx, -2 * 9)], &ext).unwrap();
        assert!(none.is_empty());
        let two = cover_lift(&cov, &[PadicElement::from_int(&ctx, -9)], &ext).unwrap();
        assert_eq!(two.len(), 2);
        for r in two {
            assert_eq!(&r * &r, PadicElement::from_int(&ctx, 9));
        }
    }

    #[test]
    fn hida_cover_comparison() {
        let (ctx, cov) = hida_cover(12);
        let y = ModelPoint::rational(&cov, vec![PadicElement::zero(&ctx), PadicElement::zero(&ctx)]).unwrap();
        let opts = CoverCompareOptions {
            samples: 40,
            extensions: vec![Extension::trivial(&ctx), Extension::build(&ctx, 2, 1).unwrap()],
            search_budget: 3,
            seed: 5,
        };
        let r = cover_compare(&cov, &y, 3, &opts).unwrap();
        assert!(r.single_fiber);
        assert_eq!(r.containment, Verdict::Pass);
        let l1 = r.levels.iter().find(|c| c.n == 1 && c.kind == NeighborhoodKind::WideOpen).unwrap();
        assert!(l1.equality_witness.is_none());
        let l2 = r.levels.iter().find(|c| c.n == 2 && c.kind == NeighborhoodKind::WideOpen).unwrap();
        assert!(l2.equality_witness.is_some());
        assert!(!r.equality_from(1));
    }

    #[test]
    fn hida_weights() {
        let ctx = PadicContext::qp(3, 20).unwrap();
        for n in 1..=3 {
            let r = hida_weight_check(&ctx, n, 1..=60).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }
}
