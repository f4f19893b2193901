use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cover::{cover_lift, linear_solve_index};
use super::ResidueDomain;
use crate::error::{Error, Result};
use crate::padic::{Extension, PadicElement};
use crate::series::{ModelPoint, Mono, Relation};

#[derive(Debug, Clone)]
pub struct SampleOutcome {
    pub points: Vec<ModelPoint>,
    pub attempts: usize,
    pub diagnostics: Vec<String>,
}

/// A perturbation δ over E with v_E(δ) ≥ lo, drawn with a valuation uniform
/// over [lo, prec) plus the value 0.
pub(super) fn perturbation<R: Rng>(ext: &Extension, lo: u32, rng: &mut R) -> PadicElement {
    let ctx = ext.ext();
    let prec = ctx.precision();
    if lo >= prec {
        return PadicElement::zero(ctx);
    }
    let k = rng.gen_range(lo..=prec);
    if k == prec {
        PadicElement::zero(ctx)
    } else {
        PadicElement::random_with_valuation(ctx, rng, k, prec)
    }
}

/// Up to `count` points of the domain over E, each passing `member`.
pub fn sample(domain: &ResidueDomain, ext: &Extension, count: usize, seed: u64) -> Result<SampleOutcome> {
    if **ext.base() != **domain.model().base() {
        return Err(Error::arg("extension is not over the domain's base field"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = 50 * count.max(1) + 100;
    let mut out = SampleOutcome {
        points: Vec::new(),
        attempts: 0,
        diagnostics: Vec::new(),
    };
    let mut no_root = 0usize;
    let mut undecided = 0usize;
    while out.points.len() < count && out.attempts < budget {
        out.attempts += 1;
        let candidate = match domain.model().relation() {
            Relation::None => disc_candidate(domain, ext, &mut rng),
            Relation::Annulus { m } => annulus_candidate(domain, ext, *m, &mut rng),
            Relation::Cover { d, g } => cover_candidate(domain, ext, *d, g, &mut rng),
        };
        let pt = match candidate {
            Ok(Some(pt)) => pt,
            Ok(None) => {
                no_root += 1;
                continue;
            }
            Err(Error::Domain(_)) | Err(Error::Relation(_)) | Err(Error::NonIntegral) => continue,
            Err(e) => return Err(e),
        };
        match domain.member(&pt) {
            Ok(true) => out.points.push(pt),
            Ok(false) => {}
            Err(Error::Undecidable(_)) | Err(Error::Precision { .. }) => undecided += 1,
            Err(e) => return Err(e),
        }
    }
    if no_root > 0 {
        out.diagnostics.push(format!("{no_root} base points had no cover point over E"));
    }
    if undecided > 0 {
        out.diagnostics.push(format!("{undecided} candidates were undecidable at working precision"));
    }
    if out.points.len() < count {
        out.diagnostics.push(if out.points.is_empty() {
            format!("no point over E found in {} attempts", out.attempts)
        } else {
            format!("budget exhausted after {} of {count} points", out.points.len())
        });
    }
    Ok(out)
}

fn lower(domain: &ResidueDomain, ext: &Extension) -> u32 {
    let (t, strict) = domain.threshold(ext.e_rel() as u32);
    if strict {
        t + 1
    } else {
        t
    }
}

fn disc_candidate<R: Rng>(domain: &ResidueDomain, ext: &Extension, rng: &mut R) -> Result<Option<ModelPoint>> {
    let lo = lower(domain, ext);
    let coords = domain
        .center()
        .coords()
        .iter()
        .map(|x| Ok(&ext.embed(x)? + &perturbation(ext, lo, rng)))
        .collect::<Result<Vec<_>>>()?;
    ModelPoint::new(domain.model(), ext, coords).map(Some)
}

fn annulus_candidate<R: Rng>(domain: &ResidueDomain, ext: &Extension, m: u32, rng: &mut R) -> Result<Option<ModelPoint>> {
    let lo = lower(domain, ext);
    let c = domain.center().coords();
    // perturb the coordinate of smaller valuation; the other is π^m/ζ
    let idx = if c[0].valuation().bound() <= c[1].valuation().bound() { 0 } else { 1 };
    let z = &ext.embed(&c[idx])? + &perturbation(ext, lo, rng);
    let pim = ext.embed(&PadicElement::pi_pow(domain.model().base(), m))?;
    let w = pim.div(&z)?;
    let mut coords = vec![z.clone(), z];
    coords[1 - idx] = w;
    ModelPoint::new(domain.model(), ext, coords).map(Some)
}

fn cover_candidate<R: Rng>(
    domain: &ResidueDomain,
    ext: &Extension,
    d: u32,
    g: &BTreeMap<Mono, PadicElement>,
    rng: &mut R,
) -> Result<Option<ModelPoint>> {
    let lo = lower(domain, ext);
    let c = domain.center().coords();
    let k = c.len() - 1;
    let mut coords = c
        .iter()
        .map(|x| Ok(&ext.embed(x)? + &perturbation(ext, lo, rng)))
        .collect::<Result<Vec<_>>>()?;
    if let Some((j, unit)) = linear_solve_index(domain.model(), g) {
        // g = u·T_j + h(others): T_j = (Y^d − h)/u
        let mut h = PadicElement::zero(ext.ext());
        for (mono, coef) in g {
            if mono[j] > 0 {
                continue;
            }
            let mut t = ext.embed(coef)?;
            for (i, &e) in mono.iter().enumerate() {
                if e > 0 {
                    t = &t * &coords[i].pow(e as u64);
                }
            }
            h = &h + &t;
        }
        let rhs = &coords[k].pow(d as u64) - &h;
        coords[j] = rhs.div(&ext.embed(&unit)?)?;
        return ModelPoint::new(domain.model(), ext, coords).map(Some);
    }
    let roots = cover_lift(domain.model(), &coords[..k], ext)?;
    let y0 = ext.embed(&c[k])?;
    let best = roots
        .into_iter()
        .max_by_key(|r| (r - &y0).valuation().bound());
    match best {
        None => Ok(None),
        Some(r) => {
            coords[k] = r;
            ModelPoint::new(domain.model(), ext, coords).map(Some)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::describe;
    use super::*;
    use crate::linalg::Ring;
    use crate::padic::{PadicContext, Valuation};
    use crate::series::{AdicSeries, AlgebraModel, NeighborhoodKind};

    #[test]
    fn disc_samples_are_members() {
        let ctx = PadicContext::qp(5, 8).unwrap();
        let disc = AlgebraModel::disc(&ctx, &[], &["T"], 6).unwrap();
        let x = ModelPoint::rational(&disc, vec![PadicElement::zero(&ctx)]).unwrap();
        let dom = describe(&disc, &x, 1, NeighborhoodKind::WideOpen).unwrap();
        let s = sample(&dom, &Extension::trivial(&ctx), 30, 7).unwrap();
        assert_eq!(s.points.len(), 30);
        for p in &s.points {
            assert!(p.coords()[0].valuation().bound() >= 1);
        }
        let again = sample(&dom, &Extension::trivial(&ctx), 30, 7).unwrap();
        for (a, b) in s.points.iter().zip(&again.points) {
            assert_eq!(a.coords(), b.coords());
        }
    }

    #[test]
    fn annulus_samples_satisfy_relation() {
        let ctx = PadicContext::qp(3, 10).unwrap();
        let ann = AlgebraModel::annulus(&ctx, "z1", "z2", 2).unwrap();
        let x = ModelPoint::rational(&ann, vec![PadicElement::from_int(&ctx, 3), PadicElement::from_int(&ctx, 3)]).unwrap();
        let dom = describe(&ann, &x, 4, NeighborhoodKind::WideOpen).unwrap();
        let ext = Extension::build(&ctx, 2, 1).unwrap();
        let s = sample(&dom, &ext, 20, 1).unwrap();
        assert_eq!(s.points.len(), 20);
        let pim = ext.embed(&PadicElement::pi_pow(&ctx, 2)).unwrap();
        for p in &s.points {
            assert!((&(&p.coords()[0] * &p.coords()[1]) - &pim).is_zero());
        }
    }

    #[test]
    fn cover_samples() {
        let ctx = PadicContext::qp(3, 12).unwrap();
        let disc = AlgebraModel::disc(&ctx, &[], &["T"], 8).unwrap();
        let t = AdicSeries::var(&disc, "T").unwrap();
        let cov = AlgebraModel::cover(&disc, "Y", 2, &t.negate()).unwrap();
        let y = ModelPoint::rational(&cov, vec![PadicElement::zero(&ctx), PadicElement::zero(&ctx)]).unwrap();
        let dom = describe(&cov, &y, 2, NeighborhoodKind::WideOpen).unwrap();
        let s = sample(&dom, &Extension::trivial(&ctx), 25, 3).unwrap();
        assert_eq!(s.points.len(), 25);
        for p in &s.points {
            let (tv, yv) = (p.coords()[0].valuation(), p.coords()[1].valuation());
            if let (Valuation::Exact(a), Valuation::Exact(b)) = (tv, yv) {
                assert_eq!(a, 2 * b);
            }
        }
    }
}
