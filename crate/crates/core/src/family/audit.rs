use serde::Serialize;

use super::{specialize, RepFamily};
use crate::domain::{sample, ResidueDomain};
use crate::error::{Error, Result};
use crate::group::Word;
use crate::lattice::{iso_mod, reduce_rep_mod, IsoOptions, IsoVerdict};
use crate::padic::{gamma_exponent, Extension};
use crate::report::{par_map, sub_seed, Verdict};
use crate::series::ModelPoint;

#[derive(Debug, Clone)]
pub struct FamilyAuditOptions {
    pub samples_per_ext: usize,
    /// Words up to this length are compared by trace before the
    /// isomorphism search (free groups).
    pub word_cap: usize,
    pub seed: u64,
    pub single_thread: bool,
    pub iso: IsoOptions,
}

impl Default for FamilyAuditOptions {
    fn default() -> Self {
        FamilyAuditOptions {
            samples_per_ext: 30,
            word_cap: 3,
            seed: 0,
            single_thread: false,
            iso: IsoOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairVerdict {
    Congruent,
    NotCongruent,
    Undecided,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairComparison {
    pub verdict: PairVerdict,
    pub gamma: u32,
    pub point: Vec<String>,
    /// A word whose traces differ mod π_E^γ.
    pub word: Option<String>,
    pub certificate: Option<String>,
    pub intertwiner: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyExtensionAudit {
    pub e_rel: usize,
    pub f_rel: usize,
    pub gamma: u32,
    pub sampled: usize,
    pub failures: Vec<PairComparison>,
    pub undecided: usize,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyAuditReport {
    pub verdict: Verdict,
    pub n: u32,
    pub word_cap: Option<usize>,
    pub extensions: Vec<FamilyExtensionAudit>,
}

fn comparison_words(fam: &RepFamily, cap: usize) -> Result<Vec<Word>> {
    let g = fam.group();
    Ok(if g.is_finite() {
        g.element_words()?.to_vec()
    } else {
        g.words_up_to(cap)
    })
}

/// Compares the fibers at x and y (points over one extension E) as
/// O_E/π_E^γ[G]-modules, γ = γ_{E/L}(n).
pub fn compare_points(fam: &RepFamily, x: &ModelPoint, y: &ModelPoint, n: u32, word_cap: usize, iso: &IsoOptions) -> Result<PairComparison> {
    if **x.extension().ext() != **y.extension().ext() {
        return Err(Error::arg("points must lie over one extension"));
    }
    let gamma = gamma_exponent(x.extension().e_rel() as u32, n)?;
    let mut out = PairComparison {
        verdict: PairVerdict::Undecided,
        gamma,
        point: y.coords().iter().map(|c| c.to_string()).collect(),
        word: None,
        certificate: None,
        intertwiner: None,
    };
    let reduce = |pt: &ModelPoint| -> Result<Option<_>> {
        match specialize(fam, pt).and_then(|r| reduce_rep_mod(&r, gamma)) {
            Ok(r) => Ok(Some(r)),
            Err(Error::Precision { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let (Some(a), Some(b)) = (reduce(x)?, reduce(y)?) else {
        out.certificate = Some(format!("fibers are not known mod π_E^{gamma}"));
        return Ok(out);
    };
    for w in comparison_words(fam, word_cap)? {
        if a.word_matrix(&w).trace() != b.word_matrix(&w).trace() {
            out.verdict = PairVerdict::NotCongruent;
            out.word = Some(fam.group().word_to_string(&w));
            out.certificate = Some("traces differ".into());
            return Ok(out);
        }
    }
    let r = iso_mod(&a, &b, iso)?;
    out.verdict = match r.verdict {
        IsoVerdict::Isomorphic => PairVerdict::Congruent,
        IsoVerdict::NotIsomorphic => PairVerdict::NotCongruent,
        IsoVerdict::Inconclusive => PairVerdict::Undecided,
    };
    out.certificate = r.certificate;
    out.intertwiner = r.intertwiner_entries;
    Ok(out)
}

/// Samples the domain over each extension and compares every fiber with
/// the fiber at the center.
pub fn family_constancy_audit(
    fam: &RepFamily,
    domain: &ResidueDomain,
    n: u32,
    extensions: &[Extension],
    opts: &FamilyAuditOptions,
) -> Result<FamilyAuditReport> {
    if **fam.model() != **domain.model() {
        return Err(Error::arg("family and domain live on different models"));
    }
    let iso = IsoOptions {
        single_thread: opts.single_thread,
        ..opts.iso.clone()
    };
    let mut reports = Vec::new();
    for (ei, ext) in extensions.iter().enumerate() {
        let gamma = gamma_exponent(ext.e_rel() as u32, n)?;
        let x = domain.center().base_change(ext)?;
        let s = sample(domain, ext, opts.samples_per_ext, sub_seed(opts.seed, ei as u64, 1))?;
        let mut rep = FamilyExtensionAudit {
            e_rel: ext.e_rel(),
            f_rel: ext.f_rel(),
            gamma,
            sampled: s.points.len(),
            failures: Vec::new(),
            undecided: 0,
            diagnostics: s.diagnostics,
        };
        let outcomes = par_map(s.points, opts.single_thread, |y: ModelPoint| {
            compare_points(fam, &x, &y, n, opts.word_cap, &iso)
        });
        for o in outcomes {
            let c = o?;
            match c.verdict {
                PairVerdict::Congruent => {}
                PairVerdict::NotCongruent => rep.failures.push(c),
                PairVerdict::Undecided => rep.undecided += 1,
            }
        }
        reports.push(rep);
    }
    let verdict = Verdict::all(reports.iter().map(|r| {
        if !r.failures.is_empty() {
            Verdict::Fail
        } else if r.undecided > 0 || r.sampled == 0 {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        }
    }));
    Ok(FamilyAuditReport {
        verdict,
        n,
        word_cap: (!fam.group().is_finite()).then_some(opts.word_cap),
        extensions: reports,
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::one_plus_t;
    use super::*;
    use crate::domain::describe;
    use crate::padic::PadicElement;
    use crate::series::NeighborhoodKind;

    #[test]
    fn one_plus_t_audit_and_boundary() {
        let fam = one_plus_t(3, 10, 8, "1+T");
        let ctx = fam.model().base().clone();
        let exts = vec![Extension::trivial(&ctx), Extension::build(&ctx, 2, 1).unwrap()];
        let x = ModelPoint::rational(fam.model(), vec![PadicElement::zero(&ctx)]).unwrap();
        let opts = FamilyAuditOptions {
            samples_per_ext: 10,
            ..Default::default()
        };
        for n in 1..=3 {
            let dom = describe(fam.model(), &x, n, NeighborhoodKind::WideOpen).unwrap();
            let r = family_constancy_audit(&fam, &dom, n, &exts, &opts).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "n = {n}");
        }
        for n in 2..=3 {
            let y = ModelPoint::rational(fam.model(), vec![PadicElement::pi_pow(&ctx, n - 1)]).unwrap();
            let c = compare_points(&fam, &x, &y, n, 3, &IsoOptions::default()).unwrap();
            assert_eq!(c.verdict, PairVerdict::NotCongruent);
            assert_eq!(c.word.as_deref(), Some("Frob"));
        }
    }

    #[test]
    fn points_zero_and_one_differ_mod_p() {
        // 1 + T is not a unit on the closed disc; the unipotent family is
        let ctx = crate::padic::PadicContext::qp(5, 8).unwrap();
        let model = crate::series::AlgebraModel::disc(&ctx, &["T"], &[], 0).unwrap();
        let g = std::sync::Arc::new(crate::group::GroupPresentation::free(&["Frob"]).unwrap());
        assert!(RepFamily::from_strings(g.clone(), &model, &[vec![vec!["1+T".into()]]]).is_err());
        let rows = vec![vec!["1".to_string(), "T".to_string()], vec!["0".to_string(), "1".to_string()]];
        let fam = RepFamily::from_strings(g, &model, &[rows]).unwrap();
        let x = ModelPoint::rational(&model, vec![PadicElement::zero(&ctx)]).unwrap();
        let y = ModelPoint::rational(&model, vec![PadicElement::one(&ctx)]).unwrap();
        let c = compare_points(&fam, &x, &y, 1, 2, &IsoOptions::default()).unwrap();
        assert_eq!(c.verdict, PairVerdict::NotCongruent);
        assert_eq!(c.word, None);
    }
}
