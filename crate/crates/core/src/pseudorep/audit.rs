use serde::Serialize;

use super::PseudoRep2;
use crate::domain::{pointwise_constancy_audit, AuditOptions, FunctionAuditReport, ResidueDomain};
use crate::error::Result;
use crate::padic::{Extension, PadicElement};
use crate::report::Verdict;
use crate::series::{AdicSeries, ConstancyVerdict, NeighborhoodKind, Substitution};

#[derive(Debug, Clone, Serialize)]
pub struct WordAudit {
    pub word: String,
    pub report: FunctionAuditReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct PseudoAuditReport {
    pub verdict: Verdict,
    pub n: u32,
    pub word_cap: Option<usize>,
    pub words: Vec<WordAudit>,
}

/// Runs the pointwise audit on T(w) for every word in the support.
pub fn pseudorep_constancy_audit(
    t: &PseudoRep2<AdicSeries>,
    domain: &ResidueDomain,
    n: u32,
    extensions: &[Extension],
    opts: &AuditOptions,
) -> Result<PseudoAuditReport> {
    let g = t.group();
    let mut words = Vec::new();
    for w in t.support() {
        let f = t.value(&w).expect("support words carry values");
        words.push(WordAudit {
            word: g.word_to_string(&w),
            report: pointwise_constancy_audit(f, domain, n, extensions, opts)?,
        });
    }
    Ok(PseudoAuditReport {
        verdict: Verdict::all(words.iter().map(|w| w.report.verdict)),
        n,
        word_cap: t.word_cap(),
        words,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PseudoStrictReport {
    pub constant: bool,
    pub n: u32,
    pub kind: NeighborhoodKind,
    /// First word whose recentered value is not constant mod π^n.
    pub witness_word: Option<String>,
    pub words: Vec<(String, ConstancyVerdict)>,
}

/// Recenters every T(w) around `center` and tests constancy mod π^n.
pub fn pseudorep_strict_check(
    t: &PseudoRep2<AdicSeries>,
    center: &[PadicElement],
    n: u32,
    kind: NeighborhoodKind,
) -> Result<PseudoStrictReport> {
    let g = t.group();
    let model = t.sample_value().model().clone();
    let sub = Substitution::new(&model, center, kind.scale(n), kind, None)?;
    let mut report = PseudoStrictReport {
        constant: true,
        n,
        kind,
        witness_word: None,
        words: Vec::new(),
    };
    for w in t.support() {
        let f = sub.apply(t.value(&w).expect("support words carry values"))?;
        let v = f.is_constant_mod(n)?;
        let name = g.word_to_string(&w);
        if !v.constant && report.witness_word.is_none() {
            report.constant = false;
            report.witness_word = Some(name.clone());
        }
        report.words.push((name, v));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::super::{axiom_check, from_family_trace};
    use super::*;
    use crate::domain::describe;
    use crate::family::RepFamily;
    use crate::group::GroupPresentation;
    use crate::padic::PadicContext;
    use crate::series::{parse_series, AlgebraModel, ModelPoint};

    fn two_plus_t(p: u64) -> PseudoRep2<AdicSeries> {
        // trace of (1+T) ⊕ 1
        let ctx = PadicContext::qp(p, 10).unwrap();
        let model = AlgebraModel::disc(&ctx, &[], &["T"], 8).unwrap();
        let g = Arc::new(GroupPresentation::free(&["Frob"]).unwrap());
        let rows = vec![vec!["1+T".to_string(), "0".to_string()], vec!["0".to_string(), "1".to_string()]];
        let fam = RepFamily::from_strings(g, &model, &[rows]).unwrap();
        from_family_trace(&fam, 4).unwrap()
    }

    #[test]
    fn sum_of_characters() {
        let t = two_plus_t(3);
        let model = t.sample_value().model().clone();
        let frob = t.group().parse_word("Frob").unwrap();
        assert_eq!(*t.value(&frob).unwrap(), parse_series(&model, "2+T").unwrap());
        let d = t.det(&frob).unwrap().unwrap();
        assert_eq!(d, parse_series(&model, "1+T").unwrap());
        assert!(axiom_check(&t, 40, 3).unwrap().pass);
    }

    #[test]
    fn audit_and_strict_levels() {
        let t = two_plus_t(5);
        let model = t.sample_value().model().clone();
        let ctx = model.base().clone();
        let x = ModelPoint::rational(&model, vec![PadicElement::zero(&ctx)]).unwrap();
        let exts = vec![Extension::trivial(&ctx)];
        let opts = AuditOptions {
            samples_per_ext: 8,
            ..Default::default()
        };
        for n in 1..=2 {
            let dom = describe(&model, &x, n, NeighborhoodKind::WideOpen).unwrap();
            let r = pseudorep_constancy_audit(&t, &dom, n, &exts, &opts).unwrap();
            assert_eq!(r.verdict, Verdict::Pass);
            let s = pseudorep_strict_check(&t, &[PadicElement::zero(&ctx)], n, NeighborhoodKind::Affinoid).unwrap();
            assert!(s.constant);
            let s = pseudorep_strict_check(&t, &[PadicElement::zero(&ctx)], n, NeighborhoodKind::WideOpen).unwrap();
            assert!(!s.constant);
            assert_eq!(s.witness_word.as_deref(), Some("Frob"));
        }
    }
}
