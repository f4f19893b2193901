use serde::Serialize;

use super::{iso_mod, reduce_rep_mod, semisimplify_mod_p, IntegralRep, IsoOptions, IsoReport, IsoVerdict, MeataxeOptions};
use crate::error::{Error, Result};
use crate::group::Word;

#[derive(Debug, Clone, Default)]
pub struct CarayolOptions {
    pub iso: IsoOptions,
    pub meataxe: MeataxeOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CarayolVerdict {
    Pass,
    PreconditionFailed,
    Inconclusive,
    /// Isomorphism proven impossible although the hypotheses hold.
    TheoremViolation,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceMismatch {
    pub word: String,
    pub trace_a: String,
    pub trace_b: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CarayolReport {
    pub verdict: CarayolVerdict,
    pub n: u32,
    /// None when every element of a finite group was checked.
    pub word_cap: Option<usize>,
    pub words_checked: usize,
    pub a_absolutely_irreducible: bool,
    pub b_absolutely_irreducible: bool,
    pub trace_mismatch: Option<TraceMismatch>,
    pub iso: Option<IsoReport>,
    pub reason: Option<String>,
}

/// Checks that residually absolutely irreducible representations with
/// traces congruent mod π^n are isomorphic mod π^n.
pub fn carayol_audit(a: &IntegralRep, b: &IntegralRep, n: u32, word_cap: usize, opts: &CarayolOptions) -> Result<CarayolReport> {
    if a.group() != b.group() || a.dim() != b.dim() || **a.ctx() != **b.ctx() {
        return Err(Error::arg("representations differ in group, dimension or coefficients"));
    }
    let group = a.group();
    let mut report = CarayolReport {
        verdict: CarayolVerdict::PreconditionFailed,
        n,
        word_cap: if group.is_finite() { None } else { Some(word_cap) },
        words_checked: 0,
        a_absolutely_irreducible: false,
        b_absolutely_irreducible: false,
        trace_mismatch: None,
        iso: None,
        reason: None,
    };
    report.a_absolutely_irreducible = semisimplify_mod_p(&reduce_rep_mod(a, 1)?, &opts.meataxe)?.is_absolutely_irreducible();
    report.b_absolutely_irreducible = semisimplify_mod_p(&reduce_rep_mod(b, 1)?, &opts.meataxe)?.is_absolutely_irreducible();
    if !(report.a_absolutely_irreducible && report.b_absolutely_irreducible) {
        report.reason = Some("residual representation is not absolutely irreducible".into());
        return Ok(report);
    }
    let words: Vec<Word> = if group.is_finite() {
        group.element_words()?.to_vec()
    } else {
        group.words_up_to(word_cap)
    };
    for w in &words {
        report.words_checked += 1;
        let (ta, tb) = (a.trace(w), b.trace(w));
        if !ta.congruent_mod(&tb, n)? {
            report.trace_mismatch = Some(TraceMismatch {
                word: group.word_to_string(w),
                trace_a: ta.to_string(),
                trace_b: tb.to_string(),
            });
            report.reason = Some("traces are not congruent".into());
            return Ok(report);
        }
    }
    let iso = iso_mod(&reduce_rep_mod(a, n)?, &reduce_rep_mod(b, n)?, &opts.iso)?;
    report.verdict = match iso.verdict {
        IsoVerdict::Isomorphic => CarayolVerdict::Pass,
        IsoVerdict::Inconclusive => CarayolVerdict::Inconclusive,
        IsoVerdict::NotIsomorphic => CarayolVerdict::TheoremViolation,
    };
    report.iso = Some(iso);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::group::GroupPresentation;
    use crate::padic::PadicContext;

    #[test]
    fn reducible_pair_is_excluded() {
        let ctx = PadicContext::qp(5, 8).unwrap();
        let g = Arc::new(GroupPresentation::free(&["Frob"]).unwrap());
        let id = IntegralRep::from_ints(g.clone(), &ctx, &[vec![vec![1, 0], vec![0, 1]]]).unwrap();
        let diag = IntegralRep::from_ints(g, &ctx, &[vec![vec![6, 0], vec![0, -4]]]).unwrap();
        let r = carayol_audit(&id, &diag, 2, 4, &CarayolOptions::default()).unwrap();
        assert_eq!(r.verdict, CarayolVerdict::PreconditionFailed);
        assert!(!r.a_absolutely_irreducible);
    }

    #[test]
    fn symmetric_group_self_pair() {
        let ctx = PadicContext::qp(5, 6).unwrap();
        let s3 = Arc::new(GroupPresentation::symmetric(3).unwrap());
        let rep = IntegralRep::from_ints(s3, &ctx, &[vec![vec![-1, 1], vec![0, 1]], vec![vec![0, -1], vec![1, -1]]]).unwrap();
        let r = carayol_audit(&rep, &rep, 3, 0, &CarayolOptions::default()).unwrap();
        assert_eq!(r.verdict, CarayolVerdict::Pass);
        assert_eq!(r.words_checked, 6);
        assert_eq!(r.word_cap, None);
    }
}
