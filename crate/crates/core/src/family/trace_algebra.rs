use std::collections::BTreeMap;

use serde::Serialize;

use super::{monomials_up_to, RepFamily};
use crate::error::{Error, Result};
use crate::linalg::{ChainRing, Matrix, Ring};
use crate::padic::PadicElement;
use crate::series::{AdicSeries, Relation, VarKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraVerdict {
    Full,
    Proper,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceAlgebraReport {
    pub verdict: AlgebraVerdict,
    pub n: u32,
    pub degree_budget: u32,
    /// Rank of the truncated algebra over O_L/π^n.
    pub monomials: usize,
    /// Length of (truncated algebra)/(span) as an O_L-module.
    pub colength: u32,
    pub rounds: usize,
    pub reason: Option<String>,
}

/// Whether the O_L-algebra generated by the matrix entries of all ρ(g)
/// is everything, inside O_L[[vars]] truncated at (π^n, degree > budget).
pub fn trace_algebra_full(fam: &RepFamily, n: u32, degree_budget: u32) -> Result<TraceAlgebraReport> {
    let model = fam.model();
    if !matches!(model.relation(), Relation::None) {
        return Err(Error::Unsupported("the span test needs a disc model".into()));
    }
    let mons = monomials_up_to(model.nvars(), degree_budget);
    let index: BTreeMap<&Vec<u32>, usize> = mons.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut report = TraceAlgebraReport {
        verdict: AlgebraVerdict::Inconclusive,
        n,
        degree_budget,
        monomials: mons.len(),
        colength: 0,
        rounds: 0,
        reason: None,
    };
    if model.kinds().contains(&VarKind::Open) && degree_budget > model.degree_cap() {
        report.reason = Some(format!(
            "degree budget {degree_budget} exceeds the model's degree cap {}",
            model.degree_cap()
        ));
        return Ok(report);
    }
    let entries: Vec<&AdicSeries> = fam
        .gen_images()
        .iter()
        .chain(fam.inverse_images())
        .flat_map(|m| m.entries().iter())
        .collect();
    if entries.iter().any(|s| s.precision() < n) {
        report.reason = Some(format!("entries are not known mod π^{n}"));
        return Ok(report);
    }
    let ring = ChainRing::new(model.base(), n)?;
    let to_vec = |s: &AdicSeries| -> Result<Vec<PadicElement>> {
        let mut v = vec![ring.zero(); mons.len()];
        for (m, c) in s.terms() {
            if let Some(&i) = index.get(m) {
                v[i] = ring.reduce(&c.truncate(n))?;
            }
        }
        Ok(v)
    };
    let to_series = |v: &[PadicElement]| {
        let terms = mons
            .iter()
            .zip(v)
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        AdicSeries::from_terms(model, terms, n)
    };

    let mut vectors = vec![to_vec(&AdicSeries::from_int(model, 1))?];
    for e in &entries {
        vectors.push(to_vec(e)?);
    }
    let mut span = ring.row_span(&Matrix::from_rows(vectors))?;
    let mut colength = span.colength(n);
    // each round multiplies the span by every entry; lengths strictly drop
    let max_rounds = (n as usize) * mons.len() + 2;
    loop {
        report.rounds += 1;
        if report.rounds > max_rounds {
            report.reason = Some("span did not stabilize".into());
            return Ok(report);
        }
        let mut next = span.generators.clone();
        for g in &span.generators {
            let s = to_series(g);
            for e in &entries {
                next.push(to_vec(&s.times(e))?);
            }
        }
        span = ring.row_span(&Matrix::from_rows(next))?;
        let c = span.colength(n);
        if c == colength {
            break;
        }
        colength = c;
    }
    report.colength = colength;
    report.verdict = if span.is_full() {
        AlgebraVerdict::Full
    } else {
        AlgebraVerdict::Proper
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::super::tests::one_plus_t;
    use super::*;

    #[test]
    fn one_plus_t_is_full() {
        for p in [3, 5] {
            for n in 1..=3 {
                let fam = one_plus_t(p, 8, 6, "1+T");
                assert_eq!(trace_algebra_full(&fam, n, 6).unwrap().verdict, AlgebraVerdict::Full);
                let fam = one_plus_t(p, 8, 6, "1+p*T");
                let r = trace_algebra_full(&fam, n, 6).unwrap();
                assert_eq!(r.verdict, AlgebraVerdict::Proper);
                assert!(r.colength > 0);
            }
        }
    }

    #[test]
    fn constant_is_proper() {
        let fam = one_plus_t(5, 8, 4, "2");
        let r = trace_algebra_full(&fam, 2, 4).unwrap();
        assert_eq!(r.verdict, AlgebraVerdict::Proper);
        // everything but the constants is missing
        assert_eq!(r.colength, 2 * 4);
        let r = trace_algebra_full(&fam, 2, 5).unwrap();
        assert_eq!(r.verdict, AlgebraVerdict::Inconclusive);
    }
}
