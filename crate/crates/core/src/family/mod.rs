//! Families of representations over an algebra model: generator images
//! are matrices of series.

mod audit;
mod strict;
mod trace_algebra;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{GroupPresentation, Letter};
use crate::lattice::{check_shapes, check_table, word_product, IntegralRep};
use crate::linalg::Matrix;
use crate::series::{parse_series, AdicSeries, AlgebraModel, Mono, ModelPoint};

pub use audit::{
    compare_points, family_constancy_audit, FamilyAuditOptions, FamilyAuditReport, FamilyExtensionAudit, PairComparison,
    PairVerdict,
};
pub use strict::{strict_constancy_check, ConjugacyCheck, EntryWitness, StrictOptions, StrictReport};
pub use trace_algebra::{trace_algebra_full, AlgebraVerdict, TraceAlgebraReport};

/// All monomials in `nvars` variables of total degree ≤ `deg`, by degree.
pub(crate) fn monomials_up_to(nvars: usize, deg: u32) -> Vec<Mono> {
    let mut out: Vec<Mono> = vec![vec![0; nvars]];
    let mut layer = out.clone();
    for _ in 0..deg {
        let mut next: Vec<Mono> = Vec::new();
        for m in &layer {
            // extend only at or after the last nonzero position to avoid repeats
            let start = m.iter().rposition(|&e| e > 0).unwrap_or(0);
            for i in start..nvars {
                let mut m2 = m.clone();
                m2[i] += 1;
                next.push(m2);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// A representation of a group over the integral algebra of a model.
#[derive(Debug, Clone)]
pub struct RepFamily {
    group: Arc<GroupPresentation>,
    dim: usize,
    model: Arc<AlgebraModel>,
    gens: Vec<Matrix<AdicSeries>>,
    invs: Vec<Matrix<AdicSeries>>,
}

impl RepFamily {
    pub fn new(group: Arc<GroupPresentation>, model: &Arc<AlgebraModel>, gens: Vec<Matrix<AdicSeries>>) -> Result<Self> {
        let dim = check_shapes(&group, &gens)?;
        let mut invs = Vec::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            if g.entries().iter().any(|s| **s.model() != **model) {
                return Err(Error::arg("matrix entries live on another model"));
            }
            let det_inv = g.det().inverse().map_err(|_| {
                Error::Domain(format!(
                    "image of {} does not have unit determinant",
                    group.generators()[i]
                ))
            })?;
            invs.push(g.adjugate().scale(&det_inv));
        }
        check_table(&group, &gens, &invs, |m| m)?;
        Ok(RepFamily {
            group,
            dim,
            model: model.clone(),
            gens,
            invs,
        })
    }

    /// Generator images given as series literals, row by row.
    pub fn from_strings(group: Arc<GroupPresentation>, model: &Arc<AlgebraModel>, gens: &[Vec<Vec<String>>]) -> Result<Self> {
        let mats = gens
            .iter()
            .map(|rows| {
                let rows = rows
                    .iter()
                    .map(|r| r.iter().map(|s| parse_series(model, s)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                let d = rows.len();
                if rows.iter().any(|r| r.len() != d) {
                    return Err(Error::arg("generator image is not square"));
                }
                Ok(Matrix::from_rows(rows))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(group, model, mats)
    }

    pub fn group(&self) -> &Arc<GroupPresentation> {
        &self.group
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn model(&self) -> &Arc<AlgebraModel> {
        &self.model
    }
    pub fn gen_images(&self) -> &[Matrix<AdicSeries>] {
        &self.gens
    }
    pub fn inverse_images(&self) -> &[Matrix<AdicSeries>] {
        &self.invs
    }

    pub fn word_matrix(&self, w: &[Letter]) -> Matrix<AdicSeries> {
        word_product(&self.gens, &self.invs, w, |m| m)
    }

    /// Conjugate family C^{-1}·ρ·C for C with unit determinant.
    pub fn conjugate(&self, c: &Matrix<AdicSeries>) -> Result<Self> {
        let cinv = c.adjugate().scale(&c.det().inverse()?);
        let gens = self.gens.iter().map(|g| cinv.mul(g).mul(c)).collect();
        Self::new(self.group.clone(), &self.model, gens)
    }
}

/// Entrywise evaluation at a point over E.
pub fn specialize(fam: &RepFamily, point: &ModelPoint) -> Result<IntegralRep> {
    if **point.model() != *fam.model {
        return Err(Error::arg("point lives on a different model"));
    }
    let ext = point.extension();
    let mats = fam
        .gens
        .iter()
        .map(|g| g.try_map(|s| s.evaluator(ext)?.eval(point)))
        .collect::<Result<Vec<_>>>()?;
    IntegralRep::new(fam.group.clone(), ext.ext(), mats)
}

/// Trace of the product matrix of a word.
pub fn trace_of_word(fam: &RepFamily, w: &[Letter]) -> AdicSeries {
    if w.is_empty() {
        return AdicSeries::from_int(&fam.model, fam.dim as i64);
    }
    fam.word_matrix(w).trace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Ring;
    use crate::padic::{PadicContext, PadicElement};

    pub(crate) fn one_plus_t(p: u64, prec: u32, cap: u32, entry: &str) -> RepFamily {
        let ctx = PadicContext::qp(p, prec).unwrap();
        let model = AlgebraModel::disc(&ctx, &[], &["T"], cap).unwrap();
        let g = Arc::new(GroupPresentation::free(&["Frob"]).unwrap());
        RepFamily::from_strings(g, &model, &[vec![vec![entry.to_string()]]]).unwrap()
    }

    #[test]
    fn monomial_enumeration() {
        assert_eq!(monomials_up_to(1, 3).len(), 4);
        assert_eq!(monomials_up_to(2, 2).len(), 6);
        let m = monomials_up_to(3, 3);
        assert_eq!(m.len(), 20);
        let mut sorted = m.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 20);
    }

    #[test]
    fn specialization_examples() {
        let fam = one_plus_t(5, 8, 6, "1+T");
        let ctx = fam.model().base().clone();
        let x = ModelPoint::rational(fam.model(), vec![PadicElement::from_int(&ctx, 5)]).unwrap();
        let rep = specialize(&fam, &x).unwrap();
        assert_eq!(rep.gen_images()[0].get(0, 0).truncate(6), PadicElement::from_int(&ctx, 6).truncate(6));

        let model = AlgebraModel::disc(&ctx, &[], &["T"], 6).unwrap();
        let g = Arc::new(GroupPresentation::free(&["g"]).unwrap());
        let rows = vec![vec!["1".to_string(), "T".to_string()], vec!["0".to_string(), "1".to_string()]];
        let fam = RepFamily::from_strings(g, &model, &[rows]).unwrap();
        let x = ModelPoint::rational(&model, vec![PadicElement::from_int(&ctx, 25)]).unwrap();
        let rep = specialize(&fam, &x).unwrap();
        let m = &rep.gen_images()[0];
        assert_eq!(m.get(0, 1).valuation().exact(), Some(2));
        assert!(m.get(1, 0).is_zero());
    }

    #[test]
    fn traces() {
        let fam = one_plus_t(3, 8, 6, "1+T");
        let g = fam.group().clone();
        assert_eq!(trace_of_word(&fam, &[]).constant_term(), PadicElement::one(fam.model().base()));
        let ff = g.parse_word("Frob^2").unwrap();
        assert_eq!(trace_of_word(&fam, &ff), parse_series(fam.model(), "1+2*T+T^2").unwrap());
        let inv = g.parse_word("Frob^-1").unwrap();
        let prod = trace_of_word(&fam, &inv).times(&parse_series(fam.model(), "1+T").unwrap());
        assert_eq!(prod, AdicSeries::from_int(fam.model(), 1));
    }

    #[test]
    fn non_unit_determinant_rejected() {
        let ctx = PadicContext::qp(3, 8).unwrap();
        let model = AlgebraModel::disc(&ctx, &[], &["T"], 6).unwrap();
        let g = Arc::new(GroupPresentation::free(&["Frob"]).unwrap());
        assert!(matches!(
            RepFamily::from_strings(g, &model, &[vec![vec!["T".into()]]]),
            Err(Error::Domain(_))
        ));
    }
}
