use serde::Serialize;

use super::PseudoRep2;
use crate::error::{Error, Result};
use crate::group::{Letter, Word};
use crate::lattice::{semisimplify_fq, MeataxeOptions};
use crate::linalg::fq::{self, FqMatrix};
use crate::padic::{Fq, PadicElement, ResidueField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MfVerdict {
    MultiplicityFree,
    NotMultiplicityFree,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct MfFactor {
    pub dim: usize,
    pub absolutely_irreducible: bool,
    /// Character values on the elements, in element order.
    pub character: Vec<Fq>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MfReport {
    pub verdict: MfVerdict,
    pub field_size: u64,
    /// (dim, multiplicity) of the irreducible factors of the regular
    /// representation.
    pub regular_shape: Vec<(usize, usize)>,
    pub decomposition: Vec<MfFactor>,
    pub reason: Option<String>,
}

fn word_image(k: &ResidueField, gens: &[FqMatrix], invs: &[FqMatrix], dim: usize, w: &[Letter]) -> FqMatrix {
    w.iter().fold(fq::identity(dim), |acc, l| {
        let m = if l.inv { &invs[l.gen] } else { &gens[l.gen] };
        fq::mul(k, &acc, m)
    })
}

fn trace(k: &ResidueField, m: &FqMatrix) -> Fq {
    (0..m.rows()).fold(k.zero(), |acc, i| k.add(acc, *m.get(i, i)))
}

/// Whether T mod π is the trace of a sum of pairwise non-isomorphic
/// irreducibles over the residue field of its coefficients. Candidates are
/// the irreducible factors of the regular representation.
pub fn residually_multiplicity_free(t: &PseudoRep2<PadicElement>, opts: &MeataxeOptions) -> Result<MfReport> {
    let g = t.group();
    let order = g
        .order()
        .ok_or_else(|| Error::Unsupported("residual multiplicity needs a finite group".into()))?;
    let ctx = t.value(&[]).expect("finite groups carry every value").ctx().clone();
    let k = ResidueField::of(&ctx);
    let words: Vec<Word> = g.element_words()?.to_vec();
    let tbar: Vec<Fq> = words
        .iter()
        .map(|w| {
            let v = t.value(w).expect("finite groups carry every value");
            if v.precision() == 0 {
                return Err(Error::Precision { needed: 1, available: 0 });
            }
            Ok(k.from_element(v))
        })
        .collect::<Result<_>>()?;

    // left regular representation: e_x ↦ e_{gx}
    let regular: Vec<FqMatrix> = (0..g.generators().len())
        .map(|i| {
            let s = g.element_of(&[Letter { gen: i, inv: false }])?;
            let mut m = fq::zeros(order, order);
            for x in 0..order {
                m.set(g.mul(s, x), x, k.one());
            }
            Ok(m)
        })
        .collect::<Result<_>>()?;
    let ss = semisimplify_fq(&k, &regular, order, opts)?;
    let mut report = MfReport {
        verdict: MfVerdict::Inconclusive,
        field_size: k.size(),
        regular_shape: ss.factors.iter().map(|f| (f.dim, f.multiplicity)).collect(),
        decomposition: Vec::new(),
        reason: None,
    };
    let candidates: Vec<MfFactor> = ss
        .factors
        .iter()
        .filter(|f| f.dim <= 2)
        .map(|f| {
            let invs: Vec<FqMatrix> = f
                .gen_images
                .iter()
                .map(|m| fq::inverse(&k, m).expect("images of group elements are invertible"))
                .collect();
            MfFactor {
                dim: f.dim,
                absolutely_irreducible: f.absolutely_irreducible,
                character: words.iter().map(|w| trace(&k, &word_image(&k, &f.gen_images, &invs, f.dim, w))).collect(),
            }
        })
        .collect();

    for c in candidates.iter().filter(|c| c.dim == 2) {
        if c.character == tbar {
            report.verdict = MfVerdict::MultiplicityFree;
            if !c.absolutely_irreducible {
                report.reason = Some("splits into two conjugate characters over the quadratic extension".into());
            }
            report.decomposition.push(c.clone());
            return Ok(report);
        }
    }
    let ones: Vec<&MfFactor> = candidates.iter().filter(|c| c.dim == 1).collect();
    for (i, a) in ones.iter().enumerate() {
        for b in &ones[i..] {
            let sum: Vec<Fq> = a.character.iter().zip(&b.character).map(|(x, y)| k.add(*x, *y)).collect();
            if sum == tbar {
                report.verdict = if std::ptr::eq(*a, *b) {
                    MfVerdict::NotMultiplicityFree
                } else {
                    MfVerdict::MultiplicityFree
                };
                report.decomposition = vec![(*a).clone(), (*b).clone()];
                return Ok(report);
            }
        }
    }
    report.reason = Some("T mod π is not a sum of irreducible characters over the residue field".into());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::super::{from_rep_trace, PseudoRep2};
    use super::*;
    use crate::group::GroupPresentation;
    use crate::lattice::IntegralRep;
    use crate::padic::PadicContext;

    fn check(g: GroupPresentation, p: u64, gens: &[Vec<Vec<i64>>]) -> MfVerdict {
        let ctx = PadicContext::qp(p, 4).unwrap();
        let rep = IntegralRep::from_ints(Arc::new(g), &ctx, gens).unwrap();
        let t = from_rep_trace(&rep, 0).unwrap();
        residually_multiplicity_free(&t, &MeataxeOptions::default()).unwrap().verdict
    }

    #[test]
    fn symmetric_group_over_f5() {
        let s3 = || GroupPresentation::symmetric(3).unwrap();
        let standard = [vec![vec![-1, 1], vec![0, 1]], vec![vec![0, -1], vec![1, -1]]];
        assert_eq!(check(s3(), 5, &standard), MfVerdict::MultiplicityFree);
        let triv_sign = [vec![vec![1, 0], vec![0, -1]], vec![vec![1, 0], vec![0, 1]]];
        assert_eq!(check(s3(), 5, &triv_sign), MfVerdict::MultiplicityFree);
        let two_triv = [vec![vec![1, 0], vec![0, 1]], vec![vec![1, 0], vec![0, 1]]];
        assert_eq!(check(s3(), 5, &two_triv), MfVerdict::NotMultiplicityFree);
    }

    fn cyclic_table(a: i64, b: i64) -> MfVerdict {
        // T(g^j) = a^j + b^j; only residues matter
        let ctx = PadicContext::qp(5, 4).unwrap();
        let g = Arc::new(GroupPresentation::cyclic(4).unwrap());
        let entries = (0..4u32)
            .map(|j| {
                let w = g.parse_word(&format!("g^{j}")).unwrap();
                (w, PadicElement::from_int(&ctx, a.pow(j) + b.pow(j)))
            })
            .collect();
        let t = PseudoRep2::from_table(g, entries).unwrap();
        residually_multiplicity_free(&t, &MeataxeOptions::default()).unwrap().verdict
    }

    #[test]
    fn cyclic_group_over_f5() {
        // 2 has order 4 mod 5
        assert_eq!(cyclic_table(1, 2), MfVerdict::MultiplicityFree);
        assert_eq!(cyclic_table(2, 2), MfVerdict::NotMultiplicityFree);
        assert_eq!(cyclic_table(-1, 2), MfVerdict::MultiplicityFree);
        assert_eq!(cyclic_table(1, 1), MfVerdict::NotMultiplicityFree);
    }

    #[test]
    fn non_trace_is_inconclusive() {
        let ctx = PadicContext::qp(5, 4).unwrap();
        let g = Arc::new(GroupPresentation::cyclic(2).unwrap());
        let entries = g.element_words().unwrap().iter().map(|w| (w.clone(), PadicElement::from_int(&ctx, 3))).collect();
        let t = PseudoRep2::from_table(g, entries).unwrap();
        let r = residually_multiplicity_free(&t, &MeataxeOptions::default()).unwrap();
        assert_eq!(r.verdict, MfVerdict::Inconclusive);
    }
}
