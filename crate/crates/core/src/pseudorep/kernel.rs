use serde::Serialize;

use super::PseudoRep2;
use crate::error::{Error, Result};
use crate::linalg::{ChainRing, Matrix};
use crate::padic::PadicElement;

#[derive(Debug, Clone, Serialize)]
pub struct KernelReport {
    pub modulus: u32,
    pub group_order: usize,
    /// Basis of R[G] in this order.
    pub elements: Vec<String>,
    /// Elementary divisor exponents of B(x, y) = T(xy).
    pub elementary: Vec<u32>,
    /// Number of elementary divisors of B that are nonzero mod π^m.
    pub corank: usize,
    #[serde(skip)]
    pub generators: Vec<Vec<PadicElement>>,
    #[serde(rename = "generators")]
    pub generator_strings: Vec<Vec<String>>,
    /// {g : T(xg) = T(x) for all x}.
    pub group_kernel: Vec<String>,
}

/// The kernel {a ∈ R[G] : T(xa) = 0 for all x} over R = O/π^m, and the
/// group kernel {g : T(xg) = T(x) for all x}.
pub fn kernel(t: &PseudoRep2<PadicElement>, m: u32) -> Result<KernelReport> {
    let g = t.group();
    let order = g
        .order()
        .ok_or_else(|| Error::Unsupported("kernels need a finite group".into()))?;
    let first = t.value(&[]).expect("finite groups carry every value");
    let ring = ChainRing::new(first.ctx(), m)?;
    let words = g.element_words()?.to_vec();
    let val = |e: usize| -> Result<PadicElement> {
        let v = t.value(&words[e]).expect("finite groups carry every value");
        if v.precision() < m {
            return Err(Error::Precision {
                needed: m,
                available: v.precision(),
            });
        }
        ring.reduce(v)
    };
    let mut rows = Vec::with_capacity(order);
    for x in 0..order {
        rows.push((0..order).map(|y| val(g.mul(x, y))).collect::<Result<Vec<_>>>()?);
    }
    let b = Matrix::from_rows(rows);
    let smith = ring.smith(&b)?;
    let generators = ring.kernel(&b)?;
    let mut group_kernel = Vec::new();
    for e in 0..order {
        if (0..order).all(|x| b.get(x, e) == b.get(x, g.identity().expect("finite"))) {
            group_kernel.push(g.word_to_string(&words[e]));
        }
    }
    Ok(KernelReport {
        modulus: m,
        group_order: order,
        elements: words.iter().map(|w| g.word_to_string(w)).collect(),
        corank: smith.diag.iter().filter(|&&k| k < m).count(),
        elementary: smith.diag,
        generator_strings: generators.iter().map(|v| v.iter().map(|x| x.to_string()).collect()).collect(),
        generators,
        group_kernel,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::super::{from_rep_trace, PseudoRep2};
    use super::*;
    use crate::group::GroupPresentation;
    use crate::lattice::IntegralRep;
    use crate::padic::PadicContext;

    fn contains(ring: &ChainRing, span: &[Vec<PadicElement>], v: &[PadicElement]) -> bool {
        let a = Matrix::from_rows(span.to_vec()).transpose();
        ring.solve(&a, v).unwrap().is_some()
    }

    #[test]
    fn doubled_trivial_is_augmentation() {
        let ctx = PadicContext::qp(5, 6).unwrap();
        for g in [GroupPresentation::cyclic(4).unwrap(), GroupPresentation::symmetric(3).unwrap()] {
            let g = Arc::new(g);
            let n = g.order().unwrap();
            let entries = g.element_words().unwrap().iter().map(|w| (w.clone(), PadicElement::from_int(&ctx, 2))).collect();
            let t = PseudoRep2::from_table(g.clone(), entries).unwrap();
            let r = kernel(&t, 2).unwrap();
            assert_eq!(r.corank, 1);
            assert_eq!(r.group_kernel.len(), n);
            let ring = ChainRing::new(&ctx, 2).unwrap();
            let id = g.identity().unwrap();
            for e in 0..n {
                let mut v = vec![ring.zero(); n];
                if e != id {
                    v[e] = ring.one();
                    v[id] = ring.reduce(&PadicElement::from_int(&ctx, -1)).unwrap();
                }
                assert!(contains(&ring, &r.generators, &v));
            }
            for k in &r.generators {
                let s = k.iter().fold(ring.zero(), |a, x| &a + x);
                assert!(ring.reduce(&s).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn symmetric_group_standard_rep() {
        let ctx = PadicContext::qp(5, 6).unwrap();
        let g = Arc::new(GroupPresentation::symmetric(3).unwrap());
        let rep = IntegralRep::from_ints(g.clone(), &ctx, &standard_s3(&g)).unwrap();
        let t = from_rep_trace(&rep, 0).unwrap();
        let r = kernel(&t, 2).unwrap();
        assert_eq!(r.corank, 4);
        assert_eq!(r.group_kernel, vec!["1".to_string()]);
    }

    #[test]
    fn trivial_group() {
        let ctx = PadicContext::qp(3, 4).unwrap();
        let g = Arc::new(GroupPresentation::cyclic(1).unwrap());
        let t = PseudoRep2::from_table(g, vec![(vec![], PadicElement::from_int(&ctx, 2))]).unwrap();
        let r = kernel(&t, 3).unwrap();
        assert!(r.generators.iter().all(|v| v.iter().all(|x| x.is_zero())));
        assert_eq!(r.corank, 1);
    }

    /// The 2-dimensional irreducible representation of S_3 on s, c, in the
    /// basis e1 − e2, e2 − e3.
    pub(crate) fn standard_s3(_g: &GroupPresentation) -> Vec<Vec<Vec<i64>>> {
        vec![vec![vec![-1, 1], vec![0, 1]], vec![vec![0, -1], vec![1, -1]]]
    }
}
