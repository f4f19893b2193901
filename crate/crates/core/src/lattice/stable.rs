use std::sync::Arc;

use serde::Serialize;

use super::{matrix_strings, IntegralRep};
use crate::error::{Error, Result};
use crate::group::GroupPresentation;
use crate::linalg::Matrix;
use crate::padic::{PadicContext, PadicNumber};

#[derive(Debug, Clone)]
pub struct StableLattice {
    pub rep: IntegralRep,
    /// Columns are the lattice basis; C^{-1}·ρ·C = rep.
    pub certificate: Matrix<PadicNumber>,
    pub iterations: usize,
    /// Valuation of det C.
    pub index_valuation: i64,
}

#[derive(Serialize)]
struct StableJson {
    certificate: Vec<Vec<String>>,
    gen_images: Vec<Vec<Vec<String>>>,
    iterations: usize,
    index_valuation: i64,
}

impl StableLattice {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(StableJson {
            certificate: matrix_strings(&self.certificate),
            gen_images: self.rep.gen_images().iter().map(matrix_strings).collect(),
            iterations: self.iterations,
            index_valuation: self.index_valuation,
        })
        .expect("serializable")
    }
}

fn val(x: &PadicNumber) -> Option<i64> {
    x.valuation().ok()
}

/// Upper triangular basis of the O_E-span of full-rank vectors, pivots π^v.
fn echelon(mut rows: Vec<Vec<PadicNumber>>, d: usize) -> Result<Vec<Vec<PadicNumber>>> {
    for j in 0..d {
        let pick = (j..rows.len())
            .filter_map(|r| val(&rows[r][j]).map(|v| (v, r)))
            .min();
        let Some((v, r)) = pick else {
            return Err(Error::Undecidable("orbit vectors do not span E^d at working precision".into()));
        };
        rows.swap(j, r);
        let ctx = rows[j][j].ctx().clone();
        let scale = PadicNumber::pi_pow(&ctx, v).div(&rows[j][j])?;
        rows[j] = rows[j].iter().map(|x| x * &scale).collect();
        let piv = PadicNumber::pi_pow(&ctx, v);
        for r in j + 1..rows.len() {
            if val(&rows[r][j]).is_none() {
                rows[r][j] = PadicNumber::zero(&ctx);
                continue;
            }
            let c = rows[r][j].div(&piv)?;
            let pivot_row = rows[j].clone();
            for (x, y) in rows[r].iter_mut().zip(&pivot_row) {
                *x = &*x - &(&c * y);
            }
            rows[r][j] = PadicNumber::zero(&ctx);
        }
    }
    rows.truncate(d);
    Ok(rows)
}

fn index_valuation(basis: &[Vec<PadicNumber>]) -> i64 {
    basis.iter().enumerate().map(|(j, r)| val(&r[j]).unwrap_or(0)).sum()
}

fn inverse(m: &Matrix<PadicNumber>) -> Result<Matrix<PadicNumber>> {
    let det = m.det();
    if det.valuation().is_err() {
        return Err(Error::Domain("matrix is not invertible at working precision".into()));
    }
    let inv = det.inverse()?;
    Ok(m.adjugate().scale(&inv))
}

/// An integral model of a representation over E: the O_E-span of the orbit
/// of the standard basis, found by closing under generators and inverses.
pub fn stable_lattice(
    group: Arc<GroupPresentation>,
    ctx: &Arc<PadicContext>,
    gens: &[Matrix<PadicNumber>],
    budget: usize,
) -> Result<StableLattice> {
    let d = gens.first().map(|g| g.rows()).ok_or_else(|| Error::arg("no generator images"))?;
    if gens.len() != group.generators().len() || gens.iter().any(|g| g.rows() != d || g.cols() != d) {
        return Err(Error::arg("generator images do not match the group"));
    }
    let mut acting = gens.to_vec();
    for g in gens {
        acting.push(inverse(g)?);
    }
    let mut basis: Vec<Vec<PadicNumber>> = (0..d)
        .map(|i| (0..d).map(|j| PadicNumber::from_int(ctx, (i == j) as i64)).collect())
        .collect();
    let mut index = 0i64;
    let mut iterations = 0;
    loop {
        if iterations >= budget {
            return Err(Error::Budget(format!(
                "unbounded: the orbit lattice did not stabilize in {budget} steps"
            )));
        }
        iterations += 1;
        let mut vectors = basis.clone();
        for g in &acting {
            for b in &basis {
                vectors.push(g.mul_vec(b));
            }
        }
        let next = echelon(vectors, d)?;
        let next_index = index_valuation(&next);
        basis = next;
        if next_index == index {
            break;
        }
        index = next_index;
    }
    let c = Matrix::from_fn(d, d, |i, j| basis[j][i].clone());
    let cinv = inverse(&c)?;
    let mats = gens
        .iter()
        .map(|g| cinv.mul(g).mul(&c).try_map(|x| x.to_integral()))
        .collect::<Result<Vec<_>>>()?;
    let rep = IntegralRep::new(group, ctx, mats)?;
    Ok(StableLattice {
        rep,
        certificate: c,
        iterations,
        index_valuation: index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicElement;

    fn num(ctx: &Arc<PadicContext>, shift: i64, unit: i64) -> PadicNumber {
        PadicNumber::new(shift, PadicElement::from_int(ctx, unit))
    }

    #[test]
    fn swap_with_poles() {
        let ctx = PadicContext::qp(3, 10).unwrap();
        let g = Arc::new(GroupPresentation::free(&["Frob"]).unwrap());
        let m = Matrix::from_rows(vec![
            vec![num(&ctx, 0, 0), num(&ctx, 1, 1)],
            vec![num(&ctx, -1, 1), num(&ctx, 0, 0)],
        ]);
        let s = stable_lattice(g, &ctx, &[m], 10).unwrap();
        // basis (e1, p^{-1} e2), image [[0,1],[1,0]]
        assert_eq!(s.index_valuation, -1);
        let img = &s.rep.gen_images()[0];
        assert!(img.get(0, 0).is_zero() && img.get(1, 1).is_zero());
        assert_eq!(*img.get(0, 1), PadicElement::one(&ctx));
        assert_eq!(*img.get(1, 0), PadicElement::one(&ctx));
    }

    #[test]
    fn integral_input_keeps_identity_certificate() {
        let ctx = PadicContext::qp(5, 8).unwrap();
        let g = Arc::new(GroupPresentation::free(&["a"]).unwrap());
        let m = Matrix::from_rows(vec![vec![num(&ctx, 0, 2), num(&ctx, 0, 1)], vec![num(&ctx, 0, 1), num(&ctx, 0, 1)]]);
        let s = stable_lattice(g, &ctx, &[m], 10).unwrap();
        assert_eq!(s.index_valuation, 0);
        assert_eq!(s.iterations, 1);
    }

    #[test]
    fn unbounded_orbit() {
        let ctx = PadicContext::qp(5, 12).unwrap();
        let g = Arc::new(GroupPresentation::free(&["a"]).unwrap());
        let m = Matrix::from_rows(vec![vec![num(&ctx, 1, 1), num(&ctx, 0, 0)], vec![num(&ctx, 0, 0), num(&ctx, 0, 1)]]);
        assert!(matches!(stable_lattice(g, &ctx, &[m], 6), Err(Error::Budget(_))));
    }
}
