//! Representations over O_E and over the chain rings O_E/π^m.

mod carayol;
mod iso;
mod meataxe;
mod stable;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{GroupKind, GroupPresentation, Letter};
use crate::linalg::fq::FqMatrix;
use crate::linalg::{ChainRing, Matrix, Ring};
use crate::padic::{PadicContext, PadicElement, ResidueField};

pub use carayol::{carayol_audit, CarayolOptions, CarayolReport, CarayolVerdict, TraceMismatch};
pub use iso::{iso_mod, IsoOptions, IsoReport, IsoVerdict};
pub use meataxe::{
    find_submodule, intertwiners, semisimplify_fq, semisimplify_mod_p, spin, Factor, MeataxeOptions, Semisimplification,
};
pub use stable::{stable_lattice, StableLattice};

/// Entries of a matrix as strings, row by row.
pub fn matrix_strings<T: std::fmt::Display>(m: &Matrix<T>) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| x.to_string()).collect())
        .collect()
}

pub(crate) fn check_shapes<T>(group: &GroupPresentation, mats: &[Matrix<T>]) -> Result<usize> {
    if mats.len() != group.generators().len() {
        return Err(Error::arg(format!(
            "{} generator images for {} generators",
            mats.len(),
            group.generators().len()
        )));
    }
    let d = mats.first().map(|m| m.rows()).unwrap_or(0);
    if d == 0 {
        return Err(Error::arg("representation of dimension 0"));
    }
    if mats.iter().any(|m| m.rows() != d || m.cols() != d) {
        return Err(Error::arg("generator images must be square of one size"));
    }
    Ok(d)
}

pub(crate) fn word_product<T: Ring>(gens: &[Matrix<T>], invs: &[Matrix<T>], w: &[Letter], post: impl Fn(Matrix<T>) -> Matrix<T>) -> Matrix<T> {
    let mut m = Matrix::identity_like(gens[0].get(0, 0), gens[0].rows());
    for l in w {
        let g = if l.inv { &invs[l.gen] } else { &gens[l.gen] };
        m = post(m.mul(g));
    }
    m
}

/// For a finite group, checks ρ(a)ρ(g) = ρ(a·g) for every element a and
/// generator g, with ρ(a) built from the shortest words.
pub(crate) fn check_table<T: Ring>(
    group: &GroupPresentation,
    gens: &[Matrix<T>],
    invs: &[Matrix<T>],
    post: impl Fn(Matrix<T>) -> Matrix<T> + Copy,
) -> Result<()> {
    if let GroupKind::Finite { table, gens: gidx, words, .. } = group.kind() {
        let elems: Vec<Matrix<T>> = words.iter().map(|w| word_product(gens, invs, w, post)).collect();
        for (a, ma) in elems.iter().enumerate() {
            for (i, gm) in gens.iter().enumerate() {
                let lhs = post(ma.mul(gm));
                let rhs = &elems[table[a][gidx[i]]];
                if !lhs.sub(rhs).is_zero() {
                    return Err(Error::Relation(format!(
                        "group table violated at element {a} times generator {}",
                        group.generators()[i]
                    )));
                }
            }
        }
    }
    Ok(())
}

/// A representation of a group on O_E^d.
#[derive(Debug, Clone)]
pub struct IntegralRep {
    group: Arc<GroupPresentation>,
    dim: usize,
    ctx: Arc<PadicContext>,
    gens: Vec<Matrix<PadicElement>>,
    invs: Vec<Matrix<PadicElement>>,
}

impl IntegralRep {
    pub fn new(group: Arc<GroupPresentation>, ctx: &Arc<PadicContext>, gens: Vec<Matrix<PadicElement>>) -> Result<Self> {
        let dim = check_shapes(&group, &gens)?;
        let mut invs = Vec::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            if g.entries().iter().any(|x| **x.ctx() != **ctx) {
                return Err(Error::arg("matrix entries live in another context"));
            }
            let det = g.det();
            if !det.is_unit() {
                return Err(Error::Domain(format!(
                    "image of {} does not have unit determinant",
                    group.generators()[i]
                )));
            }
            invs.push(g.adjugate().scale(&det.inverse()?));
        }
        check_table(&group, &gens, &invs, |m| m)?;
        Ok(IntegralRep {
            group,
            dim,
            ctx: ctx.clone(),
            gens,
            invs,
        })
    }

    /// From integer matrices.
    pub fn from_ints(group: Arc<GroupPresentation>, ctx: &Arc<PadicContext>, gens: &[Vec<Vec<i64>>]) -> Result<Self> {
        let mats = gens
            .iter()
            .map(|rows| {
                Matrix::from_rows(
                    rows.iter()
                        .map(|r| r.iter().map(|&x| PadicElement::from_int(ctx, x)).collect())
                        .collect(),
                )
            })
            .collect();
        Self::new(group, ctx, mats)
    }

    pub fn group(&self) -> &Arc<GroupPresentation> {
        &self.group
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn ctx(&self) -> &Arc<PadicContext> {
        &self.ctx
    }
    pub fn gen_images(&self) -> &[Matrix<PadicElement>] {
        &self.gens
    }
    pub fn inverse_images(&self) -> &[Matrix<PadicElement>] {
        &self.invs
    }

    pub fn word_matrix(&self, w: &[Letter]) -> Matrix<PadicElement> {
        word_product(&self.gens, &self.invs, w, |m| m)
    }

    pub fn trace(&self, w: &[Letter]) -> PadicElement {
        self.word_matrix(w).trace()
    }

    /// ρ(a) for every element of a finite group, in element order.
    pub fn element_matrices(&self) -> Result<Vec<Matrix<PadicElement>>> {
        Ok(self.group.element_words()?.iter().map(|w| self.word_matrix(w)).collect())
    }

    /// The representation C^{-1}ρC, for C with unit determinant.
    pub fn conjugate(&self, c: &Matrix<PadicElement>) -> Result<Self> {
        let det = c.det();
        if !det.is_unit() {
            return Err(Error::NotUnit);
        }
        let cinv = c.adjugate().scale(&det.inverse()?);
        let gens = self.gens.iter().map(|g| cinv.mul(g).mul(c)).collect();
        Self::new(self.group.clone(), &self.ctx, gens)
    }
}

/// A representation of a group on (O_E/π^m)^d.
#[derive(Debug, Clone)]
pub struct ResidueRep {
    group: Arc<GroupPresentation>,
    dim: usize,
    ring: ChainRing,
    gens: Vec<Matrix<PadicElement>>,
    invs: Vec<Matrix<PadicElement>>,
}

impl ResidueRep {
    pub fn new(group: Arc<GroupPresentation>, ring: ChainRing, gens: Vec<Matrix<PadicElement>>) -> Result<Self> {
        let dim = check_shapes(&group, &gens)?;
        let gens: Vec<Matrix<PadicElement>> = gens.iter().map(|g| ring.reduce_matrix(g)).collect::<Result<_>>()?;
        let mut invs = Vec::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            // det mod π^m of the lift; a unit iff its residue is nonzero
            let det = g.map(|x| x.lift()).det();
            if !det.is_unit() {
                return Err(Error::Domain(format!(
                    "image of {} is not invertible mod π",
                    group.generators()[i]
                )));
            }
            let inv = g.map(|x| x.lift()).adjugate().scale(&det.inverse()?);
            invs.push(ring.reduce_matrix(&inv)?);
        }
        let red = |m: Matrix<PadicElement>| m.map(|x| x.truncate(ring.modulus()));
        check_table(&group, &gens, &invs, red)?;
        Ok(ResidueRep {
            group,
            dim,
            ring,
            gens,
            invs,
        })
    }

    pub fn group(&self) -> &Arc<GroupPresentation> {
        &self.group
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn ring(&self) -> &ChainRing {
        &self.ring
    }
    pub fn modulus(&self) -> u32 {
        self.ring.modulus()
    }
    pub fn gen_images(&self) -> &[Matrix<PadicElement>] {
        &self.gens
    }

    pub fn word_matrix(&self, w: &[Letter]) -> Matrix<PadicElement> {
        let m = self.ring.modulus();
        word_product(&self.gens, &self.invs, w, |x| x.map(|e| e.truncate(m)))
    }

    /// Generator images over the residue field (m ≥ 1 is reduced mod π).
    pub fn residue_matrices(&self) -> Vec<FqMatrix> {
        let k = ResidueField::of(self.ring.ctx());
        self.gens.iter().map(|g| g.map(|x| k.from_element(x))).collect()
    }

    /// Equality of matrices, generator by generator.
    pub fn same_matrices(&self, other: &ResidueRep) -> bool {
        self.modulus() == other.modulus()
            && self.gens.len() == other.gens.len()
            && self.gens.iter().zip(&other.gens).all(|(a, b)| a.sub(b).is_zero())
    }
}

/// Entrywise reduction mod π^m.
pub fn reduce_rep_mod(rep: &IntegralRep, m: u32) -> Result<ResidueRep> {
    let ring = ChainRing::new(&rep.ctx, m)?;
    ResidueRep::new(rep.group.clone(), ring, rep.gens.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_examples() {
        let ctx = PadicContext::qp(5, 8).unwrap();
        let g = Arc::new(GroupPresentation::free(&["Frob"]).unwrap());
        let id = IntegralRep::from_ints(g.clone(), &ctx, &[vec![vec![1, 0], vec![0, 1]]]).unwrap();
        let diag = IntegralRep::from_ints(g.clone(), &ctx, &[vec![vec![6, 0], vec![0, -4]]]).unwrap();
        let id1 = reduce_rep_mod(&id, 1).unwrap();
        let d1 = reduce_rep_mod(&diag, 1).unwrap();
        assert!(d1.same_matrices(&id1));
        let d2 = reduce_rep_mod(&diag, 2).unwrap();
        assert!(!d2.same_matrices(&reduce_rep_mod(&id, 2).unwrap()));
        assert!(reduce_rep_mod(&id, 9).is_err());
    }

    #[test]
    fn reduction_is_functorial() {
        let ctx = PadicContext::qp(3, 6).unwrap();
        let g = Arc::new(GroupPresentation::free(&["a", "b"]).unwrap());
        let rep = IntegralRep::from_ints(g.clone(), &ctx, &[vec![vec![1, 3], vec![2, 7]], vec![vec![4, 9], vec![1, 1]]]).unwrap();
        let red = reduce_rep_mod(&rep, 2).unwrap();
        for w in g.words_up_to(3) {
            let a = rep.word_matrix(&w).map(|x| x.reduce_mod(2).unwrap());
            let b = red.word_matrix(&w);
            assert!(a.sub(&b).is_zero(), "{}", g.word_to_string(&w));
        }
    }

    #[test]
    fn finite_relations_checked() {
        let ctx = PadicContext::qp(5, 6).unwrap();
        let c2 = Arc::new(GroupPresentation::cyclic(2).unwrap());
        assert!(IntegralRep::from_ints(c2.clone(), &ctx, &[vec![vec![-1]]]).is_ok());
        assert!(matches!(
            IntegralRep::from_ints(c2, &ctx, &[vec![vec![2]]]),
            Err(Error::Relation(_))
        ));
        let free = Arc::new(GroupPresentation::free(&["g"]).unwrap());
        assert!(matches!(
            IntegralRep::from_ints(free, &ctx, &[vec![vec![5]]]),
            Err(Error::Domain(_))
        ));
    }
}
