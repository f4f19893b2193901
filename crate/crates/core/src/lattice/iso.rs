use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{matrix_strings, ResidueRep};
use crate::error::{Error, Result};
use crate::linalg::fq::{self, FqMatrix};
use crate::linalg::{Matrix, Ring};
use crate::padic::{Fq, PadicElement, ResidueField};

#[derive(Debug, Clone)]
pub struct IsoOptions {
    /// Largest residue solution space searched exhaustively.
    pub exhaustive_limit: u64,
    pub random_budget: u64,
    pub seed: u64,
    pub single_thread: bool,
}

impl Default for IsoOptions {
    fn default() -> Self {
        IsoOptions {
            exhaustive_limit: 1 << 20,
            random_budget: 20_000,
            seed: 0,
            single_thread: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IsoVerdict {
    Isomorphic,
    NotIsomorphic,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsoReport {
    pub verdict: IsoVerdict,
    pub modulus: u32,
    /// Number of generators of the intertwiner module over O_E/π^m.
    pub solution_generators: usize,
    /// Dimension of its image mod π.
    pub residue_dim: usize,
    pub searched: u64,
    pub exhaustive: bool,
    #[serde(skip)]
    pub intertwiner: Option<Matrix<PadicElement>>,
    #[serde(rename = "intertwiner")]
    pub intertwiner_entries: Option<Vec<Vec<String>>>,
    pub certificate: Option<String>,
}

impl IsoReport {
    pub fn is_isomorphic(&self) -> bool {
        self.verdict == IsoVerdict::Isomorphic
    }
}

/// Index of X_{ij} in the unknown vector.
fn var(d: usize, i: usize, j: usize) -> usize {
    i * d + j
}

/// The linear system X·a(g) − b(g)·X = 0 over all generators.
fn intertwining_system(a: &ResidueRep, b: &ResidueRep) -> Matrix<PadicElement> {
    let d = a.dim();
    let ring = a.ring();
    let rows = a.gen_images().len() * d * d;
    let mut m = Matrix::from_fn(rows, d * d, |_, _| ring.zero());
    for (g, (ag, bg)) in a.gen_images().iter().zip(b.gen_images()).enumerate() {
        for i in 0..d {
            for j in 0..d {
                let r = g * d * d + var(d, i, j);
                for k in 0..d {
                    let c = m.get(r, var(d, i, k)).plus(ag.get(k, j));
                    m.set(r, var(d, i, k), c);
                    let c = m.get(r, var(d, k, j)).minus(bg.get(i, k));
                    m.set(r, var(d, k, j), c);
                }
            }
        }
    }
    m.map(|x| x.truncate(ring.modulus()))
}

fn to_matrix(d: usize, v: &[PadicElement]) -> Matrix<PadicElement> {
    Matrix::from_fn(d, d, |i, j| v[var(d, i, j)].clone())
}

fn residue_matrix(k: &ResidueField, d: usize, basis: &[Vec<Fq>], coeffs: &[Fq]) -> FqMatrix {
    let mut v = vec![0; d * d];
    for (b, &c) in basis.iter().zip(coeffs) {
        if c != 0 {
            for (x, y) in v.iter_mut().zip(b) {
                *x = k.add(*x, k.mul(c, *y));
            }
        }
    }
    Matrix::from_fn(d, d, |i, j| v[var(d, i, j)])
}

fn digits(mut idx: u64, q: u64, len: usize) -> Vec<Fq> {
    (0..len)
        .map(|_| {
            let c = (idx % q) as Fq;
            idx /= q;
            c
        })
        .collect()
}

/// Searches for X with X·a(g) = b(g)·X for all generators and det X a unit.
/// Such an X exhibits b ≅ a as O_E/π^m[G]-modules.
pub fn iso_mod(a: &ResidueRep, b: &ResidueRep, opts: &IsoOptions) -> Result<IsoReport> {
    if a.group() != b.group() || a.dim() != b.dim() || a.modulus() != b.modulus() {
        return Err(Error::arg("iso_mod needs the same group, dimension and modulus"));
    }
    if **a.ring().ctx() != **b.ring().ctx() {
        return Err(Error::arg("iso_mod needs one coefficient ring"));
    }
    let d = a.dim();
    let ring = a.ring();
    let m = ring.modulus();
    let k = ResidueField::of(ring.ctx());
    let kernel = ring.kernel(&intertwining_system(a, b))?;
    let mut report = IsoReport {
        verdict: IsoVerdict::NotIsomorphic,
        modulus: m,
        solution_generators: kernel.len(),
        residue_dim: 0,
        searched: 0,
        exhaustive: true,
        intertwiner: None,
        intertwiner_entries: None,
        certificate: None,
    };

    // generators independent mod π span the residue image
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis: Vec<Vec<Fq>> = Vec::new();
    for (i, v) in kernel.iter().enumerate() {
        let r: Vec<Fq> = v.iter().map(|x| k.from_element(x)).collect();
        let mut trial = basis.clone();
        trial.push(r.clone());
        if fq::row_basis(&k, &trial, d * d).len() > basis.len() {
            basis.push(r);
            chosen.push(i);
        }
    }
    report.residue_dim = basis.len();
    if basis.is_empty() {
        report.certificate = Some(if kernel.is_empty() {
            "the intertwiner module is zero".into()
        } else {
            "every intertwiner vanishes mod π".into()
        });
        return Ok(report);
    }

    let q = k.size();
    let total = q.checked_pow(basis.len() as u32);
    let unit = |coeffs: &[Fq]| fq::det(&k, &residue_matrix(&k, d, &basis, coeffs)) != 0;

    let found: Option<Vec<Fq>> = match total {
        Some(t) if t <= opts.exhaustive_limit => {
            report.searched = t;
            if opts.single_thread {
                (1..t).map(|i| digits(i, q, basis.len())).find(|c| unit(c))
            } else {
                use rayon::prelude::*;
                (1..t)
                    .into_par_iter()
                    .map(|i| digits(i, q, basis.len()))
                    .find_first(|c| unit(c))
            }
        }
        _ => {
            report.exhaustive = false;
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let mut hit = None;
            for _ in 0..opts.random_budget {
                report.searched += 1;
                let c: Vec<Fq> = (0..basis.len()).map(|_| rng.gen_range(0..q) as Fq).collect();
                if unit(&c) {
                    hit = Some(c);
                    break;
                }
            }
            hit
        }
    };

    match found {
        Some(c) => {
            let mut x = vec![ring.zero(); d * d];
            for (&gi, &ci) in chosen.iter().zip(&c) {
                if ci == 0 {
                    continue;
                }
                let lift = k.lift(ring.ctx(), ci);
                for (xe, ke) in x.iter_mut().zip(&kernel[gi]) {
                    *xe = (&*xe + &(&lift * ke)).truncate(m);
                }
            }
            let xm = to_matrix(d, &x);
            debug_assert!(a
                .gen_images()
                .iter()
                .zip(b.gen_images())
                .all(|(ag, bg)| xm.mul(ag).sub(&bg.mul(&xm)).map(|e| e.truncate(m)).is_zero()));
            report.verdict = IsoVerdict::Isomorphic;
            report.intertwiner_entries = Some(matrix_strings(&xm));
            report.intertwiner = Some(xm);
        }
        None if report.exhaustive => {
            report.certificate = Some(format!(
                "all {} residue intertwiners are singular",
                report.searched
            ));
        }
        None => {
            report.verdict = IsoVerdict::Inconclusive;
            report.certificate = None;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::super::{reduce_rep_mod, IntegralRep};
    use super::*;
    use crate::group::GroupPresentation;
    use crate::padic::PadicContext;

    #[test]
    fn identity_vs_diag() {
        let ctx = PadicContext::qp(5, 8).unwrap();
        let g = Arc::new(GroupPresentation::free(&["Frob"]).unwrap());
        let id = IntegralRep::from_ints(g.clone(), &ctx, &[vec![vec![1, 0], vec![0, 1]]]).unwrap();
        let diag = IntegralRep::from_ints(g, &ctx, &[vec![vec![6, 0], vec![0, -4]]]).unwrap();
        let opts = IsoOptions::default();
        let r = iso_mod(&reduce_rep_mod(&id, 2).unwrap(), &reduce_rep_mod(&diag, 2).unwrap(), &opts).unwrap();
        assert_eq!(r.verdict, IsoVerdict::NotIsomorphic);
        assert!(r.exhaustive);
        let r = iso_mod(&reduce_rep_mod(&id, 1).unwrap(), &reduce_rep_mod(&diag, 1).unwrap(), &opts).unwrap();
        assert_eq!(r.verdict, IsoVerdict::Isomorphic);
        let same = reduce_rep_mod(&diag, 3).unwrap();
        let r = iso_mod(&same, &same, &opts).unwrap();
        assert!(r.is_isomorphic());
    }

    #[test]
    fn conjugates_are_found() {
        let ctx = PadicContext::qp(3, 6).unwrap();
        let g = Arc::new(GroupPresentation::free(&["a", "b"]).unwrap());
        let rep = IntegralRep::from_ints(g, &ctx, &[vec![vec![1, 1], vec![0, 1]], vec![vec![2, 0], vec![3, 1]]]).unwrap();
        let c = Matrix::from_rows(vec![
            vec![PadicElement::from_int(&ctx, 2), PadicElement::from_int(&ctx, 7)],
            vec![PadicElement::from_int(&ctx, 1), PadicElement::from_int(&ctx, 4)],
        ]);
        let conj = rep.conjugate(&c).unwrap();
        for m in 1..=3 {
            let (a, b) = (reduce_rep_mod(&rep, m).unwrap(), reduce_rep_mod(&conj, m).unwrap());
            let single = IsoOptions {
                single_thread: true,
                ..Default::default()
            };
            let r = iso_mod(&a, &b, &single).unwrap();
            assert!(r.is_isomorphic(), "m = {m}");
            let x = r.intertwiner.unwrap();
            for (ag, bg) in a.gen_images().iter().zip(b.gen_images()) {
                assert!(x.mul(ag).sub(&bg.mul(&x)).map(|e| e.truncate(m)).is_zero());
            }
            assert_eq!(iso_mod(&a, &b, &IsoOptions::default()).unwrap().verdict, IsoVerdict::Isomorphic);
        }
    }
}
