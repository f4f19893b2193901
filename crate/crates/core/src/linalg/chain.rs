//! Linear algebra over the chain ring O_E/π^m.
//!
//! Every ideal is π^k R, so a matrix is equivalent to a diagonal matrix of
//! powers of π. The reduction pivots on an entry of minimal valuation; the
//! quotient of any other entry in its row or column by the pivot is then
//! integral and elimination never divides by a non-unit.

use std::sync::Arc;

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::padic::{PadicContext, PadicElement, Valuation};

/// The ring O_E/π^m.
#[derive(Debug, Clone)]
pub struct ChainRing {
    ctx: Arc<PadicContext>,
    m: u32,
}

impl ChainRing {
    pub fn new(ctx: &Arc<PadicContext>, m: u32) -> Result<Self> {
        if m == 0 || m > ctx.precision() {
            return Err(Error::Precision {
                needed: m,
                available: ctx.precision(),
            });
        }
        Ok(ChainRing { ctx: ctx.clone(), m })
    }

    pub fn ctx(&self) -> &Arc<PadicContext> {
        &self.ctx
    }
    pub fn modulus(&self) -> u32 {
        self.m
    }

    /// Residue of x; x must be known to at least π^m.
    pub fn reduce(&self, x: &PadicElement) -> Result<PadicElement> {
        x.reduce_mod(self.m)
    }

    /// Canonical representative of a quotient known only modulo a smaller
    /// power of π: any lift is acceptable in the callers.
    fn lifted(&self, x: &PadicElement) -> PadicElement {
        x.lift().truncate(self.m)
    }

    pub fn zero(&self) -> PadicElement {
        PadicElement::zero(&self.ctx).truncate(self.m)
    }
    pub fn one(&self) -> PadicElement {
        PadicElement::one(&self.ctx).truncate(self.m)
    }
    pub fn pi_pow(&self, k: u32) -> PadicElement {
        PadicElement::pi_pow(&self.ctx, k).truncate(self.m)
    }

    fn val(&self, x: &PadicElement) -> Option<u32> {
        match x.valuation() {
            Valuation::Exact(v) if v < self.m => Some(v),
            _ => None,
        }
    }

    pub fn reduce_matrix(&self, a: &Matrix<PadicElement>) -> Result<Matrix<PadicElement>> {
        a.try_map(|x| self.reduce(x))
    }

    /// Smith normal form P·A·Q = diag(π^{k_1}, …, π^{k_r}, 0, …).
    pub fn smith(&self, a: &Matrix<PadicElement>) -> Result<SmithForm> {
        let mut a = self.reduce_matrix(a)?;
        let (r, c) = (a.rows(), a.cols());
        let proto = self.one();
        let mut p = Matrix::identity_like(&proto, r);
        let mut q = Matrix::identity_like(&proto, c);
        let mut qinv = Matrix::identity_like(&proto, c);
        let mut diag = Vec::new();
        for t in 0..r.min(c) {
            let mut best: Option<(u32, usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    if let Some(v) = self.val(a.get(i, j)) {
                        if best.map_or(true, |(b, _, _)| v < b) {
                            best = Some((v, i, j));
                        }
                    }
                }
                if matches!(best, Some((0, _, _))) {
                    break;
                }
            }
            let Some((k, bi, bj)) = best else { break };
            a.swap_rows(t, bi);
            p.swap_rows(t, bi);
            a.swap_cols(t, bj);
            q.swap_cols(t, bj);
            qinv.swap_rows(t, bj);

            let unit = a.get(t, t).div_pi_pow(k)?;
            let uinv = self.lifted(&unit.inverse()?);
            for j in 0..c {
                let v = a.get(t, j) * &uinv;
                a.set(t, j, v.truncate(self.m));
            }
            for j in 0..r {
                let v = p.get(t, j) * &uinv;
                p.set(t, j, v.truncate(self.m));
            }
            a.set(t, t, self.pi_pow(k));

            for i in 0..r {
                if i == t || self.val(a.get(i, t)).is_none() {
                    a.set(i, t, self.zero());
                    continue;
                }
                let f = self.lifted(&a.get(i, t).div_pi_pow(k)?);
                for j in 0..c {
                    let v = a.get(i, j) - &(&f * a.get(t, j));
                    a.set(i, j, v.truncate(self.m));
                }
                for j in 0..r {
                    let v = p.get(i, j) - &(&f * p.get(t, j));
                    p.set(i, j, v.truncate(self.m));
                }
                a.set(i, t, self.zero());
            }
            for j in 0..c {
                if j == t || self.val(a.get(t, j)).is_none() {
                    if j != t {
                        a.set(t, j, self.zero());
                    }
                    continue;
                }
                let f = self.lifted(&a.get(t, j).div_pi_pow(k)?);
                for i in 0..c {
                    let v = q.get(i, j) - &(&f * q.get(i, t));
                    q.set(i, j, v.truncate(self.m));
                }
                for jj in 0..c {
                    let v = qinv.get(t, jj) + &(&f * qinv.get(j, jj));
                    qinv.set(t, jj, v.truncate(self.m));
                }
                a.set(t, j, self.zero());
            }
            diag.push(k);
        }
        Ok(SmithForm {
            m: self.m,
            p,
            q,
            qinv,
            diag,
        })
    }

    /// Generators of {x : A·x = 0} ⊂ R^c.
    pub fn kernel(&self, a: &Matrix<PadicElement>) -> Result<Vec<Vec<PadicElement>>> {
        let s = self.smith(a)?;
        let mut gens = Vec::new();
        for i in 0..a.cols() {
            let scale = match s.diag.get(i) {
                Some(&0) => continue,
                Some(&k) => self.pi_pow(self.m - k),
                None => self.one(),
            };
            gens.push(s.q.column(i).iter().map(|x| (&scale * x).truncate(self.m)).collect());
        }
        Ok(gens)
    }

    /// A generating set of the row module of A, in echelon-free Smith shape:
    /// row i of the result is π^{k_i} times a row of an invertible matrix.
    pub fn row_span(&self, a: &Matrix<PadicElement>) -> Result<RowSpan> {
        let s = self.smith(a)?;
        let gens = s
            .diag
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let sc = self.pi_pow(k);
                s.qinv.row(i).iter().map(|x| (&sc * x).truncate(self.m)).collect()
            })
            .collect();
        Ok(RowSpan {
            elementary: s.diag.clone(),
            generators: gens,
            ambient: a.cols(),
        })
    }

    /// Some x with A·x = b, if one exists.
    pub fn solve(&self, a: &Matrix<PadicElement>, b: &[PadicElement]) -> Result<Option<Vec<PadicElement>>> {
        let s = self.smith(a)?;
        let b: Vec<PadicElement> = b.iter().map(|x| self.reduce(x)).collect::<Result<_>>()?;
        let pb = s.p.mul_vec(&b);
        let mut y = vec![self.zero(); a.cols()];
        for (i, x) in pb.iter().enumerate() {
            match s.diag.get(i) {
                Some(&k) => match self.val(x) {
                    None => {}
                    Some(v) if v < k => return Ok(None),
                    Some(_) => y[i] = self.lifted(&x.truncate(self.m).div_pi_pow(k)?),
                },
                None => {
                    if self.val(x).is_some() {
                        return Ok(None);
                    }
                }
            }
        }
        let x = s.q.mul_vec(&y);
        Ok(Some(x.into_iter().map(|v| v.truncate(self.m)).collect()))
    }
}

/// Output of [`ChainRing::smith`]: P·A·Q = D with D_ii = π^{diag[i]}.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub m: u32,
    pub p: Matrix<PadicElement>,
    pub q: Matrix<PadicElement>,
    pub qinv: Matrix<PadicElement>,
    pub diag: Vec<u32>,
}

impl SmithForm {
    /// Number of unit elementary divisors.
    pub fn unit_rank(&self) -> usize {
        self.diag.iter().filter(|&&k| k == 0).count()
    }
}

/// A submodule of R^n given by Smith-shaped generators.
#[derive(Debug, Clone)]
pub struct RowSpan {
    pub elementary: Vec<u32>,
    pub generators: Vec<Vec<PadicElement>>,
    pub ambient: usize,
}

impl RowSpan {
    /// The submodule is all of R^n.
    pub fn is_full(&self) -> bool {
        self.elementary.len() == self.ambient && self.elementary.iter().all(|&k| k == 0)
    }

    /// Length of R^n/M as an R-module, with R = O/π^m.
    pub fn colength(&self, m: u32) -> u32 {
        let present: u32 = self.elementary.iter().sum();
        present + (self.ambient - self.elementary.len()) as u32 * m
    }
}
