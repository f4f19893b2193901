use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::arith::{first_irreducible, fp_is_irreducible, is_prime, mulmod, pow_u64};
use crate::error::{Error, Result};

/// Largest working modulus; products of two residues must fit in an i128.
const MODULUS_BOUND: u64 = 1 << 62;

/// A finite extension E of Q_p presented as an Eisenstein extension of the
/// unramified extension Z_p[ω]/(g), truncated at π-adic precision N.
///
/// Elements are stored in the basis {π^i ω^j : 0 ≤ i < e, 0 ≤ j < f}. The
/// coordinate of π^i is an element of the unramified ring, itself a vector of
/// f integers modulo p^⌈(N-i)/e⌉.
#[derive(Clone, PartialEq, Eq)]
pub struct PadicContext {
    p: u64,
    f: usize,
    e: usize,
    unram_poly: Vec<i128>,
    eis_poly: Vec<Vec<i128>>,
    precision: u32,
    digits: u32,
    modulus: i128,
    pow_p: Vec<i128>,
    // π^e = Σ_{i<e} pi_e[i] π^i
    pi_e: Vec<Vec<i128>>,
}

/// Plain-data description of a context; what the spec files and the C ABI
/// exchange.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextRecord {
    pub p: u64,
    pub f: usize,
    pub e: usize,
    pub unram_poly: Vec<i64>,
    pub eis_poly: Vec<Vec<i64>>,
    pub precision: u32,
}

impl fmt::Debug for PadicContext {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            fm,
            "PadicContext(p={}, f={}, e={}, N={})",
            self.p, self.f, self.e, self.precision
        )
    }
}

impl PadicContext {
    /// Q_p itself at π-adic (here p-adic) precision `precision`.
    pub fn qp(p: u64, precision: u32) -> Result<Arc<Self>> {
        Self::unramified(p, 1, precision)
    }

    /// The unramified extension of degree `f`, using the first monic
    /// irreducible polynomial mod p in lexicographic order.
    pub fn unramified(p: u64, f: usize, precision: u32) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::InvalidContext(format!("{p} is not prime")));
        }
        if f == 0 {
            return Err(Error::InvalidContext("f must be at least 1".into()));
        }
        let g: Vec<i64> = first_irreducible(p, f).into_iter().map(|c| c as i64).collect();
        let mut a0 = vec![0i64; f];
        a0[0] = -(p as i64);
        let mut one = vec![0i64; f];
        one[0] = 1;
        Self::new(p, g, vec![a0, one], precision)
    }

    /// A totally ramified extension of Q_p given by an Eisenstein polynomial
    /// with integer coefficients (low to high, monic).
    pub fn eisenstein(p: u64, eis: &[i64], precision: u32) -> Result<Arc<Self>> {
        let eis_poly = eis.iter().map(|&c| vec![c]).collect();
        Self::new(p, vec![0, 1], eis_poly, precision)
    }

    /// Builds and validates a context. `unram_poly` is monic of degree f,
    /// `eis_poly` is monic of degree e with coefficients in Z[ω] given as
    /// f-vectors.
    pub fn new(
        p: u64,
        unram_poly: Vec<i64>,
        eis_poly: Vec<Vec<i64>>,
        precision: u32,
    ) -> Result<Arc<Self>> {
        let unram: Vec<i128> = unram_poly.iter().map(|&c| c as i128).collect();
        let eis: Vec<Vec<i128>> = eis_poly
            .iter()
            .map(|c| c.iter().map(|&x| x as i128).collect())
            .collect();
        Self::from_residues(p, unram, eis, precision).map(Arc::new)
    }

    pub(crate) fn from_residues(
        p: u64,
        unram_poly: Vec<i128>,
        eis_poly: Vec<Vec<i128>>,
        precision: u32,
    ) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidContext(format!("{p} is not prime")));
        }
        if unram_poly.len() < 2 {
            return Err(Error::InvalidContext("unramified polynomial must have degree ≥ 1".into()));
        }
        let f = unram_poly.len() - 1;
        if *unram_poly.last().unwrap() != 1 {
            return Err(Error::InvalidContext("unramified polynomial must be monic".into()));
        }
        let reduced: Vec<u64> = unram_poly
            .iter()
            .map(|&c| c.rem_euclid(p as i128) as u64)
            .collect();
        if !fp_is_irreducible(&reduced, p) {
            return Err(Error::InvalidContext(format!(
                "unramified polynomial {unram_poly:?} is reducible mod {p}"
            )));
        }
        if eis_poly.len() < 2 {
            return Err(Error::InvalidContext("Eisenstein polynomial must have degree ≥ 1".into()));
        }
        let e = eis_poly.len() - 1;
        if precision == 0 {
            return Err(Error::InvalidContext("precision must be at least 1".into()));
        }
        let digits = precision.div_ceil(e as u32);
        let modulus = match pow_u64(p, digits) {
            Some(m) if m < MODULUS_BOUND => m as i128,
            _ => {
                return Err(Error::InvalidContext(format!(
                    "working modulus {p}^{digits} exceeds 2^62; lower the precision"
                )))
            }
        };
        let mut pow_p = Vec::with_capacity(digits as usize + 1);
        let mut acc: i128 = 1;
        for _ in 0..=digits {
            pow_p.push(acc);
            acc = acc.saturating_mul(p as i128);
        }
        let mut ctx = PadicContext {
            p,
            f,
            e,
            unram_poly: unram_poly.iter().map(|c| c.rem_euclid(modulus)).collect(),
            eis_poly: Vec::new(),
            precision,
            digits,
            modulus,
            pow_p,
            pi_e: Vec::new(),
        };
        let mut eis = Vec::with_capacity(e + 1);
        for (i, c) in eis_poly.iter().enumerate() {
            if c.len() > f {
                return Err(Error::InvalidContext(format!(
                    "Eisenstein coefficient {i} has more than f = {f} coordinates"
                )));
            }
            let mut v = c.iter().map(|x| x.rem_euclid(modulus)).collect::<Vec<_>>();
            v.resize(f, 0);
            eis.push(v);
        }
        let lead = &eis[e];
        if lead[0] != 1 || lead[1..].iter().any(|&c| c != 0) {
            return Err(Error::InvalidContext("Eisenstein polynomial must be monic".into()));
        }
        for (i, c) in eis.iter().enumerate().take(e) {
            let v = ctx.unram_valuation(c);
            if i == 0 {
                if v != Some(1) && !(v.is_none() && digits <= 1) {
                    return Err(Error::InvalidContext(
                        "Eisenstein constant term must have valuation exactly 1".into(),
                    ));
                }
            } else if v == Some(0) {
                return Err(Error::InvalidContext(format!(
                    "Eisenstein coefficient {i} is not divisible by p"
                )));
            }
        }
        ctx.pi_e = eis[..e]
            .iter()
            .map(|c| c.iter().map(|&x| (-x).rem_euclid(modulus)).collect())
            .collect();
        ctx.eis_poly = eis;
        Ok(ctx)
    }

    pub fn from_record(rec: &ContextRecord) -> Result<Arc<Self>> {
        if rec.unram_poly.len() != rec.f + 1 {
            return Err(Error::InvalidContext(format!(
                "unram_poly has {} coefficients, expected f+1 = {}",
                rec.unram_poly.len(),
                rec.f + 1
            )));
        }
        if rec.eis_poly.len() != rec.e + 1 {
            return Err(Error::InvalidContext(format!(
                "eis_poly has {} coefficients, expected e+1 = {}",
                rec.eis_poly.len(),
                rec.e + 1
            )));
        }
        Self::new(rec.p, rec.unram_poly.clone(), rec.eis_poly.clone(), rec.precision)
    }

    pub fn record(&self) -> ContextRecord {
        let signed = |x: i128| -> i64 {
            let half = self.modulus / 2;
            if x > half {
                (x - self.modulus) as i64
            } else {
                x as i64
            }
        };
        ContextRecord {
            p: self.p,
            f: self.f,
            e: self.e,
            unram_poly: self.unram_poly.iter().map(|&c| signed(c)).collect(),
            eis_poly: self
                .eis_poly
                .iter()
                .map(|c| c.iter().map(|&x| signed(x)).collect())
                .collect(),
            precision: self.precision,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn f(&self) -> usize {
        self.f
    }
    pub fn e(&self) -> usize {
        self.e
    }
    /// Degree e·f over Q_p.
    pub fn degree(&self) -> usize {
        self.e * self.f
    }
    /// Absolute π-adic precision cap N.
    pub fn precision(&self) -> u32 {
        self.precision
    }
    /// Size of the residue field, p^f.
    pub fn residue_size(&self) -> u64 {
        pow_u64(self.p, self.f as u32).unwrap_or(u64::MAX)
    }
    pub fn unram_poly(&self) -> &[i128] {
        &self.unram_poly
    }
    pub fn eis_poly(&self) -> &[Vec<i128>] {
        &self.eis_poly
    }
    /// v_p(π) = 1/e.
    pub fn pi_valuation(&self) -> Ratio<i64> {
        Ratio::new(1, self.e as i64)
    }

    pub(crate) fn modulus(&self) -> i128 {
        self.modulus
    }
    pub(crate) fn pow_p(&self, k: u32) -> i128 {
        self.pow_p[k.min(self.digits) as usize]
    }
    pub(crate) fn pi_e(&self) -> &[Vec<i128>] {
        &self.pi_e
    }

    /// Modulus for the coordinate of π^i at absolute precision `prec`.
    pub(crate) fn coord_modulus(&self, i: usize, prec: u32) -> i128 {
        let prec = prec.min(self.precision) as i64;
        let need = prec - i as i64;
        if need <= 0 {
            1
        } else {
            self.pow_p(((need + self.e as i64 - 1) / self.e as i64) as u32)
        }
    }

    // ---- unramified subring Z_p[ω] modulo p^digits ----

    pub(crate) fn unram_mul(&self, a: &[i128], b: &[i128]) -> Vec<i128> {
        let f = self.f;
        let m = self.modulus;
        if f == 1 {
            return vec![mulmod(a[0], b[0], m)];
        }
        let mut prod = vec![0i128; 2 * f - 1];
        for i in 0..f {
            if a[i] == 0 {
                continue;
            }
            for j in 0..f {
                prod[i + j] = (prod[i + j] + mulmod(a[i], b[j], m)) % m;
            }
        }
        for k in (f..2 * f - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for j in 0..f {
                let idx = k - f + j;
                prod[idx] = (prod[idx] - mulmod(c, self.unram_poly[j], m)).rem_euclid(m);
            }
        }
        prod.truncate(f);
        prod
    }

    /// Valuation of an element of the unramified ring; `None` when it is zero
    /// modulo p^digits.
    pub(crate) fn unram_valuation(&self, a: &[i128]) -> Option<u32> {
        a.iter()
            .filter_map(|&c| {
                let c = c.rem_euclid(self.modulus);
                if c == 0 {
                    None
                } else {
                    let mut v = 0;
                    let mut x = c;
                    let p = self.p as i128;
                    while x % p == 0 {
                        x /= p;
                        v += 1;
                    }
                    Some(v)
                }
            })
            .min()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_eisenstein() {
        assert!(PadicContext::eisenstein(3, &[-3, 0, 1], 10).is_ok());
        assert!(PadicContext::eisenstein(3, &[-9, 0, 1], 10).is_err());
        assert!(PadicContext::eisenstein(3, &[-3, 1, 1], 10).is_err());
        assert!(PadicContext::eisenstein(4, &[-2, 1], 10).is_err());
    }

    #[test]
    fn validates_unramified() {
        assert!(PadicContext::new(5, vec![2, 0, 1], vec![vec![-5, 0], vec![1, 0]], 8).is_ok());
        // x^2 + 1 splits mod 5
        assert!(PadicContext::new(5, vec![1, 0, 1], vec![vec![-5, 0], vec![1, 0]], 8).is_err());
    }

    #[test]
    fn rejects_oversized_modulus() {
        assert!(PadicContext::qp(5, 40).is_err());
        assert!(PadicContext::qp(5, 20).is_ok());
    }

    #[test]
    fn record_roundtrip() {
        let ctx = PadicContext::eisenstein(5, &[5, 10, 1], 12).unwrap();
        let back = PadicContext::from_record(&ctx.record()).unwrap();
        assert_eq!(*ctx, *back);
    }
}
