use std::sync::Arc;

use super::arith::inv_mod_prime;
use super::context::PadicContext;
use super::element::PadicElement;

/// The residue field F_q = F_p[ω]/(g mod p). Elements are encoded as
/// integers Σ d_j p^j with digits d_j the coordinates on ω^j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueField {
    p: u64,
    f: usize,
    modpoly: Vec<u64>,
    size: u64,
}

pub type Fq = u32;

impl ResidueField {
    pub fn of(ctx: &PadicContext) -> Self {
        let p = ctx.p();
        let modpoly = ctx
            .unram_poly()
            .iter()
            .map(|&c| c.rem_euclid(p as i128) as u64)
            .collect();
        ResidueField {
            p,
            f: ctx.f(),
            modpoly,
            size: ctx.residue_size(),
        }
    }

    pub fn prime_field(p: u64) -> Self {
        ResidueField {
            p,
            f: 1,
            modpoly: vec![0, 1],
            size: p,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn size(&self) -> u64 {
        self.size
    }

    fn digits(&self, x: Fq) -> Vec<u64> {
        let mut x = x as u64;
        (0..self.f)
            .map(|_| {
                let d = x % self.p;
                x /= self.p;
                d
            })
            .collect()
    }

    fn encode(&self, d: &[u64]) -> Fq {
        d.iter().rev().fold(0u64, |acc, &c| acc * self.p + c) as Fq
    }

    pub fn zero(&self) -> Fq {
        0
    }
    pub fn one(&self) -> Fq {
        1
    }

    pub fn from_int(&self, n: i64) -> Fq {
        n.rem_euclid(self.p as i64) as Fq
    }

    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        if self.f == 1 {
            return ((a as u64 + b as u64) % self.p) as Fq;
        }
        let (x, y) = (self.digits(a), self.digits(b));
        let s: Vec<u64> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        self.encode(&s)
    }

    pub fn neg(&self, a: Fq) -> Fq {
        if self.f == 1 {
            return ((self.p - a as u64) % self.p) as Fq;
        }
        let s: Vec<u64> = self
            .digits(a)
            .iter()
            .map(|u| (self.p - u) % self.p)
            .collect();
        self.encode(&s)
    }

    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        let p = self.p;
        if self.f == 1 {
            return ((a as u64 * b as u64) % p) as Fq;
        }
        let (x, y) = (self.digits(a), self.digits(b));
        let f = self.f;
        let mut prod = vec![0u64; 2 * f - 1];
        for i in 0..f {
            for j in 0..f {
                prod[i + j] = (prod[i + j] + x[i] * y[j]) % p;
            }
        }
        for k in (f..2 * f - 1).rev() {
            let c = prod[k];
            prod[k] = 0;
            for j in 0..f {
                prod[k - f + j] = (prod[k - f + j] + p - c * self.modpoly[j] % p) % p;
            }
        }
        prod.truncate(f);
        self.encode(&prod)
    }

    pub fn pow(&self, a: Fq, mut e: u64) -> Fq {
        let mut r = self.one();
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    /// Inverse of a nonzero element.
    pub fn inv(&self, a: Fq) -> Fq {
        assert!(a != 0, "inverse of zero in residue field");
        if self.f == 1 {
            return inv_mod_prime(a as u64, self.p) as Fq;
        }
        self.pow(a, self.size - 2)
    }

    /// Reduction of an integral element modulo π.
    pub fn from_element(&self, x: &PadicElement) -> Fq {
        let d: Vec<u64> = x.coords()[..self.f]
            .iter()
            .map(|&c| c.rem_euclid(self.p as i128) as u64)
            .collect();
        self.encode(&d)
    }

    /// Digit lift to O_E (exact, full precision).
    pub fn lift(&self, ctx: &Arc<PadicContext>, a: Fq) -> PadicElement {
        let mut coords = vec![0i128; ctx.degree()];
        for (j, d) in self.digits(a).into_iter().enumerate() {
            coords[j] = d as i128;
        }
        PadicElement::from_coords(ctx, &coords, ctx.precision()).expect("coordinate count")
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        0..self.size as Fq
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_f9() {
        let ctx = PadicContext::unramified(3, 2, 4).unwrap();
        let k = ResidueField::of(&ctx);
        assert_eq!(k.size(), 9);
        for a in 1..9 {
            assert_eq!(k.mul(a, k.inv(a)), 1);
        }
        for a in 0..9 {
            for b in 0..9 {
                assert_eq!(k.mul(a, b), k.mul(b, a));
                assert_eq!(k.sub(k.add(a, b), b), a);
            }
        }
    }
}
