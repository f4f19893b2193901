use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::context::PadicContext;
use super::residue_field::ResidueField;
use crate::error::{Error, Result};

/// π-adic valuation of an element known to finite precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Valuation {
    Exact(u32),
    /// Indistinguishable from zero at the known precision.
    AtLeast(u32),
}

impl Valuation {
    /// The exact value, or the lower bound when precision is exhausted.
    pub fn bound(self) -> u32 {
        match self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => v,
        }
    }
    pub fn exact(self) -> Option<u32> {
        match self {
            Valuation::Exact(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }
}

/// Valuation normalized so that v_p(p) = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PValuation {
    Exact(Ratio<i64>),
    AtLeast(Ratio<i64>),
}

/// An element of O_E / π^prec, where prec is the known absolute precision.
#[derive(Clone)]
pub struct PadicElement {
    ctx: Arc<PadicContext>,
    coords: Vec<i128>,
    prec: u32,
}

impl fmt::Debug for PadicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (+O(π^{}))", self, self.prec)
    }
}

impl fmt::Display for PadicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ctx = &self.ctx;
        if ctx.degree() == 1 {
            return write!(f, "{}", self.coords[0]);
        }
        let mut terms = Vec::new();
        for i in 0..ctx.e() {
            for j in 0..ctx.f() {
                let c = self.coords[i * ctx.f() + j];
                if c == 0 {
                    continue;
                }
                let mut t = c.to_string();
                if j > 0 {
                    t.push_str(&format!("*w^{j}"));
                }
                if i > 0 {
                    t.push_str(&format!("*pi^{i}"));
                }
                terms.push(t);
            }
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl PartialEq for PadicElement {
    /// Equality up to the smaller of the two known precisions.
    fn eq(&self, other: &Self) -> bool {
        if self.ctx != other.ctx {
            return false;
        }
        let m = self.prec.min(other.prec);
        self.truncate(m).coords == other.truncate(m).coords
    }
}

impl PadicElement {
    fn raw(ctx: &Arc<PadicContext>, coords: Vec<i128>, prec: u32) -> Self {
        let mut x = PadicElement {
            ctx: ctx.clone(),
            coords,
            prec: prec.min(ctx.precision()),
        };
        x.canonicalize();
        x
    }

    fn canonicalize(&mut self) {
        let ctx = &self.ctx;
        let f = ctx.f();
        for i in 0..ctx.e() {
            let m = ctx.coord_modulus(i, self.prec);
            for j in 0..f {
                let c = &mut self.coords[i * f + j];
                *c = c.rem_euclid(m);
            }
        }
    }

    pub fn zero(ctx: &Arc<PadicContext>) -> Self {
        Self::raw(ctx, vec![0; ctx.degree()], ctx.precision())
    }

    pub fn one(ctx: &Arc<PadicContext>) -> Self {
        Self::from_int(ctx, 1)
    }

    pub fn from_int(ctx: &Arc<PadicContext>, n: i64) -> Self {
        Self::from_i128(ctx, n as i128)
    }

    pub fn from_i128(ctx: &Arc<PadicContext>, n: i128) -> Self {
        let mut coords = vec![0; ctx.degree()];
        coords[0] = n.rem_euclid(ctx.modulus());
        Self::raw(ctx, coords, ctx.precision())
    }

    /// A rational integer a/b with b prime to p.
    pub fn from_fraction(ctx: &Arc<PadicContext>, num: i64, den: i64) -> Result<Self> {
        let d = Self::from_int(ctx, den);
        Self::from_int(ctx, num).div(&d)
    }

    /// Builds an element from its coordinates in the basis {π^i ω^j}, index
    /// i·f + j.
    pub fn from_coords(ctx: &Arc<PadicContext>, coords: &[i128], prec: u32) -> Result<Self> {
        if coords.len() != ctx.degree() {
            return Err(Error::arg(format!(
                "expected {} coordinates, got {}",
                ctx.degree(),
                coords.len()
            )));
        }
        let m = ctx.modulus();
        Ok(Self::raw(
            ctx,
            coords.iter().map(|c| c.rem_euclid(m)).collect(),
            prec,
        ))
    }

    /// The uniformizer π.
    pub fn pi(ctx: &Arc<PadicContext>) -> Self {
        Self::pi_pow(ctx, 1)
    }

    pub fn pi_pow(ctx: &Arc<PadicContext>, k: u32) -> Self {
        Self::one(ctx).mul_pi_pow(k)
    }

    /// The generator ω of the unramified subring.
    pub fn omega(ctx: &Arc<PadicContext>) -> Self {
        let mut coords = vec![0; ctx.degree()];
        if ctx.f() > 1 {
            coords[1] = 1;
        } else {
            // ω is the root of the degree-one polynomial x + c
            coords[0] = (-ctx.unram_poly()[0]).rem_euclid(ctx.modulus());
        }
        Self::raw(ctx, coords, ctx.precision())
    }

    pub fn ctx(&self) -> &Arc<PadicContext> {
        &self.ctx
    }
    pub fn coords(&self) -> &[i128] {
        &self.coords
    }
    /// Known absolute π-adic precision.
    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Forgets digits beyond π^prec.
    pub fn truncate(&self, prec: u32) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        Self::raw(&self.ctx, self.coords.clone(), prec)
    }

    /// Declares a higher known precision: the stored digits are taken as
    /// exact. Used for lifting residues to integral representatives.
    pub fn lift(&self) -> Self {
        Self::raw(&self.ctx, self.coords.clone(), self.ctx.precision())
    }

    fn same_ctx(&self, other: &Self) {
        debug_assert!(
            Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx,
            "mixing elements of different contexts"
        );
    }

    pub fn valuation(&self) -> Valuation {
        let ctx = &self.ctx;
        let f = ctx.f();
        let mut best: Option<u32> = None;
        for i in 0..ctx.e() {
            if let Some(v) = ctx.unram_valuation(&self.coords[i * f..(i + 1) * f]) {
                let val = v * ctx.e() as u32 + i as u32;
                best = Some(best.map_or(val, |b| b.min(val)));
            }
        }
        match best {
            Some(v) if v < self.prec => Valuation::Exact(v),
            _ => Valuation::AtLeast(self.prec),
        }
    }

    pub fn valuation_p(&self) -> PValuation {
        let e = self.ctx.e() as i64;
        match self.valuation() {
            Valuation::Exact(v) => PValuation::Exact(Ratio::new(v as i64, e)),
            Valuation::AtLeast(v) => PValuation::AtLeast(Ratio::new(v as i64, e)),
        }
    }

    /// True when indistinguishable from zero at the known precision.
    pub fn is_zero(&self) -> bool {
        matches!(self.valuation(), Valuation::AtLeast(_))
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Valuation::Exact(0)
    }

    /// Residue modulo π^m. Fails when m exceeds the known precision.
    pub fn reduce_mod(&self, m: u32) -> Result<Self> {
        if m > self.prec {
            return Err(Error::Precision {
                needed: m,
                available: self.prec,
            });
        }
        Ok(self.truncate(m))
    }

    /// x ≡ y mod π^m, decided at the available precision.
    pub fn congruent_mod(&self, other: &Self, m: u32) -> Result<bool> {
        let d = self - other;
        match d.valuation() {
            Valuation::Exact(v) => Ok(v >= m),
            Valuation::AtLeast(v) if v >= m => Ok(true),
            Valuation::AtLeast(v) => Err(Error::Precision {
                needed: m,
                available: v,
            }),
        }
    }

    // ---- ring operations ----

    pub fn mul_pi_pow(&self, k: u32) -> Self {
        let mut x = self.clone();
        for _ in 0..k {
            x = x.mul_pi_once();
        }
        x
    }

    fn mul_pi_once(&self) -> Self {
        let ctx = &self.ctx;
        let (e, f) = (ctx.e(), ctx.f());
        let m = ctx.modulus();
        let top = self.coords[(e - 1) * f..e * f].to_vec();
        let mut out = vec![0i128; e * f];
        for i in (1..e).rev() {
            out[i * f..(i + 1) * f].copy_from_slice(&self.coords[(i - 1) * f..i * f]);
        }
        for (i, r) in ctx.pi_e().iter().enumerate() {
            let t = ctx.unram_mul(&top, r);
            for j in 0..f {
                out[i * f + j] = (out[i * f + j] + t[j]) % m;
            }
        }
        Self::raw(ctx, out, self.prec.saturating_add(1))
    }

    /// Exact division by π^k; requires v(x) ≥ k.
    pub fn div_pi_pow(&self, k: u32) -> Result<Self> {
        let mut x = self.clone();
        for _ in 0..k {
            x = x.div_pi_once()?;
        }
        Ok(x)
    }

    fn div_pi_once(&self) -> Result<Self> {
        if self.valuation().bound() < 1 {
            return Err(Error::NonIntegral);
        }
        if self.prec == 0 {
            return Ok(self.clone());
        }
        let ctx = &self.ctx;
        let (e, f) = (ctx.e(), ctx.f());
        let p = ctx.p() as i128;
        let mut shifted = vec![0i128; e * f];
        for i in 1..e {
            shifted[(i - 1) * f..i * f].copy_from_slice(&self.coords[i * f..(i + 1) * f]);
        }
        let mut c0 = vec![0i128; e * f];
        for j in 0..f {
            c0[j] = self.coords[j] / p;
        }
        let head = Self::raw(ctx, c0, ctx.precision()) * p_over_pi(ctx);
        let rest = Self::raw(ctx, shifted, ctx.precision());
        let out = rest + head;
        Ok(out.truncate(self.prec - 1))
    }

    /// Multiplicative inverse of a unit, by Newton iteration from the
    /// residue field inverse.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotUnit);
        }
        let field = ResidueField::of(&self.ctx);
        let r = field.from_element(self);
        let rinv = field.inv(r);
        let mut x = field.lift(&self.ctx, rinv);
        let this = self.lift();
        let two = Self::from_int(&self.ctx, 2);
        let target = self.prec;
        let mut known = 1u32;
        while known < target {
            known = (2 * known).min(target);
            let ux = (&this * &x).truncate(known);
            // x is an approximation whose digits are taken as exact
            x = (&x * &(&two - &ux)).lift();
        }
        Ok(x.truncate(target))
    }

    /// a / b with v(b) ≤ v(a).
    pub fn div(&self, b: &Self) -> Result<Self> {
        let vb = match b.valuation() {
            Valuation::Exact(v) => v,
            Valuation::AtLeast(_) => {
                return Err(Error::Undecidable("division by an element indistinguishable from zero".into()))
            }
        };
        let bu = b.div_pi_pow(vb)?;
        let a = self.div_pi_pow(vb)?;
        Ok(&a * &bu.inverse()?)
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut result = Self::one(&self.ctx);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        result
    }

    /// Uniformly random element with all digits below `prec` drawn.
    pub fn random<R: Rng + ?Sized>(ctx: &Arc<PadicContext>, rng: &mut R, prec: u32) -> Self {
        let coords = (0..ctx.degree())
            .map(|_| rng.gen_range(0..ctx.modulus()))
            .collect();
        Self::raw(ctx, coords, ctx.precision()).truncate(prec)
    }

    /// Random element of exact valuation `v` (in π-units) with precision
    /// `prec`.
    pub fn random_with_valuation<R: Rng + ?Sized>(
        ctx: &Arc<PadicContext>,
        rng: &mut R,
        v: u32,
        prec: u32,
    ) -> Self {
        let field = ResidueField::of(ctx);
        let unit_digit = rng.gen_range(1..field.size());
        let lead = field.lift(ctx, unit_digit as u32);
        let tail = Self::random(ctx, rng, prec).mul_pi_pow(1);
        (&lead + &tail).mul_pi_pow(v).truncate(prec)
    }
}

/// p/π = π^{e-1}·ε^{-1} where π^e = p·ε.
fn p_over_pi(ctx: &Arc<PadicContext>) -> PadicElement {
    let (e, f) = (ctx.e(), ctx.f());
    let p = ctx.p() as i128;
    // ε = Σ (pi_e[i]/p) π^i
    let mut eps = vec![0i128; e * f];
    for (i, r) in ctx.pi_e().iter().enumerate() {
        for j in 0..f {
            eps[i * f + j] = r[j] / p;
        }
    }
    let eps = PadicElement::raw(ctx, eps, ctx.precision());
    let inv = eps.inverse().expect("Eisenstein quotient is a unit");
    &PadicElement::pi_pow(ctx, (e - 1) as u32) * &inv
}

impl<'a> Add<&'a PadicElement> for &'a PadicElement {
    type Output = PadicElement;
    fn add(self, rhs: &PadicElement) -> PadicElement {
        self.same_ctx(rhs);
        let m = self.ctx.modulus();
        let coords = self
            .coords
            .iter()
            .zip(&rhs.coords)
            .map(|(a, b)| (a + b) % m)
            .collect();
        PadicElement::raw(&self.ctx, coords, self.prec.min(rhs.prec))
    }
}

impl<'a> Sub<&'a PadicElement> for &'a PadicElement {
    type Output = PadicElement;
    fn sub(self, rhs: &PadicElement) -> PadicElement {
        self.same_ctx(rhs);
        let m = self.ctx.modulus();
        let coords = self
            .coords
            .iter()
            .zip(&rhs.coords)
            .map(|(a, b)| (a - b).rem_euclid(m))
            .collect();
        PadicElement::raw(&self.ctx, coords, self.prec.min(rhs.prec))
    }
}

impl Neg for &PadicElement {
    type Output = PadicElement;
    fn neg(self) -> PadicElement {
        let m = self.ctx.modulus();
        let coords = self.coords.iter().map(|a| (-a).rem_euclid(m)).collect();
        PadicElement::raw(&self.ctx, coords, self.prec)
    }
}

impl<'a> Mul<&'a PadicElement> for &'a PadicElement {
    type Output = PadicElement;
    fn mul(self, rhs: &PadicElement) -> PadicElement {
        self.same_ctx(rhs);
        let ctx = &self.ctx;
        let (e, f) = (ctx.e(), ctx.f());
        let m = ctx.modulus();
        let mut prod = vec![vec![0i128; f]; 2 * e - 1];
        for i in 0..e {
            let a = &self.coords[i * f..(i + 1) * f];
            if a.iter().all(|&c| c == 0) {
                continue;
            }
            for j in 0..e {
                let b = &rhs.coords[j * f..(j + 1) * f];
                if b.iter().all(|&c| c == 0) {
                    continue;
                }
                let t = ctx.unram_mul(a, b);
                for k in 0..f {
                    prod[i + j][k] = (prod[i + j][k] + t[k]) % m;
                }
            }
        }
        for k in (e..2 * e - 1).rev() {
            let top = std::mem::replace(&mut prod[k], vec![0; f]);
            if top.iter().all(|&c| c == 0) {
                continue;
            }
            for (i, r) in ctx.pi_e().iter().enumerate() {
                let t = ctx.unram_mul(&top, r);
                for j in 0..f {
                    prod[k - e + i][j] = (prod[k - e + i][j] + t[j]) % m;
                }
            }
        }
        let coords: Vec<i128> = prod.into_iter().take(e).flatten().collect();
        let va = self.valuation().bound();
        let vb = rhs.valuation().bound();
        let prec = (self.prec.saturating_add(vb)).min(rhs.prec.saturating_add(va));
        PadicElement::raw(ctx, coords, prec)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<PadicElement> for PadicElement {
            type Output = PadicElement;
            fn $method(self, rhs: PadicElement) -> PadicElement {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a PadicElement> for PadicElement {
            type Output = PadicElement;
            fn $method(self, rhs: &PadicElement) -> PadicElement {
                (&self).$method(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for PadicElement {
    type Output = PadicElement;
    fn neg(self) -> PadicElement {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: u64, n: u32) -> Arc<PadicContext> {
        PadicContext::qp(p, n).unwrap()
    }

    #[test]
    fn valuation_examples() {
        let c5 = q(5, 10);
        assert_eq!(PadicElement::from_int(&c5, 5).valuation_p(), PValuation::Exact(Ratio::new(1, 1)));
        let ram = PadicContext::eisenstein(3, &[-3, 0, 1], 12).unwrap();
        let pi = PadicElement::pi(&ram);
        assert_eq!(pi.valuation_p(), PValuation::Exact(Ratio::new(1, 2)));
        let unit = PadicElement::from_int(&ram, 2) + PadicElement::pi(&ram);
        let x = &pi.pow(3) * &unit;
        assert_eq!(x.valuation_p(), PValuation::Exact(Ratio::new(3, 2)));
        // independent route: divide π out three times
        let back = x.div_pi_pow(3).unwrap();
        assert!(back.is_unit());
        assert!(x.div_pi_pow(4).is_err());
        assert_eq!(back, unit.truncate(back.precision()));
    }

    #[test]
    fn zero_is_flagged() {
        let c = q(3, 6);
        let z = PadicElement::from_int(&c, 729);
        assert_eq!(z.valuation(), Valuation::AtLeast(6));
        assert!(z.is_zero());
    }

    #[test]
    fn reduce_mod_examples() {
        let c5 = q(5, 10);
        let seven = PadicElement::from_int(&c5, 7);
        assert_eq!(seven.reduce_mod(1).unwrap().coords()[0], 2);
        let x = PadicElement::from_int(&c5, 26);
        assert_eq!(x.reduce_mod(2).unwrap().coords()[0], 1);
        let ram = PadicContext::eisenstein(3, &[-3, 0, 1], 12).unwrap();
        let pi = PadicElement::pi(&ram);
        let y = &pi + &pi.pow(3);
        let r = y.reduce_mod(2).unwrap();
        assert_eq!(r, pi.truncate(2));
        assert!(seven.truncate(3).reduce_mod(4).is_err());
    }

    #[test]
    fn pi_power_e_is_p_times_unit() {
        let ctx = PadicContext::eisenstein(5, &[10, 5, 1], 12).unwrap();
        let pi = PadicElement::pi(&ctx);
        let pe = pi.pow(2);
        // π^2 = -5π - 10
        let expect = -(&(&PadicElement::from_int(&ctx, 5) * &pi) + &PadicElement::from_int(&ctx, 10));
        assert_eq!(pe, expect);
        assert_eq!(pe.valuation(), Valuation::Exact(2));
    }

    #[test]
    fn inverse_and_division() {
        let ctx = PadicContext::new(7, vec![3, 1, 1], vec![vec![7, 0], vec![0, 7], vec![1, 0]], 10).unwrap();
        let mut rng = rand::thread_rng();
        for _ in 0..50 {
            let u = PadicElement::random_with_valuation(&ctx, &mut rng, 0, 10);
            let inv = u.inverse().unwrap();
            assert_eq!(inv.precision(), 10);
            assert_eq!((&u * &inv), PadicElement::one(&ctx));
        }
        let a = PadicElement::pi_pow(&ctx, 5);
        let b = PadicElement::pi_pow(&ctx, 2);
        assert_eq!(a.div(&b).unwrap(), PadicElement::pi_pow(&ctx, 3));
        assert_eq!(b.div(&a), Err(Error::NonIntegral));
    }

    #[test]
    fn omega_satisfies_its_polynomial() {
        let ctx = PadicContext::unramified(3, 2, 8).unwrap();
        let w = PadicElement::omega(&ctx);
        let g = ctx.unram_poly().to_vec();
        let mut acc = PadicElement::zero(&ctx);
        for c in g.iter().rev() {
            acc = &(&acc * &w) + &PadicElement::from_i128(&ctx, *c);
        }
        assert!(acc.is_zero());
    }
}
