use std::sync::Arc;

use super::context::PadicContext;
use super::element::{PadicElement, Valuation};
use super::residue_field::ResidueField;
use crate::error::{Error, Result};

/// A marked embedding L → E of finite extensions of Q_p.
///
/// E is built as an unramified-then-Eisenstein tower whose uniformizer
/// satisfies u·π_E^{e_rel} = π_L for an integer unit u (the twist), so that
/// images of L-elements are available in closed form.
#[derive(Debug, Clone)]
pub struct Extension {
    base: Arc<PadicContext>,
    ext: Arc<PadicContext>,
    e_rel: usize,
    f_rel: usize,
    // image of ω_L in the unramified subring of E
    omega_image: Vec<i128>,
    // image of π_L
    pi_image: PadicElement,
}

impl Extension {
    /// The identity embedding L → L.
    pub fn trivial(ctx: &Arc<PadicContext>) -> Self {
        let mut omega = vec![0i128; ctx.f()];
        let w = PadicElement::omega(ctx);
        omega.copy_from_slice(&w.coords()[..ctx.f()]);
        Extension {
            base: ctx.clone(),
            ext: ctx.clone(),
            e_rel: 1,
            f_rel: 1,
            omega_image: omega,
            pi_image: PadicElement::pi(ctx),
        }
    }

    /// Builds E over L with relative degrees (e_rel, f_rel) and π_L = π_E^{e_rel}.
    pub fn build(base: &Arc<PadicContext>, e_rel: usize, f_rel: usize) -> Result<Self> {
        Self::build_twisted(base, e_rel, f_rel, 1)
    }

    /// Like [`Extension::build`] but with π_L = u·π_E^{e_rel} for an integer
    /// unit u.
    pub fn build_twisted(base: &Arc<PadicContext>, e_rel: usize, f_rel: usize, u: i64) -> Result<Self> {
        if e_rel == 0 || f_rel == 0 {
            return Err(Error::arg("relative degrees must be at least 1"));
        }
        let p = base.p();
        if (u as i128).rem_euclid(p as i128) == 0 {
            return Err(Error::arg(format!("twist {u} is not a unit")));
        }
        let prec = base
            .precision()
            .checked_mul(e_rel as u32)
            .ok_or_else(|| Error::arg("precision overflow"))?;

        let f_e = base.f() * f_rel;
        let unram_e: Vec<i128> = if f_rel == 1 {
            base.unram_poly().to_vec()
        } else {
            super::arith::first_irreducible(p, f_e)
                .into_iter()
                .map(|c| c as i128)
                .collect()
        };
        let unr_ctx = PadicContext::from_residues(
            p,
            unram_e.clone(),
            vec![minus_p(p, f_e), one(f_e)],
            base.precision().div_ceil(base.e() as u32),
        )
        .map(Arc::new)?;
        let omega_image = if f_rel == 1 {
            let w = PadicElement::omega(&unr_ctx);
            w.coords().to_vec()
        } else {
            hensel_root(&unr_ctx, base.unram_poly())?.coords().to_vec()
        };

        // eis_E(X) = u^{-e_L} · eis_L(u X^{e_rel}) with σ applied to coefficients
        let e_l = base.e();
        let modulus = unr_ctx.modulus();
        let u_el = PadicElement::from_int(&unr_ctx, u);
        let u_inv = u_el.inverse()?;
        let mut eis_e = vec![vec![0i128; f_e]; e_l * e_rel + 1];
        for (i, coef) in base.eis_poly().iter().enumerate() {
            let mut img = sigma_unram(&unr_ctx, &omega_image, coef);
            // multiply by u^{i - e_L}
            let k = e_l - i;
            let scale = u_inv.pow(k as u64);
            img = &img * &scale;
            let mut v: Vec<i128> = img.coords()[..f_e].iter().map(|c| c.rem_euclid(modulus)).collect();
            v.resize(f_e, 0);
            eis_e[i * e_rel] = v;
        }
        let ext = PadicContext::from_residues(p, unram_e, eis_e, prec).map(Arc::new)?;
        let pi_image = &PadicElement::from_int(&ext, u) * &PadicElement::pi_pow(&ext, e_rel as u32);
        Ok(Extension {
            base: base.clone(),
            ext,
            e_rel,
            f_rel,
            omega_image,
            pi_image,
        })
    }

    /// Marks an existing context E as an extension of an unramified L whose
    /// uniformizer is p. The residue degree of L must divide that of E.
    pub fn over_unramified(base: &Arc<PadicContext>, ext: &Arc<PadicContext>) -> Result<Self> {
        if base.p() != ext.p() {
            return Err(Error::arg("contexts have different primes"));
        }
        if base.e() != 1 || base.eis_poly()[0][0] != base.modulus() - base.p() as i128 {
            return Err(Error::Unsupported(
                "implicit embeddings need an unramified base with uniformizer p".into(),
            ));
        }
        if ext.f() % base.f() != 0 {
            return Err(Error::arg("residue degree of the base does not divide that of the extension"));
        }
        if ext.precision() < base.precision() * ext.e() as u32 {
            return Err(Error::arg("extension precision too small for the base"));
        }
        let unr_ctx = PadicContext::from_residues(
            ext.p(),
            ext.unram_poly().to_vec(),
            vec![minus_p(ext.p(), ext.f()), one(ext.f())],
            ext.precision().div_ceil(ext.e() as u32),
        )
        .map(Arc::new)?;
        let omega_image = if base.f() == 1 {
            let w = PadicElement::omega(base);
            let mut v = vec![0i128; ext.f()];
            v[0] = w.coords()[0];
            v
        } else if base.unram_poly() == ext.unram_poly() {
            PadicElement::omega(&unr_ctx).coords().to_vec()
        } else {
            hensel_root(&unr_ctx, base.unram_poly())?.coords().to_vec()
        };
        let pi_image = PadicElement::from_int(ext, ext.p() as i64);
        Ok(Extension {
            base: base.clone(),
            ext: ext.clone(),
            e_rel: ext.e(),
            f_rel: ext.f() / base.f(),
            omega_image,
            pi_image,
        })
    }

    /// Composite L → E → F of two marked extensions.
    pub fn compose(&self, upper: &Extension) -> Result<Self> {
        if *self.ext != *upper.base {
            return Err(Error::arg("extensions do not compose"));
        }
        let w = sigma_unram_elem(&self.ext, &self.omega_image);
        let omega = upper.embed(&w)?;
        Ok(Extension {
            base: self.base.clone(),
            ext: upper.ext.clone(),
            e_rel: self.e_rel * upper.e_rel,
            f_rel: self.f_rel * upper.f_rel,
            omega_image: omega.coords()[..upper.ext.f()].to_vec(),
            pi_image: upper.embed(&self.pi_image)?,
        })
    }

    pub fn base(&self) -> &Arc<PadicContext> {
        &self.base
    }
    pub fn ext(&self) -> &Arc<PadicContext> {
        &self.ext
    }
    pub fn e_rel(&self) -> usize {
        self.e_rel
    }
    pub fn f_rel(&self) -> usize {
        self.f_rel
    }

    /// Image of an L-element in E. Precision scales by e_rel.
    pub fn embed(&self, x: &PadicElement) -> Result<PadicElement> {
        if **x.ctx() != *self.base {
            return Err(Error::arg("element does not belong to the base context"));
        }
        let ext = &self.ext;
        let (e_l, f_l) = (self.base.e(), self.base.f());
        let w = sigma_unram_elem(ext, &self.omega_image);
        let mut w_pows = vec![PadicElement::one(ext)];
        for j in 1..f_l {
            w_pows.push(&w_pows[j - 1] * &w);
        }
        let mut acc = PadicElement::zero(ext);
        let mut pi_pow = PadicElement::one(ext);
        for i in 0..e_l {
            for (j, wj) in w_pows.iter().enumerate() {
                let c = x.coords()[i * f_l + j];
                if c != 0 {
                    let t = &(&PadicElement::from_i128(ext, c) * wj) * &pi_pow;
                    acc = &acc + &t;
                }
            }
            pi_pow = &pi_pow * &self.pi_image;
        }
        let prec = x.precision().saturating_mul(self.e_rel as u32);
        Ok(acc.truncate(prec))
    }

    /// v_E of the image, in π_E units.
    pub fn valuation_in_ext(&self, x: &PadicElement) -> Result<Valuation> {
        Ok(self.embed(x)?.valuation())
    }
}

fn minus_p(p: u64, f: usize) -> Vec<i128> {
    let mut v = vec![0i128; f];
    v[0] = -(p as i128);
    v
}

fn one(f: usize) -> Vec<i128> {
    let mut v = vec![0i128; f];
    v[0] = 1;
    v
}

/// The unramified coordinates `w` as an element of `ctx` (π^0 part).
fn sigma_unram_elem(ctx: &Arc<PadicContext>, w: &[i128]) -> PadicElement {
    let mut coords = vec![0i128; ctx.degree()];
    coords[..w.len()].copy_from_slice(w);
    PadicElement::from_coords(ctx, &coords, ctx.precision()).expect("coordinate count")
}

/// σ(c) for c ∈ Z[ω_L] given by coordinates, where σ(ω_L) = `omega`.
fn sigma_unram(ctx: &Arc<PadicContext>, omega: &[i128], c: &[i128]) -> PadicElement {
    let w = sigma_unram_elem(ctx, omega);
    let mut acc = PadicElement::zero(ctx);
    for &cj in c.iter().rev() {
        acc = &(&acc * &w) + &PadicElement::from_i128(ctx, cj);
    }
    acc
}

fn eval_poly(ctx: &Arc<PadicContext>, g: &[i128], x: &PadicElement) -> PadicElement {
    let mut acc = PadicElement::zero(ctx);
    for &c in g.iter().rev() {
        acc = &(&acc * x) + &PadicElement::from_i128(ctx, c);
    }
    acc
}

/// A root of `g` (integer coefficients) in the unramified context, found by
/// search in the residue field and Hensel lifting.
fn hensel_root(ctx: &Arc<PadicContext>, g: &[i128]) -> Result<PadicElement> {
    let k = ResidueField::of(ctx);
    let deriv: Vec<i128> = g.iter().enumerate().skip(1).map(|(i, &c)| c * i as i128).collect();
    for a in k.elements() {
        let x0 = k.lift(ctx, a);
        if !eval_poly(ctx, g, &x0).truncate(1).is_zero() {
            continue;
        }
        let d = eval_poly(ctx, &deriv, &x0);
        if !d.is_unit() {
            continue;
        }
        let mut x = x0;
        for _ in 0..64 {
            let gx = eval_poly(ctx, g, &x);
            if gx.is_zero() {
                return Ok(x);
            }
            let dx = eval_poly(ctx, &deriv, &x);
            x = &x - &gx.div(&dx)?;
        }
        return Ok(x);
    }
    Err(Error::InvalidContext("no simple root of the base polynomial in the residue field".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_is_a_ring_map() {
        let l = PadicContext::new(5, vec![2, 0, 1], vec![vec![-5, 0], vec![1, 0]], 6).unwrap();
        let ext = Extension::build(&l, 2, 2).unwrap();
        assert_eq!(ext.ext().e(), 2);
        assert_eq!(ext.ext().f(), 4);
        let mut rng = rand::thread_rng();
        for _ in 0..20 {
            let a = PadicElement::random(&l, &mut rng, 6);
            let b = PadicElement::random(&l, &mut rng, 6);
            let lhs = ext.embed(&(&a * &b)).unwrap();
            let rhs = &ext.embed(&a).unwrap() * &ext.embed(&b).unwrap();
            assert_eq!(lhs, rhs);
            let lhs = ext.embed(&(&a + &b)).unwrap();
            let rhs = &ext.embed(&a).unwrap() + &ext.embed(&b).unwrap();
            assert_eq!(lhs, rhs);
        }
        let w = ext.embed(&PadicElement::omega(&l)).unwrap();
        assert!((&(&w * &w) + &PadicElement::from_int(ext.ext(), 2)).is_zero());
    }

    #[test]
    fn uniformizer_maps_to_power() {
        let l = PadicContext::qp(3, 5).unwrap();
        let ext = Extension::build_twisted(&l, 3, 1, 2).unwrap();
        let img = ext.embed(&PadicElement::from_int(&l, 3)).unwrap();
        assert_eq!(img.valuation(), Valuation::Exact(3));
        assert_eq!(img.precision(), 15);
    }

    #[test]
    fn composition_matches_direct() {
        let l = PadicContext::qp(3, 4).unwrap();
        let a = Extension::build(&l, 2, 1).unwrap();
        let b = Extension::build(a.ext(), 1, 2).unwrap();
        let c = a.compose(&b).unwrap();
        let x = PadicElement::from_int(&l, 7);
        assert_eq!(c.embed(&x).unwrap(), PadicElement::from_int(c.ext(), 7));
        assert_eq!(c.e_rel(), 2);
    }
}
