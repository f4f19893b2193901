use std::sync::Arc;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::padic::{Extension, PadicContext, PadicNumber, ResidueField};

fn vp(x: &PadicNumber) -> Option<Ratio<i64>> {
    x.valuation_p().ok()
}

/// Slopes of the Newton polygon of X² − t·X + d, ascending. A zero trace
/// counts as valuation +∞.
pub fn newton_slopes(t: &PadicNumber, d: &PadicNumber) -> Result<(Ratio<i64>, Ratio<i64>)> {
    let vd = vp(d).ok_or_else(|| Error::Domain("determinant is indistinguishable from zero".into()))?;
    match vp(t) {
        Some(vt) if vt * 2 < vd => Ok((vt, vd - vt)),
        _ => Ok((vd / 2, vd / 2)),
    }
}

pub(crate) fn embed_number(ext: &Extension, x: &PadicNumber) -> Result<PadicNumber> {
    let e = ext.e_rel() as i64;
    let v = x.valuation().unwrap_or(0).min(x.precision());
    let m = x.mul_pi_pow(-v).to_integral()?;
    Ok(PadicNumber::new(v * e, ext.embed(&m)?))
}

fn half(ctx: &Arc<PadicContext>) -> Result<PadicNumber> {
    if ctx.p() == 2 {
        return Err(Error::Unsupported("the quadratic formula needs p ≠ 2".into()));
    }
    PadicNumber::from_int(ctx, 2).inverse()
}

/// A square root of x in its own field, or None when x is not a square
/// there. Requires p odd.
fn sqrt(x: &PadicNumber) -> Result<Option<PadicNumber>> {
    let ctx = x.ctx().clone();
    let h = half(&ctx)?;
    let Ok(v) = x.valuation() else {
        return Ok(Some(PadicNumber::zero(&ctx)));
    };
    if v % 2 != 0 {
        return Ok(None);
    }
    let u = x.mul_pi_pow(-v);
    let k = ResidueField::of(&ctx);
    let r = k.from_element(&u.to_integral()?);
    let Some(s0) = k.elements().find(|&s| k.mul(s, s) == r) else {
        return Ok(None);
    };
    let mut s = PadicNumber::from(k.lift(&ctx, s0));
    for _ in 0..2 * ctx.precision() + 8 {
        let next = &(&s + &u.div(&s)?) * &h;
        if next == s {
            break;
        }
        s = next;
    }
    Ok(Some(s.mul_pi_pow(v / 2)))
}

/// Roots of X² − t·X + d, the first of smaller p-adic valuation, together
/// with the extension they were found in (None: the base field).
pub fn quadratic_roots(t: &PadicNumber, d: &PadicNumber) -> Result<(Option<Extension>, PadicNumber, PadicNumber)> {
    let ctx = t.ctx().clone();
    let (s1, s2) = newton_slopes(t, d)?;
    if s1 < s2 {
        // x ↦ t − d/x contracts near the root of valuation v(t)
        let mut x = t.clone();
        for _ in 0..4 * ctx.precision() + 8 {
            let next = t - &d.div(&x)?;
            if next == x {
                break;
            }
            x = next;
        }
        let y = d.div(&x)?;
        return Ok((None, x, y));
    }
    let h = half(&ctx)?;
    let disc = &(t * t) - &(&PadicNumber::from_int(&ctx, 4) * d);
    let (ext, t, disc) = match sqrt(&disc)? {
        Some(_) => (None, t.clone(), disc),
        None => {
            let v = disc.valuation().unwrap_or(0);
            if v % 2 != 0 {
                return Err(Error::Unsupported(
                    "needs-extension: the roots generate a ramified quadratic extension".into(),
                ));
            }
            let ext = Extension::build(&ctx, 1, 2)?;
            let t2 = embed_number(&ext, t)?;
            let d2 = embed_number(&ext, &disc)?;
            (Some(ext), t2, d2)
        }
    };
    let ectx = t.ctx().clone();
    let s = sqrt(&disc)?.ok_or_else(|| Error::Domain("square root not found in the quadratic extension".into()))?;
    let h = if ext.is_some() { half(&ectx)? } else { h };
    let r1 = &(&t + &s) * &h;
    let r2 = &(&t - &s) * &h;
    let (a, b) = match (r1.valuation(), r2.valuation()) {
        (Ok(a), Ok(b)) if b < a => (r2, r1),
        _ => (r1, r2),
    };
    Ok((ext, a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicElement;

    fn int(ctx: &Arc<PadicContext>, n: i64) -> PadicNumber {
        PadicElement::from_int(ctx, n).into()
    }

    fn check_roots(t: &PadicNumber, d: &PadicNumber) -> (Option<Extension>, PadicNumber, PadicNumber) {
        let (ext, a, b) = quadratic_roots(t, d).unwrap();
        let (t, d) = match &ext {
            Some(e) => (embed_number(e, t).unwrap(), embed_number(e, d).unwrap()),
            None => (t.clone(), d.clone()),
        };
        let sum = &a + &b;
        let prod = &a * &b;
        assert!((&sum - &t).valuation().is_err() || (&sum - &t).valuation().unwrap() >= 4, "sum {sum} vs {t}");
        assert!((&prod - &d).valuation().is_err() || (&prod - &d).valuation().unwrap() >= 4, "prod {prod} vs {d}");
        (ext, a, b)
    }

    #[test]
    fn ordinary_roots() {
        let ctx = PadicContext::qp(5, 20).unwrap();
        // X² − 7X + 25: slopes 0 and 2
        let (ext, a, b) = check_roots(&int(&ctx, 7), &int(&ctx, 25));
        assert!(ext.is_none());
        assert_eq!(a.valuation(), Ok(0));
        assert_eq!(b.valuation(), Ok(2));
    }

    #[test]
    fn supersingular_needs_unramified_extension() {
        let ctx = PadicContext::qp(5, 20).unwrap();
        // X² − 5X + 25 = 25(Y² − Y + 1), Y = X/5; −3 is not a square mod 5
        let (ext, a, b) = check_roots(&int(&ctx, 5), &int(&ctx, 25));
        let ext = ext.unwrap();
        assert_eq!(ext.f_rel(), 2);
        assert_eq!(a.valuation(), Ok(1));
        assert_eq!(b.valuation(), Ok(1));
        // X² + 25: the discriminant −100 = 100·(−1) and −1 ≡ 4 is a square mod 5
        let (ext, _, _) = check_roots(&int(&ctx, 0), &int(&ctx, 25));
        assert!(ext.is_none());
    }

    #[test]
    fn ramified_roots_refused() {
        let ctx = PadicContext::qp(3, 20).unwrap();
        // X² − 9X + 27: both slopes 3/2
        assert!(matches!(quadratic_roots(&int(&ctx, 9), &int(&ctx, 27)), Err(Error::Unsupported(_))));
        let s = newton_slopes(&int(&ctx, 9), &int(&ctx, 27)).unwrap();
        assert_eq!(s, (Ratio::new(3, 2), Ratio::new(3, 2)));
    }
}
