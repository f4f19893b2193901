//! Rank-2 filtered (φ,N)-modules of crystalline and semistable
//! representations, their trianguline parameters, and explicit congruence
//! radii.

mod bounds;
mod roots;

use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::matrix_strings;
use crate::linalg::Matrix;
use crate::padic::{ContextRecord, PadicContext, PadicElement, PadicNumber};
use crate::report::ser_ratio;

pub use bounds::{alpha, crystalline_congruence_disc, semistable_congruence_bound, vp_factorial, CrystallineDisc};
pub use roots::{newton_slopes, quadratic_roots};

fn ser_display<T: fmt::Display, S: Serializer>(x: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn p_number(ctx: &Arc<PadicContext>) -> PadicNumber {
    PadicNumber::from_int(ctx, ctx.p() as i64)
}

fn vp_exact(x: &PadicNumber) -> Result<Ratio<i64>> {
    x.valuation_p()
        .map_err(|_| Error::Undecidable("value indistinguishable from zero".into()))
}

/// A locally algebraic character of Q_p^× with trivial finite-order part:
/// x^w on Z_p^× and δ(p) = value_at_p.
#[derive(Debug, Clone, Serialize)]
pub struct Character {
    pub weight: i64,
    #[serde(serialize_with = "ser_display")]
    pub value_at_p: PadicNumber,
}

impl Character {
    pub fn new(weight: i64, value_at_p: PadicNumber) -> Result<Self> {
        if value_at_p.is_zero() {
            return Err(Error::Domain("δ(p) must be nonzero".into()));
        }
        Ok(Character { weight, value_at_p })
    }

    /// δ(y) = u^w · δ(p)^r for y = p^r·u, y in the value field with
    /// integral v_p.
    pub fn eval(&self, y: &PadicNumber) -> Result<PadicNumber> {
        let ctx = self.value_at_p.ctx();
        if **y.ctx() != **ctx {
            return Err(Error::arg("argument and character values live in different fields"));
        }
        let v = vp_exact(y)?;
        if !v.is_integer() {
            return Err(Error::Domain("argument is not in Q_p^×".into()));
        }
        let r = v.to_integer();
        let u = y.div(&p_number(ctx).pow(r)?)?;
        Ok(&u.pow(self.weight)? * &self.value_at_p.pow(r)?)
    }

    /// False exactly for x^i and χ·x^{−i}, i ≥ 0, with χ(p) = 1 and χ = x on
    /// units: (w, δ(p)) = (i, p^i) or (1 − i, p^{−i}).
    pub fn is_regular(&self) -> bool {
        let ctx = self.value_at_p.ctx();
        let p = p_number(ctx);
        let w = self.weight;
        let hits = |e: i64| p.pow(e).map(|x| x == self.value_at_p).unwrap_or(false);
        !((w >= 0 && hits(w)) || (w <= 1 && hits(w - 1)))
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModuleLabel {
    Crystalline { k: u32, a_p: String },
    Semistable { k: u32, l_invariant: String },
    Custom,
}

/// A point of P¹(E).
#[derive(Debug, Clone)]
pub enum LInvariant {
    Finite(PadicNumber),
    Infinity,
}

/// A rank-2 filtered (φ,N)-module with Hodge jumps 0 and k − 1; the single
/// line of the filtration sits at the jump k − 1.
#[derive(Debug, Clone)]
pub struct PhiModule2 {
    ctx: Arc<PadicContext>,
    k: u32,
    phi: Matrix<PadicNumber>,
    n: Matrix<PadicNumber>,
    fil_line: [PadicNumber; 2],
    label: ModuleLabel,
}

impl PhiModule2 {
    pub fn new(
        k: u32,
        phi: Matrix<PadicNumber>,
        n: Matrix<PadicNumber>,
        fil_line: [PadicNumber; 2],
        label: ModuleLabel,
    ) -> Result<Self> {
        if k < 1 {
            return Err(Error::arg("weight must be at least 1"));
        }
        if phi.rows() != 2 || !phi.is_square() || n.rows() != 2 || !n.is_square() {
            return Err(Error::arg("φ and N must be 2×2"));
        }
        let ctx = phi.get(0, 0).ctx().clone();
        if let Err(bound) = phi.det().valuation() {
            return Err(Error::Precision {
                needed: bound.max(0) as u32 + 1,
                available: ctx.precision(),
            });
        }
        if !n.mul(&n).is_zero() {
            return Err(Error::Domain("N² ≠ 0".into()));
        }
        let p = p_number(&ctx);
        if !n.mul(&phi).sub(&phi.mul(&n).scale(&p)).is_zero() {
            return Err(Error::Domain("Nφ ≠ pφN".into()));
        }
        if fil_line.iter().all(|x| x.is_zero()) {
            return Err(Error::Domain("the filtration line is zero".into()));
        }
        Ok(PhiModule2 {
            ctx,
            k,
            phi,
            n,
            fil_line,
            label,
        })
    }

    pub fn ctx(&self) -> &Arc<PadicContext> {
        &self.ctx
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    pub fn phi(&self) -> &Matrix<PadicNumber> {
        &self.phi
    }
    pub fn monodromy(&self) -> &Matrix<PadicNumber> {
        &self.n
    }
    pub fn fil_line(&self) -> &[PadicNumber; 2] {
        &self.fil_line
    }
    pub fn label(&self) -> &ModuleLabel {
        &self.label
    }
    pub fn hodge_jumps(&self) -> (u32, u32) {
        (0, self.k - 1)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "field": self.ctx.record(),
            "label": self.label,
            "k": self.k,
            "hodge_jumps": [0, self.k - 1],
            "phi": matrix_strings(&self.phi),
            "N": matrix_strings(&self.n),
            "fil_line": self.fil_line.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// φ = [[0, −1], [p^{k−1}, a_p]], N = 0, Fil^{k−1} = E·e1.
pub fn crystalline_module(k: u32, a_p: &PadicNumber) -> Result<PhiModule2> {
    if k < 2 {
        return Err(Error::arg("weight must be at least 2"));
    }
    let ctx = a_p.ctx().clone();
    match a_p.valuation_p() {
        Ok(v) if v <= Ratio::from_integer(0) => {
            return Err(Error::Domain(format!("needs v_p(a_p) > 0, got {v}")));
        }
        _ => {}
    }
    let z = PadicNumber::zero(&ctx);
    let phi = Matrix::from_rows(vec![
        vec![z.clone(), PadicNumber::from_int(&ctx, -1)],
        vec![p_number(&ctx).pow(k as i64 - 1)?, a_p.clone()],
    ]);
    let m = PhiModule2::new(
        k,
        phi,
        Matrix::zeros_like(&z, 2, 2),
        [PadicNumber::one(&ctx), z.clone()],
        ModuleLabel::Crystalline {
            k,
            a_p: a_p.to_string(),
        },
    )?;
    debug_assert!(m.phi.det() == p_number(&ctx).pow(k as i64 - 1)?);
    Ok(m)
}

/// Q_p(ϖ) with ϖ² = p.
pub fn semistable_context(p: u64, precision: u32) -> Result<Arc<PadicContext>> {
    if p == 2 {
        return Err(Error::Domain("needs p ≠ 2".into()));
    }
    PadicContext::eisenstein(p, &[-(p as i64), 0, 1], precision)
}

fn check_semistable_context(ctx: &Arc<PadicContext>) -> Result<()> {
    if ctx.p() == 2 {
        return Err(Error::Domain("needs p ≠ 2".into()));
    }
    let w = PadicNumber::pi_pow(ctx, 1);
    if ctx.e() != 2 || &w * &w != p_number(ctx) {
        return Err(Error::arg("the context must be Q_p(ϖ) with ϖ² = p"));
    }
    Ok(())
}

/// φ = diag(ϖ^k, ϖ^{k−2}), N = [[0, 0], [1, 0]] (N = 0 at ∞),
/// Fil^{k−1} = E·(e1 + L·e2) (E·(e1 + e2) at ∞).
pub fn semistable_module(k: u32, l_inv: &LInvariant, ctx: &Arc<PadicContext>) -> Result<PhiModule2> {
    if k < 2 {
        return Err(Error::arg("weight must be at least 2"));
    }
    check_semistable_context(ctx)?;
    let z = PadicNumber::zero(ctx);
    let one = PadicNumber::one(ctx);
    let phi = Matrix::from_rows(vec![
        vec![PadicNumber::pi_pow(ctx, k as i64), z.clone()],
        vec![z.clone(), PadicNumber::pi_pow(ctx, k as i64 - 2)],
    ]);
    let (n, fil, l) = match l_inv {
        LInvariant::Finite(l) => {
            if **l.ctx() != **ctx {
                return Err(Error::arg("L-invariant lives in another field"));
            }
            let n = Matrix::from_rows(vec![vec![z.clone(), z.clone()], vec![one.clone(), z.clone()]]);
            (n, [one.clone(), l.clone()], l.to_string())
        }
        LInvariant::Infinity => (Matrix::zeros_like(&z, 2, 2), [one.clone(), one.clone()], "∞".to_string()),
    };
    PhiModule2::new(
        k,
        phi,
        n,
        fil,
        ModuleLabel::Semistable { k, l_invariant: l },
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct LineCheck {
    pub line: String,
    pub is_fil_line: bool,
    #[serde(serialize_with = "ser_ratio")]
    pub slope: Ratio<i64>,
    #[serde(serialize_with = "ser_ratio")]
    pub required: Ratio<i64>,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    #[serde(serialize_with = "ser_ratio")]
    pub t_h: Ratio<i64>,
    #[serde(serialize_with = "ser_ratio")]
    pub t_n: Ratio<i64>,
    pub newton_slopes: [crate::report::Rational; 2],
    pub lines: Vec<LineCheck>,
}

fn det2(a: &[PadicNumber; 2], b: &[PadicNumber; 2]) -> PadicNumber {
    &(&a[0] * &b[1]) - &(&a[1] * &b[0])
}

fn apply(m: &Matrix<PadicNumber>, v: &[PadicNumber; 2]) -> [PadicNumber; 2] {
    let w = m.mul_vec(v);
    [w[0].clone(), w[1].clone()]
}

/// λ with m·v = λ·v, assuming v is an eigenvector.
fn eigenvalue(m: &Matrix<PadicNumber>, v: &[PadicNumber; 2]) -> Result<PadicNumber> {
    let w = apply(m, v);
    let i = match (v[0].valuation(), v[1].valuation()) {
        (Ok(a), Ok(b)) if b < a => 1,
        (Err(_), _) => 1,
        _ => 0,
    };
    w[i].div(&v[i])
}

fn line_string(v: &[PadicNumber; 2]) -> String {
    format!("({}, {})", v[0], v[1])
}

/// Fontaine's weak admissibility for rank 2: t_N(D) = t_H(D) and
/// t_H(D') ≤ t_N(D') for every (φ,N)-stable line D'.
pub fn weak_admissibility(m: &PhiModule2) -> Result<AdmissibilityReport> {
    let t_h = Ratio::from_integer(m.k as i64 - 1);
    let det = m.phi.det();
    let t_n = vp_exact(&det)?;
    let slopes = newton_slopes(&m.phi.trace(), &det)?;
    let fil = &m.fil_line;
    let zero = Ratio::from_integer(0);
    let mut lines = Vec::new();
    let mut push = |line: String, is_fil: bool, slope: Ratio<i64>| {
        let required = if is_fil { t_h } else { zero };
        lines.push(LineCheck {
            line,
            is_fil_line: is_fil,
            slope,
            required,
            ok: slope >= required,
        });
    };
    if !m.n.is_zero() {
        // the only N-stable line is ker N, and it is φ-stable
        let r = if m.n.get(0, 0).is_zero() && m.n.get(0, 1).is_zero() { 1 } else { 0 };
        let v = [m.n.get(r, 1).neg(), m.n.get(r, 0).clone()];
        let lam = eigenvalue(&m.phi, &v)?;
        push(line_string(&v), det2(&v, fil).is_zero(), vp_exact(&lam)?);
    } else if det2(fil, &apply(&m.phi, fil)).is_zero() {
        let lam = eigenvalue(&m.phi, fil)?;
        let scalar = m.phi.get(0, 1).is_zero() && m.phi.get(1, 0).is_zero() && *m.phi.get(0, 0) == *m.phi.get(1, 1);
        push(line_string(fil), true, vp_exact(&lam)?);
        let mu = det.div(&lam)?;
        if scalar {
            push("every other line".into(), false, vp_exact(&lam)?);
        } else if mu != lam {
            push("the other eigenline".into(), false, vp_exact(&mu)?);
        }
    } else {
        // the Fil line is not stable; eigenlines have the Newton slopes
        push("eigenline of the first slope".into(), false, slopes.0);
        push("eigenline of the second slope".into(), false, slopes.1);
    }
    Ok(AdmissibilityReport {
        admissible: t_n == t_h && lines.iter().all(|l| l.ok),
        t_h,
        t_n,
        newton_slopes: [slopes.0.into(), slopes.1.into()],
        lines,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TriangulationParameters {
    /// The field holding the roots.
    pub field: ContextRecord,
    pub quadratic_extension: bool,
    #[serde(serialize_with = "ser_display")]
    pub phi1: PadicNumber,
    #[serde(serialize_with = "ser_display")]
    pub phi2: PadicNumber,
    pub slopes: [crate::report::Rational; 2],
    pub delta1: Character,
    pub delta2: Character,
}

/// δ1 = (0, φ1) and δ2 = (−(k−1), φ2·p^{−(k−1)}), φ1 the root of
/// X² − a_p·X + p^{k−1} of smaller valuation.
pub fn triangulation_parameters(k: u32, a_p: &PadicNumber) -> Result<TriangulationParameters> {
    let m = crystalline_module(k, a_p)?;
    let det = m.phi.det();
    let (ext, phi1, phi2) = quadratic_roots(a_p, &det)?;
    let ectx = phi1.ctx().clone();
    let pk = p_number(&ectx).pow(k as i64 - 1)?;
    let delta1 = Character::new(0, phi1.clone())?;
    let delta2 = Character::new(-(k as i64 - 1), phi2.div(&pk)?)?;
    if &(&delta1.value_at_p * &delta2.value_at_p) * &pk != pk {
        return Err(Error::Precision {
            needed: ectx.precision(),
            available: 0,
        });
    }
    Ok(TriangulationParameters {
        field: ectx.record(),
        quadratic_extension: ext.is_some(),
        slopes: [vp_exact(&phi1)?.into(), vp_exact(&phi2)?.into()],
        phi1,
        phi2,
        delta1,
        delta2,
    })
}

/// δ_{1,k} = |x|·α and δ_{2,k} = x^{−k}·α with α(x) = ϖ^{v_p(x)}·|x|^{−1}:
/// values ϖ and ϖ·p^{1−k} at p.
pub fn semistable_parameters(k: u32, ctx: &Arc<PadicContext>) -> Result<(Character, Character)> {
    check_semistable_context(ctx)?;
    let w = PadicNumber::pi_pow(ctx, 1);
    let d2 = &w * &p_number(ctx).pow(1 - k as i64)?;
    Ok((Character::new(0, w)?, Character::new(-(k as i64), d2)?))
}

/// Elements of E given as integers, for convenience.
pub fn number(ctx: &Arc<PadicContext>, n: i64) -> PadicNumber {
    PadicElement::from_int(ctx, n).into()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crystalline_example() {
        let ctx = PadicContext::qp(5, 12).unwrap();
        let m = crystalline_module(2, &number(&ctx, 5)).unwrap();
        assert_eq!(matrix_strings(m.phi()), matrix_strings(&Matrix::from_rows(vec![
            vec![number(&ctx, 0), number(&ctx, -1)],
            vec![number(&ctx, 5), number(&ctx, 5)],
        ])));
        assert!(m.phi().det() == number(&ctx, 5));
        assert!(m.phi().trace() == number(&ctx, 5));
        assert!(crystalline_module(2, &number(&ctx, 1)).is_err());
        let r = weak_admissibility(&m).unwrap();
        assert!(r.admissible);
        assert_eq!(r.t_n, Ratio::from_integer(1));
    }

    #[test]
    fn identity_is_not_admissible() {
        let ctx = PadicContext::qp(3, 8).unwrap();
        let one = number(&ctx, 1);
        let z = number(&ctx, 0);
        let m = PhiModule2::new(
            3,
            Matrix::identity_like(&one, 2),
            Matrix::zeros_like(&z, 2, 2),
            [one.clone(), z],
            ModuleLabel::Custom,
        )
        .unwrap();
        let r = weak_admissibility(&m).unwrap();
        assert!(!r.admissible);
        assert_eq!(r.t_n, Ratio::from_integer(0));
    }

    #[test]
    fn semistable_presets() {
        let ctx = semistable_context(3, 16).unwrap();
        for k in 2..=8 {
            let m = semistable_module(k, &LInvariant::Finite(number(&ctx, 7)), &ctx).unwrap();
            assert!(!m.monodromy().is_zero());
            // N(e1) = e2
            assert!(*m.monodromy().get(1, 0) == number(&ctx, 1));
            let r = weak_admissibility(&m).unwrap();
            assert!(r.admissible, "k = {k}: {r:?}");
            assert_eq!(r.t_n, Ratio::from_integer(k as i64 - 1));
            let m = semistable_module(k, &LInvariant::Infinity, &ctx).unwrap();
            assert!(m.monodromy().is_zero());
            assert!(m.fil_line()[1] == number(&ctx, 1));
            assert!(weak_admissibility(&m).unwrap().admissible);
        }
        assert!(semistable_module(4, &LInvariant::Infinity, &PadicContext::qp(3, 8).unwrap()).is_err());
        assert!(semistable_context(2, 8).is_err());
    }

    #[test]
    fn printed_scalar_matrix_breaks_the_relation() {
        let ctx = semistable_context(5, 12).unwrap();
        let w = PadicNumber::pi_pow(&ctx, 2);
        let z = number(&ctx, 0);
        let phi = Matrix::from_rows(vec![vec![w.clone(), z.clone()], vec![z.clone(), w]]);
        let n = Matrix::from_rows(vec![vec![z.clone(), z.clone()], vec![number(&ctx, 1), z.clone()]]);
        assert!(PhiModule2::new(4, phi, n, [number(&ctx, 1), z], ModuleLabel::Custom).is_err());
    }

    #[test]
    fn triangulation_examples() {
        let ctx = PadicContext::qp(5, 20).unwrap();
        let t = triangulation_parameters(3, &number(&ctx, 5)).unwrap();
        assert_eq!(t.slopes[0], Ratio::from_integer(1).into());
        assert_eq!(t.slopes[1], Ratio::from_integer(1).into());
        assert!(t.quadratic_extension);
        let t = triangulation_parameters(4, &number(&ctx, 10)).unwrap();
        assert!(!t.quadratic_extension);
        let s: Vec<Ratio<i64>> = t.slopes.iter().map(|r| (*r).into()).collect();
        assert_eq!(s, vec![Ratio::from_integer(1), Ratio::from_integer(2)]);
        assert_eq!(t.delta1.weight, 0);
        assert_eq!(t.delta2.weight, -3);
    }

    #[test]
    fn semistable_parameter_values() {
        let ctx = semistable_context(3, 16).unwrap();
        let (d1, d2) = semistable_parameters(4, &ctx).unwrap();
        assert_eq!(d1.value_at_p.valuation_p().unwrap(), Ratio::new(1, 2));
        assert_eq!(d2.value_at_p.valuation_p().unwrap(), Ratio::new(1, 2) - 3);
        assert_eq!(d2.weight, -4);
    }

    #[test]
    fn regularity_flags() {
        let ctx = PadicContext::qp(5, 12).unwrap();
        let p = number(&ctx, 5);
        for i in 0..=10i64 {
            assert!(!Character::new(i, p.pow(i).unwrap()).unwrap().is_regular());
            assert!(!Character::new(1 - i, p.pow(-i).unwrap()).unwrap().is_regular());
            assert!(Character::new(i, p.pow(i + 1).unwrap()).unwrap().is_regular());
            assert!(Character::new(-i - 1, p.pow(i).unwrap()).unwrap().is_regular());
        }
    }

    #[test]
    fn character_evaluation() {
        let ctx = PadicContext::qp(5, 20).unwrap();
        let d = Character::new(2, number(&ctx, 3)).unwrap();
        // δ(5·2) = 2²·3
        assert!(d.eval(&number(&ctx, 10)).unwrap() == number(&ctx, 12));
        let x = number(&ctx, 50);
        let y = number(&ctx, 7);
        let lhs = d.eval(&(&x * &y)).unwrap();
        let rhs = &d.eval(&x).unwrap() * &d.eval(&y).unwrap();
        assert!(lhs == rhs);
    }
}
