use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::model::{AlgebraModel, Mono, Relation, VarKind};
use super::point::ModelPoint;
use crate::error::{Error, Result};
use crate::linalg::Ring;
use crate::padic::{Extension, PadicElement, Valuation};

/// An element of a truncated algebra model, known modulo π^prec and modulo
/// terms of total open degree above the model's cap.
#[derive(Clone)]
pub struct AdicSeries {
    model: Arc<AlgebraModel>,
    terms: BTreeMap<Mono, PadicElement>,
    prec: u32,
}

impl PartialEq for AdicSeries {
    fn eq(&self, other: &Self) -> bool {
        if *self.model != *other.model {
            return false;
        }
        let d = self.minus(other);
        d.terms.is_empty()
    }
}

impl fmt::Debug for AdicSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (+O(π^{}))", self, self.prec)
    }
}

impl fmt::Display for AdicSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = self.model.names();
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut s = format!("({c})");
                for (i, &e) in m.iter().enumerate() {
                    match e {
                        0 => {}
                        1 => s.push_str(&format!("*{}", names[i])),
                        _ => s.push_str(&format!("*{}^{}", names[i], e)),
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl AdicSeries {
    pub fn zero(model: &Arc<AlgebraModel>) -> Self {
        AdicSeries {
            model: model.clone(),
            terms: BTreeMap::new(),
            prec: model.base().precision(),
        }
    }

    pub fn constant(model: &Arc<AlgebraModel>, c: &PadicElement) -> Self {
        let mut t = BTreeMap::new();
        t.insert(vec![0; model.nvars()], c.clone());
        Self::from_terms(model, t, c.precision())
    }

    pub fn from_int(model: &Arc<AlgebraModel>, n: i64) -> Self {
        Self::constant(model, &PadicElement::from_int(model.base(), n))
    }

    pub fn var(model: &Arc<AlgebraModel>, name: &str) -> Result<Self> {
        let i = model
            .var_index(name)
            .ok_or_else(|| Error::arg(format!("unknown variable {name:?}")))?;
        let mut m = vec![0; model.nvars()];
        m[i] = 1;
        Ok(Self::monomial(model, m, &PadicElement::one(model.base())))
    }

    pub fn monomial(model: &Arc<AlgebraModel>, m: Mono, c: &PadicElement) -> Self {
        let mut t = BTreeMap::new();
        t.insert(m, c.clone());
        Self::from_terms(model, t, model.base().precision())
    }

    /// Builds a series from raw terms and puts it in normal form.
    pub fn from_terms(model: &Arc<AlgebraModel>, terms: BTreeMap<Mono, PadicElement>, prec: u32) -> Self {
        let mut s = AdicSeries {
            model: model.clone(),
            terms: BTreeMap::new(),
            prec: prec.min(model.base().precision()),
        };
        for (m, c) in terms {
            s.accumulate(m, c);
        }
        s.finish()
    }

    fn accumulate(&mut self, m: Mono, c: PadicElement) {
        let model = self.model.clone();
        let mut work = vec![(m, c)];
        while let Some((m, c)) = work.pop() {
            if c.is_zero() || model.open_degree(&m) > model.degree_cap() && has_open(&model) {
                continue;
            }
            match model.relation() {
                Relation::Annulus { m: e } if m[0] > 0 && m[1] > 0 => {
                    let k = m[0].min(m[1]);
                    let mut m2 = m.clone();
                    m2[0] -= k;
                    m2[1] -= k;
                    work.push((m2, c.mul_pi_pow(e * k)));
                }
                Relation::Cover { d, g } if *m.last().unwrap() >= *d => {
                    let y = m.len() - 1;
                    for (gm, gc) in g {
                        let mut m2: Mono = m.iter().zip(gm).map(|(a, b)| a + b).collect();
                        m2[y] -= d;
                        work.push((m2, &c * gc));
                    }
                }
                _ => {
                    let entry = self.terms.entry(m);
                    match entry {
                        std::collections::btree_map::Entry::Occupied(mut o) => {
                            let v = o.get() + &c;
                            *o.get_mut() = v;
                        }
                        std::collections::btree_map::Entry::Vacant(v) => {
                            v.insert(c);
                        }
                    }
                }
            }
        }
    }

    fn finish(mut self) -> Self {
        // series precision: the least coefficient precision
        for c in self.terms.values() {
            self.prec = self.prec.min(c.precision());
        }
        let p = self.prec;
        self.terms = std::mem::take(&mut self.terms)
            .into_iter()
            .map(|(m, c)| (m, c.truncate(p)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        self
    }

    pub fn model(&self) -> &Arc<AlgebraModel> {
        &self.model
    }
    pub fn terms(&self) -> &BTreeMap<Mono, PadicElement> {
        &self.terms
    }
    /// Absolute π_L-adic precision of every coefficient.
    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn truncate(&self, prec: u32) -> Self {
        let terms = self.terms.clone();
        Self::from_terms(&self.model, terms, prec.min(self.prec))
    }

    pub fn constant_term(&self) -> PadicElement {
        self.terms
            .get(&vec![0; self.model.nvars()])
            .cloned()
            .unwrap_or_else(|| PadicElement::zero(self.model.base()))
            .truncate(self.prec)
    }

    pub fn coefficient(&self, m: &Mono) -> PadicElement {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| PadicElement::zero(self.model.base()))
            .truncate(self.prec)
    }

    /// Minimal π-adic valuation of a coefficient (the precision for zero).
    pub fn min_valuation(&self) -> u32 {
        self.terms
            .values()
            .map(|c| c.valuation().bound())
            .min()
            .unwrap_or(self.prec)
    }

    pub fn is_zero_series(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_model(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.model, &other.model) || *self.model == *other.model,
            "series on different models"
        );
    }

    pub fn scale(&self, c: &PadicElement) -> Self {
        let terms = self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect();
        let vc = c.valuation().bound();
        let prec = (self.prec + vc).min(c.precision() + self.min_valuation());
        Self::from_terms(&self.model, terms, prec)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = self.one_like();
        for _ in 0..k {
            r = r.times(self);
        }
        r
    }

    /// Multiplicative inverse, when the series is c·(1 − h) with c a unit and
    /// h in the ideal (π, open variables).
    pub fn inverse(&self) -> Result<Self> {
        let c = self.constant_term();
        if !c.is_unit() {
            return Err(Error::NotUnit);
        }
        let cinv = c.inverse()?;
        let one = self.one_like();
        let h = one.minus(&self.scale(&cinv));
        for (m, x) in h.terms() {
            if self.model.open_degree(m) == 0 && x.valuation().bound() == 0 {
                return Err(Error::NotUnit);
            }
        }
        let mut acc = one.clone();
        let mut pw = one;
        for _ in 0..self.prec + self.model.degree_cap() + 2 {
            pw = pw.times(&h);
            if pw.is_zero_series() {
                break;
            }
            acc = acc.plus(&pw);
        }
        Ok(acc.scale(&cinv))
    }

    /// Degree of the highest monomial in each variable.
    pub fn degrees(&self) -> Vec<u32> {
        let mut d = vec![0; self.model.nvars()];
        for m in self.terms.keys() {
            for (a, b) in d.iter_mut().zip(m) {
                *a = (*a).max(*b);
            }
        }
        d
    }

    /// Composition f(s_1, …, s_r) where s_i are series on another model.
    /// `loss` caps the precision of the result (tail contributions of the
    /// truncated open part of f).
    pub fn compose(&self, subs: &[AdicSeries], loss: Option<u32>) -> Result<AdicSeries> {
        if subs.len() != self.model.nvars() {
            return Err(Error::arg("substitution has the wrong number of series"));
        }
        let target = subs[0].model.clone();
        let degs = self.degrees();
        let mut powers: Vec<Vec<AdicSeries>> = Vec::with_capacity(subs.len());
        for (s, &d) in subs.iter().zip(&degs) {
            let mut v = vec![AdicSeries::from_int(&target, 1)];
            for k in 1..=d as usize {
                let next = v[k - 1].times(s);
                v.push(next);
            }
            powers.push(v);
        }
        let mut acc = AdicSeries::zero(&target);
        acc.prec = self.prec;
        for (m, c) in &self.terms {
            let mut t = AdicSeries::constant(&target, c);
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = t.times(&powers[i][e as usize]);
                }
            }
            acc = acc.plus(&t);
        }
        if let Some(l) = loss {
            acc = acc.truncate(l);
        }
        Ok(acc)
    }

    /// Precomputes the coefficients over an extension for repeated
    /// evaluation.
    pub fn evaluator(&self, ext: &Extension) -> Result<Evaluator> {
        if **ext.base() != **self.model.base() {
            return Err(Error::arg("extension is not over the series' base field"));
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| Ok((m.clone(), ext.embed(c)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Evaluator {
            model: self.model.clone(),
            terms,
            prec: self.prec.saturating_mul(ext.e_rel() as u32),
            ext_ctx: ext.ext().clone(),
        })
    }

    /// f(point) with its guaranteed π_E-adic precision.
    pub fn evaluate(&self, point: &ModelPoint) -> Result<PadicElement> {
        self.evaluator(point.extension())?.eval(point)
    }

    /// Every non-constant coefficient has valuation ≥ n.
    pub fn is_constant_mod(&self, n: u32) -> Result<ConstancyVerdict> {
        if n > self.prec {
            return Err(Error::Precision {
                needed: n,
                available: self.prec,
            });
        }
        let zero = vec![0; self.model.nvars()];
        let mut witness = None;
        for (m, c) in &self.terms {
            if *m == zero {
                continue;
            }
            if let Valuation::Exact(v) = c.valuation() {
                if v < n {
                    witness = Some(Witness {
                        monomial: self.monomial_name(m),
                        valuation: v,
                    });
                    break;
                }
            }
        }
        Ok(ConstancyVerdict {
            constant: witness.is_none(),
            n,
            precision: self.prec,
            degree_cap: self.model.degree_cap(),
            value: self.constant_term().truncate(n).to_string(),
            witness,
        })
    }

    pub fn monomial_name(&self, m: &Mono) -> String {
        let names = self.model.names();
        let parts: Vec<String> = m
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { names[i].clone() } else { format!("{}^{}", names[i], e) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

fn has_open(model: &AlgebraModel) -> bool {
    model.kinds().contains(&VarKind::Open)
}

impl Ring for AdicSeries {
    fn zero_like(&self) -> Self {
        AdicSeries::zero(&self.model)
    }
    fn one_like(&self) -> Self {
        AdicSeries::from_int(&self.model, 1)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn plus(&self, other: &Self) -> Self {
        self.check_model(other);
        let mut s = AdicSeries {
            model: self.model.clone(),
            terms: self.terms.clone(),
            prec: self.prec.min(other.prec),
        };
        for (m, c) in &other.terms {
            s.accumulate(m.clone(), c.clone());
        }
        s.finish()
    }
    fn minus(&self, other: &Self) -> Self {
        self.plus(&other.negate())
    }
    fn times(&self, other: &Self) -> Self {
        self.check_model(other);
        let prec = (self.prec + other.min_valuation()).min(other.prec + self.min_valuation());
        let mut s = AdicSeries {
            model: self.model.clone(),
            terms: BTreeMap::new(),
            prec: prec.min(self.model.base().precision()),
        };
        let cap = self.model.degree_cap();
        let open = has_open(&self.model);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Mono = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                if open && self.model.open_degree(&m) > cap {
                    continue;
                }
                s.accumulate(m, (ca * cb).lift().truncate(prec));
            }
        }
        s.finish()
    }
    fn negate(&self) -> Self {
        AdicSeries {
            model: self.model.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
            prec: self.prec,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub monomial: String,
    pub valuation: u32,
}

/// Result of the constancy test; always qualified by the precision and
/// degree cap at which it was decided.
#[derive(Debug, Clone, Serialize)]
pub struct ConstancyVerdict {
    pub constant: bool,
    pub n: u32,
    pub precision: u32,
    pub degree_cap: u32,
    /// Constant term modulo π^n.
    pub value: String,
    pub witness: Option<Witness>,
}

/// A series with coefficients mapped into an extension E.
#[derive(Debug, Clone)]
pub struct Evaluator {
    model: Arc<AlgebraModel>,
    terms: Vec<(Mono, PadicElement)>,
    prec: u32,
    ext_ctx: Arc<crate::padic::PadicContext>,
}

impl Evaluator {
    /// Evaluates at a validated point. The result carries the precision
    /// min(coefficient precision, (D+1)·min v(open coordinate)).
    pub fn eval(&self, point: &ModelPoint) -> Result<PadicElement> {
        if **point.model() != *self.model {
            return Err(Error::arg("point lives on a different model"));
        }
        let ctx = &self.ext_ctx;
        if **point.extension().ext() != **ctx {
            return Err(Error::arg("point is over a different extension"));
        }
        let coords = point.coords();
        let mut tail = u32::MAX;
        let d1 = self.model.degree_cap() + 1;
        for (x, k) in coords.iter().zip(self.model.kinds()) {
            if *k == VarKind::Open {
                tail = tail.min(x.valuation().bound().saturating_mul(d1));
            }
        }
        let degs: Vec<u32> = (0..self.model.nvars())
            .map(|i| self.terms.iter().map(|(m, _)| m[i]).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<PadicElement>> = coords
            .iter()
            .zip(&degs)
            .map(|(x, &d)| {
                let mut v = vec![PadicElement::one(ctx)];
                for k in 1..=d as usize {
                    let next = &v[k - 1] * x;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = PadicElement::zero(ctx).truncate(self.prec);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = &t * &powers[i][e as usize];
                }
            }
            acc = &acc + &t;
        }
        let guaranteed = acc.precision().min(tail).min(self.prec);
        if guaranteed == 0 {
            return Err(Error::Precision { needed: 1, available: 0 });
        }
        Ok(acc.truncate(guaranteed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicContext;

    #[test]
    fn evaluation_examples() {
        let ctx = PadicContext::qp(5, 10).unwrap();
        let model = AlgebraModel::disc(&ctx, &[], &["T"], 6).unwrap();
        let t = AdicSeries::var(&model, "T").unwrap();
        let f = AdicSeries::from_int(&model, 2).plus(&t.scale(&PadicElement::from_int(&ctx, 3)));
        let ext = Extension::trivial(&ctx);
        let pt = ModelPoint::new(&model, &ext, vec![PadicElement::from_int(&ctx, 5)]).unwrap();
        let v = f.evaluate(&pt).unwrap();
        assert_eq!(v, PadicElement::from_int(&ctx, 17));
        // the unknown tail beyond degree D bounds the precision
        assert_eq!(v.precision(), 7);

        // Σ_{i ≤ D} T^i at T = p agrees with 1/(1-p) to D+1 digits
        let mut g = AdicSeries::zero(&model);
        for i in 0..=6 {
            g = g.plus(&t.pow(i));
        }
        let v = g.evaluate(&pt).unwrap();
        assert_eq!(v.precision(), 7);
        let exact = PadicElement::from_int(&ctx, 1).div(&PadicElement::from_int(&ctx, -4)).unwrap();
        assert_eq!(v, exact.truncate(7));
    }

    #[test]
    fn annulus_normal_form() {
        let ctx = PadicContext::qp(3, 8).unwrap();
        let model = AlgebraModel::annulus(&ctx, "z1", "z2", 2).unwrap();
        let z1 = AdicSeries::var(&model, "z1").unwrap();
        let z2 = AdicSeries::var(&model, "z2").unwrap();
        let f = z1.times(&z2);
        assert_eq!(f, AdicSeries::from_int(&model, 9));
        let g = z1.pow(3).times(&z2.pow(2));
        assert_eq!(g, z1.scale(&PadicElement::from_int(&ctx, 81)));
    }

    #[test]
    fn constancy_examples() {
        let ctx = PadicContext::qp(5, 10).unwrap();
        let model = AlgebraModel::disc(&ctx, &[], &["T"], 5).unwrap();
        let t = AdicSeries::var(&model, "T").unwrap();
        let f = AdicSeries::from_int(&model, 3).plus(&t.scale(&PadicElement::from_int(&ctx, 25)));
        assert!(f.is_constant_mod(2).unwrap().constant);
        let v = t.is_constant_mod(1).unwrap();
        assert!(!v.constant);
        assert_eq!(v.witness.unwrap().monomial, "T");
        assert!(t.truncate(3).is_constant_mod(4).is_err());
    }
}
