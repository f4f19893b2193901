//! Two-dimensional pseudorepresentations, determined by T with
//! D(g) = (T(g)² − T(g²))/2.

mod audit;
mod kernel;
mod mf;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{trace_of_word, RepFamily};
use crate::group::{word_inverse, word_reduce, GroupPresentation, Letter, Word};
use crate::lattice::IntegralRep;
use crate::linalg::Ring;
use crate::padic::PadicElement;
use crate::series::AdicSeries;

pub use audit::{pseudorep_constancy_audit, pseudorep_strict_check, PseudoAuditReport, PseudoStrictReport, WordAudit};
pub use kernel::{kernel, KernelReport};
pub use mf::{residually_multiplicity_free, MfFactor, MfReport, MfVerdict};

/// Values of a pseudorepresentation: rings in which 2 is invertible.
pub trait Coefficient: Ring + PartialEq + fmt::Display + Send + Sync {
    fn half(&self) -> Result<Self>;
    fn int_like(&self, n: i64) -> Self;
}

fn two_inverse(ctx: &Arc<crate::padic::PadicContext>) -> Result<PadicElement> {
    if ctx.p() == 2 {
        return Err(Error::Unsupported("pseudorepresentations need p ≠ 2".into()));
    }
    PadicElement::from_int(ctx, 2).inverse()
}

impl Coefficient for PadicElement {
    fn half(&self) -> Result<Self> {
        Ok(self * &two_inverse(self.ctx())?)
    }
    fn int_like(&self, n: i64) -> Self {
        PadicElement::from_int(self.ctx(), n)
    }
}

impl Coefficient for AdicSeries {
    fn half(&self) -> Result<Self> {
        Ok(self.scale(&two_inverse(self.model().base())?))
    }
    fn int_like(&self, n: i64) -> Self {
        AdicSeries::from_int(self.model(), n)
    }
}

#[derive(Debug, Clone)]
enum Values<T> {
    /// Indexed by element (finite groups).
    Elements(Vec<T>),
    /// Freely reduced words up to the cap (free groups).
    Words { cap: usize, map: BTreeMap<Word, T> },
}

#[derive(Debug, Clone)]
pub struct PseudoRep2<T> {
    group: Arc<GroupPresentation>,
    values: Values<T>,
}

impl<T: Coefficient> PseudoRep2<T> {
    fn build(group: Arc<GroupPresentation>, cap: usize, f: impl Fn(&[Letter]) -> T) -> Result<Self> {
        let values = if group.is_finite() {
            Values::Elements(group.element_words()?.iter().map(|w| f(w)).collect())
        } else {
            Values::Words {
                cap,
                map: group.words_up_to(cap).into_iter().map(|w| {
                    let v = f(&w);
                    (w, v)
                }).collect(),
            }
        };
        let pr = PseudoRep2 { group, values };
        pr.sample_value().half()?;
        Ok(pr)
    }

    /// Values on a group given as (word, value) pairs. Finite groups need a
    /// value for every element; free groups use the listed words.
    pub fn from_table(group: Arc<GroupPresentation>, entries: Vec<(Word, T)>) -> Result<Self> {
        let Some(first) = entries.first() else {
            return Err(Error::arg("empty value table"));
        };
        first.1.half()?;
        let values = if let Some(order) = group.order() {
            let mut vals: Vec<Option<T>> = vec![None; order];
            for (w, v) in entries {
                let e = group.element_of(&w)?;
                match &vals[e] {
                    Some(old) if *old != v => {
                        return Err(Error::arg(format!(
                            "conflicting values for {}",
                            group.word_to_string(&w)
                        )))
                    }
                    _ => vals[e] = Some(v),
                }
            }
            let vals = vals
                .into_iter()
                .enumerate()
                .map(|(i, v)| v.ok_or_else(|| Error::arg(format!("no value for element {i}"))))
                .collect::<Result<Vec<_>>>()?;
            Values::Elements(vals)
        } else {
            let cap = entries.iter().map(|(w, _)| word_reduce(w).len()).max().unwrap_or(0);
            Values::Words {
                cap,
                map: entries.into_iter().map(|(w, v)| (word_reduce(&w), v)).collect(),
            }
        };
        Ok(PseudoRep2 { group, values })
    }

    pub fn sample_value(&self) -> &T {
        match &self.values {
            Values::Elements(v) => &v[0],
            Values::Words { map, .. } => map.values().next().expect("the empty word is present"),
        }
    }

    pub fn group(&self) -> &Arc<GroupPresentation> {
        &self.group
    }

    /// Word cap of the support; None for finite groups.
    pub fn word_cap(&self) -> Option<usize> {
        match &self.values {
            Values::Elements(_) => None,
            Values::Words { cap, .. } => Some(*cap),
        }
    }

    /// Words on which T is known: every element (by its shortest word) or
    /// the reduced words up to the cap.
    pub fn support(&self) -> Vec<Word> {
        match &self.values {
            Values::Elements(_) => self.group.element_words().expect("finite").to_vec(),
            Values::Words { map, .. } => map.keys().cloned().collect(),
        }
    }

    pub fn value(&self, w: &[Letter]) -> Option<&T> {
        match &self.values {
            Values::Elements(v) => self.group.element_of(w).ok().map(|e| &v[e]),
            Values::Words { map, .. } => map.get(&word_reduce(w)),
        }
    }

    /// D(g) = (T(g)² − T(g²))/2.
    pub fn det(&self, w: &[Letter]) -> Option<Result<T>> {
        let t = self.value(w)?;
        let sq: Word = w.iter().chain(w).copied().collect();
        let t2 = self.value(&sq)?;
        Some(t.times(t).minus(t2).half())
    }

    pub fn map<U: Coefficient>(&self, f: impl Fn(&T) -> U) -> PseudoRep2<U> {
        let values = match &self.values {
            Values::Elements(v) => Values::Elements(v.iter().map(&f).collect()),
            Values::Words { cap, map } => Values::Words {
                cap: *cap,
                map: map.iter().map(|(w, v)| (w.clone(), f(v))).collect(),
            },
        };
        PseudoRep2 {
            group: self.group.clone(),
            values,
        }
    }
}

fn check_dim_two(d: usize) -> Result<()> {
    if d != 2 {
        return Err(Error::Unsupported(format!("pseudorepresentations of dimension {d}; only 2 is implemented")));
    }
    Ok(())
}

/// T(w) = tr ρ(w).
pub fn from_rep_trace(rep: &IntegralRep, word_cap: usize) -> Result<PseudoRep2<PadicElement>> {
    check_dim_two(rep.dim())?;
    PseudoRep2::build(rep.group().clone(), word_cap, |w| rep.trace(w))
}

/// T(w) = tr ρ(w) as a series on the family's model.
pub fn from_family_trace(fam: &RepFamily, word_cap: usize) -> Result<PseudoRep2<AdicSeries>> {
    check_dim_two(fam.dim())?;
    PseudoRep2::build(fam.group().clone(), word_cap, |w| trace_of_word(fam, w))
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomViolation {
    pub axiom: String,
    pub g: String,
    pub h: Option<String>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub pass: bool,
    pub pairs_checked: usize,
    pub pairs_skipped: usize,
    pub word_cap: Option<usize>,
    pub violations: Vec<AxiomViolation>,
}

/// Checks T(1) = 2, T(gh) = T(hg) and T(g)T(h) = T(gh) + D(g)T(g^{-1}h)
/// on all generator pairs and on `pair_budget` random pairs.
pub fn axiom_check<T: Coefficient>(t: &PseudoRep2<T>, pair_budget: usize, seed: u64) -> Result<AxiomReport> {
    let g = t.group();
    let mut report = AxiomReport {
        pass: true,
        pairs_checked: 0,
        pairs_skipped: 0,
        word_cap: t.word_cap(),
        violations: Vec::new(),
    };
    let one = t.value(&[]).ok_or_else(|| Error::arg("no value at the identity"))?;
    if *one != one.int_like(2) {
        report.violations.push(AxiomViolation {
            axiom: "T(1) = 2".into(),
            g: "1".into(),
            h: None,
            detail: format!("T(1) = {one}"),
        });
    }
    // pairs (g, h) whose products stay in the support
    let pool: Vec<Word> = match t.word_cap() {
        None => t.support(),
        Some(cap) => t.support().into_iter().filter(|w| 2 * w.len() <= cap).collect(),
    };
    let letters: Vec<Word> = (0..g.generators().len())
        .flat_map(|i| [vec![Letter { gen: i, inv: false }], vec![Letter { gen: i, inv: true }]])
        .filter(|w| pool.contains(&word_reduce(w)) || g.is_finite())
        .collect();
    let mut pairs: Vec<(Word, Word)> = Vec::new();
    for a in &letters {
        for b in &letters {
            pairs.push((a.clone(), b.clone()));
        }
    }
    if !pool.is_empty() {
        if g.is_finite() && pool.len() * pool.len() <= pair_budget {
            for a in &pool {
                for b in &pool {
                    pairs.push((a.clone(), b.clone()));
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..pair_budget {
                let a = pool[rng.gen_range(0..pool.len())].clone();
                let b = pool[rng.gen_range(0..pool.len())].clone();
                pairs.push((a, b));
            }
        }
    }
    for (a, b) in pairs {
        let ab: Word = a.iter().chain(&b).copied().collect();
        let ba: Word = b.iter().chain(&a).copied().collect();
        let ainv_b: Word = word_inverse(&a).into_iter().chain(b.iter().copied()).collect();
        let (Some(ta), Some(tb), Some(tab), Some(tba), Some(tib), Some(da)) =
            (t.value(&a), t.value(&b), t.value(&ab), t.value(&ba), t.value(&ainv_b), t.det(&a))
        else {
            report.pairs_skipped += 1;
            continue;
        };
        let da = da?;
        report.pairs_checked += 1;
        let names = (g.word_to_string(&a), Some(g.word_to_string(&b)));
        if tab != tba {
            report.violations.push(AxiomViolation {
                axiom: "T(gh) = T(hg)".into(),
                g: names.0.clone(),
                h: names.1.clone(),
                detail: format!("{tab} vs {tba}"),
            });
        }
        let lhs = ta.times(tb);
        let rhs = tab.plus(&da.times(tib));
        if lhs != rhs {
            report.violations.push(AxiomViolation {
                axiom: "T(g)T(h) = T(gh) + D(g)T(g^-1 h)".into(),
                g: names.0,
                h: names.1,
                detail: format!("{lhs} vs {rhs}"),
            });
        }
        if report.violations.len() >= 20 {
            break;
        }
    }
    report.pass = report.violations.is_empty();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicContext;

    fn diag(ctx: &Arc<crate::padic::PadicContext>, a: i64, b: i64) -> IntegralRep {
        let g = Arc::new(GroupPresentation::free(&["Frob"]).unwrap());
        IntegralRep::from_ints(g, ctx, &[vec![vec![a, 0], vec![0, b]]]).unwrap()
    }

    #[test]
    fn diagonal_power_sums() {
        let ctx = PadicContext::qp(5, 10).unwrap();
        let t = from_rep_trace(&diag(&ctx, 6, -4), 6).unwrap();
        let g = t.group().clone();
        for k in 1..=6i32 {
            let w = g.parse_word(&format!("Frob^{k}")).unwrap();
            let want = PadicElement::from_int(&ctx, 6i64.pow(k as u32) + (-4i64).pow(k as u32));
            assert_eq!(*t.value(&w).unwrap(), want);
        }
        let r = axiom_check(&t, 100, 1).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.pairs_checked > 0);
        // D(Frob) = 6·(−4)
        let d = t.det(&g.parse_word("Frob").unwrap()).unwrap().unwrap();
        assert_eq!(d, PadicElement::from_int(&ctx, -24));
    }

    #[test]
    fn constant_three_fails() {
        let ctx = PadicContext::qp(5, 6).unwrap();
        let g = Arc::new(GroupPresentation::free(&["g"]).unwrap());
        let entries = g
            .words_up_to(2)
            .into_iter()
            .map(|w| (w, PadicElement::from_int(&ctx, 3)))
            .collect();
        let t = PseudoRep2::from_table(g, entries).unwrap();
        let r = axiom_check(&t, 50, 0).unwrap();
        assert!(!r.pass);
        assert_eq!(r.violations[0].axiom, "T(1) = 2");
    }

    #[test]
    fn p_two_refused() {
        let ctx = PadicContext::qp(2, 6).unwrap();
        assert!(matches!(from_rep_trace(&diag(&ctx, 1, 1), 2), Err(Error::Unsupported(_))));
        let ctx = PadicContext::qp(3, 6).unwrap();
        let g = Arc::new(GroupPresentation::free(&["g"]).unwrap());
        let one = IntegralRep::from_ints(g, &ctx, &[vec![vec![1]]]).unwrap();
        assert!(matches!(from_rep_trace(&one, 2), Err(Error::Unsupported(_))));
    }
}
