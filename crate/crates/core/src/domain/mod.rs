//! Residue neighborhoods U^(n)_x (wide open) and V^(n)_x (affinoid) of an
//! L-point on a preset model.
//!
//! With I_x = (g_1, …, g_r), a point y over E lies in U^(n)_x when
//! v_p(g_i(y)) > (n−1)/e for all i, and in V^(n)_x when v_p(g_i(y)) ≥ n/e.
//! In π_E-units these read v_E(g_i(y)) > (n−1)·e(E/L) and ≥ n·e(E/L).

mod audit;
mod cover;
mod sample;

use std::sync::Arc;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Ring;
use crate::padic::{PadicElement, Valuation};
use crate::report::ser_ratio;
use crate::series::{AdicSeries, AlgebraModel, ModelPoint, NeighborhoodKind, Relation};

pub use audit::{pointwise_constancy_audit, AuditOptions, AuditWitness, ExtensionAudit, FunctionAuditReport};
pub use cover::{
    cover_compare, cover_lift, hida_weight_check, hida_weight_coordinate, CoverCompareOptions, CoverReport, HidaReport,
    HidaRow, LevelCheck,
};
pub use sample::{sample, SampleOutcome};

/// One condition v_p(var − center) > radius (strict) or ≥ radius.
#[derive(Debug, Clone, Serialize)]
pub struct DiscCondition {
    pub variable: String,
    pub center: String,
    /// Valuation threshold in v_p-units.
    #[serde(serialize_with = "ser_ratio")]
    pub radius: Ratio<i64>,
    pub strict: bool,
    /// The same threshold in π_L-units.
    pub threshold: u32,
    #[serde(skip)]
    index: usize,
}

/// A simplified description as a (poly)disc.
#[derive(Debug, Clone, Serialize)]
pub struct ClosedForm {
    pub shape: &'static str,
    pub conditions: Vec<DiscCondition>,
}

#[derive(Clone, Serialize)]
pub struct ResidueDomain {
    #[serde(skip)]
    model: Arc<AlgebraModel>,
    #[serde(skip)]
    center: ModelPoint,
    n: u32,
    kind: NeighborhoodKind,
    #[serde(skip)]
    generators: Vec<AdicSeries>,
    closed_form: Option<ClosedForm>,
}

impl std::fmt::Debug for ResidueDomain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}^({}) at {:?}", self.kind, self.n, self.center)
    }
}

/// Finite generators of I_x: every variable minus its coordinate.
pub fn ideal_generators(model: &Arc<AlgebraModel>, x: &ModelPoint) -> Result<Vec<AdicSeries>> {
    if **x.model() != **model {
        return Err(Error::arg("point lives on a different model"));
    }
    if !x.is_rational() {
        return Err(Error::arg("I_x is only formed for L-points"));
    }
    model
        .names()
        .iter()
        .zip(x.coords())
        .map(|(name, c)| Ok(AdicSeries::var(model, name)?.minus(&AdicSeries::constant(model, c))))
        .collect()
}

/// The neighborhood of kind `kind` and level n around the L-point x.
pub fn describe(model: &Arc<AlgebraModel>, x: &ModelPoint, n: u32, kind: NeighborhoodKind) -> Result<ResidueDomain> {
    if n == 0 {
        return Err(Error::arg("level n must be at least 1"));
    }
    let generators = ideal_generators(model, x)?;
    let closed_form = closed_form(model, x, n, kind);
    Ok(ResidueDomain {
        model: model.clone(),
        center: x.clone(),
        n,
        kind,
        generators,
        closed_form,
    })
}

fn closed_form(model: &AlgebraModel, x: &ModelPoint, n: u32, kind: NeighborhoodKind) -> Option<ClosedForm> {
    let e = model.base().e() as i64;
    let cond = |i: usize, threshold: u32, strict: bool| DiscCondition {
        variable: model.names()[i].clone(),
        center: x.coords()[i].to_string(),
        radius: Ratio::new(threshold as i64, e),
        strict,
        threshold,
        index: i,
    };
    match model.relation() {
        Relation::None => {
            let (t, strict) = match kind {
                NeighborhoodKind::WideOpen => (n - 1, true),
                NeighborhoodKind::Affinoid => (n, false),
            };
            Some(ClosedForm {
                shape: if strict { "wide_open_polydisc" } else { "affinoid_polydisc" },
                conditions: (0..model.nvars()).map(|i| cond(i, t, strict)).collect(),
            })
        }
        Relation::Annulus { m } => {
            // valid once the level exceeds the annulus width
            let vx = x.coords()[0].valuation().bound();
            match kind {
                NeighborhoodKind::WideOpen if n - 1 > *m => {
                    let t = (n - 1).max(n - 1 + 2 * vx - m);
                    Some(ClosedForm {
                        shape: "wide_open_disc",
                        conditions: vec![cond(0, t, true)],
                    })
                }
                NeighborhoodKind::Affinoid if n > *m => {
                    let t = n.max(n + 2 * vx - m);
                    Some(ClosedForm {
                        shape: "affinoid_disc",
                        conditions: vec![cond(0, t, false)],
                    })
                }
                _ => None,
            }
        }
        Relation::Cover { .. } => None,
    }
}

/// v_E(a) compared against a threshold; errors when the digits run out.
fn exceeds(v: Valuation, threshold: u32, strict: bool) -> Result<bool> {
    let need = if strict { threshold + 1 } else { threshold };
    match v {
        Valuation::Exact(v) => Ok(v >= need),
        Valuation::AtLeast(b) if b >= need => Ok(true),
        Valuation::AtLeast(b) => Err(Error::Undecidable(format!(
            "valuation known only to be ≥ {b}, threshold {need}"
        ))),
    }
}

impl ResidueDomain {
    pub fn model(&self) -> &Arc<AlgebraModel> {
        &self.model
    }
    pub fn center(&self) -> &ModelPoint {
        &self.center
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn kind(&self) -> NeighborhoodKind {
        self.kind
    }
    pub fn generators(&self) -> &[AdicSeries] {
        &self.generators
    }
    pub fn closed_form(&self) -> Option<&ClosedForm> {
        self.closed_form.as_ref()
    }

    /// Threshold in π_E-units for a point over an extension with the given
    /// relative ramification, and whether the inequality is strict.
    pub fn threshold(&self, e_rel: u32) -> (u32, bool) {
        match self.kind {
            NeighborhoodKind::WideOpen => ((self.n - 1) * e_rel, true),
            NeighborhoodKind::Affinoid => (self.n * e_rel, false),
        }
    }

    /// g_i(y) for every generator, as elements of E.
    pub fn generator_values(&self, y: &ModelPoint) -> Result<Vec<PadicElement>> {
        if **y.model() != *self.model {
            return Err(Error::arg("point lives on a different model"));
        }
        let ext = y.extension();
        // generators are var − x_i, so g_i(y) = y_i − x_i exactly
        y.coords()
            .iter()
            .zip(self.center.coords())
            .map(|(yi, xi)| Ok(yi - &ext.embed(xi)?))
            .collect()
    }

    /// The valuation predicate on the generators; for U-kind the residue
    /// characterization (y ≡ x mod π_E^γ coordinatewise) must agree.
    pub fn member(&self, y: &ModelPoint) -> Result<bool> {
        let e_rel = y.extension().e_rel() as u32;
        let (t, strict) = self.threshold(e_rel);
        let mut inside = true;
        for g in self.generator_values(y)? {
            if !exceeds(g.valuation(), t, strict)? {
                inside = false;
                break;
            }
        }
        if self.kind == NeighborhoodKind::WideOpen {
            let gamma = crate::padic::gamma_exponent(e_rel, self.n)?;
            let ext = y.extension();
            let mut same = true;
            for (yi, xi) in y.coords().iter().zip(self.center.coords()) {
                let xe = ext.embed(xi)?;
                if yi.precision().min(xe.precision()) < gamma {
                    return Err(Error::Precision {
                        needed: gamma,
                        available: yi.precision().min(xe.precision()),
                    });
                }
                if !yi.congruent_mod(&xe, gamma)? {
                    same = false;
                    break;
                }
            }
            if same != inside {
                return Err(Error::Mismatch(format!(
                    "valuation predicate says {inside}, residue characterization says {same}"
                )));
            }
        }
        Ok(inside)
    }

    /// Membership through the closed form, when one applies.
    pub fn member_closed_form(&self, y: &ModelPoint) -> Result<Option<bool>> {
        let Some(cf) = &self.closed_form else {
            return Ok(None);
        };
        let ext = y.extension();
        let e_rel = ext.e_rel() as u32;
        for c in &cf.conditions {
            let d = &y.coords()[c.index] - &ext.embed(&self.center.coords()[c.index])?;
            if !exceeds(d.valuation(), c.threshold * e_rel, c.strict)? {
                return Ok(Some(false));
            }
        }
        Ok(Some(true))
    }

    /// JSON description: kind, level, center, generators, closed form.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": self.kind,
            "n": self.n,
            "model": self.model.preset_name(),
            "center": self.center.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "generators": self.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "closed_form": self.closed_form,
        })
    }
}
