use std::fmt;
use std::sync::Arc;

use super::model::{AlgebraModel, Relation, VarKind};
use crate::error::{Error, Result};
use crate::padic::{Extension, PadicElement, Valuation};

/// A rig-point of a model over a marked extension E of the base field.
#[derive(Clone)]
pub struct ModelPoint {
    model: Arc<AlgebraModel>,
    ext: Extension,
    coords: Vec<PadicElement>,
}

impl fmt::Debug for ModelPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .model
            .names()
            .iter()
            .zip(&self.coords)
            .map(|(n, c)| format!("{n}={c}"))
            .collect();
        write!(f, "({}) over e={}, f={}", parts.join(", "), self.ext.e_rel(), self.ext.f_rel())
    }
}

impl ModelPoint {
    /// Validates the valuation constraints and the model relation.
    pub fn new(model: &Arc<AlgebraModel>, ext: &Extension, coords: Vec<PadicElement>) -> Result<Self> {
        if **ext.base() != **model.base() {
            return Err(Error::arg("extension is not over the model's base field"));
        }
        if coords.len() != model.nvars() {
            return Err(Error::arg(format!(
                "point has {} coordinates, model has {} variables",
                coords.len(),
                model.nvars()
            )));
        }
        for (i, (x, k)) in coords.iter().zip(model.kinds()).enumerate() {
            if **x.ctx() != **ext.ext() {
                return Err(Error::arg("coordinate is not over the point's extension"));
            }
            if *k == VarKind::Open && x.valuation() == Valuation::Exact(0) {
                return Err(Error::Domain(format!(
                    "open variable {} needs positive valuation",
                    model.names()[i]
                )));
            }
        }
        let pt = ModelPoint {
            model: model.clone(),
            ext: ext.clone(),
            coords,
        };
        pt.check_relation()?;
        Ok(pt)
    }

    /// An L-point given over the trivial extension.
    pub fn rational(model: &Arc<AlgebraModel>, coords: Vec<PadicElement>) -> Result<Self> {
        Self::new(model, &Extension::trivial(model.base()), coords)
    }

    fn check_relation(&self) -> Result<()> {
        match self.model.relation() {
            Relation::None => Ok(()),
            Relation::Annulus { m } => {
                let c = self.ext.embed(&PadicElement::pi_pow(self.model.base(), *m))?;
                let d = &(&self.coords[0] * &self.coords[1]) - &c;
                if d.is_zero() {
                    Ok(())
                } else {
                    Err(Error::Relation(format!(
                        "ζ1·ζ2 − π^{m} has valuation {:?}",
                        d.valuation()
                    )))
                }
            }
            Relation::Cover { d, g } => {
                let y = self.coords.last().unwrap();
                let mut rhs = PadicElement::zero(self.ext.ext());
                for (mono, c) in g {
                    let mut t = self.ext.embed(c)?;
                    for (i, &e) in mono.iter().enumerate() {
                        if e > 0 {
                            t = &t * &self.coords[i].pow(e as u64);
                        }
                    }
                    rhs = &rhs + &t;
                }
                let diff = &y.pow(*d as u64) - &rhs;
                if diff.is_zero() {
                    Ok(())
                } else {
                    Err(Error::Relation(format!("Y^{d} − g has valuation {:?}", diff.valuation())))
                }
            }
        }
    }

    pub fn model(&self) -> &Arc<AlgebraModel> {
        &self.model
    }
    pub fn extension(&self) -> &Extension {
        &self.ext
    }
    pub fn coords(&self) -> &[PadicElement] {
        &self.coords
    }

    /// The same point over a larger extension E → F.
    pub fn base_change(&self, upper: &Extension) -> Result<Self> {
        let ext = self.ext.compose(upper)?;
        let coords = self
            .coords
            .iter()
            .map(|c| upper.embed(c))
            .collect::<Result<Vec<_>>>()?;
        ModelPoint::new(&self.model, &ext, coords)
    }

    /// Whether all coordinates lie in the base field (E = L).
    pub fn is_rational(&self) -> bool {
        self.ext.e_rel() == 1 && self.ext.f_rel() == 1
    }
}
