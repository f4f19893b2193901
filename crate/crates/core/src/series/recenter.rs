//! Substitutions var ↦ x + π^k·U realizing the algebras A_x^(n) (U open,
//! k = n−1) and B_x^(n) (U bounded, k = n).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::model::{AlgebraModel, Relation, VarKind};
use super::point::ModelPoint;
use super::series::AdicSeries;
use crate::error::{Error, Result};
use crate::linalg::Ring;
use crate::padic::{PadicElement, Valuation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeighborhoodKind {
    /// Wide open U^(n): new variables open, scale π^{n−1}.
    WideOpen,
    /// Affinoid V^(n): new variables bounded, scale π^n.
    Affinoid,
}

impl NeighborhoodKind {
    pub fn scale(self, n: u32) -> u32 {
        match self {
            NeighborhoodKind::WideOpen => n.saturating_sub(1),
            NeighborhoodKind::Affinoid => n,
        }
    }
    fn var_kind(self) -> VarKind {
        match self {
            NeighborhoodKind::WideOpen => VarKind::Open,
            NeighborhoodKind::Affinoid => VarKind::Bounded,
        }
    }
}

/// A change of coordinates from a model to the rescaled model around an
/// L-point.
#[derive(Debug, Clone)]
pub struct Substitution {
    source: Arc<AlgebraModel>,
    target: Arc<AlgebraModel>,
    center: Vec<PadicElement>,
    scale: u32,
    /// Series in the target model for each source variable.
    images: Vec<AdicSeries>,
    /// Precision lost to the truncated open tail of source series.
    loss: Option<u32>,
    // annulus: index of the coordinate variable
    annulus_coord: Option<usize>,
}

impl Substitution {
    /// Builds the substitution around `center` (an L-point) with scale π^k.
    /// `degree_cap` bounds the new open variables; it defaults to the
    /// source model's cap (or the precision, when the source has none).
    pub fn new(
        model: &Arc<AlgebraModel>,
        center: &[PadicElement],
        scale: u32,
        kind: NeighborhoodKind,
        degree_cap: Option<u32>,
    ) -> Result<Self> {
        let base = model.base();
        if center.len() != model.nvars() {
            return Err(Error::arg("center has the wrong number of coordinates"));
        }
        for x in center {
            if **x.ctx() != **base {
                return Err(Error::arg("recentering needs an L-point"));
            }
        }
        ModelPoint::rational(model, center.to_vec())?;
        let new_kind = kind.var_kind();
        let n_prec = base.precision();
        let cap = degree_cap.unwrap_or(if model.kinds().contains(&VarKind::Open) {
            model.degree_cap()
        } else {
            n_prec
        });
        let pik = PadicElement::pi_pow(base, scale);
        match model.relation() {
            Relation::None => {
                let names: Vec<String> = if model.nvars() == 1 {
                    vec!["U".into()]
                } else {
                    (1..=model.nvars()).map(|i| format!("U{i}")).collect()
                };
                for (i, k) in model.kinds().iter().enumerate() {
                    if *k == VarKind::Open && new_kind == VarKind::Bounded && scale == 0 {
                        return Err(Error::Domain(format!(
                            "open variable {} cannot be rescaled by π^0 onto a closed disc",
                            model.names()[i]
                        )));
                    }
                }
                let target = AlgebraModel::with_vars(base, names.clone(), vec![new_kind; model.nvars()], cap)?;
                let images = names
                    .iter()
                    .zip(center)
                    .map(|(u, x)| {
                        Ok(AdicSeries::constant(&target, x)
                            .plus(&AdicSeries::var(&target, u)?.scale(&pik)))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let loss = tail_loss(model, center, scale, kind);
                Ok(Substitution {
                    source: model.clone(),
                    target,
                    center: center.to_vec(),
                    scale,
                    images,
                    loss,
                    annulus_coord: None,
                })
            }
            Relation::Annulus { m } => {
                let v: Vec<u32> = center.iter().map(|x| x.valuation().bound()).collect();
                let idx = if scale > v[0] {
                    0
                } else if scale > v[1] {
                    1
                } else {
                    return Err(Error::Unsupported(format!(
                        "annulus recentering needs scale > min valuation of the center ({} ≤ {})",
                        scale,
                        v[0].min(v[1])
                    )));
                };
                let other = 1 - idx;
                let target = AlgebraModel::with_vars(base, vec!["U".into()], vec![new_kind], cap)?;
                let u = AdicSeries::var(&target, "U")?;
                let xi = &center[idx];
                let main = AdicSeries::constant(&target, xi).plus(&u.scale(&pik));
                // ζ_other = π^m / (x + π^k U) = (π^m/x) Σ (−π^k U / x)^j
                let vx = v[idx];
                let unit_inv = xi.div_pi_pow(vx)?.inverse()?;
                let lead = &PadicElement::pi_pow(base, m - vx) * &unit_inv;
                let ratio = &(-&PadicElement::pi_pow(base, scale - vx)) * &unit_inv;
                let mut geo = AdicSeries::zero(&target);
                let mut term = AdicSeries::constant(&target, &lead);
                let step = u.scale(&ratio);
                let max_terms = n_prec.div_ceil(scale - vx) + 1;
                for _ in 0..=max_terms {
                    if term.is_zero_series() {
                        break;
                    }
                    geo = geo.plus(&term);
                    term = term.times(&step);
                }
                let mut images = vec![AdicSeries::zero(&target), AdicSeries::zero(&target)];
                images[idx] = main;
                images[other] = geo;
                Ok(Substitution {
                    source: model.clone(),
                    target,
                    center: center.to_vec(),
                    scale,
                    images,
                    loss: None,
                    annulus_coord: Some(idx),
                })
            }
            Relation::Cover { .. } => Err(Error::Unsupported(
                "recentering on the cover preset has no closed form; use membership on the generators".into(),
            )),
        }
    }

    pub fn source(&self) -> &Arc<AlgebraModel> {
        &self.source
    }
    pub fn target(&self) -> &Arc<AlgebraModel> {
        &self.target
    }
    pub fn scale(&self) -> u32 {
        self.scale
    }
    pub fn center(&self) -> &[PadicElement] {
        &self.center
    }
    pub fn loss(&self) -> Option<u32> {
        self.loss
    }

    /// f in the new coordinates.
    pub fn apply(&self, f: &AdicSeries) -> Result<AdicSeries> {
        if **f.model() != *self.source {
            return Err(Error::arg("series lives on a different model"));
        }
        f.compose(&self.images, self.loss)
    }

    /// The source-model point with new coordinates `u`.
    pub fn push(&self, u: &ModelPoint) -> Result<ModelPoint> {
        let ext = u.extension();
        let pik = ext.embed(&PadicElement::pi_pow(self.source.base(), self.scale))?;
        match self.annulus_coord {
            None => {
                let coords = self
                    .center
                    .iter()
                    .zip(u.coords())
                    .map(|(x, y)| Ok(&ext.embed(x)? + &(&pik * y)))
                    .collect::<Result<Vec<_>>>()?;
                ModelPoint::new(&self.source, ext, coords)
            }
            Some(idx) => {
                let m = match self.source.relation() {
                    Relation::Annulus { m } => *m,
                    _ => unreachable!(),
                };
                let z = &ext.embed(&self.center[idx])? + &(&pik * &u.coords()[0]);
                let pim = ext.embed(&PadicElement::pi_pow(self.source.base(), m))?;
                let w = pim.div(&z)?;
                let mut coords = vec![z.clone(), z];
                coords[1 - idx] = w;
                ModelPoint::new(&self.source, ext, coords)
            }
        }
    }

    /// New coordinates of a source point, if it lies in the rescaled region.
    pub fn pull(&self, y: &ModelPoint) -> Result<ModelPoint> {
        let ext = y.extension();
        let e = ext.e_rel() as u32;
        let idx: Vec<usize> = match self.annulus_coord {
            None => (0..self.source.nvars()).collect(),
            Some(i) => vec![i],
        };
        let mut coords = Vec::new();
        for i in idx {
            let d = &y.coords()[i] - &ext.embed(&self.center[i])?;
            let k = self.scale * e;
            let v = d.valuation();
            if let Valuation::Exact(v) = v {
                if v < k {
                    return Err(Error::Domain("point is outside the rescaled region".into()));
                }
            }
            let pil = ext.embed(&PadicElement::pi_pow(self.source.base(), self.scale))?;
            let q = d.div(&pil)?;
            coords.push(q);
        }
        ModelPoint::new(&self.target, ext, coords)
    }
}

/// Precision lost (π_L units) when the truncated open tail of a source
/// series is re-expanded around the center; None when nothing is lost.
fn tail_loss(model: &AlgebraModel, center: &[PadicElement], k: u32, kind: NeighborhoodKind) -> Option<u32> {
    let opens: Vec<usize> = (0..model.nvars()).filter(|&i| model.kinds()[i] == VarKind::Open).collect();
    if opens.is_empty() {
        return None;
    }
    let d = model.degree_cap();
    let vx = opens
        .iter()
        .filter_map(|&i| center[i].valuation().exact())
        .min();
    match (kind, vx) {
        (NeighborhoodKind::WideOpen, None) => None,
        (NeighborhoodKind::WideOpen, Some(vx)) => Some(((d + 1) * vx).min(vx + k * d)),
        (NeighborhoodKind::Affinoid, None) => Some((d + 1) * k),
        (NeighborhoodKind::Affinoid, Some(vx)) => Some((d + 1) * vx.min(k)),
    }
}

/// recenter_rescale with the neighborhood's standard scale.
pub fn recenter(f: &AdicSeries, center: &[PadicElement], n: u32, kind: NeighborhoodKind) -> Result<(AdicSeries, Substitution)> {
    let sub = Substitution::new(f.model(), center, kind.scale(n), kind, None)?;
    let g = sub.apply(f)?;
    Ok((g, sub))
}

/// The evaluation of f at a pushed point equals the evaluation of the
/// recentered series at the new coordinates, at the smaller precision.
pub fn check_commutes(f: &AdicSeries, sub: &Substitution, u: &ModelPoint) -> Result<bool> {
    let g = sub.apply(f)?;
    let a = g.evaluate(u)?;
    let b = f.evaluate(&sub.push(u)?)?;
    let m = a.precision().min(b.precision());
    Ok(a.truncate(m) == b.truncate(m))
}
