use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{PadicContext, PadicElement};

/// Exponent vector, one entry per model variable.
pub type Mono = Vec<u32>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    /// ζ-type, |ζ| ≤ 1; series are polynomial in these.
    Bounded,
    /// ξ-type, |ξ| < 1; series are truncated at total degree D in these.
    Open,
    /// The adjoined variable Y of a cover Y^d = g.
    Cover,
}

#[derive(Clone, PartialEq)]
pub enum Relation {
    None,
    /// ζ_1·ζ_2 = π^m on the first two (bounded) variables.
    Annulus { m: u32 },
    /// Y^d = g, Y the last variable, g free of Y.
    Cover { d: u32, g: BTreeMap<Mono, PadicElement> },
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::None => write!(f, "none"),
            Relation::Annulus { m } => write!(f, "annulus(m={m})"),
            Relation::Cover { d, g } => write!(f, "cover(d={d}, {} terms)", g.len()),
        }
    }
}

/// A truncated model O_L⟨ζ⟩[[ξ]] (optionally with a preset relation).
#[derive(Clone, PartialEq)]
pub struct AlgebraModel {
    base: Arc<PadicContext>,
    names: Vec<String>,
    kinds: Vec<VarKind>,
    relation: Relation,
    degree_cap: u32,
}

impl fmt::Debug for AlgebraModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "AlgebraModel({:?}, vars={:?}, kinds={:?}, {:?}, D={})",
            self.base, self.names, self.kinds, self.relation, self.degree_cap
        )
    }
}

impl AlgebraModel {
    fn check_names(names: &[String]) -> Result<()> {
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || !n.chars().next().unwrap().is_ascii_alphabetic() {
                return Err(Error::arg(format!("bad variable name {n:?}")));
            }
            if n == "pi" || n == "w" || n == "p" {
                return Err(Error::arg(format!("variable name {n:?} is reserved")));
            }
            if names[..i].contains(n) {
                return Err(Error::arg(format!("duplicate variable {n:?}")));
            }
        }
        Ok(())
    }

    /// O_L⟨bounded⟩[[open]] truncated at total open degree `degree_cap`.
    pub fn disc(base: &Arc<PadicContext>, bounded: &[&str], open: &[&str], degree_cap: u32) -> Result<Arc<Self>> {
        let mut names: Vec<String> = bounded.iter().map(|s| s.to_string()).collect();
        names.extend(open.iter().map(|s| s.to_string()));
        Self::check_names(&names)?;
        let mut kinds = vec![VarKind::Bounded; bounded.len()];
        kinds.extend(vec![VarKind::Open; open.len()]);
        Ok(Arc::new(AlgebraModel {
            base: base.clone(),
            names,
            kinds,
            relation: Relation::None,
            degree_cap,
        }))
    }

    /// O_L⟨ζ_1, ζ_2⟩/(ζ_1ζ_2 − π^m).
    pub fn annulus(base: &Arc<PadicContext>, z1: &str, z2: &str, m: u32) -> Result<Arc<Self>> {
        if m == 0 {
            return Err(Error::arg("annulus requires m ≥ 1"));
        }
        let names = vec![z1.to_string(), z2.to_string()];
        Self::check_names(&names)?;
        Ok(Arc::new(AlgebraModel {
            base: base.clone(),
            names,
            kinds: vec![VarKind::Bounded; 2],
            relation: Relation::Annulus { m },
            degree_cap: 0,
        }))
    }

    /// disc[Y]/(Y^d − g) where g is a series on the disc model.
    pub fn cover(disc: &Arc<AlgebraModel>, y: &str, d: u32, g: &super::AdicSeries) -> Result<Arc<Self>> {
        if disc.relation != Relation::None {
            return Err(Error::arg("a cover must be built over a disc model"));
        }
        if d == 0 {
            return Err(Error::arg("cover degree must be at least 1"));
        }
        if **g.model() != **disc {
            return Err(Error::arg("cover relation lives on a different model"));
        }
        let mut names = disc.names.clone();
        names.push(y.to_string());
        Self::check_names(&names)?;
        let mut kinds = disc.kinds.clone();
        kinds.push(VarKind::Cover);
        let g = g
            .terms()
            .iter()
            .map(|(m, c)| {
                let mut m = m.clone();
                m.push(0);
                (m, c.clone())
            })
            .collect();
        Ok(Arc::new(AlgebraModel {
            base: disc.base.clone(),
            names,
            kinds,
            relation: Relation::Cover { d, g },
            degree_cap: disc.degree_cap,
        }))
    }

    /// A disc model on new variables with the given kinds (used by
    /// recentering).
    pub(crate) fn with_vars(base: &Arc<PadicContext>, names: Vec<String>, kinds: Vec<VarKind>, degree_cap: u32) -> Result<Arc<Self>> {
        Self::check_names(&names)?;
        Ok(Arc::new(AlgebraModel {
            base: base.clone(),
            names,
            kinds,
            relation: Relation::None,
            degree_cap,
        }))
    }

    /// The disc model underneath a cover (all variables but Y).
    pub fn cover_base(&self) -> Option<Arc<AlgebraModel>> {
        match self.relation {
            Relation::Cover { .. } => Some(Arc::new(AlgebraModel {
                base: self.base.clone(),
                names: self.names[..self.names.len() - 1].to_vec(),
                kinds: self.kinds[..self.kinds.len() - 1].to_vec(),
                relation: Relation::None,
                degree_cap: self.degree_cap,
            })),
            _ => None,
        }
    }

    pub fn base(&self) -> &Arc<PadicContext> {
        &self.base
    }
    pub fn names(&self) -> &[String] {
        &self.names
    }
    pub fn kinds(&self) -> &[VarKind] {
        &self.kinds
    }
    pub fn nvars(&self) -> usize {
        self.names.len()
    }
    pub fn relation(&self) -> &Relation {
        &self.relation
    }
    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }
    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
    pub fn is_disc(&self) -> bool {
        self.relation == Relation::None
    }

    pub fn open_degree(&self, m: &Mono) -> u32 {
        m.iter()
            .zip(&self.kinds)
            .filter(|(_, k)| **k == VarKind::Open)
            .map(|(e, _)| e)
            .sum()
    }

    pub fn preset_name(&self) -> &'static str {
        match self.relation {
            Relation::None => "disc",
            Relation::Annulus { .. } => "annulus",
            Relation::Cover { .. } => "cover",
        }
    }
}
