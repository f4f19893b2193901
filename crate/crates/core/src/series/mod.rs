//! Truncated mixed algebras O_L⟨ζ⟩[[ξ]] with the disc, annulus and cover
//! presets.

mod model;
mod parse;
mod point;
mod recenter;
#[allow(clippy::module_inception)]
mod series;

pub use model::{AlgebraModel, Mono, Relation, VarKind};
pub use parse::{parse_element, parse_number, parse_series, Expr};
pub use point::ModelPoint;
pub use recenter::{check_commutes, recenter, NeighborhoodKind, Substitution};
pub use series::{AdicSeries, ConstancyVerdict, Evaluator, Witness};
