//! Finite extensions of Q_p at finite precision.

mod arith;
mod context;
mod element;
mod extension;
mod gamma;
mod number;
mod residue_field;

pub use arith::vp_int;
pub use context::{ContextRecord, PadicContext};
pub use element::{PValuation, PadicElement, Valuation};
pub use extension::Extension;
pub use gamma::{congruence_equiv_audit, gamma_exponent, gamma_injectivity_check, CongruenceAudit, InjectivityReport};
pub use number::PadicNumber;
pub use residue_field::{Fq, ResidueField};
