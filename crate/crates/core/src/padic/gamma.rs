use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::element::{PadicElement, Valuation};
use super::extension::Extension;
use crate::error::{Error, Result};

/// γ_{E/L}(n) = (n-1)·e_{E/L} + 1, the smallest m such that congruence mod
/// π_E^m of elements of L is congruence mod π_L^n.
pub fn gamma_exponent(e_rel: u32, n: u32) -> Result<u32> {
    if e_rel == 0 {
        return Err(Error::arg("ramification index must be at least 1"));
    }
    if n == 0 {
        return Err(Error::arg("n must be at least 1"));
    }
    Ok((n - 1) * e_rel + 1)
}

#[derive(Debug, Clone, Serialize)]
pub struct CongruenceWitness {
    pub alpha: String,
    pub beta: String,
    pub in_pi_e_m: bool,
    pub in_pi_l_n: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CongruenceAudit {
    pub n: u32,
    pub m: u32,
    pub samples: usize,
    pub both_true: usize,
    pub both_false: usize,
    pub failures: Vec<CongruenceWitness>,
    pub pass: bool,
}

/// Samples α ∈ O_E and δ ∈ O_L, sets β = α − δ and checks
/// α − β ∈ π_E^m O_E ⇔ α − β ∈ π_L^n O_L with m = γ_{E/L}(n).
pub fn congruence_equiv_audit(ext: &Extension, n: u32, samples: usize, seed: u64) -> Result<CongruenceAudit> {
    let m = gamma_exponent(ext.e_rel() as u32, n)?;
    let (l, e) = (ext.base(), ext.ext());
    if n * ext.e_rel() as u32 + 1 > e.precision() {
        return Err(Error::Precision {
            needed: n * ext.e_rel() as u32 + 1,
            available: e.precision(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CongruenceAudit {
        n,
        m,
        samples,
        both_true: 0,
        both_false: 0,
        failures: Vec::new(),
        pass: true,
    };
    let lprec = l.precision();
    for s in 0..samples {
        let alpha = PadicElement::random(e, &mut rng, e.precision());
        let delta = if s == 0 {
            PadicElement::zero(l)
        } else {
            // valuations spread around the threshold n
            let v = rng.gen_range(0..=(n + 1).min(lprec - 1));
            PadicElement::random_with_valuation(l, &mut rng, v, lprec)
        };
        let beta = &alpha - &ext.embed(&delta)?;
        let diff = &alpha - &beta;
        let lhs = match diff.valuation() {
            Valuation::Exact(v) => v >= m,
            Valuation::AtLeast(v) => v >= m,
        };
        let rhs = match delta.valuation() {
            Valuation::Exact(v) => v >= n,
            Valuation::AtLeast(v) => v >= n,
        };
        if lhs != rhs {
            report.pass = false;
            report.failures.push(CongruenceWitness {
                alpha: alpha.to_string(),
                beta: beta.to_string(),
                in_pi_e_m: lhs,
                in_pi_l_n: rhs,
            });
        } else if lhs {
            report.both_true += 1;
        } else {
            report.both_false += 1;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct InjectivityReport {
    pub n: u32,
    pub gamma: u32,
    pub residues: u64,
    pub injective: bool,
    /// The map into O_E/π_E^{γ-1} fails to be injective.
    pub minimal: bool,
}

/// Exhaustive check that O_L/π_L^n → O_E/π_E^γ is injective and that γ is
/// the smallest exponent with this property.
pub fn gamma_injectivity_check(ext: &Extension, n: u32) -> Result<InjectivityReport> {
    let gamma = gamma_exponent(ext.e_rel() as u32, n)?;
    let l = ext.base();
    let q = l.residue_size();
    let count = (q as u128).pow(n);
    if count > 1 << 22 {
        return Err(Error::Budget(format!("{count} residues exceed the enumeration budget")));
    }
    let digits = crate::padic::ResidueField::of(l);
    let pi = PadicElement::pi(l);
    let mut seen_gamma = HashSet::new();
    let mut seen_below = HashSet::new();
    let mut injective = true;
    let mut collided_below = false;
    for idx in 0..count as u64 {
        // digit expansion Σ [d_i] π^i
        let mut x = PadicElement::zero(l);
        let mut rest = idx;
        let mut pk = PadicElement::one(l);
        for _ in 0..n {
            let d = (rest % q) as u32;
            rest /= q;
            x = &x + &(&digits.lift(l, d) * &pk);
            pk = &pk * &pi;
        }
        let img = ext.embed(&x)?;
        let key = img.truncate(gamma).coords().to_vec();
        if !seen_gamma.insert(key) {
            injective = false;
        }
        if gamma > 1 {
            let key = img.truncate(gamma - 1).coords().to_vec();
            if !seen_below.insert(key) {
                collided_below = true;
            }
        }
    }
    Ok(InjectivityReport {
        n,
        gamma,
        residues: count as u64,
        injective,
        minimal: gamma == 1 || collided_below,
    })
}
