use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::ser_ratio;

/// α(k−1) = Σ_{n ≥ 1} ⌊(k−1)/(p^{n−1}(p−1))⌋.
pub fn alpha(km1: u64, p: u64) -> Result<u64> {
    if p < 2 {
        return Err(Error::arg(format!("{p} is not a prime")));
    }
    let mut sum = 0;
    let mut d = p - 1;
    while d <= km1 {
        sum += km1 / d;
        match d.checked_mul(p) {
            Some(x) => d = x,
            None => break,
        }
    }
    Ok(sum)
}

/// v_p(m!) by Legendre's formula.
pub fn vp_factorial(m: u64, p: u64) -> u64 {
    let mut s = 0;
    let mut q = m;
    while q > 0 {
        q /= p;
        s += q;
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CrystallineDisc {
    /// Points with v_p(a_p − a_{p,0}) strictly above this are congruent mod p^n.
    #[serde(serialize_with = "ser_ratio")]
    pub pointwise_bound: Ratio<i64>,
    /// The family is constant mod p^n on v_p(a_p − a_{p,0}) ≥ this.
    #[serde(serialize_with = "ser_ratio")]
    pub constancy_radius: Ratio<i64>,
    /// 2v + α(k−1) + e·n.
    #[serde(serialize_with = "ser_ratio")]
    pub coarse_threshold: Ratio<i64>,
    pub alpha: u64,
}

/// Radii of the disc around a_{p,0} on which crystalline representations
/// of weight k are congruent mod p^n.
pub fn crystalline_congruence_disc(k: u32, p: u64, v_ap0: Ratio<i64>, n: u32, e: u32) -> Result<CrystallineDisc> {
    if k < 2 {
        return Err(Error::arg("weight must be at least 2"));
    }
    if v_ap0 <= Ratio::from_integer(0) {
        return Err(Error::Domain("needs v_p(a_p0) > 0".into()));
    }
    let a = alpha((k - 1) as u64, p)?;
    let base = v_ap0 * 2 + Ratio::from_integer(a as i64);
    Ok(CrystallineDisc {
        pointwise_bound: base + Ratio::from_integer(n as i64 - 1),
        constancy_radius: base + Ratio::from_integer(n as i64),
        coarse_threshold: base + Ratio::from_integer(e as i64 * n as i64),
        alpha: a,
    })
}

/// 2 − k/2 − v_p((k−2)!) + 1 − n: semistable representations with
/// v_p(L) below this are congruent mod p^n to the crystalline one.
pub fn semistable_congruence_bound(k: u32, p: u64, n: u32) -> Result<Ratio<i64>> {
    if k < 4 {
        return Err(Error::Domain("needs k ≥ 4".into()));
    }
    if p == 2 {
        return Err(Error::Domain("needs p ≠ 2".into()));
    }
    Ok(Ratio::from_integer(3 - n as i64 - vp_factorial((k - 2) as u64, p) as i64) - Ratio::new(k as i64, 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha_loop(km1: u64, p: u64) -> u64 {
        (1..64u32)
            .map(|n| km1 as f64 / ((p as f64).powi(n as i32 - 1) * (p - 1) as f64))
            .map(|x| x.floor() as u64)
            .sum()
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha(1, 3).unwrap(), 0);
        assert_eq!(alpha(9, 3).unwrap(), 5);
        for p in [2, 3, 5, 7, 11] {
            for km1 in 0..p - 1 {
                assert_eq!(alpha(km1, p).unwrap(), 0);
            }
            for km1 in 0..200 {
                assert_eq!(alpha(km1, p).unwrap(), alpha_loop(km1, p));
            }
        }
    }

    #[test]
    fn crystalline_disc_examples() {
        let r = crystalline_congruence_disc(2, 5, Ratio::from_integer(1), 1, 1).unwrap();
        assert_eq!(r.pointwise_bound, Ratio::from_integer(2));
        assert_eq!(r.constancy_radius, Ratio::from_integer(3));
        assert!(r.coarse_threshold >= r.pointwise_bound);
        let r2 = crystalline_congruence_disc(2, 5, Ratio::from_integer(1), 2, 1).unwrap();
        assert_eq!(r2.pointwise_bound - r.pointwise_bound, Ratio::from_integer(1));
        assert!(crystalline_congruence_disc(2, 5, Ratio::from_integer(0), 1, 1).is_err());
    }

    #[test]
    fn semistable_examples() {
        assert_eq!(semistable_congruence_bound(4, 3, 1).unwrap(), Ratio::from_integer(0));
        assert_eq!(semistable_congruence_bound(6, 5, 2).unwrap(), Ratio::from_integer(-2));
        assert!(semistable_congruence_bound(3, 3, 1).is_err());
        assert!(semistable_congruence_bound(4, 2, 1).is_err());
        assert_eq!(vp_factorial(10, 2), 8);
    }
}
