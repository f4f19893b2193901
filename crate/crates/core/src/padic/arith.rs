//! Integer helpers: modular arithmetic below 2^62 and polynomials over F_p.

pub(crate) fn mulmod(a: i128, b: i128, m: i128) -> i128 {
    (a * b).rem_euclid(m)
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn pow_u64(base: u64, exp: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn vp_int(mut n: i128, p: u64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let p = p as i128;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    Some(v)
}

pub(crate) fn inv_mod_prime(a: u64, p: u64) -> u64 {
    // Fermat; p is small.
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

// ---- polynomials over F_p, coefficients low to high ----

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub(crate) fn fp_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let m = trim(m.to_vec());
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = inv_mod_prime(m[dm], p);
    while r.len() > dm {
        let dr = r.len() - 1;
        let c = r[dr] * lead_inv % p;
        for i in 0..=dm {
            let idx = dr - dm + i;
            r[idx] = (r[idx] + p - c * m[i] % p) % p;
        }
        r = trim(r);
    }
    r
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn fp_powmod_x(exp: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut base = fp_rem(&[0, 1], m, p);
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result = fp_rem(&fp_mul(&result, &base, p), m, p);
        }
        base = fp_rem(&fp_mul(&base, &base, p), m, p);
        e >>= 1;
    }
    result
}

fn fp_compose_pow(prev: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    // prev = x^{p^i} mod m; return prev^p mod m
    let mut result = vec![1u64];
    let mut base = prev.to_vec();
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            result = fp_rem(&fp_mul(&result, &base, p), m, p);
        }
        base = fp_rem(&fp_mul(&base, &base, p), m, p);
        e >>= 1;
    }
    result
}

/// Rabin-style irreducibility test over F_p for a monic polynomial.
pub(crate) fn fp_is_irreducible(g: &[u64], p: u64) -> bool {
    let g = trim(g.iter().map(|c| c % p).collect());
    if g.len() < 2 {
        return false;
    }
    let deg = g.len() - 1;
    if deg == 1 {
        return true;
    }
    let mut xp = fp_powmod_x(p, &g, p);
    for i in 1..=deg / 2 {
        if i > 1 {
            xp = fp_compose_pow(&xp, &g, p);
        }
        let mut diff = xp.clone();
        if diff.len() < 2 {
            diff.resize(2, 0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        let gcd = fp_gcd(&g, &diff, p);
        if gcd.len() > 1 {
            return false;
        }
    }
    true
}

/// First monic irreducible polynomial of the given degree in lexicographic
/// order of its lower coefficients.
pub(crate) fn first_irreducible(p: u64, deg: usize) -> Vec<u64> {
    if deg == 1 {
        return vec![0, 1];
    }
    let mut coeffs = vec![0u64; deg];
    loop {
        let mut g = coeffs.clone();
        g.push(1);
        if g[0] != 0 && fp_is_irreducible(&g, p) {
            return g;
        }
        let mut i = 0;
        loop {
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            i += 1;
            assert!(i < deg, "no irreducible polynomial found");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducibility_small_cases() {
        assert!(fp_is_irreducible(&[1, 0, 1], 3)); // x^2+1 mod 3
        assert!(!fp_is_irreducible(&[1, 0, 1], 5)); // 2^2 = -1 mod 5
        assert!(fp_is_irreducible(&[1, 1, 1], 2));
        assert!(!fp_is_irreducible(&[0, 0, 1], 7));
        let g = first_irreducible(5, 2);
        assert!(fp_is_irreducible(&g, 5));
        let g3 = first_irreducible(2, 3);
        assert_eq!(g3, vec![1, 1, 0, 1]);
    }

    #[test]
    fn valuations_of_integers() {
        assert_eq!(vp_int(24, 2), Some(3));
        assert_eq!(vp_int(-75, 5), Some(2));
        assert_eq!(vp_int(0, 3), None);
    }
}
