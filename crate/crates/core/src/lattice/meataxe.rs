//! Composition factors of modules over F_q by submodule spinning.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ResidueRep;
use crate::error::{Error, Result};
use crate::linalg::fq::{self, FqMatrix};
use crate::linalg::Matrix;
use crate::padic::{Fq, ResidueField};

#[derive(Debug, Clone)]
pub struct MeataxeOptions {
    /// Largest number of projective points enumerated in one search.
    pub projective_limit: u64,
    /// Random algebra elements tried before giving up.
    pub trials: usize,
    pub seed: u64,
}

impl Default for MeataxeOptions {
    fn default() -> Self {
        MeataxeOptions {
            projective_limit: 1 << 16,
            trials: 60,
            seed: 0,
        }
    }
}

/// An irreducible composition factor with its multiplicity.
#[derive(Debug, Clone, Serialize)]
pub struct Factor {
    pub dim: usize,
    pub multiplicity: usize,
    pub absolutely_irreducible: bool,
    /// Traces of the generators, then of the products g_i·g_j (i ≤ j).
    pub traces: Vec<Fq>,
    #[serde(serialize_with = "ser_fq_matrices")]
    pub gen_images: Vec<FqMatrix>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Semisimplification {
    pub field_size: u64,
    pub dim: usize,
    pub factors: Vec<Factor>,
}

impl Semisimplification {
    pub fn composition_length(&self) -> usize {
        self.factors.iter().map(|f| f.multiplicity).sum()
    }

    /// One absolutely irreducible factor of full dimension.
    pub fn is_absolutely_irreducible(&self) -> bool {
        self.factors.len() == 1
            && self.factors[0].multiplicity == 1
            && self.factors[0].dim == self.dim
            && self.factors[0].absolutely_irreducible
    }

    /// (dim, multiplicity) pairs, sorted.
    pub fn shape(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = self.factors.iter().map(|f| (f.dim, f.multiplicity)).collect();
        v.sort_unstable();
        v
    }
}

fn ser_fq_matrices<S: serde::Serializer>(ms: &[FqMatrix], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<Vec<Vec<Fq>>> = ms
        .iter()
        .map(|m| (0..m.rows()).map(|i| m.row(i).to_vec()).collect())
        .collect();
    v.serialize(s)
}

/// A subspace in reduced row echelon form.
#[derive(Debug, Clone, Default)]
struct Echelon {
    rows: Vec<Vec<Fq>>,
    pivots: Vec<usize>,
}

impl Echelon {
    fn reduce(&self, k: &ResidueField, mut v: Vec<Fq>) -> Vec<Fq> {
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            if c != 0 {
                for (x, y) in v.iter_mut().zip(r) {
                    *x = k.sub(*x, k.mul(c, *y));
                }
            }
        }
        v
    }

    /// Adds v to the span; false when it was already there.
    fn insert(&mut self, k: &ResidueField, v: Vec<Fq>) -> bool {
        let mut v = self.reduce(k, v);
        let Some(p) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = k.inv(v[p]);
        for x in v.iter_mut() {
            *x = k.mul(*x, inv);
        }
        for r in self.rows.iter_mut() {
            let c = r[p];
            if c != 0 {
                for (x, y) in r.iter_mut().zip(&v) {
                    *x = k.sub(*x, k.mul(c, *y));
                }
            }
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }
}

/// Basis (rows) of the smallest subspace containing the seeds and stable
/// under the matrices.
pub fn spin(k: &ResidueField, gens: &[FqMatrix], seeds: &[Vec<Fq>], dim: usize) -> Vec<Vec<Fq>> {
    spin_echelon(k, gens, seeds, dim).rows
}

fn spin_echelon(k: &ResidueField, gens: &[FqMatrix], seeds: &[Vec<Fq>], dim: usize) -> Echelon {
    let mut ech = Echelon::default();
    let mut queue: Vec<Vec<Fq>> = Vec::new();
    for s in seeds {
        if ech.insert(k, s.clone()) {
            queue.push(s.clone());
        }
    }
    let mut i = 0;
    while i < queue.len() && ech.dim() < dim {
        for g in gens {
            let w = fq::mul_vec(k, g, &queue[i]);
            if ech.insert(k, w.clone()) {
                queue.push(w);
            }
        }
        i += 1;
    }
    ech
}

/// Number of projective points of F_q^n, if it fits.
fn projective_count(q: u64, n: usize) -> Option<u64> {
    let mut total: u64 = 0;
    for j in 0..n {
        total = total.checked_add(q.checked_pow(j as u32)?)?;
    }
    Some(total)
}

/// Normalized representatives of the lines of F_q^n (first nonzero entry 1).
fn projective_points(q: u64, n: usize) -> impl Iterator<Item = Vec<Fq>> {
    (0..n).flat_map(move |lead| {
        let free = n - 1 - lead;
        (0..q.pow(free as u32)).map(move |mut idx| {
            let mut v = vec![0; n];
            v[lead] = 1;
            for x in v[lead + 1..].iter_mut() {
                *x = (idx % q) as Fq;
                idx /= q;
            }
            v
        })
    })
}

fn combine(k: &ResidueField, basis: &[Vec<Fq>], coeffs: &[Fq], n: usize) -> Vec<Fq> {
    let mut v = vec![0; n];
    for (b, &c) in basis.iter().zip(coeffs) {
        if c != 0 {
            for (x, y) in v.iter_mut().zip(b) {
                *x = k.add(*x, k.mul(c, *y));
            }
        }
    }
    v
}

fn fq_pow(k: &ResidueField, a: &FqMatrix, mut e: u64) -> FqMatrix {
    let mut base = a.clone();
    let mut acc = fq::identity(a.rows());
    while e > 0 {
        if e & 1 == 1 {
            acc = fq::mul(k, &acc, &base);
        }
        base = fq::mul(k, &base, &base);
        e >>= 1;
    }
    acc
}

fn random_algebra_element<R: Rng>(k: &ResidueField, gens: &[FqMatrix], dim: usize, rng: &mut R) -> FqMatrix {
    let q = k.size();
    let mut theta = fq::scale(k, rng.gen_range(0..q) as Fq, &fq::identity(dim));
    for _ in 0..3 {
        let mut prod = fq::identity(dim);
        for _ in 0..rng.gen_range(1..=3) {
            prod = fq::mul(k, &prod, &gens[rng.gen_range(0..gens.len())]);
        }
        let c = rng.gen_range(1..q) as Fq;
        theta = fq::add(k, &theta, &fq::scale(k, c, &prod));
    }
    theta
}

/// First vector (as a combination of `basis`) whose spin is proper.
fn proper_spin(k: &ResidueField, gens: &[FqMatrix], basis: &[Vec<Fq>], dim: usize) -> Option<Vec<Vec<Fq>>> {
    for c in projective_points(k.size(), basis.len()) {
        let v = combine(k, basis, &c, dim);
        let e = spin_echelon(k, gens, &[v], dim);
        if e.dim() < dim {
            return Some(e.rows);
        }
    }
    None
}

/// A proper nonzero invariant subspace (basis rows), or None when the
/// module is irreducible. Both answers are proofs.
pub fn find_submodule(k: &ResidueField, gens: &[FqMatrix], dim: usize, opts: &MeataxeOptions) -> Result<Option<Vec<Vec<Fq>>>> {
    if dim <= 1 {
        return Ok(None);
    }
    if gens.is_empty() {
        let mut e = vec![0; dim];
        e[0] = 1;
        return Ok(Some(vec![e]));
    }
    let q = k.size();
    if projective_count(q, dim).is_some_and(|c| c <= opts.projective_limit) {
        let std: Vec<Vec<Fq>> = (0..dim)
            .map(|i| (0..dim).map(|j| (i == j) as Fq).collect())
            .collect();
        return Ok(proper_spin(k, gens, &std, dim));
    }

    // A submodule W meets ker f(θ) for any θ in the algebra and any factor
    // f of the characteristic polynomial dividing char(θ|W); otherwise the
    // annihilator of W meets ker f(θ)^T. Enumerating both kernels is complete.
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(u64, Vec<Vec<Fq>>, Vec<Vec<Fq>>)> = None;
    for _ in 0..opts.trials {
        let theta = random_algebra_element(k, gens, dim, &mut rng);
        let mut power = theta.clone();
        for _ in 1..=dim {
            power = fq_pow(k, &power, q);
            let m = fq::sub(k, &power, &theta);
            let ker = fq::nullspace(k, &m);
            if ker.is_empty() {
                continue;
            }
            let ker_t = fq::nullspace(k, &m.transpose());
            let cost = projective_count(q, ker.len())
                .zip(projective_count(q, ker_t.len()))
                .and_then(|(a, b)| a.checked_add(b));
            if let Some(c) = cost {
                if best.as_ref().map_or(true, |b| c < b.0) {
                    best = Some((c, ker, ker_t));
                }
            }
            break;
        }
        if best.as_ref().is_some_and(|b| b.0 <= 2 * (q + 1)) {
            break;
        }
    }
    let Some((cost, ker, ker_t)) = best else {
        return Err(Error::Budget("no random algebra element gave a usable kernel".into()));
    };
    if cost > opts.projective_limit {
        return Err(Error::Budget(format!("smallest kernel search needs {cost} spins")));
    }
    if let Some(w) = proper_spin(k, gens, &ker, dim) {
        return Ok(Some(w));
    }
    let gens_t: Vec<FqMatrix> = gens.iter().map(|g| g.transpose()).collect();
    if let Some(s) = proper_spin(k, &gens_t, &ker_t, dim) {
        let ann = fq::nullspace(k, &Matrix::from_rows(s));
        return Ok(Some(ann));
    }
    Ok(None)
}

/// Basis of {X : X·a_i = b_i·X}, X of size dim_b × dim_a.
pub fn intertwiners(k: &ResidueField, a: &[FqMatrix], b: &[FqMatrix], dim_a: usize, dim_b: usize) -> Vec<FqMatrix> {
    let var = |i: usize, j: usize| i * dim_a + j;
    let n = dim_a * dim_b;
    let mut rows: Vec<Vec<Fq>> = Vec::new();
    for (ag, bg) in a.iter().zip(b) {
        for i in 0..dim_b {
            for j in 0..dim_a {
                let mut r = vec![0; n];
                for l in 0..dim_a {
                    r[var(i, l)] = k.add(r[var(i, l)], *ag.get(l, j));
                }
                for l in 0..dim_b {
                    r[var(l, j)] = k.sub(r[var(l, j)], *bg.get(i, l));
                }
                rows.push(r);
            }
        }
    }
    let sol = if rows.is_empty() {
        (0..n).map(|i| (0..n).map(|j| (i == j) as Fq).collect()).collect()
    } else {
        fq::nullspace(k, &Matrix::from_rows(rows))
    };
    sol.into_iter()
        .map(|v| Matrix::from_fn(dim_b, dim_a, |i, j| v[var(i, j)]))
        .collect()
}

fn composition_factors(
    k: &ResidueField,
    gens: Vec<FqMatrix>,
    dim: usize,
    opts: &MeataxeOptions,
    out: &mut Vec<(usize, Vec<FqMatrix>)>,
) -> Result<()> {
    let Some(w) = find_submodule(k, &gens, dim, opts)? else {
        out.push((dim, gens));
        return Ok(());
    };
    let s = w.len();
    let mut ech = Echelon::default();
    let mut cols = Vec::with_capacity(dim);
    for v in w {
        ech.insert(k, v.clone());
        cols.push(v);
    }
    for j in 0..dim {
        let e: Vec<Fq> = (0..dim).map(|i| (i == j) as Fq).collect();
        if ech.insert(k, e.clone()) {
            cols.push(e);
        }
    }
    let b = Matrix::from_fn(dim, dim, |i, j| cols[j][i]);
    let binv = fq::inverse(k, &b).expect("completed basis is invertible");
    let mut sub = Vec::with_capacity(gens.len());
    let mut quot = Vec::with_capacity(gens.len());
    for g in &gens {
        let a = fq::mul(k, &fq::mul(k, &binv, g), &b);
        debug_assert!((0..s).all(|j| (s..dim).all(|i| *a.get(i, j) == 0)));
        sub.push(Matrix::from_fn(s, s, |i, j| *a.get(i, j)));
        quot.push(Matrix::from_fn(dim - s, dim - s, |i, j| *a.get(s + i, s + j)));
    }
    composition_factors(k, sub, s, opts, out)?;
    composition_factors(k, quot, dim - s, opts, out)
}

fn factor_traces(k: &ResidueField, gens: &[FqMatrix]) -> Vec<Fq> {
    let tr = |m: &FqMatrix| (0..m.rows()).fold(0, |acc, i| k.add(acc, *m.get(i, i)));
    let mut t: Vec<Fq> = gens.iter().map(tr).collect();
    for i in 0..gens.len() {
        for j in i..gens.len() {
            t.push(tr(&fq::mul(k, &gens[i], &gens[j])));
        }
    }
    t
}

/// Composition factors of F_q^dim under the given matrices, grouped into
/// isomorphism classes.
pub fn semisimplify_fq(k: &ResidueField, gens: &[FqMatrix], dim: usize, opts: &MeataxeOptions) -> Result<Semisimplification> {
    let mut raw = Vec::new();
    composition_factors(k, gens.to_vec(), dim, opts, &mut raw)?;
    let mut classes: Vec<Factor> = Vec::new();
    for (d, g) in raw {
        // nonzero maps between irreducibles of one dimension are isomorphisms
        let same = classes
            .iter_mut()
            .find(|c| c.dim == d && !intertwiners(k, &c.gen_images, &g, d, d).is_empty());
        match same {
            Some(c) => c.multiplicity += 1,
            None => {
                let absolutely_irreducible = intertwiners(k, &g, &g, d, d).len() == 1;
                classes.push(Factor {
                    dim: d,
                    multiplicity: 1,
                    absolutely_irreducible,
                    traces: factor_traces(k, &g),
                    gen_images: g,
                });
            }
        }
    }
    classes.sort_by(|a, b| (a.dim, &a.traces).cmp(&(b.dim, &b.traces)));
    Ok(Semisimplification {
        field_size: k.size(),
        dim,
        factors: classes,
    })
}

/// Semisimplification of a representation mod π.
pub fn semisimplify_mod_p(r: &ResidueRep, opts: &MeataxeOptions) -> Result<Semisimplification> {
    if r.modulus() != 1 {
        return Err(Error::arg("semisimplification needs a representation mod π"));
    }
    let k = ResidueField::of(r.ring().ctx());
    semisimplify_fq(&k, &r.residue_matrices(), r.dim(), opts)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::super::{reduce_rep_mod, IntegralRep};
    use super::*;
    use crate::group::GroupPresentation;
    use crate::padic::PadicContext;

    fn m(rows: &[&[Fq]]) -> FqMatrix {
        Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect())
    }

    #[test]
    fn small_examples() {
        let k = ResidueField::prime_field(5);
        let opts = MeataxeOptions::default();
        let triv = semisimplify_fq(&k, &[fq::identity(3)], 3, &opts).unwrap();
        assert_eq!(triv.shape(), vec![(1, 3)]);
        let unip = semisimplify_fq(&k, &[m(&[&[1, 1], &[0, 1]])], 2, &opts).unwrap();
        assert_eq!(unip.shape(), vec![(1, 2)]);
        assert!(!unip.is_absolutely_irreducible());
        // rotation by 90 degrees: irreducible over F_3, split over F_5
        let k3 = ResidueField::prime_field(3);
        let rot = m(&[&[0, 2], &[1, 0]]);
        let s3 = semisimplify_fq(&k3, &[rot.clone()], 2, &opts).unwrap();
        assert_eq!(s3.shape(), vec![(2, 1)]);
        assert!(!s3.is_absolutely_irreducible());
        let rot5 = m(&[&[0, 4], &[1, 0]]);
        assert_eq!(semisimplify_fq(&k, &[rot5], 2, &opts).unwrap().shape(), vec![(1, 1), (1, 1)]);
    }

    #[test]
    fn symmetric_group_mod_5() {
        let ctx = PadicContext::qp(5, 4).unwrap();
        let s3 = Arc::new(GroupPresentation::symmetric(3).unwrap());
        // standard 2-dim irreducible on the sum-zero plane, basis e1−e2, e2−e3
        let rep = IntegralRep::from_ints(
            s3,
            &ctx,
            &[vec![vec![-1, 1], vec![0, 1]], vec![vec![0, -1], vec![1, -1]]],
        )
        .unwrap();
        let ss = semisimplify_mod_p(&reduce_rep_mod(&rep, 1).unwrap(), &MeataxeOptions::default()).unwrap();
        assert_eq!(ss.shape(), vec![(2, 1)]);
        assert!(ss.is_absolutely_irreducible());
    }

    #[test]
    fn norton_route_matches_exhaustive() {
        let k = ResidueField::prime_field(7);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let exhaustive = MeataxeOptions::default();
        let norton = MeataxeOptions {
            projective_limit: 60,
            ..Default::default()
        };
        for _ in 0..20 {
            // block upper triangular with a 1-dim and a 2-dim block
            let mut gens = Vec::new();
            for _ in 0..2 {
                let mut g = Matrix::from_fn(3, 3, |_, _| rng.gen_range(0..7) as Fq);
                g.set(1, 0, 0);
                g.set(2, 0, 0);
                gens.push(g);
            }
            let a = semisimplify_fq(&k, &gens, 3, &exhaustive);
            let b = semisimplify_fq(&k, &gens, 3, &norton);
            match (a, b) {
                (Ok(a), Ok(b)) => assert_eq!(a.shape(), b.shape()),
                (Ok(_), Err(Error::Budget(_))) => {}
                (a, b) => panic!("{a:?} {b:?}"),
            }
        }
    }
}
