//! Dense linear algebra over a small residue field, on element codes.

use super::matrix::Matrix;
use crate::padic::{Fq, ResidueField};

pub type FqMatrix = Matrix<Fq>;

pub fn zeros(rows: usize, cols: usize) -> FqMatrix {
    Matrix::from_fn(rows, cols, |_, _| 0)
}

pub fn identity(n: usize) -> FqMatrix {
    Matrix::from_fn(n, n, |i, j| (i == j) as Fq)
}

pub fn mul(k: &ResidueField, a: &FqMatrix, b: &FqMatrix) -> FqMatrix {
    assert_eq!(a.cols(), b.rows());
    Matrix::from_fn(a.rows(), b.cols(), |i, j| {
        let mut acc = 0;
        for t in 0..a.cols() {
            let x = *a.get(i, t);
            if x != 0 {
                acc = k.add(acc, k.mul(x, *b.get(t, j)));
            }
        }
        acc
    })
}

pub fn add(k: &ResidueField, a: &FqMatrix, b: &FqMatrix) -> FqMatrix {
    Matrix::from_fn(a.rows(), a.cols(), |i, j| k.add(*a.get(i, j), *b.get(i, j)))
}

pub fn sub(k: &ResidueField, a: &FqMatrix, b: &FqMatrix) -> FqMatrix {
    Matrix::from_fn(a.rows(), a.cols(), |i, j| k.sub(*a.get(i, j), *b.get(i, j)))
}

pub fn scale(k: &ResidueField, s: Fq, a: &FqMatrix) -> FqMatrix {
    a.map(|&x| k.mul(s, x))
}

pub fn mul_vec(k: &ResidueField, a: &FqMatrix, v: &[Fq]) -> Vec<Fq> {
    (0..a.rows())
        .map(|i| {
            let mut acc = 0;
            for (t, &x) in v.iter().enumerate() {
                acc = k.add(acc, k.mul(*a.get(i, t), x));
            }
            acc
        })
        .collect()
}

/// Row vector times matrix.
pub fn vec_mul(k: &ResidueField, v: &[Fq], a: &FqMatrix) -> Vec<Fq> {
    (0..a.cols())
        .map(|j| {
            let mut acc = 0;
            for (t, &x) in v.iter().enumerate() {
                if x != 0 {
                    acc = k.add(acc, k.mul(x, *a.get(t, j)));
                }
            }
            acc
        })
        .collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(k: &ResidueField, a: &mut FqMatrix) -> Vec<usize> {
    let (r, c) = (a.rows(), a.cols());
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..c {
        if row == r {
            break;
        }
        let Some(pr) = (row..r).find(|&i| *a.get(i, col) != 0) else {
            continue;
        };
        a.swap_rows(row, pr);
        let inv = k.inv(*a.get(row, col));
        for j in 0..c {
            let v = k.mul(inv, *a.get(row, j));
            a.set(row, j, v);
        }
        for i in 0..r {
            let f = *a.get(i, col);
            if i == row || f == 0 {
                continue;
            }
            for j in 0..c {
                let v = k.sub(*a.get(i, j), k.mul(f, *a.get(row, j)));
                a.set(i, j, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(k: &ResidueField, a: &FqMatrix) -> usize {
    let mut b = a.clone();
    rref(k, &mut b).len()
}

/// Basis of {x : A·x = 0}.
pub fn nullspace(k: &ResidueField, a: &FqMatrix) -> Vec<Vec<Fq>> {
    let mut b = a.clone();
    let pivots = rref(k, &mut b);
    let c = a.cols();
    let free: Vec<usize> = (0..c).filter(|j| !pivots.contains(j)).collect();
    free.iter()
        .map(|&fcol| {
            let mut v = vec![0; c];
            v[fcol] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = k.neg(*b.get(i, fcol));
            }
            v
        })
        .collect()
}

/// Basis (rows) of the row space.
pub fn row_basis(k: &ResidueField, vectors: &[Vec<Fq>], dim: usize) -> Vec<Vec<Fq>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let mut m = Matrix::from_rows(vectors.to_vec());
    debug_assert_eq!(m.cols(), dim);
    let n = rref(k, &mut m).len();
    (0..n).map(|i| m.row(i).to_vec()).collect()
}

pub fn is_invertible(k: &ResidueField, a: &FqMatrix) -> bool {
    a.is_square() && rank(k, a) == a.rows()
}

pub fn inverse(k: &ResidueField, a: &FqMatrix) -> Option<FqMatrix> {
    let n = a.rows();
    let mut aug = Matrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            *a.get(i, j)
        } else {
            (j - n == i) as Fq
        }
    });
    let piv = rref(k, &mut aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(Matrix::from_fn(n, n, |i, j| *aug.get(i, n + j)))
}

pub fn det(k: &ResidueField, a: &FqMatrix) -> Fq {
    let n = a.rows();
    let mut b = a.clone();
    let mut d: Fq = 1;
    for col in 0..n {
        let Some(pr) = (col..n).find(|&i| *b.get(i, col) != 0) else {
            return 0;
        };
        if pr != col {
            b.swap_rows(col, pr);
            d = k.neg(d);
        }
        let piv = *b.get(col, col);
        d = k.mul(d, piv);
        let inv = k.inv(piv);
        for i in col + 1..n {
            let f = k.mul(*b.get(i, col), inv);
            if f == 0 {
                continue;
            }
            for j in col..n {
                let v = k.sub(*b.get(i, j), k.mul(f, *b.get(col, j)));
                b.set(i, j, v);
            }
        }
    }
    d
}

/// Coordinates of v in a basis given by the rows of an rref matrix with the
/// listed pivots, or None when v is outside the span.
pub fn coords_in_rref(k: &ResidueField, basis: &[Vec<Fq>], pivots: &[usize], v: &[Fq]) -> Option<Vec<Fq>> {
    let mut rest = v.to_vec();
    let mut out = Vec::with_capacity(basis.len());
    for (b, &pc) in basis.iter().zip(pivots) {
        let c = rest[pc];
        out.push(c);
        if c != 0 {
            for (x, y) in rest.iter_mut().zip(b) {
                *x = k.sub(*x, k.mul(c, *y));
            }
        }
    }
    if rest.iter().all(|&x| x == 0) {
        Some(out)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicContext;

    #[test]
    fn inverse_and_nullspace() {
        let k = ResidueField::prime_field(5);
        let a = Matrix::from_rows(vec![vec![1, 2], vec![3, 4]]);
        let inv = inverse(&k, &a).unwrap();
        assert_eq!(mul(&k, &a, &inv), identity(2));
        assert_eq!(det(&k, &a), k.from_int(-2));
        let s = Matrix::from_rows(vec![vec![1, 2], vec![2, 4]]);
        assert!(inverse(&k, &s).is_none());
        let ns = nullspace(&k, &s);
        assert_eq!(ns.len(), 1);
        assert!(mul_vec(&k, &s, &ns[0]).iter().all(|&x| x == 0));
    }

    #[test]
    fn extension_field_det() {
        let ctx = PadicContext::unramified(2, 2, 2).unwrap();
        let k = ResidueField::of(&ctx);
        for a in 1..4 {
            let m = Matrix::from_rows(vec![vec![a, 1], vec![0, a]]);
            assert_eq!(det(&k, &m), k.mul(a, a));
            assert!(is_invertible(&k, &m));
        }
    }
}
