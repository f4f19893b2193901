use std::fmt;

use crate::padic::PadicElement;

/// The operations matrices need from their entries. Entries carry their own
/// parent (context, model) so constants are produced from an existing value.
pub trait Ring: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;
}

impl Ring for PadicElement {
    fn zero_like(&self) -> Self {
        PadicElement::zero(self.ctx())
    }
    fn one_like(&self) -> Self {
        PadicElement::one(self.ctx())
    }
    fn is_zero(&self) -> bool {
        PadicElement::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[T]> = (0..self.rows).map(|i| self.row(i)).collect();
        f.debug_list().entries(rows).finish()
    }
}

impl<T> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has the wrong length");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn entries(&self) -> &[T] {
        &self.data
    }
    pub fn into_entries(self) -> Vec<T> {
        self.data
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<U, E>(&self, f: impl FnMut(&T) -> Result<U, E>) -> Result<Matrix<U>, E> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl<T: Clone> Matrix<T> {
    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }
}

impl<T: Ring> Matrix<T> {
    pub fn zeros_like(proto: &T, rows: usize, cols: usize) -> Self {
        let z = proto.zero_like();
        Matrix::from_fn(rows, cols, |_, _| z.clone())
    }

    pub fn identity_like(proto: &T, n: usize) -> Self {
        let (z, o) = (proto.zero_like(), proto.one_like());
        Matrix::from_fn(n, n, |i, j| if i == j { o.clone() } else { z.clone() })
    }

    pub fn scalar_like(s: &T, n: usize) -> Self {
        let z = s.zero_like();
        Matrix::from_fn(n, n, |i, j| if i == j { s.clone() } else { z.clone() })
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let proto = self.data.first().or(other.data.first()).expect("empty matrix product");
        let z = proto.zero_like();
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = z.clone();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                acc = acc.plus(&a.times(other.get(k, j)));
            }
            acc
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).plus(other.get(i, j)))
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).minus(other.get(i, j)))
    }

    pub fn neg(&self) -> Self {
        self.map(|x| x.negate())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| s.times(x))
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = v[0].zero_like();
                for (k, x) in v.iter().enumerate() {
                    acc = acc.plus(&self.get(i, k).times(x));
                }
                acc
            })
            .collect()
    }

    pub fn trace(&self) -> T {
        assert!(self.is_square());
        let mut acc = self.data[0].zero_like();
        for i in 0..self.rows {
            acc = acc.plus(self.get(i, i));
        }
        acc
    }

    /// Determinant by cofactor expansion; meant for the small dimensions
    /// used throughout (d ≤ 4 in practice).
    pub fn det(&self) -> T {
        assert!(self.is_square());
        let n = self.rows;
        match n {
            0 => panic!("determinant of an empty matrix"),
            1 => self.data[0].clone(),
            2 => self
                .get(0, 0)
                .times(self.get(1, 1))
                .minus(&self.get(0, 1).times(self.get(1, 0))),
            _ => {
                let mut acc = self.data[0].zero_like();
                for j in 0..n {
                    let a = self.get(0, j);
                    if a.is_zero() {
                        continue;
                    }
                    let t = a.times(&self.minor(0, j).det());
                    acc = if j % 2 == 0 { acc.plus(&t) } else { acc.minus(&t) };
                }
                acc
            }
        }
    }

    pub fn minor(&self, r: usize, c: usize) -> Self {
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in (0..self.rows).filter(|&i| i != r) {
            for j in (0..self.cols).filter(|&j| j != c) {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix::from_vec(self.rows - 1, self.cols - 1, data)
    }

    /// Adjugate matrix; A·adj(A) = det(A)·I.
    pub fn adjugate(&self) -> Self {
        let n = self.rows;
        if n == 1 {
            return Matrix::identity_like(&self.data[0], 1);
        }
        Matrix::from_fn(n, n, |i, j| {
            let m = self.minor(j, i).det();
            if (i + j) % 2 == 0 {
                m
            } else {
                m.negate()
            }
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut r = Matrix::identity_like(&self.data[0], self.rows);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicContext;

    #[test]
    fn det_and_adjugate() {
        let ctx = PadicContext::qp(7, 6).unwrap();
        let m = Matrix::from_fn(3, 3, |i, j| PadicElement::from_int(&ctx, (i * 3 + j * j + 1) as i64));
        let d = m.det();
        let prod = m.mul(&m.adjugate());
        assert_eq!(prod, Matrix::scalar_like(&d, 3));
        assert_eq!(m.transpose().det(), d);
    }
}
