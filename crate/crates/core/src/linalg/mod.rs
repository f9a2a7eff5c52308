//! Dense matrices over exact rationals or approximate complex scalars.

pub mod dense;
mod scalar;

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

pub use scalar::{mat_list_serde, mat_serde, Residual, Scalar};

use crate::error::{Error, Result};
use crate::qnum::{Cplx, QScalar, Real};

/// Row-major dense matrix.
#[derive(Clone, Debug)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn diag(entries: Vec<S>) -> Self {
        let n = entries.len();
        let mut m = Mat::zeros(n, n);
        for (i, x) in entries.into_iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    /// Matrix unit `e_{ij}` of size `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        m[(i, j)] = S::one();
        m
    }

    pub fn column(v: Vec<S>) -> Self {
        Mat {
            rows: v.len(),
            cols: 1,
            data: v,
        }
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

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn into_data(self) -> Vec<S> {
        self.data
    }

    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn to_cplx(&self) -> Mat<Cplx> {
        self.map(S::to_cplx)
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|x| x.times(s))
    }

    pub fn trace(&self) -> S {
        let mut t = S::zero();
        for i in 0..self.rows.min(self.cols) {
            t = t.plus(&self[(i, i)]);
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn residual(&self) -> Residual {
        S::residual_of(self)
    }

    /// `self * rhs`, skipping zero entries of `self`.
    pub fn matmul(&self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out: Mat<S> = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self.data[i * self.cols + l];
                if a.is_zero() {
                    continue;
                }
                let row = &rhs.data[l * rhs.cols..(l + 1) * rhs.cols];
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(row) {
                    o.add_mul_assign(a, b);
                }
            }
        }
        out
    }

    /// `self - rhs` in place.
    pub fn sub_assign(&mut self, rhs: &Mat<S>) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a = a.minus(b);
        }
    }

    pub fn add_assign(&mut self, rhs: &Mat<S>) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a = a.plus(b);
        }
    }

    /// `self += s * rhs`.
    pub fn add_scaled_assign(&mut self, s: &S, rhs: &Mat<S>) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            a.add_mul_assign(s, b);
        }
    }

    /// `[self, rhs] = self rhs - rhs self`.
    pub fn commutator(&self, rhs: &Mat<S>) -> Mat<S> {
        let mut out = self.matmul(rhs);
        out.sub_assign(&rhs.matmul(self));
        out
    }

    pub fn kron(&self, rhs: &Mat<S>) -> Mat<S> {
        let (r, c) = (self.rows * rhs.rows, self.cols * rhs.cols);
        let mut out = Mat::zeros(r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        let b = &rhs[(k, l)];
                        if !b.is_zero() {
                            out[(i * rhs.rows + k, j * rhs.cols + l)] = a.times(b);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn block_diag(blocks: &[Mat<S>]) -> Mat<S> {
        let r: usize = blocks.iter().map(Mat::rows).sum();
        let c: usize = blocks.iter().map(Mat::cols).sum();
        let mut out = Mat::zeros(r, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            out.set_block(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat<S> {
        Mat::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Mat<S>) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
    }

    pub fn hstack(mats: &[Mat<S>]) -> Mat<S> {
        let r = mats.first().map_or(0, Mat::rows);
        assert!(mats.iter().all(|m| m.rows == r), "hstack row mismatch");
        let c = mats.iter().map(Mat::cols).sum();
        let mut out = Mat::zeros(r, c);
        let mut c0 = 0;
        for m in mats {
            out.set_block(0, c0, m);
            c0 += m.cols;
        }
        out
    }

    pub fn pow(&self, e: u32) -> Mat<S> {
        let mut acc = Mat::identity(self.rows);
        for _ in 0..e {
            acc = acc.matmul(self);
        }
        acc
    }

    /// Inverse by Gauss-Jordan elimination with largest-magnitude pivoting.
    pub fn inverse(&self) -> Result<Mat<S>> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        if self.is_diagonal() {
            let mut out = Mat::zeros(self.rows, self.rows);
            for i in 0..self.rows {
                out[(i, i)] = self[(i, i)]
                    .inverse()
                    .ok_or_else(|| Error::DegenerateInput("singular matrix".into()))?;
            }
            return Ok(out);
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Mat::identity(n);
        for col in 0..n {
            let piv = (col..n)
                .filter(|&r| !a[(r, col)].is_zero())
                .max_by(|&x, &y| a[(x, col)].magnitude().total_cmp(&a[(y, col)].magnitude()))
                .filter(|&r| !a[(r, col)].is_negligible())
                .ok_or_else(|| Error::DegenerateInput("singular matrix".into()))?;
            a.swap_rows(col, piv);
            inv.swap_rows(col, piv);
            let p = a[(col, col)].inverse().expect("nonzero pivot");
            a.scale_row(col, &p);
            inv.scale_row(col, &p);
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].negated();
                a.axpy_row(r, col, &factor);
                inv.axpy_row(r, col, &factor);
            }
        }
        Ok(inv)
    }

    /// Basis of the right kernel, via reduced row echelon form. Exact for
    /// rationals; approximate types treat negligible pivots as zero.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        let (m, n) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..n {
            if row == m {
                break;
            }
            let piv = (row..m)
                .filter(|&r| !a[(r, col)].is_negligible())
                .max_by(|&x, &y| a[(x, col)].magnitude().total_cmp(&a[(y, col)].magnitude()));
            let Some(piv) = piv else { continue };
            a.swap_rows(row, piv);
            let p = a[(row, col)].inverse().expect("nonzero pivot");
            a.scale_row(row, &p);
            for r in 0..m {
                if r != row && !a[(r, col)].is_zero() {
                    let factor = a[(r, col)].negated();
                    a.axpy_row(r, row, &factor);
                }
            }
            pivots.push(col);
            row += 1;
        }
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![S::zero(); n];
                v[fc] = S::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = a[(r, fc)].negated();
                }
                v
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, s: &S) {
        for j in 0..self.cols {
            let x = &mut self.data[r * self.cols + j];
            *x = x.times(s);
        }
    }

    /// `row[dst] += s * row[src]`.
    fn axpy_row(&mut self, dst: usize, src: usize, s: &S) {
        for j in 0..self.cols {
            let b = self.data[src * self.cols + j].clone();
            self.data[dst * self.cols + j].add_mul_assign(s, &b);
        }
    }
}

impl Mat<QScalar> {
    /// Exact rational matrix from integer rows (test and table helper).
    pub fn from_i64_rows(rows: &[&[i64]]) -> Mat<QScalar> {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| QScalar::from_integer(x)).collect())
                .collect(),
        )
        .expect("rectangular rows")
    }
}

impl Mat<Cplx> {
    pub fn frobenius(&self) -> Real {
        let mut acc = Real::zero();
        for x in &self.data {
            acc += &x.norm_sqr();
        }
        acc.sqrt()
    }

    /// Frobenius distance as `f64`.
    pub fn dist(&self, rhs: &Mat<Cplx>) -> f64 {
        let mut d = self.clone();
        d.sub_assign(rhs);
        d.frobenius().to_f64()
    }

    /// `‖self self† - I‖`.
    pub fn unitarity_defect(&self) -> f64 {
        self.matmul(&self.adjoint()).dist(&Mat::identity(self.rows))
    }
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Scalar> Mul for &Mat<S> {
    type Output = Mat<S>;
    fn mul(self, rhs: &Mat<S>) -> Mat<S> {
        self.matmul(rhs)
    }
}

impl<S: Scalar> Add for &Mat<S> {
    type Output = Mat<S>;
    fn add(self, rhs: &Mat<S>) -> Mat<S> {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl<S: Scalar> Sub for &Mat<S> {
    type Output = Mat<S>;
    fn sub(self, rhs: &Mat<S>) -> Mat<S> {
        let mut out = self.clone();
        out.sub_assign(rhs);
        out
    }
}

impl<S: Scalar> Neg for &Mat<S> {
    type Output = Mat<S>;
    fn neg(self) -> Mat<S> {
        self.map(S::negated)
    }
}
