//! Dense matrices over any [`RingOps`] type. Matrices act on column vectors.

use std::fmt;

use crate::error::{Error, Result};
use crate::ring_core::RingOps;

#[derive(Clone, PartialEq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: RingOps> Matrix<E> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![E::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, E::one());
        }
        m
    }

    pub fn scalar(n: usize, a: &E) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, a.clone());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Build with explicit shape, so empty matrices keep their dimensions.
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn column(v: Vec<E>) -> Self {
        Matrix { rows: v.len(), cols: 1, data: v }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<E> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn map<F: RingOps>(&self, f: impl Fn(&E) -> F) -> Matrix<F> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<F: RingOps>(&self, f: impl Fn(&E) -> Result<F>) -> Result<Matrix<F>> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Conjugate transpose, the matrix of the dual map.
    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn neg(&self) -> Self {
        self.map(|x| x.neg())
    }

    pub fn scale(&self, a: &E) -> Self {
        self.map(|x| a.mul(x))
    }

    pub fn signed(&self, sign: i64) -> Self {
        if sign >= 0 {
            self.clone()
        } else {
            self.neg()
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        if self.shape() != o.shape() {
            return Err(Error::Shape(format!("add {:?} + {:?}", self.shape(), o.shape())));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("matrix add shape")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::Shape(format!("mul {:?} * {:?}", self.shape(), o.shape())));
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).add(&a.mul(b));
                    out.set(i, j, cur);
                }
            }
        }
        Ok(out)
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("matrix mul shape")
    }

    pub fn mul_vec(&self, v: &[E]) -> Vec<E> {
        assert_eq!(v.len(), self.cols, "matrix-vector shape");
        (0..self.rows)
            .map(|i| {
                let mut acc = E::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc = acc.add(&a.mul(x));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let cols: Vec<usize> = (0..self.cols).collect();
        self.submatrix(rows, &cols)
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.submatrix(&rows, cols)
    }

    /// Place blocks into a grid; `row_sizes`/`col_sizes` fix the shape even when
    /// some blocks are absent.
    pub fn block(row_sizes: &[usize], col_sizes: &[usize], blocks: &[(usize, usize, Matrix<E>)]) -> Self {
        let r0: Vec<usize> = prefix(row_sizes);
        let c0: Vec<usize> = prefix(col_sizes);
        let mut out = Self::zeros(r0[row_sizes.len()], c0[col_sizes.len()]);
        for (bi, bj, m) in blocks {
            assert_eq!(m.shape(), (row_sizes[*bi], col_sizes[*bj]), "block ({bi},{bj}) shape");
            for i in 0..m.rows {
                for j in 0..m.cols {
                    out.set(r0[*bi] + i, c0[*bj] + j, m.get(i, j).clone());
                }
            }
        }
        out
    }

    pub fn hstack(&self, o: &Self) -> Self {
        assert_eq!(self.rows, o.rows);
        Self::from_fn(self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                o.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.cols);
        Self::from_fn(self.rows + o.rows, self.cols, |i, j| {
            if i < self.rows {
                self.get(i, j).clone()
            } else {
                o.get(i - self.rows, j).clone()
            }
        })
    }

    pub fn direct_sum(&self, o: &Self) -> Self {
        Self::block(&[self.rows, o.rows], &[self.cols, o.cols], &[(0, 0, self.clone()), (1, 1, o.clone())])
    }

    /// Kronecker-style substitution: each entry becomes a d x d block.
    pub fn expand_blocks<F: RingOps>(&self, d: usize, f: impl Fn(&E) -> Result<Matrix<F>>) -> Result<Matrix<F>> {
        let mut out = Matrix::zeros(self.rows * d, self.cols * d);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.get(i, j);
                if e.is_zero() {
                    continue;
                }
                let b = f(e)?;
                for a in 0..d {
                    for c in 0..d {
                        out.set(i * d + a, j * d + c, b.get(a, c).clone());
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn entries(&self) -> &[E] {
        &self.data
    }

    /// Determinant by cofactor expansion along the first row (small matrices).
    pub fn determinant(&self) -> E {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let idx: Vec<usize> = (0..self.cols).collect();
        self.det_rec(0, &idx)
    }

    fn det_rec(&self, row: usize, cols: &[usize]) -> E {
        if cols.is_empty() {
            return E::one();
        }
        let mut acc = E::zero();
        for (k, &c) in cols.iter().enumerate() {
            let a = self.get(row, c);
            if a.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = a.mul(&self.det_rec(row + 1, &rest));
            acc = if k % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        acc
    }
}

fn prefix(sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0];
    for s in sizes {
        out.push(out.last().unwrap() + s);
    }
    out
}

impl<E: RingOps> fmt::Debug for Matrix<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]({}x{})", self.rows, self.cols)
    }
}
