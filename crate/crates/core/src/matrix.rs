use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::Zero;

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

/// An additive self-map of a free module; column `j` is the image of `e_j`.
pub type AdditiveMap = Matrix;

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::from(1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[BigInt] {
        &self.data
    }

    pub fn into_data(self) -> Vec<BigInt> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "shape mismatch in application");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &BigInt) -> Matrix {
        self.map(|a| a * c)
    }

    pub fn neg(&self) -> Matrix {
        self.map(|a| -a)
    }

    pub fn map(&self, f: impl Fn(&BigInt) -> BigInt) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, c: &BigInt, other: &Matrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        if c.is_zero() {
            return;
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            if !b.is_zero() {
                *a += c * b;
            }
        }
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(&BigInt, &BigInt) -> BigInt) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// `self * other - other * self`
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        self.mul(other).sub(&other.mul(self))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.rows).map(|i| self.row(i))).finish()
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// An `n`-ary additive map `A^{⊗n} -> A` of a rank-`r` module, stored as an
/// `r × r^n` matrix: row = output coordinate, column = input multi-index
/// with the first slot most significant. For `n = 1` this is the ordinary
/// matrix of the map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilinearMap {
    rank: usize,
    arity: usize,
    table: Matrix,
}

impl MultilinearMap {
    pub fn zero(rank: usize, arity: usize) -> Self {
        Self { rank, arity, table: Matrix::zeros(rank, rank.pow(arity as u32)) }
    }

    pub fn from_matrix(rank: usize, arity: usize, table: Matrix) -> Self {
        assert_eq!((table.rows(), table.cols()), (rank, rank.pow(arity as u32)), "multilinear shape");
        Self { rank, arity, table }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn matrix(&self) -> &Matrix {
        &self.table
    }

    pub fn into_matrix(self) -> Matrix {
        self.table
    }

    pub fn column_of(&self, inputs: &[usize]) -> usize {
        inputs.iter().fold(0, |acc, &i| acc * self.rank + i)
    }

    /// Value on a tuple of basis elements, as a coordinate vector.
    pub fn value(&self, inputs: &[usize]) -> Vec<BigInt> {
        self.table.column(self.column_of(inputs))
    }

    pub fn set_value(&mut self, inputs: &[usize], v: &[BigInt]) {
        let c = self.column_of(inputs);
        for (i, x) in v.iter().enumerate() {
            self.table[(i, c)] = x.clone();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_zero()
    }
}

/// All multi-indices in `[0, r)^n`, first slot most significant.
pub fn multi_indices(r: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = r.pow(n as u32);
    (0..total).map(move |mut c| {
        let mut idx = vec![0; n];
        for slot in idx.iter_mut().rev() {
            *slot = c % r;
            c /= r;
        }
        idx
    })
}
