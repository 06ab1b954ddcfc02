//! Coefficient types that linear maps can be written against once and then
//! evaluated (integers), differentiated into matrices (sparse rows over the
//! input coordinates), or audited (supports of the inputs read).

use num_bigint::BigInt;
use num_traits::Zero;

pub trait Coord: Clone + Send + Sync {
    fn null() -> Self;
    /// `self += c * x`
    fn add_scaled(&mut self, c: &BigInt, x: &Self);
    fn is_null(&self) -> bool;
}

impl Coord for BigInt {
    fn null() -> Self {
        Zero::zero()
    }
    fn add_scaled(&mut self, c: &BigInt, x: &Self) {
        if !c.is_zero() && !x.is_zero() {
            *self += c * x;
        }
    }
    fn is_null(&self) -> bool {
        self.is_zero()
    }
}

/// A linear form in input coordinates: sorted `(input index, coefficient)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseRow(pub Vec<(usize, BigInt)>);

impl SparseRow {
    pub fn basis(i: usize) -> Self {
        SparseRow(vec![(i, BigInt::from(1))])
    }
}

impl Coord for SparseRow {
    fn null() -> Self {
        SparseRow(Vec::new())
    }
    fn add_scaled(&mut self, c: &BigInt, x: &Self) {
        if c.is_zero() || x.0.is_empty() {
            return;
        }
        let mut out = Vec::with_capacity(self.0.len() + x.0.len());
        let (a, b) = (&self.0, &x.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, c * &b[j].1));
                j += 1;
            } else {
                let v = &a[i].1 + c * &b[j].1;
                if !v.is_zero() {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        self.0 = out;
    }
    fn is_null(&self) -> bool {
        self.0.is_empty()
    }
}

/// The set of input coordinates an output depends on, ignoring
/// cancellation. Used to audit which entries a map reads.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Support(pub Vec<usize>);

impl Coord for Support {
    fn null() -> Self {
        Support(Vec::new())
    }
    fn add_scaled(&mut self, c: &BigInt, x: &Self) {
        if c.is_zero() || x.0.is_empty() {
            return;
        }
        let mut out = Vec::with_capacity(self.0.len() + x.0.len());
        let (a, b) = (&self.0, &x.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i] < b[j]) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j] < a[i] {
                out.push(b[j]);
                j += 1;
            } else {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
        self.0 = out;
    }
    fn is_null(&self) -> bool {
        self.0.is_empty()
    }
}

/// Input vector whose entry `i` is the `i`-th coordinate form.
pub fn symbolic_inputs(len: usize) -> Vec<SparseRow> {
    (0..len).map(SparseRow::basis).collect()
}

/// Dense matrix (row-major, `rows × cols`) from sparse output rows.
pub fn rows_to_matrix(rows: &[SparseRow], cols: usize) -> crate::matrix::Matrix {
    let mut m = crate::matrix::Matrix::zeros(rows.len(), cols);
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in &row.0 {
            m[(i, *j)] = v.clone();
        }
    }
    m
}
