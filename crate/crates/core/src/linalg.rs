//! Exact linear algebra over Euclidean rings: Smith normal form with
//! recorded transformations, linear solves with infeasibility certificates,
//! kernels, and subquotient (cohomology) computations.
//!
//! Two rings are provided: [`Integers`] (arbitrary precision) and
//! [`PrimeField`]. Over a field the Smith form degenerates to Gaussian
//! elimination with all invariants units.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::matrix::Matrix;

pub trait EuclideanRing: Clone + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn is_unit(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Euclidean comparison of nonzero elements: is `a` strictly smaller than `b`?
    fn smaller(&self, a: &Self::Elem, b: &Self::Elem) -> bool;
    /// `a = q b + r` with `r` zero or smaller than `b`.
    fn div_rem(&self, a: &Self::Elem, b: &Self::Elem) -> (Self::Elem, Self::Elem);
    /// Unit `u` (with inverse) such that `u * a` is the preferred associate.
    fn normalizing_unit(&self, a: &Self::Elem) -> (Self::Elem, Self::Elem);
    fn from_bigint(&self, v: &BigInt) -> Self::Elem;
    fn to_bigint(&self, a: &Self::Elem) -> BigInt;

    /// `target += c * x`
    fn add_mul_assign(&self, target: &mut Self::Elem, c: &Self::Elem, x: &Self::Elem) {
        *target = self.add(target, &self.mul(c, x));
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
}

/// The integers with arbitrary precision.
#[derive(Clone, Copy, Debug, Default)]
pub struct Integers;

impl EuclideanRing for Integers {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn is_unit(&self, a: &BigInt) -> bool {
        a.magnitude().is_one()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn smaller(&self, a: &BigInt, b: &BigInt) -> bool {
        a.magnitude() < b.magnitude()
    }
    fn div_rem(&self, a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
        let (mut q, mut r) = a.div_mod_floor(b);
        if (&r << 1u32).magnitude() > b.magnitude() {
            r -= b;
            q += 1;
        }
        (q, r)
    }
    fn normalizing_unit(&self, a: &BigInt) -> (BigInt, BigInt) {
        if a.is_negative() {
            (-BigInt::one(), -BigInt::one())
        } else {
            (BigInt::one(), BigInt::one())
        }
    }
    fn from_bigint(&self, v: &BigInt) -> BigInt {
        v.clone()
    }
    fn to_bigint(&self, a: &BigInt) -> BigInt {
        a.clone()
    }
    fn add_mul_assign(&self, target: &mut BigInt, c: &BigInt, x: &BigInt) {
        if c.is_one() {
            *target += x;
        } else if c.is_zero() || x.is_zero() {
        } else if (-c).is_one() {
            *target -= x;
        } else {
            *target += c * x;
        }
    }
}

/// `Z/p` for a prime `p < 2^32`.
#[derive(Clone, Copy, Debug)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        assert!(is_prime(p) && p < (1 << 32), "modulus {p} must be a prime below 2^32");
        Self { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a % self.p != 0, "zero has no inverse");
        let mut result = 1u64;
        let mut base = a % self.p;
        let mut e = self.p - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        result
    }
}

impl EuclideanRing for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn is_unit(&self, a: &u64) -> bool {
        *a != 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a % self.p) % self.p
    }
    fn smaller(&self, _a: &u64, _b: &u64) -> bool {
        false
    }
    fn div_rem(&self, a: &u64, b: &u64) -> (u64, u64) {
        (self.mul(a, &self.inv(*b)), 0)
    }
    fn normalizing_unit(&self, a: &u64) -> (u64, u64) {
        (self.inv(*a), *a)
    }
    fn from_bigint(&self, v: &BigInt) -> u64 {
        v.mod_floor(&BigInt::from(self.p)).to_u64().expect("residue fits")
    }
    fn to_bigint(&self, a: &u64) -> BigInt {
        BigInt::from(*a)
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, Debug)]
enum Op<E> {
    Swap(usize, usize),
    /// line `dst` += c * line `src`
    Add { dst: usize, src: usize, c: E },
    /// line `idx` *= u
    Scale { idx: usize, u: E, u_inv: E },
}

/// Which transformation logs to keep.
#[derive(Clone, Copy, Debug, Default)]
pub struct SmithOptions {
    pub track_left: bool,
    pub track_right: bool,
}

impl SmithOptions {
    pub const NONE: Self = Self { track_left: false, track_right: false };
    pub const BOTH: Self = Self { track_left: true, track_right: true };
    pub const RIGHT: Self = Self { track_left: false, track_right: true };
    pub const LEFT: Self = Self { track_left: true, track_right: false };
}

/// `U * A * V = D` with `D` diagonal, `d_1 | d_2 | ...`.
///
/// `U` and `V` are never stored; they are kept as logs of elementary
/// operations and applied to vectors on demand.
#[derive(Clone, Debug)]
pub struct Smith<R: EuclideanRing> {
    ring: R,
    rows: usize,
    cols: usize,
    diag: Vec<R::Elem>,
    left: Option<Vec<Op<R::Elem>>>,
    right: Option<Vec<Op<R::Elem>>>,
}

/// Why `A x = b` has no solution: `functional` is a row vector `w` with
/// `w A = 0` (mod `modulus` when present) but `w b != 0` (mod `modulus`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Infeasibility {
    pub functional: Vec<BigInt>,
    pub modulus: Option<BigInt>,
}

impl Infeasibility {
    /// Checks the certificate against the system it claims to refute.
    pub fn verify(&self, columns: &[Vec<BigInt>], rhs: &[BigInt], field_modulus: Option<u64>) -> bool {
        let modulus = match (&self.modulus, field_modulus) {
            (Some(m), _) => Some(m.clone()),
            (None, Some(p)) => Some(BigInt::from(p)),
            (None, None) => None,
        };
        let reduce = |v: BigInt| match &modulus {
            Some(m) => v.mod_floor(m),
            None => v,
        };
        let pair = |col: &[BigInt]| reduce(col.iter().zip(&self.functional).map(|(a, w)| a * w).sum());
        columns.iter().all(|c| pair(c).is_zero()) && !pair(rhs).is_zero()
    }
}

#[derive(Clone, Debug)]
pub enum SolveOutcome {
    Solution(Vec<BigInt>),
    Infeasible(Infeasibility),
}

impl<R: EuclideanRing> Smith<R> {
    pub fn compute(ring: &R, matrix: Vec<Vec<R::Elem>>, cols: usize, options: SmithOptions) -> Self {
        let rows = matrix.len();
        let mut calc = Calc {
            ring: ring.clone(),
            a: matrix,
            rows,
            cols,
            left: options.track_left.then(Vec::new),
            right: options.track_right.then(Vec::new),
        };
        let diag = calc.run();
        Smith { ring: ring.clone(), rows, cols, diag, left: calc.left, right: calc.right }
    }

    pub fn from_bigint_matrix(ring: &R, m: &Matrix, options: SmithOptions) -> Self {
        let rows = (0..m.rows()).map(|i| m.row(i).iter().map(|v| ring.from_bigint(v)).collect()).collect();
        Self::compute(ring, rows, m.cols(), options)
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    /// Nonzero diagonal entries of `D`.
    pub fn invariants(&self) -> &[R::Elem] {
        &self.diag
    }

    fn left_ops(&self) -> &[Op<R::Elem>] {
        self.left.as_deref().expect("left transformation was not tracked")
    }

    fn right_ops(&self) -> &[Op<R::Elem>] {
        self.right.as_deref().expect("right transformation was not tracked")
    }

    /// `U v`
    pub fn apply_left(&self, v: &mut [R::Elem]) {
        let r = &self.ring;
        for op in self.left_ops() {
            match op {
                Op::Swap(i, j) => v.swap(*i, *j),
                Op::Add { dst, src, c } => {
                    let s = v[*src].clone();
                    r.add_mul_assign(&mut v[*dst], c, &s);
                }
                Op::Scale { idx, u, .. } => v[*idx] = r.mul(u, &v[*idx]),
            }
        }
    }

    /// `U^{-1} v`
    pub fn apply_left_inverse(&self, v: &mut [R::Elem]) {
        let r = &self.ring;
        for op in self.left_ops().iter().rev() {
            match op {
                Op::Swap(i, j) => v.swap(*i, *j),
                Op::Add { dst, src, c } => {
                    let s = v[*src].clone();
                    r.add_mul_assign(&mut v[*dst], &r.neg(c), &s);
                }
                Op::Scale { idx, u_inv, .. } => v[*idx] = r.mul(u_inv, &v[*idx]),
            }
        }
    }

    /// `U^T v`
    pub fn apply_left_transpose(&self, v: &mut [R::Elem]) {
        let r = &self.ring;
        for op in self.left_ops().iter().rev() {
            match op {
                Op::Swap(i, j) => v.swap(*i, *j),
                Op::Add { dst, src, c } => {
                    let d = v[*dst].clone();
                    r.add_mul_assign(&mut v[*src], c, &d);
                }
                Op::Scale { idx, u, .. } => v[*idx] = r.mul(u, &v[*idx]),
            }
        }
    }

    /// `V y`
    pub fn apply_right(&self, y: &mut [R::Elem]) {
        let r = &self.ring;
        for op in self.right_ops().iter().rev() {
            match op {
                Op::Swap(i, j) => y.swap(*i, *j),
                Op::Add { dst, src, c } => {
                    let d = y[*dst].clone();
                    r.add_mul_assign(&mut y[*src], c, &d);
                }
                Op::Scale { idx, u, .. } => y[*idx] = r.mul(u, &y[*idx]),
            }
        }
    }

    /// `V^{-1} x`
    pub fn apply_right_inverse(&self, x: &mut [R::Elem]) {
        let r = &self.ring;
        for op in self.right_ops() {
            match op {
                Op::Swap(i, j) => x.swap(*i, *j),
                Op::Add { dst, src, c } => {
                    let d = x[*dst].clone();
                    r.add_mul_assign(&mut x[*src], &r.neg(c), &d);
                }
                Op::Scale { idx, u_inv, .. } => x[*idx] = r.mul(u_inv, &x[*idx]),
            }
        }
    }

    fn unit_vector(&self, len: usize, i: usize) -> Vec<R::Elem> {
        let mut v = vec![self.ring.zero(); len];
        v[i] = self.ring.one();
        v
    }

    /// Columns `V e_j` for `j >= rank`: a basis of the kernel.
    pub fn kernel_basis(&self) -> Vec<Vec<R::Elem>> {
        (self.rank()..self.cols)
            .map(|j| {
                let mut v = self.unit_vector(self.cols, j);
                self.apply_right(&mut v);
                v
            })
            .collect()
    }

    /// Solves `A x = b`. Requires both transformations.
    ///
    /// `allow_fractions` treats every nonzero invariant as invertible (used
    /// for rational solvability); a solution that then needs denominators is
    /// reported as `Err(())`.
    pub fn solve(&self, b: &[R::Elem], allow_fractions: bool) -> Result<SolveOutcome, ()> {
        let r = &self.ring;
        let mut c = b.to_vec();
        self.apply_left(&mut c);
        let mut y = vec![r.zero(); self.cols];
        let mut fractional = false;
        for (i, d) in self.diag.iter().enumerate() {
            let (q, rem) = r.div_rem(&c[i], d);
            if !r.is_zero(&rem) {
                if allow_fractions {
                    fractional = true;
                    continue;
                }
                return Ok(SolveOutcome::Infeasible(self.certificate(i, Some(r.to_bigint(d)))));
            }
            y[i] = q;
        }
        for i in self.rank()..self.rows {
            if !r.is_zero(&c[i]) {
                return Ok(SolveOutcome::Infeasible(self.certificate(i, None)));
            }
        }
        if fractional {
            return Err(());
        }
        self.apply_right(&mut y);
        Ok(SolveOutcome::Solution(y.iter().map(|v| r.to_bigint(v)).collect()))
    }

    fn certificate(&self, i: usize, modulus: Option<BigInt>) -> Infeasibility {
        let mut w = self.unit_vector(self.rows, i);
        self.apply_left_transpose(&mut w);
        Infeasibility { functional: w.iter().map(|v| self.ring.to_bigint(v)).collect(), modulus }
    }

    /// Explicit `(U, V)` as integer matrices.
    pub fn transforms(&self) -> (Matrix, Matrix) {
        let mut u = Matrix::zeros(self.rows, self.rows);
        for j in 0..self.rows {
            let mut v = self.unit_vector(self.rows, j);
            self.apply_left(&mut v);
            for (i, x) in v.iter().enumerate() {
                u[(i, j)] = self.ring.to_bigint(x);
            }
        }
        let mut vm = Matrix::zeros(self.cols, self.cols);
        for j in 0..self.cols {
            let mut v = self.unit_vector(self.cols, j);
            self.apply_right(&mut v);
            for (i, x) in v.iter().enumerate() {
                vm[(i, j)] = self.ring.to_bigint(x);
            }
        }
        (u, vm)
    }

    /// `D` as an integer matrix of the original shape.
    pub fn diagonal_matrix(&self) -> Matrix {
        let mut d = Matrix::zeros(self.rows, self.cols);
        for (i, v) in self.diag.iter().enumerate() {
            d[(i, i)] = self.ring.to_bigint(v);
        }
        d
    }
}

struct Calc<R: EuclideanRing> {
    ring: R,
    a: Vec<Vec<R::Elem>>,
    rows: usize,
    cols: usize,
    left: Option<Vec<Op<R::Elem>>>,
    right: Option<Vec<Op<R::Elem>>>,
}

impl<R: EuclideanRing> Calc<R> {
    fn run(&mut self) -> Vec<R::Elem> {
        let mut diag = Vec::new();
        let limit = self.rows.min(self.cols);
        for t in 0..limit {
            let Some((pi, pj)) = self.find_pivot(t) else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            self.reduce_pivot(t);
            let (u, u_inv) = self.ring.normalizing_unit(&self.a[t][t]);
            if u != self.ring.one() {
                self.a[t][t] = self.ring.mul(&u, &self.a[t][t]);
                if let Some(log) = &mut self.left {
                    log.push(Op::Scale { idx: t, u, u_inv });
                }
            }
            diag.push(self.a[t][t].clone());
        }
        diag
    }

    fn find_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let r = &self.ring;
        let mut best: Option<(usize, usize)> = None;
        for j in t..self.cols {
            for i in t..self.rows {
                let v = &self.a[i][j];
                if r.is_zero(v) {
                    continue;
                }
                if r.is_unit(v) {
                    return Some((i, j));
                }
                match best {
                    Some((bi, bj)) if !r.smaller(v, &self.a[bi][bj]) => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap(i, j);
            if let Some(log) = &mut self.left {
                log.push(Op::Swap(i, j));
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for row in &mut self.a {
                row.swap(i, j);
            }
            if let Some(log) = &mut self.right {
                log.push(Op::Swap(i, j));
            }
        }
    }

    fn row_add(&mut self, dst: usize, src: usize, c: R::Elem, from_col: usize) {
        let src_entries: Vec<(usize, R::Elem)> = (from_col..self.cols)
            .filter(|&j| !self.ring.is_zero(&self.a[src][j]))
            .map(|j| (j, self.a[src][j].clone()))
            .collect();
        for (j, v) in src_entries {
            self.ring.add_mul_assign(&mut self.a[dst][j], &c, &v);
        }
        if let Some(log) = &mut self.left {
            log.push(Op::Add { dst, src, c });
        }
    }

    fn col_add(&mut self, dst: usize, src: usize, c: R::Elem, rows_nz: &[usize]) {
        for &i in rows_nz {
            let v = self.a[i][src].clone();
            self.ring.add_mul_assign(&mut self.a[i][dst], &c, &v);
        }
        if let Some(log) = &mut self.right {
            log.push(Op::Add { dst, src, c });
        }
    }

    /// Clears row and column `t` and makes the pivot divide the remaining
    /// submatrix.
    fn reduce_pivot(&mut self, t: usize) {
        loop {
            let mut again = false;
            let pivot = self.a[t][t].clone();
            for i in t + 1..self.rows {
                if self.ring.is_zero(&self.a[i][t]) {
                    continue;
                }
                let (q, rem) = self.ring.div_rem(&self.a[i][t], &pivot);
                let c = self.ring.neg(&q);
                self.row_add(i, t, c, t);
                again |= !self.ring.is_zero(&rem);
            }
            let col_nz: Vec<usize> = (t..self.rows).filter(|&i| !self.ring.is_zero(&self.a[i][t])).collect();
            for j in t + 1..self.cols {
                if self.ring.is_zero(&self.a[t][j]) {
                    continue;
                }
                let (q, rem) = self.ring.div_rem(&self.a[t][j], &pivot);
                let c = self.ring.neg(&q);
                self.col_add(j, t, c, &col_nz);
                again |= !self.ring.is_zero(&rem);
            }
            if again {
                self.promote_smallest(t);
                continue;
            }
            if self.ring.is_unit(&pivot) {
                return;
            }
            match self.non_divisible_row(t, &pivot) {
                Some(i) => {
                    let one = self.ring.one();
                    self.row_add(t, i, one, t);
                }
                None => return,
            }
        }
    }

    fn promote_smallest(&mut self, t: usize) {
        let r = &self.ring;
        let mut best = (t, t);
        for i in t + 1..self.rows {
            let v = &self.a[i][t];
            if !r.is_zero(v) && r.smaller(v, &self.a[best.0][best.1]) {
                best = (i, t);
            }
        }
        for j in t + 1..self.cols {
            let v = &self.a[t][j];
            if !r.is_zero(v) && r.smaller(v, &self.a[best.0][best.1]) {
                best = (t, j);
            }
        }
        self.swap_rows(t, best.0);
        self.swap_cols(t, best.1);
    }

    fn non_divisible_row(&self, t: usize, pivot: &R::Elem) -> Option<usize> {
        for i in t + 1..self.rows {
            for j in t + 1..self.cols {
                let v = &self.a[i][j];
                if !self.ring.is_zero(v) && !self.ring.is_zero(&self.ring.div_rem(v, pivot).1) {
                    return Some(i);
                }
            }
        }
        None
    }
}

/// Smith normal form of an integer matrix: `(U, D, V)` with `U M V = D`.
pub fn smith_normal_form(m: &Matrix) -> (Matrix, Matrix, Matrix) {
    let smith = Smith::from_bigint_matrix(&Integers, m, SmithOptions::BOTH);
    let (u, v) = smith.transforms();
    (u, smith.diagonal_matrix(), v)
}

/// Rank of an integer matrix over the rationals.
pub fn rank(m: &Matrix) -> usize {
    Smith::from_bigint_matrix(&Integers, m, SmithOptions::NONE).rank()
}
