//! Base-ring aware solvers and subquotients `ker A / im B` built on the
//! Smith normal form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::doc::{ints, Int};
use crate::error::{Error, Result};
use crate::linalg::{EuclideanRing, Infeasibility, Integers, PrimeField, Smith, SmithOptions, SolveOutcome};
use crate::matrix::Matrix;
use crate::ring::BaseRing;

/// Free rank and torsion of a cohomology group, with optional
/// representative cocycles (one per generator: torsion first, then free).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyResult {
    pub degree: usize,
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
    pub representatives: Vec<Vec<BigInt>>,
}

impl CohomologyResult {
    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// `rank=<r> torsion=[d1,d2,...]`
    pub fn summary(&self) -> String {
        let t: Vec<String> = self.torsion.iter().map(ToString::to_string).collect();
        format!("rank={} torsion=[{}]", self.free_rank, t.join(","))
    }

    pub fn to_document(&self) -> CohomologyDocument {
        CohomologyDocument {
            degree: self.degree,
            rank: self.free_rank,
            torsion: ints(&self.torsion),
            representatives: self.representatives.iter().map(|r| ints(r)).collect(),
        }
    }
}

impl fmt::Display for CohomologyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CohomologyDocument {
    pub degree: usize,
    pub rank: usize,
    pub torsion: Vec<Int>,
    pub representatives: Vec<Vec<Int>>,
}

/// The set of solutions of `A x = b`, or a proof there are none.
#[derive(Clone, Debug)]
pub enum Solve {
    Solution(Vec<BigInt>),
    Infeasible(Infeasibility),
}

trait SolverOps: Send + Sync {
    fn solve(&self, b: &[BigInt]) -> Result<Solve>;
    fn kernel_basis(&self) -> Vec<Vec<BigInt>>;
    fn rank(&self) -> usize;
}

struct Solver<R: EuclideanRing> {
    smith: Smith<R>,
    fractions: bool,
}

impl<R: EuclideanRing + 'static> SolverOps for Solver<R> {
    fn solve(&self, b: &[BigInt]) -> Result<Solve> {
        let ring = self.smith.ring();
        let b: Vec<R::Elem> = b.iter().map(|v| ring.from_bigint(v)).collect();
        match self.smith.solve(&b, self.fractions) {
            Ok(SolveOutcome::Solution(x)) => Ok(Solve::Solution(x)),
            Ok(SolveOutcome::Infeasible(cert)) => Ok(Solve::Infeasible(cert)),
            Err(()) => Err(Error::NonIntegral),
        }
    }

    fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        let ring = self.smith.ring();
        self.smith.kernel_basis().iter().map(|v| v.iter().map(|x| ring.to_bigint(x)).collect()).collect()
    }

    fn rank(&self) -> usize {
        self.smith.rank()
    }
}

/// A factored matrix ready for repeated exact solves.
pub struct LinearSystem {
    base: BaseRing,
    rows: usize,
    cols: usize,
    inner: Box<dyn SolverOps>,
}

impl fmt::Debug for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearSystem({}x{} over {})", self.rows, self.cols, self.base)
    }
}

impl LinearSystem {
    pub fn new(base: BaseRing, a: &Matrix) -> Self {
        let inner: Box<dyn SolverOps> = match base {
            BaseRing::IntegersMod(p) => Box::new(Solver {
                smith: Smith::from_bigint_matrix(&PrimeField::new(p), a, SmithOptions::BOTH),
                fractions: false,
            }),
            BaseRing::Integers | BaseRing::Rationals => Box::new(Solver {
                smith: Smith::from_bigint_matrix(&Integers, a, SmithOptions::BOTH),
                fractions: base == BaseRing::Rationals,
            }),
        };
        Self { base, rows: a.rows(), cols: a.cols(), inner }
    }

    pub fn base(&self) -> BaseRing {
        self.base
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.inner.rank()
    }

    /// Solves `A x = b`. Over `Q`, a system solvable only with denominators
    /// yields [`Error::NonIntegral`].
    pub fn solve(&self, b: &[BigInt]) -> Result<Solve> {
        if b.len() != self.rows {
            return Err(Error::Internal(format!("right-hand side has length {}, expected {}", b.len(), self.rows)));
        }
        self.inner.solve(b)
    }

    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        self.inner.kernel_basis()
    }
}

trait SubquotientOps: Send + Sync {
    fn result(&self, degree: usize) -> CohomologyResult;
    fn class_of(&self, z: &[BigInt]) -> Option<Vec<BigInt>>;
    fn representative(&self, coords: &[BigInt]) -> Vec<BigInt>;
    fn generators(&self) -> usize;
}

struct Sub<R: EuclideanRing> {
    outgoing: Smith<R>,
    coords: Smith<R>,
    dim: usize,
    /// Surviving coordinates of `U_Y w`: position and modulus (torsion).
    keep: Vec<(usize, Option<BigInt>)>,
}

impl<R: EuclideanRing + 'static> Sub<R> {
    fn new(ring: &R, outgoing: &Matrix, incoming: &Matrix, fractions: bool) -> Result<Self> {
        let dim = outgoing.cols();
        let a = Smith::from_bigint_matrix(ring, outgoing, SmithOptions::RIGHT);
        let rank_a = a.rank();
        let k = dim - rank_a;
        let mut y_rows: Vec<Vec<R::Elem>> = vec![Vec::with_capacity(incoming.cols()); k];
        for j in 0..incoming.cols() {
            let mut col: Vec<R::Elem> = incoming.column(j).iter().map(|v| ring.from_bigint(v)).collect();
            a.apply_right_inverse(&mut col);
            if col[..rank_a].iter().any(|v| !ring.is_zero(v)) {
                return Err(Error::Internal("image of the incoming map is not inside the kernel".into()));
            }
            for (row, v) in y_rows.iter_mut().zip(col.drain(rank_a..)) {
                row.push(v);
            }
        }
        let y = Smith::compute(ring, y_rows, incoming.cols(), SmithOptions::LEFT);
        let mut keep = Vec::new();
        for (i, d) in y.invariants().iter().enumerate() {
            if !fractions && !ring.is_unit(d) {
                keep.push((i, Some(ring.to_bigint(d))));
            }
        }
        keep.extend((y.rank()..k).map(|i| (i, None)));
        Ok(Self { outgoing: a, coords: y, dim, keep })
    }
}

impl<R: EuclideanRing + 'static> SubquotientOps for Sub<R> {
    fn result(&self, degree: usize) -> CohomologyResult {
        let torsion: Vec<BigInt> = self.keep.iter().filter_map(|(_, m)| m.clone()).collect();
        let free_rank = self.keep.len() - torsion.len();
        let representatives = (0..self.keep.len())
            .map(|g| {
                let mut c = vec![BigInt::zero(); self.keep.len()];
                c[g] = BigInt::from(1);
                self.representative(&c)
            })
            .collect();
        CohomologyResult { degree, free_rank, torsion, representatives }
    }

    fn class_of(&self, z: &[BigInt]) -> Option<Vec<BigInt>> {
        let ring = self.outgoing.ring();
        let rank_a = self.outgoing.rank();
        let mut u: Vec<R::Elem> = z.iter().map(|v| ring.from_bigint(v)).collect();
        self.outgoing.apply_right_inverse(&mut u);
        if u[..rank_a].iter().any(|v| !ring.is_zero(v)) {
            return None;
        }
        let mut w = u.split_off(rank_a);
        self.coords.apply_left(&mut w);
        Some(
            self.keep
                .iter()
                .map(|(i, m)| {
                    let c = ring.to_bigint(&w[*i]);
                    match m {
                        Some(m) => c.mod_floor(m),
                        None => c,
                    }
                })
                .collect(),
        )
    }

    fn representative(&self, coords: &[BigInt]) -> Vec<BigInt> {
        let ring = self.outgoing.ring();
        let rank_a = self.outgoing.rank();
        let mut c = vec![ring.zero(); self.dim - rank_a];
        for ((i, _), v) in self.keep.iter().zip(coords) {
            c[*i] = ring.from_bigint(v);
        }
        self.coords.apply_left_inverse(&mut c);
        let mut u = vec![ring.zero(); rank_a];
        u.extend(c);
        self.outgoing.apply_right(&mut u);
        u.iter().map(|v| ring.to_bigint(v)).collect()
    }

    fn generators(&self) -> usize {
        self.keep.len()
    }
}

/// `ker A / im B` for composable `B: C^{n-1} -> C^n`, `A: C^n -> C^{n+1}`
/// with `A B = 0`, plus class coordinates of cocycles.
///
/// Class coordinates are canonical: two cocycles are cohomologous exactly
/// when their coordinates agree (torsion coordinates are reduced to
/// `[0, d)`).
pub struct Subquotient {
    base: BaseRing,
    degree: usize,
    inner: Box<dyn SubquotientOps>,
}

impl fmt::Debug for Subquotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subquotient(degree {} over {})", self.degree, self.base)
    }
}

impl Subquotient {
    pub fn new(base: BaseRing, degree: usize, outgoing: &Matrix, incoming: &Matrix) -> Result<Self> {
        if outgoing.cols() != incoming.rows() {
            return Err(Error::Internal("incompatible differential shapes".into()));
        }
        let inner: Box<dyn SubquotientOps> = match base {
            BaseRing::IntegersMod(p) => Box::new(Sub::new(&PrimeField::new(p), outgoing, incoming, false)?),
            BaseRing::Integers => Box::new(Sub::new(&Integers, outgoing, incoming, false)?),
            BaseRing::Rationals => Box::new(Sub::new(&Integers, outgoing, incoming, true)?),
        };
        Ok(Self { base, degree, inner })
    }

    pub fn base(&self) -> BaseRing {
        self.base
    }

    pub fn result(&self) -> CohomologyResult {
        self.inner.result(self.degree)
    }

    /// Number of class coordinates (torsion generators, then free ones).
    pub fn generators(&self) -> usize {
        self.inner.generators()
    }

    /// Class coordinates of `z`, or `None` when `z` is not a cocycle.
    pub fn class_of(&self, z: &[BigInt]) -> Option<Vec<BigInt>> {
        self.inner.class_of(z)
    }

    pub fn is_coboundary(&self, z: &[BigInt]) -> Option<bool> {
        self.class_of(z).map(|c| c.iter().all(Zero::is_zero))
    }

    /// A cocycle with the given class coordinates.
    pub fn representative(&self, coords: &[BigInt]) -> Vec<BigInt> {
        self.inner.representative(coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect())
    }

    #[test]
    fn cyclic_group_of_order_two() {
        // 0 -> Z --2--> Z -> 0: H = Z/2 over Z, 0 over Q, Z/2 over F_2
        let a = Matrix::zeros(1, 1);
        let b = m(&[&[2]]);
        let z = Subquotient::new(BaseRing::Integers, 1, &a, &b).unwrap().result();
        assert_eq!((z.free_rank, z.torsion.clone()), (0, vec![BigInt::from(2)]));
        let q = Subquotient::new(BaseRing::Rationals, 1, &a, &b).unwrap().result();
        assert!(q.is_zero());
        let f = Subquotient::new(BaseRing::IntegersMod(2), 1, &a, &b).unwrap().result();
        assert_eq!((f.free_rank, f.torsion.len()), (1, 0));
    }

    #[test]
    fn class_coordinates_detect_coboundaries() {
        // C^1 = Z^2, A = [1 -1], B = [[1],[1]]: ker A = <(1,1)> = im B
        let a = m(&[&[1, -1]]);
        let b = m(&[&[1], &[1]]);
        let s = Subquotient::new(BaseRing::Integers, 1, &a, &b).unwrap();
        assert!(s.result().is_zero());
        assert_eq!(s.is_coboundary(&[BigInt::from(3), BigInt::from(3)]), Some(true));
        assert_eq!(s.class_of(&[BigInt::from(1), BigInt::from(0)]), None);
    }

    #[test]
    fn representatives_round_trip() {
        let a = Matrix::zeros(1, 3);
        let b = m(&[&[2, 0], &[0, 0], &[0, 0]]);
        let s = Subquotient::new(BaseRing::Integers, 1, &a, &b).unwrap();
        let r = s.result();
        assert_eq!(r.free_rank, 2);
        assert_eq!(r.torsion, vec![BigInt::from(2)]);
        for (g, rep) in r.representatives.iter().enumerate() {
            let c = s.class_of(rep).unwrap();
            for (i, v) in c.iter().enumerate() {
                assert_eq!(*v, BigInt::from((i == g) as i64));
            }
        }
    }
}
