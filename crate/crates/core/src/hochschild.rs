//! The Hochschild complex `C^n(A, A) = Hom(A^{⊗n}, A)` of a finite ring.
//!
//! Cochains use the [`MultilinearMap`] layout flattened row-major: entry
//! `l * r^n + c` is output coordinate `l` on input multi-index `c`.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::cohomology::{CohomologyResult, LinearSystem, Subquotient};
use crate::coord::{rows_to_matrix, symbolic_inputs, Coord};
use crate::error::Result;
use crate::matrix::{multi_indices, Matrix, MultilinearMap};
use crate::ring::FiniteRing;

/// `(b f)(a_1..a_{n+1}) = a_1 f(a_2..) + sum_s (-1)^s f(.., a_s a_{s+1}, ..)
///  + (-1)^{n+1} f(a_1..a_n) a_{n+1}` for `f` of arity `n`.
pub fn differential<C: Coord>(ring: &FiniteRing, arity: usize, f: &[C]) -> Vec<C> {
    let r = ring.rank();
    let in_cols = r.pow(arity as u32);
    let out_cols = in_cols * r;
    assert_eq!(f.len(), r * in_cols, "cochain has the wrong length for its arity");
    let column = |idx: &[usize]| idx.iter().fold(0, |acc, &i| acc * r + i);
    let value = |col: usize| -> Vec<&C> { (0..r).map(|l| &f[l * in_cols + col]).collect() };
    let sign = |s: usize| BigInt::from(if s % 2 == 0 { 1 } else { -1 });

    let columns: Vec<Vec<C>> = multi_indices(r, arity + 1)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|idx| {
            let mut out = vec![C::null(); r];
            let mut add_product = |e: usize, v: &[&C], c: &BigInt| {
                let m = ring.left_mul(e);
                for (l, slot) in out.iter_mut().enumerate() {
                    for (k, x) in v.iter().enumerate() {
                        let coeff = &m[(l, k)];
                        if Zero::is_zero(coeff) {
                            continue;
                        }
                        slot.add_scaled(&(coeff * c), x);
                    }
                }
            };
            add_product(idx[0], &value(column(&idx[1..])), &BigInt::from(1));
            add_product(idx[arity], &value(column(&idx[..arity])), &sign(arity + 1));
            for s in 1..=arity {
                let prod = ring.product(idx[s - 1], idx[s]);
                let mut merged = Vec::with_capacity(arity);
                for (m, mu) in prod.iter().enumerate() {
                    if Zero::is_zero(mu) {
                        continue;
                    }
                    merged.clear();
                    merged.extend_from_slice(&idx[..s - 1]);
                    merged.push(m);
                    merged.extend_from_slice(&idx[s + 1..]);
                    let v = value(column(&merged));
                    let c = mu * sign(s);
                    for (l, slot) in out.iter_mut().enumerate() {
                        slot.add_scaled(&c, v[l]);
                    }
                }
            }
            out
        })
        .collect();

    let mut result = vec![C::null(); r * out_cols];
    for (col, values) in columns.into_iter().enumerate() {
        for (l, v) in values.into_iter().enumerate() {
            result[l * out_cols + col] = v;
        }
    }
    result
}

/// `b_{n-1} f` for a multilinear map of arity `n - 1`.
pub fn hochschild_differential(ring: &FiniteRing, f: &MultilinearMap) -> MultilinearMap {
    let out = differential(ring, f.arity(), f.matrix().data());
    let r = ring.rank();
    let m = Matrix::from_flat(r, r.pow(f.arity() as u32 + 1), ring.base().reduce_vec(&out));
    MultilinearMap::from_matrix(r, f.arity() + 1, m)
}

/// Matrix of `b_n : C^n -> C^{n+1}`.
pub fn differential_matrix(ring: &FiniteRing, n: usize) -> Matrix {
    let dim = ring.rank().pow(n as u32 + 1);
    let rows = differential(ring, n, &symbolic_inputs(dim));
    rows_to_matrix(&rows, dim)
}

/// `HH^n(A) = ker b_n / im b_{n-1}`.
pub fn hochschild_cohomology(ring: &FiniteRing, n: usize) -> Result<CohomologyResult> {
    HochschildComplex::new(ring.clone()).cohomology(n)
}

/// Derivations `A -> A`: a basis of `ker b_1` (a `Z`-basis over the
/// integers). Every element kills the unit.
pub fn derivation_basis(ring: &FiniteRing) -> Vec<Matrix> {
    HochschildComplex::new(ring.clone()).derivation_basis()
}

/// The Hochschild complex of one ring with cached differentials.
#[derive(Debug)]
pub struct HochschildComplex {
    ring: FiniteRing,
    matrices: [OnceLock<Matrix>; 3],
    b1_solver: OnceLock<LinearSystem>,
    hh2: OnceLock<Subquotient>,
}

impl HochschildComplex {
    pub fn new(ring: FiniteRing) -> Self {
        Self {
            ring,
            matrices: Default::default(),
            b1_solver: OnceLock::new(),
            hh2: OnceLock::new(),
        }
    }

    pub fn ring(&self) -> &FiniteRing {
        &self.ring
    }

    pub fn matrix(&self, n: usize) -> Matrix {
        match self.matrices.get(n) {
            Some(cell) => cell.get_or_init(|| differential_matrix(&self.ring, n)).clone(),
            None => differential_matrix(&self.ring, n),
        }
    }

    fn matrix_ref(&self, n: usize) -> &Matrix {
        self.matrices[n].get_or_init(|| differential_matrix(&self.ring, n))
    }

    pub fn cohomology(&self, n: usize) -> Result<CohomologyResult> {
        if n == 2 {
            return Ok(self.hh2()?.result());
        }
        self.subquotient(n).map(|s| s.result())
    }

    fn subquotient(&self, n: usize) -> Result<Subquotient> {
        let dim = self.ring.rank().pow(n as u32 + 1);
        let outgoing = self.matrix(n);
        let incoming = if n == 0 { Matrix::zeros(dim, 0) } else { self.matrix(n - 1) };
        Subquotient::new(self.ring.base(), n, &outgoing, &incoming)
    }

    /// `HH^2` with class coordinates, cached.
    pub fn hh2(&self) -> Result<&Subquotient> {
        if let Some(s) = self.hh2.get() {
            return Ok(s);
        }
        let s = self.subquotient(2)?;
        Ok(self.hh2.get_or_init(|| s))
    }

    /// Solver for `b_1 phi = c`, cached.
    pub fn b1_solver(&self) -> &LinearSystem {
        self.b1_solver.get_or_init(|| LinearSystem::new(self.ring.base(), self.matrix_ref(1)))
    }

    pub fn derivation_basis(&self) -> Vec<Matrix> {
        let r = self.ring.rank();
        self.b1_solver()
            .kernel_basis()
            .into_iter()
            .map(|v| Matrix::from_flat(r, r, self.ring.base().reduce_vec(&v)))
            .collect()
    }

    /// Is `phi` a derivation, i.e. `phi(ab) = a phi(b) + phi(a) b` on basis pairs?
    pub fn is_derivation(&self, phi: &Matrix) -> bool {
        let out = differential(&self.ring, 1, phi.data());
        self.ring.base().all_zero(&out)
    }
}
