//! The cochain complex `F*` of an action, truncated at the degree bound.
//!
//! * `F^0 = Der(A)`;
//! * `F^1` = functions `E -> End(A)`;
//! * `F^n = F^n_0 × F^n_1` for `n >= 2`: functions `E^n -> End(A)` and
//!   functions `E -> Hom(A^{⊗n}, A)`.
//!
//! Only tuples of total degree `<= N` are kept. The differentials never
//! raise total degree, so the truncation is a quotient complex.
//!
//! Flat coordinates (used for matrices and solves):
//! * degree 0: the `r × r` matrix, row-major;
//! * degree 1: one `r × r` block per sequence, in canonical order;
//! * degree `n >= 2`: one `r × r` block per tuple (in [`TupleIndex`] order),
//!   then one `r × r^n` block per sequence (the [`MultilinearMap`] layout).

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::cohomology::{CohomologyResult, LinearSystem, Solve, Subquotient};
use crate::coord::{rows_to_matrix, symbolic_inputs, Coord};
use crate::error::{Error, Result};
use crate::exp_seq::{SeqIndex, TupleIndex};
use crate::hochschild::HochschildComplex;
use crate::linalg::Infeasibility;
use crate::ln_structure::StructureTable;
use crate::matrix::{Matrix, MultilinearMap};
use crate::ring::FiniteRing;
use crate::s_algebra::ActionTable;

/// Highest cochain degree with cached tuple indices.
const MAX_DEGREE: usize = 5;

/// A cochain of `F*` in structured form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cochain {
    /// Degree 0: a derivation.
    Derivation(Matrix),
    /// Degree 1: one additive map per sequence.
    One(Vec<Matrix>),
    /// Degree `>= 2`: operator part (per tuple) and multilinear part (per sequence).
    Higher { ops: Vec<Matrix>, multi: Vec<MultilinearMap> },
}

impl Cochain {
    pub fn degree(&self) -> usize {
        match self {
            Cochain::Derivation(_) => 0,
            Cochain::One(_) => 1,
            Cochain::Higher { multi, .. } => multi.first().map_or(2, MultilinearMap::arity),
        }
    }
}

/// `F*` of one action at its bound, with cached matrices and solvers.
pub struct FComplex {
    table: ActionTable,
    constants: Arc<StructureTable>,
    index: Arc<SeqIndex>,
    tuples: [OnceLock<TupleIndex>; MAX_DEGREE + 1],
    /// `split_mul[p][i]`: multiplication by `s_p(e_i)`.
    split_mul: Vec<Vec<Matrix>>,
    hochschild: HochschildComplex,
    matrices: [OnceLock<Matrix>; 3],
    coboundary: OnceLock<Matrix>,
    d0_solver: OnceLock<LinearSystem>,
    d1_solver: OnceLock<LinearSystem>,
    h1: OnceLock<Subquotient>,
    h2: OnceLock<Subquotient>,
}

impl std::fmt::Debug for FComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FComplex(rank {}, bound {})", self.rank(), self.bound())
    }
}

impl FComplex {
    pub fn new(table: ActionTable, constants: Arc<StructureTable>) -> Result<Self> {
        if constants.bound() < table.bound() {
            return Err(Error::BoundMismatch(format!(
                "structure table bound {} is below action bound {}",
                constants.bound(),
                table.bound()
            )));
        }
        let ring = table.ring();
        let split_mul = table
            .maps()
            .iter()
            .map(|s| (0..ring.rank()).map(|i| ring.left_mul_by(&s.column(i))).collect())
            .collect();
        Ok(Self {
            index: table.shared_index(),
            hochschild: HochschildComplex::new(ring.clone()),
            table,
            constants,
            tuples: Default::default(),
            split_mul,
            matrices: Default::default(),
            coboundary: OnceLock::new(),
            d0_solver: OnceLock::new(),
            d1_solver: OnceLock::new(),
            h1: OnceLock::new(),
            h2: OnceLock::new(),
        })
    }

    pub fn table(&self) -> &ActionTable {
        &self.table
    }

    pub fn ring(&self) -> &FiniteRing {
        self.table.ring()
    }

    pub fn constants(&self) -> &StructureTable {
        &self.constants
    }

    pub fn shared_constants(&self) -> Arc<StructureTable> {
        Arc::clone(&self.constants)
    }

    pub fn hochschild(&self) -> &HochschildComplex {
        &self.hochschild
    }

    pub fn bound(&self) -> usize {
        self.table.bound()
    }

    pub fn rank(&self) -> usize {
        self.ring().rank()
    }

    pub fn index(&self) -> &SeqIndex {
        &self.index
    }

    /// Tuples indexing the operator part in degree `n >= 2`.
    pub fn tuples(&self, n: usize) -> &TupleIndex {
        assert!((2..=MAX_DEGREE).contains(&n), "operator tuples are cached for degrees 2..={MAX_DEGREE}");
        self.tuples[n].get_or_init(|| TupleIndex::new(&self.index, n))
    }

    /// Number of flat coordinates in degree `n`.
    pub fn dim(&self, n: usize) -> usize {
        let r = self.rank();
        match n {
            0 => r * r,
            1 => self.index.len() * r * r,
            _ => self.tuples(n).len() * r * r + self.index.len() * r.pow(n as u32 + 1),
        }
    }

    fn multi_offset(&self, n: usize) -> usize {
        self.tuples(n).len() * self.rank() * self.rank()
    }

    /// Total degree of the tuple or sequence a flat coordinate belongs to.
    pub fn coordinate_degree(&self, n: usize, coord: usize) -> usize {
        let r2 = self.rank() * self.rank();
        match n {
            0 => 0,
            1 => self.index.degree(coord / r2),
            _ => {
                let off = self.multi_offset(n);
                if coord < off {
                    self.tuples(n).degree(coord / r2)
                } else {
                    self.index.degree((coord - off) / self.rank().pow(n as u32 + 1))
                }
            }
        }
    }

    // ---- flat <-> structured ----

    pub fn flatten(&self, c: &Cochain) -> Vec<BigInt> {
        match c {
            Cochain::Derivation(m) => m.data().to_vec(),
            Cochain::One(ms) => ms.iter().flat_map(|m| m.data().iter().cloned()).collect(),
            Cochain::Higher { ops, multi } => ops
                .iter()
                .flat_map(|m| m.data().iter().cloned())
                .chain(multi.iter().flat_map(|m| m.matrix().data().iter().cloned()))
                .collect(),
        }
    }

    pub fn unflatten(&self, n: usize, flat: &[BigInt]) -> Result<Cochain> {
        if flat.len() != self.dim(n) {
            return Err(Error::RankMismatch {
                what: format!("degree-{n} cochain"),
                found: flat.len().to_string(),
                expected: self.dim(n).to_string(),
            });
        }
        let r = self.rank();
        let r2 = r * r;
        let blocks = |data: &[BigInt]| -> Vec<Matrix> {
            data.chunks(r2).map(|c| Matrix::from_flat(r, r, c.to_vec())).collect()
        };
        Ok(match n {
            0 => Cochain::Derivation(Matrix::from_flat(r, r, flat.to_vec())),
            1 => Cochain::One(blocks(flat)),
            _ => {
                let off = self.multi_offset(n);
                let cols = r.pow(n as u32);
                let multi = flat[off..]
                    .chunks(r * cols)
                    .map(|c| MultilinearMap::from_matrix(r, n, Matrix::from_flat(r, cols, c.to_vec())))
                    .collect();
                Cochain::Higher { ops: blocks(&flat[..off]), multi }
            }
        })
    }

    pub fn zero(&self, n: usize) -> Cochain {
        self.unflatten(n, &vec![BigInt::zero(); self.dim(n)]).expect("dimension matches")
    }

    // ---- differentials ----

    /// `d^n` on flat coordinates, over any coefficient type.
    pub fn apply<C: Coord>(&self, n: usize, f: &[C]) -> Vec<C> {
        assert_eq!(f.len(), self.dim(n), "degree-{n} cochain has the wrong length");
        if n == 0 {
            return self.apply_d0(f);
        }
        let mut out = self.apply_ops(n, f);
        out.extend(self.apply_multi(n, f));
        out
    }

    fn apply_d0<C: Coord>(&self, phi: &[C]) -> Vec<C> {
        let r = self.rank();
        self.table
            .maps()
            .par_iter()
            .flat_map_iter(|s| {
                let mut block = vec![C::null(); r * r];
                for l in 0..r {
                    for k in 0..r {
                        let slot = &mut block[l * r + k];
                        for j in 0..r {
                            // (s phi)[l][k] - (phi s)[l][k]
                            slot.add_scaled(&s[(l, j)], &phi[j * r + k]);
                            slot.add_scaled(&-&s[(j, k)], &phi[l * r + j]);
                        }
                    }
                }
                block
            })
            .collect()
    }

    /// Position of the `r × r` operator block of `f` at a tuple of arity `n`.
    fn ops_block(&self, n: usize, tuple: &[usize]) -> usize {
        let r2 = self.rank() * self.rank();
        if n == 1 {
            tuple[0] * r2
        } else {
            self.tuples(n).position(tuple).expect("tuple within the bound") * r2
        }
    }

    fn apply_ops<C: Coord>(&self, n: usize, f: &[C]) -> Vec<C> {
        let r = self.rank();
        let r2 = r * r;
        let targets = self.tuples(n + 1);
        let sign = |i: usize| BigInt::from(if i % 2 == 0 { 1 } else { -1 });
        targets
            .tuples()
            .par_iter()
            .flat_map_iter(|x| {
                let mut block = vec![C::null(); r2];
                // s_{a1} f(a2..)
                let s = self.table.at(x[0]);
                let inner = self.ops_block(n, &x[1..]);
                for l in 0..r {
                    for j in 0..r {
                        let c = &s[(l, j)];
                        if c.is_zero() {
                            continue;
                        }
                        for k in 0..r {
                            block[l * r + k].add_scaled(c, &f[inner + j * r + k]);
                        }
                    }
                }
                // contractions
                let mut merged = Vec::with_capacity(n);
                for i in 1..=n {
                    for (beta, coeff) in self.constants.product(x[i - 1], x[i]) {
                        merged.clear();
                        merged.extend_from_slice(&x[..i - 1]);
                        merged.push(*beta);
                        merged.extend_from_slice(&x[i + 1..]);
                        let at = self.ops_block(n, &merged);
                        let c = coeff * sign(i);
                        for (slot, v) in block.iter_mut().zip(&f[at..at + r2]) {
                            slot.add_scaled(&c, v);
                        }
                    }
                }
                // (-1)^{n+1} f(a1..an) s_{a_{n+1}}
                let s = self.table.at(x[n]);
                let inner = self.ops_block(n, &x[..n]);
                let sg = sign(n + 1);
                for j in 0..r {
                    for k in 0..r {
                        let c = &s[(j, k)];
                        if c.is_zero() {
                            continue;
                        }
                        let c = c * &sg;
                        for l in 0..r {
                            block[l * r + k].add_scaled(&c, &f[inner + l * r + j]);
                        }
                    }
                }
                block
            })
            .collect()
    }

    /// Start of the multilinear block for sequence `p` in a degree-`n` cochain.
    fn multi_block(&self, n: usize, p: usize) -> usize {
        let r = self.rank();
        if n == 1 {
            p * r * r
        } else {
            self.multi_offset(n) + p * r.pow(n as u32 + 1)
        }
    }

    fn apply_multi<C: Coord>(&self, n: usize, f: &[C]) -> Vec<C> {
        let r = self.rank();
        let ring = self.ring();
        let in_cols = r.pow(n as u32);
        let out_cols = in_cols * r;
        let column = |idx: &[usize]| idx.iter().fold(0, |acc, &i| acc * r + i);
        let sign = |i: usize| BigInt::from(if i % 2 == 0 { 1 } else { -1 });
        let work: Vec<(usize, usize)> =
            (0..self.index.len()).flat_map(|p| (0..out_cols).map(move |c| (p, c))).collect();

        let columns: Vec<Vec<C>> = work
            .par_iter()
            .map(|&(p, col)| {
                let mut idx = vec![0; n + 1];
                let mut c = col;
                for slot in idx.iter_mut().rev() {
                    *slot = c % r;
                    c /= r;
                }
                let mut out = vec![C::null(); r];
                let mut add_mul = |m: &Matrix, block: usize, in_col: usize, scale: &BigInt| {
                    for l in 0..r {
                        for k in 0..r {
                            let c = &m[(l, k)];
                            if !c.is_zero() {
                                out[l].add_scaled(&(c * scale), &f[block + k * in_cols + in_col]);
                            }
                        }
                    }
                };
                let one = BigInt::from(1);
                let tail = column(&idx[1..]);
                let head = column(&idx[..n]);
                let last_sign = sign(n + 1);
                for &(b, g) in self.index.splittings(p) {
                    // s_b(a1) f(g)(a2..)
                    add_mul(&self.split_mul[b][idx[0]], self.multi_block(n, g), tail, &one);
                    // (-1)^{n+1} f(b)(a1..an) s_g(a_{n+1})
                    add_mul(&self.split_mul[g][idx[n]], self.multi_block(n, b), head, &last_sign);
                }
                let own = self.multi_block(n, p);
                let mut merged = Vec::with_capacity(n);
                for s in 1..=n {
                    for (m, mu) in ring.product(idx[s - 1], idx[s]).iter().enumerate() {
                        if mu.is_zero() {
                            continue;
                        }
                        merged.clear();
                        merged.extend_from_slice(&idx[..s - 1]);
                        merged.push(m);
                        merged.extend_from_slice(&idx[s + 1..]);
                        let at = column(&merged);
                        let c = mu * sign(s);
                        for (l, slot) in out.iter_mut().enumerate() {
                            slot.add_scaled(&c, &f[own + l * in_cols + at]);
                        }
                    }
                }
                out
            })
            .collect();

        let mut result = vec![C::null(); self.index.len() * r * out_cols];
        for ((p, col), values) in work.into_iter().zip(columns) {
            let base = p * r * out_cols;
            for (l, v) in values.into_iter().enumerate() {
                result[base + l * out_cols + col] = v;
            }
        }
        result
    }

    /// `d^n` on integer coordinates, reduced over the base.
    pub fn d(&self, n: usize, f: &[BigInt]) -> Vec<BigInt> {
        self.ring().base().reduce_vec(&self.apply(n, f))
    }

    /// `d^0 phi = s phi - phi s`; `phi` must be a derivation.
    pub fn d0(&self, phi: &Matrix) -> Result<Cochain> {
        if !self.hochschild.is_derivation(phi) {
            return Err(Error::NotDerivation(format!("{phi}")));
        }
        self.unflatten(1, &self.d(0, phi.data()))
    }

    /// `d^n f` for `n >= 1` (degree 0 goes through [`FComplex::d0`]).
    pub fn dn(&self, f: &Cochain) -> Result<Cochain> {
        let n = f.degree();
        if n == 0 {
            if let Cochain::Derivation(phi) = f {
                return self.d0(phi);
            }
        }
        let flat = self.flatten(f);
        if flat.len() != self.dim(n) {
            return Err(Error::BoundMismatch(format!(
                "cochain has {} coordinates; degree {n} at bound {} needs {}",
                flat.len(),
                self.bound(),
                self.dim(n)
            )));
        }
        self.unflatten(n + 1, &self.d(n, &flat))
    }

    pub fn is_cocycle(&self, f: &Cochain) -> Result<bool> {
        let n = f.degree();
        Ok(self.ring().base().all_zero(&self.d(n, &self.flatten(f))))
    }

    pub fn is_cocycle_flat(&self, n: usize, f: &[BigInt]) -> bool {
        self.ring().base().all_zero(&self.d(n, f))
    }

    // ---- matrices, solvers, cohomology ----

    /// Matrix of `d^n` on flat coordinates (`n <= 2`). In degree 0 the
    /// domain is all of `End(A)`; see [`FComplex::coboundary_matrix`].
    pub fn matrix(&self, n: usize) -> &Matrix {
        self.matrices[n].get_or_init(|| {
            let rows = self.apply(n, &symbolic_inputs(self.dim(n)));
            rows_to_matrix(&rows, self.dim(n))
        })
    }

    /// Derivation basis of `A` (a `Z`-basis over the integers).
    pub fn derivations(&self) -> Vec<Matrix> {
        self.hochschild.derivation_basis()
    }

    /// `d^0` in derivation-basis coordinates: column `j` is `d^0 D_j`.
    pub fn coboundary_matrix(&self) -> &Matrix {
        self.coboundary.get_or_init(|| {
            let cols: Vec<Vec<BigInt>> = self.derivations().iter().map(|d| self.apply(0, d.data())).collect();
            Matrix::from_columns(self.dim(1), &cols)
        })
    }

    pub fn d1_solver(&self) -> &LinearSystem {
        self.d1_solver.get_or_init(|| LinearSystem::new(self.ring().base(), self.matrix(1)))
    }

    fn d0_solver(&self) -> &LinearSystem {
        self.d0_solver.get_or_init(|| LinearSystem::new(self.ring().base(), self.coboundary_matrix()))
    }

    /// Finds a derivation `phi` with `d^0 phi = s`, or a certificate that
    /// `s` is not a coboundary.
    pub fn solve_coboundary(&self, s: &[BigInt]) -> Result<std::result::Result<Matrix, Infeasibility>> {
        match self.d0_solver().solve(s)? {
            Solve::Solution(c) => {
                let r = self.rank();
                let mut phi = Matrix::zeros(r, r);
                for (d, k) in self.derivations().iter().zip(&c) {
                    phi.add_scaled(k, d);
                }
                Ok(Ok(self.ring().base().reduce_matrix(&phi)))
            }
            Solve::Infeasible(cert) => Ok(Err(cert)),
        }
    }

    /// `H^1` with class coordinates, cached.
    pub fn h1(&self) -> Result<&Subquotient> {
        if let Some(s) = self.h1.get() {
            return Ok(s);
        }
        let s = Subquotient::new(self.ring().base(), 1, self.matrix(1), self.coboundary_matrix())?;
        Ok(self.h1.get_or_init(|| s))
    }

    /// `H^2` with class coordinates, cached.
    pub fn h2(&self) -> Result<&Subquotient> {
        if let Some(s) = self.h2.get() {
            return Ok(s);
        }
        let s = Subquotient::new(self.ring().base(), 2, self.matrix(2), self.matrix(1))?;
        Ok(self.h2.get_or_init(|| s))
    }

    pub fn cohomology(&self, n: usize) -> Result<CohomologyResult> {
        match n {
            1 => Ok(self.h1()?.result()),
            2 => Ok(self.h2()?.result()),
            _ => Err(Error::Invalid(format!("cohomology of F* is computed in degrees 1 and 2, not {n}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coord::Support;
    use crate::ln_structure::Convention;
    use crate::ring::BaseRing;
    use crate::s_algebra::{canonical_instance, trivial_instance};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn complex(table: ActionTable) -> FComplex {
        let n = table.bound();
        FComplex::new(table, Arc::new(StructureTable::build(n, Convention::AlphaInner))).unwrap()
    }

    fn dual_numbers() -> FiniteRing {
        FiniteRing::truncated_polynomial(BaseRing::Integers, 2)
    }

    fn random_flat(rng: &mut ChaCha8Rng, len: usize) -> Vec<BigInt> {
        (0..len).map(|_| BigInt::from(rng.random_range(-3..=3))).collect()
    }

    #[test]
    fn d_squared_vanishes_on_the_polynomial_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (_, table) = canonical_instance(2);
        let fc = complex(table);
        for n in 1..=2 {
            for _ in 0..5 {
                let f = random_flat(&mut rng, fc.dim(n));
                let ddf = fc.d(n + 1, &fc.d(n, &f));
                assert!(ddf.iter().all(Zero::is_zero), "n={n}");
            }
        }
        for d in fc.derivations() {
            let once = fc.d(0, d.data());
            assert!(fc.d(1, &once).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn trivial_action_has_zero_d0() {
        let fc = complex(trivial_instance(&dual_numbers(), 3));
        for d in fc.derivations() {
            assert!(fc.d(0, d.data()).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn trivial_action_first_differential() {
        // (d f)(0,0) = f_0 and the multilinear part is Hochschild b_1 levelwise
        let fc = complex(trivial_instance(&dual_numbers(), 2));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_flat(&mut rng, fc.dim(1));
        let Cochain::One(fs) = fc.unflatten(1, &f).unwrap() else { unreachable!() };
        let Cochain::Higher { ops, multi } = fc.dn(&Cochain::One(fs.clone())).unwrap() else { unreachable!() };
        let zz = fc.tuples(2).position(&[0, 0]).unwrap();
        assert_eq!(ops[zz], fs[0]);
        for (p, m) in multi.iter().enumerate() {
            let expected = crate::hochschild::hochschild_differential(
                fc.ring(),
                &MultilinearMap::from_matrix(2, 1, fs[p].clone()),
            );
            assert_eq!(m, &expected);
        }
    }

    #[test]
    fn commutator_oracle_on_the_model() {
        let (_, table) = canonical_instance(2);
        let fc = complex(table.clone());
        for phi in fc.derivations() {
            let Cochain::One(got) = fc.d0(&phi).unwrap() else { unreachable!() };
            for (p, s) in table.maps().iter().enumerate() {
                assert_eq!(got[p], s.mul(&phi).sub(&phi.mul(s)));
            }
        }
    }

    #[test]
    fn differentials_read_only_lower_degrees() {
        let (_, table) = canonical_instance(3);
        let fc = complex(table);
        for n in 0..=2 {
            let inputs: Vec<Support> = (0..fc.dim(n)).map(|i| Support(vec![i])).collect();
            let out = fc.apply(n, &inputs);
            for (k, s) in out.iter().enumerate() {
                let d = fc.coordinate_degree(n + 1, k);
                for &i in &s.0 {
                    assert!(fc.coordinate_degree(n, i) <= d, "n={n} out={k} reads {i}");
                }
            }
        }
    }

    #[test]
    fn non_derivation_is_rejected() {
        let fc = complex(trivial_instance(&dual_numbers(), 1));
        assert!(matches!(fc.d0(&Matrix::identity(2)), Err(Error::NotDerivation(_))));
    }

    #[test]
    fn first_cohomology_fixtures() {
        let z = complex(trivial_instance(&FiniteRing::integers(BaseRing::Integers), 2));
        assert!(z.cohomology(1).unwrap().is_zero());
        let dn = complex(trivial_instance(&dual_numbers(), 2));
        let h1 = dn.cohomology(1).unwrap();
        assert_eq!((h1.free_rank, h1.torsion.len()), (2, 0));
        for rep in &h1.representatives {
            assert!(dn.is_cocycle_flat(1, rep));
        }
    }
}
