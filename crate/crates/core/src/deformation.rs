//! Formal deformations of an action and formal automorphisms of the ring,
//! truncated at a finite order in `t`, with the obstruction theory that
//! decides when they extend.

use std::path::Path;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cohomology::{CohomologyResult, Solve};
use crate::doc::{read_json, DocRef, Int};
use crate::error::{Error, Result};
use crate::fstar::FComplex;
use crate::hochschild::HochschildComplex;
use crate::linalg::Infeasibility;
use crate::matrix::Matrix;
use crate::ring::{FiniteRing, RingDocument};
use crate::s_algebra::{cartan_violation, matrix_rows, parse_matrix, ActionDocument, ActionEntry, ActionTable};
use crate::verdict::{Verdict, Violation};

/// `sigma = s + t s^1 + ... + t^m s^m`, each `s^i` a 1-cochain.
#[derive(Clone, Debug, PartialEq)]
pub struct Deformation {
    base: ActionTable,
    coeffs: Vec<Vec<Matrix>>,
}

impl Deformation {
    pub fn new(base: ActionTable, coeffs: Vec<Vec<Matrix>>) -> Result<Self> {
        let (len, r) = (base.index().len(), base.ring().rank());
        for (i, c) in coeffs.iter().enumerate() {
            if c.len() != len || c.iter().any(|m| m.rows() != r || m.cols() != r) {
                return Err(Error::RankMismatch {
                    what: format!("coefficient s^{}", i + 1),
                    found: format!("{} maps", c.len()),
                    expected: format!("{len} maps of size {r}x{r}"),
                });
            }
        }
        let coeffs = coeffs
            .into_iter()
            .map(|c| c.iter().map(|m| base.ring().base().reduce_matrix(m)).collect())
            .collect();
        Ok(Self { base, coeffs })
    }

    /// `s` itself, extended by zeros to order `m`.
    pub fn trivial(base: ActionTable, order: usize) -> Self {
        let r = base.ring().rank();
        let zero = vec![Matrix::zeros(r, r); base.index().len()];
        Self { coeffs: vec![zero; order], base }
    }

    /// Order 1 with the given first coefficient.
    pub fn first_order(base: ActionTable, s1: Vec<Matrix>) -> Result<Self> {
        Self::new(base, vec![s1])
    }

    pub fn base(&self) -> &ActionTable {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// `s^i` (with `s^0 = s`).
    pub fn coefficient(&self, i: usize) -> &[Matrix] {
        if i == 0 {
            self.base.maps()
        } else {
            &self.coeffs[i - 1]
        }
    }

    pub fn coefficient_flat(&self, i: usize) -> Vec<BigInt> {
        flatten_one(self.coefficient(i))
    }

    /// Index of the first nonzero coefficient `s^k`, `k >= 1`.
    pub fn first_nonzero(&self) -> Option<usize> {
        let base = self.base.ring().base();
        (1..=self.order()).find(|&i| self.coeffs[i - 1].iter().any(|m| !base.all_zero(m.data())))
    }

    pub fn truncate(&self, order: usize) -> Deformation {
        Deformation { base: self.base.clone(), coeffs: self.coeffs[..order.min(self.order())].to_vec() }
    }

    pub fn push(&mut self, next: Vec<Matrix>) {
        self.coeffs.push(next);
    }

    /// Coefficient-wise equality over the base ring.
    pub fn same_as(&self, other: &Deformation) -> bool {
        let base = self.base.ring().base();
        self.base == other.base
            && self.order() == other.order()
            && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| {
                a.iter().zip(b).all(|(x, y)| x.data().iter().zip(y.data()).all(|(u, v)| base.eq(u, v)))
            })
    }

    pub fn to_document(&self) -> DeformationDocument {
        DeformationDocument {
            action: DocRef::Inline(Box::new(self.base.to_document())),
            order: self.order(),
            coeffs: self.coeffs.iter().map(|c| cochain_entries(&self.base, c)).collect(),
        }
    }

    pub fn from_document(doc: DeformationDocument, base_dir: Option<&Path>) -> Result<Self> {
        let (action_doc, dir) = doc.action.resolve(base_dir)?;
        let base = ActionTable::from_document(action_doc, dir.as_deref())?;
        if doc.coeffs.len() != doc.order {
            return Err(Error::RankMismatch {
                what: "deformation coefficients".into(),
                found: doc.coeffs.len().to_string(),
                expected: format!("order {}", doc.order),
            });
        }
        let coeffs = doc
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, entries)| parse_cochain(&base, entries, &format!("s^{}", i + 1)))
            .collect::<Result<_>>()?;
        Deformation::new(base, coeffs)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let doc: DeformationDocument = read_json(path)?;
        Self::from_document(doc, path.parent())
    }
}

fn cochain_entries(base: &ActionTable, maps: &[Matrix]) -> Vec<ActionEntry> {
    base.index()
        .seqs()
        .iter()
        .zip(maps)
        .filter(|(_, m)| !m.is_zero())
        .map(|(alpha, m)| ActionEntry { alpha: alpha.clone(), matrix: matrix_rows(m) })
        .collect()
}

fn parse_cochain(base: &ActionTable, entries: &[ActionEntry], what: &str) -> Result<Vec<Matrix>> {
    let r = base.ring().rank();
    let mut maps = vec![Matrix::zeros(r, r); base.index().len()];
    let mut seen = vec![false; maps.len()];
    for e in entries {
        let p = base.index().position(&e.alpha).ok_or_else(|| Error::DegreeOverflow {
            seq: e.alpha.to_string(),
            degree: e.alpha.degree(),
            bound: base.bound(),
        })?;
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::Malformed(format!("{what}: operation {} listed twice", e.alpha)));
        }
        maps[p] = parse_matrix(&e.matrix, r, &format!("{what} at {}", e.alpha))?;
    }
    Ok(maps)
}

/// Serialized [`Deformation`]; entries not listed in a coefficient are zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeformationDocument {
    pub action: DocRef<ActionDocument>,
    pub order: usize,
    pub coeffs: Vec<Vec<ActionEntry>>,
}

pub fn flatten_one(maps: &[Matrix]) -> Vec<BigInt> {
    maps.iter().flat_map(|m| m.data().iter().cloned()).collect()
}

pub fn unflatten_one(flat: &[BigInt], r: usize) -> Vec<Matrix> {
    flat.chunks(r * r).map(|c| Matrix::from_flat(r, r, c.to_vec())).collect()
}

fn check_base(d: &Deformation, fc: &FComplex) -> Result<()> {
    if d.base() != fc.table() {
        return Err(Error::Invalid("deformation is over a different action than the complex".into()));
    }
    Ok(())
}

/// Exhaustive check of the truncated product and Cartan formulas for every
/// order `n <= m` (product first at each order).
pub fn validate_deformation(d: &Deformation, fc: &FComplex) -> Result<Verdict> {
    check_base(d, fc)?;
    let ring = fc.ring();
    let base = ring.base();
    let r = ring.rank();
    let index = fc.index();
    let constants = fc.constants();
    for n in 0..=d.order() {
        for a in 0..index.len() {
            for b in 0..index.len() {
                if index.degree(a) + index.degree(b) > fc.bound() {
                    continue;
                }
                let mut lhs = Matrix::zeros(r, r);
                for i in 0..=n {
                    lhs = lhs.add(&d.coefficient(i)[a].mul(&d.coefficient(n - i)[b]));
                }
                let mut rhs = Matrix::zeros(r, r);
                for (g, c) in constants.product(a, b) {
                    rhs.add_scaled(c, &d.coefficient(n)[*g]);
                }
                if !lhs.data().iter().zip(rhs.data()).all(|(x, y)| base.eq(x, y)) {
                    return Ok(Verdict::Fail(Violation::new(
                        "product formula",
                        format!("n={n} alpha={} beta={}", index.get(a), index.get(b)),
                    )));
                }
            }
        }
        let families: Vec<(&[Matrix], &[Matrix])> =
            (0..=n).map(|i| (d.coefficient(i), d.coefficient(n - i))).collect();
        if let Some(mut v) = cartan_violation(ring, index, d.coefficient(n), Some(&families)) {
            v.location = format!("n={n} {}", v.location);
            return Ok(Verdict::Fail(v));
        }
    }
    Ok(Verdict::Pass)
}

/// The class in `H^1` of the first nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfinitesimalClass {
    /// `k` with `s^1 = ... = s^{k-1} = 0 != s^k`; `None` for the trivial deformation.
    pub order: Option<usize>,
    /// Class coordinates in [`FComplex::h1`].
    pub coords: Vec<BigInt>,
}

impl InfinitesimalClass {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }
}

pub fn infinitesimal_class(d: &Deformation, fc: &FComplex) -> Result<InfinitesimalClass> {
    check_base(d, fc)?;
    let h1 = fc.h1()?;
    let Some(k) = d.first_nonzero() else {
        return Ok(InfinitesimalClass { order: None, coords: vec![BigInt::zero(); h1.generators()] });
    };
    let s = d.coefficient_flat(k);
    let coords = h1
        .class_of(&s)
        .ok_or_else(|| Error::NotCocycle(format!("first nonzero coefficient s^{k} is not a 1-cocycle")))?;
    Ok(InfinitesimalClass { order: Some(k), coords })
}

/// `Ob(sigma)` in flat degree-2 coordinates:
/// `Ob_0(a, b) = -sum_{i=1}^m s^i_a s^{m+1-i}_b` on the operator part and
/// `Ob_1(a)(x ⊗ y) = -sum_i sum_{b+c=a} s^i_b(x) s^{m+1-i}_c(y)` on the
/// multilinear part. Fails hard if it is not a 2-cocycle.
pub fn deformation_obstruction(d: &Deformation, fc: &FComplex) -> Result<Vec<BigInt>> {
    check_base(d, fc)?;
    let m = d.order();
    let ring = fc.ring();
    let r = ring.rank();
    let mut flat = Vec::with_capacity(fc.dim(2));
    for x in fc.tuples(2).tuples() {
        let mut block = Matrix::zeros(r, r);
        for i in 1..=m {
            block = block.sub(&d.coefficient(i)[x[0]].mul(&d.coefficient(m + 1 - i)[x[1]]));
        }
        flat.extend(block.into_data());
    }
    let index = fc.index();
    for p in 0..index.len() {
        let mut block = Matrix::zeros(r, r * r);
        for a in 0..r {
            for b in 0..r {
                let mut v = vec![BigInt::zero(); r];
                for i in 1..=m {
                    for &(beta, gamma) in index.splittings(p) {
                        let prod = ring.mul(&d.coefficient(i)[beta].column(a), &d.coefficient(m + 1 - i)[gamma].column(b));
                        for (acc, x) in v.iter_mut().zip(prod) {
                            *acc -= x;
                        }
                    }
                }
                for (l, x) in v.into_iter().enumerate() {
                    block[(l, a * r + b)] = x;
                }
            }
        }
        flat.extend(block.into_data());
    }
    let flat = ring.base().reduce_vec(&flat);
    if !fc.is_cocycle_flat(2, &flat) {
        return Err(Error::Internal(format!("obstruction of an order-{m} deformation is not a 2-cocycle")));
    }
    Ok(flat)
}

/// Outcome of trying to extend by one order.
#[derive(Clone, Debug)]
pub enum Extension<T> {
    Extended(T),
    /// The obstruction is not a coboundary; `certificate` proves it.
    Obstructed { obstruction: Vec<BigInt>, certificate: Infeasibility },
}

impl<T> Extension<T> {
    pub fn is_extended(&self) -> bool {
        matches!(self, Extension::Extended(_))
    }
}

/// Solves `d^1 s^{m+1} = Ob(sigma)`; on success the extension is revalidated.
pub fn extend_deformation(d: &Deformation, fc: &FComplex) -> Result<Extension<Deformation>> {
    let ob = deformation_obstruction(d, fc)?;
    match fc.d1_solver().solve(&ob)? {
        Solve::Solution(x) => {
            let mut next = d.clone();
            next.push(unflatten_one(&fc.ring().base().reduce_vec(&x), fc.rank()));
            let verdict = validate_deformation(&next, fc)?;
            if let Verdict::Fail(v) = verdict {
                return Err(Error::Internal(format!("extension failed revalidation: {v}")));
            }
            Ok(Extension::Extended(next))
        }
        Solve::Infeasible(certificate) => Ok(Extension::Obstructed { obstruction: ob, certificate }),
    }
}

/// Like [`extend_deformation`] but picks the next coefficient at random
/// from the solution set `particular + ker d^1`.
pub fn extend_deformation_randomly(
    d: &Deformation,
    fc: &FComplex,
    rng: &mut impl Rng,
    spread: i64,
) -> Result<Extension<Deformation>> {
    let ob = deformation_obstruction(d, fc)?;
    match fc.d1_solver().solve(&ob)? {
        Solve::Solution(mut x) => {
            for k in fc.d1_solver().kernel_basis() {
                let c = BigInt::from(rng.random_range(-spread..=spread));
                for (xi, ki) in x.iter_mut().zip(&k) {
                    *xi += &c * ki;
                }
            }
            let mut next = d.clone();
            next.push(unflatten_one(&fc.ring().base().reduce_vec(&x), fc.rank()));
            Ok(Extension::Extended(next))
        }
        Solve::Infeasible(certificate) => Ok(Extension::Obstructed { obstruction: ob, certificate }),
    }
}

/// Status of one obstruction class in the sequence.
#[derive(Clone, Debug)]
pub enum ClassStatus {
    Vanishes,
    Nonzero(Infeasibility),
}

/// Extends the order-1 deformation `s + t s^1` order by order up to
/// `max_order`, recording for each order `m` whether the obstruction to
/// reaching `m + 1` vanishes. Stops at the first nonzero class.
pub fn obstruction_sequence(s1: &[Matrix], fc: &FComplex, max_order: usize) -> Result<Vec<(usize, ClassStatus)>> {
    if !fc.is_cocycle_flat(1, &flatten_one(s1)) {
        return Err(Error::NotCocycle("the first-order coefficient is not a 1-cocycle".into()));
    }
    let mut d = Deformation::first_order(fc.table().clone(), s1.to_vec())?;
    let mut out = Vec::new();
    while d.order() < max_order {
        let m = d.order();
        match extend_deformation(&d, fc)? {
            Extension::Extended(next) => {
                out.push((m, ClassStatus::Vanishes));
                d = next;
            }
            Extension::Obstructed { certificate, .. } => {
                out.push((m, ClassStatus::Nonzero(certificate)));
                break;
            }
        }
    }
    Ok(out)
}

/// `Phi = 1 + t phi_1 + ... + t^m phi_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Automorphism {
    ring: FiniteRing,
    coeffs: Vec<Matrix>,
}

impl Automorphism {
    pub fn new(ring: FiniteRing, coeffs: Vec<Matrix>) -> Result<Self> {
        let r = ring.rank();
        if let Some(m) = coeffs.iter().find(|m| m.rows() != r || m.cols() != r) {
            return Err(Error::RankMismatch {
                what: "automorphism coefficient".into(),
                found: format!("{}x{}", m.rows(), m.cols()),
                expected: format!("{r}x{r}"),
            });
        }
        let coeffs = coeffs.iter().map(|m| ring.base().reduce_matrix(m)).collect();
        Ok(Self { ring, coeffs })
    }

    pub fn identity(ring: FiniteRing, order: usize) -> Self {
        let r = ring.rank();
        Self { coeffs: vec![Matrix::zeros(r, r); order], ring }
    }

    /// `1 + t^k phi` at order `k`.
    pub fn monomial(ring: FiniteRing, k: usize, phi: Matrix) -> Self {
        let mut a = Self::identity(ring, k);
        a.coeffs[k - 1] = phi;
        a
    }

    pub fn ring(&self) -> &FiniteRing {
        &self.ring
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// `phi_i` (with `phi_0 = 1`).
    pub fn coefficient(&self, i: usize) -> Matrix {
        if i == 0 {
            Matrix::identity(self.ring.rank())
        } else {
            self.coeffs[i - 1].clone()
        }
    }

    pub fn coefficients(&self) -> &[Matrix] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Automorphism {
        Automorphism { ring: self.ring.clone(), coeffs: self.coeffs[..order.min(self.order())].to_vec() }
    }

    pub fn push(&mut self, next: Matrix) {
        self.coeffs.push(next);
    }

    /// The composite `self ∘ other` truncated at the smaller order.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        let m = self.order().min(other.order());
        let coeffs = (1..=m)
            .map(|n| {
                let mut c = Matrix::zeros(self.ring.rank(), self.ring.rank());
                for i in 0..=n {
                    c = c.add(&self.coefficient(i).mul(&other.coefficient(n - i)));
                }
                self.ring.base().reduce_matrix(&c)
            })
            .collect();
        Automorphism { ring: self.ring.clone(), coeffs }
    }

    /// The unique `Psi` with `Phi Psi = 1` mod `t^{m+1}`:
    /// `psi_n = -sum_{i=1}^n phi_i psi_{n-i}`.
    pub fn inverse(&self) -> Automorphism {
        let r = self.ring.rank();
        let mut psi: Vec<Matrix> = vec![Matrix::identity(r)];
        for n in 1..=self.order() {
            let mut c = Matrix::zeros(r, r);
            for i in 1..=n {
                c = c.sub(&self.coeffs[i - 1].mul(&psi[n - i]));
            }
            psi.push(self.ring.base().reduce_matrix(&c));
        }
        psi.remove(0);
        Automorphism { ring: self.ring.clone(), coeffs: psi }
    }

    pub fn is_identity(&self) -> bool {
        self.coeffs.iter().all(|m| self.ring.base().all_zero(m.data()))
    }

    pub fn same_as(&self, other: &Automorphism) -> bool {
        let base = self.ring.base();
        self.order() == other.order()
            && self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .all(|(a, b)| a.data().iter().zip(b.data()).all(|(x, y)| base.eq(x, y)))
    }

    pub fn to_document(&self) -> AutomorphismDocument {
        AutomorphismDocument {
            ring: DocRef::Inline(Box::new(self.ring.to_document())),
            order: self.order(),
            coeffs: self.coeffs.iter().map(matrix_rows).collect(),
        }
    }

    pub fn from_document(doc: AutomorphismDocument, base_dir: Option<&Path>) -> Result<Self> {
        let (ring_doc, _) = doc.ring.resolve(base_dir)?;
        let ring = FiniteRing::from_document(&ring_doc)?;
        if doc.coeffs.len() != doc.order {
            return Err(Error::RankMismatch {
                what: "automorphism coefficients".into(),
                found: doc.coeffs.len().to_string(),
                expected: format!("order {}", doc.order),
            });
        }
        let r = ring.rank();
        let coeffs = doc
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, m)| parse_matrix(m, r, &format!("phi_{}", i + 1)))
            .collect::<Result<_>>()?;
        Automorphism::new(ring, coeffs)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let doc: AutomorphismDocument = read_json(path)?;
        Self::from_document(doc, path.parent())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AutomorphismDocument {
    pub ring: DocRef<RingDocument>,
    pub order: usize,
    pub coeffs: Vec<Vec<Vec<Int>>>,
}

/// Multiplicativity `phi_n(ab) = sum_i phi_i(a) phi_{n-i}(b)` for `n <= m`
/// on all basis pairs.
pub fn validate_automorphism(phi: &Automorphism) -> Verdict {
    let ring = phi.ring();
    let base = ring.base();
    let r = ring.rank();
    let names = ring.basis_names();
    for n in 1..=phi.order() {
        for a in 0..r {
            for b in 0..r {
                let lhs = phi.coefficient(n).apply(ring.product(a, b));
                let mut rhs = vec![BigInt::zero(); r];
                for i in 0..=n {
                    let x = ring.mul(&phi.coefficient(i).column(a), &phi.coefficient(n - i).column(b));
                    for (acc, v) in rhs.iter_mut().zip(x) {
                        *acc += v;
                    }
                }
                if !lhs.iter().zip(&rhs).all(|(x, y)| base.eq(x, y)) {
                    return Verdict::Fail(Violation::new(
                        "multiplicativity",
                        format!("n={n} a={} b={}", names[a], names[b]),
                    ));
                }
            }
        }
    }
    Verdict::Pass
}

/// The first nonzero coefficient of a valid automorphism is a derivation
/// (vacuously true for the identity).
pub fn first_nonzero_is_derivation(phi: &Automorphism, hc: &HochschildComplex) -> bool {
    let base = phi.ring().base();
    phi.coeffs.iter().find(|m| !base.all_zero(m.data())).is_none_or(|m| hc.is_derivation(m))
}

/// `Ob(Phi)(a ⊗ b) = -sum_{i=1}^m phi_i(a) phi_{m+1-i}(b)` as a flat
/// Hochschild 2-cochain. Fails hard if it is not a 2-cocycle.
pub fn automorphism_obstruction(phi: &Automorphism) -> Result<Vec<BigInt>> {
    let ring = phi.ring();
    let (r, m) = (ring.rank(), phi.order());
    let mut ob = Matrix::zeros(r, r * r);
    for a in 0..r {
        for b in 0..r {
            let mut v = vec![BigInt::zero(); r];
            for i in 1..=m {
                let x = ring.mul(&phi.coefficient(i).column(a), &phi.coefficient(m + 1 - i).column(b));
                for (acc, y) in v.iter_mut().zip(x) {
                    *acc -= y;
                }
            }
            for (l, x) in v.into_iter().enumerate() {
                ob[(l, a * r + b)] = x;
            }
        }
    }
    let flat = ring.base().reduce_vec(ob.data());
    let check = crate::hochschild::differential(ring, 2, &flat);
    if !ring.base().all_zero(&check) {
        return Err(Error::Internal(format!("obstruction of an order-{m} automorphism is not a Hochschild 2-cocycle")));
    }
    Ok(flat)
}

/// Solves `b_1 phi_{m+1} = Ob(Phi)`; success is revalidated.
pub fn extend_automorphism(phi: &Automorphism, hc: &HochschildComplex) -> Result<Extension<Automorphism>> {
    extend_automorphism_with(phi, hc, |_| {})
}

/// [`extend_automorphism`] adding a random derivation to the solution.
pub fn extend_automorphism_randomly(
    phi: &Automorphism,
    hc: &HochschildComplex,
    rng: &mut impl Rng,
    spread: i64,
) -> Result<Extension<Automorphism>> {
    let ders = hc.derivation_basis();
    extend_automorphism_with(phi, hc, |x| {
        for d in &ders {
            let c = BigInt::from(rng.random_range(-spread..=spread));
            for (xi, di) in x.iter_mut().zip(d.data()) {
                *xi += &c * di;
            }
        }
    })
}

fn extend_automorphism_with(
    phi: &Automorphism,
    hc: &HochschildComplex,
    perturb: impl FnOnce(&mut Vec<BigInt>),
) -> Result<Extension<Automorphism>> {
    if phi.ring() != hc.ring() {
        return Err(Error::Invalid("automorphism is over a different ring than the complex".into()));
    }
    let ob = automorphism_obstruction(phi)?;
    match hc.b1_solver().solve(&ob)? {
        Solve::Solution(mut x) => {
            perturb(&mut x);
            let r = phi.ring().rank();
            let mut next = phi.clone();
            next.push(Matrix::from_flat(r, r, phi.ring().base().reduce_vec(&x)));
            if let Verdict::Fail(v) = validate_automorphism(&next) {
                return Err(Error::Internal(format!("automorphism extension failed revalidation: {v}")));
            }
            Ok(Extension::Extended(next))
        }
        Solve::Infeasible(certificate) => Ok(Extension::Obstructed { obstruction: ob, certificate }),
    }
}

/// `Phi^{-1} sigma Phi` truncated at the order of `d`:
/// coefficient `n` is `sum_{i+j+k=n} psi_i s^j phi_k`.
pub fn conjugate(d: &Deformation, phi: &Automorphism) -> Result<Deformation> {
    if phi.ring() != d.base().ring() {
        return Err(Error::Invalid("automorphism and deformation live on different rings".into()));
    }
    let m = d.order();
    if phi.order() < m {
        return Err(Error::Invalid(format!(
            "automorphism of order {} cannot conjugate a deformation of order {m}",
            phi.order()
        )));
    }
    let phi = phi.truncate(m);
    let psi = phi.inverse();
    let len = d.base().index().len();
    let r = d.base().ring().rank();
    let coeffs = (1..=m)
        .map(|n| {
            (0..len)
                .map(|p| {
                    let mut acc = Matrix::zeros(r, r);
                    for i in 0..=n {
                        for j in 0..=n - i {
                            let k = n - i - j;
                            acc = acc.add(&psi.coefficient(i).mul(&d.coefficient(j)[p]).mul(&phi.coefficient(k)));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Deformation::new(d.base().clone(), coeffs)
}

/// Why a gauge step could not be carried out.
#[derive(Clone, Debug)]
pub enum GaugeFailure {
    /// `s^k` is not `d^0` of a derivation.
    NotCoboundary { order: usize, certificate: Infeasibility },
    /// The automorphism `1 - t^k phi` did not extend past `order`.
    AutomorphismObstructed { order: usize, certificate: Infeasibility },
}

#[derive(Clone, Debug)]
pub struct GaugeStep {
    pub automorphism: Automorphism,
    pub result: Deformation,
}

/// Removes the first nonzero coefficient `s^k = d^0 phi` by conjugating
/// with `1 - t^k phi + ...` (extended to the order of `d`).
pub fn gauge_step(d: &Deformation, fc: &FComplex) -> Result<std::result::Result<GaugeStep, GaugeFailure>> {
    check_base(d, fc)?;
    let Some(k) = d.first_nonzero() else {
        return Ok(Ok(GaugeStep { automorphism: Automorphism::identity(fc.ring().clone(), d.order()), result: d.clone() }));
    };
    let phi = match fc.solve_coboundary(&d.coefficient_flat(k))? {
        Ok(phi) => phi,
        Err(certificate) => return Ok(Err(GaugeFailure::NotCoboundary { order: k, certificate })),
    };
    let mut aut = Automorphism::monomial(fc.ring().clone(), k, phi.neg());
    while aut.order() < d.order() {
        match extend_automorphism(&aut, fc.hochschild())? {
            Extension::Extended(next) => aut = next,
            Extension::Obstructed { certificate, .. } => {
                return Ok(Err(GaugeFailure::AutomorphismObstructed { order: aut.order(), certificate }));
            }
        }
    }
    let result = conjugate(d, &aut)?;
    if result.first_nonzero().is_some_and(|j| j <= k) {
        return Err(Error::Internal(format!("gauge step at order {k} did not clear the coefficient")));
    }
    Ok(Ok(GaugeStep { automorphism: aut, result }))
}

/// Outcome of comparing two extensions of the same deformation.
#[derive(Clone, Debug)]
pub enum Equivalence {
    /// `conjugate(bar, witness) = tilde`.
    Witness(Automorphism),
    /// The difference is a nonzero class in `H^1`; no verdict is drawn.
    Unknown { class: Vec<BigInt>, certificate: Infeasibility },
}

pub fn equivalent_extensions(tilde: &Deformation, bar: &Deformation, fc: &FComplex) -> Result<Equivalence> {
    check_base(tilde, fc)?;
    check_base(bar, fc)?;
    let top = tilde.order();
    if top == 0 || bar.order() != top {
        return Err(Error::Invalid(format!(
            "extensions must have the same positive order (got {} and {})",
            tilde.order(),
            bar.order()
        )));
    }
    if !tilde.truncate(top - 1).same_as(&bar.truncate(top - 1)) {
        return Err(Error::Invalid(format!("the deformations differ below order {top}")));
    }
    let diff: Vec<BigInt> =
        tilde.coefficient_flat(top).iter().zip(bar.coefficient_flat(top)).map(|(a, b)| a - b).collect();
    let diff = fc.ring().base().reduce_vec(&diff);
    if !fc.is_cocycle_flat(1, &diff) {
        return Err(Error::NotCocycle("difference of the top coefficients is not a 1-cocycle".into()));
    }
    match fc.solve_coboundary(&diff)? {
        Ok(phi) => {
            let witness = Automorphism::monomial(fc.ring().clone(), top, phi);
            if !conjugate(bar, &witness)?.same_as(tilde) {
                return Err(Error::Internal("equivalence witness failed the conjugation check".into()));
            }
            Ok(Equivalence::Witness(witness))
        }
        Err(certificate) => {
            let class = fc.h1()?.class_of(&diff).expect("difference is a cocycle");
            Ok(Equivalence::Unknown { class, certificate })
        }
    }
}

/// A seeded random valid deformation of the given order whose first
/// nonzero coefficient sits at `lead` (a random 1-cocycle there, then
/// random extensions). Retries on obstructions.
pub fn random_deformation(
    fc: &FComplex,
    order: usize,
    lead: usize,
    rng: &mut impl Rng,
    spread: i64,
) -> Result<Deformation> {
    assert!(lead >= 1 && lead <= order.max(1));
    let cocycles = fc.d1_solver().kernel_basis();
    for _ in 0..64 {
        let mut s = vec![BigInt::zero(); fc.dim(1)];
        for k in &cocycles {
            let c = BigInt::from(rng.random_range(-spread..=spread));
            for (x, y) in s.iter_mut().zip(k) {
                *x += &c * y;
            }
        }
        let mut d = Deformation::trivial(fc.table().clone(), lead - 1);
        d.push(unflatten_one(&fc.ring().base().reduce_vec(&s), fc.rank()));
        let mut ok = true;
        while d.order() < order {
            match extend_deformation_randomly(&d, fc, rng, spread)? {
                Extension::Extended(next) => d = next,
                Extension::Obstructed { .. } => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok(d);
        }
    }
    Err(Error::Invalid(format!("no unobstructed deformation of order {order} found in 64 attempts")))
}

/// A seeded random valid automorphism of the given order, starting from a
/// random derivation. Retries on obstructions.
pub fn random_automorphism(
    hc: &HochschildComplex,
    order: usize,
    rng: &mut impl Rng,
    spread: i64,
) -> Result<Automorphism> {
    let ring = hc.ring().clone();
    if order == 0 {
        return Ok(Automorphism::identity(ring, 0));
    }
    for _ in 0..64 {
        let mut phi = Automorphism::identity(ring.clone(), 0);
        let mut ok = true;
        while phi.order() < order {
            match extend_automorphism_randomly(&phi, hc, rng, spread)? {
                Extension::Extended(next) => phi = next,
                Extension::Obstructed { .. } => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok(phi);
        }
    }
    Err(Error::Invalid(format!("no unobstructed automorphism of order {order} found in 64 attempts")))
}

/// Verdict of the rigidity pipeline.
#[derive(Clone, Debug)]
pub enum Rigidity {
    /// `H^1 = 0` and `HH^2 = 0`; `steps` lists the first nonzero
    /// order before each gauge step applied to a random deformation, which
    /// ends trivial.
    Rigid { sample: Deformation, steps: Vec<usize>, gauged: Deformation },
    /// One of the groups is nonzero; a representative of a nonzero class
    /// of the first offending group is included.
    NotCertified { group: String, representative: Vec<BigInt> },
}

#[derive(Clone, Debug)]
pub struct RigidityReport {
    pub h1: CohomologyResult,
    pub hh2: CohomologyResult,
    pub verdict: Rigidity,
}

/// Computes `H^1(F*)` and `HH^2(A)`; if both vanish, gauges a random
/// order-`max_order` deformation to the trivial one.
pub fn rigidity_certificate(fc: &FComplex, max_order: usize, rng: &mut impl Rng) -> Result<RigidityReport> {
    let h1 = fc.cohomology(1)?;
    let hh2 = fc.hochschild().cohomology(2)?;
    let verdict = if !h1.is_zero() {
        Rigidity::NotCertified { group: "H^1".into(), representative: h1.representatives[0].clone() }
    } else if !hh2.is_zero() {
        Rigidity::NotCertified { group: "HH^2".into(), representative: hh2.representatives[0].clone() }
    } else {
        let sample = random_deformation(fc, max_order.max(1), 1, rng, 3)?;
        let mut gauged = sample.clone();
        let mut steps = Vec::new();
        while let Some(k) = gauged.first_nonzero() {
            steps.push(k);
            match gauge_step(&gauged, fc)? {
                Ok(step) => gauged = step.result,
                Err(failure) => {
                    return Err(Error::Internal(format!(
                        "gauge step failed although both groups vanish: {failure:?}"
                    )))
                }
            }
        }
        Rigidity::Rigid { sample, steps, gauged }
    };
    Ok(RigidityReport { h1, hh2, verdict })
}
