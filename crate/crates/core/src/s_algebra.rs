//! Actions of the truncated operation algebra on finite rings.

use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::doc::{read_json, DocRef, Int};
use crate::error::{Error, Result};
use crate::exp_seq::{ExpSeq, SeqIndex};
use crate::ln_structure::StructureTable;
use crate::matrix::{AdditiveMap, Matrix};
use crate::poly::{Generator, Monomial, Series};
use crate::ring::{FiniteRing, RingDocument};
use crate::verdict::{Verdict, Violation};

/// `alpha -> s_alpha` for every sequence of degree `<= bound`.
#[derive(Clone, Debug)]
pub struct ActionTable {
    ring: FiniteRing,
    index: Arc<SeqIndex>,
    maps: Vec<AdditiveMap>,
}

impl PartialEq for ActionTable {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.bound() == other.bound() && self.maps == other.maps
    }
}

impl ActionTable {
    /// `maps[p]` is the operation indexed by the `p`-th sequence of
    /// [`SeqIndex::new(bound)`](SeqIndex::new).
    pub fn new(ring: FiniteRing, bound: usize, maps: Vec<AdditiveMap>) -> Result<Self> {
        let index = Arc::new(SeqIndex::new(bound));
        if maps.len() != index.len() {
            return Err(Error::RankMismatch {
                what: "action table".into(),
                found: format!("{} maps", maps.len()),
                expected: format!("{} maps", index.len()),
            });
        }
        let r = ring.rank();
        for (p, m) in maps.iter().enumerate() {
            if m.rows() != r || m.cols() != r {
                return Err(Error::RankMismatch {
                    what: format!("matrix for {}", index.get(p)),
                    found: format!("{}x{}", m.rows(), m.cols()),
                    expected: format!("{r}x{r}"),
                });
            }
        }
        let maps = maps.iter().map(|m| ring.base().reduce_matrix(m)).collect();
        Ok(Self { ring, index, maps })
    }

    pub fn ring(&self) -> &FiniteRing {
        &self.ring
    }

    pub fn bound(&self) -> usize {
        self.index.bound()
    }

    pub fn index(&self) -> &SeqIndex {
        &self.index
    }

    pub fn shared_index(&self) -> Arc<SeqIndex> {
        Arc::clone(&self.index)
    }

    pub fn maps(&self) -> &[AdditiveMap] {
        &self.maps
    }

    /// The operation at sequence position `p`.
    pub fn at(&self, p: usize) -> &AdditiveMap {
        &self.maps[p]
    }

    pub fn get(&self, alpha: &ExpSeq) -> Option<&AdditiveMap> {
        self.index.position(alpha).map(|p| &self.maps[p])
    }

    /// The same action on sequences of degree `<= bound`.
    pub fn restrict(&self, bound: usize) -> Result<ActionTable> {
        if bound > self.bound() {
            return Err(Error::BoundMismatch(format!("cannot restrict bound {} up to {bound}", self.bound())));
        }
        let index = SeqIndex::new(bound);
        // shorter enumerations are prefixes of longer ones
        ActionTable::new(self.ring.clone(), bound, self.maps[..index.len()].to_vec())
    }

    pub fn to_document(&self) -> ActionDocument {
        ActionDocument {
            ring: DocRef::Inline(Box::new(self.ring.to_document())),
            bound: self.bound(),
            action: self
                .index
                .seqs()
                .iter()
                .zip(&self.maps)
                .map(|(alpha, m)| ActionEntry { alpha: alpha.clone(), matrix: matrix_rows(m) })
                .collect(),
        }
    }

    /// Parses an action document; nested ring references resolve against
    /// `base_dir`. Sequences not listed act by zero, except the zero
    /// sequence which defaults to the identity. No validation is implied.
    pub fn from_document(doc: ActionDocument, base_dir: Option<&Path>) -> Result<Self> {
        let (ring_doc, _) = doc.ring.resolve(base_dir)?;
        let ring = FiniteRing::from_document(&ring_doc)?;
        let index = SeqIndex::new(doc.bound);
        let r = ring.rank();
        let mut maps: Vec<Option<Matrix>> = vec![None; index.len()];
        for entry in doc.action {
            let p = index.position(&entry.alpha).ok_or_else(|| Error::DegreeOverflow {
                seq: entry.alpha.to_string(),
                degree: entry.alpha.degree(),
                bound: doc.bound,
            })?;
            if maps[p].is_some() {
                return Err(Error::Malformed(format!("operation {} listed twice", entry.alpha)));
            }
            maps[p] = Some(parse_matrix(&entry.matrix, r, &format!("matrix for {}", entry.alpha))?);
        }
        let maps = maps
            .into_iter()
            .enumerate()
            .map(|(p, m)| m.unwrap_or_else(|| if p == 0 { Matrix::identity(r) } else { Matrix::zeros(r, r) }))
            .collect();
        ActionTable::new(ring, doc.bound, maps)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let doc: ActionDocument = read_json(path)?;
        Self::from_document(doc, path.parent())
    }
}

pub(crate) fn matrix_rows(m: &Matrix) -> Vec<Vec<Int>> {
    m.to_rows().into_iter().map(|row| row.into_iter().map(Int).collect()).collect()
}

pub(crate) fn parse_matrix(rows: &[Vec<Int>], r: usize, what: &str) -> Result<Matrix> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.len() != r || rows.iter().any(|row| row.len() != r) {
        return Err(Error::RankMismatch {
            what: what.to_string(),
            found: format!("{}x{}", rows.len(), cols),
            expected: format!("{r}x{r}"),
        });
    }
    Ok(Matrix::from_rows(rows.iter().map(|row| row.iter().map(|v| v.0.clone()).collect()).collect()))
}

/// Serialized form of an [`ActionTable`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ActionDocument {
    pub ring: DocRef<RingDocument>,
    pub bound: usize,
    pub action: Vec<ActionEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ActionEntry {
    pub alpha: ExpSeq,
    pub matrix: Vec<Vec<Int>>,
}

fn check_bounds(table: &ActionTable, constants: &StructureTable) -> Result<()> {
    if constants.bound() < table.bound() {
        return Err(Error::BoundMismatch(format!(
            "structure table bound {} is below action bound {}",
            constants.bound(),
            table.bound()
        )));
    }
    Ok(())
}

/// `sum_gamma n_gamma s_gamma` for the pair at positions `(a, b)`.
pub(crate) fn expand_product(
    constants: &StructureTable,
    maps: &[Matrix],
    a: usize,
    b: usize,
    r: usize,
) -> Matrix {
    let mut out = Matrix::zeros(r, r);
    for (g, n) in constants.product(a, b) {
        out.add_scaled(n, &maps[*g]);
    }
    out
}

/// Checks, in order: `s_0 = 1`, the product formula for every pair, the
/// Cartan formula on every pair of basis elements, and `s_alpha(1) = 0` for
/// `alpha != 0`. Reports the first violation in canonical order.
pub fn validate_action(table: &ActionTable, constants: &StructureTable) -> Result<Verdict> {
    check_bounds(table, constants)?;
    let ring = table.ring();
    let base = ring.base();
    let r = ring.rank();
    let index = table.index();
    let same = |a: &Matrix, b: &Matrix| a.data().iter().zip(b.data()).all(|(x, y)| base.eq(x, y));

    if !same(table.at(0), &Matrix::identity(r)) {
        return Ok(Verdict::Fail(Violation::new("identity at zero", "alpha=[]")));
    }

    for a in 0..index.len() {
        for b in 0..index.len() {
            if index.degree(a) + index.degree(b) > table.bound() {
                continue;
            }
            let lhs = table.at(a).mul(table.at(b));
            let rhs = expand_product(constants, table.maps(), a, b, r);
            if !same(&lhs, &rhs) {
                return Ok(Verdict::Fail(Violation::new(
                    "product formula",
                    format!("alpha={} beta={}", index.get(a), index.get(b)),
                )));
            }
        }
    }

    if let Some(v) = cartan_violation(ring, index, table.maps(), None) {
        return Ok(Verdict::Fail(v));
    }

    for p in 1..index.len() {
        let image = table.at(p).apply(ring.unit());
        if !base.all_zero(&image) {
            return Ok(Verdict::Fail(Violation::new("unit annihilation", format!("alpha={}", index.get(p)))));
        }
    }
    Ok(Verdict::Pass)
}

/// First `(alpha, a, b)` where `lhs_alpha(ab) != sum_{beta+gamma=alpha} s_beta(a) s_gamma(b)`.
///
/// With `split = None` the left side and both factors use `maps`; otherwise
/// the right side is `sum_i sum_split left_i(a) right_i(b)` over the given
/// pairs of map families (used for truncated deformations).
pub(crate) fn cartan_violation(
    ring: &FiniteRing,
    index: &SeqIndex,
    lhs: &[Matrix],
    split: Option<&[(&[Matrix], &[Matrix])]>,
) -> Option<Violation> {
    let base = ring.base();
    let r = ring.rank();
    let default = [(lhs, lhs)];
    let families = split.unwrap_or(&default);
    for p in 0..index.len() {
        for i in 0..r {
            for j in 0..r {
                let left = lhs[p].apply(ring.product(i, j));
                let mut right = vec![BigInt::zero(); r];
                for (f, g) in families {
                    for &(b, c) in index.splittings(p) {
                        let x = ring.mul(&f[b].column(i), &g[c].column(j));
                        for (acc, v) in right.iter_mut().zip(x) {
                            *acc += v;
                        }
                    }
                }
                if !left.iter().zip(&right).all(|(x, y)| base.eq(x, y)) {
                    let names = ring.basis_names();
                    return Some(Violation::new(
                        "Cartan formula",
                        format!("alpha={} a={} b={}", index.get(p), names[i], names[j]),
                    ));
                }
            }
        }
    }
    None
}

/// Identity in degree zero, zero in positive degree.
pub fn trivial_instance(ring: &FiniteRing, bound: usize) -> ActionTable {
    let r = ring.rank();
    let len = SeqIndex::new(bound).len();
    let maps = (0..len).map(|p| if p == 0 { Matrix::identity(r) } else { Matrix::zeros(r, r) }).collect();
    ActionTable::new(ring.clone(), bound, maps).expect("shapes are consistent")
}

/// The polynomial model: `Z[x]/(x^{N+2})` on which the total operation
/// `sum_alpha s_alpha b^alpha` is the ring map `x -> x + sum_i b_i x^{i+1}`.
///
/// Concretely `s_gamma(x^k)` is the coefficient of `b^gamma` in
/// `(x + sum b_i x^{i+1})^k`. The ideal `(x^{N+2})` is stable because every
/// operation raises the power of `x`.
pub fn canonical_instance(bound: usize) -> (FiniteRing, ActionTable) {
    let rank = bound + 2;
    let ring = FiniteRing::truncated_polynomial(crate::ring::BaseRing::Integers, rank);
    let index = SeqIndex::new(bound);
    let series = Series::universal(0, bound);
    let powers = series.powers(rank - 1);
    let maps = index
        .seqs()
        .iter()
        .map(|gamma| {
            let mono = monomial_of(gamma);
            let mut m = Matrix::zeros(rank, rank);
            for k in 0..rank {
                let target = k + gamma.degree();
                if target < rank {
                    m[(target, k)] = powers[k].coefficient(target).coefficient(&mono);
                }
            }
            m
        })
        .collect();
    let table = ActionTable::new(ring.clone(), bound, maps).expect("shapes are consistent");
    (ring, table)
}

fn monomial_of(gamma: &ExpSeq) -> Monomial {
    let mut m = Monomial::one();
    for &(i, mult) in gamma.sparse() {
        for _ in 0..mult {
            m = m.mul(&Monomial::generator(Generator::new(0, i)));
        }
    }
    m
}
