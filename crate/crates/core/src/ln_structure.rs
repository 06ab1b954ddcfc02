//! Structure constants `n_gamma` of the product `s_alpha s_beta`.
//!
//! The operation algebra is dual to the coordinate ring of the group of
//! formal diffeomorphisms `x + b_1 x^2 + b_2 x^3 + ...`. With `b'` and `b''`
//! two copies of the coordinates, the composite series has coefficients
//! `c_n(b', b'')`, and
//!
//! ```text
//! s_alpha s_beta = sum_gamma n_gamma s_gamma,
//! n_gamma = coefficient of b'^alpha b''^beta in prod_i c_i^{gamma_i}.
//! ```
//!
//! Which copy carries `alpha` is the [`Convention`]. The default is the one
//! under which the polynomial-model action satisfies the product formula
//! with `s_alpha s_beta` meaning "apply `s_beta` first".

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::doc::Int;
use crate::error::{Error, Result};
use crate::exp_seq::{ExpSeq, SeqIndex};
use crate::poly::{compose_series, Generator, Monomial, TruncatedPolynomial};
use crate::verdict::{Verdict, Violation};

/// Which side of the composite series carries the left factor `alpha`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `alpha` is read off the inner series of the composite.
    #[default]
    AlphaInner,
    /// `alpha` is read off the outer series.
    AlphaOuter,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::AlphaInner => "alpha_inner",
            Convention::AlphaOuter => "alpha_outer",
        })
    }
}

const INNER: u8 = 0;
const OUTER: u8 = 1;

/// Products `s_alpha s_beta` for all pairs with total degree `<= bound`.
#[derive(Clone, Debug)]
pub struct StructureTable {
    index: SeqIndex,
    convention: Convention,
    /// `products[i * len + j]`: sparse `(position of gamma, n_gamma)`,
    /// sorted by position.
    products: Vec<Vec<(usize, BigInt)>>,
}

impl StructureTable {
    pub fn build(bound: usize, convention: Convention) -> Self {
        let index = SeqIndex::new(bound);
        let len = index.len();
        let gens = |family: u8| -> Vec<TruncatedPolynomial> {
            (1..=bound as u32).map(|i| TruncatedPolynomial::generator(bound, Generator::new(family, i))).collect()
        };
        let composite = compose_series(&gens(OUTER), &gens(INNER), bound);
        let (alpha_family, beta_family) = match convention {
            Convention::AlphaInner => (INNER, OUTER),
            Convention::AlphaOuter => (OUTER, INNER),
        };

        let mut acc: Vec<BTreeMap<usize, BigInt>> = vec![BTreeMap::new(); len * len];
        for (g, gamma) in index.seqs().iter().enumerate() {
            let mut power = TruncatedPolynomial::one(bound);
            for &(i, mult) in gamma.sparse() {
                power = power.mul(&composite[i as usize].pow(mult));
            }
            for (mono, coeff) in power.terms() {
                let alpha = seq_of(mono, alpha_family);
                let beta = seq_of(mono, beta_family);
                let (Some(a), Some(b)) = (index.position(&alpha), index.position(&beta)) else {
                    unreachable!("monomial weight is bounded by the degree of gamma");
                };
                *acc[a * len + b].entry(g).or_default() += coeff;
            }
        }
        let products = acc.into_iter().map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect()).collect();
        Self { index, convention, products }
    }

    pub fn bound(&self) -> usize {
        self.index.bound()
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn index(&self) -> &SeqIndex {
        &self.index
    }

    /// Positional lookup: `(gamma position, n_gamma)` for the pair at
    /// positions `(a, b)`. Empty when the degree sum exceeds the bound.
    pub fn product(&self, a: usize, b: usize) -> &[(usize, BigInt)] {
        &self.products[a * self.index.len() + b]
    }

    /// `{gamma -> n_gamma}` for `s_alpha s_beta`, in canonical order.
    pub fn constants(&self, alpha: &ExpSeq, beta: &ExpSeq) -> Result<Vec<(ExpSeq, BigInt)>> {
        let total = alpha.degree() + beta.degree();
        if total > self.bound() {
            return Err(Error::DegreeOverflow {
                seq: format!("{alpha} * {beta}"),
                degree: total,
                bound: self.bound(),
            });
        }
        let a = self.index.position(alpha).expect("degree within bound");
        let b = self.index.position(beta).expect("degree within bound");
        Ok(self.product(a, b).iter().map(|(g, c)| (self.index.get(*g).clone(), c.clone())).collect())
    }

    /// Replaces one constant; meant for fault injection in tests.
    pub fn set_constant(&mut self, alpha: &ExpSeq, beta: &ExpSeq, gamma: &ExpSeq, value: BigInt) -> Result<()> {
        let pos = |s: &ExpSeq| {
            self.index.position(s).ok_or_else(|| Error::DegreeOverflow {
                seq: s.to_string(),
                degree: s.degree(),
                bound: self.bound(),
            })
        };
        let (a, b, g) = (pos(alpha)?, pos(beta)?, pos(gamma)?);
        let entry = &mut self.products[a * self.index.len() + b];
        entry.retain(|(p, _)| *p != g);
        if !value.is_zero() {
            entry.push((g, value));
            entry.sort_by_key(|(p, _)| *p);
        }
        Ok(())
    }

    /// Every nonzero constant sits in degree `deg alpha + deg beta`.
    pub fn degree_additivity_report(&self) -> Verdict {
        let len = self.index.len();
        for a in 0..len {
            for b in 0..len {
                for (g, _) in self.product(a, b) {
                    if self.index.degree(*g) != self.index.degree(a) + self.index.degree(b) {
                        return Verdict::Fail(Violation::new(
                            "degree additivity",
                            format!("alpha={} beta={} gamma={}", self.index.get(a), self.index.get(b), self.index.get(*g)),
                        ));
                    }
                }
            }
        }
        Verdict::Pass
    }

    /// Exhaustive check of `(s_a s_b) s_c = s_a (s_b s_c)` expanded through
    /// the constants; reports the first `(alpha, beta, gamma, epsilon)`.
    pub fn associativity_report(&self) -> Verdict {
        let len = self.index.len();
        let bound = self.bound();
        for a in 0..len {
            for b in 0..len {
                for c in 0..len {
                    let total = self.index.degree(a) + self.index.degree(b) + self.index.degree(c);
                    if total > bound {
                        continue;
                    }
                    let mut left: BTreeMap<usize, BigInt> = BTreeMap::new();
                    for (d, n) in self.product(a, b) {
                        for (e, m) in self.product(*d, c) {
                            *left.entry(*e).or_default() += n * m;
                        }
                    }
                    let mut right: BTreeMap<usize, BigInt> = BTreeMap::new();
                    for (r, n) in self.product(b, c) {
                        for (e, m) in self.product(a, *r) {
                            *right.entry(*e).or_default() += n * m;
                        }
                    }
                    let keys: std::collections::BTreeSet<usize> = left.keys().chain(right.keys()).copied().collect();
                    for e in keys {
                        let l = left.get(&e).cloned().unwrap_or_default();
                        let r = right.get(&e).cloned().unwrap_or_default();
                        if l != r {
                            return Verdict::Fail(
                                Violation::new(
                                    "associativity",
                                    format!(
                                        "alpha={} beta={} gamma={} epsilon={}",
                                        self.index.get(a),
                                        self.index.get(b),
                                        self.index.get(c),
                                        self.index.get(e)
                                    ),
                                )
                                .with_detail(format!("{l} != {r}")),
                            );
                        }
                    }
                }
            }
        }
        Verdict::Pass
    }

    pub fn to_document(&self) -> StructureDocument {
        let len = self.index.len();
        let mut entries = Vec::new();
        for a in 0..len {
            for b in 0..len {
                if self.index.degree(a) + self.index.degree(b) > self.bound() {
                    continue;
                }
                entries.push(ProductEntry {
                    alpha: self.index.get(a).clone(),
                    beta: self.index.get(b).clone(),
                    constants: self
                        .product(a, b)
                        .iter()
                        .map(|(g, c)| Constant { gamma: self.index.get(*g).clone(), coeff: Int(c.clone()) })
                        .collect(),
                });
            }
        }
        StructureDocument {
            format: STRUCTURE_FORMAT.into(),
            version: crate::VERSION.into(),
            bound: self.bound(),
            convention: self.convention,
            entries,
        }
    }

    /// Loads a table document. Values are taken as given (no consistency
    /// check), so corrupted tables can be studied with the reports above.
    pub fn from_document(doc: &StructureDocument) -> Result<Self> {
        let index = SeqIndex::new(doc.bound);
        let len = index.len();
        let mut products = vec![Vec::new(); len * len];
        let pos = |s: &ExpSeq| {
            index.position(s).ok_or_else(|| Error::DegreeOverflow {
                seq: s.to_string(),
                degree: s.degree(),
                bound: doc.bound,
            })
        };
        for entry in &doc.entries {
            let (a, b) = (pos(&entry.alpha)?, pos(&entry.beta)?);
            let mut row: Vec<(usize, BigInt)> = Vec::new();
            for c in &entry.constants {
                if !c.coeff.0.is_zero() {
                    row.push((pos(&c.gamma)?, c.coeff.0.clone()));
                }
            }
            row.sort_by_key(|(p, _)| *p);
            products[a * len + b] = row;
        }
        Ok(Self { index, convention: doc.convention, products })
    }
}

fn seq_of(mono: &Monomial, family: u8) -> ExpSeq {
    ExpSeq::from_dense(&mono.family_exponents(family))
}

pub const STRUCTURE_FORMAT: &str = "ln-deform/structure-table";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StructureDocument {
    #[serde(default)]
    pub format: String,
    #[serde(default)]
    pub version: String,
    pub bound: usize,
    #[serde(default)]
    pub convention: Convention,
    pub entries: Vec<ProductEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProductEntry {
    pub alpha: ExpSeq,
    pub beta: ExpSeq,
    pub constants: Vec<Constant>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Constant {
    pub gamma: ExpSeq,
    pub coeff: Int,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(d: &[u32]) -> ExpSeq {
        ExpSeq::from_dense(d)
    }

    #[test]
    fn square_of_first_operation() {
        let t = StructureTable::build(2, Convention::AlphaInner);
        let got = t.constants(&s(&[1]), &s(&[1])).unwrap();
        assert_eq!(got, vec![(s(&[2]), BigInt::from(2)), (s(&[0, 1]), BigInt::from(2))]);
    }

    #[test]
    fn zero_sequence_is_the_identity_operation() {
        let t = StructureTable::build(4, Convention::AlphaInner);
        for beta in t.index().seqs() {
            let one = vec![(beta.clone(), BigInt::from(1))];
            assert_eq!(t.constants(&ExpSeq::zero(), beta).unwrap(), one);
            assert_eq!(t.constants(beta, &ExpSeq::zero()).unwrap(), one);
        }
    }

    #[test]
    fn conventions_differ_on_noncommuting_pairs() {
        let a = StructureTable::build(3, Convention::AlphaInner);
        let b = StructureTable::build(3, Convention::AlphaOuter);
        let (x, y) = (s(&[1]), s(&[0, 1]));
        assert_eq!(a.constants(&x, &y).unwrap(), b.constants(&y, &x).unwrap());
        assert_ne!(a.constants(&x, &y).unwrap(), a.constants(&y, &x).unwrap());
    }

    #[test]
    fn bound_is_enforced() {
        let t = StructureTable::build(2, Convention::AlphaInner);
        assert!(matches!(t.constants(&s(&[1]), &s(&[0, 1])), Err(Error::DegreeOverflow { .. })));
    }

    #[test]
    fn associative_and_graded_through_six() {
        for n in 0..=6 {
            let t = StructureTable::build(n, Convention::AlphaInner);
            assert!(t.associativity_report().is_pass(), "N={n}");
            assert!(t.degree_additivity_report().is_pass(), "N={n}");
        }
    }

    #[test]
    fn perturbed_table_is_caught() {
        let mut t = StructureTable::build(4, Convention::AlphaInner);
        t.set_constant(&s(&[1]), &s(&[1]), &s(&[2]), BigInt::from(3)).unwrap();
        let v = t.associativity_report();
        assert_eq!(v.violation().unwrap().rule, "associativity");
    }

    #[test]
    fn document_round_trip() {
        let t = StructureTable::build(3, Convention::AlphaInner);
        let doc = t.to_document();
        let back = StructureTable::from_document(&doc).unwrap();
        assert_eq!(back.products, t.products);
    }
}
