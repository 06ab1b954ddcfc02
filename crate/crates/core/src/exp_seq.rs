//! Exponential sequences and the bounded index sets built from them.
//!
//! An [`ExpSeq`] is a finitely supported sequence `(a_1, a_2, ...)` of
//! non-negative integers, stored sparsely. Its degree is `sum i * a_i`, which
//! makes the product formula of the operation algebra degree-additive.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A finitely supported sequence of non-negative integers.
///
/// Entries are kept as `(index, multiplicity)` pairs with `index >= 1`,
/// `multiplicity >= 1` and strictly increasing indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ExpSeq {
    entries: Vec<(u32, u32)>,
}

impl ExpSeq {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a sequence from its dense form `[a_1, a_2, ...]`.
    pub fn from_dense(dense: &[u32]) -> Self {
        let entries = dense
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(|(i, &m)| (i as u32 + 1, m))
            .collect();
        Self { entries }
    }

    /// The sequence with a single entry `mult` at position `index` (1-based).
    pub fn unit(index: u32, mult: u32) -> Self {
        assert!(index >= 1, "exponential sequences are indexed from 1");
        if mult == 0 {
            return Self::zero();
        }
        Self { entries: vec![(index, mult)] }
    }

    pub fn from_sparse(mut pairs: Vec<(u32, u32)>) -> Result<Self, Error> {
        pairs.retain(|&(_, m)| m > 0);
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Malformed(format!("repeated index {} in sparse sequence", w[0].0)));
            }
        }
        if pairs.iter().any(|&(i, _)| i == 0) {
            return Err(Error::Malformed("sequence index 0 is not allowed".into()));
        }
        Ok(Self { entries: pairs })
    }

    pub fn sparse(&self) -> &[(u32, u32)] {
        &self.entries
    }

    /// Dense form with trailing zeros omitted.
    pub fn to_dense(&self) -> Vec<u32> {
        let len = self.entries.last().map_or(0, |&(i, _)| i as usize);
        let mut dense = vec![0; len];
        for &(i, m) in &self.entries {
            dense[i as usize - 1] = m;
        }
        dense
    }

    /// Entry `a_i` (1-based; zero outside the support).
    pub fn get(&self, index: u32) -> u32 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map_or(0, |pos| self.entries[pos].1)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `sum i * a_i`.
    pub fn degree(&self) -> usize {
        self.entries.iter().map(|&(i, m)| i as usize * m as usize).sum()
    }

    pub fn add(&self, other: &ExpSeq) -> ExpSeq {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(i, m)), Some(&&(j, n))) => match i.cmp(&j) {
                    Ordering::Less => {
                        out.push((i, m));
                        a.next();
                    }
                    Ordering::Greater => {
                        out.push((j, n));
                        b.next();
                    }
                    Ordering::Equal => {
                        out.push((i, m + n));
                        a.next();
                        b.next();
                    }
                },
                (Some(&&p), None) => {
                    out.push(p);
                    a.next();
                }
                (None, Some(&&p)) => {
                    out.push(p);
                    b.next();
                }
                (None, None) => break,
            }
        }
        ExpSeq { entries: out }
    }

    /// `self - other`, or `None` if some entry would go negative.
    pub fn checked_sub(&self, other: &ExpSeq) -> Option<ExpSeq> {
        let mut out = Vec::with_capacity(self.entries.len());
        let mut rest = other.entries.iter().peekable();
        for &(i, m) in &self.entries {
            let mut m = m;
            if let Some(&&(j, n)) = rest.peek() {
                if j < i {
                    return None;
                }
                if j == i {
                    m = m.checked_sub(n)?;
                    rest.next();
                }
            }
            if m > 0 {
                out.push((i, m));
            }
        }
        if rest.next().is_some() {
            return None;
        }
        Some(ExpSeq { entries: out })
    }

    /// All ordered pairs `(beta, gamma)` with `beta + gamma = self`.
    ///
    /// The pairs are listed with `beta` running through the sub-sequences of
    /// `self` in mixed-radix order (first index varies slowest), so the count
    /// is `prod (a_i + 1)`.
    pub fn splittings(&self) -> Vec<(ExpSeq, ExpSeq)> {
        let radices: Vec<u32> = self.entries.iter().map(|&(_, m)| m + 1).collect();
        let total: usize = radices.iter().map(|&r| r as usize).product();
        let mut out = Vec::with_capacity(total);
        let mut digits = vec![0u32; radices.len()];
        for _ in 0..total {
            let mut beta = Vec::new();
            let mut gamma = Vec::new();
            for (k, &(i, m)) in self.entries.iter().enumerate() {
                if digits[k] > 0 {
                    beta.push((i, digits[k]));
                }
                if m - digits[k] > 0 {
                    gamma.push((i, m - digits[k]));
                }
            }
            out.push((ExpSeq { entries: beta }, ExpSeq { entries: gamma }));
            for k in (0..digits.len()).rev() {
                digits[k] += 1;
                if digits[k] < radices[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
        out
    }

    /// Every sequence of degree at most `bound`, in canonical order.
    pub fn enumerate(bound: usize) -> Vec<ExpSeq> {
        let mut out = Vec::new();
        for d in 0..=bound {
            let mut level = Vec::new();
            partitions_of(d, d, &mut Vec::new(), &mut level);
            level.sort();
            out.extend(level);
        }
        out
    }
}

// Partitions of `remaining` into parts of size <= `max_part`, as sequences
// (a part of size i contributes one to a_i).
fn partitions_of(remaining: usize, max_part: usize, parts: &mut Vec<usize>, out: &mut Vec<ExpSeq>) {
    if remaining == 0 {
        let mut entries: Vec<(u32, u32)> = Vec::new();
        for &p in parts.iter().rev() {
            match entries.last_mut() {
                Some((i, m)) if *i as usize == p => *m += 1,
                _ => entries.push((p as u32, 1)),
            }
        }
        out.push(ExpSeq { entries });
        return;
    }
    for p in (1..=max_part.min(remaining)).rev() {
        parts.push(p);
        partitions_of(remaining - p, p, parts, out);
        parts.pop();
    }
}

impl Ord for ExpSeq {
    /// Degree first, then lexicographic on the sparse form.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.entries.cmp(&other.entries))
    }
}

impl PartialOrd for ExpSeq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExpSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, a) in self.to_dense().iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for ExpSeq {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s
            .trim()
            .strip_prefix('[')
            .and_then(|rest| rest.strip_suffix(']'))
            .ok_or_else(|| Error::Malformed(format!("expected `[a1,a2,...]`, got `{s}`")))?;
        if body.trim().is_empty() {
            return Ok(ExpSeq::zero());
        }
        let dense = body
            .split(',')
            .map(|t| t.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Error::Malformed(format!("bad sequence entry in `{s}`: {e}")))?;
        Ok(ExpSeq::from_dense(&dense))
    }
}

impl Serialize for ExpSeq {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_dense().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExpSeq {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let dense = Vec::<u32>::deserialize(deserializer)?;
        Ok(ExpSeq::from_dense(&dense))
    }
}

/// The canonical enumeration of sequences of degree `<= bound`, with
/// position lookup and precomputed splittings.
#[derive(Clone, Debug)]
pub struct SeqIndex {
    bound: usize,
    seqs: Vec<ExpSeq>,
    degrees: Vec<usize>,
    pos: HashMap<ExpSeq, usize>,
    splits: Vec<Vec<(usize, usize)>>,
}

impl SeqIndex {
    pub fn new(bound: usize) -> Self {
        let seqs = ExpSeq::enumerate(bound);
        let pos: HashMap<ExpSeq, usize> = seqs.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let degrees = seqs.iter().map(ExpSeq::degree).collect();
        let splits = seqs
            .iter()
            .map(|s| s.splittings().into_iter().map(|(b, c)| (pos[&b], pos[&c])).collect())
            .collect();
        Self { bound, seqs, degrees, pos, splits }
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.seqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seqs.is_empty()
    }

    pub fn seqs(&self) -> &[ExpSeq] {
        &self.seqs
    }

    pub fn get(&self, p: usize) -> &ExpSeq {
        &self.seqs[p]
    }

    pub fn degree(&self, p: usize) -> usize {
        self.degrees[p]
    }

    pub fn position(&self, s: &ExpSeq) -> Option<usize> {
        self.pos.get(s).copied()
    }

    /// Position pairs `(beta, gamma)` with `beta + gamma` the sequence at `p`.
    pub fn splittings(&self, p: usize) -> &[(usize, usize)] {
        &self.splits[p]
    }
}

/// Tuples `(alpha_1, ..., alpha_n)` of sequence positions whose total degree
/// is within the bound, in lexicographic order of positions.
#[derive(Clone, Debug)]
pub struct TupleIndex {
    arity: usize,
    base: usize,
    tuples: Vec<Vec<usize>>,
    degrees: Vec<usize>,
    pos: HashMap<u128, usize>,
}

impl TupleIndex {
    pub fn new(seqs: &SeqIndex, arity: usize) -> Self {
        let base = seqs.len();
        let mut tuples = Vec::new();
        let mut degrees = Vec::new();
        let mut current = Vec::with_capacity(arity);
        fill_tuples(seqs, arity, 0, &mut current, &mut tuples, &mut degrees);
        let mut index = Self { arity, base, tuples, degrees, pos: HashMap::new() };
        index.pos = index.tuples.iter().enumerate().map(|(i, t)| (index.key(t), i)).collect();
        index
    }

    fn key(&self, tuple: &[usize]) -> u128 {
        tuple.iter().fold(0u128, |acc, &p| acc * self.base as u128 + p as u128)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn get(&self, i: usize) -> &[usize] {
        &self.tuples[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn position(&self, tuple: &[usize]) -> Option<usize> {
        debug_assert_eq!(tuple.len(), self.arity);
        self.pos.get(&self.key(tuple)).copied()
    }
}

fn fill_tuples(
    seqs: &SeqIndex,
    arity: usize,
    used: usize,
    current: &mut Vec<usize>,
    tuples: &mut Vec<Vec<usize>>,
    degrees: &mut Vec<usize>,
) {
    if current.len() == arity {
        tuples.push(current.clone());
        degrees.push(used);
        return;
    }
    for p in 0..seqs.len() {
        let d = seqs.degree(p);
        if used + d <= seqs.bound() {
            current.push(p);
            fill_tuples(seqs, arity, used + d, current, tuples, degrees);
            current.pop();
        }
    }
}

/// Number of integer partitions of `n`, by the classical table recurrence.
/// Independent of [`ExpSeq::enumerate`]; used as its oracle.
pub fn partition_count(n: usize) -> u64 {
    let mut table = vec![0u64; n + 1];
    table[0] = 1;
    for part in 1..=n {
        for total in part..=n {
            table[total] += table[total - part];
        }
    }
    table[n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(dense: &[u32]) -> ExpSeq {
        ExpSeq::from_dense(dense)
    }

    #[test]
    fn degree_examples() {
        assert_eq!(ExpSeq::zero().degree(), 0);
        assert_eq!(seq(&[1]).degree(), 1);
        assert_eq!(seq(&[2, 1]).degree(), 4);
    }

    #[test]
    fn add_examples() {
        let a = seq(&[3, 0, 1]);
        assert_eq!(a.add(&ExpSeq::zero()), a);
        assert_eq!(seq(&[1]).add(&seq(&[1])), seq(&[2]));
        assert_eq!(seq(&[1, 1]).add(&seq(&[0, 2])), seq(&[1, 3]));
    }

    #[test]
    fn enumerate_small_bounds() {
        assert_eq!(ExpSeq::enumerate(0), vec![ExpSeq::zero()]);
        assert_eq!(ExpSeq::enumerate(1), vec![ExpSeq::zero(), seq(&[1])]);
        let four = ExpSeq::enumerate(4).into_iter().filter(|s| s.degree() == 4).count();
        assert_eq!(four, 5);
    }

    #[test]
    fn enumerate_matches_partition_counts() {
        let all = ExpSeq::enumerate(10);
        for d in 0..=10 {
            let count = all.iter().filter(|s| s.degree() == d).count() as u64;
            assert_eq!(count, partition_count(d), "degree {d}");
        }
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, all, "enumeration must be sorted and duplicate-free");
    }

    #[test]
    fn splitting_examples() {
        assert_eq!(ExpSeq::zero().splittings(), vec![(ExpSeq::zero(), ExpSeq::zero())]);
        assert_eq!(
            seq(&[1]).splittings(),
            vec![(ExpSeq::zero(), seq(&[1])), (seq(&[1]), ExpSeq::zero())]
        );
        assert_eq!(seq(&[2, 1]).splittings().len(), 6);
    }

    #[test]
    fn text_form_round_trip() {
        for text in ["[]", "[1]", "[2,1]", "[0,0,3]"] {
            let s: ExpSeq = text.parse().unwrap();
            assert_eq!(s.to_string(), text);
        }
        assert_eq!("[1,0,0]".parse::<ExpSeq>().unwrap().to_string(), "[1]");
        assert_eq!(" [ 0 , 2 ] ".parse::<ExpSeq>().unwrap(), seq(&[0, 2]));
        assert!("1,2".parse::<ExpSeq>().is_err());
        assert!("[a]".parse::<ExpSeq>().is_err());
        assert!("[-1]".parse::<ExpSeq>().is_err());
    }

    #[test]
    fn sparse_constructor_rejects_bad_input() {
        assert!(ExpSeq::from_sparse(vec![(1, 1), (1, 2)]).is_err());
        assert!(ExpSeq::from_sparse(vec![(0, 1)]).is_err());
        assert_eq!(ExpSeq::from_sparse(vec![(3, 1), (1, 0), (2, 2)]).unwrap(), seq(&[0, 2, 1]));
    }

    #[test]
    fn tuple_index_respects_bound() {
        let seqs = SeqIndex::new(3);
        let pairs = TupleIndex::new(&seqs, 2);
        // total-degree counts 1, 2, 5, 10 by convolution of partition numbers
        assert_eq!(pairs.len(), 18);
        for (i, t) in pairs.tuples().iter().enumerate() {
            assert!(pairs.degree(i) <= 3);
            assert_eq!(pairs.position(t), Some(i));
        }
    }

    fn arb_seq() -> impl Strategy<Value = ExpSeq> {
        proptest::collection::vec(0u32..4, 0..5).prop_map(|d| ExpSeq::from_dense(&d))
    }

    proptest! {
        #[test]
        fn degree_is_additive(a in arb_seq(), b in arb_seq()) {
            prop_assert_eq!(a.add(&b).degree(), a.degree() + b.degree());
            prop_assert_eq!(a.add(&b).checked_sub(&b), Some(a.clone()));
        }

        #[test]
        fn splittings_are_complete(a in arb_seq()) {
            let splits = a.splittings();
            let expected: usize = a.to_dense().iter().map(|&m| m as usize + 1).product();
            prop_assert_eq!(splits.len(), expected);
            for (b, c) in &splits {
                prop_assert_eq!(&b.add(c), &a);
            }
            let mut uniq = splits.clone();
            uniq.sort();
            uniq.dedup();
            prop_assert_eq!(uniq.len(), splits.len());
        }
    }
}
