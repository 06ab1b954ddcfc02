//! Sparse multivariate integer polynomials truncated by weight, and the
//! truncated power series built from them.
//!
//! Generators carry a family tag (so two copies of `b_1, b_2, ...` can live in
//! one ring) and an index `i >= 1` of weight `i`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    pub family: u8,
    pub index: u32,
}

impl Generator {
    pub fn new(family: u8, index: u32) -> Self {
        assert!(index >= 1);
        Self { family, index }
    }

    pub fn weight(&self) -> usize {
        self.index as usize
    }
}

/// A monomial: sorted `(generator, exponent)` pairs with positive exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Generator, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn generator(g: Generator) -> Self {
        Self(vec![(g, 1)])
    }

    pub fn factors(&self) -> &[(Generator, u32)] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().map(|(g, e)| g.weight() * *e as usize).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out: Vec<(Generator, u32)> = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            if j == other.0.len() || (i < self.0.len() && self.0[i].0 < other.0[j].0) {
                out.push(self.0[i]);
                i += 1;
            } else if i == self.0.len() || other.0[j].0 < self.0[i].0 {
                out.push(other.0[j]);
                j += 1;
            } else {
                out.push((self.0[i].0, self.0[i].1 + other.0[j].1));
                i += 1;
                j += 1;
            }
        }
        Monomial(out)
    }

    /// Exponents of the generators of one family, as a dense vector indexed
    /// from 1 (position 0 holds the exponent of index 1).
    pub fn family_exponents(&self, family: u8) -> Vec<u32> {
        let mut dense = Vec::new();
        for (g, e) in &self.0 {
            if g.family == family {
                let i = g.index as usize;
                if dense.len() < i {
                    dense.resize(i, 0);
                }
                dense[i - 1] = *e;
            }
        }
        dense
    }
}

/// An integer polynomial whose monomials all have weight `<= bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedPolynomial {
    bound: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl TruncatedPolynomial {
    pub fn zero(bound: usize) -> Self {
        Self { bound, terms: BTreeMap::new() }
    }

    pub fn one(bound: usize) -> Self {
        Self::monomial(bound, Monomial::one(), BigInt::one())
    }

    pub fn generator(bound: usize, g: Generator) -> Self {
        Self::monomial(bound, Monomial::generator(g), BigInt::one())
    }

    pub fn monomial(bound: usize, m: Monomial, c: BigInt) -> Self {
        let mut p = Self::zero(bound);
        p.add_term(m, c);
        p
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() || m.weight() > self.bound {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut out = Self::zero(self.bound);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let bound = self.bound.min(other.bound);
        let mut acc: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            let w1 = m1.weight();
            for (m2, c2) in &other.terms {
                if w1 + m2.weight() > bound {
                    continue;
                }
                *acc.entry(m1.mul(m2)).or_default() += c1 * c2;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Self { bound, terms: acc }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(self.bound);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }
}

impl fmt::Display for TruncatedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (g, e) in m.factors() {
                let primes = "'".repeat(g.family as usize + 1);
                write!(f, "*b{}{}", g.index, primes)?;
                if *e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// A power series `sum_k c_k x^k` with polynomial coefficients, cut off
/// above `x^{max_power}`.
#[derive(Clone, Debug)]
pub struct Series {
    coeffs: Vec<TruncatedPolynomial>,
}

impl Series {
    /// `x + sum_{i=1}^{N} b_i x^{i+1}` with the given coefficient list
    /// `b_1..b_N`, truncated above `x^{N+1}`.
    pub fn from_generator_coefficients(b: &[TruncatedPolynomial], bound: usize) -> Self {
        let mut coeffs = vec![TruncatedPolynomial::zero(bound); bound + 2];
        coeffs[1] = TruncatedPolynomial::one(bound);
        for (i, bi) in b.iter().enumerate().take(bound) {
            coeffs[i + 2] = bi.clone();
        }
        Self { coeffs }
    }

    /// The universal series `x + sum b_i x^{i+1}` in generator family `family`.
    pub fn universal(family: u8, bound: usize) -> Self {
        let b: Vec<_> = (1..=bound as u32)
            .map(|i| TruncatedPolynomial::generator(bound, Generator::new(family, i)))
            .collect();
        Self::from_generator_coefficients(&b, bound)
    }

    pub fn max_power(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficient(&self, k: usize) -> &TruncatedPolynomial {
        &self.coeffs[k]
    }

    pub fn mul(&self, other: &Series) -> Series {
        let top = self.max_power().min(other.max_power());
        let bound = self.coeffs[0].bound();
        let mut coeffs = vec![TruncatedPolynomial::zero(bound); top + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(top + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(top + 1 - i) {
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        Series { coeffs }
    }

    /// Successive powers `self^0, self^1, ..., self^count`.
    pub fn powers(&self, count: usize) -> Vec<Series> {
        let bound = self.coeffs[0].bound();
        let mut one = vec![TruncatedPolynomial::zero(bound); self.coeffs.len()];
        one[0] = TruncatedPolynomial::one(bound);
        let mut out = vec![Series { coeffs: one }];
        for k in 0..count {
            let next = out[k].mul(self);
            out.push(next);
        }
        out
    }
}

/// Composes `outer(inner(x))` for series of the form `x + sum b_i x^{i+1}`.
///
/// `outer` and `inner` hold the coefficients `b_1..b_N`. Returns the
/// coefficient of `x^{n+1}` in the composite for `n = 0..=N`.
pub fn compose_series(
    outer: &[TruncatedPolynomial],
    inner: &[TruncatedPolynomial],
    bound: usize,
) -> Vec<TruncatedPolynomial> {
    let inner = Series::from_generator_coefficients(inner, bound);
    let powers = inner.powers(bound + 1);
    let mut out = vec![TruncatedPolynomial::zero(bound); bound + 1];
    for (n, slot) in out.iter_mut().enumerate() {
        // x^{j+1} in the outer series has coefficient 1 (j = 0) or b_j
        for j in 0..=n {
            let term = powers[j + 1].coefficient(n + 1);
            if term.is_zero() {
                continue;
            }
            let contribution = if j == 0 {
                term.clone()
            } else {
                match outer.get(j - 1) {
                    Some(b) => b.mul(term),
                    None => continue,
                }
            };
            *slot = slot.add(&contribution);
        }
    }
    out
}
