//! Finite-rank commutative unital rings given by a basis and structure
//! constants over an exact base ring.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::doc::{bigs, ints, Int};
use crate::error::{Error, Result};
use crate::linalg::is_prime;
use crate::matrix::Matrix;
use crate::verdict::{Verdict, Violation};

/// Exact coefficient ring.
///
/// All data are stored as integers. Over `Q` the documents are integral and
/// only the linear algebra changes: every nonzero integer is invertible, so
/// cohomology has no torsion. Over `Z/p` values are kept reduced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum BaseRing {
    #[default]
    Integers,
    Rationals,
    IntegersMod(u64),
}

impl BaseRing {
    pub fn zmod(p: u64) -> Result<Self> {
        if is_prime(p) && p < (1 << 32) {
            Ok(BaseRing::IntegersMod(p))
        } else {
            Err(Error::Invalid(format!("Zmod modulus {p} must be a prime below 2^32")))
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        match self {
            BaseRing::IntegersMod(p) => Some(*p),
            _ => None,
        }
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, BaseRing::Integers)
    }

    pub fn reduce(&self, v: &BigInt) -> BigInt {
        match self {
            BaseRing::IntegersMod(p) => v.mod_floor(&BigInt::from(*p)),
            _ => v.clone(),
        }
    }

    pub fn reduce_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        v.iter().map(|x| self.reduce(x)).collect()
    }

    pub fn reduce_matrix(&self, m: &Matrix) -> Matrix {
        match self {
            BaseRing::IntegersMod(_) => m.map(|x| self.reduce(x)),
            _ => m.clone(),
        }
    }

    pub fn is_zero(&self, v: &BigInt) -> bool {
        self.reduce(v).is_zero()
    }

    pub fn all_zero(&self, v: &[BigInt]) -> bool {
        v.iter().all(|x| self.is_zero(x))
    }

    pub fn eq(&self, a: &BigInt, b: &BigInt) -> bool {
        self.is_zero(&(a - b))
    }
}

impl fmt::Display for BaseRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseRing::Integers => write!(f, "Z"),
            BaseRing::Rationals => write!(f, "Q"),
            BaseRing::IntegersMod(p) => write!(f, "Zmod:{p}"),
        }
    }
}

impl FromStr for BaseRing {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Z" => Ok(BaseRing::Integers),
            "Q" => Ok(BaseRing::Rationals),
            other => {
                let p = other
                    .strip_prefix("Zmod:")
                    .and_then(|p| p.parse::<u64>().ok())
                    .ok_or_else(|| Error::Malformed(format!("unknown base ring `{other}` (expected Z, Q or Zmod:p)")))?;
                BaseRing::zmod(p)
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BaseRepr {
    Name(String),
    Zmod {
        #[serde(rename = "Zmod")]
        zmod: u64,
    },
}

impl Serialize for BaseRing {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BaseRing::Integers => BaseRepr::Name("Z".into()),
            BaseRing::Rationals => BaseRepr::Name("Q".into()),
            BaseRing::IntegersMod(p) => BaseRepr::Zmod { zmod: *p },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BaseRing {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match BaseRepr::deserialize(d)? {
            BaseRepr::Name(n) if n == "Z" || n == "Q" => n.parse().map_err(serde::de::Error::custom),
            BaseRepr::Name(n) => Err(serde::de::Error::custom(format!("unknown base ring `{n}`"))),
            BaseRepr::Zmod { zmod } => BaseRing::zmod(zmod).map_err(serde::de::Error::custom),
        }
    }
}

/// A commutative unital ring, free of finite rank over its base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteRing {
    base: BaseRing,
    basis: Vec<String>,
    unit: Vec<BigInt>,
    /// `mult[i][j]`: coordinates of `e_i e_j`.
    mult: Vec<Vec<Vec<BigInt>>>,
    /// `left[i]`: matrix of `a -> e_i a`.
    left: Vec<Matrix>,
}

impl FiniteRing {
    /// Builds a ring from raw data, checking only shapes.
    pub fn new(base: BaseRing, basis: Vec<String>, unit: Vec<BigInt>, mult: Vec<Vec<Vec<BigInt>>>) -> Result<Self> {
        let r = basis.len();
        if r == 0 {
            return Err(Error::RankMismatch { what: "ring".into(), found: "rank 0".into(), expected: "rank >= 1".into() });
        }
        let mismatch = |what: String, found: usize| Error::RankMismatch {
            what,
            found: found.to_string(),
            expected: r.to_string(),
        };
        if unit.len() != r {
            return Err(mismatch("unit".into(), unit.len()));
        }
        if mult.len() != r {
            return Err(mismatch("mult rows".into(), mult.len()));
        }
        for (i, row) in mult.iter().enumerate() {
            if row.len() != r {
                return Err(mismatch(format!("mult row {i}"), row.len()));
            }
            for (j, v) in row.iter().enumerate() {
                if v.len() != r {
                    return Err(mismatch(format!("mult[{i}][{j}]"), v.len()));
                }
            }
        }
        let unit = base.reduce_vec(&unit);
        let mult: Vec<Vec<Vec<BigInt>>> =
            mult.into_iter().map(|row| row.into_iter().map(|v| base.reduce_vec(&v)).collect()).collect();
        let left = (0..r)
            .map(|i| {
                let mut m = Matrix::zeros(r, r);
                for j in 0..r {
                    for k in 0..r {
                        m[(k, j)] = mult[i][j][k].clone();
                    }
                }
                m
            })
            .collect();
        Ok(Self { base, basis, unit, mult, left })
    }

    pub fn base(&self) -> BaseRing {
        self.base
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis
    }

    pub fn unit(&self) -> &[BigInt] {
        &self.unit
    }

    pub fn basis_vector(&self, i: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.rank()];
        v[i] = BigInt::one();
        v
    }

    /// Coordinates of `e_i e_j`.
    pub fn product(&self, i: usize, j: usize) -> &[BigInt] {
        &self.mult[i][j]
    }

    /// Matrix of multiplication by `e_i`.
    pub fn left_mul(&self, i: usize) -> &Matrix {
        &self.left[i]
    }

    /// Matrix of multiplication by an arbitrary element.
    pub fn left_mul_by(&self, a: &[BigInt]) -> Matrix {
        let mut m = Matrix::zeros(self.rank(), self.rank());
        for (i, c) in a.iter().enumerate() {
            m.add_scaled(c, &self.left[i]);
        }
        m
    }

    pub fn mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let r = self.rank();
        let mut out = vec![BigInt::zero(); r];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                for (k, c) in self.mult[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &xy * c;
                    }
                }
            }
        }
        self.base.reduce_vec(&out)
    }

    /// Checks commutativity, associativity and the unit law exhaustively,
    /// in that order, reporting the first failure.
    pub fn validate(&self) -> Verdict {
        let r = self.rank();
        let name = |i: usize| &self.basis[i];
        let same = |a: &[BigInt], b: &[BigInt]| a.iter().zip(b).all(|(x, y)| self.base.eq(x, y));
        for i in 0..r {
            for j in i + 1..r {
                if !same(&self.mult[i][j], &self.mult[j][i]) {
                    return Verdict::Fail(Violation::new("commutativity", format!("({}, {})", name(i), name(j))));
                }
            }
        }
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let left = self.mul(&self.mult[i][j], &self.basis_vector(k));
                    let right = self.mul(&self.basis_vector(i), &self.mult[j][k]);
                    if !same(&left, &right) {
                        return Verdict::Fail(Violation::new(
                            "associativity",
                            format!("({}, {}, {})", name(i), name(j), name(k)),
                        ));
                    }
                }
            }
        }
        for i in 0..r {
            let e = self.basis_vector(i);
            if !same(&self.mul(&self.unit, &e), &e) {
                return Verdict::Fail(Violation::new("unit law", name(i).clone()));
            }
        }
        Verdict::Pass
    }

    /// The same table over another base.
    pub fn change_base(&self, base: BaseRing) -> FiniteRing {
        FiniteRing::new(base, self.basis.clone(), self.unit.clone(), self.mult.clone()).expect("shapes unchanged")
    }

    /// The base ring itself (rank 1).
    pub fn integers(base: BaseRing) -> FiniteRing {
        FiniteRing::new(base, vec!["1".into()], vec![BigInt::one()], vec![vec![vec![BigInt::one()]]]).expect("rank 1")
    }

    /// `base[x]/(x^k)` with basis `1, x, ..., x^{k-1}`.
    pub fn truncated_polynomial(base: BaseRing, k: usize) -> FiniteRing {
        Self::monic_quotient(base, &vec![BigInt::zero(); k])
    }

    /// `base[x]/(x^k - sum_{i<k} c_i x^i)` with basis `1, x, ..., x^{k-1}`.
    pub fn monic_quotient(base: BaseRing, c: &[BigInt]) -> FiniteRing {
        let k = c.len();
        assert!(k >= 1);
        // coordinates of x^n for n < 2k - 1
        let mut powers: Vec<Vec<BigInt>> = Vec::with_capacity(2 * k);
        for n in 0..2 * k - 1 {
            let v = if n < k {
                let mut v = vec![BigInt::zero(); k];
                v[n] = BigInt::one();
                v
            } else {
                // x^n = x * x^{n-1}; shift, then reduce the x^k term
                let prev = &powers[n - 1];
                let mut v = vec![BigInt::zero(); k];
                for i in 1..k {
                    v[i] = prev[i - 1].clone();
                }
                let top = &prev[k - 1];
                for i in 0..k {
                    v[i] += top * &c[i];
                }
                v
            };
            powers.push(v);
        }
        let mult = (0..k).map(|i| (0..k).map(|j| powers[i + j].clone()).collect()).collect();
        let basis = (0..k)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            })
            .collect();
        let mut unit = vec![BigInt::zero(); k];
        unit[0] = BigInt::one();
        FiniteRing::new(base, basis, unit, mult).expect("consistent shapes")
    }

    /// `base[y_1..y_m]/(y_i y_j)`: the unit plus a square-zero ideal.
    pub fn square_zero(base: BaseRing, m: usize) -> FiniteRing {
        let r = m + 1;
        let e = |i: usize| {
            let mut v = vec![BigInt::zero(); r];
            v[i] = BigInt::one();
            v
        };
        let mult = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| match (i, j) {
                        (0, j) => e(j),
                        (i, 0) => e(i),
                        _ => vec![BigInt::zero(); r],
                    })
                    .collect()
            })
            .collect();
        let basis = std::iter::once("1".to_string()).chain((1..=m).map(|i| format!("y{i}"))).collect();
        FiniteRing::new(base, basis, e(0), mult).expect("consistent shapes")
    }

    /// `base^k` with idempotent basis `e_1..e_k`.
    pub fn split(base: BaseRing, k: usize) -> FiniteRing {
        let e = |i: usize| {
            let mut v = vec![BigInt::zero(); k];
            v[i] = BigInt::one();
            v
        };
        let mult = (0..k)
            .map(|i| (0..k).map(|j| if i == j { e(i) } else { vec![BigInt::zero(); k] }).collect())
            .collect();
        let basis = (1..=k).map(|i| format!("e{i}")).collect();
        FiniteRing::new(base, basis, vec![BigInt::one(); k], mult).expect("consistent shapes")
    }

    pub fn to_document(&self) -> RingDocument {
        RingDocument {
            base: self.base,
            rank: self.rank(),
            basis: self.basis.clone(),
            unit: ints(&self.unit),
            mult: self.mult.iter().map(|row| row.iter().map(|v| ints(v)).collect()).collect(),
        }
    }

    pub fn from_document(doc: &RingDocument) -> Result<Self> {
        let basis = if doc.basis.is_empty() {
            (0..doc.rank).map(|i| format!("e{i}")).collect()
        } else {
            doc.basis.clone()
        };
        if basis.len() != doc.rank {
            return Err(Error::RankMismatch {
                what: "basis".into(),
                found: basis.len().to_string(),
                expected: doc.rank.to_string(),
            });
        }
        let mult = doc.mult.iter().map(|row| row.iter().map(|v| bigs(v)).collect()).collect();
        FiniteRing::new(doc.base, basis, bigs(&doc.unit), mult)
    }
}

/// Serialized form of a [`FiniteRing`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RingDocument {
    pub base: BaseRing,
    pub rank: usize,
    #[serde(default)]
    pub basis: Vec<String>,
    pub unit: Vec<Int>,
    pub mult: Vec<Vec<Vec<Int>>>,
}
