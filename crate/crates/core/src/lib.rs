//! Exact deformation theory of commutative rings carrying an action of the
//! Landweber-Novikov algebra, truncated at a degree bound.
//!
//! The crate is organised bottom-up:
//!
//! * [`exp_seq`] — exponential sequences, the index set of the operations;
//! * [`ln_structure`] — structure constants of the operation algebra, computed
//!   from composition of formal power series;
//! * [`ring`], [`linalg`], [`hochschild`] — finite-rank rings, exact linear
//!   algebra over `Z`, `Q` and `Z/p`, and Hochschild cohomology;
//! * [`s_algebra`] — action tables and their validation;
//! * [`fstar`] — the cochain complex governing deformations of an action;
//! * [`deformation`] — deformations, automorphisms, obstructions and the
//!   order-by-order extension machinery.

pub mod deformation;
pub mod doc;
pub mod error;
pub mod exp_seq;
pub mod fstar;
pub mod cohomology;
pub mod coord;
pub mod hochschild;
pub mod linalg;
pub mod ln_structure;
pub mod matrix;
pub mod poly;
pub mod ring;
pub mod s_algebra;

mod verdict;

pub use deformation::{Automorphism, Deformation};
pub use error::{Error, Result};
pub use exp_seq::{ExpSeq, SeqIndex, TupleIndex};
pub use fstar::{Cochain, FComplex};
pub use linalg::{smith_normal_form, Integers, PrimeField};
pub use ln_structure::{Convention, StructureTable};
pub use matrix::{AdditiveMap, Matrix, MultilinearMap};
pub use ring::{BaseRing, FiniteRing};
pub use s_algebra::ActionTable;
pub use verdict::{Verdict, Violation};

/// Version string embedded in emitted documents.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
