//! Acceptance suite: one line per criterion, exit status 1 if any fails.
//!
//! Run with `cargo test -p ln-deform --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Instant;

use ln_deform::deformation::{
    automorphism_obstruction, conjugate, deformation_obstruction, equivalent_extensions, extend_automorphism,
    extend_automorphism_randomly, extend_deformation, extend_deformation_randomly, infinitesimal_class,
    random_deformation, rigidity_certificate, unflatten_one, validate_automorphism, validate_deformation, Equivalence,
    Extension, Rigidity,
};
use ln_deform::hochschild::hochschild_cohomology;
use ln_deform::s_algebra::{canonical_instance, trivial_instance, validate_action};
use ln_deform::{
    smith_normal_form, ActionTable, Automorphism, BaseRing, Convention, Deformation, Error, ExpSeq, FComplex,
    FiniteRing, Matrix, SeqIndex, StructureTable,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Obstruction cochains computed explicitly, and internal assertions that fired.
static OBSTRUCTIONS_CHECKED: AtomicUsize = AtomicUsize::new(0);
static ASSERTIONS_FIRED: AtomicUsize = AtomicUsize::new(0);

fn lib<T>(r: ln_deform::Result<T>) -> Result<T, String> {
    r.map_err(|e| {
        if matches!(e, Error::Internal(_)) {
            ASSERTIONS_FIRED.fetch_add(1, Ordering::Relaxed);
        }
        e.to_string()
    })
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn complex(table: ActionTable) -> FComplex {
    let constants = Arc::new(StructureTable::build(table.bound(), Convention::default()));
    FComplex::new(table, constants).expect("bounds agree")
}

fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

fn random_vec(rng: &mut ChaCha8Rng, len: usize, spread: i64) -> Vec<BigInt> {
    (0..len).map(|_| int(rng.random_range(-spread..=spread))).collect()
}

fn random_derivation(fc: &FComplex, rng: &mut ChaCha8Rng, spread: i64) -> Matrix {
    let r = fc.rank();
    let mut phi = Matrix::zeros(r, r);
    for d in fc.derivations() {
        phi.add_scaled(&int(rng.random_range(-spread..=spread)), &d);
    }
    fc.ring().base().reduce_matrix(&phi)
}

fn dual(base: BaseRing) -> FiniteRing {
    FiniteRing::truncated_polynomial(base, 2)
}

// ---- 1 ----

fn complex_property() -> Outcome {
    let instances = [
        ("Z trivial", complex(trivial_instance(&FiniteRing::integers(BaseRing::Integers), 2))),
        ("Z[x]/(x^2) trivial", complex(trivial_instance(&dual(BaseRing::Integers), 2))),
        ("canonical(2)", complex(canonical_instance(2).1)),
        ("canonical(3)", complex(canonical_instance(3).1)),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut total = 0;
    for (name, fc) in &instances {
        for k in 0..100 {
            let n = k % 3;
            let f = match n {
                0 => random_derivation(fc, &mut rng, 4).into_data(),
                _ => random_vec(&mut rng, fc.dim(n), 4),
            };
            let ddf = fc.d(n + 1, &fc.d(n, &f));
            ensure(ddf.iter().all(Zero::is_zero), || format!("d∘d != 0 on {name}, degree {n}, sample {k}"))?;
            total += 1;
        }
    }
    Ok(format!("d∘d = 0 exactly on {total} seeded cochains of degrees 0-2 over 4 instances"))
}

// ---- 2 ----

fn structure_constants() -> Outcome {
    let table = StructureTable::build(6, Convention::default());
    if let Some(v) = table.associativity_report().violation() {
        return Err(format!("associativity at N=6: {v}"));
    }
    for n in 0..=6 {
        let t = StructureTable::build(n, Convention::default());
        if let Some(v) = t.degree_additivity_report().violation() {
            return Err(format!("degree additivity at N={n}: {v}"));
        }
    }
    let one: ExpSeq = "[1]".parse().map_err(|e: Error| e.to_string())?;
    let got = lib(table.constants(&one, &one))?;
    let expected = vec![("[2]".parse::<ExpSeq>().unwrap(), int(2)), ("[0,1]".parse::<ExpSeq>().unwrap(), int(2))];
    let mut sorted = got.clone();
    sorted.sort();
    let mut want = expected.clone();
    want.sort();
    ensure(sorted == want, || format!("((1),(1)) constants {got:?}, expected {expected:?}"))?;
    Ok("associative and degree-additive for N <= 6; ((1),(1)) = {(2):2, (0,1):2}".into())
}

// ---- 3 ----

fn cross_model() -> Outcome {
    for n in 0..=4 {
        let (_, table) = canonical_instance(n);
        let constants = StructureTable::build(n, Convention::default());
        if let Some(v) = lib(validate_action(&table, &constants))?.violation() {
            return Err(format!("canonical instance at N={n}: {v}"));
        }
    }
    Ok("canonical instance satisfies product and Cartan formulas for N = 0..4".into())
}

// ---- 4 ----

fn infinitesimal_invariance() -> Outcome {
    let instances = [complex(canonical_instance(2).1), complex(trivial_instance(&dual(BaseRing::Integers), 2))];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut conjugations = 0;
    for seed in 0..50usize {
        let fc = &instances[seed % 2];
        let order = 1 + seed % 3;
        let lead = 1 + (seed / 3) % order;
        let d = lib(random_deformation(fc, order, lead, &mut rng, 3))?;
        ensure(lib(validate_deformation(&d, fc))?.is_pass(), || format!("sample {seed} is not a deformation"))?;
        lib(deformation_obstruction(&d, fc))?;
        OBSTRUCTIONS_CHECKED.fetch_add(1, Ordering::Relaxed);
        let Some(k) = d.first_nonzero() else { continue };
        let s = d.coefficient_flat(k);
        ensure(fc.is_cocycle_flat(1, &s), || format!("sample {seed}: s^{k} is not a cocycle"))?;
        let class = lib(infinitesimal_class(&d, fc))?;
        for a in 0..20 {
            let mut phi = Automorphism::monomial(fc.ring().clone(), k, random_derivation(fc, &mut rng, 3));
            while phi.order() < order {
                lib(automorphism_obstruction(&phi))?;
                OBSTRUCTIONS_CHECKED.fetch_add(1, Ordering::Relaxed);
                phi = match lib(extend_automorphism_randomly(&phi, fc.hochschild(), &mut rng, 2))? {
                    Extension::Extended(next) => next,
                    Extension::Obstructed { .. } => break,
                };
            }
            if phi.order() < order {
                continue;
            }
            let conj = lib(conjugate(&d, &phi))?;
            ensure(lib(validate_deformation(&conj, fc))?.is_pass(), || {
                format!("sample {seed}, automorphism {a}: conjugate is not a deformation")
            })?;
            ensure(conj.first_nonzero().is_none_or(|j| j >= k), || {
                format!("sample {seed}, automorphism {a}: conjugation created a lower-order term")
            })?;
            let diff: Vec<BigInt> = conj.coefficient_flat(k).iter().zip(&s).map(|(x, y)| x - y).collect();
            ensure(lib(fc.solve_coboundary(&diff))?.is_ok(), || {
                format!("sample {seed}, automorphism {a}: difference is not d^0 of a derivation")
            })?;
            let after = lib(fc.h1())?.class_of(&conj.coefficient_flat(k));
            ensure(after.as_ref() == Some(&class.coords), || {
                format!("sample {seed}, automorphism {a}: class moved from {:?} to {after:?}", class.coords)
            })?;
            conjugations += 1;
        }
    }
    Ok(format!("50 deformations (orders 1-3): leading terms are cocycles; class fixed under {conjugations} conjugations"))
}

// ---- 5 ----

fn obstructions_are_cocycles() -> Outcome {
    let checked = OBSTRUCTIONS_CHECKED.load(Ordering::Relaxed);
    let fired = ASSERTIONS_FIRED.load(Ordering::Relaxed);
    ensure(checked > 0, || "no obstruction cochains were computed".into())?;
    ensure(fired == 0, || format!("{fired} internal assertions fired"))?;
    Ok(format!("{checked} obstruction cochains computed, every one a cocycle; no internal assertion fired"))
}

// ---- 6: brute force over Z/2 ----

/// A rank-2 algebra over `F_2`; vectors are bitmasks, `table[i][j] = e_i e_j`.
struct Bits {
    name: &'static str,
    table: [[u8; 2]; 2],
    ring: FiniteRing,
}

impl Bits {
    fn mul(&self, u: u8, v: u8) -> u8 {
        let mut out = 0;
        for i in 0..2 {
            for j in 0..2 {
                if u >> i & 1 == 1 && v >> j & 1 == 1 {
                    out ^= self.table[i][j];
                }
            }
        }
        out
    }
}

/// A 2×2 matrix over `F_2` as its two columns.
type Map2 = [u8; 2];

const ID2: Map2 = [0b01, 0b10];

fn apply2(m: Map2, v: u8) -> u8 {
    (if v & 1 == 1 { m[0] } else { 0 }) ^ (if v & 2 == 2 { m[1] } else { 0 })
}

fn compose2(a: Map2, b: Map2) -> Map2 {
    [apply2(a, b[0]), apply2(a, b[1])]
}

fn to_matrix(m: Map2) -> Matrix {
    let entry = |l: usize, j: usize| int(i64::from(m[j] >> l & 1));
    Matrix::from_rows(vec![vec![entry(0, 0), entry(0, 1)], vec![entry(1, 0), entry(1, 1)]])
}

fn from_matrix(m: &Matrix) -> Map2 {
    let mut out = [0u8; 2];
    for (j, col) in out.iter_mut().enumerate() {
        for l in 0..2 {
            if m[(l, j)].is_odd() {
                *col |= 1 << l;
            }
        }
    }
    out
}

fn unpack(bits: u32, len: usize) -> Vec<Map2> {
    (0..len).map(|p| [(bits >> (4 * p) & 3) as u8, (bits >> (4 * p + 2) & 3) as u8]).collect()
}

/// The operation-algebra data the oracle needs at bound `N`, with
/// splittings recomputed from sequence addition.
struct Ops {
    degrees: Vec<usize>,
    /// `odd[a][b]`: positions `g` with odd structure constant.
    odd: Vec<Vec<Vec<usize>>>,
    splits: Vec<Vec<(usize, usize)>>,
}

impl Ops {
    fn new(bound: usize) -> Self {
        let index = SeqIndex::new(bound);
        let table = StructureTable::build(bound, Convention::default());
        let len = index.len();
        let degrees = (0..len).map(|p| index.get(p).degree()).collect();
        let odd = (0..len)
            .map(|a| {
                (0..len)
                    .map(|b| {
                        if index.degree(a) + index.degree(b) > bound {
                            return Vec::new();
                        }
                        table.product(a, b).iter().filter(|(_, c)| c.is_odd()).map(|(g, _)| *g).collect()
                    })
                    .collect()
            })
            .collect();
        let splits = (0..len)
            .map(|p| {
                let mut v = Vec::new();
                for b in 0..len {
                    for c in 0..len {
                        if index.get(b).add(index.get(c)) == *index.get(p) {
                            v.push((b, c));
                        }
                    }
                }
                v
            })
            .collect();
        Ops { degrees, odd, splits }
    }

    fn bound(&self) -> usize {
        *self.degrees.iter().max().unwrap_or(&0)
    }
}

/// Do the product and Cartan formulas hold in order `n` for the
/// coefficients `s[0..=n]`?
fn order_holds(ring: &Bits, ops: &Ops, s: &[Vec<Map2>], n: usize) -> bool {
    let len = ops.degrees.len();
    let bound = ops.bound();
    for a in 0..len {
        for b in 0..len {
            if ops.degrees[a] + ops.degrees[b] > bound {
                continue;
            }
            let mut lhs = [0u8; 2];
            for i in 0..=n {
                let c = compose2(s[i][a], s[n - i][b]);
                lhs = [lhs[0] ^ c[0], lhs[1] ^ c[1]];
            }
            let mut rhs = [0u8; 2];
            for &g in &ops.odd[a][b] {
                rhs = [rhs[0] ^ s[n][g][0], rhs[1] ^ s[n][g][1]];
            }
            if lhs != rhs {
                return false;
            }
        }
    }
    for p in 0..len {
        for x in 0..2 {
            for y in 0..2 {
                let lhs = apply2(s[n][p], ring.table[x][y]);
                let mut rhs = 0;
                for i in 0..=n {
                    for &(b, c) in &ops.splits[p] {
                        rhs ^= ring.mul(s[i][b][x], s[n - i][c][y]);
                    }
                }
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

/// Every next coefficient `s^{n}` (as packed bits) making `s[..n]` valid one order further.
fn brute_extensions(ring: &Bits, ops: &Ops, s: &[Vec<Map2>]) -> Vec<u32> {
    let len = ops.degrees.len();
    let n = s.len();
    let mut work = s.to_vec();
    work.push(Vec::new());
    (0..1u32 << (4 * len))
        .filter(|&bits| {
            work[n] = unpack(bits, len);
            order_holds(ring, ops, &work, n)
        })
        .collect()
}

/// Multiplicativity of `phi[0..=n]` in order `n`.
fn automorphism_order_holds(ring: &Bits, phi: &[Map2], n: usize) -> bool {
    (0..2).all(|a| {
        (0..2).all(|b| {
            let lhs = apply2(phi[n], ring.table[a][b]);
            let rhs = (0..=n).fold(0, |acc, i| acc ^ ring.mul(phi[i][a], phi[n - i][b]));
            lhs == rhs
        })
    })
}

fn brute_automorphism_extensions(ring: &Bits, phi: &[Map2]) -> Vec<Map2> {
    let n = phi.len();
    let mut work = phi.to_vec();
    work.push(ID2);
    (0..16u32)
        .map(|bits| unpack(bits, 1)[0])
        .filter(|&m| {
            work[n] = m;
            automorphism_order_holds(ring, &work, n)
        })
        .collect()
}

fn rank_two_rings() -> Vec<Bits> {
    let f2 = BaseRing::zmod(2).expect("2 is prime");
    vec![
        Bits { name: "F2[x]/(x^2)", table: [[0b01, 0b10], [0b10, 0b00]], ring: dual(f2) },
        Bits { name: "F2xF2", table: [[0b01, 0b00], [0b00, 0b10]], ring: FiniteRing::split(f2, 2) },
        Bits { name: "F4", table: [[0b01, 0b10], [0b10, 0b11]], ring: FiniteRing::monic_quotient(f2, &[int(1), int(1)]) },
    ]
}

fn extension_iff_coboundary() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut deformation_cases, mut automorphism_cases, mut obstructed) = (0usize, 0usize, 0usize);
    for ring in rank_two_rings() {
        // automorphisms: every valid one of order <= 2
        let mut level: Vec<Vec<Map2>> = vec![vec![ID2]];
        for _m in 0..=2 {
            let mut next_level = Vec::new();
            for phi in &level {
                let brute = brute_automorphism_extensions(&ring, phi);
                let aut = lib(Automorphism::new(ring.ring.clone(), phi[1..].iter().map(|&m| to_matrix(m)).collect()))?;
                ensure(validate_automorphism(&aut).is_pass(), || format!("{}: oracle automorphism rejected", ring.name))?;
                let hc = ln_deform::hochschild::HochschildComplex::new(ring.ring.clone());
                match lib(extend_automorphism(&aut, &hc))? {
                    Extension::Extended(next) => {
                        let last = from_matrix(&next.coefficient(next.order()));
                        ensure(brute.contains(&last), || format!("{}: solver extension not found by search", ring.name))?;
                    }
                    Extension::Obstructed { .. } => {
                        obstructed += 1;
                        ensure(brute.is_empty(), || {
                            format!("{}: solver says obstructed, search found {} extensions", ring.name, brute.len())
                        })?;
                    }
                }
                automorphism_cases += 1;
                for m in brute {
                    let mut longer = phi.clone();
                    longer.push(m);
                    next_level.push(longer);
                }
            }
            level = next_level;
        }

        // deformations: every valid base action, then seeded samples of extensions
        for bound in 0..=2 {
            let ops = Ops::new(bound);
            let len = ops.degrees.len();
            let constants = Arc::new(StructureTable::build(bound, Convention::default()));
            let mut bases = Vec::new();
            for bits in 0..1u32 << (4 * (len - 1)) {
                let mut s0 = vec![ID2];
                s0.extend(unpack(bits, len - 1));
                if !order_holds(&ring, &ops, std::slice::from_ref(&s0), 0) {
                    continue;
                }
                let table = lib(ActionTable::new(ring.ring.clone(), bound, s0.iter().map(|&m| to_matrix(m)).collect()))?;
                if lib(validate_action(&table, &constants))?.is_pass() {
                    bases.push((s0, table));
                }
            }
            let chosen: Vec<_> = bases.choose_multiple(&mut rng, 3).cloned().collect();
            for (s0, table) in chosen {
                let fc = FComplex::new(table.clone(), Arc::clone(&constants)).map_err(|e| e.to_string())?;
                let mut frontier = vec![vec![s0]];
                let fanout = if bound == 2 { [3, 2, 0] } else { [5, 3, 0] };
                for m in 0..=2 {
                    let mut next_frontier = Vec::new();
                    for s in &frontier {
                        let brute = brute_extensions(&ring, &ops, s);
                        let coeffs = s[1..].iter().map(|c| c.iter().map(|&x| to_matrix(x)).collect()).collect();
                        let d = lib(Deformation::new(table.clone(), coeffs))?;
                        ensure(lib(validate_deformation(&d, &fc))?.is_pass(), || {
                            format!("{} N={bound}: oracle deformation rejected", ring.name)
                        })?;
                        lib(deformation_obstruction(&d, &fc))?;
                        OBSTRUCTIONS_CHECKED.fetch_add(1, Ordering::Relaxed);
                        match lib(extend_deformation(&d, &fc))? {
                            Extension::Extended(next) => {
                                let top: u32 = next
                                    .coefficient(next.order())
                                    .iter()
                                    .enumerate()
                                    .map(|(p, m)| {
                                        let c = from_matrix(m);
                                        u32::from(c[0]) << (4 * p) | u32::from(c[1]) << (4 * p + 2)
                                    })
                                    .sum();
                                ensure(brute.contains(&top), || {
                                    format!("{} N={bound} m={m}: solver extension not found by search", ring.name)
                                })?;
                            }
                            Extension::Obstructed { .. } => {
                                obstructed += 1;
                                ensure(brute.is_empty(), || {
                                    format!(
                                        "{} N={bound} m={m}: solver says obstructed, search found {}",
                                        ring.name,
                                        brute.len()
                                    )
                                })?;
                            }
                        }
                        deformation_cases += 1;
                        for bits in brute.choose_multiple(&mut rng, fanout[m]) {
                            let mut longer = s.clone();
                            longer.push(unpack(*bits, len));
                            next_frontier.push(longer);
                        }
                    }
                    frontier = next_frontier;
                }
            }
        }
    }
    Ok(format!(
        "solver agrees with exhaustive search in {automorphism_cases} automorphism and {deformation_cases} deformation cases ({obstructed} obstructed)"
    ))
}

// ---- 7 ----

fn rigidity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let z = complex(trivial_instance(&FiniteRing::integers(BaseRing::Integers), 2));
    let report = lib(rigidity_certificate(&z, 3, &mut rng))?;
    ensure(report.h1.is_zero() && report.hh2.is_zero(), || "Z: H^1 or HH^2 nonzero".into())?;
    let Rigidity::Rigid { sample, gauged, .. } = report.verdict else {
        return Err("Z is not certified rigid".into());
    };
    ensure(sample.order() == 3 && gauged.first_nonzero().is_none(), || "Z: gauging did not reach the trivial deformation".into())?;

    let fc = complex(trivial_instance(&dual(BaseRing::Integers), 2));
    let report = lib(rigidity_certificate(&fc, 3, &mut rng))?;
    let Rigidity::NotCertified { group, representative } = report.verdict else {
        return Err("Z[x]/(x^2) was certified rigid".into());
    };
    ensure(group == "H^1", || format!("Z[x]/(x^2): offending group {group}, expected H^1"))?;
    ensure(fc.is_cocycle_flat(1, &representative), || "H^1 representative is not a cocycle".into())?;
    let certificate = match lib(fc.solve_coboundary(&representative))? {
        Ok(_) => return Err("H^1 representative is a coboundary".into()),
        Err(c) => c,
    };
    let cob = fc.coboundary_matrix();
    let columns: Vec<Vec<BigInt>> = (0..cob.cols()).map(|j| cob.column(j)).collect();
    ensure(certificate.verify(&columns, &representative, None), || "infeasibility certificate does not verify".into())?;
    Ok(format!(
        "Z rigid (H^1 = HH^2 = 0, order-3 sample gauged to trivial); Z[x]/(x^2) not certified, H^1 {}",
        report.h1.summary()
    ))
}

// ---- 8 ----

fn equivalence_of_extensions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let fc = complex(canonical_instance(2).1);
    let mut pairs = 0;
    for m in 0..=2 {
        for _ in 0..4 {
            let d = if m == 0 {
                Deformation::trivial(fc.table().clone(), 0)
            } else {
                lib(random_deformation(&fc, m, 1, &mut rng, 3))?
            };
            let bar = match lib(extend_deformation_randomly(&d, &fc, &mut rng, 3))? {
                Extension::Extended(bar) => bar,
                Extension::Obstructed { .. } => continue,
            };
            let phi = random_derivation(&fc, &mut rng, 3);
            let shift = fc.d(0, phi.data());
            let top: Vec<BigInt> = bar.coefficient_flat(m + 1).iter().zip(&shift).map(|(a, b)| a + b).collect();
            let mut coeffs: Vec<Vec<Matrix>> = (1..=m).map(|i| bar.coefficient(i).to_vec()).collect();
            coeffs.push(unflatten_one(&top, fc.rank()));
            let tilde = lib(Deformation::new(fc.table().clone(), coeffs))?;
            let Equivalence::Witness(w) = lib(equivalent_extensions(&tilde, &bar, &fc))? else {
                return Err(format!("m={m}: no witness for a coboundary difference"));
            };
            ensure(w.order() == m + 1 && (1..=m).all(|i| w.coefficient(i).is_zero()), || {
                format!("m={m}: witness is not of the form 1 + t^(m+1) phi")
            })?;
            ensure(fc.d(0, w.coefficient(m + 1).data()) == shift, || format!("m={m}: witness has the wrong coboundary"))?;
            ensure(lib(conjugate(&bar, &w))?.same_as(&tilde), || format!("m={m}: conjugate(bar, witness) != tilde"))?;
            pairs += 1;
        }
    }
    ensure(pairs > 0, || "no pairs constructed".into())?;
    Ok(format!("{pairs} extension pairs on canonical(2) (m = 0..2) related by 1 + t^(m+1) phi"))
}

// ---- 9 ----

/// `dim HH^2(F_2[x]/(x^2))` by enumerating every 2- and 1-cochain.
fn hh2_dual_mod2_by_enumeration() -> u32 {
    let mul = |i: usize, j: usize| -> u8 { [[0b01, 0b10], [0b10, 0b00]][i][j] };
    let vmul = |u: u8, v: u8| -> u8 {
        let mut out = 0;
        for i in 0..2 {
            for j in 0..2 {
                if u >> i & 1 == 1 && v >> j & 1 == 1 {
                    out ^= mul(i, j);
                }
            }
        }
        out
    };
    // a cochain of arity n: image bitmask per input multi-index
    let eval = |f: &[u8], args: &[u8]| -> u8 {
        // multilinear extension over basis expansions
        let n = args.len();
        let mut out = 0;
        for idx in 0..1usize << n {
            if (0..n).all(|k| args[k] >> (idx >> k & 1) & 1 == 1) {
                let col = (0..n).fold(0, |acc, k| acc * 2 + (idx >> k & 1));
                out ^= f[col];
            }
        }
        out
    };
    let b = |f: &[u8], n: usize| -> Vec<u8> {
        (0..1usize << (n + 1))
            .map(|col| {
                let a: Vec<u8> = (0..=n).map(|k| 1 << (col >> (n - k) & 1)).collect();
                let mut v = vmul(a[0], eval(f, &a[1..]));
                for s in 1..=n {
                    let mut merged = a[..s - 1].to_vec();
                    merged.push(vmul(a[s - 1], a[s]));
                    merged.extend_from_slice(&a[s + 1..]);
                    v ^= eval(f, &merged);
                }
                v ^ vmul(eval(f, &a[..n]), a[n])
            })
            .collect()
    };
    let cochains = |n: usize| -> Vec<Vec<u8>> {
        let cols = 1usize << n;
        (0..1u32 << (2 * cols)).map(|bits| (0..cols).map(|c| (bits >> (2 * c) & 3) as u8).collect()).collect()
    };
    let kernel = cochains(2).iter().filter(|f| b(f, 2).iter().all(|&v| v == 0)).count();
    let mut image: Vec<Vec<u8>> = cochains(1).iter().map(|f| b(f, 1)).collect();
    image.sort();
    image.dedup();
    (kernel / image.len()).trailing_zeros()
}

/// Determinant by fraction-free elimination.
fn bareiss_det(m: &Matrix) -> BigInt {
    let n = m.rows();
    let mut a = m.to_rows();
    let mut prev = BigInt::one();
    let mut sign = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else { return BigInt::zero() };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        return BigInt::one();
    }
    sign * &a[n - 1][n - 1]
}

/// Frozen output of [`hh2_dual_mod2_by_enumeration`].
const HH2_DUAL_MOD2: u32 = 2;

fn hochschild_baseline() -> Outcome {
    let z = FiniteRing::integers(BaseRing::Integers);
    ensure(lib(hochschild_cohomology(&z, 1))?.is_zero(), || "HH^1(Z) != 0".into())?;
    ensure(lib(hochschild_cohomology(&z, 2))?.is_zero(), || "HH^2(Z) != 0".into())?;
    let oracle = hh2_dual_mod2_by_enumeration();
    ensure(oracle == HH2_DUAL_MOD2, || format!("enumeration oracle drifted: {oracle}"))?;
    let f2 = BaseRing::zmod(2).expect("2 is prime");
    let hh2 = lib(hochschild_cohomology(&dual(f2), 2))?;
    ensure(hh2.free_rank == HH2_DUAL_MOD2 as usize && hh2.torsion.is_empty(), || {
        format!("HH^2(F2[x]/(x^2)) = {}, expected dimension {HH2_DUAL_MOD2}", hh2.summary())
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for k in 0..200 {
        let (rows, cols) = (rng.random_range(1..=12), rng.random_range(1..=12));
        let spread = if k % 4 == 0 { 1 } else { 9 };
        let data = random_vec(&mut rng, rows * cols, spread);
        let a = Matrix::from_flat(rows, cols, data);
        let (u, d, v) = smith_normal_form(&a);
        ensure(u.mul(&a).mul(&v) == d, || format!("matrix {k}: U A V != D"))?;
        ensure(bareiss_det(&u).abs().is_one() && bareiss_det(&v).abs().is_one(), || {
            format!("matrix {k}: transforms are not unimodular")
        })?;
        let diag: Vec<BigInt> = (0..rows.min(cols)).map(|i| d[(i, i)].clone()).collect();
        let off_diagonal_zero = (0..rows).all(|i| (0..cols).all(|j| i == j || d[(i, j)].is_zero()));
        let divides = diag.windows(2).all(|w| if w[0].is_zero() { w[1].is_zero() } else { (&w[1] % &w[0]).is_zero() });
        ensure(off_diagonal_zero && diag.iter().all(|x| !x.is_negative()) && divides, || {
            format!("matrix {k}: D is not in Smith form")
        })?;
    }
    Ok(format!("HH^1(Z) = HH^2(Z) = 0; HH^2(F2[x]/(x^2)) = F2^{HH2_DUAL_MOD2}; Smith form verified on 200 matrices"))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "complex property", complex_property),
        (2, "structure constants", structure_constants),
        (3, "cross-model consistency", cross_model),
        (4, "infinitesimal invariance", infinitesimal_invariance),
        (6, "extension iff coboundary", extension_iff_coboundary),
        (7, "rigidity pipeline", rigidity),
        (8, "equivalence of extensions", equivalence_of_extensions),
        (9, "hochschild baseline", hochschild_baseline),
        // runs last: audits the randomized runs above
        (5, "obstruction cocycles", obstructions_are_cocycles),
    ];
    let mut lines = Vec::new();
    for (n, name, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        lines.push((n, name, outcome, start.elapsed()));
    }
    lines.sort_by_key(|l| l.0);
    let mut failed = 0;
    for (n, name, outcome, elapsed) in &lines {
        let secs = elapsed.as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n} [{name}]: PASS ({secs:.1}s) {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} [{name}]: FAIL ({secs:.1}s) {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", lines.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

