//! One driver per subcommand. Each returns a [`Report`]; errors carry
//! their exit category.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use ln_deform::deformation::{
    equivalent_extensions, extend_deformation, extend_deformation_randomly, random_deformation, rigidity_certificate,
    validate_automorphism, validate_deformation, Automorphism, AutomorphismDocument, Deformation, DeformationDocument,
    Equivalence, Extension, Rigidity,
};
use ln_deform::doc::write_json;
use ln_deform::hochschild::hochschild_cohomology;
use ln_deform::ring::RingDocument;
use ln_deform::s_algebra::{canonical_instance, trivial_instance, validate_action, ActionDocument};
use ln_deform::{
    ActionTable, BaseRing, Convention, Error, ExpSeq, FComplex, FiniteRing, Matrix, StructureTable, Verdict,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::report::{verdict_json, CliError, Report, Status};

type Outcome = Result<Report, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Ring,
    Action,
    Deformation,
    Automorphism,
    Constants,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ComplexKind {
    Fstar,
    Hochschild,
}

fn read_value(path: &Path) -> Result<Value, Error> {
    let text =
        std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    Ok(serde_json::from_str(&text)?)
}

fn detect(v: &Value) -> Option<Kind> {
    let has = |k: &str| v.get(k).is_some();
    if has("mult") {
        Some(Kind::Ring)
    } else if has("entries") {
        Some(Kind::Constants)
    } else if has("coeffs") && has("action") {
        Some(Kind::Deformation)
    } else if has("coeffs") && has("ring") {
        Some(Kind::Automorphism)
    } else if has("action") && has("bound") {
        Some(Kind::Action)
    } else {
        None
    }
}

fn constants_for(bound: usize) -> Arc<StructureTable> {
    Arc::new(StructureTable::build(bound, Convention::default()))
}

type Check<'a> = (&'a str, Box<dyn FnOnce() -> Result<Verdict, Error> + 'a>);

/// Runs the checks in order and stops at the first failure.
fn run_checks(report: &mut Report, checks: Vec<Check<'_>>) -> Result<(), Error> {
    let mut results = Vec::new();
    for (what, check) in checks {
        let verdict = check()?;
        report.line(format!("{what}: {verdict}"));
        results.push(verdict_json(what, &verdict));
        if !verdict.is_pass() {
            report.status = Status::Failed;
            break;
        }
    }
    report.result = json!({ "checks": results });
    Ok(())
}

pub fn validate(path: &Path, kind: Option<Kind>) -> Outcome {
    let value = read_value(path)?;
    let kind = match kind.or_else(|| detect(&value)) {
        Some(k) => k,
        None => return Err(CliError::Usage(format!("cannot tell what kind of document {} is; pass --kind", path.display()))),
    };
    let dir = path.parent();
    let mut report = Report::new("validate");
    match kind {
        Kind::Ring => {
            let ring = FiniteRing::from_document(&serde_json::from_value::<RingDocument>(value).map_err(Error::from)?)?;
            report.base = Some(ring.base());
            run_checks(&mut report, vec![("ring", Box::new(|| Ok(ring.validate())))])?;
        }
        Kind::Action => {
            let doc: ActionDocument = serde_json::from_value(value).map_err(Error::from)?;
            let table = ActionTable::from_document(doc, dir)?;
            report.context(table.bound(), table.ring().base());
            let constants = constants_for(table.bound());
            run_checks(
                &mut report,
                vec![
                    ("ring", Box::new(|| Ok(table.ring().validate()))),
                    ("action", Box::new(|| validate_action(&table, &constants))),
                ],
            )?;
        }
        Kind::Deformation => {
            let doc: DeformationDocument = serde_json::from_value(value).map_err(Error::from)?;
            let d = Deformation::from_document(doc, dir)?;
            let table = d.base().clone();
            report.context(table.bound(), table.ring().base());
            let constants = constants_for(table.bound());
            let fc = FComplex::new(table.clone(), Arc::clone(&constants))?;
            run_checks(
                &mut report,
                vec![
                    ("ring", Box::new(|| Ok(table.ring().validate()))),
                    ("action", Box::new(|| validate_action(&table, &constants))),
                    ("deformation", Box::new(|| validate_deformation(&d, &fc))),
                ],
            )?;
        }
        Kind::Automorphism => {
            let doc: AutomorphismDocument = serde_json::from_value(value).map_err(Error::from)?;
            let phi = Automorphism::from_document(doc, dir)?;
            report.base = Some(phi.ring().base());
            run_checks(
                &mut report,
                vec![
                    ("ring", Box::new(|| Ok(phi.ring().validate()))),
                    ("automorphism", Box::new(|| Ok(validate_automorphism(&phi)))),
                ],
            )?;
        }
        Kind::Constants => {
            let table = StructureTable::from_document(&serde_json::from_value(value).map_err(Error::from)?)?;
            report.bound = Some(table.bound());
            run_checks(
                &mut report,
                vec![
                    ("degree additivity", Box::new(|| Ok(table.degree_additivity_report()))),
                    ("associativity", Box::new(|| Ok(table.associativity_report()))),
                ],
            )?;
        }
    }
    Ok(report)
}

pub fn constants(alpha: &ExpSeq, beta: &ExpSeq, bound: usize, convention: Convention, dump: Option<&Path>) -> Outcome {
    let table = StructureTable::build(bound, convention);
    let entries = table.constants(alpha, beta)?;
    let mut report = Report::new("constants");
    report.bound = Some(bound);
    for (gamma, coeff) in &entries {
        report.line(format!("gamma {gamma} coeff {coeff}"));
    }
    if let Some(path) = dump {
        write_json(path, &table.to_document())?;
        report.line(format!("wrote {}", path.display()));
    }
    report.result = json!({
        "alpha": alpha.to_string(),
        "beta": beta.to_string(),
        "convention": convention,
        "constants": entries.iter().map(|(g, c)| json!({ "gamma": g.to_string(), "coeff": c.to_string() })).collect::<Vec<_>>(),
    });
    Ok(report)
}

fn with_base(table: ActionTable, base: Option<BaseRing>) -> Result<ActionTable, Error> {
    if base.is_none_or(|b| b == table.ring().base()) {
        return Ok(table);
    }
    let ring = ring_with_base(table.ring().clone(), base)?;
    ActionTable::new(ring, table.bound(), table.maps().to_vec())
}

fn ring_with_base(ring: FiniteRing, base: Option<BaseRing>) -> Result<FiniteRing, Error> {
    match base {
        None => Ok(ring),
        Some(b) if b == ring.base() => Ok(ring),
        Some(b) if ring.base() == BaseRing::Integers => Ok(ring.change_base(b)),
        Some(b) => Err(Error::BaseMismatch(format!("cannot move a {} document to {b}", ring.base()))),
    }
}

fn with_bound(table: ActionTable, bound: Option<usize>) -> Result<ActionTable, Error> {
    match bound {
        None => Ok(table),
        Some(b) if b > table.bound() => Err(Error::BoundMismatch(format!(
            "requested bound {b} exceeds the action document's bound {}",
            table.bound()
        ))),
        Some(b) => table.restrict(b),
    }
}

/// Validates ring and action; on failure records it and returns `false`.
fn action_is_valid(report: &mut Report, table: &ActionTable, constants: &StructureTable) -> Result<bool, Error> {
    for (what, verdict) in [("ring", table.ring().validate()), ("action", validate_action(table, constants)?)] {
        if !verdict.is_pass() {
            report.line(format!("{what}: {verdict}"));
            report.result = json!({ "checks": [verdict_json(what, &verdict)] });
            report.status = Status::Failed;
            return Ok(false);
        }
    }
    Ok(true)
}

pub struct CohomologyArgs<'a> {
    pub action: Option<&'a Path>,
    pub ring: Option<&'a Path>,
    pub complex: ComplexKind,
    pub n: usize,
    pub bound: Option<usize>,
    pub base: Option<BaseRing>,
    pub representatives: bool,
}

pub fn cohomology(args: CohomologyArgs<'_>) -> Outcome {
    let mut report = Report::new("cohomology");
    let (label, result) = match args.complex {
        ComplexKind::Fstar => {
            let path = args.action.ok_or_else(|| CliError::Usage("--complex fstar needs --action".into()))?;
            if !(1..=2).contains(&args.n) {
                return Err(CliError::Usage(format!("F* cohomology is computed in degrees 1 and 2, not {}", args.n)));
            }
            let table = with_base(with_bound(ActionTable::load(path)?, args.bound)?, args.base)?;
            report.context(table.bound(), table.ring().base());
            let constants = constants_for(table.bound());
            if !action_is_valid(&mut report, &table, &constants)? {
                return Ok(report);
            }
            let fc = FComplex::new(table, constants)?;
            ("H", fc.cohomology(args.n)?)
        }
        ComplexKind::Hochschild => {
            let ring = match (args.ring, args.action) {
                (Some(p), _) => FiniteRing::from_document(&ln_deform::doc::read_json::<RingDocument>(p)?)?,
                (None, Some(p)) => ActionTable::load(p)?.ring().clone(),
                (None, None) => return Err(CliError::Usage("--complex hochschild needs --ring or --action".into())),
            };
            let ring = ring_with_base(ring, args.base)?;
            report.base = Some(ring.base());
            let verdict = ring.validate();
            if !verdict.is_pass() {
                report.line(format!("ring: {verdict}"));
                report.result = json!({ "checks": [verdict_json("ring", &verdict)] });
                report.status = Status::Failed;
                return Ok(report);
            }
            ("HH", hochschild_cohomology(&ring, args.n)?)
        }
    };
    report.line(format!("{label}^{} {}", args.n, result.summary()));
    if args.representatives {
        for (i, rep) in result.representatives.iter().enumerate() {
            report.line(format!("  representative {i}: {}", render_vec(rep)));
        }
    }
    report.result = json!({ "complex": label, "cohomology": result.to_document() });
    Ok(report)
}

fn render_vec(v: &[num_bigint::BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(","))
}

fn render_matrix(m: &Matrix) -> String {
    let rows: Vec<String> = m.to_rows().iter().map(|r| render_vec(r)).collect();
    format!("[{}]", rows.join(","))
}

fn load_valid_deformation(report: &mut Report, path: &Path) -> Result<Option<(Deformation, FComplex)>, Error> {
    let d = Deformation::load(path)?;
    let table = d.base().clone();
    report.context(table.bound(), table.ring().base());
    let constants = constants_for(table.bound());
    if !action_is_valid(report, &table, &constants)? {
        return Ok(None);
    }
    let fc = FComplex::new(table, constants)?;
    let verdict = validate_deformation(&d, &fc)?;
    if !verdict.is_pass() {
        report.line(format!("deformation {}: {verdict}", path.display()));
        report.result = json!({ "checks": [verdict_json("deformation", &verdict)] });
        report.status = Status::Failed;
        return Ok(None);
    }
    Ok(Some((d, fc)))
}

pub fn extend(path: &Path, to_order: usize, emit: Option<&Path>, seed: Option<u64>) -> Outcome {
    let mut report = Report::new("extend");
    report.seed = seed;
    let Some((mut d, fc)) = load_valid_deformation(&mut report, path)? else { return Ok(report) };
    if to_order < d.order() {
        return Err(CliError::Usage(format!("deformation already has order {} > {to_order}", d.order())));
    }
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let mut steps = Vec::new();
    while d.order() < to_order {
        let m = d.order();
        let outcome = match rng.as_mut() {
            Some(rng) => extend_deformation_randomly(&d, &fc, rng, 2)?,
            None => extend_deformation(&d, &fc)?,
        };
        match outcome {
            Extension::Extended(next) => {
                report.line(format!("order {m} -> {}: extended", m + 1));
                steps.push(json!({ "from": m, "extended": true }));
                d = next;
            }
            Extension::Obstructed { obstruction, certificate } => {
                report.line(format!("order {m} -> {}: obstructed (obstruction class is nonzero in H^2)", m + 1));
                steps.push(json!({
                    "from": m,
                    "extended": false,
                    "obstruction": obstruction.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "certificate": {
                        "functional": certificate.functional.iter().map(ToString::to_string).collect::<Vec<_>>(),
                        "modulus": certificate.modulus.as_ref().map(ToString::to_string),
                    },
                }));
                report.status = Status::Negative;
                break;
            }
        }
    }
    if report.status == Status::Ok {
        if let Some(out) = emit {
            write_json(out, &d.to_document())?;
            report.line(format!("wrote order-{} deformation to {}", d.order(), out.display()));
        }
    }
    report.result = json!({ "order": d.order(), "steps": steps });
    Ok(report)
}

pub fn equivalence(tilde: &Path, bar: &Path, emit: Option<&Path>) -> Outcome {
    let mut report = Report::new("equivalence");
    let Some((t, fc)) = load_valid_deformation(&mut report, tilde)? else { return Ok(report) };
    let Some((b, _)) = load_valid_deformation(&mut report, bar)? else { return Ok(report) };
    match equivalent_extensions(&t, &b, &fc)? {
        Equivalence::Witness(w) => {
            let k = w.order();
            report.line(format!("equivalent: conjugating by 1 + t^{k} phi turns the second into the first"));
            report.line(format!("phi = {}", render_matrix(&w.coefficient(k))));
            if let Some(out) = emit {
                write_json(out, &w.to_document())?;
                report.line(format!("wrote witness to {}", out.display()));
            }
            report.result = json!({ "equivalent": true, "order": k, "phi": render_matrix(&w.coefficient(k)) });
        }
        Equivalence::Unknown { class, .. } => {
            report.line(format!(
                "unknown: the difference is the nonzero class {} in H^1; equivalence is not decided",
                render_vec(&class)
            ));
            report.result = json!({ "equivalent": Value::Null, "class": class.iter().map(ToString::to_string).collect::<Vec<_>>() });
            report.status = Status::Negative;
        }
    }
    Ok(report)
}

pub fn rigidity(path: &Path, bound: Option<usize>, max_order: usize, seed: u64) -> Outcome {
    let mut report = Report::new("rigidity");
    report.seed = Some(seed);
    let table = with_bound(ActionTable::load(path)?, bound)?;
    report.context(table.bound(), table.ring().base());
    let constants = constants_for(table.bound());
    if !action_is_valid(&mut report, &table, &constants)? {
        return Ok(report);
    }
    let fc = FComplex::new(table, constants)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cert = rigidity_certificate(&fc, max_order, &mut rng)?;
    report.line(format!("H^1 {}", cert.h1.summary()));
    report.line(format!("HH^2 {}", cert.hh2.summary()));
    let verdict = match &cert.verdict {
        Rigidity::Rigid { sample, steps, .. } => {
            report.line(format!(
                "rigid: a seeded order-{} deformation was gauged to the trivial one in {} steps",
                sample.order(),
                steps.len()
            ));
            json!({ "rigid": true, "sample_order": sample.order(), "gauge_orders": steps })
        }
        Rigidity::NotCertified { group, representative } => {
            report.line(format!("not certified: {group} is nonzero; representative {}", render_vec(representative)));
            report.status = Status::Negative;
            json!({
                "rigid": false,
                "group": group,
                "representative": representative.iter().map(ToString::to_string).collect::<Vec<_>>(),
            })
        }
    };
    report.result = json!({ "h1": cert.h1.to_document(), "hh2": cert.hh2.to_document(), "verdict": verdict });
    Ok(report)
}

/// Writes the built-in fixtures to `out` and summarizes each.
pub fn demo(out: &Path, bound: usize) -> Outcome {
    std::fs::create_dir_all(out).map_err(|source| Error::Io { path: out.display().to_string(), source })?;
    let mut report = Report::new("demo");
    report.context(bound, BaseRing::Integers);
    report.seed = Some(0);
    let z = FiniteRing::integers(BaseRing::Integers);
    let dual = FiniteRing::truncated_polynomial(BaseRing::Integers, 2);
    let (model_ring, model) = canonical_instance(bound);
    let fixtures: Vec<(&str, ActionTable)> = vec![
        ("integers-trivial", trivial_instance(&z, bound)),
        ("dual-numbers-trivial", trivial_instance(&dual, bound)),
        ("polynomial-model", model),
    ];
    let written = |name: &str| -> PathBuf { out.join(format!("{name}.json")) };
    write_json(&written("ring-dual-numbers"), &dual.to_document())?;
    write_json(&written("ring-polynomial-model"), &model_ring.to_document())?;
    let constants = constants_for(bound);
    write_json(&written("constants"), &constants.to_document())?;
    let mut summaries = Vec::new();
    for (name, table) in fixtures {
        let path = written(&format!("action-{name}"));
        write_json(&path, &table.to_document())?;
        let valid = validate_action(&table, &constants)?;
        let fc = FComplex::new(table.clone(), Arc::clone(&constants))?;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let cert = rigidity_certificate(&fc, 2, &mut rng)?;
        let rigid = matches!(cert.verdict, Rigidity::Rigid { .. });
        report.line(format!(
            "{name}: action {valid}; H^1 {}; HH^2 {}; {}",
            cert.h1.summary(),
            cert.hh2.summary(),
            if rigid { "rigid" } else { "not certified rigid" }
        ));
        if !rigid || name == "polynomial-model" {
            let d = random_deformation(&fc, 1, 1, &mut rng, 2)?;
            let dpath = written(&format!("deformation-{name}"));
            write_json(&dpath, &d.to_document())?;
        }
        summaries.push(json!({
            "name": name,
            "file": path.display().to_string(),
            "valid": valid.is_pass(),
            "h1": cert.h1.to_document(),
            "hh2": cert.hh2.to_document(),
            "rigid": rigid,
        }));
    }
    report.line(format!("fixtures written to {}", out.display()));
    report.result = json!({ "directory": out.display().to_string(), "fixtures": summaries });
    Ok(report)
}
