use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use singlocus_core::bounds::{self, L0Certificate, Target};
use singlocus_core::formulas;
use singlocus_core::ideals::{random_form, ConfigJson, IdealJson};
use singlocus_core::specialize::{self, Verdict};
use singlocus_core::{FieldSpec, HomPoly, IdealPresentation, LinearSpaceConfig};

use crate::{grid, parse_field, Cli, CliError, Command, Lemma};

const SCHEMA: u32 = 1;

pub fn run(cli: &Cli) -> Result<Value, CliError> {
    let guard = Guard(cli.max_columns);
    match &cli.command {
        Command::CheckLemma {
            lemma,
            n,
            b,
            d,
            l,
            field,
            seed,
            samples,
            quadric,
        } => {
            let g = Grid {
                n: grid::parse("n", n)?,
                b: grid::parse("b", b)?,
                d: grid::parse("d", d)?,
                l: grid::parse("l", l)?,
            };
            check_lemma(*lemma, &g, parse_field(field)?, *seed, *samples, quadric, guard)
        }
        Command::L0 {
            n,
            b,
            second_component,
            fixed_b,
        } => {
            let target = match (second_component, fixed_b) {
                (true, _) => Target::SecondComponent,
                (false, Some(max_d)) => Target::DegreeRange { max_d: *max_d },
                (false, None) => Target::SmallDegree,
            };
            let cert = bounds::compute_l0(*n, *b, target).map_err(|e| CliError::Usage(e.to_string()))?;
            let check = bounds::verify_certificate(&cert).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(json!({
                "schema": SCHEMA,
                "command": "l0",
                "pass": check.ok,
                "l0": cert.l0.to_string(),
                "d0": cert.d0.to_string(),
                "conditional": cert.conditional,
                "note": "a valid l0, not necessarily the minimal one",
                "certificate": cert,
            }))
        }
        Command::VerifyCertificate { file } => {
            let v: Value = read_json(file)?;
            let inner = v.get("certificate").cloned().unwrap_or(v);
            let cert: L0Certificate =
                serde_json::from_value(inner).map_err(|e| CliError::Input(format!("{}: {e}", file.display())))?;
            let report = bounds::verify_certificate(&cert).map_err(|e| CliError::Input(e.to_string()))?;
            Ok(json!({
                "schema": SCHEMA,
                "command": "verify-certificate",
                "pass": report.ok,
                "n": cert.n.to_string(),
                "b": cert.b.to_string(),
                "l0": cert.l0.to_string(),
                "window": format!("{}..{}", cert.l0, cert.l0 + bounds::REPLAY_WINDOW),
                "checks": report.checks,
            }))
        }
        Command::Wspace { ideal, l, field } => {
            let field = parse_field(field)?;
            let ideal = load_ideal(ideal, field)?;
            guard.check(ideal.n(), *l)?;
            let w = ideal.w_space(*l).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(json!({
                "schema": SCHEMA,
                "command": "wspace",
                "field": field.to_string(),
                "n": ideal.n(),
                "l": l,
                "ambient_dim": w.dim() + w.codim(),
                "dim": w.dim(),
                "codim": w.codim(),
                "note": "graded pieces of the presented ideal; no saturation is performed",
            }))
        }
        Command::Codim {
            ideal,
            config,
            l,
            square,
            field,
        } => {
            let field = parse_field(field)?;
            if let Some(path) = ideal {
                let ideal = load_ideal(path, field)?;
                guard.check(ideal.n(), *l)?;
                let ideal = if *square { ideal.square() } else { ideal };
                let piece = ideal.graded_piece(*l);
                return Ok(json!({
                    "schema": SCHEMA,
                    "command": "codim",
                    "field": field.to_string(),
                    "n": ideal.n(),
                    "l": l,
                    "square": square,
                    "dim": piece.dim(),
                    "codim": piece.codim(),
                }));
            }
            let path = config.as_ref().expect("clap requires --ideal or --config");
            let json: ConfigJson = read_json(path)?;
            let cfg = LinearSpaceConfig::from_json(field, &json).map_err(|e| CliError::Input(e.to_string()))?;
            guard.check(cfg.n(), *l)?;
            let u = cfg.union_squared_piece(*l).map_err(|e| CliError::Usage(e.to_string()))?;
            let (n, b, d) = (cfg.n() as i64, cfg.b() as i64, cfg.d() as i64);
            let bound = formulas::union_bound(n, b, d, *l as i64);
            let applies = n >= 3 && 2 * d <= *l as i64 + 1;
            let mut out = json!({
                "schema": SCHEMA,
                "command": "codim",
                "field": field.to_string(),
                "n": n, "b": b, "d": d, "l": l,
                "codim": u.codim(),
                "union_bound": bound.to_string(),
                "bound_applies": applies,
            });
            if applies {
                out["pass"] = json!(bound <= u.codim().into());
            }
            Ok(out)
        }
        Command::Beta {
            n,
            b,
            d,
            l,
            oracle,
            field,
            seed,
        } => {
            formulas::check_nb(*n, *b).map_err(|e| CliError::Usage(e.to_string()))?;
            let value = formulas::beta(*n, *b, *d, *l);
            let mut out = json!({
                "schema": SCHEMA,
                "command": "beta",
                "n": n, "b": b, "d": d, "l": l,
                "value": value.to_string(),
            });
            if *oracle {
                if *d < 1 || *l < 2 * d {
                    return Err(CliError::Usage("the oracle comparison needs d >= 1 and l >= 2d".into()));
                }
                let field = parse_field(field)?;
                let (nu, bu) = (*n as usize, *b as usize);
                guard.check(nu, *l as u32)?;
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let f = random_form(field, nu, bu + 1, *d as u32, &mut rng);
                let ideal = IdealPresentation::hypersurface_in_plane(f.clone(), bu).expect("valid n, b");
                let got = ideal.square().graded_piece(*l as u32).codim();
                out["field"] = json!(field.to_string());
                out["seed"] = json!(seed);
                out["f"] = json!(f.to_string());
                out["oracle"] = json!(got);
                out["pass"] = json!(value == got.into());
            }
            Ok(out)
        }
        Command::Specialize { ideal, b, q, d } => {
            let field = FieldSpec::prime(*q).map_err(|e| CliError::Usage(e.to_string()))?;
            let ideal = load_ideal(ideal, field)?;
            let r = specialize::check_flat_limit_support(ideal.generators(), ideal.n(), *b, *q, *d)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let mut out = json!({
                "schema": SCHEMA,
                "command": "specialize",
                "pass": r.verdict == Verdict::Equal,
            });
            merge(&mut out, serde_json::to_value(&r).expect("report serializes"));
            Ok(out)
        }
        Command::GenericSing {
            ideal,
            l,
            q,
            trials,
            seed,
        } => {
            let field = FieldSpec::prime(*q).map_err(|e| CliError::Usage(e.to_string()))?;
            let ideal = load_ideal(ideal, field)?;
            guard.check(ideal.n(), *l)?;
            let r = specialize::generic_singular_support_check(&ideal, *l, *q, *trials, *seed)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let pass = (*trials > 0).then(|| r.witness_found() && r.containment_holds());
            let mut out = json!({
                "schema": SCHEMA,
                "command": "generic-sing",
                "pass": pass,
            });
            merge(&mut out, serde_json::to_value(&r).expect("report serializes"));
            Ok(out)
        }
    }
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_ideal(path: &Path, field: FieldSpec) -> Result<IdealPresentation, CliError> {
    let json: IdealJson = read_json(path)?;
    IdealPresentation::from_json(field, &json).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[derive(Clone, Copy)]
struct Guard(usize);

impl Guard {
    /// Rejects degree-`l` pieces of `k[x_0..x_n]` with more than the budget
    /// of monomials.
    fn check(self, n: usize, l: u32) -> Result<(), CliError> {
        let cols = formulas::binom(l as i64 + n as i64, n as i64).expect("n >= 0");
        if cols > self.0.into() {
            return Err(CliError::Guard(format!(
                "S_{l} in {} variables has {cols} monomials, budget is {} (raise --max-columns)",
                n + 1,
                self.0
            )));
        }
        Ok(())
    }
}

struct Grid {
    n: Vec<i64>,
    b: Vec<i64>,
    d: Vec<i64>,
    l: Vec<i64>,
}

fn case(params: Value, expected: impl ToString, got: impl ToString, relation: &str, ok: bool) -> Value {
    json!({
        "params": params,
        "expected": expected.to_string(),
        "got": got.to_string(),
        "relation": relation,
        "ok": ok,
    })
}

fn valid_nb(n: i64, b: i64) -> bool {
    formulas::check_nb(n, b).is_ok()
}

fn check_lemma(
    lemma: Lemma,
    g: &Grid,
    field: FieldSpec,
    seed: u64,
    samples: usize,
    quadric: &str,
    guard: Guard,
) -> Result<Value, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    let mut skipped = 0usize;
    let name = match lemma {
        Lemma::CodOneLin => "cod-one-lin",
        Lemma::CodiDSpaces => "codi-d-spaces",
        Lemma::Explct => "explct",
        Lemma::SqOfIdeal => "sq-of-ideal",
        Lemma::X1Accounting => "x1-accounting",
        Lemma::B1Consistency => "b1-consistency",
    };

    // Guards run over the whole grid before any computation starts.
    let oracle = !matches!(lemma, Lemma::B1Consistency);
    if oracle {
        for &n in &g.n {
            for &l in &g.l {
                if n >= 1 && l >= 1 {
                    guard.check(n as usize, l as u32)?;
                }
            }
        }
    }

    match lemma {
        Lemma::CodOneLin | Lemma::X1Accounting => {
            for &n in &g.n {
                for &b in &g.b {
                    for &l in &g.l {
                        if !valid_nb(n, b) || l < 1 {
                            skipped += 1;
                            continue;
                        }
                        let ideal = IdealPresentation::coordinate_linear_space(field, n as usize, b as usize)
                            .expect("valid n, b");
                        let w = ideal.w_space(l as u32).expect("l >= 1");
                        let params = json!({"n": n, "b": b, "l": l});
                        if lemma == Lemma::CodOneLin {
                            let expected = formulas::linear_codim(n, b, l);
                            let ok = expected == w.codim().into();
                            cases.push(case(params, expected, w.codim(), "==", ok));
                        } else {
                            let x = formulas::dim_x1(n, b, l);
                            let fiber = w.dim() as i64 - 1;
                            let got = fiber + x.grassmannian;
                            let ok = x.total == got.into() && x.fiber == fiber.into();
                            cases.push(case(params, &x.total, got, "==", ok));
                        }
                    }
                }
            }
        }
        Lemma::CodiDSpaces => {
            for &n in &g.n {
                for &b in &g.b {
                    for &d in &g.d {
                        for &l in &g.l {
                            if !valid_nb(n, b) || d < 1 || 2 * d > l + 1 {
                                skipped += 1;
                                continue;
                            }
                            let bound = formulas::union_bound(n, b, d, l);
                            for sample in 0..samples {
                                let cfg = LinearSpaceConfig::random(field, n as usize, b as usize, d as usize, &mut rng)
                                    .expect("valid configuration");
                                let got = cfg.union_squared_piece(l as u32).expect("l >= 1").codim();
                                let (rel, ok) = if d == 1 {
                                    ("==", bound == got.into())
                                } else {
                                    (">=", bound <= got.into())
                                };
                                let params = json!({"n": n, "b": b, "d": d, "l": l, "sample": sample});
                                cases.push(case(params, &bound, got, rel, ok));
                            }
                        }
                    }
                }
            }
        }
        Lemma::Explct => {
            for &n in &g.n {
                for &b in &g.b {
                    for &d in &g.d {
                        for &l in &g.l {
                            if !valid_nb(n, b) || d < 1 || l < 2 * d {
                                skipped += 1;
                                continue;
                            }
                            let expected = formulas::beta(n, b, d, l);
                            for sample in 0..samples {
                                let f = random_form(field, n as usize, b as usize + 1, d as u32, &mut rng);
                                let ideal =
                                    IdealPresentation::hypersurface_in_plane(f, b as usize).expect("valid n, b");
                                let got = ideal.square().graded_piece(l as u32).codim();
                                let params = json!({"n": n, "b": b, "d": d, "l": l, "sample": sample});
                                cases.push(case(params, &expected, got, "==", expected == got.into()));
                            }
                        }
                    }
                }
            }
        }
        Lemma::SqOfIdeal => {
            for &n in &g.n {
                for &b in &g.b {
                    for &l in &g.l {
                        if !valid_nb(n, b) || l < 1 {
                            skipped += 1;
                            continue;
                        }
                        let f = HomPoly::parse(field, n as usize, quadric)
                            .map_err(|e| CliError::Usage(format!("--quadric: {e}")))?;
                        if f.degree() != 2 || f.terms().any(|(m, _)| m.exponents()[b as usize + 2..].iter().any(|&e| e > 0)) {
                            return Err(CliError::Usage(format!(
                                "--quadric must be a quadric in x0..x{} for b = {b}",
                                b + 1
                            )));
                        }
                        let ideal = IdealPresentation::hypersurface_in_plane(f, b as usize).expect("valid n, b");
                        let w = ideal.w_space(l as u32).expect("l >= 1");
                        let sq = ideal.square().graded_piece(l as u32);
                        let expected = formulas::beta(n, b, 2, l);
                        let ok = w == sq && expected == w.codim().into();
                        cases.push(case(json!({"n": n, "b": b, "l": l}), &expected, w.codim(), "==", ok));
                    }
                }
            }
        }
        Lemma::B1Consistency => {
            for &n in &g.n {
                for &d in &g.d {
                    if n < 3 || d < 2 {
                        skipped += 1;
                        continue;
                    }
                    let proven = formulas::rhilb_dim(n, 1, d).expect("d >= 2").value;
                    let conj = formulas::rhilb_conjectural(n, 1, d);
                    cases.push(case(json!({"n": n, "d": d}), &proven, &conj, "==", proven == conj));
                }
            }
        }
    }

    if cases.is_empty() {
        return Err(CliError::Usage("the grid has no admissible parameters".into()));
    }
    let pass = cases.iter().all(|c| c["ok"] == json!(true));
    Ok(json!({
        "schema": SCHEMA,
        "command": "check-lemma",
        "lemma": name,
        "field": field.to_string(),
        "seed": seed,
        "pass": pass,
        "checked": cases.len(),
        "skipped": skipped,
        "cases": cases,
    }))
}
