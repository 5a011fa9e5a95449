//! Acceptance suite: each criterion prints one PASS/FAIL line with its
//! runtime against the budget. Runs without the libtest harness so the lines
//! always reach the output.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use singlocus_core::bounds::{self, Target};
use singlocus_core::formulas;
use singlocus_core::ideals::random_form;
use singlocus_core::specialize::{self, Verdict};
use singlocus_core::{Ambient, ExactMatrix, FieldSpec, HomPoly, IdealPresentation, LinearSpaceConfig, Subspace};

const Q: FieldSpec = FieldSpec::Rationals;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn singlocus(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_singlocus"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code(), out.stdout)
}

/// Codimension of forms singular along a b-plane, exact vs closed form.
fn c1_single_linear_space() -> Check {
    let mut cells = 0;
    for n in 3..=4usize {
        for b in 1..n {
            let ideal = IdealPresentation::coordinate_linear_space(Q, n, b).unwrap();
            for l in 2..=8u32 {
                let got = ideal.w_space(l).unwrap().codim();
                let expected = formulas::linear_codim(n as i64, b as i64, l as i64);
                ensure(expected == got.into(), || format!("n={n} b={b} l={l}: {got} != {expected}"))?;
                cells += 1;
            }
        }
    }
    Ok(format!("{cells} cells exact"))
}

/// Forms singular along d lines through a point: exact codim vs bound.
fn c2_union_bound() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut checked, mut sharp) = (0, 0);
    for d in 1..=3usize {
        let ls: Vec<u32> = if d == 1 { (1..=9).collect() } else { (2 * d as u32 - 1..=9).collect() };
        for l in ls {
            let bound = formulas::union_bound(3, 1, d as i64, l as i64);
            for _ in 0..5 {
                let cfg = LinearSpaceConfig::random(Q, 3, 1, d, &mut rng).unwrap();
                let got = cfg.union_squared_piece(l).unwrap().codim();
                if d == 1 {
                    ensure(bound == got.into(), || format!("d=1 l={l}: {got} != {bound}"))?;
                } else {
                    ensure(bound <= got.into(), || format!("d={d} l={l}: {got} < {bound}"))?;
                }
                sharp += (bound == got.into()) as usize;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} configurations, {sharp} with equality"))
}

/// Codimension of (f, x_{b+2}, ..., x_n)^2 in degree l equals beta.
fn c3_beta() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(63);
    let mut cells = 0;
    for field in [Q, FieldSpec::PrimeField(32003)] {
        for (n, b) in [(3usize, 1usize), (4, 2), (3, 2)] {
            for d in 2..=3u32 {
                for l in 2 * d..=2 * d + 3 {
                    let f = random_form(field, n, b + 1, d, &mut rng);
                    let ideal = IdealPresentation::hypersurface_in_plane(f, b).unwrap();
                    let got = ideal.square().graded_piece(l).codim();
                    let expected = formulas::beta(n as i64, b as i64, d as i64, l as i64);
                    ensure(expected == got.into(), || {
                        format!("{field} n={n} b={b} d={d} l={l}: {got} != {expected}")
                    })?;
                    cells += 1;
                }
            }
        }
    }
    Ok(format!("{cells} cells exact over Q and F_32003"))
}

/// Forms singular along the conic are exactly the square of its ideal.
fn c4_conic_square() -> Check {
    let mut codims = Vec::new();
    for field in [Q, FieldSpec::PrimeField(5)] {
        let f = HomPoly::parse(field, 3, "x0*x2 - x1^2").unwrap();
        let ideal = IdealPresentation::hypersurface_in_plane(f, 1).unwrap();
        for l in 4..=7u32 {
            let w = ideal.w_space(l).unwrap();
            let sq = ideal.square().graded_piece(l);
            ensure(w == sq, || format!("{field} l={l}: W differs from the square"))?;
            let beta = formulas::beta(3, 1, 2, l as i64);
            ensure(beta == w.codim().into(), || format!("{field} l={l}: codim {} != {beta}", w.codim()))?;
            if field == Q {
                codims.push(w.codim());
            }
        }
    }
    ensure(codims[0] == 21, || format!("codim at l=4 is {}", codims[0]))?;
    Ok(format!("codims {codims:?} over Q and F_5"))
}

/// Dimension bookkeeping identities.
fn c5_accounting() -> Check {
    let mut cells = 0;
    for n in 3..=10i64 {
        for b in 1..n {
            for l in 1..=30 {
                let x = formulas::dim_x1(n, b, l);
                let rhs = formulas::binom(l + n, n).unwrap() - formulas::linear_codim(n, b, l) - 1
                    + formulas::grassmannian_dim(n, b);
                ensure(x.total == rhs, || format!("dim_x1 n={n} b={b} l={l}"))?;
                cells += 1;
            }
        }
        for d in 2..=10 {
            let proven = formulas::rhilb_dim(n, 1, d).unwrap();
            ensure(!proven.conditional, || "b = 1 flagged conditional".into())?;
            ensure(proven.value == formulas::rhilb_conjectural(n, 1, d), || format!("b=1 n={n} d={d}"))?;
            cells += 1;
        }
    }
    Ok(format!("{cells} identities"))
}

fn replay_small_degree(n: i64, b: i64, l0: i64) -> Result<(), String> {
    for l in l0..=l0 + 100 {
        for d in 2..=(l + 1) / 2 {
            let r = bounds::gap_small_degree(n, b, d, l).unwrap();
            ensure(r.holds, || format!("({n},{b}) fails at d={d} l={l}"))?;
        }
    }
    Ok(())
}

/// Threshold certificates through the command line, replayed twice.
fn c6_certificates() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let mut summary = Vec::new();
    for (n, b, extra) in [("3", "1", None), ("4", "2", None), ("3", "1", Some("--second-component"))] {
        let path = dir.path().join(format!("l0-{n}-{b}-{}.json", extra.is_some()));
        let p = path.to_str().unwrap();
        let mut args = vec!["l0", "--n", n, "--b", b, "--out", p];
        args.extend(extra);
        let (code, _) = singlocus(&args);
        ensure(code == Some(0), || format!("l0 {args:?} exited {code:?}"))?;
        let (code, out) = singlocus(&["verify-certificate", p]);
        ensure(code == Some(0), || format!("verify-certificate for {args:?} exited {code:?}"))?;
        let report: Value = serde_json::from_slice(&out).unwrap();
        ensure(report["pass"] == true, || "replay failed".into())?;

        let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let cert = &v["certificate"];
        let l0: i64 = cert["l0"].as_str().unwrap().parse().unwrap();
        let (ni, bi): (i64, i64) = (n.parse().unwrap(), b.parse().unwrap());
        let conditional = cert["conditional"].as_bool().unwrap();
        if extra.is_none() {
            replay_small_degree(ni, bi, l0)?;
            ensure(conditional == (bi >= 2), || format!("({n},{b}) conditional flag is {conditional}"))?;
        } else {
            for l in l0..=l0 + 100 {
                for d in 3..=(l + 1) / 2 {
                    let r = bounds::gap_second_component(ni, bi, d, l).unwrap();
                    ensure(r.holds, || format!("second component fails at d={d} l={l}"))?;
                }
            }
        }
        summary.push(format!("({n},{b}{}) l0={l0}", if extra.is_some() { ",2nd" } else { "" }));
    }
    ensure(bounds::gap_second_component(3, 1, 2, 20).is_err(), || "d = 2 accepted".into())?;
    ensure(bounds::gap_second_component(3, 2, 3, 20).is_err(), || "b = n-1, d = 3 accepted".into())?;
    ensure(bounds::gap_second_component(3, 2, 4, 20).is_ok(), || "b = n-1, d = 4 rejected".into())?;
    let cert = bounds::compute_l0(3, 2, Target::SecondComponent).unwrap();
    ensure(bounds::verify_certificate(&cert).unwrap().ok, || "(3,2) second component".into())?;
    Ok(summary.join(", "))
}

/// Flat limit of the conic {x2, x0 x1 - x3^2} in P^3(F_3).
fn c7_flat_limit() -> Check {
    ensure(specialize::enumerate_points(3, 3).unwrap().len() == 40, || "P^3(F_3) size".into())?;
    let field = FieldSpec::PrimeField(3);
    let gens = vec![
        HomPoly::parse(field, 3, "x2").unwrap(),
        HomPoly::parse(field, 3, "x0*x1 - x3^2").unwrap(),
    ];
    let r = specialize::check_flat_limit_support(&gens, 3, 1, 3, Some(2)).unwrap();
    ensure(r.verdict == Verdict::Equal, || format!("verdict {:?}", r.verdict))?;
    Ok(format!("Y0 = L1 ∪ L2, {} points", r.limit_points))
}

/// Generic members of (I^2)_5 for the conic over F_7 are singular exactly
/// along it.
fn c8_generic_singular_support() -> Check {
    let field = FieldSpec::PrimeField(7);
    let f = HomPoly::parse(field, 3, "x0*x2 - x1^2").unwrap();
    let ideal = IdealPresentation::hypersurface_in_plane(f, 1).unwrap();
    let r = specialize::generic_singular_support_check(&ideal, 5, 7, 100, 8).unwrap();
    ensure(r.c_points == 8, || format!("C has {} points", r.c_points))?;
    ensure(r.containment_holds(), || format!("containment in {}/100", r.contained))?;
    ensure(r.witness_found(), || "no exact witness".into())?;
    Ok(format!("{}/100 exact, 100/100 contain C", r.exact))
}

fn random_rows(rng: &mut ChaCha8Rng, rows: usize, cols: usize, range: i64) -> Vec<Vec<i64>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-range..=range)).collect())
        .collect()
}

/// Linear-algebra and polynomial invariants plus report determinism.
fn c9_structural() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for trial in 0..40 {
        let (r, c) = (rng.gen_range(1..8), rng.gen_range(1..9));
        // Low-rank products make dependent rows common.
        let k = rng.gen_range(1..=r.min(c));
        let a = random_rows(&mut rng, r, k, 3);
        let bm = random_rows(&mut rng, k, c, 3);
        let rows: Vec<Vec<i64>> = (0..r)
            .map(|i| (0..c).map(|j| (0..k).map(|t| a[i][t] * bm[t][j]).sum()).collect())
            .collect();
        for field in [Q, FieldSpec::PrimeField(5), FieldSpec::PrimeField(2)] {
            let m = ExactMatrix::from_i64(field, &rows).unwrap();
            let rank = m.rank();
            ensure(rank + m.kernel().dim() == c, || format!("rank-nullity {field} trial {trial}"))?;
        }
        let rq = ExactMatrix::from_i64(Q, &rows).unwrap().rank();
        for p in [2, 3, 5, 7] {
            let rp = ExactMatrix::from_i64(FieldSpec::PrimeField(p), &rows).unwrap().rank();
            ensure(rp <= rq, || format!("F_{p} rank {rp} > Q rank {rq}"))?;
        }

        let dim = rng.gen_range(2..9);
        let (nu, nv) = (rng.gen_range(0..dim), rng.gen_range(0..dim));
        let u_rows = random_rows(&mut rng, nu, dim, 2);
        let v_rows = random_rows(&mut rng, nv, dim, 2);
        let to_q = |rows: &[Vec<i64>]| -> Vec<Vec<_>> {
            rows.iter().map(|r| r.iter().map(|&x| Q.from_i64(x)).collect()).collect()
        };
        let u = Subspace::from_dense_rows(Q, Ambient::plain(dim), &to_q(&u_rows)).unwrap();
        let v = Subspace::from_dense_rows(Q, Ambient::plain(dim), &to_q(&v_rows)).unwrap();
        let stacked: Vec<Vec<i64>> = u_rows.iter().chain(&v_rows).cloned().collect();
        let sum_dim = if stacked.is_empty() { 0 } else { ExactMatrix::from_i64(Q, &stacked).unwrap().rank() };
        let meet = u.intersect(&v).unwrap().dim();
        ensure(meet + sum_dim == u.dim() + v.dim(), || format!("intersection formula trial {trial}"))?;
    }

    for field in [Q, FieldSpec::PrimeField(5), FieldSpec::PrimeField(7)] {
        for deg in 1..=7u32 {
            let f = random_form(field, 3, 3, deg, &mut rng);
            let mut euler = HomPoly::zero(field, 3, deg);
            for i in 0..=3 {
                let term = f.partial(i).unwrap().mul(&HomPoly::var(field, 3, i)).unwrap();
                euler = euler.add(&term).unwrap();
            }
            let expected = f.scale(&field.from_i64(deg as i64));
            ensure(euler == expected, || format!("Euler over {field} in degree {deg}"))?;
            let p = field.characteristic();
            if p != 0 && deg as u64 % p == 0 {
                ensure(euler.is_zero(), || format!("Euler sum nonzero in degree {deg} over {field}"))?;
            }
        }
    }

    let dir = tempfile::tempdir().unwrap();
    let conic = dir.path().join("conic.json");
    std::fs::write(
        &conic,
        r#"{"n": 3, "generators": [
          {"n": 3, "degree": 2, "terms": [{"coeff": 1, "exps": [1, 0, 1, 0]}, {"coeff": -1, "exps": [0, 2, 0, 0]}]},
          {"n": 3, "degree": 1, "terms": [{"coeff": 1, "exps": [0, 0, 0, 1]}]}]}"#,
    )
    .unwrap();
    let conic = conic.to_str().unwrap();
    for args in [
        vec!["check-lemma", "codi-d-spaces", "--n", "3", "--b", "1", "--d", "2", "--l", "5", "--seed", "7"],
        vec!["generic-sing", "--ideal", conic, "--l", "5", "--q", "7", "--trials", "10", "--seed", "3"],
    ] {
        let (c1, a) = singlocus(&args);
        let (c2, b) = singlocus(&args);
        ensure(c1 == Some(0) && c1 == c2 && a == b, || format!("{} is not deterministic", args[0]))?;
    }
    Ok("rank-nullity, intersection formula, Euler, F_p <= Q rank, determinism".into())
}

fn main() {
    let criteria: [(&str, f64, fn() -> Check); 9] = [
        ("single linear space codimension", 60.0, c1_single_linear_space),
        ("union of linear spaces bound", 120.0, c2_union_bound),
        ("beta equals codimension of the squared ideal", 120.0, c3_beta),
        ("conic: singular forms are the squared ideal", 60.0, c4_conic_square),
        ("accounting identities", 5.0, c5_accounting),
        ("l0 certificates replay", 60.0, c6_certificates),
        ("flat limit support over F_3", 1.0, c7_flat_limit),
        ("generic singular support over F_7", 30.0, c8_generic_singular_support),
        ("structural invariants", 30.0, c9_structural),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let (ok, detail) = match result {
            Ok(d) if secs <= *budget => (true, d),
            Ok(d) => (false, format!("{d}; over budget")),
            Err(e) => (false, e),
        };
        failed += !ok as usize;
        println!(
            "criterion {} {} {name} [{secs:.2}s / {budget}s] {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
