//! One PASS/FAIL line per acceptance criterion.
//!
//! Run with `cargo test -p stropsat-cli --test acceptance -- --nocapture`
//! to see the report.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stropsat::encoder::{clausify, encode_positive_vertex, encode_vertex_separation, BoolVar, PropFormula, Unknowns};
use stropsat::engine::solve as solve_clauses;
use stropsat::lra::{CheckOutcome, LinearAtom, Relation, SimplexContext, Unknown};
use stropsat::poly::{int, ratio};
use stropsat::subtropical::{
    encode_problem, find_base, find_root, lex_vertex, solve, solve_timed, Direction, Extremum, Outcome, Problem,
    RootOutcome, SolveConfig,
};
use stropsat::{ExponentVector, Point, Polynomial, Rational, SignVariant};
use stropsat_cli::{generate_script, run_batch, run_source, RunConfig, RunError, RunReport, Verdict};
use stropsat_oracle::{cluster_exists, evaluate, is_vertex, positive_frame_vertex_exists, random, Terms};

type Check = Result<String, String>;

fn ensure(condition: bool, message: impl Into<String>) -> Result<(), String> {
    if condition {
        Ok(())
    } else {
        Err(message.into())
    }
}

fn polynomial(d: usize, terms: &Terms) -> Polynomial {
    Polynomial::from_int_terms(d, terms.iter().map(|(e, c)| (e.clone(), *c))).unwrap()
}

fn example_one() -> Terms {
    vec![
        (vec![0, 1], 1),
        (vec![1, 3], 2),
        (vec![2, 2], -3),
        (vec![3, 0], -1),
        (vec![4, 4], -4),
    ]
}

fn example_two() -> Vec<Terms> {
    vec![
        vec![(vec![0, 0, 0], 2), (vec![1, 2, 1], -1), (vec![2, 1, 3], 1)],
        vec![
            (vec![0, 0, 0], 3),
            (vec![1, 2, 4], -1),
            (vec![2, 0, 1], -1),
            (vec![4, 3, 3], -1),
        ],
        // 4 - z - y - x + 4
        vec![
            (vec![0, 0, 0], 8),
            (vec![0, 0, 1], -1),
            (vec![0, 1, 0], -1),
            (vec![1, 0, 0], -1),
        ],
    ]
}

fn example_three() -> Vec<Terms> {
    vec![
        vec![
            (vec![0, 0, 0], -12),
            (vec![12, 25, 49], 2),
            (vec![13, 22, 110], -31),
            (vec![1000, 500, 89], -11),
        ],
        vec![
            (vec![0, 0, 0], -23),
            (vec![1, 22, 110], 5),
            (vec![15, 20, 1000], -21),
            (vec![100, 2, 49], 2),
        ],
    ]
}

fn show(x: &[Rational]) -> String {
    let parts: Vec<String> = x.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

fn criterion_1() -> Check {
    let f = polynomial(2, &example_one());
    let x = [ratio(1, 4), int(8)];
    let start = Instant::now();
    let value = f.evaluate(&Point::new(x.to_vec())).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let independent = evaluate(&example_one(), &x);
    ensure(
        value == independent,
        format!("evaluate gives {value}, term-by-term oracle gives {independent}"),
    )?;
    ensure(elapsed < Duration::from_millis(1), format!("took {elapsed:?}"))?;
    let stated = ratio(51193, 256);
    ensure(
        value == stated,
        format!("exact value {value} (agrees with the independent oracle) differs from the stated constant {stated}"),
    )?;
    Ok(format!("f(1/4, 8) = {value} in {elapsed:?}"))
}

fn criterion_2() -> Check {
    let f = polynomial(2, &example_one());
    let frame = f.signed_frame().map_err(|e| e.to_string())?;
    let p = ExponentVector::new(vec![1, 3]);
    let u = Unknowns::allocate(2, 1);
    let points = frame.points();
    let phi = encode_vertex_separation(&p, points.iter(), &u, 0);
    ensure(
        solve_clauses(&clausify(&phi).with_unknowns(u.len())).is_sat(),
        "separation formula infeasible",
    )?;

    let mut ctx = SimplexContext::with_unknowns(u.len());
    let fix = |unknown: Unknown, value: i64, relation| LinearAtom::new([(unknown, int(1))], int(-value), relation);
    let mut atoms = vec![
        fix(u.n[0], -2, Relation::Ge),
        fix(u.n[0], -2, Relation::Le),
        fix(u.n[1], 3, Relation::Ge),
        fix(u.n[1], 3, Relation::Le),
    ];
    atoms.extend(phi.atoms().into_iter().cloned());
    for (tag, atom) in atoms.iter().enumerate() {
        ctx.assert_atom(atom, tag).map_err(|e| e.to_string())?;
    }
    let model = match ctx.check_and_model() {
        CheckOutcome::Sat(model) => model,
        CheckOutcome::Unsat(_) => return Err("infeasible with n = (-2, 3)".into()),
    };
    ensure(atoms.iter().all(|a| a.holds(&model)), "model violates an atom")?;
    let all: Vec<Vec<u32>> = points.iter().map(|q| q.exponents().to_vec()).collect();
    ensure(is_vertex(&[1, 3], &all), "hull oracle disagrees on (1,3)")?;
    ensure(!is_vertex(&[2, 2], &all), "hull oracle calls (2,2) a vertex")?;
    Ok(format!("(1,3) separated with n = (-2, 3), c = {}", model[u.c[0].0]))
}

fn criterion_3() -> Check {
    let fs: Vec<Polynomial> = example_two().iter().map(|t| polynomial(3, t)).collect();
    let problem = Problem::anonymous(3, fs).map_err(|e| e.to_string())?;
    let Outcome::Sat(witness) = solve(&problem, &SolveConfig::default()) else {
        return Err("solve did not return sat".into());
    };
    let x = witness.point().into_coordinates();
    ensure(
        example_two().iter().all(|t| evaluate(t, &x).is_positive()),
        "witness not positive",
    )?;
    let direction = Direction {
        n: vec![(-1).into(); 3],
        sign_variant: SignVariant::identity(3),
        offsets: vec![int(-1); 3],
        vertices: vec![ExponentVector::zero(3); 3],
    };
    let base = find_base(&problem, &direction, 32).map_err(|e| e.to_string())?;
    ensure(base == int(2), format!("base {base} instead of 2"))?;
    Ok(format!("sat with witness {}; n = (-1,-1,-1) accepts a = 2", show(&x)))
}

fn criterion_4() -> Check {
    let fs: Vec<Polynomial> = example_three().iter().map(|t| polynomial(3, t)).collect();
    let problem = Problem::anonymous(3, fs.clone()).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let (outcome, _) = solve_timed(&problem, &SolveConfig::default());
    let elapsed = start.elapsed();
    let Outcome::Sat(witness) = outcome else {
        return Err("solve did not return sat".into());
    };
    let x = witness.point().into_coordinates();
    for t in example_three() {
        ensure(evaluate(&t, &x).is_positive(), "witness not positive")?;
    }
    ensure(elapsed < Duration::from_secs(5), format!("took {elapsed:?}"))?;

    let u = Unknowns::allocate(3, 2);
    let psi = PropFormula::and(
        fs.iter()
            .enumerate()
            .map(|(i, f)| encode_positive_vertex(&f.signed_frame().unwrap(), &u, i)),
    );
    let mut model = vec![ratio(-238834, 120461), ratio(2672460, 1325071), ratio(-368561, 1325071)];
    model.extend([int(-1), int(-1)]);
    ensure(
        psi.evaluate(&|_: BoolVar| false, &|a: &LinearAtom| a.holds(&model)),
        "published model violates the encoding",
    )?;
    let PropFormula::And(conjuncts) = &psi else {
        return Err("unexpected formula shape".into());
    };
    for conjunct in conjuncts {
        if let PropFormula::Atom(a) = conjunct {
            ensure(a.holds(&model), format!("atom {a} fails"))?;
        }
    }
    Ok(format!(
        "sat in {elapsed:?} at {}; published model satisfies all {} conjuncts",
        show(&x),
        conjuncts.len()
    ))
}

fn criterion_5() -> Check {
    let frame = polynomial(2, &example_one())
        .signed_frame()
        .map_err(|e| e.to_string())?;
    let lex = |order: &[usize], extremum| lex_vertex(&frame, order, extremum).map(|v| v.exponents().to_vec());
    let expect = |order: &[usize], extremum, want: [u32; 2]| -> Result<(), String> {
        let got = lex(order, extremum).map_err(|e| e.to_string())?;
        ensure(
            got == want,
            format!("{extremum:?} over {order:?} gives {got:?}, want {want:?}"),
        )
    };
    expect(&[0, 1], Extremum::Max, [4, 4])?;
    expect(&[1, 0], Extremum::Max, [4, 4])?;
    expect(&[0, 1], Extremum::Min, [0, 1])?;
    expect(&[1, 0], Extremum::Min, [3, 0])?;
    Ok("max (4,4) on both orders; reversed orders give (0,1) and (3,0)".into())
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cases = 500;
    let mut feasible = 0;
    for _ in 0..cases {
        let d = rng.gen_range(1..=3);
        let terms = random::polynomial(&mut rng, d, 5, 4);
        let frame = polynomial(d, &terms).signed_frame().map_err(|e| e.to_string())?;
        let u = Unknowns::allocate(d, 1);
        let psi = encode_positive_vertex(&frame, &u, 0);
        let verdict = solve_clauses(&clausify(&psi).with_unknowns(u.len())).is_sat();
        let positive: Vec<Vec<u32>> = frame.positive.iter().map(|p| p.exponents().to_vec()).collect();
        let negative: Vec<Vec<u32>> = frame.negative.iter().map(|p| p.exponents().to_vec()).collect();
        ensure(
            verdict == positive_frame_vertex_exists(&positive, &negative),
            format!("mismatch on {terms:?}"),
        )?;
        feasible += usize::from(verdict);
    }
    Ok(format!(
        "{cases} polynomials, {feasible} with a positive vertex, zero mismatches"
    ))
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cases = 1000;
    let mut sat = 0;
    for _ in 0..cases {
        let (d, polys) = random::problem(&mut rng, 3, 4, 5, 3);
        let fs: Vec<Polynomial> = polys.iter().map(|t| polynomial(d, t)).collect();
        let problem = Problem::anonymous(d, fs).map_err(|e| e.to_string())?;
        let verdict = solve_clauses(&encode_problem(&problem).clauses).is_sat();
        ensure(verdict == cluster_exists(d, &polys), format!("mismatch on {polys:?}"))?;
        sat += usize::from(verdict);
    }
    Ok(format!("{cases} instances, {sat} sat, zero mismatches"))
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cases = 1000;
    let mut sat = 0;
    for _ in 0..cases {
        let (d, polys) = random::problem(&mut rng, 3, 4, 5, 4);
        let fs: Vec<Polynomial> = polys.iter().map(|t| polynomial(d, t)).collect();
        let problem = Problem::anonymous(d, fs).map_err(|e| e.to_string())?;
        if let Outcome::Sat(witness) = solve(&problem, &SolveConfig::default()) {
            sat += 1;
            let x = witness.point().into_coordinates();
            ensure(
                polys.iter().all(|t| evaluate(t, &x).is_positive()),
                format!("witness fails on {polys:?}"),
            )?;
        }
    }
    let mut scripts = 0;
    let mut script_rng = ChaCha8Rng::seed_from_u64(80);
    for i in 0..cases {
        let text = generate_script(&mut script_rng);
        match run_source(&format!("gen-{i}"), &text, &RunConfig::default()) {
            Ok(_) => scripts += 1,
            Err(e @ RunError::Internal(_)) => return Err(e.to_string()),
            Err(e) => return Err(format!("generated script rejected: {e}")),
        }
    }
    Ok(format!(
        "{cases} problems ({sat} sat) with exactly positive witnesses; {scripts} generated scripts, zero internal errors"
    ))
}

fn criterion_9() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("negative.smt2");
    std::fs::write(
        &path,
        "(declare-fun x () Real)\n(declare-fun y () Real)\n(assert (> (- (- 1) (* x x) (* y y)) 0))\n(check-sat)\n",
    )
    .map_err(|e| e.to_string())?;
    let binary = env!("CARGO_BIN_EXE_stropsat");
    // Process startup is measured separately with a file that needs no solving.
    let empty = dir.path().join("empty.smt2");
    std::fs::write(&empty, "").map_err(|e| e.to_string())?;
    let start = Instant::now();
    Command::new(binary).arg(&empty).output().map_err(|e| e.to_string())?;
    let startup = start.elapsed();

    let start = Instant::now();
    let text = Command::new(binary).arg(&path).output().map_err(|e| e.to_string())?;
    let wall = start.elapsed();
    let stdout = String::from_utf8_lossy(&text.stdout);
    ensure(
        stdout.lines().next() == Some("unknown"),
        format!("first line of {stdout:?}"),
    )?;
    ensure(text.status.code() == Some(1), format!("exit status {:?}", text.status))?;
    ensure(wall < Duration::from_millis(100), format!("took {wall:?}"))?;

    let json = Command::new(binary)
        .arg("--json")
        .arg(&path)
        .output()
        .map_err(|e| e.to_string())?;
    let report: RunReport = serde_json::from_slice(&json.stdout).map_err(|e| e.to_string())?;
    ensure(report.verdict == Verdict::Unknown, "json verdict")?;
    ensure(
        report.timing.solve_ms < 10.0,
        format!("solve phase {} ms", report.timing.solve_ms),
    )?;
    Ok(format!(
        "unknown in {wall:?} wall (startup alone {startup:?}), solve phase {:.3} ms",
        report.timing.solve_ms
    ))
}

fn criterion_10() -> Check {
    let cfg = RunConfig::default();
    let showcase = run_batch(&corpus("showcase"), &cfg).map_err(|e| e.to_string())?;
    ensure(
        showcase.rows.len() == 3 && showcase.sat == 3,
        format!("showcase corpus: {} rows, {} sat", showcase.rows.len(), showcase.sat),
    )?;
    let mini = run_batch(&corpus("mini"), &cfg).map_err(|e| e.to_string())?;
    ensure(
        mini.rows.len() == 20,
        format!("mini corpus has {} rows", mini.rows.len()),
    )?;
    ensure(
        mini.sat + mini.unsat + mini.unknown == 20,
        "mini corpus counts do not add up",
    )?;
    ensure(
        (mini.sat, mini.unsat, mini.unknown) == (11, 2, 7),
        format!("mini corpus counts {} / {} / {}", mini.sat, mini.unsat, mini.unknown),
    )?;
    let empty = tempfile::tempdir().map_err(|e| e.to_string())?;
    let none = run_batch(empty.path(), &cfg).map_err(|e| e.to_string())?;
    ensure(none.rows.is_empty(), "empty directory produced rows")?;
    Ok(format!(
        "showcase 3/3 sat; mini 20 rows ({} sat, {} unsat, {} unknown); empty dir 0 rows",
        mini.sat, mini.unsat, mini.unknown
    ))
}

fn criterion_11() -> Check {
    let f = Polynomial::from_int_terms(1, [(vec![2], 1), (vec![0], -2)]).map_err(|e| e.to_string())?;
    let width = Rational::new(1.into(), (1u64 << 20).into());
    let RootOutcome::Bracket(bracket) = find_root(&f, &width) else {
        return Err("no bracket".into());
    };
    let low = &bracket.low.coordinates()[0];
    let high = &bracket.high.coordinates()[0];
    let (fl, fh) = (low * low - int(2), high * high - int(2));
    ensure(
        !fl.is_zero() && !fh.is_zero() && fl.is_positive() != fh.is_positive(),
        "endpoint signs do not differ",
    )?;
    let actual = (high - low).abs();
    ensure(actual <= width && bracket.width <= width, format!("width {actual}"))?;
    let (lo, hi) = if low < high { (low, high) } else { (high, low) };
    ensure(lo * lo < int(2) && int(2) < hi * hi, "bracket misses sqrt(2)")?;
    Ok(format!("sqrt(2) in [{lo}, {hi}], width {actual}"))
}

/// Criteria whose stated constant contradicts its own formula. They are
/// reported as FAIL and must fail for exactly that reason.
const KNOWN_INCONSISTENT: &[(usize, &str)] = &[(1, "differs from the stated constant")];

#[test]
fn acceptance() {
    let criteria: [(usize, fn() -> Check); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let mut unexpected = Vec::new();
    for (number, check) in criteria {
        let known = KNOWN_INCONSISTENT.iter().find(|(n, _)| *n == number);
        match (check(), known) {
            (Ok(detail), None) => println!("criterion {number}: PASS {detail}"),
            (Ok(detail), Some(_)) => {
                println!("criterion {number}: PASS {detail}");
                unexpected.push(format!("criterion {number} passed but is listed as inconsistent"));
            }
            (Err(reason), Some((_, expected))) if reason.contains(expected) => {
                println!("criterion {number}: FAIL {reason}");
            }
            (Err(reason), _) => {
                println!("criterion {number}: FAIL {reason}");
                unexpected.push(format!("criterion {number}: {reason}"));
            }
        }
    }
    assert!(unexpected.is_empty(), "{unexpected:#?}");
}
