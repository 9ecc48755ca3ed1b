//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::cell::RefCell;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use glweb::basis::{self, DEFAULT_MAX_WORDS};
use glweb::eval::{evaluate_vector, slice_evaluate};
use glweb::exterior::{self, merge_map, split_map, GlWeight};
use glweb::growth::grow;
use glweb::member::{extract_word, is_basis_diagram, sweep_mutations, SweepReport};
use glweb::wave::{closed_wave_of, enumerate_closed};
use glweb::words::{alphabet, enumerate_words, weight_of_word, TypeString, Word};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

type Outcome = Result<String, String>;

thread_local! {
    /// Weight-conservation failures observed while the other criteria run.
    static WEIGHT_FAILURES: RefCell<Vec<String>> = const { RefCell::new(Vec::new()) };
    static WEIGHT_CHECKS: RefCell<usize> = const { RefCell::new(0) };
}

fn note_weight(w: &Word, x_weight: &GlWeight, n: usize, context: &str) {
    let expected = weight_of_word(w, n).unwrap();
    WEIGHT_CHECKS.with(|c| *c.borrow_mut() += 1);
    if &expected != x_weight {
        WEIGHT_FAILURES.with(|f| f.borrow_mut().push(format!("{context}: term of {w} has weight {x_weight}, expected {expected}")));
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    ensure(start.elapsed() <= limit, || format!("took {:.1?}, limit {limit:?}", start.elapsed()))
}

fn ty(s: &str) -> TypeString {
    s.parse().unwrap()
}

fn hopf_relations() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for n in 2..=4 {
        let rep = exterior::verify_hopf_relations(n, false).map_err(|e| e.to_string())?;
        if let Some(f) = rep.failure {
            return Err(format!("n={n}: {f}"));
        }
        checked += rep.checked;
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("{checked} relation instances, n=2..4"))
}

fn equivariance() -> Outcome {
    let start = Instant::now();
    let mut maps = 0;
    for n in 1..=3usize {
        let m = n as i32;
        for a in 0..=m {
            for b in 0..=m - a {
                let fail = exterior::check_equivariance(n, &[a, b], |x| x.multiply(0))
                    .and_then(|f| Ok(f.or(exterior::check_equivariance(n, &[a + b], |x| x.comultiply(0, a as usize, b as usize))?)))
                    .map_err(|e| e.to_string())?;
                ensure(fail.is_none(), || format!("n={n} ({a},{b}): {}", fail.clone().unwrap()))?;
                maps += 2;
            }
        }
        for r in -m..=m {
            for s in -m..=m {
                if (r + s).abs() > m {
                    continue;
                }
                let fail = exterior::check_equivariance(n, &[r, s], |x| merge_map(r, s, x))
                    .and_then(|f| Ok(f.or(exterior::check_equivariance(n, &[r + s], |x| split_map(r, s, x))?)))
                    .map_err(|e| e.to_string())?;
                ensure(fail.is_none(), || format!("n={n} merge/split ({r},{s}): {}", fail.clone().unwrap()))?;
                maps += 2;
            }
        }
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("{maps} maps commute with every generator, n<=3"))
}

const RANGES: [(usize, usize); 2] = [(2, 6), (3, 4)];

struct MatrixStats {
    rows: usize,
    violations: Vec<String>,
    diagonal_failures: Vec<String>,
}

fn matrices() -> Result<MatrixStats, String> {
    let mut stats = MatrixStats { rows: 0, violations: Vec::new(), diagonal_failures: Vec::new() };
    for (n, max_r) in RANGES {
        for r in 0..=max_r {
            let m = basis::assemble(r, n, None, None, DEFAULT_MAX_WORDS).map_err(|e| e.to_string())?;
            stats.rows += m.len();
            for (i, j) in m.entries.keys() {
                note_weight(&m.words[*i], &weight_of_word(&m.words[*j], n).unwrap(), n, "matrix");
            }
            for (i, w) in m.words.iter().enumerate() {
                if m.diagonal_states[i] != 1 {
                    stats.diagonal_failures.push(format!("n={n} {w}: {} states", m.diagonal_states[i]));
                }
            }
            let rep = basis::verify_triangular(&m);
            stats.violations.extend(
                rep.violations
                    .iter()
                    .filter(|v| !matches!(v, basis::Violation::DiagonalStates { .. }))
                    .map(|v| format!("n={n} r={r}: {v}")),
            );
        }
    }
    Ok(stats)
}

fn triangularity(stats: &Result<MatrixStats, String>, start: Instant) -> Outcome {
    let s = stats.as_ref().map_err(Clone::clone)?;
    ensure(s.violations.is_empty(), || format!("{} violations, first: {}", s.violations.len(), s.violations[0]))?;
    within(start, Duration::from_secs(600))?;
    Ok(format!("{} rows over n=2 r<=6 and n=3 r<=4, unit diagonal, nothing above it", s.rows))
}

fn diagonal_uniqueness(stats: &Result<MatrixStats, String>) -> Outcome {
    let s = stats.as_ref().map_err(Clone::clone)?;
    ensure(s.diagonal_failures.is_empty(), || format!("{} rows, first: {}", s.diagonal_failures.len(), s.diagonal_failures[0]))?;
    Ok(format!("{} diagonal state sums with exactly one state", s.rows))
}

fn invariant_counts() -> Outcome {
    let mut types = Vec::new();
    for r in 0..=4 {
        types.extend(TypeString::all(r).into_iter().map(|u| (u, 2)));
        types.extend(TypeString::all(r).into_iter().map(|u| (u, 3)));
    }
    for u in ["+++", "---", "+-+-+-", "+++---", "++-+--"] {
        types.push((ty(u), 3));
    }
    types.push((ty("+-+-+-"), 2));
    for (u, n) in &types {
        let words = basis::invariant_basis(u, *n).map_err(|e| e.to_string())?;
        for w in &words {
            note_weight(w, &GlWeight::zero(*n), *n, "invariant");
        }
        let oracle = basis::oracle_invariants(u, *n);
        ensure(words.len() == oracle, || format!("n={n} type {u}: {} words, oracle {oracle}", words.len()))?;
    }
    let alternating = basis::invariant_basis(&ty("+-+-+-"), 2).map_err(|e| e.to_string())?.len();
    let end = basis::endomorphism_dimension(3, 2);
    ensure(alternating == 5 && end == 5.into(), || format!("(+-)^3 at n=2: {alternating} words, End dimension {end}"))?;
    let end3 = basis::endomorphism_dimension(3, 3);
    let alternating3 = basis::invariant_basis(&ty("+-+-+-"), 3).map_err(|e| e.to_string())?.len();
    ensure(end3 == alternating3.into(), || format!("(+-)^3 at n=3: {alternating3} words, End dimension {end3}"))?;
    Ok(format!("{} types agree with the kernel oracle; (+-)^3 gives 5 at n=2, {alternating3} at n=3", types.len()))
}

fn highest_weight_counts() -> Outcome {
    let six = ty("++++++");
    let two = basis::highest_weight_subset(&six, &GlWeight::new(vec![3, 3]), 2).map_err(|e| e.to_string())?;
    let three = basis::highest_weight_subset(&six, &GlWeight::new(vec![2, 2, 2]), 3).map_err(|e| e.to_string())?;
    for w in &two {
        note_weight(w, &GlWeight::new(vec![3, 3]), 2, "highest weight");
    }
    for w in &three {
        note_weight(w, &GlWeight::new(vec![2, 2, 2]), 3, "highest weight");
    }
    let (h2, h3) = (basis::hook_length_count(&[3, 3]), basis::hook_length_count(&[2, 2, 2]));
    ensure(two.len() == 5 && h2 == 5u32.into(), || format!("n=2: {} words, hook lengths {h2}", two.len()))?;
    ensure(three.len() == 5 && h3 == 5u32.into(), || format!("n=3: {} words, hook lengths {h3}", three.len()))?;
    Ok("5 words for (3,3) at n=2 and for (2,2,2) at n=3, matching hook lengths".into())
}

fn wave_correspondence() -> Outcome {
    let table: [(&str, [[usize; 3]; 2]); 5] = [
        ("112233", [[1, 4, 5], [2, 3, 6]]),
        ("112323", [[1, 5, 6], [2, 3, 4]]),
        ("121233", [[1, 2, 6], [3, 4, 5]]),
        ("121323", [[1, 2, 4], [3, 5, 6]]),
        ("123123", [[1, 2, 3], [4, 5, 6]]),
    ];
    for (word, blocks) in &table {
        let g = closed_wave_of(&word.parse().unwrap(), 3).map_err(|e| e.to_string())?.ok_or(format!("{word} is not closed"))?;
        let expected: Vec<Vec<usize>> = blocks.iter().map(|b| b.to_vec()).collect();
        ensure(g.blocks == expected, || format!("{word}: got {g}"))?;
    }
    let small = enumerate_closed(3, 2).map_err(|e| e.to_string())?;
    let large = enumerate_closed(3, 3).map_err(|e| e.to_string())?;
    let oracle = basis::hook_length_count(&[3, 3, 3]);
    ensure(small.len() == 5, || format!("shape (2,2,2): {} graphs", small.len()))?;
    ensure(large.len() == 42 && oracle == 42u32.into(), || format!("shape (3,3,3): {} graphs, hook lengths {oracle}", large.len()))?;
    Ok("table reproduced; 5 and 42 closed wave graphs".into())
}

fn compare_evaluators(w: &Word, n: usize) -> Result<(), String> {
    let a = evaluate_vector(w, n).map_err(|e| format!("{w}: {e}"))?;
    let b = slice_evaluate(w, n).map_err(|e| format!("{w}: {e}"))?;
    for key in a.terms().keys() {
        note_weight(w, &a.key_weight(key), n, "state sum");
    }
    ensure(a == b, || format!("n={n} {w}: state sum {a} vs slices {b}"))
}

fn cross_evaluator() -> Outcome {
    let mut count = 0;
    for r in 0..=4 {
        for w in enumerate_words(r, 2, None, None) {
            compare_evaluators(&w, 2)?;
            count += 1;
        }
    }
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let letters = alphabet(3);
    for _ in 0..100 {
        let w = Word::new((0..6).map(|_| *letters.choose(&mut rng).unwrap()).collect());
        compare_evaluators(&w, 3)?;
        count += 1;
    }
    Ok(format!("{count} words agree (all of n=2 r<=4, 100 random at n=3 r=6)"))
}

fn membership() -> Outcome {
    let mut words = 0;
    let mut sweep = SweepReport::default();
    for n in 1..=3 {
        for r in 0..=4 {
            for w in enumerate_words(r, n, None, None) {
                let d = grow(&w, n).map_err(|e| e.to_string())?;
                let x = extract_word(&d).map_err(|e| format!("{w}: {e}"))?;
                let rep = is_basis_diagram(&d).map_err(|e| format!("{w}: {e}"))?;
                ensure(x == w && rep.is_basis, || format!("n={n} {w}: extracted {x}, is_basis {}", rep.is_basis))?;
                sweep.merge(sweep_mutations(&d).map_err(|e| format!("{w}: {e}"))?);
                words += 1;
            }
        }
    }
    let rate = sweep.rejection_rate();
    ensure(rate >= 0.95, || format!("only {:.2}% of mutations rejected", 100.0 * rate))?;
    let unverified = sweep.accepted.iter().filter(|a| !a.verified).count();
    ensure(unverified == 0, || format!("{unverified} accepted mutations not canonically equal"))?;
    Ok(format!(
        "{words} diagrams round trip; {} of {} mutations rejected ({:.2}%), {} accepted all verified",
        sweep.rejected,
        sweep.total,
        100.0 * rate,
        sweep.accepted.len()
    ))
}

fn weight_conservation() -> Outcome {
    let failures = WEIGHT_FAILURES.with(|f| f.borrow().clone());
    let checks = WEIGHT_CHECKS.with(|c| *c.borrow());
    ensure(checks > 0, || "no terms were checked".into())?;
    ensure(failures.is_empty(), || format!("{} failures, first: {}", failures.len(), failures[0]))?;
    Ok(format!("{checks} terms carry the weight of their word"))
}

fn report(index: usize, name: &str, start: Instant, outcome: &Outcome) -> bool {
    let elapsed = start.elapsed();
    match outcome {
        Ok(detail) => println!("PASS {index:>2} {name}: {detail} [{elapsed:.2?}]"),
        Err(reason) => println!("FAIL {index:>2} {name}: {reason} [{elapsed:.2?}]"),
    }
    outcome.is_ok()
}

fn main() -> ExitCode {
    let mut ok = true;
    let t = Instant::now();
    ok &= report(1, "Hopf relations", t, &hopf_relations());
    let t = Instant::now();
    ok &= report(2, "equivariance", t, &equivariance());
    let t = Instant::now();
    let stats = matrices();
    ok &= report(3, "triangularity", t, &triangularity(&stats, t));
    ok &= report(4, "diagonal uniqueness", t, &diagonal_uniqueness(&stats));
    let t = Instant::now();
    ok &= report(5, "invariant counts", t, &invariant_counts());
    let t = Instant::now();
    ok &= report(6, "highest weight counts", t, &highest_weight_counts());
    let t = Instant::now();
    ok &= report(7, "wave correspondence", t, &wave_correspondence());
    let t = Instant::now();
    ok &= report(8, "cross-evaluator", t, &cross_evaluator());
    let t = Instant::now();
    ok &= report(9, "membership", t, &membership());
    let t = Instant::now();
    ok &= report(10, "weight conservation", t, &weight_conservation());
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
