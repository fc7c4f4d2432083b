//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the summary always prints.

mod common;

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use common::random_word;
use moykr_core::complex::compose_complexes;
use moykr_core::invariant::{
    closed_normal_form, compute_closed, compute_closed_by, compute_closed_traced, compute_open, oracle, sigma_plus,
    BraidSpec, InvariantResult,
};
use moykr_core::morphism::MorphExpr;
use moykr_core::simplify::{close_complex, reduce, resolve_ss, verify_catalog, Trace, CORE_SQUARES};
use moykr_core::LaurentPoly;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const LEVELS: std::ops::RangeInclusive<usize> = 2..=6;
const CROSSINGS: std::ops::RangeInclusive<usize> = 1..=12;

/// Sparse polynomial in q and t: (q exponent, t exponent) → coefficient.
type Poly = BTreeMap<(i64, i64), i64>;

fn mono(q: i64, t: i64) -> Poly {
    Poly::from([((q, t), 1)])
}

fn qint(m: i64) -> Poly {
    (0..m).map(|j| ((1 - m + 2 * j, 0), 1)).collect()
}

fn add(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.clone();
    for (k, v) in b {
        *out.entry(*k).or_default() += v;
    }
    out.retain(|_, v| *v != 0);
    out
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for ((qa, ta), va) in a {
        for ((qb, tb), vb) in b {
            *out.entry((qa + qb, ta + tb)).or_default() += va * vb;
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

fn to_poly(p: &LaurentPoly) -> Poly {
    p.terms().map(|(q, t, c)| ((q, t), i64::try_from(c.clone()).unwrap())).collect()
}

/// The Poincaré polynomial written out term by term:
/// `q^{1−n}[n] + (t²q^{4−n} + t³q^{4+n} + ⋯)[n−1] (+ t^{2k}q^{4k−1}[n][n−1])`.
fn expected_poincare(n: i64, kp: i64) -> Poly {
    let mut inner = mul(&mono(1 - n, 0), &qint(n));
    let pairs = if kp % 2 == 1 { (kp - 1) / 2 } else { kp / 2 - 1 };
    for j in 1..=pairs {
        inner = add(&inner, &mul(&mono(4 * j - n, 2 * j), &qint(n - 1)));
        inner = add(&inner, &mul(&mono(4 * j + n, 2 * j + 1), &qint(n - 1)));
    }
    if kp % 2 == 0 {
        inner = add(&inner, &mul(&mul(&mono(2 * kp - 1, kp), &qint(n)), &qint(n - 1)));
    }
    mul(&mono((n - 1) * kp, 0), &inner)
}

/// Level-n Jones polynomial: `q^{1−n}[n] + (q^{−n} − q^n)(q⁴ + ⋯ + q^{4k})[n−1]`,
/// plus `q^{4k−1}[n][n−1]` for an even number `2k` of crossings.
fn expected_jones(n: i64, kp: i64) -> Poly {
    let mut inner = mul(&mono(1 - n, 0), &qint(n));
    let top = if kp % 2 == 1 { (kp - 1) / 2 } else { kp / 2 - 1 };
    let geometric: Poly = (1..=top).map(|j| ((4 * j, 0), 1)).collect();
    let diff = add(&mono(-n, 0), &Poly::from([((n, 0), -1)]));
    inner = add(&inner, &mul(&mul(&diff, &geometric), &qint(n - 1)));
    if kp % 2 == 0 {
        inner = add(&inner, &mul(&mul(&mono(2 * kp - 1, 0), &qint(n)), &qint(n - 1)));
    }
    mul(&mono((n - 1) * kp, 0), &inner)
}

/// Graded pieces of the closed complex, degree by degree, as sorted q-shifts.
fn expected_pieces(n: i64, kp: i64) -> Vec<Vec<i64>> {
    let shifts = |p: &Poly| -> Vec<i64> {
        let mut v: Vec<i64> = p.iter().flat_map(|((q, _), c)| std::iter::repeat_n(*q, *c as usize)).collect();
        v.sort();
        v
    };
    let s = (n - 1) * kp;
    let mut out = vec![shifts(&mul(&mono(1 - n + s, 0), &qint(n))), Vec::new()];
    let pairs = if kp % 2 == 1 { (kp - 1) / 2 } else { kp / 2 - 1 };
    for j in 1..=pairs {
        out.push(shifts(&mul(&mono(4 * j - n + s, 0), &qint(n - 1))));
        out.push(shifts(&mul(&mono(4 * j + n + s, 0), &qint(n - 1))));
    }
    if kp % 2 == 0 {
        out.push(shifts(&mul(&mul(&mono(2 * kp - 1 + s, 0), &qint(n)), &qint(n - 1))));
    }
    while out.last().is_some_and(|v| v.is_empty()) {
        out.pop();
    }
    out
}

fn grid() -> impl Iterator<Item = BraidSpec> {
    LEVELS.flat_map(|n| CROSSINGS.map(move |k| BraidSpec::new(n, k).unwrap()))
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, checked: usize, elapsed: Duration, limit: Option<Duration>) -> Outcome {
    let mut failures = failures;
    if let Some(limit) = limit {
        if elapsed > limit {
            failures.push(format!("took {elapsed:.2?}, limit {limit:?}"));
        }
    }
    let passed = failures.is_empty();
    let detail = if passed {
        format!("{checked} checks in {elapsed:.2?}")
    } else {
        format!("{} of {checked} failed; first: {}", failures.len(), failures[0])
    };
    Outcome { passed, detail }
}

fn catalog() -> Outcome {
    let start = Instant::now();
    let report = verify_catalog();
    let elapsed = start.elapsed();
    let mut failures: Vec<String> =
        report.checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.tag, c.detail)).collect();
    for tag in CORE_SQUARES.iter().chain(&["gamma-alpha", "alpha-gamma"]) {
        match report.get(tag) {
            Some(c) if c.assumed => failures.push(format!("{tag} is only assumed")),
            Some(_) => {}
            None => failures.push(format!("{tag} missing")),
        }
    }
    outcome(failures, report.checks.len(), elapsed, Some(Duration::from_secs(1)))
}

fn open_normal_form() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut checked = 0;
    for spec in grid() {
        checked += 1;
        let c = match compute_open(spec) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("{spec:?}: {e}"));
                continue;
            }
        };
        let s = spec.global_shift();
        let mut shape = vec![format!("id2{{{s}}}")];
        let mut entries = Vec::new();
        for m in 1..=spec.crossings as i64 {
            shape.push(format!("S{{{}}}", s + 2 * m - 1));
            entries.push(match m {
                1 => "χ0",
                _ if m % 2 == 0 => "α",
                _ => "γ",
            });
        }
        let got_shape: Vec<String> = c.objects().iter().map(|o| o.to_string()).collect();
        let got_entries: Vec<String> = c.diffs().iter().map(|d| d.to_string()).collect();
        let want_entries: Vec<String> = entries.iter().map(|e| format!("({e})")).collect();
        if c.min_degree() != 0 || got_shape != shape || got_entries != want_entries {
            failures.push(format!("{spec:?}: {got_shape:?} {got_entries:?}"));
        }
    }
    outcome(failures, checked, start.elapsed(), Some(Duration::from_secs(10)))
}

fn closed_runs() -> (Vec<(BraidSpec, moykr_core::Result<InvariantResult>)>, Duration) {
    let start = Instant::now();
    let runs = grid().map(|s| (s, compute_closed(s))).collect();
    (runs, start.elapsed())
}

fn graded_pieces(runs: &[(BraidSpec, moykr_core::Result<InvariantResult>)]) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (spec, r) in runs {
        let Ok(r) = r else {
            failures.push(format!("{spec:?}: pipeline failed"));
            continue;
        };
        let got: Vec<Vec<i64>> = r.reduced.spaces.iter().map(|v| v.shifts.clone()).collect();
        let want = expected_pieces(spec.n as i64, spec.crossings as i64);
        if r.reduced.min_degree != 0 || got != want {
            failures.push(format!("{spec:?}: {got:?} vs {want:?}"));
        } else if r.reduced != closed_normal_form(*spec) {
            failures.push(format!("{spec:?}: library normal form disagrees"));
        }
    }
    outcome(failures, runs.len(), start.elapsed(), None)
}

fn engine_vs_oracle(runs: &[(BraidSpec, moykr_core::Result<InvariantResult>)], elapsed: Duration) -> Outcome {
    let mut failures = Vec::new();
    for (spec, r) in runs {
        match r {
            Err(e) => failures.push(format!("{spec:?}: {e}")),
            Ok(r) => {
                let want = expected_poincare(spec.n as i64, spec.crossings as i64);
                if to_poly(&r.poincare) != want {
                    failures.push(format!("{spec:?}: {} vs {want:?}", r.poincare));
                } else if r.poincare != oracle(*spec) {
                    failures.push(format!("{spec:?}: library oracle disagrees"));
                }
            }
        }
    }
    outcome(failures, runs.len(), elapsed, Some(Duration::from_secs(30)))
}

fn named_examples() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut checked = 0;
    for n in LEVELS {
        let ni = n as i64;
        let hopf = mul(
            &mono(2 * (ni - 1), 0),
            &add(&mul(&mono(1 - ni, 0), &qint(ni)), &mul(&mul(&mono(3, 2), &qint(ni)), &qint(ni - 1))),
        );
        let tail = mul(&mul(&qint(ni - 1), &mono(3, 2)), &add(&mono(0, 0), &mono(2 * ni, 1)));
        let trefoil = mul(&mono(2 * ni - 2, 0), &add(&qint(ni), &tail));
        for (k, want, name) in [(2, hopf, "Hopf"), (3, trefoil, "trefoil")] {
            checked += 1;
            match compute_closed(BraidSpec::new(n, k).unwrap()) {
                Ok(r) if to_poly(&r.poincare) == want => {}
                Ok(r) => failures.push(format!("{name} n={n}: {}", r.poincare)),
                Err(e) => failures.push(format!("{name} n={n}: {e}")),
            }
        }
    }
    for (k, want) in [(2, "1 + q^2 + t^2*q^4 + t^2*q^6"), (3, "q + q^3 + t^2*q^5 + t^3*q^9")] {
        checked += 1;
        match compute_closed(BraidSpec::new(2, k).unwrap()) {
            Ok(r) if r.poincare.to_string() == want => {}
            Ok(r) => failures.push(format!("n=2 k={k}: {}", r.poincare)),
            Err(e) => failures.push(format!("n=2 k={k}: {e}")),
        }
    }
    outcome(failures, checked, start.elapsed(), None)
}

fn jones(runs: &[(BraidSpec, moykr_core::Result<InvariantResult>)]) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (spec, r) in runs {
        let Ok(r) = r else {
            failures.push(format!("{spec:?}: pipeline failed"));
            continue;
        };
        let want = expected_jones(spec.n as i64, spec.crossings as i64);
        if to_poly(&r.jones) != want {
            failures.push(format!("{spec:?}: {}", r.jones));
        }
        if spec.crossings == 1 && to_poly(&r.jones) != qint(spec.n as i64) {
            failures.push(format!("{spec:?}: unknot gives {}", r.jones));
        }
    }
    outcome(failures, runs.len(), start.elapsed(), None)
}

fn properties() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut checked = 0;

    // d² = 0 at every traced step
    for n in 2..=4 {
        for k in 1..=8 {
            let seen = Arc::new(Mutex::new((0usize, Vec::new())));
            let sink = seen.clone();
            let mut trace = Trace::with_observer(move |ev, c| {
                let mut s = sink.lock().unwrap();
                s.0 += 1;
                if let Err(e) = c.validate() {
                    s.1.push(format!("n={n} k={k} after {ev}: {e}"));
                }
            });
            if let Err(e) = compute_closed_traced(BraidSpec::new(n, k).unwrap(), &mut trace) {
                failures.push(format!("n={n} k={k}: {e}"));
            }
            let s = seen.lock().unwrap();
            checked += s.0;
            failures.extend(s.1.iter().cloned());
        }
    }

    // pivot order does not change the Poincaré polynomial
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for n in 2..=4 {
        for k in 1..=6 {
            let spec = BraidSpec::new(n, k).unwrap();
            let want = oracle(spec);
            for round in 0..20 {
                checked += 1;
                let mut pick = |ps: &[moykr_core::complex::Pivot]| rng.random_range(0..ps.len());
                match compute_closed_by(spec, &mut Trace::new(), &mut pick) {
                    Ok(r) if r.poincare == want => {}
                    Ok(r) => failures.push(format!("n={n} k={k} shuffle {round}: {}", r.poincare)),
                    Err(e) => failures.push(format!("n={n} k={k} shuffle {round}: {e}")),
                }
            }
        }
    }

    // both bracketings of three crossings give the same closed complex
    for n in 2..=4 {
        checked += 1;
        let mut t = Trace::new();
        let s = sigma_plus(n).unwrap();
        let two = compute_open(BraidSpec::new(n, 2).unwrap()).unwrap();
        let mut close = |c: moykr_core::Result<moykr_core::FormalComplex>| {
            c.and_then(|c| resolve_ss(&c, &mut t))
                .and_then(|c| reduce(&c, &mut t))
                .and_then(|c| close_complex(&c, n, &mut t))
                .and_then(|c| c.reduced())
                .map(|r| r.trimmed())
        };
        let left = close(compose_complexes(&two, &s));
        let right = close(compose_complexes(&s, &two));
        match (left, right) {
            (Ok(l), Ok(r)) if l == r => {}
            (l, r) => failures.push(format!("n={n}: (σσ)σ gives {l:?}, σ(σσ) gives {r:?}")),
        }
    }

    // normalization is idempotent and composition associative on random words
    let mut rng = StdRng::seed_from_u64(0xacce);
    for i in 0..10_000 {
        checked += 2;
        let closed = i % 2 == 1;
        let len = rng.random_range(3..=7);
        let (src, w) = random_word(&mut rng, closed, len);
        let e = MorphExpr::word(src, w.clone()).unwrap();
        let again = MorphExpr::from_terms(e.source(), e.target(), e.terms().clone()).unwrap();
        if again != e {
            failures.push(format!("normalize not idempotent on {e}"));
        }
        if w.len() < 3 {
            continue;
        }
        let a = rng.random_range(1..w.len() - 1);
        let b = rng.random_range(a + 1..w.len());
        let h = MorphExpr::word(src, w[b..].to_vec()).unwrap();
        let g = MorphExpr::word(h.target(), w[a..b].to_vec()).unwrap();
        let f = MorphExpr::word(g.target(), w[..a].to_vec()).unwrap();
        let left = f.compose(&g).and_then(|fg| fg.compose(&h));
        let right = g.compose(&h).and_then(|gh| f.compose(&gh));
        if left != right {
            failures.push(format!("compose not associative on {f} | {g} | {h}"));
        }
    }
    outcome(failures, checked, start.elapsed(), None)
}

fn main() {
    let (runs, closed_elapsed) = closed_runs();
    let results = [
        ("1 relation catalog", catalog()),
        ("2 open normal form", open_normal_form()),
        ("3 closed graded pieces", graded_pieces(&runs)),
        ("4 engine = oracle", engine_vs_oracle(&runs, closed_elapsed)),
        ("5 named examples", named_examples()),
        ("6 Jones specialization", jones(&runs)),
        ("7 property suites", properties()),
    ];
    let mut ok = true;
    for (name, o) in &results {
        println!("criterion {name}: {} ({})", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        ok &= o.passed;
    }
    if !ok {
        std::process::exit(1);
    }
}
