//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so every line is printed; the process
//! exits non-zero if any criterion fails.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use millionaire_core::bitcore::{from_bits_u64, to_bits_u64};
use millionaire_core::fixtures;
use millionaire_core::harness::{self, sweep_with, Model, SweepOptions};
use millionaire_core::he::{HomomorphicScheme, Transparent};
use millionaire_core::opf::{
    eval, eval_point, shared_eval, validate_general, Constraint, GapKind, GeneralOpf, SharedParams,
    Validation,
};
use millionaire_core::ot::OtBackend;
use millionaire_core::prg::{Keystream, Seed};
use millionaire_core::protocols::{audit_ursula_view, Coin, ParamSource, Protocol, ProtocolConfig};
use millionaire_core::simnet::{OpCounters, OpTag};
use millionaire_core::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};

type Check = Result<String, String>;

/// Transcribed reference values.
const TABLE2: [i64; 16] = [
    15, 17, 18, 20, 22, 24, 25, 27, 29, 31, 32, 34, 36, 38, 39, 41,
];
const SAMPLE_F: [i64; 16] = [
    47, 59, 65, 77, 60, 72, 78, 90, 80, 92, 98, 110, 93, 105, 111, 123,
];
const SAMPLE_GAPS: [(GapKind, i64); 4] = [
    (GapKind::Fall, 12),
    (GapKind::Rise, 18),
    (GapKind::Rise, 13),
    (GapKind::Fall, 33),
];

const RSA_SWEEP_MODULUS: usize = 256;
const PROPERTY_CASES: usize = 10_000;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let f = fixtures::table1();
    for (x, want) in TABLE2.iter().enumerate() {
        let x = x as u64;
        let by_hand: i64 = fixtures::TABLE1_MAPS
            .iter()
            .enumerate()
            .map(|(i, &(z, o))| if x >> i & 1 == 1 { o } else { z })
            .sum();
        let got = eval(&f, &to_bits_u64(x, Some(4)).unwrap()).map_err(|e| e.to_string())?;
        ensure(got == *want && by_hand == *want, || {
            format!("table 2 row {x:04b}: eval {got}, sum {by_hand}, expected {want}")
        })?;
    }
    let point = fixtures::sample_point().map_err(|e| e.to_string())?;
    for (x, want) in SAMPLE_F.iter().enumerate() {
        let got = eval_point(&point, &to_bits_u64(x as u64, Some(4)).unwrap())
            .map_err(|e| e.to_string())?;
        ensure(got == BigInt::from(*want), || {
            format!("sample row {x:04b}: {got} vs {want}")
        })?;
    }
    let gaps = point.gaps().map_err(|e| e.to_string())?;
    for (g, (kind, amount)) in gaps.iter().zip(SAMPLE_GAPS) {
        ensure(g.kind == kind && g.amount == BigInt::from(amount), || {
            format!(
                "position {}: {:?} {} vs {kind:?} {amount}",
                g.position, g.kind, g.amount
            )
        })?;
    }
    let report = harness::tables();
    ensure(report.identical(), || {
        format!("{} table cells differ", report.diffs.len())
    })?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(1), || {
        format!("took {}", secs(took))
    })?;
    Ok(format!("16 + 16 rows and 4 gaps exact in {}", secs(took)))
}

struct SweepResults {
    correctness: Check,
    a_counters: Check,
    b_views: Check,
}

fn expected_a_counters() -> OpCounters {
    let mut c = OpCounters::default();
    c.add(OpTag::Enc, 2);
    c.add(OpTag::HomSub, 1);
    c.add(OpTag::HomXor, 1);
    c.add(OpTag::Dec, 1);
    c
}

fn sweeps() -> SweepResults {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    let mut record = |name: &str, r: Result<harness::SweepReport, String>| match r {
        Ok(r) if r.passed() => lines.push(format!("{name}: {} runs", r.runs)),
        Ok(r) => failures.push(format!(
            "{name}: {} mismatches, first {:?}",
            r.mismatches, r.first_mismatch
        )),
        Err(e) => failures.push(format!("{name}: {e}")),
    };

    let want = expected_a_counters();
    let (mut a_runs, mut a_bad) = (0u64, Vec::new());
    let r = sweep_with(&SweepOptions::new(Protocol::A, 7), |run| {
        a_runs += 1;
        let t = run.transcript;
        if t.counters != want || t.messages.len() != 4 || t.rounds() != 4 {
            a_bad.push(format!(
                "a={} b={}: {:?}, {} messages",
                run.a,
                run.b,
                t.counters,
                t.messages.len()
            ));
        }
    });
    record("A w=8", r.map_err(|e| e.to_string()));

    let (mut b_runs, mut b_bad) = (0u64, Vec::new());
    let mut audit = |run: harness::SweepRun<'_>| {
        b_runs += 1;
        let v = audit_ursula_view(run.transcript);
        if !v.is_minimal() {
            b_bad.push(format!("{} a={} b={}: {v:?}", run.variant, run.a, run.b));
        }
    };
    let r = sweep_with(&SweepOptions::new(Protocol::B, 8), &mut audit);
    record("B both u", r.map_err(|e| e.to_string()));
    let r = sweep_with(&SweepOptions::new(Protocol::BExt, 8), &mut audit);
    record("b-ext both u", r.map_err(|e| e.to_string()));

    let mut opts = SweepOptions::new(Protocol::C, 8);
    opts.seeds = 5;
    opts.ot_backends = OtBackend::ALL.to_vec();
    opts.base.ot_modulus_bits = RSA_SWEEP_MODULUS;
    let r = harness::sweep(&opts);
    record("C d=8 x5 seeds x2 OT", r.map_err(|e| e.to_string()));

    let took = secs(start.elapsed());
    SweepResults {
        correctness: if failures.is_empty() {
            Ok(format!("{} in {took}", lines.join("; ")))
        } else {
            Err(failures.join("; "))
        },
        a_counters: match a_bad.first() {
            None if a_runs > 0 => Ok(format!(
                "enc=2 hom_sub=1 hom_xor=1 dec=1, 4 messages on all {a_runs} runs"
            )),
            None => Err("no runs observed".into()),
            Some(first) => Err(format!(
                "{} of {a_runs} runs differ; first {first}",
                a_bad.len()
            )),
        },
        b_views: match b_bad.first() {
            None if b_runs > 0 => Ok(format!("minimal view on all {b_runs} runs")),
            None => Err("no runs observed".into()),
            Some(first) => Err(format!(
                "{} of {b_runs} runs leak; first {first}",
                b_bad.len()
            )),
        },
    }
}

fn draw(ks: &mut Keystream, bound: u64) -> u64 {
    ks.below(&BigUint::from(bound))
        .to_u64()
        .expect("below a u64 bound")
}

fn random_valid(ks: &mut Keystream, n: usize) -> GeneralOpf<i64> {
    let mut lower = 0i64;
    let pairs: Vec<(i64, i64)> = (0..n)
        .map(|_| {
            let gap = lower + 1 + draw(ks, 50) as i64;
            lower += gap;
            let zero = draw(ks, 2001) as i64 - 1000;
            (zero, zero + gap)
        })
        .collect();
    GeneralOpf::from_pairs(pairs)
}

/// First `x` with `F(x) >= F(x + 1)`, if any.
fn first_descent(f: &GeneralOpf<i64>) -> Option<u64> {
    let n = f.len();
    let value = |x: u64| eval(f, &to_bits_u64(x, Some(n)).unwrap()).unwrap();
    let mut prev = value(0);
    (1..1u64 << n).find_map(|x| {
        let v = value(x);
        let bad = v <= prev;
        prev = v;
        bad.then_some(x - 1)
    })
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let mut ks = Keystream::new(&Seed::from_u64(4));
    for case in 0..PROPERTY_CASES {
        let n = 1 + draw(&mut ks, 12) as usize;
        let f = random_valid(&mut ks, n);
        ensure(validate_general(&f).is_valid(), || {
            format!("case {case}: valid maps rejected")
        })?;
        if let Some(x) = first_descent(&f) {
            return Err(format!("case {case}: n={n} not increasing after x={x}"));
        }
    }
    let mut by_kind = [0usize; 2];
    for case in 0..PROPERTY_CASES {
        let n = 1 + draw(&mut ks, 12) as usize;
        let f = random_valid(&mut ks, n);
        let position = 1 + draw(&mut ks, n as u64) as usize;
        let mut pairs: Vec<(i64, i64)> = f.maps().iter().map(|m| (m.zero_val, m.one_val)).collect();
        let lower: i64 = pairs[..position - 1].iter().map(|(z, o)| o - z).sum();
        let constraint = if position == 1 || draw(&mut ks, 2) == 0 {
            Constraint::PositiveGap
        } else {
            Constraint::DominatesLowerGaps
        };
        let zero = pairs[position - 1].0;
        pairs[position - 1].1 = match constraint {
            Constraint::PositiveGap => zero - draw(&mut ks, 5) as i64,
            Constraint::DominatesLowerGaps => zero + 1 + draw(&mut ks, lower as u64) as i64,
        };
        by_kind[(constraint == Constraint::DominatesLowerGaps) as usize] += 1;
        let broken = GeneralOpf::from_pairs(pairs);
        let got = validate_general(&broken);
        ensure(
            got == Validation::Invalid {
                position,
                constraint,
            },
            || format!("case {case}: {constraint:?} at {position} of {n} reported as {got:?}"),
        )?;
        ensure(first_descent(&broken).is_some(), || {
            format!("case {case}: flagged maps are still increasing")
        })?;
    }
    Ok(format!(
        "{PROPERTY_CASES} valid functions increasing; {PROPERTY_CASES} violations flagged \
         ({} positive-gap, {} dominance) in {}",
        by_kind[0],
        by_kind[1],
        secs(start.elapsed())
    ))
}

fn criterion_5() -> Check {
    let sizes = [8, 16, 32, 64];
    let mut notes = Vec::new();
    for u in [true, false] {
        let cfg = ProtocolConfig {
            params: ParamSource::Fixed {
                s: 3.into(),
                k: 2.into(),
                l: 5.into(),
            },
            coin: Coin::Fixed(u),
            ..ProtocolConfig::default()
        };
        let r = harness::bench(Protocol::B, &sizes, &cfg).map_err(|e| e.to_string())?;
        let r2 = r.fit_for(Model::Linear).map_or(f64::NAN, |f| f.r_squared);
        ensure(r2 >= 0.99, || {
            format!("B u={}: linear R^2 {r2:.5}", u as u8)
        })?;
        notes.push(format!("B u={} R^2={r2:.4}", u as u8));
    }

    let cfg = ProtocolConfig {
        coin: Coin::Fixed(true),
        ..ProtocolConfig::default()
    };
    let r = harness::bench(Protocol::BExt, &sizes, &cfg).map_err(|e| e.to_string())?;
    ensure(r.within_nlogn_envelope(), || {
        format!("b-ext outside envelope: {:?}", r.nlogn_ratios())
    })?;
    let curvature = r
        .fit_for(Model::Quadratic)
        .map_or(f64::NAN, |f| f.coefficients[0]);
    ensure(curvature > 0.0, || format!("b-ext not convex: {curvature}"))?;
    notes.push(format!(
        "b-ext bytes {:?} within c*n*log n (c={:.3})",
        r.points.iter().map(|p| p.bytes).collect::<Vec<_>>(),
        r.nlogn_ratios()[0]
    ));

    let cfg = ProtocolConfig {
        ot_backend: OtBackend::CommutativeRsa,
        ..ProtocolConfig::default()
    };
    let r = harness::bench(Protocol::C, &sizes, &cfg).map_err(|e| e.to_string())?;
    let quad = r
        .fit_for(Model::Quadratic)
        .map_or(f64::NAN, |f| f.coefficients[0]);
    ensure(
        r.superlinear() && r.payload_superlinear() && quad > 0.0,
        || {
            format!(
                "C bytes {:?}, payload {:?}, n^2 coefficient {quad}",
                r.points.iter().map(|p| p.bytes).collect::<Vec<_>>(),
                r.payload_bytes()
            )
        },
    )?;
    notes.push(format!(
        "C rsa bytes/n increasing, n^2 coefficient {quad:.4}"
    ));
    Ok(notes.join("; "))
}

fn criterion_6() -> Check {
    let mut checked = 0;
    for n in 1..=10usize {
        for seed in 0..5u64 {
            let p = SharedParams::random_extension(
                n,
                &mut Keystream::new(&Seed::from_u64(seed * 16 + n as u64)),
            );
            let kl = &p.k * &p.l;
            ensure(kl >= BigInt::one() << n, || {
                format!("n={n}: k*l = {kl} below 2^{n}")
            })?;
            let f = |x: u64| shared_eval(&p, &to_bits_u64(x, Some(n)).unwrap()).unwrap();
            let min_gap = (0..1u64 << (n - 1))
                .map(|x| f(2 * x + 1) - f(2 * x))
                .min()
                .expect("at least one prefix");
            ensure(min_gap == kl, || {
                format!("n={n} seed {seed}: min gap {min_gap}, k*l {kl}")
            })?;
            checked += 1;
        }
    }
    Ok(format!(
        "min F(x||1) - F(x||0) = k*l >= 2^n for {checked} functions, n = 1..10"
    ))
}

fn criterion_7() -> Check {
    const W: usize = 6;
    let mask = (1u64 << W) - 1;
    let he = Transparent;
    let keys = he
        .keygen(W, &Seed::from_u64(7))
        .map_err(|e| e.to_string())?;
    let mut rng = Keystream::new(&Seed::from_u64(77));
    let mut ops = OpCounters::default();
    let word = |v: u64| to_bits_u64(v, Some(W)).unwrap();
    for a in 0..=mask {
        let ea = he
            .enc(&keys.public_part, &word(a), &mut rng, &mut ops)
            .map_err(|e| e.to_string())?;
        for b in 0..=mask {
            let eb = he
                .enc(&keys.public_part, &word(b), &mut rng, &mut ops)
                .map_err(|e| e.to_string())?;
            let diff = he
                .hom_sub(&keys.public_part, &ea, &eb, &mut ops)
                .map_err(|e| e.to_string())?;
            let d = a.wrapping_sub(b) & mask;
            let mut image = HashSet::new();
            for r in 0..=mask {
                let v = he
                    .hom_xor_plain(&keys.public_part, &diff, &word(r), &mut ops)
                    .map_err(|e| e.to_string())?;
                let got = from_bits_u64(
                    &he.dec(&keys.private_part, &v, &mut ops)
                        .map_err(|e| e.to_string())?,
                );
                ensure(got == d ^ r, || {
                    format!("a={a} b={b} R={r}: {got} vs {}", d ^ r)
                })?;
                image.insert(got);
            }
            ensure(image.len() == 1 << W, || {
                format!("a={a} b={b}: {} distinct images", image.len())
            })?;
        }
    }
    Ok(format!(
        "{} pairs, each R -> v a permutation of {} words",
        1u64 << (2 * W),
        1u64 << W
    ))
}

fn report(number: u32, title: &str, result: &Check) -> bool {
    match result {
        Ok(detail) => println!("criterion {number} PASS  {title}: {detail}"),
        Err(detail) => println!("criterion {number} FAIL  {title}: {detail}"),
    }
    result.is_ok()
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= report(1, "table reproduction", &criterion_1());
    let s = sweeps();
    ok &= report(2, "exhaustive sweeps", &s.correctness);
    ok &= report(3, "protocol A operation counts", &s.a_counters);
    ok &= report(4, "general function property suite", &criterion_4());
    ok &= report(5, "communication growth", &criterion_5());
    ok &= report(6, "extension gap", &criterion_6());
    ok &= report(7, "blinding bijectivity", &criterion_7());
    ok &= report(8, "third-party view minimality", &s.b_views);
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
