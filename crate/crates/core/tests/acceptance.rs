//! Acceptance criteria, one line of output each.
//!
//! Runs without the libtest harness so the per-criterion lines are always
//! printed; the process exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bqlab::classical::{classical_chain_parity, mind_change_bits, TruthTableReduction};
use bqlab::oracles::{
    chain_code, chain_oracle, table_oracle_from_bools, CountedOracle, InnerProductOracleSpec, MonotoneChain,
};
use bqlab::quantum::{
    bv_extract, chain_parity_search, chain_search_static_plan, chain_search_subroutine, clean_wrap, deutsch_parity,
    deutsch_subroutine, extract_function_one_query, function_pipeline, pairwise_parallel_parity, two_point_parity,
    ExactSubroutine, ExtractionInstance,
};
use bqlab::statevec::QuantumState;
use bqlab::{Bits, Error};

const TOL: f64 = 1e-9;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s(e: Error) -> String {
    e.to_string()
}

/// Answer vector for row `r` of an `m`-query table, first answer most significant.
fn answers(r: usize, m: usize) -> Vec<bool> {
    (0..m).map(|i| (r >> (m - 1 - i)) & 1 == 1).collect()
}

fn row(answers: &[bool]) -> usize {
    answers.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
}

fn padded(answers: &[bool]) -> CountedOracle {
    let mut t = answers.to_vec();
    t.resize(answers.len().next_power_of_two().max(2), false);
    table_oracle_from_bools(t).unwrap()
}

fn xor_all(bits: &[bool]) -> bool {
    bits.iter().fold(false, |a, &b| a ^ b)
}

/// Every monotone chain of length `len`, built here rather than through the library.
fn chains(len: usize) -> Vec<Vec<bool>> {
    (0..=len).map(|ones| (0..len).map(|i| i < ones).collect()).collect()
}

fn criterion_1() -> Outcome {
    for r in 0..4 {
        let f = answers(r, 2);
        let mut o = table_oracle_from_bools(f.clone()).map_err(e2s)?;
        let run = deutsch_parity(&mut o).map_err(e2s)?;
        ensure(run.value == (f[0] ^ f[1]), || format!("f={f:?}: got {}", run.value))?;
        ensure(o.count() == 1, || format!("f={f:?}: {} queries", o.count()))?;
        ensure(run.probability >= 1.0 - TOL, || {
            format!("f={f:?}: p={}", run.probability)
        })?;
    }
    Ok("4 oracles, 1 query each".into())
}

fn criterion_2() -> Outcome {
    let mut cases = 0;
    for k in 1..=3usize {
        let pairs: Vec<(u64, u64)> = (0..k as u64).map(|i| (2 * i, 2 * i + 1)).collect();
        for r in 0..1usize << (2 * k) {
            let a = answers(r, 2 * k);
            let mut o = padded(&a);
            let run = pairwise_parallel_parity(&mut o, &pairs).map_err(e2s)?;
            ensure(run.value == xor_all(&a), || format!("k={k} {a:?}"))?;
            ensure(o.count() == k as u64, || format!("k={k} {a:?}: {} queries", o.count()))?;
            ensure(run.probability >= 1.0 - TOL, || {
                format!("k={k} {a:?}: p={}", run.probability)
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} answer vectors"))
}

fn criterion_3() -> Outcome {
    let mut cases = 0;
    for k in 1..=3u64 {
        let len = (1usize << (k + 1)) - 2;
        let all = chains(len);
        ensure(all.len() == (1 << (k + 1)) - 1, || "chain count".into())?;
        for bits in all {
            let parity = bits.iter().filter(|&&b| b).count() % 2 == 1;
            let chain = MonotoneChain::new(bits.clone()).map_err(e2s)?;
            let mut o = chain_oracle(&chain).map_err(e2s)?;
            let run = chain_parity_search(&mut o, len).map_err(e2s)?;
            ensure(run.value == parity, || format!("{bits:?}: got {}", run.value))?;
            ensure(o.count() == k, || format!("{bits:?}: {} quantum queries", o.count()))?;
            ensure(run.probability >= 1.0 - TOL, || {
                format!("{bits:?}: p={}", run.probability)
            })?;

            let mut o = chain_oracle(&chain).map_err(e2s)?;
            let classical = classical_chain_parity(&mut o, len).map_err(e2s)?;
            ensure(classical == parity, || format!("{bits:?}: classical wrong"))?;
            ensure(o.count() == k + 1, || {
                format!("{bits:?}: {} classical queries", o.count())
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} chains, quantum k / classical k+1"))
}

fn criterion_4() -> Outcome {
    let mut cases = 0;
    for m in 1..=3usize {
        let rows = 1usize << m;
        for t in 0..1u64 << rows {
            let table: Vec<u64> = (0..rows).map(|r| (t >> r) & 1).collect();
            let g = TruthTableReduction::new((0..m as u64).collect(), 1, table.clone()).map_err(e2s)?;
            for r in 0..rows {
                let a = answers(r, m);
                let cert = mind_change_bits(&g, &a).map_err(e2s)?;
                let phi = cert.phi.bits();
                let popcount = phi.iter().filter(|&&b| b).count();
                ensure(cert.base == (table[0] == 1), || format!("base for {table:?}"))?;
                ensure((cert.base ^ (popcount % 2 == 1)) == (table[row(&a)] == 1), || {
                    format!("m={m} t={table:?} T={a:?}")
                })?;
                ensure(phi.len() == m && phi.windows(2).all(|w| w[0] >= w[1]), || {
                    format!("phi {phi:?} not monotone")
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} (evaluator, answers) pairs"))
}

fn criterion_5() -> Outcome {
    let mut cases = 0;
    for n in 1..=8usize {
        for a in 0..1u64 << n {
            let hidden = Bits::new(a, n).map_err(e2s)?;
            let mut inst = ExtractionInstance::new(hidden).map_err(e2s)?;
            for x in 0..1u64 << n {
                ensure(inst.oracle().peek(x) == ((a & x).count_ones() % 2 == 1), || {
                    format!("oracle for {hidden}")
                })?;
            }
            let run = inst.extract().map_err(e2s)?;
            ensure(run.value == hidden, || format!("{hidden}: got {}", run.value))?;
            ensure(inst.oracle().count() == 1, || {
                format!("{hidden}: {} queries", inst.oracle().count())
            })?;
            ensure(run.probability >= 1.0 - TOL, || {
                format!("{hidden}: p={}", run.probability)
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} hidden strings"))
}

/// Runs `clean_wrap(sub)` on `|0..0>|b>` and compares with `|0..0>|b ^ answer>`, phase included.
fn check_clean(sub: &ExactSubroutine, oracle: &mut CountedOracle, answer: bool, what: &str) -> Result<f64, String> {
    let wrapped = clean_wrap(sub).map_err(e2s)?;
    ensure(wrapped.query_budget() == 2 * sub.query_budget(), || {
        format!("{what}: budget not doubled")
    })?;
    let aux = wrapped.answer_register().to_string();
    let mut worst = 1.0f64;
    for b in [false, true] {
        let mut state = QuantumState::basis(wrapped.layout(), &[(&aux, u64::from(b))]).map_err(e2s)?;
        let before = oracle.count();
        wrapped.run(&mut state, oracle).map_err(e2s)?;
        let used = oracle.count() - before;
        ensure(used == 2 * sub.query_budget() as u64, || {
            format!("{what}: {used} queries")
        })?;
        let expected = QuantumState::basis(wrapped.layout(), &[(&aux, u64::from(b ^ answer))]).map_err(e2s)?;
        let overlap: Complex64 = expected.overlap(&state).map_err(e2s)?;
        ensure(overlap.re >= 1.0 - TOL, || format!("{what} b={b}: overlap {overlap}"))?;
        worst = worst.min(overlap.re);
    }
    Ok(worst)
}

fn criterion_6() -> Outcome {
    let mut cases = 0;
    let mut worst = 1.0f64;
    let sub = deutsch_subroutine().map_err(e2s)?;
    for r in 0..4 {
        let f = answers(r, 2);
        let mut o = table_oracle_from_bools(f.clone()).map_err(e2s)?;
        worst = worst.min(check_clean(&sub, &mut o, f[0] ^ f[1], &format!("deutsch {f:?}"))?);
        cases += 2;
    }
    for k in 1..=3u32 {
        let len = (1usize << (k + 1)) - 2;
        let sub = chain_search_subroutine(len).map_err(e2s)?;
        for bits in chains(len) {
            let parity = bits.iter().filter(|&&b| b).count() % 2 == 1;
            let mut o = chain_oracle(&MonotoneChain::new(bits.clone()).map_err(e2s)?).map_err(e2s)?;
            worst = worst.min(check_clean(&sub, &mut o, parity, &format!("chain {bits:?}"))?);
            cases += 2;
        }
    }
    Ok(format!("{cases} basis inputs, min overlap {worst:.12}"))
}

fn check_pipeline(g: &TruthTableReduction, a: &[bool], k: u64) -> Result<(), String> {
    let o = padded(a);
    let run = function_pipeline(g, &o).map_err(e2s)?;
    let want = g.table()[row(a)];
    ensure(
        run.value.value() == want && run.value.width() == g.output_width(),
        || format!("answers {a:?}: got {}, want {want}", run.value),
    )?;
    ensure(run.queries == 2 * k, || {
        format!("answers {a:?}: {} queries", run.queries)
    })?;
    ensure(run.probability >= 1.0 - TOL, || {
        format!("answers {a:?}: p={}", run.probability)
    })
}

fn criterion_7() -> Outcome {
    let mut cases = 0;
    for t in 0..256u64 {
        let table: Vec<u64> = (0..4).map(|r| (t >> (2 * r)) & 3).collect();
        let g = TruthTableReduction::new(vec![0, 1], 2, table).map_err(e2s)?;
        for r in 0..4 {
            check_pipeline(&g, &answers(r, 2), 1)?;
            cases += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..100 {
        let k = 1 + trial % 2;
        let m = (1usize << (k + 1)) - 2;
        let n = rng.random_range(1..=4usize);
        let table = (0..1usize << m).map(|_| rng.random_range(0..1u64 << n)).collect();
        let g = TruthTableReduction::new((0..m as u64).collect(), n, table).map_err(e2s)?;
        let a: Vec<bool> = (0..m).map(|_| rng.random()).collect();
        check_pipeline(&g, &a, k as u64)?;
        cases += 1;
    }
    Ok(format!("{cases} instances (1024 exhaustive + 100 seeded)"))
}

fn criterion_8() -> Outcome {
    let mut cases = 0;
    for t in 0..16usize {
        let a = answers(t, 4);
        let set = table_oracle_from_bools(a.clone()).map_err(e2s)?;
        for n in 1..=4usize {
            let spec = InnerProductOracleSpec::membership_vector(&set, n).map_err(e2s)?;
            for z in 0..1u64 << (2 * n) {
                let want: Vec<bool> = (0..n).map(|i| a[((z >> (2 * (n - 1 - i))) & 3) as usize]).collect();
                let run = extract_function_one_query(&spec, Bits::new(z, 2 * n).map_err(e2s)?).map_err(e2s)?;
                ensure(run.value.to_bools() == want, || {
                    format!("A={a:?} z={z:b}: got {}", run.value)
                })?;
                ensure(run.queries == 1, || format!("A={a:?} z={z:b}: {} queries", run.queries))?;
                ensure(run.probability >= 1.0 - TOL, || {
                    format!("A={a:?} z={z:b}: p={}", run.probability)
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} (A, z) pairs"))
}

fn criterion_9() -> Outcome {
    // the plan checker is live: a planned pair that differs from the real one is rejected
    let mut o = padded(&[true, false, true, true]);
    o.declare_plan(vec![BTreeSet::from([0, 2])]).map_err(e2s)?;
    ensure(
        matches!(two_point_parity(&mut o, 0, 1), Err(Error::Adaptivity { .. })),
        || "checker accepted an unplanned query".into(),
    )?;
    o.abandon_plan();

    let mut runs = 0;
    for k in 1..=3usize {
        let pairs: Vec<(u64, u64)> = (0..k as u64).map(|i| (2 * i, 2 * i + 1)).collect();
        for r in 0..1usize << (2 * k) {
            let mut o = padded(&answers(r, 2 * k));
            pairwise_parallel_parity(&mut o, &pairs).map_err(e2s)?;
            ensure(!o.has_plan(), || "plan left active".into())?;
            runs += 1;
        }
    }
    for n in 1..=6usize {
        for a in 0..1u64 << n {
            let mut inst = ExtractionInstance::new(Bits::new(a, n).map_err(e2s)?).map_err(e2s)?;
            bv_extract(inst.oracle_mut()).map_err(e2s)?;
            ensure(!inst.oracle().has_plan(), || "plan left active".into())?;
            runs += 1;
        }
    }

    // chain search at k = 2 is adaptive: under a fixed plan it must be caught
    let plan = chain_search_static_plan(6).map_err(e2s)?;
    let mut caught = 0;
    for bits in chains(6) {
        let mut o = chain_oracle(&MonotoneChain::new(bits.clone()).map_err(e2s)?).map_err(e2s)?;
        o.declare_plan(plan.clone()).map_err(e2s)?;
        let first_probe_odd = o.peek(chain_code(2)) != o.peek(chain_code(5));
        match chain_parity_search(&mut o, 6) {
            Err(Error::Adaptivity { .. }) if first_probe_odd => caught += 1,
            Ok(_) if !first_probe_odd => {}
            other => return Err(format!("chain {bits:?}: unexpected {other:?}")),
        }
    }
    ensure(caught > 0, || "chain search never violated the plan".into())?;
    Ok(format!(
        "{runs} non-adaptive runs passed, chain search caught on {caught} of 7 chains"
    ))
}

fn criterion_10() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_bqlab");
    let start = Instant::now();
    let out = Command::new(exe)
        .args(["verify", "all"])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(out.status.code() == Some(0), || {
        format!(
            "verify all exited {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stdout)
        )
    })?;
    ensure(elapsed < Duration::from_secs(180), || {
        format!("verify all took {elapsed:?}")
    })?;

    let table = || -> Result<String, String> {
        let out = Command::new(exe)
            .args(["table", "--max-k", "3", "--format", "csv"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || format!("table exited {:?}", out.status.code()))?;
        Ok(String::from_utf8_lossy(&out.stdout).into_owned())
    };
    let (first, second) = (table()?, table()?);
    ensure(first == second, || "table output differs between runs".into())?;
    ensure(first.lines().count() == 13, || format!("expected 12 rows:\n{first}"))?;
    Ok(format!(
        "verify all in {:.1}s, table stable over 2 runs",
        elapsed.as_secs_f64()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("deutsch parity", criterion_1, 1),
        ("parallel parity", criterion_2, 10),
        ("chain search", criterion_3, 10),
        ("mind-change soundness", criterion_4, 30),
        ("bv extraction", criterion_5, 30),
        ("clean subroutine", criterion_6, 10),
        ("function pipeline", criterion_7, 60),
        ("superterse construction", criterion_8, 10),
        ("adaptivity enforcement", criterion_9, 5),
        ("cli verify/table", criterion_10, 180),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let outcome = match outcome {
            Ok(detail) if secs >= *limit as f64 => Err(format!("{detail}; took {secs:.2}s, limit {limit}s")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({detail}; {secs:.2}s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
