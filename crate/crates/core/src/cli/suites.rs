//! Exhaustive and seeded property suites behind `verify`.

use std::fmt;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::Bits;
use crate::classical::{classical_chain_parity, mind_change_bits, row_to_answers, TruthTableReduction};
use crate::error::{Error, Result};
use crate::oracles::{chain_oracle, table_oracle_from_bools, CountedOracle, InnerProductOracleSpec, MonotoneChain};
use crate::quantum::{
    bv_extract, chain_parity_search, chain_search_static_plan, chain_search_subroutine, clean_wrap,
    decision_via_parity, deutsch_final_state, deutsch_parity, deutsch_subroutine, extract_function_one_query,
    function_pipeline, pairwise_parallel_parity, verify_clean, ExtractionInstance,
};
use crate::statevec::EXACTNESS_TOLERANCE;

pub const SUITES: [&str; 7] = [
    "deutsch",
    "parallel",
    "chain",
    "bv",
    "mindchange",
    "pipeline",
    "superterse",
];

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    /// Largest distance from certainty or from an expected amplitude.
    pub max_deviation: f64,
    pub elapsed: Duration,
    pub failures: Vec<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<11} {:<4} cases={:<6} max_deviation={:.3e} time={:.3}s",
            self.name,
            if self.passed() { "ok" } else { "FAIL" },
            self.cases,
            self.max_deviation,
            self.elapsed.as_secs_f64()
        )?;
        for msg in self.failures.iter().take(10) {
            write!(f, "\n    {msg}")?;
        }
        if self.failures.len() > 10 {
            write!(f, "\n    ... {} more", self.failures.len() - 10)?;
        }
        Ok(())
    }
}

struct Tally {
    cases: usize,
    max_deviation: f64,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            cases: 0,
            max_deviation: 0.0,
            failures: Vec::new(),
        }
    }

    fn case(&mut self) {
        self.cases += 1;
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(msg());
        }
    }

    fn probability(&mut self, p: f64) {
        self.deviation(1.0 - p);
    }

    fn deviation(&mut self, d: f64) {
        self.max_deviation = self.max_deviation.max(d.abs());
        if d.abs() > EXACTNESS_TOLERANCE {
            self.failures
                .push(format!("deviation {d:e} exceeds {EXACTNESS_TOLERANCE:e}"));
        }
    }

    /// Records an error as a failure and yields `None`.
    fn ok<T>(&mut self, r: Result<T>, what: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.failures.push(format!("{}: {e}", what()));
                None
            }
        }
    }
}

fn padded(answers: &[bool]) -> Result<CountedOracle> {
    let mut table = answers.to_vec();
    table.resize(answers.len().next_power_of_two().max(2), false);
    table_oracle_from_bools(table)
}

fn deutsch(t: &mut Tally) -> Result<()> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let sub = deutsch_subroutine()?;
    let wrapped = clean_wrap(&sub)?;
    for row in 0..4 {
        t.case();
        let f = row_to_answers(row, 2);
        let mut o = table_oracle_from_bools(f.clone())?;
        let Some(run) = t.ok(deutsch_parity(&mut o), || format!("deutsch {f:?}")) else {
            continue;
        };
        t.check(run.value == f[0] ^ f[1] && run.queries == 1, || {
            format!("deutsch {f:?}: {run:?}")
        });
        t.probability(run.probability);

        // (-1)^f(0) |f(0)^f(1)> |->
        let state = deutsch_final_state(&mut o)?;
        let sign = if f[0] { -h } else { h };
        let q = usize::from(f[0] ^ f[1]);
        for (i, a) in state.amplitudes().iter().enumerate() {
            let expected = match (i >> 1 == q, i & 1) {
                (true, 0) => sign,
                (true, _) => -sign,
                _ => 0.0,
            };
            t.deviation((a - Complex64::new(expected, 0.0)).norm());
        }

        if let Some(check) = t.ok(verify_clean(&sub, &wrapped, &mut o), || format!("clean deutsch {f:?}")) {
            t.deviation(1.0 - check.min_overlap);
        }
    }
    Ok(())
}

fn parallel(t: &mut Tally, rng: &mut ChaCha8Rng) -> Result<()> {
    for k in 1..=3usize {
        let pairs: Vec<(u64, u64)> = (0..k as u64).map(|i| (2 * i, 2 * i + 1)).collect();
        for row in 0..1usize << (2 * k) {
            t.case();
            let answers = row_to_answers(row, 2 * k);
            let mut o = padded(&answers)?;
            let Some(run) = t.ok(pairwise_parallel_parity(&mut o, &pairs), || {
                format!("parallel {answers:?}")
            }) else {
                continue;
            };
            let want = answers.iter().fold(false, |a, &b| a ^ b);
            t.check(run.value == want && run.queries == k as u64 && !o.has_plan(), || {
                format!("parallel k={k} {answers:?}: {run:?}")
            });
            t.probability(run.probability);
        }
    }
    // every evaluator on two queries, and random evaluators on four
    let check_decision = |t: &mut Tally, g: &TruthTableReduction, answers: &[bool]| -> Result<()> {
        t.case();
        let mut o = padded(answers)?;
        let Some(run) = t.ok(decision_via_parity(g, &o), || format!("decision {answers:?}")) else {
            return Ok(());
        };
        let classical = g.evaluate_tt(&mut o)?;
        t.check(
            u64::from(run.value) == classical.value() && run.queries == g.len() as u64 / 2,
            || format!("decision {answers:?} table {:?}: {run:?}", g.table()),
        );
        t.probability(run.probability);
        Ok(())
    };
    for table in 0..16u64 {
        let g = TruthTableReduction::new(vec![0, 1], 1, (0..4).map(|r| (table >> r) & 1).collect())?;
        for row in 0..4 {
            check_decision(t, &g, &row_to_answers(row, 2))?;
        }
    }
    for _ in 0..32 {
        let g = TruthTableReduction::new((0..4).collect(), 1, (0..16).map(|_| rng.random_range(0..2)).collect())?;
        for row in 0..16 {
            check_decision(t, &g, &row_to_answers(row, 4))?;
        }
    }
    Ok(())
}

fn chain(t: &mut Tally) -> Result<()> {
    for k in 1..=3u32 {
        let len = (1usize << (k + 1)) - 2;
        let sub = chain_search_subroutine(len)?;
        let wrapped = clean_wrap(&sub)?;
        for c in MonotoneChain::all(len) {
            t.case();
            let mut o = chain_oracle(&c)?;
            if let Some(run) = t.ok(chain_parity_search(&mut o, len), || format!("chain {c:?}")) {
                t.check(run.value == c.parity() && run.queries == u64::from(k), || {
                    format!("chain {c:?}: {run:?}")
                });
                t.probability(run.probability);
            }
            o.reset_and_read_counter();
            let classical = classical_chain_parity(&mut o, len)?;
            t.check(classical == c.parity() && o.count() == u64::from(k) + 1, || {
                format!("classical chain {c:?}: {} queries", o.count())
            });

            o.reset_and_read_counter();
            if let Some((bit, p)) = t.ok(sub.evaluate(&mut o, &[]), || format!("compiled chain {c:?}")) {
                t.check(bit == c.parity() && o.count() == u64::from(k), || {
                    format!("compiled chain {c:?}")
                });
                t.probability(p);
            }
            if let Some(check) = t.ok(verify_clean(&sub, &wrapped, &mut o), || format!("clean chain {c:?}")) {
                t.deviation(1.0 - check.min_overlap);
            }
        }
    }
    // chain search is adaptive: a fixed plan breaks once a probe is odd
    t.case();
    let mut o = chain_oracle(&MonotoneChain::with_ones(6, 3)?)?;
    o.declare_plan(chain_search_static_plan(6)?)?;
    let r = chain_parity_search(&mut o, 6);
    t.check(matches!(r, Err(Error::Adaptivity { .. })), || {
        format!("expected adaptivity violation, got {r:?}")
    });
    Ok(())
}

fn bv(t: &mut Tally) -> Result<()> {
    for n in 1..=8usize {
        for a in 0..1u64 << n {
            t.case();
            let a = Bits::new(a, n)?;
            let mut inst = ExtractionInstance::new(a)?;
            let Some(run) = t.ok(bv_extract(inst.oracle_mut()), || format!("bv {a}")) else {
                continue;
            };
            t.check(run.value == a && run.queries == 1 && !inst.oracle().has_plan(), || {
                format!("bv {a}: {run:?}")
            });
            t.probability(run.probability);
        }
    }
    Ok(())
}

/// Largest number of value changes along one-element-at-a-time chains
/// inside `support`, by depth-first search over orderings.
fn brute_max_changes(g: &TruthTableReduction, support: usize, current: usize) -> usize {
    let m = g.len();
    let here = g.lookup(&row_to_answers(current, m));
    (0..m)
        .map(|i| 1usize << (m - 1 - i))
        .filter(|bit| support & bit != 0 && current & bit == 0)
        .map(|bit| {
            let next = current | bit;
            let step = usize::from(g.lookup(&row_to_answers(next, m)) != here);
            step + brute_max_changes(g, support, next)
        })
        .max()
        .unwrap_or(0)
}

fn mindchange(t: &mut Tally) -> Result<()> {
    for m in 1..=3usize {
        let rows = 1usize << m;
        for table in 0..1u64 << rows {
            let g = TruthTableReduction::new(
                (0..m as u64).collect(),
                1,
                (0..rows).map(|r| (table >> r) & 1).collect(),
            )?;
            for row in 0..rows {
                t.case();
                let answers = row_to_answers(row, m);
                let Some(cert) = t.ok(mind_change_bits(&g, &answers), || format!("mind change {answers:?}")) else {
                    continue;
                };
                let monotone = cert.phi.bits().windows(2).all(|w| w[0] >= w[1]);
                t.check(monotone && cert.output() == (g.lookup(&answers) == 1), || {
                    format!("mind change table {:?} answers {answers:?}: {cert:?}", g.table())
                });
                t.check(cert.max_changes == brute_max_changes(&g, row, 0), || {
                    format!("mind change count table {:?} answers {answers:?}", g.table())
                });
            }
        }
    }
    Ok(())
}

fn pipeline(t: &mut Tally, rng: &mut ChaCha8Rng) -> Result<()> {
    let check = |t: &mut Tally, g: &TruthTableReduction, answers: &[bool], k: u64| -> Result<()> {
        t.case();
        let mut o = padded(answers)?;
        let Some(run) = t.ok(function_pipeline(g, &o), || format!("pipeline {answers:?}")) else {
            return Ok(());
        };
        let classical = g.evaluate_tt(&mut o)?;
        t.check(run.value == classical && run.queries == 2 * k, || {
            format!("pipeline {answers:?} table {:?}: {run:?} vs {classical}", g.table())
        });
        t.probability(run.probability);
        Ok(())
    };
    // k = 1, n = 2: every evaluator, every answer vector
    for table in 0..256u64 {
        let g = TruthTableReduction::new(vec![0, 1], 2, (0..4).map(|r| (table >> (2 * r)) & 3).collect())?;
        for row in 0..4 {
            check(t, &g, &row_to_answers(row, 2), 1)?;
        }
    }
    for trial in 0..100 {
        let k = 1 + trial % 2;
        let m = (1usize << (k + 1)) - 2;
        let n = rng.random_range(1..=4usize);
        let table = (0..1usize << m).map(|_| rng.random_range(0..1u64 << n)).collect();
        let g = TruthTableReduction::new((0..m as u64).collect(), n, table)?;
        let answers: Vec<bool> = (0..m).map(|_| rng.random()).collect();
        check(t, &g, &answers, k as u64)?;
    }
    Ok(())
}

fn superterse(t: &mut Tally) -> Result<()> {
    for table in 0..16usize {
        let a = table_oracle_from_bools(row_to_answers(table, 4))?;
        for n in 1..=4usize {
            let spec = InnerProductOracleSpec::membership_vector(&a, n)?;
            for z in 0..1u64 << (2 * n) {
                t.case();
                let want = (0..n).fold(0u64, |acc, i| {
                    (acc << 1) | u64::from(a.peek((z >> (2 * (n - 1 - i))) & 3))
                });
                let z = Bits::new(z, 2 * n)?;
                let Some(run) = t.ok(extract_function_one_query(&spec, z), || {
                    format!("extract A={table} z={z}")
                }) else {
                    continue;
                };
                t.check(run.value.value() == want && run.queries == 1, || {
                    format!("extract A={table} z={z}: {run:?}")
                });
                t.probability(run.probability);
            }
        }
    }
    Ok(())
}

/// Runs one named suite. `seed` drives the randomized parts.
pub fn run_suite(name: &str, seed: u64) -> Result<SuiteResult> {
    let mut t = Tally::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Instant::now();
    let outcome = match name {
        "deutsch" => deutsch(&mut t),
        "parallel" => parallel(&mut t, &mut rng),
        "chain" => chain(&mut t),
        "bv" => bv(&mut t),
        "mindchange" => mindchange(&mut t),
        "pipeline" => pipeline(&mut t, &mut rng),
        "superterse" => superterse(&mut t),
        other => {
            return Err(Error::Contract(format!(
                "unknown suite {other:?}; expected one of {}, all",
                SUITES.join(", ")
            )))
        }
    };
    if let Err(e) = outcome {
        t.failures.push(format!("suite aborted: {e}"));
    }
    Ok(SuiteResult {
        name: name.to_string(),
        cases: t.cases,
        max_deviation: t.max_deviation,
        elapsed: start.elapsed(),
        failures: t.failures,
    })
}

/// `all` expands to every suite in order.
pub fn cmd_verify(suite: &str, seed: u64) -> Result<Vec<SuiteResult>> {
    if suite == "all" {
        SUITES.iter().map(|s| run_suite(s, seed)).collect()
    } else {
        Ok(vec![run_suite(suite, seed)?])
    }
}
