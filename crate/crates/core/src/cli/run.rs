//! Single executions of each algorithm next to a classical baseline.
//!
//! Both counts are read from the oracle counter: the quantum run first,
//! then the counter is reset and the classical baseline runs on the same
//! oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::ExperimentReport;
use super::spec_file::OracleSpec;
use crate::bits::Bits;
use crate::classical::{classical_chain_parity, TruthTableReduction};
use crate::error::{Error, Result};
use crate::oracles::{CountedOracle, InnerProductOracleSpec};
use crate::quantum::{
    chain_parity_search, decision_via_parity, deutsch_parity, extract_with_oracle, function_pipeline,
    pairwise_parallel_parity, ExtractionInstance, Run,
};
use crate::statevec::EXACTNESS_TOLERANCE;

pub const ALGORITHMS: [&str; 7] = ["deutsch", "parity", "decision", "chain", "bv", "extract", "pipeline"];

fn bit(b: bool) -> Bits {
    Bits::new(u64::from(b), 1).expect("one bit")
}

fn report(
    algorithm: &str,
    instance: String,
    quantum: Run<Bits>,
    classical: Bits,
    classical_queries: u64,
) -> ExperimentReport {
    ExperimentReport {
        algorithm: algorithm.to_string(),
        instance,
        output: quantum.value.to_string(),
        quantum_queries: quantum.queries,
        classical_queries,
        exact: quantum.value == classical && quantum.probability >= 1.0 - EXACTNESS_TOLERANCE,
    }
}

fn as_bits(run: Run<bool>) -> Run<Bits> {
    Run {
        value: bit(run.value),
        queries: run.queries,
        probability: run.probability,
    }
}

pub fn deutsch_report(instance: String, oracle: &mut CountedOracle) -> Result<ExperimentReport> {
    oracle.reset_and_read_counter();
    let quantum = as_bits(deutsch_parity(oracle)?);
    oracle.reset_and_read_counter();
    let classical = oracle.query(0)? ^ oracle.query(1)?;
    Ok(report(
        "deutsch",
        instance,
        quantum,
        bit(classical),
        oracle.reset_and_read_counter(),
    ))
}

/// XOR of the answers to `queries`, taken pairwise in order.
pub fn parity_report(instance: String, oracle: &mut CountedOracle, queries: &[u64]) -> Result<ExperimentReport> {
    if queries.is_empty() || !queries.len().is_multiple_of(2) {
        return Err(Error::contract(format!(
            "parity needs an even, non-zero number of queries, got {}",
            queries.len()
        )));
    }
    let pairs: Vec<(u64, u64)> = queries.chunks(2).map(|p| (p[0], p[1])).collect();
    oracle.reset_and_read_counter();
    let quantum = as_bits(pairwise_parallel_parity(oracle, &pairs)?);
    oracle.reset_and_read_counter();
    let mut classical = false;
    for &q in queries {
        classical ^= oracle.query(q)?;
    }
    Ok(report(
        "parity",
        instance,
        quantum,
        bit(classical),
        oracle.reset_and_read_counter(),
    ))
}

pub fn decision_report(
    instance: String,
    oracle: &mut CountedOracle,
    reduction: &TruthTableReduction,
) -> Result<ExperimentReport> {
    oracle.reset_and_read_counter();
    let quantum = as_bits(decision_via_parity(reduction, oracle)?);
    oracle.reset_and_read_counter();
    let classical = reduction.evaluate_tt(oracle)?;
    Ok(report(
        "decision",
        instance,
        quantum,
        classical,
        oracle.reset_and_read_counter(),
    ))
}

pub fn chain_report(instance: String, oracle: &mut CountedOracle, len: usize) -> Result<ExperimentReport> {
    oracle.reset_and_read_counter();
    let quantum = as_bits(chain_parity_search(oracle, len)?);
    oracle.reset_and_read_counter();
    let classical = classical_chain_parity(oracle, len)?;
    Ok(report(
        "chain",
        instance,
        quantum,
        bit(classical),
        oracle.reset_and_read_counter(),
    ))
}

/// The classical baseline reads `a` one coordinate at a time with unit vectors.
pub fn bv_report(a: Bits) -> Result<ExperimentReport> {
    let mut inst = ExtractionInstance::new(a)?;
    let quantum = inst.extract()?;
    let oracle = inst.oracle_mut();
    oracle.reset_and_read_counter();
    let n = a.width();
    let bools = (0..n)
        .map(|i| oracle.query(1 << (n - 1 - i)))
        .collect::<Result<Vec<bool>>>()?;
    let classical = Bits::from_bools(&bools)?;
    Ok(report(
        "bv",
        format!("a={a}"),
        quantum,
        classical,
        oracle.reset_and_read_counter(),
    ))
}

/// `f(z)` through the set `{(z, y) : <f(z), y> = 1}`; classically one query per output bit.
pub fn extract_report(
    instance: String,
    oracle: &mut CountedOracle,
    z_width: usize,
    out_width: usize,
    z: Bits,
) -> Result<ExperimentReport> {
    oracle.reset_and_read_counter();
    let quantum = extract_with_oracle(oracle, z_width, out_width, z)?;
    oracle.reset_and_read_counter();
    let bools = (0..out_width)
        .map(|i| oracle.query((z.value() << out_width) | 1 << (out_width - 1 - i)))
        .collect::<Result<Vec<bool>>>()?;
    let classical = Bits::from_bools(&bools)?;
    Ok(report(
        "extract",
        format!("{instance}-z={z}"),
        quantum,
        classical,
        oracle.reset_and_read_counter(),
    ))
}

/// `(A(x_1), ..., A(x_n))` with one query to the derived inner-product set,
/// against `n` direct queries to `A`.
pub fn membership_report(instance: String, set: &mut CountedOracle, xs: &[u64]) -> Result<ExperimentReport> {
    let n = xs.len();
    let w = set.query_width();
    if n == 0 {
        return Err(Error::contract("need at least one query string"));
    }
    if let Some(bad) = xs.iter().find(|&&x| x >> w != 0) {
        return Err(Error::contract(format!("query {bad} does not fit {w} bits")));
    }
    let spec = InnerProductOracleSpec::membership_vector(set, n)?;
    let z = xs.iter().fold(0u64, |acc, &x| (acc << w) | x);
    let mut derived = crate::oracles::inner_product_oracle(&spec)?;
    let quantum = extract_with_oracle(&mut derived, spec.z_width(), n, Bits::new(z, spec.z_width())?)?;
    set.reset_and_read_counter();
    let bools = xs.iter().map(|&x| set.query(x)).collect::<Result<Vec<bool>>>()?;
    let classical = Bits::from_bools(&bools)?;
    let tuple: Vec<String> = xs.iter().map(u64::to_string).collect();
    Ok(report(
        "membership",
        format!("{instance}-z={}", tuple.join("-")),
        quantum,
        classical,
        set.reset_and_read_counter(),
    ))
}

pub fn pipeline_report(
    instance: String,
    oracle: &mut CountedOracle,
    g: &TruthTableReduction,
) -> Result<ExperimentReport> {
    oracle.reset_and_read_counter();
    let quantum = function_pipeline(g, oracle)?;
    oracle.reset_and_read_counter();
    let classical = g.evaluate_tt(oracle)?;
    Ok(report(
        "pipeline",
        instance,
        quantum,
        classical,
        oracle.reset_and_read_counter(),
    ))
}

/// Parameters of `run` beyond the algorithm name.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub spec: Option<OracleSpec>,
    /// Hidden string for `bv`.
    pub a: Option<String>,
    /// `z` bitstring for an `innerproduct` spec, or comma-separated query
    /// indices for `extract` on any other spec.
    pub z: Option<String>,
    /// Comma-separated query indices; defaults to the whole universe.
    pub queries: Option<String>,
    /// Comma-separated evaluator outputs in binary, row `r` = answers with
    /// the first query as most significant bit. Random when absent.
    pub evaluator: Option<String>,
    /// Output width of a random evaluator.
    pub n: Option<usize>,
    pub seed: u64,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}

fn parse_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| usage(format!("bad query index {t:?}")))
        })
        .collect()
}

fn require_spec<'a>(opts: &'a RunOptions, algorithm: &str) -> Result<&'a OracleSpec> {
    opts.spec
        .as_ref()
        .ok_or_else(|| usage(format!("`{algorithm}` needs --spec")))
}

fn query_list(opts: &RunOptions, spec: &OracleSpec) -> Result<Vec<u64>> {
    match &opts.queries {
        Some(q) => parse_list(q),
        None => Ok((0..spec.universe_size()).collect()),
    }
}

fn reduction(opts: &RunOptions, queries: Vec<u64>, default_width: usize) -> Result<TruthTableReduction> {
    let m = queries.len();
    match &opts.evaluator {
        Some(text) if !text.contains(',') => {
            let bits: Bits = text.trim().parse()?;
            TruthTableReduction::new(queries, 1, bits.to_bools().into_iter().map(u64::from).collect())
        }
        Some(text) => {
            let rows: Vec<Bits> = text
                .split(',')
                .map(|t| t.trim().parse::<Bits>())
                .collect::<Result<_>>()?;
            let width = rows[0].width();
            if rows.iter().any(|b| b.width() != width) {
                return Err(usage("evaluator outputs must share one width"));
            }
            TruthTableReduction::new(queries, width, rows.iter().map(|b| b.value()).collect())
        }
        None => {
            let width = opts.n.unwrap_or(default_width);
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let table = (0..1usize << m).map(|_| rng.random_range(0..1u64 << width)).collect();
            TruthTableReduction::new(queries, width, table)
        }
    }
}

pub fn cmd_run(algorithm: &str, opts: &RunOptions) -> Result<ExperimentReport> {
    match algorithm {
        "deutsch" => {
            let spec = require_spec(opts, algorithm)?;
            deutsch_report(spec.to_string(), &mut spec.oracle()?)
        }
        "parity" => {
            let spec = require_spec(opts, algorithm)?;
            let queries = query_list(opts, spec)?;
            parity_report(spec.to_string(), &mut spec.oracle()?, &queries)
        }
        "decision" => {
            let spec = require_spec(opts, algorithm)?;
            let g = reduction(opts, query_list(opts, spec)?, 1)?;
            if g.output_width() != 1 {
                return Err(usage("decision needs a one-bit evaluator"));
            }
            decision_report(spec.to_string(), &mut spec.oracle()?, &g)
        }
        "chain" => {
            let spec = require_spec(opts, algorithm)?;
            let OracleSpec::Chain(chain) = spec else {
                return Err(usage("`chain` needs a `chain <L> <ones>` spec"));
            };
            chain_report(spec.to_string(), &mut spec.oracle()?, chain.len())
        }
        "bv" => {
            let a = opts.a.as_deref().ok_or_else(|| usage("`bv` needs --a <bits>"))?;
            bv_report(a.parse()?)
        }
        "extract" => {
            let spec = require_spec(opts, algorithm)?;
            let z = opts.z.as_deref().ok_or_else(|| usage("`extract` needs --z"))?;
            match spec {
                OracleSpec::InnerProduct(ip) => {
                    let z: Bits = z.parse()?;
                    extract_report(spec.to_string(), &mut spec.oracle()?, ip.z_width(), ip.out_width(), z)
                }
                _ => membership_report(spec.to_string(), &mut spec.oracle()?, &parse_list(z)?),
            }
        }
        "pipeline" => {
            let spec = require_spec(opts, algorithm)?;
            let g = reduction(opts, query_list(opts, spec)?, 2)?;
            pipeline_report(spec.to_string(), &mut spec.oracle()?, &g)
        }
        other => Err(usage(format!(
            "unknown algorithm {other:?}; expected one of {}",
            ALGORITHMS.join(", ")
        ))),
    }
}
