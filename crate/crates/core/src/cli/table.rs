//! Quantum-versus-classical query counts per `k`, measured on fixed instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::ExperimentReport;
use super::run::{chain_report, membership_report, parity_report, pipeline_report};
use crate::classical::TruthTableReduction;
use crate::error::{Error, Result};
use crate::oracles::{chain_oracle, table_oracle, table_oracle_from_bools, MonotoneChain};

pub const MAX_TABLE_K: usize = 4;

/// Largest `k` whose pipeline row fits the evaluator-table and mind-change limits.
pub const MAX_PIPELINE_K: usize = 3;

/// Table rows plus notes about rows that were left out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub rows: Vec<ExperimentReport>,
    pub notes: Vec<String>,
}

/// Fixed pseudo-random answers; the same `(len, seed)` always gives the same bits.
fn pattern(len: usize, seed: usize) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
    (0..len).map(|_| rng.random()).collect()
}

fn padded_oracle(answers: &[bool]) -> Result<crate::oracles::CountedOracle> {
    let size = answers.len().next_power_of_two().max(2);
    let mut table = answers.to_vec();
    table.resize(size, false);
    table_oracle_from_bools(table)
}

fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn cmd_table(max_k: usize) -> Result<Table> {
    if !(1..=MAX_TABLE_K).contains(&max_k) {
        return Err(Error::contract(format!(
            "--max-k must be in 1..={MAX_TABLE_K}, got {max_k}"
        )));
    }
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for k in 1..=max_k {
        let answers = pattern(2 * k, k);
        let queries: Vec<u64> = (0..2 * k as u64).collect();
        rows.push(parity_report(
            format!("k{k}-bits{}", bit_string(&answers)),
            &mut padded_oracle(&answers)?,
            &queries,
        )?);

        let len = (1usize << (k + 1)) - 2;
        let chain = MonotoneChain::with_ones(len, (1 << k) - 1)?;
        rows.push(chain_report(
            format!("k{k}-chain-L{len}-ones{}", chain.ones()),
            &mut chain_oracle(&chain)?,
            len,
        )?);

        if k <= MAX_PIPELINE_K {
            let answers = pattern(len, k + 1);
            let n = 2;
            let g = TruthTableReduction::from_fn((0..len as u64).collect(), n, |t| {
                let ones = t.iter().filter(|&&b| b).count() as u64;
                (ones * 3 + u64::from(t[0]) + 2 * u64::from(t[len - 1])) % (1 << n)
            })?;
            rows.push(pipeline_report(
                format!("k{k}-m{len}-n{n}-bits{}", bit_string(&answers)),
                &mut padded_oracle(&answers)?,
                &g,
            )?);
        } else {
            notes.push(format!(
                "k={k}: pipeline row omitted, {len} queries exceed the evaluator limit for k <= {MAX_PIPELINE_K}"
            ));
        }

        let n = k + 1;
        let xs: Vec<u64> = (0..n as u64).map(|i| (i * 3 + k as u64) % 4).collect();
        rows.push(membership_report(
            format!("k{k}-n{n}-table0110"),
            &mut table_oracle("0110")?,
            &xs,
        )?);
    }
    Ok(Table { rows, notes })
}
