//! Classical bounded-query machinery: non-adaptive truth-table reductions,
//! the mind-change reduction to a parity, and the classical baselines.

use std::collections::HashMap;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::oracles::{chain_code, chain_query_width, threshold_bits, CountedOracle, MonotoneChain};

/// Most queries a reduction may list; the evaluator table has `2^m` rows.
pub const MAX_REDUCTION_QUERIES: usize = 20;

/// Bound on the subset dynamic program in [`mind_change_bits`].
pub const MAX_MIND_CHANGE_QUERIES: usize = 14;

/// A non-adaptive oracle machine: a fixed query list and an evaluator table.
///
/// Row `r` of the table is the output for the answer vector whose first
/// answer is the most significant bit of `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTableReduction {
    queries: Vec<u64>,
    output_width: usize,
    table: Vec<u64>,
}

impl TruthTableReduction {
    pub fn new(queries: Vec<u64>, output_width: usize, table: Vec<u64>) -> Result<Self> {
        let m = queries.len();
        if m == 0 {
            return Err(Error::contract("reduction needs at least one query"));
        }
        if m > MAX_REDUCTION_QUERIES {
            return Err(Error::capacity(format!(
                "{m} queries exceeds the evaluator-table limit of {MAX_REDUCTION_QUERIES}"
            )));
        }
        if output_width == 0 || output_width > 32 {
            return Err(Error::contract(format!("output width {output_width} outside 1..=32")));
        }
        if table.len() != 1usize << m {
            return Err(Error::contract(format!(
                "evaluator table has {} rows, expected {}",
                table.len(),
                1usize << m
            )));
        }
        if let Some(bad) = table.iter().find(|&&v| v >> output_width != 0) {
            return Err(Error::contract(format!(
                "table entry {bad} exceeds {output_width} bits"
            )));
        }
        Ok(TruthTableReduction {
            queries,
            output_width,
            table,
        })
    }

    pub fn from_fn(queries: Vec<u64>, output_width: usize, f: impl Fn(&[bool]) -> u64) -> Result<Self> {
        let m = queries.len();
        if m > MAX_REDUCTION_QUERIES {
            return Err(Error::capacity(format!("{m} queries exceeds {MAX_REDUCTION_QUERIES}")));
        }
        let table = (0..1usize << m).map(|row| f(&row_to_answers(row, m))).collect();
        Self::new(queries, output_width, table)
    }

    pub fn decision(queries: Vec<u64>, f: impl Fn(&[bool]) -> bool) -> Result<Self> {
        Self::from_fn(queries, 1, |a| u64::from(f(a)))
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn queries(&self) -> &[u64] {
        &self.queries
    }

    pub fn output_width(&self) -> usize {
        self.output_width
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn lookup(&self, answers: &[bool]) -> u64 {
        assert_eq!(answers.len(), self.len(), "answer vector length");
        self.table[answers_to_row(answers)]
    }

    /// Answers to the listed queries, read without counting.
    pub fn true_answers(&self, oracle: &CountedOracle) -> Result<Vec<bool>> {
        self.check_width(oracle)?;
        Ok(self.queries.iter().map(|&q| oracle.peek(q)).collect())
    }

    fn check_width(&self, oracle: &CountedOracle) -> Result<()> {
        match self.queries.iter().find(|&&q| q >> oracle.query_width() != 0) {
            Some(q) => Err(Error::contract(format!(
                "query {q} does not fit the oracle's {} bits",
                oracle.query_width()
            ))),
            None => Ok(()),
        }
    }

    /// Asks every listed query once, then reads the table.
    pub fn evaluate_tt(&self, oracle: &mut CountedOracle) -> Result<Bits> {
        self.check_width(oracle)?;
        let answers = self
            .queries
            .iter()
            .map(|&q| oracle.query(q))
            .collect::<Result<Vec<bool>>>()?;
        Bits::new(self.lookup(&answers), self.output_width)
    }
}

pub(crate) fn answers_to_row(answers: &[bool]) -> usize {
    answers.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b))
}

pub(crate) fn row_to_answers(row: usize, m: usize) -> Vec<bool> {
    (0..m).map(|i| (row >> (m - 1 - i)) & 1 == 1).collect()
}

/// Output of the mind-change reduction for one input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MindChangeCertificate {
    /// Evaluator value with every answer assumed 0.
    pub base: bool,
    /// `phi_i = [max_changes >= i]` for `i = 1..=m`.
    pub phi: MonotoneChain,
    pub max_changes: usize,
}

impl MindChangeCertificate {
    pub fn output(&self) -> bool {
        self.base ^ self.phi.parity()
    }
}

/// Largest number of value changes of `t` along a chain of answer sets
/// `{} = S_0 < S_1 < ... < S_r`, all inside the set of true answers.
///
/// `best[S]` is the maximum over one-element-at-a-time chains ending at `S`;
/// refining a chain never loses a change, so that is the maximum over all
/// chains, and the extension argument makes `best[support]` the global max.
pub fn mind_change_bits(reduction: &TruthTableReduction, true_answers: &[bool]) -> Result<MindChangeCertificate> {
    let m = reduction.len();
    if reduction.output_width() != 1 {
        return Err(Error::contract("mind change needs a one-bit evaluator"));
    }
    if true_answers.len() != m {
        return Err(Error::contract(format!(
            "{} answers given for {m} queries",
            true_answers.len()
        )));
    }
    if m > MAX_MIND_CHANGE_QUERIES {
        return Err(Error::capacity(format!(
            "mind change over {m} queries exceeds {MAX_MIND_CHANGE_QUERIES}"
        )));
    }
    let support: Vec<usize> = (0..m).filter(|&j| true_answers[j]).collect();
    let value = |subset: usize| -> bool {
        let row = support
            .iter()
            .enumerate()
            .filter(|(bit, _)| subset >> bit & 1 == 1)
            .fold(0usize, |acc, (_, &j)| acc | 1 << (m - 1 - j));
        reduction.table()[row] == 1
    };
    let s = support.len();
    let values: Vec<bool> = (0..1usize << s).map(value).collect();
    let mut best = vec![0usize; 1 << s];
    for subset in 1..1usize << s {
        best[subset] = (0..s)
            .filter(|b| subset >> b & 1 == 1)
            .map(|b| {
                let prev = subset & !(1 << b);
                best[prev] + usize::from(values[prev] != values[subset])
            })
            .max()
            .expect("non-empty subset");
    }
    let max_changes = best[(1 << s) - 1];
    let raw: Vec<bool> = (1..=m).map(|i| max_changes >= i).collect();
    Ok(MindChangeCertificate {
        base: values[0],
        phi: threshold_bits(&raw),
        max_changes,
    })
}

/// Parity of a monotone chain of length `len` by binary search for the
/// number of leading ones.
///
/// The candidate range `0..=len` is padded to `2^d` values, `d = ceil(log2(len+1))`,
/// so every chain costs exactly `d` queries; probes past the end read 0.
pub fn classical_chain_parity(oracle: &mut CountedOracle, len: usize) -> Result<bool> {
    let d = chain_query_width(len);
    if len == 0 || oracle.query_width() != d {
        return Err(Error::contract(format!(
            "chain of length {len} needs a {d}-bit oracle, got {} bits",
            oracle.query_width()
        )));
    }
    let (mut lo, mut hi) = (0usize, (1usize << d) - 1);
    for _ in 0..d {
        let mid = (lo + hi).div_ceil(2);
        if oracle.query(chain_code(mid))? {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    debug_assert_eq!(lo, hi);
    Ok(lo % 2 == 1)
}

/// An adaptive oracle machine as a binary decision tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecisionTree {
    Leaf(Bits),
    Query {
        query: u64,
        on_zero: Box<DecisionTree>,
        on_one: Box<DecisionTree>,
    },
}

impl DecisionTree {
    pub fn leaf(output: Bits) -> Self {
        DecisionTree::Leaf(output)
    }

    pub fn query(query: u64, on_zero: DecisionTree, on_one: DecisionTree) -> Self {
        DecisionTree::Query {
            query,
            on_zero: Box::new(on_zero),
            on_one: Box::new(on_one),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 0,
            DecisionTree::Query { on_zero, on_one, .. } => 1 + on_zero.depth().max(on_one.depth()),
        }
    }

    /// Distinct query strings in pre-order of first appearance.
    pub fn distinct_queries(&self) -> Vec<u64> {
        fn walk(t: &DecisionTree, out: &mut Vec<u64>) {
            if let DecisionTree::Query { query, on_zero, on_one } = t {
                if !out.contains(query) {
                    out.push(*query);
                }
                walk(on_zero, out);
                walk(on_one, out);
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    fn output_width(&self) -> Result<usize> {
        match self {
            DecisionTree::Leaf(b) => Ok(b.width()),
            DecisionTree::Query { on_zero, on_one, .. } => {
                let (a, b) = (on_zero.output_width()?, on_one.output_width()?);
                if a != b {
                    return Err(Error::contract(format!("leaves disagree on output width ({a} vs {b})")));
                }
                Ok(a)
            }
        }
    }

    /// Walks the tree, asking the oracle at each internal node.
    pub fn run(&self, oracle: &mut CountedOracle) -> Result<Bits> {
        let mut node = self;
        loop {
            match node {
                DecisionTree::Leaf(b) => return Ok(*b),
                DecisionTree::Query { query, on_zero, on_one } => {
                    node = if oracle.query(*query)? { on_one } else { on_zero };
                }
            }
        }
    }

    fn replay(&self, answer: &dyn Fn(u64) -> bool) -> Bits {
        match self {
            DecisionTree::Leaf(b) => *b,
            DecisionTree::Query { query, on_zero, on_one } => {
                if answer(*query) {
                    on_one.replay(answer)
                } else {
                    on_zero.replay(answer)
                }
            }
        }
    }
}

/// Turns a depth-`k` adaptive tree into a non-adaptive reduction that asks
/// every distinct node query (at most `2^k - 1`) and replays the tree.
pub fn exhaustive_adaptive_sim(tree: &DecisionTree) -> Result<TruthTableReduction> {
    let queries = tree.distinct_queries();
    if queries.is_empty() {
        return Err(Error::contract("tree asks no queries"));
    }
    let width = tree.output_width()?;
    let position: HashMap<u64, usize> = queries.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    TruthTableReduction::from_fn(queries.clone(), width, |answers| {
        tree.replay(&|q| answers[position[&q]]).value()
    })
}
