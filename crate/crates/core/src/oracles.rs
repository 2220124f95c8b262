//! Counted Boolean oracles over fixed-width query strings.
//!
//! Every oracle here is a total predicate on `{0,1}^w` plus a query counter.
//! Queries outside the meaningful range of a construction answer 0, which
//! keeps the oracle gate a permutation.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::bits::{inner_product, width_for, Bits};
use crate::error::{Error, Result};
use crate::sat::{brute_force_sat, CnfFormula};

/// Largest query width an oracle may declare.
pub const MAX_QUERY_WIDTH: usize = 32;

pub type Predicate = Arc<dyn Fn(u64) -> bool + Send + Sync>;

/// A non-adaptive query plan: the permitted support of each successive query.
#[derive(Clone, Debug, PartialEq, Eq)]
struct QueryPlan {
    supports: Vec<BTreeSet<u64>>,
    next: usize,
}

#[derive(Clone)]
pub struct CountedOracle {
    query_width: usize,
    predicate: Predicate,
    counter: u64,
    plan: Option<QueryPlan>,
    label: String,
}

impl fmt::Debug for CountedOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CountedOracle")
            .field("label", &self.label)
            .field("query_width", &self.query_width)
            .field("counter", &self.counter)
            .field("plan", &self.plan)
            .finish()
    }
}

impl CountedOracle {
    pub fn from_fn(
        query_width: usize,
        label: impl Into<String>,
        predicate: impl Fn(u64) -> bool + Send + Sync + 'static,
    ) -> Result<Self> {
        if query_width == 0 || query_width > MAX_QUERY_WIDTH {
            return Err(Error::capacity(format!(
                "oracle query width {query_width} outside 1..={MAX_QUERY_WIDTH}"
            )));
        }
        Ok(CountedOracle {
            query_width,
            predicate: Arc::new(predicate),
            counter: 0,
            plan: None,
            label: label.into(),
        })
    }

    pub fn query_width(&self) -> usize {
        self.query_width
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Uncounted evaluation, for building derived predicates and for tests.
    pub fn peek(&self, query: u64) -> bool {
        query >> self.query_width == 0 && (self.predicate)(query)
    }

    /// A classical query: counted and checked against any declared plan.
    pub fn query(&mut self, query: u64) -> Result<bool> {
        if query >> self.query_width != 0 {
            return Err(Error::contract(format!(
                "query {query} does not fit in {} bits",
                self.query_width
            )));
        }
        self.charge(|| BTreeSet::from([query]))?;
        Ok((self.predicate)(query))
    }

    pub fn count(&self) -> u64 {
        self.counter
    }

    pub fn reset_and_read_counter(&mut self) -> u64 {
        std::mem::take(&mut self.counter)
    }

    /// Declares the full list of query supports before the first query.
    ///
    /// While a plan is active, the `i`-th query must touch only strings in
    /// `supports[i]`.
    pub fn declare_plan(&mut self, supports: Vec<BTreeSet<u64>>) -> Result<()> {
        if self.plan.is_some() {
            return Err(Error::contract("a query plan is already active"));
        }
        self.plan = Some(QueryPlan { supports, next: 0 });
        Ok(())
    }

    pub fn has_plan(&self) -> bool {
        self.plan.is_some()
    }

    /// Removes the plan, failing if some planned queries were never made.
    pub fn finish_plan(&mut self) -> Result<()> {
        match self.plan.take() {
            Some(p) if p.next != p.supports.len() => Err(Error::Adaptivity {
                query_number: p.next + 1,
                detail: format!("plan declared {} queries, only {} made", p.supports.len(), p.next),
            }),
            _ => Ok(()),
        }
    }

    pub fn abandon_plan(&mut self) {
        self.plan = None;
    }

    /// Records one query. `support` is only evaluated when a plan is active.
    pub(crate) fn charge(&mut self, support: impl FnOnce() -> BTreeSet<u64>) -> Result<()> {
        if let Some(plan) = &mut self.plan {
            let n = plan.next + 1;
            let Some(allowed) = plan.supports.get(plan.next) else {
                return Err(Error::Adaptivity {
                    query_number: n,
                    detail: format!("plan only declares {} queries", plan.supports.len()),
                });
            };
            let support = support();
            if let Some(bad) = support.iter().find(|q| !allowed.contains(q)) {
                return Err(Error::Adaptivity {
                    query_number: n,
                    detail: format!("query string {bad} outside planned support {allowed:?}"),
                });
            }
            plan.next += 1;
        }
        self.counter += 1;
        Ok(())
    }
}

/// Oracle reading a truth table written as a bit string, entry `i` at position `i`.
pub fn table_oracle(truth_table: &str) -> Result<CountedOracle> {
    let bits = truth_table
        .trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::contract(format!("invalid truth-table character {other:?}"))),
        })
        .collect::<Result<Vec<bool>>>()?;
    table_oracle_from_bools(bits)
}

pub fn table_oracle_from_bools(table: Vec<bool>) -> Result<CountedOracle> {
    let len = table.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::contract(format!(
            "truth table length {len} is not a power of two >= 2"
        )));
    }
    let width = len.trailing_zeros() as usize;
    let label = format!(
        "table:{}",
        table.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>()
    );
    CountedOracle::from_fn(width, label, move |q| table[q as usize])
}

/// Non-increasing bit sequence `c_1 >= c_2 >= ... >= c_L`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonotoneChain {
    bits: Vec<bool>,
}

impl MonotoneChain {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if let Some(j) = bits.windows(2).position(|w| !w[0] && w[1]) {
            return Err(Error::contract(format!(
                "chain is not monotone: c_{} = 0 < c_{} = 1",
                j + 1,
                j + 2
            )));
        }
        Ok(MonotoneChain { bits })
    }

    /// The chain of length `len` with `ones` leading ones.
    pub fn with_ones(len: usize, ones: usize) -> Result<Self> {
        if ones > len {
            return Err(Error::contract(format!(
                "{ones} ones do not fit a chain of length {len}"
            )));
        }
        Ok(MonotoneChain {
            bits: (0..len).map(|i| i < ones).collect(),
        })
    }

    /// All `len + 1` monotone chains of the given length.
    pub fn all(len: usize) -> impl Iterator<Item = MonotoneChain> {
        (0..=len).map(move |ones| MonotoneChain::with_ones(len, ones).expect("ones <= len"))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// `c_j` for 1-based `j`; out of range reads as 0.
    pub fn get(&self, j: usize) -> bool {
        j >= 1 && self.bits.get(j - 1).copied().unwrap_or(false)
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn parity(&self) -> bool {
        self.ones() % 2 == 1
    }

    /// Query width of the chain oracle: enough bits for the codes `0..=L`.
    pub fn query_width(&self) -> usize {
        chain_query_width(self.len())
    }
}

pub fn chain_query_width(len: usize) -> usize {
    width_for(len as u64 + 1)
}

/// Query string for the 1-based chain position `j`.
pub fn chain_code(j: usize) -> u64 {
    assert!(j >= 1, "chain positions are 1-based");
    (j - 1) as u64
}

/// Oracle answering code `j - 1` with `c_j`.
pub fn chain_oracle(chain: &MonotoneChain) -> Result<CountedOracle> {
    if chain.is_empty() {
        return Err(Error::contract("chain oracle needs at least one position"));
    }
    let c = chain.clone();
    CountedOracle::from_fn(
        chain.query_width(),
        format!("chain:{}:{}", chain.len(), chain.ones()),
        move |q| c.get(q as usize + 1),
    )
}

/// Query `j` answers whether formula `j` is satisfiable.
pub fn sat_oracle(universe: &[CnfFormula]) -> Result<CountedOracle> {
    if universe.is_empty() {
        return Err(Error::contract("SAT oracle universe is empty"));
    }
    let answers = universe.iter().map(brute_force_sat).collect::<Result<Vec<bool>>>()?;
    let width = width_for(universe.len() as u64);
    CountedOracle::from_fn(width, format!("sat:{}", universe.len()), move |q| {
        answers.get(q as usize).copied().unwrap_or(false)
    })
}

/// `X = {(z, y) : <f(z), y> = 1 mod 2}` for a tabulated `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerProductOracleSpec {
    z_width: usize,
    out_width: usize,
    outputs: Vec<u64>,
}

impl InnerProductOracleSpec {
    pub fn new(z_width: usize, out_width: usize, outputs: Vec<u64>) -> Result<Self> {
        if z_width == 0 || out_width == 0 || z_width + out_width > MAX_QUERY_WIDTH || z_width > 24 {
            return Err(Error::capacity(format!(
                "inner-product widths ({z_width}, {out_width}) outside supported range"
            )));
        }
        if outputs.len() != 1usize << z_width {
            return Err(Error::contract(format!(
                "expected {} outputs for {z_width}-bit z, got {}",
                1usize << z_width,
                outputs.len()
            )));
        }
        if let Some(bad) = outputs.iter().find(|&&o| o >> out_width != 0) {
            return Err(Error::contract(format!("output {bad} does not fit {out_width} bits")));
        }
        Ok(InnerProductOracleSpec {
            z_width,
            out_width,
            outputs,
        })
    }

    pub fn from_fn(z_width: usize, out_width: usize, f: impl Fn(u64) -> u64) -> Result<Self> {
        if z_width > 24 {
            return Err(Error::capacity(format!("z width {z_width} too large to tabulate")));
        }
        Self::new(z_width, out_width, (0..1u64 << z_width).map(f).collect())
    }

    /// `f = F_n^A`: `z` is `n` concatenated `element_width`-bit strings
    /// `z_1 ... z_n` and `f(z) = A(z_1) ... A(z_n)`.
    pub fn membership_vector(set: &CountedOracle, n: usize) -> Result<Self> {
        let w = set.query_width();
        let elem_mask = (1u64 << w) - 1;
        Self::from_fn(w * n, n, |z| {
            (0..n).fold(0u64, |acc, i| {
                let zi = (z >> (w * (n - 1 - i))) & elem_mask;
                (acc << 1) | u64::from(set.peek(zi))
            })
        })
    }

    pub fn z_width(&self) -> usize {
        self.z_width
    }

    pub fn out_width(&self) -> usize {
        self.out_width
    }

    pub fn query_width(&self) -> usize {
        self.z_width + self.out_width
    }

    pub fn outputs(&self) -> &[u64] {
        &self.outputs
    }

    pub fn f(&self, z: u64) -> Bits {
        Bits::new(self.outputs[z as usize], self.out_width).expect("validated on construction")
    }

    /// Query string for the pair `(z, y)`.
    pub fn encode(&self, z: u64, y: u64) -> u64 {
        (z << self.out_width) | y
    }
}

pub fn inner_product_oracle(spec: &InnerProductOracleSpec) -> Result<CountedOracle> {
    let n = spec.out_width;
    let outputs = spec.outputs.clone();
    CountedOracle::from_fn(
        spec.query_width(),
        format!("innerproduct:{}:{}", spec.z_width, n),
        move |q| {
            let z = q >> n;
            let y = q & ((1u64 << n) - 1);
            inner_product(outputs[z as usize], y)
        },
    )
}

/// `c_i = [popcount(bits) >= i]`: same popcount, sorted into a monotone chain.
pub fn threshold_bits(bits: &[bool]) -> MonotoneChain {
    let ones = bits.iter().filter(|&&b| b).count();
    MonotoneChain::with_ones(bits.len(), ones).expect("popcount never exceeds length")
}
