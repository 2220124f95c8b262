//! Exact quantum query algorithms built on [`crate::statevec`].
//!
//! Every entry point reports the number of oracle gates it applied, read
//! back from the oracle's counter, together with the smallest outcome
//! probability seen at any measurement (1 for a correct exact algorithm).

use std::collections::BTreeSet;

use crate::bits::{inner_product, Bits};
use crate::classical::{mind_change_bits, TruthTableReduction};
use crate::error::{Error, Result};
use crate::oracles::{
    chain_code, chain_oracle, chain_query_width, inner_product_oracle, threshold_bits, CountedOracle,
    InnerProductOracleSpec,
};
use crate::statevec::{QuantumState, RegisterLayout, ReversibleMap, EXACTNESS_TOLERANCE};

/// Result of one algorithm execution.
#[derive(Clone, Debug, PartialEq)]
pub struct Run<T> {
    pub value: T,
    /// Oracle gates applied, measured by the oracle counter.
    pub queries: u64,
    /// Smallest probability of any measured outcome during the run.
    pub probability: f64,
}

/// One step of a gate program.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Hadamard(String),
    Permute { registers: Vec<String>, map: ReversibleMap },
    Oracle { query: Vec<String>, answer: String },
}

impl Gate {
    pub fn hadamard(register: &str) -> Self {
        Gate::Hadamard(register.to_string())
    }

    pub fn permute(registers: &[&str], map: ReversibleMap) -> Self {
        Gate::Permute {
            registers: registers.iter().map(|s| s.to_string()).collect(),
            map,
        }
    }

    pub fn oracle(query: &[&str], answer: &str) -> Self {
        Gate::Oracle {
            query: query.iter().map(|s| s.to_string()).collect(),
            answer: answer.to_string(),
        }
    }

    /// Bit flip on a one-qubit register.
    pub fn not(register: &str) -> Self {
        Gate::permute(&[register], ReversibleMap::xor_constant(1, 1).expect("1-bit flip"))
    }

    /// `target ^= control` on two one-qubit registers.
    pub fn cnot(control: &str, target: &str) -> Self {
        let map = ReversibleMap::new(2, |v| v ^ (v >> 1)).expect("cnot is a bijection");
        Gate::permute(&[control, target], map)
    }

    pub fn apply(&self, state: &mut QuantumState, oracle: &mut CountedOracle) -> Result<()> {
        match self {
            Gate::Hadamard(r) => state.hadamard_block(r),
            Gate::Permute { registers, map } => {
                let regs: Vec<&str> = registers.iter().map(String::as_str).collect();
                state.apply_reversible(map, &regs)
            }
            Gate::Oracle { query, answer } => {
                let regs: Vec<&str> = query.iter().map(String::as_str).collect();
                state.oracle_gate(oracle, &regs, answer)
            }
        }
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::Permute { registers, map } => Gate::Permute {
                registers: registers.clone(),
                map: map.inverse(),
            },
            // Hadamard and the oracle gate are involutions.
            other => other.clone(),
        }
    }

    fn registers(&self) -> Vec<&str> {
        match self {
            Gate::Hadamard(r) => vec![r.as_str()],
            Gate::Permute { registers, .. } => registers.iter().map(String::as_str).collect(),
            Gate::Oracle { query, answer } => query
                .iter()
                .map(String::as_str)
                .chain(std::iter::once(answer.as_str()))
                .collect(),
        }
    }
}

/// A gate program that writes a deterministic bit into `answer` for every
/// classical assignment of its `inputs`, all other registers starting at 0.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactSubroutine {
    layout: RegisterLayout,
    inputs: Vec<String>,
    answer: String,
    program: Vec<Gate>,
    query_budget: usize,
}

impl ExactSubroutine {
    pub fn new(
        layout: RegisterLayout,
        inputs: &[&str],
        answer: &str,
        program: Vec<Gate>,
        query_budget: usize,
    ) -> Result<Self> {
        if layout.width_of(answer)? != 1 {
            return Err(Error::contract(format!("answer register `{answer}` must be one qubit")));
        }
        for input in inputs {
            layout.width_of(input)?;
            if *input == answer {
                return Err(Error::contract("answer register cannot be an input"));
            }
        }
        for gate in &program {
            for r in gate.registers() {
                layout.width_of(r)?;
            }
        }
        let oracle_gates = program.iter().filter(|g| matches!(g, Gate::Oracle { .. })).count();
        if oracle_gates != query_budget {
            return Err(Error::contract(format!(
                "program applies {oracle_gates} oracle gates, budget declares {query_budget}"
            )));
        }
        Ok(ExactSubroutine {
            layout,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            answer: answer.to_string(),
            program,
            query_budget,
        })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn answer_register(&self) -> &str {
        &self.answer
    }

    pub fn program(&self) -> &[Gate] {
        &self.program
    }

    pub fn query_budget(&self) -> usize {
        self.query_budget
    }

    pub fn run(&self, state: &mut QuantumState, oracle: &mut CountedOracle) -> Result<()> {
        if state.layout() != &self.layout {
            return Err(Error::contract("state layout differs from the subroutine layout"));
        }
        self.program.iter().try_for_each(|g| g.apply(state, oracle))
    }

    /// The basis state with `values` in the input registers and zeros elsewhere.
    pub fn basis_input(&self, values: &[u64]) -> Result<QuantumState> {
        if values.len() != self.inputs.len() {
            return Err(Error::contract(format!(
                "{} input values for {} input registers",
                values.len(),
                self.inputs.len()
            )));
        }
        let contents: Vec<(&str, u64)> = self
            .inputs
            .iter()
            .map(String::as_str)
            .zip(values.iter().copied())
            .collect();
        QuantumState::basis(&self.layout, &contents)
    }

    /// Every assignment of the input registers, first input most significant.
    pub fn input_assignments(&self) -> Vec<Vec<u64>> {
        let widths: Vec<usize> = self
            .inputs
            .iter()
            .map(|r| self.layout.width_of(r).expect("validated"))
            .collect();
        let total: usize = widths.iter().sum();
        (0..1u64 << total)
            .map(|packed| {
                let mut rest = total;
                widths
                    .iter()
                    .map(|&w| {
                        rest -= w;
                        (packed >> rest) & ((1 << w) - 1)
                    })
                    .collect()
            })
            .collect()
    }

    /// Runs forward on one basis input and reads the answer bit exactly.
    pub fn evaluate(&self, oracle: &mut CountedOracle, values: &[u64]) -> Result<(bool, f64)> {
        let mut state = self.basis_input(values)?;
        self.run(&mut state, oracle)?;
        let (bits, p) = state.measure_exact_with_probability(&self.answer)?;
        Ok((bits.value() == 1, p))
    }

    /// Checks the exactness invariant on every basis input.
    pub fn verify_exact(&self, oracle: &mut CountedOracle) -> Result<()> {
        for values in self.input_assignments() {
            self.evaluate(oracle, &values)?;
        }
        Ok(())
    }
}

/// Compute, copy the answer into a fresh auxiliary qubit, uncompute.
///
/// The result has the auxiliary qubit as its answer register and twice the
/// query budget. On `|x>|0..0>|b>` it ends in `|x>|0..0>|b ^ sub(x)>` with
/// every work register and phase restored.
pub fn clean_wrap(sub: &ExactSubroutine) -> Result<ExactSubroutine> {
    let aux = (0..)
        .map(|i| if i == 0 { "aux".to_string() } else { format!("aux{i}") })
        .find(|name| !sub.layout.contains(name))
        .expect("unbounded name supply");
    let layout = sub.layout.extended(aux.clone(), 1)?;
    let mut program = sub.program.clone();
    program.push(Gate::cnot(&sub.answer, &aux));
    program.extend(sub.program.iter().rev().map(Gate::inverse));
    let inputs: Vec<&str> = sub.inputs.iter().map(String::as_str).collect();
    ExactSubroutine::new(layout, &inputs, &aux, program, 2 * sub.query_budget)
}

/// Summary of [`verify_clean`].
#[derive(Clone, Debug, PartialEq)]
pub struct CleanCheck {
    pub cases: usize,
    /// Smallest real part of `<expected|actual>` over all cases.
    pub min_overlap: f64,
}

/// Runs `wrapped = clean_wrap(sub)` on every basis input and both auxiliary
/// values and compares the final state, phase included, with
/// `|x>|0..0>|b ^ sub(x)>`.
pub fn verify_clean(
    sub: &ExactSubroutine,
    wrapped: &ExactSubroutine,
    oracle: &mut CountedOracle,
) -> Result<CleanCheck> {
    let aux = wrapped.answer_register().to_string();
    let mut cases = 0;
    let mut min_overlap = f64::INFINITY;
    for values in sub.input_assignments() {
        let (answer, _) = sub.evaluate(oracle, &values)?;
        for b in [false, true] {
            let mut contents: Vec<(&str, u64)> = sub
                .inputs
                .iter()
                .map(String::as_str)
                .zip(values.iter().copied())
                .collect();
            contents.push((aux.as_str(), u64::from(b)));
            let mut state = QuantumState::basis(wrapped.layout(), &contents)?;
            let before = oracle.count();
            wrapped.run(&mut state, oracle)?;
            if oracle.count() - before != wrapped.query_budget() as u64 {
                return Err(Error::contract(
                    "wrapped subroutine used an unexpected number of queries",
                ));
            }
            contents.pop();
            contents.push((aux.as_str(), u64::from(b ^ answer)));
            let expected = QuantumState::basis(wrapped.layout(), &contents)?;
            let overlap = expected.overlap(&state)?.re;
            if overlap < 1.0 - EXACTNESS_TOLERANCE {
                return Err(Error::Garbage { overlap });
            }
            min_overlap = min_overlap.min(overlap);
            cases += 1;
        }
    }
    Ok(CleanCheck { cases, min_overlap })
}

fn expect_width(oracle: &CountedOracle, width: usize, what: &str) -> Result<()> {
    if oracle.query_width() != width {
        return Err(Error::contract(format!(
            "{what} needs a {width}-bit oracle, got {} bits",
            oracle.query_width()
        )));
    }
    Ok(())
}

/// Final state of the one-query parity circuit, before measurement:
/// `(-1)^f(0) |f(0)^f(1)> (|0>-|1>)/sqrt 2` on registers `q`, `b`.
pub fn deutsch_final_state(oracle: &mut CountedOracle) -> Result<QuantumState> {
    expect_width(oracle, 1, "one-query parity")?;
    let layout = RegisterLayout::new([("q", 1), ("b", 1)])?;
    let mut state = QuantumState::allocate(&layout)?;
    Gate::not("b").apply(&mut state, oracle)?;
    state.hadamard_block("q")?;
    state.hadamard_block("b")?;
    state.oracle_gate(oracle, &["q"], "b")?;
    state.hadamard_block("q")?;
    Ok(state)
}

/// `f(0) ^ f(1)` with a single oracle gate.
pub fn deutsch_parity(oracle: &mut CountedOracle) -> Result<Run<bool>> {
    let before = oracle.count();
    let state = deutsch_final_state(oracle)?;
    let (bits, probability) = state.measure_exact_with_probability("q")?;
    Ok(Run {
        value: bits.value() == 1,
        queries: oracle.count() - before,
        probability,
    })
}

/// The one-query parity circuit as a subroutine; it also returns its
/// `|->` ancilla to `|0>` so only the answer bit and a phase remain.
pub fn deutsch_subroutine() -> Result<ExactSubroutine> {
    let layout = RegisterLayout::new([("q", 1), ("kick", 1)])?;
    let program = vec![
        Gate::not("kick"),
        Gate::hadamard("kick"),
        Gate::hadamard("q"),
        Gate::oracle(&["q"], "kick"),
        Gate::hadamard("q"),
        Gate::hadamard("kick"),
        Gate::not("kick"),
    ];
    ExactSubroutine::new(layout, &[], "q", program, 1)
}

/// Bijection with `0 -> q0`, `100..0 -> q1`, remaining strings matched in sorted order.
fn two_point_relabeling(width: usize, q0: u64, q1: u64) -> Result<ReversibleMap> {
    let size = 1u64 << width;
    let top = 1u64 << (width - 1);
    let rest: Vec<u64> = (0..size).filter(|&v| v != q0 && v != q1).collect();
    let mut rest = rest.into_iter();
    let table: Vec<u64> = (0..size)
        .map(|x| match x {
            0 => q0,
            x if x == top => q1,
            _ => rest.next().expect("sizes agree"),
        })
        .collect();
    ReversibleMap::new(width, |x| table[x as usize])
}

/// `A(q0) ^ A(q1)` with one oracle gate: the one-query parity circuit
/// conjugated by a relabeling of the query register.
pub fn two_point_parity(oracle: &mut CountedOracle, q0: u64, q1: u64) -> Result<Run<bool>> {
    let w = oracle.query_width();
    if q0 == q1 {
        return Err(Error::contract("two-point parity needs distinct queries"));
    }
    if q0 >> w != 0 || q1 >> w != 0 {
        return Err(Error::contract(format!("queries {q0}, {q1} do not fit {w} bits")));
    }
    let (layout, query): (RegisterLayout, Vec<&str>) = if w == 1 {
        (RegisterLayout::new([("top", 1), ("kick", 1)])?, vec!["top"])
    } else {
        (
            RegisterLayout::new([("top", 1), ("pad", w - 1), ("kick", 1)])?,
            vec!["top", "pad"],
        )
    };
    let sigma = two_point_relabeling(w, q0, q1)?;
    let before = oracle.count();
    let mut state = QuantumState::allocate(&layout)?;
    Gate::not("kick").apply(&mut state, oracle)?;
    state.hadamard_block("kick")?;
    state.hadamard_block("top")?;
    state.apply_reversible(&sigma, &query)?;
    state.oracle_gate(oracle, &query, "kick")?;
    state.apply_reversible(&sigma.inverse(), &query)?;
    state.hadamard_block("top")?;
    let (bits, probability) = state.measure_exact_with_probability("top")?;
    Ok(Run {
        value: bits.value() == 1,
        queries: oracle.count() - before,
        probability,
    })
}

/// XOR of all `2k` answers using `k` two-point parities, with the whole
/// query list declared to the oracle before the first gate.
pub fn pairwise_parallel_parity(oracle: &mut CountedOracle, pairs: &[(u64, u64)]) -> Result<Run<bool>> {
    if pairs.is_empty() {
        return Err(Error::contract("need at least one pair"));
    }
    let distinct: BTreeSet<u64> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    if distinct.len() != 2 * pairs.len() {
        return Err(Error::contract("paired queries must be pairwise distinct"));
    }
    let plan = pairs.iter().map(|&(a, b)| BTreeSet::from([a, b])).collect();
    oracle.declare_plan(plan)?;
    let before = oracle.count();
    let mut parity = false;
    let mut probability = 1.0f64;
    for &(a, b) in pairs {
        match two_point_parity(oracle, a, b) {
            Ok(run) => {
                parity ^= run.value;
                probability = probability.min(run.probability);
            }
            Err(e) => {
                oracle.abandon_plan();
                return Err(e);
            }
        }
    }
    oracle.finish_plan()?;
    Ok(Run {
        value: parity,
        queries: oracle.count() - before,
        probability,
    })
}

/// A decision reduction with `2k` queries evaluated with `k` quantum queries:
/// mind change turns it into the parity of a monotone chain `phi`, whose
/// entries are answered by a derived oracle standing in for the formulas
/// `phi_i`; the parity is taken pairwise.
///
/// `Run::queries` counts gates on the derived oracle. The base oracle is only
/// read semantically to build it.
pub fn decision_via_parity(reduction: &TruthTableReduction, oracle: &CountedOracle) -> Result<Run<bool>> {
    let m = reduction.len();
    if !m.is_multiple_of(2) {
        return Err(Error::contract(format!(
            "decision via parity needs an even query count, got {m}"
        )));
    }
    let answers = reduction.true_answers(oracle)?;
    let cert = mind_change_bits(reduction, &answers)?;
    let mut derived = chain_oracle(&cert.phi)?;
    let pairs: Vec<(u64, u64)> = (0..m / 2)
        .map(|i| (chain_code(2 * i + 1), chain_code(2 * i + 2)))
        .collect();
    let run = pairwise_parallel_parity(&mut derived, &pairs)?;
    Ok(Run {
        value: cert.base ^ run.value,
        ..run
    })
}

/// `k` with `len = 2^(k+1) - 2`.
pub fn chain_levels(len: usize) -> Result<u32> {
    (1..=20u32)
        .find(|&k| (1usize << (k + 1)) - 2 == len)
        .ok_or_else(|| Error::contract(format!("chain length {len} is not of the form 2^(k+1) - 2")))
}

/// 1-based probe positions `a = 2^(k-1)`, `b = 2^(k-1) + 2^k - 1` in a live list of length `2^(k+1) - 2`.
fn probe_positions(level: u32) -> (usize, usize) {
    let a = 1usize << (level - 1);
    (a, a + (1usize << level) - 1)
}

/// Live list for the next level once the probe parity is known.
fn narrow(live: &[usize], level: u32, odd: bool) -> Vec<usize> {
    let (a, b) = probe_positions(level);
    if odd {
        live[a..b - 1].to_vec()
    } else {
        live[..a - 1].iter().chain(&live[b..]).copied().collect()
    }
}

/// Parity of a monotone chain of length `2^(k+1) - 2` with `k` adaptive
/// two-point parities.
///
/// Each probe compares positions `a` and `b` of the live list. Odd parity
/// means the prefix up to `a` is all ones (even length for `k >= 2`) and the
/// suffix from `b` all zeros; even parity means `a..=b` is constant with
/// even length. Either way the parity of the remaining `2^k - 2` positions
/// is the answer, and at `k = 1` the probe itself is.
pub fn chain_parity_search(oracle: &mut CountedOracle, len: usize) -> Result<Run<bool>> {
    let k = chain_levels(len)?;
    expect_width(oracle, chain_query_width(len), "chain search")?;
    let before = oracle.count();
    let mut live: Vec<usize> = (1..=len).collect();
    let mut probability = 1.0f64;
    let mut level = k;
    loop {
        let (a, b) = probe_positions(level);
        let run = two_point_parity(oracle, chain_code(live[a - 1]), chain_code(live[b - 1]))?;
        probability = probability.min(run.probability);
        if level == 1 {
            return Ok(Run {
                value: run.value,
                queries: oracle.count() - before,
                probability,
            });
        }
        live = narrow(&live, level, run.value);
        level -= 1;
    }
}

/// The probe pairs chain search would make if every probe came back even,
/// as a plan a non-adaptive machine could declare up front.
pub fn chain_search_static_plan(len: usize) -> Result<Vec<BTreeSet<u64>>> {
    let k = chain_levels(len)?;
    let mut live: Vec<usize> = (1..=len).collect();
    let mut plan = Vec::with_capacity(k as usize);
    for level in (1..=k).rev() {
        let (a, b) = probe_positions(level);
        plan.push(BTreeSet::from([chain_code(live[a - 1]), chain_code(live[b - 1])]));
        if level > 1 {
            live = narrow(&live, level, false);
        }
    }
    Ok(plan)
}

/// Chain search compiled into a single gate program with no mid-circuit
/// measurement.
///
/// Probe `j` leaves its parity in qubit `s{j}`. The index loaded into `idx`
/// for probe `j` is a permutation controlled by `s1..s{j-1}`, so each branch
/// of a superposition follows its own path while every probe is still one
/// oracle gate. With `prefix = Some((name, width))` the oracle is queried on
/// `(prefix, idx)`, so the chain may depend on the prefix register, which is
/// then the subroutine's input. `tail` gates run after the answer is written
/// to `out`.
pub fn compile_chain_search(k: u32, prefix: Option<(&str, usize)>, tail: Vec<Gate>) -> Result<ExactSubroutine> {
    if k == 0 {
        return Err(Error::contract("chain search needs k >= 1"));
    }
    let len = (1usize << (k + 1)) - 2;
    let cw = chain_query_width(len);
    let sel: Vec<String> = (1..=k).map(|j| format!("s{j}")).collect();
    let mut regs: Vec<(String, usize)> = Vec::new();
    if let Some((name, width)) = prefix {
        regs.push((name.to_string(), width));
    }
    regs.extend(sel.iter().map(|s| (s.clone(), 1)));
    regs.extend([("idx".to_string(), cw), ("kick".to_string(), 1), ("out".to_string(), 1)]);
    let layout = RegisterLayout::new(regs)?;

    let query: Vec<&str> = prefix.map(|(n, _)| n).into_iter().chain(["idx"]).collect();
    let mut program = vec![Gate::not("kick"), Gate::hadamard("kick")];
    for j in 1..=k {
        let level = k - j + 1;
        let (a, b) = probe_positions(level);
        let codes: Vec<[u64; 2]> = (0..1usize << (j - 1))
            .map(|path| {
                let mut live: Vec<usize> = (1..=len).collect();
                for t in 0..j - 1 {
                    let odd = (path >> (j - 2 - t)) & 1 == 1;
                    live = narrow(&live, k - t, odd);
                }
                [chain_code(live[a - 1]), chain_code(live[b - 1])]
            })
            .collect();
        let load = ReversibleMap::new(j as usize + cw, |v| {
            let s = (v >> cw) & 1;
            let path = (v >> (cw + 1)) as usize;
            v ^ codes[path][s as usize]
        })?;
        let mut controls: Vec<&str> = sel[..j as usize].iter().map(String::as_str).collect();
        controls.push("idx");
        let sj = sel[j as usize - 1].as_str();
        program.push(Gate::hadamard(sj));
        program.push(Gate::permute(&controls, load.clone()));
        program.push(Gate::oracle(&query, "kick"));
        program.push(Gate::permute(&controls, load));
        program.push(Gate::hadamard(sj));
    }
    program.push(Gate::cnot(&sel[k as usize - 1], "out"));
    program.extend(tail);
    let inputs: Vec<&str> = prefix.map(|(n, _)| n).into_iter().collect();
    ExactSubroutine::new(layout, &inputs, "out", program, k as usize)
}

/// Compiled chain search over a plain chain oracle of length `len`.
pub fn chain_search_subroutine(len: usize) -> Result<ExactSubroutine> {
    compile_chain_search(chain_levels(len)?, None, Vec::new())
}

/// The derived chain oracle and offsets built by [`function_pipeline`].
struct PipelineParts {
    derived: CountedOracle,
    subroutine: ExactSubroutine,
}

fn pipeline_parts(g: &TruthTableReduction, oracle: &CountedOracle) -> Result<PipelineParts> {
    let m = g.len();
    let k = chain_levels(m)?;
    let n = g.output_width();
    if n > 16 {
        return Err(Error::capacity(format!("output width {n} too large for the pipeline")));
    }
    let answers = g.true_answers(oracle)?;
    let cw = chain_query_width(m);

    // For each x: f_x(T) = <x, g(T)>, reduced by mind change to base_x ^ parity(chain_x).
    let mut chain_bits = vec![false; 1usize << (n + cw)];
    let mut base = vec![false; 1usize << n];
    for x in 0..1u64 << n {
        let table = g.table().iter().map(|&out| u64::from(inner_product(x, out))).collect();
        let f_x = TruthTableReduction::new(g.queries().to_vec(), 1, table)?;
        let cert = mind_change_bits(&f_x, &answers)?;
        let chain = threshold_bits(cert.phi.bits());
        base[x as usize] = cert.base;
        for j in 1..=m {
            chain_bits[((x as usize) << cw) | chain_code(j) as usize] = chain.get(j);
        }
    }
    let derived = CountedOracle::from_fn(n + cw, format!("threshold-chains:{n}:{m}"), move |q| {
        chain_bits[q as usize]
    })?;
    let add_base = ReversibleMap::new(n + 1, |v| v ^ u64::from(base[(v >> 1) as usize]))?;
    let subroutine = compile_chain_search(k, Some(("x", n)), vec![Gate::permute(&["x", "out"], add_base)])?;
    Ok(PipelineParts { derived, subroutine })
}

/// Recovers the `n`-bit output of a `2^(k+1) - 2` query reduction with `2k`
/// quantum queries.
///
/// The clean-wrapped compiled chain search evaluates `f_x = <x, g(z)>` into a
/// `|->` ancilla, which kicks back `(-1)^<x, a>` on a uniform superposition
/// of `x`; a Hadamard block on `x` then reads off `a`. `Run::queries` counts
/// gates on the derived threshold-chain oracle.
pub fn function_pipeline(g: &TruthTableReduction, oracle: &CountedOracle) -> Result<Run<Bits>> {
    let PipelineParts {
        mut derived,
        subroutine,
    } = pipeline_parts(g, oracle)?;
    let wrapped = clean_wrap(&subroutine)?;
    let aux = wrapped.answer_register().to_string();
    let mut state = QuantumState::allocate(wrapped.layout())?;
    Gate::not(&aux).apply(&mut state, &mut derived)?;
    state.hadamard_block(&aux)?;
    state.hadamard_block("x")?;
    wrapped.run(&mut state, &mut derived)?;
    state.hadamard_block(&aux)?;
    Gate::not(&aux).apply(&mut state, &mut derived)?;
    state.hadamard_block("x")?;
    let (value, probability) = state.measure_exact_with_probability("x")?;
    Ok(Run {
        value,
        queries: derived.count(),
        probability,
    })
}

/// Hidden string `a` with an oracle for `x -> <a, x>`.
#[derive(Clone, Debug)]
pub struct ExtractionInstance {
    hidden: Bits,
    oracle: CountedOracle,
}

impl ExtractionInstance {
    pub fn new(hidden: Bits) -> Result<Self> {
        let a = hidden.value();
        let oracle = CountedOracle::from_fn(hidden.width(), format!("dot:{hidden}"), move |x| inner_product(a, x))?;
        Ok(ExtractionInstance { hidden, oracle })
    }

    pub fn hidden(&self) -> Bits {
        self.hidden
    }

    pub fn oracle(&self) -> &CountedOracle {
        &self.oracle
    }

    pub fn oracle_mut(&mut self) -> &mut CountedOracle {
        &mut self.oracle
    }

    pub fn extract(&mut self) -> Result<Run<Bits>> {
        bv_extract(&mut self.oracle)
    }
}

/// Reads `a` out of an oracle for `x -> <a, x>` with one query.
///
/// For an oracle not of that form the final measurement is not certain and
/// the exactness error is returned.
pub fn bv_extract(oracle: &mut CountedOracle) -> Result<Run<Bits>> {
    let n = oracle.query_width();
    let layout = RegisterLayout::new([("x", n), ("kick", 1)])?;
    let mut state = QuantumState::allocate(&layout)?;
    oracle.declare_plan(vec![(0..1u64 << n).collect()])?;
    let before = oracle.count();
    let result = (|| {
        Gate::not("kick").apply(&mut state, oracle)?;
        state.hadamard_block("kick")?;
        state.hadamard_block("x")?;
        state.oracle_gate(oracle, &["x"], "kick")?;
        state.hadamard_block("x")?;
        state.measure_exact_with_probability("x")
    })();
    let (value, probability) = match result {
        Ok(r) => r,
        Err(e) => {
            oracle.abandon_plan();
            return Err(e);
        }
    };
    oracle.finish_plan()?;
    Ok(Run {
        value,
        queries: oracle.count() - before,
        probability,
    })
}

/// `f(z)` from one query to `X = {(z, y) : <f(z), y> = 1}`, with `oracle`
/// answering `X` on `z_width + out_width` bit queries `(z, y)`.
pub fn extract_with_oracle(oracle: &mut CountedOracle, z_width: usize, out_width: usize, z: Bits) -> Result<Run<Bits>> {
    expect_width(oracle, z_width + out_width, "function extraction")?;
    if z.width() != z_width {
        return Err(Error::contract(format!("z has {} bits, expected {z_width}", z.width())));
    }
    let layout = RegisterLayout::new([("z", z_width), ("y", out_width), ("kick", 1)])?;
    let mut state = QuantumState::basis(&layout, &[("z", z.value())])?;
    let plan = (0..1u64 << out_width).map(|y| (z.value() << out_width) | y).collect();
    oracle.declare_plan(vec![plan])?;
    let before = oracle.count();
    let result = (|| {
        Gate::not("kick").apply(&mut state, oracle)?;
        state.hadamard_block("kick")?;
        state.hadamard_block("y")?;
        state.oracle_gate(oracle, &["z", "y"], "kick")?;
        state.hadamard_block("y")?;
        state.measure_exact_with_probability("y")
    })();
    let (value, probability) = match result {
        Ok(r) => r,
        Err(e) => {
            oracle.abandon_plan();
            return Err(e);
        }
    };
    oracle.finish_plan()?;
    Ok(Run {
        value,
        queries: oracle.count() - before,
        probability,
    })
}

/// `f(z)` with exactly one query to the inner-product set built from `spec`.
pub fn extract_function_one_query(spec: &InnerProductOracleSpec, z: Bits) -> Result<Run<Bits>> {
    let mut oracle = inner_product_oracle(spec)?;
    extract_with_oracle(&mut oracle, spec.z_width(), spec.out_width(), z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::row_to_answers;
    use crate::oracles::{table_oracle, MonotoneChain};
    use crate::statevec::is_sqrt2_dyadic;
    use num_complex::Complex64;

    fn tables(width: usize) -> impl Iterator<Item = CountedOracle> {
        let size = 1usize << width;
        (0..1u64 << size).map(move |t| table_oracle_bits(t, size))
    }

    fn table_oracle_bits(t: u64, size: usize) -> CountedOracle {
        let s: String = (0..size).map(|i| if t >> i & 1 == 1 { '1' } else { '0' }).collect();
        table_oracle(&s).unwrap()
    }

    #[test]
    fn deutsch_all_tables() {
        for mut o in tables(1) {
            let want = o.peek(0) ^ o.peek(1);
            let run = deutsch_parity(&mut o).unwrap();
            assert_eq!(run.value, want);
            assert_eq!(run.queries, 1);
            assert!(run.probability > 1.0 - 1e-9);
        }
    }

    #[test]
    fn deutsch_final_state_carries_phase() {
        for mut o in tables(1) {
            let (f0, f1) = (o.peek(0), o.peek(1));
            let s = deutsch_final_state(&mut o).unwrap();
            let sign = if f0 { -1.0 } else { 1.0 };
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let q = usize::from(f0 ^ f1);
            let mut expected = vec![Complex64::new(0.0, 0.0); 4];
            expected[q << 1] = Complex64::new(sign * h, 0.0);
            expected[(q << 1) | 1] = Complex64::new(-sign * h, 0.0);
            for (a, e) in s.amplitudes().iter().zip(&expected) {
                assert!((a - e).norm() < 1e-9);
                assert!(is_sqrt2_dyadic(a.re, 4, 1e-9));
            }
        }
    }

    #[test]
    fn deutsch_rejects_wide_oracle() {
        let mut o = table_oracle("0110").unwrap();
        assert!(matches!(deutsch_parity(&mut o), Err(Error::Contract(_))));
    }

    #[test]
    fn two_point_examples() {
        let chain = MonotoneChain::new(vec![true, true, false, false, false, false]).unwrap();
        let mut o = chain_oracle(&chain).unwrap();
        let run = two_point_parity(&mut o, chain_code(2), chain_code(5)).unwrap();
        assert!(run.value);
        assert_eq!(run.queries, 1);

        let mut ones = table_oracle("1111").unwrap();
        for q0 in 0..4 {
            for q1 in 0..4 {
                if q0 != q1 {
                    assert!(!two_point_parity(&mut ones, q0, q1).unwrap().value);
                }
            }
        }
        assert!(two_point_parity(&mut ones, 2, 2).is_err());
        assert!(two_point_parity(&mut ones, 0, 4).is_err());
    }

    #[test]
    fn two_point_every_pair_every_table() {
        for mut o in tables(2) {
            for q0 in 0..4 {
                for q1 in 0..4 {
                    if q0 == q1 {
                        continue;
                    }
                    let first = two_point_parity(&mut o, q0, q1).unwrap().value;
                    let second = two_point_parity(&mut o, q0, q1).unwrap().value;
                    assert_eq!(first, o.peek(q0) ^ o.peek(q1));
                    assert!(!(first ^ second));
                }
            }
        }
    }

    #[test]
    fn relabeling_completion_is_sorted() {
        let m = two_point_relabeling(3, 5, 2).unwrap();
        let images: Vec<u64> = (0..8).map(|x| m.apply(x)).collect();
        assert_eq!(images, vec![5, 0, 1, 3, 2, 4, 6, 7]);
    }

    #[test]
    fn parallel_parity_examples() {
        // answers (1,0,1,1)
        let mut o = table_oracle("1011").unwrap();
        let run = pairwise_parallel_parity(&mut o, &[(0, 1), (2, 3)]).unwrap();
        assert!(run.value);
        assert_eq!(run.queries, 2);

        let mut zero = table_oracle("00000000").unwrap();
        let run = pairwise_parallel_parity(&mut zero, &[(0, 1), (2, 3), (4, 5)]).unwrap();
        assert!(!run.value);
        assert_eq!(run.queries, 3);
        assert!(!zero.has_plan());

        assert!(pairwise_parallel_parity(&mut o, &[(0, 1), (1, 2)]).is_err());
        assert!(pairwise_parallel_parity(&mut o, &[]).is_err());
    }

    #[test]
    fn decision_via_parity_matches_classical_for_all_two_query_reductions() {
        for t in 0..16u64 {
            let g = TruthTableReduction::new(vec![0, 1], 1, (0..4).map(|r| (t >> r) & 1).collect()).unwrap();
            for mut o in tables(1) {
                let run = decision_via_parity(&g, &o).unwrap();
                assert_eq!(run.queries, 1);
                assert_eq!(u64::from(run.value), g.evaluate_tt(&mut o).unwrap().value());
                assert_eq!(o.count(), 2);
            }
        }
        let odd = TruthTableReduction::decision(vec![0], |a| a[0]).unwrap();
        assert!(decision_via_parity(&odd, &table_oracle("01").unwrap()).is_err());
    }

    #[test]
    fn chain_search_examples() {
        let mut o = chain_oracle(&MonotoneChain::new(vec![true, false]).unwrap()).unwrap();
        let run = chain_parity_search(&mut o, 2).unwrap();
        assert!(run.value);
        assert_eq!(run.queries, 1);

        let mut o = chain_oracle(&MonotoneChain::with_ones(6, 3).unwrap()).unwrap();
        let run = chain_parity_search(&mut o, 6).unwrap();
        assert!(run.value);
        assert_eq!(run.queries, 2);

        let mut o = chain_oracle(&MonotoneChain::with_ones(5, 3).unwrap()).unwrap();
        assert!(chain_parity_search(&mut o, 5).is_err());
    }

    #[test]
    fn chain_search_exhaustive_small_k() {
        for k in 1..=4u32 {
            let len = (1usize << (k + 1)) - 2;
            for chain in MonotoneChain::all(len) {
                let mut o = chain_oracle(&chain).unwrap();
                let run = chain_parity_search(&mut o, len).unwrap();
                assert_eq!(run.value, chain.parity(), "{chain:?}");
                assert_eq!(run.queries, k as u64);
            }
        }
    }

    #[test]
    fn chain_search_breaks_a_static_plan() {
        let plan = chain_search_static_plan(6).unwrap();
        assert_eq!(plan, vec![BTreeSet::from([1, 4]), BTreeSet::from([0, 5])]);

        // all-zero chain follows the planned path
        let mut o = chain_oracle(&MonotoneChain::with_ones(6, 0).unwrap()).unwrap();
        o.declare_plan(plan.clone()).unwrap();
        assert!(!chain_parity_search(&mut o, 6).unwrap().value);
        o.finish_plan().unwrap();

        // c2 != c5 sends the second probe between a and b
        let mut o = chain_oracle(&MonotoneChain::with_ones(6, 3).unwrap()).unwrap();
        o.declare_plan(plan).unwrap();
        match chain_parity_search(&mut o, 6) {
            Err(Error::Adaptivity { query_number, .. }) => assert_eq!(query_number, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn narrowing_keeps_lengths() {
        for k in 2..=5u32 {
            let len = (1usize << (k + 1)) - 2;
            let live: Vec<usize> = (1..=len).collect();
            for odd in [false, true] {
                assert_eq!(narrow(&live, k, odd).len(), (1 << k) - 2);
            }
        }
    }

    #[test]
    fn compiled_chain_search_agrees_with_adaptive() {
        for k in 1..=3u32 {
            let len = (1usize << (k + 1)) - 2;
            let sub = chain_search_subroutine(len).unwrap();
            assert_eq!(sub.query_budget(), k as usize);
            for chain in MonotoneChain::all(len) {
                let mut o = chain_oracle(&chain).unwrap();
                let (bit, p) = sub.evaluate(&mut o, &[]).unwrap();
                assert_eq!(bit, chain.parity());
                assert!(p > 1.0 - 1e-9);
                assert_eq!(o.count(), k as u64);
            }
        }
    }

    #[test]
    fn clean_wrap_of_deutsch() {
        let sub = deutsch_subroutine().unwrap();
        let wrapped = clean_wrap(&sub).unwrap();
        assert_eq!(wrapped.query_budget(), 2);
        for mut o in tables(1) {
            let check = verify_clean(&sub, &wrapped, &mut o).unwrap();
            assert_eq!(check.cases, 2);
            assert!(check.min_overlap > 1.0 - 1e-9);
        }
    }

    #[test]
    fn clean_wrap_of_identity_is_a_copy() {
        let layout = RegisterLayout::new([("x", 1), ("out", 1)]).unwrap();
        let sub = ExactSubroutine::new(layout, &["x"], "out", vec![Gate::cnot("x", "out")], 0).unwrap();
        let wrapped = clean_wrap(&sub).unwrap();
        assert_eq!(wrapped.query_budget(), 0);
        let mut o = table_oracle("01").unwrap();
        let check = verify_clean(&sub, &wrapped, &mut o).unwrap();
        assert_eq!(check.cases, 4);
        assert_eq!(o.count(), 0);
    }

    #[test]
    fn unwrapped_deutsch_leaves_phase_garbage() {
        // Without uncomputation the (-1)^f(0) phase survives, which the
        // phase-sensitive comparison in verify_clean must catch.
        let sub = deutsch_subroutine().unwrap();
        let layout = sub.layout().extended("aux", 1).unwrap();
        let mut program = sub.program().to_vec();
        program.push(Gate::cnot("q", "aux"));
        let bogus = ExactSubroutine::new(layout, &[], "aux", program, 1).unwrap();
        let mut o = table_oracle("10").unwrap();
        assert!(matches!(verify_clean(&sub, &bogus, &mut o), Err(Error::Garbage { .. })));
    }

    #[test]
    fn non_exact_subroutine_is_caught() {
        let layout = RegisterLayout::new([("q", 1)]).unwrap();
        let sub = ExactSubroutine::new(layout, &[], "q", vec![Gate::hadamard("q")], 0).unwrap();
        let wrapped = clean_wrap(&sub).unwrap();
        let mut o = table_oracle("01").unwrap();
        assert!(matches!(sub.verify_exact(&mut o), Err(Error::Exactness { .. })));
        assert!(matches!(
            verify_clean(&sub, &wrapped, &mut o),
            Err(Error::Exactness { .. })
        ));
    }

    #[test]
    fn subroutine_budget_must_match_program() {
        let layout = RegisterLayout::new([("q", 1), ("kick", 1)]).unwrap();
        let r = ExactSubroutine::new(layout, &[], "q", vec![Gate::oracle(&["q"], "kick")], 2);
        assert!(r.is_err());
    }

    #[test]
    fn clean_chain_search_on_superposed_prefix() {
        // Prefix x selects one of two chains; run the wrapped program on a
        // superposition of x and check work registers come back to zero with
        // the per-branch answers in aux.
        let k = 2;
        let len = 6;
        let cw = chain_query_width(len);
        let chains = [
            MonotoneChain::with_ones(len, 3).unwrap(),
            MonotoneChain::with_ones(len, 4).unwrap(),
        ];
        let c2 = chains.clone();
        let mut o = CountedOracle::from_fn(1 + cw, "two-chains", move |q| {
            c2[(q >> cw) as usize].get(q as usize % (1 << cw) + 1)
        })
        .unwrap();
        let sub = compile_chain_search(k, Some(("x", 1)), vec![]).unwrap();
        let wrapped = clean_wrap(&sub).unwrap();
        let check = verify_clean(&sub, &wrapped, &mut o).unwrap();
        assert_eq!(check.cases, 4);

        let mut state = QuantumState::allocate(wrapped.layout()).unwrap();
        state.hadamard_block("x").unwrap();
        wrapped.run(&mut state, &mut o).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut expected = vec![Complex64::new(0.0, 0.0); state.amplitudes().len()];
        for x in 0..2u64 {
            let idx = wrapped
                .layout()
                .basis_index(&[("x", x), ("aux", u64::from(chains[x as usize].parity()))])
                .unwrap();
            expected[idx] = Complex64::new(h, 0.0);
        }
        let expected = QuantumState::from_amplitudes(wrapped.layout(), expected).unwrap();
        assert!((expected.overlap(&state).unwrap().re - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bv_examples() {
        let mut inst = ExtractionInstance::new("0000".parse().unwrap()).unwrap();
        assert_eq!(inst.extract().unwrap().value.to_string(), "0000");

        let a: Bits = "1011".parse().unwrap();
        let inst = ExtractionInstance::new(a).unwrap();
        for x in 0..16u64 {
            assert_eq!(inst.oracle().peek(x), (x & 0b1011).count_ones() % 2 == 1);
        }
        let mut inst = inst;
        let run = inst.extract().unwrap();
        assert_eq!(run.value, a);
        assert_eq!(run.queries, 1);
        assert!(!inst.oracle().has_plan());
    }

    #[test]
    fn bv_on_non_linear_oracle_is_not_exact() {
        // OR of two bits is not an inner product
        let mut o = table_oracle("0111").unwrap();
        assert!(matches!(bv_extract(&mut o), Err(Error::Exactness { .. })));
        assert!(!o.has_plan());
    }

    #[test]
    fn extract_examples() {
        let a = table_oracle("10").unwrap();
        let spec = InnerProductOracleSpec::membership_vector(&a, 3).unwrap();
        let run = extract_function_one_query(&spec, "010".parse().unwrap()).unwrap();
        assert_eq!(run.value.to_string(), "101");
        assert_eq!(run.queries, 1);

        let zero = InnerProductOracleSpec::new(2, 3, vec![0; 4]).unwrap();
        for z in 0..4 {
            let run = extract_function_one_query(&zero, Bits::new(z, 2).unwrap()).unwrap();
            assert_eq!(run.value.value(), 0);
        }
    }

    #[test]
    fn pipeline_k1_matches_classical() {
        // answers (1,0); E arbitrary over 2 output bits
        let o = table_oracle("10").unwrap();
        let g = TruthTableReduction::new(vec![0, 1], 2, vec![3, 1, 2, 0]).unwrap();
        let run = function_pipeline(&g, &o).unwrap();
        assert_eq!(run.value.value(), 2);
        assert_eq!(run.queries, 2);
        assert!(run.probability > 1.0 - 1e-9);
    }

    #[test]
    fn pipeline_constant_evaluator() {
        let o = table_oracle("0110").unwrap();
        let g = TruthTableReduction::new((0..6).map(|q| q % 4).collect(), 3, vec![5; 64]);
        // repeated queries are allowed in a reduction
        let g = g.unwrap();
        let run = function_pipeline(&g, &o).unwrap();
        assert_eq!(run.value.value(), 5);
        assert_eq!(run.queries, 4);
    }

    #[test]
    fn pipeline_k2_exhaustive_answers_small_n() {
        for row in 0..64usize {
            let answers = row_to_answers(row, 6);
            let table: Vec<bool> = answers.iter().copied().chain([false; 2]).collect();
            let o = crate::oracles::table_oracle_from_bools(table).unwrap();
            let g = TruthTableReduction::from_fn((0..6).collect(), 2, |t| {
                (t.iter().filter(|&&b| b).count() as u64 * 3 + u64::from(t[0])) % 4
            })
            .unwrap();
            let want = g.lookup(&answers);
            let run = function_pipeline(&g, &o).unwrap();
            assert_eq!(run.value.value(), want);
            assert_eq!(run.queries, 4);
        }
    }

    #[test]
    fn pipeline_rejects_bad_query_count() {
        let g = TruthTableReduction::new(vec![0, 1, 2], 1, vec![0; 8]).unwrap();
        assert!(matches!(
            function_pipeline(&g, &table_oracle("0110").unwrap()),
            Err(Error::Contract(_))
        ));
    }
}
