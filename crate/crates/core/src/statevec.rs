//! Dense state-vector simulation over named bit registers.
//!
//! The gate set is deliberately small: Hadamard blocks on whole registers,
//! permutations of basis labels ([`ReversibleMap`]) and counted oracle gates.
//! Every circuit in this crate is built from those three, so all amplitudes
//! stay of the form `m / sqrt(2)^j` and double precision is exact enough.
//!
//! Basis index layout: registers are concatenated in declaration order, the
//! first-declared register occupying the most significant bits.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::oracles::CountedOracle;

pub const DEFAULT_QUBIT_BUDGET: usize = 24;

/// Tolerance for the exactness contract of [`QuantumState::measure_exact`].
pub const EXACTNESS_TOLERANCE: f64 = 1e-9;

/// Amplitudes smaller than this are treated as absent when computing the
/// support of a query register.
const SUPPORT_EPSILON: f64 = 1e-9;

// Hard ceiling independent of the configurable budget; keeps shifts in range.
const MAX_LAYOUT_WIDTH: usize = 40;

static QUBIT_BUDGET: AtomicUsize = AtomicUsize::new(DEFAULT_QUBIT_BUDGET);

/// Budget applied to layouts built with [`RegisterLayout::new`].
pub fn qubit_budget() -> usize {
    QUBIT_BUDGET.load(Ordering::Relaxed)
}

pub fn set_qubit_budget(qubits: usize) {
    QUBIT_BUDGET.store(qubits, Ordering::Relaxed);
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Register {
    name: String,
    width: usize,
    shift: usize,
}

/// Ordered, named partition of the qubits of a state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    registers: Vec<Register>,
    total_width: usize,
    budget: usize,
}

impl RegisterLayout {
    pub fn new<S: Into<String>>(registers: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        Self::with_budget(registers, qubit_budget())
    }

    pub fn with_budget<S: Into<String>>(
        registers: impl IntoIterator<Item = (S, usize)>,
        budget: usize,
    ) -> Result<Self> {
        let named: Vec<(String, usize)> = registers.into_iter().map(|(n, w)| (n.into(), w)).collect();
        if named.is_empty() {
            return Err(Error::contract("layout needs at least one register"));
        }
        let mut seen = BTreeSet::new();
        for (name, width) in &named {
            if *width == 0 {
                return Err(Error::contract(format!("register `{name}` has zero width")));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::contract(format!("duplicate register name `{name}`")));
            }
        }
        let total_width: usize = named.iter().map(|(_, w)| w).sum();
        if total_width > MAX_LAYOUT_WIDTH {
            return Err(Error::capacity(format!(
                "layout of {total_width} qubits exceeds the hard limit of {MAX_LAYOUT_WIDTH}"
            )));
        }
        let mut shift = total_width;
        let registers = named
            .into_iter()
            .map(|(name, width)| {
                shift -= width;
                Register { name, width, shift }
            })
            .collect();
        Ok(RegisterLayout {
            registers,
            total_width,
            budget,
        })
    }

    pub fn total_width(&self) -> usize {
        self.total_width
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn contains(&self, name: &str) -> bool {
        self.registers.iter().any(|r| r.name == name)
    }

    pub fn width_of(&self, name: &str) -> Result<usize> {
        self.register(name).map(|r| r.width)
    }

    pub fn registers(&self) -> impl Iterator<Item = (&str, usize)> {
        self.registers.iter().map(|r| (r.name.as_str(), r.width))
    }

    /// Same layout with one more register appended in the least significant position.
    pub fn extended(&self, name: impl Into<String>, width: usize) -> Result<Self> {
        let mut regs: Vec<(String, usize)> = self.registers.iter().map(|r| (r.name.clone(), r.width)).collect();
        regs.push((name.into(), width));
        Self::with_budget(regs, self.budget)
    }

    /// Basis index with the given register contents and zeros elsewhere.
    pub fn basis_index(&self, contents: &[(&str, u64)]) -> Result<usize> {
        let mut index = 0usize;
        for (name, value) in contents {
            let r = self.register(name)?;
            if *value >> r.width != 0 {
                return Err(Error::contract(format!(
                    "value {value} does not fit register `{name}` of width {}",
                    r.width
                )));
            }
            index |= (*value as usize) << r.shift;
        }
        Ok(index)
    }

    /// Contents of one register in a basis index.
    pub fn read(&self, index: usize, name: &str) -> Result<u64> {
        let r = self.register(name)?;
        Ok(((index >> r.shift) & mask(r.width)) as u64)
    }

    fn register(&self, name: &str) -> Result<&Register> {
        self.registers
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    fn selection(&self, names: &[&str]) -> Result<Selection> {
        let mut slots = Vec::with_capacity(names.len());
        let mut seen = BTreeSet::new();
        for name in names {
            if !seen.insert(*name) {
                return Err(Error::contract(format!("register `{name}` selected twice")));
            }
            let r = self.register(name)?;
            slots.push((r.shift, r.width));
        }
        let width = slots.iter().map(|(_, w)| w).sum();
        Ok(Selection { slots, width })
    }
}

fn mask(width: usize) -> usize {
    (1usize << width) - 1
}

/// Several registers read as one concatenated value, first register most significant.
struct Selection {
    slots: Vec<(usize, usize)>,
    width: usize,
}

impl Selection {
    fn read(&self, index: usize) -> u64 {
        self.slots.iter().fold(0u64, |acc, &(shift, width)| {
            (acc << width) | ((index >> shift) & mask(width)) as u64
        })
    }

    fn write(&self, index: usize, mut value: u64) -> usize {
        let mut out = index;
        for &(shift, width) in self.slots.iter().rev() {
            let field = (value as usize) & mask(width);
            out = (out & !(mask(width) << shift)) | (field << shift);
            value >>= width;
        }
        out
    }
}

/// A permutation of `{0,1}^domain_width`, used for classical control logic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReversibleMap {
    domain_width: usize,
    table: Vec<u64>,
}

impl ReversibleMap {
    /// Tabulates `f` and rejects it unless it is a bijection.
    pub fn new(domain_width: usize, f: impl Fn(u64) -> u64) -> Result<Self> {
        if domain_width == 0 || domain_width > 24 {
            return Err(Error::capacity(format!(
                "reversible map width {domain_width} outside 1..=24"
            )));
        }
        let size = 1usize << domain_width;
        let mut hit = vec![false; size];
        let mut table = Vec::with_capacity(size);
        for x in 0..size as u64 {
            let y = f(x);
            if y >= size as u64 {
                return Err(Error::contract(format!(
                    "map sends {x} to {y}, outside {domain_width}-bit domain"
                )));
            }
            if std::mem::replace(&mut hit[y as usize], true) {
                return Err(Error::contract(format!("map is not injective: {y} hit twice")));
            }
            table.push(y);
        }
        Ok(ReversibleMap { domain_width, table })
    }

    pub fn identity(domain_width: usize) -> Result<Self> {
        Self::new(domain_width, |x| x)
    }

    /// `x -> x ^ mask`; flipping bits is how registers are loaded with constants.
    pub fn xor_constant(domain_width: usize, mask: u64) -> Result<Self> {
        Self::new(domain_width, |x| x ^ mask)
    }

    pub fn domain_width(&self) -> usize {
        self.domain_width
    }

    pub fn apply(&self, x: u64) -> u64 {
        self.table[x as usize]
    }

    pub fn inverse(&self) -> Self {
        let mut table = vec![0u64; self.table.len()];
        for (x, &y) in self.table.iter().enumerate() {
            table[y as usize] = x as u64;
        }
        ReversibleMap {
            domain_width: self.domain_width,
            table,
        }
    }
}

/// Amplitude vector over a [`RegisterLayout`].
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    layout: RegisterLayout,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// The all-zero basis state.
    pub fn allocate(layout: &RegisterLayout) -> Result<Self> {
        if layout.total_width > layout.budget {
            return Err(Error::capacity(format!(
                "{} qubits requested, budget is {}",
                layout.total_width, layout.budget
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1usize << layout.total_width];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(QuantumState {
            layout: layout.clone(),
            amplitudes,
        })
    }

    pub fn basis(layout: &RegisterLayout, contents: &[(&str, u64)]) -> Result<Self> {
        let mut state = Self::allocate(layout)?;
        let index = layout.basis_index(contents)?;
        state.amplitudes.swap(0, index);
        Ok(state)
    }

    /// Builds a state from raw amplitudes; they must already be normalised.
    pub fn from_amplitudes(layout: &RegisterLayout, amplitudes: Vec<Complex64>) -> Result<Self> {
        let state = Self::allocate(layout)?;
        if amplitudes.len() != state.amplitudes.len() {
            return Err(Error::contract(format!(
                "expected {} amplitudes, got {}",
                state.amplitudes.len(),
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > EXACTNESS_TOLERANCE {
            return Err(Error::contract(format!("amplitudes have squared norm {norm}")));
        }
        Ok(QuantumState {
            layout: layout.clone(),
            amplitudes,
        })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Hadamard on every qubit of `register`.
    pub fn hadamard_block(&mut self, register: &str) -> Result<()> {
        let r = self.layout.register(register)?;
        let (shift, width) = (r.shift, r.width);
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        for q in shift..shift + width {
            let bit = 1usize << q;
            for block in self.amplitudes.chunks_exact_mut(2 * bit) {
                let (lo, hi) = block.split_at_mut(bit);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = (x + y) * h;
                    *b = (x - y) * h;
                }
            }
        }
        Ok(())
    }

    /// Relabels basis states by `map` acting on the concatenation of `registers`.
    pub fn apply_reversible(&mut self, map: &ReversibleMap, registers: &[&str]) -> Result<()> {
        let sel = self.layout.selection(registers)?;
        if sel.width != map.domain_width {
            return Err(Error::contract(format!(
                "map width {} does not match selected width {}",
                map.domain_width, sel.width
            )));
        }
        let mut next = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (i, &a) in self.amplitudes.iter().enumerate() {
            next[sel.write(i, map.apply(sel.read(i)))] = a;
        }
        self.amplitudes = next;
        Ok(())
    }

    /// `|i>|b> -> |i>|b ^ A(i)>` with `i` the concatenation of `query` registers.
    ///
    /// Counts as exactly one query against `oracle` no matter how many
    /// distinct `i` carry amplitude. If the oracle has a declared plan, the
    /// support of the query registers is checked against it first and the
    /// state is left untouched on violation.
    pub fn oracle_gate(&mut self, oracle: &mut CountedOracle, query: &[&str], answer: &str) -> Result<()> {
        let sel = self.layout.selection(query)?;
        if sel.width != oracle.query_width() {
            return Err(Error::contract(format!(
                "query registers hold {} bits, oracle expects {}",
                sel.width,
                oracle.query_width()
            )));
        }
        let ans = self.layout.register(answer)?;
        if ans.width != 1 {
            return Err(Error::contract(format!("answer register `{answer}` must be one qubit")));
        }
        if query.contains(&answer) {
            return Err(Error::contract("answer register overlaps the query registers"));
        }
        let ans_bit = 1usize << ans.shift;
        let amplitudes = &self.amplitudes;
        oracle.charge(|| {
            let mut seen = vec![false; 1usize << sel.width];
            for (i, a) in amplitudes.iter().enumerate() {
                if a.norm_sqr() > SUPPORT_EPSILON * SUPPORT_EPSILON {
                    seen[sel.read(i) as usize] = true;
                }
            }
            (0..seen.len() as u64).filter(|&q| seen[q as usize]).collect()
        })?;
        for i in 0..self.amplitudes.len() {
            if i & ans_bit == 0 && oracle.peek(sel.read(i)) {
                self.amplitudes.swap(i, i | ans_bit);
            }
        }
        Ok(())
    }

    /// Marginal distribution of `register`, indexed by register value.
    pub fn marginal(&self, register: &str) -> Result<Vec<f64>> {
        let r = self.layout.register(register)?;
        let mut probs = vec![0.0; 1usize << r.width];
        for (i, a) in self.amplitudes.iter().enumerate() {
            probs[(i >> r.shift) & mask(r.width)] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Outcome of measuring `register`, provided it is certain.
    ///
    /// Read-only: the state is not collapsed.
    pub fn measure_exact(&self, register: &str) -> Result<Bits> {
        self.measure_exact_with_probability(register).map(|(b, _)| b)
    }

    pub fn measure_exact_with_probability(&self, register: &str) -> Result<(Bits, f64)> {
        let width = self.layout.width_of(register)?;
        let probs = self.marginal(register)?;
        let (best, p) =
            probs.iter().copied().enumerate().fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, p)| if p > acc.1 { (i, p) } else { acc },
            );
        if p < 1.0 - EXACTNESS_TOLERANCE {
            return Err(Error::Exactness {
                register: register.to_string(),
                best_probability: p,
            });
        }
        Ok((Bits::new(best as u64, width)?, p))
    }

    /// `<self|other>` over identical layouts.
    pub fn overlap(&self, other: &QuantumState) -> Result<Complex64> {
        if self.layout != other.layout {
            return Err(Error::contract("overlap of states with different layouts"));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `max(0, Re <self|other>)^2`: equal to 1 only when the amplitude
    /// vectors agree, global phase included.
    pub fn fidelity(&self, other: &QuantumState) -> Result<f64> {
        self.overlap(other).map(|c| c.re.max(0.0).powi(2).min(1.0))
    }
}

/// True if `x` is within `tol` of `m * 2^(-j/2)` for some integer `m` and `j <= max_j`.
pub fn is_sqrt2_dyadic(x: f64, max_j: usize, tol: f64) -> bool {
    (0..=max_j).any(|j| {
        let scaled = x * 2f64.powf(j as f64 / 2.0);
        (scaled - scaled.round()).abs() <= tol * 2f64.powf(j as f64 / 2.0)
    })
}
