//! DIMACS-subset CNF parsing and brute-force satisfiability.

use std::fmt;

use crate::error::{Error, Result};

/// Largest variable count the enumerating solver accepts.
pub const MAX_VARS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    /// Duplicate literals inside a clause are dropped; order is otherwise kept.
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        let mut out = Vec::with_capacity(clauses.len());
        for clause in clauses {
            let mut dedup: Vec<i32> = Vec::with_capacity(clause.len());
            for lit in clause {
                if lit == 0 || lit.unsigned_abs() as usize > num_vars {
                    return Err(Error::contract(format!("literal {lit} out of range 1..={num_vars}")));
                }
                if !dedup.contains(&lit) {
                    dedup.push(lit);
                }
            }
            out.push(dedup);
        }
        Ok(CnfFormula { num_vars, clauses: out })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    pub fn without_clause(&self, i: usize) -> CnfFormula {
        let mut clauses = self.clauses.clone();
        clauses.remove(i);
        CnfFormula {
            num_vars: self.num_vars,
            clauses,
        }
    }

    /// Positive and negative literal masks per clause; variable `v` is bit `v - 1`.
    fn masks(&self) -> Vec<(u32, u32)> {
        self.clauses
            .iter()
            .map(|c| {
                c.iter().fold((0u32, 0u32), |(pos, neg), &lit| {
                    let bit = 1u32 << (lit.unsigned_abs() - 1);
                    if lit > 0 {
                        (pos | bit, neg)
                    } else {
                        (pos, neg | bit)
                    }
                })
            })
            .collect()
    }

    fn check_capacity(&self) -> Result<()> {
        if self.num_vars > MAX_VARS {
            return Err(Error::capacity(format!(
                "{} variables exceeds the brute-force limit of {MAX_VARS}",
                self.num_vars
            )));
        }
        Ok(())
    }

    fn satisfying(&self) -> Result<impl Iterator<Item = u32> + '_> {
        self.check_capacity()?;
        let masks = self.masks();
        Ok((0..1u32 << self.num_vars).filter(move |&a| masks.iter().all(|&(pos, neg)| a & pos != 0 || !a & neg != 0)))
    }
}

/// Renders in the same DIMACS subset [`parse_dimacs`] reads.
impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        for clause in &self.clauses {
            for lit in clause {
                write!(f, "{lit} ")?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    parse_dimacs_named(text, "<input>")
}

/// Parses `c` comments, one `p cnf <vars> <clauses>` header and clauses of
/// integers terminated by `0`. A clause may span lines.
pub fn parse_dimacs_named(text: &str, source_name: &str) -> Result<CnfFormula> {
    let err = |line: usize, message: String| Error::Parse {
        source_name: source_name.to_string(),
        line,
        message,
    };
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(line_no, "duplicate header".into()));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(err(line_no, format!("malformed header {line:?}")));
            }
            let vars = parts[2]
                .parse::<usize>()
                .map_err(|_| err(line_no, format!("bad variable count {:?}", parts[2])))?;
            let count = parts[3]
                .parse::<usize>()
                .map_err(|_| err(line_no, format!("bad clause count {:?}", parts[3])))?;
            header = Some((vars, count, line_no));
            continue;
        }
        let Some((vars, _, _)) = header else {
            return Err(err(line_no, "clause before `p cnf` header".into()));
        };
        for tok in line.split_whitespace() {
            let lit: i32 = tok.parse().map_err(|_| err(line_no, format!("bad literal {tok:?}")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > vars {
                return Err(err(line_no, format!("literal {lit} out of range 1..={vars}")));
            } else {
                current.push(lit);
            }
        }
    }

    let Some((vars, count, header_line)) = header else {
        return Err(err(last_line.max(1), "missing `p cnf` header".into()));
    };
    if !current.is_empty() {
        return Err(err(last_line, "clause missing terminating 0".into()));
    }
    if clauses.len() != count {
        return Err(err(
            header_line,
            format!("header declares {count} clauses, found {}", clauses.len()),
        ));
    }
    CnfFormula::new(vars, clauses).map_err(|e| err(header_line, e.to_string()))
}

pub fn brute_force_sat(f: &CnfFormula) -> Result<bool> {
    Ok(f.satisfying()?.next().is_some())
}

pub fn count_models(f: &CnfFormula) -> Result<u64> {
    Ok(f.satisfying()?.count() as u64)
}
