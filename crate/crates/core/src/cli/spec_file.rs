//! Oracle description files.
//!
//! One directive per file, `#` comments and blank lines ignored:
//!
//! ```text
//! table 0110
//! chain 6 3
//! dimacs a.cnf b.cnf
//! innerproduct 1 3 101 011
//! ```
//!
//! `dimacs` paths are resolved relative to the spec file. `innerproduct`
//! outputs are `n`-bit strings, one per `z` in increasing order.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::oracles::{
    chain_oracle, inner_product_oracle, sat_oracle, table_oracle, CountedOracle, InnerProductOracleSpec, MonotoneChain,
};
use crate::sat::{parse_dimacs_named, CnfFormula};

#[derive(Clone, Debug, PartialEq)]
pub enum OracleSpec {
    Table(String),
    Chain(MonotoneChain),
    Dimacs {
        paths: Vec<PathBuf>,
        formulas: Vec<CnfFormula>,
    },
    InnerProduct(InnerProductOracleSpec),
}

impl OracleSpec {
    pub fn oracle(&self) -> Result<CountedOracle> {
        match self {
            OracleSpec::Table(bits) => table_oracle(bits),
            OracleSpec::Chain(chain) => chain_oracle(chain),
            OracleSpec::Dimacs { formulas, .. } => sat_oracle(formulas),
            OracleSpec::InnerProduct(spec) => inner_product_oracle(spec),
        }
    }

    /// Number of meaningful query strings.
    pub fn universe_size(&self) -> u64 {
        match self {
            OracleSpec::Table(bits) => bits.len() as u64,
            OracleSpec::Chain(chain) => chain.len() as u64,
            OracleSpec::Dimacs { formulas, .. } => formulas.len() as u64,
            OracleSpec::InnerProduct(spec) => 1 << spec.query_width(),
        }
    }
}

/// Short descriptor used in reports: alphanumerics, `-` and `=` only.
impl fmt::Display for OracleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleSpec::Table(bits) => write!(f, "table={bits}"),
            OracleSpec::Chain(chain) => write!(f, "chain-L{}-ones{}", chain.len(), chain.ones()),
            OracleSpec::Dimacs { paths, .. } => {
                let names: Vec<String> = paths
                    .iter()
                    .map(|p| {
                        p.file_stem()
                            .map(|s| {
                                s.to_string_lossy()
                                    .chars()
                                    .filter(|c| c.is_ascii_alphanumeric())
                                    .collect()
                            })
                            .unwrap_or_default()
                    })
                    .collect();
                write!(f, "dimacs-{}", names.join("-"))
            }
            OracleSpec::InnerProduct(spec) => {
                let outs: Vec<String> = (0..1u64 << spec.z_width()).map(|z| spec.f(z).to_string()).collect();
                write!(f, "innerproduct-{}-{}", spec.out_width(), outs.join("-"))
            }
        }
    }
}

pub fn load_spec(path: &Path) -> Result<OracleSpec> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_spec(&text, &path.display().to_string(), base)
}

pub fn parse_spec(text: &str, source_name: &str, base_dir: &Path) -> Result<OracleSpec> {
    let err = |line: usize, message: String| Error::Parse {
        source_name: source_name.to_string(),
        line,
        message,
    };
    let mut directive: Option<(usize, Vec<&str>)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if directive.is_some() {
            return Err(err(i + 1, "only one directive per spec file".into()));
        }
        directive = Some((i + 1, line.split_whitespace().collect()));
    }
    let Some((line, words)) = directive else {
        return Err(err(1, "empty oracle spec".into()));
    };
    let number =
        |s: &str, what: &str| -> Result<usize> { s.parse().map_err(|_| err(line, format!("bad {what} {s:?}"))) };
    let at_line = |e: Error| match e {
        Error::Parse { .. } => e,
        other => err(line, other.to_string()),
    };

    match words.as_slice() {
        ["table", bits] => {
            table_oracle(bits).map_err(at_line)?;
            Ok(OracleSpec::Table(bits.to_string()))
        }
        ["chain", len, ones] => {
            let chain =
                MonotoneChain::with_ones(number(len, "chain length")?, number(ones, "ones count")?).map_err(at_line)?;
            Ok(OracleSpec::Chain(chain))
        }
        ["dimacs", files @ ..] if !files.is_empty() => {
            let mut paths = Vec::new();
            let mut formulas = Vec::new();
            for f in files {
                let path = base_dir.join(f);
                let text = fs::read_to_string(&path).map_err(|e| err(line, format!("{}: {e}", path.display())))?;
                formulas.push(parse_dimacs_named(&text, &path.display().to_string())?);
                paths.push(path);
            }
            Ok(OracleSpec::Dimacs { paths, formulas })
        }
        ["innerproduct", m_z, n, outputs @ ..] => {
            let m_z = number(m_z, "z width")?;
            let n = number(n, "output width")?;
            if m_z > 16 {
                return Err(err(line, format!("z width {m_z} too large")));
            }
            if outputs.len() != 1 << m_z {
                return Err(err(
                    line,
                    format!("expected {} outputs, found {}", 1u64 << m_z, outputs.len()),
                ));
            }
            let mut values = Vec::with_capacity(outputs.len());
            for o in outputs {
                let bits: Bits = o.parse().map_err(|_| err(line, format!("bad output {o:?}")))?;
                if bits.width() != n {
                    return Err(err(line, format!("output {o:?} is not {n} bits")));
                }
                values.push(bits.value());
            }
            Ok(OracleSpec::InnerProduct(
                InnerProductOracleSpec::new(m_z, n, values).map_err(at_line)?,
            ))
        }
        [word, ..] => Err(err(
            line,
            format!("unknown or malformed directive starting with {word:?}"),
        )),
        [] => unreachable!("blank lines are skipped"),
    }
}
