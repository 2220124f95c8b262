use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One quantum run next to its classical baseline on the same instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub algorithm: String,
    pub instance: String,
    pub output: String,
    pub quantum_queries: u64,
    pub classical_queries: u64,
    pub exact: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Markdown,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            "json" => Ok(Format::Json),
            _ => Err(Error::contract(format!("unknown format {s:?}"))),
        }
    }
}

const HEADER: [&str; 6] = [
    "algorithm",
    "instance",
    "output",
    "quantum_queries",
    "classical_queries",
    "exact",
];

fn fields(r: &ExperimentReport) -> [String; 6] {
    [
        r.algorithm.clone(),
        r.instance.clone(),
        r.output.clone(),
        r.quantum_queries.to_string(),
        r.classical_queries.to_string(),
        r.exact.to_string(),
    ]
}

pub fn render(reports: &[ExperimentReport], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Text => {
            for r in reports {
                for (k, v) in HEADER.iter().zip(fields(r)) {
                    let _ = writeln!(out, "{k:<18} {v}");
                }
                out.push('\n');
            }
            out.pop();
        }
        Format::Csv => {
            let _ = writeln!(out, "{}", HEADER.join(","));
            for r in reports {
                let _ = writeln!(out, "{}", fields(r).join(","));
            }
        }
        Format::Markdown => {
            let _ = writeln!(out, "| {} |", HEADER.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(HEADER.len()));
            for r in reports {
                let _ = writeln!(out, "| {} |", fields(r).join(" | "));
            }
        }
        Format::Json => {
            out = serde_json::to_string_pretty(reports).expect("reports serialize");
            out.push('\n');
        }
    }
    out
}

pub fn parse_json(text: &str) -> Result<Vec<ExperimentReport>> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        source_name: "<json>".into(),
        line: e.line(),
        message: e.to_string(),
    })
}
