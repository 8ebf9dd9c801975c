use std::fmt::Write as _;
use std::str::FromStr;

use bundlesec_core::zlinalg::{AbelianGroup, IntMatrix};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::Number;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Input {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub schema_version: u32,
    pub command: &'static str,
    pub inputs: Vec<Input>,
    pub result: T,
    pub verdict: String,
}

pub fn num(b: &BigInt) -> Number {
    Number::from_str(&b.to_string()).expect("integers are valid JSON numbers")
}

pub fn nums(v: &[BigInt]) -> Vec<Number> {
    v.iter().map(num).collect()
}

pub fn matrix(m: &IntMatrix) -> Vec<Vec<Number>> {
    (0..m.rows()).map(|i| nums(&m.row(i))).collect()
}

#[derive(Debug, Serialize)]
pub struct Group {
    pub description: String,
    pub rank: usize,
    pub torsion: Vec<Number>,
}

impl From<&AbelianGroup> for Group {
    fn from(g: &AbelianGroup) -> Self {
        Group {
            description: g.to_string(),
            rank: g.rank(),
            torsion: nums(&g.torsion()),
        }
    }
}

pub fn vector_text(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

pub fn matrix_text(m: &IntMatrix, indent: &str) -> String {
    let rows: Vec<Vec<String>> = (0..m.rows()).map(|i| m.row(i).iter().map(ToString::to_string).collect()).collect();
    let width = rows.iter().flatten().map(String::len).max().unwrap_or(1);
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        let _ = writeln!(out, "{indent}[{}]", cells.join(" "));
    }
    out
}
