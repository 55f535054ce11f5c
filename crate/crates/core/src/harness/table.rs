//! Poisson-bracket tables for reconstructing a constraint functional.
//!
//! ```text
//! # dF/dC4 = {C2, C3}
//! C4 = C4
//! C3 = -(4*alpha1*C2 - 8*omega^2*C3 - 4*alpha1*C1)
//! gauge C1 = 0
//! reference F
//! ```
//!
//! Each `Name = expr` line gives the partial derivative of the unknown
//! functional with respect to the constant `Name`. `gauge` lines fix the
//! point where the result vanishes (default 0); `reference` names a shipped
//! constraint to compare partials against.

use std::str::FromStr;

use thiserror::Error;

use super::{HarnessError, Outcome};
use crate::constraints::{partial_mismatch, reconstruct_constraint, ReconstructError};
use crate::expr::{parse, Binding, Expr, Polynomial};
use crate::systems::MotionSystem;

const HARMONIC_OSCILLATOR: &str = include_str!("../../data/tables/harmonic-oscillator.tbl");
const SMORODINSKY_WINTERNITZ: &str = include_str!("../../data/tables/smorodinsky-winternitz.tbl");

/// The table shipped for a built-in system.
pub fn shipped_table(system: &str) -> Option<&'static str> {
    match system {
        "harmonic-oscillator" => Some(HARMONIC_OSCILLATOR),
        "smorodinsky-winternitz" => Some(SMORODINSKY_WINTERNITZ),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableError {
    #[error("table line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("table refers to `{0}`, which is not a constant of the system")]
    UnknownConstant(String),
    #[error("table entry for `{entry}` uses `{symbol}`, which is neither a constant nor a parameter")]
    UnknownSymbol { entry: String, symbol: String },
    #[error("reference constraint `{0}` not found")]
    UnknownReference(String),
    #[error("reference constraint `{name}` is not polynomial: {message}")]
    ReferenceNotPolynomial { name: String, message: String },
    #[error(transparent)]
    Reconstruct(#[from] ReconstructError),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PbTable {
    pub entries: Vec<(String, Expr)>,
    pub gauge: Binding,
    pub reference: Option<String>,
}

impl FromStr for PbTable {
    type Err = TableError;

    fn from_str(text: &str) -> Result<Self, TableError> {
        let mut table = PbTable::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let syntax = |message: String| TableError::Syntax { line, message };
            if let Some(rest) = body.strip_prefix("reference ") {
                table.reference = Some(rest.trim().to_string());
                continue;
            }
            let (lhs, rhs) = body
                .split_once('=')
                .ok_or_else(|| syntax("expected `Name = expression`".into()))?;
            if let Some(name) = lhs.trim().strip_prefix("gauge ") {
                let v: f64 = rhs
                    .trim()
                    .parse()
                    .map_err(|_| syntax(format!("expected a number, found `{}`", rhs.trim())))?;
                table.gauge.insert(name.trim(), v);
                continue;
            }
            let name = lhs.trim();
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(syntax(format!("invalid name `{name}`")));
            }
            let e = parse(rhs).map_err(|e| syntax(e.to_string()))?;
            table.entries.push((name.to_string(), e));
        }
        Ok(table)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionOutcome {
    pub functional: Polynomial,
    /// Reference name and the scaled largest partial mismatch against it.
    pub reference: Option<(String, f64)>,
}

fn find_reference(sys: &MotionSystem, name: &str) -> Option<Expr> {
    sys.constraint_sets().iter().find_map(|cs| {
        cs.index_of(name).map(|i| cs.functionals()[i].clone())
    })
}

/// Integrates `table` against `sys`, comparing with the reference when one
/// is named.
pub fn reconstruct(sys: &MotionSystem, table: &PbTable) -> Result<ReconstructionOutcome, HarnessError> {
    let family = sys.family();
    for (name, e) in &table.entries {
        if family.index_of(name).is_none() {
            return Err(TableError::UnknownConstant(name.clone()).into());
        }
        for v in e.free_variables() {
            if family.index_of(&v).is_none() && !sys.params().contains_key(&v) {
                return Err(TableError::UnknownSymbol { entry: name.clone(), symbol: v }.into());
            }
        }
    }
    for (name, _) in table.gauge.iter() {
        if family.index_of(name).is_none() {
            return Err(TableError::UnknownConstant(name.to_string()).into());
        }
    }
    let functional = reconstruct_constraint(&table.entries, &table.gauge).map_err(TableError::from)?;

    let reference = match &table.reference {
        None => None,
        Some(r) => {
            let f = find_reference(sys, r).ok_or_else(|| TableError::UnknownReference(r.clone()))?;
            let reference = Polynomial::from_expr(&f).map_err(|e| TableError::ReferenceNotPolynomial {
                name: r.clone(),
                message: e.to_string(),
            })?;
            let keys: Vec<&str> = table.entries.iter().map(|(k, _)| k.as_str()).collect();
            let scale = keys
                .iter()
                .map(|k| reference.derivative(k).max_coeff())
                .fold(1.0, f64::max);
            Some((r.clone(), partial_mismatch(&functional, &reference, &keys) / scale))
        }
    };
    Ok(ReconstructionOutcome { functional, reference })
}

pub(super) fn reconstruction_check(sys: &MotionSystem, text: &str) -> Outcome {
    let table = match text.parse::<PbTable>() {
        Ok(t) => t,
        Err(e) => return Outcome::error(0, e.to_string()),
    };
    match reconstruct(sys, &table) {
        Ok(ReconstructionOutcome { reference: Some((_, r)), .. }) => Outcome::residual(0, r),
        Ok(_) => Outcome::error(0, "table names no reference constraint"),
        Err(e) => Outcome::error(0, e.to_string()),
    }
}

/// Passes iff the table is rejected as incompatible.
pub(super) fn rejection_check(sys: &MotionSystem, text: &str) -> Outcome {
    let table = match text.parse::<PbTable>() {
        Ok(t) => t,
        Err(e) => return Outcome::error(0, e.to_string()),
    };
    let (pass, note) = match reconstruct(sys, &table) {
        Err(HarnessError::Table(TableError::Reconstruct(e @ ReconstructError::Incompatible { .. }))) => {
            (true, format!("rejected: {e}"))
        }
        Err(e) => (false, format!("unexpected error: {e}")),
        Ok(_) => (false, "corrupted table was accepted".to_string()),
    };
    Outcome {
        samples: 0,
        residual: Ok(0.0),
        note: Some(note),
        forced: Some(pass),
    }
}

/// Flips the sign of the second entry, which breaks closedness whenever
/// the first two entries are coupled.
pub(super) fn corrupt(text: &str) -> String {
    let mut seen = 0;
    text.lines()
        .map(|line| {
            let body = line.split('#').next().unwrap_or("").trim();
            let is_entry = !body.is_empty()
                && !body.starts_with("reference ")
                && !body.starts_with("gauge ")
                && body.contains('=');
            if is_entry {
                seen += 1;
                if seen == 2 {
                    let (lhs, rhs) = body.split_once('=').expect("entry has `=`");
                    return format!("{lhs}= -({})", rhs.trim());
                }
            }
            line.to_string()
        })
        .collect::<Vec<_>>()
        .join("\n")
}
