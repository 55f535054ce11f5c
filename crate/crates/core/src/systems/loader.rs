//! Line-oriented system definition files.
//!
//! ```text
//! # comment
//! system "name"
//! dof 2
//! param k = 1.0
//! hamiltonian = C1
//! constant C1 = (p1^2 + p2^2)/2 + k*(q1^2 + q2^2)/2
//! constraintset "standard"
//! constraint F1 = C1 - C2 - C3
//! guard q2 >= 0.1
//! box q1 -1 1
//! ```
//!
//! `hamiltonian` may name a constant or give an expression over the phase
//! coordinates. `constraint` lines attach to the most recent
//! `constraintset`; without one they go to a set called `standard`.

use std::path::Path;

use thiserror::Error;

use super::{MotionSystem, SystemDefinition, SystemError};
use crate::expr::{parse, Expr};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: SystemError,
    },
    #[error(transparent)]
    System(#[from] SystemError),
}

impl LoadError {
    fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        LoadError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}

/// Reads and validates a definition file.
pub fn load(path: &Path) -> Result<MotionSystem, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    text.parse()
}

impl std::str::FromStr for MotionSystem {
    type Err = LoadError;

    fn from_str(text: &str) -> Result<Self, LoadError> {
        Ok(text.parse::<SystemDefinition>()?.build()?)
    }
}

impl std::str::FromStr for SystemDefinition {
    type Err = LoadError;

    fn from_str(text: &str) -> Result<Self, LoadError> {
        let (def, lines) = parse_definition(text)?;
        validate_lines(&def, &lines)?;
        Ok(def)
    }
}

impl SystemDefinition {
    /// Renders the definition in the file format; loading the result gives
    /// back an equal definition.
    pub fn to_file_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "system \"{}\"", self.name);
        if let Some(n) = self.dof {
            let _ = writeln!(out, "dof {n}");
        }
        for (p, v) in &self.params {
            let _ = writeln!(out, "param {p} = {v:?}");
        }
        if let Some(h) = &self.hamiltonian {
            let _ = writeln!(out, "hamiltonian = {h}");
        }
        for (c, e) in &self.constants {
            let _ = writeln!(out, "constant {c} = {e}");
        }
        for (label, functionals) in &self.constraint_sets {
            let _ = writeln!(out, "constraintset \"{label}\"");
            for (f, e) in functionals {
                let _ = writeln!(out, "constraint {f} = {e}");
            }
        }
        for (g, bound) in &self.guards {
            let _ = writeln!(out, "guard {g} >= {bound:?}");
        }
        for (c, lo, hi) in &self.boxes {
            let _ = writeln!(out, "box {c} {lo:?} {hi:?}");
        }
        out
    }
}

/// Line numbers of constants and constraints, for error reporting.
struct Lines {
    constants: Vec<usize>,
    constraints: Vec<(String, usize)>,
}

/// Column of the first non-blank character after byte offset `from`.
fn column_after(raw: &str, from: usize) -> usize {
    let rest = &raw[from..];
    from + (rest.len() - rest.trim_start().len()) + 1
}

fn parse_expr(src: &str, line: usize, column: usize) -> Result<Expr, LoadError> {
    parse(src).map_err(|e| LoadError::syntax(line, column + e.column - 1, e.kind.to_string()))
}

fn parse_real(src: &str, line: usize, column: usize) -> Result<f64, LoadError> {
    src.trim()
        .parse::<f64>()
        .map_err(|_| LoadError::syntax(line, column, format!("expected a number, found `{}`", src.trim())))
}

fn quoted(src: &str, line: usize, column: usize) -> Result<String, LoadError> {
    let s = src.trim();
    if s.len() >= 2 && s.starts_with('"') && s.ends_with('"') {
        Ok(s[1..s.len() - 1].to_string())
    } else if !s.is_empty() && !s.contains(char::is_whitespace) {
        Ok(s.to_string())
    } else {
        Err(LoadError::syntax(line, column, "expected a name"))
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Splits `Name = expr`, returning the name and the expression offset.
fn assignment(body: &str, offset: usize, line: usize) -> Result<(String, usize), LoadError> {
    let eq = body
        .find('=')
        .ok_or_else(|| LoadError::syntax(line, column_after(body, 0) + offset, "expected `name = expression`"))?;
    let name = body[..eq].trim();
    if !is_identifier(name) {
        return Err(LoadError::syntax(line, column_after(body, 0) + offset, format!("invalid name `{name}`")));
    }
    Ok((name.to_string(), offset + eq + 1))
}

fn parse_definition(text: &str) -> Result<(SystemDefinition, Lines), LoadError> {
    let mut def = SystemDefinition::default();
    let mut lines = Lines {
        constants: Vec::new(),
        constraints: Vec::new(),
    };
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw_line.split('#').next().unwrap_or("");
        let trimmed = raw.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let start = raw.len() - trimmed.len();
        let keyword_len = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
        let keyword = &trimmed[..keyword_len];
        let rest_at = start + keyword_len;
        let rest = &raw[rest_at..];
        let rest_col = column_after(raw, rest_at);
        match keyword {
            "system" => def.name = quoted(rest, line, rest_col)?,
            "dof" => {
                let n = rest
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| LoadError::syntax(line, rest_col, "expected a positive integer"))?;
                def.dof = Some(n);
            }
            "param" => {
                let (name, at) = assignment(rest, rest_at, line)?;
                let v = parse_real(&raw[at..], line, column_after(raw, at))?;
                def.params.push((name, v));
            }
            "hamiltonian" => {
                let body = rest.trim_start();
                let at = if let Some(stripped) = body.strip_prefix('=') {
                    raw.len() - stripped.len()
                } else {
                    rest_at
                };
                def.hamiltonian = Some(parse_expr(&raw[at..], line, at + 1)?);
            }
            "constant" => {
                let (name, at) = assignment(rest, rest_at, line)?;
                def.constants.push((name, parse_expr(&raw[at..], line, at + 1)?));
                lines.constants.push(line);
            }
            "constraintset" => {
                def.constraint_sets.push((quoted(rest, line, rest_col)?, Vec::new()));
            }
            "constraint" => {
                let (name, at) = assignment(rest, rest_at, line)?;
                let f = parse_expr(&raw[at..], line, at + 1)?;
                if def.constraint_sets.is_empty() {
                    def.constraint_sets.push(("standard".to_string(), Vec::new()));
                }
                lines.constraints.push((name.clone(), line));
                def.constraint_sets.last_mut().expect("just ensured").1.push((name, f));
            }
            "guard" => {
                let ge = rest
                    .rfind(">=")
                    .ok_or_else(|| LoadError::syntax(line, rest_col, "expected `expression >= bound`"))?;
                let g = parse_expr(&rest[..ge], line, rest_at + 1)?;
                let bound_at = rest_at + ge + 2;
                let bound = parse_real(&raw[bound_at..], line, column_after(raw, bound_at))?;
                def.guards.push((g, bound));
            }
            "box" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(LoadError::syntax(line, rest_col, "expected `box <coordinate> <low> <high>`"));
                }
                let lo = parse_real(parts[1], line, rest_col)?;
                let hi = parse_real(parts[2], line, rest_col)?;
                def.boxes.push((parts[0].to_string(), lo, hi));
            }
            other => {
                return Err(LoadError::syntax(line, start + 1, format!("unknown directive `{other}`")));
            }
        }
    }
    Ok((def, lines))
}

/// Re-runs the symbol checks per line so that errors carry a location.
fn validate_lines(def: &SystemDefinition, lines: &Lines) -> Result<(), LoadError> {
    let Some(dof) = def.dof else {
        return Ok(());
    };
    let coords: Vec<String> = (1..=dof)
        .flat_map(|j| [format!("q{j}"), format!("p{j}")])
        .collect();
    let params: Vec<&str> = def.params.iter().map(|(p, _)| p.as_str()).collect();
    let constants: Vec<&str> = def.constants.iter().map(|(c, _)| c.as_str()).collect();

    for ((name, body), &line) in def.constants.iter().zip(&lines.constants) {
        for v in body.free_variables() {
            if v != "i" && !coords.contains(&v) && !params.contains(&v.as_str()) {
                return Err(LoadError::Invalid {
                    line,
                    source: SystemError::UndeclaredSymbol {
                        item: format!("constant `{name}`"),
                        symbol: v,
                    },
                });
            }
        }
    }
    let mut line_iter = lines.constraints.iter();
    for (_, set) in &def.constraint_sets {
        for (name, f) in set {
            let line = line_iter.next().map_or(0, |(_, l)| *l);
            for v in f.free_variables() {
                let source = if coords.contains(&v) {
                    SystemError::CoordinateInConstraint {
                        constraint: name.clone(),
                        coordinate: v,
                    }
                } else if v == "i" || params.contains(&v.as_str()) || constants.contains(&v.as_str()) {
                    continue;
                } else {
                    SystemError::UndeclaredSymbol {
                        item: format!("constraint `{name}`"),
                        symbol: v,
                    }
                };
                return Err(LoadError::Invalid { line, source });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = "\
# one-dimensional oscillator
system \"toy\"
dof 1
param w = 2
hamiltonian = E
constant E = p1^2/2 + w*q1^2/2   # energy
guard q1 >= 0.2
box q1 -1 1
";

    #[test]
    fn loads_minimal_file() {
        let sys: MotionSystem = TOY.parse().unwrap();
        assert_eq!(sys.name(), "toy");
        assert_eq!(sys.family().hamiltonian_index(), Some(0));
        assert_eq!(sys.params()["w"], 2.0);
        assert_eq!(sys.boxes()[0], (-1.0, 1.0));
        assert_eq!(sys.guards()[0].bound, 0.2);
    }

    #[test]
    fn expression_errors_carry_file_position() {
        let text = TOY.replace("constant E = p1^2/2", "constant E = p1^2/ /2");
        match text.parse::<MotionSystem>() {
            Err(LoadError::Syntax { line, column, .. }) => {
                assert_eq!(line, 6);
                assert_eq!(column, 20);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constraint_on_coordinate_is_rejected_with_line() {
        let text = format!("{TOY}constraint F1 = E - q1\n");
        match text.parse::<MotionSystem>() {
            Err(LoadError::Invalid {
                line,
                source: SystemError::CoordinateInConstraint { coordinate, .. },
            }) => {
                assert_eq!(line, 9);
                assert_eq!(coordinate, "q1");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn undeclared_symbol_and_missing_hamiltonian() {
        let text = TOY.replace("w*q1^2", "v*q1^2");
        assert!(matches!(
            text.parse::<MotionSystem>(),
            Err(LoadError::Invalid { line: 6, source: SystemError::UndeclaredSymbol { .. } })
        ));
        let text = TOY.replace("hamiltonian = E\n", "");
        assert!(matches!(
            text.parse::<MotionSystem>(),
            Err(LoadError::System(SystemError::MissingHamiltonian(_)))
        ));
    }

    #[test]
    fn unknown_directive() {
        let err = "dof 1\nfoo bar\n".parse::<MotionSystem>().unwrap_err();
        assert!(matches!(err, LoadError::Syntax { line: 2, column: 1, .. }));
    }
}
