//! Verification suites: registered identities per system, run over seeded
//! sample points, collected into a byte-stable report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::brackets::{cyclic_expansion, permutation_sign, poisson_matrix};
use crate::constraints::{combinations, FamilyAtPoint};
use crate::expr::{EvalError, Expr};
use crate::numeric::{scaled_residual, Tolerance};
use crate::systems::{self, LoadError, MotionSystem, SystemError, BUILTIN_NAMES};

mod explore;
mod registry;
mod structural;
mod table;

pub use explore::{eval_bracket, BracketOutcome, PointSource, Prediction};
pub use registry::registry;
pub use table::{reconstruct, shipped_table, PbTable, ReconstructionOutcome, TableError};

pub const CATALOG_VERSION: &str = "1";
/// Final checks on the Winternitz system run at this looser rtol.
pub const WINTERNITZ_FINAL_RTOL: f64 = 1e-7;
pub const FUNDAMENTAL_IDENTITY_RTOL: f64 = 1e-7;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: usize = 100;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown system `{0}` (not a built-in name or a readable file)")]
    UnknownSystem(String),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("no selected system has a constraint set `{0}`")]
    UnknownConstraintSet(String),
    #[error("no selected system has a parameter `{0}`")]
    UnknownParameter(String),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("{0}")]
    Bracket(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Conservation,
    ConstraintZero,
    PbTable,
    Final,
    Corollary,
    Homogeneous,
    Decomposition,
    DependentVanishing,
    FiN3,
    Reconstruction,
    Reality,
    Antisymmetry,
    Leibniz,
}

impl CheckKind {
    pub fn label(self) -> &'static str {
        match self {
            CheckKind::Conservation => "conservation",
            CheckKind::ConstraintZero => "constraint-zero",
            CheckKind::PbTable => "pb-table",
            CheckKind::Final => "final",
            CheckKind::Corollary => "corollary",
            CheckKind::Homogeneous => "homogeneous",
            CheckKind::Decomposition => "decomposition",
            CheckKind::DependentVanishing => "dependent-vanishing",
            CheckKind::FiN3 => "fi-n3",
            CheckKind::Reconstruction => "reconstruction",
            CheckKind::Reality => "reality",
            CheckKind::Antisymmetry => "antisymmetry",
            CheckKind::Leibniz => "leibniz",
        }
    }
}

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Provenance {
    Paper,
    Trivial,
    Derived,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::Paper => "PAPER",
            Provenance::Trivial => "TRIVIAL",
            Provenance::Derived => "DERIVED",
        }
    }
}

#[derive(Debug, Clone)]
pub enum StructuralCheck {
    FundamentalIdentity,
    Decomposition { dof: usize },
    Antisymmetry,
    PoissonSelf,
    Leibniz,
}

/// What a check evaluates. Indices refer to the family order; `set` is a
/// constraint-set label.
#[derive(Debug, Clone)]
pub enum Target {
    Conservation { member: usize },
    /// An expression over constants that must vanish.
    Vanishing { expr: Expr },
    PoissonPair { a: usize, b: usize, expected: Expr },
    Final { set: String, selection: Vec<usize>, expected: Option<Expr> },
    FinalSweep { set: String },
    Corollary { set: String, sel2: Vec<usize>, expected: Option<Expr> },
    CorollarySweep { set: String },
    Homogeneous { set: String, rows: Vec<usize>, arbitrary: Vec<usize> },
    HomogeneousSweep { set: String },
    Decomposition { args: Vec<usize>, expected: Expr },
    DependentVanishing { set: String, selection: Vec<usize> },
    SignConsistency { set: String },
    Reality { member: usize },
    Reconstruction { table: &'static str },
    RejectsTable { table: String },
    Structural(StructuralCheck),
    Skipped { reason: String },
}

#[derive(Debug, Clone)]
pub struct CheckSpec {
    pub name: String,
    pub kind: CheckKind,
    pub target: Target,
    pub provenance: Provenance,
    /// Looser rtol for this check; the effective value never drops below
    /// the suite's.
    pub rtol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub kind: CheckKind,
    pub samples: usize,
    /// `None` when the check could not be evaluated.
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub seed: u64,
    pub samples: usize,
    pub rtol: f64,
    pub atol: f64,
    pub catalog_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint_set: Option<String>,
    /// Parameter values per system.
    pub systems: BTreeMap<String, BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub meta: ReportMeta,
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let m = &self.meta;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "seed {} | samples {} | rtol {:e} | atol {:e} | catalog {}",
            m.seed, m.samples, m.rtol, m.atol, m.catalog_version
        );
        if let Some(set) = &m.constraint_set {
            let _ = writeln!(out, "constraint set: {set}");
        }
        for (sys, params) in &m.systems {
            let list: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(out, "system {sys}: {}", if list.is_empty() { "-".into() } else { list.join(" ") });
        }
        for c in &self.checks {
            let residual = c.max_residual.map_or("n/a".to_string(), |r| format!("{r:e}"));
            let _ = write!(
                out,
                "{} {} [{} {}] samples={} max_residual={} tolerance={:e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.kind.label(),
                c.provenance.label(),
                c.samples,
                residual,
                c.tolerance
            );
            if let Some(note) = &c.note {
                let _ = write!(out, " note: {note}");
            }
            out.push('\n');
        }
        let failed = self.failures().count();
        let _ = writeln!(out, "{} checks, {} passed, {} failed", self.checks.len(), self.checks.len() - failed, failed);
        out
    }
}

/// `all`, a built-in name, or a system file.
#[derive(Debug, Clone, PartialEq)]
pub enum Selector {
    All,
    Builtin(String),
    File(PathBuf),
}

impl Selector {
    pub fn parse(s: &str) -> Result<Self, HarnessError> {
        if s == "all" {
            Ok(Selector::All)
        } else if BUILTIN_NAMES.contains(&s) {
            Ok(Selector::Builtin(s.to_string()))
        } else if std::path::Path::new(s).is_file() {
            Ok(Selector::File(PathBuf::from(s)))
        } else {
            Err(HarnessError::UnknownSystem(s.to_string()))
        }
    }

    pub fn systems(&self) -> Result<Vec<MotionSystem>, HarnessError> {
        match self {
            Selector::All => Ok(BUILTIN_NAMES
                .iter()
                .map(|n| systems::builtin(n))
                .collect::<Result<_, _>>()?),
            Selector::Builtin(n) => Ok(vec![systems::builtin(n)?]),
            Selector::File(p) => Ok(vec![systems::load(p)?]),
        }
    }

    /// Loads a single system; `all` is rejected.
    pub fn single(&self) -> Result<MotionSystem, HarnessError> {
        match self {
            Selector::All => Err(HarnessError::UnknownSystem("all".into())),
            _ => Ok(self.systems()?.remove(0)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub seed: u64,
    pub samples: usize,
    pub tolerance: Tolerance,
    pub params: Vec<(String, f64)>,
    pub constraint_set: Option<String>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
            tolerance: Tolerance::default(),
            params: Vec::new(),
            constraint_set: None,
        }
    }
}

/// Applies parameter overrides to whichever systems declare them.
pub fn apply_params(
    systems: Vec<MotionSystem>,
    params: &[(String, f64)],
) -> Result<Vec<MotionSystem>, HarnessError> {
    for (p, _) in params {
        if !systems.iter().any(|s| s.params().contains_key(p)) {
            return Err(HarnessError::UnknownParameter(p.clone()));
        }
    }
    systems
        .into_iter()
        .map(|s| {
            let own: Vec<(String, f64)> = params
                .iter()
                .filter(|(p, _)| s.params().contains_key(p))
                .cloned()
                .collect();
            s.with_params(&own).map_err(HarnessError::from)
        })
        .collect()
}

pub fn run_suite(selector: &Selector, opts: &SuiteOptions) -> Result<VerificationReport, HarnessError> {
    let systems = apply_params(selector.systems()?, &opts.params)?;
    run_systems(systems, *selector == Selector::All, opts)
}

/// Runs the registered checks of `systems`, plus the structural group when
/// `structural` is set.
pub fn run_systems(
    systems: Vec<MotionSystem>,
    structural: bool,
    opts: &SuiteOptions,
) -> Result<VerificationReport, HarnessError> {
    if let Some(set) = &opts.constraint_set {
        if !systems.iter().any(|s| s.constraint_set(set).is_some()) {
            return Err(HarnessError::UnknownConstraintSet(set.clone()));
        }
    }
    let contexts: Vec<Context> = systems
        .into_par_iter()
        .map(|sys| Context::new(sys, opts.seed, opts.samples))
        .collect();

    let mut jobs: Vec<(Option<usize>, CheckSpec)> = Vec::new();
    for (i, ctx) in contexts.iter().enumerate() {
        for spec in registry(&ctx.sys, opts.constraint_set.as_deref()) {
            jobs.push((Some(i), spec));
        }
    }
    if structural && opts.constraint_set.is_none() {
        jobs.extend(structural::specs().into_iter().map(|s| (None, s)));
    }

    let mut checks: Vec<CheckRecord> = jobs
        .par_iter()
        .map(|(ctx, spec)| {
            let outcome = match ctx {
                Some(i) => contexts[*i].run(spec),
                None => match &spec.target {
                    Target::Structural(s) => structural::run(s, opts.seed, opts.samples),
                    _ => Outcome::error(0, "structural check without a structural target"),
                },
            };
            outcome.into_record(spec, &opts.tolerance)
        })
        .collect();
    checks.sort_by(|a, b| a.name.cmp(&b.name));

    let meta = ReportMeta {
        seed: opts.seed,
        samples: opts.samples,
        rtol: opts.tolerance.rtol,
        atol: opts.tolerance.atol,
        catalog_version: CATALOG_VERSION.to_string(),
        constraint_set: opts.constraint_set.clone(),
        systems: contexts
            .iter()
            .map(|c| (c.sys.name().to_string(), c.sys.params().clone()))
            .collect(),
    };
    Ok(VerificationReport { meta, checks })
}

/// Result of evaluating one check.
#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    samples: usize,
    residual: Result<f64, String>,
    note: Option<String>,
    /// For checks with a pass condition other than the residual bound.
    forced: Option<bool>,
}

impl Outcome {
    pub(crate) fn residual(samples: usize, r: f64) -> Self {
        Self {
            samples,
            residual: Ok(r),
            note: None,
            forced: None,
        }
    }

    pub(crate) fn error(samples: usize, msg: impl Into<String>) -> Self {
        Self {
            samples,
            residual: Err(msg.into()),
            note: None,
            forced: None,
        }
    }

    fn into_record(self, spec: &CheckSpec, tol: &Tolerance) -> CheckRecord {
        let tolerance = match spec.kind {
            CheckKind::Reality => tol.atol,
            _ => spec.rtol.map_or(tol.rtol, |r| r.max(tol.rtol)),
        };
        let (max_residual, mut note) = match self.residual {
            Ok(r) if r.is_finite() => (Some(r), self.note),
            Ok(_) => (None, Some("non-finite residual".to_string())),
            Err(e) => (None, Some(e)),
        };
        let pass = match self.forced {
            Some(p) => p,
            None => max_residual.is_some_and(|r| r <= tolerance),
        };
        if let Target::Skipped { reason } = &spec.target {
            note = Some(format!("skipped: {reason}"));
        }
        CheckRecord {
            name: spec.name.clone(),
            kind: spec.kind,
            samples: self.samples,
            max_residual,
            tolerance,
            pass,
            provenance: spec.provenance,
            note,
        }
    }
}

/// Running maximum that treats NaN as infinitely bad.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Worst(f64);

impl Worst {
    pub(crate) fn add(&mut self, r: f64) {
        if r.is_nan() {
            self.0 = f64::INFINITY;
        } else if r > self.0 {
            self.0 = r;
        }
    }

    pub(crate) fn get(self) -> f64 {
        self.0
    }
}

struct PointData {
    at: FamilyAtPoint,
    /// `[set][row][col]` partials of the constraint functionals.
    partials: Vec<Vec<Vec<Complex64>>>,
}

struct Context {
    sys: MotionSystem,
    points: Result<Vec<PointData>, String>,
}

fn eval_err(e: EvalError) -> String {
    e.to_string()
}

impl Context {
    fn new(sys: MotionSystem, seed: u64, samples: usize) -> Self {
        let points = sys.sample(seed, samples).map_err(|e| e.to_string()).and_then(|pts| {
            pts.iter()
                .map(|pt| {
                    let at = FamilyAtPoint::new(sys.family(), &pt.point).map_err(eval_err)?;
                    let partials = sys
                        .constraint_sets()
                        .iter()
                        .map(|cs| cs.partials_at(at.c_values()))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(eval_err)?;
                    Ok(PointData { at, partials })
                })
                .collect::<Result<Vec<_>, String>>()
        });
        Self { sys, points }
    }

    fn set_index(&self, label: &str) -> Result<usize, String> {
        self.sys
            .constraint_sets()
            .iter()
            .position(|c| c.label() == label)
            .ok_or_else(|| format!("no constraint set `{label}`"))
    }

    fn run(&self, spec: &CheckSpec) -> Outcome {
        match &spec.target {
            Target::Skipped { .. } => return Outcome::residual(0, 0.0),
            Target::Reconstruction { table } => return table::reconstruction_check(&self.sys, table),
            Target::RejectsTable { table } => return table::rejection_check(&self.sys, table),
            Target::Structural(s) => return structural::run(s, 0, 0),
            _ => {}
        }
        let points = match &self.points {
            Ok(p) => p,
            Err(e) => return Outcome::error(0, e.clone()),
        };
        let mut worst = Worst::default();
        for p in points {
            match self.point_residual(&spec.target, p) {
                Ok(r) => worst.add(r),
                Err(e) => return Outcome::error(points.len(), e),
            }
        }
        Outcome::residual(points.len(), worst.get())
    }

    /// Worst residual of the target at one point.
    fn point_residual(&self, target: &Target, p: &PointData) -> Result<f64, String> {
        let at = &p.at;
        let cv = at.c_values();
        let eval = |e: &Expr| e.evaluate(cv).map_err(eval_err);
        let dim = self.sys.phase_space().dim();
        let coords = || (0..dim).map(|k| at.coordinate_gradient(k));
        let mut worst = Worst::default();
        match target {
            Target::Conservation { member } => {
                worst.add(scaled_residual(at.time_derivative(at.gradient(*member)), zero()));
            }
            Target::Vanishing { expr } => worst.add(scaled_residual(eval(expr)?, zero())),
            Target::PoissonPair { a, b, expected } => {
                worst.add(scaled_residual(at.poisson(*a, *b), eval(expected)?));
            }
            Target::Final { set, selection, expected } => {
                let s = self.set_index(set)?;
                let n = normalization(&p.partials[s], selection, self.sys.m());
                let expected = expected.as_ref().map(eval).transpose()?;
                if let Some(e) = expected {
                    worst.add(scaled_residual(n, e));
                }
                for g in coords() {
                    let lhs = at.nambu(&g, selection);
                    let fdot = at.time_derivative(&g);
                    worst.add(scaled_residual(lhs, n * fdot));
                    if let Some(e) = expected {
                        worst.add(scaled_residual(lhs, e * fdot));
                    }
                }
            }
            Target::FinalSweep { set } => {
                let s = self.set_index(set)?;
                let grads: Vec<Vec<Complex64>> = coords().collect();
                let fdots: Vec<Complex64> = grads.iter().map(|g| at.time_derivative(g)).collect();
                for sel in combinations(self.sys.m(), dim - 1) {
                    let n = normalization(&p.partials[s], &sel, self.sys.m());
                    for (g, fdot) in grads.iter().zip(&fdots) {
                        worst.add(scaled_residual(at.nambu(g, &sel), n * fdot));
                    }
                }
            }
            Target::Corollary { set, sel2, expected } => {
                let s = self.set_index(set)?;
                let (lhs, rhs) = self.corollary(p, s, sel2)?;
                worst.add(scaled_residual(lhs, rhs));
                if let Some(e) = expected {
                    worst.add(scaled_residual(lhs, eval(e)?));
                }
            }
            Target::CorollarySweep { set } => {
                let s = self.set_index(set)?;
                let h = self.sys.family().hamiltonian_index().ok_or("no Hamiltonian in family")?;
                let others: Vec<usize> = (0..self.sys.m()).filter(|&i| i != h).collect();
                for pick in combinations(others.len(), dim - 2) {
                    let sel2: Vec<usize> = pick.iter().map(|&i| others[i]).collect();
                    let (lhs, rhs) = self.corollary(p, s, &sel2)?;
                    worst.add(scaled_residual(lhs, rhs));
                }
            }
            Target::Homogeneous { set, rows, arbitrary } => {
                let s = self.set_index(set)?;
                worst.add(scaled_residual(homogeneous(&p.partials[s], rows, arbitrary, self.sys.m()), zero()));
            }
            Target::HomogeneousSweep { set } => {
                let s = self.set_index(set)?;
                for (rows, arbitrary) in homogeneous_cases(self.sys.constraint_sets()[s].len(), self.sys.m(), dim - 1) {
                    worst.add(scaled_residual(homogeneous(&p.partials[s], &rows, &arbitrary, self.sys.m()), zero()));
                }
            }
            Target::Decomposition { args, expected } => {
                let grads: Vec<Vec<Complex64>> = args.iter().map(|&i| at.gradient(i).to_vec()).collect();
                worst.add(scaled_residual(cyclic_expansion(&poisson_matrix(&grads)), eval(expected)?));
            }
            Target::DependentVanishing { set, selection } => {
                let s = self.set_index(set)?;
                worst.add(scaled_residual(normalization(&p.partials[s], selection, self.sys.m()), zero()));
                for g in coords() {
                    worst.add(scaled_residual(at.nambu(&g, selection), zero()));
                }
            }
            Target::SignConsistency { set } => {
                let s = self.set_index(set)?;
                for sel in combinations(self.sys.m(), dim - 1) {
                    let rev: Vec<usize> = sel.iter().rev().copied().collect();
                    let sign = f64::from(permutation_sign(&rev.iter().map(|&i| i as i64).collect::<Vec<_>>()));
                    let n = normalization(&p.partials[s], &sel, self.sys.m());
                    for g in coords() {
                        let lhs = at.nambu(&g, &rev) * sign;
                        worst.add(scaled_residual(lhs, n * at.time_derivative(&g)));
                    }
                }
            }
            Target::Reality { member } => {
                let name = &self.sys.family().names()[*member];
                worst.add(cv.get(name).map_or(f64::INFINITY, |v| v.im.abs()));
            }
            Target::Reconstruction { .. }
            | Target::RejectsTable { .. }
            | Target::Structural(_)
            | Target::Skipped { .. } => unreachable!("handled in run"),
        }
        Ok(worst.get())
    }

    fn corollary(&self, p: &PointData, s: usize, sel2: &[usize]) -> Result<(Complex64, Complex64), String> {
        let h = self.sys.family().hamiltonian_index().ok_or("no Hamiltonian in family")?;
        let grads: Vec<Vec<Complex64>> = sel2.iter().map(|&i| p.at.gradient(i).to_vec()).collect();
        let lhs = cyclic_expansion(&poisson_matrix(&grads));
        let tuple: Vec<usize> = std::iter::once(h).chain(sel2.iter().copied()).collect();
        Ok((lhs, normalization(&p.partials[s], &tuple, self.sys.m())))
    }
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `eps(tuple, complement) * det[dF/dC_complement]` from precomputed
/// partials; zero for repeated indices or a non-square Jacobian.
pub(crate) fn normalization(partials: &[Vec<Complex64>], tuple: &[usize], m: usize) -> Complex64 {
    let complement: Vec<usize> = (0..m).filter(|i| !tuple.contains(i)).collect();
    if complement.len() != partials.len() {
        return zero();
    }
    let perm: Vec<i64> = tuple.iter().chain(&complement).map(|&i| i as i64).collect();
    let sign = permutation_sign(&perm);
    if sign == 0 {
        return zero();
    }
    let minor: Vec<Vec<Complex64>> = partials
        .iter()
        .map(|row| complement.iter().map(|&c| row[c]).collect())
        .collect();
    crate::brackets::determinant(minor) * f64::from(sign)
}

fn homogeneous(partials: &[Vec<Complex64>], rows: &[usize], arbitrary: &[usize], m: usize) -> Complex64 {
    let mut total = zero();
    for t in combinations(m, rows.len()) {
        if t.iter().any(|i| arbitrary.contains(i)) {
            continue;
        }
        let minor: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|&r| t.iter().map(|&c| partials[r][c]).collect())
            .collect();
        let tuple: Vec<usize> = t.iter().chain(arbitrary).copied().collect();
        total += crate::brackets::determinant(minor) * normalization(partials, &tuple, m);
    }
    total
}

/// `(rows, arbitrary)` pairs of the homogeneous system: every choice of
/// arbitrary constants when `s <= width`, otherwise every choice of
/// `width` rows.
pub(crate) fn homogeneous_cases(s: usize, m: usize, width: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    if s <= width {
        combinations(m, width - s)
            .into_iter()
            .map(|a| ((0..s).collect(), a))
            .collect()
    } else {
        combinations(s, width).into_iter().map(|r| (r, Vec::new())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_cases_cover_both_regimes() {
        assert_eq!(homogeneous_cases(2, 5, 3).len(), 5);
        assert_eq!(homogeneous_cases(3, 6, 3), vec![(vec![0, 1, 2], vec![])]);
        assert_eq!(homogeneous_cases(4, 7, 3).len(), 4);
    }

    #[test]
    fn normalization_of_repeated_tuple_is_zero() {
        let partials = vec![vec![Complex64::new(1.0, 0.0); 3]];
        assert_eq!(normalization(&partials, &[0, 0], 3), zero());
    }

    #[test]
    fn selector_parsing() {
        assert_eq!(Selector::parse("all").unwrap(), Selector::All);
        assert!(matches!(Selector::parse("kepler-coulomb").unwrap(), Selector::Builtin(_)));
        assert!(matches!(Selector::parse("no-such-thing"), Err(HarnessError::UnknownSystem(_))));
    }

    #[test]
    fn record_tolerance_never_tightens() {
        let spec = CheckSpec {
            name: "x".into(),
            kind: CheckKind::Final,
            target: Target::Skipped { reason: "test".into() },
            provenance: Provenance::Trivial,
            rtol: Some(1e-7),
        };
        let rec = Outcome::residual(1, 5e-8).into_record(&spec, &Tolerance::default());
        assert_eq!(rec.tolerance, 1e-7);
        assert!(rec.pass);
        assert_eq!(rec.note.as_deref(), Some("skipped: test"));
    }
}
