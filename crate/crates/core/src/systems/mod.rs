//! Mechanical systems: phase space, parameters, constants of motion,
//! constraint sets, and guarded random sampling of phase points.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::brackets::{BracketError, Observable, PhaseSpace};
use crate::constraints::{ConstantFamily, ConstraintSet};
use crate::expr::{Binding, EvalError, Expr, IMAGINARY_UNIT};

mod catalog;
mod loader;

pub use catalog::{builtin, definition, BUILTIN_NAMES, HEADLINE_SYSTEMS};
pub use loader::{load, LoadError};

pub const DEFAULT_BOX: (f64, f64) = (-2.0, 2.0);
pub const DEFAULT_GUARD_BOUND: f64 = 0.1;
pub const MAX_REJECTIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SystemError {
    #[error("unknown system `{0}`")]
    UnknownSystem(String),
    #[error("system `{0}` has no hamiltonian")]
    MissingHamiltonian(String),
    #[error("system `{0}` does not declare its degrees of freedom")]
    MissingDof(String),
    #[error(transparent)]
    Bracket(#[from] BracketError),
    #[error("{item} uses undeclared symbol `{symbol}`")]
    UndeclaredSymbol { item: String, symbol: String },
    #[error("constraint `{constraint}` refers to phase coordinate `{coordinate}`; constraints must be written over constants")]
    CoordinateInConstraint { constraint: String, coordinate: String },
    #[error("name `{0}` is declared twice or collides with a coordinate")]
    NameCollision(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("box for unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("empty box [{lo}, {hi}] for `{coordinate}`")]
    EmptyBox { coordinate: String, lo: f64, hi: f64 },
    #[error("sampling `{system}` exhausted {rejections} rejections for one point; guards too tight")]
    SamplingExhausted { system: String, rejections: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Sampling-time lower bound on `|expr|`.
#[derive(Debug, Clone)]
pub struct Guard {
    pub expr: Expr,
    pub bound: f64,
}

/// Raw system definition, validated by [`SystemDefinition::build`].
#[derive(Debug, Clone, Default)]
pub struct SystemDefinition {
    pub name: String,
    pub dof: Option<usize>,
    pub params: Vec<(String, f64)>,
    pub hamiltonian: Option<Expr>,
    pub constants: Vec<(String, Expr)>,
    pub constraint_sets: Vec<(String, Vec<(String, Expr)>)>,
    pub guards: Vec<(Expr, f64)>,
    pub boxes: Vec<(String, f64, f64)>,
}

impl SystemDefinition {
    pub fn build(self) -> Result<MotionSystem, SystemError> {
        let name = self.name;
        let dof = self.dof.ok_or_else(|| SystemError::MissingDof(name.clone()))?;
        let ps = PhaseSpace::new(dof)?;
        let coords: BTreeSet<String> = ps.coordinates().iter().cloned().collect();

        let mut declared: BTreeSet<String> = coords.clone();
        declared.insert(IMAGINARY_UNIT.to_string());
        let mut params = BTreeMap::new();
        for (p, v) in &self.params {
            if !declared.insert(p.clone()) {
                return Err(SystemError::NameCollision(p.clone()));
            }
            params.insert(p.clone(), *v);
        }
        let phase_symbols: BTreeSet<String> = coords.iter().chain(params.keys()).cloned().collect();
        let check = |item: String, e: &Expr, allowed: &BTreeSet<String>| {
            match e.free_variables().into_iter().find(|v| !allowed.contains(v)) {
                Some(symbol) => Err(SystemError::UndeclaredSymbol { item, symbol }),
                None => Ok(()),
            }
        };

        let mut members = Vec::with_capacity(self.constants.len());
        for (c, body) in &self.constants {
            if !declared.insert(c.clone()) {
                return Err(SystemError::NameCollision(c.clone()));
            }
            check(format!("constant `{c}`"), body, &phase_symbols)?;
            members.push(Observable::new(c.clone(), body.clone(), &ps));
        }

        let h_expr = self
            .hamiltonian
            .ok_or_else(|| SystemError::MissingHamiltonian(name.clone()))?;
        let (h_body, h_index) = match h_expr.as_var().and_then(|v| {
            self.constants.iter().position(|(c, _)| c == v)
        }) {
            Some(idx) => (self.constants[idx].1.clone(), Some(idx)),
            None => {
                check("hamiltonian".to_string(), &h_expr, &phase_symbols)?;
                let idx = self.constants.iter().position(|(_, b)| *b == h_expr);
                (h_expr, idx)
            }
        };
        let hamiltonian = Observable::new("H", h_body, &ps);
        let family = ConstantFamily::new(members, hamiltonian, h_index);

        let symbols: Vec<String> = self.constants.iter().map(|(c, _)| c.clone()).collect();
        let constraint_symbols: BTreeSet<String> =
            symbols.iter().chain(params.keys()).cloned().collect();
        let mut constraint_sets = Vec::with_capacity(self.constraint_sets.len());
        for (label, functionals) in self.constraint_sets {
            for (fname, f) in &functionals {
                for v in f.free_variables() {
                    if coords.contains(&v) {
                        return Err(SystemError::CoordinateInConstraint {
                            constraint: fname.clone(),
                            coordinate: v,
                        });
                    }
                }
                check(format!("constraint `{fname}`"), f, &constraint_symbols)?;
            }
            constraint_sets.push(ConstraintSet::new(label, functionals, symbols.clone()));
        }

        let mut guards = Vec::with_capacity(self.guards.len());
        for (g, bound) in self.guards {
            check(format!("guard `{g}`"), &g, &phase_symbols)?;
            guards.push(Guard { expr: g, bound });
        }

        let mut boxes = vec![DEFAULT_BOX; ps.dim()];
        for (c, lo, hi) in self.boxes {
            let idx = ps
                .index_of(&c)
                .ok_or_else(|| SystemError::UnknownCoordinate(c.clone()))?;
            if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
                return Err(SystemError::EmptyBox { coordinate: c, lo, hi });
            }
            boxes[idx] = (lo, hi);
        }

        Ok(MotionSystem {
            name,
            phase_space: ps,
            params,
            family,
            constraint_sets,
            guards,
            boxes,
        })
    }
}

#[derive(Debug, Clone)]
pub struct MotionSystem {
    name: String,
    phase_space: PhaseSpace,
    params: BTreeMap<String, f64>,
    family: ConstantFamily,
    constraint_sets: Vec<ConstraintSet>,
    guards: Vec<Guard>,
    boxes: Vec<(f64, f64)>,
}

/// A guarded phase point with the constant values derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePoint {
    /// Coordinates and parameters.
    pub point: Binding,
    /// Constant values on top of `point`.
    pub constants: Binding,
}

impl MotionSystem {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn phase_space(&self) -> &PhaseSpace {
        &self.phase_space
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn family(&self) -> &ConstantFamily {
        &self.family
    }

    pub fn constraint_sets(&self) -> &[ConstraintSet] {
        &self.constraint_sets
    }

    pub fn constraint_set(&self, label: &str) -> Option<&ConstraintSet> {
        self.constraint_sets.iter().find(|c| c.label() == label)
    }

    pub fn guards(&self) -> &[Guard] {
        &self.guards
    }

    pub fn boxes(&self) -> &[(f64, f64)] {
        &self.boxes
    }

    /// Number of constants m.
    pub fn m(&self) -> usize {
        self.family.len()
    }

    pub fn n(&self) -> usize {
        self.phase_space.dof()
    }

    /// Number of constraint functionals m - (2n - 1).
    pub fn s(&self) -> isize {
        self.m() as isize - (2 * self.n() as isize - 1)
    }

    /// Overrides parameter values.
    pub fn with_params(mut self, overrides: &[(String, f64)]) -> Result<Self, SystemError> {
        for (name, value) in overrides {
            match self.params.get_mut(name) {
                Some(slot) => *slot = *value,
                None => return Err(SystemError::UnknownParameter(name.clone())),
            }
        }
        Ok(self)
    }

    /// Binding of the parameters alone.
    pub fn param_binding(&self) -> Binding {
        self.params.iter().map(|(k, v)| (k.clone(), *v)).collect()
    }

    /// Coordinates from `values` (canonical order) plus parameters.
    pub fn point(&self, values: &[f64]) -> Binding {
        let mut b = self.phase_space.binding(values);
        b.extend(&self.param_binding());
        b
    }

    pub fn constants_at(&self, point: &Binding) -> Result<Binding, EvalError> {
        self.family.constants_at(point)
    }

    fn passes_guards(&self, point: &Binding) -> bool {
        self.guards.iter().all(|g| match g.expr.evaluate(point) {
            Ok(v) => v.norm() >= g.bound,
            Err(_) => false,
        })
    }

    /// Draws `count` guarded points; deterministic in `seed`.
    pub fn sample(&self, seed: u64, count: usize) -> Result<Vec<SamplePoint>, SystemError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let mut values = vec![0.0; self.phase_space.dim()];
        for _ in 0..count {
            let mut rejections = 0;
            loop {
                for (v, (lo, hi)) in values.iter_mut().zip(&self.boxes) {
                    *v = rng.gen_range(*lo..*hi);
                }
                let point = self.point(&values);
                if self.passes_guards(&point) {
                    if let Ok(constants) = self.constants_at(&point) {
                        if constants.iter().all(|(_, c): (&str, Complex64)| c.is_finite()) {
                            out.push(SamplePoint { point, constants });
                            break;
                        }
                    }
                }
                rejections += 1;
                if rejections >= MAX_REJECTIONS {
                    return Err(SystemError::SamplingExhausted {
                        system: self.name.clone(),
                        rejections,
                    });
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn e(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn minimal() -> SystemDefinition {
        SystemDefinition {
            name: "toy".into(),
            dof: Some(1),
            params: vec![("w".into(), 2.0)],
            hamiltonian: Some(e("p1^2/2 + w*q1^2/2")),
            constants: vec![("E".into(), e("p1^2/2 + w*q1^2/2"))],
            constraint_sets: vec![],
            guards: vec![(e("q1"), 0.5)],
            boxes: vec![("q1".into(), -1.0, 1.0)],
        }
    }

    #[test]
    fn hamiltonian_detected_inside_family() {
        let sys = minimal().build().unwrap();
        assert_eq!(sys.family().hamiltonian_index(), Some(0));
        assert_eq!(sys.s(), 0);
    }

    #[test]
    fn guards_and_boxes_are_respected() {
        let sys = minimal().build().unwrap();
        for pt in sys.sample(3, 200).unwrap() {
            let q = pt.point.get("q1").unwrap().re;
            assert!(q.abs() >= 0.5 && (-1.0..1.0).contains(&q));
            assert_eq!(pt.point.get("w"), Some(Complex64::new(2.0, 0.0)));
        }
    }

    #[test]
    fn impossible_guard_exhausts() {
        let mut def = minimal();
        def.guards = vec![(e("q1"), 5.0)];
        let sys = def.build().unwrap();
        assert!(matches!(sys.sample(1, 1), Err(SystemError::SamplingExhausted { .. })));
    }

    #[test]
    fn validation_errors() {
        let mut d = minimal();
        d.hamiltonian = None;
        assert!(matches!(d.build(), Err(SystemError::MissingHamiltonian(_))));

        let mut d = minimal();
        d.constants.push(("G".into(), e("q1*z")));
        assert!(matches!(d.build(), Err(SystemError::UndeclaredSymbol { .. })));

        let mut d = minimal();
        d.constraint_sets = vec![("s".into(), vec![("F1".into(), e("E - q1"))])];
        assert!(matches!(d.build(), Err(SystemError::CoordinateInConstraint { .. })));

        let mut d = minimal();
        d.constants.push(("q1".into(), e("p1")));
        assert!(matches!(d.build(), Err(SystemError::NameCollision(_))));

        let mut d = minimal();
        d.boxes.push(("q9".into(), 0.0, 1.0));
        assert!(matches!(d.build(), Err(SystemError::UnknownCoordinate(_))));

        assert!(matches!(
            minimal().build().unwrap().with_params(&[("nope".into(), 1.0)]),
            Err(SystemError::UnknownParameter(_))
        ));
    }
}
