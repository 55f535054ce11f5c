//! Evaluating one bracket at one point, with whatever predictions apply.

use num_complex::Complex64;

use super::{normalization, registry, HarnessError, Provenance, Target};
use crate::brackets::{nambu, poisson_from_gradients, Observable};
use crate::constraints::IndexSelection;
use crate::expr::Binding;
use crate::numeric::scaled_residual;
use crate::systems::MotionSystem;

#[derive(Debug, Clone, PartialEq)]
pub enum PointSource {
    /// First guarded sample drawn with this seed.
    Seed(u64),
    /// Every phase coordinate given explicitly.
    Explicit(Vec<(String, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: String,
    /// Coefficient of `df/dt`.
    pub normalization: Complex64,
    pub value: Complex64,
    pub residual: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BracketOutcome {
    pub args: Vec<String>,
    pub point: Vec<(String, f64)>,
    pub value: Complex64,
    /// `{f, H}` when the first argument is the only non-constant.
    pub time_derivative: Option<Complex64>,
    pub predictions: Vec<Prediction>,
}

enum Arg {
    Coordinate(usize),
    Constant(usize),
}

fn resolve(sys: &MotionSystem, name: &str) -> Result<Arg, HarnessError> {
    let ps = sys.phase_space();
    let coord = |n: &str| ps.index_of(n).map(Arg::Coordinate);
    if let Some(c) = name.strip_prefix("f:") {
        return coord(c).ok_or_else(|| HarnessError::Bracket(format!("`{c}` is not a phase coordinate")));
    }
    coord(name)
        .or_else(|| sys.family().index_of(name).map(Arg::Constant))
        .ok_or_else(|| HarnessError::Bracket(format!("unknown bracket argument `{name}`")))
}

fn point_of(sys: &MotionSystem, source: &PointSource) -> Result<(Vec<(String, f64)>, Binding), HarnessError> {
    let ps = sys.phase_space();
    let values: Vec<f64> = match source {
        PointSource::Seed(seed) => {
            let pt = sys.sample(*seed, 1)?.remove(0);
            ps.coordinates()
                .iter()
                .map(|c| pt.point.get(c).map_or(0.0, |v| v.re))
                .collect()
        }
        PointSource::Explicit(given) => {
            for (name, _) in given {
                if ps.index_of(name).is_none() {
                    return Err(HarnessError::Bracket(format!("`{name}` is not a phase coordinate")));
                }
            }
            ps.coordinates()
                .iter()
                .map(|c| {
                    given
                        .iter()
                        .find(|(n, _)| n == c)
                        .map(|(_, v)| *v)
                        .ok_or_else(|| HarnessError::Bracket(format!("no value given for `{c}`")))
                })
                .collect::<Result<_, _>>()?
        }
    };
    let listing = ps.coordinates().iter().cloned().zip(values.iter().copied()).collect();
    Ok((listing, sys.point(&values)))
}

/// Evaluates the Nambu bracket of `args` (2n names: coordinates, `f:`-prefixed
/// coordinates, or constants).
pub fn eval_bracket(sys: &MotionSystem, args: &[String], source: &PointSource) -> Result<BracketOutcome, HarnessError> {
    let ps = sys.phase_space();
    if args.len() != ps.dim() {
        return Err(HarnessError::Bracket(format!(
            "a bracket on this system takes {} arguments, got {}",
            ps.dim(),
            args.len()
        )));
    }
    let resolved = args.iter().map(|a| resolve(sys, a)).collect::<Result<Vec<_>, _>>()?;
    let (listing, point) = point_of(sys, source)?;
    let members = sys.family().members();
    let observables: Vec<Observable> = resolved
        .iter()
        .map(|a| match a {
            Arg::Coordinate(k) => Observable::coordinate(ps, &ps.coordinates()[*k]),
            Arg::Constant(i) => members[*i].clone(),
        })
        .collect();
    let value = nambu(&observables, &point, ps).map_err(|e| HarnessError::Bracket(e.to_string()))?;
    let mut out = BracketOutcome {
        args: args.to_vec(),
        point: listing,
        value,
        time_derivative: None,
        predictions: Vec::new(),
    };

    let tail: Option<Vec<usize>> = resolved[1..]
        .iter()
        .map(|a| match a {
            Arg::Constant(i) => Some(*i),
            Arg::Coordinate(_) => None,
        })
        .collect();
    let (Arg::Coordinate(_), Some(tail)) = (&resolved[0], tail) else {
        return Ok(out);
    };
    let bracket_err = |e: crate::expr::EvalError| HarnessError::Bracket(e.to_string());
    let f_grad = observables[0].gradient_at(&point).map_err(bracket_err)?;
    let h_grad = sys.family().hamiltonian().gradient_at(&point).map_err(bracket_err)?;
    let fdot = poisson_from_gradients(&f_grad, &h_grad);
    out.time_derivative = Some(fdot);

    let mut sorted = tail.clone();
    sorted.sort_unstable();
    let perm: Vec<i64> = tail.iter().map(|&i| i as i64).collect();
    let sign = f64::from(crate::brackets::permutation_sign(&perm));
    let c_values = sys.constants_at(&point).map_err(bracket_err)?;
    let m = sys.m();
    for cs in sys.constraint_sets() {
        let partials = cs.partials_at(&c_values).map_err(bracket_err)?;
        let n = normalization(&partials, &sorted, m) * sign;
        out.predictions.push(Prediction {
            label: format!("constraint set `{}`", cs.label()),
            normalization: n,
            value: n * fdot,
            residual: scaled_residual(value, n * fdot),
            provenance: Provenance::Derived,
        });
    }
    if IndexSelection::new(sorted.clone(), m).is_ok() {
        for spec in registry(sys, None) {
            if let Target::Final { selection, expected: Some(e), set } = &spec.target {
                if *selection == sorted {
                    let n = e.evaluate(&c_values).map_err(bracket_err)? * sign;
                    out.predictions.push(Prediction {
                        label: format!("registered {} ({set}): {e}", spec.name),
                        normalization: n,
                        value: n * fdot,
                        residual: scaled_residual(value, n * fdot),
                        provenance: spec.provenance,
                    });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::builtin;

    fn args(s: &str) -> Vec<String> {
        s.split(',').map(str::to_string).collect()
    }

    #[test]
    fn coordinates_give_one() {
        let sys = builtin("harmonic-oscillator").unwrap();
        let out = eval_bracket(&sys, &args("q1,p1,q2,p2"), &PointSource::Seed(3)).unwrap();
        assert!((out.value - 1.0).norm() < 1e-14);
        assert!(out.time_derivative.is_none());
    }

    #[test]
    fn predictions_follow_argument_order() {
        let sys = builtin("harmonic-oscillator").unwrap();
        for a in ["f:q1,C1,C2,C4", "f:q1,C2,C1,C4"] {
            let out = eval_bracket(&sys, &args(a), &PointSource::Seed(5)).unwrap();
            assert!(!out.predictions.is_empty());
            for p in &out.predictions {
                assert!(p.residual < 1e-10, "{a}: {p:?}");
            }
        }
    }

    #[test]
    fn arity_and_names_are_checked() {
        let sys = builtin("harmonic-oscillator").unwrap();
        assert!(eval_bracket(&sys, &args("q1,p1"), &PointSource::Seed(1)).is_err());
        assert!(eval_bracket(&sys, &args("q1,p1,q2,Z"), &PointSource::Seed(1)).is_err());
        let partial = PointSource::Explicit(vec![("q1".into(), 0.5)]);
        assert!(eval_bracket(&sys, &args("q1,p1,q2,p2"), &partial).is_err());
    }
}
