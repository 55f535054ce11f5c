//! Bracket properties checked on random polynomials rather than on a
//! catalog system.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CheckKind, CheckSpec, Outcome, Provenance, StructuralCheck, Target, Worst, FUNDAMENTAL_IDENTITY_RTOL};
use crate::brackets::{decomposed_bracket, nambu, poisson, Observable, PhaseSpace};
use crate::expr::{Binding, Expr, Polynomial};
use crate::numeric::scaled_residual;

/// Polynomial sets drawn per check; points are split between them.
const DRAWS: usize = 4;

pub(super) fn specs() -> Vec<CheckSpec> {
    let spec = |name: &str, kind, check, provenance, rtol| CheckSpec {
        name: format!("structural/{name}"),
        kind,
        target: Target::Structural(check),
        provenance,
        rtol,
    };
    vec![
        spec(
            "fi-n3",
            CheckKind::FiN3,
            StructuralCheck::FundamentalIdentity,
            Provenance::Derived,
            Some(FUNDAMENTAL_IDENTITY_RTOL),
        ),
        spec(
            "decomposition-n2",
            CheckKind::Decomposition,
            StructuralCheck::Decomposition { dof: 2 },
            Provenance::Derived,
            None,
        ),
        spec(
            "decomposition-n3",
            CheckKind::Decomposition,
            StructuralCheck::Decomposition { dof: 3 },
            Provenance::Derived,
            None,
        ),
        spec("antisymmetry", CheckKind::Antisymmetry, StructuralCheck::Antisymmetry, Provenance::Trivial, None),
        spec("poisson-self", CheckKind::Antisymmetry, StructuralCheck::PoissonSelf, Provenance::Trivial, None),
        spec("leibniz", CheckKind::Leibniz, StructuralCheck::Leibniz, Provenance::Trivial, None),
    ]
}

/// Random polynomial with `terms` terms of total degree at most `degree`
/// and coefficients in [-1, 1].
pub fn random_polynomial(rng: &mut impl Rng, vars: &[String], degree: u32, terms: usize) -> Polynomial {
    let mut p = Polynomial::zero();
    for _ in 0..terms {
        let total = rng.gen_range(0..=degree);
        let mut mono = Polynomial::constant(Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
        for _ in 0..total {
            let v = &vars[rng.gen_range(0..vars.len())];
            mono = mono.times(&Polynomial::var(v));
        }
        p = p.plus(&mono);
    }
    p
}

fn eval_poly(p: &Polynomial, b: &Binding) -> Complex64 {
    p.partial_eval(b).as_constant().unwrap_or(Complex64::new(f64::NAN, 0.0))
}

fn jacobian3(f: &Polynomial, g: &Polynomial, h: &Polynomial, vars: &[String]) -> Polynomial {
    let d = |p: &Polynomial| -> Vec<Polynomial> { vars.iter().map(|v| p.derivative(v)).collect() };
    let (a, b, c) = (d(f), d(g), d(h));
    let minor = |i: usize, j: usize| b[i].times(&c[j]).minus(&b[j].times(&c[i]));
    a[0].times(&minor(1, 2))
        .minus(&a[1].times(&minor(0, 2)))
        .plus(&a[2].times(&minor(0, 1)))
}

fn random_point(rng: &mut impl Rng, vars: &[String]) -> Binding {
    vars.iter().map(|v| (v.clone(), rng.gen_range(-1.0..1.0))).collect()
}

fn observables(ps: &PhaseSpace, polys: &[Polynomial]) -> Vec<Observable> {
    polys
        .iter()
        .enumerate()
        .map(|(i, p)| Observable::new(format!("g{i}"), p.to_expr(), ps))
        .collect()
}

pub(super) fn run(check: &StructuralCheck, seed: u64, samples: usize) -> Outcome {
    let salt = match check {
        StructuralCheck::FundamentalIdentity => 1,
        StructuralCheck::Decomposition { dof } => 10 + *dof as u64,
        StructuralCheck::Antisymmetry => 2,
        StructuralCheck::PoissonSelf => 3,
        StructuralCheck::Leibniz => 4,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt);
    let samples = samples.max(1);
    let per_draw = samples.div_ceil(DRAWS);
    let mut worst = Worst::default();
    let mut done = 0;
    let result: Result<(), String> = (|| {
        while done < samples {
            let n = per_draw.min(samples - done);
            match check {
                StructuralCheck::FundamentalIdentity => fundamental_identity(&mut rng, n, &mut worst),
                StructuralCheck::Decomposition { dof } => decomposition(&mut rng, *dof, n, &mut worst)?,
                StructuralCheck::Antisymmetry => antisymmetry(&mut rng, n, &mut worst)?,
                StructuralCheck::PoissonSelf => poisson_self(&mut rng, n, &mut worst)?,
                StructuralCheck::Leibniz => leibniz(&mut rng, n, &mut worst)?,
            }
            done += n;
        }
        Ok(())
    })();
    match result {
        Ok(()) => Outcome::residual(samples, worst.get()),
        Err(e) => Outcome::error(samples, e),
    }
}

fn fundamental_identity(rng: &mut ChaCha8Rng, points: usize, worst: &mut Worst) {
    let vars: Vec<String> = (1..=3).map(|i| format!("x{i}")).collect();
    let mut draw = || random_polynomial(rng, &vars, 3, 6);
    let (f1, f2) = (draw(), draw());
    let (g1, g2, g3) = (draw(), draw(), draw());
    let j = |a: &Polynomial, b: &Polynomial, c: &Polynomial| jacobian3(a, b, c, &vars);
    let lhs = j(&f1, &f2, &j(&g1, &g2, &g3));
    let rhs = j(&j(&f1, &f2, &g1), &g2, &g3)
        .plus(&j(&g1, &j(&f1, &f2, &g2), &g3))
        .plus(&j(&g1, &g2, &j(&f1, &f2, &g3)));
    for _ in 0..points {
        let b = random_point(rng, &vars);
        worst.add(scaled_residual(eval_poly(&lhs, &b), eval_poly(&rhs, &b)));
    }
}

fn decomposition(rng: &mut ChaCha8Rng, dof: usize, points: usize, worst: &mut Worst) -> Result<(), String> {
    let ps = PhaseSpace::new(dof).map_err(|e| e.to_string())?;
    let vars = ps.coordinates().to_vec();
    let polys: Vec<Polynomial> = (0..ps.dim()).map(|_| random_polynomial(rng, &vars, 2, 5)).collect();
    let obs = observables(&ps, &polys);
    for _ in 0..points {
        let b = random_point(rng, &vars);
        let lhs = decomposed_bracket(&obs, &b, &ps).map_err(|e| e.to_string())?;
        let rhs = nambu(&obs, &b, &ps).map_err(|e| e.to_string())?;
        worst.add(scaled_residual(lhs, rhs));
    }
    Ok(())
}

fn antisymmetry(rng: &mut ChaCha8Rng, points: usize, worst: &mut Worst) -> Result<(), String> {
    let ps = PhaseSpace::new(2).map_err(|e| e.to_string())?;
    let vars = ps.coordinates().to_vec();
    let polys: Vec<Polynomial> = (0..ps.dim()).map(|_| random_polynomial(rng, &vars, 3, 5)).collect();
    let obs = observables(&ps, &polys);
    for _ in 0..points {
        let b = random_point(rng, &vars);
        let base = nambu(&obs, &b, &ps).map_err(|e| e.to_string())?;
        for i in 0..obs.len() {
            for j in i + 1..obs.len() {
                let mut swapped = obs.clone();
                swapped.swap(i, j);
                let v = nambu(&swapped, &b, &ps).map_err(|e| e.to_string())?;
                worst.add(scaled_residual(v, -base));
            }
        }
    }
    Ok(())
}

fn poisson_self(rng: &mut ChaCha8Rng, points: usize, worst: &mut Worst) -> Result<(), String> {
    let ps = PhaseSpace::new(2).map_err(|e| e.to_string())?;
    let vars = ps.coordinates().to_vec();
    let f = Observable::new("f", random_polynomial(rng, &vars, 3, 6).to_expr(), &ps);
    for _ in 0..points {
        let b = random_point(rng, &vars);
        worst.add(poisson(&f, &f, &b, &ps).map_err(|e| e.to_string())?.norm());
    }
    Ok(())
}

fn leibniz(rng: &mut ChaCha8Rng, points: usize, worst: &mut Worst) -> Result<(), String> {
    let ps = PhaseSpace::new(2).map_err(|e| e.to_string())?;
    let vars = ps.coordinates().to_vec();
    let mut draw = || random_polynomial(rng, &vars, 2, 4).to_expr();
    let (f, g) = (draw(), draw());
    let rest: Vec<Observable> = (0..ps.dim() - 1)
        .map(|i| Observable::new(format!("r{i}"), draw(), &ps))
        .collect();
    let with = |head: Expr| -> Vec<Observable> {
        std::iter::once(Observable::new("h", head, &ps)).chain(rest.iter().cloned()).collect()
    };
    let fg = with(Expr::mul(vec![f.clone(), g.clone()]));
    let (fo, go) = (with(f.clone()), with(g.clone()));
    for _ in 0..points {
        let b = random_point(rng, &vars);
        let ev = |e: &Expr| e.evaluate(&b).map_err(|e| e.to_string());
        let br = |o: &[Observable]| nambu(o, &b, &ps).map_err(|e| e.to_string());
        let lhs = br(&fg)?;
        let rhs = ev(&f)? * br(&go)? + ev(&g)? * br(&fo)?;
        worst.add(scaled_residual(lhs, rhs));
    }
    Ok(())
}
