use nambu_core::brackets::{decomposed_bracket, nambu, permutation_sign, poisson};
use nambu_core::constraints::{partial_mismatch, reconstruct_constraint, tuple_normalization};
use nambu_core::expr::Polynomial;
use nambu_core::{builtin, parse, scaled_residual, Binding, Expr, Observable, PhaseSpace};
use num_complex::Complex64;
use proptest::prelude::*;

const VARS: [&str; 3] = ["x", "y", "z"];

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0..VARS.len()).prop_map(|i| Expr::var(VARS[i])),
        (-2.0..2.0f64).prop_map(Expr::real),
    ];
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            // denominators stay away from zero on real points
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| a / (Expr::real(2.0) + Expr::pow(b, 2))),
            (inner.clone(), 0..4i32).prop_map(|(a, k)| Expr::pow(a, k)),
            inner.clone().prop_map(|a| -a),
            inner.prop_map(|a| Expr::sqrt(Expr::one() + Expr::pow(a, 2))),
        ]
    })
}

fn arb_point() -> impl Strategy<Value = [f64; 3]> {
    [-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64]
}

fn bind(pt: &[f64; 3]) -> Binding {
    VARS.iter().zip(pt).map(|(v, x)| (*v, *x)).collect()
}

/// Polynomial with up to `terms` monomials, each exponent at most `deg`.
fn arb_poly(vars: Vec<String>, deg: u32, terms: usize) -> impl Strategy<Value = Polynomial> {
    let n = vars.len();
    prop::collection::vec((-1.0..1.0f64, prop::collection::vec(0..=deg, n)), 1..=terms).prop_map(
        move |monos| {
            monos.iter().fold(Polynomial::zero(), |acc, (c, exps)| {
                let m = vars
                    .iter()
                    .zip(exps)
                    .fold(Polynomial::constant(Complex64::new(*c, 0.0)), |m, (v, e)| {
                        m.times(&Polynomial::var(v).powi(*e))
                    });
                acc.plus(&m)
            })
        },
    )
}

fn observables(ps: &PhaseSpace, polys: &[Polynomial]) -> Vec<Observable> {
    polys
        .iter()
        .enumerate()
        .map(|(i, p)| Observable::new(format!("g{i}"), p.to_expr(), ps))
        .collect()
}

fn phase_point(ps: &PhaseSpace, values: &[f64]) -> Binding {
    ps.binding(values)
}

fn arb_observables(dof: usize, deg: u32) -> impl Strategy<Value = (PhaseSpace, Vec<Observable>, Vec<f64>)> {
    let ps = PhaseSpace::new(dof).unwrap();
    let vars = ps.coordinates().to_vec();
    let dim = ps.dim();
    (
        prop::collection::vec(arb_poly(vars, deg, 4), dim),
        prop::collection::vec(-1.0..1.0f64, dim),
    )
        .prop_map(move |(polys, pt)| (ps.clone(), observables(&ps, &polys), pt))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivative_matches_central_difference(e in arb_expr(), pt in arb_point(), k in 0..3usize) {
        let h = 1e-5;
        let at = |dx: f64| {
            let mut p = pt;
            p[k] += dx;
            e.evaluate(&bind(&p)).unwrap()
        };
        let fd = (at(h) - at(-h)) / (2.0 * h);
        let exact = e.diff(VARS[k]).evaluate(&bind(&pt)).unwrap();
        let scale = 1.0 + at(0.0).norm() + exact.norm();
        prop_assert!((exact - fd).norm() <= 1e-5 * scale, "{e}: {exact} vs {fd}");
    }

    #[test]
    fn mixed_partials_commute(e in arb_expr(), pt in arb_point()) {
        let b = bind(&pt);
        let xy = e.diff("x").diff("y").evaluate(&b).unwrap();
        let yx = e.diff("y").diff("x").evaluate(&b).unwrap();
        prop_assert!(scaled_residual(xy, yx) <= 1e-9, "{e}");
    }

    #[test]
    fn display_parses_back_to_the_same_function(e in arb_expr(), pt in arb_point()) {
        let text = e.to_string();
        let back = parse(&text).unwrap();
        let b = bind(&pt);
        let r = scaled_residual(e.evaluate(&b).unwrap(), back.evaluate(&b).unwrap());
        prop_assert!(r <= 1e-12, "{text}");
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn polynomial_expr_round_trip(p in arb_poly(VARS.iter().map(|v| v.to_string()).collect(), 3, 6)) {
        let back = Polynomial::from_expr(&p.to_expr()).unwrap();
        prop_assert!(back.max_coeff_diff(&p) <= 1e-12);
    }

    #[test]
    fn nambu_is_antisymmetric((ps, obs, pt) in arb_observables(2, 2), i in 0..4usize, j in 0..4usize) {
        prop_assume!(i != j);
        let b = phase_point(&ps, &pt);
        let base = nambu(&obs, &b, &ps).unwrap();
        let mut swapped = obs.clone();
        swapped.swap(i, j);
        let v = nambu(&swapped, &b, &ps).unwrap();
        prop_assert!(scaled_residual(v, -base) <= 1e-12);
        // a repeated argument gives zero
        let mut repeated = obs.clone();
        repeated[j] = obs[i].clone();
        prop_assert!(nambu(&repeated, &b, &ps).unwrap().norm() <= 1e-12 * (1.0 + base.norm()));
    }

    #[test]
    fn nambu_obeys_leibniz((ps, obs, pt) in arb_observables(2, 2), g in arb_poly(
        (1..=2).flat_map(|i| [format!("q{i}"), format!("p{i}")]).collect(), 2, 3)) {
        let b = phase_point(&ps, &pt);
        let g = Observable::new("g", g.to_expr(), &ps);
        let f = &obs[0];
        let fg = Observable::new("fg", f.body().clone() * g.body().clone(), &ps);
        let with = |head: &Observable| -> Vec<Observable> {
            std::iter::once(head.clone()).chain(obs[1..].iter().cloned()).collect()
        };
        let lhs = nambu(&with(&fg), &b, &ps).unwrap();
        let rhs = f.value_at(&b).unwrap() * nambu(&with(&g), &b, &ps).unwrap()
            + g.value_at(&b).unwrap() * nambu(&with(f), &b, &ps).unwrap();
        prop_assert!(scaled_residual(lhs, rhs) <= 1e-10);
    }

    #[test]
    fn poisson_of_a_function_with_itself_vanishes((ps, obs, pt) in arb_observables(2, 3)) {
        let b = phase_point(&ps, &pt);
        prop_assert!(poisson(&obs[0], &obs[0], &b, &ps).unwrap().norm() <= 1e-12);
    }

    #[test]
    fn decomposition_equals_jacobian_n2((ps, obs, pt) in arb_observables(2, 2)) {
        let b = phase_point(&ps, &pt);
        let r = scaled_residual(decomposed_bracket(&obs, &b, &ps).unwrap(), nambu(&obs, &b, &ps).unwrap());
        prop_assert!(r <= 1e-10);
    }

    #[test]
    fn decomposition_equals_jacobian_n3((ps, obs, pt) in arb_observables(3, 2)) {
        let b = phase_point(&ps, &pt);
        let r = scaled_residual(decomposed_bracket(&obs, &b, &ps).unwrap(), nambu(&obs, &b, &ps).unwrap());
        prop_assert!(r <= 1e-10);
    }

    #[test]
    fn fundamental_identity_n3(
        fs in prop::collection::vec(arb_poly(VARS.iter().map(|v| v.to_string()).collect(), 2, 4), 5),
        pt in arb_point(),
    ) {
        let vars: Vec<String> = VARS.iter().map(|v| v.to_string()).collect();
        let j = |a: &Polynomial, b: &Polynomial, c: &Polynomial| {
            let d = |p: &Polynomial| -> Vec<Polynomial> { vars.iter().map(|v| p.derivative(v)).collect() };
            let (a, b, c) = (d(a), d(b), d(c));
            let minor = |i: usize, k: usize| b[i].times(&c[k]).minus(&b[k].times(&c[i]));
            a[0].times(&minor(1, 2)).minus(&a[1].times(&minor(0, 2))).plus(&a[2].times(&minor(0, 1)))
        };
        let (f1, f2, g1, g2, g3) = (&fs[0], &fs[1], &fs[2], &fs[3], &fs[4]);
        let lhs = j(f1, f2, &j(g1, g2, g3));
        let rhs = j(&j(f1, f2, g1), g2, g3)
            .plus(&j(g1, &j(f1, f2, g2), g3))
            .plus(&j(g1, g2, &j(f1, f2, g3)));
        let b = bind(&pt);
        let ev = |p: &Polynomial| p.partial_eval(&b).as_constant().unwrap();
        prop_assert!(scaled_residual(ev(&lhs), ev(&rhs)) <= 1e-7);
    }

    #[test]
    fn reconstruction_recovers_any_polynomial(
        f in arb_poly(["C1", "C2", "C3"].iter().map(|v| v.to_string()).collect(), 3, 6),
    ) {
        let keys = ["C1", "C2", "C3"];
        let partials: Vec<(String, Expr)> =
            keys.iter().map(|k| (k.to_string(), f.derivative(k).to_expr())).collect();
        let g = reconstruct_constraint(&partials, &Binding::new()).unwrap();
        prop_assert!(partial_mismatch(&g, &f, &keys) <= 1e-12);
        // gauged at the origin
        let origin: Binding = keys.iter().map(|k| (*k, 0.0)).collect();
        prop_assert!(g.partial_eval(&origin).as_constant().unwrap().norm() <= 1e-12);
    }

    #[test]
    fn tuple_normalization_follows_permutation_sign(seed in 0u64..1000, perm in Just([2usize, 0, 1]).prop_shuffle()) {
        let sys = builtin("harmonic-oscillator").unwrap();
        let cs = &sys.constraint_sets()[0];
        let pt = sys.sample(seed, 1).unwrap().remove(0);
        let base = [0usize, 1, 3];
        let tuple: Vec<usize> = perm.iter().map(|&k| base[k]).collect();
        let sign = f64::from(permutation_sign(&perm.iter().map(|&k| k as i64).collect::<Vec<_>>()));
        let a = tuple_normalization(cs, &base, &pt.constants).unwrap();
        let b = tuple_normalization(cs, &tuple, &pt.constants).unwrap();
        prop_assert!(scaled_residual(b, a * sign) <= 1e-12);
    }
}
