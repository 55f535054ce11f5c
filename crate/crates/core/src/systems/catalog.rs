//! Built-in systems.

use super::{MotionSystem, SystemDefinition, SystemError, DEFAULT_GUARD_BOUND};
use crate::expr::{parse, Expr};

/// The five headline systems.
pub const HEADLINE_SYSTEMS: &[&str] = &[
    "harmonic-oscillator",
    "smorodinsky-winternitz",
    "kepler-coulomb",
    "winternitz-3",
    "sphere-4",
];

/// Every name accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &[
    "harmonic-oscillator",
    "harmonic-oscillator-c6",
    "harmonic-oscillator-c7",
    "harmonic-oscillator-free",
    "smorodinsky-winternitz",
    "kepler-coulomb",
    "winternitz-3",
    "sphere-4",
];

pub fn builtin(name: &str) -> Result<MotionSystem, SystemError> {
    definition(name)?.build()
}

/// The unvalidated definition behind a built-in name.
pub fn definition(name: &str) -> Result<SystemDefinition, SystemError> {
    Ok(match name {
        "harmonic-oscillator" => harmonic_oscillator(Extension::None),
        "harmonic-oscillator-c6" => harmonic_oscillator(Extension::C6),
        "harmonic-oscillator-c7" => harmonic_oscillator(Extension::C7),
        "harmonic-oscillator-free" => harmonic_oscillator_free(),
        "smorodinsky-winternitz" => smorodinsky_winternitz(),
        "kepler-coulomb" => kepler_coulomb(),
        "winternitz-3" => winternitz_3(),
        "sphere-4" => sphere_4(),
        _ => return Err(SystemError::UnknownSystem(name.to_string())),
    })
}

fn p(src: &str) -> Expr {
    parse(src).unwrap_or_else(|e| panic!("built-in expression `{src}`: {e}"))
}

fn named(pairs: &[(&str, &str)]) -> Vec<(String, Expr)> {
    pairs.iter().map(|(n, s)| (n.to_string(), p(s))).collect()
}

fn guard(src: &str) -> (Expr, f64) {
    (p(src), DEFAULT_GUARD_BOUND)
}

const HO_H: &str = "(p1^2 + p2^2)/2 + k*(q1^2 + q2^2)/2";
const HO_C2: &str = "p1^2/2 + k*q1^2/2";
const HO_C3: &str = "p2^2/2 + k*q2^2/2";
const HO_C4: &str = "q1*p2 - q2*p1";
const HO_C5: &str = "p1*p2 + k*q1*q2";
const HO_F2: &str = "2*C2*C3 - k*C4^2/2 - C5^2/2";

#[derive(Clone, Copy, PartialEq)]
enum Extension {
    None,
    C6,
    C7,
}

fn harmonic_oscillator(ext: Extension) -> SystemDefinition {
    let mut constants = named(&[
        ("C1", HO_H),
        ("C2", HO_C2),
        ("C3", HO_C3),
        ("C4", HO_C4),
        ("C5", HO_C5),
    ]);
    let mut constraints = named(&[("F1", "C1 - C2 - C3"), ("F2", HO_F2)]);
    let name = match ext {
        Extension::None => "harmonic-oscillator",
        Extension::C6 => "harmonic-oscillator-c6",
        Extension::C7 => "harmonic-oscillator-c7",
    };
    if ext != Extension::None {
        constants.extend(named(&[("C6", &format!("{HO_C2} - ({HO_C3})"))]));
        constraints.extend(named(&[("F3", "C6 - C2 + C3")]));
    }
    if ext == Extension::C7 {
        constants.extend(named(&[("C7", &format!("({HO_C4})*({HO_C5})"))]));
        constraints.extend(named(&[("F4", "C7 - C4*C5")]));
    }
    SystemDefinition {
        name: name.into(),
        dof: Some(2),
        params: vec![("k".into(), 1.0)],
        hamiltonian: Some(p("C1")),
        constants,
        constraint_sets: vec![("standard".into(), constraints)],
        guards: vec![],
        boxes: vec![],
    }
}

/// Oscillator family without the energy among the constants.
fn harmonic_oscillator_free() -> SystemDefinition {
    SystemDefinition {
        name: "harmonic-oscillator-free".into(),
        dof: Some(2),
        params: vec![("k".into(), 1.0)],
        hamiltonian: Some(p(HO_H)),
        constants: named(&[("C2", HO_C2), ("C3", HO_C3), ("C4", HO_C4), ("C5", HO_C5)]),
        constraint_sets: vec![(
            "standard".into(),
            named(&[("F", &format!("-({HO_F2})"))]),
        )],
        guards: vec![],
        boxes: vec![],
    }
}

fn smorodinsky_winternitz() -> SystemDefinition {
    SystemDefinition {
        name: "smorodinsky-winternitz".into(),
        dof: Some(2),
        params: vec![
            ("omega".into(), 1.0),
            ("alpha1".into(), 1.0),
            ("alpha2".into(), 1.0),
        ],
        hamiltonian: Some(p("C1")),
        constants: named(&[
            (
                "C1",
                "(p1^2 + p2^2)/2 + omega^2*(4*q1^2 + q2^2) + alpha1*q1 + alpha2/q2^2",
            ),
            ("C2", "p1^2/2 + alpha1*q1 + 4*omega^2*q1^2"),
            (
                "C3",
                "2*p2*(q1*p2 - q2*p1) - 4*omega^2*q1*q2^2 + 4*alpha2*q1/q2^2 - alpha1*q2^2",
            ),
            (
                "C4",
                "-2*(alpha1 + 8*omega^2*q1)*q2*p2 - p1*(2*p2^2 - 4*omega^2*q2^2 + 4*alpha2/q2^2)",
            ),
        ]),
        constraint_sets: vec![(
            "standard".into(),
            named(&[(
                "F",
                "C4^2/2 - 4*alpha1*C2*C3 + 4*omega^2*C3^2 + 4*alpha1*C1*C3 - 16*C2^3 \
                 + 32*C1*C2^2 + 64*omega^2*alpha2*C2 - 16*C1^2*C2 + 4*alpha1^2*alpha2",
            )]),
        )],
        guards: vec![guard("q2")],
        boxes: vec![],
    }
}

fn kepler_coulomb() -> SystemDefinition {
    let r = "sqrt(q1^2 + q2^2 + q3^2)";
    let l1 = "q2*p3 - q3*p2";
    let l2 = "q3*p1 - q1*p3";
    let l3 = "q1*p2 - q2*p1";
    SystemDefinition {
        name: "kepler-coulomb".into(),
        dof: Some(3),
        params: vec![("alpha".into(), 1.0)],
        hamiltonian: Some(p("H")),
        constants: named(&[
            ("H", &format!("(p1^2 + p2^2 + p3^2)/2 - alpha/{r}")),
            ("L1", l1),
            ("L2", l2),
            ("L3", l3),
            ("A1", &format!("p2*({l3}) - p3*({l2}) - alpha*q1/{r}")),
            ("A2", &format!("p3*({l1}) - p1*({l3}) - alpha*q2/{r}")),
            ("A3", &format!("p1*({l2}) - p2*({l1}) - alpha*q3/{r}")),
        ]),
        constraint_sets: vec![(
            "standard".into(),
            named(&[
                ("F1", "A1*L1 + A2*L2 + A3*L3"),
                (
                    "F2",
                    "alpha^2/2 + H*(L1^2 + L2^2 + L3^2) - (A1^2 + A2^2 + A3^2)/2",
                ),
            ]),
        )],
        guards: vec![guard("q1^2 + q2^2 + q3^2")],
        boxes: vec![],
    }
}

fn winternitz_3() -> SystemDefinition {
    let h = |i: usize| format!("(p{i}^2 + k^2*q{i}^2 + k{i}^2/q{i}^2)/2");
    let a = |i: usize, conj: bool| {
        let s = if conj { '-' } else { '+' };
        format!("(p{i}^2 + k{i}^2/q{i}^2 - k^2*q{i}^2 {s} 2*i*k*q{i}*p{i})/(4*k)")
    };
    let f = |i: usize| format!("sqrt(2*k/({} + k*k{i}))", h(i));
    let t_diag = |i: usize| format!("({} - k*k{i})/(2*k)", h(i));
    let t_off = |i: usize, j: usize| format!("{}*{}*{}*{}", f(i), f(j), a(i, true), a(j, false));
    let total = format!("{} + {} + {}", h(1), h(2), h(3));
    SystemDefinition {
        name: "winternitz-3".into(),
        dof: Some(3),
        params: vec![
            ("k".into(), 1.0),
            ("k1".into(), 1.0),
            ("k2".into(), 1.0),
            ("k3".into(), 1.0),
        ],
        hamiltonian: Some(p("H")),
        constants: named(&[
            ("H", &total),
            ("T11", &t_diag(1)),
            ("T22", &t_diag(2)),
            ("T33", &t_diag(3)),
            ("T12", &t_off(1, 2)),
            ("T13", &t_off(1, 3)),
        ]),
        constraint_sets: vec![(
            "standard".into(),
            named(&[(
                "F",
                "T12*T13*(-H/(2*k) + T11 + T22 + T33 + (k1 + k2 + k3)/2)",
            )]),
        )],
        guards: vec![
            guard("q1"),
            guard("q2"),
            guard("q3"),
            guard(&format!("{} + k*k1", h(1))),
            guard(&format!("{} + k*k2", h(2))),
            guard(&format!("{} + k*k3", h(3))),
        ],
        boxes: vec![],
    }
}

fn sphere_4() -> SystemDefinition {
    let r = "sqrt(1 - (q1^2 + q2^2 + q3^2 + q4^2))";
    let mom = |a: usize| format!("{r}*p{a}");
    let ang = |a: usize, b: usize| format!("q{a}*p{b} - q{b}*p{a}");
    let pairs = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];
    let mut h = String::from("(");
    for a in 1..=4 {
        h += &format!("({})^2 + ", mom(a));
    }
    for (a, b) in pairs {
        h += &format!("({})^2 + ", ang(a, b));
    }
    h.truncate(h.len() - 3);
    h += ")/2";

    let mut constants = vec![("H".to_string(), p(&h))];
    for a in 1..=4 {
        constants.push((format!("P{a}"), p(&mom(a))));
    }
    for (a, b) in pairs {
        constants.push((format!("L{a}{b}"), p(&ang(a, b))));
    }
    let energy = "H - (P1^2 + P2^2 + P3^2 + P4^2)/2 \
                  - (L12^2 + L13^2 + L14^2 + L23^2 + L24^2 + L34^2)/2";
    let standard = named(&[
        ("F1", energy),
        ("F2", "L12*L34 + L14*L23 - L13*L24"),
        ("F3", "L12*P3 - L13*P2 + L23*P1"),
        ("F4", "P4 - L14/L13*P3 + L34/L13*P1"),
    ]);
    let primed = named(&[
        ("F1p", energy),
        ("F2p", "L14*P2*P3 - L13*P2*P4 - L24*P1*P3 + L23*P1*P4"),
        ("F3p", "L23/P3 - L24/P4 + L34/(P3*P4)*P2"),
        ("F4p", "P3*P4/P2*L12 - P3*L14 + P1*L34 + P1*P4/P2*L23"),
    ]);
    SystemDefinition {
        name: "sphere-4".into(),
        dof: Some(4),
        params: vec![],
        hamiltonian: Some(p("H")),
        constants,
        constraint_sets: vec![("standard".into(), standard), ("primed".into(), primed)],
        guards: vec![
            guard("1 - (q1^2 + q2^2 + q3^2 + q4^2)"),
            guard(&ang(1, 3)),
            guard(&mom(2)),
            guard(&mom(3)),
            guard(&mom(4)),
        ],
        boxes: (1..=4).map(|a| (format!("q{a}"), -0.5, 0.5)).collect(),
    }
}
