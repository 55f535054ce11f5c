//! Checks registered for each system.

use super::{table, CheckKind, CheckSpec, Provenance, Target, WINTERNITZ_FINAL_RTOL};
use crate::expr::{parse, Expr};
use crate::systems::MotionSystem;

struct Reg<'a> {
    sys: &'a MotionSystem,
    filter: Option<&'a str>,
    out: Vec<CheckSpec>,
}

fn expr(src: &str) -> Expr {
    parse(src).unwrap_or_else(|e| panic!("registered expression `{src}`: {e}"))
}

impl<'a> Reg<'a> {
    fn name(&self) -> &str {
        self.sys.name()
    }

    fn idx(&self, names: &str) -> Vec<usize> {
        names
            .split(',')
            .map(|n| {
                self.sys
                    .family()
                    .index_of(n.trim())
                    .unwrap_or_else(|| panic!("{}: no constant `{n}`", self.name()))
            })
            .collect()
    }

    fn wants(&self, set: &str) -> bool {
        self.sys.constraint_set(set).is_some() && self.filter.is_none_or(|f| f == set)
    }

    fn push(&mut self, name: String, kind: CheckKind, target: Target, provenance: Provenance) {
        self.out.push(CheckSpec {
            name,
            kind,
            target,
            provenance,
            rtol: None,
        });
    }

    fn pb(&mut self, a: &str, b: &str, expected: Expr, provenance: Provenance, suffix: &str) {
        let (ia, ib) = (self.idx(a)[0], self.idx(b)[0]);
        let name = format!("{}/pb/{a},{b}{suffix}", self.name());
        self.push(
            name,
            CheckKind::PbTable,
            Target::PoissonPair { a: ia, b: ib, expected },
            provenance,
        );
    }

    fn final_check(&mut self, set: &str, sel: &str, expected: Option<&str>, provenance: Provenance, suffix: &str) {
        if !self.wants(set) {
            return;
        }
        let name = format!("{}/{set}/final/{sel}{suffix}", self.name());
        let target = Target::Final {
            set: set.into(),
            selection: self.idx(sel),
            expected: expected.map(expr),
        };
        self.push(name, CheckKind::Final, target, provenance);
    }

    fn corollary(&mut self, set: &str, sel2: &str, expected: &str, provenance: Provenance) {
        if !self.wants(set) {
            return;
        }
        let name = format!("{}/{set}/corollary/{sel2}", self.name());
        let target = Target::Corollary {
            set: set.into(),
            sel2: self.idx(sel2),
            expected: Some(expr(expected)),
        };
        self.push(name, CheckKind::Corollary, target, provenance);
    }

    fn generic(&mut self) {
        let sys = self.sys;
        let name = sys.name().to_string();
        for (i, c) in sys.family().names().iter().enumerate() {
            self.push(
                format!("{name}/conservation/{c}"),
                CheckKind::Conservation,
                Target::Conservation { member: i },
                Provenance::Paper,
            );
        }
        for cs in sys.constraint_sets() {
            let set = cs.label();
            if !self.wants(set) {
                continue;
            }
            for (fname, f) in cs.names().iter().zip(cs.functionals()) {
                self.push(
                    format!("{name}/{set}/constraint-zero/{fname}"),
                    CheckKind::ConstraintZero,
                    Target::Vanishing { expr: f.clone() },
                    Provenance::Paper,
                );
            }
            self.push(
                format!("{name}/{set}/final-sweep"),
                CheckKind::Final,
                Target::FinalSweep { set: set.into() },
                Provenance::Derived,
            );
            self.push(
                format!("{name}/{set}/sign-consistency"),
                CheckKind::Antisymmetry,
                Target::SignConsistency { set: set.into() },
                Provenance::Trivial,
            );
            self.push(
                format!("{name}/{set}/homogeneous-sweep"),
                CheckKind::Homogeneous,
                Target::HomogeneousSweep { set: set.into() },
                Provenance::Derived,
            );
            let target = if sys.family().hamiltonian_index().is_some() {
                Target::CorollarySweep { set: set.into() }
            } else {
                Target::Skipped {
                    reason: "Hamiltonian is not a member of the family".into(),
                }
            };
            self.push(
                format!("{name}/{set}/corollary-sweep"),
                CheckKind::Corollary,
                target,
                Provenance::Derived,
            );
        }
        if self.filter.is_none() {
            if let Some(t) = table::shipped_table(&name) {
                self.push(
                    format!("{name}/reconstruction/shipped-table"),
                    CheckKind::Reconstruction,
                    Target::Reconstruction { table: t },
                    Provenance::Paper,
                );
            }
        }
    }
}

/// Every check that applies to `sys`, restricted to one constraint set when
/// `constraint_set` is given. Checks tied to no constraint set always run.
pub fn registry(sys: &MotionSystem, constraint_set: Option<&str>) -> Vec<CheckSpec> {
    let mut reg = Reg {
        sys,
        filter: constraint_set,
        out: Vec::new(),
    };
    reg.generic();
    match sys.name() {
        "harmonic-oscillator" => harmonic_oscillator(&mut reg),
        "harmonic-oscillator-c6" => {
            reg.final_check("standard", "C1,C4,C5", Some("-2*(C2 - C3)"), Provenance::Paper, "");
            reg.final_check("standard", "C1,C2,C4", Some("-C5"), Provenance::Paper, "");
            if reg.wants("standard") {
                let selection = reg.idx("C2,C3,C6");
                reg.push(
                    format!("{}/standard/dependent-vanishing/C2,C3,C6", sys.name()),
                    CheckKind::DependentVanishing,
                    Target::DependentVanishing { set: "standard".into(), selection },
                    Provenance::Paper,
                );
            }
        }
        "harmonic-oscillator-c7" => {
            reg.final_check("standard", "C3,C4,C5", Some("2*C3"), Provenance::Paper, "");
            reg.final_check("standard", "C1,C4,C5", Some("-2*(C2 - C3)"), Provenance::Paper, "");
        }
        "harmonic-oscillator-free" => {
            reg.final_check("standard", "C3,C4,C5", Some("2*C3"), Provenance::Paper, "");
        }
        "smorodinsky-winternitz" => smorodinsky_winternitz(&mut reg),
        "kepler-coulomb" => kepler_coulomb(&mut reg),
        "winternitz-3" => winternitz(&mut reg),
        "sphere-4" => sphere(&mut reg),
        _ => {}
    }
    reg.out
}

fn harmonic_oscillator(reg: &mut Reg) {
    let p = Provenance::Paper;
    reg.pb("C2", "C4", expr("-C5"), p, "");
    reg.pb("C3", "C4", expr("C5"), p, "");
    reg.pb("C2", "C5", expr("k*C4"), p, "");
    reg.pb("C3", "C5", expr("-k*C4"), p, "");
    reg.pb("C4", "C5", expr("-2*(C2 - C3)"), p, "");
    reg.pb("C2", "C3", expr("0"), p, "");

    reg.final_check("standard", "C1,C2,C4", Some("-C5"), p, "");
    reg.final_check("standard", "C1,C2,C3", Some("0"), p, "");
    reg.final_check("standard", "C3,C4,C5", Some("2*C3"), p, "");
    reg.final_check("standard", "C1,C4,C5", Some("-2*(C2 - C3)"), p, "");

    reg.corollary("standard", "C2,C4", "-C5", p);
    reg.corollary("standard", "C2,C5", "k*C4", p);
    reg.corollary("standard", "C4,C5", "-2*(C2 - C3)", p);
    reg.corollary("standard", "C2,C3", "0", p);

    if reg.wants("standard") {
        for c in ["C1", "C2", "C3", "C4", "C5"] {
            let arbitrary = reg.idx(c);
            reg.push(
                format!("{}/standard/homogeneous/{c}", reg.name()),
                CheckKind::Homogeneous,
                Target::Homogeneous {
                    set: "standard".into(),
                    rows: vec![0, 1],
                    arbitrary,
                },
                p,
            );
        }
    }
}

const SW_C2_C4: &str = "4*alpha1*C2 - 8*omega^2*C3 - 4*alpha1*C1";
const SW_C3_C4: &str = "-48*C2^2 + 64*C1*C2 - 4*alpha1*C3 + 64*omega^2*alpha2 - 16*C1^2";

fn smorodinsky_winternitz(reg: &mut Reg) {
    let p = Provenance::Paper;
    reg.pb("C2", "C3", expr("C4"), p, "");
    reg.pb("C2", "C4", expr(SW_C2_C4), p, "");
    reg.pb("C3", "C4", expr(SW_C3_C4), p, "");

    if let Some(cs) = reg.sys.constraint_set("standard") {
        let f = cs.functionals()[0].clone();
        reg.pb("C2", "C3", f.diff("C4"), p, "/casimir-partial");
        reg.pb("C2", "C4", -f.diff("C3"), p, "/casimir-partial");
        reg.pb("C3", "C4", f.diff("C2"), p, "/casimir-partial");
        if reg.wants("standard") {
            let minus = |v: &str| (-f.diff(v)).to_string();
            reg.final_check("standard", "C1,C2,C4", Some(&minus("C3")), p, "/jacobian-form");
            reg.final_check("standard", "C2,C3,C4", Some(&minus("C1")), p, "/jacobian-form");
        }
    }
    // Closed forms exactly as printed.
    reg.final_check("standard", "C1,C2,C4", Some(&format!("-({SW_C2_C4})")), p, "");
    reg.final_check(
        "standard",
        "C2,C3,C4",
        Some("-(4*alpha1*C3 + 32*C2^2 - 32*C1*C2)"),
        p,
        "",
    );

    if reg.filter.is_none() {
        if let Some(t) = table::shipped_table(reg.name()) {
            reg.push(
                format!("{}/reconstruction/rejects-corrupted-table", reg.name()),
                CheckKind::Reconstruction,
                Target::RejectsTable { table: table::corrupt(t) },
                Provenance::Trivial,
            );
        }
    }
}

fn kepler_coulomb(reg: &mut Reg) {
    let p = Provenance::Paper;
    // {L_a, L_b} = e_abc L_c, {A_a, A_b} = -2H e_abc L_c, {L_a, A_b} = e_abc A_c
    let eps = |a: usize, b: usize| -> Option<(usize, f64)> {
        let c = 6 - a - b;
        match (a, b) {
            _ if a == b => None,
            (1, 2) | (2, 3) | (3, 1) => Some((c, 1.0)),
            _ => Some((c, -1.0)),
        }
    };
    let term = |coef: f64, body: String| -> String {
        if coef > 0.0 {
            body
        } else {
            format!("-({body})")
        }
    };
    for a in 1..=3 {
        for b in 1..=3 {
            let e = eps(a, b);
            if a < b {
                let rhs = e.map_or("0".into(), |(c, s)| term(s, format!("L{c}")));
                reg.pb(&format!("L{a}"), &format!("L{b}"), expr(&rhs), p, "");
                let rhs = e.map_or("0".into(), |(c, s)| term(s, format!("-2*H*L{c}")));
                reg.pb(&format!("A{a}"), &format!("A{b}"), expr(&rhs), p, "");
            }
            let rhs = e.map_or("0".into(), |(c, s)| term(s, format!("A{c}")));
            reg.pb(&format!("L{a}"), &format!("A{b}"), expr(&rhs), p, "");
        }
    }

    reg.final_check("standard", "H,L1,L2,L3,A1", Some("A2*L3 - A3*L2"), p, "");
    reg.final_check("standard", "L1,L2,L3,A1,A2", Some("L3*(L1^2 + L2^2 + L3^2)"), p, "");
    reg.final_check("standard", "H,L1,L2,A2,A3", Some("-(A1*A3 + 2*H*L1*L3)"), p, "");
    reg.corollary("standard", "L1,L2,L3,A1", "A2*L3 - A3*L2", p);

    let args = reg.idx("L1,L2,L3,A1");
    reg.push(
        format!("{}/decomposition/L1,L2,L3,A1", reg.name()),
        CheckKind::Decomposition,
        Target::Decomposition { args, expected: expr("A2*L3 - A3*L2") },
        p,
    );
}

fn winternitz(reg: &mut Reg) {
    let p = Provenance::Paper;
    reg.final_check("standard", "H,T11,T22,T12,T13", Some("T12*T13"), p, "");
    reg.final_check("standard", "T11,T22,T33,T12,T13", Some("T12*T13/(2*k)"), p, "");
    for spec in &mut reg.out {
        if spec.kind == CheckKind::Final {
            spec.rtol = Some(WINTERNITZ_FINAL_RTOL);
        }
    }

    // {T_ij, T_rs} = i d_jr T_is - i d_is T_rj on the shipped subset.
    let shipped = [(1, 1), (2, 2), (3, 3), (1, 2), (1, 3)];
    let t = |i: usize, j: usize| format!("T{i}{j}");
    for (x, &(i, j)) in shipped.iter().enumerate() {
        for &(r, s) in &shipped[x + 1..] {
            let mut terms = Vec::new();
            if j == r {
                terms.push(format!("i*{}", t(i, s)));
            }
            if i == s {
                terms.push(format!("-i*{}", t(r, j)));
            }
            let rhs = if terms.is_empty() { "0".to_string() } else { terms.join(" ") };
            let rhs = rhs.replace(" -", " - ");
            reg.pb(&t(i, j), &t(r, s), expr(&rhs), p, "");
        }
    }

    for c in ["H", "T11", "T22", "T33"] {
        let member = reg.idx(c)[0];
        reg.push(
            format!("{}/reality/{c}", reg.name()),
            CheckKind::Reality,
            Target::Reality { member },
            Provenance::Derived,
        );
    }
}

fn sphere(reg: &mut Reg) {
    let p = Provenance::Paper;
    let identities = [
        ("L12*P3 - L13*P2 + L23*P1", "cyclic-L12-P3"),
        ("L12*P4 - L14*P2 + L24*P1", "cyclic-L12-P4"),
        ("L13*P4 - L14*P3 + L34*P1", "cyclic-L13-P4"),
        ("L12*L34 + L14*L23 - L13*L24", "cyclic-L12-L34"),
    ];
    for (src, label) in identities {
        reg.push(
            format!("{}/identity/{label}", reg.name()),
            CheckKind::ConstraintZero,
            Target::Vanishing { expr: expr(src) },
            p,
        );
    }

    // {L_ab, L_cd} = d_bd L_ac + d_ac L_bd - d_bc L_ad - d_ad L_bc,
    // {P_a, P_b} = L_ab, {L_ab, P_c} = d_ac P_b - d_bc P_a.
    let l = |a: usize, b: usize| -> Option<(String, f64)> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some((format!("L{a}{b}"), 1.0)),
            std::cmp::Ordering::Greater => Some((format!("L{b}{a}"), -1.0)),
            std::cmp::Ordering::Equal => None,
        }
    };
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let combine = |terms: Vec<(f64, Option<(String, f64)>)>| -> String {
        let mut out: Vec<String> = Vec::new();
        for (c, sym) in terms {
            if let Some((name, s)) = sym {
                let k = c * s;
                if k != 0.0 {
                    out.push(format!("{}*{name}", k));
                }
            }
        }
        if out.is_empty() {
            "0".into()
        } else {
            out.join(" + ")
        }
    };
    let pairs: Vec<(usize, usize)> = (1..=4).flat_map(|a| (a + 1..=4).map(move |b| (a, b))).collect();
    for (x, &(a, b)) in pairs.iter().enumerate() {
        for &(c, e) in &pairs[x + 1..] {
            let rhs = combine(vec![
                (d(b, e), l(a, c)),
                (d(a, c), l(b, e)),
                (-d(b, c), l(a, e)),
                (-d(a, e), l(b, c)),
            ]);
            reg.pb(&format!("L{a}{b}"), &format!("L{c}{e}"), expr(&rhs), p, "");
        }
        for c in 1..=4 {
            let pc = |i: usize| Some((format!("P{i}"), 1.0));
            let rhs = combine(vec![(d(a, c), pc(b)), (-d(b, c), pc(a))]);
            reg.pb(&format!("L{a}{b}"), &format!("P{c}"), expr(&rhs), p, "");
        }
    }
    for a in 1..=4 {
        for b in a + 1..=4 {
            reg.pb(&format!("P{a}"), &format!("P{b}"), expr(&format!("L{a}{b}")), p, "");
        }
    }

    for set in ["standard", "primed"] {
        reg.final_check(
            set,
            "H,P1,P2,P3,P4,L12,L13",
            Some("L12*P2*P4 + L13*P3*P4 - L14*(P1^2 + P2^2 + P3^2)"),
            p,
            "",
        );
        reg.final_check(set, "P1,P2,P3,P4,L12,L13,L24", Some("-P1*P2"), p, "");
        reg.final_check(set, "H,L12,L13,L14,L23,L24,L34", Some("0"), p, "");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{builtin, BUILTIN_NAMES};
    use std::collections::BTreeSet;

    #[test]
    fn names_are_unique_for_every_builtin() {
        for name in BUILTIN_NAMES {
            let specs = registry(&builtin(name).unwrap(), None);
            let unique: BTreeSet<&str> = specs.iter().map(|s| s.name.as_str()).collect();
            assert_eq!(unique.len(), specs.len(), "{name}");
        }
    }

    #[test]
    fn filter_keeps_set_free_checks() {
        let sys = builtin("sphere-4").unwrap();
        let primed = registry(&sys, Some("primed"));
        assert!(primed.iter().all(|s| !s.name.contains("/standard/")));
        assert!(primed.iter().any(|s| s.name.contains("/primed/final/")));
        assert!(primed.iter().any(|s| s.kind == CheckKind::Conservation));
    }

    #[test]
    fn winternitz_finals_are_relaxed() {
        let specs = registry(&builtin("winternitz-3").unwrap(), None);
        let finals: Vec<_> = specs.iter().filter(|s| s.kind == CheckKind::Final).collect();
        assert!(!finals.is_empty());
        assert!(finals.iter().all(|s| s.rtol == Some(WINTERNITZ_FINAL_RTOL)));
    }
}
