//! Normalization constants of canonical Nambu brackets from constraint
//! functionals.
//!
//! A family of m constants of motion on a 2n-dimensional phase space satisfies
//! s = m - (2n - 1) functional relations `F_j(C_1, ..., C_m) = 0`. For a
//! selection of 2n - 1 constants the bracket `{f, C_i1, ..., C_i(2n-1)}`
//! equals `N * df/dt`, where `N` is the Jacobian of the constraint
//! functionals with respect to the complementary constants, signed by the
//! parity of (selection, complement) as a permutation of `1..m`.
//!
//! Constraint Jacobians are always taken in the space of constant symbols:
//! the constants are evaluated at the phase point first and `dF/dC` is
//! evaluated at those values. Composing `F` with the constants and
//! differentiating in phase space would give zero identically.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::brackets::{
    decomposed_bracket, determinant, permutation_sign, poisson_from_gradients, symbolic_determinant,
    BracketError, Observable, PhaseSpace,
};
use crate::expr::{Binding, EvalError, Expr, NotPolynomial, Polynomial};
use crate::numeric::scaled_residual;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstraintError {
    #[error(transparent)]
    Bracket(#[from] BracketError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("invalid selection: {0}")]
    Selection(String),
    #[error("family has no designated Hamiltonian member")]
    NoHamiltonian,
    #[error("{constraints} constraint functionals cannot fix a complement of {complement} constants")]
    SizeMismatch { constraints: usize, complement: usize },
}

/// Ordered constants of motion together with the system Hamiltonian.
#[derive(Debug, Clone)]
pub struct ConstantFamily {
    members: Vec<Observable>,
    hamiltonian: Observable,
    hamiltonian_index: Option<usize>,
}

impl ConstantFamily {
    pub fn new(
        members: Vec<Observable>,
        hamiltonian: Observable,
        hamiltonian_index: Option<usize>,
    ) -> Self {
        Self {
            members,
            hamiltonian,
            hamiltonian_index,
        }
    }

    pub fn members(&self) -> &[Observable] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.members.iter().map(Observable::name).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.members.iter().position(|m| m.name() == name)
    }

    pub fn hamiltonian(&self) -> &Observable {
        &self.hamiltonian
    }

    /// Position of the Hamiltonian inside the family, when it is a member.
    pub fn hamiltonian_index(&self) -> Option<usize> {
        self.hamiltonian_index
    }

    /// Values of every member at a phase point, bound to the member names on
    /// top of the point's own entries (so parameters stay available).
    pub fn constants_at(&self, point: &Binding) -> Result<Binding, EvalError> {
        let mut out = point.clone();
        for m in &self.members {
            out.insert(m.name(), m.value_at(point)?);
        }
        Ok(out)
    }
}

/// Constraint functionals written over the family's constant symbols.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    label: String,
    names: Vec<String>,
    functionals: Vec<Expr>,
    symbols: Vec<String>,
    /// `partials[r][c] = dF_r / dC_c`
    partials: Vec<Vec<Expr>>,
}

impl ConstraintSet {
    pub fn new(label: impl Into<String>, functionals: Vec<(String, Expr)>, symbols: Vec<String>) -> Self {
        let partials = functionals
            .iter()
            .map(|(_, f)| symbols.iter().map(|s| f.diff(s)).collect())
            .collect();
        let (names, functionals) = functionals.into_iter().unzip();
        Self {
            label: label.into(),
            names,
            functionals,
            symbols,
            partials,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.functionals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functionals.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn functionals(&self) -> &[Expr] {
        &self.functionals
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// `dF_row / dC_col` as an expression over constant symbols.
    pub fn partial(&self, row: usize, col: usize) -> &Expr {
        &self.partials[row][col]
    }

    pub fn values_at(&self, c_values: &Binding) -> Result<Vec<Complex64>, EvalError> {
        self.functionals.iter().map(|f| f.evaluate(c_values)).collect()
    }

    /// The full s x m matrix of partial derivatives at `c_values`.
    pub fn partials_at(&self, c_values: &Binding) -> Result<Vec<Vec<Complex64>>, EvalError> {
        self.partials
            .iter()
            .map(|row| row.iter().map(|p| p.evaluate(c_values)).collect())
            .collect()
    }
}

/// Ascending selection of 2n - 1 constants with its ascending complement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSelection {
    indices: Vec<usize>,
    complement: Vec<usize>,
    sign: i8,
}

impl IndexSelection {
    /// `indices` are 0-based, strictly ascending and below `m`.
    pub fn new(indices: Vec<usize>, m: usize) -> Result<Self, ConstraintError> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConstraintError::Selection(format!(
                "indices {indices:?} are not strictly ascending"
            )));
        }
        if let Some(bad) = indices.iter().find(|&&i| i >= m) {
            return Err(ConstraintError::Selection(format!(
                "index {bad} out of range for {m} constants"
            )));
        }
        let complement: Vec<usize> = (0..m).filter(|i| !indices.contains(i)).collect();
        let sign = tuple_sign(&indices, &complement);
        Ok(Self {
            indices,
            complement,
            sign,
        })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn complement(&self) -> &[usize] {
        &self.complement
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Every ascending selection of `size` out of `m` constants.
    pub fn all(m: usize, size: usize) -> Vec<IndexSelection> {
        combinations(m, size)
            .into_iter()
            .map(|c| IndexSelection::new(c, m).expect("combinations are ascending"))
            .collect()
    }
}

fn tuple_sign(head: &[usize], tail: &[usize]) -> i8 {
    let perm: Vec<i64> = head.iter().chain(tail).map(|&i| i as i64).collect();
    permutation_sign(&perm)
}

/// Ascending k-subsets of `0..m`.
pub fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= m {
        go(0, m, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Signed normalization constant of one selection, in closed form.
#[derive(Debug, Clone)]
pub struct NormalizationConstant {
    selection: IndexSelection,
    closed_form: Expr,
}

impl NormalizationConstant {
    /// Builds `sign * det[dF_r/dC_c]` over the complement symbolically.
    pub fn new(cs: &ConstraintSet, selection: IndexSelection) -> Result<Self, ConstraintError> {
        check_sizes(cs, selection.complement().len())?;
        let m: Vec<Vec<Expr>> = (0..cs.len())
            .map(|r| {
                selection
                    .complement()
                    .iter()
                    .map(|&c| cs.partial(r, c).clone())
                    .collect()
            })
            .collect();
        let det = symbolic_determinant(&m);
        let closed_form = if selection.sign() < 0 { -det } else { det };
        Ok(Self {
            selection,
            closed_form,
        })
    }

    pub fn selection(&self) -> &IndexSelection {
        &self.selection
    }

    pub fn sign(&self) -> i8 {
        self.selection.sign()
    }

    pub fn closed_form(&self) -> &Expr {
        &self.closed_form
    }

    pub fn value(&self, c_values: &Binding) -> Result<Complex64, EvalError> {
        self.closed_form.evaluate(c_values)
    }
}

fn check_sizes(cs: &ConstraintSet, complement: usize) -> Result<(), ConstraintError> {
    if cs.len() != complement {
        return Err(ConstraintError::SizeMismatch {
            constraints: cs.len(),
            complement,
        });
    }
    Ok(())
}

/// `det[dF_row / dC_col]` at the given constant values.
pub fn constraint_jacobian(
    cs: &ConstraintSet,
    rows: &[usize],
    cols: &[usize],
    c_values: &Binding,
) -> Result<Complex64, ConstraintError> {
    if rows.len() != cols.len() {
        return Err(ConstraintError::Selection(format!(
            "{} rows against {} columns",
            rows.len(),
            cols.len()
        )));
    }
    let m = rows
        .iter()
        .map(|&r| {
            cols.iter()
                .map(|&c| cs.partial(r, c).evaluate(c_values))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(determinant(m))
}

/// Normalization constant for an arbitrary ordered tuple of distinct
/// constants: `eps(tuple, complement) * det[dF/dC_complement]`. Zero when an
/// index repeats.
pub fn tuple_normalization(
    cs: &ConstraintSet,
    tuple: &[usize],
    c_values: &Binding,
) -> Result<Complex64, ConstraintError> {
    let m = cs.symbols().len();
    let mut sorted = tuple.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if let Some(bad) = sorted.iter().find(|&&i| i >= m) {
        return Err(ConstraintError::Selection(format!(
            "index {bad} out of range for {m} constants"
        )));
    }
    let complement: Vec<usize> = (0..m).filter(|i| !tuple.contains(i)).collect();
    check_sizes(cs, complement.len())?;
    let rows: Vec<usize> = (0..cs.len()).collect();
    let det = constraint_jacobian(cs, &rows, &complement, c_values)?;
    Ok(det * f64::from(tuple_sign(tuple, &complement)))
}

/// Normalization constant of `sel` at the phase point `b`.
pub fn normalization_constant(
    fam: &ConstantFamily,
    cs: &ConstraintSet,
    sel: &IndexSelection,
    b: &Binding,
) -> Result<Complex64, ConstraintError> {
    let c_values = fam.constants_at(b)?;
    normalization_at_values(cs, sel, &c_values)
}

fn normalization_at_values(
    cs: &ConstraintSet,
    sel: &IndexSelection,
    c_values: &Binding,
) -> Result<Complex64, ConstraintError> {
    check_sizes(cs, sel.complement().len())?;
    let rows: Vec<usize> = (0..cs.len()).collect();
    let det = constraint_jacobian(cs, &rows, sel.complement(), c_values)?;
    Ok(det * f64::from(sel.sign()))
}

/// Two sides of an identity at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub lhs: Complex64,
    pub rhs: Complex64,
}

impl Comparison {
    pub fn residual(&self) -> f64 {
        scaled_residual(self.lhs, self.rhs)
    }
}

/// A family evaluated at one phase point: gradients, values and the
/// Hamiltonian gradient, so that many brackets at the same point cost only
/// determinants.
#[derive(Debug, Clone)]
pub struct FamilyAtPoint {
    gradients: Vec<Vec<Complex64>>,
    hamiltonian_gradient: Vec<Complex64>,
    c_values: Binding,
}

impl FamilyAtPoint {
    pub fn new(fam: &ConstantFamily, b: &Binding) -> Result<Self, EvalError> {
        let gradients = fam
            .members()
            .iter()
            .map(|m| m.gradient_at(b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            gradients,
            hamiltonian_gradient: fam.hamiltonian().gradient_at(b)?,
            c_values: fam.constants_at(b)?,
        })
    }

    pub fn c_values(&self) -> &Binding {
        &self.c_values
    }

    pub fn gradient(&self, member: usize) -> &[Complex64] {
        &self.gradients[member]
    }

    /// `df/dt = {f, H}_P`
    pub fn time_derivative(&self, f_gradient: &[Complex64]) -> Complex64 {
        poisson_from_gradients(f_gradient, &self.hamiltonian_gradient)
    }

    pub fn poisson(&self, a: usize, b: usize) -> Complex64 {
        poisson_from_gradients(&self.gradients[a], &self.gradients[b])
    }

    /// `{f, C_sel...}` with `f` given by its gradient.
    pub fn nambu(&self, f_gradient: &[Complex64], selection: &[usize]) -> Complex64 {
        let mut rows = Vec::with_capacity(selection.len() + 1);
        rows.push(f_gradient.to_vec());
        rows.extend(selection.iter().map(|&i| self.gradients[i].clone()));
        determinant(rows)
    }

    /// Unit gradient of the k-th phase coordinate.
    pub fn coordinate_gradient(&self, k: usize) -> Vec<Complex64> {
        let mut g = vec![Complex64::new(0.0, 0.0); self.hamiltonian_gradient.len()];
        g[k] = Complex64::new(1.0, 0.0);
        g
    }

    /// Both sides of `{f, C_sel} = N * df/dt`.
    pub fn final_identity(
        &self,
        cs: &ConstraintSet,
        sel: &IndexSelection,
        f_gradient: &[Complex64],
    ) -> Result<Comparison, ConstraintError> {
        let n = normalization_at_values(cs, sel, &self.c_values)?;
        Ok(Comparison {
            lhs: self.nambu(f_gradient, sel.indices()),
            rhs: n * self.time_derivative(f_gradient),
        })
    }
}

/// Compares `{f, C_sel}` with `N * {f, H}_P` at `b`.
pub fn verify_final(
    fam: &ConstantFamily,
    cs: &ConstraintSet,
    sel: &IndexSelection,
    f: &Observable,
    b: &Binding,
    ps: &PhaseSpace,
) -> Result<Comparison, ConstraintError> {
    if sel.len() + 1 != ps.dim() {
        return Err(BracketError::Arity {
            expected: ps.dim(),
            found: sel.len() + 1,
        }
        .into());
    }
    let at = FamilyAtPoint::new(fam, b)?;
    at.final_identity(cs, sel, &f.gradient_at(b)?)
}

/// Linear homogeneous system satisfied by the normalization constants:
/// `sum over ascending r-tuples T of minor(rows, T) * N(T ++ arbitrary)`,
/// where r = |rows| and `|rows| + |arbitrary| = 2n - 1`. For s <= 2n - 1,
/// `rows` is every constraint; for s > 2n - 1, any 2n - 1 of them with no
/// arbitrary constants. Returns the sum, which should vanish.
pub fn homogeneous_residual(
    cs: &ConstraintSet,
    rows: &[usize],
    arbitrary: &[usize],
    c_values: &Binding,
    ps: &PhaseSpace,
) -> Result<Complex64, ConstraintError> {
    if rows.len() + arbitrary.len() != ps.dim() - 1 {
        return Err(ConstraintError::Selection(format!(
            "{} rows and {} arbitrary constants do not add up to {}",
            rows.len(),
            arbitrary.len(),
            ps.dim() - 1
        )));
    }
    let m = cs.symbols().len();
    let partials = cs.partials_at(c_values)?;
    let mut total = Complex64::new(0.0, 0.0);
    for t in combinations(m, rows.len()) {
        if t.iter().any(|i| arbitrary.contains(i)) {
            continue;
        }
        let minor: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|&r| t.iter().map(|&c| partials[r][c]).collect())
            .collect();
        let minor = determinant(minor);
        if minor == Complex64::new(0.0, 0.0) {
            continue;
        }
        let tuple: Vec<usize> = t.iter().chain(arbitrary).copied().collect();
        total += minor * tuple_normalization(cs, &tuple, c_values)?;
    }
    Ok(total)
}

/// Bracket of 2n - 2 constants (Hamiltonian excluded), expanded into Poisson
/// brackets, against the signed constraint Jacobian over the remaining
/// constants with the Hamiltonian leading the Levi-Civita index.
pub fn verify_corollary(
    fam: &ConstantFamily,
    cs: &ConstraintSet,
    sel2: &[usize],
    b: &Binding,
    ps: &PhaseSpace,
) -> Result<Comparison, ConstraintError> {
    let h = fam.hamiltonian_index().ok_or(ConstraintError::NoHamiltonian)?;
    if sel2.contains(&h) {
        return Err(ConstraintError::Selection(
            "corollary selection must exclude the Hamiltonian".into(),
        ));
    }
    if sel2.len() + 2 != ps.dim() {
        return Err(BracketError::Arity {
            expected: ps.dim() - 2,
            found: sel2.len(),
        }
        .into());
    }
    let members: Vec<Observable> = sel2.iter().map(|&i| fam.members()[i].clone()).collect();
    let lhs = decomposed_bracket(&members, b, ps)?;
    let c_values = fam.constants_at(b)?;
    let tuple: Vec<usize> = std::iter::once(h).chain(sel2.iter().copied()).collect();
    let rhs = tuple_normalization(cs, &tuple, &c_values)?;
    Ok(Comparison { lhs, rhs })
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReconstructError {
    #[error("partial for `{symbol}`: {source}")]
    NotPolynomial {
        symbol: String,
        #[source]
        source: NotPolynomial,
    },
    #[error("partials for `{u}` and `{v}` are incompatible: d/d{v} of the first differs from d/d{u} of the second")]
    Incompatible { u: String, v: String },
}

/// Rebuilds a functional from its partial derivatives.
///
/// `partials` maps constant symbols to polynomial right-hand sides, in the
/// order they are integrated. Variables that are not keys (parameters and
/// constants without a given partial) are treated as constants of
/// integration. The additive term is chosen so that the result vanishes at
/// `gauge_point`; unbound keys are gauged at 0.
pub fn reconstruct_constraint(
    partials: &[(String, Expr)],
    gauge_point: &Binding,
) -> Result<Polynomial, ReconstructError> {
    let polys = partials
        .iter()
        .map(|(sym, e)| {
            Polynomial::from_expr(e)
                .map(|p| (sym.clone(), p))
                .map_err(|source| ReconstructError::NotPolynomial {
                    symbol: sym.clone(),
                    source,
                })
        })
        .collect::<Result<Vec<_>, _>>()?;

    for (a, (u, pu)) in polys.iter().enumerate() {
        for (v, pv) in polys.iter().skip(a + 1) {
            let lhs = pu.derivative(v);
            let rhs = pv.derivative(u);
            let scale = 1f64.max(lhs.max_coeff()).max(rhs.max_coeff());
            if lhs.max_coeff_diff(&rhs) > 1e-12 * scale {
                return Err(ReconstructError::Incompatible {
                    u: u.clone(),
                    v: v.clone(),
                });
            }
        }
    }

    let mut f = Polynomial::zero();
    for (sym, p) in &polys {
        let remainder = p.minus(&f.derivative(sym));
        f = f.plus(&remainder.integral(sym));
    }

    let mut gauge = Binding::new();
    for (sym, _) in &polys {
        gauge.insert(sym.clone(), gauge_point.get(sym).unwrap_or_default());
    }
    let offset = f.partial_eval(&gauge);
    Ok(f.minus(&offset))
}

/// Largest coefficient difference between the partials of `f` and a
/// reference functional, over the given symbols.
pub fn partial_mismatch(f: &Polynomial, reference: &Polynomial, symbols: &[&str]) -> f64 {
    symbols
        .iter()
        .map(|s| f.derivative(s).max_coeff_diff(&reference.derivative(s)))
        .fold(0.0, f64::max)
}

/// Partials of a polynomial functional, keyed by symbol.
pub fn polynomial_partials(f: &Polynomial, symbols: &[&str]) -> BTreeMap<String, Polynomial> {
    symbols
        .iter()
        .map(|s| (s.to_string(), f.derivative(s)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn syms(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn ho_constraints() -> ConstraintSet {
        ConstraintSet::new(
            "default",
            vec![
                ("F1".into(), parse("C1 - C2 - C3").unwrap()),
                ("F2".into(), parse("2*C2*C3 - k*C4^2/2 - C5^2/2").unwrap()),
            ],
            syms(&["C1", "C2", "C3", "C4", "C5"]),
        )
    }

    fn c_point() -> Binding {
        Binding::new()
            .with("C1", 3.1)
            .with("C2", 1.2)
            .with("C3", 1.9)
            .with("C4", -0.7)
            .with("C5", 0.4)
            .with("k", 1.0)
    }

    #[test]
    fn linear_constraint_jacobian_is_one() {
        let cs = ConstraintSet::new(
            "one",
            vec![("F1".into(), parse("C1 - C2 - C3").unwrap())],
            syms(&["C1", "C2", "C3"]),
        );
        let v = constraint_jacobian(&cs, &[0], &[0], &c_point()).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn oscillator_signed_jacobian_is_minus_c5() {
        let cs = ho_constraints();
        let b = c_point();
        let det = constraint_jacobian(&cs, &[0, 1], &[2, 4], &b).unwrap();
        // -d(F1,F2)/d(C3,C5) = -C5
        assert!((-det - Complex64::new(-0.4, 0.0)).norm() < 1e-14);
        let sel = IndexSelection::new(vec![0, 1, 3], 5).unwrap();
        assert_eq!(sel.complement(), &[2, 4]);
        assert_eq!(sel.sign(), -1);
    }

    #[test]
    fn oscillator_jacobian_over_c4_c5_vanishes() {
        let cs = ho_constraints();
        assert_eq!(
            constraint_jacobian(&cs, &[0, 1], &[3, 4], &c_point()).unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn closed_form_matches_numeric_route() {
        let cs = ho_constraints();
        let b = c_point();
        for sel in IndexSelection::all(5, 3) {
            let nc = NormalizationConstant::new(&cs, sel.clone()).unwrap();
            let numeric = normalization_at_values(&cs, &sel, &b).unwrap();
            assert!((nc.value(&b).unwrap() - numeric).norm() < 1e-13);
        }
    }

    #[test]
    fn selection_validation() {
        assert!(IndexSelection::new(vec![0, 2, 1], 5).is_err());
        assert!(IndexSelection::new(vec![0, 0, 1], 5).is_err());
        assert!(IndexSelection::new(vec![0, 1, 5], 5).is_err());
        assert_eq!(IndexSelection::all(5, 3).len(), 10);
        assert_eq!(combinations(11, 7).len(), 330);
    }

    #[test]
    fn size_mismatch_is_reported() {
        let cs = ho_constraints();
        let sel = IndexSelection::new(vec![0, 1], 5).unwrap();
        assert!(matches!(
            NormalizationConstant::new(&cs, sel),
            Err(ConstraintError::SizeMismatch { constraints: 2, complement: 3 })
        ));
    }

    #[test]
    fn tuple_normalization_is_antisymmetric() {
        let cs = ho_constraints();
        let b = c_point();
        let a = tuple_normalization(&cs, &[0, 1, 3], &b).unwrap();
        let swapped = tuple_normalization(&cs, &[1, 0, 3], &b).unwrap();
        assert!((a + swapped).norm() < 1e-14);
        assert_eq!(tuple_normalization(&cs, &[1, 1, 3], &b).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn reconstruct_rejects_non_closed_table() {
        let table = vec![
            ("C2".to_string(), parse("C3").unwrap()),
            ("C3".to_string(), parse("-C2").unwrap()),
        ];
        assert_eq!(
            reconstruct_constraint(&table, &Binding::new()),
            Err(ReconstructError::Incompatible { u: "C2".into(), v: "C3".into() })
        );
    }

    #[test]
    fn reconstruct_rejects_non_polynomial() {
        let table = vec![("C2".to_string(), parse("1/C3").unwrap())];
        assert!(matches!(
            reconstruct_constraint(&table, &Binding::new()),
            Err(ReconstructError::NotPolynomial { .. })
        ));
    }

    #[test]
    fn reconstruct_respects_gauge_point() {
        let table = vec![
            ("x".to_string(), parse("2*x*y").unwrap()),
            ("y".to_string(), parse("x^2 + 1").unwrap()),
        ];
        let gauge = Binding::new().with("x", 1.0).with("y", 2.0);
        let f = reconstruct_constraint(&table, &gauge).unwrap();
        let expected = Polynomial::from_expr(&parse("x^2*y + y - 4").unwrap()).unwrap();
        assert!(f.max_coeff_diff(&expected) < 1e-15, "{f}");
    }
}
