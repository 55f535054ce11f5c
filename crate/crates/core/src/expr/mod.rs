//! Immutable expression trees over named variables and complex constants.
//!
//! Every observable, constant of motion and constraint functional in this crate
//! is an [`Expr`]. Trees are reference counted and never mutated after
//! construction, so they can be shared freely between threads. The smart
//! constructors perform only light normalization (constant folding, removal of
//! additive zeros and multiplicative ones, flattening of nested sums and
//! products); nothing downstream relies on a canonical form.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

mod parser;
pub mod poly;

pub use parser::{parse, ParseError, ParseErrorKind};
pub use poly::{Monomial, NotPolynomial, Polynomial};

/// Literal reserved for the imaginary unit; never a variable name.
pub const IMAGINARY_UNIT: &str = "i";

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(Complex64),
    Var(Arc<str>),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    /// Integer power; non-integer powers go through [`Node::Sqrt`].
    Pow(Expr, i32),
    Div(Expr, Expr),
    Neg(Expr),
    Sqrt(Expr),
}

#[derive(Clone, PartialEq)]
pub struct Expr(Arc<Node>);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("no value bound for variable `{0}`")]
    MissingBinding(String),
    #[error("division by zero")]
    DivisionByZero,
}

// `add`, `mul`, `div`, `neg` and `sub` are simplifying constructors; the
// operator traits below delegate to them.
#[allow(clippy::should_implement_trait)]
impl Expr {
    fn from_node(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(value: impl Into<Complex64>) -> Self {
        Self::from_node(Node::Const(value.into()))
    }

    pub fn real(value: f64) -> Self {
        Self::constant(Complex64::new(value, 0.0))
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    pub fn one() -> Self {
        Self::real(1.0)
    }

    pub fn imaginary_unit() -> Self {
        Self::constant(Complex64::i())
    }

    /// Variable reference.
    ///
    /// Panics if `name` is the reserved imaginary-unit literal.
    pub fn var(name: &str) -> Self {
        assert!(
            name != IMAGINARY_UNIT,
            "`{IMAGINARY_UNIT}` is reserved for the imaginary unit"
        );
        Self::from_node(Node::Var(Arc::from(name)))
    }

    pub fn as_const(&self) -> Option<Complex64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match self.node() {
            Node::Var(v) => Some(v),
            _ => None,
        }
    }

    fn is_const(&self, value: f64) -> bool {
        self.as_const() == Some(Complex64::new(value, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.is_const(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.is_const(1.0)
    }

    pub fn add(terms: Vec<Expr>) -> Self {
        let mut flat = Vec::with_capacity(terms.len());
        let mut constant = Complex64::new(0.0, 0.0);
        for term in terms {
            match term.node() {
                Node::Const(c) => constant += c,
                Node::Add(inner) => {
                    for t in inner {
                        match t.as_const() {
                            Some(c) => constant += c,
                            None => flat.push(t.clone()),
                        }
                    }
                }
                _ => flat.push(term),
            }
        }
        if constant != Complex64::new(0.0, 0.0) {
            flat.push(Expr::constant(constant));
        }
        match flat.len() {
            0 => Expr::zero(),
            1 => flat.pop().unwrap(),
            _ => Self::from_node(Node::Add(flat)),
        }
    }

    pub fn mul(factors: Vec<Expr>) -> Self {
        let mut flat = Vec::with_capacity(factors.len());
        let mut constant = Complex64::new(1.0, 0.0);
        for factor in factors {
            match factor.node() {
                Node::Const(c) => constant *= c,
                Node::Mul(inner) => {
                    for f in inner {
                        match f.as_const() {
                            Some(c) => constant *= c,
                            None => flat.push(f.clone()),
                        }
                    }
                }
                _ => flat.push(factor),
            }
        }
        if constant == Complex64::new(0.0, 0.0) {
            return Expr::zero();
        }
        if flat.is_empty() {
            return Expr::constant(constant);
        }
        let body = if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            Self::from_node(Node::Mul(flat))
        };
        if constant == Complex64::new(1.0, 0.0) {
            body
        } else if constant == Complex64::new(-1.0, 0.0) {
            Expr::neg(body)
        } else {
            let mut with_const = vec![Expr::constant(constant)];
            match body.node() {
                Node::Mul(inner) => with_const.extend(inner.iter().cloned()),
                _ => with_const.push(body),
            }
            Self::from_node(Node::Mul(with_const))
        }
    }

    pub fn pow(base: Expr, exponent: i32) -> Self {
        match exponent {
            0 => return Expr::one(),
            1 => return base,
            _ => {}
        }
        match base.node() {
            Node::Const(c) if *c != Complex64::new(0.0, 0.0) || exponent > 0 => {
                Expr::constant(c.powi(exponent))
            }
            Node::Pow(inner, m) => match m.checked_mul(exponent) {
                Some(total) => Expr::pow(inner.clone(), total),
                None => Self::from_node(Node::Pow(base, exponent)),
            },
            _ => Self::from_node(Node::Pow(base, exponent)),
        }
    }

    pub fn div(numerator: Expr, denominator: Expr) -> Self {
        if denominator.is_one() {
            return numerator;
        }
        if numerator.is_zero() {
            return Expr::zero();
        }
        match (numerator.as_const(), denominator.as_const()) {
            (Some(n), Some(d)) if d != Complex64::new(0.0, 0.0) => Expr::constant(n / d),
            _ => Self::from_node(Node::Div(numerator, denominator)),
        }
    }

    pub fn neg(child: Expr) -> Self {
        match child.node() {
            Node::Const(c) => Expr::constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Self::from_node(Node::Neg(child)),
        }
    }

    pub fn sqrt(child: Expr) -> Self {
        match child.as_const() {
            Some(c) => Expr::constant(c.sqrt()),
            None => Self::from_node(Node::Sqrt(child)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Self {
        Expr::add(vec![a, Expr::neg(b)])
    }

    /// Exact partial derivative with respect to `var`.
    pub fn diff(&self, var: &str) -> Expr {
        match self.node() {
            Node::Const(_) => Expr::zero(),
            Node::Var(v) => {
                if &**v == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Add(terms) => Expr::add(terms.iter().map(|t| t.diff(var)).collect()),
            Node::Mul(factors) => {
                let mut terms = Vec::new();
                for (i, f) in factors.iter().enumerate() {
                    let df = f.diff(var);
                    if df.is_zero() {
                        continue;
                    }
                    let mut product = Vec::with_capacity(factors.len());
                    for (j, g) in factors.iter().enumerate() {
                        product.push(if i == j { df.clone() } else { g.clone() });
                    }
                    terms.push(Expr::mul(product));
                }
                Expr::add(terms)
            }
            Node::Pow(base, n) => {
                let db = base.diff(var);
                if db.is_zero() {
                    return Expr::zero();
                }
                Expr::mul(vec![
                    Expr::real(f64::from(*n)),
                    Expr::pow(base.clone(), n - 1),
                    db,
                ])
            }
            Node::Div(num, den) => {
                let dn = num.diff(var);
                let dd = den.diff(var);
                let first = Expr::div(dn, den.clone());
                if dd.is_zero() {
                    return first;
                }
                let second = Expr::div(
                    Expr::mul(vec![num.clone(), dd]),
                    Expr::pow(den.clone(), 2),
                );
                Expr::sub(first, second)
            }
            Node::Neg(child) => Expr::neg(child.diff(var)),
            Node::Sqrt(child) => {
                let dc = child.diff(var);
                if dc.is_zero() {
                    return Expr::zero();
                }
                Expr::div(dc, Expr::mul(vec![Expr::real(2.0), self.clone()]))
            }
        }
    }

    /// Evaluates the tree in double-precision complex arithmetic.
    pub fn evaluate(&self, binding: &Binding) -> Result<Complex64, EvalError> {
        match self.node() {
            Node::Const(c) => Ok(*c),
            Node::Var(v) => binding
                .get(v)
                .ok_or_else(|| EvalError::MissingBinding(v.to_string())),
            Node::Add(terms) => terms
                .iter()
                .try_fold(Complex64::new(0.0, 0.0), |acc, t| Ok(acc + t.evaluate(binding)?)),
            Node::Mul(factors) => factors
                .iter()
                .try_fold(Complex64::new(1.0, 0.0), |acc, f| Ok(acc * f.evaluate(binding)?)),
            Node::Pow(base, n) => {
                let b = base.evaluate(binding)?;
                if *n < 0 && b == Complex64::new(0.0, 0.0) {
                    return Err(EvalError::DivisionByZero);
                }
                Ok(b.powi(*n))
            }
            Node::Div(num, den) => {
                let d = den.evaluate(binding)?;
                if d == Complex64::new(0.0, 0.0) {
                    return Err(EvalError::DivisionByZero);
                }
                Ok(num.evaluate(binding)? / d)
            }
            Node::Neg(child) => Ok(-child.evaluate(binding)?),
            Node::Sqrt(child) => Ok(child.evaluate(binding)?.sqrt()),
        }
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self.node() {
            Node::Const(_) => {}
            Node::Var(v) => {
                out.insert(v.to_string());
            }
            Node::Add(children) | Node::Mul(children) => {
                for c in children {
                    c.collect_variables(out);
                }
            }
            Node::Div(a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
            Node::Pow(c, _) | Node::Neg(c) | Node::Sqrt(c) => c.collect_variables(out),
        }
    }

    /// Replaces variables by expressions; unmapped variables are kept.
    pub fn substitute(&self, map: &HashMap<String, Expr>) -> Expr {
        match self.node() {
            Node::Const(_) => self.clone(),
            Node::Var(v) => map.get(&**v).cloned().unwrap_or_else(|| self.clone()),
            Node::Add(terms) => Expr::add(terms.iter().map(|t| t.substitute(map)).collect()),
            Node::Mul(factors) => Expr::mul(factors.iter().map(|f| f.substitute(map)).collect()),
            Node::Pow(b, n) => Expr::pow(b.substitute(map), *n),
            Node::Div(a, b) => Expr::div(a.substitute(map), b.substitute(map)),
            Node::Neg(c) => Expr::neg(c.substitute(map)),
            Node::Sqrt(c) => Expr::sqrt(c.substitute(map)),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + match self.node() {
            Node::Const(_) | Node::Var(_) => 0,
            Node::Add(c) | Node::Mul(c) => c.iter().map(Expr::size).sum(),
            Node::Div(a, b) => a.size() + b.size(),
            Node::Pow(c, _) | Node::Neg(c) | Node::Sqrt(c) => c.size(),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl From<f64> for Expr {
    fn from(value: f64) -> Self {
        Expr::real(value)
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(vec![self, rhs])
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(vec![self, rhs])
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::div(self, rhs)
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

// Printing. Precedence levels: sum 1, product/quotient 2, negation 3,
// power 4, atom 5. The output re-parses to a tree with the same values.

fn format_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else if x.is_nan() {
        "(0/0)".to_string()
    } else if x > 0.0 {
        "(1/0)".to_string()
    } else {
        "(-1/0)".to_string()
    }
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self.node() {
            Node::Const(c) => {
                if c.im == 0.0 {
                    if c.re.is_sign_negative() {
                        3
                    } else {
                        5
                    }
                } else if c.re == 0.0 {
                    if c.im == 1.0 {
                        5
                    } else {
                        2
                    }
                } else {
                    5
                }
            }
            Node::Var(_) | Node::Sqrt(_) => 5,
            Node::Add(_) => 1,
            Node::Mul(_) | Node::Div(..) => 2,
            Node::Neg(_) => 3,
            Node::Pow(..) => 4,
        }
    }

    fn write_wrapped(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => {
                if c.im == 0.0 {
                    write!(f, "{}", format_real(c.re))
                } else if c.re == 0.0 {
                    if c.im == 1.0 {
                        write!(f, "i")
                    } else {
                        write!(f, "({})*i", format_real(c.im))
                    }
                } else {
                    write!(f, "({} + ({})*i)", format_real(c.re), format_real(c.im))
                }
            }
            Node::Var(v) => write!(f, "{v}"),
            Node::Add(terms) => {
                for (idx, term) in terms.iter().enumerate() {
                    if idx == 0 {
                        term.write_wrapped(f, 2)?;
                        continue;
                    }
                    match term.node() {
                        Node::Neg(inner) => {
                            write!(f, " - ")?;
                            inner.write_wrapped(f, 2)?;
                        }
                        _ => {
                            write!(f, " + ")?;
                            term.write_wrapped(f, 2)?;
                        }
                    }
                }
                Ok(())
            }
            Node::Mul(factors) => {
                for (idx, factor) in factors.iter().enumerate() {
                    if idx > 0 {
                        write!(f, "*")?;
                    }
                    // a*(b/c) must keep its parentheses to stay left-associative
                    let min = if idx == 0 { 2 } else { 3 };
                    factor.write_wrapped(f, min)?;
                }
                Ok(())
            }
            Node::Div(num, den) => {
                num.write_wrapped(f, 2)?;
                write!(f, "/")?;
                den.write_wrapped(f, 3)
            }
            Node::Neg(child) => {
                write!(f, "-")?;
                child.write_wrapped(f, 3)
            }
            Node::Pow(base, n) => {
                base.write_wrapped(f, 5)?;
                if *n < 0 {
                    write!(f, "^({n})")
                } else {
                    write!(f, "^{n}")
                }
            }
            Node::Sqrt(child) => write!(f, "sqrt({child})"),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

/// Assignment of complex values to variable names.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Binding {
    values: HashMap<String, Complex64>,
}

impl Binding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: impl Into<String>, value: impl Into<Complex64>) -> Self {
        self.insert(name, value);
        self
    }

    pub fn insert(&mut self, name: impl Into<String>, value: impl Into<Complex64>) {
        self.values.insert(name.into(), value.into());
    }

    pub fn get(&self, name: &str) -> Option<Complex64> {
        self.values.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.values.contains_key(name)
    }

    /// Adds every entry of `other`, overwriting on collision.
    pub fn extend(&mut self, other: &Binding) {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), *v);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Complex64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl<S: Into<String>, V: Into<Complex64>> FromIterator<(S, V)> for Binding {
    fn from_iter<T: IntoIterator<Item = (S, V)>>(iter: T) -> Self {
        let mut b = Binding::new();
        for (k, v) in iter {
            b.insert(k, v);
        }
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn eval(e: &Expr, pairs: &[(&str, f64)]) -> Complex64 {
        let b: Binding = pairs.iter().map(|(k, v)| (*k, *v)).collect();
        e.evaluate(&b).unwrap()
    }

    #[test]
    fn power_rule() {
        let d = p("q1^2").diff("q1");
        for x in [-1.5, 0.3, 2.0] {
            assert_eq!(eval(&d, &[("q1", x)]), Complex64::new(2.0 * x, 0.0));
        }
    }

    #[test]
    fn chain_rule_through_sqrt() {
        let d = p("sqrt(q1^2+q2^2)").diff("q1");
        let expected = p("q1/sqrt(q1^2+q2^2)");
        let at = [("q1", 0.7), ("q2", -1.2)];
        assert!((eval(&d, &at) - eval(&expected, &at)).norm() < 1e-15);
    }

    #[test]
    fn product_rule_on_c5() {
        let d = p("p1*p2 + k*q1*q2").diff("q1");
        assert_eq!(d, p("k*q2"));
    }

    #[test]
    fn derivative_of_absent_variable_is_zero() {
        assert!(p("p1^3 + sqrt(p2)").diff("q7").is_zero());
        assert!(Expr::real(7.0).diff("x").is_zero());
    }

    #[test]
    fn quotient_rule() {
        let d = p("q1/q2").diff("q2");
        let v = eval(&d, &[("q1", 3.0), ("q2", 2.0)]);
        assert!((v - Complex64::new(-0.75, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(eval(&p("q1^2+1"), &[("q1", 2.0)]), Complex64::new(5.0, 0.0));
        assert_eq!(eval(&p("i*q1"), &[("q1", 3.0)]), Complex64::new(0.0, 3.0));
        let err = p("1/q2").evaluate(&Binding::new().with("q2", 0.0));
        assert_eq!(err, Err(EvalError::DivisionByZero));
    }

    #[test]
    fn missing_binding_names_variable() {
        let err = p("q1 + p1").evaluate(&Binding::new().with("q1", 1.0));
        assert_eq!(err, Err(EvalError::MissingBinding("p1".into())));
    }

    #[test]
    fn sqrt_of_negative_is_principal_root() {
        let v = eval(&p("sqrt(x)"), &[("x", -4.0)]);
        assert!((v - Complex64::new(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn negative_power_of_zero_is_division_error() {
        let err = p("x^(-2)").evaluate(&Binding::new().with("x", 0.0));
        assert_eq!(err, Err(EvalError::DivisionByZero));
    }

    #[test]
    fn free_variable_sets() {
        let names = |s: &str| p(s).free_variables().into_iter().collect::<Vec<_>>();
        assert_eq!(names("q1^2+p1"), ["p1", "q1"]);
        assert!(names("7").is_empty());
        assert_eq!(names("sqrt(1-(q1^2+q2^2))"), ["q1", "q2"]);
        assert!(names("2*i").is_empty());
    }

    #[test]
    fn constructors_fold_and_flatten() {
        let x = Expr::var("x");
        assert_eq!(Expr::add(vec![x.clone(), Expr::zero()]), x);
        assert_eq!(Expr::mul(vec![x.clone(), Expr::one()]), x);
        assert!(Expr::mul(vec![x.clone(), Expr::zero()]).is_zero());
        assert_eq!(Expr::neg(Expr::neg(x.clone())), x);
        assert_eq!(Expr::pow(x.clone(), 1), x);
        assert!(Expr::pow(x.clone(), 0).is_one());
        let nested = Expr::add(vec![Expr::add(vec![x.clone(), Expr::real(1.0)]), Expr::real(2.0)]);
        match nested.node() {
            Node::Add(terms) => assert_eq!(terms.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(Expr::add(vec![Expr::real(1.0), Expr::real(2.0)]).as_const(), Some(Complex64::new(3.0, 0.0)));
    }

    #[test]
    #[should_panic]
    fn imaginary_unit_is_not_a_variable() {
        let _ = Expr::var("i");
    }

    #[test]
    fn display_round_trips_tricky_shapes() {
        for src in [
            "-x^2",
            "(-x)^2",
            "a - (b - c)",
            "a/(b*c)",
            "a*(b/c)",
            "x^(-3)",
            "2.5*i - y",
            "-(a + b)*c",
            "sqrt(1 - (q1^2 + q2^2))*p1",
            "(1 + 2*i)*z",
        ] {
            let e = p(src);
            let again = p(&e.to_string());
            let at = [("x", 1.3), ("a", 0.4), ("b", -2.2), ("c", 0.9), ("y", 1.1), ("z", -0.6), ("q1", 0.2), ("q2", 0.3), ("p1", 1.7)];
            let (u, v) = (eval(&e, &at), eval(&again, &at));
            assert!((u - v).norm() <= 1e-14 * (1.0 + u.norm()), "{src} -> {e}");
        }
    }

    #[test]
    fn substitute_replaces_variables() {
        let map: HashMap<String, Expr> = [("C1".to_string(), p("q1^2"))].into_iter().collect();
        let e = p("C1 + C2").substitute(&map);
        assert_eq!(e.free_variables().into_iter().collect::<Vec<_>>(), ["C2", "q1"]);
    }
}
