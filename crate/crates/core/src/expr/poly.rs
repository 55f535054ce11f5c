//! Sparse multivariate polynomials with complex coefficients.
//!
//! Used where exact structural comparison matters: closedness checks and
//! term-by-term integration when a constraint functional is rebuilt from its
//! partial derivatives.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use super::{Binding, Expr, Node};

/// Product of variables raised to positive powers, sorted by name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(String, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(name: &str) -> Self {
        Monomial(vec![(name.to_string(), 1)])
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        self.0
            .iter()
            .find(|(v, _)| v == var)
            .map_or(0, |(_, e)| *e)
    }

    pub fn factors(&self) -> &[(String, u32)] {
        &self.0
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let mut map: BTreeMap<String, u32> = self.0.iter().cloned().collect();
        for (v, e) in &other.0 {
            *map.entry(v.clone()).or_insert(0) += e;
        }
        Monomial(map.into_iter().collect())
    }

    fn with_degree(&self, var: &str, degree: u32) -> Monomial {
        let mut map: BTreeMap<String, u32> = self.0.iter().cloned().collect();
        if degree == 0 {
            map.remove(var);
        } else {
            map.insert(var.to_string(), degree);
        }
        Monomial(map.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("expression is not a polynomial: {0}")]
pub struct NotPolynomial(pub String);

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Complex64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(name: &str) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::var(name), Complex64::new(1.0, 0.0));
        p
    }

    fn add_term(&mut self, m: Monomial, c: Complex64) {
        let slot = self.terms.entry(m.clone()).or_insert(Complex64::new(0.0, 0.0));
        *slot += c;
        if *slot == Complex64::new(0.0, 0.0) {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, Complex64)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn plus(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }

    pub fn scaled(&self, k: Complex64) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * k);
        }
        out
    }

    pub fn minus(&self, other: &Polynomial) -> Polynomial {
        self.plus(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    pub fn times(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        out
    }

    pub fn powi(&self, n: u32) -> Polynomial {
        let mut out = Polynomial::constant(Complex64::new(1.0, 0.0));
        for _ in 0..n {
            out = out.times(self);
        }
        out
    }

    pub fn derivative(&self, var: &str) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let d = m.degree_in(var);
            if d > 0 {
                out.add_term(m.with_degree(var, d - 1), c * f64::from(d));
            }
        }
        out
    }

    /// Antiderivative in `var` with zero integration constant.
    pub fn integral(&self, var: &str) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let d = m.degree_in(var);
            out.add_term(m.with_degree(var, d + 1), c / f64::from(d + 1));
        }
        out
    }

    /// Substitutes the bound variables, keeping the rest symbolic.
    pub fn partial_eval(&self, binding: &Binding) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut coeff = *c;
            let mut rest = Vec::new();
            for (v, e) in &m.0 {
                match binding.get(v) {
                    Some(x) => coeff *= x.powu(*e),
                    None => rest.push((v.clone(), *e)),
                }
            }
            out.add_term(Monomial(rest), coeff);
        }
        out
    }

    /// Largest coefficient magnitude of `self - other`.
    pub fn max_coeff_diff(&self, other: &Polynomial) -> f64 {
        self.minus(other)
            .terms
            .values()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn from_expr(e: &Expr) -> Result<Polynomial, NotPolynomial> {
        match e.node() {
            Node::Const(c) => Ok(Polynomial::constant(*c)),
            Node::Var(v) => Ok(Polynomial::var(v)),
            Node::Add(ts) => ts.iter().try_fold(Polynomial::zero(), |acc, t| {
                Ok(acc.plus(&Polynomial::from_expr(t)?))
            }),
            Node::Mul(fs) => fs.iter().try_fold(
                Polynomial::constant(Complex64::new(1.0, 0.0)),
                |acc, f| Ok(acc.times(&Polynomial::from_expr(f)?)),
            ),
            Node::Pow(b, n) => {
                let n = u32::try_from(*n)
                    .map_err(|_| NotPolynomial(format!("negative power in {e}")))?;
                Ok(Polynomial::from_expr(b)?.powi(n))
            }
            Node::Div(num, den) => {
                let d = Polynomial::from_expr(den)?;
                match d.as_constant() {
                    Some(c) if c != Complex64::new(0.0, 0.0) => {
                        Ok(Polynomial::from_expr(num)?.scaled(1.0 / c))
                    }
                    _ => Err(NotPolynomial(format!("division by non-constant in {e}"))),
                }
            }
            Node::Neg(c) => Ok(Polynomial::from_expr(c)?.scaled(Complex64::new(-1.0, 0.0))),
            Node::Sqrt(c) => match Polynomial::from_expr(c)?.as_constant() {
                Some(k) => Ok(Polynomial::constant(k.sqrt())),
                None => Err(NotPolynomial(format!("square root in {e}"))),
            },
        }
    }

    pub fn as_constant(&self) -> Option<Complex64> {
        match self.terms.len() {
            0 => Some(Complex64::new(0.0, 0.0)),
            1 => self.terms.get(&Monomial::one()).copied(),
            _ => None,
        }
    }

    pub fn to_expr(&self) -> Expr {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut factors = vec![Expr::constant(*c)];
            for (v, e) in &m.0 {
                factors.push(Expr::pow(Expr::var(v), *e as i32));
            }
            terms.push(Expr::mul(factors));
        }
        Expr::add(terms)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn poly(s: &str) -> Polynomial {
        Polynomial::from_expr(&parse(s).unwrap()).unwrap()
    }

    #[test]
    fn expansion_is_canonical() {
        assert_eq!(poly("(a+b)^2"), poly("a^2 + 2*a*b + b^2"));
        assert_eq!(poly("(a - b)*(a + b)"), poly("a^2 - b^2"));
        assert!(poly("x - x").is_zero());
        assert_eq!(poly("x/2"), poly("0.5*x"));
    }

    #[test]
    fn derivative_and_integral_are_inverse() {
        let p = poly("3*x^2*y + x*y^3 - 7");
        assert_eq!(p.integral("x").derivative("x"), p);
        assert_eq!(p.derivative("y"), poly("3*x^2 + 3*x*y^2"));
    }

    #[test]
    fn rejects_non_polynomials() {
        for s in ["1/x", "sqrt(x)", "x^(-1)"] {
            assert!(Polynomial::from_expr(&parse(s).unwrap()).is_err(), "{s}");
        }
        assert!(Polynomial::from_expr(&parse("sqrt(4)*x").unwrap()).is_ok());
    }

    #[test]
    fn partial_evaluation_keeps_free_symbols() {
        let p = poly("a*x^2 + b");
        let b = Binding::new().with("x", 2.0);
        assert_eq!(p.partial_eval(&b), poly("4*a + b"));
    }

    #[test]
    fn round_trip_through_expr() {
        let p = poly("C4^2/2 - 4*alpha1*C2*C3 + 16*C1^2*C2");
        assert_eq!(Polynomial::from_expr(&p.to_expr()).unwrap(), p);
    }
}
