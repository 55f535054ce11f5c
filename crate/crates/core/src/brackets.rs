//! Poisson brackets and canonical Nambu brackets on a 2n-dimensional phase
//! space in Darboux coordinates ordered `q1, p1, ..., qn, pn`.
//!
//! The 2n-ary bracket is the Jacobian determinant of its arguments with respect
//! to all coordinates. Numeric determinants use partially pivoted elimination;
//! the Levi-Civita expansion is kept for small sizes as an independent oracle
//! and for building symbolic Jacobians.
//!
//! Brackets with fewer than 2n arguments are defined by the recursive
//! cyclic-sum expansion into products of Poisson brackets
//! (see [`decomposed_bracket`]). For 2n arguments that expansion reproduces
//! the Jacobian, since it is the first-row expansion of the Pfaffian of the
//! Poisson-bracket matrix.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::expr::{Binding, EvalError, Expr};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BracketError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("expected {expected} arguments, got {found}")]
    Arity { expected: usize, found: usize },
    #[error("bracket needs an even number of arguments, got {0}")]
    OddArity(usize),
    #[error("phase space needs at least one degree of freedom")]
    NoDegreesOfFreedom,
}

/// Canonical coordinates `(q1, p1, ..., qn, pn)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseSpace {
    dof: usize,
    coords: Vec<String>,
}

impl PhaseSpace {
    pub fn new(dof: usize) -> Result<Self, BracketError> {
        if dof == 0 {
            return Err(BracketError::NoDegreesOfFreedom);
        }
        let coords = (1..=dof)
            .flat_map(|j| [format!("q{j}"), format!("p{j}")])
            .collect();
        Ok(Self { dof, coords })
    }

    pub fn dof(&self) -> usize {
        self.dof
    }

    /// Phase-space dimension 2n.
    pub fn dim(&self) -> usize {
        2 * self.dof
    }

    pub fn coordinates(&self) -> &[String] {
        &self.coords
    }

    /// Name of the j-th position (0-based).
    pub fn position(&self, j: usize) -> &str {
        &self.coords[2 * j]
    }

    /// Name of the j-th momentum (0-based).
    pub fn momentum(&self, j: usize) -> &str {
        &self.coords[2 * j + 1]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    pub fn binding(&self, values: &[f64]) -> Binding {
        self.coords
            .iter()
            .zip(values)
            .map(|(c, v)| (c.clone(), *v))
            .collect()
    }
}

/// A named phase-space function with its gradient cached as expression trees.
#[derive(Debug, Clone)]
pub struct Observable {
    name: String,
    body: Expr,
    gradient: Arc<[Expr]>,
}

impl Observable {
    pub fn new(name: impl Into<String>, body: Expr, ps: &PhaseSpace) -> Self {
        let gradient = ps.coordinates().iter().map(|c| body.diff(c)).collect();
        Self {
            name: name.into(),
            body,
            gradient,
        }
    }

    /// The coordinate function `x` itself.
    pub fn coordinate(ps: &PhaseSpace, name: &str) -> Self {
        Self::new(name, Expr::var(name), ps)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn body(&self) -> &Expr {
        &self.body
    }

    /// Partial derivatives in phase-space coordinate order.
    pub fn gradient(&self) -> &[Expr] {
        &self.gradient
    }

    pub fn value_at(&self, b: &Binding) -> Result<Complex64, EvalError> {
        self.body.evaluate(b)
    }

    pub fn gradient_at(&self, b: &Binding) -> Result<Vec<Complex64>, EvalError> {
        self.gradient.iter().map(|g| g.evaluate(b)).collect()
    }

    fn partial(&self, var: &str, ps: &PhaseSpace) -> Expr {
        match ps.index_of(var) {
            Some(i) if i < self.gradient.len() => self.gradient[i].clone(),
            _ => self.body.diff(var),
        }
    }
}

/// Sign of a sequence of integers as a permutation of its sorted order;
/// 0 when any value repeats.
pub fn permutation_sign(perm: &[i64]) -> i8 {
    let mut sorted = perm.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return 0;
    }
    // cycle decomposition over ranks
    let ranks: Vec<usize> = perm
        .iter()
        .map(|v| sorted.binary_search(v).unwrap())
        .collect();
    let mut seen = vec![false; ranks.len()];
    let mut transpositions = 0;
    for start in 0..ranks.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = ranks[j];
            len += 1;
        }
        transpositions += len - 1;
    }
    if transpositions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All permutations of `0..k` with their signs (Heap's algorithm).
pub fn signed_permutations(k: usize) -> Vec<(Vec<usize>, i8)> {
    let mut out = Vec::new();
    let mut a: Vec<usize> = (0..k).collect();
    let mut c = vec![0usize; k];
    let mut sign = 1i8;
    out.push((a.clone(), sign));
    let mut i = 1;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            sign = -sign;
            out.push((a.clone(), sign));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let k = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))
            .unwrap();
        if m[pivot][col] == Complex64::new(0.0, 0.0) {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for row in col + 1..k {
            let factor = m[row][col] / p;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (upper, lower) = m.split_at_mut(row);
            for (target, pivot) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *target -= factor * pivot;
            }
        }
    }
    det
}

/// Determinant as the signed sum over permutations. O(k!); oracle use only.
pub fn levi_civita_determinant(m: &[Vec<Complex64>]) -> Complex64 {
    signed_permutations(m.len())
        .into_iter()
        .map(|(perm, sign)| {
            let prod = perm
                .iter()
                .enumerate()
                .fold(Complex64::new(1.0, 0.0), |acc, (r, &c)| acc * m[r][c]);
            prod * f64::from(sign)
        })
        .sum()
}

/// Symbolic determinant of a square matrix of expressions by Levi-Civita
/// expansion.
pub fn symbolic_determinant(m: &[Vec<Expr>]) -> Expr {
    let terms = signed_permutations(m.len())
        .into_iter()
        .map(|(perm, sign)| {
            let mut factors: Vec<Expr> = perm
                .iter()
                .enumerate()
                .map(|(r, &c)| m[r][c].clone())
                .collect();
            if sign < 0 {
                factors.push(Expr::real(-1.0));
            }
            Expr::mul(factors)
        })
        .collect();
    Expr::add(terms)
}

/// Symbolic Jacobian `d(f1..fk)/d(x1..xk)`.
pub fn jacobian_expr(fs: &[Expr], vars: &[&str]) -> Result<Expr, BracketError> {
    if fs.len() != vars.len() {
        return Err(BracketError::Arity {
            expected: vars.len(),
            found: fs.len(),
        });
    }
    let m: Vec<Vec<Expr>> = fs
        .iter()
        .map(|f| vars.iter().map(|v| f.diff(v)).collect())
        .collect();
    Ok(symbolic_determinant(&m))
}

/// Symbolic Poisson bracket.
pub fn poisson_expr(f: &Expr, g: &Expr, ps: &PhaseSpace) -> Expr {
    let mut terms = Vec::new();
    for j in 0..ps.dof() {
        let (q, p) = (ps.position(j), ps.momentum(j));
        terms.push(f.diff(q) * g.diff(p));
        terms.push(-(f.diff(p) * g.diff(q)));
    }
    Expr::add(terms)
}

/// Numeric Jacobian of `fs` with respect to `vars` at `b`.
pub fn jacobian_value(
    fs: &[Observable],
    vars: &[&str],
    b: &Binding,
    ps: &PhaseSpace,
) -> Result<Complex64, BracketError> {
    if fs.len() != vars.len() {
        return Err(BracketError::Arity {
            expected: vars.len(),
            found: fs.len(),
        });
    }
    let rows = fs
        .iter()
        .map(|f| {
            vars.iter()
                .map(|v| f.partial(v, ps).evaluate(b))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(determinant(rows))
}

/// Poisson bracket of two gradients given in `(q1, p1, ...)` order.
pub fn poisson_from_gradients(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.chunks_exact(2)
        .zip(b.chunks_exact(2))
        .map(|(fa, fb)| fa[0] * fb[1] - fa[1] * fb[0])
        .sum()
}

pub fn poisson(
    f: &Observable,
    g: &Observable,
    b: &Binding,
    _ps: &PhaseSpace,
) -> Result<Complex64, BracketError> {
    Ok(poisson_from_gradients(&f.gradient_at(b)?, &g.gradient_at(b)?))
}

/// Canonical 2n-ary Nambu bracket.
pub fn nambu(fs: &[Observable], b: &Binding, ps: &PhaseSpace) -> Result<Complex64, BracketError> {
    if fs.len() != ps.dim() {
        return Err(BracketError::Arity {
            expected: ps.dim(),
            found: fs.len(),
        });
    }
    let rows = fs
        .iter()
        .map(|f| f.gradient_at(b))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(determinant(rows))
}

/// Bracket of 2k arguments expanded recursively into Poisson brackets:
/// `{f1, ..., f2k} = sum over cyclic shifts of (f2..f2k) of
/// {f1, g1}_P {g2, ..., g_{2k-1}}`.
pub fn decomposed_bracket(
    fs: &[Observable],
    b: &Binding,
    ps: &PhaseSpace,
) -> Result<Complex64, BracketError> {
    if !fs.len().is_multiple_of(2) || fs.is_empty() {
        return Err(BracketError::OddArity(fs.len()));
    }
    if fs.len() > ps.dim() {
        return Err(BracketError::Arity {
            expected: ps.dim(),
            found: fs.len(),
        });
    }
    let grads = fs
        .iter()
        .map(|f| f.gradient_at(b))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(cyclic_expansion(&poisson_matrix(&grads)))
}

/// Matrix of pairwise Poisson brackets.
pub fn poisson_matrix(grads: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let k = grads.len();
    let mut m = vec![vec![Complex64::new(0.0, 0.0); k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let v = poisson_from_gradients(&grads[i], &grads[j]);
            m[i][j] = v;
            m[j][i] = -v;
        }
    }
    m
}

/// Recursive cyclic-sum expansion over an antisymmetric bracket matrix.
pub fn cyclic_expansion(pb: &[Vec<Complex64>]) -> Complex64 {
    let idx: Vec<usize> = (0..pb.len()).collect();
    expand(pb, &idx)
}

fn expand(pb: &[Vec<Complex64>], idx: &[usize]) -> Complex64 {
    if idx.len() == 2 {
        return pb[idx[0]][idx[1]];
    }
    let first = idx[0];
    let tail = &idx[1..];
    let mut total = Complex64::new(0.0, 0.0);
    let mut rotated = Vec::with_capacity(tail.len());
    for shift in 0..tail.len() {
        rotated.clear();
        rotated.extend_from_slice(&tail[shift..]);
        rotated.extend_from_slice(&tail[..shift]);
        let head = pb[first][rotated[0]];
        if head == Complex64::new(0.0, 0.0) {
            continue;
        }
        total += head * expand(pb, &rotated[1..]);
    }
    total
}
