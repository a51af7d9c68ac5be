//! Symbolic linear operators on the ladder model.
//!
//! A rule is an expression tree over the primitive actions (ladder, wedge,
//! contraction, mode swap). Application is exact rule-by-rule evaluation on
//! basis elements; adjoints are structural.

use crate::basis::{BasisElement, FormWord, Generator, Space};
use crate::error::{Error, Result};
use crate::sparse::SparseVector;
use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

#[derive(Debug)]
enum Expr {
    Zero,
    Identity,
    Create(usize),
    Annihilate(usize),
    Wedge(Generator),
    Contract(Generator),
    Chi(usize, usize),
    Scale(Complex64, Arc<Expr>),
    Sum(Vec<Arc<Expr>>),
    /// Factors applied right to left.
    Product(Vec<Arc<Expr>>),
}

fn act(expr: &Expr, e: &BasisElement, c: Complex64, out: &mut SparseVector) {
    match expr {
        Expr::Zero => {}
        Expr::Identity => out.add_term(e.clone(), c),
        Expr::Create(j) => {
            let mut beta = e.beta.clone();
            let f = ((beta[*j] + 1) as f64).sqrt();
            beta[*j] += 1;
            out.add_term(BasisElement::new(beta, e.form), c * f);
        }
        Expr::Annihilate(j) => {
            if e.beta[*j] == 0 {
                return;
            }
            let mut beta = e.beta.clone();
            let f = (beta[*j] as f64).sqrt();
            beta[*j] -= 1;
            out.add_term(BasisElement::new(beta, e.form), c * f);
        }
        Expr::Wedge(g) => {
            if let Some((w, s)) = e.form.wedge(*g) {
                out.add_term(BasisElement::new(e.beta.clone(), w), c * s);
            }
        }
        Expr::Contract(g) => {
            if let Some((w, s)) = e.form.contract(*g) {
                out.add_term(BasisElement::new(e.beta.clone(), w), c * s);
            }
        }
        Expr::Chi(i, j) => {
            let (w, s) = swap_word(&e.form, *i, *j);
            let mut beta = e.beta.clone();
            beta.swap(*i, *j);
            out.add_term(BasisElement::new(beta, w), c * s);
        }
        Expr::Scale(s, inner) => act(inner, e, c * s, out),
        Expr::Sum(parts) => {
            for p in parts {
                act(p, e, c, out);
            }
        }
        Expr::Product(factors) => {
            let mut cur = SparseVector::new();
            cur.add_term(e.clone(), c);
            for f in factors.iter().rev() {
                if cur.is_empty() {
                    return;
                }
                let mut next = SparseVector::new();
                for (el, a) in cur.iter() {
                    act(f, el, *a, &mut next);
                }
                cur = next;
            }
            out.axpy(Complex64::new(1.0, 0.0), &cur);
        }
    }
}

/// Image of a word under the swap of modes i and j, with reordering sign.
fn swap_word(form: &FormWord, i: usize, j: usize) -> (FormWord, f64) {
    let swap = |m: usize| {
        if m == i {
            j
        } else if m == j {
            i
        } else {
            m
        }
    };
    let mut images = Vec::with_capacity(form.degree() as usize);
    for m in 0..32 {
        if form.holo >> m & 1 == 1 {
            images.push(Generator::Holo(swap(m)));
        }
    }
    for m in 0..32 {
        if form.anti >> m & 1 == 1 {
            images.push(Generator::Anti(swap(m)));
        }
    }
    for q in 0..32 {
        if form.central >> q & 1 == 1 {
            images.push(Generator::Central(q));
        }
    }
    FormWord::from_generators(&images).expect("a permutation of distinct generators")
}

fn adjoint_expr(expr: &Arc<Expr>) -> Arc<Expr> {
    Arc::new(match &**expr {
        Expr::Zero => Expr::Zero,
        Expr::Identity => Expr::Identity,
        Expr::Create(j) => Expr::Annihilate(*j),
        Expr::Annihilate(j) => Expr::Create(*j),
        Expr::Wedge(g) => Expr::Contract(*g),
        Expr::Contract(g) => Expr::Wedge(*g),
        Expr::Chi(i, j) => Expr::Chi(*i, *j),
        Expr::Scale(s, inner) => Expr::Scale(s.conj(), adjoint_expr(inner)),
        Expr::Sum(parts) => Expr::Sum(parts.iter().map(adjoint_expr).collect()),
        Expr::Product(factors) => Expr::Product(factors.iter().rev().map(adjoint_expr).collect()),
    })
}

fn fmt_expr(expr: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match expr {
        Expr::Zero => write!(f, "0"),
        Expr::Identity => write!(f, "Id"),
        Expr::Create(j) => write!(f, "a*{}", j + 1),
        Expr::Annihilate(j) => write!(f, "a{}", j + 1),
        Expr::Wedge(g) => write!(f, "e({g})"),
        Expr::Contract(g) => write!(f, "i({g})"),
        Expr::Chi(i, j) => write!(f, "chi{}{}", i + 1, j + 1),
        Expr::Scale(s, inner) => {
            write!(f, "({}{:+}i)*", s.re, s.im)?;
            fmt_expr(inner, f)
        }
        Expr::Sum(parts) => {
            write!(f, "(")?;
            for (k, p) in parts.iter().enumerate() {
                if k > 0 {
                    write!(f, " + ")?;
                }
                fmt_expr(p, f)?;
            }
            write!(f, ")")
        }
        Expr::Product(factors) => {
            for (k, p) in factors.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                fmt_expr(p, f)?;
            }
            Ok(())
        }
    }
}

/// A linear operator on span{ψ_β ⊗ ω} for a fixed [`Space`].
///
/// Rules are immutable and cheap to clone; they can be shared across threads.
#[derive(Clone, Debug)]
pub struct LinearRule {
    space: Space,
    expr: Arc<Expr>,
}

impl fmt::Display for LinearRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_expr(&self.expr, f)
    }
}

impl LinearRule {
    fn wrap(space: Space, expr: Expr) -> Self {
        LinearRule {
            space,
            expr: Arc::new(expr),
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn zero(space: Space) -> Self {
        Self::wrap(space, Expr::Zero)
    }

    pub fn identity(space: Space) -> Self {
        Self::wrap(space, Expr::Identity)
    }

    /// Dimensionless a_j*.
    pub fn creation(space: Space, j: usize) -> Result<Self> {
        space.check_mode(j)?;
        Ok(Self::wrap(space, Expr::Create(j)))
    }

    pub fn annihilation(space: Space, j: usize) -> Result<Self> {
        space.check_mode(j)?;
        Ok(Self::wrap(space, Expr::Annihilate(j)))
    }

    /// Exterior multiplication e(g).
    pub fn wedge(space: Space, g: Generator) -> Result<Self> {
        space.check_generator(g)?;
        Ok(Self::wrap(space, Expr::Wedge(g)))
    }

    /// Contraction with the frame vector dual to g.
    pub fn contract(space: Space, g: Generator) -> Result<Self> {
        space.check_generator(g)?;
        Ok(Self::wrap(space, Expr::Contract(g)))
    }

    /// Swap of modes i and j on states and forms.
    pub fn chi(space: Space, i: usize, j: usize) -> Result<Self> {
        space.check_mode(i)?;
        space.check_mode(j)?;
        if i == j {
            return Err(Error::Precondition("chi needs distinct modes".into()));
        }
        Ok(Self::wrap(space, Expr::Chi(i, j)))
    }

    pub fn name(&self) -> String {
        self.to_string()
    }

    pub fn adjoint_name(&self) -> String {
        self.adjoint().to_string()
    }

    fn check(&self, other: &LinearRule) -> Result<()> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.space, other.space
            )));
        }
        Ok(())
    }

    pub fn scale(&self, c: Complex64) -> LinearRule {
        if c == Complex64::new(1.0, 0.0) {
            return self.clone();
        }
        if c == Complex64::new(0.0, 0.0) {
            return LinearRule::zero(self.space);
        }
        Self::wrap(self.space, Expr::Scale(c, self.expr.clone()))
    }

    pub fn scale_real(&self, c: f64) -> LinearRule {
        self.scale(Complex64::new(c, 0.0))
    }

    /// self ∘ other.
    pub fn compose(&self, other: &LinearRule) -> Result<LinearRule> {
        self.check(other)?;
        if matches!(*self.expr, Expr::Zero) || matches!(*other.expr, Expr::Zero) {
            return Ok(LinearRule::zero(self.space));
        }
        let mut factors = Vec::new();
        for r in [self, other] {
            match &*r.expr {
                Expr::Product(fs) => factors.extend(fs.iter().cloned()),
                Expr::Identity => {}
                _ => factors.push(r.expr.clone()),
            }
        }
        Ok(match factors.len() {
            0 => LinearRule::identity(self.space),
            1 => LinearRule {
                space: self.space,
                expr: factors.pop().unwrap(),
            },
            _ => Self::wrap(self.space, Expr::Product(factors)),
        })
    }

    pub fn add(&self, other: &LinearRule) -> Result<LinearRule> {
        self.check(other)?;
        let mut parts = Vec::new();
        for r in [self, other] {
            match &*r.expr {
                Expr::Sum(ps) => parts.extend(ps.iter().cloned()),
                Expr::Zero => {}
                _ => parts.push(r.expr.clone()),
            }
        }
        Ok(match parts.len() {
            0 => LinearRule::zero(self.space),
            1 => LinearRule {
                space: self.space,
                expr: parts.pop().unwrap(),
            },
            _ => Self::wrap(self.space, Expr::Sum(parts)),
        })
    }

    pub fn sub(&self, other: &LinearRule) -> Result<LinearRule> {
        self.add(&other.scale_real(-1.0))
    }

    /// Sum of rules sharing one space.
    pub fn sum<'a, I: IntoIterator<Item = &'a LinearRule>>(space: Space, rules: I) -> Result<LinearRule> {
        let mut parts = Vec::new();
        for r in rules {
            if r.space != space {
                return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", r.space, space)));
            }
            match &*r.expr {
                Expr::Sum(ps) => parts.extend(ps.iter().cloned()),
                Expr::Zero => {}
                _ => parts.push(r.expr.clone()),
            }
        }
        Ok(match parts.len() {
            0 => LinearRule::zero(space),
            1 => LinearRule {
                space,
                expr: parts.pop().unwrap(),
            },
            _ => Self::wrap(space, Expr::Sum(parts)),
        })
    }

    /// Product of rules, leftmost applied last.
    pub fn product<'a, I: IntoIterator<Item = &'a LinearRule>>(space: Space, rules: I) -> Result<LinearRule> {
        let mut acc = LinearRule::identity(space);
        for r in rules {
            acc = acc.compose(r)?;
        }
        Ok(acc)
    }

    pub fn adjoint(&self) -> LinearRule {
        LinearRule {
            space: self.space,
            expr: adjoint_expr(&self.expr),
        }
    }

    /// [A, B] = AB − BA.
    pub fn commutator(&self, other: &LinearRule) -> Result<LinearRule> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    /// {A, B} = AB + BA.
    pub fn anticommutator(&self, other: &LinearRule) -> Result<LinearRule> {
        self.compose(other)?.add(&other.compose(self)?)
    }

    fn check_element(&self, e: &BasisElement) {
        assert_eq!(
            e.beta.len(),
            self.space.modes,
            "basis element has {} modes, rule expects {}",
            e.beta.len(),
            self.space.modes
        );
    }

    pub fn apply_element(&self, e: &BasisElement) -> SparseVector {
        self.check_element(e);
        let mut out = SparseVector::new();
        act(&self.expr, e, Complex64::new(1.0, 0.0), &mut out);
        out
    }

    pub fn apply(&self, v: &SparseVector) -> SparseVector {
        let mut out = SparseVector::new();
        for (e, c) in v.iter() {
            self.check_element(e);
            act(&self.expr, e, *c, &mut out);
        }
        out
    }
}

impl Mul<&LinearRule> for &LinearRule {
    type Output = LinearRule;
    /// Composition; panics if the spaces differ (use [`LinearRule::compose`] to handle that).
    fn mul(self, rhs: &LinearRule) -> LinearRule {
        self.compose(rhs).expect("composition of rules on different spaces")
    }
}

impl Add<&LinearRule> for &LinearRule {
    type Output = LinearRule;
    fn add(self, rhs: &LinearRule) -> LinearRule {
        LinearRule::add(self, rhs).expect("sum of rules on different spaces")
    }
}

impl Sub<&LinearRule> for &LinearRule {
    type Output = LinearRule;
    fn sub(self, rhs: &LinearRule) -> LinearRule {
        LinearRule::sub(self, rhs).expect("difference of rules on different spaces")
    }
}

impl Mul<&LinearRule> for Complex64 {
    type Output = LinearRule;
    fn mul(self, rhs: &LinearRule) -> LinearRule {
        rhs.scale(self)
    }
}

impl Mul<&LinearRule> for f64 {
    type Output = LinearRule;
    fn mul(self, rhs: &LinearRule) -> LinearRule {
        rhs.scale_real(self)
    }
}

impl Neg for &LinearRule {
    type Output = LinearRule;
    fn neg(self) -> LinearRule {
        self.scale_real(-1.0)
    }
}

/// Shorthand constructors bound to one space, for assembling operator formulas.
#[derive(Clone, Copy, Debug)]
pub struct Ops {
    pub space: Space,
}

impl Ops {
    pub fn new(space: Space) -> Self {
        Ops { space }
    }
    pub fn id(&self) -> LinearRule {
        LinearRule::identity(self.space)
    }
    pub fn zero(&self) -> LinearRule {
        LinearRule::zero(self.space)
    }
    pub fn cre(&self, j: usize) -> LinearRule {
        LinearRule::creation(self.space, j).expect("mode index")
    }
    pub fn ann(&self, j: usize) -> LinearRule {
        LinearRule::annihilation(self.space, j).expect("mode index")
    }
    pub fn e(&self, g: Generator) -> LinearRule {
        LinearRule::wedge(self.space, g).expect("generator index")
    }
    pub fn i(&self, g: Generator) -> LinearRule {
        LinearRule::contract(self.space, g).expect("generator index")
    }
    pub fn chi(&self, i: usize, j: usize) -> LinearRule {
        LinearRule::chi(self.space, i, j).expect("mode index")
    }
    pub fn prod(&self, rules: &[&LinearRule]) -> LinearRule {
        LinearRule::product(self.space, rules.iter().copied()).expect("same space")
    }
    pub fn sum(&self, rules: &[LinearRule]) -> LinearRule {
        LinearRule::sum(self.space, rules.iter()).expect("same space")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Generator::*;

    fn sp(n: usize) -> Space {
        Space::new(n, 1).unwrap()
    }

    fn el(beta: &[u32], gens: &[Generator]) -> (BasisElement, f64) {
        let (w, s) = FormWord::from_generators(gens).unwrap();
        (BasisElement::new(beta.to_vec(), w), s)
    }

    #[test]
    fn creation_on_vacuum() {
        let o = Ops::new(sp(2));
        let v = o.cre(0).apply_element(&BasisElement::vacuum(2));
        assert_eq!(v.len(), 1);
        let (target, _) = el(&[1, 0], &[]);
        assert_eq!(v.get(&target), Complex64::new(1.0, 0.0));
        assert!(o.ann(0).apply_element(&BasisElement::vacuum(2)).is_empty());
    }

    #[test]
    fn ladder_commutator() {
        let o = Ops::new(sp(2));
        let c = o.ann(0).commutator(&o.cre(0)).unwrap();
        let (x, _) = el(&[3, 5], &[]);
        let v = c.apply_element(&x);
        assert!((v.get(&x) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert_eq!(v.len(), 1);
    }

    #[test]
    fn wedge_examples() {
        let o = Ops::new(sp(2));
        let (x, _) = el(&[0, 0], &[Holo(1)]);
        let v = o.e(Holo(0)).apply_element(&x);
        let (t, s) = el(&[0, 0], &[Holo(0), Holo(1)]);
        assert_eq!(s, 1.0);
        assert_eq!(v.get(&t), Complex64::new(1.0, 0.0));
        assert!(o.e(Holo(1)).apply_element(&t).is_empty());
        let (w, _) = el(&[0, 0], &[Central(0)]);
        let v = o.e(Anti(0)).apply_element(&w);
        let (t, _) = el(&[0, 0], &[Anti(0), Central(0)]);
        assert_eq!(v.get(&t), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn contract_leading() {
        let o = Ops::new(sp(2));
        let (x, _) = el(&[0, 0], &[Holo(0), Holo(1)]);
        let (t, _) = el(&[0, 0], &[Holo(1)]);
        assert_eq!(o.i(Holo(0)).apply_element(&x).get(&t), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn chi_swaps_with_sign() {
        let o = Ops::new(sp(2));
        let (x, _) = el(&[2, 0], &[Holo(0), Anti(1)]);
        let v = o.chi(0, 1).apply_element(&x);
        let (t, s) = el(&[0, 2], &[Holo(1), Anti(0)]);
        assert_eq!(v.get(&t), Complex64::new(s, 0.0));
        let (x, _) = el(&[0, 0], &[Holo(0), Holo(1)]);
        let (t, _) = el(&[0, 0], &[Holo(0), Holo(1)]);
        assert_eq!(o.chi(0, 1).apply_element(&x).get(&t), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn mismatched_spaces_error() {
        let a = LinearRule::creation(sp(1), 0).unwrap();
        let b = LinearRule::creation(sp(2), 0).unwrap();
        assert!(matches!(a.compose(&b), Err(Error::DimensionMismatch(_))));
        assert!(LinearRule::creation(sp(1), 1).is_err());
    }

    #[test]
    fn adjoint_names() {
        let o = Ops::new(sp(1));
        assert_eq!(o.cre(0).adjoint_name(), "a1");
        assert_eq!(o.e(Holo(0)).adjoint_name(), "i(t1)");
    }
}
