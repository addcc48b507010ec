use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// Exponent vector of a monomial.
///
/// `Ord` is graded reverse lexicographic: total degree first, then the
/// monomial with the *smaller* exponent in the last differing variable wins.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(num_vars: usize) -> Self {
        Monomial(vec![0; num_vars])
    }

    pub fn var(num_vars: usize, i: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        debug_assert!(self.divides(other));
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn cmp_lex(&self, other: &Monomial) -> Ordering {
        self.0.cmp(&other.0)
    }

    pub fn cmp_grevlex(&self, other: &Monomial) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        for (a, b) in self.0.iter().zip(&other.0).rev() {
            if a != b {
                return b.cmp(a);
            }
        }
        Ordering::Equal
    }

    fn fmt_with(&self, names: &[String], f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "{}", names[i])?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_grevlex(other)
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    num_vars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(num_vars: usize) -> Self {
        Poly {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: Rational) -> Self {
        let mut p = Poly::zero(num_vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(num_vars), c);
        }
        p
    }

    pub fn one(num_vars: usize) -> Self {
        Poly::constant(num_vars, Rational::one())
    }

    pub fn from_int(num_vars: usize, c: i64) -> Self {
        Poly::constant(num_vars, Rational::from_integer(c.into()))
    }

    pub fn var(num_vars: usize, i: usize) -> Self {
        Poly::monomial(num_vars, Monomial::var(num_vars, i), Rational::one())
    }

    pub fn monomial(num_vars: usize, m: Monomial, c: Rational) -> Self {
        assert_eq!(m.num_vars(), num_vars, "monomial arity");
        let mut p = Poly::zero(num_vars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging
    /// repeated monomials and dropping zeros.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Poly::zero(num_vars);
        for (m, c) in terms {
            assert_eq!(m.num_vars(), num_vars, "monomial arity");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending grevlex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Degree in a single variable; 0 for the zero polynomial.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    /// Greatest term in grevlex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one(self.num_vars))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    fn check_vars(&self, other: &Poly) -> Result<()> {
        if self.num_vars != other.num_vars {
            return Err(Error::Dimension(format!(
                "polynomials in {} and {} variables",
                self.num_vars, other.num_vars
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_vars(other)?;
        let mut out = Poly::zero(self.num_vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.num_vars);
        }
        Poly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.num_vars);
        }
        Poly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(t, a)| (t.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one(self.num_vars);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn partial_derivative(&self, var: usize) -> Result<Poly> {
        if var >= self.num_vars {
            return Err(Error::Dimension(format!(
                "variable index {var} out of range for {} variables",
                self.num_vars
            )));
        }
        let mut out = Poly::zero(self.num_vars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] -= 1;
            out.add_term(Monomial(exps), c * Rational::from_integer(e.into()));
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.num_vars {
            return Err(Error::Dimension(format!(
                "point of length {} for a polynomial in {} variables",
                point.len(),
                self.num_vars
            )));
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn evaluate_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .zip(point)
                    .fold(c.to_f64().unwrap_or(f64::NAN), |acc, (&e, x)| {
                        acc * x.powi(e as i32)
                    })
            })
            .sum()
    }

    /// Substitutes `value` for the variable `var`; the arity is unchanged.
    pub fn substitute(&self, var: usize, value: &Rational) -> Poly {
        let mut out = Poly::zero(self.num_vars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            let mut exps = m.0.clone();
            exps[var] = 0;
            let coeff = if e == 0 {
                c.clone()
            } else {
                c * num_traits::pow(value.clone(), e as usize)
            };
            out.add_term(Monomial(exps), coeff);
        }
        out
    }

    /// Re-expresses the polynomial in `new_num_vars` variables, sending old
    /// variable `i` to new variable `map[i]`. Variables mapped to `None` must
    /// not occur.
    pub fn remap(&self, new_num_vars: usize, map: &[Option<usize>]) -> Result<Poly> {
        let mut out = Poly::zero(new_num_vars);
        for (m, c) in &self.terms {
            let mut exps = vec![0; new_num_vars];
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => exps[j] += e,
                    None => {
                        return Err(Error::Precondition(format!(
                            "variable {i} still occurs and has no image"
                        )))
                    }
                }
            }
            out.add_term(Monomial(exps), c.clone());
        }
        Ok(out)
    }

    /// Replaces each variable `i` by the polynomial `images[i]` (all in a
    /// common ring).
    pub fn compose(&self, images: &[Poly]) -> Result<Poly> {
        if images.len() != self.num_vars {
            return Err(Error::Dimension(format!(
                "{} images for {} variables",
                images.len(),
                self.num_vars
            )));
        }
        let target = images.first().map_or(0, Poly::num_vars);
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (img, &e) in images.iter().zip(&m.0) {
                if e > 0 {
                    t = t.checked_mul(&img.pow(e))?;
                }
            }
            out = out.checked_add(&t)?;
        }
        Ok(out)
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }

    pub(crate) fn default_names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        // Highest terms first.
        for (k, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                m.fmt_with(self.names, f)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = Poly::default_names(self.num_vars);
        write!(f, "{}", self.display(&names))
    }
}

macro_rules! poly_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                self.$checked(rhs).expect("polynomial arity mismatch")
            }
        }
        impl $trait<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
        impl $trait<Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                self.$method(&rhs)
            }
        }
    };
}

poly_binop!(Add, add, checked_add);
poly_binop!(Sub, sub, checked_sub);
poly_binop!(Mul, mul, checked_mul);

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
}

pub fn poly_arith(a: &Poly, b: &Poly, op: ArithOp) -> Result<Poly> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Mul => a.checked_mul(b),
    }
}

/// Element of the free module `Q[x]^dim`, i.e. a polynomial vector field
/// `sum_i a_i d_i` when `dim` equals the number of variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyVector {
    num_vars: usize,
    components: Vec<Poly>,
}

impl PolyVector {
    pub fn new(components: Vec<Poly>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::Dimension("vector of dimension 0".into()));
        };
        let n = first.num_vars();
        if components.iter().any(|c| c.num_vars() != n) {
            return Err(Error::Dimension(
                "components with different numbers of variables".into(),
            ));
        }
        Ok(PolyVector {
            num_vars: n,
            components,
        })
    }

    pub fn zero(dim: usize, num_vars: usize) -> Self {
        assert!(dim >= 1, "vector of dimension 0");
        PolyVector {
            num_vars,
            components: vec![Poly::zero(num_vars); dim],
        }
    }

    /// The `i`-th standard basis vector (the coordinate field `d_i`).
    pub fn unit(dim: usize, num_vars: usize, i: usize) -> Self {
        let mut v = PolyVector::zero(dim, num_vars);
        v.components[i] = Poly::one(num_vars);
        v
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Poly {
        &self.components[i]
    }

    pub fn into_components(self) -> Vec<Poly> {
        self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    pub fn degree(&self) -> Option<u32> {
        self.components.iter().filter_map(Poly::degree).max()
    }

    fn check_shape(&self, other: &PolyVector) -> Result<()> {
        if self.dim() != other.dim() || self.num_vars != other.num_vars {
            return Err(Error::Dimension(format!(
                "vectors of shape ({}, {}) and ({}, {})",
                self.dim(),
                self.num_vars,
                other.dim(),
                other.num_vars
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &PolyVector) -> Result<PolyVector> {
        self.check_shape(other)?;
        Ok(PolyVector {
            num_vars: self.num_vars,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn checked_sub(&self, other: &PolyVector) -> Result<PolyVector> {
        self.check_shape(other)?;
        Ok(PolyVector {
            num_vars: self.num_vars,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> PolyVector {
        PolyVector {
            num_vars: self.num_vars,
            components: self.components.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn mul_poly(&self, f: &Poly) -> Result<PolyVector> {
        if f.num_vars() != self.num_vars {
            return Err(Error::Dimension(format!(
                "scalar in {} variables times vector in {}",
                f.num_vars(),
                self.num_vars
            )));
        }
        Ok(PolyVector {
            num_vars: self.num_vars,
            components: self.components.iter().map(|p| p * f).collect(),
        })
    }

    /// Rational linear combination `sum_i c_i v_i`.
    pub fn linear_combination(coeffs: &[Rational], vectors: &[PolyVector]) -> Result<PolyVector> {
        let Some(first) = vectors.first() else {
            return Err(Error::Dimension("empty combination".into()));
        };
        if coeffs.len() != vectors.len() {
            return Err(Error::Dimension(format!(
                "{} coefficients for {} vectors",
                coeffs.len(),
                vectors.len()
            )));
        }
        let mut acc = PolyVector::zero(first.dim(), first.num_vars);
        for (c, v) in coeffs.iter().zip(vectors) {
            if !c.is_zero() {
                acc = acc.checked_add(&v.scale(c))?;
            }
        }
        Ok(acc)
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Vec<Rational>> {
        self.components.iter().map(|p| p.evaluate(point)).collect()
    }

    pub fn evaluate_f64(&self, point: &[f64]) -> Vec<f64> {
        self.components.iter().map(|p| p.evaluate_f64(point)).collect()
    }

    pub fn substitute(&self, var: usize, value: &Rational) -> PolyVector {
        PolyVector {
            num_vars: self.num_vars,
            components: self
                .components
                .iter()
                .map(|p| p.substitute(var, value))
                .collect(),
        }
    }

    pub fn map_components<F>(&self, f: F) -> Result<PolyVector>
    where
        F: FnMut(&Poly) -> Result<Poly>,
    {
        PolyVector::new(self.components.iter().map(f).collect::<Result<Vec<_>>>()?)
    }
}

impl fmt::Display for PolyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = Poly::default_names(self.num_vars);
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|p| p.display(&names).to_string())
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn difference_of_squares() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let prod = &(&x + &y) * &(&x - &y);
        let expected = &x.pow(2) - &y.pow(2);
        assert_eq!(prod, expected);
    }

    #[test]
    fn derivative_of_x2y() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = &x.pow(2) * &y;
        let d = p.partial_derivative(0).unwrap();
        assert_eq!(d, (&x * &y).scale(&q(2)));
    }

    #[test]
    fn evaluate_at_point() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = &x.pow(2) + &y;
        assert_eq!(p.evaluate(&[q(2), q(3)]).unwrap(), q(7));
    }

    #[test]
    fn mismatched_arity_is_dimension_error() {
        let a = Poly::var(2, 0);
        let b = Poly::var(3, 0);
        assert!(matches!(
            poly_arith(&a, &b, ArithOp::Add),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            poly_arith(&a, &b, ArithOp::Mul),
            Err(Error::Dimension(_))
        ));
        assert!(a.evaluate(&[q(1)]).is_err());
    }

    #[test]
    fn no_zero_coefficients_after_cancellation() {
        let x = Poly::var(1, 0);
        let p = &x - &x;
        assert!(p.is_zero());
        assert_eq!(p.num_terms(), 0);
    }

    #[test]
    fn grevlex_orders_as_expected() {
        // x^2 > xy > y^2 > x > y > 1 in two variables.
        let m = |a, b| Monomial::from_exponents(vec![a, b]);
        let mut v = vec![m(0, 0), m(0, 1), m(1, 0), m(0, 2), m(1, 1), m(2, 0)];
        v.sort();
        assert_eq!(v, vec![m(0, 0), m(0, 1), m(1, 0), m(0, 2), m(1, 1), m(2, 0)]);
        // degree 3 in three variables: x*z^2 < y^3
        let a = Monomial::from_exponents(vec![1, 0, 2]);
        let b = Monomial::from_exponents(vec![0, 3, 0]);
        assert!(a < b);
    }

    #[test]
    fn display_is_readable() {
        let names = vec!["x".to_string(), "y".to_string()];
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = &(&x.pow(2) - &y.scale(&Rational::new(1.into(), 3.into()))) + &Poly::from_int(2, -4);
        assert_eq!(p.display(&names).to_string(), "x^2 - 1/3*y - 4");
    }
}
