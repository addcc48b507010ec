//! Exact arithmetic: rationals, sparse multivariate polynomials, vectors of
//! polynomials, Gröbner bases of submodules and dense rational linear algebra.

mod groebner;
mod linalg;
mod poly;

pub use groebner::{
    ideal_times_module, linear_relation_space, module_groebner, module_groebner_with_lift,
    normal_form, point_ideal, ModuleGB, MonomialOrder,
};
pub(crate) use groebner::relation_matrix;
pub use linalg::QMatrix;
pub use poly::{poly_arith, ArithOp, Monomial, Poly, PolyDisplay, PolyVector};

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Convenience constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

/// Exact rational equal to the binary value of a finite float.
pub fn rat_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}
