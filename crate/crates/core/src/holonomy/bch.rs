//! Baker–Campbell–Hausdorff series on a structure-constant presentation,
//! via the Varadarajan recursion for the homogeneous parts `Z_n`:
//!
//! `(n+1) Z_{n+1} = 1/2 [X - Y, Z_n]
//!     + sum_{p>=1} B_{2p}/(2p)! sum_{k_1+..+k_{2p}=n} [Z_{k_1}, [.., [Z_{k_2p}, X + Y]..]]`

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{rat_to_f64, Rational};
use crate::pointwise::{lie_algebra_analysis, LieAlgebraPresentation};

pub const DEFAULT_BCH_ORDER: usize = 8;

/// Scalars the series can be evaluated over.
pub trait BchScalar: Clone {
    fn zero() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn is_zero(&self) -> bool;
}

impl BchScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_rational(r: &Rational) -> Self {
        rat_to_f64(r)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl BchScalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

fn bracket<T: BchScalar>(l: &LieAlgebraPresentation, u: &[T], v: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); l.dim];
    for (a, ua) in u.iter().enumerate() {
        if ua.is_zero() {
            continue;
        }
        for (b, vb) in v.iter().enumerate() {
            if vb.is_zero() {
                continue;
            }
            let s = ua.mul(vb);
            for (o, c) in out.iter_mut().zip(&l.structure_constants[a][b]) {
                if !Zero::is_zero(c) {
                    *o = o.add(&s.mul(&T::from_rational(c)));
                }
            }
        }
    }
    out
}

fn axpy<T: BchScalar>(acc: &mut [T], c: &T, v: &[T]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a = a.add(&c.mul(x));
    }
}

/// Bernoulli numbers `B_0..=B_max` (convention `B_1 = -1/2`).
pub fn bernoulli_numbers(max: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(max + 1);
    b.push(Rational::one());
    for m in 1..=max {
        let mut binom = Rational::one(); // C(m+1, 0)
        let mut s = <Rational as Zero>::zero();
        for (k, bk) in b.iter().enumerate() {
            s += &binom * bk;
            binom = binom * Rational::from_integer((m + 1 - k).into()) / Rational::from_integer((k + 1).into());
        }
        b.push(-s / Rational::from_integer((m + 1).into()));
    }
    b
}

fn factorial(n: usize) -> Rational {
    (1..=n).fold(Rational::one(), |acc, k| acc * Rational::from_integer(k.into()))
}

/// Homogeneous parts `Z_1..Z_order` of `log(exp X exp Y)`.
pub fn bch_terms<T: BchScalar>(l: &LieAlgebraPresentation, x: &[T], y: &[T], order: usize) -> Result<Vec<Vec<T>>> {
    if order == 0 {
        return Err(Error::Precondition("BCH order must be at least 1".into()));
    }
    if x.len() != l.dim || y.len() != l.dim {
        return Err(Error::Dimension(format!(
            "coefficient vectors must have length {}",
            l.dim
        )));
    }
    let dim = l.dim;
    let sum: Vec<T> = x.iter().zip(y).map(|(a, b)| a.add(b)).collect();
    let minus_one = T::from_rational(&-Rational::one());
    let diff: Vec<T> = x.iter().zip(y).map(|(a, b)| a.add(&minus_one.mul(b))).collect();
    let bern = bernoulli_numbers(order);
    let half = T::from_rational(&Rational::new(1.into(), 2.into()));

    // z[k] = Z_k (index 0 unused)
    let mut z: Vec<Vec<T>> = vec![vec![T::zero(); dim], sum.clone()];
    for n in 1..order {
        let mut next = bracket(l, &diff, &z[n]);
        next.iter_mut().for_each(|v| *v = v.mul(&half));
        // nested[j][m]: compositions of m into j parts, innermost X + Y
        let pmax = n / 2;
        if pmax >= 1 {
            let mut nested: Vec<Vec<Vec<T>>> = vec![vec![vec![T::zero(); dim]; n + 1]; 2 * pmax + 1];
            nested[0][0] = sum.clone();
            for j in 1..=2 * pmax {
                for m in j..=n {
                    let mut acc = vec![T::zero(); dim];
                    for k in 1..=m - (j - 1) {
                        let inner = &nested[j - 1][m - k];
                        if inner.iter().all(BchScalar::is_zero) {
                            continue;
                        }
                        let br = bracket(l, &z[k], inner);
                        axpy(&mut acc, &T::from_rational(&Rational::one()), &br);
                    }
                    nested[j][m] = acc;
                }
            }
            for p in 1..=pmax {
                let c = T::from_rational(&(&bern[2 * p] / factorial(2 * p)));
                axpy(&mut next, &c, &nested[2 * p][n]);
            }
        }
        let inv = T::from_rational(&Rational::new(1.into(), ((n + 1) as i64).into()));
        next.iter_mut().for_each(|v| *v = v.mul(&inv));
        z.push(next);
    }
    z.remove(0);
    Ok(z)
}

/// `log(exp v1 exp v2)` truncated at total degree `order`; exact once the
/// order reaches the nilpotency class.
pub fn bch<T: BchScalar>(l: &LieAlgebraPresentation, v1: &[T], v2: &[T], order: usize) -> Result<Vec<T>> {
    let analysis = lie_algebra_analysis(l);
    let effective = match analysis.nilpotency_class {
        Some(c) => order.min(c.max(1)),
        None => order,
    };
    let terms = bch_terms(l, v1, v2, effective)?;
    let mut out = vec![T::zero(); l.dim];
    for t in &terms {
        axpy(&mut out, &T::from_rational(&Rational::one()), t);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    fn heisenberg() -> LieAlgebraPresentation {
        let mut c = vec![vec![vec![rat(0, 1); 3]; 3]; 3];
        c[0][1][2] = rat(1, 1);
        c[1][0][2] = rat(-1, 1);
        LieAlgebraPresentation::from_structure_constants(c).unwrap()
    }

    #[test]
    fn bernoulli() {
        let b = bernoulli_numbers(8);
        assert_eq!(b[1], rat(-1, 2));
        assert_eq!(b[2], rat(1, 6));
        assert_eq!(b[4], rat(-1, 30));
        assert_eq!(b[6], rat(1, 42));
        assert_eq!(b[8], rat(-1, 30));
        assert_eq!(b[3], rat(0, 1));
    }

    #[test]
    fn heisenberg_second_order_is_exact() {
        let l = heisenberg();
        let a = [rat(1, 1), rat(0, 1), rat(0, 1)];
        let b = [rat(0, 1), rat(1, 1), rat(0, 1)];
        assert_eq!(bch(&l, &a, &b, 2).unwrap(), vec![rat(1, 1), rat(1, 1), rat(1, 2)]);
        assert_eq!(bch(&l, &a, &b, 8).unwrap(), vec![rat(1, 1), rat(1, 1), rat(1, 2)]);
    }

    #[test]
    fn known_low_order_terms() {
        // Z_3 = 1/12 [X,[X,Y]] - 1/12 [Y,[X,Y]], Z_4 = -1/24 [Y,[X,[X,Y]]]
        let mut c = vec![vec![vec![rat(0, 1); 3]; 3]; 3];
        // so(3): [e0,e1]=e2, [e1,e2]=e0, [e2,e0]=e1
        for (a, b, g) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            c[a][b][g] = rat(1, 1);
            c[b][a][g] = rat(-1, 1);
        }
        let l = LieAlgebraPresentation::from_structure_constants(c).unwrap();
        let x = vec![rat(1, 2), rat(-1, 3), rat(1, 1)];
        let y = vec![rat(2, 1), rat(1, 5), rat(-1, 4)];
        let z = bch_terms(&l, &x, &y, 4).unwrap();
        let br = |u: &[Rational], v: &[Rational]| l.bracket(u, v);
        let xy = br(&x, &y);
        let z2: Vec<Rational> = xy.iter().map(|v| v / rat(2, 1)).collect();
        assert_eq!(z[1], z2);
        let xxy = br(&x, &xy);
        let yxy = br(&y, &xy);
        let z3: Vec<Rational> = xxy.iter().zip(&yxy).map(|(a, b)| (a - b) / rat(12, 1)).collect();
        assert_eq!(z[2], z3);
        let yxxy = br(&y, &xxy);
        let z4: Vec<Rational> = yxxy.iter().map(|a| -a / rat(24, 1)).collect();
        assert_eq!(z[3], z4);
    }
}
