//! Test-only helpers, including an independent membership oracle.
#![allow(dead_code)]

use std::collections::BTreeMap;

use folhol_core::exactalg::{Monomial, Poly, PolyVector, Rational};
use num_traits::{One, Zero};
use rand::Rng;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn qq(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn random_poly<R: Rng>(rng: &mut R, nvars: usize, max_deg: u32, terms: usize) -> Poly {
    let mut p = Poly::zero(nvars);
    for _ in 0..terms {
        let mut exps = vec![0u32; nvars];
        let mut budget = rng.gen_range(0..=max_deg);
        while budget > 0 {
            exps[rng.gen_range(0..nvars)] += 1;
            budget -= 1;
        }
        let c = qq(rng.gen_range(-5..=5), rng.gen_range(1..=3));
        p = &p + &Poly::monomial(nvars, Monomial::from_exponents(exps), c);
    }
    p
}

pub fn random_field<R: Rng>(rng: &mut R, dim: usize, max_deg: u32) -> PolyVector {
    PolyVector::new((0..dim).map(|_| random_poly(rng, dim, max_deg, 3)).collect()).unwrap()
}

fn monomials_up_to(nvars: usize, deg: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; nvars]];
    let mut layer = out.clone();
    for _ in 0..deg {
        let mut next: Vec<Vec<u32>> = Vec::new();
        for m in &layer {
            for v in 0..nvars {
                let mut e = m.clone();
                e[v] += 1;
                if !next.contains(&e) {
                    next.push(e);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Membership of `v` in the module generated by `gens`, deciding only
/// whether cofactors of degree <= `bound - deg(g)` exist. Plain Gaussian
/// elimination over the rationals on monomial coefficients.
pub fn truncated_jet_member(gens: &[PolyVector], v: &PolyVector, bound: u32) -> bool {
    let nvars = v.num_vars();
    let rank = v.dim();
    // columns: (generator, multiplier monomial); rows: (component, monomial)
    let mut row_index: BTreeMap<(usize, Vec<u32>), usize> = BTreeMap::new();
    let mut columns: Vec<BTreeMap<usize, Rational>> = Vec::new();
    let key = |c: usize, e: Vec<u32>, idx: &mut BTreeMap<(usize, Vec<u32>), usize>| {
        let n = idx.len();
        *idx.entry((c, e)).or_insert(n)
    };
    for g in gens {
        let gdeg = g.degree().unwrap_or(0);
        if gdeg > bound {
            continue;
        }
        for m in monomials_up_to(nvars, bound - gdeg) {
            let mut col = BTreeMap::new();
            for c in 0..rank {
                for (mono, coef) in g.component(c).terms() {
                    let e: Vec<u32> = mono.exponents().iter().zip(&m).map(|(a, b)| a + b).collect();
                    let r = key(c, e, &mut row_index);
                    *col.entry(r).or_insert_with(Rational::zero) += coef;
                }
            }
            columns.push(col);
        }
    }
    let mut rhs = BTreeMap::new();
    for c in 0..rank {
        for (mono, coef) in v.component(c).terms() {
            let r = key(c, mono.exponents().to_vec(), &mut row_index);
            rhs.insert(r, coef.clone());
        }
    }
    let nrows = row_index.len();
    let ncols = columns.len();
    let mut a = vec![vec![Rational::zero(); ncols + 1]; nrows];
    for (j, col) in columns.iter().enumerate() {
        for (r, val) in col {
            a[*r][j] = val.clone();
        }
    }
    for (r, val) in rhs {
        a[r][ncols] = val;
    }
    // forward elimination; inconsistent iff a row reduces to [0 .. 0 | c != 0]
    let mut pivot_row = 0;
    for col in 0..ncols {
        let Some(p) = (pivot_row..nrows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(pivot_row, p);
        let inv = Rational::one() / a[pivot_row][col].clone();
        for r in pivot_row + 1..nrows {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            for k in col..=ncols {
                let sub = &f * &a[pivot_row][k];
                a[r][k] -= sub;
            }
        }
        pivot_row += 1;
    }
    (pivot_row..nrows).all(|r| a[r][ncols].is_zero())
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}
