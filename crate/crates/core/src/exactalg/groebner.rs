//! Buchberger's algorithm for submodules of `Q[x_1..x_n]^r`.
//!
//! Module terms are ordered term-over-position: monomials are compared
//! first, and ties are broken by position with `e_0 > e_1 > ...`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use super::linalg::QMatrix;
use super::poly::{Monomial, Poly, PolyVector};
use super::Rational;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    /// Graded reverse lexicographic.
    #[default]
    GrevLex,
    /// Pure lexicographic with `x_1 > x_2 > ...`.
    Lex,
}

impl MonomialOrder {
    pub fn cmp(self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::GrevLex => a.cmp_grevlex(b),
            MonomialOrder::Lex => a.cmp_lex(b),
        }
    }

    fn cmp_key(self, a: (&Monomial, usize), b: (&Monomial, usize)) -> Ordering {
        self.cmp(a.0, b.0).then(b.1.cmp(&a.1))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Term {
    mono: Monomial,
    pos: usize,
    coeff: Rational,
}

/// Module element as a list of terms in strictly descending order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Elem(Vec<Term>);

impl Elem {
    fn from_vector(v: &PolyVector, order: MonomialOrder) -> Elem {
        let mut terms: Vec<Term> = v
            .components()
            .iter()
            .enumerate()
            .flat_map(|(pos, p)| {
                p.terms().map(move |(m, c)| Term {
                    mono: m.clone(),
                    pos,
                    coeff: c.clone(),
                })
            })
            .collect();
        terms.sort_by(|a, b| order.cmp_key((&b.mono, b.pos), (&a.mono, a.pos)));
        Elem(terms)
    }

    fn to_vector(&self, rank: usize, num_vars: usize) -> PolyVector {
        let mut comps: Vec<Vec<(Monomial, Rational)>> = vec![Vec::new(); rank];
        for t in &self.0 {
            comps[t.pos].push((t.mono.clone(), t.coeff.clone()));
        }
        PolyVector::new(
            comps
                .into_iter()
                .map(|ts| Poly::from_terms(num_vars, ts))
                .collect(),
        )
        .expect("rank >= 1")
    }

    fn to_polys(&self, rank: usize, num_vars: usize) -> Vec<Poly> {
        self.to_vector(rank, num_vars).into_components()
    }

    fn unit(pos: usize, num_vars: usize) -> Elem {
        Elem(vec![Term {
            mono: Monomial::one(num_vars),
            pos,
            coeff: Rational::one(),
        }])
    }

    fn lead(&self) -> &Term {
        &self.0[0]
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn scale(&self, c: &Rational) -> Elem {
        Elem(
            self.0
                .iter()
                .map(|t| Term {
                    mono: t.mono.clone(),
                    pos: t.pos,
                    coeff: &t.coeff * c,
                })
                .collect(),
        )
    }
}

/// `a + c * m * b`, all in descending order.
fn axpy(a: &[Term], c: &Rational, m: &Monomial, b: &[Term], order: MonomialOrder) -> Vec<Term> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut i = 0;
    let mut j = 0;
    let mut bm: Option<Monomial> = None;
    while i < a.len() || j < b.len() {
        if j < b.len() && bm.is_none() {
            bm = Some(b[j].mono.mul(m));
        }
        let take = if j == b.len() {
            Ordering::Greater
        } else if i == a.len() {
            Ordering::Less
        } else {
            order.cmp_key((&a[i].mono, a[i].pos), (bm.as_ref().unwrap(), b[j].pos))
        };
        match take {
            Ordering::Greater => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Less => {
                out.push(Term {
                    mono: bm.take().unwrap(),
                    pos: b[j].pos,
                    coeff: c * &b[j].coeff,
                });
                j += 1;
            }
            Ordering::Equal => {
                let s = &a[i].coeff + c * &b[j].coeff;
                let mono = bm.take().unwrap();
                if !s.is_zero() {
                    out.push(Term {
                        mono,
                        pos: a[i].pos,
                        coeff: s,
                    });
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

struct Reducer<'a> {
    order: MonomialOrder,
    basis: &'a [Elem],
    reps: Option<&'a [Elem]>,
}

impl Reducer<'_> {
    /// Full reduction. Returns the remainder and, when tracking, the
    /// accumulated cofactor combination `sum_k q_k * reps[k]`.
    fn reduce(&self, p: &Elem, skip: Option<usize>) -> (Elem, Option<Elem>) {
        let mut rem = Vec::new();
        let mut acc = self.reps.map(|_| Vec::new());
        let mut p: Vec<Term> = p.0.clone();
        let mut start = 0;
        while start < p.len() {
            let lt = &p[start];
            let divisor = self.basis.iter().enumerate().find(|(k, g)| {
                Some(*k) != skip && g.lead().pos == lt.pos && g.lead().mono.divides(&lt.mono)
            });
            match divisor {
                Some((k, g)) => {
                    let c = &lt.coeff / &g.lead().coeff;
                    let m = g.lead().mono.quotient_of(&lt.mono);
                    p = axpy(&p[start..], &-c.clone(), &m, &g.0, self.order);
                    start = 0;
                    if let (Some(acc), Some(reps)) = (acc.as_mut(), self.reps) {
                        *acc = axpy(acc, &c, &m, &reps[k].0, self.order);
                    }
                }
                None => {
                    rem.push(lt.clone());
                    start += 1;
                }
            }
        }
        (Elem(rem), acc.map(Elem))
    }
}

/// Reduced Gröbner basis of a submodule of a free module.
#[derive(Clone, Debug)]
pub struct ModuleGB {
    rank: usize,
    num_vars: usize,
    order: MonomialOrder,
    basis: Vec<PolyVector>,
    generators: Vec<PolyVector>,
    elems: Vec<Elem>,
    reps: Option<Vec<Elem>>,
}

impl ModuleGB {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    /// Reduced, monic basis sorted by descending leading term.
    pub fn basis(&self) -> &[PolyVector] {
        &self.basis
    }

    /// Generator list the basis was computed from.
    pub fn generators(&self) -> &[PolyVector] {
        &self.generators
    }

    pub fn tracks_lift(&self) -> bool {
        self.reps.is_some()
    }

    fn check(&self, v: &PolyVector) -> Result<()> {
        if v.dim() != self.rank || v.num_vars() != self.num_vars {
            return Err(Error::Dimension(format!(
                "vector of shape ({}, {}) against a module of rank {} in {} variables",
                v.dim(),
                v.num_vars(),
                self.rank,
                self.num_vars
            )));
        }
        Ok(())
    }

    fn reducer(&self) -> Reducer<'_> {
        Reducer {
            order: self.order,
            basis: &self.elems,
            reps: None,
        }
    }

    pub fn normal_form(&self, v: &PolyVector) -> Result<PolyVector> {
        self.check(v)?;
        let (r, _) = self.reducer().reduce(&Elem::from_vector(v, self.order), None);
        Ok(r.to_vector(self.rank, self.num_vars))
    }

    pub fn contains(&self, v: &PolyVector) -> Result<bool> {
        self.check(v)?;
        let (r, _) = self.reducer().reduce(&Elem::from_vector(v, self.order), None);
        Ok(r.is_zero())
    }

    /// Cofactors `a` with `v = sum_i a_i * generators[i]`, or `None` when
    /// `v` is not in the module. Requires a basis built with
    /// [`module_groebner_with_lift`].
    pub fn lift(&self, v: &PolyVector) -> Result<Option<Vec<Poly>>> {
        self.check(v)?;
        let Some(reps) = self.reps.as_deref() else {
            return Err(Error::Precondition(
                "basis was computed without cofactor tracking".into(),
            ));
        };
        let reducer = Reducer {
            order: self.order,
            basis: &self.elems,
            reps: Some(reps),
        };
        let (r, acc) = reducer.reduce(&Elem::from_vector(v, self.order), None);
        if !r.is_zero() {
            return Ok(None);
        }
        Ok(Some(
            acc.unwrap_or_default()
                .to_polys(self.generators.len(), self.num_vars),
        ))
    }

    fn normal_form_elem(&self, v: &PolyVector) -> Elem {
        self.reducer().reduce(&Elem::from_vector(v, self.order), None).0
    }
}

fn validate(generators: &[PolyVector]) -> Result<(usize, usize)> {
    let Some(first) = generators.first() else {
        return Err(Error::Precondition("empty generator list".into()));
    };
    let (rank, n) = (first.dim(), first.num_vars());
    if generators.iter().any(|g| g.dim() != rank || g.num_vars() != n) {
        return Err(Error::Dimension(
            "generators with different ranks or numbers of variables".into(),
        ));
    }
    Ok((rank, n))
}

pub fn module_groebner(generators: &[PolyVector], order: MonomialOrder) -> Result<ModuleGB> {
    build(generators, order, false)
}

/// As [`module_groebner`], additionally recording how each basis element is
/// expressed in the generators so that [`ModuleGB::lift`] is available.
pub fn module_groebner_with_lift(
    generators: &[PolyVector],
    order: MonomialOrder,
) -> Result<ModuleGB> {
    build(generators, order, true)
}

fn build(generators: &[PolyVector], order: MonomialOrder, track: bool) -> Result<ModuleGB> {
    let (rank, n) = validate(generators)?;

    let mut basis: Vec<Elem> = Vec::new();
    let mut reps: Vec<Elem> = Vec::new();
    for (i, g) in generators.iter().enumerate() {
        let e = Elem::from_vector(g, order);
        if !e.is_zero() {
            basis.push(e);
            if track {
                reps.push(Elem::unit(i, n));
            }
        }
    }

    let mut pending: BTreeSet<(usize, usize)> = BTreeSet::new();
    for j in 0..basis.len() {
        for i in 0..j {
            if basis[i].lead().pos == basis[j].lead().pos {
                pending.insert((i, j));
            }
        }
    }

    let lcm_of = |basis: &[Elem], i: usize, j: usize| basis[i].lead().mono.lcm(&basis[j].lead().mono);

    while !pending.is_empty() {
        // Normal selection strategy: smallest lcm first, ties by index.
        let &(i, j) = pending
            .iter()
            .min_by(|&&(a, b), &&(c, d)| {
                order
                    .cmp(&lcm_of(&basis, a, b), &lcm_of(&basis, c, d))
                    .then((a, b).cmp(&(c, d)))
            })
            .unwrap();
        pending.remove(&(i, j));

        let lcm = lcm_of(&basis, i, j);
        let pos = basis[i].lead().pos;
        // Chain criterion.
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && basis[k].lead().pos == pos
                && basis[k].lead().mono.divides(&lcm)
                && !pending.contains(&(i.min(k), i.max(k)))
                && !pending.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }

        let (gi, gj) = (&basis[i], &basis[j]);
        let ci = gi.lead().coeff.recip();
        let cj = gj.lead().coeff.recip();
        let mi = gi.lead().mono.quotient_of(&lcm);
        let mj = gj.lead().mono.quotient_of(&lcm);
        let s = axpy(&axpy(&[], &ci, &mi, &gi.0, order), &-cj.clone(), &mj, &gj.0, order);
        let s_rep = track.then(|| {
            axpy(
                &axpy(&[], &ci, &mi, &reps[i].0, order),
                &-cj,
                &mj,
                &reps[j].0,
                order,
            )
        });

        let reducer = Reducer {
            order,
            basis: &basis,
            reps: track.then_some(reps.as_slice()),
        };
        let (r, acc) = reducer.reduce(&Elem(s), None);
        if r.is_zero() {
            continue;
        }
        let inv = r.lead().coeff.recip();
        let new_pos = r.lead().pos;
        basis.push(r.scale(&inv));
        if let (Some(s_rep), Some(acc)) = (s_rep, acc) {
            // r = s - sum q_k g_k
            let rep = axpy(&s_rep, &-Rational::one(), &Monomial::one(n), &acc.0, order);
            reps.push(Elem(rep).scale(&inv));
        }
        let k = basis.len() - 1;
        for i in 0..k {
            if basis[i].lead().pos == new_pos {
                pending.insert((i, k));
            }
        }
    }

    // Minimalize: drop elements whose leading term is divisible by another's.
    let keep: Vec<usize> = (0..basis.len())
        .filter(|&i| {
            !(0..basis.len()).any(|j| {
                j != i
                    && basis[j].lead().pos == basis[i].lead().pos
                    && basis[j].lead().mono.divides(&basis[i].lead().mono)
                    && (basis[j].lead().mono != basis[i].lead().mono || j < i)
            })
        })
        .collect();
    let mut basis: Vec<Elem> = keep.iter().map(|&i| basis[i].clone()).collect();
    let mut reps: Vec<Elem> = if track {
        keep.iter().map(|&i| reps[i].clone()).collect()
    } else {
        Vec::new()
    };

    // Interreduce tails and normalize to monic.
    for i in 0..basis.len() {
        let lead = basis[i].lead().clone();
        let tail = Elem(basis[i].0[1..].to_vec());
        let reducer = Reducer {
            order,
            basis: &basis,
            reps: track.then_some(reps.as_slice()),
        };
        let (rem, acc) = reducer.reduce(&tail, Some(i));
        let mut terms = vec![lead.clone()];
        terms.extend(rem.0);
        let inv = lead.coeff.recip();
        basis[i] = Elem(terms).scale(&inv);
        if let Some(acc) = acc {
            let rep = axpy(&reps[i].0, &-Rational::one(), &Monomial::one(n), &acc.0, order);
            reps[i] = Elem(rep).scale(&inv);
        }
    }

    let mut idx: Vec<usize> = (0..basis.len()).collect();
    idx.sort_by(|&a, &b| {
        let (ta, tb) = (basis[a].lead(), basis[b].lead());
        order.cmp_key((&tb.mono, tb.pos), (&ta.mono, ta.pos))
    });
    let elems: Vec<Elem> = idx.iter().map(|&i| basis[i].clone()).collect();
    let reps = track.then(|| idx.iter().map(|&i| reps[i].clone()).collect::<Vec<_>>());

    Ok(ModuleGB {
        rank,
        num_vars: n,
        order,
        basis: elems.iter().map(|e| e.to_vector(rank, n)).collect(),
        generators: generators.to_vec(),
        elems,
        reps,
    })
}

pub fn normal_form(v: &PolyVector, gb: &ModuleGB) -> Result<PolyVector> {
    gb.normal_form(v)
}

/// Basis of `{c in Q^k : sum_i c_i * candidates[i] in the module}`.
pub fn linear_relation_space(candidates: &[PolyVector], gb: &ModuleGB) -> Result<Vec<Vec<Rational>>> {
    for c in candidates {
        gb.check(c)?;
    }
    Ok(relation_matrix(candidates, gb).kernel())
}

/// Matrix whose columns are the coefficient vectors of the candidates'
/// normal forms (rows indexed by module terms).
pub(crate) fn relation_matrix(candidates: &[PolyVector], gb: &ModuleGB) -> QMatrix {
    let nfs: Vec<Elem> = candidates.iter().map(|c| gb.normal_form_elem(c)).collect();
    let mut keys: BTreeMap<(Monomial, usize), usize> = BTreeMap::new();
    for e in &nfs {
        for t in &e.0 {
            let next = keys.len();
            keys.entry((t.mono.clone(), t.pos)).or_insert(next);
        }
    }
    let mut m = QMatrix::zeros(keys.len(), candidates.len());
    for (col, e) in nfs.iter().enumerate() {
        for t in &e.0 {
            let row = keys[&(t.mono.clone(), t.pos)];
            m.set(row, col, t.coeff.clone());
        }
    }
    m
}

/// Generators `x_j - a_j` of the maximal ideal of a rational point.
pub fn point_ideal(point: &[Rational]) -> Vec<Poly> {
    let n = point.len();
    (0..n)
        .map(|j| &Poly::var(n, j) - &Poly::constant(n, point[j].clone()))
        .collect()
}

/// Generators `f * X` of the product `I * M` for ideal generators `f` and
/// module generators `X`, zero products dropped.
pub fn ideal_times_module(ideal: &[Poly], module: &[PolyVector]) -> Result<Vec<PolyVector>> {
    let mut out = Vec::new();
    for f in ideal {
        for x in module {
            let v = x.mul_poly(f)?;
            if !v.is_zero() {
                out.push(v);
            }
        }
    }
    Ok(out)
}
