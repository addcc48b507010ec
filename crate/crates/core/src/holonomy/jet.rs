//! Vertical lifts through truncated Taylor expansion in the source
//! variable.
//!
//! At a point `(x, xi)` with `t(x, xi) = x` the pointwise equation
//! `dt/dxi * v = W(t)` degenerates whenever `W(x) = 0`. A vertical lift is
//! instead a field `v(y)` solving `sum_j dt/dxi_j(y, xi) v_j(y) = W(t(y, xi))`
//! for `y` near `x`; expanding in `h = y - x` up to order `K` gives a finite
//! linear system in the Taylor coefficients of `v`. `v(x)` is read off once
//! the system pins it down.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exactalg::{rat_to_f64, PolyVector};
use crate::flows::{integrate, FlowConfig};

const MAX_ORDER: usize = 6;
const SINGULAR_CUTOFF: f64 = 1e-9;
const DETERMINED_TOL: f64 = 1e-6;
const RESIDUAL_TOL: f64 = 1e-7;

struct CompiledPoly(Vec<(f64, Vec<u32>)>);

fn compile(v: &PolyVector) -> Vec<CompiledPoly> {
    v.components()
        .iter()
        .map(|p| CompiledPoly(p.terms().map(|(m, c)| (rat_to_f64(c), m.exponents().to_vec())).collect()))
        .collect()
}

/// Truncated series in `h` (degree <= k) and `eta` (degree <= 1).
/// Layout: block `b` (0 = eta-free, `1 + i` = coefficient of `eta_i`) of
/// `M` monomial coefficients each.
struct JetSpace {
    n: usize,
    m: usize,
    /// `(a, b, a + b)` for all monomial pairs with total degree <= k.
    table: Vec<(usize, usize, usize)>,
}

impl JetSpace {
    fn new(d: usize, n: usize, k: usize) -> Self {
        let mut monos: Vec<Vec<u32>> = vec![vec![0; d]];
        let mut frontier = monos.clone();
        for _ in 0..k {
            let mut next = Vec::new();
            for m in &frontier {
                // extend only at or after the last nonzero exponent: each monomial once
                let start = m.iter().rposition(|&e| e > 0).unwrap_or(0);
                for v in start..d {
                    let mut q = m.clone();
                    q[v] += 1;
                    next.push(q);
                }
            }
            monos.extend(next.iter().cloned());
            frontier = next;
        }
        let index: HashMap<Vec<u32>, usize> = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let deg = |m: &Vec<u32>| m.iter().sum::<u32>() as usize;
        let mut table = Vec::new();
        for (a, ma) in monos.iter().enumerate() {
            for (b, mb) in monos.iter().enumerate() {
                if deg(ma) + deg(mb) <= k {
                    let s: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                    table.push((a, b, index[&s]));
                }
            }
        }
        JetSpace {
            n,
            m: monos.len(),
            table,
        }
    }

    fn len(&self) -> usize {
        self.m * (1 + self.n)
    }

    fn mul(&self, a: &[f64], b: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        let m = self.m;
        for &(i, j, r) in &self.table {
            let (a0, b0) = (a[i], b[j]);
            out[r] += a0 * b0;
            for e in 1..=self.n {
                out[e * m + r] += a[e * m + i] * b0 + a0 * b[e * m + j];
            }
        }
    }

    fn constant(&self, c: f64) -> Vec<f64> {
        let mut v = vec![0.0; self.len()];
        v[0] = c;
        v
    }

    /// Evaluates polynomials on series arguments.
    fn eval(&self, polys: &[CompiledPoly], args: &[&[f64]], out: &mut [Vec<f64>]) {
        let max_exp: Vec<u32> = (0..args.len())
            .map(|v| {
                polys
                    .iter()
                    .flat_map(|p| p.0.iter().map(move |(_, e)| e[v]))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut powers: Vec<Vec<Vec<f64>>> = Vec::with_capacity(args.len());
        let mut tmp = vec![0.0; self.len()];
        for (v, a) in args.iter().enumerate() {
            let mut pw = vec![self.constant(1.0)];
            for e in 1..=max_exp[v] as usize {
                self.mul(&pw[e - 1], a, &mut tmp);
                pw.push(tmp.clone());
            }
            powers.push(pw);
        }
        for (p, o) in polys.iter().zip(out.iter_mut()) {
            o.iter_mut().for_each(|x| *x = 0.0);
            for (c, exps) in &p.0 {
                let mut term = self.constant(*c);
                for (v, &e) in exps.iter().enumerate() {
                    if e > 0 {
                        self.mul(&term, &powers[v][e as usize], &mut tmp);
                        std::mem::swap(&mut term, &mut tmp);
                    }
                }
                for (x, t) in o.iter_mut().zip(&term) {
                    *x += t;
                }
            }
        }
    }
}

pub(crate) struct JetLifter {
    d: usize,
    fields: Vec<Vec<CompiledPoly>>,
    start_order: std::cell::Cell<usize>,
}

impl JetLifter {
    pub(crate) fn new(fields: &[PolyVector]) -> Self {
        JetLifter {
            d: fields[0].dim(),
            fields: fields.iter().map(compile).collect(),
            start_order: std::cell::Cell::new(0),
        }
    }

    /// `v(x)` for the vertical lift of `w` at `(x, xi)`.
    pub(crate) fn lift(&self, w: &PolyVector, x: &[f64], xi: &[f64], cfg: &FlowConfig) -> Result<Vec<f64>> {
        let w = compile(w);
        let mut last_err = None;
        for k in self.start_order.get()..=MAX_ORDER {
            match self.lift_at_order(&w, x, xi, k, cfg)? {
                Ok(v) => {
                    self.start_order.set(k);
                    return Ok(v);
                }
                Err(e) => last_err = Some(e),
            }
        }
        Err(last_err.unwrap_or_else(|| Error::Internal("no lift order attempted".into())))
    }

    fn lift_at_order(
        &self,
        w: &[CompiledPoly],
        x: &[f64],
        xi: &[f64],
        k: usize,
        cfg: &FlowConfig,
    ) -> Result<std::result::Result<Vec<f64>, Error>> {
        let (d, n) = (self.d, self.fields.len());
        let js = JetSpace::new(d, n, k);
        let (m, len) = (js.m, js.len());

        let mut y0 = vec![0.0; d * len];
        for i in 0..d {
            y0[i * len] = x[i];
            if k >= 1 {
                y0[i * len + 1 + i] = 1.0;
            }
        }
        let xi_series: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let mut s = js.constant(xi[j]);
                s[(1 + j) * m] = 1.0;
                s
            })
            .collect();
        let mut vals = vec![vec![0.0; len]; d];
        let mut prod = vec![0.0; len];
        let rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
            dy.iter_mut().for_each(|v| *v = 0.0);
            let args: Vec<&[f64]> = y.chunks(len).collect();
            for (j, f) in self.fields.iter().enumerate() {
                js.eval(f, &args, &mut vals);
                for i in 0..d {
                    js.mul(&xi_series[j], &vals[i], &mut prod);
                    for (o, p) in dy[i * len..(i + 1) * len].iter_mut().zip(&prod) {
                        *o += p;
                    }
                }
            }
        };
        let t = integrate(rhs, &y0, 0.0, 1.0, cfg, 0)?;

        // T0 = eta-free part; A_j = coefficient of eta_j
        let t0: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                let mut s = vec![0.0; len];
                s[..m].copy_from_slice(&t[i * len..i * len + m]);
                s
            })
            .collect();
        let args: Vec<&[f64]> = t0.iter().map(|v| v.as_slice()).collect();
        let mut wv = vec![vec![0.0; len]; d];
        js.eval(w, &args, &mut wv);

        let rows = d * m;
        let cols = n * m;
        let mut mat = DMatrix::<f64>::zeros(rows.max(cols), cols);
        let mut b = nalgebra::DVector::<f64>::zeros(rows.max(cols));
        for i in 0..d {
            for r in 0..m {
                b[i * m + r] = wv[i][r];
            }
        }
        for &(g, beta, r) in &js.table {
            for j in 0..n {
                for i in 0..d {
                    let a = t[i * len + (1 + j) * m + g];
                    if a != 0.0 {
                        mat[(i * m + r, j * m + beta)] += a;
                    }
                }
            }
        }

        let svd = mat.clone().svd(true, true);
        let (u, vt) = (svd.u.as_ref().unwrap(), svd.v_t.as_ref().unwrap());
        let smax = svd.singular_values.max();
        let cut = SINGULAR_CUTOFF * smax.max(1.0);
        let mut sol = nalgebra::DVector::<f64>::zeros(cols);
        let mut undetermined = false;
        for (s_idx, &s) in svd.singular_values.iter().enumerate() {
            let vrow = vt.row(s_idx);
            if s > cut {
                let coef = u.column(s_idx).dot(&b) / s;
                sol += vrow.transpose() * coef;
            } else if (0..n).any(|j| vrow[j * m].abs() > DETERMINED_TOL) {
                undetermined = true;
            }
        }
        let residual = (&mat * &sol - &b).norm();
        let singular_values: Vec<f64> = svd.singular_values.iter().copied().collect();
        if residual > RESIDUAL_TOL * b.norm().max(1.0) {
            return Ok(Err(Error::RankDeficient {
                residual,
                singular_values,
            }));
        }
        if undetermined {
            return Ok(Err(Error::RankDeficient {
                residual,
                singular_values,
            }));
        }
        Ok(Ok((0..n).map(|j| sol[j * m]).collect()))
    }
}
