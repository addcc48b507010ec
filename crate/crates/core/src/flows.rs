//! Numerical flows of polynomial vector fields: adaptive Dormand–Prince 5(4)
//! with the variational equation carried along, time-dependent fields, and
//! exact linearization at zeros.

use nalgebra::DMatrix;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactalg::{rat_to_f64, Poly, PolyVector, QMatrix, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct FlowConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Accepted plus rejected steps.
    pub max_steps: usize,
    /// Integration aborts when `|x|_inf` exceeds this bound.
    pub bound: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 1_000_000,
            bound: 1e6,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !(ok(self.rel_tol) && ok(self.abs_tol) && ok(self.bound)) || self.max_steps == 0 {
            return Err(Error::Precondition(
                "flow tolerances, bound and step budget must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct Term {
    coeff: f64,
    exps: Vec<u32>,
}

fn compile_poly(p: &Poly) -> Vec<Term> {
    p.terms()
        .map(|(m, c)| Term {
            coeff: rat_to_f64(c),
            exps: m.exponents().to_vec(),
        })
        .collect()
}

fn eval_terms(terms: &[Term], x: &[f64]) -> f64 {
    terms
        .iter()
        .map(|t| {
            t.exps
                .iter()
                .zip(x)
                .fold(t.coeff, |acc, (&e, &xi)| if e == 0 { acc } else { acc * xi.powi(e as i32) })
        })
        .sum()
}

/// Floating-point evaluator for a polynomial vector field and its Jacobian.
#[derive(Clone, Debug)]
pub struct NumericField {
    dim: usize,
    comps: Vec<Vec<Term>>,
    /// `jac[i][j]` = d comp_i / d x_j
    jac: Vec<Vec<Vec<Term>>>,
}

impl NumericField {
    pub fn new(field: &PolyVector) -> Result<Self> {
        let dim = field.dim();
        if field.num_vars() != dim {
            return Err(Error::Dimension(format!(
                "vector field has {} components in {} variables",
                dim,
                field.num_vars()
            )));
        }
        let comps = field.components().iter().map(compile_poly).collect();
        let jac = field
            .components()
            .iter()
            .map(|c| {
                (0..dim)
                    .map(|j| c.partial_derivative(j).map(|d| compile_poly(&d)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NumericField { dim, comps, jac })
    }

    /// `sum_i c_i X_i` with floating coefficients.
    pub fn combination(coeffs: &[f64], fields: &[NumericField]) -> Result<Self> {
        if coeffs.len() != fields.len() || fields.is_empty() {
            return Err(Error::Dimension("coefficient count must match the fields".into()));
        }
        let dim = fields[0].dim;
        if fields.iter().any(|f| f.dim != dim) {
            return Err(Error::Dimension("fields on different charts".into()));
        }
        fn scaled(ts: &[Term], c: f64) -> impl Iterator<Item = Term> + '_ {
            ts.iter().map(move |t| Term { coeff: t.coeff * c, exps: t.exps.clone() })
        }
        let mut comps = vec![Vec::new(); dim];
        let mut jac = vec![vec![Vec::new(); dim]; dim];
        for (f, &c) in fields.iter().zip(coeffs) {
            if c == 0.0 {
                continue;
            }
            for i in 0..dim {
                comps[i].extend(scaled(&f.comps[i], c));
                for j in 0..dim {
                    jac[i][j].extend(scaled(&f.jac[i][j], c));
                }
            }
        }
        Ok(NumericField { dim, comps, jac })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.comps) {
            *o = eval_terms(c, x);
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(x, &mut out);
        out
    }

    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| eval_terms(&self.jac[i][j], x))
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Difference between the 5th and 4th order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction). The
/// first `watched` components are checked against the bounding box.
pub(crate) fn integrate<F>(mut f: F, y0: &[f64], t0: f64, t1: f64, cfg: &FlowConfig, watched: usize) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    cfg.validate()?;
    let n = y0.len();
    let mut y = y0.to_vec();
    let span = t1 - t0;
    if span == 0.0 || n == 0 {
        return Ok(y);
    }
    let dir = span.signum();
    let sc = |a: f64, b: f64| cfg.abs_tol + cfg.rel_tol * a.abs().max(b.abs());
    let rms = |v: &[f64], w: &[f64], s: &[f64]| -> f64 {
        (v.iter().zip(w).zip(s).map(|((e, _), s)| (e / s).powi(2)).sum::<f64>() / n as f64).sqrt()
    };

    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    f(t0, &y, &mut k[0]);

    // initial step (Hairer–Nørsett–Wanner heuristic)
    let scale: Vec<f64> = y.iter().map(|&v| sc(v, v)).collect();
    let d0 = rms(&y, &y, &scale);
    let d1 = rms(&k[0], &k[0], &scale);
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(span.abs());
    let y1: Vec<f64> = y.iter().zip(&k[0]).map(|(a, b)| a + dir * h * b).collect();
    let mut f1 = vec![0.0; n];
    f(t0 + dir * h, &y1, &mut f1);
    let diff: Vec<f64> = f1.iter().zip(&k[0]).map(|(a, b)| a - b).collect();
    let d2 = rms(&diff, &diff, &scale) / h;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    h = (100.0 * h).min(h1).min(span.abs());

    let mut t = t0;
    let mut steps = 0usize;
    let mut reject = false;
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    let mut err = vec![0.0; n];
    let mut scale = vec![0.0; n];
    while (t1 - t) * dir > 0.0 {
        if steps >= cfg.max_steps {
            return Err(Error::Divergence {
                reason: format!("step budget of {} exhausted", cfg.max_steps),
                time: t,
                state: y,
            });
        }
        steps += 1;
        let last = (t + dir * h - t1) * dir >= 0.0;
        let hs = if last { t1 - t } else { dir * h };
        for s in 1..6 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, a) in A[s][..s].iter().enumerate() {
                    if *a != 0.0 {
                        acc += hs * a * k[j][i];
                    }
                }
                ytmp[i] = acc;
            }
            f(t + C[s] * hs, &ytmp, &mut k[s]);
        }
        // stage 7 is evaluated at the 5th order solution (FSAL)
        for i in 0..n {
            ynew[i] = y[i]
                + hs * (A[6][0] * k[0][i] + A[6][2] * k[2][i] + A[6][3] * k[3][i] + A[6][4] * k[4][i] + A[6][5] * k[5][i]);
        }
        f(t + hs, &ynew, &mut k[6]);
        for i in 0..n {
            err[i] = hs * (0..7).map(|s| E[s] * k[s][i]).sum::<f64>();
            scale[i] = sc(y[i], ynew[i]);
        }
        let e = rms(&err, &err, &scale);
        if !e.is_finite() || ynew.iter().any(|v| !v.is_finite()) {
            h *= 0.2;
            reject = true;
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(Error::Divergence {
                    reason: "non-finite state".into(),
                    time: t,
                    state: y,
                });
            }
            continue;
        }
        let fac = (0.9 * e.powf(-0.2)).clamp(0.2, 5.0);
        if e <= 1.0 {
            t = if last { t1 } else { t + hs };
            y.copy_from_slice(&ynew);
            k.swap(0, 6);
            if y[..watched].iter().any(|v| v.abs() > cfg.bound) {
                return Err(Error::Divergence {
                    reason: format!("left the bounding box |x| <= {}", cfg.bound),
                    time: t,
                    state: y,
                });
            }
            h = if reject { hs.abs().min(hs.abs() * fac) } else { hs.abs() * fac };
            reject = false;
        } else {
            h = hs.abs() * fac;
            reject = true;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Divergence {
                reason: "step size underflow".into(),
                time: t,
                state: y,
            });
        }
    }
    Ok(y)
}

fn check_start(dim: usize, x0: &[f64]) -> Result<()> {
    if x0.len() != dim {
        return Err(Error::Dimension(format!(
            "point has {} coordinates, chart has {dim}",
            x0.len()
        )));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Precondition("non-finite initial point".into()));
    }
    Ok(())
}

/// Endpoint of the trajectory of `X` through `x0` after time `time`.
pub fn exp_flow(x: &PolyVector, x0: &[f64], time: f64, cfg: &FlowConfig) -> Result<Vec<f64>> {
    exp_flow_numeric(&NumericField::new(x)?, x0, time, cfg)
}

pub fn exp_flow_numeric(f: &NumericField, x0: &[f64], time: f64, cfg: &FlowConfig) -> Result<Vec<f64>> {
    check_start(f.dim, x0)?;
    integrate(|_, y, dy| f.eval_into(y, dy), x0, 0.0, time, cfg, f.dim)
}

fn variational_rhs<'a>(
    d: usize,
    field_at: impl Fn(f64, &[f64], &mut [f64]) + 'a,
    jac_at: impl Fn(f64, &[f64]) -> DMatrix<f64> + 'a,
) -> impl FnMut(f64, &[f64], &mut [f64]) + 'a {
    move |t, s, ds| {
        let (y, j) = s.split_at(d);
        field_at(t, y, &mut ds[..d]);
        let dx = jac_at(t, y);
        let jm = DMatrix::from_column_slice(d, d, j);
        let prod = dx * jm;
        ds[d..].copy_from_slice(prod.as_slice());
    }
}

fn with_identity(x0: &[f64]) -> Vec<f64> {
    let d = x0.len();
    let mut s = x0.to_vec();
    s.extend_from_slice(DMatrix::<f64>::identity(d, d).as_slice());
    s
}

fn split_state(d: usize, s: Vec<f64>) -> (Vec<f64>, DMatrix<f64>) {
    (s[..d].to_vec(), DMatrix::from_column_slice(d, d, &s[d..]))
}

/// Endpoint and Jacobian of the time-`time` flow at `x0`, integrating
/// `J' = DX(x) J` alongside the state.
pub fn variational_flow(x: &PolyVector, x0: &[f64], time: f64, cfg: &FlowConfig) -> Result<(Vec<f64>, DMatrix<f64>)> {
    variational_flow_numeric(&NumericField::new(x)?, x0, time, cfg)
}

pub fn variational_flow_numeric(
    f: &NumericField,
    x0: &[f64],
    time: f64,
    cfg: &FlowConfig,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    check_start(f.dim, x0)?;
    let d = f.dim;
    let rhs = variational_rhs(d, |_, y, dy| f.eval_into(y, dy), |_, y| f.jacobian(y));
    let s = integrate(rhs, &with_identity(x0), 0.0, time, cfg, d)?;
    Ok(split_state(d, s))
}

/// `X_t = sum_j p_j(t) X_j` with univariate polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimeDependentField {
    terms: Vec<(Poly, PolyVector)>,
}

impl TimeDependentField {
    pub fn new(terms: Vec<(Poly, PolyVector)>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::Precondition("time-dependent field needs at least one term".into()));
        };
        let dim = first.dim();
        for (p, x) in &terms {
            if p.num_vars() != 1 {
                return Err(Error::Dimension("time coefficients must be univariate".into()));
            }
            if x.dim() != dim || x.num_vars() != dim {
                return Err(Error::Dimension("all fields must share the chart dimension".into()));
            }
        }
        Ok(TimeDependentField { terms })
    }

    pub fn autonomous(x: PolyVector) -> Self {
        TimeDependentField {
            terms: vec![(Poly::one(1), x)],
        }
    }

    pub fn terms(&self) -> &[(Poly, PolyVector)] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        self.terms[0].1.dim()
    }

    /// The frozen field `X_t` at a rational time.
    pub fn at(&self, t: &Rational) -> Result<PolyVector> {
        let d = self.dim();
        let mut out = PolyVector::zero(d, d);
        for (p, x) in &self.terms {
            let c = p.evaluate(std::slice::from_ref(t))?;
            if !c.is_zero() {
                out = out.checked_add(&x.scale(&c))?;
            }
        }
        Ok(out)
    }
}

struct NumericTimeField {
    coeffs: Vec<Vec<Term>>,
    fields: Vec<NumericField>,
}

impl NumericTimeField {
    fn new(x: &TimeDependentField) -> Result<Self> {
        Ok(NumericTimeField {
            coeffs: x.terms.iter().map(|(p, _)| compile_poly(p)).collect(),
            fields: x.terms.iter().map(|(_, f)| NumericField::new(f)).collect::<Result<_>>()?,
        })
    }

    fn eval_into(&self, t: f64, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        let mut buf = vec![0.0; out.len()];
        for (p, f) in self.coeffs.iter().zip(&self.fields) {
            let c = eval_terms(p, &[t]);
            if c != 0.0 {
                f.eval_into(y, &mut buf);
                for (o, b) in out.iter_mut().zip(&buf) {
                    *o += c * b;
                }
            }
        }
    }

    fn jacobian(&self, t: f64, y: &[f64]) -> DMatrix<f64> {
        let d = y.len();
        let mut j = DMatrix::zeros(d, d);
        for (p, f) in self.coeffs.iter().zip(&self.fields) {
            let c = eval_terms(p, &[t]);
            if c != 0.0 {
                j += f.jacobian(y) * c;
            }
        }
        j
    }
}

/// Endpoint at `t1` of the trajectory of `X_t` through `x0` at time `t0`.
pub fn time_dependent_flow(x: &TimeDependentField, x0: &[f64], t0: f64, t1: f64, cfg: &FlowConfig) -> Result<Vec<f64>> {
    check_start(x.dim(), x0)?;
    let f = NumericTimeField::new(x)?;
    integrate(|t, y, dy| f.eval_into(t, y, dy), x0, t0, t1, cfg, x.dim())
}

pub fn time_dependent_variational_flow(
    x: &TimeDependentField,
    x0: &[f64],
    t0: f64,
    t1: f64,
    cfg: &FlowConfig,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    check_start(x.dim(), x0)?;
    let d = x.dim();
    let f = NumericTimeField::new(x)?;
    let rhs = variational_rhs(d, |t, y, dy| f.eval_into(t, y, dy), |t, y| f.jacobian(t, y));
    let s = integrate(rhs, &with_identity(x0), t0, t1, cfg, d)?;
    Ok(split_state(d, s))
}

/// Exact linear part `(dX_i/dx_j)(x)` of `X` at a zero `x`.
pub fn linearization(x: &PolyVector, point: &[Rational]) -> Result<QMatrix> {
    let d = x.dim();
    if point.len() != x.num_vars() || d != x.num_vars() {
        return Err(Error::Dimension("point and field dimensions differ".into()));
    }
    let value = x.evaluate(point)?;
    if value.iter().any(|v| !v.is_zero()) {
        return Err(Error::Precondition("the field does not vanish at the point".into()));
    }
    let mut m = QMatrix::zeros(d, d);
    for (i, c) in x.components().iter().enumerate() {
        for j in 0..d {
            m.set(i, j, c.partial_derivative(j)?.evaluate(point)?);
        }
    }
    Ok(m)
}
