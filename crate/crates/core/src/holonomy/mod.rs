//! Path-holonomy bi-submersions and the numerical invariants built on them:
//! carried diffeomorphisms of bisections, vertical lifts, the map from the
//! isotropy Lie algebra into the bi-submersion, BCH products, linearized
//! holonomy and the linear probes.

mod bch;
mod jet;

use nalgebra::DMatrix;
use num_traits::Zero;

pub use bch::{bch, bch_terms, bernoulli_numbers, BchScalar, DEFAULT_BCH_ORDER};

use crate::error::{Error, Result};
use crate::exactalg::{linear_relation_space, rat_to_f64, Poly, PolyVector, QMatrix, Rational};
use crate::flows::{
    exp_flow_numeric, linearization, time_dependent_flow, variational_flow_numeric, FlowConfig,
    NumericField, TimeDependentField,
};
use crate::foliation::{slice_restriction, CoordinateSubspace, Foliation};
use crate::pointwise::{tangent_dim, LieAlgebraPresentation, Pointwise};

/// Target drift beyond which a point has left the local group.
pub const TARGET_DRIFT_TOL: f64 = 1e-6;
/// Defect allowed in the invariance of the leaf tangent space.
pub const LEAF_INVARIANCE_TOL: f64 = 1e-6;
const LIFT_SINGULAR_CUTOFF: f64 = 1e-9;
const LIFT_RESIDUAL_TOL: f64 = 1e-7;

/// Bounds on the source point and the coefficients of a bi-submersion.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainBox {
    pub y_radius: f64,
    pub xi_radius: f64,
}

impl Default for DomainBox {
    fn default() -> Self {
        DomainBox {
            y_radius: 1e6,
            xi_radius: 10.0,
        }
    }
}

/// `U = M x R^n` with `s(y, xi) = y` and `t(y, xi) = exp_y(sum xi_i X_i)`,
/// where the `X_i` are generators whose classes form a basis of the fiber at
/// the base point (so `U` is minimal there).
#[derive(Clone, Debug)]
pub struct PathHolonomyBiSubmersion {
    foliation: Foliation,
    base_point: Vec<Rational>,
    base_f64: Vec<f64>,
    generator_indices: Vec<usize>,
    fields: Vec<PolyVector>,
    numeric: Vec<NumericField>,
    /// `(sum xi_i X_i(y), 0)` on `M x R^n`.
    augmented: NumericField,
    witnesses: Vec<PolyVector>,
    tangent_basis: Vec<Vec<Rational>>,
    domain: DomainBox,
    validity_radius: f64,
    flow: FlowConfig,
}

impl PathHolonomyBiSubmersion {
    /// `indices = None` takes the canonical fiber basis.
    pub fn new(f: &Foliation, x: &[Rational], indices: Option<Vec<usize>>) -> Result<Self> {
        let pw = Pointwise::new(f.clone());
        let report = pw.fiber_report(x)?;
        let indices = match indices {
            None => report.fiber_basis_indices.clone(),
            Some(ix) => {
                let m = f.num_generators();
                if ix.iter().any(|&i| i >= m) {
                    return Err(Error::Precondition("generator index out of range".into()));
                }
                if ix.len() != report.dim_fiber {
                    return Err(Error::Precondition(format!(
                        "{} generators given but the fiber has dimension {}",
                        ix.len(),
                        report.dim_fiber
                    )));
                }
                let chosen: Vec<PolyVector> = ix.iter().map(|&i| f.generators()[i].clone()).collect();
                if let Some(rel) = linear_relation_space(&chosen, &*pw.point_module(x)?)?.into_iter().next() {
                    return Err(Error::DependentFrame(rel));
                }
                ix
            }
        };
        if indices.is_empty() {
            return Err(Error::Precondition("the fiber at the base point is zero".into()));
        }
        let d = f.dim();
        let n = indices.len();
        let fields: Vec<PolyVector> = indices.iter().map(|&i| f.generators()[i].clone()).collect();
        let numeric = fields.iter().map(NumericField::new).collect::<Result<Vec<_>>>()?;

        let map: Vec<Option<usize>> = (0..d).map(Some).collect();
        let mut comps = vec![Poly::zero(d + n); d + n];
        for (j, fj) in fields.iter().enumerate() {
            let xi = Poly::var(d + n, d + j);
            for (i, c) in fj.components().iter().enumerate() {
                comps[i] = &comps[i] + &(&xi * &c.remap(d + n, &map)?);
            }
        }
        let augmented = NumericField::new(&PolyVector::new(comps)?)?;

        Ok(PathHolonomyBiSubmersion {
            foliation: f.clone(),
            base_point: x.to_vec(),
            base_f64: x.iter().map(rat_to_f64).collect(),
            generator_indices: indices,
            fields,
            numeric,
            augmented,
            witnesses: pw.isotropy_witnesses(x)?,
            tangent_basis: tangent_dim(f, x)?.basis,
            domain: DomainBox::default(),
            validity_radius: 1.0,
            flow: FlowConfig::default(),
        })
    }

    pub fn with_domain(mut self, domain: DomainBox) -> Self {
        self.domain = domain;
        self
    }

    /// Radius of the `|lambda|_inf` box in which Δ and BCH are trusted.
    pub fn with_validity_radius(mut self, r: f64) -> Self {
        self.validity_radius = r;
        self
    }

    pub fn with_flow_config(mut self, cfg: FlowConfig) -> Self {
        self.flow = cfg;
        self
    }

    pub fn foliation(&self) -> &Foliation {
        &self.foliation
    }

    pub fn base_point(&self) -> &[Rational] {
        &self.base_point
    }

    pub fn base_point_f64(&self) -> &[f64] {
        &self.base_f64
    }

    pub fn generator_indices(&self) -> &[usize] {
        &self.generator_indices
    }

    pub fn fields(&self) -> &[PolyVector] {
        &self.fields
    }

    /// Fields whose classes form the basis of the isotropy algebra used for
    /// [`LocalGroupElement`] coordinates.
    pub fn isotropy_witnesses(&self) -> &[PolyVector] {
        &self.witnesses
    }

    pub fn isotropy_algebra(&self) -> Result<LieAlgebraPresentation> {
        Pointwise::new(self.foliation.clone()).isotropy_algebra_with_witnesses(&self.base_point, self.witnesses.clone())
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn validity_radius(&self) -> f64 {
        self.validity_radius
    }

    pub fn flow_config(&self) -> &FlowConfig {
        &self.flow
    }

    pub fn dim(&self) -> usize {
        self.foliation.dim()
    }

    pub fn fiber_dim(&self) -> usize {
        self.fields.len()
    }

    fn check_domain(&self, y: &[f64], xi: &[f64]) -> Result<()> {
        if y.len() != self.dim() || xi.len() != self.fiber_dim() {
            return Err(Error::Dimension(format!(
                "expected a point of dimension {} and {} coefficients",
                self.dim(),
                self.fiber_dim()
            )));
        }
        let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        if !(inf(y) <= self.domain.y_radius && inf(xi) <= self.domain.xi_radius) {
            return Err(Error::ValidityBox(format!(
                "(y, xi) outside the domain box |y| <= {}, |xi| <= {}",
                self.domain.y_radius, self.domain.xi_radius
            )));
        }
        Ok(())
    }

    fn combination(&self, xi: &[f64]) -> Result<NumericField> {
        NumericField::combination(xi, &self.numeric)
    }
}

/// `t(y, xi) = exp_y(sum xi_i X_i)`.
pub fn bisubmersion_target(u: &PathHolonomyBiSubmersion, y: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
    u.check_domain(y, xi)?;
    if xi.iter().all(|v| *v == 0.0) {
        return Ok(y.to_vec());
    }
    exp_flow_numeric(&u.combination(xi)?, y, 1.0, &u.flow)
}

/// Target together with `dt/dy` (d x d) and `dt/dxi` (d x n).
pub fn target_with_jacobian(
    u: &PathHolonomyBiSubmersion,
    y: &[f64],
    xi: &[f64],
) -> Result<(Vec<f64>, DMatrix<f64>, DMatrix<f64>)> {
    u.check_domain(y, xi)?;
    let (d, n) = (u.dim(), u.fiber_dim());
    let mut s0 = y.to_vec();
    s0.extend_from_slice(xi);
    let (s, j) = variational_flow_numeric(&u.augmented, &s0, 1.0, &u.flow)?;
    Ok((
        s[..d].to_vec(),
        j.view((0, 0), (d, d)).into_owned(),
        j.view((0, d), (d, n)).into_owned(),
    ))
}

/// Local bisection `y -> (y, phi(y))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bisection {
    phi: Vec<Poly>,
}

impl Bisection {
    pub fn new(phi: Vec<Poly>) -> Self {
        Bisection { phi }
    }

    pub fn constant(dim: usize, xi: &[Rational]) -> Self {
        Bisection {
            phi: xi.iter().map(|c| Poly::constant(dim, c.clone())).collect(),
        }
    }

    pub fn components(&self) -> &[Poly] {
        &self.phi
    }

    pub fn eval(&self, y: &[f64]) -> Vec<f64> {
        self.phi.iter().map(|p| p.evaluate_f64(y)).collect()
    }
}

/// Diffeomorphism `y -> exp_y(sum phi_i(y) X_i)` carried by a bisection.
pub struct CarriedDiffeo<'a> {
    u: &'a PathHolonomyBiSubmersion,
    bisection: Bisection,
}

impl CarriedDiffeo<'_> {
    pub fn eval(&self, y: &[f64]) -> Result<Vec<f64>> {
        bisubmersion_target(self.u, y, &self.bisection.eval(y))
    }

    pub fn eval_grid(&self, samples: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        samples.iter().map(|y| self.eval(y)).collect()
    }
}

pub fn carried_diffeo(u: &PathHolonomyBiSubmersion, b: Bisection) -> Result<CarriedDiffeo<'_>> {
    if b.phi.len() != u.fiber_dim() || b.phi.iter().any(|p| p.num_vars() != u.dim()) {
        return Err(Error::Dimension(format!(
            "bisection needs {} components in {} variables",
            u.fiber_dim(),
            u.dim()
        )));
    }
    Ok(CarriedDiffeo { u, bisection: b })
}

/// Minimum-norm `v` with `dt/dxi (y, xi) v = X_i(t(y, xi))`.
pub fn vertical_lift(u: &PathHolonomyBiSubmersion, generator: usize, y: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
    let field = u
        .foliation
        .generators()
        .get(generator)
        .ok_or_else(|| Error::Precondition(format!("no generator {generator}")))?;
    let (t, _, a) = target_with_jacobian(u, y, xi)?;
    let rhs = nalgebra::DVector::from_vec(field.evaluate_f64(&t));
    min_norm_solve(&a, &rhs)
}

fn min_norm_solve(a: &DMatrix<f64>, b: &nalgebra::DVector<f64>) -> Result<Vec<f64>> {
    let svd = a.clone().svd(true, true);
    let singular_values: Vec<f64> = svd.singular_values.iter().copied().collect();
    let x = svd
        .solve(b, LIFT_SINGULAR_CUTOFF)
        .map_err(|e| Error::Internal(e.to_string()))?;
    let residual = (a * &x - b).norm();
    if residual > LIFT_RESIDUAL_TOL {
        return Err(Error::RankDeficient {
            residual,
            singular_values,
        });
    }
    Ok(x.iter().copied().collect())
}

/// Coordinates of an isotropy element in the witness basis.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalGroupElement {
    pub coefficients: Vec<f64>,
}

impl LocalGroupElement {
    pub fn new(coefficients: Vec<f64>) -> Self {
        LocalGroupElement { coefficients }
    }
}

/// Image of `exp(sum lambda_a [W_a])` in the isotropy fiber `{x} x R^n`
/// of `U`: the time-one flow from `(x, 0)` of the vertical lift of
/// `W = sum lambda_a W_a`. Returns the `xi` coordinate.
pub fn delta_map(u: &PathHolonomyBiSubmersion, g: &LocalGroupElement) -> Result<Vec<f64>> {
    let l = u.witnesses.len();
    if g.coefficients.len() != l {
        return Err(Error::Dimension(format!(
            "isotropy algebra has dimension {l}, got {} coefficients",
            g.coefficients.len()
        )));
    }
    let inf = g.coefficients.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    if !(inf <= u.validity_radius) {
        return Err(Error::ValidityBox(format!(
            "|lambda| = {inf} exceeds the validity radius {}",
            u.validity_radius
        )));
    }
    let n = u.fiber_dim();
    if g.coefficients.iter().all(|c| *c == 0.0) {
        return Ok(vec![0.0; n]);
    }
    let d = u.dim();
    let mut w = PolyVector::zero(d, d);
    for (c, wa) in g.coefficients.iter().zip(&u.witnesses) {
        let q = crate::exactalg::rat_from_f64(*c)
            .ok_or_else(|| Error::Precondition("non-finite coefficient".into()))?;
        w = w.checked_add(&wa.scale(&q))?;
    }
    let lifter = jet::JetLifter::new(&u.fields);
    let x = u.base_f64.clone();
    let mut failure: Option<Error> = None;
    let rhs = |_: f64, xi: &[f64], dxi: &mut [f64]| {
        if failure.is_some() {
            dxi.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        match lifter.lift(&w, &x, xi, &u.flow) {
            Ok(v) => dxi.copy_from_slice(&v),
            Err(e) => {
                failure = Some(e);
                dxi.iter_mut().for_each(|v| *v = 0.0);
            }
        }
    };
    let outer = FlowConfig {
        rel_tol: u.flow.rel_tol.max(1e-9),
        abs_tol: u.flow.abs_tol.max(1e-11),
        ..u.flow.clone()
    };
    let xi = crate::flows::integrate(rhs, &vec![0.0; n], 0.0, 1.0, &outer, n);
    if let Some(e) = failure {
        return Err(e);
    }
    let xi = xi?;
    let t = bisubmersion_target(u, &x, &xi)?;
    let drift = t.iter().zip(&x).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if drift > TARGET_DRIFT_TOL {
        return Err(Error::ValidityBox(format!(
            "target drifted by {drift:e} from the base point; the element left the local group"
        )));
    }
    Ok(xi)
}

/// Linearized holonomy of the constant bisection through `(x, xi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearHolonomy {
    pub point: Vec<f64>,
    pub full_jacobian: DMatrix<f64>,
    /// Columns span `F_x`.
    pub leaf_subspace: DMatrix<f64>,
    pub normal_matrix: DMatrix<f64>,
    /// Size of the block that would map `F_x` out of itself.
    pub leaf_invariance_defect: f64,
}

pub fn linear_holonomy(u: &PathHolonomyBiSubmersion, xi: &[f64]) -> Result<LinearHolonomy> {
    let x = &u.base_f64;
    let d = u.dim();
    u.check_domain(x, xi)?;
    let (t, jac) = if xi.iter().all(|v| *v == 0.0) {
        (x.clone(), DMatrix::identity(d, d))
    } else {
        variational_flow_numeric(&u.combination(xi)?, x, 1.0, &u.flow)?
    };
    let drift = t.iter().zip(x).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if drift > 1e-8 {
        return Err(Error::Precondition(format!(
            "the constant bisection does not fix the base point (drift {drift:e})"
        )));
    }
    let k = u.tangent_basis.len();
    let pivots: Vec<usize> = u
        .tangent_basis
        .iter()
        .map(|r| r.iter().position(|v| !Zero::is_zero(v)).unwrap())
        .collect();
    // basis [F_x | e_j for non-pivot j]
    let mut basis = DMatrix::<f64>::zeros(d, d);
    for (c, row) in u.tangent_basis.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            basis[(i, c)] = rat_to_f64(v);
        }
    }
    for (c, j) in (0..d).filter(|j| !pivots.contains(j)).enumerate() {
        basis[(j, k + c)] = 1.0;
    }
    let inv = basis
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Internal("complement basis is singular".into()))?;
    let m = &inv * &jac * &basis;
    let lower_left = m.view((k, 0), (d - k, k));
    let defect = lower_left.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if defect > LEAF_INVARIANCE_TOL {
        return Err(Error::Internal(format!(
            "linearized holonomy does not preserve the leaf tangent space (defect {defect:e})"
        )));
    }
    Ok(LinearHolonomy {
        point: x.clone(),
        full_jacobian: jac,
        leaf_subspace: basis.columns(0, k).into_owned(),
        normal_matrix: m.view((k, k), (d - k, d - k)).into_owned(),
        leaf_invariance_defect: defect,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MorphismCheck {
    pub pass: bool,
    /// Normal matrix at Δ(bch(v1, v2)).
    pub product_side: DMatrix<f64>,
    /// Composite of the normal matrices at Δ(v1) and Δ(v2), in flow order.
    pub composite_side: DMatrix<f64>,
    pub deviation: f64,
    /// Distance from the base point of the composed flows and of the flow
    /// of the BCH combination, both evaluated at the base point.
    pub base_point_deviation: f64,
}

/// Linearized morphism property of Δ. With the vector-field bracket the
/// linear part is an anti-homomorphism, so `bch(v1, v2)` (flow of `v1`
/// then `v2`) has normal matrix `N(v2) N(v1)`.
pub fn morphism_check(
    u: &PathHolonomyBiSubmersion,
    lp: &LieAlgebraPresentation,
    v1: &[f64],
    v2: &[f64],
    tol: f64,
) -> Result<MorphismCheck> {
    let prod = bch(lp, v1, v2, DEFAULT_BCH_ORDER)?;
    let xi1 = delta_map(u, &LocalGroupElement::new(v1.to_vec()))?;
    let xi2 = delta_map(u, &LocalGroupElement::new(v2.to_vec()))?;
    let xi12 = delta_map(u, &LocalGroupElement::new(prod))?;
    let n1 = linear_holonomy(u, &xi1)?.normal_matrix;
    let n2 = linear_holonomy(u, &xi2)?.normal_matrix;
    let n12 = linear_holonomy(u, &xi12)?.normal_matrix;
    let composite = &n2 * &n1;
    let deviation = (&n12 - &composite).abs().max();

    let x = &u.base_f64;
    let after1 = bisubmersion_target(u, x, &xi1)?;
    let after2 = bisubmersion_target(u, &after1, &xi2)?;
    let direct = bisubmersion_target(u, x, &xi12)?;
    let base_point_deviation = after2
        .iter()
        .chain(&direct)
        .zip(x.iter().chain(x))
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));

    Ok(MorphismCheck {
        pass: deviation <= tol && base_point_deviation <= tol,
        product_side: n12,
        composite_side: composite,
        deviation,
        base_point_deviation,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelProbe {
    NotInKernel,
    Inconclusive,
}

/// `NotInKernel` when the normal linear holonomy at `(x, xi)` differs from
/// the identity by more than `tol`; nothing is decided otherwise.
pub fn kernel_linear_probe(u: &PathHolonomyBiSubmersion, xi: &[f64], tol: f64) -> Result<(KernelProbe, LinearHolonomy)> {
    let lh = linear_holonomy(u, xi)?;
    let k = lh.normal_matrix.nrows();
    let dev = (&lh.normal_matrix - DMatrix::<f64>::identity(k, k)).abs().max();
    let verdict = if k > 0 && dev > tol {
        KernelProbe::NotInKernel
    } else {
        KernelProbe::Inconclusive
    };
    Ok((verdict, lh))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Injectivity {
    /// Every combination has real spectrum; `degenerate_span` when all
    /// linear parts vanish.
    Unbounded { degenerate_span: bool },
    /// Injectivity holds for `|gamma|_inf < radius`.
    Box { radius: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscretenessProbe {
    pub linear_parts: Vec<QMatrix>,
    pub outcome: Injectivity,
    /// Grid spacing used on the faces of the unit box.
    pub grid_spacing: f64,
}

const FACE_GRID_BUDGET: usize = 200_000;

/// Box of coefficients `gamma` on which `sum gamma_i X_i^lin` has all
/// eigenvalues with `|Im| < pi`, for the linear parts of the isotropy
/// witnesses of the slice foliation at `x`. The spectrum scales linearly, so
/// the unit-box faces are sampled and the radius is `pi / max |Im|`.
pub fn discreteness_linear_probe(f: &Foliation, x: &[Rational], slice: &CoordinateSubspace) -> Result<DiscretenessProbe> {
    if !slice.contains(x) {
        return Err(Error::Precondition("the point is not on the slice".into()));
    }
    let fs = slice_restriction(f, slice)?;
    let xs = slice.project(x);
    let witnesses = Pointwise::new(fs).isotropy_witnesses(&xs)?;
    let linear_parts = witnesses
        .iter()
        .map(|w| linearization(w, &xs))
        .collect::<Result<Vec<_>>>()?;
    let l = linear_parts.len();
    if linear_parts.iter().all(QMatrix::is_zero) {
        return Ok(DiscretenessProbe {
            linear_parts,
            outcome: Injectivity::Unbounded { degenerate_span: true },
            grid_spacing: 0.0,
        });
    }
    let mats: Vec<DMatrix<f64>> = linear_parts
        .iter()
        .map(|m| {
            let rows = m.to_f64();
            DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| rows[i][j])
        })
        .collect();
    let s = mats[0].nrows();

    // points per free axis on each face, spacing 0.1 unless over budget
    let free = l.saturating_sub(1) as u32;
    let mut per_axis = 21usize;
    while free > 0 && per_axis > 3 && 2 * l * per_axis.pow(free) > FACE_GRID_BUDGET {
        per_axis -= 2;
    }
    let spacing = 2.0 / (per_axis - 1) as f64;
    let mut max_im = 0.0f64;
    let mut idx = vec![0usize; l.saturating_sub(1)];
    for face in 0..l {
        for sign in [-1.0, 1.0] {
            idx.iter_mut().for_each(|i| *i = 0);
            loop {
                let mut gamma = Vec::with_capacity(l);
                let mut it = idx.iter();
                for a in 0..l {
                    gamma.push(if a == face {
                        sign
                    } else {
                        -1.0 + spacing * *it.next().unwrap() as f64
                    });
                }
                let mut m = DMatrix::<f64>::zeros(s, s);
                for (g, a) in gamma.iter().zip(&mats) {
                    m += a * *g;
                }
                for ev in m.complex_eigenvalues().iter() {
                    max_im = max_im.max(ev.im.abs());
                }
                // odometer over the free axes
                let mut p = 0;
                while p < idx.len() {
                    idx[p] += 1;
                    if idx[p] < per_axis {
                        break;
                    }
                    idx[p] = 0;
                    p += 1;
                }
                if p == idx.len() {
                    break;
                }
            }
        }
    }
    let outcome = if max_im <= 1e-12 {
        Injectivity::Unbounded { degenerate_span: false }
    } else {
        Injectivity::Box {
            radius: std::f64::consts::PI / max_im,
        }
    };
    Ok(DiscretenessProbe {
        linear_parts,
        outcome,
        grid_spacing: spacing,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessCheck {
    pub pass: bool,
    pub max_deviation: f64,
    pub deviations: Vec<f64>,
}

/// Compares the time-ordered flow of `X_t` over `[0, 1]` with the flow of
/// `Z` on sample points, after checking exactly that `Z` and every field of
/// `X_t` lie in `I_x F_S`.
pub fn exponential_condition_witness_check(
    fs: &Foliation,
    x: &[Rational],
    xt: &TimeDependentField,
    z: &PolyVector,
    samples: &[Vec<f64>],
    tol: f64,
    cfg: &FlowConfig,
) -> Result<WitnessCheck> {
    let gb = Pointwise::new(fs.clone()).point_module(x)?;
    if !gb.contains(z)? {
        return Err(Error::Precondition("Z is not in I_x F".into()));
    }
    for (j, (_, f)) in xt.terms().iter().enumerate() {
        if !gb.contains(f)? {
            return Err(Error::Precondition(format!("field of term {j} of X_t is not in I_x F")));
        }
    }
    let zf = NumericField::new(z)?;
    let mut deviations = Vec::with_capacity(samples.len());
    for y in samples {
        let a = time_dependent_flow(xt, y, 0.0, 1.0, cfg)?;
        let b = exp_flow_numeric(&zf, y, 1.0, cfg)?;
        deviations.push(a.iter().zip(&b).fold(0.0f64, |m, (p, q)| m.max((p - q).abs())));
    }
    let max_deviation = deviations.iter().fold(0.0f64, |m, v| m.max(*v));
    Ok(WitnessCheck {
        pass: max_deviation < tol,
        max_deviation,
        deviations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;
    use crate::foliation::Chart;

    fn rotation() -> Foliation {
        Foliation::new(
            Chart::new(["x", "y"]).unwrap(),
            vec![PolyVector::new(vec![-Poly::var(2, 1), Poly::var(2, 0)]).unwrap()],
        )
        .unwrap()
    }

    fn x_dx() -> Foliation {
        Foliation::new(Chart::new(["x"]).unwrap(), vec![PolyVector::new(vec![Poly::var(1, 0)]).unwrap()]).unwrap()
    }

    fn zero2() -> Vec<Rational> {
        vec![rat(0, 1), rat(0, 1)]
    }

    #[test]
    fn target_of_rotation() {
        let u = PathHolonomyBiSubmersion::new(&rotation(), &[rat(1, 1), rat(0, 1)], None).unwrap();
        let t = bisubmersion_target(&u, &[1.0, 0.0], &[0.3]).unwrap();
        assert!((t[0] - 0.3f64.cos()).abs() < 1e-10 && (t[1] - 0.3f64.sin()).abs() < 1e-10);
        assert_eq!(bisubmersion_target(&u, &[0.2, 0.7], &[0.0]).unwrap(), vec![0.2, 0.7]);
    }

    #[test]
    fn lift_of_rotation_is_one() {
        let u = PathHolonomyBiSubmersion::new(&rotation(), &[rat(1, 1), rat(0, 1)], None).unwrap();
        for xi in [0.0, 0.3] {
            let v = vertical_lift(&u, 0, &[1.0, 0.0], &[xi]).unwrap();
            assert!((v[0] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn lift_of_constant_field() {
        let f = Foliation::new(Chart::new(["x"]).unwrap(), vec![PolyVector::unit(1, 1, 0)]).unwrap();
        let u = PathHolonomyBiSubmersion::new(&f, &[rat(0, 1)], None).unwrap();
        let v = vertical_lift(&u, 0, &[0.4], &[0.0]).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn delta_of_rotation_and_x_dx() {
        let u = PathHolonomyBiSubmersion::new(&rotation(), &zero2(), None).unwrap();
        let xi = delta_map(&u, &LocalGroupElement::new(vec![0.8])).unwrap();
        assert!((xi[0] - 0.8).abs() < 1e-8, "{xi:?}");
        let u = PathHolonomyBiSubmersion::new(&x_dx(), &[rat(0, 1)], None).unwrap();
        let xi = delta_map(&u, &LocalGroupElement::new(vec![-0.6])).unwrap();
        assert!((xi[0] + 0.6).abs() < 1e-8);
        let lh = linear_holonomy(&u, &xi).unwrap();
        assert!((lh.normal_matrix[(0, 0)] - (-0.6f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn rotation_linear_holonomy_and_kernel() {
        let u = PathHolonomyBiSubmersion::new(&rotation(), &zero2(), None)
            .unwrap();
        let lh = linear_holonomy(&u, &[0.5]).unwrap();
        let (c, s) = (0.5f64.cos(), 0.5f64.sin());
        assert!((lh.full_jacobian.clone() - DMatrix::from_row_slice(2, 2, &[c, -s, s, c])).abs().max() < 1e-9);
        let (p, _) = kernel_linear_probe(&u, &[2.0 * std::f64::consts::PI], 1e-6).unwrap();
        assert_eq!(p, KernelProbe::Inconclusive);
        let (p, _) = kernel_linear_probe(&u, &[0.0], 1e-6).unwrap();
        assert_eq!(p, KernelProbe::Inconclusive);
    }

    #[test]
    fn discreteness_of_rotation() {
        let p = discreteness_linear_probe(&rotation(), &zero2(), &CoordinateSubspace::full()).unwrap();
        match p.outcome {
            Injectivity::Box { radius } => assert!((radius - std::f64::consts::PI).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
        let p = discreteness_linear_probe(&x_dx(), &[rat(0, 1)], &CoordinateSubspace::full()).unwrap();
        assert_eq!(p.outcome, Injectivity::Unbounded { degenerate_span: false });
    }
}
