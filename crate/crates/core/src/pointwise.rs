//! Exact pointwise invariants: tangent space of the leaf, fiber, isotropy
//! Lie algebra with structure constants, regular/singular classification
//! and the local Lie algebroid of a coordinate-subspace leaf.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{
    ideal_times_module, linear_relation_space, module_groebner, module_groebner_with_lift,
    point_ideal, relation_matrix, ModuleGB, MonomialOrder, Poly, PolyVector, QMatrix, Rational,
};
use crate::foliation::{
    adapted_frame, involutivity_check, lie_bracket, restrict_field, restrict_tangent_generators,
    AdaptedFrame, CoordinateSubspace, Foliation,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentSpace {
    pub dim: usize,
    /// Reduced row echelon basis of `F_x`.
    pub basis: Vec<Vec<Rational>>,
}

pub fn tangent_dim(f: &Foliation, x: &[Rational]) -> Result<TangentSpace> {
    let mut e = f.evaluation_matrix(x)?;
    let pivots = e.rref_in_place();
    let basis: Vec<Vec<Rational>> = e.rows()[..pivots.len()].to_vec();
    Ok(TangentSpace {
        dim: pivots.len(),
        basis,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberReport {
    pub point: Vec<Rational>,
    pub dim_tangent: usize,
    pub dim_fiber: usize,
    pub dim_isotropy: usize,
    /// Basis of `{c : sum c_i X_i in I_x F}`.
    pub relation_basis: Vec<Vec<Rational>>,
    /// Generators whose classes form a basis of the fiber.
    pub fiber_basis_indices: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointClass {
    Regular,
    Singular,
}

/// Finite-dimensional Lie algebra given by structure constants
/// `[e_a, e_b] = sum_c constants[a][b][c] e_c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebraPresentation {
    pub dim: usize,
    /// Vector fields whose classes give the basis; empty for an abstract
    /// presentation.
    pub basis_witnesses: Vec<PolyVector>,
    pub structure_constants: Vec<Vec<Vec<Rational>>>,
}

impl LieAlgebraPresentation {
    /// Abstract presentation; antisymmetry and Jacobi are checked.
    pub fn from_structure_constants(constants: Vec<Vec<Vec<Rational>>>) -> Result<Self> {
        let dim = constants.len();
        if constants
            .iter()
            .any(|r| r.len() != dim || r.iter().any(|c| c.len() != dim))
        {
            return Err(Error::Dimension("structure constants must be n x n x n".into()));
        }
        let l = LieAlgebraPresentation {
            dim,
            basis_witnesses: Vec::new(),
            structure_constants: constants,
        };
        l.verify()?;
        Ok(l)
    }

    pub fn abelian(dim: usize) -> Self {
        LieAlgebraPresentation {
            dim,
            basis_witnesses: Vec::new(),
            structure_constants: vec![vec![vec![Rational::zero(); dim]; dim]; dim],
        }
    }

    pub fn bracket(&self, u: &[Rational], v: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim];
        for (a, ua) in u.iter().enumerate() {
            if ua.is_zero() {
                continue;
            }
            for (b, vb) in v.iter().enumerate() {
                if vb.is_zero() {
                    continue;
                }
                let s = ua * vb;
                for (o, c) in out.iter_mut().zip(&self.structure_constants[a][b]) {
                    if !c.is_zero() {
                        *o += &s * c;
                    }
                }
            }
        }
        out
    }

    pub fn bracket_f64(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (a, ua) in u.iter().enumerate() {
            for (b, vb) in v.iter().enumerate() {
                let s = ua * vb;
                if s == 0.0 {
                    continue;
                }
                for (o, c) in out.iter_mut().zip(&self.structure_constants[a][b]) {
                    if !c.is_zero() {
                        *o += s * crate::exactalg::rat_to_f64(c);
                    }
                }
            }
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        self.structure_constants.iter().flatten().flatten().all(Zero::is_zero)
    }

    /// Exact antisymmetry and Jacobi identity.
    pub fn verify(&self) -> Result<()> {
        let n = self.dim;
        let unit = |i: usize| {
            let mut v = vec![Rational::zero(); n];
            v[i] = Rational::one();
            v
        };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.structure_constants[a][b][c] != -self.structure_constants[b][a][c].clone() {
                        return Err(Error::Internal(format!(
                            "structure constants not antisymmetric at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let (ea, eb, ec) = (unit(a), unit(b), unit(c));
                    let t1 = self.bracket(&self.bracket(&ea, &eb), &ec);
                    let t2 = self.bracket(&self.bracket(&eb, &ec), &ea);
                    let t3 = self.bracket(&self.bracket(&ec, &ea), &eb);
                    if t1.iter().zip(&t2).zip(&t3).any(|((x, y), z)| !(x + y + z).is_zero()) {
                        return Err(Error::Internal(format!(
                            "Jacobi identity fails for basis elements ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebraAnalysis {
    pub abelian: bool,
    pub derived_series: Vec<usize>,
    pub lower_central_series: Vec<usize>,
    pub center_dim: usize,
    /// Number of steps for the lower central series to reach 0, if it does.
    pub nilpotency_class: Option<usize>,
}

/// Per-foliation analyzer caching Gröbner bases of `I_x F` by point.
#[derive(Debug)]
pub struct Pointwise {
    foliation: Foliation,
    cache: Mutex<HashMap<Vec<Rational>, Arc<ModuleGB>>>,
}

impl Pointwise {
    pub fn new(foliation: Foliation) -> Self {
        Pointwise {
            foliation,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn foliation(&self) -> &Foliation {
        &self.foliation
    }

    /// Gröbner basis of the submodule `I_x F`, generated by `(x_j - a_j) X_i`.
    pub fn point_module(&self, x: &[Rational]) -> Result<Arc<ModuleGB>> {
        self.foliation.check_point(x)?;
        if let Some(gb) = self.cache.lock().unwrap().get(x) {
            return Ok(Arc::clone(gb));
        }
        let gb = Arc::new(point_module_gb(&self.foliation, x)?);
        self.cache
            .lock()
            .unwrap()
            .entry(x.to_vec())
            .or_insert_with(|| Arc::clone(&gb));
        Ok(gb)
    }

    pub fn fiber_report(&self, x: &[Rational]) -> Result<FiberReport> {
        let f = &self.foliation;
        let gb = self.point_module(x)?;
        let gens = f.generators();
        let relation_basis = linear_relation_space(gens, &gb)?;
        let dim_fiber = gens.len() - relation_basis.len();
        let mut m = relation_matrix(gens, &gb);
        let fiber_basis_indices = m.rref_in_place();

        let tangent = tangent_dim(f, x)?;
        let frame = adapted_frame(f, x)?;
        let dim_isotropy = independent_modulo(&frame.tail, &gb)?.len();

        if dim_fiber != tangent.dim + dim_isotropy {
            return Err(Error::Internal(format!(
                "fiber dimension {dim_fiber} != tangent {} + isotropy {dim_isotropy}",
                tangent.dim
            )));
        }
        debug_assert_eq!(fiber_basis_indices.len(), dim_fiber);
        Ok(FiberReport {
            point: x.to_vec(),
            dim_tangent: tangent.dim,
            dim_fiber,
            dim_isotropy,
            relation_basis,
            fiber_basis_indices,
        })
    }

    pub fn classify_point(&self, x: &[Rational]) -> Result<PointClass> {
        let r = self.fiber_report(x)?;
        let by_isotropy = r.dim_isotropy == 0;
        let by_dims = r.dim_fiber == r.dim_tangent;
        if by_isotropy != by_dims {
            return Err(Error::Internal(
                "regularity criteria disagree".into(),
            ));
        }
        Ok(if by_isotropy {
            PointClass::Regular
        } else {
            PointClass::Singular
        })
    }

    /// Isotropy Lie algebra with witnesses chosen as the lexicographically
    /// first maximal subset of the adapted frame's tail that is independent
    /// modulo `I_x F`.
    pub fn isotropy_algebra(&self, x: &[Rational]) -> Result<LieAlgebraPresentation> {
        self.require_involutive()?;
        let witnesses = self.isotropy_witnesses(x)?;
        structure_constants(witnesses, &*self.point_module(x)?)
    }

    /// Tail fields of the adapted frame whose classes form the canonical
    /// basis of the isotropy algebra (no involutivity requirement).
    pub fn isotropy_witnesses(&self, x: &[Rational]) -> Result<Vec<PolyVector>> {
        let gb = self.point_module(x)?;
        let frame = adapted_frame(&self.foliation, x)?;
        Ok(independent_modulo(&frame.tail, &gb)?
            .into_iter()
            .map(|i| frame.tail[i].clone())
            .collect())
    }

    /// Isotropy Lie algebra in a caller-chosen basis of witnesses. Each must
    /// vanish at `x`; together their classes must form a basis.
    pub fn isotropy_algebra_with_witnesses(
        &self,
        x: &[Rational],
        witnesses: Vec<PolyVector>,
    ) -> Result<LieAlgebraPresentation> {
        self.require_involutive()?;
        let gb = self.point_module(x)?;
        for (i, w) in witnesses.iter().enumerate() {
            if w.evaluate(x)?.iter().any(|v| !v.is_zero()) {
                return Err(Error::Precondition(format!("witness {i} does not vanish at the point")));
            }
        }
        if let Some(rel) = linear_relation_space(&witnesses, &gb)?.into_iter().next() {
            return Err(Error::Precondition(format!(
                "witnesses are dependent modulo I_x F: {}",
                Error::DependentFrame(rel)
            )));
        }
        let expected = self.fiber_report(x)?.dim_isotropy;
        if witnesses.len() != expected {
            return Err(Error::Precondition(format!(
                "{} witnesses for an isotropy algebra of dimension {expected}",
                witnesses.len()
            )));
        }
        structure_constants(witnesses, &gb)
    }

    fn require_involutive(&self) -> Result<()> {
        match involutivity_check(&self.foliation)? {
            crate::foliation::Involutivity::Involutive { .. } => Ok(()),
            crate::foliation::Involutivity::Unknown { pair, .. } => {
                Err(Error::InvolutivityUnknown(pair.0, pair.1))
            }
        }
    }
}

fn point_module_gb(f: &Foliation, x: &[Rational]) -> Result<ModuleGB> {
    let sub = ideal_times_module(&point_ideal(x), f.generators())?;
    if sub.is_empty() {
        // every generator is zero; the zero module
        return module_groebner(&[PolyVector::zero(f.dim(), f.dim())], MonomialOrder::GrevLex);
    }
    module_groebner(&sub, MonomialOrder::GrevLex)
}

/// Indices of the lexicographically first maximal subset of `fields` whose
/// classes modulo the module are independent.
fn independent_modulo(fields: &[PolyVector], gb: &ModuleGB) -> Result<Vec<usize>> {
    if fields.is_empty() {
        return Ok(Vec::new());
    }
    let mut m = relation_matrix(fields, gb);
    Ok(m.rref_in_place())
}

/// Solves `NF(v) = sum_g c_g NF(basis_g)`.
fn coordinates_modulo(basis: &[PolyVector], v: &PolyVector, gb: &ModuleGB) -> Option<Vec<Rational>> {
    let mut cols = basis.to_vec();
    cols.push(v.clone());
    let m = relation_matrix(&cols, gb);
    let l = basis.len();
    let a = QMatrix::from_rows(m.rows().iter().map(|r| r[..l].to_vec()).collect(), l);
    let b: Vec<Rational> = m.rows().iter().map(|r| r[l].clone()).collect();
    a.solve(&b)
}

fn structure_constants(witnesses: Vec<PolyVector>, gb: &ModuleGB) -> Result<LieAlgebraPresentation> {
    let l = witnesses.len();
    let mut c = vec![vec![vec![Rational::zero(); l]; l]; l];
    for a in 0..l {
        for b in a + 1..l {
            let br = lie_bracket(&witnesses[a], &witnesses[b])?;
            let coords = coordinates_modulo(&witnesses, &br, gb).ok_or_else(|| {
                Error::Internal(format!(
                    "bracket of witnesses {a} and {b} is not in the isotropy span; input is not involutive"
                ))
            })?;
            for (g, v) in coords.into_iter().enumerate() {
                c[b][a][g] = -v.clone();
                c[a][b][g] = v;
            }
        }
    }
    let lp = LieAlgebraPresentation {
        dim: l,
        basis_witnesses: witnesses,
        structure_constants: c,
    };
    lp.verify()?;
    Ok(lp)
}

pub fn fiber_report(f: &Foliation, x: &[Rational]) -> Result<FiberReport> {
    Pointwise::new(f.clone()).fiber_report(x)
}

pub fn classify_point(f: &Foliation, x: &[Rational]) -> Result<PointClass> {
    Pointwise::new(f.clone()).classify_point(x)
}

pub fn isotropy_algebra(f: &Foliation, x: &[Rational]) -> Result<LieAlgebraPresentation> {
    Pointwise::new(f.clone()).isotropy_algebra(x)
}

fn span_rref(vectors: Vec<Vec<Rational>>, n: usize) -> Vec<Vec<Rational>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let mut m = QMatrix::from_rows(vectors, n);
    let k = m.rref_in_place().len();
    m.into_rows().into_iter().take(k).collect()
}

pub fn lie_algebra_analysis(l: &LieAlgebraPresentation) -> LieAlgebraAnalysis {
    let n = l.dim;
    let full: Vec<Vec<Rational>> = QMatrix::identity(n).into_rows();
    let bracket_spaces = |s: &[Vec<Rational>], t: &[Vec<Rational>]| {
        let mut out = Vec::new();
        for u in s {
            for v in t {
                out.push(l.bracket(u, v));
            }
        }
        span_rref(out, n)
    };
    let series = |next: &dyn Fn(&[Vec<Rational>]) -> Vec<Vec<Rational>>| {
        let mut dims = vec![n];
        let mut cur = full.clone();
        loop {
            let nxt = next(&cur);
            if nxt.len() == cur.len() {
                break;
            }
            dims.push(nxt.len());
            cur = nxt;
        }
        dims
    };
    let derived_series = series(&|s| bracket_spaces(s, s));
    let lower_central_series = series(&|s| bracket_spaces(&full, s));

    // center = kernel of v -> ([v, e_1], ..., [v, e_n])
    let mut rows = Vec::new();
    for b in 0..n {
        for g in 0..n {
            rows.push((0..n).map(|a| l.structure_constants[a][b][g].clone()).collect());
        }
    }
    let center_dim = if n == 0 {
        0
    } else {
        n - QMatrix::from_rows(rows, n).rank()
    };
    let nilpotency_class = (lower_central_series.last() == Some(&0))
        .then(|| lower_central_series.len() - 1);

    LieAlgebraAnalysis {
        abelian: l.is_abelian(),
        derived_series,
        lower_central_series,
        center_dim,
        nilpotency_class,
    }
}

/// Local Lie algebroid data of a coordinate-subspace leaf in a frame of
/// recombined generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebroidLocalData {
    pub leaf: CoordinateSubspace,
    pub leaf_vars: Vec<String>,
    pub frame: Vec<PolyVector>,
    /// `anchor[a]` = components of frame field `a` restricted to the leaf,
    /// along the leaf coordinates, as polynomials in those coordinates.
    pub anchor: Vec<Vec<Poly>>,
    /// `brackets[a][b][g]` = coefficient of frame field `g` in `[e_a, e_b]`
    /// modulo `I_L F`, a polynomial in the leaf coordinates.
    pub brackets: Vec<Vec<Vec<Poly>>>,
}

impl AlgebroidLocalData {
    /// Pairs `(a, b)`, `a < b`, with a nonzero bracket.
    pub fn nonzero_brackets(&self) -> Vec<(usize, usize)> {
        let r = self.frame.len();
        let mut out = Vec::new();
        for a in 0..r {
            for b in a + 1..r {
                if self.brackets[a][b].iter().any(|p| !p.is_zero()) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

pub fn algebroid_local_data(
    f: &Foliation,
    leaf: &CoordinateSubspace,
    frame: &AdaptedFrame,
) -> Result<AlgebroidLocalData> {
    let d = f.dim();
    let m = f.num_generators();
    if !leaf.contains(&frame.base_point) {
        return Err(Error::Precondition("frame base point is not on the leaf".into()));
    }
    if frame.change_of_basis.nrows() != m || frame.change_of_basis.ncols() != m {
        return Err(Error::Dimension("frame does not belong to this foliation".into()));
    }
    let fields = frame.fields();
    for (r, e) in fields.iter().enumerate() {
        let expected = PolyVector::linear_combination(frame.change_of_basis.row(r), f.generators())?;
        if &expected != e {
            return Err(Error::Precondition(format!(
                "frame field {r} is not the stated combination of generators"
            )));
        }
    }

    let ideal = leaf.ideal(d);
    let sub = ideal_times_module(&ideal, f.generators())?;
    let leaf_gb = if sub.is_empty() {
        module_groebner(&[PolyVector::zero(d, d)], MonomialOrder::GrevLex)?
    } else {
        module_groebner(&sub, MonomialOrder::GrevLex)?
    };
    if let Some(rel) = linear_relation_space(&fields, &leaf_gb)?.into_iter().next() {
        return Err(Error::DependentFrame(rel));
    }

    let names = f.chart().var_names();
    let free = leaf.free_vars(d);
    let leaf_vars: Vec<String> = free.iter().map(|&i| names[i].clone()).collect();

    let mut anchor = Vec::with_capacity(fields.len());
    for (r, e) in fields.iter().enumerate() {
        let comps = if free.is_empty() {
            for (j, _) in leaf.fixed() {
                if !leaf.restrict_poly(e.component(*j))?.is_zero() {
                    return Err(Error::Precondition(format!(
                        "frame field {r} is not tangent to the leaf"
                    )));
                }
            }
            Vec::new()
        } else {
            match restrict_field(leaf, names, e)? {
                Ok(v) => v.into_components(),
                Err((component, value)) => {
                    return Err(Error::Precondition(format!(
                        "frame field {r} is not tangent to the leaf: component {component} = {value}"
                    )))
                }
            }
        };
        anchor.push(comps);
    }

    let gb = module_groebner_with_lift(f.generators(), MonomialOrder::GrevLex)?;
    let c_inv = frame
        .change_of_basis
        .inverse()
        .ok_or_else(|| Error::Precondition("change of basis is singular".into()))?;
    let r = fields.len();
    let zero_row = vec![Poly::zero(free.len()); r];
    let mut brackets = vec![vec![zero_row.clone(); r]; r];
    for a in 0..r {
        for b in 0..r {
            if a == b {
                continue;
            }
            let br = lie_bracket(&fields[a], &fields[b])?;
            let cof = gb
                .lift(&br)?
                .ok_or(Error::InvolutivityUnknown(a.min(b), a.max(b)))?;
            for g in 0..r {
                let mut coeff = Poly::zero(d);
                for (k, ak) in cof.iter().enumerate() {
                    let ck = c_inv.get(k, g);
                    if !ck.is_zero() && !ak.is_zero() {
                        coeff = &coeff + &ak.scale(ck);
                    }
                }
                brackets[a][b][g] = leaf.restrict_poly(&coeff)?;
            }
        }
    }

    for a in 0..r {
        for b in 0..r {
            for g in 0..r {
                if brackets[a][b][g] != -&brackets[b][a][g] {
                    return Err(Error::Internal(format!(
                        "algebroid bracket table not antisymmetric at ({a}, {b})"
                    )));
                }
            }
        }
    }

    // Anchor compatibility: rho([e_a, e_b]) = [rho(e_a), rho(e_b)] on the leaf.
    let k = free.len();
    if k > 0 {
        let as_field = |comps: &[Poly]| PolyVector::new(comps.to_vec());
        for a in 0..r {
            for b in a + 1..r {
                let lhs_direct = lie_bracket(&as_field(&anchor[a])?, &as_field(&anchor[b])?)?;
                let mut rhs = PolyVector::zero(k, k);
                for g in 0..r {
                    rhs = rhs.checked_add(&as_field(&anchor[g])?.mul_poly(&brackets[a][b][g])?)?;
                }
                if lhs_direct != rhs {
                    return Err(Error::Internal(format!(
                        "anchor is not compatible with the bracket for frame fields ({a}, {b})"
                    )));
                }
            }
        }
    }

    Ok(AlgebroidLocalData {
        leaf: leaf.clone(),
        leaf_vars,
        frame: fields,
        anchor,
        brackets,
    })
}

/// Isotropy at `x` compared with the isotropy of the foliation induced on a
/// transversal slice through `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransversalIsotropy {
    pub ambient: LieAlgebraPresentation,
    /// Presentation of `(F_S)_x` in the basis given by the restricted
    /// ambient witnesses.
    pub slice: LieAlgebraPresentation,
    /// Generators left out of `F_S` because they are not tangent to the slice.
    pub dropped_generators: Vec<usize>,
    pub structure_constants_agree: bool,
}

/// Representative restriction `g_x -> (F_S)_x` for a slice `S` through `x`
/// with `T_x S` complementary to `F_x`: each ambient isotropy witness must be
/// tangent to `S` and is restricted as is. Fails if a witness is not
/// tangent; no other representative of its class is searched for.
///
/// `F_S` is generated by the restrictions of the generators tangent to `S`.
pub fn transversal_isotropy(f: &Foliation, x: &[Rational], slice: &CoordinateSubspace) -> Result<TransversalIsotropy> {
    if !slice.contains(x) {
        return Err(Error::Precondition("the point is not on the slice".into()));
    }
    let d = f.dim();
    let free = slice.free_vars(d);
    let tangent = tangent_dim(f, x)?;
    let mut rows = tangent.basis.clone();
    for &i in &free {
        let mut e = vec![Rational::zero(); d];
        e[i] = Rational::one();
        rows.push(e);
    }
    if tangent.dim + free.len() != d || QMatrix::from_rows(rows, d).rank() != d {
        return Err(Error::Precondition(
            "the slice is not a complement of the leaf's tangent space at the point".into(),
        ));
    }
    let pw = Pointwise::new(f.clone());
    let ambient = pw.isotropy_algebra(x)?;
    let names = f.chart().var_names();
    let restricted = ambient
        .basis_witnesses
        .iter()
        .enumerate()
        .map(|(i, w)| match restrict_field(slice, names, w)? {
            Ok(v) => Ok(v),
            Err((component, value)) => Err(Error::Precondition(format!(
                "isotropy witness {i} is not tangent to the slice: its {component} component is {value} there"
            ))),
        })
        .collect::<Result<Vec<_>>>()?;
    let (fs, dropped_generators) = match restrict_tangent_generators(f, slice) {
        Ok((fs, rejected)) => {
            let dropped = rejected
                .iter()
                .filter_map(|e| match e {
                    Error::Tangency { generator, .. } => Some(*generator),
                    _ => None,
                })
                .collect();
            (fs, dropped)
        }
        // no generator is tangent: F_S is the zero foliation
        Err(Error::Tangency { .. }) => {
            let k = free.len();
            let zero = Foliation::new(slice.restrict_chart(f.chart())?, vec![PolyVector::zero(k, k)])?;
            (zero, (0..f.num_generators()).collect())
        }
        Err(e) => return Err(e),
    };
    let slice_algebra = Pointwise::new(fs).isotropy_algebra_with_witnesses(&slice.project(x), restricted)?;
    let structure_constants_agree = slice_algebra.structure_constants == ambient.structure_constants;
    Ok(TransversalIsotropy {
        ambient,
        slice: slice_algebra,
        dropped_generators,
        structure_constants_agree,
    })
}
