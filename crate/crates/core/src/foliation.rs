//! Foliations as finitely generated modules of polynomial vector fields on a
//! coordinate chart, with brackets, involutivity certificates, adapted
//! frames, slice restriction and products.

use std::collections::HashSet;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactalg::{
    module_groebner_with_lift, MonomialOrder, Poly, PolyVector, QMatrix, Rational,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chart {
    var_names: Vec<String>,
}

impl Chart {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let var_names: Vec<String> = names.into_iter().map(Into::into).collect();
        if var_names.is_empty() {
            return Err(Error::Precondition("chart of dimension 0".into()));
        }
        let mut seen = HashSet::new();
        for n in &var_names {
            if !seen.insert(n.as_str()) {
                return Err(Error::Precondition(format!("duplicate variable name `{n}`")));
            }
        }
        Ok(Chart { var_names })
    }

    /// Chart with variables `x1..xd`.
    pub fn standard(dim: usize) -> Result<Self> {
        Chart::new((1..=dim).map(|i| format!("x{i}")))
    }

    pub fn dim(&self) -> usize {
        self.var_names.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.var_names.iter().position(|n| n == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Foliation {
    chart: Chart,
    generators: Vec<PolyVector>,
    names: Vec<String>,
}

impl Foliation {
    /// Generators get default names `X1, X2, ...`.
    pub fn new(chart: Chart, generators: Vec<PolyVector>) -> Result<Self> {
        let names = (1..=generators.len()).map(|i| format!("X{i}")).collect();
        Foliation::with_names(chart, generators, names)
    }

    pub fn with_names(chart: Chart, generators: Vec<PolyVector>, names: Vec<String>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Precondition("a foliation needs at least one generator".into()));
        }
        if names.len() != generators.len() {
            return Err(Error::Precondition(format!(
                "{} names for {} generators",
                names.len(),
                generators.len()
            )));
        }
        let d = chart.dim();
        for (g, n) in generators.iter().zip(&names) {
            if g.dim() != d || g.num_vars() != d {
                return Err(Error::Dimension(format!(
                    "generator `{n}` has shape ({}, {}) on a chart of dimension {d}",
                    g.dim(),
                    g.num_vars()
                )));
            }
        }
        Ok(Foliation {
            chart,
            generators,
            names,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn generators(&self) -> &[PolyVector] {
        &self.generators
    }

    pub fn generator_names(&self) -> &[String] {
        &self.names
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub(crate) fn check_point(&self, x: &[Rational]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "point of length {} on a chart of dimension {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Rows are the generator values `X_i(x)`.
    pub fn evaluation_matrix(&self, x: &[Rational]) -> Result<QMatrix> {
        self.check_point(x)?;
        let rows = self
            .generators
            .iter()
            .map(|g| g.evaluate(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(QMatrix::from_rows(rows, self.dim()))
    }

    /// Human-readable field `a*d(x) + b*d(y)` using chart names.
    pub fn display_field(&self, v: &PolyVector) -> String {
        display_field(self.chart.var_names(), v)
    }
}

pub fn display_field(names: &[String], v: &PolyVector) -> String {
    let parts: Vec<String> = v
        .components()
        .iter()
        .zip(names)
        .filter(|(p, _)| !p.is_zero())
        .map(|(p, n)| {
            if p.num_terms() == 1 || p.is_constant() {
                let s = p.display(names).to_string();
                if s == "1" {
                    format!("d({n})")
                } else if s == "-1" {
                    format!("-d({n})")
                } else {
                    format!("{s}*d({n})")
                }
            } else {
                format!("({})*d({n})", p.display(names))
            }
        })
        .collect();
    let mut out = String::new();
    for (i, t) in parts.iter().enumerate() {
        match (i, t.strip_prefix('-')) {
            (0, _) => out.push_str(t),
            (_, Some(rest)) => out.push_str(&format!(" - {rest}")),
            (_, None) => out.push_str(&format!(" + {t}")),
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

impl fmt::Display for Foliation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.display_field(g))?;
        }
        write!(f, "> on ({})", self.chart.var_names.join(", "))
    }
}

/// `[X, Y]_i = sum_j X_j d_j Y_i - Y_j d_j X_i`.
pub fn lie_bracket(x: &PolyVector, y: &PolyVector) -> Result<PolyVector> {
    let d = x.dim();
    if y.dim() != d || x.num_vars() != d || y.num_vars() != d {
        return Err(Error::Dimension(format!(
            "bracket of fields with shapes ({}, {}) and ({}, {})",
            x.dim(),
            x.num_vars(),
            y.dim(),
            y.num_vars()
        )));
    }
    let mut comps = Vec::with_capacity(d);
    for i in 0..d {
        let mut c = Poly::zero(d);
        for j in 0..d {
            let xj = x.component(j);
            let yj = y.component(j);
            if !xj.is_zero() {
                c = &c + &(xj * &y.component(i).partial_derivative(j)?);
            }
            if !yj.is_zero() {
                c = &c - &(yj * &x.component(i).partial_derivative(j)?);
            }
        }
        comps.push(c);
    }
    PolyVector::new(comps)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketWitness {
    pub pair: (usize, usize),
    pub bracket: PolyVector,
    /// `bracket = sum_k cofactors[k] * X_k`.
    pub cofactors: Vec<Poly>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Involutivity {
    Involutive { witnesses: Vec<BracketWitness> },
    /// Membership of this bracket in the polynomial module failed. This does
    /// not prove the smooth module is not involutive.
    Unknown { pair: (usize, usize), bracket: PolyVector },
}

impl Involutivity {
    pub fn is_involutive(&self) -> bool {
        matches!(self, Involutivity::Involutive { .. })
    }
}

/// Checks every bracket `[X_i, X_j]`, `i < j`, for membership in the
/// polynomial module generated by the `X_k`, recording cofactors.
pub fn involutivity_check(f: &Foliation) -> Result<Involutivity> {
    let gb = module_groebner_with_lift(f.generators(), MonomialOrder::GrevLex)?;
    let mut witnesses = Vec::new();
    let m = f.num_generators();
    for i in 0..m {
        for j in i + 1..m {
            let bracket = lie_bracket(&f.generators[i], &f.generators[j])?;
            match gb.lift(&bracket)? {
                Some(cofactors) => witnesses.push(BracketWitness {
                    pair: (i, j),
                    bracket,
                    cofactors,
                }),
                None => {
                    return Ok(Involutivity::Unknown {
                        pair: (i, j),
                        bracket,
                    })
                }
            }
        }
    }
    Ok(Involutivity::Involutive { witnesses })
}

/// Generators recombined at a point so that the first `rank` span the
/// tangent space there and the rest vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptedFrame {
    pub base_point: Vec<Rational>,
    /// Recombined generators whose values at the base point are independent.
    pub leaf: Vec<PolyVector>,
    /// Recombined generators vanishing at the base point.
    pub tail: Vec<PolyVector>,
    /// Invertible `m x m` matrix; row `r` holds the coefficients of frame
    /// field `r` (leaf first, then tail) in the original generators.
    pub change_of_basis: QMatrix,
}

impl AdaptedFrame {
    pub fn rank(&self) -> usize {
        self.leaf.len()
    }

    /// Leaf fields followed by tail fields.
    pub fn fields(&self) -> Vec<PolyVector> {
        self.leaf.iter().chain(&self.tail).cloned().collect()
    }
}

/// Gaussian elimination over `Q` on the evaluation matrix `[X_i(x)]` with
/// leftmost pivots; the same row operations recombine the generators.
pub fn adapted_frame(f: &Foliation, x: &[Rational]) -> Result<AdaptedFrame> {
    let mut eval = f.evaluation_matrix(x)?;
    let m = f.num_generators();
    let mut c = QMatrix::identity(m);
    let pivots = eval.rref_with(Some(&mut c));
    let k = pivots.len();
    let fields = (0..m)
        .map(|r| PolyVector::linear_combination(c.row(r), f.generators()))
        .collect::<Result<Vec<_>>>()?;
    let (leaf, tail) = fields.split_at(k);
    Ok(AdaptedFrame {
        base_point: x.to_vec(),
        leaf: leaf.to_vec(),
        tail: tail.to_vec(),
        change_of_basis: c,
    })
}

/// A coordinate subspace `{x_j = a_j for j in fixed}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoordinateSubspace {
    fixed: Vec<(usize, Rational)>,
}

impl CoordinateSubspace {
    pub fn new(mut fixed: Vec<(usize, Rational)>) -> Result<Self> {
        fixed.sort_by_key(|(i, _)| *i);
        if fixed.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Precondition("coordinate fixed twice".into()));
        }
        Ok(CoordinateSubspace { fixed })
    }

    pub fn from_names(chart: &Chart, fixed: &[(String, Rational)]) -> Result<Self> {
        let idx = fixed
            .iter()
            .map(|(n, v)| {
                chart
                    .index_of(n)
                    .map(|i| (i, v.clone()))
                    .ok_or_else(|| Error::Precondition(format!("unknown variable `{n}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        CoordinateSubspace::new(idx)
    }

    /// The whole chart (nothing fixed).
    pub fn full() -> Self {
        CoordinateSubspace { fixed: Vec::new() }
    }

    pub fn fixed(&self) -> &[(usize, Rational)] {
        &self.fixed
    }

    pub fn is_fixed(&self, var: usize) -> bool {
        self.fixed.iter().any(|(i, _)| *i == var)
    }

    pub fn free_vars(&self, dim: usize) -> Vec<usize> {
        (0..dim).filter(|&i| !self.is_fixed(i)).collect()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.fixed.iter().all(|(i, v)| x.get(*i) == Some(v))
    }

    /// Generators `x_j - a_j` of the vanishing ideal, in `dim` variables.
    pub fn ideal(&self, dim: usize) -> Vec<Poly> {
        self.fixed
            .iter()
            .map(|(i, v)| &Poly::var(dim, *i) - &Poly::constant(dim, v.clone()))
            .collect()
    }

    /// Coordinates of `x` along the free variables.
    pub fn project(&self, x: &[Rational]) -> Vec<Rational> {
        self.free_vars(x.len()).into_iter().map(|i| x[i].clone()).collect()
    }

    fn check(&self, dim: usize) -> Result<()> {
        if let Some((i, _)) = self.fixed.iter().find(|(i, _)| *i >= dim) {
            return Err(Error::Dimension(format!(
                "fixed coordinate {i} on a chart of dimension {dim}"
            )));
        }
        if self.fixed.len() == dim {
            return Err(Error::Precondition("slice fixes every coordinate".into()));
        }
        Ok(())
    }

    /// Substitutes fixed values and rewrites a polynomial in the free
    /// variables only.
    pub fn restrict_poly(&self, p: &Poly) -> Result<Poly> {
        let dim = p.num_vars();
        let mut q = p.clone();
        for (i, v) in &self.fixed {
            q = q.substitute(*i, v);
        }
        let free = self.free_vars(dim);
        let mut map = vec![None; dim];
        for (new, &old) in free.iter().enumerate() {
            map[old] = Some(new);
        }
        q.remap(free.len(), &map)
    }

    /// Restricted chart made of the free variables.
    pub fn restrict_chart(&self, chart: &Chart) -> Result<Chart> {
        Chart::new(
            self.free_vars(chart.dim())
                .into_iter()
                .map(|i| chart.var_names()[i].clone()),
        )
    }
}

/// Restriction of one field to the slice, or the first failing component.
pub(crate) fn restrict_field(
    slice: &CoordinateSubspace,
    names: &[String],
    g: &PolyVector,
) -> Result<std::result::Result<PolyVector, (String, String)>> {
    for (j, _) in slice.fixed() {
        let on_slice = slice.restrict_poly(g.component(*j))?;
        if !on_slice.is_zero() {
            let free: Vec<String> = slice
                .free_vars(names.len())
                .into_iter()
                .map(|i| names[i].clone())
                .collect();
            return Ok(Err((names[*j].clone(), on_slice.display(&free).to_string())));
        }
    }
    let comps = slice
        .free_vars(names.len())
        .into_iter()
        .map(|i| slice.restrict_poly(g.component(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Ok(PolyVector::new(comps)?))
}

fn assemble_restriction(
    chart: Chart,
    restricted: Vec<(PolyVector, String)>,
) -> Result<Foliation> {
    let mut kept: Vec<(PolyVector, String)> =
        restricted.iter().filter(|(v, _)| !v.is_zero()).cloned().collect();
    if kept.is_empty() {
        kept.push(restricted[0].clone());
    }
    let (gens, names): (Vec<_>, Vec<_>) = kept.into_iter().unzip();
    Foliation::with_names(chart, gens, names)
}

/// Restricts every generator to a coordinate slice after checking that its
/// components along the fixed coordinates vanish identically there.
///
/// Generators restricting to the zero field are dropped (one is kept if all
/// of them vanish).
pub fn slice_restriction(f: &Foliation, slice: &CoordinateSubspace) -> Result<Foliation> {
    slice.check(f.dim())?;
    let names = f.chart().var_names();
    let mut restricted = Vec::new();
    for (i, g) in f.generators().iter().enumerate() {
        match restrict_field(slice, names, g)? {
            Ok(v) => restricted.push((v, f.names[i].clone())),
            Err((component, value)) => {
                return Err(Error::Tangency {
                    generator: i,
                    component,
                    value,
                })
            }
        }
    }
    assemble_restriction(slice.restrict_chart(f.chart())?, restricted)
}

/// Lenient variant of [`slice_restriction`]: generators failing the
/// tangency certificate are skipped and reported instead of aborting.
///
/// The result is generated by restrictions of the passing generators only,
/// which can be smaller than the full restricted module.
pub fn restrict_tangent_generators(
    f: &Foliation,
    slice: &CoordinateSubspace,
) -> Result<(Foliation, Vec<Error>)> {
    slice.check(f.dim())?;
    let names = f.chart().var_names();
    let mut restricted = Vec::new();
    let mut rejected = Vec::new();
    for (i, g) in f.generators().iter().enumerate() {
        match restrict_field(slice, names, g)? {
            Ok(v) => restricted.push((v, f.names[i].clone())),
            Err((component, value)) => rejected.push(Error::Tangency {
                generator: i,
                component,
                value,
            }),
        }
    }
    if restricted.is_empty() {
        return Err(rejected.swap_remove(0));
    }
    Ok((assemble_restriction(slice.restrict_chart(f.chart())?, restricted)?, rejected))
}

/// Product foliation on the concatenated chart, generated by the trivial
/// extensions of both generator lists. Clashing variable names of the
/// second factor get a `_2` suffix.
pub fn product(f1: &Foliation, f2: &Foliation) -> Result<Foliation> {
    let d1 = f1.dim();
    let d2 = f2.dim();
    let d = d1 + d2;
    let mut names: Vec<String> = f1.chart().var_names().to_vec();
    for n in f2.chart().var_names() {
        let mut candidate = n.clone();
        while names.contains(&candidate) {
            candidate.push_str("_2");
        }
        names.push(candidate);
    }
    let map1: Vec<Option<usize>> = (0..d1).map(Some).collect();
    let map2: Vec<Option<usize>> = (0..d2).map(|i| Some(d1 + i)).collect();
    let extend = |g: &PolyVector, offset: usize, map: &[Option<usize>]| -> Result<PolyVector> {
        let mut comps = vec![Poly::zero(d); d];
        for (i, c) in g.components().iter().enumerate() {
            comps[offset + i] = c.remap(d, map)?;
        }
        PolyVector::new(comps)
    };
    let mut gens = Vec::new();
    let mut gen_names = Vec::new();
    for (g, n) in f1.generators().iter().zip(f1.generator_names()) {
        gens.push(extend(g, 0, &map1)?);
        gen_names.push(n.clone());
    }
    for (g, n) in f2.generators().iter().zip(f2.generator_names()) {
        gens.push(extend(g, d1, &map2)?);
        let mut candidate = n.clone();
        while gen_names.contains(&candidate) {
            candidate.push_str("_2");
        }
        gen_names.push(candidate);
    }
    Foliation::with_names(Chart::new(names)?, gens, gen_names)
}

/// True when every coordinate of `x` is zero.
pub fn is_origin(x: &[Rational]) -> bool {
    x.iter().all(Zero::is_zero)
}
