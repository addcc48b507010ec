//! One function per command. Each returns JSON data plus text lines, or an
//! error message that ends up embedded in the report.

use folhol_core::dsl::{self, Document, Value as DslValue};
use folhol_core::exactalg::{rat_to_f64, Poly, PolyVector, Rational};
use folhol_core::flows::{FlowConfig, TimeDependentField};
use folhol_core::foliation::{
    adapted_frame, display_field, involutivity_check, lie_bracket, slice_restriction, CoordinateSubspace, Foliation,
    Involutivity,
};
use folhol_core::holonomy::{
    delta_map, discreteness_linear_probe, exponential_condition_witness_check, kernel_linear_probe, linear_holonomy,
    Injectivity, KernelProbe, LinearHolonomy, LocalGroupElement, PathHolonomyBiSubmersion,
};
use folhol_core::pointwise::{algebroid_local_data, lie_algebra_analysis, LieAlgebraPresentation, PointClass, Pointwise};
use serde_json::{json, Value};

use crate::report::{self, float, floats, matrix, point_text, rat, rats, short, short_matrix};

pub type Outcome = Result<(Value, Vec<String>), String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub fn fiber(pw: &Pointwise, x: &[Rational]) -> Outcome {
    let r = pw.fiber_report(x).map_err(err)?;
    let data = json!({
        "point": rats(&r.point),
        "dim_tangent": r.dim_tangent,
        "dim_fiber": r.dim_fiber,
        "dim_isotropy": r.dim_isotropy,
        "relations": r.relation_basis.iter().map(|v| rats(v)).collect::<Vec<_>>(),
        "fiber_basis": r.fiber_basis_indices.iter().map(|&i| pw.foliation().generator_names()[i].clone()).collect::<Vec<_>>(),
    });
    let lines = vec![format!(
        "fiber {}, tangent {}, isotropy {}",
        r.dim_fiber, r.dim_tangent, r.dim_isotropy
    )];
    Ok((data, lines))
}

fn algebra_json(f: &Foliation, l: &LieAlgebraPresentation) -> (Value, Vec<String>) {
    let a = lie_algebra_analysis(l);
    let mut constants = Vec::new();
    let mut lines = vec![format!("isotropy algebra of dimension {}", l.dim)];
    for (i, w) in l.basis_witnesses.iter().enumerate() {
        lines.push(format!("e{i} = {}", f.display_field(w)));
    }
    for a_ in 0..l.dim {
        for b in a_ + 1..l.dim {
            let terms: Vec<String> = (0..l.dim)
                .filter(|&c| l.structure_constants[a_][b][c] != Rational::from_integer(0.into()))
                .map(|c| {
                    let v = &l.structure_constants[a_][b][c];
                    constants.push(json!([a_, b, c, rat(v)]));
                    match v.to_string().as_str() {
                        "1" => format!("e{c}"),
                        "-1" => format!("-e{c}"),
                        t => format!("{t}*e{c}"),
                    }
                })
                .collect();
            if !terms.is_empty() {
                lines.push(format!("[e{a_}, e{b}] = {}", signed_sum(&terms)));
            }
        }
    }
    lines.push(format!(
        "abelian {}, derived series {:?}, lower central series {:?}, center {}, nilpotency class {}",
        a.abelian,
        a.derived_series,
        a.lower_central_series,
        a.center_dim,
        a.nilpotency_class.map_or("none".into(), |c| c.to_string())
    ));
    let data = json!({
        "dim": l.dim,
        "witnesses": l.basis_witnesses.iter().map(|w| f.display_field(w)).collect::<Vec<_>>(),
        "structure_constants": constants,
        "abelian": a.abelian,
        "derived_series": a.derived_series,
        "lower_central_series": a.lower_central_series,
        "center_dim": a.center_dim,
        "nilpotency_class": a.nilpotency_class,
    });
    (data, lines)
}

pub fn isotropy(pw: &Pointwise, x: &[Rational]) -> Outcome {
    let l = pw.isotropy_algebra(x).map_err(err)?;
    Ok(algebra_json(pw.foliation(), &l))
}

pub fn classify(pw: &Pointwise, x: &[Rational]) -> Outcome {
    let c = pw.classify_point(x).map_err(err)?;
    let name = match c {
        PointClass::Regular => "regular",
        PointClass::Singular => "singular",
    };
    Ok((json!({ "class": name }), vec![name.to_string()]))
}

/// Joins signed terms as `a - b + c`.
fn signed_sum(terms: &[String]) -> String {
    let mut out = String::new();
    for (i, t) in terms.iter().enumerate() {
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

fn scaled(coef: &Poly, names: &[String], symbol: &str) -> String {
    let s = coef.display(names).to_string();
    match s.as_str() {
        "1" => symbol.to_string(),
        "-1" => format!("-{symbol}"),
        _ if coef.num_terms() == 1 => format!("{s}*{symbol}"),
        _ => format!("({s})*{symbol}"),
    }
}

fn combination(f: &Foliation, cofactors: &[Poly]) -> String {
    let names = f.chart().var_names();
    let terms: Vec<String> = cofactors
        .iter()
        .zip(f.generator_names())
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, g)| scaled(c, names, g))
        .collect();
    signed_sum(&terms)
}

pub fn involutivity(f: &Foliation) -> Outcome {
    let names = f.generator_names();
    match involutivity_check(f).map_err(err)? {
        Involutivity::Involutive { witnesses } => {
            let mut lines = vec![format!("involutive; {} bracket witnesses", witnesses.len())];
            let ws: Vec<Value> = witnesses
                .iter()
                .map(|w| {
                    let (i, j) = w.pair;
                    let combo = combination(f, &w.cofactors);
                    lines.push(format!("[{}, {}] = {}", names[i], names[j], combo));
                    json!({
                        "pair": [names[i], names[j]],
                        "bracket": f.display_field(&w.bracket),
                        "cofactors": w.cofactors.iter().map(|c| c.display(f.chart().var_names()).to_string()).collect::<Vec<_>>(),
                    })
                })
                .collect();
            Ok((json!({ "status": "involutive", "witnesses": ws }), lines))
        }
        Involutivity::Unknown { pair, bracket } => Err(format!(
            "involutivity unknown: [{}, {}] = {} is not in the polynomial module",
            names[pair.0],
            names[pair.1],
            f.display_field(&bracket)
        )),
    }
}

pub fn bracket_table(f: &Foliation) -> Outcome {
    let names = f.generator_names();
    let g = f.generators();
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            let b = lie_bracket(&g[i], &g[j]).map_err(err)?;
            let text = if b.is_zero() { "0".to_string() } else { f.display_field(&b) };
            lines.push(format!("[{}, {}] = {text}", names[i], names[j]));
            rows.push(json!({ "pair": [names[i], names[j]], "bracket": text }));
        }
    }
    let closed = involutivity_check(f).map_err(err)?.is_involutive();
    lines.push(format!("closed under brackets: {closed}"));
    Ok((json!({ "brackets": rows, "involutive": closed }), lines))
}

pub fn algebroid(f: &Foliation, leaf: &CoordinateSubspace, x: &[Rational]) -> Outcome {
    let frame = adapted_frame(f, x).map_err(err)?;
    let data = algebroid_local_data(f, leaf, &frame).map_err(err)?;
    let names = &data.leaf_vars;
    let frame_text: Vec<String> = data.frame.iter().map(|v| f.display_field(v)).collect();
    let mut lines = vec![format!("rank {} over a leaf of dimension {}", data.frame.len(), names.len())];
    for (a, t) in frame_text.iter().enumerate() {
        lines.push(format!("b{a} = {t}"));
    }
    let anchor: Vec<String> = data
        .anchor
        .iter()
        .map(|row| {
            let v = PolyVector::new(row.clone()).expect("anchor rows share the leaf ring");
            display_field(names, &v)
        })
        .collect();
    for (a, s) in anchor.iter().enumerate() {
        lines.push(format!("anchor(b{a}) = {s}"));
    }
    let mut brackets = Vec::new();
    for (a, b) in data.nonzero_brackets() {
        let terms: Vec<String> = data.brackets[a][b]
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(g, p)| scaled(p, names, &format!("b{g}")))
            .collect();
        lines.push(format!("[b{a}, b{b}] = {}", signed_sum(&terms)));
        brackets.push(json!({
            "pair": [a, b],
            "coefficients": data.brackets[a][b].iter().map(|p| p.display(names).to_string()).collect::<Vec<_>>(),
        }));
    }
    let json = json!({
        "leaf_vars": names,
        "frame": frame_text,
        "anchor": anchor,
        "brackets": brackets,
    });
    Ok((json, lines))
}

fn holonomy_json(lh: &LinearHolonomy, xi: &[f64]) -> (Value, Vec<String>) {
    let data = json!({
        "xi": floats(xi),
        "full_jacobian": matrix(&lh.full_jacobian),
        "leaf_subspace": matrix(&lh.leaf_subspace),
        "normal_matrix": matrix(&lh.normal_matrix),
        "leaf_invariance_defect": float(lh.leaf_invariance_defect),
    });
    let lines = vec![
        format!("xi = [{}]", xi.iter().map(|v| short(*v)).collect::<Vec<_>>().join(", ")),
        format!("full jacobian {}", short_matrix(&lh.full_jacobian)),
        format!("normal matrix {}", short_matrix(&lh.normal_matrix)),
    ];
    (data, lines)
}

pub enum Coordinates {
    Lambda(Vec<f64>),
    Xi(Vec<f64>),
}

pub fn holonomy(u: &PathHolonomyBiSubmersion, c: &Coordinates) -> Outcome {
    let xi = match c {
        Coordinates::Xi(xi) => xi.clone(),
        Coordinates::Lambda(l) => delta_map(u, &LocalGroupElement::new(l.clone())).map_err(err)?,
    };
    let lh = linear_holonomy(u, &xi).map_err(err)?;
    Ok(holonomy_json(&lh, &xi))
}

pub fn probe_kernel(u: &PathHolonomyBiSubmersion, xi: &[f64], tol: f64) -> Outcome {
    let (verdict, lh) = kernel_linear_probe(u, xi, tol).map_err(err)?;
    let name = match verdict {
        KernelProbe::NotInKernel => "not_in_kernel",
        KernelProbe::Inconclusive => "inconclusive",
    };
    let (mut data, mut lines) = holonomy_json(&lh, xi);
    data["verdict"] = json!(name);
    lines.insert(0, format!("verdict: {name}"));
    Ok((data, lines))
}

pub fn probe_discreteness(f: &Foliation, x: &[Rational], slice: &CoordinateSubspace) -> Outcome {
    let p = discreteness_linear_probe(f, x, slice).map_err(err)?;
    let (outcome, line) = match p.outcome {
        Injectivity::Unbounded { degenerate_span } => (
            json!({ "kind": "unbounded", "degenerate_span": degenerate_span }),
            format!("no bound from the linear parts (degenerate span: {degenerate_span})"),
        ),
        Injectivity::Box { radius } => (
            json!({ "kind": "box", "radius": float(radius) }),
            format!("injective on the coefficient box of radius {}", short(radius)),
        ),
    };
    let data = json!({
        "outcome": outcome,
        "linear_parts": p.linear_parts.iter().map(report::qmatrix).collect::<Vec<_>>(),
        "grid_spacing": float(p.grid_spacing),
    });
    Ok((data, vec![line]))
}

/// Splits a field expression in the slice variables plus `t` into
/// `sum_k t^k X_k`.
pub fn time_dependent(src: &str, vars: &[String]) -> Result<TimeDependentField, String> {
    if vars.iter().any(|v| v == "t") {
        return Err("the slice already has a variable named `t`".into());
    }
    let mut all = vars.to_vec();
    all.push("t".into());
    let n = vars.len();
    let field = match dsl::parse_expression(src, &all).map_err(err)? {
        DslValue::Field(v) => v,
        DslValue::Scalar(_) => return Err("expected a vector field".into()),
    };
    let mut by_power: std::collections::BTreeMap<u32, Vec<Poly>> = Default::default();
    let keep: Vec<Option<usize>> = (0..=n).map(|i| (i < n).then_some(i)).collect();
    for (c, p) in field.components().iter().enumerate() {
        if c == n {
            if !p.is_zero() {
                return Err("the field has a d(t) component".into());
            }
            continue;
        }
        for (m, coef) in p.terms() {
            let k = m.exponents()[n];
            let mut e = m.exponents().to_vec();
            e[n] = 0;
            let term = Poly::monomial(n + 1, folhol_core::exactalg::Monomial::from_exponents(e), coef.clone())
                .remap(n, &keep)
                .map_err(err)?;
            let comps = by_power.entry(k).or_insert_with(|| vec![Poly::zero(n); n]);
            comps[c] = &comps[c] + &term;
        }
    }
    let terms = by_power
        .into_iter()
        .map(|(k, comps)| Ok((Poly::var(1, 0).pow(k), PolyVector::new(comps).map_err(err)?)))
        .collect::<Result<Vec<_>, String>>()?;
    if terms.is_empty() {
        return Ok(TimeDependentField::autonomous(PolyVector::zero(n, n)));
    }
    TimeDependentField::new(terms).map_err(err)
}

pub struct WitnessInput<'a> {
    pub slice: &'a CoordinateSubspace,
    pub point: &'a [Rational],
    pub field: &'a str,
    pub witness: &'a str,
    pub samples: Option<Vec<Vec<f64>>>,
}

pub fn check_witness(f: &Foliation, w: &WitnessInput, tol: f64) -> Outcome {
    if !w.slice.contains(w.point) {
        return Err("the point is not on the slice".into());
    }
    let fs = slice_restriction(f, w.slice).map_err(err)?;
    let xs = w.slice.project(w.point);
    let vars = fs.chart().var_names().to_vec();
    let xt = time_dependent(w.field, &vars)?;
    let z = match dsl::parse_expression(w.witness, &vars).map_err(err)? {
        DslValue::Field(v) => v,
        DslValue::Scalar(_) => return Err("the witness must be a vector field".into()),
    };
    let samples = match &w.samples {
        Some(s) => {
            if s.iter().any(|p| p.len() != vars.len()) {
                return Err(format!("samples must have {} coordinates", vars.len()));
            }
            s.clone()
        }
        None => default_samples(&xs),
    };
    let r = exponential_condition_witness_check(&fs, &xs, &xt, &z, &samples, tol, &FlowConfig::default())
        .map_err(err)?;
    let data = json!({
        "pass": r.pass,
        "max_deviation": float(r.max_deviation),
        "samples": samples.iter().map(|s| floats(s)).collect::<Vec<_>>(),
        "deviations": floats(&r.deviations),
    });
    let lines = vec![format!(
        "{} ({} samples, max deviation {:.3e})",
        if r.pass { "pass" } else { "fail" },
        samples.len(),
        r.max_deviation
    )];
    Ok((data, lines))
}

/// Axis-aligned samples at spacing 0.1 up to distance 0.3 from the point.
fn default_samples(x: &[Rational]) -> Vec<Vec<f64>> {
    let base: Vec<f64> = x.iter().map(rat_to_f64).collect();
    let mut out = vec![base.clone()];
    for axis in 0..base.len() {
        for k in [-3, -2, -1, 1, 2, 3] {
            let mut p = base.clone();
            p[axis] += 0.1 * k as f64;
            out.push(p);
        }
    }
    out
}

pub fn document_input(doc: &Document, file: &str) -> Value {
    let f = doc.foliation();
    json!({
        "file": file,
        "document": doc.name,
        "vars": doc.vars,
        "generators": f
            .generator_names()
            .iter()
            .zip(f.generators())
            .map(|(n, g)| json!({ "name": n, "field": f.display_field(g) }))
            .collect::<Vec<_>>(),
        "source": dsl::print(doc),
    })
}

pub fn point_param(x: &[Rational]) -> Value {
    Value::String(point_text(x))
}
