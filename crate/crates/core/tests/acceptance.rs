//! Acceptance criteria 1-12. Runs as a plain binary so every criterion
//! prints one PASS/FAIL line regardless of output capture.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::{max_abs_diff, q, qq, random_field, truncated_jet_member};
use folhol_core::catalog::{self, vanishing_order};
use folhol_core::exactalg::{module_groebner, MonomialOrder, Poly, PolyVector, Rational};
use folhol_core::flows::{exp_flow, variational_flow, FlowConfig, TimeDependentField};
use folhol_core::foliation::{adapted_frame, involutivity_check, lie_bracket, CoordinateSubspace, Involutivity};
use folhol_core::holonomy::{
    bisubmersion_target, delta_map, discreteness_linear_probe, exponential_condition_witness_check,
    kernel_linear_probe, linear_holonomy, morphism_check, Injectivity, KernelProbe, LocalGroupElement,
    PathHolonomyBiSubmersion,
};
use folhol_core::pointwise::{
    algebroid_local_data, classify_point, fiber_report, isotropy_algebra, lie_algebra_analysis,
    LieAlgebraPresentation, PointClass,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn origin(d: usize) -> Vec<Rational> {
    vec![q(0); d]
}

fn rotation_matrix(a: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[a.cos(), -a.sin(), a.sin(), a.cos()])
}

fn c1_fiber_table() -> Check {
    let mut dims = Vec::new();
    for k in 1..=3u32 {
        let start = Instant::now();
        let r = e2s(fiber_report(&vanishing_order(k, [q(0), q(0)]), &origin(2)))?;
        let expected = (2 * k + 2) as usize;
        ensure(r.dim_fiber == expected && r.dim_isotropy == expected, || {
            format!("k={k}: fiber {} isotropy {}, expected {expected}", r.dim_fiber, r.dim_isotropy)
        })?;
        ensure(start.elapsed() < Duration::from_secs(5), || format!("k={k} took {:?}", start.elapsed()))?;
        dims.push(r.dim_fiber);
    }
    Ok(format!("dims {dims:?}"))
}

fn c2_rotation() -> Check {
    let f = catalog::foliation("rotation").unwrap();
    let pts = [
        [q(0), q(0)],
        [q(1), q(0)],
        [q(0), q(1)],
        [qq(1, 2), q(-3)],
        [q(-2), qq(5, 7)],
        [q(3), q(3)],
    ];
    for p in &pts {
        let r = e2s(fiber_report(&f, p))?;
        let at_origin = p.iter().all(|c| *c == q(0));
        ensure(r.dim_fiber == 1, || format!("fiber {} at {p:?}", r.dim_fiber))?;
        ensure(r.dim_isotropy == usize::from(at_origin), || format!("isotropy {} at {p:?}", r.dim_isotropy))?;
        let class = e2s(classify_point(&f, p))?;
        let expected = if at_origin { PointClass::Singular } else { PointClass::Regular };
        ensure(class == expected, || format!("{class:?} at {p:?}"))?;
    }
    Ok("6 points; singular only at the origin".into())
}

fn c3_euler() -> Check {
    let f = catalog::foliation("euler").unwrap();
    for p in [q(-2), qq(-1, 3), q(0), qq(1, 2), q(4)] {
        let r = e2s(fiber_report(&f, &[p.clone()]))?;
        ensure(r.dim_fiber == 1, || format!("fiber {} at {p}", r.dim_fiber))?;
        let class = e2s(classify_point(&f, &[p.clone()]))?;
        if p == q(0) {
            let g = e2s(isotropy_algebra(&f, &[p.clone()]))?;
            ensure(g.dim == 1, || format!("isotropy algebra of dimension {}", g.dim))?;
            ensure(class == PointClass::Singular, || "origin not singular".into())?;
        } else {
            ensure(class == PointClass::Regular, || format!("{class:?} at {p}"))?;
        }
    }
    Ok("fiber 1 at 5 points; g_0 = R".into())
}

fn c4_abelian() -> Check {
    let f = catalog::foliation("flat_line").unwrap();
    let g = e2s(isotropy_algebra(&f, &[q(0)]))?;
    ensure(g.is_abelian(), || format!("{:?}", g.structure_constants))?;
    Ok(format!("dim {} with all structure constants 0", g.dim))
}

fn c5_torus_plane() -> Check {
    let f = catalog::foliation("torus_plane").unwrap();
    let g = f.generators();
    let (w1, w2) = (&g[2], &g[3]);
    let t1 = Poly::var(4, 2);
    let t2 = Poly::var(4, 3);
    let w2_w1 = e2s(w2.checked_sub(w1))?;
    let displayed = [
        ((0, 1), w2_w1.clone()),
        ((0, 2), e2s(w1.mul_poly(&t2))?),
        ((0, 3), e2s(w2_w1.mul_poly(&t2))?),
        ((2, 3), e2s(w2_w1.mul_poly(&(&t1 * &t2)))?),
    ];
    let witnesses = match e2s(involutivity_check(&f))? {
        Involutivity::Involutive { witnesses } => witnesses,
        other => return Err(format!("not involutive: {other:?}")),
    };
    for (pair, expected) in &displayed {
        let w = witnesses
            .iter()
            .find(|w| w.pair == *pair)
            .ok_or_else(|| format!("no witness for {pair:?}"))?;
        ensure(&w.bracket == expected, || format!("bracket {pair:?} = {}", w.bracket))?;
        let recombined = e2s(w
            .cofactors
            .iter()
            .zip(g)
            .try_fold(PolyVector::zero(4, 4), |acc, (c, x)| acc.checked_add(&x.mul_poly(c)?)))?;
        ensure(&recombined == expected, || format!("cofactors for {pair:?} do not reproduce the bracket"))?;
    }

    let leaf = CoordinateSubspace::from_names(f.chart(), &[("t1".into(), q(0)), ("t2".into(), q(0))]).unwrap();
    let frame = e2s(adapted_frame(&f, &origin(4)))?;
    ensure(frame.fields() == g.to_vec(), || "frame is not (v1, v2, w1, w2)".into())?;
    let data = e2s(algebroid_local_data(&f, &leaf, &frame))?;
    let one = Poly::one(2);
    let zero = Poly::zero(2);
    let expected_anchor = vec![
        vec![one.clone(), zero.clone()],
        vec![zero.clone(), one.clone()],
        vec![zero.clone(), zero.clone()],
        vec![zero.clone(), zero.clone()],
    ];
    ensure(data.anchor == expected_anchor, || format!("anchor {:?}", data.anchor))?;
    ensure(data.nonzero_brackets() == vec![(0, 1)], || format!("nonzero brackets {:?}", data.nonzero_brackets()))?;
    let b01 = &data.brackets[0][1];
    let expected = vec![zero.clone(), zero.clone(), -&one, one.clone()];
    ensure(b01 == &expected, || format!("[v1, v2] = {b01:?}"))?;

    // the fiber of A_L is a 4-dimensional Lie algebra with constant brackets
    let constants: Vec<Vec<Vec<Rational>>> = data
        .brackets
        .iter()
        .map(|row| row.iter().map(|c| c.iter().map(Poly::constant_term).collect()).collect())
        .collect();
    let k = e2s(LieAlgebraPresentation::from_structure_constants(constants))?;
    let a = lie_algebra_analysis(&k);
    ensure(a.lower_central_series == vec![4, 1, 0] && a.center_dim == 2, || format!("{a:?}"))?;
    Ok(format!(
        "{} bracket witnesses, anchor v_i -> d(th_i), [v1, v2] = w2 - w1, LCS {:?}, center {}",
        witnesses.len(),
        a.lower_central_series,
        a.center_dim
    ))
}

fn c6_closed_form() -> Check {
    let f = catalog::foliation("closed_form").unwrap();
    let doc = catalog::document("closed_form").unwrap();
    let leaf = doc.leaf("L").unwrap();
    let frame = e2s(adapted_frame(&f, &origin(3)))?;
    let data = e2s(algebroid_local_data(&f, &leaf, &frame))?;
    let c = [q(2), q(-3)];
    for i in 0..2 {
        let expected = vec![Poly::zero(2), Poly::zero(2), Poly::constant(2, c[i].clone())];
        ensure(data.brackets[i][2] == expected, || {
            format!("[a{}, w] = {:?}", i + 1, data.brackets[i][2])
        })?;
    }
    ensure(data.brackets[0][1].iter().all(|p| p.is_zero()), || "[a1, a2] != 0".into())?;
    Ok("[a1, w] = 2 w, [a2, w] = -3 w".into())
}

fn c7_targets() -> Check {
    let rot = catalog::foliation("rotation").unwrap();
    let u = e2s(PathHolonomyBiSubmersion::new(&rot, &[q(1), q(0)], None))?;
    let mut worst = 0.0f64;
    for i in 0..5 {
        for j in 0..5 {
            let y = [0.5 + 0.25 * i as f64, -0.5 + 0.25 * j as f64];
            let eps = -0.6 + 0.3 * ((i + j) % 5) as f64;
            let t = e2s(bisubmersion_target(&u, &y, &[eps]))?;
            let r = rotation_matrix(eps) * nalgebra::DVector::from_row_slice(&y);
            worst = worst.max(max_abs_diff(&t, r.as_slice()));
        }
    }
    ensure(worst < 1e-8, || format!("rotation target error {worst:e}"))?;
    let euler = catalog::foliation("euler").unwrap();
    let u = e2s(PathHolonomyBiSubmersion::new(&euler, &[q(1)], None))?;
    let mut worst_e = 0.0f64;
    for i in 0..5 {
        for j in 0..5 {
            let x = 0.5 + 0.25 * i as f64;
            let eps = -0.5 + 0.25 * j as f64;
            let t = e2s(bisubmersion_target(&u, &[x], &[eps]))?;
            worst_e = worst_e.max((t[0] - x * eps.exp()).abs());
        }
    }
    ensure(worst_e < 1e-8, || format!("x e^eps target error {worst_e:e}"))?;
    Ok(format!("max errors {worst:.1e} (rotation), {worst_e:.1e} (x d(x))"))
}

fn c8_delta_covering() -> Check {
    let rot = catalog::foliation("rotation").unwrap();
    let u = e2s(PathHolonomyBiSubmersion::new(&rot, &origin(2), None))?.with_validity_radius(2.0);
    for k in [0.3, 1.0, 2.0] {
        let xi = e2s(delta_map(&u, &LocalGroupElement::new(vec![k])))?;
        ensure((xi[0] - k).abs() < 1e-8, || format!("Delta({k}) = {xi:?}"))?;
        let lh = e2s(linear_holonomy(&u, &xi))?;
        let err = (&lh.full_jacobian - rotation_matrix(k)).abs().max();
        ensure(err < 1e-7, || format!("linear holonomy at {k} off by {err:e}"))?;
    }
    let (p, _) = e2s(kernel_linear_probe(&u, &[2.0 * PI], 1e-6))?;
    ensure(p == KernelProbe::Inconclusive, || format!("2 pi: {p:?}"))?;
    let (p, _) = e2s(kernel_linear_probe(&u, &[1.0], 1e-6))?;
    ensure(p == KernelProbe::NotInKernel, || format!("1: {p:?}"))?;
    Ok("Delta(k) = (0, k); 2 pi Inconclusive, 1 NotInKernel".into())
}

fn c9_morphism() -> Check {
    let cases: [(&str, Vec<Rational>); 3] = [
        ("rotation", origin(2)),
        ("euler_quadratic", origin(1)),
        ("torus_plane_slice", origin(2)),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for (name, x) in cases {
        let f = catalog::foliation(name).unwrap();
        let u = e2s(PathHolonomyBiSubmersion::new(&f, &x, None))?;
        let lp = e2s(u.isotropy_algebra())?;
        for _ in 0..5 {
            // halves keep bch(v1, v2) inside the unit validity box
            let v1: Vec<f64> = (0..lp.dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let v2: Vec<f64> = (0..lp.dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let r = e2s(morphism_check(&u, &lp, &v1, &v2, 1e-6))?;
            ensure(r.pass, || format!("{name}: {r:?}"))?;
            worst = worst.max(r.deviation).max(r.base_point_deviation);
        }
    }
    Ok(format!("15 pairs, max deviation {worst:.1e}"))
}

fn c10_discreteness() -> Check {
    let rot = catalog::foliation("rotation").unwrap();
    let p = e2s(discreteness_linear_probe(&rot, &origin(2), &CoordinateSubspace::full()))?;
    let r = match p.outcome {
        Injectivity::Box { radius } => radius,
        other => return Err(format!("rotation: {other:?}")),
    };
    ensure((r - PI).abs() < 0.01 * PI, || format!("radius {r}"))?;
    let euler = catalog::foliation("euler").unwrap();
    let p = e2s(discreteness_linear_probe(&euler, &origin(1), &CoordinateSubspace::full()))?;
    ensure(matches!(p.outcome, Injectivity::Unbounded { .. }), || format!("x d(x): {:?}", p.outcome))?;
    Ok(format!("rotation box radius {r:.6}; x d(x) unbounded"))
}

fn c11_properties() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    // (a) antisymmetry and Jacobi
    for _ in 0..100 {
        let [x, y, z] = [0, 1, 2].map(|_| random_field(&mut rng, 2, 2));
        let xy = e2s(lie_bracket(&x, &y))?;
        let yx = e2s(lie_bracket(&y, &x))?;
        ensure(e2s(xy.checked_add(&yx))?.is_zero(), || "antisymmetry".into())?;
        let j = e2s(e2s(lie_bracket(&x, &e2s(lie_bracket(&y, &z))?))?
            .checked_add(&e2s(lie_bracket(&y, &e2s(lie_bracket(&z, &x))?))?))?;
        let j = e2s(j.checked_add(&e2s(lie_bracket(&z, &xy))?))?;
        ensure(j.is_zero(), || "Jacobi".into())?;
    }
    // (b) fiber = tangent + isotropy on every example and point
    let pts = [q(0), q(1), qq(-1, 2), q(2)];
    let mut pairs = 0;
    for (name, _) in catalog::EXAMPLES {
        let f = catalog::foliation(name).unwrap();
        for a in &pts {
            for b in &pts {
                let x: Vec<Rational> = (0..f.dim()).map(|i| if i % 2 == 0 { a.clone() } else { b.clone() }).collect();
                let r = e2s(fiber_report(&f, &x))?;
                ensure(r.dim_fiber == r.dim_tangent + r.dim_isotropy, || format!("{name} at {x:?}"))?;
                pairs += 1;
            }
        }
    }
    // (c) Gröbner membership against the truncated-jet oracle
    for i in 0..50 {
        let gens: Vec<PolyVector> = (0..2).map(|_| random_field(&mut rng, 2, 2)).collect();
        let member = i % 2 == 0;
        let v = if member {
            let c0 = common::random_poly(&mut rng, 2, 1, 2);
            let c1 = common::random_poly(&mut rng, 2, 1, 2);
            e2s(e2s(gens[0].mul_poly(&c0))?.checked_add(&e2s(gens[1].mul_poly(&c1))?))?
        } else {
            random_field(&mut rng, 2, 2)
        };
        let gb = e2s(module_groebner(&gens, MonomialOrder::GrevLex))?;
        let bound = gens.iter().chain([&v]).filter_map(PolyVector::degree).max().unwrap_or(0) + 4;
        let by_gb = e2s(gb.contains(&v))?;
        let by_oracle = truncated_jet_member(&gens, &v, bound);
        ensure(by_gb == by_oracle, || format!("instance {i}: gb {by_gb}, oracle {by_oracle}"))?;
    }
    // (d) variational Jacobians against central differences
    let cfg = FlowConfig::default();
    let fields: Vec<PolyVector> = ["rotation", "euler_quadratic", "torus_plane_slice", "closed_form"]
        .iter()
        .map(|n| catalog::foliation(n).unwrap().generators()[0].clone())
        .chain([PolyVector::new(vec![
            Poly::var(2, 1) * Poly::var(2, 1) - Poly::constant(2, qq(1, 2)),
            Poly::var(2, 0) * Poly::var(2, 1),
        ])
        .unwrap()])
        .collect();
    let mut worst_fd = 0.0f64;
    for x in &fields {
        let d = x.dim();
        let x0: Vec<f64> = (0..d).map(|i| 0.3 + 0.1 * i as f64).collect();
        let (_, j) = e2s(variational_flow(x, &x0, 0.7, &cfg))?;
        let h = 1e-5;
        for c in 0..d {
            let mut p = x0.clone();
            let mut m = x0.clone();
            p[c] += h;
            m[c] -= h;
            let fp = e2s(exp_flow(x, &p, 0.7, &cfg))?;
            let fm = e2s(exp_flow(x, &m, 0.7, &cfg))?;
            for r in 0..d {
                let fd = (fp[r] - fm[r]) / (2.0 * h);
                let rel = (fd - j[(r, c)]).abs() / j[(r, c)].abs().max(1.0);
                worst_fd = worst_fd.max(rel);
            }
        }
    }
    ensure(worst_fd < 1e-5, || format!("finite-difference mismatch {worst_fd:e}"))?;
    // (e) reversibility and additivity
    let mut worst_flow = 0.0f64;
    for x in &fields {
        let d = x.dim();
        let x0: Vec<f64> = (0..d).map(|i| -0.2 + 0.15 * i as f64).collect();
        let fwd = e2s(exp_flow(x, &x0, 0.8, &cfg))?;
        let back = e2s(exp_flow(x, &fwd, -0.8, &cfg))?;
        worst_flow = worst_flow.max(max_abs_diff(&back, &x0));
        let s = e2s(exp_flow(x, &x0, 0.3, &cfg))?;
        let st = e2s(exp_flow(x, &s, 0.5, &cfg))?;
        worst_flow = worst_flow.max(max_abs_diff(&st, &fwd));
    }
    ensure(worst_flow < 1e-8, || format!("flow reversibility/additivity {worst_flow:e}"))?;
    Ok(format!(
        "100 triples, {pairs} fiber pairs, 50 oracle instances, FD rel err {worst_fd:.1e}, flow err {worst_flow:.1e}"
    ))
}

fn c12_witness() -> Check {
    // On the transversal R of <x d(x)> at 0, I_0 F = <x^2 d(x)>.
    let fs = catalog::foliation("euler").unwrap();
    let x2 = PolyVector::new(vec![Poly::var(1, 0).pow(2)]).unwrap();
    let samples: Vec<Vec<f64>> = (-3..=3).map(|i| vec![0.1 * i as f64]).collect();
    let cfg = FlowConfig::default();
    let tol = 1e-8;
    let autonomous = TimeDependentField::autonomous(x2.clone());
    let r = e2s(exponential_condition_witness_check(&fs, &[q(0)], &autonomous, &x2, &samples, tol, &cfg))?;
    ensure(r.pass, || format!("autonomous: {r:?}"))?;
    let t = Poly::var(1, 0);
    let commuting = e2s(TimeDependentField::new(vec![(t.pow(2).scale(&q(3)), x2.clone())]))?;
    let r = e2s(exponential_condition_witness_check(&fs, &[q(0)], &commuting, &x2, &samples, tol, &cfg))?;
    ensure(r.pass, || format!("commuting family: {r:?}"))?;
    let wrong = x2.scale(&q(2));
    let r = e2s(exponential_condition_witness_check(&fs, &[q(0)], &commuting, &wrong, &samples, tol, &cfg))?;
    ensure(!r.pass, || "mismatched Z passed".into())?;
    let at_01 = r.deviations[4];
    ensure(at_01 > tol, || format!("no deviation at x = 0.1 ({at_01:e})"))?;
    Ok(format!("pass, pass, fail (deviation {:.1e})", r.max_deviation))
}

fn main() {
    let criteria: [(u32, &str, u64, fn() -> Check); 12] = [
        (1, "fiber-dimension table of the vanishing-order family", 15, c1_fiber_table),
        (2, "rotation foliation fibers and classification", 2, c2_rotation),
        (3, "Euler field fibers and isotropy", 1, c3_euler),
        (4, "abelian isotropy of flat generators", 2, c4_abelian),
        (5, "torus-times-plane brackets, algebroid and isotropy algebra", 10, c5_torus_plane),
        (6, "closed 1-form algebroid brackets", 2, c6_closed_form),
        (7, "bi-submersion targets", 5, c7_targets),
        (8, "Delta map and covering behaviour", 10, c8_delta_covering),
        (9, "linearized morphism property", 30, c9_morphism),
        (10, "discreteness linear probe", 5, c10_discreteness),
        (11, "property suites", 60, c11_properties),
        (12, "exponential-condition witness check", 5, c12_witness),
    ];
    let mut failed = 0;
    for (n, title, limit, f) in criteria {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= Duration::from_secs(limit) => (true, d),
            Ok(d) => (false, format!("{d}; exceeded the {limit} s budget")),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {n:>2} {} {title} [{:.2} s]: {detail}",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of 12 criteria pass", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
