mod common;

use common::{max_abs_diff, q, qq};
use folhol_core::catalog::{self, vanishing_order};
use folhol_core::exactalg::{rat_to_f64, Rational};
use folhol_core::foliation::CoordinateSubspace;
use folhol_core::holonomy::{
    bisubmersion_target, carried_diffeo, delta_map, discreteness_linear_probe, kernel_linear_probe, linear_holonomy,
    morphism_check, Bisection, Injectivity, KernelProbe, LocalGroupElement, PathHolonomyBiSubmersion,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn points(d: usize, r: &mut ChaCha8Rng) -> Vec<Vec<Rational>> {
    let mut out = vec![vec![q(0); d]];
    for _ in 0..3 {
        out.push((0..d).map(|_| qq(r.gen_range(-6..=6), r.gen_range(1..=4))).collect());
    }
    out
}

#[test]
fn zero_fiber_coordinates_act_trivially() {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    for (name, _) in catalog::EXAMPLES {
        let f = catalog::foliation(name).unwrap();
        for x in points(f.dim(), &mut r) {
            let u = PathHolonomyBiSubmersion::new(&f, &x, None).unwrap();
            let zero = vec![0.0; u.fiber_dim()];
            let y: Vec<f64> = x.iter().map(|c| rat_to_f64(c) + 0.05).collect();
            let t = bisubmersion_target(&u, &y, &zero).unwrap();
            assert!(max_abs_diff(&t, &y) < 1e-12, "{name}");
            let samples = vec![y.clone(), x.iter().map(rat_to_f64).collect()];
            let carried = carried_diffeo(&u, Bisection::constant(f.dim(), &vec![q(0); u.fiber_dim()])).unwrap();
            for (s, c) in samples.iter().zip(carried.eval_grid(&samples).unwrap()) {
                assert!(max_abs_diff(s, &c) < 1e-9, "{name}");
            }
            let lh = linear_holonomy(&u, &zero).unwrap();
            let id = DMatrix::<f64>::identity(f.dim(), f.dim());
            assert!((&lh.full_jacobian - id).abs().max() < 1e-9, "{name}");
            let (probe, _) = kernel_linear_probe(&u, &zero, 1e-6).unwrap();
            assert_eq!(probe, KernelProbe::Inconclusive, "{name}");
        }
    }
}

#[test]
fn linear_holonomy_preserves_the_tangent_space() {
    let f = catalog::foliation("torus_plane").unwrap();
    let mut r = ChaCha8Rng::seed_from_u64(5);
    for x in [vec![q(0); 4], vec![qq(1, 2), q(1), q(0), q(0)], vec![q(0), q(0), qq(1, 3), qq(-1, 2)]] {
        let u = PathHolonomyBiSubmersion::new(&f, &x, None).unwrap();
        let xi: Vec<f64> = (0..u.fiber_dim()).map(|_| r.gen_range(-0.3..0.3)).collect();
        // stay on U_x^x: only coordinates along the isotropy witnesses move
        let mut on_fiber = vec![0.0; u.fiber_dim()];
        let k = u.fiber_dim() - u.isotropy_witnesses().len();
        on_fiber[k..].copy_from_slice(&xi[k..]);
        let lh = linear_holonomy(&u, &on_fiber).unwrap();
        assert!(lh.leaf_invariance_defect < 1e-6, "{x:?}: {}", lh.leaf_invariance_defect);
    }
}

#[test]
fn delta_lands_in_the_target_fiber_over_the_point() {
    let mut r = ChaCha8Rng::seed_from_u64(8);
    let cases: [(&str, usize); 4] = [("rotation", 2), ("euler_quadratic", 1), ("torus_plane_slice", 2), ("flat_line", 1)];
    for (name, d) in cases {
        let f = catalog::foliation(name).unwrap();
        let u = PathHolonomyBiSubmersion::new(&f, &vec![q(0); d], None).unwrap();
        let l = u.isotropy_witnesses().len();
        for _ in 0..4 {
            let lambda: Vec<f64> = (0..l).map(|_| r.gen_range(-0.8..0.8)).collect();
            let xi = delta_map(&u, &LocalGroupElement::new(lambda)).unwrap();
            let t = bisubmersion_target(&u, &vec![0.0; d], &xi).unwrap();
            assert!(max_abs_diff(&t, &vec![0.0; d]) < 1e-8, "{name}");
        }
    }
}

#[test]
fn morphism_property_on_a_non_abelian_isotropy() {
    // isotropy of the linear-vanishing family at the origin is gl(2)
    let f = vanishing_order(1, [q(0), q(0)]);
    let u = PathHolonomyBiSubmersion::new(&f, &[q(0), q(0)], None).unwrap();
    let lp = u.isotropy_algebra().unwrap();
    assert!(!lp.is_abelian());
    let mut r = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..3 {
        let v1: Vec<f64> = (0..lp.dim).map(|_| r.gen_range(-0.3..0.3)).collect();
        let v2: Vec<f64> = (0..lp.dim).map(|_| r.gen_range(-0.3..0.3)).collect();
        let m = morphism_check(&u, &lp, &v1, &v2, 1e-6).unwrap();
        assert!(m.pass, "{m:?}");
        // the linearization reverses products, so the other order is off
        let n = |v: &[f64]| {
            let xi = delta_map(&u, &LocalGroupElement::new(v.to_vec())).unwrap();
            linear_holonomy(&u, &xi).unwrap().normal_matrix
        };
        let swapped = n(&v1) * n(&v2);
        assert!((swapped - &m.composite_side).abs().max() > 1e-4);
    }
}

#[test]
fn scaling_field_is_not_in_the_kernel() {
    let f = catalog::foliation("euler").unwrap();
    let u = PathHolonomyBiSubmersion::new(&f, &[q(0)], None).unwrap();
    let (probe, lh) = kernel_linear_probe(&u, &[0.7], 1e-6).unwrap();
    assert_eq!(probe, KernelProbe::NotInKernel);
    assert!((lh.normal_matrix[(0, 0)] - 0.7f64.exp()).abs() < 1e-8);
}

#[test]
fn higher_vanishing_orders_have_degenerate_linear_span() {
    let f = vanishing_order(2, [q(0), q(0)]);
    let p = discreteness_linear_probe(&f, &[q(0), q(0)], &CoordinateSubspace::full()).unwrap();
    assert_eq!(p.outcome, Injectivity::Unbounded { degenerate_span: true });
}
