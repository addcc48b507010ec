//! The shipped example documents, plus the vanishing-order family at an
//! arbitrary center.

use crate::dsl::{parse, Document};
use crate::exactalg::{Poly, PolyVector, Rational};
use crate::foliation::{Chart, Foliation};

pub const EXAMPLES: &[(&str, &str)] = &[
    ("closed_form", include_str!("../foliations/closed_form.fol")),
    ("euler", include_str!("../foliations/euler.fol")),
    ("euler_quadratic", include_str!("../foliations/euler_quadratic.fol")),
    ("flat_line", include_str!("../foliations/flat_line.fol")),
    ("horizontal", include_str!("../foliations/horizontal.fol")),
    ("rotation", include_str!("../foliations/rotation.fol")),
    ("torus_plane", include_str!("../foliations/torus_plane.fol")),
    ("torus_plane_slice", include_str!("../foliations/torus_plane_slice.fol")),
    ("vanishing_order_1", include_str!("../foliations/vanishing_order_1.fol")),
    ("vanishing_order_2", include_str!("../foliations/vanishing_order_2.fol")),
    ("vanishing_order_3", include_str!("../foliations/vanishing_order_3.fol")),
];

pub fn source(name: &str) -> Option<&'static str> {
    EXAMPLES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn document(name: &str) -> Option<Document> {
    source(name).map(|s| parse(s).unwrap_or_else(|e| panic!("shipped example {name}: {e}")))
}

pub fn foliation(name: &str) -> Option<Foliation> {
    document(name).map(|d| d.foliation())
}

/// Vector fields on the plane vanishing to order `k` at `center`:
/// generated by `(x - a)^i (y - b)^j d(x)` and `... d(y)` with `i + j = k`.
pub fn vanishing_order(k: u32, center: [Rational; 2]) -> Foliation {
    let [a, b] = center;
    let u = Poly::var(2, 0) - Poly::constant(2, a);
    let v = Poly::var(2, 1) - Poly::constant(2, b);
    let mut gens = Vec::new();
    let mut names = Vec::new();
    for i in (0..=k).rev() {
        let j = k - i;
        let m = u.pow(i) * v.pow(j);
        for (c, axis) in ["X", "Y"].iter().enumerate() {
            gens.push(PolyVector::unit(2, 2, c).mul_poly(&m).expect("planar"));
            names.push(format!("{axis}{i}{j}"));
        }
    }
    Foliation::with_names(Chart::new(["x", "y"]).expect("chart"), gens, names).expect("generators")
}
