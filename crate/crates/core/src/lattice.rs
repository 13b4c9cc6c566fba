//! The lattice of two-qubit isotropy subgroups.
//!
//! ```text
//!            SU2
//!             |
//!           Kinf
//!          /    \
//!        U1      K2
//!          \    /
//!            Z4
//!            |
//!            Z2
//! ```
//!
//! [`leq`] and [`meet`] work on concrete subgroups. Joins of concrete
//! subgroups leave this family (two skew circles generate all of SU(2)), so
//! [`join_class`] works on classes only.

use crate::pauli::PauliForm;
use crate::projectors::fixed_point_residual;
use crate::su2::{parallel, perpendicular, SubgroupClass, SubgroupDescriptor, TOL_AXIS};

/// Lattice node; the class of a subgroup.
pub type LatticeClass = SubgroupClass;

/// Covering relations `(lower, upper)` of the class lattice.
pub const HASSE_EDGES: [(SubgroupClass, SubgroupClass); 6] = [
    (SubgroupClass::Z2, SubgroupClass::Z4),
    (SubgroupClass::Z4, SubgroupClass::U1),
    (SubgroupClass::Z4, SubgroupClass::K2),
    (SubgroupClass::U1, SubgroupClass::Kinf),
    (SubgroupClass::K2, SubgroupClass::Kinf),
    (SubgroupClass::Kinf, SubgroupClass::SU2),
];

/// Height in the Hasse diagram.
pub fn rank(c: SubgroupClass) -> usize {
    match c {
        SubgroupClass::Z2 => 0,
        SubgroupClass::Z4 => 1,
        SubgroupClass::U1 | SubgroupClass::K2 => 2,
        SubgroupClass::Kinf => 3,
        SubgroupClass::SU2 => 4,
    }
}

/// Reflexive-transitive closure of [`HASSE_EDGES`].
pub fn class_leq(lo: SubgroupClass, hi: SubgroupClass) -> bool {
    lo == hi || HASSE_EDGES.iter().any(|&(a, b)| a == lo && class_leq(b, hi))
}

/// Least upper bound of two classes.
pub fn join_class(c1: SubgroupClass, c2: SubgroupClass) -> SubgroupClass {
    SubgroupClass::ALL
        .into_iter()
        .filter(|&c| class_leq(c1, c) && class_leq(c2, c))
        .min_by_key(|&c| rank(c))
        .expect("SU2 bounds everything")
}

/// Greatest lower bound of two classes.
pub fn meet_class(c1: SubgroupClass, c2: SubgroupClass) -> SubgroupClass {
    SubgroupClass::ALL
        .into_iter()
        .filter(|&c| class_leq(c, c1) && class_leq(c, c2))
        .max_by_key(|&c| rank(c))
        .expect("Z2 bounds everything")
}

/// Subgroup inclusion `h1 ⊆ h2`: every generator of `h1` lies in `h2`.
pub fn leq(h1: &SubgroupDescriptor, h2: &SubgroupDescriptor) -> bool {
    class_leq(h1.class(), h2.class()) && h1.generators().iter().all(|g| h2.contains(g, TOL_AXIS))
}

fn frame_axes(h: &SubgroupDescriptor) -> Vec<nalgebra::Vector3<f64>> {
    h.frame().map(|f| (0..3).map(|i| f.column(i).into_owned()).collect()).unwrap_or_default()
}

/// Intersection `h1 ∩ h2`.
pub fn meet(h1: &SubgroupDescriptor, h2: &SubgroupDescriptor) -> SubgroupDescriptor {
    use SubgroupDescriptor as D;
    if leq(h1, h2) {
        return *h1;
    }
    if leq(h2, h1) {
        return *h2;
    }
    // order the pair so the match below is triangular
    let (x, y) = if h1.class() <= h2.class() { (h1, h2) } else { (h2, h1) };
    let tol = TOL_AXIS;
    match (*x, *y) {
        (D::U1 { axis: k }, D::K2 { .. }) => {
            if frame_axes(y).iter().any(|r| parallel(&k, r, tol)) {
                D::z4(k)
            } else {
                D::Z2
            }
        }
        (D::U1 { axis: k }, D::Kinf { axis: k2, .. }) => {
            if perpendicular(&k, &k2, tol) {
                D::z4(k)
            } else {
                D::Z2
            }
        }
        (D::K2 { .. }, D::K2 { .. }) => {
            let ys = frame_axes(y);
            let shared: Vec<_> = frame_axes(x).into_iter().filter(|r| ys.iter().any(|s| parallel(r, s, tol))).collect();
            match shared.len() {
                1 => D::z4(shared[0]),
                _ => D::Z2,
            }
        }
        (D::K2 { .. }, D::Kinf { axis: k, .. }) => {
            let perp: Vec<_> = frame_axes(x).into_iter().filter(|r| perpendicular(r, &k, tol)).collect();
            if perp.len() == 1 {
                D::z4(perp[0])
            } else {
                D::Z2
            }
        }
        (D::Kinf { axis: k, .. }, D::Kinf { axis: k2, .. }) => {
            let n = k.cross(&k2).normalize();
            if perpendicular(&k, &k2, tol) {
                D::k2(nalgebra::Matrix3::from_columns(&[k, k2, n]))
            } else {
                D::z4(n)
            }
        }
        _ => D::Z2,
    }
}

/// `pf ∈ Ĉ(H)`: the state is invariant under all of `H`.
pub fn in_hat_c(pf: &PauliForm, h: &SubgroupDescriptor, tol: f64) -> bool {
    fixed_point_residual(h, pf) <= tol
}

/// The Hasse diagram in Graphviz DOT.
pub fn hasse_dot() -> String {
    let mut s = String::from("digraph isotropy {\n    rankdir=BT;\n    node [shape=box];\n");
    for (lo, hi) in HASSE_EDGES {
        s.push_str(&format!("    {lo} -> {hi};\n"));
    }
    s.push_str("}\n");
    s
}
