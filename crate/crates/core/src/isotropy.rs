//! Isotropy classification: `Iso(ρ) = {g : U_g(ρ) = ρ}`.
//!
//! The continuous part comes from the kernel of the infinitesimal action
//! `ω ↦ (ω×a, ω×b, [Ω, T])`. The discrete part is the set of π-rotation axes
//! `u`, which must satisfy `S u = λ u`, `A u = 0` (`S`, `A` the symmetric and
//! antisymmetric parts of `T`) and `a, b ∈ span(u)`. Every two-qubit isotropy
//! is one of `Z2 ⊂ Z4 ⊂ {U1, K2} ⊂ Kinf ⊂ SU2`, so these two pieces decide it.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix3, SMatrix, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::{icosphere_hemisphere, minimize_on_frames, minimize_on_sphere};
use crate::pauli::{canonical_form, pauli_trace_distance, PauliForm};
use crate::projectors::{fixed_point_residual, project};
use crate::su2::{act, sign_normalize, GroupElement, SubgroupClass, SubgroupDescriptor};

/// Relative and absolute thresholds for rank and equality decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rel: 1e-8, abs: 1e-10 }
    }
}

impl Tolerance {
    pub fn new(rel: f64) -> Self {
        Self { rel, abs: Self::default().abs.min(rel) }
    }

    /// `true` for "is zero". Values in `[tol/10, 10 tol]` are ambiguous.
    fn decide(&self, check: &str, value: f64, tol: f64) -> Result<bool> {
        if value >= tol / 10.0 && value <= tol * 10.0 {
            return Err(Error::AmbiguousAtTolerance { check: check.to_string(), value, tol });
        }
        Ok(value < tol)
    }
}

/// The orbit `G/Iso(ρ)` up to diffeomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrbitShape {
    Point,
    Sphere2,
    SO3modDinf,
    SO3modD2,
    SO3modC2,
    SO3,
}

impl OrbitShape {
    pub fn of(class: SubgroupClass) -> OrbitShape {
        match class {
            SubgroupClass::SU2 => OrbitShape::Point,
            SubgroupClass::Kinf => OrbitShape::SO3modDinf,
            SubgroupClass::K2 => OrbitShape::SO3modD2,
            SubgroupClass::U1 => OrbitShape::Sphere2,
            SubgroupClass::Z4 => OrbitShape::SO3modC2,
            SubgroupClass::Z2 => OrbitShape::SO3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OrbitShape::Point => "Point",
            OrbitShape::Sphere2 => "Sphere2",
            OrbitShape::SO3modDinf => "SO3modDinf",
            OrbitShape::SO3modD2 => "SO3modD2",
            OrbitShape::SO3modC2 => "SO3modC2",
            OrbitShape::SO3 => "SO3",
        }
    }
}

/// Classification verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotropyReport {
    pub descriptor: SubgroupDescriptor,
    pub shape: OrbitShape,
    pub continuous_dim: usize,
    /// Isolated π-rotation axes (sign-normalised).
    pub pi_axes: Vec<Vector3<f64>>,
    /// Trace distance from the input to `P_H` of it for the reported `H`.
    pub distance: f64,
    /// Maximum violation of each accepted symmetry, plus search diagnostics.
    pub residuals: BTreeMap<String, f64>,
}

impl IsotropyReport {
    pub fn class(&self) -> SubgroupClass {
        self.descriptor.class()
    }

    fn new(descriptor: SubgroupDescriptor, pi_axes: Vec<Vector3<f64>>, distance: f64) -> Self {
        let class = descriptor.class();
        IsotropyReport {
            descriptor,
            shape: OrbitShape::of(class),
            continuous_dim: class.continuous_dim(),
            pi_axes,
            distance,
            residuals: BTreeMap::new(),
        }
    }
}

/// Kernel of the infinitesimal action.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousStabilizer {
    pub dim: usize,
    /// Kernel basis (one vector for `dim = 1`, the standard basis for `dim = 3`).
    pub axes: Vec<Vector3<f64>>,
    /// Singular values of the stacked map, descending.
    pub singular_values: [f64; 3],
}

fn skew(w: &Vector3<f64>) -> Matrix3<f64> {
    w.cross_matrix()
}

/// The 15×3 matrix of `ω ↦ (ω×a, ω×b, vec[Ω, T])`.
pub fn stabilizer_matrix(pf: &PauliForm) -> SMatrix<f64, 15, 3> {
    let mut m = SMatrix::<f64, 15, 3>::zeros();
    for k in 0..3 {
        let e = Vector3::ith(k, 1.0);
        let om = skew(&e);
        let ca = e.cross(&pf.a);
        let cb = e.cross(&pf.b);
        let ct = om * pf.t - pf.t * om;
        for i in 0..3 {
            m[(i, k)] = ca[i];
            m[(3 + i, k)] = cb[i];
        }
        for (idx, v) in ct.iter().enumerate() {
            m[(6 + idx, k)] = *v;
        }
    }
    m
}

/// Dimension and axes of the Lie algebra of `Iso(ρ)`.
///
/// Singular values are compared with `tol.rel · σ_max`; a map whose largest
/// singular value is below `tol.abs` has the full 3-dimensional kernel.
pub fn continuous_stabilizer(pf: &PauliForm, tol: &Tolerance) -> ContinuousStabilizer {
    stabilizer_decision(pf, tol, false).expect("lenient decisions never fail")
}

fn stabilizer_decision(pf: &PauliForm, tol: &Tolerance, strict: bool) -> Result<ContinuousStabilizer> {
    let m = stabilizer_matrix(pf);
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("v requested");
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let s = [svd.singular_values[idx[0]], svd.singular_values[idx[1]], svd.singular_values[idx[2]]];
    let decide = |check: &str, v: f64, t: f64| -> Result<bool> {
        if strict {
            tol.decide(check, v, t)
        } else {
            Ok(v < t)
        }
    };
    let all = || ContinuousStabilizer { dim: 3, axes: vec![Vector3::x(), Vector3::y(), Vector3::z()], singular_values: s };
    if decide("stabilizer_scale", s[0], tol.abs)? {
        return Ok(all());
    }
    let mut dim = 0;
    for (i, name) in [(1, "stabilizer_sv2"), (2, "stabilizer_sv3")] {
        if decide(name, s[i] / s[0], tol.rel)? {
            dim += 1;
        }
    }
    match dim {
        0 => Ok(ContinuousStabilizer { dim: 0, axes: vec![], singular_values: s }),
        1 => {
            let k = vt.row(idx[2]).transpose().normalize();
            Ok(ContinuousStabilizer { dim: 1, axes: vec![sign_normalize(&k)], singular_values: s })
        }
        _ => {
            if strict {
                Err(Error::AmbiguousAtTolerance { check: "stabilizer_dim2".into(), value: s[1] / s[0], tol: tol.rel })
            } else {
                Ok(all())
            }
        }
    }
}

/// π-rotation axes of a state.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PiAxes {
    /// Isolated axes, sign-normalised.
    pub isolated: Vec<Vector3<f64>>,
    /// Normals of planes all of whose directions are π-axes.
    pub planes: Vec<Vector3<f64>>,
    /// Every direction is a π-axis.
    pub all: bool,
}

/// All `u` (up to sign) with `R_u(π)` fixing `a`, `b` and `T`.
pub fn discrete_pi_axes(pf: &PauliForm, tol: &Tolerance) -> PiAxes {
    pi_axes_decision(pf, tol, false).expect("lenient decisions never fail")
}

fn pi_axes_decision(pf: &PauliForm, tol: &Tolerance, strict: bool) -> Result<PiAxes> {
    let decide = |check: &str, v: f64, t: f64| -> Result<bool> {
        if strict {
            tol.decide(check, v, t)
        } else {
            Ok(v < t)
        }
    };
    let scale = pf.scale();
    if scale < tol.abs {
        return Ok(PiAxes { all: true, ..Default::default() });
    }
    let sym = (pf.t + pf.t.transpose()) * 0.5;
    let anti = (pf.t - pf.t.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    // group eigenvalues closer than rel·scale
    let mut groups: Vec<Vec<usize>> = vec![vec![order[0]]];
    for w in 1..3 {
        let gap = (eig.eigenvalues[order[w]] - eig.eigenvalues[order[w - 1]]) / scale;
        if decide("eigenvalue_gap", gap, tol.rel)? {
            groups.last_mut().expect("nonempty").push(order[w]);
        } else {
            groups.push(vec![order[w]]);
        }
    }

    let bloch = |v: &Vector3<f64>| -> Matrix3<f64> {
        let n = v.norm();
        if n == 0.0 {
            Matrix3::zeros()
        } else {
            let h = v / n;
            (Matrix3::identity() - h * h.transpose()) * (n / scale)
        }
    };
    let (pa, pb) = (bloch(&pf.a), bloch(&pf.b));
    let an = anti / scale;

    let mut out = PiAxes::default();
    for g in groups {
        let m = g.len();
        let e = DMatrix::from_fn(3, m, |r, c| eig.eigenvectors[(r, g[c])]);
        let mut stack = DMatrix::zeros(9, m);
        for (blk, op) in [an, pa, pb].iter().enumerate() {
            let rows = DMatrix::from_fn(3, 3, |r, c| op[(r, c)]) * &e;
            stack.view_mut((3 * blk, 0), (3, m)).copy_from(&rows);
        }
        let svd = stack.svd(false, true);
        let vt = svd.v_t.expect("v requested");
        let mut null = Vec::new();
        for i in 0..m {
            if decide("pi_axis_constraint", svd.singular_values[i], tol.rel)? {
                null.push(i);
            }
        }
        let dirs: Vec<Vector3<f64>> = null
            .iter()
            .map(|&i| {
                let x = vt.row(i).transpose();
                (&e * x).fixed_rows::<3>(0).into_owned().normalize()
            })
            .collect();
        match dirs.len() {
            0 => {}
            1 => out.isolated.push(sign_normalize(&dirs[0])),
            2 => out.planes.push(sign_normalize(&dirs[0].cross(&dirs[1]).normalize())),
            _ => out.all = true,
        }
    }
    Ok(out)
}

fn generator_violation(h: &SubgroupDescriptor, pf: &PauliForm) -> f64 {
    h.generators().iter().map(|g| act(g, pf).max_abs_diff(pf)).fold(0.0, f64::max)
}

fn pi_residual(u: &Vector3<f64>, pf: &PauliForm) -> f64 {
    act(&GroupElement::pi_about(u), pf).max_abs_diff(pf)
}

/// Exact isotropy subgroup of `pf` (up to `tol`).
///
/// Fails with [`Error::AmbiguousAtTolerance`] when a decision quantity lands
/// within a factor of ten of its threshold.
pub fn classify(pf: &PauliForm, tol: &Tolerance) -> Result<IsotropyReport> {
    let stab = stabilizer_decision(pf, tol, true)?;
    let scale = pf.scale().max(tol.abs);
    let (descriptor, pi_axes) = match stab.dim {
        3 => (SubgroupDescriptor::SU2, vec![]),
        1 => {
            let k = stab.axes[0];
            let anti = (pf.t - pf.t.transpose()) * 0.5;
            let zero_a = tol.decide("bloch_a", pf.a.norm() / scale, tol.rel)?;
            let zero_b = tol.decide("bloch_b", pf.b.norm() / scale, tol.rel)?;
            let sym_t = tol.decide("antisymmetric_t", anti.norm() / scale, tol.rel)?;
            if zero_a && zero_b && sym_t {
                (SubgroupDescriptor::kinf(k), vec![k])
            } else {
                (SubgroupDescriptor::u1(k), vec![k])
            }
        }
        _ => {
            let axes = pi_axes_decision(pf, tol, true)?;
            if axes.all || !axes.planes.is_empty() {
                return Err(Error::AmbiguousAtTolerance {
                    check: "pi_axis_family_without_continuous_symmetry".into(),
                    value: stab.singular_values[2] / stab.singular_values[0],
                    tol: tol.rel,
                });
            }
            match axes.isolated.len() {
                0 => (SubgroupDescriptor::Z2, vec![]),
                1 => (SubgroupDescriptor::z4(axes.isolated[0]), axes.isolated.clone()),
                3 => {
                    let f = Matrix3::from_columns(&[axes.isolated[0], axes.isolated[1], axes.isolated[2]]);
                    (SubgroupDescriptor::k2(f), axes.isolated.clone())
                }
                n => {
                    return Err(Error::AmbiguousAtTolerance {
                        check: format!("pi_axis_count_{n}"),
                        value: n as f64,
                        tol: tol.rel,
                    })
                }
            }
        }
    };

    let distance = fixed_point_residual(&descriptor, pf);
    let mut report = IsotropyReport::new(descriptor, pi_axes, distance);
    let r = &mut report.residuals;
    r.insert("fixed_point".into(), distance);
    r.insert("generators".into(), generator_violation(&descriptor, pf));
    r.insert(
        "continuous".into(),
        match stab.dim {
            3 => stab.singular_values[0],
            1 => stab.singular_values[2],
            _ => 0.0,
        },
    );
    if let SubgroupDescriptor::Kinf { pi_axis, .. } = descriptor {
        r.insert("pi_axis_witness".into(), pi_residual(&pi_axis, pf));
    }
    let worst_pi = report.pi_axes.iter().map(|u| pi_residual(u, pf)).fold(0.0, f64::max);
    report.residuals.insert("pi_axes".into(), worst_pi);
    Ok(report)
}

/// Smallest `trace_distance(ρ, P_H(ρ))` found over the parameters of one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSearch {
    pub descriptor: SubgroupDescriptor,
    pub distance: f64,
}

const SEEDS_REFINED: usize = 3;

fn hemisphere() -> &'static [Vector3<f64>] {
    static GRID: std::sync::OnceLock<Vec<Vector3<f64>>> = std::sync::OnceLock::new();
    GRID.get_or_init(|| icosphere_hemisphere(9))
}

fn axis_seeds(pf: &PauliForm) -> Vec<Vector3<f64>> {
    let cf = canonical_form(pf);
    let sym = (pf.t + pf.t.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut seeds = Vec::new();
    for i in 0..3 {
        seeds.push(cf.c_basis.column(i).into_owned());
        seeds.push(cf.d_basis.column(i).into_owned());
        seeds.push(eig.eigenvectors.column(i).into_owned());
    }
    for v in [pf.a, pf.b, pf.a + pf.b, pf.a - pf.b] {
        if v.norm() > 1e-12 {
            seeds.push(v.normalize());
        }
    }
    seeds.extend_from_slice(hemisphere());
    seeds
}

/// Best axis for a one-parameter family `k ↦ H(k)`.
pub fn search_axis(pf: &PauliForm, make: impl Fn(Vector3<f64>) -> SubgroupDescriptor) -> ClassSearch {
    let dist = |k: &Vector3<f64>| pauli_trace_distance(pf, &project(&make(*k), pf));
    let mut scored: Vec<(f64, Vector3<f64>)> = axis_seeds(pf).into_iter().map(|k| (dist(&k), k)).collect();
    scored.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best = scored[0];
    if best.0 > 0.0 {
        for &(_, k0) in scored.iter().take(SEEDS_REFINED) {
            let (k, v) = minimize_on_sphere(dist, &k0);
            if v < best.0 {
                best = (v, k);
            }
        }
    }
    ClassSearch { descriptor: make(best.1), distance: best.0 }
}

/// Best K2 frame.
pub fn search_k2(pf: &PauliForm) -> ClassSearch {
    let dist = |f: &Matrix3<f64>| pauli_trace_distance(pf, &project(&SubgroupDescriptor::k2(*f), pf));
    let cf = canonical_form(pf);
    let sym = (pf.t + pf.t.transpose()) * 0.5;
    let mut frames = vec![sym.symmetric_eigen().eigenvectors, cf.c_basis, cf.d_basis];
    for k in hemisphere() {
        let p = Matrix3::identity() - k * k.transpose();
        let psp = p * sym * p;
        let e = psp.symmetric_eigen();
        // the two in-plane eigenvectors complete k to a frame
        let mut inplane: Vec<Vector3<f64>> =
            (0..3).map(|i| e.eigenvectors.column(i).into_owned()).filter(|v| v.dot(k).abs() < 0.5).collect();
        inplane.truncate(1);
        if let Some(u) = inplane.first() {
            let u = (u - k * k.dot(u)).normalize();
            frames.push(Matrix3::from_columns(&[*k, u, k.cross(&u)]));
        }
    }
    let mut scored: Vec<(f64, Matrix3<f64>)> = frames.into_iter().map(|f| (dist(&f), f)).collect();
    scored.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best = scored[0];
    if best.0 > 0.0 {
        for &(_, f0) in scored.iter().take(SEEDS_REFINED) {
            let (f, v) = minimize_on_frames(dist, &f0);
            if v < best.0 {
                best = (v, f);
            }
        }
    }
    ClassSearch { descriptor: SubgroupDescriptor::k2(best.1), distance: best.0 }
}

/// Smoothed isotropy: the highest class within trace distance `eps`.
///
/// Classes are visited top-down (SU2, Kinf, then U1 and K2, then Z4, Z2).
/// For each class the distance `trace_distance(ρ, P_H(ρ))` is minimised over
/// the class's axis or frame. When U1 and K2 both qualify the closer one is
/// reported, U1 on ties. `eps = 0` is [`classify`].
pub fn smoothed_classify(pf: &PauliForm, eps: f64, tol: &Tolerance) -> Result<IsotropyReport> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be nonnegative, got {eps}")));
    }
    if eps == 0.0 {
        return classify(pf, tol);
    }
    let mut diag = BTreeMap::new();
    let finish = |s: ClassSearch, mut diag: BTreeMap<String, f64>| {
        let pi_axes = match s.descriptor {
            SubgroupDescriptor::Z4 { axis } | SubgroupDescriptor::U1 { axis } | SubgroupDescriptor::Kinf { axis, .. } => {
                vec![axis]
            }
            SubgroupDescriptor::K2 { frame } => (0..3).map(|i| frame.column(i).into_owned()).collect(),
            _ => vec![],
        };
        diag.insert("distance".into(), s.distance);
        diag.insert("eps".into(), eps);
        let mut r = IsotropyReport::new(s.descriptor, pi_axes, s.distance);
        r.residuals = diag;
        Ok(r)
    };

    let su2 = ClassSearch { descriptor: SubgroupDescriptor::SU2, distance: fixed_point_residual(&SubgroupDescriptor::SU2, pf) };
    diag.insert("min_distance_SU2".into(), su2.distance);
    if su2.distance <= eps {
        return finish(su2, diag);
    }
    let kinf = search_axis(pf, SubgroupDescriptor::kinf);
    diag.insert("min_distance_Kinf".into(), kinf.distance);
    if kinf.distance <= eps {
        return finish(kinf, diag);
    }
    let u1 = search_axis(pf, SubgroupDescriptor::u1);
    let k2 = search_k2(pf);
    diag.insert("min_distance_U1".into(), u1.distance);
    diag.insert("min_distance_K2".into(), k2.distance);
    match (u1.distance <= eps, k2.distance <= eps) {
        (true, true) => return finish(if k2.distance < u1.distance { k2 } else { u1 }, diag),
        (true, false) => return finish(u1, diag),
        (false, true) => return finish(k2, diag),
        _ => {}
    }
    let z4 = search_axis(pf, SubgroupDescriptor::z4);
    diag.insert("min_distance_Z4".into(), z4.distance);
    if z4.distance <= eps {
        return finish(z4, diag);
    }
    finish(ClassSearch { descriptor: SubgroupDescriptor::Z2, distance: 0.0 }, diag)
}
