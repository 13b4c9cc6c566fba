//! SU(2) as unit quaternions, its double cover onto SO(3), the collective
//! action on two-qubit states, and the subgroups that occur as isotropies.
//!
//! A quaternion `(w, x, y, z)` stands for `U = w·1 + i(xX + yY + zZ)`, so
//! `exp(iφ r·σ)` is `(cos φ, sin φ r)`.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{paulis, Matrix2c, Matrix4c, PauliForm, C64};

/// Tolerance for "parallel" and "perpendicular" on unit vectors.
pub const TOL_AXIS: f64 = 1e-8;

/// A unit quaternion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    pub w: f64,
    pub v: Vector3<f64>,
}

impl GroupElement {
    pub fn identity() -> Self {
        Self { w: 1.0, v: Vector3::zeros() }
    }

    /// Normalises `(w, x, y, z)`.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        Self { w: w / n, v: Vector3::new(x, y, z) / n }
    }

    /// `exp(iθ r·σ)` for a unit (or normalisable) axis `r`.
    pub fn exp(axis: &Vector3<f64>, theta: f64) -> Self {
        let r = axis.normalize();
        Self { w: theta.cos(), v: r * theta.sin() }
    }

    /// `i r·σ`, the π-rotation about `r`.
    pub fn pi_about(axis: &Vector3<f64>) -> Self {
        Self { w: 0.0, v: axis.normalize() }
    }

    pub fn quaternion(&self) -> [f64; 4] {
        [self.w, self.v[0], self.v[1], self.v[2]]
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.v.norm_squared()).sqrt()
    }

    /// Group product `self · other`.
    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            w: self.w * other.w - self.v.dot(&other.v),
            v: other.v * self.w + self.v * other.w - self.v.cross(&other.v),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement { w: self.w, v: -self.v }
    }

    pub fn neg(&self) -> GroupElement {
        GroupElement { w: -self.w, v: -self.v }
    }

    /// The 2×2 unitary `w + i v·σ`.
    pub fn to_matrix(&self) -> Matrix2c {
        let p = paulis();
        let i = C64::new(0.0, 1.0);
        p[0] * C64::new(self.w, 0.0) + (p[1] * C64::from(self.v[0]) + p[2] * C64::from(self.v[1]) + p[3] * C64::from(self.v[2])) * i
    }

    /// Rotation axis and angle `φ ∈ [0, π]` with `self = exp(iφ r·σ)`; the
    /// axis is arbitrary (`z`) when `v = 0`.
    pub fn axis_angle(&self) -> (Vector3<f64>, f64) {
        let s = self.v.norm();
        let phi = s.atan2(self.w);
        if s == 0.0 {
            (Vector3::z(), phi)
        } else {
            (self.v / s, phi)
        }
    }
}

/// The SO(3) image: `U (v·σ) U† = (R v)·σ`.
///
/// `exp(iφ r·σ)` rotates by `−2φ` about `r` in the right-hand convention.
pub fn rotation_of(g: &GroupElement) -> Matrix3<f64> {
    let (w, x, y, z) = (g.w, g.v[0], g.v[1], g.v[2]);
    Matrix3::new(
        w * w + x * x - y * y - z * z,
        2.0 * (x * y + w * z),
        2.0 * (x * z - w * y),
        2.0 * (x * y - w * z),
        w * w - x * x + y * y - z * z,
        2.0 * (y * z + w * x),
        2.0 * (x * z + w * y),
        2.0 * (y * z - w * x),
        w * w - x * x - y * y + z * z,
    )
}

/// Collective action `ρ ↦ (U⊗U) ρ (U⊗U)†` in Pauli form.
pub fn act(g: &GroupElement, pf: &PauliForm) -> PauliForm {
    act_rotation(&rotation_of(g), pf)
}

/// [`act`] for a precomputed rotation.
pub fn act_rotation(r: &Matrix3<f64>, pf: &PauliForm) -> PauliForm {
    PauliForm::new(r * pf.a, r * pf.b, r * pf.t * r.transpose())
}

/// `(U⊗U) m (U⊗U)†` on a 4×4 matrix.
pub fn act_matrix(g: &GroupElement, m: &Matrix4c) -> Matrix4c {
    let u = g.to_matrix();
    let uu = u.kronecker(&u);
    uu * m * uu.adjoint()
}

/// `n` independent Haar-random elements.
pub fn haar_sample<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<GroupElement> {
    (0..n).map(|_| haar_element(rng)).collect()
}

pub fn haar_element<R: Rng + ?Sized>(rng: &mut R) -> GroupElement {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = q.iter().map(|x| x * x).sum::<f64>();
        if n > 1e-20 {
            return GroupElement::new(q[0], q[1], q[2], q[3]);
        }
    }
}

/// A uniformly random unit 3-vector.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-10 {
            return v / n;
        }
    }
}

pub fn parallel(u: &Vector3<f64>, v: &Vector3<f64>, tol: f64) -> bool {
    u.cross(v).norm() <= tol
}

pub fn perpendicular(u: &Vector3<f64>, v: &Vector3<f64>, tol: f64) -> bool {
    u.dot(v).abs() <= tol
}

/// A deterministic unit vector orthogonal to `k`.
pub fn orthogonal_to(k: &Vector3<f64>) -> Vector3<f64> {
    let i = k.iamin();
    let e = Vector3::from_fn(|r, _| if r == i { 1.0 } else { 0.0 });
    k.cross(&e).normalize()
}

/// Flips `v` so its largest-magnitude component is positive. Signed zeros
/// are cleared so equal axes print identically.
pub fn sign_normalize(v: &Vector3<f64>) -> Vector3<f64> {
    let i = v.iamax();
    let w = if v[i] < 0.0 { -v } else { *v };
    w.map(|x| x + 0.0)
}

/// The isomorphism class of an isotropy subgroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SubgroupClass {
    Z2,
    Z4,
    U1,
    K2,
    Kinf,
    SU2,
}

impl SubgroupClass {
    pub const ALL: [SubgroupClass; 6] = [
        SubgroupClass::Z2,
        SubgroupClass::Z4,
        SubgroupClass::U1,
        SubgroupClass::K2,
        SubgroupClass::Kinf,
        SubgroupClass::SU2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SubgroupClass::Z2 => "Z2",
            SubgroupClass::Z4 => "Z4",
            SubgroupClass::U1 => "U1",
            SubgroupClass::K2 => "K2",
            SubgroupClass::Kinf => "Kinf",
            SubgroupClass::SU2 => "SU2",
        }
    }

    /// Dimension of the Lie algebra.
    pub fn continuous_dim(self) -> usize {
        match self {
            SubgroupClass::SU2 => 3,
            SubgroupClass::U1 | SubgroupClass::Kinf => 1,
            _ => 0,
        }
    }

    pub fn has_circle(self) -> bool {
        self.continuous_dim() > 0
    }
}

impl fmt::Display for SubgroupClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SubgroupClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SubgroupClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::MalformedInput(format!("unknown subgroup class {s:?}")))
    }
}

/// A concrete subgroup of SU(2): class plus axis or frame data.
///
/// * `Z4 { axis }` is `{±1, ±i axis·σ}`.
/// * `U1 { axis }` is `{exp(iθ axis·σ)}`.
/// * `K2 { frame }` is `{±1, ±i r_k·σ}` for the columns `r_k`.
/// * `Kinf { axis, pi_axis }` is `U1(axis)` together with `i u·σ` for all
///   `u ⊥ axis`; `pi_axis` names one such `u` and carries no information.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DescriptorRepr", into = "DescriptorRepr")]
pub enum SubgroupDescriptor {
    Z2,
    Z4 { axis: Vector3<f64> },
    U1 { axis: Vector3<f64> },
    K2 { frame: Matrix3<f64> },
    Kinf { axis: Vector3<f64>, pi_axis: Vector3<f64> },
    SU2,
}

impl SubgroupDescriptor {
    pub fn z4(axis: Vector3<f64>) -> Self {
        SubgroupDescriptor::Z4 { axis: sign_normalize(&axis.normalize()) }
    }

    pub fn u1(axis: Vector3<f64>) -> Self {
        SubgroupDescriptor::U1 { axis: sign_normalize(&axis.normalize()) }
    }

    /// `frame` columns are the three π-axes; they are re-orthonormalised
    /// into a right-handed frame.
    pub fn k2(frame: Matrix3<f64>) -> Self {
        let r1 = sign_normalize(&frame.column(0).normalize());
        let c2 = frame.column(1).into_owned();
        let r2 = sign_normalize(&(c2 - r1 * r1.dot(&c2)).normalize());
        SubgroupDescriptor::K2 { frame: Matrix3::from_columns(&[r1, r2, r1.cross(&r2)]) }
    }

    pub fn k2_standard() -> Self {
        SubgroupDescriptor::K2 { frame: Matrix3::identity() }
    }

    pub fn kinf(axis: Vector3<f64>) -> Self {
        let k = sign_normalize(&axis.normalize());
        SubgroupDescriptor::Kinf { axis: k, pi_axis: orthogonal_to(&k) }
    }

    /// Kinf with an explicit coset representative (projected orthogonal to `axis`).
    pub fn kinf_with(axis: Vector3<f64>, pi_axis: Vector3<f64>) -> Self {
        let k = sign_normalize(&axis.normalize());
        let u = pi_axis - k * k.dot(&pi_axis);
        let u = if u.norm() < 1e-6 { orthogonal_to(&k) } else { sign_normalize(&u.normalize()) };
        SubgroupDescriptor::Kinf { axis: k, pi_axis: u }
    }

    /// Representative of `class` aligned with the coordinate axes (`z` for
    /// the circle or Z4 axis, the standard frame for K2).
    pub fn standard(class: SubgroupClass) -> Self {
        let z = Vector3::z();
        match class {
            SubgroupClass::Z2 => SubgroupDescriptor::Z2,
            SubgroupClass::Z4 => SubgroupDescriptor::z4(z),
            SubgroupClass::U1 => SubgroupDescriptor::u1(z),
            SubgroupClass::K2 => SubgroupDescriptor::k2_standard(),
            SubgroupClass::Kinf => SubgroupDescriptor::kinf_with(z, Vector3::x()),
            SubgroupClass::SU2 => SubgroupDescriptor::SU2,
        }
    }

    pub fn class(&self) -> SubgroupClass {
        match self {
            SubgroupDescriptor::Z2 => SubgroupClass::Z2,
            SubgroupDescriptor::Z4 { .. } => SubgroupClass::Z4,
            SubgroupDescriptor::U1 { .. } => SubgroupClass::U1,
            SubgroupDescriptor::K2 { .. } => SubgroupClass::K2,
            SubgroupDescriptor::Kinf { .. } => SubgroupClass::Kinf,
            SubgroupDescriptor::SU2 => SubgroupClass::SU2,
        }
    }

    /// The distinguished axis of Z4, U1 and Kinf.
    pub fn axis(&self) -> Option<Vector3<f64>> {
        match *self {
            SubgroupDescriptor::Z4 { axis } | SubgroupDescriptor::U1 { axis } | SubgroupDescriptor::Kinf { axis, .. } => {
                Some(axis)
            }
            _ => None,
        }
    }

    /// The K2 frame, columns are axes.
    pub fn frame(&self) -> Option<Matrix3<f64>> {
        match *self {
            SubgroupDescriptor::K2 { frame } => Some(frame),
            _ => None,
        }
    }

    /// The same subgroup conjugated by a rotation: `g H g⁻¹` for `R = rotation_of(g)`.
    pub fn rotated(&self, r: &Matrix3<f64>) -> Self {
        match *self {
            SubgroupDescriptor::Z2 => SubgroupDescriptor::Z2,
            SubgroupDescriptor::SU2 => SubgroupDescriptor::SU2,
            SubgroupDescriptor::Z4 { axis } => SubgroupDescriptor::z4(r * axis),
            SubgroupDescriptor::U1 { axis } => SubgroupDescriptor::u1(r * axis),
            SubgroupDescriptor::K2 { frame } => SubgroupDescriptor::k2(r * frame),
            SubgroupDescriptor::Kinf { axis, pi_axis } => SubgroupDescriptor::kinf_with(r * axis, r * pi_axis),
        }
    }

    /// Equality as subgroups: axes up to sign, K2 frames up to signed
    /// permutation, and the Kinf coset representative ignored.
    pub fn same_subgroup(&self, other: &SubgroupDescriptor, tol: f64) -> bool {
        use SubgroupDescriptor as D;
        match (self, other) {
            (D::Z2, D::Z2) | (D::SU2, D::SU2) => true,
            (D::Z4 { axis: a }, D::Z4 { axis: b })
            | (D::U1 { axis: a }, D::U1 { axis: b })
            | (D::Kinf { axis: a, .. }, D::Kinf { axis: b, .. }) => parallel(a, b, tol),
            (D::K2 { frame: f }, D::K2 { frame: g }) => (0..3).all(|i| {
                let fi = f.column(i).into_owned();
                (0..3).any(|j| parallel(&fi, &g.column(j).into_owned(), tol))
            }),
            _ => false,
        }
    }

    /// Membership of a group element.
    pub fn contains(&self, g: &GroupElement, tol: f64) -> bool {
        let scalar = g.v.norm() <= tol;
        let pure = g.w.abs() <= tol;
        match self {
            SubgroupDescriptor::Z2 => scalar,
            SubgroupDescriptor::Z4 { axis } => scalar || (pure && parallel(&g.v, axis, tol)),
            SubgroupDescriptor::U1 { axis } => parallel(&g.v, axis, tol),
            SubgroupDescriptor::K2 { frame } => {
                scalar || (pure && (0..3).any(|i| parallel(&g.v, &frame.column(i).into_owned(), tol)))
            }
            SubgroupDescriptor::Kinf { axis, .. } => {
                parallel(&g.v, axis, tol) || (pure && perpendicular(&g.v, axis, tol))
            }
            SubgroupDescriptor::SU2 => true,
        }
    }

    /// A finite generating set (one-parameter families sampled by `exp` at a generic angle).
    pub fn generators(&self) -> Vec<GroupElement> {
        let theta = 0.7390851332151607;
        match *self {
            SubgroupDescriptor::Z2 => vec![GroupElement::identity().neg()],
            SubgroupDescriptor::Z4 { axis } => vec![GroupElement::pi_about(&axis)],
            SubgroupDescriptor::U1 { axis } => vec![GroupElement::exp(&axis, theta)],
            SubgroupDescriptor::K2 { frame } => {
                (0..3).map(|i| GroupElement::pi_about(&frame.column(i).into_owned())).collect()
            }
            SubgroupDescriptor::Kinf { axis, pi_axis } => {
                vec![GroupElement::exp(&axis, theta), GroupElement::pi_about(&pi_axis)]
            }
            SubgroupDescriptor::SU2 => vec![
                GroupElement::exp(&Vector3::x(), theta),
                GroupElement::exp(&Vector3::y(), theta),
                GroupElement::exp(&Vector3::z(), theta),
            ],
        }
    }
}

impl fmt::Display for SubgroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = |v: &Vector3<f64>| format!("[{:.6}, {:.6}, {:.6}]", v[0], v[1], v[2]);
        match self {
            SubgroupDescriptor::Z2 => write!(f, "Z2"),
            SubgroupDescriptor::SU2 => write!(f, "SU2"),
            SubgroupDescriptor::Z4 { axis } => write!(f, "Z4({})", v(axis)),
            SubgroupDescriptor::U1 { axis } => write!(f, "U1({})", v(axis)),
            SubgroupDescriptor::Kinf { axis, .. } => write!(f, "Kinf({})", v(axis)),
            SubgroupDescriptor::K2 { frame } => write!(
                f,
                "K2{{{}, {}, {}}}",
                v(&frame.column(0).into_owned()),
                v(&frame.column(1).into_owned()),
                v(&frame.column(2).into_owned())
            ),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DescriptorRepr {
    class: SubgroupClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    axis: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pi_axis: Option<[f64; 3]>,
    /// Rows are the three π-axes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    frame: Option<[[f64; 3]; 3]>,
}

fn unit(v: [f64; 3], what: &str) -> Result<Vector3<f64>> {
    let v = Vector3::from(v);
    let n = v.norm();
    if !n.is_finite() || n < 1e-12 {
        return Err(Error::MalformedInput(format!("{what} must be a nonzero finite vector")));
    }
    Ok(v / n)
}

impl TryFrom<DescriptorRepr> for SubgroupDescriptor {
    type Error = Error;
    fn try_from(r: DescriptorRepr) -> Result<Self> {
        let need_axis = || r.axis.ok_or_else(|| Error::MalformedInput(format!("{} requires \"axis\"", r.class)));
        Ok(match r.class {
            SubgroupClass::Z2 => SubgroupDescriptor::Z2,
            SubgroupClass::SU2 => SubgroupDescriptor::SU2,
            SubgroupClass::Z4 => SubgroupDescriptor::z4(unit(need_axis()?, "axis")?),
            SubgroupClass::U1 => SubgroupDescriptor::u1(unit(need_axis()?, "axis")?),
            SubgroupClass::Kinf => {
                let k = unit(need_axis()?, "axis")?;
                match r.pi_axis {
                    None => SubgroupDescriptor::kinf(k),
                    Some(u) => {
                        let u = unit(u, "pi_axis")?;
                        if !perpendicular(&k, &u, 1e-6) {
                            return Err(Error::MalformedInput("pi_axis must be orthogonal to axis".into()));
                        }
                        SubgroupDescriptor::kinf_with(k, u)
                    }
                }
            }
            SubgroupClass::K2 => {
                let rows = r.frame.unwrap_or([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
                let cols: Vec<Vector3<f64>> = rows.iter().map(|&row| unit(row, "frame axis")).collect::<Result<_>>()?;
                let m = Matrix3::from_columns(&cols);
                if (m.transpose() * m - Matrix3::identity()).amax() > 1e-6 {
                    return Err(Error::MalformedInput("K2 frame must be orthonormal".into()));
                }
                SubgroupDescriptor::k2(m)
            }
        })
    }
}

impl From<SubgroupDescriptor> for DescriptorRepr {
    fn from(d: SubgroupDescriptor) -> Self {
        let arr = |v: Vector3<f64>| [v[0], v[1], v[2]];
        let mut r = DescriptorRepr { class: d.class(), axis: None, pi_axis: None, frame: None };
        match d {
            SubgroupDescriptor::Z4 { axis } | SubgroupDescriptor::U1 { axis } => r.axis = Some(arr(axis)),
            SubgroupDescriptor::Kinf { axis, pi_axis } => {
                r.axis = Some(arr(axis));
                r.pi_axis = Some(arr(pi_axis));
            }
            SubgroupDescriptor::K2 { frame } => {
                r.frame = Some(std::array::from_fn(|i| arr(frame.column(i).into_owned())));
            }
            _ => {}
        }
        r
    }
}

/// Weighted nodes approximating the Haar average over a subgroup.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub subgroup: SubgroupDescriptor,
    pub nodes: Vec<GroupElement>,
    pub weights: Vec<f64>,
}

pub const DEFAULT_N_CIRCLE: usize = 16;

/// Quadrature for the Haar measure of `h`.
///
/// Finite groups get their exact uniform sum. Circle factors use an
/// `n_circle`-point trapezoid rule, exact for the degree-4 harmonics the
/// two-qubit action produces once `n_circle ≥ 5`. SU(2) uses a product rule in
/// `exp(iφ r·σ)`: trapezoid in `φ ∈ [0, π)` weighted by `sin²φ`, uniform
/// azimuth, and Gauss–Legendre in the polar cosine.
pub fn subgroup_quadrature(h: &SubgroupDescriptor, n_circle: usize) -> Result<QuadratureRule> {
    if h.class().has_circle() && n_circle < 5 {
        return Err(Error::InvalidCircleCount(n_circle));
    }
    let uniform = |nodes: Vec<GroupElement>| {
        let w = 1.0 / nodes.len() as f64;
        let weights = vec![w; nodes.len()];
        QuadratureRule { subgroup: *h, nodes, weights }
    };
    let one = GroupElement::identity();
    let rule = match *h {
        SubgroupDescriptor::Z2 => uniform(vec![one, one.neg()]),
        SubgroupDescriptor::Z4 { axis } => {
            let p = GroupElement::pi_about(&axis);
            uniform(vec![one, p, one.neg(), p.neg()])
        }
        SubgroupDescriptor::K2 { frame } => {
            let mut nodes = vec![one, one.neg()];
            for i in 0..3 {
                let p = GroupElement::pi_about(&frame.column(i).into_owned());
                nodes.push(p);
                nodes.push(p.neg());
            }
            uniform(nodes)
        }
        SubgroupDescriptor::U1 { axis } => uniform(circle(&axis, n_circle)),
        SubgroupDescriptor::Kinf { axis, pi_axis } => {
            let base = circle(&axis, n_circle);
            let p = GroupElement::pi_about(&pi_axis);
            let mut nodes = Vec::with_capacity(4 * n_circle);
            let mut left = one;
            for _ in 0..4 {
                nodes.extend(base.iter().map(|g| left.mul(g)));
                left = p.mul(&left);
            }
            uniform(nodes)
        }
        SubgroupDescriptor::SU2 => su2_product_rule(n_circle),
    };
    Ok(rule)
}

fn circle(axis: &Vector3<f64>, n: usize) -> Vec<GroupElement> {
    (0..n).map(|k| GroupElement::exp(axis, 2.0 * PI * k as f64 / n as f64)).collect()
}

fn su2_product_rule(n: usize) -> QuadratureRule {
    let m = (n / 2).max(3);
    let (xs, ws) = gauss_legendre(m);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for j in 1..n {
        // j = 0 has zero Haar weight
        let phi = PI * j as f64 / n as f64;
        let radial = phi.sin().powi(2);
        for (ct, wt) in xs.iter().zip(&ws) {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            for l in 0..n {
                let az = 2.0 * PI * l as f64 / n as f64;
                let r = Vector3::new(st * az.cos(), st * az.sin(), *ct);
                nodes.push(GroupElement { w: phi.cos(), v: r * phi.sin() });
                weights.push(radial * wt);
            }
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    QuadratureRule { subgroup: SubgroupDescriptor::SU2, nodes, weights }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; m];
    let mut ws = vec![0.0; m];
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 0 { 1.0 } else if m == 1 { x } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (x * pm - pm1) / (x * x - 1.0);
            let dx = pm / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = x;
        ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (xs, ws)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{max_modulus, Bell};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_pf(rng: &mut ChaCha8Rng) -> PauliForm {
        let mut f = || rng.random_range(-0.3..0.3);
        PauliForm::new(
            Vector3::new(f(), f(), f()),
            Vector3::new(f(), f(), f()),
            Matrix3::new(f(), f(), f(), f(), f(), f(), f(), f(), f()),
        )
    }

    #[test]
    fn rotation_examples() {
        assert_eq!(rotation_of(&GroupElement::identity()), Matrix3::identity());
        let iz = GroupElement::new(0.0, 0.0, 0.0, 1.0);
        assert!((rotation_of(&iz) - Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 1.0))).amax() < 1e-15);
    }

    #[test]
    fn rotation_matches_explicit_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = paulis();
        for g in haar_sample(&mut rng, 50) {
            let u = g.to_matrix();
            let r = rotation_of(&g);
            for j in 0..3 {
                let lhs = u * p[j + 1] * u.adjoint();
                let rhs = p[1] * C64::from(r[(0, j)]) + p[2] * C64::from(r[(1, j)]) + p[3] * C64::from(r[(2, j)]);
                assert!((lhs - rhs).iter().all(|z| z.norm() < 1e-12));
            }
            assert!((r - rotation_of(&g.neg())).amax() < 1e-15);
        }
    }

    #[test]
    fn exp_y_rotates_by_minus_two_theta_about_y() {
        let th = 0.3;
        let r = rotation_of(&GroupElement::exp(&Vector3::y(), th));
        let want = nalgebra::Rotation3::from_axis_angle(&Vector3::y_axis(), -2.0 * th).into_inner();
        assert!((r - want).amax() < 1e-15);
    }

    #[test]
    fn homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let g = haar_element(&mut rng);
            let h = haar_element(&mut rng);
            assert!((rotation_of(&g.mul(&h)) - rotation_of(&g) * rotation_of(&h)).amax() < 1e-12);
            assert!((g.mul(&h).to_matrix() - g.to_matrix() * h.to_matrix()).iter().all(|z| z.norm() < 1e-14));
        }
    }

    #[test]
    fn act_matches_matrix_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let g = haar_element(&mut rng);
            let pf = random_pf(&mut rng);
            let lhs = act(&g, &pf).to_matrix();
            let rhs = act_matrix(&g, &pf.to_matrix());
            assert!(max_modulus(&(lhs - rhs)) < 1e-12);
        }
    }

    #[test]
    fn act_examples() {
        let mm = PauliForm::maximally_mixed();
        let g = GroupElement::new(0.3, -0.2, 0.5, 0.1);
        assert_eq!(act(&g, &mm), mm);
        let phi = PauliForm::bell(Bell::PhiPlus);
        for th in [0.1, 0.7, 2.0, 3.0] {
            assert!(act(&GroupElement::exp(&Vector3::y(), th), &phi).max_abs_diff(&phi) < 1e-15);
        }
        let t = PauliForm::t_state([0.4, -0.2, 0.1]);
        assert!(act(&GroupElement::pi_about(&Vector3::x()), &t).max_abs_diff(&t) < 1e-15);
    }

    #[test]
    fn quadrature_examples() {
        let z2 = subgroup_quadrature(&SubgroupDescriptor::Z2, 16).unwrap();
        assert_eq!(z2.nodes.len(), 2);
        assert_eq!(z2.weights, vec![0.5, 0.5]);
        let k2 = subgroup_quadrature(&SubgroupDescriptor::k2_standard(), 16).unwrap();
        assert_eq!(k2.nodes.len(), 8);
        assert!(k2.weights.iter().all(|&w| w == 0.125));
        let u1 = subgroup_quadrature(&SubgroupDescriptor::u1(Vector3::z()), 16).unwrap();
        assert_eq!(u1.nodes.len(), 16);
        // ∫ cos²2θ dθ/2π = 1/2, ∫ cos⁴2θ = 3/8
        let avg = |f: &dyn Fn(f64) -> f64| -> f64 {
            u1.nodes.iter().zip(&u1.weights).map(|(g, w)| w * f(g.v[2].atan2(g.w))).sum()
        };
        assert!((avg(&|t| (2.0 * t).cos().powi(2)) - 0.5).abs() < 1e-14);
        assert!((avg(&|t| (2.0 * t).cos().powi(4)) - 0.375).abs() < 1e-14);
        assert_eq!(
            subgroup_quadrature(&SubgroupDescriptor::u1(Vector3::z()), 4).unwrap_err(),
            Error::InvalidCircleCount(4)
        );
    }

    #[test]
    fn quadrature_nodes_lie_in_subgroup() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let k = random_unit_vector(&mut rng);
        let f = nalgebra::Rotation3::from_scaled_axis(random_unit_vector(&mut rng) * 1.3).into_inner();
        for h in [
            SubgroupDescriptor::Z2,
            SubgroupDescriptor::z4(k),
            SubgroupDescriptor::u1(k),
            SubgroupDescriptor::k2(f),
            SubgroupDescriptor::kinf(k),
            SubgroupDescriptor::SU2,
        ] {
            let rule = subgroup_quadrature(&h, 16).unwrap();
            assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(rule.weights.iter().all(|&w| w >= 0.0));
            for g in &rule.nodes {
                assert!((g.norm() - 1.0).abs() < 1e-12);
                assert!(h.contains(g, 1e-10), "{h} does not contain {g:?}");
            }
        }
    }

    #[test]
    fn kinf_nodes_have_explicit_form() {
        let k = Vector3::new(1.0, 2.0, -0.5).normalize();
        let h = SubgroupDescriptor::kinf(k);
        let SubgroupDescriptor::Kinf { pi_axis, .. } = h else { unreachable!() };
        let rule = subgroup_quadrature(&h, 8).unwrap();
        let p = GroupElement::pi_about(&pi_axis);
        for (idx, g) in rule.nodes.iter().enumerate() {
            let (alpha, j) = (idx / 8, idx % 8);
            let mut want = GroupElement::exp(&k, 2.0 * PI * j as f64 / 8.0);
            for _ in 0..alpha {
                want = p.mul(&want);
            }
            assert!((g.w - want.w).abs() < 1e-14 && (g.v - want.v).norm() < 1e-14);
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(3);
        let int = |f: &dyn Fn(f64) -> f64| -> f64 { x.iter().zip(&w).map(|(x, w)| w * f(*x)).sum() };
        assert!((int(&|_| 1.0) - 2.0).abs() < 1e-14);
        assert!((int(&|t| t.powi(4)) - 0.4).abs() < 1e-14);
    }

    #[test]
    fn haar_sample_first_moment() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(haar_sample(&mut rng, 0).is_empty());
        let n = 200_000;
        let mean = haar_sample(&mut rng, n).iter().map(rotation_of).sum::<Matrix3<f64>>() / n as f64;
        assert!(mean.amax() < 1e-2);
    }

    #[test]
    fn descriptor_json_round_trip() {
        let d: SubgroupDescriptor = serde_json::from_str(r#"{"class":"Kinf","axis":[0,1,0],"pi_axis":[0,0,1]}"#).unwrap();
        assert_eq!(d, SubgroupDescriptor::Kinf { axis: Vector3::y(), pi_axis: Vector3::z() });
        let s = serde_json::to_string(&d).unwrap();
        let back: SubgroupDescriptor = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        let k2: SubgroupDescriptor = serde_json::from_str(r#"{"class":"K2"}"#).unwrap();
        assert_eq!(k2, SubgroupDescriptor::k2_standard());
        assert!(serde_json::from_str::<SubgroupDescriptor>(r#"{"class":"U1"}"#).is_err());
        assert!(serde_json::from_str::<SubgroupDescriptor>(r#"{"class":"Kinf","axis":[0,0,1],"pi_axis":[0,0,1]}"#).is_err());
    }

    #[test]
    fn same_subgroup_modulo_gauge() {
        let a = SubgroupDescriptor::kinf_with(Vector3::z(), Vector3::x());
        let b = SubgroupDescriptor::kinf_with(-Vector3::z(), Vector3::new(1.0, 1.0, 0.0));
        assert!(a.same_subgroup(&b, 1e-10));
        let f = Matrix3::new(0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0);
        assert!(SubgroupDescriptor::k2(f).same_subgroup(&SubgroupDescriptor::k2_standard(), 1e-10));
    }
}
