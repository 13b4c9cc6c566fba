//! Two-qubit states in matrix and Pauli (Bloch) form.
//!
//! A two-qubit density matrix is written as
//!
//! ```text
//! rho = 1/4 ( 1⊗1 + a·σ⊗1 + 1⊗b·σ + Σ_ij T_ij σ_i⊗σ_j )
//! ```
//!
//! with local Bloch vectors `a`, `b` and correlation matrix `T`. Everything
//! downstream works on [`PauliForm`]; [`DensityMatrix4`] is the validated
//! matrix boundary.

use std::sync::OnceLock;

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Matrix2c = Matrix2<C64>;
pub type Matrix4c = Matrix4<C64>;

/// Entrywise Hermiticity tolerance for validated matrices.
pub const TOL_HERMITIAN: f64 = 1e-12;
/// Allowed deviation of the trace from one.
pub const TOL_TRACE: f64 = 1e-12;
/// Most negative eigenvalue still accepted as positive semidefinite.
pub const TOL_PSD: f64 = -1e-10;
/// Eigenvalues below this are treated as zero when deciding supports.
pub const EIG_FLOOR: f64 = 1e-14;

const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The single-qubit Pauli matrices `[1, X, Y, Z]`.
pub fn paulis() -> &'static [Matrix2c; 4] {
    static P: OnceLock<[Matrix2c; 4]> = OnceLock::new();
    P.get_or_init(|| {
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        [
            Matrix2c::new(one, z, z, one),
            Matrix2c::new(z, one, one, z),
            Matrix2c::new(z, -i, i, z),
            Matrix2c::new(one, z, z, -one),
        ]
    })
}

/// `σ_i ⊗ σ_j` for `i, j ∈ 0..4`, index `4 i + j`.
pub fn pauli_products() -> &'static [Matrix4c; 16] {
    static P: OnceLock<[Matrix4c; 16]> = OnceLock::new();
    P.get_or_init(|| {
        let p = paulis();
        std::array::from_fn(|k| p[k / 4].kronecker(&p[k % 4]))
    })
}

/// The SWAP operator on two qubits.
pub fn swap_operator() -> Matrix4c {
    let mut s = Matrix4c::zeros();
    for i in 0..2 {
        for j in 0..2 {
            s[(2 * i + j, 2 * j + i)] = c(1.0, 0.0);
        }
    }
    s
}

/// Real eigenvalues of a Hermitian 4×4 matrix, ascending.
pub fn hermitian_eigenvalues(m: &Matrix4c) -> [f64; 4] {
    let ev = m.symmetric_eigenvalues();
    let mut out = [ev[0], ev[1], ev[2], ev[3]];
    out.sort_by(f64::total_cmp);
    out
}

/// Largest entry modulus.
pub fn max_modulus(m: &Matrix4c) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `½‖m‖₁` for a Hermitian matrix.
pub fn half_trace_norm(m: &Matrix4c) -> f64 {
    0.5 * hermitian_eigenvalues(m).iter().map(|x| x.abs()).sum::<f64>()
}

/// The four Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl Bell {
    pub const ALL: [Bell; 4] = [Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus];

    /// State vector in the `|00>, |01>, |10>, |11>` basis.
    pub fn ket(self) -> Vector4<C64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (z, p, m) = (c(0.0, 0.0), c(h, 0.0), c(-h, 0.0));
        match self {
            Bell::PhiPlus => Vector4::new(p, z, z, p),
            Bell::PhiMinus => Vector4::new(p, z, z, m),
            Bell::PsiPlus => Vector4::new(z, p, p, z),
            Bell::PsiMinus => Vector4::new(z, p, m, z),
        }
    }

    /// Diagonal of the correlation matrix.
    pub fn taus(self) -> [f64; 3] {
        match self {
            Bell::PhiPlus => [1.0, -1.0, 1.0],
            Bell::PhiMinus => [-1.0, 1.0, 1.0],
            Bell::PsiPlus => [1.0, 1.0, -1.0],
            Bell::PsiMinus => [-1.0, -1.0, -1.0],
        }
    }
}

/// A validated two-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix4 {
    m: Matrix4c,
}

impl DensityMatrix4 {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: Matrix4c) -> Result<Self> {
        let herm = max_modulus(&(m - m.adjoint()));
        if herm > TOL_HERMITIAN {
            return Err(Error::InvalidState(format!("not Hermitian (max |M - M^dag| = {herm:e})")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TOL_TRACE || tr.im.abs() > TOL_TRACE {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min = hermitian_eigenvalues(&m)[0];
        if min < TOL_PSD {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { m })
    }

    pub fn maximally_mixed() -> Self {
        Self { m: Matrix4c::identity() * c(0.25, 0.0) }
    }

    /// `|psi><psi|` after normalising `psi`.
    pub fn from_pure(psi: &Vector4<C64>) -> Result<Self> {
        let n = psi.norm();
        if n == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v = psi.unscale(n);
        Self::new(v * v.adjoint())
    }

    pub fn bell(b: Bell) -> Self {
        let v = b.ket();
        Self { m: v * v.adjoint() }
    }

    pub fn matrix(&self) -> &Matrix4c {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix4c {
        self.m
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigenvalues(&self.m)
    }
}

/// Local Bloch vectors and correlation matrix of a two-qubit operator.
///
/// The struct itself carries no positivity guarantee: channel isotropy
/// reuses it for `(t, 0, Λ)` triples that are not states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliForm {
    pub a: Vector3<f64>,
    pub b: Vector3<f64>,
    pub t: Matrix3<f64>,
}

impl PauliForm {
    pub fn new(a: Vector3<f64>, b: Vector3<f64>, t: Matrix3<f64>) -> Self {
        Self { a, b, t }
    }

    pub fn maximally_mixed() -> Self {
        Self::new(Vector3::zeros(), Vector3::zeros(), Matrix3::zeros())
    }

    /// `¼(1⊗1 + Σ τ_i σ_i⊗σ_i)`.
    pub fn t_state(taus: [f64; 3]) -> Self {
        Self::new(Vector3::zeros(), Vector3::zeros(), Matrix3::from_diagonal(&Vector3::from(taus)))
    }

    pub fn bell(b: Bell) -> Self {
        Self::t_state(b.taus())
    }

    /// Pauli coefficients of an arbitrary 4×4 matrix (Hermiticity not checked);
    /// the identity coefficient is dropped.
    pub fn from_matrix(m: &Matrix4c) -> Self {
        let p = pauli_products();
        let coef = |k: usize| (m * p[k]).trace().re;
        let a = Vector3::new(coef(4), coef(8), coef(12));
        let b = Vector3::new(coef(1), coef(2), coef(3));
        let t = Matrix3::from_fn(|i, j| coef(4 * (i + 1) + j + 1));
        Self { a, b, t }
    }

    /// `¼(identity·1⊗1 + a·σ⊗1 + 1⊗b·σ + Σ T_ij σ_i⊗σ_j)` without validation.
    pub fn to_matrix_with_identity(&self, identity: f64) -> Matrix4c {
        let p = pauli_products();
        let mut m = p[0] * c(identity, 0.0);
        for i in 0..3 {
            m += p[4 * (i + 1)] * c(self.a[i], 0.0);
            m += p[i + 1] * c(self.b[i], 0.0);
            for j in 0..3 {
                m += p[4 * (i + 1) + j + 1] * c(self.t[(i, j)], 0.0);
            }
        }
        m * c(0.25, 0.0)
    }

    /// Unit-trace matrix without the positivity check.
    pub fn to_matrix(&self) -> Matrix4c {
        self.to_matrix_with_identity(1.0)
    }

    /// Largest absolute difference over `a`, `b`, and `T`.
    pub fn max_abs_diff(&self, other: &PauliForm) -> f64 {
        let da = (self.a - other.a).amax();
        let db = (self.b - other.b).amax();
        let dt = (self.t - other.t).amax();
        da.max(db).max(dt)
    }

    /// Euclidean norm over all 15 coefficients.
    pub fn norm(&self) -> f64 {
        (self.a.norm_squared() + self.b.norm_squared() + self.t.norm_squared()).sqrt()
    }

    /// Largest of `|a|`, `|b|`, `‖T‖_F`; the natural scale for relative tolerances.
    pub fn scale(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.t.norm())
    }

    /// `p·self + (1-p)·other`.
    pub fn mix(&self, p: f64, other: &PauliForm) -> PauliForm {
        let q = 1.0 - p;
        PauliForm::new(self.a * p + other.a * q, self.b * p + other.b * q, self.t * p + other.t * q)
    }

    /// Scales all non-identity coefficients, i.e. mixes with `1/4` by weight `1-s`.
    pub fn scaled(&self, s: f64) -> PauliForm {
        PauliForm::new(self.a * s, self.b * s, self.t * s)
    }

    /// Frobenius inner product of the coefficient vectors.
    pub fn dot(&self, other: &PauliForm) -> f64 {
        self.a.dot(&other.a) + self.b.dot(&other.b) + self.t.dot(&other.t)
    }

    /// Bloch and correlation bounds: `|a|, |b|, |T_ij| <= 1 + 1e-10`.
    pub fn within_bounds(&self) -> bool {
        let lim = 1.0 + 1e-10;
        self.a.norm() <= lim && self.b.norm() <= lim && self.t.amax() <= lim
    }
}

/// Pauli coefficients of a density matrix.
pub fn decompose(rho: &DensityMatrix4) -> PauliForm {
    PauliForm::from_matrix(rho.matrix())
}

/// Builds the density matrix of a Pauli triple, failing when it is not positive.
pub fn compose(pf: &PauliForm) -> Result<DensityMatrix4> {
    let m = pf.to_matrix();
    let min = hermitian_eigenvalues(&m)[0];
    if min < TOL_PSD {
        return Err(Error::NotAState { min_eigenvalue: min });
    }
    Ok(DensityMatrix4 { m })
}

/// `T = Σ_i τ_i c_i d_iᵀ` with right-handed frames, plus Bloch vectors in those frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalForm {
    pub taus: Vector3<f64>,
    /// Columns are `c_1, c_2, c_3`.
    pub c_basis: Matrix3<f64>,
    /// Columns are `d_1, d_2, d_3`.
    pub d_basis: Matrix3<f64>,
    /// `a` expressed in the `c` frame.
    pub a: Vector3<f64>,
    /// `b` expressed in the `d` frame.
    pub b: Vector3<f64>,
}

impl CanonicalForm {
    pub fn reconstruct_t(&self) -> Matrix3<f64> {
        self.c_basis * Matrix3::from_diagonal(&self.taus) * self.d_basis.transpose()
    }

    /// True when `a = b = 0`, the frames coincide and `τ` lies in the Bell tetrahedron.
    pub fn is_t_state(&self, tol: f64) -> bool {
        let [t1, t2, t3] = [self.taus[0], self.taus[1], self.taus[2]];
        let in_tetra = [1.0 + t1 - t2 + t3, 1.0 - t1 + t2 + t3, 1.0 + t1 + t2 - t3, 1.0 - t1 - t2 - t3]
            .iter()
            .all(|&w| w >= -tol);
        self.a.norm() <= tol && self.b.norm() <= tol && (self.c_basis - self.d_basis).amax() <= tol && in_tetra
    }
}

/// Real SVD of the correlation matrix with both frames forced into SO(3).
///
/// Singular values are ordered by decreasing magnitude (stable, so equal
/// values keep axis order); a determinant fix flips the last column of a
/// frame and carries the sign into `τ_3`. Each `(c_i, d_i)` pair is signed
/// so that the largest component of `c_1` and `c_2` is positive; `c_3`
/// follows from right-handedness. An input that is
/// already diagonal keeps the computational frame and its diagonal as `τ`.
pub fn canonical_form(pf: &PauliForm) -> CanonicalForm {
    let t = pf.t;
    let offdiag = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .map(|(i, j)| t[(i, j)].abs())
        .fold(0.0, f64::max);
    if offdiag == 0.0 {
        let id = Matrix3::identity();
        return CanonicalForm { taus: t.diagonal(), c_basis: id, d_basis: id, a: pf.a, b: pf.b };
    }

    let svd = t.svd(true, true);
    let u = svd.u.expect("u requested");
    let v = svd.v_t.expect("v requested").transpose();
    let s = svd.singular_values;
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));

    let mut cb = Matrix3::from_columns(&[u.column(order[0]), u.column(order[1]), u.column(order[2])]);
    let mut db = Matrix3::from_columns(&[v.column(order[0]), v.column(order[1]), v.column(order[2])]);
    let mut taus = Vector3::new(s[order[0]], s[order[1]], s[order[2]]);
    if cb.determinant() < 0.0 {
        cb.column_mut(2).neg_mut();
        taus[2] = -taus[2];
    }
    if db.determinant() < 0.0 {
        db.column_mut(2).neg_mut();
        taus[2] = -taus[2];
    }
    for k in 0..2 {
        let col = cb.column(k);
        let lead = col.iter().copied().max_by(|x, y| x.abs().total_cmp(&y.abs())).unwrap_or(0.0);
        if lead < 0.0 {
            // two matched pairs flipped together keep both determinants and the product
            cb.column_mut(k).neg_mut();
            db.column_mut(k).neg_mut();
            cb.column_mut(2).neg_mut();
            db.column_mut(2).neg_mut();
        }
    }
    CanonicalForm { taus, c_basis: cb, d_basis: db, a: cb.transpose() * pf.a, b: db.transpose() * pf.b }
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix4, sigma: &DensityMatrix4) -> f64 {
    half_trace_norm(&(rho.matrix() - sigma.matrix()))
}

/// Trace distance between the matrices of two Pauli triples (no validation).
pub fn pauli_trace_distance(x: &PauliForm, y: &PauliForm) -> f64 {
    let d = PauliForm::new(x.a - y.a, x.b - y.b, x.t - y.t);
    half_trace_norm(&d.to_matrix_with_identity(0.0))
}

/// Quantum relative entropy `tr ρ log ρ − tr ρ log σ` in nats.
///
/// Returns `f64::INFINITY` when the support of `ρ` is not contained in the
/// support of `σ`.
pub fn relative_entropy(rho: &DensityMatrix4, sigma: &DensityMatrix4) -> f64 {
    let er = rho.matrix().symmetric_eigen();
    let es = sigma.matrix().symmetric_eigen();
    let mut s = 0.0;
    for i in 0..4 {
        let p = er.eigenvalues[i];
        if p > EIG_FLOOR {
            s += p * p.ln();
        }
    }
    for j in 0..4 {
        let q = es.eigenvalues[j];
        let vj = es.eigenvectors.column(j);
        // <j| rho |j>
        let overlap: f64 = (vj.adjoint() * rho.matrix() * vj)[(0, 0)].re;
        if q > EIG_FLOOR {
            s -= overlap * q.ln();
        } else if overlap > EIG_FLOOR {
            return f64::INFINITY;
        }
    }
    s.max(0.0)
}
