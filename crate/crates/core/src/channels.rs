//! Single-qubit channels in Pauli-transfer form, their isotropy under
//! conjugation `E ↦ U_g ∘ E ∘ U_g⁻¹`, and two-qubit symmetric operations.
//!
//! A channel acts on Bloch vectors as `r ↦ Λ r + t`.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isotropy::{classify, IsotropyReport, Tolerance};
use crate::lattice::leq;
use crate::pauli::{hermitian_eigenvalues, max_modulus, paulis, swap_operator, Matrix2c, Matrix4c, PauliForm, C64};
use crate::projectors::project;
use crate::su2::{act_matrix, haar_element, rotation_of, GroupElement, SubgroupDescriptor};

/// Tolerance on `Σ K†K = 1`.
pub const TOL_TRACE_PRESERVING: f64 = 1e-10;

/// Affine Bloch representation `(Λ, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitChannelPTM {
    pub lambda: Matrix3<f64>,
    pub t: Vector3<f64>,
}

impl QubitChannelPTM {
    /// Checks complete positivity through the Choi matrix.
    pub fn new(lambda: Matrix3<f64>, t: Vector3<f64>) -> Result<Self> {
        let ch = Self { lambda, t };
        let min = hermitian_eigenvalues(&ch.choi())[0];
        if min < crate::pauli::TOL_PSD {
            return Err(Error::InvalidParameter(format!("not completely positive: Choi eigenvalue {min:e}")));
        }
        Ok(ch)
    }

    pub fn identity() -> Self {
        Self { lambda: Matrix3::identity(), t: Vector3::zeros() }
    }

    /// `ρ ↦ p ρ + (1 − p) 1/2`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        if !(-1.0 / 3.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("depolarizing p = {p} outside [-1/3, 1]")));
        }
        Ok(Self { lambda: Matrix3::identity() * p, t: Vector3::zeros() })
    }

    /// Conjugation by `exp(−iθ n·σ)`: a rotation of the Bloch ball by `2θ` about `n`.
    pub fn unitary_rotation(n: &Vector3<f64>, theta: f64) -> Self {
        let g = GroupElement::exp(n, -theta);
        Self { lambda: rotation_of(&g), t: Vector3::zeros() }
    }

    /// Projective measurement along `n` with the outcome discarded.
    pub fn measurement(n: &Vector3<f64>) -> Self {
        let n = n.normalize();
        Self { lambda: n * n.transpose(), t: Vector3::zeros() }
    }

    /// Dephasing along `n`: transverse components scaled by `p`.
    pub fn dephasing(n: &Vector3<f64>, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("dephasing p = {p} outside [0, 1]")));
        }
        let n = n.normalize();
        let nn = n * n.transpose();
        Ok(Self { lambda: Matrix3::identity() * p + nn * (1.0 - p), t: Vector3::zeros() })
    }

    /// Replaces every input by the state with Bloch vector `p n`.
    pub fn state_preparation(n: &Vector3<f64>, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("preparation purity {p} outside [0, 1]")));
        }
        Ok(Self { lambda: Matrix3::zeros(), t: n.normalize() * p })
    }

    /// Image of a Bloch vector.
    pub fn apply_bloch(&self, r: &Vector3<f64>) -> Vector3<f64> {
        self.lambda * r + self.t
    }

    /// Image of an arbitrary 2×2 operator.
    pub fn apply(&self, m: &Matrix2c) -> Matrix2c {
        let p = paulis();
        let tr = m.trace();
        let r = Vector3::from_fn(|i, _| (m * p[i + 1]).trace());
        let mut out = p[0] * (tr * 0.5);
        for i in 0..3 {
            let mut coef = tr * self.t[i];
            for j in 0..3 {
                coef += r[j] * self.lambda[(i, j)];
            }
            out += p[i + 1] * (coef * 0.5);
        }
        out
    }

    /// `J = Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|)`.
    pub fn choi(&self) -> Matrix4c {
        let mut j = Matrix4c::zeros();
        for a in 0..2 {
            for b in 0..2 {
                let mut e = Matrix2c::zeros();
                e[(a, b)] = C64::new(1.0, 0.0);
                let img = self.apply(&e);
                for r in 0..2 {
                    for c in 0..2 {
                        j[(2 * a + r, 2 * b + c)] = img[(r, c)];
                    }
                }
            }
        }
        j
    }

    /// `U_g ∘ E ∘ U_g⁻¹`.
    pub fn conjugate(&self, g: &GroupElement) -> Self {
        let r = rotation_of(g);
        Self { lambda: r * self.lambda * r.transpose(), t: r * self.t }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &QubitChannelPTM) -> Self {
        Self { lambda: self.lambda * other.lambda, t: self.lambda * other.t + self.t }
    }

    /// `p self + (1 − p) other`.
    pub fn mix(&self, p: f64, other: &QubitChannelPTM) -> Self {
        Self { lambda: self.lambda * p + other.lambda * (1.0 - p), t: self.t * p + other.t * (1.0 - p) }
    }

    /// The triple `(a, b, T) = (t, 0, Λ)` that has the same stabilizer.
    pub fn as_pauli_form(&self) -> PauliForm {
        PauliForm::new(self.t, Vector3::zeros(), self.lambda)
    }
}

/// Pauli transfer matrix of `ρ ↦ Σ K ρ K†`.
pub fn ptm_from_kraus(kraus: &[Matrix2c]) -> Result<QubitChannelPTM> {
    let p = paulis();
    let sum: Matrix2c = kraus.iter().map(|k| k.adjoint() * k).sum();
    let dev = (sum - p[0]).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if kraus.is_empty() || dev > TOL_TRACE_PRESERVING {
        return Err(Error::NotTracePreserving(if kraus.is_empty() { 1.0 } else { dev }));
    }
    let image = |m: &Matrix2c| -> Matrix2c { kraus.iter().map(|k| k * m * k.adjoint()).sum() };
    let e1 = image(&p[0]);
    let t = Vector3::from_fn(|i, _| 0.5 * (p[i + 1] * e1).trace().re);
    let mut lambda = Matrix3::zeros();
    for j in 0..3 {
        let ej = image(&p[j + 1]);
        for i in 0..3 {
            lambda[(i, j)] = 0.5 * (p[i + 1] * ej).trace().re;
        }
    }
    Ok(QubitChannelPTM { lambda, t })
}

/// Isotropy of a channel under conjugation, via the `(t, 0, Λ)` embedding.
pub fn channel_isotropy(ch: &QubitChannelPTM, tol: &Tolerance) -> Result<IsotropyReport> {
    classify(&ch.as_pauli_form(), tol)
}

/// `(1 − ε) E + ε D` with `D` the completely depolarizing channel.
pub fn noisy_channel(ch: &QubitChannelPTM, eps: f64) -> Result<QubitChannelPTM> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!("eps = {eps} outside [0, 1]")));
    }
    Ok(QubitChannelPTM { lambda: ch.lambda * (1.0 - eps), t: ch.t * (1.0 - eps) })
}

/// Outcome of the superselection test `Iso(σ) ⊆ Iso(E)`.
///
/// `Allowed` only means the necessary condition holds; it does not certify
/// that a simulation protocol exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Allowed,
    RuledOut,
}

/// `RuledOut` iff the resource's isotropy is not contained in the channel's.
pub fn simulation_gate(sigma: &IsotropyReport, channel: &IsotropyReport) -> Verdict {
    if leq(&sigma.descriptor, &channel.descriptor) {
        Verdict::Allowed
    } else {
        Verdict::RuledOut
    }
}

/// A two-qubit operation commuting with every `U⊗U`: a convex mixture of
/// identity, SWAP conjugation, conjugation by `exp(iθ SWAP)`, the SU(2)
/// twirl, and partial twirling `(1 − q)ρ + q P_SU2(ρ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricChannel {
    pub weights: [f64; 5],
    pub theta: f64,
    pub q: f64,
}

impl SymmetricChannel {
    pub fn new(weights: [f64; 5], theta: f64, q: f64) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|&w| w < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("mixture weights must be nonnegative and sum to 1".into()));
        }
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidParameter(format!("q = {q} outside [0, 1]")));
        }
        Ok(Self { weights, theta, q })
    }

    /// Image of an arbitrary 4×4 operator.
    pub fn apply_matrix(&self, m: &Matrix4c) -> Matrix4c {
        let s = swap_operator();
        let v = Matrix4c::identity() * C64::new(self.theta.cos(), 0.0) + s * C64::new(0.0, self.theta.sin());
        let twirled = su2_twirl_matrix(m);
        let w = self.weights;
        m * C64::from(w[0])
            + s * m * s * C64::from(w[1])
            + v * m * v.adjoint() * C64::from(w[2])
            + twirled * C64::from(w[3])
            + (m * C64::from(1.0 - self.q) + twirled * C64::from(self.q)) * C64::from(w[4])
    }

    pub fn apply(&self, pf: &PauliForm) -> PauliForm {
        PauliForm::from_matrix(&self.apply_matrix(&pf.to_matrix()))
    }

    /// `max ‖E(U ρ U†) − U E(ρ) U†‖` over `n` Haar-random `g` and random Hermitian inputs.
    pub fn covariance_residual<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for _ in 0..n {
            let g = haar_element(rng);
            let h = crate::sampling::random_hermitian(rng);
            let lhs = self.apply_matrix(&act_matrix(&g, &h));
            let rhs = act_matrix(&g, &self.apply_matrix(&h));
            worst = worst.max(max_modulus(&(lhs - rhs)));
        }
        worst
    }
}

/// SU(2) twirl of an arbitrary operator (trace kept, Pauli part projected).
pub fn su2_twirl_matrix(m: &Matrix4c) -> Matrix4c {
    let pf = PauliForm::from_matrix(m);
    let proj = project(&SubgroupDescriptor::SU2, &pf);
    let tr = m.trace();
    proj.to_matrix_with_identity(0.0) + Matrix4c::identity() * (tr * 0.25)
}

/// A random symmetric channel together with its measured covariance residual.
pub fn random_symmetric_channel<R: Rng + ?Sized>(rng: &mut R) -> (SymmetricChannel, f64) {
    let raw: [f64; 5] = std::array::from_fn(|_| -rng.random_range(f64::EPSILON..1.0f64).ln());
    let total: f64 = raw.iter().sum();
    let weights = raw.map(|w| w / total);
    let ch = SymmetricChannel {
        weights,
        theta: rng.random_range(0.0..std::f64::consts::TAU),
        q: rng.random_range(0.0..1.0),
    };
    let residual = ch.covariance_residual(rng, 10);
    (ch, residual)
}
