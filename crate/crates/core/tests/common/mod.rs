//! Oracles shared by the integration tests. Each one recomputes a quantity
//! the library also computes, by a route that does not reuse it.
#![allow(dead_code)]

use isolab::optimize::minimize_on_sphere;
use isolab::pauli::{hermitian_eigenvalues, Matrix4c, C64};
use isolab::su2::{act_rotation, haar_element, rotation_of};
use isolab::{Bell, GroupElement, PauliForm, SubgroupDescriptor};
use nalgebra::{Matrix3, SMatrix, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Relative size of `act(g, ρ) − ρ`.
pub fn action_residual(r: &Matrix3<f64>, pf: &PauliForm) -> f64 {
    let moved = act_rotation(r, pf);
    moved.max_abs_diff(pf) / pf.scale().max(1e-300)
}

/// Rotation by `angle` about the unit `axis` (Rodrigues), independent of
/// the quaternion map.
pub fn rodrigues(axis: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    let k = axis.normalize();
    let kx = k.cross_matrix();
    Matrix3::identity() + kx * angle.sin() + kx * kx * (1.0 - angle.cos())
}

/// Dimension of the stabilizer found by sampling.
///
/// Dimension 3 when every sampled element fixes the state. Otherwise the
/// sampled rotation axes seed a search for an axis whose rotation by a
/// generic angle (which generates a dense subgroup of the circle) fixes
/// the state.
pub fn brute_force_stabilizer_dim(pf: &PauliForm, sample: &[GroupElement], threshold: f64) -> usize {
    if pf.scale() < 1e-12 {
        return 3;
    }
    let everything_fixes = sample.iter().all(|g| action_residual(&rotation_of(g), pf) < threshold);
    if everything_fixes {
        return 3;
    }
    const GENERIC: f64 = 2.2;
    let f = |r: &Vector3<f64>| action_residual(&rodrigues(r, GENERIC), pf);
    let mut scored: Vec<(f64, Vector3<f64>)> = sample
        .iter()
        .filter(|g| g.v.norm() > 1e-9)
        .map(|g| {
            let r = g.v.normalize();
            (f(&r), r)
        })
        .collect();
    scored.sort_by(|x, y| x.0.total_cmp(&y.0));
    let best = scored.iter().take(8).map(|(_, r)| minimize_on_sphere(f, r).1).fold(f64::INFINITY, f64::min);
    if best < threshold {
        1
    } else {
        0
    }
}

/// Haar moments `E[R]` and `E[R⊗R]` (row-major `vec(T)` indices) by Monte Carlo.
pub struct HaarMoments {
    pub first: Matrix3<f64>,
    pub second: SMatrix<f64, 9, 9>,
}

pub fn haar_moments(n: usize, seed: u64) -> HaarMoments {
    let mut rng = rng(seed);
    let mut first = Matrix3::zeros();
    let mut second = SMatrix::<f64, 9, 9>::zeros();
    for _ in 0..n {
        let r = rotation_of(&haar_element(&mut rng));
        first += r;
        for (i, j, k, l) in index4() {
            second[(3 * i + j, 3 * k + l)] += r[(i, k)] * r[(j, l)];
        }
    }
    HaarMoments { first: first / n as f64, second: second / n as f64 }
}

fn index4() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..81).map(|n| (n / 27, (n / 9) % 3, (n / 3) % 3, n % 3))
}

impl HaarMoments {
    /// Monte Carlo twirl: `a ↦ E[R] a`, `T ↦ E[R T Rᵀ]`.
    pub fn twirl(&self, pf: &PauliForm) -> PauliForm {
        let vt = SMatrix::<f64, 9, 1>::from_fn(|n, _| pf.t[(n / 3, n % 3)]);
        let out = self.second * vt;
        PauliForm::new(self.first * pf.a, self.first * pf.b, Matrix3::from_fn(|i, j| out[3 * i + j]))
    }
}

/// Trace distance of two Bell-diagonal states from their Bell weights.
///
/// Bell-diagonal states commute, so the distance is half the ℓ1 distance
/// of the eigenvalues `λ_b = ¼(1 + Σ_i τ_i t_i(b))`.
pub fn bell_diagonal_distance(t1: [f64; 3], t2: [f64; 3]) -> f64 {
    Bell::ALL
        .iter()
        .map(|b| {
            let t = b.taus();
            (0..3).map(|i| (t1[i] - t2[i]) * t[i]).sum::<f64>().abs() / 4.0
        })
        .sum::<f64>()
        / 2.0
}

/// Hermitian-linear extension of a map on Pauli forms to a 4×4 matrix.
pub fn extend_linear(map: &dyn Fn(&PauliForm) -> PauliForm, m: &Matrix4c) -> Matrix4c {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let anti = (m - m.adjoint()) * C64::new(0.0, -0.5);
    let apply = |h: &Matrix4c| map(&PauliForm::from_matrix(h)).to_matrix_with_identity(h.trace().re);
    apply(&herm) + apply(&anti) * C64::new(0.0, 1.0)
}

/// Smallest eigenvalue of the 16×16 Choi matrix of a projector.
pub fn choi_min_eigenvalue(h: &SubgroupDescriptor) -> f64 {
    let map = |pf: &PauliForm| isolab::project(h, pf);
    let mut choi = SMatrix::<C64, 16, 16>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let mut e = Matrix4c::zeros();
            e[(i, j)] = C64::new(1.0, 0.0);
            let out = extend_linear(&map, &e);
            for r in 0..4 {
                for c in 0..4 {
                    choi[(4 * i + r, 4 * j + c)] = out[(r, c)];
                }
            }
        }
    }
    choi.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Hilbert–Schmidt inner product of Hermitian matrices.
pub fn hs(x: &Matrix4c, y: &Matrix4c) -> f64 {
    (x.adjoint() * y).trace().re
}

pub fn min_eigenvalue(pf: &PauliForm) -> f64 {
    hermitian_eigenvalues(&pf.to_matrix())[0]
}
