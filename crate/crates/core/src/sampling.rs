//! Random states, subgroups and operators for tests and property suites.

use nalgebra::{Matrix3, Rotation3, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::pauli::{decompose, DensityMatrix4, Matrix4c, PauliForm, C64};
use crate::projectors::project;
use crate::su2::{random_unit_vector, SubgroupClass, SubgroupDescriptor};

/// Ginibre state `G G† / tr(G G†)` with `G` a 4×4 complex Gaussian matrix.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix4 {
    let g = Matrix4c::from_fn(|_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let m = g * g.adjoint();
    let tr = m.trace().re;
    let mut m = m.unscale(tr);
    // exact Hermiticity
    m = (m + m.adjoint()) * C64::new(0.5, 0.0);
    DensityMatrix4::new(m).expect("Ginibre matrices are states")
}

pub fn random_state<R: Rng + ?Sized>(rng: &mut R) -> PauliForm {
    decompose(&random_density_matrix(rng))
}

/// Haar-random rotation matrix.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Matrix3<f64> {
    crate::su2::rotation_of(&crate::su2::haar_element(rng))
}

/// A random subgroup of the given class.
pub fn random_descriptor<R: Rng + ?Sized>(rng: &mut R, class: SubgroupClass) -> SubgroupDescriptor {
    match class {
        SubgroupClass::Z2 => SubgroupDescriptor::Z2,
        SubgroupClass::SU2 => SubgroupDescriptor::SU2,
        SubgroupClass::Z4 => SubgroupDescriptor::z4(random_unit_vector(rng)),
        SubgroupClass::U1 => SubgroupDescriptor::u1(random_unit_vector(rng)),
        SubgroupClass::Kinf => {
            let k = random_unit_vector(rng);
            let u = random_unit_vector(rng);
            SubgroupDescriptor::kinf_with(k, u)
        }
        SubgroupClass::K2 => SubgroupDescriptor::k2(random_rotation(rng)),
    }
}

/// `P_H(ρ)` for a Ginibre `ρ`: generically a state whose isotropy is exactly `H`.
pub fn random_state_in<R: Rng + ?Sized>(rng: &mut R, h: &SubgroupDescriptor) -> PauliForm {
    project(h, &random_state(rng))
}

/// A random state of the given class, with its subgroup.
pub fn random_state_in_class<R: Rng + ?Sized>(rng: &mut R, class: SubgroupClass) -> (PauliForm, SubgroupDescriptor) {
    let h = random_descriptor(rng, class);
    (random_state_in(rng, &h), h)
}

/// Random Hermitian 4×4 matrix with entries of order one.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R) -> Matrix4c {
    let g = Matrix4c::from_fn(|_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    (g + g.adjoint()) * C64::new(0.5, 0.0)
}

/// Random Pauli triple with entries uniform in `[-s, s]` (not necessarily a state).
pub fn random_pauli_form<R: Rng + ?Sized>(rng: &mut R, s: f64) -> PauliForm {
    let mut f = || rng.random_range(-s..s);
    PauliForm::new(
        Vector3::new(f(), f(), f()),
        Vector3::new(f(), f(), f()),
        Matrix3::new(f(), f(), f(), f(), f(), f(), f(), f(), f()),
    )
}

/// Rotation by `angle` about `axis`.
pub fn rotation_about(axis: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    Rotation3::from_scaled_axis(axis.normalize() * angle).into_inner()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isotropy::{classify, Tolerance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn states_in_class_have_that_class() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for class in SubgroupClass::ALL {
            for _ in 0..20 {
                let (pf, h) = random_state_in_class(&mut rng, class);
                crate::pauli::compose(&pf).unwrap();
                let r = classify(&pf, &Tolerance::default()).unwrap();
                assert!(r.descriptor.same_subgroup(&h, 1e-8), "{class}: got {}", r.descriptor);
            }
        }
    }
}
