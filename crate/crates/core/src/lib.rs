//! Residual symmetry of two-qubit states and qubit channels under the
//! collective action `ρ ↦ (U⊗U) ρ (U⊗U)†` of SU(2).
//!
//! Every two-qubit state has one of six isotropy subgroups, ordered as
//! `Z2 ⊂ Z4 ⊂ {U1, K2} ⊂ Kinf ⊂ SU2`. [`classify`] finds it exactly (up to a
//! tolerance); [`smoothed_classify`] finds the largest one within a trace
//! distance ball; [`project`] is the twirl onto the states a subgroup fixes.
//!
//! ```
//! use isolab::{classify, Bell, PauliForm, SubgroupClass, Tolerance};
//!
//! let singlet = PauliForm::bell(Bell::PsiMinus);
//! let report = classify(&singlet, &Tolerance::default()).unwrap();
//! assert_eq!(report.class(), SubgroupClass::SU2);
//!
//! let phi_plus = PauliForm::bell(Bell::PhiPlus);
//! let report = classify(&phi_plus, &Tolerance::default()).unwrap();
//! assert_eq!(report.class(), SubgroupClass::Kinf);
//! ```

pub mod channels;
pub mod error;
pub mod io;
pub mod isotropy;
pub mod lattice;
pub mod lemmas;
pub mod optimize;
pub mod pauli;
pub mod projectors;
pub mod sampling;
pub mod scan;
pub mod su2;

pub use channels::{
    channel_isotropy, noisy_channel, ptm_from_kraus, random_symmetric_channel, simulation_gate, QubitChannelPTM,
    SymmetricChannel, Verdict,
};
pub use error::{Error, Result};
pub use isotropy::{
    classify, continuous_stabilizer, discrete_pi_axes, smoothed_classify, IsotropyReport, OrbitShape, PiAxes, Tolerance,
};
pub use lattice::{in_hat_c, join_class, leq, meet, LatticeClass};
pub use pauli::{
    canonical_form, compose, decompose, relative_entropy, trace_distance, Bell, CanonicalForm, DensityMatrix4,
    PauliForm,
};
pub use projectors::{fixed_point_residual, project, twirl_numeric};
pub use su2::{
    act, haar_sample, rotation_of, subgroup_quadrature, GroupElement, QuadratureRule, SubgroupClass,
    SubgroupDescriptor,
};
