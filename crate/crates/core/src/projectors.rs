//! Subgroup twirls `P_H(ρ) = ∫_H dh U_h(ρ)`.
//!
//! [`project`] evaluates each twirl in closed form. [`twirl_numeric`] sums a
//! [`QuadratureRule`] and is kept as an independent check.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::pauli::{pauli_trace_distance, PauliForm};
use crate::su2::{act, orthogonal_to, rotation_of, QuadratureRule, SubgroupDescriptor};

/// Weighted average of `act(h_k, pf)` over the nodes of `rule`.
pub fn twirl_numeric(h: &SubgroupDescriptor, pf: &PauliForm, rule: &QuadratureRule) -> Result<PauliForm> {
    if h.class() != rule.subgroup.class() || !h.same_subgroup(&rule.subgroup, 1e-10) {
        return Err(Error::MismatchedRule { rule: rule.subgroup.to_string(), target: h.to_string() });
    }
    let mut out = PauliForm::new(Vector3::zeros(), Vector3::zeros(), Matrix3::zeros());
    for (g, &w) in rule.nodes.iter().zip(&rule.weights) {
        let r = act(g, pf);
        out.a += r.a * w;
        out.b += r.b * w;
        out.t += r.t * w;
    }
    Ok(out)
}

/// Precomputes the rotations of a rule for repeated twirls.
pub fn rule_rotations(rule: &QuadratureRule) -> Vec<(Matrix3<f64>, f64)> {
    rule.nodes.iter().zip(&rule.weights).map(|(g, &w)| (rotation_of(g), w)).collect()
}

/// Closed-form `P_H`.
pub fn project(h: &SubgroupDescriptor, pf: &PauliForm) -> PauliForm {
    let zero = Vector3::zeros();
    match *h {
        SubgroupDescriptor::Z2 => *pf,
        SubgroupDescriptor::Z4 { axis: r } => {
            let p = Matrix3::identity() - r * r.transpose();
            let t = r * r.transpose() * (r.dot(&(pf.t * r))) + p * pf.t * p;
            PauliForm::new(r * r.dot(&pf.a), r * r.dot(&pf.b), t)
        }
        SubgroupDescriptor::U1 { axis: r } => {
            let rr = r * r.transpose();
            let p = Matrix3::identity() - rr;
            let c2 = orthogonal_to(&r);
            let c3 = r.cross(&c2);
            let sym = 0.5 * (p * pf.t * p).trace();
            let anti = 0.5 * (c2.dot(&(pf.t * c3)) - c3.dot(&(pf.t * c2)));
            let t = rr * r.dot(&(pf.t * r)) + p * sym + (c2 * c3.transpose() - c3 * c2.transpose()) * anti;
            PauliForm::new(r * r.dot(&pf.a), r * r.dot(&pf.b), t)
        }
        SubgroupDescriptor::K2 { frame } => {
            let mut t = Matrix3::zeros();
            for i in 0..3 {
                let ri = frame.column(i).into_owned();
                t += ri * ri.transpose() * ri.dot(&(pf.t * ri));
            }
            PauliForm::new(zero, zero, t)
        }
        SubgroupDescriptor::Kinf { axis: k, .. } => {
            let kk = k * k.transpose();
            let along = k.dot(&(pf.t * k));
            let t = kk * along + (Matrix3::identity() - kk) * (0.5 * (pf.t.trace() - along));
            PauliForm::new(zero, zero, t)
        }
        SubgroupDescriptor::SU2 => {
            // tr(SWAP ρ) = ½(1 + tr T) fixes the Werner parameter
            let tau = pf.t.trace() / 3.0;
            PauliForm::new(zero, zero, Matrix3::identity() * tau)
        }
    }
}

/// Trace distance between `pf` and `P_H(pf)`; zero exactly when `H ⊆ Iso(ρ)`.
pub fn fixed_point_residual(h: &SubgroupDescriptor, pf: &PauliForm) -> f64 {
    pauli_trace_distance(pf, &project(h, pf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Bell;
    use crate::su2::subgroup_quadrature;

    #[test]
    fn u1_keeps_rotation_invariant_block() {
        let xx = PauliForm::new(Vector3::zeros(), Vector3::zeros(), Matrix3::from_diagonal(&Vector3::new(1.0, 0.0, 0.0)));
        let out = project(&SubgroupDescriptor::u1(Vector3::z()), &xx);
        assert!((out.t - Matrix3::from_diagonal(&Vector3::new(0.5, 0.5, 0.0))).amax() < 1e-15);

        // antisymmetric X⊗Y − Y⊗X survives
        let mut t = Matrix3::zeros();
        t[(0, 1)] = 0.4;
        t[(1, 0)] = -0.2;
        let out = project(&SubgroupDescriptor::u1(Vector3::z()), &PauliForm::new(Vector3::zeros(), Vector3::zeros(), t));
        assert!((out.t[(0, 1)] - 0.3).abs() < 1e-15 && (out.t[(1, 0)] + 0.3).abs() < 1e-15);
    }

    #[test]
    fn k2_kills_bloch_vectors() {
        let pf = PauliForm::new(Vector3::new(0.3, 0.0, 0.0), Vector3::zeros(), Matrix3::zeros());
        let out = project(&SubgroupDescriptor::k2_standard(), &pf);
        assert_eq!(out.a, Vector3::zeros());
        let rule = subgroup_quadrature(&SubgroupDescriptor::k2_standard(), 16).unwrap();
        let num = twirl_numeric(&SubgroupDescriptor::k2_standard(), &pf, &rule).unwrap();
        assert!(num.a.norm() < 1e-16);
    }

    #[test]
    fn su2_of_phi_plus_is_werner() {
        let out = project(&SubgroupDescriptor::SU2, &PauliForm::bell(Bell::PhiPlus));
        assert!((out.t - Matrix3::identity() / 3.0).amax() < 1e-15);
        let out = project(&SubgroupDescriptor::SU2, &PauliForm::t_state([0.5, 0.2, -0.1]));
        assert!((out.t - Matrix3::identity() * 0.2).amax() < 1e-15);
    }

    #[test]
    fn residual_examples() {
        let mm = PauliForm::maximally_mixed();
        for h in [SubgroupDescriptor::Z2, SubgroupDescriptor::kinf(Vector3::y()), SubgroupDescriptor::SU2] {
            assert_eq!(fixed_point_residual(&h, &mm), 0.0);
        }
        let phi = PauliForm::bell(Bell::PhiPlus);
        assert!(fixed_point_residual(&SubgroupDescriptor::kinf_with(Vector3::y(), Vector3::z()), &phi) < 1e-15);
        // Δ = diag(2/3, −4/3, 2/3): Bell weights ¼(1 + Δ1 − Δ2 + Δ3) etc.
        let d = [2.0 / 3.0, -4.0 / 3.0, 2.0 / 3.0];
        let w = [
            0.25 * (d[0] - d[1] + d[2]),
            0.25 * (-d[0] + d[1] + d[2]),
            0.25 * (d[0] + d[1] - d[2]),
            0.25 * (-d[0] - d[1] - d[2]),
        ];
        let want = 0.5 * w.iter().map(|x: &f64| x.abs()).sum::<f64>();
        assert!((fixed_point_residual(&SubgroupDescriptor::SU2, &phi) - want).abs() < 1e-14);
        assert!((want - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn mismatched_rule_is_rejected() {
        let rule = subgroup_quadrature(&SubgroupDescriptor::u1(Vector3::z()), 16).unwrap();
        let err = twirl_numeric(&SubgroupDescriptor::u1(Vector3::x()), &PauliForm::maximally_mixed(), &rule);
        assert!(matches!(err, Err(Error::MismatchedRule { .. })));
    }
}
