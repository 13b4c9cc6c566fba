//! Randomised checks of the structural properties of isotropy.
//!
//! Each check draws `n_trials` random instances from its own ChaCha stream,
//! so a report is a pure function of `(seed, n_trials)`.

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channels::{channel_isotropy, random_symmetric_channel, QubitChannelPTM};
use crate::error::{Error, Result};
use crate::isotropy::{classify, Tolerance};
use crate::lattice::{leq, meet};
use crate::pauli::{compose, pauli_trace_distance, relative_entropy, PauliForm};
use crate::projectors::{fixed_point_residual, project};
use crate::sampling::{random_descriptor, random_rotation, random_state, random_state_in};
use crate::su2::{act, haar_element, orthogonal_to, random_unit_vector, GroupElement, SubgroupClass, SubgroupDescriptor};

/// Outcome of one property over all trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    /// Largest residual of a quantity that should vanish.
    pub worst_residual: f64,
    /// Smallest value of a quantity that should stay away from zero.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_witness: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub seed: u64,
    pub n_trials: usize,
    pub all_passed: bool,
    pub checks: Vec<LemmaCheck>,
}

/// Residual bound for quantities that vanish exactly.
pub const RESIDUAL_BOUND: f64 = 1e-8;
/// Lower bound for violation witnesses.
pub const WITNESS_BOUND: f64 = 1e-3;
/// Mixing weight for the zero-distance check.
pub const ZERO_DISTANCE_EPS: f64 = 1e-3;
/// Competitors per trial in the relative-entropy check.
pub const RELATIVE_ENTROPY_COMPETITORS: usize = 100;

struct Trial {
    ok: bool,
    residual: f64,
    witness: Option<f64>,
}

impl Trial {
    fn new(ok: bool, residual: f64) -> Self {
        Trial { ok, residual, witness: None }
    }
}

type CheckFn = fn(&mut ChaCha8Rng, &Tolerance) -> Trial;

/// Runs every check with `n_trials` random instances each.
pub fn verify_lemmas(seed: u64, n_trials: usize) -> Result<LemmaReport> {
    if n_trials == 0 {
        return Err(Error::InvalidParameter("n_trials must be at least 1".into()));
    }
    let tol = Tolerance::default();
    let checks: [(&str, CheckFn); 9] = [
        ("tensor_product_bound", tensor_trial),
        ("composition_bound", composition_trial),
        ("mixing_bound", mixing_trial),
        ("conjugation_covariance", conjugation_trial),
        ("symmetric_channel_monotonicity", monotonicity_trial),
        ("zero_distance_witness", zero_distance_trial),
        ("projector_idempotence", idempotence_trial),
        ("relative_entropy_minimality", relative_entropy_trial),
        ("normalizer_invariance", normalizer_trial),
    ];
    let mut out = Vec::new();
    for (stream, (name, f)) in checks.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream as u64 + 1);
        let mut failures = 0;
        let mut worst: f64 = 0.0;
        let mut witness: Option<f64> = None;
        for _ in 0..n_trials {
            let t = f(&mut rng, &tol);
            let residual_ok = t.residual <= RESIDUAL_BOUND;
            let witness_ok = t.witness.is_none_or(|w| w >= WITNESS_BOUND);
            if !(t.ok && residual_ok && witness_ok) {
                failures += 1;
            }
            worst = worst.max(t.residual);
            if let Some(w) = t.witness {
                witness = Some(witness.map_or(w, |m: f64| m.min(w)));
            }
        }
        out.push(LemmaCheck {
            name: name.to_string(),
            trials: n_trials,
            failures,
            worst_residual: worst,
            min_witness: witness,
            passed: failures == 0,
        });
    }
    Ok(LemmaReport { seed, n_trials, all_passed: out.iter().all(|c| c.passed), checks: out })
}

/// Distance of a channel embedding from the fixed set of `h`.
fn channel_residual(h: &SubgroupDescriptor, ch: &QubitChannelPTM) -> f64 {
    let pf = ch.as_pauli_form();
    let p = project(h, &pf);
    ((pf.a - p.a).norm_squared() + (pf.t - p.t).norm_squared()).sqrt()
}

fn axis_or_random(rng: &mut ChaCha8Rng, shared: &Vector3<f64>) -> Vector3<f64> {
    if rng.random_bool(0.5) {
        *shared
    } else {
        random_unit_vector(rng)
    }
}

fn random_channel(rng: &mut ChaCha8Rng, axis: &Vector3<f64>) -> QubitChannelPTM {
    let p = rng.random_range(0.05..0.95);
    let theta = rng.random_range(0.1..1.4);
    match rng.random_range(0..5) {
        0 => QubitChannelPTM::unitary_rotation(axis, theta),
        1 => QubitChannelPTM::dephasing(axis, p).expect("p in range"),
        2 => QubitChannelPTM::unitary_rotation(axis, theta)
            .mix(p, &QubitChannelPTM::state_preparation(axis, rng.random_range(0.1..1.0)).expect("p in range")),
        3 => QubitChannelPTM::depolarizing(p).expect("p in range"),
        _ => QubitChannelPTM::measurement(axis),
    }
}

fn meet_bound_channels(e: &QubitChannelPTM, f: &QubitChannelPTM, combined: &QubitChannelPTM, tol: &Tolerance) -> Trial {
    let reports = (channel_isotropy(e, tol), channel_isotropy(f, tol), channel_isotropy(combined, tol));
    match reports {
        (Ok(re), Ok(rf), Ok(rc)) => {
            let m = meet(&re.descriptor, &rf.descriptor);
            Trial::new(leq(&m, &rc.descriptor), channel_residual(&m, combined))
        }
        _ => Trial::new(false, f64::INFINITY),
    }
}

fn tensor_trial(rng: &mut ChaCha8Rng, tol: &Tolerance) -> Trial {
    let n = random_unit_vector(rng);
    let m = axis_or_random(rng, &n);
    let e = QubitChannelPTM::state_preparation(&n, rng.random_range(0.1..1.0)).expect("p in range");
    let f = QubitChannelPTM::state_preparation(&m, rng.random_range(0.1..1.0)).expect("p in range");
    // E⊗F always outputs the product of the prepared states
    let product = PauliForm::new(e.t, f.t, e.t * f.t.transpose());
    match (channel_isotropy(&e, tol), channel_isotropy(&f, tol), classify(&product, tol)) {
        (Ok(re), Ok(rf), Ok(rp)) => {
            let mt = meet(&re.descriptor, &rf.descriptor);
            Trial::new(leq(&mt, &rp.descriptor), fixed_point_residual(&mt, &product))
        }
        _ => Trial::new(false, f64::INFINITY),
    }
}

fn composition_trial(rng: &mut ChaCha8Rng, tol: &Tolerance) -> Trial {
    let n = random_unit_vector(rng);
    let m = axis_or_random(rng, &n);
    let e = random_channel(rng, &n);
    let f = random_channel(rng, &m);
    meet_bound_channels(&e, &f, &e.compose(&f), tol)
}

/// Descriptor of `class` built from a shared frame, so meets are nontrivial.
fn descriptor_in_frame(class: SubgroupClass, frame: &Matrix3<f64>) -> SubgroupDescriptor {
    let k = frame.column(0).into_owned();
    match class {
        SubgroupClass::Z2 => SubgroupDescriptor::Z2,
        SubgroupClass::Z4 => SubgroupDescriptor::z4(k),
        SubgroupClass::U1 => SubgroupDescriptor::u1(k),
        SubgroupClass::K2 => SubgroupDescriptor::k2(*frame),
        SubgroupClass::Kinf => SubgroupDescriptor::kinf_with(k, frame.column(1).into_owned()),
        SubgroupClass::SU2 => SubgroupDescriptor::SU2,
    }
}

fn random_class(rng: &mut ChaCha8Rng) -> SubgroupClass {
    SubgroupClass::ALL[rng.random_range(0..6)]
}

fn mixing_trial(rng: &mut ChaCha8Rng, tol: &Tolerance) -> Trial {
    let frame = random_rotation(rng);
    let h1 = descriptor_in_frame(random_class(rng), &frame);
    let h2 = descriptor_in_frame(random_class(rng), &frame);
    let r1 = random_state_in(rng, &h1);
    let r2 = random_state_in(rng, &h2);
    let p = rng.random_range(0.05..0.95);
    let mix = r1.mix(p, &r2);
    let state = match (classify(&r1, tol), classify(&r2, tol), classify(&mix, tol)) {
        (Ok(a), Ok(b), Ok(c)) => {
            let m = meet(&a.descriptor, &b.descriptor);
            Trial::new(leq(&m, &c.descriptor), fixed_point_residual(&m, &mix))
        }
        _ => Trial::new(false, f64::INFINITY),
    };
    let n = frame.column(0).into_owned();
    let m = axis_or_random(rng, &n);
    let e = random_channel(rng, &n);
    let f = random_channel(rng, &m);
    let q = rng.random_range(0.05..0.95);
    let chan = meet_bound_channels(&e, &f, &e.mix(q, &f), tol);
    Trial::new(state.ok && chan.ok, state.residual.max(chan.residual))
}

fn conjugation_trial(rng: &mut ChaCha8Rng, tol: &Tolerance) -> Trial {
    let class = random_class(rng);
    let h = random_descriptor(rng, class);
    let pf = random_state_in(rng, &h);
    let g = haar_element(rng);
    let r = crate::su2::rotation_of(&g);
    let state = match (classify(&pf, tol), classify(&act(&g, &pf), tol)) {
        (Ok(a), Ok(b)) => {
            let want = a.descriptor.rotated(&r);
            Trial::new(b.descriptor.same_subgroup(&want, 1e-8), axis_mismatch(&b.descriptor, &want))
        }
        _ => Trial::new(false, f64::INFINITY),
    };
    let axis = random_unit_vector(rng);
    let ch = random_channel(rng, &axis);
    let chan = match (channel_isotropy(&ch, tol), channel_isotropy(&ch.conjugate(&g), tol)) {
        (Ok(a), Ok(b)) => {
            let want = a.descriptor.rotated(&r);
            Trial::new(b.descriptor.same_subgroup(&want, 1e-8), axis_mismatch(&b.descriptor, &want))
        }
        _ => Trial::new(false, f64::INFINITY),
    };
    Trial::new(state.ok && chan.ok, state.residual.max(chan.residual))
}

/// `min_± |u ∓ v|` over the distinguished axes, zero for axis-free classes.
fn axis_mismatch(x: &SubgroupDescriptor, y: &SubgroupDescriptor) -> f64 {
    if x.class() != y.class() {
        return f64::INFINITY;
    }
    let d = |u: &Vector3<f64>, v: &Vector3<f64>| (u - v).norm().min((u + v).norm());
    match (x.axis(), y.axis(), x.frame(), y.frame()) {
        (Some(u), Some(v), _, _) => d(&u, &v),
        (_, _, Some(f), Some(g)) => (0..3)
            .map(|i| (0..3).map(|j| d(&f.column(i).into_owned(), &g.column(j).into_owned())).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max),
        _ => 0.0,
    }
}

fn monotonicity_trial(rng: &mut ChaCha8Rng, tol: &Tolerance) -> Trial {
    let class = random_class(rng);
    let h = random_descriptor(rng, class);
    let pf = random_state_in(rng, &h);
    let (ch, covariance) = random_symmetric_channel(rng);
    let out = ch.apply(&pf);
    match (classify(&pf, tol), classify(&out, tol)) {
        (Ok(a), Ok(b)) => Trial::new(
            leq(&a.descriptor, &b.descriptor) && compose(&out).is_ok(),
            fixed_point_residual(&a.descriptor, &out).max(covariance),
        ),
        _ => Trial::new(false, f64::INFINITY),
    }
}

fn zero_distance_trial(rng: &mut ChaCha8Rng, tol: &Tolerance) -> Trial {
    let c1 = random_class(rng);
    let c2 = loop {
        let c = random_class(rng);
        if c != c1 {
            break c;
        }
    };
    let h1 = random_descriptor(rng, c1);
    let h2 = random_descriptor(rng, c2);
    let s1 = random_state_in(rng, &h1).scaled(ZERO_DISTANCE_EPS);
    let s2 = random_state_in(rng, &h2).scaled(ZERO_DISTANCE_EPS);
    let dist = pauli_trace_distance(&s1, &s2);
    match (classify(&s1, tol), classify(&s2, tol)) {
        (Ok(a), Ok(b)) => Trial::new(
            a.descriptor.same_subgroup(&h1, 1e-8) && b.descriptor.same_subgroup(&h2, 1e-8) && dist <= ZERO_DISTANCE_EPS,
            fixed_point_residual(&h1, &s1).max(fixed_point_residual(&h2, &s2)),
        ),
        _ => Trial::new(false, f64::INFINITY),
    }
}

fn idempotence_trial(rng: &mut ChaCha8Rng, _tol: &Tolerance) -> Trial {
    let class = random_class(rng);
    let h = random_descriptor(rng, class);
    let x = random_state(rng);
    let y = random_state(rng);
    let px = project(&h, &x);
    let idem = project(&h, &px).max_abs_diff(&px);
    let adjoint = (px.dot(&y) - x.dot(&project(&h, &y))).abs();
    Trial::new(compose(&px).is_ok(), idem.max(adjoint))
}

fn relative_entropy_trial(rng: &mut ChaCha8Rng, _tol: &Tolerance) -> Trial {
    let class = random_class(rng);
    let h = random_descriptor(rng, class);
    let rho_pf = random_state(rng);
    let (Ok(rho), Ok(p_rho)) = (compose(&rho_pf), compose(&project(&h, &rho_pf))) else {
        return Trial::new(false, f64::INFINITY);
    };
    let best = relative_entropy(&rho, &p_rho);
    let mut violation: f64 = 0.0;
    for _ in 0..RELATIVE_ENTROPY_COMPETITORS {
        let sigma = compose(&random_state_in(rng, &h)).expect("twirls of states are states");
        violation = violation.max(best - relative_entropy(&rho, &sigma));
    }
    Trial::new(best.is_finite(), violation.max(0.0))
}

/// An element normalising `h`.
fn normalizer_element(rng: &mut ChaCha8Rng, h: &SubgroupDescriptor) -> GroupElement {
    match *h {
        SubgroupDescriptor::Z4 { axis } | SubgroupDescriptor::U1 { axis } | SubgroupDescriptor::Kinf { axis, .. } => {
            let g = GroupElement::exp(&axis, rng.random_range(0.0..std::f64::consts::TAU));
            if rng.random_bool(0.5) {
                let u = orthogonal_to(&axis);
                let u = crate::sampling::rotation_about(&axis, rng.random_range(0.0..std::f64::consts::TAU)) * u;
                GroupElement::pi_about(&u).mul(&g)
            } else {
                g
            }
        }
        SubgroupDescriptor::K2 { frame } => {
            // quarter turns about frame axes generate the frame's signed permutations
            let mut g = GroupElement::identity();
            for _ in 0..rng.random_range(1..5) {
                let r = frame.column(rng.random_range(0..3)).into_owned();
                g = GroupElement::exp(&r, std::f64::consts::FRAC_PI_4).mul(&g);
            }
            g
        }
        SubgroupDescriptor::Z2 | SubgroupDescriptor::SU2 => haar_element(rng),
    }
}

fn conjugated_projection(g: &GroupElement, h: &SubgroupDescriptor, pf: &PauliForm) -> PauliForm {
    act(g, &project(h, &act(&g.inverse(), pf)))
}

fn normalizer_trial(rng: &mut ChaCha8Rng, _tol: &Tolerance) -> Trial {
    let class = random_class(rng);
    let h = random_descriptor(rng, class);
    let g = normalizer_element(rng, &h);
    let x = random_state(rng);
    let invariance = conjugated_projection(&g, &h, &x).max_abs_diff(&project(&h, &x));
    let normal = matches!(h, SubgroupDescriptor::Z2 | SubgroupDescriptor::SU2);
    let witness = if normal {
        None
    } else {
        // a fixed point of h with distinct weights along a frame adapted to h
        let frame = match h {
            SubgroupDescriptor::K2 { frame } => frame,
            _ => {
                let k = h.axis().expect("axial class");
                let u = orthogonal_to(&k);
                Matrix3::from_columns(&[k, u, k.cross(&u)])
            }
        };
        let t = frame * Matrix3::from_diagonal(&Vector3::new(0.5, 0.2, -0.1)) * frame.transpose();
        let w = project(&h, &PauliForm::new(Vector3::zeros(), Vector3::zeros(), t));
        // a rotation moving every frame axis off itself
        let off = GroupElement::exp(&(frame * Vector3::new(1.0, 0.7, 0.4)).normalize(), 0.6);
        Some(conjugated_projection(&off, &h, &w).max_abs_diff(&project(&h, &w)))
    };
    Trial { ok: true, residual: invariance, witness }
}
