//! Derivative-free local search and sphere sampling for the smoothed classifier.

use std::collections::BTreeMap;

use nalgebra::{Matrix3, Rotation3, Vector3};

use crate::su2::sign_normalize;

/// Result of a local minimisation.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Nelder–Mead simplex search from `x0` with initial edge length `step`.
///
/// Stops after `max_evals` evaluations or once the spread of simplex values
/// drops below `ftol`.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], step: f64, max_evals: usize, ftol: f64) -> Minimum {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    let mut evals = n + 1;

    while evals < max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        if values[n] - values[0] <= ftol {
            break;
        }

        let centroid: Vec<f64> = (0..n).map(|d| simplex[..n].iter().map(|p| p[d]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|d| centroid[d] + t * (simplex[n][d] - centroid[d])).collect() };

        let xr = along(-1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let x = along(-0.5);
            let v = f(&x);
            (x, v)
        } else {
            let x = along(0.5);
            let v = f(&x);
            (x, v)
        };
        evals += 1;
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        for i in 1..=n {
            let p: Vec<f64> = (0..n).map(|d| simplex[0][d] + 0.5 * (simplex[i][d] - simplex[0][d])).collect();
            values[i] = f(&p);
            simplex[i] = p;
        }
        evals += n;
    }
    let best = (0..=n).min_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap_or(0);
    Minimum { x: simplex[best].clone(), value: values[best], evaluations: evals }
}

/// Minimises `f` over unit vectors starting at `k0`, in tangent coordinates,
/// with a coarse then a fine Nelder–Mead stage.
pub fn minimize_on_sphere<F: FnMut(&Vector3<f64>) -> f64>(mut f: F, k0: &Vector3<f64>) -> (Vector3<f64>, f64) {
    let mut k = k0.normalize();
    let mut best = f(&k);
    for (step, evals) in [(0.05, 120), (0.005, 120)] {
        let e1 = crate::su2::orthogonal_to(&k);
        let e2 = k.cross(&e1);
        let base = k;
        let chart = |x: &[f64]| (base + e1 * x[0] + e2 * x[1]).normalize();
        let m = nelder_mead(|x| f(&chart(x)), &[0.0, 0.0], step, evals, 1e-16);
        if m.value <= best {
            best = m.value;
            k = chart(&m.x);
        }
    }
    (k, best)
}

/// Minimises `f` over rotations of the frame `f0` (columns), parametrised by a
/// rotation vector, in two Nelder–Mead stages.
pub fn minimize_on_frames<F: FnMut(&Matrix3<f64>) -> f64>(mut f: F, f0: &Matrix3<f64>) -> (Matrix3<f64>, f64) {
    let mut frame = *f0;
    let mut best = f(&frame);
    for (step, evals) in [(0.05, 200), (0.005, 200)] {
        let base = frame;
        let chart = |x: &[f64]| Rotation3::from_scaled_axis(Vector3::new(x[0], x[1], x[2])).into_inner() * base;
        let m = nelder_mead(|x| f(&chart(x)), &[0.0, 0.0, 0.0], step, evals, 1e-16);
        if m.value <= best {
            best = m.value;
            frame = chart(&m.x);
        }
    }
    (frame, best)
}

/// Vertices of the geodesic icosphere with `frequency` subdivisions per
/// icosahedron edge: `10 f² + 2` unit vectors.
pub fn icosphere(frequency: usize) -> Vec<Vector3<f64>> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let verts: Vec<Vector3<f64>> = raw.iter().map(|v| Vector3::from(*v).normalize()).collect();
    let faces = [
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    let f = frequency.max(1);
    let mut seen: BTreeMap<[i64; 3], Vector3<f64>> = BTreeMap::new();
    for face in faces {
        let (a, b, c) = (verts[face[0]], verts[face[1]], verts[face[2]]);
        for i in 0..=f {
            for j in 0..=(f - i) {
                let k = f - i - j;
                let p = (a * i as f64 + b * j as f64 + c * k as f64).normalize();
                let key = [(p[0] * 1e9).round() as i64, (p[1] * 1e9).round() as i64, (p[2] * 1e9).round() as i64];
                seen.entry(key).or_insert(p);
            }
        }
    }
    seen.into_values().collect()
}

/// One representative of each antipodal pair of icosphere vertices.
pub fn icosphere_hemisphere(frequency: usize) -> Vec<Vector3<f64>> {
    let mut seen: BTreeMap<[i64; 3], Vector3<f64>> = BTreeMap::new();
    for p in icosphere(frequency) {
        let q = sign_normalize(&p);
        let key = [(q[0] * 1e9).round() as i64, (q[1] * 1e9).round() as i64, (q[2] * 1e9).round() as i64];
        seen.entry(key).or_insert(q);
    }
    seen.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosphere_counts() {
        assert_eq!(icosphere(1).len(), 12);
        assert_eq!(icosphere(9).len(), 812);
        assert_eq!(icosphere_hemisphere(9).len(), 406);
        assert!(icosphere(9).iter().all(|v| (v.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let m = nelder_mead(|x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2), &[0.0, 0.0], 0.1, 1000, 1e-20);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] + 0.5).abs() < 1e-6);
    }

    #[test]
    fn sphere_search_finds_axis() {
        let target = Vector3::new(0.2, -0.5, 0.8).normalize();
        let (k, v) = minimize_on_sphere(|k| k.cross(&target).norm(), &Vector3::new(0.3, -0.4, 0.85));
        assert!(v < 1e-6, "{v}");
        assert!(k.cross(&target).norm() < 1e-6);
    }
}
