//! Classification scans over the tetrahedron of Bell-diagonal states.
//!
//! Grid points are `τ = Σ_v (k_v / n) V_v` over the vertices
//! `(−1,−1,−1), (1,1,−1), (1,−1,1), (−1,1,1)` with integer `k_v` summing to
//! the resolution `n`. Coordinates are formed from integer numerators, so
//! points on a symmetry plane have exactly equal components.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::isotropy::{smoothed_classify, OrbitShape, Tolerance};
use crate::pauli::{compose, PauliForm};
use crate::su2::SubgroupClass;

pub const TETRAHEDRON: [[i64; 3]; 4] = [[-1, -1, -1], [1, 1, -1], [1, -1, 1], [-1, 1, 1]];

pub const CSV_HEADER: &str = "tau1,tau2,tau3,class,shape,min_residual";

/// One grid point: `τ_i = numerators[i] / resolution`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridPoint {
    pub numerators: [i64; 3],
    pub resolution: i64,
}

impl GridPoint {
    pub fn taus(&self) -> [f64; 3] {
        self.numerators.map(|k| k as f64 / self.resolution as f64)
    }
}

/// Barycentric grid in lexicographic `(k_1, k_2, k_3)` order.
pub fn tetrahedron_grid(resolution: usize) -> Vec<GridPoint> {
    let n = resolution as i64;
    let mut out = Vec::new();
    for k1 in 0..=n {
        for k2 in 0..=(n - k1) {
            for k3 in 0..=(n - k1 - k2) {
                let k4 = n - k1 - k2 - k3;
                let ks = [k1, k2, k3, k4];
                let num = std::array::from_fn(|i| (0..4).map(|v| ks[v] * TETRAHEDRON[v][i]).sum());
                out.push(GridPoint { numerators: num, resolution: n });
            }
        }
    }
    out
}

/// Classification of one grid point; `class` is `None` when ambiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub point: GridPoint,
    pub class: Option<SubgroupClass>,
    pub shape: Option<OrbitShape>,
    pub min_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutput {
    pub rows: Vec<ScanRow>,
    /// Grid points whose Pauli triple is not a state.
    pub skipped: usize,
}

/// Classifies every grid point (`eps = 0` exact, otherwise smoothed).
///
/// `threads` caps the worker pool; rows come back in grid order either way.
pub fn scan_tetrahedron(resolution: usize, eps: f64, tol: &Tolerance, threads: Option<usize>) -> Result<ScanOutput> {
    if resolution < 2 {
        return Err(Error::InvalidParameter(format!("resolution must be at least 2, got {resolution}")));
    }
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be nonnegative, got {eps}")));
    }
    let grid = tetrahedron_grid(resolution);
    let work = || -> Vec<Option<ScanRow>> {
        grid.par_iter()
            .map(|p| {
                let pf = PauliForm::t_state(p.taus());
                compose(&pf).ok()?;
                Some(match smoothed_classify(&pf, eps, tol) {
                    Ok(r) => ScanRow { point: *p, class: Some(r.class()), shape: Some(r.shape), min_residual: r.distance },
                    Err(_) => ScanRow { point: *p, class: None, shape: None, min_residual: f64::NAN },
                })
            })
            .collect()
    };
    let cells = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .install(work),
        None => work(),
    };
    let skipped = cells.iter().filter(|c| c.is_none()).count();
    Ok(ScanOutput { rows: cells.into_iter().flatten().collect(), skipped })
}

/// Writes rows as CSV with fixed-precision numbers.
pub fn write_csv<W: Write>(out: &mut W, rows: &[ScanRow]) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        let t = r.point.taus();
        let class = r.class.map_or("ambiguous", |c| c.name());
        let shape = r.shape.map_or("ambiguous", |s| s.name());
        // −0 would make snapshots depend on rounding direction
        let res = if r.min_residual.is_nan() { "nan".to_string() } else { format!("{:.6e}", r.min_residual.abs()) };
        writeln!(out, "{:.6},{:.6},{:.6},{class},{shape},{res}", t[0] + 0.0, t[1] + 0.0, t[2] + 0.0)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_size_and_vertices() {
        let n = 4;
        let g = tetrahedron_grid(n);
        assert_eq!(g.len(), (n + 1) * (n + 2) * (n + 3) / 6);
        for v in TETRAHEDRON {
            assert!(g.iter().any(|p| p.numerators == v.map(|x| x * n as i64)));
        }
    }

    #[test]
    fn exact_scan_small() {
        let out = scan_tetrahedron(6, 0.0, &Tolerance::default(), Some(1)).unwrap();
        assert_eq!(out.skipped, 0);
        for r in &out.rows {
            let [a, b, c] = r.point.numerators;
            let want = if a == b && b == c {
                SubgroupClass::SU2
            } else if a == b || b == c || a == c {
                SubgroupClass::Kinf
            } else {
                SubgroupClass::K2
            };
            assert_eq!(r.class, Some(want), "{:?}", r.point);
        }
        let mut buf = Vec::new();
        write_csv(&mut buf, &out.rows[..2]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with(CSV_HEADER));
        assert_eq!(s.lines().count(), 3);
    }

    #[test]
    fn invalid_resolution() {
        assert!(scan_tetrahedron(1, 0.0, &Tolerance::default(), Some(1)).is_err());
    }
}
