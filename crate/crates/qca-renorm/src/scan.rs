//! Parameter-grid scans cross-checking the closed-form renormalizability
//! predicate against the numeric commutation criterion.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::qca::QubitQcaParams;
use crate::renorm::{
    closed_form_renormalizable, enumerate_tile_projections, wrapped_commutation_residual,
};

/// Grid specification: phi and theta each sweep k 2pi/steps - pi for
/// k = 1..=steps, so the degenerate values 0, pi/2 and pi are hit whenever
/// steps is a multiple of 4.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanGrid {
    pub phi_steps: usize,
    pub theta_steps: usize,
    pub axes: Vec<[f64; 3]>,
}

impl ScanGrid {
    pub fn reference_grid() -> Self {
        let s3 = 1.0 / 3.0_f64.sqrt();
        Self {
            phi_steps: 24,
            theta_steps: 24,
            axes: vec![[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [s3, s3, s3]],
        }
    }

    pub fn phi_values(&self) -> Vec<f64> {
        grid_values(self.phi_steps)
    }

    pub fn theta_values(&self) -> Vec<f64> {
        grid_values(self.theta_steps)
    }
}

fn grid_values(steps: usize) -> Vec<f64> {
    (1..=steps)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / steps as f64 - std::f64::consts::PI)
        .collect()
}

/// One grid point: residuals of every enumerated tile plus the verdicts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanRow {
    pub phi: f64,
    pub theta: f64,
    pub axis: [f64; 3],
    pub predicate: bool,
    pub numeric: bool,
    pub witnesses: Vec<String>,
    pub residuals: Vec<(String, f64)>,
    pub max_residual: f64,
}

impl ScanRow {
    /// Smallest residual across tiles (the witness margin).
    pub fn min_residual(&self) -> f64 {
        self.residuals
            .iter()
            .map(|(_, r)| *r)
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanOutcome {
    pub grid: ScanGrid,
    pub n_cells: usize,
    pub tolerance: f64,
    pub rows: Vec<ScanRow>,
    pub disagreements: usize,
}

/// Evaluates one parameter point: all enumerated tiles at `n_cells`.
pub fn scan_point(p: &QubitQcaParams, n_cells: usize, tol: f64) -> Result<ScanRow> {
    let tiles = enumerate_tile_projections(p);
    let mut residuals = Vec::with_capacity(tiles.len());
    let mut witnesses = Vec::new();
    let mut max_residual: f64 = 0.0;
    for tile in &tiles {
        let r = wrapped_commutation_residual(p, n_cells, 2, tile)?;
        if r < tol {
            witnesses.push(tile.label());
        }
        max_residual = max_residual.max(r);
        residuals.push((tile.label(), r));
    }
    Ok(ScanRow {
        phi: p.phi,
        theta: p.theta,
        axis: p.axis,
        predicate: closed_form_renormalizable(p),
        numeric: !witnesses.is_empty(),
        witnesses,
        residuals,
        max_residual,
    })
}

/// Full cross-product scan; rows come back in deterministic grid order
/// (axis-major, then phi, then theta) regardless of worker scheduling.
pub fn run_scan(grid: &ScanGrid, n_cells: usize, tol: f64) -> Result<ScanOutcome> {
    let mut points = Vec::new();
    for axis in &grid.axes {
        for phi in grid.phi_values() {
            for theta in grid.theta_values() {
                points.push(QubitQcaParams::new(phi, theta, *axis)?);
            }
        }
    }
    let rows: Vec<ScanRow> = points
        .par_iter()
        .map(|p| scan_point(p, n_cells, tol))
        .collect::<Result<_>>()?;
    let disagreements = rows.iter().filter(|r| r.predicate != r.numeric).count();
    Ok(ScanOutcome {
        grid: grid.clone(),
        n_cells,
        tolerance: tol,
        rows,
        disagreements,
    })
}

impl ScanOutcome {
    /// CSV with the fixed column set
    /// `phi,theta,nx,ny,nz,predicate,numeric,witness,max_residual`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("phi,theta,nx,ny,nz,predicate,numeric,witness,max_residual\n");
        for r in &self.rows {
            let witness = r.witnesses.first().cloned().unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{:e}\n",
                r.phi, r.theta, r.axis[0], r.axis[1], r.axis[2], r.predicate, r.numeric, witness,
                r.max_residual
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_hits_degenerate_values() {
        let g = ScanGrid::reference_grid();
        let phis = g.phi_values();
        assert!(phis.iter().any(|p| p.abs() < 1e-12));
        assert!(phis.iter().any(|p| (p - std::f64::consts::PI).abs() < 1e-12));
        assert!(phis
            .iter()
            .any(|p| (p - std::f64::consts::FRAC_PI_2).abs() < 1e-12));
        assert_eq!(phis.len(), 24);
    }

    #[test]
    fn small_scan_agrees() {
        // 4x4 grid over all three axes, including the renormalizable corner
        let grid = ScanGrid {
            phi_steps: 4,
            theta_steps: 4,
            axes: ScanGrid::reference_grid().axes,
        };
        let outcome = run_scan(&grid, 8, 1e-9).unwrap();
        assert_eq!(outcome.rows.len(), 48);
        assert_eq!(outcome.disagreements, 0);
        // the phi = 0 column is renormalizable everywhere
        for r in outcome.rows.iter().filter(|r| r.phi.abs() < 1e-12) {
            assert!(r.predicate && r.numeric);
        }
        // the x-axis theta = pi/2 row is renormalizable across all phi
        for r in outcome
            .rows
            .iter()
            .filter(|r| r.axis == [1.0, 0.0, 0.0] && (r.theta - std::f64::consts::FRAC_PI_2).abs() < 1e-12)
        {
            assert!(r.predicate && r.numeric, "phi={}", r.phi);
        }
    }

    #[test]
    fn csv_shape() {
        let grid = ScanGrid {
            phi_steps: 2,
            theta_steps: 2,
            axes: vec![[0.0, 0.0, 1.0]],
        };
        let outcome = run_scan(&grid, 6, 1e-9).unwrap();
        let csv = outcome.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(
            lines[0],
            "phi,theta,nx,ny,nz,predicate,numeric,witness,max_residual"
        );
        assert_eq!(lines[1].split(',').count(), 9);
        assert!(!csv.contains(';'));
    }
}
