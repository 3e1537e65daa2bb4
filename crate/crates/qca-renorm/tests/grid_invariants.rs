//! Grid-quantified invariants of the renormalization engine.
//!
//! These complement the acceptance criteria: the commutation/unitarity
//! equivalence and the fit round-trip are checked on the full parameter
//! grid, index stability and unit-index preservation on random samples.

use rayon::prelude::*;

use qca_renorm::algebra::qca_index;
use qca_renorm::flow::{self, ProjectionLabel};
use qca_renorm::linalg::{phase_equal, ComplexMatrix};
use qca_renorm::qca::{build_step_unitary, QubitQcaParams, WrappedLattice};
use qca_renorm::renorm::{
    coarse_diagonal_step, enumerate_tile_projections, fit_diagonal_rule,
    wrapped_commutation_residual, wrapped_renormalized_unitary,
};
use qca_renorm::scan::ScanGrid;
use qca_renorm::testutil;

/// Lemma-equivalence and fit round-trip over the full 24x24x3 grid with
/// every enumerated tile.
#[test]
fn commutation_unitarity_equivalence_and_fit_round_trip_on_grid() {
    let grid = ScanGrid::reference_grid();
    let mut points = Vec::new();
    for axis in &grid.axes {
        for phi in grid.phi_values() {
            for theta in grid.theta_values() {
                points.push(QubitQcaParams::new(phi, theta, *axis).unwrap());
            }
        }
    }
    let violations: Vec<String> = points
        .par_iter()
        .map(|p| {
            let mut bad = Vec::new();
            for tile in enumerate_tile_projections(p) {
                let comm = wrapped_commutation_residual(p, 8, 2, &tile).unwrap();
                let vs = wrapped_renormalized_unitary(p, 8, 2, &tile).unwrap();
                let unit = vs
                    .adjoint()
                    .mul(&vs)
                    .dist(&ComplexMatrix::identity(vs.rows()));
                let a = comm < 1e-9;
                let b = unit < 1e-9;
                if a != b {
                    bad.push(format!(
                        "equivalence: phi={:+.4} theta={:+.4} {} comm={comm:.2e} unit={unit:.2e}",
                        p.phi,
                        p.theta,
                        tile.label()
                    ));
                }
                if a {
                    if let Ok(fit) = fit_diagonal_rule(&vs, 4) {
                        let rebuilt = coarse_diagonal_step(fit.phi_prime, fit.theta_prime, 4);
                        let (eq, _) = phase_equal(&vs, &rebuilt, 1e-8);
                        if !eq {
                            bad.push(format!(
                                "round-trip: phi={:+.4} theta={:+.4} {}",
                                p.phi,
                                p.theta,
                                tile.label()
                            ));
                        }
                    }
                }
            }
            bad
        })
        .flatten()
        .collect();
    assert!(violations.is_empty(), "{}", violations.join("\n"));
}

/// The index does not depend on the wrapping size.
#[test]
fn index_agrees_between_six_and_eight_cells() {
    let mut rng = testutil::rng(0x1D8);
    let params: Vec<QubitQcaParams> = (0..20).map(|_| testutil::random_params(&mut rng)).collect();
    let lat6 = WrappedLattice::new(6).unwrap();
    let lat8 = WrappedLattice::new(8).unwrap();
    for p in &params {
        let i6 = qca_index(&build_step_unitary(p, lat6).unwrap()).unwrap();
        let i8 = qca_index(&build_step_unitary(p, lat8).unwrap()).unwrap();
        assert_eq!((i6.dim_l, i6.dim_cell), (i8.dim_l, i8.dim_cell), "{p:?}");
    }
}

/// Renormalization preserves the unit index: the coarse automaton rebuilt
/// from any fitted rule has index 1.
#[test]
fn renormalized_rules_keep_unit_index() {
    let mut rng = testutil::rng(0x10D);
    let lat = WrappedLattice::new(6).unwrap();
    for _ in 0..15 {
        use rand::Rng;
        let phi = rng.gen::<f64>() * 6.0 - 3.0;
        let theta = rng.gen::<f64>() * 6.0 - 3.0;
        let p = QubitQcaParams::new(phi, theta, [0.0, 0.0, 1.0]).unwrap();
        let tile = enumerate_tile_projections(&p).into_iter().next().unwrap();
        let vs = wrapped_renormalized_unitary(&p, 8, 2, &tile).unwrap();
        let fit = fit_diagonal_rule(&vs, 4).unwrap();
        let coarse = QubitQcaParams::new(fit.phi_prime, fit.theta_prime, [0.0, 0.0, 1.0]).unwrap();
        let idx = qca_index(&build_step_unitary(&coarse, lat).unwrap()).unwrap();
        assert_eq!((idx.dim_l, idx.dim_cell), (4, 4));
    }
}

/// Every isolated fixed point of the flow survives numeric cross-validation.
#[test]
fn flow_fixed_points_cross_validate() {
    for label in ProjectionLabel::all() {
        let report = flow::find_fixed_points(label, 24).unwrap();
        for s in &report.isolated {
            let d = flow::cross_validate(s, 4).unwrap();
            assert!(d < 1e-8, "{label:?} {:?}: {d:.2e}", (s.phi, s.theta));
        }
    }
}
