//! Run the full coarse-graining pipeline: commutation check, isometry,
//! renormalized unitary, diagonal fit and classification -- for a diagonal
//! rule, the self-similar fixed point, and two trivial automata.

use qca_renorm::linalg::translation_operator;
use qca_renorm::qca::{build_shift, QubitQcaParams, WrappedLattice};
use qca_renorm::renorm::{
    align_theta_branch, enumerate_tile_projections, renormalize, renormalize_step, TileFamily,
    Tolerances,
};
use qca_renorm::report::classification_name;
use qca_renorm::Result;

fn tile_for(p: &QubitQcaParams, family: TileFamily) -> qca_renorm::TileProjection {
    enumerate_tile_projections(p)
        .into_iter()
        .find(|t| t.family == family && !t.eigenbasis)
        .unwrap()
}

fn main() -> Result<()> {
    let tol = Tolerances::default();
    let third = 2.0 * std::f64::consts::PI / 3.0;

    // a diagonal rule through Q1: the coarse rule doubles phi
    let p = QubitQcaParams::new(std::f64::consts::PI / 3.0, std::f64::consts::PI / 5.0, [0.0, 0.0, 1.0])?;
    let res = renormalize(&p, &tile_for(&p, TileFamily::Q1), 4, &tol)?;
    let fit = res.fitted.unwrap();
    println!("(pi/3, pi/5) through Q1:");
    println!("  commutator residual {:.3e}, unitarity residual {:.3e}", res.commutator_residual, res.unitarity_residual);
    println!("  fitted phi' = {:+.6} (expected 2 phi = {:+.6})", fit.phi_prime, 2.0 * p.phi);
    println!("  fitted theta' = {:+.6} (phi + 4 theta branch, coarse gauge)", fit.theta_prime);
    println!("  classification: {}", classification_name(&res.classification));

    // the self-similar point: (2pi/3, 2pi/3) maps to itself through Q2
    let fp = QubitQcaParams::new(third, third, [0.0, 0.0, 1.0])?;
    let res = renormalize(&fp, &tile_for(&fp, TileFamily::Q2), 4, &tol)?;
    let fit = res.fitted.unwrap();
    let theta_aligned = align_theta_branch(fit.theta_prime, third);
    println!("\n(2pi/3, 2pi/3) through Q2:");
    println!("  fitted (phi', theta') = ({:+.6}, {:+.6})", fit.phi_prime, theta_aligned);
    println!("  fixed point: {}", (fit.phi_prime - third).abs() < 1e-9 && (theta_aligned - third).abs() < 1e-9);

    // two steps of the shift renormalize to a single coarse shift
    let lat = WrappedLattice::new(8)?;
    let two_shifts = build_shift(lat, 1).pow(2);
    let res = renormalize_step(&two_shifts, &tile_for(&fp, TileFamily::Q1), &tol)?;
    println!("\nshift squared through Q1:");
    println!("  classification: {}", classification_name(&res.classification));
    let vs = res.v_s.unwrap();
    println!("  ||v_s - coarse shift|| = {:.3e}", vs.dist(&translation_operator(4, 1)));

    // a non-renormalizable point is refused with the residual as evidence
    let bad = QubitQcaParams::new(1.0, 0.5, [1.0, 0.0, 0.0])?;
    let res = renormalize(&bad, &tile_for(&bad, TileFamily::Q1), 4, &tol)?;
    println!("\n(1.0, 0.5, axis x) through Q1:");
    println!("  renormalizable: {} (commutator residual {:.3})", res.renormalizable, res.commutator_residual);
    Ok(())
}
