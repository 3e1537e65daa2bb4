//! Iterate the closed-form renormalization flow, find its fixed points,
//! and cross-validate closed-form images against the numeric pipeline.

use qca_renorm::flow::{
    cross_validate, find_fixed_points, flow_step, iterate, Angle, CaseTag, FlowState,
    ProjectionLabel,
};
use qca_renorm::Result;

fn main() -> Result<()> {
    // a trajectory that collapses onto the local case: phi doubles (with a
    // sign flip) under Q2 until it hits zero
    let start = FlowState::new(
        Angle::pi_rational(1, 2),
        Angle::pi_rational(1, 7),
        CaseTag::Diagonal,
        ProjectionLabel::Q2,
    )?;
    let traj = iterate(&start, 32)?;
    println!("trajectory from (pi/2, pi/7) under Q2:");
    for (i, s) in traj.states.iter().enumerate() {
        println!(
            "  step {i}: phi = {:+.6}, theta = {:+.6}, case = {:?}",
            s.phi.to_radians(),
            s.theta.to_radians(),
            s.case
        );
    }
    println!("  terminated by {:?}", traj.terminated_by);

    // the self-similar automaton: exact rational arithmetic pins the fixed
    // point with no mod-2pi drift
    let fp = FlowState::new(
        Angle::pi_rational(2, 3),
        Angle::pi_rational(2, 3),
        CaseTag::Diagonal,
        ProjectionLabel::Q2,
    )?;
    let img = flow_step(&fp)?;
    println!(
        "\n(2pi/3, 2pi/3) under Q2 maps to ({:+.6}, {:+.6}): fixed = {}",
        img.phi.to_radians(),
        img.theta.to_radians(),
        img.same_point(&fp, 1e-12)
    );
    println!("numeric cross-validation at f = 4 tiles: {:.3e}", cross_validate(&fp, 4)?);

    // fixed-point search over every projection column
    println!("\nisolated fixed points with phi != 0 per projection column:");
    for label in ProjectionLabel::all() {
        let report = find_fixed_points(label, 24)?;
        let pts: Vec<String> = report
            .isolated
            .iter()
            .map(|s| format!("({:+.4}, {:+.4})", s.phi.to_radians(), s.theta.to_radians()))
            .collect();
        println!(
            "  {:<8} {}",
            label.name(),
            if pts.is_empty() { "none (collapses to the phi = 0 line)".to_string() } else { pts.join(", ") }
        );
    }
    Ok(())
}
