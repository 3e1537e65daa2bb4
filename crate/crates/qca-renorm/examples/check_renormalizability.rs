//! Decide exact size-2 renormalizability for a few parameter points, both
//! numerically (does any candidate tile projection commute with two wrapped
//! steps?) and through the closed-form predicate.

use qca_renorm::qca::QubitQcaParams;
use qca_renorm::renorm::{
    closed_form_renormalizable, enumerate_tile_projections, wrapped_commutation_residual,
};
use qca_renorm::Result;

fn main() -> Result<()> {
    let cases = [
        ("diagonal rule (axis z)", QubitQcaParams::new(std::f64::consts::FRAC_PI_2, 0.37, [0.0, 0.0, 1.0])?),
        ("antidiagonal rule", QubitQcaParams::new(0.9, std::f64::consts::FRAC_PI_2, [1.0, 0.0, 0.0])?),
        ("pure local rotation", QubitQcaParams::new(0.0, 1.1, [1.0, 0.0, 0.0])?),
        ("generic point", QubitQcaParams::new(1.0, 0.5, [1.0, 0.0, 0.0])?),
        ("tilted axis", QubitQcaParams::new(0.7, 1.2, [1.0, 1.0, 1.0])?),
    ];

    for (name, p) in &cases {
        let predicate = closed_form_renormalizable(p);
        let mut witnesses = Vec::new();
        let mut min_residual = f64::INFINITY;
        for tile in enumerate_tile_projections(p) {
            let r = wrapped_commutation_residual(p, 8, 2, &tile)?;
            min_residual = min_residual.min(r);
            if r < 1e-9 {
                witnesses.push(tile.label());
            }
        }
        println!("{name}:");
        println!("  closed-form predicate: {predicate}");
        println!(
            "  numeric verdict:       {} (best commutator residual {:.3e})",
            !witnesses.is_empty(),
            min_residual
        );
        if !witnesses.is_empty() {
            println!("  witnessing tiles:      {}", witnesses.join(", "));
        }
    }
    Ok(())
}
