//! Sweep a small (phi, theta) grid over three rotation axes and cross-check
//! the closed-form renormalizability predicate against the numeric
//! commutation criterion point by point.

use qca_renorm::scan::{run_scan, ScanGrid};
use qca_renorm::Result;

fn main() -> Result<()> {
    let grid = ScanGrid {
        phi_steps: 8,
        theta_steps: 8,
        axes: ScanGrid::reference_grid().axes,
    };
    let outcome = run_scan(&grid, 8, 1e-9)?;

    println!(
        "{} grid points at {} cells, {} predicate/numeric disagreements\n",
        outcome.rows.len(),
        outcome.n_cells,
        outcome.disagreements
    );

    // verdict map per axis: R = renormalizable, . = not
    for axis in &grid.axes {
        println!("axis ({:.3}, {:.3}, {:.3}): rows phi, cols theta", axis[0], axis[1], axis[2]);
        for phi in grid.phi_values() {
            let mut line = String::new();
            for theta in grid.theta_values() {
                let row = outcome
                    .rows
                    .iter()
                    .find(|r| {
                        r.axis == *axis
                            && (r.phi - phi).abs() < 1e-12
                            && (r.theta - theta).abs() < 1e-12
                    })
                    .unwrap();
                line.push(if row.numeric { 'R' } else { '.' });
            }
            println!("  phi {phi:+.3}  {line}");
        }
        println!();
    }

    println!("first CSV rows:");
    for line in outcome.to_csv().lines().take(4) {
        println!("  {line}");
    }
    Ok(())
}
