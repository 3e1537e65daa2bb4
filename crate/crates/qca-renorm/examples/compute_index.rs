//! Compute the information-flow index of a few automata from support
//! algebras, and watch it multiply under composition.

use qca_renorm::algebra::qca_index;
use qca_renorm::qca::{build_identity, build_shift, build_step_unitary, QubitQcaParams, StepUnitary, WrappedLattice};
use qca_renorm::Result;

fn main() -> Result<()> {
    let lat = WrappedLattice::new(6)?;

    let report = |name: &str, idx: qca_renorm::algebra::IndexResult| {
        println!(
            "{name:<24} ind = {:<4} (dim L = {:>2}, dim cell algebra = {})",
            idx.value, idx.dim_l, idx.dim_cell
        );
    };

    report("identity", qca_index(&build_identity(lat))?);
    report("shift by +1", qca_index(&build_shift(lat, 1))?);
    report("shift by -1", qca_index(&build_shift(lat, -1))?);

    let p = QubitQcaParams::new(1.0, 0.5, [0.0, 0.0, 1.0])?;
    let w = build_step_unitary(&p, lat)?;
    report("qubit step (1.0, 0.5)", qca_index(&w)?);

    let p2 = QubitQcaParams::new(2.0, 0.9, [1.0, 1.0, 1.0])?;
    report("qubit step (2.0, 0.9)", qca_index(&build_step_unitary(&p2, lat)?)?);

    // the index is multiplicative: a left shift composed with any unit-index
    // step keeps ind = 2
    let composite = StepUnitary::from_matrix(lat, build_shift(lat, 1).matrix.mul(&w.matrix), "shift.step")?;
    report("shift +1 after step", qca_index(&composite)?);

    println!("\nunit index <=> realizable as two staggered layers of two-cell gates");
    Ok(())
}
