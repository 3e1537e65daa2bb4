//! The dense-matrix substrate: operator Schmidt decompositions, product
//! detection, partial traces and phase-robust comparison.

use qca_renorm::linalg::{
    kron, operator_schmidt, partial_trace, phase_equal, test_matrices, Bipartition, ComplexMatrix,
    Side, C64,
};
use qca_renorm::Result;

fn main() -> Result<()> {
    let split = Bipartition::new(2, 2);

    // the swap gate is maximally entangling as an operator: rank 4
    let swap = test_matrices::swap_gate();
    let dec = operator_schmidt(&swap, split, 1e-9)?;
    println!("swap gate: Schmidt rank {}", dec.rank());
    for (i, t) in dec.terms.iter().enumerate() {
        println!("  term {i}: weight {:.4}", t.weight);
    }
    println!("  reconstruction error {:.3e}", dec.reconstruct(split).dist(&swap));

    // a product operator has rank 1
    let mut rng = qca_renorm::testutil::rng(11);
    let a = ComplexMatrix::random_unitary(2, &mut rng);
    let b = ComplexMatrix::random_unitary(2, &mut rng);
    let prod = kron(&a, &b);
    println!("\nrandom A (x) B: Schmidt rank {}", operator_schmidt(&prod, split, 1e-9)?.rank());

    // partial traces reduce to the named factor
    let traced = partial_trace(&swap, split, Side::Left)?;
    println!("\ntr_L(swap) = I_2? distance {:.3e}", traced.dist(&ComplexMatrix::identity(2)));

    // phase_equal compares unitaries up to a global phase and reports it
    let rotated = prod.scale(C64::from_polar(1.0, 0.7));
    let (eq, alpha) = phase_equal(&rotated, &prod, 1e-9);
    println!("\nphase comparison: equal={eq}, recovered phase {alpha:+.4} (expected +0.7)");

    Ok(())
}
