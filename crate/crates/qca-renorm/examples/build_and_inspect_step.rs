//! Build the wrapped step unitary of a qubit automaton and inspect its
//! structural properties: unitarity, translation invariance, and the
//! two-layer (Margolus) factorization with its gauge freedom.

use qca_renorm::linalg::{kron, translation_operator, ComplexMatrix};
use qca_renorm::qca::{
    build_step_unitary, controlled_phase, local_unitary, margolus_layers, pair_layer,
    QubitQcaParams, WrappedLattice,
};
use qca_renorm::Result;

fn main() -> Result<()> {
    let lat = WrappedLattice::new(8)?;
    let p = QubitQcaParams::new(1.1, 0.4, [1.0, 1.0, 1.0])?;
    println!(
        "automaton: phi={:.4}, theta={:.4}, axis=({:.4}, {:.4}, {:.4})",
        p.phi, p.theta, p.axis[0], p.axis[1], p.axis[2]
    );

    let step = build_step_unitary(&p, lat)?;
    println!("step on {} cells: {} x {} dense matrix", lat.n_cells, step.matrix.rows(), step.matrix.cols());
    println!("  unitarity residual     {:.3e}", step.matrix.unitarity_residual());

    let t1 = translation_operator(lat.n_cells, 1);
    let shifted = t1.mul(&step.matrix).mul(&t1.adjoint());
    println!("  translation invariance {:.3e}", shifted.dist(&step.matrix));

    // two staggered layers of two-cell gates rebuild the step
    let (l1, l2) = margolus_layers(&p, lat)?;
    let rebuilt = l2.matrix.mul(&l1.matrix);
    println!("  two-layer rebuild      {:.3e}", rebuilt.dist(&step.matrix));

    // the layer pair is unique only up to single-cell redressing:
    // M1 -> (u x v) M1 and M2 -> M2 (v^dag x u^dag) give the same step
    let mut rng = qca_renorm::testutil::rng(7);
    let u = ComplexMatrix::random_unitary(2, &mut rng);
    let v = ComplexMatrix::random_unitary(2, &mut rng);
    let m1 = kron(&u, &v).mul(&controlled_phase(p.phi));
    let loc = local_unitary(&p)?;
    let m2 = kron(&loc, &loc)
        .mul(&controlled_phase(p.phi))
        .mul(&kron(&v.adjoint(), &u.adjoint()));
    let redressed = pair_layer(&m2, lat.n_cells, 1).mul(&pair_layer(&m1, lat.n_cells, 0));
    println!("  redressed rebuild      {:.3e}", redressed.dist(&step.matrix));

    Ok(())
}
