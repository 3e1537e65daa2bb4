//! Renormalization of one-dimensional qubit quantum cellular automata.
//!
//! The crate builds the global step unitary of a nearest-neighbour qubit
//! QCA on a wrapped (periodic) lattice, decides whether two cells and two
//! steps can be coarse-grained into one (exact size-2 renormalizability),
//! extracts and classifies the renormalized rule, computes the information
//! flow index from support algebras, and iterates the closed-form
//! renormalization flow to its fixed points.
//!
//! Entry points:
//! - [`qca::build_step_unitary`] / [`qca::margolus_layers`] build evolutions;
//! - [`renorm::renormalize`] runs the full size-2 pipeline for one tile;
//! - [`renorm::closed_form_renormalizable`] is the closed-form predicate;
//! - [`algebra::qca_index`] computes the index;
//! - [`flow`] iterates the parameter-space flow map;
//! - [`scan`] sweeps parameter grids and cross-checks predicate vs numerics;
//! - [`acceptance`] bundles the reproduction suite behind `qcar reproduce`.
//!
//! The runnable examples under `examples/` walk through each capability.

pub mod acceptance;
pub mod algebra;
pub mod error;
pub mod flow;
pub mod linalg;
pub mod qca;
pub mod renorm;
pub mod report;
pub mod scan;

pub use error::{QcaError, Result};
pub use linalg::{ComplexMatrix, C64};
pub use qca::{QubitQcaParams, StepUnitary, WrappedLattice};
pub use renorm::{RenormResult, TileProjection, Tolerances};

#[doc(hidden)]
pub mod testutil {
    //! Seeded helpers shared by unit, property and integration tests.
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::qca::QubitQcaParams;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    pub fn random_params(rng: &mut impl rand::Rng) -> QubitQcaParams {
        let phi = rng.gen::<f64>() * 2.0 * std::f64::consts::PI - std::f64::consts::PI;
        let theta = rng.gen::<f64>() * 2.0 * std::f64::consts::PI - std::f64::consts::PI;
        let axis = loop {
            let a = [
                rng.gen::<f64>() * 2.0 - 1.0,
                rng.gen::<f64>() * 2.0 - 1.0,
                rng.gen::<f64>() * 2.0 - 1.0,
            ];
            let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
            if n > 0.1 {
                break a;
            }
        };
        QubitQcaParams::new(phi, theta, axis).unwrap()
    }
}
