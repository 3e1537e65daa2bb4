//! The reproduction suite: every headline claim of the engine as an
//! executable check with pinned tolerances.
//!
//! `run_all` evaluates the ten criteria and returns one summary per
//! criterion; the `acceptance` integration test asserts them and the
//! `qcar reproduce` subcommand prints them as a table. A forced tolerance
//! can replace the pinned residual bounds to exercise the failure path.

use rand::Rng;
use rayon::prelude::*;

use crate::algebra::{is_product_unitary, qca_index};
use crate::error::Result;
use crate::flow::{self, Angle, CaseTag, FlowState, ProjectionLabel};
use crate::linalg::{kron, operator_schmidt, phase_equal, translation_operator, wrap_angle, Bipartition, ComplexMatrix, C64};
use crate::qca::{
    build_g, build_identity, build_shift, build_step_unitary, controlled_phase, local_unitary,
    pair_layer, QubitQcaParams, StepUnitary, WrappedLattice,
};
use crate::renorm::{
    build_j, chain_projector, coarse_pair_distance, enumerate_tile_projections, renormalize,
    renormalize_step, schmidt_condition_check, verify_reindex_equation,
    wrapped_commutation_residual, Classification, TileFamily, TileProjection, Tolerances,
};
use crate::report::{CheckLine, CriterionSummary};
use crate::scan::{run_scan, ScanGrid, ScanOutcome};
use crate::testutil;

const SCAN_CELLS: usize = 8;
const F_TILES: usize = 4;

/// Pinned bounds, optionally overridden by a forced tolerance (testing the
/// failure path of the reproduction harness).
#[derive(Debug, Clone, Copy)]
pub struct Bounds {
    pub fit: f64,        // 1e-8: fitted vs closed-form coarse angles
    pub fixed_point: f64, // 1e-9
    pub commutation: f64, // 1e-9
    pub reindex_pass: f64, // 1e-9
    pub reindex_fail: f64, // 1e-2 (lower bound for non-renormalizable)
    pub g2_comm: f64,     // 1e-10
    pub construction: f64, // 1e-10 steps; 1e-12 isometries
}

impl Bounds {
    pub fn pinned() -> Self {
        Self {
            fit: 1e-8,
            fixed_point: 1e-9,
            commutation: 1e-9,
            reindex_pass: 1e-9,
            reindex_fail: 1e-2,
            g2_comm: 1e-10,
            construction: 1e-10,
        }
    }

    pub fn forced(tol: f64) -> Self {
        Self {
            fit: tol,
            fixed_point: tol,
            commutation: tol,
            reindex_pass: tol,
            reindex_fail: 1e-2,
            g2_comm: tol,
            construction: tol,
        }
    }
}

fn summary(id: usize, name: &str, checks: Vec<CheckLine>) -> CriterionSummary {
    CriterionSummary {
        id,
        name: name.to_string(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn tile_of(p: &QubitQcaParams, family: TileFamily, flipped: bool) -> TileProjection {
    let t = enumerate_tile_projections(p)
        .into_iter()
        .find(|t| t.family == family && !t.eigenbasis)
        .expect("computational families are always enumerated");
    if flipped {
        t.flip()
    } else {
        t
    }
}

fn sample_phi(rng: &mut impl Rng) -> f64 {
    loop {
        let phi = rng.gen::<f64>() * 2.0 * std::f64::consts::PI - std::f64::consts::PI;
        let w = wrap_angle(phi);
        if w.abs() > 0.05 && (w.abs() - std::f64::consts::PI).abs() > 0.05 {
            return phi;
        }
    }
}

/// Criterion 1: diagonal-case renormalized rules on 8 cells match the
/// closed-form flow columns for every tile family and branch.
pub fn criterion_1(b: &Bounds) -> Result<CriterionSummary> {
    let mut rng = testutil::rng(0xC1);
    let tol = Tolerances::default();
    let columns: [(&str, TileFamily, bool, fn(f64, f64) -> (f64, f64)); 7] = [
        ("Q1 branch a -> (2p, p+4t)", TileFamily::Q1, false, |p, t| (2.0 * p, p + 4.0 * t)),
        ("Q1 branch b -> (2p, -3p-4t)", TileFamily::Q1, true, |p, t| (2.0 * p, -3.0 * p - 4.0 * t)),
        ("Q2 -> (-2p, p)", TileFamily::Q2, false, |p, _| (-2.0 * p, p)),
        ("IxC0+ -> (0, 2t)", TileFamily::IOtimesC(0), false, |_, t| (0.0, 2.0 * t)),
        ("IxC0- -> (0, -2t)", TileFamily::IOtimesC(0), true, |_, t| (0.0, -2.0 * t)),
        ("IxC1+ -> (0, 2(t+p))", TileFamily::IOtimesC(1), false, |p, t| (0.0, 2.0 * (t + p))),
        ("IxC1- -> (0, -2(t+p))", TileFamily::IOtimesC(1), true, |p, t| (0.0, -2.0 * (t + p))),
    ];
    let samples: Vec<(f64, f64)> = (0..10)
        .map(|_| {
            (
                sample_phi(&mut rng),
                rng.gen::<f64>() * 2.0 * std::f64::consts::PI - std::f64::consts::PI,
            )
        })
        .collect();
    let mut checks = Vec::new();
    for (name, family, flipped, expect) in columns {
        let mut worst = 0.0f64;
        for &(phi, theta) in &samples {
            let p = QubitQcaParams::new(phi, theta, [0.0, 0.0, 1.0])?;
            let tile = tile_of(&p, family, flipped);
            let res = renormalize(&p, &tile, F_TILES, &tol)?;
            let fit = res.fitted.expect("diagonal case always fits");
            let (ep, et) = expect(p.phi, p.theta);
            worst = worst.max(coarse_pair_distance(
                (fit.phi_prime, fit.theta_prime),
                (wrap_angle(ep), wrap_angle(et)),
            ));
        }
        checks.push(CheckLine::residual(
            format!("diagonal row, {name}, max distance over 10 samples"),
            worst,
            b.fit,
        ));
    }
    Ok(summary(1, "diagonal-case coarse rules, every tile column", checks))
}

/// Criterion 2: antidiagonal case (n_z = 0, theta = pi/2).
pub fn criterion_2(b: &Bounds) -> Result<CriterionSummary> {
    let mut rng = testutil::rng(0xC2);
    let tol = Tolerances::default();
    let columns: [(&str, TileFamily, bool, fn(f64) -> (f64, f64)); 6] = [
        ("Q1 -> (2p, -p)", TileFamily::Q1, false, |p| (2.0 * p, -p)),
        ("Q1 flipped -> (2p, -p)", TileFamily::Q1, true, |p| (2.0 * p, -p)),
        ("Q2 -> (-2p, p)", TileFamily::Q2, false, |p| (-2.0 * p, p)),
        ("IxC0+ -> (0, -p)", TileFamily::IOtimesC(0), false, |p| (0.0, -p)),
        ("IxC1+ -> (0, p)", TileFamily::IOtimesC(1), false, |p| (0.0, p)),
        ("IxC1- -> (0, -p)", TileFamily::IOtimesC(1), true, |p| (0.0, -p)),
    ];
    let samples: Vec<(f64, f64)> = (0..10)
        .map(|_| (sample_phi(&mut rng), rng.gen::<f64>() * std::f64::consts::PI))
        .collect();
    let mut checks = Vec::new();
    for (name, family, flipped, expect) in columns {
        let mut worst = 0.0f64;
        for &(phi, beta) in &samples {
            let p = QubitQcaParams::new(
                phi,
                std::f64::consts::FRAC_PI_2,
                [beta.cos(), beta.sin(), 0.0],
            )?;
            let tile = tile_of(&p, family, flipped);
            let res = renormalize(&p, &tile, F_TILES, &tol)?;
            let fit = res.fitted.expect("antidiagonal case always fits");
            let (ep, et) = expect(p.phi);
            worst = worst.max(coarse_pair_distance(
                (fit.phi_prime, fit.theta_prime),
                (wrap_angle(ep), wrap_angle(et)),
            ));
        }
        checks.push(CheckLine::residual(
            format!("antidiagonal row, {name}, max distance over 10 samples"),
            worst,
            b.fit,
        ));
    }
    Ok(summary(2, "antidiagonal-case coarse rules, every tile column", checks))
}

/// Criterion 3: the (2pi/3, 2pi/3) fixed point under Q2, and no other
/// phi != 0 fixed point across the enumerated projections.
pub fn criterion_3(b: &Bounds) -> Result<CriterionSummary> {
    let mut checks = Vec::new();
    let third = 2.0 * std::f64::consts::PI / 3.0;
    let p = QubitQcaParams::new(third, third, [0.0, 0.0, 1.0])?;
    let tile = tile_of(&p, TileFamily::Q2, false);
    let res = renormalize(&p, &tile, F_TILES, &Tolerances::default())?;
    let fit = res.fitted.expect("fixed point is diagonal");
    checks.push(CheckLine::residual(
        "numeric: Q2 image of (2pi/3, 2pi/3) distance to itself",
        coarse_pair_distance((fit.phi_prime, fit.theta_prime), (third, third)),
        b.fixed_point,
    ));

    let state = FlowState::new(
        Angle::pi_rational(2, 3),
        Angle::pi_rational(2, 3),
        CaseTag::Diagonal,
        ProjectionLabel::Q2,
    )?;
    let img = flow::flow_step(&state)?;
    checks.push(CheckLine::residual(
        "closed form: flow image distance to itself",
        img.phi.dist(state.phi).max(img.theta.dist(state.theta)),
        b.fixed_point,
    ));

    let mut found_plus = false;
    let mut found_minus = false;
    let mut spurious = 0usize;
    for label in ProjectionLabel::all() {
        let report = flow::find_fixed_points(label, 24)?;
        for s in report.isolated {
            let (ph, th) = (s.phi.to_radians(), s.theta.to_radians());
            if label == ProjectionLabel::Q2
                && crate::linalg::angle_dist(ph, third) < 1e-9
                && crate::linalg::angle_dist(th, third) < 1e-9
            {
                found_plus = true;
            } else if label == ProjectionLabel::Q2
                && crate::linalg::angle_dist(ph, -third) < 1e-9
                && crate::linalg::angle_dist(th, -third) < 1e-9
            {
                found_minus = true;
            } else {
                spurious += 1;
            }
        }
    }
    checks.push(CheckLine::flag("search recovers (2pi/3, 2pi/3) under Q2", found_plus));
    checks.push(CheckLine::flag("search recovers (-2pi/3, -2pi/3) under Q2", found_minus));
    checks.push(CheckLine::new(
        "phi != 0 fixed points outside the 2pi/3 family",
        spurious as f64,
        0.0,
        0.0,
    ));
    // the fixed point survives cross-validation against the numeric pipeline
    checks.push(CheckLine::residual(
        "cross-validation at the fixed point (f=4)",
        flow::cross_validate(&state, F_TILES)?,
        1e-8_f64.max(b.fit),
    ));
    Ok(summary(3, "renormalization-flow fixed point", checks))
}

/// Criterion 4: predicate equivalence over the 24x24x3 grid at 8 cells.
pub fn criterion_4(scan: &ScanOutcome) -> CriterionSummary {
    let checks = vec![
        CheckLine::new(
            format!(
                "predicate/numeric disagreements over {} grid points",
                scan.rows.len()
            ),
            scan.disagreements as f64,
            0.0,
            0.0,
        ),
        CheckLine::new(
            "grid size",
            scan.rows.len() as f64,
            (scan.grid.phi_steps * scan.grid.theta_steps * scan.grid.axes.len()) as f64,
            0.0,
        ),
    ];
    summary(4, "closed-form predicate equals numeric verdict on the grid", checks)
}

/// Criterion 5: verdicts are unchanged on the 12-cell wrapping for a
/// 50-point random subset of the grid.
pub fn criterion_5(scan: &ScanOutcome, b: &Bounds) -> Result<CriterionSummary> {
    let mut rng = testutil::rng(0xC5);
    let mut order: Vec<usize> = (0..scan.rows.len()).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let picks: Vec<usize> = order.into_iter().take(50).collect();
    let mismatches: usize = picks
        .par_iter()
        .map(|&i| {
            let row = &scan.rows[i];
            let p = QubitQcaParams::new(row.phi, row.theta, row.axis).unwrap();
            let mut verdict12 = false;
            for tile in enumerate_tile_projections(&p) {
                if wrapped_commutation_residual(&p, 12, 2, &tile).unwrap() < b.commutation {
                    verdict12 = true;
                    break;
                }
            }
            usize::from(verdict12 != row.numeric)
        })
        .sum();
    let checks = vec![CheckLine::new(
        "verdict changes between 8 and 12 cells over 50 random points",
        mismatches as f64,
        0.0,
        0.0,
    )];
    Ok(summary(5, "wrapping independence of the verdict", checks))
}

/// Criterion 6: the index suite.
pub fn criterion_6(b: &Bounds) -> Result<CriterionSummary> {
    let lat = WrappedLattice::new(6)?;
    let mut checks = Vec::new();

    let id = qca_index(&build_identity(lat))?;
    checks.push(CheckLine::new("ind(identity)", id.value, 1.0, 0.0));
    checks.push(CheckLine::new("dim pair identity", id.dim_l as f64, 4.0, 0.0));
    let sp = qca_index(&build_shift(lat, 1))?;
    checks.push(CheckLine::new("ind(shift +1)", sp.value, 2.0, 0.0));
    checks.push(CheckLine::new("dim pair shift +1", sp.dim_l as f64, 16.0, 0.0));
    let sm = qca_index(&build_shift(lat, -1))?;
    checks.push(CheckLine::new("ind(shift -1)", sm.value, 0.5, 0.0));
    checks.push(CheckLine::new("dim pair shift -1", sm.dim_l as f64, 1.0, 0.0));

    // multiplicativity over compositions whose composite stays within the
    // nearest-neighbour window the support formula assumes: net cell
    // displacement <= 0 (left shift or none), so the evolved pair algebra
    // never leaks past the left neighbour pair
    let mut rng = testutil::rng(0xC6);
    let mut worst = 0.0f64;
    for k in 0..20 {
        let (a, b_step): (StepUnitary, StepUnitary) = match k % 5 {
            0 => (build_shift(lat, 1), random_qubit_step(&mut rng, lat)?),
            1 => (random_qubit_step(&mut rng, lat)?, build_shift(lat, 1)),
            2 => (build_shift(lat, -1), build_shift(lat, 1)),
            3 => (random_diagonal_step(&mut rng, lat)?, random_diagonal_step(&mut rng, lat)?),
            _ => (
                random_antidiagonal_step(&mut rng, lat)?,
                random_antidiagonal_step(&mut rng, lat)?,
            ),
        };
        let ab = StepUnitary::from_matrix(lat, a.matrix.mul(&b_step.matrix), "composite")?;
        let (ia, ib, iab) = (qca_index(&a)?, qca_index(&b_step)?, qca_index(&ab)?);
        worst = worst.max((iab.value - ia.value * ib.value).abs());
    }
    checks.push(CheckLine::residual(
        "multiplicativity |ind(AB) - ind(A) ind(B)| over 20 compositions",
        worst,
        1e-12,
    ));

    // every built qubit step has unit index
    let mut bad = 0usize;
    let mut params: Vec<QubitQcaParams> = (0..12).map(|_| testutil::random_params(&mut rng)).collect();
    params.push(QubitQcaParams::new(1.0, 0.5, [0.0, 0.0, 1.0])?);
    params.push(QubitQcaParams::new(1.0, std::f64::consts::FRAC_PI_2, [1.0, 0.0, 0.0])?);
    params.push(QubitQcaParams::new(2.0, 0.9, [1.0, 1.0, 1.0])?);
    for p in &params {
        let w = build_step_unitary(p, lat)?;
        let r = qca_index(&w)?;
        if (r.dim_l, r.dim_cell) != (4, 4) {
            bad += 1;
        }
        // unit index comes with a working two-layer realization
        let (l1, l2) = crate::qca::margolus_layers(p, lat)?;
        if l2.matrix.mul(&l1.matrix).dist(&w.matrix) > b.construction {
            bad += 1;
        }
    }
    checks.push(CheckLine::new(
        "qubit steps with index != 1 or failing two-layer reconstruction",
        bad as f64,
        0.0,
        0.0,
    ));
    Ok(summary(6, "index suite", checks))
}

fn random_qubit_step(rng: &mut impl Rng, lat: WrappedLattice) -> Result<StepUnitary> {
    build_step_unitary(&testutil::random_params(rng), lat)
}

fn random_diagonal_step(rng: &mut impl Rng, lat: WrappedLattice) -> Result<StepUnitary> {
    let p = QubitQcaParams::new(
        rng.gen::<f64>() * 6.0 - 3.0,
        rng.gen::<f64>() * 6.0 - 3.0,
        [0.0, 0.0, 1.0],
    )?;
    build_step_unitary(&p, lat)
}

fn random_antidiagonal_step(rng: &mut impl Rng, lat: WrappedLattice) -> Result<StepUnitary> {
    let beta = rng.gen::<f64>() * std::f64::consts::PI;
    let p = QubitQcaParams::new(
        rng.gen::<f64>() * 6.0 - 3.0,
        std::f64::consts::FRAC_PI_2,
        [beta.cos(), beta.sin(), 0.0],
    )?;
    build_step_unitary(&p, lat)
}

/// Criterion 7: G.S is never a product unitary at phi != 0, so no
/// index-changing renormalization exists anywhere on the grid.
pub fn criterion_7(scan: &ScanOutcome) -> Result<CriterionSummary> {
    let swap = {
        let mut s = ComplexMatrix::zeros(4, 4);
        for a in 0..2usize {
            for bq in 0..2usize {
                s[(2 * bq + a, 2 * a + bq)] = C64::new(1.0, 0.0);
            }
        }
        s
    };
    let mut product_cases = 0usize;
    let mut tested = 0usize;
    for row in &scan.rows {
        if wrap_angle(row.phi).abs() < 1e-9 {
            continue;
        }
        let p = QubitQcaParams::new(row.phi, row.theta, row.axis)?;
        let gs = build_g(&p)?.mul(&swap);
        tested += 1;
        if is_product_unitary(&gs, Bipartition::new(2, 2))? {
            product_cases += 1;
        }
    }
    let checks = vec![
        CheckLine::new(
            format!("product G.S cases over {tested} grid points with phi != 0"),
            product_cases as f64,
            0.0,
            0.0,
        ),
    ];
    Ok(summary(7, "no index-changing renormalization (G.S never factorizes)", checks))
}

/// Criterion 8: the two-layer consistency residual vanishes exactly on the
/// renormalizable grid points (witnessing tile) and is large elsewhere.
pub fn criterion_8(scan: &ScanOutcome, b: &Bounds) -> Result<CriterionSummary> {
    let renorm_rows: Vec<_> = scan.rows.iter().filter(|r| r.numeric).collect();
    let worst_pass = renorm_rows
        .par_iter()
        .map(|row| {
            let p = QubitQcaParams::new(row.phi, row.theta, row.axis).unwrap();
            let witness = row.witnesses.first().expect("numeric rows have a witness");
            let tile = enumerate_tile_projections(&p)
                .into_iter()
                .find(|t| &t.label() == witness)
                .expect("witness label comes from the same enumeration");
            verify_reindex_equation(&p, &tile, F_TILES).unwrap()
        })
        .reduce(|| 0.0f64, f64::max);

    let mut rng = testutil::rng(0xC8);
    let non_rows: Vec<_> = scan.rows.iter().filter(|r| !r.numeric).collect();
    let mut picks = Vec::new();
    while picks.len() < 20 {
        let i = rng.gen_range(0..non_rows.len());
        if !picks.contains(&i) {
            picks.push(i);
        }
    }
    let min_fail = picks
        .par_iter()
        .map(|&i| {
            let row = non_rows[i];
            let p = QubitQcaParams::new(row.phi, row.theta, row.axis).unwrap();
            enumerate_tile_projections(&p)
                .iter()
                .map(|t| verify_reindex_equation(&p, t, F_TILES).unwrap())
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min);

    let checks = vec![
        CheckLine::residual(
            format!(
                "max residual over {} renormalizable points (witnessing tile)",
                renorm_rows.len()
            ),
            worst_pass,
            b.reindex_pass,
        ),
        CheckLine {
            check: "min residual over 20 non-renormalizable points (all tiles)".into(),
            measured: min_fail,
            expected: b.reindex_fail,
            tolerance: 0.0,
            passed: min_fail > b.reindex_fail,
        },
    ];
    Ok(summary(8, "two-layer consistency equation residuals", checks))
}

/// Criterion 9: the Schmidt factorization condition agrees with the
/// commutation verdict tile by tile, and [G^2, P] vanishes when it passes.
pub fn criterion_9(scan: &ScanOutcome, b: &Bounds) -> Result<CriterionSummary> {
    let results: Vec<(usize, f64)> = scan
        .rows
        .par_iter()
        .map(|row| {
            let p = QubitQcaParams::new(row.phi, row.theta, row.axis).unwrap();
            let g = build_g(&p).unwrap();
            let g2 = g.mul(&g);
            let tiles = enumerate_tile_projections(&p);
            let mut mismatches = 0usize;
            let mut worst_g2 = 0.0f64;
            for tile in &tiles {
                let comm_pass = row
                    .residuals
                    .iter()
                    .find(|(l, _)| l == &tile.label())
                    .map(|(_, r)| *r < scan.tolerance)
                    .unwrap();
                let schmidt_pass = schmidt_condition_check(&g, tile, p.phi, 1e-8).unwrap();
                if comm_pass != schmidt_pass {
                    mismatches += 1;
                }
                if schmidt_pass {
                    let m1 = controlled_phase(p.phi);
                    let pdress = m1.mul(&tile.matrix).mul(&m1.adjoint());
                    worst_g2 = worst_g2.max(g2.mul(&pdress).dist(&pdress.mul(&g2)));
                }
            }
            (mismatches, worst_g2)
        })
        .collect();
    let mismatches: usize = results.iter().map(|(m, _)| m).sum();
    let worst_g2 = results.iter().map(|(_, w)| *w).fold(0.0, f64::max);
    let checks = vec![
        CheckLine::new(
            "schmidt-condition vs commutation mismatches over the grid",
            mismatches as f64,
            0.0,
            0.0,
        ),
        CheckLine::residual("max ||[G^2, P]|| over passing tiles", worst_g2, b.g2_comm),
    ];
    Ok(summary(9, "schmidt-condition agreement", checks))
}

/// Criterion 10: always-on construction properties.
pub fn criterion_10(b: &Bounds) -> Result<CriterionSummary> {
    let mut rng = testutil::rng(0xC10);
    let mut checks = Vec::new();

    // unitarity and translation invariance of constructed steps
    let lat = WrappedLattice::new(6)?;
    let t1 = translation_operator(6, 1);
    let mut worst_unit = 0.0f64;
    let mut worst_ti = 0.0f64;
    for _ in 0..50 {
        let p = testutil::random_params(&mut rng);
        let w = build_step_unitary(&p, lat)?;
        worst_unit = worst_unit.max(w.matrix.unitarity_residual());
        worst_ti = worst_ti.max(t1.mul(&w.matrix).mul(&t1.adjoint()).dist(&w.matrix));
    }
    checks.push(CheckLine::residual("step unitarity over 50 random points", worst_unit, b.construction));
    checks.push(CheckLine::residual("step translation invariance", worst_ti, b.construction));

    // isometry identities at 1e-12
    let mut worst_j = 0.0f64;
    let p = testutil::random_params(&mut rng);
    for tile in enumerate_tile_projections(&p) {
        for f in [3usize, 4] {
            let j = build_j(&tile, f)?;
            let jj = j.matrix.mul(&j.matrix.adjoint());
            worst_j = worst_j.max(jj.dist(&ComplexMatrix::identity(1 << f)));
            let jtj = j.matrix.adjoint().mul(&j.matrix);
            worst_j = worst_j.max(jtj.dist(&chain_projector(&tile, f)?));
        }
    }
    checks.push(CheckLine::residual("isometry identities J Jd = I, Jd J = Pi", worst_j, 1e-12));

    // Margolus gauge freedom: redressed layers rebuild the same step
    let mut worst_gauge = 0.0f64;
    for _ in 0..5 {
        let p = testutil::random_params(&mut rng);
        let w = build_step_unitary(&p, lat)?;
        let uu = ComplexMatrix::random_unitary(2, &mut rng);
        let vv = ComplexMatrix::random_unitary(2, &mut rng);
        let m1 = kron(&uu, &vv).mul(&controlled_phase(p.phi));
        let u = local_unitary(&p)?;
        let m2 = kron(&u, &u)
            .mul(&controlled_phase(p.phi))
            .mul(&kron(&vv.adjoint(), &uu.adjoint()));
        let rebuilt = pair_layer(&m2, 6, 1).mul(&pair_layer(&m1, 6, 0));
        worst_gauge = worst_gauge.max(rebuilt.dist(&w.matrix));
    }
    checks.push(CheckLine::residual("gauge-redressed two-layer rebuild", worst_gauge, b.construction));

    // operator Schmidt reconstruction on 100 random matrices
    let split = Bipartition::new(2, 2);
    let mut worst_rec = 0.0f64;
    for _ in 0..100 {
        let m = ComplexMatrix::random(4, 4, &mut rng);
        let dec = operator_schmidt(&m, split, 1e-9)?;
        worst_rec = worst_rec.max(dec.reconstruct(split).dist(&m));
    }
    checks.push(CheckLine::residual("operator Schmidt reconstruction (100 random)", worst_rec, 1e-9));

    // two shift steps renormalize to the coarse shift exactly up to phase
    let lat8 = WrappedLattice::new(8)?;
    let two = build_shift(lat8, 1).pow(2);
    let p0 = QubitQcaParams::new(0.0, 0.0, [0.0, 0.0, 1.0])?;
    let q1 = tile_of(&p0, TileFamily::Q1, false);
    let res = renormalize_step(&two, &q1, &Tolerances::default())?;
    let vs = res.v_s.clone().expect("shift chain commutes with Q1");
    let (eq, alpha) = phase_equal(&vs, &translation_operator(4, 1), 1e-10);
    let shift_ok = eq && res.classification == Some(Classification::Shift { offset: 1 });
    checks.push(CheckLine::flag("two shift steps -> coarse one-tile shift (up to phase)", shift_ok));
    checks.push(CheckLine::residual(
        "global phase of the coarse shift",
        alpha.abs(),
        1e-10,
    ));

    Ok(summary(10, "always-on property suite", checks))
}

/// Runs the whole suite. The scan grid is computed once and shared.
pub fn run_all(forced_tol: Option<f64>) -> Result<Vec<CriterionSummary>> {
    let b = forced_tol.map_or_else(Bounds::pinned, Bounds::forced);
    let scan = run_scan(&ScanGrid::reference_grid(), SCAN_CELLS, b.commutation)?;
    Ok(vec![
        criterion_1(&b)?,
        criterion_2(&b)?,
        criterion_3(&b)?,
        criterion_4(&scan),
        criterion_5(&scan, &b)?,
        criterion_6(&b)?,
        criterion_7(&scan)?,
        criterion_8(&scan, &b)?,
        criterion_9(&scan, &b)?,
        criterion_10(&b)?,
    ])
}
