//! Closed-form renormalization flow on the (phi, theta) parameter space.
//!
//! Each size-2 renormalization of a diagonal or antidiagonal qubit rule is
//! again a diagonal qubit rule, so coarse-graining induces a map
//! (phi, theta) -> (phi', theta') indexed by the chosen tile projection.
//! The maps implemented here are the ones the numeric pipeline reproduces
//! exactly (see `renorm::fit_diagonal_rule` and the cross-validation
//! tests); theta enters with the crate's rotation convention
//! U = e^{-i theta sigma_z}.
//!
//! Angle arithmetic is exact over rational multiples of pi, falling back to
//! floating point otherwise, so fixed points and cycles are detected
//! without mod-2pi drift.

use serde::{Deserialize, Serialize};

use crate::error::{QcaError, Result};
use crate::linalg::{angle_dist, wrap_angle};
use crate::qca::QubitQcaParams;
use crate::renorm::{self, TileFamily, Tolerances};

const FLOW_TOL: f64 = 1e-9;

/// An angle that stays exact when it is a rational multiple of pi.
#[derive(Debug, Clone, Copy)]
pub enum Angle {
    /// num/den * pi, reduced, den > 0, normalized into (-pi, pi].
    PiRational { num: i64, den: i64 },
    Radians(f64),
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

impl Angle {
    pub fn pi_rational(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let (mut num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        // normalize into (-pi, pi]: num/den into (-den, den]
        num = num.rem_euclid(2 * den); // [0, 2den)
        if num > den {
            num -= 2 * den;
        }
        let g = gcd(num, den);
        Self::PiRational { num: num / g, den: den / g }
    }

    pub fn radians(v: f64) -> Self {
        Self::Radians(wrap_angle(v))
    }

    pub fn zero() -> Self {
        Self::pi_rational(0, 1)
    }

    pub fn to_radians(self) -> f64 {
        match self {
            Self::PiRational { num, den } => std::f64::consts::PI * num as f64 / den as f64,
            Self::Radians(v) => v,
        }
    }

    pub fn is_zero(self, tol: f64) -> bool {
        match self {
            Self::PiRational { num, .. } => num == 0,
            Self::Radians(v) => wrap_angle(v).abs() < tol,
        }
    }

    /// a*self + b*other, exact when both sides are rational.
    pub fn combine(a: i64, x: Angle, b: i64, y: Angle) -> Angle {
        match (x, y) {
            (Self::PiRational { num: n1, den: d1 }, Self::PiRational { num: n2, den: d2 }) => {
                let num = (a as i128) * (n1 as i128) * (d2 as i128)
                    + (b as i128) * (n2 as i128) * (d1 as i128);
                let den = (d1 as i128) * (d2 as i128);
                if num.abs() < i64::MAX as i128 / 4 && den < i64::MAX as i128 / 4 {
                    Self::pi_rational(num as i64, den as i64)
                } else {
                    Self::radians(a as f64 * x.to_radians() + b as f64 * y.to_radians())
                }
            }
            _ => Self::radians(a as f64 * x.to_radians() + b as f64 * y.to_radians()),
        }
    }

    pub fn scaled(self, k: i64) -> Angle {
        Self::combine(k, self, 0, Self::zero())
    }

    /// Mod-2pi distance; exact zero for equal rationals.
    pub fn dist(self, other: Angle) -> f64 {
        match (self, other) {
            (Self::PiRational { num: n1, den: d1 }, Self::PiRational { num: n2, den: d2 }) => {
                if n1 == n2 && d1 == d2 {
                    0.0
                } else {
                    angle_dist(self.to_radians(), other.to_radians())
                }
            }
            _ => angle_dist(self.to_radians(), other.to_radians()),
        }
    }
}

impl Serialize for Angle {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_f64(self.to_radians())
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        Ok(Angle::Radians(f64::deserialize(de)?))
    }
}

/// Which closed-form row applies to a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    /// single step diagonal in the computational basis (n_x = n_y = 0)
    Diagonal,
    /// single step antidiagonal (n_z = 0, theta = pi/2)
    Antidiagonal,
    /// phi = 0: local unitaries, terminal for the flow
    Local,
}

/// Tile projection label driving the flow, including the eigenbasis order
/// branch where the families have one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProjectionLabel {
    Q1A,
    Q1B,
    Q2,
    /// I (x) |c><c|; `positive` selects the eigenbasis order psi_k = |k, c>.
    IOtimesC { c: u8, positive: bool },
    /// |c><c| (x) I with the analogous branch.
    COtimesI { c: u8, positive: bool },
}

impl ProjectionLabel {
    pub fn all() -> Vec<ProjectionLabel> {
        let mut v = vec![Self::Q1A, Self::Q1B, Self::Q2];
        for c in 0..2u8 {
            for positive in [true, false] {
                v.push(Self::IOtimesC { c, positive });
                v.push(Self::COtimesI { c, positive });
            }
        }
        v
    }

    pub fn name(&self) -> String {
        match self {
            Self::Q1A => "Q1_a".into(),
            Self::Q1B => "Q1_b".into(),
            Self::Q2 => "Q2".into(),
            Self::IOtimesC { c, positive } => {
                format!("IxC{}{}", c, if *positive { "+" } else { "-" })
            }
            Self::COtimesI { c, positive } => {
                format!("C{}xI{}", c, if *positive { "+" } else { "-" })
            }
        }
    }

    /// The matching tile projection of the renormalization engine.
    pub fn tile(&self, eigenbasis_axis: Option<[f64; 3]>) -> renorm::TileProjection {
        let (family, flipped) = match self {
            Self::Q1A => (TileFamily::Q1, false),
            Self::Q1B => (TileFamily::Q1, true),
            Self::Q2 => (TileFamily::Q2, false),
            Self::IOtimesC { c, positive } => (TileFamily::IOtimesC(*c), !positive),
            Self::COtimesI { c, positive } => (TileFamily::COtimesI(*c), !positive),
        };
        let params = QubitQcaParams::new(
            if eigenbasis_axis.is_some() { 0.0 } else { 1.0 },
            1.0,
            eigenbasis_axis.unwrap_or([1.0, 0.0, 0.0]),
        )
        .unwrap();
        let base = renorm::enumerate_tile_projections(&params)
            .into_iter()
            .find(|t| t.family == family && t.eigenbasis == eigenbasis_axis.is_some())
            .expect("family is always enumerated");
        if flipped {
            base.flip()
        } else {
            base
        }
    }
}

/// A point of the renormalization flow.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FlowState {
    pub phi: Angle,
    pub theta: Angle,
    pub case: CaseTag,
    pub projection: ProjectionLabel,
}

impl FlowState {
    /// Validates the case tag against the angles; antidiagonal states must
    /// sit at theta = pi/2 (mod pi) and local ones at phi = 0.
    pub fn new(phi: Angle, theta: Angle, case: CaseTag, projection: ProjectionLabel) -> Result<Self> {
        match case {
            CaseTag::Local => {
                if !phi.is_zero(FLOW_TOL) {
                    return Err(QcaError::InvalidParams(
                        "local case requires phi = 0".into(),
                    ));
                }
            }
            CaseTag::Antidiagonal => {
                let t = theta.to_radians();
                let ok = (wrap_angle(t).abs() - std::f64::consts::FRAC_PI_2).abs() < FLOW_TOL;
                if !ok {
                    return Err(QcaError::InvalidParams(
                        "antidiagonal case requires theta = pi/2 mod pi".into(),
                    ));
                }
            }
            CaseTag::Diagonal => {}
        }
        Ok(Self { phi, theta, case, projection })
    }

    pub fn same_point(&self, other: &FlowState, tol: f64) -> bool {
        self.case == other.case && self.phi.dist(other.phi) < tol && self.theta.dist(other.theta) < tol
    }

    /// Parameters of the automaton this state describes (z-axis for the
    /// diagonal case, x-axis at theta = pi/2 for the antidiagonal one).
    pub fn params(&self) -> Result<QubitQcaParams> {
        match self.case {
            CaseTag::Diagonal | CaseTag::Local => {
                QubitQcaParams::new(self.phi.to_radians(), self.theta.to_radians(), [0.0, 0.0, 1.0])
            }
            CaseTag::Antidiagonal => QubitQcaParams::new(
                self.phi.to_radians(),
                std::f64::consts::FRAC_PI_2,
                [1.0, 0.0, 0.0],
            ),
        }
    }
}

/// One application of the closed-form flow map.
///
/// Diagonal case:
///   Q1 (order a): (2 phi, phi + 4 theta)
///   Q1 (order b): (2 phi, -3 phi - 4 theta)
///   Q2          : (-2 phi, phi)
///   I (x) |c><c|: (0, +-2 (theta + c phi))
/// Antidiagonal case:
///   Q1: (2 phi, -phi), Q2: (-2 phi, phi), I (x) |c><c|: (0, +-(2c-1) phi)
/// Local states are terminal (identity flow).
///
/// The image of every column is a diagonal-type rule, so the case tag
/// transitions to `Diagonal` whenever phi' != 0 and to `Local` otherwise.
pub fn flow_step(s: &FlowState) -> Result<FlowState> {
    let (phi, theta) = (s.phi, s.theta);
    let (phi_p, theta_p) = match s.case {
        CaseTag::Local => return Ok(*s),
        CaseTag::Diagonal => match s.projection {
            ProjectionLabel::Q1A => (phi.scaled(2), Angle::combine(1, phi, 4, theta)),
            ProjectionLabel::Q1B => (phi.scaled(2), Angle::combine(-3, phi, -4, theta)),
            ProjectionLabel::Q2 => (phi.scaled(-2), phi),
            ProjectionLabel::IOtimesC { c, positive }
            | ProjectionLabel::COtimesI { c, positive } => {
                let sign = if positive { 1 } else { -1 };
                (
                    Angle::zero(),
                    Angle::combine(sign * 2 * c as i64, phi, sign * 2, theta),
                )
            }
        },
        CaseTag::Antidiagonal => match s.projection {
            ProjectionLabel::Q1A | ProjectionLabel::Q1B => (phi.scaled(2), phi.scaled(-1)),
            ProjectionLabel::Q2 => (phi.scaled(-2), phi),
            ProjectionLabel::IOtimesC { c, positive }
            | ProjectionLabel::COtimesI { c, positive } => {
                let sign = if positive { 1 } else { -1 };
                (Angle::zero(), phi.scaled(sign * (2 * c as i64 - 1)))
            }
        },
    };
    let case = if phi_p.is_zero(FLOW_TOL) {
        CaseTag::Local
    } else {
        CaseTag::Diagonal
    };
    Ok(FlowState {
        phi: phi_p,
        theta: theta_p,
        case,
        projection: s.projection,
    })
}

/// Why a trajectory stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    FixedPoint,
    Cycle { length: usize },
    MaxIterations,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowTrajectory {
    pub states: Vec<FlowState>,
    pub terminated_by: Termination,
}

/// Applies the flow until a fixed point, a revisited state, or the
/// iteration cap.
pub fn iterate(start: &FlowState, max_iters: usize) -> Result<FlowTrajectory> {
    if max_iters < 1 {
        return Err(QcaError::Precondition("max_iters must be >= 1".into()));
    }
    let mut states = vec![*start];
    let mut terminated_by = Termination::MaxIterations;
    for _ in 0..max_iters {
        let cur = *states.last().unwrap();
        let next = flow_step(&cur)?;
        if next.same_point(&cur, FLOW_TOL) {
            terminated_by = Termination::FixedPoint;
            break;
        }
        if let Some(pos) = states.iter().position(|s| s.same_point(&next, FLOW_TOL)) {
            terminated_by = Termination::Cycle {
                length: states.len() - pos,
            };
            break;
        }
        states.push(next);
    }
    Ok(FlowTrajectory { states, terminated_by })
}

/// Fixed points of one projection column.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixedPointReport {
    /// Isolated fixed points with phi != 0.
    pub isolated: Vec<FlowState>,
    /// Every phi = 0 state is fixed (local rules are flow-terminal).
    pub includes_phi_zero_line: bool,
}

fn diagonal_image(label: ProjectionLabel, phi: Angle, theta: Angle) -> (Angle, Angle) {
    let s = FlowState {
        phi,
        theta,
        case: CaseTag::Diagonal,
        projection: label,
    };
    let img = flow_step(&s).unwrap();
    (img.phi, img.theta)
}

/// Signed wrapped residual of the phi coordinate under the flow.
fn phi_residual(label: ProjectionLabel, phi: f64) -> f64 {
    let (pp, _) = diagonal_image(label, Angle::radians(phi), Angle::zero());
    wrap_angle(pp.to_radians() - phi)
}

fn theta_residual(label: ProjectionLabel, phi: Angle, theta: f64) -> f64 {
    let (_, tp) = diagonal_image(label, phi, Angle::radians(theta));
    wrap_angle(tp.to_radians() - theta)
}

/// Tries to identify v as a small rational multiple of pi.
fn snap_to_pi_rational(v: f64, max_den: i64) -> Option<Angle> {
    let x = wrap_angle(v) / std::f64::consts::PI;
    for den in 1..=max_den {
        let num = (x * den as f64).round();
        if (x - num / den as f64).abs() < 1e-7 {
            return Some(Angle::pi_rational(num as i64, den));
        }
    }
    None
}

fn bisect(mut lo: f64, mut hi: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (flo < 0.0) == (fm < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves flow_step(s) = s (mod 2pi) for diagonal states on a grid, then
/// polishes each root by bisection on the closed-form map. The phi and
/// theta equations decouple, so each is handled as a one-dimensional
/// wrapped root search; converged points are snapped back to exact
/// rationals of pi when possible and re-verified exactly.
pub fn find_fixed_points(label: ProjectionLabel, grid_resolution: usize) -> Result<FixedPointReport> {
    if grid_resolution < 8 {
        return Err(QcaError::Precondition("grid_resolution must be >= 8".into()));
    }
    let res = grid_resolution as i64;
    let grid: Vec<Angle> = (1..=2 * res)
        .map(|k| Angle::pi_rational(k - res, res))
        .collect();

    // phi candidates: roots of wrap(phi' - phi)
    let mut phi_roots: Vec<Angle> = Vec::new();
    let mut push_phi = |a: Angle| {
        if a.is_zero(FLOW_TOL) {
            return;
        }
        if !phi_roots.iter().any(|b| b.dist(a) < 1e-7) {
            phi_roots.push(a);
        }
    };
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (ra, rb) = (
            phi_residual(label, a.to_radians()),
            phi_residual(label, b.to_radians()),
        );
        if ra.abs() < FLOW_TOL {
            push_phi(a);
        }
        if (ra < 0.0) != (rb < 0.0) && ra.abs() < 2.0 && rb.abs() < 2.0 {
            let root = bisect(a.to_radians(), b.to_radians(), |x| phi_residual(label, x));
            if phi_residual(label, root).abs() < 1e-9 {
                let snapped = snap_to_pi_rational(root, 4 * res).unwrap_or(Angle::radians(root));
                push_phi(snapped);
            }
        }
    }
    if let Some(last) = grid.last() {
        if phi_residual(label, last.to_radians()).abs() < FLOW_TOL {
            push_phi(*last);
        }
    }

    // theta roots for each isolated phi
    let mut isolated = Vec::new();
    for phi in phi_roots {
        let push_state = |theta: Angle, out: &mut Vec<FlowState>| {
            let s = FlowState {
                phi,
                theta,
                case: CaseTag::Diagonal,
                projection: label,
            };
            let img = flow_step(&s).unwrap();
            if img.same_point(&s, FLOW_TOL) && !out.iter().any(|o: &FlowState| o.same_point(&s, 1e-7)) {
                out.push(s);
            }
        };
        for w in grid.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (ra, rb) = (
                theta_residual(label, phi, a.to_radians()),
                theta_residual(label, phi, b.to_radians()),
            );
            if ra.abs() < FLOW_TOL {
                push_state(a, &mut isolated);
            }
            if (ra < 0.0) != (rb < 0.0) && ra.abs() < 2.0 && rb.abs() < 2.0 {
                let root = bisect(a.to_radians(), b.to_radians(), |x| {
                    theta_residual(label, phi, x)
                });
                if theta_residual(label, phi, root).abs() < 1e-9 {
                    let snapped = snap_to_pi_rational(root, 4 * res).unwrap_or(Angle::radians(root));
                    push_state(snapped, &mut isolated);
                }
            }
        }
        if let Some(last) = grid.last() {
            if theta_residual(label, phi, last.to_radians()).abs() < FLOW_TOL {
                push_state(*last, &mut isolated);
            }
        }
    }

    Ok(FixedPointReport {
        isolated,
        includes_phi_zero_line: true,
    })
}

/// Runs the numeric pipeline for the state and returns the worst mod-2pi
/// distance between the fitted and the closed-form coarse angles (theta
/// compared in the coarse gauge).
pub fn cross_validate(s: &FlowState, f: usize) -> Result<f64> {
    let p = s.params()?;
    if !renorm::closed_form_renormalizable(&p) {
        return Err(QcaError::Precondition(format!(
            "state (phi={:.6}, theta={:.6}, {:?}) is not renormalizable",
            s.phi.to_radians(),
            s.theta.to_radians(),
            s.case
        )));
    }
    if s.case == CaseTag::Local {
        return Err(QcaError::Precondition(
            "local states are flow-terminal; there is no closed-form image to validate".into(),
        ));
    }
    let tile = s.projection.tile(None);
    let result = renorm::renormalize(&p, &tile, f, &Tolerances::default())?;
    let fitted = result.fitted.ok_or_else(|| {
        QcaError::Precondition("pipeline did not produce a diagonal fitted rule".into())
    })?;
    let img = flow_step(s)?;
    Ok(renorm::coarse_pair_distance(
        (fitted.phi_prime, fitted.theta_prime),
        (img.phi.to_radians(), img.theta.to_radians()),
    ))
}
