//! Thin command-line front end over the qca_renorm library.
//!
//! Subcommands: check, renorm, scan, flow, index, reproduce. Output is JSON
//! (default) or CSV where tabular. Exit codes: 0 success, 1 analysis
//! negative (e.g. non-renormalizable input to `renorm`, failed reproduce
//! check), 2 config error, 3 internal numerical-instability or
//! predicate/numeric disagreement.
//!
//! Angles are radians, or rational multiples of pi written like `2/3 pi`,
//! `pi`, `-1/2pi`. A flat `key = value` config file can predefine any flag;
//! explicit flags override it. The optional QCAR_WORKERS variable caps the
//! scan worker count.

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qca_renorm::error::QcaError;
use qca_renorm::flow::{self, Angle, CaseTag, FlowState, ProjectionLabel};
use qca_renorm::linalg::{wrap_angle, ComplexMatrix};
use qca_renorm::qca::{
    build_identity, build_shift, build_step_unitary, QubitQcaParams, StepUnitary, WrappedLattice,
};
use qca_renorm::renorm::{
    align_theta_branch, coarse_pair_distance, enumerate_tile_projections, renormalize_step,
    TileFamily, TileProjection, Tolerances,
};
use qca_renorm::report::{
    classification_name, CheckReport, ClosedFormComparison, FlowReport,
    IndexReport, RenormReport, ReproduceReport, ScanReport, SCHEMA_VERSION,
};
use qca_renorm::scan::{run_scan, scan_point, ScanGrid};
use qca_renorm::{acceptance, algebra};

#[derive(Parser)]
#[command(name = "qcar", version, about = "wrapped qubit QCA renormalization toolkit")]
struct Cli {
    /// Flat key = value config file mirroring the flags (flags win).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide size-2 renormalizability of a parameter point.
    Check(CheckArgs),
    /// Extract, fit and classify the renormalized rule for one projection.
    Renorm(CommonArgs),
    /// Sweep a (phi, theta) x axes grid and cross-check the predicate.
    Scan(ScanArgs),
    /// Iterate the closed-form renormalization flow.
    Flow(FlowArgs),
    /// Compute the information-flow index of a generator.
    Index(CommonArgs),
    /// Run the full reproduction suite.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// Controlled-phase angle (radians or `p/q pi`).
    #[arg(long)]
    phi: Option<String>,
    /// Rotation angle (radians or `p/q pi`).
    #[arg(long)]
    theta: Option<String>,
    /// Rotation axis `x,y,z` (normalized).
    #[arg(long)]
    axis: Option<String>,
    /// Euler angles `a1,g,a2` instead of theta/axis.
    #[arg(long)]
    euler: Option<String>,
    /// Generator: qubit | shift:k | identity | file:PATH.
    #[arg(long)]
    generator: Option<String>,
    /// Ring size in cells.
    #[arg(long)]
    cells: Option<usize>,
    /// Coarse tiles for the renormalization pipeline.
    #[arg(long)]
    tiles: Option<usize>,
    /// Tile projection: Q1|Q1b|Q2|Q2b|IxC0|IxC1|C0xI|C1xI|file:PATH.
    #[arg(long)]
    proj: Option<String>,
    /// Commutation tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// json (default) or csv where tabular.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args, Clone, Default)]
struct CheckArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Also probe this many Haar-random rank-2 tiles (falsification probe;
    /// the enumerated families are the only ones that can succeed).
    #[arg(long)]
    random_probes: Option<usize>,
}

#[derive(Args, Clone, Default)]
struct ScanArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Grid steps along phi.
    #[arg(long)]
    phi_steps: Option<usize>,
    /// Grid steps along theta.
    #[arg(long)]
    theta_steps: Option<usize>,
}

#[derive(Args, Clone, Default)]
struct FlowArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Iteration cap.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Cross-validate each step against the numeric pipeline at this many
    /// tiles.
    #[arg(long)]
    validate: Option<usize>,
    /// Search fixed points at this grid resolution instead of iterating.
    #[arg(long)]
    fixed_points: Option<usize>,
}

#[derive(Args, Clone, Default)]
struct ReproduceArgs {
    /// Replace the pinned residual bounds (testing hook; 1e-30 forces red).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// json for the machine-readable summary.
    #[arg(long)]
    format: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(workers) = std::env::var("QCAR_WORKERS") {
        if let Ok(n) = workers.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cfg = match cli.config.as_deref().map(read_config).transpose() {
        Ok(m) => m.unwrap_or_default(),
        Err(e) => return fail(2, &e),
    };
    let code = match cli.cmd {
        Cmd::Check(a) => cmd_check(CheckArgs {
            common: merge(a.common, &cfg),
            random_probes: a.random_probes.or_else(|| cfg_usize(&cfg, "random_probes")),
        }),
        Cmd::Renorm(a) => cmd_renorm(merge(a, &cfg)),
        Cmd::Scan(a) => cmd_scan(ScanArgs {
            common: merge(a.common, &cfg),
            phi_steps: a.phi_steps.or_else(|| cfg_usize(&cfg, "phi_steps")),
            theta_steps: a.theta_steps.or_else(|| cfg_usize(&cfg, "theta_steps")),
        }),
        Cmd::Flow(a) => cmd_flow(FlowArgs {
            common: merge(a.common, &cfg),
            max_iters: a.max_iters.or_else(|| cfg_usize(&cfg, "max_iters")),
            validate: a.validate.or_else(|| cfg_usize(&cfg, "validate")),
            fixed_points: a.fixed_points.or_else(|| cfg_usize(&cfg, "fixed_points")),
        }),
        Cmd::Index(a) => cmd_index(merge(a, &cfg)),
        Cmd::Reproduce(a) => cmd_reproduce(a),
    };
    match code {
        Ok(c) => c,
        Err(e) => fail(classify_error(&e), &format!("{e}")),
    }
}

fn fail(code: u8, msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn rand_seed() -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(0x9c4)
}

fn classify_error(e: &QcaError) -> u8 {
    match e {
        QcaError::Config(_) | QcaError::InvalidParams(_) | QcaError::Precondition(_)
        | QcaError::LatticeTooSmall(..) | QcaError::SizeCap(..) | QcaError::DimensionMismatch(_)
        | QcaError::DegenerateProjection { .. } => 2,
        QcaError::NotUnitary { .. } | QcaError::ClosureUnstable(_) | QcaError::NonDiagonal => 3,
    }
}

// ---- config file -----------------------------------------------------

fn read_config(path: &std::path::Path) -> Result<HashMap<String, String>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("config {}: {e}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config {}:{}: expected key = value", path.display(), lineno + 1))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn cfg_usize(cfg: &HashMap<String, String>, key: &str) -> Option<usize> {
    cfg.get(key).and_then(|v| v.parse().ok())
}

fn merge(mut a: CommonArgs, cfg: &HashMap<String, String>) -> CommonArgs {
    let s = |k: &str| cfg.get(k).cloned();
    a.phi = a.phi.or_else(|| s("phi"));
    a.theta = a.theta.or_else(|| s("theta"));
    a.axis = a.axis.or_else(|| s("axis"));
    a.euler = a.euler.or_else(|| s("euler"));
    a.generator = a.generator.or_else(|| s("generator"));
    a.cells = a.cells.or_else(|| cfg_usize(cfg, "cells"));
    a.tiles = a.tiles.or_else(|| cfg_usize(cfg, "tiles"));
    a.proj = a.proj.or_else(|| s("proj"));
    a.tol = a.tol.or_else(|| cfg.get("tol").and_then(|v| v.parse().ok()));
    a.out = a.out.or_else(|| s("out").map(PathBuf::from));
    a.format = a.format.or_else(|| s("format"));
    a
}

// ---- parsing helpers ---------------------------------------------------

/// Parses radians or the literal `p/q pi` form; the exact rational is kept
/// so the flow can run on exact angle arithmetic.
fn parse_angle(s: &str) -> Result<Angle, QcaError> {
    let t = s.trim();
    if let Some(prefix) = t.strip_suffix("pi") {
        let p = prefix.trim();
        let (num, den) = if p.is_empty() || p == "+" {
            (1i64, 1i64)
        } else if p == "-" {
            (-1, 1)
        } else if let Some((n, d)) = p.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad_angle(s))?;
            let d: i64 = d.trim().parse().map_err(|_| bad_angle(s))?;
            if d == 0 {
                return Err(bad_angle(s));
            }
            (n, d)
        } else if let Ok(n) = p.parse::<i64>() {
            (n, 1)
        } else {
            let f: f64 = p.parse().map_err(|_| bad_angle(s))?;
            return Ok(Angle::radians(f * std::f64::consts::PI));
        };
        Ok(Angle::pi_rational(num, den))
    } else {
        let f: f64 = t.parse().map_err(|_| bad_angle(s))?;
        Ok(Angle::radians(f))
    }
}

fn bad_angle(s: &str) -> QcaError {
    QcaError::Config(format!("cannot parse angle '{s}' (use radians or 'p/q pi')"))
}

fn parse_triple(s: &str, what: &str) -> Result<[f64; 3], QcaError> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| QcaError::Config(format!("{what} must be three comma-separated numbers")))?;
    if parts.len() != 3 {
        return Err(QcaError::Config(format!("{what} must have three components")));
    }
    Ok([parts[0], parts[1], parts[2]])
}

fn parse_params(a: &CommonArgs) -> Result<QubitQcaParams, QcaError> {
    let phi = a
        .phi
        .as_deref()
        .map(parse_angle)
        .transpose()?
        .ok_or_else(|| QcaError::Config("--phi is required".into()))?
        .to_radians();
    if let Some(euler) = &a.euler {
        let [a1, g, a2] = parse_triple(euler, "--euler")?;
        return QubitQcaParams::from_euler(phi, a1, g, a2);
    }
    let theta = a
        .theta
        .as_deref()
        .map(parse_angle)
        .transpose()?
        .ok_or_else(|| QcaError::Config("--theta (or --euler) is required".into()))?
        .to_radians();
    let axis = match &a.axis {
        Some(s) => parse_triple(s, "--axis")?,
        None => [0.0, 0.0, 1.0],
    };
    QubitQcaParams::new(phi, theta, axis)
}

fn parse_proj(a: &CommonArgs, p: &QubitQcaParams) -> Result<TileProjection, QcaError> {
    let spec = a.proj.as_deref().unwrap_or("Q1");
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| QcaError::Config(format!("projector file {path}: {e}")))?;
        let m: ComplexMatrix = serde_json::from_str(&text)
            .map_err(|e| QcaError::Config(format!("projector file {path}: {e}")))?;
        return TileProjection::custom(m);
    }
    let family_of = |name: &str| match name {
        "Q1" => Some(TileFamily::Q1),
        "Q2" => Some(TileFamily::Q2),
        "IxC0" => Some(TileFamily::IOtimesC(0)),
        "IxC1" => Some(TileFamily::IOtimesC(1)),
        "C0xI" => Some(TileFamily::COtimesI(0)),
        "C1xI" => Some(TileFamily::COtimesI(1)),
        _ => None,
    };
    // a trailing 'b' selects the reversed eigenbasis order (second branch)
    let (family, flipped) = match family_of(spec) {
        Some(f) => (f, false),
        None => match spec.strip_suffix('b').and_then(family_of) {
            Some(f) => (f, true),
            None => {
                return Err(QcaError::Config(format!(
                    "unknown projection '{spec}' (use Q1[b]|Q2[b]|IxC0[b]|IxC1[b]|C0xI[b]|C1xI[b]|file:<path>)"
                )))
            }
        },
    };
    let tile = enumerate_tile_projections(p)
        .into_iter()
        .find(|t| t.family == family && !t.eigenbasis)
        .expect("computational families always enumerated");
    Ok(if flipped { tile.flip() } else { tile })
}

/// Builds the one-step unitary named by --generator on the given ring.
fn parse_generator(a: &CommonArgs, n_cells: usize) -> Result<(String, StepUnitary), QcaError> {
    let lat = WrappedLattice::new(n_cells)?;
    let spec = a.generator.as_deref().unwrap_or("qubit");
    if spec == "qubit" {
        let p = parse_params(a)?;
        let label = format!("qubit(phi={:.6}, theta={:.6})", p.phi, p.theta);
        return Ok((label, build_step_unitary(&p, lat)?));
    }
    if spec == "identity" {
        return Ok(("identity".into(), build_identity(lat)));
    }
    if let Some(k) = spec.strip_prefix("shift:") {
        let k: i64 = k
            .parse()
            .map_err(|_| QcaError::Config(format!("bad shift offset '{k}'")))?;
        return Ok((format!("shift:{k}"), build_shift(lat, k)));
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| QcaError::Config(format!("generator file {path}: {e}")))?;
        let m: ComplexMatrix = serde_json::from_str(&text)
            .map_err(|e| QcaError::Config(format!("generator file {path}: {e}")))?;
        return Ok((format!("file:{path}"), StepUnitary::from_matrix(lat, m, "user")?));
    }
    Err(QcaError::Config(format!(
        "unknown generator '{spec}' (use qubit | shift:k | identity | file:<path>)"
    )))
}

fn emit(out: &Option<PathBuf>, payload: &str) -> Result<(), QcaError> {
    match out {
        None => {
            if payload.ends_with('\n') {
                print!("{payload}");
            } else {
                println!("{payload}");
            }
            Ok(())
        }
        Some(path) => std::fs::write(path, payload.as_bytes())
            .map_err(|e| QcaError::Config(format!("writing {}: {e}", path.display()))),
    }
}

// ---- subcommands -------------------------------------------------------

fn cmd_check(args: CheckArgs) -> Result<ExitCode, QcaError> {
    let a = args.common;
    let p = parse_params(&a)?;
    let cells = a.cells.unwrap_or(8);
    let tol = a.tol.unwrap_or(1e-9);
    let mut row = scan_point(&p, cells, tol)?;
    if let Some(n) = args.random_probes {
        let mut rng = rand_seed();
        for k in 0..n {
            let tile = qca_renorm::renorm::random_tile_projection(&mut rng);
            let r = qca_renorm::renorm::wrapped_commutation_residual(&p, cells, 2, &tile)?;
            if r < tol {
                row.witnesses.push(format!("random#{k}"));
                row.numeric = true;
            }
            row.residuals.push((format!("random#{k}"), r));
        }
    }
    let report = CheckReport {
        schema_version: SCHEMA_VERSION.into(),
        phi: p.phi,
        theta: p.theta,
        axis: p.axis,
        n_cells: cells,
        tolerance: tol,
        predicate: row.predicate,
        numeric: row.numeric,
        agreement: row.predicate == row.numeric,
        witnesses: row.witnesses.clone(),
        residuals: row.residuals.clone(),
    };
    emit(&a.out, &serde_json::to_string_pretty(&report).unwrap())?;
    if !report.agreement {
        eprintln!(
            "predicate/numeric disagreement: predicate={} numeric={}",
            report.predicate, report.numeric
        );
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_renorm(a: CommonArgs) -> Result<ExitCode, QcaError> {
    let f = a.tiles.unwrap_or(4);
    let cells = 2 * f;
    let mut tol = Tolerances::default();
    if let Some(t) = a.tol {
        tol.commutation = t;
    }
    let generator_spec = a.generator.as_deref().unwrap_or("qubit").to_string();
    let (label, step) = parse_generator(&a, cells)?;
    let qubit_params = if generator_spec == "qubit" {
        Some(parse_params(&a)?)
    } else {
        None
    };
    let tile = {
        let probe = qubit_params
            .clone()
            .unwrap_or_else(|| QubitQcaParams::new(1.0, 1.0, [0.0, 0.0, 1.0]).unwrap());
        parse_proj(&a, &probe)?
    };
    let step2 = step.pow(2);
    let result = renormalize_step(&step2, &tile, &tol)?;

    if !result.renormalizable {
        // structured refusal with per-tile residuals
        let residuals = match &qubit_params {
            Some(p) => scan_point(p, cells, tol.commutation)?.residuals,
            None => vec![(tile.label(), result.commutator_residual)],
        };
        let refusal = serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "generator": label,
            "renormalizable": false,
            "tile": tile.label(),
            "commutator_residual": result.commutator_residual,
            "per_tile_residuals": residuals,
        });
        emit(&a.out, &serde_json::to_string_pretty(&refusal).unwrap())?;
        return Ok(ExitCode::from(1));
    }

    // closed-form comparison for qubit generators with labelled projections
    let closed_form = qubit_params.as_ref().and_then(|p| {
        let state = flow_state_for(p, &tile)?;
        let img = flow::flow_step(&state).ok()?;
        let fit = result.fitted.as_ref()?;
        let aligned = align_theta_branch(fit.theta_prime, img.theta.to_radians());
        Some(ClosedFormComparison {
            projection: state.projection.name(),
            phi_prime: img.phi.to_radians(),
            theta_prime: img.theta.to_radians(),
            fitted_phi_prime: fit.phi_prime,
            fitted_theta_prime_aligned: aligned,
            distance: coarse_pair_distance(
                (fit.phi_prime, fit.theta_prime),
                (img.phi.to_radians(), img.theta.to_radians()),
            ),
        })
    });
    let fixed_point = match (&qubit_params, &result.fitted) {
        (Some(p), Some(fit)) => {
            coarse_pair_distance((fit.phi_prime, fit.theta_prime), (p.phi, p.theta)) < 1e-9
        }
        _ => false,
    };
    let report = RenormReport {
        schema_version: SCHEMA_VERSION.into(),
        generator: label,
        tile: tile.label(),
        n_tiles: f,
        result,
        closed_form,
        fixed_point,
    };
    if report.fixed_point {
        eprintln!("FIXED-POINT: the renormalized rule equals the input rule");
    }
    eprintln!(
        "classification: {}",
        classification_name(&report.result.classification)
    );
    emit(&a.out, &serde_json::to_string_pretty(&report).unwrap())?;
    Ok(ExitCode::SUCCESS)
}

/// Maps qubit parameters plus a labelled tile onto a flow state, when the
/// parameters sit in one of the closed-form rows.
fn flow_state_for(p: &QubitQcaParams, tile: &TileProjection) -> Option<FlowState> {
    let label = match (tile.family, tile.flipped) {
        (TileFamily::Q1, false) => ProjectionLabel::Q1A,
        (TileFamily::Q1, true) => ProjectionLabel::Q1B,
        (TileFamily::Q2, _) => ProjectionLabel::Q2,
        (TileFamily::IOtimesC(c), fl) => ProjectionLabel::IOtimesC { c, positive: !fl },
        (TileFamily::COtimesI(c), fl) => ProjectionLabel::COtimesI { c, positive: !fl },
        (TileFamily::Custom, _) => return None,
    };
    let case = if wrap_angle(p.phi).abs() < 1e-9 {
        CaseTag::Local
    } else if p.is_diagonal_rule(1e-9) {
        CaseTag::Diagonal
    } else if p.is_antidiagonal_rule(1e-9) {
        CaseTag::Antidiagonal
    } else {
        return None;
    };
    // the flow tracks the z-axis effective rotation angle
    let theta_eff = if case == CaseTag::Diagonal && p.axis[2] < 0.0 {
        -p.theta
    } else {
        p.theta
    };
    FlowState::new(
        Angle::radians(p.phi),
        Angle::radians(theta_eff),
        case,
        label,
    )
    .ok()
}

fn cmd_scan(a: ScanArgs) -> Result<ExitCode, QcaError> {
    let grid = ScanGrid {
        phi_steps: a.phi_steps.unwrap_or(24),
        theta_steps: a.theta_steps.unwrap_or(24),
        axes: ScanGrid::reference_grid().axes,
    };
    if grid.phi_steps < 2 || grid.theta_steps < 2 {
        return Err(QcaError::Config("grid steps must be >= 2".into()));
    }
    let cells = a.common.cells.unwrap_or(8);
    let tol = a.common.tol.unwrap_or(1e-9);
    let outcome = run_scan(&grid, cells, tol)?;
    let disagreements = outcome.disagreements;
    let payload = match a.common.format.as_deref() {
        Some("csv") => outcome.to_csv(),
        _ => serde_json::to_string_pretty(&ScanReport {
            schema_version: SCHEMA_VERSION.into(),
            outcome,
        })
        .unwrap(),
    };
    emit(&a.common.out, &payload)?;
    if disagreements > 0 {
        eprintln!("{disagreements} predicate/numeric disagreements");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_flow(a: FlowArgs) -> Result<ExitCode, QcaError> {
    let label = parse_flow_label(a.common.proj.as_deref().unwrap_or("Q2"))?;

    if let Some(res) = a.fixed_points {
        let report = flow::find_fixed_points(label, res)?;
        emit(&a.common.out, &serde_json::to_string_pretty(&report).unwrap())?;
        return Ok(ExitCode::SUCCESS);
    }

    let phi = a
        .common
        .phi
        .as_deref()
        .map(parse_angle)
        .transpose()?
        .ok_or_else(|| QcaError::Config("--phi is required".into()))?;
    let theta = a
        .common
        .theta
        .as_deref()
        .map(parse_angle)
        .transpose()?
        .ok_or_else(|| QcaError::Config("--theta is required".into()))?;
    let params = QubitQcaParams::new(
        phi.to_radians(),
        theta.to_radians(),
        a.common
            .axis
            .as_deref()
            .map(|s| parse_triple(s, "--axis"))
            .transpose()?
            .unwrap_or([0.0, 0.0, 1.0]),
    )?;
    let case = if phi.is_zero(1e-9) {
        CaseTag::Local
    } else if params.is_diagonal_rule(1e-9) {
        CaseTag::Diagonal
    } else if params.is_antidiagonal_rule(1e-9) {
        CaseTag::Antidiagonal
    } else {
        eprintln!("start point is not renormalizable; no closed-form flow applies");
        return Ok(ExitCode::from(1));
    };
    let start = FlowState::new(phi, theta, case, label)?;
    let traj = flow::iterate(&start, a.max_iters.unwrap_or(64))?;
    let cross_validation = match a.validate {
        None => None,
        Some(f) => {
            let mut v = Vec::new();
            for s in &traj.states {
                if s.case == CaseTag::Local {
                    break;
                }
                v.push(flow::cross_validate(s, f)?);
            }
            Some(v)
        }
    };
    let report = FlowReport {
        schema_version: SCHEMA_VERSION.into(),
        trajectory: traj,
        cross_validation,
    };
    let payload = match a.common.format.as_deref() {
        Some("csv") => report.to_csv(),
        _ => serde_json::to_string_pretty(&report).unwrap(),
    };
    emit(&a.common.out, &payload)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_flow_label(s: &str) -> Result<ProjectionLabel, QcaError> {
    let norm = s.replace('_', "").to_ascii_lowercase();
    let label = match norm.as_str() {
        "q1" | "q1a" => ProjectionLabel::Q1A,
        "q1b" => ProjectionLabel::Q1B,
        "q2" | "q2a" | "q2b" => ProjectionLabel::Q2,
        "ixc0" | "ixc0+" => ProjectionLabel::IOtimesC { c: 0, positive: true },
        "ixc0-" => ProjectionLabel::IOtimesC { c: 0, positive: false },
        "ixc1" | "ixc1+" => ProjectionLabel::IOtimesC { c: 1, positive: true },
        "ixc1-" => ProjectionLabel::IOtimesC { c: 1, positive: false },
        "c0xi" | "c0xi+" => ProjectionLabel::COtimesI { c: 0, positive: true },
        "c0xi-" => ProjectionLabel::COtimesI { c: 0, positive: false },
        "c1xi" | "c1xi+" => ProjectionLabel::COtimesI { c: 1, positive: true },
        "c1xi-" => ProjectionLabel::COtimesI { c: 1, positive: false },
        other => {
            return Err(QcaError::Config(format!(
                "unknown flow projection '{other}'"
            )))
        }
    };
    Ok(label)
}

fn cmd_index(a: CommonArgs) -> Result<ExitCode, QcaError> {
    let cells = a.cells.unwrap_or(6);
    let (label, step) = parse_generator(&a, cells)?;
    let index = algebra::qca_index(&step)?;
    let report = IndexReport {
        schema_version: SCHEMA_VERSION.into(),
        generator: label,
        margolus_realizable: index.dim_l == index.dim_cell,
        index,
    };
    emit(&a.out, &serde_json::to_string_pretty(&report).unwrap())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_reproduce(a: ReproduceArgs) -> Result<ExitCode, QcaError> {
    let criteria = acceptance::run_all(a.tol)?;
    let all_passed = criteria.iter().all(|c| c.passed);
    if a.format.as_deref() == Some("json") {
        let report = ReproduceReport {
            schema_version: SCHEMA_VERSION.into(),
            criteria,
            all_passed,
        };
        emit(&a.out, &serde_json::to_string_pretty(&report).unwrap())?;
    } else {
        let mut table = String::new();
        for c in &criteria {
            table.push_str(&format!(
                "criterion {:>2}  {:4}  {}\n",
                c.id,
                if c.passed { "PASS" } else { "FAIL" },
                c.name
            ));
            for line in &c.checks {
                table.push_str(&format!(
                    "    [{}] {:<64} measured={:<12.4e} expected={:<12.4e} tol={:.1e}\n",
                    if line.passed { "ok" } else { "XX" },
                    line.check,
                    line.measured,
                    line.expected,
                    line.tolerance
                ));
            }
        }
        table.push_str(&format!(
            "overall: {}\n",
            if all_passed { "PASS" } else { "FAIL" }
        ));
        emit(&a.out, &table)?;
    }
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_literals() {
        let pi = std::f64::consts::PI;
        assert!((parse_angle("2/3 pi").unwrap().to_radians() - 2.0 * pi / 3.0).abs() < 1e-15);
        assert!((parse_angle("2/3pi").unwrap().to_radians() - 2.0 * pi / 3.0).abs() < 1e-15);
        assert!((parse_angle("pi").unwrap().to_radians() - pi).abs() < 1e-15);
        // -pi normalizes to +pi in the (-pi, pi] convention
        assert!((parse_angle("-pi").unwrap().to_radians() - pi).abs() < 1e-15);
        assert!((parse_angle("-1/2 pi").unwrap().to_radians() + pi / 2.0).abs() < 1e-15);
        // 2 pi wraps back to zero
        assert!(parse_angle("2pi").unwrap().to_radians().abs() < 1e-15);
        assert!((parse_angle("0.37").unwrap().to_radians() - 0.37).abs() < 1e-15);
        // non-integer multiples of pi fall back to floats
        assert!((parse_angle("0.5pi").unwrap().to_radians() - pi / 2.0).abs() < 1e-12);
        assert!(parse_angle("three pi").is_err());
        assert!(parse_angle("1/0 pi").is_err());
    }

    #[test]
    fn flow_labels() {
        assert_eq!(parse_flow_label("Q1_a").unwrap(), ProjectionLabel::Q1A);
        assert_eq!(parse_flow_label("q1b").unwrap(), ProjectionLabel::Q1B);
        assert_eq!(
            parse_flow_label("IxC1-").unwrap(),
            ProjectionLabel::IOtimesC { c: 1, positive: false }
        );
        assert!(parse_flow_label("Q7").is_err());
    }
}
