//! The five subcommands. Each returns the tables it produced and whether a
//! verified bound was violated.

use std::fmt::Write as _;

use treeheat_core::bounds::{verify_bound, BoundKind, BoundParams, BoundReport, Sweep};
use treeheat_core::functional::{functional_inequality_check, FunctionalFamily};
use treeheat_core::graph::FullGraph;
use treeheat_core::schrodinger::{
    check_bound_with, default_route, operator_shift, riesz_crosscheck_weighted, MomentRoute, RhsKind,
    SchrodingerCheck, SchrodingerParams, SpectrumPair,
};
use treeheat_core::{geometry_scan, Error, PointAddress, SolverConfig, TreeKernel, TreeSpec};

use crate::output::{num, opt, Table};
use crate::run_config::{LabeledPotential, RouteChoice, RunConfig};

/// Named tables plus an optional plain-text report.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub tables: Vec<(&'static str, Table)>,
    pub text: Option<(&'static str, String)>,
    /// Lines for stdout.
    pub summary: Vec<String>,
    pub violated: bool,
}

fn default_r_max(cfg: &RunConfig) -> f64 {
    let extent = cfg.tree.extent();
    if extent.is_finite() {
        extent
    } else {
        cfg.solver.domain_cut
    }
}

pub fn geometry(cfg: &RunConfig) -> Result<CommandOutput, Error> {
    let g = &cfg.geometry;
    let r_max = g.r_max.unwrap_or_else(|| default_r_max(cfg).min(64.0));
    let rep = geometry_scan(&cfg.tree, g.d, g.delta, r_max, g.n_scan)?;
    let mut t = Table::new(&["quantity", "name", "value", "grid_step"]);
    t.comment(format!("tree {}", cfg.tree_label));
    for (q, n, v) in rep.rows() {
        t.push(vec![q.into(), n.into(), num(v), num(rep.grid_step)]);
    }
    let mut summary = vec![format!(
        "doubling constant {} dim_inf {} dim_sup {}",
        num(rep.doubling_constant),
        num(rep.dim_inf),
        num(rep.dim_sup)
    )];
    if rep.dim_sup_unbounded {
        summary.push(format!("dim_sup diverges: g0(r)/r^(d-1) with d = {} grows without bound on the scan", g.d));
    }
    if rep.sobolev_divergent {
        summary.push(format!("S_tilde diverges for delta = {}", g.delta));
    }
    Ok(CommandOutput {
        tables: vec![("geometry.csv", t)],
        text: None,
        summary,
        violated: false,
    })
}

/// Shape of the two-sided envelope `g_0(x) / (√t g_0(x + √t))`.
fn envelope(spec: &TreeSpec, x: f64, t: f64) -> f64 {
    let s = t.sqrt();
    spec.g0_extended(x) / (s * spec.g0_extended(x + s))
}

pub fn heat(cfg: &RunConfig) -> Result<CommandOutput, Error> {
    let sw = &cfg.sweep;
    if sw.x.is_empty() || sw.t.is_empty() {
        return Err(Error::InvalidConfig("heat needs sweep.x and sweep.t (or sweep.t_log)".into()));
    }
    let t_min = sw.t.iter().copied().fold(f64::INFINITY, f64::min);
    let t_max = sw.t.iter().copied().fold(0.0, f64::max);
    if t_max > cfg.solver.t_max {
        return Err(Error::InvalidTime {
            t: t_max,
            t_max: cfg.solver.t_max,
        });
    }
    let x_max = sw.x.iter().copied().fold(0.0, f64::max);
    cfg.solver.check_truncation(x_max)?;
    let solver = cfg.solver.with_min_time(t_min);
    let kernel = TreeKernel::new(&cfg.tree, &solver, cfg.tree.generation_at(x_max))?;
    let mut t = Table::new(&["x_id", "t", "k", "envelope", "universal_bound"]);
    t.comment(format!("tree {}", cfg.tree_label));
    for (i, x) in sw.x.iter().enumerate() {
        t.comment(format!("x_id {i} = {}", num(*x)));
    }
    let mut worst: f64 = 0.0;
    for (i, &x) in sw.x.iter().enumerate() {
        for &time in &sw.t {
            let k = kernel.radial_diagonal(x, time)?;
            let universal = (std::f64::consts::PI * time).powf(-0.5);
            worst = worst.max(k / universal);
            t.push(vec![i.to_string(), num(time), num(k), num(envelope(&cfg.tree, x, time)), num(universal)]);
        }
    }
    Ok(CommandOutput {
        tables: vec![("heat.csv", t)],
        text: None,
        summary: vec![format!("max k/(pi t)^(-1/2) over the sweep: {}", num(worst))],
        violated: false,
    })
}

/// Outcome of one requested bound.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundOutcome {
    Report(Box<BoundReport>),
    /// A precondition of the bound does not hold for this tree.
    NotApplicable(BoundKind, String),
}

pub fn bound_sweep(cfg: &RunConfig) -> Result<Sweep, Error> {
    if cfg.sweep.explicit {
        Sweep::new(cfg.sweep.x.clone(), cfg.sweep.t.clone())
    } else {
        Sweep::default_for(&cfg.tree, &cfg.solver, cfg.sweep.n_times)
    }
}

pub fn run_bounds(cfg: &RunConfig) -> Result<Vec<BoundOutcome>, Error> {
    let b = &cfg.bounds;
    let params = BoundParams {
        dimension: b.d,
        delta: b.delta,
        n_scan: b.n_scan,
    };
    let needs_sweep = b.kinds.iter().any(|k| !k.is_functional());
    let sweep = if needs_sweep { Some(bound_sweep(cfg)?) } else { None };
    let mut out = Vec::new();
    for &kind in &b.kinds {
        let result = if kind.is_functional() {
            let r_max = b.r_max.unwrap_or_else(|| default_r_max(cfg).min(24.0));
            FunctionalFamily::standard(&cfg.tree, r_max).and_then(|f| functional_inequality_check(kind, &cfg.tree, &f))
        } else {
            verify_bound(kind, &cfg.tree, &cfg.solver, sweep.as_ref().expect("built above"), &params)
        };
        match result {
            Ok(rep) => out.push(BoundOutcome::Report(Box::new(rep))),
            Err(Error::Precondition(msg)) => out.push(BoundOutcome::NotApplicable(kind, msg)),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Aligned plain-text verdict table.
pub fn verdict_table(outcomes: &[BoundOutcome]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<16} {:<10} {:>24} {:>24} {:>24} {:>24}",
        "bound", "verdict", "worst_margin", "tolerance", "constant", "stability"
    );
    for o in outcomes {
        match o {
            BoundOutcome::Report(r) => {
                let constant = r.empirical_constant.or(r.explicit_constant);
                let _ = writeln!(
                    s,
                    "{:<16} {:<10} {:>24} {:>24} {:>24} {:>24}",
                    r.kind.name(),
                    r.verdict(),
                    num(r.worst_margin),
                    num(r.tolerance),
                    opt(constant),
                    opt(r.stability)
                );
                for n in &r.notes {
                    let _ = writeln!(s, "    note: {n}");
                }
            }
            BoundOutcome::NotApplicable(kind, msg) => {
                let _ = writeln!(s, "{:<16} {:<10} {msg}", kind.name(), "n/a");
            }
        }
    }
    s
}

pub fn bounds(cfg: &RunConfig) -> Result<CommandOutput, Error> {
    let outcomes = run_bounds(cfg)?;
    let mut summary = Table::new(&[
        "kind",
        "verdict",
        "samples",
        "worst_margin",
        "tolerance",
        "empirical_constant",
        "refined_constant",
        "lower_constant",
        "refined_lower_constant",
        "stability",
        "stability_band",
        "explicit_constant",
        "digest",
    ]);
    let mut rows = Table::new(&["kind", "side", "r", "t", "lhs", "rhs", "margin"]);
    summary.comment(format!("tree {}", cfg.tree_label));
    rows.comment(format!("tree {}", cfg.tree_label));
    let mut violated = false;
    for o in &outcomes {
        match o {
            BoundOutcome::Report(r) => {
                violated |= r.violated;
                summary.push(vec![
                    r.kind.name().into(),
                    r.verdict().into(),
                    r.samples.to_string(),
                    num(r.worst_margin),
                    num(r.tolerance),
                    opt(r.empirical_constant),
                    opt(r.refined_constant),
                    opt(r.lower_constant),
                    opt(r.refined_lower_constant),
                    opt(r.stability),
                    opt(r.stability_band),
                    opt(r.explicit_constant),
                    r.config_digest.clone(),
                ]);
                for row in &r.rows {
                    rows.push(vec![
                        r.kind.name().into(),
                        row.side.name().into(),
                        num(row.r),
                        num(row.t),
                        num(row.lhs),
                        num(row.rhs),
                        num(row.margin),
                    ]);
                }
            }
            BoundOutcome::NotApplicable(kind, msg) => {
                summary.comment(format!("{} not applicable: {msg}", kind.name()));
                let mut row = vec![kind.name().to_string(), "n/a".into()];
                row.resize(13, String::new());
                summary.push(row);
            }
        }
    }
    let table = verdict_table(&outcomes);
    Ok(CommandOutput {
        tables: vec![("bounds_summary.csv", summary), ("bounds.csv", rows)],
        summary: table.lines().map(String::from).collect(),
        text: Some(("bounds_verdict.txt", table)),
        violated,
    })
}

/// Kernel constant used inside the Schrödinger bounds: the configured value
/// or the larger of the fitted constants at both grid levels.
pub fn kernel_constant(cfg: &RunConfig, kind: RhsKind) -> Result<f64, Error> {
    if let Some(c) = cfg.schrodinger.c_envelope {
        return Ok(c);
    }
    let bound = if kind == RhsKind::Homogeneous {
        BoundKind::Homogeneous
    } else {
        BoundKind::DimBound
    };
    let params = BoundParams {
        dimension: cfg.schrodinger.d,
        delta: cfg.bounds.delta,
        n_scan: cfg.bounds.n_scan,
    };
    let sweep = Sweep::default_for(&cfg.tree, &cfg.solver, cfg.sweep.n_times)?;
    let rep = verify_bound(bound, &cfg.tree, &cfg.solver, &sweep, &params)?;
    let c = rep
        .empirical_constant
        .into_iter()
        .chain(rep.refined_constant)
        .fold(0.0, f64::max);
    if !(c > 0.0) {
        return Err(Error::Precondition(format!("fitted kernel constant for {} is not positive", bound.name())));
    }
    Ok(c)
}

fn kind_uses_constant(kind: RhsKind) -> bool {
    !matches!(kind, RhsKind::HalfSharp)
}

fn kind_uses_beta(kind: RhsKind) -> bool {
    matches!(kind, RhsKind::Lieb | RhsKind::TwoTerm | RhsKind::HalfSmall | RhsKind::Homogeneous)
}

/// One evaluated (or skipped) Schrödinger comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct SchrodingerRow {
    pub potential: String,
    pub a: Option<f64>,
    pub check: SchrodingerCheck,
}

/// Moments of one potential by the configured routes.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentRow {
    pub potential: String,
    pub gamma: f64,
    pub radial: Option<f64>,
    pub oracle: Option<f64>,
    pub inclusive: f64,
    pub flagged: u64,
    pub riesz: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchrodingerRun {
    pub moments: Vec<MomentRow>,
    pub rows: Vec<SchrodingerRow>,
    pub skipped: Vec<String>,
}

fn oracle_route(cfg: &RunConfig) -> MomentRoute {
    MomentRoute::Oracle {
        max_generation: cfg.tree.generation_at(cfg.solver.domain_cut).min(cfg.tree.horizon()),
    }
}

pub fn run_schrodinger(cfg: &RunConfig) -> Result<SchrodingerRun, Error> {
    let s = &cfg.schrodinger;
    let spec = &cfg.tree;
    let mut constants: Vec<(bool, Result<f64, String>)> = Vec::new();
    let mut constant_for = |kind: RhsKind| -> Result<f64, String> {
        let homog = kind == RhsKind::Homogeneous;
        if let Some((_, c)) = constants.iter().find(|(h, _)| *h == homog) {
            return c.clone();
        }
        let c = kernel_constant(cfg, kind).map_err(|e| e.to_string());
        constants.push((homog, c.clone()));
        c
    };
    let mut run = SchrodingerRun {
        moments: Vec::new(),
        rows: Vec::new(),
        skipped: Vec::new(),
    };
    for LabeledPotential { label, potential } in &cfg.potentials {
        let main_route = match s.route {
            RouteChoice::Oracle => oracle_route(cfg),
            _ => default_route(spec, potential, &cfg.solver),
        };
        let pair = SpectrumPair::compute(spec, potential, &cfg.solver, main_route, 0.0)?;
        let oracle = if s.route == RouteChoice::Both && main_route == MomentRoute::Radial {
            Some(treeheat_core::schrodinger::negative_spectrum(
                spec,
                potential,
                &cfg.solver,
                oracle_route(cfg),
                0.0,
            )?)
        } else {
            None
        };
        for &gamma in &s.gammas {
            let (m, _) = pair.moment(gamma);
            let riesz = if gamma > 0.0 {
                riesz_crosscheck_weighted(&pair.fine.eigenvalues, gamma)?
            } else {
                0.0
            };
            let (radial, oracle_value) = match main_route {
                MomentRoute::Radial => (Some(m.value), oracle.as_ref().map(|o| o.moment(gamma).value)),
                MomentRoute::Oracle { .. } => (None, Some(m.value)),
            };
            run.moments.push(MomentRow {
                potential: label.clone(),
                gamma,
                radial,
                oracle: oracle_value,
                inclusive: m.inclusive,
                flagged: m.flagged,
                riesz,
            });
        }
        let mut shifted: Option<SpectrumPair> = None;
        for &kind in &s.kinds {
            let c = if kind_uses_constant(kind) {
                match constant_for(kind) {
                    Ok(c) => c,
                    Err(msg) => {
                        run.skipped.push(format!("{label} {}: kernel constant unavailable: {msg}", kind.name()));
                        continue;
                    }
                }
            } else {
                1.0
            };
            let spectra = if kind == RhsKind::Homogeneous {
                if shifted.is_none() {
                    let shift = match operator_shift(kind, spec) {
                        Ok(v) => v,
                        Err(e) => {
                            run.skipped.push(format!("{label} {}: {e}", kind.name()));
                            continue;
                        }
                    };
                    shifted = Some(SpectrumPair::compute(spec, potential, &cfg.solver, main_route, shift)?);
                }
                shifted.as_ref().expect("set above")
            } else {
                &pair
            };
            let betas: Vec<f64> = if kind_uses_beta(kind) { s.betas.clone() } else { vec![1.0] };
            let a_values: Vec<Option<f64>> = if kind == RhsKind::LtExt {
                s.a.iter().copied().map(Some).collect()
            } else {
                vec![None]
            };
            for &gamma in &s.gammas {
                for &beta in &betas {
                    for &a in &a_values {
                        let params = SchrodingerParams {
                            gamma,
                            beta,
                            a: a.unwrap_or(0.0),
                            d: s.d,
                            c_envelope: c,
                        };
                        match check_bound_with(kind, spec, potential, &params, &cfg.solver, spectra) {
                            Ok(mut check) => {
                                if !kind_uses_beta(kind) {
                                    check.beta = check.constants.k_beta.unwrap_or(f64::NAN);
                                }
                                run.rows.push(SchrodingerRow {
                                    potential: label.clone(),
                                    a,
                                    check,
                                });
                            }
                            Err(Error::Domain(msg)) | Err(Error::Precondition(msg)) => {
                                let a_txt = a.map_or(String::new(), |a| format!(" a={a}"));
                                run.skipped.push(format!(
                                    "{label} {} gamma={gamma} beta={beta}{a_txt}: {msg}",
                                    kind.name()
                                ));
                            }
                            Err(e) => return Err(e),
                        }
                        if !kind_uses_beta(kind) && kind != RhsKind::LtExt {
                            break;
                        }
                    }
                }
            }
        }
    }
    Ok(run)
}

pub fn schrodinger(cfg: &RunConfig) -> Result<CommandOutput, Error> {
    let run = run_schrodinger(cfg)?;
    let mut moments = Table::new(&[
        "potential",
        "gamma",
        "radial",
        "oracle",
        "inclusive",
        "near_zero",
        "riesz_discrepancy",
    ]);
    moments.comment(format!("tree {}", cfg.tree_label));
    for m in &run.moments {
        moments.push(vec![
            m.potential.clone(),
            num(m.gamma),
            opt(m.radial),
            opt(m.oracle),
            num(m.inclusive),
            m.flagged.to_string(),
            num(m.riesz),
        ]);
    }
    let mut bounds = Table::new(&["potential", "kind", "gamma", "beta", "a", "lhs", "rhs", "margin", "flags"]);
    bounds.comment(format!("tree {}", cfg.tree_label));
    for s in &run.skipped {
        bounds.comment(format!("skipped {s}"));
    }
    let mut violated = false;
    let mut worst = f64::INFINITY;
    for r in &run.rows {
        let c = &r.check;
        violated |= c.violated;
        worst = worst.min(c.margin);
        let mut flags = c.flags.clone();
        if c.violated {
            flags.insert(0, "violated".into());
        }
        bounds.push(vec![
            r.potential.clone(),
            c.kind.name().into(),
            num(c.gamma),
            num(c.beta),
            opt(r.a),
            num(c.lhs),
            num(c.rhs),
            num(c.margin),
            flags.join(";"),
        ]);
    }
    let summary = vec![format!(
        "{} comparisons, {} skipped, worst margin {}, {}",
        run.rows.len(),
        run.skipped.len(),
        num(worst),
        if violated { "violated" } else { "all hold" }
    )];
    Ok(CommandOutput {
        tables: vec![("schrodinger_moments.csv", moments), ("schrodinger.csv", bounds)],
        text: None,
        summary,
        violated,
    })
}

/// Synthesis against the full-graph oracle on the truncated tree.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub x_id: usize,
    pub y_id: usize,
    pub t: f64,
    pub synthesis: f64,
    pub oracle: f64,
}

/// Kernel values below this fraction of `(4πt)^{-1/2}` are compared in
/// absolute terms: both discretizations only resolve them to roundoff.
pub const RELATIVE_FLOOR: f64 = 1e-6;

impl OracleRow {
    /// `|synthesis - oracle| / max(|oracle|, RELATIVE_FLOOR (4πt)^{-1/2})`.
    pub fn relative_error(&self) -> f64 {
        let floor = RELATIVE_FLOOR * (4.0 * std::f64::consts::PI * self.t).powf(-0.5);
        (self.synthesis - self.oracle).abs() / self.oracle.abs().max(floor)
    }
}

pub fn oracle_points(spec: &TreeSpec, radii: &[f64], branch: u32) -> Result<Vec<PointAddress>, Error> {
    radii.iter().map(|&r| PointAddress::along_branch(spec, r, branch)).collect()
}

pub fn run_oracle_compare(spec: &TreeSpec, solver: &SolverConfig, xs: &[PointAddress], ys: &[PointAddress], ts: &[f64]) -> Result<Vec<OracleRow>, Error> {
    let t_min = ts.iter().copied().fold(f64::INFINITY, f64::min);
    let solver = solver.with_min_time(t_min);
    let kernel = TreeKernel::full(spec, &solver)?;
    let graph = FullGraph::build(spec, spec.horizon(), &solver, None)?;
    let mut rows = Vec::new();
    for (j, y) in ys.iter().enumerate() {
        let Some(node_y) = graph.node_of(spec, y)? else {
            return Err(Error::OutOfDomain {
                radius: y.radial(),
                lo: 0.0,
                hi: solver.domain_cut,
            });
        };
        let cols = graph.kernel_columns(node_y, ts)?;
        for (i, x) in xs.iter().enumerate() {
            let Some(node_x) = graph.node_of(spec, x)? else {
                return Err(Error::OutOfDomain {
                    radius: x.radial(),
                    lo: 0.0,
                    hi: solver.domain_cut,
                });
            };
            for (col, &t) in cols.iter().zip(ts) {
                let synthesis = kernel.evaluate(x, y, t)?.value;
                rows.push(OracleRow {
                    x_id: i,
                    y_id: j,
                    t,
                    synthesis,
                    oracle: col[node_x],
                });
            }
        }
    }
    rows.sort_by(|a, b| (a.x_id, a.y_id).cmp(&(b.x_id, b.y_id)).then(a.t.total_cmp(&b.t)));
    Ok(rows)
}

pub fn oracle_compare(cfg: &RunConfig) -> Result<CommandOutput, Error> {
    let sw = &cfg.sweep;
    if sw.x.is_empty() || sw.t.is_empty() {
        return Err(Error::InvalidConfig("oracle-compare needs sweep.x and sweep.t".into()));
    }
    let spec = match cfg.oracle_generation {
        Some(g) => cfg.tree.truncated(g)?,
        None => cfg.tree.clone(),
    };
    let y_radii = if sw.y.is_empty() { &sw.x } else { &sw.y };
    let xs = oracle_points(&spec, &sw.x, sw.x_branch)?;
    let ys = oracle_points(&spec, y_radii, sw.y_branch)?;
    let rows = run_oracle_compare(&spec, &cfg.solver, &xs, &ys, &sw.t)?;
    let mut t = Table::new(&["x_id", "y_id", "t", "synthesis", "oracle", "relative_error"]);
    t.comment(format!("tree {} truncated at generation {}", cfg.tree_label, spec.horizon()));
    for (i, p) in xs.iter().enumerate() {
        t.comment(format!("x_id {i} = {} on branch {:?}", num(p.radial()), p.path()));
    }
    for (i, p) in ys.iter().enumerate() {
        t.comment(format!("y_id {i} = {} on branch {:?}", num(p.radial()), p.path()));
    }
    let mut max_err: f64 = 0.0;
    for r in &rows {
        let e = r.relative_error();
        max_err = max_err.max(e);
        t.push(vec![
            r.x_id.to_string(),
            r.y_id.to_string(),
            num(r.t),
            num(r.synthesis),
            num(r.oracle),
            num(e),
        ]);
    }
    let line = format!("max_relative_error {}", num(max_err));
    t.trailer(line.clone());
    Ok(CommandOutput {
        tables: vec![("oracle_compare.csv", t)],
        text: None,
        summary: vec![line],
        violated: false,
    })
}
