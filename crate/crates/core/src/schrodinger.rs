//! Negative spectrum of `-Δ - V` on a tree and the Lieb-Thirring type
//! bounds built from the diagonal heat kernel estimates.
//!
//! Moments are computed on the truncated tree (Dirichlet at the cut), which
//! can only raise eigenvalues, so computed left-hand sides never exceed the
//! moments of the full tree.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::graph::FullGraph;
use crate::homogeneous::lambda_closed_form;
use crate::radial::{radial_operator, SolverConfig};
use crate::special::{beta as beta_fn, exp_integral_e2, gamma as gamma_fn, gauss_legendre, log_scan_min};
use crate::tree::TreeSpec;

/// Eigenvalues with `|λ|` below this are excluded from moments and flagged.
pub const ZERO_THRESHOLD: f64 = 1e-8;
/// Smallest tolerance for moment comparisons.
pub const MOMENT_TOLERANCE: f64 = 1e-9;

/// Tabulated potential on one edge: offsets from the edge's start radius.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTable {
    pub edge: usize,
    pub offsets: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    Zero,
    /// `v0 (1 + |x|)^{-p}`.
    RadialPower { v0: f64, p: f64 },
    /// Piecewise linear in `|x|`, zero outside the table.
    RadialTable { nodes: Vec<f64>, values: Vec<f64> },
    /// Piecewise linear on each listed edge, zero elsewhere.
    PerEdge { tables: Vec<EdgeTable> },
    /// `base` on one side of the partition `V g_0^{2/(d-1)} < β`.
    Restricted {
        base: Box<PotentialSpec>,
        spec: Box<TreeSpec>,
        beta: f64,
        dimension: f64,
        plus: bool,
    },
}

/// A potential `V >= 0`; negative input values are replaced by zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    kind: PotentialKind,
    scale: f64,
    nonnegative: bool,
}

fn check_table(nodes: &[f64], values: &[f64]) -> Result<()> {
    if nodes.len() != values.len() || nodes.len() < 2 {
        return Err(Error::Domain("potential table needs at least two nodes and one value per node".into()));
    }
    if nodes.iter().chain(values).any(|x| !x.is_finite()) {
        return Err(Error::Domain("potential table entries must be finite".into()));
    }
    if nodes.windows(2).any(|w| w[1] <= w[0]) || nodes[0] < 0.0 {
        return Err(Error::Domain("potential table nodes must be nonnegative and increasing".into()));
    }
    Ok(())
}

fn interpolate(nodes: &[f64], values: &[f64], x: f64) -> f64 {
    if x < nodes[0] || x > nodes[nodes.len() - 1] {
        return 0.0;
    }
    let k = nodes.partition_point(|&n| n <= x).clamp(1, nodes.len() - 1);
    let (x0, x1) = (nodes[k - 1], nodes[k]);
    let w = (x - x0) / (x1 - x0);
    values[k - 1] * (1.0 - w) + values[k] * w
}

impl PotentialSpec {
    pub fn zero() -> Self {
        Self {
            kind: PotentialKind::Zero,
            scale: 1.0,
            nonnegative: true,
        }
    }

    pub fn radial_power(v0: f64, p: f64) -> Result<Self> {
        if !v0.is_finite() || !(p >= 0.0) || !p.is_finite() {
            return Err(Error::Domain(format!("radial_power needs finite v0 and p >= 0, got ({v0}, {p})")));
        }
        Ok(Self {
            kind: PotentialKind::RadialPower { v0, p },
            scale: 1.0,
            nonnegative: v0 >= 0.0,
        })
    }

    pub fn radial_table(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_table(&nodes, &values)?;
        let nonnegative = values.iter().all(|&v| v >= 0.0);
        Ok(Self {
            kind: PotentialKind::RadialTable { nodes, values },
            scale: 1.0,
            nonnegative,
        })
    }

    pub fn per_edge(tables: Vec<EdgeTable>) -> Result<Self> {
        for t in &tables {
            check_table(&t.offsets, &t.values)?;
        }
        let nonnegative = tables.iter().all(|t| t.values.iter().all(|&v| v >= 0.0));
        Ok(Self {
            kind: PotentialKind::PerEdge { tables },
            scale: 1.0,
            nonnegative,
        })
    }

    /// `factor * V`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor >= 0.0) || !factor.is_finite() {
            return Err(Error::Domain(format!("scale factor must be finite and nonnegative, got {factor}")));
        }
        Ok(Self {
            scale: self.scale * factor,
            ..self.clone()
        })
    }

    /// `V` restricted to `Γ_β^+` (`plus`) or `Γ_β^-`, classified pointwise.
    pub fn restricted(&self, spec: &TreeSpec, beta: f64, dimension: f64, plus: bool) -> Result<Self> {
        check_partition_params(beta, dimension)?;
        Ok(Self {
            kind: PotentialKind::Restricted {
                base: Box::new(self.clone()),
                spec: Box::new(spec.clone()),
                beta,
                dimension,
                plus,
            },
            scale: 1.0,
            nonnegative: self.nonnegative,
        })
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    /// All input values were nonnegative (no positive part was taken).
    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    pub fn is_zero(&self) -> bool {
        self.scale == 0.0 || matches!(self.kind, PotentialKind::Zero)
    }

    /// Depends on `|x|` only.
    pub fn is_radial(&self) -> bool {
        match &self.kind {
            PotentialKind::PerEdge { .. } => false,
            PotentialKind::Restricted { base, .. } => base.is_radial(),
            _ => true,
        }
    }

    /// `V` on edge `edge` at radius `r`; radial potentials ignore `edge`.
    pub fn at(&self, spec: &TreeSpec, edge: Option<usize>, r: f64) -> f64 {
        let raw = match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::RadialPower { v0, p } => v0 * (1.0 + r).powf(-p),
            PotentialKind::RadialTable { nodes, values } => interpolate(nodes, values, r),
            PotentialKind::PerEdge { tables } => match edge {
                None => 0.0,
                Some(e) => {
                    let start = spec
                        .edge_path(e)
                        .ok()
                        .and_then(|p| spec.radius(p.len()).ok())
                        .unwrap_or(0.0);
                    tables
                        .iter()
                        .find(|t| t.edge == e)
                        .map_or(0.0, |t| interpolate(&t.offsets, &t.values, r - start))
                }
            },
            PotentialKind::Restricted {
                base,
                spec: tree,
                beta,
                dimension,
                plus,
            } => {
                let v = base.at(spec, edge, r);
                let minus = v * tree.g0_extended(r).powf(2.0 / (dimension - 1.0)) < *beta;
                if minus != *plus {
                    v
                } else {
                    0.0
                }
            }
        };
        (self.scale * raw).max(0.0)
    }

    /// Radial value; `None` for potentials that depend on the edge.
    pub fn radial(&self, spec: &TreeSpec, r: f64) -> Option<f64> {
        self.is_radial().then(|| self.at(spec, None, r))
    }
}

fn check_partition_params(beta: f64, dimension: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    if !(dimension > 1.0) || !dimension.is_finite() {
        return Err(Error::Domain(format!("global dimension d must exceed 1, got {dimension}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentRoute {
    /// One weighted half-line operator per generation (radial `V` only).
    Radial,
    /// Full-graph discretization through the given generation.
    Oracle { max_generation: usize },
}

/// Negative eigenvalues `λ < 0` of `-Δ - V - shift` on the truncated tree
/// with their multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeSpectrum {
    pub eigenvalues: Vec<(f64, u64)>,
    pub route: MomentRoute,
    pub shift: f64,
}

/// `Σ |λ|^γ` with near-zero eigenvalues excluded (`value`) and included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub gamma: f64,
    pub value: f64,
    pub inclusive: f64,
    /// Eigenvalues (with multiplicity) within [`ZERO_THRESHOLD`] of zero.
    pub flagged: u64,
}

impl NegativeSpectrum {
    pub fn moment(&self, gamma: f64) -> Moment {
        let (mut value, mut inclusive, mut flagged) = (0.0, 0.0, 0);
        for &(l, m) in &self.eigenvalues {
            let term = m as f64 * if gamma == 0.0 { 1.0 } else { (-l).powf(gamma) };
            inclusive += term;
            if -l < ZERO_THRESHOLD {
                flagged += m;
            } else {
                value += term;
            }
        }
        Moment {
            gamma,
            value,
            inclusive,
            flagged,
        }
    }

    /// Number of negative eigenvalues with multiplicity.
    pub fn count(&self) -> u64 {
        self.eigenvalues.iter().map(|e| e.1).sum()
    }
}

/// Negative spectrum of `-Δ - V - shift` by the requested route.
pub fn negative_spectrum(
    spec: &TreeSpec,
    v: &PotentialSpec,
    cfg: &SolverConfig,
    route: MomentRoute,
    shift: f64,
) -> Result<NegativeSpectrum> {
    cfg.validate()?;
    let mut eigenvalues = Vec::new();
    match route {
        MomentRoute::Radial => {
            if !v.is_radial() {
                return Err(Error::Precondition(
                    "edge-dependent potentials need the full-graph route".into(),
                ));
            }
            let pot = |r: f64| v.at(spec, None, r);
            for l in 0..=spec.horizon() {
                if spec.radii()[l] >= cfg.domain_cut {
                    break;
                }
                let op = radial_operator(spec, l, cfg, Some(&pot))?;
                let mult = spec.generation_multiplicity(l)?;
                for lam in op.eigenvalues_below(shift) {
                    eigenvalues.push((lam - shift, mult));
                }
            }
        }
        MomentRoute::Oracle { max_generation } => {
            let pot = |edge: usize, r: f64| v.at(spec, Some(edge), r);
            let graph = FullGraph::build(spec, max_generation, cfg, Some(&pot))?;
            for lam in graph.eigenvalues_below(shift) {
                eigenvalues.push((lam - shift, 1));
            }
        }
    }
    eigenvalues.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(NegativeSpectrum {
        eigenvalues,
        route,
        shift,
    })
}

/// `tr(-Δ - V)_-^γ`: radial route for radial `V`, full graph otherwise.
pub fn negative_moments(spec: &TreeSpec, v: &PotentialSpec, gamma: f64, cfg: &SolverConfig) -> Result<(Moment, NegativeSpectrum)> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!("gamma must be nonnegative, got {gamma}")));
    }
    let route = if v.is_radial() {
        MomentRoute::Radial
    } else {
        MomentRoute::Oracle {
            max_generation: spec.generation_at(cfg.domain_cut),
        }
    };
    let s = negative_spectrum(spec, v, cfg, route, 0.0)?;
    Ok((s.moment(gamma), s))
}

/// Relative discrepancy between `Σ|λ|^γ` and `γ ∫_0^∞ τ^{γ-1} N(τ) dτ`,
/// the counting function built from the same list.
pub fn riesz_crosscheck(eigenvalues: &[f64], gamma: f64) -> Result<f64> {
    let weighted: Vec<(f64, u64)> = eigenvalues.iter().map(|&l| (l, 1)).collect();
    riesz_crosscheck_weighted(&weighted, gamma)
}

/// As [`riesz_crosscheck`] with multiplicities.
pub fn riesz_crosscheck_weighted(eigenvalues: &[(f64, u64)], gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!("Riesz identity needs gamma > 0, got {gamma}")));
    }
    let neg: Vec<(f64, f64)> = eigenvalues
        .iter()
        .filter(|e| e.0 < 0.0)
        .map(|&(l, m)| (-l, m as f64))
        .collect();
    let direct: f64 = neg.iter().map(|&(a, m)| m * a.powf(gamma)).sum();
    let mut breaks: Vec<f64> = neg.iter().map(|e| e.0).collect();
    breaks.push(0.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut quad = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        // N is constant on (a, b)
        let count: f64 = neg.iter().filter(|e| e.0 > a).map(|e| e.1).sum();
        let floor = if a > 0.0 { a } else { b * 2f64.powi(-200) };
        let mut hi = b;
        let mut piece = 0.0;
        while hi > floor {
            let lo = (0.5 * hi).max(floor);
            piece += gauss_legendre(lo, hi, |t| gamma * t.powf(gamma - 1.0));
            hi = lo;
        }
        quad += count * piece;
    }
    if direct == 0.0 {
        return Ok(quad.abs());
    }
    Ok((quad - direct).abs() / direct)
}

/// `M_{β,γ} = Γ(γ+1) / (e^{-β} - β E_1(β))`, infinite once the
/// denominator underflows.
pub fn m_constant(beta: f64, gamma: f64) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    if !(gamma >= 0.0) {
        return Err(Error::Domain(format!("gamma must be nonnegative, got {gamma}")));
    }
    // e^{-β} - β E_1(β) = E_2(β); underflows to zero only for β > ~700
    let denom = exp_integral_e2(beta);
    if denom <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(gamma_fn(gamma + 1.0) / denom)
}

/// Which `γ` ranges of the two-term estimate apply.
fn two_term_item(gamma: f64, d: f64) -> Result<u8> {
    if !(d > 1.0) {
        return Err(Error::Domain(format!("two-term estimates need global dimension d > 1, got {d}")));
    }
    if gamma > 0.5 {
        return Ok(1);
    }
    let ok = if d <= 2.0 {
        gamma > 1.0 - 0.5 * d && gamma <= 0.5
    } else {
        (0.0..=0.5).contains(&gamma)
    };
    if ok {
        Ok(2)
    } else {
        Err(Error::Domain(format!("gamma = {gamma} outside the admissible range for d = {d}")))
    }
}

/// `L_d(β, γ)` with the kernel constant `c`.
pub fn l_constant(beta: f64, gamma: f64, d: f64, c: f64) -> Result<f64> {
    two_term_item(gamma, d)?;
    let m = m_constant(beta, gamma)?;
    if gamma == 0.5 {
        Ok(2f64.powf(0.5 * (d + 5.0)) * m * c * beta.powf(0.5 * (1.0 - d)) / (d * d - 1.0))
    } else {
        let e = gamma + 0.5 * d;
        Ok(c * m * beta.powf(1.0 - e) / ((e - 1.0) * e))
    }
}

/// `L̃_d(β, γ)` with the kernel constant `c`.
pub fn l_tilde_constant(beta: f64, gamma: f64, d: f64, c: f64) -> Result<f64> {
    two_term_item(gamma, d)?;
    if gamma == 0.5 {
        return Ok(2.0);
    }
    let m = m_constant(beta, gamma)?;
    let pi_term = core::f64::consts::PI.powf(-0.5) / (gamma - 0.5).abs();
    Ok(m * beta.powf(0.5 - gamma) * (pi_term + c / (gamma + 0.5 * d - 1.0)))
}

fn check_lt_ext(a: f64, d: f64, gamma: f64) -> Result<f64> {
    if !(d > 1.0) {
        return Err(Error::Domain(format!("global dimension d must exceed 1, got {d}")));
    }
    if d < 2.0 && (a - (d - 1.0)).abs() < 1e-12 {
        return Err(Error::Domain(format!(
            "a = d - 1 with 1 < d < 2 is not covered (a = {a}, d = {d})"
        )));
    }
    let ok = if d <= 2.0 {
        (0.0..d - 1.0).contains(&a)
    } else {
        (0.0..=1.0).contains(&a)
    };
    if !ok {
        return Err(Error::Domain(format!("a = {a} outside the admissible range for d = {d}")));
    }
    let g0 = 0.5 * (1.0 - a);
    if gamma < g0 - 1e-15 {
        return Err(Error::Domain(format!("gamma must be at least (1-a)/2 = {g0}, got {gamma}")));
    }
    Ok(g0)
}

/// Factor turning a bound `K ∫ V^{p}` at order `γ` into one at `γ' > γ`:
/// `B(γ'-γ, p+1) / B(γ'-γ, γ+1)`, the exponent becoming `p + γ' - γ`.
pub fn aizenman_lieb_factor(gamma: f64, gamma_new: f64, p: f64) -> Result<f64> {
    if gamma_new == gamma {
        return Ok(1.0);
    }
    if !(gamma_new > gamma) {
        return Err(Error::Domain(format!("lift needs gamma' > gamma, got {gamma_new} <= {gamma}")));
    }
    Ok(beta_fn(gamma_new - gamma, p + 1.0) / beta_fn(gamma_new - gamma, gamma + 1.0))
}

/// `K(a, d, γ)`: the infimum over `β` at `γ_0 = (1-a)/2`, lifted to `γ`.
/// Returns `(K, minimizing β, lift factor)`.
pub fn k_constant(a: f64, d: f64, gamma: f64, c: f64) -> Result<(f64, f64, f64)> {
    let g0 = check_lt_ext(a, d, gamma)?;
    let expo = 0.5 * (d - a - 1.0);
    let obj = |b: f64| -> f64 {
        let l = l_constant(b, g0, d, c).unwrap_or(f64::INFINITY);
        let lt = l_tilde_constant(b, g0, d, c).unwrap_or(f64::INFINITY);
        (b.powf(expo) * l).max(lt)
    };
    let (b, k0) = log_scan_min(1e-8, 1e4, 241, obj);
    // exponent of V at γ_0 is γ_0 + (a+1)/2 = 1
    let lift = aizenman_lieb_factor(g0, gamma, 1.0)?;
    Ok((k0 * lift, b, lift))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchrodingerParams {
    pub gamma: f64,
    pub beta: f64,
    pub a: f64,
    pub d: f64,
    /// Kernel constant used inside `L_d` (or `C_b` for homogeneous trees).
    pub c_envelope: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantKind {
    M,
    TwoTerm,
    LtExt,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    pub gamma: f64,
    pub beta: f64,
    pub a: f64,
    pub d: f64,
    pub m: f64,
    pub l: Option<f64>,
    pub l_tilde: Option<f64>,
    pub k: Option<f64>,
    /// `β` attaining `K`.
    pub k_beta: Option<f64>,
    pub lift_factor: Option<f64>,
    pub c_envelope: f64,
}

pub fn bound_constants(kind: ConstantKind, params: &SchrodingerParams) -> Result<BoundConstants> {
    let p = params;
    if !(p.c_envelope > 0.0) || !p.c_envelope.is_finite() {
        return Err(Error::Domain(format!("kernel constant must be positive, got {}", p.c_envelope)));
    }
    let mut out = BoundConstants {
        gamma: p.gamma,
        beta: p.beta,
        a: p.a,
        d: p.d,
        m: m_constant(p.beta, p.gamma)?,
        l: None,
        l_tilde: None,
        k: None,
        k_beta: None,
        lift_factor: None,
        c_envelope: p.c_envelope,
    };
    match kind {
        ConstantKind::M => {}
        ConstantKind::TwoTerm => {
            out.l = Some(l_constant(p.beta, p.gamma, p.d, p.c_envelope)?);
            out.l_tilde = Some(l_tilde_constant(p.beta, p.gamma, p.d, p.c_envelope)?);
        }
        ConstantKind::LtExt => {
            let (k, b, lift) = k_constant(p.a, p.d, p.gamma, p.c_envelope)?;
            out.k = Some(k);
            out.k_beta = Some(b);
            out.lift_factor = Some(lift);
        }
    }
    Ok(out)
}

/// One quadrature cell of the truncated tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionCell {
    /// Edge id for edge-dependent potentials, `None` for radial cells.
    pub edge: Option<usize>,
    pub start: f64,
    pub end: f64,
    /// Cell center lies in `Γ_β^-`.
    pub minus: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionPartition {
    pub cells: Vec<RegionCell>,
    /// Tree measure of `Γ_β^-` and `Γ_β^+` below the cut.
    pub measure_minus: f64,
    pub measure_plus: f64,
}

/// Cells of width at most `1/ppu` between consecutive vertex radii.
fn radial_cells(spec: &TreeSpec, a: f64, b: f64, ppu: usize) -> Vec<(f64, f64)> {
    let mut knots = alloc::vec![a];
    knots.extend(spec.radii().iter().copied().filter(|&r| r > a && r < b));
    knots.push(b);
    let mut out = Vec::new();
    for w in knots.windows(2) {
        let n = ((w[1] - w[0]) * ppu as f64 - 1e-9).ceil().max(1.0) as usize;
        let step = (w[1] - w[0]) / n as f64;
        for k in 0..n {
            let lo = w[0] + step * k as f64;
            let hi = if k + 1 == n { w[1] } else { lo + step };
            out.push((lo, hi));
        }
    }
    out
}

/// `(edge id, start, end)` for every edge below the cut.
fn edge_spans(spec: &TreeSpec, cut: f64) -> Result<Vec<(usize, f64, f64)>> {
    let mut out = Vec::new();
    let mut id = 0usize;
    for j in 0..=spec.horizon() {
        let (a, b) = spec.edge_span(j)?;
        let count = spec.edges_in_generation(j)? as usize;
        if a >= cut {
            break;
        }
        for k in 0..count {
            out.push((id + k, a, b.min(cut)));
        }
        id += count;
    }
    Ok(out)
}

fn classify(v: f64, g0: f64, beta: f64, d: f64) -> bool {
    v * g0.powf(2.0 / (d - 1.0)) < beta
}

/// Splits the truncated tree into `Γ_β^-` and `Γ_β^+` by the value of
/// `V g_0^{2/(d-1)}` at each cell center.
pub fn partition_regions(
    spec: &TreeSpec,
    v: &PotentialSpec,
    beta: f64,
    d: f64,
    cfg: &SolverConfig,
) -> Result<RegionPartition> {
    check_partition_params(beta, d)?;
    cfg.validate()?;
    let mut cells = Vec::new();
    let (mut mm, mut mp) = (0.0, 0.0);
    let mut add = |edge: Option<usize>, a: f64, b: f64, weight: f64| {
        let c = 0.5 * (a + b);
        let minus = classify(v.at(spec, edge, c), spec.g0_extended(c), beta, d);
        if minus {
            mm += weight * (b - a);
        } else {
            mp += weight * (b - a);
        }
        cells.push(RegionCell {
            edge,
            start: a,
            end: b,
            minus,
        });
    };
    if v.is_radial() {
        for (a, b) in radial_cells(spec, 0.0, cfg.domain_cut, cfg.points_per_unit) {
            add(None, a, b, spec.g0_extended(0.5 * (a + b)));
        }
    } else {
        for (e, lo, hi) in edge_spans(spec, cfg.domain_cut)? {
            for (a, b) in radial_cells(spec, lo, hi, cfg.points_per_unit) {
                add(Some(e), a, b, 1.0);
            }
        }
    }
    Ok(RegionPartition {
        cells,
        measure_minus: mm,
        measure_plus: mp,
    })
}

/// First radius where the class of a radial `V` changes, bracketed to
/// `1e-12` by bisection between the cell centers that straddle it.
pub fn partition_boundary(
    spec: &TreeSpec,
    v: &PotentialSpec,
    beta: f64,
    d: f64,
    cfg: &SolverConfig,
) -> Result<Option<(f64, f64)>> {
    if !v.is_radial() {
        return Err(Error::Precondition("partition boundary needs a radial potential".into()));
    }
    let part = partition_regions(spec, v, beta, d, cfg)?;
    let class = |r: f64| classify(v.at(spec, None, r), spec.g0_extended(r), beta, d);
    let first = match part.cells.first() {
        Some(c) => c.minus,
        None => return Ok(None),
    };
    let mut prev = 0.5 * (part.cells[0].start + part.cells[0].end);
    for c in &part.cells[1..] {
        let mid = 0.5 * (c.start + c.end);
        if c.minus != first {
            let (mut lo, mut hi) = (prev, mid);
            while hi - lo > 1e-12 * hi.max(1.0) {
                let m = 0.5 * (lo + hi);
                if class(m) == first {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            return Ok(Some((lo, hi)));
        }
        prev = mid;
    }
    Ok(None)
}

/// A point of the tree as seen by a right-hand-side integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint {
    pub v: f64,
    pub r: f64,
    pub g0: f64,
    pub minus: bool,
}

/// Result of an integral over the tree; `divergent` when the tail does not
/// settle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeIntegral {
    pub value: f64,
    pub divergent: bool,
}

/// `∫_Γ F dx` with `dx = g_0(r) dr` for radial `V` (continued past the cut
/// with the tail model) or a sum over edges below the cut otherwise.
/// `partition` is `(β, d)`; without it every point counts as `Γ_β^-`.
pub fn integrate_over_tree(
    spec: &TreeSpec,
    v: &PotentialSpec,
    cfg: &SolverConfig,
    partition: Option<(f64, f64)>,
    f: &dyn Fn(FieldPoint) -> f64,
) -> Result<TreeIntegral> {
    cfg.validate()?;
    let cell_sum = |edge: Option<usize>, a: f64, b: f64, weighted: bool| -> f64 {
        let c = 0.5 * (a + b);
        let minus = partition.is_none_or(|(beta, d)| classify(v.at(spec, edge, c), spec.g0_extended(c), beta, d));
        gauss_legendre(a, b, |r| {
            let val = v.at(spec, edge, r);
            if val == 0.0 {
                return 0.0;
            }
            // g_0 is constant between vertices and smooth past the last one
            let g0 = spec.g0_extended(r);
            let w = if weighted { g0 } else { 1.0 };
            w * f(FieldPoint { v: val, r, g0, minus })
        })
    };
    let cut = cfg.domain_cut;
    if !v.is_radial() {
        let mut acc = 0.0;
        for (e, lo, hi) in edge_spans(spec, cut)? {
            for (a, b) in radial_cells(spec, lo, hi, cfg.points_per_unit) {
                acc += cell_sum(Some(e), a, b, false);
            }
        }
        return Ok(TreeIntegral {
            value: acc,
            divergent: !acc.is_finite(),
        });
    }
    let mut acc = 0.0;
    for (a, b) in radial_cells(spec, 0.0, cut, cfg.points_per_unit) {
        acc += cell_sum(None, a, b, true);
    }
    // geometric panels beyond the cut, split at the remaining vertices
    let mut lo = cut;
    let mut last = 0.0;
    for _ in 0..120 {
        let hi = lo + (0.25 * (1.0 + lo)).max(1.0 / cfg.points_per_unit as f64);
        let mut knots = alloc::vec![lo];
        knots.extend(spec.radii().iter().copied().filter(|&r| r > lo && r < hi));
        knots.push(hi);
        let piece: f64 = knots.windows(2).map(|w| cell_sum(None, w[0], w[1], true)).sum();
        if !piece.is_finite() {
            return Ok(TreeIntegral {
                value: f64::INFINITY,
                divergent: true,
            });
        }
        acc += piece;
        last = piece;
        lo = hi;
    }
    let divergent = !acc.is_finite() || last.abs() > 1e-9 * acc.abs().max(f64::MIN_POSITIVE);
    Ok(TreeIntegral {
        value: if divergent { f64::INFINITY } else { acc },
        divergent,
    })
}

/// `∫_{t0}^{t1} t^{-α} (t V - β)_+ dt` in closed form (`t1` may be infinite).
pub fn power_ramp_integral(alpha: f64, v: f64, beta: f64, t0: f64, t1: f64) -> f64 {
    if !(v > 0.0) {
        return 0.0;
    }
    let s = t0.max(beta / v);
    if !(t1 > s) {
        return 0.0;
    }
    let anti = |t: f64| -> f64 {
        if t.is_infinite() {
            return 0.0;
        }
        let first = if (alpha - 2.0).abs() < 1e-14 {
            v * t.ln()
        } else {
            v * t.powf(2.0 - alpha) / (2.0 - alpha)
        };
        first - beta * t.powf(1.0 - alpha) / (1.0 - alpha)
    };
    if t1.is_infinite() && alpha <= 2.0 {
        return f64::INFINITY;
    }
    anti(t1) - anti(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhsKind {
    /// Lieb's double integral with the universal bound for
    /// `t < g_0^{2/(d-1)}` and `C t^{-d/2} g_0` beyond.
    Lieb,
    TwoTerm,
    LtExt,
    /// `∫ V` at `γ = 1/2`, lifted for `γ > 1/2`.
    HalfSharp,
    /// `4 M_{β,1/2} C β^{(1-d)/2} / (d^2 - 1) ∫ V^{(1+d)/2} g_0`.
    HalfSmall,
    /// `L_b(β, γ) ∫ V^{γ+3/2} (1+|x|)^2` for `-Δ - λ_b - V`.
    Homogeneous,
}

impl RhsKind {
    pub const ALL: [RhsKind; 6] = [
        RhsKind::Lieb,
        RhsKind::TwoTerm,
        RhsKind::LtExt,
        RhsKind::HalfSharp,
        RhsKind::HalfSmall,
        RhsKind::Homogeneous,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RhsKind::Lieb => "lieb",
            RhsKind::TwoTerm => "two_term",
            RhsKind::LtExt => "lt_ext",
            RhsKind::HalfSharp => "half_sharp",
            RhsKind::HalfSmall => "half_small",
            RhsKind::Homogeneous => "homogeneous",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhsValue {
    pub value: f64,
    pub divergent: bool,
    pub constants: BoundConstants,
}

fn sum_integrals(parts: &[(f64, TreeIntegral)]) -> (f64, bool) {
    let mut total = 0.0;
    let mut divergent = false;
    for &(c, i) in parts {
        if i.divergent {
            divergent = true;
        } else {
            total += c * i.value;
        }
    }
    (if divergent { f64::INFINITY } else { total }, divergent)
}

/// Right-hand side of the bound `kind` for the potential `v`.
pub fn bound_rhs(
    kind: RhsKind,
    spec: &TreeSpec,
    v: &PotentialSpec,
    params: &SchrodingerParams,
    cfg: &SolverConfig,
) -> Result<RhsValue> {
    let p = *params;
    let g = p.gamma;
    if !(g >= 0.0) || !g.is_finite() {
        return Err(Error::Domain(format!("gamma must be nonnegative, got {g}")));
    }
    let integrate = |part: Option<(f64, f64)>, f: &dyn Fn(FieldPoint) -> f64| integrate_over_tree(spec, v, cfg, part, f);
    let (value, divergent, constants) = match kind {
        RhsKind::Lieb => {
            check_partition_params(p.beta, p.d)?;
            if !(g > 1.0 - 0.5 * p.d) {
                return Err(Error::Domain(format!("Lieb integral needs gamma > 1 - d/2, got {g}")));
            }
            let c = bound_constants(ConstantKind::M, &p)?;
            let pi = core::f64::consts::PI;
            let d = p.d;
            let beta = p.beta;
            let i = integrate(None, &|x| {
                let split = x.g0.powf(2.0 / (d - 1.0));
                pi.powf(-0.5) * power_ramp_integral(1.5 + g, x.v, beta, 0.0, split)
                    + p.c_envelope * x.g0 * power_ramp_integral(1.0 + 0.5 * d + g, x.v, beta, split, f64::INFINITY)
            })?;
            let (v, dv) = sum_integrals(&[(c.m, i)]);
            (v, dv, c)
        }
        RhsKind::TwoTerm => {
            let c = bound_constants(ConstantKind::TwoTerm, &p)?;
            let d = p.d;
            let part = Some((p.beta, d));
            let first = integrate(part, &|x| if x.minus { x.v.powf(g + 0.5 * d) } else { 0.0 })?;
            // the radial measure carries g_0, so V^{γ+1/2} dx is V^{γ+1/2}
            let second = if g > 0.5 {
                integrate(part, &|x| if x.minus { 0.0 } else { x.v.powf(g + 0.5) })?
            } else {
                integrate(part, &|x| {
                    if x.minus {
                        0.0
                    } else {
                        x.v * x.g0.powf((1.0 - 2.0 * g) / (d - 1.0))
                    }
                })?
            };
            let (v, dv) = sum_integrals(&[(c.l.expect("set"), first), (c.l_tilde.expect("set"), second)]);
            (v, dv, c)
        }
        RhsKind::LtExt => {
            let c = bound_constants(ConstantKind::LtExt, &p)?;
            let (a, d) = (p.a, p.d);
            let i = integrate(None, &|x| x.v.powf(g + 0.5 * (a + 1.0)) * x.g0.powf(a / (d - 1.0)))?;
            let (v, dv) = sum_integrals(&[(c.k.expect("set"), i)]);
            (v, dv, c)
        }
        RhsKind::HalfSharp => {
            if g < 0.5 {
                return Err(Error::Domain(format!("the sharp bound needs gamma >= 1/2, got {g}")));
            }
            let mut c = bound_constants(ConstantKind::M, &SchrodingerParams { beta: 1.0, ..p })?;
            let lift = aizenman_lieb_factor(0.5, g, 1.0)?;
            c.lift_factor = Some(lift);
            let i = integrate(None, &|x| x.v.powf(g + 0.5))?;
            let (v, dv) = sum_integrals(&[(lift, i)]);
            (v, dv, c)
        }
        RhsKind::HalfSmall => {
            if g != 0.5 {
                return Err(Error::Domain(format!("half_small is stated for gamma = 1/2, got {g}")));
            }
            check_partition_params(p.beta, p.d)?;
            let c = bound_constants(ConstantKind::M, &p)?;
            let d = p.d;
            let k = 4.0 * c.m * p.c_envelope * p.beta.powf(0.5 * (1.0 - d)) / (d * d - 1.0);
            let i = integrate(None, &|x| x.v.powf(0.5 * (1.0 + d)))?;
            let (v, dv) = sum_integrals(&[(k, i)]);
            (v, dv, c)
        }
        RhsKind::Homogeneous => {
            if spec.is_homogeneous().is_none() {
                return Err(Error::Precondition("homogeneous bound requires a homogeneous tree with unit edges".into()));
            }
            let c = bound_constants(ConstantKind::M, &p)?;
            let lb = p.c_envelope * c.m * p.beta.powf(-g - 0.5) / ((g + 0.5) * (g + 1.5));
            let i = integrate(None, &|x| x.v.powf(g + 1.5) * (1.0 + x.r) * (1.0 + x.r))?;
            let (v, dv) = sum_integrals(&[(lb, i)]);
            let mut c = c;
            c.l = Some(lb);
            (v, dv, c)
        }
    };
    Ok(RhsValue {
        value,
        divergent,
        constants,
    })
}

/// Left and right side of one bound with its verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct SchrodingerCheck {
    pub kind: RhsKind,
    pub gamma: f64,
    pub beta: f64,
    pub lhs: f64,
    pub lhs_inclusive: f64,
    pub rhs: f64,
    /// `(rhs - lhs)/rhs`.
    pub margin: f64,
    pub tolerance: f64,
    pub violated: bool,
    pub flags: Vec<String>,
    pub constants: BoundConstants,
}

/// Spectrum on the grid of `cfg` and on a grid twice as fine.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPair {
    pub coarse: NegativeSpectrum,
    pub fine: NegativeSpectrum,
}

impl SpectrumPair {
    pub fn compute(spec: &TreeSpec, v: &PotentialSpec, cfg: &SolverConfig, route: MomentRoute, shift: f64) -> Result<Self> {
        Ok(Self {
            coarse: negative_spectrum(spec, v, cfg, route, shift)?,
            fine: negative_spectrum(spec, v, &cfg.refined(2), route, shift)?,
        })
    }

    /// Fine-level moment and the relative change between levels.
    pub fn moment(&self, gamma: f64) -> (Moment, f64) {
        let a = self.coarse.moment(gamma);
        let b = self.fine.moment(gamma);
        let scale = a.value.abs().max(b.value.abs());
        let delta = if scale == 0.0 { 0.0 } else { (a.value - b.value).abs() / scale };
        (b, delta)
    }
}

/// Default route for `v` on the tree truncated at the cut.
pub fn default_route(spec: &TreeSpec, v: &PotentialSpec, cfg: &SolverConfig) -> MomentRoute {
    if v.is_radial() {
        MomentRoute::Radial
    } else {
        MomentRoute::Oracle {
            max_generation: spec.generation_at(cfg.domain_cut),
        }
    }
}

/// Shift subtracted from the operator for `kind` (`λ_b` for homogeneous
/// trees, zero otherwise).
pub fn operator_shift(kind: RhsKind, spec: &TreeSpec) -> Result<f64> {
    if kind != RhsKind::Homogeneous {
        return Ok(0.0);
    }
    let b = spec
        .is_homogeneous()
        .ok_or_else(|| Error::Precondition("homogeneous bound requires a homogeneous tree with unit edges".into()))?;
    Ok(lambda_closed_form(b)?.0)
}

/// Evaluates both sides of `kind`; the spectrum is computed at two grid
/// levels and their difference sets the tolerance.
pub fn check_bound(
    kind: RhsKind,
    spec: &TreeSpec,
    v: &PotentialSpec,
    params: &SchrodingerParams,
    cfg: &SolverConfig,
) -> Result<SchrodingerCheck> {
    let shift = operator_shift(kind, spec)?;
    let pair = SpectrumPair::compute(spec, v, cfg, default_route(spec, v, cfg), shift)?;
    check_bound_with(kind, spec, v, params, cfg, &pair)
}

/// As [`check_bound`] with a precomputed spectrum pair (whose shift must
/// match `kind`).
pub fn check_bound_with(
    kind: RhsKind,
    spec: &TreeSpec,
    v: &PotentialSpec,
    params: &SchrodingerParams,
    cfg: &SolverConfig,
    pair: &SpectrumPair,
) -> Result<SchrodingerCheck> {
    let shift = operator_shift(kind, spec)?;
    if pair.fine.shift != shift {
        return Err(Error::Domain(format!(
            "spectrum shift {} does not match {} (needs {shift})",
            pair.fine.shift,
            kind.name()
        )));
    }
    let rhs = bound_rhs(kind, spec, v, params, cfg)?;
    let (m, delta) = pair.moment(params.gamma);
    let tolerance = MOMENT_TOLERANCE.max(delta);
    let margin = if rhs.value.is_infinite() {
        1.0
    } else if rhs.value > 0.0 {
        (rhs.value - m.value) / rhs.value
    } else if m.value > 0.0 {
        -1.0
    } else {
        0.0
    };
    let mut flags = Vec::new();
    if rhs.divergent {
        flags.push("rhs_divergent".into());
    }
    if m.flagged > 0 {
        flags.push(format!("near_zero_eigenvalues={}", m.flagged));
    }
    if !v.is_nonnegative() {
        flags.push("positive_part_taken".into());
    }
    Ok(SchrodingerCheck {
        kind,
        gamma: params.gamma,
        beta: params.beta,
        lhs: m.value,
        lhs_inclusive: m.inclusive,
        rhs: rhs.value,
        margin,
        tolerance,
        violated: margin < -tolerance,
        flags,
        constants: rhs.constants,
    })
}

/// Both sides of `tr(-Δ-V)^γ ≤ tr(-Δ-2V_<)^γ + tr(-Δ-2V_>)^γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCheck {
    pub lhs: f64,
    pub minus_part: f64,
    pub plus_part: f64,
    pub holds: bool,
}

pub fn split_check(
    spec: &TreeSpec,
    v: &PotentialSpec,
    gamma: f64,
    beta: f64,
    d: f64,
    cfg: &SolverConfig,
) -> Result<SplitCheck> {
    let route = default_route(spec, v, cfg);
    let lhs = negative_spectrum(spec, v, cfg, route, 0.0)?.moment(gamma).inclusive;
    let lower = v.restricted(spec, beta, d, false)?.scaled(2.0)?;
    let upper = v.restricted(spec, beta, d, true)?.scaled(2.0)?;
    let minus_part = negative_spectrum(spec, &lower, cfg, route, 0.0)?.moment(gamma).inclusive;
    let plus_part = negative_spectrum(spec, &upper, cfg, route, 0.0)?.moment(gamma).inclusive;
    let rhs = minus_part + plus_part;
    Ok(SplitCheck {
        lhs,
        minus_part,
        plus_part,
        holds: lhs <= rhs * (1.0 + MOMENT_TOLERANCE) + MOMENT_TOLERANCE,
    })
}

/// Largest `C` (to `1e-10` relative) with no negative eigenvalue of the
/// discretized `-Δ - C/(1+|x|^2)` on any channel.
pub fn hardy_constant(spec: &TreeSpec, cfg: &SolverConfig) -> Result<f64> {
    cfg.validate()?;
    let admissible = |c: f64| -> Result<bool> {
        let pot = |r: f64| c / (1.0 + r * r);
        for l in 0..=spec.horizon() {
            if spec.radii()[l] >= cfg.domain_cut {
                break;
            }
            if radial_operator(spec, l, cfg, Some(&pot))?.count_below(0.0) > 0 {
                return Ok(false);
            }
        }
        Ok(true)
    };
    if !admissible(0.0)? {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while admissible(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NoConvergence("Hardy constant search diverged".into()));
        }
    }
    while hi - lo > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if admissible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// One row of the reduced-bound scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedRow {
    pub beta: f64,
    pub lhs: f64,
    /// `2^{-γ} tr(-Δ - 2 V_>)_-^γ`.
    pub reduced: f64,
    pub holds: bool,
}

/// Checks `tr(-Δ-V)^γ ≤ 2^{-γ} tr(-Δ-2V_>)^γ` for each `β` and reports the
/// largest scanned `β` below which every scanned value holds.
pub fn reduced_bound_scan(
    spec: &TreeSpec,
    v: &PotentialSpec,
    gamma: f64,
    d: f64,
    betas: &[f64],
    cfg: &SolverConfig,
) -> Result<(Vec<ReducedRow>, Option<f64>)> {
    let route = default_route(spec, v, cfg);
    let lhs = negative_spectrum(spec, v, cfg, route, 0.0)?.moment(gamma).inclusive;
    let mut sorted = betas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut rows = Vec::with_capacity(sorted.len());
    let mut threshold = None;
    let mut all_hold = true;
    for &beta in &sorted {
        let upper = v.restricted(spec, beta, d, true)?.scaled(2.0)?;
        let reduced = 2f64.powf(-gamma) * negative_spectrum(spec, &upper, cfg, route, 0.0)?.moment(gamma).inclusive;
        let holds = lhs <= reduced * (1.0 + MOMENT_TOLERANCE) + MOMENT_TOLERANCE;
        all_hold &= holds;
        if all_hold {
            threshold = Some(beta);
        }
        rows.push(ReducedRow {
            beta,
            lhs,
            reduced,
            holds,
        });
    }
    Ok((rows, threshold))
}
