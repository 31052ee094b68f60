//! Typed run configuration assembled from a [`Document`].

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use treeheat_core::bounds::BoundKind;
use treeheat_core::schrodinger::{EdgeTable, PotentialSpec, RhsKind};
use treeheat_core::{SolverConfig, TreeSpec};

use crate::config::{Document, ParseError};
use crate::Command;

const TREE_KEYS: &[&str] = &[
    "generator",
    "dimension",
    "generations",
    "branching",
    "edge",
    "radii",
    "branchings",
    "truncate",
];
const SOLVER_KEYS: &[&str] = &["R", "points_per_unit", "t_max", "t_min", "n_modes", "dispersion"];
const SWEEP_KEYS: &[&str] = &["x", "y", "t", "t_log", "x_branch", "y_branch", "n_times"];
const GEOMETRY_KEYS: &[&str] = &["d", "delta", "r_max", "n_scan"];
const BOUNDS_KEYS: &[&str] = &["kinds", "d", "delta", "n_scan", "r_max"];
const POTENTIAL_KEYS: &[&str] = &["kind", "v0", "p", "nodes", "values", "file"];
const SCHRODINGER_KEYS: &[&str] = &["kinds", "gamma", "beta", "d", "a", "c_envelope", "route"];
const ORACLE_KEYS: &[&str] = &["generation"];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub t: Vec<f64>,
    pub x_branch: u32,
    pub y_branch: u32,
    /// Number of log-spaced times for default bound sweeps.
    pub n_times: usize,
    /// `x` and `t` were given explicitly.
    pub explicit: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryParams {
    pub d: f64,
    pub delta: f64,
    pub r_max: Option<f64>,
    pub n_scan: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsParams {
    pub kinds: Vec<BoundKind>,
    pub d: f64,
    pub delta: f64,
    pub n_scan: usize,
    pub r_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteChoice {
    Radial,
    Oracle,
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchrodingerConfig {
    pub kinds: Vec<RhsKind>,
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    pub d: f64,
    pub a: Vec<f64>,
    /// Kernel constant `C`; fitted from the dimension bound when absent.
    pub c_envelope: Option<f64>,
    pub route: RouteChoice,
}

/// A potential with a short label used in reports.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPotential {
    pub label: String,
    pub potential: PotentialSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub tree: TreeSpec,
    pub tree_label: String,
    pub solver: SolverConfig,
    pub sweep: SweepConfig,
    pub geometry: GeometryParams,
    pub bounds: BoundsParams,
    pub potentials: Vec<LabeledPotential>,
    pub schrodinger: SchrodingerConfig,
    /// Generation at which oracle-compare truncates the tree.
    pub oracle_generation: Option<usize>,
    /// Hex sha256 of the config bytes.
    pub digest: String,
    pub refine: usize,
}

/// Why a config could not be loaded.
#[derive(Debug)]
pub enum LoadError {
    Io(PathBuf, std::io::Error),
    Parse(PathBuf, ParseError),
}

impl std::fmt::Display for LoadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            LoadError::Parse(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl std::error::Error for LoadError {}

pub fn digest_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunConfig {
    pub fn load(path: &Path, command: Command, refine: usize) -> Result<Self, LoadError> {
        let bytes = std::fs::read(path).map_err(|e| LoadError::Io(path.to_path_buf(), e))?;
        let text = String::from_utf8(bytes.clone()).map_err(|e| {
            LoadError::Parse(
                path.to_path_buf(),
                ParseError {
                    position: utf8_position(&bytes, e.utf8_error().valid_up_to()),
                    message: "config is not valid UTF-8".into(),
                },
            )
        })?;
        let doc = Document::parse(&text).map_err(|e| LoadError::Parse(path.to_path_buf(), e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_document(&doc, command, refine, digest_bytes(&bytes), base)
            .map_err(|e| LoadError::Parse(path.to_path_buf(), e))
    }

    pub fn from_document(doc: &Document, command: Command, refine: usize, digest: String, base: &Path) -> Result<Self, ParseError> {
        for name in doc.section_names() {
            let allowed = match name {
                "tree" => TREE_KEYS,
                "solver" => SOLVER_KEYS,
                "sweep" => SWEEP_KEYS,
                "geometry" => GEOMETRY_KEYS,
                "bounds" => BOUNDS_KEYS,
                "potential" => POTENTIAL_KEYS,
                "schrodinger" => SCHRODINGER_KEYS,
                "oracle" => ORACLE_KEYS,
                other => {
                    let at = doc.section(other).and_then(|s| s.at).expect("parsed section has a position");
                    return Err(ParseError {
                        position: at,
                        message: format!("unknown section [{other}]"),
                    });
                }
            };
            doc.check_keys(name, allowed)?;
        }
        let required: &[&str] = match command {
            Command::Geometry => &["tree"],
            Command::Heat => &["tree", "solver", "sweep"],
            Command::Bounds => &["tree", "solver"],
            Command::Schrodinger => &["tree", "solver", "potential"],
            Command::OracleCompare => &["tree", "solver", "sweep"],
        };
        for s in required {
            if !doc.has_section(s) {
                return Err(ParseError {
                    position: crate::config::Position { line: 1, column: 1 },
                    message: format!("missing [{s}] section required by '{}'", command.name()),
                });
            }
        }
        if refine == 0 {
            return Err(doc.error_at("solver", "points_per_unit", "--refine must be at least 1"));
        }
        let (tree, tree_label) = parse_tree(doc)?;
        let solver = parse_solver(doc, refine)?;
        let sweep = parse_sweep(doc)?;
        let geometry = GeometryParams {
            d: positive(doc, "geometry", "d", 2.0)?,
            delta: positive(doc, "geometry", "delta", 3.0)?,
            r_max: optional_positive(doc, "geometry", "r_max")?,
            n_scan: doc.integer("geometry", "n_scan")?.unwrap_or(2000).max(10) as usize,
        };
        let bounds = parse_bounds(doc)?;
        let potentials = parse_potentials(doc, base)?;
        let schrodinger = parse_schrodinger(doc)?;
        let oracle_generation = doc.integer("oracle", "generation")?.map(|g| g as usize);
        if let Some(g) = oracle_generation {
            if g > tree.horizon() {
                return Err(doc.error_at(
                    "oracle",
                    "generation",
                    format!("generation {g} exceeds the tree horizon {}", tree.horizon()),
                ));
            }
        }
        Ok(Self {
            tree,
            tree_label,
            solver,
            sweep,
            geometry,
            bounds,
            potentials,
            schrodinger,
            oracle_generation,
            digest,
            refine,
        })
    }
}

fn utf8_position(bytes: &[u8], valid: usize) -> crate::config::Position {
    let prefix = String::from_utf8_lossy(&bytes[..valid]);
    let line = prefix.matches('\n').count() + 1;
    let column = prefix.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    crate::config::Position { line, column }
}

fn positive(doc: &Document, s: &str, k: &str, default: f64) -> Result<f64, ParseError> {
    match doc.number(s, k)? {
        None => Ok(default),
        Some(v) if v > 0.0 => Ok(v),
        Some(v) => Err(doc.error_at(s, k, format!("{s}.{k} must be positive, got {v}"))),
    }
}

fn optional_positive(doc: &Document, s: &str, k: &str) -> Result<Option<f64>, ParseError> {
    match doc.number(s, k)? {
        None => Ok(None),
        Some(v) if v > 0.0 => Ok(Some(v)),
        Some(v) => Err(doc.error_at(s, k, format!("{s}.{k} must be positive, got {v}"))),
    }
}

fn required_integer(doc: &Document, s: &str, k: &str) -> Result<u64, ParseError> {
    doc.integer(s, k)?
        .ok_or_else(|| doc.error_at(s, k, format!("missing {s}.{k}")))
}

fn parse_tree(doc: &Document) -> Result<(TreeSpec, String), ParseError> {
    let generator = doc
        .string("tree", "generator")
        .ok_or_else(|| doc.error_at("tree", "generator", "missing tree.generator"))?;
    let core = |e: treeheat_core::Error| doc.error_at("tree", "generator", e.to_string());
    let (spec, label) = match generator {
        "half_line" => (TreeSpec::half_line(), "half_line".to_string()),
        "homogeneous" => {
            let b = required_integer(doc, "tree", "branching")?;
            let b = u32::try_from(b).map_err(|_| doc.error_at("tree", "branching", "branching too large"))?;
            let edge = positive(doc, "tree", "edge", 1.0)?;
            let g = required_integer(doc, "tree", "generations")? as usize;
            (TreeSpec::homogeneous(b, edge, g).map_err(core)?, format!("homogeneous_b{b}"))
        }
        "dyadic" => {
            let d = doc
                .number("tree", "dimension")?
                .ok_or_else(|| doc.error_at("tree", "dimension", "missing tree.dimension"))?;
            let g = required_integer(doc, "tree", "generations")? as usize;
            (TreeSpec::dyadic(d, g).map_err(core)?, format!("dyadic_d{d}"))
        }
        "explicit" => {
            let radii = doc
                .numbers("tree", "radii")?
                .ok_or_else(|| doc.error_at("tree", "radii", "missing tree.radii"))?;
            let b = doc
                .integers("tree", "branchings")?
                .ok_or_else(|| doc.error_at("tree", "branchings", "missing tree.branchings"))?;
            let b: Vec<u32> = b.into_iter().map(|v| v.min(u32::MAX as u64) as u32).collect();
            let spec = TreeSpec::explicit(radii, b).map_err(|e| doc.error_at("tree", "radii", e.to_string()))?;
            (spec, "explicit".to_string())
        }
        other => {
            return Err(doc.error_at(
                "tree",
                "generator",
                format!("unknown generator '{other}' (half_line, homogeneous, dyadic, explicit)"),
            ))
        }
    };
    match doc.integer("tree", "truncate")? {
        None => Ok((spec, label)),
        Some(g) => {
            let t = spec
                .truncated(g as usize)
                .map_err(|e| doc.error_at("tree", "truncate", e.to_string()))?;
            Ok((t, format!("{label}_g{g}")))
        }
    }
}

fn parse_solver(doc: &Document, refine: usize) -> Result<SolverConfig, ParseError> {
    if !doc.has_section("solver") {
        // geometry needs no solver; any valid placeholder will do
        return Ok(SolverConfig::new(1.0, 8, 1.0).expect("valid placeholder"));
    }
    let cut = doc
        .number("solver", "R")?
        .ok_or_else(|| doc.error_at("solver", "R", "missing solver.R"))?;
    let ppu = doc.integer("solver", "points_per_unit")?.unwrap_or(32) as usize;
    let t_max = positive(doc, "solver", "t_max", 4.0)?;
    let mut cfg = SolverConfig::new(cut, ppu.saturating_mul(refine), t_max)
        .map_err(|e| doc.error_at("solver", "R", e.to_string()))?;
    if let Some(n) = doc.integer("solver", "n_modes")? {
        cfg.n_modes = n as usize;
    }
    if let Some(t) = doc.number("solver", "t_min")? {
        cfg.t_min = t;
    }
    if let Some(b) = doc.boolean("solver", "dispersion")? {
        cfg.dispersion_correction = b;
    }
    cfg.validate().map_err(|e| doc.error_at("solver", "t_min", e.to_string()))?;
    Ok(cfg)
}

fn parse_sweep(doc: &Document) -> Result<SweepConfig, ParseError> {
    let x = doc.numbers("sweep", "x")?;
    let y = doc.numbers("sweep", "y")?.unwrap_or_default();
    let mut t = doc.numbers("sweep", "t")?;
    if let Some(spec) = doc.numbers("sweep", "t_log")? {
        if t.is_some() {
            return Err(doc.error_at("sweep", "t_log", "give either sweep.t or sweep.t_log, not both"));
        }
        if spec.len() != 3 || spec[2] < 2.0 || spec[2].fract() != 0.0 {
            return Err(doc.error_at("sweep", "t_log", "sweep.t_log expects 'lo hi n' with integer n >= 2"));
        }
        let times = treeheat_core::bounds::Sweep::log_times(spec[0], spec[1], spec[2] as usize)
            .map_err(|e| doc.error_at("sweep", "t_log", e.to_string()))?;
        t = Some(times);
    }
    for (key, list) in [("x", x.as_deref()), ("y", Some(y.as_slice()))] {
        if let Some(v) = list.and_then(|l| l.iter().find(|v| **v < 0.0)) {
            return Err(doc.error_at("sweep", key, format!("sweep.{key} entries must be nonnegative, got {v}")));
        }
    }
    if let Some(v) = t.as_deref().and_then(|l| l.iter().find(|v| **v <= 0.0)) {
        let key = if doc.entry("sweep", "t").is_some() { "t" } else { "t_log" };
        return Err(doc.error_at("sweep", key, format!("times must be positive, got {v}")));
    }
    let branch = |k: &str| -> Result<u32, ParseError> {
        let v = doc.integer("sweep", k)?.unwrap_or(if k == "x_branch" { 1 } else { 2 });
        if v == 0 {
            return Err(doc.error_at("sweep", k, "branch choices start at 1"));
        }
        Ok(v as u32)
    };
    let explicit = x.is_some() && t.is_some();
    Ok(SweepConfig {
        x: x.unwrap_or_default(),
        y,
        t: t.unwrap_or_default(),
        x_branch: branch("x_branch")?,
        y_branch: branch("y_branch")?,
        n_times: doc.integer("sweep", "n_times")?.unwrap_or(12).max(2) as usize,
        explicit,
    })
}

fn parse_bounds(doc: &Document) -> Result<BoundsParams, ParseError> {
    let kinds = match doc.words("bounds", "kinds") {
        None => vec![BoundKind::Universal, BoundKind::TwoSided, BoundKind::DimBound],
        Some(words) => {
            let mut out = Vec::new();
            for w in words {
                let k = BoundKind::parse(w).ok_or_else(|| {
                    let names: Vec<&str> = BoundKind::ALL.iter().map(|k| k.name()).collect();
                    doc.error_at("bounds", "kinds", format!("unknown bound kind '{w}' ({})", names.join(", ")))
                })?;
                if !out.contains(&k) {
                    out.push(k);
                }
            }
            out
        }
    };
    Ok(BoundsParams {
        kinds,
        d: positive(doc, "bounds", "d", 2.0)?,
        delta: positive(doc, "bounds", "delta", 3.0)?,
        n_scan: doc.integer("bounds", "n_scan")?.unwrap_or(2000).max(10) as usize,
        r_max: optional_positive(doc, "bounds", "r_max")?,
    })
}

fn number_list(doc: &Document, s: &str, k: &str, default: &[f64]) -> Result<Vec<f64>, ParseError> {
    Ok(doc.numbers(s, k)?.unwrap_or_else(|| default.to_vec()))
}

fn parse_potentials(doc: &Document, base: &Path) -> Result<Vec<LabeledPotential>, ParseError> {
    if !doc.has_section("potential") {
        return Ok(Vec::new());
    }
    let kind = doc.string("potential", "kind").unwrap_or("radial_power");
    let core = |k: &str, e: treeheat_core::Error| doc.error_at("potential", k, e.to_string());
    match kind {
        "zero" => Ok(vec![LabeledPotential {
            label: "zero".into(),
            potential: PotentialSpec::zero(),
        }]),
        "radial_power" => {
            let v0s = number_list(doc, "potential", "v0", &[1.0])?;
            let ps = number_list(doc, "potential", "p", &[2.0])?;
            let mut out = Vec::new();
            for &v0 in &v0s {
                for &p in &ps {
                    out.push(LabeledPotential {
                        label: format!("radial_power v0={v0} p={p}"),
                        potential: PotentialSpec::radial_power(v0, p).map_err(|e| core("v0", e))?,
                    });
                }
            }
            Ok(out)
        }
        "table" => {
            let nodes = doc
                .numbers("potential", "nodes")?
                .ok_or_else(|| doc.error_at("potential", "nodes", "missing potential.nodes"))?;
            let values = doc
                .numbers("potential", "values")?
                .ok_or_else(|| doc.error_at("potential", "values", "missing potential.values"))?;
            Ok(vec![LabeledPotential {
                label: "table".into(),
                potential: PotentialSpec::radial_table(nodes, values).map_err(|e| core("nodes", e))?,
            }])
        }
        "per_edge" => {
            let file = doc
                .string("potential", "file")
                .ok_or_else(|| doc.error_at("potential", "file", "missing potential.file"))?;
            let path = base.join(file);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| doc.error_at("potential", "file", format!("{}: {e}", path.display())))?;
            let tables = parse_edge_csv(&text).map_err(|(line, column, message)| ParseError {
                position: crate::config::Position { line, column },
                message: format!("{}: {message}", path.display()),
            })?;
            Ok(vec![LabeledPotential {
                label: format!("per_edge({file})"),
                potential: PotentialSpec::per_edge(tables).map_err(|e| core("file", e))?,
            }])
        }
        other => Err(doc.error_at(
            "potential",
            "kind",
            format!("unknown potential kind '{other}' (zero, radial_power, table, per_edge)"),
        )),
    }
}

/// Per-edge potential rows `edge_id,offset,value` with a header row;
/// offsets per edge must increase.
pub fn parse_edge_csv(text: &str) -> Result<Vec<EdgeTable>, (usize, usize, String)> {
    let mut tables: Vec<EdgeTable> = Vec::new();
    let mut header_seen = false;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        if !header_seen {
            header_seen = true;
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols != ["edge_id", "offset", "value"] {
                return Err((lineno, 1, "expected header 'edge_id,offset,value'".into()));
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err((lineno, 1, format!("expected 3 fields, got {}", fields.len())));
        }
        let mut col = 1;
        let mut cols = [0.0f64; 3];
        let mut edge = 0usize;
        for (k, f) in fields.iter().enumerate() {
            let v = f.trim();
            if k == 0 {
                edge = v.parse().map_err(|_| (lineno, col, format!("'{v}' is not an edge id")))?;
            } else {
                cols[k] = v
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| (lineno, col, format!("'{v}' is not a finite number")))?;
            }
            col += f.chars().count() + 1;
        }
        match tables.iter_mut().find(|t| t.edge == edge) {
            Some(t) => {
                t.offsets.push(cols[1]);
                t.values.push(cols[2]);
            }
            None => tables.push(EdgeTable {
                edge,
                offsets: vec![cols[1]],
                values: vec![cols[2]],
            }),
        }
    }
    tables.sort_by_key(|t| t.edge);
    Ok(tables)
}

fn parse_schrodinger(doc: &Document) -> Result<SchrodingerConfig, ParseError> {
    let kinds = match doc.words("schrodinger", "kinds") {
        None => vec![RhsKind::Lieb, RhsKind::HalfSharp, RhsKind::TwoTerm],
        Some(words) => {
            let mut out = Vec::new();
            for w in words {
                let k = RhsKind::parse(w).ok_or_else(|| {
                    let names: Vec<&str> = RhsKind::ALL.iter().map(|k| k.name()).collect();
                    doc.error_at("schrodinger", "kinds", format!("unknown bound '{w}' ({})", names.join(", ")))
                })?;
                if !out.contains(&k) {
                    out.push(k);
                }
            }
            out
        }
    };
    let gammas = number_list(doc, "schrodinger", "gamma", &[0.5, 1.0, 1.5])?;
    if let Some(g) = gammas.iter().find(|g| **g < 0.0) {
        return Err(doc.error_at("schrodinger", "gamma", format!("gamma must be nonnegative, got {g}")));
    }
    let betas = number_list(doc, "schrodinger", "beta", &[0.5, 1.0, 2.0])?;
    if let Some(b) = betas.iter().find(|b| **b <= 0.0) {
        return Err(doc.error_at("schrodinger", "beta", format!("beta must be positive, got {b}")));
    }
    let a = number_list(doc, "schrodinger", "a", &[0.0])?;
    if let Some(v) = a.iter().find(|v| **v < 0.0) {
        return Err(doc.error_at("schrodinger", "a", format!("a must be nonnegative, got {v}")));
    }
    let route = match doc.string("schrodinger", "route").unwrap_or("radial") {
        "radial" => RouteChoice::Radial,
        "oracle" => RouteChoice::Oracle,
        "both" => RouteChoice::Both,
        other => {
            return Err(doc.error_at(
                "schrodinger",
                "route",
                format!("unknown route '{other}' (radial, oracle, both)"),
            ))
        }
    };
    Ok(SchrodingerConfig {
        kinds,
        gammas,
        betas,
        d: positive(doc, "schrodinger", "d", 2.0)?,
        a,
        c_envelope: optional_positive(doc, "schrodinger", "c_envelope")?,
        route,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str, command: Command) -> Result<RunConfig, ParseError> {
        let doc = Document::parse(text)?;
        RunConfig::from_document(&doc, command, 1, digest_bytes(text.as_bytes()), Path::new("."))
    }

    #[test]
    fn dyadic_bounds_config() {
        let c = load(
            "[tree]\ngenerator = dyadic\ndimension = 2\ngenerations = 6\n[solver]\nR = 40\npoints_per_unit = 16\nt_max = 50\n",
            Command::Bounds,
        )
        .unwrap();
        assert_eq!(c.tree.horizon(), 6);
        assert_eq!(c.solver.points_per_unit, 16);
        assert_eq!(c.bounds.kinds.len(), 3);
        assert_eq!(c.digest.len(), 64);
    }

    #[test]
    fn missing_section_and_unknown_key() {
        let e = load("[tree]\ngenerator = half_line\n", Command::Heat).unwrap_err();
        assert!(e.message.contains("[solver]"), "{e}");
        let e = load("[tree]\ngenerator = half_line\ncolour = red\n", Command::Geometry).unwrap_err();
        assert_eq!(e.position.line, 3);
        let e = load("[tree]\ngenerator = half_line\n[extra]\n", Command::Geometry).unwrap_err();
        assert_eq!(e.position.line, 3);
    }

    #[test]
    fn ranges_checked_before_running() {
        let base = "[tree]\ngenerator = half_line\n[solver]\nR = 20\n[sweep]\nx = 0\n";
        let e = load(&format!("{base}t = 1 -2\n"), Command::Heat).unwrap_err();
        assert_eq!(e.position.line, 7);
        let e = load(&format!("{base}t = 1\nt_log = 1 2 3\n"), Command::Heat).unwrap_err();
        assert!(e.message.contains("either"));
        let c = load(&format!("{base}t_log = 0.05 4 5\n"), Command::Heat).unwrap();
        assert_eq!(c.sweep.t.len(), 5);
        assert_eq!(c.sweep.t[0], 0.05);
        let e = load("[tree]\ngenerator = tree\n", Command::Geometry).unwrap_err();
        assert_eq!(e.position, crate::config::Position { line: 2, column: 13 });
    }

    #[test]
    fn potentials_expand_lists() {
        let c = load(
            "[tree]\ngenerator = half_line\n[solver]\nR = 20\n[potential]\nv0 = 0.5 2 8\np = 2 3\n",
            Command::Schrodinger,
        )
        .unwrap();
        assert_eq!(c.potentials.len(), 6);
        assert_eq!(c.potentials[0].label, "radial_power v0=0.5 p=2");
    }

    #[test]
    fn edge_csv() {
        let t = parse_edge_csv("edge_id,offset,value\n0,0,1\n0,1,2\n2,0,3\n2,0.5,0\n").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[1].edge, 2);
        assert_eq!(t[1].values, vec![3.0, 0.0]);
        assert_eq!(parse_edge_csv("edge_id,offset,value\n0,x,1\n").unwrap_err().0, 2);
        assert_eq!(parse_edge_csv("a,b\n").unwrap_err().0, 1);
    }

    #[test]
    fn refine_multiplies_density() {
        let doc = Document::parse("[tree]\ngenerator = half_line\n[solver]\nR = 20\npoints_per_unit = 16\n").unwrap();
        let c = RunConfig::from_document(&doc, Command::Bounds, 2, String::new(), Path::new(".")).unwrap();
        assert_eq!(c.solver.points_per_unit, 32);
    }
}
