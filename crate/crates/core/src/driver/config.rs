//! Control-file grammar and the typed run configuration.
//!
//! One `key = value` per line, `!` starts a comment, keys are
//! case-insensitive with internal whitespace collapsed. Boundary conditions
//! are given in blocks:
//!
//! ```text
//! #define boundary inlet
//!   type = freestream
//!   density = 1.0
//!   velocity = 0.5 0 0
//!   pressure = 1.0
//! #end
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use crate::adaptation::AdaptMode;
use crate::basis::NodeKind;
use crate::dg::{BoundaryCondition, BoundaryKind, VolumeForm};
use crate::error::{Error, Result};
use crate::mesh::{Curvature, MeshSpec, FACE_NAMES};
use crate::physics::{GasProperties, RiemannSolver};
use crate::shock_capturing::{ArtificialFluxConfig, FilterKernel, KernelKind};
use crate::time_integration::RkScheme;

/// Every accepted global key with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("mesh", "mesh generator; only `box` is available"),
    ("mesh elements", "element counts nx ny nz"),
    ("mesh bounds", "x0 x1 y0 y1 z0 z1"),
    ("mesh periodic", "three booleans, or `all` / `none`"),
    ("mesh curvature", "none | sinusoidal"),
    ("curvature amplitude", "relative amplitude of the sinusoidal mapping"),
    ("curvature wavenumber", "integer wavenumber of the sinusoidal mapping"),
    ("mesh boundaries", "six boundary names for xmin xmax ymin ymax zmin zmax"),
    ("geometry order", "polynomial order of the geometry representation"),
    ("gamma", "ratio of specific heats"),
    ("gas constant", "specific gas constant R"),
    ("prandtl number", "Prandtl number"),
    ("viscosity", "dynamic viscosity"),
    ("reynolds number", "sets viscosity = 1 / Re (unit reference density, velocity and length)"),
    ("mach number", "reference Mach number of the initial condition"),
    ("polynomial order", "one order, or px py pz"),
    ("discretization nodes", "gauss | gauss-lobatto"),
    ("riemann solver", "central | lax-friedrichs | rusanov | roe"),
    ("volume flux", "standard | central | ducros | kennedy-gruber | pirozzoli | entropy-conserving | chandrashekar"),
    ("flux", "alias of `volume flux`"),
    ("les model", "none | smagorinsky"),
    ("smagorinsky constant", "Cs of the Smagorinsky model"),
    ("time integration", "explicit"),
    ("explicit method", "rk3 | rk45"),
    ("cfl", "convective CFL number"),
    ("dfl", "viscous stability number"),
    ("dt", "fixed time step; overrides cfl"),
    ("final time", "end time of the run"),
    ("max iterations", "maximum number of time steps"),
    ("padaptation mode", "none | feature | tau"),
    ("padaptation interval", "steps between adaptations"),
    ("truncation error threshold", "τ threshold for tau adaptation"),
    ("padaptation sensor low", "feature sensor mapped to the minimum order"),
    ("padaptation sensor high", "feature sensor mapped to the maximum order"),
    ("minimum order", "lower order bound"),
    ("maximum order", "upper order bound"),
    ("shock capturing", "none | svv"),
    ("svv kernel", "identity | tadmor | exponential"),
    ("svv cutoff", "highest mode left unfiltered"),
    ("artificial viscosity", "maximum artificial viscosity"),
    ("sensor low", "shock sensor value where artificial viscosity starts"),
    ("sensor high", "shock sensor value of full artificial viscosity"),
    ("monitor interval", "steps between monitor records"),
    ("probes", "probe points `x y z; x y z; ...` in undeformed box coordinates"),
    ("output directory", "directory for monitors, snapshots and restart files"),
    ("snapshot interval", "steps between snapshots (0: initial and final only)"),
    ("snapshot format", "table | vtk"),
    ("snapshot gradients", "emit vorticity and Q-criterion in snapshots"),
    ("visualization order", "equispaced points per element edge minus one"),
    ("restart interval", "steps between restart files (0: final only)"),
    ("initial condition", "uniform | isentropic-vortex | taylor-green"),
    ("initial density", "uniform initial density"),
    ("initial velocity", "uniform initial velocity"),
    ("initial pressure", "uniform initial pressure"),
    ("vortex strength", "isentropic vortex strength β"),
    ("vortex center", "isentropic vortex centre x y"),
    ("advection velocity", "isentropic vortex advection velocity u v w"),
];

const BOUNDARY_KEYS: &[&str] = &["type", "density", "velocity", "pressure"];

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Uniform { density: f64, velocity: [f64; 3], pressure: f64 },
    /// Shu's vortex in the x-y plane on a unit background state.
    IsentropicVortex { strength: f64, center: [f64; 2], velocity: [f64; 3] },
    /// Unit density and velocity scale, pressure from the Mach number.
    TaylorGreen { mach: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapshotFormat {
    Table,
    Vtk,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    Fixed(f64),
    Cfl { cfl: f64, dfl: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptationSettings {
    pub mode: AdaptMode,
    pub interval: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mesh: MeshSpec,
    pub gas: GasProperties,
    pub orders: [usize; 3],
    pub min_order: usize,
    pub max_order: usize,
    pub geometry_order: usize,
    pub kind: NodeKind,
    pub volume: VolumeForm,
    pub riemann: RiemannSolver,
    pub scheme: RkScheme,
    pub time_step: TimeStep,
    pub final_time: Option<f64>,
    pub max_iterations: Option<usize>,
    pub adaptation: Option<AdaptationSettings>,
    pub shock_capturing: Option<ArtificialFluxConfig>,
    pub monitor_interval: usize,
    pub probes: Vec<[f64; 3]>,
    pub output_dir: PathBuf,
    pub snapshot_interval: usize,
    pub snapshot_format: SnapshotFormat,
    pub snapshot_gradients: bool,
    pub visualization_order: usize,
    pub restart_interval: usize,
    pub initial: InitialCondition,
    pub boundaries: Vec<BoundaryCondition>,
}

fn normalize_key(k: &str) -> String {
    k.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

fn suggest<'a>(key: &str, known: impl Iterator<Item = &'a str>) -> Option<&'a str> {
    known
        .map(|k| (strsim::levenshtein(key, k), k))
        .min()
        .filter(|(d, k)| *d <= (k.len() / 2).max(2))
        .map(|(_, k)| k)
}

struct Entry {
    value: String,
    line: usize,
}

struct Section {
    entries: BTreeMap<String, Entry>,
}

struct Reader<'a> {
    section: &'a Section,
    errors: &'a mut Vec<String>,
    context: String,
}

impl Reader<'_> {
    fn raw(&self, key: &str) -> Option<&Entry> {
        self.section.entries.get(key)
    }

    fn has(&self, key: &str) -> bool {
        self.raw(key).is_some()
    }

    fn fail(&mut self, key: &str, msg: impl std::fmt::Display) {
        let line = self.raw(key).map_or(String::new(), |e| format!("line {}: ", e.line));
        self.errors.push(format!("{line}{}`{key}`: {msg}", self.context));
    }

    fn parsed<T: FromStr>(&mut self, key: &str, what: &str) -> Option<T> {
        let v = self.raw(key)?.value.clone();
        match v.parse::<T>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.fail(key, format!("expected {what}, got '{v}'"));
                None
            }
        }
    }

    fn real(&mut self, key: &str, default: f64) -> f64 {
        self.parsed::<f64>(key, "a real number").unwrap_or(default)
    }

    fn real_opt(&mut self, key: &str) -> Option<f64> {
        self.parsed::<f64>(key, "a real number")
    }

    fn int(&mut self, key: &str, default: usize) -> usize {
        self.parsed::<usize>(key, "a non-negative integer").unwrap_or(default)
    }

    fn int_opt(&mut self, key: &str) -> Option<usize> {
        self.parsed::<usize>(key, "a non-negative integer")
    }

    fn list<T: FromStr>(&mut self, key: &str, len: &[usize], what: &str) -> Option<Vec<T>> {
        let v = self.raw(key)?.value.clone();
        let parts: Vec<&str> = v.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect();
        if !len.contains(&parts.len()) {
            let counts: Vec<String> = len.iter().map(|n| n.to_string()).collect();
            self.fail(key, format!("expected {} {what} values, got '{v}'", counts.join(" or ")));
            return None;
        }
        let parsed: std::result::Result<Vec<T>, _> = parts.iter().map(|s| s.parse::<T>()).collect();
        match parsed {
            Ok(x) => Some(x),
            Err(_) => {
                self.fail(key, format!("expected {what} values, got '{v}'"));
                None
            }
        }
    }

    fn word(&mut self, key: &str) -> Option<String> {
        self.raw(key).map(|e| normalize_key(&e.value))
    }

    fn choice<T>(&mut self, key: &str, default: T, parse: impl Fn(&str) -> Result<T>) -> T {
        match self.raw(key).map(|e| e.value.clone()) {
            None => default,
            Some(v) => match parse(&v) {
                Ok(x) => x,
                Err(e) => {
                    let msg = match e {
                        Error::Configuration(m) | Error::Parameter(m) => m,
                        other => other.to_string(),
                    };
                    self.fail(key, msg);
                    default
                }
            },
        }
    }

    fn boolean(&mut self, key: &str, default: bool) -> bool {
        match self.word(key) {
            None => default,
            Some(w) => parse_bool(&w).unwrap_or_else(|| {
                self.fail(key, format!("expected true/false, got '{w}'"));
                default
            }),
        }
    }
}

fn parse_bool(w: &str) -> Option<bool> {
    match w {
        "true" | "yes" | "on" | ".true." | "1" => Some(true),
        "false" | "no" | "off" | ".false." | "0" => Some(false),
        _ => None,
    }
}

fn parse_kind(s: &str) -> Result<NodeKind> {
    match normalize_key(s).as_str() {
        "gauss" => Ok(NodeKind::Gauss),
        "gauss-lobatto" | "gauss lobatto" | "lobatto" => Ok(NodeKind::GaussLobatto),
        _ => Err(Error::Configuration(format!("unknown node family '{s}' (expected gauss or gauss-lobatto)"))),
    }
}

struct Document {
    global: Section,
    boundaries: Vec<(String, usize, Section)>,
}

fn lex(text: &str, errors: &mut Vec<String>) -> Document {
    let mut global = Section { entries: BTreeMap::new() };
    let mut boundaries: Vec<(String, usize, Section)> = Vec::new();
    let mut open: Option<(String, usize, Section)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('!').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            let directive = normalize_key(line);
            if let Some(name) = directive.strip_prefix("#define boundary") {
                let name = name.trim();
                if open.is_some() {
                    errors.push(format!("line {line_no}: nested `#define boundary` (missing `#end`)"));
                } else if name.is_empty() {
                    errors.push(format!("line {line_no}: `#define boundary` needs a name"));
                } else {
                    open = Some((name.to_string(), line_no, Section { entries: BTreeMap::new() }));
                }
            } else if directive == "#end" {
                match open.take() {
                    Some(b) => boundaries.push(b),
                    None => errors.push(format!("line {line_no}: `#end` without an open block")),
                }
            } else {
                errors.push(format!("line {line_no}: unknown directive '{line}'"));
            }
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            errors.push(format!("line {line_no}: expected `key = value`, got '{line}'"));
            continue;
        };
        let key = normalize_key(k);
        let value = v.trim().to_string();
        let target = match open.as_mut() {
            Some((_, _, s)) => s,
            None => &mut global,
        };
        if let Some(prev) = target.entries.get(&key) {
            errors.push(format!("line {line_no}: `{key}` already set on line {}", prev.line));
            continue;
        }
        target.entries.insert(key, Entry { value, line: line_no });
    }
    if let Some((name, line, _)) = open {
        errors.push(format!("line {line}: boundary block '{name}' is missing `#end`"));
    }
    Document { global, boundaries }
}

/// Parse control-file text into a validated configuration. All problems
/// found are reported together.
pub fn parse_control_file(text: &str) -> Result<RunConfig> {
    let mut errors = Vec::new();
    let doc = lex(text, &mut errors);

    for (key, entry) in &doc.global.entries {
        if !KEYS.iter().any(|(k, _)| k == key) {
            let hint = suggest(key, KEYS.iter().map(|(k, _)| *k))
                .map_or(String::new(), |s| format!(" (did you mean `{s}`?)"));
            errors.push(format!("line {}: unknown key `{key}`{hint}", entry.line));
        }
    }
    for (name, _, section) in &doc.boundaries {
        for (key, entry) in &section.entries {
            if !BOUNDARY_KEYS.contains(&key.as_str()) {
                let hint = suggest(key, BOUNDARY_KEYS.iter().copied())
                    .map_or(String::new(), |s| format!(" (did you mean `{s}`?)"));
                errors.push(format!("line {}: unknown key `{key}` in boundary '{name}'{hint}", entry.line));
            }
        }
    }

    let g = &doc.global;
    let mut missing = Vec::new();
    if !g.entries.contains_key("mesh") {
        missing.push("missing mandatory key `mesh`".to_string());
    }
    if !g.entries.contains_key("final time") && !g.entries.contains_key("max iterations") {
        missing.push("missing mandatory key `final time` or `max iterations`".to_string());
    }
    if !g.entries.contains_key("polynomial order") {
        missing.push("missing mandatory key `polynomial order`".to_string());
    }
    errors.extend(missing);

    let config = build(&doc, &mut errors);
    if errors.is_empty() {
        Ok(config)
    } else {
        Err(Error::Control(errors))
    }
}

fn build(doc: &Document, errors: &mut Vec<String>) -> RunConfig {
    let mut r = Reader { section: &doc.global, errors, context: String::new() };

    if let Some(m) = r.word("mesh") {
        if m != "box" {
            r.fail("mesh", format!("unknown mesh generator '{m}' (only `box` is available)"));
        }
    }
    let counts = r.list::<usize>("mesh elements", &[3], "integer").map_or([1, 1, 1], |v| [v[0], v[1], v[2]]);
    let tau = 2.0 * std::f64::consts::PI;
    let bounds = r
        .list::<f64>("mesh bounds", &[6], "real")
        .map_or([[0.0, tau]; 3], |v| [[v[0], v[1]], [v[2], v[3]], [v[4], v[5]]]);
    let periodic = match r.word("mesh periodic").as_deref() {
        None | Some("all") => [true; 3],
        Some("none") => [false; 3],
        Some(_) => {
            let v = r.raw("mesh periodic").unwrap().value.clone();
            let flags: Vec<Option<bool>> = v.split_whitespace().map(|s| parse_bool(&s.to_lowercase())).collect();
            if flags.len() == 3 && flags.iter().all(Option::is_some) {
                [flags[0].unwrap(), flags[1].unwrap(), flags[2].unwrap()]
            } else {
                r.fail("mesh periodic", format!("expected three booleans, `all` or `none`, got '{v}'"));
                [true; 3]
            }
        }
    };
    let curvature = match r.word("mesh curvature").as_deref() {
        None | Some("none") => Curvature::Identity,
        Some("sinusoidal") => Curvature::Sinusoidal {
            amplitude: r.real("curvature amplitude", 0.05),
            wavenumber: r.parsed::<u32>("curvature wavenumber", "a positive integer").unwrap_or(1),
        },
        Some(other) => {
            r.fail("mesh curvature", format!("unknown curvature '{other}' (expected none or sinusoidal)"));
            Curvature::Identity
        }
    };
    let mut mesh = MeshSpec::new(counts, bounds).periodic(periodic).curved(curvature);
    if let Some(names) = r.list::<String>("mesh boundaries", &[6], "name") {
        mesh.boundary_tags = [0, 1, 2, 3, 4, 5].map(|i| names[i].to_lowercase());
    }
    if let Err(e) = mesh.validate() {
        r.errors.push(e.to_string());
    }

    let mut gas = GasProperties {
        gamma: r.real("gamma", 1.4),
        gas_constant: r.real("gas constant", 1.0),
        prandtl: r.real("prandtl number", 0.72),
        mu: 0.0,
        smagorinsky_cs: 0.0,
    };
    match (r.real_opt("viscosity"), r.real_opt("reynolds number")) {
        (Some(_), Some(_)) => r.fail("reynolds number", "give either `viscosity` or `reynolds number`, not both"),
        (Some(mu), None) => gas.mu = mu,
        (None, Some(re)) if re > 0.0 => gas.mu = 1.0 / re,
        (None, Some(re)) => r.fail("reynolds number", format!("must be positive, got {re}")),
        (None, None) => {}
    }
    match r.word("les model").as_deref() {
        None | Some("none") => {
            if r.has("smagorinsky constant") {
                r.fail("smagorinsky constant", "set `les model = smagorinsky` to use it");
            }
        }
        Some("smagorinsky") => gas.smagorinsky_cs = r.real("smagorinsky constant", 0.1),
        Some(other) => r.fail("les model", format!("unknown LES model '{other}' (expected none or smagorinsky)")),
    }
    if let Err(e) = gas.validate() {
        r.errors.push(e.to_string());
    }

    let orders = match r.list::<usize>("polynomial order", &[1, 3], "integer") {
        Some(v) if v.len() == 1 => [v[0]; 3],
        Some(v) => [v[0], v[1], v[2]],
        None => [1; 3],
    };
    let lowest = *orders.iter().min().unwrap();
    let highest = *orders.iter().max().unwrap();
    let min_order = r.int("minimum order", 1);
    let max_order = r.int("maximum order", highest);
    if min_order == 0 || min_order > lowest || max_order < highest || max_order > crate::basis::MAX_ORDER {
        r.errors.push(format!(
            "orders {orders:?} must lie within [minimum order, maximum order] = [{min_order}, {max_order}] with 1 <= min and max <= {}",
            crate::basis::MAX_ORDER
        ));
    }

    let adaptation = match r.word("padaptation mode").as_deref() {
        None | Some("none") => None,
        Some(mode) => {
            let interval = r.int("padaptation interval", 100);
            if interval == 0 {
                r.fail("padaptation interval", "must be positive");
            }
            let mode = match mode {
                "feature" => Some(AdaptMode::Feature {
                    low: r.real("padaptation sensor low", 1e-4),
                    high: r.real("padaptation sensor high", 1e-1),
                }),
                "tau" => Some(AdaptMode::Tau { threshold: r.real("truncation error threshold", 1e-3) }),
                other => {
                    r.fail("padaptation mode", format!("unknown mode '{other}' (expected none, feature or tau)"));
                    None
                }
            };
            if let Some(Err(e)) = mode.map(|m| m.validate()) {
                r.errors.push(e.to_string());
            }
            mode.map(|mode| AdaptationSettings { mode, interval: interval.max(1) })
        }
    };
    let default_geometry = if adaptation.is_some() { min_order } else { lowest };
    let geometry_order = r.int("geometry order", default_geometry);
    if geometry_order == 0 {
        r.fail("geometry order", "must be at least 1");
    }

    let kind = r.choice("discretization nodes", NodeKind::GaussLobatto, parse_kind);
    let volume_key = if r.has("volume flux") { "volume flux" } else { "flux" };
    if r.has("volume flux") && r.has("flux") {
        r.fail("flux", "`flux` is an alias of `volume flux`; give only one");
    }
    let volume = r.choice(volume_key, VolumeForm::Standard, |s| s.parse());
    let riemann = r.choice("riemann solver", RiemannSolver::Roe, |s| s.parse());

    match r.word("time integration").as_deref() {
        None | Some("explicit") => {}
        Some(w @ ("implicit" | "bdf" | "rosenbrock" | "fas" | "multigrid")) => r.fail(
            "time integration",
            format!("'{w}' time integration is not available in this solver; only `explicit` low-storage Runge-Kutta is implemented"),
        ),
        Some(other) => r.fail("time integration", format!("unknown time integration '{other}' (expected explicit)")),
    }
    let scheme = r.choice("explicit method", RkScheme::Rk3LowStorage, |s| s.parse());
    let time_step = match r.real_opt("dt") {
        Some(dt) => {
            if !(dt > 0.0) {
                r.fail("dt", "must be positive");
            }
            if r.has("cfl") {
                r.fail("cfl", "give either `dt` or `cfl`, not both");
            }
            TimeStep::Fixed(dt)
        }
        None => {
            let cfl = r.real("cfl", 0.5);
            let dfl = r.real("dfl", if gas.is_viscous() { 0.25 } else { 0.0 });
            if !(cfl > 0.0) {
                r.fail("cfl", "must be positive");
            }
            if !(dfl >= 0.0) {
                r.fail("dfl", "must be non-negative");
            }
            TimeStep::Cfl { cfl, dfl }
        }
    };
    let final_time = r.real_opt("final time");
    if final_time.is_some_and(|t| !(t >= 0.0)) {
        r.fail("final time", "must be non-negative");
    }
    let max_iterations = r.int_opt("max iterations");

    let shock_capturing = match r.word("shock capturing").as_deref() {
        None | Some("none") => None,
        Some("svv") => {
            let kernel_kind = r.choice("svv kernel", KernelKind::Exponential, |s| s.parse());
            let cutoff = r.int("svv cutoff", 1);
            let kernel = match kernel_kind {
                KernelKind::Identity => FilterKernel::IDENTITY,
                KernelKind::Tadmor => FilterKernel::tadmor(cutoff),
                KernelKind::Exponential => FilterKernel::exponential(cutoff),
            };
            let sc = ArtificialFluxConfig {
                mu_a: r.real("artificial viscosity", 0.01),
                s_low: r.real("sensor low", 0.1),
                s_high: r.real("sensor high", 1.0),
                kernel,
            };
            if let Err(e) = sc.validate() {
                r.errors.push(e.to_string());
            }
            if kind == NodeKind::Gauss {
                r.fail("shock capturing", "SVV requires `discretization nodes = gauss-lobatto`");
            }
            Some(sc)
        }
        Some(other) => {
            r.fail("shock capturing", format!("unknown shock capturing '{other}' (expected none or svv)"));
            None
        }
    };

    let monitor_interval = r.int("monitor interval", 1).max(1);
    let probes = match r.raw("probes").map(|e| e.value.clone()) {
        None => Vec::new(),
        Some(v) => {
            let mut out = Vec::new();
            for chunk in v.split(';').map(str::trim).filter(|c| !c.is_empty()) {
                let xs: Vec<f64> = chunk.split_whitespace().filter_map(|s| s.parse().ok()).collect();
                if xs.len() == 3 && chunk.split_whitespace().count() == 3 {
                    out.push([xs[0], xs[1], xs[2]]);
                } else {
                    r.fail("probes", format!("probe '{chunk}' must be three reals"));
                }
            }
            out
        }
    };
    let output_dir = r.raw("output directory").map_or(PathBuf::from("."), |e| PathBuf::from(e.value.trim()));
    let snapshot_interval = r.int("snapshot interval", 0);
    let snapshot_format = match r.word("snapshot format").as_deref() {
        None | Some("table") => SnapshotFormat::Table,
        Some("vtk") => SnapshotFormat::Vtk,
        Some(other) => {
            r.fail("snapshot format", format!("unknown format '{other}' (expected table or vtk)"));
            SnapshotFormat::Table
        }
    };
    let snapshot_gradients = r.boolean("snapshot gradients", false);
    let visualization_order = r.int("visualization order", highest);
    if visualization_order == 0 {
        r.fail("visualization order", "must be at least 1");
    }
    let restart_interval = r.int("restart interval", 0);

    let mach = r.real("mach number", 0.1);
    let initial = match r.word("initial condition").as_deref() {
        None | Some("uniform") => {
            let velocity = r.list::<f64>("initial velocity", &[3], "real").map_or([0.0; 3], |v| [v[0], v[1], v[2]]);
            InitialCondition::Uniform {
                density: r.real("initial density", 1.0),
                velocity,
                pressure: r.real("initial pressure", 1.0 / (gas.gamma * mach * mach)),
            }
        }
        Some("isentropic-vortex" | "isentropic vortex") => {
            let center = r.list::<f64>("vortex center", &[2], "real").map_or(
                [0.5 * (bounds[0][0] + bounds[0][1]), 0.5 * (bounds[1][0] + bounds[1][1])],
                |v| [v[0], v[1]],
            );
            let velocity = r.list::<f64>("advection velocity", &[3], "real").map_or([1.0, 1.0, 0.0], |v| [v[0], v[1], v[2]]);
            InitialCondition::IsentropicVortex { strength: r.real("vortex strength", 5.0), center, velocity }
        }
        Some("taylor-green" | "taylor green") => {
            if !(mach > 0.0) {
                r.fail("mach number", "must be positive");
            }
            InitialCondition::TaylorGreen { mach }
        }
        Some(other) => {
            r.fail(
                "initial condition",
                format!("unknown initial condition '{other}' (expected uniform, isentropic-vortex or taylor-green)"),
            );
            InitialCondition::Uniform { density: 1.0, velocity: [0.0; 3], pressure: 1.0 }
        }
    };

    let errors = r.errors;
    let boundaries = build_boundaries(doc, &gas, errors);
    for (axis, p) in periodic.iter().enumerate() {
        if *p {
            continue;
        }
        for side in 0..2 {
            let tag = &mesh.boundary_tags[2 * axis + side];
            if !boundaries.iter().any(|b| &b.tag == tag) {
                errors.push(format!(
                    "face {} uses boundary '{tag}' but no `#define boundary {tag}` block was given",
                    FACE_NAMES[2 * axis + side]
                ));
            }
        }
    }

    RunConfig {
        mesh,
        gas,
        orders,
        min_order,
        max_order,
        geometry_order,
        kind,
        volume,
        riemann,
        scheme,
        time_step,
        final_time,
        max_iterations,
        adaptation,
        shock_capturing,
        monitor_interval,
        probes,
        output_dir,
        snapshot_interval,
        snapshot_format,
        snapshot_gradients,
        visualization_order,
        restart_interval,
        initial,
        boundaries,
    }
}

fn build_boundaries(doc: &Document, gas: &GasProperties, errors: &mut Vec<String>) -> Vec<BoundaryCondition> {
    let mut out: Vec<BoundaryCondition> = Vec::new();
    for (name, line, section) in &doc.boundaries {
        let mut r = Reader { section, errors, context: format!("boundary '{name}': ") };
        let kind = match r.word("type").as_deref() {
            None => {
                r.errors.push(format!("line {line}: boundary '{name}' has no `type`"));
                continue;
            }
            Some("periodic") => BoundaryKind::Periodic,
            Some("inviscid wall" | "inviscid-wall" | "slip wall") => BoundaryKind::InviscidWall,
            Some("noslip wall" | "no-slip wall" | "noslip-adiabatic-wall" | "adiabatic wall") => {
                BoundaryKind::NoSlipAdiabaticWall
            }
            Some("freestream" | "free-stream" | "farfield") => {
                let velocity = r.list::<f64>("velocity", &[3], "real").map_or([0.0; 3], |v| [v[0], v[1], v[2]]);
                BoundaryKind::FreeStream(gas.state_from_primitive(
                    r.real("density", 1.0),
                    velocity,
                    r.real("pressure", 1.0),
                ))
            }
            Some(other) => {
                r.fail(
                    "type",
                    format!("unknown boundary type '{other}' (expected freestream, inviscid wall, noslip wall or periodic)"),
                );
                continue;
            }
        };
        let bc = BoundaryCondition::new(name.clone(), kind);
        if let Err(e) = bc.validate(gas) {
            r.errors.push(format!("boundary '{name}': {e}"));
        }
        if out.iter().any(|b| b.tag == *name) {
            r.errors.push(format!("line {line}: boundary '{name}' defined twice"));
        }
        out.push(bc);
    }
    out
}
