//! Command-line and config-file parsing.
//!
//! Every setting has one key, used both as `--key value` and as a
//! `key = value` line in the file given by `--config`. Flags win.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use supershift_core::evolve::{QuadratureSpec, RhoMaxPolicy};
use supershift_core::{BoundaryKind, CartesianPoint};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Field,
    Coeffs,
    Supershift,
    Greens,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Quadrature,
    Operator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Re,
    Im,
    Abs,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            return self.max;
        }
        self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x1: Axis,
    pub x2: Axis,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Datum {
    PlaneWave([f64; 2]),
    Monomial(usize, usize),
    Constant(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub kind: BoundaryKind,
    pub t: f64,
    pub grid: Option<Grid>,
    pub x: Option<CartesianPoint>,
    pub y: Option<CartesianPoint>,
    pub datum: Option<Datum>,
    pub method: Method,
    pub quadrature: QuadratureSpec,
    pub csv: Option<PathBuf>,
    pub pgm: Option<PathBuf>,
    pub component: Component,
    pub gamma: f64,
    pub threads: Option<usize>,
    pub a: f64,
    pub p1: u32,
    pub p2: u32,
    pub n_list: Vec<usize>,
    pub order: usize,
}

/// Keys accepted in a config file, in flag spelling.
pub const KEYS: &[&str] = &[
    "kind", "t", "x", "y", "grid", "plane-wave", "monomial", "constant", "method", "threads", "out", "pgm",
    "component", "gamma", "alpha", "n-theta", "n-rho", "tol", "rho-max", "a", "p1", "p2", "n-list", "order",
];

const DATUM_KEYS: &[&str] = &["plane-wave", "monomial", "constant"];

#[derive(Parser, Debug)]
#[command(name = "supershift", version, about = "Schrödinger propagation past a half-line barrier")]
struct Cli {
    #[command(subcommand)]
    command: CommandArg,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum CommandArg {
    /// Run every invariant suite and print a pass/fail table
    Validate,
    /// Sample Ψ over a grid and write CSV (and optionally PGM)
    Field,
    /// Print the operator coefficients c_{n1,n2} at one point
    Coeffs,
    /// Run the superoscillation convergence experiment
    Supershift,
    /// Evaluate the Green's function G(t, x, y)
    Greens,
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// `key = value` settings file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// dirichlet | neumann
    #[arg(long, global = true, allow_hyphen_values = true)]
    kind: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    t: Option<String>,
    /// observation point `x1,x2`
    #[arg(long, global = true, allow_hyphen_values = true)]
    x: Option<String>,
    /// source point `y1,y2` (greens)
    #[arg(long, global = true, allow_hyphen_values = true)]
    y: Option<String>,
    /// `min:max:count,min:max:count`
    #[arg(long, global = true, allow_hyphen_values = true)]
    grid: Option<String>,
    /// `k1,k2`
    #[arg(long = "plane-wave", global = true, allow_hyphen_values = true)]
    plane_wave: Option<String>,
    /// `n1,n2`: the datum z1^n1 z2^n2
    #[arg(long, global = true, allow_hyphen_values = true)]
    monomial: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    constant: Option<String>,
    /// quadrature | operator
    #[arg(long, global = true)]
    method: Option<String>,
    #[arg(long, global = true)]
    threads: Option<String>,
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true)]
    pgm: Option<String>,
    /// re | im | abs
    #[arg(long, global = true)]
    component: Option<String>,
    #[arg(long, global = true)]
    gamma: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long = "n-theta", global = true)]
    n_theta: Option<String>,
    #[arg(long = "n-rho", global = true)]
    n_rho: Option<String>,
    #[arg(long, global = true)]
    tol: Option<String>,
    /// radial cutoff, or `auto`
    #[arg(long = "rho-max", global = true)]
    rho_max: Option<String>,
    #[arg(long, global = true)]
    a: Option<String>,
    #[arg(long, global = true)]
    p1: Option<String>,
    #[arg(long, global = true)]
    p2: Option<String>,
    /// `4,8,12` or `start:stop:step`
    #[arg(long = "n-list", global = true)]
    n_list: Option<String>,
    #[arg(long, global = true)]
    order: Option<String>,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, Option<&String>)> {
        vec![
            ("kind", self.kind.as_ref()),
            ("t", self.t.as_ref()),
            ("x", self.x.as_ref()),
            ("y", self.y.as_ref()),
            ("grid", self.grid.as_ref()),
            ("plane-wave", self.plane_wave.as_ref()),
            ("monomial", self.monomial.as_ref()),
            ("constant", self.constant.as_ref()),
            ("method", self.method.as_ref()),
            ("threads", self.threads.as_ref()),
            ("out", self.out.as_ref()),
            ("pgm", self.pgm.as_ref()),
            ("component", self.component.as_ref()),
            ("gamma", self.gamma.as_ref()),
            ("alpha", self.alpha.as_ref()),
            ("n-theta", self.n_theta.as_ref()),
            ("n-rho", self.n_rho.as_ref()),
            ("tol", self.tol.as_ref()),
            ("rho-max", self.rho_max.as_ref()),
            ("a", self.a.as_ref()),
            ("p1", self.p1.as_ref()),
            ("p2", self.p2.as_ref()),
            ("n-list", self.n_list.as_ref()),
            ("order", self.order.as_ref()),
        ]
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(usage(format!("config line {}: unknown key `{key}`", lineno + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

/// Parses argv (including the program name) plus an optional config file.
pub fn parse_config<I, T>(argv: I, file: Option<PathBuf>) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(CliError::Clap)?;
    let mut settings = match file.or_else(|| cli.flags.config.clone()) {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
            parse_config_text(&text)?
        }
        None => BTreeMap::new(),
    };
    let pairs = cli.flags.pairs();
    if pairs.iter().any(|(k, v)| v.is_some() && DATUM_KEYS.contains(k)) {
        settings.retain(|k, _| !DATUM_KEYS.contains(&k.as_str()));
    }
    for (k, v) in pairs {
        if let Some(v) = v {
            settings.insert(k.to_string(), v.clone());
        }
    }
    let command = match cli.command {
        CommandArg::Validate => Command::Validate,
        CommandArg::Field => Command::Field,
        CommandArg::Coeffs => Command::Coeffs,
        CommandArg::Supershift => Command::Supershift,
        CommandArg::Greens => Command::Greens,
    };
    build(command, &settings)
}

fn parse_f64(key: &str, s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| usage(format!("--{key}: expected a finite number, got `{s}`")))
}

fn parse_usize(key: &str, s: &str) -> Result<usize, CliError> {
    s.trim().parse::<usize>().map_err(|_| usage(format!("--{key}: expected a non-negative integer, got `{s}`")))
}

fn parse_pair(key: &str, s: &str) -> Result<[f64; 2], CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(usage(format!("--{key}: expected `a,b`, got `{s}`")));
    }
    Ok([parse_f64(key, parts[0])?, parse_f64(key, parts[1])?])
}

fn parse_axis(s: &str) -> Result<Axis, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(usage(format!("--grid: expected `min:max:count`, got `{s}`")));
    }
    let axis = Axis {
        min: parse_f64("grid", parts[0])?,
        max: parse_f64("grid", parts[1])?,
        count: parse_usize("grid", parts[2])?,
    };
    if axis.count < 2 || axis.max.partial_cmp(&axis.min) != Some(std::cmp::Ordering::Greater) {
        return Err(usage(format!("--grid: need min < max and count ≥ 2, got `{s}`")));
    }
    Ok(axis)
}

pub fn parse_grid(s: &str) -> Result<Grid, CliError> {
    let (a, b) = s.split_once(',').ok_or_else(|| usage(format!("--grid: expected two axes, got `{s}`")))?;
    Ok(Grid { x1: parse_axis(a)?, x2: parse_axis(b)? })
}

pub fn parse_n_list(s: &str) -> Result<Vec<usize>, CliError> {
    let list = if let [start, stop, step] = s.split(':').collect::<Vec<_>>()[..] {
        let (start, stop, step) =
            (parse_usize("n-list", start)?, parse_usize("n-list", stop)?, parse_usize("n-list", step)?);
        if step == 0 {
            return Err(usage("--n-list: step must be positive"));
        }
        (start..=stop).step_by(step).collect()
    } else {
        s.split(',').map(|p| parse_usize("n-list", p)).collect::<Result<Vec<_>, _>>()?
    };
    if list.is_empty() || list.contains(&0) || list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(usage(format!("--n-list: need a non-empty ascending list of positive n, got `{s}`")));
    }
    Ok(list)
}

fn build(command: Command, s: &BTreeMap<String, String>) -> Result<RunConfig, CliError> {
    let get = |k: &str| s.get(k).map(String::as_str);
    let needs_problem = command != Command::Validate;

    let kind = match get("kind") {
        Some(v) => v.parse::<BoundaryKind>().map_err(|e| usage(format!("--kind: {e}")))?,
        None if needs_problem => return Err(usage("missing required --kind")),
        None => BoundaryKind::Dirichlet,
    };
    let t = match get("t") {
        Some(v) => {
            let t = parse_f64("t", v)?;
            if t <= 0.0 {
                return Err(usage(format!("--t must be positive, got {t}")));
            }
            t
        }
        None if needs_problem => return Err(usage("missing required --t")),
        None => 1.0,
    };
    let point = |k: &str| -> Result<Option<CartesianPoint>, CliError> {
        get(k).map(|v| parse_pair(k, v).map(|p| CartesianPoint::new(p[0], p[1]))).transpose()
    };
    let x = point("x")?;
    let y = point("y")?;
    let grid = get("grid").map(parse_grid).transpose()?;

    let datums: Vec<&str> = DATUM_KEYS.iter().copied().filter(|k| s.contains_key(*k)).collect();
    if datums.len() > 1 {
        return Err(usage(format!("conflicting data: {}", datums.join(", "))));
    }
    let datum = match datums.first().copied() {
        Some("plane-wave") => Some(Datum::PlaneWave(parse_pair("plane-wave", &s["plane-wave"])?)),
        Some("monomial") => {
            let p: Vec<&str> = s["monomial"].split(',').collect();
            if p.len() != 2 {
                return Err(usage("--monomial: expected `n1,n2`"));
            }
            Some(Datum::Monomial(parse_usize("monomial", p[0])?, parse_usize("monomial", p[1])?))
        }
        Some(_) => Some(Datum::Constant(parse_f64("constant", &s["constant"])?)),
        None => None,
    };

    let method = match get("method") {
        None | Some("quadrature") => Method::Quadrature,
        Some("operator") => Method::Operator,
        Some(v) => return Err(usage(format!("--method: expected quadrature or operator, got `{v}`"))),
    };
    let component = match get("component") {
        None | Some("abs") => Component::Abs,
        Some("re") => Component::Re,
        Some("im") => Component::Im,
        Some(v) => return Err(usage(format!("--component: expected re, im or abs, got `{v}`"))),
    };
    let gamma = get("gamma").map(|v| parse_f64("gamma", v)).transpose()?.unwrap_or(1.0);
    if gamma <= 0.0 {
        return Err(usage("--gamma must be positive"));
    }
    let threads = get("threads").map(|v| parse_usize("threads", v)).transpose()?;
    if threads == Some(0) {
        return Err(usage("--threads must be at least 1"));
    }

    let mut quadrature = QuadratureSpec::default();
    if let Some(v) = get("alpha") {
        quadrature.alpha = parse_f64("alpha", v)?;
    }
    if let Some(v) = get("n-theta") {
        quadrature.n_theta = parse_usize("n-theta", v)?;
    }
    if let Some(v) = get("n-rho") {
        quadrature.n_rho = parse_usize("n-rho", v)?;
    }
    if let Some(v) = get("tol") {
        quadrature.tol = parse_f64("tol", v)?;
    }
    match get("rho-max") {
        None | Some("auto") => {}
        Some(v) => quadrature.rho_max_policy = RhoMaxPolicy::Fixed(parse_f64("rho-max", v)?),
    }
    quadrature.validate().map_err(|e| usage(format!("quadrature settings: {e}")))?;

    let a = get("a").map(|v| parse_f64("a", v)).transpose()?.unwrap_or(2.0);
    let p1 = get("p1").map(|v| parse_usize("p1", v)).transpose()?.unwrap_or(1);
    let p2 = get("p2").map(|v| parse_usize("p2", v)).transpose()?.unwrap_or(1);
    let to_u32 = |k: &str, v: usize| u32::try_from(v).map_err(|_| usage(format!("--{k} too large")));
    let n_list = get("n-list").map(parse_n_list).transpose()?.unwrap_or_else(|| vec![4, 8, 12, 16]);
    let order = get("order").map(|v| parse_usize("order", v)).transpose()?.unwrap_or(6);

    let csv = get("out").map(PathBuf::from);
    let pgm = get("pgm").map(PathBuf::from);

    match command {
        Command::Field => {
            if grid.is_none() {
                return Err(usage("field needs --grid"));
            }
            if datum.is_none() {
                return Err(usage("field needs one of --plane-wave, --monomial, --constant"));
            }
            if csv.is_none() {
                return Err(usage("field needs --out"));
            }
        }
        Command::Coeffs if x.is_none() => return Err(usage("coeffs needs --x")),
        Command::Greens if x.is_none() || y.is_none() => return Err(usage("greens needs --x and --y")),
        _ => {}
    }

    Ok(RunConfig {
        command,
        kind,
        t,
        grid,
        x,
        y,
        datum,
        method,
        quadrature,
        csv,
        pgm,
        component,
        gamma,
        threads,
        a,
        p1: to_u32("p1", p1)?,
        p2: to_u32("p2", p2)?,
        n_list,
        order,
    })
}
