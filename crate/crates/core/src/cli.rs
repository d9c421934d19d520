//! The `meridian4` command line: grid evaluation, spectra, verification
//! suites, flows and special-function queries.
//!
//! Exit codes: 0 success, 2 usage, 3 domain error, 4 verification failed.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{debug, info};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynsys::flow;
use crate::error::Error;
use crate::fields::{
    axial_symmetry_check, criterion_check, from_holomorphic_potential, from_separable, verify_axial_hyperbolic,
    verify_epd, verify_general_system, verify_stokes_beltrami, verify_weinstein, MeridionalField, SeparableParams,
    RHO_MIN,
};
use crate::holomorphic::{moebius_potential, Elementary, MoebiusRealCoeffs, RadialFunction};
use crate::quaternion::Quaternion;
use crate::specfun::{bessel_j, bessel_j_quat, bessel_y};
use crate::spectral::{eigen_closed, eigen_numeric, jacobian};
use crate::transforms::{
    bessel_integral_rep, chebyshev_original, ff_cos, ff_sin, laplace_fueter, transform_field, OriginalFunction,
    Parity, TransformKind, DEFAULT_TOL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(Error),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(e) => write!(f, "domain error: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(m) => CliError::Usage(m),
            e @ Error::NotUnimodular { .. } => CliError::Usage(e.to_string()),
            e => CliError::Domain(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Io(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Key-value parameters after the `kind:` prefix of a spec.
#[derive(Debug, Clone, Default, PartialEq)]
struct Params {
    bare: Vec<String>,
    kv: Vec<(String, String)>,
}

impl Params {
    fn parse(s: &str) -> Self {
        let mut p = Params::default();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match tok.split_once('=') {
                Some((k, v)) => p.kv.push((k.trim().to_string(), v.trim().to_string())),
                None => p.bare.push(tok.to_string()),
            }
        }
        p
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.kv.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn num(&self, key: &str, default: Option<f64>) -> std::result::Result<f64, String> {
        match self.get(key) {
            Some(v) => v.parse().map_err(|_| format!("parameter {key}={v:?} is not a number")),
            None => default.ok_or_else(|| format!("missing parameter {key}")),
        }
    }

    fn check_keys(&self, allowed: &[&str]) -> std::result::Result<(), String> {
        for (k, _) in &self.kv {
            if !allowed.contains(&k.as_str()) {
                return Err(format!("unknown parameter {k:?} (expected one of {allowed:?})"));
            }
        }
        Ok(())
    }
}

/// Real originals addressable from the command line: `unit` (1 on [0,1]),
/// `t<k>` (`cos(k arccos t)/sqrt(1-t^2)`), `expdecay<a>` (`e^{-a t}`).
#[derive(Debug, Clone, PartialEq)]
pub enum OriginalSpec {
    Unit,
    Chebyshev(u32),
    ExpDecay(f64),
}

impl FromStr for OriginalSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "unit" {
            return Ok(OriginalSpec::Unit);
        }
        if let Some(k) = s.strip_prefix("expdecay") {
            let a: f64 = k.parse().map_err(|_| format!("bad decay rate in {s:?}"))?;
            if !(a > 0.0) {
                return Err(format!("decay rate must be positive in {s:?}"));
            }
            return Ok(OriginalSpec::ExpDecay(a));
        }
        if let Some(k) = s.strip_prefix('t') {
            return k
                .parse()
                .map(OriginalSpec::Chebyshev)
                .map_err(|_| format!("bad Chebyshev index in {s:?}"));
        }
        Err(format!("unknown original {s:?} (expected unit, t<k> or expdecay<a>)"))
    }
}

impl OriginalSpec {
    pub fn build(&self) -> OriginalFunction {
        match self {
            OriginalSpec::Unit => OriginalFunction::constant(1.0, 1.0),
            OriginalSpec::Chebyshev(k) => chebyshev_original(*k),
            OriginalSpec::ExpDecay(a) => OriginalFunction::exp_decay(*a),
        }
    }
}

/// Scalar test potentials on R^4 that are not necessarily meridional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialKind {
    X0,
    X0SqMinusX3Sq,
    RSq,
    /// `x3^(1+alpha)`
    X3Pow,
    /// `rho^3`
    RhoCubed,
}

impl FromStr for PotentialKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "x0" => Ok(PotentialKind::X0),
            "x0sq_minus_x3sq" => Ok(PotentialKind::X0SqMinusX3Sq),
            "rsq" => Ok(PotentialKind::RSq),
            "x3pow" => Ok(PotentialKind::X3Pow),
            "rhocubed" => Ok(PotentialKind::RhoCubed),
            other => Err(format!(
                "unknown potential {other:?} (expected x0, x0sq_minus_x3sq, rsq, x3pow, rhocubed)"
            )),
        }
    }
}

/// A field or potential named on the command line as `kind:params`.
///
/// - `holo:qexp`, `holo:qpow3,scale=0.5`, `holo:qpow2half`
/// - `separable:alpha=2,beta=1,b1=1,b2=1,a1=1,a2=0`
/// - `moebius:a=0,d=0` (optionally `b`, `c`; unimodular)
/// - `transform:kind=ffc,original=t0`
/// - `potential:x0sq_minus_x3sq`, `potential:x3pow,alpha=3`
#[derive(Debug, Clone, PartialEq)]
pub enum FieldSpec {
    Holo { function: Elementary, scale: f64 },
    Separable(SeparableParams),
    Moebius { a: f64, b: Option<f64>, c: f64, d: f64 },
    Transform { kind: TransformKind, original: OriginalSpec },
    Potential { kind: PotentialKind, alpha: f64 },
}

impl FromStr for FieldSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let p = Params::parse(rest);
        match kind.trim() {
            "holo" => {
                p.check_keys(&["scale"])?;
                let [name] = p.bare.as_slice() else {
                    return Err("holo needs exactly one function name, e.g. holo:qexp".into());
                };
                let mut scale = p.num("scale", Some(1.0))?;
                let function = if name == "qpow2half" {
                    scale *= 0.5;
                    Elementary::Pow(2)
                } else {
                    name.parse::<Elementary>()?
                };
                Ok(FieldSpec::Holo { function, scale })
            }
            "separable" => {
                p.check_keys(&["alpha", "beta", "b1", "b2", "a1", "a2"])?;
                if !p.bare.is_empty() {
                    return Err(format!("unexpected bare parameters {:?}", p.bare));
                }
                Ok(FieldSpec::Separable(SeparableParams::new(
                    p.num("alpha", None)?,
                    p.num("beta", Some(1.0))?,
                    (p.num("b1", Some(1.0))?, p.num("b2", Some(1.0))?),
                    (p.num("a1", Some(1.0))?, p.num("a2", Some(0.0))?),
                )))
            }
            "moebius" => {
                p.check_keys(&["a", "b", "c", "d"])?;
                Ok(FieldSpec::Moebius {
                    a: p.num("a", Some(0.0))?,
                    b: p.get("b").map(|_| p.num("b", None)).transpose()?,
                    c: p.num("c", Some(1.0))?,
                    d: p.num("d", Some(0.0))?,
                })
            }
            "transform" => {
                p.check_keys(&["kind", "original"])?;
                let kind = p.get("kind").unwrap_or("ffc").parse().map_err(|e: Error| e.to_string())?;
                let original = p.get("original").unwrap_or("t0").parse()?;
                Ok(FieldSpec::Transform { kind, original })
            }
            "potential" => {
                p.check_keys(&["alpha"])?;
                let [name] = p.bare.as_slice() else {
                    return Err("potential needs exactly one name, e.g. potential:x0".into());
                };
                Ok(FieldSpec::Potential {
                    kind: name.parse()?,
                    alpha: p.num("alpha", Some(0.0))?,
                })
            }
            other => Err(format!(
                "unknown field kind {other:?} (expected holo, separable, moebius, transform, potential)"
            )),
        }
    }
}

/// What a [`FieldSpec`] builds.
pub enum Built {
    Field(MeridionalField),
    Potential { kind: PotentialKind, alpha: f64 },
}

impl Built {
    pub fn alpha(&self) -> f64 {
        match self {
            Built::Field(f) => f.alpha(),
            Built::Potential { alpha, .. } => *alpha,
        }
    }

    /// `h(x)`; domain errors of a field surface as NaN.
    pub fn scalar(&self, x: Quaternion) -> f64 {
        match self {
            Built::Field(f) => f.potential(x).unwrap_or(f64::NAN),
            Built::Potential { kind, alpha } => match kind {
                PotentialKind::X0 => x.x0,
                PotentialKind::X0SqMinusX3Sq => x.x0 * x.x0 - x.x3 * x.x3,
                PotentialKind::RSq => x.norm_sqr(),
                PotentialKind::X3Pow => x.x3.powf(1.0 + alpha),
                PotentialKind::RhoCubed => x.rho().powi(3),
            },
        }
    }

    fn field(&self, cmd: &str) -> CliResult<&MeridionalField> {
        match self {
            Built::Field(f) => Ok(f),
            Built::Potential { .. } => Err(usage(format!("{cmd} needs a meridional field, not a potential"))),
        }
    }
}

impl FieldSpec {
    pub fn build(&self) -> crate::Result<Built> {
        Ok(match self {
            FieldSpec::Holo { function, scale } => {
                let g = RadialFunction::elementary(*function);
                let g = if *scale == 1.0 { g } else { g.scaled(*scale) };
                Built::Field(from_holomorphic_potential(&g)?)
            }
            FieldSpec::Separable(p) => Built::Field(from_separable(*p)?),
            FieldSpec::Moebius { a, b, c, d } => {
                let b = b.unwrap_or(if *c != 0.0 { (a * d - 1.0) / c } else { 0.0 });
                let m = MoebiusRealCoeffs::new(*a, b, *c, *d)?;
                Built::Field(from_holomorphic_potential(&moebius_potential(m)?)?)
            }
            FieldSpec::Transform { kind, original } => Built::Field(transform_field(*kind, original.build())?),
            FieldSpec::Potential { kind, alpha } => Built::Potential {
                kind: *kind,
                alpha: *alpha,
            },
        })
    }
}

/// `lo,hi,n` on each meridian axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(format!("expected lo,hi,n, got {s:?}"));
        };
        let lo: f64 = lo.parse().map_err(|_| format!("bad bound {lo:?}"))?;
        let hi: f64 = hi.parse().map_err(|_| format!("bad bound {hi:?}"))?;
        let n: usize = n.parse().map_err(|_| format!("bad count {n:?}"))?;
        if n < 2 {
            return Err(format!("grid needs at least 2 nodes per axis, got {n}"));
        }
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(format!("grid needs finite lo < hi, got {lo},{hi}"));
        }
        Ok(Axis { lo, hi, n })
    }
}

impl Axis {
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x0: Axis,
    pub rho: Axis,
}

impl GridSpec {
    pub fn new(x0: Axis, rho: Axis) -> CliResult<Self> {
        if rho.lo < RHO_MIN {
            return Err(usage(format!("rho grid must start at or above {RHO_MIN:e}")));
        }
        Ok(Self { x0, rho })
    }

    /// Row-major: `x0` outer, `rho` inner.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.x0.nodes().flat_map(|x| self.rho.nodes().map(move |r| (x, r))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Fixed 17-significant-digit float formatting.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_f64(*v),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
            Cell::Text(t) => t.clone(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Num(v) if v.is_finite() => fmt_f64(*v),
            Cell::Num(_) => "null".into(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(t) => serde_json::Value::String(t.clone()).to_string(),
        }
    }
}

/// Rows of named columns, written as CSV (header + LF rows) or a JSON array
/// of objects, one per line.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn json_rows(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| {
                let fields: Vec<String> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| format!("{}:{}", serde_json::Value::String(c.clone()), v.json()))
                    .collect();
                format!("{{{}}}", fields.join(","))
            })
            .collect()
    }

    pub fn write(&self, format: Format, out: &mut dyn Write, trailer: Option<String>) -> std::io::Result<()> {
        match format {
            Format::Csv => {
                writeln!(out, "{}", self.columns.join(","))?;
                for r in &self.rows {
                    let cells: Vec<String> = r.iter().map(Cell::csv).collect();
                    writeln!(out, "{}", cells.join(","))?;
                }
            }
            Format::Json => {
                let mut items = self.json_rows();
                items.extend(trailer);
                if items.is_empty() {
                    writeln!(out, "[]")?;
                } else {
                    writeln!(out, "[")?;
                    writeln!(out, "{}", items.join(",\n"))?;
                    writeln!(out, "]")?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(name = "meridian4", version, about = "Potential meridional fields in R^4", allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate V0, Vrho and the partials of Vrho on a meridian grid.
    Eval(GridArgs),
    /// Closed-form eigenvalues and invariants of the Jacobian on a grid.
    Spectrum(SpectrumArgs),
    /// Run a residual verification suite at seeded random points.
    Verify(VerifyArgs),
    /// Integrate the gradient flow from a point.
    Flow(FlowArgs),
    /// Special-function and transform queries.
    #[command(subcommand)]
    Special(SpecialQuery),
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Field spec, e.g. holo:qexp or separable:alpha=2,beta=1
    #[arg(long, allow_hyphen_values = true)]
    pub field: String,
    /// x0 grid as lo,hi,n
    #[arg(long, default_value = "-1,1,5", allow_hyphen_values = true)]
    pub x0: String,
    /// rho grid as lo,hi,n
    #[arg(long, default_value = "0.5,2,4", allow_hyphen_values = true)]
    pub rho: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Add Jacobi eigenvalues and their deviation from the closed form.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Weinstein,
    Axial,
    Epd,
    Stokes,
    System,
    Criterion,
    Symmetry,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Field or potential spec
    #[arg(long, allow_hyphen_values = true)]
    pub field: String,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub field: String,
    /// Initial point x0,x1,x2,x3
    #[arg(long = "x", allow_hyphen_values = true)]
    pub x_init: String,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum SpecialQuery {
    /// J_nu(z) for real order and argument.
    #[command(allow_negative_numbers = true)]
    Bessel { nu: f64, z: f64 },
    /// Y_nu(z) for non-integer order.
    #[command(allow_negative_numbers = true)]
    Bessely { nu: f64, z: f64 },
    /// J_n(x) for a quaternion x.
    #[command(allow_negative_numbers = true)]
    Besselq { n: u32, x0: f64, x1: f64, x2: f64, x3: f64 },
    /// Laplace-Fueter (lf) or Fourier-Fueter (ffc, ffs) transform of an original.
    #[command(allow_negative_numbers = true)]
    Transform {
        kind: String,
        original: String,
        x0: f64,
        x1: f64,
        x2: f64,
        x3: f64,
    },
    /// Integral representation of J_2n (even) or J_2n+1 (odd) against the series.
    #[command(allow_negative_numbers = true)]
    Besselrep {
        n: u32,
        parity: String,
        x0: f64,
        x1: f64,
        x2: f64,
        x3: f64,
    },
}

fn parse_spec(s: &str) -> CliResult<Built> {
    let spec: FieldSpec = s.parse().map_err(usage)?;
    debug!("field spec {spec:?}");
    Ok(spec.build()?)
}

fn parse_grid(args: &GridArgs) -> CliResult<GridSpec> {
    GridSpec::new(args.x0.parse().map_err(usage)?, args.rho.parse().map_err(usage)?)
}

fn parse_point(s: &str) -> CliResult<Quaternion> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| usage(format!("bad point {s:?}")))?;
    let [a, b, c, d] = v.as_slice() else {
        return Err(usage(format!("point needs 4 components, got {s:?}")));
    };
    Ok(Quaternion::new(*a, *b, *c, *d))
}

fn cmd_eval(args: &GridArgs, out: &mut dyn Write) -> CliResult<i32> {
    let built = parse_spec(&args.field)?;
    let f = built.field("eval")?;
    let grid = parse_grid(args)?;
    let mut t = Table::new(&["x0", "rho", "V0", "Vrho", "dVrho_dx0", "dVrho_drho"]);
    for (x0, rho) in grid.points() {
        let j = f.jet(x0, rho)?;
        t.push(
            [x0, rho, j.v0(), j.vrho(), j.dvrho_dx0(), j.dvrho_drho()]
                .map(Cell::Num)
                .to_vec(),
        );
    }
    t.write(args.format, out, None)?;
    Ok(EXIT_OK)
}

fn cmd_spectrum(args: &SpectrumArgs, out: &mut dyn Write) -> CliResult<i32> {
    let built = parse_spec(&args.grid.field)?;
    let f = built.field("spectrum")?;
    let grid = parse_grid(&args.grid)?;
    let mut cols = vec!["x0", "rho", "l0", "l1", "l2", "l3", "I", "II", "III", "IV", "degenerate", "method"];
    if args.oracle {
        cols.extend(["n0", "n1", "n2", "n3", "deviation"]);
    }
    let mut t = Table::new(&cols);
    for (x0, rho) in grid.points() {
        let x = Quaternion::new(x0, rho, 0.0, 0.0);
        let r = eigen_closed(f, x)?;
        let mut row = vec![Cell::Num(x0), Cell::Num(rho)];
        row.extend(r.lambdas.map(Cell::Num));
        row.extend(r.invariants.map(Cell::Num));
        row.push(Cell::Bool(r.degenerate));
        row.push(Cell::Text(r.method.to_string()));
        if args.oracle {
            let n = eigen_numeric(&jacobian(f, x)?)?;
            let dev = r.lambdas.iter().zip(n.lambdas).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            row.extend(n.lambdas.map(Cell::Num));
            row.push(Cell::Num(dev));
        }
        t.push(row);
    }
    t.write(args.grid.format, out, None)?;
    Ok(EXIT_OK)
}

/// Per-check tolerances of each suite.
fn suite_checks(suite: Suite) -> (&'static [&'static str], f64) {
    match suite {
        Suite::Weinstein => (&["weinstein"], 2e-6),
        Suite::Axial => (&["axial_hyperbolic"], 5e-6),
        Suite::Epd => (&["epd"], 1e-10),
        Suite::Stokes => (&["stokes_beltrami_1", "stokes_beltrami_2"], 1e-7),
        Suite::System => (
            &["divergence", "sym_01", "sym_02", "sym_03", "curl_12", "curl_13", "curl_23"],
            1e-6,
        ),
        Suite::Criterion => (&["cartesian_12", "cartesian_13", "cartesian_23", "d_theta", "d_psi"], 1e-7),
        Suite::Symmetry => (&["sym_12", "sym_13", "sym_23"], 1e-12),
    }
}

const FD_STEP: f64 = 1e-4;

fn gradient(built: &Built, x: Quaternion) -> [f64; 4] {
    match built {
        Built::Field(f) => f.lift_to_r4(x).unwrap_or([f64::NAN; 4]),
        Built::Potential { .. } => std::array::from_fn(|k| {
            let mut a = x.to_array();
            let mut b = x.to_array();
            a[k] += FD_STEP;
            b[k] -= FD_STEP;
            (built.scalar(Quaternion::from_array(a)) - built.scalar(Quaternion::from_array(b))) / (2.0 * FD_STEP)
        }),
    }
}

fn run_check(suite: Suite, built: &Built, x: Quaternion) -> CliResult<Vec<f64>> {
    let h = |q: Quaternion| built.scalar(q);
    let alpha = built.alpha();
    Ok(match suite {
        Suite::Weinstein => vec![verify_weinstein(&h, alpha, x, FD_STEP)?],
        Suite::Axial => vec![verify_axial_hyperbolic(&h, alpha, x, FD_STEP)?],
        Suite::Epd => vec![verify_epd(built.field("verify epd")?, x.x0, x.rho())?],
        Suite::Stokes => {
            let (a, b) = verify_stokes_beltrami(built.field("verify stokes")?, x.x0, x.rho())?;
            vec![a, b]
        }
        Suite::System => {
            let u = |q: Quaternion| {
                let v = gradient(built, q);
                [v[0], -v[1], -v[2], -v[3]]
            };
            let phi = |q: Quaternion| q.rho().powf(-alpha);
            verify_general_system(&u, &phi, x, FD_STEP)?.to_vec()
        }
        Suite::Criterion => {
            let r = criterion_check(&h, x, 1e-5)?;
            let mut v = r.cartesian.to_vec();
            v.extend(r.angular.unwrap_or([0.0; 2]));
            v
        }
        Suite::Symmetry => axial_symmetry_check(&|q| gradient(built, q), x).to_vec(),
    })
}

/// Seeded sample points with `x0, x1, x2` in `[-1, 1]` and `x3` in `[0.5, 1.5]`.
pub fn sample_points(seed: u64, n: usize) -> Vec<Quaternion> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            Quaternion::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.5..1.5),
            )
        })
        .collect()
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> CliResult<i32> {
    let built = parse_spec(&args.field)?;
    if args.samples == 0 {
        return Err(usage("need at least one sample"));
    }
    let (names, tol) = suite_checks(args.suite);
    let mut worst = vec![0.0f64; names.len()];
    for x in sample_points(args.seed, args.samples) {
        let r = run_check(args.suite, &built, x)?;
        for (w, v) in worst.iter_mut().zip(r) {
            *w = if v.is_nan() { f64::NAN } else { w.max(v) };
        }
    }
    let mut t = Table::new(&["check", "max_residual", "tolerance", "status"]);
    let mut pass = true;
    for (name, w) in names.iter().zip(&worst) {
        let ok = *w <= tol;
        pass &= ok;
        t.push(vec![
            Cell::Text(name.to_string()),
            Cell::Num(*w),
            Cell::Num(tol),
            Cell::Text(if ok { "pass" } else { "fail" }.into()),
        ]);
    }
    t.write(args.format, out, None)?;
    info!("suite {:?}: {}", args.suite, if pass { "pass" } else { "fail" });
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_flow(args: &FlowArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let built = parse_spec(&args.field)?;
    let f = built.field("flow")?;
    let x = parse_point(&args.x_init)?;
    let tr = flow(f, x, args.dt, args.horizon)?;
    let mut t = Table::new(&["t", "x0", "x1", "x2", "x3", "h"]);
    for s in &tr.samples {
        t.push([s.t, s.x.x0, s.x.x1, s.x.x2, s.x.x3, s.h].map(Cell::Num).to_vec());
    }
    match args.format {
        Format::Csv => {
            t.write(Format::Csv, out, None)?;
            writeln!(err, "terminated: {}", tr.terminated)?;
        }
        Format::Json => t.write(Format::Json, out, Some(format!("{{\"terminated\":\"{}\"}}", tr.terminated)))?,
    }
    Ok(EXIT_OK)
}

fn write_quaternion(out: &mut dyn Write, q: Quaternion) -> std::io::Result<()> {
    writeln!(out, "{} {} {} {}", fmt_f64(q.x0), fmt_f64(q.x1), fmt_f64(q.x2), fmt_f64(q.x3))
}

fn cmd_special(q: &SpecialQuery, out: &mut dyn Write) -> CliResult<i32> {
    match q {
        SpecialQuery::Bessel { nu, z } => writeln!(out, "{}", fmt_f64(bessel_j(*nu, *z)?))?,
        SpecialQuery::Bessely { nu, z } => writeln!(out, "{}", fmt_f64(bessel_y(*nu, *z)?))?,
        SpecialQuery::Besselq { n, x0, x1, x2, x3 } => {
            write_quaternion(out, bessel_j_quat(*n, Quaternion::new(*x0, *x1, *x2, *x3))?)?
        }
        SpecialQuery::Transform {
            kind,
            original,
            x0,
            x1,
            x2,
            x3,
        } => {
            let eta = original.parse::<OriginalSpec>().map_err(usage)?.build();
            let x = Quaternion::new(*x0, *x1, *x2, *x3);
            let v = match kind.as_str() {
                "lf" => laplace_fueter(&eta, x, DEFAULT_TOL)?,
                "ffc" => ff_cos(&eta, x, DEFAULT_TOL)?,
                "ffs" => ff_sin(&eta, x, DEFAULT_TOL)?,
                other => return Err(usage(format!("unknown transform {other:?} (expected lf, ffc, ffs)"))),
            };
            write_quaternion(out, v)?;
        }
        SpecialQuery::Besselrep {
            n,
            parity,
            x0,
            x1,
            x2,
            x3,
        } => {
            let parity: Parity = parity.parse().map_err(|e: Error| usage(e.to_string()))?;
            let x = Quaternion::new(*x0, *x1, *x2, *x3);
            let rep = bessel_integral_rep(*n, parity, x, DEFAULT_TOL)?;
            let order = match parity {
                Parity::Even => 2 * n,
                Parity::Odd => 2 * n + 1,
            };
            let series = bessel_j_quat(order, x)?;
            write_quaternion(out, rep)?;
            writeln!(out, "discrepancy {}", fmt_f64(rep.max_abs_diff(series)))?;
        }
    }
    Ok(EXIT_OK)
}

/// Parse `args` and run the command, writing data to `out` and diagnostics
/// to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(a, out),
        Command::Spectrum(a) => cmd_spectrum(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Flow(a) => cmd_flow(a, out, err),
        Command::Special(q) => cmd_special(q, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "meridian4: {e}");
            e.exit_code()
        }
    }
}

/// Logging on stderr, filtered by `MERIDIAN4_LOG` (default `error`).
pub fn init_logging() {
    let env = env_logger::Env::new().filter_or("MERIDIAN4_LOG", "error");
    let _ = env_logger::Builder::from_env(env)
        .target(env_logger::Target::Stderr)
        .format_timestamp(None)
        .try_init();
}
