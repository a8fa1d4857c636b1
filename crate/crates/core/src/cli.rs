//! Command-line front end.
//!
//! Every subcommand resolves its parameters in three layers: built-in
//! defaults, then the JSON file given with `--config`, then explicit flags.
//! The resolved set is written to `manifest.json` next to the outputs together
//! with diagnostics and, on failure, an error record.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::kernels::{KernelSpec, Normalization};
use crate::lattice::{decay_ratio, entropy_gap, nwave_error, LatticeIntegrator, LatticeState};
use crate::reference::{additive_g1, nwave, AdditiveProfile};
use crate::spectral::{self, RootSearch};
use crate::wavesim::{self, SimConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "coag", version, about = "Coagulation equations with homogeneity-one kernels")]
pub struct Cli {
    /// Output directory (a `.csv` or `.json` path names the data file directly).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "COAG_THREADS")]
    pub threads: Option<usize>,
    /// JSON parameter file; explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Continuum scheme in base-2 exponential variables.
    Simulate(SimulateArgs),
    /// Diagonal-kernel lattice.
    Lattice(LatticeArgs),
    /// Growth rate M(k) of the alpha family on a k grid.
    Spectrum(SpectrumArgs),
    /// Roots of the dispersion relation M(k) + ik = 0.
    Roots(RootsArgs),
    /// Sample a closed-form reference profile.
    Reference(ReferenceArgs),
    /// Distance of stored snapshots from the N-wave.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KernelName {
    Alpha,
    Additive,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum NormName {
    Simplex,
    Aunit,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SimInit {
    Riemann,
    Bump,
    File,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RuleName {
    Left,
    Trapezoid,
    Gregory,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub kernel: Option<KernelName>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum)]
    pub norm: Option<NormName>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long = "L")]
    pub l: Option<f64>,
    #[arg(long = "R")]
    pub r: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    /// Snapshot interval in T.
    #[arg(long)]
    pub snapshot: Option<f64>,
    #[arg(long, value_enum)]
    pub rule: Option<RuleName>,
    #[arg(long, value_enum)]
    pub init: Option<SimInit>,
    #[arg(long = "c-minus")]
    pub c_minus: Option<f64>,
    /// Jump position of Riemann data.
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub center: Option<f64>,
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long)]
    pub height: Option<f64>,
    /// CSV with columns `X,u` for `--init file`.
    #[arg(long = "init-file")]
    pub init_file: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeInit {
    Box,
    Riemann,
    File,
}

#[derive(Args, Debug)]
pub struct LatticeArgs {
    #[arg(long, value_enum)]
    pub init: Option<LatticeInit>,
    #[arg(long)]
    pub mass: Option<f64>,
    /// Number of occupied sites of box data.
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long = "c-left")]
    pub c_left: Option<f64>,
    /// CSV with columns `j,u` for `--init file`.
    #[arg(long = "init-file")]
    pub init_file: Option<PathBuf>,
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub snap: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long = "k-max")]
    pub k_max: Option<f64>,
    #[arg(long)]
    pub dk: Option<f64>,
}

#[derive(Args, Debug)]
pub struct RootsArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    G1,
    Grho,
    Nwave,
}

#[derive(Args, Debug)]
pub struct ReferenceArgs {
    #[arg(long, value_enum)]
    pub profile: Option<Profile>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub mass: Option<f64>,
    #[arg(long = "n-terms")]
    pub n_terms: Option<usize>,
    #[arg(long = "x-min", allow_negative_numbers = true)]
    pub x_min: Option<f64>,
    #[arg(long = "x-max", allow_negative_numbers = true)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub dx: Option<f64>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Output directory of a `lattice` or `simulate` run.
    #[arg(long)]
    pub run: PathBuf,
    #[arg(long = "nwave-mass")]
    pub nwave_mass: f64,
    /// Left end of the N-wave for continuum runs (default: left edge of the
    /// initial support).
    #[arg(long, allow_negative_numbers = true)]
    pub origin: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeParams {
    pub init: LatticeInit,
    pub mass: f64,
    pub width: usize,
    pub c_left: f64,
    #[serde(default)]
    pub init_file: Option<PathBuf>,
    pub t_end: f64,
    pub snap: f64,
    pub tol: f64,
}

impl Default for LatticeParams {
    fn default() -> Self {
        Self {
            init: LatticeInit::Box,
            mass: 1.0,
            width: 1,
            c_left: 1.0,
            init_file: None,
            t_end: 25.0,
            snap: 5.0,
            tol: 1e-10,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumParams {
    pub alpha: f64,
    pub k_max: f64,
    pub dk: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootsParams {
    pub alpha: f64,
    pub search: RootSearch,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceParams {
    pub profile: Profile,
    pub rho: f64,
    pub mass: f64,
    pub n_terms: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
}

/// Contents of `manifest.json`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub version: String,
    pub params: Value,
    pub kernel: Option<Value>,
    pub normalization: Option<String>,
    pub grid: Option<Value>,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
    pub diagnostics: Value,
    pub error: Option<ErrorRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_CONFIG
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    if let Some(n) = cli.threads {
        // the global pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("coag: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let file = match &cli.config {
        Some(p) => Some(read_json(p)?),
        None => None,
    };
    match &cli.command {
        Command::Compare(a) => compare(a),
        cmd => {
            let name = match cmd {
                Command::Simulate(_) => "simulate",
                Command::Lattice(_) => "lattice",
                Command::Spectrum(_) => "spectrum",
                Command::Roots(_) => "roots",
                Command::Reference(_) => "reference",
                Command::Compare(_) => unreachable!(),
            };
            let out = Output::new(cli.out.clone(), name);
            let mut run = Run::new(name);
            let result = match cmd {
                Command::Simulate(a) => simulate(a, file, &out, &mut run),
                Command::Lattice(a) => lattice(a, file, &out, &mut run),
                Command::Spectrum(a) => spectrum(a, file, &out, &mut run),
                Command::Roots(a) => roots(a, file, &out, &mut run),
                Command::Reference(a) => reference(a, file, &out, &mut run),
                Command::Compare(_) => unreachable!(),
            };
            run.finish(&out, result)
        }
    }
}

fn read_json(p: &Path) -> Result<Value> {
    let text = fs::read_to_string(p)?;
    let v: Value = serde_json::from_str(&text)?;
    if !v.is_object() {
        return Err(Error::Config(format!("{} must hold a JSON object", p.display())));
    }
    Ok(v)
}

/// Where data files and the manifest go.
struct Output {
    dir: PathBuf,
    file: Option<PathBuf>,
}

impl Output {
    fn new(out: Option<PathBuf>, name: &str) -> Self {
        let out = out.unwrap_or_else(|| PathBuf::from(format!("coag-{name}")));
        let is_file = matches!(out.extension().and_then(|e| e.to_str()), Some("csv") | Some("json"));
        if is_file {
            let dir = match out.parent() {
                Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
                _ => PathBuf::from("."),
            };
            Self { dir, file: Some(out) }
        } else {
            Self { dir: out, file: None }
        }
    }

    fn data(&self, default_name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        Ok(self.file.clone().unwrap_or_else(|| self.dir.join(default_name)))
    }
}

struct Run {
    manifest: RunManifest,
    start: Instant,
}

impl Run {
    fn new(name: &str) -> Self {
        Self {
            manifest: RunManifest {
                subcommand: name.into(),
                version: env!("CARGO_PKG_VERSION").into(),
                params: Value::Null,
                kernel: None,
                normalization: None,
                grid: None,
                wall_time_s: 0.0,
                outputs: Vec::new(),
                diagnostics: Value::Null,
                error: None,
            },
            start: Instant::now(),
        }
    }

    fn output(&mut self, p: &Path) {
        let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        self.manifest.outputs.push(name);
    }

    fn kernel(&mut self, k: &KernelSpec) {
        self.manifest.kernel = serde_json::to_value(k).ok();
        self.manifest.normalization = k.normalization().map(|n| n.to_string());
    }

    fn finish(mut self, out: &Output, result: Result<()>) -> Result<()> {
        self.manifest.wall_time_s = self.start.elapsed().as_secs_f64();
        if let Err(e) = &result {
            self.manifest.error = Some(ErrorRecord {
                kind: e.kind().into(),
                message: e.to_string(),
                exit_code: exit_code(e),
            });
        }
        fs::create_dir_all(&out.dir)?;
        let f = File::create(out.dir.join("manifest.json"))?;
        let mut w = BufWriter::new(f);
        serde_json::to_writer_pretty(&mut w, &self.manifest)?;
        writeln!(w)?;
        w.flush()?;
        result
    }
}

/// Recursive merge; objects carrying a different `type`/`variant` tag replace
/// the base instead of merging into it.
fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            let retag = ["type", "variant"]
                .iter()
                .any(|t| matches!((b.get(*t), o.get(*t)), (Some(x), Some(y)) if x != y));
            if retag {
                *b = o;
                return;
            }
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

fn resolve<T: Serialize + DeserializeOwned>(defaults: Value, file: Option<Value>, flags: Value) -> Result<T> {
    let mut v = defaults;
    if let Some(f) = file {
        merge(&mut v, f);
    }
    merge(&mut v, flags);
    serde_json::from_value(v).map_err(|e| Error::Config(e.to_string()))
}

fn set<T: Serialize>(m: &mut Map<String, Value>, key: &str, v: Option<T>) {
    if let Some(v) = v {
        m.insert(key.into(), json!(v));
    }
}

/// Shortest round-trip decimal form.
fn num(x: f64) -> String {
    let s = format!("{x:?}");
    s.strip_suffix(".0").map(str::to_owned).unwrap_or(s)
}

fn simulate(a: &SimulateArgs, file: Option<Value>, out: &Output, run: &mut Run) -> Result<()> {
    let defaults = json!({
        "kernel": {"variant": "alpha_family", "alpha": 8.0, "norm": "simplexunit"},
        "eps": 0.05, "L": 40.0, "R": 25.0, "T_end": 1.0, "snapshot": 0.25,
        "init": {"type": "riemann", "c_minus": 1.0, "x0": 1.0, "smooth": true},
        "rule": "gregory"
    });
    let mut f = Map::new();
    let mut kernel = Map::new();
    match a.kernel {
        Some(KernelName::Alpha) => set(&mut kernel, "variant", Some("alpha_family")),
        Some(KernelName::Additive) => set(&mut kernel, "variant", Some("additive")),
        None => {}
    }
    set(&mut kernel, "alpha", a.alpha);
    set(
        &mut kernel,
        "norm",
        a.norm.map(|n| match n {
            NormName::Simplex => "simplexunit",
            NormName::Aunit => "aunit",
        }),
    );
    if !kernel.is_empty() {
        f.insert("kernel".into(), Value::Object(kernel));
    }
    set(&mut f, "eps", a.eps);
    set(&mut f, "L", a.l);
    set(&mut f, "R", a.r);
    set(&mut f, "tau", a.tau);
    set(&mut f, "T_end", a.t_end);
    set(&mut f, "snapshot", a.snapshot);
    set(
        &mut f,
        "rule",
        a.rule.map(|r| match r {
            RuleName::Left => "left",
            RuleName::Trapezoid => "trapezoid",
            RuleName::Gregory => "gregory",
        }),
    );
    let mut init = Map::new();
    set(
        &mut init,
        "type",
        a.init.map(|i| match i {
            SimInit::Riemann => "riemann",
            SimInit::Bump => "bump",
            SimInit::File => "file",
        }),
    );
    set(&mut init, "c_minus", a.c_minus);
    set(&mut init, "x0", a.x0);
    set(&mut init, "center", a.center);
    set(&mut init, "width", a.width);
    set(&mut init, "height", a.height);
    set(&mut init, "path", a.init_file.as_ref());
    if !init.is_empty() {
        f.insert("init".into(), Value::Object(init));
    }

    let mut v = defaults;
    if let Some(file) = file {
        merge(&mut v, file);
    }
    merge(&mut v, Value::Object(f));
    if let Some(init) = v.get_mut("init").and_then(Value::as_object_mut) {
        if init.get("type") == Some(&json!("bump")) {
            init.retain(|k, _| matches!(k.as_str(), "type" | "center" | "width" | "height"));
            init.entry("center").or_insert(json!(4.0));
            init.entry("width").or_insert(json!(0.8));
            init.entry("height").or_insert(json!(0.5));
        }
    }
    run.manifest.params = v.clone();
    let cfg: SimConfig = serde_json::from_value(v).map_err(|e| Error::Config(e.to_string()))?;
    run.kernel(&cfg.kernel);
    cfg.plan(&cfg.init.build(cfg.eps, cfg.l)?)?;

    let path = out.data("snapshots.csv")?;
    let mut w = BufWriter::new(File::create(&path)?);
    writeln!(w, "T,X,u")?;
    run.output(&path);
    let result = wavesim::simulate_with(&cfg, |s| {
        let t = num(s.t);
        for (i, u) in s.u.iter().enumerate() {
            writeln!(w, "{},{},{}", t, num(s.x(i)), num(*u))?;
        }
        Ok(())
    });
    w.flush()?;
    let sim = result?;
    let last = sim.last();
    run.manifest.grid = Some(json!({
        "eps": cfg.eps, "L": cfg.l, "R": cfg.r, "points": last.u.len(),
        "tau": sim.plan.tau, "tau_max": sim.plan.tau_max, "steps": sim.plan.steps,
    }));
    run.manifest.diagnostics = json!({
        "burgers_constant": sim.plan.a_simplex,
        "mass_drift": sim.mass_drift,
        "c_consistency": sim.c_consistency,
        "final": {"T": last.t, "mass": last.mass(), "max_u": last.max(), "min_u": last.min()},
    });
    Ok(())
}

fn read_lattice_file(p: &Path, c: f64) -> Result<LatticeState> {
    let mut rdr = csv::Reader::from_path(p).map_err(|e| Error::Config(e.to_string()))?;
    let headers = rdr.headers().map_err(|e| Error::Config(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Config(format!("{}: missing column `{name}`", p.display())))
    };
    let (cj, cu) = (col("j")?, col("u")?);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Config(e.to_string()))?;
        let parse = |i: usize| rec.get(i).map(str::trim).unwrap_or("");
        let j: i64 = parse(cj).parse().map_err(|_| Error::Config(format!("bad site index `{}`", parse(cj))))?;
        let u: f64 = parse(cu).parse().map_err(|_| Error::Config(format!("bad value `{}`", parse(cu))))?;
        rows.push((j, u));
    }
    rows.sort_by_key(|r| r.0);
    let (j0, j1) = match (rows.first(), rows.last()) {
        (Some(a), Some(b)) => (a.0, b.0),
        _ => return Err(Error::Config(format!("{}: no data", p.display()))),
    };
    let mut u = vec![0.0; (j1 - j0 + 1) as usize + 16];
    for (j, v) in rows {
        u[(j - j0) as usize] = v;
    }
    LatticeState::new(j0, u, c)
}

fn lattice(a: &LatticeArgs, file: Option<Value>, out: &Output, run: &mut Run) -> Result<()> {
    let mut f = Map::new();
    set(&mut f, "init", a.init);
    set(&mut f, "mass", a.mass);
    set(&mut f, "width", a.width);
    set(&mut f, "c_left", a.c_left);
    set(&mut f, "init_file", a.init_file.as_ref());
    set(&mut f, "t_end", a.t_end);
    set(&mut f, "snap", a.snap);
    set(&mut f, "tol", a.tol);
    let defaults = serde_json::to_value(LatticeParams::default())?;
    let p: LatticeParams = resolve(defaults, file, Value::Object(f))?;
    run.manifest.params = serde_json::to_value(&p)?;
    run.kernel(&KernelSpec::diagonal());
    if !(p.t_end >= 0.0) || !(p.snap >= 0.0) {
        return Err(Error::Config("t_end and snap must be nonnegative".into()));
    }
    let state = match p.init {
        LatticeInit::Box => LatticeState::box_data(p.mass, p.width)?,
        LatticeInit::Riemann => LatticeState::riemann(p.c_left)?,
        LatticeInit::File => {
            let path = p
                .init_file
                .as_ref()
                .ok_or_else(|| Error::Config("--init file needs --init-file".into()))?;
            read_lattice_file(path, 0.0)?
        }
    };
    let mass0 = state.mass();
    let w0 = state.max_upward_jump().max(0.0);
    let track_nwave = state.c == 0.0 && mass0 > 0.0;

    let mut times = Vec::new();
    if p.snap > 0.0 {
        let n = (p.t_end / p.snap - 1e-9).floor() as usize;
        times.extend((0..=n).map(|i| i as f64 * p.snap));
    } else {
        times.push(0.0);
    }
    if times.last().is_none_or(|&t| t < p.t_end) {
        times.push(p.t_end);
    }

    let path = out.data("snapshots.csv")?;
    let mut w = BufWriter::new(File::create(&path)?);
    writeln!(w, "t,j,u")?;
    run.output(&path);
    let mut integ = LatticeIntegrator::new(state, p.tol)?;
    let mut diag = Vec::new();
    let mut result = Ok(());
    for &t in &times {
        if let Err(e) = integ.advance_to(t) {
            result = Err(e);
            break;
        }
        let s = &integ.state;
        let ts = num(s.t);
        for (j, u) in s.sites() {
            writeln!(w, "{ts},{j},{}", num(u))?;
        }
        let mut d = json!({
            "t": s.t,
            "mass_drift": s.mass() - mass0,
            "entropy_gap": if w0 > 0.0 { Some(entropy_gap(s, w0)) } else { None },
            "sites": s.u.len(),
        });
        if track_nwave && s.t > 0.0 {
            d["nwave_error"] = json!(nwave_error(s, mass0));
            d["decay_ratio"] = json!(decay_ratio(s));
        }
        diag.push(d);
    }
    w.flush()?;
    run.manifest.grid = Some(json!({"tol": p.tol, "snapshots": times}));
    run.manifest.diagnostics = json!({
        "snapshots": diag,
        "steps": integ.stats,
    });
    result
}

fn spectrum(a: &SpectrumArgs, file: Option<Value>, out: &Output, run: &mut Run) -> Result<()> {
    let mut f = Map::new();
    set(&mut f, "alpha", a.alpha);
    set(&mut f, "k_max", a.k_max);
    set(&mut f, "dk", a.dk);
    let p: SpectrumParams = resolve(json!({"alpha": 8.0, "k_max": 40.0, "dk": 0.01}), file, Value::Object(f))?;
    run.manifest.params = serde_json::to_value(&p)?;
    run.kernel(&KernelSpec::alpha(p.alpha, Normalization::AUnit)?);
    let samples = spectral::spectrum(p.alpha, p.k_max, p.dk)?;
    let path = out.data("spectrum.csv")?;
    let mut w = BufWriter::new(File::create(&path)?);
    writeln!(w, "k,reM,imM")?;
    for s in &samples {
        writeln!(w, "{},{},{}", num(s.k), num(s.m.re), num(s.m.im))?;
    }
    w.flush()?;
    run.output(&path);
    let scan = spectral::stability_scan(p.alpha, p.k_max, p.dk)?;
    run.manifest.grid = Some(json!({"k_max": p.k_max, "dk": p.dk, "samples": samples.len()}));
    run.manifest.diagnostics = json!({
        "max_re": scan.max_re,
        "argmax_k": scan.argmax_k,
        "verdict": scan.verdict,
    });
    Ok(())
}

#[derive(Serialize)]
struct RootRecord {
    re: f64,
    im: f64,
    residual: f64,
    dominant: bool,
}

fn roots(a: &RootsArgs, file: Option<Value>, out: &Output, run: &mut Run) -> Result<()> {
    let mut f = Map::new();
    set(&mut f, "alpha", a.alpha);
    let defaults = json!({"alpha": 25.0, "search": RootSearch::default()});
    let p: RootsParams = resolve(defaults, file, Value::Object(f))?;
    run.manifest.params = serde_json::to_value(&p)?;
    run.kernel(&KernelSpec::alpha(p.alpha, Normalization::AUnit)?);
    let roots = spectral::dispersion_roots(p.alpha, &p.search)?;
    let records: Vec<RootRecord> = roots
        .iter()
        .map(|r| RootRecord {
            re: r.k.re,
            im: r.k.im,
            residual: r.residual,
            dominant: r.dominant,
        })
        .collect();
    let dominant = roots.iter().find(|r| r.dominant);
    let path = out.data("roots.json")?;
    let mut w = BufWriter::new(File::create(&path)?);
    serde_json::to_writer_pretty(
        &mut w,
        &json!({
            "alpha": p.alpha,
            "roots": records,
            "oscillatory": dominant.map(spectral::is_oscillatory),
        }),
    )?;
    writeln!(w)?;
    w.flush()?;
    run.output(&path);
    run.manifest.grid = Some(serde_json::to_value(p.search)?);
    run.manifest.diagnostics = json!({
        "count": roots.len(),
        "max_residual": roots.iter().map(|r| r.residual).fold(0.0, f64::max),
    });
    Ok(())
}

fn reference(a: &ReferenceArgs, file: Option<Value>, out: &Output, run: &mut Run) -> Result<()> {
    let mut f = Map::new();
    set(&mut f, "profile", a.profile);
    set(&mut f, "rho", a.rho);
    set(&mut f, "mass", a.mass);
    set(&mut f, "n_terms", a.n_terms);
    set(&mut f, "x_min", a.x_min);
    set(&mut f, "x_max", a.x_max);
    set(&mut f, "dx", a.dx);
    let defaults = json!({
        "profile": "g1", "rho": 0.5, "mass": 1.0, "n_terms": 200,
        "x_min": -10.0, "x_max": 10.0, "dx": 0.05
    });
    let p: ReferenceParams = resolve(defaults, file, Value::Object(f))?;
    run.manifest.params = serde_json::to_value(&p)?;
    if !(p.dx > 0.0) || !(p.x_max >= p.x_min) {
        return Err(Error::Config("need dx > 0 and x_max >= x_min".into()));
    }
    if p.profile != Profile::Nwave {
        run.kernel(&KernelSpec::additive());
    }
    let n = ((p.x_max - p.x_min) / p.dx + 1e-9).floor() as usize;
    let xs: Vec<f64> = (0..=n).map(|i| p.x_min + i as f64 * p.dx).collect();
    let mut max_err: f64 = 0.0;
    let values: Vec<f64> = match p.profile {
        Profile::G1 => xs.iter().map(|&x| additive_g1(x)).collect(),
        Profile::Nwave => xs.iter().map(|&x| nwave(x, p.mass)).collect(),
        Profile::Grho => {
            let prof = AdditiveProfile::new(p.rho, p.n_terms)?;
            run.manifest.diagnostics = json!({"x_switch": prof.x_switch});
            let mut v = Vec::with_capacity(xs.len());
            for &x in &xs {
                let s = prof.eval(x)?;
                max_err = max_err.max(s.error());
                v.push(s.value);
            }
            v
        }
    };
    let path = out.data("reference.csv")?;
    let mut w = BufWriter::new(File::create(&path)?);
    writeln!(w, "X,u")?;
    for (x, v) in xs.iter().zip(&values) {
        writeln!(w, "{},{}", num(*x), num(*v))?;
    }
    w.flush()?;
    run.output(&path);
    run.manifest.grid = Some(json!({"points": xs.len()}));
    let mut d = match run.manifest.diagnostics.take() {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    d.insert("max_error".into(), json!(max_err));
    run.manifest.diagnostics = Value::Object(d);
    Ok(())
}

/// Per-snapshot distance from the N-wave of mass `mass`.
///
/// Lattice runs use `Σ_j |u_j − N(j/√t)/√t|`. Continuum runs use the Burgers
/// limit `u_T + a (u²)_X = 0` with `a = A/(ln 2)²` from the run manifest and the
/// discrete L¹ norm `ε Σ |u − N((X−X₀)/√(aT))/√(aT)|`.
pub fn compare_run(dir: &Path, mass: f64, origin: Option<f64>) -> Result<Vec<(f64, f64)>> {
    let manifest: RunManifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    let data = dir.join(manifest.outputs.first().map(String::as_str).unwrap_or("snapshots.csv"));
    let mut rdr = csv::Reader::from_path(&data).map_err(|e| Error::Config(e.to_string()))?;
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Config(e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut blocks: Vec<(f64, Vec<(f64, f64)>)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Config(e.to_string()))?;
        let vals: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Config(format!("{}: {e}", data.display())))?;
        if vals.len() != 3 {
            return Err(Error::Config(format!("{}: expected three columns", data.display())));
        }
        match blocks.last_mut() {
            Some((t, rows)) if *t == vals[0] => rows.push((vals[1], vals[2])),
            _ => blocks.push((vals[0], vec![(vals[1], vals[2])])),
        }
    }
    match headers.join(",").as_str() {
        "t,j,u" => Ok(blocks
            .into_iter()
            .filter(|(t, _)| *t > 0.0)
            .map(|(t, rows)| {
                let rt = t.sqrt();
                let mut err: f64 = rows.iter().map(|&(j, u)| (u - nwave(j / rt, mass) / rt).abs()).sum();
                let j_last = rows.last().map_or(0.0, |r| r.0);
                let edge = (2.0 * mass.sqrt() * rt).floor();
                let mut j = j_last + 1.0;
                while j <= edge {
                    err += nwave(j / rt, mass) / rt;
                    j += 1.0;
                }
                (t, err)
            })
            .collect()),
        "T,X,u" => {
            let a = manifest
                .diagnostics
                .get("burgers_constant")
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::Config("manifest lacks the Burgers constant".into()))?
                / std::f64::consts::LN_2.powi(2);
            let eps = manifest
                .grid
                .as_ref()
                .and_then(|g| g.get("eps"))
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::Config("manifest lacks the grid spacing".into()))?;
            let x0 = match origin {
                Some(x) => x,
                None => {
                    let first = &blocks.first().ok_or_else(|| Error::Config("empty run".into()))?.1;
                    let peak = first.iter().map(|r| r.1).fold(0.0, f64::max);
                    first
                        .iter()
                        .find(|r| r.1 > 1e-3 * peak)
                        .map(|r| r.0)
                        .ok_or_else(|| Error::Config("initial data vanish".into()))?
                }
            };
            Ok(blocks
                .into_iter()
                .filter(|(t, _)| *t > 0.0)
                .map(|(t, rows)| {
                    let s = (a * t).sqrt();
                    let err: f64 = rows.iter().map(|&(x, u)| (u - nwave((x - x0) / s, mass) / s).abs()).sum();
                    (t, eps * err)
                })
                .collect())
        }
        h => Err(Error::Config(format!("{}: unexpected header `{h}`", data.display()))),
    }
}

fn compare(a: &CompareArgs) -> Result<()> {
    let rows = compare_run(&a.run, a.nwave_mass, a.origin)?;
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    writeln!(w, "t,nwave_error")?;
    for (t, e) in rows {
        writeln!(w, "{},{}", num(t), num(e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_replaces_retagged_objects() {
        let mut base = json!({"init": {"type": "riemann", "c_minus": 1.0}, "eps": 0.05});
        merge(&mut base, json!({"init": {"type": "bump", "center": 3.0}, "eps": 0.1}));
        assert_eq!(base, json!({"init": {"type": "bump", "center": 3.0}, "eps": 0.1}));
        let mut base = json!({"kernel": {"variant": "alpha_family", "alpha": 8.0, "norm": "aunit"}});
        merge(&mut base, json!({"kernel": {"alpha": 3.0}}));
        assert_eq!(base["kernel"]["alpha"], json!(3.0));
        assert_eq!(base["kernel"]["norm"], json!("aunit"));
    }

    #[test]
    fn shortest_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 2.5e17, -0.0, 7.0] {
            assert_eq!(num(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(num(7.0), "7");
        assert_eq!(num(0.1), "0.1");
    }

    #[test]
    fn output_path_forms() {
        let o = Output::new(Some(PathBuf::from("runs/a.csv")), "spectrum");
        assert_eq!(o.dir, PathBuf::from("runs"));
        let o = Output::new(Some(PathBuf::from("runs/b")), "spectrum");
        assert_eq!(o.dir, PathBuf::from("runs/b"));
        assert!(o.file.is_none());
    }
}
