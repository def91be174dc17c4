//! The `darboux` command-line tool.
//!
//! Exit status is 0 when everything verified, 1 when a residual or a
//! construction failed, and 2 for usage and configuration errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use crate::crum::Chain;
use crate::darboux::{generate_seed, Seed};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::io::{export_chain, load_chain, read_manifest, write_json, write_seed};
use crate::operators::{seed_equation_residual, DEFAULT_FLOAT_TOL};
use crate::reproduce::{run_example, Verdict};
use crate::scalar::{Backend, Rational, Scalar};
use crate::seq::{Seq, Window};
use crate::verify::{verify_chain, ChainData, VerificationReport};

#[derive(Debug, Parser)]
#[command(name = "darboux", version, about = "Discrete Darboux and Crum transformations for H = -Δ² + V(n)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate seed solutions and write them with JSON sidecars.
    Generate(RunArgs),
    /// One Darboux step from a single seed.
    Darboux {
        #[command(flatten)]
        run: RunArgs,
        /// Zero mode of H₀ to carry over to H₁.
        #[arg(long, value_name = "EXPR")]
        phi: Option<String>,
    },
    /// A Crum chain from one or more seeds.
    Crum(RunArgs),
    /// Recompute every residual of an exported chain.
    Verify {
        #[arg(long, value_name = "DIR", default_value = "out")]
        dir: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Reproduce a worked example: 1a, 1b, 1c, 2 or 3.
    Example {
        name: String,
        #[arg(long, value_name = "DIR", default_value = "out")]
        out: PathBuf,
    },
    /// Write an exported chain as one wide, plot-ready table.
    Export {
        #[arg(long, value_name = "DIR", default_value = "out")]
        dir: PathBuf,
        /// Defaults to DIR/table.csv.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Flat `key = json` file; flags override its values.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "rational|float")]
    pub backend: Option<Backend>,
    /// Window of V₀.
    #[arg(long, value_name = "LO:HI", allow_hyphen_values = true)]
    pub window: Option<String>,
    #[arg(long, value_name = "EXPR|@FILE", allow_hyphen_values = true)]
    pub potential: Option<String>,
    /// Repeatable; later seeds extend the chain.
    #[arg(long = "seed", value_name = "EPS:V0,V1|EPS:EXPR", allow_hyphen_values = true)]
    pub seeds: Vec<String>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SeedInit {
    Values(String, String),
    Expr(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeedSpec {
    pub eps: String,
    pub init: SeedInit,
}

impl SeedSpec {
    /// `EPS:V0,V1` or `EPS:EXPR`.
    pub fn parse(text: &str) -> Result<Self> {
        let (eps, rest) = text
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("seed `{text}` should look like EPS:V0,V1 or EPS:EXPR")))?;
        let init = match rest.split_once(',') {
            Some((a, b)) => SeedInit::Values(a.trim().into(), b.trim().into()),
            None => SeedInit::Expr(rest.trim().into()),
        };
        Ok(SeedSpec { eps: eps.trim().into(), init })
    }

    fn from_json(v: &Value) -> Result<Self> {
        let scalar = |v: &Value| match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            other => Err(Error::Config(format!("expected a number or string, got {other}"))),
        };
        match v {
            Value::String(s) => SeedSpec::parse(s),
            Value::Object(o) => {
                let eps = scalar(o.get("eps").ok_or_else(|| Error::Config("seed without `eps`".into()))?)?;
                let init = match (o.get("init"), o.get("expr")) {
                    (Some(Value::Array(a)), None) if a.len() == 2 => {
                        SeedInit::Values(scalar(&a[0])?, scalar(&a[1])?)
                    }
                    (None, Some(Value::String(e))) => SeedInit::Expr(e.clone()),
                    _ => return Err(Error::Config("seed needs `init: [v0, v1]` or `expr`".into())),
                };
                Ok(SeedSpec { eps, init })
            }
            other => Err(Error::Config(format!("bad seed entry {other}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub backend: Backend,
    pub window: Option<Window>,
    pub potential: String,
    pub seeds: Vec<SeedSpec>,
    pub output_dir: PathBuf,
    pub float_tolerance: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            backend: Backend::Rational,
            window: None,
            potential: "0".into(),
            seeds: Vec::new(),
            output_dir: PathBuf::from("out"),
            float_tolerance: DEFAULT_FLOAT_TOL,
        }
    }
}

pub fn parse_window(text: &str) -> Result<Window> {
    let bad = || Error::Config(format!("window `{text}` should look like LO:HI"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    Window::new(lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?)
}

impl RunConfig {
    /// Parses `key = json` lines; `#` starts a comment line.
    pub fn parse_file_text(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, raw) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let key = key.trim();
            if seen.insert(key.to_string(), i).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", i + 1)));
            }
            let value: Value = serde_json::from_str(raw.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
            let want_str = |v: &Value| {
                v.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| Error::Config(format!("line {}: `{key}` must be a string", i + 1)))
            };
            match key {
                "backend" => cfg.backend = want_str(&value)?.parse()?,
                "window" => {
                    cfg.window = Some(match &value {
                        Value::String(s) => parse_window(s)?,
                        _ => serde_json::from_value(value.clone())
                            .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?,
                    })
                }
                "potential" => cfg.potential = want_str(&value)?,
                "seeds" => {
                    let items = value
                        .as_array()
                        .ok_or_else(|| Error::Config(format!("line {}: `seeds` must be a list", i + 1)))?;
                    cfg.seeds = items.iter().map(SeedSpec::from_json).collect::<Result<_>>()?;
                }
                "output_dir" => cfg.output_dir = want_str(&value)?.into(),
                "float_tolerance" => {
                    cfg.float_tolerance = value
                        .as_f64()
                        .ok_or_else(|| Error::Config(format!("line {}: `float_tolerance` must be a number", i + 1)))?
                }
                other => return Err(Error::Config(format!("line {}: unknown key `{other}`", i + 1))),
            }
        }
        Ok(cfg)
    }

    pub fn from_args(args: &RunArgs) -> Result<Self> {
        let mut cfg = match &args.config {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                Self::parse_file_text(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(b) = args.backend {
            cfg.backend = b;
        }
        if let Some(w) = &args.window {
            cfg.window = Some(parse_window(w)?);
        }
        if let Some(p) = &args.potential {
            cfg.potential = p.clone();
        }
        if !args.seeds.is_empty() {
            cfg.seeds = args.seeds.iter().map(|s| SeedSpec::parse(s)).collect::<Result<_>>()?;
        }
        if let Some(o) = &args.out {
            cfg.output_dir = o.clone();
        }
        if let Some(t) = args.tol {
            cfg.float_tolerance = t;
        }
        Ok(cfg)
    }

    fn effective_tol<S: Scalar>(&self) -> f64 {
        if S::is_exact() { 0.0 } else { self.float_tolerance }
    }

    pub fn potential<S: Scalar>(&self) -> Result<Seq<S>> {
        if let Some(path) = self.potential.strip_prefix('@') {
            let s = Seq::<S>::read_csv(Path::new(path))?;
            return match self.window {
                Some(w) => s.restrict(w),
                None => Ok(s),
            };
        }
        let w = self
            .window
            .ok_or_else(|| Error::Config("a window is required for an expression potential".into()))?;
        Expr::parse(&self.potential)?.tabulate(w)
    }

    /// Parses every ε and rejects repeats before any computation.
    fn eps_values<S: Scalar>(&self) -> Result<Vec<S>> {
        let mut out: Vec<S> = Vec::new();
        for spec in &self.seeds {
            let e = S::parse_literal(&spec.eps)?;
            if out.contains(&e) {
                return Err(Error::DuplicateEps(spec.eps.clone()));
            }
            out.push(e);
        }
        Ok(out)
    }

    pub fn seeds<S: Scalar>(&self, v0: &Seq<S>) -> Result<Vec<Seed<S>>> {
        let eps = self.eps_values::<S>()?;
        let needed = 2 * self.seeds.len() + 3;
        if v0.len() < needed {
            return Err(Error::WindowTooSmall { what: "run configuration", needed, got: v0.len() });
        }
        let seed_window = Window::new(v0.lo(), v0.hi() + 2)?;
        self.seeds
            .iter()
            .zip(eps)
            .map(|(spec, e)| match &spec.init {
                SeedInit::Values(a, b) => generate_seed(v0, e, S::parse_literal(a)?, S::parse_literal(b)?),
                SeedInit::Expr(text) => {
                    let psi = Expr::parse(text)?.tabulate(seed_window)?;
                    Seed::with_tolerance(psi, e, v0, self.effective_tol::<S>())
                }
            })
            .collect()
    }
}

pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Generate(args) => {
            let cfg = RunConfig::from_args(&args)?;
            dispatch(&cfg, cmd_generate::<Rational>, cmd_generate::<f64>)
        }
        Command::Darboux { run, phi } => {
            let cfg = RunConfig::from_args(&run)?;
            if cfg.seeds.len() != 1 {
                return Err(Error::Config(format!("darboux takes exactly one seed, got {}", cfg.seeds.len())));
            }
            let phi = phi.as_deref();
            dispatch(&cfg, |cfg| cmd_chain::<Rational>(cfg, phi), |cfg| cmd_chain::<f64>(cfg, phi))
        }
        Command::Crum(args) => {
            let cfg = RunConfig::from_args(&args)?;
            if cfg.seeds.is_empty() {
                return Err(Error::Config("crum needs at least one --seed".into()));
            }
            dispatch(&cfg, |cfg| cmd_chain::<Rational>(cfg, None), |cfg| cmd_chain::<f64>(cfg, None))
        }
        Command::Verify { dir, tol } => {
            let m = read_manifest(&dir)?;
            let tol = tol.unwrap_or(m.tolerance);
            match m.backend {
                Backend::Rational => cmd_verify::<Rational>(&dir, 0.0),
                Backend::Float => cmd_verify::<f64>(&dir, tol),
            }
        }
        Command::Example { name, out } => cmd_example(&name, &out),
        Command::Export { dir, out } => {
            let out = out.unwrap_or_else(|| dir.join("table.csv"));
            match read_manifest(&dir)?.backend {
                Backend::Rational => cmd_export::<Rational>(&dir, &out),
                Backend::Float => cmd_export::<f64>(&dir, &out),
            }
        }
    }
}

fn dispatch(
    cfg: &RunConfig,
    exact: impl FnOnce(&RunConfig) -> Result<i32>,
    float: impl FnOnce(&RunConfig) -> Result<i32>,
) -> Result<i32> {
    match cfg.backend {
        Backend::Rational => exact(cfg),
        Backend::Float => float(cfg),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn cmd_generate<S: Scalar>(cfg: &RunConfig) -> Result<i32> {
    if cfg.seeds.is_empty() {
        return Err(Error::Config("generate needs at least one --seed".into()));
    }
    let v0 = cfg.potential::<S>()?;
    let seeds = cfg.seeds(&v0)?;
    create_dir(&cfg.output_dir)?;
    for (i, seed) in seeds.iter().enumerate() {
        let path = cfg.output_dir.join(format!("seed_{}.csv", i + 1));
        write_seed(seed, &path)?;
        let r = seed_equation_residual(&v0, seed.psi(), seed.eps())?;
        println!(
            "seed {} (eps = {}): {} on {}, max |residual| = {}",
            i + 1,
            seed.eps().format(),
            path.display(),
            seed.psi().window(),
            r.max_abs().format()
        );
    }
    Ok(0)
}

fn print_verification(rep: &VerificationReport) {
    let all = rep.residuals.iter().chain(&rep.probes.reports).chain(&rep.bianchi);
    let total = all.clone().count();
    let failed: Vec<_> = all.filter(|r| !r.passed).collect();
    println!("{} of {} residuals vanish (backend {}, tol {})", total - failed.len(), total, rep.backend, rep.tolerance);
    for r in failed {
        println!("FAILED {}: max |residual| {} at n = {}", r.identity, r.max_abs_residual, r.worst_index);
    }
    for e in &rep.errors {
        println!("ERROR {e}");
    }
}

fn cmd_chain<S: Scalar>(cfg: &RunConfig, phi: Option<&str>) -> Result<i32> {
    let v0 = cfg.potential::<S>()?;
    let seeds = cfg.seeds(&v0)?;
    let tol = cfg.effective_tol::<S>();
    let chain = Chain::new(v0.clone()).with_tolerance(tol).extend_all(seeds)?;
    let dir = &cfg.output_dir;
    export_chain(&chain, dir)?;
    if let Some(text) = phi {
        let w = Window::new(v0.lo(), v0.hi() + 2)?;
        let phi1 = chain.transform(&Expr::parse(text)?.tabulate::<S>(w)?)?;
        phi1.write_csv(&dir.join("phi_1.csv"))?;
    }
    let rep = verify_chain(&ChainData::from(&chain), tol);
    write_json(&dir.join("verification.json"), &rep)?;
    println!("wrote chain of length {} to {}", chain.k(), dir.display());
    print_verification(&rep);
    Ok(if rep.passed { 0 } else { 1 })
}

fn cmd_verify<S: Scalar>(dir: &Path, tol: f64) -> Result<i32> {
    let (_, data) = load_chain::<S>(dir)?;
    let rep = verify_chain(&data, tol);
    write_json(&dir.join("verification.json"), &rep)?;
    print_verification(&rep);
    Ok(if rep.passed { 0 } else { 1 })
}

fn slug(name: &str) -> String {
    let mut out = String::new();
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

fn cmd_example(name: &str, out: &Path) -> Result<i32> {
    let rep = run_example(name)?;
    let dir = out.join(format!("example_{name}"));
    create_dir(&dir)?;
    write_json(&dir.join("report.json"), &rep)?;
    for c in &rep.comparisons {
        let path = dir.join(format!("{}.csv", slug(&c.name)));
        fs::write(&path, c.to_csv()).map_err(|e| Error::io(&path, e))?;
    }
    println!("example {}: {} ({} backend)", rep.example, rep.title, rep.backend);
    for c in &rep.checks {
        let verdict = match c.verdict {
            Verdict::Match => "match",
            Verdict::Mismatch => "MISMATCH",
        };
        let kind = if c.asserted { "" } else { " (reported)" };
        println!("  {verdict:<8} {}{kind}: max |difference| {}", c.name, c.max_abs_difference);
    }
    for n in &rep.notes {
        println!("  note: {n}");
    }
    println!("{}", if rep.passed { "PASS" } else { "FAIL" });
    Ok(if rep.passed { 0 } else { 1 })
}

fn cmd_export<S: Scalar>(dir: &Path, out: &Path) -> Result<i32> {
    let (_, d) = load_chain::<S>(dir)?;
    let mut cols: Vec<(String, &Seq<S>)> = Vec::new();
    for (i, v) in d.potentials.iter().enumerate() {
        cols.push((format!("V_{i}"), v));
    }
    for (i, f) in d.fs.iter().enumerate() {
        cols.push((format!("f_{}", i + 1), f));
    }
    for (i, s) in d.states.iter().enumerate() {
        cols.push((format!("psi_hat_{}", i + 1), s));
    }
    let lo = cols.iter().map(|(_, s)| s.lo()).min().unwrap();
    let hi = cols.iter().map(|(_, s)| s.hi()).max().unwrap();
    let mut text = String::from("n");
    for (name, _) in &cols {
        text.push(',');
        text.push_str(name);
    }
    text.push('\n');
    for n in lo..=hi {
        let _ = write!(text, "{n}");
        for (_, s) in &cols {
            text.push(',');
            if let Some(v) = s.get(n) {
                let _ = write!(text, "{}", v.to_f64());
            }
        }
        text.push('\n');
    }
    fs::write(out, text).map_err(|e| Error::io(out, e))?;
    println!("wrote {}", out.display());
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_specs() {
        assert_eq!(
            SeedSpec::parse("-1/4:2,8/3").unwrap(),
            SeedSpec { eps: "-1/4".into(), init: SeedInit::Values("2".into(), "8/3".into()) }
        );
        assert_eq!(
            SeedSpec::parse("0:n+1").unwrap(),
            SeedSpec { eps: "0".into(), init: SeedInit::Expr("n+1".into()) }
        );
        assert!(SeedSpec::parse("0").is_err());
    }

    #[test]
    fn config_file() {
        let text = r#"
# Example 3
backend = "rational"
window = [0, 30]
potential = "0"
seeds = [{"eps": "0", "init": [1, 2]}, {"eps": "-1/4", "init": ["2", "8/3"]}, "1/3:n"]
float_tolerance = 1e-9
"#;
        let cfg = RunConfig::parse_file_text(text).unwrap();
        assert_eq!(cfg.window, Some(Window::new(0, 30).unwrap()));
        assert_eq!(cfg.seeds.len(), 3);
        assert_eq!(cfg.seeds[1].init, SeedInit::Values("2".into(), "8/3".into()));
        assert_eq!(cfg.float_tolerance, 1e-9);
        assert!(RunConfig::parse_file_text("colour = \"red\"").is_err());
        assert!(RunConfig::parse_file_text("window = \"0:3\"\nwindow = \"0:4\"").is_err());
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "window = \"0:10\"\nbackend = \"float\"\n").unwrap();
        let args = RunArgs {
            config: Some(path),
            window: Some("2:20".into()),
            ..RunArgs::default()
        };
        let cfg = RunConfig::from_args(&args).unwrap();
        assert_eq!(cfg.window, Some(Window::new(2, 20).unwrap()));
        assert_eq!(cfg.backend, Backend::Float);
    }

    #[test]
    fn duplicate_eps_rejected_early() {
        let cfg = RunConfig {
            window: Some(Window::new(0, 20).unwrap()),
            seeds: vec![SeedSpec::parse("1/2:1,2").unwrap(), SeedSpec::parse("2/4:1,3").unwrap()],
            ..RunConfig::default()
        };
        let v0 = cfg.potential::<Rational>().unwrap();
        assert!(matches!(cfg.seeds(&v0), Err(Error::DuplicateEps(_))));
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("phi1 (C1=-3/7, C2=2)"), "phi1_c1_3_7_c2_2");
        assert_eq!(slug("V2"), "v2");
    }
}
