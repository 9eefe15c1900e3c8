//! Run configuration, the run itself and report emission for the `nk6` binary.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::connection::{Connection, Tolerances};
use crate::error::{Error, Result};
use crate::geometry::{
    backend_flat_kahler, backend_perturbed, backend_s6_radius, AlmostHermitianBackend,
    DerivativeOracle, FdSettings,
};
use crate::verify::sampling::sample_points;
use crate::verify::{
    Classification, EinsteinCheck, IdentityId, IdentityReport, LambdaSummary, MuEstimate,
    Verifier,
};

/// Version tag of the JSON report.
pub const SCHEMA: &str = "nk6/1";

/// Exit status when every selected check passes.
pub const EXIT_PASS: i32 = 0;
/// Exit status when at least one selected check fails.
pub const EXIT_FAIL: i32 = 1;
/// Exit status for configuration errors.
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendName {
    S6,
    C3,
    Perturbed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Human,
}

/// One entry of the identity filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    Identity(IdentityId),
    Pde,
    Einstein,
    Classify,
}

impl BackendName {
    pub fn as_str(&self) -> &'static str {
        match self {
            BackendName::S6 => "s6",
            BackendName::C3 => "c3",
            BackendName::Perturbed => "perturbed",
        }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Check::Identity(id) => write!(f, "{id}"),
            Check::Pde => f.write_str("pde"),
            Check::Einstein => f.write_str("einstein"),
            Check::Classify => f.write_str("classify"),
        }
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pde" => Ok(Check::Pde),
            "einstein" => Ok(Check::Einstein),
            "classify" => Ok(Check::Classify),
            _ => s.parse().map(Check::Identity),
        }
    }
}

/// Parsed `--identities` value: `all` or a comma-separated list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection(Vec<Check>);

impl Selection {
    /// `I1..I32`, the PDE pair, the Einstein check and classification.
    pub fn all() -> Self {
        let mut v: Vec<Check> = IdentityId::all().map(Check::Identity).collect();
        v.extend([Check::Pde, Check::Einstein, Check::Classify]);
        Selection(v)
    }

    pub fn checks(&self) -> &[Check] {
        &self.0
    }

    pub fn contains(&self, c: Check) -> bool {
        self.0.contains(&c)
    }
}

impl FromStr for Selection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(Selection::all());
        }
        let mut out: Vec<Check> = Vec::new();
        for part in s.split(',').filter(|p| !p.trim().is_empty()) {
            let c: Check = part.parse()?;
            if !out.contains(&c) {
                out.push(c);
            }
        }
        if out.is_empty() {
            return Err(Error::Config("empty identity selection".into()));
        }
        Ok(Selection(out))
    }
}

impl std::fmt::Display for Selection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if *self == Selection::all() {
            return f.write_str("all");
        }
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl Serialize for Selection {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Selection {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

fn parse_selection(s: &str) -> std::result::Result<Selection, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Command-line flags. Every flag is optional so that values from a config
/// file can fill the gaps; flags take precedence.
#[derive(Debug, Clone, Default, Parser)]
#[command(name = "nk6", version, about = "Verify nearly Kähler identities on sampled points")]
pub struct CliArgs {
    /// Backend manifold.
    #[arg(long, value_enum)]
    pub backend: Option<BackendName>,
    /// Perturbation amplitude of the ellipsoid backend, in (0, 0.5).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Radius of the round sphere.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Number of sampled points.
    #[arg(long)]
    pub points: Option<usize>,
    /// Master seed.
    #[arg(long, env = "NK6_SEED")]
    pub seed: Option<u64>,
    /// Finite-difference step for first and second derivatives; third-order
    /// stencils use three times this value.
    #[arg(long)]
    pub fd_step: Option<f64>,
    #[arg(long)]
    pub tol_tier1: Option<f64>,
    #[arg(long)]
    pub tol_tier2: Option<f64>,
    #[arg(long)]
    pub tol_tier3: Option<f64>,
    /// `all` or a comma-separated list of I1..I32, pde, einstein, classify.
    #[arg(long, value_parser = parse_selection)]
    pub identities: Option<Selection>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat TOML file with the same keys as the long flags (`fd_step`,
    /// `tol_tier1`, ...).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Record the wall-clock time in the report (breaks byte-identical output).
    #[arg(long)]
    pub wall_clock: bool,
}

/// Keys accepted in a config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    backend: Option<BackendName>,
    delta: Option<f64>,
    radius: Option<f64>,
    points: Option<usize>,
    seed: Option<u64>,
    fd_step: Option<f64>,
    tol_tier1: Option<f64>,
    tol_tier2: Option<f64>,
    tol_tier3: Option<f64>,
    identities: Option<Selection>,
    format: Option<Format>,
    out: Option<PathBuf>,
    wall_clock: Option<bool>,
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub backend: BackendName,
    pub delta: f64,
    pub radius: f64,
    pub points: usize,
    pub seed: u64,
    pub fd_step: f64,
    pub tolerances: Tolerances,
    pub identities: Selection,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub wall_clock: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            backend: BackendName::S6,
            delta: 0.1,
            radius: 1.0,
            points: 20,
            seed: 0,
            fd_step: FdSettings::default().step,
            tolerances: Tolerances::default(),
            identities: Selection::all(),
            format: Format::Json,
            out: None,
            wall_clock: false,
        }
    }
}

impl RunConfig {
    /// Merges flags over the optional config file over defaults and
    /// validates the result.
    pub fn resolve(args: CliArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                toml::from_str::<FileConfig>(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let d = RunConfig::default();
        let cfg = RunConfig {
            backend: args.backend.or(file.backend).unwrap_or(d.backend),
            delta: args.delta.or(file.delta).unwrap_or(d.delta),
            radius: args.radius.or(file.radius).unwrap_or(d.radius),
            points: args.points.or(file.points).unwrap_or(d.points),
            seed: args.seed.or(file.seed).unwrap_or(d.seed),
            fd_step: args.fd_step.or(file.fd_step).unwrap_or(d.fd_step),
            tolerances: Tolerances {
                tier1: args.tol_tier1.or(file.tol_tier1).unwrap_or(d.tolerances.tier1),
                tier2: args.tol_tier2.or(file.tol_tier2).unwrap_or(d.tolerances.tier2),
                tier3: args.tol_tier3.or(file.tol_tier3).unwrap_or(d.tolerances.tier3),
            },
            identities: args.identities.or(file.identities).unwrap_or(d.identities),
            format: args.format.or(file.format).unwrap_or(d.format),
            out: args.out.or(file.out),
            wall_clock: args.wall_clock || file.wall_clock.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points == 0 {
            return Err(Error::Config("point count must be at least 1".into()));
        }
        if !(self.fd_step.is_finite() && self.fd_step > 0.0) {
            return Err(Error::Config(format!("fd step must be positive, got {}", self.fd_step)));
        }
        let t = &self.tolerances;
        for (name, v) in [("tier1", t.tier1), ("tier2", t.tier2), ("tier3", t.tier3)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        self.backend().map(|_| ())
    }

    /// The backend named by the configuration.
    pub fn backend(&self) -> Result<Box<dyn AlmostHermitianBackend>> {
        Ok(match self.backend {
            BackendName::S6 => Box::new(backend_s6_radius(self.radius)?),
            BackendName::C3 => Box::new(backend_flat_kahler()),
            BackendName::Perturbed => Box::new(backend_perturbed(self.delta)?),
        })
    }
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub config: RunConfig,
    pub identities: Vec<IdentityReport>,
    pub mu: Option<MuEstimate>,
    pub lambda: Option<LambdaSummary>,
    pub classification: Option<Classification>,
    pub einstein: Option<EinsteinCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<u64>,
    pub pass: bool,
}

/// Runs every selected check. Reports follow the order of the selection.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let start = Instant::now();
    let backend = config.backend()?;
    let oracle = DerivativeOracle::new(FdSettings::central(config.fd_step));
    let conn = Connection::new(backend.as_ref()).with_oracle(oracle);
    let verifier = Verifier::new(conn, config.seed).with_tolerances(config.tolerances);
    let points = sample_points(backend.as_ref(), config.points, config.seed);

    let mut identities = Vec::new();
    let mut classification = None;
    let mut einstein = None;
    for check in config.identities.checks() {
        match check {
            Check::Identity(id) => identities.push(verifier.run_identity(*id, &points)?),
            Check::Pde => {
                let (a, b) = verifier.check_pde_pair(&points)?;
                identities.push(a);
                identities.push(b);
            }
            Check::Einstein => {
                let e = verifier.check_einstein(&points)?;
                identities.push(e.report.clone());
                einstein = Some(e);
            }
            Check::Classify => classification = Some(verifier.classify(&points)?),
        }
    }
    let mu = verifier.estimate_mu(&points).ok();
    let lambda = verifier.lambda_summary(&points).ok();
    let pass = identities.iter().all(|r| r.pass);
    Ok(RunReport {
        schema: SCHEMA.into(),
        config: config.clone(),
        identities,
        mu,
        lambda,
        classification,
        einstein,
        wall_clock_ms: config
            .wall_clock
            .then(|| start.elapsed().as_millis() as u64),
        pass,
    })
}

/// Serialises a report in the requested format.
pub fn emit(report: &RunReport, format: Format) -> Result<Vec<u8>> {
    Ok(match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => emit_csv(report).into_bytes(),
        Format::Human => emit_human(report).into_bytes(),
    })
}

fn emit_csv(report: &RunReport) -> String {
    let mut s = String::from("id,n,max_residual,mean_residual,tol,pass\n");
    for r in &report.identities {
        let _ = writeln!(
            s,
            "{},{},{:e},{:e},{:e},{}",
            r.id, r.n, r.max_residual, r.mean_residual, r.tol, r.pass
        );
    }
    s
}

fn emit_human(report: &RunReport) -> String {
    let mut s = String::new();
    let c = &report.config;
    let _ = writeln!(
        s,
        "backend {}  points {}  seed {}  fd step {:e}",
        c.backend.as_str(), c.points, c.seed, c.fd_step
    );
    let _ = writeln!(
        s,
        "{:<16} {:>5} {:>13} {:>13} {:>9}  result",
        "id", "n", "max", "mean", "tol"
    );
    for r in &report.identities {
        let _ = writeln!(
            s,
            "{:<16} {:>5} {:>13.6e} {:>13.6e} {:>9.1e}  {}",
            r.id,
            r.n,
            r.max_residual,
            r.mean_residual,
            r.tol,
            if r.pass { "pass" } else { "FAIL" }
        );
    }
    if let Some(mu) = &report.mu {
        let _ = writeln!(s, "mu = {:.6} ± {:.3e}", mu.value, mu.spread);
    }
    if let Some(l) = &report.lambda {
        let _ = writeln!(s, "lambda = {:.6} {:+.6}i ± {:.3e}", l.re, l.im, l.spread);
    }
    if let Some(e) = &report.einstein {
        let _ = writeln!(
            s,
            "scalar curvature = {:.6} (expected {:.6})",
            e.scalar_curvature, e.expected_scalar_curvature
        );
    }
    if let Some(cl) = &report.classification {
        let _ = writeln!(s, "class = {}", cl.label);
    }
    if let Some(ms) = report.wall_clock_ms {
        let _ = writeln!(s, "wall clock = {ms} ms");
    }
    let _ = writeln!(s, "overall: {}", if report.pass { "PASS" } else { "FAIL" });
    s
}

/// Entry point of the binary; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match CliArgs::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let config = match RunConfig::resolve(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("nk6: {e}");
            return EXIT_CONFIG;
        }
    };
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("nk6: {e}");
            return EXIT_CONFIG;
        }
    };
    let bytes = match emit(&report, config.format) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("nk6: {e}");
            return EXIT_CONFIG;
        }
    };
    let written = match &config.out {
        Some(path) => std::fs::write(path, &bytes),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes)
        }
    };
    if let Err(e) = written {
        eprintln!("nk6: {e}");
        return EXIT_CONFIG;
    }
    if report.pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_parsing() {
        let s: Selection = "I5,I28,pde".parse().unwrap();
        assert_eq!(s.checks().len(), 3);
        assert_eq!(s.to_string(), "I5,I28,pde");
        assert!("I5,I99".parse::<Selection>().is_err());
        assert!("bogus".parse::<Selection>().is_err());
        assert_eq!("all".parse::<Selection>().unwrap(), Selection::all());
        assert_eq!(Selection::all().to_string(), "all");
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "backend = \"c3\"\npoints = 3\nseed = 9\ntol_tier2 = 1e-4\n").unwrap();
        let args = CliArgs {
            points: Some(5),
            config: Some(path),
            ..CliArgs::default()
        };
        let cfg = RunConfig::resolve(args).unwrap();
        assert_eq!(cfg.backend, BackendName::C3);
        assert_eq!(cfg.points, 5);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.tolerances.tier2, 1e-4);
        assert_eq!(cfg.tolerances.tier1, 1e-6);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad = [
            CliArgs {
                points: Some(0),
                ..CliArgs::default()
            },
            CliArgs {
                backend: Some(BackendName::Perturbed),
                delta: Some(0.7),
                ..CliArgs::default()
            },
            CliArgs {
                fd_step: Some(-1.0),
                ..CliArgs::default()
            },
        ];
        for args in bad {
            assert!(RunConfig::resolve(args).is_err());
        }
    }

    #[test]
    fn unknown_file_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "colour = \"blue\"\n").unwrap();
        let args = CliArgs {
            config: Some(path),
            ..CliArgs::default()
        };
        assert!(matches!(RunConfig::resolve(args), Err(Error::Config(_))));
    }
}
