//! Run configuration shared by every subcommand.
//!
//! The on-disk format is one `key = value` pair per line, `#` starts a
//! comment, and keys are the long command-line flag names without dashes
//! (`big-n = 1024`). List-valued keys take comma-separated values.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::experiments::Ensemble;
use crate::solvers::{SolverKind, SolverOptions};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ONEL1_OUT";
pub const DEFAULT_OUT_DIR: &str = "results";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    PhaseTransition,
    Benchmark,
    ImageDemo,
    Selftest,
}

impl Command {
    pub const ALL: [Command; 5] = [
        Command::Solve,
        Command::PhaseTransition,
        Command::Benchmark,
        Command::ImageDemo,
        Command::Selftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::PhaseTransition => "phase-transition",
            Command::Benchmark => "benchmark",
            Command::ImageDemo => "image-demo",
            Command::Selftest => "selftest",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| Error::invalid(format!("unknown command {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::invalid(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub solvers: Vec<SolverKind>,
    pub ensemble: Ensemble,
    /// Measurement count (solve with a random operator, image-demo).
    pub n: Option<usize>,
    /// Signal length, or image side for image-demo.
    pub big_n: usize,
    pub deltas: Vec<f64>,
    pub rhos: Vec<f64>,
    /// `None` selects each solver's recommended growth ratio.
    pub r: Option<f64>,
    pub alpha: f64,
    pub tau: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub epsilon: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub sigma: f64,
    pub trials: usize,
    pub seed: u64,
    pub levels: usize,
    pub out: PathBuf,
    pub format: OutputFormat,
    pub full_scale: bool,
    pub input: Option<PathBuf>,
    pub mask: Option<PathBuf>,
    pub image: Option<PathBuf>,
    pub reference: Option<PathBuf>,
}

/// Keys accepted in config files and as flag names.
pub const KEYS: [&str; 26] = [
    "command", "solver", "ensemble", "n", "big-n", "delta", "rho", "r", "alpha", "tau", "tau1", "tau2",
    "epsilon", "max-outer", "max-inner", "sigma", "trials", "seed", "levels", "out", "format",
    "full-scale", "input", "mask", "image", "reference",
];

/// Output directory from `ONEL1_OUT`, falling back to `results`.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

impl RunConfig {
    /// Documented defaults for `command`.
    ///
    /// | command          | solvers          | N     | delta        | rho        | trials |
    /// |------------------|------------------|-------|--------------|------------|--------|
    /// | solve            | rone-l1          | 1024  | -            | -          | -      |
    /// | phase-transition | rone-l1          | 1024  | 0.1..0.9     | 21 centred | 10     |
    /// | benchmark        | eone, rone, amp  | 4096  | 0.2          | 0.1, 0.22  | 20     |
    /// | image-demo       | rone-l1          | 256   | n = 7419     | -          | -      |
    ///
    /// `full_scale` switches to 33 deltas `0.02..0.98` with 20 trials for
    /// phase-transition and `N = 16384` for benchmark.
    pub fn defaults(command: Command, full_scale: bool, out: PathBuf) -> Self {
        let solver = SolverOptions::default();
        let mut cfg = RunConfig {
            command,
            solvers: vec![SolverKind::RoneL1],
            ensemble: Ensemble::PartialDct,
            n: None,
            big_n: 1024,
            deltas: Vec::new(),
            rhos: Vec::new(),
            r: None,
            alpha: solver.alpha,
            tau: solver.tau,
            tau1: solver.tau1,
            tau2: solver.tau2,
            epsilon: solver.epsilon,
            max_outer: solver.max_outer,
            max_inner: solver.max_inner,
            sigma: 0.0,
            trials: 1,
            seed: 0,
            levels: 4,
            out,
            format: OutputFormat::Csv,
            full_scale,
            input: None,
            mask: None,
            image: None,
            reference: None,
        };
        match command {
            Command::PhaseTransition => {
                let grid = if full_scale {
                    crate::experiments::PhaseGrid::full_scale()
                } else {
                    crate::experiments::PhaseGrid::desk_scale()
                };
                cfg.deltas = grid.deltas;
                cfg.trials = grid.trials;
                cfg.big_n = grid.len;
            }
            Command::Benchmark => {
                let bench = if full_scale {
                    crate::experiments::BenchmarkConfig::full_scale()
                } else {
                    crate::experiments::BenchmarkConfig::default()
                };
                cfg.solvers = bench.solvers;
                cfg.big_n = bench.len;
                cfg.deltas = vec![bench.delta];
                cfg.rhos = bench.rhos;
                cfg.trials = bench.trials;
            }
            Command::ImageDemo => {
                cfg.big_n = 256;
                cfg.n = Some(7419);
                cfg.sigma = 1.0;
            }
            Command::Solve | Command::Selftest => {}
        }
        cfg
    }

    /// Layer `file` pairs and then `flags` pairs over the defaults of
    /// `command`. `full-scale` is looked up first because it selects the
    /// defaults.
    pub fn resolve(
        command: Command,
        file: &[(String, String)],
        flags: &[(String, String)],
        out_default: PathBuf,
    ) -> Result<Self> {
        let mut full_scale = false;
        for (k, v) in file.iter().chain(flags) {
            if k == "full-scale" {
                full_scale = parse_bool(v)?;
            }
        }
        let mut cfg = Self::defaults(command, full_scale, out_default);
        for (k, v) in file {
            if k == "command" {
                let c: Command = v.parse()?;
                if c != command {
                    return Err(Error::invalid(format!(
                        "config file is for {c}, not {command}"
                    )));
                }
                continue;
            }
            cfg.apply_kv(k, v)?;
        }
        for (k, v) in flags {
            cfg.apply_kv(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Set one key. Unknown keys and malformed values are errors.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let bad = |what: &str| Error::invalid(format!("{key}: invalid {what} {v:?}"));
        match key {
            "command" => {
                let c: Command = v.parse()?;
                if c != self.command {
                    return Err(Error::invalid(format!("command mismatch: {c} vs {}", self.command)));
                }
            }
            "solver" => self.solvers = parse_list(v, |s| s.parse::<SolverKind>())?,
            "ensemble" => self.ensemble = v.parse()?,
            "n" => self.n = parse_opt(v, |s| s.parse::<usize>().map_err(|_| bad("count")))?,
            "big-n" => self.big_n = v.parse().map_err(|_| bad("count"))?,
            "delta" => self.deltas = parse_list(v, |s| parse_f64(s).map_err(|_| bad("number")))?,
            "rho" => self.rhos = parse_list(v, |s| parse_f64(s).map_err(|_| bad("number")))?,
            "r" => {
                self.r = if v.eq_ignore_ascii_case("auto") {
                    None
                } else {
                    Some(parse_f64(v).map_err(|_| bad("number"))?)
                }
            }
            "alpha" => self.alpha = parse_f64(v).map_err(|_| bad("number"))?,
            "tau" => self.tau = parse_f64(v).map_err(|_| bad("number"))?,
            "tau1" => self.tau1 = parse_f64(v).map_err(|_| bad("number"))?,
            "tau2" => self.tau2 = parse_f64(v).map_err(|_| bad("number"))?,
            "epsilon" => self.epsilon = parse_f64(v).map_err(|_| bad("number"))?,
            "max-outer" => self.max_outer = v.parse().map_err(|_| bad("count"))?,
            "max-inner" => self.max_inner = v.parse().map_err(|_| bad("count"))?,
            "sigma" => self.sigma = parse_f64(v).map_err(|_| bad("number"))?,
            "trials" => self.trials = v.parse().map_err(|_| bad("count"))?,
            "seed" => self.seed = v.parse().map_err(|_| bad("seed"))?,
            "levels" => self.levels = v.parse().map_err(|_| bad("count"))?,
            "out" => self.out = PathBuf::from(v),
            "format" => self.format = v.parse()?,
            "full-scale" => {
                let fs = parse_bool(v)?;
                if fs != self.full_scale {
                    return Err(Error::invalid("full-scale must be set before other keys"));
                }
            }
            "input" => self.input = parse_opt(v, |s| Ok(PathBuf::from(s)))?,
            "mask" => self.mask = parse_opt(v, |s| Ok(PathBuf::from(s)))?,
            "image" => self.image = parse_opt(v, |s| Ok(PathBuf::from(s)))?,
            "reference" => self.reference = parse_opt(v, |s| Ok(PathBuf::from(s)))?,
            other => return Err(Error::invalid(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.solver_options().validate()?;
        if self.solvers.is_empty() {
            return Err(Error::invalid("at least one solver is required"));
        }
        if self.big_n == 0 {
            return Err(Error::invalid("big-n must be positive"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be positive"));
        }
        if let Some(d) = self.deltas.iter().find(|d| !(**d > 0.0 && **d <= 1.0)) {
            return Err(Error::invalid(format!("delta must lie in (0,1], got {d}")));
        }
        if let Some(r) = self.rhos.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
            return Err(Error::invalid(format!("rho must lie in (0,1], got {r}")));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::invalid(format!("sigma must be >= 0, got {}", self.sigma)));
        }
        match self.command {
            Command::PhaseTransition if self.deltas.is_empty() => {
                Err(Error::invalid("phase-transition needs at least one delta"))
            }
            Command::PhaseTransition if !self.rhos.is_empty() => Err(Error::invalid(
                "phase-transition derives its rho grid from the reference curve; drop --rho",
            )),
            Command::Benchmark if self.deltas.len() != 1 || self.rhos.is_empty() => {
                Err(Error::invalid("benchmark needs exactly one delta and at least one rho"))
            }
            Command::Solve if self.input.is_none() => Err(Error::invalid("solve needs --input")),
            Command::Solve if self.mask.is_some() && self.n.is_some() => {
                Err(Error::invalid("--mask and --n are mutually exclusive"))
            }
            _ => Ok(()),
        }
    }

    /// Solver settings carried by this configuration.
    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            r: self.r,
            alpha: self.alpha,
            tau: self.tau,
            tau1: self.tau1,
            tau2: self.tau2,
            epsilon: self.epsilon,
            max_outer: self.max_outer,
            max_inner: self.max_inner,
            ..SolverOptions::default()
        }
    }

    /// Every key, in [`KEYS`] order, in the config-file format.
    pub fn to_config_string(&self) -> String {
        fn opt_path(p: &Option<PathBuf>) -> String {
            p.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
        }
        fn list<T: fmt::Display>(v: &[T]) -> String {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }
        let pairs: [(&str, String); 26] = [
            ("command", self.command.to_string()),
            ("solver", list(&self.solvers)),
            ("ensemble", self.ensemble.to_string()),
            ("n", self.n.map(|n| n.to_string()).unwrap_or_default()),
            ("big-n", self.big_n.to_string()),
            ("delta", list(&self.deltas)),
            ("rho", list(&self.rhos)),
            ("r", self.r.map(|r| r.to_string()).unwrap_or_else(|| "auto".into())),
            ("alpha", self.alpha.to_string()),
            ("tau", self.tau.to_string()),
            ("tau1", self.tau1.to_string()),
            ("tau2", self.tau2.to_string()),
            ("epsilon", self.epsilon.to_string()),
            ("max-outer", self.max_outer.to_string()),
            ("max-inner", self.max_inner.to_string()),
            ("sigma", self.sigma.to_string()),
            ("trials", self.trials.to_string()),
            ("seed", self.seed.to_string()),
            ("levels", self.levels.to_string()),
            ("out", self.out.display().to_string()),
            ("format", self.format.to_string()),
            ("full-scale", self.full_scale.to_string()),
            ("input", opt_path(&self.input)),
            ("mask", opt_path(&self.mask)),
            ("image", opt_path(&self.image)),
            ("reference", opt_path(&self.reference)),
        ];
        let mut s = String::new();
        for (k, v) in pairs {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    /// Parse text produced by [`RunConfig::to_config_string`] (or any config
    /// file that names its command).
    pub fn from_config_str(text: &str, out_default: PathBuf) -> Result<Self> {
        let pairs = parse_config_pairs(text)?;
        let command = pairs
            .iter()
            .find(|(k, _)| k == "command")
            .ok_or_else(|| Error::invalid("config has no command key"))?
            .1
            .parse()?;
        Self::resolve(command, &pairs, &[], out_default)
    }
}

/// Split config text into `(key, value)` pairs. Keys are checked against
/// [`KEYS`]; duplicates are rejected.
pub fn parse_config_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(idx + 1, format!("expected key = value, found {line:?}")))?;
        let key = k.trim().to_string();
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::parse(idx + 1, format!("unknown key {key:?}")));
        }
        if pairs.iter().any(|(seen, _)| *seen == key) {
            return Err(Error::parse(idx + 1, format!("duplicate key {key:?}")));
        }
        pairs.push((key, v.trim().to_string()));
    }
    Ok(pairs)
}

pub fn read_config_file(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_pairs(&text)
}

fn parse_f64(s: &str) -> std::result::Result<f64, std::num::ParseFloatError> {
    s.trim().parse::<f64>()
}

fn parse_bool(v: &str) -> Result<bool> {
    match v.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(Error::invalid(format!("expected a boolean, found {other:?}"))),
    }
}

fn parse_list<T>(v: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| f(s.trim())).collect()
}

fn parse_opt<T>(v: &str, f: impl Fn(&str) -> Result<T>) -> Result<Option<T>> {
    if v.is_empty() {
        Ok(None)
    } else {
        f(v).map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kv(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn benchmark_defaults() {
        let c = RunConfig::resolve(Command::Benchmark, &[], &[], "o".into()).unwrap();
        assert_eq!(c.big_n, 4096);
        assert_eq!(c.deltas, vec![0.2]);
        assert_eq!(c.rhos, vec![0.1, 0.22]);
        assert_eq!(c.trials, 20);
        assert_eq!(c.r, None);
        let full = RunConfig::resolve(Command::Benchmark, &[], &kv(&[("full-scale", "true")]), "o".into()).unwrap();
        assert_eq!(full.big_n, 16384);
    }

    #[test]
    fn flags_override_file_override_defaults() {
        let file = kv(&[("r", "1.5"), ("trials", "3"), ("command", "phase-transition")]);
        let flags = kv(&[("r", "1.02")]);
        let c = RunConfig::resolve(Command::PhaseTransition, &file, &flags, "o".into()).unwrap();
        assert_eq!(c.r, Some(1.02));
        assert_eq!(c.trials, 3);
        assert_eq!(c.solver_options().r, Some(1.02));
        let wrong = kv(&[("command", "benchmark")]);
        assert!(RunConfig::resolve(Command::PhaseTransition, &wrong, &[], "o".into()).is_err());
    }

    #[test]
    fn unknown_and_malformed_values() {
        assert!(parse_config_pairs("colour = red\n").is_err());
        assert!(parse_config_pairs("tau 3\n").is_err());
        assert!(parse_config_pairs("tau = 1\ntau = 2\n").is_err());
        let bad = kv(&[("tau", "fast")]);
        assert!(RunConfig::resolve(Command::Benchmark, &[], &bad, "o".into()).is_err());
        let bad = kv(&[("r", "0.9")]);
        assert!(RunConfig::resolve(Command::Benchmark, &[], &bad, "o".into()).is_err());
        let bad = kv(&[("delta", "0.2,1.4")]);
        assert!(RunConfig::resolve(Command::PhaseTransition, &[], &bad, "o".into()).is_err());
        let mut c = RunConfig::defaults(Command::Benchmark, false, "o".into());
        assert!(c.apply_kv("nonsense", "1").is_err());
    }

    #[test]
    fn round_trip() {
        let flags = kv(&[
            ("solver", "rone-l1,ist-fixed:0.125,amp"),
            ("tau", "3.3e-7"),
            ("rho", "0.1,0.22,0.30000000000000004"),
            ("seed", "18446744073709551615"),
            ("out", "some dir/x"),
            ("mask", "m.txt"),
            ("format", "json"),
        ]);
        let c = RunConfig::resolve(Command::Benchmark, &[], &flags, "o".into()).unwrap();
        let text = c.to_config_string();
        let back = RunConfig::from_config_str(&text, "elsewhere".into()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_config_string(), text);
    }

    #[test]
    fn solve_requires_input() {
        assert!(RunConfig::resolve(Command::Solve, &[], &[], "o".into()).is_err());
        let ok = kv(&[("input", "b.txt")]);
        assert!(RunConfig::resolve(Command::Solve, &[], &ok, "o".into()).is_ok());
    }
}
