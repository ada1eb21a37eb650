//! Run configuration: flat `key=value` files layered under command-line
//! overrides.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use qwire::analysis::{csv::format_float, linspace, logspace, Regime};
use qwire::dynamics::{Engine, RatePreset, StepControl, Temperature};
use qwire::transfer::Scheme;
use qwire::{ChainSpec, Omega};

use crate::error::CliError;

pub const KEYS: &[&str] = &[
    "n", "j", "omega", "beta", "beta_prime", "rates", "gamma", "scheme", "time", "grid", "jobs", "seed", "out",
    "engine", "regime", "target", "haar_samples",
];

/// Transfer time; the `Γτ` axes rescale `Γ` by it.
pub const TAU: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub enum Axis {
    Linear { lo: f64, hi: f64, count: usize },
    Log { lo: f64, hi: f64, count: usize },
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Axis::Linear { lo, hi, count } => linspace(lo, hi, count),
            Axis::Log { lo, hi, count } => logspace(lo, hi, count),
        }
    }

    fn parse(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Usage(format!("axis '{s}' is not LO:HI:COUNT or log:LO:HI:COUNT"));
        let (log, rest) = match s.strip_prefix("log:") {
            Some(r) => (true, r),
            None => (false, s),
        };
        let parts: Vec<&str> = rest.split(':').collect();
        let [lo, hi, count] = parts[..] else { return Err(bad()) };
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        let count: usize = count.trim().parse().map_err(|_| bad())?;
        if count == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(bad());
        }
        if count > 1 && hi <= lo {
            return Err(CliError::Usage(format!("axis '{s}' must increase (HI > LO)")));
        }
        if log && lo <= 0.0 {
            return Err(CliError::Usage(format!("log axis '{s}' needs a positive lower end")));
        }
        Ok(if log { Axis::Log { lo, hi, count } } else { Axis::Linear { lo, hi, count } })
    }

    fn render(&self) -> String {
        match self {
            Axis::Linear { lo, hi, count } => format!("{}:{}:{count}", format_float(*lo), format_float(*hi)),
            Axis::Log { lo, hi, count } => format!("log:{}:{}:{count}", format_float(*lo), format_float(*hi)),
        }
    }

    fn from_values(v: &[f64]) -> Self {
        Axis::Linear { lo: v[0], hi: *v.last().unwrap_or(&v[0]), count: v.len() }
    }
}

/// Axes keyed by name: `beta`, `gamma_tau`, `gamma_t`, `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub axes: BTreeMap<String, Axis>,
}

const GRID_AXES: &[&str] = &["beta", "gamma_tau", "gamma_t", "t"];

impl GridSpec {
    fn parse(s: &str) -> Result<Self, CliError> {
        let mut axes = BTreeMap::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, spec) = part
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("grid entry '{part}' is not NAME=AXIS")))?;
            let name = name.trim();
            if !GRID_AXES.contains(&name) {
                return Err(CliError::Usage(format!("unknown grid axis '{name}' (expected one of {GRID_AXES:?})")));
            }
            axes.insert(name.to_string(), Axis::parse(spec.trim())?);
        }
        Ok(Self { axes })
    }

    fn render(&self) -> String {
        self.axes.iter().map(|(k, a)| format!("{k}={}", a.render())).collect::<Vec<_>>().join(",")
    }

    pub fn axis(&self, name: &str) -> Option<Vec<f64>> {
        self.axes.get(name).map(Axis::values)
    }
}

fn default_grid() -> GridSpec {
    GridSpec::parse("beta=0:4:20,gamma_tau=0:1.5:20,gamma_t=log:0.01:0.1:12,t=0:3:31").expect("valid default grid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    Rk4,
    Exact,
}

impl EngineChoice {
    pub fn engine(self) -> Engine {
        match self {
            EngineChoice::Rk4 => Engine::Rk4(StepControl::default()),
            EngineChoice::Exact => Engine::Exact,
        }
    }
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub coupling: f64,
    pub omega: Omega,
    pub temperature: Temperature,
    pub rates: RatePreset,
    pub gamma: f64,
    pub schemes: Vec<Scheme>,
    pub time: Option<f64>,
    pub grid: GridSpec,
    pub jobs: Option<usize>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub engine: EngineChoice,
    pub regime: Option<String>,
    pub target: f64,
    pub haar_samples: usize,
}

/// Reads `key=value` lines; blank lines and `#` comments are skipped.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_pairs(&text, &path.display().to_string())
}

pub fn parse_pairs(text: &str, origin: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{origin}:{}: expected key=value", i + 1)))?;
        let k = k.trim().replace('-', "_");
        if !KEYS.contains(&k.as_str()) {
            return Err(CliError::Usage(format!("{origin}:{}: unknown key '{k}'", i + 1)));
        }
        map.insert(k, v.trim().to_string());
    }
    Ok(map)
}

fn regime_layer(label: &str) -> Result<BTreeMap<String, String>, CliError> {
    let regimes = Regime::by_label(label)
        .ok_or_else(|| CliError::Usage(format!("unknown regime '{label}' (expected fig1..fig6)")))?;
    let r = &regimes[0];
    let mut m = BTreeMap::new();
    if regimes.len() == 1 {
        m.insert("n".into(), r.n.to_string());
    }
    let omega = match r.omega {
        Omega::Infinite => "inf".to_string(),
        Omega::Finite(x) => x.to_string(),
    };
    m.insert("omega".into(), omega);
    m.insert("rates".into(), r.preset.to_string());
    let grid = GridSpec {
        axes: [
            ("beta".to_string(), Axis::from_values(&r.beta_axis)),
            ("gamma_tau".to_string(), Axis::from_values(&r.gamma_tau_axis)),
        ]
        .into_iter()
        .collect(),
    };
    m.insert("grid".into(), grid.render());
    Ok(m)
}

fn render_omega(w: Omega) -> String {
    match w {
        Omega::Infinite => "inf".into(),
        Omega::Finite(x) => format_float(x),
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64, CliError> {
    let x: f64 = v.parse().map_err(|_| CliError::Usage(format!("{key}: '{v}' is not a number")))?;
    if x.is_nan() {
        return Err(CliError::Usage(format!("{key}: NaN is not allowed")));
    }
    Ok(x)
}

/// Real number, `inf`, or a multiple of π written `Kpi`.
fn parse_omega(v: &str) -> Result<Omega, CliError> {
    let t = v.trim().to_ascii_lowercase();
    if t == "inf" || t == "infinity" {
        return Ok(Omega::Infinite);
    }
    let x = match t.strip_suffix("pi") {
        Some("") => PI,
        Some(k) => parse_f64("omega", k.trim_end_matches('*'))? * PI,
        None => parse_f64("omega", &t)?,
    };
    if !(x.is_finite() && x >= 0.0) {
        return Err(CliError::Usage(format!("omega must be a non-negative real or 'inf', got '{v}'")));
    }
    Ok(Omega::Finite(x))
}

fn parse_rates(v: &str) -> Result<RatePreset, CliError> {
    match v {
        "uniform" => Ok(RatePreset::Uniform),
        "quadratic" => Ok(RatePreset::Quadratic),
        _ => {
            let list = v.strip_prefix("list:").ok_or_else(|| {
                CliError::Usage(format!("rates must be uniform, quadratic or list:w1,w2,...; got '{v}'"))
            })?;
            let w = list
                .split([',', ' '])
                .filter(|s| !s.is_empty())
                .map(|s| parse_f64("rates", s))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(RatePreset::Explicit(w))
        }
    }
}

fn parse_schemes(v: &str) -> Result<Vec<Scheme>, CliError> {
    match v {
        "a" => Ok(vec![Scheme::A]),
        "c" => Ok(vec![Scheme::C]),
        "both" => Ok(Scheme::BOTH.to_vec()),
        _ => Err(CliError::Usage(format!("scheme must be a, c or both; got '{v}'"))),
    }
}

impl RunConfig {
    /// Merges defaults < regime preset < file < command line.
    pub fn resolve(
        file: BTreeMap<String, String>,
        cli: BTreeMap<String, String>,
        default_engine: EngineChoice,
    ) -> Result<Self, CliError> {
        let regime = cli.get("regime").or_else(|| file.get("regime")).cloned();
        let mut m = match &regime {
            Some(r) => regime_layer(r)?,
            None => BTreeMap::new(),
        };
        m.extend(file);
        m.extend(cli);
        Self::from_map(&m, default_engine)
    }

    fn from_map(m: &BTreeMap<String, String>, default_engine: EngineChoice) -> Result<Self, CliError> {
        let get = |k: &str| m.get(k).map(String::as_str);
        let n = match get("n") {
            Some(v) => v.parse().map_err(|_| CliError::Usage(format!("n: '{v}' is not a chain length")))?,
            None => 6,
        };
        let coupling = get("j").map(|v| parse_f64("j", v)).transpose()?.unwrap_or(PI);
        let omega = get("omega").map(parse_omega).transpose()?.unwrap_or(Omega::Infinite);
        let beta = get("beta").map(|v| parse_f64("beta", v)).transpose()?;
        let beta_prime = get("beta_prime").map(|v| parse_f64("beta_prime", v)).transpose()?;
        let temperature = match (omega, beta, beta_prime) {
            (_, Some(_), Some(_)) => {
                return Err(CliError::Usage("give either beta or beta_prime, not both".into()));
            }
            (Omega::Infinite, Some(_), None) => {
                return Err(CliError::Usage("omega=inf uses beta_prime (= omega*beta), not beta".into()));
            }
            (Omega::Finite(_), None, Some(_)) => {
                return Err(CliError::Usage("finite omega uses beta, not beta_prime".into()));
            }
            (Omega::Infinite, None, b) => Temperature::BetaPrime(b.unwrap_or(0.0)),
            (Omega::Finite(_), b, None) => Temperature::Beta(b.unwrap_or(0.0)),
        };
        if temperature.value() < 0.0 {
            return Err(CliError::Usage("inverse temperature must be >= 0".into()));
        }
        let rates = get("rates").map(parse_rates).transpose()?.unwrap_or(RatePreset::Uniform);
        if let RatePreset::Explicit(w) = &rates {
            if w.len() != n {
                return Err(CliError::Usage(format!("rate list has {} entries but n = {n}", w.len())));
            }
        }
        let gamma = get("gamma").map(|v| parse_f64("gamma", v)).transpose()?.unwrap_or(0.01);
        let schemes = get("scheme").map(parse_schemes).transpose()?.unwrap_or_else(|| Scheme::BOTH.to_vec());
        let time = get("time").map(|v| parse_f64("time", v)).transpose()?;
        let mut grid = default_grid();
        if let Some(g) = get("grid") {
            grid.axes.extend(GridSpec::parse(g)?.axes);
        }
        let jobs = match get("jobs") {
            Some(v) => match v.parse::<usize>() {
                Ok(k) if k > 0 => Some(k),
                _ => return Err(CliError::Usage(format!("jobs: '{v}' is not a positive integer"))),
            },
            None => None,
        };
        let seed = match get("seed") {
            Some(v) => v.parse().map_err(|_| CliError::Usage(format!("seed: '{v}' is not an unsigned integer")))?,
            None => 0,
        };
        let engine = match get("engine") {
            None => default_engine,
            Some("rk4") => EngineChoice::Rk4,
            Some("exact") => EngineChoice::Exact,
            Some(v) => return Err(CliError::Usage(format!("engine must be rk4 or exact; got '{v}'"))),
        };
        let target = get("target").map(|v| parse_f64("target", v)).transpose()?.unwrap_or(2.0 / 3.0);
        let haar_samples = match get("haar_samples") {
            Some(v) => v.parse().map_err(|_| CliError::Usage(format!("haar_samples: '{v}' is not a count")))?,
            None => 20_000,
        };
        let cfg = Self {
            n,
            coupling,
            omega,
            temperature,
            rates,
            gamma,
            schemes,
            time,
            grid,
            jobs,
            seed,
            out: get("out").map(PathBuf::from),
            engine,
            regime: get("regime").map(str::to_string),
            target,
            haar_samples,
        };
        cfg.spec()?;
        Ok(cfg)
    }

    pub fn spec(&self) -> Result<ChainSpec, CliError> {
        ChainSpec::with_params(self.n, self.coupling, self.omega, TAU).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn axis(&self, name: &str) -> Result<Vec<f64>, CliError> {
        self.grid.axis(name).ok_or_else(|| CliError::Usage(format!("grid has no '{name}' axis")))
    }

    /// Resolved values in a fixed order, for the comment header.
    pub fn echo(&self, command: &str) -> Vec<(String, String)> {
        let mut v: Vec<(String, String)> = vec![
            ("command".into(), command.into()),
            ("version".into(), env!("CARGO_PKG_VERSION").into()),
            ("n".into(), self.n.to_string()),
            ("j".into(), format_float(self.coupling)),
            ("omega".into(), render_omega(self.omega)),
        ];
        match self.temperature {
            Temperature::Beta(b) => v.push(("beta".into(), format_float(b))),
            Temperature::BetaPrime(b) => v.push(("beta_prime".into(), format_float(b))),
        }
        let schemes = match self.schemes.as_slice() {
            [Scheme::A] => "a",
            [Scheme::C] => "c",
            _ => "both",
        };
        let mut rest: Vec<(String, String)> = vec![
            ("tau".into(), format_float(TAU)),
            ("rates".into(), self.rates.to_string()),
            ("gamma".into(), format_float(self.gamma)),
            ("scheme".into(), schemes.into()),
            ("time".into(), self.time.map(format_float).unwrap_or_else(|| "tau".into())),
            ("grid".into(), self.grid.render()),
            ("seed".into(), self.seed.to_string()),
            (
                "engine".into(),
                match self.engine {
                    EngineChoice::Rk4 => "rk4".into(),
                    EngineChoice::Exact => "exact".into(),
                },
            ),
            ("target".into(), format_float(self.target)),
            ("haar_samples".into(), self.haar_samples.to_string()),
        ];
        if let Some(r) = &self.regime {
            rest.push(("regime".into(), r.clone()));
        }
        v.append(&mut rest);
        v
    }
}
