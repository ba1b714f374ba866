//! Flat `key = value` configuration files.
//!
//! One key per line; `#` starts a comment. Angle-valued keys also accept a
//! `_pi` variant in units of pi (`phi_pi = 1.0` means `phi = pi`), and so
//! does `t` (`t_pi = 100` means `t = 100 pi`).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::model::ChainParams;
use crate::C64;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error(transparent)]
    Model(#[from] crate::Error),
}

impl ConfigError {
    fn invalid(key: &str, reason: impl Into<String>) -> Self {
        Self::Invalid { key: key.to_string(), reason: reason.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    Standard,
    Dephasing,
    Detuning,
    Combined,
    RandomPhase,
    NumberState,
    CoherentState,
    AtomicEquivalence,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 8] = [
        Self::Standard,
        Self::Dephasing,
        Self::Detuning,
        Self::Combined,
        Self::RandomPhase,
        Self::NumberState,
        Self::CoherentState,
        Self::AtomicEquivalence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Standard => "standard",
            Self::Dephasing => "dephasing",
            Self::Detuning => "detuning",
            Self::Combined => "combined",
            Self::RandomPhase => "random_phase",
            Self::NumberState => "number_state",
            Self::CoherentState => "coherent_state",
            Self::AtomicEquivalence => "atomic_equivalence",
        }
    }

    /// Keys this scenario needs beyond the couplings, `t` and `n`.
    pub fn extra_keys(self) -> &'static [&'static str] {
        match self {
            Self::Standard | Self::AtomicEquivalence => &[],
            Self::Dephasing => &["phi"],
            Self::Detuning => &["delta"],
            Self::Combined => &["delta", "phi"],
            Self::RandomPhase => &["trials", "seed"],
            Self::NumberState => &["photons"],
            Self::CoherentState => &["alpha"],
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Self::Standard => "no dephasing, no detuning: evolution freezes",
            Self::Dephasing => "total phase phi spread evenly over the checks, resonant",
            Self::Detuning => "detuned B, no dephasing",
            Self::Combined => "detuning and dephasing together",
            Self::RandomPhase => "Monte Carlo over uniformly random per-check phases",
            Self::NumberState => "N photons in A1",
            Self::CoherentState => "coherent state in A1",
            Self::AtomicEquivalence => "three-level atom against the one-photon chain",
        }
    }
}

impl FromStr for ScenarioKind {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ConfigError::invalid("scenario", format!("unknown scenario `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

impl FromStr for OutputFormat {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "jsonl" => Ok(Self::Jsonl),
            _ => Err(ConfigError::invalid("format", format!("expected csv or jsonl, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Phi,
    Delta,
    Theta,
    T,
}

impl FromStr for SweepVariable {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "phi" => Ok(Self::Phi),
            "delta" => Ok(Self::Delta),
            "theta" => Ok(Self::Theta),
            "t" => Ok(Self::T),
            _ => Err(ConfigError::invalid("sweep", format!("unknown sweep variable `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
}

/// Everything needed to run one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub scenario: ScenarioKind,
    pub params: ChainParams,
    pub t: f64,
    /// Step counts, one result row each.
    pub n_list: Vec<usize>,
    /// Total dephasing, spread evenly over the checks.
    pub phi: f64,
    pub photons: Option<u32>,
    pub alpha: Option<C64>,
    pub cutoff: Option<u32>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub sweep: Option<Sweep>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    /// Also write a `.jsonl` file next to the CSV.
    pub mirror_jsonl: bool,
}

const KNOWN_KEYS: &[&str] = &[
    "scenario",
    "kappa1",
    "kappa2",
    "kappa",
    "theta",
    "theta_pi",
    "delta",
    "t",
    "t_pi",
    "n",
    "n_list",
    "phi",
    "phi_pi",
    "photons",
    "alpha",
    "alpha_re",
    "alpha_im",
    "cutoff",
    "trials",
    "seed",
    "sweep",
    "grid",
    "grid_pi",
    "output",
    "format",
    "mirror_jsonl",
];

/// Parse `key = value` lines into a map, rejecting unknown and duplicate keys.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1 });
        }
        if !KNOWN_KEYS.contains(&k) {
            return Err(ConfigError::UnknownKey(k.to_string()));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(ConfigError::Duplicate { line: i + 1, key: k.to_string() });
        }
    }
    Ok(out)
}

struct Keys(BTreeMap<String, String>);

impl Keys {
    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key).map(|v| v.parse::<T>().map_err(|e| ConfigError::invalid(key, format!("`{v}`: {e}")))).transpose()
    }

    fn real(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.parse::<f64>(key)? {
            Some(x) if !x.is_finite() => Err(ConfigError::invalid(key, "must be finite")),
            other => Ok(other),
        }
    }

    /// `key` in plain units or `key_pi` in units of pi; not both.
    fn real_or_pi(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let pi_key = format!("{key}_pi");
        match (self.real(key)?, self.real(&pi_key)?) {
            (Some(_), Some(_)) => Err(ConfigError::invalid(key, format!("both `{key}` and `{pi_key}` given"))),
            (Some(x), None) => Ok(Some(x)),
            (None, Some(x)) => Ok(Some(x * PI)),
            (None, None) => Ok(None),
        }
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|s| s.trim().parse::<T>().map_err(|e| ConfigError::invalid(key, format!("`{s}`: {e}"))))
                    .collect()
            })
            .transpose()
    }
}

impl ScenarioSpec {
    /// Parse and validate a configuration file's contents.
    pub fn from_config_str(text: &str) -> Result<Self, ConfigError> {
        let keys = Keys(parse_key_values(text)?);
        let scenario: ScenarioKind = keys.parse("scenario")?.ok_or_else(|| ConfigError::Missing("scenario".into()))?;

        let delta = keys.real("delta")?;
        let params = match (keys.real("kappa1")?, keys.real("kappa2")?, keys.real("kappa")?) {
            (Some(k1), Some(k2), None) => ChainParams::new(k1, k2, delta.unwrap_or(0.0)),
            (None, None, Some(k)) => {
                let theta = keys.real_or_pi("theta")?.ok_or_else(|| ConfigError::Missing("theta".into()))?;
                ChainParams::from_angle(k, theta, delta.unwrap_or(0.0))
            }
            (None, None, None) => return Err(ConfigError::Missing("kappa1".into())),
            (Some(_), None, None) => return Err(ConfigError::Missing("kappa2".into())),
            (None, Some(_), None) => return Err(ConfigError::Missing("kappa1".into())),
            _ => return Err(ConfigError::invalid("kappa", "give either kappa1/kappa2 or kappa/theta")),
        };
        if keys.raw("kappa").is_none() && (keys.raw("theta").is_some() || keys.raw("theta_pi").is_some()) {
            return Err(ConfigError::invalid("theta", "theta is derived from kappa1/kappa2"));
        }
        params.validate().map_err(|e| ConfigError::invalid("kappa1", e.to_string()))?;

        let t = keys.real_or_pi("t")?.ok_or_else(|| ConfigError::Missing("t".into()))?;
        if t < 0.0 {
            return Err(ConfigError::invalid("t", "must be nonnegative"));
        }
        let n_list = match (keys.parse::<usize>("n")?, keys.list::<usize>("n_list")?) {
            (Some(n), None) => vec![n],
            (None, Some(l)) => l,
            (Some(_), Some(_)) => return Err(ConfigError::invalid("n", "give either n or n_list")),
            (None, None) => return Err(ConfigError::Missing("n".into())),
        };
        if n_list.is_empty() || n_list.contains(&0) {
            return Err(ConfigError::invalid("n", "step counts must be at least 1"));
        }

        let phi = keys.real_or_pi("phi")?;
        let alpha = match (keys.real("alpha")?, keys.real("alpha_re")?, keys.real("alpha_im")?) {
            (Some(a), None, None) => Some(C64::new(a, 0.0)),
            (None, re, im) if re.is_some() || im.is_some() => Some(C64::new(re.unwrap_or(0.0), im.unwrap_or(0.0))),
            (None, None, None) => None,
            _ => return Err(ConfigError::invalid("alpha", "give either alpha or alpha_re/alpha_im")),
        };

        let sweep = match keys.parse::<SweepVariable>("sweep")? {
            None => {
                if keys.raw("grid").is_some() || keys.raw("grid_pi").is_some() {
                    return Err(ConfigError::Missing("sweep".into()));
                }
                None
            }
            Some(variable) => {
                let grid = match (keys.list::<f64>("grid")?, keys.list::<f64>("grid_pi")?) {
                    (Some(g), None) => g,
                    (None, Some(g)) => g.into_iter().map(|x| x * PI).collect(),
                    (None, None) => return Err(ConfigError::Missing("grid".into())),
                    _ => return Err(ConfigError::invalid("grid", "give either grid or grid_pi")),
                };
                if grid.is_empty() || grid.iter().any(|x| !x.is_finite()) {
                    return Err(ConfigError::invalid("grid", "needs finite values"));
                }
                Some(Sweep { variable, grid })
            }
        };

        let spec = ScenarioSpec {
            scenario,
            params,
            t,
            n_list,
            phi: phi.unwrap_or(0.0),
            photons: keys.parse("photons")?,
            alpha,
            cutoff: keys.parse("cutoff")?,
            trials: keys.parse("trials")?,
            seed: keys.parse("seed")?,
            sweep,
            output: keys.raw("output").map(PathBuf::from),
            format: keys.parse("format")?.unwrap_or(OutputFormat::Csv),
            mirror_jsonl: keys.parse("mirror_jsonl")?.unwrap_or(false),
        };
        spec.check_scenario_fields(phi.is_some(), delta.is_some())?;
        Ok(spec)
    }

    fn check_scenario_fields(&self, has_phi: bool, has_delta: bool) -> Result<(), ConfigError> {
        let swept = |v: SweepVariable| self.sweep.as_ref().is_some_and(|s| s.variable == v);
        let delta = self.params.delta;
        match self.scenario {
            ScenarioKind::Standard => {
                if self.phi != 0.0 || swept(SweepVariable::Phi) {
                    return Err(ConfigError::invalid("phi", "standard scenario has no dephasing"));
                }
                if delta != 0.0 || swept(SweepVariable::Delta) {
                    return Err(ConfigError::invalid("delta", "standard scenario has no detuning"));
                }
            }
            ScenarioKind::Dephasing => {
                if !has_phi && !swept(SweepVariable::Phi) {
                    return Err(ConfigError::Missing("phi".into()));
                }
                if delta != 0.0 || swept(SweepVariable::Delta) {
                    return Err(ConfigError::invalid("delta", "dephasing scenario is resonant"));
                }
            }
            ScenarioKind::Detuning | ScenarioKind::Combined => {
                if !swept(SweepVariable::Delta) {
                    if !has_delta {
                        return Err(ConfigError::Missing("delta".into()));
                    }
                    if delta == 0.0 {
                        return Err(ConfigError::invalid("delta", "must be nonzero"));
                    }
                }
                if self.scenario == ScenarioKind::Detuning && (self.phi != 0.0 || swept(SweepVariable::Phi)) {
                    return Err(ConfigError::invalid("phi", "detuning scenario has no dephasing"));
                }
                if self.scenario == ScenarioKind::Combined && !has_phi && !swept(SweepVariable::Phi) {
                    return Err(ConfigError::Missing("phi".into()));
                }
            }
            ScenarioKind::RandomPhase => {
                match self.trials {
                    None => return Err(ConfigError::Missing("trials".into())),
                    Some(t) if t < 2 => return Err(ConfigError::invalid("trials", "at least 2")),
                    _ => {}
                }
                if self.seed.is_none() {
                    return Err(ConfigError::Missing("seed".into()));
                }
                if swept(SweepVariable::Phi) {
                    return Err(ConfigError::invalid("sweep", "phases are random in this scenario"));
                }
            }
            ScenarioKind::NumberState => match self.photons {
                None => return Err(ConfigError::Missing("photons".into())),
                Some(0) => return Err(ConfigError::invalid("photons", "at least 1")),
                _ => {}
            },
            ScenarioKind::CoherentState => {
                if self.alpha.is_none() {
                    return Err(ConfigError::Missing("alpha".into()));
                }
                if self.cutoff == Some(0) {
                    return Err(ConfigError::invalid("cutoff", "at least 1"));
                }
            }
            ScenarioKind::AtomicEquivalence => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_basic_spec() {
        let spec = ScenarioSpec::from_config_str(
            "# dephasing run\nscenario = dephasing\nkappa1 = 1\nkappa2 = 1  # equal\nt = 1\nn_list = 100, 1000\nphi_pi = 1.0\n",
        )
        .unwrap();
        assert_eq!(spec.scenario, ScenarioKind::Dephasing);
        assert_eq!(spec.n_list, vec![100, 1000]);
        assert!((spec.phi - PI).abs() < 1e-15);
        assert_eq!(spec.format, OutputFormat::Csv);
    }

    #[test]
    fn kappa_theta_form() {
        let spec =
            ScenarioSpec::from_config_str("scenario = standard\nkappa = 2\ntheta_pi = 0.25\nt = 1\nn = 5\n").unwrap();
        assert!((spec.params.kappa1 - 2f64.sqrt()).abs() < 1e-15);
        assert!((spec.params.kappa2 - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn structured_errors_name_the_field() {
        let base = "kappa1 = 1\nkappa2 = 1\nt = 1\nn = 10\n";
        let err = |s: &str| ScenarioSpec::from_config_str(s).unwrap_err();
        assert_eq!(err(base), ConfigError::Missing("scenario".into()));
        assert_eq!(err(&format!("scenario = random_phase\n{base}seed = 1\n")), ConfigError::Missing("trials".into()));
        assert_eq!(err(&format!("scenario = random_phase\n{base}trials = 5\n")), ConfigError::Missing("seed".into()));
        assert_eq!(err(&format!("scenario = number_state\n{base}")), ConfigError::Missing("photons".into()));
        assert_eq!(err(&format!("scenario = coherent_state\n{base}")), ConfigError::Missing("alpha".into()));
        assert_eq!(err(&format!("scenario = detuning\n{base}")), ConfigError::Missing("delta".into()));
        assert!(
            matches!(err(&format!("scenario = standard\n{base}phi = 1\n")), ConfigError::Invalid { key, .. } if key == "phi")
        );
        assert!(
            matches!(err(&format!("scenario = nope\n{base}")), ConfigError::Invalid { key, .. } if key == "scenario")
        );
        assert_eq!(err(&format!("scenario = standard\n{base}bogus = 1\n")), ConfigError::UnknownKey("bogus".into()));
        assert_eq!(
            err(&format!("scenario = standard\n{base}t = 2\n")),
            ConfigError::Duplicate { line: 6, key: "t".into() }
        );
        assert_eq!(err("scenario standard\n"), ConfigError::Syntax { line: 1 });
        assert!(
            matches!(err(&format!("scenario = standard\n{base}sweep = omega\ngrid = 1\n")), ConfigError::Invalid { key, .. } if key == "sweep")
        );
        assert!(
            matches!(err("scenario = standard\nkappa1 = 0\nkappa2 = 0\nt = 1\nn = 3\n"), ConfigError::Invalid { key, .. } if key == "kappa1")
        );
    }

    #[test]
    fn sweep_grid_in_units_of_pi() {
        let spec = ScenarioSpec::from_config_str(
            "scenario = dephasing\nkappa1 = 1\nkappa2 = 1\nt = 1\nn = 10\nsweep = phi\ngrid_pi = 0, 0.5, 1\n",
        )
        .unwrap();
        let sweep = spec.sweep.unwrap();
        assert_eq!(sweep.variable, SweepVariable::Phi);
        assert_eq!(sweep.grid, vec![0.0, 0.5 * PI, PI]);
    }
}
