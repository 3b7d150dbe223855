//! JSON configuration and the parsers shared by flags and config values.

use std::path::{Path, PathBuf};

use scarlab_core::dynamics::{InitialState, NoiseModel, Observable};
use scarlab_core::pvbs::{preset, GeneratorCoeffs, PRESET_NAMES};
use scarlab_core::C64;
use serde::{Deserialize, Serialize};

use crate::args::PrepSource;
use crate::{CliError, CliResult};

/// `g` as a real scalar or an `[re, im]` pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GValue {
    Real(f64),
    Pair([f64; 2]),
}

impl GValue {
    pub fn to_c64(self) -> C64 {
        match self {
            Self::Real(x) => C64::new(x, 0.0),
            Self::Pair([re, im]) => C64::new(re, im),
        }
    }

    pub fn from_c64(g: C64) -> Self {
        if g.im == 0.0 {
            Self::Real(g.re)
        } else {
            Self::Pair([g.re, g.im])
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GensPair {
    pub even: GeneratorCoeffs,
    pub odd: GeneratorCoeffs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GensValue {
    Preset(String),
    Explicit(GensPair),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseValue {
    Named(String),
    Model(NoiseModel),
}

/// Every field is optional; flags fill or override them.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<GValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prep: Option<PrepSource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gens: Option<GensValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observables: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verbosity: Option<u8>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl CliConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every present field without running anything.
    pub fn validate(&self) -> CliResult<()> {
        if let Some(n) = self.n {
            check_chain_length(n)?;
        }
        if let Some(g) = self.g {
            check_g(g.to_c64())?;
        }
        if let Some(gens) = &self.gens {
            gens_from_value(gens)?;
        }
        if let Some(noise) = &self.noise {
            noise_from_value(noise)?;
        }
        if let Some(obs) = &self.observables {
            parse_observables(obs)?;
        }
        if let Some(init) = &self.init {
            parse_init(init, self.phi.unwrap_or(0.0), self.prep)?;
        }
        if let Some(phi) = self.phi {
            if !phi.is_finite() {
                return Err(config_err("phi must be finite"));
            }
        }
        if let Some(id) = &self.run_id {
            check_run_id(id)?;
        }
        Ok(())
    }
}

pub fn check_chain_length(n: usize) -> CliResult<()> {
    if n < 4 || n % 2 != 0 {
        return Err(config_err(format!("n must be even and at least 4, got {n}")));
    }
    Ok(())
}

pub fn check_run_id(id: &str) -> CliResult<()> {
    let ok = !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c));
    if !ok {
        return Err(config_err(format!("run id `{id}` may only use letters, digits, `-`, `_` and `.`")));
    }
    Ok(())
}

fn check_g(g: C64) -> CliResult<C64> {
    if !g.re.is_finite() || !g.im.is_finite() {
        return Err(config_err("g must be finite"));
    }
    if g == C64::new(0.0, 0.0) {
        return Err(config_err("g = 0 is the East limit and is not available as a model parameter"));
    }
    Ok(g)
}

fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let (p, q) = (p.trim().parse::<f64>().ok()?, q.trim().parse::<f64>().ok()?);
        return (q != 0.0).then_some(p / q);
    }
    s.parse().ok()
}

/// `1.5`, `2/3` or `re,im`.
pub fn parse_g(s: &str) -> CliResult<C64> {
    let bad = || config_err(format!("cannot read g from `{s}` (expected x, p/q or re,im)"));
    let g = match s.split_once(',') {
        Some((re, im)) => C64::new(parse_real(re).ok_or_else(bad)?, parse_real(im).ok_or_else(bad)?),
        None => C64::new(parse_real(s).ok_or_else(bad)?, 0.0),
    };
    check_g(g)
}

fn gens_from_value(v: &GensValue) -> CliResult<(GeneratorCoeffs, GeneratorCoeffs)> {
    match v {
        GensValue::Preset(name) => preset(name).ok_or_else(|| {
            config_err(format!("unknown generator preset `{name}` (known: {})", PRESET_NAMES.join(", ")))
        }),
        GensValue::Explicit(p) => {
            for c in [p.even, p.odd] {
                if ![c.a, c.b, c.c.re, c.c.im].iter().all(|x| x.is_finite()) {
                    return Err(config_err("generator coefficients must be finite"));
                }
            }
            Ok((p.even, p.odd))
        }
    }
}

/// A flag value: preset name, inline JSON object or path to a JSON file.
pub fn parse_gens_flag(s: &str) -> CliResult<GensValue> {
    let s = s.trim();
    let v = if s.starts_with('{') {
        serde_json::from_str::<GensPair>(s)
            .map(GensValue::Explicit)
            .map_err(|e| config_err(format!("--gens: {e}")))?
    } else if preset(s).is_some() {
        GensValue::Preset(s.to_string())
    } else if Path::new(s).is_file() {
        let text = std::fs::read_to_string(s).map_err(|e| config_err(format!("{s}: {e}")))?;
        serde_json::from_str::<GensValue>(&text).map_err(|e| config_err(format!("{s}: {e}")))?
    } else {
        GensValue::Preset(s.to_string())
    };
    gens_from_value(&v)?;
    Ok(v)
}

pub fn noise_from_value(v: &NoiseValue) -> CliResult<Option<NoiseModel>> {
    let model = match v {
        NoiseValue::Named(s) => parse_noise(s)?,
        NoiseValue::Model(m) => Some(*m),
    };
    if let Some(m) = &model {
        m.validate().map_err(|e| config_err(e.to_string()))?;
    }
    Ok(model)
}

/// `device`, `none` or `p1,p2,p_spam`.
pub fn parse_noise(s: &str) -> CliResult<Option<NoiseModel>> {
    match s.trim() {
        "none" => Ok(None),
        "device" => Ok(Some(NoiseModel::DEVICE)),
        other => {
            let parts: Vec<f64> = other
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| config_err(format!("cannot read noise `{other}` (expected device, none or p1,p2,p_spam)")))?;
            let [p1, p2, p_spam] = parts[..] else {
                return Err(config_err(format!("noise `{other}` needs three rates")));
            };
            let m = NoiseModel { p1, p2, p_spam };
            m.validate().map_err(|e| config_err(e.to_string()))?;
            Ok(Some(m))
        }
    }
}

pub fn parse_observables(names: &[String]) -> CliResult<Vec<Observable>> {
    names
        .iter()
        .map(|s| s.trim().parse::<Observable>().map_err(|e| config_err(e.to_string())))
        .collect()
}

/// `vacuum`, `ones`, `left`, `boundary` or `a<k>`.
pub fn parse_init(s: &str, phi: f64, prep: Option<PrepSource>) -> CliResult<InitialState> {
    let s = s.trim();
    let state = match s {
        "vacuum" => InitialState::Vacuum,
        "ones" => InitialState::Ones,
        "left" => InitialState::LeftEdge,
        "boundary" => InitialState::Boundary,
        _ => {
            let k = s
                .strip_prefix('a')
                .map(|r| r.trim_start_matches(':'))
                .and_then(|r| r.parse::<usize>().ok())
                .ok_or_else(|| config_err(format!("unknown initial state `{s}` (expected vacuum, ones, left, boundary or a<k>)")))?;
            return Ok(match prep {
                None => InitialState::Aqmbs { k, phi },
                Some(p) => InitialState::Prepared { k, phi, fixture: p == PrepSource::Fixture },
            });
        }
    };
    if prep.is_some() {
        return Err(config_err("--prep applies to a<k> initial states only"));
    }
    Ok(state)
}

/// Flag if given, else config value, else default.
pub fn pick<T: Clone>(flag: Option<T>, cfg: &Option<T>, default: T) -> T {
    flag.or_else(|| cfg.clone()).unwrap_or(default)
}

/// Resolved `(g, even, odd, gens echo)` for model-building commands.
pub fn resolve_model(
    g_flag: Option<&str>,
    gens_flag: Option<&str>,
    cfg: &CliConfig,
) -> CliResult<(C64, GeneratorCoeffs, GeneratorCoeffs, GensValue)> {
    let g = match g_flag {
        Some(s) => parse_g(s)?,
        None => check_g(cfg.g.map_or(C64::new(1.0, 0.0), GValue::to_c64))?,
    };
    let gens = match gens_flag {
        Some(s) => parse_gens_flag(s)?,
        None => cfg.gens.clone().unwrap_or_else(|| GensValue::Preset("paper".into())),
    };
    let (even, odd) = gens_from_value(&gens)?;
    Ok((g, even, odd, gens))
}
