use std::path::{Path, PathBuf};

use gapdeph::spectral::{GapSpec, Profile, QubitParams, SpectralModel, DEFAULT_SERIES_ORDER};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Fully resolved run configuration. Field order here fixes the digest.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub model: ModelBlock,
    pub qubit: QubitBlock,
    pub numerics: NumericsBlock,
    pub output: OutputBlock,
    pub sweep: SweepBlock,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelBlock {
    pub omega_g: f64,
    pub omega_s: f64,
    pub series_order: usize,
    pub profile: Profile,
}

// the profile keys sit flat inside [model]; serde cannot combine flatten with
// deny_unknown_fields, so the block is split by hand
impl ModelBlock {
    fn from_table(mut t: toml::Table) -> Result<Self, CliError> {
        let num = |t: &mut toml::Table, key: &str| -> Result<Option<f64>, CliError> {
            match t.remove(key) {
                None => Ok(None),
                Some(toml::Value::Float(x)) => Ok(Some(x)),
                Some(toml::Value::Integer(i)) => Ok(Some(i as f64)),
                Some(v) => Err(CliError::Config(format!("model.{key}: expected a number, got {v}"))),
            }
        };
        let omega_g = num(&mut t, "omega_g")?.ok_or_else(|| CliError::Config("model.omega_g: missing".into()))?;
        let omega_s = num(&mut t, "omega_s")?.unwrap_or(1.0);
        let series_order = match num(&mut t, "series_order")? {
            None => DEFAULT_SERIES_ORDER,
            Some(x) if x >= 1.0 && x.fract() == 0.0 => x as usize,
            Some(x) => return Err(CliError::Config(format!("model.series_order: must be a positive integer, got {x}"))),
        };
        let profile: Profile = toml::Value::Table(t)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(format!("model: {}", e.message())))?;
        Ok(ModelBlock {
            omega_g,
            omega_s,
            series_order,
            profile,
        })
    }

    pub fn build(&self) -> Result<SpectralModel, CliError> {
        let gap = GapSpec::new(self.omega_g, self.omega_s).map_err(config_field("model"))?;
        SpectralModel::with_order(gap, self.profile, self.series_order).map_err(config_field("model"))
    }
}

fn config_field(block: &'static str) -> impl Fn(gapdeph::Error) -> CliError {
    move |e| CliError::Config(format!("{block}: {e}"))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitBlock {
    #[serde(default)]
    pub s: f64,
    #[serde(default = "one")]
    pub omega0: f64,
    #[serde(default = "one")]
    pub t_corr: f64,
    #[serde(default = "one")]
    pub t_fact: f64,
}

impl Default for QubitBlock {
    fn default() -> Self {
        QubitBlock {
            s: 0.0,
            omega0: 1.0,
            t_corr: 1.0,
            t_fact: 1.0,
        }
    }
}

impl QubitBlock {
    pub fn build(&self) -> Result<QubitParams, CliError> {
        QubitParams::new(self.s, self.omega0, self.t_corr, self.t_fact).map_err(config_field("qubit"))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsBlock {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    /// Uniform grid step; the default grid is used when absent.
    pub grid_step: Option<f64>,
    #[serde(default = "default_eps0")]
    pub eps0: f64,
    /// Inclusive window index range; derived from the gap when absent.
    pub n_range: Option<(u64, u64)>,
    /// Scan step for sign intervals; `π/(32 ω_g)` when absent.
    pub resolution: Option<f64>,
}

impl Default for NumericsBlock {
    fn default() -> Self {
        NumericsBlock {
            tol: default_tol(),
            horizon: default_horizon(),
            grid_step: None,
            eps0: default_eps0(),
            n_range: None,
            resolution: None,
        }
    }
}

impl NumericsBlock {
    fn check(&self) -> Result<(), CliError> {
        let bad = |k: &str, v: f64| CliError::Config(format!("numerics.{k}: must be positive and finite, got {v}"));
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(CliError::Config(format!("numerics.tol: must lie in (0, 1), got {}", self.tol)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(bad("horizon", self.horizon));
        }
        if let Some(h) = self.grid_step.filter(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(bad("grid_step", h));
        }
        if let Some(r) = self.resolution.filter(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(bad("resolution", r));
        }
        if let Some((a, b)) = self.n_range.filter(|(a, b)| a > b) {
            return Err(CliError::Config(format!("numerics.n_range: start {a} exceeds end {b}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            dir: default_dir(),
            formats: default_formats(),
        }
    }
}

impl OutputBlock {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

/// Grid for the `sweep` command: every `alpha` crossed with every `t_fact`,
/// keeping the other model keys.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "default_t_facts")]
    pub t_facts: Vec<f64>,
}

impl Default for SweepBlock {
    fn default() -> Self {
        SweepBlock {
            alphas: default_alphas(),
            t_facts: default_t_facts(),
        }
    }
}

fn one() -> f64 {
    1.0
}
fn default_tol() -> f64 {
    gapdeph::dynamics::DEFAULT_TOL
}
fn default_horizon() -> f64 {
    50.0
}
fn default_eps0() -> f64 {
    0.3
}
fn default_dir() -> PathBuf {
    PathBuf::from("gapdeph-out")
}
fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}
fn default_alphas() -> Vec<f64> {
    vec![-0.5, 0.0, 0.5, 1.0, 2.0]
}
fn default_t_facts() -> Vec<f64> {
    vec![0.1, 1.0, 10.0]
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: toml::Table,
    #[serde(default)]
    qubit: QubitBlock,
    #[serde(default)]
    numerics: NumericsBlock,
    #[serde(default)]
    output: OutputBlock,
    #[serde(default)]
    sweep: SweepBlock,
}

/// Parses `key=value` where `key` is a dotted path and `value` a TOML value;
/// bare words are taken as strings.
fn parse_override(arg: &str) -> Result<(Vec<String>, toml::Value), CliError> {
    let (key, raw) = arg
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("--set {arg}: expected key=value")))?;
    let path: Vec<String> = key.trim().split('.').map(str::to_owned).collect();
    if path.iter().any(String::is_empty) {
        return Err(CliError::Config(format!("--set {arg}: empty key segment")));
    }
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_owned()));
    Ok((path, value))
}

fn apply_override(root: &mut toml::Table, path: &[String], value: toml::Value) -> Result<(), CliError> {
    let (last, parents) = path.split_last().expect("non-empty path");
    let mut cur = root;
    for p in parents {
        let entry = cur
            .entry(p.clone())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("--set {}: {p} is not a table", path.join("."))))?;
    }
    cur.insert(last.clone(), value);
    Ok(())
}

impl RunConfig {
    /// Reads `path` (or starts empty), applies `--set` overrides, then fills defaults.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut root: toml::Table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                text.parse()
                    .map_err(|e: toml::de::Error| CliError::Config(format!("{}: {}", p.display(), e.message())))?
            }
            None => toml::Table::new(),
        };
        for o in overrides {
            let (path, value) = parse_override(o)?;
            apply_override(&mut root, &path, value)?;
        }
        Self::from_table(root)
    }

    pub fn from_table(root: toml::Table) -> Result<Self, CliError> {
        let raw: RawConfig = toml::Value::Table(root)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.message().to_owned()))?;
        let cfg = RunConfig {
            model: ModelBlock::from_table(raw.model)?,
            qubit: raw.qubit,
            numerics: raw.numerics,
            output: raw.output,
            sweep: raw.sweep,
        };
        cfg.numerics.check()?;
        cfg.model.build()?;
        cfg.qubit.build()?;
        Ok(cfg)
    }

    /// SHA-256 of the canonical JSON form, excluding the output block so the
    /// same physics in a different directory has the same digest.
    pub fn digest(&self) -> String {
        #[derive(Serialize)]
        struct Canon<'a> {
            model: &'a ModelBlock,
            qubit: &'a QubitBlock,
            numerics: &'a NumericsBlock,
            sweep: &'a SweepBlock,
        }
        let canon = serde_json::to_vec(&Canon {
            model: &self.model,
            qubit: &self.qubit,
            numerics: &self.numerics,
            sweep: &self.sweep,
        })
        .expect("config serializes");
        let hash = Sha256::digest(&canon);
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, sets: &[&str]) -> Result<RunConfig, CliError> {
        let mut root: toml::Table = text.parse().unwrap();
        for s in sets {
            let (p, v) = parse_override(s).unwrap();
            apply_override(&mut root, &p, v).unwrap();
        }
        RunConfig::from_table(root)
    }

    const BASE: &str = "[model]\nfamily = \"exp_cutoff\"\nalpha = 0.5\nomega_g = 1.0\n";

    #[test]
    fn defaults_fill_in() {
        let c = parse(BASE, &[]).unwrap();
        assert_eq!(c.model.omega_s, 1.0);
        assert_eq!(c.model.series_order, DEFAULT_SERIES_ORDER);
        assert_eq!(c.numerics.eps0, 0.3);
        assert_eq!(c.qubit.t_fact, 1.0);
        assert_eq!(c.model.profile.alpha(), 0.5);
    }

    #[test]
    fn overrides_take_precedence() {
        let c = parse(BASE, &["model.alpha=2", "qubit.t_fact=10", "output.formats=[\"csv\"]"]).unwrap();
        assert_eq!(c.model.profile.alpha(), 2.0);
        assert_eq!(c.qubit.t_fact, 10.0);
        assert_eq!(c.output.formats, vec![Format::Csv]);
    }

    #[test]
    fn unknown_keys_are_named() {
        let e = parse(BASE, &["model.alhpa=1"]).unwrap_err().to_string();
        assert!(e.contains("alhpa"), "{e}");
        let e = parse(BASE, &["numerics.tolerance=1e-8"]).unwrap_err().to_string();
        assert!(e.contains("tolerance"), "{e}");
        let e = parse(BASE, &["extra.x=1"]).unwrap_err().to_string();
        assert!(e.contains("extra"), "{e}");
    }

    #[test]
    fn invalid_values_are_named() {
        let e = parse(BASE, &["model.omega_g=-1"]).unwrap_err().to_string();
        assert!(e.contains("omega_g"), "{e}");
        let e = parse(BASE, &["qubit.s=2"]).unwrap_err().to_string();
        assert!(e.contains("qubit") && e.contains('s'), "{e}");
        let e = parse(BASE, &["numerics.horizon=0"]).unwrap_err().to_string();
        assert!(e.contains("horizon"), "{e}");
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let a = parse(BASE, &[]).unwrap().digest();
        assert_eq!(a, parse(BASE, &["output.dir=elsewhere"]).unwrap().digest());
        assert_ne!(a, parse(BASE, &["model.alpha=0.25"]).unwrap().digest());
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn bare_words_become_strings() {
        let (p, v) = parse_override("model.family=hard_cutoff").unwrap();
        assert_eq!(p, vec!["model", "family"]);
        assert_eq!(v.as_str(), Some("hard_cutoff"));
        assert!(parse_override("novalue").is_err());
    }
}
