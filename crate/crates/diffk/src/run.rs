//! Run configurations and the dispatcher behind the `diffk` binary.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Deserialize;

use crate::report::Report;
use crate::{commands, suite, Error, RESOLUTION_ENV};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Pairing,
    Zn,
    CsCheck,
    Adiabatic,
    Eta,
    Pushforward,
    Suite,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Pairing => "pairing",
            Self::Zn => "zn",
            Self::CsCheck => "cs-check",
            Self::Adiabatic => "adiabatic",
            Self::Eta => "eta",
            Self::Pushforward => "pushforward",
            Self::Suite => "suite",
        }
    }

    /// Tolerance keys the command reads, with their defaults.
    pub fn default_tolerances(self) -> &'static [(&'static str, f64)] {
        match self {
            Self::Pairing => &[("angle", 1e-6), ("filling", 1e-6)],
            Self::Zn => &[("order", 1e-6), ("deformation", 1e-6), ("bounding", 1e-6)],
            // `closure` multiplies h²; `period` bounds the integrality gap.
            Self::CsCheck => &[("closure", 10.0), ("product", 1e-6), ("period", 1e-6)],
            Self::Adiabatic => &[("certificate", 1e-10), ("scaling", 1e-10)],
            Self::Eta => &[("eta", 1e-4), ("aps", 1e-4)],
            Self::Pushforward => &[("agreement", 1e-6), ("projection", 1e-6), ("oracle", 1e-4)],
            Self::Suite => &[],
        }
    }
}

/// One invocation. Every field may come from a TOML file or from flags;
/// flags win.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    /// Catalog name such as `disk2_flat(0.25)` or `hopf`.
    pub catalog: Option<String>,
    /// Geometry config file, relative to the run config.
    pub geometry: Option<PathBuf>,
    /// Two connection names of the geometry for `cs-check`.
    pub connections: Option<[String; 2]>,
    pub resolution: Option<usize>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    /// Report directory; nothing is written without one.
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    /// Holonomy parameters for `pairing`, `eta` and `pushforward`.
    #[serde(default)]
    pub a: Vec<f64>,
    pub n: Option<usize>,
    pub k: Option<i64>,
    pub lmax: Option<usize>,
    pub steps: Option<usize>,
    /// Suite criteria to run; empty means all of them.
    #[serde(default)]
    pub only: Vec<usize>,
    /// Adds the APS comparison to `eta`.
    #[serde(default)]
    pub aps: bool,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Reads a config file; a relative `geometry` path is resolved against
    /// the file's directory.
    pub fn from_file(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut config = Self::from_toml(&text).map_err(|e| e.in_file(path))?;
        if let (Some(g), Some(dir)) = (&config.geometry, path.parent()) {
            if g.is_relative() {
                config.geometry = Some(dir.join(g));
            }
        }
        Ok(config)
    }

    pub fn command(&self) -> Result<Command, Error> {
        self.command.ok_or_else(|| Error::Field { path: "command".into(), message: "no command given".into() })
    }

    /// The resolution override, else the environment default, else `None`.
    pub fn resolution(&self) -> Result<Option<usize>, Error> {
        if self.resolution.is_some() {
            return Ok(self.resolution);
        }
        match std::env::var(RESOLUTION_ENV) {
            Ok(v) => v.trim().parse().map(Some).map_err(|_| Error::Field {
                path: RESOLUTION_ENV.into(),
                message: format!("expected a node count, got `{v}`"),
            }),
            Err(_) => Ok(None),
        }
    }

    /// Checks tolerance keys against the command and their values for
    /// positivity.
    pub fn validate(&self) -> Result<(), Error> {
        let command = self.command()?;
        let known = command.default_tolerances();
        for (key, &value) in &self.tolerances {
            if !known.iter().any(|(k, _)| k == key) {
                let names: Vec<_> = known.iter().map(|(k, _)| *k).collect();
                return Err(Error::Field {
                    path: format!("tolerances.{key}"),
                    message: format!("`{}` reads no such tolerance (known: {})", command.name(), names.join(", ")),
                });
            }
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Field { path: format!("tolerances.{key}"), message: format!("must be positive, got {value}") });
            }
        }
        if self.resolution == Some(0) {
            return Err(Error::Field { path: "resolution".into(), message: "must be positive".into() });
        }
        if self.lmax == Some(0) {
            return Err(Error::Field { path: "lmax".into(), message: "must be positive".into() });
        }
        if let Some(&c) = self.only.iter().find(|&&c| !(1..=suite::CRITERIA).contains(&c)) {
            return Err(Error::Field { path: "only".into(), message: format!("no criterion {c}") });
        }
        Ok(())
    }

    /// The tolerance under `key`: the override, else the command default.
    pub fn tolerance(&self, key: &str) -> f64 {
        self.tolerances.get(key).copied().unwrap_or_else(|| {
            let defaults = self.command.map_or(&[][..], Command::default_tolerances);
            defaults.iter().find(|(k, _)| *k == key).map_or_else(|| panic!("no default tolerance `{key}`"), |(_, v)| *v)
        })
    }
}

/// Validates `config`, runs its command and writes the report if an output
/// directory is set.
pub fn run(config: &RunConfig) -> Result<Report, Error> {
    config.validate()?;
    let report = match config.command()? {
        Command::Pairing => commands::pairing(config)?,
        Command::Zn => commands::zn(config)?,
        Command::CsCheck => commands::cs_check(config)?,
        Command::Adiabatic => commands::adiabatic(config)?,
        Command::Eta => commands::eta(config)?,
        Command::Pushforward => commands::pushforward(config)?,
        Command::Suite => suite::run(config)?,
    };
    if let Some(dir) = &config.output {
        report.write(dir)?;
    }
    Ok(report)
}
