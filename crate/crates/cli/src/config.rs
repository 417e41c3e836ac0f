//! Run configuration: command-line flags layered over an optional
//! `key = value` file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use freedom::exact::{format_rational, parse_rational, Rational};
use freedom::lattice::NewtonOptions;
use freedom::varieties::{EpsRounding, VarietyDescriptor};
use serde_json::json;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "both" => Ok(Self::Both),
            _ => Err(format!("format must be csv, json or both, got {s:?}")),
        }
    }

    pub fn csv(self) -> bool {
        self != Self::Json
    }

    pub fn json(self) -> bool {
        self != Self::Csv
    }
}

/// Raw string settings before validation; later layers override earlier.
#[derive(Debug, Clone, Default)]
pub struct Settings(pub BTreeMap<String, String>);

pub const KEYS: &[&str] = &["variety", "point", "lattice", "input", "bounds", "alpha", "eps_rounding", "workers", "out", "format", "rank_cap"];

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut m = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
            let k = k.trim().replace('-', "_");
            if !KEYS.contains(&k.as_str()) {
                return Err(format!("config line {}: unknown key {k:?}", i + 1));
            }
            m.insert(k, v.trim().to_string());
        }
        Ok(Self(m))
    }

    pub fn set(&mut self, key: &str, value: Option<String>) {
        if let Some(v) = value {
            self.0.insert(key.to_string(), v);
        }
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str, String> {
        self.get(key).ok_or_else(|| format!("missing --{}", key.replace('_', "-")))
    }
}

/// Validated configuration shared by the subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub subcommand: String,
    pub settings: Settings,
    pub workers: usize,
    pub out: PathBuf,
    pub format: Format,
    pub rank_cap: usize,
    pub alpha: Rational,
    pub rounding: EpsRounding,
}

impl RunConfig {
    pub fn new(subcommand: &str, settings: Settings) -> Result<Self, String> {
        let workers = match settings.get("workers") {
            Some(w) => w.parse::<usize>().ok().filter(|&w| w >= 1).ok_or_else(|| format!("workers must be a positive integer, got {w:?}"))?,
            None => 1,
        };
        let rank_cap = match settings.get("rank_cap") {
            Some(r) => r.parse::<usize>().ok().filter(|&r| r >= 1).ok_or_else(|| format!("rank cap must be a positive integer, got {r:?}"))?,
            None => NewtonOptions::default().rank_cap,
        };
        let alpha = parse_rational(settings.get("alpha").unwrap_or("1/2")).map_err(|e| e.to_string())?;
        let rounding = EpsRounding::parse(settings.get("eps_rounding").unwrap_or("in")).map_err(|e| e.to_string())?;
        let format = Format::parse(settings.get("format").unwrap_or("both"))?;
        let out = PathBuf::from(settings.get("out").unwrap_or("."));
        Ok(Self { subcommand: subcommand.to_string(), settings, workers, out, format, rank_cap, alpha, rounding })
    }

    pub fn options(&self) -> NewtonOptions {
        NewtonOptions { rank_cap: self.rank_cap, ..NewtonOptions::default() }
    }

    pub fn variety(&self) -> Result<VarietyDescriptor, String> {
        VarietyDescriptor::resolve(self.settings.require("variety")?).map_err(|e| e.to_string())
    }

    pub fn require(&self, key: &str) -> Result<&str, String> {
        self.settings.require(key)
    }

    /// Strictly increasing grid of bounds `>= 1`.
    pub fn bounds(&self) -> Result<Vec<Rational>, String> {
        let raw = self.settings.require("bounds")?;
        let grid = raw.split(',').map(|t| parse_rational(t.trim()).map_err(|e| e.to_string())).collect::<Result<Vec<_>, _>>()?;
        if grid.is_empty() {
            return Err("empty bound grid".into());
        }
        if grid.iter().any(|b| b < &Rational::from_integer(1.into())) {
            return Err("bounds must be at least 1".into());
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err("bounds must be strictly increasing".into());
        }
        Ok(grid)
    }

    /// Settings that determine the output; worker count, output directory
    /// and format are excluded so they cannot change the bytes written.
    fn canonical(&self) -> BTreeMap<String, String> {
        let mut m: BTreeMap<String, String> = self.settings.0.iter().filter(|(k, _)| !matches!(k.as_str(), "workers" | "out" | "format")).map(|(k, v)| (k.clone(), v.clone())).collect();
        m.insert("subcommand".into(), self.subcommand.clone());
        m.insert("alpha".into(), format_rational(&self.alpha));
        m.insert("eps_rounding".into(), self.rounding.as_str().into());
        m.insert("rank_cap".into(), self.rank_cap.to_string());
        if let Ok(v) = self.variety() {
            m.insert("variety".into(), v.to_json().to_string());
        }
        m
    }

    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.canonical() {
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
            h.update(b"\n");
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn provenance(&self) -> serde_json::Value {
        let opts = self.options();
        json!({
            "tool": "freedom",
            "version": env!("CARGO_PKG_VERSION"),
            "git_describe": env!("FREEDOM_GIT_DESCRIBE"),
            "config_hash": self.hash(),
            "config": self.canonical(),
            "search": {"rank_cap": opts.rank_cap, "bound_scale": format_rational(&opts.bound_scale)},
        })
    }
}
