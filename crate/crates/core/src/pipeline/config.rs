//! Run configuration: defaults, then a config file, then `RAMSEY_*`
//! environment variables, then whatever the caller sets last.
//!
//! The file may be TOML or plain `key = value` lines with unquoted values.
//! Every key has an environment twin: `class_dir` is `RAMSEY_CLASS_DIR`.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{Engine, RunContext, Scale, Target};
use crate::catalog::ClassStore;
use crate::enumerator::{AdjunctSequence, Direction, EnumerateOptions};
use crate::error::{Error, Result};
use crate::sat::backend::{External, InProcess, SatBackend};

pub const KEYS: &[&str] = &[
    "class_dir",
    "solver",
    "solver_timeout",
    "workers",
    "scale",
    "seed",
    "adjunct_sequence",
    "direction",
    "run_dir",
    "engine",
    "target",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub class_dir: PathBuf,
    /// External DIMACS solver; the linked-in solver when unset.
    pub solver: Option<PathBuf>,
    /// Seconds per solver call.
    pub solver_timeout: Option<u64>,
    /// Worker threads; all cores when unset.
    pub workers: Option<usize>,
    pub scale: Scale,
    pub seed: u64,
    pub adjunct_sequence: AdjunctSequence,
    pub direction: Direction,
    pub run_dir: Option<PathBuf>,
    /// Overrides the per-case default engine.
    pub engine: Option<Engine>,
    pub target: Target,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            class_dir: PathBuf::from("classes"),
            solver: None,
            solver_timeout: None,
            workers: None,
            scale: Scale::Desk,
            seed: 0,
            adjunct_sequence: AdjunctSequence::default(),
            direction: Direction::Auto,
            run_dir: None,
            engine: None,
            target: Target::J6_K4,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("bad value `{value}` for `{key}`")))
}

fn optional(value: &str) -> Option<&str> {
    let v = value.trim();
    (!v.is_empty() && v != "none").then_some(v)
}

impl Config {
    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "class_dir" => self.class_dir = PathBuf::from(v),
            "solver" => self.solver = optional(v).map(PathBuf::from),
            "solver_timeout" => self.solver_timeout = optional(v).map(|x| parse(key, x)).transpose()?,
            "workers" => self.workers = optional(v).map(|x| parse(key, x)).transpose()?,
            "scale" => self.scale = v.parse().map_err(|e: Error| Error::Config(e.to_string()))?,
            "seed" => self.seed = parse(key, v)?,
            "adjunct_sequence" => {
                self.adjunct_sequence = v.parse().map_err(|e: Error| Error::Config(e.to_string()))?
            }
            "direction" => self.direction = v.parse().map_err(|e: Error| Error::Config(e.to_string()))?,
            "run_dir" => self.run_dir = optional(v).map(PathBuf::from),
            "engine" => {
                self.engine = optional(v).map(str::parse).transpose().map_err(|e: Error| Error::Config(e.to_string()))?
            }
            "target" => self.target = v.parse().map_err(|e: Error| Error::Config(e.to_string()))?,
            _ => return Err(Error::Config(format!("unknown key `{key}` (known: {})", KEYS.join(", ")))),
        }
        Ok(())
    }

    /// Applies a config file's text. TOML is tried first, then `key = value` lines.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let pairs: Vec<(String, String)> = match text.parse::<toml::Table>() {
            Ok(table) => table
                .into_iter()
                .map(|(k, v)| {
                    let s = match v {
                        toml::Value::String(s) => s,
                        toml::Value::Array(a) => {
                            a.iter().map(|x| x.to_string().trim_matches('"').to_string()).collect::<Vec<_>>().join(",")
                        }
                        other => other.to_string(),
                    };
                    (k, s)
                })
                .collect(),
            Err(_) => {
                let mut out = Vec::new();
                for (no, line) in text.lines().enumerate() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') || line.starts_with(';') || line.starts_with('[') {
                        continue;
                    }
                    let (k, v) = line
                        .split_once('=')
                        .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", no + 1)))?;
                    out.push((k.trim().to_string(), v.trim().trim_matches('"').to_string()));
                }
                out
            }
        };
        for (k, v) in pairs {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_text(&text)
    }

    /// Applies every `RAMSEY_<KEY>` variable found by `lookup`.
    pub fn apply_env_with(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<()> {
        for key in KEYS {
            if let Some(v) = lookup(&format!("RAMSEY_{}", key.to_uppercase())) {
                self.set(key, &v)?;
            }
        }
        Ok(())
    }

    pub fn apply_env(&mut self) -> Result<()> {
        self.apply_env_with(|k| std::env::var(k).ok())
    }

    /// Defaults, then `file` (or `RAMSEY_CONFIG`), then the environment.
    pub fn load(file: Option<&Path>) -> Result<Self> {
        let mut c = Config::default();
        let from_env = std::env::var_os("RAMSEY_CONFIG").map(PathBuf::from);
        if let Some(p) = file.map(Path::to_path_buf).or(from_env) {
            c.apply_file(&p)?;
        }
        c.apply_env()?;
        Ok(c)
    }

    pub fn backend(&self) -> Arc<dyn SatBackend> {
        match &self.solver {
            Some(p) => {
                let mut e = External::new(p);
                e.timeout = self.solver_timeout.map(Duration::from_secs);
                Arc::new(e)
            }
            None => Arc::new(InProcess),
        }
    }

    pub fn enumerate_options(&self) -> EnumerateOptions {
        EnumerateOptions { direction: self.direction, seq: self.adjunct_sequence.clone(), ..Default::default() }
    }

    pub fn context(&self) -> RunContext {
        RunContext {
            store: Some(ClassStore::new(&self.class_dir)),
            build_missing: true,
            enumerate: self.enumerate_options(),
            backend: self.backend(),
            seed: self.seed,
            run_dir: self.run_dir.clone(),
            chunk: 64,
        }
    }
}
