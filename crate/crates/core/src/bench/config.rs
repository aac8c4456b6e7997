use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::agglomeration::DEFAULT_TARGETS;
use crate::error::{Error, Result};
use crate::solver::{CycleKind, DEFAULT_SEED, DROP_TOL, MAX_FILL};
use crate::transfer::CoarseMode;

/// Where the fine meshes of a benchmark come from.
#[derive(Clone, Debug, PartialEq)]
pub enum MeshSource {
    /// Structured unit-square triangulations, one per subdivision count.
    Structured(Vec<usize>),
    /// Triangle-format pairs given by their common base path
    /// (`<base>.node`, `<base>.ele`).
    Triangle(Vec<PathBuf>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub meshes: MeshSource,
    /// Depths used by the V- and W-cycle rows; two-level rows always use 2.
    pub levels: Vec<usize>,
    /// Agglomeration targets per coarsening step, the last one repeating.
    pub target_children: Vec<usize>,
    pub cycles: Vec<CycleKind>,
    pub nu: Vec<usize>,
    pub modes: Vec<CoarseMode>,
    pub tol: f64,
    pub max_iter: usize,
    pub out: PathBuf,
    pub seed: u64,
    pub baselines: bool,
    pub drop_tol: f64,
    pub max_fill: usize,
    /// Record wall-clock times; off by default so the CSV is reproducible.
    pub timing: bool,
    pub study_n: Vec<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            meshes: MeshSource::Structured(vec![16, 23, 31, 44]),
            levels: vec![3, 4],
            target_children: DEFAULT_TARGETS.to_vec(),
            cycles: vec![CycleKind::TwoLevel, CycleKind::W, CycleKind::V],
            nu: vec![2, 4, 6, 8],
            modes: vec![CoarseMode::Inherited, CoarseMode::NonInherited],
            tol: 1e-8,
            max_iter: 200,
            out: PathBuf::from("results"),
            seed: DEFAULT_SEED,
            baselines: true,
            drop_tol: DROP_TOL,
            max_fill: MAX_FILL,
            timing: false,
            study_n: vec![4, 8, 16, 32],
        }
    }
}

pub const KEYS: [&str; 16] = [
    "mesh_sets",
    "triangle_meshes",
    "levels",
    "target_children",
    "cycles",
    "nu",
    "modes",
    "tol",
    "max_iter",
    "out",
    "seed",
    "baselines",
    "drop_tol",
    "max_fill",
    "timing",
    "study_n",
];

impl BenchConfig {
    /// Reads a `key = value` file on top of the defaults. Blank lines and
    /// text after `#` are ignored.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut cfg = BenchConfig::default();
        cfg.apply_text(&text, path)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str, origin: &Path) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: String| Error::Parse {
                path: origin.to_path_buf(),
                line: i + 1,
                msg,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected `key = value`, got `{line}`")))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| parse_err(e.to_string()))?;
        }
        Ok(())
    }

    /// Sets one key from its textual value; command-line flags go through
    /// the same path as config file lines.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "mesh_sets" => self.meshes = MeshSource::Structured(parse_list(key, value)?),
            "triangle_meshes" => {
                self.meshes = MeshSource::Triangle(split_list(value).map(PathBuf::from).collect())
            }
            "levels" => self.levels = parse_list(key, value)?,
            "target_children" => self.target_children = parse_list(key, value)?,
            "cycles" => self.cycles = parse_list(key, value)?,
            "nu" => self.nu = parse_list(key, value)?,
            "modes" => self.modes = parse_list(key, value)?,
            "tol" => self.tol = parse_one(key, value)?,
            "max_iter" => self.max_iter = parse_one(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "seed" => self.seed = parse_one(key, value)?,
            "baselines" => self.baselines = parse_one(key, value)?,
            "drop_tol" => self.drop_tol = parse_one(key, value)?,
            "max_fill" => self.max_fill = parse_one(key, value)?,
            "timing" => self.timing = parse_one(key, value)?,
            "study_n" => self.study_n = parse_list(key, value)?,
            other => {
                return Err(Error::Config(format!(
                    "unknown key `{other}` (expected one of {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let empty = |what: &str| Err(Error::Config(format!("{what} list is empty")));
        match &self.meshes {
            MeshSource::Structured(n) if n.is_empty() => return empty("mesh set"),
            MeshSource::Triangle(p) if p.is_empty() => return empty("mesh set"),
            MeshSource::Structured(n) if n.contains(&0) => {
                return Err(Error::Config("mesh subdivisions must be positive".into()))
            }
            _ => {}
        }
        if self.cycles.is_empty() {
            return empty("cycle");
        }
        if self.nu.is_empty() {
            return empty("nu");
        }
        if self.modes.is_empty() {
            return empty("mode");
        }
        if self.target_children.is_empty() {
            return empty("target_children");
        }
        if self.cycles.iter().any(|&c| c != CycleKind::TwoLevel) && self.levels.is_empty() {
            return empty("levels");
        }
        if let Some(&j) = self.levels.iter().find(|&&j| j < 2) {
            return Err(Error::Config(format!("levels must be at least 2, got {j}")));
        }
        if self.nu.contains(&0) {
            return Err(Error::Config("nu must be at least 1".into()));
        }
        if self.target_children.iter().any(|&t| t < 2) {
            return Err(Error::Config(
                "target_children entries must be at least 2".into(),
            ));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::Config("tol and max_iter must be positive".into()));
        }
        if !(self.drop_tol >= 0.0) {
            return Err(Error::Config("drop_tol must be non-negative".into()));
        }
        Ok(())
    }

    /// Deepest hierarchy any row needs.
    pub fn max_levels(&self) -> usize {
        let mut j = 2;
        if self.cycles.iter().any(|&c| c != CycleKind::TwoLevel) {
            j = j.max(self.levels.iter().copied().max().unwrap_or(2));
        }
        j
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| Error::Config(format!("bad value `{value}` for `{key}`: {e}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    split_list(value).map(|v| parse_one(key, v)).collect()
}
