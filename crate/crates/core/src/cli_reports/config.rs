use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Alpha,
    Cover,
    Recur,
    Dirichlet,
    Fourier,
    Limsup,
    Interp,
    BoundCheck,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Alpha => "alpha",
            Kind::Cover => "cover",
            Kind::Recur => "recur",
            Kind::Dirichlet => "dirichlet",
            Kind::Fourier => "fourier",
            Kind::Limsup => "limsup",
            Kind::Interp => "interp",
            Kind::BoundCheck => "bound-check",
        }
    }
}

/// A set given inline in the circle-set text format or by file path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Source {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

impl Source {
    pub(crate) fn read(&self, base: &Path) -> Result<String> {
        match (&self.file, &self.text) {
            (Some(f), None) => Ok(std::fs::read_to_string(base.join(f))?),
            (None, Some(t)) => Ok(t.clone()),
            _ => Err(Error::Config("give exactly one of `file` or `text`".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaParams {
    pub set: Source,
    #[serde(default = "defaults::eps0")]
    pub eps0: f64,
    #[serde(default = "defaults::rho")]
    pub rho: f64,
    #[serde(default = "defaults::steps")]
    pub steps: usize,
    #[serde(default = "defaults::point_cap")]
    pub point_cap: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverParams {
    pub set: Source,
    pub epsilons: Vec<f64>,
    #[serde(default = "defaults::point_cap")]
    pub point_cap: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecurParams {
    pub set: Source,
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(default)]
    pub q_schedule: Option<Vec<u64>>,
    #[serde(default)]
    pub extra_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirichletParams {
    /// Fixed reals; when absent, each trial draws `dims` uniform reals.
    #[serde(default)]
    pub t: Option<Vec<f64>>,
    #[serde(default = "defaults::dims")]
    pub dims: usize,
    pub m: u64,
    #[serde(rename = "Q", default = "defaults::one")]
    pub q_min: u64,
    #[serde(default)]
    pub pigeonhole: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierParams {
    pub measure: Source,
    pub n_min: i64,
    pub n_max: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimsupParams {
    pub measure: Source,
    #[serde(default = "defaults::one_i")]
    pub n_min: i64,
    pub n_max: i64,
    /// When set, also extract concentration indices at this tolerance.
    #[serde(default)]
    pub concentration_tol: Option<f64>,
    #[serde(default = "defaults::count")]
    pub concentration_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpParams {
    /// Node angles in radians.
    pub nodes: Vec<f64>,
    pub k_max: u64,
    pub degree: usize,
    #[serde(default = "defaults::tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemma21,
    Thm25,
    Thm211,
    Thm212,
    Thm35,
    Lemma11,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundCheckParams {
    pub suite: Suite,
    #[serde(default = "defaults::d_max")]
    pub d_max: usize,
    /// Fixes the dimension instead of drawing it from `1..=d_max`.
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default = "defaults::kappa_max")]
    pub kappa_max: f64,
    #[serde(rename = "N", default = "defaults::window")]
    pub n: usize,
    #[serde(default = "defaults::delta")]
    pub delta: f64,
    #[serde(default = "defaults::doublings")]
    pub max_doublings: u32,
    /// Random vectors per model (lemma21).
    #[serde(default = "defaults::vectors")]
    pub vectors: usize,
    /// Blocks and block size (thm211).
    #[serde(default = "defaults::blocks")]
    pub blocks: usize,
    #[serde(default = "defaults::block_size")]
    pub block_size: usize,
    /// Cluster ratio and depth of the spectral pool (thm35).
    #[serde(default = "defaults::cluster_ratio")]
    pub cluster_ratio: f64,
    #[serde(default = "defaults::cluster_depth")]
    pub cluster_depth: usize,
    #[serde(rename = "K", default = "defaults::k")]
    pub k: u64,
    #[serde(default = "defaults::trend")]
    pub k_trend: Vec<u64>,
    /// Coefficient window for the K estimate (thm212).
    #[serde(default = "defaults::k_window")]
    pub k_window: i64,
    /// Interpolation settings (lemma11).
    #[serde(default = "defaults::k_max")]
    pub k_max: u64,
    #[serde(default = "defaults::degree")]
    pub degree: usize,
    #[serde(default = "defaults::tol_lemma11")]
    pub tol: f64,
    /// Record the power-norm profile of trial 0 as a plot series.
    #[serde(default)]
    pub profile_series: bool,
}

mod defaults {
    pub fn eps0() -> f64 {
        1e-2
    }
    pub fn rho() -> f64 {
        0.9
    }
    pub fn steps() -> usize {
        160
    }
    pub fn point_cap() -> u64 {
        crate::circle_sets::DEFAULT_POINT_CAP
    }
    pub fn dims() -> usize {
        2
    }
    pub fn one() -> u64 {
        1
    }
    pub fn one_i() -> i64 {
        1
    }
    pub fn count() -> usize {
        5
    }
    pub fn tol() -> f64 {
        1e-8
    }
    pub fn d_max() -> usize {
        6
    }
    pub fn kappa_max() -> f64 {
        10.0
    }
    pub fn window() -> usize {
        10_000
    }
    pub fn delta() -> f64 {
        0.05
    }
    pub fn doublings() -> u32 {
        1
    }
    pub fn vectors() -> usize {
        10
    }
    pub fn blocks() -> usize {
        3
    }
    pub fn block_size() -> usize {
        2
    }
    pub fn cluster_ratio() -> f64 {
        0.05
    }
    pub fn cluster_depth() -> usize {
        4
    }
    pub fn k() -> u64 {
        8
    }
    pub fn trend() -> Vec<u64> {
        vec![8, 16, 32]
    }
    pub fn k_window() -> i64 {
        100_000
    }
    pub fn k_max() -> u64 {
        4
    }
    pub fn degree() -> usize {
        16
    }
    pub fn tol_lemma11() -> f64 {
        1e-6
    }
}

/// One experiment: a kind, its parameter section, and the trial plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "defaults::one")]
    pub trials: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AlphaParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<CoverParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recur: Option<RecurParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dirichlet: Option<DirichletParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fourier: Option<FourierParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limsup: Option<LimsupParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interp: Option<InterpParams>,
    #[serde(default, rename = "bound-check", skip_serializing_if = "Option::is_none")]
    pub bound_check: Option<BoundCheckParams>,
    /// Directory that relative paths resolve against; not serialized.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut c = Self::parse(&std::fs::read_to_string(path)?)?;
        c.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(c)
    }

    /// Sections present, in a fixed order.
    fn sections(&self) -> Vec<Kind> {
        [
            (Kind::Alpha, self.alpha.is_some()),
            (Kind::Cover, self.cover.is_some()),
            (Kind::Recur, self.recur.is_some()),
            (Kind::Dirichlet, self.dirichlet.is_some()),
            (Kind::Fourier, self.fourier.is_some()),
            (Kind::Limsup, self.limsup.is_some()),
            (Kind::Interp, self.interp.is_some()),
            (Kind::BoundCheck, self.bound_check.is_some()),
        ]
        .into_iter()
        .filter_map(|(k, present)| present.then_some(k))
        .collect()
    }

    /// Checks that the kind is known and exactly its section is present,
    /// filling the kind from `requested` when the file leaves it out.
    pub fn resolve(&mut self, requested: Option<Kind>) -> Result<Kind> {
        let kind = match (self.kind, requested) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Config(format!("config is for `{}`, not `{}`", a.name(), b.name())));
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(Error::Config("no experiment kind given".into())),
        };
        let sections = self.sections();
        if sections != [kind] {
            let names: Vec<&str> = sections.iter().map(|k| k.name()).collect();
            return Err(Error::Config(format!(
                "kind `{}` needs exactly its own section; found [{}]",
                kind.name(),
                names.join(", ")
            )));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        self.kind = Some(kind);
        Ok(kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::parse("kind = \"alpha\"\nbogus = 1\n").is_err());
        assert!(ExperimentConfig::parse("[alpha]\nset = { text = \"point 0\" }\nwhatever = 2\n").is_err());
    }

    #[test]
    fn section_must_match_kind() {
        let mut c = ExperimentConfig::parse("[alpha]\nset = { text = \"point 0\" }\n").unwrap();
        assert!(c.clone().resolve(Some(Kind::Cover)).is_err());
        assert_eq!(c.resolve(Some(Kind::Alpha)).unwrap(), Kind::Alpha);
        let mut c = ExperimentConfig::parse(
            "kind = \"bound-check\"\n[bound-check]\nsuite = \"thm25\"\n[interp]\nnodes = [0.0]\nk_max = 1\ndegree = 1\n",
        )
        .unwrap();
        assert!(c.resolve(None).is_err());
    }

    #[test]
    fn defaults_fill_in() {
        let mut c = ExperimentConfig::parse("kind = \"bound-check\"\ntrials = 3\n[bound-check]\nsuite = \"thm35\"\n").unwrap();
        c.resolve(None).unwrap();
        let b = c.bound_check.unwrap();
        assert_eq!((b.n, b.k, b.k_trend.clone(), b.delta), (10_000, 8, vec![8, 16, 32], 0.05));
    }
}
