//! Flat `key = value` experiment files with `[experiment]`, `[plaknn]`,
//! `[synth]` and `[pipeline]` sections.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::BenchError;
use crate::plaknn::{Mode, PlaknnConfig};
use crate::preprocess::{PipelineConfig, Variant};
use crate::synth::{analytic_scenario, ClusterScenario, ScenarioParams, SynthBagConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Plaknn,
    Aknn,
    FixedK,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Plaknn => "plaknn",
            Method::Aknn => "aknn",
            Method::FixedK => "fixed_k",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "plaknn" => Some(Method::Plaknn),
            "aknn" => Some(Method::Aknn),
            "fixed_k" => Some(Method::FixedK),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BagSource {
    /// Use the bags that come with the data; noise removes the true label.
    Native,
    /// Replace bags with clustered synthetic ones; noise corrupts the anchor.
    Synth,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Source {
    Dataset { path: PathBuf, labels: Option<usize> },
    /// `two_gaussians`, `relaxed` or `clusters`.
    Scenario { name: String, n_samples: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub source: Source,
    pub bag_source: BagSource,
    pub methods: Vec<Method>,
    pub k: usize,
    pub noise: Vec<f64>,
    pub train_fraction: f64,
    pub repetitions: usize,
    pub seed: u64,
    pub plaknn: PlaknnConfig,
    pub synth: SynthBagConfig,
    pub scenario: ScenarioParams,
    pub clusters: ClusterScenario,
    pub pipeline: Option<PipelineConfig>,
}

pub const FULL_REPETITIONS: usize = 100;
pub const DEFAULT_REPETITIONS: usize = 20;

impl ExperimentConfig {
    /// Defaults around a source: all three methods, k = 10, noise 0, 80/20
    /// split, 20 repetitions and no pipeline.
    pub fn new(source: Source) -> Self {
        let bag_source = match &source {
            Source::Scenario { name, .. } if name == "clusters" => BagSource::Synth,
            _ => BagSource::Native,
        };
        Self {
            source,
            bag_source,
            methods: vec![Method::Plaknn, Method::Aknn, Method::FixedK],
            k: 10,
            noise: vec![0.0],
            train_fraction: 0.8,
            repetitions: DEFAULT_REPETITIONS,
            seed: 0,
            plaknn: PlaknnConfig::default(),
            synth: SynthBagConfig::default(),
            scenario: ScenarioParams::default(),
            clusters: ClusterScenario::default(),
            pipeline: None,
        }
    }

    pub fn from_path<P: AsRef<Path>>(path: P) -> Result<Self, BenchError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        // Dataset paths are relative to the config file.
        if let Source::Dataset { path: data, .. } = &mut cfg.source {
            if data.is_relative() {
                if let Some(dir) = path.parent() {
                    *data = dir.join(&*data);
                }
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let sections = split_sections(text)?;
        let mut exp = sections.get("experiment").cloned().unwrap_or_default();
        let source = match (exp.take("dataset"), exp.take("scenario")) {
            (Some(_), Some(_)) => return Err(config_err("set either dataset or scenario, not both")),
            (None, None) => return Err(config_err("[experiment] needs dataset or scenario")),
            (Some(path), None) => {
                let labels = exp.take("labels").map(|v| parse_num("experiment.labels", &v.value)).transpose()?;
                Source::Dataset { path: PathBuf::from(path.value), labels }
            }
            (None, Some(name)) => {
                let n_samples = match exp.take("n_samples") {
                    Some(v) => parse_num("experiment.n_samples", &v.value)?,
                    None => 2000,
                };
                Source::Scenario { name: name.value, n_samples }
            }
        };
        let mut cfg = Self::new(source);
        if let Some(v) = exp.take("bag_source") {
            cfg.bag_source = match v.value.as_str() {
                "native" => BagSource::Native,
                "synth" => BagSource::Synth,
                other => return Err(config_err(format!("experiment.bag_source: unknown value '{other}'"))),
            };
        }
        if let Some(v) = exp.take("methods") {
            cfg.methods = list(&v.value)
                .map(|m| Method::parse(m).ok_or_else(|| config_err(format!("experiment.methods: unknown method '{m}'"))))
                .collect::<Result<_, _>>()?;
        }
        if let Some(v) = exp.take("k") {
            cfg.k = parse_num("experiment.k", &v.value)?;
        }
        if let Some(v) = exp.take("noise") {
            cfg.noise = list(&v.value).map(|x| parse_num("experiment.noise", x)).collect::<Result<_, _>>()?;
        }
        if let Some(v) = exp.take("train_fraction") {
            cfg.train_fraction = parse_num("experiment.train_fraction", &v.value)?;
        }
        if let Some(v) = exp.take("repetitions") {
            cfg.repetitions = match v.value.as_str() {
                "full" => FULL_REPETITIONS,
                s => parse_num("experiment.repetitions", s)?,
            };
        }
        if let Some(v) = exp.take("seed") {
            cfg.seed = parse_num("experiment.seed", &v.value)?;
        }
        exp.reject_rest("experiment")?;

        let mut pl = sections.get("plaknn").cloned().unwrap_or_default();
        if let Some(v) = pl.take("c1") {
            cfg.plaknn.c1 = parse_num("plaknn.c1", &v.value)?;
        }
        if let Some(v) = pl.take("delta") {
            cfg.plaknn.delta = parse_num("plaknn.delta", &v.value)?;
        }
        if let Some(v) = pl.take("max_iter") {
            cfg.plaknn.max_iter = parse_num("plaknn.max_iter", &v.value)?;
        }
        if let Some(v) = pl.take("mode") {
            cfg.plaknn.mode = match v.value.as_str() {
                "pointwise" => Mode::Pointwise,
                "uniform" => Mode::Uniform,
                other => return Err(config_err(format!("plaknn.mode: unknown value '{other}'"))),
            };
        }
        if let Some(v) = pl.take("d0") {
            cfg.plaknn.d0 = Some(parse_num("plaknn.d0", &v.value)?);
        }
        pl.reject_rest("plaknn")?;

        let mut sy = sections.get("synth").cloned().unwrap_or_default();
        if let Some(v) = sy.take("n_clusters") {
            cfg.synth.n_clusters = parse_num("synth.n_clusters", &v.value)?;
        }
        if let Some(v) = sy.take("alpha_max") {
            cfg.synth.alpha_max = parse_num("synth.alpha_max", &v.value)?;
        }
        if let Some(v) = sy.take("mean_offset") {
            cfg.scenario.mean_offset = parse_num("synth.mean_offset", &v.value)?;
        }
        if let Some(v) = sy.take("sigma") {
            cfg.scenario.sigma = parse_num("synth.sigma", &v.value)?;
            cfg.clusters.sigma = cfg.scenario.sigma;
        }
        if let Some(v) = sy.take("distractor_prob") {
            cfg.scenario.distractor_prob = parse_num("synth.distractor_prob", &v.value)?;
        }
        if let Some(v) = sy.take("region_mass") {
            cfg.scenario.region_mass = parse_num("synth.region_mass", &v.value)?;
        }
        if let Some(v) = sy.take("theta") {
            cfg.scenario.theta = parse_num("synth.theta", &v.value)?;
        }
        if let Some(v) = sy.take("cluster_labels") {
            cfg.clusters.labels = parse_num("synth.cluster_labels", &v.value)?;
        }
        if let Some(v) = sy.take("cluster_radius") {
            cfg.clusters.radius = parse_num("synth.cluster_radius", &v.value)?;
        }
        sy.reject_rest("synth")?;

        let mut pp = sections.get("pipeline").cloned().unwrap_or_default();
        if let Some(v) = pp.take("variant") {
            cfg.pipeline = match v.value.as_str() {
                "none" => None,
                "vision" => Some(PipelineConfig::vision()),
                "realworld" => Some(PipelineConfig::realworld()),
                other => return Err(config_err(format!("pipeline.variant: unknown value '{other}'"))),
            };
        }
        for key in ["smoothing_alpha", "smoothing_k", "density_k"] {
            let Some(v) = pp.take(key) else { continue };
            let full = format!("pipeline.{key}");
            let p = cfg
                .pipeline
                .as_mut()
                .ok_or_else(|| config_err(format!("{full} needs pipeline.variant = vision or realworld")))?;
            match key {
                "smoothing_alpha" => p.smoothing_alpha = parse_num(&full, &v.value)?,
                "smoothing_k" => p.smoothing_k = parse_num(&full, &v.value)?,
                _ => p.density_k = parse_num(&full, &v.value)?,
            }
        }
        pp.reject_rest("pipeline")?;

        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(config_err(format!("train_fraction must lie in (0,1), got {}", self.train_fraction)));
        }
        if self.repetitions == 0 {
            return Err(config_err("repetitions must be at least 1"));
        }
        if self.noise.is_empty() || self.noise.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(config_err("noise grid must be nonempty with values in [0,1]"));
        }
        if self.methods.is_empty() {
            return Err(config_err("methods must list at least one method"));
        }
        if self.k == 0 {
            return Err(config_err("k must be at least 1"));
        }
        self.plaknn.validate().map_err(|e| config_err(e.to_string()))?;
        let synth = SynthBagConfig { noise_nu: 0.0, ..self.synth.clone() };
        synth.validate().map_err(|e| config_err(e.to_string()))?;
        if let Some(p) = &self.pipeline {
            p.validate().map_err(|e| config_err(e.to_string()))?;
        }
        if let Source::Scenario { name, n_samples } = &self.source {
            if *n_samples < 2 {
                return Err(config_err("n_samples must be at least 2"));
            }
            if name == "clusters" {
                self.clusters.label_space().map_err(|e| config_err(e.to_string()))?;
                if self.bag_source == BagSource::Native {
                    return Err(config_err("the clusters scenario has no native bags; use bag_source = synth"));
                }
            } else {
                analytic_scenario(name, &self.scenario).map_err(|e| config_err(e.to_string()))?;
            }
        }
        Ok(())
    }

    pub fn pipeline_variant(&self) -> Option<Variant> {
        self.pipeline.as_ref().map(|p| p.variant)
    }
}

fn config_err(msg: impl Into<String>) -> BenchError {
    BenchError::Config(msg.into())
}

fn list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty())
}

fn parse_num<T: std::str::FromStr>(key: &str, s: &str) -> Result<T, BenchError> {
    s.trim().parse().map_err(|_| config_err(format!("{key}: cannot parse '{s}'")))
}

#[derive(Clone, Debug, Default)]
struct Entry {
    value: String,
}

#[derive(Clone, Debug, Default)]
struct Section(BTreeMap<String, (usize, Entry)>);

impl Section {
    fn take(&mut self, key: &str) -> Option<Entry> {
        self.0.remove(key).map(|(_, e)| e)
    }

    fn reject_rest(&self, name: &str) -> Result<(), BenchError> {
        match self.0.iter().min_by_key(|(_, (line, _))| *line) {
            Some((key, (line, _))) => Err(config_err(format!("line {line}: unknown key '{name}.{key}'"))),
            None => Ok(()),
        }
    }
}

const SECTIONS: [&str; 4] = ["experiment", "plaknn", "synth", "pipeline"];

fn split_sections(text: &str) -> Result<BTreeMap<String, Section>, BenchError> {
    let mut out: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                return Err(config_err(format!("line {line_no}: unknown section '[{name}]'")));
            }
            current = Some(name.to_string());
            out.entry(name.to_string()).or_default();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(config_err(format!("line {line_no}: expected key = value")));
        };
        let section = current
            .as_ref()
            .ok_or_else(|| config_err(format!("line {line_no}: key outside of a section")))?;
        let key = key.trim().to_string();
        let map = &mut out.get_mut(section).expect("section registered").0;
        if map.contains_key(&key) {
            return Err(config_err(format!("line {line_no}: duplicate key '{section}.{key}'")));
        }
        map.insert(key, (line_no, Entry { value: value.trim().to_string() }));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_scenario_uses_defaults() {
        let cfg = ExperimentConfig::parse("[experiment]\nscenario = two_gaussians\n").unwrap();
        assert_eq!(cfg.source, Source::Scenario { name: "two_gaussians".into(), n_samples: 2000 });
        assert_eq!(cfg.repetitions, 20);
        assert_eq!(cfg.train_fraction, 0.8);
        assert_eq!(cfg.methods.len(), 3);
        assert_eq!(cfg.bag_source, BagSource::Native);
        assert!(cfg.pipeline.is_none());
    }

    #[test]
    fn full_file() {
        let text = "\
# sweep
[experiment]
scenario = clusters
n_samples = 500
methods = plaknn, fixed_k
k = 5
noise = 0, 0.1, 0.3
repetitions = full
seed = 7
[plaknn]
c1 = 0.4
max_iter = 50
mode = uniform
d0 = 3
[synth]
n_clusters = 4
alpha_max = 0.5
[pipeline]
variant = realworld
density_k = 20
";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.bag_source, BagSource::Synth);
        assert_eq!(cfg.methods, vec![Method::Plaknn, Method::FixedK]);
        assert_eq!(cfg.noise, vec![0.0, 0.1, 0.3]);
        assert_eq!(cfg.repetitions, 100);
        assert_eq!(cfg.plaknn.mode, Mode::Uniform);
        assert_eq!(cfg.plaknn.d0, Some(3));
        assert_eq!(cfg.synth.n_clusters, 4);
        let p = cfg.pipeline.unwrap();
        assert_eq!((p.variant, p.density_k, p.smoothing_k), (Variant::Realworld, 20, 10));
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ExperimentConfig::parse("[experiment]\nscenario = relaxed\nrepetitons = 3\n").unwrap_err();
        let BenchError::Config(msg) = err else { panic!() };
        assert!(msg.contains("experiment.repetitons"), "{msg}");
        let err = ExperimentConfig::parse("[experiment]\nscenario = relaxed\n[plaknn]\ncl = 1\n").unwrap_err();
        assert!(err.to_string().contains("plaknn.cl"));
    }

    #[test]
    fn invalid_values_are_config_errors() {
        for text in [
            "[experiment]\nscenario = nope\n",
            "[experiment]\nscenario = relaxed\ntrain_fraction = 1\n",
            "[experiment]\nscenario = relaxed\nrepetitions = 0\n",
            "[experiment]\nscenario = relaxed\nnoise = 0.5, 1.5\n",
            "[experiment]\nscenario = relaxed\nmethods = svm\n",
            "[experiment]\nscenario = clusters\nbag_source = native\n",
            "[experiment]\ndataset = a.csv\nscenario = relaxed\n",
            "[experiment]\n",
            "scenario = relaxed\n",
            "[other]\n",
            "[experiment]\nscenario = relaxed\nscenario = relaxed\n",
            "[experiment]\nscenario = relaxed\n[pipeline]\ndensity_k = 3\n",
            "[experiment]\nscenario = relaxed\n[plaknn]\ndelta = 2\n",
        ] {
            assert!(matches!(ExperimentConfig::parse(text), Err(BenchError::Config(_))), "{text}");
        }
    }

    #[test]
    fn dataset_path_resolves_next_to_config() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("exp.cfg");
        std::fs::write(&cfg_path, "[experiment]\ndataset = data.csv\nlabels = 4\n").unwrap();
        let cfg = ExperimentConfig::from_path(&cfg_path).unwrap();
        assert_eq!(cfg.source, Source::Dataset { path: dir.path().join("data.csv"), labels: Some(4) });
    }
}
