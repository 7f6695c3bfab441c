//! Flat `section.key = value` experiment configuration.
//!
//! Every key is optional except `seed`, `network.n`, `network.hidden`,
//! `output.dir` and a dataset source (`dataset.path` or `dataset.rule`).

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use super::dataset::{format_bits, parse_bits, GeneratorRule, GeneratorSpec};
use crate::error::{Error, Result};
use crate::model::ExecutionMode;
use crate::network::{FlagMode, NetworkShape, SynapseMode};
use crate::training::{GradientMethod, LossConfig, LossKind, OptimizerConfig, OptimizerKind};

/// Finite-difference step used when `optimizer.gradient = central_difference` omits `optimizer.fd_step`.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq)]
pub enum DatasetSource {
    File(PathBuf),
    Generated(GeneratorSpec),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub shape: NetworkShape,
    pub synapse_mode: SynapseMode,
    pub flag_mode: FlagMode,
    pub loss: LossConfig,
    /// Also carries the run seed and the execution mode.
    pub optimizer: OptimizerConfig,
    pub dataset: DatasetSource,
    pub output_dir: PathBuf,
}

const KEYS: &[&str] = &[
    "seed",
    "network.n",
    "network.hidden",
    "network.synapse_mode",
    "network.flag_mode",
    "loss.kind",
    "loss.l1_strength",
    "loss.epsilon_clip",
    "optimizer.kind",
    "optimizer.learning_rate",
    "optimizer.max_epochs",
    "optimizer.gradient",
    "optimizer.fd_step",
    "adam.beta1",
    "adam.beta2",
    "adam.epsilon",
    "spsa.a",
    "spsa.c",
    "spsa.stability",
    "spsa.alpha",
    "spsa.gamma",
    "execution.mode",
    "execution.shots",
    "dataset.path",
    "dataset.rule",
    "dataset.n",
    "dataset.count",
    "dataset.mask",
    "dataset.table",
    "output.dir",
];

fn config_error(key: &str, message: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key}: {message}"))
}

/// Raw key/value pairs; later assignments of a key replace earlier ones.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigMap(BTreeMap<String, String>);

impl ConfigMap {
    /// Parses `key = value` lines; `#` starts a comment. Repeating a key within one text is an error.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let stmt = raw.split('#').next().unwrap_or("").trim();
            if stmt.is_empty() {
                continue;
            }
            let (key, value) = stmt.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected `key = value`, got `{stmt}`"),
            })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown key `{key}`"),
                });
            }
            if map.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(Error::Parse {
                    line,
                    message: format!("`{key}` assigned twice"),
                });
            }
        }
        Ok(ConfigMap(map))
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(Error::Config(format!("unknown key `{key}`")));
        }
        self.0.insert(key.to_string(), value.into());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.0
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|e| config_error(key, format!("`{v}`: {e}"))))
            .transpose()
    }

    fn required<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.parsed(key)?.ok_or_else(|| config_error(key, "is required"))
    }

    fn choice<T: Copy>(&self, key: &str, options: &[(&str, T)], default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => options.iter().find(|(name, _)| *name == v).map(|&(_, t)| t).ok_or_else(|| {
                let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                config_error(key, format!("`{v}` is not one of {}", names.join(", ")))
            }),
        }
    }

    fn bits(&self, key: &str, text: &str) -> Result<Vec<bool>> {
        parse_bits(text).ok_or_else(|| config_error(key, format!("`{text}` is not a bit string")))
    }
}

const SYNAPSE_MODES: &[(&str, SynapseMode)] = &[
    ("null_consistent", SynapseMode::NullConsistent),
    ("paper_literal", SynapseMode::PaperLiteral),
];
const FLAG_MODES: &[(&str, FlagMode)] = &[("parity", FlagMode::Parity), ("conjunction", FlagMode::Conjunction)];
const LOSS_KINDS: &[(&str, LossKind)] = &[("bce", LossKind::Bce), ("l2", LossKind::L2)];
const OPTIMIZERS: &[(&str, OptimizerKind)] = &[
    ("adam", OptimizerKind::Adam),
    ("gradient_descent", OptimizerKind::GradientDescent),
    ("spsa", OptimizerKind::Spsa),
];

fn name_of<T: PartialEq>(options: &[(&'static str, T)], value: &T) -> &'static str {
    options.iter().find(|(_, t)| t == value).map(|(n, _)| *n).expect("every variant is named")
}

impl ExperimentConfig {
    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_map(&ConfigMap::parse(text)?)
    }

    pub fn from_map(map: &ConfigMap) -> Result<Self> {
        let seed: u64 = map.required("seed")?;
        let n: usize = map.required("network.n")?;
        let hidden_text: String = map.required("network.hidden")?;
        let hidden = hidden_text
            .split(',')
            .map(|w| w.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| config_error("network.hidden", format!("`{hidden_text}`: {e}")))?;
        let shape = NetworkShape::new(n, hidden).map_err(|e| config_error("network", e))?;

        let defaults = LossConfig::default();
        let loss = LossConfig {
            kind: map.choice("loss.kind", LOSS_KINDS, defaults.kind)?,
            l1_strength: map.parsed("loss.l1_strength")?.unwrap_or(defaults.l1_strength),
            epsilon_clip: map.parsed("loss.epsilon_clip")?.unwrap_or(defaults.epsilon_clip),
        };
        loss.validate().map_err(|e| config_error("loss", e))?;

        let mut opt = OptimizerConfig {
            seed,
            ..Default::default()
        };
        opt.kind = map.choice("optimizer.kind", OPTIMIZERS, opt.kind)?;
        opt.learning_rate = map.parsed("optimizer.learning_rate")?.unwrap_or(opt.learning_rate);
        opt.max_epochs = map.parsed("optimizer.max_epochs")?.unwrap_or(opt.max_epochs);
        let step = map.parsed::<f64>("optimizer.fd_step")?;
        opt.gradient = match map.get("optimizer.gradient") {
            None | Some("parameter_shift") if step.is_none() => GradientMethod::ParameterShift,
            None | Some("parameter_shift") => {
                return Err(config_error("optimizer.fd_step", "only applies to central_difference"))
            }
            Some("central_difference") => GradientMethod::CentralDifference {
                step: step.unwrap_or(DEFAULT_FD_STEP),
            },
            Some(v) => {
                return Err(config_error(
                    "optimizer.gradient",
                    format!("`{v}` is not one of parameter_shift, central_difference"),
                ))
            }
        };
        opt.adam.beta1 = map.parsed("adam.beta1")?.unwrap_or(opt.adam.beta1);
        opt.adam.beta2 = map.parsed("adam.beta2")?.unwrap_or(opt.adam.beta2);
        opt.adam.epsilon = map.parsed("adam.epsilon")?.unwrap_or(opt.adam.epsilon);
        opt.spsa.a = map.parsed("spsa.a")?.unwrap_or(opt.spsa.a);
        opt.spsa.c = map.parsed("spsa.c")?.unwrap_or(opt.spsa.c);
        opt.spsa.stability = map.parsed("spsa.stability")?.unwrap_or(opt.spsa.stability);
        opt.spsa.alpha = map.parsed("spsa.alpha")?.unwrap_or(opt.spsa.alpha);
        opt.spsa.gamma = map.parsed("spsa.gamma")?.unwrap_or(opt.spsa.gamma);
        let shots = map.parsed::<usize>("execution.shots")?;
        opt.execution = match (map.get("execution.mode"), shots) {
            (None | Some("exact"), None) => ExecutionMode::Exact,
            (None | Some("exact"), Some(_)) => {
                return Err(config_error("execution.shots", "requires execution.mode = shots"))
            }
            (Some("shots"), Some(shots)) => ExecutionMode::Shots { shots },
            (Some("shots"), None) => return Err(config_error("execution.shots", "is required in shots mode")),
            (Some(v), _) => return Err(config_error("execution.mode", format!("`{v}` is not one of exact, shots"))),
        };
        opt.validate().map_err(|e| config_error("optimizer", e))?;

        let dataset = dataset_source(map, n)?;
        let output_dir = PathBuf::from(map.required::<String>("output.dir")?);

        Ok(ExperimentConfig {
            shape,
            synapse_mode: map.choice("network.synapse_mode", SYNAPSE_MODES, SynapseMode::default())?,
            flag_mode: map.choice("network.flag_mode", FLAG_MODES, FlagMode::default())?,
            loss,
            optimizer: opt,
            dataset,
            output_dir,
        })
    }

    pub fn seed(&self) -> u64 {
        self.optimizer.seed
    }

    /// Canonical key/value form; `from_map(&to_map())` reproduces `self`.
    pub fn to_map(&self) -> ConfigMap {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        let o = &self.optimizer;
        put("seed", o.seed.to_string());
        put("network.n", self.shape.n_database().to_string());
        let widths: Vec<String> = self.shape.hidden_widths().iter().map(usize::to_string).collect();
        put("network.hidden", widths.join(","));
        put("network.synapse_mode", name_of(SYNAPSE_MODES, &self.synapse_mode).into());
        put("network.flag_mode", name_of(FLAG_MODES, &self.flag_mode).into());
        put("loss.kind", name_of(LOSS_KINDS, &self.loss.kind).into());
        put("loss.l1_strength", self.loss.l1_strength.to_string());
        put("loss.epsilon_clip", self.loss.epsilon_clip.to_string());
        put("optimizer.kind", name_of(OPTIMIZERS, &o.kind).into());
        put("optimizer.learning_rate", o.learning_rate.to_string());
        put("optimizer.max_epochs", o.max_epochs.to_string());
        match o.gradient {
            GradientMethod::ParameterShift => put("optimizer.gradient", "parameter_shift".into()),
            GradientMethod::CentralDifference { step } => {
                put("optimizer.gradient", "central_difference".into());
                put("optimizer.fd_step", step.to_string());
            }
        }
        put("adam.beta1", o.adam.beta1.to_string());
        put("adam.beta2", o.adam.beta2.to_string());
        put("adam.epsilon", o.adam.epsilon.to_string());
        put("spsa.a", o.spsa.a.to_string());
        put("spsa.c", o.spsa.c.to_string());
        put("spsa.stability", o.spsa.stability.to_string());
        put("spsa.alpha", o.spsa.alpha.to_string());
        put("spsa.gamma", o.spsa.gamma.to_string());
        match o.execution {
            ExecutionMode::Exact => put("execution.mode", "exact".into()),
            ExecutionMode::Shots { shots } => {
                put("execution.mode", "shots".into());
                put("execution.shots", shots.to_string());
            }
        }
        match &self.dataset {
            DatasetSource::File(p) => put("dataset.path", p.display().to_string()),
            DatasetSource::Generated(spec) => {
                put("dataset.n", spec.n.to_string());
                put("dataset.count", spec.count.to_string());
                match &spec.rule {
                    GeneratorRule::MaskAnd { mask } => {
                        put("dataset.rule", "mask_and".into());
                        put("dataset.mask", format_bits(mask));
                    }
                    GeneratorRule::FixedMap { table } => {
                        put("dataset.rule", "fixed_map".into());
                        let rows: Vec<String> =
                            table.iter().map(|(d, h)| format!("{}:{}", format_bits(d), format_bits(h))).collect();
                        put("dataset.table", rows.join(","));
                    }
                    GeneratorRule::RandomRule => put("dataset.rule", "random_rule".into()),
                }
            }
        }
        put("output.dir", self.output_dir.display().to_string());
        ConfigMap(m)
    }

    pub fn to_text(&self) -> String {
        self.to_map().0.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

fn dataset_source(map: &ConfigMap, network_n: usize) -> Result<DatasetSource> {
    let rule = map.get("dataset.rule");
    if let Some(path) = map.get("dataset.path") {
        for key in ["dataset.rule", "dataset.n", "dataset.count", "dataset.mask", "dataset.table"] {
            if map.get(key).is_some() {
                return Err(config_error(key, "conflicts with dataset.path"));
            }
        }
        return Ok(DatasetSource::File(PathBuf::from(path)));
    }
    let n: usize = map.parsed("dataset.n")?.unwrap_or(network_n);
    if n != network_n {
        return Err(config_error("dataset.n", format!("{n} does not match network.n = {network_n}")));
    }
    let mask = map.get("dataset.mask");
    let table = map.get("dataset.table");
    let (rule, default_count) = match rule {
        None => return Err(config_error("dataset", "set dataset.path or dataset.rule")),
        Some("mask_and") => {
            let text = mask.ok_or_else(|| config_error("dataset.mask", "is required by mask_and"))?;
            (GeneratorRule::MaskAnd { mask: map.bits("dataset.mask", text)? }, 1usize << n.min(20))
        }
        Some("fixed_map") => {
            let text = table.ok_or_else(|| config_error("dataset.table", "is required by fixed_map"))?;
            let rows = text
                .split(',')
                .map(|row| {
                    let (d, h) = row
                        .trim()
                        .split_once(':')
                        .ok_or_else(|| config_error("dataset.table", format!("row `{}` is not `db:hits`", row.trim())))?;
                    Ok((map.bits("dataset.table", d)?, map.bits("dataset.table", h)?))
                })
                .collect::<Result<Vec<_>>>()?;
            let len = rows.len();
            (GeneratorRule::FixedMap { table: rows }, len)
        }
        Some("random_rule") => (GeneratorRule::RandomRule, 1usize << n.min(20)),
        Some(v) => {
            return Err(config_error(
                "dataset.rule",
                format!("`{v}` is not one of mask_and, fixed_map, random_rule"),
            ))
        }
    };
    if mask.is_some() && !matches!(rule, GeneratorRule::MaskAnd { .. }) {
        return Err(config_error("dataset.mask", "only applies to mask_and"));
    }
    if table.is_some() && !matches!(rule, GeneratorRule::FixedMap { .. }) {
        return Err(config_error("dataset.table", "only applies to fixed_map"));
    }
    let spec = GeneratorSpec {
        rule,
        count: map.parsed("dataset.count")?.unwrap_or(default_count),
        n,
    };
    spec.validate()?;
    Ok(DatasetSource::Generated(spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "
        # smallest network
        seed = 3
        network.n = 1
        network.hidden = 1
        dataset.rule = fixed_map
        dataset.table = 0:1, 1:0
        output.dir = out
    ";

    fn field_of(err: Error) -> String {
        match err {
            Error::Config(m) => m.split(':').next().unwrap().to_string(),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_defaults() {
        let c = ExperimentConfig::from_text(MINIMAL).unwrap();
        assert_eq!(c.seed(), 3);
        assert_eq!(c.optimizer.kind, OptimizerKind::Adam);
        assert_eq!(c.optimizer.execution, ExecutionMode::Exact);
        assert_eq!(c.synapse_mode, SynapseMode::NullConsistent);
        match &c.dataset {
            DatasetSource::Generated(s) => assert_eq!(s.count, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn canonical_text_round_trips() {
        let base = ExperimentConfig::from_text(MINIMAL).unwrap();
        assert_eq!(ExperimentConfig::from_text(&base.to_text()).unwrap(), base);
        let text = format!(
            "{}\noptimizer.kind = spsa\nexecution.mode = shots\nexecution.shots = 64\nloss.kind = l2\n",
            MINIMAL
        );
        let c = ExperimentConfig::from_text(&text).unwrap();
        assert_eq!(ExperimentConfig::from_text(&c.to_text()).unwrap(), c);
        let fd = format!("{}\noptimizer.gradient = central_difference\n", MINIMAL);
        let c = ExperimentConfig::from_text(&fd).unwrap();
        assert_eq!(c.optimizer.gradient, GradientMethod::CentralDifference { step: DEFAULT_FD_STEP });
        assert_eq!(ExperimentConfig::from_text(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn errors_name_the_field() {
        let without = |key: &str| {
            MINIMAL
                .lines()
                .filter(|l| !l.trim_start().starts_with(key))
                .collect::<Vec<_>>()
                .join("\n")
        };
        let with = |extra: &str| format!("{MINIMAL}\n{extra}\n");
        let cases = [
            (without("seed"), "seed"),
            (without("output.dir"), "output.dir"),
            (with("optimizer.learning_rate = fast"), "optimizer.learning_rate"),
            (with("loss.kind = hinge"), "loss.kind"),
            (with("dataset.n = 3"), "dataset.n"),
            (with("execution.mode = shots"), "execution.shots"),
            (with("optimizer.fd_step = 0.001"), "optimizer.fd_step"),
            (with("dataset.mask = 1"), "dataset.mask"),
        ];
        for (text, field) in cases {
            let err = ExperimentConfig::from_text(&text).unwrap_err();
            assert_eq!(field_of(err), field, "{text}");
        }
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(ConfigMap::parse("seed 3"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(ConfigMap::parse("\nnetwork.depth = 2"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(ConfigMap::parse("seed = 1\nseed = 2"), Err(Error::Parse { line: 2, .. })));
    }
}
