//! Flat `key = value` experiment configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use tabkit_core::classifiers::LambdaSelection;
use tabkit_core::evaluate::{ExperimentCell, Method};
use tabkit_core::scenarios::{ScenarioKind, ScenarioSpec, DEFAULT_AMP_P, DEFAULT_AMP_Q};

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Band,
    Flip,
    Logistic,
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            FigureId::Band => "band",
            FigureId::Flip => "flip",
            FigureId::Logistic => "logistic",
        }
    }
}

impl FromStr for FigureId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s {
            "band" => Ok(FigureId::Band),
            "flip" => Ok(FigureId::Flip),
            "logistic" => Ok(FigureId::Logistic),
            other => Err(HarnessError::Config(format!("unknown scenario `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Accuracy,
    Agreement,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::Agreement => "agreement",
        }
    }
}

impl FromStr for Metric {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s {
            "accuracy" => Ok(Metric::Accuracy),
            "agreement" | "bayes_agreement" => Ok(Metric::Agreement),
            other => Err(HarnessError::Config(format!("unknown metric `{other}`"))),
        }
    }
}

/// Everything needed to run one figure-style sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: FigureId,
    /// Values of the grid parameter (delta or r).
    pub grid: Vec<f64>,
    /// Transfer exponents swept for the nonparametric scenarios.
    pub gammas: Vec<f64>,
    pub methods: Vec<Method>,
    pub n_q: usize,
    pub n_p: usize,
    pub n_test: usize,
    pub reps: usize,
    pub seed: u64,
    pub tau: Option<f64>,
    pub c_tau: f64,
    pub k_q: Option<usize>,
    pub k_p: Option<usize>,
    pub folds: usize,
    pub d: usize,
    pub s: usize,
    pub exact_angle: bool,
    pub amp_q: f64,
    pub amp_p: f64,
    pub gain: f64,
    /// Penalty `c sqrt(ln d / n)` instead of cross-validation.
    pub theory_params: bool,
    pub lambda_c: f64,
    pub metric: Metric,
    pub out: PathBuf,
}

/// Keys accepted in configuration files.
pub const KEYS: [&str; 24] = [
    "scenario",
    "grid",
    "gamma",
    "methods",
    "n_q",
    "n_p",
    "n_test",
    "reps",
    "seed",
    "tau",
    "c_tau",
    "k_q",
    "k_p",
    "folds",
    "d",
    "s",
    "exact_angle",
    "amp_q",
    "amp_p",
    "gain",
    "theory_params",
    "lambda_c",
    "metric",
    "out",
];

/// `tau` constant of the lasso TAB rule used when no explicit `tau` is given.
pub const DEFAULT_LOGISTIC_C_TAU: f64 = 0.025;

impl ExperimentConfig {
    /// Defaults of the named figure.
    pub fn figure(id: FigureId) -> Self {
        let base = Self {
            scenario: id,
            grid: vec![],
            gammas: vec![0.5, 1.0],
            methods: Method::KNN.to_vec(),
            n_q: 200,
            n_p: 1000,
            n_test: 50_000,
            reps: 20,
            seed: 2024,
            tau: Some(0.05),
            c_tau: 1.0,
            k_q: None,
            k_p: None,
            folds: 5,
            d: 200,
            s: 10,
            exact_angle: false,
            amp_q: DEFAULT_AMP_Q,
            amp_p: DEFAULT_AMP_P,
            gain: 2.0,
            theory_params: false,
            lambda_c: 1.0,
            metric: Metric::Agreement,
            out: PathBuf::from(format!("results/{}.csv", id.name())),
        };
        match id {
            FigureId::Band => Self {
                grid: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
                ..base
            },
            FigureId::Flip => Self {
                grid: vec![0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4],
                ..base
            },
            FigureId::Logistic => Self {
                grid: vec![0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75],
                gammas: vec![1.0],
                methods: Method::LASSO.to_vec(),
                n_p: 500,
                tau: None,
                c_tau: DEFAULT_LOGISTIC_C_TAU,
                metric: Metric::Accuracy,
                ..base
            },
        }
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        let bad = |e: String| HarnessError::Config(format!("invalid value for `{key}`: {e}"));
        match key {
            "scenario" => self.scenario = value.parse()?,
            "grid" => self.grid = parse_list(value).map_err(bad)?,
            "gamma" => self.gammas = parse_list(value).map_err(bad)?,
            "methods" => {
                self.methods = value
                    .split(',')
                    .map(|m| m.trim().parse::<Method>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| bad(e.to_string()))?
            }
            "n_q" => self.n_q = parse(value).map_err(bad)?,
            "n_p" => self.n_p = parse(value).map_err(bad)?,
            "n_test" => self.n_test = parse(value).map_err(bad)?,
            "reps" => self.reps = parse(value).map_err(bad)?,
            "seed" => self.seed = parse(value).map_err(bad)?,
            "tau" => self.tau = parse_opt(value).map_err(bad)?,
            "c_tau" => self.c_tau = parse(value).map_err(bad)?,
            "k_q" => self.k_q = parse_opt(value).map_err(bad)?,
            "k_p" => self.k_p = parse_opt(value).map_err(bad)?,
            "folds" => self.folds = parse(value).map_err(bad)?,
            "d" => self.d = parse(value).map_err(bad)?,
            "s" => self.s = parse(value).map_err(bad)?,
            "exact_angle" => self.exact_angle = parse(value).map_err(bad)?,
            "amp_q" => self.amp_q = parse(value).map_err(bad)?,
            "amp_p" => self.amp_p = parse(value).map_err(bad)?,
            "gain" => self.gain = parse(value).map_err(bad)?,
            "theory_params" => self.theory_params = parse(value).map_err(bad)?,
            "lambda_c" => self.lambda_c = parse(value).map_err(bad)?,
            "metric" => self.metric = value.parse()?,
            "out" => self.out = PathBuf::from(value),
            other => return Err(HarnessError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Serializes every key so that [`parse_config_str`] restores `self`.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let opt = |v: Option<String>| v.unwrap_or_else(|| "none".into());
        let _ = writeln!(s, "scenario = {}", self.scenario.name());
        let _ = writeln!(s, "grid = {}", list(&self.grid));
        let _ = writeln!(s, "gamma = {}", list(&self.gammas));
        let methods: Vec<&str> = self.methods.iter().map(|m| m.name()).collect();
        let _ = writeln!(s, "methods = {}", methods.join(","));
        let _ = writeln!(s, "n_q = {}", self.n_q);
        let _ = writeln!(s, "n_p = {}", self.n_p);
        let _ = writeln!(s, "n_test = {}", self.n_test);
        let _ = writeln!(s, "reps = {}", self.reps);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "tau = {}", opt(self.tau.map(|v| v.to_string())));
        let _ = writeln!(s, "c_tau = {}", self.c_tau);
        let _ = writeln!(s, "k_q = {}", opt(self.k_q.map(|v| v.to_string())));
        let _ = writeln!(s, "k_p = {}", opt(self.k_p.map(|v| v.to_string())));
        let _ = writeln!(s, "folds = {}", self.folds);
        let _ = writeln!(s, "d = {}", self.d);
        let _ = writeln!(s, "s = {}", self.s);
        let _ = writeln!(s, "exact_angle = {}", self.exact_angle);
        let _ = writeln!(s, "amp_q = {}", self.amp_q);
        let _ = writeln!(s, "amp_p = {}", self.amp_p);
        let _ = writeln!(s, "gain = {}", self.gain);
        let _ = writeln!(s, "theory_params = {}", self.theory_params);
        let _ = writeln!(s, "lambda_c = {}", self.lambda_c);
        let _ = writeln!(s, "metric = {}", self.metric.name());
        let _ = writeln!(s, "out = {}", self.out.display());
        s
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let err = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.grid.is_empty() {
            return err("grid must not be empty");
        }
        if self.gammas.is_empty() {
            return err("gamma list must not be empty");
        }
        if self.methods.is_empty() {
            return err("methods must not be empty");
        }
        if self.reps == 0 {
            return err("reps must be >= 1");
        }
        let logistic = self.scenario == FigureId::Logistic;
        if let Some(m) = self.methods.iter().find(|m| m.is_knn() == logistic) {
            return Err(HarnessError::Config(format!(
                "method {m} does not apply to the {} scenario",
                self.scenario.name()
            )));
        }
        Ok(())
    }

    /// Scenario of one grid point.
    pub fn scenario_at(&self, gamma: f64, value: f64) -> Result<ScenarioSpec, HarnessError> {
        let kind = match self.scenario {
            FigureId::Band => ScenarioKind::BandLike {
                gamma,
                delta: value,
                amp_q: self.amp_q,
                gain: self.gain,
            },
            FigureId::Flip => ScenarioKind::FlippedSine {
                gamma,
                ratio: value,
                amp_q: self.amp_q,
                amp_p: self.amp_p,
            },
            FigureId::Logistic => ScenarioKind::LogisticRotation {
                d: self.d,
                s: self.s,
                delta: value,
                exact_angle: self.exact_angle,
            },
        };
        ScenarioSpec::new(kind).map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Experiment cells in canonical order: gamma outer, grid inner.
    pub fn cells(&self) -> Result<Vec<ExperimentCell>, HarnessError> {
        self.validate()?;
        let gammas: &[f64] = if self.scenario == FigureId::Logistic {
            &[1.0]
        } else {
            &self.gammas
        };
        let mut cells = Vec::new();
        for &gamma in gammas {
            for &v in &self.grid {
                let mut cell =
                    ExperimentCell::new(self.scenario_at(gamma, v)?, self.methods.clone(), self.n_q, self.n_p, self.n_test);
                cell.knn.overrides.tau = self.tau;
                cell.knn.overrides.c_tau = self.c_tau;
                cell.knn.overrides.k_q = self.k_q;
                cell.knn.overrides.k_p = self.k_p;
                cell.knn.pooled_folds = self.folds;
                cell.lasso.tau = self.tau;
                cell.lasso.c_tau = self.c_tau;
                cell.lasso.selection = if self.theory_params {
                    LambdaSelection::Theory { c: self.lambda_c }
                } else {
                    LambdaSelection::CrossValidated {
                        folds: self.folds,
                        grid_len: 30,
                        seed: 0,
                    }
                };
                cell.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
                cells.push(cell);
            }
        }
        Ok(cells)
    }
}

fn parse<T: FromStr>(v: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    v.trim().parse::<T>().map_err(|e| format!("`{v}`: {e}"))
}

fn parse_opt<T: FromStr>(v: &str) -> Result<Option<T>, String>
where
    T::Err: std::fmt::Display,
{
    match v.trim() {
        "" | "none" => Ok(None),
        other => parse(other).map(Some),
    }
}

pub fn parse_list(v: &str) -> Result<Vec<f64>, String> {
    v.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(parse)
        .collect()
}

/// Parses configuration text. A `scenario` line selects that figure's
/// defaults before the remaining keys are applied; otherwise `base` is used.
pub fn parse_config_str(text: &str, base: &ExperimentConfig) -> Result<ExperimentConfig, HarnessError> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| HarnessError::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(HarnessError::Config(format!("unknown key `{k}`")));
        }
        pairs.push((k.to_string(), v.trim().to_string()));
    }
    let mut cfg = match pairs.iter().find(|(k, _)| k == "scenario") {
        Some((_, v)) => ExperimentConfig::figure(v.parse()?),
        None => base.clone(),
    };
    for (k, v) in &pairs {
        cfg.set(k, v)?;
    }
    Ok(cfg)
}

pub fn parse_config(path: &Path, base: &ExperimentConfig) -> Result<ExperimentConfig, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text, base)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let base = ExperimentConfig::figure(FigureId::Band);
        assert_eq!(parse_config_str("", &base).unwrap(), base);
        assert_eq!(parse_config_str("# only a comment\n\n", &base).unwrap(), base);
    }

    #[test]
    fn round_trip() {
        let mut cfg = ExperimentConfig::figure(FigureId::Logistic);
        cfg.grid = vec![0.0, 0.1 + 0.2, 1.75];
        cfg.tau = Some(0.123456789);
        cfg.k_q = Some(9);
        cfg.exact_angle = true;
        let text = cfg.to_config_string();
        let back = parse_config_str(&text, &ExperimentConfig::figure(FigureId::Band)).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_key_is_named() {
        let base = ExperimentConfig::figure(FigureId::Band);
        let err = parse_config_str("reps = 3\nbogus = 1\n", &base).unwrap_err();
        assert!(err.to_string().contains("bogus"));
        assert!(parse_config_str("reps three", &base).is_err());
        assert!(parse_config_str("reps = three", &base).is_err());
    }

    #[test]
    fn scenario_line_selects_defaults() {
        let base = ExperimentConfig::figure(FigureId::Band);
        let cfg = parse_config_str("reps = 2\nscenario = logistic\n", &base).unwrap();
        assert_eq!(cfg.scenario, FigureId::Logistic);
        assert_eq!(cfg.methods, Method::LASSO.to_vec());
        assert_eq!(cfg.reps, 2);
    }

    #[test]
    fn incompatible_methods_rejected() {
        let mut cfg = ExperimentConfig::figure(FigureId::Band);
        cfg.methods = vec![Method::TabLasso];
        assert!(matches!(cfg.validate(), Err(HarnessError::Config(_))));
    }

    #[test]
    fn cells_follow_gamma_then_grid() {
        let mut cfg = ExperimentConfig::figure(FigureId::Band);
        cfg.grid = vec![0.0, 0.3];
        let cells = cfg.cells().unwrap();
        assert_eq!(cells.len(), 4);
        assert_eq!(cells[1].scenario.grid_param().1, 0.3);
        assert_eq!(cells[2].scenario.gamma(), Some(1.0));
        let logistic = ExperimentConfig::figure(FigureId::Logistic).cells().unwrap();
        assert_eq!(logistic.len(), 8);
    }
}
