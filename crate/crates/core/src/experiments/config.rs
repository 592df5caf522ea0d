use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BudgetRule, CheeseParams};
use crate::potentials::PotentialKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    CheeseBuild,
    CapacityBall,
    Wiener,
    ExceptionalSet,
    DqTheorem,
    PipelineIdentity,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::CheeseBuild,
        Scenario::CapacityBall,
        Scenario::Wiener,
        Scenario::ExceptionalSet,
        Scenario::DqTheorem,
        Scenario::PipelineIdentity,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::CheeseBuild => "cheese-build",
            Scenario::CapacityBall => "capacity-ball",
            Scenario::Wiener => "wiener",
            Scenario::ExceptionalSet => "exceptional-set",
            Scenario::DqTheorem => "dq-theorem",
            Scenario::PipelineIdentity => "pipeline-identity",
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn check(ok: bool, field: &str, rule: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(field, rule))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheeseConfig {
    pub alpha: f64,
    /// `geometric` (`s_n = scale·ratio^n`) or `power-law` (`s_n = scale·n^{-exponent}`).
    pub budget: String,
    pub budget_scale: f64,
    pub budget_ratio: f64,
    pub budget_exponent: f64,
    pub n_max: u32,
    pub balls_per_annulus: u32,
    pub safety: f64,
    pub base: [f64; 2],
}

impl Default for CheeseConfig {
    fn default() -> Self {
        let p = CheeseParams::default();
        CheeseConfig {
            alpha: p.alpha,
            budget: "geometric".into(),
            budget_scale: 1.0,
            budget_ratio: 0.5,
            budget_exponent: 2.0,
            n_max: p.n_max,
            balls_per_annulus: p.balls_per_annulus,
            safety: p.safety,
            base: p.base,
        }
    }
}

impl CheeseConfig {
    pub fn params(&self, seed: u64) -> Result<CheeseParams> {
        check(self.alpha > 0.0 && self.alpha < 1.0, "alpha", "0<α<1")?;
        let budget = match self.budget.as_str() {
            "geometric" => BudgetRule::Geometric {
                scale: self.budget_scale,
                ratio: self.budget_ratio,
            },
            "power-law" => BudgetRule::PowerLaw {
                scale: self.budget_scale,
                exponent: self.budget_exponent,
            },
            _ => return Err(Error::invalid("budget", "one of geometric, power-law")),
        };
        budget.validate()?;
        check((1..=60).contains(&self.n_max), "n_max", "1 ≤ n_max ≤ 60")?;
        check(self.balls_per_annulus >= 1, "balls_per_annulus", "at least one ball per annulus")?;
        check(self.safety > 0.0 && self.safety < 1.0, "safety", "0 < safety < 1")?;
        Ok(CheeseParams {
            alpha: self.alpha,
            budget,
            n_max: self.n_max,
            balls_per_annulus: self.balls_per_annulus,
            seed,
            base: self.base,
            square: None,
            safety: self.safety,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheeseBuildConfig {
    pub cheese: CheeseConfig,
    pub density_n_min: u32,
    pub density_n_max: u32,
    pub grid_per_radius: u32,
}

impl Default for CheeseBuildConfig {
    fn default() -> Self {
        CheeseBuildConfig {
            cheese: CheeseConfig::default(),
            density_n_min: 1,
            density_n_max: 10,
            grid_per_radius: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CapacityBallConfig {
    pub d: usize,
    pub s: f64,
    pub radius: f64,
    pub center: Vec<f64>,
    pub levels: Vec<u32>,
    pub lattice_per_axis: usize,
    pub lattice_reach: f64,
}

impl Default for CapacityBallConfig {
    fn default() -> Self {
        CapacityBallConfig {
            d: 2,
            s: 1.0,
            radius: 1.0,
            center: vec![0.0, 0.0],
            levels: vec![1, 2, 3],
            lattice_per_axis: 20,
            lattice_reach: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WienerConfig {
    /// `exceptional` (`{|a−b|^s U^μ(a) ≥ ε}`) or `ball` (`𝔹(b, ball_radius)`).
    pub set: String,
    pub s: f64,
    pub epsilon: f64,
    /// `[x, y, mass]` rows.
    pub atoms: Vec<[f64; 3]>,
    pub ball_radius: f64,
    pub base: [f64; 2],
    pub n_min: u32,
    pub n_max: u32,
    pub level: u32,
}

/// Three unit atoms at distance ≥ 0.1 from the origin.
pub fn default_atoms() -> Vec<[f64; 3]> {
    vec![[0.1, 0.0, 1.0], [-0.12, 0.15, 1.0], [0.05, -0.3, 1.0]]
}

impl Default for WienerConfig {
    fn default() -> Self {
        WienerConfig {
            set: "exceptional".into(),
            s: 1.0,
            epsilon: 0.5,
            atoms: default_atoms(),
            ball_radius: 1.0 / 16.0,
            base: [0.0, 0.0],
            n_min: 1,
            n_max: 10,
            level: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExceptionalSetConfig {
    /// `single`, `double`, `refined`, `h-tilde` or `h-kernel`.
    pub kind: String,
    pub s: f64,
    pub t: f64,
    pub u: f64,
    pub alpha: f64,
    /// `ε` (or `δ`, `M`); defaults to 1, or `6‖μ‖` when `u = min{1, s, t}`.
    pub threshold: Option<f64>,
    /// `[x, y, mass]` rows for `single`.
    pub atoms: Vec<[f64; 3]>,
    /// `[z_re, z_im, w_re, w_im, c_re, c_im]` rows for the product kinds.
    pub product_atoms: Vec<[f64; 6]>,
    pub base: [f64; 2],
    pub n_min: u32,
    pub n_max: u32,
    /// `grid` or `monte-carlo`.
    pub sampler: String,
    pub grid_per_radius: u32,
    pub samples: usize,
}

impl Default for ExceptionalSetConfig {
    fn default() -> Self {
        ExceptionalSetConfig {
            kind: "single".into(),
            s: 1.0,
            t: 0.5,
            u: 0.25,
            alpha: 0.5,
            threshold: Some(0.5),
            atoms: default_atoms(),
            product_atoms: vec![[0.2, 0.1, -0.1, 0.3, 1.0, 0.0], [0.15, -0.2, 0.3, 0.25, 0.0, 1.0]],
            base: [0.0, 0.0],
            n_min: 1,
            n_max: 10,
            sampler: "grid".into(),
            grid_per_radius: 64,
            samples: 20_000,
        }
    }
}

impl ExceptionalSetConfig {
    pub fn kind(&self) -> Result<PotentialKind> {
        Ok(match self.kind.as_str() {
            "single" => PotentialKind::Single { s: self.s },
            "double" => PotentialKind::Double { s: self.s, t: self.t },
            "refined" => PotentialKind::Refined {
                s: self.s,
                t: self.t,
                u: self.u,
            },
            "h-tilde" => PotentialKind::HTilde { alpha: self.alpha },
            "h-kernel" => PotentialKind::HKernel { alpha: self.alpha },
            _ => {
                return Err(Error::invalid(
                    "kind",
                    "one of single, double, refined, h-tilde, h-kernel",
                ))
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DqTheoremConfig {
    pub cheese: CheeseConfig,
    pub coefficient_exponent: f64,
    /// Good-set tolerance relative to `|∂f|`.
    pub epsilon_relative: f64,
    pub shell_min: u32,
    pub shell_max: u32,
    pub grid_per_radius: u32,
    pub delta: f64,
    /// Defaults to `6‖μ‖`.
    pub m: Option<f64>,
    pub ray_m_max: u32,
    pub ray_m_ref: u32,
    pub panel_size: usize,
}

impl Default for DqTheoremConfig {
    fn default() -> Self {
        DqTheoremConfig {
            cheese: CheeseConfig::default(),
            coefficient_exponent: 2.0,
            epsilon_relative: 0.1,
            shell_min: 4,
            shell_max: 10,
            grid_per_radius: 64,
            delta: 1.0,
            m: None,
            ray_m_max: 20,
            ray_m_ref: 12,
            panel_size: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineIdentityConfig {
    pub triples: usize,
    pub alpha: f64,
    pub atoms: usize,
    pub base: [f64; 2],
}

impl Default for PipelineIdentityConfig {
    fn default() -> Self {
        PipelineIdentityConfig {
            triples: 20,
            alpha: 0.5,
            atoms: 4,
            base: [0.0, 0.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "scenario", rename_all = "kebab-case")]
pub enum ScenarioConfig {
    CheeseBuild(CheeseBuildConfig),
    CapacityBall(CapacityBallConfig),
    Wiener(WienerConfig),
    ExceptionalSet(ExceptionalSetConfig),
    DqTheorem(DqTheoremConfig),
    PipelineIdentity(PipelineIdentityConfig),
}

/// A scenario with its parameters, seed and output directory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    /// `None` until set by the config file or the command line.
    pub seed: Option<u64>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub params: ScenarioConfig,
}

impl ExperimentConfig {
    pub fn defaults(scenario: Scenario) -> Self {
        let params = match scenario {
            Scenario::CheeseBuild => ScenarioConfig::CheeseBuild(Default::default()),
            Scenario::CapacityBall => ScenarioConfig::CapacityBall(Default::default()),
            Scenario::Wiener => ScenarioConfig::Wiener(Default::default()),
            Scenario::ExceptionalSet => ScenarioConfig::ExceptionalSet(Default::default()),
            Scenario::DqTheorem => ScenarioConfig::DqTheorem(Default::default()),
            Scenario::PipelineIdentity => ScenarioConfig::PipelineIdentity(Default::default()),
        };
        ExperimentConfig {
            seed: None,
            out: None,
            params,
        }
    }

    /// Fill seed and output directory from the command line where the config
    /// file left them unset.
    pub fn with_cli(mut self, seed: Option<u64>, out: Option<PathBuf>) -> Self {
        self.seed = self.seed.or(seed);
        self.out = self.out.or(out);
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn scenario(&self) -> Scenario {
        match self.params {
            ScenarioConfig::CheeseBuild(_) => Scenario::CheeseBuild,
            ScenarioConfig::CapacityBall(_) => Scenario::CapacityBall,
            ScenarioConfig::Wiener(_) => Scenario::Wiener,
            ScenarioConfig::ExceptionalSet(_) => Scenario::ExceptionalSet,
            ScenarioConfig::DqTheorem(_) => Scenario::DqTheorem,
            ScenarioConfig::PipelineIdentity(_) => Scenario::PipelineIdentity,
        }
    }

    /// Parse a TOML key-value file. Top-level `seed`, `out` and (optionally)
    /// `scenario` are common; every other key belongs to the scenario.
    pub fn from_toml(scenario: Scenario, text: &str) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Format(e.to_string()))?;
        if let Some(v) = table.remove("scenario") {
            let named = v.as_str().ok_or_else(|| Error::invalid("scenario", "a string"))?;
            if named != scenario.name() {
                return Err(Error::invalid(
                    "scenario",
                    format!("config is for `{named}`, not `{scenario}`"),
                ));
            }
        }
        let seed = match table.remove("seed") {
            None => None,
            Some(toml::Value::Integer(i)) if i >= 0 => Some(i as u64),
            Some(_) => return Err(Error::invalid("seed", "a nonnegative integer")),
        };
        let out = match table.remove("out") {
            None => None,
            Some(toml::Value::String(s)) => Some(PathBuf::from(s)),
            Some(_) => return Err(Error::invalid("out", "a path string")),
        };
        let rest = toml::Value::Table(table);
        fn de<T: serde::de::DeserializeOwned>(v: toml::Value) -> Result<T> {
            v.try_into().map_err(|e: toml::de::Error| Error::Format(e.message().to_string()))
        }
        let params = match scenario {
            Scenario::CheeseBuild => ScenarioConfig::CheeseBuild(de(rest)?),
            Scenario::CapacityBall => ScenarioConfig::CapacityBall(de(rest)?),
            Scenario::Wiener => ScenarioConfig::Wiener(de(rest)?),
            Scenario::ExceptionalSet => ScenarioConfig::ExceptionalSet(de(rest)?),
            Scenario::DqTheorem => ScenarioConfig::DqTheorem(de(rest)?),
            Scenario::PipelineIdentity => ScenarioConfig::PipelineIdentity(de(rest)?),
        };
        Ok(ExperimentConfig { seed, out, params })
    }
}
