//! TOML scenario files.
//!
//! Every file names a `mode` and carries the block that mode needs:
//!
//! | mode         | blocks                    |
//! |--------------|---------------------------|
//! | `consensus`  | `[consensus]`             |
//! | `synth`      | `[synth]`                 |
//! | `engage`     | `[engage]`                |
//! | `robustness` | `[consensus]`, `[sweep]`  |
//! | `oracle`     | `[consensus]`, `[oracle]` (optional) |
//!
//! Angles are in degrees, times in seconds, distances in metres. Agent
//! numbers in files start at 1, as in the tables they are copied from.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::agents::ConsensusInstance;
use crate::engagement::{
    default_boundary_time, design_gains, DragParams, EngagementScenario, MissileModel, ModelKind,
    Propulsion,
};
use crate::error::{usage, Error, Result};
use crate::guidance::PolarEngagementState;
use crate::oracle::OracleConfig;
use crate::synth::{SynthesisRequest, DEFAULT_MARGIN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Consensus,
    Synth,
    Engage,
    Robustness,
    Oracle,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Consensus => "consensus",
            Mode::Synth => "synth",
            Mode::Engage => "engage",
            Mode::Robustness => "robustness",
            Mode::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsensusBlock {
    pub states: Vec<f64>,
    pub gains: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthBlock {
    pub states: Vec<f64>,
    pub x_f: f64,
    pub t_f: f64,
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MissileBlock {
    pub r: f64,
    pub theta_deg: f64,
    pub gamma_deg: f64,
    pub v: f64,
}

/// Gain design targets, counted from the moment guidance closes.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignBlock {
    #[serde(default)]
    pub x_f: f64,
    pub t_f: f64,
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngageBlock {
    #[serde(default = "default_kind")]
    pub model: ModelKind,
    pub missiles: Vec<MissileBlock>,
    pub gains: Option<Vec<f64>>,
    pub design: Option<DesignBlock>,
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
    pub lethal_radius: Option<f64>,
    pub cos_guard: Option<f64>,
    pub boundary_time: Option<f64>,
    pub decimate: Option<usize>,
    pub gravity: Option<f64>,
    pub gravity_compensation: Option<bool>,
    pub guidance_start: Option<f64>,
    pub propulsion: Option<Propulsion>,
    pub drag: Option<DragParams>,
}

fn default_kind() -> ModelKind {
    ModelKind::ConstantSpeed
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    /// 1-based agent whose gain is swept.
    pub agent: usize,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleBlock {
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub consensus_band: Option<f64>,
    pub boundary_layer: Option<f64>,
    /// Extra random instances checked alongside the file's instance.
    #[serde(default)]
    pub random_instances: usize,
    #[serde(default)]
    pub seed: u64,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub mode: Mode,
    pub consensus: Option<ConsensusBlock>,
    pub synth: Option<SynthBlock>,
    pub engage: Option<EngageBlock>,
    pub sweep: Option<SweepBlock>,
    pub oracle: Option<OracleBlock>,
    #[serde(default)]
    pub output: OutputBlock,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| usage(format!("scenario parse error: {e}")))?;
        file.check_blocks()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Usage(msg) => usage(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn check_blocks(&self) -> Result<()> {
        let present = [
            ("consensus", self.consensus.is_some()),
            ("synth", self.synth.is_some()),
            ("engage", self.engage.is_some()),
            ("sweep", self.sweep.is_some()),
            ("oracle", self.oracle.is_some()),
        ];
        let allowed: &[&str] = match self.mode {
            Mode::Consensus => &["consensus"],
            Mode::Synth => &["synth"],
            Mode::Engage => &["engage"],
            Mode::Robustness => &["consensus", "sweep"],
            Mode::Oracle => &["consensus", "oracle"],
        };
        let required: &[&str] = match self.mode {
            Mode::Oracle => &["consensus"],
            _ => allowed,
        };
        for (name, here) in present {
            if here && !allowed.contains(&name) {
                return Err(usage(format!(
                    "[{name}] block not allowed in mode \"{}\"",
                    self.mode.name()
                )));
            }
            if !here && required.contains(&name) {
                return Err(usage(format!(
                    "mode \"{}\" requires a [{name}] block",
                    self.mode.name()
                )));
            }
        }
        Ok(())
    }

    pub fn consensus_instance(&self) -> Result<ConsensusInstance> {
        let block = self
            .consensus
            .as_ref()
            .ok_or_else(|| usage("missing [consensus] block"))?;
        ConsensusInstance::new(block.states.clone(), block.gains.clone())
            .map_err(|e| usage(format!("[consensus] states/gains: {}", strip(e))))
    }

    pub fn synthesis_request(&self) -> Result<SynthesisRequest> {
        let b = self
            .synth
            .as_ref()
            .ok_or_else(|| usage("missing [synth] block"))?;
        Ok(SynthesisRequest::new(b.states.clone(), b.x_f, b.t_f)
            .with_margin(b.margin.unwrap_or(DEFAULT_MARGIN)))
    }

    /// The sweep's agent as a 0-based index.
    pub fn sweep_agent(&self) -> Result<usize> {
        let b = self
            .sweep
            .as_ref()
            .ok_or_else(|| usage("missing [sweep] block"))?;
        let n = self.consensus.as_ref().map_or(0, |c| c.gains.len());
        if b.agent == 0 || b.agent > n {
            return Err(usage(format!(
                "[sweep] agent must be in 1..={n}, got {}",
                b.agent
            )));
        }
        Ok(b.agent - 1)
    }

    /// Oracle settings for `instance`; unset fields take the scaled defaults.
    pub fn oracle_config(&self, instance: &ConsensusInstance) -> Result<OracleConfig> {
        let mut cfg = OracleConfig::for_instance(instance)?;
        if let Some(b) = &self.oracle {
            if let Some(dt) = b.dt {
                cfg.dt = dt;
            }
            if let Some(h) = b.horizon {
                cfg.horizon = h;
            }
            if let Some(band) = b.consensus_band {
                cfg.consensus_band = band;
            }
            if let Some(layer) = b.boundary_layer {
                cfg.boundary_layer = layer;
            }
        }
        Ok(cfg)
    }

    /// Build the engagement, designing gains first if the file asks for it.
    pub fn engagement(&self) -> Result<EngagementScenario> {
        let b = self
            .engage
            .as_ref()
            .ok_or_else(|| usage("missing [engage] block"))?;
        if b.missiles.is_empty() {
            return Err(usage("[engage] missiles: empty missile list"));
        }
        let missiles: Vec<PolarEngagementState> = b
            .missiles
            .iter()
            .map(|m| PolarEngagementState {
                r: m.r,
                theta: m.theta_deg.to_radians(),
                gamma: m.gamma_deg.to_radians(),
                v: m.v,
            })
            .collect();
        let mut model = match b.model {
            ModelKind::ConstantSpeed => MissileModel::constant_speed(),
            ModelKind::Realistic => MissileModel::realistic(),
        };
        if let Some(p) = b.propulsion {
            model.propulsion = p;
            if b.model == ModelKind::Realistic && b.guidance_start.is_none() {
                model.guidance_start = p.boost_end;
            }
        }
        if let Some(d) = b.drag {
            model.drag = d;
        }
        if let Some(g) = b.gravity {
            model.gravity = g;
        }
        if let Some(c) = b.gravity_compensation {
            model.gravity_compensation = c;
        }
        if let Some(t) = b.guidance_start {
            model.guidance_start = t;
        }

        let n = missiles.len();
        let placeholder = vec![0.0; n];
        let mut scenario = EngagementScenario::new(missiles, model, placeholder);
        if let Some(dt) = b.dt {
            scenario = scenario.with_dt(dt);
        }
        if let Some(t) = b.t_max {
            scenario.t_max = t;
        }
        if let Some(r) = b.lethal_radius {
            scenario.guidance.lethal_radius = r;
        }
        if let Some(c) = b.cos_guard {
            scenario.guidance.cos_guard = c;
        }
        if let Some(d) = b.decimate {
            scenario.record_every = d;
        }
        if let Some(bt) = b.boundary_time {
            scenario.guidance.boundary_time = bt;
        }

        scenario.guidance.gains = match (&b.gains, &b.design) {
            (Some(g), None) => {
                if g.len() != n {
                    return Err(usage(format!(
                        "[engage] gains: {} gains for {n} missiles",
                        g.len()
                    )));
                }
                g.clone()
            }
            (None, Some(d)) => {
                design_gains(&scenario, d.x_f, d.t_f, d.margin.unwrap_or(DEFAULT_MARGIN))?
            }
            (Some(_), Some(_)) => {
                return Err(usage(
                    "[engage] give either gains or [engage.design], not both",
                ))
            }
            (None, None) => return Err(usage("[engage] needs gains or an [engage.design] block")),
        };
        Ok(scenario)
    }
}

/// Re-apply the default boundary layer after a step change from the command line.
pub fn override_dt(scenario: &mut EngagementScenario, dt: f64, keep_layer: bool) {
    let layer = scenario.guidance.boundary_time;
    scenario.dt = dt;
    scenario.guidance.boundary_time = if keep_layer {
        layer
    } else {
        default_boundary_time(dt)
    };
}

fn strip(e: Error) -> String {
    match e {
        Error::Usage(m) => m,
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_consensus_file() {
        let f = ScenarioFile::parse(
            r#"
mode = "consensus"
[consensus]
states = [1000.0, 2000.0, -5000.0, 4000.0, 6000.0]
gains = [20.0, 40.0, 30.0, 15.0, 25.0]
"#,
        )
        .unwrap();
        assert_eq!(f.consensus_instance().unwrap().n(), 5);
    }

    #[test]
    fn empty_agent_list_names_the_block() {
        let f = ScenarioFile::parse("mode = \"consensus\"\n[consensus]\nstates = []\ngains = []\n")
            .unwrap();
        let err = f.consensus_instance().unwrap_err().to_string();
        assert!(err.contains("[consensus]"), "{err}");
    }

    #[test]
    fn missing_field_is_reported_with_its_name() {
        let err = ScenarioFile::parse(
            r#"
mode = "engage"
[engage]
gains = [1e-3, 1e-3]
[[engage.missiles]]
r = 15000.0
theta_deg = 10.0
v = 400.0
"#,
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("gamma_deg"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn mode_and_blocks_must_match() {
        let text = "mode = \"synth\"\n[consensus]\nstates = [1.0, 2.0]\ngains = [1.0, 1.0]\n";
        assert!(ScenarioFile::parse(text).is_err());
        assert!(ScenarioFile::parse(
            "mode = \"robustness\"\n[consensus]\nstates = [1.0, 2.0]\ngains = [1.0, 1.0]\n"
        )
        .is_err());
        assert!(ScenarioFile::parse("mode = \"fly\"\n").is_err());
    }

    #[test]
    fn engagement_from_design_targets() {
        let f = ScenarioFile::parse(
            r#"
mode = "engage"
[engage]
[engage.design]
t_f = 20.0
[[engage.missiles]]
r = 15000.0
theta_deg = -170.0
gamma_deg = -90.0
v = 400.0
[[engage.missiles]]
r = 15000.0
theta_deg = -110.0
gamma_deg = -180.0
v = 400.0
"#,
        )
        .unwrap();
        let s = f.engagement().unwrap();
        // two agents: both gains are extremal, |θ̇(0)|/t_f
        assert!((s.guidance.gains[0] - 2.6262e-2 / 20.0).abs() < 1e-7);
        assert!((s.guidance.gains[1] - 2.5058e-2 / 20.0).abs() < 1e-7);
    }

    #[test]
    fn sweep_agent_is_one_based() {
        let f = ScenarioFile::parse(
            r#"
mode = "robustness"
[consensus]
states = [1.0, 2.0, 3.0]
gains = [1.0, 1.0, 1.0]
[sweep]
agent = 3
from = -2.0
to = 0.0
steps = 5
"#,
        )
        .unwrap();
        assert_eq!(f.sweep_agent().unwrap(), 2);
    }
}
