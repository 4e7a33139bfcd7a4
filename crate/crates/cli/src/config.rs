//! Run configuration: `[scenario]`, `[channel]`, `[protocol]`, `[sweep]` and
//! `[optimize]` sections, read from TOML or JSON.
//!
//! Units: variances in SNU, distances in km, attenuation in dB/km, `beta`,
//! `eta` and `eta_e` as fractions.

use std::path::Path;

use cvleak_core::optimize::{DistanceOptions, VmPolicy, DISTANCE_CAP_KM, DISTANCE_TOLERANCE_KM, VM_BRACKET, VM_TOLERANCE};
use cvleak_core::scenario::DEFAULT_ATTENUATION_DB_PER_KM;
use cvleak_core::{
    Attack, ChannelModel, Direction, LeakageInputs, MultimodeLeakageScenario, PremodLeakageScenario, ProtocolChoice, Scenario,
};
use serde::{Deserialize, Serialize};

use crate::error::{from_core, CliError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default)]
    pub protocol: ProtocolConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeConfig>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Multimode,
    Premod,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LeakageVariance {
    Single(f64),
    PerMode(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub v_s: f64,
    pub v_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Leakage input variance; absent means "same squeezing as the signal".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_l: Option<LeakageVariance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_modes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_e: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_es: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_km: Option<f64>,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default = "default_attenuation")]
    pub attenuation_db_per_km: f64,
}

fn default_attenuation() -> f64 {
    DEFAULT_ATTENUATION_DB_PER_KM
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            eta: None,
            distance_km: None,
            epsilon: 0.0,
            attenuation_db_per_km: DEFAULT_ATTENUATION_DB_PER_KM,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionConfig {
    Reverse,
    Direct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackConfig {
    Individual,
    Collective,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    #[serde(default = "default_direction")]
    pub direction: DirectionConfig,
    #[serde(default = "default_attack")]
    pub attack: AttackConfig,
    #[serde(default = "default_beta")]
    pub beta: f64,
}

fn default_direction() -> DirectionConfig {
    DirectionConfig::Reverse
}

fn default_attack() -> AttackConfig {
    AttackConfig::Collective
}

fn default_beta() -> f64 {
    1.0
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            direction: default_direction(),
            attack: default_attack(),
            beta: default_beta(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    VS,
    VM,
    K,
    VL,
    EtaE,
    VEs,
    Eta,
    Epsilon,
    DistanceKm,
    Beta,
}

impl Parameter {
    /// CSV column name, with its unit.
    pub fn header(self) -> &'static str {
        match self {
            Parameter::VS => "v_s_snu",
            Parameter::VM => "v_m_snu",
            Parameter::K => "k_ratio",
            Parameter::VL => "v_l_snu",
            Parameter::EtaE => "eta_e_fraction",
            Parameter::VEs => "v_es_snu",
            Parameter::Eta => "eta_fraction",
            Parameter::Epsilon => "epsilon_snu",
            Parameter::DistanceKm => "distance_km",
            Parameter::Beta => "beta_fraction",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Rate,
    IAb,
    Chi,
    Distance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizeFlag {
    VM,
    VS,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: Parameter,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
    #[serde(default = "default_quantity")]
    pub quantity: Quantity,
    #[serde(default)]
    pub optimize: Vec<OptimizeFlag>,
}

fn default_spacing() -> Spacing {
    Spacing::Linear
}

fn default_quantity() -> Quantity {
    Quantity::Rate
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizeTarget {
    VM,
    VS,
    Distance,
    K,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    #[serde(default = "default_target")]
    pub target: OptimizeTarget,
    #[serde(default = "default_bracket")]
    pub vm_bracket: [f64; 2],
    #[serde(default = "default_vm_tol")]
    pub vm_tolerance: f64,
    /// Optimise `V_M` inside the `v_s`, `distance` and `k` targets.
    #[serde(default = "default_true")]
    pub optimize_vm: bool,
    /// Optimise `V_S` at every probe of the `distance` target.
    #[serde(default)]
    pub optimize_v_s: bool,
    #[serde(default = "default_cap")]
    pub cap_km: f64,
    #[serde(default = "default_tol_km")]
    pub tol_km: f64,
}

fn default_target() -> OptimizeTarget {
    OptimizeTarget::VM
}

fn default_bracket() -> [f64; 2] {
    [VM_BRACKET.0, VM_BRACKET.1]
}

fn default_vm_tol() -> f64 {
    VM_TOLERANCE
}

fn default_true() -> bool {
    true
}

fn default_cap() -> f64 {
    DISTANCE_CAP_KM
}

fn default_tol_km() -> f64 {
    DISTANCE_TOLERANCE_KM
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            target: default_target(),
            vm_bracket: default_bracket(),
            vm_tolerance: default_vm_tol(),
            optimize_vm: true,
            optimize_v_s: false,
            cap_km: default_cap(),
            tol_km: default_tol_km(),
        }
    }
}

impl Config {
    pub fn parse_toml(text: &str) -> Result<Self> {
        let de = toml::Deserializer::new(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let key = error_key(&e.path().to_string(), &e.inner().message().to_string(), "toml");
            CliError::config(key, e.inner().message().trim().to_string())
        })
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        let cfg: Config = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let msg = e.inner().to_string();
            CliError::config(error_key(&e.path().to_string(), &msg, "json"), msg)
        })?;
        de.end().map_err(|e| CliError::config("json", e.to_string()))?;
        Ok(cfg)
    }

    /// Reads a config file; `.json` files are parsed as JSON, anything else
    /// as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let cfg = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Self::parse_json(&text)?
        } else {
            Self::parse_toml(&text)?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every section that is present.
    pub fn validate(&self) -> Result<()> {
        self.scenario()?;
        self.protocol()?;
        if self.channel.eta.is_some() || self.channel.distance_km.is_some() {
            self.channel()?;
        }
        if let Some(s) = &self.sweep {
            s.validate(self)?;
        }
        if let Some(o) = &self.optimize {
            o.validate()?;
        }
        Ok(())
    }

    pub fn scenario(&self) -> Result<Scenario> {
        let s = &self.scenario;
        let sc: Scenario = match s.kind {
            ScenarioKind::Multimode => {
                for (key, present) in [("scenario.eta_e", s.eta_e.is_some()), ("scenario.v_es", s.v_es.is_some())] {
                    if present {
                        return Err(CliError::config(key, "not used by kind = \"multimode\""));
                    }
                }
                let k = s.k.ok_or_else(|| CliError::config("scenario.k", "required for kind = \"multimode\""))?;
                let leakage = match (&s.v_l, s.n_modes) {
                    (None, n) => LeakageInputs::MatchSignal { n_modes: n.unwrap_or(1) },
                    (Some(LeakageVariance::Single(v)), n) => LeakageInputs::Fixed(vec![*v; n.unwrap_or(1)]),
                    (Some(LeakageVariance::PerMode(vs)), n) => {
                        if n.is_some_and(|n| n != vs.len()) {
                            return Err(CliError::config("scenario.n_modes", "does not match the length of scenario.v_l"));
                        }
                        LeakageInputs::Fixed(vs.clone())
                    }
                };
                MultimodeLeakageScenario {
                    v_s: s.v_s,
                    v_m: s.v_m,
                    k,
                    leakage,
                }
                .into()
            }
            ScenarioKind::Premod => {
                for (key, present) in [
                    ("scenario.k", s.k.is_some()),
                    ("scenario.v_l", s.v_l.is_some()),
                    ("scenario.n_modes", s.n_modes.is_some()),
                ] {
                    if present {
                        return Err(CliError::config(key, "not used by kind = \"premod\""));
                    }
                }
                let eta_e = s.eta_e.ok_or_else(|| CliError::config("scenario.eta_e", "required for kind = \"premod\""))?;
                PremodLeakageScenario {
                    v_es: s.v_es.unwrap_or(1.0),
                    ..PremodLeakageScenario::new(s.v_s, s.v_m, eta_e)
                }
                .into()
            }
        };
        sc.validate().map_err(|e| from_core("scenario", e))?;
        Ok(sc)
    }

    pub fn channel(&self) -> Result<ChannelModel> {
        let c = &self.channel;
        match (c.eta, c.distance_km) {
            (Some(_), Some(_)) => Err(CliError::config("channel.distance_km", "give either channel.eta or channel.distance_km")),
            (None, None) => Err(CliError::config("channel.eta", "one of channel.eta or channel.distance_km is required")),
            (Some(eta), None) => ChannelModel::new(eta, c.epsilon).map_err(|e| from_core("channel", e)),
            (None, Some(d)) => {
                ChannelModel::from_distance(d, c.epsilon, c.attenuation_db_per_km).map_err(|e| from_core("channel", e))
            }
        }
    }

    pub fn protocol(&self) -> Result<ProtocolChoice> {
        let p = &self.protocol;
        let direction = match p.direction {
            DirectionConfig::Reverse => Direction::Reverse,
            DirectionConfig::Direct => Direction::Direct,
        };
        let attack = match p.attack {
            AttackConfig::Individual => Attack::Individual,
            AttackConfig::Collective => Attack::Collective,
        };
        ProtocolChoice::new(direction, attack, p.beta).map_err(|e| from_core("protocol", e))
    }

    pub fn optimize_settings(&self) -> OptimizeConfig {
        self.optimize.clone().unwrap_or_default()
    }

    /// `V_M` policy: optimised over the configured bracket or fixed at the
    /// scenario value.
    pub fn vm_policy(&self, optimize: bool) -> VmPolicy {
        let o = self.optimize_settings();
        if optimize {
            VmPolicy::Optimize {
                bracket: (o.vm_bracket[0], o.vm_bracket[1]),
                tol: o.vm_tolerance,
            }
        } else {
            VmPolicy::Fixed(self.scenario.v_m)
        }
    }

    pub fn distance_options(&self, optimize_vm: bool, optimize_v_s: bool) -> DistanceOptions {
        let o = self.optimize_settings();
        DistanceOptions {
            vm: self.vm_policy(optimize_vm),
            optimize_v_s,
            cap_km: o.cap_km,
            tol_km: o.tol_km,
        }
    }

    /// Copy with one parameter replaced.
    pub fn with_parameter(&self, p: Parameter, value: f64) -> Result<Config> {
        let mut c = self.clone();
        match p {
            Parameter::VS => c.scenario.v_s = value,
            Parameter::VM => c.scenario.v_m = value,
            Parameter::K => c.scenario.k = Some(value),
            Parameter::VL => c.scenario.v_l = Some(LeakageVariance::Single(value)),
            Parameter::EtaE => c.scenario.eta_e = Some(value),
            Parameter::VEs => c.scenario.v_es = Some(value),
            Parameter::Eta => {
                c.channel.eta = Some(value);
                c.channel.distance_km = None;
            }
            Parameter::Epsilon => c.channel.epsilon = value,
            Parameter::DistanceKm => {
                c.channel.distance_km = Some(value);
                c.channel.eta = None;
            }
            Parameter::Beta => c.protocol.beta = value,
        }
        Ok(c)
    }
}

impl SweepConfig {
    pub fn validate(&self, cfg: &Config) -> Result<()> {
        if self.steps < 2 {
            return Err(CliError::config("sweep.steps", "must be at least 2"));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(CliError::config("sweep.start", "start and stop must be finite"));
        }
        if self.spacing == Spacing::Log && (self.start <= 0.0 || self.stop <= 0.0) {
            return Err(CliError::config("sweep.spacing", "log spacing needs positive start and stop"));
        }
        let multimode_only = [Parameter::K, Parameter::VL];
        let premod_only = [Parameter::EtaE, Parameter::VEs];
        let kind = cfg.scenario.kind;
        if (kind == ScenarioKind::Premod && multimode_only.contains(&self.parameter))
            || (kind == ScenarioKind::Multimode && premod_only.contains(&self.parameter))
        {
            return Err(CliError::config("sweep.parameter", format!("{:?} does not exist on this scenario", self.parameter)));
        }
        if self.quantity == Quantity::Distance && matches!(self.parameter, Parameter::Eta | Parameter::DistanceKm) {
            return Err(CliError::config("sweep.parameter", "a distance sweep cannot vary the channel transmittance"));
        }
        if self.optimize.contains(&OptimizeFlag::VM) && self.parameter == Parameter::VM {
            return Err(CliError::config("sweep.optimize", "v_m cannot be both swept and optimised"));
        }
        if self.optimize.contains(&OptimizeFlag::VS) && self.parameter == Parameter::VS {
            return Err(CliError::config("sweep.optimize", "v_s cannot be both swept and optimised"));
        }
        for v in self.points() {
            cfg.with_parameter(self.parameter, v)?.scenario()?;
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                if i == n - 1 {
                    return self.stop;
                }
                match self.spacing {
                    Spacing::Linear => self.start + f * (self.stop - self.start),
                    Spacing::Log => (self.start.ln() + f * (self.stop.ln() - self.start.ln())).exp(),
                }
            })
            .collect()
    }
}

impl OptimizeConfig {
    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.vm_bracket;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(CliError::config("optimize.vm_bracket", "needs 0 < lower < upper"));
        }
        if !(self.vm_tolerance > 0.0) {
            return Err(CliError::config("optimize.vm_tolerance", "must be positive"));
        }
        if !(self.tol_km > 0.0) {
            return Err(CliError::config("optimize.tol_km", "must be positive"));
        }
        if !(self.cap_km > self.tol_km && self.cap_km.is_finite()) {
            return Err(CliError::config("optimize.cap_km", "must exceed optimize.tol_km"));
        }
        Ok(())
    }
}

/// Dotted key for a deserialisation error; missing fields are reported
/// under their parent section.
fn error_key(path: &str, msg: &str, fallback: &str) -> String {
    let path = if path == "." { "" } else { path };
    let missing = msg
        .find("missing field `")
        .and_then(|i| msg[i + 15..].find('`').map(|j| msg[i + 15..i + 15 + j].to_string()));
    match (path.is_empty(), missing) {
        (true, Some(m)) => m,
        (false, Some(m)) => format!("{path}.{m}"),
        (false, None) => path.to_string(),
        (true, None) => fallback.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sweep(start: f64, stop: f64, steps: usize, spacing: Spacing) -> SweepConfig {
        SweepConfig {
            parameter: Parameter::K,
            start,
            stop,
            steps,
            spacing,
            quantity: Quantity::Rate,
            optimize: vec![],
        }
    }

    #[test]
    fn grid_ends_exactly_at_stop() {
        let lin = sweep(0.0, 1.2, 7, Spacing::Linear).points();
        assert_eq!(lin.len(), 7);
        assert_eq!((lin[0], lin[6]), (0.0, 1.2));
        let log = sweep(0.1, 1000.0, 5, Spacing::Log).points();
        assert_eq!(log[4], 1000.0);
        for (got, want) in log.iter().zip([0.1, 1.0, 10.0, 100.0]) {
            assert!((got / want - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn error_key_prefers_the_missing_field() {
        assert_eq!(error_key("scenario", "missing field `k`", "toml"), "scenario.k");
        assert_eq!(error_key(".", "missing field `scenario`", "toml"), "scenario");
        assert_eq!(error_key("channel.eta", "invalid type", "toml"), "channel.eta");
        assert_eq!(error_key("", "expected value", "json"), "json");
    }

    #[test]
    fn multimode_leakage_forms() {
        let text = "[scenario]\nkind = \"multimode\"\nv_s = 0.5\nv_m = 4.0\nk = 1.0\nv_l = [0.5, 1.0]\n";
        let cfg = Config::parse_toml(text).unwrap();
        let Scenario::Multimode(m) = cfg.scenario().unwrap() else { panic!() };
        assert_eq!(m.leakage, LeakageInputs::Fixed(vec![0.5, 1.0]));
        let bad = Config::parse_toml(&format!("{text}n_modes = 3\n")).unwrap();
        assert!(matches!(bad.scenario(), Err(CliError::Config { key, .. }) if key == "scenario.n_modes"));
    }

    #[test]
    fn channel_needs_exactly_one_of_eta_and_distance() {
        let mut cfg = Config::parse_toml("[scenario]\nkind = \"premod\"\nv_s = 0.5\nv_m = 4.0\neta_e = 0.5\n").unwrap();
        assert!(cfg.channel().is_err());
        cfg.channel.eta = Some(0.5);
        cfg.channel.distance_km = Some(10.0);
        assert!(cfg.channel().is_err());
        cfg.channel.eta = None;
        let eta = cfg.channel().unwrap().eta;
        assert!((eta - 10f64.powf(-0.2)).abs() < 1e-12);
    }
}
