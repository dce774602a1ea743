//! Experiment configuration: spec strings, the flat TOML config file, CLI
//! overrides, and the fully resolved form embedded in every summary.
//!
//! Spec-string grammar:
//!
//! - game: `rps`, `brps`, `brps_w`, `kuhn`, `leduc`, or `brps:12,1,1`,
//!   `kuhn:2` (bet size)
//! - payoff schedule: `direct:(12,1,1)x2500;(6.5,6.5,1)x2500;(1,12,1)x2500`
//!   or `continuous:...` (first stage held, later stages are transition
//!   windows)
//! - bet schedule (Kuhn): `direct:1x2500;2x2500;-2x2500;6x2500`
//! - algorithm: `bnn`, `replicator`, `reg-rd:lambda=0.1,k_ref=500`,
//!   `bnnac:k=10,batch=8,alpha=0.1,beta=0.1`
//! - step schedule: `power:c=1,t0=10` or `const:0.05`
//! - noise: `gauss:0.1` or `uniform:0.1`
//! - seeds: `0..29` (inclusive) or `0,3,17`

use serde::{Deserialize, Serialize};

use bnn_core::dynamics::{NoiseKind, NoiseModel, StepSchedule};
use bnn_core::nfg::RpsParams;
use bnn_core::schedule::{ParamSchedule, ScheduleMode, Stage};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GameSpec {
    /// The rock-paper-scissors family, possibly nonstationary.
    Rps { schedule: ParamSchedule<RpsParams> },
    /// Kuhn poker with a (possibly scheduled) bet size.
    Kuhn { bet: ParamSchedule<f64> },
    Leduc,
}

impl GameSpec {
    pub fn is_extensive(&self) -> bool {
        !matches!(self, GameSpec::Rps { .. })
    }

    pub fn is_nonstationary(&self) -> bool {
        match self {
            GameSpec::Rps { schedule } => !schedule.is_static(),
            GameSpec::Kuhn { bet } => !bet.is_static(),
            GameSpec::Leduc => false,
        }
    }

    /// Stage index of the instantaneous game.
    pub fn stage_id(&self, t: u64) -> u64 {
        match self {
            GameSpec::Rps { schedule } => schedule.stage_index(t) as u64,
            GameSpec::Kuhn { bet } => bet.stage_index(t) as u64,
            GameSpec::Leduc => 0,
        }
    }

    /// Whether any scheduled bet size is negative (signed-transfer payoffs).
    pub fn has_negative_bet(&self) -> bool {
        match self {
            GameSpec::Kuhn { bet } => bet.stages().iter().any(|s| s.params < 0.0),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlgoSpec {
    Bnn,
    Replicator,
    RegRd { lambda: f64, k_ref: u64 },
    Bnnac { k_actor: u64, batch: usize, alpha: f64, beta: f64 },
}

impl AlgoSpec {
    pub fn label(&self) -> String {
        match self {
            AlgoSpec::Bnn => "bnn".into(),
            AlgoSpec::Replicator => "replicator".into(),
            AlgoSpec::RegRd { lambda, k_ref } => format!("reg-rd_l{lambda}_k{k_ref}"),
            AlgoSpec::Bnnac { .. } => "bnnac".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    /// Random interior profile per seed (default).
    Random,
    Uniform,
}

/// Fully resolved experiment: every run embeds this in its summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub game: GameSpec,
    pub algo: AlgoSpec,
    pub sigma: f64,
    pub noise_kind: NoiseKind,
    pub eta: StepSchedule,
    pub iterations: u64,
    pub eval_interval: u64,
    pub seeds: Vec<u64>,
    pub init: InitKind,
    pub policy_floor: f64,
    /// Run a Monte-Carlo bias probe at each seed's final profile.
    pub bias_probe: bool,
    pub label: String,
}

impl ExperimentConfig {
    pub fn noise(&self) -> NoiseModel {
        NoiseModel { sigma: self.sigma, kind: self.noise_kind }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(HarnessError::Config("iterations must be positive".into()));
        }
        if self.eval_interval == 0 {
            return Err(HarnessError::Config("eval_interval must be positive".into()));
        }
        if self.seeds.is_empty() {
            return Err(HarnessError::Config("at least one seed required".into()));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            return Err(HarnessError::Config("seeds must be distinct".into()));
        }
        if self.sigma < 0.0 || !self.sigma.is_finite() {
            return Err(HarnessError::Config("sigma must be finite and >= 0".into()));
        }
        if matches!(self.algo, AlgoSpec::Bnnac { .. }) && !self.game.is_extensive() {
            return Err(HarnessError::Config(
                "bnnac runs on extensive-form games only".into(),
            ));
        }
        Ok(())
    }
}

/// Raw, partially-specified configuration: file values overlaid by CLI
/// flags, then resolved with defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub game: Option<String>,
    pub schedule: Option<String>,
    pub bet_schedule: Option<String>,
    pub algo: Option<String>,
    pub sigma: Option<f64>,
    pub noise: Option<String>,
    pub eta: Option<String>,
    pub iters: Option<u64>,
    pub eval_interval: Option<u64>,
    pub seeds: Option<String>,
    pub init: Option<String>,
    pub policy_floor: Option<f64>,
    pub bias_probe: Option<bool>,
    pub label: Option<String>,
}

impl RawConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::Config(format!("config file: {e}")))
    }

    /// Field-wise overlay: values in `over` win.
    pub fn overlay(mut self, over: RawConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(game, schedule, bet_schedule, algo, sigma, noise, eta, iters, eval_interval,
              seeds, init, policy_floor, bias_probe, label);
        self
    }

    pub fn resolve(self) -> Result<ExperimentConfig> {
        let game = parse_game(
            self.game.as_deref().unwrap_or("brps"),
            self.schedule.as_deref(),
            self.bet_schedule.as_deref(),
        )?;
        let algo = parse_algo(self.algo.as_deref().unwrap_or("bnn"))?;
        let (sigma, noise_kind) = match (&self.noise, self.sigma) {
            (Some(spec), None) => parse_noise(spec)?,
            (None, Some(s)) => (s, NoiseKind::Gaussian),
            (None, None) => (0.0, NoiseKind::Gaussian),
            (Some(spec), Some(s)) => {
                let (ns, kind) = parse_noise(spec)?;
                if (ns - s).abs() > 1e-12 {
                    return Err(HarnessError::Config(format!(
                        "conflicting noise levels: --sigma {s} vs noise spec {spec}"
                    )));
                }
                (ns, kind)
            }
        };
        let eta = parse_eta(self.eta.as_deref().unwrap_or("power:c=1,t0=10"))?;
        let eval_interval = self
            .eval_interval
            .unwrap_or(if game.is_extensive() { 50 } else { 10 });
        let init = match self.init.as_deref().unwrap_or("random") {
            "random" => InitKind::Random,
            "uniform" => InitKind::Uniform,
            other => {
                return Err(HarnessError::Config(format!(
                    "unknown init '{other}' (random|uniform)"
                )))
            }
        };
        let config = ExperimentConfig {
            label: self.label.unwrap_or_default(),
            game,
            algo,
            sigma,
            noise_kind,
            eta,
            iterations: self.iters.unwrap_or(10_000),
            eval_interval,
            seeds: parse_seeds(self.seeds.as_deref().unwrap_or("0..9"))?,
            init,
            policy_floor: self.policy_floor.unwrap_or(1e-9),
            bias_probe: self.bias_probe.unwrap_or(false),
        };
        let config = ExperimentConfig {
            label: if config.label.is_empty() { default_label(&config) } else { config.label },
            ..config
        };
        config.validate()?;
        Ok(config)
    }
}

fn default_label(config: &ExperimentConfig) -> String {
    let game = match &config.game {
        GameSpec::Rps { schedule } => {
            let p = schedule.stages()[0].params;
            if !schedule.is_static() {
                "brps_nonstat".to_string()
            } else if p.with_fourth_action {
                "brps_w".to_string()
            } else if p.a_rp == 1.0 && p.a_ps == 1.0 && p.a_sr == 1.0 {
                "rps".to_string()
            } else {
                "brps".to_string()
            }
        }
        GameSpec::Kuhn { bet } => {
            if bet.is_static() { "kuhn".to_string() } else { "kuhn_nonstat".to_string() }
        }
        GameSpec::Leduc => "leduc".to_string(),
    };
    format!("{game}_{}_sigma{}", config.algo.label(), config.sigma)
}

fn bad(what: &str, spec: &str) -> HarnessError {
    HarnessError::Config(format!("cannot parse {what} spec '{spec}'"))
}

pub fn parse_game(
    game: &str,
    schedule: Option<&str>,
    bet_schedule: Option<&str>,
) -> Result<GameSpec> {
    let (name, inline) = match game.split_once(':') {
        Some((n, rest)) => (n, Some(rest)),
        None => (game, None),
    };
    match name {
        "rps" | "brps" | "brps_w" => {
            if bet_schedule.is_some() {
                return Err(HarnessError::Config(
                    "bet_schedule applies to kuhn only".into(),
                ));
            }
            let with_w = name == "brps_w";
            let schedule = match (schedule, inline) {
                (Some(s), None) => parse_rps_schedule(s, with_w)?,
                (None, Some(params)) => {
                    ParamSchedule::constant(parse_rps_params(params, with_w)?)
                }
                (None, None) => {
                    let params = if name == "rps" {
                        RpsParams::standard()
                    } else {
                        let mut p = RpsParams::new(12.0, 1.0, 1.0);
                        p.with_fourth_action = with_w;
                        p
                    };
                    ParamSchedule::constant(params)
                }
                (Some(_), Some(_)) => {
                    return Err(HarnessError::Config(
                        "give either inline game params or a schedule, not both".into(),
                    ))
                }
            };
            Ok(GameSpec::Rps { schedule })
        }
        "kuhn" => {
            if schedule.is_some() {
                return Err(HarnessError::Config(
                    "payoff schedules apply to the rps family; use bet_schedule for kuhn".into(),
                ));
            }
            let bet = match (bet_schedule, inline) {
                (Some(s), None) => parse_bet_schedule(s)?,
                (None, Some(b)) => ParamSchedule::constant(
                    b.parse::<f64>().map_err(|_| bad("bet size", b))?,
                ),
                (None, None) => ParamSchedule::constant(1.0),
                (Some(_), Some(_)) => {
                    return Err(HarnessError::Config(
                        "give either an inline bet size or a bet schedule, not both".into(),
                    ))
                }
            };
            Ok(GameSpec::Kuhn { bet })
        }
        "leduc" => {
            if schedule.is_some() || bet_schedule.is_some() || inline.is_some() {
                return Err(HarnessError::Config("leduc takes no parameters".into()));
            }
            Ok(GameSpec::Leduc)
        }
        other => Err(HarnessError::Config(format!(
            "unknown game '{other}' (rps|brps|brps_w|kuhn|leduc)"
        ))),
    }
}

fn parse_mode(mode: &str) -> Result<ScheduleMode> {
    match mode {
        "direct" => Ok(ScheduleMode::Direct),
        "continuous" => Ok(ScheduleMode::Continuous),
        "static" => Ok(ScheduleMode::Static),
        other => Err(HarnessError::Config(format!(
            "unknown schedule mode '{other}' (direct|continuous|static)"
        ))),
    }
}

fn parse_rps_params(text: &str, with_fourth: bool) -> Result<RpsParams> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(bad("rps params", text));
    }
    let vals: Vec<f64> = parts
        .iter()
        .map(|p| p.parse::<f64>().map_err(|_| bad("rps params", text)))
        .collect::<Result<_>>()?;
    let mut params = RpsParams::new(vals[0], vals[1], vals[2]);
    params.with_fourth_action = with_fourth;
    Ok(params)
}

pub fn parse_rps_schedule(spec: &str, with_fourth: bool) -> Result<ParamSchedule<RpsParams>> {
    let (mode, stages_text) = spec.split_once(':').ok_or_else(|| bad("schedule", spec))?;
    let mode = parse_mode(mode)?;
    let mut stages = Vec::new();
    for stage in stages_text.split(';') {
        let stage = stage.trim();
        let (params_text, dur_text) = stage.rsplit_once('x').ok_or_else(|| bad("stage", stage))?;
        let params_text = params_text
            .trim()
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| bad("stage params", stage))?;
        stages.push(Stage {
            params: parse_rps_params(params_text, with_fourth)?,
            duration: dur_text.trim().parse().map_err(|_| bad("stage duration", stage))?,
        });
    }
    ParamSchedule::new(mode, stages).map_err(|e| HarnessError::Config(e.to_string()))
}

pub fn parse_bet_schedule(spec: &str) -> Result<ParamSchedule<f64>> {
    let (mode, stages_text) = spec.split_once(':').ok_or_else(|| bad("bet schedule", spec))?;
    let mode = parse_mode(mode)?;
    let mut stages = Vec::new();
    for stage in stages_text.split(';') {
        let stage = stage.trim();
        let (bet_text, dur_text) = stage.rsplit_once('x').ok_or_else(|| bad("bet stage", stage))?;
        stages.push(Stage {
            params: bet_text.trim().parse::<f64>().map_err(|_| bad("bet size", stage))?,
            duration: dur_text.trim().parse().map_err(|_| bad("stage duration", stage))?,
        });
    }
    ParamSchedule::new(mode, stages).map_err(|e| HarnessError::Config(e.to_string()))
}

fn parse_kv(text: &str) -> Result<Vec<(String, String)>> {
    text.split(',')
        .map(|pair| {
            pair.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| bad("key=value", pair))
        })
        .collect()
}

pub fn parse_algo(spec: &str) -> Result<AlgoSpec> {
    let (name, args) = match spec.split_once(':') {
        Some((n, rest)) => (n, Some(rest)),
        None => (spec, None),
    };
    match name {
        "bnn" => Ok(AlgoSpec::Bnn),
        "replicator" => Ok(AlgoSpec::Replicator),
        "reg-rd" => {
            let mut lambda = 0.1;
            let mut k_ref = 500;
            if let Some(args) = args {
                for (k, v) in parse_kv(args)? {
                    match k.as_str() {
                        "lambda" => lambda = v.parse().map_err(|_| bad("lambda", spec))?,
                        "k_ref" => k_ref = v.parse().map_err(|_| bad("k_ref", spec))?,
                        _ => return Err(bad("reg-rd option", spec)),
                    }
                }
            }
            Ok(AlgoSpec::RegRd { lambda, k_ref })
        }
        "bnnac" => {
            let mut k_actor = 10;
            let mut batch = 8;
            let mut alpha = 0.1;
            let mut beta = 0.1;
            if let Some(args) = args {
                for (k, v) in parse_kv(args)? {
                    match k.as_str() {
                        "k" | "k_actor" => k_actor = v.parse().map_err(|_| bad("k", spec))?,
                        "batch" => batch = v.parse().map_err(|_| bad("batch", spec))?,
                        "alpha" => alpha = v.parse().map_err(|_| bad("alpha", spec))?,
                        "beta" => beta = v.parse().map_err(|_| bad("beta", spec))?,
                        _ => return Err(bad("bnnac option", spec)),
                    }
                }
            }
            Ok(AlgoSpec::Bnnac { k_actor, batch, alpha, beta })
        }
        other => Err(HarnessError::Config(format!(
            "unknown algorithm '{other}' (bnn|replicator|reg-rd|bnnac)"
        ))),
    }
}

pub fn parse_eta(spec: &str) -> Result<StepSchedule> {
    let (kind, args) = spec.split_once(':').ok_or_else(|| bad("step schedule", spec))?;
    match kind {
        "const" => Ok(StepSchedule::Constant {
            c: args.parse().map_err(|_| bad("constant step", spec))?,
        }),
        "power" => {
            let mut c = 1.0;
            let mut t0 = 10.0;
            for (k, v) in parse_kv(args)? {
                match k.as_str() {
                    "c" => c = v.parse().map_err(|_| bad("c", spec))?,
                    "t0" => t0 = v.parse().map_err(|_| bad("t0", spec))?,
                    _ => return Err(bad("power option", spec)),
                }
            }
            Ok(StepSchedule::Power { c, t0 })
        }
        other => Err(HarnessError::Config(format!(
            "unknown step schedule '{other}' (power|const)"
        ))),
    }
}

pub fn parse_noise(spec: &str) -> Result<(f64, NoiseKind)> {
    let (kind, sigma) = spec.split_once(':').ok_or_else(|| bad("noise", spec))?;
    let sigma: f64 = sigma.parse().map_err(|_| bad("noise level", spec))?;
    match kind {
        "gauss" => Ok((sigma, NoiseKind::Gaussian)),
        "uniform" => Ok((sigma, NoiseKind::UniformBounded)),
        other => Err(HarnessError::Config(format!(
            "unknown noise kind '{other}' (gauss|uniform)"
        ))),
    }
}

/// `a..b` is inclusive on both ends; a comma list gives explicit seeds.
pub fn parse_seeds(spec: &str) -> Result<Vec<u64>> {
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| bad("seed range", spec))?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad("seed range", spec))?;
        if hi < lo {
            return Err(bad("seed range", spec));
        }
        Ok((lo..=hi).collect())
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<u64>().map_err(|_| bad("seed", spec)))
            .collect()
    }
}
