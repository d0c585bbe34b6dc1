//! Flat `key = value` configuration files.
//!
//! Blank lines and `#` comments are ignored, `[section]` headers are
//! accepted for readability but do not namespace keys, and every key not
//! listed in [`Config::KEYS`] is rejected. Rates are in units of 2π×MHz,
//! durations in µs, distances in km and losses in dB.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cavity::{CavityParams, CzAccounting, HeraldMode, LinkParams, SPEED_OF_LIGHT_KM_PER_US};
use crate::noise::GateNoise;
use crate::purification::Protocol;
use crate::scheduler::{EstaConvention, MoveAccounting, TimingParams};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub g_mhz: f64,
    pub kappa_mhz: f64,
    pub kappa0_mhz: f64,
    pub gamma_mhz: f64,
    pub length_km: f64,
    pub fiber_db_per_km: f64,
    pub fiber_db_per_km_fc: f64,
    pub circulator_loss_db: f64,
    pub n_circulators: u32,
    pub detector_efficiency: f64,
    pub fc_enabled: bool,
    pub eta_fc: f64,
    pub fiber_index: f64,
    pub c_km_per_us: f64,
    pub pulse_factor: f64,
    pub technical_fidelity: f64,
    pub herald_mode: HeraldMode,
    pub cz_accounting: CzAccounting,
    pub f_op: f64,
    pub eta_meas: f64,
    pub f_move: f64,
    pub purification_protocol: Protocol,
    pub t_swap_us: f64,
    pub t_move_us: f64,
    pub t_proj_us: f64,
    pub p_move: f64,
    pub esta_convention: EstaConvention,
    pub move_accounting: MoveAccounting,
    pub parallel_links: u32,
    pub fidelity_target: f64,
    pub max_rounds: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            g_mhz: 7.6,
            kappa_mhz: 4.0,
            kappa0_mhz: 0.2,
            gamma_mhz: 3.0,
            length_km: 0.1,
            fiber_db_per_km: 3.0,
            fiber_db_per_km_fc: 0.19,
            circulator_loss_db: 1.0,
            n_circulators: 2,
            detector_efficiency: 0.75,
            fc_enabled: false,
            eta_fc: 0.6,
            fiber_index: 1.5,
            c_km_per_us: SPEED_OF_LIGHT_KM_PER_US,
            pulse_factor: 20.0,
            technical_fidelity: 0.96,
            herald_mode: HeraldMode::Serial,
            cz_accounting: CzAccounting::Once,
            f_op: 0.995,
            eta_meas: 0.99,
            f_move: 0.96,
            purification_protocol: Protocol::Dejmps,
            t_swap_us: 2.0,
            t_move_us: 20.0,
            t_proj_us: 200.0,
            p_move: 0.9,
            esta_convention: EstaConvention::Text,
            move_accounting: MoveAccounting::Averaged,
            parallel_links: 1,
            fidelity_target: 0.99,
            max_rounds: 8,
        }
    }
}

fn parse_num<T: std::str::FromStr>(value: &str) -> std::result::Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("`{value}` is not a valid number"))
}

fn parse_bool(value: &str) -> std::result::Result<bool, String> {
    match value {
        "true" | "on" | "yes" => Ok(true),
        "false" | "off" | "no" => Ok(false),
        _ => Err(format!("`{value}` is not a boolean")),
    }
}

fn parse_choice<T: Copy>(value: &str, choices: &[(&str, T)]) -> std::result::Result<T, String> {
    choices
        .iter()
        .find(|(name, _)| *name == value)
        .map(|(_, v)| *v)
        .ok_or_else(|| {
            let names: Vec<&str> = choices.iter().map(|(n, _)| *n).collect();
            format!("`{value}` is not one of {}", names.join(", "))
        })
}

const HERALD_MODES: &[(&str, HeraldMode)] = &[
    ("serial", HeraldMode::Serial),
    ("pipelined", HeraldMode::Pipelined),
];
const CZ_ACCOUNTING: &[(&str, CzAccounting)] = &[
    ("once", CzAccounting::Once),
    ("per_cavity", CzAccounting::PerCavity),
];
const PROTOCOLS: &[(&str, Protocol)] = &[
    ("dejmps", Protocol::Dejmps),
    ("bbpssw", Protocol::Bbpssw),
    ("bare", Protocol::Bare),
];
const ESTA_CONVENTIONS: &[(&str, EstaConvention)] = &[
    ("text", EstaConvention::Text),
    ("table", EstaConvention::Table),
];
const MOVE_ACCOUNTING: &[(&str, MoveAccounting)] = &[
    ("averaged", MoveAccounting::Averaged),
    ("explicit", MoveAccounting::Explicit),
];

fn choice_name<T: PartialEq + Copy>(value: T, choices: &[(&'static str, T)]) -> &'static str {
    choices
        .iter()
        .find(|(_, v)| *v == value)
        .map(|(n, _)| *n)
        .expect("every variant is listed")
}

impl Config {
    /// Accepted keys, in echo order.
    pub const KEYS: &'static [&'static str] = &[
        "g_mhz",
        "kappa_mhz",
        "kappa0_mhz",
        "gamma_mhz",
        "length_km",
        "fiber_db_per_km",
        "fiber_db_per_km_fc",
        "circulator_loss_db",
        "n_circulators",
        "detector_efficiency",
        "fc_enabled",
        "eta_fc",
        "fiber_index",
        "c_km_per_us",
        "pulse_factor",
        "technical_fidelity",
        "herald_mode",
        "cz_accounting",
        "f_op",
        "eta_meas",
        "f_move",
        "purification_protocol",
        "t_swap_us",
        "t_move_us",
        "t_proj_us",
        "p_move",
        "esta_convention",
        "move_accounting",
        "parallel_links",
        "fidelity_target",
        "max_rounds",
    ];

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "g_mhz" => self.g_mhz = parse_num(value)?,
            "kappa_mhz" => self.kappa_mhz = parse_num(value)?,
            "kappa0_mhz" | "kappa_0_mhz" => self.kappa0_mhz = parse_num(value)?,
            "gamma_mhz" => self.gamma_mhz = parse_num(value)?,
            "length_km" => self.length_km = parse_num(value)?,
            "fiber_db_per_km" => self.fiber_db_per_km = parse_num(value)?,
            "fiber_db_per_km_fc" => self.fiber_db_per_km_fc = parse_num(value)?,
            "circulator_loss_db" => self.circulator_loss_db = parse_num(value)?,
            "n_circulators" => self.n_circulators = parse_num(value)?,
            "detector_efficiency" => self.detector_efficiency = parse_num(value)?,
            "fc_enabled" => self.fc_enabled = parse_bool(value)?,
            "eta_fc" => self.eta_fc = parse_num(value)?,
            "fiber_index" => self.fiber_index = parse_num(value)?,
            "c_km_per_us" => self.c_km_per_us = parse_num(value)?,
            "pulse_factor" => self.pulse_factor = parse_num(value)?,
            "technical_fidelity" => self.technical_fidelity = parse_num(value)?,
            "herald_mode" => self.herald_mode = parse_choice(value, HERALD_MODES)?,
            "cz_accounting" => self.cz_accounting = parse_choice(value, CZ_ACCOUNTING)?,
            "f_op" => self.f_op = parse_num(value)?,
            "eta_meas" => self.eta_meas = parse_num(value)?,
            "f_move" => self.f_move = parse_num(value)?,
            "purification_protocol" => self.purification_protocol = parse_choice(value, PROTOCOLS)?,
            "t_swap_us" => self.t_swap_us = parse_num(value)?,
            "t_move_us" => self.t_move_us = parse_num(value)?,
            "t_proj_us" => self.t_proj_us = parse_num(value)?,
            "p_move" => self.p_move = parse_num(value)?,
            "esta_convention" => self.esta_convention = parse_choice(value, ESTA_CONVENTIONS)?,
            "move_accounting" => self.move_accounting = parse_choice(value, MOVE_ACCOUNTING)?,
            "parallel_links" => self.parallel_links = parse_num(value)?,
            "fidelity_target" => self.fidelity_target = parse_num(value)?,
            "max_rounds" => self.max_rounds = parse_num(value)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Parses configuration text; absent keys keep their defaults.
    pub fn parse(text: &str) -> Result<Config> {
        let mut config = Config::default();
        let mut seen: Vec<String> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
                continue;
            }
            let err = |message: String| Error::ConfigParse {
                line: line_no,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, found `{line}`")))?;
            let key = key.trim();
            let value = value.trim().trim_matches('"');
            let canonical = if key == "kappa_0_mhz" {
                "kappa0_mhz"
            } else {
                key
            };
            if seen.iter().any(|k| k == canonical) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            config.set(key, value).map_err(err)?;
            seen.push(canonical.to_string());
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Config> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::parse(&text)
    }

    /// Re-checks every module-level invariant.
    pub fn validate(&self) -> Result<()> {
        let invalid = |e: Error| Error::ConfigInvalid(e.to_string());
        if self.kappa0_mhz >= self.kappa_mhz {
            return Err(Error::ConfigInvalid(format!(
                "kappa0_mhz ({}) must be below kappa_mhz ({})",
                self.kappa0_mhz, self.kappa_mhz
            )));
        }
        self.cavity().map_err(invalid)?;
        self.link().validate().map_err(invalid)?;
        self.noise().validate().map_err(invalid)?;
        crate::noise::transport_keep_probability(self.f_move).map_err(invalid)?;
        self.timing().validate().map_err(invalid)?;
        if !(self.fiber_index.is_finite() && self.fiber_index >= 1.0) {
            return Err(Error::ConfigInvalid(format!(
                "fiber_index ({}) must be at least 1",
                self.fiber_index
            )));
        }
        if !(self.fidelity_target > 0.0 && self.fidelity_target <= 1.0) {
            return Err(Error::ConfigInvalid(format!(
                "fidelity_target ({}) must lie in (0, 1]",
                self.fidelity_target
            )));
        }
        if self.max_rounds > 16 {
            return Err(Error::ConfigInvalid(format!(
                "max_rounds ({}) must be at most 16",
                self.max_rounds
            )));
        }
        Ok(())
    }

    pub fn cavity(&self) -> Result<CavityParams> {
        CavityParams::from_mhz(self.g_mhz, self.kappa_mhz, self.kappa0_mhz, self.gamma_mhz)
    }

    pub fn link(&self) -> LinkParams {
        LinkParams {
            length_km: self.length_km,
            attenuation_db_per_km: self.fiber_db_per_km,
            fc_attenuation_db_per_km: self.fiber_db_per_km_fc,
            circulator_loss_db: self.circulator_loss_db,
            n_circulators: self.n_circulators,
            detector_efficiency: self.detector_efficiency,
            fc_enabled: self.fc_enabled,
            eta_fc: self.eta_fc,
            v_fiber_km_per_us: self.c_km_per_us / self.fiber_index,
            c_vac_km_per_us: self.c_km_per_us,
            pulse_factor: self.pulse_factor,
            technical_fidelity: self.technical_fidelity,
            herald_mode: self.herald_mode,
            cz_accounting: self.cz_accounting,
        }
    }

    pub fn noise(&self) -> GateNoise {
        GateNoise {
            f_op: self.f_op,
            eta_meas: self.eta_meas,
        }
    }

    pub fn timing(&self) -> TimingParams {
        TimingParams {
            t_swap_us: self.t_swap_us,
            t_move_us: self.t_move_us,
            t_proj_us: self.t_proj_us,
            p_move: self.p_move,
            esta_convention: self.esta_convention,
            move_accounting: self.move_accounting,
            parallel_links: self.parallel_links,
        }
    }

    /// Fully resolved `(key, value)` pairs in [`Config::KEYS`] order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        Self::KEYS
            .iter()
            .map(|&key| {
                let value = match key {
                    "g_mhz" => self.g_mhz.to_string(),
                    "kappa_mhz" => self.kappa_mhz.to_string(),
                    "kappa0_mhz" => self.kappa0_mhz.to_string(),
                    "gamma_mhz" => self.gamma_mhz.to_string(),
                    "length_km" => self.length_km.to_string(),
                    "fiber_db_per_km" => self.fiber_db_per_km.to_string(),
                    "fiber_db_per_km_fc" => self.fiber_db_per_km_fc.to_string(),
                    "circulator_loss_db" => self.circulator_loss_db.to_string(),
                    "n_circulators" => self.n_circulators.to_string(),
                    "detector_efficiency" => self.detector_efficiency.to_string(),
                    "fc_enabled" => self.fc_enabled.to_string(),
                    "eta_fc" => self.eta_fc.to_string(),
                    "fiber_index" => self.fiber_index.to_string(),
                    "c_km_per_us" => self.c_km_per_us.to_string(),
                    "pulse_factor" => self.pulse_factor.to_string(),
                    "technical_fidelity" => self.technical_fidelity.to_string(),
                    "herald_mode" => choice_name(self.herald_mode, HERALD_MODES).to_string(),
                    "cz_accounting" => choice_name(self.cz_accounting, CZ_ACCOUNTING).to_string(),
                    "f_op" => self.f_op.to_string(),
                    "eta_meas" => self.eta_meas.to_string(),
                    "f_move" => self.f_move.to_string(),
                    "purification_protocol" => {
                        choice_name(self.purification_protocol, PROTOCOLS).to_string()
                    }
                    "t_swap_us" => self.t_swap_us.to_string(),
                    "t_move_us" => self.t_move_us.to_string(),
                    "t_proj_us" => self.t_proj_us.to_string(),
                    "p_move" => self.p_move.to_string(),
                    "esta_convention" => {
                        choice_name(self.esta_convention, ESTA_CONVENTIONS).to_string()
                    }
                    "move_accounting" => {
                        choice_name(self.move_accounting, MOVE_ACCOUNTING).to_string()
                    }
                    "parallel_links" => self.parallel_links.to_string(),
                    "fidelity_target" => self.fidelity_target.to_string(),
                    "max_rounds" => self.max_rounds.to_string(),
                    other => unreachable!("key {other} listed without a formatter"),
                };
                (key, value)
            })
            .collect()
    }

    /// Canonical file text; parsing it yields an identical config.
    pub fn to_text(&self) -> String {
        self.entries()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}
