//! Heralded photon-mediated link between two adjacent nodes.
//!
//! A probe photon reflects off a single-sided cavity at each node. On
//! resonance the reflection amplitude is `1 - 2 κ_ex / κ` when the atom is
//! decoupled (state `|0>`) and `1 - 2 κ_ex / (κ + 4 g²/γ)` when it couples
//! (state `|1>`). Choosing `κ_ex` so both magnitudes match makes the
//! post-selected conditional phase exact; the price is the `|r|²` success
//! factor.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::check_range;
use crate::noise;
use crate::quantum::{werner, ComplexAmplitude, DensityMatrix};
use crate::{Error, Result};

/// Vacuum light speed.
pub const SPEED_OF_LIGHT_KM_PER_US: f64 = 0.299_792_458;

/// Atom–cavity rates, stored as angular frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    pub g: f64,
    pub kappa_total: f64,
    pub kappa_0: f64,
    pub gamma: f64,
}

impl CavityParams {
    /// Rates given as `2π × value` MHz.
    pub fn from_mhz(g: f64, kappa_total: f64, kappa_0: f64, gamma: f64) -> Result<Self> {
        let scale = 2.0 * PI * 1e6;
        let p = Self {
            g: g * scale,
            kappa_total: kappa_total * scale,
            kappa_0: kappa_0 * scale,
            gamma: gamma * scale,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("g", self.g),
            ("kappa", self.kappa_total),
            ("kappa_0", self.kappa_0),
            ("gamma", self.gamma),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::ParameterRange {
                    name,
                    value: v,
                    expected: "a positive rate",
                });
            }
        }
        if self.kappa_0 >= self.kappa_total {
            return Err(Error::ConfigInvalid(format!(
                "kappa_0 ({} MHz) must be below kappa ({} MHz)",
                self.kappa_0 / (2.0 * PI * 1e6),
                self.kappa_total / (2.0 * PI * 1e6)
            )));
        }
        Ok(())
    }

    pub fn kappa_ex(&self) -> f64 {
        self.kappa_total - self.kappa_0
    }

    /// `g² / (κ γ)`.
    pub fn cooperativity(&self) -> f64 {
        self.g * self.g / (self.kappa_total * self.gamma)
    }
}

impl Default for CavityParams {
    fn default() -> Self {
        Self::from_mhz(7.6, 4.0, 0.2, 3.0).expect("default cavity parameters")
    }
}

/// Timing of a single heralding attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeraldMode {
    /// Each attempt waits for the previous herald before starting.
    Serial,
    /// Probe pulses are repeated back to back; only one flight delay is paid.
    Pipelined,
}

/// How the reflection loss enters the heralding probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CzAccounting {
    /// `|r|²` once for the whole two-cavity sequence.
    Once,
    /// `|r|²` per cavity, i.e. `|r|⁴`.
    PerCavity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    pub length_km: f64,
    /// Fiber loss at 780 nm.
    pub attenuation_db_per_km: f64,
    /// Fiber loss after conversion to 1550 nm.
    pub fc_attenuation_db_per_km: f64,
    pub circulator_loss_db: f64,
    pub n_circulators: u32,
    pub detector_efficiency: f64,
    pub fc_enabled: bool,
    pub eta_fc: f64,
    pub v_fiber_km_per_us: f64,
    pub c_vac_km_per_us: f64,
    /// Probe pulse length in units of `1/κ`.
    pub pulse_factor: f64,
    /// Werner fidelity of a heralded pair after technical imperfections.
    pub technical_fidelity: f64,
    pub herald_mode: HeraldMode,
    pub cz_accounting: CzAccounting,
}

impl Default for LinkParams {
    fn default() -> Self {
        Self {
            length_km: 0.1,
            attenuation_db_per_km: 3.0,
            fc_attenuation_db_per_km: 0.19,
            circulator_loss_db: 1.0,
            n_circulators: 2,
            detector_efficiency: 0.75,
            fc_enabled: false,
            eta_fc: 0.6,
            v_fiber_km_per_us: SPEED_OF_LIGHT_KM_PER_US / 1.5,
            c_vac_km_per_us: SPEED_OF_LIGHT_KM_PER_US,
            pulse_factor: 20.0,
            technical_fidelity: 0.96,
            herald_mode: HeraldMode::Serial,
            cz_accounting: CzAccounting::Once,
        }
    }
}

impl LinkParams {
    pub fn validate(&self) -> Result<()> {
        check_range("length_km", self.length_km, 0.0, false, f64::MAX, "> 0")?;
        for (name, v) in [
            ("attenuation_db_per_km", self.attenuation_db_per_km),
            ("fc_attenuation_db_per_km", self.fc_attenuation_db_per_km),
            ("circulator_loss_db", self.circulator_loss_db),
        ] {
            check_range(name, v, 0.0, true, f64::MAX, ">= 0")?;
        }
        check_range(
            "detector_efficiency",
            self.detector_efficiency,
            0.0,
            false,
            1.0,
            "(0, 1]",
        )?;
        check_range("eta_fc", self.eta_fc, 0.0, false, 1.0, "(0, 1]")?;
        check_range(
            "v_fiber",
            self.v_fiber_km_per_us,
            0.0,
            false,
            f64::MAX,
            "> 0",
        )?;
        check_range("c_vac", self.c_vac_km_per_us, 0.0, false, f64::MAX, "> 0")?;
        check_range(
            "pulse_factor",
            self.pulse_factor,
            0.0,
            false,
            f64::MAX,
            "> 0",
        )?;
        check_range(
            "technical_fidelity",
            self.technical_fidelity,
            0.25,
            false,
            1.0,
            "(0.25, 1]",
        )?;
        Ok(())
    }

    pub fn effective_attenuation_db_per_km(&self) -> f64 {
        if self.fc_enabled {
            self.fc_attenuation_db_per_km
        } else {
            self.attenuation_db_per_km
        }
    }

    /// One-way classical signalling time over the link, `l/c`.
    pub fn classical_delay_us(&self) -> f64 {
        self.length_km / self.c_vac_km_per_us
    }
}

/// Steady-state reflection amplitude at zero detuning.
pub fn reflection_amplitude(p: &CavityParams, atom_coupled: bool) -> ComplexAmplitude {
    let denominator = if atom_coupled {
        p.kappa_total + 4.0 * p.g * p.g / p.gamma
    } else {
        p.kappa_total
    };
    Complex64::new(1.0 - 2.0 * p.kappa_ex() / denominator, 0.0)
}

/// Post-selected success probability of the photon–atom phase gate.
pub fn cz_success(p: &CavityParams, accounting: CzAccounting) -> f64 {
    let single = reflection_amplitude(p, false).norm_sqr();
    match accounting {
        CzAccounting::Once => single,
        CzAccounting::PerCavity => single * single,
    }
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(-db / 10.0)
}

/// Fiber, circulator, detector and (optional) frequency-conversion
/// transmission of the heralding photon.
pub fn link_transmission(lp: &LinkParams) -> f64 {
    let fiber = db_to_linear(lp.effective_attenuation_db_per_km() * lp.length_km);
    let circulators = db_to_linear(f64::from(lp.n_circulators) * lp.circulator_loss_db);
    let fc = if lp.fc_enabled {
        lp.eta_fc * lp.eta_fc
    } else {
        1.0
    };
    fiber * circulators * lp.detector_efficiency * fc
}

/// Overall heralding probability `P_succ`.
pub fn herald_success(p: &CavityParams, lp: &LinkParams) -> f64 {
    cz_success(p, lp.cz_accounting) * link_transmission(lp)
}

/// Durations of one heralded e-bit, in µs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstaTiming {
    /// `pulse_factor/κ + l/v + l/c`.
    pub t_attempt_us: f64,
    /// Expected preparation time including the classical herald `l/c`.
    pub t_esta_us: f64,
    /// Same without the `l/c` term.
    pub t_esta_table_us: f64,
}

pub fn pulse_duration_us(p: &CavityParams, lp: &LinkParams) -> f64 {
    lp.pulse_factor / p.kappa_total * 1e6
}

pub fn expected_esta(p: &CavityParams, lp: &LinkParams) -> EstaTiming {
    let pulse = pulse_duration_us(p, lp);
    let fiber = lp.length_km / lp.v_fiber_km_per_us;
    let classical = lp.classical_delay_us();
    let p_succ = herald_success(p, lp);
    let t_attempt_us = pulse + fiber + classical;
    let esta = |with_classical: bool| {
        let delay = fiber + if with_classical { classical } else { 0.0 };
        match lp.herald_mode {
            HeraldMode::Serial => (pulse + delay) / p_succ,
            HeraldMode::Pipelined => pulse / p_succ + delay,
        }
    };
    EstaTiming {
        t_attempt_us,
        t_esta_us: esta(true),
        t_esta_table_us: esta(false),
    }
}

/// Heralded pair on the two communication qubits, conditional-X already
/// applied so the target is `Ψ⁺`.
pub fn heralded_state(lp: &LinkParams) -> Result<DensityMatrix> {
    check_range(
        "technical_fidelity",
        lp.technical_fidelity,
        0.25,
        false,
        1.0,
        "(0.25, 1]",
    )?;
    werner(lp.technical_fidelity)
}

/// The e-bit as it arrives in the computation zone: heralded pair, swapped
/// onto a shuttle with three noisy CNOTs, then transported.
pub fn qc_zone_state(lp: &LinkParams, f_op: f64, f_move: f64) -> Result<DensityMatrix> {
    let herald = heralded_state(lp)?;
    let shuttle = noise::transfer_to_shuttle(&herald, f_op)?;
    noise::transport_channel(&shuttle, 1, f_move)
}

/// Derived per-link quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget {
    pub r_uncoupled: ComplexAmplitude,
    pub r_coupled: ComplexAmplitude,
    pub p_cz: f64,
    pub transmission: f64,
    pub p_succ: f64,
    pub t_attempt_us: f64,
    pub t_esta_us: f64,
    pub t_esta_table_us: f64,
    pub heralded_state: DensityMatrix,
}

impl LinkBudget {
    pub fn heralded_fidelity(&self) -> f64 {
        self.heralded_state
            .fidelity_bell(crate::quantum::Bell::PsiPlus)
            .unwrap_or(0.0)
    }

    pub fn rate_hz(&self) -> f64 {
        1e6 / self.t_esta_us
    }
}

pub fn link_budget(p: &CavityParams, lp: &LinkParams) -> Result<LinkBudget> {
    p.validate()?;
    lp.validate()?;
    let timing = expected_esta(p, lp);
    Ok(LinkBudget {
        r_uncoupled: reflection_amplitude(p, false),
        r_coupled: reflection_amplitude(p, true),
        p_cz: cz_success(p, lp.cz_accounting),
        transmission: link_transmission(lp),
        p_succ: herald_success(p, lp),
        t_attempt_us: timing.t_attempt_us,
        t_esta_us: timing.t_esta_us,
        t_esta_table_us: timing.t_esta_table_us,
        heralded_state: heralded_state(lp)?,
    })
}
