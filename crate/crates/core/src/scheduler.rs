//! Assembly-line timing of e-bit generation and purification.
//!
//! With `2^N` pairs feeding `N` nested purification rounds, the cavity,
//! shuttle and computation zone run in parallel, so
//!
//! ```text
//! T_EG,N = max{ 2^N · max(T_esta + T_swap, T_swap + T_move),
//!               Σ_k (T_proj / P_puri,k + l/c) }
//! ```
//!
//! and the effective rate is `1 / T_EG,N`.

use serde::{Deserialize, Serialize};

use crate::cavity::{expected_esta, CavityParams, LinkParams};
use crate::error::check_range;
use crate::noise::GateNoise;
use crate::purification::{purify_n_rounds, Protocol};
use crate::quantum::DensityMatrix;
use crate::{Error, Result};

pub const MAX_CURVE_ROUNDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveAccounting {
    /// `T_move` is already an average over failed transports.
    Averaged,
    /// The per-pair stage time is divided by `p_move`.
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstaConvention {
    /// `T_esta` includes the classical herald delay `l/c`.
    Text,
    /// `T_esta` without `l/c`.
    Table,
}

/// Operation durations shared by every link, as configured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingParams {
    pub t_swap_us: f64,
    pub t_move_us: f64,
    /// Single-atom readout time.
    pub t_proj_us: f64,
    pub p_move: f64,
    pub esta_convention: EstaConvention,
    pub move_accounting: MoveAccounting,
    /// Independent cavities generating in parallel; scales the rate.
    pub parallel_links: u32,
}

impl Default for TimingParams {
    fn default() -> Self {
        Self {
            t_swap_us: 2.0,
            t_move_us: 20.0,
            t_proj_us: 200.0,
            p_move: 0.9,
            esta_convention: EstaConvention::Text,
            move_accounting: MoveAccounting::Averaged,
            parallel_links: 1,
        }
    }
}

impl TimingParams {
    pub fn validate(&self) -> Result<()> {
        check_range("t_swap_us", self.t_swap_us, 0.0, false, f64::MAX, "> 0")?;
        check_range("t_move_us", self.t_move_us, 0.0, false, f64::MAX, "> 0")?;
        check_range("t_proj_us", self.t_proj_us, 0.0, false, f64::MAX, "> 0")?;
        check_range("p_move", self.p_move, 0.0, false, 1.0, "(0, 1]")?;
        if self.parallel_links == 0 {
            return Err(Error::ConfigInvalid(
                "parallel_links must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Everything [`t_eg`] needs for one link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperationTimings {
    pub t_esta_us: f64,
    pub t_swap_us: f64,
    pub t_move_us: f64,
    pub t_proj_us: f64,
    pub p_move: f64,
    /// Classical signalling time `l/c` charged per purification round.
    pub classical_delay_us: f64,
    pub move_accounting: MoveAccounting,
    pub parallel_links: u32,
}

impl OperationTimings {
    pub fn for_link(params: &TimingParams, cavity: &CavityParams, link: &LinkParams) -> Self {
        let esta = expected_esta(cavity, link);
        let t_esta_us = match params.esta_convention {
            EstaConvention::Text => esta.t_esta_us,
            EstaConvention::Table => esta.t_esta_table_us,
        };
        Self {
            t_esta_us,
            t_swap_us: params.t_swap_us,
            t_move_us: params.t_move_us,
            t_proj_us: params.t_proj_us,
            p_move: params.p_move,
            classical_delay_us: link.classical_delay_us(),
            move_accounting: params.move_accounting,
            parallel_links: params.parallel_links,
        }
    }

    /// Time per pair delivered to the computation zone.
    pub fn pair_stage_us(&self) -> f64 {
        let stage = (self.t_esta_us + self.t_swap_us).max(self.t_swap_us + self.t_move_us);
        match self.move_accounting {
            MoveAccounting::Averaged => stage,
            MoveAccounting::Explicit => stage / self.p_move,
        }
    }
}

/// `T_proj / P_puri`.
pub fn t_puri(t_proj_us: f64, p_puri: f64) -> Result<f64> {
    check_range("p_puri", p_puri, 0.0, false, 1.0, "(0, 1]")?;
    Ok(t_proj_us / p_puri)
}

/// Which argument of the outer `max` sets `T_EG,N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Generation,
    Purification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleResult {
    pub n_rounds: usize,
    pub t_eg_us: f64,
    pub effective_rate_hz: f64,
    pub final_fidelity: Option<f64>,
    pub generation_term_us: f64,
    pub purification_term_us: f64,
    pub regime: Regime,
    /// Link pairs generated per output pair, counting transport losses.
    pub link_pairs_generated: f64,
}

pub fn t_eg(n: usize, timings: &OperationTimings, p_puri: &[f64]) -> Result<ScheduleResult> {
    if p_puri.len() < n {
        return Err(Error::MissingPurificationProbability {
            expected: n,
            given: p_puri.len(),
        });
    }
    let generation_term_us = (1u64 << n) as f64 * timings.pair_stage_us();
    let purification_term_us = p_puri[..n]
        .iter()
        .map(|&p| Ok(t_puri(timings.t_proj_us, p)? + timings.classical_delay_us))
        .sum::<Result<f64>>()?;
    let (t_eg_us, regime) = if generation_term_us >= purification_term_us {
        (generation_term_us, Regime::Generation)
    } else {
        (purification_term_us, Regime::Purification)
    };
    let link_pairs_generated = match timings.move_accounting {
        MoveAccounting::Averaged => (1u64 << n) as f64 / timings.p_move,
        MoveAccounting::Explicit => (1u64 << n) as f64,
    };
    Ok(ScheduleResult {
        n_rounds: n,
        t_eg_us,
        effective_rate_hz: f64::from(timings.parallel_links) * 1e6 / t_eg_us,
        final_fidelity: None,
        generation_term_us,
        purification_term_us,
        regime,
        link_pairs_generated,
    })
}

/// Smallest `N >= 1` at which pair generation, rather than purification,
/// sets `T_EG,N`.
pub fn regime_crossover(timings: &OperationTimings, p_puri: &[f64]) -> Result<Option<usize>> {
    for n in 1..=p_puri.len() {
        if t_eg(n, timings, p_puri)?.regime == Regime::Generation {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n_rounds: usize,
    pub fidelity: f64,
    /// Success probability of the last round (1 when `N = 0`).
    pub p_puri: f64,
    pub t_eg_us: f64,
    pub rate_hz: f64,
}

/// Fidelity and rate after `0..=n_max` rounds, starting from `initial`.
pub fn rate_fidelity_curve(
    n_max: usize,
    initial: &DensityMatrix,
    noise: &GateNoise,
    protocol: Protocol,
    timings: &OperationTimings,
) -> Result<Vec<CurvePoint>> {
    if n_max > MAX_CURVE_ROUNDS {
        return Err(Error::ParameterRange {
            name: "n_max",
            value: n_max as f64,
            expected: "<= 10",
        });
    }
    let schedule = purify_n_rounds(initial, n_max, noise, protocol)?;
    let fidelities = schedule.fidelities();
    let probabilities = schedule.success_probabilities();
    (0..=n_max)
        .map(|n| {
            let mut result = t_eg(n, timings, &probabilities)?;
            result.final_fidelity = Some(fidelities[n]);
            Ok(CurvePoint {
                n_rounds: n,
                fidelity: fidelities[n],
                p_puri: if n == 0 { 1.0 } else { probabilities[n - 1] },
                t_eg_us: result.t_eg_us,
                rate_hz: result.effective_rate_hz,
            })
        })
        .collect()
}

/// Readout time `T_proj` that makes the `N`-round rate equal
/// `target_rate_hz`, given the per-round success probabilities.
pub fn calibrate_t_proj(
    n: usize,
    target_rate_hz: f64,
    timings: &OperationTimings,
    p_puri: &[f64],
) -> Result<f64> {
    if n == 0 {
        return Err(Error::Calibration(
            "the N = 0 rate does not depend on the readout time".into(),
        ));
    }
    if p_puri.len() < n {
        return Err(Error::MissingPurificationProbability {
            expected: n,
            given: p_puri.len(),
        });
    }
    check_range(
        "target_rate_hz",
        target_rate_hz,
        0.0,
        false,
        f64::MAX,
        "> 0",
    )?;
    let target_us = f64::from(timings.parallel_links) * 1e6 / target_rate_hz;
    let generation = (1u64 << n) as f64 * timings.pair_stage_us();
    if target_us < generation {
        return Err(Error::Calibration(format!(
            "pair generation alone takes {generation:.3} µs, longer than the target {target_us:.3} µs"
        )));
    }
    let inverse_sum: f64 = p_puri[..n].iter().map(|p| 1.0 / p).sum();
    let t_proj = (target_us - n as f64 * timings.classical_delay_us) / inverse_sum;
    if t_proj <= 0.0 {
        return Err(Error::Calibration(
            "classical delays alone exceed the target time".into(),
        ));
    }
    Ok(t_proj)
}
