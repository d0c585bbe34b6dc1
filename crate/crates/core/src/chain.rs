//! Nested entanglement swapping over `M` stations and the two-stage
//! purification plan that maximizes the end-to-end rate.
//!
//! Stage one purifies each elementary link `N1` times, the pairs are then
//! swapped over `log2(M - 1)` levels, and stage two purifies the end-to-end
//! pair `N2` times.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cavity::{qc_zone_state, HeraldMode, LinkParams};
use crate::config::Config;
use crate::noise::{noisy_measure_z, noisy_two_qubit_gate, GateNoise, TwoQubitGate};
use crate::purification::{purify_n_rounds, PurificationSchedule};
use crate::quantum::{gates, Bell, BellDiagonalState, DensityMatrix};
use crate::scheduler::{t_eg, t_puri, OperationTimings};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub stations: usize,
    pub total_length_km: f64,
}

impl ChainParams {
    pub fn new(stations: usize, total_length_km: f64) -> Result<Self> {
        let params = Self {
            stations,
            total_length_km,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.stations < 2 || !(self.stations - 1).is_power_of_two() {
            return Err(Error::InvalidStations(self.stations));
        }
        crate::error::check_range(
            "total_length_km",
            self.total_length_km,
            0.0,
            false,
            f64::INFINITY,
            "(0, inf)",
        )?;
        Ok(())
    }

    /// Number of nested swap levels, `log2(M - 1)`.
    pub fn swap_levels(&self) -> usize {
        (self.stations - 1).trailing_zeros() as usize
    }

    pub fn link_length_km(&self) -> f64 {
        self.total_length_km / (self.stations - 1) as f64
    }
}

/// Pauli applied to the far end qubit after outcome `(m1, m2)` of the
/// Bell measurement: `X^(1 ⊕ m2) Z^m1`, which restores `Ψ⁺`.
pub fn swap_correction(m1: u8, m2: u8) -> nalgebra::DMatrix<num_complex::Complex64> {
    let x = if m2 == 0 {
        gates::pauli_x()
    } else {
        gates::identity(1)
    };
    let z = if m1 == 1 {
        gates::pauli_z()
    } else {
        gates::identity(1)
    };
    x * z
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwapBranch {
    pub outcomes: (u8, u8),
    pub probability: f64,
    /// Corrected end-to-end pair; `None` when the branch cannot occur.
    pub state: Option<DensityMatrix>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BellMeasurement {
    pub branches: Vec<SwapBranch>,
    /// Branch average of the corrected pairs.
    pub state: DensityMatrix,
}

impl BellMeasurement {
    pub fn fidelity(&self) -> f64 {
        self.state
            .fidelity_bell(Bell::PsiPlus)
            .expect("two-qubit state")
    }
}

/// Bell measurement on the middle qubits of `(end_a, mid_1, mid_2, end_b)`:
/// noisy CNOT, Hadamard on `mid_1`, two noisy readouts and the Pauli
/// correction on `end_b`.
pub fn bell_measurement(register: &DensityMatrix, noise: &GateNoise) -> Result<BellMeasurement> {
    if register.n_qubits() != 4 {
        return Err(Error::ArityMismatch {
            channel: 4,
            given: register.n_qubits(),
        });
    }
    noise.validate()?;
    let rho = noisy_two_qubit_gate(register, TwoQubitGate::Cnot, 1, 2, noise.f_op)?;
    let rho = rho.apply_unitary(&gates::hadamard(), &[1])?;
    let mut branches = Vec::with_capacity(4);
    let mut average: Option<DensityMatrix> = None;
    for first in noisy_measure_z(&rho, 1, noise.eta_meas)? {
        let rest = first.post_state.expect("three qubits remain");
        for second in noisy_measure_z(&rest, 1, noise.eta_meas)? {
            let probability = first.probability * second.probability;
            let pair = second.post_state.expect("two qubits remain");
            let corrected =
                pair.apply_unitary(&swap_correction(first.outcome, second.outcome), &[1])?;
            let weighted = corrected.scaled(probability);
            average = Some(match average {
                None => weighted,
                Some(acc) => acc.add(&weighted)?,
            });
            branches.push(SwapBranch {
                outcomes: (first.outcome, second.outcome),
                probability,
                state: (probability > 0.0).then_some(corrected),
            });
        }
    }
    let state = DensityMatrix::normalized(average.expect("four branches").matrix().clone())?;
    Ok(BellMeasurement { branches, state })
}

/// Joins two pairs sharing a middle station.
pub fn swap_pairs(
    left: &DensityMatrix,
    right: &DensityMatrix,
    noise: &GateNoise,
) -> Result<BellMeasurement> {
    for pair in [left, right] {
        if pair.n_qubits() != 2 {
            return Err(Error::ArityMismatch {
                channel: 2,
                given: pair.n_qubits(),
            });
        }
    }
    bell_measurement(&left.tensor(right)?, noise)
}

/// States after `0..=levels` rounds of nested swapping of identical pairs.
pub fn swap_nested(
    pair: &DensityMatrix,
    levels: usize,
    noise: &GateNoise,
) -> Result<Vec<DensityMatrix>> {
    let mut out = vec![pair.clone()];
    for _ in 0..levels {
        let last = out.last().expect("non-empty");
        let next = swap_pairs(last, last, noise)?.state;
        out.push(next);
    }
    Ok(out)
}

/// Swaps a full row of `2^k` link pairs, left to right within each level.
pub fn swap_chain(links: &[DensityMatrix], noise: &GateNoise) -> Result<DensityMatrix> {
    if links.is_empty() || !links.len().is_power_of_two() {
        return Err(Error::InvalidStations(links.len() + 1));
    }
    let mut level: Vec<DensityMatrix> = links.to_vec();
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|p| Ok(swap_pairs(&p[0], &p[1], noise)?.state))
            .collect::<Result<_>>()?;
    }
    Ok(level.pop().expect("one pair left"))
}

/// Bell-diagonal form of [`swap_pairs`]. The ideal swap composes Pauli
/// frames, readout flips of `mid_2` and `mid_1` add X and Z errors, and the
/// gate noise leaves the ends maximally mixed.
pub fn swap_bell_diagonal(
    left: &BellDiagonalState,
    right: &BellDiagonalState,
    noise: &GateNoise,
) -> BellDiagonalState {
    let target = Bell::PsiPlus.index();
    let mut ideal = [0.0; 4];
    for a in 0..4 {
        for b in 0..4 {
            ideal[a ^ b ^ target] += left.weights()[a] * right.weights()[b];
        }
    }
    let eta = noise.eta_meas;
    let flip = [
        eta * eta,
        eta * (1.0 - eta),
        eta * (1.0 - eta),
        (1.0 - eta) * (1.0 - eta),
    ];
    let mut out = [0.0; 4];
    for (k, w) in out.iter_mut().enumerate() {
        let measured: f64 = (0..4).map(|e| flip[e] * ideal[k ^ e]).sum();
        *w = noise.f_op * measured + (1.0 - noise.f_op) * 0.25;
    }
    BellDiagonalState::renormalized(out)
}

/// `L / (2c) + T_proj`: half-chain signalling plus one projection.
pub fn t_repe(total_length_km: f64, t_proj_us: f64, c_km_per_us: f64) -> f64 {
    total_length_km / (2.0 * c_km_per_us) + t_proj_us
}

/// Fidelities for every `(N1, N2)` at a fixed number of swap levels.
/// Independent of distance.
#[derive(Debug, Clone)]
pub struct FidelityTable {
    pub levels: usize,
    pub stage_one: PurificationSchedule,
    /// Stage-two schedule for each `N1`.
    pub stage_two: Vec<PurificationSchedule>,
}

impl FidelityTable {
    pub fn build(config: &Config, levels: usize) -> Result<Self> {
        let noise = config.noise();
        let max = config.max_rounds;
        let initial = qc_zone_state(&config.link(), config.f_op, config.f_move)?;
        let stage_one = purify_n_rounds(&initial, max, &noise, config.purification_protocol)?;
        let stage_two = (0..=max)
            .map(|n1| {
                let swapped = swap_nested(stage_one.state_after(n1), levels, &noise)?
                    .pop()
                    .expect("non-empty");
                purify_n_rounds(&swapped, max, &noise, config.purification_protocol)
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            levels,
            stage_one,
            stage_two,
        })
    }

    pub fn fidelity(&self, n1: usize, n2: usize) -> f64 {
        self.stage_two[n1].fidelities()[n2]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainPlan {
    pub stations: usize,
    pub total_length_km: f64,
    pub link_length_km: f64,
    pub fc_enabled: bool,
    pub herald_mode: HeraldMode,
    pub n1: usize,
    pub n2: usize,
    pub fidelity: f64,
    pub t_eg1_us: f64,
    pub t_repe_us: f64,
    pub t_pair_us: f64,
    pub t_eg2_us: f64,
    pub t_qr_us: f64,
    pub rate_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PlanOutcome {
    Feasible(ChainPlan),
    /// No `(N1, N2)` in range reaches the target.
    Infeasible {
        stations: usize,
        total_length_km: f64,
        fc_enabled: bool,
        best_fidelity: f64,
    },
}

impl PlanOutcome {
    pub fn plan(&self) -> Option<&ChainPlan> {
        match self {
            PlanOutcome::Feasible(p) => Some(p),
            PlanOutcome::Infeasible { .. } => None,
        }
    }

    pub fn rate_hz(&self) -> f64 {
        self.plan().map_or(0.0, |p| p.rate_hz)
    }
}

/// Rate optimizer with fidelity tables cached per swap depth.
#[derive(Debug, Clone)]
pub struct ChainPlanner {
    config: Config,
    tables: BTreeMap<usize, FidelityTable>,
}

impl ChainPlanner {
    pub fn new(config: &Config) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config: config.clone(),
            tables: BTreeMap::new(),
        })
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn table(&mut self, levels: usize) -> Result<&FidelityTable> {
        if !self.tables.contains_key(&levels) {
            let table = FidelityTable::build(&self.config, levels)?;
            self.tables.insert(levels, table);
        }
        Ok(&self.tables[&levels])
    }

    /// Timing of one `(N1, N2)` choice.
    pub fn evaluate(
        &mut self,
        chain: &ChainParams,
        fc_enabled: bool,
        n1: usize,
        n2: usize,
    ) -> Result<ChainPlan> {
        chain.validate()?;
        let max = self.config.max_rounds;
        if n1 > max || n2 > max {
            return Err(Error::ParameterRange {
                name: "rounds",
                value: n1.max(n2) as f64,
                expected: "at most max_rounds",
            });
        }
        let config = self.config.clone();
        let link = LinkParams {
            length_km: chain.link_length_km(),
            fc_enabled,
            ..config.link()
        };
        let timings = OperationTimings::for_link(&config.timing(), &config.cavity()?, &link);
        let table = self.table(chain.swap_levels())?;
        let p1 = table.stage_one.success_probabilities();
        let p2 = table.stage_two[n1].success_probabilities();
        let fidelity = table.fidelity(n1, n2);

        let t_eg1_us = t_eg(n1, &timings, &p1)?.t_eg_us;
        let c = config.c_km_per_us;
        let total = chain.total_length_km;
        let t_repe_us = if chain.swap_levels() == 0 {
            0.0
        } else {
            t_repe(total, config.t_proj_us, c)
        };
        let t_pair_us = t_eg1_us + t_repe_us;
        let t_eg2_us = if n2 == 0 {
            0.0
        } else {
            let generation = ((1u64 << n2) - 1) as f64 * t_pair_us;
            let purification = p2[..n2]
                .iter()
                .map(|&p| Ok(t_puri(config.t_proj_us, p)? + total / c))
                .sum::<Result<f64>>()?;
            generation.max(purification)
        };
        let t_qr_us = t_pair_us + t_eg2_us;
        Ok(ChainPlan {
            stations: chain.stations,
            total_length_km: total,
            link_length_km: chain.link_length_km(),
            fc_enabled,
            herald_mode: config.herald_mode,
            n1,
            n2,
            fidelity,
            t_eg1_us,
            t_repe_us,
            t_pair_us,
            t_eg2_us,
            t_qr_us,
            rate_hz: f64::from(config.parallel_links) * 1e6 / t_qr_us,
        })
    }

    /// Fastest plan over `N1, N2 ∈ 0..=max_rounds` whose end-to-end fidelity
    /// meets the target. Ties go to fewer total rounds, then smaller `N1`.
    pub fn optimize(&mut self, chain: &ChainParams, fc_enabled: bool) -> Result<PlanOutcome> {
        self.optimize_within(chain, fc_enabled, self.config.max_rounds)
    }

    pub fn optimize_within(
        &mut self,
        chain: &ChainParams,
        fc_enabled: bool,
        max_rounds: usize,
    ) -> Result<PlanOutcome> {
        chain.validate()?;
        let max_rounds = max_rounds.min(self.config.max_rounds);
        let target = self.config.fidelity_target;
        let mut best: Option<ChainPlan> = None;
        let mut best_fidelity = 0.0_f64;
        for n1 in 0..=max_rounds {
            for n2 in 0..=max_rounds {
                let fidelity = self.table(chain.swap_levels())?.fidelity(n1, n2);
                best_fidelity = best_fidelity.max(fidelity);
                if fidelity < target {
                    continue;
                }
                let plan = self.evaluate(chain, fc_enabled, n1, n2)?;
                let better = match &best {
                    None => true,
                    Some(b) => {
                        plan.t_qr_us < b.t_qr_us
                            || (plan.t_qr_us == b.t_qr_us && plan.n1 + plan.n2 < b.n1 + b.n2)
                    }
                };
                if better {
                    best = Some(plan);
                }
            }
        }
        Ok(match best {
            Some(plan) => PlanOutcome::Feasible(plan),
            None => PlanOutcome::Infeasible {
                stations: chain.stations,
                total_length_km: chain.total_length_km,
                fc_enabled,
                best_fidelity,
            },
        })
    }

    /// Optimized plans ordered by distance, then station count, then FC off
    /// before on.
    pub fn rate_vs_distance(
        &mut self,
        stations: &[usize],
        distances_km: &[f64],
        fc_options: &[bool],
    ) -> Result<Vec<PlanOutcome>> {
        let mut rows = Vec::with_capacity(stations.len() * distances_km.len() * fc_options.len());
        for &distance in distances_km {
            for &m in stations {
                for &fc in fc_options {
                    rows.push(self.optimize(&ChainParams::new(m, distance)?, fc)?);
                }
            }
        }
        Ok(rows)
    }
}
