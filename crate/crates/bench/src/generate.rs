//! Seeded random instances.
//!
//! Every family draws one job at a time from a single `Pcg64` stream seeded
//! with `seed`, so the same configuration always yields the same instance.
//! Uniform draws are continuous. A job whose speed on all machines is zero
//! is drawn again.

use malleable::combinatorics::matroid::partition_matroid;
use malleable::speed::{BudgetAdditiveSpeed, CoverageSpeed, MatroidMatchingSpeed, ScaledMatroidRankSpeed};
use malleable::{clique_gap_instance, Instance, MachineSet, ModelError, SetFunction, Speed};
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Redraws allowed for a single job before giving up.
pub const MAX_REDRAWS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Coverage,
    BudgetAdditive,
    MatroidMatching,
    MatroidRank,
    CliqueGap,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Coverage,
        Family::BudgetAdditive,
        Family::MatroidMatching,
        Family::MatroidRank,
        Family::CliqueGap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Coverage => "coverage",
            Family::BudgetAdditive => "budget_additive",
            Family::MatroidMatching => "matroid_matching",
            Family::MatroidRank => "matroid_rank",
            Family::CliqueGap => "clique_gap",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == s)
    }
}

/// Family recipe and its parameters. `None` sizes default to functions of
/// the machine count `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyParams {
    /// Each slot lies in `B_ij` with probability `p`;
    /// `g_j(S) = |∪_{i∈S} B_ij| / L_j`.
    Coverage {
        p: f64,
        /// Defaults to `m`.
        slots: Option<usize>,
        load_max: f64,
    },
    /// `g_j(S) = min(Σ_{i∈S} w_ij, W_j) / L_j` with `w_ij ~ U[1, w_max]` and
    /// `W_j ~ U[1, budget_max]`.
    BudgetAdditive {
        w_max: f64,
        /// Defaults to `100 m`.
        budget_max: Option<f64>,
        load_max: f64,
    },
    /// Slot weights `U[1, w_max]`, slot-machine edges with probability `p`,
    /// slots in random groups with at most `rank` matched per group.
    MatroidMatching {
        w_max: f64,
        p: f64,
        rank: usize,
        /// Defaults to `m/4 + 1`.
        slots: Option<usize>,
        /// Defaults to `m/8 + 1`.
        groups: Option<usize>,
        load_max: f64,
    },
    /// Machines in random groups, each group with a random capacity in
    /// `1..=cap_max`; `g_j(S) = rank_j(S) / q_j` with `q_j ~ U[1, quota_max]`.
    MatroidRank {
        /// Defaults to `m/4 + 1`.
        groups: Option<usize>,
        cap_max: usize,
        quota_max: f64,
    },
    /// Jobs are the nodes of `K_n` and machines its edges; `m` is ignored.
    CliqueGap,
}

impl FamilyParams {
    pub fn defaults(family: Family) -> Self {
        match family {
            Family::Coverage => FamilyParams::Coverage {
                p: 0.2,
                slots: None,
                load_max: 1000.0,
            },
            Family::BudgetAdditive => FamilyParams::BudgetAdditive {
                w_max: 100.0,
                budget_max: None,
                load_max: 1000.0,
            },
            Family::MatroidMatching => FamilyParams::MatroidMatching {
                w_max: 100.0,
                p: 0.1,
                rank: 2,
                slots: None,
                groups: None,
                load_max: 1000.0,
            },
            Family::MatroidRank => FamilyParams::MatroidRank {
                groups: None,
                cap_max: 2,
                quota_max: 1000.0,
            },
            Family::CliqueGap => FamilyParams::CliqueGap,
        }
    }

    /// Matroid matching with `m + 1` slots and `m + 1` groups, used when
    /// measuring the transformation on optimal assignments.
    pub fn matroid_matching_wide(m: usize) -> Self {
        match FamilyParams::defaults(Family::MatroidMatching) {
            FamilyParams::MatroidMatching { w_max, p, rank, load_max, .. } => FamilyParams::MatroidMatching {
                w_max,
                p,
                rank,
                slots: Some(m + 1),
                groups: Some(m + 1),
                load_max,
            },
            _ => unreachable!(),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            FamilyParams::Coverage { .. } => Family::Coverage,
            FamilyParams::BudgetAdditive { .. } => Family::BudgetAdditive,
            FamilyParams::MatroidMatching { .. } => Family::MatroidMatching,
            FamilyParams::MatroidRank { .. } => Family::MatroidRank,
            FamilyParams::CliqueGap => Family::CliqueGap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub params: FamilyParams,
}

impl GeneratorConfig {
    pub fn new(family: Family, n: usize, m: usize, seed: u64) -> Self {
        GeneratorConfig {
            n,
            m,
            seed,
            params: FamilyParams::defaults(family),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("job {job} still had zero speed after {MAX_REDRAWS} redraws")]
    ZeroSpeed { job: usize },
}

fn uniform<R: Rng>(rng: &mut R, hi: f64) -> f64 {
    if hi <= 1.0 {
        1.0
    } else {
        rng.gen_range(1.0..=hi)
    }
}

fn random_subset<R: Rng>(rng: &mut R, size: usize, p: f64) -> MachineSet {
    (0..size).filter(|_| rng.gen_bool(p)).collect()
}

fn draw_job<R: Rng>(rng: &mut R, params: &FamilyParams, m: usize) -> Speed {
    match *params {
        FamilyParams::Coverage { p, slots, load_max } => {
            let k = slots.unwrap_or(m);
            let slots = (0..m).map(|_| random_subset(rng, k, p)).collect();
            Speed::Coverage(CoverageSpeed {
                slots,
                slot_count: k,
                load: uniform(rng, load_max),
            })
        }
        FamilyParams::BudgetAdditive { w_max, budget_max, load_max } => {
            let weights = (0..m).map(|_| uniform(rng, w_max)).collect();
            let budget = uniform(rng, budget_max.unwrap_or(100.0 * m as f64));
            Speed::BudgetAdditive(BudgetAdditiveSpeed {
                weights,
                budget,
                load: uniform(rng, load_max),
            })
        }
        FamilyParams::MatroidMatching {
            w_max,
            p,
            rank,
            slots,
            groups,
            load_max,
        } => {
            let k = slots.unwrap_or(m / 4 + 1);
            let b = groups.unwrap_or(m / 8 + 1);
            let slot_weights = (0..k).map(|_| uniform(rng, w_max)).collect();
            let edges = (0..k).map(|_| random_subset(rng, m, p)).collect();
            let groups = (0..k).map(|_| rng.gen_range(0..b)).collect();
            Speed::MatroidMatching(MatroidMatchingSpeed {
                slot_weights,
                edges,
                groups,
                group_count: b,
                rank,
                load: uniform(rng, load_max),
            })
        }
        FamilyParams::MatroidRank {
            groups,
            cap_max,
            quota_max,
        } => {
            let b = groups.unwrap_or(m / 4 + 1);
            let membership = (0..m).map(|_| rng.gen_range(0..b)).collect();
            let caps = (0..b).map(|_| rng.gen_range(1..=cap_max)).collect();
            Speed::MatroidRank(ScaledMatroidRankSpeed {
                matroid: partition_matroid(membership, caps),
                quota: uniform(rng, quota_max),
            })
        }
        FamilyParams::CliqueGap => unreachable!("clique gap instances are not drawn per job"),
    }
}

fn check(config: &GeneratorConfig) -> Result<(), GenerateError> {
    let bad = |msg: String| Err(GenerateError::InvalidParameter(msg));
    if config.params.family() != Family::CliqueGap && config.m == 0 {
        return bad("m must be positive".into());
    }
    match config.params {
        FamilyParams::Coverage { p, slots, .. } => {
            if !(p > 0.0 && p <= 1.0) {
                return bad(format!("coverage p must lie in (0, 1], got {p}"));
            }
            if slots.unwrap_or(config.m) > 64 {
                return bad("coverage supports at most 64 slots".into());
            }
        }
        FamilyParams::MatroidMatching { p, rank, slots, groups, .. } => {
            if !(p > 0.0 && p <= 1.0) {
                return bad(format!("matching p must lie in (0, 1], got {p}"));
            }
            if rank == 0 || slots == Some(0) || groups == Some(0) {
                return bad("matching rank, slots and groups must be positive".into());
            }
        }
        FamilyParams::MatroidRank { groups, cap_max, .. } => {
            if cap_max == 0 || groups == Some(0) {
                return bad("matroid groups and capacities must be positive".into());
            }
        }
        FamilyParams::BudgetAdditive { .. } | FamilyParams::CliqueGap => {}
    }
    Ok(())
}

/// Draws an instance; equal configurations give identical instances.
pub fn generate(config: &GeneratorConfig) -> Result<Instance, GenerateError> {
    check(config)?;
    if config.params == FamilyParams::CliqueGap {
        return Ok(clique_gap_instance(config.n)?.0);
    }
    let mut rng = Pcg64::seed_from_u64(config.seed);
    let all = MachineSet::full(config.m);
    let mut speeds = Vec::with_capacity(config.n);
    for job in 0..config.n {
        let speed = (0..MAX_REDRAWS)
            .map(|_| draw_job(&mut rng, &config.params, config.m))
            .find(|s| s.value(all) > 0.0)
            .ok_or(GenerateError::ZeroSpeed { job })?;
        speeds.push(speed);
    }
    Ok(Instance::new(config.m, speeds)?)
}
