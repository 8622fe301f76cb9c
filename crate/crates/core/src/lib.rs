//! Tier-based dynamic difficulty adjustment for a wave-survival castle
//! defence game, plus a seeded simulation laboratory for studying it.
//!
//! * [`difficulty`]: the controller. End-of-level gate and player health are
//!   combined into a score, the score into a tier T1..T5, and the tier into
//!   the number of extra enemies in the next wave.
//! * [`sim`]: an aggregate, stochastic model of one level and of a whole game.
//! * [`agents`]: single-scalar skill models standing in for players.
//! * [`experiments`]: cohort runs (weak / average / strong, with and without
//!   DDA) and their summary tables.
//! * [`seed`] and [`record`]: stream derivation and file formats.
//!
//! The math is generic over the scalar type (see [`scalar`]); the aliases
//! below fix the instantiations used by the experiment harness and CLI.

pub mod agents;
pub mod difficulty;
pub mod error;
pub mod experiments;
pub mod record;
pub mod scalar;
pub mod seed;
pub mod sim;

pub use difficulty::{
    allocate_tier, combined_score, next_wave_size, spawn_increment, tier_for_score, tier_table,
    ControllerState, Health, SpawnPolicy, Tier, TierScheme, TierTable,
};
pub use error::{Error, Result};
pub use experiments::{
    compare_conditions, difficulty_proxy, run_cohort, run_cohort_with, summarize, CohortConfig,
    CohortResults, Execution, Metric, SignReport, SummaryTable,
};
pub use sim::{compose_wave, play_game, resolve_level, GameOutcome, Wave};

/// Exact combined score; every reachable value is a multiple of 2.5.
pub type Score = num_rational::Ratio<i64>;

pub type CombatParams = sim::CombatParams<f64>;
pub type LevelOutcome = sim::LevelOutcome<f64>;
pub type LevelRecord = sim::LevelRecord<f64>;
pub type GameTrace = sim::GameTrace<f64>;
pub type PlayerAgent = agents::PlayerAgent<f64>;
pub type SkillProfile = agents::SkillProfile<f64>;
