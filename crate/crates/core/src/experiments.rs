//! Cohort study harness: every agent plays each condition a fixed number of
//! times, then Weak and Strong group means are compared between the
//! baseline and the adaptive condition.
//!
//! Enjoyment is a human self-report and is not modelled. The summary carries
//! levels reached, time taken, and a mechanical difficulty proxy only.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agents::{sample_agent, ProfileLabel};
use crate::difficulty::{combined_score, SpawnPolicy, TierScheme};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::seed::{SeedDerivation, StreamLabel};
use crate::sim::{self, play_game};
use crate::{CombatParams, GameTrace, PlayerAgent, Score, SkillProfile};

pub const DEFAULT_MASTER_SEED: u64 = 20_180_501;

/// How many agents to draw from one profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileCount {
    pub profile: ProfileLabel,
    pub count: u32,
    /// Skill range; required for `custom`, rejected for built-in profiles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<[f64; 2]>,
}

impl ProfileCount {
    pub fn builtin(profile: ProfileLabel, count: u32) -> Self {
        ProfileCount {
            profile,
            count,
            range: None,
        }
    }

    pub fn skill_profile(&self) -> Result<SkillProfile> {
        match (self.profile, self.range) {
            (ProfileLabel::Custom, Some([lo, hi])) => SkillProfile::custom(lo, hi),
            (ProfileLabel::Custom, None) => Err(Error::InvalidConfig {
                field: "profiles.range".into(),
                reason: "custom profiles need a [low, high] range".into(),
            }),
            (label, None) => Ok(SkillProfile::builtin_for(label).expect("built-in label")),
            (label, Some(_)) => Err(Error::InvalidConfig {
                field: "profiles.range".into(),
                reason: format!("`{label}` has a built-in range; use profile `custom`"),
            }),
        }
    }
}

fn default_games() -> u32 {
    3
}

fn default_conditions() -> Vec<SpawnPolicy> {
    vec![SpawnPolicy::Fixed, SpawnPolicy::Dynamic(TierScheme::V2)]
}

fn default_seed() -> u64 {
    DEFAULT_MASTER_SEED
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CohortConfig {
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default = "default_games")]
    pub games_per_condition: u32,
    /// Played in order; the baseline comes first.
    #[serde(default = "default_conditions")]
    pub conditions: Vec<SpawnPolicy>,
    pub profiles: Vec<ProfileCount>,
    #[serde(default)]
    pub learning_rate: f64,
    #[serde(default)]
    pub combat: CombatParams,
}

impl Default for CohortConfig {
    /// 8 weak, 14 average, 8 strong; three games each without and with DDA.
    fn default() -> Self {
        CohortConfig {
            master_seed: DEFAULT_MASTER_SEED,
            games_per_condition: default_games(),
            conditions: default_conditions(),
            profiles: vec![
                ProfileCount::builtin(ProfileLabel::Weak, 8),
                ProfileCount::builtin(ProfileLabel::Average, 14),
                ProfileCount::builtin(ProfileLabel::Strong, 8),
            ],
            learning_rate: 0.0,
            combat: CombatParams::default(),
        }
    }
}

impl CohortConfig {
    pub fn with_seed(self, master_seed: u64) -> Self {
        CohortConfig {
            master_seed,
            ..self
        }
    }

    pub fn total_agents(&self) -> u32 {
        self.profiles.iter().map(|p| p.count).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |field: &str, reason: String| Error::InvalidConfig {
            field: field.into(),
            reason,
        };
        if self.profiles.is_empty() || self.total_agents() == 0 {
            return Err(invalid("profiles", "at least one agent is required".into()));
        }
        for p in &self.profiles {
            p.skill_profile()?;
        }
        if self.games_per_condition == 0 || self.games_per_condition > u32::from(u16::MAX) {
            return Err(invalid(
                "games_per_condition",
                format!("must be in 1..=65535, got {}", self.games_per_condition),
            ));
        }
        if self.conditions.is_empty() {
            return Err(invalid(
                "conditions",
                "at least one condition is required".into(),
            ));
        }
        if self.conditions.len() >= usize::from(crate::seed::AGENT_SAMPLING_CONDITION) {
            return Err(invalid("conditions", "too many conditions".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(invalid(
                "learning_rate",
                format!("must be finite and >= 0, got {}", self.learning_rate),
            ));
        }
        self.combat.validate()
    }

    /// Agents in config order; ids are 0-based positions.
    pub fn sample_agents(&self) -> Result<Vec<PlayerAgent>> {
        let seeds = SeedDerivation::new(self.master_seed);
        let mut agents = Vec::with_capacity(self.total_agents() as usize);
        for p in &self.profiles {
            let profile = p.skill_profile()?;
            for _ in 0..p.count {
                let id = agents.len() as u32;
                let mut rng = seeds.stream(StreamLabel::agent_sampling(id));
                agents.push(
                    sample_agent(id, &profile, &mut rng).with_learning_rate(self.learning_rate),
                );
            }
        }
        Ok(agents)
    }
}

/// One played game and its headline scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct GameResult {
    pub agent: u32,
    pub condition: u16,
    pub game: u16,
    pub trace: GameTrace,
    pub levels_reached: u32,
    pub duration_min: f64,
    pub difficulty_proxy: f64,
}

impl GameResult {
    pub fn from_trace(agent: u32, condition: u16, game: u16, trace: GameTrace) -> Self {
        GameResult {
            agent,
            condition,
            game,
            levels_reached: trace.levels_reached,
            duration_min: trace.total_duration_s / 60.0,
            difficulty_proxy: difficulty_proxy(&trace),
            trace,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CohortResults {
    pub master_seed: u64,
    pub conditions: Vec<SpawnPolicy>,
    pub games_per_condition: u32,
    pub agents: Vec<PlayerAgent>,
    /// Agent-major, then condition, then game.
    pub games: Vec<GameResult>,
}

impl CohortResults {
    pub fn agent(&self, id: u32) -> Option<&PlayerAgent> {
        self.agents.iter().find(|a| a.id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

pub fn run_cohort(config: &CohortConfig) -> Result<CohortResults> {
    run_cohort_with(config, Execution::Parallel)
}

/// Results are identical for both execution modes: each game owns the
/// stream derived from its (agent, condition, game) label.
pub fn run_cohort_with(config: &CohortConfig, execution: Execution) -> Result<CohortResults> {
    config.validate()?;
    let agents = config.sample_agents()?;
    let seeds = SeedDerivation::new(config.master_seed);
    let games = config.games_per_condition as u16;

    let jobs: Vec<(PlayerAgent, u16, SpawnPolicy, u16)> = agents
        .iter()
        .flat_map(|agent| {
            config
                .conditions
                .iter()
                .enumerate()
                .flat_map(move |(c, &policy)| {
                    (0..games).map(move |g| (*agent, c as u16, policy, g))
                })
        })
        .collect();

    let play = |&(agent, condition, policy, game): &(PlayerAgent, u16, SpawnPolicy, u16)| {
        let played_before = u32::from(condition) * u32::from(games) + u32::from(game);
        let skill = agent.apply_learning(played_before).skill;
        let mut rng = seeds.stream(StreamLabel::new(agent.id, condition, game));
        let trace = play_game(skill, policy, &config.combat, &mut rng);
        GameResult::from_trace(agent.id, condition, game, trace)
    };

    let results = match execution {
        Execution::Sequential => jobs.iter().map(play).collect(),
        Execution::Parallel => jobs.par_iter().map(play).collect(),
    };

    Ok(CohortResults {
        master_seed: config.master_seed,
        conditions: config.conditions.clone(),
        games_per_condition: config.games_per_condition,
        agents,
        games: results,
    })
}

/// `1 + 4 * (1 - mean / 100)` clamped to `[1, 5]`; 5 when `scores` is empty.
pub fn proxy_from_v1_scores(scores: &[Score]) -> f64 {
    if scores.is_empty() {
        return 5.0;
    }
    let mean = scores.iter().copied().sum::<Score>() / Score::from_integer(scores.len() as i64);
    let mean = mean.to_f64().expect("finite rational");
    (1.0 + 4.0 * (1.0 - mean / 100.0)).clamp(1.0, 5.0)
}

/// Mechanical 1..=5 stand-in for perceived difficulty. Always measured with
/// the V1 score so it reads the same under every condition.
pub fn difficulty_proxy<F: Real>(trace: &sim::GameTrace<F>) -> f64 {
    let scores: Vec<Score> = trace
        .completed_levels()
        .map(|l| {
            combined_score(TierScheme::V1, l.outcome.end_gate, l.outcome.end_player)
                .expect("completed level")
        })
        .collect();
    proxy_from_v1_scores(&scores)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    LevelReached,
    TimeTaken,
    Difficulty,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::LevelReached, Metric::TimeTaken, Metric::Difficulty];

    pub fn title(self) -> &'static str {
        match self {
            Metric::LevelReached => "Level Reached",
            Metric::TimeTaken => "Time Taken",
            Metric::Difficulty => "Difficulty",
        }
    }

    fn of(self, g: &GameResult) -> f64 {
        match self {
            Metric::LevelReached => f64::from(g.levels_reached),
            Metric::TimeTaken => g.duration_min,
            Metric::Difficulty => g.difficulty_proxy,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.title())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub group: ProfileLabel,
    pub metric: Metric,
    pub without: f64,
    pub with: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SummaryTable {
    /// Metric-major, then Weak, Average, Strong. Groups with no agents are absent.
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    pub fn get(&self, group: ProfileLabel, metric: Metric) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.group == group && r.metric == metric)
    }
}

const SUMMARY_GROUPS: [ProfileLabel; 3] = [
    ProfileLabel::Weak,
    ProfileLabel::Average,
    ProfileLabel::Strong,
];

/// Baseline is the first fixed condition, treatment the first dynamic one.
pub fn summarize(results: &CohortResults) -> Result<SummaryTable> {
    let without = results
        .conditions
        .iter()
        .position(|c| !c.is_dynamic())
        .ok_or_else(|| Error::MissingCondition("no fixed-policy baseline".into()))?;
    let with = results
        .conditions
        .iter()
        .position(|c| c.is_dynamic())
        .ok_or_else(|| Error::MissingCondition("no dynamic-policy condition".into()))?;
    summarize_conditions(results, without as u16, with as u16)
}

/// Per-agent means over that agent's games first, then the mean over agents.
pub fn summarize_conditions(
    results: &CohortResults,
    without: u16,
    with: u16,
) -> Result<SummaryTable> {
    for c in [without, with] {
        if usize::from(c) >= results.conditions.len() {
            return Err(Error::MissingCondition(format!(
                "condition index {c} not in results"
            )));
        }
    }
    // Sorted keys make the sums independent of the order games are stored in.
    let mut per_agent: BTreeMap<(ProfileLabel, u32, u16), BTreeMap<u16, &GameResult>> =
        BTreeMap::new();
    for g in &results.games {
        let agent = results.agent(g.agent).ok_or_else(|| {
            Error::MalformedRecord(format!("game refers to unknown agent {}", g.agent))
        })?;
        per_agent
            .entry((agent.profile, g.agent, g.condition))
            .or_default()
            .insert(g.game, g);
    }

    let mut rows = Vec::new();
    for metric in Metric::ALL {
        for group in SUMMARY_GROUPS {
            let group_mean = |condition: u16| -> Option<f64> {
                let agent_means: Vec<f64> = per_agent
                    .iter()
                    .filter(|((p, _, c), _)| *p == group && *c == condition)
                    .map(|(_, games)| {
                        games.values().map(|g| metric.of(g)).sum::<f64>() / games.len() as f64
                    })
                    .collect();
                (!agent_means.is_empty())
                    .then(|| agent_means.iter().sum::<f64>() / agent_means.len() as f64)
            };
            match (group_mean(without), group_mean(with)) {
                (Some(a), Some(b)) => rows.push(SummaryRow {
                    group,
                    metric,
                    without: a,
                    with: b,
                    difference: b - a,
                }),
                (None, None) => {}
                _ => {
                    return Err(Error::MissingCondition(format!(
                        "{group} agents did not play both conditions"
                    )))
                }
            }
        }
    }
    Ok(SummaryTable { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increase,
    Decrease,
}

impl Direction {
    fn holds(self, difference: f64) -> bool {
        match self {
            Direction::Increase => difference > 0.0,
            Direction::Decrease => difference < 0.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Direction::Increase => '+',
            Direction::Decrease => '-',
        }
    }
}

/// Directions reported for human players with DDA on versus off.
pub const EXPECTED_DIRECTIONS: [(ProfileLabel, Metric, Direction); 6] = [
    (
        ProfileLabel::Weak,
        Metric::LevelReached,
        Direction::Increase,
    ),
    (
        ProfileLabel::Strong,
        Metric::LevelReached,
        Direction::Decrease,
    ),
    (ProfileLabel::Weak, Metric::TimeTaken, Direction::Increase),
    (ProfileLabel::Strong, Metric::TimeTaken, Direction::Decrease),
    (ProfileLabel::Weak, Metric::Difficulty, Direction::Decrease),
    (
        ProfileLabel::Strong,
        Metric::Difficulty,
        Direction::Increase,
    ),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Match,
    Mismatch,
    Unavailable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignCheck {
    pub group: ProfileLabel,
    pub metric: Metric,
    pub expected: Direction,
    pub difference: Option<f64>,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignReport {
    pub checks: Vec<SignCheck>,
}

impl SignReport {
    pub fn all_match(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Match)
    }

    pub fn flagged(&self) -> impl Iterator<Item = &SignCheck> {
        self.checks
            .iter()
            .filter(|c| c.status == CheckStatus::Mismatch)
    }

    pub fn get(&self, group: ProfileLabel, metric: Metric) -> Option<&SignCheck> {
        self.checks
            .iter()
            .find(|c| c.group == group && c.metric == metric)
    }
}

/// Sign-check Weak and Strong differences. Average rows are not checked.
pub fn compare_conditions(table: &SummaryTable) -> SignReport {
    let checks = EXPECTED_DIRECTIONS
        .iter()
        .map(|&(group, metric, expected)| {
            let difference = table.get(group, metric).map(|r| r.difference);
            let status = match difference {
                None => CheckStatus::Unavailable,
                Some(d) if expected.holds(d) => CheckStatus::Match,
                Some(_) => CheckStatus::Mismatch,
            };
            SignCheck {
                group,
                metric,
                expected,
                difference,
                status,
            }
        })
        .collect();
    SignReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::difficulty::Health;
    use crate::sim::{GameOutcome, LevelOutcome, LevelRecord, Wave};

    fn h(v: u32) -> Health {
        Health::new(v).unwrap()
    }

    fn level(level: u32, gate: u32, player: u32, survived: bool) -> LevelRecord<f64> {
        LevelRecord {
            level,
            wave: Wave {
                tankers: 5,
                zombies: 5,
            },
            outcome: LevelOutcome {
                survived,
                start_gate: Health::FULL,
                end_gate: h(gate),
                end_player: h(player),
                player_hits_taken: 0,
                gate_hits_taken: 0,
                enemies_remaining: 0,
                duration_s: 1.0,
            },
            score: None,
            tier: None,
            next_wave_size: None,
        }
    }

    fn trace(levels: Vec<LevelRecord<f64>>) -> GameTrace {
        GameTrace {
            skill: 0.5,
            policy: SpawnPolicy::Fixed,
            levels_reached: levels.len() as u32,
            levels,
            outcome: GameOutcome::PlayerDeath,
            total_duration_s: 60.0,
        }
    }

    #[test]
    fn proxy_examples() {
        let perfect = trace(vec![
            level(1, 100, 100, true),
            level(2, 100, 100, true),
            level(3, 100, 0, false),
        ]);
        assert_eq!(difficulty_proxy(&perfect), 1.0);
        let early = trace(vec![level(1, 60, 0, false)]);
        assert_eq!(difficulty_proxy(&early), 5.0);
        // V1 scores 70 and 40
        let mixed = trace(vec![
            level(1, 100, 40, true),
            level(2, 40, 40, true),
            level(3, 40, 0, false),
        ]);
        assert!((difficulty_proxy(&mixed) - 2.8).abs() < 1e-12);
    }

    #[test]
    fn proxy_from_scores_handles_fractions() {
        assert_eq!(
            proxy_from_v1_scores(&[Score::new(25, 2)]),
            1.0 + 4.0 * (1.0 - 0.125)
        );
    }

    fn synthetic(weak: (u32, u32), strong: Option<(u32, u32)>) -> CohortResults {
        let mut agents = vec![PlayerAgent::new(0, 0.2, ProfileLabel::Weak)];
        if strong.is_some() {
            agents.push(PlayerAgent::new(1, 0.8, ProfileLabel::Strong));
        }
        let mut games = Vec::new();
        for agent in &agents {
            let (a, b) = if agent.profile == ProfileLabel::Weak {
                weak
            } else {
                strong.unwrap()
            };
            for (c, levels) in [(0u16, a), (1u16, b)] {
                for g in 0..3u16 {
                    let lv: Vec<_> = (1..levels)
                        .map(|k| level(k, 100, 100, true))
                        .chain([level(levels, 0, 100, false)])
                        .collect();
                    games.push(GameResult::from_trace(agent.id, c, g, trace(lv)));
                }
            }
        }
        CohortResults {
            master_seed: 0,
            conditions: vec![SpawnPolicy::Fixed, SpawnPolicy::Dynamic(TierScheme::V2)],
            games_per_condition: 3,
            agents,
            games,
        }
    }

    #[test]
    fn summarize_synthetic_levels() {
        let table = summarize(&synthetic((3, 5), Some((9, 7)))).unwrap();
        let row = table.get(ProfileLabel::Weak, Metric::LevelReached).unwrap();
        assert_eq!((row.without, row.with, row.difference), (3.0, 5.0, 2.0));
        let row = table
            .get(ProfileLabel::Strong, Metric::LevelReached)
            .unwrap();
        assert_eq!(row.difference, -2.0);
        assert!(table
            .get(ProfileLabel::Average, Metric::LevelReached)
            .is_none());
    }

    #[test]
    fn summarize_requires_both_conditions() {
        let mut r = synthetic((3, 5), None);
        r.conditions = vec![SpawnPolicy::Fixed];
        r.games.retain(|g| g.condition == 0);
        assert!(matches!(summarize(&r), Err(Error::MissingCondition(_))));
    }

    #[test]
    fn identical_conditions_raise_every_flag() {
        let report = compare_conditions(&summarize(&synthetic((4, 4), Some((8, 8)))).unwrap());
        assert_eq!(report.checks.len(), 6);
        for c in &report.checks {
            assert_eq!(c.difference, Some(0.0));
            assert_eq!(c.status, CheckStatus::Mismatch);
        }
    }

    #[test]
    fn weak_only_cohort_marks_strong_unavailable() {
        let report = compare_conditions(&summarize(&synthetic((3, 5), None)).unwrap());
        for c in &report.checks {
            if c.group == ProfileLabel::Strong {
                assert_eq!(c.status, CheckStatus::Unavailable);
                assert!(c.difference.is_none());
            }
        }
        assert_eq!(
            report
                .get(ProfileLabel::Weak, Metric::LevelReached)
                .unwrap()
                .status,
            CheckStatus::Match
        );
    }

    #[test]
    fn default_config_shape() {
        let c = CohortConfig::default();
        assert_eq!(c.total_agents(), 30);
        assert_eq!(c.games_per_condition, 3);
        assert_eq!(c.conditions.len(), 2);
        c.validate().unwrap();
    }

    #[test]
    fn config_validation() {
        let mut c = CohortConfig::default();
        c.profiles.clear();
        assert!(c.validate().is_err());
        let mut c = CohortConfig::default();
        c.conditions.clear();
        assert!(c.validate().is_err());
        let mut c = CohortConfig {
            profiles: vec![ProfileCount::builtin(ProfileLabel::Custom, 2)],
            ..CohortConfig::default()
        };
        assert!(c.validate().is_err());
        c.profiles[0].range = Some([0.5, 0.5]);
        c.validate().unwrap();
    }
}
