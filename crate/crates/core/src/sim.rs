//! Abstract model of the castle-defence game loop.
//!
//! A level is resolved in aggregate: every Tanker rolls `attempts_per_enemy`
//! hit attempts against the player, every Zombie the same against the gate.
//! Hits and kills are then shuffled into one timeline and replayed until the
//! wave is cleared or something reaches 0 health. Larger waves raise the
//! per-attempt hit chance through the pressure factor `size / reference`.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::difficulty::{
    combined_score, next_wave_size, ControllerState, Health, SpawnPolicy, Tier, TierScheme,
};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::Score;

/// Bounds of the uniform zombie fraction drawn per wave.
pub const ZOMBIE_FRACTION_MIN: f64 = 0.3;
pub const ZOMBIE_FRACTION_MAX: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wave {
    /// Attack the player.
    pub tankers: u32,
    /// Ignore the player, attack the gate.
    pub zombies: u32,
}

impl Wave {
    /// Split `size` with zombie fraction `ratio`; zombies take `round(ratio * size)`.
    pub fn from_ratio(size: u32, ratio: f64) -> Self {
        let zombies = ((ratio * f64::from(size)).round() as u32).min(size);
        Wave {
            tankers: size - zombies,
            zombies,
        }
    }

    pub fn size(&self) -> u32 {
        self.tankers + self.zombies
    }
}

pub fn compose_wave<R: Rng + ?Sized>(size: u32, rng: &mut R) -> Result<Wave> {
    if size == 0 {
        return Err(Error::EmptyWave);
    }
    let ratio =
        ZOMBIE_FRACTION_MIN + (ZOMBIE_FRACTION_MAX - ZOMBIE_FRACTION_MIN) * rng.gen::<f64>();
    Ok(Wave::from_ratio(size, ratio))
}

/// Free constants of the combat model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CombatParams<F> {
    /// Wave size at which the pressure factor is 1.
    pub reference_wave_size: u32,
    /// Hit attempts each enemy gets before it is killed.
    pub attempts_per_enemy: u32,
    /// Tanker per-attempt hit chance at pressure 1 and skill 0.
    pub tanker_hit_coeff: F,
    /// Zombie per-attempt hit chance at pressure 1 and skill 0.
    pub zombie_hit_coeff: F,
    pub pressure_exponent: F,
    /// How strongly skill protects the gate: zombie chance scales by `1 - discount * skill`.
    pub zombie_skill_discount: F,
    /// Kills per second at skill 0.
    pub kill_rate_base: F,
    /// Extra kills per second per unit of skill.
    pub kill_rate_slope: F,
    pub inter_level_pause_s: F,
    pub max_levels: u32,
}

impl<F: Real> Default for CombatParams<F> {
    /// Calibrated so unassisted weak and strong cohorts land near the
    /// reported baseline levels and play times.
    fn default() -> Self {
        CombatParams {
            reference_wave_size: 10,
            attempts_per_enemy: 3,
            tanker_hit_coeff: F::lit(0.37),
            zombie_hit_coeff: F::lit(0.18),
            pressure_exponent: F::lit(0.69),
            zombie_skill_discount: F::lit(1.42),
            kill_rate_base: F::lit(0.15),
            kill_rate_slope: F::lit(0.15),
            inter_level_pause_s: F::lit(10.0),
            max_levels: 50,
        }
    }
}

impl<F: Real> CombatParams<F> {
    /// Parameters under which nothing ever lands a hit.
    pub fn harmless() -> Self {
        CombatParams {
            tanker_hit_coeff: F::zero(),
            zombie_hit_coeff: F::zero(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = |field: &'static str, v: F| {
            if v.is_finite() && v >= F::zero() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    field,
                    reason: format!("must be finite and >= 0, got {v:?}"),
                })
            }
        };
        nonneg("tanker_hit_coeff", self.tanker_hit_coeff)?;
        nonneg("zombie_hit_coeff", self.zombie_hit_coeff)?;
        nonneg("pressure_exponent", self.pressure_exponent)?;
        nonneg("zombie_skill_discount", self.zombie_skill_discount)?;
        nonneg("kill_rate_base", self.kill_rate_base)?;
        nonneg("kill_rate_slope", self.kill_rate_slope)?;
        nonneg("inter_level_pause_s", self.inter_level_pause_s)?;
        if self.kill_rate_base <= F::zero() {
            return Err(Error::InvalidParameter {
                field: "kill_rate_base",
                reason: "must be > 0 so every skill has a positive kill rate".into(),
            });
        }
        if self.reference_wave_size == 0 {
            return Err(Error::InvalidParameter {
                field: "reference_wave_size",
                reason: "must be >= 1".into(),
            });
        }
        if self.max_levels == 0 {
            return Err(Error::InvalidParameter {
                field: "max_levels",
                reason: "must be >= 1".into(),
            });
        }
        Ok(())
    }

    /// Per-attempt hit chances `(tanker, zombie)` for a wave of `size`.
    pub fn hit_probabilities(&self, skill: F, size: u32) -> (F, F) {
        let pressure = (F::lit(f64::from(size)) / F::lit(f64::from(self.reference_wave_size)))
            .powf(self.pressure_exponent);
        let clamp = |p: F| p.max(F::zero()).min(F::one());
        let tanker = clamp(self.tanker_hit_coeff * pressure * (F::one() - skill));
        let zombie = clamp(
            self.zombie_hit_coeff * pressure * (F::one() - self.zombie_skill_discount * skill),
        );
        (tanker, zombie)
    }

    pub fn kill_rate(&self, skill: F) -> F {
        self.kill_rate_base + self.kill_rate_slope * skill
    }
}

/// Resolved end-of-level state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelOutcome<F> {
    pub survived: bool,
    pub start_gate: Health,
    pub end_gate: Health,
    /// Read before end-of-level regeneration.
    pub end_player: Health,
    pub player_hits_taken: u32,
    pub gate_hits_taken: u32,
    pub enemies_remaining: u32,
    pub duration_s: F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Event {
    PlayerHit,
    GateHit,
    EnemyDown,
}

fn bernoulli_count<F: Real, R: Rng + ?Sized>(trials: u32, p: F, rng: &mut R) -> u32 {
    (0..trials).filter(|_| F::lit(rng.gen::<f64>()) < p).count() as u32
}

/// Play one wave. The player starts at full health; `gate` carries over.
pub fn resolve_level<F: Real, R: Rng + ?Sized>(
    skill: F,
    wave: Wave,
    gate: Health,
    params: &CombatParams<F>,
    rng: &mut R,
) -> Result<LevelOutcome<F>> {
    if gate.is_destroyed() {
        return Err(Error::DestroyedEntity);
    }
    Ok(resolve_level_inner(skill, wave, gate, params, rng))
}

fn resolve_level_inner<F: Real, R: Rng + ?Sized>(
    skill: F,
    wave: Wave,
    gate: Health,
    params: &CombatParams<F>,
    rng: &mut R,
) -> LevelOutcome<F> {
    let size = wave.size();
    let (p_tanker, p_zombie) = params.hit_probabilities(skill, size);
    let attempts = params.attempts_per_enemy;

    let mut events = Vec::with_capacity((size * (attempts + 1)) as usize);
    for _ in 0..wave.tankers {
        let hits = bernoulli_count(attempts, p_tanker, rng);
        events.extend(std::iter::repeat_n(Event::PlayerHit, hits as usize));
    }
    for _ in 0..wave.zombies {
        let hits = bernoulli_count(attempts, p_zombie, rng);
        events.extend(std::iter::repeat_n(Event::GateHit, hits as usize));
    }
    events.extend(std::iter::repeat_n(Event::EnemyDown, size as usize));
    events.shuffle(rng);

    let mut player = Health::FULL;
    let mut end_gate = gate;
    let (mut player_hits, mut gate_hits, mut killed) = (0, 0, 0);
    for event in events {
        match event {
            Event::PlayerHit => {
                player = player.hit();
                player_hits += 1;
            }
            Event::GateHit => {
                end_gate = end_gate.hit();
                gate_hits += 1;
            }
            Event::EnemyDown => killed += 1,
        }
        if player.is_destroyed() || end_gate.is_destroyed() {
            break;
        }
    }

    let survived = !player.is_destroyed() && !end_gate.is_destroyed();
    debug_assert!(!survived || killed == size);
    LevelOutcome {
        survived,
        start_gate: gate,
        end_gate,
        end_player: player,
        player_hits_taken: player_hits,
        gate_hits_taken: gate_hits,
        enemies_remaining: size - killed,
        duration_s: F::lit(f64::from(killed)) / params.kill_rate(skill),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameOutcome {
    PlayerDeath,
    GateDestroyed,
    LevelCapReached,
}

/// One level of a [`GameTrace`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord<F> {
    pub level: u32,
    pub wave: Wave,
    pub outcome: LevelOutcome<F>,
    /// Combined score of a completed level, under the active scheme
    /// (V1 for the fixed policy).
    pub score: Option<Score>,
    /// Allocated tier, dynamic policies only.
    pub tier: Option<Tier>,
    pub next_wave_size: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameTrace<F> {
    pub skill: F,
    pub policy: SpawnPolicy,
    pub levels: Vec<LevelRecord<F>>,
    pub outcome: GameOutcome,
    pub total_duration_s: F,
    /// Highest level entered (a level lost mid-way counts).
    pub levels_reached: u32,
}

impl<F: Real> GameTrace<F> {
    pub fn completed_levels(&self) -> impl Iterator<Item = &LevelRecord<F>> {
        self.levels.iter().filter(|l| l.outcome.survived)
    }

    pub fn levels_completed(&self) -> u32 {
        self.completed_levels().count() as u32
    }
}

/// Play a whole game: level 1 has 10 enemies; after each cleared level the
/// controller scores the pre-regeneration healths, the player is restored to
/// full health, and the gate keeps its damage.
pub fn play_game<F: Real, R: Rng + ?Sized>(
    skill: F,
    policy: SpawnPolicy,
    params: &CombatParams<F>,
    rng: &mut R,
) -> GameTrace<F> {
    let mut state = ControllerState::new();
    let mut gate = Health::FULL;
    let mut levels = Vec::new();
    let mut total = F::zero();
    let score_scheme = match policy {
        SpawnPolicy::Fixed => TierScheme::V1,
        SpawnPolicy::Dynamic(scheme) => scheme,
    };

    let outcome = loop {
        let level = levels.len() as u32 + 1;
        let wave = compose_wave(state.wave_size, rng).expect("wave sizes are >= 10");
        let outcome = resolve_level_inner(skill, wave, gate, params, rng);
        total = total + outcome.duration_s;

        if !outcome.survived {
            levels.push(LevelRecord {
                level,
                wave,
                outcome,
                score: None,
                tier: None,
                next_wave_size: None,
            });
            break if outcome.end_player.is_destroyed() {
                GameOutcome::PlayerDeath
            } else {
                GameOutcome::GateDestroyed
            };
        }

        total = total + params.inter_level_pause_s;
        let score =
            combined_score(score_scheme, outcome.end_gate, outcome.end_player).expect("survived");
        let (next, size) =
            next_wave_size(state, policy, outcome.end_gate, outcome.end_player).expect("survived");
        levels.push(LevelRecord {
            level,
            wave,
            outcome,
            score: Some(score),
            tier: next.last_tier,
            next_wave_size: Some(size),
        });
        state = next;
        gate = outcome.end_gate;
        if level >= params.max_levels {
            break GameOutcome::LevelCapReached;
        }
    };

    GameTrace {
        skill,
        policy,
        levels_reached: levels.len() as u32,
        levels,
        outcome,
        total_duration_s: total,
    }
}
