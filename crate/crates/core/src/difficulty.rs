//! The difficulty controller: end-of-level tier scoring, the tier range
//! tables, and the spawn-increment policy that sizes the next wave.
//!
//! Scores are generic over [`Scalar`]; the default instantiation is the exact
//! rational [`Score`](crate::Score) so interval membership at printed bounds
//! (e.g. 21 vs 21.5) is never subject to rounding.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Score;

/// Hit points of the player or the gate. Each hit removes 10.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Health(u8);

impl Health {
    pub const ZERO: Health = Health(0);
    pub const FULL: Health = Health(100);
    /// Damage dealt by one hit.
    pub const HIT: u8 = 10;

    pub fn new(value: u32) -> Result<Self> {
        if value > 100 || !value.is_multiple_of(10) {
            return Err(Error::InvalidHealth(value));
        }
        Ok(Health(value as u8))
    }

    pub fn value(self) -> u32 {
        u32::from(self.0)
    }

    pub fn is_destroyed(self) -> bool {
        self.0 == 0
    }

    /// One hit, saturating at zero.
    pub fn hit(self) -> Self {
        Health(self.0.saturating_sub(Self::HIT))
    }

    /// Hits still absorbable before destruction.
    pub fn hits_left(self) -> u32 {
        u32::from(self.0 / Self::HIT)
    }

    /// Every health a surviving entity can hold: 10, 20, ..., 100.
    pub fn surviving() -> impl DoubleEndedIterator<Item = Health> + Clone {
        (1..=10u8).map(|k| Health(k * 10))
    }

    fn alive(self) -> Result<Self> {
        if self.is_destroyed() {
            Err(Error::DestroyedEntity)
        } else {
            Ok(self)
        }
    }
}

impl TryFrom<u32> for Health {
    type Error = Error;
    fn try_from(value: u32) -> Result<Self> {
        Health::new(value)
    }
}

impl From<Health> for u32 {
    fn from(h: Health) -> u32 {
        h.value()
    }
}

impl fmt::Display for Health {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Performance band T1 (poor) through T5 (very good).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Tier(u8);

impl Tier {
    pub const T1: Tier = Tier(1);
    pub const T2: Tier = Tier(2);
    pub const T3: Tier = Tier(3);
    pub const T4: Tier = Tier(4);
    pub const T5: Tier = Tier(5);
    pub const ALL: [Tier; 5] = [Tier::T1, Tier::T2, Tier::T3, Tier::T4, Tier::T5];

    pub fn new(index: u32) -> Result<Self> {
        if (1..=5).contains(&index) {
            Ok(Tier(index as u8))
        } else {
            Err(Error::InvalidTier(index))
        }
    }

    pub fn index(self) -> u32 {
        u32::from(self.0)
    }

    pub fn label(self) -> &'static str {
        match self.0 {
            1 => "Poor",
            2 => "Below Average",
            3 => "Average",
            4 => "Above Average",
            _ => "Very Good",
        }
    }
}

impl TryFrom<u32> for Tier {
    type Error = Error;
    fn try_from(value: u32) -> Result<Self> {
        Tier::new(value)
    }
}

impl From<Tier> for u32 {
    fn from(t: Tier) -> u32 {
        t.index()
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", self.0)
    }
}

/// Inclusive score interval, stored in half points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TierRange {
    low_halves: i64,
    high_halves: i64,
}

impl TierRange {
    const fn halves(low_halves: i64, high_halves: i64) -> Self {
        TierRange {
            low_halves,
            high_halves,
        }
    }

    pub fn low<T: Scalar>(&self) -> T {
        T::from_halves(self.low_halves)
    }

    pub fn high<T: Scalar>(&self) -> T {
        T::from_halves(self.high_halves)
    }

    pub fn contains<T: Scalar>(&self, score: T) -> bool {
        self.low::<T>() <= score && score <= self.high::<T>()
    }
}

// Printed bounds, copied verbatim (in half points).
const V1_RANGES: [TierRange; 5] = [
    TierRange::halves(20, 54),   // 10 - 27
    TierRange::halves(56, 90),   // 28 - 45
    TierRange::halves(92, 126),  // 46 - 63
    TierRange::halves(128, 162), // 64 - 81
    TierRange::halves(164, 200), // 82 - 100
];

const V2_RANGES: [TierRange; 5] = [
    TierRange::halves(15, 42),   // 7.5 - 21
    TierRange::halves(43, 70),   // 21.5 - 35
    TierRange::halves(71, 98),   // 35.5 - 49
    TierRange::halves(99, 124),  // 49.5 - 62
    TierRange::halves(125, 150), // 62.5 - 75
];

/// Score formula plus range table.
///
/// * `V1`: `(GH + PH) / 2`, ranges 10..=100.
/// * `V2`: `(GH / 2 + PH) / 2`, ranges 7.5..=75. Gate health counts half as
///   much, so a weak player with a healthy gate is no longer lifted into T3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TierScheme {
    V1,
    V2,
}

impl TierScheme {
    pub const ALL: [TierScheme; 2] = [TierScheme::V1, TierScheme::V2];

    pub fn ranges(self) -> &'static [TierRange; 5] {
        match self {
            TierScheme::V1 => &V1_RANGES,
            TierScheme::V2 => &V2_RANGES,
        }
    }

    pub fn range(self, tier: Tier) -> TierRange {
        self.ranges()[tier.index() as usize - 1]
    }

    pub fn min_score<T: Scalar>(self) -> T {
        self.ranges()[0].low()
    }

    pub fn max_score<T: Scalar>(self) -> T {
        self.ranges()[4].high()
    }

    pub fn name(self) -> &'static str {
        match self {
            TierScheme::V1 => "v1",
            TierScheme::V2 => "v2",
        }
    }
}

impl fmt::Display for TierScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TierScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "v1" => Ok(TierScheme::V1),
            "v2" => Ok(TierScheme::V2),
            _ => Err(Error::UnknownScheme(s.to_owned())),
        }
    }
}

/// Combined end-of-level score. Both entities must have survived.
pub fn combined_score<T: Scalar>(scheme: TierScheme, gate: Health, player: Health) -> Result<T> {
    let gate = gate.alive()?;
    let player = player.alive()?;
    let two = T::one() + T::one();
    let gh = T::from_u32(gate.value()).expect("health fits scalar");
    let ph = T::from_u32(player.value()).expect("health fits scalar");
    Ok(match scheme {
        TierScheme::V1 => (gh + ph) / two,
        TierScheme::V2 => (gh / two + ph) / two,
    })
}

/// Tier whose interval holds `score`.
///
/// Scores in a gap between printed intervals (21.25 under V2, say) cannot
/// come from valid healths; they resolve to the first interval whose upper
/// bound is at least the score, which keeps the mapping total and monotone.
pub fn tier_for_score<T: Scalar>(scheme: TierScheme, score: T) -> Result<Tier> {
    let (min, max) = (scheme.min_score::<T>(), scheme.max_score::<T>());
    if !(min <= score && score <= max) {
        return Err(Error::ScoreOutOfRange {
            scheme: scheme.name(),
            score: score.to_f64().unwrap_or(f64::NAN),
            min: min.to_f64().unwrap_or(f64::NAN),
            max: max.to_f64().unwrap_or(f64::NAN),
        });
    }
    let k = scheme
        .ranges()
        .iter()
        .position(|r| score <= r.high::<T>())
        .expect("score <= max lies under the last upper bound");
    Ok(Tier::ALL[k])
}

pub fn allocate_tier(scheme: TierScheme, gate: Health, player: Health) -> Result<Tier> {
    let score: Score = combined_score(scheme, gate, player)?;
    tier_for_score(scheme, score)
}

/// Extra enemies added to the next wave for a tier: T1 -> +1 ... T5 -> +5.
pub fn spawn_increment(tier: Tier) -> u32 {
    tier.index()
}

/// How the next wave grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SpawnPolicy {
    /// The base game: always `FIXED_INCREMENT` more enemies.
    Fixed,
    /// Tier-driven increment from the end-of-level healths.
    Dynamic(TierScheme),
}

impl SpawnPolicy {
    pub const FIXED_INCREMENT: u32 = 3;

    pub fn name(self) -> &'static str {
        match self {
            SpawnPolicy::Fixed => "fixed",
            SpawnPolicy::Dynamic(TierScheme::V1) => "dda-v1",
            SpawnPolicy::Dynamic(TierScheme::V2) => "dda-v2",
        }
    }

    pub fn is_dynamic(self) -> bool {
        matches!(self, SpawnPolicy::Dynamic(_))
    }
}

impl fmt::Display for SpawnPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SpawnPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fixed" => Ok(SpawnPolicy::Fixed),
            "dda-v1" => Ok(SpawnPolicy::Dynamic(TierScheme::V1)),
            "dda-v2" | "dda" => Ok(SpawnPolicy::Dynamic(TierScheme::V2)),
            _ => Err(Error::UnknownPolicy(s.to_owned())),
        }
    }
}

impl TryFrom<String> for SpawnPolicy {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SpawnPolicy> for String {
    fn from(p: SpawnPolicy) -> String {
        p.name().to_owned()
    }
}

/// Controller memory between levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControllerState {
    pub wave_size: u32,
    pub last_tier: Option<Tier>,
}

impl ControllerState {
    pub const FIRST_WAVE_SIZE: u32 = 10;

    pub fn new() -> Self {
        ControllerState {
            wave_size: Self::FIRST_WAVE_SIZE,
            last_tier: None,
        }
    }

    pub fn with_wave_size(wave_size: u32) -> Self {
        ControllerState {
            wave_size,
            last_tier: None,
        }
    }

    /// Advance as if `tier` had been allocated.
    pub fn after_tier(self, tier: Tier) -> Self {
        ControllerState {
            wave_size: self.wave_size + spawn_increment(tier),
            last_tier: Some(tier),
        }
    }
}

impl Default for ControllerState {
    fn default() -> Self {
        Self::new()
    }
}

/// Size of the next wave given the healths read at the end of the level
/// (player health before regeneration).
pub fn next_wave_size(
    state: ControllerState,
    policy: SpawnPolicy,
    gate: Health,
    player: Health,
) -> Result<(ControllerState, u32)> {
    let gate = gate.alive()?;
    let player = player.alive()?;
    let next = match policy {
        SpawnPolicy::Fixed => ControllerState {
            wave_size: state.wave_size + SpawnPolicy::FIXED_INCREMENT,
            last_tier: None,
        },
        SpawnPolicy::Dynamic(scheme) => state.after_tier(allocate_tier(scheme, gate, player)?),
    };
    Ok((next, next.wave_size))
}

/// One cell of a [`TierTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TierCell {
    pub gate: Health,
    pub player: Health,
    pub score: Score,
    pub tier: Tier,
}

/// Every surviving (GH, PH) pair mapped to its score and tier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TierTable {
    pub scheme: TierScheme,
    cells: Vec<TierCell>,
}

impl TierTable {
    /// Cell for a surviving pair; `None` when either health is 0.
    pub fn get(&self, gate: Health, player: Health) -> Option<&TierCell> {
        if gate.is_destroyed() || player.is_destroyed() {
            return None;
        }
        let (g, p) = (
            gate.hits_left() as usize - 1,
            player.hits_left() as usize - 1,
        );
        self.cells.get(g * 10 + p)
    }

    /// Gate-major, ascending healths.
    pub fn cells(&self) -> &[TierCell] {
        &self.cells
    }
}

pub fn tier_table(scheme: TierScheme) -> TierTable {
    let cells = Health::surviving()
        .flat_map(|gate| Health::surviving().map(move |player| (gate, player)))
        .map(|(gate, player)| {
            let score = combined_score(scheme, gate, player).expect("surviving healths");
            let tier =
                tier_for_score(scheme, score).expect("score of surviving healths is in range");
            TierCell {
                gate,
                player,
                score,
                tier,
            }
        })
        .collect();
    TierTable { scheme, cells }
}
