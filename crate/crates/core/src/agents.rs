//! Simulated players: one skill scalar in `[0, 1]` per agent.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileLabel {
    Weak,
    Average,
    Strong,
    Custom,
}

impl ProfileLabel {
    pub fn name(self) -> &'static str {
        match self {
            ProfileLabel::Weak => "weak",
            ProfileLabel::Average => "average",
            ProfileLabel::Strong => "strong",
            ProfileLabel::Custom => "custom",
        }
    }
}

impl fmt::Display for ProfileLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProfileLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "weak" => Ok(ProfileLabel::Weak),
            "average" => Ok(ProfileLabel::Average),
            "strong" => Ok(ProfileLabel::Strong),
            "custom" => Ok(ProfileLabel::Custom),
            _ => Err(Error::UnknownProfile(s.to_owned())),
        }
    }
}

/// A named skill band agents are drawn from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkillProfile<F> {
    pub label: ProfileLabel,
    low: F,
    high: F,
}

impl<F: Real> SkillProfile<F> {
    pub fn weak() -> Self {
        Self::builtin(ProfileLabel::Weak, 0.15, 0.35)
    }

    pub fn average() -> Self {
        Self::builtin(ProfileLabel::Average, 0.40, 0.60)
    }

    pub fn strong() -> Self {
        Self::builtin(ProfileLabel::Strong, 0.65, 0.85)
    }

    fn builtin(label: ProfileLabel, low: f64, high: f64) -> Self {
        SkillProfile {
            label,
            low: F::lit(low),
            high: F::lit(high),
        }
    }

    pub fn custom(low: F, high: F) -> Result<Self> {
        if !(F::zero() <= low && low <= high && high <= F::one()) {
            return Err(Error::InvalidConfig {
                field: "range".into(),
                reason: format!("need 0 <= low <= high <= 1, got [{low:?}, {high:?}]"),
            });
        }
        Ok(SkillProfile {
            label: ProfileLabel::Custom,
            low,
            high,
        })
    }

    /// Built-in profile by label; `Custom` has no built-in range.
    pub fn builtin_for(label: ProfileLabel) -> Option<Self> {
        match label {
            ProfileLabel::Weak => Some(Self::weak()),
            ProfileLabel::Average => Some(Self::average()),
            ProfileLabel::Strong => Some(Self::strong()),
            ProfileLabel::Custom => None,
        }
    }

    pub fn range(&self) -> (F, F) {
        (self.low, self.high)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlayerAgent<F> {
    pub id: u32,
    pub skill: F,
    pub profile: ProfileLabel,
    /// Skill gained per game played. Off by default.
    pub learning_rate: F,
}

impl<F: Real> PlayerAgent<F> {
    pub fn new(id: u32, skill: F, profile: ProfileLabel) -> Self {
        PlayerAgent {
            id,
            skill,
            profile,
            learning_rate: F::zero(),
        }
    }

    pub fn with_learning_rate(self, learning_rate: F) -> Self {
        PlayerAgent {
            learning_rate,
            ..self
        }
    }

    /// Skill after `games_played` games, capped at 1.
    pub fn apply_learning(&self, games_played: u32) -> Self {
        let gained = self.learning_rate * F::lit(f64::from(games_played));
        PlayerAgent {
            skill: (self.skill + gained).min(F::one()),
            ..*self
        }
    }
}

/// Draw an agent with skill uniform on the profile's range.
pub fn sample_agent<F: Real, R: Rng + ?Sized>(
    id: u32,
    profile: &SkillProfile<F>,
    rng: &mut R,
) -> PlayerAgent<F> {
    let u = F::lit(rng.gen::<f64>());
    let skill = if profile.low == profile.high {
        profile.low
    } else {
        (profile.low + (profile.high - profile.low) * u).min(profile.high)
    };
    PlayerAgent::new(id, skill, profile.label)
}
