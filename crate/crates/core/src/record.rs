//! On-disk forms: JSON Lines trace records, the cohort results directory,
//! summary CSV / aligned text, and tier grids.
//!
//! Results directory layout:
//!
//! ```text
//! <out>/traces-<condition index>-<condition name>.jsonl   one record per game
//! <out>/index.json                                         written last
//! ```

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::agents::ProfileLabel;
use crate::difficulty::{tier_table, Health, SpawnPolicy, Tier, TierScheme};
use crate::error::{Error, Result};
use crate::experiments::{CohortConfig, CohortResults, GameResult, SummaryRow, SummaryTable};
use crate::sim::{GameOutcome, LevelOutcome, LevelRecord, Wave};
use crate::{GameTrace, PlayerAgent, Score};

/// Bumped whenever a record or index field changes meaning.
pub const FORMAT_VERSION: u32 = 1;
pub const INDEX_FILE: &str = "index.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelEntry {
    pub level: u32,
    pub tankers: u32,
    pub zombies: u32,
    pub end_gh: Health,
    /// Player health before regeneration.
    pub end_ph: Health,
    pub enemies_remaining: u32,
    pub score: Option<f64>,
    pub tier: Option<Tier>,
    pub next_size: Option<u32>,
    pub duration_s: f64,
}

/// File form of one game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceRecord {
    pub version: u32,
    pub game_id: String,
    pub agent_id: u32,
    pub profile: ProfileLabel,
    pub skill: f64,
    pub condition: SpawnPolicy,
    pub condition_index: u16,
    pub game_index: u16,
    pub levels: Vec<LevelEntry>,
    pub outcome: GameOutcome,
    pub levels_reached: u32,
    pub total_duration_s: f64,
    pub difficulty_proxy: f64,
}

pub fn game_id(agent: u32, condition: u16, game: u16) -> String {
    format!("a{agent:03}-c{condition}-g{game}")
}

fn score_to_f64(score: Score) -> f64 {
    score.to_f64().expect("finite score")
}

fn score_from_f64(v: f64) -> Result<Score> {
    let halves = v * 4.0;
    if !halves.is_finite() || halves.fract() != 0.0 {
        return Err(Error::MalformedRecord(format!(
            "score {v} is not a multiple of 0.25"
        )));
    }
    Ok(Score::new(halves as i64, 4))
}

impl TraceRecord {
    pub fn from_game(agent: &PlayerAgent, game: &GameResult) -> Self {
        let trace = &game.trace;
        TraceRecord {
            version: FORMAT_VERSION,
            game_id: game_id(game.agent, game.condition, game.game),
            agent_id: game.agent,
            profile: agent.profile,
            skill: trace.skill,
            condition: trace.policy,
            condition_index: game.condition,
            game_index: game.game,
            levels: trace
                .levels
                .iter()
                .map(|l| LevelEntry {
                    level: l.level,
                    tankers: l.wave.tankers,
                    zombies: l.wave.zombies,
                    end_gh: l.outcome.end_gate,
                    end_ph: l.outcome.end_player,
                    enemies_remaining: l.outcome.enemies_remaining,
                    score: l.score.map(score_to_f64),
                    tier: l.tier,
                    next_size: l.next_wave_size,
                    duration_s: l.outcome.duration_s,
                })
                .collect(),
            outcome: trace.outcome,
            levels_reached: trace.levels_reached,
            total_duration_s: trace.total_duration_s,
            difficulty_proxy: game.difficulty_proxy,
        }
    }

    /// Rebuild the in-memory trace. Hit counts follow from the healths.
    pub fn to_trace(&self) -> Result<GameTrace> {
        let mut gate = Health::FULL;
        let mut levels = Vec::with_capacity(self.levels.len());
        for e in &self.levels {
            let survived = !e.end_gh.is_destroyed() && !e.end_ph.is_destroyed();
            if e.end_gh > gate {
                return Err(Error::MalformedRecord(format!(
                    "{}: gate health rises at level {}",
                    self.game_id, e.level
                )));
            }
            let outcome = LevelOutcome {
                survived,
                start_gate: gate,
                end_gate: e.end_gh,
                end_player: e.end_ph,
                player_hits_taken: Health::FULL.hits_left() - e.end_ph.hits_left(),
                gate_hits_taken: gate.hits_left() - e.end_gh.hits_left(),
                enemies_remaining: e.enemies_remaining,
                duration_s: e.duration_s,
            };
            levels.push(LevelRecord {
                level: e.level,
                wave: Wave {
                    tankers: e.tankers,
                    zombies: e.zombies,
                },
                outcome,
                score: e.score.map(score_from_f64).transpose()?,
                tier: e.tier,
                next_wave_size: e.next_size,
            });
            gate = e.end_gh;
        }
        Ok(GameTrace {
            skill: self.skill,
            policy: self.condition,
            levels,
            outcome: self.outcome,
            total_duration_s: self.total_duration_s,
            levels_reached: self.levels_reached,
        })
    }

    pub fn check_finite(&self) -> Result<()> {
        let finite = [self.skill, self.total_duration_s, self.difficulty_proxy]
            .into_iter()
            .chain(
                self.levels
                    .iter()
                    .flat_map(|l| [l.duration_s, l.score.unwrap_or(0.0)]),
            )
            .all(f64::is_finite);
        if finite {
            Ok(())
        } else {
            Err(Error::MalformedRecord(format!(
                "{}: non-finite numeric field",
                self.game_id
            )))
        }
    }

    pub fn to_json_line(&self) -> Result<String> {
        self.check_finite()?;
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        let record: TraceRecord = serde_json::from_str(line)?;
        record.check_finite()?;
        Ok(record)
    }
}

pub fn write_jsonl<W: Write>(mut out: W, records: &[TraceRecord]) -> Result<()> {
    for r in records {
        writeln!(out, "{}", r.to_json_line()?)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<TraceRecord>> {
    let mut records = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(
            TraceRecord::from_json_line(&line)
                .map_err(|e| Error::MalformedRecord(format!("line {}: {e}", n + 1)))?,
        );
    }
    Ok(records)
}

/// Machine-readable description of a results directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultsIndex {
    pub version: u32,
    pub config: CohortConfig,
    pub trace_files: Vec<TraceFile>,
    pub trace_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceFile {
    pub condition_index: u16,
    pub condition: SpawnPolicy,
    pub path: String,
    pub records: usize,
}

/// Write one JSONL file per condition, then the index.
pub fn write_results_dir(
    dir: &Path,
    config: &CohortConfig,
    results: &CohortResults,
) -> Result<ResultsIndex> {
    fs::create_dir_all(dir)?;
    let mut trace_files = Vec::new();
    for (c, &condition) in results.conditions.iter().enumerate() {
        let records: Vec<TraceRecord> = results
            .games
            .iter()
            .filter(|g| usize::from(g.condition) == c)
            .map(|g| {
                let agent = results.agent(g.agent).expect("game agent is in results");
                TraceRecord::from_game(agent, g)
            })
            .collect();
        let path = format!("traces-{c}-{condition}.jsonl");
        write_jsonl(
            std::io::BufWriter::new(fs::File::create(dir.join(&path))?),
            &records,
        )?;
        trace_files.push(TraceFile {
            condition_index: c as u16,
            condition,
            path,
            records: records.len(),
        });
    }
    let index = ResultsIndex {
        version: FORMAT_VERSION,
        config: config.clone(),
        trace_count: trace_files.iter().map(|f| f.records).sum(),
        trace_files,
    };
    fs::write(
        dir.join(INDEX_FILE),
        serde_json::to_string_pretty(&index)? + "\n",
    )?;
    Ok(index)
}

/// Load a directory written by [`write_results_dir`].
pub fn read_results_dir(dir: &Path) -> Result<CohortResults> {
    let index_path = dir.join(INDEX_FILE);
    if !index_path.exists() {
        return Err(Error::MalformedRecord(format!(
            "{} has no {INDEX_FILE}",
            dir.display()
        )));
    }
    let index: ResultsIndex = serde_json::from_str(&fs::read_to_string(&index_path)?)?;
    if index.version != FORMAT_VERSION {
        return Err(Error::MalformedRecord(format!(
            "index version {} (expected {FORMAT_VERSION})",
            index.version
        )));
    }

    let mut agents: Vec<PlayerAgent> = Vec::new();
    let mut games = Vec::new();
    for file in &index.trace_files {
        let records = read_jsonl(BufReader::new(fs::File::open(dir.join(&file.path))?))?;
        if records.len() != file.records {
            return Err(Error::MalformedRecord(format!(
                "{} holds {} records, index says {}",
                file.path,
                records.len(),
                file.records
            )));
        }
        for r in records {
            if r.version != index.version {
                return Err(Error::MalformedRecord(format!(
                    "{}: record version {} mixed with index version {}",
                    r.game_id, r.version, index.version
                )));
            }
            if r.condition_index != file.condition_index || r.condition != file.condition {
                return Err(Error::MalformedRecord(format!(
                    "{}: condition does not match {}",
                    r.game_id, file.path
                )));
            }
            if !agents.iter().any(|a| a.id == r.agent_id) {
                agents.push(
                    PlayerAgent::new(r.agent_id, r.skill, r.profile)
                        .with_learning_rate(index.config.learning_rate),
                );
            }
            let trace = r.to_trace()?;
            games.push(GameResult {
                agent: r.agent_id,
                condition: r.condition_index,
                game: r.game_index,
                levels_reached: r.levels_reached,
                duration_min: r.total_duration_s / 60.0,
                difficulty_proxy: r.difficulty_proxy,
                trace,
            });
        }
    }
    if games.is_empty() {
        return Err(Error::MalformedRecord(format!(
            "{} contains no traces",
            dir.display()
        )));
    }
    agents.sort_by_key(|a| a.id);
    Ok(CohortResults {
        master_seed: index.config.master_seed,
        conditions: index.trace_files.iter().map(|f| f.condition).collect(),
        games_per_condition: index.config.games_per_condition,
        agents,
        games,
    })
}

pub fn summary_to_csv(table: &SummaryTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &table.rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn summary_from_csv(text: &str) -> Result<SummaryTable> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let rows = r
        .deserialize::<SummaryRow>()
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SummaryTable { rows })
}

/// Two-decimal cell used by the text layout.
pub fn format_mean(v: f64) -> String {
    format!("{v:.2}")
}

pub fn format_difference(v: f64) -> String {
    format!("{v:+.2}")
}

/// Aligned text: Metric x Group rows, Without / With / Difference columns.
pub fn summary_to_text(table: &SummaryTable) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<14} {:<8} {:>10} {:>10} {:>11}",
        "Metric", "Group", "Without", "With", "Difference"
    );
    for row in &table.rows {
        let group = match row.group {
            ProfileLabel::Weak => "Weak",
            ProfileLabel::Average => "Average",
            ProfileLabel::Strong => "Strong",
            ProfileLabel::Custom => "Custom",
        };
        let _ = writeln!(
            out,
            "{:<14} {:<8} {:>10} {:>10} {:>11}",
            row.metric.title(),
            group,
            format_mean(row.without),
            format_mean(row.with),
            format_difference(row.difference)
        );
    }
    out
}

pub fn format_score(score: Score) -> String {
    format!("{}", score_to_f64(score))
}

/// 10x10 grid: rows are gate health 100 down to 10, columns player health
/// 10 up to 100, each cell `<score> T<k>`.
pub fn tier_grid_text(scheme: TierScheme) -> String {
    let table = tier_table(scheme);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "scheme {scheme}: rows GH, columns PH, cells \"score tier\""
    );
    let _ = write!(out, "{:>5}", "GH\\PH");
    for ph in Health::surviving() {
        let _ = write!(out, " {:>8}", ph.value());
    }
    out.push('\n');
    for gh in Health::surviving().rev() {
        let _ = write!(out, "{:>5}", gh.value());
        for ph in Health::surviving() {
            let cell = table.get(gh, ph).expect("surviving pair");
            let _ = write!(
                out,
                " {:>8}",
                format!("{} {}", format_score(cell.score), cell.tier)
            );
        }
        out.push('\n');
    }
    out
}

/// One row per cell: `gh,ph,score,tier`.
pub fn tier_grid_csv(scheme: TierScheme) -> Result<String> {
    let table = tier_table(scheme);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["gh", "ph", "score", "tier"])?;
    for cell in table.cells() {
        w.write_record([
            cell.gate.value().to_string(),
            cell.player.value().to_string(),
            format_score(cell.score),
            cell.tier.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
