use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use castle_dda::agents::{sample_agent, ProfileLabel};
use castle_dda::experiments::{CheckStatus, GameResult};
use castle_dda::record::{self, TraceRecord};
use castle_dda::seed::{SeedDerivation, StreamLabel};
use castle_dda::{
    compare_conditions, play_game, run_cohort, summarize, CohortConfig, CombatParams, PlayerAgent,
    SkillProfile, SpawnPolicy, TierScheme,
};
use clap::{Parser, Subcommand, ValueEnum};

/// The cohort shipped with the tool: 8 weak, 14 average, 8 strong agents.
const BUNDLED_CONFIG: &str = include_str!("../configs/default.json");

#[derive(Parser)]
#[command(
    name = "castle-dda",
    version,
    about = "Tier-based DDA simulation laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Play N games for one agent and write one JSON trace per line.
    Simulate {
        /// Fixed skill in [0, 1].
        #[arg(long, conflicts_with = "profile", required_unless_present = "profile")]
        skill: Option<f64>,
        /// Draw the skill from a built-in profile (weak, average, strong).
        #[arg(long)]
        profile: Option<ProfileLabel>,
        /// fixed, dda-v1 or dda-v2.
        #[arg(long, default_value = "fixed")]
        policy: SpawnPolicy,
        #[arg(long, default_value_t = 1)]
        games: u16,
        #[arg(long, default_value_t = castle_dda::experiments::DEFAULT_MASTER_SEED)]
        seed: u64,
        /// JSON file overriding combat constants; missing fields keep defaults.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a full cohort and write traces plus an index into a directory.
    Cohort {
        /// Cohort config (JSON); the bundled default when omitted.
        config: Option<PathBuf>,
        #[arg(long, required_unless_present = "print_config")]
        out: Option<PathBuf>,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Print the effective config with every default filled in, then exit.
        #[arg(long)]
        print_config: bool,
    },
    /// Average a results directory into the without/with/difference table.
    Summarize {
        results: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the 10x10 gate-by-player tier grid of a scheme.
    EnumerateTiers {
        /// v1 or v2.
        scheme: TierScheme,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<CohortConfig> {
    let (text, origin) = match path {
        Some(p) => (
            fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?,
            p.display().to_string(),
        ),
        None => (BUNDLED_CONFIG.to_owned(), "bundled config".to_owned()),
    };
    let config: CohortConfig =
        serde_json::from_str(&text).with_context(|| format!("malformed config in {origin}"))?;
    config
        .validate()
        .with_context(|| format!("invalid config in {origin}"))?;
    Ok(config)
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    skill: Option<f64>,
    profile: Option<ProfileLabel>,
    policy: SpawnPolicy,
    games: u16,
    seed: u64,
    params: Option<&Path>,
    out: Option<&Path>,
) -> Result<()> {
    let combat: CombatParams = match params {
        Some(p) => {
            let text =
                fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("malformed combat params in {}", p.display()))?
        }
        None => CombatParams::default(),
    };
    combat.validate()?;

    let seeds = SeedDerivation::new(seed);
    let agent = match (skill, profile) {
        (Some(s), _) => {
            if !(0.0..=1.0).contains(&s) {
                bail!("--skill must be in [0, 1], got {s}");
            }
            PlayerAgent::new(0, s, ProfileLabel::Custom)
        }
        (None, Some(label)) => {
            let Some(p) = SkillProfile::builtin_for(label) else {
                bail!("profile `{label}` has no built-in range; pass --skill instead");
            };
            sample_agent(0, &p, &mut seeds.stream(StreamLabel::agent_sampling(0)))
        }
        (None, None) => unreachable!("clap requires one of --skill/--profile"),
    };

    let records: Vec<TraceRecord> = (0..games)
        .map(|g| {
            let mut rng = seeds.stream(StreamLabel::new(0, 0, g));
            let trace = play_game(agent.skill, policy, &combat, &mut rng);
            TraceRecord::from_game(&agent, &GameResult::from_trace(0, 0, g, trace))
        })
        .collect();
    let mut buf = Vec::new();
    record::write_jsonl(&mut buf, &records)?;
    emit(out, std::str::from_utf8(&buf)?)
}

fn cohort(
    config: Option<&Path>,
    out: Option<&Path>,
    seed: Option<u64>,
    print_config: bool,
) -> Result<()> {
    let mut config = load_config(config)?;
    if let Some(s) = seed {
        config.master_seed = s;
    }
    if print_config {
        return emit(None, &(serde_json::to_string_pretty(&config)? + "\n"));
    }
    let out = out.expect("clap requires --out");
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let results = run_cohort(&config)?;
    let index = record::write_results_dir(out, &config, &results)?;
    eprintln!("wrote {} traces to {}", index.trace_count, out.display());
    Ok(())
}

fn summarize_dir(results: &Path, format: Format, out: Option<&Path>) -> Result<()> {
    let results = record::read_results_dir(results)
        .with_context(|| format!("cannot load {}", results.display()))?;
    let table = summarize(&results)?;
    let text = match format {
        Format::Csv => record::summary_to_csv(&table)?,
        Format::Text => {
            let mut text = record::summary_to_text(&table);
            text.push('\n');
            for check in compare_conditions(&table).checks {
                let verdict = match check.status {
                    CheckStatus::Match => "ok",
                    CheckStatus::Mismatch => "FLAGGED",
                    CheckStatus::Unavailable => "n/a",
                };
                text.push_str(&format!(
                    "{:<8} {:<15} expected {}  {verdict}\n",
                    check.group.name(),
                    check.metric.title(),
                    check.expected.symbol()
                ));
            }
            text
        }
    };
    emit(out, &text)
}

fn enumerate(scheme: TierScheme, format: Format, out: Option<&Path>) -> Result<()> {
    let text = match format {
        Format::Text => record::tier_grid_text(scheme),
        Format::Csv => record::tier_grid_csv(scheme)?,
    };
    emit(out, &text)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            skill,
            profile,
            policy,
            games,
            seed,
            params,
            out,
        } => simulate(
            skill,
            profile,
            policy,
            games,
            seed,
            params.as_deref(),
            out.as_deref(),
        ),
        Command::Cohort {
            config,
            out,
            seed,
            print_config,
        } => cohort(config.as_deref(), out.as_deref(), seed, print_config),
        Command::Summarize {
            results,
            format,
            out,
        } => summarize_dir(&results, format, out.as_deref()),
        Command::EnumerateTiers {
            scheme,
            format,
            out,
        } => enumerate(scheme, format, out.as_deref()),
    }
}

fn main() -> ExitCode {
    // Usage errors exit with 2 inside clap; everything past parsing is a data error.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
