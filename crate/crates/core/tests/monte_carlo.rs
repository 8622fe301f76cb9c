//! Sampling checks against closed-form expectations.

use castle_dda::seed::{SeedDerivation, StreamLabel};
use castle_dda::{compose_wave, play_game, resolve_level, CombatParams, Health, SpawnPolicy, Wave};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn binom_cdf(n: u32, p: f64, k: u32) -> f64 {
    let mut total = 0.0;
    let mut coeff = 1.0;
    for i in 0..=n.min(k) {
        if i > 0 {
            coeff *= f64::from(n - i + 1) / f64::from(i);
        }
        total += coeff * p.powi(i as i32) * (1.0 - p).powi((n - i) as i32);
    }
    total
}

/// Survival needs fewer than 10 player hits and fewer than `gate/10` gate
/// hits; hit totals are binomial in attempts and independent of each other.
fn survival_oracle(wave: Wave, gate: u32, attempts: u32, p_tanker: f64, p_zombie: f64) -> f64 {
    binom_cdf(wave.tankers * attempts, p_tanker, 9)
        * binom_cdf(wave.zombies * attempts, p_zombie, gate / 10 - 1)
}

#[test]
fn binom_cdf_sanity() {
    assert!((binom_cdf(4, 0.5, 1) - 5.0 / 16.0).abs() < 1e-12);
    assert!((binom_cdf(15, 0.3, 15) - 1.0).abs() < 1e-12);
}

#[test]
fn zombie_share_averages_one_half() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 100_000;
    let mut zombies = 0u64;
    for _ in 0..n {
        let w = compose_wave(10, &mut rng).unwrap();
        assert!((3..=7).contains(&w.zombies), "{w:?}");
        zombies += u64::from(w.zombies);
    }
    let mean = zombies as f64 / n as f64;
    assert!((4.9..=5.1).contains(&mean), "mean zombies {mean}");
}

fn check_survival(
    params: CombatParams,
    skill: f64,
    wave: Wave,
    gate: u32,
    p_tanker: f64,
    p_zombie: f64,
) {
    let n = 100_000u32;
    let seeds = SeedDerivation::new(99);
    let gate_h = Health::new(gate).unwrap();
    let survived = (0..n)
        .filter(|&i| {
            let mut rng = seeds.stream(StreamLabel::new(i, 0, 0));
            resolve_level(skill, wave, gate_h, &params, &mut rng)
                .unwrap()
                .survived
        })
        .count();
    let observed = survived as f64 / f64::from(n);
    let expected = survival_oracle(wave, gate, params.attempts_per_enemy, p_tanker, p_zombie);
    assert!(
        (observed - expected).abs() <= 0.01,
        "observed {observed:.4}, expected {expected:.4}"
    );
}

#[test]
fn survival_matches_binomial_oracle_at_full_gate() {
    let params = CombatParams {
        tanker_hit_coeff: 1.2,
        zombie_hit_coeff: 0.9,
        zombie_skill_discount: 1.0,
        ..CombatParams::default()
    };
    // Wave of 10 at reference size 10: pressure 1, so p = coeff * (1 - s).
    check_survival(
        params,
        0.5,
        Wave {
            tankers: 5,
            zombies: 5,
        },
        100,
        0.6,
        0.45,
    );
}

#[test]
fn survival_matches_binomial_oracle_with_worn_gate() {
    let params = CombatParams {
        tanker_hit_coeff: 0.5,
        zombie_hit_coeff: 0.4,
        pressure_exponent: 1.0,
        zombie_skill_discount: 0.5,
        ..CombatParams::default()
    };
    // Wave of 20: pressure 2; p_t = 0.5*2*0.6, p_z = 0.4*2*(1 - 0.2).
    check_survival(
        params,
        0.4,
        Wave {
            tankers: 8,
            zombies: 12,
        },
        60,
        0.6,
        0.64,
    );
}

#[test]
fn survival_matches_binomial_oracle_with_defaults() {
    // Shipped constants, restated so a silent change to the defaults shows up here.
    let params = CombatParams::default();
    assert_eq!(
        (
            params.tanker_hit_coeff,
            params.zombie_hit_coeff,
            params.zombie_skill_discount,
            params.attempts_per_enemy
        ),
        (0.37, 0.18, 1.42, 3)
    );
    // Wave of 10: pressure 1; p_t = 0.37 * 0.5, p_z = 0.18 * (1 - 1.42 * 0.5).
    check_survival(
        params,
        0.5,
        Wave {
            tankers: 5,
            zombies: 5,
        },
        100,
        0.185,
        0.18 * 0.29,
    );
}

#[test]
fn weak_skill_lands_in_the_level_band() {
    let params = CombatParams::default();
    let seeds = SeedDerivation::new(3);
    let games = 500u32;
    let total: u32 = (0..games)
        .map(|g| {
            play_game(
                0.2,
                SpawnPolicy::Fixed,
                &params,
                &mut seeds.stream(StreamLabel::new(g, 0, 0)),
            )
            .levels_reached
        })
        .sum();
    let mean = f64::from(total) / f64::from(games);
    assert!((2.5..=4.5).contains(&mean), "mean levels {mean}");
}
