//! Per-skill breakdown of a parameter set: tier mix, level and time means.
//!
//! cargo run --release -p castle-dda --example diagnose -- gamma at az beta [k0 k1 pause]

use castle_dda::seed::{SeedDerivation, StreamLabel};
use castle_dda::{difficulty_proxy, play_game, CombatParams, SpawnPolicy, TierScheme};

fn main() {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("number"))
        .collect();
    let mut p = CombatParams::default();
    if args.len() >= 4 {
        p.pressure_exponent = args[0];
        p.tanker_hit_coeff = args[1];
        p.zombie_hit_coeff = args[2];
        p.zombie_skill_discount = args[3];
    }
    if args.len() >= 7 {
        p.kill_rate_base = args[4];
        p.kill_rate_slope = args[5];
        p.inter_level_pause_s = args[6];
    }
    println!("{p:?}");
    let seeds = SeedDerivation::new(11);
    for skill in [0.15, 0.25, 0.35, 0.5, 0.65, 0.75, 0.85] {
        for (c, policy) in [SpawnPolicy::Fixed, SpawnPolicy::Dynamic(TierScheme::V2)]
            .into_iter()
            .enumerate()
        {
            let n = 2000u32;
            let (mut lv, mut min, mut diff, mut gate_deaths) = (0.0, 0.0, 0.0, 0);
            let mut tiers = [0u32; 6];
            let mut first_ph = 0.0;
            let mut first_gh = 0.0;
            let mut first_n = 0;
            for g in 0..n {
                let mut rng = seeds.stream(StreamLabel::new(g, c as u16, (skill * 100.0) as u16));
                let t = play_game(skill, policy, &p, &mut rng);
                lv += f64::from(t.levels_reached);
                min += t.total_duration_s / 60.0;
                diff += difficulty_proxy(&t);
                if t.outcome == castle_dda::GameOutcome::GateDestroyed {
                    gate_deaths += 1;
                }
                for l in &t.levels {
                    if let Some(tier) = l.tier {
                        tiers[tier.index() as usize] += 1;
                    }
                }
                if let Some(l) = t.levels.first().filter(|l| l.outcome.survived) {
                    first_ph += f64::from(l.outcome.end_player.value());
                    first_gh += f64::from(l.outcome.end_gate.value());
                    first_n += 1;
                }
            }
            let nf = f64::from(n);
            println!(
                "s={skill:.2} {:<6} lvl={:.2} min={:.2} diff={:.2} gate%={:.0} L1surv={:.2} L1 ph={:.0} gh={:.0} tiers={:?}",
                policy.name(),
                lv / nf,
                min / nf,
                diff / nf,
                100.0 * f64::from(gate_deaths) / nf,
                f64::from(first_n) / nf,
                first_ph / f64::from(first_n.max(1)),
                first_gh / f64::from(first_n.max(1)),
                &tiers[1..]
            );
        }
    }
}
