//! Independent tier oracle in integer quarter-points. Shares nothing with the
//! library's scoring code.

#![allow(dead_code)]

use castle_dda::TierScheme;

/// Published range bounds in quarter-points, T1..T5.
pub const V1_QUARTERS: [(i64, i64); 5] =
    [(40, 108), (112, 180), (184, 252), (256, 324), (328, 400)];
pub const V2_QUARTERS: [(i64, i64); 5] = [(30, 84), (86, 140), (142, 196), (198, 248), (250, 300)];

pub fn ranges(scheme: TierScheme) -> [(i64, i64); 5] {
    match scheme {
        TierScheme::V1 => V1_QUARTERS,
        TierScheme::V2 => V2_QUARTERS,
    }
}

/// (GH+PH)/2 and (GH/2+PH)/2, times four.
pub fn quarters(scheme: TierScheme, gh: i64, ph: i64) -> i64 {
    match scheme {
        TierScheme::V1 => 2 * (gh + ph),
        TierScheme::V2 => gh + 2 * ph,
    }
}

/// 1-based tier; a score between two printed ranges belongs to the lower one.
pub fn tier(scheme: TierScheme, q: i64) -> u32 {
    let table = ranges(scheme);
    assert!(
        q >= table[0].0 && q <= table[4].1,
        "score {q}/4 outside the table"
    );
    table.iter().position(|&(_, hi)| q <= hi).unwrap() as u32 + 1
}

pub fn healths() -> impl Iterator<Item = i64> {
    (1..=10).map(|k| k * 10)
}
