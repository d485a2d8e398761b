//! The metric on sequence space.
//!
//! Two sequences are at distance `2^-k`, where `k` is the largest index such
//! that they agree on the window `W_k`. The windows grow alternately to the
//! right and to the left: `W_1 = {0}`, `W_2 = {0,1}`, `W_3 = {-1,0,1}`, ...
//! A closed ball of radius `2^-m` is therefore exactly a cylinder of length
//! `m` placed on `W_m`.

use crate::error::{Error, Result};

/// Inclusive bounds of `W_m`.
pub fn window(m: usize) -> (i64, i64) {
    assert!(m >= 1, "windows are indexed from 1");
    let lo = -(((m - 1) / 2) as i64);
    (lo, lo + m as i64 - 1)
}

/// Smallest `m >= 1` with `2^-m <= epsilon`.
pub fn word_length_for(epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    let mut m = 1usize;
    while 0.5f64.powi(m as i32) > epsilon {
        m += 1;
    }
    Ok(m)
}

/// Coordinate added when passing from `W_{k-1}` to `W_k` (`k >= 2`).
fn new_coordinate(k: usize) -> i64 {
    let (lo, hi) = window(k);
    if window(k - 1).0 == lo {
        hi
    } else {
        lo
    }
}

/// Agreement depth: the largest `k <= cap` with `x` and `y` equal on `W_k`.
pub fn agreement_depth(x: impl Fn(i64) -> u8, y: impl Fn(i64) -> u8, cap: usize) -> usize {
    if x(0) != y(0) {
        return 0;
    }
    let mut k = 1;
    while k < cap {
        let t = new_coordinate(k + 1);
        if x(t) != y(t) {
            break;
        }
        k += 1;
    }
    k
}

/// Distance between two sequences, treating agreement on `W_cap` as equality.
pub fn sequence_distance(x: impl Fn(i64) -> u8, y: impl Fn(i64) -> u8, cap: usize) -> f64 {
    let k = agreement_depth(x, y, cap);
    if k >= cap {
        0.0
    } else {
        0.5f64.powi(k as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_nest_and_alternate() {
        assert_eq!(window(1), (0, 0));
        assert_eq!(window(2), (0, 1));
        assert_eq!(window(3), (-1, 1));
        assert_eq!(window(4), (-1, 2));
        for k in 2..20 {
            let (a, b) = window(k - 1);
            let (c, d) = window(k);
            assert!(c <= a && b <= d && (d - c) == (b - a) + 1);
        }
    }

    #[test]
    fn word_length_thresholds() {
        assert_eq!(word_length_for(1.0).unwrap(), 1);
        assert_eq!(word_length_for(0.5).unwrap(), 1);
        assert_eq!(word_length_for(0.3).unwrap(), 2);
        assert_eq!(word_length_for(0.25).unwrap(), 2);
        assert_eq!(word_length_for(0.125).unwrap(), 3);
        assert!(word_length_for(0.0).is_err());
        assert!(word_length_for(1.5).is_err());
    }

    #[test]
    fn distance_counts_nested_agreement() {
        let x = |t: i64| (t.rem_euclid(2)) as u8;
        let y = |t: i64| if t == 2 { 7 } else { (t.rem_euclid(2)) as u8 };
        // agree on W_4 = {-1..2}? no: differ at 2, which enters at W_4
        assert_eq!(agreement_depth(x, y, 50), 3);
        assert_eq!(sequence_distance(x, y, 50), 0.125);
        assert_eq!(sequence_distance(x, x, 50), 0.0);
        assert_eq!(sequence_distance(x, |t| x(t + 1), 50), 1.0);
    }
}
