//! Randomized single elimination brackets.
//!
//! A uniform bracket on a set `A` of size `2s` is a uniform split into two
//! halves followed by independent uniform brackets on each half. With
//! `W(i, A)` the number of leaf orders of `A` won by `i`:
//!
//! `W(i, A) = 2 * sum_{L ∋ i, |L| = s} W(i, L) * sum_{k ∉ L, i beats k} W(k, A \ L)`
//!
//! and `r_i = W(i, A) / |A|!`.

use super::WinDistribution;
use crate::error::{Error, Result};
use crate::tournament::{AgentSet, Tournament};

pub const RSEB_MAX_AGENTS: usize = 16;

/// Leaves of the bracket used for `n` agents (dummies fill the rest).
pub fn rseb_bracket_size(n: usize) -> usize {
    n.next_power_of_two()
}

/// Winner of the bracket whose leaves, left to right, are `leaves`.
pub fn bracket_winner(t: &Tournament, leaves: &[usize]) -> usize {
    assert!(leaves.len().is_power_of_two(), "bracket needs 2^k leaves");
    let mut round: Vec<usize> = leaves.to_vec();
    while round.len() > 1 {
        round = round.chunks(2).map(|p| t.winner(p[0], p[1])).collect();
    }
    round[0]
}

pub(super) fn rseb(t: &Tournament) -> Result<WinDistribution> {
    let n = t.n();
    if n > RSEB_MAX_AGENTS {
        return Err(Error::Budget(format!(
            "RSEB supports at most {RSEB_MAX_AGENTS} agents, got {n}"
        )));
    }
    let size = rseb_bracket_size(n);
    let padded = t.pad(size)?;
    let counts = bracket_counts(&padded);
    debug_assert!(counts[n..].iter().all(|&c| c == 0), "a dummy won a bracket");
    let real: Vec<u128> = counts[..n].to_vec();
    Ok(WinDistribution::from_counts(&real))
}

/// `W(i, V)` for the full agent set `V` of `t`, whose size must be a power of two.
pub(crate) fn bracket_counts(t: &Tournament) -> Vec<u128> {
    let size = t.n();
    debug_assert!(size.is_power_of_two());
    let mut table: Vec<Option<Vec<u128>>> = vec![None; 1 << size];
    go(t, &mut table, t.agents())
}

fn go(t: &Tournament, table: &mut Vec<Option<Vec<u128>>>, set: AgentSet) -> Vec<u128> {
    if let Some(c) = &table[set.bits() as usize] {
        return c.clone();
    }
    let n = t.n();
    let mut acc = vec![0u128; n];
    if set.len() == 1 {
        acc[set.iter().next().unwrap()] = 1;
    } else {
        let half = set.len() / 2;
        let bits = set.bits();
        let mut sub = bits;
        // Every half L is visited once; its complement is visited separately.
        while sub != 0 {
            if sub.count_ones() as usize == half {
                let left = AgentSet::from_bits(sub);
                let right = set.difference(left);
                let wl = go(t, table, left);
                let wr = go(t, table, right);
                for i in left.iter() {
                    if wl[i] == 0 {
                        continue;
                    }
                    let beatable: u128 =
                        t.victims(i).intersection(right).iter().map(|k| wr[k]).sum();
                    acc[i] += 2 * wl[i] * beatable;
                }
            }
            sub = (sub - 1) & bits;
        }
    }
    table[set.bits() as usize] = Some(acc.clone());
    acc
}
